//! Explicit solution of the homogeneous walk.
//!
//! Both spinor components are expressed through a real kernel `Λ(n, t)` that
//! depends on the coin only through `cos θ`. `Λ` is available from a spectral
//! sum over `r = 1..=t` and from the two-step recursion
//!
//! ```text
//! Λ(n, t) = cos θ [Λ(n−1, t−1) − Λ(n+1, t−1)] + Λ(n, t−2)
//! ```
//!
//! seeded with `Λ(0, 0) = 1`, `Λ(n, 0) = 0` for `n ≠ 0`, and `Λ(±t, t) = 0`
//! for `t ≥ 1`. Only entries with `n + t` even are defined.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use num_complex::Complex64;

use crate::coin::CoinAngles;
use crate::error::{Error, Result};
use crate::lattice::{fmt_real, Amplitude, InitialState, SpinorField};

/// `arcsin(cos θ · sin(π r / (t + 1)))`, for `1 ≤ r ≤ t`.
pub fn omega(r: usize, t: usize, theta: f64) -> f64 {
    (theta.cos() * (PI * r as f64 / (t as f64 + 1.0)).sin()).asin()
}

fn check_parity(n: i64, t: i64) -> Result<()> {
    if (n + t).rem_euclid(2) != 0 {
        Err(Error::Parity { n, t })
    } else {
        Ok(())
    }
}

fn spectral_theta_ok(theta: f64) -> bool {
    theta > 0.0 && theta < FRAC_PI_2
}

/// Spectral-sum evaluation of `Λ(n, t)`.
///
/// Terms reach `1 / sin θ` in magnitude with alternating signs, so the sum
/// is accumulated with Neumaier compensation.
pub fn lambda_explicit(n: i64, t: usize, theta: f64) -> Result<f64> {
    check_parity(n, t as i64)?;
    if n.unsigned_abs() as usize > t {
        return Err(Error::Domain(format!("|n|={} exceeds t={t}", n.abs())));
    }
    if !spectral_theta_ok(theta) {
        return Err(Error::Unsupported(format!(
            "spectral sum needs theta in (0, π/2), got {theta}"
        )));
    }
    let tp1 = t as f64 + 1.0;
    let mut sum = CompensatedSum::new(if t.is_multiple_of(2) { 1.0 } else { 0.0 });
    for r in 1..=t {
        let w = omega(r, t, theta);
        let arg = (t as f64 - 1.0) * w - PI * r as f64 * n as f64 / tp1;
        sum.add(arg.cos() / w.cos());
    }
    Ok(sum.total() / tp1)
}

struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn new(start: f64) -> Self {
        Self { sum: start, carry: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let s = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - s) + x;
        } else {
            self.carry += (x - s) + self.sum;
        }
        self.sum = s;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `Λ(n, t)` for `0 ≤ t ≤ t_max`, filled by the two-step recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaTable {
    theta: f64,
    // row t holds n = -t, -t+2, ..., t
    rows: Vec<Vec<f64>>,
}

/// Fills `Λ` up to `t_max` by recursion. Valid for any real `theta`.
pub fn lambda_table(theta: f64, t_max: usize) -> LambdaTable {
    let c = theta.cos();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        let mut row = vec![0.0; t + 1];
        if t == 0 {
            row[0] = 1.0;
        } else {
            // interior entries k = 1..t-1; k = 0 and k = t are the boundary zeros.
            // n = 2k - t; in row t-1, n±1 sit at k and k-1; in row t-2, n sits at k-1.
            for k in 1..t {
                let prev = &rows[t - 1];
                let two_back = if t >= 2 { rows[t - 2][k - 1] } else { 0.0 };
                row[k] = c * (prev[k - 1] - prev[k]) + two_back;
            }
        }
        rows.push(row);
    }
    LambdaTable { theta, rows }
}

impl LambdaTable {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn t_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `Λ(n, t)`; zero for `|n| > t`, an error off parity or past `t_max`.
    pub fn get(&self, n: i64, t: usize) -> Result<f64> {
        check_parity(n, t as i64)?;
        let row = self
            .rows
            .get(t)
            .ok_or_else(|| Error::Domain(format!("t={t} beyond table t_max={}", self.t_max())))?;
        if n.unsigned_abs() as usize > t {
            return Ok(0.0);
        }
        Ok(row[((n + t as i64) / 2) as usize])
    }

    /// Iterates `(n, t, Λ)` over every stored entry.
    pub fn entries(&self) -> impl Iterator<Item = (i64, usize, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(|(t, row)| {
            row.iter().enumerate().map(move |(k, &v)| (2 * k as i64 - t as i64, t, v))
        })
    }

    /// `n,t,lambda`
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "t", "lambda"])?;
        for (n, t, v) in self.entries() {
            w.write_record([n.to_string(), t.to_string(), fmt_real(v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// How [`closed_form_amplitudes_with`] obtains `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaMethod {
    Recursion,
    Spectral,
    /// Spectral sum for `θ ∈ (0, π/2)`, recursion otherwise.
    Auto,
}

/// Both non-zero components at `t = 1`: `(ψ+(+1, 1), ψ−(−1, 1))`.
pub fn first_step_amplitudes(init: InitialState, c: CoinAngles) -> (Amplitude, Amplitude) {
    let (se, ce) = init.eta.sin_cos();
    let (st, ct) = c.theta.sin_cos();
    let e = |phase: f64| Complex64::from_polar(1.0, phase);
    let plus = e(c.chi) * (e(c.alpha) * ce * ct + e(init.gamma - c.beta) * se * st);
    let minus = e(c.chi) * (e(c.beta) * ce * st - e(init.gamma - c.alpha) * se * ct);
    (plus, minus)
}

/// The closed-form field at time `t`, choosing the `Λ` source automatically.
pub fn closed_form_amplitudes(init: InitialState, c: CoinAngles, t: usize) -> Result<SpinorField> {
    closed_form_amplitudes_with(init, c, t, LambdaMethod::Auto)
}

/// `ψ+(n, t) = e^{i(χt + αn)} [ψ+(0,0) Λ(n, t) + e^{−i(χ+α)} ψ+(1,1) Λ(n−1, t+1)]`
/// `ψ−(n, t) = e^{i(χt + αn)} [ψ−(0,0) Λ(n, t) + e^{−i(χ−α)} ψ−(−1,1) Λ(n+1, t+1)]`
pub fn closed_form_amplitudes_with(
    init: InitialState,
    c: CoinAngles,
    t: usize,
    method: LambdaMethod,
) -> Result<SpinorField> {
    let spectral = match method {
        LambdaMethod::Recursion => false,
        LambdaMethod::Spectral => true,
        LambdaMethod::Auto => spectral_theta_ok(c.theta),
    };
    let table = (!spectral).then(|| lambda_table(c.theta, t + 1));
    let lambda = |n: i64, tt: usize| -> Result<f64> {
        match &table {
            Some(table) => table.get(n, tt),
            None if n.unsigned_abs() as usize > tt => check_parity(n, tt as i64).map(|_| 0.0),
            None => lambda_explicit(n, tt, c.theta),
        }
    };

    let p00 = init.plus_amplitude();
    let m00 = init.minus_amplitude();
    let (p11, m11) = first_step_amplitudes(init, c);
    let plus_seed = Complex64::from_polar(1.0, -(c.chi + c.alpha)) * p11;
    let minus_seed = Complex64::from_polar(1.0, -(c.chi - c.alpha)) * m11;

    let zero = Complex64::new(0.0, 0.0);
    let len = 2 * t + 1;
    let mut plus = vec![zero; len];
    let mut minus = vec![zero; len];
    let ti = t as i64;
    for k in (0..len).step_by(2) {
        let n = k as i64 - ti;
        let phase = Complex64::from_polar(1.0, c.chi * t as f64 + c.alpha * n as f64);
        let here = lambda(n, t)?;
        plus[k] = phase * (p00 * here + plus_seed * lambda(n - 1, t + 1)?);
        minus[k] = phase * (m00 * here + minus_seed * lambda(n + 1, t + 1)?);
    }
    SpinorField::new(t, plus, minus, true)
}

/// Squared moduli of the first-step components, `(|ψ+(1,1)|², |ψ−(−1,1)|²)`:
/// `½[1 ± (cos 2η cos 2θ + sin 2η sin 2θ cos φ)]`, `φ = α + β − γ`.
///
/// The pair always sums to exactly 1.
pub fn initial_velocities(init: InitialState, c00: CoinAngles) -> (f64, f64) {
    let phi = c00.alpha + c00.beta - init.gamma;
    let x = (2.0 * init.eta).cos() * (2.0 * c00.theta).cos()
        + (2.0 * init.eta).sin() * (2.0 * c00.theta).sin() * phi.cos();
    // the smaller half is computed directly; 1 - small is then exact enough
    // that the pair sums to 1 without rounding
    if x >= 0.0 {
        let minus = 0.5 * (1.0 - x);
        (1.0 - minus, minus)
    } else {
        let plus = 0.5 * (1.0 + x);
        (plus, 1.0 - plus)
    }
}
