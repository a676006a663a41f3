//! Finite-difference form of the phase prescription and its continuum
//! reading as a change of electromagnetic potentials in 1+1 dimensions.
//!
//! With `Δ_n f = f(n+1, t) − f(n, t)` and `Δ_t f = f(n, t+1) − f(n, t)` the
//! coin transform reads
//!
//! ```text
//! χ − χ° = ½ [Δ_n(ξ(·, t+1) − ζ(·−1, t+1)) + Δ_t(ξ + ζ)]
//! α − α° = ½ [Δ_n(ξ(·, t+1) + ζ(·−1, t+1)) + Δ_t(ξ − ζ)]
//! β − β° = (ζ − ξ) − (α − α°)
//! ```
//!
//! and the potential shifts are `ΔA_T = (ħ/ec)(χ − χ°)/τ`,
//! `ΔA_X = (ħ/ec)(α − α°)/τ`.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::coin::{CoinAngles, CoinField, PhaseField};
use crate::error::{Error, Result};
use crate::field::{ScalarField, Window};
use crate::invariance::map_window;
use crate::lattice::fmt_real;

/// Lattice spacing `ell`, time step `tau`, characteristic speed `c` with
/// `ell = c·tau`, and the scale `hbar_over_e` of the potentials.
///
/// The masses are inert scales; nothing in this crate relates them to `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub ell: f64,
    pub tau: f64,
    pub c: f64,
    pub hbar_over_e: f64,
    pub mass_plus: f64,
    pub mass_minus: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { ell: 1.0, tau: 1.0, c: 1.0, hbar_over_e: 1.0, mass_plus: 0.0, mass_minus: 0.0 }
    }
}

impl UnitSystem {
    pub fn new(ell: f64, tau: f64, c: f64, hbar_over_e: f64) -> Result<Self> {
        let units = Self { ell, tau, c, hbar_over_e, ..Self::default() };
        units.validate()?;
        Ok(units)
    }

    /// Natural units with lattice spacing and time step both `h`.
    pub fn lattice(h: f64) -> Result<Self> {
        Self::new(h, h, 1.0, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.ell, self.tau, self.c, self.hbar_over_e];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Domain(format!("unit scales must be positive and finite: {self:?}")));
        }
        if (self.ell - self.c * self.tau).abs() > 1e-14 * self.ell.max(1.0) {
            return Err(Error::Domain(format!(
                "ell = {} differs from c·tau = {}",
                self.ell,
                self.c * self.tau
            )));
        }
        Ok(())
    }
}

/// `(Δ_n f, Δ_t f)` at `(n, t)`.
pub fn forward_differences(f: impl Fn(i64, i64) -> f64, n: i64, t: i64) -> (f64, f64) {
    let here = f(n, t);
    (f(n + 1, t) - here, f(n, t + 1) - here)
}

fn try_forward_differences(field: &ScalarField, name: &'static str, n: i64, t: i64) -> Result<(f64, f64)> {
    let here = field.require(name, n, t)?;
    Ok((field.require(name, n + 1, t)? - here, field.require(name, n, t + 1)? - here))
}

/// The general transform evaluated through `Δ_n` and `Δ_t`.
pub fn finite_difference_transform(reference: &CoinField, phases: &PhaseField, window: Window) -> Result<CoinField> {
    map_window(reference, window, |n, t, c| {
        // Δ_n of ξ(·, t+1) at n and of ζ(·−1, t+1) at n
        let (dn_xi, _) = try_forward_differences(&phases.xi, "xi", n, t + 1)?;
        let (dn_zeta, _) = try_forward_differences(&phases.zeta, "zeta", n - 1, t + 1)?;
        let (_, dt_xi) = try_forward_differences(&phases.xi, "xi", n, t)?;
        let (_, dt_zeta) = try_forward_differences(&phases.zeta, "zeta", n, t)?;
        let xi = phases.xi_at(n, t)?;
        let zeta = phases.zeta_at(n, t)?;
        let d_alpha = 0.5 * ((dn_xi + dn_zeta) + (dt_xi - dt_zeta));
        Ok(CoinAngles {
            theta: c.theta,
            alpha: c.alpha + d_alpha,
            beta: c.beta + (zeta - xi) - d_alpha,
            chi: c.chi + 0.5 * ((dn_xi - dn_zeta) + (dt_xi + dt_zeta)),
        })
    })
}

/// Samples of the two potential components on a regular `(X, T)` grid.
///
/// Arrays are indexed `[t_index, x_index]`; `x = x0 + i·dx`, `t = t0 + j·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    pub x0: f64,
    pub dx: f64,
    pub t0: f64,
    pub dt: f64,
    pub a_t: Array2<f64>,
    pub a_x: Array2<f64>,
}

impl PotentialField {
    /// Samples `f(x, t) -> (a_t, a_x)` on `nt × nx` points.
    pub fn sample(
        (x0, dx, nx): (f64, f64, usize),
        (t0, dt, nt): (f64, f64, usize),
        f: impl Fn(f64, f64) -> (f64, f64),
    ) -> Result<Self> {
        let values = Array2::from_shape_fn((nt, nx), |(j, i)| f(x0 + i as f64 * dx, t0 + j as f64 * dt));
        let field = Self {
            x0,
            dx,
            t0,
            dt,
            a_t: values.mapv(|v| v.0),
            a_x: values.mapv(|v| v.1),
        };
        field.check_finite()?;
        Ok(field)
    }

    fn check_finite(&self) -> Result<()> {
        if self.a_t.iter().chain(self.a_x.iter()).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Domain("potential field has non-finite samples".into()))
        }
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn t_at(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    /// `x,t,a_t,a_x`, time-major.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "t", "a_t", "a_x"])?;
        for ((j, i), a_t) in self.a_t.indexed_iter() {
            w.write_record([fmt_real(self.x_at(i)), fmt_real(self.t_at(j)), fmt_real(*a_t), fmt_real(self.a_x[(j, i)])])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `ΔA_T = (ħ/ec)(χ − χ°)/τ` and `ΔA_X = (ħ/ec)(α − α°)/τ` at every site of
/// `window`, placed at `X = n·ell`, `T = t·tau`.
pub fn potentials_from_transform(
    reference: &CoinField,
    transformed: &CoinField,
    window: Window,
    units: UnitSystem,
) -> Result<PotentialField> {
    units.validate()?;
    let scale = units.hbar_over_e / (units.c * units.tau);
    let mut a_t = Array2::zeros((window.height(), window.width()));
    let mut a_x = Array2::zeros((window.height(), window.width()));
    for (n, t) in window.iter() {
        let (r, c) = (reference.angles_at(n, t)?, transformed.angles_at(n, t)?);
        let idx = ((t - window.t_min) as usize, (n - window.n_min) as usize);
        a_t[idx] = scale * (c.chi - r.chi);
        a_x[idx] = scale * (c.alpha - r.alpha);
    }
    let field = PotentialField {
        x0: window.n_min as f64 * units.ell,
        dx: units.ell,
        t0: window.t_min as f64 * units.tau,
        dt: units.tau,
        a_t,
        a_x,
    };
    field.check_finite()?;
    Ok(field)
}

/// Derivative of `values` along `axis` with spacing `h`: centered inside,
/// second-order one-sided at the ends (first order when only two samples).
fn derivative(values: &Array2<f64>, axis: usize, h: f64) -> Array2<f64> {
    let len = values.shape()[axis];
    Array2::from_shape_fn(values.dim(), |(j, i)| {
        let k = if axis == 0 { j } else { i };
        let at = |m: usize| if axis == 0 { values[(m, i)] } else { values[(j, m)] };
        if len == 2 {
            (at(1) - at(0)) / h
        } else if k == 0 {
            (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h)
        } else if k == len - 1 {
            (3.0 * at(k) - 4.0 * at(k - 1) + at(k - 2)) / (2.0 * h)
        } else {
            (at(k + 1) - at(k - 1)) / (2.0 * h)
        }
    })
}

/// `E_X = ∂A_X/∂T − c ∂A_T/∂X`, indexed like the potentials.
pub fn electric_field(p: &PotentialField, units: UnitSystem) -> Result<Array2<f64>> {
    let (nt, nx) = p.a_t.dim();
    if nt < 2 || nx < 2 || p.a_x.dim() != (nt, nx) {
        return Err(Error::Domain(format!("electric field needs a grid of at least 2×2, got {nt}×{nx}")));
    }
    if !(p.dx > 0.0 && p.dt > 0.0) {
        return Err(Error::Domain("grid spacings must be positive".into()));
    }
    Ok(derivative(&p.a_x, 0, p.dt) - units.c * derivative(&p.a_t, 1, p.dx))
}

type Smooth = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Continuum phases `ξ(X, T)`, `ζ(X, T)`.
#[derive(Clone)]
pub struct SmoothPhasePair {
    pub xi: Smooth,
    pub zeta: Smooth,
}

impl fmt::Debug for SmoothPhasePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SmoothPhasePair(..)")
    }
}

impl SmoothPhasePair {
    pub fn new(
        xi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        zeta: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { xi: Arc::new(xi), zeta: Arc::new(zeta) }
    }

    pub fn equal(xi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        let xi: Smooth = Arc::new(xi);
        Self { zeta: Arc::clone(&xi), xi }
    }

    /// The lattice phase field `ξ(n·ell, t·tau)`, `ζ(n·ell, t·tau)`.
    pub fn on_lattice(&self, units: UnitSystem) -> PhaseField {
        let (xi, zeta) = (Arc::clone(&self.xi), Arc::clone(&self.zeta));
        let (ell, tau) = (units.ell, units.tau);
        PhaseField::formula(
            move |n, t| xi(n as f64 * ell, t as f64 * tau),
            move |n, t| zeta(n as f64 * ell, t as f64 * tau),
        )
    }
}

/// Rectangle `[x_min, x_max] × [t_min, t_max]` in physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Domain {
    pub fn new(x_min: f64, x_max: f64, t_min: f64, t_max: f64) -> Result<Self> {
        let d = Self { x_min, x_max, t_min, t_max };
        let ok = [x_min, x_max, t_min, t_max].iter().all(|v| v.is_finite()) && x_min < x_max && t_min < t_max;
        if ok {
            Ok(d)
        } else {
            Err(Error::Domain(format!("degenerate domain {d:?}")))
        }
    }
}

/// Residual samples on a regular grid, indexed `[t_index, x_index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualField {
    pub x0: f64,
    pub dx: f64,
    pub t0: f64,
    pub dt: f64,
    pub values: Array2<f64>,
}

impl ResidualField {
    /// `x,t,residual`, time-major.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "t", "residual"])?;
        for ((j, i), v) in self.values.indexed_iter() {
            let x = self.x0 + i as f64 * self.dx;
            let t = self.t0 + j as f64 * self.dt;
            w.write_record([fmt_real(x), fmt_real(t), fmt_real(*v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `(ħc/2e)[∂₋∂₊ξ − ∂₊∂₋ζ]` with `∂± = (1/c)∂_T ± ∂_X`, on a
/// `resolution × resolution` grid spanning `domain`.
///
/// Each null derivative is a composition of centered differences in `X`
/// and `T`; the phases are sampled two spacings beyond the domain so every
/// grid point uses the full stencil.
pub fn efield_invariance_residual(
    pair: &SmoothPhasePair,
    domain: Domain,
    resolution: usize,
    units: UnitSystem,
) -> Result<(f64, ResidualField)> {
    units.validate()?;
    Domain::new(domain.x_min, domain.x_max, domain.t_min, domain.t_max)?;
    if resolution < 4 {
        return Err(Error::Domain(format!("resolution must be at least 4, got {resolution}")));
    }
    let hx = (domain.x_max - domain.x_min) / (resolution - 1) as f64;
    let ht = (domain.t_max - domain.t_min) / (resolution - 1) as f64;
    let c = units.c;
    // padded grid index p ↔ physical index p − 2
    let padded = resolution + 4;
    let sample = |f: &Smooth| {
        Array2::from_shape_fn((padded, padded), |(j, i)| {
            f(domain.x_min + (i as f64 - 2.0) * hx, domain.t_min + (j as f64 - 2.0) * ht)
        })
    };
    // sign = +1 for ∂₊, −1 for ∂₋; output shrinks by one point on every side
    let null = |a: &Array2<f64>, sign: f64| {
        let (nt, nx) = a.dim();
        Array2::from_shape_fn((nt - 2, nx - 2), |(j, i)| {
            let (j, i) = (j + 1, i + 1);
            let d_t = (a[(j + 1, i)] - a[(j - 1, i)]) / (2.0 * ht);
            let d_x = (a[(j, i + 1)] - a[(j, i - 1)]) / (2.0 * hx);
            d_t / c + sign * d_x
        })
    };
    let xi = sample(&pair.xi);
    let zeta = sample(&pair.zeta);
    let scale = units.hbar_over_e * c / 2.0;
    let values = scale * (null(&null(&xi, 1.0), -1.0) - null(&null(&zeta, -1.0), 1.0));
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("phase pair is not finite on the domain".into()));
    }
    let max = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok((max, ResidualField { x0: domain.x_min, dx: hx, t0: domain.t_min, dt: ht, values }))
}

/// Leading-order continuum potential shifts `(ΔA_T, ΔA_X)` at `(x, t)`:
/// `ΔA_T + ΔA_X = (ħ/e) ∂₊ξ` and `ΔA_T − ΔA_X = (ħ/e) ∂₋ζ`.
///
/// Derivatives are centered differences with step `h`.
pub fn continuum_potential_shift(pair: &SmoothPhasePair, x: f64, t: f64, h: f64, units: UnitSystem) -> (f64, f64) {
    let d = |f: &Smooth, sign: f64| {
        let d_t = (f(x, t + h) - f(x, t - h)) / (2.0 * h);
        let d_x = (f(x + h, t) - f(x - h, t)) / (2.0 * h);
        d_t / units.c + sign * d_x
    };
    let plus = units.hbar_over_e * d(&pair.xi, 1.0);
    let minus = units.hbar_over_e * d(&pair.zeta, -1.0);
    ((plus + minus) / 2.0, (plus - minus) / 2.0)
}
