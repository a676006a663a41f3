//! Probabilistic summaries of a walk and the analytic laws they follow.

use std::io::Write;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::lattice::{fmt_real, SpinorField};

/// Probability of finding the walker at each site: `|ψ+|² + |ψ−|²`.
pub fn pmf(state: &SpinorField) -> Vec<f64> {
    state
        .plus()
        .iter()
        .zip(state.minus())
        .map(|(p, m)| p.norm_sqr() + m.norm_sqr())
        .collect()
}

/// Global probabilities of measuring `+` and `−` chirality.
pub fn chirality_probabilities(state: &SpinorField) -> (f64, f64) {
    let p_plus = state.plus().iter().map(|a| a.norm_sqr()).sum();
    let p_minus = state.minus().iter().map(|a| a.norm_sqr()).sum();
    (p_plus, p_minus)
}

/// Local magnetization `|ψ+|² − |ψ−|²`.
pub fn magnetization(state: &SpinorField) -> Vec<f64> {
    state
        .plus()
        .iter()
        .zip(state.minus())
        .map(|(p, m)| p.norm_sqr() - m.norm_sqr())
        .collect()
}

/// `ℓ Σ n ρ(n)`.
pub fn mean_position(state: &SpinorField, ell: f64) -> f64 {
    ell * state.sites().zip(pmf(state)).map(|(n, rho)| n as f64 * rho).sum::<f64>()
}

/// Observables of one time step. Arrays are indexed from `n = -t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableRecord {
    pub t: usize,
    pub rho: Vec<f64>,
    pub p_plus: f64,
    pub p_minus: f64,
    pub magnetization: Vec<f64>,
    pub mean_x: f64,
}

impl ObservableRecord {
    pub fn from_state(state: &SpinorField, ell: f64) -> Self {
        let (p_plus, p_minus) = chirality_probabilities(state);
        Self {
            t: state.t(),
            rho: pmf(state),
            p_plus,
            p_minus,
            magnetization: magnetization(state),
            mean_x: mean_position(state, ell),
        }
    }
}

/// Binomial distribution of a classical walk after `t` tosses with
/// probability `p` of stepping right, on sites `-t..=t` (zero off parity).
///
/// Coefficients go through `ln Γ` so large `t` cannot overflow.
pub fn classical_pmf(p: f64, t: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("probability p={p} outside [0, 1]")));
    }
    let tf = t as f64;
    let ln_t_fact = ln_gamma(tf + 1.0);
    let mut out = vec![0.0; 2 * t + 1];
    for right in 0..=t {
        let left = t - right;
        let ln_weight = xlogy(right as f64, p) + xlogy(left as f64, 1.0 - p);
        if ln_weight == f64::NEG_INFINITY {
            continue;
        }
        let ln_binom = ln_t_fact - ln_gamma(right as f64 + 1.0) - ln_gamma(left as f64 + 1.0);
        // site n = right - left, stored at index n + t = 2 * right
        out[2 * right] = (ln_binom + ln_weight).exp();
    }
    Ok(out)
}

/// `k ln x` with the convention `0 ln 0 = 0`.
fn xlogy(k: f64, x: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * x.ln()
    }
}

/// `cos 2η + sin 2η tan θ cos φ`, the bias factor of the walk.
fn bias(theta: f64, eta: f64, phi: f64) -> f64 {
    (2.0 * eta).cos() + (2.0 * eta).sin() * theta.tan() * phi.cos()
}

fn require_open_quadrant(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < std::f64::consts::FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("theta={theta} must lie in (0, π/2)")))
    }
}

/// Long-time envelope of the exact PMF at an occupied site (`n + t` even).
///
/// Normalized so that summing over the occupied sublattice approaches 1:
///
/// ```text
/// ρ̄(n, t) = (2 t sin θ / π) · [t + n (cos 2η + sin 2η tan θ cos φ)]
///           / ((t² − n²) √(t² cos²θ − n²))
/// ```
///
/// Returns 0 outside `|n| < t cos θ`. `phi` is the combination `α + β − γ`.
pub fn stationary_pmf(n: i64, t: usize, theta: f64, eta: f64, phi: f64) -> Result<f64> {
    require_open_quadrant(theta)?;
    let (n, t) = (n as f64, t as f64);
    let edge = t * theta.cos();
    if n.abs() >= edge {
        return Ok(0.0);
    }
    let profile = 1.0 / ((t * t - n * n) * (edge * edge - n * n).sqrt());
    Ok(2.0 * t * theta.sin() / std::f64::consts::PI * profile * (t + n * bias(theta, eta, phi)))
}

/// Asymptotic drift `d⟨X⟩/dt` in lattice units:
/// `(1 − sin θ)(cos 2η + sin 2η tan θ cos φ)`.
pub fn ballistic_slope(theta: f64, eta: f64, phi: f64) -> Result<f64> {
    if theta.cos().abs() < 1e-12 {
        return Err(Error::Unsupported(format!("tan θ is singular at theta={theta}")));
    }
    Ok((1.0 - theta.sin()) * bias(theta, eta, phi))
}

/// Left-hand sides of the two parity-symmetry conditions,
/// `cos 2η + sin 2η tan θ cos φ` and `cos 2η + sin 2η tan 2θ cos φ`.
/// Both vanish exactly when the walk is mirror symmetric.
pub fn symmetry_residuals(theta: f64, eta: f64, phi: f64) -> Result<(f64, f64)> {
    if theta.cos().abs() < 1e-12 || (2.0 * theta).cos().abs() < 1e-12 {
        return Err(Error::Unsupported(format!("tan θ or tan 2θ is singular at theta={theta}")));
    }
    let (s2e, c2e) = (2.0 * eta).sin_cos();
    let cphi = phi.cos();
    Ok((c2e + s2e * theta.tan() * cphi, c2e + s2e * (2.0 * theta).tan() * cphi))
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "fit_slope needs paired samples");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Least-squares slope of `mean_x` over the second half of a trajectory.
pub fn measured_slope(trajectory: &[ObservableRecord]) -> f64 {
    let tail = &trajectory[trajectory.len() / 2..];
    let ts: Vec<f64> = tail.iter().map(|r| r.t as f64).collect();
    let xs: Vec<f64> = tail.iter().map(|r| r.mean_x).collect();
    fit_slope(&ts, &xs)
}

/// Averages each occupied site with its occupied neighbours `n ± 2`
/// (fewer at the window edges). Off-parity entries stay zero.
pub fn smooth_occupied(rho: &[f64], t: usize) -> Vec<f64> {
    let mut out = vec![0.0; rho.len()];
    for k in (0..rho.len()).step_by(2) {
        let lo = k.saturating_sub(2);
        let hi = (k + 2).min(2 * t);
        let picks: Vec<f64> = (lo..=hi).step_by(2).map(|j| rho[j]).collect();
        out[k] = picks.iter().sum::<f64>() / picks.len() as f64;
    }
    out
}

/// `n,rho`
pub fn write_pmf_csv<W: Write>(writer: W, state: &SpinorField) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "rho"])?;
    for (n, rho) in state.sites().zip(pmf(state)) {
        w.write_record([n.to_string(), fmt_real(rho)])?;
    }
    w.flush()?;
    Ok(())
}

/// `t,mean_x,p_plus,p_minus`
pub fn write_trajectory_csv<W: Write>(writer: W, records: &[ObservableRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "mean_x", "p_plus", "p_minus"])?;
    for r in records {
        w.write_record([r.t.to_string(), fmt_real(r.mean_x), fmt_real(r.p_plus), fmt_real(r.p_minus)])?;
    }
    w.flush()?;
    Ok(())
}

/// `n,rho_exact,rho_stationary,rho_classical` with the classical walk at
/// `p = cos²θ`.
pub fn write_comparison_csv<W: Write>(
    writer: W,
    state: &SpinorField,
    theta: f64,
    eta: f64,
    phi: f64,
) -> Result<()> {
    let t = state.t();
    let classical = classical_pmf(theta.cos().powi(2), t)?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "rho_exact", "rho_stationary", "rho_classical"])?;
    for ((n, rho), clas) in state.sites().zip(pmf(state)).zip(classical) {
        let stationary = if (n + t as i64) % 2 == 0 {
            stationary_pmf(n, t, theta, eta, phi).unwrap_or(0.0)
        } else {
            0.0
        };
        w.write_record([n.to_string(), fmt_real(rho), fmt_real(stationary), fmt_real(clas)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::CoinAngles;
    use crate::evolution::{evolve, step_homogeneous};
    use crate::lattice::{localized_state, InitialState};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn localized_start_observables() {
        let s = localized_state(InitialState::new(0.0, 0.0));
        assert_eq!(pmf(&s), vec![1.0]);
        assert_eq!(magnetization(&s), vec![1.0]);
        assert_eq!(mean_position(&s, 1.0), 0.0);

        let s = localized_state(InitialState::new(FRAC_PI_4, 0.3));
        let (pp, pm) = chirality_probabilities(&s);
        assert!((pp - 0.5).abs() < 1e-15 && (pm - 0.5).abs() < 1e-15);
        assert!(magnetization(&s)[0].abs() < 1e-15);
    }

    #[test]
    fn right_mover_keeps_plus_chirality() {
        let mut s = localized_state(InitialState::new(0.0, 0.0));
        for _ in 0..9 {
            s = step_homogeneous(&s, CoinAngles::rotation(0.0));
        }
        assert_eq!(chirality_probabilities(&s), (1.0, 0.0));
    }

    #[test]
    fn edge_site_probability_is_power_of_cosine() {
        let theta = 0.6;
        let mut s = localized_state(InitialState::new(0.0, 0.0));
        for t in 1..=30 {
            s = step_homogeneous(&s, CoinAngles::rotation(theta));
            let rho = pmf(&s);
            assert!((rho[2 * t] - theta.cos().powi(2 * t as i32)).abs() < 1e-14);
        }
    }

    #[test]
    fn fig1b_odd_sites_vanish() {
        let init = InitialState::new(3.0 * PI / 16.0, -PI);
        let run = evolve(init, &CoinAngles::rotation(PI / 8.0).into(), 100, false).unwrap();
        let rho = pmf(&run.final_state);
        assert!(rho.iter().skip(1).step_by(2).all(|&r| r == 0.0));
        assert!((rho.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classical_small_cases() {
        let rho = classical_pmf(1.0, 5).unwrap();
        assert!((rho[10] - 1.0).abs() < 1e-14);
        assert!(rho[..10].iter().all(|&r| r == 0.0));

        let rho = classical_pmf(0.5, 2).unwrap();
        let expected = [0.25, 0.0, 0.5, 0.0, 0.25];
        for (a, b) in rho.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(classical_pmf(1.5, 3).is_err());
        assert!(classical_pmf(-0.1, 3).is_err());
    }

    #[test]
    fn classical_normalizes_at_large_t() {
        for t in [1usize, 10, 101, 500, 1000] {
            let total: f64 = classical_pmf(0.3, t).unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "t={t} total={total}");
        }
    }

    #[test]
    fn stationary_center_value() {
        // at n = 0 the bracket is t and the profile is 1/(t² · t cos θ)
        let (theta, t) = (0.7, 80usize);
        let v = stationary_pmf(0, t, theta, 0.4, 1.0).unwrap();
        let expected = 2.0 * theta.tan() / (PI * t as f64);
        assert!((v - expected).abs() < 1e-15 * expected.abs().max(1.0));
    }

    #[test]
    fn stationary_symmetric_family_is_even() {
        let t = 120;
        for n in (0..80).step_by(2) {
            let a = stationary_pmf(n, t, 0.5, FRAC_PI_4, FRAC_PI_2).unwrap();
            let b = stationary_pmf(-n, t, 0.5, FRAC_PI_4, FRAC_PI_2).unwrap();
            assert!((a - b).abs() <= 1e-15 * a);
        }
        assert_eq!(stationary_pmf(119, t, 0.5, 0.0, 0.0).unwrap(), 0.0);
        assert!(stationary_pmf(0, t, 0.0, 0.0, 0.0).is_err());
        assert!(stationary_pmf(0, t, FRAC_PI_2, 0.0, 0.0).is_err());
    }

    #[test]
    fn stationary_envelope_integrates_to_one() {
        // x = n/t = c sin u removes the edge singularity; the occupied-site
        // density is half the site density.
        let (theta, eta, phi) = (0.7f64, 0.3, 2.0);
        let t = 1000usize;
        let c = theta.cos();
        let steps = 20_000;
        let h = PI / steps as f64;
        let total: f64 = (0..steps)
            .map(|k| {
                let u = -FRAC_PI_2 + (k as f64 + 0.5) * h;
                let x = c * u.sin();
                let dx_du = c * u.cos();
                let n = x * t as f64;
                let edge = t as f64 * c;
                let density = 2.0 * t as f64 * theta.sin() / PI * (t as f64 + n * bias(theta, eta, phi))
                    / ((t as f64 * t as f64 - n * n) * (edge * edge - n * n).sqrt());
                density * dx_du * t as f64 / 2.0 * h
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-6, "total {total}");
    }

    #[test]
    fn ballistic_known_values() {
        let v = ballistic_slope(FRAC_PI_6, FRAC_PI_6, 0.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(ballistic_slope(0.8, FRAC_PI_4, FRAC_PI_2).unwrap().abs() < 1e-15);
        let v = ballistic_slope(FRAC_PI_4, 0.0, 1.234).unwrap();
        assert!((v - (1.0 - 2f64.sqrt() / 2.0)).abs() < 1e-15);
        assert!(ballistic_slope(FRAC_PI_2, 0.0, 0.0).is_err());
    }

    #[test]
    fn ballistic_slope_matches_long_walk() {
        let run = evolve(InitialState::new(0.0, 0.0), &CoinAngles::hadamard().into(), 200, true).unwrap();
        let measured = measured_slope(&run.trajectory.unwrap());
        assert!((measured - (1.0 - 2f64.sqrt() / 2.0)).abs() < 0.02, "measured {measured}");
    }

    #[test]
    fn symmetry_residual_cases() {
        let (a, b) = symmetry_residuals(PI / 5.0, FRAC_PI_4, FRAC_PI_2).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15);
        assert_eq!(symmetry_residuals(0.3, 0.0, 0.9).unwrap(), (1.0, 1.0));
        let (a, b) = symmetry_residuals(FRAC_PI_6, FRAC_PI_6, 0.0).unwrap();
        assert!((a - 1.0).abs() < 1e-15);
        assert!((b - 2.0).abs() < 1e-14);
        assert!(symmetry_residuals(FRAC_PI_4, 0.1, 0.0).is_err());
    }

    #[test]
    fn asymmetric_parameters_give_asymmetric_pmf() {
        // nonzero residuals must show up as mirror asymmetry of the exact PMF
        let run = evolve(InitialState::new(FRAC_PI_6, 0.0), &CoinAngles::rotation(FRAC_PI_6).into(), 100, false).unwrap();
        let rho = pmf(&run.final_state);
        let asym = (0..rho.len()).map(|k| (rho[k] - rho[rho.len() - 1 - k]).abs()).fold(0.0, f64::max);
        assert!(asym > 1e-3);
    }

    #[test]
    fn smoothing_preserves_flat_profiles() {
        let rho = vec![0.2, 0.0, 0.2, 0.0, 0.2];
        assert!(smooth_occupied(&rho, 2).iter().zip(&rho).all(|(a, b)| (a - b).abs() < 1e-16));
        let rho = vec![0.0, 0.0, 0.6, 0.0, 0.0];
        let s = smooth_occupied(&rho, 2);
        assert!((s[0] - 0.3).abs() < 1e-15 && (s[2] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn slope_fit_recovers_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        assert!((fit_slope(&xs, &ys) - 3.0).abs() < 1e-14);
    }
}
