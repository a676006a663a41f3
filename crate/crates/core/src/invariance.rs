//! Phase transformations of the coin that leave the walk's moduli invariant.
//!
//! Given real phase sets `ξ(n, t)` and `ζ(n, t)`, the transformed coin
//! produces `ψ+ = ψ°+ e^{iξ}` and `ψ− = ψ°− e^{iζ}` at every site and time,
//! provided the starting amplitudes carry the same phases. With the shorthand
//! `ξ' = ξ(n+1, t+1)` and `ζ' = ζ(n−1, t+1)`:
//!
//! ```text
//! χ = χ° + (ξ' − ξ + ζ' − ζ) / 2
//! α = α° + (ξ' − ξ − ζ' + ζ) / 2
//! β = β° + (ζ' + ζ − ξ' − ξ) / 2
//! ```
//!
//! `θ` is never modified.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::coin::{CoinAngles, CoinField, PhaseField};
use crate::error::{Error, Result};
use crate::evolution::step_inhomogeneous;
use crate::field::{LatticeTable, Window};
use crate::lattice::{localized_state, InitialState, SpinorField};

/// Products below this modulus carry no usable relative phase.
const PHASE_FLOOR: f64 = 1e-8;

/// Applies the general prescription to `reference` over `window`.
pub fn transform_coin_field(reference: &CoinField, phases: &PhaseField, window: Window) -> Result<CoinField> {
    map_window(reference, window, |n, t, c| {
        let xi = phases.xi_at(n, t)?;
        let zeta = phases.zeta_at(n, t)?;
        let xi_next = phases.xi_at(n + 1, t + 1)?;
        let zeta_next = phases.zeta_at(n - 1, t + 1)?;
        Ok(CoinAngles {
            theta: c.theta,
            alpha: c.alpha + (xi_next - xi - zeta_next + zeta) / 2.0,
            beta: c.beta + (zeta_next + zeta - xi_next - xi) / 2.0,
            chi: c.chi + (xi_next - xi + zeta_next - zeta) / 2.0,
        })
    })
}

/// The `ζ ≡ ξ` specialization:
///
/// ```text
/// χ = χ° + (ξ(n+1, t+1) + ξ(n−1, t+1) − 2ξ) / 2
/// α = α° + (ξ(n+1, t+1) − ξ(n−1, t+1)) / 2
/// β = β° − (ξ(n+1, t+1) − ξ(n−1, t+1)) / 2
/// ```
///
/// Fails when `ζ` differs from `ξ` anywhere the prescription reads it.
pub fn exact_transform(reference: &CoinField, phases: &PhaseField, window: Window) -> Result<CoinField> {
    require_equal_phases(phases, window)?;
    map_window(reference, window, |n, t, c| {
        let xi = phases.xi_at(n, t)?;
        let right = phases.xi_at(n + 1, t + 1)?;
        let left = phases.xi_at(n - 1, t + 1)?;
        let tilt = (right - left) / 2.0;
        Ok(CoinAngles {
            theta: c.theta,
            alpha: c.alpha + tilt,
            beta: c.beta - tilt,
            chi: c.chi + (right + left - 2.0 * xi) / 2.0,
        })
    })
}

/// `ξ = (n − t)(β₁ − β₀)/2`, `ζ = (n + t)(β₁ − β₀)/2`.
///
/// Both are constant along their characteristics, so `χ` and `α` are left
/// unchanged and `β` drifts by `β₁ − β₀` per step.
pub fn quasi_invariant_phases(beta0: f64, beta1: f64) -> PhaseField {
    let d = beta1 - beta0;
    PhaseField::formula(move |n, t| (n - t) as f64 * d / 2.0, move |n, t| (n + t) as f64 * d / 2.0)
}

pub(crate) fn map_window(
    reference: &CoinField,
    window: Window,
    f: impl Fn(i64, i64, CoinAngles) -> Result<CoinAngles>,
) -> Result<CoinField> {
    let angles: Vec<CoinAngles> = window
        .iter()
        .map(|(n, t)| f(n, t, reference.angles_at(n, t)?))
        .collect::<Result<_>>()?;
    let column = |pick: fn(&CoinAngles) -> f64| {
        let mut it = angles.iter();
        LatticeTable::from_fn(window, |_, _| pick(it.next().expect("one angle per site")))
    };
    Ok(CoinField::tabulated(
        column(|c| c.theta),
        column(|c| c.alpha),
        column(|c| c.beta),
        column(|c| c.chi),
    ))
}

fn require_equal_phases(phases: &PhaseField, window: Window) -> Result<()> {
    for (n, t) in window.expand(1, 1).iter() {
        let xi = phases.xi.value(n, t);
        let zeta = phases.zeta.value(n, t);
        if xi != zeta {
            return Err(Error::Precondition(format!(
                "exact invariance needs zeta = xi, differs at (n={n}, t={t}): {xi:?} vs {zeta:?}"
            )));
        }
    }
    Ok(())
}

fn tolerance(v: f64) -> f64 {
    1e-12 * v.abs().max(1.0)
}

/// Checks `ξ(n+1, t+1) = ξ(n, t)` and `ζ(n−1, t+1) = ζ(n, t)` over `window`.
pub fn check_characteristic_conditions(phases: &PhaseField, window: Window) -> Result<()> {
    for (n, t) in window.iter() {
        let xi = phases.xi_at(n, t)?;
        let zeta = phases.zeta_at(n, t)?;
        let xi_next = phases.xi_at(n + 1, t + 1)?;
        let zeta_next = phases.zeta_at(n - 1, t + 1)?;
        if (xi_next - xi).abs() > tolerance(xi) || (zeta_next - zeta).abs() > tolerance(zeta) {
            return Err(Error::Precondition(format!(
                "phases are not constant along characteristics at (n={n}, t={t})"
            )));
        }
    }
    Ok(())
}

/// Coin sites visited by a walk from the origin that runs `t_final` steps.
fn coin_window(t_final: usize) -> Option<Window> {
    (t_final > 0).then(|| Window::light_cone(t_final - 1))
}

/// Deviations between the two walks at one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDeviation {
    pub t: usize,
    pub modulus: f64,
    pub pmf: f64,
    pub relative_phase: f64,
    pub ray: f64,
}

/// Comparison of a transformed walk against its reference at every step.
///
/// `max_relative_phase_deviation` compares `arg(ψ+ ψ−*)` of the two walks
/// directly, at sites where both products exceed `1e-8` in modulus.
/// `max_ray_deviation` is `max |ψ± − ψ°± e^{iξ or iζ}|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub max_modulus_deviation: f64,
    pub max_pmf_deviation: f64,
    pub max_relative_phase_deviation: f64,
    pub max_ray_deviation: f64,
    pub per_time_deviations: Vec<StepDeviation>,
}

impl InvarianceReport {
    /// The report fields merged with `inputs`, which must serialize to a JSON object.
    pub fn to_json(&self, inputs: &impl Serialize) -> Result<serde_json::Value> {
        let mut out = serde_json::to_value(self).map_err(|e| Error::Parse(e.to_string()))?;
        let extra = serde_json::to_value(inputs).map_err(|e| Error::Parse(e.to_string()))?;
        match (out.as_object_mut(), extra) {
            (Some(map), serde_json::Value::Object(extra)) => {
                map.extend(extra);
                Ok(out)
            }
            _ => Err(Error::Precondition("report inputs must serialize to an object".into())),
        }
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// `arg(ψ+ ψ−*)` per site, `None` where the product is below `1e-8`.
pub fn relative_phase_map(state: &SpinorField) -> Vec<Option<f64>> {
    state
        .plus()
        .iter()
        .zip(state.minus())
        .map(|(p, m)| {
            let z = p * m.conj();
            (z.norm() > PHASE_FLOOR).then(|| z.arg())
        })
        .collect()
}

fn phased_initial_state(init: InitialState, phases: &PhaseField) -> Result<SpinorField> {
    let base = localized_state(init);
    let plus = base.psi_plus(0) * Complex64::from_polar(1.0, phases.xi_at(0, 0)?);
    let minus = base.psi_minus(0) * Complex64::from_polar(1.0, phases.zeta_at(0, 0)?);
    SpinorField::new(0, vec![plus], vec![minus], true)
}

fn compare(reference: &SpinorField, transformed: &SpinorField, phases: &PhaseField) -> Result<StepDeviation> {
    let t = reference.t() as i64;
    let mut dev = StepDeviation { t: reference.t(), modulus: 0.0, pmf: 0.0, relative_phase: 0.0, ray: 0.0 };
    let ref_phase = relative_phase_map(reference);
    let new_phase = relative_phase_map(transformed);
    for (k, n) in reference.sites().enumerate() {
        let (p0, m0) = (reference.psi_plus(n), reference.psi_minus(n));
        let (p, m) = (transformed.psi_plus(n), transformed.psi_minus(n));
        dev.modulus = dev.modulus.max((p.norm() - p0.norm()).abs()).max((m.norm() - m0.norm()).abs());
        dev.pmf = dev.pmf.max(((p.norm_sqr() + m.norm_sqr()) - (p0.norm_sqr() + m0.norm_sqr())).abs());
        if let (Some(a), Some(b)) = (ref_phase[k], new_phase[k]) {
            dev.relative_phase = dev.relative_phase.max(wrap_angle(b - a).abs());
        }
        let ray_plus = p - p0 * Complex64::from_polar(1.0, phases.xi_at(n, t)?);
        let ray_minus = m - m0 * Complex64::from_polar(1.0, phases.zeta_at(n, t)?);
        dev.ray = dev.ray.max(ray_plus.norm()).max(ray_minus.norm());
    }
    Ok(dev)
}

fn dual_evolution(
    init: InitialState,
    reference: &CoinField,
    transformed: &CoinField,
    phases: &PhaseField,
    t_final: usize,
) -> Result<InvarianceReport> {
    let mut a = localized_state(init);
    let mut b = phased_initial_state(init, phases)?;
    let mut per_time = Vec::with_capacity(t_final + 1);
    per_time.push(compare(&a, &b, phases)?);
    for _ in 0..t_final {
        a = step_inhomogeneous(&a, reference)?;
        b = step_inhomogeneous(&b, transformed)?;
        per_time.push(compare(&a, &b, phases)?);
    }
    let max = |pick: fn(&StepDeviation) -> f64| per_time.iter().map(pick).fold(0.0, f64::max);
    Ok(InvarianceReport {
        max_modulus_deviation: max(|d| d.modulus),
        max_pmf_deviation: max(|d| d.pmf),
        max_relative_phase_deviation: max(|d| d.relative_phase),
        max_ray_deviation: max(|d| d.ray),
        per_time_deviations: per_time,
    })
}

/// Evolves the reference walk and its general transform side by side.
pub fn verify_phase_invariance(
    init: InitialState,
    reference: &CoinField,
    phases: &PhaseField,
    t_final: usize,
) -> Result<InvarianceReport> {
    let transformed = match coin_window(t_final) {
        Some(w) => transform_coin_field(reference, phases, w)?,
        None => reference.clone(),
    };
    dual_evolution(init, reference, &transformed, phases, t_final)
}

/// Like [`verify_phase_invariance`], after checking that `phases` is constant
/// along characteristics on every visited coin site.
pub fn verify_quasi_invariance(
    init: InitialState,
    reference: &CoinField,
    phases: &PhaseField,
    t_final: usize,
) -> Result<InvarianceReport> {
    if let Some(w) = coin_window(t_final) {
        check_characteristic_conditions(phases, w)?;
    }
    verify_phase_invariance(init, reference, phases, t_final)
}

/// Dual evolution through [`exact_transform`]. `phases` must have `ζ ≡ ξ`.
pub fn verify_exact_invariance(
    init: InitialState,
    reference: &CoinField,
    phases: &PhaseField,
    t_final: usize,
) -> Result<InvarianceReport> {
    let transformed = match coin_window(t_final) {
        Some(w) => exact_transform(reference, phases, w)?,
        None => {
            require_equal_phases(phases, Window::light_cone(0))?;
            reference.clone()
        }
    };
    dual_evolution(init, reference, &transformed, phases, t_final)
}
