//! Shift-and-coin step operator.
//!
//! One step maps `ψ(·, t)` to `ψ(·, t+1)` with
//!
//! ```text
//! ψ+(n, t+1) = U₀₀(n−1, t) ψ+(n−1, t) + U₀₁(n−1, t) ψ−(n−1, t)
//! ψ−(n, t+1) = U₁₀(n+1, t) ψ+(n+1, t) + U₁₁(n+1, t) ψ−(n+1, t)
//! ```
//!
//! where `U(n, t)` is the coin at the *source* site and time. No
//! renormalization is applied; norm drift is left observable.

use num_complex::Complex64;

use crate::coin::{coin_matrix, CoinAngles, CoinField};
use crate::error::Result;
use crate::lattice::{localized_state, Amplitude, InitialState, SpinorField};
use crate::observables::ObservableRecord;

type Coin = [[Amplitude; 2]; 2];

fn step_with(state: &SpinorField, mut coin_at: impl FnMut(i64) -> Result<Coin>) -> Result<SpinorField> {
    let t = state.t();
    let len = 2 * t + 3;
    let zero = Complex64::new(0.0, 0.0);
    let mut plus = vec![zero; len];
    let mut minus = vec![zero; len];
    for (k, (n, (&p, &m))) in state.sites().zip(state.plus().iter().zip(state.minus())).enumerate() {
        let u = coin_at(n)?;
        // site n moves to n+1 (index k+2) for +, to n-1 (index k) for −
        plus[k + 2] = u[0][0] * p + u[0][1] * m;
        minus[k] = u[1][0] * p + u[1][1] * m;
    }
    Ok(SpinorField::from_parts_unchecked(t + 1, plus, minus, state.parity_localized()))
}

/// Advances one step with the same coin at every site.
pub fn step_homogeneous(state: &SpinorField, c: CoinAngles) -> SpinorField {
    let u = coin_matrix(c);
    step_with(state, |_| Ok(u)).expect("constant coin is total")
}

/// Advances one step reading the coin at each source site `(n, t)`.
pub fn step_inhomogeneous(state: &SpinorField, field: &CoinField) -> Result<SpinorField> {
    let t = state.t() as i64;
    step_with(state, |n| field.angles_at(n, t).map(coin_matrix))
}

/// Applies `steps` inhomogeneous steps to an arbitrary starting field.
pub fn evolve_state(state: &SpinorField, field: &CoinField, steps: usize) -> Result<SpinorField> {
    let mut current = state.clone();
    for _ in 0..steps {
        current = step_inhomogeneous(&current, field)?;
    }
    Ok(current)
}

/// Final state of a walk, with observables at every time step when requested.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub final_state: SpinorField,
    pub trajectory: Option<Vec<ObservableRecord>>,
}

/// Evolves the localized state `init` for `t_final` steps.
///
/// With `record_trajectory`, the returned records cover `t = 0..=t_final`
/// with positions in lattice units.
pub fn evolve(
    init: InitialState,
    field: &CoinField,
    t_final: usize,
    record_trajectory: bool,
) -> Result<Evolution> {
    let mut state = localized_state(init);
    let mut trajectory = record_trajectory.then(|| Vec::with_capacity(t_final + 1));
    if let Some(records) = trajectory.as_mut() {
        records.push(ObservableRecord::from_state(&state, 1.0));
    }
    for next in Walker::new(state.clone(), field).take(t_final) {
        state = next?;
        if let Some(records) = trajectory.as_mut() {
            records.push(ObservableRecord::from_state(&state, 1.0));
        }
    }
    Ok(Evolution { final_state: state, trajectory })
}

/// Iterator over the successive states of a walk (the starting state itself
/// is not yielded).
#[derive(Debug)]
pub struct Walker<'a> {
    current: Option<SpinorField>,
    field: &'a CoinField,
}

impl<'a> Walker<'a> {
    pub fn new(start: SpinorField, field: &'a CoinField) -> Self {
        Self { current: Some(start), field }
    }
}

impl Iterator for Walker<'_> {
    type Item = Result<SpinorField>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.current.take()?;
        match step_inhomogeneous(&current, self.field) {
            Ok(next) => {
                self.current = Some(next.clone());
                Some(Ok(next))
            }
            // stop after reporting the first failure
            Err(e) => Some(Err(e)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::field::{LatticeTable, Window};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, TAU};

    fn plus_state() -> SpinorField {
        localized_state(InitialState::new(0.0, 0.0))
    }

    #[test]
    fn first_step_splits_plus_state() {
        let theta = 0.37;
        let s = step_homogeneous(&plus_state(), CoinAngles::rotation(theta));
        assert_eq!(s.t(), 1);
        assert_eq!(s.psi_plus(1), Complex64::new(theta.cos(), 0.0));
        assert_eq!(s.psi_minus(-1), Complex64::new(theta.sin(), 0.0));
        for n in s.sites() {
            if n != 1 {
                assert_eq!(s.psi_plus(n).norm(), 0.0);
            }
            if n != -1 {
                assert_eq!(s.psi_minus(n).norm(), 0.0);
            }
        }
    }

    #[test]
    fn identity_rotation_moves_right() {
        let mut s = plus_state();
        for _ in 0..7 {
            s = step_homogeneous(&s, CoinAngles::rotation(0.0));
        }
        assert_eq!(s.psi_plus(7), Complex64::new(1.0, 0.0));
        let rest: f64 = s.norm_sqr() - 1.0;
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn two_steps_match_hand_multiplication() {
        // θ = π/3: ψ+(1,1) = c, ψ−(−1,1) = s, then
        // ψ+(2,2) = c², ψ+(0,2) = s², ψ−(0,2) = s c, ψ−(−2,2) = −s c.
        let (s, c) = FRAC_PI_3.sin_cos();
        let mut state = plus_state();
        for _ in 0..2 {
            state = step_homogeneous(&state, CoinAngles::rotation(FRAC_PI_3));
        }
        let expected_plus = [0.0, 0.0, s * s, 0.0, c * c];
        let expected_minus = [-s * c, 0.0, s * c, 0.0, 0.0];
        for (k, n) in state.sites().enumerate() {
            assert!((state.psi_plus(n) - expected_plus[k]).norm() < 1e-15, "plus at {n}");
            assert!((state.psi_minus(n) - expected_minus[k]).norm() < 1e-15, "minus at {n}");
        }
        assert!((state.psi_plus(0).re - 0.75).abs() < 1e-15);
    }

    #[test]
    fn constant_field_is_bitwise_homogeneous() {
        let c = CoinAngles::new(0.9, 0.4, -1.3, 2.2);
        let field = CoinField::from(c);
        let mut a = localized_state(InitialState::new(0.6, 1.1));
        let mut b = a.clone();
        for _ in 0..30 {
            a = step_homogeneous(&a, c);
            b = step_inhomogeneous(&b, &field).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn missing_coin_entry_is_reported() {
        let window = Window::light_cone(2);
        let table = || LatticeTable::from_fn(window, |_, _| 0.5);
        let field = CoinField::tabulated(table(), table(), table(), table());
        let err = evolve(InitialState::new(0.2, 0.0), &field, 5, false).unwrap_err();
        assert!(matches!(err, Error::Totality { t: 3, .. }), "{err}");
    }

    #[test]
    fn zero_steps_returns_initial_state() {
        let init = InitialState::new(0.4, -0.8);
        let run = evolve(init, &CoinAngles::hadamard().into(), 0, true).unwrap();
        assert_eq!(run.final_state, localized_state(init));
        assert_eq!(run.trajectory.unwrap().len(), 1);
    }

    #[test]
    fn random_coins_preserve_norm_over_long_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let steps = 1000usize;
        let window = Window::light_cone(steps);
        let mut table = || LatticeTable::from_fn(window, |_, _| rng.gen_range(-TAU..TAU));
        let field = CoinField::tabulated(table(), table(), table(), table());
        let out = evolve(InitialState::new(0.3, 0.2), &field, steps, false).unwrap();
        assert!((out.final_state.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn linearity_over_chirality_superposition() {
        let field = CoinField::formula(|n, t| CoinAngles::new(0.3 + 0.01 * n as f64, 0.2 * t as f64, -0.1, 0.05 * n as f64));
        let a = localized_state(InitialState::new(0.0, 0.0));
        let b = localized_state(InitialState::new(FRAC_PI_4 * 2.0, 0.0));
        let (wa, wb) = (Complex64::new(0.6, 0.1), Complex64::new(-0.2, 0.75));
        let mixed = SpinorField::new(0, vec![wa * a.psi_plus(0) + wb * b.psi_plus(0)], vec![wa * a.psi_minus(0) + wb * b.psi_minus(0)], true).unwrap();
        let ea = evolve_state(&a, &field, 40).unwrap();
        let eb = evolve_state(&b, &field, 40).unwrap();
        let em = evolve_state(&mixed, &field, 40).unwrap();
        for n in em.sites() {
            assert!((em.psi_plus(n) - (wa * ea.psi_plus(n) + wb * eb.psi_plus(n))).norm() <= 1e-13);
            assert!((em.psi_minus(n) - (wa * ea.psi_minus(n) + wb * eb.psi_minus(n))).norm() <= 1e-13);
        }
    }
}
