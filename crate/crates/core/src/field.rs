//! Real-valued mappings over lattice sites and time steps.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Inclusive rectangle of lattice coordinates `n_min..=n_max`, `t_min..=t_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub n_min: i64,
    pub n_max: i64,
    pub t_min: i64,
    pub t_max: i64,
}

impl Window {
    pub fn new(n_min: i64, n_max: i64, t_min: i64, t_max: i64) -> Result<Self> {
        if n_min > n_max || t_min > t_max {
            return Err(Error::Domain(format!(
                "empty window n={n_min}..={n_max}, t={t_min}..={t_max}"
            )));
        }
        Ok(Self { n_min, n_max, t_min, t_max })
    }

    /// Every site a walk started at the origin can reach in `steps` steps,
    /// for all times `0..=steps`.
    pub fn light_cone(steps: usize) -> Self {
        let s = steps as i64;
        Self { n_min: -s, n_max: s, t_min: 0, t_max: s }
    }

    /// Grows the window by `dn` sites on each side and `dt` steps at the end.
    pub fn expand(&self, dn: i64, dt: i64) -> Self {
        Self {
            n_min: self.n_min - dn,
            n_max: self.n_max + dn,
            t_min: self.t_min,
            t_max: self.t_max + dt,
        }
    }

    pub fn contains(&self, n: i64, t: i64) -> bool {
        (self.n_min..=self.n_max).contains(&n) && (self.t_min..=self.t_max).contains(&t)
    }

    pub fn width(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.t_max - self.t_min + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major (time-major) iteration over all coordinates.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (self.t_min..=self.t_max).flat_map(move |t| (self.n_min..=self.n_max).map(move |n| (n, t)))
    }

    fn offset(&self, n: i64, t: i64) -> Option<usize> {
        self.contains(n, t).then(|| {
            ((t - self.t_min) as usize) * self.width() + (n - self.n_min) as usize
        })
    }
}

/// Dense table of values over a [`Window`].
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeTable {
    window: Window,
    values: Vec<f64>,
}

impl LatticeTable {
    pub fn from_fn(window: Window, mut f: impl FnMut(i64, i64) -> f64) -> Self {
        let values = window.iter().map(|(n, t)| f(n, t)).collect();
        Self { window, values }
    }

    pub fn try_from_fn(
        window: Window,
        mut f: impl FnMut(i64, i64) -> Result<f64>,
    ) -> Result<Self> {
        let values = window.iter().map(|(n, t)| f(n, t)).collect::<Result<_>>()?;
        Ok(Self { window, values })
    }

    /// Builds a table from sparse `(n, t, value)` entries. Every coordinate of
    /// `window` must be supplied; entries outside the window are rejected.
    pub fn from_entries(
        window: Window,
        field: &'static str,
        entries: impl IntoIterator<Item = (i64, i64, f64)>,
    ) -> Result<Self> {
        let mut slots: Vec<Option<f64>> = vec![None; window.len()];
        for (n, t, v) in entries {
            let idx = window.offset(n, t).ok_or_else(|| {
                Error::Domain(format!("{field} entry (n={n}, t={t}) lies outside {window:?}"))
            })?;
            slots[idx] = Some(v);
        }
        let values = window
            .iter()
            .zip(slots)
            .map(|((n, t), v)| v.ok_or(Error::Totality { field, n, t }))
            .collect::<Result<_>>()?;
        Ok(Self { window, values })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn get(&self, n: i64, t: i64) -> Option<f64> {
        self.window.offset(n, t).map(|i| self.values[i])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// A mapping `(n, t) -> real`: constant, tabulated, or given by a formula.
///
/// Formulas must be pure: the same coordinates always yield the same value.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    Table(Arc<LatticeTable>),
    Formula(Arc<dyn Fn(i64, i64) -> f64 + Send + Sync>),
}

impl ScalarField {
    pub fn formula(f: impl Fn(i64, i64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Formula(Arc::new(f))
    }

    pub fn table(table: LatticeTable) -> Self {
        Self::Table(Arc::new(table))
    }

    pub fn value(&self, n: i64, t: i64) -> Option<f64> {
        match self {
            Self::Constant(v) => Some(*v),
            Self::Table(table) => table.get(n, t),
            Self::Formula(f) => Some(f(n, t)),
        }
    }

    /// Like [`ScalarField::value`] but reports a missing entry as a totality error.
    pub fn require(&self, field: &'static str, n: i64, t: i64) -> Result<f64> {
        self.value(n, t).ok_or(Error::Totality { field, n, t })
    }

    /// Evaluates the mapping over `window`, failing at the first missing or
    /// non-finite entry.
    pub fn tabulate(&self, field: &'static str, window: Window) -> Result<LatticeTable> {
        LatticeTable::try_from_fn(window, |n, t| {
            let v = self.require(field, n, t)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Domain(format!("{field} is not finite at (n={n}, t={t})")))
            }
        })
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Self::Table(table) => f.debug_tuple("Table").field(&table.window()).finish(),
            Self::Formula(_) => f.write_str("Formula(..)"),
        }
    }
}

impl From<f64> for ScalarField {
    fn from(v: f64) -> Self {
        Self::Constant(v)
    }
}
