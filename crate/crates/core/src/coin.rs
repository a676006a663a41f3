//! Coin operators, their site/time-dependent generalization, and the phase
//! fields consumed by the invariance transformations.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{LatticeTable, ScalarField, Window};
use crate::lattice::{fmt_real, parse_field, Amplitude};

/// Rotation angle `theta` and phases `alpha`, `beta`, `chi` of a coin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoinAngles {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub chi: f64,
}

impl CoinAngles {
    pub fn new(theta: f64, alpha: f64, beta: f64, chi: f64) -> Self {
        Self { theta, alpha, beta, chi }
    }

    /// Real rotation with all phases zero.
    pub fn rotation(theta: f64) -> Self {
        Self::new(theta, 0.0, 0.0, 0.0)
    }

    pub fn hadamard() -> Self {
        Self::rotation(std::f64::consts::FRAC_PI_4)
    }
}

/// Materializes the 2×2 unitary
/// `e^{iχ} [[e^{iα} cos θ, e^{−iβ} sin θ], [e^{iβ} sin θ, −e^{−iα} cos θ]]`
/// in the `(|+⟩, |−⟩)` basis, row index = output chirality.
pub fn coin_matrix(c: CoinAngles) -> [[Amplitude; 2]; 2] {
    let (s, co) = c.theta.sin_cos();
    let global = Complex64::from_polar(1.0, c.chi);
    [
        [global * Complex64::from_polar(co, c.alpha), global * Complex64::from_polar(s, -c.beta)],
        [global * Complex64::from_polar(s, c.beta), -global * Complex64::from_polar(co, -c.alpha)],
    ]
}

/// Unit vector with polar angle `theta` and azimuth `beta_t`. Its scalar
/// product with the Pauli vector is the phase-free coin
/// `coin_matrix(θ, 0, β_t, 0)`.
pub fn bloch_vector(beta_t: f64, theta: f64) -> (f64, f64, f64) {
    let (s, c) = theta.sin_cos();
    let (sb, cb) = beta_t.sin_cos();
    (s * cb, s * sb, c)
}

/// Where a [`CoinField`]'s values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoinDescriptor {
    Homogeneous,
    Tabulated,
    Formula,
}

/// Coin parameters as functions of site and time step.
#[derive(Debug, Clone)]
pub struct CoinField {
    pub theta: ScalarField,
    pub alpha: ScalarField,
    pub beta: ScalarField,
    pub chi: ScalarField,
    pub descriptor: CoinDescriptor,
}

impl From<CoinAngles> for CoinField {
    fn from(c: CoinAngles) -> Self {
        Self::homogeneous(c)
    }
}

impl CoinField {
    pub fn homogeneous(c: CoinAngles) -> Self {
        Self {
            theta: c.theta.into(),
            alpha: c.alpha.into(),
            beta: c.beta.into(),
            chi: c.chi.into(),
            descriptor: CoinDescriptor::Homogeneous,
        }
    }

    /// Wraps a closure producing all four angles at once.
    pub fn formula(f: impl Fn(i64, i64) -> CoinAngles + Send + Sync + 'static) -> Self {
        let f = Arc::new(f);
        let component = |pick: fn(CoinAngles) -> f64| {
            let f = Arc::clone(&f);
            ScalarField::formula(move |n, t| pick(f(n, t)))
        };
        Self {
            theta: component(|c| c.theta),
            alpha: component(|c| c.alpha),
            beta: component(|c| c.beta),
            chi: component(|c| c.chi),
            descriptor: CoinDescriptor::Formula,
        }
    }

    pub fn tabulated(theta: LatticeTable, alpha: LatticeTable, beta: LatticeTable, chi: LatticeTable) -> Self {
        Self {
            theta: ScalarField::table(theta),
            alpha: ScalarField::table(alpha),
            beta: ScalarField::table(beta),
            chi: ScalarField::table(chi),
            descriptor: CoinDescriptor::Tabulated,
        }
    }

    pub fn angles_at(&self, n: i64, t: i64) -> Result<CoinAngles> {
        Ok(CoinAngles {
            theta: self.theta.require("theta", n, t)?,
            alpha: self.alpha.require("alpha", n, t)?,
            beta: self.beta.require("beta", n, t)?,
            chi: self.chi.require("chi", n, t)?,
        })
    }

    /// The constant angles, if every component is a constant.
    pub fn as_homogeneous(&self) -> Option<CoinAngles> {
        match (&self.theta, &self.alpha, &self.beta, &self.chi) {
            (
                ScalarField::Constant(theta),
                ScalarField::Constant(alpha),
                ScalarField::Constant(beta),
                ScalarField::Constant(chi),
            ) => Some(CoinAngles::new(*theta, *alpha, *beta, *chi)),
            _ => None,
        }
    }

    /// Evaluates every component over `window` into dense tables.
    pub fn tabulate(&self, window: Window) -> Result<Self> {
        Ok(Self::tabulated(
            self.theta.tabulate("theta", window)?,
            self.alpha.tabulate("alpha", window)?,
            self.beta.tabulate("beta", window)?,
            self.chi.tabulate("chi", window)?,
        ))
    }

    /// Loads `n,t,theta,alpha,beta,chi` rows. Every `(n, t)` of `window` must
    /// be present.
    pub fn read_csv<R: Read>(reader: R, window: Window) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        expect_header(&mut r, &["n", "t", "theta", "alpha", "beta", "chi"])?;
        let mut cols: [Vec<(i64, i64, f64)>; 4] = Default::default();
        for record in r.records() {
            let record = record?;
            let n = parse_field(&record, 0)?;
            let t = parse_field(&record, 1)?;
            if !window.contains(n, t) {
                continue;
            }
            for (k, col) in cols.iter_mut().enumerate() {
                col.push((n, t, parse_real(&record, k + 2)?));
            }
        }
        let [theta, alpha, beta, chi] = cols;
        Ok(Self::tabulated(
            LatticeTable::from_entries(window, "theta", theta)?,
            LatticeTable::from_entries(window, "alpha", alpha)?,
            LatticeTable::from_entries(window, "beta", beta)?,
            LatticeTable::from_entries(window, "chi", chi)?,
        ))
    }

    pub fn write_csv<W: Write>(&self, writer: W, window: Window) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "t", "theta", "alpha", "beta", "chi"])?;
        for (n, t) in window.iter() {
            let c = self.angles_at(n, t)?;
            w.write_record([
                n.to_string(),
                t.to_string(),
                fmt_real(c.theta),
                fmt_real(c.alpha),
                fmt_real(c.beta),
                fmt_real(c.chi),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The real phase sets `xi(n, t)` and `zeta(n, t)` multiplying the `+` and
/// `−` components of a transformed walk.
#[derive(Debug, Clone)]
pub struct PhaseField {
    pub xi: ScalarField,
    pub zeta: ScalarField,
}

impl PhaseField {
    pub fn new(xi: impl Into<ScalarField>, zeta: impl Into<ScalarField>) -> Self {
        Self { xi: xi.into(), zeta: zeta.into() }
    }

    /// A field with `zeta` identical to `xi`.
    pub fn equal(xi: impl Into<ScalarField>) -> Self {
        let xi = xi.into();
        Self { zeta: xi.clone(), xi }
    }

    pub fn formula(
        xi: impl Fn(i64, i64) -> f64 + Send + Sync + 'static,
        zeta: impl Fn(i64, i64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(ScalarField::formula(xi), ScalarField::formula(zeta))
    }

    pub fn xi_at(&self, n: i64, t: i64) -> Result<f64> {
        self.xi.require("xi", n, t)
    }

    pub fn zeta_at(&self, n: i64, t: i64) -> Result<f64> {
        self.zeta.require("zeta", n, t)
    }

    /// Dense copy over `window`; fails on missing or non-finite values.
    pub fn tabulate(&self, window: Window) -> Result<Self> {
        Ok(Self::new(
            ScalarField::table(self.xi.tabulate("xi", window)?),
            ScalarField::table(self.zeta.tabulate("zeta", window)?),
        ))
    }

    /// Loads `n,t,xi,zeta` rows covering `window`.
    pub fn read_csv<R: Read>(reader: R, window: Window) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        expect_header(&mut r, &["n", "t", "xi", "zeta"])?;
        let mut xi = Vec::new();
        let mut zeta = Vec::new();
        for record in r.records() {
            let record = record?;
            let n = parse_field(&record, 0)?;
            let t = parse_field(&record, 1)?;
            if window.contains(n, t) {
                xi.push((n, t, parse_real(&record, 2)?));
                zeta.push((n, t, parse_real(&record, 3)?));
            }
        }
        Ok(Self::new(
            ScalarField::table(LatticeTable::from_entries(window, "xi", xi)?),
            ScalarField::table(LatticeTable::from_entries(window, "zeta", zeta)?),
        ))
    }
}

fn expect_header<R: Read>(r: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = r.headers()?;
    if header.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Parse(format!("expected header {}, found {header:?}", expected.join(","))));
    }
    Ok(())
}

fn parse_real(record: &csv::StringRecord, i: usize) -> Result<f64> {
    let v: f64 = parse_field(record, i)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(format!("non-finite value in column {i} of {record:?}")))
    }
}
