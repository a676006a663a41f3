//! Spinor wave functions on the one-dimensional lattice.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// One complex component `ψ±(n, t)`.
pub type Amplitude = Complex64;

const ZERO: Amplitude = Complex64::new(0.0, 0.0);

/// Chirality alignment of a walker that starts localized at the origin:
/// `(cos η |+⟩ + e^{iγ} sin η |−⟩) ⊗ |0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct InitialState {
    pub eta: f64,
    pub gamma: f64,
}

impl InitialState {
    pub fn new(eta: f64, gamma: f64) -> Self {
        Self { eta, gamma }
    }

    pub fn plus_amplitude(&self) -> Amplitude {
        Complex64::new(self.eta.cos(), 0.0)
    }

    pub fn minus_amplitude(&self) -> Amplitude {
        Complex64::from_polar(self.eta.sin(), self.gamma)
    }
}

/// Both spinor components over the window `[-t, t]` at time step `t`.
///
/// Sites outside the window are implicitly zero. Sites with `n + t` odd are
/// stored as explicit zeros for walks started at a single site.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    t: usize,
    plus: Vec<Amplitude>,
    minus: Vec<Amplitude>,
    parity_localized: bool,
}

/// Builds the single-site initial state at `t = 0`.
pub fn localized_state(init: InitialState) -> SpinorField {
    SpinorField {
        t: 0,
        plus: vec![init.plus_amplitude()],
        minus: vec![init.minus_amplitude()],
        parity_localized: true,
    }
}

impl SpinorField {
    /// Assembles a field from raw components indexed from `n = -t`.
    pub fn new(
        t: usize,
        plus: Vec<Amplitude>,
        minus: Vec<Amplitude>,
        parity_localized: bool,
    ) -> Result<Self> {
        let len = 2 * t + 1;
        if plus.len() != len || minus.len() != len {
            return Err(Error::Domain(format!(
                "spinor at t={t} needs {len} sites, got {} and {}",
                plus.len(),
                minus.len()
            )));
        }
        if let Some(k) = plus.iter().chain(&minus).position(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::Domain(format!("non-finite amplitude at storage index {k}")));
        }
        Ok(Self { t, plus, minus, parity_localized })
    }

    pub(crate) fn from_parts_unchecked(
        t: usize,
        plus: Vec<Amplitude>,
        minus: Vec<Amplitude>,
        parity_localized: bool,
    ) -> Self {
        debug_assert_eq!(plus.len(), 2 * t + 1);
        debug_assert_eq!(minus.len(), 2 * t + 1);
        Self { t, plus, minus, parity_localized }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn n_min(&self) -> i64 {
        -(self.t as i64)
    }

    pub fn n_max(&self) -> i64 {
        self.t as i64
    }

    pub fn parity_localized(&self) -> bool {
        self.parity_localized
    }

    /// Site coordinates in storage order.
    pub fn sites(&self) -> impl Iterator<Item = i64> + Clone {
        self.n_min()..=self.n_max()
    }

    pub fn plus(&self) -> &[Amplitude] {
        &self.plus
    }

    pub fn minus(&self) -> &[Amplitude] {
        &self.minus
    }

    fn index(&self, n: i64) -> Option<usize> {
        let k = n + self.t as i64;
        (0..self.plus.len() as i64).contains(&k).then_some(k as usize)
    }

    pub fn psi_plus(&self, n: i64) -> Amplitude {
        self.index(n).map_or(ZERO, |k| self.plus[k])
    }

    pub fn psi_minus(&self, n: i64) -> Amplitude {
        self.index(n).map_or(ZERO, |k| self.minus[k])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus.iter().chain(&self.minus).map(|a| a.norm_sqr()).sum()
    }

    /// Writes `n,re_plus,im_plus,re_minus,im_minus`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "re_plus", "im_plus", "re_minus", "im_minus"])?;
        for (n, (p, m)) in self.sites().zip(self.plus.iter().zip(&self.minus)) {
            w.write_record([
                n.to_string(),
                fmt_real(p.re),
                fmt_real(p.im),
                fmt_real(m.re),
                fmt_real(m.im),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`SpinorField::write_csv`]. Rows must
    /// cover `-t..=t` contiguously in increasing order.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ["n", "re_plus", "im_plus", "re_minus", "im_minus"] {
            return Err(Error::Parse(format!("unexpected spinor header {header:?}")));
        }
        let mut sites = Vec::new();
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for record in r.records() {
            let record = record?;
            let n: i64 = parse_field(&record, 0)?;
            let vals: Vec<f64> = (1..5).map(|i| parse_field(&record, i)).collect::<Result<_>>()?;
            sites.push(n);
            plus.push(Complex64::new(vals[0], vals[1]));
            minus.push(Complex64::new(vals[2], vals[3]));
        }
        if sites.len() % 2 == 0 {
            return Err(Error::Parse(format!("{} rows cannot form a window [-t, t]", sites.len())));
        }
        let t = sites.len() / 2;
        if sites.iter().copied().ne(-(t as i64)..=t as i64) {
            return Err(Error::Parse(format!("rows do not enumerate sites -{t}..={t}")));
        }
        let parity_localized = (0..sites.len())
            .filter(|k| k % 2 == 1)
            .all(|k| plus[k] == ZERO && minus[k] == ZERO);
        Self::new(t, plus, minus, parity_localized)
    }
}

pub(crate) fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn parse_field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize) -> Result<T> {
    let raw = record
        .get(i)
        .ok_or_else(|| Error::Parse(format!("missing column {i} in {record:?}")))?;
    raw.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("cannot parse {raw:?} in column {i}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn pure_plus_and_minus_states() {
        let s = localized_state(InitialState::new(0.0, 0.0));
        assert_eq!(s.psi_plus(0), Complex64::new(1.0, 0.0));
        assert_eq!(s.psi_minus(0), ZERO);

        let s = localized_state(InitialState::new(FRAC_PI_2, 0.0));
        assert!(s.psi_plus(0).norm() < 1e-16);
        assert!((s.psi_minus(0) - Complex64::new(1.0, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn balanced_state_with_imaginary_minus() {
        let s = localized_state(InitialState::new(FRAC_PI_4, FRAC_PI_2));
        assert!((s.psi_plus(0) - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-16);
        assert!((s.psi_minus(0) - Complex64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert_eq!(s.t(), 0);
        assert!(s.parity_localized());
    }

    #[test]
    fn outside_window_reads_zero() {
        let s = localized_state(InitialState::new(0.3, 0.1));
        assert_eq!(s.psi_plus(1), ZERO);
        assert_eq!(s.psi_minus(-7), ZERO);
    }

    #[test]
    fn new_checks_lengths_and_finiteness() {
        assert!(SpinorField::new(1, vec![ZERO; 3], vec![ZERO; 2], false).is_err());
        let mut bad = vec![ZERO; 3];
        bad[1].re = f64::INFINITY;
        assert!(SpinorField::new(1, bad, vec![ZERO; 3], false).is_err());
    }

    #[test]
    fn csv_format_is_fixed_precision() {
        let s = localized_state(InitialState::new(FRAC_PI_4, 0.0));
        let mut out = Vec::new();
        s.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,re_plus,im_plus,re_minus,im_minus"));
        assert_eq!(
            lines.next(),
            Some("0,7.0710678118654757e-1,0.0000000000000000e0,7.0710678118654746e-1,0.0000000000000000e0")
        );
    }

    #[test]
    fn csv_rejects_gaps() {
        let text = "n,re_plus,im_plus,re_minus,im_minus\n-1,0,0,0,0\n1,1,0,0,0\n0,0,0,0,0\n";
        assert!(SpinorField::read_csv(text.as_bytes()).is_err());
    }
}
