//! Exponent algebra for the summability indices `p <= q <= s` and the
//! conjugate index `r` defined by `1/r = 1/q - 1/s`.

use crate::{Error, Result};

/// The exponent triple `(p, q, s)` together with the derived conjugate `r`.
///
/// `r` is stored as `f64::INFINITY` when `q == s`; the pair `u = r/q`,
/// `v = s/q` then satisfies `1/u + 1/v = 1` and drives the splitting-sequence
/// construction in [`crate::mixed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentParams {
    p: f64,
    q: f64,
    s: f64,
    r: f64,
}

impl ExponentParams {
    /// Full triple. Requires `0 < p <= q <= s < infinity`.
    pub fn new(p: f64, q: f64, s: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::Parameter(format!("p must be positive and finite, got {p}")));
        }
        if p > q + 1e-15 {
            return Err(Error::Parameter(format!("p must not exceed q, got p={p}, q={q}")));
        }
        Self::check_qs(q, s)?;
        Ok(Self { p, q, s, r: conjugate(q, s) })
    }

    /// The `(q, s)` pair alone, with `p` defaulting to `q` (the only case in
    /// which the two-measure domination route is available).
    pub fn qs(q: f64, s: f64) -> Result<Self> {
        Self::check_qs(q, s)?;
        Ok(Self { p: q, q, s, r: conjugate(q, s) })
    }

    fn check_qs(q: f64, s: f64) -> Result<()> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::Parameter(format!("q must be positive and finite, got {q}")));
        }
        if !s.is_finite() {
            return Err(Error::Parameter("s = infinity is not supported".into()));
        }
        if s < q {
            return Err(Error::Parameter(format!("need q <= s, got q={q}, s={s}")));
        }
        Ok(())
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Conjugate index; `f64::INFINITY` exactly when `q == s`.
    pub fn r(&self) -> f64 {
        self.r
    }

    /// `u = r/q`, infinite when `q == s`.
    pub fn u(&self) -> f64 {
        if self.r.is_infinite() {
            f64::INFINITY
        } else {
            self.r / self.q
        }
    }

    /// `v = s/q >= 1`.
    pub fn v(&self) -> f64 {
        self.s / self.q
    }

    pub fn is_diagonal(&self) -> bool {
        self.r.is_infinite()
    }

    /// Requires strict `q < s` (finite conjugate index).
    pub fn require_strict(&self) -> Result<()> {
        if self.is_diagonal() {
            return Err(Error::Parameter(format!(
                "operation needs q < s, got q = s = {}",
                self.q
            )));
        }
        Ok(())
    }
}

fn conjugate(q: f64, s: f64) -> f64 {
    if q == s {
        f64::INFINITY
    } else {
        1.0 / (1.0 / q - 1.0 / s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_of_one_two_is_two() {
        let e = ExponentParams::qs(1.0, 2.0).unwrap();
        assert!((e.r() - 2.0).abs() < 1e-15);
        assert!((e.u() - 2.0).abs() < 1e-15);
        assert!((e.v() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_has_infinite_conjugate() {
        let e = ExponentParams::qs(2.0, 2.0).unwrap();
        assert!(e.r().is_infinite());
        assert!(e.is_diagonal());
        assert!(e.require_strict().is_err());
    }

    #[test]
    fn harmonic_identity_holds() {
        for (q, s) in [(0.5, 3.0), (1.0, 4.0), (1.5, 2.0)] {
            let e = ExponentParams::qs(q, s).unwrap();
            assert!((1.0 / e.r() + 1.0 / s - 1.0 / q).abs() < 1e-15);
            // 1/u + 1/v = 1
            assert!((1.0 / e.u() + 1.0 / e.v() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_orderings() {
        assert!(ExponentParams::qs(2.0, 1.0).is_err());
        assert!(ExponentParams::qs(0.0, 1.0).is_err());
        assert!(ExponentParams::qs(1.0, f64::INFINITY).is_err());
        assert!(ExponentParams::new(2.0, 1.0, 3.0).is_err());
    }
}
