//! Truncated series in Novikov variables Q and the loop variable z.
//!
//! A `TruncSeries` knows every coefficient with total Novikov degree `|d| ≤ dmax`
//! and `zmin ≤ n ≤ zmax`. There are no terms below `zmin`; terms above `zmax`
//! were discarded. Products therefore lose precision at the top of the z-window.


use std::collections::BTreeMap;

use super::{Rational, Scalar};
use crate::Error;

pub type Degree = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries {
    rank: usize,
    dmax: u32,
    zmin: i32,
    zmax: i32,
    coeffs: BTreeMap<(Degree, i32), Scalar>,
}

fn total(d: &[u32]) -> u32 {
    d.iter().sum()
}

fn add_deg(a: &[u32], b: &[u32]) -> Degree {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

impl TruncSeries {
    pub fn new(rank: usize, dmax: u32, zmin: i32, zmax: i32) -> Self {
        assert!(zmin <= zmax, "empty z-window");
        TruncSeries { rank, dmax, zmin, zmax, coeffs: BTreeMap::new() }
    }

    /// A z-free rank-1 Novikov series with cutoff `dmax`.
    pub fn novikov(dmax: u32) -> Self {
        Self::new(1, dmax, 0, 0)
    }

    /// Rank-1, z-free series from coefficients of Q^0, Q^1, ….
    pub fn from_q_coeffs(dmax: u32, cs: &[Scalar]) -> Self {
        let mut s = Self::novikov(dmax);
        for (d, c) in cs.iter().enumerate().take(dmax as usize + 1) {
            s.insert_truncating(vec![d as u32], 0, c.clone());
        }
        s
    }

    pub fn constant_like(&self, c: Scalar) -> Self {
        let mut s = Self::new(self.rank, self.dmax, self.zmin.min(0), self.zmax);
        if self.zmax >= 0 {
            s.insert_truncating(vec![0; self.rank], 0, c);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dmax(&self) -> u32 {
        self.dmax
    }

    pub fn zmin(&self) -> i32 {
        self.zmin
    }

    pub fn zmax(&self) -> i32 {
        self.zmax
    }

    pub fn in_bounds(&self, d: &[u32], n: i32) -> bool {
        d.len() == self.rank && total(d) <= self.dmax && n >= self.zmin && n <= self.zmax
    }

    pub fn insert(&mut self, d: Degree, n: i32, c: Scalar) -> Result<(), Error> {
        if !self.in_bounds(&d, n) {
            return Err(Error::IndexOutOfRange(format!(
                "coefficient (d={d:?}, z^{n}) outside truncation (D={}, z∈[{},{}])",
                self.dmax, self.zmin, self.zmax
            )));
        }
        self.insert_truncating(d, n, c);
        Ok(())
    }

    /// Adds `c` to the coefficient, silently dropping indices outside the window.
    pub fn insert_truncating(&mut self, d: Degree, n: i32, c: Scalar) {
        if c.is_zero() || !self.in_bounds(&d, n) {
            return;
        }
        match self.coeffs.get_mut(&(d.clone(), n)) {
            Some(e) => {
                *e += &c;
                if e.is_zero() {
                    self.coeffs.remove(&(d, n));
                }
            }
            None => {
                self.coeffs.insert((d, n), c);
            }
        }
    }

    pub fn get(&self, d: &[u32], n: i32) -> Scalar {
        self.coeffs.get(&(d.to_vec(), n)).cloned().unwrap_or_default()
    }

    /// Rank-1 shortcut for the coefficient of Q^d z^0.
    pub fn q(&self, d: u32) -> Scalar {
        self.get(&[d], 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Degree, i32, &Scalar)> {
        self.coeffs.iter().map(|((d, n), c)| (d, *n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn map(&self, f: impl Fn(&Degree, i32, &Scalar) -> Scalar) -> Self {
        let mut out = Self::new(self.rank, self.dmax, self.zmin, self.zmax);
        for ((d, n), c) in &self.coeffs {
            out.insert_truncating(d.clone(), *n, f(d, *n, c));
        }
        out
    }

    pub fn try_map(&self, f: impl Fn(&Degree, i32, &Scalar) -> Result<Scalar, Error>) -> Result<Self, Error> {
        let mut out = Self::new(self.rank, self.dmax, self.zmin, self.zmax);
        for ((d, n), c) in &self.coeffs {
            out.insert_truncating(d.clone(), *n, f(d, *n, c)?);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.map(|_, _, a| a * c)
    }

    pub fn neg(&self) -> Self {
        self.map(|_, _, a| -a)
    }

    fn check_rank(&self, o: &Self) {
        assert_eq!(self.rank, o.rank, "Novikov rank mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_rank(o);
        let mut out = Self::new(
            self.rank,
            self.dmax.min(o.dmax),
            self.zmin.min(o.zmin),
            self.zmax.min(o.zmax),
        );
        for ((d, n), c) in self.coeffs.iter().chain(o.coeffs.iter()) {
            out.insert_truncating(d.clone(), *n, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check_rank(o);
        let zmin = self.zmin + o.zmin;
        let zmax = (self.zmax + o.zmin).min(o.zmax + self.zmin);
        let mut out = Self::new(self.rank, self.dmax.min(o.dmax), zmin, zmax.max(zmin));
        if zmax < zmin {
            return out;
        }
        for ((d1, n1), c1) in &self.coeffs {
            for ((d2, n2), c2) in &o.coeffs {
                let n = n1 + n2;
                if n > zmax || total(d1) + total(d2) > out.dmax {
                    continue;
                }
                out.insert_truncating(add_deg(d1, d2), n, c1 * c2);
            }
        }
        out
    }

    fn unit_split(&self) -> Result<(Scalar, Self), Error> {
        if self.coeffs.keys().any(|(_, n)| *n < 0) {
            return Err(Error::NonUnitConstantTerm("series has negative z-powers".into()));
        }
        let zero = vec![0; self.rank];
        let c = self.get(&zero, 0);
        let cinv = c
            .inv()
            .ok_or_else(|| Error::NonUnitConstantTerm(format!("constant coefficient {c} is not invertible")))?;
        let mut u = Self::new(self.rank, self.dmax, 0, self.zmax.max(0));
        for ((d, n), a) in &self.coeffs {
            if !(total(d) == 0 && *n == 0) {
                u.insert_truncating(d.clone(), *n, a * &cinv);
            }
        }
        Ok((cinv, u))
    }

    /// Multiplicative inverse up to the declared truncation.
    pub fn invert(&self) -> Result<Self, Error> {
        if self.zmin > 0 || self.zmax < 0 {
            return Err(Error::NonUnitConstantTerm("no z^0 coefficient in window".into()));
        }
        let (cinv, u) = self.unit_split()?;
        let minus_u = u.neg();
        let mut acc = u.constant_like(Scalar::one());
        let mut term = acc.clone();
        loop {
            term = term.mul(&minus_u);
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc.scale(&cinv))
    }

    /// exp of a series without constant term.
    pub fn exp(&self) -> Result<Self, Error> {
        if self.coeffs.keys().any(|(d, n)| *n < 0 || (total(d) == 0 && *n == 0)) {
            return Err(Error::NonUnitConstantTerm("exp needs a series with no constant or negative terms".into()));
        }
        let base = Self::new(self.rank, self.dmax, 0, self.zmax.max(0));
        let mut acc = base.constant_like(Scalar::one());
        let mut term = acc.clone();
        let mut j = 0i64;
        loop {
            j += 1;
            term = term.mul(self).scale(&Scalar::frac(1, j));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// log of a series with constant term 1.
    pub fn log(&self) -> Result<Self, Error> {
        let (cinv, u) = self.unit_split()?;
        if !cinv.is_one() {
            return Err(Error::NonUnitConstantTerm("log needs constant term 1".into()));
        }
        let mut acc = Self::new(self.rank, self.dmax, 0, u.zmax);
        let mut term = u.constant_like(Scalar::one());
        let mut j = 0i64;
        loop {
            j += 1;
            term = term.mul(&u);
            if term.is_zero() {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&term.scale(&Scalar::frac(sign, j)));
        }
        Ok(acc)
    }

    pub fn nonequiv_limit(&self) -> Result<Self, Error> {
        self.try_map(|d, n, c| {
            c.nonequiv_limit().map_err(|e| match e {
                Error::PoleAtZero(m) => Error::PoleAtZero(format!("(d={d:?}, z^{n}): {m}")),
                Error::LogObstruction(m) => Error::LogObstruction(format!("(d={d:?}, z^{n}): {m}")),
                other => other,
            })
        })
    }

    fn assert_rank1_z_free(&self) {
        assert!(self.rank == 1 && self.zmin == 0 && self.zmax == 0, "expected a rank-1 z-free Novikov series");
    }

    /// f(g(Q)) for z-free rank-1 series with g(0) = 0.
    pub fn compose(&self, g: &Self) -> Self {
        self.assert_rank1_z_free();
        g.assert_rank1_z_free();
        assert!(g.q(0).is_zero(), "inner series must vanish at Q = 0");
        let dmax = self.dmax.min(g.dmax);
        let mut acc = Self::novikov(dmax);
        let mut pw = Self::from_q_coeffs(dmax, &[Scalar::one()]);
        for k in 0..=dmax {
            acc = acc.add(&pw.scale(&self.q(k)));
            pw = pw.mul(g);
        }
        acc
    }

    /// Compositional inverse of a z-free rank-1 series f = c₁Q + O(Q²), c₁ invertible.
    pub fn reversion(&self) -> Result<Self, Error> {
        self.assert_rank1_z_free();
        if !self.q(0).is_zero() {
            return Err(Error::NonUnitConstantTerm("reversion needs f(0) = 0".into()));
        }
        let c1inv = self
            .q(1)
            .inv()
            .ok_or_else(|| Error::NonUnitConstantTerm("linear coefficient not invertible".into()))?;
        let q = Self::from_q_coeffs(self.dmax, &[Scalar::zero(), Scalar::one()]);
        let mut higher = self.clone();
        higher.coeffs.remove(&(vec![1], 0));
        let mut g = q.scale(&c1inv);
        for _ in 0..self.dmax {
            g = q.sub(&higher.compose(&g)).scale(&c1inv);
        }
        Ok(g)
    }

    /// Coefficient list Q^0..Q^dmax of a z-free rank-1 series as rationals, if rational.
    pub fn rational_q_coeffs(&self) -> Option<Vec<Rational>> {
        (0..=self.dmax).map(|d| self.q(d).as_rational()).collect()
    }
}

/// Convenience: the rank-1 series `Σ c_d Q^d` from rationals.
pub fn q_series(dmax: u32, cs: &[Rational]) -> TruncSeries {
    let v: Vec<Scalar> = cs.iter().cloned().map(Scalar::from_rational).collect();
    TruncSeries::from_q_coeffs(dmax, &v)
}

pub fn rational(n: i64, d: i64) -> Rational {
    if d == 1 {
        Rational::from_integer(n.into())
    } else {
        Rational::new(n.into(), d.into())
    }
}

impl TruncSeries {
    pub fn is_one(&self) -> bool {
        let zero = vec![0; self.rank];
        self.coeffs.len() == 1 && self.get(&zero, 0).is_one()
    }

    pub fn one_like(&self) -> Self {
        self.constant_like(Scalar::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invert_examples() {
        let one = q_series(4, &[rational(1, 1)]);
        assert!(one.invert().unwrap().is_one());
        let a = q_series(2, &[rational(1, 1), rational(120, 1)]);
        let inv = a.invert().unwrap();
        assert_eq!(inv, q_series(2, &[rational(1, 1), rational(-120, 1), rational(14400, 1)]));
        assert!(a.mul(&inv).is_one());
        let g = q_series(5, &[rational(1, 1), rational(1, 1)]).invert().unwrap();
        for d in 0..=5 {
            assert_eq!(g.q(d), Scalar::from_int(if d % 2 == 0 { 1 } else { -1 }));
        }
    }

    #[test]
    fn zero_constant_is_rejected() {
        let a = q_series(2, &[rational(0, 1), rational(1, 1)]);
        assert!(matches!(a.invert(), Err(Error::NonUnitConstantTerm(_))));
    }

    #[test]
    fn exp_log_round_trip() {
        let u = q_series(5, &[rational(0, 1), rational(3, 2), rational(-7, 1), rational(1, 3)]);
        let e = u.exp().unwrap();
        assert_eq!(e.log().unwrap(), u);
    }

    #[test]
    fn reversion_inverts_composition() {
        let f = q_series(6, &[rational(0, 1), rational(2, 1), rational(5, 1), rational(-1, 7)]);
        let g = f.reversion().unwrap();
        assert_eq!(f.compose(&g), q_series(6, &[rational(0, 1), rational(1, 1)]));
        assert_eq!(g.compose(&f), q_series(6, &[rational(0, 1), rational(1, 1)]));
    }

    #[test]
    fn product_window_shrinks_at_top() {
        let mut a = TruncSeries::new(1, 0, -1, 3);
        a.insert(vec![0], -1, Scalar::one()).unwrap();
        let b = a.mul(&a);
        assert_eq!((b.zmin(), b.zmax()), (-2, 2));
        assert_eq!(b.get(&[0], -2), Scalar::one());
        assert!(a.insert(vec![0], 4, Scalar::one()).is_err());
    }
}
