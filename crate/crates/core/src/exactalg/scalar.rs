//! Elements of ℚ(λ)[ℓ] ⊗ ℚ(ζ_N).
//!
//! A scalar is a finite sum `Σ ℓ^j ζ_N^c R_{j,c}(λ)` with `0 ≤ c < φ(N)` and each
//! `R_{j,c}` a reduced rational function. When every cyclotomic index is zero the
//! order collapses to 1, so plain rational data always compares syntactically.

use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::cyclo;
use super::poly::{Poly, RatFunc};
use super::Rational;
use crate::Error;

#[derive(Clone)]
pub struct Scalar {
    order: u32,
    terms: BTreeMap<(u32, u32), RatFunc>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { order: 1, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_rational(Rational::new(n.into(), d.into()))
    }

    pub fn from_rational(c: Rational) -> Self {
        Self::from_ratfunc(RatFunc::from_rational(c))
    }

    pub fn from_ratfunc(r: RatFunc) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert((0, 0), r);
        }
        Scalar { order: 1, terms }
    }

    /// The equivariant variable (λ, or λ^{1/2} in square-root contexts).
    pub fn lambda() -> Self {
        Self::from_ratfunc(RatFunc::from_poly(Poly::monomial(Rational::one(), 1)))
    }

    pub fn lambda_pow(k: i32) -> Self {
        let m = Poly::monomial(Rational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Self::from_ratfunc(RatFunc::from_poly(m))
        } else {
            Self::from_ratfunc(RatFunc::new(Poly::one(), m).unwrap())
        }
    }

    /// The formal symbol ℓ = ln λ.
    pub fn ell() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((1, 0), RatFunc::one());
        Scalar { order: 1, terms }
    }

    /// ζ_N^k with ζ_N = exp(2π√−1/N).
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n >= 1, "root_of_unity needs N ≥ 1");
        let d = cyclo::data(n);
        let e = k.rem_euclid(n as i64) as usize;
        let mut terms = BTreeMap::new();
        for (c, v) in d.powers[e].iter().enumerate() {
            if !v.is_zero() {
                terms.insert((0, c as u32), RatFunc::from_rational(v.clone()));
            }
        }
        Scalar { order: n, terms }.normalized()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&(0, 0)).is_some_and(|r| r.is_one())
    }

    /// Largest power of ℓ present (0 for ℓ-free scalars).
    pub fn ell_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.0).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &RatFunc)> {
        self.terms.iter().map(|(&(l, c), r)| (l, c, r))
    }

    pub fn as_ratfunc(&self) -> Option<RatFunc> {
        match self.terms.len() {
            0 => Some(RatFunc::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.as_ratfunc()?.as_rational()
    }

    /// Coefficient of ℓ^j as an ℓ-free scalar.
    pub fn ell_coeff(&self, j: u32) -> Scalar {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.0 == j)
            .map(|(&(_, c), r)| ((0, c), r.clone()))
            .collect();
        Scalar { order: self.order, terms }.normalized()
    }

    fn normalized(mut self) -> Self {
        self.terms.retain(|_, r| !r.is_zero());
        if self.order != 1 && self.terms.keys().all(|k| k.1 == 0) {
            self.order = 1;
        }
        self
    }

    /// Re-expresses the scalar in ℚ(ζ_M) for a multiple M of its order.
    pub fn lift(&self, to: u32) -> Scalar {
        if to == self.order {
            return self.clone();
        }
        assert!(to.is_multiple_of(self.order), "cannot lift order {} to {}", self.order, to);
        let step = (to / self.order) as usize;
        let d = cyclo::data(to);
        let mut terms: BTreeMap<(u32, u32), RatFunc> = BTreeMap::new();
        for (&(l, c), r) in &self.terms {
            let v = &d.powers[(c as usize * step) % to as usize];
            for (k, a) in v.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let e = terms.entry((l, k as u32)).or_insert_with(RatFunc::zero);
                *e = e.add(&r.scale(a));
            }
        }
        Scalar { order: to, terms }
    }

    fn common(a: &Scalar, b: &Scalar) -> (Scalar, Scalar, u32) {
        if a.order == b.order {
            return (a.clone(), b.clone(), a.order);
        }
        let n = a.order.lcm(&b.order);
        (a.lift(n), b.lift(n), n)
    }

    fn add_ref(&self, o: &Scalar) -> Scalar {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let (mut a, b, _) = if self.order == o.order {
            (self.clone(), o.clone(), self.order)
        } else {
            Self::common(self, o)
        };
        for (k, r) in b.terms {
            match a.terms.get_mut(&k) {
                Some(e) => *e = e.add(&r),
                None => {
                    a.terms.insert(k, r);
                }
            }
        }
        a.normalized()
    }

    fn mul_ref(&self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        if self.order == 1 && o.order == 1 {
            let mut terms: BTreeMap<(u32, u32), RatFunc> = BTreeMap::new();
            for (&(l1, _), r1) in &self.terms {
                for (&(l2, _), r2) in &o.terms {
                    let e = terms.entry((l1 + l2, 0)).or_insert_with(RatFunc::zero);
                    *e = e.add(&r1.mul(r2));
                }
            }
            return Scalar { order: 1, terms }.normalized();
        }
        let (a, b, n) = Self::common(self, o);
        let d = cyclo::data(n);
        let mut terms: BTreeMap<(u32, u32), RatFunc> = BTreeMap::new();
        for (&(l1, c1), r1) in &a.terms {
            for (&(l2, c2), r2) in &b.terms {
                let p = r1.mul(r2);
                let v = &d.powers[((c1 + c2) % n) as usize];
                for (k, cf) in v.iter().enumerate() {
                    if cf.is_zero() {
                        continue;
                    }
                    let e = terms.entry((l1 + l2, k as u32)).or_insert_with(RatFunc::zero);
                    *e = e.add(&p.scale(cf));
                }
            }
        }
        Scalar { order: n, terms }.normalized()
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            order: self.order,
            terms: self.terms.iter().map(|(k, r)| (*k, r.scale(c))).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero and for anything involving ℓ.
    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() || self.ell_degree() > 0 {
            return None;
        }
        if let Some(r) = self.as_ratfunc() {
            return Some(Scalar::from_ratfunc(r.inv()?));
        }
        // Solve a·b = 1 in ℚ(λ)(ζ_N) as a φ×φ linear system.
        let n = self.order;
        let d = cyclo::data(n);
        let phi = d.phi;
        let mut m: Vec<Vec<RatFunc>> = vec![vec![RatFunc::zero(); phi + 1]; phi];
        for j in 0..phi {
            let col = self.mul_ref(&Scalar::root_of_unity(n, j as i64)).lift(n);
            for (&(_, c), r) in &col.terms {
                m[c as usize][j] = r.clone();
            }
        }
        m[0][phi] = RatFunc::one();
        let x = solve_ratfunc(m)?;
        let mut terms = BTreeMap::new();
        for (j, r) in x.into_iter().enumerate() {
            if !r.is_zero() {
                terms.insert((0, j as u32), r);
            }
        }
        Some(Scalar { order: n, terms }.normalized())
    }

    pub fn div(&self, o: &Scalar) -> Option<Scalar> {
        Some(self * &o.inv()?)
    }

    /// Substitutes λ = 0.
    pub fn nonequiv_limit(&self) -> Result<Scalar, Error> {
        if self.ell_degree() > 0 {
            return Err(Error::LogObstruction(format!("{self}")));
        }
        let mut terms = BTreeMap::new();
        for (&k, r) in &self.terms {
            let v = r.at_zero().ok_or_else(|| Error::PoleAtZero(format!("{self}")))?;
            if !v.is_zero() {
                terms.insert(k, RatFunc::from_rational(v));
            }
        }
        Ok(Scalar { order: self.order, terms }.normalized())
    }

    /// Applies `f` to every rational-function coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&RatFunc) -> RatFunc) -> Scalar {
        Scalar {
            order: self.order,
            terms: self.terms.iter().map(|(k, r)| (*k, f(r))).collect(),
        }
        .normalized()
    }

    /// Reinterprets the variable as a square root: λ ↦ (λ^{1/2})².
    pub fn to_sqrt_variable(&self) -> Scalar {
        self.map_coeffs(|r| r.square_variable())
    }

    /// Inverse of [`Scalar::to_sqrt_variable`]; fails when an odd power of λ^{1/2} remains.
    pub fn from_sqrt_variable(&self) -> Option<Scalar> {
        let mut terms = BTreeMap::new();
        for (&k, r) in &self.terms {
            terms.insert(k, r.halve_variable()?);
        }
        Some(Scalar { order: self.order, terms })
    }

    pub(crate) fn from_parts(order: u32, terms: BTreeMap<(u32, u32), RatFunc>) -> Scalar {
        Scalar { order, terms }.normalized()
    }
}

/// Gaussian elimination over ℚ(λ); rows are augmented `[A | b]`.
fn solve_ratfunc(mut m: Vec<Vec<RatFunc>>) -> Option<Vec<RatFunc>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        let inv = m[col][col].inv()?;
        for c in col..=n {
            m[col][c] = m[col][c].mul(&inv);
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let t = f.mul(&m[col][c]);
                    m[r][c] = m[r][c].sub(&t);
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

impl PartialEq for Scalar {
    fn eq(&self, o: &Scalar) -> bool {
        if self.order == o.order {
            return self.terms == o.terms;
        }
        let (a, b, _) = Self::common(self, o);
        a.terms == b.terms
    }
}

impl Eq for Scalar {}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<Rational> for Scalar {
    fn from(c: Rational) -> Self {
        Scalar::from_rational(c)
    }
}

impl From<i64> for Scalar {
    fn from(c: i64) -> Self {
        Scalar::from_int(c)
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $imp:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $f(self, o: &Scalar) -> Scalar {
                self.$imp(o)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                (&self).$imp(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, o: &Scalar) -> Scalar {
                (&self).$imp(o)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $f(self, o: Scalar) -> Scalar {
                self.$imp(&o)
            }
        }
    };
}

impl Scalar {
    fn sub_ref(&self, o: &Scalar) -> Scalar {
        self.add_ref(&-o)
    }
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            order: self.order,
            terms: self.terms.iter().map(|(k, r)| (*k, r.neg())).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = self.add_ref(o);
    }
}

impl AddAssign<Scalar> for Scalar {
    fn add_assign(&mut self, o: Scalar) {
        *self = self.add_ref(&o);
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = self.sub_ref(o);
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (&(l, c), r) in &self.terms {
            let mut s = r.render("λ");
            if c > 0 {
                let z = if c == 1 { format!("ζ{}", self.order) } else { format!("ζ{}^{c}", self.order) };
                s = if r.is_one() { z } else { format!("{s}*{z}") };
            }
            if l > 0 {
                let e = if l == 1 { "ℓ".to_string() } else { format!("ℓ^{l}") };
                s = if s == "1" { e } else { format!("{s}*{e}") };
            }
            parts.push(s);
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_12_to_the_sixth_is_minus_one() {
        let z = Scalar::root_of_unity(12, 1);
        assert_eq!(z.pow(6), Scalar::from_int(-1));
        assert_eq!(z.pow(12), Scalar::one());
        assert_eq!(Scalar::root_of_unity(2, 1), Scalar::from_int(-1));
        assert_eq!(Scalar::root_of_unity(1, 0), Scalar::one());
    }

    #[test]
    fn mixed_orders_compare_after_lifting() {
        let z4 = Scalar::root_of_unity(4, 1);
        let z12 = Scalar::root_of_unity(12, 3);
        assert_eq!(z4, z12);
        let s = &z4 + &Scalar::root_of_unity(6, 1);
        assert_eq!(s.order(), 12);
    }

    #[test]
    fn cyclotomic_inverse() {
        let a = Scalar::from_int(2) + Scalar::root_of_unity(5, 1) * Scalar::lambda();
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
    }

    #[test]
    fn limit_errors() {
        assert!(matches!(Scalar::lambda_pow(-1).nonequiv_limit(), Err(Error::PoleAtZero(_))));
        assert!(matches!(Scalar::ell().nonequiv_limit(), Err(Error::LogObstruction(_))));
        let x = Scalar::lambda() + Scalar::from_int(5);
        assert_eq!(x.nonequiv_limit().unwrap(), Scalar::from_int(5));
    }

    #[test]
    fn ell_has_no_inverse() {
        assert!(Scalar::ell().inv().is_none());
    }
}
