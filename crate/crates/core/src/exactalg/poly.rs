//! Dense univariate polynomials over ℚ and the rational functions built from them.

use num_traits::{One, Signed, Zero};
use std::fmt;

use super::Rational;

/// Polynomial with coefficients lowest degree first; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly(Vec<Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![Rational::one()])
    }

    pub fn constant(c: Rational) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// The monomial `c·x^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Poly::from_coeffs(v)
    }

    pub fn from_coeffs(mut v: Vec<Rational>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        Poly(v)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Rational> {
        self.0.last()
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval_zero(&self) -> Rational {
        self.coeff(0)
    }

    /// Lowest power of x with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.0.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(match (self.0.get(k), o.0.get(k)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Poly::from_coeffs(v)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::from_coeffs(v)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            if r[k].is_zero() {
                continue;
            }
            let c = &r[k] / &lead;
            for (j, dj) in d.0.iter().enumerate() {
                let t = &c * dj;
                r[k - dd + j] -= t;
            }
            q[k - dd] = c;
        }
        (Poly::from_coeffs(q), Poly::from_coeffs(r))
    }

    pub fn monic(&self) -> Poly {
        match self.lead() {
            None => Poly::zero(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => {
                let inv = l.recip();
                self.scale(&inv)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn derivative(&self) -> Poly {
        Poly::from_coeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * Rational::from_integer(k.into()))
                .collect(),
        )
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x"))
    }
}

impl Poly {
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

/// Reduced quotient `num/den` with `den` monic and coprime to `num`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_rational(c: Rational) -> Self {
        RatFunc { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }

    /// Builds and reduces `num/den`; `None` if `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFunc::zero();
        }
        if den.degree() == Some(0) {
            let inv = den.0[0].recip();
            return RatFunc { num: num.scale(&inv), den: Poly::one() };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.divrem(&g).0, den.divrem(&g).0)
        };
        let l = den.lead().unwrap().clone();
        if l.is_one() {
            RatFunc { num, den }
        } else {
            let inv = l.recip();
            RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The value as a rational when it is constant.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.den.is_one() && self.num.degree().unwrap_or(0) == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc { num: self.num.add(&o.num), den: Poly::one() };
        }
        if self.den == o.den {
            return Self::reduce(self.num.add(&o.num), self.den.clone());
        }
        Self::reduce(
            self.num.mul(&o.den).add(&o.num.mul(&self.den)),
            self.den.mul(&o.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc { num: self.num.mul(&o.num), den: Poly::one() };
        }
        Self::reduce(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, c: &Rational) -> RatFunc {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            None
        } else {
            Some(Self::reduce(self.den.clone(), self.num.clone()))
        }
    }

    /// Value at x = 0, or `None` if x divides the denominator.
    pub fn at_zero(&self) -> Option<Rational> {
        let d = self.den.eval_zero();
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval_zero() / d)
        }
    }

    /// Replaces x by x² (used when passing to a square-root variable).
    pub fn square_variable(&self) -> RatFunc {
        let sq = |p: &Poly| {
            let mut v = vec![Rational::zero(); 2 * p.0.len()];
            for (k, c) in p.0.iter().enumerate() {
                v[2 * k] = c.clone();
            }
            Poly::from_coeffs(v)
        };
        Self::reduce(sq(&self.num), sq(&self.den))
    }

    /// Replaces x² by x when only even powers occur.
    pub fn halve_variable(&self) -> Option<RatFunc> {
        let half = |p: &Poly| {
            let mut v = Vec::new();
            for (k, c) in p.0.iter().enumerate() {
                if k % 2 == 1 {
                    if !c.is_zero() {
                        return None;
                    }
                } else {
                    v.push(c.clone());
                }
            }
            Some(Poly::from_coeffs(v))
        };
        Some(Self::reduce(half(&self.num)?, half(&self.den)?))
    }

    pub fn render(&self, var: &str) -> String {
        if self.den.is_one() {
            let s = self.num.render(var);
            if self.num.0.iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        } else {
            format!("({})/({})", self.num.render(var), self.den.render(var))
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("λ"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p(v: &[i64]) -> Poly {
        Poly::from_coeffs(v.iter().map(|&c| q(c, 1)).collect())
    }

    #[test]
    fn division_round_trips() {
        let a = p(&[1, 2, 3, 4, 5]);
        let d = p(&[2, 0, 1]);
        let (qq, r) = a.divrem(&d);
        assert_eq!(qq.mul(&d).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn gcd_is_monic_common_factor() {
        let f = p(&[1, 1]);
        let a = f.mul(&p(&[2, 0, 3]));
        let b = f.mul(&p(&[5, 7]));
        assert_eq!(a.gcd(&b), f);
    }

    #[test]
    fn ratfunc_reduces() {
        let x1 = p(&[1, 1]);
        let r = RatFunc::new(x1.mul(&p(&[0, 2])), x1.mul(&p(&[0, 0, 4]))).unwrap();
        // 2x(x+1) / 4x²(x+1) = 1/(2x)
        assert_eq!(r.num(), &Poly::constant(q(1, 2)));
        assert_eq!(r.den(), &p(&[0, 1]));
        assert_eq!(r.at_zero(), None);
    }

    #[test]
    fn square_and_halve_are_inverse() {
        let r = RatFunc::new(p(&[1, 3]), p(&[2, 0, 1])).unwrap();
        assert_eq!(r.square_variable().halve_variable().unwrap(), r);
    }
}
