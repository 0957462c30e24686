//! Bernoulli numbers and polynomials, `t e^{tx}/(e^t − 1) = Σ B_m(x) t^m/m!`.
//!
//! The numbers come from `B_m(1) = B_m(0)` for `m ≥ 2`, i.e. the triangular
//! recurrence `Σ_{k<m} C(m,k) B_k = 0`, and the polynomials from
//! `B_m(x) = Σ_k C(m,k) B_k x^{m−k}`. Both are memoized.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::sync::{Mutex, OnceLock};

use crate::exactalg::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct BernoulliPoly {
    pub degree: usize,
    /// Coefficients lowest degree first.
    pub coeffs: Vec<Rational>,
}

impl BernoulliPoly {
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

fn binomials(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

fn numbers_upto(m: usize) -> Vec<Rational> {
    static MEMO: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(vec![Rational::one()]));
    let mut b = memo.lock().unwrap();
    while b.len() <= m {
        let n = b.len();
        let c = binomials(n + 1);
        let mut s = Rational::zero();
        for (k, bk) in b.iter().enumerate() {
            s += bk * Rational::from_integer(c[k].clone());
        }
        let next = -s / Rational::from_integer(c[n].clone());
        b.push(next);
    }
    b[..=m].to_vec()
}

/// The m-th Bernoulli number with the convention B_1 = −1/2.
pub fn bernoulli_number(m: usize) -> Rational {
    numbers_upto(m)[m].clone()
}

pub fn bernoulli_poly(m: usize) -> BernoulliPoly {
    let b = numbers_upto(m);
    let c = binomials(m);
    let coeffs = (0..=m)
        .map(|j| &b[m - j] * Rational::from_integer(c[j].clone()))
        .collect();
    BernoulliPoly { degree: m, coeffs }
}

pub fn bernoulli_value(m: usize, x: &Rational) -> Rational {
    bernoulli_poly(m).eval(x)
}
