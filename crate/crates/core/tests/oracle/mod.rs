//! Reference values computed without the library: plain rational power series,
//! the classical quintic mirror, Bernoulli numbers and the Stirling series.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Power series in one variable, truncated to `len` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Ps(pub Vec<Q>);

impl Ps {
    pub fn zero(len: usize) -> Ps {
        Ps(vec![Q::zero(); len])
    }

    pub fn one(len: usize) -> Ps {
        let mut p = Ps::zero(len);
        p.0[0] = Q::one();
        p
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, o: &Ps) -> Ps {
        let n = self.len();
        let mut out = Ps::zero(n);
        for i in 0..n {
            if self.0[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                out.0[i + j] += &self.0[i] * &o.0[j];
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Ps {
        Ps(self.0.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, o: &Ps) -> Ps {
        Ps(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn inv(&self) -> Ps {
        let n = self.len();
        let a0 = self.0[0].recip();
        let mut out = Ps::zero(n);
        out.0[0] = a0.clone();
        for k in 1..n {
            let mut acc = Q::zero();
            for j in 1..=k {
                acc += &self.0[j] * &out.0[k - j];
            }
            out.0[k] = -acc * &a0;
        }
        out
    }

    /// `x·f'(x)`.
    pub fn theta(&self) -> Ps {
        Ps(self.0.iter().enumerate().map(|(k, c)| c * int(k as i64)).collect())
    }

    /// `exp(f)` for `f(0) = 0`, via `g' = f' g`.
    pub fn exp(&self) -> Ps {
        let n = self.len();
        let df = self.theta();
        let mut g = Ps::zero(n);
        g.0[0] = Q::one();
        for k in 1..n {
            let mut acc = Q::zero();
            for j in 1..=k {
                acc += &df.0[j] * &g.0[k - j];
            }
            g.0[k] = acc / int(k as i64);
        }
        g
    }

    /// `f(g(x))` for `g(0) = 0`.
    pub fn compose(&self, g: &Ps) -> Ps {
        let n = self.len();
        let mut out = Ps::zero(n);
        let mut pw = Ps::one(n);
        for k in 0..n {
            out = out.add(&pw.scale(&self.0[k]));
            pw = pw.mul(g);
        }
        out
    }

    /// Compositional inverse of `f = x + …`, by fixed-point iteration `g ← x − (f(g) − g)`.
    pub fn reversion(&self) -> Ps {
        let n = self.len();
        let mut x = Ps::zero(n);
        if n > 1 {
            x.0[1] = Q::one();
        }
        let mut g = x.clone();
        for _ in 0..n {
            let fg = self.compose(&g);
            g = x.add(&g).add(&fg.scale(&int(-1)));
        }
        g
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn harmonic(n: u64) -> Q {
    (1..=n).fold(Q::zero(), |a, k| a + q(1, k as i64))
}

/// Periods of the quintic mirror at `λ = 0`:
/// `ω_0 = Σ (5d)!/(d!)^5 Q^d` and `ω_1 = Σ (5d)!/(d!)^5 · 5(H_{5d} − H_d) Q^d`.
pub fn quintic_periods(dmax: usize) -> (Ps, Ps) {
    let mut w0 = Ps::zero(dmax + 1);
    let mut w1 = Ps::zero(dmax + 1);
    for d in 0..=dmax as u64 {
        let a = Q::from_integer(factorial(5 * d) / factorial(d).pow(5));
        w1.0[d as usize] = &a * int(5) * (harmonic(5 * d) - harmonic(d));
        w0.0[d as usize] = a;
    }
    (w0, w1)
}

/// `N_d` from the Yukawa coupling `5/((1 − 5^5 Q) ω_0² (1 + θτ)^3)` re-expanded in `q = Q e^τ`.
pub fn quintic_gw(dmax: usize) -> Vec<Q> {
    let n = dmax + 1;
    let (w0, w1) = quintic_periods(dmax);
    let tau = w1.mul(&w0.inv());
    let mut one_minus = Ps::one(n);
    if n > 1 {
        one_minus.0[1] = int(-3125);
    }
    let jac = Ps::one(n).add(&tau.theta());
    let denom = one_minus.mul(&w0).mul(&w0).mul(&jac).mul(&jac).mul(&jac);
    let yukawa = denom.inv().scale(&int(5));
    let mut big_q = Ps::zero(n);
    if n > 1 {
        big_q.0[1] = Q::one();
    }
    let small_q = big_q.mul(&tau.exp());
    let yq = yukawa.compose(&small_q.reversion());
    (1..=dmax).map(|d| &yq.0[d] / int((d * d * d) as i64)).collect()
}

/// `n_d` from `N_d = Σ_{k | d} n_{d/k} / k^3`.
pub fn instantons(gw: &[Q]) -> Vec<Q> {
    let mut n: Vec<Q> = Vec::with_capacity(gw.len());
    for d in 1..=gw.len() {
        let mut v = gw[d - 1].clone();
        for k in 2..=d {
            if d % k == 0 {
                v -= &n[d / k - 1] / int((k * k * k) as i64);
            }
        }
        n.push(v);
    }
    n
}

/// `B_0, …, B_n` from `Σ_{k ≤ m} C(m+1, k) B_k = 0`.
pub fn bernoulli_numbers(n: usize) -> Vec<Q> {
    let mut b = vec![Q::one()];
    for m in 1..=n {
        let mut acc = Q::zero();
        let mut binom = BigInt::one();
        for (k, bk) in b.iter().enumerate() {
            acc += Q::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / int(m as i64 + 1));
    }
    b
}

/// `B_m(x) = Σ C(m, k) B_k x^{m−k}`.
pub fn bernoulli_poly(m: usize, x: &Q) -> Q {
    bernoulli_poly_with(&bernoulli_numbers(m), m, x)
}

/// As [`bernoulli_poly`], reusing precomputed `B_0, …, B_m`.
pub fn bernoulli_poly_with(b: &[Q], m: usize, x: &Q) -> Q {
    let mut acc = Q::zero();
    let mut binom = BigInt::one();
    for k in 0..=m {
        acc += Q::from_integer(binom.clone()) * &b[k] * num_traits::pow(x.clone(), m - k);
        binom = binom * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    acc
}

/// Coefficient of `x^{1−m}` in the Stirling series of `ln Γ(x + a)`:
/// `(−1)^m B_m(a) / (m(m−1))`, for `m ≥ 2`.
pub fn stirling_coefficient(m: usize, a: &Q) -> Q {
    let sign = if m.is_multiple_of(2) { 1 } else { -1 };
    bernoulli_poly(m, a) * int(sign) / int((m * (m - 1)) as i64)
}

/// Sanity checks of the oracles against textbook values.
pub fn self_check() -> Result<(), String> {
    let b = bernoulli_numbers(6);
    let expect = [(1, q(-1, 2)), (2, q(1, 6)), (3, Q::zero()), (4, q(-1, 30)), (6, q(1, 42))];
    for (k, v) in expect {
        if b[k] != v {
            return Err(format!("oracle B_{k} = {}", b[k]));
        }
    }
    if bernoulli_poly(3, &q(1, 3)) != q(1, 27) {
        return Err("oracle B_3(1/3)".into());
    }
    if quintic_gw(1)[0] != int(2875) {
        return Err("oracle N_1".into());
    }
    Ok(())
}
