//! Cyclotomic polynomials and power-basis reduction tables for ℚ(ζ_N).

use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::poly::Poly;
use super::Rational;

/// Reduction data for ℚ(ζ_N) in the basis 1, ζ, …, ζ^{φ(N)−1}.
#[derive(Debug)]
pub struct CycloData {
    pub phi: usize,
    /// `powers[e]` is ζ^e reduced, for 0 ≤ e < N.
    pub powers: Vec<Vec<Rational>>,
}

pub fn cyclotomic_poly(n: u32) -> Poly {
    // x^n − 1 divided by Φ_d for every proper divisor d.
    let mut p = Poly::monomial(Rational::one(), n as usize).sub(&Poly::one());
    for d in 1..n {
        if n.is_multiple_of(d) {
            p = p.divrem(&cyclotomic_poly(d)).0;
        }
    }
    p
}

fn build(order: u32) -> CycloData {
    let modulus = cyclotomic_poly(order);
    let phi = modulus.degree().unwrap();
    let mut powers = Vec::with_capacity(order as usize);
    for e in 0..order as usize {
        let r = Poly::monomial(Rational::one(), e).divrem(&modulus).1;
        let mut v = vec![Rational::zero(); phi];
        for (k, c) in r.coeffs().iter().enumerate() {
            v[k] = c.clone();
        }
        powers.push(v);
    }
    CycloData { phi, powers }
}

pub fn data(order: u32) -> Arc<CycloData> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CycloData>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(d) = cache.lock().unwrap().get(&order) {
        return d.clone();
    }
    let d = Arc::new(build(order));
    cache.lock().unwrap().entry(order).or_insert(d).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        let r = |v: &[i64]| Poly::from_coeffs(v.iter().map(|&c| Rational::from_integer(c.into())).collect());
        assert_eq!(cyclotomic_poly(1), r(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), r(&[1, 1]));
        assert_eq!(cyclotomic_poly(12), r(&[1, 0, -1, 0, 1]));
        assert_eq!(data(12).phi, 4);
    }
}
