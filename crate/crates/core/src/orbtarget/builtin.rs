//! Built-in targets and bundles.
//!
//! Sectors of `Bμ_r` are indexed by `k` for the element `ζ_r^k` and record
//! `r_k = r/gcd(k, r)`, the order of that element. The gerbe `Bμ_r` has
//! `∫ 1 = 1/r`. Sectors of `P(w_0, …, w_n)` are indexed by
//! `f ∈ {k/w_j} ∩ [0, 1)` in increasing order; `X_f = P(w_j : f·w_j ∈ ℤ)`.

use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use super::{BasisElement, BundleModel, CohClass, Component, EigenPart, LineSummand, TargetModel};
use crate::exactalg::{Rational, Scalar};
use crate::Error;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// `ℚ[p]/p^{n+1}` with basis `1, p, …, p^n`.
fn truncated_poly_ring(n: u32, top: Rational) -> (Vec<BasisElement>, Vec<Vec<Rational>>, Vec<Vec<Vec<Rational>>>) {
    let b = n as usize + 1;
    let basis = (0..b)
        .map(|k| BasisElement {
            name: match k {
                0 => "1".to_string(),
                1 => "p".to_string(),
                _ => format!("p^{k}"),
            },
            degree: 2 * k as u32,
        })
        .collect();
    let pairing = (0..b)
        .map(|a| (0..b).map(|c| if a + c == n as usize { top.clone() } else { Rational::zero() }).collect())
        .collect();
    let products = (0..b)
        .map(|a| {
            (0..b)
                .map(|c| {
                    let mut v = vec![Rational::zero(); b];
                    if a + c < b {
                        v[a + c] = Rational::one();
                    }
                    v
                })
                .collect()
        })
        .collect();
    (basis, pairing, products)
}

pub fn point() -> TargetModel {
    let mut t = bmu(1);
    t.name = "point".into();
    t
}

/// The classifying stack of `μ_r`.
pub fn bmu(r_: u32) -> TargetModel {
    assert!(r_ >= 1, "Bμ_r needs r ≥ 1");
    let components = (0..r_)
        .map(|k| {
            let g = k.gcd(&r_);
            let (basis, pairing, products) = truncated_poly_ring(0, r(1, r_ as i64));
            Component {
                id: if k == 0 { "1".into() } else { format!("g{k}") },
                r: r_ / g,
                age: Rational::zero(),
                involution: ((r_ - k) % r_) as usize,
                dim: 0,
                basis,
                pairing,
                products,
                restriction: vec![vec![Rational::one()]],
            }
        })
        .collect();
    TargetModel {
        name: format!("Bmu{r_}"),
        dim: 0,
        curve_rank: 0,
        c1_tangent: 0,
        degree_pairing: Vec::new(),
        components,
        genus1_constants: Vec::new(),
        jfunction_file: None,
    }
}

pub fn projective(n: u32) -> TargetModel {
    assert!(n >= 1, "P^n needs n ≥ 1");
    let mut t = wps(&vec![1; n as usize + 1]).expect("positive weights");
    t.name = format!("P{n}");
    t
}

/// Sector parameters `f` of a weighted projective stack, in increasing order.
pub fn wps_sectors(w: &[u32]) -> Vec<Rational> {
    let mut fs: Vec<Rational> = w
        .iter()
        .flat_map(|&wj| (0..wj).map(move |k| r(k as i64, wj as i64)))
        .collect();
    fs.sort();
    fs.dedup();
    fs
}

fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

pub fn wps(w: &[u32]) -> Result<TargetModel, Error> {
    if w.len() < 2 || w.contains(&0) {
        return Err(Error::InvalidParams(format!("weighted projective space needs ≥ 2 positive weights, got {w:?}")));
    }
    let n = (w.len() - 1) as u32;
    let fs = wps_sectors(w);
    let mut components = Vec::new();
    for f in &fs {
        let fixed: Vec<u32> = w.iter().copied().filter(|&wj| (f * Rational::from_integer(wj.into())).is_integer()).collect();
        let dim_f = fixed.len() as u32 - 1;
        let prod: u64 = fixed.iter().map(|&x| x as u64).product();
        let age = w.iter().fold(Rational::zero(), |acc, &wj| acc + frac(&(f * Rational::from_integer(wj.into()))));
        let partner = if f.is_zero() { Rational::zero() } else { Rational::one() - f };
        let involution = fs.iter().position(|g| *g == partner).expect("sector set is closed under f ↦ 1−f");
        let (basis, pairing, products) = truncated_poly_ring(dim_f, Rational::new(1.into(), prod.into()));
        let restriction = (0..=n)
            .map(|j| {
                let mut v = vec![Rational::zero(); dim_f as usize + 1];
                if j <= dim_f {
                    v[j as usize] = Rational::one();
                }
                v
            })
            .collect();
        components.push(Component {
            id: if f.is_zero() { "0".into() } else { f.to_string() },
            r: f.denom().try_into().expect("small denominator"),
            age,
            involution,
            dim: dim_f,
            basis,
            pairing,
            products,
            restriction,
        });
    }
    let mut degree_pairing = vec![Rational::zero(); n as usize + 1];
    degree_pairing[1] = Rational::one();
    let name = format!("WPS{}", w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","));
    Ok(TargetModel {
        name,
        dim: n,
        curve_rank: 1,
        c1_tangent: w.iter().map(|&x| x as i64).sum(),
        degree_pairing,
        components,
        genus1_constants: Vec::new(),
        jfunction_file: None,
    })
}

/// Trivial bundle of the given rank.
pub fn trivial(t: &TargetModel, rank: i64) -> BundleModel {
    let mut eigen = BTreeMap::new();
    if rank != 0 {
        for i in 0..t.components.len() {
            eigen.insert((i, 0), EigenPart { rank, ch: CohClass::term(i, 0, Scalar::from_int(rank)) });
        }
    }
    BundleModel {
        name: format!("trivial{rank}"),
        rank,
        pulled_back: true,
        c1_pairing: 0,
        eigen,
        lines: (0..rank.max(0)).map(|_| LineSummand { c1_pairing: 0, c1: CohClass::zero() }).collect(),
    }
}

/// `e^{k p}` on a component whose basis is `1, p, …, p^{dim}`.
fn exp_kp(i: usize, dim: u32, k: i64) -> CohClass {
    let mut out = CohClass::zero();
    let mut c = Rational::one();
    for j in 0..=dim {
        out.add_term(i, j as usize, Scalar::from_rational(c.clone()));
        c = c * Rational::from_integer(k.into()) / Rational::from_integer((j as i64 + 1).into());
    }
    out
}

/// `O(k)` on a weighted projective stack (or `P^n`) built by [`wps`] / [`projective`].
pub fn wps_line(t: &TargetModel, k: i64) -> Result<BundleModel, Error> {
    if t.curve_rank != 1 {
        return Err(Error::InvalidParams(format!("O(k) needs a weighted projective target, got {}", t.name)));
    }
    let mut eigen = BTreeMap::new();
    let mut c1 = CohClass::zero();
    let mut pulled_back = true;
    for (i, comp) in t.components.iter().enumerate() {
        let rr = comp.r as i64;
        let f: Rational = if i == 0 {
            Rational::zero()
        } else {
            crate::exactalg::parse_rational(&comp.id)
                .map_err(|_| Error::InvalidParams(format!("component id {} is not a sector parameter", comp.id)))?
        };
        let a: i64 = (f.numer() * rr / f.denom()).try_into().unwrap_or(0);
        let l = (a * k).rem_euclid(rr) as u32;
        if l != 0 {
            pulled_back = false;
        }
        eigen.insert((i, l), EigenPart { rank: 1, ch: exp_kp(i, comp.dim, k) });
        if comp.dim >= 1 {
            c1.add_term(i, 1, Scalar::from_int(k));
        }
    }
    Ok(BundleModel {
        name: format!("O({k})"),
        rank: 1,
        pulled_back,
        c1_pairing: k,
        eigen,
        lines: vec![LineSummand { c1_pairing: k, c1 }],
    })
}

/// The line bundle on `Bμ_r` given by the character `ζ ↦ ζ^j`.
pub fn bmu_character(t: &TargetModel, j: i64) -> BundleModel {
    let r_ = t.components.len() as i64;
    let mut eigen = BTreeMap::new();
    for (k, comp) in t.components.iter().enumerate() {
        let g = (k as i64).gcd(&r_);
        let kk = if k == 0 { 0 } else { k as i64 / g };
        let l = (j * kk).rem_euclid(comp.r as i64) as u32;
        eigen.insert((k, l), EigenPart { rank: 1, ch: CohClass::basis(k, 0) });
    }
    let pulled_back = eigen.keys().all(|&(_, l)| l == 0);
    BundleModel {
        name: format!("char{}", j.rem_euclid(r_.max(1))),
        rank: 1,
        pulled_back,
        c1_pairing: 0,
        eigen,
        lines: vec![LineSummand { c1_pairing: 0, c1: CohClass::zero() }],
    }
}

fn parse_weights(s: &str) -> Option<Vec<u32>> {
    let s = s.trim_start_matches('(').trim_end_matches(')');
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

/// Resolves names such as `point`, `Bmu3`, `P4`, `WPS1,1,2` or `WPS(1,1,2)`.
pub fn target_by_name(name: &str) -> Result<TargetModel, Error> {
    let bad = || Error::InvalidParams(format!("unknown built-in target {name:?}"));
    if name == "point" {
        return Ok(point());
    }
    if let Some(rest) = name.strip_prefix("Bmu") {
        let r_: u32 = rest.trim_start_matches('_').parse().map_err(|_| bad())?;
        if r_ == 0 {
            return Err(Error::InvalidParams("Bμ_r needs r ≥ 1".into()));
        }
        return Ok(bmu(r_));
    }
    if let Some(rest) = name.strip_prefix("WPS") {
        return wps(&parse_weights(rest).ok_or_else(bad)?);
    }
    if let Some(rest) = name.strip_prefix('P') {
        let n: u32 = rest.parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(Error::InvalidParams("P^n needs n ≥ 1".into()));
        }
        return Ok(projective(n));
    }
    Err(bad())
}

/// Resolves `O5`, `O(-1)`, `trivial2`, `zero` and `char1` against a built-in target.
pub fn bundle_by_name(t: &TargetModel, name: &str) -> Result<BundleModel, Error> {
    let bad = || Error::InvalidParams(format!("unknown built-in bundle {name:?} for {}", t.name));
    if name == "zero" {
        return Ok(BundleModel::zero("zero"));
    }
    if let Some(rest) = name.strip_prefix("trivial") {
        let k: i64 = if rest.is_empty() { 1 } else { rest.parse().map_err(|_| bad())? };
        return Ok(trivial(t, k));
    }
    if let Some(rest) = name.strip_prefix("char") {
        let j: i64 = rest.parse().map_err(|_| bad())?;
        return Ok(bmu_character(t, j));
    }
    if let Some(rest) = name.strip_prefix('O') {
        let k: i64 = rest.trim_start_matches('(').trim_end_matches(')').parse().map_err(|_| bad())?;
        return wps_line(t, k);
    }
    Err(bad())
}
