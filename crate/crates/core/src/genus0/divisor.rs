//! Shift identities of the J-function along the unit and divisor directions,
//! checked order by order in a formal shift ε.

use std::collections::BTreeMap;

use super::{zpoly_add, zpoly_mul, zpoly_scale, JFunction, ZPoly};
use crate::exactalg::{Rational, Scalar};
use crate::orbtarget::{CohClass, TargetModel};
use crate::Error;

/// Coefficients of `ε^j Q^d z^n`.
pub type EpsSeries = BTreeMap<(u32, u32), ZPoly>;

fn inv_factorial(j: u32) -> Scalar {
    let f = (1..=j as i64).fold(Rational::from_integer(1.into()), |a, k| a * Rational::from_integer(k.into()));
    Scalar::from_rational(f.recip())
}

fn zpoly_pow_series(t: &TargetModel, x: &ZPoly, order: u32) -> Vec<ZPoly> {
    let mut out = vec![BTreeMap::from([(0, t.identity_class())])];
    for j in 1..=order {
        let next = zpoly_mul(t, &out[j as usize - 1], x);
        out.push(next);
    }
    out
}

/// `J(εφ)` through `ε^order`: each layer is multiplied by `exp(ε(φ/z + ⟨d,φ⟩))` as one exponential.
pub fn expand_in_t(t: &TargetModel, j: &JFunction, phi: &CohClass, phi_on_d: &Rational, order: u32) -> EpsSeries {
    let mut out = EpsSeries::new();
    for d in 0..=j.dmax {
        let layer = j.layer(d);
        if layer.is_empty() {
            continue;
        }
        let shift = phi_on_d * Rational::from_integer(d.into());
        let mut x: ZPoly = BTreeMap::from([(-1, phi.clone())]);
        x = zpoly_add(&x, &BTreeMap::from([(0, t.identity_class().scale(&Scalar::from_rational(shift)))]));
        for (e, p) in zpoly_pow_series(t, &x, order).iter().enumerate() {
            let term = zpoly_scale(&zpoly_mul(t, p, &layer), &inv_factorial(e as u32));
            if !term.is_empty() {
                out.insert((e as u32, d), term);
            }
        }
    }
    out
}

/// `e^{εφ/z} · J(0)|_{Q ↦ Q e^{ε⟨d,φ⟩}}` through `ε^order`.
fn shifted_side(t: &TargetModel, j: &JFunction, phi: &CohClass, phi_on_d: &Rational, order: u32) -> EpsSeries {
    let phi_over_z: ZPoly = BTreeMap::from([(-1, phi.clone())]);
    let pows = zpoly_pow_series(t, &phi_over_z, order);
    let mut out = EpsSeries::new();
    for d in 0..=j.dmax {
        let layer = j.layer(d);
        let s = phi_on_d * Rational::from_integer(d.into());
        for a in 0..=order {
            let left = zpoly_scale(&pows[a as usize], &inv_factorial(a));
            let la = zpoly_mul(t, &left, &layer);
            for b in 0..=order - a {
                let c = &inv_factorial(b) * &Scalar::from_rational(s.clone()).pow(b);
                let term = zpoly_scale(&la, &c);
                if term.is_empty() {
                    continue;
                }
                let e = out.entry((a + b, d)).or_default();
                *e = zpoly_add(e, &term);
            }
        }
    }
    out.retain(|_, p| !p.is_empty());
    out
}

/// `J(t + εp) = e^{εp/z} J(t)|_{Q ↦ Q e^{ε}}` for the degree-two class `p = φ_{(0,a)}`.
pub fn check_divisor_shift(t: &TargetModel, j: &JFunction, a: usize, order: u32) -> Result<bool, Error> {
    if t.curve_rank != 1 || a >= t.components[0].basis.len() || t.basis_degree(0, a) != 2 {
        return Err(Error::InvalidParams(format!("basis element {a} is not a divisor class")));
    }
    let phi = t.pull_to_inertia(&CohClass::basis(0, a));
    let on_d = t.degree_pairing.get(a).cloned().unwrap_or_default();
    Ok(expand_in_t(t, j, &phi, &on_d, order) == shifted_side(t, j, &phi, &on_d, order))
}

/// `J(t + ε·1) = e^{ε/z} J(t)`.
pub fn check_string_shift(t: &TargetModel, j: &JFunction, order: u32) -> bool {
    let zero = Rational::from_integer(0.into());
    expand_in_t(t, j, &t.identity_class(), &zero, order) == shifted_side(t, j, &t.identity_class(), &zero, order)
}
