//! J-functions on the small parameter space, hypergeometric modification,
//! mirror-map extraction, enumerative invariants and universal equations.
//!
//! A J-function is stored in the factored form
//! `J(t, z) = e^{t/z} Σ_d Q^d e^{⟨d, t⟩} C_d(z)` where each `C_d` is a finite
//! Laurent polynomial in z with class coefficients; the exponential prefactors
//! are never expanded.

mod correlators;
mod divisor;
mod invariants;
mod lefschetz;

pub use correlators::{
    check_universal_equation, point_correlator_table, point_correlators, CorrelatorKey, CorrelatorTable, EquationKind,
    EquationReport, Provenance,
};
pub use divisor::{check_divisor_shift, check_string_shift, expand_in_t};
pub use invariants::{extract_invariants, multiple_cover_inversion, InvariantRow, InvariantTable, InvariantMode};
pub use lefschetz::{hypergeometric_modification, mirror_map, small_expansion, MirrorMap, SmallExpansion};

use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::exactalg::{rational, scalar_from_json, scalar_to_json, Rational, Scalar};
use crate::giventalspace::GiventalElement;
use crate::orbtarget::{CohClass, TargetModel};
use crate::Error;

/// Laurent polynomial in z with class coefficients.
pub type ZPoly = BTreeMap<i32, CohClass>;

pub fn zpoly_add(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = a.clone();
    for (n, c) in b {
        let e = out.entry(*n).or_default();
        *e = e.add(c);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn zpoly_mul(t: &TargetModel, a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = ZPoly::new();
    for (m, x) in a {
        for (n, y) in b {
            let p = t.mul(x, y);
            if !p.is_zero() {
                let e = out.entry(m + n).or_default();
                *e = e.add(&p);
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

pub fn zpoly_scale(a: &ZPoly, c: &Scalar) -> ZPoly {
    let mut out: ZPoly = a.iter().map(|(n, x)| (*n, x.scale(c))).collect();
    out.retain(|_, c| !c.is_zero());
    out
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct JFunction {
    pub dmax: u32,
    layers: BTreeMap<u32, ZPoly>,
}

/// The output of a hypergeometric modification has the same shape.
pub type IFunction = JFunction;

impl JFunction {
    pub fn new(dmax: u32) -> Self {
        JFunction { dmax, layers: BTreeMap::new() }
    }

    /// `J = z·1` (no quantum corrections).
    pub fn classical(t: &TargetModel, dmax: u32) -> Self {
        let mut j = Self::new(dmax);
        j.add(0, 1, &t.one());
        j
    }

    pub fn add(&mut self, d: u32, zpow: i32, c: &CohClass) {
        if d > self.dmax || c.is_zero() {
            return;
        }
        let layer = self.layers.entry(d).or_default();
        let e = layer.entry(zpow).or_default();
        *e = e.add(c);
        if e.is_zero() {
            layer.remove(&zpow);
        }
        if layer.is_empty() {
            self.layers.remove(&d);
        }
    }

    pub fn set_layer(&mut self, d: u32, p: ZPoly) {
        if d > self.dmax {
            return;
        }
        let p: ZPoly = p.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if p.is_empty() {
            self.layers.remove(&d);
        } else {
            self.layers.insert(d, p);
        }
    }

    pub fn layer(&self, d: u32) -> ZPoly {
        self.layers.get(&d).cloned().unwrap_or_default()
    }

    pub fn coefficient(&self, d: u32, zpow: i32) -> CohClass {
        self.layers.get(&d).and_then(|l| l.get(&zpow)).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, i32, &CohClass)> {
        self.layers.iter().flat_map(|(d, l)| l.iter().map(move |(n, c)| (*d, *n, c)))
    }

    pub fn max_zpow(&self) -> Option<i32> {
        self.iter().map(|(_, n, _)| n).max()
    }

    pub fn try_map_scalars(&self, f: impl Fn(u32, i32, usize, &Scalar) -> Result<Scalar, Error>) -> Result<Self, Error> {
        let mut out = Self::new(self.dmax);
        for (d, n, c) in self.iter() {
            let mut nc = CohClass::zero();
            for (i, a, x) in c.iter() {
                nc.add_term(i, a, f(d, n, i, x)?);
            }
            out.add(d, n, &nc);
        }
        Ok(out)
    }

    /// The value at `t = 0` as an element of Givental's space.
    pub fn to_element(&self) -> GiventalElement {
        let zmin = self.iter().map(|(_, n, _)| n).min().unwrap_or(0);
        let zmax = self.max_zpow().unwrap_or(0);
        let mut e = GiventalElement::new(self.dmax, zmin, zmax);
        for (d, n, c) in self.iter() {
            e.add_class(n, d, c);
        }
        e
    }

    /// `J ≡ z + t (mod Q)` with `C_0 = z·1` and only negative z-powers for `d ≥ 1`.
    pub fn check_normal_form(&self, t: &TargetModel) -> Result<(), Error> {
        let mut head = ZPoly::new();
        head.insert(1, t.one());
        if self.layer(0) != head {
            return Err(Error::NormalFormViolation("the degree-0 layer must be exactly z·1".into()));
        }
        for (d, n, _) in self.iter() {
            if d > 0 && n >= 0 {
                return Err(Error::NormalFormViolation(format!("degree {d} has a z^{n} term")));
            }
        }
        Ok(())
    }

    /// Every term satisfies `zpow + orbdeg(class)/2 + ⟨c_1(T), d⟩ = 1`.
    pub fn check_homogeneity(&self, t: &TargetModel) -> Result<(), Error> {
        for (d, n, c) in self.iter() {
            for (i, a, _) in c.iter() {
                let total = Rational::from_integer(n.into())
                    + t.orbdeg(i, a) * rational(1, 2)
                    + Rational::from_integer((t.c1_tangent * d as i64).into());
                if total != Rational::from_integer(1.into()) {
                    return Err(Error::NormalFormViolation(format!(
                        "entry (d={d}, z^{n}, component {}, basis {}) violates the dimension constraint",
                        t.components[i].id, t.components[i].basis[a].name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Rows `{d, zpow, component, basis, coeff}` in canonical order.
    pub fn to_rows(&self, t: &TargetModel) -> Vec<Value> {
        let mut rows = Vec::new();
        for (d, n, c) in self.iter() {
            for (i, a, x) in c.iter() {
                rows.push(json!({
                    "d": d,
                    "zpow": n,
                    "component": t.components[i].id,
                    "basis": t.components[i].basis[a].name,
                    "coeff": scalar_to_json(x),
                }));
            }
        }
        rows
    }
}

/// Closed form for `P^n`: `C_d = z / ∏_{k=1}^{d} (p + kz)^{n+1}`.
pub fn j_closed_form_pn(t: &TargetModel, dmax: u32) -> Result<JFunction, Error> {
    let n = t.dim;
    if t.components.len() != 1 || t.components[0].basis.len() != n as usize + 1 || t.curve_rank != 1 {
        return Err(Error::UnsupportedTarget(format!("{} is not a projective space", t.name)));
    }
    let mut j = JFunction::classical(t, dmax);
    let mut acc: ZPoly = BTreeMap::from([(1, t.one())]);
    for d in 1..=dmax {
        // 1/(p + dz) = Σ_j (−1)^j p^j / (d^{j+1} z^{j+1})
        let mut inv = ZPoly::new();
        for e in 0..=n {
            let mut c = Rational::from_integer((d as i64).pow(e + 1).into()).recip();
            if e % 2 == 1 {
                c = -c;
            }
            inv.insert(-(e as i32) - 1, CohClass::term(0, e as usize, Scalar::from_rational(c)));
        }
        for _ in 0..=n {
            acc = zpoly_mul(t, &acc, &inv);
        }
        j.set_layer(d, acc.clone());
    }
    Ok(j)
}

fn lookup_component(t: &TargetModel, v: &Value, path: &str) -> Result<usize, Error> {
    match v {
        Value::String(s) => t
            .components
            .iter()
            .position(|c| &c.id == s)
            .ok_or_else(|| Error::Schema { path: path.into(), message: format!("unknown component {s:?}") }),
        Value::Number(n) => n
            .as_u64()
            .map(|k| k as usize)
            .filter(|&k| k < t.components.len())
            .ok_or_else(|| Error::Schema { path: path.into(), message: "component index out of range".into() }),
        _ => Err(Error::Schema { path: path.into(), message: "expected a component id or index".into() }),
    }
}

fn lookup_basis(t: &TargetModel, i: usize, v: &Value, path: &str) -> Result<usize, Error> {
    let basis = &t.components[i].basis;
    match v {
        Value::String(s) => basis
            .iter()
            .position(|b| &b.name == s)
            .ok_or_else(|| Error::Schema { path: path.into(), message: format!("unknown basis class {s:?}") }),
        Value::Number(n) => n
            .as_u64()
            .map(|k| k as usize)
            .filter(|&k| k < basis.len())
            .ok_or_else(|| Error::Schema { path: path.into(), message: "basis index out of range".into() }),
        _ => Err(Error::Schema { path: path.into(), message: "expected a basis name or index".into() }),
    }
}

/// Parses J-function rows (a JSON array, or `{dmax, rows}`) and validates them.
pub fn load_j_function(t: &TargetModel, text: &str) -> Result<JFunction, Error> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| Error::Schema { path: "$".into(), message: format!("invalid JSON: {e}") })?;
    let (rows, declared, base) = match &v {
        Value::Array(a) => (a, None, "$".to_string()),
        Value::Object(o) => {
            let rows = o
                .get("rows")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Schema { path: "$.rows".into(), message: "expected an array".into() })?;
            let dmax = match o.get("dmax") {
                Some(x) => Some(x.as_u64().ok_or_else(|| Error::Schema {
                    path: "$.dmax".into(),
                    message: "expected a nonnegative integer".into(),
                })? as u32),
                None => None,
            };
            (rows, dmax, "$.rows".to_string())
        }
        _ => return Err(Error::Schema { path: "$".into(), message: "expected rows".into() }),
    };
    let mut parsed = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        let p = format!("{base}[{k}]");
        let o = row.as_object().ok_or_else(|| Error::Schema { path: p.clone(), message: "expected an object".into() })?;
        let get = |key: &str| {
            o.get(key).ok_or_else(|| Error::Schema { path: format!("{p}.{key}"), message: "missing field".into() })
        };
        let d = get("d")?
            .as_u64()
            .ok_or_else(|| Error::Schema { path: format!("{p}.d"), message: "expected a nonnegative integer".into() })?
            as u32;
        let zpow = get("zpow")?
            .as_i64()
            .ok_or_else(|| Error::Schema { path: format!("{p}.zpow"), message: "expected an integer".into() })?
            as i32;
        let i = lookup_component(t, get("component")?, &format!("{p}.component"))?;
        let a = lookup_basis(t, i, get("basis")?, &format!("{p}.basis"))?;
        let c = scalar_from_json(get("coeff")?, &format!("{p}.coeff"))?;
        parsed.push((d, zpow, i, a, c));
    }
    let dmax = declared.unwrap_or_else(|| parsed.iter().map(|r| r.0).max().unwrap_or(0));
    let mut j = JFunction::new(dmax);
    for (d, zpow, i, a, c) in parsed {
        if d > dmax {
            return Err(Error::Schema { path: "$.dmax".into(), message: format!("row degree {d} exceeds dmax {dmax}") });
        }
        j.add(d, zpow, &CohClass::term(i, a, c));
    }
    j.check_normal_form(t)?;
    j.check_homogeneity(t)?;
    Ok(j)
}

/// Coefficient-wise `λ = 0`; errors name the offending entry.
pub fn nonequivariant_limit(t: &TargetModel, j: &JFunction) -> Result<JFunction, Error> {
    j.try_map_scalars(|d, n, i, x| {
        x.nonequiv_limit().map_err(|e| match e {
            Error::PoleAtZero(m) => {
                Error::PoleAtZero(format!("{m} at (d={d}, z^{n}, component {})", t.components[i].id))
            }
            Error::LogObstruction(m) => {
                Error::LogObstruction(format!("{m} at (d={d}, z^{n}, component {})", t.components[i].id))
            }
            e => e,
        })
    })
}

/// Whether every coefficient is a plain rational.
pub fn is_rational(j: &JFunction) -> bool {
    j.iter().all(|(_, _, c)| c.iter().all(|(_, _, x)| x.as_rational().is_some()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbtarget::builtin::*;

    #[test]
    fn p4_closed_form() {
        let t = projective(4);
        let j = j_closed_form_pn(&t, 2).unwrap();
        assert_eq!(j.layer(0), BTreeMap::from([(1, t.one())]));
        j.check_normal_form(&t).unwrap();
        j.check_homogeneity(&t).unwrap();
        // 1/(p+z)^5 = z^{-5}(1 − 5p/z + 15p²/z² − 35p³/z³ + 70p⁴/z⁴)
        let c = j.coefficient(1, -8);
        assert_eq!(c.get(0, 4), Scalar::from_int(70));
        assert_eq!(j.coefficient(1, -4).get(0, 0), Scalar::one());
    }

    #[test]
    fn load_round_trip_and_errors() {
        let t = projective(4);
        let j = j_closed_form_pn(&t, 2).unwrap();
        let text = serde_json::to_string(&json!({ "dmax": 2, "rows": j.to_rows(&t) })).unwrap();
        assert_eq!(load_j_function(&t, &text).unwrap(), j);
        let empty = serde_json::to_string(&JFunction::classical(&t, 3).to_rows(&t)).unwrap();
        assert_eq!(load_j_function(&t, &empty).unwrap(), JFunction::classical(&t, 0));
        assert!(matches!(load_j_function(&t, "[]"), Err(Error::NormalFormViolation(_))));
        let bad = r#"[{"d":0,"zpow":1,"component":"0","basis":"1","coeff":"1"},
                      {"d":1,"zpow":-3,"component":"0","basis":"p","coeff":"2"}]"#;
        assert!(matches!(load_j_function(&t, bad), Err(Error::NormalFormViolation(_))));
    }
}
