//! JSON ingestion and serialization of targets and bundles.
//!
//! Beyond the required fields a component may carry `dim`, `products`
//! (`[{left, right, result}]`) and `restriction` (coordinates of the pullback
//! of each untwisted basis class). Omitted products default to the truncated
//! polynomial ring when the basis is `1, p, …, p^n`; an omitted restriction maps
//! untwisted basis classes to the equally named basis class of the component.

use num_traits::{One, Zero};
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;

use super::{BasisElement, BundleModel, CohClass, Component, EigenPart, LineSummand, TargetModel};
use crate::exactalg::{rational_from_json, rational_string, Rational};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct TargetConfig {
    pub target: TargetModel,
    pub bundles: Vec<BundleModel>,
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn field<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, Error> {
    o.get(key).ok_or_else(|| schema(&format!("{path}.{key}"), "missing field"))
}

fn obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn arr<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn string(v: &Value, path: &str) -> Result<String, Error> {
    v.as_str().map(str::to_string).ok_or_else(|| schema(path, "expected a string"))
}

fn uint(v: &Value, path: &str) -> Result<u64, Error> {
    v.as_u64().ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn int(v: &Value, path: &str) -> Result<i64, Error> {
    v.as_i64().ok_or_else(|| schema(path, "expected an integer"))
}

fn boolean(v: &Value, path: &str) -> Result<bool, Error> {
    v.as_bool().ok_or_else(|| schema(path, "expected a boolean"))
}

fn rationals(v: &Value, path: &str) -> Result<Vec<Rational>, Error> {
    arr(v, path)?
        .iter()
        .enumerate()
        .map(|(k, x)| rational_from_json(x, &format!("{path}[{k}]")))
        .collect()
}

fn rat_json(r: &Rational) -> Value {
    Value::String(rational_string(r))
}

fn rats_json(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(rat_json).collect())
}

/// A component reference: an id string or an index.
fn component_ref(v: &Value, ids: &[String], path: &str) -> Result<usize, Error> {
    match v {
        Value::String(s) => ids.iter().position(|x| x == s).ok_or_else(|| schema(path, format!("unknown component {s:?}"))),
        Value::Number(_) => {
            let k = uint(v, path)? as usize;
            if k < ids.len() {
                Ok(k)
            } else {
                Err(schema(path, format!("component index {k} out of range")))
            }
        }
        _ => Err(schema(path, "expected a component id or index")),
    }
}

fn is_chain(basis: &[BasisElement]) -> bool {
    basis.iter().enumerate().all(|(k, b)| b.degree == 2 * k as u32)
}

fn default_products(basis: &[BasisElement]) -> Vec<Vec<Vec<Rational>>> {
    let n = basis.len();
    let chain = is_chain(basis);
    (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let mut v = vec![Rational::zero(); n];
                    if a == 0 {
                        v[b] = Rational::one();
                    } else if b == 0 {
                        v[a] = Rational::one();
                    } else if chain && a + b < n {
                        v[a + b] = Rational::one();
                    }
                    v
                })
                .collect()
        })
        .collect()
}

struct RawComponent {
    id: String,
    r: u32,
    age: Rational,
    involution: Value,
    dim: Option<u32>,
    basis: Vec<BasisElement>,
    pairing: Vec<Vec<Rational>>,
    products: Option<Vec<(usize, usize, Vec<Rational>)>>,
    restriction: Option<Vec<Vec<Rational>>>,
}

fn parse_component(v: &Value, path: &str) -> Result<RawComponent, Error> {
    let o = obj(v, path)?;
    let id = string(field(o, "id", path)?, &format!("{path}.id"))?;
    let r = uint(field(o, "r", path)?, &format!("{path}.r"))?;
    if r == 0 {
        return Err(schema(&format!("{path}.r"), "order must be positive"));
    }
    let age = rational_from_json(field(o, "age", path)?, &format!("{path}.age"))?;
    let involution = field(o, "involution", path)?.clone();
    let dim = match o.get("dim") {
        Some(d) => Some(uint(d, &format!("{path}.dim"))? as u32),
        None => None,
    };
    let mut basis = Vec::new();
    for (k, b) in arr(field(o, "basis", path)?, &format!("{path}.basis"))?.iter().enumerate() {
        let p = format!("{path}.basis[{k}]");
        let bo = obj(b, &p)?;
        let name = string(field(bo, "name", &p)?, &format!("{p}.name"))?;
        let degree = uint(field(bo, "degree", &p)?, &format!("{p}.degree"))? as u32;
        if degree % 2 == 1 {
            return Err(schema(&format!("{p}.degree"), "odd-degree classes are not supported"));
        }
        basis.push(BasisElement { name, degree });
    }
    let n = basis.len();
    let mut pairing = Vec::new();
    for (k, row) in arr(field(o, "pairing", path)?, &format!("{path}.pairing"))?.iter().enumerate() {
        let p = format!("{path}.pairing[{k}]");
        let row = rationals(row, &p)?;
        if row.len() != n {
            return Err(schema(&p, format!("expected {n} entries")));
        }
        pairing.push(row);
    }
    if pairing.len() != n {
        return Err(schema(&format!("{path}.pairing"), format!("expected {n} rows")));
    }
    let products = match o.get("products") {
        None => None,
        Some(list) => {
            let mut out = Vec::new();
            for (k, e) in arr(list, &format!("{path}.products"))?.iter().enumerate() {
                let p = format!("{path}.products[{k}]");
                let eo = obj(e, &p)?;
                let a = uint(field(eo, "left", &p)?, &format!("{p}.left"))? as usize;
                let b = uint(field(eo, "right", &p)?, &format!("{p}.right"))? as usize;
                let res = rationals(field(eo, "result", &p)?, &format!("{p}.result"))?;
                if a >= n || b >= n || res.len() != n {
                    return Err(schema(&p, "product entry out of range"));
                }
                out.push((a, b, res));
            }
            Some(out)
        }
    };
    let restriction = match o.get("restriction") {
        None => None,
        Some(rows) => Some(
            arr(rows, &format!("{path}.restriction"))?
                .iter()
                .enumerate()
                .map(|(k, row)| rationals(row, &format!("{path}.restriction[{k}]")))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    Ok(RawComponent { id, r: r as u32, age, involution, dim, basis, pairing, products, restriction })
}

fn parse_bundle(v: &Value, t: &TargetModel, path: &str) -> Result<BundleModel, Error> {
    let ids: Vec<String> = t.components.iter().map(|c| c.id.clone()).collect();
    let o = obj(v, path)?;
    let name = string(field(o, "name", path)?, &format!("{path}.name"))?;
    let pulled_back = boolean(field(o, "pulled_back", path)?, &format!("{path}.pulled_back"))?;
    let rank = int(field(o, "rank", path)?, &format!("{path}.rank"))?;
    let c1_pairing = int(field(o, "c1_pairing", path)?, &format!("{path}.c1_pairing"))?;
    let mut eigen = BTreeMap::new();
    for (k, e) in arr(field(o, "eigen", path)?, &format!("{path}.eigen"))?.iter().enumerate() {
        let p = format!("{path}.eigen[{k}]");
        let eo = obj(e, &p)?;
        let i = component_ref(field(eo, "component", &p)?, &ids, &format!("{p}.component"))?;
        let l = uint(field(eo, "l", &p)?, &format!("{p}.l"))? as u32;
        let er = int(field(eo, "rank", &p)?, &format!("{p}.rank"))?;
        let ch = rationals(field(eo, "ch", &p)?, &format!("{p}.ch"))?;
        if ch.len() != t.components[i].basis.len() {
            return Err(schema(&format!("{p}.ch"), "length must match the component basis"));
        }
        if eigen.insert((i, l), EigenPart { rank: er, ch: CohClass::from_rational_coords(i, &ch) }).is_some() {
            return Err(schema(&p, "duplicate eigenbundle"));
        }
    }
    let mut lines = Vec::new();
    if let Some(list) = o.get("lines") {
        for (k, e) in arr(list, &format!("{path}.lines"))?.iter().enumerate() {
            let p = format!("{path}.lines[{k}]");
            let eo = obj(e, &p)?;
            let lp = int(field(eo, "c1_pairing", &p)?, &format!("{p}.c1_pairing"))?;
            let mut c1 = CohClass::zero();
            for (j, part) in arr(field(eo, "c1", &p)?, &format!("{p}.c1"))?.iter().enumerate() {
                let pp = format!("{p}.c1[{j}]");
                let po = obj(part, &pp)?;
                let i = component_ref(field(po, "component", &pp)?, &ids, &format!("{pp}.component"))?;
                let cs = rationals(field(po, "coeffs", &pp)?, &format!("{pp}.coeffs"))?;
                if cs.len() != t.components[i].basis.len() {
                    return Err(schema(&format!("{pp}.coeffs"), "length must match the component basis"));
                }
                c1 = c1.add(&CohClass::from_rational_coords(i, &cs));
            }
            lines.push(LineSummand { c1_pairing: lp, c1 });
        }
    }
    let b = BundleModel { name, rank, pulled_back, c1_pairing, eigen, lines };
    b.validate(t)?;
    Ok(b)
}

/// Parses and validates a target config (with its bundles).
pub fn load_target(text: &str) -> Result<TargetConfig, Error> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema("$", format!("invalid JSON: {e}")))?;
    let o = obj(&v, "$")?;
    let name = string(field(o, "name", "$")?, "$.name")?;
    let dim = uint(field(o, "dim", "$")?, "$.dim")? as u32;
    let curve_rank = uint(field(o, "curve_rank", "$")?, "$.curve_rank")? as usize;
    let c1_tangent = match o.get("c1_tangent") {
        Some(x) => int(x, "$.c1_tangent")?,
        None => 0,
    };
    let raw: Vec<RawComponent> = arr(field(o, "components", "$")?, "$.components")?
        .iter()
        .enumerate()
        .map(|(k, c)| parse_component(c, &format!("$.components[{k}]")))
        .collect::<Result<_, _>>()?;
    if raw.is_empty() {
        return Err(schema("$.components", "at least one component is required"));
    }
    let ids: Vec<String> = raw.iter().map(|c| c.id.clone()).collect();
    let untwisted = raw[0].basis.clone();
    let mut components = Vec::new();
    for (k, c) in raw.into_iter().enumerate() {
        let path = format!("$.components[{k}]");
        let involution = component_ref(&c.involution, &ids, &format!("{path}.involution"))?;
        let n = c.basis.len();
        let dim_i = c.dim.unwrap_or_else(|| c.basis.iter().map(|b| b.degree / 2).max().unwrap_or(0));
        let products = match c.products {
            None => default_products(&c.basis),
            Some(list) => {
                let mut p = default_products(&c.basis);
                for a in 1..n {
                    for b in 1..n {
                        p[a][b] = vec![Rational::zero(); n];
                    }
                }
                for (a, b, res) in list {
                    p[a][b] = res;
                }
                p
            }
        };
        let restriction = match c.restriction {
            Some(rows) => {
                if rows.len() != untwisted.len() || rows.iter().any(|r| r.len() != n) {
                    return Err(schema(&format!("{path}.restriction"), "shape must be (untwisted basis) × (component basis)"));
                }
                rows
            }
            None => untwisted
                .iter()
                .map(|u| {
                    let mut v = vec![Rational::zero(); n];
                    if let Some(z) = c.basis.iter().position(|b| b.name == u.name) {
                        v[z] = Rational::one();
                    }
                    v
                })
                .collect(),
        };
        components.push(Component {
            id: c.id,
            r: c.r,
            age: c.age,
            involution,
            dim: dim_i,
            basis: c.basis,
            pairing: c.pairing,
            products,
            restriction,
        });
    }
    let degree_pairing = match o.get("degree_pairing") {
        Some(x) => rationals(x, "$.degree_pairing")?,
        None => Vec::new(),
    };
    let genus1_constants = match o.get("genus1_constants") {
        Some(x) => arr(x, "$.genus1_constants")?
            .iter()
            .enumerate()
            .map(|(k, s)| string(s, &format!("$.genus1_constants[{k}]")))
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    let jfunction_file = match o.get("jfunction_file") {
        Some(Value::Null) | None => None,
        Some(x) => Some(string(x, "$.jfunction_file")?),
    };
    let target = TargetModel { name, dim, curve_rank, c1_tangent, degree_pairing, components, genus1_constants, jfunction_file };
    target.validate()?;
    let bundles = match o.get("bundles") {
        Some(list) => arr(list, "$.bundles")?
            .iter()
            .enumerate()
            .map(|(k, b)| parse_bundle(b, &target, &format!("$.bundles[{k}]")))
            .collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    Ok(TargetConfig { target, bundles })
}

fn class_coords(c: &CohClass, i: usize, n: usize) -> Vec<Rational> {
    (0..n).map(|a| c.get(i, a).as_rational().expect("rational class")).collect()
}

pub fn bundle_to_json(t: &TargetModel, b: &BundleModel) -> Value {
    let eigen: Vec<Value> = b
        .eigen
        .iter()
        .map(|(&(i, l), e)| {
            json!({
                "component": t.components[i].id,
                "l": l,
                "rank": e.rank,
                "ch": rats_json(&class_coords(&e.ch, i, t.components[i].basis.len())),
            })
        })
        .collect();
    let lines: Vec<Value> = b
        .lines
        .iter()
        .map(|line| {
            let parts: Vec<Value> = line
                .c1
                .components()
                .into_iter()
                .map(|i| {
                    json!({
                        "component": t.components[i].id,
                        "coeffs": rats_json(&class_coords(&line.c1, i, t.components[i].basis.len())),
                    })
                })
                .collect();
            json!({ "c1_pairing": line.c1_pairing, "c1": parts })
        })
        .collect();
    json!({
        "name": b.name,
        "pulled_back": b.pulled_back,
        "rank": b.rank,
        "c1_pairing": b.c1_pairing,
        "eigen": eigen,
        "lines": lines,
    })
}

pub fn target_to_json(t: &TargetModel, bundles: &[BundleModel]) -> Value {
    let components: Vec<Value> = t
        .components
        .iter()
        .map(|c| {
            let n = c.basis.len();
            let mut products = Vec::new();
            for a in 1..n {
                for b in 1..n {
                    if c.products[a][b].iter().any(|x| !x.is_zero()) {
                        products.push(json!({ "left": a, "right": b, "result": rats_json(&c.products[a][b]) }));
                    }
                }
            }
            json!({
                "id": c.id,
                "r": c.r,
                "age": rat_json(&c.age),
                "involution": t.components[c.involution].id,
                "dim": c.dim,
                "basis": c.basis.iter().map(|b| json!({ "name": b.name, "degree": b.degree })).collect::<Vec<_>>(),
                "pairing": c.pairing.iter().map(|r| rats_json(r)).collect::<Vec<_>>(),
                "products": products,
                "restriction": c.restriction.iter().map(|r| rats_json(r)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut out = json!({
        "name": t.name,
        "dim": t.dim,
        "curve_rank": t.curve_rank,
        "c1_tangent": t.c1_tangent,
        "degree_pairing": rats_json(&t.degree_pairing),
        "components": components,
        "bundles": bundles.iter().map(|b| bundle_to_json(t, b)).collect::<Vec<_>>(),
        "genus1_constants": t.genus1_constants,
    });
    if let Some(f) = &t.jfunction_file {
        out["jfunction_file"] = Value::String(f.clone());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::builtin::*;
    use super::*;

    #[test]
    fn builtins_round_trip() {
        for t in [point(), bmu(3), projective(4), wps(&[1, 1, 2]).unwrap(), wps(&[1, 2, 3]).unwrap()] {
            let bundles = if t.curve_rank == 1 {
                vec![wps_line(&t, 1).unwrap(), trivial(&t, 2)]
            } else if t.components.len() > 1 {
                vec![bmu_character(&t, 1)]
            } else {
                vec![trivial(&t, 1)]
            };
            let text = serde_json::to_string(&target_to_json(&t, &bundles)).unwrap();
            let back = load_target(&text).unwrap();
            assert_eq!(back.target, t, "{}", t.name);
            assert_eq!(back.bundles, bundles, "{}", t.name);
        }
    }

    #[test]
    fn hand_written_point() {
        let text = r#"{"name":"point","dim":0,"curve_rank":0,
            "components":[{"id":"1","r":1,"age":"0","involution":"1",
                "basis":[{"name":"1","degree":0}],"pairing":[["1"]]}]}"#;
        assert_eq!(load_target(text).unwrap().target, point());
    }

    #[test]
    fn hand_written_wps112() {
        let text = r#"{"name":"WPS1,1,2","dim":2,"curve_rank":1,"c1_tangent":4,"degree_pairing":["0","1","0"],
            "components":[
              {"id":"0","r":1,"age":"0","involution":"0",
               "basis":[{"name":"1","degree":0},{"name":"p","degree":2},{"name":"p^2","degree":4}],
               "pairing":[["0","0","1/2"],["0","1/2","0"],["1/2","0","0"]]},
              {"id":"1/2","r":2,"age":"1","involution":"1/2",
               "basis":[{"name":"1","degree":0}],"pairing":[["1/2"]]}]}"#;
        assert_eq!(load_target(text).unwrap().target, wps(&[1, 1, 2]).unwrap());
    }

    #[test]
    fn age_reciprocity_violation() {
        let text = r#"{"name":"bad","dim":0,"curve_rank":0,
            "components":[{"id":"1","r":1,"age":"0","involution":"1","basis":[{"name":"1","degree":0}],"pairing":[["1/2"]]},
              {"id":"g","r":2,"age":"1/2","involution":"g","basis":[{"name":"1","degree":0}],"pairing":[["1/2"]]}]}"#;
        assert_eq!(load_target(text).unwrap_err(), Error::InvariantViolation("age reciprocity".into()));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let text = r#"{"name":"x","dim":0,"curve_rank":0,"components":[{"id":"1","r":1,"age":"zero","involution":0,
            "basis":[{"name":"1","degree":0}],"pairing":[["1"]]}]}"#;
        match load_target(text).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "$.components[0].age"),
            e => panic!("{e}"),
        }
        let odd = r#"{"name":"x","dim":1,"curve_rank":0,"components":[{"id":"1","r":1,"age":"0","involution":0,
            "basis":[{"name":"1","degree":0},{"name":"a","degree":1}],"pairing":[["1","0"],["0","1"]]}]}"#;
        assert!(matches!(load_target(odd).unwrap_err(), Error::Schema { .. }));
    }
}
