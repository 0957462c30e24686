//! Tables of genus-zero descendant correlators and the universal equations.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::exactalg::{rational, scalar_from_json, scalar_to_json, Matrix, Rational, Scalar};
use crate::orbtarget::TargetModel;
use crate::Error;

/// `⟨τ_{k_1}(φ_{a_1}) ⋯ τ_{k_n}(φ_{a_n})⟩_{0,n,d}`; insertions are (global basis index, ψ-power), sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CorrelatorKey {
    pub d: u32,
    pub insertions: Vec<(usize, u32)>,
}

impl CorrelatorKey {
    pub fn new(d: u32, mut insertions: Vec<(usize, u32)>) -> Self {
        insertions.sort();
        CorrelatorKey { d, insertions }
    }

    pub fn n(&self) -> usize {
        self.insertions.len()
    }

    pub fn display(&self, t: &TargetModel) -> String {
        let parts: Vec<String> = self
            .insertions
            .iter()
            .map(|&(g, k)| {
                let (i, a) = t.locate(g);
                format!("tau{k}({})", t.components[i].basis[a].name)
            })
            .collect();
        format!("<{}>_(n={},d={})", parts.join(" "), self.n(), self.d)
    }

    fn without(&self, pos: usize) -> Vec<(usize, u32)> {
        let mut v = self.insertions.clone();
        v.remove(pos);
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Computed,
    Ingested,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrelatorTable {
    pub nmax: usize,
    pub dmax: u32,
    pub entries: BTreeMap<CorrelatorKey, (Scalar, Provenance)>,
}

fn factorial(n: u64) -> Rational {
    (1..=n).fold(Rational::from_integer(1.into()), |acc, k| acc * Rational::from_integer(k.into()))
}

/// `⟨τ_{k_1} ⋯ τ_{k_n}⟩_{0,n}` on a point: `(n−3)!/∏ k_i!` when `Σ k_i = n − 3`.
pub fn point_correlators(ks: &[u32]) -> Result<Rational, Error> {
    let n = ks.len();
    let total: u64 = ks.iter().map(|&k| k as u64).sum();
    if n < 3 || total != n as u64 - 3 {
        return Err(Error::DimensionMismatch(format!(
            "Σk = {total} but a {n}-point genus-zero correlator needs Σk = n − 3"
        )));
    }
    Ok(ks.iter().fold(factorial(total), |acc, &k| acc / factorial(k as u64)))
}

fn partitions(total: u32, parts: usize, max: u32, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>) {
    if cur.len() == parts {
        if total == 0 {
            out.push(cur.clone());
        }
        return;
    }
    for k in (0..=total.min(max)).rev() {
        cur.push(k);
        partitions(total - k, parts, k, out, cur);
        cur.pop();
    }
}

/// Every nonzero correlator on a point with `3 ≤ n ≤ nmax`.
pub fn point_correlator_table(nmax: usize) -> CorrelatorTable {
    let mut entries = BTreeMap::new();
    for n in 3..=nmax {
        let mut ps = Vec::new();
        partitions(n as u32 - 3, n, n as u32, &mut ps, &mut Vec::new());
        for p in ps {
            let v = point_correlators(&p).expect("dimension holds by construction");
            let key = CorrelatorKey::new(0, p.iter().map(|&k| (0, k)).collect());
            entries.insert(key, (Scalar::from_rational(v), Provenance::Computed));
        }
    }
    CorrelatorTable { nmax, dmax: 0, entries }
}

impl CorrelatorTable {
    fn dimension_ok(&self, t: &TargetModel, key: &CorrelatorKey) -> bool {
        let lhs: Rational = key
            .insertions
            .iter()
            .map(|&(g, k)| {
                let (i, a) = t.locate(g);
                t.orbdeg(i, a) * rational(1, 2) + Rational::from_integer(k.into())
            })
            .sum();
        let rhs = Rational::from_integer((t.dim as i64 - 3 + key.n() as i64 + t.c1_tangent * key.d as i64).into());
        lhs == rhs
    }

    /// The value if the table determines it; unstable and dimension-violating
    /// correlators are zero.
    pub fn value(&self, t: &TargetModel, key: &CorrelatorKey) -> Option<Scalar> {
        if key.d == 0 && key.n() < 3 || key.d > 0 && t.curve_rank == 0 || !self.dimension_ok(t, key) {
            return Some(Scalar::zero());
        }
        self.entries.get(key).map(|(v, _)| v.clone())
    }

    pub fn set(&mut self, key: CorrelatorKey, v: Scalar, p: Provenance) {
        self.nmax = self.nmax.max(key.n());
        self.dmax = self.dmax.max(key.d);
        self.entries.insert(key, (v, p));
    }

    pub fn to_json(&self, t: &TargetModel) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|(k, (v, _))| {
                let ins: Vec<Value> = k
                    .insertions
                    .iter()
                    .map(|&(g, psi)| {
                        let (i, a) = t.locate(g);
                        json!([t.components[i].id, t.components[i].basis[a].name, psi])
                    })
                    .collect();
                json!({ "d": k.d, "insertions": ins, "value": scalar_to_json(v) })
            })
            .collect();
        json!({ "target": t.name, "nmax": self.nmax, "dmax": self.dmax, "entries": entries })
    }

    pub fn from_json(t: &TargetModel, text: &str) -> Result<CorrelatorTable, Error> {
        let schema = |path: String, message: &str| Error::Schema { path, message: message.into() };
        let v: Value = serde_json::from_str(text).map_err(|e| schema("$".into(), &format!("invalid JSON: {e}")))?;
        let rows = v.get("entries").and_then(Value::as_array).ok_or_else(|| schema("$.entries".into(), "expected an array"))?;
        let mut table = CorrelatorTable { nmax: 0, dmax: 0, entries: BTreeMap::new() };
        if let Some(n) = v.get("nmax").and_then(Value::as_u64) {
            table.nmax = n as usize;
        }
        for (r, row) in rows.iter().enumerate() {
            let p = format!("$.entries[{r}]");
            let d = row.get("d").and_then(Value::as_u64).ok_or_else(|| schema(format!("{p}.d"), "expected an integer"))? as u32;
            let ins = row
                .get("insertions")
                .and_then(Value::as_array)
                .ok_or_else(|| schema(format!("{p}.insertions"), "expected an array"))?;
            let mut list = Vec::new();
            for (q, x) in ins.iter().enumerate() {
                let ip = format!("{p}.insertions[{q}]");
                let a = x.as_array().filter(|a| a.len() == 3).ok_or_else(|| schema(ip.clone(), "expected [component, basis, psi]"))?;
                let i = t
                    .components
                    .iter()
                    .position(|c| Some(c.id.as_str()) == a[0].as_str())
                    .ok_or_else(|| schema(format!("{ip}[0]"), "unknown component"))?;
                let b = t.components[i]
                    .basis
                    .iter()
                    .position(|c| Some(c.name.as_str()) == a[1].as_str())
                    .ok_or_else(|| schema(format!("{ip}[1]"), "unknown basis class"))?;
                let psi = a[2].as_u64().ok_or_else(|| schema(format!("{ip}[2]"), "expected a ψ-power"))? as u32;
                list.push((t.global_index(i, b), psi));
            }
            let value = scalar_from_json(row.get("value").unwrap_or(&Value::Null), &format!("{p}.value"))?;
            table.set(CorrelatorKey::new(d, list), value, Provenance::Ingested);
        }
        Ok(table)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationKind {
    String,
    Dilaton,
    Divisor,
    Trr,
}

impl std::str::FromStr for EquationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "string" => Ok(EquationKind::String),
            "dilaton" => Ok(EquationKind::Dilaton),
            "divisor" => Ok(EquationKind::Divisor),
            "trr" | "TRR" => Ok(EquationKind::Trr),
            _ => Err(Error::InvalidParams(format!("unknown equation {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquationReport {
    pub kind: EquationKind,
    pub instances: usize,
    /// Nonzero residuals `lhs − rhs`, keyed by the left-hand correlator.
    pub failures: Vec<(CorrelatorKey, Scalar)>,
}

impl EquationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Lookup<'a> {
    t: &'a TargetModel,
    table: &'a CorrelatorTable,
    missing: Vec<String>,
}

impl Lookup<'_> {
    fn get(&mut self, d: u32, ins: Vec<(usize, u32)>) -> Scalar {
        let key = CorrelatorKey::new(d, ins);
        match self.table.value(self.t, &key) {
            Some(v) => v,
            None => {
                let s = key.display(self.t);
                if !self.missing.contains(&s) {
                    self.missing.push(s);
                }
                Scalar::zero()
            }
        }
    }
}

fn stable(n: usize, d: u32) -> bool {
    n >= 3 || d > 0 && n >= 1
}

/// Checks one of string, dilaton, divisor or TRR against every applicable entry.
pub fn check_universal_equation(
    t: &TargetModel,
    table: &CorrelatorTable,
    kind: EquationKind,
) -> Result<EquationReport, Error> {
    let gram_inv = t
        .gram()
        .inverse()
        .ok_or_else(|| Error::InvariantViolation("pairing nondegenerate".into()))?;
    let mut look = Lookup { t, table, missing: Vec::new() };
    let mut instances = 0;
    let mut failures = Vec::new();
    for (key, (lhs, _)) in &table.entries {
        let Some(rhs) = rhs_of(t, &gram_inv, &mut look, kind, key) else { continue };
        instances += 1;
        let r = lhs - &rhs;
        if !r.is_zero() {
            failures.push((key.clone(), r));
        }
    }
    failures.sort_by_key(|a| (a.0.n(), a.0.d));
    if !look.missing.is_empty() {
        return Err(Error::InsufficientTable(look.missing));
    }
    Ok(EquationReport { kind, instances, failures })
}

fn rhs_of(
    t: &TargetModel,
    gram_inv: &Matrix,
    look: &mut Lookup,
    kind: EquationKind,
    key: &CorrelatorKey,
) -> Option<Scalar> {
    let d = key.d;
    let n = key.n();
    match kind {
        EquationKind::String | EquationKind::Dilaton => {
            let psi = if kind == EquationKind::String { 0 } else { 1 };
            let pos = key.insertions.iter().position(|&x| x == (0, psi))?;
            let rest = key.without(pos);
            if !stable(rest.len(), d) {
                return None;
            }
            if kind == EquationKind::Dilaton {
                let c = Scalar::from_int(rest.len() as i64 - 2);
                return Some(&look.get(d, rest) * &c);
            }
            let mut sum = Scalar::zero();
            for j in 0..rest.len() {
                if rest[j].1 > 0 {
                    let mut v = rest.clone();
                    v[j].1 -= 1;
                    sum += &look.get(d, v);
                }
            }
            Some(sum)
        }
        EquationKind::Divisor => {
            let pos = key.insertions.iter().position(|&(g, k)| {
                let (i, a) = t.locate(g);
                k == 0 && i == 0 && t.basis_degree(i, a) == 2
            })?;
            let (_, a) = t.locate(key.insertions[pos].0);
            let rest = key.without(pos);
            if !stable(rest.len(), d) {
                return None;
            }
            let pairing = t.degree_pairing.get(a).cloned().unwrap_or_default() * Rational::from_integer(d.into());
            let mut sum = &look.get(d, rest.clone()) * &Scalar::from_rational(pairing);
            let div = crate::orbtarget::CohClass::basis(0, a);
            for j in 0..rest.len() {
                if rest[j].1 == 0 {
                    continue;
                }
                let (i, b) = t.locate(rest[j].0);
                let prod = t.mul(&crate::orbtarget::CohClass::basis(i, b), &div);
                for (pi, pa, c) in prod.iter() {
                    let mut v = rest.clone();
                    v[j] = (t.global_index(pi, pa), rest[j].1 - 1);
                    sum += &(&look.get(d, v) * c);
                }
            }
            Some(sum)
        }
        EquationKind::Trr => {
            if n < 3 {
                return None;
            }
            let p1 = key.insertions.iter().position(|&(_, k)| k > 0)?;
            let (a1, k1) = key.insertions[p1];
            let others: Vec<usize> = (0..n).filter(|&j| j != p1).collect();
            let (p2, p3) = (others[0], others[1]);
            let rest: Vec<(usize, u32)> = others[2..].iter().map(|&j| key.insertions[j]).collect();
            let dim = t.total_dim();
            let mut sum = Scalar::zero();
            for mask in 0u64..(1u64 << rest.len()) {
                let mut left = vec![(a1, k1 - 1)];
                let mut right = vec![key.insertions[p2], key.insertions[p3]];
                for (b, x) in rest.iter().enumerate() {
                    if mask >> b & 1 == 1 {
                        left.push(*x);
                    } else {
                        right.push(*x);
                    }
                }
                for d1 in 0..=d {
                    for alpha in 0..dim {
                        for beta in 0..dim {
                            let g = gram_inv.get(alpha, beta);
                            if g.is_zero() {
                                continue;
                            }
                            let mut l = left.clone();
                            l.push((alpha, 0));
                            let mut r = right.clone();
                            r.push((beta, 0));
                            let lv = look.get(d1, l);
                            if lv.is_zero() {
                                continue;
                            }
                            let rv = look.get(d - d1, r);
                            sum += &(&(&lv * g) * &rv);
                        }
                    }
                }
            }
            Some(sum)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbtarget::builtin::point;

    #[test]
    fn point_values() {
        assert_eq!(point_correlators(&[0, 0, 0]).unwrap(), rational(1, 1));
        assert_eq!(point_correlators(&[2, 1, 0, 0, 0, 0]).unwrap(), rational(3, 1));
        assert_eq!(point_correlators(&[1, 1, 1, 0, 0, 0]).unwrap(), rational(6, 1));
        assert!(matches!(point_correlators(&[1, 0, 0]), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn point_table_satisfies_everything() {
        let t = point();
        let table = point_correlator_table(7);
        for kind in [EquationKind::String, EquationKind::Dilaton, EquationKind::Trr] {
            let r = check_universal_equation(&t, &table, kind).unwrap();
            assert!(r.passed(), "{kind:?}: {:?}", r.failures);
            assert!(r.instances > 0);
        }
        let div = check_universal_equation(&t, &table, EquationKind::Divisor).unwrap();
        assert_eq!(div.instances, 0);
    }

    #[test]
    fn corrupted_entry_is_pinpointed() {
        let t = point();
        let mut table = point_correlator_table(5);
        let key = CorrelatorKey::new(0, vec![(0, 1), (0, 0), (0, 0), (0, 0)]);
        table.set(key.clone(), Scalar::from_int(2), Provenance::Ingested);
        let r = check_universal_equation(&t, &table, EquationKind::String).unwrap();
        assert_eq!(r.failures[0], (key, Scalar::one()));
    }

    #[test]
    fn missing_entries_are_reported() {
        let t = point();
        let mut table = point_correlator_table(5);
        table.entries.remove(&CorrelatorKey::new(0, vec![(0, 0); 3]));
        assert!(matches!(
            check_universal_equation(&t, &table, EquationKind::String),
            Err(Error::InsufficientTable(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let t = point();
        let table = point_correlator_table(5);
        let back = CorrelatorTable::from_json(&t, &table.to_json(&t).to_string()).unwrap();
        assert_eq!(back.entries.keys().collect::<Vec<_>>(), table.entries.keys().collect::<Vec<_>>());
    }
}
