use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use orbiqrr_core::bernoulli::bernoulli_value;
use orbiqrr_core::exactalg::{parse_rational, rational_string, scalar_from_json, scalar_to_json};
use orbiqrr_core::fockquant::{
    commutator_cocycle, cocycle_formula, darboux_hamiltonian, describe, quantize_formula, quantize_monomial,
    string_residual, FockOperator, Shape,
};
use orbiqrr_core::genus0::{
    check_divisor_shift, check_string_shift, check_universal_equation, extract_invariants,
    hypergeometric_modification, j_closed_form_pn, load_j_function, mirror_map, nonequivariant_limit,
    point_correlator_table, CorrelatorTable, EquationKind, InvariantMode, JFunction,
};
use orbiqrr_core::loopops::{check_symplectomorphism, delta_inverse, delta_operator, euler_s_values};
use orbiqrr_core::orbtarget::builtin::{bundle_by_name, target_by_name};
use orbiqrr_core::orbtarget::{bundle_to_json, load_target, target_to_json};
use orbiqrr_core::serre::{
    check_dual_am_identity, check_serre_cone, dual_bundle, dual_s_values, serre_m_operator,
};
use orbiqrr_core::{BundleModel, CohClass, Error, Matrix, Rational, SValues, Scalar, TargetModel, TruncSeries};

use crate::cache::Cache;
use crate::render::{Report, Table};

/// Failure surfaced to the user as `{"error": {name, module, message}}`.
#[derive(Debug)]
pub struct CliError {
    pub name: String,
    pub module: String,
    pub message: String,
    /// A report to print alongside the error, for failed checks.
    pub report: Option<Box<Report>>,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError { name: e.name().into(), module: e.module().into(), message: e.to_string(), report: None }
    }
}

impl CliError {
    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError { name: "IoError".into(), module: "cli".into(), message: format!("{}: {e}", path.display()), report: None }
    }

    fn check_failed(what: &str, report: Report) -> Self {
        let e = Error::InvariantViolation(format!("{what} check failed"));
        CliError { report: Some(Box::new(report)), ..e.into() }
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "name": self.name, "module": self.module, "message": self.message } })
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub struct Loaded {
    pub target: TargetModel,
    pub bundles: Vec<BundleModel>,
    /// Directory of the config file, for relative paths inside it.
    pub base: Option<PathBuf>,
}

/// A config file path, or a built-in name such as `P4` or `Bmu3`.
pub fn resolve_target(spec: &str) -> CliResult<Loaded> {
    let p = Path::new(spec);
    if p.is_file() {
        let cfg = load_target(&read(p)?)?;
        return Ok(Loaded { target: cfg.target, bundles: cfg.bundles, base: p.parent().map(Path::to_path_buf) });
    }
    Ok(Loaded { target: target_by_name(spec)?, bundles: Vec::new(), base: None })
}

pub fn resolve_bundle(l: &Loaded, name: &str) -> CliResult<BundleModel> {
    if let Some(b) = l.bundles.iter().find(|b| b.name == name) {
        return Ok(b.clone());
    }
    Ok(bundle_by_name(&l.target, name)?)
}

fn rat(s: &str) -> CliResult<Rational> {
    parse_rational(s.trim())
        .map_err(|_| Error::InvalidParams(format!("not a rational number: {s:?}")).into())
}

fn rats(list: &str) -> CliResult<Vec<Rational>> {
    list.split(',').filter(|x| !x.trim().is_empty()).map(rat).collect()
}

fn rational_json(r: &Rational) -> Value {
    Value::String(rational_string(r))
}

/// `--euler` or an explicit `--s s0,s1,…` list.
pub fn s_values(euler: bool, list: Option<&str>, kmax: usize) -> CliResult<(SValues, Value)> {
    match (euler, list) {
        (true, None) => Ok((euler_s_values(kmax, true), json!({ "euler": true, "kmax": kmax }))),
        (false, Some(l)) => {
            let r = rats(l)?;
            let desc = json!({ "s": r.iter().map(rational_json).collect::<Vec<_>>() });
            Ok((SValues::from_list(r.into_iter().map(Scalar::from_rational).collect()), desc))
        }
        _ => Err(Error::InvalidParams("give exactly one of --euler and --s".into()).into()),
    }
}

fn series_rows(s: &TruncSeries) -> Vec<Value> {
    (0..=s.dmax())
        .filter(|&d| !s.q(d).is_zero())
        .map(|d| json!({ "d": d, "coeff": scalar_to_json(&s.q(d)) }))
        .collect()
}

/// Table cell text; structured scalars are shown in their display form.
fn leaf(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Object(_) => scalar_from_json(v, "").map(|s| s.to_string()).unwrap_or_else(|_| v.to_string()),
        other => other.to_string(),
    }
}

fn cached(kind: &str, inputs: Value, compute: impl FnOnce() -> CliResult<Value>) -> CliResult<Value> {
    match Cache::from_env() {
        None => compute(),
        Some(c) => {
            let (status, v) = c.get_or_compute(kind, &inputs, compute)?;
            eprintln!("orbiqrr: cache {} ({kind})", status.label());
            Ok(v)
        }
    }
}

pub fn target_validate(file: &Path) -> CliResult<Report> {
    let cfg = load_target(&read(file)?)?;
    let t = &cfg.target;
    let v = json!({
        "valid": true,
        "name": t.name,
        "components": t.components.len(),
        "total_dim": t.total_dim(),
        "bundles": cfg.bundles.iter().map(|b| b.name.clone()).collect::<Vec<_>>(),
    });
    Ok(Report::new(v).with_text(format!("{}: valid ({} components, {} bundles)", t.name, t.components.len(), cfg.bundles.len())))
}

pub fn target_show(spec: &str) -> CliResult<Report> {
    let l = resolve_target(spec)?;
    Ok(Report::new(target_to_json(&l.target, &l.bundles)))
}

pub fn bernoulli(m: usize, x: &str) -> CliResult<Report> {
    let x = rat(x)?;
    let v = bernoulli_value(m, &x);
    let s = rational_string(&v);
    Ok(Report::new(json!({ "m": m, "x": rational_string(&x), "value": s })).with_text(s))
}

pub struct DeltaRequest<'a> {
    pub target: &'a str,
    pub bundle: &'a str,
    pub euler: bool,
    pub s: Option<&'a str>,
    pub zmax: i32,
    pub inverse: bool,
    pub check_symplectic: bool,
}

fn symplectic_json(t: &TargetModel, d: &orbiqrr_core::LoopOperator) -> CliResult<Value> {
    let upto = if d.exact { d.zmax.max(0) } else { (d.zmax + d.zmin.min(0)).max(0) };
    let rep = check_symplectomorphism(t, d, upto)?;
    Ok(json!({
        "passed": rep.passed(),
        "valid_through": rep.valid_through,
        "checked_through": rep.checked_through,
        "phase_ok": rep.phase_ok,
        "first_failure": rep.first_failure.map(|(n, r, c)| json!({ "zpow": n, "row": r, "col": c })),
    }))
}

pub fn delta(req: &DeltaRequest) -> CliResult<Report> {
    if req.zmax < -1 {
        return Err(Error::TruncationTooNarrow(format!("zmax = {} is below -1", req.zmax)).into());
    }
    let l = resolve_target(req.target)?;
    let t = &l.target;
    let f = resolve_bundle(&l, req.bundle)?;
    let kmax = (req.zmax + 2).max(0) as usize + t.max_component_dim() as usize;
    let (s, s_desc) = s_values(req.euler, req.s, kmax)?;
    let inputs = json!({
        "target": target_to_json(t, &[]),
        "bundle": bundle_to_json(t, &f),
        "s": s_desc,
        "zmax": req.zmax,
        "inverse": req.inverse,
    });
    let op = cached("delta", inputs, || {
        let d = if req.inverse { delta_inverse(t, &f, &s, req.zmax)? } else { delta_operator(t, &f, &s, req.zmax)? };
        let mut v = d.to_json(t);
        v["symplectic"] = symplectic_json(t, &d)?;
        Ok(v)
    })?;
    let mut out = json!({ "target": t.name, "bundle": f.name, "s": s_desc, "operator": op });
    let mut table = Table::new(&["zpow", "row", "col", "coeff"]);
    for b in op["blocks"].as_array().into_iter().flatten() {
        let at = |x: &Value| format!("{}/{}", leaf(&x["component"]), leaf(&x["basis"]));
        table.push(vec![b["zpow"].to_string(), at(&b["row"]), at(&b["col"]), leaf(&b["coeff"])]);
    }
    if req.check_symplectic {
        let sym = op["symplectic"].clone();
        out["symplectic"] = sym.clone();
        if sym["passed"] != Value::Bool(true) {
            return Err(CliError::check_failed("symplectomorphism", Report::new(out).with_table(table)));
        }
    }
    if let Some(o) = out["operator"].as_object_mut() {
        o.remove("symplectic");
    }
    Ok(Report::new(out).with_table(table))
}

pub struct IRequest<'a> {
    pub target: &'a str,
    pub bundle: Option<&'a str>,
    pub max_degree: u32,
    pub nonequivariant: bool,
    pub jfile: Option<&'a Path>,
}

fn j_source(l: &Loaded, req: &IRequest) -> CliResult<(JFunction, Value)> {
    let file = match (req.jfile, &l.target.jfunction_file) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(f)) => Some(l.base.clone().unwrap_or_default().join(f)),
        (None, None) => None,
    };
    match file {
        Some(p) => {
            let text = read(&p)?;
            let j = load_j_function(&l.target, &text)?;
            if j.dmax < req.max_degree {
                return Err(Error::TruncationTooNarrow(format!(
                    "{} stops at degree {}, requested {}",
                    p.display(),
                    j.dmax,
                    req.max_degree
                ))
                .into());
            }
            let v = serde_json::from_str::<Value>(&text).unwrap_or(Value::Null);
            Ok((j, json!({ "file": v })))
        }
        None => Ok((j_closed_form_pn(&l.target, req.max_degree)?, json!("closed-form"))),
    }
}

fn i_function(req: &IRequest) -> CliResult<(Loaded, Option<BundleModel>, JFunction, Value)> {
    let l = resolve_target(req.target)?;
    let f = req.bundle.map(|b| resolve_bundle(&l, b)).transpose()?;
    let (j, source) = j_source(&l, req)?;
    let j = truncate_j(&j, req.max_degree);
    let mut i = match &f {
        Some(f) => hypergeometric_modification(&l.target, f, &j)?,
        None => j,
    };
    if req.nonequivariant {
        i = nonequivariant_limit(&l.target, &i)?;
    }
    let inputs = json!({
        "target": target_to_json(&l.target, &[]),
        "bundle": f.as_ref().map(|f| bundle_to_json(&l.target, f)),
        "source": source,
        "dmax": req.max_degree,
        "nonequivariant": req.nonequivariant,
    });
    Ok((l, f, i, inputs))
}

fn truncate_j(j: &JFunction, dmax: u32) -> JFunction {
    let mut out = JFunction::new(dmax);
    for d in 0..=dmax.min(j.dmax) {
        out.set_layer(d, j.layer(d));
    }
    out
}

fn rows_table(rows: &[Value]) -> Table {
    let mut t = Table::new(&["d", "zpow", "component", "basis", "coeff"]);
    for r in rows {
        t.push(vec![leaf(&r["d"]), leaf(&r["zpow"]), leaf(&r["component"]), leaf(&r["basis"]), leaf(&r["coeff"])]);
    }
    t
}

pub fn ifunction(req: &IRequest) -> CliResult<Report> {
    let (l, f, i, inputs) = i_function(req)?;
    let rows = cached("ifunction", inputs, || Ok(Value::Array(i.to_rows(&l.target))))?;
    let list = rows.as_array().cloned().unwrap_or_default();
    let v = json!({
        "target": l.target.name,
        "bundle": f.map(|f| f.name),
        "dmax": req.max_degree,
        "rows": rows,
    });
    Ok(Report::new(v).with_table(rows_table(&list)))
}

fn class_series_rows(t: &TargetModel, m: &std::collections::BTreeMap<(usize, usize), TruncSeries>) -> Vec<Value> {
    let mut rows = Vec::new();
    for (&(i, a), s) in m {
        for mut r in series_rows(s) {
            r["zpow"] = json!(0);
            r["component"] = json!(t.components[i].id);
            r["basis"] = json!(t.components[i].basis[a].name);
            rows.push(r);
        }
    }
    rows
}

pub fn mirror(req: &IRequest) -> CliResult<Report> {
    let (l, f, i, inputs) = i_function(req)?;
    let t = &l.target;
    let v = cached("mirror-map", inputs, || {
        let mm = mirror_map(t, &i)?;
        mm.check_normal_form(t)?;
        Ok(json!({
            "F": series_rows(&mm.expansion.f),
            "G": class_series_rows(t, &mm.expansion.g),
            "tau": class_series_rows(t, &mm.tau),
        }))
    })?;
    let mut table = Table::new(&["series", "d", "component", "basis", "coeff"]);
    for r in v["F"].as_array().into_iter().flatten() {
        table.push(vec!["F".into(), leaf(&r["d"]), String::new(), String::new(), leaf(&r["coeff"])]);
    }
    for name in ["G", "tau"] {
        for r in v[name].as_array().into_iter().flatten() {
            table.push(vec![name.into(), leaf(&r["d"]), leaf(&r["component"]), leaf(&r["basis"]), leaf(&r["coeff"])]);
        }
    }
    let mut out = json!({ "target": t.name, "bundle": f.map(|f| f.name), "dmax": req.max_degree });
    for k in ["F", "G", "tau"] {
        out[k] = v[k].clone();
    }
    Ok(Report::new(out).with_table(table))
}

pub fn invariants(target: &str, bundle: &str, max_degree: u32, mode: &str) -> CliResult<Report> {
    let mode: InvariantMode = mode.parse()?;
    let req = IRequest { target, bundle: Some(bundle), max_degree, nonequivariant: true, jfile: None };
    let (l, f, i, inputs) = i_function(&req)?;
    let t = &l.target;
    let f = f.expect("bundle given");
    let inputs = json!({ "i": inputs, "mode": format!("{mode:?}") });
    let v = cached("invariants", inputs, || {
        let mm = mirror_map(t, &i)?;
        let table = extract_invariants(t, &f, &mm, mode)?;
        let rows: Vec<Value> = table
            .rows
            .iter()
            .map(|r| json!({ "d": r.d, "gw": rational_json(&r.gw), "instanton": rational_json(&r.instanton) }))
            .collect();
        Ok(json!({ "rows": rows, "integral": table.integral() }))
    })?;
    let mut table = Table::new(&["d", "N_d", "n_d"]);
    for r in v["rows"].as_array().into_iter().flatten() {
        table.push(vec![leaf(&r["d"]), leaf(&r["gw"]), leaf(&r["instanton"])]);
    }
    let out = json!({ "target": t.name, "bundle": f.name, "max_degree": max_degree, "rows": v["rows"], "integral": v["integral"] });
    Ok(Report::new(out).with_table(table))
}

/// `id`, `zero`, `mult:<component>/<basis>`, a JSON matrix of rational strings, or `@file`.
pub fn parse_b(t: &TargetModel, spec: &str) -> CliResult<Matrix> {
    let n = t.total_dim();
    let spec = spec.trim();
    if spec == "id" {
        return Ok(Matrix::identity(n));
    }
    if spec == "zero" {
        return Ok(Matrix::zeros(n, n));
    }
    if let Some(rest) = spec.strip_prefix("mult:") {
        let (comp, basis) = rest
            .split_once('/')
            .ok_or_else(|| Error::InvalidParams(format!("expected mult:<component>/<basis>, got {spec:?}")))?;
        let i = t
            .components
            .iter()
            .position(|c| c.id == comp)
            .ok_or_else(|| Error::IndexOutOfRange(format!("no component {comp:?}")))?;
        let a = t.components[i]
            .basis
            .iter()
            .position(|b| b.name == basis)
            .ok_or_else(|| Error::IndexOutOfRange(format!("no basis element {basis:?} on {comp}")))?;
        let c = CohClass::basis(i, a);
        let c = if i == 0 { t.pull_to_inertia(&c) } else { c };
        return Ok(t.multiplication_matrix(&c));
    }
    let text = match spec.strip_prefix('@') {
        Some(p) => read(Path::new(p))?,
        None => spec.to_string(),
    };
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| Error::Schema { path: "--B".into(), message: format!("not id, zero, mult:… or a JSON matrix: {e}") })?;
    let rows = v.as_array().ok_or_else(|| Error::Schema { path: "--B".into(), message: "expected rows".into() })?;
    if rows.len() != n {
        return Err(Error::DimensionMismatch(format!("B has {} rows, H*(IX) has dimension {n}", rows.len())).into());
    }
    let mut out = Vec::with_capacity(n);
    for (k, r) in rows.iter().enumerate() {
        let r = r.as_array().filter(|r| r.len() == n).ok_or_else(|| {
            Error::Schema { path: format!("--B[{k}]"), message: format!("expected {n} entries") }
        })?;
        let mut row = Vec::with_capacity(n);
        for (c, x) in r.iter().enumerate() {
            let x = orbiqrr_core::exactalg::scalar_from_json(x, &format!("--B[{k}][{c}]"))?;
            row.push(x);
        }
        out.push(row);
    }
    Ok(Matrix::from_rows(out))
}

fn var_json(t: &TargetModel, v: (u32, usize)) -> Value {
    let (i, a) = t.locate(v.1);
    json!({ "k": v.0, "component": t.components[i].id, "basis": t.components[i].basis[a].name })
}

fn operator_json(t: &TargetModel, op: &FockOperator) -> Value {
    let terms: Vec<Value> = op
        .terms
        .iter()
        .map(|((s, a, b), c)| {
            let shape = match s {
                Shape::QQ => "hbar^-1 q q",
                Shape::QD => "q d/dq",
                Shape::DD => "hbar d/dq d/dq",
            };
            json!({ "shape": shape, "left": var_json(t, *a), "right": var_json(t, *b), "coeff": scalar_to_json(c) })
        })
        .collect();
    json!({ "K": op.k_max, "terms": terms, "constant": scalar_to_json(&op.constant) })
}

pub fn quantize(target: &str, b: &str, m: i32, k: u32, formula: bool) -> CliResult<Report> {
    let l = resolve_target(target)?;
    let t = &l.target;
    let bm = parse_b(t, b)?;
    let op = if formula { quantize_formula(t, &bm, m, k) } else { quantize_monomial(t, &bm, m, k)? };
    let lines = describe(&op);
    let v = json!({ "target": t.name, "m": m, "operator": operator_json(t, &op), "description": lines });
    Ok(Report::new(v).with_text(lines.join("\n")))
}

fn correlator_table(l: &Loaded, table: Option<&Path>, nmax: usize) -> CliResult<CorrelatorTable> {
    match table {
        Some(p) => Ok(CorrelatorTable::from_json(&l.target, &read(p)?)?),
        None if l.target.total_dim() == 1 && l.target.dim == 0 => Ok(point_correlator_table(nmax)),
        None => Err(Error::InvalidParams(format!("no built-in correlator table for {}; pass --table", l.target.name)).into()),
    }
}

fn finish_check(what: &str, passed: bool, report: Report) -> CliResult<Report> {
    if passed {
        Ok(report)
    } else {
        Err(CliError::check_failed(what, report))
    }
}

pub fn check_universal(target: &str, kind: &str, table: Option<&Path>, nmax: usize, order: u32) -> CliResult<Report> {
    let l = resolve_target(target)?;
    let t = &l.target;
    let kind: EquationKind = kind.parse()?;
    if kind == EquationKind::Divisor && table.is_none() && t.curve_rank == 1 {
        let j = j_closed_form_pn(t, nmax as u32)?;
        let a = (0..t.components[0].basis.len())
            .find(|&a| t.basis_degree(0, a) == 2)
            .ok_or_else(|| Error::InvalidParams("no divisor class".into()))?;
        let divisor = check_divisor_shift(t, &j, a, order)?;
        let string = check_string_shift(t, &j, order);
        let v = json!({ "target": t.name, "kind": "divisor", "source": "closed-form J", "max_degree": nmax,
            "order": order, "divisor_shift": divisor, "string_shift": string, "passed": divisor && string });
        return finish_check("divisor", divisor && string, Report::new(v));
    }
    let tab = correlator_table(&l, table, nmax)?;
    let rep = check_universal_equation(t, &tab, kind)?;
    let failures: Vec<Value> = rep
        .failures
        .iter()
        .map(|(k, r)| json!({ "correlator": k.display(t), "residual": scalar_to_json(r) }))
        .collect();
    let mut table = Table::new(&["correlator", "residual"]);
    for (k, r) in &rep.failures {
        table.push(vec![k.display(t), leaf(&scalar_to_json(r))]);
    }
    let v = json!({ "target": t.name, "kind": format!("{kind:?}").to_lowercase(), "instances": rep.instances,
        "passed": rep.passed(), "failures": failures });
    let text = if rep.passed() {
        format!("{:?}: {} instances, all pass", kind, rep.instances)
    } else {
        let mut s = format!("{:?}: {} of {} instances fail", kind, rep.failures.len(), rep.instances);
        for row in &table.rows {
            s.push_str(&format!("\n  {}  residual {}", row[0], row[1]));
        }
        s
    };
    finish_check("universal equation", rep.passed(), Report::new(v).with_table(table).with_text(text))
}

pub fn check_cocycle(target: &str, pair: [(&str, i32); 2], k: u32) -> CliResult<Report> {
    let l = resolve_target(target)?;
    let t = &l.target;
    let b1 = parse_b(t, pair[0].0)?;
    let b2 = parse_b(t, pair[1].0)?;
    let (m1, m2) = (pair[0].1, pair[1].1);
    let direct = commutator_cocycle(t, (&b1, m1), (&b2, m2), k)?;
    let formula = cocycle_formula(&darboux_hamiltonian(t, &b1, m1, k), &darboux_hamiltonian(t, &b2, m2, k));
    let agree = direct == formula;
    let v = json!({ "target": t.name, "m": [m1, m2], "K": k, "cocycle": scalar_to_json(&direct),
        "formula": scalar_to_json(&formula), "passed": agree });
    finish_check("cocycle", agree, Report::new(v).with_text(format!("cocycle {direct} (formula {formula})")))
}

pub fn check_string(target: &str, table: Option<&Path>, nmax: usize, k: u32) -> CliResult<Report> {
    let l = resolve_target(target)?;
    let t = &l.target;
    let tab = correlator_table(&l, table, nmax)?;
    let nmax = if table.is_some() { tab.nmax.min(nmax).max(3) } else { nmax };
    let res = string_residual(t, &tab, k, nmax)?;
    let terms: Vec<Value> = res
        .iter()
        .map(|(h, mono, c)| {
            let vars: Vec<Value> = mono.iter().map(|(v, e)| json!({ "var": var_json(t, *v), "power": e })).collect();
            json!({ "hbar": h, "monomial": vars, "coeff": scalar_to_json(c) })
        })
        .collect();
    let passed = terms.is_empty();
    let v = json!({ "target": t.name, "nmax": nmax, "K": k, "residual": terms, "passed": passed });
    let text = if passed {
        format!("string residual vanishes through degree {}", nmax - 1)
    } else {
        format!("string residual has {} nonzero terms", terms.len())
    };
    finish_check("string", passed, Report::new(v).with_text(text))
}

/// Fixed rationals standing in for generic `s_1, s_2, …`, with `e^{s_0/2}` a formal symbol.
pub fn generic_s(smax: usize) -> SValues {
    let s = (0..=smax)
        .map(|k| {
            let k = k as i64;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            Scalar::frac(sign * (2 * k + 2), 3 * k + 5)
        })
        .collect();
    SValues::from_list(s).with_exp_half_s0(Scalar::lambda())
}

pub fn check_serre(target: &str, bundle: &str, smax: usize, zmax: i32) -> CliResult<Report> {
    let l = resolve_target(target)?;
    let t = &l.target;
    let f = resolve_bundle(&l, bundle)?;
    let s = generic_s(smax);
    let cone = check_serre_cone(t, &f, &s, zmax)?;
    let am = check_dual_am_identity(t, &f, (zmax + 2).max(0) as usize);
    let m = serre_m_operator(t, &f)?;
    let mult: Vec<Value> = t
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| json!({ "component": c.id, "M": scalar_to_json(&m.get(i, 0)) }))
        .collect();
    let passed = cone.passed() && am.is_ok();
    let sv = |s: &SValues| s.s.iter().map(scalar_to_json).collect::<Vec<_>>();
    let v = json!({
        "target": t.name,
        "bundle": f.name,
        "dual_bundle": bundle_to_json(t, &dual_bundle(t, &f)),
        "s": sv(&s),
        "s_dual": sv(&dual_s_values(&s)),
        "exp_half_s0": "lambda (formal)",
        "per_degree": cone.per_degree.iter().map(|(n, ok)| json!({ "zpow": n, "ok": ok })).collect::<Vec<_>>(),
        "phase_ok": cone.phase_ok,
        "product_ok": cone.product_ok,
        "am_identity": am.as_ref().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string()),
        "M": mult,
        "passed": passed,
    });
    let mut table = Table::new(&["zpow", "residual_zero"]);
    for (n, ok) in &cone.per_degree {
        table.push(vec![n.to_string(), ok.to_string()]);
    }
    finish_check("serre", passed, Report::new(v).with_table(table))
}

pub fn check_symplectic(req: &DeltaRequest) -> CliResult<Report> {
    let l = resolve_target(req.target)?;
    let t = &l.target;
    let f = resolve_bundle(&l, req.bundle)?;
    let kmax = (req.zmax + 2).max(0) as usize + t.max_component_dim() as usize;
    let (s, s_desc) = s_values(req.euler, req.s, kmax)?;
    let d = if req.inverse { delta_inverse(t, &f, &s, req.zmax)? } else { delta_operator(t, &f, &s, req.zmax)? };
    let rep = symplectic_json(t, &d)?;
    let passed = rep["passed"] == Value::Bool(true);
    let v = json!({ "target": t.name, "bundle": f.name, "s": s_desc, "zmax": req.zmax, "report": rep });
    finish_check("symplectomorphism", passed, Report::new(v))
}
