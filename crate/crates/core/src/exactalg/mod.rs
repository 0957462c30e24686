//! Exact scalars, truncated series and the JSON encodings shared by the CLI.

mod cyclo;
mod matrix;
mod poly;
mod scalar;
mod series;

pub use cyclo::cyclotomic_poly;
pub use matrix::Matrix;
pub use poly::{Poly, RatFunc};
pub use scalar::Scalar;
pub use series::{q_series, rational, Degree, TruncSeries};

use num_bigint::BigInt;
use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::Error;

pub type Rational = num_rational::BigRational;

pub fn root_of_unity(n: u32, k: i64) -> Scalar {
    Scalar::root_of_unity(n, k)
}

pub fn series_invert(a: &TruncSeries) -> Result<TruncSeries, Error> {
    a.invert()
}

pub fn nonequiv_limit(a: &Scalar) -> Result<Scalar, Error> {
    a.nonequiv_limit()
}

/// Parses "p/q", "p" or a decimal-free integer string.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = || Error::Schema { path: String::new(), message: format!("not a rational: {s:?}") };
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d == BigInt::from(0) {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn rational_string(r: &Rational) -> String {
    r.to_string()
}

fn poly_json(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(|c| Value::String(rational_string(c))).collect())
}

/// JSON form: a "p/q" string, `{num, den}` for rational functions, or a term list.
pub fn scalar_to_json(s: &Scalar) -> Value {
    if let Some(r) = s.as_rational() {
        return Value::String(rational_string(&r));
    }
    if let Some(r) = s.as_ratfunc() {
        return json!({ "num": poly_json(r.num()), "den": poly_json(r.den()) });
    }
    let terms: Vec<Value> = s
        .terms()
        .map(|(l, c, r)| json!({ "ell": l, "zeta": c, "num": poly_json(r.num()), "den": poly_json(r.den()) }))
        .collect();
    json!({ "order": s.order(), "terms": terms })
}

fn poly_from_json(v: &Value, path: &str) -> Result<Poly, Error> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Schema { path: path.into(), message: "expected coefficient array".into() })?;
    let mut cs = Vec::with_capacity(arr.len());
    for (k, c) in arr.iter().enumerate() {
        cs.push(rational_from_json(c, &format!("{path}[{k}]"))?);
    }
    Ok(Poly::from_coeffs(cs))
}

pub fn rational_from_json(v: &Value, path: &str) -> Result<Rational, Error> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|_| Error::Schema {
            path: path.into(),
            message: format!("not a rational string: {s:?}"),
        }),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        _ => Err(Error::Schema { path: path.into(), message: "expected a rational string".into() }),
    }
}

pub fn scalar_from_json(v: &Value, path: &str) -> Result<Scalar, Error> {
    match v {
        Value::String(_) | Value::Number(_) => Ok(Scalar::from_rational(rational_from_json(v, path)?)),
        Value::Object(o) if o.contains_key("terms") => {
            let order = o.get("order").and_then(Value::as_u64).unwrap_or(1) as u32;
            if order == 0 {
                return Err(Error::Schema { path: format!("{path}.order"), message: "order must be ≥ 1".into() });
            }
            let phi = cyclotomic_poly(order).degree().unwrap_or(0) as u32;
            let mut terms = BTreeMap::new();
            let list = o["terms"]
                .as_array()
                .ok_or_else(|| Error::Schema { path: format!("{path}.terms"), message: "expected array".into() })?;
            for (k, t) in list.iter().enumerate() {
                let p = format!("{path}.terms[{k}]");
                let ell = t.get("ell").and_then(Value::as_u64).unwrap_or(0) as u32;
                let zeta = t.get("zeta").and_then(Value::as_u64).unwrap_or(0) as u32;
                if zeta >= phi.max(1) {
                    return Err(Error::Schema { path: p, message: "zeta index exceeds φ(N)".into() });
                }
                let num = poly_from_json(t.get("num").unwrap_or(&Value::Null), &format!("{p}.num"))?;
                let den = poly_from_json(t.get("den").unwrap_or(&json!(["1"])), &format!("{p}.den"))?;
                let r = RatFunc::new(num, den)
                    .ok_or_else(|| Error::Schema { path: p.clone(), message: "zero denominator".into() })?;
                terms.insert((ell, zeta), r);
            }
            Ok(Scalar::from_parts(order, terms))
        }
        Value::Object(o) => {
            let num = poly_from_json(o.get("num").unwrap_or(&Value::Null), &format!("{path}.num"))?;
            let den = poly_from_json(o.get("den").unwrap_or(&json!(["1"])), &format!("{path}.den"))?;
            let r = RatFunc::new(num, den)
                .ok_or_else(|| Error::Schema { path: path.into(), message: "zero denominator".into() })?;
            Ok(Scalar::from_ratfunc(r))
        }
        _ => Err(Error::Schema { path: path.into(), message: "expected a scalar".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_json_round_trip() {
        let samples = vec![
            Scalar::frac(-1, 12),
            Scalar::lambda_pow(-2) + Scalar::from_int(3),
            Scalar::ell() * Scalar::frac(1, 6) + Scalar::root_of_unity(12, 5),
        ];
        for s in samples {
            let v = scalar_to_json(&s);
            assert_eq!(scalar_from_json(&v, "$").unwrap(), s);
        }
        assert_eq!(scalar_to_json(&Scalar::frac(-1, 12)), json!("-1/12"));
    }

    #[test]
    fn parse_rationals() {
        assert_eq!(parse_rational("6/-4").unwrap(), Rational::new((-3).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
