//! Genus-zero invariants of a Calabi-Yau hypersurface from its twisted J-function.

use num_traits::One;

use super::{is_rational, MirrorMap};
use crate::exactalg::{Rational, Scalar, TruncSeries};
use crate::orbtarget::{BundleModel, TargetModel};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantMode {
    /// Degree-five hypersurface in `P^4`.
    Quintic,
}

impl std::str::FromStr for InvariantMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "quintic" => Ok(InvariantMode::Quintic),
            _ => Err(Error::UnsupportedTarget(format!("no invariant extraction mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantRow {
    pub d: u32,
    /// Gromov-Witten invariant `N_d`.
    pub gw: Rational,
    /// Instanton number `n_d` after removing multiple covers.
    pub instanton: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvariantTable {
    pub rows: Vec<InvariantRow>,
}

/// `n_d = N_d − Σ_{k | d, k > 1} n_{d/k} / k^3`.
pub fn multiple_cover_inversion(gw: &[Rational]) -> Vec<Rational> {
    let mut n: Vec<Rational> = Vec::with_capacity(gw.len());
    for d in 1..=gw.len() {
        let mut v = gw[d - 1].clone();
        for k in 2..=d {
            if d % k == 0 {
                let k3 = Rational::from_integer(((k * k * k) as i64).into());
                v -= &n[d / k - 1] / k3;
            }
        }
        n.push(v);
    }
    n
}

fn is_quintic(t: &TargetModel, f: &BundleModel) -> bool {
    t.components.len() == 1
        && t.dim == 4
        && t.components[0].basis.len() == 5
        && f.rank == 1
        && f.lines.len() == 1
        && f.lines[0].c1_pairing == 5
}

/// Reads `N_d` off `J(τ) = I/F` at `λ = 0`.
///
/// Stripping `e^{τ/z}` leaves `z + Σ_d q^d ⟨φ_α/(z−ψ)⟩ φ^α` with `q = Q e^{τ_1}`;
/// dual classes are taken in the twisted pairing `∫ a b · 5p`, so the
/// coefficient of `p²/z` is `d N_d / 5`.
pub fn extract_invariants(
    t: &TargetModel,
    f: &BundleModel,
    mm: &MirrorMap,
    mode: InvariantMode,
) -> Result<InvariantTable, Error> {
    match mode {
        InvariantMode::Quintic if is_quintic(t, f) => {}
        InvariantMode::Quintic => {
            return Err(Error::UnsupportedTarget(format!("quintic mode needs P4 with O(5), got {} with {}", t.name, f.name)))
        }
    }
    if !is_rational(&mm.j) {
        return Err(Error::AssumptionViolated("take the non-equivariant limit first".into()));
    }
    let dmax = mm.j.dmax;
    if !mm.tau_coordinate(0, 0).is_zero() {
        return Err(Error::AssumptionViolated("the mirror map has a unit component".into()));
    }
    let g = mm.tau_coordinate(0, 1);
    // K = Σ_j (−g)^j / j! · [p^{2−j} z^{j−1}] (I/F)
    let mut k = TruncSeries::novikov(dmax);
    let mut pw = TruncSeries::from_q_coeffs(dmax, &[Scalar::one()]);
    let mut fact = Rational::one();
    for j in 0..=2u32 {
        if j > 0 {
            pw = pw.mul(&g.neg());
            fact *= Rational::from_integer(j.into());
        }
        let coeffs: Vec<Scalar> =
            (0..=dmax).map(|d| mm.j.coefficient(d, j as i32 - 1).get(0, 2 - j as usize)).collect();
        let part = TruncSeries::from_q_coeffs(dmax, &coeffs);
        k = k.add(&pw.mul(&part).scale(&Scalar::from_rational(fact.recip())));
    }
    // q = Q e^{g(Q)}, then re-expand K in q
    let qvar = TruncSeries::from_q_coeffs(dmax, &[Scalar::zero(), Scalar::one()]);
    let q_of_big_q = qvar.mul(&g.exp()?);
    let big_q_of_q = q_of_big_q.reversion()?;
    let ktilde = k.compose(&big_q_of_q);
    let five = Rational::from_integer(5.into());
    let mut gw = Vec::new();
    for d in 1..=dmax {
        let c = ktilde.q(d).as_rational().expect("rational after the limit");
        gw.push(c * &five / Rational::from_integer(d.into()));
    }
    let inst = multiple_cover_inversion(&gw);
    Ok(InvariantTable {
        rows: gw
            .into_iter()
            .zip(inst)
            .enumerate()
            .map(|(k, (gw, instanton))| InvariantRow { d: k as u32 + 1, gw, instanton })
            .collect(),
    })
}

impl InvariantTable {
    /// Whether every instanton number is an integer.
    pub fn integral(&self) -> bool {
        self.rows.iter().all(|r| r.instanton.is_integer())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{hypergeometric_modification, j_closed_form_pn, mirror_map, nonequivariant_limit};
    use super::*;
    use crate::exactalg::rational;
    use crate::orbtarget::builtin::*;

    #[test]
    fn quintic_numbers() {
        let t = projective(4);
        let f = wps_line(&t, 5).unwrap();
        let j = j_closed_form_pn(&t, 4).unwrap();
        let i = nonequivariant_limit(&t, &hypergeometric_modification(&t, &f, &j).unwrap()).unwrap();
        let mm = mirror_map(&t, &i).unwrap();
        let table = extract_invariants(&t, &f, &mm, InvariantMode::Quintic).unwrap();
        let gw: Vec<Rational> = table.rows.iter().map(|r| r.gw.clone()).collect();
        assert_eq!(
            gw,
            vec![
                rational(2875, 1),
                rational(4876875, 8),
                rational(8564575000, 27),
                rational(15517926796875, 64)
            ]
        );
        let n: Vec<Rational> = table.rows.iter().map(|r| r.instanton.clone()).collect();
        assert_eq!(n, vec![rational(2875, 1), rational(609250, 1), rational(317206375, 1), rational(242467530000, 1)]);
        assert!(table.integral());
    }

    #[test]
    fn unsupported_targets() {
        let t = projective(3);
        let f = wps_line(&t, 4).unwrap();
        let j = j_closed_form_pn(&t, 1).unwrap();
        let i = nonequivariant_limit(&t, &hypergeometric_modification(&t, &f, &j).unwrap()).unwrap();
        let mm = mirror_map(&t, &i).unwrap();
        assert!(matches!(extract_invariants(&t, &f, &mm, InvariantMode::Quintic), Err(Error::UnsupportedTarget(_))));
    }
}
