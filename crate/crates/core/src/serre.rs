//! Serre-duality transforms: dual characteristic classes, dual bundles, the
//! dual dilaton shift, the root-of-unity multiplier `M` and the Novikov sign
//! twist, plus cone-level consistency checks.

use num_integer::Integer;
use num_traits::One;

use crate::exactalg::{Rational, Scalar, TruncSeries};
use crate::giventalspace::GiventalElement;
use crate::loopops::{class_am, delta_operator, LoopOperator};
use crate::orbtarget::{BundleModel, CohClass, EigenPart, ExpClass, LineSummand, SValues, TargetModel};
use crate::Error;

/// `s^∨_k = (−1)^{k+1} s_k`.
pub fn dual_s_values(s: &SValues) -> SValues {
    let dual: Vec<Scalar> = s
        .s
        .iter()
        .enumerate()
        .map(|(k, x)| if k % 2 == 0 { -x.clone() } else { x.clone() })
        .collect();
    SValues {
        s: dual,
        exp_s0: s.exp_s0.as_ref().and_then(Scalar::inv),
        exp_half_s0: s.exp_half_s0.as_ref().and_then(Scalar::inv),
        s0_pi_turns: -s.s0_pi_turns.clone(),
    }
}

/// Values for the inverse Euler class of a bundle of weight `−λ`:
/// `s*_0 = −ln λ − π√−1`, `s*_k = (k−1)!/λ^k`.
pub fn inverse_euler_dual_s_values(kmax: usize) -> SValues {
    let mut s = vec![-Scalar::ell()];
    let mut fact = Rational::one();
    for k in 1..=kmax {
        if k > 1 {
            fact *= Rational::from_integer((k as i64 - 1).into());
        }
        s.push(Scalar::lambda_pow(-(k as i32)).scale(&fact));
    }
    SValues {
        s,
        // e^{−ln λ − π√−1} = ζ_2 / λ
        exp_s0: Some(&Scalar::root_of_unity(2, 1) * &Scalar::lambda_pow(-1)),
        exp_half_s0: None,
        s0_pi_turns: -Rational::one(),
    }
}

/// `ch` with its degree-`2k` part multiplied by `(−1)^k`.
fn dual_ch(t: &TargetModel, c: &CohClass) -> CohClass {
    let mut out = CohClass::zero();
    for (i, a, x) in c.iter() {
        let v = if t.basis_degree(i, a) % 4 == 2 { -x.clone() } else { x.clone() };
        out.add_term(i, a, v);
    }
    out
}

/// `F^∨` with `F_i^{∨(l)} = (F_i^{(r_i − l)})^∨`.
pub fn dual_bundle(t: &TargetModel, f: &BundleModel) -> BundleModel {
    let eigen = f
        .eigen
        .iter()
        .map(|(&(i, l), e)| {
            let r = t.components[i].r;
            let l2 = if l == 0 { 0 } else { r - l };
            ((i, l2), EigenPart { rank: e.rank, ch: dual_ch(t, &e.ch) })
        })
        .collect();
    let name = match f.name.strip_prefix("O(").and_then(|s| s.strip_suffix(')')).and_then(|s| s.parse::<i64>().ok()) {
        Some(k) => format!("O({})", -k),
        None => match f.name.strip_suffix("^v") {
            Some(base) => base.to_string(),
            None => format!("{}^v", f.name),
        },
    };
    BundleModel {
        name,
        rank: f.rank,
        pulled_back: f.pulled_back,
        c1_pairing: -f.c1_pairing,
        eigen,
        lines: f.lines.iter().map(|l| LineSummand { c1_pairing: -l.c1_pairing, c1: l.c1.neg() }).collect(),
    }
}

fn invariant_class(t: &TargetModel, f: &BundleModel, s: &SValues) -> ExpClass {
    ExpClass::of(t, &f.invariant_ch(t), s)
}

/// `t^∨(z) = c·t(z) + (1 − c)z` with `c = c((q^*F)^{inv})`.
pub fn dual_variable_map(
    t: &TargetModel,
    f: &BundleModel,
    s: &SValues,
    tvec: &GiventalElement,
) -> Result<GiventalElement, Error> {
    let c = invariant_class(t, f, s).realize(t, s)?;
    let out = tvec.map_classes(|x| t.mul(x, &c));
    let shift = t.one().sub(&t.mul(&c, &t.one()));
    if shift.is_zero() {
        return Ok(out);
    }
    let mut head = GiventalElement::new(tvec.dmax, 1, 1);
    head.add_class(1, 0, &shift);
    Ok(out.add(&head))
}

/// `(−1)^{½ rank F_i^{mov} − age(F_i)}` on each component, in `ℚ(ζ_N)`.
pub fn serre_m_operator_in(t: &TargetModel, f: &BundleModel, order: u32) -> Result<CohClass, Error> {
    let mut out = CohClass::zero();
    for i in 0..t.components.len() {
        let e = Rational::new(f.moving_rank(t, i).into(), 2.into()) - f.age_of_bundle(t, i)?;
        if e.is_integer() {
            let sign = if e.to_integer().is_even() { 1 } else { -1 };
            out.add_term(i, 0, Scalar::from_int(sign));
            continue;
        }
        // (−1)^{p/q} = ζ_{2q}^p
        let p: i64 = e.numer().try_into().map_err(|_| Error::InvalidParams("exponent too large".into()))?;
        let q: u32 = e.denom().try_into().map_err(|_| Error::InvalidParams("exponent too large".into()))?;
        let needed = 2 * q;
        if !order.is_multiple_of(needed) {
            return Err(Error::CyclotomicOrderTooSmall { needed, have: order });
        }
        let z = Scalar::root_of_unity(order, p * (order / needed) as i64);
        out.add_term(i, 0, z);
    }
    Ok(out)
}

/// The multiplier `M` using the target's own cyclotomic order.
pub fn serre_m_operator(t: &TargetModel, f: &BundleModel) -> Result<CohClass, Error> {
    serre_m_operator_in(t, f, t.cyclotomic_order())
}

/// `Q^d ↦ (−1)^{⟨c_1(F), d⟩} Q^d`.
pub fn novikov_sign_twist(series: &TruncSeries, f: &BundleModel) -> TruncSeries {
    series.map(|d, _, c| {
        let e = f.c1_pairing * d.first().copied().unwrap_or(0) as i64;
        if e.rem_euclid(2) == 1 {
            -c.clone()
        } else {
            c.clone()
        }
    })
}

/// `c^∨(F^∨)·c(F)` realized as a class; equals the identity of H*(IX).
pub fn dual_class_product(t: &TargetModel, f: &BundleModel, s: &SValues) -> Result<CohClass, Error> {
    let sd = dual_s_values(s);
    let c = ExpClass::of(t, &f.total_ch(), s).realize(t, s)?;
    let cd = ExpClass::of(t, &dual_bundle(t, f).total_ch(), &sd).realize(t, &sd)?;
    Ok(t.mul(&c, &cd))
}

/// Checks the eigen-sum identity behind the duality on `A_m`:
/// `(A_m^∨)_k = (−1)^{k+m} (A_m)_k` for `m ≠ 1`, and for `m = 1` the defect is
/// `−(−1)^k ch_k(F^{(0)})`, which the `½ s_k ch_k(F^{(0)})` term absorbs.
pub fn check_dual_am_identity(t: &TargetModel, f: &BundleModel, mmax: usize) -> Result<(), Error> {
    let fd = dual_bundle(t, f);
    let inv = f.invariant_ch(t);
    for m in 0..=mmax {
        let a = class_am(t, f, m);
        let ad = class_am(t, &fd, m);
        for k in 0..=t.max_component_dim() {
            let sign = if (k as usize + m).is_multiple_of(2) { Scalar::one() } else { Scalar::from_int(-1) };
            let lhs = t.degree_part(&ad, k);
            let mut rhs = t.degree_part(&a, k).scale(&sign);
            if m == 1 {
                let s = if k % 2 == 0 { Scalar::from_int(-1) } else { Scalar::one() };
                rhs = rhs.add(&t.degree_part(&inv, k).scale(&s));
            }
            if lhs != rhs {
                return Err(Error::InvariantViolation(format!("dual A_{m} identity fails in degree {k}")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SerreReport {
    /// `(z-degree, residual vanishes)` for each checked degree.
    pub per_degree: Vec<(i32, bool)>,
    /// `e^{s_0 φ_i}` agrees with `e^{s_0^∨ φ_i^∨}` on every index.
    pub phase_ok: bool,
    /// `c^∨(F^∨)·c(F) = 1`.
    pub product_ok: bool,
}

impl SerreReport {
    pub fn passed(&self) -> bool {
        self.phase_ok && self.product_ok && self.per_degree.iter().all(|(_, ok)| *ok)
    }
}

fn mult(t: &TargetModel, c: &CohClass) -> LoopOperator {
    LoopOperator::multiplication(t, &[(0, c.clone())])
}

/// Compares `c·√c^{-1}·Δ(F, s)` with `(√c^∨)^{-1}·Δ^∨(F^∨, s^∨)` through `z^{zmax}`,
/// where `c = c((q^*F)^{inv})` and `c^∨ = c^∨((q^*F^∨)^{inv})`.
pub fn check_serre_cone(t: &TargetModel, f: &BundleModel, s: &SValues, zmax: i32) -> Result<SerreReport, Error> {
    if zmax < 0 {
        return Err(Error::TruncationTooNarrow(format!("zmax = {zmax}")));
    }
    cone_residual(t, f, &dual_bundle(t, f), s, &dual_s_values(s), zmax)
}

fn cone_residual(
    t: &TargetModel,
    f: &BundleModel,
    fd: &BundleModel,
    s: &SValues,
    sd: &SValues,
    zmax: i32,
) -> Result<SerreReport, Error> {
    let c = invariant_class(t, f, s);
    let cd = invariant_class(t, fd, sd);
    let left_mult = c.realize(t, s)?;
    let left_mult = t.mul(&left_mult, &c.sqrt().inverse().realize(t, s)?);
    let right_mult = cd.sqrt().inverse().realize(t, sd)?;
    let d = delta_operator(t, f, s, zmax)?;
    let dd = delta_operator(t, fd, sd, zmax)?;
    let lhs = mult(t, &left_mult).mul(&d);
    let rhs = mult(t, &right_mult).mul(&dd);
    let top = lhs.zmax.min(rhs.zmax);
    let per_degree = (lhs.zmin.min(rhs.zmin)..=top).map(|n| (n, lhs.block(n) == rhs.block(n))).collect();
    let s0 = s.get(0);
    let s0d = sd.get(0);
    let phase_ok = (0..t.total_dim()).all(|g| s0.scale(&lhs.phase[g]) == s0d.scale(&rhs.phase[g]));
    let product = t.mul(
        &ExpClass::of(t, &f.total_ch(), s).realize(t, s)?,
        &ExpClass::of(t, &fd.total_ch(), sd).realize(t, sd)?,
    );
    let product_ok = product == t.identity_class();
    Ok(SerreReport { per_degree, phase_ok, product_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loopops::euler_s_values;
    use crate::orbtarget::builtin::*;

    fn generic_s() -> SValues {
        SValues::from_list(vec![Scalar::frac(2, 3), Scalar::frac(-5, 7), Scalar::frac(3, 11)])
            .with_exp_half_s0(Scalar::lambda())
    }

    #[test]
    fn dual_s_examples() {
        let s = SValues::from_list(vec![Scalar::from_int(3)]);
        assert_eq!(dual_s_values(&s).s, vec![Scalar::from_int(-3)]);
        let s = SValues::from_list(vec![Scalar::zero(), Scalar::from_int(4)]);
        assert_eq!(dual_s_values(&s).s, vec![Scalar::zero(), Scalar::from_int(4)]);
        let g = generic_s();
        assert_eq!(dual_s_values(&dual_s_values(&g)), g);
        let e = euler_s_values(4, true);
        let d = dual_s_values(&e);
        let star = inverse_euler_dual_s_values(4);
        assert_eq!(d.s, star.s);
        assert_eq!(&star.s0_pi_turns - &d.s0_pi_turns, -Rational::one());
    }

    #[test]
    fn dual_bundles() {
        let b = bmu(3);
        assert_eq!(dual_bundle(&b, &bmu_character(&b, 1)).eigen, bmu_character(&b, 2).eigen);
        let p = projective(4);
        let o5 = wps_line(&p, 5).unwrap();
        let d = dual_bundle(&p, &o5);
        assert_eq!(d.name, "O(-5)");
        assert_eq!(d.eigen, wps_line(&p, -5).unwrap().eigen);
        assert_eq!(dual_bundle(&p, &d), o5);
        let tr = trivial(&p, 1);
        assert_eq!(dual_bundle(&p, &tr).eigen, tr.eigen);
    }

    #[test]
    fn dual_variables() {
        let t = point();
        let f = trivial(&t, 1);
        let s = SValues::from_list(vec![Scalar::ell()]).with_exp_s0(Scalar::lambda());
        let tv = GiventalElement::monomial(CohClass::term(0, 0, Scalar::from_int(3)), 0);
        let out = dual_variable_map(&t, &f, &s, &tv).unwrap();
        assert_eq!(out.get(0, 0), CohClass::term(0, 0, Scalar::lambda().scale(&Rational::from_integer(3.into()))));
        assert_eq!(out.get(1, 0), CohClass::term(0, 0, &Scalar::one() - &Scalar::lambda()));
        let zero = dual_variable_map(&t, &f, &SValues::zero(), &tv).unwrap();
        assert_eq!(zero, tv);
    }

    #[test]
    fn m_operator_values() {
        let b2 = bmu(2);
        let m = serre_m_operator(&b2, &bmu_character(&b2, 1)).unwrap();
        assert_eq!(m.get(1, 0), Scalar::one());
        let p1 = projective(1);
        let m = serre_m_operator(&p1, &wps_line(&p1, 1).unwrap()).unwrap();
        assert_eq!(m.get(0, 0), Scalar::one());
        let b3 = bmu(3);
        let m = serre_m_operator(&b3, &bmu_character(&b3, 1)).unwrap();
        assert_eq!(m.get(1, 0), Scalar::root_of_unity(12, 1));
        assert_eq!(
            serre_m_operator_in(&b3, &bmu_character(&b3, 1), 6),
            Err(Error::CyclotomicOrderTooSmall { needed: 12, have: 6 })
        );
    }

    #[test]
    fn novikov_twist() {
        let p = projective(4);
        let o5 = wps_line(&p, 5).unwrap();
        let q = TruncSeries::from_q_coeffs(3, &[Scalar::one(), Scalar::one(), Scalar::from_int(2), Scalar::from_int(3)]);
        let tw = novikov_sign_twist(&q, &o5);
        assert_eq!(tw.q(1), Scalar::from_int(-1));
        assert_eq!(tw.q(2), Scalar::from_int(2));
        assert_eq!(novikov_sign_twist(&tw, &o5), q);
    }

    #[test]
    fn am_identity_on_cyclic_groups() {
        for r in 1..=4 {
            let b = bmu(r);
            for j in 0..r as i64 {
                check_dual_am_identity(&b, &bmu_character(&b, j), 6).unwrap();
            }
        }
        let p = projective(2);
        check_dual_am_identity(&p, &wps_line(&p, 3).unwrap(), 5).unwrap();
    }

    #[test]
    fn cone_checks() {
        let p1 = projective(1);
        let r = check_serre_cone(&p1, &wps_line(&p1, 1).unwrap(), &generic_s(), 3).unwrap();
        assert!(r.passed(), "{r:?}");
        let b2 = bmu(2);
        let r = check_serre_cone(&b2, &bmu_character(&b2, 1), &generic_s(), 3).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = check_serre_cone(&b2, &bmu_character(&b2, 1), &SValues::zero(), 3).unwrap();
        assert!(r.passed());
        assert!(r.per_degree.len() >= 4, "{r:?}");
    }

    #[test]
    fn cone_check_detects_wrong_duals() {
        let p1 = projective(1);
        let f = wps_line(&p1, 1).unwrap();
        let s = generic_s();
        let undualized = cone_residual(&p1, &f, &dual_bundle(&p1, &f), &s, &s, 3).unwrap();
        assert!(!undualized.passed());
        let same = cone_residual(&p1, &f, &f, &s, &dual_s_values(&s), 3).unwrap();
        assert!(!same.passed());
    }
}
