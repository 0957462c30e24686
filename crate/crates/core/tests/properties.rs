mod oracle;

use num_traits::{One, Zero};
use proptest::prelude::*;

use orbiqrr_core::bernoulli::bernoulli_poly;
use orbiqrr_core::loopops::{delta_inverse, delta_operator};
use orbiqrr_core::orbtarget::builtin::{bmu, bmu_character, projective, wps_line};
use orbiqrr_core::serre::{dual_bundle, dual_class_product, dual_s_values, novikov_sign_twist};
use orbiqrr_core::{BundleModel, Rational, SValues, Scalar, TargetModel, TruncSeries};

const DMAX: u32 = 4;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

/// `c · λ^e · ζ_6^k`.
fn scalar() -> impl Strategy<Value = Scalar> {
    (small_rational(), -2i32..=2, 0i64..6).prop_map(|(c, e, k)| {
        &(&Scalar::from_rational(c) * &Scalar::lambda_pow(e)) * &Scalar::root_of_unity(6, k)
    })
}

fn series() -> impl Strategy<Value = TruncSeries> {
    proptest::collection::vec(scalar(), DMAX as usize + 1).prop_map(|cs| TruncSeries::from_q_coeffs(DMAX, &cs))
}

fn rational_coeffs() -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small_rational(), DMAX as usize + 1)
}

fn to_q(r: &Rational) -> oracle::Q {
    oracle::Q::new(r.numer().clone(), r.denom().clone())
}

fn as_ps(cs: &[Rational]) -> oracle::Ps {
    oracle::Ps(cs.iter().map(to_q).collect())
}

fn rational_series(cs: &[Rational]) -> TruncSeries {
    let cs: Vec<Scalar> = cs.iter().cloned().map(Scalar::from_rational).collect();
    TruncSeries::from_q_coeffs(DMAX, &cs)
}

fn q_coeffs(s: &TruncSeries) -> Vec<oracle::Q> {
    (0..=DMAX).map(|d| to_q(&s.q(d).as_rational().expect("rational series"))).collect()
}

fn s_values() -> impl Strategy<Value = SValues> {
    proptest::collection::vec(small_rational(), 1..5)
        .prop_map(|s| SValues::from_list(s.into_iter().map(Scalar::from_rational).collect()).with_exp_half_s0(Scalar::lambda()))
}

fn cyclic_bundle() -> impl Strategy<Value = (TargetModel, BundleModel)> {
    (1u32..=5, proptest::collection::vec(0i64..5, 1..4)).prop_map(|(r, js)| {
        let t = bmu(r);
        let mut f = bmu_character(&t, js[0]);
        for &j in &js[1..] {
            f = f.direct_sum(&bmu_character(&t, j), "F");
        }
        (t, f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_field_laws(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn series_ring_laws(f in series(), g in series(), h in series()) {
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g).mul(&h), f.mul(&g.mul(&h)));
        prop_assert_eq!(f.mul(&g.add(&h)), f.mul(&g).add(&f.mul(&h)));
        if !f.q(0).is_zero() {
            prop_assert!(f.mul(&f.invert().unwrap()).is_one());
        }
    }

    #[test]
    fn series_match_plain_power_series(a in rational_coeffs(), b in rational_coeffs()) {
        let (fa, fb) = (rational_series(&a), rational_series(&b));
        prop_assert_eq!(q_coeffs(&fa.mul(&fb)), as_ps(&a).mul(&as_ps(&b)).0);
        let mut shifted = a.clone();
        shifted[0] = Rational::zero();
        let g = rational_series(&shifted);
        prop_assert_eq!(q_coeffs(&g.exp().unwrap()), as_ps(&shifted).exp().0);
        prop_assert_eq!(g.exp().unwrap().log().unwrap(), g.clone());
        if !b[0].is_zero() {
            prop_assert_eq!(q_coeffs(&fb.invert().unwrap()), as_ps(&b).inv().0);
        }
        shifted[1] = Rational::one();
        let x = rational_series(&shifted);
        let r = x.reversion().unwrap();
        prop_assert_eq!(q_coeffs(&r), as_ps(&shifted).reversion().0);
        let mut id = vec![Scalar::zero(); DMAX as usize + 1];
        id[1] = Scalar::one();
        prop_assert_eq!(x.compose(&r), TruncSeries::from_q_coeffs(DMAX, &id));
    }

    #[test]
    fn bernoulli_identities(x in small_rational(), m in 1usize..16) {
        let p = bernoulli_poly(m);
        let sign = if m % 2 == 0 { Rational::one() } else { -Rational::one() };
        prop_assert_eq!(p.eval(&(Rational::one() - &x)), sign * p.eval(&x));
        let step = p.eval(&(&x + Rational::one())) - p.eval(&x);
        let m_r = Rational::from_integer((m as i64).into());
        prop_assert_eq!(step, m_r * num_traits::pow(x.clone(), m - 1));
    }

    #[test]
    fn serre_duals_are_involutions((t, f) in cyclic_bundle(), s in s_values()) {
        prop_assert_eq!(dual_bundle(&t, &dual_bundle(&t, &f)), f.clone());
        prop_assert_eq!(dual_s_values(&dual_s_values(&s)), s.clone());
        prop_assert_eq!(dual_class_product(&t, &f, &s).unwrap(), t.identity_class());
    }

    #[test]
    fn novikov_twist_is_an_involution(f in series(), k in -6i64..=6) {
        let p = projective(2);
        let line = wps_line(&p, k).unwrap();
        prop_assert_eq!(novikov_sign_twist(&novikov_sign_twist(&f, &line), &line), f);
    }

    #[test]
    fn delta_times_inverse_is_one((t, f) in cyclic_bundle(), s in s_values()) {
        let d = delta_operator(&t, &f, &s, 3).unwrap();
        let di = delta_inverse(&t, &f, &s, 3).unwrap();
        let prod = di.mul(&d).truncate(3);
        prop_assert!(prod.block(0).is_identity());
        for n in 1..=3 {
            prop_assert!(prod.block(n).is_zero());
        }
        prop_assert!(!prod.has_phase());
    }
}

#[test]
fn oracles_agree_with_textbook_values() {
    oracle::self_check().unwrap();
}
