//! Fixtures shared by the benchmarks.

use orbiqrr_core::genus0::{hypergeometric_modification, j_closed_form_pn, nonequivariant_limit, JFunction};
use orbiqrr_core::orbtarget::builtin::{projective, wps_line};
use orbiqrr_core::{Scalar, SValues, TargetModel, TruncSeries};

/// A dense Novikov series with coefficients `(d + 1)/(d + 2) · λ^{d mod 3}`.
pub fn dense_series(dmax: u32) -> TruncSeries {
    let cs: Vec<Scalar> = (0..=dmax as i64)
        .map(|d| &Scalar::frac(d + 1, d + 2) * &Scalar::lambda_pow((d % 3) as i32))
        .collect();
    TruncSeries::from_q_coeffs(dmax, &cs)
}

/// Generic rational `s_0, …, s_kmax` with a formal `e^{s_0/2} = λ`.
pub fn generic_s(kmax: usize) -> SValues {
    let s = (0..=kmax as i64).map(|k| Scalar::frac(2 * k + 1, 3 * k + 4)).collect();
    SValues::from_list(s).with_exp_half_s0(Scalar::lambda())
}

/// The non-equivariant hypergeometric modification of `J_{P^4}` by `O(5)`.
pub fn quintic_i_function(dmax: u32) -> (TargetModel, JFunction) {
    let p4 = projective(4);
    let o5 = wps_line(&p4, 5).expect("O(5) on P4");
    let j = j_closed_form_pn(&p4, dmax).expect("closed-form J");
    let i = hypergeometric_modification(&p4, &o5, &j).expect("I-function");
    let i = nonequivariant_limit(&p4, &i).expect("λ → 0");
    (p4, i)
}
