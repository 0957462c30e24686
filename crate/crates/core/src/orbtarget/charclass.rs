//! Multiplicative characteristic classes `c(·) = exp(Σ s_k ch_k(·))`.
//!
//! `s_0` may be a formal symbol such as `ln λ`, so `e^{s_0·rank}` is carried as a
//! rational multiple of `s_0` per component and only realized when the caller
//! supplies `e^{s_0}` (or `e^{s_0/2}`).

use num_traits::Zero;

use super::{CohClass, TargetModel};
use crate::exactalg::{Rational, Scalar};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct SValues {
    pub s: Vec<Scalar>,
    pub exp_s0: Option<Scalar>,
    pub exp_half_s0: Option<Scalar>,
    /// Extra `π√−1` multiples carried by `s_0`, kept apart from `ℓ`.
    pub s0_pi_turns: Rational,
}

impl SValues {
    pub fn zero() -> Self {
        SValues::from_list(Vec::new())
    }

    /// A finite list; `e^{s_0}` is known only when `s_0 = 0`.
    pub fn from_list(s: Vec<Scalar>) -> Self {
        let trivial = s.first().is_none_or(Scalar::is_zero);
        SValues {
            s,
            exp_s0: trivial.then(Scalar::one),
            exp_half_s0: trivial.then(Scalar::one),
            s0_pi_turns: Rational::zero(),
        }
    }

    pub fn with_exp_s0(mut self, e: Scalar) -> Self {
        self.exp_s0 = Some(e);
        self
    }

    pub fn with_exp_half_s0(mut self, e: Scalar) -> Self {
        self.exp_s0 = Some(&e * &e);
        self.exp_half_s0 = Some(e);
        self
    }

    pub fn get(&self, k: usize) -> Scalar {
        self.s.get(k).cloned().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(Scalar::is_zero) && self.s0_pi_turns.is_zero()
    }

    /// Rewrites every scalar with `λ` replaced by `x²`, so that `√λ = x`.
    pub fn in_sqrt_variable(&self) -> SValues {
        let x = Scalar::lambda();
        let exp_half = match (&self.exp_half_s0, &self.exp_s0) {
            (Some(h), _) => Some(h.to_sqrt_variable()),
            (None, Some(e)) if *e == Scalar::lambda() => Some(x),
            (None, Some(e)) if e.is_one() => Some(Scalar::one()),
            _ => None,
        };
        SValues {
            s: self.s.iter().map(Scalar::to_sqrt_variable).collect(),
            exp_s0: exp_half.as_ref().map(|h| h * h).or_else(|| self.exp_s0.as_ref().map(Scalar::to_sqrt_variable)),
            exp_half_s0: exp_half,
            s0_pi_turns: self.s0_pi_turns.clone(),
        }
    }
}

/// `exp(x)` for a class `x` with no degree-zero part, in the ring of each component.
pub fn nilpotent_exp(t: &TargetModel, x: &CohClass) -> CohClass {
    let mut out = t.identity_class();
    let mut pow = t.identity_class();
    let mut k = 1i64;
    loop {
        pow = t.mul(&pow, x).scale(&Scalar::frac(1, k));
        if pow.is_zero() {
            return out;
        }
        out = out.add(&pow);
        k += 1;
    }
}

/// `e^{s_0·m_i}` on each component times `exp(nilpotent)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpClass {
    pub s0_multiple: Vec<Rational>,
    pub nilpotent: CohClass,
}

impl ExpClass {
    /// `c(E)` for a class-valued Chern character `ch` on IX.
    pub fn of(t: &TargetModel, ch: &CohClass, s: &SValues) -> ExpClass {
        let s0_multiple = (0..t.components.len())
            .map(|i| ch.get(i, 0).as_rational().expect("rank part is rational"))
            .collect();
        let mut nilpotent = CohClass::zero();
        for k in 1..s.len() as u32 {
            let sk = s.get(k as usize);
            if !sk.is_zero() {
                nilpotent = nilpotent.add(&t.degree_part(ch, k).scale(&sk));
            }
        }
        ExpClass { s0_multiple, nilpotent }
    }

    pub fn inverse(&self) -> ExpClass {
        ExpClass { s0_multiple: self.s0_multiple.iter().map(|m| -m).collect(), nilpotent: self.nilpotent.neg() }
    }

    pub fn sqrt(&self) -> ExpClass {
        let half = Rational::new(1.into(), 2.into());
        ExpClass {
            s0_multiple: self.s0_multiple.iter().map(|m| m * &half).collect(),
            nilpotent: self.nilpotent.scale(&Scalar::frac(1, 2)),
        }
    }

    fn factor(&self, i: usize, s: &SValues) -> Result<Scalar, Error> {
        let m = &self.s0_multiple[i];
        if m.is_zero() || s.get(0).is_zero() && s.s0_pi_turns.is_zero() {
            return Ok(Scalar::one());
        }
        let two_m = m * Rational::from_integer(2.into());
        let (base, e) = if m.is_integer() && s.exp_s0.is_some() {
            (s.exp_s0.clone().unwrap(), m.to_integer())
        } else if two_m.is_integer() && s.exp_half_s0.is_some() {
            (s.exp_half_s0.clone().unwrap(), two_m.to_integer())
        } else {
            return Err(Error::InvalidParams(format!("e^(s_0·{m}) is not available for these s-values")));
        };
        let mag: u32 = e.magnitude().try_into().map_err(|_| Error::InvalidParams("exponent too large".into()))?;
        let p = base.pow(mag);
        if e < 0.into() {
            p.inv().ok_or_else(|| Error::NonUnitTwist(format!("e^(s_0) = {base} is not invertible")))
        } else {
            Ok(p)
        }
    }

    /// The class itself, using the `e^{s_0}` data carried by `s`.
    pub fn realize(&self, t: &TargetModel, s: &SValues) -> Result<CohClass, Error> {
        let u = nilpotent_exp(t, &self.nilpotent);
        let mut out = CohClass::zero();
        for i in 0..t.components.len() {
            let f = self.factor(i, s)?;
            out = out.add(&u.on_component(i).scale(&f));
        }
        Ok(out)
    }

    /// Whether the class is identically one (no `s_0` part and trivial nilpotent part).
    pub fn is_trivial(&self, s: &SValues) -> bool {
        self.nilpotent.is_zero() && (s.get(0).is_zero() || self.s0_multiple.iter().all(Zero::is_zero))
    }
}

impl TargetModel {
    /// `(a, b)_{(c,F)} = ∫ a ∧ I^*b ∧ c((q^*F)^{inv})`.
    pub fn twisted_pairing(
        &self,
        f: &super::BundleModel,
        s: &SValues,
        a: &CohClass,
        b: &CohClass,
    ) -> Result<Scalar, Error> {
        self.check_class(a)?;
        self.check_class(b)?;
        let c = ExpClass::of(self, &f.invariant_ch(self), s).realize(self, s)?;
        self.orbifold_pairing(&self.mul(a, &c), b)
    }
}
