//! Hypergeometric modification by a split convex bundle and the mirror map.

use std::collections::BTreeMap;

use super::{zpoly_add, zpoly_mul, JFunction, ZPoly};
use crate::exactalg::{Scalar, TruncSeries};
use crate::orbtarget::{BundleModel, CohClass, TargetModel};
use crate::Error;

/// `I_F = Σ_d J_d · ∏_j ∏_{k=1}^{⟨ρ_j,d⟩} (λ + ρ_j + kz)`.
pub fn hypergeometric_modification(t: &TargetModel, f: &BundleModel, j: &JFunction) -> Result<JFunction, Error> {
    if !f.pulled_back {
        return Err(Error::AssumptionViolated(format!("{} is not pulled back from the coarse space", f.name)));
    }
    if f.rank as usize != f.lines.len() {
        return Err(Error::AssumptionViolated(format!("{} has no splitting into line bundles", f.name)));
    }
    if let Some(l) = f.lines.iter().find(|l| l.c1_pairing < 0) {
        return Err(Error::AssumptionViolated(format!(
            "{} has a summand of degree {} and is not convex",
            f.name, l.c1_pairing
        )));
    }
    let base = t.identity_class().scale(&Scalar::lambda());
    let mut out = JFunction::new(j.dmax);
    for d in 0..=j.dmax {
        let mut m: ZPoly = BTreeMap::from([(0, t.identity_class())]);
        for line in &f.lines {
            let lam_rho = base.add(&line.c1);
            for k in 1..=line.c1_pairing * d as i64 {
                let factor = BTreeMap::from([(0, lam_rho.clone()), (1, t.identity_class().scale(&Scalar::from_int(k)))]);
                m = zpoly_mul(t, &m, &factor);
            }
        }
        out.set_layer(d, zpoly_mul(t, &j.layer(d), &m));
    }
    Ok(out)
}

/// `I(0, z) = F(Q) z + Σ G^{(i,a)}(Q) φ_{(i,a)} + O(1/z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallExpansion {
    pub f: TruncSeries,
    pub g: BTreeMap<(usize, usize), TruncSeries>,
}

pub fn small_expansion(t: &TargetModel, i: &JFunction) -> Result<SmallExpansion, Error> {
    let mut fs = vec![Scalar::zero(); i.dmax as usize + 1];
    let mut g: BTreeMap<(usize, usize), TruncSeries> = BTreeMap::new();
    if let Some((d, n, _)) = i.iter().find(|&(_, n, _)| n > 1) {
        return Err(Error::PositivityViolated(format!("degree {d} carries a z^{n} term")));
    }
    for (d, n, c) in i.iter() {
        if n == 1 {
            if c.iter().any(|(k, a, _)| (k, a) != (0, 0)) {
                return Err(Error::AssumptionViolated(format!("the z coefficient in degree {d} is not a multiple of 1")));
            }
            fs[d as usize] = c.get(0, 0);
        } else if n == 0 {
            for (k, a, x) in c.iter() {
                if t.basis_degree(k, a) > 2 {
                    return Err(Error::AssumptionViolated(format!(
                        "the z^0 coefficient in degree {d} has a class of degree {}",
                        t.basis_degree(k, a)
                    )));
                }
                g.entry((k, a))
                    .or_insert_with(|| TruncSeries::novikov(i.dmax))
                    .insert_truncating(vec![d], 0, x.clone());
            }
        }
    }
    if !fs[0].is_one() {
        return Err(Error::NormalFormViolation("the Q^0 part of the z coefficient is not 1".into()));
    }
    Ok(SmallExpansion { f: TruncSeries::from_q_coeffs(i.dmax, &fs), g })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MirrorMap {
    pub expansion: SmallExpansion,
    /// `τ = G/F`, coordinate-wise.
    pub tau: BTreeMap<(usize, usize), TruncSeries>,
    /// `I/F`, which equals `J(τ)`.
    pub j: JFunction,
}

impl MirrorMap {
    pub fn tau_coordinate(&self, i: usize, a: usize) -> TruncSeries {
        self.tau.get(&(i, a)).cloned().unwrap_or_else(|| TruncSeries::novikov(self.j.dmax))
    }

    /// `I/F = z + τ + O(1/z)` exactly through the truncation.
    pub fn check_normal_form(&self, t: &TargetModel) -> Result<(), Error> {
        for (d, n, c) in self.j.iter() {
            let expected_one = d == 0 && n == 1;
            if n > 1 || (n == 1 && !expected_one) {
                return Err(Error::NormalFormViolation(format!("I/F has a z^{n} term in degree {d}")));
            }
            if expected_one && *c != t.one() {
                return Err(Error::NormalFormViolation("I/F does not start with z·1".into()));
            }
        }
        if self.j.coefficient(0, 1) != t.one() {
            return Err(Error::NormalFormViolation("I/F does not start with z·1".into()));
        }
        for d in 0..=self.j.dmax {
            let c = self.j.coefficient(d, 0);
            let mut expected = CohClass::zero();
            for ((i, a), s) in &self.tau {
                expected.add_term(*i, *a, s.q(d));
            }
            if c != expected {
                return Err(Error::NormalFormViolation(format!("the z^0 part of I/F differs from τ in degree {d}")));
            }
        }
        Ok(())
    }
}

pub fn mirror_map(t: &TargetModel, i: &JFunction) -> Result<MirrorMap, Error> {
    let expansion = small_expansion(t, i)?;
    let finv = expansion.f.invert()?;
    let tau = expansion.g.iter().map(|(k, g)| (*k, g.mul(&finv))).filter(|(_, s)| !s.is_zero()).collect();
    let mut j = JFunction::new(i.dmax);
    for d in 0..=i.dmax {
        let mut layer = ZPoly::new();
        for d1 in 0..=d {
            let c = finv.q(d - d1);
            if c.is_zero() {
                continue;
            }
            let scaled: ZPoly = i.layer(d1).into_iter().map(|(n, x)| (n, x.scale(&c))).collect();
            layer = zpoly_add(&layer, &scaled);
        }
        j.set_layer(d, layer);
    }
    Ok(MirrorMap { expansion, tau, j })
}
