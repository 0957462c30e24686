//! Truncated elements of `H = H*(IX) ⊗ Λ{z, z⁻¹}`, the symplectic form and
//! dilaton shifts.
//!
//! An element stores classes indexed by `(z-power, Novikov degree)` inside a
//! window `[zmin, zmax]`. Outside the window coefficients are zero unless the
//! corresponding side is flagged as truncated, in which case they are unknown.

use std::collections::BTreeMap;

use crate::exactalg::{Scalar, TruncSeries};
use crate::orbtarget::{BundleModel, CohClass, ExpClass, SValues, TargetModel};
use crate::Error;

#[derive(Clone, Debug)]
pub struct GiventalElement {
    pub dmax: u32,
    pub zmin: i32,
    pub zmax: i32,
    pub truncated_above: bool,
    pub truncated_below: bool,
    terms: BTreeMap<(i32, u32), CohClass>,
}

/// Windows only matter on truncated sides.
impl PartialEq for GiventalElement {
    fn eq(&self, o: &Self) -> bool {
        self.dmax == o.dmax
            && self.truncated_above == o.truncated_above
            && self.truncated_below == o.truncated_below
            && (!self.truncated_above || self.zmax == o.zmax)
            && (!self.truncated_below || self.zmin == o.zmin)
            && self.terms == o.terms
    }
}

impl GiventalElement {
    /// An exact Laurent polynomial (nothing truncated) supported in the window.
    pub fn new(dmax: u32, zmin: i32, zmax: i32) -> Self {
        GiventalElement { dmax, zmin, zmax, truncated_above: false, truncated_below: false, terms: BTreeMap::new() }
    }

    pub fn monomial(c: CohClass, zpow: i32) -> Self {
        let mut e = Self::new(0, zpow, zpow);
        e.add_class(zpow, 0, &c);
        e
    }

    pub fn truncated(mut self, above: bool, below: bool) -> Self {
        self.truncated_above = above;
        self.truncated_below = below;
        self
    }

    pub fn add_class(&mut self, zpow: i32, d: u32, c: &CohClass) {
        if d > self.dmax || c.is_zero() {
            return;
        }
        if zpow < self.zmin || zpow > self.zmax {
            let cut = (zpow > self.zmax && self.truncated_above) || (zpow < self.zmin && self.truncated_below);
            if cut {
                return;
            }
            self.zmin = self.zmin.min(zpow);
            self.zmax = self.zmax.max(zpow);
        }
        let e = self.terms.entry((zpow, d)).or_default();
        *e = e.add(c);
        if e.is_zero() {
            self.terms.remove(&(zpow, d));
        }
    }

    pub fn get(&self, zpow: i32, d: u32) -> CohClass {
        self.terms.get(&(zpow, d)).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, u32, &CohClass)> {
        self.terms.iter().map(|(&(n, d), c)| (n, d, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether the coefficient of `z^n` is determined.
    pub fn known(&self, n: i32) -> bool {
        !((n > self.zmax && self.truncated_above) || (n < self.zmin && self.truncated_below))
    }

    fn combine_window(&self, o: &Self) -> Self {
        let mut out = Self::new(self.dmax.min(o.dmax), self.zmin.min(o.zmin), self.zmax.max(o.zmax));
        if self.truncated_above || o.truncated_above {
            out.truncated_above = true;
            out.zmax = match (self.truncated_above, o.truncated_above) {
                (true, true) => self.zmax.min(o.zmax),
                (true, false) => self.zmax,
                _ => o.zmax,
            };
        }
        if self.truncated_below || o.truncated_below {
            out.truncated_below = true;
            out.zmin = match (self.truncated_below, o.truncated_below) {
                (true, true) => self.zmin.max(o.zmin),
                (true, false) => self.zmin,
                _ => o.zmin,
            };
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.combine_window(o);
        for (n, d, c) in self.iter().chain(o.iter()) {
            out.add_class(n, d, c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        self.map_classes(|x| x.scale(c))
    }

    pub fn map_classes(&self, f: impl Fn(&CohClass) -> CohClass) -> Self {
        let mut out = Self { terms: BTreeMap::new(), ..self.clone() };
        for (n, d, c) in self.iter() {
            out.add_class(n, d, &f(c));
        }
        out
    }

    pub fn try_map_scalars(&self, f: impl Fn(&Scalar) -> Result<Scalar, Error>) -> Result<Self, Error> {
        let mut out = Self { terms: BTreeMap::new(), ..self.clone() };
        for (n, d, c) in self.iter() {
            out.add_class(n, d, &c.try_map(&f)?);
        }
        Ok(out)
    }

    /// `f(z) ↦ f(−z)`.
    pub fn reflect(&self) -> Self {
        let mut out = Self::new(self.dmax, -self.zmax, -self.zmin).truncated(self.truncated_below, self.truncated_above);
        for (n, d, c) in self.iter() {
            let c = if n % 2 == 0 { c.clone() } else { c.neg() };
            out.add_class(-n, d, &c);
        }
        out
    }

    /// The `H_+` part (nonnegative powers of z).
    pub fn positive_part(&self) -> Self {
        let mut out = Self::new(self.dmax, 0, self.zmax.max(0)).truncated(self.truncated_above, false);
        for (n, d, c) in self.iter().filter(|(n, _, _)| *n >= 0) {
            out.add_class(n, d, c);
        }
        out
    }

    /// The `H_-` part (negative powers of z).
    pub fn negative_part(&self) -> Self {
        let mut out = Self::new(self.dmax, self.zmin.min(-1), -1).truncated(false, self.truncated_below);
        for (n, d, c) in self.iter().filter(|(n, _, _)| *n < 0) {
            out.add_class(n, d, c);
        }
        out
    }

    /// Darboux coordinate `q_k` (a class): the coefficient of `z^k`, `k ≥ 0`.
    pub fn q_coordinate(&self, k: u32, d: u32) -> CohClass {
        self.get(k as i32, d)
    }

    /// Darboux coordinate `p_{k,α}` with `f_{−k−1} = Σ_α p_{k,α} (−1)^{k+1} φ^α`.
    pub fn p_coordinate(&self, t: &TargetModel, k: u32, d: u32, i: usize, a: usize) -> Result<Scalar, Error> {
        let v = t.orbifold_pairing(&CohClass::basis(i, a), &self.get(-(k as i32) - 1, d))?;
        Ok(if k.is_multiple_of(2) { -v } else { v })
    }

    pub fn check_target(&self, t: &TargetModel) -> Result<(), Error> {
        self.terms.values().try_for_each(|c| t.check_class(c))
    }
}

fn omega_with(
    f: &GiventalElement,
    g: &GiventalElement,
    pair: impl Fn(&CohClass, &CohClass) -> Result<Scalar, Error>,
) -> Result<TruncSeries, Error> {
    for (m, _, _) in f.iter() {
        if !g.known(-1 - m) {
            return Err(Error::TruncationTooNarrow(format!("Ω needs z^{} of the second argument", -1 - m)));
        }
    }
    for (n, _, _) in g.iter() {
        if !f.known(-1 - n) {
            return Err(Error::TruncationTooNarrow(format!("Ω needs z^{} of the first argument", -1 - n)));
        }
    }
    let dmax = f.dmax.min(g.dmax);
    let mut out = TruncSeries::novikov(dmax);
    for (m, d1, a) in f.iter() {
        for d2 in 0..=dmax.saturating_sub(d1) {
            let b = g.get(-1 - m, d2);
            if b.is_zero() || d1 + d2 > dmax {
                continue;
            }
            let mut v = pair(a, &b)?;
            if m % 2 != 0 {
                v = -v;
            }
            out.insert_truncating(vec![d1 + d2], 0, v);
        }
    }
    Ok(out)
}

/// `Ω(f, g) = Res_{z=0} (f(−z), g(z))_orb dz` as a Novikov series.
pub fn symplectic_form(t: &TargetModel, f: &GiventalElement, g: &GiventalElement) -> Result<TruncSeries, Error> {
    omega_with(f, g, |a, b| t.orbifold_pairing(a, b))
}

/// The same residue with the `(c, F)`-twisted pairing.
pub fn twisted_symplectic_form(
    t: &TargetModel,
    bundle: &BundleModel,
    s: &SValues,
    f: &GiventalElement,
    g: &GiventalElement,
) -> Result<TruncSeries, Error> {
    let c = ExpClass::of(t, &bundle.invariant_ch(t), s).realize(t, s)?;
    omega_with(f, g, |a, b| t.orbifold_pairing(&t.mul(a, &c), b))
}

/// `√c((q^*F)^{inv})` as a class.
pub fn sqrt_twist(t: &TargetModel, bundle: &BundleModel, s: &SValues) -> Result<CohClass, Error> {
    ExpClass::of(t, &bundle.invariant_ch(t), s)
        .sqrt()
        .realize(t, s)
        .map_err(|e| Error::NonUnitTwist(format!("no square root of c((q*F)^inv): {e}")))
}

/// `a ↦ a·√c((q^*F)^{inv})`, identifying the twisted and untwisted symplectic spaces.
pub fn twist_identification(
    t: &TargetModel,
    bundle: &BundleModel,
    s: &SValues,
    f: &GiventalElement,
) -> Result<GiventalElement, Error> {
    let root = sqrt_twist(t, bundle, s)?;
    Ok(f.map_classes(|c| t.mul(c, &root)))
}

/// `q(z) = t(z) − 1z`, or `√c((q^*F)^{inv})·(t(z) − 1z)` when a twist is given.
///
/// With the Euler specialization pass `s.in_sqrt_variable()`: the result is
/// then expressed in `x = √λ`.
pub fn dilaton_shift(
    t: &TargetModel,
    tvec: &GiventalElement,
    twist: Option<(&BundleModel, &SValues)>,
) -> Result<GiventalElement, Error> {
    tvec.check_target(t)?;
    let shifted = tvec.sub(&GiventalElement::monomial(t.one(), 1));
    match twist {
        None => Ok(shifted),
        Some((f, s)) => twist_identification(t, f, s, &shifted),
    }
}
