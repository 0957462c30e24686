//! Loop operators: the classes `A_m`, `log Δ`, `Δ`, adjoints and the
//! symplectomorphism check `M*(−z)M(z) = 1`.
//!
//! Operators are Laurent series in z with dense matrix coefficients over the
//! global basis of H*(IX). A component-wise constant `e^{s_0·φ_i}` is kept apart
//! as the rational multiple `φ_i`, since `s_0` may be `ln λ`.

use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

use crate::bernoulli::bernoulli_value;
use crate::exactalg::{scalar_to_json, Matrix, Rational, Scalar};
use crate::giventalspace::GiventalElement;
use crate::orbtarget::{BundleModel, CohClass, ExpClass, TargetModel};
use crate::Error;

pub use crate::orbtarget::SValues;

/// `s_0 = ln λ` (or 0), `s_k = (−1)^{k−1}(k−1)!/λ^k`.
pub fn euler_s_values(kmax: usize, include_log: bool) -> SValues {
    let mut s = Vec::with_capacity(kmax + 1);
    s.push(if include_log { Scalar::ell() } else { Scalar::zero() });
    let mut fact = Rational::one();
    for k in 1..=kmax {
        if k > 1 {
            fact *= Rational::from_integer((k as i64 - 1).into());
        }
        let sign = if k % 2 == 1 { Rational::one() } else { -Rational::one() };
        s.push(Scalar::lambda_pow(-(k as i32)).scale(&(&fact * sign)));
    }
    let mut v = SValues::from_list(s);
    if include_log {
        v.exp_s0 = Some(Scalar::lambda());
        v.exp_half_s0 = None;
    }
    v
}

/// `A_m|_{X_i} = Σ_l ch(F_i^{(l)}) B_m(l/r_i)`.
pub fn class_am(t: &TargetModel, f: &BundleModel, m: usize) -> CohClass {
    let mut out = CohClass::zero();
    for (&(i, l), e) in &f.eigen {
        let b = bernoulli_value(m, &Rational::new(l.into(), t.components[i].r.into()));
        if !b.is_zero() {
            out = out.add(&e.ch.scale(&Scalar::from_rational(b)));
        }
    }
    out
}

/// `φ_i = Σ_{0<l<r_i} (l/r_i − 1/2)·rank F_i^{(l)}`: the `s_0`-part of the `z^0` term.
pub fn s0_phase(t: &TargetModel, f: &BundleModel, i: usize) -> Rational {
    let r = t.components[i].r;
    let half = Rational::new(1.into(), 2.into());
    (1..r).fold(Rational::zero(), |acc, l| {
        acc + (Rational::new(l.into(), r.into()) - &half) * Rational::from_integer(f.eigen_rank(i, l).into())
    })
}

fn factorial(m: usize) -> Rational {
    (1..=m).fold(Rational::one(), |acc, k| acc * Rational::from_integer((k as i64).into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopOperator {
    dim: usize,
    pub zmin: i32,
    pub zmax: i32,
    /// When set, all coefficients above `zmax` vanish; otherwise they are unknown.
    pub exact: bool,
    blocks: BTreeMap<i32, Matrix>,
    /// Exponent of the constant factor `e^{s_0·phase}` per global basis index.
    pub phase: Vec<Rational>,
}

impl LoopOperator {
    pub fn zero(dim: usize, zmin: i32, zmax: i32, exact: bool) -> Self {
        LoopOperator { dim, zmin, zmax, exact, blocks: BTreeMap::new(), phase: vec![Rational::zero(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim, 0, 0, true);
        m.set_block(0, Matrix::identity(dim));
        m
    }

    /// Exact Laurent polynomial `Σ M_n z^n`.
    pub fn from_blocks(dim: usize, blocks: Vec<(i32, Matrix)>) -> Self {
        let zmin = blocks.iter().map(|b| b.0).min().unwrap_or(0);
        let zmax = blocks.iter().map(|b| b.0).max().unwrap_or(0);
        let mut m = Self::zero(dim, zmin, zmax, true);
        for (n, b) in blocks {
            m.add_block(n, &b);
        }
        m
    }

    /// Exact operator of multiplication by `Σ c_n z^n`.
    pub fn multiplication(t: &TargetModel, classes: &[(i32, CohClass)]) -> Self {
        Self::from_blocks(t.total_dim(), classes.iter().map(|(n, c)| (*n, t.multiplication_matrix(c))).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, n: i32) -> Matrix {
        self.blocks.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(self.dim, self.dim))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (i32, &Matrix)> {
        self.blocks.iter().map(|(n, m)| (*n, m))
    }

    fn set_block(&mut self, n: i32, m: Matrix) {
        if m.is_zero() {
            self.blocks.remove(&n);
        } else {
            self.blocks.insert(n, m);
        }
    }

    fn add_block(&mut self, n: i32, m: &Matrix) {
        if n < self.zmin || (n > self.zmax && !self.exact) {
            return;
        }
        if n > self.zmax {
            self.zmax = n;
        }
        let cur = self.block(n).add(m);
        self.set_block(n, cur);
    }

    pub fn has_phase(&self) -> bool {
        self.phase.iter().any(|p| !p.is_zero())
    }

    pub fn truncate(&self, zmax: i32) -> Self {
        let mut out = self.clone();
        if self.exact && zmax >= self.zmax {
            return out;
        }
        out.exact = false;
        out.zmax = zmax.min(self.zmax);
        let cut = out.zmax;
        out.blocks.retain(|n, _| *n <= cut);
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let zmax = match (self.exact, o.exact) {
            (true, true) => self.zmax.max(o.zmax),
            (true, false) => o.zmax,
            (false, true) => self.zmax,
            (false, false) => self.zmax.min(o.zmax),
        };
        let mut out = Self::zero(self.dim, self.zmin.min(o.zmin), zmax, self.exact && o.exact);
        for (n, b) in self.blocks.iter().chain(o.blocks.iter()) {
            out.add_block(*n, b);
        }
        out.phase = self.phase.iter().zip(&o.phase).map(|(a, b)| a + b).collect();
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = self.clone();
        for b in out.blocks.values_mut() {
            *b = b.scale(c);
        }
        out.blocks.retain(|_, b| !b.is_zero());
        out
    }

    /// Product of Laurent series; phases add (they commute with component-diagonal blocks).
    pub fn mul(&self, o: &Self) -> Self {
        let mut zmax = i32::MAX;
        if !self.exact {
            zmax = zmax.min(self.zmax + o.zmin);
        }
        if !o.exact {
            zmax = zmax.min(o.zmax + self.zmin);
        }
        let exact = self.exact && o.exact;
        if exact {
            zmax = self.zmax + o.zmax;
        }
        let mut out = Self::zero(self.dim, self.zmin + o.zmin, zmax, exact);
        for (a, ma) in &self.blocks {
            for (b, mb) in &o.blocks {
                if a + b <= zmax {
                    out.add_block(a + b, &ma.mul(mb));
                }
            }
        }
        out.phase = self.phase.iter().zip(&o.phase).map(|(a, b)| a + b).collect();
        out
    }

    /// `exp(X)` with every product cut off above `z^{cut}`, treating the stored
    /// blocks of X as exact. The nonpositive z-coefficients of X must be nilpotent.
    pub fn exp_truncated(&self, cut: i32) -> Result<Self, Error> {
        let mut out = Self::identity(self.dim);
        out.exact = false;
        out.zmax = cut;
        let mut term: BTreeMap<i32, Matrix> = BTreeMap::from([(0, Matrix::identity(self.dim))]);
        let mut k = 1i64;
        while !term.is_empty() {
            if k > 10_000 {
                return Err(Error::TruncationTooNarrow("exponential series does not terminate".into()));
            }
            let inv_k = Scalar::frac(1, k);
            let mut next: BTreeMap<i32, Matrix> = BTreeMap::new();
            for (a, ma) in &term {
                for (b, mb) in &self.blocks {
                    if a + b > cut {
                        continue;
                    }
                    let p = ma.mul(mb).scale(&inv_k);
                    let e = next.entry(a + b).or_insert_with(|| Matrix::zeros(self.dim, self.dim));
                    *e = e.add(&p);
                }
            }
            next.retain(|_, m| !m.is_zero());
            for (n, m) in &next {
                if *n < out.zmin {
                    out.zmin = *n;
                }
                out.add_block(*n, m);
            }
            term = next;
            k += 1;
        }
        out.phase = self.phase.clone();
        Ok(out)
    }

    /// Adjoint with respect to the bilinear form with Gram matrix `g`: `G⁻¹MᵀG`.
    pub fn adjoint_with(&self, g: &Matrix, partner: &[usize]) -> Result<Self, Error> {
        let gi = g.inverse().ok_or_else(|| Error::InvariantViolation("pairing nondegenerate".into()))?;
        let mut out = Self::zero(self.dim, self.zmin, self.zmax, self.exact);
        for (n, m) in &self.blocks {
            out.set_block(*n, gi.mul(&m.transpose()).mul(g));
        }
        out.phase = partner.iter().map(|&h| self.phase[h].clone()).collect();
        Ok(out)
    }

    pub fn adjoint(&self, t: &TargetModel) -> Result<Self, Error> {
        self.adjoint_with(&t.gram(), &partner_map(t))
    }

    /// `M(z) ↦ M(−z)`.
    pub fn reflect(&self) -> Self {
        let mut out = self.clone();
        for (n, b) in out.blocks.iter_mut() {
            if n % 2 != 0 {
                *b = b.scale(&Scalar::from_int(-1));
            }
        }
        out
    }

    /// `(Mf)(z)`; the operator must carry no formal phase.
    pub fn apply(&self, t: &TargetModel, f: &GiventalElement) -> Result<GiventalElement, Error> {
        if self.has_phase() {
            return Err(Error::InvalidParams("cannot apply an operator with a formal e^(s_0) phase".into()));
        }
        if f.truncated_below && !self.exact {
            return Err(Error::TruncationTooNarrow("operator and element are truncated on opposite sides".into()));
        }
        let mut zmax = f.zmax + self.zmax;
        if f.truncated_above {
            zmax = zmax.min(f.zmax + self.zmin);
        }
        if !self.exact {
            zmax = zmax.min(self.zmax + f.zmin);
        }
        let zmin = if f.truncated_below { f.zmin + self.zmax } else { f.zmin + self.zmin };
        let above = f.truncated_above || !self.exact;
        let mut out = GiventalElement::new(f.dmax, zmin, zmax.max(zmin)).truncated(above, f.truncated_below);
        for (n, d, c) in f.iter() {
            let v = t.class_to_vec(c);
            for (a, m) in &self.blocks {
                if n + a > zmax {
                    continue;
                }
                out.add_class(n + a, d, &t.vec_to_class(&m.mul_vec(&v)));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self, t: &TargetModel) -> Value {
        let mut rows = Vec::new();
        for (n, m) in &self.blocks {
            for g in 0..self.dim {
                for h in 0..self.dim {
                    let v = m.get(g, h);
                    if v.is_zero() {
                        continue;
                    }
                    let (i, a) = t.locate(g);
                    let (j, b) = t.locate(h);
                    rows.push(json!({
                        "zpow": n,
                        "row": { "component": t.components[i].id, "basis": t.components[i].basis[a].name },
                        "col": { "component": t.components[j].id, "basis": t.components[j].basis[b].name },
                        "coeff": scalar_to_json(v),
                    }));
                }
            }
        }
        let phase: Vec<Value> = t
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| json!({ "component": c.id, "s0_multiple": self.phase[t.offset(i)].to_string() }))
            .collect();
        json!({ "zmin": self.zmin, "zmax": self.zmax, "exact": self.exact, "blocks": rows, "phase": phase })
    }
}

/// Global index ↦ the same basis index on the involution partner component.
pub fn partner_map(t: &TargetModel) -> Vec<usize> {
    (0..t.total_dim())
        .map(|g| {
            let (i, a) = t.locate(g);
            t.global_index(t.components[i].involution, a)
        })
        .collect()
}

/// Adjoint of a single endomorphism with respect to `(·,·)_orb`.
pub fn adjoint_matrix(t: &TargetModel, m: &Matrix) -> Matrix {
    let g = t.gram();
    g.inverse().expect("validated pairing").mul(&m.transpose()).mul(&g)
}

/// Gram matrix of the `(c, F)`-twisted pairing.
pub fn twisted_gram(t: &TargetModel, f: &BundleModel, s: &SValues) -> Result<Matrix, Error> {
    let c = ExpClass::of(t, &f.invariant_ch(t), s).realize(t, s)?;
    Ok(t.multiplication_matrix(&c).transpose().mul(&t.gram()))
}

/// Options for [`log_delta_with`].
#[derive(Clone, Copy, Debug)]
pub struct LogDeltaOptions {
    pub include_z_inverse: bool,
    pub include_s0_phase: bool,
}

impl Default for LogDeltaOptions {
    fn default() -> Self {
        LogDeltaOptions { include_z_inverse: true, include_s0_phase: true }
    }
}

/// `log Δ` restricted to each component, as classes per z-power.
pub fn log_delta_classes(
    t: &TargetModel,
    f: &BundleModel,
    s: &SValues,
    zmax: i32,
    opts: LogDeltaOptions,
) -> BTreeMap<i32, CohClass> {
    let hmax = t.max_component_dim() as usize;
    let mut out: BTreeMap<i32, CohClass> = BTreeMap::new();
    let mut push = |n: i32, c: CohClass| {
        if !c.is_zero() {
            let e = out.entry(n).or_default();
            *e = e.add(&c);
        }
    };
    for m in 0..=(zmax + 1).max(0) as usize {
        if m == 0 && !opts.include_z_inverse {
            continue;
        }
        let am = class_am(t, f, m);
        let inv_fact = Scalar::from_rational(Rational::one() / factorial(m));
        for h in 0..=hmax {
            if m + h == 0 {
                continue;
            }
            let k = m + h - 1;
            if k == 0 && !opts.include_s0_phase && m == 1 {
                continue;
            }
            let sk = s.get(k);
            if sk.is_zero() {
                continue;
            }
            push(m as i32 - 1, t.degree_part(&am, h as u32).scale(&(&sk * &inv_fact)));
        }
    }
    let inv = f.invariant_ch(t);
    let half = Scalar::frac(1, 2);
    for k in 0..=hmax {
        if k == 0 && !opts.include_s0_phase {
            continue;
        }
        let sk = s.get(k);
        if !sk.is_zero() {
            push(0, t.degree_part(&inv, k as u32).scale(&(&sk * &half)));
        }
    }
    out.retain(|n, _| *n <= zmax);
    out
}

pub fn log_delta_with(t: &TargetModel, f: &BundleModel, s: &SValues, zmax: i32, opts: LogDeltaOptions) -> LoopOperator {
    let classes = log_delta_classes(t, f, s, zmax, opts);
    let mut op = LoopOperator::zero(t.total_dim(), -1, zmax, false);
    for (n, c) in classes {
        op.add_block(n, &t.multiplication_matrix(&c));
    }
    op
}

/// `log Δ` through `z^{zmax}`.
pub fn log_delta(t: &TargetModel, f: &BundleModel, s: &SValues, zmax: i32) -> LoopOperator {
    log_delta_with(t, f, s, zmax, LogDeltaOptions::default())
}

fn phase_vector(t: &TargetModel, f: &BundleModel, s: &SValues) -> Vec<Rational> {
    let mut ph = vec![Rational::zero(); t.total_dim()];
    if s.get(0).is_zero() {
        return ph;
    }
    for i in 0..t.components.len() {
        let q = s0_phase(t, f, i);
        for a in 0..t.components[i].basis.len() {
            ph[t.global_index(i, a)] = q.clone();
        }
    }
    ph
}

fn exp_of_log(t: &TargetModel, f: &BundleModel, s: &SValues, zmax: i32, sign: i64) -> Result<LoopOperator, Error> {
    let work = zmax + t.max_component_dim() as i32;
    let opts = LogDeltaOptions { include_z_inverse: true, include_s0_phase: false };
    let log = log_delta_with(t, f, s, work, opts).scale(&Scalar::from_int(sign));
    let mut d = log.exp_truncated(work)?.truncate(zmax);
    d.phase = phase_vector(t, f, s).into_iter().map(|p| p * Rational::from_integer(sign.into())).collect();
    Ok(d)
}

/// `Δ = exp(log Δ)` through `z^{zmax}`, with the `e^{s_0 φ_i}` factor kept formal.
pub fn delta_operator(t: &TargetModel, f: &BundleModel, s: &SValues, zmax: i32) -> Result<LoopOperator, Error> {
    exp_of_log(t, f, s, zmax, 1)
}

/// `Δ⁻¹ = exp(−log Δ)`.
pub fn delta_inverse(t: &TargetModel, f: &BundleModel, s: &SValues, zmax: i32) -> Result<LoopOperator, Error> {
    exp_of_log(t, f, s, zmax, -1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticReport {
    /// Every residual coefficient of `M*(−z)M(z) − 1` vanishes in degrees `≤ valid_through`.
    pub valid_through: i32,
    pub checked_through: i32,
    /// `(z-degree, row, column)` of the first nonzero residual entry.
    pub first_failure: Option<(i32, usize, usize)>,
    pub phase_ok: bool,
}

impl SymplecticReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none() && self.phase_ok
    }
}

/// Checks `M*(−z)M(z) = 1` in z-degrees up to `upto`.
pub fn check_symplectomorphism(t: &TargetModel, m: &LoopOperator, upto: i32) -> Result<SymplecticReport, Error> {
    if !m.exact && upto > m.zmax + m.zmin {
        return Err(Error::TruncationTooNarrow(format!(
            "M*(−z)M(z) is known through z^{} only, requested z^{upto}",
            m.zmax + m.zmin
        )));
    }
    let adj = m.adjoint(t)?.reflect();
    let prod = adj.mul(m);
    let phase_ok = prod.phase.iter().all(Zero::is_zero);
    let lo = 2 * m.zmin.min(0);
    let mut first_failure = None;
    'outer: for n in lo..=upto {
        let mut r = prod.block(n);
        if n == 0 {
            r = r.sub(&Matrix::identity(m.dim));
        }
        for g in 0..m.dim {
            for h in 0..m.dim {
                if !r.get(g, h).is_zero() {
                    first_failure = Some((n, g, h));
                    break 'outer;
                }
            }
        }
    }
    let valid_through = first_failure.map_or(upto, |(n, _, _)| n - 1);
    Ok(SymplecticReport { valid_through, checked_through: upto, first_failure, phase_ok })
}
