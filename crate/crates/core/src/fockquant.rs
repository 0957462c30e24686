//! Quantization of quadratic Hamiltonians `A = B z^m` as differential operators
//! on truncated polynomials in the Darboux coordinates `q_k^α`.
//!
//! Operators are finite sums of the three shapes `ħ^{-1} q q`, `q ∂` and `ħ ∂∂`
//! plus a scalar. Products of operators are formed in normal order (all `q`s to
//! the left of all `∂`s), which is enough to take commutators exactly.

use std::collections::BTreeMap;

use crate::exactalg::{Matrix, Rational, Scalar};
use crate::genus0::CorrelatorTable;
use crate::loopops::adjoint_matrix;
use crate::orbtarget::{CohClass, TargetModel};
use crate::Error;

/// `q_k^α` as `(k, α)` with `α` a global basis index.
pub type Var = (u32, usize);
pub type Monomial = BTreeMap<Var, u32>;

fn mono_degree(m: &Monomial) -> u32 {
    m.values().sum()
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (v, e) in b {
        *out.entry(*v).or_insert(0) += e;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockPolynomial {
    pub k_max: u32,
    pub dim: usize,
    /// Terms of total degree above this are dropped.
    pub max_degree: u32,
    terms: BTreeMap<(i32, Monomial), Scalar>,
}

impl FockPolynomial {
    pub fn new(k_max: u32, dim: usize, max_degree: u32) -> Self {
        FockPolynomial { k_max, dim, max_degree, terms: BTreeMap::new() }
    }

    pub fn like(&self) -> Self {
        Self::new(self.k_max, self.dim, self.max_degree)
    }

    fn check_var(&self, v: Var) -> Result<(), Error> {
        if v.0 > self.k_max || v.1 >= self.dim {
            return Err(Error::IndexOverflow(format!(
                "q_{}^{} is outside k ≤ {}, α < {}",
                v.0, v.1, self.k_max, self.dim
            )));
        }
        Ok(())
    }

    /// Adds `c·ħ^h·mono`; monomials above the degree cutoff are dropped.
    pub fn add_term(&mut self, h: i32, mono: Monomial, c: Scalar) -> Result<(), Error> {
        for v in mono.keys() {
            self.check_var(*v)?;
        }
        if c.is_zero() || mono_degree(&mono) > self.max_degree {
            return Ok(());
        }
        let key = (h, mono.into_iter().filter(|(_, e)| *e > 0).collect());
        let e = self.terms.entry(key).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
        Ok(())
    }

    pub fn var(k_max: u32, dim: usize, max_degree: u32, v: Var) -> Result<Self, Error> {
        let mut p = Self::new(k_max, dim, max_degree);
        p.add_term(0, BTreeMap::from([(v, 1)]), Scalar::one())?;
        Ok(p)
    }

    pub fn get(&self, h: i32, mono: &Monomial) -> Scalar {
        self.terms.get(&(h, mono.clone())).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &Monomial, &Scalar)> {
        self.terms.iter().map(|((h, m), c)| (*h, m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for ((h, m), c) in &o.terms {
            out.add_term(*h, m.clone(), c.clone()).expect("same bounds");
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = self.like();
        for ((h, m), x) in &self.terms {
            out.add_term(*h, m.clone(), x * c).expect("same bounds");
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = self.like();
        for ((h1, m1), c1) in &self.terms {
            for ((h2, m2), c2) in &o.terms {
                out.add_term(h1 + h2, mono_mul(m1, m2), c1 * c2).expect("same bounds");
            }
        }
        out
    }

    pub fn derivative(&self, v: Var) -> Result<Self, Error> {
        self.check_var(v)?;
        let mut out = self.like();
        for ((h, m), c) in &self.terms {
            if let Some(&e) = m.get(&v) {
                let mut m2 = m.clone();
                m2.insert(v, e - 1);
                out.add_term(*h, m2, c * &Scalar::from_int(e as i64))?;
            }
        }
        Ok(out)
    }

    /// Keeps only the terms of total degree at most `d`.
    pub fn truncate_degree(&self, d: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|(_, m), _| mono_degree(m) <= d);
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    /// `ħ^{-1} q_a q_b`
    QQ,
    /// `q_a ∂/∂q_b`
    QD,
    /// `ħ ∂/∂q_a ∂/∂q_b`
    DD,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    pub k_max: u32,
    pub dim: usize,
    pub terms: BTreeMap<(Shape, Var, Var), Scalar>,
    pub constant: Scalar,
}

impl FockOperator {
    pub fn zero(k_max: u32, dim: usize) -> Self {
        FockOperator { k_max, dim, terms: BTreeMap::new(), constant: Scalar::zero() }
    }

    pub fn add_term(&mut self, shape: Shape, a: Var, b: Var, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let (a, b) = if shape != Shape::QD && b < a { (b, a) } else { (a, b) };
        let e = self.terms.entry((shape, a, b)).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&(shape, a, b));
        }
    }

    pub fn get(&self, shape: Shape, a: Var, b: Var) -> Scalar {
        let (a, b) = if shape != Shape::QD && b < a { (b, a) } else { (a, b) };
        self.terms.get(&(shape, a, b)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for ((s, a, b), c) in &o.terms {
            out.add_term(*s, *a, *b, c.clone());
        }
        out.constant += &o.constant;
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.k_max, self.dim);
        for ((s, a, b), x) in &self.terms {
            out.add_term(*s, *a, *b, x * c);
        }
        out.constant = &self.constant * c;
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Scalar::from_int(-1)))
    }

    /// Drops every term that involves a variable `q_k` with `k > kappa`.
    pub fn restrict_to(&self, kappa: u32) -> Self {
        let mut out = self.clone();
        out.terms.retain(|(_, a, b), _| a.0 <= kappa && b.0 <= kappa);
        out
    }

    pub fn apply(&self, p: &FockPolynomial) -> Result<FockPolynomial, Error> {
        let mut out = p.scale(&self.constant);
        for ((s, a, b), c) in &self.terms {
            p.check_var(*a)?;
            p.check_var(*b)?;
            let part = match s {
                Shape::QQ => {
                    let mut m = FockPolynomial::new(p.k_max, p.dim, p.max_degree);
                    m.add_term(-1, mono_mul(&BTreeMap::from([(*a, 1)]), &BTreeMap::from([(*b, 1)])), Scalar::one())?;
                    m.mul(p)
                }
                Shape::QD => FockPolynomial::var(p.k_max, p.dim, p.max_degree, *a)?.mul(&p.derivative(*b)?),
                Shape::DD => {
                    let d2 = p.derivative(*b)?.derivative(*a)?;
                    let mut h = FockPolynomial::new(p.k_max, p.dim, p.max_degree);
                    h.add_term(1, Monomial::new(), Scalar::one())?;
                    h.mul(&d2)
                }
            };
            out = out.add(&part.scale(c));
        }
        Ok(out)
    }
}

/// `c · ħ^h · q^Q ∂^D` in normal order.
type NoKey = (i32, Monomial, Monomial);

fn to_normal_order(op: &FockOperator) -> BTreeMap<NoKey, Scalar> {
    let mut out: BTreeMap<NoKey, Scalar> = BTreeMap::new();
    let pair = |a: Var, b: Var| mono_mul(&BTreeMap::from([(a, 1)]), &BTreeMap::from([(b, 1)]));
    for ((s, a, b), c) in &op.terms {
        let key = match s {
            Shape::QQ => (-1, pair(*a, *b), Monomial::new()),
            Shape::QD => (0, BTreeMap::from([(*a, 1)]), BTreeMap::from([(*b, 1)])),
            Shape::DD => (1, Monomial::new(), pair(*a, *b)),
        };
        *out.entry(key).or_default() += c;
    }
    if !op.constant.is_zero() {
        *out.entry((0, Monomial::new(), Monomial::new())).or_default() += &op.constant;
    }
    out
}

fn falling(n: u32, j: u32) -> i64 {
    (0..j).map(|i| (n - i) as i64).product()
}

fn binom(n: u32, j: u32) -> i64 {
    falling(n, j) / falling(j, j)
}

/// `∂^b q^c = Σ_J ∏_v binom(b_v, j_v) c_v!/(c_v − j_v)! · q^{c−J} ∂^{b−J}`.
fn reorder(b: &Monomial, c: &Monomial) -> Vec<(Monomial, Monomial, i64)> {
    let shared: Vec<(Var, u32, u32)> =
        b.iter().filter_map(|(v, &eb)| c.get(v).map(|&ec| (*v, eb, ec))).collect();
    let mut out = vec![(c.clone(), b.clone(), 1i64)];
    for (v, eb, ec) in shared {
        let mut next = Vec::new();
        for (q, d, w) in &out {
            for j in 0..=eb.min(ec) {
                let mut q2 = q.clone();
                let mut d2 = d.clone();
                q2.insert(v, ec - j);
                d2.insert(v, eb - j);
                next.push((q2, d2, w * binom(eb, j) * falling(ec, j)));
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|(q, d, w)| (q.into_iter().filter(|(_, e)| *e > 0).collect(), d.into_iter().filter(|(_, e)| *e > 0).collect(), w))
        .collect()
}

fn no_product(x: &BTreeMap<NoKey, Scalar>, y: &BTreeMap<NoKey, Scalar>) -> BTreeMap<NoKey, Scalar> {
    let mut out: BTreeMap<NoKey, Scalar> = BTreeMap::new();
    for ((h1, q1, d1), c1) in x {
        for ((h2, q2, d2), c2) in y {
            let c = c1 * c2;
            for (qm, dm, w) in reorder(d1, q2) {
                let key = (h1 + h2, mono_mul(q1, &qm), mono_mul(&dm, d2));
                *out.entry(key).or_default() += &(&c * &Scalar::from_int(w));
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `[a, b]`; quartic parts cancel, so the result is again quadratic plus a scalar.
pub fn commutator(a: &FockOperator, b: &FockOperator) -> Result<FockOperator, Error> {
    let (x, y) = (to_normal_order(a), to_normal_order(b));
    let mut diff = no_product(&x, &y);
    for (k, c) in no_product(&y, &x) {
        let e = diff.entry(k).or_default();
        *e -= &c;
    }
    let mut out = FockOperator::zero(a.k_max.max(b.k_max), a.dim);
    for ((h, q, d), c) in diff {
        if c.is_zero() {
            continue;
        }
        let qs: Vec<Var> = q.iter().flat_map(|(v, e)| std::iter::repeat_n(*v, *e as usize)).collect();
        let ds: Vec<Var> = d.iter().flat_map(|(v, e)| std::iter::repeat_n(*v, *e as usize)).collect();
        match (h, qs.len(), ds.len()) {
            (-1, 2, 0) => out.add_term(Shape::QQ, qs[0], qs[1], c),
            (0, 1, 1) => out.add_term(Shape::QD, qs[0], ds[0], c),
            (1, 0, 2) => out.add_term(Shape::DD, ds[0], ds[1], c),
            (0, 0, 0) => out.constant += &c,
            _ => {
                return Err(Error::NotInfinitesimallySymplectic(format!(
                    "commutator left a term of shape ħ^{h} q^{} ∂^{}",
                    qs.len(),
                    ds.len()
                )))
            }
        }
    }
    Ok(out)
}

/// Whether `B z^m` is infinitesimally symplectic: `B* = (−1)^{m+1} B`.
pub fn is_infinitesimally_symplectic(t: &TargetModel, b: &Matrix, m: i32) -> bool {
    let adj = adjoint_matrix(t, b);
    if m.rem_euclid(2) == 1 {
        adj == *b
    } else {
        adj.add(b).is_zero()
    }
}

fn gram_data(t: &TargetModel) -> (Matrix, Matrix) {
    let g = t.gram();
    let ginv = g.inverse().expect("pairing nondegenerate");
    (g, ginv)
}

fn sign(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        Scalar::from_int(-1)
    }
}

/// The explicit shape formulas for `(B z^m)^`, without the symplecticity check.
///
/// Sums over `k` stop where an index would exceed `k_max`.
pub fn quantize_formula(t: &TargetModel, b: &Matrix, m: i32, k_max: u32) -> FockOperator {
    let dim = t.total_dim();
    let (g, ginv) = gram_data(t);
    let lower = g.mul(b);
    let upper = b.mul(&ginv);
    let half = Scalar::frac(1, 2);
    let km = k_max as i64;
    let mm = m as i64;
    let mut op = FockOperator::zero(k_max, dim);
    // −Σ_k B^α_β q_k^β ∂_{q_{k+m}^α}
    for k in 0.max(-mm)..=km.min(km - mm) {
        for al in 0..dim {
            for be in 0..dim {
                let c = b.get(al, be);
                if !c.is_zero() {
                    op.add_term(Shape::QD, (k as u32, be), ((k + mm) as u32, al), -c.clone());
                }
            }
        }
    }
    if m < 0 {
        // (1/2ħ) Σ_{0≤k≤−m−1} (−1)^{k+m} B_{αβ} q_k^β q_{−1−k−m}^α
        for k in 0..=(-1 - mm) {
            let k2 = -1 - k - mm;
            if k > km || k2 > km {
                continue;
            }
            for al in 0..dim {
                for be in 0..dim {
                    let c = &(&sign(k + mm) * &half) * lower.get(al, be);
                    op.add_term(Shape::QQ, (k as u32, be), (k2 as u32, al), c);
                }
            }
        }
    } else if m > 0 {
        // (ħ/2) Σ_{0≤k≤m−1} (−1)^k B^{αβ} ∂_{q_k^β} ∂_{q_{m−1−k}^α}
        for k in 0..mm {
            let k2 = mm - 1 - k;
            if k > km || k2 > km {
                continue;
            }
            for al in 0..dim {
                for be in 0..dim {
                    let c = &(&sign(k) * &half) * upper.get(al, be);
                    op.add_term(Shape::DD, (k as u32, be), (k2 as u32, al), c);
                }
            }
        }
    }
    op
}

/// `(B z^m)^`, refusing operators that are not infinitesimally symplectic.
pub fn quantize_monomial(t: &TargetModel, b: &Matrix, m: i32, k_max: u32) -> Result<FockOperator, Error> {
    if b.rows() != t.total_dim() || b.cols() != t.total_dim() {
        return Err(Error::BasisMismatch(format!("B is {}×{}, target has rank {}", b.rows(), b.cols(), t.total_dim())));
    }
    if !is_infinitesimally_symplectic(t, b, m) {
        return Err(Error::NotInfinitesimallySymplectic(format!("B z^{m} fails B* = (−1)^(m+1) B")));
    }
    Ok(quantize_formula(t, b, m, k_max))
}

/// A Darboux coordinate: `q_k^α` or `p_{k,α}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Darboux {
    Q(u32, usize),
    P(u32, usize),
}

/// `h_A(f) = ½ Ω(Af, f)` as a quadratic form in Darboux coordinates with indices `≤ k_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    pub terms: BTreeMap<(Darboux, Darboux), Scalar>,
}

fn basis_vector(t: &TargetModel, ginv: &Matrix, x: Darboux) -> BTreeMap<i32, CohClass> {
    match x {
        Darboux::Q(k, a) => {
            let (i, j) = t.locate(a);
            BTreeMap::from([(k as i32, CohClass::basis(i, j))])
        }
        Darboux::P(k, a) => {
            // φ^α (−z)^{−1−k}
            let n = -1 - k as i32;
            let mut c = CohClass::zero();
            for b in 0..t.total_dim() {
                let (i, j) = t.locate(b);
                c.add_term(i, j, ginv.get(a, b).clone());
            }
            BTreeMap::from([(n, c.scale(&sign(n as i64)))])
        }
    }
}

fn omega(t: &TargetModel, f: &BTreeMap<i32, CohClass>, g: &BTreeMap<i32, CohClass>) -> Scalar {
    let mut acc = Scalar::zero();
    for (a, x) in f {
        if let Some(y) = g.get(&(-1 - a)) {
            let v = t.orbifold_pairing(x, y).expect("valid classes");
            acc += &(&sign(*a as i64) * &v);
        }
    }
    acc
}

pub fn darboux_hamiltonian(t: &TargetModel, b: &Matrix, m: i32, k_max: u32) -> Hamiltonian {
    let (_, ginv) = gram_data(t);
    let dim = t.total_dim();
    let mut coords = Vec::new();
    for k in 0..=k_max {
        for a in 0..dim {
            coords.push(Darboux::Q(k, a));
            coords.push(Darboux::P(k, a));
        }
    }
    let vecs: Vec<BTreeMap<i32, CohClass>> = coords.iter().map(|&x| basis_vector(t, &ginv, x)).collect();
    let apply = |v: &BTreeMap<i32, CohClass>| -> BTreeMap<i32, CohClass> {
        v.iter()
            .map(|(n, c)| (n + m, t.vec_to_class(&b.mul_vec(&t.class_to_vec(c)))))
            .collect()
    };
    let avecs: Vec<_> = vecs.iter().map(apply).collect();
    let half = Scalar::frac(1, 2);
    let mut terms: BTreeMap<(Darboux, Darboux), Scalar> = BTreeMap::new();
    for (i, ai) in avecs.iter().enumerate() {
        for (j, ej) in vecs.iter().enumerate() {
            let w = omega(t, ai, ej);
            if w.is_zero() {
                continue;
            }
            let key = if coords[i] <= coords[j] { (coords[i], coords[j]) } else { (coords[j], coords[i]) };
            *terms.entry(key).or_default() += &(&w * &half);
        }
    }
    terms.retain(|_, c| !c.is_zero());
    Hamiltonian { terms }
}

impl Hamiltonian {
    /// `q q ↦ ħ^{-1} q q`, `q p ↦ q ∂`, `p p ↦ ħ ∂∂`.
    pub fn quantize(&self, k_max: u32, dim: usize) -> FockOperator {
        let mut op = FockOperator::zero(k_max, dim);
        for ((x, y), c) in &self.terms {
            match (*x, *y) {
                (Darboux::Q(k, a), Darboux::Q(l, b)) => op.add_term(Shape::QQ, (k, a), (l, b), c.clone()),
                (Darboux::Q(k, a), Darboux::P(l, b)) => op.add_term(Shape::QD, (k, a), (l, b), c.clone()),
                (Darboux::P(k, a), Darboux::Q(l, b)) => op.add_term(Shape::QD, (l, b), (k, a), c.clone()),
                (Darboux::P(k, a), Darboux::P(l, b)) => op.add_term(Shape::DD, (k, a), (l, b), c.clone()),
            }
        }
        op
    }
}

fn var_of(x: Darboux) -> Var {
    match x {
        Darboux::Q(k, a) | Darboux::P(k, a) => (k, a),
    }
}

fn delta(a: Var, b: Var) -> i64 {
    (a == b) as i64
}

/// `C(p_a p_b, q_c q_d) = δ_ac δ_bd + δ_ad δ_bc`, antisymmetric, zero on other pairs.
fn cocycle_on(x: (Darboux, Darboux), y: (Darboux, Darboux)) -> i64 {
    let pp = |p: (Darboux, Darboux)| matches!(p, (Darboux::P(..), Darboux::P(..)));
    let qq = |p: (Darboux, Darboux)| matches!(p, (Darboux::Q(..), Darboux::Q(..)));
    let c = |p: (Darboux, Darboux), q: (Darboux, Darboux)| {
        let (a, b, c, d) = (var_of(p.0), var_of(p.1), var_of(q.0), var_of(q.1));
        delta(a, c) * delta(b, d) + delta(a, d) * delta(b, c)
    };
    if pp(x) && qq(y) {
        c(x, y)
    } else if qq(x) && pp(y) {
        -c(y, x)
    } else {
        0
    }
}

/// The cocycle `C(h_A, h_B)` evaluated term by term on the Darboux Hamiltonians.
pub fn cocycle_formula(ha: &Hamiltonian, hb: &Hamiltonian) -> Scalar {
    let mut acc = Scalar::zero();
    for (x, cx) in &ha.terms {
        for (y, cy) in &hb.terms {
            let w = cocycle_on(*x, *y);
            if w != 0 {
                acc += &(&(cx * cy) * &Scalar::from_int(w));
            }
        }
    }
    acc
}

/// The scalar part of `[Â, Â′] − ([A, A′])^`, away from the truncation boundary.
pub fn commutator_cocycle(
    t: &TargetModel,
    a: (&Matrix, i32),
    b: (&Matrix, i32),
    k_max: u32,
) -> Result<Scalar, Error> {
    let reach = a.1.unsigned_abs() + b.1.unsigned_abs();
    if k_max < reach + 2 {
        return Err(Error::TruncationTooNarrow(format!("K = {k_max} but the pair needs K ≥ {}", reach + 2)));
    }
    let qa = quantize_monomial(t, a.0, a.1, k_max)?;
    let qb = quantize_monomial(t, b.0, b.1, k_max)?;
    let comm = commutator(&qa, &qb)?;
    let bracket = a.0.mul(b.0).sub(&b.0.mul(a.0));
    let qbracket = quantize_formula(t, &bracket, a.1 + b.1, k_max);
    let residual = comm.sub(&qbracket).restrict_to(k_max - reach);
    if let Some(((s, x, y), c)) = residual.terms.iter().next() {
        return Err(Error::TruncationTooNarrow(format!(
            "residual keeps a {s:?} term {c} at q_{}^{}, q_{}^{}",
            x.0, x.1, y.0, y.1
        )));
    }
    Ok(residual.constant)
}

/// `F^0(t) = Σ_n (1/n!) Σ ⟨τ_{k_1}(φ_{a_1}) ⋯⟩ t_{k_1}^{a_1} ⋯`, for `n ≤ nmax`, `d = 0`.
pub fn genus0_potential(table: &CorrelatorTable, dim: usize, k_max: u32, nmax: usize) -> Result<FockPolynomial, Error> {
    let mut f = FockPolynomial::new(k_max, dim, nmax as u32);
    for (key, (v, _)) in &table.entries {
        if key.d != 0 || key.n() > nmax {
            continue;
        }
        let mut mono = Monomial::new();
        for &(a, k) in &key.insertions {
            *mono.entry((k, a)).or_insert(0) += 1;
        }
        let sym: Rational = mono
            .values()
            .map(|&e| (1..=e as i64).fold(Rational::from_integer(1.into()), |a, x| a * Rational::from_integer(x.into())))
            .product();
        f.add_term(0, mono, v.scale(&sym.recip()))?;
    }
    Ok(f)
}

/// The `ħ^{-1}` part of `e^{-F/ħ} Â e^{F/ħ}` with `q = t − 1·z` substituted
/// (so `q_1^0 = t_1^0 − 1`), as a polynomial in `t`.
pub fn genus0_residual(op: &FockOperator, f: &FockPolynomial) -> Result<FockPolynomial, Error> {
    let shifted = |v: Var| -> Result<FockPolynomial, Error> {
        let mut p = FockPolynomial::var(f.k_max, f.dim, f.max_degree, v)?;
        if v == (1, 0) {
            p.add_term(0, Monomial::new(), Scalar::from_int(-1))?;
        }
        Ok(p)
    };
    let mut out = f.like();
    for ((s, a, b), c) in &op.terms {
        let part = match s {
            Shape::QQ => shifted(*a)?.mul(&shifted(*b)?),
            Shape::QD => shifted(*a)?.mul(&f.derivative(*b)?),
            Shape::DD => f.derivative(*a)?.mul(&f.derivative(*b)?),
        };
        out = out.add(&part.scale(c));
    }
    Ok(out)
}

/// Residual of `(1/z)^` on the genus-zero potential built from `table`, through
/// the degrees that the table determines completely (`≤ nmax − 1`).
pub fn string_residual(t: &TargetModel, table: &CorrelatorTable, k_max: u32, nmax: usize) -> Result<FockPolynomial, Error> {
    let dim = t.total_dim();
    let op = quantize_monomial(t, &Matrix::identity(dim), -1, k_max)?;
    let f = genus0_potential(table, dim, k_max, nmax)?;
    Ok(genus0_residual(&op, &f)?.truncate_degree(nmax as u32 - 1))
}

/// Human-readable term list, e.g. `-1/2 ħ^-1 q0_0 q0_0`.
pub fn describe(op: &FockOperator) -> Vec<String> {
    let mut out: Vec<String> = op
        .terms
        .iter()
        .map(|((s, a, b), c)| match s {
            Shape::QQ => format!("({c}) hbar^-1 q{}_{} q{}_{}", a.0, a.1, b.0, b.1),
            Shape::QD => format!("({c}) q{}_{} d/dq{}_{}", a.0, a.1, b.0, b.1),
            Shape::DD => format!("({c}) hbar d/dq{}_{} d/dq{}_{}", a.0, a.1, b.0, b.1),
        })
        .collect();
    if !op.constant.is_zero() {
        out.push(format!("({})", op.constant));
    }
    out
}
