//! Targets, their inertia components and bundles split into eigenbundles.
//!
//! Each component carries a graded basis whose first element is the unit, an
//! explicit multiplication table for its ordinary cohomology ring, and the
//! pairing matrix against its involution partner. The basis of `X_i` and of
//! `X_{i^I}` are identified index by index, which is how `I_i^*` acts.

pub mod builtin;
mod charclass;
mod config;

pub use charclass::{nilpotent_exp, ExpClass, SValues};
pub use config::{bundle_to_json, load_target, target_to_json, TargetConfig};

use num_integer::Integer;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use crate::exactalg::{Matrix, Rational, Scalar};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub name: String,
    /// Real cohomological degree (always even).
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub id: String,
    pub r: u32,
    pub age: Rational,
    pub involution: usize,
    pub dim: u32,
    pub basis: Vec<BasisElement>,
    /// `pairing[a][b] = ∫_{X_i} φ_a ∧ I_i^* φ_b` with `φ_b` on the partner component.
    pub pairing: Vec<Vec<Rational>>,
    /// `products[a][b]` = coordinates of `φ_a·φ_b`.
    pub products: Vec<Vec<Vec<Rational>>>,
    /// `restriction[j]` = coordinates of `q^*φ_j` for the untwisted basis element `j`.
    pub restriction: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TargetModel {
    pub name: String,
    pub dim: u32,
    pub curve_rank: usize,
    /// `⟨c_1(T_X), d⟩` for the curve-class generator.
    pub c1_tangent: i64,
    /// `∫_d φ_j` for untwisted basis classes (zero outside degree 2).
    pub degree_pairing: Vec<Rational>,
    pub components: Vec<Component>,
    /// Opaque names for genus-one constants; never evaluated.
    pub genus1_constants: Vec<String>,
    pub jfunction_file: Option<String>,
}

/// Sparse class on the inertia stack: (component, basis index) → coefficient.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct CohClass {
    terms: BTreeMap<(usize, usize), Scalar>,
}

impl CohClass {
    pub fn zero() -> Self {
        CohClass::default()
    }

    pub fn basis(i: usize, a: usize) -> Self {
        Self::term(i, a, Scalar::one())
    }

    pub fn term(i: usize, a: usize, c: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, a), c);
        }
        CohClass { terms }
    }

    pub fn from_coords(i: usize, coords: &[Scalar]) -> Self {
        let mut out = CohClass::zero();
        for (a, c) in coords.iter().enumerate() {
            out.add_term(i, a, c.clone());
        }
        out
    }

    pub fn from_rational_coords(i: usize, coords: &[Rational]) -> Self {
        let mut out = CohClass::zero();
        for (a, c) in coords.iter().enumerate() {
            out.add_term(i, a, Scalar::from_rational(c.clone()));
        }
        out
    }

    pub fn add_term(&mut self, i: usize, a: usize, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(i, a)) {
            Some(e) => {
                *e += &c;
                if e.is_zero() {
                    self.terms.remove(&(i, a));
                }
            }
            None => {
                self.terms.insert((i, a), c);
            }
        }
    }

    pub fn get(&self, i: usize, a: usize) -> Scalar {
        self.terms.get(&(i, a)).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.terms.iter().map(|(&(i, a), c)| (i, a, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &CohClass) -> CohClass {
        let mut out = self.clone();
        for (&(i, a), c) in &o.terms {
            out.add_term(i, a, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &CohClass) -> CohClass {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> CohClass {
        self.scale(&Scalar::from_int(-1))
    }

    pub fn scale(&self, c: &Scalar) -> CohClass {
        let mut out = CohClass::zero();
        if c.is_zero() {
            return out;
        }
        for (&(i, a), x) in &self.terms {
            out.add_term(i, a, x * c);
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> CohClass {
        let mut out = CohClass::zero();
        for (&(i, a), x) in &self.terms {
            out.add_term(i, a, f(x));
        }
        out
    }

    pub fn try_map(&self, f: impl Fn(&Scalar) -> Result<Scalar, Error>) -> Result<CohClass, Error> {
        let mut out = CohClass::zero();
        for (&(i, a), x) in &self.terms {
            out.add_term(i, a, f(x)?);
        }
        Ok(out)
    }

    /// The part supported on component `i`.
    pub fn on_component(&self, i: usize) -> CohClass {
        CohClass {
            terms: self.terms.iter().filter(|(k, _)| k.0 == i).map(|(k, c)| (*k, c.clone())).collect(),
        }
    }

    pub fn components(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().map(|k| k.0).collect();
        v.dedup();
        v
    }

    /// Moves every term from `X_i` to `X_{i^I}` (the basis identification `I^*`).
    pub fn involution_pullback(&self, t: &TargetModel) -> CohClass {
        let mut out = CohClass::zero();
        for (&(i, a), c) in &self.terms {
            out.add_term(t.components[i].involution, a, c.clone());
        }
        out
    }

    /// Moves the part on component `from` onto component `to` (same basis indices).
    pub fn transport(&self, from: usize, to: usize) -> CohClass {
        let mut out = CohClass::zero();
        for (&(i, a), c) in &self.terms {
            if i == from {
                out.add_term(to, a, c.clone());
            }
        }
        out
    }
}

impl TargetModel {
    pub fn total_dim(&self) -> usize {
        self.components.iter().map(|c| c.basis.len()).sum()
    }

    pub fn offset(&self, i: usize) -> usize {
        self.components[..i].iter().map(|c| c.basis.len()).sum()
    }

    pub fn global_index(&self, i: usize, a: usize) -> usize {
        self.offset(i) + a
    }

    pub fn locate(&self, g: usize) -> (usize, usize) {
        let mut rem = g;
        for (i, c) in self.components.iter().enumerate() {
            if rem < c.basis.len() {
                return (i, rem);
            }
            rem -= c.basis.len();
        }
        panic!("global basis index {g} out of range");
    }

    pub fn unit(&self, i: usize) -> CohClass {
        CohClass::basis(i, 0)
    }

    /// The unit of the untwisted sector, i.e. the identity of H*(X).
    pub fn one(&self) -> CohClass {
        self.unit(0)
    }

    /// Sum of units over all components: the identity of H*(IX).
    pub fn identity_class(&self) -> CohClass {
        (0..self.components.len()).fold(CohClass::zero(), |acc, i| acc.add(&self.unit(i)))
    }

    pub fn basis_degree(&self, i: usize, a: usize) -> u32 {
        self.components[i].basis[a].degree
    }

    /// Orbifold degree `deg + 2·age` (as a rational).
    pub fn orbdeg(&self, i: usize, a: usize) -> Rational {
        Rational::from_integer(self.basis_degree(i, a).into()) + &self.components[i].age * Rational::from_integer(2.into())
    }

    pub fn check_class(&self, c: &CohClass) -> Result<(), Error> {
        for (i, a, _) in c.iter() {
            if i >= self.components.len() || a >= self.components[i].basis.len() {
                return Err(Error::BasisMismatch(format!("class term ({i},{a}) not in target {}", self.name)));
            }
        }
        Ok(())
    }

    /// Degree-2h part of a class (h counts complex degree).
    pub fn degree_part(&self, c: &CohClass, h: u32) -> CohClass {
        let mut out = CohClass::zero();
        for (i, a, x) in c.iter() {
            if self.basis_degree(i, a) == 2 * h {
                out.add_term(i, a, x.clone());
            }
        }
        out
    }

    pub fn orbifold_pairing(&self, a: &CohClass, b: &CohClass) -> Result<Scalar, Error> {
        self.check_class(a)?;
        self.check_class(b)?;
        let mut acc = Scalar::zero();
        for (i, x, ca) in a.iter() {
            let j = self.components[i].involution;
            for (k, y, cb) in b.iter() {
                if k != j {
                    continue;
                }
                let p = &self.components[i].pairing[x][y];
                if !p.is_zero() {
                    acc += &(ca * cb).scale(p);
                }
            }
        }
        Ok(acc)
    }

    /// Gram matrix of the orbifold pairing in the global basis.
    pub fn gram(&self) -> Matrix {
        let n = self.total_dim();
        let mut g = Matrix::zeros(n, n);
        for (i, c) in self.components.iter().enumerate() {
            for a in 0..c.basis.len() {
                for b in 0..c.basis.len() {
                    let p = &c.pairing[a][b];
                    if !p.is_zero() {
                        g.set(self.global_index(i, a), self.global_index(c.involution, b), Scalar::from_rational(p.clone()));
                    }
                }
            }
        }
        g
    }

    /// Ordinary cup product on each component of IX.
    pub fn mul(&self, a: &CohClass, b: &CohClass) -> CohClass {
        let mut out = CohClass::zero();
        for (i, x, ca) in a.iter() {
            let comp = &self.components[i];
            for (k, y, cb) in b.iter() {
                if k != i {
                    continue;
                }
                let prod = ca * cb;
                for (z, s) in comp.products[x][y].iter().enumerate() {
                    if !s.is_zero() {
                        out.add_term(i, z, prod.scale(s));
                    }
                }
            }
        }
        out
    }

    /// `q^*a` for a class on the untwisted sector, restricted to every component.
    pub fn pull_to_inertia(&self, a: &CohClass) -> CohClass {
        let mut out = CohClass::zero();
        for (i, j, c) in a.iter() {
            assert_eq!(i, 0, "pull_to_inertia expects an untwisted class");
            for (k, comp) in self.components.iter().enumerate() {
                for (z, s) in comp.restriction[j].iter().enumerate() {
                    if !s.is_zero() {
                        out.add_term(k, z, c.scale(s));
                    }
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `c` in the global basis.
    pub fn multiplication_matrix(&self, c: &CohClass) -> Matrix {
        let n = self.total_dim();
        let mut m = Matrix::zeros(n, n);
        for (i, comp) in self.components.iter().enumerate() {
            let ci = c.on_component(i);
            if ci.is_zero() {
                continue;
            }
            for a in 0..comp.basis.len() {
                let prod = self.mul(&ci, &CohClass::basis(i, a));
                for (_, z, v) in prod.iter() {
                    m.set(self.global_index(i, z), self.global_index(i, a), v.clone());
                }
            }
        }
        m
    }

    pub fn class_to_vec(&self, c: &CohClass) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); self.total_dim()];
        for (i, a, x) in c.iter() {
            v[self.global_index(i, a)] = x.clone();
        }
        v
    }

    pub fn vec_to_class(&self, v: &[Scalar]) -> CohClass {
        let mut out = CohClass::zero();
        for (g, x) in v.iter().enumerate() {
            let (i, a) = self.locate(g);
            out.add_term(i, a, x.clone());
        }
        out
    }

    /// A cyclotomic order large enough for every phase used with this target:
    /// `(−1)^{x}` with `x ∈ (1/2r)ℤ` needs 4r-th roots of unity.
    pub fn cyclotomic_order(&self) -> u32 {
        let l = self.components.iter().fold(1u32, |acc, c| acc.lcm(&c.r));
        if l == 1 {
            1
        } else {
            4 * l
        }
    }

    pub fn max_component_dim(&self) -> u32 {
        self.components.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let inv = |m: &str| Err(Error::InvariantViolation(m.to_string()));
        if self.components.is_empty() {
            return inv("target has no components");
        }
        let c0 = &self.components[0];
        if c0.r != 1 || !c0.age.is_zero() || c0.involution != 0 {
            return inv("untwisted sector");
        }
        let dimx = Rational::from_integer(self.dim.into());
        for (i, c) in self.components.iter().enumerate() {
            if c.involution >= self.components.len() {
                return inv("involution index");
            }
            let p = &self.components[c.involution];
            if p.involution != i || p.r != c.r {
                return inv("involution is an involution");
            }
            if c.r == 0 {
                return inv("component order");
            }
            if p.basis.len() != c.basis.len() || p.basis.iter().zip(&c.basis).any(|(x, y)| x.degree != y.degree) {
                return inv("involution basis identification");
            }
            if c.basis.is_empty() || c.basis[0].degree != 0 {
                return inv("unit basis element");
            }
            if c.dim > self.dim || c.basis.iter().any(|b| b.degree % 2 == 1 || b.degree > 2 * c.dim) {
                return inv("component degrees");
            }
            if &c.age + &p.age != &dimx - Rational::from_integer(c.dim.into()) {
                return inv("age reciprocity");
            }
            let n = c.basis.len();
            if c.pairing.len() != n || c.pairing.iter().any(|r| r.len() != n) {
                return inv("pairing shape");
            }
            for a in 0..n {
                for b in 0..n {
                    if c.pairing[a][b] != p.pairing[b][a] {
                        return inv("pairing symmetry");
                    }
                }
            }
            let pm = Matrix::from_rows(
                c.pairing.iter().map(|r| r.iter().cloned().map(Scalar::from_rational).collect()).collect(),
            );
            if pm.inverse().is_none() {
                return inv("pairing nondegenerate");
            }
            if c.products.len() != n
                || c.products.iter().any(|r| r.len() != n || r.iter().any(|v| v.len() != n))
            {
                return inv("product table shape");
            }
            for a in 0..n {
                let mut e = vec![Rational::zero(); n];
                e[a] = Rational::one();
                if c.products[0][a] != e || c.products[a][0] != e {
                    return inv("unit acts as identity");
                }
            }
            if c.restriction.len() != c0.basis.len() || c.restriction.iter().any(|v| v.len() != n) {
                return inv("restriction shape");
            }
        }
        if self.degree_pairing.len() != c0.basis.len() && !self.degree_pairing.is_empty() {
            return inv("degree pairing shape");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPart {
    pub rank: i64,
    /// Full Chern character on the component (all degrees).
    pub ch: CohClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LineSummand {
    pub c1_pairing: i64,
    /// `c_1` restricted to every component.
    pub c1: CohClass,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BundleModel {
    pub name: String,
    pub rank: i64,
    pub pulled_back: bool,
    /// `⟨c_1(F), d⟩` for the curve-class generator.
    pub c1_pairing: i64,
    /// `(component, l)` → eigenbundle `F_i^{(l)}`; absent entries are zero.
    pub eigen: BTreeMap<(usize, u32), EigenPart>,
    /// Split data when F is a sum of line bundles.
    pub lines: Vec<LineSummand>,
}

impl BundleModel {
    pub fn zero(name: &str) -> Self {
        BundleModel {
            name: name.into(),
            rank: 0,
            pulled_back: true,
            c1_pairing: 0,
            eigen: BTreeMap::new(),
            lines: Vec::new(),
        }
    }

    pub fn eigen_ch(&self, i: usize, l: u32) -> CohClass {
        self.eigen.get(&(i, l)).map(|e| e.ch.clone()).unwrap_or_default()
    }

    pub fn eigen_rank(&self, i: usize, l: u32) -> i64 {
        self.eigen.get(&(i, l)).map_or(0, |e| e.rank)
    }

    /// `ch_k(F_i^{(l)})`.
    pub fn eigen_chern(&self, t: &TargetModel, i: usize, l: u32, k: u32) -> Result<CohClass, Error> {
        if i >= t.components.len() || l >= t.components[i].r {
            return Err(Error::IndexOutOfRange(format!("eigenbundle (i={i}, l={l})")));
        }
        Ok(t.degree_part(&self.eigen_ch(i, l), k))
    }

    /// `age(F_i) = Σ_l (l/r_i)·rank F_i^{(l)}`.
    pub fn age_of_bundle(&self, t: &TargetModel, i: usize) -> Result<Rational, Error> {
        let c = t.components.get(i).ok_or_else(|| Error::IndexOutOfRange(format!("component {i}")))?;
        let mut acc = Rational::zero();
        for l in 1..c.r {
            acc += Rational::new(l.into(), c.r.into()) * Rational::from_integer(self.eigen_rank(i, l).into());
        }
        Ok(acc)
    }

    /// Rank of the moving part `⊕_{l≥1} F_i^{(l)}`.
    pub fn moving_rank(&self, t: &TargetModel, i: usize) -> i64 {
        (1..t.components[i].r).map(|l| self.eigen_rank(i, l)).sum()
    }

    /// ch of the invariant part `F_i^{(0)}` as a class on all components.
    pub fn invariant_ch(&self, t: &TargetModel) -> CohClass {
        (0..t.components.len()).fold(CohClass::zero(), |acc, i| acc.add(&self.eigen_ch(i, 0)))
    }

    /// ch of `q^*F` on IX.
    pub fn total_ch(&self) -> CohClass {
        self.eigen.values().fold(CohClass::zero(), |acc, e| acc.add(&e.ch))
    }

    pub fn direct_sum(&self, o: &BundleModel, name: &str) -> BundleModel {
        let mut eigen = self.eigen.clone();
        for (k, e) in &o.eigen {
            let slot = eigen.entry(*k).or_insert(EigenPart { rank: 0, ch: CohClass::zero() });
            slot.rank += e.rank;
            slot.ch = slot.ch.add(&e.ch);
        }
        eigen.retain(|_, e| e.rank != 0 || !e.ch.is_zero());
        let mut lines = self.lines.clone();
        lines.extend(o.lines.iter().cloned());
        BundleModel {
            name: name.into(),
            rank: self.rank + o.rank,
            pulled_back: self.pulled_back && o.pulled_back,
            c1_pairing: self.c1_pairing + o.c1_pairing,
            eigen,
            lines,
        }
    }

    pub fn validate(&self, t: &TargetModel) -> Result<(), Error> {
        let inv = |m: &str| Err(Error::InvariantViolation(format!("{m} (bundle {})", self.name)));
        for (&(i, l), e) in &self.eigen {
            if i >= t.components.len() || l >= t.components[i].r {
                return inv("eigen index in range");
            }
            if self.pulled_back && l != 0 {
                return inv("pulled back bundles have trivial eigenvalues");
            }
            if e.ch.iter().any(|(k, _, _)| k != i) {
                return inv("eigen data lives on its component");
            }
            if e.ch.get(i, 0) != Scalar::from_int(e.rank) {
                return inv("ch_0 equals rank");
            }
            t.check_class(&e.ch)?;
        }
        for (i, c) in t.components.iter().enumerate() {
            let total: i64 = (0..c.r).map(|l| self.eigen_rank(i, l)).sum();
            if total != self.rank {
                return inv("eigen ranks sum to rank");
            }
            let j = c.involution;
            for l in 0..c.r {
                let partner_l = if l == 0 { 0 } else { c.r - l };
                let mine = self.eigen_ch(i, l);
                let theirs = self.eigen_ch(j, partner_l).transport(j, i);
                if mine != theirs {
                    return inv("involution compatibility");
                }
            }
        }
        for line in &self.lines {
            t.check_class(&line.c1)?;
        }
        if !self.lines.is_empty() && self.lines.iter().map(|l| l.c1_pairing).sum::<i64>() != self.c1_pairing {
            return inv("line pairings sum to c1 pairing");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::builtin::*;
    use super::*;
    use crate::exactalg::rational;

    #[test]
    fn builtins_validate() {
        for t in [point(), bmu(2), bmu(5), projective(1), projective(4), wps(&[1, 1, 2]).unwrap(), wps(&[1, 2, 3]).unwrap()] {
            t.validate().unwrap_or_else(|e| panic!("{}: {e}", t.name));
        }
    }

    #[test]
    fn wps_112_sectors() {
        let t = wps(&[1, 1, 2]).unwrap();
        assert_eq!(t.components.len(), 2);
        assert_eq!(t.components[1].age, rational(1, 1));
        assert_eq!(t.components[1].r, 2);
        assert_eq!(t.components[1].dim, 0);
        let f = wps_line(&t, 2).unwrap();
        assert!(f.pulled_back);
        assert!(f.eigen.keys().all(|&(_, l)| l == 0));
    }

    #[test]
    fn pairings() {
        let p = point();
        assert_eq!(p.orbifold_pairing(&p.one(), &p.one()).unwrap(), Scalar::one());
        let b = bmu(2);
        let tw = CohClass::basis(1, 0);
        assert_eq!(b.orbifold_pairing(&tw, &tw).unwrap(), Scalar::frac(1, 2));
        let p1 = projective(1);
        assert_eq!(p1.orbifold_pairing(&p1.one(), &CohClass::basis(0, 1)).unwrap(), Scalar::one());
        assert_eq!(p1.orbifold_pairing(&p1.one(), &p1.one()).unwrap(), Scalar::zero());
    }

    #[test]
    fn bmu3_character_eigen_data() {
        let t = bmu(3);
        let f = bmu_character(&t, 1);
        assert_eq!(f.eigen_rank(1, 1), 1);
        assert_eq!(f.eigen_chern(&t, 1, 1, 0).unwrap(), CohClass::basis(1, 0));
        assert!(f.eigen_chern(&t, 1, 1, 1).unwrap().is_zero());
        assert_eq!(f.age_of_bundle(&t, 1).unwrap(), rational(1, 3));
        assert!(f.eigen_chern(&t, 1, 3, 0).is_err());
        f.validate(&t).unwrap();
    }

    #[test]
    fn untwisted_multiplication_is_block_diagonal() {
        let t = wps(&[1, 1, 2]).unwrap();
        let p = t.pull_to_inertia(&CohClass::basis(0, 1));
        let m = t.multiplication_matrix(&p);
        for g in 0..t.total_dim() {
            for h in 0..t.total_dim() {
                if t.locate(g).0 != t.locate(h).0 {
                    assert!(m.get(g, h).is_zero());
                }
            }
        }
    }
}
