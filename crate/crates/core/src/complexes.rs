//! Weight-graded Chevalley–Eilenberg complexes with coefficients in a module
//! slice.
//!
//! The slice is a right module; cochains use the left action
//! `x ▷ m = -(m·x)` and the standard differential
//!
//! ```text
//! dc(x0..xq) = Σ_i (-1)^i x_i ▷ c(..x̂_i..) + Σ_{i<j} (-1)^{i+j} c([x_i,x_j], ..x̂_i..x̂_j..)
//! ```
//!
//! A basis cochain is a strictly increasing argument tuple with a slice basis
//! value. Its weight is `Σ weight(args) - weight(value)`, which `d` preserves.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Embedding, LieElement, LiePresentation};
use crate::enveloping::{ModuleSlice, SliceVec};
use crate::linalg::{SparseMatrix, SparseVec};
use crate::rational::{coeff_prefix, format_q, parse_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("no Euler element")]
    NoEulerElement,
    #[error("the module is not graded by the Euler element")]
    NotEulerGraded,
    #[error("embedding target does not match the module's algebra")]
    AmbientMismatch,
    #[error("cochain argument tuple {0:?} is not strictly increasing")]
    UnsortedArguments(Vec<usize>),
    #[error("cochain does not fit the complex: {0}")]
    OutOfComplex(String),
    #[error("cannot parse cochain: {0}")]
    Parse(String),
}

/// `(arguments, value index)`; arguments strictly increasing.
pub type CochainKey = (Vec<usize>, usize);

/// A finitely supported cochain, stored on sorted argument tuples.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Cochain {
    pub q: usize,
    terms: BTreeMap<CochainKey, Q>,
}

impl Cochain {
    pub fn zero(q: usize) -> Self {
        Cochain { q, terms: BTreeMap::new() }
    }

    /// Adds `c · value` on the tuple `args`, given in any order: the value is
    /// moved to the sorted tuple with the permutation sign.
    pub fn add(&mut self, args: &[usize], value: usize, c: Q) {
        assert_eq!(args.len(), self.q, "cochain degree");
        let Some((sorted, sign)) = sort_with_sign(args) else { return };
        let c = if sign < 0 { -c } else { c };
        if c.is_zero() {
            return;
        }
        match self.terms.entry((sorted, value)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_vec(&mut self, args: &[usize], v: &[(usize, Q)], c: &Q) {
        for (j, x) in v {
            self.add(args, *j, x * c);
        }
    }

    pub fn add_scaled(&mut self, other: &Cochain, c: &Q) {
        for ((args, v), x) in &other.terms {
            self.add(args, *v, x * c);
        }
    }

    pub fn scaled(&self, c: &Q) -> Cochain {
        let mut out = Cochain::zero(self.q);
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CochainKey, &Q)> {
        self.terms.iter()
    }

    pub fn get(&self, args: &[usize], value: usize) -> Q {
        match sort_with_sign(args) {
            Some((sorted, s)) => {
                let c = self.terms.get(&(sorted, value)).cloned().unwrap_or_else(Q::zero);
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
            None => Q::zero(),
        }
    }

    /// Value on an argument tuple as a sparse slice vector.
    pub fn value(&self, args: &[usize]) -> SliceVec {
        let Some((sorted, s)) = sort_with_sign(args) else { return Vec::new() };
        let lo = (sorted.clone(), 0);
        let hi = (sorted.clone(), usize::MAX);
        self.terms
            .range(lo..=hi)
            .map(|((_, v), c)| (*v, if s < 0 { -c.clone() } else { c.clone() }))
            .collect()
    }

    /// Argument tuples carrying a nonzero value.
    pub fn support(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.terms.keys().map(|(a, _)| a.clone()).collect();
        out.dedup();
        out
    }
}

/// Sorts a tuple, returning the permutation sign, or `None` on repeats.
pub fn sort_with_sign(args: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = args.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Basis of weight-`λ` `q`-cochains, in lexicographic order of arguments then
/// value index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CochainSlice {
    pub q: usize,
    pub lambda: i64,
    pub basis: Vec<CochainKey>,
    index: HashMap<CochainKey, usize>,
}

impl CochainSlice {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, key: &CochainKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn to_vector(&self, c: &Cochain) -> Result<SparseVec, ComplexError> {
        let mut v = Vec::new();
        for (key, x) in c.terms() {
            match self.position(key) {
                Some(i) => v.push((i, x.clone())),
                None => return Err(ComplexError::OutOfComplex(format!("{key:?} not in the weight-{} slice", self.lambda))),
            }
        }
        v.sort_by_key(|(i, _)| *i);
        Ok(v)
    }

    pub fn to_cochain(&self, v: &[(usize, Q)]) -> Cochain {
        let mut c = Cochain::zero(self.q);
        for (i, x) in v {
            let (args, val) = &self.basis[*i];
            c.add(args, *val, x.clone());
        }
        c
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The Chevalley–Eilenberg complex of `g` with values in a slice over an
/// ambient algebra, `g` acting through an embedding.
#[derive(Debug, Clone)]
pub struct CeComplex {
    g: Arc<LiePresentation>,
    module: Arc<ModuleSlice>,
    images: Vec<LieElement>,
    /// `left[a][i] = x_a ▷ basis[i]`
    left: Vec<Vec<SliceVec>>,
    /// `[x_a, x_b]` for `a < b` having a component on `x_k`: `pairs[k] = [(a, b, coeff)]`
    pairs: Vec<Vec<(usize, usize, Q)>>,
    by_weight: BTreeMap<u32, Vec<usize>>,
}

impl CeComplex {
    /// Cochains on the module's own algebra.
    pub fn new(module: Arc<ModuleSlice>) -> Self {
        let g = module.presentation().clone();
        let images = (0..g.dim()).map(LieElement::basis).collect();
        Self::build(g, module, images)
    }

    /// Cochains on `emb.source` with values in a slice over `emb.target`.
    pub fn with_embedding(emb: &Embedding, module: Arc<ModuleSlice>) -> Result<Self, ComplexError> {
        if **module.presentation() != *emb.target {
            return Err(ComplexError::AmbientMismatch);
        }
        Ok(Self::build(emb.source.clone(), module, emb.images.clone()))
    }

    fn build(g: Arc<LiePresentation>, module: Arc<ModuleSlice>, images: Vec<LieElement>) -> Self {
        let left = images
            .iter()
            .map(|x| {
                (0..module.dim())
                    .map(|i| module.act(&[(i, Q::one())], x).into_iter().map(|(j, c)| (j, -c)).collect())
                    .collect()
            })
            .collect();
        let mut pairs = vec![Vec::new(); g.dim()];
        for a in 0..g.dim() {
            for b in a + 1..g.dim() {
                for (k, c) in g.bracket_basis(a, b).terms() {
                    pairs[k].push((a, b, c.clone()));
                }
            }
        }
        let mut by_weight: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for i in 0..module.dim() {
            by_weight.entry(module.weight(i)).or_default().push(i);
        }
        CeComplex { g, module, images, left, pairs, by_weight }
    }

    pub fn algebra(&self) -> &Arc<LiePresentation> {
        &self.g
    }

    pub fn module(&self) -> &Arc<ModuleSlice> {
        &self.module
    }

    pub fn images(&self) -> &[LieElement] {
        &self.images
    }

    /// `x_a ▷ basis[i]`
    pub fn left_action(&self, a: usize, i: usize) -> &SliceVec {
        &self.left[a][i]
    }

    pub fn weight_of(&self, key: &CochainKey) -> i64 {
        let s: i64 = key.0.iter().map(|&a| self.g.weight(a) as i64).sum();
        s - self.module.weight(key.1) as i64
    }

    pub fn cochain_basis(&self, q: usize, lambda: i64) -> CochainSlice {
        let mut basis = Vec::new();
        if q <= self.g.dim() {
            for args in combinations(self.g.dim(), q) {
                let s: i64 = args.iter().map(|&a| self.g.weight(a) as i64).sum();
                let w = s - lambda;
                if w < 0 {
                    continue;
                }
                if let Some(vals) = self.by_weight.get(&(w as u32)) {
                    for &v in vals {
                        basis.push((args.clone(), v));
                    }
                }
            }
        }
        let index = basis.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        CochainSlice { q, lambda, basis, index }
    }

    /// Weights carrying at least one `q`-cochain.
    pub fn weights(&self, q: usize) -> Vec<i64> {
        let mut out = std::collections::BTreeSet::new();
        if q <= self.g.dim() {
            for args in combinations(self.g.dim(), q) {
                let s: i64 = args.iter().map(|&a| self.g.weight(a) as i64).sum();
                for w in self.by_weight.keys() {
                    out.insert(s - *w as i64);
                }
            }
        }
        out.into_iter().collect()
    }

    /// `d` of one basis cochain `args ↦ basis[value]`.
    fn d_basis(&self, args: &[usize], value: usize, c: &Q, out: &mut Cochain) {
        let n = self.g.dim();
        // Σ_i (-1)^i x_i ▷ c(..x̂_i..): the new argument t lands at position i.
        for t in 0..n {
            if args.contains(&t) {
                continue;
            }
            let pos = args.iter().filter(|&&a| a < t).count();
            let mut tuple = args.to_vec();
            tuple.insert(pos, t);
            let sign = if pos % 2 == 0 { c.clone() } else { -c.clone() };
            out.add_vec(&tuple, &self.left[t][value], &sign);
        }
        // Σ_{i<j} (-1)^{i+j} c([x_i,x_j], rest) where {k} ∪ rest = args.
        for (pk, &k) in args.iter().enumerate() {
            let rest: Vec<usize> = args.iter().copied().filter(|&a| a != k).collect();
            let sk = if pk % 2 == 0 { 1 } else { -1 };
            for (a, b, coef) in &self.pairs[k] {
                if rest.contains(a) || rest.contains(b) {
                    continue;
                }
                let mut tuple = rest.clone();
                let pa = tuple.iter().filter(|&&x| x < *a).count();
                tuple.insert(pa, *a);
                let pb = tuple.iter().filter(|&&x| x < *b).count();
                tuple.insert(pb, *b);
                let s = sk * if (pa + pb) % 2 == 0 { 1 } else { -1 };
                let x = coef * c;
                out.add(&tuple, value, if s < 0 { -x } else { x });
            }
        }
    }

    pub fn apply_d(&self, c: &Cochain) -> Cochain {
        let mut out = Cochain::zero(c.q + 1);
        for ((args, v), x) in c.terms() {
            self.d_basis(args, *v, x, &mut out);
        }
        out
    }

    /// Matrix of `d : C^q_λ → C^{q+1}_λ`, rows indexed by `target`.
    pub fn differential_between(&self, source: &CochainSlice, target: &CochainSlice) -> SparseMatrix {
        let columns: Vec<SparseVec> = source
            .basis
            .iter()
            .map(|(args, v)| {
                let mut out = Cochain::zero(source.q + 1);
                self.d_basis(args, *v, &Q::one(), &mut out);
                target.to_vector(&out).expect("d preserves weight")
            })
            .collect();
        SparseMatrix::from_columns(target.dim(), &columns)
    }

    pub fn differential(&self, q: usize, lambda: i64) -> SparseMatrix {
        self.differential_between(&self.cochain_basis(q, lambda), &self.cochain_basis(q + 1, lambda))
    }

    /// Failures of `x ▷ (y ▷ m) - y ▷ (x ▷ m) = [x, y] ▷ m` as `(m, x, y)`.
    pub fn module_failures(&self) -> Vec<(usize, usize, usize)> {
        let apply = |a: usize, v: &SliceVec| -> BTreeMap<usize, Q> {
            let mut acc = BTreeMap::new();
            for (i, c) in v {
                for (j, x) in &self.left[a][*i] {
                    *acc.entry(*j).or_insert_with(Q::zero) += c * x;
                }
            }
            acc
        };
        let mut out = Vec::new();
        for x in 0..self.g.dim() {
            for y in x + 1..self.g.dim() {
                for m in 0..self.module.dim() {
                    let unit = vec![(m, Q::one())];
                    let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                    let yv: SliceVec = apply(y, &unit).into_iter().collect();
                    let xv: SliceVec = apply(x, &unit).into_iter().collect();
                    for (j, c) in apply(x, &yv) {
                        *acc.entry(j).or_insert_with(Q::zero) += c;
                    }
                    for (j, c) in apply(y, &xv) {
                        *acc.entry(j).or_insert_with(Q::zero) -= c;
                    }
                    for (k, b) in self.g.bracket_basis(x, y).terms() {
                        for (j, c) in apply(k, &unit) {
                            *acc.entry(j).or_insert_with(Q::zero) -= b * c;
                        }
                    }
                    if acc.values().any(|c| !c.is_zero()) {
                        out.push((m, x, y));
                    }
                }
            }
        }
        out
    }

    /// The weight-0 slice, which carries all cohomology when the algebra has an
    /// Euler element acting on every module basis element by its weight.
    pub fn euler_reduction(&self, q: usize) -> Result<CochainSlice, ComplexError> {
        let e = self.euler_index().ok_or(ComplexError::NoEulerElement)?;
        for i in 0..self.module.dim() {
            let expected: SliceVec =
                if self.module.weight(i) == 0 { vec![] } else { vec![(i, Q::from_integer(self.module.weight(i).into()))] };
            if self.left[e][i] != expected {
                return Err(ComplexError::NotEulerGraded);
            }
        }
        Ok(self.cochain_basis(q, 0))
    }

    fn euler_index(&self) -> Option<usize> {
        let e = self.g.euler_element()?;
        let img = &self.images[e];
        // The image must act on the ambient algebra as its grading too.
        let amb = self.module.presentation();
        let ok = (0..self.g.dim()).all(|j| {
            let b = amb.bracket(img, &self.images[j]).ok();
            b == Some(self.images[j].scaled(&Q::from_integer(self.g.weight(j).into())))
        });
        ok.then_some(e)
    }

    pub fn format_cochain(&self, c: &Cochain) -> String {
        if c.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, ((args, v), x)) in c.terms().enumerate() {
            s.push_str(&coeff_prefix(x, k == 0));
            let mut term = args.iter().map(|&a| format!("{}*", self.g.name(a))).collect::<Vec<_>>().join("∧");
            if term.is_empty() {
                term.push_str(&self.module.basis()[*v].display(self.module.presentation()));
            } else {
                term.push('⊗');
                term.push_str(&self.module.basis()[*v].display(self.module.presentation()));
            }
            s.push_str(&term);
        }
        s
    }

    pub fn serialize_cochain(&self, c: &Cochain) -> Vec<CochainTerm> {
        c.terms()
            .map(|((args, v), x)| CochainTerm {
                args: args.iter().map(|&a| self.g.name(a).to_string()).collect(),
                value: self.module.basis()[*v].display(self.module.presentation()),
                coeff: format_q(x),
            })
            .collect()
    }

    /// Reads serialized terms; values are parsed as ambient elements and must
    /// lie in the slice.
    pub fn deserialize_cochain(&self, q: usize, terms: &[CochainTerm]) -> Result<Cochain, ComplexError> {
        let env = crate::enveloping::Enveloping::new(self.module.presentation().clone());
        let mut c = Cochain::zero(q);
        for t in terms {
            if t.args.len() != q {
                return Err(ComplexError::Parse(format!("expected {q} arguments, got {:?}", t.args)));
            }
            let args = t
                .args
                .iter()
                .map(|n| self.g.index_of(n).map_err(|e| ComplexError::Parse(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let coeff = parse_q(&t.coeff).ok_or_else(|| ComplexError::Parse(format!("bad coefficient `{}`", t.coeff)))?;
            let value = env.parse_element(&t.value).map_err(|e| ComplexError::Parse(e.to_string()))?;
            for (m, x) in value.terms() {
                let j = self
                    .module
                    .index_of(m)
                    .ok_or_else(|| ComplexError::OutOfComplex(format!("{} not in the slice", m.display(self.module.presentation()))))?;
                c.add(&args, j, x * &coeff);
            }
        }
        Ok(c)
    }

    /// Maps each ambient basis index that is an image of a basis symbol of `g`
    /// back to that symbol.
    fn preimages(&self) -> Result<HashMap<usize, usize>, ComplexError> {
        let mut out = HashMap::new();
        for (a, img) in self.images.iter().enumerate() {
            let terms: Vec<_> = img.terms().collect();
            match terms.as_slice() {
                [(i, x)] if x.is_one() => {
                    out.insert(*i, a);
                }
                _ => return Err(ComplexError::OutOfComplex("needs basis images".into())),
            }
        }
        Ok(out)
    }

    /// Lie derivative `L_z c = z ▷ c - Σ_i c(.., [z, x_i], ..)` for an ambient
    /// element `z` normalizing the image of `g`. It lowers the weight by
    /// `weight(z)`.
    pub fn lie_derivative(&self, z: &LieElement, c: &Cochain) -> Result<Cochain, ComplexError> {
        let amb = self.module.presentation();
        let pre = self.preimages()?;
        // [z, x_i] in g-coordinates, per g basis index i.
        let mut ad: Vec<Vec<(usize, Q)>> = Vec::with_capacity(self.g.dim());
        for (gi, img) in self.images.iter().enumerate() {
            let b = amb.bracket(z, img).map_err(|e| ComplexError::OutOfComplex(e.to_string()))?;
            let mut v = Vec::new();
            for (k, x) in b.terms() {
                let &a = pre.get(&k).ok_or_else(|| {
                    ComplexError::OutOfComplex(format!("[z, {}] leaves the subalgebra", self.g.name(gi)))
                })?;
                v.push((a, x.clone()));
            }
            ad.push(v);
        }
        let mut out = Cochain::zero(c.q);
        for ((args, v), x) in c.terms() {
            let zv: SliceVec = self.module.act(&[(*v, Q::one())], z).into_iter().map(|(j, y)| (j, -y)).collect();
            out.add_vec(args, &zv, x);
            for (pk, &k) in args.iter().enumerate() {
                for (i, ad_i) in ad.iter().enumerate() {
                    for (kk, a) in ad_i {
                        if *kk != k {
                            continue;
                        }
                        let mut t = args.clone();
                        t[pk] = i;
                        out.add(&t, *v, -(a * x));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Pulls a cochain back along an embedding whose images are single basis
    /// symbols of this complex's algebra.
    pub fn restrict(&self, c: &Cochain, to: &CeComplex) -> Result<Cochain, ComplexError> {
        let mut map = Vec::with_capacity(to.images.len());
        for img in &to.images {
            let terms: Vec<_> = img.terms().collect();
            match terms.as_slice() {
                [(i, x)] if x.is_one() => {
                    let ambient = self.images.iter().position(|y| *y == LieElement::basis(*i));
                    map.push(ambient.ok_or_else(|| ComplexError::OutOfComplex("image outside the algebra".into()))?);
                }
                _ => return Err(ComplexError::OutOfComplex("restriction needs basis images".into())),
            }
        }
        let mut out = Cochain::zero(c.q);
        for args in combinations(to.g.dim(), c.q) {
            let mapped: Vec<usize> = args.iter().map(|&a| map[a]).collect();
            for (v, x) in c.value(&mapped) {
                out.add(&args, v, x);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainTerm {
    pub args: Vec<String>,
    pub value: String,
    pub coeff: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{builtin_algebra, Family};
    use crate::enveloping::{ModuleKind, PbwMonomial};

    fn complex(f: Family, k: u32, kind: ModuleKind, w: u32, n: u32) -> CeComplex {
        let p = Arc::new(builtin_algebra(f, k).unwrap());
        CeComplex::new(Arc::new(ModuleSlice::new(p, kind, w, n).unwrap()))
    }

    #[test]
    fn sorting_signs() {
        assert_eq!(sort_with_sign(&[2, 0, 1]), Some((vec![0, 1, 2], 1)));
        assert_eq!(sort_with_sign(&[1, 0]), Some((vec![0, 1], -1)));
        assert_eq!(sort_with_sign(&[1, 1]), None);
    }

    #[test]
    fn a_trivial_bases() {
        let c = complex(Family::A, 1, ModuleKind::Trivial, 0, 0);
        let b1 = c.cochain_basis(1, 0);
        assert_eq!(b1.basis, vec![(vec![0], 0)]);
        assert_eq!(c.cochain_basis(2, 0).dim(), 0);
        assert_eq!(c.euler_reduction(1).unwrap().basis, vec![(vec![0], 0)]);
    }

    #[test]
    fn d_squared_vanishes() {
        let c = complex(Family::H, 4, ModuleKind::Adjoint, 4, 2);
        for q in 0..3 {
            for lambda in -2..=4 {
                let d0 = c.differential(q, lambda);
                let d1 = c.differential(q + 1, lambda);
                assert!(d1.mul(&d0).is_zero(), "q={q} λ={lambda}");
            }
        }
        assert!(c.module_failures().is_empty());
    }

    #[test]
    fn dy_on_m0() {
        let emb = crate::algebra::Embedding::m0_into_h(5).unwrap();
        let m = Arc::new(ModuleSlice::new(emb.target.clone(), ModuleKind::Adjoint, 5, 2).unwrap());
        let c = CeComplex::with_embedding(&emb, m.clone()).unwrap();
        let y = m.index_of(&PbwMonomial::generator(0)).unwrap();
        let mut c0 = Cochain::zero(0);
        c0.add(&[], y, Q::one());
        let d = c.apply_d(&c0);
        assert_eq!(c.format_cochain(&d), "-e1*⊗X - 2*e2*⊗d2 - 3*e3*⊗d3 - 4*e4*⊗d4 - 5*e5*⊗d5");
        assert!(matches!(c.euler_reduction(1), Err(ComplexError::NoEulerElement)));
    }

    #[test]
    fn weight_decomposition_is_exhaustive() {
        let c = complex(Family::M0, 5, ModuleKind::Adjoint, 4, 0);
        for q in 0..=3 {
            let total: usize = c.weights(q).into_iter().map(|l| c.cochain_basis(q, l).dim()).sum();
            let n = combinations(5, q).len();
            assert_eq!(total, n * c.module().dim());
        }
    }
}
