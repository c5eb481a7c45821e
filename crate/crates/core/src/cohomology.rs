//! Cohomology of finite models, with representatives, cocycle and coboundary
//! tests, truncation sweeps and induced actions of quotient algebras.
//!
//! A slice with weight bound `W` and `Y`-bound `N` is a finite model of the
//! full coefficient module. Both bounds create edge classes: the `Y`-bound
//! keeps `d(Y^{N+1})` as a cocycle that is no longer a coboundary, and the
//! weight quotient turns top-weight cochains into cocycles. The stable
//! estimate removes both. With headroom `h` it is the rank of
//!
//! ```text
//! H^q(slice W+h, N)  →  H^q(slice W, N+h)
//! ```
//!
//! induced by including the `Y ≤ N` submodule and projecting away weights
//! above `W`. Both maps are computed inside the single slice `(W+h, N+h)`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{builtin_algebra, AlgebraError, Embedding, Family, LieElement, LiePresentation, PresentationSpec};
use crate::complexes::{Cochain, CochainKey, CochainSlice, CeComplex, ComplexError};
use crate::enveloping::{EnvError, ModuleKind, ModuleSlice};
use crate::linalg::{quotient_representatives, span_rank, LinalgError, QuotientBasis, SparseMatrix, SparseVec};
use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Enveloping(#[from] EnvError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("induced action is not well defined: {0}")]
    NotWellDefined(String),
    #[error("invalid request: {0}")]
    Invalid(String),
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;

/// Which algebra the cochains live on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraChoice {
    Builtin {
        family: Family,
        #[serde(rename = "K")]
        k: u32,
    },
    Inline(PresentationSpec),
}

impl AlgebraChoice {
    pub fn builtin(family: Family, k: u32) -> Self {
        AlgebraChoice::Builtin { family, k }
    }

    pub fn presentation(&self) -> Result<LiePresentation> {
        Ok(match self {
            AlgebraChoice::Builtin { family, k } => builtin_algebra(*family, *k)?,
            AlgebraChoice::Inline(spec) => LiePresentation::from_spec(spec)?,
        })
    }

    /// Truncation scale, if the algebra has one that matters.
    pub fn scale(&self) -> Option<u32> {
        match self {
            AlgebraChoice::Builtin { family: Family::A | Family::B, .. } => None,
            AlgebraChoice::Builtin { k, .. } => Some(*k),
            AlgebraChoice::Inline(_) => None,
        }
    }

    pub fn with_scale(&self, k: u32) -> Self {
        match self {
            AlgebraChoice::Builtin { family, .. } => AlgebraChoice::Builtin { family: *family, k },
            other => other.clone(),
        }
    }
}

/// A finite model: algebra, coefficient kind and slice bounds.
///
/// For `m0` with adjoint or augmentation coefficients the values are taken in
/// the enveloping algebra of `h` at the same scale, with `e1 ↦ X` and
/// `e_i ↦ d_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub algebra: AlgebraChoice,
    pub kind: ModuleKind,
    #[serde(rename = "W")]
    pub w: u32,
    #[serde(rename = "N")]
    pub n: u32,
}

impl ComplexSpec {
    pub fn new(algebra: AlgebraChoice, kind: ModuleKind, w: u32, n: u32) -> Self {
        ComplexSpec { algebra, kind, w, n }
    }

    pub fn builtin(family: Family, k: u32, kind: ModuleKind, w: u32, n: u32) -> Self {
        Self::new(AlgebraChoice::builtin(family, k), kind, w, n)
    }

    pub fn resized(&self, k: Option<u32>, w: u32, n: u32) -> Self {
        let algebra = match k {
            Some(k) => self.algebra.with_scale(k),
            None => self.algebra.clone(),
        };
        ComplexSpec { algebra, kind: self.kind, w, n }
    }

    fn uses_h_values(&self) -> bool {
        matches!(self.algebra, AlgebraChoice::Builtin { family: Family::M0, .. }) && self.kind != ModuleKind::Trivial
    }

    pub fn build(&self) -> Result<CeComplex> {
        if self.uses_h_values() {
            let AlgebraChoice::Builtin { k, .. } = self.algebra else { unreachable!() };
            let emb = Embedding::m0_into_h(k)?;
            let module = Arc::new(ModuleSlice::new(emb.target.clone(), self.kind, self.w, self.n)?);
            return Ok(CeComplex::with_embedding(&emb, module)?);
        }
        let pres = Arc::new(self.algebra.presentation()?);
        let module = Arc::new(ModuleSlice::new(pres, self.kind, self.w, self.n)?);
        Ok(CeComplex::new(module))
    }

    /// True when the literal slice computes the untruncated cohomology at `λ`:
    /// trivial values, and every argument of weight up to `λ` is present.
    pub fn literal_is_exact(&self, lambda: i64) -> bool {
        self.kind == ModuleKind::Trivial && self.algebra.scale().is_none_or(|k| lambda <= k as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// The slice computes the untruncated value.
    Exact,
    /// Stable image with headroom; edge classes removed.
    Stable,
    /// Literal slice; may contain edge classes.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub kind: WindowKind,
    pub valid: bool,
    #[serde(rename = "K")]
    pub k: Option<u32>,
    #[serde(rename = "W")]
    pub w: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub headroom: u32,
}

/// One `(q, λ)` cohomology result. Representatives are cochains of
/// `complex`, the target model of the estimate.
#[derive(Debug, Clone)]
pub struct CohomEntry {
    pub q: usize,
    pub lambda: i64,
    pub dim: usize,
    pub representatives: Vec<Cochain>,
    pub window: Window,
    pub complex: Arc<CeComplex>,
}

/// Options for [`cohomology`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyOptions {
    /// Extra weight and `Y` room for the stable estimate; 0 computes the
    /// literal slice.
    pub headroom: u32,
    /// Reduce algebras with an Euler element to the ideal it grades.
    pub euler_split: bool,
    /// Lower bound for the truncation scale of the enlarged model.
    pub min_scale: Option<u32>,
}

impl Default for CohomologyOptions {
    fn default() -> Self {
        CohomologyOptions { headroom: 2, euler_split: true, min_scale: None }
    }
}

impl CohomologyOptions {
    pub fn literal() -> Self {
        CohomologyOptions { headroom: 0, euler_split: false, min_scale: None }
    }
}

struct Estimate {
    reps: Vec<Cochain>,
    target: Arc<CeComplex>,
    k: Option<u32>,
}

/// The image of `H^q(W+h, N) → H^q(W, N+h)`, in the target slice. With
/// `h = 0` this is the literal cohomology of `(W, N)`.
fn estimate<F>(build: &F, k: Option<u32>, w: u32, n: u32, h: u32, q: usize, lambda: i64) -> Result<Estimate>
where
    F: Fn(Option<u32>, u32, u32) -> Result<CeComplex>,
{
    let big = build(k, w + h, n + h)?;
    let target = if h == 0 { Arc::new(big.clone()) } else { Arc::new(build(k, w, n + h)?) };
    let cq = big.cochain_basis(q, lambda);
    let module = big.module();
    let pres = module.presentation();
    let source: Vec<usize> =
        (0..cq.dim()).filter(|&i| module.basis()[cq.basis[i].1].y_exponent(pres) <= n).collect();
    let in_target = |i: usize| module.weight(cq.basis[i].1) <= w;
    let dq = big.differential_between(&cq, &big.cochain_basis(q + 1, lambda));
    let z = dq.select_cols(&source).kernel_basis();
    let fz: Vec<SparseVec> =
        z.iter().map(|v| v.iter().filter(|(j, _)| in_target(source[*j])).map(|(j, x)| (source[*j], x.clone())).collect()).collect();
    let bb: Vec<SparseVec> = if q == 0 {
        Vec::new()
    } else {
        big.differential_between(&big.cochain_basis(q - 1, lambda), &cq)
            .columns()
            .into_iter()
            .map(|v| v.into_iter().filter(|(j, _)| in_target(*j)).collect())
            .collect()
    };
    let mut zb = fz;
    zb.extend(bb.iter().cloned());
    let reps_big = quotient_representatives(&zb, &bb)?;
    let tq = target.cochain_basis(q, lambda);
    let mut reps = Vec::with_capacity(reps_big.len());
    for v in reps_big {
        let mut c = Cochain::zero(q);
        for (i, x) in v {
            let (args, val) = &cq.basis[i];
            let j = target.module().index_of(&module.basis()[*val]).expect("target coordinates lie in the target slice");
            c.add(args, j, x);
        }
        debug_assert!(tq.to_vector(&c).is_ok());
        reps.push(c);
    }
    Ok(Estimate { reps, target, k })
}

/// Scale of the enlarged model: every argument and value weight it uses is
/// present in the algebra.
fn enlarged_scale(spec: &ComplexSpec, opts: &CohomologyOptions, lambdas: &[i64]) -> Option<u32> {
    let k = spec.algebra.scale()?;
    let top = lambdas.iter().copied().max().unwrap_or(0).max(0) as u32;
    let needed = if opts.headroom == 0 { k } else { spec.w + opts.headroom + top };
    Some(k.max(needed).max(opts.min_scale.unwrap_or(0)))
}

/// `H^q` at weight `λ` of the model `spec`.
pub fn cohomology(spec: &ComplexSpec, q: usize, lambda: i64, opts: &CohomologyOptions) -> Result<CohomEntry> {
    let k = enlarged_scale(spec, opts, &[lambda]);
    cohomology_at_scale(spec, q, lambda, opts, k)
}

/// The window a result at weight `λ` on `spec` is reported with.
pub fn window_for(spec: &ComplexSpec, lambda: i64, opts: &CohomologyOptions) -> Window {
    window_at_scale(spec, lambda, opts, enlarged_scale(spec, opts, &[lambda]))
}

fn window_at_scale(spec: &ComplexSpec, lambda: i64, opts: &CohomologyOptions, k: Option<u32>) -> Window {
    let exact = spec.literal_is_exact(lambda);
    let h = if exact { 0 } else { opts.headroom };
    Window {
        kind: if exact {
            WindowKind::Exact
        } else if h > 0 {
            WindowKind::Stable
        } else {
            WindowKind::Truncated
        },
        valid: exact || h > 0,
        k: if exact { spec.algebra.scale() } else { k },
        w: spec.w,
        n: spec.n,
        headroom: h,
    }
}

fn cohomology_at_scale(spec: &ComplexSpec, q: usize, lambda: i64, opts: &CohomologyOptions, k: Option<u32>) -> Result<CohomEntry> {
    let window = window_at_scale(spec, lambda, opts, k);
    let h = window.headroom;
    let k = window.k;
    let built: RefCell<HashMap<(Option<u32>, u32, u32), CeComplex>> = RefCell::new(HashMap::new());
    let build_whole = |k: Option<u32>, w: u32, n: u32| -> Result<CeComplex> {
        if let Some(c) = built.borrow().get(&(k, w, n)) {
            return Ok(c.clone());
        }
        let c = spec.resized(k, w, n).build()?;
        built.borrow_mut().insert((k, w, n), c.clone());
        Ok(c)
    };
    if opts.euler_split {
        let probe = build_whole(k, spec.w, spec.n)?;
        if EulerSplit::new(&probe)?.is_some() {
            if lambda != 0 {
                let target = Arc::new(build_whole(k, spec.w, spec.n + h)?);
                return Ok(CohomEntry { q, lambda, dim: 0, representatives: Vec::new(), window, complex: target });
            }
            let build_ideal = |k: Option<u32>, w: u32, n: u32| -> Result<CeComplex> {
                let whole = build_whole(k, w, n)?;
                Ok(EulerSplit::new(&whole)?.expect("same algebra").ideal)
            };
            let mut reps = Vec::new();
            let upper = estimate(&build_ideal, k, spec.w, spec.n, h, q, 0)?;
            let target = Arc::new(CeComplex::new(upper.target.module().clone()));
            let split = EulerSplit::new(&target)?.expect("same algebra");
            for c in &upper.reps {
                reps.push(split.extend(c));
            }
            if q > 0 {
                let lower = estimate(&build_ideal, k, spec.w, spec.n, h, q - 1, 0)?;
                for c in &lower.reps {
                    reps.push(split.wedge_euler(c));
                }
            }
            return Ok(CohomEntry { q, lambda, dim: reps.len(), representatives: reps, window, complex: target });
        }
    }
    let est = estimate(&build_whole, k, spec.w, spec.n, h, q, lambda)?;
    let _ = est.k;
    Ok(CohomEntry { q, lambda, dim: est.reps.len(), representatives: est.reps, window, complex: est.target })
}

/// `g = span(E) ⋉ i` for an Euler element `E`. On a module graded by `E`,
/// `H^q(g)_0 = H^q(i)_0 ⊕ E^* ∧ H^{q-1}(i)_0` and every other weight vanishes.
pub struct EulerSplit {
    pub euler: usize,
    pub ideal: CeComplex,
    ideal_indices: Vec<usize>,
}

impl EulerSplit {
    /// `None` when the complex has no Euler element, acts through an
    /// embedding, or the module is not graded by it.
    pub fn new(whole: &CeComplex) -> Result<Option<Self>> {
        let g = whole.algebra();
        if !Arc::ptr_eq(g, whole.module().presentation()) && **g != **whole.module().presentation() {
            return Ok(None);
        }
        if whole.euler_reduction(0).is_err() {
            return Ok(None);
        }
        let e = g.euler_element().expect("checked by euler_reduction");
        let ideal_indices: Vec<usize> = (0..g.dim()).filter(|&i| i != e).collect();
        if g.check_ideal(&ideal_indices).is_err() {
            return Ok(None);
        }
        let emb = Embedding::subalgebra(whole.module().presentation().clone(), &ideal_indices)?;
        let ideal = CeComplex::with_embedding(&emb, whole.module().clone())?;
        Ok(Some(EulerSplit { euler: e, ideal, ideal_indices }))
    }

    /// Extends an ideal cochain by zero on tuples containing `E`.
    pub fn extend(&self, c: &Cochain) -> Cochain {
        let mut out = Cochain::zero(c.q);
        for ((args, v), x) in c.terms() {
            let mapped: Vec<usize> = args.iter().map(|&a| self.ideal_indices[a]).collect();
            out.add(&mapped, *v, x.clone());
        }
        out
    }

    /// `E^* ∧ c`.
    pub fn wedge_euler(&self, c: &Cochain) -> Cochain {
        let mut out = Cochain::zero(c.q + 1);
        for ((args, v), x) in c.terms() {
            let mut mapped = vec![self.euler];
            mapped.extend(args.iter().map(|&a| self.ideal_indices[a]));
            out.add(&mapped, *v, x.clone());
        }
        out
    }
}

/// Splits a cochain into weight-homogeneous parts.
pub fn by_weight(complex: &CeComplex, c: &Cochain) -> BTreeMap<i64, Cochain> {
    let mut out: BTreeMap<i64, Cochain> = BTreeMap::new();
    for (key, x) in c.terms() {
        out.entry(complex.weight_of(key)).or_insert_with(|| Cochain::zero(c.q)).add(&key.0, key.1, x.clone());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocycleCheck {
    pub is_cocycle: bool,
    /// Argument tuples where `dc` is nonzero, by symbol name.
    pub residual: Vec<Vec<String>>,
}

pub fn verify_cocycle(complex: &CeComplex, c: &Cochain) -> CocycleCheck {
    let dc = complex.apply_d(c);
    let residual: Vec<Vec<String>> =
        dc.support().into_iter().map(|t| t.iter().map(|&a| complex.algebra().name(a).to_string()).collect()).collect();
    CocycleCheck { is_cocycle: residual.is_empty(), residual }
}

/// A cochain `b` with `db = c` inside the slice, or `None` when no such
/// cochain exists there.
pub fn is_coboundary(complex: &CeComplex, c: &Cochain) -> Option<Cochain> {
    if c.is_zero() {
        return Some(Cochain::zero(c.q.saturating_sub(1)));
    }
    if c.q == 0 {
        return None;
    }
    let mut witness = Cochain::zero(c.q - 1);
    for (lambda, part) in by_weight(complex, c) {
        let src = complex.cochain_basis(c.q - 1, lambda);
        let dst = complex.cochain_basis(c.q, lambda);
        let d = complex.differential_between(&src, &dst);
        let b = dst.to_vector(&part).ok()?;
        let w = d.image_membership(&b)?;
        witness.add_scaled(&src.to_cochain(&w), &Q::one());
    }
    Some(witness)
}

/// A cochain `b` with `db ≡ c` modulo higher module weight: `db` and `c` agree
/// on every value of weight at most the lowest value weight of `c`.
pub fn is_coboundary_leading(complex: &CeComplex, c: &Cochain) -> Option<Cochain> {
    if c.is_zero() {
        return Some(Cochain::zero(c.q.saturating_sub(1)));
    }
    if c.q == 0 {
        return None;
    }
    let m = complex.module();
    let p = c.terms().map(|((_, v), _)| m.weight(*v)).min().expect("nonzero cochain");
    let mut witness = Cochain::zero(c.q - 1);
    for (lambda, part) in by_weight(complex, c) {
        let src = complex.cochain_basis(c.q - 1, lambda);
        let dst = complex.cochain_basis(c.q, lambda);
        let keep: Vec<usize> = (0..dst.dim()).filter(|&i| m.weight(dst.basis[i].1) <= p).collect();
        let d = complex.differential_between(&src, &dst).select_rows(&keep);
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let b: SparseVec =
            dst.to_vector(&part).ok()?.into_iter().filter_map(|(i, x)| pos.get(&i).map(|&a| (a, x))).collect();
        let w = d.image_membership(&b)?;
        witness.add_scaled(&src.to_cochain(&w), &Q::one());
    }
    Some(witness)
}

/// One grid point `(K, W, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridPoint {
    #[serde(rename = "K")]
    pub k: Option<u32>,
    #[serde(rename = "W")]
    pub w: u32,
    #[serde(rename = "N")]
    pub n: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub point: GridPoint,
    pub dim: usize,
    pub window: Window,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "value")]
pub enum Verdict {
    Stable(usize),
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepTable {
    pub q: usize,
    pub lambda: i64,
    pub rows: Vec<SweepRow>,
    pub verdict: Verdict,
}

/// "Stable at v" when the last three points are valid and all equal `v`.
pub fn verdict(rows: &[SweepRow]) -> Verdict {
    if rows.len() < 3 {
        return Verdict::Unstable;
    }
    let tail = &rows[rows.len() - 3..];
    let v = tail[0].dim;
    if tail.iter().all(|r| r.window.valid && r.dim == v) {
        Verdict::Stable(v)
    } else {
        Verdict::Unstable
    }
}

/// Runs `cohomology` over a grid in parallel; rows keep grid order.
pub fn stability_sweep(
    template: &ComplexSpec,
    grid: &[GridPoint],
    q: usize,
    lambda: i64,
    opts: &CohomologyOptions,
) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(EngineError::Invalid("empty sweep grid".into()));
    }
    let rows = grid
        .par_iter()
        .map(|pt| {
            let spec = template.resized(pt.k, pt.w, pt.n);
            let e = cohomology(&spec, q, lambda, opts)?;
            Ok(SweepRow { point: *pt, dim: e.dim, window: e.window })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = verdict(&rows);
    Ok(SweepTable { q, lambda, rows, verdict })
}

/// A finite-dimensional left module of a small Lie algebra given by matrices,
/// with a weight per basis vector. Cochains on arguments `S` with value `v`
/// have weight `Σ weight(S) + weights[v]`.
#[derive(Debug, Clone)]
pub struct FiniteModule {
    pub algebra: Arc<LiePresentation>,
    /// `action[a]` acts on column vectors.
    pub action: Vec<SparseMatrix>,
    pub weights: Vec<i64>,
    pub labels: Vec<String>,
}

impl FiniteModule {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Pairs `(x, y)` with `ρ([x,y]) != ρ(x)ρ(y) - ρ(y)ρ(x)`.
    pub fn representation_failures(&self) -> Vec<(usize, usize)> {
        let g = &self.algebra;
        let mut out = Vec::new();
        for x in 0..g.dim() {
            for y in x + 1..g.dim() {
                let lhs = self.action[x].mul(&self.action[y]);
                let rhs = self.action[y].mul(&self.action[x]);
                let mut diff: Vec<SparseVec> = Vec::new();
                for col in 0..self.dim() {
                    let e = vec![(col, Q::one())];
                    let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
                    for (i, c) in lhs.mul_vec(&e) {
                        *acc.entry(i).or_insert_with(Q::zero) += c;
                    }
                    for (i, c) in rhs.mul_vec(&e) {
                        *acc.entry(i).or_insert_with(Q::zero) -= c;
                    }
                    for (k, b) in g.bracket_basis(x, y).terms() {
                        for (i, c) in self.action[k].mul_vec(&e) {
                            *acc.entry(i).or_insert_with(Q::zero) -= b * c;
                        }
                    }
                    diff.push(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
                }
                if diff.iter().any(|v| !v.is_empty()) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    fn basis(&self, q: usize, lambda: i64) -> Vec<CochainKey> {
        let g = &self.algebra;
        let mut out = Vec::new();
        for s in subsets(g.dim(), q) {
            let ws: i64 = s.iter().map(|&a| g.weight(a) as i64).sum();
            for v in 0..self.dim() {
                if ws + self.weights[v] == lambda {
                    out.push((s.clone(), v));
                }
            }
        }
        out
    }

    fn differential(&self, q: usize, lambda: i64) -> (Vec<CochainKey>, Vec<CochainKey>, SparseMatrix) {
        let g = &self.algebra;
        let src = self.basis(q, lambda);
        let dst = self.basis(q + 1, lambda);
        let index: BTreeMap<&CochainKey, usize> = dst.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let columns: Vec<SparseVec> = src
            .iter()
            .map(|(args, v)| {
                let mut out = Cochain::zero(q + 1);
                let e = vec![(*v, Q::one())];
                for t in (0..g.dim()).filter(|t| !args.contains(t)) {
                    let pos = args.iter().filter(|&&a| a < t).count();
                    let mut tuple = args.clone();
                    tuple.insert(pos, t);
                    let sign = if pos % 2 == 0 { Q::one() } else { -Q::one() };
                    out.add_vec(&tuple, &self.action[t].mul_vec(&e), &sign);
                }
                for (pk, &k) in args.iter().enumerate() {
                    let rest: Vec<usize> = args.iter().copied().filter(|&a| a != k).collect();
                    for a in 0..g.dim() {
                        for b in a + 1..g.dim() {
                            if rest.contains(&a) || rest.contains(&b) {
                                continue;
                            }
                            let coef = g.bracket_basis(a, b).coeff(k);
                            if coef.is_zero() {
                                continue;
                            }
                            let mut tuple = rest.clone();
                            let pa = tuple.iter().filter(|&&x| x < a).count();
                            tuple.insert(pa, a);
                            let pb = tuple.iter().filter(|&&x| x < b).count();
                            tuple.insert(pb, b);
                            let negative = (pk + pa + pb) % 2 == 1;
                            out.add(&tuple, *v, if negative { -coef } else { coef });
                        }
                    }
                }
                out.terms().map(|(key, x)| (index[key], x.clone())).collect()
            })
            .collect();
        let m = SparseMatrix::from_columns(dst.len(), &columns);
        (src, dst, m)
    }

    /// `H^q` at total weight `λ`; representatives as `(arguments, value)`
    /// combinations.
    pub fn cohomology(&self, q: usize, lambda: i64) -> Result<(usize, Vec<Vec<(CochainKey, Q)>>)> {
        let (src, _, d) = self.differential(q, lambda);
        let z = d.kernel_basis();
        let b = if q == 0 { Vec::new() } else { self.differential(q - 1, lambda).2.columns() };
        let reps = quotient_representatives(&z, &b)?;
        let out = reps.iter().map(|v| v.iter().map(|(i, x)| (src[*i].clone(), x.clone())).collect()).collect();
        Ok((reps.len(), out))
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|i| mask & (1 << i) != 0).collect());
        }
    }
    out
}

/// An ideal named by its own symbols or by the symbols left out of it. The
/// second form keeps its meaning when the truncation scale grows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdealChoice {
    Symbols(Vec<String>),
    Complement(Vec<String>),
}

impl IdealChoice {
    /// The ideal `m0` inside `h`: everything except `Y` and `d1`.
    pub fn m0_in_h() -> Self {
        IdealChoice::Complement(vec!["Y".into(), "d1".into()])
    }

    pub fn resolve(&self, pres: &LiePresentation) -> Result<Vec<usize>> {
        match self {
            IdealChoice::Symbols(names) => Ok(names.iter().map(|n| pres.index_of(n)).collect::<std::result::Result<_, _>>()?),
            IdealChoice::Complement(names) => {
                let out: Vec<usize> = names.iter().map(|n| pres.index_of(n)).collect::<std::result::Result<_, _>>()?;
                Ok((0..pres.dim()).filter(|i| !out.contains(i)).collect())
            }
        }
    }
}

/// `H^q` of an ideal as a module over the quotient algebra, on stable
/// representatives at the given weights.
#[derive(Debug, Clone)]
pub struct InducedModule {
    pub quotient: Arc<LiePresentation>,
    /// Ambient indices of the quotient basis symbols.
    pub complement: Vec<usize>,
    pub blocks: Vec<CohomEntry>,
    pub module: FiniteModule,
}

/// Builds the action of `g / ideal` on `H^q(ideal; M)` at the weights
/// `lambdas`. Actions landing outside the listed weights are dropped. Fails if
/// the span is not an ideal or an action leaves the span of representatives
/// modulo coboundaries.
pub fn induced_module(
    spec: &ComplexSpec,
    ideal: &IdealChoice,
    q: usize,
    lambdas: &[i64],
    opts: &CohomologyOptions,
) -> Result<InducedModule> {
    let pres = Arc::new(spec.algebra.presentation()?);
    let ideal_idx = ideal.resolve(&pres)?;
    pres.check_ideal(&ideal_idx)?;
    let (quotient, complement) = pres.quotient(&ideal_idx)?;
    let k = enlarged_scale(spec, opts, lambdas);
    let h = opts.headroom;
    let build_ideal = |k: Option<u32>, w: u32, n: u32| -> Result<CeComplex> {
        let s = spec.resized(k, w, n);
        let p = Arc::new(s.algebra.presentation()?);
        let idx = ideal.resolve(&p)?;
        let module = Arc::new(ModuleSlice::new(p.clone(), s.kind, s.w, s.n)?);
        let emb = Embedding::subalgebra(p, &idx)?;
        Ok(CeComplex::with_embedding(&emb, module)?)
    };
    let mut blocks = Vec::new();
    for &lambda in lambdas {
        let est = estimate(&build_ideal, k, spec.w, spec.n, h, q, lambda)?;
        let window = Window {
            kind: if h > 0 { WindowKind::Stable } else { WindowKind::Truncated },
            valid: h > 0,
            k,
            w: spec.w,
            n: spec.n,
            headroom: h,
        };
        blocks.push(CohomEntry {
            q,
            lambda,
            dim: est.reps.len(),
            representatives: est.reps,
            window,
            complex: est.target,
        });
    }
    let target = blocks[0].complex.clone();
    let tpres = target.module().presentation().clone();
    // Offsets of each block in the direct sum.
    let mut offsets = Vec::new();
    let mut total = 0;
    for b in &blocks {
        offsets.push(total);
        total += b.dim;
    }
    let mut weights = Vec::with_capacity(total);
    let mut labels = Vec::with_capacity(total);
    for b in &blocks {
        for r in &b.representatives {
            weights.push(b.lambda);
            labels.push(target.format_cochain(r));
        }
    }
    let mut action = Vec::new();
    for &z in &complement {
        let zname = pres.name(z);
        let zt = LieElement::basis(tpres.index_of(zname)?);
        let wz = pres.weight(z) as i64;
        let mut columns: Vec<SparseVec> = Vec::with_capacity(total);
        for b in &blocks {
            let dest = blocks.iter().position(|d| d.lambda == b.lambda - wz);
            let reducer = match dest {
                Some(di) => Some((di, BlockReducer::new(&target, &blocks[di])?)),
                None => None,
            };
            for r in &b.representatives {
                let lz = target.lie_derivative(&zt, r)?;
                let col = match &reducer {
                    None => Vec::new(),
                    Some((di, red)) => red
                        .coordinates(&lz)
                        .ok_or_else(|| EngineError::NotWellDefined(format!("L_{zname} of {}", target.format_cochain(r))))?
                        .into_iter()
                        .map(|(j, x)| (offsets[*di] + j, x))
                        .collect(),
                };
                columns.push(col);
            }
        }
        action.push(SparseMatrix::from_columns(total, &columns));
    }
    let module = FiniteModule { algebra: Arc::new(quotient.clone()), action, weights, labels };
    Ok(InducedModule { quotient: Arc::new(quotient), complement, blocks, module })
}

/// Coordinates of cochains of one block in its representatives, modulo
/// coboundaries.
struct BlockReducer {
    basis: CochainSlice,
    quotient: QuotientBasis,
}

impl BlockReducer {
    fn new(complex: &CeComplex, block: &CohomEntry) -> Result<Self> {
        let basis = complex.cochain_basis(block.q, block.lambda);
        let b = if block.q == 0 {
            Vec::new()
        } else {
            complex.differential_between(&complex.cochain_basis(block.q - 1, block.lambda), &basis).columns()
        };
        let reps: Vec<SparseVec> =
            block.representatives.iter().map(|r| basis.to_vector(r)).collect::<std::result::Result<_, _>>()?;
        let quotient = QuotientBasis::new(&reps, &b)
            .map_err(|_| EngineError::NotWellDefined("representatives are dependent modulo coboundaries".into()))?;
        Ok(BlockReducer { basis, quotient })
    }

    fn coordinates(&self, c: &Cochain) -> Option<SparseVec> {
        self.quotient.coordinates(&self.basis.to_vector(c).ok()?)
    }
}

/// Checks that `dim H^q` from ranks equals the representative count.
pub fn dimension_by_ranks(complex: &CeComplex, q: usize, lambda: i64) -> usize {
    let c = complex.cochain_basis(q, lambda);
    let dq = complex.differential_between(&c, &complex.cochain_basis(q + 1, lambda));
    let kernel = c.dim() - dq.rank();
    let image = if q == 0 { 0 } else { complex.differential_between(&complex.cochain_basis(q - 1, lambda), &c).rank() };
    kernel - image
}

/// Rank of a list of cochains modulo coboundaries at one weight.
pub fn rank_modulo_coboundaries(complex: &CeComplex, cochains: &[Cochain], q: usize, lambda: i64) -> Result<usize> {
    let basis = complex.cochain_basis(q, lambda);
    let b = if q == 0 { Vec::new() } else { complex.differential_between(&complex.cochain_basis(q - 1, lambda), &basis).columns() };
    let mut all: Vec<SparseVec> = cochains.iter().map(|c| basis.to_vector(c)).collect::<std::result::Result<_, _>>()?;
    let rb = span_rank(&b);
    all.extend(b);
    Ok(span_rank(&all) - rb)
}

/// The presentation family tag and scale used for ids in reports.
pub fn algebra_id(choice: &AlgebraChoice) -> String {
    match choice {
        AlgebraChoice::Builtin { family, k } => match family {
            Family::A | Family::B => family.to_string(),
            _ => format!("{family}_{k}"),
        },
        AlgebraChoice::Inline(spec) => match spec.truncation {
            Some(k) => format!("{}_{k}", spec.family),
            None => spec.family.to_string(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_trivial() {
        let spec = ComplexSpec::builtin(Family::A, 1, ModuleKind::Trivial, 0, 0);
        let opts = CohomologyOptions::default();
        let dims: Vec<usize> = (0..3).map(|q| cohomology(&spec, q, 0, &opts).unwrap().dim).collect();
        assert_eq!(dims, [1, 1, 0]);
        let e = cohomology(&spec, 1, 0, &opts).unwrap();
        assert_eq!(e.window.kind, WindowKind::Exact);
        assert_eq!(e.complex.format_cochain(&e.representatives[0]), "Y*⊗1");
    }

    #[test]
    fn euler_split_matches_direct() {
        let spec = ComplexSpec::builtin(Family::H, 3, ModuleKind::Adjoint, 3, 2);
        let lit = CohomologyOptions::literal();
        let split = CohomologyOptions { euler_split: true, ..lit };
        for q in 0..=2 {
            for lambda in -1..=1 {
                let a = cohomology(&spec, q, lambda, &lit).unwrap().dim;
                let b = cohomology(&spec, q, lambda, &split).unwrap().dim;
                assert_eq!(a, b, "q={q} λ={lambda}");
            }
        }
    }

    #[test]
    fn representatives_are_cocycles_and_independent() {
        let spec = ComplexSpec::builtin(Family::M0, 4, ModuleKind::Adjoint, 3, 1);
        let e = cohomology(&spec, 1, 0, &CohomologyOptions::default()).unwrap();
        for r in &e.representatives {
            assert!(verify_cocycle(&e.complex, r).is_cocycle);
            assert!(is_coboundary(&e.complex, r).is_none());
        }
        assert_eq!(rank_modulo_coboundaries(&e.complex, &e.representatives, 1, 0).unwrap(), e.dim);
    }

    #[test]
    fn literal_dimension_two_ways() {
        let spec = ComplexSpec::builtin(Family::M0, 5, ModuleKind::Adjoint, 4, 1);
        let c = spec.build().unwrap();
        for q in 0..=2 {
            for lambda in -1..=2 {
                let e = cohomology(&spec, q, lambda, &CohomologyOptions::literal()).unwrap();
                assert_eq!(e.dim, dimension_by_ranks(&c, q, lambda));
            }
        }
    }
}
