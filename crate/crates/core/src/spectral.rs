//! Spectral sequences of filtered cochain complexes.
//!
//! A filtration is an integer `f` per cochain basis element, with `F^f`
//! spanned by the elements of index at least `f` and `d(F^f) ⊂ F^f`. Pages
//! come from the usual subspaces
//!
//! ```text
//! Z_r^f = { x ∈ F^f : dx ∈ F^{f+r} }
//! E_r^f = Z_r^f / (Z_{r-1}^{f+1} + d Z_{r-1}^{f-r+1})
//! ```
//!
//! Two filtrations are provided. The module-weight filtration (`f` = weight
//! of the value) is labelled `(p, q) = (n - f, f)`, so `d_r` has bidegree
//! `(1 - r, r)`. The ideal filtration (`f` = number of arguments outside the
//! ideal) is labelled `(p, q) = (f, n - f)` with `d_r` of bidegree
//! `(r, 1 - r)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::{
    cohomology, dimension_by_ranks, induced_module, CohomologyOptions, ComplexSpec, EngineError, IdealChoice,
};
use crate::complexes::{Cochain, CochainSlice, CeComplex};
use crate::linalg::{quotient_representatives, QuotientBasis, SparseMatrix, SparseVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("module-weight filtration needs positive weights, but {0} has weight 0")]
    WeightZeroSymbol(String),
    #[error("{0:?} is not an ideal")]
    NotAnIdeal(Vec<String>),
    #[error("page {0} is below the first page")]
    BadPage(i64),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

pub type Result<T, E = SpectralError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiltrationKind {
    FeiginFuchs,
    HochschildSerre,
}

impl FiltrationKind {
    /// `(p, q)` of filtration index `f` in total degree `n`.
    pub fn bidegree(self, n: usize, f: i64) -> (i64, i64) {
        match self {
            FiltrationKind::FeiginFuchs => (n as i64 - f, f),
            FiltrationKind::HochschildSerre => (f, n as i64 - f),
        }
    }

    /// Bidegree of `d_r`.
    pub fn differential_shift(self, r: i64) -> (i64, i64) {
        match self {
            FiltrationKind::FeiginFuchs => (1 - r, r),
            FiltrationKind::HochschildSerre => (r, 1 - r),
        }
    }
}

/// One weight component of a cochain complex, in degrees `0..=top+1`, with a
/// filtration index on every basis element.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    pub kind: FiltrationKind,
    pub complex: Arc<CeComplex>,
    pub lambda: i64,
    /// Highest degree whose pages are computed.
    pub top: usize,
    spaces: Vec<CochainSlice>,
    diffs: Vec<SparseMatrix>,
    filtration: Vec<Vec<i64>>,
}

impl FilteredComplex {
    fn assemble(
        kind: FiltrationKind,
        complex: Arc<CeComplex>,
        lambda: i64,
        top: usize,
        index: impl Fn(&(Vec<usize>, usize)) -> i64,
    ) -> Self {
        let spaces: Vec<CochainSlice> = (0..=top + 2).map(|n| complex.cochain_basis(n, lambda)).collect();
        let diffs = (0..=top + 1).map(|n| complex.differential_between(&spaces[n], &spaces[n + 1])).collect();
        let filtration = spaces.iter().map(|s| s.basis.iter().map(&index).collect()).collect();
        let f = FilteredComplex { kind, complex, lambda, top, spaces, diffs, filtration };
        debug_assert!(f.filtration_failures().is_empty());
        f
    }

    pub fn space(&self, n: usize) -> &CochainSlice {
        &self.spaces[n]
    }

    pub fn differential(&self, n: usize) -> &SparseMatrix {
        &self.diffs[n]
    }

    pub fn filtration(&self, n: usize) -> &[i64] {
        &self.filtration[n]
    }

    /// Matrix entries of `d` that lower the filtration index, as
    /// `(degree, source, target)`.
    pub fn filtration_failures(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (n, d) in self.diffs.iter().enumerate() {
            for i in 0..d.rows() {
                for (j, _) in d.row(i) {
                    if self.filtration[n + 1][i] < self.filtration[n][*j] {
                        out.push((n, *j, i));
                    }
                }
            }
        }
        out
    }

    fn range(&self, n: usize) -> Option<(i64, i64)> {
        let f = &self.filtration[n];
        Some((*f.iter().min()?, *f.iter().max()?))
    }

    /// Length of the filtration over all degrees; pages from this one on
    /// agree with `E_∞`.
    pub fn stable_page(&self) -> i64 {
        let lo = self.filtration.iter().flatten().min().copied().unwrap_or(0);
        let hi = self.filtration.iter().flatten().max().copied().unwrap_or(0);
        (hi - lo + 2).max(1)
    }

    /// `Z_r^f` in degree `n`: basis of `{x ∈ F^f : dx ∈ F^{f+r}}`.
    fn z(&self, n: usize, f: i64, r: i64) -> Vec<SparseVec> {
        let cols: Vec<usize> = (0..self.spaces[n].dim()).filter(|&i| self.filtration[n][i] >= f).collect();
        if cols.is_empty() {
            return Vec::new();
        }
        let rows: Vec<usize> =
            (0..self.spaces[n + 1].dim()).filter(|&i| self.filtration[n + 1][i] < f + r).collect();
        let m = self.diffs[n].select_rows(&rows).select_cols(&cols);
        m.kernel_basis().into_iter().map(|v| v.into_iter().map(|(j, x)| (cols[j], x)).collect()).collect()
    }

    /// `Z_{r-1}^{f+1} + d Z_{r-1}^{f-r+1}` in degree `n`.
    fn denominator(&self, n: usize, f: i64, r: i64) -> Vec<SparseVec> {
        let mut out = self.z(n, f + 1, r - 1);
        if n > 0 {
            for v in self.z(n - 1, f - r + 1, r - 1) {
                let dv = self.diffs[n - 1].mul_vec(&v);
                if !dv.is_empty() {
                    out.push(dv);
                }
            }
        }
        out
    }

    fn entry(&self, n: usize, f: i64, r: i64) -> Result<(Vec<SparseVec>, Vec<SparseVec>)> {
        let z = self.z(n, f, r);
        let b = self.denominator(n, f, r);
        let reps = quotient_representatives(&z, &b).map_err(EngineError::from)?;
        Ok((reps, b))
    }

    /// Page `E_r` for `r ≥ 0` in degrees `0..=top`, with the differentials
    /// leaving those degrees.
    pub fn page(&self, r: i64) -> Result<SpectralPage> {
        if r < 0 {
            return Err(SpectralError::BadPage(r));
        }
        let mut vecs: BTreeMap<(usize, i64), (Vec<SparseVec>, Vec<SparseVec>)> = BTreeMap::new();
        for n in 0..=self.top + 1 {
            let Some((lo, hi)) = self.range(n) else { continue };
            for f in lo..=hi {
                vecs.insert((n, f), self.entry(n, f, r)?);
            }
        }
        let mut entries = BTreeMap::new();
        let mut differentials = BTreeMap::new();
        for (&(n, f), (reps, _)) in &vecs {
            if n > self.top {
                continue;
            }
            let (p, q) = self.kind.bidegree(n, f);
            let representatives = reps.iter().map(|v| self.spaces[n].to_cochain(v)).collect();
            entries.insert((p, q), PageEntry { p, q, dim: reps.len(), representatives });
            if reps.is_empty() {
                continue;
            }
            let Some((treps, tden)) = vecs.get(&(n + 1, f + r)) else { continue };
            let basis = QuotientBasis::new(treps, tden).map_err(EngineError::from)?;
            let columns = reps
                .iter()
                .map(|v| {
                    basis
                        .coordinates(&self.diffs[n].mul_vec(v))
                        .ok_or_else(|| SpectralError::Engine(EngineError::Invalid(format!("d_{r} leaves Z_{r}"))))
                })
                .collect::<Result<Vec<_>>>()?;
            let m = SparseMatrix::from_columns(treps.len(), &columns);
            if !m.is_zero() {
                differentials.insert((p, q), m);
            }
        }
        Ok(SpectralPage { r, kind: self.kind, lambda: self.lambda, entries, differentials })
    }

    pub fn e_infinity(&self) -> Result<SpectralPage> {
        self.page(self.stable_page())
    }

    /// Graded pieces of the subspace of `H^n` spanned by `classes`, for the
    /// filtration `F^f H = (Z ∩ F^f + B) / B`.
    pub fn graded_classes(&self, n: usize, classes: &[Cochain]) -> Result<Vec<PageEntry>> {
        let b: Vec<SparseVec> = if n == 0 { Vec::new() } else { self.diffs[n - 1].columns() };
        let mut gens: Vec<SparseVec> =
            classes.iter().map(|c| self.spaces[n].to_vector(c)).collect::<std::result::Result<_, _>>().map_err(EngineError::from)?;
        gens.extend(b.iter().cloned());
        let Some((lo, hi)) = self.range(n) else { return Ok(Vec::new()) };
        // J_f = span(gens) ∩ F^f.
        let gmat = SparseMatrix::from_columns(self.spaces[n].dim(), &gens);
        let j = |f: i64| -> Vec<SparseVec> {
            let low: Vec<usize> = (0..self.spaces[n].dim()).filter(|&i| self.filtration[n][i] < f).collect();
            gmat.select_rows(&low).kernel_basis().into_iter().map(|k| gmat.mul_vec(&k)).filter(|v| !v.is_empty()).collect()
        };
        let mut out = Vec::new();
        for f in lo..=hi {
            let jf = j(f);
            let mut den = j(f + 1);
            den.extend(b.iter().cloned());
            let mut num = jf;
            num.extend(den.iter().cloned());
            let reps = quotient_representatives(&num, &den).map_err(EngineError::from)?;
            let (p, q) = self.kind.bidegree(n, f);
            out.push(PageEntry {
                p,
                q,
                dim: reps.len(),
                representatives: reps.iter().map(|v| self.spaces[n].to_cochain(v)).collect(),
            });
        }
        Ok(out)
    }

    /// `Σ_{p+q=n} dim E_∞^{p,q}` against the direct `dim H^n`, for `n ≤ top`.
    pub fn convergence_check(&self) -> Result<ConvergenceReport> {
        let einf = self.e_infinity()?;
        let rows = (0..=self.top)
            .map(|n| {
                let spectral = einf.total(n);
                let direct = dimension_by_ranks(&self.complex, n, self.lambda);
                ConvergenceRow { n, spectral, direct, agrees: spectral == direct }
            })
            .collect();
        Ok(ConvergenceReport { kind: self.kind, lambda: self.lambda, rows })
    }
}

/// Module-weight filtration. The algebra must have positive weights.
pub fn ff_filtration(complex: Arc<CeComplex>, lambda: i64, top: usize) -> Result<FilteredComplex> {
    let g = complex.algebra().clone();
    if let Some(i) = (0..g.dim()).find(|&i| g.weight(i) == 0) {
        return Err(SpectralError::WeightZeroSymbol(g.name(i).to_string()));
    }
    let m = complex.module().clone();
    Ok(FilteredComplex::assemble(FiltrationKind::FeiginFuchs, complex, lambda, top, |(_, v)| m.weight(*v) as i64))
}

/// Filtration by the number of arguments outside an ideal.
pub fn hs_filtration(complex: Arc<CeComplex>, ideal: &IdealChoice, lambda: i64, top: usize) -> Result<FilteredComplex> {
    let g = complex.algebra().clone();
    let idx = ideal.resolve(&g)?;
    if g.check_ideal(&idx).is_err() {
        return Err(SpectralError::NotAnIdeal(idx.iter().map(|&i| g.name(i).to_string()).collect()));
    }
    let outside: Vec<bool> = (0..g.dim()).map(|i| !idx.contains(&i)).collect();
    Ok(FilteredComplex::assemble(FiltrationKind::HochschildSerre, complex, lambda, top, |(args, _)| {
        args.iter().filter(|&&a| outside[a]).count() as i64
    }))
}

#[derive(Debug, Clone)]
pub struct PageEntry {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
    pub representatives: Vec<Cochain>,
}

#[derive(Debug, Clone)]
pub struct SpectralPage {
    pub r: i64,
    pub kind: FiltrationKind,
    pub lambda: i64,
    pub entries: BTreeMap<(i64, i64), PageEntry>,
    /// Nonzero `d_r` out of `(p, q)`, columns indexed by that entry's
    /// representatives and rows by the target's.
    pub differentials: BTreeMap<(i64, i64), SparseMatrix>,
}

impl SpectralPage {
    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.entries.get(&(p, q)).map_or(0, |e| e.dim)
    }

    pub fn total(&self, n: usize) -> usize {
        self.entries.values().filter(|e| e.p + e.q == n as i64).map(|e| e.dim).sum()
    }

    /// Pairs of composable differentials with nonzero product.
    pub fn d_squared_failures(&self) -> Vec<(i64, i64)> {
        let (dp, dq) = self.kind.differential_shift(self.r);
        let mut out = Vec::new();
        for (&(p, q), m) in &self.differentials {
            if let Some(next) = self.differentials.get(&(p + dp, q + dq)) {
                if !next.mul(m).is_zero() {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// `(r, p, q, dim)` rows in bidegree order.
    pub fn table(&self) -> Vec<(i64, i64, i64, usize)> {
        self.entries.values().map(|e| (self.r, e.p, e.q, e.dim)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub spectral: usize,
    pub direct: usize,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub kind: FiltrationKind,
    pub lambda: i64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn agrees(&self) -> bool {
        self.rows.iter().all(|r| r.agrees)
    }
}

/// `E_2^{p,q} = H^p(g/k; H^q(k; M))` at weight `λ`, computed in two steps:
/// cohomology of the ideal at every weight the quotient cochains need, then
/// cohomology of the quotient with the induced action.
#[derive(Debug, Clone)]
pub struct TwoStepE2 {
    pub lambda: i64,
    /// `(p, q) → (dim, representatives as readable text)`.
    pub entries: BTreeMap<(i64, i64), (usize, Vec<String>)>,
}

impl TwoStepE2 {
    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.entries.get(&(p, q)).map_or(0, |e| e.0)
    }
}

pub fn hs_e2_two_step(
    spec: &ComplexSpec,
    ideal: &IdealChoice,
    lambda: i64,
    top: usize,
    opts: &CohomologyOptions,
) -> Result<TwoStepE2> {
    let pres = spec.algebra.presentation()?;
    let idx = ideal.resolve(&pres)?;
    let outside: Vec<usize> = (0..pres.dim()).filter(|i| !idx.contains(i)).collect();
    // Weights λ - Σ w(S) over subsets S of the quotient basis.
    let mut lambdas: Vec<i64> = Vec::new();
    for mask in 0u32..(1 << outside.len()) {
        let s: i64 = outside.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &i)| pres.weight(i) as i64).sum();
        if !lambdas.contains(&(lambda - s)) {
            lambdas.push(lambda - s);
        }
    }
    lambdas.sort_unstable_by(|a, b| b.cmp(a));
    let mut entries = BTreeMap::new();
    for q in 0..=top {
        let m = induced_module(spec, ideal, q, &lambdas, opts)?;
        let quotient_dim = m.quotient.dim();
        for p in 0..=(top - q).min(quotient_dim) {
            let (dim, reps) = m.module.cohomology(p, lambda)?;
            let text = reps
                .iter()
                .map(|r| {
                    let mut s = String::new();
                    for (i, ((args, v), x)) in r.iter().enumerate() {
                        let names: Vec<String> = args.iter().map(|&a| format!("{}*", m.quotient.name(a))).collect();
                        let head = if names.is_empty() { "1".to_string() } else { names.join("∧") };
                        s.push_str(&format!("{}{head}⊗[{}]", crate::rational::coeff_prefix(x, i == 0), m.module.labels[*v]));
                    }
                    s
                })
                .collect();
            entries.insert((p as i64, q as i64), (dim, text));
        }
    }
    Ok(TwoStepE2 { lambda, entries })
}

/// Graded pieces of the stable classes of `H^n` at weight `λ` for the
/// module-weight filtration, summed over a range of weights.
pub fn stable_ff_e_infinity(
    spec: &ComplexSpec,
    n: usize,
    lambdas: &[i64],
    opts: &CohomologyOptions,
) -> Result<BTreeMap<(i64, i64), PageEntry>> {
    let mut out: BTreeMap<(i64, i64), PageEntry> = BTreeMap::new();
    for &lambda in lambdas {
        let e = cohomology(spec, n, lambda, opts)?;
        let f = ff_filtration(e.complex.clone(), lambda, n)?;
        for piece in f.graded_classes(n, &e.representatives)? {
            let slot = out.entry((piece.p, piece.q)).or_insert_with(|| PageEntry {
                p: piece.p,
                q: piece.q,
                dim: 0,
                representatives: Vec::new(),
            });
            slot.dim += piece.dim;
            slot.representatives.extend(piece.representatives);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Family;
    use crate::enveloping::ModuleKind;

    fn complex(spec: &ComplexSpec) -> Arc<CeComplex> {
        Arc::new(spec.build().unwrap())
    }

    #[test]
    fn weight_zero_is_rejected() {
        let c = complex(&ComplexSpec::builtin(Family::H, 3, ModuleKind::Adjoint, 2, 1));
        assert_eq!(ff_filtration(c, 0, 1).unwrap_err(), SpectralError::WeightZeroSymbol("Y".into()));
    }

    #[test]
    fn trivial_module_pages_are_constant() {
        let c = complex(&ComplexSpec::builtin(Family::M0, 5, ModuleKind::Trivial, 0, 0));
        for lambda in 0..=6 {
            let f = ff_filtration(c.clone(), lambda, 2).unwrap();
            let e1 = f.page(1).unwrap().table();
            assert_eq!(e1, f.e_infinity().unwrap().table().into_iter().map(|(_, p, q, d)| (1, p, q, d)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn convergence_on_small_models() {
        let m = complex(&ComplexSpec::builtin(Family::M0, 4, ModuleKind::Adjoint, 3, 1));
        let h = complex(&ComplexSpec::builtin(Family::H, 3, ModuleKind::Adjoint, 3, 1));
        for lambda in -1..=1 {
            assert!(ff_filtration(m.clone(), lambda, 2).unwrap().convergence_check().unwrap().agrees());
            assert!(hs_filtration(h.clone(), &IdealChoice::m0_in_h(), lambda, 2).unwrap().convergence_check().unwrap().agrees());
        }
    }

    #[test]
    fn pages_square_to_zero() {
        let m = complex(&ComplexSpec::builtin(Family::M0, 4, ModuleKind::Adjoint, 3, 1));
        let f = ff_filtration(m, 0, 2).unwrap();
        for r in 0..f.stable_page() {
            assert!(f.page(r).unwrap().d_squared_failures().is_empty());
        }
    }

    #[test]
    fn second_page_matches_two_step() {
        let spec = ComplexSpec::builtin(Family::H, 3, ModuleKind::Adjoint, 3, 1);
        let c = complex(&spec);
        let lit = CohomologyOptions::literal();
        for lambda in -1..=1 {
            let f = hs_filtration(c.clone(), &IdealChoice::m0_in_h(), lambda, 2).unwrap();
            let e2 = f.page(2).unwrap();
            let direct = hs_e2_two_step(&spec, &IdealChoice::m0_in_h(), lambda, 2, &lit).unwrap();
            for (&(p, q), e) in &e2.entries {
                assert_eq!(e.dim, direct.dim(p, q), "λ={lambda} ({p},{q})");
            }
        }
    }
}
