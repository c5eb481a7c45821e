//! Job execution: dispatch to the engines, consult the cache, assemble a report.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::Family;
use crate::cache::{Cache, VERSION};
use crate::classes::{self, ClassError, ClassName, DeformationWindow};
use crate::cohomology::{
    self, verdict, window_for, ComplexSpec, EngineError, GridPoint, IdealChoice, SweepRow, SweepTable,
};
use crate::complexes::{CeComplex, Cochain};
use crate::job::{JobSpec, Task};
use crate::rational::{format_q, parse_q, Q};
use crate::report::*;
use crate::spectral::{self, FilteredComplex, PageEntry, SpectralError, SpectralPage};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("the job has no task")]
    NoTask,
    #[error("`lieco {command}` cannot run a {task} job")]
    WrongCommand { command: String, task: String },
    #[error("{context}: {source}")]
    Engine { context: String, source: EngineError },
    #[error("{context}: {source}")]
    Spectral { context: String, source: SpectralError },
    #[error("{context}: {source}")]
    Class { context: String, source: ClassError },
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, RunError>;

trait Context<T> {
    fn ctx(self, what: impl FnOnce() -> String) -> Result<T>;
}

impl<T> Context<T> for std::result::Result<T, EngineError> {
    fn ctx(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| RunError::Engine { context: what(), source })
    }
}

impl<T> Context<T> for std::result::Result<T, SpectralError> {
    fn ctx(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| RunError::Spectral { context: what(), source })
    }
}

impl<T> Context<T> for std::result::Result<T, ClassError> {
    fn ctx(self, what: impl FnOnce() -> String) -> Result<T> {
        self.map_err(|source| RunError::Class { context: what(), source })
    }
}

/// Checks that `command` is the subcommand for the job's task.
pub fn check_command(job: &JobSpec, command: &str) -> Result<Task> {
    let task = job.task.ok_or(RunError::NoTask)?;
    if task.command() != command {
        let name = serde_json::to_value(task).expect("tasks serialize");
        return Err(RunError::WrongCommand { command: command.into(), task: name.as_str().unwrap_or_default().into() });
    }
    Ok(task)
}

/// Runs the job with the current rayon pool.
pub fn run_job(job: &JobSpec, cache: &Cache) -> Result<Report> {
    let start = Instant::now();
    let task = job.task.ok_or(RunError::NoTask)?;
    let (results, passed) = match task {
        Task::Validate => run_validate(job)?,
        Task::Cohomology => run_cohomology(job, cache)?,
        Task::Verify => run_verify(job)?,
        Task::SpectralFf => run_spectral_ff(job, cache)?,
        Task::SpectralHs => run_spectral_hs(job, cache)?,
        Task::Sweep => run_sweep(job, cache)?,
        Task::Deformation => run_deformation(job, cache)?,
    };
    Ok(Report {
        tool: TOOL.into(),
        version: VERSION.into(),
        task,
        job: job.clone(),
        passed,
        results,
        run: RunInfo { elapsed_ms: start.elapsed().as_millis(), workers: rayon::current_num_threads(), cache: cache.stats() },
    })
}

fn complex_spec(job: &JobSpec) -> Result<ComplexSpec> {
    job.complex_spec().ok_or_else(|| RunError::Invalid("coefficients are required".into()))
}

fn run_validate(job: &JobSpec) -> Result<(Results, bool)> {
    let p = job.algebra.presentation().ctx(|| "building the algebra".into())?;
    let validation = p.validate();
    let passed = validation.passed();
    Ok((Results::Validate { algebra: cohomology::algebra_id(&job.algebra), dim: p.dim(), validation }, passed))
}

#[derive(Serialize)]
struct CohomKey<'a> {
    what: &'static str,
    presentation: crate::algebra::PresentationSpec,
    spec: &'a ComplexSpec,
    q: usize,
    lambda: i64,
    options: &'a cohomology::CohomologyOptions,
}

fn entry_report(e: &cohomology::CohomEntry) -> CohomologyEntryReport {
    let verified = e.representatives.iter().all(|c| cohomology::verify_cocycle(&e.complex, c).is_cocycle);
    CohomologyEntryReport {
        q: e.q,
        lambda: e.lambda,
        dim: e.dim,
        window: e.window.clone(),
        representatives: e.representatives.iter().map(|c| e.complex.format_cochain(c)).collect(),
        terms: e.representatives.iter().map(|c| e.complex.serialize_cochain(c)).collect(),
        verified,
    }
}

/// `H^q` at `λ` through the cache.
pub fn cached_cohomology(
    cache: &Cache,
    spec: &ComplexSpec,
    q: usize,
    lambda: i64,
    opts: &cohomology::CohomologyOptions,
) -> Result<CohomologyEntryReport> {
    let presentation = spec.algebra.presentation().ctx(|| "building the algebra".into())?.to_spec();
    let key = CohomKey { what: "cohomology", presentation, spec, q, lambda, options: opts };
    cache.get_or_compute(&key, || {
        let e = cohomology::cohomology(spec, q, lambda, opts).ctx(|| format!("H^{q} at weight {lambda}"))?;
        Ok(entry_report(&e))
    })
}

fn run_cohomology(job: &JobSpec, cache: &Cache) -> Result<(Results, bool)> {
    let spec = complex_spec(job)?;
    let q = job.q.unwrap_or(0);
    let opts = job.options();
    let entries = job
        .lambdas()
        .par_iter()
        .map(|&l| cached_cohomology(cache, &spec, q, l, &opts))
        .collect::<Result<Vec<_>>>()?;
    let passed = entries.iter().all(|e| e.verified);
    Ok((Results::Cohomology { entries }, passed))
}

/// Checks a named class at `(K, W, N)`; the coboundary search uses the slice
/// enlarged by the job's headroom.
pub fn verify_class(name: &ClassName, k: u32, w: u32, n: u32, headroom: u32, opts: &cohomology::CohomologyOptions) -> Result<VerifyEntry> {
    let class = classes::named_class(name, k, w, n + headroom).ctx(|| format!("building {name}"))?;
    let home = classes::home_spec(name, k, w, n);
    let check = class.verify();
    let witness = cohomology::is_coboundary(&class.complex, &class.cochain);
    Ok(VerifyEntry {
        class: name.to_string(),
        cochain: class.text(),
        lambda: class.lambda,
        cocycle: check.is_cocycle,
        residual: check.residual,
        coboundary: witness.is_some(),
        witness: witness.map(|b| class.complex.format_cochain(&b)),
        window: window_for(&home, class.lambda, opts),
        cut: class.cut,
    })
}

fn run_verify(job: &JobSpec) -> Result<(Results, bool)> {
    let k = job.scale_k().ok_or_else(|| RunError::Invalid("named classes need a builtin family".into()))?;
    let c = job.coefficients.as_ref().ok_or_else(|| RunError::Invalid("coefficients are required".into()))?;
    let opts = job.options();
    let entries = job
        .classes
        .par_iter()
        .map(|name| verify_class(name, k, c.w, c.n, job.headroom, &opts))
        .collect::<Result<Vec<_>>>()?;
    let passed = entries.iter().all(|e| e.cocycle && !e.coboundary);
    Ok((Results::Verify { entries }, passed))
}

fn cells(complex: &CeComplex, entries: impl IntoIterator<Item = PageEntry>) -> Vec<PageCell> {
    entries
        .into_iter()
        .map(|e| PageCell {
            p: e.p,
            q: e.q,
            dim: e.dim,
            representatives: e.representatives.iter().map(|c| complex.format_cochain(c)).collect(),
        })
        .collect()
}

fn page_table(complex: &CeComplex, page: SpectralPage) -> PageTable {
    let d_squared_zero = page.d_squared_failures().is_empty();
    PageTable { r: page.r, cells: cells(complex, page.entries.into_values()), d_squared_zero }
}

/// Pages `E_1`, `E_2` and `E_∞` of a filtered finite model.
pub fn model_spectral(f: &FilteredComplex) -> Result<ModelSpectral> {
    let what = || format!("{:?} pages at weight {}", f.kind, f.lambda);
    let pages = [1, 2].iter().map(|&r| Ok(page_table(&f.complex, f.page(r).ctx(what)?))).collect::<Result<Vec<_>>>()?;
    let einf = f.e_infinity().ctx(what)?;
    Ok(ModelSpectral {
        kind: f.kind,
        lambda: f.lambda,
        stable_page: f.stable_page(),
        pages,
        e_infinity: cells(&f.complex, einf.entries.into_values()),
        convergence: f.convergence_check().ctx(what)?,
    })
}

fn model_passed(m: &ModelSpectral) -> bool {
    m.convergence.agrees() && m.pages.iter().all(|p| p.d_squared_zero)
}

fn run_spectral_ff(job: &JobSpec, cache: &Cache) -> Result<(Results, bool)> {
    let spec = complex_spec(job)?;
    let top = job.q.unwrap_or(2);
    let opts = job.options();
    let lambdas = job.lambdas();
    let complex = Arc::new(spec.build().ctx(|| "building the complex".into())?);
    let models = lambdas
        .par_iter()
        .map(|&l| model_spectral(&spectral::ff_filtration(complex.clone(), l, top).ctx(|| format!("filtering at weight {l}"))?))
        .collect::<Result<Vec<_>>>()?;
    #[derive(Serialize)]
    struct Key<'a> {
        what: &'static str,
        presentation: crate::algebra::PresentationSpec,
        spec: &'a ComplexSpec,
        top: usize,
        lambdas: &'a [i64],
        options: &'a cohomology::CohomologyOptions,
    }
    let presentation = spec.algebra.presentation().ctx(|| "building the algebra".into())?.to_spec();
    let key = Key { what: "stable_ff_e_infinity", presentation, spec: &spec, top, lambdas: &lambdas, options: &opts };
    let stable_e_infinity = cache.get_or_compute(&key, || {
        let mut out: std::collections::BTreeMap<(i64, i64), PageCell> = std::collections::BTreeMap::new();
        for n in 0..=top {
            for &l in &lambdas {
                let e = cohomology::cohomology(&spec, n, l, &opts).ctx(|| format!("H^{n} at weight {l}"))?;
                let f = spectral::ff_filtration(e.complex.clone(), l, n).ctx(|| format!("filtering at weight {l}"))?;
                let pieces = f.graded_classes(n, &e.representatives).ctx(|| format!("graded classes at weight {l}"))?;
                for cell in cells(&e.complex, pieces) {
                    let slot = out
                        .entry((cell.p, cell.q))
                        .or_insert_with(|| PageCell { p: cell.p, q: cell.q, dim: 0, representatives: Vec::new() });
                    slot.dim += cell.dim;
                    slot.representatives.extend(cell.representatives);
                }
            }
        }
        Ok::<_, RunError>(out.into_values().collect::<Vec<_>>())
    })?;
    let stable_window = window_for(&spec, lambdas.iter().copied().max().unwrap_or(0), &opts);
    let passed = models.iter().all(model_passed);
    Ok((Results::SpectralFf { models, stable_window, stable_e_infinity }, passed))
}

fn default_ideal(job: &JobSpec) -> Result<IdealChoice> {
    if let Some(i) = &job.ideal {
        return Ok(i.clone());
    }
    match &job.algebra {
        cohomology::AlgebraChoice::Builtin { family: Family::H, .. } => Ok(IdealChoice::m0_in_h()),
        _ => Err(RunError::Invalid("spectral_hs needs an ideal for this algebra".into())),
    }
}

fn run_spectral_hs(job: &JobSpec, cache: &Cache) -> Result<(Results, bool)> {
    let spec = complex_spec(job)?;
    let top = job.q.unwrap_or(2);
    let opts = job.options();
    let ideal = default_ideal(job)?;
    let pres = spec.algebra.presentation().ctx(|| "building the algebra".into())?;
    let ideal_names: Vec<String> =
        ideal.resolve(&pres).ctx(|| "resolving the ideal".into())?.iter().map(|&i| pres.name(i).to_string()).collect();
    let complex = Arc::new(spec.build().ctx(|| "building the complex".into())?);
    let weights = job
        .lambdas()
        .par_iter()
        .map(|&l| {
            let f = spectral::hs_filtration(complex.clone(), &ideal, l, top).ctx(|| format!("filtering at weight {l}"))?;
            let model = model_spectral(&f)?;
            let two = spectral::hs_e2_two_step(&spec, &ideal, l, top, &opts).ctx(|| format!("two-step E_2 at weight {l}"))?;
            let two_step_e2: Vec<PageCell> = two
                .entries
                .iter()
                .map(|(&(p, q), (dim, reps))| PageCell { p, q, dim: *dim, representatives: reps.clone() })
                .collect();
            let direct_h2 = if top >= 2 { cached_cohomology(cache, &spec, 2, l, &opts)?.dim } else { 0 };
            let e2_11 = two.dim(1, 1);
            Ok(HsWeightReport {
                lambda: l,
                model,
                two_step_e2,
                divergence: Divergence { e2_11, direct_h2, divergent: e2_11 > direct_h2 },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let passed = weights.iter().all(|w| model_passed(&w.model));
    Ok((Results::SpectralHs { ideal: ideal_names, weights }, passed))
}

fn run_sweep(job: &JobSpec, cache: &Cache) -> Result<(Results, bool)> {
    let template = complex_spec(job)?;
    let q = job.q.unwrap_or(0);
    let opts = job.options();
    let grid: Vec<GridPoint> = job.grid.as_ref().map(|g| g.points()).unwrap_or_default();
    let lambdas = job.lambdas();
    let tasks: Vec<(i64, GridPoint)> = lambdas.iter().flat_map(|&l| grid.iter().map(move |&p| (l, p))).collect();
    let rows = tasks
        .par_iter()
        .map(|&(l, pt)| {
            let spec = template.resized(pt.k, pt.w, pt.n);
            let e = cached_cohomology(cache, &spec, q, l, &opts)?;
            Ok(SweepRow { point: pt, dim: e.dim, window: e.window })
        })
        .collect::<Result<Vec<_>>>()?;
    let tables = lambdas
        .iter()
        .zip(rows.chunks(grid.len()))
        .map(|(&lambda, rows)| SweepTable { q, lambda, rows: rows.to_vec(), verdict: verdict(rows) })
        .collect();
    Ok((Results::Sweep { tables }, true))
}

fn run_deformation(job: &JobSpec, cache: &Cache) -> Result<(Results, bool)> {
    let k = job.scale_k().ok_or_else(|| RunError::Invalid("deformations need a builtin family".into()))?;
    let c = job.coefficients.as_ref().ok_or_else(|| RunError::Invalid("coefficients are required".into()))?;
    let window = DeformationWindow { k, w: c.w, n: c.n };
    let scale_text = job.scale.clone().unwrap_or_else(|| "1".into());
    let scale: Q = parse_q(&scale_text).ok_or_else(|| RunError::Invalid(format!("bad scale {scale_text}")))?;
    #[derive(Serialize)]
    struct Key<'a> {
        what: &'static str,
        window: DeformationWindow,
        scale: &'a str,
    }
    let scale_canon = format_q(&scale);
    let report = cache.get_or_compute(&Key { what: "deformation", window, scale: &scale_canon }, || {
        let d = classes::emit_infinitesimal_deformation(window, &scale).ctx(|| "deformation".into())?;
        let p = d.complex.module().presentation().clone();
        let expected = classes::named_class(&ClassName::XyDelta1, k, c.w, c.n).ctx(|| "target class".into())?;
        let expected: Cochain = expected.cochain.scaled(&scale);
        Ok::<_, RunError>(DeformationReport {
            k,
            w: c.w,
            n: c.n,
            scale: scale_canon.clone(),
            coefficients: d.coefficients.iter().map(|(a, b, x)| (a.clone(), b.clone(), format_q(x))).collect(),
            table: d.mu.to_rows(&p),
            residual: d.residual.clone(),
            restriction: d.complex.format_cochain(&d.restriction),
            expected_restriction: d.complex.format_cochain(&expected),
            restriction_matches: d.restriction_matches,
        })
    })?;
    let passed = report.residual.is_zero() && report.restriction_matches;
    Ok((Results::Deformation(report), passed))
}
