//! Report files and their plain-text rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::ValidationReport;
use crate::cache::CacheStats;
use crate::classes::{ResidualReport, TableRow};
use crate::cohomology::{SweepTable, Window};
use crate::complexes::CochainTerm;
use crate::job::{JobSpec, Task};
use crate::spectral::{ConvergenceReport, FiltrationKind};

pub const TOOL: &str = "lieco";

/// One `H^q` at weight `λ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyEntryReport {
    pub q: usize,
    pub lambda: i64,
    pub dim: usize,
    pub window: Window,
    pub representatives: Vec<String>,
    pub terms: Vec<Vec<CochainTerm>>,
    /// Every representative is a cocycle of the model it was computed on.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub class: String,
    pub cochain: String,
    pub lambda: i64,
    pub cocycle: bool,
    pub residual: Vec<Vec<String>>,
    pub coboundary: bool,
    pub witness: Option<String>,
    pub window: Window,
    /// Terms dropped by the truncation.
    pub cut: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageCell {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
    pub representatives: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageTable {
    pub r: i64,
    pub cells: Vec<PageCell>,
    /// `d_r ∘ d_r` vanishes.
    pub d_squared_zero: bool,
}

/// Pages of one filtered finite model at one weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpectral {
    pub kind: FiltrationKind,
    pub lambda: i64,
    pub stable_page: i64,
    pub pages: Vec<PageTable>,
    pub e_infinity: Vec<PageCell>,
    pub convergence: ConvergenceReport,
}

/// The two-step `E_2` next to the direct `H^2` estimate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub e2_11: usize,
    pub direct_h2: usize,
    /// The `E_2^{1,1}` count exceeds the direct `H^2`.
    pub divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HsWeightReport {
    pub lambda: i64,
    pub model: ModelSpectral,
    pub two_step_e2: Vec<PageCell>,
    pub divergence: Divergence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformationReport {
    #[serde(rename = "K")]
    pub k: u32,
    #[serde(rename = "W")]
    pub w: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub scale: String,
    /// `(left, right, coefficient)` of the cup-product solution.
    pub coefficients: Vec<(String, String, String)>,
    pub table: Vec<TableRow>,
    pub residual: ResidualReport,
    pub restriction: String,
    pub expected_restriction: String,
    pub restriction_matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum Results {
    Validate { algebra: String, dim: usize, validation: ValidationReport },
    Cohomology { entries: Vec<CohomologyEntryReport> },
    Verify { entries: Vec<VerifyEntry> },
    SpectralFf { models: Vec<ModelSpectral>, stable_window: Window, stable_e_infinity: Vec<PageCell> },
    SpectralHs { ideal: Vec<String>, weights: Vec<HsWeightReport> },
    Sweep { tables: Vec<SweepTable> },
    Deformation(DeformationReport),
}

/// Timing and cache counters; not part of the deterministic content.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunInfo {
    pub elapsed_ms: u128,
    pub workers: usize,
    pub cache: CacheStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub task: Task,
    pub job: JobSpec,
    pub passed: bool,
    pub results: Results,
    pub run: RunInfo,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The report without its `run` section.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v.as_object_mut().expect("object").remove("run");
        serde_json::to_string_pretty(&v).expect("values serialize")
    }

    /// Human-readable summary for standard output.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{TOOL} {} · {} · {}", self.version, self.task.command(), if self.passed { "passed" } else { "FAILED" });
        match &self.results {
            Results::Validate { algebra, dim, validation } => {
                let _ = writeln!(
                    s,
                    "{algebra}: dim {dim}, {} triples, {} Jacobi failures, {} grading failures",
                    validation.triples_checked,
                    validation.jacobi_failures.len(),
                    validation.grading_failures.len()
                );
            }
            Results::Cohomology { entries } => {
                let _ = writeln!(s, "{:>3} {:>4} {:>5}  {:<10} representatives", "q", "λ", "dim", "window");
                for e in entries {
                    let _ = writeln!(s, "{:>3} {:>4} {:>5}  {:<10} {}", e.q, e.lambda, e.dim, window_text(&e.window), e.representatives.join("; "));
                }
            }
            Results::Verify { entries } => {
                for e in entries {
                    let _ = writeln!(
                        s,
                        "{}: {} | λ {} | cocycle {} | coboundary {} | {}",
                        e.class,
                        e.cochain,
                        e.lambda,
                        e.cocycle,
                        e.coboundary,
                        window_text(&e.window)
                    );
                }
            }
            Results::SpectralFf { models, stable_window, stable_e_infinity } => {
                for m in models {
                    render_model(&mut s, m);
                }
                let _ = writeln!(s, "stable E_inf ({})", window_text(stable_window));
                render_cells(&mut s, stable_e_infinity);
            }
            Results::SpectralHs { ideal, weights } => {
                let _ = writeln!(s, "ideal: {}", ideal.join(", "));
                for w in weights {
                    render_model(&mut s, &w.model);
                    let _ = writeln!(s, "two-step E_2 at λ = {}", w.lambda);
                    render_cells(&mut s, &w.two_step_e2);
                    let _ = writeln!(
                        s,
                        "E_2^(1,1) = {}, direct H^2 = {}, divergent: {}",
                        w.divergence.e2_11, w.divergence.direct_h2, w.divergence.divergent
                    );
                }
            }
            Results::Sweep { tables } => {
                for t in tables {
                    let _ = writeln!(s, "q = {}, λ = {}: {:?}", t.q, t.lambda, t.verdict);
                    for r in &t.rows {
                        let k = r.point.k.map_or("-".to_string(), |k| k.to_string());
                        let _ = writeln!(s, "  K {k:>2} W {:>2} N {:>2}  dim {:>3}  {}", r.point.w, r.point.n, r.dim, window_text(&r.window));
                    }
                }
            }
            Results::Deformation(d) => {
                let _ = writeln!(s, "window K {} W {} N {}, scale {}", d.k, d.w, d.n, d.scale);
                for (a, b, c) in &d.coefficients {
                    let _ = writeln!(s, "  {c} · {a} ⌣ {b}");
                }
                let _ = writeln!(
                    s,
                    "{} table entries, {} triples, {} residual failures",
                    d.table.len(),
                    d.residual.triples_checked,
                    d.residual.failures.len()
                );
                let _ = writeln!(s, "restriction {} (expected {}): {}", d.restriction, d.expected_restriction, d.restriction_matches);
            }
        }
        s
    }
}

fn window_text(w: &Window) -> String {
    let kind = match w.kind {
        crate::cohomology::WindowKind::Exact => "exact",
        crate::cohomology::WindowKind::Stable => "stable",
        crate::cohomology::WindowKind::Truncated => "truncated",
    };
    if w.valid {
        kind.to_string()
    } else {
        format!("{kind}!")
    }
}

fn render_cells(s: &mut String, cells: &[PageCell]) {
    for c in cells.iter().filter(|c| c.dim > 0) {
        let _ = writeln!(s, "  ({}, {}) {:>3}  {}", c.p, c.q, c.dim, c.representatives.join("; "));
    }
}

fn render_model(s: &mut String, m: &ModelSpectral) {
    for page in &m.pages {
        let _ = writeln!(s, "{:?} E_{} at λ = {}", m.kind, page.r, m.lambda);
        render_cells(s, &page.cells);
    }
    let _ = writeln!(s, "{:?} E_inf at λ = {} (page {})", m.kind, m.lambda, m.stable_page);
    render_cells(s, &m.e_infinity);
    for r in &m.convergence.rows {
        let _ = writeln!(s, "  n = {}: pages {} direct {}", r.n, r.spectral, r.direct);
    }
}
