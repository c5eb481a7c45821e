//! Job files: what to compute, on which model, and where to put the report.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Family, PresentationSpec};
use crate::classes::ClassName;
use crate::cohomology::{AlgebraChoice, CohomologyOptions, ComplexSpec, GridPoint, IdealChoice};
use crate::enveloping::ModuleKind;

#[derive(Debug, Error)]
pub enum JobError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{path}: field `{field}`: {message}")]
    Field { path: String, field: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Validate,
    Cohomology,
    Verify,
    SpectralFf,
    SpectralHs,
    Sweep,
    Deformation,
}

impl Task {
    /// The CLI subcommand that runs this task.
    pub fn command(self) -> &'static str {
        match self {
            Task::Validate => "validate",
            Task::Cohomology => "cohomology",
            Task::Verify => "verify",
            Task::SpectralFf | Task::SpectralHs => "spectral",
            Task::Sweep => "sweep",
            Task::Deformation => "deform",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficients {
    pub kind: ModuleKind,
    #[serde(rename = "W", default)]
    pub w: u32,
    #[serde(rename = "N", default)]
    pub n: u32,
}

/// Sweep grid: explicit points, or ranges walked in lockstep or as a product.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Points(Vec<GridPoint>),
    Ranges {
        #[serde(rename = "K")]
        k: [u32; 2],
        #[serde(rename = "W")]
        w: [u32; 2],
        #[serde(rename = "N")]
        n: [u32; 2],
        #[serde(default)]
        lockstep: bool,
    },
}

impl GridSpec {
    pub fn points(&self) -> Vec<GridPoint> {
        match self {
            GridSpec::Points(p) => p.clone(),
            GridSpec::Ranges { k, w, n, lockstep: true } => {
                let len = (k[1] - k[0]).max(w[1] - w[0]).max(n[1] - n[0]);
                (0..=len)
                    .map(|t| GridPoint {
                        k: Some((k[0] + t).min(k[1])),
                        w: (w[0] + t).min(w[1]),
                        n: (n[0] + t).min(n[1]),
                    })
                    .collect()
            }
            GridSpec::Ranges { k, w, n, lockstep: false } => {
                let mut out = Vec::new();
                for kk in k[0]..=k[1] {
                    for ww in w[0]..=w[1] {
                        for nn in n[0]..=n[1] {
                            out.push(GridPoint { k: Some(kk), w: ww, n: nn });
                        }
                    }
                }
                out
            }
        }
    }
}

fn default_headroom() -> u32 {
    CohomologyOptions::default().headroom
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub algebra: AlgebraChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Coefficients>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_range: Option<[i64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<IdealChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    #[serde(default = "default_headroom")]
    pub headroom: u32,
    #[serde(default = "default_true")]
    pub euler_split: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

impl JobSpec {
    pub fn options(&self) -> CohomologyOptions {
        CohomologyOptions { headroom: self.headroom, euler_split: self.euler_split, min_scale: None }
    }

    pub fn complex_spec(&self) -> Option<ComplexSpec> {
        let c = self.coefficients.as_ref()?;
        Some(ComplexSpec::new(self.algebra.clone(), c.kind, c.w, c.n))
    }

    /// Weights asked for: `lambda_range` inclusive, else `lambda`, else 0.
    pub fn lambdas(&self) -> Vec<i64> {
        match (self.lambda_range, self.lambda) {
            (Some([lo, hi]), _) => (lo..=hi).collect(),
            (None, Some(l)) => vec![l],
            (None, None) => vec![0],
        }
    }

    pub fn scale_k(&self) -> Option<u32> {
        match &self.algebra {
            AlgebraChoice::Builtin { k, .. } => Some(*k),
            AlgebraChoice::Inline(_) => None,
        }
    }

    /// Task-specific checks; `path` labels errors.
    pub fn check(&self, path: &str) -> Result<(), JobError> {
        let field = |f: &str, m: String| Err(JobError::Field { path: path.into(), field: f.into(), message: m });
        if let AlgebraChoice::Builtin { family, k } = &self.algebra {
            if *family == Family::Custom {
                return field("algebra", "the custom family needs an inline basis and relations".into());
            }
            if let Err(e) = crate::algebra::builtin_algebra(*family, *k) {
                return field("algebra.K", e.to_string());
            }
        }
        if let AlgebraChoice::Inline(spec) = &self.algebra {
            if let Err(e) = crate::algebra::LiePresentation::from_spec(spec) {
                return field("algebra", e.to_string());
            }
        }
        if let Some([lo, hi]) = self.lambda_range {
            if lo > hi {
                return field("lambda_range", format!("empty range [{lo}, {hi}]"));
            }
        }
        if self.lambda.is_some() && self.lambda_range.is_some() {
            return field("lambda", "give either lambda or lambda_range".into());
        }
        if let Some(q) = self.q {
            if q > 4 {
                return field("q", format!("degree {q} is out of range (at most 4)"));
            }
        }
        let Some(task) = self.task else { return Ok(()) };
        let needs_coefficients =
            matches!(task, Task::Cohomology | Task::SpectralFf | Task::SpectralHs | Task::Sweep | Task::Verify | Task::Deformation);
        if needs_coefficients && self.coefficients.is_none() {
            return field("coefficients", format!("required for task {}", task.command()));
        }
        match task {
            Task::Cohomology | Task::Sweep if self.q.is_none() => field("q", "required".into()),
            Task::Verify if self.classes.is_empty() => field("classes", "at least one class is required".into()),
            Task::Verify | Task::Deformation if self.scale_k().is_none() => {
                field("algebra", "named classes and deformations need a builtin family".into())
            }
            Task::Sweep if self.grid.is_none() => field("grid", "required".into()),
            Task::Sweep if self.grid.as_ref().is_some_and(|g| g.points().is_empty()) => field("grid", "empty grid".into()),
            Task::Deformation
                if self.scale.as_deref().is_some_and(|s| crate::rational::parse_q(s).is_none()) =>
            {
                field("scale", "expected a rational \"p/q\"".into())
            }
            Task::Deformation if !matches!(self.algebra, AlgebraChoice::Builtin { family: Family::H, .. }) => {
                field("algebra.family", "deformations are built on h".into())
            }
            _ => Ok(()),
        }
    }
}

fn locate(text: &str, e: &serde_json::Error, path: &str) -> JobError {
    let _ = text;
    JobError::Syntax { path: path.into(), line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses and checks a job from text. The algebra is checked before the rest
/// so a bad truncation is reported even when other fields are missing.
pub fn parse_job_str(text: &str, path: &str) -> Result<JobSpec, JobError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| locate(text, &e, path))?;
    let field = |f: &str, m: String| JobError::Field { path: path.into(), field: f.into(), message: m };
    let obj = value.as_object().ok_or_else(|| field("(root)", "expected a JSON object".into()))?;
    let algebra = obj.get("algebra").ok_or_else(|| field("algebra", "missing algebra".into()))?;
    let alg = algebra.as_object().ok_or_else(|| field("algebra", "expected an object".into()))?;
    if alg.contains_key("basis") {
        serde_json::from_value::<PresentationSpec>(algebra.clone()).map_err(|e| field("algebra", e.to_string()))?;
    } else {
        for key in alg.keys() {
            if key != "family" && key != "K" {
                return Err(field(&format!("algebra.{key}"), "unknown field".into()));
            }
        }
        let family: Family = serde_json::from_value(alg.get("family").cloned().ok_or_else(|| field("algebra.family", "missing".into()))?)
            .map_err(|e| field("algebra.family", e.to_string()))?;
        let k = alg.get("K").and_then(|k| k.as_u64()).ok_or_else(|| field("algebra.K", "missing or not a nonnegative integer".into()))?;
        let min = family.min_truncation();
        if family != Family::A && family != Family::B && (k as u32) < min {
            return Err(field("algebra.K", format!("K = {k} is below the minimum {min} for {family}")));
        }
    }
    let job: JobSpec = serde_json::from_value(value).map_err(|e| {
        let msg = e.to_string();
        let name = msg
            .split('`')
            .nth(1)
            .map(str::to_string)
            .unwrap_or_else(|| "(root)".to_string());
        field(&name, msg)
    })?;
    job.check(path)?;
    Ok(job)
}

pub fn parse_job(path: &Path) -> Result<JobSpec, JobError> {
    let text = std::fs::read_to_string(path).map_err(|source| JobError::Io { path: path.to_path_buf(), source })?;
    parse_job_str(&text, &path.display().to_string())
}

pub fn emit_job(job: &JobSpec) -> String {
    serde_json::to_string_pretty(job).expect("jobs serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_the_basic_job() {
        let j = parse_job_str(
            r#"{"algebra":{"family":"h","K":6},"coefficients":{"kind":"adjoint","W":8,"N":6},"task":"cohomology","q":2,"lambda_range":[0,4]}"#,
            "job",
        )
        .unwrap();
        assert_eq!(j.lambdas(), vec![0, 1, 2, 3, 4]);
        assert_eq!(parse_job_str(&emit_job(&j), "job").unwrap(), j);
    }

    #[test]
    fn rejects_bad_jobs() {
        let e = parse_job_str(r#"{"task":"cohomology"}"#, "job").unwrap_err().to_string();
        assert!(e.contains("missing algebra"), "{e}");
        let e = parse_job_str(r#"{"algebra":{"family":"m0","K":1}}"#, "job").unwrap_err().to_string();
        assert!(e.contains("below the minimum 2"), "{e}");
        let e = parse_job_str(r#"{"algebra":{"family":"h","K":4},"colour":1}"#, "job").unwrap_err().to_string();
        assert!(e.contains("colour"), "{e}");
        let e = parse_job_str("{\n  \"algebra\": \n", "job").unwrap_err();
        assert!(matches!(e, JobError::Syntax { line: 3, .. }), "{e}");
        let e = parse_job_str(r#"{"algebra":{"family":"h","K":4},"task":"cohomology"}"#, "job").unwrap_err().to_string();
        assert!(e.contains("coefficients"), "{e}");
    }

    #[test]
    fn grids() {
        let g = GridSpec::Ranges { k: [4, 8], w: [6, 10], n: [4, 8], lockstep: true };
        assert_eq!(g.points().len(), 5);
        let g = GridSpec::Ranges { k: [4, 5], w: [6, 7], n: [4, 4], lockstep: false };
        assert_eq!(g.points().len(), 4);
    }
}
