use lieco::cache::Cache;
use lieco::job::parse_job_str;
use lieco::report::{Report, Results};
use lieco::runner::run_job;

fn run(text: &str) -> Report {
    let job = parse_job_str(text, "inline").unwrap();
    run_job(&job, &Cache::disabled()).unwrap()
}

#[test]
fn reports_round_trip_through_json() {
    let r = run(r#"{"algebra": {"family": "m0", "K": 4}, "coefficients": {"kind": "trivial", "W": 0, "N": 0},
                    "task": "cohomology", "q": 1, "lambda_range": [1, 2]}"#);
    let back: Report = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
    assert!(!r.deterministic_json().contains("\"run\""));
    let Results::Cohomology { entries } = &r.results else { panic!("wrong results") };
    let reps: Vec<&str> = entries.iter().flat_map(|e| e.representatives.iter().map(String::as_str)).collect();
    assert_eq!(reps, vec!["e1*⊗1", "e2*⊗1"]);
    assert!(entries.iter().all(|e| e.verified));
}

#[test]
fn validation_report_for_h() {
    let r = run(r#"{"algebra": {"family": "h", "K": 5}, "task": "validate"}"#);
    assert!(r.passed);
    let Results::Validate { algebra, dim, validation } = &r.results else { panic!("wrong results") };
    assert_eq!((algebra.as_str(), *dim), ("h_5", 7));
    assert!(validation.jacobi_failures.is_empty());
    assert!(r.render().contains("0 Jacobi failures"));
}

#[test]
fn ff_pages_converge_on_a_small_model() {
    let r = run(r#"{"algebra": {"family": "m0", "K": 4}, "coefficients": {"kind": "adjoint", "W": 3, "N": 1},
                    "task": "spectral_ff", "q": 1, "lambda_range": [0, 1]}"#);
    let Results::SpectralFf { models, .. } = &r.results else { panic!("wrong results") };
    assert_eq!(models.len(), 2);
    for m in models {
        assert!(m.convergence.rows.iter().all(|row| row.spectral == row.direct));
        assert!(m.pages.iter().all(|p| p.d_squared_zero));
        assert_eq!(m.pages.first().map(|p| p.r), Some(1));
    }
    let text = r.render();
    assert!(text.contains("E_inf"), "{text}");
}

#[test]
fn cache_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"algebra": {"family": "h", "K": 3}, "coefficients": {"kind": "adjoint", "W": 3, "N": 1},
                   "task": "cohomology", "q": 1, "lambda": 0}"#;
    let job = parse_job_str(text, "inline").unwrap();
    let plain = run_job(&job, &Cache::disabled()).unwrap();
    let cache = Cache::new(Some(dir.path().to_path_buf()));
    let cold = run_job(&job, &cache).unwrap();
    let warm = run_job(&job, &cache).unwrap();
    assert_eq!(plain.deterministic_json(), cold.deterministic_json());
    assert_eq!(cold.deterministic_json(), warm.deterministic_json());
    assert!(warm.run.cache.hits > 0);
}
