use std::sync::Arc;

use lieco::algebra::{builtin_algebra, Family};
use lieco::cohomology::ComplexSpec;
use lieco::enveloping::{Enveloping, ModuleKind, RewriteStrategy};
use lieco::job::{emit_job, parse_job_str, JobSpec};
use lieco::linalg::SparseMatrix;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_nullity(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..6)) {
        let a = SparseMatrix::from_dense(&rows);
        let kernel = a.kernel_basis();
        prop_assert_eq!(a.rank() + kernel.len(), 5);
        for v in &kernel {
            prop_assert!(a.mul_vec(v).is_empty());
        }
        prop_assert_eq!(a.transpose().rank(), a.rank());
    }

    #[test]
    fn pbw_normal_form_is_strategy_independent(word in prop::collection::vec(0usize..5, 0..6)) {
        let h = Arc::new(builtin_algebra(Family::H, 3).unwrap());
        let u = Enveloping::new(h);
        let fast = u.normalize(&word).unwrap();
        prop_assert_eq!(&fast, &u.normalize_by_rewriting(&word, RewriteStrategy::LeftmostFirst).unwrap());
        prop_assert_eq!(&fast, &u.normalize_by_rewriting(&word, RewriteStrategy::RightmostFirst).unwrap());
    }

    #[test]
    fn d_squared_vanishes(family in prop::sample::select(vec![Family::H, Family::M0]),
                          kind in prop::sample::select(vec![ModuleKind::Trivial, ModuleKind::Adjoint, ModuleKind::Augmentation]),
                          k in 3u32..5, w in 0u32..4, n in 0u32..2, q in 0usize..3, lambda in -2i64..4) {
        let c = ComplexSpec::builtin(family, k, kind, w, n).build().unwrap();
        let d0 = c.differential(q, lambda);
        let d1 = c.differential(q + 1, lambda);
        prop_assert!(d1.mul(&d0).is_zero());
    }

    #[test]
    fn jobs_round_trip(k in 2u32..12, w in 0u32..10, n in 0u32..6, q in 0usize..4,
                       lo in -3i64..3, span in 0i64..5, headroom in 0u32..4, euler in any::<bool>(),
                       kind in prop::sample::select(vec!["trivial", "adjoint", "augmentation"]),
                       family in prop::sample::select(vec!["h", "m0"])) {
        let text = serde_json::json!({
            "algebra": {"family": family, "K": k},
            "coefficients": {"kind": kind, "W": w, "N": n},
            "task": "cohomology",
            "q": q,
            "lambda_range": [lo, lo + span],
            "headroom": headroom,
            "euler_split": euler,
        }).to_string();
        let job: JobSpec = parse_job_str(&text, "gen").unwrap();
        let emitted = emit_job(&job);
        prop_assert_eq!(parse_job_str(&emitted, "emitted").unwrap(), job.clone());
        prop_assert_eq!(job.lambdas().len() as i64, span + 1);
    }
}
