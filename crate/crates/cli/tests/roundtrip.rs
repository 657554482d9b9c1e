//! Reports survive a JSON round trip bit for bit.

use num_complex::Complex64;
use proptest::prelude::*;
use ptbrach::report::{HermitianResult, ReachRow, Report, RowStatus, RunConfig, Status};
use ptbrach_core::brachsolver::{self, FinalStateSpec, FlipRow};
use ptbrach_core::hermitian::HermitianParams;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, -1.0..1.0f64, Just(0.0), Just(1e-300), Just(-0.5e-17)]
}

fn config() -> RunConfig {
    RunConfig {
        omega: 1.0,
        hbar: 1.0,
        tolerance: Some(1e-6),
        args: Default::default(),
    }
}

fn roundtrip<R>(report: &Report<R>)
where
    R: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug,
{
    let text = serde_json::to_string_pretty(report).unwrap();
    let back: Report<R> = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, report);
}

proptest! {
    #[test]
    fn flip_rows(vals in prop::collection::vec(finite(), 8)) {
        let row = FlipRow {
            alpha: vals[0], r: vals[1], s: vals[2], theta: vals[3],
            tau: vals[4], fidelity: vals[5], max_element: vals[6], norm_drift: vals[7],
        };
        let mut residuals = std::collections::BTreeMap::new();
        residuals.insert("fidelity_deficit".to_string(), vals[5]);
        roundtrip(&Report { command: "pt-flip".into(), config: config(), results: vec![row], residuals, status: Status::Ok });
    }

    #[test]
    fn hermitian_results(re in finite(), im in finite(), tau in finite(), theta in finite(), with_params in any::<bool>()) {
        let params = HermitianParams::new(0.5, re, re, theta);
        let results = HermitianResult {
            a: Complex64::new(re, im),
            b: Complex64::new(im, -re),
            tau,
            params: with_params.then_some(params),
            hamiltonian: if with_params { params.build().ok() } else { None },
            fidelity: 1.0 - tau.abs() * 1e-20,
            oracle: None,
        };
        roundtrip(&Report { command: "hermitian-optimal".into(), config: config(), results, residuals: Default::default(), status: Status::EvolutionCheckFailed });
    }

    #[test]
    fn reach_rows(t in 0.01..2.0f64, xi in -0.5..0.5f64) {
        let u = brachsolver::admissible_amplitude(xi);
        let f = FinalStateSpec::new(u, u, 0.1, xi).unwrap();
        let c = ptbrach_core::hermitian::EnergyConstraint::new(1.0, 1.0).unwrap();
        let sol = brachsolver::solve_reachability_auto(&f, t, &c).ok();
        let row = ReachRow {
            t,
            status: if sol.is_some() { RowStatus::Ok } else { RowStatus::NoConvergence },
            solution: sol,
            replay_error: sol.map(|s| s.replay_error(&f, &c)),
            best_residual: None,
            series: None,
        };
        roundtrip(&Report { command: "pt-reach".into(), config: config(), results: vec![row], residuals: Default::default(), status: Status::Ok });
    }
}
