//! Closed-form propagators against a step-by-step RK4 integration.

mod common;

use common::{max_diff, rk4_evolve};
use proptest::prelude::*;
use ptbrach_core::brachsolver::{evolve_pt3, evolve_pt4};
use ptbrach_core::hermitian::{evolve_hermitian, EnergyConstraint};
use ptbrach_core::linalg2::{closed_form_exp, matrix_exp_oracle, ComplexMatrix2, StateVector2, C64};
use ptbrach_core::sampling;

const STEPS: usize = 20_000;
const TOL: f64 = 1e-9;

fn rk4_from_up(h: &ComplexMatrix2, t: f64, hbar: f64) -> [C64; 2] {
    rk4_evolve(h.entries(), [C64::new(1.0, 0.0), C64::new(0.0, 0.0)], t, hbar, STEPS)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermitian_closed_form_matches_rk4(seed in any::<u64>(), t in 0.0f64..6.0) {
        let mut rng = sampling::rng(seed);
        let c = sampling::constraint(&mut rng);
        let p = sampling::hermitian(&mut rng, &c);
        let psi = evolve_hermitian(&p, t, &c).unwrap();
        let reference = rk4_from_up(&p.build().unwrap(), t, c.hbar);
        prop_assert!(max_diff(psi.components(), reference) < TOL);
    }

    #[test]
    fn pt3_closed_form_matches_rk4(seed in any::<u64>(), t in 0.0f64..6.0) {
        let mut rng = sampling::rng(seed);
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt3(&mut rng, &c, 1.2);
        let psi = evolve_pt3(&p, t, &c).unwrap();
        let reference = rk4_from_up(&p.build().unwrap(), t, c.hbar);
        prop_assert!(max_diff(psi.components(), reference) < TOL * psi.norm().max(1.0));
    }

    #[test]
    fn pt4_closed_form_matches_rk4(seed in any::<u64>(), t in 0.0f64..6.0) {
        let mut rng = sampling::rng(seed);
        let c = sampling::constraint(&mut rng);
        let p = sampling::pt4(&mut rng, &c, seed % 2 == 0);
        let psi = evolve_pt4(&p, t, &c).unwrap();
        let reference = rk4_from_up(&p.build().unwrap(), t, c.hbar);
        prop_assert!(max_diff(psi.components(), reference) < TOL * psi.norm().max(1.0));
    }

    #[test]
    fn series_and_closed_exponentials_match_rk4(
        entries in proptest::array::uniform4((-2.0f64..2.0, -2.0f64..2.0)),
        t in 0.1f64..2.0,
    ) {
        let [a, b, c, d] = entries.map(|(re, im)| C64::new(re, im));
        let h = ComplexMatrix2::from_rows(a, b, c, d).unwrap();
        let m = h.scale(C64::new(0.0, -t));
        let reference = rk4_from_up(&h, t, 1.0);
        let scale = reference[0].norm().max(reference[1].norm()).max(1.0);
        let series = matrix_exp_oracle(&m).apply(&StateVector2::up());
        prop_assert!(max_diff(series.components(), reference) < TOL * scale);
        if let Ok(closed) = closed_form_exp(&m) {
            prop_assert!(max_diff(closed.apply(&StateVector2::up()).components(), reference) < TOL * scale);
        }
    }
}

#[test]
fn rk4_oracle_is_itself_convergent() {
    let c = EnergyConstraint::new(1.0, 1.0).unwrap();
    let p = ptbrach_core::ptcore::PT3Params::from_alpha(0.7, 1.1, 1.0).unwrap();
    let h = p.build().unwrap().entries();
    let up = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let exact = evolve_pt3(&p, 3.0, &c).unwrap().components();
    let coarse = max_diff(rk4_evolve(h, up, 3.0, 1.0, 100), exact);
    let fine = max_diff(rk4_evolve(h, up, 3.0, 1.0, 200), exact);
    let order = (coarse / fine).log2();
    assert!((order - 4.0).abs() < 0.2, "observed order {order}");
}
