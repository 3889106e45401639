mod common;

use proptest::prelude::*;
use vitsim::params::{Model, ZeroOrderMode};
use vitsim::sideband::output_field;
use vitsim::steady_state::solve_branches;
use vitsim::Error;

fn model(omega: f64, delta_c: f64, xi: f64, eta: f64, eps_ratio: f64) -> Model<f64> {
    let (_, _, m) = common::load("vit_demo.toml");
    Model { omega, delta_c, xi, eta, eps: eps_ratio * xi, ..m }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inversion_sidebands_are_conjugate(
        omega in 0.05f64..0.5, delta_c in -1.0f64..1.0, xi in 0.01f64..1.0,
        eta in 0.0f64..0.2, eps_ratio in 1e-4f64..1e-2, delta in 0.01f64..1.0,
    ) {
        let m = model(omega, delta_c, xi, eta, eps_ratio);
        for b in solve_branches(&m, ZeroOrderMode::Exact).unwrap() {
            match output_field(&b, &m, delta) {
                Ok(r) => prop_assert!((r.z_plus - r.z_minus.conj()).norm() <= 1e-10 * r.z_plus.norm().max(1e-300)),
                Err(Error::Pole { .. }) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn sidebands_scale_linearly_with_probe(
        xi in 0.01f64..1.0, eta in 0.0f64..0.2, delta in 0.01f64..1.0, k in 0.1f64..10.0,
    ) {
        let m = model(0.2, 0.28, xi, eta, 1e-3);
        let b = solve_branches(&m, ZeroOrderMode::Exact).unwrap()[0];
        let (r1, r2) = match (output_field(&b, &m, delta), output_field(&b, &m.with_eps(k * m.eps), delta)) {
            (Ok(a), Ok(c)) => (a, c),
            _ => return Ok(()),
        };
        prop_assert!((r2.l_minus - r1.l_minus * k).norm() <= 1e-9 * (r2.l_minus.norm() + 1e-300));
        prop_assert!((r2.a_minus - r1.a_minus * k).norm() <= 1e-9 * (r2.a_minus.norm() + 1e-300));
        prop_assert!((r2.eps_out - r1.eps_out).norm() <= 1e-8 * r1.eps_out.norm());
        prop_assert!((r2.l_out_minus - r1.l_out_minus).norm() <= 1e-8 * r1.l_out_minus.norm());
    }
}

#[test]
fn vanishing_probe_leaves_no_sidebands() {
    let m = model(0.2, 0.28, 0.3, 0.1, 0.0);
    let b = solve_branches(&m, ZeroOrderMode::Exact).unwrap()[0];
    let r = output_field(&b, &m, 0.2).unwrap();
    for v in [r.a_plus, r.a_minus, r.b_plus, r.b_minus, r.z_plus, r.z_minus, r.l_plus, r.l_minus] {
        assert_eq!(v.norm(), 0.0);
    }
    assert!(r.eps_out.norm() > 0.0);
}

#[test]
fn decoupled_vibration_stays_silent() {
    let m = model(0.2, 0.28, 0.3, 0.0, 1e-3);
    let b = solve_branches(&m, ZeroOrderMode::Exact).unwrap()[0];
    let r = output_field(&b, &m, 0.2).unwrap();
    assert_eq!(r.b_plus.norm(), 0.0);
    assert_eq!(r.b_minus.norm(), 0.0);
    assert!(r.l_minus.norm() > 0.0);
}
