use yamabe_core::continuation::{solve_at_s, ContinuationConfig};
use yamabe_core::discretize::DiscreteSystem;
use yamabe_core::geometry::*;
use yamabe_core::model::ModelParams;

#[test]
fn identities_are_second_order() {
    for n in [2, 3] {
        let pairs = sample_pairs(n, 1000, 42).unwrap();
        for delta in [0.5, 1.0, 2.0] {
            let coarse = identity_errors(&pairs, &FDScheme::new(0.02).unwrap(), delta);
            let fine = identity_errors(&pairs, &FDScheme::new(0.01).unwrap(), delta);
            let at_default = identity_errors(&pairs, &FDScheme::default(), delta);
            assert!(at_default.laplacian < 1e-5 && at_default.gradient < 1e-5);
            for order in [
                observed_order(coarse.laplacian, fine.laplacian),
                observed_order(coarse.gradient, fine.gradient),
            ] {
                assert!((1.8..=2.2).contains(&order), "n={n} delta={delta} order={order}");
            }
        }
    }
}

#[test]
fn lifted_functions_are_invariant() {
    let sys = DiscreteSystem::with_degree(32, ModelParams::new(3, 1.0, 3.0).unwrap()).unwrap();
    let phi: Vec<f64> = sys.sample_mode(3).unwrap().iter().map(|v| 0.3 * v).collect();
    for seed in 0..20 {
        let x = sample_pair(3, seed).unwrap();
        let a = random_orthogonal(4, 1000 + seed);
        let y = x.rotated(&a);
        let u = |z: &SpherePair| sys.grid().interpolate(&phi, z.f()).unwrap() + 1.0;
        assert!((u(&x) - u(&y)).abs() < 1e-13);
    }
}

#[test]
fn trivial_profile_has_rounding_level_residual() {
    let prm = ModelParams::new(2, 1.0, 3.0).unwrap();
    let sys = DiscreteSystem::with_degree(24, prm).unwrap();
    let zero = vec![0.0; sys.size()];
    for lam in [0.5, 12.0] {
        let r = lifted_residual(&zero, lam, sys.grid(), &prm, 50, &FDScheme::default(), 3).unwrap();
        assert!(r < 1e-9);
    }
}

#[test]
fn lifted_residual_of_branch_point() {
    let prm = ModelParams::new(2, 1.0, 3.0).unwrap();
    let sys = DiscreteSystem::with_degree(64, prm).unwrap();
    let pt = solve_at_s(2, 0.3, None, &sys, &ContinuationConfig::default()).unwrap();
    let res = |h: f64, lam: f64| {
        lifted_residual(&pt.phi, lam, sys.grid(), &prm, 100, &FDScheme::new(h).unwrap(), 5).unwrap()
    };
    let coarse = res(0.02, pt.lambda);
    let fine = res(0.01, pt.lambda);
    let ratio = coarse / fine;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    let converged = res(1e-3, pt.lambda);
    assert!(converged < 1e-4);
    assert!(res(1e-3, 1.1 * pt.lambda) > 100.0 * converged);
}

#[test]
fn lifted_residual_rejects_nonpositive_profiles() {
    let prm = ModelParams::new(2, 1.0, 3.0).unwrap();
    let sys = DiscreteSystem::with_degree(8, prm).unwrap();
    let bad = vec![-1.5; sys.size()];
    assert!(lifted_residual(&bad, 1.0, sys.grid(), &prm, 5, &FDScheme::default(), 0).is_err());
}
