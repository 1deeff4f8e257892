use std::f64::consts::FRAC_2_PI;

use runup_core::abel::{abel_forward, AbelQuadrature};
use runup_core::direct::{
    poisson_boundary, shoreline_equation_residual, solve_direct, DirectConfig,
};
use runup_core::hodograph::{hodograph_ic_to_physical, HodographInitialData, PhysicalInitialData};
use runup_core::sampled::{uniform_grid, SampledFunction};
use runup_core::special::bessel_j0;

fn gaussian_profile() -> PhysicalInitialData {
    PhysicalInitialData::new(
        SampledFunction::uniform(-0.5, 60.0, 12_000, |x| {
            0.01 * (-4.0 * (x - 1.0) * (x - 1.0)).exp()
        })
        .unwrap(),
    )
}

#[test]
fn bessel_built_profile_runs_up_as_a_cosine() {
    let a = 0.01;
    let psi0 = SampledFunction::uniform(0.0, 7.0, 4096, |s| a * bessel_j0(2.0 * s)).unwrap();
    let d = hodograph_ic_to_physical(&HodographInitialData::at_rest(psi0).unwrap()).unwrap();
    let cfg = DirectConfig {
        sigma_max: Some(6.0),
        tau_max: Some(3.0),
        ..Default::default()
    };
    let sol = solve_direct(&d, &cfg).unwrap();
    for ((&tau, &psi), &v) in sol.trace.tau.iter().zip(&sol.trace.psi).zip(&sol.trace.v) {
        assert!(
            (psi - a * (2.0 * tau).cos()).abs() < 1e-6 * a,
            "Psi at {tau}"
        );
        assert!((v - a * (2.0 * tau).sin()).abs() < 1e-5 * a, "V at {tau}");
    }
    // the record is the algebraic image of the trace
    for i in 0..sol.record.len() {
        let (tau, v) = (sol.trace.tau[i], sol.trace.v[i]);
        assert!((sol.record.t[i] - (2.0 * tau + v)).abs() < 1e-15);
        assert!((sol.record.x0[i] - (-sol.trace.psi[i] + 0.5 * v * v)).abs() < 1e-15);
    }
}

#[test]
fn runup_extremes_follow_the_trace() {
    let sol = solve_direct(&gaussian_profile(), &DirectConfig::default()).unwrap();
    let runup = sol
        .record
        .x0
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
        .abs();
    let psi_max = sol
        .trace
        .psi
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        (runup / psi_max - 1.0).abs() < 0.05,
        "runup {runup}, max Psi {psi_max}"
    );
    assert!(sol.initial_breaking.margin > 0.9);
    assert_eq!(
        sol.record_breaking.status,
        runup_core::hodograph::BreakingStatus::Ok
    );
}

#[test]
fn abel_consistency_of_the_poisson_trace() {
    let sigma = uniform_grid(0.0, 4.0, 1024).unwrap();
    let psi0 =
        SampledFunction::from_fn(sigma.clone(), |s| (-(s - 1.0) * (s - 1.0) * 3.0).exp()).unwrap();
    let h = HodographInitialData::at_rest(psi0.clone()).unwrap();
    let psi = poisson_boundary(&h, &sigma, &AbelQuadrature::default()).unwrap();
    let back = abel_forward(&psi, &sigma)
        .unwrap()
        .scaled(FRAC_2_PI)
        .unwrap();
    let err = back
        .values()
        .iter()
        .zip(psi0.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err < 1e-3, "{err}");
}

#[test]
fn residual_shrinks_at_least_linearly() {
    let residual = |n: usize| {
        let sigma = uniform_grid(0.0, 4.0, n).unwrap();
        let h = HodographInitialData::new(
            SampledFunction::from_fn(sigma.clone(), |s| (-(s - 1.0) * (s - 1.0) * 3.0).exp())
                .unwrap(),
            SampledFunction::from_fn(sigma.clone(), |s| {
                0.1 * (1.5 * s).sin() * (-s * s / 4.0).exp()
            })
            .unwrap(),
        )
        .unwrap();
        let psi = poisson_boundary(&h, &sigma, &AbelQuadrature::default()).unwrap();
        let tr = runup_core::direct::trace_velocity(&psi).unwrap();
        shoreline_equation_residual(&h, &tr).unwrap().max_abs()
    };
    let (r1, r2, r3) = (residual(128), residual(256), residual(512));
    assert!(r1 / r2 >= 2.0 && r2 / r3 >= 2.0, "{r1} {r2} {r3}");
}

#[test]
fn results_do_not_depend_on_scheduling() {
    let d = gaussian_profile();
    let cfg = DirectConfig {
        n_sigma: 256,
        n_tau: 256,
        ..Default::default()
    };
    let a = solve_direct(&d, &cfg).unwrap();
    let b = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| solve_direct(&d, &cfg).unwrap());
    assert_eq!(a.record, b.record);
}

#[test]
fn explicit_tau_max_beyond_sigma_max_is_a_config_error() {
    let cfg = DirectConfig {
        sigma_max: Some(3.0),
        tau_max: Some(4.0),
        ..Default::default()
    };
    let err = solve_direct(&gaussian_profile(), &cfg).unwrap_err();
    assert!(matches!(err, runup_core::RunupError::Config(_)));
}
