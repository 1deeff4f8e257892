use runup_core::hodograph::{initial_to_hodograph, HodographInitialData, PhysicalInitialData};
use runup_core::sampled::{uniform_grid, SampledFunction};
use runup_core::wave_reference::{evolve, extract_boundary, WaveConfig};

#[test]
fn constant_field_has_a_still_shoreline() {
    let h =
        HodographInitialData::at_rest(SampledFunction::uniform(0.0, 3.0, 32, |_| -0.2).unwrap())
            .unwrap();
    let tr = extract_boundary(
        &evolve(
            &h,
            &WaveConfig {
                n_sigma: 128,
                ..Default::default()
            },
        )
        .unwrap(),
    )
    .unwrap();
    assert!(tr.psi.iter().all(|&p| p == -0.2));
    assert!(tr.v.iter().all(|&v| v == 0.0));
}

#[test]
fn boundary_velocity_is_half_the_trace_slope() {
    let d = PhysicalInitialData::new(
        SampledFunction::uniform(-0.5, 40.0, 8000, |x| {
            0.01 * (-4.0 * (x - 1.0) * (x - 1.0)).exp()
        })
        .unwrap(),
    );
    let h = initial_to_hodograph(&d, &uniform_grid(0.0, 6.0, 2048).unwrap()).unwrap();
    let gap = |n: usize| {
        let cfg = WaveConfig {
            n_sigma: n,
            tau_max: Some(4.0),
            ..Default::default()
        };
        let tr = extract_boundary(&evolve(&h, &cfg).unwrap()).unwrap();
        let psi = tr.psi_function().unwrap();
        let scale = tr.v.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let gap =
            tr.v.iter()
                .zip(psi.slopes())
                .map(|(v, d)| (v + 0.5 * d).abs())
                .fold(0.0, f64::max);
        gap / scale
    };
    let (coarse, fine) = (gap(256), gap(512));
    assert!(fine < 1e-2 && fine < coarse, "{coarse} {fine}");
}

#[test]
fn snapshots_are_uniform_in_tau() {
    let h = HodographInitialData::at_rest(
        SampledFunction::uniform(0.0, 2.0, 64, |s| (-s * s).exp()).unwrap(),
    )
    .unwrap();
    let sol = evolve(
        &h,
        &WaveConfig {
            n_sigma: 64,
            tau_max: Some(1.0),
            store_every: 4,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(sol.psi.nrows(), sol.tau.len());
    assert_eq!(sol.psi.ncols(), sol.sigma.len());
    let dt = sol.tau[1] - sol.tau[0];
    assert!((dt - 4.0 * sol.dtau).abs() < 1e-14);
}
