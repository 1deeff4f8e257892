use std::fs;
use std::path::Path;

use log::info;
use serde_json::{json, Map, Value};

use runup_core::direct::{shoreline_equation_residual, solve_direct, DirectConfig, DirectSolution};
use runup_core::hodograph::{
    HodographInitialData, PhysicalInitialData, ShorelineRecord, ShorelineTrace,
};
use runup_core::inversion::{recover_initial, InversionConfig, Recovery, ShorelineObservation};
use runup_core::sampled::SampledFunction;
use runup_core::scaling::{
    scale_to_dimensional, scale_to_dimensionless, Quantity, ScalingParameters,
};
use runup_core::wave_reference::{evolve, extract_boundary, WaveConfig};

use crate::args::{DirectArgs, GridArgs, InverseArgs, RoundtripArgs, WaveeqArgs};
use crate::error::{exit, CliError, CliResult};
use crate::table::{read_table, write_table, Table, TableKind, Units};

pub type Summary = Map<String, Value>;

pub fn prepare_outdir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_summary(dir: &Path, name: &str, summary: &Summary) -> CliResult<()> {
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(summary)?;
    fs::write(&path, text + "\n").map_err(|e| CliError::io(path, e))
}

fn check_units(table: &Table, scaling: Option<&ScalingParameters>) -> CliResult<()> {
    let conflict = match (table.units, scaling) {
        (Some(Units::Si), None) => "input declares SI units; pass --h0 and --alpha",
        (Some(Units::Dimensionless), Some(_)) => {
            "input declares dimensionless units but --h0/--alpha were given"
        }
        _ => return Ok(()),
    };
    Err(CliError::Usage(format!(
        "{}: {conflict}",
        table.path.display()
    )))
}

fn input_json(table: &Table) -> Value {
    json!({
        "path": table.path,
        "sha256": table.sha256,
        "rows": table.rows(),
        "kind": table.kind,
        "units_declared": table.units,
    })
}

/// Reads a profile table, in SI when `scaling` is given.
pub fn load_profile(
    path: &Path,
    scaling: Option<&ScalingParameters>,
    summary: &mut Summary,
) -> CliResult<PhysicalInitialData> {
    let table = read_table(path, TableKind::Profile)?;
    summary.insert("input".into(), input_json(&table));
    check_units(&table, scaling)?;
    table.check_increasing("x")?;
    let (mut x, mut eta) = (table.require("x").to_vec(), table.require("eta0").to_vec());
    if let Some(s) = scaling {
        x = scale_to_dimensionless(&x, Quantity::Position, s);
        eta = scale_to_dimensionless(&eta, Quantity::Elevation, s);
    }
    Ok(PhysicalInitialData::new(SampledFunction::new(x, eta)?))
}

pub fn load_record(
    path: &Path,
    scaling: Option<&ScalingParameters>,
    summary: &mut Summary,
) -> CliResult<ShorelineObservation> {
    let table = read_table(path, TableKind::Record)?;
    summary.insert("input".into(), input_json(&table));
    check_units(&table, scaling)?;
    table.check_increasing("t")?;
    let (mut t, mut x0) = (table.require("t").to_vec(), table.require("x0").to_vec());
    let mut v0 = table.column("v0").map(<[f64]>::to_vec);
    if let Some(s) = scaling {
        t = scale_to_dimensionless(&t, Quantity::Time, s);
        x0 = scale_to_dimensionless(&x0, Quantity::Position, s);
        v0 = v0.map(|v| scale_to_dimensionless(&v, Quantity::Velocity, s));
    }
    Ok(ShorelineObservation::new(t, x0, v0)?)
}

fn direct_config(g: &GridArgs) -> DirectConfig {
    DirectConfig {
        sigma_max: g.sigma_max,
        n_sigma: g.n_sigma,
        n_tau: g.n_tau,
        tau_max: g.tau_max,
        ..Default::default()
    }
}

fn norms(values: &[f64]) -> (f64, f64) {
    let max = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let rms = (values.iter().map(|v| v * v).sum::<f64>() / values.len().max(1) as f64).sqrt();
    (max, rms)
}

fn residual_json(residual: &SampledFunction, psi0: &SampledFunction) -> Value {
    let (max, rms) = norms(residual.values());
    let scale = psi0.max_abs();
    json!({
        "max": max,
        "rms": rms,
        "relative_max": if scale > 0.0 { max / scale } else { max },
        "nodes": residual.len(),
    })
}

fn write_record(
    dir: &Path,
    r: &ShorelineRecord,
    scaling: Option<&ScalingParameters>,
    outputs: &mut Vec<String>,
) -> CliResult<()> {
    let cols: [(&str, &[f64]); 3] = [("t", &r.t), ("x0", &r.x0), ("v0", &r.v0)];
    write_table(
        &dir.join("shoreline_record.csv"),
        TableKind::Record,
        Units::Dimensionless,
        &cols,
    )?;
    outputs.push("shoreline_record.csv".into());
    if let Some(s) = scaling {
        let t = scale_to_dimensional(&r.t, Quantity::Time, s);
        let x0 = scale_to_dimensional(&r.x0, Quantity::Position, s);
        let v0 = scale_to_dimensional(&r.v0, Quantity::Velocity, s);
        write_table(
            &dir.join("shoreline_record_si.csv"),
            TableKind::Record,
            Units::Si,
            &[("t", &t), ("x0", &x0), ("v0", &v0)],
        )?;
        outputs.push("shoreline_record_si.csv".into());
    }
    Ok(())
}

fn write_trace(dir: &Path, tr: &ShorelineTrace, outputs: &mut Vec<String>) -> CliResult<()> {
    write_table(
        &dir.join("trace.csv"),
        TableKind::Trace,
        Units::Dimensionless,
        &[("tau", &tr.tau), ("Psi", &tr.psi), ("V", &tr.v)],
    )?;
    outputs.push("trace.csv".into());
    Ok(())
}

fn write_profile(
    dir: &Path,
    stem: &str,
    eta0: &SampledFunction,
    scaling: Option<&ScalingParameters>,
    outputs: &mut Vec<String>,
) -> CliResult<()> {
    let name = format!("{stem}.csv");
    write_table(
        &dir.join(&name),
        TableKind::Profile,
        Units::Dimensionless,
        &[("x", eta0.grid()), ("eta0", eta0.values())],
    )?;
    outputs.push(name);
    if let Some(s) = scaling {
        let x = scale_to_dimensional(eta0.grid(), Quantity::Position, s);
        let e = scale_to_dimensional(eta0.values(), Quantity::Elevation, s);
        let name = format!("{stem}_si.csv");
        write_table(
            &dir.join(&name),
            TableKind::Profile,
            Units::Si,
            &[("x", &x), ("eta0", &e)],
        )?;
        outputs.push(name);
    }
    Ok(())
}

fn extrema_json(r: &ShorelineRecord, scaling: Option<&ScalingParameters>) -> Value {
    // the shoreline sits at elevation −x0
    let (mut up, mut down) = (0, 0);
    for i in 0..r.len() {
        if r.x0[i] < r.x0[up] {
            up = i;
        }
        if r.x0[i] > r.x0[down] {
            down = i;
        }
    }
    let max_speed = r.v0.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut out = json!({
        "max_runup": { "elevation": -r.x0[up], "x0": r.x0[up], "t": r.t[up] },
        "max_rundown": { "elevation": -r.x0[down], "x0": r.x0[down], "t": r.t[down] },
        "max_speed": max_speed,
    });
    if let Some(s) = scaling {
        let el = |x: f64| -x / s.elevation_factor();
        let pos = |x: f64| x / s.length_factor();
        let time = |t: f64| t / s.time_factor();
        out["si"] = json!({
            "max_runup": { "elevation_m": el(r.x0[up]), "x0_m": pos(r.x0[up]), "t_s": time(r.t[up]) },
            "max_rundown": { "elevation_m": el(r.x0[down]), "x0_m": pos(r.x0[down]), "t_s": time(r.t[down]) },
            "max_speed_m_per_s": max_speed / s.velocity_factor(),
        });
    }
    out
}

fn direct_diagnostics(sol: &DirectSolution) -> Value {
    json!({
        "breaking": { "initial": sol.initial_breaking, "record": sol.record_breaking },
        "residual": residual_json(&sol.residual, &sol.hodograph.psi0),
        "truncation": sol.truncation,
    })
}

fn resolved_direct(cfg: &DirectConfig, sol: Option<&DirectSolution>) -> Value {
    let mut v = serde_json::to_value(cfg).expect("plain data");
    if let Some(sol) = sol {
        v["sigma_max"] = json!(sol.sigma_max);
        v["tau_max"] = json!(sol.tau_max);
    }
    v
}

pub fn run_direct(a: &DirectArgs, summary: &mut Summary) -> CliResult<i32> {
    let scaling = a.scaling.resolve()?;
    summary.insert("scaling".into(), json!(scaling));
    let d = load_profile(&a.io.input, scaling.as_ref(), summary)?;
    let cfg = direct_config(&a.grid);
    summary.insert(
        "resolved".into(),
        json!({ "direct": resolved_direct(&cfg, None) }),
    );
    let sol = solve_direct(&d, &cfg)?;
    summary.insert(
        "resolved".into(),
        json!({ "direct": resolved_direct(&cfg, Some(&sol)) }),
    );
    info!(
        "direct: sigma_max {}, tau_max {}",
        sol.sigma_max, sol.tau_max
    );

    let mut outputs = Vec::new();
    write_record(&a.io.outdir, &sol.record, scaling.as_ref(), &mut outputs)?;
    write_trace(&a.io.outdir, &sol.trace, &mut outputs)?;
    summary.insert(
        "extrema".into(),
        extrema_json(&sol.record, scaling.as_ref()),
    );
    summary.insert("diagnostics".into(), direct_diagnostics(&sol));
    summary.insert("outputs".into(), json!(outputs));
    Ok(exit::OK)
}

fn range_json(range: (f64, f64), scaling: Option<&ScalingParameters>) -> Value {
    let mut v = json!({ "x_min": range.0, "x_max": range.1 });
    if let Some(s) = scaling {
        v["si"] = json!({ "x_min_m": range.0 / s.length_factor(), "x_max_m": range.1 / s.length_factor() });
    }
    v
}

fn inversion_diagnostics(rec: &Recovery) -> CliResult<Value> {
    let h = HodographInitialData::at_rest(rec.psi0.clone())?;
    let residual = shoreline_equation_residual(&h, &rec.trace)?;
    Ok(json!({
        "breaking": { "record": rec.diagnostics.record_breaking, "initial": rec.diagnostics.initial_breaking },
        "residual": residual_json(&residual, &rec.psi0),
        "tail_fraction": rec.diagnostics.tail_fraction,
        "velocity_mismatch": rec.diagnostics.velocity_mismatch,
        "initial_velocity": rec.diagnostics.initial_velocity,
    }))
}

pub fn run_inverse(a: &InverseArgs, summary: &mut Summary) -> CliResult<i32> {
    let scaling = a.scaling.resolve()?;
    summary.insert("scaling".into(), json!(scaling));
    let obs = load_record(&a.io.input, scaling.as_ref(), summary)?;
    let cfg = InversionConfig {
        smoothing: a.smooth.resolve(),
        n_tau: a.n_tau,
        ..Default::default()
    };
    summary.insert("resolved".into(), json!({ "inversion": cfg }));
    let rec = recover_initial(&obs, &cfg)?;

    let mut outputs = Vec::new();
    write_profile(
        &a.io.outdir,
        "eta0_recovered",
        &rec.initial.eta0,
        scaling.as_ref(),
        &mut outputs,
    )?;
    write_trace(&a.io.outdir, &rec.trace, &mut outputs)?;
    summary.insert(
        "covered_range".into(),
        range_json(rec.x_range, scaling.as_ref()),
    );
    summary.insert("diagnostics".into(), inversion_diagnostics(&rec)?);
    summary.insert("outputs".into(), json!(outputs));
    Ok(exit::OK)
}

/// Errors of `recovered` against `truth` on the recovered nodes both cover.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ComparisonReport {
    pub x_min: f64,
    pub x_max: f64,
    pub nodes: usize,
    pub linf: f64,
    pub l2: f64,
    /// `linf / max|truth|`, or `linf` for a flat truth.
    pub relative_linf: f64,
    /// `‖error‖₂ / ‖truth‖₂` over the compared range (trapezoid rule).
    pub relative_l2: f64,
}

pub fn compare_profiles(
    truth: &SampledFunction,
    recovered: &SampledFunction,
) -> CliResult<ComparisonReport> {
    let (t_lo, t_hi) = truth.domain();
    let (r_lo, r_hi) = recovered.domain();
    let (lo, hi) = (t_lo.max(r_lo), t_hi.min(r_hi));
    let xs: Vec<f64> = recovered
        .grid()
        .iter()
        .copied()
        .filter(|&x| x >= lo && x <= hi)
        .collect();
    if xs.len() < 2 {
        return Err(CliError::Core(runup_core::RunupError::OutOfRange {
            requested_lo: t_lo,
            requested_hi: t_hi,
            valid_lo: r_lo,
            valid_hi: r_hi,
        }));
    }
    let exact = truth.eval_many(&xs)?;
    let got = recovered.eval_many(&xs)?;
    let err: Vec<f64> = exact.iter().zip(&got).map(|(a, b)| b - a).collect();
    let trapz = |v: &[f64]| {
        (1..xs.len())
            .map(|i| 0.5 * (xs[i] - xs[i - 1]) * (v[i] * v[i] + v[i - 1] * v[i - 1]))
            .sum::<f64>()
            .sqrt()
    };
    let (linf, _) = norms(&err);
    let l2 = trapz(&err);
    let scale = truth.max_abs();
    let norm = trapz(&exact);
    Ok(ComparisonReport {
        x_min: xs[0],
        x_max: xs[xs.len() - 1],
        nodes: xs.len(),
        linf,
        l2,
        relative_linf: if scale > 0.0 { linf / scale } else { linf },
        relative_l2: if norm > 0.0 { l2 / norm } else { l2 },
    })
}

pub fn run_roundtrip(a: &RoundtripArgs, summary: &mut Summary) -> CliResult<i32> {
    let scaling = a.scaling.resolve()?;
    summary.insert("scaling".into(), json!(scaling));
    let d = load_profile(&a.io.input, scaling.as_ref(), summary)?;
    let dcfg = direct_config(&a.grid);
    let icfg = InversionConfig {
        smoothing: a.smooth.resolve(),
        n_tau: a.grid.n_tau,
        ..Default::default()
    };
    summary.insert(
        "resolved".into(),
        json!({ "direct": resolved_direct(&dcfg, None), "inversion": icfg }),
    );
    let sol = solve_direct(&d, &dcfg)?;
    summary.insert(
        "resolved".into(),
        json!({ "direct": resolved_direct(&dcfg, Some(&sol)), "inversion": icfg }),
    );
    let rec = recover_initial(&ShorelineObservation::from(sol.record.clone()), &icfg)?;

    let mut outputs = Vec::new();
    write_record(&a.io.outdir, &sol.record, scaling.as_ref(), &mut outputs)?;
    write_profile(
        &a.io.outdir,
        "eta0_recovered",
        &rec.initial.eta0,
        scaling.as_ref(),
        &mut outputs,
    )?;
    let report = compare_profiles(&d.eta0, &rec.initial.eta0)?;
    let pass = report.relative_linf <= a.tolerance;
    summary.insert(
        "report".into(),
        json!({ "errors": report, "tolerance": a.tolerance, "pass": pass }),
    );
    summary.insert(
        "covered_range".into(),
        range_json(rec.x_range, scaling.as_ref()),
    );
    summary.insert(
        "diagnostics".into(),
        json!({ "direct": direct_diagnostics(&sol), "inversion": inversion_diagnostics(&rec)? }),
    );
    summary.insert("outputs".into(), json!(outputs));
    println!(
        "roundtrip: relative Linf {:.3e}, relative L2 {:.3e} on x in [{:.4}, {:.4}] (tolerance {:.1e})",
        report.relative_linf, report.relative_l2, report.x_min, report.x_max, a.tolerance
    );
    if !pass {
        return Err(CliError::CheckFailed(format!(
            "roundtrip relative Linf error {:.3e} exceeds {:.1e}",
            report.relative_linf, a.tolerance
        )));
    }
    Ok(exit::OK)
}

pub fn run_waveeq_check(a: &WaveeqArgs, summary: &mut Summary) -> CliResult<i32> {
    let scaling = a.scaling.resolve()?;
    summary.insert("scaling".into(), json!(scaling));
    let d = load_profile(&a.io.input, scaling.as_ref(), summary)?;
    let dcfg = direct_config(&a.grid);
    let sol = solve_direct(&d, &dcfg)?;
    // the reflection off the outer boundary returns to the axis after
    // 2 sigma_max minus the support radius, beyond tau_max <= sigma_max
    let wcfg = WaveConfig {
        n_sigma: a.grid.n_sigma,
        tau_max: Some(sol.tau_max),
        store_every: a.store_every,
        ..Default::default()
    };
    summary.insert(
        "resolved".into(),
        json!({ "direct": resolved_direct(&dcfg, Some(&sol)), "wave": wave_json(&wcfg) }),
    );
    let field = evolve(&sol.hodograph, &wcfg)?;
    let fd = extract_boundary(&field)?;

    let fd_psi = fd.psi_function()?;
    let fd_v = fd.v_function()?;
    let (_, fd_end) = fd_psi.domain();
    let mut psi_gap = 0.0_f64;
    let mut v_gap = 0.0_f64;
    let mut compared = 0;
    for i in 0..sol.trace.tau.len() {
        let tau = sol.trace.tau[i];
        if tau > fd_end {
            break;
        }
        psi_gap = psi_gap.max((fd_psi.eval(tau)? - sol.trace.psi[i]).abs());
        v_gap = v_gap.max((fd_v.eval(tau)? - sol.trace.v[i]).abs());
        compared += 1;
    }
    let (psi_scale, _) = norms(&sol.trace.psi);
    let (v_scale, _) = norms(&sol.trace.v);
    let rel = |gap: f64, scale: f64| if scale > 0.0 { gap / scale } else { gap };
    let (psi_rel, v_rel) = (rel(psi_gap, psi_scale), rel(v_gap, v_scale));
    let pass = psi_rel <= a.tolerance && v_rel <= a.tolerance;

    let mut outputs = Vec::new();
    write_table(
        &a.io.outdir.join("trace_fd.csv"),
        TableKind::Trace,
        Units::Dimensionless,
        &[("tau", &fd.tau), ("Psi", &fd.psi), ("V", &fd.v)],
    )?;
    outputs.push("trace_fd.csv".into());
    write_trace(&a.io.outdir, &sol.trace, &mut outputs)?;
    if a.dump_field {
        let (ns, nt) = (field.sigma.len(), field.tau.len());
        let mut cols = [
            Vec::with_capacity(ns * nt),
            Vec::with_capacity(ns * nt),
            Vec::with_capacity(ns * nt),
            Vec::with_capacity(ns * nt),
        ];
        for (k, &tau) in field.tau.iter().enumerate() {
            for (j, &s) in field.sigma.iter().enumerate() {
                cols[0].push(s);
                cols[1].push(tau);
                cols[2].push(field.psi[[k, j]]);
                cols[3].push(field.phi[[k, j]]);
            }
        }
        write_table(
            &a.io.outdir.join("field.csv"),
            TableKind::Field,
            Units::Dimensionless,
            &[
                ("sigma", &cols[0]),
                ("tau", &cols[1]),
                ("psi", &cols[2]),
                ("phi", &cols[3]),
            ],
        )?;
        outputs.push("field.csv".into());
    }
    summary.insert(
        "report".into(),
        json!({
            "compared_nodes": compared,
            "tau_max": fd_end.min(sol.tau_max),
            "fd_steps": field.steps(),
            "psi_gap": psi_gap,
            "psi_gap_relative": psi_rel,
            "v_gap": v_gap,
            "v_gap_relative": v_rel,
            "tolerance": a.tolerance,
            "pass": pass,
        }),
    );
    summary.insert("diagnostics".into(), direct_diagnostics(&sol));
    summary.insert("outputs".into(), json!(outputs));
    println!(
        "waveeq-check: Psi gap {psi_rel:.3e}, V gap {v_rel:.3e} (relative to max|Psi|, max|V|; tolerance {:.1e})",
        a.tolerance
    );
    if !pass {
        return Err(CliError::CheckFailed(format!(
            "Poisson and finite-difference traces differ by {:.3e} (Psi) and {:.3e} (V), tolerance {:.1e}",
            psi_rel, v_rel, a.tolerance
        )));
    }
    Ok(exit::OK)
}

fn wave_json(c: &WaveConfig) -> Value {
    json!({ "n_sigma": c.n_sigma, "tau_max": c.tau_max, "cfl": c.cfl, "store_every": c.store_every })
}
