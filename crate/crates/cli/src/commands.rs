use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use umbilic::discrepancy::{discrepancy_reports, Discrepancy};
use umbilic::geodesic::{
    horizontal_pregeodesic_residual, integrate_geodesic_with, tanh_law_residual, DEFAULT_SPACING,
};
use umbilic::geometry::{AmbientPoint, FrameVector, WarpedProduct};
use umbilic::profile::MAX_TURNING_POINTS;
use umbilic::profile::{IntegrationResult, InvariantSurfaceSpec, IsometryClass};
use umbilic::surface::{
    cylinder_curvatures, gauss_intrinsic_curvature, generate_mesh, numeric_shape_operator,
    ProfileImmersion,
};

use crate::config::{Format, RunOptions};
use crate::io::{self, ProfileRow};
use crate::{CliError, Command};

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(o) => generate(&o.resolve("generate")?),
        Command::Verify(o) => verify(&o.resolve("verify")?),
        Command::Mesh(o) => mesh(&o.resolve("mesh")?),
        Command::Geodesic(o) => geodesic(&o.resolve("geodesic")?),
        Command::Sweep(o) => sweep(&o.resolve("sweep")?),
        Command::Cylinder(o) => cylinder(&o.resolve("cylinder")?),
    }
}

fn numerical(e: umbilic::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn require_out(o: &RunOptions) -> Result<&Path, CliError> {
    o.out
        .as_deref()
        .ok_or_else(|| CliError::Validation("missing --out".into()))
}

fn emit_report<T: Serialize>(o: &RunOptions, report: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
    match &o.report {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn integrate(o: &RunOptions, spec: &InvariantSurfaceSpec) -> Result<IntegrationResult, CliError> {
    let max_tp = o.max_turning_points.unwrap_or(MAX_TURNING_POINTS);
    spec.integrate_profile_with(o.s_end()?, o.tol()?, max_tp)
        .map_err(|e| CliError::Validation(e.to_string()))
}

/// Fails with exit code 3 when the profile stopped early, unless allowed.
fn require_completion(o: &RunOptions, curve: &IntegrationResult) -> Result<(), CliError> {
    if curve.completed() || o.allow_partial {
        return Ok(());
    }
    let last = curve.samples.last().map_or(f64::NAN, |x| x.s);
    Err(CliError::Numerical(format!(
        "profile stopped at s = {last} ({}) before --s-end {}",
        curve.termination,
        o.s_end.unwrap_or(f64::NAN)
    )))
}

fn generate(o: &RunOptions) -> Result<(), CliError> {
    let spec = o.spec()?;
    let out = require_out(o)?;
    let curve = integrate(o, &spec)?;
    let rows = curve
        .samples
        .iter()
        .map(|st| ProfileRow::new(&spec, st))
        .collect::<umbilic::Result<Vec<_>>>()
        .map_err(numerical)?;
    io::write_profile_csv(out, &rows)?;
    eprintln!(
        "wrote {} samples to {} ({}, {} turning points)",
        rows.len(),
        out.display(),
        curve.termination,
        curve.turning_points.len()
    );
    require_completion(o, &curve)
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    input: PathBuf,
    spec: String,
    samples: usize,
    max_unit_speed_residual: f64,
    max_first_integral_residual: f64,
    max_umbilic_analytic: f64,
    max_umbilic_numeric: Option<f64>,
    numeric_rows_checked: usize,
    fd_step: f64,
    max_curvature_column_deviation: f64,
    states_bit_identical: bool,
    max_state_deviation: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    discrepancies: Vec<Discrepancy>,
}

fn verify(o: &RunOptions) -> Result<(), CliError> {
    let input = o
        .input
        .as_deref()
        .ok_or_else(|| CliError::Validation("missing --input".into()))?;
    let spec = o.spec()?;
    let tol = o.tol()?;
    let h = o.fd_step()?;
    let rows = io::read_profile_csv(input)?;
    if rows.is_empty() {
        return Err(CliError::Validation(format!(
            "--input {}: no samples",
            input.display()
        )));
    }

    let (mut unit, mut first, mut analytic, mut column) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for row in &rows {
        let fresh = ProfileRow::new(&spec, &row.state).map_err(numerical)?;
        unit = unit.max(fresh.residual_unit_speed.abs());
        first = first.max(
            spec.first_integral_residual(&row.state)
                .map_err(numerical)?
                .abs(),
        );
        analytic = analytic.max(fresh.residual_umbilic);
        column = column
            .max((fresh.kappa1 - row.kappa1).abs())
            .max((fresh.kappa2 - row.kappa2).abs())
            .max((fresh.nu - row.nu).abs());
    }

    // the same run again: a faithful file reproduces every state exactly
    let s_end = rows.last().map(|r| r.state.s).unwrap_or(0.0);
    let (mut identical, mut deviation) = (false, f64::INFINITY);
    if s_end > spec.initial().s0 {
        let max_tp = o.max_turning_points.unwrap_or(MAX_TURNING_POINTS);
        if let Ok(curve) = spec.integrate_profile_with(s_end, tol, max_tp) {
            if curve.samples.len() == rows.len() {
                identical = true;
                deviation = 0.0;
                for (a, b) in curve.samples.iter().zip(&rows) {
                    let b = &b.state;
                    let pairs = [
                        (a.s, b.s),
                        (a.rho, b.rho),
                        (a.t, b.t),
                        (a.rho_s, b.rho_s),
                        (a.t_s, b.t_s),
                    ];
                    for (x, y) in pairs {
                        identical &= x.to_bits() == y.to_bits();
                        deviation = deviation.max((x - y).abs());
                    }
                }
            }
        }
    }

    // finite-difference shape operator at a few interior rows
    let omega = match spec.class() {
        IsometryClass::HyperbolicTranslation => 1.0,
        _ => 0.3,
    };
    let space = spec.ambient();
    let picks: Vec<usize> = if rows.len() > 2 {
        let n = (rows.len() - 2).min(8);
        (0..n).map(|k| 1 + k * (rows.len() - 2) / n).collect()
    } else {
        Vec::new()
    };
    let mut numeric: Option<f64> = None;
    let mut checked = 0;
    for i in picks {
        let st = rows[i].state;
        let imm = ProfileImmersion::new(&spec, st);
        if let Ok(frame) = numeric_shape_operator(&space, &imm, (st.s, omega), h) {
            numeric = Some(numeric.unwrap_or(0.0).max(frame.umbilic_gap()));
            checked += 1;
        }
    }

    let passed = analytic <= 1e-6 && unit <= 10.0 * tol;
    let report = VerifyReport {
        input: input.to_path_buf(),
        spec: format!("{} / {} / c0 = {}", spec.class(), spec.warp(), spec.c0()),
        samples: rows.len(),
        max_unit_speed_residual: unit,
        max_first_integral_residual: first,
        max_umbilic_analytic: analytic,
        max_umbilic_numeric: numeric,
        numeric_rows_checked: checked,
        fd_step: h,
        max_curvature_column_deviation: column,
        states_bit_identical: identical,
        max_state_deviation: deviation,
        passed,
        discrepancies: if o.discrepancies {
            discrepancy_reports().map_err(numerical)?
        } else {
            Vec::new()
        },
    };
    emit_report(o, &report)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "verification failed: umbilic residual {analytic:e} (bound 1e-6), unit-speed residual {unit:e} (bound {:e})",
            10.0 * tol
        )))
    }
}

fn mesh(o: &RunOptions) -> Result<(), CliError> {
    let spec = o.spec()?;
    let out = require_out(o)?;
    let curve = integrate(o, &spec)?;
    let range = o.omega_range(spec.class());
    let mesh = generate_mesh(&spec, &curve, range, o.omega_steps()?)
        .map_err(|e| CliError::Validation(format!("--omega-min/--omega-max/--omega-steps: {e}")))?;
    let format = o
        .format
        .unwrap_or_else(|| match out.extension().and_then(|x| x.to_str()) {
            Some("csv") => Format::Csv,
            _ => Format::Obj,
        });
    match format {
        Format::Obj => io::write_obj(out, spec.class().name(), &mesh)?,
        Format::Csv => io::write_mesh_csv(out, &mesh)?,
    }
    eprintln!(
        "wrote {}x{} mesh to {}{}",
        mesh.rows(),
        mesh.cols(),
        out.display(),
        if mesh.periodic { " (seam welded)" } else { "" }
    );
    require_completion(o, &curve)
}

#[derive(Debug, Serialize)]
struct GeodesicReport {
    samples: usize,
    termination: String,
    s_last: f64,
    conserved_initial: f64,
    conserved_drift: f64,
    speed_drift: f64,
    pregeodesic_residual: f64,
    tanh_law_residual: f64,
}

fn geodesic(o: &RunOptions) -> Result<(), CliError> {
    let space = WarpedProduct::new(o.kappa()?, o.warp()?);
    let start = AmbientPoint::new(
        o.x0.unwrap_or(0.0),
        o.y0.unwrap_or(0.0),
        o.t0.unwrap_or(0.0),
    );
    let v = match o.velocity.as_deref() {
        Some([a, b, c]) => FrameVector::new(*a, *b, *c),
        _ => {
            return Err(CliError::Validation(
                "--velocity needs three components a1,a2,a3".into(),
            ))
        }
    };
    if (v.norm() - 1.0).abs() > 1e-9 {
        return Err(CliError::Validation(format!(
            "--velocity must have unit length, got |v| = {}",
            v.norm()
        )));
    }
    let v = v / v.norm();
    let spacing = o.spacing.unwrap_or(DEFAULT_SPACING);
    let curve = integrate_geodesic_with(&space, start, v, o.s_end()?, o.tol()?, spacing)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    if let Some(out) = &o.out {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(out)
            .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
        let fail = |e: csv::Error| CliError::Io(format!("{}: {e}", out.display()));
        w.write_record(["s", "x", "y", "t", "a1", "a2", "a3", "nu", "conserved"])
            .map_err(fail)?;
        for x in &curve.samples {
            let values = [
                x.s,
                x.point.x,
                x.point.y,
                x.point.t,
                x.velocity[0],
                x.velocity[1],
                x.velocity[2],
                x.nu,
                x.conserved,
            ];
            w.write_record(values.map(io::decimal)).map_err(fail)?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    let report = GeodesicReport {
        samples: curve.samples.len(),
        termination: curve.termination.to_string(),
        s_last: curve.samples.last().map_or(0.0, |x| x.s),
        conserved_initial: curve.samples.first().map_or(0.0, |x| x.conserved),
        conserved_drift: curve.conserved_drift(),
        speed_drift: curve.speed_drift(),
        pregeodesic_residual: horizontal_pregeodesic_residual(&space, &curve).map_err(numerical)?,
        tanh_law_residual: tanh_law_residual(&space, &curve).map_err(numerical)?,
    };
    emit_report(o, &report)?;
    if curve.termination != umbilic::ode::Termination::ReachedEnd && !o.allow_partial {
        return Err(CliError::Numerical(format!(
            "geodesic stopped at s = {} ({})",
            report.s_last, report.termination
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
struct SweepRow {
    c0: f64,
    termination: String,
    samples: usize,
    s_last: f64,
    turning_points: usize,
    max_unit_speed_residual: f64,
    max_first_integral_residual: f64,
    max_umbilic_residual: f64,
}

fn sweep_one(o: &RunOptions, spec: &InvariantSurfaceSpec) -> umbilic::Result<SweepRow> {
    let max_tp = o.max_turning_points.unwrap_or(MAX_TURNING_POINTS);
    let curve =
        spec.integrate_profile_with(o.s_end.unwrap_or(0.0), o.tol.unwrap_or(1e-10), max_tp)?;
    let (mut unit, mut first, mut umb) = (0.0f64, 0.0f64, 0.0f64);
    for st in &curve.samples {
        let row = ProfileRow::new(spec, st)?;
        unit = unit.max(row.residual_unit_speed.abs());
        first = first.max(spec.first_integral_residual(st)?.abs());
        umb = umb.max(row.residual_umbilic);
    }
    Ok(SweepRow {
        c0: spec.c0(),
        termination: curve.termination.to_string(),
        samples: curve.samples.len(),
        s_last: curve.samples.last().map_or(0.0, |x| x.s),
        turning_points: curve.turning_points.len(),
        max_unit_speed_residual: unit,
        max_first_integral_residual: first,
        max_umbilic_residual: umb,
    })
}

fn sweep(o: &RunOptions) -> Result<(), CliError> {
    let values = o
        .c0_values
        .clone()
        .filter(|v| !v.is_empty())
        .ok_or_else(|| CliError::Validation("missing --c0-values".into()))?;
    o.s_end()?;
    o.tol()?;
    let specs = values
        .iter()
        .map(|&c0| o.spec_with(Some(c0)))
        .collect::<Result<Vec<_>, _>>()?;
    let rows = specs
        .par_iter()
        .map(|spec| sweep_one(o, spec))
        .collect::<umbilic::Result<Vec<_>>>()
        .map_err(numerical)?;
    if let Some(out) = &o.out {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(out)
            .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
        for row in &rows {
            w.serialize(row)
                .map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    emit_report(o, &rows)?;
    let incomplete: Vec<String> = rows
        .iter()
        .filter(|r| r.termination != "reached-end")
        .map(|r| format!("c0 = {} ({} at s = {})", r.c0, r.termination, r.s_last))
        .collect();
    if incomplete.is_empty() || o.allow_partial {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "runs stopped early: {}",
            incomplete.join(", ")
        )))
    }
}

fn cylinder(o: &RunOptions) -> Result<(), CliError> {
    let kappa = o.kappa()?;
    let warp = o.warp()?;
    let kg = o
        .kappa_g2
        .ok_or_else(|| CliError::Validation("missing --kappa-g2".into()))?;
    let ts: Vec<f64> = match (o.t_min, o.t_max) {
        (Some(lo), Some(hi)) => {
            let n = o.t_steps.unwrap_or(11);
            if n < 2 || !(hi > lo) {
                return Err(CliError::Validation(format!(
                    "--t-min/--t-max/--t-steps: need t-min < t-max and at least 2 steps, got [{lo}, {hi}] with {n}"
                )));
            }
            (0..n)
                .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
                .collect()
        }
        (None, None) => vec![o.t0.unwrap_or(0.0)],
        _ => {
            return Err(CliError::Validation(
                "--t-min and --t-max go together".into(),
            ))
        }
    };
    let header = [
        "t",
        "kappa1",
        "kappa2",
        "mean",
        "extrinsic",
        "intrinsic",
        "nu",
        "gauss_residual",
    ];
    let mut lines = Vec::with_capacity(ts.len());
    for t in ts {
        let c = cylinder_curvatures(kg, &warp, t)
            .map_err(|e| CliError::Validation(format!("--t: {e}")))?;
        let w = warp.eval(t).map_err(numerical)?;
        let gauss = gauss_intrinsic_curvature(kappa, &w, c.kappa1 * c.kappa2, 1.0);
        lines.push([
            t,
            c.kappa1,
            c.kappa2,
            c.mean,
            c.extrinsic,
            c.intrinsic,
            c.nu,
            (gauss - c.intrinsic).abs(),
        ]);
    }
    let text = {
        let mut s = header.join(",") + "\n";
        for line in &lines {
            s += &line.map(io::decimal).join(",");
            s.push('\n');
        }
        s
    };
    match &o.out {
        Some(out) => {
            std::fs::write(out, text).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
