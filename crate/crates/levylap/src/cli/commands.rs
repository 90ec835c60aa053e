//! The seven experiment commands. Each takes a resolved configuration and an
//! output directory, writes CSV/JSON products plus `resolved_config.txt` and
//! `manifest.json`, and reports whether its configured tolerances passed.
//!
//! Work is partitioned by sample index or grid index with streams derived
//! from `(seed, task kind, index)`, so outputs are byte-identical for any
//! worker count.

use crate::cli::config::{ensemble_from, grid_from, measure_from, rde_config_from, ConfigMap};
use crate::cli::csvio::{format_float, read_float_csv, write_csv};
use crate::cli::manifest::RunManifest;
use crate::eigen::spectrum;
use crate::ensemble::{laplacian, sample_matrix};
use crate::estimate::{
    cf_grid, row_sum_cf_distance, stieltjes_of_measure, total_variation_vs_poisson,
    DistanceReport, MeasureEstimate,
};
use crate::measure::{verify_c1, LevyMeasure};
use crate::rde::{solve_free_convolution, solve_rde};
use crate::stream::{RandomStream, StreamKind};
use crate::tree::{sample_tree, tree_resolvent_recursive, TruncationParams};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// What a command run produced and whether its tolerances passed.
#[derive(Debug, Clone)]
pub struct CommandOutcome {
    pub dir: PathBuf,
    pub passed: bool,
    pub summary: String,
}

fn write_run_files(
    command: &str,
    cfg: &ConfigMap,
    seed: u64,
    dir: &Path,
    data_files: &[&str],
) -> Result<()> {
    std::fs::write(dir.join("resolved_config.txt"), cfg.to_flat_text())?;
    let mut files: Vec<&str> = vec!["resolved_config.txt"];
    files.extend_from_slice(data_files);
    RunManifest::begin(command, cfg, seed).finish(dir, &files)?;
    Ok(())
}

/// Samples matrices, solves their full spectra, and writes per-sample
/// eigenvalues, the pooled spectral measure, and its transform on the grid.
pub fn cmd_sample_spectrum(cfg: &ConfigMap, dir: &Path) -> Result<CommandOutcome> {
    let spec = ensemble_from(cfg)?;
    let n = cfg.usize_or("n", 200)?;
    let samples = cfg.usize_or("samples", 1)?;
    let seed = cfg.u64_or("seed", 1)?;
    let grid = grid_from(cfg)?;
    if samples == 0 {
        return Err(Error::Config("need samples >= 1".into()));
    }

    let spectra: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let lap = laplacian(&sample_matrix(&spec, n, seed, i)?);
            Ok(spectrum(&lap)?.values().to_vec())
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(samples * n);
    for (i, vals) in spectra.iter().enumerate() {
        for &v in vals.iter().rev() {
            rows.push(vec![format!("{i}"), format_float(v)]);
        }
    }
    write_csv(&dir.join("spectrum.csv"), &["sample", "eigenvalue"], rows)?;

    let pooled: Vec<f64> = spectra.iter().flatten().copied().collect();
    let est = MeasureEstimate::from_samples(&pooled)?;
    let atom_rows = est
        .atoms()
        .iter()
        .map(|&(x, w)| vec![format_float(x), format_float(w)]);
    write_csv(&dir.join("esm.csv"), &["atom", "mass"], atom_rows)?;

    let mut curve = Vec::with_capacity(grid.len());
    for &z in grid.points() {
        let s = stieltjes_of_measure(&est, z)?;
        curve.push(vec![
            format_float(z.re),
            format_float(z.im),
            format_float(s.re),
            format_float(s.im),
        ]);
    }
    write_csv(
        &dir.join("stieltjes.csv"),
        &["re_z", "im_z", "re_s", "im_s"],
        curve,
    )?;

    write_run_files(
        "sample-spectrum",
        cfg,
        seed,
        dir,
        &["spectrum.csv", "esm.csv", "stieltjes.csv"],
    )?;
    Ok(CommandOutcome {
        dir: dir.to_path_buf(),
        passed: true,
        summary: format!(
            "{samples} samples at n = {n}: {} pooled atoms",
            est.atoms().len()
        ),
    })
}

/// Solves the limiting distributional equation on the grid and writes the
/// transform with errors plus the convergence trace.
pub fn cmd_solve_rde(cfg: &ConfigMap, dir: &Path) -> Result<CommandOutcome> {
    let m = measure_from(cfg)?;
    let grid = grid_from(cfg)?;
    let rde = rde_config_from(cfg, &m)?;
    let seed = cfg.u64_or("seed", 1)?;

    let sol = solve_rde(&m, &grid, &rde, seed)?;
    let est = &sol.estimate;
    let rows = grid.points().iter().enumerate().map(|(c, z)| {
        vec![
            format_float(z.re),
            format_float(z.im),
            format_float(est.values()[c].re),
            format_float(est.values()[c].im),
            format_float(est.stderr()[c]),
        ]
    });
    write_csv(
        &dir.join("estimate.csv"),
        &["re_z", "im_z", "re_s", "im_s", "stderr"],
        rows,
    )?;
    // Suffix maximum of the raw trace: non-increasing by construction, and its
    // final entry equals the raw final step, so the convergence gate is the
    // same quantity either way.
    let mut envelope = sol.trace.clone();
    for t in (0..envelope.len().saturating_sub(1)).rev() {
        envelope[t] = envelope[t].max(envelope[t + 1]);
    }
    let trace_rows = sol.trace.iter().enumerate().map(|(t, &d)| {
        vec![format!("{}", t + 1), format_float(d), format_float(envelope[t])]
    });
    write_csv(
        &dir.join("diagnostics.csv"),
        &["averaged_sweep", "running_mean_step", "step_envelope"],
        trace_rows,
    )?;

    write_run_files(
        "solve-rde",
        cfg,
        seed,
        dir,
        &["estimate.csv", "diagnostics.csv"],
    )?;
    Ok(CommandOutcome {
        dir: dir.to_path_buf(),
        passed: true,
        summary: format!(
            "{} grid points, max stderr {:.2e}, {} guard events",
            grid.len(),
            est.max_stderr(),
            sol.guard_events
        ),
    })
}

/// Monte Carlo over truncated trees at one spectral parameter: writes every
/// root-resolvent sample and the ensemble summary.
pub fn cmd_tree_mc(cfg: &ConfigMap, dir: &Path) -> Result<CommandOutcome> {
    let m = measure_from(cfg)?;
    let infinite_mass = !m.total_mass().is_finite();
    let params = TruncationParams::new(
        cfg.usize_or("depth", 8)?,
        cfg.usize_or("branching", if infinite_mass { 256 } else { 64 })?,
        cfg.f64_or("delta", if infinite_mass { 1e-3 } else { 0.0 })?,
    )?;
    let trees = cfg.usize_or("trees", 100_000)?;
    let seed = cfg.u64_or("seed", 1)?;
    let z = Complex64::new(cfg.f64_or("z_re", 0.0)?, cfg.f64_or("z_im", 0.5)?);

    let values: Vec<Complex64> = (0..trees as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RandomStream::derive(seed, StreamKind::Tree, i);
            let tree = sample_tree(&m, &params, &mut rng)?;
            Ok(tree_resolvent_recursive(&tree, z)?.value)
        })
        .collect::<Result<_>>()?;

    let rows = values.iter().enumerate().map(|(i, v)| {
        vec![format!("{i}"), format_float(v.re), format_float(v.im)]
    });
    write_csv(&dir.join("values.csv"), &["tree", "re_s", "im_s"], rows)?;

    let mean = values.iter().sum::<Complex64>() / trees as f64;
    let spread = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>()
        / (trees.max(2) - 1) as f64;
    let stderr = (spread / trees as f64).sqrt();
    write_csv(
        &dir.join("summary.csv"),
        &["trees", "re_mean", "im_mean", "stderr"],
        [vec![
            format!("{trees}"),
            format_float(mean.re),
            format_float(mean.im),
            format_float(stderr),
        ]],
    )?;

    write_run_files("tree-mc", cfg, seed, dir, &["values.csv", "summary.csv"])?;
    Ok(CommandOutcome {
        dir: dir.to_path_buf(),
        passed: true,
        summary: format!(
            "{trees} trees at z = {z}: mean {:.6} + {:.6}i, stderr {:.2e}",
            mean.re, mean.im, stderr
        ),
    })
}

/// Solves the Gaussian-semicircle fixed point on the grid.
pub fn cmd_free_conv(cfg: &ConfigMap, dir: &Path) -> Result<CommandOutcome> {
    let grid = grid_from(cfg)?;
    let tol = cfg.f64_or("tol", 1e-10)?;
    let seed = cfg.u64_or("seed", 1)?;
    let est = solve_free_convolution(&grid, tol)?;
    let rows = grid.points().iter().enumerate().map(|(c, z)| {
        vec![
            format_float(z.re),
            format_float(z.im),
            format_float(est.values()[c].re),
            format_float(est.values()[c].im),
        ]
    });
    write_csv(
        &dir.join("freeconv.csv"),
        &["re_z", "im_z", "re_s", "im_s"],
        rows,
    )?;
    write_run_files("free-conv", cfg, seed, dir, &["freeconv.csv"])?;
    Ok(CommandOutcome {
        dir: dir.to_path_buf(),
        passed: true,
        summary: format!("{} grid points, {} iterations", grid.len(), est.iterations()),
    })
}

/// Samples matrices and writes uncentered off-diagonal row sums plus their
/// distances to the limiting infinitely divisible law.
pub fn cmd_row_sums(cfg: &ConfigMap, dir: &Path) -> Result<CommandOutcome> {
    let spec = ensemble_from(cfg)?;
    let n = cfg.usize_or("n", 2000)?;
    let samples = cfg.usize_or("samples", 20)?;
    let seed = cfg.u64_or("seed", 1)?;
    let t_max = cfg.f64_or("t_max", 8.0)?;
    let t_count = cfg.usize_or("t_count", 81)?;
    if samples == 0 {
        return Err(Error::Config("need samples >= 1".into()));
    }

    let sums: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|i| Ok(sample_matrix(&spec, n, seed, i)?.row_sums()))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(samples * n);
    for (i, per_row) in sums.iter().enumerate() {
        for (r, &s) in per_row.iter().enumerate() {
            rows.push(vec![format!("{i}"), format!("{r}"), format_float(s)]);
        }
    }
    write_csv(&dir.join("row_sums.csv"), &["sample", "row", "sum"], rows)?;

    let pooled: Vec<f64> = sums.iter().flatten().copied().collect();
    let est = MeasureEstimate::from_samples(&pooled)?;
    let m = spec.limiting_measure()?;
    let mut reports = Vec::new();
    let cf_dev = row_sum_cf_distance(&est, &m, &cf_grid(t_max, t_count))?;
    reports.push(DistanceReport::sup_grid(
        cf_dev,
        format!("characteristic function on [{:.2}, {:.2}], {} points", -t_max, t_max, t_count),
    ));
    if let LevyMeasure::PointMass { lambda } = m {
        let tv = total_variation_vs_poisson(&est, lambda)?;
        reports.push(DistanceReport::total_variation(
            tv,
            format!("row-sum counts vs mean {lambda}"),
        ));
    }
    std::fs::write(
        dir.join("distances.json"),
        serde_json::to_string_pretty(&reports)?,
    )?;

    write_run_files(
        "row-sums",
        cfg,
        seed,
        dir,
        &["row_sums.csv", "distances.json"],
    )?;
    let summary = reports
        .iter()
        .map(|r| format!("{} = {:.4}", r.metric, r.value))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(CommandOutcome {
        dir: dir.to_path_buf(),
        passed: true,
        summary,
    })
}

/// Checks the summability condition and writes the certificate report.
/// Passes exactly when the condition holds.
pub fn cmd_verify_c1(cfg: &ConfigMap, dir: &Path) -> Result<CommandOutcome> {
    let m = measure_from(cfg)?;
    let seed = cfg.u64_or("seed", 1)?;
    let report = verify_c1(&m)?;
    std::fs::write(
        dir.join("c1_report.json"),
        serde_json::to_string_pretty(&report)?,
    )?;
    write_run_files("verify-c1", cfg, seed, dir, &["c1_report.json"])?;
    let holds = report.holds();
    Ok(CommandOutcome {
        dir: dir.to_path_buf(),
        passed: holds,
        summary: if holds {
            "summability condition holds".to_string()
        } else {
            format!("summability condition FAILS: {}", report.notes)
        },
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonOutcome {
    pub report: DistanceReport,
    pub tolerance: f64,
    pub pass: bool,
    pub left: String,
    pub right: String,
}

/// Transform-curve columns pulled out of one run directory.
fn load_curve(dir: &Path, explicit: Option<&str>) -> Result<Vec<(Complex64, Complex64)>> {
    let candidates: Vec<String> = match explicit {
        Some(name) => vec![name.to_string()],
        None => ["estimate.csv", "stieltjes.csv", "freeconv.csv"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    };
    let file = candidates
        .iter()
        .find(|name| dir.join(name.as_str()).exists())
        .ok_or_else(|| {
            Error::Config(format!(
                "{}: no transform CSV found (tried {})",
                dir.display(),
                candidates.join(", ")
            ))
        })?;
    let (header, rows) = read_float_csv(&dir.join(file))?;
    let col = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Config(format!("{file}: missing column `{name}`")))
    };
    let (re_z, im_z, re_s, im_s) = (col("re_z")?, col("im_z")?, col("re_s")?, col("im_s")?);
    Ok(rows
        .iter()
        .map(|r| {
            (
                Complex64::new(r[re_z], r[im_z]),
                Complex64::new(r[re_s], r[im_s]),
            )
        })
        .collect())
}

/// Aligns the transform curves of two prior runs and writes per-point and
/// sup distances; passes when the sup is within `tolerance`.
pub fn cmd_compare(cfg: &ConfigMap, dir: &Path) -> Result<CommandOutcome> {
    let left_dir = PathBuf::from(cfg.require("left")?);
    let right_dir = PathBuf::from(cfg.require("right")?);
    let tolerance = cfg.f64_or("tolerance", 0.03)?;
    let seed = cfg.u64_or("seed", 1)?;
    let left = load_curve(&left_dir, cfg.get("left_file"))?;
    let right = load_curve(&right_dir, cfg.get("right_file"))?;

    let key = |z: Complex64| (z.re.to_bits(), z.im.to_bits());
    let right_map: std::collections::BTreeMap<_, _> =
        right.iter().map(|&(z, s)| (key(z), s)).collect();
    if left.len() != right.len() || left.iter().any(|&(z, _)| !right_map.contains_key(&key(z))) {
        return Err(Error::GridMismatch(format!(
            "runs tabulate different grids ({} vs {} points)",
            left.len(),
            right.len()
        )));
    }

    let mut aligned: Vec<(Complex64, Complex64, Complex64)> = left
        .iter()
        .map(|&(z, s)| (z, s, right_map[&key(z)]))
        .collect();
    aligned.sort_by(|a, b| {
        (a.0.im, a.0.re)
            .partial_cmp(&(b.0.im, b.0.re))
            .expect("finite grid points")
    });
    let sup = aligned
        .iter()
        .map(|&(_, l, r)| (l - r).norm())
        .fold(0.0f64, f64::max);

    let rows = aligned.iter().map(|&(z, l, r)| {
        vec![
            format_float(z.re),
            format_float(z.im),
            format_float(l.re),
            format_float(l.im),
            format_float(r.re),
            format_float(r.im),
            format_float((l - r).norm()),
        ]
    });
    write_csv(
        &dir.join("aligned.csv"),
        &["re_z", "im_z", "re_left", "im_left", "re_right", "im_right", "gap"],
        rows,
    )?;

    let outcome = ComparisonOutcome {
        report: DistanceReport::sup_grid(sup, format!("{} aligned grid points", aligned.len())),
        tolerance,
        pass: sup <= tolerance,
        left: left_dir.display().to_string(),
        right: right_dir.display().to_string(),
    };
    std::fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(&outcome)?,
    )?;

    write_run_files("compare", cfg, seed, dir, &["aligned.csv", "report.json"])?;
    Ok(CommandOutcome {
        dir: dir.to_path_buf(),
        passed: outcome.pass,
        summary: format!(
            "sup distance {:.5} vs tolerance {} -> {}",
            sup,
            tolerance,
            if outcome.pass { "pass" } else { "FAIL" }
        ),
    })
}
