//! Browser bindings: three interactive views of the spectral laboratory,
//! each returning plot-ready JSON for the static demo page.
//!
//! Everything here runs single-threaded (the population solver steps through
//! [`iterate_rde`] directly rather than the parallel driver), sized so each
//! call returns in well under a second in a browser tab. The `*_impl`
//! functions carry the logic with string errors so they remain testable on
//! the host target; the exported wrappers only translate errors to
//! `JsValue`, which exists at runtime solely on wasm32.

use levylap::eigen::{esm, spectrum};
use levylap::ensemble::{laplacian, sample_matrix, EnsembleSpec};
use levylap::estimate::{histogram, ZGrid};
use levylap::measure::LevyMeasure;
use levylap::rde::{init_population, iterate_rde, solve_free_convolution, RdeConfig, RdeVariant};
use levylap::stream::{RandomStream, StreamKind};
use wasm_bindgen::prelude::*;

fn measure_from_name(name: &str, lambda: f64, alpha: f64) -> Result<LevyMeasure, String> {
    match name {
        "point_mass" => LevyMeasure::point_mass(lambda),
        "scaled_gaussian" => LevyMeasure::scaled_gaussian(lambda),
        "alpha_stable" => LevyMeasure::alpha_stable(alpha, 0.5),
        other => return Err(format!("unknown measure `{other}`")),
    }
    .map_err(|e| e.to_string())
}

fn ensemble_from_name(name: &str, lambda: f64, alpha: f64) -> Result<EnsembleSpec, String> {
    let spec = match name {
        "erdos_renyi" => EnsembleSpec::ErdosRenyi { lambda },
        "sparse_gaussian" => EnsembleSpec::SparseGaussian { lambda },
        "levy_pareto" => EnsembleSpec::LevyPareto { alpha, theta: 0.5 },
        other => return Err(format!("unknown ensemble `{other}`")),
    };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn row_grid(re_min: f64, re_max: f64, step: f64, eta: f64) -> Result<ZGrid, String> {
    ZGrid::new(re_min, re_max, step, vec![eta]).map_err(|e| e.to_string())
}

fn rde_density_curve_impl(
    measure: &str,
    lambda: f64,
    alpha: f64,
    eta: f64,
    n_pop: usize,
    sweeps: usize,
    seed: u64,
) -> Result<String, String> {
    let m = measure_from_name(measure, lambda, alpha)?;
    let c1 = levylap::measure::verify_c1(&m).map_err(|e| e.to_string())?;
    if !c1.holds() {
        return Err("the measure fails the summability condition; no Laplacian limit".into());
    }
    let infinite_mass = !m.total_mass().is_finite();
    let grid = row_grid(-6.0, 4.0, 0.25, eta.max(0.25))?;
    let cfg = RdeConfig {
        n_pop: n_pop.clamp(200, 20_000),
        iterations: sweeps.clamp(10, 400),
        burn_in: 0,
        damping: 0.0,
        delta: if infinite_mass { 1e-2 } else { 0.0 },
        max_points: if infinite_mass { 128 } else { 64 },
        variant: RdeVariant::Dependent,
    };
    let mut pop = init_population(&grid, cfg.n_pop);
    let mut rng = RandomStream::derive(seed, StreamKind::Rde, 0);
    for _ in 0..cfg.iterations {
        iterate_rde(&mut pop, &m, &cfg, &mut rng).map_err(|e| e.to_string())?;
    }
    let energy: Vec<f64> = grid.points().iter().map(|z| z.re).collect();
    let density: Vec<f64> = (0..grid.len())
        .map(|c| pop.column_mean(c).im / std::f64::consts::PI)
        .collect();
    serde_json::to_string(&serde_json::json!({
        "energy": energy,
        "density": density,
    }))
    .map_err(|e| e.to_string())
}

fn esm_histogram_impl(
    ensemble: &str,
    lambda: f64,
    alpha: f64,
    n: usize,
    bins: usize,
    seed: u64,
) -> Result<String, String> {
    let spec = ensemble_from_name(ensemble, lambda, alpha)?;
    let n = n.clamp(16, 512);
    let lap = laplacian(&sample_matrix(&spec, n, seed, 0).map_err(|e| e.to_string())?);
    let spec_values = spectrum(&lap).map_err(|e| e.to_string())?;
    let measure = esm(&spec_values);
    let zero_fraction = measure.mass_near_zero(1e-6);
    let cells = histogram(&measure, -8.0, 4.0, bins.clamp(10, 200)).map_err(|e| e.to_string())?;
    let centers: Vec<f64> = cells.iter().map(|c| c.0).collect();
    let density: Vec<f64> = cells.iter().map(|c| c.1).collect();
    serde_json::to_string(&serde_json::json!({
        "centers": centers,
        "density": density,
        "n": n,
        "zero_fraction": zero_fraction,
    }))
    .map_err(|e| e.to_string())
}

fn free_conv_curve_impl(eta: f64) -> Result<String, String> {
    let grid = row_grid(-6.0, 4.0, 0.25, eta.max(0.25))?;
    let est = solve_free_convolution(&grid, 1e-10).map_err(|e| e.to_string())?;
    let energy: Vec<f64> = grid.points().iter().map(|z| z.re).collect();
    let density: Vec<f64> = est
        .values()
        .iter()
        .map(|s| s.im / std::f64::consts::PI)
        .collect();
    serde_json::to_string(&serde_json::json!({
        "energy": energy,
        "density": density,
    }))
    .map_err(|e| e.to_string())
}

/// Limiting spectral density `Im s(E + i eta) / pi` on a real-axis window,
/// solved by population dynamics in the page. Returns
/// `{"energy": [...], "density": [...]}`.
#[wasm_bindgen]
pub fn rde_density_curve(
    measure: &str,
    lambda: f64,
    alpha: f64,
    eta: f64,
    n_pop: usize,
    sweeps: usize,
    seed: u64,
) -> Result<String, JsValue> {
    rde_density_curve_impl(measure, lambda, alpha, eta, n_pop, sweeps, seed)
        .map_err(|e| JsValue::from_str(&e))
}

/// Eigenvalue histogram of one sampled Laplacian. Returns
/// `{"centers": [...], "density": [...], "n": n, "zero_fraction": f}`.
#[wasm_bindgen]
pub fn esm_histogram(
    ensemble: &str,
    lambda: f64,
    alpha: f64,
    n: usize,
    bins: usize,
    seed: u64,
) -> Result<String, JsValue> {
    esm_histogram_impl(ensemble, lambda, alpha, n, bins, seed).map_err(|e| JsValue::from_str(&e))
}

/// Density of the Gaussian-semicircle free convolution on the same window,
/// the high-density reference curve. Returns `{"energy": [...], "density":
/// [...]}`.
#[wasm_bindgen]
pub fn free_conv_curve(eta: f64) -> Result<String, JsValue> {
    free_conv_curve_impl(eta).map_err(|e| JsValue::from_str(&e))
}
