//! Population-dynamics solver for the recursive distributional equation
//! satisfied by the limiting root resolvent, plus the scalar free-convolution
//! fixed point used as a high-density cross-check.
//!
//! The law of the root resolvent `s(z)` solves, in distribution,
//!
//! ```text
//! dependent diagonal:    s  =d=  -(z - sum_k y_k / (s_k y_k - 1))^{-1}
//! independent diagonal:  s  =d=  -(z + sum_j w_j + sum_k y_k^2 s_k)^{-1}
//! ```
//!
//! with `{y_k}` one point-process draw of the Levy measure, `s_k` iid copies
//! of `s`, and `{w_j}` a second, independent draw feeding the diagonal. Both
//! maps send the upper half plane to itself, so a population evolved by
//! synchronous resampling stays Herglotz: `Im s > 0` and `|s| <= 1/Im z`
//! element by element.
//!
//! The solver tracks, per grid point, the running mean of per-sweep
//! population means after burn-in; the final value and a standard error from
//! the per-sweep spread form the reported transform. Columns evolve on
//! derived random streams indexed by grid position, which makes results
//! independent of thread schedule.

use crate::estimate::{StieltjesEstimate, ZGrid};
use crate::measure::{verify_c1, LevyMeasure};
use crate::point_process::sample_point_process;
use crate::quad::GaussHermite;
use crate::stream::{RandomStream, StreamKind};
use crate::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

/// Denominator floor shared with the tree recursion.
const DENOMINATOR_FLOOR: f64 = 1e-14;

/// The running mean over post-burn-in sweeps must move less than this
/// between the last two sweeps, else the solve reports non-convergence.
pub const RUNNING_MEAN_TOL: f64 = 1e-3;

/// Which diagonal the recursion models.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdeVariant {
    /// Diagonal built from the same edge weights (the Laplacian case).
    Dependent,
    /// Diagonal resampled independently of the edges.
    Independent,
}

/// Population-dynamics parameters.
#[derive(Debug, Clone, Copy)]
pub struct RdeConfig {
    /// Population size per grid point.
    pub n_pop: usize,
    /// Total synchronous sweeps.
    pub iterations: usize,
    /// Sweeps discarded before averaging.
    pub burn_in: usize,
    /// Probability of keeping an element unchanged in a sweep.
    pub damping: f64,
    /// Point-process weight cutoff (must be positive for infinite-mass
    /// measures).
    pub delta: f64,
    /// Point-process cap per draw.
    pub max_points: usize,
    pub variant: RdeVariant,
}

impl RdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pop < 2 {
            return Err(Error::InvalidParameter(
                "population needs at least 2 elements".into(),
            ));
        }
        if self.iterations < self.burn_in + 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least burn_in + 2 = {} sweeps, got {}",
                self.burn_in + 2,
                self.iterations
            )));
        }
        if !(self.damping >= 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must lie in [0, 1), got {}",
                self.damping
            )));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cutoff must be finite and >= 0, got {}",
                self.delta
            )));
        }
        if self.max_points == 0 {
            return Err(Error::InvalidParameter(
                "point-process cap must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-grid-point populations of resolvent samples, stored column-major:
/// `values[c * n_pop + j]` is element `j` of grid point `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    grid: ZGrid,
    n_pop: usize,
    values: Vec<Complex64>,
}

impl Population {
    pub fn from_values(grid: ZGrid, n_pop: usize, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() * n_pop || n_pop == 0 {
            return Err(Error::GridMismatch(format!(
                "{} values cannot fill {} grid points times {} elements",
                values.len(),
                grid.len(),
                n_pop
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("population values".into()));
        }
        Ok(Population {
            grid,
            n_pop,
            values,
        })
    }

    pub fn grid(&self) -> &ZGrid {
        &self.grid
    }

    pub fn n_pop(&self) -> usize {
        self.n_pop
    }

    pub fn column(&self, c: usize) -> &[Complex64] {
        &self.values[c * self.n_pop..(c + 1) * self.n_pop]
    }

    fn column_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.values[c * self.n_pop..(c + 1) * self.n_pop]
    }

    /// Elementwise running mean. For a constant column this returns the
    /// common value bitwise (the first element lands exactly, every later
    /// increment is exactly zero), which the lambda = 0 exactness guarantee
    /// relies on; a sum-then-divide mean loses ulps.
    pub fn column_mean(&self, c: usize) -> Complex64 {
        let mut mean = Complex64::new(0.0, 0.0);
        for (j, &s) in self.column(c).iter().enumerate() {
            mean += (s - mean) / (j as f64 + 1.0);
        }
        mean
    }
}

/// Every element starts at `-1/z`, the resolvent of the empty tree.
pub fn init_population(grid: &ZGrid, n_pop: usize) -> Population {
    let mut values = Vec::with_capacity(grid.len() * n_pop);
    for &z in grid.points() {
        let s0 = -z.inv();
        values.extend(std::iter::repeat(s0).take(n_pop));
    }
    Population {
        grid: grid.clone(),
        n_pop,
        values,
    }
}

fn guarded_term(s: Complex64, y: f64, guards: &mut usize) -> Complex64 {
    let mut den = s * y - 1.0;
    if den.norm() < DENOMINATOR_FLOOR {
        *guards += 1;
        den = if den == Complex64::new(0.0, 0.0) {
            Complex64::new(DENOMINATOR_FLOOR, 0.0)
        } else {
            den / den.norm() * DENOMINATOR_FLOOR
        };
    }
    y / den
}

/// One resampled element. Draw order is fixed (edges, then child indices,
/// then the independent diagonal if any) so streams replay identically.
fn resample_element(
    m: &LevyMeasure,
    cfg: &RdeConfig,
    z: Complex64,
    old: &[Complex64],
    rng: &mut RandomStream,
    guards: &mut usize,
) -> Result<Complex64> {
    let pp = sample_point_process(m, cfg.delta, cfg.max_points, rng)?;
    match cfg.variant {
        RdeVariant::Dependent => {
            let mut child_sum = Complex64::new(0.0, 0.0);
            for &y in pp.weights() {
                let s_k = old[rng.gen_range(0..old.len())];
                child_sum += guarded_term(s_k, y, guards);
            }
            Ok(-((z - child_sum).inv()))
        }
        RdeVariant::Independent => {
            let mut quadratic = Complex64::new(0.0, 0.0);
            for &y in pp.weights() {
                let s_k = old[rng.gen_range(0..old.len())];
                quadratic += y * y * s_k;
            }
            let diag = sample_point_process(m, cfg.delta, cfg.max_points, rng)?;
            let diag_sum: f64 = diag.weights().iter().sum();
            Ok(-((z + diag_sum + quadratic).inv()))
        }
    }
}

fn sweep_column(
    m: &LevyMeasure,
    cfg: &RdeConfig,
    z: Complex64,
    column: &mut [Complex64],
    rng: &mut RandomStream,
) -> Result<usize> {
    let old = column.to_vec();
    let mut guards = 0usize;
    for slot in column.iter_mut() {
        if cfg.damping > 0.0 && rng.gen::<f64>() < cfg.damping {
            continue;
        }
        let s = resample_element(m, cfg, z, &old, rng, &mut guards)?;
        debug_assert!(
            s.im > 0.0 && s.norm() <= (1.0 + 1e-9) / z.im,
            "resampled element {s} left the Herglotz region at z = {z}"
        );
        *slot = s;
    }
    Ok(guards)
}

/// One synchronous sweep over every grid point with a caller-supplied
/// stream; returns the number of denominator-floor events.
pub fn iterate_rde(
    pop: &mut Population,
    m: &LevyMeasure,
    cfg: &RdeConfig,
    rng: &mut RandomStream,
) -> Result<usize> {
    cfg.validate()?;
    let mut guards = 0usize;
    for c in 0..pop.grid.len() {
        let z = pop.grid.points()[c];
        let column = pop.column_mut(c);
        guards += sweep_column(m, cfg, z, column, rng)?;
    }
    Ok(guards)
}

/// A solved transform: grid values with errors, the convergence trace
/// (sup over z of the running-mean step, one entry per averaged sweep after
/// the first), guard counts, and the final population for law-level checks.
#[derive(Debug, Clone)]
pub struct RdeSolution {
    pub estimate: StieltjesEstimate,
    pub trace: Vec<f64>,
    pub guard_events: usize,
    pub population: Population,
}

struct ColumnResult {
    value: Complex64,
    stderr: f64,
    diffs: Vec<f64>,
    guards: usize,
    finals: Vec<Complex64>,
}

fn solve_column(
    m: &LevyMeasure,
    cfg: &RdeConfig,
    z: Complex64,
    mut rng: RandomStream,
) -> Result<ColumnResult> {
    let mut column = vec![-z.inv(); cfg.n_pop];
    let mut guards = 0usize;
    let mut sweep_means: Vec<Complex64> = Vec::with_capacity(cfg.iterations - cfg.burn_in);
    for t in 0..cfg.iterations {
        guards += sweep_column(m, cfg, z, &mut column, &mut rng)?;
        if t >= cfg.burn_in {
            // Elementwise running mean: bitwise-exact on constant columns,
            // which keeps the lambda = 0 result at -1/z to the last ulp.
            let mut mean = Complex64::new(0.0, 0.0);
            for (j, &s) in column.iter().enumerate() {
                mean += (s - mean) / (j as f64 + 1.0);
            }
            sweep_means.push(mean);
        }
    }

    let t_post = sweep_means.len();
    let mut running = Complex64::new(0.0, 0.0);
    let mut prev = Complex64::new(0.0, 0.0);
    let mut diffs = Vec::with_capacity(t_post - 1);
    for (t, &mean) in sweep_means.iter().enumerate() {
        running += (mean - running) / (t as f64 + 1.0);
        if t > 0 {
            diffs.push((running - prev).norm());
        }
        prev = running;
    }
    let value = running;
    let spread: f64 = sweep_means
        .iter()
        .map(|&mn| (mn - value).norm_sqr())
        .sum::<f64>()
        / (t_post - 1) as f64;
    let stderr = (spread / t_post as f64).sqrt();
    Ok(ColumnResult {
        value,
        stderr,
        diffs,
        guards,
        finals: column,
    })
}

/// Solves the distributional equation on the grid by population dynamics.
///
/// Refuses measures that fail the summability condition. Columns run on
/// streams derived from `(seed, grid index)`, so the result is a pure
/// function of `(m, grid, cfg, seed)` regardless of how work is scheduled.
pub fn solve_rde(
    m: &LevyMeasure,
    grid: &ZGrid,
    cfg: &RdeConfig,
    seed: u64,
) -> Result<RdeSolution> {
    cfg.validate()?;
    let report = verify_c1(m)?;
    if !report.holds() {
        return Err(Error::Summability {
            reason: if report.notes.is_empty() {
                "the Levy measure fails the summability condition".into()
            } else {
                report.notes.clone()
            },
            report: Box::new(report),
        });
    }

    let columns: Vec<ColumnResult> = grid
        .points()
        .par_iter()
        .enumerate()
        .map(|(c, &z)| {
            let rng = RandomStream::derive(seed, StreamKind::Rde, c as u64);
            solve_column(m, cfg, z, rng)
        })
        .collect::<Result<_>>()?;

    let t_diffs = cfg.iterations - cfg.burn_in - 1;
    let mut trace = vec![0.0f64; t_diffs];
    for col in &columns {
        for (t, &d) in col.diffs.iter().enumerate() {
            trace[t] = trace[t].max(d);
        }
    }
    if let Some(&last) = trace.last() {
        if last > RUNNING_MEAN_TOL {
            return Err(Error::NonConvergence {
                context: "population running mean still moving at the sweep cap".into(),
                residual: last,
            });
        }
    }

    let values: Vec<Complex64> = columns.iter().map(|c| c.value).collect();
    let stderr: Vec<f64> = columns.iter().map(|c| c.stderr).collect();
    let guard_events: usize = columns.iter().map(|c| c.guards).sum();
    let mut pop_values = Vec::with_capacity(grid.len() * cfg.n_pop);
    for col in &columns {
        pop_values.extend_from_slice(&col.finals);
    }
    let population = Population::from_values(grid.clone(), cfg.n_pop, pop_values)?;
    let estimate = StieltjesEstimate::new(grid.clone(), values, stderr, cfg.iterations as u64)?;
    Ok(RdeSolution {
        estimate,
        trace,
        guard_events,
        population,
    })
}

/// Mean over elements of the sup over the listed grid points of the
/// element-wise gap between two populations on the same grid.
pub fn population_distance(a: &Population, b: &Population, indices: &[usize]) -> Result<f64> {
    if a.grid != b.grid || a.n_pop != b.n_pop {
        return Err(Error::GridMismatch(
            "populations live on different grids or sizes".into(),
        ));
    }
    if indices.is_empty() {
        return Err(Error::InvalidParameter("need at least one grid index".into()));
    }
    if indices.iter().any(|&i| i >= a.grid.len()) {
        return Err(Error::InvalidParameter("grid index out of range".into()));
    }
    let mut total = 0.0;
    for j in 0..a.n_pop {
        let mut sup = 0.0f64;
        for &c in indices {
            let gap = (a.column(c)[j] - b.column(c)[j]).norm();
            sup = sup.max(gap);
        }
        total += sup;
    }
    Ok(total / a.n_pop as f64)
}

/// Trace of a coupled two-population run started from distinct states.
#[derive(Debug, Clone)]
pub struct ContractionReport {
    pub initial_distance: f64,
    /// Population distance after each synchronous sweep.
    pub distances: Vec<f64>,
}

/// Evolves two populations from different Herglotz initial states
/// (`-1/z` and `-1/(z + 1)`) under identical randomness: each element uses
/// one shared point-process draw and one shared index draw across both
/// populations and across every grid point, so elements behave as coupled
/// functions of `z`. Damping is ignored. The reported distances measure the
/// contraction of the update map on the given grid.
pub fn contraction_experiment(
    m: &LevyMeasure,
    grid: &ZGrid,
    cfg: &RdeConfig,
    seed: u64,
) -> Result<ContractionReport> {
    cfg.validate()?;
    let report = verify_c1(m)?;
    if !report.holds() {
        return Err(Error::Summability {
            reason: if report.notes.is_empty() {
                "the Levy measure fails the summability condition".into()
            } else {
                report.notes.clone()
            },
            report: Box::new(report),
        });
    }

    let nz = grid.len();
    let n_pop = cfg.n_pop;
    // element-major: state[j * nz + c]
    let mut a: Vec<Complex64> = Vec::with_capacity(n_pop * nz);
    let mut b: Vec<Complex64> = Vec::with_capacity(n_pop * nz);
    for _ in 0..n_pop {
        for &z in grid.points() {
            a.push(-z.inv());
            b.push(-((z + 1.0).inv()));
        }
    }
    let distance = |a: &[Complex64], b: &[Complex64]| -> f64 {
        let mut total = 0.0;
        for j in 0..n_pop {
            let mut sup = 0.0f64;
            for c in 0..nz {
                sup = sup.max((a[j * nz + c] - b[j * nz + c]).norm());
            }
            total += sup;
        }
        total / n_pop as f64
    };

    let mut rng = RandomStream::derive(seed, StreamKind::Coupling, 0);
    let initial_distance = distance(&a, &b);
    let mut distances = Vec::with_capacity(cfg.iterations);
    let mut guards = 0usize;
    for _ in 0..cfg.iterations {
        let old_a = a.clone();
        let old_b = b.clone();
        for j in 0..n_pop {
            let pp = sample_point_process(m, cfg.delta, cfg.max_points, &mut rng)?;
            let picks: Vec<usize> = (0..pp.weights().len())
                .map(|_| rng.gen_range(0..n_pop))
                .collect();
            for c in 0..nz {
                let z = grid.points()[c];
                let mut sum_a = Complex64::new(0.0, 0.0);
                let mut sum_b = Complex64::new(0.0, 0.0);
                for (&y, &k) in pp.weights().iter().zip(&picks) {
                    sum_a += guarded_term(old_a[k * nz + c], y, &mut guards);
                    sum_b += guarded_term(old_b[k * nz + c], y, &mut guards);
                }
                a[j * nz + c] = -((z - sum_a).inv());
                b[j * nz + c] = -((z - sum_b).inv());
            }
        }
        distances.push(distance(&a, &b));
    }
    Ok(ContractionReport {
        initial_distance,
        distances,
    })
}

/// Scalar fixed point `s(z) = E[(X - z - s(z))^{-1}]`, `X ~ N(0, 1)`: the
/// transform of the free additive convolution of the standard Gaussian with
/// the unit semicircle law. Solved per grid point by damped iteration from
/// `-1/z` with a 64-node Gauss-Hermite rule; converges when the update moves
/// less than `tol`.
pub fn solve_free_convolution(grid: &ZGrid, tol: f64) -> Result<StieltjesEstimate> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    const MAX_FC_ITERATIONS: usize = 10_000;
    let gh = GaussHermite::new(64);
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    let mut values = Vec::with_capacity(grid.len());
    let mut worst_iterations = 0u64;
    for &z in grid.points() {
        let mut s = -z.inv();
        let mut converged = false;
        for it in 0..MAX_FC_ITERATIONS {
            let mut next = Complex64::new(0.0, 0.0);
            for (&u, &w) in gh.nodes.iter().zip(&gh.weights) {
                let x = std::f64::consts::SQRT_2 * u;
                next += w / (x - z - s);
            }
            next *= inv_sqrt_pi;
            let step = (next - s).norm();
            s = 0.5 * s + 0.5 * next;
            if step < tol {
                converged = true;
                worst_iterations = worst_iterations.max(it as u64 + 1);
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                context: format!("free-convolution fixed point at z = {z}"),
                residual: tol,
            });
        }
        if !(s.im > 0.0) {
            return Err(Error::NonFinite(format!(
                "free-convolution transform at z = {z} left the upper half plane"
            )));
        }
        values.push(s);
    }
    StieltjesEstimate::new(grid.clone(), values, vec![0.0; grid.len()], worst_iterations)
}
