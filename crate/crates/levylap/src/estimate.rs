//! Shared estimate types: spectral-parameter grids, Stieltjes-transform
//! tables, and atomic measure estimates.
//!
//! Both computation routes (matrix sampling and the distributional
//! recursion) report their results through these types, so comparisons
//! between routes are grid-aligned by construction. A Stieltjes table holds
//! `s(z) = integral (x - z)^{-1} dmu(x)` on a rectangle of upper-half-plane
//! points; a measure estimate holds a purely atomic measure (eigenvalues,
//! row sums, histogram material) with its cumulative-distribution and
//! characteristic-function views.

use crate::measure::{id_characteristic_function, LevyMeasure};
use crate::{Error, Result};
use num_complex::Complex64;

/// Smallest distance to the real axis any grid may use; closer rows amplify
/// both Monte Carlo noise and finite-size effects faster than they add
/// resolution.
pub const MIN_IMAGINARY: f64 = 0.25;

/// Rectangular grid of spectral parameters `z = E + i eta`: energies
/// `re_min, re_min + re_step, ..` up to `re_max`, crossed with a fixed list
/// of imaginary parts. Points are ordered one imaginary row at a time,
/// energies ascending.
#[derive(Debug, Clone)]
pub struct ZGrid {
    re_min: f64,
    re_max: f64,
    re_step: f64,
    im_values: Vec<f64>,
    points: Vec<Complex64>,
}

impl PartialEq for ZGrid {
    fn eq(&self, other: &Self) -> bool {
        self.re_min == other.re_min
            && self.re_max == other.re_max
            && self.re_step == other.re_step
            && self.im_values == other.im_values
    }
}

impl ZGrid {
    pub fn new(re_min: f64, re_max: f64, re_step: f64, im_values: Vec<f64>) -> Result<Self> {
        if !(re_min.is_finite() && re_max.is_finite() && re_step.is_finite()) {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        if re_max <= re_min {
            return Err(Error::InvalidParameter(format!(
                "grid needs re_max > re_min, got [{re_min}, {re_max}]"
            )));
        }
        if re_step <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive, got {re_step}"
            )));
        }
        if im_values.is_empty() {
            return Err(Error::InvalidParameter(
                "grid needs at least one imaginary part".into(),
            ));
        }
        for &im in &im_values {
            if !(im.is_finite() && im >= MIN_IMAGINARY - 1e-12) {
                return Err(Error::InvalidParameter(format!(
                    "imaginary parts must be >= {MIN_IMAGINARY}, got {im}"
                )));
            }
        }
        let steps = ((re_max - re_min) / re_step).round() as usize;
        let mut points = Vec::with_capacity((steps + 1) * im_values.len());
        for &im in &im_values {
            for k in 0..=steps {
                let re = re_min + k as f64 * re_step;
                points.push(Complex64::new(re, im));
            }
        }
        Ok(ZGrid {
            re_min,
            re_max,
            re_step,
            im_values,
            points,
        })
    }

    /// The working default: energies -8..4 in steps of 1/4, two heights.
    pub fn default_grid() -> Self {
        ZGrid::new(-8.0, 4.0, 0.25, vec![0.5, 1.0]).expect("valid default grid")
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn im_values(&self) -> &[f64] {
        &self.im_values
    }

    pub fn params(&self) -> (f64, f64, f64) {
        (self.re_min, self.re_max, self.re_step)
    }

    /// Indices of the grid points on the row `Im z = im`.
    pub fn row_indices(&self, im: f64) -> Vec<usize> {
        self.points
            .iter()
            .enumerate()
            .filter(|(_, z)| (z.im - im).abs() < 1e-12)
            .map(|(k, _)| k)
            .collect()
    }
}

/// A Stieltjes transform tabulated on a grid, with per-point Monte Carlo
/// standard errors (zero for exact evaluations).
#[derive(Debug, Clone)]
pub struct StieltjesEstimate {
    grid: ZGrid,
    values: Vec<Complex64>,
    stderr: Vec<f64>,
    iterations: u64,
}

impl StieltjesEstimate {
    pub fn new(
        grid: ZGrid,
        values: Vec<Complex64>,
        stderr: Vec<f64>,
        iterations: u64,
    ) -> Result<Self> {
        if values.len() != grid.len() || stderr.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} grid points vs {} values and {} errors",
                grid.len(),
                values.len(),
                stderr.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("Stieltjes values".into()));
        }
        if stderr.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::NonFinite("Stieltjes standard errors".into()));
        }
        Ok(StieltjesEstimate {
            grid,
            values,
            stderr,
            iterations,
        })
    }

    /// Exact evaluation: zero standard error, no iteration count.
    pub fn exact(grid: ZGrid, values: Vec<Complex64>) -> Result<Self> {
        let n = grid.len();
        StieltjesEstimate::new(grid, values, vec![0.0; n], 0)
    }

    pub fn grid(&self) -> &ZGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn stderr(&self) -> &[f64] {
        &self.stderr
    }

    pub fn iterations(&self) -> u64 {
        self.iterations
    }

    pub fn max_stderr(&self) -> f64 {
        self.stderr.iter().copied().fold(0.0, f64::max)
    }

    /// A Stieltjes transform of a positive measure maps the upper half plane
    /// into itself; a non-positive imaginary part means the estimate left the
    /// admissible branch.
    pub fn herglotz_ok(&self) -> bool {
        self.values.iter().all(|v| v.im > 0.0)
    }
}

/// Largest pointwise modulus difference over two estimates on the same grid.
pub fn sup_grid_distance(a: &StieltjesEstimate, b: &StieltjesEstimate) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(
            "estimates tabulated on different grids".into(),
        ));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Sup distance restricted to the row `Im z = im`.
pub fn sup_grid_distance_on_im(a: &StieltjesEstimate, b: &StieltjesEstimate, im: f64) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(
            "estimates tabulated on different grids".into(),
        ));
    }
    let idx = a.grid.row_indices(im);
    if idx.is_empty() {
        return Err(Error::GridMismatch(format!("grid has no row at Im z = {im}")));
    }
    Ok(idx
        .into_iter()
        .map(|k| (a.values[k] - b.values[k]).norm())
        .fold(0.0, f64::max))
}

/// Smoothed spectral density along one grid row:
/// `rho_eta(E) = Im s(E + i eta) / pi`, returned as `(E, rho)` pairs with
/// energies ascending.
pub fn density_row(est: &StieltjesEstimate, im: f64) -> Result<Vec<(f64, f64)>> {
    let idx = est.grid.row_indices(im);
    if idx.is_empty() {
        return Err(Error::GridMismatch(format!("grid has no row at Im z = {im}")));
    }
    Ok(idx
        .into_iter()
        .map(|k| {
            let z = est.grid.points()[k];
            (z.re, est.values[k].im / std::f64::consts::PI)
        })
        .collect())
}

/// Trapezoid rule for `integral E^k f(E) dE` over tabulated `(E, f)` pairs.
pub fn trapezoid_moment(row: &[(f64, f64)], k: u32) -> f64 {
    let g = |(e, f): (f64, f64)| e.powi(k as i32) * f;
    row.windows(2)
        .map(|w| (w[1].0 - w[0].0) * (g(w[0]) + g(w[1])) / 2.0)
        .sum()
}

/// A purely atomic probability measure: locations strictly ascending, masses
/// positive and summing to one. Duplicate locations are merged on
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEstimate {
    atoms: Vec<(f64, f64)>,
}

impl MeasureEstimate {
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidParameter("measure needs at least one atom".into()));
        }
        let mut total = 0.0;
        for &(x, w) in &atoms {
            if !x.is_finite() || !w.is_finite() {
                return Err(Error::NonFinite("measure atom".into()));
            }
            if w <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "atom masses must be positive, got {w} at {x}"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "atom masses must sum to 1, got {total}"
            )));
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite locations"));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 += w,
                _ => merged.push((x, w)),
            }
        }
        Ok(MeasureEstimate { atoms: merged })
    }

    /// Empirical measure of a sample: mass `1/len` per point.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let w = 1.0 / samples.len() as f64;
        MeasureEstimate::from_atoms(samples.iter().map(|&x| (x, w)).collect())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Right-continuous cumulative distribution `mu((-inf, x])`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.0 <= x)
            .map(|a| a.1)
            .sum()
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.atoms
            .iter()
            .map(|&(x, w)| w * x.powi(k as i32))
            .sum()
    }

    /// Fractional absolute moment `sum w |x|^r`, the tightness diagnostic
    /// (small `r` is robust to heavy tails).
    pub fn abs_moment(&self, r: f64) -> f64 {
        self.atoms
            .iter()
            .map(|&(x, w)| w * x.abs().powf(r))
            .sum()
    }

    /// Mass in `{|x| <= tol}`, the estimate's zero-eigenvalue weight.
    pub fn mass_near_zero(&self, tol: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.0.abs() <= tol)
            .map(|a| a.1)
            .sum()
    }

    /// Characteristic function `sum_x mass(x) e^{itx}`, normalized by total
    /// mass.
    pub fn characteristic_function(&self, t: f64) -> Complex64 {
        let total = self.total_mass();
        self.atoms
            .iter()
            .map(|&(x, w)| Complex64::from_polar(w, t * x))
            .sum::<Complex64>()
            / total
    }
}

/// Exact Stieltjes transform of an atomic measure,
/// `sum_x mass(x) / (x - z)` for `Im z > 0`.
pub fn stieltjes_of_measure(est: &MeasureEstimate, z: Complex64) -> Result<Complex64> {
    if !(z.im > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Stieltjes transform needs Im z > 0, got {z}"
        )));
    }
    Ok(est
        .atoms()
        .iter()
        .map(|&(x, w)| w / (Complex64::new(x, 0.0) - z))
        .sum())
}

/// Kolmogorov distance `sup_x |F_a(x) - F_b(x)|` of two atomic measures,
/// taken over atom locations and their left limits.
pub fn kolmogorov_distance(a: &MeasureEstimate, b: &MeasureEstimate) -> f64 {
    let mut sup = 0.0_f64;
    let (mut ia, mut ib) = (0usize, 0usize);
    let (mut fa, mut fb) = (0.0_f64, 0.0_f64);
    while ia < a.atoms.len() || ib < b.atoms.len() {
        let xa = a.atoms.get(ia).map_or(f64::INFINITY, |t| t.0);
        let xb = b.atoms.get(ib).map_or(f64::INFINITY, |t| t.0);
        let x = xa.min(xb);
        // left limit at x
        sup = sup.max((fa - fb).abs());
        while ia < a.atoms.len() && a.atoms[ia].0 == x {
            fa += a.atoms[ia].1;
            ia += 1;
        }
        while ib < b.atoms.len() && b.atoms[ib].0 == x {
            fb += b.atoms[ib].1;
            ib += 1;
        }
        // value at x
        sup = sup.max((fa - fb).abs());
    }
    sup
}

/// Uniform-bin histogram over `[lo, hi]`: `(bin center, mass / bin width)`
/// pairs. Mass outside the window is dropped.
pub fn histogram(est: &MeasureEstimate, lo: f64, hi: f64, bins: usize) -> Result<Vec<(f64, f64)>> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) || bins == 0 {
        return Err(Error::InvalidParameter(format!(
            "histogram needs lo < hi and bins >= 1, got [{lo}, {hi}] with {bins} bins"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut mass = vec![0.0; bins];
    for &(x, w) in est.atoms() {
        if x >= lo && x <= hi {
            let b = (((x - lo) / width) as usize).min(bins - 1);
            mass[b] += w;
        }
    }
    Ok(mass
        .into_iter()
        .enumerate()
        .map(|(b, m)| (lo + (b as f64 + 0.5) * width, m / width))
        .collect())
}

/// Total variation distance between an integer-supported empirical measure
/// and the Poisson law with the given mean.
pub fn total_variation_vs_poisson(est: &MeasureEstimate, mean: f64) -> Result<f64> {
    if !(mean.is_finite() && mean > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Poisson mean must be positive, got {mean}"
        )));
    }
    let total = est.total_mass();
    let mut empirical: Vec<f64> = Vec::new();
    for &(x, w) in est.atoms() {
        let k = x.round();
        if k < 0.0 || (x - k).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "Poisson comparison needs nonnegative integer support, got atom at {x}"
            )));
        }
        let k = k as usize;
        if empirical.len() <= k {
            empirical.resize(k + 1, 0.0);
        }
        empirical[k] += w / total;
    }
    // extend until the Poisson tail is negligible
    let mut pmf = vec![(-mean).exp()];
    loop {
        let k = pmf.len();
        let next = pmf[k - 1] * mean / k as f64;
        pmf.push(next);
        if k >= empirical.len() && next < 1e-15 {
            break;
        }
    }
    let len = pmf.len().max(empirical.len());
    empirical.resize(len, 0.0);
    pmf.resize(len, 0.0);
    let l1: f64 = empirical
        .iter()
        .zip(&pmf)
        .map(|(e, p)| (e - p).abs())
        .sum();
    // remaining Poisson tail beyond the table
    let covered: f64 = pmf.iter().sum();
    Ok(0.5 * (l1 + (1.0 - covered).max(0.0)))
}

/// One comparison outcome: which metric, its value, and the resolution
/// (grid or support description) it was computed on.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct DistanceReport {
    pub metric: String,
    pub value: f64,
    pub resolution: String,
}

impl DistanceReport {
    pub fn kolmogorov(value: f64, resolution: impl Into<String>) -> Self {
        DistanceReport {
            metric: "kolmogorov".into(),
            value,
            resolution: resolution.into(),
        }
    }

    pub fn sup_grid(value: f64, resolution: impl Into<String>) -> Self {
        DistanceReport {
            metric: "sup_grid".into(),
            value,
            resolution: resolution.into(),
        }
    }

    pub fn total_variation(value: f64, resolution: impl Into<String>) -> Self {
        DistanceReport {
            metric: "total_variation".into(),
            value,
            resolution: resolution.into(),
        }
    }
}

/// Symmetric characteristic-function grid: `count` points spanning
/// `[-t_max, t_max]`.
pub fn cf_grid(t_max: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| -t_max + 2.0 * t_max * k as f64 / (count - 1) as f64)
        .collect()
}

/// Sup distance between the empirical characteristic function of `est` and
/// the infinitely divisible law with Levy measure `m` (and the drift that
/// makes row sums converge without extra centering).
pub fn row_sum_cf_distance(est: &MeasureEstimate, m: &LevyMeasure, t_grid: &[f64]) -> Result<f64> {
    let drift = m.compensator_drift()?;
    let mut sup = 0.0_f64;
    for &t in t_grid {
        let reference = id_characteristic_function(m, drift, t)?;
        let empirical = est.characteristic_function(t);
        sup = sup.max((reference - empirical).norm());
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = ZGrid::default_grid();
        assert_eq!(g.len(), 49 * 2);
        assert_eq!(g.points()[0], Complex64::new(-8.0, 0.5));
        assert_eq!(g.points()[48], Complex64::new(4.0, 0.5));
        assert_eq!(g.points()[49], Complex64::new(-8.0, 1.0));
        assert_eq!(g.row_indices(1.0).len(), 49);
        assert!(g.row_indices(0.75).is_empty());
    }

    #[test]
    fn grid_validation() {
        assert!(ZGrid::new(-1.0, 1.0, 0.5, vec![0.1]).is_err());
        assert!(ZGrid::new(1.0, -1.0, 0.5, vec![0.5]).is_err());
        assert!(ZGrid::new(-1.0, 1.0, 0.0, vec![0.5]).is_err());
        assert!(ZGrid::new(-1.0, 1.0, 0.5, vec![]).is_err());
        assert!(ZGrid::new(-1.0, 1.0, 0.5, vec![0.25]).is_ok());
    }

    #[test]
    fn exact_estimate_of_point_spectrum() {
        // mu = delta_2: s(z) = 1/(2 - z)
        let g = ZGrid::new(-2.0, 2.0, 1.0, vec![0.5]).unwrap();
        let values: Vec<Complex64> = g
            .points()
            .iter()
            .map(|&z| (Complex64::new(2.0, 0.0) - z).inv())
            .collect();
        let est = StieltjesEstimate::exact(g, values).unwrap();
        assert!(est.herglotz_ok());
        assert_eq!(est.max_stderr(), 0.0);
        let row = density_row(&est, 0.5).unwrap();
        // Cauchy kernel: rho(E) = (eta/pi) / ((2-E)^2 + eta^2)
        for &(e, rho) in &row {
            let want = 0.5 / std::f64::consts::PI / ((2.0 - e).powi(2) + 0.25);
            assert!((rho - want).abs() < 1e-14);
        }
    }

    #[test]
    fn grid_mismatch_is_detected() {
        let g1 = ZGrid::new(-1.0, 1.0, 1.0, vec![0.5]).unwrap();
        let g2 = ZGrid::new(-1.0, 1.0, 1.0, vec![1.0]).unwrap();
        let ones = |g: &ZGrid| vec![Complex64::new(0.0, 1.0); g.len()];
        let a = StieltjesEstimate::exact(g1.clone(), ones(&g1)).unwrap();
        let b = StieltjesEstimate::exact(g2.clone(), ones(&g2)).unwrap();
        assert!(sup_grid_distance(&a, &b).is_err());
        let c = StieltjesEstimate::exact(g1.clone(), ones(&g1)).unwrap();
        assert_eq!(sup_grid_distance(&a, &c).unwrap(), 0.0);
        assert!(sup_grid_distance_on_im(&a, &c, 0.75).is_err());
    }

    #[test]
    fn trapezoid_on_cauchy_density() {
        // integral over [-40, 40] of the Cauchy(eta = 1/2) density is
        // 1 - (2/pi) arctan(1/80), within 1e-4 of the trapezoid value at
        // step 1/100
        let eta = 0.5;
        let row: Vec<(f64, f64)> = (0..=8000)
            .map(|k| {
                let e = -40.0 + k as f64 / 100.0;
                (e, eta / std::f64::consts::PI / (e * e + eta * eta))
            })
            .collect();
        let mass = trapezoid_moment(&row, 0);
        let want = 1.0 - 2.0 / std::f64::consts::PI * (eta / 40.0).atan();
        assert!((mass - want).abs() < 1e-4, "mass {mass} vs {want}");
        // odd moment of a symmetric density vanishes
        assert!(trapezoid_moment(&row, 1).abs() < 1e-12);
    }

    #[test]
    fn atoms_merge_and_cdf_steps() {
        let est = MeasureEstimate::from_atoms(vec![(1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]).unwrap();
        assert_eq!(est.atoms(), &[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(est.cdf(-0.5), 0.0);
        assert_eq!(est.cdf(0.0), 0.5);
        assert_eq!(est.cdf(0.5), 0.5);
        assert_eq!(est.cdf(1.0), 1.0);
        assert_eq!(est.moment(2), 0.5);
        assert_eq!(est.mass_near_zero(1e-6), 0.5);
        assert!(MeasureEstimate::from_atoms(vec![(0.0, -1.0)]).is_err());
        assert!(MeasureEstimate::from_atoms(vec![]).is_err());
        // masses must be a probability
        assert!(MeasureEstimate::from_atoms(vec![(0.0, 0.5), (1.0, 0.6)]).is_err());
    }

    #[test]
    fn stieltjes_and_fractional_moments_of_atoms() {
        // the two-atom kernel measure {0: 1/2, -2: 1/2} at z = i
        let est = MeasureEstimate::from_atoms(vec![(0.0, 0.5), (-2.0, 0.5)]).unwrap();
        let s = stieltjes_of_measure(&est, Complex64::new(0.0, 1.0)).unwrap();
        assert!((s - Complex64::new(-0.2, 0.6)).norm() < 1e-15);
        assert!(stieltjes_of_measure(&est, Complex64::new(0.0, -1.0)).is_err());
        // delta_0: s(i) = i
        let delta = MeasureEstimate::from_atoms(vec![(0.0, 1.0)]).unwrap();
        let s = stieltjes_of_measure(&delta, Complex64::new(0.0, 1.0)).unwrap();
        assert!((s - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        // |x|^r moments
        assert_eq!(est.abs_moment(1.0), 1.0);
        assert_eq!(delta.abs_moment(0.2), 0.0);
        let r = est.abs_moment(0.2);
        assert!((r - 0.5 * 2.0_f64.powf(0.2)).abs() < 1e-15);
    }

    #[test]
    fn distance_report_serialization() {
        let rep = DistanceReport::sup_grid(0.015, "Im z = 0.5 row, 49 points");
        let text = serde_json::to_string(&rep).unwrap();
        assert!(text.contains("\"metric\":\"sup_grid\""));
        let back: DistanceReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back.value, 0.015);
    }

    #[test]
    fn kolmogorov_of_hand_measures() {
        let a = MeasureEstimate::from_atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let b = MeasureEstimate::from_atoms(vec![(0.0, 0.75), (1.0, 0.25)]).unwrap();
        assert_eq!(kolmogorov_distance(&a, &b), 0.25);
        assert_eq!(kolmogorov_distance(&a, &a), 0.0);
        // disjoint supports: the first measure is fully ahead in between
        let c = MeasureEstimate::from_atoms(vec![(-1.0, 1.0)]).unwrap();
        let d = MeasureEstimate::from_atoms(vec![(1.0, 1.0)]).unwrap();
        assert_eq!(kolmogorov_distance(&c, &d), 1.0);
    }

    #[test]
    fn histogram_masses() {
        let est = MeasureEstimate::from_samples(&[0.1, 0.2, 0.9, 1.5]).unwrap();
        let h = histogram(&est, 0.0, 1.0, 2).unwrap();
        // two atoms in [0, 0.5), one in [0.5, 1], one outside
        assert_eq!(h.len(), 2);
        assert!((h[0].0 - 0.25).abs() < 1e-15 && (h[0].1 - 1.0).abs() < 1e-12);
        assert!((h[1].0 - 0.75).abs() < 1e-15 && (h[1].1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn poisson_total_variation() {
        // exact Poisson(2) frequencies give distance 0 up to the table tail
        let mean = 2.0_f64;
        let mut atoms = Vec::new();
        let mut p = (-mean).exp();
        for k in 0..60 {
            atoms.push((k as f64, p));
            p *= mean / (k + 1) as f64;
        }
        let est = MeasureEstimate::from_atoms(atoms).unwrap();
        let tv = total_variation_vs_poisson(&est, mean).unwrap();
        assert!(tv < 1e-12, "self distance {tv}");
        // two-point laws: hand value
        let a = MeasureEstimate::from_atoms(vec![(0.0, 0.5), (1.0, 0.5)]).unwrap();
        let tv = total_variation_vs_poisson(&a, 2.0).unwrap();
        // TV = 1 - P(0) - min(0.5, P(1)) = 1 - e^{-2} - e^{-2}... direct sum:
        // 0.5(|0.5 - e^{-2}| + |0.5 - 2 e^{-2}| + P(>=2))
        let p0 = (-2.0_f64).exp();
        let want = 0.5 * ((0.5 - p0) + (0.5 - 2.0 * p0) + (1.0 - 3.0 * p0));
        assert!((tv - want).abs() < 1e-12);
        // non-integer support is rejected
        let bad = MeasureEstimate::from_atoms(vec![(0.5, 1.0)]).unwrap();
        assert!(total_variation_vs_poisson(&bad, 2.0).is_err());
    }

    #[test]
    fn characteristic_function_views() {
        let est = MeasureEstimate::from_atoms(vec![(-1.0, 0.5), (1.0, 0.5)]).unwrap();
        for &t in &[0.0, 0.3, 2.0] {
            let phi = est.characteristic_function(t);
            assert!((phi.re - t.cos()).abs() < 1e-15);
            assert!(phi.im.abs() < 1e-15);
        }
        let grid = cf_grid(5.0, 33);
        assert_eq!(grid.len(), 33);
        assert_eq!(grid[0], -5.0);
        assert_eq!(grid[32], 5.0);
        assert_eq!(grid[16], 0.0);
    }

    #[test]
    fn row_sum_reference_matches_poisson_samples() {
        // the empirical CF of the exact Poisson(2) pmf is the reference CF
        // of the point-mass measure, so the distance is the table tail only
        let mean = 2.0_f64;
        let mut atoms = Vec::new();
        let mut p = (-mean).exp();
        for k in 0..80 {
            atoms.push((k as f64, p));
            p *= mean / (k + 1) as f64;
        }
        let est = MeasureEstimate::from_atoms(atoms).unwrap();
        let m = LevyMeasure::point_mass(mean).unwrap();
        let d = row_sum_cf_distance(&est, &m, &cf_grid(5.0, 33)).unwrap();
        assert!(d < 1e-12, "distance {d}");
    }
}
