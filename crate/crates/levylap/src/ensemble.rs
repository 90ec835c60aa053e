//! Random matrix ensembles and their Laplacians.
//!
//! A draw is a symmetric `n x n` matrix `A` with zero diagonal and, above the
//! diagonal, i.i.d. entries from one of three families:
//!
//! * `LevyPareto`: `xi / n^{1/alpha}` with `P(|xi| > t) = t^{-alpha}` for
//!   `t >= 1` and `P(xi > 0) = theta`,
//! * `ErdosRenyi`: `Bernoulli(lambda / n)`,
//! * `SparseGaussian`: `Bernoulli(lambda / n) * N(0, 1) / sqrt(lambda)`.
//!
//! The object of study is the centered Laplacian `L = A - D` with
//! `D_ii = sum_j A_ij`, whose diagonal cancels row sums exactly; the
//! independent-diagonal variant replaces `D` by the degree matrix of an
//! independent copy of `A`, which decouples the diagonal from the off-diagonal
//! row and changes the limiting spectral measure.
//!
//! All sampling is routed through one random stream per (matrix, row) pair, so
//! a draw depends only on the seed and its indices, never on thread schedule.

use crate::measure::LevyMeasure;
use crate::stream::{derive_stream_id, RandomStream, StreamKind};
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Parameters of one matrix ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    LevyPareto { alpha: f64, theta: f64 },
    ErdosRenyi { lambda: f64 },
    SparseGaussian { lambda: f64 },
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            EnsembleSpec::LevyPareto { alpha, theta } => {
                // alpha >= 1 makes the small entries of a Laplacian row
                // non-summable in the limit, so no spectral limit theory
                // applies; the ensemble refuses rather than extrapolate
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "levy_pareto needs alpha in (0, 1), got {alpha}"
                    )));
                }
                if !(0.0..=1.0).contains(&theta) {
                    return Err(Error::InvalidParameter(format!(
                        "levy_pareto needs theta in [0, 1], got {theta}"
                    )));
                }
            }
            EnsembleSpec::ErdosRenyi { lambda } | EnsembleSpec::SparseGaussian { lambda } => {
                if !(lambda.is_finite() && lambda > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "mean degree must be finite and positive, got {lambda}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The Levy measure governing the limiting spectral recursion: the weak
    /// limit of `n` times the law of one off-diagonal entry.
    pub fn limiting_measure(&self) -> Result<LevyMeasure> {
        self.validate()?;
        match *self {
            EnsembleSpec::LevyPareto { alpha, theta } => LevyMeasure::alpha_stable(alpha, theta),
            EnsembleSpec::ErdosRenyi { lambda } => LevyMeasure::point_mass(lambda),
            EnsembleSpec::SparseGaussian { lambda } => LevyMeasure::scaled_gaussian(lambda),
        }
    }
}

/// Symmetric matrix with zero diagonal, stored as the packed strict lower
/// triangle in row-major order: entry `(i, j)` with `i > j` lives at
/// `i (i - 1) / 2 + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    lower: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lower[i * (i - 1) / 2 + j],
            std::cmp::Ordering::Less => self.lower[j * (j - 1) / 2 + i],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    /// Row sums `sum_j A_ij`; these are the degrees the Laplacian subtracts.
    pub fn row_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        let mut idx = 0;
        for i in 1..self.n {
            for j in 0..i {
                let v = self.lower[idx];
                sums[i] += v;
                sums[j] += v;
                idx += 1;
            }
        }
        sums
    }

    /// Nonzero entries of the stored triangle as `(i, j, value)` with
    /// `i > j`, a debugging export.
    pub fn nonzero_triples(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        let mut idx = 0;
        for i in 1..self.n {
            for j in 0..i {
                if self.lower[idx] != 0.0 {
                    out.push((i, j, self.lower[idx]));
                }
                idx += 1;
            }
        }
        out
    }
}

/// Centered Laplacian `L = A - D`: off-diagonal entries of `A` plus an
/// explicit diagonal (shared structure for the exact and the
/// independent-diagonal variants).
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix {
    n: usize,
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl LaplacianMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.n && j < self.n);
        match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lower[i * (i - 1) / 2 + j],
            std::cmp::Ordering::Less => self.lower[j * (j - 1) / 2 + i],
            std::cmp::Ordering::Equal => self.diag[i],
        }
    }

    /// Dense row-major copy, the eigensolver's working format.
    pub fn to_full(&self) -> Vec<f64> {
        let n = self.n;
        let mut a = vec![0.0; n * n];
        for (i, &d) in self.diag.iter().enumerate() {
            a[i * n + i] = d;
        }
        let mut idx = 0;
        for i in 1..n {
            for j in 0..i {
                let v = self.lower[idx];
                a[i * n + j] = v;
                a[j * n + i] = v;
                idx += 1;
            }
        }
        a
    }
}

fn row_stream(seed: u64, matrix_index: u64, kind: StreamKind, row: usize) -> RandomStream {
    // two-level derivation: matrix id, then one stream per row
    let matrix_id = derive_stream_id(seed, kind, matrix_index);
    RandomStream::new(matrix_id, row as u64)
}

/// Draws matrix number `matrix_index` of the ensemble, using streams derived
/// from `(seed, matrix_index, row)` only.
pub fn sample_matrix(
    spec: &EnsembleSpec,
    n: usize,
    seed: u64,
    matrix_index: u64,
) -> Result<SymmetricMatrix> {
    sample_matrix_with_kind(spec, n, seed, matrix_index, StreamKind::Matrix)
}

fn sample_matrix_with_kind(
    spec: &EnsembleSpec,
    n: usize,
    seed: u64,
    matrix_index: u64,
    kind: StreamKind,
) -> Result<SymmetricMatrix> {
    spec.validate()?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "matrix dimension must be at least 2, got {n}"
        )));
    }
    if let EnsembleSpec::ErdosRenyi { lambda } | EnsembleSpec::SparseGaussian { lambda } = *spec {
        if lambda >= n as f64 {
            return Err(Error::InvalidParameter(format!(
                "sparse ensemble needs n > lambda, got n = {n}, lambda = {lambda}"
            )));
        }
    }

    let mut lower = vec![0.0; n * (n - 1) / 2];
    for i in 1..n {
        let mut rng = row_stream(seed, matrix_index, kind, i);
        let row = &mut lower[i * (i - 1) / 2..i * (i + 1) / 2];
        match *spec {
            EnsembleSpec::LevyPareto { alpha, theta } => {
                let scale = (n as f64).powf(-1.0 / alpha);
                for slot in row.iter_mut() {
                    // inverse transform: |xi| = U^{-1/alpha} has the Pareto
                    // tail t^{-alpha} on t >= 1
                    let u: f64 = rng.gen();
                    let magnitude = u.powf(-1.0 / alpha);
                    let sign = if rng.gen::<f64>() < theta { 1.0 } else { -1.0 };
                    *slot = sign * magnitude * scale;
                }
            }
            EnsembleSpec::ErdosRenyi { lambda } => {
                let p = lambda / n as f64;
                for slot in row.iter_mut() {
                    *slot = if rng.gen::<f64>() < p { 1.0 } else { 0.0 };
                }
            }
            EnsembleSpec::SparseGaussian { lambda } => {
                let p = lambda / n as f64;
                let scale = lambda.sqrt().recip();
                for slot in row.iter_mut() {
                    if rng.gen::<f64>() < p {
                        let g: f64 = StandardNormal.sample(&mut rng);
                        *slot = g * scale;
                    }
                }
            }
        }
    }
    Ok(SymmetricMatrix { n, lower })
}

/// `L = A - D` with the diagonal taken from `A`'s own row sums.
pub fn laplacian(a: &SymmetricMatrix) -> LaplacianMatrix {
    let diag = a.row_sums().iter().map(|s| -s).collect();
    LaplacianMatrix {
        n: a.n,
        lower: a.lower.clone(),
        diag,
    }
}

/// Independent-diagonal variant: off-diagonal entries of matrix
/// `matrix_index`, diagonal from the row sums of an independent draw on a
/// disjoint stream family.
pub fn independent_diagonal_laplacian(
    spec: &EnsembleSpec,
    n: usize,
    seed: u64,
    matrix_index: u64,
) -> Result<LaplacianMatrix> {
    let a = sample_matrix(spec, n, seed, matrix_index)?;
    let ghost = sample_matrix_with_kind(spec, n, seed, matrix_index, StreamKind::Diagonal)?;
    let diag = ghost.row_sums().iter().map(|s| -s).collect();
    Ok(LaplacianMatrix {
        n: a.n,
        lower: a.lower,
        diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let spec = EnsembleSpec::ErdosRenyi { lambda: 3.0 };
        let a = sample_matrix(&spec, 40, 7, 0).unwrap();
        let lap = laplacian(&a);
        for i in 0..40 {
            let row: f64 = (0..40).map(|j| lap.entry(i, j)).sum();
            assert!(row.abs() < 1e-12, "row {i} sums to {row}");
        }
        // packed and dense layouts agree
        let full = lap.to_full();
        for i in 0..40 {
            for j in 0..40 {
                assert_eq!(full[i * 40 + j], lap.entry(i, j));
                assert_eq!(full[i * 40 + j], full[j * 40 + i]);
            }
        }
    }

    #[test]
    fn erdos_renyi_entries_and_density() {
        let (n, lambda) = (400, 2.0);
        let spec = EnsembleSpec::ErdosRenyi { lambda };
        let a = sample_matrix(&spec, n, 11, 0).unwrap();
        let mut edges = 0usize;
        for i in 1..n {
            for j in 0..i {
                let v = a.entry(i, j);
                assert!(v == 0.0 || v == 1.0);
                edges += v as usize;
            }
        }
        // n(n-1)/2 Bernoulli(lambda/n) trials
        let trials = (n * (n - 1) / 2) as f64;
        let p = lambda / n as f64;
        let sd = (trials * p * (1.0 - p)).sqrt();
        let diff = edges as f64 - trials * p;
        assert!(diff.abs() < 4.0 * sd, "edge count off by {diff} ({sd} sd)");
    }

    #[test]
    fn pareto_tail_of_scaled_entries() {
        // |A_ij| n^{1/alpha} is Pareto(alpha) on [1, inf); KS over the
        // n(n-1)/2 = 19900 entries of one draw, 1% critical value
        // 1.6276/sqrt(19900).
        let (n, alpha, theta) = (200usize, 0.5, 0.7);
        let spec = EnsembleSpec::LevyPareto { alpha, theta };
        let a = sample_matrix(&spec, n, 13, 0).unwrap();
        let scale = (n as f64).powf(1.0 / alpha);
        let mut mags: Vec<f64> = Vec::new();
        let mut pos = 0usize;
        for i in 1..n {
            for j in 0..i {
                let v = a.entry(i, j);
                mags.push(v.abs() * scale);
                pos += (v > 0.0) as usize;
            }
        }
        mags.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!(mags[0] >= 1.0, "Pareto magnitudes start at 1");
        let m = mags.len() as f64;
        let mut ks = 0.0_f64;
        for (k, &x) in mags.iter().enumerate() {
            let cdf = 1.0 - x.powf(-alpha);
            ks = ks
                .max((cdf - k as f64 / m).abs())
                .max((cdf - (k + 1) as f64 / m).abs());
        }
        assert!(ks < 1.6276 / m.sqrt(), "KS statistic {ks}");
        let frac = pos as f64 / m;
        let sd = (theta * (1.0 - theta) / m).sqrt();
        assert!((frac - theta).abs() < 4.0 * sd, "sign frequency {frac}");
    }

    #[test]
    fn sparse_gaussian_moments() {
        let (n, lambda) = (400usize, 4.0);
        let spec = EnsembleSpec::SparseGaussian { lambda };
        let a = sample_matrix(&spec, n, 17, 0).unwrap();
        let mut nonzero = 0usize;
        let mut second = 0.0;
        for i in 1..n {
            for j in 0..i {
                let v = a.entry(i, j);
                if v != 0.0 {
                    nonzero += 1;
                    second += v * v * lambda;
                }
            }
        }
        let trials = (n * (n - 1) / 2) as f64;
        let p = lambda / n as f64;
        let sd = (trials * p * (1.0 - p)).sqrt();
        assert!((nonzero as f64 - trials * p).abs() < 4.0 * sd);
        // conditional on being present, entries are N(0, 1/lambda)
        let mean_sq = second / nonzero as f64;
        let sd = (2.0 / nonzero as f64).sqrt();
        assert!((mean_sq - 1.0).abs() < 4.0 * sd, "rescaled second moment {mean_sq}");
    }

    #[test]
    fn independent_diagonal_keeps_offdiagonal() {
        let spec = EnsembleSpec::ErdosRenyi { lambda: 2.0 };
        let n = 60;
        let a = sample_matrix(&spec, n, 23, 5).unwrap();
        let exact = laplacian(&a);
        let decoupled = independent_diagonal_laplacian(&spec, n, 23, 5).unwrap();
        for i in 1..n {
            for j in 0..i {
                assert_eq!(exact.entry(i, j), decoupled.entry(i, j));
            }
        }
        assert_ne!(exact.diag(), decoupled.diag());
        // the ghost degrees still have the right scale: mean lambda
        let mean: f64 = decoupled.diag().iter().sum::<f64>() / n as f64;
        assert!((mean + 2.0).abs() < 1.0, "mean ghost degree {mean}");
    }

    #[test]
    fn draws_are_seed_and_index_determined() {
        let spec = EnsembleSpec::SparseGaussian { lambda: 2.0 };
        let a = sample_matrix(&spec, 50, 99, 3).unwrap();
        let b = sample_matrix(&spec, 50, 99, 3).unwrap();
        assert_eq!(a, b);
        let c = sample_matrix(&spec, 50, 99, 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn parameter_validation() {
        assert!(EnsembleSpec::LevyPareto { alpha: 2.0, theta: 0.5 }
            .validate()
            .is_err());
        // the Laplacian limit needs summable small weights: alpha < 1 only
        assert!(EnsembleSpec::LevyPareto { alpha: 1.2, theta: 0.5 }
            .validate()
            .is_err());
        assert!(EnsembleSpec::LevyPareto { alpha: 1.0, theta: 0.5 }
            .validate()
            .is_err());
        assert!(EnsembleSpec::ErdosRenyi { lambda: 0.0 }.validate().is_err());
        assert!(sample_matrix(&EnsembleSpec::ErdosRenyi { lambda: 8.0 }, 6, 0, 0).is_err());
        assert!(sample_matrix(&EnsembleSpec::ErdosRenyi { lambda: 6.0 }, 6, 0, 0).is_err());
        let m = EnsembleSpec::ErdosRenyi { lambda: 2.5 }
            .limiting_measure()
            .unwrap();
        assert_eq!(m, LevyMeasure::point_mass(2.5).unwrap());
    }
}
