//! Quadrature utilities: Gauss-Hermite rules and adaptive Simpson.
//!
//! The Gauss-Hermite rule is generated from first principles by the
//! Golub-Welsch connection: nodes are the eigenvalues of the symmetric
//! tridiagonal Jacobi matrix of the Hermite recurrence (computed with the
//! crate's own QL solver), and weights are Christoffel numbers
//! `w_i = 1 / sum_{k<n} p_k(x_i)^2` evaluated through the orthonormal
//! three-term recurrence. Weight function convention: `integral f(x) e^{-x^2} dx
//! approx sum_i w_i f(x_i)`.

use crate::eigen::{ql_eigenvalues, TridiagonalForm};
use crate::{Error, Result};

/// One Gauss-Hermite rule: `nodes[i]` with positive `weights[i]`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds the `n`-point rule.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let diag = vec![0.0; n];
        let offdiag: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        let tri = TridiagonalForm { diag, offdiag };
        let mut nodes = ql_eigenvalues(&tri).expect("Jacobi matrix QL cannot stall");
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());

        let weights = nodes
            .iter()
            .map(|&x| {
                // orthonormal Hermite values p_0..p_{n-1} at x
                let mut norm2 = 0.0;
                let p0 = std::f64::consts::PI.powf(-0.25);
                let mut prev = 0.0;
                let mut cur = p0;
                norm2 += cur * cur;
                for k in 1..n {
                    let beta_k = (k as f64 / 2.0).sqrt();
                    let beta_km1 = ((k as f64 - 1.0) / 2.0).sqrt();
                    let next = (x * cur - beta_km1 * prev) / beta_k;
                    prev = cur;
                    cur = next;
                    norm2 += cur * cur;
                }
                1.0 / norm2
            })
            .collect();
        GaussHermite { nodes, weights }
    }

    /// `E[f(X)]` for `X ~ N(0, 1)` via the substitution `x = sqrt(2) u`.
    pub fn standard_normal_mean(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(std::f64::consts::SQRT_2 * u))
            .sum::<f64>()
            * inv_sqrt_pi
    }
}

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// Subdivides until the local Richardson estimate meets the tolerance;
/// reports [`Error::NonConvergence`] with the worst residual if the depth cap
/// is reached anywhere.
pub fn adaptive_simpson(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: usize = 48;
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut impl FnMut(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
        worst: &mut f64,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH {
                *worst = worst.max(delta.abs() / 15.0);
            }
            return left + right + delta / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1, worst)
            + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1, worst)
    }

    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter("simpson: non-finite interval".into()));
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(fa, fm, fb, b - a);
    let mut worst = 0.0;
    let value = recurse(f, a, b, fa, fm, fb, whole, tol, 0, &mut worst);
    if worst > tol.max(f64::EPSILON) {
        return Err(Error::NonConvergence {
            context: "adaptive simpson".into(),
            residual: worst,
        });
    }
    if !value.is_finite() {
        return Err(Error::NonFinite("adaptive simpson".into()));
    }
    Ok(value)
}
