//! Dense symmetric eigensolver built from first principles.
//!
//! Two classical stages, eigenvalues only, no external linear algebra:
//!
//! 1. **Householder reduction** of a full symmetric matrix to tridiagonal
//!    form. Each reflector annihilates one row/column pair; the reduction is
//!    an exact similarity up to roundoff, so trace and Frobenius norm are
//!    conserved.
//! 2. **Implicit-shift QL iteration** on the tridiagonal form with the
//!    Wilkinson shift. An off-diagonal entry `e[i]` is treated as deflated
//!    when `|e[i]| <= eps * (|d[i]| + |d[i+1]|)`; each eigenvalue is allowed
//!    at most [`MAX_QL_SWEEPS`] sweeps before the solver reports failure.
//!
//! The slow but transparent [`reference`] solver (determinant bisection on
//! Gershgorin brackets) provides an independent check used by the test suite.
//!
//! Storage is dense and targets matrices up to `n = 4096`; beyond that the
//! O(n^2) full buffer and O(n^3) reduction dominate and a sparse or banded
//! approach would be the right tool instead.

use crate::ensemble::LaplacianMatrix;
use crate::estimate::{MeasureEstimate, StieltjesEstimate, ZGrid};
use crate::{Error, Result};
use num_complex::Complex64;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_SWEEPS: usize = 50;

/// Symmetric tridiagonal form produced by Householder reduction.
#[derive(Debug, Clone)]
pub struct TridiagonalForm {
    /// Diagonal entries, length `n`.
    pub diag: Vec<f64>,
    /// Sub-diagonal entries, length `n - 1`.
    pub offdiag: Vec<f64>,
}

/// All eigenvalues of one symmetric matrix, sorted non-increasing.
#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Eigenvalues in non-increasing order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Matrix dimension.
    pub fn n(&self) -> usize {
        self.values.len()
    }
}

#[inline]
fn sign_like(magnitude: f64, sign_of: f64) -> f64 {
    if sign_of >= 0.0 {
        magnitude.abs()
    } else {
        -magnitude.abs()
    }
}

/// Householder reduction of a full symmetric matrix to tridiagonal form.
///
/// `a` is row-major `n * n` and is consumed as workspace. Only the lower
/// triangle is read.
pub fn tridiagonalize(n: usize, a: &mut [f64]) -> TridiagonalForm {
    assert_eq!(a.len(), n * n);
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[i * n + k].abs()).sum();
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let f = a[i * n + l];
                let g = -sign_like(h.sqrt(), f);
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                let mut f_acc = 0.0;
                for j in 0..=l {
                    // g = (A u)_j over the leading (l+1) block
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f_acc += e[j] * a[i * n + j];
                }
                let hh = f_acc / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }

    for i in 0..n {
        d[i] = a[i * n + i];
    }
    let offdiag = e[1..].to_vec();
    TridiagonalForm { diag: d, offdiag }
}

/// Implicit-shift QL iteration; returns the eigenvalues of the tridiagonal
/// form, unsorted. Fails with [`Error::SweepLimit`] if any eigenvalue needs
/// more than [`MAX_QL_SWEEPS`] sweeps.
pub fn ql_eigenvalues(t: &TridiagonalForm) -> Result<Vec<f64>> {
    let n = t.diag.len();
    let mut d = t.diag.clone();
    if n == 1 {
        return Ok(d);
    }
    assert_eq!(t.offdiag.len(), n - 1);
    // e is padded so e[m] with m = n-1 is a valid (always deflated) slot.
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&t.offdiag);

    let eps = f64::EPSILON;
    // Absolute deflation floor at the backward-error scale eps * ||T||:
    // sparse matrices put clusters of near-zero diagonal entries inside a
    // large-norm matrix, and there a purely neighbor-relative test leaves
    // off-diagonals of size ~eps * ||T|| undeflatable forever.
    let anorm = (0..n)
        .map(|i| {
            d[i].abs()
                + if i > 0 { e[i - 1].abs() } else { 0.0 }
                + if i < n - 1 { e[i].abs() } else { 0.0 }
        })
        .fold(0.0f64, f64::max);
    let floor = eps * anorm;
    for l in 0..n {
        let mut sweeps = 0usize;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::SweepLimit { index: l });
            }
            // Wilkinson shift from the leading 2x2.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            let mut underflowed = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Off-diagonal underflow mid-sweep: deflate and retry.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflowed = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflowed {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Eigenvalues of a full symmetric matrix (row-major `n * n`, consumed),
/// sorted non-increasing.
///
/// Rejects non-finite input. In test builds the result is checked against the
/// two similarity invariants: the eigenvalue sum must match the trace and the
/// eigenvalue square sum must match the squared Frobenius norm, both to
/// `1e-10` relative accuracy.
pub fn spectrum_full(n: usize, mut a: Vec<f64>) -> Result<Spectrum> {
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if a.len() != n * n {
        return Err(Error::InvalidParameter(format!(
            "matrix buffer holds {} entries, expected {}",
            a.len(),
            n * n
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
    let frob2: f64 = {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += a[i * n + j] * a[i * n + j];
            }
        }
        s
    };

    let tri = tridiagonalize(n, &mut a);
    let mut values = ql_eigenvalues(&tri)?;
    values.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));

    if cfg!(debug_assertions) {
        let sum: f64 = values.iter().sum();
        let sum2: f64 = values.iter().map(|v| v * v).sum();
        let scale1 = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
        let scale2 = frob2.max(1.0);
        debug_assert!(
            (sum - trace).abs() <= 1e-10 * scale1,
            "trace drift: {} vs {}",
            sum,
            trace
        );
        debug_assert!(
            (sum2 - frob2).abs() <= 1e-10 * scale2,
            "frobenius drift: {} vs {}",
            sum2,
            frob2
        );
    }

    Ok(Spectrum { values })
}

/// All eigenvalues of a Laplacian, sorted non-increasing.
pub fn spectrum(lap: &LaplacianMatrix) -> Result<Spectrum> {
    let n = lap.n();
    spectrum_full(n, lap.to_full())
}

/// Empirical spectral measure: one atom of mass `1/n` per eigenvalue, exact
/// duplicates merged.
pub fn esm(spectrum: &Spectrum) -> MeasureEstimate {
    let n = spectrum.n();
    let w = 1.0 / n as f64;
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    // values are sorted, so duplicates are adjacent
    for &v in spectrum.values() {
        match atoms.last_mut() {
            Some((loc, mass)) if *loc == v => *mass += w,
            _ => atoms.push((v, w)),
        }
    }
    atoms.reverse(); // ascending location order
    MeasureEstimate::from_atoms(atoms).expect("eigenvalue atoms form a probability measure")
}

/// Stieltjes transform of the empirical spectral measure on a grid:
/// `s(z) = (1/n) sum_i 1/(lambda_i - z)`.
pub fn empirical_stieltjes(spectrum: &Spectrum, grid: &ZGrid) -> StieltjesEstimate {
    let n = spectrum.n() as f64;
    let values: Vec<Complex64> = grid
        .points()
        .iter()
        .map(|&z| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &lambda in spectrum.values() {
                acc += (Complex64::new(lambda, 0.0) - z).inv();
            }
            acc / n
        })
        .collect();
    StieltjesEstimate::exact(grid.clone(), values)
        .expect("finite eigenvalues give a finite transform")
}

/// Slow, transparent reference solver used to validate the QL path.
pub mod reference {
    /// `det(a - x I)` by LU factorization with partial pivoting.
    fn shifted_det(n: usize, a: &[f64], x: f64) -> f64 {
        let mut m: Vec<f64> = a.to_vec();
        for i in 0..n {
            m[i * n + i] -= x;
        }
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in (col + 1)..n {
                if m[r * n + col].abs() > m[piv * n + col].abs() {
                    piv = r;
                }
            }
            if m[piv * n + col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for k in 0..n {
                    m.swap(col * n + k, piv * n + k);
                }
                det = -det;
            }
            det *= m[col * n + col];
            for r in (col + 1)..n {
                let f = m[r * n + col] / m[col * n + col];
                for k in col..n {
                    m[r * n + k] -= f * m[col * n + k];
                }
            }
        }
        det
    }

    /// All eigenvalues by sign-change bisection of `det(a - x I)` over the
    /// Gershgorin interval, sorted non-increasing.
    ///
    /// O(n^3) per determinant and a dense scan over the bracket grid: meant
    /// for small `n` in tests only. Panics if the scan cannot separate `n`
    /// simple roots, which for the random matrices it is used on indicates a
    /// genuine solver bug rather than a degenerate spectrum.
    pub fn eigenvalues_by_bisection(n: usize, a: &[f64]) -> Vec<f64> {
        assert_eq!(a.len(), n * n);
        // Gershgorin bounds
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let center = a[i * n + i];
            let radius: f64 = (0..n).filter(|&j| j != i).map(|j| a[i * n + j].abs()).sum();
            lo = lo.min(center - radius);
            hi = hi.max(center + radius);
        }
        let pad = 1e-8 * (hi - lo).max(1.0);
        lo -= pad;
        hi += pad;

        let mut grid_size = 64 * n.max(1);
        loop {
            let step = (hi - lo) / grid_size as f64;
            let xs: Vec<f64> = (0..=grid_size).map(|k| lo + step * k as f64).collect();
            let signs: Vec<f64> = xs.iter().map(|&x| shifted_det(n, a, x)).collect();
            let mut roots = Vec::new();
            for k in 0..grid_size {
                let (fa, fb) = (signs[k], signs[k + 1]);
                if fa == 0.0 {
                    roots.push(xs[k]);
                    continue;
                }
                if fa * fb < 0.0 {
                    let (mut x0, mut x1) = (xs[k], xs[k + 1]);
                    let mut f0 = fa;
                    for _ in 0..200 {
                        let xm = 0.5 * (x0 + x1);
                        let fm = shifted_det(n, a, xm);
                        if fm == 0.0 {
                            x0 = xm;
                            x1 = xm;
                            break;
                        }
                        if f0 * fm < 0.0 {
                            x1 = xm;
                        } else {
                            x0 = xm;
                            f0 = fm;
                        }
                        if (x1 - x0).abs() < 1e-14 * (1.0 + xm.abs()) {
                            break;
                        }
                    }
                    roots.push(0.5 * (x0 + x1));
                }
            }
            if signs.last().copied() == Some(0.0) {
                roots.push(*xs.last().unwrap());
            }
            if roots.len() >= n {
                roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
                roots.truncate(n);
                return roots;
            }
            grid_size *= 4;
            assert!(
                grid_size <= (1 << 22),
                "bisection reference failed to separate {} roots",
                n
            );
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_exact() {
        // [[2,1],[1,2]] has eigenvalues 3 and 1
        let s = spectrum_full(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!((s.values()[0] - 3.0).abs() < 1e-14);
        assert!((s.values()[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_matrix_is_fixed() {
        let s = spectrum_full(3, vec![5.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 2.0]).unwrap();
        assert_eq!(s.values(), &[5.0, 2.0, -1.0]);
    }

    #[test]
    fn single_edge_laplacian_kernel() {
        // [[-1,1],[1,-1]]: eigenvalues 0 and -2
        let s = spectrum_full(2, vec![-1.0, 1.0, 1.0, -1.0]).unwrap();
        assert!(s.values()[0].abs() < 1e-14);
        assert!((s.values()[1] + 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_finite() {
        let r = spectrum_full(2, vec![f64::NAN, 0.0, 0.0, 1.0]);
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn esm_merges_duplicates() {
        let s = spectrum_full(2, vec![-1.0, 1.0, 1.0, -1.0]).unwrap();
        let m = esm(&s);
        let atoms = m.atoms();
        assert_eq!(atoms.len(), 2);
        assert!((atoms[0].0 + 2.0).abs() < 1e-14 && (atoms[0].1 - 0.5).abs() < 1e-15);
        assert!(atoms[1].0.abs() < 1e-14 && (atoms[1].1 - 0.5).abs() < 1e-15);

        let c = spectrum_full(2, vec![4.0, 0.0, 0.0, 4.0]).unwrap();
        let m = esm(&c);
        let atoms = m.atoms();
        assert_eq!(atoms.len(), 1);
        assert_eq!(atoms[0], (4.0, 1.0));
    }
}
