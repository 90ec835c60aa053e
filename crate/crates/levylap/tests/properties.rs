//! Property tests for the estimator layer: every law here is a structural
//! invariant that must hold for arbitrary inputs, not a statistical claim
//! about a particular calibrated run. Randomized cases are generated by
//! proptest; the deterministic spot checks at the end pin closed-form or
//! independently derived values.

use levylap::eigen::{empirical_stieltjes, esm, spectrum};
use levylap::ensemble::{laplacian, sample_matrix, EnsembleSpec};
use levylap::estimate::{
    density_row, kolmogorov_distance, row_sum_cf_distance, sup_grid_distance, trapezoid_moment,
    MeasureEstimate, StieltjesEstimate, ZGrid,
};
use levylap::measure::LevyMeasure;
use levylap::rde::solve_free_convolution;
use num_complex::Complex64;
use proptest::prelude::*;

fn small_grid() -> ZGrid {
    ZGrid::new(-2.0, 2.0, 1.0, vec![0.7, 1.3]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The pooled-atom route `z -> integral of 1/(x - z)` and the direct
    /// eigenvalue-sum route are two implementations of the same transform
    /// and must agree to near machine precision on every matrix.
    #[test]
    fn transform_routes_agree_on_sampled_matrices(
        seed in 0u64..1u64 << 48,
        n in 8usize..=32,
        lambda in 0.5f64..4.0,
    ) {
        let spec = EnsembleSpec::ErdosRenyi { lambda };
        let lap = laplacian(&sample_matrix(&spec, n, seed, 0).unwrap());
        let sp = spectrum(&lap).unwrap();
        let grid = small_grid();
        let direct = empirical_stieltjes(&sp, &grid);
        let measure = esm(&sp);
        for (c, z) in grid.points().iter().enumerate() {
            let via_atoms = levylap::estimate::stieltjes_of_measure(&measure, *z).unwrap();
            let gap = (via_atoms - direct.values()[c]).norm();
            prop_assert!(gap <= 1e-12, "gap {gap:.3e} at z = {z}");
        }
    }

    /// Laplacian spectra: sorted non-increasing, trace-consistent, one
    /// eigenvalue pinned at zero by the all-ones row sums, and for a graph
    /// (nonnegative-weight) ensemble the whole spectrum is nonpositive.
    #[test]
    fn graph_laplacian_spectra_are_nonpositive_with_a_kernel(
        seed in 0u64..1u64 << 48,
        n in 8usize..=32,
        lambda in 0.5f64..4.0,
    ) {
        let spec = EnsembleSpec::ErdosRenyi { lambda };
        let lap = laplacian(&sample_matrix(&spec, n, seed, 0).unwrap());
        let sp = spectrum(&lap).unwrap();
        let vals = sp.values();
        prop_assert_eq!(vals.len(), n);
        for w in vals.windows(2) {
            prop_assert!(w[0] >= w[1], "values must be sorted non-increasing");
        }
        let trace_gap = (vals.iter().sum::<f64>()
            - lap.diag().iter().sum::<f64>()).abs();
        let scale = 1.0 + lap.diag().iter().map(|d| d.abs()).sum::<f64>();
        prop_assert!(trace_gap <= 1e-10 * scale, "trace gap {trace_gap:.3e}");
        // Rows of A - D sum to zero, so the all-ones vector is in the kernel.
        let nearest = vals.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        prop_assert!(nearest <= 1e-8 * scale, "kernel eigenvalue off by {nearest:.3e}");
        prop_assert!(vals[0] <= 1e-9 * scale, "graph Laplacians are nonpositive");
    }

    /// Distribution estimates from arbitrary finite samples: unit mass,
    /// strictly increasing atom support, a monotone CDF bounded by the mass.
    #[test]
    fn sample_estimates_are_probability_measures(
        samples in proptest::collection::vec(-50.0f64..50.0, 1..200),
    ) {
        let est = MeasureEstimate::from_samples(&samples).unwrap();
        prop_assert!((est.total_mass() - 1.0).abs() <= 1e-12);
        for w in est.atoms().windows(2) {
            prop_assert!(w[0].0 < w[1].0, "atom support must be strictly sorted");
        }
        prop_assert!(est.atoms().iter().all(|a| a.1 > 0.0));
        let mut probes: Vec<f64> = samples.clone();
        probes.extend_from_slice(&[-100.0, 0.0, 100.0]);
        probes.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for &x in &probes {
            let c = est.cdf(x);
            prop_assert!(c >= prev - 1e-15, "CDF must be monotone");
            prop_assert!(c <= est.total_mass() + 1e-15);
            prev = c;
        }
        prop_assert!((est.cdf(1e6) - 1.0).abs() <= 1e-12, "full mass below any huge cut");
    }

    /// On a shared atomic support the uniform CDF distance is at most the
    /// total variation distance, which is half the l1 gap of the weights.
    #[test]
    fn kolmogorov_is_dominated_by_total_variation(
        support_step in 0.25f64..2.0,
        pa in proptest::collection::vec(0.01f64..1.0, 6),
        pb in proptest::collection::vec(0.01f64..1.0, 6),
    ) {
        let norm = |p: &[f64]| -> Vec<f64> {
            let s: f64 = p.iter().sum();
            p.iter().map(|v| v / s).collect()
        };
        let (pa, pb) = (norm(&pa), norm(&pb));
        let atoms = |p: &[f64]| -> MeasureEstimate {
            MeasureEstimate::from_atoms(
                p.iter().enumerate().map(|(k, &m)| (support_step * k as f64, m)).collect(),
            ).unwrap()
        };
        let (a, b) = (atoms(&pa), atoms(&pb));
        let tv = 0.5 * pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).sum::<f64>();
        let ks = kolmogorov_distance(&a, &b);
        prop_assert!(ks <= tv + 1e-12, "KS {ks:.6} vs TV {tv:.6}");
    }
}

#[test]
fn semicircle_density_row_integrates_to_unit_mass() {
    // Density read off the transform at height 0.5 on [-6, 6]: the smoothing
    // spreads a little mass outside the window, so the trapezoid integral
    // sits just below 1 (0.944 measured, stable across grid refinements).
    let grid = ZGrid::new(-6.0, 6.0, 0.05, vec![0.5]).unwrap();
    let est = solve_free_convolution(&grid, 1e-12).unwrap();
    let row = density_row(&est, 0.5).unwrap();
    assert!(row.iter().all(|&(_, d)| d >= 0.0), "densities are nonnegative");
    let mass = trapezoid_moment(&row, 0);
    assert!((0.9..=1.02).contains(&mass), "mass {mass}");
}

#[test]
fn sup_distance_of_two_reciprocals_peaks_between_their_poles() {
    // s1 = -1/z and s2 = -1/(z + 1) in closed form: the gap is
    // 1 / (|z| |z + 1|), maximized on each row where the product of the
    // distances to the poles 0 and -1 is smallest.
    let grid = ZGrid::new(-4.0, 4.0, 0.25, vec![0.5, 1.0]).unwrap();
    let vals = |shift: f64| -> Vec<Complex64> {
        grid.points().iter().map(|z| -((z + shift).inv())).collect()
    };
    let a = StieltjesEstimate::exact(grid.clone(), vals(0.0)).unwrap();
    let b = StieltjesEstimate::exact(grid.clone(), vals(1.0)).unwrap();
    let sup = sup_grid_distance(&a, &b).unwrap();
    let (mut direct, mut argmax) = (0.0f64, Complex64::default());
    for z in grid.points() {
        let gap = 1.0 / (z.norm() * (z + 1.0).norm());
        if gap > direct {
            (direct, argmax) = (gap, *z);
        }
    }
    assert!((sup - direct).abs() <= 1e-14, "sup {sup} vs direct {direct}");
    assert!(
        (-1.5..=0.5).contains(&argmax.re) && argmax.im == 0.5,
        "worst point {argmax} should sit between the poles on the lowest row"
    );
}

#[test]
fn independent_large_spectra_are_uniformly_close() {
    // Two independent mean-degree-2 draws at n = 2000: their empirical
    // spectral measures estimate the same limit, so the uniform CDF distance
    // is small; 0.05 gives a comfortable margin over the observed ~0.01.
    let spec = EnsembleSpec::ErdosRenyi { lambda: 2.0 };
    let a = esm(&spectrum(&laplacian(&sample_matrix(&spec, 2000, 501, 0).unwrap())).unwrap());
    let b = esm(&spectrum(&laplacian(&sample_matrix(&spec, 2000, 502, 0).unwrap())).unwrap());
    let ks = kolmogorov_distance(&a, &b);
    assert!(ks <= 0.05, "KS distance {ks}");
}

#[test]
fn hand_measure_moments_and_degenerate_fits() {
    // First absolute moment of mass 1/2 at 0 and 1/2 at -2 is exactly 1.
    let est = MeasureEstimate::from_atoms(vec![(0.0, 0.5), (-2.0, 0.5)]).unwrap();
    assert_eq!(est.abs_moment(1.0), 1.0);

    // All-zero row sums against the zero-intensity limit: both characteristic
    // functions are identically 1, so the fit distance vanishes.
    let zeros = MeasureEstimate::from_samples(&vec![0.0; 64]).unwrap();
    let m = LevyMeasure::PointMass { lambda: 0.0 };
    let t: Vec<f64> = levylap::estimate::cf_grid(8.0, 33);
    let dev = row_sum_cf_distance(&zeros, &m, &t).unwrap();
    assert!(dev <= 1e-15, "degenerate fit distance {dev}");
}
