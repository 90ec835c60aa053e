//! Poisson point processes attached to a Levy measure.
//!
//! A sample holds the points of a Poisson process with intensity `m`
//! restricted to `{|x| >= delta}`, sorted by decreasing modulus. These are
//! the child edge weights of the limiting random tree and the summands of
//! the row-sum limit law: for finite-mass measures the process is a
//! Poisson-distributed number of i.i.d. atoms, for the stable family it is
//! the classical arrival-time representation `y_k = sign_k Gamma_k^{-1/alpha}`
//! with `Gamma_k` a unit-rate Poisson arrival sequence, stopped at the cutoff.
//!
//! Campbell's formula `E[sum_k u(y_k)] = integral_{|x|>=delta} u dm` is the
//! bridge between samples and the measure; the tests use it as the law-level
//! oracle for every family.

use crate::measure::LevyMeasure;
use crate::stream::RandomStream;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};

/// One draw of the truncated Poisson point process.
#[derive(Debug, Clone)]
pub struct PointProcessSample {
    weights: Vec<f64>,
    delta: f64,
    max_points: usize,
    hit_cap: bool,
    discarded_first_moment: f64,
}

impl PointProcessSample {
    /// Points sorted by decreasing `|x|`; ties broken by sign (positive
    /// first), then draw order.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Modulus cutoff the sample was truncated at.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Hard cap on the number of retained points this sample was drawn with.
    pub fn max_points(&self) -> usize {
        self.max_points
    }

    /// Whether the hard point cap truncated the sample beyond the cutoff.
    pub fn hit_cap(&self) -> bool {
        self.hit_cap
    }

    /// Exact mean of the total modulus discarded by the cutoff,
    /// `integral_{|x| < delta} |x| dm`; infinite when the cutoff discards a
    /// non-summable cloud (stable family with `alpha >= 1`).
    pub fn discarded_first_moment(&self) -> f64 {
        self.discarded_first_moment
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Campbell functional `sum_k u(y_k)` of a sample; `u` should vanish at zero
/// so the value is truncation-stable as the cutoff shrinks.
pub fn sum_weights(sample: &PointProcessSample, u: impl Fn(f64) -> f64) -> f64 {
    sample.weights.iter().map(|&y| u(y)).sum()
}

fn sort_by_modulus(weights: &mut [f64]) {
    // stable sort keeps draw order on full ties
    weights.sort_by(|a, b| {
        b.abs()
            .partial_cmp(&a.abs())
            .expect("finite weights")
            .then(b.partial_cmp(a).expect("finite weights"))
    });
}

fn poisson_count(mass: f64, rng: &mut RandomStream) -> usize {
    if mass <= 0.0 {
        return 0;
    }
    let draw: f64 = Poisson::new(mass).expect("validated mass").sample(rng);
    draw as usize
}

/// Samples the Poisson point process of `m` restricted to `{|x| >= delta}`,
/// keeping at most `max_points` points of largest modulus.
///
/// `delta` must be positive for `AlphaStable` (the untruncated process has
/// infinitely many points near zero); finite-mass measures accept
/// `delta = 0`.
pub fn sample_point_process(
    m: &LevyMeasure,
    delta: f64,
    max_points: usize,
    rng: &mut RandomStream,
) -> Result<PointProcessSample> {
    m.validate()?;
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "point process cutoff must be finite and >= 0, got {delta}"
        )));
    }
    if max_points == 0 {
        return Err(Error::InvalidParameter(
            "max_points must be at least 1".into(),
        ));
    }

    let mut hit_cap = false;
    let mut weights: Vec<f64> = match m {
        LevyMeasure::PointMass { lambda } => {
            let n = poisson_count(*lambda, rng);
            if delta <= 1.0 {
                vec![1.0; n]
            } else {
                Vec::new()
            }
        }
        LevyMeasure::ScaledGaussian { lambda } => {
            let n = poisson_count(*lambda, rng);
            let sigma = lambda.sqrt().recip();
            (0..n)
                .map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
                .filter(|y| y.abs() >= delta)
                .collect()
        }
        LevyMeasure::FiniteDiscrete { atoms } => {
            let mass: f64 = atoms.iter().map(|a| a.1).sum();
            let n = poisson_count(mass, rng);
            let mut out = Vec::with_capacity(n);
            for _ in 0..n {
                let mut u = rng.gen::<f64>() * mass;
                let mut chosen = atoms[atoms.len() - 1].0;
                for &(x, w) in atoms {
                    if u < w {
                        chosen = x;
                        break;
                    }
                    u -= w;
                }
                if chosen.abs() >= delta {
                    out.push(chosen);
                }
            }
            out
        }
        LevyMeasure::AlphaStable { alpha, theta } => {
            if delta <= 0.0 {
                return Err(Error::InvalidParameter(
                    "alpha_stable point process needs delta > 0: \
                     points accumulate at zero"
                        .into(),
                ));
            }
            // Points |y_k| = Gamma_k^{-1/alpha} decrease in k, so stopping at
            // Gamma_k > delta^{-alpha} keeps exactly the points above the
            // cutoff, already sorted by modulus.
            let horizon = delta.powf(-*alpha);
            let mut out = Vec::new();
            let mut gamma = 0.0_f64;
            loop {
                gamma += <Exp1 as Distribution<f64>>::sample(&Exp1, rng);
                if gamma > horizon {
                    break;
                }
                let magnitude = gamma.powf(-1.0 / alpha);
                let sign = if rng.gen::<f64>() < *theta { 1.0 } else { -1.0 };
                out.push(sign * magnitude);
                if out.len() == max_points {
                    hit_cap = true;
                    break;
                }
            }
            out
        }
    };

    match m {
        // stable samples come out sorted by modulus; enforce the tie rule only
        LevyMeasure::AlphaStable { .. } => {}
        _ => sort_by_modulus(&mut weights),
    }
    if weights.len() > max_points {
        weights.truncate(max_points);
        hit_cap = true;
    }

    debug_assert!(weights.iter().all(|y| y.is_finite() && y.abs() >= delta));

    Ok(PointProcessSample {
        weights,
        delta,
        max_points,
        hit_cap,
        discarded_first_moment: m.small_ball_first_moment(delta),
    })
}
