//! Demonstrations that locked Gauss-Seidel orderings fail on the indefinite
//! system `A = [[1, −τ], [−τ, 1]]`, `b = 0`.
//!
//! Iterates grow geometrically, so they are renormalized after every step
//! and the scale is carried in log form. Because `b = 0` every update is
//! linear and renormalizing does not change the trajectory's direction.

use super::sor::{sor_variant_step, SorVariant};
use super::unlocked::{unlocked_gs_step, UnlockedCase};
use crate::error::{Error, Result};
use crate::linalg::{norm, spectral_radius, DenseMatrix};
use crate::problems::{example1_system, example2_case_matrices, example2_matrices};
use crate::sampling::Rng64;
use crate::stats::fit_slope;

/// Min-coordinate trajectory of one SOR variant.
#[derive(Debug, Clone, PartialEq)]
pub struct MinCoordinateReport {
    pub variant: String,
    /// `ln min_i x_i` after each step (`-inf` once a coordinate is non-positive),
    /// with the initial value first.
    pub log_min: Vec<f64>,
    /// Whether the minimum coordinate never dropped below its initial value.
    pub never_below_initial: bool,
}

fn log_min(x: &[f64], log_scale: f64) -> f64 {
    let m = x.iter().copied().fold(f64::INFINITY, f64::min);
    if m > 0.0 {
        m.ln() + log_scale
    } else {
        f64::NEG_INFINITY
    }
}

fn renormalize(x: &mut [f64], log_scale: &mut f64) {
    let s = norm(x);
    if s > 0.0 && s.is_finite() {
        x.iter_mut().for_each(|v| *v /= s);
        *log_scale += s.ln();
    }
}

/// Runs `steps` steps of `variant` from `x⁰ = (1, 1)` and tracks
/// `min(x₁, x₂)`.
pub fn example1_min_coordinate(
    tau: f64,
    alpha: f64,
    variant: &SorVariant,
    steps: usize,
    seed: u64,
) -> Result<MinCoordinateReport> {
    if !(tau > 1.0) {
        return Err(Error::InvalidParameter(format!("tau must exceed 1, got {tau}")));
    }
    let sys = example1_system(tau);
    let mut rng = Rng64::new(seed);
    let mut x = vec![1.0, 1.0];
    let mut scale = 0.0;
    let initial = log_min(&x, scale);
    let mut trace = Vec::with_capacity(steps + 1);
    trace.push(initial);
    let mut never_below = true;
    for _ in 0..steps {
        sor_variant_step(&mut x, &sys.a, &sys.b, alpha, variant, &mut rng)?;
        renormalize(&mut x, &mut scale);
        let v = log_min(&x, scale);
        // Allow for the rounding of the log-scale bookkeeping.
        if v < initial - 1e-12 * (1.0 + scale.abs()) {
            never_below = false;
        }
        trace.push(v);
    }
    Ok(MinCoordinateReport {
        variant: variant.name().to_string(),
        log_min: trace,
        never_below_initial: never_below,
    })
}

/// Growth of uniformly random unlocked Gauss-Seidel.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    /// `(step, ln ‖x‖)` every `record_every` steps, initial point first.
    pub log_norms: Vec<(f64, f64)>,
    /// Least-squares slope of `ln ‖x‖` per step over all steps.
    pub slope: f64,
}

/// Runs `steps` uniformly random unlocked updates from `x⁰ = (1, 1)`.
pub fn example2_random_growth(
    tau: f64,
    alpha: f64,
    steps: usize,
    seed: u64,
    record_every: usize,
) -> Result<GrowthReport> {
    if !(tau > 1.0) {
        return Err(Error::InvalidParameter(format!("tau must exceed 1, got {tau}")));
    }
    let sys = example1_system(tau);
    let mut rng = Rng64::new(seed);
    let mut x: Vec<f64> = vec![1.0, 1.0];
    let mut scale = 0.0;
    let every = record_every.max(1);
    let mut all = Vec::with_capacity(steps + 1);
    all.push((0.0, norm(&x).ln()));
    for k in 1..=steps {
        unlocked_gs_step(&mut x, &sys.a, &sys.b, alpha, UnlockedCase::UniformRandom, &mut rng)?;
        renormalize(&mut x, &mut scale);
        all.push((k as f64, norm(&x).ln() + scale));
    }
    let slope = fit_slope(&all);
    let log_norms = all.into_iter().step_by(every).collect();
    Ok(GrowthReport { log_norms, slope })
}

/// All 24 orderings of `(0, 1, 2, 3)` in lexicographic order.
pub fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let distinct = (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j]));
                    if distinct {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Which set of 2×2 iteration matrices to multiply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example2Matrices {
    /// The published `B₁…B₄`.
    Published,
    /// The exact maps of the four pair updates.
    CaseUpdates,
}

/// Spectral radius of the product of the four iteration matrices for each
/// ordering. Ordering `p` applies `B_{p[0]}` first, so the product is
/// `B_{p[3]} B_{p[2]} B_{p[1]} B_{p[0]}`.
pub fn example2_spectral_radii(tau: f64, alpha: f64, which: Example2Matrices) -> Result<Vec<([usize; 4], f64)>> {
    let ms = match which {
        Example2Matrices::Published => example2_matrices(tau, alpha),
        Example2Matrices::CaseUpdates => example2_case_matrices(tau, alpha),
    };
    permutations4()
        .into_iter()
        .map(|p| {
            let mut prod = DenseMatrix::<f64>::identity(2);
            for &k in &p {
                prod = ms[k].matmul(&prod)?;
            }
            Ok((p, spectral_radius(&prod)?))
        })
        .collect()
}
