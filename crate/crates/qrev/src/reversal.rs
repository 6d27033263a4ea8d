//! Reversal and erasure of weak measurements.
//!
//! For a reversible outcome (`lambda_min > 0`) the optimal reversing operator
//! is `R = eta W Lambda^-1 V^dag` with `eta = lambda_min`, built from the
//! cached SVD `A = V Lambda W^dag`. Then `R A = eta 1`: a second measurement
//! containing `R` undoes the first one with probability `eta^2 / p(r, psi)`
//! and wipes out the information the first outcome carried. The erasing
//! operator `E = lambda_min V Lambda^-1 V^dag` instead maps the
//! post-measurement state onto a fixed unitary image of the input.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::infogain::MonteCarloEstimate;
use crate::measurement::{MeasurementSet, ZERO_PROB_TOL};
use crate::qlin::{CMatrix, PureState, RandomSource};

/// Outcomes with `lambda_min` at or below this are treated as non-reversible
/// rather than inverting an ill-conditioned diagonal.
pub const REVERSIBLE_THRESHOLD: f64 = 1e-8;

/// Reversing operator for one outcome, completed to a two-outcome measurement.
#[derive(Debug, Clone)]
pub struct ReversalKit {
    pub outcome: usize,
    /// `R = eta W Lambda^-1 V^dag`.
    pub reversing_operator: CMatrix,
    /// Positive square root of `1 - R^dag R`.
    pub complement_operator: CMatrix,
    /// `|eta_r| = lambda_min`, the optimum of the reversal-probability bound.
    pub eta: f64,
}

/// Outcome of applying the erasing operator to a post-measurement state.
#[derive(Debug, Clone)]
pub struct EraseResult {
    /// `P_er = lambda_min^2 / p(r, psi)`.
    pub erase_probability: f64,
    /// Unitary image of the input (the isometric part of `A_r` applied to psi).
    pub residual_state: PureState,
}

pub fn reversing_operator(set: &MeasurementSet, r: usize) -> Result<ReversalKit> {
    reversing_operator_with_threshold(set, r, REVERSIBLE_THRESHOLD)
}

pub fn reversing_operator_with_threshold(
    set: &MeasurementSet,
    r: usize,
    threshold: f64,
) -> Result<ReversalKit> {
    let op = set.operator(r)?;
    let svd = op.svd();
    let d = set.dimension();
    let eta = svd.lambda_min();
    if eta <= threshold {
        return Err(Error::NonReversible {
            lambda_min: eta,
            threshold,
        });
    }
    // R = eta * sum_i (1/lambda_i) |w_i><v_i|
    let mut reversing = CMatrix::zeros(d, d);
    let mut complement = CMatrix::zeros(d, d);
    for i in 0..d {
        let lam = svd.singular_values[i];
        let w = svd.right_vector(i);
        let v = svd.left_vector(i);
        reversing += &w * v.adjoint() * Complex64::new(eta / lam, 0.0);
        let c = (1.0 - (eta / lam) * (eta / lam)).max(0.0).sqrt();
        complement += &v * v.adjoint() * Complex64::new(c, 0.0);
    }
    Ok(ReversalKit {
        outcome: r,
        reversing_operator: reversing,
        complement_operator: complement,
        eta,
    })
}

/// Per-outcome reversal probability at the optimum: `lambda_min^2 / p(r, psi)`.
pub fn reversal_probability(set: &MeasurementSet, r: usize, psi: &PureState) -> Result<f64> {
    let op = set.operator(r)?;
    let eta = op.lambda_min();
    if eta <= REVERSIBLE_THRESHOLD {
        return Err(Error::NonReversible {
            lambda_min: eta,
            threshold: REVERSIBLE_THRESHOLD,
        });
    }
    let p = set.outcome_probability(r, psi)?;
    if p <= ZERO_PROB_TOL {
        return Err(Error::ZeroProbability { probability: p });
    }
    Ok(eta * eta / p)
}

/// Maximal mean reversal probability `P_rev = sum_r lambda_min^2`,
/// independent of the input state.
pub fn reversibility(set: &MeasurementSet) -> f64 {
    set.operators()
        .iter()
        .map(|op| op.lambda_min() * op.lambda_min())
        .sum()
}

/// `1 - P_rev`.
pub fn disturbance(set: &MeasurementSet) -> f64 {
    1.0 - reversibility(set)
}

/// `E = lambda_min sum_i (1/lambda_i) |v_i><v_i|`, acting on post-measurement
/// states; eigenvalues in `(0, 1]` with the largest equal to 1.
pub fn erasing_operator(set: &MeasurementSet, r: usize) -> Result<CMatrix> {
    let op = set.operator(r)?;
    let svd = op.svd();
    let d = set.dimension();
    let lam_min = svd.lambda_min();
    if lam_min <= REVERSIBLE_THRESHOLD {
        return Err(Error::NonReversible {
            lambda_min: lam_min,
            threshold: REVERSIBLE_THRESHOLD,
        });
    }
    let mut e = CMatrix::zeros(d, d);
    for i in 0..d {
        let v = svd.left_vector(i);
        e += &v * v.adjoint() * Complex64::new(lam_min / svd.singular_values[i], 0.0);
    }
    Ok(e)
}

/// Applies the erasing operator after outcome `r` on input `psi`:
/// `E |psi_r> = sqrt(P_er) U_r |psi>` with `U_r` the isometric part of `A_r`.
pub fn apply_erasure(set: &MeasurementSet, r: usize, psi: &PureState) -> Result<EraseResult> {
    let e = erasing_operator(set, r)?;
    let post = set.post_measurement_state(r, psi)?;
    let image = &e * post.vector();
    let erase_probability = image.norm_squared();
    Ok(EraseResult {
        erase_probability,
        residual_state: PureState::normalized(image)?,
    })
}

/// Stochastic measure-then-reverse experiment.
///
/// Each trial samples an outcome, then applies the two-element reversing
/// measurement `{R, sqrt(1 - R^dag R)}`; the trial succeeds when the reversing
/// branch fires. Non-reversible outcomes count as failures. The success rate
/// converges to `P_rev` for every input.
pub fn simulate_measure_and_reverse(
    set: &MeasurementSet,
    psi: &PureState,
    trials: usize,
    rng: &RandomSource,
) -> Result<MonteCarloEstimate> {
    simulate_measure_and_reverse_with_threshold(set, psi, trials, rng, REVERSIBLE_THRESHOLD)
}

pub fn simulate_measure_and_reverse_with_threshold(
    set: &MeasurementSet,
    psi: &PureState,
    trials: usize,
    rng: &RandomSource,
    threshold: f64,
) -> Result<MonteCarloEstimate> {
    if trials < 100 {
        return Err(Error::Domain("need at least 100 trials".into()));
    }
    let kits: Vec<Option<ReversalKit>> = (0..set.n_outcomes())
        .map(|r| reversing_operator_with_threshold(set, r, threshold).ok())
        .collect();
    let successes: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut local = rng.substream(i as u64);
            let (r, post) = set.sample_outcome(psi, &mut local).expect("valid inputs");
            match &kits[r] {
                None => 0.0,
                Some(kit) => {
                    let image = &kit.reversing_operator * post.vector();
                    let p_success = image.norm_squared();
                    if local.uniform() < p_success {
                        // The reversing branch must restore the input exactly.
                        let restored = PureState::normalized(image).expect("p_success > 0");
                        debug_assert!((restored.overlap_sq(psi) - 1.0).abs() < 1e-9);
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        })
        .collect();
    let n = successes.len() as f64;
    let mean = successes.iter().sum::<f64>() / n;
    let std_error = (mean * (1.0 - mean) / n).sqrt();
    Ok(MonteCarloEstimate {
        mean,
        std_error,
        samples: trials,
    })
}
