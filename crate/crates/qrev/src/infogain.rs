//! Information gain of a measurement set.
//!
//! Two independent routes to the same quantity:
//! the closed form `G_max = (d + sum_r lambda_0^2) / (d (d+1))` built from the
//! largest singular values, and a Monte Carlo average of the estimation
//! fidelity `sum_r p(r, psi) |<guess_r|psi>|^2` over Haar-random inputs. The
//! Schur-lemma twirl (exact coefficients vs. Haar-sampled two-copy average)
//! cross-checks the group integral the closed form rests on.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measurement::MeasurementSet;
use crate::qlin::{self, CMatrix, PureState, RandomSource};

/// One guess state per outcome.
#[derive(Debug, Clone)]
pub struct GuessStrategy {
    guesses: Vec<PureState>,
}

impl GuessStrategy {
    pub fn new(guesses: Vec<PureState>) -> Self {
        Self { guesses }
    }

    /// The optimal strategy: guess `|w_0^r>` for each outcome. Zero operators
    /// never fire, so they get a placeholder basis state.
    pub fn optimal(set: &MeasurementSet) -> Self {
        let guesses = (0..set.n_outcomes())
            .map(|r| {
                optimal_guess(set, r)
                    .unwrap_or_else(|_| PureState::basis(set.dimension(), 0))
            })
            .collect();
        Self { guesses }
    }

    /// Guess the same fixed state for every outcome.
    pub fn constant(set: &MeasurementSet, state: PureState) -> Self {
        Self {
            guesses: vec![state; set.n_outcomes()],
        }
    }

    pub fn guesses(&self) -> &[PureState] {
        &self.guesses
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    fn from_values(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            samples: n,
        }
    }

    /// Distance from `reference` in units of the standard error.
    pub fn z_score(&self, reference: f64) -> f64 {
        if self.std_error == 0.0 {
            if (self.mean - reference).abs() < 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - reference) / self.std_error
        }
    }
}

/// Twirl coefficients of `int dg (U^dag (x) U^dag) O (U (x) U) = a1 1 + a2 S`.
#[derive(Debug, Clone, Copy)]
pub struct TwirlCoefficients {
    pub alpha1: f64,
    pub alpha2: f64,
}

/// The best guess for outcome `r`: the right singular vector of the largest
/// singular value.
pub fn optimal_guess(set: &MeasurementSet, r: usize) -> Result<PureState> {
    let op = set.operator(r)?;
    if op.is_zero() {
        return Err(Error::DegenerateOperator);
    }
    PureState::new(op.svd().right_vector(0))
}

/// Closed-form maximal mean estimation fidelity,
/// `G_max = (d + sum_r lambda_0^2) / (d (d+1))`, in `[1/d, 2/(d+1)]`.
pub fn information_gain(set: &MeasurementSet) -> f64 {
    let d = set.dimension() as f64;
    let top_sum: f64 = set
        .operators()
        .iter()
        .map(|op| op.lambda_max() * op.lambda_max())
        .sum();
    (d + top_sum) / (d * (d + 1.0))
}

const MC_BLOCK: usize = 4096;

/// Monte Carlo mean estimation fidelity under a given guess strategy.
///
/// Each trial draws its own substream of `rng`, so the result is a
/// deterministic function of `(seed, stream, samples)` independent of how the
/// trials are scheduled.
pub fn estimation_fidelity_mc(
    set: &MeasurementSet,
    strategy: &GuessStrategy,
    samples: usize,
    rng: &RandomSource,
) -> Result<MonteCarloEstimate> {
    if samples < 100 {
        return Err(Error::Domain("need at least 100 samples".into()));
    }
    if strategy.guesses.len() != set.n_outcomes() {
        return Err(Error::Dimension(format!(
            "strategy has {} guesses for {} outcomes",
            strategy.guesses.len(),
            set.n_outcomes()
        )));
    }
    let d = set.dimension();
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut local = rng.substream(i as u64);
            let psi = qlin::random_pure_state(d, &mut local).expect("d >= 1");
            let mut f = 0.0;
            for (r, guess) in strategy.guesses.iter().enumerate() {
                let p = set.outcome_probability(r, &psi).expect("index in range");
                f += p * guess.overlap_sq(&psi);
            }
            f
        })
        .collect();
    Ok(MonteCarloEstimate::from_values(&values))
}

/// Swap operator on two copies: `S (|i> (x) |j>) = |j> (x) |i>`.
pub fn swap_operator(d: usize) -> CMatrix {
    let mut s = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = Complex64::ONE;
        }
    }
    s
}

/// Closed-form twirl coefficients for an operator on the two-copy space.
/// Traces are taken as real (use Hermitian test operators).
pub fn twirl_exact(o: &CMatrix, d: usize) -> Result<TwirlCoefficients> {
    check_two_copy_dim(o, d)?;
    let s = swap_operator(d);
    let df = d as f64;
    let tr_o = o.trace().re;
    let tr_os = (o * &s).trace().re;
    let denom = df * df * (df * df - 1.0);
    Ok(TwirlCoefficients {
        alpha1: (df * df * tr_o - df * tr_os) / denom,
        alpha2: (df * df * tr_os - df * tr_o) / denom,
    })
}

/// `a1 1 + a2 S`, the image the exact twirl predicts.
pub fn twirl_reconstruction(coeffs: TwirlCoefficients, d: usize) -> CMatrix {
    qlin::identity(d * d) * Complex64::new(coeffs.alpha1, 0.0)
        + swap_operator(d) * Complex64::new(coeffs.alpha2, 0.0)
}

/// Monte Carlo two-copy twirl: average of `(U^dag (x) U^dag) O (U (x) U)`
/// over Haar unitaries. Deterministic under the per-trial substream contract.
pub fn twirl_mc(
    o: &CMatrix,
    d: usize,
    samples: usize,
    rng: &RandomSource,
) -> Result<CMatrix> {
    check_two_copy_dim(o, d)?;
    if samples < 100 {
        return Err(Error::Domain("need at least 100 samples".into()));
    }
    let n_blocks = samples.div_ceil(MC_BLOCK);
    let block_sums: Vec<CMatrix> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b * MC_BLOCK;
            let hi = ((b + 1) * MC_BLOCK).min(samples);
            let mut acc = CMatrix::zeros(d * d, d * d);
            for i in lo..hi {
                let mut local = rng.substream(i as u64);
                let u = qlin::haar_unitary(d, &mut local).expect("d >= 1");
                let uu = u.kronecker(&u);
                acc += uu.adjoint() * o * &uu;
            }
            acc
        })
        .collect();
    let mut total = CMatrix::zeros(d * d, d * d);
    for s in block_sums {
        total += s;
    }
    Ok(total / Complex64::new(samples as f64, 0.0))
}

fn check_two_copy_dim(o: &DMatrix<Complex64>, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::Dimension("d must be >= 1".into()));
    }
    if o.nrows() != d * d || o.ncols() != d * d {
        return Err(Error::Dimension(format!(
            "operator is {}x{}, expected {0}x{0} with side d^2 = {1}",
            o.nrows(),
            d * d
        )));
    }
    Ok(())
}
