//! Information gain versus reversibility of weak quantum measurements.
//!
//! A complete ideal measurement `{A_r}` extracts information about an unknown
//! input state and disturbs it; if the interaction is weak, a subsequent
//! measurement can probabilistically undo the collapse. This crate builds and
//! validates such measurement sets, computes
//!
//! - the information gain `G_max = (d + sum_r lambda_0^2) / (d (d+1))`
//!   (the maximal mean estimation fidelity over guess strategies),
//! - the reversibility `P_rev = sum_r lambda_min^2`
//!   (the maximal mean probability of restoring the input),
//!
//! constructs the optimal reversing and erasing operators, evaluates the
//! trade-off bound `d(d+1) G_max + (d-1) P_rev <= 2d` (an exact identity
//! `6 G_max + P_rev = 4` for qubits), and realizes any set as a unitary
//! dilation with an ancilla readout. Closed forms are cross-checked against
//! independent Monte Carlo oracles over Haar-random inputs and unitaries.

pub mod dilation;
pub mod error;
pub mod infogain;
pub mod json;
pub mod measurement;
pub mod qlin;
pub mod reversal;
pub mod tradeoff;

pub use error::{Error, Result};
pub use qlin::{CMatrix, CVector, DensityMatrix, PureState, RandomSource, SvdTriple};

pub use dilation::{dilate, information_report, DilatedMeasurement, InformationReport};
pub use infogain::{
    estimation_fidelity_mc, information_gain, optimal_guess, swap_operator, twirl_exact, twirl_mc,
    GuessStrategy, MonteCarloEstimate, TwirlCoefficients,
};
pub use measurement::{
    example_von_neumann, example_weak_eta, random_measurement_set, saturating_measurement_set,
    MeasurementOperator, MeasurementSet,
};
pub use reversal::{
    apply_erasure, disturbance, erasing_operator, reversal_probability, reversibility,
    reversing_operator, reversing_operator_with_threshold, simulate_measure_and_reverse,
    simulate_measure_and_reverse_with_threshold, EraseResult, ReversalKit,
};
pub use tradeoff::{
    ensemble_scan, is_saturating, qubit_identity_residual, tradeoff_report, ScanAggregate,
    TradeoffReport,
};
