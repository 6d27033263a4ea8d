//! The trade-off between information gain and reversibility:
//! `d(d+1) G_max + (d-1) P_rev <= 2d`, with equality exactly when every
//! `A_r^dag A_r = a_r |w_0><w_0| + b_r 1`. For qubits the bound collapses to
//! the identity `6 G_max + P_rev = 4`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::infogain::information_gain;
use crate::measurement::{random_measurement_set, MeasurementSet};
use crate::qlin::{frobenius_distance, identity, RandomSource};
use crate::reversal::reversibility;

/// Saturation threshold on the slack `2d - lhs`.
pub const SATURATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct TradeoffReport {
    pub dimension: usize,
    pub n_outcomes: usize,
    pub info_gain: f64,
    pub reversibility: f64,
    /// `d(d+1) G_max + (d-1) P_rev`.
    pub lhs: f64,
    /// `2d - lhs`; non-negative for every valid set.
    pub slack: f64,
    /// `sum_r [lambda_max^2 + (d-1) lambda_min^2]`, bounded by `d`.
    #[serde(skip)]
    pub singular_value_inequality_lhs: f64,
    pub saturated: bool,
}

pub fn tradeoff_report(set: &MeasurementSet) -> TradeoffReport {
    let d = set.dimension() as f64;
    let info_gain = information_gain(set);
    let p_rev = reversibility(set);
    let lhs = d * (d + 1.0) * info_gain + (d - 1.0) * p_rev;
    let slack = 2.0 * d - lhs;
    let sv_lhs: f64 = set
        .operators()
        .iter()
        .map(|op| {
            let top = op.lambda_max();
            let bottom = op.lambda_min();
            top * top + (d - 1.0) * bottom * bottom
        })
        .sum();
    TradeoffReport {
        dimension: set.dimension(),
        n_outcomes: set.n_outcomes(),
        info_gain,
        reversibility: p_rev,
        lhs,
        slack,
        singular_value_inequality_lhs: sv_lhs,
        saturated: slack < SATURATION_TOL,
    }
}

/// `|6 G_max + P_rev - 4|` for qubit sets; an exact identity, so the residual
/// is numerical noise for every complete set.
pub fn qubit_identity_residual(set: &MeasurementSet) -> Result<f64> {
    if set.dimension() != 2 {
        return Err(Error::Dimension(format!(
            "qubit identity requires d = 2, got d = {}",
            set.dimension()
        )));
    }
    Ok((6.0 * information_gain(set) + reversibility(set) - 4.0).abs())
}

/// Structural saturation test: recovers `b_r = lambda_min^2` and
/// `a_r = lambda_max^2 - lambda_min^2` from the spectrum and checks
/// `A_r^dag A_r = a_r |w_0><w_0| + b_r 1` for every operator.
pub fn is_saturating(set: &MeasurementSet, tol: f64) -> bool {
    let d = set.dimension();
    set.operators().iter().all(|op| {
        let top = op.lambda_max();
        let bottom = op.lambda_min();
        let a = top * top - bottom * bottom;
        let b = bottom * bottom;
        let w0 = op.svd().right_vector(0);
        let expect =
            &w0 * w0.adjoint() * Complex64::new(a, 0.0) + identity(d) * Complex64::new(b, 0.0);
        frobenius_distance(&op.gram(), &expect) < tol
    })
}

/// Bulk verification harness: `count` reports over Haar-random sets.
/// Output order matches draw index regardless of scheduling.
pub fn ensemble_scan(
    d: usize,
    n_outcomes: usize,
    count: usize,
    rng: &RandomSource,
) -> Result<Vec<TradeoffReport>> {
    if count == 0 {
        return Err(Error::Domain("count must be >= 1".into()));
    }
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut local = rng.substream(i as u64);
            let set = random_measurement_set(d, n_outcomes, &mut local)?;
            Ok(tradeoff_report(&set))
        })
        .collect()
}

/// Aggregate of a scan, as emitted by the CLI.
#[derive(Debug, Clone, Serialize)]
pub struct ScanAggregate {
    pub count: usize,
    pub min_slack: f64,
    pub max_abs_residual_d2: Option<f64>,
    pub eq16_max: f64,
}

pub fn aggregate(reports: &[TradeoffReport]) -> ScanAggregate {
    let min_slack = reports.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
    let eq16_max = reports
        .iter()
        .map(|r| r.singular_value_inequality_lhs)
        .fold(f64::NEG_INFINITY, f64::max);
    let max_abs_residual_d2 = if reports.iter().all(|r| r.dimension == 2) && !reports.is_empty() {
        Some(
            reports
                .iter()
                .map(|r| r.slack.abs())
                .fold(f64::NEG_INFINITY, f64::max),
        )
    } else {
        None
    };
    ScanAggregate {
        count: reports.len(),
        min_slack,
        max_abs_residual_d2,
        eq16_max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{
        example_von_neumann, example_weak_eta, saturating_measurement_set, MeasurementSet,
    };
    use crate::qlin;
    use approx::assert_abs_diff_eq;

    #[test]
    fn report_von_neumann_qubit() {
        let report = tradeoff_report(&example_von_neumann(2).unwrap());
        assert_abs_diff_eq!(report.info_gain, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.reversibility, 0.0, epsilon = 1e-24);
        assert_abs_diff_eq!(report.lhs, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.slack, 0.0, epsilon = 1e-12);
        assert!(report.saturated);
    }

    #[test]
    fn report_weak_example() {
        let report = tradeoff_report(&example_weak_eta(0.36).unwrap());
        assert_abs_diff_eq!(report.lhs, 6.0 * 0.56 + 0.64, epsilon = 1e-12);
        assert_abs_diff_eq!(report.slack, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn report_von_neumann_qutrit() {
        let report = tradeoff_report(&example_von_neumann(3).unwrap());
        assert_abs_diff_eq!(report.info_gain, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(report.reversibility, 0.0, epsilon = 1e-24);
        assert_abs_diff_eq!(report.lhs, 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.slack, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn qubit_identity_holds() {
        assert!(qubit_identity_residual(&example_weak_eta(0.7).unwrap()).unwrap() < 1e-12);
        assert!(qubit_identity_residual(&example_von_neumann(2).unwrap()).unwrap() < 1e-12);
        let mut rng = RandomSource::new(5);
        let set = random_measurement_set(2, 5, &mut rng).unwrap();
        assert!(qubit_identity_residual(&set).unwrap() < 1e-9);
        assert!(qubit_identity_residual(&example_von_neumann(3).unwrap()).is_err());
    }

    #[test]
    fn saturating_family_saturates() {
        assert!(is_saturating(&saturating_measurement_set(4, 0.3).unwrap(), 1e-9));
        assert!(is_saturating(&example_weak_eta(0.42).unwrap(), 1e-9));
    }

    #[test]
    fn middle_singular_value_breaks_saturation() {
        // d = 3 operator with spectrum (1, 0.8, 0.2)-type middle value,
        // completed to a full set: not saturating, positive slack.
        let d = 3;
        let lams = [0.9, 0.7, 0.2];
        let a0 = qlin::CMatrix::from_diagonal(&qlin::CVector::from_iterator(
            d,
            lams.iter().map(|&l| Complex64::new(l, 0.0)),
        ));
        let complement = qlin::CMatrix::from_diagonal(&qlin::CVector::from_iterator(
            d,
            lams.iter().map(|&l| Complex64::new((1.0 - l * l).sqrt(), 0.0)),
        ));
        let set = MeasurementSet::new(d, vec![a0, complement]).unwrap();
        assert!(!is_saturating(&set, 1e-9));
        let report = tradeoff_report(&set);
        assert!(report.slack > 1e-3);
        assert!(!report.saturated);
    }

    #[test]
    fn is_saturating_implies_small_slack() {
        let tol = 1e-9;
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            for d in 2..=4 {
                let set = saturating_measurement_set(d, a).unwrap();
                assert!(is_saturating(&set, tol));
                let report = tradeoff_report(&set);
                assert!(report.slack.abs() < d as f64 * tol);
            }
        }
    }

    #[test]
    fn lhs_recomputed_from_raw_spectra_agrees() {
        let mut rng = RandomSource::new(19);
        for _ in 0..100 {
            let set = random_measurement_set(3, 3, &mut rng).unwrap();
            let report = tradeoff_report(&set);
            let d = 3.0;
            let from_spectra = d + report.singular_value_inequality_lhs;
            assert_abs_diff_eq!(report.lhs, from_spectra, epsilon = 1e-10);
            assert!(report.singular_value_inequality_lhs <= d + 1e-9);
            assert!(report.slack > -1e-9);
        }
    }

    #[test]
    fn monotone_frontier_in_saturating_parameter() {
        let d = 3;
        let mut last: Option<(f64, f64)> = None;
        for k in 0..=20 {
            let a = k as f64 / 20.0;
            let set = saturating_measurement_set(d, a).unwrap();
            let g = information_gain(&set);
            let p = reversibility(&set);
            if let Some((g0, p0)) = last {
                assert!(g > g0, "G not increasing at a = {a}");
                assert!(p < p0, "P not decreasing at a = {a}");
            }
            last = Some((g, p));
        }
    }

    #[test]
    fn scan_is_deterministic_and_bounded() {
        let rng = RandomSource::new(23);
        let reports = ensemble_scan(3, 2, 10, &rng).unwrap();
        let again = ensemble_scan(3, 2, 10, &rng).unwrap();
        for (a, b) in reports.iter().zip(again.iter()) {
            assert_eq!(a.slack.to_bits(), b.slack.to_bits());
            assert_eq!(a.info_gain.to_bits(), b.info_gain.to_bits());
        }
        let agg = aggregate(&reports);
        assert!(agg.min_slack > -1e-9);
        assert!(agg.eq16_max <= 3.0 + 1e-9);
        assert!(ensemble_scan(2, 2, 0, &rng).is_err());
    }

    #[test]
    fn qubit_scan_hits_the_equality() {
        let rng = RandomSource::new(29);
        let reports = ensemble_scan(2, 3, 500, &rng).unwrap();
        let agg = aggregate(&reports);
        assert!(agg.max_abs_residual_d2.unwrap() < 1e-9);
    }

    #[test]
    fn endpoints_of_the_gain_range() {
        // G at its maximum forces P = 0; G at its minimum permits P = 1.
        let vn = tradeoff_report(&example_von_neumann(4).unwrap());
        assert_abs_diff_eq!(vn.info_gain, 2.0 / 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vn.reversibility, 0.0, epsilon = 1e-24);
        let unitary = tradeoff_report(&MeasurementSet::new(4, vec![identity(4)]).unwrap());
        assert_abs_diff_eq!(unitary.info_gain, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(unitary.reversibility, 1.0, epsilon = 1e-12);
    }
}
