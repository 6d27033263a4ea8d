//! Unitary dilation of a measurement set.
//!
//! A complete set `{A_r}` is realized as a single unitary on system (x)
//! ancilla followed by a projective readout of the N-level ancilla:
//! `U (|psi> (x) |0>) = sum_r A_r|psi> (x) |r>`. When every outcome
//! probability is independent of the input (equivalently every
//! `A_r^dag A_r` is proportional to the identity), no information leaves the
//! system and the input can be retrieved deterministically from the
//! post-projection state.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::measurement::{MeasurementSet, ZERO_PROB_TOL};
use crate::qlin::{self, frobenius_distance, identity, CMatrix, CVector, PureState, RandomSource};

/// Residual threshold for the information-free classification.
pub const INFO_FREE_TOL: f64 = 1e-9;

/// Dilation unitary plus the ancilla readout projectors.
///
/// Basis convention: system index is the major axis, so `|k> (x) |r>` sits at
/// row `k * N + r`.
#[derive(Debug, Clone)]
pub struct DilatedMeasurement {
    system_dim: usize,
    ancilla_dim: usize,
    unitary: CMatrix,
    ancilla_projectors: Vec<CMatrix>,
}

impl DilatedMeasurement {
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn ancilla_projectors(&self) -> &[CMatrix] {
        &self.ancilla_projectors
    }

    /// `|| U^dag U - 1 ||_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.unitary.nrows();
        frobenius_distance(&(self.unitary.adjoint() * &self.unitary), &identity(n))
    }

    /// The image `U (|psi> (x) |0>)`.
    pub fn dilated_image(&self, psi: &PureState) -> Result<CVector> {
        if psi.dim() != self.system_dim {
            return Err(Error::Dimension(format!(
                "state dimension {} does not match system dimension {}",
                psi.dim(),
                self.system_dim
            )));
        }
        let n = self.ancilla_dim;
        let mut embedded = CVector::zeros(self.system_dim * n);
        for k in 0..self.system_dim {
            embedded[k * n] = psi.vector()[k];
        }
        Ok(&self.unitary * embedded)
    }

    /// Probability that the ancilla readout gives `r`.
    pub fn projected_probability(&self, r: usize, psi: &PureState) -> Result<f64> {
        let image = self.dilated_image(psi)?;
        Ok(self.system_component(r, &image).norm_squared())
    }

    /// Normalized system state after the ancilla readout gave `r`.
    pub fn projected_state(&self, r: usize, psi: &PureState) -> Result<PureState> {
        let image = self.dilated_image(psi)?;
        let component = self.system_component(r, &image);
        let p = component.norm_squared();
        if p <= ZERO_PROB_TOL {
            return Err(Error::ZeroProbability { probability: p });
        }
        PureState::normalized(component)
    }

    /// The Kraus block `A_r` recovered from the dilation columns:
    /// entry `(k, j)` is the `|k> (x) |r>` component of `U (|j> (x) |0>)`.
    pub fn kraus_block(&self, r: usize) -> Result<CMatrix> {
        if r >= self.ancilla_dim {
            return Err(Error::Index {
                index: r,
                n_outcomes: self.ancilla_dim,
            });
        }
        let d = self.system_dim;
        let n = self.ancilla_dim;
        Ok(CMatrix::from_fn(d, d, |k, j| self.unitary[(k * n + r, j * n)]))
    }

    fn system_component(&self, r: usize, image: &CVector) -> CVector {
        let n = self.ancilla_dim;
        CVector::from_fn(self.system_dim, |k, _| image[k * n + r])
    }

    /// Recovers the input from a post-projection state, possible only when the
    /// measurement extracts no information (every `A_r = c_r` x unitary).
    ///
    /// The recovery unitary maps the orthonormal basis images
    /// `A_r|j> / ||A_r|j>||` back to the computational basis; it depends only
    /// on the dilation, never on the input.
    pub fn deterministic_retrieval(&self, r: usize, residual: &PureState) -> Result<PureState> {
        let d = self.system_dim;
        for s in 0..self.ancilla_dim {
            if !kraus_is_proportional_to_unitary(&self.kraus_block(s)?, INFO_FREE_TOL) {
                return Err(Error::InformationWasExtracted);
            }
        }
        let block = self.kraus_block(r)?;
        let p = (block.adjoint() * &block).trace().re / d as f64;
        if p <= ZERO_PROB_TOL {
            return Err(Error::ZeroProbability { probability: p });
        }
        // Columns A_r|j>, normalized, are orthonormal; invert by the adjoint.
        let scale = Complex64::new(1.0 / p.sqrt(), 0.0);
        let basis_images = block * scale;
        PureState::normalized(basis_images.adjoint() * residual.vector())
    }
}

/// Diagnostics for the "is any information extracted?" question, decided by
/// three routes that must agree: cross-term orthogonality residuals on the
/// dilated basis images, sampled spread of the outcome probabilities, and the
/// exact Kraus-level criterion `A_r^dag A_r` proportional to `1`.
#[derive(Debug, Clone)]
pub struct InformationReport {
    /// Per outcome: largest `|<A_r j | A_r k>|` over basis pairs `j != k`.
    pub per_outcome_orthogonality_residual: Vec<f64>,
    /// Per outcome: max - min of the outcome probability over sampled inputs.
    pub probability_spread: Vec<f64>,
    pub information_free: bool,
}

fn kraus_is_proportional_to_unitary(block: &CMatrix, tol: f64) -> bool {
    let d = block.nrows();
    let gram = block.adjoint() * block;
    let c = gram.trace().re / d as f64;
    frobenius_distance(&gram, &(identity(d) * Complex64::new(c, 0.0))) < tol
}

/// Builds the dilation: the isometry columns `U (|j> (x) |0>)` are fixed by
/// the set, the remaining columns are completed by Gram-Schmidt over the
/// canonical basis in index order.
pub fn dilate(set: &MeasurementSet) -> DilatedMeasurement {
    let d = set.dimension();
    let n = set.n_outcomes();
    let total = d * n;
    let mut unitary = CMatrix::zeros(total, total);

    for j in 0..d {
        for r in 0..n {
            let a = set.operators()[r].matrix();
            for k in 0..d {
                unitary[(k * n + r, j * n)] = a[(k, j)];
            }
        }
    }

    // Fill the free column slots (ancilla index != 0) with an orthonormal
    // completion, deterministically.
    let mut fixed: Vec<CVector> = (0..d).map(|j| unitary.column(j * n).into_owned()).collect();
    let mut free_slots: Vec<usize> = (0..total).filter(|c| c % n != 0).collect();
    free_slots.sort_unstable();
    let mut slot_iter = free_slots.into_iter();
    for candidate in 0..total {
        if fixed.len() == total {
            break;
        }
        let mut v = CVector::zeros(total);
        v[candidate] = Complex64::ONE;
        for f in &fixed {
            let overlap = f.dotc(&v);
            v -= f * overlap;
        }
        let norm = v.norm();
        if norm > 1e-8 {
            v /= Complex64::new(norm, 0.0);
            let col = slot_iter.next().expect("free slot available");
            unitary.set_column(col, &v);
            fixed.push(v);
        }
    }

    let ancilla_projectors = (0..n)
        .map(|r| {
            CMatrix::from_fn(total, total, |i, j| {
                if i == j && i % n == r {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                }
            })
        })
        .collect();

    DilatedMeasurement {
        system_dim: d,
        ancilla_dim: n,
        unitary,
        ancilla_projectors,
    }
}

pub fn information_report(
    dilated: &DilatedMeasurement,
    samples: usize,
    rng: &RandomSource,
) -> Result<InformationReport> {
    if samples < 10 {
        return Err(Error::Domain("need at least 10 samples".into()));
    }
    let d = dilated.system_dim();
    let n = dilated.ancilla_dim();

    let mut residuals = Vec::with_capacity(n);
    let mut spreads = Vec::with_capacity(n);
    let mut kraus_free = true;
    for r in 0..n {
        let block = dilated.kraus_block(r)?;
        // Cross terms <A_r j | A_r k> = off-diagonals of the Gram matrix.
        let gram = block.adjoint() * &block;
        let mut max_cross = 0.0_f64;
        for j in 0..d {
            for k in 0..d {
                if j != k {
                    max_cross = max_cross.max(gram[(j, k)].norm());
                }
            }
        }
        residuals.push(max_cross);

        let mut local = rng.substream(r as u64);
        let mut p_min = f64::INFINITY;
        let mut p_max = f64::NEG_INFINITY;
        for _ in 0..samples {
            let psi = qlin::random_pure_state(d, &mut local)?;
            let p = (&block * psi.vector()).norm_squared();
            p_min = p_min.min(p);
            p_max = p_max.max(p);
        }
        spreads.push(p_max - p_min);

        kraus_free &= kraus_is_proportional_to_unitary(&block, INFO_FREE_TOL);
    }

    Ok(InformationReport {
        per_outcome_orthogonality_residual: residuals,
        probability_spread: spreads,
        information_free: kraus_free,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{
        example_von_neumann, example_weak_eta, random_measurement_set, MeasurementSet,
    };
    use crate::reversal::reversing_operator;
    use approx::assert_abs_diff_eq;

    fn balanced() -> PureState {
        PureState::normalized(CVector::from_vec(vec![Complex64::ONE, Complex64::ONE])).unwrap()
    }

    #[test]
    fn dilation_of_identity_acts_trivially() {
        let set = MeasurementSet::new(3, vec![identity(3)]).unwrap();
        let dilated = dilate(&set);
        assert!(dilated.unitarity_residual() < 1e-12);
        let mut rng = RandomSource::new(1);
        let psi = qlin::random_pure_state(3, &mut rng).unwrap();
        let out = dilated.projected_state(0, &psi).unwrap();
        assert_abs_diff_eq!(out.overlap_sq(&psi), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dilation_probabilities_match_born_rule() {
        let set = example_weak_eta(0.36).unwrap();
        let dilated = dilate(&set);
        assert_eq!(dilated.unitary().nrows(), 4);
        assert!(dilated.unitarity_residual() < 1e-12);
        let mut rng = RandomSource::new(2);
        for _ in 0..100 {
            let psi = qlin::random_pure_state(2, &mut rng).unwrap();
            for r in 0..2 {
                let p_dilated = dilated.projected_probability(r, &psi).unwrap();
                let p_direct = set.outcome_probability(r, &psi).unwrap();
                assert_abs_diff_eq!(p_dilated, p_direct, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn dilation_of_projective_measurement_is_entangler() {
        // |j> (x) |0>  ->  |j> (x) |j>, a CNOT-like map.
        let set = example_von_neumann(2).unwrap();
        let dilated = dilate(&set);
        for j in 0..2 {
            let image = dilated.dilated_image(&PureState::basis(2, j)).unwrap();
            let mut expect = CVector::zeros(4);
            expect[j * 2 + j] = Complex64::ONE;
            assert!((image - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn projected_states_match_post_measurement_states() {
        let mut rng = RandomSource::new(3);
        for _ in 0..20 {
            let set = random_measurement_set(2, 3, &mut rng).unwrap();
            let dilated = dilate(&set);
            assert!(dilated.unitarity_residual() < 1e-9);
            for _ in 0..5 {
                let psi = qlin::random_pure_state(2, &mut rng).unwrap();
                for r in 0..3 {
                    let p = set.outcome_probability(r, &psi).unwrap();
                    if p <= 1e-9 {
                        continue;
                    }
                    let from_dilation = dilated.projected_state(r, &psi).unwrap();
                    let direct = set.post_measurement_state(r, &psi).unwrap();
                    assert!((from_dilation.overlap_sq(&direct) - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn unitary_measurement_is_information_free() {
        let set = MeasurementSet::new(2, vec![identity(2)]).unwrap();
        let report = information_report(&dilate(&set), 50, &RandomSource::new(4)).unwrap();
        assert!(report.information_free);
        assert!(report.per_outcome_orthogonality_residual[0] < 1e-12);
        assert!(report.probability_spread[0] < 1e-12);
    }

    #[test]
    fn projective_measurement_extracts_information() {
        let set = example_von_neumann(2).unwrap();
        let dilated = dilate(&set);
        let report = information_report(&dilated, 50, &RandomSource::new(5)).unwrap();
        assert!(!report.information_free);
        // p ranges over [0, 1]: check the extremes directly.
        for r in 0..2 {
            let p0 = dilated.projected_probability(r, &PureState::basis(2, 0)).unwrap();
            let p1 = dilated.projected_probability(r, &PureState::basis(2, 1)).unwrap();
            assert_abs_diff_eq!((p0 - p1).abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn composite_undo_outcome_is_information_free() {
        // R A (renormalized into a set with its complement branch) has an
        // input-independent first outcome.
        let set = example_weak_eta(0.4).unwrap();
        let kit = reversing_operator(&set, 1).unwrap();
        let a = set.operator(1).unwrap().matrix();
        let composite = &kit.reversing_operator * a;
        // Complete {composite, X} with sqrt(1 - C^dag C), diagonal here.
        let gram = composite.adjoint() * &composite;
        let complement = CMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                Complex64::new((1.0 - gram[(i, i)].re).max(0.0).sqrt(), 0.0)
            } else {
                Complex64::ZERO
            }
        });
        let two_step = MeasurementSet::new(2, vec![composite, complement]).unwrap();
        let dilated = dilate(&two_step);
        let report = information_report(&dilated, 50, &RandomSource::new(6)).unwrap();
        assert!(report.probability_spread[0] < 1e-9);
        assert!(report.per_outcome_orthogonality_residual[0] < 1e-9);
    }

    #[test]
    fn three_routes_agree_on_random_sets() {
        let mut rng = RandomSource::new(7);
        let base = RandomSource::new(8);
        for i in 0..50 {
            let set = random_measurement_set(2, 2, &mut rng).unwrap();
            let report = information_report(&dilate(&set), 30, &base.substream(i)).unwrap();
            let by_residuals = report
                .per_outcome_orthogonality_residual
                .iter()
                .all(|&r| r < INFO_FREE_TOL)
                && report.probability_spread.iter().all(|&s| s < INFO_FREE_TOL);
            assert_eq!(report.information_free, by_residuals);
        }
    }

    #[test]
    fn retrieval_from_unitary_measurement() {
        let mut rng = RandomSource::new(9);
        let u = qlin::haar_unitary(2, &mut rng).unwrap();
        let set = MeasurementSet::new(2, vec![u]).unwrap();
        let dilated = dilate(&set);
        let psi = qlin::random_pure_state(2, &mut rng).unwrap();
        let residual = dilated.projected_state(0, &psi).unwrap();
        let recovered = dilated.deterministic_retrieval(0, &residual).unwrap();
        assert!((recovered.overlap_sq(&psi) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn retrieval_from_unitary_mixture() {
        // {(1/sqrt 2) 1, (1/sqrt 2) Z}: both blocks proportional to unitaries.
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let id = identity(2) * s;
        let z = CMatrix::from_diagonal(&CVector::from_vec(vec![s, -s]));
        let set = MeasurementSet::new(2, vec![id, z]).unwrap();
        let dilated = dilate(&set);
        let mut rng = RandomSource::new(10);
        for _ in 0..20 {
            let psi = qlin::random_pure_state(2, &mut rng).unwrap();
            for r in 0..2 {
                let residual = dilated.projected_state(r, &psi).unwrap();
                let recovered = dilated.deterministic_retrieval(r, &residual).unwrap();
                assert!((recovered.overlap_sq(&psi) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn retrieval_rejected_when_information_extracted() {
        let set = example_weak_eta(0.36).unwrap();
        let dilated = dilate(&set);
        let residual = dilated.projected_state(1, &balanced()).unwrap();
        assert!(matches!(
            dilated.deterministic_retrieval(1, &residual),
            Err(Error::InformationWasExtracted)
        ));
    }
}
