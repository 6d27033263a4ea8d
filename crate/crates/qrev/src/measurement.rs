//! Complete ideal measurements `{A_r}` with `sum_r A_r^dag A_r = 1`.
//!
//! A `MeasurementSet` caches the SVD of every operator at construction; the
//! singular spectra drive everything downstream (information gain from the
//! largest singular values, reversibility from the smallest). Outcome indices
//! are 0-based throughout.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlin::{
    self, frobenius_distance, identity, svd, CMatrix, CVector, PureState, RandomSource, SvdTriple,
    DensityMatrix,
};

/// Default completeness tolerance (Frobenius residual of `sum A^dag A - 1`).
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Tolerance on the singular-value sum rule `sum_{r,i} lambda_i^2 = d`.
pub const SUM_RULE_TOL: f64 = 1e-8;
/// Outcome probabilities below this cannot be conditioned on.
pub const ZERO_PROB_TOL: f64 = 1e-12;
/// Operators with `lambda_max` below this are treated as zero operators.
pub const ZERO_OPERATOR_TOL: f64 = 1e-12;

/// One Kraus operator together with its cached SVD.
#[derive(Debug, Clone)]
pub struct MeasurementOperator {
    matrix: CMatrix,
    svd: SvdTriple,
}

impl MeasurementOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let svd = svd(&matrix)?;
        Ok(Self { matrix, svd })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn svd(&self) -> &SvdTriple {
        &self.svd
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn lambda_max(&self) -> f64 {
        self.svd.lambda_max()
    }

    pub fn lambda_min(&self) -> f64 {
        self.svd.lambda_min()
    }

    /// All singular values vanish (allowed inside a set only if the others
    /// compensate; excluded from reversal construction).
    pub fn is_zero(&self) -> bool {
        self.lambda_max() <= ZERO_OPERATOR_TOL
    }

    /// `A^dag A`.
    pub fn gram(&self) -> CMatrix {
        self.matrix.adjoint() * &self.matrix
    }

    /// The isometric part `sum_i |v_i><w_i|` of the polar form `A = D U`.
    pub fn unitary_part(&self) -> CMatrix {
        &self.svd.left * self.svd.right.adjoint()
    }
}

/// A complete set of measurement operators on a d-level system.
#[derive(Debug, Clone)]
pub struct MeasurementSet {
    dimension: usize,
    operators: Vec<MeasurementOperator>,
}

impl MeasurementSet {
    pub fn new(dimension: usize, matrices: Vec<CMatrix>) -> Result<Self> {
        Self::with_tolerance(dimension, matrices, COMPLETENESS_TOL)
    }

    pub fn with_tolerance(
        dimension: usize,
        matrices: Vec<CMatrix>,
        completeness_tol: f64,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Dimension("dimension must be >= 1".into()));
        }
        if matrices.is_empty() {
            return Err(Error::Dimension("a measurement set needs at least one operator".into()));
        }
        for m in &matrices {
            if m.nrows() != dimension || m.ncols() != dimension {
                return Err(Error::Dimension(format!(
                    "operator is {}x{}, expected {dimension}x{dimension}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let operators: Vec<MeasurementOperator> = matrices
            .into_iter()
            .map(MeasurementOperator::new)
            .collect::<Result<_>>()?;

        let mut gram_sum = CMatrix::zeros(dimension, dimension);
        for op in &operators {
            gram_sum += op.gram();
        }
        let residual = frobenius_distance(&gram_sum, &identity(dimension));
        if residual >= completeness_tol {
            return Err(Error::Completeness {
                residual,
                tolerance: completeness_tol,
            });
        }
        let sum_rule: f64 = operators
            .iter()
            .flat_map(|op| op.svd().singular_values.iter())
            .map(|&l| l * l)
            .sum();
        if (sum_rule - dimension as f64).abs() >= SUM_RULE_TOL {
            return Err(Error::Completeness {
                residual: (sum_rule - dimension as f64).abs(),
                tolerance: SUM_RULE_TOL,
            });
        }
        Ok(Self {
            dimension,
            operators,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn n_outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[MeasurementOperator] {
        &self.operators
    }

    pub fn operator(&self, r: usize) -> Result<&MeasurementOperator> {
        self.operators.get(r).ok_or(Error::Index {
            index: r,
            n_outcomes: self.operators.len(),
        })
    }

    /// Frobenius residual of the completeness relation.
    pub fn completeness_residual(&self) -> f64 {
        let mut gram_sum = CMatrix::zeros(self.dimension, self.dimension);
        for op in &self.operators {
            gram_sum += op.gram();
        }
        frobenius_distance(&gram_sum, &identity(self.dimension))
    }

    /// Born probability `<psi| A_r^dag A_r |psi>`.
    pub fn outcome_probability(&self, r: usize, psi: &PureState) -> Result<f64> {
        let op = self.operator(r)?;
        self.check_state_dim(psi.dim())?;
        Ok((op.matrix() * psi.vector()).norm_squared())
    }

    /// `tr(rho A_r^dag A_r)` for mixed inputs.
    pub fn outcome_probability_mixed(&self, r: usize, rho: &DensityMatrix) -> Result<f64> {
        let op = self.operator(r)?;
        self.check_state_dim(rho.dim())?;
        Ok((op.gram() * rho.matrix()).trace().re)
    }

    /// Post-measurement state `A_r|psi> / sqrt(p)`.
    pub fn post_measurement_state(&self, r: usize, psi: &PureState) -> Result<PureState> {
        let op = self.operator(r)?;
        self.check_state_dim(psi.dim())?;
        let image = op.matrix() * psi.vector();
        let p = image.norm_squared();
        if p <= ZERO_PROB_TOL {
            return Err(Error::ZeroProbability { probability: p });
        }
        PureState::normalized(image)
    }

    /// Draws an outcome with its Born probability and returns the collapsed state.
    pub fn sample_outcome(&self, psi: &PureState, rng: &mut RandomSource) -> Result<(usize, PureState)> {
        self.check_state_dim(psi.dim())?;
        let x = rng.uniform();
        let mut acc = 0.0;
        let mut chosen = self.operators.len() - 1;
        for r in 0..self.operators.len() {
            acc += self.outcome_probability(r, psi)?;
            if x < acc {
                chosen = r;
                break;
            }
        }
        // Rounding can land x past the accumulated total; fall back to the
        // last outcome with nonzero probability.
        let mut r = chosen;
        while self.outcome_probability(r, psi)? <= ZERO_PROB_TOL {
            if r == 0 {
                break;
            }
            r -= 1;
        }
        let state = self.post_measurement_state(r, psi)?;
        Ok((r, state))
    }

    fn check_state_dim(&self, d: usize) -> Result<()> {
        if d != self.dimension {
            return Err(Error::Dimension(format!(
                "state dimension {d} does not match measurement dimension {}",
                self.dimension
            )));
        }
        Ok(())
    }
}

/// Haar-random complete measurement: draw a Haar unitary of size `(N d) x (N d)`,
/// take its first `d` columns as an isometry, and slice it into `N` blocks of
/// `d` rows. Completeness holds by construction.
pub fn random_measurement_set(
    d: usize,
    n_outcomes: usize,
    rng: &mut RandomSource,
) -> Result<MeasurementSet> {
    if d == 0 || n_outcomes == 0 {
        return Err(Error::Dimension("d and n_outcomes must be >= 1".into()));
    }
    let big = qlin::haar_unitary(n_outcomes * d, rng)?;
    let mut matrices = Vec::with_capacity(n_outcomes);
    for r in 0..n_outcomes {
        let block = CMatrix::from_fn(d, d, |i, j| big[(r * d + i, j)]);
        matrices.push(block);
    }
    MeasurementSet::with_tolerance(d, matrices, 1e-8)
}

/// von Neumann measurement `{|i><i|}` in dimension `d`.
pub fn example_von_neumann(d: usize) -> Result<MeasurementSet> {
    if d < 2 {
        return Err(Error::Dimension("von Neumann example requires d >= 2".into()));
    }
    let matrices = (0..d)
        .map(|i| PureState::basis(d, i).projector())
        .collect();
    MeasurementSet::new(d, matrices)
}

/// Two-operator qubit weak measurement with detection strength `eta`:
/// `A_1 = sqrt(eta)|1><1|`, `A_2 = |0><0| + sqrt(1-eta)|1><1|`
/// (indices 0 and 1 here). `eta = 0` collapses to the single-outcome identity
/// set so no zero operator appears.
pub fn example_weak_eta(eta: f64) -> Result<MeasurementSet> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta = {eta} outside [0, 1]")));
    }
    if eta == 0.0 {
        return MeasurementSet::new(2, vec![identity(2)]);
    }
    let a1 = CMatrix::from_diagonal(&CVector::from_vec(vec![
        Complex64::ZERO,
        Complex64::new(eta.sqrt(), 0.0),
    ]));
    let a2 = CMatrix::from_diagonal(&CVector::from_vec(vec![
        Complex64::ONE,
        Complex64::new((1.0 - eta).sqrt(), 0.0),
    ]));
    MeasurementSet::new(2, vec![a1, a2])
}

/// Family saturating the trade-off bound: `N = d` operators
/// `A_r = sqrt(a+b)|e_r><e_r| + sqrt(b)(1 - |e_r><e_r|)` with `b = (1-a)/d`,
/// so every `A_r^dag A_r = a|e_r><e_r| + b 1`.
pub fn saturating_measurement_set(d: usize, a: f64) -> Result<MeasurementSet> {
    if d == 0 {
        return Err(Error::Dimension("dimension must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("a = {a} outside [0, 1]")));
    }
    let b = (1.0 - a) / d as f64;
    let hi = Complex64::new((a + b).sqrt(), 0.0);
    let lo = Complex64::new(b.sqrt(), 0.0);
    let matrices = (0..d)
        .map(|r| {
            CMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    if i == r {
                        hi
                    } else {
                        lo
                    }
                } else {
                    Complex64::ZERO
                }
            })
        })
        .collect();
    MeasurementSet::new(d, matrices)
}
