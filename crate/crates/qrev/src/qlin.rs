//! Complex dense linear algebra, decompositions, and random ensembles.
//!
//! Everything downstream works with `d x d` complex matrices: measurement
//! operators, reversing/erasing operators, dilation unitaries. This module
//! provides the SVD in the form the rest of the crate consumes (ordered
//! singular values with paired left/right bases), Haar-distributed unitaries
//! and pure states, and a seedable, stream-splittable random source.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Dense complex matrix, the substrate for all operators.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

/// Structural validation tolerance (orthonormality, Hermiticity, unit norm).
pub const STRUCT_TOL: f64 = 1e-10;
/// Reconstruction / operator-equality tolerance.
pub const RECON_TOL: f64 = 1e-9;

pub fn frobenius_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm()
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Singular value decomposition of a square matrix, stored as paired bases:
/// `m = sum_i lambda_i |v_i><w_i|` with `lambda_0 >= ... >= lambda_{d-1} >= 0`.
#[derive(Debug, Clone)]
pub struct SvdTriple {
    /// Columns are the left singular vectors `|v_i>`.
    pub left: CMatrix,
    /// Singular values in non-increasing order.
    pub singular_values: Vec<f64>,
    /// Columns are the right singular vectors `|w_i>`.
    pub right: CMatrix,
}

impl SvdTriple {
    pub fn dim(&self) -> usize {
        self.singular_values.len()
    }

    pub fn left_vector(&self, i: usize) -> CVector {
        self.left.column(i).into_owned()
    }

    pub fn right_vector(&self, i: usize) -> CVector {
        self.right.column(i).into_owned()
    }

    pub fn lambda_max(&self) -> f64 {
        self.singular_values[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.singular_values.last().unwrap()
    }

    /// `sum_i lambda_i |v_i><w_i|`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dim();
        let lambda = CMatrix::from_diagonal(&CVector::from_iterator(
            d,
            self.singular_values.iter().map(|&s| Complex64::new(s, 0.0)),
        ));
        &self.left * lambda * self.right.adjoint()
    }
}

/// SVD with a deterministic convention: singular values sorted non-increasing,
/// each right vector's first non-negligible component rotated real positive
/// (the paired left vector absorbs the same phase, so the reconstruction is
/// unchanged), and degenerate clusters ordered lexicographically by the right
/// vector's amplitudes (descending, real part then imaginary part).
pub fn svd(m: &CMatrix) -> Result<SvdTriple> {
    let d = m.nrows();
    if d != m.ncols() {
        return Err(Error::Dimension(format!(
            "svd requires a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !all_finite(m) {
        return Err(Error::NonFinite);
    }
    let dec = m.clone().svd(true, true);
    let u = dec.u.expect("requested");
    let v_t = dec.v_t.expect("requested");

    let mut triples: Vec<(f64, CVector, CVector)> = (0..d)
        .map(|i| {
            let mut v = u.column(i).into_owned();
            let mut w = v_t.row(i).adjoint();
            // Phase fix on w, mirrored onto v.
            if let Some(k) = (0..d).find(|&k| w[k].norm() > 1e-12) {
                let phase = w[k] / w[k].norm();
                let correction = phase.conj();
                w *= correction;
                v *= correction;
            }
            (dec.singular_values[i], v, w)
        })
        .collect();

    triples.sort_by(|a, b| b.0.total_cmp(&a.0));

    // Reorder within degenerate clusters for a deterministic basis choice.
    let tie_tol = 1e-12 * triples[0].0.max(1.0);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (triples[end - 1].0 - triples[end].0).abs() < tie_tol {
            end += 1;
        }
        if end - start > 1 {
            triples[start..end].sort_by(|a, b| lex_cmp(&b.2, &a.2));
        }
        start = end;
    }

    let left = CMatrix::from_columns(&triples.iter().map(|t| t.1.clone()).collect::<Vec<_>>());
    let right = CMatrix::from_columns(&triples.iter().map(|t| t.2.clone()).collect::<Vec<_>>());
    Ok(SvdTriple {
        left,
        singular_values: triples.iter().map(|t| t.0).collect(),
        right,
    })
}

fn lex_cmp(a: &CVector, b: &CVector) -> std::cmp::Ordering {
    for i in 0..a.len() {
        let c = a[i].re.total_cmp(&b[i].re);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
        let c = a[i].im.total_cmp(&b[i].im);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

/// Unit-norm complex state vector.
#[derive(Debug, Clone)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    /// Validates unit norm within `STRUCT_TOL`.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension("state dimension must be >= 1".into()));
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STRUCT_TOL {
            return Err(Error::Domain(format!(
                "state norm {norm} deviates from 1 beyond tolerance"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if norm < 1e-12 {
            return Err(Error::Domain("cannot normalize a (near-)zero vector".into()));
        }
        Ok(Self {
            amplitudes: v / Complex64::new(norm, 0.0),
        })
    }

    /// Computational basis state `|k>` in dimension `d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = CVector::zeros(d);
        v[k] = Complex64::ONE;
        Self { amplitudes: v }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.amplitudes
    }

    /// `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &PureState) -> f64 {
        self.amplitudes.dotc(&other.amplitudes).norm_sqr()
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }
}

/// Unit-trace positive Hermitian matrix.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || d != matrix.ncols() {
            return Err(Error::Dimension(format!(
                "density matrix must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !all_finite(&matrix) {
            return Err(Error::NonFinite);
        }
        if frobenius_distance(&matrix, &matrix.adjoint()) > STRUCT_TOL {
            return Err(Error::Domain("density matrix is not Hermitian".into()));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > STRUCT_TOL || trace.im.abs() > STRUCT_TOL {
            return Err(Error::Domain(format!("trace {trace} deviates from 1")));
        }
        let eig = matrix.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|&e| e < -STRUCT_TOL) {
            return Err(Error::Domain("density matrix has a negative eigenvalue".into()));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            matrix: psi.projector(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Seedable random source with independent streams.
///
/// Identical `(seed, stream_id)` reproduces the identical draw sequence.
/// Parallel consumers derive distinct streams via [`RandomSource::substream`],
/// which is a pure function of `(seed, stream_id, index)` so results do not
/// depend on scheduling.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ splitmix64(stream_id));
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derives an independent stream; deterministic in `(seed, stream_id, index)`.
    pub fn substream(&self, index: u64) -> Self {
        Self::with_stream(self.seed, splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(1))))
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Complex standard normal with unit total variance.
    pub fn complex_normal(&mut self) -> Complex64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(re, im) / 2.0_f64.sqrt()
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}

/// Ginibre matrix: i.i.d. complex standard normal entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut RandomSource) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.complex_normal())
}

/// Haar-distributed unitary via Ginibre + QR with the R-diagonal phase
/// correction (Q's columns are rescaled by `r_ii / |r_ii|`).
pub fn haar_unitary(d: usize, rng: &mut RandomSource) -> Result<CMatrix> {
    if d == 0 {
        return Err(Error::Dimension("haar_unitary requires d >= 1".into()));
    }
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::ONE
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Haar-distributed pure state: normalized complex Gaussian vector.
pub fn random_pure_state(d: usize, rng: &mut RandomSource) -> Result<PureState> {
    if d == 0 {
        return Err(Error::Dimension("random_pure_state requires d >= 1".into()));
    }
    loop {
        let v = CVector::from_fn(d, |_, _| rng.complex_normal());
        if let Ok(psi) = PureState::normalized(v) {
            return Ok(psi);
        }
    }
}

/// Random density matrix `G G^dag / tr(G G^dag)` with `G` complex Gaussian.
pub fn random_density_matrix(d: usize, rng: &mut RandomSource) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::Dimension("random_density_matrix requires d >= 1".into()));
    }
    let g = ginibre(d, d, rng);
    let mut m = &g * g.adjoint();
    let trace = m.trace();
    m /= trace;
    // Symmetrize away the last rounding bits.
    let m = (m.clone() + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(m)
}
