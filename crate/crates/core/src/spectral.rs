//! Dense linear-algebra kernel: symmetric eigendecomposition, range/nullspace
//! splitting, Kronecker products, the symmetrization operator and general
//! (nonsymmetric) eigenvalue computation.
//!
//! Everything here is a pure function of its inputs and safe to call from
//! multiple threads. Storage is dense `f64` throughout; the systems this crate
//! targets have a few hundred states at most.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default relative tolerance for rank decisions and definiteness verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Relative asymmetry above which a matrix is rejected as "not symmetric".
const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetrization operator: half the sum of a matrix and its transpose.
///
/// All eigenvalues of `a` have strictly negative real parts whenever the
/// symmetrized matrix is negative definite, which is what makes this the
/// workhorse of every stability test in the crate.
pub fn gamma(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    ensure_square(a)?;
    Ok((a + a.transpose()) * 0.5)
}

fn ensure_square(a: &DMatrix<f64>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

fn ensure_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn ensure_symmetric(a: &DMatrix<f64>) -> Result<()> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let scale = a.amax().max(1.0);
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in (i + 1)..a.ncols() {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    let asymmetry = worst / scale;
    if asymmetry > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asymmetry });
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in descending order together with the matching
/// orthonormal eigenvector columns, so `a * v = v * diag(w)`.
pub fn symmetric_eig(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    ensure_symmetric(a)?;
    let se = a.clone().symmetric_eigen();
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].total_cmp(&se.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).copy_from(&se.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

/// Eigenvalues only, unsorted, for a symmetric matrix.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    ensure_symmetric(a)?;
    Ok(a.clone().symmetric_eigenvalues().iter().copied().collect())
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue(a: &DMatrix<f64>) -> Result<f64> {
    let vals = symmetric_eigenvalues(a)?;
    Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
}

/// Definiteness verdict for a symmetric matrix.
///
/// Returns `(min_eigenvalue > tol, min_eigenvalue)`; the margin is reported
/// so callers can chart how far a configuration sits from the boundary.
pub fn is_positive_definite(a: &DMatrix<f64>, tol: f64) -> Result<(bool, f64)> {
    let min = min_symmetric_eigenvalue(a)?;
    Ok((min > tol, min))
}

/// The full complex spectrum of a square real matrix, sorted by
/// (real, imaginary) ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    values: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn from_values(mut values: Vec<Complex64>) -> Self {
        values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        Self { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_real_part(&self) -> f64 {
        self.values
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Eigenvalues whose modulus exceeds `threshold`.
    pub fn nonzero(&self, threshold: f64) -> impl Iterator<Item = Complex64> + '_ {
        self.values
            .iter()
            .copied()
            .filter(move |z| z.norm() > threshold)
    }

    /// Greedy nearest-neighbor matching distance against another multiset of
    /// the same size: both sides are already lexicographically sorted, each
    /// value is paired with the closest unused partner, and the largest pair
    /// distance is returned. Deterministic and adequate at desk scale.
    pub fn matching_distance(&self, other: &ComplexSpectrum) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
                context: "spectrum matching",
            });
        }
        let mut used = vec![false; other.len()];
        let mut worst = 0.0f64;
        for z in &self.values {
            let mut best = f64::INFINITY;
            let mut best_idx = usize::MAX;
            for (idx, w) in other.values.iter().enumerate() {
                if used[idx] {
                    continue;
                }
                let d = (z - w).norm();
                if d < best {
                    best = d;
                    best_idx = idx;
                }
            }
            used[best_idx] = true;
            worst = worst.max(best);
        }
        Ok(worst)
    }
}

impl Serialize for ComplexSpectrum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.values.len()))?;
        for z in &self.values {
            seq.serialize_element(&[z.re, z.im])?;
        }
        seq.end()
    }
}

/// Complex spectrum of a general square matrix, via the real Schur form.
///
/// Eigenvalues only; the stability theory never needs eigenvectors of the
/// nonsymmetric product matrices.
pub fn general_eig(a: &DMatrix<f64>) -> Result<ComplexSpectrum> {
    ensure_square(a)?;
    ensure_finite(a)?;
    let eig = a.complex_eigenvalues();
    Ok(ComplexSpectrum::from_values(eig.iter().copied().collect()))
}

/// Orthogonal split of a symmetric PSD matrix into range and nullspace.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    /// Orthonormal basis of the range (n x p), eigenvalue order descending.
    pub range_basis: DMatrix<f64>,
    /// The p positive eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal basis of the nullspace (n x (n - p)).
    pub null_basis: DMatrix<f64>,
    /// Number of eigenvalues counted as nonzero.
    pub rank: usize,
    /// Absolute threshold that separated zero from nonzero eigenvalues.
    pub tolerance_used: f64,
}

impl SpectralSplit {
    /// Reconstruction from the range part alone.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.eigenvalues.clone()));
        &self.range_basis * lambda * self.range_basis.transpose()
    }
}

/// Splits a symmetric positive-semidefinite matrix into its range and
/// nullspace. An eigenvalue counts as nonzero when it exceeds
/// `tol * max(1, lambda_max)`; anything below the negated threshold makes the
/// input indefinite and is rejected.
pub fn split_range_nullspace(l: &DMatrix<f64>, tol: f64) -> Result<SpectralSplit> {
    let (values, vectors) = symmetric_eig(l)?;
    let n = l.nrows();
    let lambda_max = values.first().copied().unwrap_or(0.0).max(0.0);
    let threshold = tol * lambda_max.max(1.0);
    if let Some(&min) = values.last() {
        if min < -threshold {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
    }
    let rank = values.iter().filter(|&&v| v > threshold).count();
    Ok(SpectralSplit {
        range_basis: vectors.columns(0, rank).into_owned(),
        eigenvalues: values[..rank].to_vec(),
        null_basis: vectors.columns(rank, n - rank).into_owned(),
        rank,
        tolerance_used: threshold,
    })
}

/// Kronecker product with the usual block layout.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// Matrix exponential by Pade approximation with scaling and squaring
/// (Higham's degree-13 scheme). Exact for the LTI propagators used by the
/// integrator, up to roundoff, regardless of whether the matrix is defective.
pub fn matrix_exponential(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), a.ncols(), "matrix exponential needs a square matrix");
    let norm = l1_norm(a);

    let (u, v, squarings) = if norm < 1.495_585_217_958_292e-2 {
        let (u, v) = pade3(a);
        (u, v, 0u32)
    } else if norm < 2.539_398_330_063_23e-1 {
        let (u, v) = pade5(a);
        (u, v, 0)
    } else if norm < 9.504_178_996_162_932e-1 {
        let (u, v) = pade7(a);
        (u, v, 0)
    } else if norm < 2.097_847_961_257_068 {
        let (u, v) = pade9(a);
        (u, v, 0)
    } else {
        const THETA_13: f64 = 5.371_920_351_148_152;
        let squarings = ((norm / THETA_13).log2().ceil().max(0.0)) as u32;
        let scaled = a * 2f64.powi(-(squarings as i32));
        let (u, v) = pade13(&scaled);
        (u, v, squarings)
    };

    let numer = &u + &v;
    let denom = &v - &u;
    let mut result = denom
        .lu()
        .solve(&numer)
        .expect("Pade denominator is nonsingular after scaling");
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

fn l1_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn pade3(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    const B: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
    let id = DMatrix::identity(a.nrows(), a.ncols());
    let a2 = a * a;
    let u = a * (&a2 * B[3] + &id * B[1]);
    let v = &a2 * B[2] + &id * B[0];
    (u, v)
}

fn pade5(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    const B: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
    let id = DMatrix::identity(a.nrows(), a.ncols());
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let u = a * (&a4 * B[5] + &a2 * B[3] + &id * B[1]);
    let v = &a4 * B[4] + &a2 * B[2] + &id * B[0];
    (u, v)
}

fn pade7(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    const B: [f64; 8] = [
        17_297_280.0,
        8_648_640.0,
        1_995_840.0,
        277_200.0,
        25_200.0,
        1_512.0,
        56.0,
        1.0,
    ];
    let id = DMatrix::identity(a.nrows(), a.ncols());
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u = a * (&a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &id * B[1]);
    let v = &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &id * B[0];
    (u, v)
}

fn pade9(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    const B: [f64; 10] = [
        17_643_225_600.0,
        8_821_612_800.0,
        2_075_673_600.0,
        302_702_400.0,
        30_270_240.0,
        2_162_160.0,
        110_880.0,
        3_960.0,
        90.0,
        1.0,
    ];
    let id = DMatrix::identity(a.nrows(), a.ncols());
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let a8 = &a6 * &a2;
    let u = a * (&a8 * B[9] + &a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &id * B[1]);
    let v = &a8 * B[8] + &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &id * B[0];
    (u, v)
}

fn pade13(a: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let id = DMatrix::identity(a.nrows(), a.ncols());
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &a6 * B[13] + &a4 * B[11] + &a2 * B[9];
    let u = a * (&a6 * inner_u + &a6 * B[7] + &a4 * B[5] + &a2 * B[3] + &id * B[1]);
    let inner_v = &a6 * B[12] + &a4 * B[10] + &a2 * B[8];
    let v = &a6 * inner_v + &a6 * B[6] + &a4 * B[4] + &a2 * B[2] + &id * B[0];
    (u, v)
}
