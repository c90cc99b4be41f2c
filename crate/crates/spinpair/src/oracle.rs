//! Brute-force numerical backend: dense matrix exponential and symmetric
//! eigendecomposition for small matrices.
//!
//! Every closed-form result in this crate — eigenvalue tables, propagators,
//! trajectory formulas — is validated in the test suite against direct
//! numerical evolution. That check is only meaningful if the numerics are
//! *independent* of the formulas they audit, so this module deliberately
//! hand-rolls the two classic algorithms instead of reusing any of the
//! analytic machinery:
//!
//! * [`expm`] — matrix exponential by scaling-and-squaring with a Taylor
//!   core. The input is scaled until its norm is at most 1/2, the series is
//!   summed to machine-negligible terms, and the result is squared back up.
//!   Backward-error target: 1e-13 for the matrix sizes used here.
//! * [`eig_symmetric`] — cyclic Jacobi rotations for real symmetric
//!   matrices. Provably convergent, and accurate to a small multiple of
//!   machine epsilon at order <= 8.
//!
//! Both operations are exposed through the [`OracleBackend`] trait so an
//! external linear-algebra backend could be swapped in without touching any
//! test; [`DenseOracle`] is the built-in implementation behind the free
//! functions.

use num_complex::Complex64;
use thiserror::Error;

/// Largest matrix order the oracle accepts. The relaxation problem needs 6.
pub const MAX_ORDER: usize = 8;

/// Errors from oracle operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    /// Requested order is zero or exceeds [`MAX_ORDER`].
    #[error("matrix order must be in 1..={MAX_ORDER}, got {0}")]
    InvalidDimension(usize),
    /// Two operands have different orders, or a vector length mismatches.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch {
        /// Order (or length) of the left operand.
        left: usize,
        /// Order (or length) of the right operand.
        right: usize,
    },
    /// An entry is NaN or infinite.
    #[error("matrix entries must be finite")]
    NotFinite,
    /// The matrix handed to the symmetric eigensolver is not real symmetric
    /// within the documented tolerance.
    #[error(
        "matrix is not real symmetric: max deviation {max_deviation:e} exceeds tolerance {tolerance:e}"
    )]
    NotSymmetric {
        /// Largest imaginary part or row/column asymmetry found.
        max_deviation: f64,
        /// Tolerance it was compared against (1e-12 of the largest entry).
        tolerance: f64,
    },
    /// The Jacobi sweep limit was reached before the off-diagonal mass
    /// vanished (should not happen for valid input).
    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence {
        /// Number of sweeps performed.
        sweeps: usize,
    },
    /// `exp(m*t)` is too large to represent (scaling exponent beyond range).
    #[error("matrix exponential overflows: ||m*t|| = {norm:e}")]
    Overflow {
        /// Frobenius norm of `m*t`.
        norm: f64,
    },
}

/// A dense complex matrix of order 1..=8, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl SmallMatrix {
    fn check_order(n: usize) -> Result<(), OracleError> {
        if n == 0 || n > MAX_ORDER {
            return Err(OracleError::InvalidDimension(n));
        }
        Ok(())
    }

    /// Zero matrix of order `n`.
    pub fn zeros(n: usize) -> Result<Self, OracleError> {
        Self::check_order(n)?;
        Ok(Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        })
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Result<Self, OracleError> {
        let mut m = Self::zeros(n)?;
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// Builds a matrix from complex rows. All rows must have the same length
    /// as the row count, and every entry must be finite.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, OracleError> {
        let n = rows.len();
        Self::check_order(n)?;
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(OracleError::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
            for &v in row {
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(OracleError::NotFinite);
                }
                data.push(v);
            }
        }
        Ok(Self { n, data })
    }

    /// Builds a matrix from real rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self, OracleError> {
        let complex_rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex_rows)
    }

    /// Matrix order.
    pub fn order(&self) -> usize {
        self.n
    }

    /// Entry at row `i`, column `j` (0-based). Panics if out of range.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        assert!(i < self.n && j < self.n, "index out of range");
        self.data[i * self.n + j]
    }

    /// Sets the entry at row `i`, column `j` (0-based). Panics if out of
    /// range.
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        assert!(i < self.n && j < self.n, "index out of range");
        self.data[i * self.n + j] = value;
    }

    /// The matrix multiplied by a real scalar.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&v| v * factor).collect(),
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Result<Self, OracleError> {
        if self.n != rhs.n {
            return Err(OracleError::DimensionMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        let n = self.n;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let aik = self.data[i * n + k];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Matrix sum `self + rhs`.
    pub fn add(&self, rhs: &Self) -> Result<Self, OracleError> {
        if self.n != rhs.n {
            return Err(OracleError::DimensionMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(rhs.data.iter())
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>, OracleError> {
        if v.len() != self.n {
            return Err(OracleError::DimensionMismatch {
                left: self.n,
                right: v.len(),
            });
        }
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                out[i] += self.data[i * n + j] * v[j];
            }
        }
        Ok(out)
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry-wise difference `|self - rhs|`.
    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64, OracleError> {
        if self.n != rhs.n {
            return Err(OracleError::DimensionMismatch {
                left: self.n,
                right: rhs.n,
            });
        }
        Ok(self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Result of a symmetric eigendecomposition: ascending eigenvalues with an
/// orthonormal eigenvector for each.
///
/// `eigenvectors[k]` is the (real) eigenvector belonging to
/// `eigenvalues[k]`; the vectors form an orthonormal set, so the original
/// matrix is `sum_k lambda_k v_k v_k^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEig {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Matching orthonormal eigenvectors, one `Vec<f64>` per eigenvalue.
    pub eigenvectors: Vec<Vec<f64>>,
}

/// The two oracle operations, as a trait so tests can run against a
/// different linear-algebra backend without modification.
pub trait OracleBackend {
    /// Matrix exponential `exp(m * t)`.
    fn expm(&self, m: &SmallMatrix, t: f64) -> Result<SmallMatrix, OracleError>;
    /// Eigendecomposition of a real symmetric matrix.
    fn eig_symmetric(&self, m: &SmallMatrix) -> Result<SymmetricEig, OracleError>;
}

/// Built-in dense backend (Taylor scaling-and-squaring + cyclic Jacobi).
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseOracle;

impl OracleBackend for DenseOracle {
    fn expm(&self, m: &SmallMatrix, t: f64) -> Result<SmallMatrix, OracleError> {
        if !m.is_finite() || !t.is_finite() {
            return Err(OracleError::NotFinite);
        }
        let n = m.order();
        let norm = m.frobenius_norm() * t.abs();
        if !norm.is_finite() {
            return Err(OracleError::Overflow { norm });
        }

        // Scale until ||m * t / 2^s|| <= 1/2 so the Taylor series converges
        // in a handful of terms with negligible truncation error.
        let mut squarings: u32 = 0;
        if norm > 0.5 {
            squarings = (norm / 0.5).log2().ceil() as u32;
            if squarings > 200 {
                return Err(OracleError::Overflow { norm });
            }
        }
        let scaled = m.scaled(t / f64::powi(2.0, squarings as i32));

        // Taylor core: sum_k x^k / k! until the next term is negligible
        // relative to the running sum. With ||x|| <= 1/2 this terminates
        // around k = 18 at the 1e-20 threshold.
        let mut sum = SmallMatrix::identity(n)?;
        let mut term = SmallMatrix::identity(n)?;
        for k in 1..=40u32 {
            term = term.mul(&scaled)?.scaled(1.0 / f64::from(k));
            sum = sum.add(&term)?;
            if term.frobenius_norm() <= 1e-20 * sum.frobenius_norm() {
                break;
            }
        }

        // Undo the scaling by repeated squaring.
        let mut result = sum;
        for _ in 0..squarings {
            result = result.mul(&result)?;
        }
        if !result.is_finite() {
            return Err(OracleError::Overflow { norm });
        }
        Ok(result)
    }

    fn eig_symmetric(&self, m: &SmallMatrix) -> Result<SymmetricEig, OracleError> {
        let n = m.order();
        if !m.is_finite() {
            return Err(OracleError::NotFinite);
        }

        // Reject matrices that are not real symmetric within 1e-12 of the
        // largest entry magnitude (relative, since spectral-density matrices
        // live at the 1e-12 s scale).
        let scale = m.max_abs_entry();
        let tolerance = 1e-12 * scale;
        let mut max_deviation: f64 = 0.0;
        let mut a = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j);
                max_deviation = max_deviation.max(v.im.abs());
                a[i][j] = v.re;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                max_deviation = max_deviation.max((a[i][j] - a[j][i]).abs());
            }
        }
        if max_deviation > tolerance {
            return Err(OracleError::NotSymmetric {
                max_deviation,
                tolerance,
            });
        }
        // Symmetrize exactly so rounding in the input cannot bias the sweep.
        for i in 0..n {
            for j in (i + 1)..n {
                let s = 0.5 * (a[i][j] + a[j][i]);
                a[i][j] = s;
                a[j][i] = s;
            }
        }

        // Cyclic Jacobi: rotate away each off-diagonal entry in turn until
        // the total off-diagonal mass is negligible relative to the norm.
        let mut v = vec![vec![0.0f64; n]; n];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let fro = a
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        let target = 1e-15 * fro.max(f64::MIN_POSITIVE);
        const MAX_SWEEPS: usize = 60;
        let mut converged = false;
        for _sweep in 0..MAX_SWEEPS {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += a[i][j] * a[i][j];
                    }
                }
            }
            if off.sqrt() <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = a[p][q];
                    if apq == 0.0 {
                        continue;
                    }
                    // Stable rotation angle: tan(theta) from the smaller
                    // root of t^2 + 2*tau*t - 1 = 0.
                    let tau = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // A <- J^T A J with the rotation J in the (p, q) plane.
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    // Accumulate V <- V J; columns of V are eigenvectors.
                    for row in v.iter_mut() {
                        let vp = row[p];
                        let vq = row[q];
                        row[p] = c * vp - s * vq;
                        row[q] = s * vp + c * vq;
                    }
                }
            }
        }
        if !converged {
            return Err(OracleError::NoConvergence { sweeps: MAX_SWEEPS });
        }

        // Extract, sort ascending, and emit eigenvectors as rows.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).expect("finite eigenvalues"));
        let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k][k]).collect();
        let eigenvectors: Vec<Vec<f64>> = order
            .iter()
            .map(|&k| (0..n).map(|i| v[i][k]).collect())
            .collect();
        Ok(SymmetricEig {
            eigenvalues,
            eigenvectors,
        })
    }
}

/// Matrix exponential `exp(m * t)` via the built-in [`DenseOracle`].
pub fn expm(m: &SmallMatrix, t: f64) -> Result<SmallMatrix, OracleError> {
    DenseOracle.expm(m, t)
}

/// Symmetric eigendecomposition via the built-in [`DenseOracle`].
pub fn eig_symmetric(m: &SmallMatrix) -> Result<SymmetricEig, OracleError> {
    DenseOracle.eig_symmetric(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha12Rng) -> SmallMatrix {
        let mut rows = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in i..n {
                let x = rng.gen_range(-1.0..1.0);
                rows[i][j] = x;
                rows[j][i] = x;
            }
        }
        SmallMatrix::from_real_rows(&rows).unwrap()
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z = SmallMatrix::zeros(5).unwrap();
        let e = expm(&z, 3.7).unwrap();
        let id = SmallMatrix::identity(5).unwrap();
        assert_eq!(e.max_abs_diff(&id).unwrap(), 0.0);
    }

    #[test]
    fn expm_of_diagonal_exponentiates_entries() {
        let mut m = SmallMatrix::zeros(4).unwrap();
        let d = [-2.0, -0.5, 0.3, 1.7];
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        let t = 0.9;
        let e = expm(&m, t).unwrap();
        for (i, &x) in d.iter().enumerate() {
            let want = (x * t).exp();
            assert!((e.get(i, i).re - want).abs() <= 1e-13 * want.abs());
            assert!(e.get(i, i).im.abs() <= 1e-15);
        }
    }

    #[test]
    fn expm_agrees_with_eigendecomposition_reconstruction() {
        // Independent cross-validation of the two oracle paths:
        // exp(M t) = V diag(exp(lambda t)) V^T for symmetric M.
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..20 {
            let m = random_symmetric(6, &mut rng);
            let t = rng.gen_range(0.1..3.0);
            let e = expm(&m, t).unwrap();
            let eig = eig_symmetric(&m).unwrap();
            let mut rebuilt = SmallMatrix::zeros(6).unwrap();
            for k in 0..6 {
                let w = (eig.eigenvalues[k] * t).exp();
                for i in 0..6 {
                    for j in 0..6 {
                        let add = w * eig.eigenvectors[k][i] * eig.eigenvectors[k][j];
                        let cur = rebuilt.get(i, j);
                        rebuilt.set(i, j, cur + Complex64::new(add, 0.0));
                    }
                }
            }
            let err = e.max_abs_diff(&rebuilt).unwrap();
            assert!(err <= 1e-11, "reconstruction error {err:e}");
        }
    }

    #[test]
    fn expm_semigroup_property() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m = random_symmetric(5, &mut rng);
            let (t1, t2) = (rng.gen_range(0.0..1.5), rng.gen_range(0.0..1.5));
            let whole = expm(&m, t1 + t2).unwrap();
            let split = expm(&m, t1).unwrap().mul(&expm(&m, t2).unwrap()).unwrap();
            assert!(whole.max_abs_diff(&split).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn expm_trace_matches_eigenvalue_sum() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for _ in 0..20 {
            let m = random_symmetric(6, &mut rng);
            let t = rng.gen_range(0.0..2.0);
            let e = expm(&m, t).unwrap();
            let trace: f64 = (0..6).map(|i| e.get(i, i).re).sum();
            let want: f64 = eig_symmetric(&m)
                .unwrap()
                .eigenvalues
                .iter()
                .map(|l| (l * t).exp())
                .sum();
            assert!((trace - want).abs() <= 1e-10 * want.abs().max(1.0));
        }
    }

    #[test]
    fn eig_of_identity_is_all_ones() {
        let id = SmallMatrix::identity(6).unwrap();
        let eig = eig_symmetric(&id).unwrap();
        for l in &eig.eigenvalues {
            assert!((l - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn eig_of_diagonal_sorts_and_returns_coordinate_vectors() {
        let mut m = SmallMatrix::zeros(6).unwrap();
        let d = [5.0, 1.0, 3.0, 6.0, 2.0, 4.0];
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, Complex64::new(x, 0.0));
        }
        let eig = eig_symmetric(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        // Eigenvector for eigenvalue 1.0 must be +-e_1 (index 1 in d).
        let v = &eig.eigenvectors[0];
        assert!((v[1].abs() - 1.0).abs() <= 1e-14);
        for (i, &x) in v.iter().enumerate() {
            if i != 1 {
                assert!(x.abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn eig_rejects_unsymmetric_input() {
        let m = SmallMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert!(matches!(
            eig_symmetric(&m),
            Err(OracleError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn eig_rejects_complex_input() {
        let mut m = SmallMatrix::identity(3).unwrap();
        m.set(0, 1, Complex64::new(0.0, 0.5));
        m.set(1, 0, Complex64::new(0.0, 0.5));
        assert!(matches!(
            eig_symmetric(&m),
            Err(OracleError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn eig_residuals_and_orthonormality_on_random_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(101);
        for _ in 0..50 {
            let n = rng.gen_range(2..=8);
            let m = random_symmetric(n, &mut rng);
            let norm = m.frobenius_norm();
            let eig = eig_symmetric(&m).unwrap();
            // Ascending order.
            for w in eig.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
            for k in 0..n {
                // Residual ||M v - lambda v|| <= 1e-11 ||M||.
                let v: Vec<Complex64> = eig.eigenvectors[k]
                    .iter()
                    .map(|&x| Complex64::new(x, 0.0))
                    .collect();
                let mv = m.mul_vec(&v).unwrap();
                let res: f64 = mv
                    .iter()
                    .zip(&eig.eigenvectors[k])
                    .map(|(&mvi, &vi)| (mvi.re - eig.eigenvalues[k] * vi).powi(2))
                    .sum::<f64>()
                    .sqrt();
                assert!(res <= 1e-11 * norm.max(1.0), "residual {res:e}");
                // Orthonormality.
                for l in 0..n {
                    let dot: f64 = eig.eigenvectors[k]
                        .iter()
                        .zip(&eig.eigenvectors[l])
                        .map(|(a, b)| a * b)
                        .sum();
                    let want = if k == l { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() <= 1e-11);
                }
            }
        }
    }

    #[test]
    fn tiny_scale_matrices_are_handled() {
        // Entries at the spectral-density scale (1e-12) must not trip
        // absolute thresholds anywhere.
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let m = random_symmetric(6, &mut rng).scaled(1e-12);
        let eig = eig_symmetric(&m).unwrap();
        let e = expm(&m, 1e11).unwrap();
        assert!(e.is_finite());
        assert!(eig.eigenvalues.iter().all(|l| l.abs() < 1e-11));
    }

    #[test]
    fn dimension_limits_are_enforced() {
        assert!(matches!(
            SmallMatrix::zeros(0),
            Err(OracleError::InvalidDimension(0))
        ));
        assert!(matches!(
            SmallMatrix::zeros(9),
            Err(OracleError::InvalidDimension(9))
        ));
        let a = SmallMatrix::zeros(3).unwrap();
        let b = SmallMatrix::zeros(4).unwrap();
        assert!(matches!(
            a.mul(&b),
            Err(OracleError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        let rows = vec![vec![f64::NAN, 0.0], vec![0.0, 1.0]];
        assert!(matches!(
            SmallMatrix::from_real_rows(&rows),
            Err(OracleError::NotFinite)
        ));
    }
}
