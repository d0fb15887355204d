//! Dense symmetric matrices with role tags, plus the factorizations and
//! norms the estimators are built on.
//!
//! Everything here is dense `f64`; the problem sizes of interest (p up to
//! the low thousands) do not justify sparse storage.

use ndarray::{Array1, Array2};

use crate::error::{GelatoError, Result};

/// What a symmetric matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixRole {
    Covariance,
    Correlation,
    Precision,
}

impl MatrixRole {
    /// Role of the inverse of a matrix with this role.
    pub fn inverse_role(self) -> MatrixRole {
        match self {
            MatrixRole::Covariance | MatrixRole::Correlation => MatrixRole::Precision,
            MatrixRole::Precision => MatrixRole::Covariance,
        }
    }
}

/// Symmetric p x p matrix. Construction symmetrizes via (M + M^T)/2 and
/// rejects inputs whose relative asymmetry exceeds 1e-8.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    entries: Array2<f64>,
    role: MatrixRole,
    asymmetry: f64,
}

const ASYMMETRY_TOL: f64 = 1e-8;
const CORRELATION_DIAG_TOL: f64 = 1e-12;

impl SymMatrix {
    pub fn new(entries: Array2<f64>, role: MatrixRole) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c {
            return Err(GelatoError::DimensionMismatch { expected: r, got: c });
        }
        if r == 0 {
            return Err(GelatoError::Config("empty matrix".into()));
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut max_gap = 0.0f64;
        let mut sym = entries;
        for i in 0..r {
            for j in (i + 1)..r {
                let gap = (sym[(i, j)] - sym[(j, i)]).abs();
                max_gap = max_gap.max(gap);
                let avg = 0.5 * (sym[(i, j)] + sym[(j, i)]);
                sym[(i, j)] = avg;
                sym[(j, i)] = avg;
            }
        }
        let asymmetry = if scale > 0.0 { max_gap / scale } else { 0.0 };
        if asymmetry > ASYMMETRY_TOL {
            return Err(GelatoError::AsymmetricInput { asymmetry });
        }
        if role == MatrixRole::Correlation {
            for i in 0..r {
                if (sym[(i, i)] - 1.0).abs() > CORRELATION_DIAG_TOL {
                    return Err(GelatoError::Config(format!(
                        "correlation matrix must have unit diagonal; entry {} is {}",
                        i,
                        sym[(i, i)]
                    )));
                }
            }
        }
        Ok(SymMatrix { entries: sym, role, asymmetry })
    }

    pub fn from_fn(p: usize, role: MatrixRole, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        SymMatrix::new(Array2::from_shape_fn((p, p), |(i, j)| f(i, j)), role)
    }

    pub fn identity(p: usize, role: MatrixRole) -> SymMatrix {
        SymMatrix {
            entries: Array2::eye(p),
            role,
            asymmetry: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn role(&self) -> MatrixRole {
        self.role
    }

    /// Asymmetry magnitude recorded at construction (relative to the
    /// largest absolute entry).
    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Re-tag without touching the entries; correlation re-tags are
    /// validated.
    pub fn with_role(self, role: MatrixRole) -> Result<SymMatrix> {
        SymMatrix::new(self.entries, role)
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)]).collect()
    }
}

/// Lower-triangular Cholesky factor L with m = L L^T.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    lower: Array2<f64>,
}

/// Cholesky factorization of a symmetric positive definite matrix.
/// Fails with the index of the first nonpositive pivot.
pub fn cholesky(m: &SymMatrix) -> Result<CholeskyFactor> {
    cholesky_raw(m.entries())
}

pub(crate) fn cholesky_raw(a: &Array2<f64>) -> Result<CholeskyFactor> {
    let p = a.nrows();
    let mut l = Array2::<f64>::zeros((p, p));
    for j in 0..p {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(GelatoError::NotPositiveDefinite { pivot: j });
        }
        let dj = d.sqrt();
        l[(j, j)] = dj;
        for i in (j + 1)..p {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / dj;
        }
    }
    Ok(CholeskyFactor { lower: l })
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.lower.nrows()
    }

    pub fn lower(&self) -> &Array2<f64> {
        &self.lower
    }

    /// log det(L L^T) = 2 sum_i log L_ii.
    pub fn log_det(&self) -> f64 {
        (0..self.dim()).map(|i| self.lower[(i, i)].ln()).sum::<f64>() * 2.0
    }

    /// Smallest diagonal pivot L_ii^2; a practical near-singularity probe.
    pub fn min_pivot(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.lower[(i, i)] * self.lower[(i, i)])
            .fold(f64::INFINITY, f64::min)
    }

    /// Solve (L L^T) x = b by forward/backward substitution.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let p = self.dim();
        debug_assert_eq!(b.len(), p);
        let mut x = b.to_vec();
        for i in 0..p {
            for k in 0..i {
                x[i] -= self.lower[(i, k)] * x[k];
            }
            x[i] /= self.lower[(i, i)];
        }
        for i in (0..p).rev() {
            for k in (i + 1)..p {
                x[i] -= self.lower[(k, i)] * x[k];
            }
            x[i] /= self.lower[(i, i)];
        }
        x
    }

    /// Inverse of the factored matrix via p triangular solves.
    pub fn inverse(&self) -> Array2<f64> {
        let p = self.dim();
        let mut inv = Array2::<f64>::zeros((p, p));
        let mut e = vec![0.0; p];
        for j in 0..p {
            e[j] = 1.0;
            let col = self.solve(&e);
            e[j] = 0.0;
            for i in 0..p {
                inv[(i, j)] = col[i];
            }
        }
        // kill rounding asymmetry
        for i in 0..p {
            for j in (i + 1)..p {
                let avg = 0.5 * (inv[(i, j)] + inv[(j, i)]);
                inv[(i, j)] = avg;
                inv[(j, i)] = avg;
            }
        }
        inv
    }

    /// L L^T, for reconstruction checks.
    pub fn reconstruct(&self) -> Array2<f64> {
        self.lower.dot(&self.lower.t())
    }

    /// Draw x = L z for a standard normal vector z.
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        let p = self.dim();
        let mut x = vec![0.0; p];
        for i in 0..p {
            let mut s = 0.0;
            for k in 0..=i {
                s += self.lower[(i, k)] * z[k];
            }
            x[i] = s;
        }
        x
    }
}

/// log det of a symmetric positive definite matrix.
pub fn log_det(m: &SymMatrix) -> Result<f64> {
    Ok(cholesky(m)?.log_det())
}

/// Inverse of a symmetric positive definite matrix. The result role is the
/// natural counterpart (covariance/correlation -> precision and back).
pub fn inverse(m: &SymMatrix) -> Result<SymMatrix> {
    let inv = cholesky(m)?.inverse();
    SymMatrix::new(inv, m.role().inverse_role())
}

/// Largest absolute eigenvalue via power iteration on m*m, which is
/// insensitive to the sign of the extreme eigenvalue. Starts from the
/// normalized all-ones vector; if that start lands in the kernel, falls
/// back to coordinate vectors.
pub fn operator_norm(m: &SymMatrix) -> Result<f64> {
    let p = m.dim();
    let a = m.entries();
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }

    let starts = std::iter::once(Array1::from_elem(p, (p as f64).sqrt().recip()))
        .chain((0..p).map(|k| {
            let mut e = Array1::zeros(p);
            e[k] = 1.0;
            e
        }));
    for mut v in starts {
        let w = a.dot(&a.dot(&v));
        let norm = w.dot(&w).sqrt();
        if norm <= scale * scale * 1e-14 {
            continue; // start vector annihilated; try the next one
        }
        let mut prev = f64::NAN;
        for _ in 0..10_000 {
            let w = a.dot(&a.dot(&v));
            let mu = v.dot(&w); // Rayleigh quotient of m*m
            let norm = w.dot(&w).sqrt();
            if norm == 0.0 {
                return Ok(0.0);
            }
            v = w / norm;
            if prev.is_finite() && (mu - prev).abs() < 1e-10 * mu.abs().max(f64::MIN_POSITIVE) {
                return Ok(mu.max(0.0).sqrt());
            }
            prev = mu;
        }
        return Err(GelatoError::NumericFailure(
            "power iteration did not converge within 10000 iterations".into(),
        ));
    }
    // every start annihilated by m*m => m = 0, handled above
    Ok(0.0)
}

/// Frobenius norm of a - b.
pub fn frobenius_diff(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(GelatoError::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let mut s = 0.0;
    for (x, y) in a.entries().iter().zip(b.entries().iter()) {
        let d = x - y;
        s += d * d;
    }
    Ok(s.sqrt())
}

/// Frobenius norm of a matrix.
pub fn frobenius_norm(a: &Array2<f64>) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// All eigenvalues of a symmetric matrix by the cyclic Jacobi method,
/// sorted ascending. Used by the model generators and diagnostics where the
/// full spectrum (not just the extreme one) is needed.
pub fn jacobi_eigenvalues(m: &SymMatrix) -> Vec<f64> {
    jacobi_eigenvalues_raw(m.entries())
}

pub(crate) fn jacobi_eigenvalues_raw(m: &Array2<f64>) -> Vec<f64> {
    let p = m.nrows();
    let mut a = m.clone();
    let scale = a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 || p == 1 {
        return (0..p).map(|i| a[(i, i)]).collect();
    }
    let tol = 1e-14 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..p {
            for j in (i + 1)..p {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = a[(i, j)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let theta = (a[(j, j)] - a[(i, i)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let aki = a[(k, i)];
                    let akj = a[(k, j)];
                    a[(k, i)] = c * aki - s * akj;
                    a[(k, j)] = s * aki + c * akj;
                }
                for k in 0..p {
                    let aik = a[(i, k)];
                    let ajk = a[(j, k)];
                    a[(i, k)] = c * aik - s * ajk;
                    a[(j, k)] = s * aik + c * ajk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..p).map(|i| a[(i, i)]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_symmetric(p: usize, seed: u64) -> SymMatrix {
        SymMatrix::from_fn(p, MatrixRole::Covariance, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            let x = (a * 31 + b * 17 + seed as usize * 101) as f64;
            (x * 12.9898).sin() * 2.0
        })
        .unwrap()
    }

    fn random_pd(p: usize, seed: u64) -> SymMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let g = Array2::from_shape_fn((p + 3, p), |_| rng.sample::<f64, _>(rand_distr::StandardNormal));
        let s = g.t().dot(&g) / (p + 3) as f64 + Array2::<f64>::eye(p) * 0.1;
        SymMatrix::new(s, MatrixRole::Covariance).unwrap()
    }

    #[test]
    fn constructor_symmetrizes_and_records_asymmetry() {
        let m = SymMatrix::new(array![[1.0, 2.0 + 1e-12], [2.0, 3.0]], MatrixRole::Covariance)
            .unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!(m.asymmetry() > 0.0 && m.asymmetry() < 1e-8);
    }

    #[test]
    fn constructor_rejects_gross_asymmetry() {
        let err = SymMatrix::new(array![[1.0, 2.0], [1.0, 3.0]], MatrixRole::Covariance);
        assert!(matches!(err, Err(GelatoError::AsymmetricInput { .. })));
    }

    #[test]
    fn correlation_role_requires_unit_diagonal() {
        let err = SymMatrix::new(array![[2.0, 0.0], [0.0, 1.0]], MatrixRole::Correlation);
        assert!(matches!(err, Err(GelatoError::Config(_))));
    }

    #[test]
    fn operator_norm_identity() {
        let m = SymMatrix::identity(4, MatrixRole::Covariance);
        assert_relative_eq!(operator_norm(&m).unwrap(), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn operator_norm_diagonal_spectrum() {
        let m = SymMatrix::from_fn(3, MatrixRole::Covariance, |i, j| {
            if i != j {
                0.0
            } else {
                [3.0, -5.0, 1.0][i]
            }
        })
        .unwrap();
        assert_relative_eq!(operator_norm(&m).unwrap(), 5.0, max_relative = 1e-9);
    }

    #[test]
    fn operator_norm_survives_all_ones_kernel() {
        // all-ones start vector is in the kernel of this matrix
        let m = SymMatrix::new(array![[1.0, -1.0], [-1.0, 1.0]], MatrixRole::Covariance).unwrap();
        assert_relative_eq!(operator_norm(&m).unwrap(), 2.0, max_relative = 1e-9);
    }

    #[test]
    fn operator_norm_matches_jacobi_oracle() {
        let m = random_symmetric(6, 7);
        let eig = jacobi_eigenvalues(&m);
        let oracle = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert_relative_eq!(operator_norm(&m).unwrap(), oracle, max_relative = 1e-7);
    }

    #[test]
    fn operator_norm_of_zero_matrix() {
        let m = SymMatrix::from_fn(3, MatrixRole::Covariance, |_, _| 0.0).unwrap();
        assert_eq!(operator_norm(&m).unwrap(), 0.0);
    }

    #[test]
    fn frobenius_diff_basics() {
        let a = SymMatrix::identity(2, MatrixRole::Covariance);
        let b = SymMatrix::from_fn(2, MatrixRole::Covariance, |_, _| 0.0).unwrap();
        assert_eq!(frobenius_diff(&a, &a).unwrap(), 0.0);
        assert_relative_eq!(frobenius_diff(&a, &b).unwrap(), 2.0f64.sqrt());
        let c = SymMatrix::identity(3, MatrixRole::Covariance);
        assert!(frobenius_diff(&a, &c).is_err());
    }

    #[test]
    fn frobenius_diff_matches_loop_oracle() {
        let a = random_symmetric(5, 1);
        let b = random_symmetric(5, 2);
        let mut s = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                let d = a.get(i, j) - b.get(i, j);
                s += d * d;
            }
        }
        assert_relative_eq!(frobenius_diff(&a, &b).unwrap(), s.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn cholesky_identity_and_logdet() {
        let m = SymMatrix::identity(3, MatrixRole::Covariance);
        let f = cholesky(&m).unwrap();
        assert_eq!(f.lower(), &Array2::<f64>::eye(3));
        assert_eq!(f.log_det(), 0.0);

        let d = SymMatrix::new(array![[4.0, 0.0], [0.0, 9.0]], MatrixRole::Covariance).unwrap();
        assert_relative_eq!(log_det(&d).unwrap(), 36.0f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn cholesky_reports_failing_pivot() {
        let m = SymMatrix::new(array![[1.0, 0.0], [0.0, -2.0]], MatrixRole::Covariance).unwrap();
        match cholesky(&m) {
            Err(GelatoError::NotPositiveDefinite { pivot }) => assert_eq!(pivot, 1),
            other => panic!("expected pivot failure, got {other:?}"),
        }
    }

    /// Gauss-Jordan inversion, the independent oracle for `inverse`.
    fn gauss_jordan(a: &Array2<f64>) -> Array2<f64> {
        let p = a.nrows();
        let mut m = a.clone();
        let mut inv = Array2::<f64>::eye(p);
        for col in 0..p {
            let mut piv = col;
            for r in (col + 1)..p {
                if m[(r, col)].abs() > m[(piv, col)].abs() {
                    piv = r;
                }
            }
            if piv != col {
                for c in 0..p {
                    m.swap((col, c), (piv, c));
                    inv.swap((col, c), (piv, c));
                }
            }
            let d = m[(col, col)];
            for c in 0..p {
                m[(col, c)] /= d;
                inv[(col, c)] /= d;
            }
            for r in 0..p {
                if r != col {
                    let f = m[(r, col)];
                    for c in 0..p {
                        m[(r, c)] -= f * m[(col, c)];
                        inv[(r, c)] -= f * inv[(col, c)];
                    }
                }
            }
        }
        inv
    }

    #[test]
    fn inverse_ar1_matches_gauss_jordan_oracle() {
        let m = SymMatrix::from_fn(5, MatrixRole::Covariance, |i, j| {
            0.9f64.powi((i as i32 - j as i32).abs())
        })
        .unwrap();
        let inv = inverse(&m).unwrap();
        let oracle = gauss_jordan(m.entries());
        for i in 0..5 {
            for j in 0..5 {
                assert!((inv.get(i, j) - oracle[(i, j)]).abs() < 1e-9);
            }
        }
        assert_eq!(inv.role(), MatrixRole::Precision);
        // inverse(m) * m = I to 1e-8
        let prod = inv.entries().dot(m.entries());
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn jacobi_diagonal_case() {
        let m = SymMatrix::from_fn(3, MatrixRole::Covariance, |i, j| {
            if i == j {
                [2.0, -1.0, 7.0][i]
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(jacobi_eigenvalues(&m), vec![-1.0, 2.0, 7.0]);
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        // eigenvalues of [[2,1],[1,2]] are 1 and 3
        let m = SymMatrix::new(array![[2.0, 1.0], [1.0, 2.0]], MatrixRole::Covariance).unwrap();
        let eig = jacobi_eigenvalues(&m);
        assert_relative_eq!(eig[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(eig[1], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn cholesky_reconstructs_pd_matrices() {
        for seed in 0..5 {
            let m = random_pd(6, seed);
            let f = cholesky(&m).unwrap();
            let rec = f.reconstruct();
            let scale = frobenius_norm(m.entries()).max(1.0);
            let gap: f64 = m
                .entries()
                .iter()
                .zip(rec.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(gap / scale < 1e-10, "reconstruction gap {gap}");
        }
    }

    #[test]
    fn logdet_of_inverse_negates() {
        for seed in 0..5 {
            let m = random_pd(5, 100 + seed);
            let inv = inverse(&m).unwrap();
            assert!((log_det(&inv).unwrap() + log_det(&m).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn operator_norm_below_frobenius() {
        let zero = SymMatrix::from_fn(6, MatrixRole::Covariance, |_, _| 0.0).unwrap();
        for seed in 0..5 {
            let m = random_symmetric(6, seed);
            let op = operator_norm(&m).unwrap();
            let fro = frobenius_diff(&m, &zero).unwrap();
            assert!(op <= fro + 1e-10);
        }
    }
}
