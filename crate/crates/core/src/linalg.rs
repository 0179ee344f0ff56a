//! Hermitian eigendecomposition, numerical rank, positivity tests and matrix
//! square roots.
//!
//! Every rank or positivity decision in the crate goes through the thresholds
//! in [`ToleranceConfig`]. Eigenvalues and singular values are computed with
//! nalgebra's Householder/implicit-QR routines, which are deterministic for a
//! fixed input.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Numerical thresholds that turn exact rank and positivity statements into
/// floating-point decisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values above `rank_tol * σ_max` count towards the rank.
    pub rank_tol: f64,
    /// Eigenvalues above `-psd_tol * max(1, tr H)` count as non-negative.
    pub psd_tol: f64,
    /// Bound on relative commutator norms (and Hermitian defects).
    pub comm_tol: f64,
    /// Bound on relative Frobenius reconstruction residuals.
    pub recon_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { rank_tol: 1e-10, psd_tol: 1e-10, comm_tol: 1e-10, recon_tol: 1e-8 }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.rank_tol, self.psd_tol, self.comm_tol, self.recon_tol];
        if all.iter().all(|t| t.is_finite() && *t > 0.0) {
            Ok(())
        } else {
            Err(Error::Format(format!("tolerances must be finite and strictly positive: {self:?}")))
        }
    }

    /// Absolute floor for eigenvalues of a matrix with the given trace.
    pub fn psd_floor(&self, trace: f64) -> f64 {
        self.psd_tol * trace.max(1.0)
    }
}

/// Eigenvalues in ascending order with a unitary matrix of eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector for `eigenvalues[k]`.
    pub basis: ComplexMatrix,
}

impl EigenSystem {
    /// `basis · diag(λ) · basis†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.basis[(i, j)] * self.eigenvalues[j]);
        &scaled * &self.basis.adjoint()
    }

    /// Applies `g` to the spectrum: `basis · diag(g(λ)) · basis†`.
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let vals: Vec<f64> = self.eigenvalues.iter().map(|&l| g(l)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.basis[(i, j)] * vals[j]);
        &scaled * &self.basis.adjoint()
    }
}

fn ensure_square(h: &ComplexMatrix) -> Result<()> {
    if h.is_square() {
        Ok(())
    } else {
        Err(Error::NonSquare { rows: h.rows(), cols: h.cols() })
    }
}

fn ensure_hermitian(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<()> {
    ensure_square(h)?;
    let defect = h.hermitian_defect();
    if defect > tol.comm_tol {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized before
/// decomposition, so asymmetry within `comm_tol` is tolerated.
pub fn hermitian_eig(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<EigenSystem> {
    ensure_hermitian(h, tol)?;
    let n = h.rows();
    if n == 0 {
        return Ok(EigenSystem { eigenvalues: Vec::new(), basis: ComplexMatrix::zeros(0, 0) });
    }
    let sym = h.hermitian_part().to_nalgebra();
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, 100_000).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_nalgebra(&eig.eigenvectors);
    Ok(EigenSystem { eigenvalues, basis: vectors.select_columns(&order) })
}

/// Singular values in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let svd = nalgebra::SVD::new(m.to_nalgebra(), false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values exceeding `rank_tol` times the largest one.
pub fn numerical_rank(m: &ComplexMatrix, tol: &ToleranceConfig) -> usize {
    let s = singular_values(m);
    let Some(&smax) = s.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > tol.rank_tol * smax).count()
}

/// Outcome of a positive-semidefiniteness test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub min_eig: f64,
    pub ok: bool,
}

/// PSD test: `ok` iff the smallest eigenvalue is at least
/// `-psd_tol * max(1, tr H)`.
pub fn psd_check(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<PsdVerdict> {
    let eig = hermitian_eig(h, tol)?;
    let min_eig = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let floor = tol.psd_floor(h.trace().re);
    Ok(PsdVerdict { ok: min_eig >= -floor, min_eig })
}

/// `(H^{-1/2}, H^{1/2})` for a Hermitian positive-definite `H`.
pub fn inv_sqrt(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let eig = hermitian_eig(h, tol)?;
    let min_eig = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min_eig <= tol.psd_floor(h.trace().re) {
        return Err(Error::NotPositiveDefinite(min_eig));
    }
    Ok((eig.map_spectrum(|l| 1.0 / l.sqrt()), eig.map_spectrum(f64::sqrt)))
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
/// Eigenvalues within the PSD floor are clamped to zero.
pub fn sqrt_psd(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(h, tol)?;
    let min_eig = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min_eig < -tol.psd_floor(h.trace().re) {
        return Err(Error::NotPositiveDefinite(min_eig));
    }
    Ok(eig.map_spectrum(|l| l.max(0.0).sqrt()))
}

/// Gram–Schmidt on the columns of `m`, in order. Returns `None` if a column is
/// (numerically) dependent on the preceding ones.
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.column_vec(j);
        let orig = crate::matrix::vec_norm(&v);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &q {
                let p = crate::matrix::inner(u, &v);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= p * ui;
                }
            }
        }
        let norm = crate::matrix::vec_norm(&v);
        if orig == 0.0 || norm <= 1e-10 * orig {
            return None;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        q.push(v);
    }
    Some(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}
