//! Index arithmetic on `C² ⊗ C^M ⊗ C^N`.
//!
//! Composite indices follow `i = a·(M·N) + b·N + c`: subsystem A is slowest and
//! C fastest, so the state splits into contiguous `N×N` tiles addressed by the
//! pair `(a, b)`.

use std::ops::BitOr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, ToleranceConfig};
use crate::matrix::{vec_norm, ComplexMatrix, ZERO};

/// `X ⊗ Y`, with `(X⊗Y)[i·rY + k, j·cY + l] = X[i,j]·Y[k,l]`.
pub fn kron(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    let (ry, cy) = (y.rows(), y.cols());
    ComplexMatrix::from_fn(x.rows() * ry, x.cols() * cy, |r, c| x[(r / ry, c / cy)] * y[(r % ry, c % cy)])
}

/// `u ⊗ v` for vectors.
pub fn kron_vec(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    u.iter().flat_map(|&a| v.iter().map(move |&b| a * b)).collect()
}

/// A subset of the three subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Subsystems(u8);

impl Subsystems {
    pub const NONE: Self = Self(0);
    pub const A: Self = Self(1);
    pub const B: Self = Self(2);
    pub const C: Self = Self(4);
    pub const ALL: Self = Self(7);

    pub fn contains(self, other: Self) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn complement(self) -> Self {
        Self(!self.0 & 7)
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Every subset, `NONE` through `ALL`.
    pub fn all_subsets() -> impl Iterator<Item = Self> {
        (0u8..8).map(Self)
    }
}

impl BitOr for Subsystems {
    type Output = Self;

    fn bitor(self, rhs: Self) -> Self {
        Self(self.0 | rhs.0)
    }
}

/// Address of an `N×N` tile: qubit index `a` and qudit index `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BlockAddress {
    pub a: usize,
    pub b: usize,
}

impl BlockAddress {
    pub const fn new(a: usize, b: usize) -> Self {
        Self { a, b }
    }
}

/// An (unnormalized) state on `C² ⊗ C^M ⊗ C^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteState {
    m: usize,
    n: usize,
    mat: ComplexMatrix,
}

impl TripartiteState {
    /// Validates dimensions, Hermiticity (within the default `comm_tol`) and a
    /// positive trace.
    pub fn new(m: usize, n: usize, mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, n, mat, &ToleranceConfig::default())
    }

    pub fn with_tolerance(m: usize, n: usize, mat: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        if m < 2 || n < 1 {
            return Err(Error::InvalidState(format!("dims (2, {m}, {n}) require M >= 2 and N >= 1")));
        }
        let d = 2 * m * n;
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::DimensionMismatch(format!(
                "dims (2, {m}, {n}) need a {d}x{d} matrix, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let defect = mat.hermitian_defect();
        if defect > tol.comm_tol {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace must be positive, got {tr}")));
        }
        Ok(Self { m, n, mat })
    }

    pub(crate) fn from_parts(m: usize, n: usize, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.rows(), 2 * m * n);
        Self { m, n, mat }
    }

    /// `|ψ⟩⟨ψ|` for a pure state vector of length `2MN`.
    pub fn pure(m: usize, n: usize, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != 2 * m * n {
            return Err(Error::DimensionMismatch(format!("state vector of length {}", psi.len())));
        }
        Self::new(m, n, ComplexMatrix::outer(psi, psi))
    }

    /// `σ_A ⊗ σ_B ⊗ σ_C`.
    pub fn product(sa: &ComplexMatrix, sb: &ComplexMatrix, sc: &ComplexMatrix) -> Result<Self> {
        if sa.rows() != 2 {
            return Err(Error::DimensionMismatch("subsystem A must be a qubit".into()));
        }
        Self::new(sb.rows(), sc.rows(), kron(&kron(sa, sb), sc))
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (2, self.m, self.n)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.m * self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn index(&self, a: usize, b: usize, c: usize) -> usize {
        a * self.m * self.n + b * self.n + c
    }

    fn split_index(&self, i: usize) -> (usize, usize, usize) {
        let mn = self.m * self.n;
        (i / mn, (i % mn) / self.n, i % self.n)
    }

    fn check_address(&self, addr: BlockAddress) {
        assert!(addr.a < 2 && addr.b < self.m, "block address {addr:?} out of range for M = {}", self.m);
    }

    /// Partial transpose on the chosen subsystems. A pure index permutation.
    pub fn partial_transpose(&self, subsystems: Subsystems) -> Self {
        let d = self.dim();
        let swap = |x: usize, y: usize, part: Subsystems| if subsystems.contains(part) { (y, x) } else { (x, y) };
        let mat = ComplexMatrix::from_fn(d, d, |r, s| {
            let (a, b, c) = self.split_index(r);
            let (a2, b2, c2) = self.split_index(s);
            let (a, a2) = swap(a, a2, Subsystems::A);
            let (b, b2) = swap(b, b2, Subsystems::B);
            let (c, c2) = swap(c, c2, Subsystems::C);
            self.mat[(self.index(a, b, c), self.index(a2, b2, c2))]
        });
        Self::from_parts(self.m, self.n, mat)
    }

    /// The `N×N` tile at block row `r`, block column `c`.
    pub fn block(&self, r: BlockAddress, c: BlockAddress) -> ComplexMatrix {
        self.check_address(r);
        self.check_address(c);
        let n = self.n;
        self.mat.submatrix(self.index(r.a, r.b, 0), self.index(c.a, c.b, 0), n, n)
    }

    /// `⟨e, f| ρ |e, f⟩`, an operator on `C^N`.
    pub fn project_product(&self, e: &[Complex64], f: &[Complex64]) -> Result<ComplexMatrix> {
        if e.len() != 2 || f.len() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "product vector of lengths ({}, {}) for dims (2, {}, {})",
                e.len(),
                f.len(),
                self.m,
                self.n
            )));
        }
        if vec_norm(e) == 0.0 || vec_norm(f) == 0.0 {
            return Err(Error::ZeroVector);
        }
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n, n);
        for a in 0..2 {
            for b in 0..self.m {
                let left = (e[a] * f[b]).conj();
                if left == ZERO {
                    continue;
                }
                for a2 in 0..2 {
                    for b2 in 0..self.m {
                        let w = left * e[a2] * f[b2];
                        if w == ZERO {
                            continue;
                        }
                        let (r0, c0) = (self.index(a, b, 0), self.index(a2, b2, 0));
                        for i in 0..n {
                            for j in 0..n {
                                out[(i, j)] += w * self.mat[(r0 + i, c0 + j)];
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(L_A ⊗ L_B ⊗ L_C) ρ (L_A ⊗ L_B ⊗ L_C)†` for invertible local factors.
    pub fn local_conjugate(
        &self,
        la: &ComplexMatrix,
        lb: &ComplexMatrix,
        lc: &ComplexMatrix,
        tol: &ToleranceConfig,
    ) -> Result<Self> {
        for (factor, d) in [(la, 2), (lb, self.m), (lc, self.n)] {
            if factor.rows() != d || factor.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "local factor {}x{} on a subsystem of dimension {d}",
                    factor.rows(),
                    factor.cols()
                )));
            }
            if numerical_rank(factor, tol) < d {
                return Err(Error::SingularFactor);
            }
        }
        Ok(self.local_conjugate_unchecked(la, lb, lc))
    }

    pub(crate) fn local_conjugate_unchecked(&self, la: &ComplexMatrix, lb: &ComplexMatrix, lc: &ComplexMatrix) -> Self {
        let l = kron(&kron(la, lb), lc);
        let mat = &(&l * &self.mat) * &l.adjoint();
        Self::from_parts(self.m, self.n, mat.hermitian_part())
    }

    /// Same state scaled to unit trace.
    pub fn normalized(&self) -> Self {
        Self::from_parts(self.m, self.n, self.mat.scale_real(1.0 / self.trace()))
    }
}
