//! Canonical form of rank-`N` PPT states.
//!
//! After filtering subsystem C by `F^{-1/2}`, with `F` the
//! `⟨1_A,(M−1)_B|ρ|1_A,(M−1)_B⟩` block, a PPT state of rank `N` becomes the
//! Gram matrix `G†G` of the block row
//!
//! ```text
//! G = [D·A_{M−1}  …  D·A_1  D  A_{M−1}  …  A_1  I]
//! ```
//!
//! where tile `(a, b)` of `G` sits at position `a·M + b`. The bottom block row
//! of the filtered state is `G` itself, so the family is read off directly;
//! the remaining tiles are then checked against `G_r† G_c`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inv_sqrt, numerical_rank, sqrt_psd, ToleranceConfig};
use crate::matrix::{ComplexMatrix, ONE, ZERO};
use crate::separability::{ppt_report, PptReport};
use crate::tensor::{kron, BlockAddress, TripartiteState};

/// `A_1 … A_{M−1}`, `D` (commuting, normal) and the positive-definite filter `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalFamily {
    pub m: usize,
    pub n: usize,
    /// `a[k]` holds `A_{k+1}`.
    pub a: Vec<ComplexMatrix>,
    pub d: ComplexMatrix,
    pub f: ComplexMatrix,
}

impl CanonicalFamily {
    pub fn new(m: usize, n: usize, a: Vec<ComplexMatrix>, d: ComplexMatrix, f: ComplexMatrix) -> Result<Self> {
        if m < 2 || n < 1 {
            return Err(Error::InvalidState(format!("family dims M = {m}, N = {n}")));
        }
        if a.len() != m - 1 {
            return Err(Error::DimensionMismatch(format!("{} A matrices for M = {m}", a.len())));
        }
        for x in a.iter().chain([&d, &f]) {
            if x.rows() != n || x.cols() != n {
                return Err(Error::DimensionMismatch(format!("{}x{} family member for N = {n}", x.rows(), x.cols())));
            }
        }
        Ok(Self { m, n, a, d, f })
    }

    /// All `A_i` and `D` zero.
    pub fn zero(m: usize, n: usize, f: ComplexMatrix) -> Result<Self> {
        Self::new(m, n, vec![ComplexMatrix::zeros(n, n); m - 1], ComplexMatrix::zeros(n, n), f)
    }

    /// `A_k`, 1-based as in the canonical row.
    pub fn a_k(&self, k: usize) -> &ComplexMatrix {
        &self.a[k - 1]
    }

    /// `[A_1, …, A_{M−1}, D]`, the family handed to joint diagonalization.
    pub fn commuting_members(&self) -> Vec<ComplexMatrix> {
        self.a.iter().cloned().chain(std::iter::once(self.d.clone())).collect()
    }

    /// Largest relative commutator among `{A_i, D}`: normality defects plus
    /// `[X, Y]` and `[X, Y†]` for every pair.
    pub fn commutation_residual(&self) -> f64 {
        let members: Vec<&ComplexMatrix> = self.a.iter().chain(std::iter::once(&self.d)).collect();
        let adj: Vec<ComplexMatrix> = members.iter().map(|x| x.adjoint()).collect();
        let mut worst = 0.0f64;
        for i in 0..members.len() {
            worst = worst.max(members[i].relative_commutator(&adj[i]));
            for j in i + 1..members.len() {
                worst = worst.max(members[i].relative_commutator(members[j]));
                worst = worst.max(members[i].relative_commutator(&adj[j]));
            }
        }
        worst
    }

    /// Checks normality, commutation and that `F` is Hermitian positive-definite.
    pub fn check_invariants(&self, tol: &ToleranceConfig) -> Result<()> {
        let comm = self.commutation_residual();
        if comm > tol.comm_tol {
            return Err(Error::InvariantViolated(format!("commutation residual {comm:.3e} exceeds {:.1e}", tol.comm_tol)));
        }
        let defect = self.f.hermitian_defect();
        if defect > tol.comm_tol {
            return Err(Error::InvariantViolated(format!("F is not Hermitian (defect {defect:.3e})")));
        }
        let min_eig = hermitian_eig(&self.f, tol)?.eigenvalues[0];
        if min_eig <= tol.psd_floor(self.f.trace().re) {
            return Err(Error::InvariantViolated(format!("F is not positive definite (min eigenvalue {min_eig:.3e})")));
        }
        Ok(())
    }

    /// Tiles of the canonical row, indexed by `a·M + b`.
    pub fn canonical_row(&self) -> Vec<ComplexMatrix> {
        let m = self.m;
        let mut row = Vec::with_capacity(2 * m);
        // tile (a, b) with b < M−1 carries A_{M−1−b}
        for b in 0..m - 1 {
            row.push(&self.d * self.a_k(m - 1 - b));
        }
        row.push(self.d.clone());
        for b in 0..m - 1 {
            row.push(self.a_k(m - 1 - b).clone());
        }
        row.push(ComplexMatrix::identity(self.n));
        row
    }

    /// `G` as an `N × 2MN` matrix.
    fn row_matrix(&self) -> ComplexMatrix {
        let n = self.n;
        let mut g = ComplexMatrix::zeros(n, 2 * self.m * n);
        for (k, tile) in self.canonical_row().iter().enumerate() {
            g.set_submatrix(0, k * n, tile);
        }
        g
    }
}

/// Residuals left over by the canonicalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalDiagnostics {
    /// Largest `‖ρ′_{rc} − G_r† G_c‖_F` over all tiles, relative to `‖ρ′‖_F`.
    pub delta_residual: f64,
    /// Largest `‖ρ′_{(1,M−1),(0,b)} − D·A_{M−1−b}‖_F`, relative to `‖ρ′‖_F`.
    pub factor_residual: f64,
    /// See [`CanonicalFamily::commutation_residual`].
    pub commutation_residual: f64,
    /// `‖reconstruct(family) − ρ‖_F / ‖ρ‖_F`.
    pub reconstruction_residual: f64,
}

/// Coarse preconditions of the canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub rank_rho: usize,
    pub rank_e8: usize,
    pub ppt: PptReport,
    pub hypothesis_ok: bool,
}

impl HypothesisReport {
    pub fn describe(&self, n: usize) -> String {
        let mut why = Vec::new();
        if self.rank_rho != n {
            why.push(format!("rank(rho) = {} != N = {n}", self.rank_rho));
        }
        if self.rank_e8 != n {
            why.push(format!("rank of the distinguished block = {} != N = {n}", self.rank_e8));
        }
        for (name, v) in [("A", &self.ppt.t_a), ("B", &self.ppt.t_b), ("C", &self.ppt.t_c)] {
            if !v.ok {
                why.push(format!("partial transpose on {name} has eigenvalue {:.6e}", v.min_eig));
            }
        }
        if why.is_empty() {
            "hypotheses hold".into()
        } else {
            why.join("; ")
        }
    }
}

/// Index of the distinguished tile `(1, M−1)`.
pub fn distinguished(m: usize) -> BlockAddress {
    BlockAddress::new(1, m - 1)
}

pub fn check_hypotheses(rho: &TripartiteState, tol: &ToleranceConfig) -> Result<HypothesisReport> {
    let n = rho.n();
    let rank_rho = numerical_rank(rho.matrix(), tol);
    let e = distinguished(rho.m());
    let rank_e8 = numerical_rank(&rho.block(e, e), tol);
    let ppt = ppt_report(rho, tol)?;
    let hypothesis_ok = rank_rho == n && rank_e8 == n && ppt.overall_ppt;
    Ok(HypothesisReport { rank_rho, rank_e8, ppt, hypothesis_ok })
}

/// Filters, reads the family off the bottom block row and measures every
/// residual, without rejecting anything. Requires only that the distinguished
/// tile is positive definite.
pub fn extract_family(rho: &TripartiteState, tol: &ToleranceConfig) -> Result<(CanonicalFamily, CanonicalDiagnostics)> {
    let (m, n) = (rho.m(), rho.n());
    let e = distinguished(m);
    let f = rho.block(e, e).hermitian_part();
    let (filter, _) = inv_sqrt(&f, tol)?;
    let id2 = ComplexMatrix::identity(2);
    let idm = ComplexMatrix::identity(m);
    let filtered = rho.local_conjugate_unchecked(&id2, &idm, &filter);

    let mut a = vec![ComplexMatrix::zeros(n, n); m - 1];
    for b in 0..m - 1 {
        a[m - 2 - b] = filtered.block(e, BlockAddress::new(1, b));
    }
    let d = filtered.block(e, BlockAddress::new(0, m - 1));
    let family = CanonicalFamily::new(m, n, a, d, f)?;

    let scale = filtered.matrix().frobenius_norm();
    let row = family.canonical_row();
    let mut factor_residual = 0.0f64;
    for b in 0..m - 1 {
        let tile = filtered.block(e, BlockAddress::new(0, b));
        factor_residual = factor_residual.max(tile.distance(&row[b]) / scale);
    }
    let adj: Vec<ComplexMatrix> = row.iter().map(ComplexMatrix::adjoint).collect();
    let mut delta_residual = 0.0f64;
    for r in 0..2 * m {
        for c in 0..2 * m {
            let tile = filtered.block(BlockAddress::new(r / m, r % m), BlockAddress::new(c / m, c % m));
            delta_residual = delta_residual.max(tile.distance(&(&adj[r] * &row[c])) / scale);
        }
    }
    let rebuilt = gram_state(&family, tol)?;
    let reconstruction_residual = rebuilt.matrix().distance(rho.matrix()) / rho.matrix().frobenius_norm();
    let diagnostics = CanonicalDiagnostics {
        delta_residual,
        factor_residual,
        commutation_residual: family.commutation_residual(),
        reconstruction_residual,
    };
    Ok((family, diagnostics))
}

/// Brings a hypothesis-satisfying state into canonical form. States that pass
/// the coarse checks but leave residuals above tolerance are rejected with
/// [`Error::NotCanonical`].
pub fn canonicalize(rho: &TripartiteState, tol: &ToleranceConfig) -> Result<(CanonicalFamily, CanonicalDiagnostics)> {
    let report = check_hypotheses(rho, tol)?;
    if !report.hypothesis_ok {
        return Err(Error::HypothesisViolated(report.describe(rho.n())));
    }
    let (family, diag) = extract_family(rho, tol)?;
    let checks = [
        ("delta", diag.delta_residual, tol.recon_tol),
        ("factor", diag.factor_residual, tol.recon_tol),
        ("reconstruction", diag.reconstruction_residual, tol.recon_tol),
        ("commutation", diag.commutation_residual, tol.comm_tol),
    ];
    for (name, value, bound) in checks {
        if !(value <= bound) {
            return Err(Error::NotCanonical(format!("{name} residual {value:.3e} exceeds {bound:.1e}")));
        }
    }
    Ok((family, diag))
}

/// `(I_{2M} ⊗ √F) G†G (I_{2M} ⊗ √F)` without checking family invariants.
fn gram_state(family: &CanonicalFamily, tol: &ToleranceConfig) -> Result<TripartiteState> {
    let g = family.row_matrix();
    let gram = &g.adjoint() * &g;
    let root = sqrt_psd(&family.f, tol)?;
    let lift = kron(&ComplexMatrix::identity(2 * family.m), &root);
    let mat = &(&lift * &gram) * &lift;
    Ok(TripartiteState::from_parts(family.m, family.n, mat.hermitian_part()))
}

/// Builds the canonical state of a family, after checking its invariants.
pub fn reconstruct(family: &CanonicalFamily, tol: &ToleranceConfig) -> Result<TripartiteState> {
    family.check_invariants(tol)?;
    gram_state(family, tol)
}

/// Kernel vectors of `reconstruct(family)`: for every basis vector `|f⟩` of
/// `C^N`, `|1,b⟩|f⟩ − |1,M−1⟩A_{M−1−b}|f⟩` for each `b < M−1` and
/// `|0,M−1⟩|f⟩ − |1,M−1⟩D|f⟩`, each pulled back through the filter
/// `I ⊗ F^{-1/2}`. Ordered by `b`, with the `D` family last; `M·N` vectors.
pub fn kernel_witnesses(family: &CanonicalFamily, tol: &ToleranceConfig) -> Result<Vec<Vec<Complex64>>> {
    let (m, n) = (family.m, family.n);
    let dim = 2 * m * n;
    let (filter, _) = inv_sqrt(&family.f, tol)?;
    let lift = kron(&ComplexMatrix::identity(2 * m), &filter);
    let at = |a: usize, b: usize| (a * m + b) * n;
    let mut out = Vec::with_capacity(m * n);
    let mut push = |start: usize, op: &ComplexMatrix, j: usize| {
        let mut w = vec![ZERO; dim];
        w[start + j] = ONE;
        let tail = at(1, m - 1);
        for i in 0..n {
            w[tail + i] -= op[(i, j)];
        }
        out.push(lift.mul_vec(&w));
    };
    for b in 0..m - 1 {
        for j in 0..n {
            push(at(1, b), family.a_k(m - 1 - b), j);
        }
    }
    for j in 0..n {
        push(at(0, m - 1), &family.d, j);
    }
    Ok(out)
}
