//! Simultaneous unitary diagonalization of commuting normal matrices.
//!
//! Each member `X` is split into the Hermitian pair `(X+X†)/2`,
//! `(X−X†)/(2i)`. A seeded random real combination of all those Hermitian
//! parts is diagonalized; its eigenspaces are joint invariant subspaces of the
//! family. Clusters of (near-)equal eigenvalues are compressed and split again
//! with fresh coefficients until every member acts as a scalar on each block.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ToleranceConfig};
use crate::matrix::ComplexMatrix;
use crate::rng::{stream, PortableRng};

/// Attempts per subspace before giving up on separating it.
const MAX_ATTEMPTS: usize = 8;
/// Eigenvalues of the random combination closer than this (relative to its
/// spectral radius) are treated as one cluster.
const CLUSTER_GAP: f64 = 1e-6;
/// A compressed member within this relative distance of a scalar matrix is
/// treated as scalar on the block.
const SCALAR_TOL: f64 = 1e-12;

/// Common eigenvectors and the aligned eigenvalue table.
#[derive(Debug, Clone, PartialEq)]
pub struct JointEigenSystem {
    /// Column `k` is the common eigenvector `|f_k⟩`.
    pub basis: ComplexMatrix,
    /// `eigenvalues[i][k]` is the eigenvalue of family member `i` on `|f_k⟩`.
    pub eigenvalues: Vec<Vec<Complex64>>,
}

impl JointEigenSystem {
    /// Eigenvalue tuple of column `k`, one entry per family member.
    pub fn tuple(&self, k: usize) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|row| row[k]).collect()
    }
}

fn check_family(family: &[ComplexMatrix], tol: &ToleranceConfig) -> Result<usize> {
    let n = family.first().map_or(0, ComplexMatrix::rows);
    for x in family {
        if x.rows() != n || x.cols() != n {
            return Err(Error::DimensionMismatch("family members must share one square shape".into()));
        }
    }
    let adj: Vec<ComplexMatrix> = family.iter().map(ComplexMatrix::adjoint).collect();
    for (i, x) in family.iter().enumerate() {
        if x.relative_commutator(&adj[i]) > tol.comm_tol {
            return Err(Error::NotNormal(i));
        }
        for j in i + 1..family.len() {
            if x.relative_commutator(&family[j]) > tol.comm_tol || x.relative_commutator(&adj[j]) > tol.comm_tol {
                return Err(Error::NotCommuting(i, j));
            }
        }
    }
    Ok(n)
}

/// Jointly diagonalizes a commuting family of normal matrices. Deterministic
/// for fixed `(family, seed)`.
pub fn joint_diagonalize(family: &[ComplexMatrix], tol: &ToleranceConfig, seed: u64) -> Result<JointEigenSystem> {
    let n = check_family(family, tol)?;
    let mut rng = PortableRng::new(seed, stream::JOINT_DIAG);
    let scales: Vec<f64> = family.iter().map(ComplexMatrix::frobenius_norm).collect();
    let hermitian: Vec<ComplexMatrix> =
        family.iter().flat_map(|x| [x.hermitian_part(), x.skew_hermitian_part()]).collect();
    let q = split(&hermitian, &scales, &mut rng, tol)?;

    // eigenvalues as the diagonal of basis†·X·basis
    let mut table: Vec<Vec<Complex64>> = family.iter().map(|x| (&(&q.adjoint() * x) * &q).diagonal()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        for row in &table {
            let ord = row[i].re.total_cmp(&row[j].re).then(row[i].im.total_cmp(&row[j].im));
            if ord.is_ne() {
                return ord;
            }
        }
        i.cmp(&j)
    });
    for row in &mut table {
        *row = order.iter().map(|&k| row[k]).collect();
    }
    let system = JointEigenSystem { basis: q.select_columns(&order), eigenvalues: table };
    if verify_joint(&system, family) > tol.recon_tol {
        return Err(Error::DegeneracyUnresolved);
    }
    Ok(system)
}

/// Returns a unitary that block-diagonalizes the Hermitian family down to
/// scalar blocks. `scales[i]` is the norm of the parent member behind
/// `parts[2i]` and `parts[2i+1]`.
fn split(parts: &[ComplexMatrix], scales: &[f64], rng: &mut PortableRng, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let k = parts.first().map_or(0, ComplexMatrix::rows);
    if k <= 1 {
        return Ok(ComplexMatrix::identity(k));
    }
    // remove the scalar part of each member; what is left decides the split
    let traceless: Vec<ComplexMatrix> = parts
        .iter()
        .map(|p| {
            let shift = p.trace() / k as f64;
            let mut t = p.clone();
            for i in 0..k {
                t[(i, i)] -= shift;
            }
            t
        })
        .collect();
    let is_scalar = traceless
        .iter()
        .enumerate()
        .all(|(i, t)| t.frobenius_norm() <= SCALAR_TOL * scales[i / 2].max(f64::MIN_POSITIVE));
    if is_scalar {
        return Ok(ComplexMatrix::identity(k));
    }

    for _ in 0..MAX_ATTEMPTS {
        let mut h = ComplexMatrix::zeros(k, k);
        for t in &traceless {
            let w = rng.uniform_range(-1.0, 1.0);
            h = &h + &t.scale_real(w);
        }
        let eig = hermitian_eig(&h, tol)?;
        let radius = eig.eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
        if radius == 0.0 {
            continue;
        }
        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        for i in 1..k {
            if eig.eigenvalues[i] - eig.eigenvalues[i - 1] > CLUSTER_GAP * radius {
                clusters.push(vec![i]);
            } else {
                clusters.last_mut().expect("non-empty").push(i);
            }
        }
        if clusters.len() == 1 {
            continue;
        }
        let mut q = ComplexMatrix::zeros(k, k);
        let mut col = 0;
        for cluster in &clusters {
            let mut sub_basis = eig.basis.select_columns(cluster);
            if cluster.len() > 1 {
                let compressed: Vec<ComplexMatrix> =
                    parts.iter().map(|p| &(&sub_basis.adjoint() * p) * &sub_basis).collect();
                let inner = split(&compressed, scales, rng, tol)?;
                sub_basis = &sub_basis * &inner;
            }
            q.set_submatrix(0, col, &sub_basis);
            col += cluster.len();
        }
        return Ok(q);
    }
    Err(Error::DegeneracyUnresolved)
}

/// Largest relative off-diagonal norm of `basis†·X·basis` over the family,
/// or the unitarity defect of the basis if that is larger.
pub fn verify_joint(system: &JointEigenSystem, family: &[ComplexMatrix]) -> f64 {
    let q = &system.basis;
    let n = q.cols();
    let unitarity = (&q.adjoint() * q).distance(&ComplexMatrix::identity(n));
    family.iter().fold(unitarity, |worst, x| {
        let norm = x.frobenius_norm();
        if norm == 0.0 {
            return worst;
        }
        let rotated = &(&q.adjoint() * x) * q;
        worst.max(rotated.off_diagonal_norm() / norm)
    })
}
