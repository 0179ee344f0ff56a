//! PPT reports and separability certificates.
//!
//! [`decompose`] runs the full construction: search for a product vector with
//! a full-rank projected block, rotate it onto `|1_A, (M−1)_B⟩`, canonicalize,
//! jointly diagonalize `{A_1 … A_{M−1}, D}` and read one product term off
//! every common eigenvector. The result is re-verified before it is returned.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::canonicalize;
use crate::error::{Error, Result};
use crate::joint::joint_diagonalize;
use crate::linalg::{numerical_rank, psd_check, sqrt_psd, PsdVerdict, ToleranceConfig};
use crate::matrix::{inner, vec_norm, ComplexMatrix, ONE, ZERO};
use crate::rng::{stream, PortableRng};
use crate::tensor::{kron, kron_vec, Subsystems, TripartiteState};

/// Default number of random product vectors tried after the basis pairs.
pub const DEFAULT_TRIALS: usize = 64;

/// Positivity of the three single-subsystem partial transposes. The other
/// subsets share a spectrum with one of these (their complements).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptReport {
    #[serde(rename = "tA")]
    pub t_a: PsdVerdict,
    #[serde(rename = "tB")]
    pub t_b: PsdVerdict,
    #[serde(rename = "tC")]
    pub t_c: PsdVerdict,
    #[serde(rename = "ppt")]
    pub overall_ppt: bool,
}

pub fn ppt_report(rho: &TripartiteState, tol: &ToleranceConfig) -> Result<PptReport> {
    let check = |s| psd_check(rho.partial_transpose(s).matrix(), tol);
    let t_a = check(Subsystems::A)?;
    let t_b = check(Subsystems::B)?;
    let t_c = check(Subsystems::C)?;
    Ok(PptReport { t_a, t_b, t_c, overall_ppt: t_a.ok && t_b.ok && t_c.ok })
}

fn basis_vector(n: usize, k: usize) -> Vec<Complex64> {
    (0..n).map(|i| if i == k { ONE } else { ZERO }).collect()
}

/// Looks for `(e, f)` with `rank ⟨e,f|ρ|e,f⟩ = N`. Tries the `2M`
/// computational pairs first, starting from `(|1⟩, |M−1⟩)` and counting down,
/// then `trials` seeded random unit vectors.
pub fn find_product_vector(
    rho: &TripartiteState,
    trials: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
    let (m, n) = (rho.m(), rho.n());
    let full_rank = |e: &[Complex64], f: &[Complex64]| {
        rho.project_product(e, f).map(|p| numerical_rank(&p, tol) == n).unwrap_or(false)
    };
    for a in (0..2).rev() {
        for b in (0..m).rev() {
            let (e, f) = (basis_vector(2, a), basis_vector(m, b));
            if full_rank(&e, &f) {
                return Some((e, f));
            }
        }
    }
    let mut rng = PortableRng::new(seed, stream::PRODUCT_SEARCH);
    for _ in 0..trials {
        let e = rng.unit_vector(2);
        let f = rng.unit_vector(m);
        if full_rank(&e, &f) {
            return Some((e, f));
        }
    }
    None
}

/// Unitary `U` with `U·v = |target⟩` for a unit vector `v`. The remaining
/// rows come from the standard basis, greedily orthogonalized, and keep their
/// natural order, so basis vectors map to permutations.
fn unitary_to_basis(v: &[Complex64], target: usize) -> ComplexMatrix {
    let d = v.len();
    let mut chosen: Vec<(usize, Vec<Complex64>)> = Vec::with_capacity(d - 1);
    let mut accepted: Vec<Vec<Complex64>> = vec![v.to_vec()];
    let mut remaining: Vec<usize> = (0..d).collect();
    for _ in 0..d - 1 {
        let mut best: Option<(usize, f64, Vec<Complex64>)> = None;
        for (pos, &k) in remaining.iter().enumerate() {
            let mut w = basis_vector(d, k);
            for _ in 0..2 {
                for u in &accepted {
                    let p = inner(u, &w);
                    w.iter_mut().zip(u).for_each(|(wi, ui)| *wi -= p * ui);
                }
            }
            let norm = vec_norm(&w);
            if best.as_ref().map_or(true, |b| norm > b.1 + 1e-12) {
                best = Some((pos, norm, w));
            }
        }
        let (pos, norm, mut w) = best.expect("a basis vector remains");
        w.iter_mut().for_each(|x| *x /= norm);
        let k = remaining.remove(pos);
        accepted.push(w.clone());
        chosen.push((k, w));
    }
    chosen.sort_by_key(|(k, _)| *k);
    let mut columns: Vec<Vec<Complex64>> = chosen.into_iter().map(|(_, w)| w).collect();
    columns.insert(target, v.to_vec());
    // W has the chosen vectors as columns; U = W†
    ComplexMatrix::from_fn(d, d, |i, j| columns[i][j].conj())
}

/// State rotated so the product vector sits at `|1_A, (M−1)_B⟩`.
#[derive(Debug, Clone)]
pub struct Alignment {
    pub state: TripartiteState,
    pub u_a: ComplexMatrix,
    pub u_b: ComplexMatrix,
}

pub fn align(rho: &TripartiteState, e: &[Complex64], f: &[Complex64]) -> Result<Alignment> {
    let m = rho.m();
    if e.len() != 2 || f.len() != m {
        return Err(Error::DimensionMismatch(format!("product vector lengths ({}, {})", e.len(), f.len())));
    }
    let (ne, nf) = (vec_norm(e), vec_norm(f));
    if ne == 0.0 || nf == 0.0 {
        return Err(Error::ZeroVector);
    }
    let e: Vec<Complex64> = e.iter().map(|x| x / ne).collect();
    let f: Vec<Complex64> = f.iter().map(|x| x / nf).collect();
    let u_a = unitary_to_basis(&e, 1);
    let u_b = unitary_to_basis(&f, m - 1);
    let state = rho.local_conjugate_unchecked(&u_a, &u_b, &ComplexMatrix::identity(rho.n()));
    Ok(Alignment { state, u_a, u_b })
}

/// One weighted product projector `w · |a⟩⟨a| ⊗ |b⟩⟨b| ⊗ |c⟩⟨c|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub vec_a: Vec<Complex64>,
    pub vec_b: Vec<Complex64>,
    pub vec_c: Vec<Complex64>,
}

impl ProductTerm {
    /// Splits an unnormalized product vector into unit vectors and a weight.
    pub fn from_unnormalized(a: Vec<Complex64>, b: Vec<Complex64>, c: Vec<Complex64>) -> Result<Self> {
        let (na, nb, nc) = (vec_norm(&a), vec_norm(&b), vec_norm(&c));
        if na == 0.0 || nb == 0.0 || nc == 0.0 {
            return Err(Error::ZeroVector);
        }
        let unit = |v: Vec<Complex64>, s: f64| v.into_iter().map(|x| x / s).collect();
        Ok(Self {
            weight: (na * nb * nc).powi(2),
            vec_a: unit(a, na),
            vec_b: unit(b, nb),
            vec_c: unit(c, nc),
        })
    }

    pub fn projector(&self) -> ComplexMatrix {
        let v = kron_vec(&kron_vec(&self.vec_a, &self.vec_b), &self.vec_c);
        ComplexMatrix::outer(&v, &v).scale_real(self.weight)
    }
}

/// A separability certificate: an explicit sum of product projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition {
    pub terms: Vec<ProductTerm>,
    /// Trace of the state the certificate was issued for.
    pub trace_in: f64,
}

impl SeparableDecomposition {
    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// `Σ_n w_n P_a ⊗ P_b ⊗ P_c` on a space of dimension `dim`.
    pub fn to_matrix(&self, dim: usize) -> ComplexMatrix {
        self.terms.iter().fold(ComplexMatrix::zeros(dim, dim), |acc, t| &acc + &t.projector())
    }
}

/// Relative Frobenius residual `‖ρ − Σ_n w_n P_a⊗P_b⊗P_c‖ / ‖ρ‖`. Rejects
/// non-positive weights and vectors that are not unit-norm within `1e-12`.
pub fn verify_decomposition(rho: &TripartiteState, dec: &SeparableDecomposition) -> Result<f64> {
    let (_, m, n) = rho.dims();
    for (i, t) in dec.terms.iter().enumerate() {
        if t.vec_a.len() != 2 || t.vec_b.len() != m || t.vec_c.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "term {i} has vector lengths ({}, {}, {}) for dims (2, {m}, {n})",
                t.vec_a.len(),
                t.vec_b.len(),
                t.vec_c.len()
            )));
        }
        if !(t.weight > 0.0) || !t.weight.is_finite() {
            return Err(Error::InvalidCertificate(format!("term {i} has weight {}", t.weight)));
        }
        for v in [&t.vec_a, &t.vec_b, &t.vec_c] {
            if (vec_norm(v) - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidCertificate(format!("term {i} has a non-unit vector")));
            }
        }
    }
    let sum = dec.to_matrix(rho.dim());
    Ok(rho.matrix().distance(&sum) / rho.matrix().frobenius_norm())
}

/// Builds a separability certificate for a PPT state of rank `N`.
///
/// Fails with [`Error::HypothesisViolated`] when the state is not PPT or not of
/// rank `N`, and with [`Error::NoProductVector`] when the search finds no
/// full-rank product projection. The latter is inconclusive: it says nothing
/// about entanglement.
pub fn decompose(
    rho: &TripartiteState,
    tol: &ToleranceConfig,
    trials: usize,
    seed: u64,
) -> Result<SeparableDecomposition> {
    let (_, m, n) = rho.dims();
    let ppt = ppt_report(rho, tol)?;
    let rank = numerical_rank(rho.matrix(), tol);
    if !ppt.overall_ppt || rank != n {
        let mut why = Vec::new();
        if !ppt.overall_ppt {
            why.push("state is not PPT".to_string());
        }
        if rank != n {
            why.push(format!("rank(rho) = {rank} != N = {n}"));
        }
        return Err(Error::HypothesisViolated(why.join("; ")));
    }
    let (e, f) = find_product_vector(rho, trials, seed, tol).ok_or(Error::NoProductVector)?;
    let aligned = align(rho, &e, &f)?;
    let (family, _) = canonicalize(&aligned.state, tol)?;
    let joint = joint_diagonalize(&family.commuting_members(), tol, seed)?;
    let root_f = sqrt_psd(&family.f, tol)?;
    let (ua_inv, ub_inv) = (aligned.u_a.adjoint(), aligned.u_b.adjoint());

    let mut terms = Vec::with_capacity(n);
    for k in 0..n {
        let tuple = joint.tuple(k);
        // tuple = (a_1, …, a_{M−1}, d)
        let d = tuple[m - 1];
        let psi = vec![d.conj(), ONE];
        let phi: Vec<Complex64> = (1..m).rev().map(|i| tuple[i - 1].conj()).chain(std::iter::once(ONE)).collect();
        let c = root_f.mul_vec(&joint.basis.column_vec(k));
        terms.push(ProductTerm::from_unnormalized(ua_inv.mul_vec(&psi), ub_inv.mul_vec(&phi), c)?);
    }
    let dec = SeparableDecomposition { terms, trace_in: rho.trace() };
    let residual = verify_decomposition(rho, &dec)?;
    if !(residual <= tol.recon_tol) {
        return Err(Error::ReconstructionFailed(residual));
    }
    Ok(dec)
}

/// `(L_A ⊗ L_B ⊗ L_C)` as one matrix; handy for tests and corpus scrambling.
pub fn local_operator(la: &ComplexMatrix, lb: &ComplexMatrix, lc: &ComplexMatrix) -> ComplexMatrix {
    kron(&kron(la, lb), lc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{reconstruct, CanonicalFamily};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn corner_state(m: usize, n: usize) -> TripartiteState {
        let fam = CanonicalFamily::zero(m, n, ComplexMatrix::identity(n)).unwrap();
        reconstruct(&fam, &tol()).unwrap()
    }

    fn small_state() -> TripartiteState {
        let fam = CanonicalFamily::new(
            2,
            2,
            vec![ComplexMatrix::from_real_diag(&[1.0, 0.0])],
            ComplexMatrix::from_real_diag(&[0.0, 1.0]),
            ComplexMatrix::identity(2),
        )
        .unwrap();
        reconstruct(&fam, &tol()).unwrap()
    }

    fn ghz_like(m: usize, n: usize) -> TripartiteState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![ZERO; 2 * m * n];
        psi[0] = c(r, 0.0);
        psi[m * n + n] = c(r, 0.0);
        TripartiteState::pure(m, n, &psi).unwrap()
    }

    fn assert_vec_close(got: &[Complex64], want: &[Complex64]) {
        // equal up to a global phase
        let overlap = inner(want, got).norm();
        assert!((overlap - 1.0).abs() < 1e-12, "{got:?} vs {want:?}");
    }

    #[test]
    fn ppt_report_examples() {
        let rep = ppt_report(&ghz_like(2, 2), &tol()).unwrap();
        assert!((rep.t_a.min_eig + 0.5).abs() < 1e-12);
        assert!(!rep.overall_ppt);
        let rep = ppt_report(&small_state(), &tol()).unwrap();
        assert!(rep.overall_ppt);
    }

    #[test]
    fn basis_search_finds_distinguished_pair_first() {
        let rho = small_state();
        let (e, f) = find_product_vector(&rho, 0, 0, &tol()).unwrap();
        assert_eq!(e, basis_vector(2, 1));
        assert_eq!(f, basis_vector(2, 1));
    }

    #[test]
    fn search_fails_for_rank_one_state() {
        let psi = kron_vec(&kron_vec(&[ONE, ZERO], &[ONE, ONE]), &[ONE, c(0.0, 1.0)]);
        let rho = TripartiteState::pure(2, 2, &psi).unwrap();
        assert!(find_product_vector(&rho, 16, 0, &tol()).is_none());
        assert!(matches!(decompose(&rho, &tol(), 16, 0), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn align_examples() {
        let rho = small_state();
        let al = align(&rho, &basis_vector(2, 1), &basis_vector(2, 1)).unwrap();
        assert_eq!(al.u_a, ComplexMatrix::identity(2));
        assert_eq!(al.u_b, ComplexMatrix::identity(2));

        let al = align(&rho, &basis_vector(2, 0), &basis_vector(2, 1)).unwrap();
        assert_eq!(al.u_a, ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]));

        let mut rng = PortableRng::new(31, 0);
        for m in 2..5 {
            let d = 2 * m * 2;
            let g = rng.gaussian_matrix(d, d);
            let rho = TripartiteState::new(m, 2, &g * &g.adjoint()).unwrap();
            let e = rng.unit_vector(2);
            let f = rng.unit_vector(m);
            let al = align(&rho, &e, &f).unwrap();
            let ua_e = al.u_a.mul_vec(&e);
            let ub_f = al.u_b.mul_vec(&f);
            assert!(vec_norm(&ua_e.iter().zip(basis_vector(2, 1)).map(|(x, y)| x - y).collect::<Vec<_>>()) < 1e-14);
            assert!(vec_norm(&ub_f.iter().zip(basis_vector(m, m - 1)).map(|(x, y)| x - y).collect::<Vec<_>>()) < 1e-14);
            let blk = al.state.project_product(&basis_vector(2, 1), &basis_vector(m, m - 1)).unwrap();
            let direct = rho.project_product(&e, &f).unwrap();
            assert!(blk.distance(&direct) <= 1e-12 * direct.frobenius_norm());
        }
        assert!(matches!(align(&rho, &[ZERO, ZERO], &basis_vector(2, 0)), Err(Error::ZeroVector)));
    }

    #[test]
    fn decompose_corner_state() {
        let (m, n) = (3, 4);
        let dec = decompose(&corner_state(m, n), &tol(), DEFAULT_TRIALS, 0).unwrap();
        assert_eq!(dec.terms.len(), n);
        for (k, t) in dec.terms.iter().enumerate() {
            assert!((t.weight - 1.0).abs() < 1e-14);
            assert_vec_close(&t.vec_a, &basis_vector(2, 1));
            assert_vec_close(&t.vec_b, &basis_vector(m, m - 1));
            assert_vec_close(&t.vec_c, &basis_vector(n, k));
        }
    }

    #[test]
    fn decompose_small_family() {
        let dec = decompose(&small_state(), &tol(), DEFAULT_TRIALS, 0).unwrap();
        assert_eq!(dec.terms.len(), 2);
        assert!((dec.trace_in - 4.0).abs() < 1e-14);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // sorted by a_1: e₂ (a=0, d=1) comes first, then e₁ (a=1, d=0)
        let mut terms = dec.terms.clone();
        terms.sort_by(|x, y| x.vec_c[1].norm().total_cmp(&y.vec_c[1].norm()));
        let t1 = &terms[0];
        assert!((t1.weight - 2.0).abs() < 1e-13);
        assert_vec_close(&t1.vec_a, &[ZERO, ONE]);
        assert_vec_close(&t1.vec_b, &[c(r, 0.0), c(r, 0.0)]);
        assert_vec_close(&t1.vec_c, &[ONE, ZERO]);
        let t2 = &terms[1];
        assert!((t2.weight - 2.0).abs() < 1e-13);
        assert_vec_close(&t2.vec_a, &[c(r, 0.0), c(r, 0.0)]);
        assert_vec_close(&t2.vec_b, &[ZERO, ONE]);
        assert_vec_close(&t2.vec_c, &[ZERO, ONE]);
    }

    #[test]
    fn decompose_rejects_npt() {
        assert!(matches!(decompose(&ghz_like(3, 2), &tol(), 8, 0), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn verify_examples() {
        let rho = small_state();
        let dec = decompose(&rho, &tol(), DEFAULT_TRIALS, 0).unwrap();
        assert!(verify_decomposition(&rho, &dec).unwrap() <= tol().recon_tol);

        let mut halved = dec.clone();
        let w = halved.terms[0].weight;
        halved.terms[0].weight = w / 2.0;
        let expected = (w / 2.0) / rho.matrix().frobenius_norm();
        assert!((verify_decomposition(&rho, &halved).unwrap() - expected).abs() < 1e-12);

        let empty = SeparableDecomposition { terms: vec![], trace_in: rho.trace() };
        assert_eq!(verify_decomposition(&rho, &empty).unwrap(), 1.0);

        let mut negative = dec.clone();
        negative.terms[0].weight = -1.0;
        assert!(matches!(verify_decomposition(&rho, &negative), Err(Error::InvalidCertificate(_))));

        let mut short = dec;
        short.terms[0].vec_b.pop();
        assert!(matches!(verify_decomposition(&rho, &short), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn decompose_survives_local_unitaries() {
        let mut rng = PortableRng::new(41, 0);
        let rho = small_state();
        let scrambled = rho
            .local_conjugate(&rng.unitary(2), &rng.unitary(2), &rng.unitary(2), &tol())
            .unwrap();
        let dec = decompose(&scrambled, &tol(), DEFAULT_TRIALS, 3).unwrap();
        assert!(dec.terms.len() <= 2);
        assert!(verify_decomposition(&scrambled, &dec).unwrap() <= tol().recon_tol);
        assert!((dec.total_weight() - dec.trace_in).abs() <= tol().recon_tol * dec.trace_in);
    }
}
