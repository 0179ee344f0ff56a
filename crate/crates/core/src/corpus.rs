//! Deterministic test-state synthesis.
//!
//! All draws come from [`PortableRng`] on stream [`stream::CORPUS`], in this
//! order: the family members `A_1 … A_{M−1}`, `D` (each `N` complex Gaussians),
//! the `N` diagonal entries of `F` (uniform on `[0.5, 2)`), the shared unitary
//! in conjugated mode, and finally the scramble factors for A, B and C.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::canonical::{reconstruct, CanonicalFamily};
use crate::error::{Error, Result};
use crate::linalg::ToleranceConfig;
use crate::matrix::{ComplexMatrix, ZERO};
use crate::rng::{stream, PortableRng};
use crate::tensor::TripartiteState;

/// Largest condition number of an invertible scramble factor.
pub const MAX_SCRAMBLE_CONDITION: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyMode {
    Diagonal,
    Conjugated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scramble {
    None,
    Unitary,
    Invertible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub mode: FamilyMode,
    pub scramble: Scramble,
    pub entangled_control: bool,
}

impl GenSpec {
    pub fn new(m: usize, n: usize, seed: u64) -> Self {
        Self { m, n, seed, mode: FamilyMode::Diagonal, scramble: Scramble::None, entangled_control: false }
    }

    pub fn mode(mut self, mode: FamilyMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn scramble(mut self, scramble: Scramble) -> Self {
        self.scramble = scramble;
        self
    }

    pub fn control(mut self, on: bool) -> Self {
        self.entangled_control = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m < 2 || self.n < 1 {
            return Err(Error::InvalidState(format!("GenSpec needs m >= 2 and n >= 1, got m = {}, n = {}", self.m, self.n)));
        }
        Ok(())
    }
}

fn draw_family(spec: &GenSpec, rng: &mut PortableRng) -> CanonicalFamily {
    let (m, n) = (spec.m, spec.n);
    let mut a: Vec<ComplexMatrix> =
        (0..m - 1).map(|_| ComplexMatrix::from_diag(&rng.complex_gaussian_vec(n))).collect();
    let mut d = ComplexMatrix::from_diag(&rng.complex_gaussian_vec(n));
    let f_diag: Vec<f64> = (0..n).map(|_| rng.uniform_range(0.5, 2.0)).collect();
    let mut f = ComplexMatrix::from_real_diag(&f_diag);
    if spec.mode == FamilyMode::Conjugated {
        let u = rng.unitary(n);
        let ud = u.adjoint();
        let conj = |x: &ComplexMatrix| &(&u * x) * &ud;
        a = a.iter().map(conj).collect();
        d = conj(&d);
        f = conj(&f).hermitian_part();
    }
    CanonicalFamily { m, n, a, d, f }
}

/// Random commuting normal family with a positive-definite `F`.
pub fn gen_family(spec: &GenSpec) -> Result<CanonicalFamily> {
    spec.validate()?;
    let mut rng = PortableRng::new(spec.seed, stream::CORPUS);
    Ok(draw_family(spec, &mut rng))
}

/// `U · diag(s) · V†` with `s` uniform on `[1, 10)`, so the condition number
/// is below [`MAX_SCRAMBLE_CONDITION`].
fn invertible_factor(d: usize, rng: &mut PortableRng) -> ComplexMatrix {
    let u = rng.unitary(d);
    let s: Vec<f64> = (0..d).map(|_| rng.uniform_range(1.0, MAX_SCRAMBLE_CONDITION)).collect();
    let v = rng.unitary(d);
    &(&u * &ComplexMatrix::from_real_diag(&s)) * &v.adjoint()
}

/// `(|0,0,0⟩ + |1,1,0⟩)/√2` as a unit-trace projector on `(2, M, N)`.
pub fn entangled_control(m: usize, n: usize) -> Result<TripartiteState> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut psi = vec![ZERO; 2 * m * n];
    psi[0] = Complex64::new(r, 0.0);
    psi[m * n + n] = Complex64::new(r, 0.0);
    TripartiteState::pure(m, n, &psi)
}

pub fn gen_state(spec: &GenSpec) -> Result<TripartiteState> {
    spec.validate()?;
    if spec.entangled_control {
        return entangled_control(spec.m, spec.n);
    }
    let tol = ToleranceConfig::default();
    let mut rng = PortableRng::new(spec.seed, stream::CORPUS);
    let family = draw_family(spec, &mut rng);
    let state = reconstruct(&family, &tol)?;
    let dims = [2, spec.m, spec.n];
    let factors: Vec<ComplexMatrix> = match spec.scramble {
        Scramble::None => return Ok(state),
        Scramble::Unitary => dims.iter().map(|&d| rng.unitary(d)).collect(),
        Scramble::Invertible => dims.iter().map(|&d| invertible_factor(d, &mut rng)).collect(),
    };
    state.local_conjugate(&factors[0], &factors[1], &factors[2], &tol)
}
