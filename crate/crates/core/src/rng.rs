//! Portable seeded randomness.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64(seed)` and switched to stream `stream` with `set_stream`.
//! Floating-point variates are derived from raw `next_u64` words with the
//! explicit transforms below, so another implementation that reproduces the
//! ChaCha20 word stream reproduces every corpus bit for bit:
//!
//! * uniform on `[0, 1)`: `(w >> 11) · 2⁻⁵³`
//! * complex standard Gaussian (E|z|² = 1): Box–Muller on two uniforms
//!   `u₁, u₂` drawn in that order, `r = √(−2 ln(1 − u₁))`,
//!   `z = (r cos 2πu₂ + i r sin 2πu₂)/√2`

use num_complex::Complex64;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::matrix::ComplexMatrix;

/// Stream identifiers, so that independent pipeline stages seeded with the
/// same user seed draw from disjoint sequences.
pub mod stream {
    pub const CORPUS: u64 = 0;
    pub const PRODUCT_SEARCH: u64 = 1;
    pub const JOINT_DIAG: u64 = 2;
}

#[derive(Debug, Clone)]
pub struct PortableRng {
    inner: ChaCha20Rng,
}

impl PortableRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha20Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        Complex64::new(r * t.cos(), r * t.sin()) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn complex_gaussian_vec(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex_gaussian()).collect()
    }

    /// Unit vector with complex Gaussian direction.
    pub fn unit_vector(&mut self, n: usize) -> Vec<Complex64> {
        loop {
            let mut v = self.complex_gaussian_vec(n);
            let norm = crate::matrix::vec_norm(&v);
            if norm > 1e-8 {
                v.iter_mut().for_each(|x| *x /= norm);
                return v;
            }
        }
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian())
    }

    /// Haar-distributed unitary: Gram–Schmidt on a complex Ginibre matrix.
    /// Column-wise Gram–Schmidt fixes the phases of the implied R factor to be
    /// positive, which is the usual phase correction.
    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        loop {
            let g = self.gaussian_matrix(n, n);
            if let Some(q) = crate::linalg::orthonormalize_columns(&g) {
                return q;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_per_seed_and_stream() {
        let a: Vec<u64> = {
            let mut r = PortableRng::new(7, 0);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = PortableRng::new(7, 0);
            (0..4).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = PortableRng::new(7, 1);
            (0..4).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_in_unit_interval_and_gaussian_moments() {
        let mut r = PortableRng::new(1, 0);
        let mut second_moment = 0.0;
        let n = 20_000;
        for _ in 0..n {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            second_moment += r.complex_gaussian().norm_sqr();
        }
        second_moment /= n as f64;
        assert!((second_moment - 1.0).abs() < 0.05, "{second_moment}");
    }

    #[test]
    fn unitary_is_unitary() {
        let mut r = PortableRng::new(3, 0);
        for n in 1..6 {
            let u = r.unitary(n);
            assert!((&u.adjoint() * &u).distance(&ComplexMatrix::identity(n)) < 1e-13);
        }
    }
}
