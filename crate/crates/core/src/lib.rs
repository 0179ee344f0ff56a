//! Canonical forms and separability certificates for rank-`N` PPT states on
//! `C² ⊗ C^M ⊗ C^N`.
//!
//! A PPT state of rank `N` whose `⟨1_A, (M−1)_B|ρ|1_A, (M−1)_B⟩` block has
//! full rank can be filtered on subsystem C into the Gram form
//! `ρ = (I ⊗ √F) G†G (I ⊗ √F)` with a block row
//! `G = [D·A_{M−1} … D·A_1  D  A_{M−1} … A_1  I]` of commuting normal
//! matrices. Jointly diagonalizing that family yields an explicit sum of
//! `N` product projectors, emitted as a [`SeparableDecomposition`].

pub mod canonical;
pub mod corpus;
pub mod error;
pub mod io;
pub mod joint;
pub mod linalg;
pub mod matrix;
pub mod rng;
pub mod separability;
pub mod tensor;

pub use canonical::{
    canonicalize, check_hypotheses, kernel_witnesses, reconstruct, CanonicalDiagnostics, CanonicalFamily,
    HypothesisReport,
};
pub use corpus::{gen_family, gen_state, FamilyMode, GenSpec, Scramble};
pub use error::{Error, Result};
pub use joint::{joint_diagonalize, verify_joint, JointEigenSystem};
pub use linalg::{hermitian_eig, inv_sqrt, numerical_rank, psd_check, EigenSystem, PsdVerdict, ToleranceConfig};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use separability::{
    align, decompose, find_product_vector, ppt_report, verify_decomposition, PptReport, ProductTerm,
    SeparableDecomposition, DEFAULT_TRIALS,
};
pub use tensor::{kron, BlockAddress, Subsystems, TripartiteState};
