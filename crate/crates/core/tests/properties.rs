use pptcanon::matrix::ComplexMatrix;
use pptcanon::rng::PortableRng;
use pptcanon::{
    decompose, gen_state, hermitian_eig, numerical_rank, ppt_report, psd_check, verify_decomposition, FamilyMode,
    GenSpec, Scramble, Subsystems, ToleranceConfig, TripartiteState, DEFAULT_TRIALS,
};
use proptest::prelude::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn hermitian(rng: &mut PortableRng, n: usize) -> ComplexMatrix {
    rng.gaussian_matrix(n, n).hermitian_part()
}

fn random_state(rng: &mut PortableRng, m: usize, n: usize, rank: usize) -> TripartiteState {
    let d = 2 * m * n;
    let g = rng.gaussian_matrix(d, rank);
    TripartiteState::new(m, n, &g * &g.adjoint()).unwrap()
}

fn sorted_spectrum(h: &ComplexMatrix) -> Vec<f64> {
    hermitian_eig(h, &tol()).unwrap().eigenvalues
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = PortableRng::new(seed, 0);
        let h = hermitian(&mut rng, n);
        let es = hermitian_eig(&h, &tol()).unwrap();
        prop_assert!(es.reconstruct().distance(&h) <= 1e-10 * h.frobenius_norm().max(1.0));
        prop_assert!(es.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rank_and_psd_invariant_under_unitaries(seed in any::<u64>(), n in 2usize..=12, rank in 1usize..=12) {
        let rank = rank.min(n);
        let mut rng = PortableRng::new(seed, 0);
        let g = rng.gaussian_matrix(n, rank);
        let h = &g * &g.adjoint();
        let u = rng.unitary(n);
        let rotated = (&(&u * &h) * &u.adjoint()).hermitian_part();
        prop_assert_eq!(numerical_rank(&h, &tol()), rank);
        prop_assert_eq!(numerical_rank(&rotated, &tol()), rank);
        prop_assert!(psd_check(&h, &tol()).unwrap().ok);
        prop_assert!(psd_check(&rotated, &tol()).unwrap().ok);
    }

    #[test]
    fn partial_transpose_matches_complement_spectrum(seed in any::<u64>(), m in 2usize..=3, n in 1usize..=3) {
        let mut rng = PortableRng::new(seed, 0);
        let rho = random_state(&mut rng, m, n, 3);
        for s in Subsystems::all_subsets() {
            let x = sorted_spectrum(rho.partial_transpose(s).matrix());
            let y = sorted_spectrum(rho.partial_transpose(s.complement()).matrix());
            for (a, b) in x.iter().zip(&y) {
                prop_assert!((a - b).abs() <= 1e-12 * rho.trace());
            }
            prop_assert_eq!(rho.partial_transpose(s).partial_transpose(s), rho.clone());
        }
    }

    #[test]
    fn local_conjugation_preserves_ppt_verdicts(seed in 0u64..200) {
        let t = tol();
        let mut rng = PortableRng::new(seed, 3);
        let ppt = gen_state(&GenSpec::new(2, 2, seed)).unwrap();
        let npt = gen_state(&GenSpec::new(2, 2, seed).control(true)).unwrap();
        let (la, lb, lc) = (rng.gaussian_matrix(2, 2), rng.gaussian_matrix(2, 2), rng.gaussian_matrix(2, 2));
        for (rho, expect) in [(ppt, true), (npt, false)] {
            let moved = rho.local_conjugate(&la, &lb, &lc, &t).unwrap().normalized();
            prop_assert_eq!(ppt_report(&moved, &t).unwrap().overall_ppt, expect);
        }
    }
}

#[test]
fn decompose_survives_local_unitaries() {
    let t = tol();
    for seed in 0..20 {
        let spec = GenSpec::new(3, 3, seed).mode(FamilyMode::Conjugated).scramble(Scramble::Unitary);
        let rho = gen_state(&spec).unwrap();
        let mut rng = PortableRng::new(seed, 5);
        let moved = rho.local_conjugate(&rng.unitary(2), &rng.unitary(3), &rng.unitary(3), &t).unwrap();
        let dec = decompose(&moved, &t, DEFAULT_TRIALS, seed).unwrap();
        assert!(dec.terms.len() <= 3);
        assert!(verify_decomposition(&moved, &dec).unwrap() <= 1e-8);
        assert!((dec.total_weight() - moved.trace()).abs() <= 1e-8 * moved.trace());
    }
}

#[test]
fn decompose_is_reproducible() {
    let t = tol();
    let rho = gen_state(&GenSpec::new(4, 5, 3).scramble(Scramble::Invertible)).unwrap();
    let a = decompose(&rho, &t, DEFAULT_TRIALS, 11).unwrap();
    let b = decompose(&rho, &t, DEFAULT_TRIALS, 11).unwrap();
    assert_eq!(a, b);
}

#[test]
fn generic_high_rank_state_is_rejected_not_certified() {
    let t = tol();
    let mut rng = PortableRng::new(8, 0);
    let rho = random_state(&mut rng, 2, 2, 5);
    assert!(decompose(&rho, &t, DEFAULT_TRIALS, 0).is_err());
}
