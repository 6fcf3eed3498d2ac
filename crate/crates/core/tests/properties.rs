use entbound::bounds::{assemble_report, BasisSet};
use entbound::measure::{fourier_basis, MeasurementBasis, StateRef};
use entbound::qcore::{
    coherent_information, partial_trace, pure_coherent_information, schmidt_probabilities,
    shannon_entropy, von_neumann_entropy, DensityMatrix, Side, StateVector,
};
use entbound::random::{haar_unitary, random_basis, random_mixed, random_pure};
use entbound::spin1::{
    beam_split, configurational_coherent_information, ground_state_3mode, number_distribution,
    quench_state, split_report, SectorLifts, Spin1Model, Su3Tilt,
};
use entbound::{qcore::fock_enumerate, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_traces_are_states(seed in any::<u64>(), da in 1usize..5, db in 1usize..5, rank in 1usize..6) {
        let rho = random_mixed(da, db, rank, &mut rng(seed)).unwrap();
        let ix = rho.indexer().unwrap();
        for (side, d) in [(Side::A, da), (Side::B, db)] {
            let r = partial_trace(&rho, &ix, side).unwrap();
            prop_assert_eq!(r.dim(), d);
            prop_assert!((r.trace().re - 1.0).abs() < 1e-10);
            let m = r.entries();
            prop_assert!((m - m.adjoint()).camax() < 1e-12);
        }
    }

    #[test]
    fn pure_state_marginals_share_entropy(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let psi = random_pure(da, db, &mut rng(seed)).unwrap();
        let ix = psi.indexer().unwrap();
        let rho = psi.to_density().with_indexer(ix).unwrap();
        let ha = von_neumann_entropy(&partial_trace(&rho, &ix, Side::A).unwrap()).unwrap();
        let hb = von_neumann_entropy(&partial_trace(&rho, &ix, Side::B).unwrap()).unwrap();
        let schmidt = shannon_entropy(&schmidt_probabilities(&psi.amplitude_matrix(&ix).unwrap()));
        prop_assert!((ha - hb).abs() < 1e-8);
        prop_assert!((ha - schmidt).abs() < 1e-8);
        prop_assert!((coherent_information(&rho, &ix).unwrap() - schmidt).abs() < 1e-8);
    }

    #[test]
    fn local_unitaries_preserve_coherent_information(seed in any::<u64>(), d in 2usize..4) {
        let mut r = rng(seed);
        let psi = random_pure(d, d, &mut r).unwrap();
        let ix = psi.indexer().unwrap();
        let u = haar_unitary(d, &mut r).kronecker(&haar_unitary(d, &mut r));
        let moved = StateVector::new(&u * psi.amplitudes()).unwrap().with_indexer(ix).unwrap();
        let before = pure_coherent_information(&psi, &ix).unwrap();
        let after = pure_coherent_information(&moved, &ix).unwrap();
        prop_assert!((before - after).abs() < 1e-8);
    }

    #[test]
    fn relabelling_outcomes_leaves_bounds_unchanged(seed in any::<u64>(), d in 2usize..5) {
        let mut r = rng(seed);
        let psi = random_pure(d, d, &mut r).unwrap();
        let ix = psi.indexer().unwrap();
        let x = random_basis(d, &mut r).unwrap();
        let z = random_basis(d, &mut r).unwrap();
        let perm: Vec<usize> = (0..d).rev().collect();
        let (xp, zp) = (x.permuted(&perm).unwrap(), z.permuted(&perm).unwrap());
        let a = assemble_report((&psi).into(), &ix, &BasisSet { x: &x, x_prime: &x, z: &z, z_prime: &z }, None).unwrap();
        let b = assemble_report((&psi).into(), &ix, &BasisSet { x: &xp, x_prime: &x, z: &zp, z_prime: &z }, None).unwrap();
        prop_assert!((a.bound_fsd - b.bound_fsd).abs() < 1e-9);
        prop_assert!((a.q_c - b.q_c).abs() < 1e-9);
        prop_assert!((a.q_mu - b.q_mu).abs() < 1e-12);
    }

    #[test]
    fn bounds_are_valid_and_ordered(seed in any::<u64>(), d in 2usize..5, mixed in any::<bool>()) {
        let mut r = rng(seed);
        let bases: Vec<MeasurementBasis> = (0..4).map(|_| random_basis(d, &mut r).unwrap()).collect();
        let set = BasisSet { x: &bases[0], x_prime: &bases[1], z: &bases[2], z_prime: &bases[3] };
        let report = if mixed {
            let rho = random_mixed(d, d, 1 + (seed % 4) as usize, &mut r).unwrap();
            assemble_report(StateRef::Mixed(&rho), &rho.indexer().unwrap(), &set, None).unwrap()
        } else {
            let psi = random_pure(d, d, &mut r).unwrap();
            assemble_report((&psi).into(), &psi.indexer().unwrap(), &set, None).unwrap()
        };
        let truth = report.true_neg_hab.unwrap();
        prop_assert!(report.bound_fsd <= truth + 1e-7);
        prop_assert!(report.bound_mu <= truth + 1e-7);
        prop_assert!(report.q_mu <= report.q_c + 1e-9);
        prop_assert!(report.q_c <= report.q_fsd + 1e-9);
    }

    #[test]
    fn beam_splitter_preserves_norm(seed in any::<u64>(), n in 1usize..7) {
        let basis = fock_enumerate(3, n).unwrap();
        let mut r = rng(seed);
        let v = entbound::random::ginibre(basis.len(), 1, &mut r).column(0).into_owned();
        let psi = StateVector::normalized(v).unwrap();
        let split = beam_split(&psi, &basis).unwrap();
        let p = number_distribution(&split);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        let conf = configurational_coherent_information(&split).unwrap();
        let full = pure_coherent_information(&split.to_dense().unwrap(), &split.to_dense().unwrap().indexer().unwrap()).unwrap();
        prop_assert!((full - conf - shannon_entropy(&p)).abs() < 1e-8);
    }

    #[test]
    fn spin1_bounds_respect_hierarchy(tg in 0.0f64..0.6, n in 2usize..7, seed in any::<u64>()) {
        let model = Spin1Model::quench(n, -1.0).unwrap();
        let split = beam_split(&quench_state(&model, tg).unwrap(), &fock_enumerate(3, n).unwrap()).unwrap();
        let u = haar_unitary(3, &mut rng(seed));
        let r = split_report(&split, &SectorLifts::new(&u, split.space()).unwrap()).unwrap();
        let q_pn = r.q_pn.unwrap();
        prop_assert_eq!(r.q_mu, 0.0);
        prop_assert!(q_pn <= r.q_c + 1e-9);
        prop_assert!(r.q_c <= r.q_fsd + 1e-9);
        prop_assert!(r.bound_fsd <= r.true_neg_hab.unwrap() + 1e-7);
    }
}

#[test]
fn maximally_entangled_states_saturate_every_bound() {
    for d in [2, 3, 4, 5, 8] {
        let psi = StateVector::maximally_entangled(d).unwrap();
        let ix = psi.indexer().unwrap();
        let x = MeasurementBasis::computational(d).unwrap();
        let f = fourier_basis(d).unwrap();
        // conj(F) on B makes both Z outcomes perfectly correlated
        let fc = MeasurementBasis::new(f.columns().map(|c| c.conj()), f.labels().to_vec()).unwrap();
        let r = assemble_report((&psi).into(), &ix, &BasisSet { x: &x, x_prime: &x, z: &f, z_prime: &fc }, None).unwrap();
        let log_d = (d as f64).log2();
        for v in [r.bound_fsd, r.bound_mu, r.bound_c, r.true_neg_hab.unwrap()] {
            assert!((v - log_d).abs() < 1e-8, "d={d}: {v} vs {log_d}");
        }
    }
}

#[test]
fn werner_mixture_coherent_information() {
    // p|Φ⁺⟩⟨Φ⁺| + (1−p) I/4: eigenvalues (p + (1−p)/4, (1−p)/4 ×3), marginal I/2.
    let bell = StateVector::maximally_entangled(2).unwrap();
    let ix = bell.indexer().unwrap();
    for p in [0.0, 0.3, 0.8, 1.0] {
        let mix = DensityMatrix::new(
            bell.to_density().entries() * C64::from(p)
                + DMatrix::<C64>::identity(4, 4) * C64::from((1.0 - p) / 4.0),
        )
        .unwrap();
        let l1 = p + (1.0 - p) / 4.0;
        let l2 = (1.0 - p) / 4.0;
        let expect = 1.0 - shannon_entropy(&[l1, l2, l2, l2]);
        assert!((coherent_information(&mix, &ix).unwrap() - expect).abs() < 1e-10);
    }
}

#[test]
fn twin_fock_bound_detects_configurational_entanglement() {
    let model = Spin1Model::from_ratio(6, -1.0, -5.0).unwrap();
    let basis = fock_enumerate(3, 6).unwrap();
    let split = beam_split(&ground_state_3mode(&model).unwrap(), &basis).unwrap();
    let tilt = Su3Tilt::fourier([0.0; 3]);
    let r = split_report(&split, &SectorLifts::new(&tilt.unitary(), split.space()).unwrap()).unwrap();
    let truth = r.true_neg_hab.unwrap();
    assert!(r.bound_fsd > 0.0);
    assert!(r.bound_fsd <= truth + 1e-7);
    assert!(r.bound_pn.unwrap() <= r.bound_c + 1e-12);
}
