use crate::error::{invalid, Result};
use crate::qcore::{fock_enumerate, FockBasis, HermitianOperator, StateVector};
use crate::C64;

use super::{Spin1Model, MINUS, PLUS, ZERO};

/// Full Hamiltonian on the 3-mode, `N`-particle Fock space:
/// `g a†₊ a†₋ a₀ a₀ + h.c. + [g(N₀ − ½) + q](N₊ + N₋)`.
pub fn build_spin1_hamiltonian(model: &Spin1Model) -> Result<(HermitianOperator, FockBasis)> {
    model.validate()?;
    let basis = fock_enumerate(3, model.particles)?;
    let mut trips = Vec::new();
    for (k, occ) in basis.states().iter().enumerate() {
        trips.push((k, k, C64::from(diagonal_energy(model, occ))));
        if let Some((target, amp)) = pair_creation(occ) {
            let j = basis
                .index_of(&target)
                .expect("pair creation conserves particle number");
            let v = C64::from(model.coupling * amp);
            trips.push((j, k, v));
            trips.push((k, j, v));
        }
    }
    Ok((HermitianOperator::sparse(basis.len(), &trips)?, basis))
}

fn diagonal_energy(model: &Spin1Model, occ: &[usize]) -> f64 {
    let n0 = occ[ZERO] as f64;
    let side = (occ[PLUS] + occ[MINUS]) as f64;
    (model.coupling * (n0 - 0.5) + model.zeeman) * side
}

/// `a†₊ a†₋ a₀ a₀ |occ⟩ = amp |target⟩`, if nonzero.
fn pair_creation(occ: &[usize]) -> Option<(Vec<usize>, f64)> {
    let n0 = occ[ZERO];
    if n0 < 2 {
        return None;
    }
    let amp = ((occ[PLUS] + 1) as f64 * (occ[MINUS] + 1) as f64 * n0 as f64 * (n0 - 1) as f64).sqrt();
    let mut target = occ.to_vec();
    target[PLUS] += 1;
    target[MINUS] += 1;
    target[ZERO] -= 2;
    Some((target, amp))
}

/// Zero-magnetization states `|k, N−2k, k⟩`, `k = 0..=N/2`.
pub fn zero_magnetization_states(particles: usize) -> Vec<[usize; 3]> {
    (0..=particles / 2)
        .map(|k| {
            let mut s = [0usize; 3];
            s[PLUS] = k;
            s[MINUS] = k;
            s[ZERO] = particles - 2 * k;
            s
        })
        .collect()
}

/// The Hamiltonian restricted to zero magnetization `N₊ − N₋ = 0`, indexed
/// by the pair number `k` of [`zero_magnetization_states`].
pub fn build_reduced_hamiltonian(model: &Spin1Model) -> Result<HermitianOperator> {
    model.validate()?;
    let states = zero_magnetization_states(model.particles);
    let mut trips = Vec::new();
    for (k, occ) in states.iter().enumerate() {
        trips.push((k, k, C64::from(diagonal_energy(model, occ))));
        if let Some((_, amp)) = pair_creation(occ) {
            let v = C64::from(model.coupling * amp);
            trips.push((k + 1, k, v));
            trips.push((k, k + 1, v));
        }
    }
    HermitianOperator::sparse(states.len(), &trips)
}

/// Lifts a zero-magnetization state into the full 3-mode basis.
pub fn embed_reduced(reduced: &StateVector, basis: &FockBasis) -> Result<StateVector> {
    let states = zero_magnetization_states(basis.particles());
    if reduced.dim() != states.len() || basis.modes() != 3 {
        return Err(invalid("reduced state does not match the 3-mode basis"));
    }
    let mut amps = nalgebra::DVector::zeros(basis.len());
    for (occ, a) in states.iter().zip(reduced.amplitudes().iter()) {
        let i = basis.index_of(occ).expect("zero-magnetization state in basis");
        amps[i] = *a;
    }
    StateVector::new(amps)
}

/// Fock state with the given occupations `(n₊, n₀, n₋)`.
pub fn fock_state(basis: &FockBasis, occ: [usize; 3]) -> Result<StateVector> {
    let i = basis
        .index_of(&occ)
        .ok_or_else(|| invalid(format!("occupation {occ:?} not in basis")))?;
    StateVector::basis(basis.len(), i)
}

/// Magnetization `N₊ − N₋` of a basis tuple.
pub fn magnetization(occ: &[usize]) -> i64 {
    occ[PLUS] as i64 - occ[MINUS] as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{evolve, evolve_with, ground_state, SolverPath};
    use approx::assert_abs_diff_eq;

    fn model(n: usize, q: f64) -> Spin1Model {
        Spin1Model::new(n, -1.0, q).unwrap()
    }

    #[test]
    fn pair_creation_element() {
        let n = 7;
        let m = model(n, 0.3);
        let (h, b) = build_spin1_hamiltonian(&m).unwrap();
        let polar = b.index_of(&[0, n, 0]).unwrap();
        let pair = b.index_of(&[1, n - 2, 1]).unwrap();
        let expect = m.coupling * ((n * (n - 1)) as f64).sqrt();
        assert_abs_diff_eq!(h.element(pair, polar).re, expect, epsilon = 1e-14);
        assert_eq!(h.element(polar, polar), C64::from(0.0));
        let diag = 2.0 * (m.coupling * (n as f64 - 2.0 - 0.5) + m.zeeman);
        assert_abs_diff_eq!(h.element(pair, pair).re, diag, epsilon = 1e-14);
    }

    #[test]
    fn hamiltonian_conserves_magnetization() {
        let (h, b) = build_spin1_hamiltonian(&model(6, 1.7)).unwrap();
        let dense = h.to_dense();
        for i in 0..b.len() {
            for j in 0..b.len() {
                if dense[(i, j)].norm() > 0.0 {
                    assert_eq!(magnetization(b.state(i)), magnetization(b.state(j)));
                }
            }
        }
    }

    #[test]
    fn reduced_hamiltonian_is_projection_of_full() {
        for n in 1..=6 {
            let m = model(n, -0.4 * n as f64);
            let (h, b) = build_spin1_hamiltonian(&m).unwrap();
            let r = build_reduced_hamiltonian(&m).unwrap();
            let states = zero_magnetization_states(n);
            for (i, si) in states.iter().enumerate() {
                for (j, sj) in states.iter().enumerate() {
                    let full = h.element(b.index_of(si).unwrap(), b.index_of(sj).unwrap());
                    assert_eq!(full, r.element(i, j));
                }
            }
        }
    }

    #[test]
    fn quench_in_reduced_space_matches_full_space() {
        for n in 2..=6 {
            let m = Spin1Model::quench(n, -1.0).unwrap();
            let (h, b) = build_spin1_hamiltonian(&m).unwrap();
            let r = build_reduced_hamiltonian(&m).unwrap();
            let polar_full = fock_state(&b, [0, n, 0]).unwrap();
            let polar_red = StateVector::basis(r.dim(), 0).unwrap();
            for t in [0.05, 0.4, 2.0] {
                let full = evolve(&h, &polar_full, t).unwrap();
                let red = embed_reduced(&evolve(&r, &polar_red, t).unwrap(), &b).unwrap();
                assert!((full.amplitudes() - red.amplitudes()).norm() < 1e-10);
                // populations outside zero magnetization stay negligible
                let outside: f64 = b
                    .states()
                    .iter()
                    .zip(full.amplitudes().iter())
                    .filter(|(s, _)| magnetization(s) != 0)
                    .map(|(_, a)| a.norm_sqr())
                    .sum();
                assert!(outside < 1e-12);
            }
        }
    }

    #[test]
    fn krylov_quench_matches_dense() {
        let n = 12;
        let m = Spin1Model::quench(n, -1.0).unwrap();
        let (h, b) = build_spin1_hamiltonian(&m).unwrap();
        let psi = fock_state(&b, [0, n, 0]).unwrap();
        let d = evolve_with(&h, &psi, 0.7, SolverPath::Dense).unwrap();
        let k = evolve_with(&h, &psi, 0.7, SolverPath::Krylov).unwrap();
        assert!((d.amplitudes() - k.amplitudes()).norm() < 1e-9);
    }

    #[test]
    fn reduced_ground_energy_appears_in_full_spectrum() {
        let m = Spin1Model::from_ratio(6, -1.0, 0.3).unwrap();
        let (h, _) = build_spin1_hamiltonian(&m).unwrap();
        let r = build_reduced_hamiltonian(&m).unwrap();
        let (e_red, _) = ground_state(&r).unwrap();
        let spec = crate::qcore::hermitian_eigenvalues(&h.to_dense());
        assert!(spec.iter().any(|e| (e - e_red).abs() < 1e-9));
        assert!(spec[0] <= e_red + 1e-9);
    }
}
