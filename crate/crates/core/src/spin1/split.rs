use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, mismatch, Error, Result};
use crate::qcore::{
    binomial, fock_enumerate, schmidt_probabilities, shannon_entropy, BipartiteIndexer, FockBasis,
    StateVector,
};
use crate::C64;

/// Local Hilbert space of one half after splitting `N` particles: the direct
/// sum of 3-mode sectors with `n = 0..=N` particles, in ascending `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalSpace {
    particles: usize,
    sectors: Vec<FockBasis>,
    offsets: Vec<usize>,
    dim: usize,
}

impl LocalSpace {
    pub fn new(particles: usize) -> Result<Self> {
        let sectors = (0..=particles)
            .map(|n| fock_enumerate(3, n))
            .collect::<Result<Vec<_>>>()?;
        let mut offsets = Vec::with_capacity(sectors.len());
        let mut dim = 0;
        for s in &sectors {
            offsets.push(dim);
            dim += s.len();
        }
        Ok(Self {
            particles,
            sectors,
            offsets,
            dim,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sector(&self, n: usize) -> &FockBasis {
        &self.sectors[n]
    }

    pub fn offset(&self, n: usize) -> usize {
        self.offsets[n]
    }

    /// Occupation-tuple labels over the whole local space.
    pub fn labels(&self) -> Vec<String> {
        self.sectors.iter().flat_map(|s| s.labels()).collect()
    }

    /// Particle number of every local outcome.
    pub fn sector_of_each(&self) -> Vec<usize> {
        self.sectors
            .iter()
            .enumerate()
            .flat_map(|(n, s)| std::iter::repeat_n(n, s.len()))
            .collect()
    }
}

/// Pure state after the beam splitter, stored per sector: block `n` holds
/// the amplitudes with `n` particles in A and `N − n` in B, rows indexed by
/// A's sector-`n` tuples and columns by B's sector-`(N − n)` tuples.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitState {
    space: LocalSpace,
    blocks: Vec<DMatrix<C64>>,
}

impl SplitState {
    /// Builds from explicit sector blocks; the result must be normalized.
    pub fn from_blocks(space: LocalSpace, blocks: Vec<DMatrix<C64>>) -> Result<Self> {
        let n_tot = space.particles();
        if blocks.len() != n_tot + 1 {
            return Err(mismatch(format!(
                "{} blocks for {} particles",
                blocks.len(),
                n_tot
            )));
        }
        for (n, b) in blocks.iter().enumerate() {
            if b.nrows() != space.sector(n).len() || b.ncols() != space.sector(n_tot - n).len() {
                return Err(mismatch(format!("block {n} has the wrong shape")));
            }
        }
        let norm: f64 = blocks.iter().map(|b| b.norm_squared()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("split state norm^2 = {norm}")));
        }
        Ok(Self { space, blocks })
    }

    pub fn space(&self) -> &LocalSpace {
        &self.space
    }

    pub fn particles(&self) -> usize {
        self.space.particles()
    }

    pub fn block(&self, n: usize) -> &DMatrix<C64> {
        &self.blocks[n]
    }

    pub fn blocks(&self) -> &[DMatrix<C64>] {
        &self.blocks
    }

    /// Dense amplitude vector on `local ⊗ local`, with its indexer.
    pub fn to_dense(&self) -> Result<StateVector> {
        let d = self.space.dim();
        let ix = BipartiteIndexer::new(d, d)?;
        let mut amps = DVector::zeros(ix.dim());
        let n_tot = self.particles();
        for (n, b) in self.blocks.iter().enumerate() {
            let (ra, cb) = (self.space.offset(n), self.space.offset(n_tot - n));
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    amps[ix.index(ra + i, cb + j)] = b[(i, j)];
                }
            }
        }
        StateVector::new(amps)?.with_indexer(ix)
    }
}

/// `a†_k → (a†_{A,k} + a†_{B,k})/√2` on every mode. A mode with `n_k`
/// quanta sends `m` of them to A with amplitude `√(C(n_k, m) / 2^{n_k})`.
pub fn beam_split(state3: &StateVector, basis3: &FockBasis) -> Result<SplitState> {
    if basis3.modes() != 3 {
        return Err(invalid("beam splitter expects a 3-mode basis"));
    }
    if state3.dim() != basis3.len() {
        return Err(mismatch(format!(
            "state dim {} vs basis size {}",
            state3.dim(),
            basis3.len()
        )));
    }
    let n_tot = basis3.particles();
    let space = LocalSpace::new(n_tot)?;
    let mut blocks: Vec<DMatrix<C64>> = (0..=n_tot)
        .map(|n| DMatrix::zeros(space.sector(n).len(), space.sector(n_tot - n).len()))
        .collect();
    // weights[n][m] = √(C(n, m) / 2^n)
    let weights: Vec<Vec<f64>> = (0..=n_tot)
        .map(|n| {
            (0..=n)
                .map(|m| (binomial(n, m) / 2f64.powi(n as i32)).sqrt())
                .collect()
        })
        .collect();
    for (occ, &alpha) in basis3.states().iter().zip(state3.amplitudes().iter()) {
        if alpha == C64::from(0.0) {
            continue;
        }
        for m0 in 0..=occ[0] {
            for m1 in 0..=occ[1] {
                for m2 in 0..=occ[2] {
                    let a_occ = [m0, m1, m2];
                    let b_occ = [occ[0] - m0, occ[1] - m1, occ[2] - m2];
                    let n_a = m0 + m1 + m2;
                    let w = weights[occ[0]][m0] * weights[occ[1]][m1] * weights[occ[2]][m2];
                    let ia = space.sector(n_a).index_of(&a_occ).expect("A tuple");
                    let ib = space.sector(n_tot - n_a).index_of(&b_occ).expect("B tuple");
                    blocks[n_a][(ia, ib)] += alpha * w;
                }
            }
        }
    }
    SplitState::from_blocks(space, blocks)
}

/// `p(n)`: probability of `n` particles in A.
pub fn number_distribution(s: &SplitState) -> Vec<f64> {
    s.blocks.iter().map(|b| b.norm_squared()).collect()
}

/// Configurational coherent information `Σ_n p(n) H(ρ_B^(n))`, the
/// entanglement left after removing coherences between particle-number
/// sectors.
pub fn configurational_coherent_information(s: &SplitState) -> Result<f64> {
    let p = number_distribution(s);
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Internal(format!(
            "sector weights sum to {total}, expected 1"
        )));
    }
    let mut h = 0.0;
    for (b, &pn) in s.blocks.iter().zip(&p) {
        if pn <= 0.0 {
            continue;
        }
        let schmidt: Vec<f64> = schmidt_probabilities(b).iter().map(|x| x / pn).collect();
        h += pn * shannon_entropy(&schmidt);
    }
    Ok(h)
}
