//! Seeded random states, unitaries and bases for property checks.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::measure::MeasurementBasis;
use crate::qcore::{BipartiteIndexer, DensityMatrix, StateVector};
use crate::C64;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix,
/// with the phases of `R`'s diagonal absorbed into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<C64> {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { C64::from(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_basis<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<MeasurementBasis> {
    MeasurementBasis::new(haar_unitary(d, rng), (0..d).map(|x| format!("r{x}")).collect())
}

/// Uniformly random pure state on a `dim_a × dim_b` system.
pub fn random_pure<R: Rng + ?Sized>(dim_a: usize, dim_b: usize, rng: &mut R) -> Result<StateVector> {
    let ix = BipartiteIndexer::new(dim_a, dim_b)?;
    let v = DVector::from_fn(ix.dim(), |_, _| gaussian(rng));
    StateVector::normalized(v)?.with_indexer(ix)
}

/// Random mixed state `G G† / tr(G G†)` with `G` Ginibre of the given rank.
pub fn random_mixed<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let ix = BipartiteIndexer::new(dim_a, dim_b)?;
    let g = ginibre(ix.dim(), rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    let mut rho = m / C64::from(tr);
    // enforce exact Hermiticity after rounding
    rho = (&rho + rho.adjoint()) * C64::from(0.5);
    DensityMatrix::new(rho)?.with_indexer(ix)
}
