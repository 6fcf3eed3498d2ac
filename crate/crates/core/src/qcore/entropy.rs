use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;

use super::state::hermiticity_error;
use super::{BipartiteIndexer, DensityMatrix, Side, StateVector, STATE_TOL};
use crate::error::{mismatch, Error, Result};
use crate::C64;

/// Eigenvalues in `[-EIGENVALUE_CLIP, 0)` are treated as zero; anything more
/// negative marks an invalid density matrix.
pub const EIGENVALUE_CLIP: f64 = 1e-9;

/// Unit of information. Every quantity in the crate is computed in bits;
/// conversion happens once, at output time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LogBase {
    #[default]
    Bits,
    Nats,
}

impl LogBase {
    /// Factor turning a value in bits into this unit.
    pub fn scale(self) -> f64 {
        match self {
            LogBase::Bits => 1.0,
            LogBase::Nats => std::f64::consts::LN_2,
        }
    }

    pub fn convert(self, bits: f64) -> f64 {
        bits * self.scale()
    }

    pub fn name(self) -> &'static str {
        match self {
            LogBase::Bits => "2",
            LogBase::Nats => "e",
        }
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Entropy of a spectrum after clipping tiny negative eigenvalues.
pub fn entropy_from_spectrum(eigs: &[f64]) -> Result<f64> {
    let mut h = 0.0;
    for &l in eigs {
        if l < -EIGENVALUE_CLIP {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {l:e}"
            )));
        }
        if l > 0.0 {
            h -= l * l.log2();
        }
    }
    Ok(h.max(0.0))
}

/// Real eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Von Neumann entropy of a raw matrix, validating Hermiticity first.
pub fn matrix_entropy(m: &DMatrix<C64>) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::InvalidArgument("matrix must be square".into()));
    }
    let err = hermiticity_error(m);
    if err > STATE_TOL {
        return Err(Error::InvalidArgument(format!(
            "matrix is not Hermitian (deviation {err:e})"
        )));
    }
    entropy_from_spectrum(&hermitian_eigenvalues(m))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    matrix_entropy(rho.entries())
}

pub fn partial_trace(
    rho: &DensityMatrix,
    indexer: &BipartiteIndexer,
    keep: Side,
) -> Result<DensityMatrix> {
    if rho.dim() != indexer.dim() {
        return Err(mismatch(format!(
            "density matrix has dim {} but indexer covers {}",
            rho.dim(),
            indexer.dim()
        )));
    }
    let (da, db) = (indexer.dim_a(), indexer.dim_b());
    let m = rho.entries();
    let out = match keep {
        Side::A => DMatrix::from_fn(da, da, |a1, a2| {
            (0..db)
                .map(|b| m[(indexer.index(a1, b), indexer.index(a2, b))])
                .sum()
        }),
        Side::B => DMatrix::from_fn(db, db, |b1, b2| {
            (0..da)
                .map(|a| m[(indexer.index(a, b1), indexer.index(a, b2))])
                .sum()
        }),
    };
    Ok(DensityMatrix::from_raw(out, None))
}

/// `I_{B>A} = H(ρ_B) − H(ρ_AB)`, in bits.
pub fn coherent_information(rho: &DensityMatrix, indexer: &BipartiteIndexer) -> Result<f64> {
    let rho_b = partial_trace(rho, indexer, Side::B)?;
    Ok(von_neumann_entropy(&rho_b)? - von_neumann_entropy(rho)?)
}

/// Squared Schmidt coefficients of an amplitude matrix `Ψ[a, b]`.
pub fn schmidt_probabilities(psi: &DMatrix<C64>) -> Vec<f64> {
    if psi.nrows() == 0 || psi.ncols() == 0 {
        return Vec::new();
    }
    psi.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .map(|s| s * s)
        .collect()
}

/// Coherent information of a pure state: its entanglement entropy.
pub fn pure_coherent_information(psi: &StateVector, indexer: &BipartiteIndexer) -> Result<f64> {
    let m = psi.amplitude_matrix(indexer)?;
    Ok(shannon_entropy(&schmidt_probabilities(&m)))
}
