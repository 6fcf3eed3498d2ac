use nalgebra::{DMatrix, DVector};

use super::{BipartiteIndexer, STATE_TOL};
use crate::error::{invalid, mismatch, Error, Result};
use crate::C64;

/// Normalized pure state, optionally carrying a bipartite split.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
    indexer: Option<BipartiteIndexer>,
}

impl StateVector {
    /// Wraps `amps`, which must already have unit norm.
    pub fn new(amps: DVector<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(invalid("state vector must be nonempty"));
        }
        let norm_sq = amps.norm_squared();
        if (norm_sq - 1.0).abs() > STATE_TOL {
            return Err(invalid(format!(
                "state vector is not normalized (|psi|^2 = {norm_sq})"
            )));
        }
        Ok(Self { amps, indexer: None })
    }

    /// Normalizes `amps` before wrapping it.
    pub fn normalized(amps: DVector<C64>) -> Result<Self> {
        let norm = amps.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self {
            amps: amps / C64::from(norm),
            indexer: None,
        })
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(invalid(format!("basis index {k} out of range for dim {dim}")));
        }
        let mut amps = DVector::zeros(dim);
        amps[k] = C64::from(1.0);
        Ok(Self { amps, indexer: None })
    }

    /// `|a⟩ ⊗ |b⟩`.
    pub fn product(a: &StateVector, b: &StateVector) -> Self {
        let amps = a.amps.kronecker(&b.amps);
        let indexer = BipartiteIndexer::new(a.dim(), b.dim()).ok();
        Self { amps, indexer }
    }

    /// Maximally entangled state `Σ_x |x⟩|x⟩ / √d`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        let ix = BipartiteIndexer::new(d, d)?;
        let mut amps = DVector::zeros(ix.dim());
        let w = C64::from(1.0 / (d as f64).sqrt());
        for x in 0..d {
            amps[ix.index(x, x)] = w;
        }
        Ok(Self {
            amps,
            indexer: Some(ix),
        })
    }

    pub fn with_indexer(mut self, indexer: BipartiteIndexer) -> Result<Self> {
        if indexer.dim() != self.dim() {
            return Err(mismatch(format!(
                "indexer covers {} states but vector has {}",
                indexer.dim(),
                self.dim()
            )));
        }
        self.indexer = Some(indexer);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn indexer(&self) -> Option<BipartiteIndexer> {
        self.indexer
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// Reshapes the amplitudes into a `dim_a × dim_b` matrix `Ψ[a, b]`.
    pub fn amplitude_matrix(&self, indexer: &BipartiteIndexer) -> Result<DMatrix<C64>> {
        if indexer.dim() != self.dim() {
            return Err(mismatch(format!(
                "indexer covers {} states but vector has {}",
                indexer.dim(),
                self.dim()
            )));
        }
        Ok(DMatrix::from_fn(indexer.dim_a(), indexer.dim_b(), |a, b| {
            self.amps[indexer.index(a, b)]
        }))
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            entries: &self.amps * self.amps.adjoint(),
            indexer: self.indexer,
        }
    }
}

/// Density operator: Hermitian, unit trace, positive semidefinite up to
/// rounding (checked when its spectrum is taken).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
    indexer: Option<BipartiteIndexer>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(invalid("density matrix must be square and nonempty"));
        }
        let herm_err = hermiticity_error(&entries);
        if herm_err > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (max |rho - rho^dag| = {herm_err:e})"
            )));
        }
        let tr = entries.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}, expected 1")));
        }
        Ok(Self {
            entries,
            indexer: None,
        })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_raw(entries: DMatrix<C64>, indexer: Option<BipartiteIndexer>) -> Self {
        Self { entries, indexer }
    }

    /// Convex mixture `Σ w_i |ψ_i⟩⟨ψ_i|`; weights must sum to one.
    pub fn mixture(components: &[(f64, &StateVector)]) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| invalid("mixture needs at least one component"))?;
        let dim = first.1.dim();
        let mut acc = DMatrix::zeros(dim, dim);
        let mut total = 0.0;
        for (w, psi) in components {
            if psi.dim() != dim {
                return Err(mismatch("mixture components differ in dimension"));
            }
            if *w < 0.0 {
                return Err(invalid("mixture weights must be nonnegative"));
            }
            acc += psi.to_density().entries * C64::from(*w);
            total += w;
        }
        if (total - 1.0).abs() > STATE_TOL {
            return Err(invalid(format!("mixture weights sum to {total}")));
        }
        Ok(Self {
            entries: acc,
            indexer: first.1.indexer(),
        })
    }

    /// `ρ_A ⊗ ρ_B`.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        Self {
            entries: a.entries.kronecker(&b.entries),
            indexer: BipartiteIndexer::new(a.dim(), b.dim()).ok(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        Ok(Self {
            entries: DMatrix::identity(dim, dim) * C64::from(1.0 / dim as f64),
            indexer: None,
        })
    }

    pub fn with_indexer(mut self, indexer: BipartiteIndexer) -> Result<Self> {
        if indexer.dim() != self.dim() {
            return Err(mismatch(format!(
                "indexer covers {} states but matrix has dim {}",
                indexer.dim(),
                self.dim()
            )));
        }
        self.indexer = Some(indexer);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn indexer(&self) -> Option<BipartiteIndexer> {
        self.indexer
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }
}

pub(crate) fn hermiticity_error(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_vector() {
        let v = DVector::from_element(2, C64::from(1.0));
        assert!(StateVector::new(v.clone()).is_err());
        let s = StateVector::normalized(v).unwrap();
        assert!((s.amplitudes().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian_density() {
        let mut m = DMatrix::identity(2, 2) * C64::from(0.5);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn rejects_wrong_trace() {
        let m = DMatrix::<C64>::identity(2, 2);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn amplitude_matrix_layout() {
        let a = StateVector::basis(2, 1).unwrap();
        let b = StateVector::basis(3, 2).unwrap();
        let ab = StateVector::product(&a, &b);
        let ix = ab.indexer().unwrap();
        let m = ab.amplitude_matrix(&ix).unwrap();
        assert_eq!(m[(1, 2)], C64::from(1.0));
        assert_eq!(m.iter().filter(|z| z.norm() > 0.0).count(), 1);
    }
}
