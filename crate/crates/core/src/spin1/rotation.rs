//! Collective SU(3) rotations and their lift to bosonic sectors.
//!
//! A single-particle unitary `U` acts on the `n`-particle sector through
//! `Γ(U) = exp(i Σ_jk K_jk a†_j a_k)` with `U = exp(iK)`, so that
//! `Γ(U) a†_k Γ(U)† = Σ_j U_jk a†_j`.

use std::f64::consts::PI;

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{DMatrix, DVector};

use super::split::LocalSpace;
use crate::error::{invalid, Error, Result};
use crate::measure::MeasurementBasis;
use crate::qcore::FockBasis;
use crate::C64;

const UNITARY_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The eight Gell-Mann matrices, normalized to `tr(λ_a λ_b) = 2δ_ab`.
pub fn gell_mann() -> [DMatrix<C64>; 8] {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let s = 1.0 / 3f64.sqrt();
    let m = |v: [C64; 9]| DMatrix::from_row_slice(3, 3, &v);
    [
        m([z, o, z, o, z, z, z, z, z]),
        m([z, -i, z, i, z, z, z, z, z]),
        m([o, z, z, z, -o, z, z, z, z]),
        m([z, z, o, z, z, z, o, z, z]),
        m([z, z, -i, z, z, z, i, z, z]),
        m([z, z, z, z, z, o, z, o, z]),
        m([z, z, z, z, z, -i, z, i, z]),
        m([c(s, 0.0), z, z, z, c(s, 0.0), z, z, z, c(-2.0 * s, 0.0)]),
    ]
}

/// `exp(iK)` for Hermitian `K`.
pub fn exp_i_hermitian(k: &DMatrix<C64>) -> DMatrix<C64> {
    let herm = (k + k.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, e)));
    v * d * v.adjoint()
}

pub fn unitarity_error(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).camax()
}

/// Hermitian `K` with `exp(iK) = U`, eigenphases on the principal branch
/// `(−π, π]`.
pub fn unitary_generator(u: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if !u.is_square() || unitarity_error(u) > UNITARY_TOL {
        return Err(invalid("matrix is not unitary"));
    }
    let n = u.nrows();
    let schur = Schur::try_new(u.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::NotConverged("Schur decomposition of unitary".into()))?;
    let (q, t) = schur.unpack();
    let phases = DVector::from_fn(n, |j, _| C64::from(t[(j, j)].arg()));
    let k = &q * DMatrix::from_diagonal(&phases) * q.adjoint();
    Ok((&k + k.adjoint()) * c(0.5, 0.0))
}

/// `[F]_jk = (i/√3) exp(2πi jk/3)`, the single-particle Fourier transform.
pub fn fourier_unitary() -> DMatrix<C64> {
    let s = 1.0 / 3f64.sqrt();
    DMatrix::from_fn(3, 3, |j, k| {
        c(0.0, 1.0) * C64::from_polar(s, 2.0 * PI * ((j * k) % 3) as f64 / 3.0)
    })
}

/// Tilt of the measurement basis: Gell-Mann coefficients of the rotation
/// generator and phases `(φ₊, φ₀, φ₋)` imprinted before the rotation,
/// giving `U = exp(i Σ_a c_a λ_a) · diag(e^{iφ})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Su3Tilt {
    pub coefficients: [f64; 8],
    pub phases: [f64; 3],
}

/// Number of free tilt parameters (8 generator coefficients + 3 phases).
pub const TILT_PARAMS: usize = 11;

impl Su3Tilt {
    pub fn identity() -> Self {
        Self {
            coefficients: [0.0; 8],
            phases: [0.0; 3],
        }
    }

    /// Coefficients reproducing `u` up to a global phase.
    pub fn from_unitary(u: &DMatrix<C64>, phases: [f64; 3]) -> Result<Self> {
        if u.shape() != (3, 3) {
            return Err(invalid("SU(3) tilt needs a 3x3 unitary"));
        }
        let k = unitary_generator(u)?;
        let mut coefficients = [0.0; 8];
        for (ca, lam) in coefficients.iter_mut().zip(gell_mann().iter()) {
            *ca = (&k * lam).trace().re / 2.0;
        }
        Ok(Self {
            coefficients,
            phases,
        })
    }

    /// Single-particle Fourier transform after imprinting `phases`.
    pub fn fourier(phases: [f64; 3]) -> Self {
        Self::from_unitary(&fourier_unitary(), phases).expect("Fourier matrix is unitary")
    }

    /// Imprint `(0.095, −0.495, 0.400)π` followed by the Fourier transform.
    pub fn fourier_short_time() -> Self {
        Self::fourier([0.095 * PI, -0.495 * PI, 0.400 * PI])
    }

    pub fn from_params(p: &[f64]) -> Result<Self> {
        if p.len() != TILT_PARAMS {
            return Err(invalid(format!("tilt needs {TILT_PARAMS} parameters, got {}", p.len())));
        }
        let mut coefficients = [0.0; 8];
        coefficients.copy_from_slice(&p[..8]);
        Ok(Self {
            coefficients,
            phases: [p[8], p[9], p[10]],
        })
    }

    pub fn params(&self) -> Vec<f64> {
        self.coefficients.iter().chain(&self.phases).copied().collect()
    }

    pub fn generator(&self) -> DMatrix<C64> {
        gell_mann()
            .iter()
            .zip(&self.coefficients)
            .fold(DMatrix::zeros(3, 3), |acc, (lam, &ca)| acc + lam * C64::from(ca))
    }

    pub fn unitary(&self) -> DMatrix<C64> {
        su3_rotation(&self.coefficients, &self.phases)
    }
}

/// `exp(iC) · diag(e^{iφ})` with `C = Σ_a params[a] λ_a`.
pub fn su3_rotation(params: &[f64; 8], phases: &[f64; 3]) -> DMatrix<C64> {
    let gen = gell_mann()
        .iter()
        .zip(params)
        .fold(DMatrix::zeros(3, 3), |acc, (lam, &ca)| acc + lam * C64::from(ca));
    let imprint = DMatrix::from_diagonal(&DVector::from_iterator(
        3,
        phases.iter().map(|&p| C64::from_polar(1.0, p)),
    ));
    exp_i_hermitian(&gen) * imprint
}

/// `Σ_jk K_jk a†_j a_k` on an `n`-particle Fock sector.
pub fn quadratic_operator(k: &DMatrix<C64>, sector: &FockBasis) -> DMatrix<C64> {
    let modes = sector.modes();
    let d = sector.len();
    let mut q = DMatrix::zeros(d, d);
    for (col, occ) in sector.states().iter().enumerate() {
        for j in 0..modes {
            q[(col, col)] += k[(j, j)] * C64::from(occ[j] as f64);
        }
        for src in 0..modes {
            if occ[src] == 0 {
                continue;
            }
            for dst in 0..modes {
                if dst == src || k[(dst, src)] == C64::from(0.0) {
                    continue;
                }
                let mut target = occ.clone();
                target[src] -= 1;
                target[dst] += 1;
                let amp = ((occ[src] * (occ[dst] + 1)) as f64).sqrt();
                let row = sector.index_of(&target).expect("hop stays in sector");
                q[(row, col)] += k[(dst, src)] * C64::from(amp);
            }
        }
    }
    q
}

/// Second-quantized lift `Γ(U)` of a 3×3 unitary to the `n`-particle sector.
pub fn sector_lift(u: &DMatrix<C64>, sector: &FockBasis) -> Result<DMatrix<C64>> {
    if u.nrows() != sector.modes() {
        return Err(invalid("unitary size differs from the number of modes"));
    }
    let k = unitary_generator(u)?;
    Ok(exp_i_hermitian(&quadratic_operator(&k, sector)))
}

/// Lifts of a single-particle unitary on every sector of a local space.
#[derive(Clone, Debug)]
pub struct SectorLifts {
    lifts: Vec<DMatrix<C64>>,
}

impl SectorLifts {
    pub fn new(u: &DMatrix<C64>, space: &LocalSpace) -> Result<Self> {
        let k = unitary_generator(u)?;
        let lifts = (0..=space.particles())
            .map(|n| exp_i_hermitian(&quadratic_operator(&k, space.sector(n))))
            .collect();
        Ok(Self { lifts })
    }

    pub fn lift(&self, n: usize) -> &DMatrix<C64> {
        &self.lifts[n]
    }

    pub fn len(&self) -> usize {
        self.lifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lifts.is_empty()
    }
}

/// Occupation measurement after the local rotation `Γ(U)`: block-diagonal
/// over sectors with columns `Γ(U)†|m⟩`, labelled by the occupation tuple.
pub fn tilted_mode_basis(u: &DMatrix<C64>, space: &LocalSpace) -> Result<MeasurementBasis> {
    let lifts = SectorLifts::new(u, space)?;
    let d = space.dim();
    let mut cols = DMatrix::zeros(d, d);
    for n in 0..=space.particles() {
        let off = space.offset(n);
        let g_dag = lifts.lift(n).adjoint();
        cols.view_mut((off, off), g_dag.shape()).copy_from(&g_dag);
    }
    MeasurementBasis::new(cols, space.labels())
}

/// Bare mode basis (occupation numbers, no rotation).
pub fn bare_mode_basis(space: &LocalSpace) -> MeasurementBasis {
    let d = space.dim();
    MeasurementBasis::from_unitary_unchecked(DMatrix::identity(d, d), space.labels())
}
