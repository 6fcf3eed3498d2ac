//! Two distinguishable particles on an `L`-site chain.
//!
//! The product basis is `|i_A, i_B⟩` with composite index `i_A * L + i_B`.
//! Time is dimensionless (`tJ`, with ħ = 1).

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::bounds::{assemble_report, BasisSet, BoundReport};
use crate::error::{invalid, Result};
use crate::measure::MeasurementBasis;
use crate::qcore::{ground_state, BipartiteIndexer, HermitianOperator, StateVector};
use crate::C64;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeModel {
    pub sites: usize,
    pub hopping: f64,
    pub interaction: f64,
    pub boundary: Boundary,
}

impl LatticeModel {
    /// Open chain with `J = 1` and `U = u_over_j`.
    pub fn open(sites: usize, u_over_j: f64) -> Result<Self> {
        let m = Self {
            sites,
            hopping: 1.0,
            interaction: u_over_j,
            boundary: Boundary::Open,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(invalid(format!("lattice needs L >= 2, got {}", self.sites)));
        }
        if !(self.hopping > 0.0) {
            return Err(invalid(format!("tunneling rate must be positive, got {}", self.hopping)));
        }
        if !self.interaction.is_finite() {
            return Err(invalid("interaction must be finite"));
        }
        Ok(())
    }

    pub fn indexer(&self) -> BipartiteIndexer {
        BipartiteIndexer::new(self.sites, self.sites).expect("L >= 2")
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let l = self.sites;
        let mut b: Vec<(usize, usize)> = (0..l - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && l > 2 {
            b.push((l - 1, 0));
        }
        b
    }
}

/// Single-particle hopping matrix with `−J` on each bond.
pub fn hopping_matrix(model: &LatticeModel) -> DMatrix<f64> {
    let l = model.sites;
    let mut h = DMatrix::zeros(l, l);
    for (i, j) in model.bonds() {
        h[(i, j)] -= model.hopping;
        h[(j, i)] -= model.hopping;
    }
    h
}

pub fn build_hubbard(model: &LatticeModel) -> Result<HermitianOperator> {
    model.validate()?;
    let l = model.sites;
    let ix = model.indexer();
    let hop = hopping_matrix(model);
    let mut h = DMatrix::<C64>::zeros(l * l, l * l);
    for a in 0..l {
        for b in 0..l {
            let k = ix.index(a, b);
            if a == b {
                h[(k, k)] += C64::from(model.interaction);
            }
            for a2 in 0..l {
                if hop[(a2, a)] != 0.0 {
                    h[(ix.index(a2, b), k)] += C64::from(hop[(a2, a)]);
                }
            }
            for b2 in 0..l {
                if hop[(b2, b)] != 0.0 {
                    h[(ix.index(a, b2), k)] += C64::from(hop[(b2, b)]);
                }
            }
        }
    }
    HermitianOperator::dense(h)
}

fn site_labels(l: usize) -> Vec<String> {
    (1..=l).map(|i| format!("site {i}")).collect()
}

pub fn site_basis(l: usize) -> Result<MeasurementBasis> {
    if l < 2 {
        return Err(invalid(format!("lattice needs L >= 2, got {l}")));
    }
    MeasurementBasis::new(DMatrix::identity(l, l), site_labels(l))
}

/// Position measurement after free tunneling for time `t`: columns are
/// `U_t†|i⟩` with `U_t = exp(−i h t)`.
pub fn tilted_basis(model: &LatticeModel, t: f64) -> Result<MeasurementBasis> {
    model.validate()?;
    if !(t >= 0.0) {
        return Err(invalid(format!("tunneling time must be nonnegative, got {t}")));
    }
    let l = model.sites;
    let eig = SymmetricEigen::new(hopping_matrix(model));
    let v = eig.eigenvectors.map(C64::from);
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::from_polar(1.0, e * t)));
    let u_dag = &v * phases * v.adjoint();
    MeasurementBasis::new(u_dag, site_labels(l))
}

/// Convenience for the open chain with `J` and `L`.
pub fn tilted_basis_open(l: usize, j: f64, t: f64) -> Result<MeasurementBasis> {
    let model = LatticeModel {
        sites: l,
        hopping: j,
        interaction: 0.0,
        boundary: Boundary::Open,
    };
    tilted_basis(&model, t)
}

pub fn lattice_ground_state(model: &LatticeModel) -> Result<StateVector> {
    let h = build_hubbard(model)?;
    let (_, psi) = ground_state(&h)?;
    psi.with_indexer(model.indexer())
}

/// Report for a given state at tunneling time `t`.
pub fn lattice_report(model: &LatticeModel, psi: &StateVector, t: f64) -> Result<BoundReport> {
    let x = site_basis(model.sites)?;
    let z = tilted_basis(model, t)?;
    let bases = BasisSet {
        x: &x,
        x_prime: &x,
        z: &z,
        z_prime: &z,
    };
    Ok(assemble_report(psi.into(), &model.indexer(), &bases, None)?
        .with_param("L", model.sites)
        .with_param("U_over_J", model.interaction / model.hopping)
        .with_param("tJ", t * model.hopping))
}

/// Ground state of the Hubbard model, site basis for `X = X'`, tilted basis
/// at each `t` for `Z = Z'`. Output order follows `t_grid`.
pub fn sweep_lattice(model: &LatticeModel, t_grid: &[f64]) -> Result<Vec<BoundReport>> {
    if t_grid.is_empty() {
        return Err(invalid("empty tunneling-time grid"));
    }
    let psi = lattice_ground_state(model)?;
    t_grid
        .par_iter()
        .map(|&t| lattice_report(model, &psi, t))
        .collect()
}
