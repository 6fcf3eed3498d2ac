//! Collective spin-1 system.
//!
//! Three internal modes `(+1, 0, −1)` hold `N` bosons. The Hamiltonian
//! creates pairs in the `±1` modes out of the `0` mode:
//!
//! `H = g a†₊ a†₋ a₀ a₀ + h.c. + [g(N₀ − ½) + q](N₊ + N₋)`.
//!
//! A balanced beam splitter on every mode divides the system into halves
//! `A` and `B`; local measurements then count particles per mode, possibly
//! after a collective SU(3) rotation.

mod hamiltonian;
mod report;
mod rotation;
mod split;

pub use hamiltonian::{
    build_reduced_hamiltonian, build_spin1_hamiltonian, embed_reduced, fock_state, magnetization,
    zero_magnetization_states,
};
pub use report::{
    fit_log, ground_scan, ground_state_3mode, quench_state, quench_sweep, split_report,
    twin_fock_scaling, with_tilt_params, LogFit, DEFAULT_B_RANGE, Phase, ScalingPoint, ScalingResult,
};
pub use rotation::{
    bare_mode_basis, exp_i_hermitian, fourier_unitary, gell_mann, quadratic_operator,
    sector_lift, su3_rotation, tilted_mode_basis, unitarity_error, unitary_generator, SectorLifts,
    Su3Tilt, TILT_PARAMS,
};
pub use split::{
    beam_split, configurational_coherent_information, number_distribution, LocalSpace, SplitState,
};

use crate::error::{invalid, Result};

pub(crate) const PLUS: usize = 0;
pub(crate) const ZERO: usize = 1;
pub(crate) const MINUS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spin1Model {
    pub particles: usize,
    pub coupling: f64,
    pub zeeman: f64,
}

impl Spin1Model {
    pub fn new(particles: usize, coupling: f64, zeeman: f64) -> Result<Self> {
        let m = Self {
            particles,
            coupling,
            zeeman,
        };
        m.validate()?;
        Ok(m)
    }

    /// Quench point `q = −g(N − ½)`.
    pub fn quench(particles: usize, coupling: f64) -> Result<Self> {
        Self::new(particles, coupling, -coupling * (particles as f64 - 0.5))
    }

    /// `q` given in units of `q_c`.
    pub fn from_ratio(particles: usize, coupling: f64, q_over_qc: f64) -> Result<Self> {
        let qc = 2.0 * particles as f64 * coupling.abs();
        Self::new(particles, coupling, q_over_qc * qc)
    }

    /// Critical Zeeman shift `q_c = 2N|g|`.
    pub fn q_c(&self) -> f64 {
        2.0 * self.particles as f64 * self.coupling.abs()
    }

    pub fn q_over_qc(&self) -> f64 {
        self.zeeman / self.q_c()
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 {
            return Err(invalid("spin-1 model needs N >= 1"));
        }
        if !self.coupling.is_finite() || !self.zeeman.is_finite() {
            return Err(invalid("g and q must be finite"));
        }
        Ok(())
    }
}
