use nalgebra::{DMatrix, Matrix2, Vector2};
use rayon::prelude::*;

use super::hamiltonian::{build_reduced_hamiltonian, embed_reduced};
use super::rotation::{SectorLifts, Su3Tilt};
use super::split::{beam_split, configurational_coherent_information, SplitState};
use super::Spin1Model;
use crate::bounds::{assemble_from_tables, BoundReport, MeasuredTables, SectorPartition};
use crate::error::{invalid, Result};
use crate::measure::{JointDistribution, OverlapMatrix};
use crate::qcore::{evolve, fock_enumerate, ground_state, StateVector};
use crate::C64;

/// Ground-state phase of the spin-1 model, decided by `q` against `±q_c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Polar,
    BrokenAxisymmetry,
    TwinFock,
}

impl Phase {
    pub fn of(model: &Spin1Model) -> Self {
        let r = model.q_over_qc();
        if r >= 1.0 {
            Phase::Polar
        } else if r <= -1.0 {
            Phase::TwinFock
        } else {
            Phase::BrokenAxisymmetry
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Phase::Polar => "polar",
            Phase::BrokenAxisymmetry => "broken-axisymmetry",
            Phase::TwinFock => "twin-fock",
        }
    }
}

/// Appends the Gell-Mann coefficients `c1..c8` and the phase imprints as
/// report parameters.
pub fn with_tilt_params(mut r: BoundReport, tilt: &Su3Tilt) -> BoundReport {
    for (k, c) in tilt.coefficients.iter().enumerate() {
        r = r.with_param(&format!("c{}", k + 1), c);
    }
    for (name, p) in ["phi_plus", "phi_zero", "phi_minus"].iter().zip(&tilt.phases) {
        r = r.with_param(name, p);
    }
    r
}

/// Bounds for a split state with `X = X'` the bare mode basis and
/// `Z = Z'` the occupation basis after the rotation described by `lifts`.
/// Tables are assembled sector by sector; the truth reference is the
/// configurational coherent information.
pub fn split_report(state: &SplitState, lifts: &SectorLifts) -> Result<BoundReport> {
    let space = state.space();
    let n_tot = state.particles();
    if lifts.len() != n_tot + 1 {
        return Err(invalid("rotation lifts do not cover every sector"));
    }
    let d = space.dim();
    let labels = space.labels();
    let mut p_xx = vec![0.0; d * d];
    let mut p_zz = vec![0.0; d * d];
    let mut p_zx = vec![0.0; d * d];
    let mut overlap = vec![0.0; d * d];
    for n in 0..=n_tot {
        let psi = state.block(n);
        let ga = lifts.lift(n);
        let gb = lifts.lift(n_tot - n);
        let z_a = ga * psi;
        let zz = &z_a * gb.transpose();
        let (ra, cb) = (space.offset(n), space.offset(n_tot - n));
        let fill = |table: &mut [f64], m: &DMatrix<C64>| {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    table[(ra + i) * d + cb + j] = m[(i, j)].norm_sqr();
                }
            }
        };
        fill(&mut p_xx, psi);
        fill(&mut p_zz, &zz);
        fill(&mut p_zx, &z_a);
        // c(x, z) = |⟨x|Γ†|z⟩|² = |Γ[z, x]|² within the sector
        for x in 0..ga.ncols() {
            for z in 0..ga.nrows() {
                overlap[(ra + x) * d + ra + z] = ga[(z, x)].norm_sqr();
            }
        }
    }
    let joint = |t: Vec<f64>| JointDistribution::new(d, d, t, labels.clone(), labels.clone());
    let tables = MeasuredTables {
        p_xx: joint(p_xx)?,
        p_zz: joint(p_zz)?,
        p_zx: joint(p_zx)?,
    };
    let c = OverlapMatrix::from_table(d, overlap, labels.clone(), labels)?;
    let partition = SectorPartition::new(space.sector_of_each());
    let truth = configurational_coherent_information(state)?;
    Ok(assemble_from_tables(&tables, &c, Some(&partition), Some(truth))?
        .with_param("N", n_tot))
}

/// `|0,N,0⟩` evolved for time `t` under the full Hamiltonian, computed in
/// the zero-magnetization subspace and embedded in the 3-mode basis.
pub fn quench_state(model: &Spin1Model, t: f64) -> Result<StateVector> {
    let h = build_reduced_hamiltonian(model)?;
    let psi0 = StateVector::basis(h.dim(), 0)?;
    let psi = evolve(&h, &psi0, t)?;
    embed_reduced(&psi, &fock_enumerate(3, model.particles)?)
}

/// Lowest-energy state with zero magnetization, embedded in the 3-mode basis.
pub fn ground_state_3mode(model: &Spin1Model) -> Result<StateVector> {
    let h = build_reduced_hamiltonian(model)?;
    let (_, psi) = ground_state(&h)?;
    embed_reduced(&psi, &fock_enumerate(3, model.particles)?)
}

/// Reports along a quench from the polar state, one per entry of `t_grid`
/// (time in units of `1/|g|`).
pub fn quench_sweep(model: &Spin1Model, t_grid: &[f64], tilt: &Su3Tilt) -> Result<Vec<BoundReport>> {
    if t_grid.is_empty() {
        return Err(invalid("empty time grid"));
    }
    model.validate()?;
    let basis = fock_enumerate(3, model.particles)?;
    let lifts = SectorLifts::new(&tilt.unitary(), &super::LocalSpace::new(model.particles)?)?;
    let g = model.coupling.abs();
    t_grid
        .par_iter()
        .map(|&tg| {
            let t = if g > 0.0 { tg / g } else { tg };
            let psi = quench_state(model, t)?;
            let r = split_report(&beam_split(&psi, &basis)?, &lifts)?
                .with_param("g", model.coupling)
                .with_param("tg", tg);
            Ok(with_tilt_params(r, tilt))
        })
        .collect()
}

/// Ground-state reports over `q/q_c` values, tagged with the phase.
pub fn ground_scan(
    particles: usize,
    coupling: f64,
    q_grid: &[f64],
    tilt: &Su3Tilt,
) -> Result<Vec<BoundReport>> {
    if coupling == 0.0 {
        return Err(invalid("ground-state scan needs g != 0"));
    }
    if q_grid.is_empty() {
        return Err(invalid("empty q grid"));
    }
    let basis = fock_enumerate(3, particles)?;
    let lifts = SectorLifts::new(&tilt.unitary(), &super::LocalSpace::new(particles)?)?;
    q_grid
        .par_iter()
        .map(|&r| {
            let model = Spin1Model::from_ratio(particles, coupling, r)?;
            let psi = ground_state_3mode(&model)?;
            let rep = split_report(&beam_split(&psi, &basis)?, &lifts)?
                .with_param("g", coupling)
                .with_param("q_over_qc", r)
                .with_param("phase", Phase::of(&model).label());
            Ok(with_tilt_params(rep, tilt))
        })
        .collect()
}

/// Least-squares fit of `y = a·log₂(N + b) + c`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub residuals: Vec<f64>,
}

impl LogFit {
    pub fn rss(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }

    pub fn eval(&self, n: f64) -> f64 {
        self.a * (n + self.b).log2() + self.c
    }
}

/// Optimal `(a, c)` for fixed `b` and the residual sum of squares.
fn linear_part(ns: &[f64], ys: &[f64], b: f64) -> (f64, f64, f64) {
    let mut ata = Matrix2::<f64>::zeros();
    let mut aty = Vector2::<f64>::zeros();
    for (&n, &y) in ns.iter().zip(ys) {
        let row = Vector2::new((n + b).log2(), 1.0);
        ata += row * row.transpose();
        aty += row * y;
    }
    let sol = ata
        .try_inverse()
        .map(|inv| inv * aty)
        .unwrap_or_else(|| Vector2::new(0.0, ys.iter().sum::<f64>() / ys.len() as f64));
    let rss = ns
        .iter()
        .zip(ys)
        .map(|(&n, &y)| (sol[0] * (n + b).log2() + sol[1] - y).powi(2))
        .sum();
    (sol[0], sol[1], rss)
}

/// Search interval for the offset `b` used by default.
pub const DEFAULT_B_RANGE: (f64, f64) = (f64::NEG_INFINITY, 64.0);

/// Fits `y = a·log₂(N + b) + c` with `b` restricted to `b_range`; the lower
/// end is raised if needed so that every `N + b` stays at least 1.
pub fn fit_log(ns: &[f64], ys: &[f64], b_range: (f64, f64)) -> Result<LogFit> {
    if ns.len() != ys.len() {
        return Err(invalid("fit needs as many values as abscissae"));
    }
    let mut distinct = ns.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(invalid(format!(
            "three-parameter fit needs at least 4 distinct points, got {}",
            distinct.len()
        )));
    }
    let lo = b_range.0.max(1.0 - distinct[0]);
    let hi = b_range.1;
    if !(hi >= lo) {
        return Err(invalid(format!("empty range for b: [{lo}, {hi}]")));
    }
    let rss = |b: f64| linear_part(ns, ys, b).2;
    const GRID: usize = 400;
    let step = (hi - lo) / GRID as f64;
    let best = (0..=GRID)
        .map(|k| lo + step * k as f64)
        .min_by(|x, y| rss(*x).total_cmp(&rss(*y)))
        .expect("nonempty grid");
    let (mut a, mut bb) = ((best - step).max(lo), (best + step).min(hi));
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..100 {
        let m1 = bb - inv_phi * (bb - a);
        let m2 = a + inv_phi * (bb - a);
        if rss(m1) <= rss(m2) {
            bb = m2;
        } else {
            a = m1;
        }
    }
    let mid = 0.5 * (a + bb);
    let b = if rss(mid) <= rss(best) { mid } else { best };
    let (fa, fc, _) = linear_part(ns, ys, b);
    let residuals = ns
        .iter()
        .zip(ys)
        .map(|(&n, &y)| y - (fa * (n + b).log2() + fc))
        .collect();
    Ok(LogFit {
        a: fa,
        b,
        c: fc,
        residuals,
    })
}

#[derive(Clone, Debug)]
pub struct ScalingPoint {
    pub particles: usize,
    pub report: BoundReport,
}

#[derive(Clone, Debug)]
pub struct ScalingResult {
    pub points: Vec<ScalingPoint>,
    pub bound_fit: LogFit,
    pub truth_fit: LogFit,
}

/// Ground states at fixed `q/q_c` for each `N`; fits the detected bound and
/// the configurational coherent information against `log₂(N + b)`. Odd `N`
/// values are reported but left out of both fits.
pub fn twin_fock_scaling(
    n_list: &[usize],
    coupling: f64,
    q_over_qc: f64,
    tilt: &Su3Tilt,
    b_range: (f64, f64),
) -> Result<ScalingResult> {
    let evens: Vec<usize> = n_list.iter().copied().filter(|n| n % 2 == 0).collect();
    if evens.len() < 4 {
        return Err(invalid(format!(
            "scaling fit needs at least 4 even N values, got {}",
            evens.len()
        )));
    }
    let points = n_list
        .par_iter()
        .map(|&n| {
            let report = ground_scan(n, coupling, &[q_over_qc], tilt)?.remove(0);
            Ok(ScalingPoint {
                particles: n,
                report,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit_points: Vec<&ScalingPoint> = points.iter().filter(|p| p.particles % 2 == 0).collect();
    let ns: Vec<f64> = fit_points.iter().map(|p| p.particles as f64).collect();
    let bound: Vec<f64> = fit_points.iter().map(|p| p.report.bound_fsd).collect();
    let truth: Vec<f64> = fit_points
        .iter()
        .map(|p| p.report.true_neg_hab.unwrap_or(f64::NAN))
        .collect();
    Ok(ScalingResult {
        bound_fit: fit_log(&ns, &bound, b_range)?,
        truth_fit: fit_log(&ns, &truth, b_range)?,
        points,
    })
}
