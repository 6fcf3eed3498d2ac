//! Derivative-free maximisation.
//!
//! Nelder–Mead on a box, with the first run started from a caller-supplied
//! point and further runs from seeded random points inside the box. Runs
//! are independent and evaluated in parallel; the returned trace is ordered
//! by run, then by evaluation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::BoundReport;
use crate::error::{invalid, Result};
use crate::lattice::{lattice_ground_state, lattice_report, LatticeModel};
use crate::spin1::{split_report, SectorLifts, SplitState, Su3Tilt, TILT_PARAMS};

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    /// Evaluation budget of each run.
    pub max_evals: usize,
    /// Runs in addition to the one started at the warm start.
    pub restarts: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Per-dimension `[lo, hi]`; empty means unbounded.
    pub bounds: Vec<(f64, f64)>,
    /// Initial simplex edge as a fraction of the box width (absolute when
    /// unbounded).
    pub initial_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            restarts: 3,
            tolerance: 1e-10,
            seed: 0,
            bounds: Vec::new(),
            initial_step: 0.1,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(invalid("nothing to optimize: zero parameters"));
        }
        if self.max_evals == 0 {
            return Err(invalid("max_evals must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        if !(self.initial_step > 0.0) {
            return Err(invalid("initial step must be positive"));
        }
        if !self.bounds.is_empty() && self.bounds.len() != dim {
            return Err(invalid(format!(
                "{} bounds for {dim} parameters",
                self.bounds.len()
            )));
        }
        if self.bounds.iter().any(|&(lo, hi)| !(lo < hi) || !lo.is_finite() || !hi.is_finite()) {
            return Err(invalid("every bound must be a finite interval with lo < hi"));
        }
        Ok(())
    }

    fn clamp(&self, p: &mut [f64]) {
        for (x, &(lo, hi)) in p.iter_mut().zip(&self.bounds) {
            *x = x.clamp(lo, hi);
        }
    }

    fn step(&self, k: usize) -> f64 {
        self.bounds
            .get(k)
            .map_or(self.initial_step, |(lo, hi)| self.initial_step * (hi - lo))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TracePoint {
    pub run: usize,
    pub eval: usize,
    pub params: Vec<f64>,
    pub value: f64,
    /// Best value seen so far within the run.
    pub incumbent: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub params: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    /// True when the best run met the tolerance before its budget ran out.
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

struct Run<'a, F> {
    f: &'a F,
    config: &'a OptimizerConfig,
    run: usize,
    trace: Vec<TracePoint>,
    best: (Vec<f64>, f64),
}

impl<F: Fn(&[f64]) -> f64> Run<'_, F> {
    /// Value to maximize at the clamped point; non-finite values count as −∞.
    fn eval(&mut self, p: &mut [f64]) -> f64 {
        self.config.clamp(p);
        let mut v = (self.f)(p);
        if v.is_nan() {
            v = f64::NEG_INFINITY;
        }
        if v > self.best.1 || self.trace.is_empty() {
            self.best = (p.to_vec(), v);
        }
        self.trace.push(TracePoint {
            run: self.run,
            eval: self.trace.len(),
            params: p.to_vec(),
            value: v,
            incumbent: self.best.1,
        });
        v
    }

    fn budget_left(&self) -> bool {
        self.trace.len() < self.config.max_evals
    }

    /// Nelder–Mead on `−f`. Returns whether the tolerance was reached.
    fn nelder_mead(&mut self, start: &[f64]) -> bool {
        let n = start.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let mut x0 = start.to_vec();
        let v0 = self.eval(&mut x0);
        simplex.push((x0.clone(), v0));
        for k in 0..n {
            if !self.budget_left() {
                return false;
            }
            let mut x = x0.clone();
            let h = self.config.step(k);
            x[k] += h;
            if let Some(&(_, hi)) = self.config.bounds.get(k) {
                if x[k] > hi {
                    x[k] = x0[k] - h;
                }
            }
            let v = self.eval(&mut x);
            simplex.push((x, v));
        }
        let tol = self.config.tolerance;
        loop {
            simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
            let (fbest, fworst) = (simplex[0].1, simplex[n].1);
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if (fbest - fworst).abs() <= tol && diameter <= tol.sqrt() {
                return true;
            }
            if !self.budget_left() {
                return false;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let mut xr = along(1.0);
            let vr = self.eval(&mut xr);
            if vr > simplex[0].1 {
                if !self.budget_left() {
                    simplex[n] = (xr, vr);
                    continue;
                }
                let mut xe = along(2.0);
                let ve = self.eval(&mut xe);
                simplex[n] = if ve > vr { (xe, ve) } else { (xr, vr) };
                continue;
            }
            if vr > simplex[n - 1].1 {
                simplex[n] = (xr, vr);
                continue;
            }
            if !self.budget_left() {
                return false;
            }
            let (mut xc, outside) = if vr > simplex[n].1 {
                (along(0.5), true)
            } else {
                (along(-0.5), false)
            };
            let vc = self.eval(&mut xc);
            let accept = if outside { vc >= vr } else { vc > simplex[n].1 };
            if accept {
                simplex[n] = (xc, vc);
                continue;
            }
            let best = simplex[0].0.clone();
            for entry in simplex.iter_mut().skip(1) {
                if !self.budget_left() {
                    return false;
                }
                let mut x: Vec<f64> = best
                    .iter()
                    .zip(&entry.0)
                    .map(|(b, x)| b + 0.5 * (x - b))
                    .collect();
                let v = self.eval(&mut x);
                *entry = (x, v);
            }
        }
    }
}

/// Maximizes `f` starting from `start`, plus `config.restarts` runs from
/// random points in the box. Deterministic for a fixed configuration.
pub fn maximize<F>(f: &F, start: &[f64], config: &OptimizerConfig) -> Result<OptimizeResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let dim = start.len();
    config.validate(dim)?;
    if config.restarts > 0 && config.bounds.is_empty() {
        return Err(invalid("random restarts need a bounded parameter box"));
    }
    let runs: Vec<(Vec<TracePoint>, (Vec<f64>, f64), bool)> = (0..=config.restarts)
        .into_par_iter()
        .map(|run| {
            let x0: Vec<f64> = if run == 0 {
                start.to_vec()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(run as u64));
                config.bounds.iter().map(|&(lo, hi)| rng.random_range(lo..hi)).collect()
            };
            let mut r = Run {
                f,
                config,
                run,
                trace: Vec::new(),
                best: (x0.clone(), f64::NEG_INFINITY),
            };
            let converged = r.nelder_mead(&x0);
            (r.trace, r.best, converged)
        })
        .collect();
    let mut best_run = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.1 .1 > runs[best_run].1 .1 {
            best_run = k;
        }
    }
    let converged = runs[best_run].2;
    let (params, value) = runs[best_run].1.clone();
    let trace: Vec<TracePoint> = runs.into_iter().flat_map(|r| r.0).collect();
    Ok(OptimizeResult {
        params,
        value,
        evals: trace.len(),
        converged,
        trace,
    })
}

/// Box for tilt parameters: Gell-Mann coefficients in `[−π, π]`, phases in
/// `[−π, π)` (the upper end is approached but never exceeded in practice).
pub fn tilt_bounds() -> Vec<(f64, f64)> {
    vec![(-PI, PI); TILT_PARAMS]
}

/// Maximizes `bound_fsd` of a split state over tilted measurement bases,
/// starting from `warm`.
pub fn optimize_tilt(
    state: &SplitState,
    warm: &Su3Tilt,
    config: &OptimizerConfig,
) -> Result<(Su3Tilt, BoundReport, OptimizeResult)> {
    let mut config = config.clone();
    if config.bounds.is_empty() {
        config.bounds = tilt_bounds();
    }
    let objective = |p: &[f64]| -> f64 {
        Su3Tilt::from_params(p)
            .and_then(|t| SectorLifts::new(&t.unitary(), state.space()))
            .and_then(|lifts| split_report(state, &lifts))
            .map_or(f64::NEG_INFINITY, |r| r.bound_fsd)
    };
    let mut start = warm.params();
    config.clamp(&mut start);
    let result = maximize(&objective, &start, &config)?;
    let tilt = Su3Tilt::from_params(&result.params)?;
    let report = split_report(state, &SectorLifts::new(&tilt.unitary(), state.space())?)?;
    Ok((tilt, report, result))
}

/// Lattice sweep over `t_grid` followed by a one-dimensional search for the
/// best tunneling time between the neighbours of the best grid point.
pub fn refine_lattice_time(
    model: &LatticeModel,
    t_grid: &[f64],
    config: &OptimizerConfig,
) -> Result<(f64, BoundReport)> {
    if t_grid.is_empty() {
        return Err(invalid("empty tunneling-time grid"));
    }
    let psi = lattice_ground_state(model)?;
    let values: Vec<f64> = t_grid
        .par_iter()
        .map(|&t| lattice_report(model, &psi, t).map(|r| r.bound_fsd))
        .collect::<Result<_>>()?;
    let k = (0..values.len())
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("nonempty grid");
    let lo = if k > 0 { t_grid[k - 1] } else { t_grid[k] };
    let hi = if k + 1 < t_grid.len() { t_grid[k + 1] } else { t_grid[k] };
    let mut t_best = t_grid[k];
    if hi > lo {
        let cfg = OptimizerConfig {
            bounds: vec![(lo.max(0.0), hi)],
            restarts: 0,
            ..config.clone()
        };
        let objective = |p: &[f64]| {
            lattice_report(model, &psi, p[0]).map_or(f64::NEG_INFINITY, |r| r.bound_fsd)
        };
        let res = maximize(&objective, &[t_grid[k]], &cfg)?;
        if res.value > values[k] {
            t_best = res.params[0];
        }
    }
    Ok((t_best, lattice_report(model, &psi, t_best)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::fock_enumerate;
    use crate::spin1::{beam_split, quench_state, Spin1Model};
    use std::f64::consts::FRAC_PI_4;

    fn quadratic(p0: Vec<f64>) -> impl Fn(&[f64]) -> f64 + Sync {
        move |p: &[f64]| -p.iter().zip(&p0).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
    }

    #[test]
    fn recovers_quadratic_peak() {
        let p0 = vec![0.3, -1.1, 2.0];
        let cfg = OptimizerConfig {
            bounds: vec![(-3.0, 3.0); 3],
            ..Default::default()
        };
        let r = maximize(&quadratic(p0.clone()), &[0.0; 3], &cfg).unwrap();
        for (a, b) in r.params.iter().zip(&p0) {
            assert!((a - b).abs() < 1e-4);
        }
        assert!(r.converged);
        assert_eq!(r.evals, r.trace.len());
    }

    #[test]
    fn incumbent_is_monotone_and_dominates() {
        let cfg = OptimizerConfig {
            bounds: vec![(-2.0, 2.0); 2],
            max_evals: 60,
            restarts: 2,
            ..Default::default()
        };
        let f = |p: &[f64]| (3.0 * p[0]).sin() * (2.0 * p[1]).cos() - 0.1 * p[0] * p[0];
        let r = maximize(&f, &[0.5, 0.5], &cfg).unwrap();
        for run in 0..=2 {
            let pts: Vec<&TracePoint> = r.trace.iter().filter(|t| t.run == run).collect();
            assert!(pts.len() <= 60);
            for w in pts.windows(2) {
                assert!(w[1].incumbent >= w[0].incumbent);
            }
        }
        assert!(r.trace.iter().all(|t| t.value <= r.value));
        assert!(!r.converged);
    }

    #[test]
    fn identical_seeds_identical_traces() {
        let cfg = OptimizerConfig {
            bounds: vec![(-1.0, 1.0); 4],
            max_evals: 200,
            restarts: 3,
            seed: 42,
            ..Default::default()
        };
        let f = |p: &[f64]| -p.iter().map(|x| (x - 0.2).abs()).sum::<f64>();
        let a = maximize(&f, &[0.0; 4], &cfg).unwrap();
        let b = maximize(&f, &[0.0; 4], &cfg).unwrap();
        assert_eq!(a, b);
        let c = maximize(&f, &[0.0; 4], &OptimizerConfig { seed: 43, ..cfg }).unwrap();
        assert_ne!(a.trace, c.trace);
    }

    #[test]
    fn config_validation() {
        let f = |_: &[f64]| 0.0;
        let bad = [
            OptimizerConfig { max_evals: 0, ..Default::default() },
            OptimizerConfig { tolerance: 0.0, ..Default::default() },
            OptimizerConfig { bounds: vec![(1.0, 0.0)], ..Default::default() },
            OptimizerConfig { bounds: vec![(0.0, 1.0); 2], ..Default::default() },
        ];
        for cfg in bad {
            assert!(maximize(&f, &[0.5], &cfg).is_err());
        }
        assert!(maximize(&f, &[], &OptimizerConfig::default()).is_err());
        // random restarts need a box
        assert!(maximize(&f, &[0.5], &OptimizerConfig::default()).is_err());
    }

    #[test]
    fn lattice_refinement_reaches_unbiased_point() {
        let m = LatticeModel::open(2, -100.0).unwrap();
        let grid: Vec<f64> = (0..=8).map(|k| 0.1 * k as f64).collect();
        let cfg = OptimizerConfig { restarts: 0, ..Default::default() };
        let (t, r) = refine_lattice_time(&m, &grid, &cfg).unwrap();
        assert!((t - FRAC_PI_4).abs() < 1e-3);
        let truth = r.true_neg_hab.unwrap();
        assert!(r.bound_fsd <= truth + 1e-7);
        // the two-site ground state at U/J = −100 is nearly a Bell pair
        assert!((r.bound_fsd - 1.0).abs() < 2e-2);
        assert!(r.bound_fsd >= 0.98 * truth);
    }

    #[test]
    fn tilt_search_never_loses_to_warm_start() {
        let model = Spin1Model::quench(4, -1.0).unwrap();
        let basis = fock_enumerate(3, 4).unwrap();
        let split = beam_split(&quench_state(&model, 0.3).unwrap(), &basis).unwrap();
        let warm = Su3Tilt::fourier([0.0; 3]);
        let base = split_report(&split, &SectorLifts::new(&warm.unitary(), split.space()).unwrap())
            .unwrap()
            .bound_fsd;
        let cfg = OptimizerConfig { max_evals: 150, restarts: 1, seed: 7, ..Default::default() };
        let (_, report, res) = optimize_tilt(&split, &warm, &cfg).unwrap();
        assert!(report.bound_fsd >= base - 1e-12);
        assert!((report.bound_fsd - res.value).abs() < 1e-12);
        assert!(report.bound_fsd <= report.true_neg_hab.unwrap() + 1e-7);
    }
}
