//! Randomized property suite with counterexample dumps.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use entbound::bounds::{assemble_report, BasisSet};
use entbound::measure::{fourier_basis, MeasurementBasis, StateRef};
use entbound::qcore::{partial_trace, von_neumann_entropy, DensityMatrix, Side, StateVector};
use entbound::random::{random_basis, random_mixed, random_pure};
use entbound::{BoundReport, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::args::VerifyArgs;
use crate::grid::parse_list;
use crate::output::{summary, write_table, RunInfo};
use crate::usage;

const VALIDITY_TOL: f64 = 1e-7;
const HIERARCHY_TOL: f64 = 1e-9;
const TIGHTNESS_TOL: f64 = 1e-8;
const SYMMETRY_TOL: f64 = 1e-8;

pub const PROPERTIES: [&str; 4] = ["validity", "hierarchy", "mub_tightness", "schmidt_symmetry"];

enum Sample {
    Pure(StateVector),
    Mixed(DensityMatrix),
}

struct Trial {
    dim: usize,
    state: Sample,
    bases: [MeasurementBasis; 4],
}

#[derive(Clone, Debug)]
pub struct Failure {
    pub property: &'static str,
    pub trial: usize,
    pub detail: String,
}

/// Outcome of one property over all its checks.
#[derive(Clone, Debug, Default)]
pub struct Tally {
    pub checks: usize,
    pub failures: usize,
    /// Largest observed violation (negative when every check had slack).
    pub worst_margin: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            failures: 0,
            worst_margin: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, margin: f64, tol: f64) -> bool {
        self.checks += 1;
        self.worst_margin = self.worst_margin.max(margin);
        let failed = margin > tol || margin.is_nan();
        if failed {
            self.failures += 1;
        }
        failed
    }
}

fn make_trial(seed: u64, index: usize, dims: &[usize]) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let dim = dims[index % dims.len()];
    let mixed = (index / dims.len()) % 2 == 1;
    let state = if mixed {
        let rank = rng.random_range(1..=dim * dim);
        Sample::Mixed(random_mixed(dim, dim, rank, &mut rng)?)
    } else {
        Sample::Pure(random_pure(dim, dim, &mut rng)?)
    };
    let bases = [
        random_basis(dim, &mut rng)?,
        random_basis(dim, &mut rng)?,
        random_basis(dim, &mut rng)?,
        random_basis(dim, &mut rng)?,
    ];
    Ok(Trial {
        dim,
        state,
        bases,
    })
}

fn report_for(trial: &Trial, corrupt: bool) -> Result<BoundReport> {
    let [x, xp, z, zp] = &trial.bases;
    let set = BasisSet {
        x,
        x_prime: xp,
        z,
        z_prime: zp,
    };
    let (state, ix) = match &trial.state {
        Sample::Pure(p) => (StateRef::Pure(p), p.indexer()),
        Sample::Mixed(r) => (StateRef::Mixed(r), r.indexer()),
    };
    let mut r = assemble_report(state, &ix.context("trial state lacks a bipartition")?, &set, None)?;
    if corrupt {
        r.q_fsd += 1.0;
        r.bound_fsd += 1.0;
    }
    Ok(r)
}

/// Checks for a single trial: `(property, margin, tolerance, detail)`.
fn check_trial(trial: &Trial, corrupt: bool) -> Result<Vec<(&'static str, f64, f64, String)>> {
    let r = report_for(trial, corrupt)?;
    let truth = r.true_neg_hab.unwrap_or(f64::NAN);
    let mut out = vec![
        (
            "validity",
            (r.bound_fsd - truth).max(r.bound_mu - truth),
            VALIDITY_TOL,
            format!("bound_fsd = {}, bound_mu = {}, -H(A|B) = {truth}", r.bound_fsd, r.bound_mu),
        ),
        (
            "hierarchy",
            (r.q_mu - r.q_c).max(r.q_c - r.q_fsd),
            HIERARCHY_TOL,
            format!("q_mu = {}, q_c = {}, q_fsd = {}", r.q_mu, r.q_c, r.q_fsd),
        ),
    ];
    if let Sample::Pure(p) = &trial.state {
        let ix = p.indexer().context("pure trial lacks a bipartition")?;
        let rho = p.to_density().with_indexer(ix)?;
        let ha = von_neumann_entropy(&partial_trace(&rho, &ix, Side::A)?)?;
        let hb = von_neumann_entropy(&partial_trace(&rho, &ix, Side::B)?)?;
        out.push((
            "schmidt_symmetry",
            (ha - hb).abs(),
            SYMMETRY_TOL,
            format!("H(A) = {ha}, H(B) = {hb}"),
        ));
    }
    Ok(out)
}

/// Maximally entangled state with computational and Fourier bases on both
/// sides; every bound must equal `log₂ d`.
fn mub_check(d: usize, corrupt: bool) -> Result<(f64, String)> {
    let psi = StateVector::maximally_entangled(d)?;
    let ix = psi.indexer().context("maximally entangled state lacks a bipartition")?;
    let x = MeasurementBasis::computational(d)?;
    let f = fourier_basis(d)?;
    let set = BasisSet {
        x: &x,
        x_prime: &x,
        z: &f,
        z_prime: &f,
    };
    let mut r = assemble_report((&psi).into(), &ix, &set, None)?;
    if corrupt {
        r.bound_fsd += 1.0;
    }
    let log_d = (d as f64).log2();
    let margin = [r.bound_fsd, r.bound_mu, r.true_neg_hab.unwrap_or(f64::NAN)]
        .iter()
        .map(|v| (v - log_d).abs())
        .fold(0.0, f64::max);
    Ok((
        margin,
        format!(
            "d = {d}: bound_fsd = {}, bound_mu = {}, -H(A|B) = {:?}, log2 d = {log_d}",
            r.bound_fsd, r.bound_mu, r.true_neg_hab
        ),
    ))
}

fn write_matrix(out: &mut String, name: &str, m: &DMatrix<C64>) {
    let _ = writeln!(out, "matrix {name} rows={} cols={}", m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{},{}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// Self-describing text: header lines `key = value`, then matrices as
/// `matrix NAME rows=R cols=C` followed by R lines of row-major `re,im`
/// pairs.
fn serialize_counterexample(failure: &Failure, seed: u64, trial: Option<&Trial>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# entbound counterexample");
    let _ = writeln!(out, "property = {}", failure.property);
    let _ = writeln!(out, "seed = {seed}");
    let _ = writeln!(out, "trial = {}", failure.trial);
    let _ = writeln!(out, "detail = {}", failure.detail);
    if let Some(t) = trial {
        let _ = writeln!(out, "dim_a = {}", t.dim);
        let _ = writeln!(out, "dim_b = {}", t.dim);
        match &t.state {
            Sample::Pure(p) => {
                let _ = writeln!(out, "kind = pure");
                write_matrix(&mut out, "state", &DMatrix::from_column_slice(p.dim(), 1, p.amplitudes().as_slice()));
            }
            Sample::Mixed(r) => {
                let _ = writeln!(out, "kind = mixed");
                write_matrix(&mut out, "state", r.entries());
            }
        }
        for (name, b) in ["X", "X_prime", "Z", "Z_prime"].iter().zip(&t.bases) {
            write_matrix(&mut out, name, b.columns());
        }
    }
    out
}

fn tally_of<'a>(tallies: &'a mut [(&'static str, Tally)], property: &str) -> &'a mut Tally {
    &mut tallies
        .iter_mut()
        .find(|(p, _)| *p == property)
        .expect("property is listed")
        .1
}

fn note(first: &mut Option<Failure>, property: &'static str, trial: usize, detail: &str) {
    if first.is_none() {
        *first = Some(Failure {
            property,
            trial,
            detail: detail.to_string(),
        });
    }
}

pub struct VerifyOutcome {
    pub tallies: Vec<(&'static str, Tally)>,
    pub first_failure: Option<(Failure, String)>,
}

pub fn run_suite(seed: u64, trials: usize, dims: &[usize], corrupt: bool) -> Result<VerifyOutcome> {
    let per_trial: Vec<Vec<(&'static str, f64, f64, String)>> = (0..trials)
        .into_par_iter()
        .map(|i| check_trial(&make_trial(seed, i, dims)?, corrupt))
        .collect::<Result<_>>()?;
    let mut tallies: Vec<(&'static str, Tally)> = PROPERTIES.iter().map(|p| (*p, Tally::new())).collect();
    let mut first: Option<Failure> = None;
    for (i, checks) in per_trial.iter().enumerate() {
        for (property, margin, tol, detail) in checks {
            if tally_of(&mut tallies, property).record(*margin, *tol) {
                note(&mut first, property, i, detail);
            }
        }
    }
    let mut mub_dims = dims.to_vec();
    mub_dims.sort_unstable();
    mub_dims.dedup();
    // MUB checks are numbered after the random trials.
    for (k, &d) in mub_dims.iter().enumerate() {
        let (margin, detail) = mub_check(d, corrupt)?;
        if tally_of(&mut tallies, "mub_tightness").record(margin, TIGHTNESS_TOL) {
            note(&mut first, "mub_tightness", trials + k, &detail);
        }
    }
    let first_failure = match first {
        Some(f) => {
            let trial = if f.trial < trials {
                Some(make_trial(seed, f.trial, dims)?)
            } else {
                None
            };
            let text = serialize_counterexample(&f, seed, trial.as_ref());
            Some((f, text))
        }
        None => None,
    };
    Ok(VerifyOutcome {
        tallies,
        first_failure,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<i32> {
    let dims: Vec<usize> = parse_list(&args.dims).map_err(usage)?;
    if dims.iter().any(|&d| d < 2) {
        return Err(usage("--dims entries must be at least 2"));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let mut info = RunInfo::new("verify", crate::output::parse_log_base(&args.common.log_base));
    info.set("seed", args.common.seed);
    info.set("trials", args.trials);
    info.set("dims", &args.dims);
    if args.corrupt_q_fsd {
        info.set("corrupt-q-fsd", true);
    }
    let outcome = run_suite(args.common.seed, args.trials, &dims, args.corrupt_q_fsd)?;
    let to_file = args.common.out.is_some();
    let header: Vec<String> = ["property", "checks", "failures", "worst_margin"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = outcome
        .tallies
        .iter()
        .map(|(p, t)| {
            vec![
                p.to_string(),
                t.checks.to_string(),
                t.failures.to_string(),
                t.worst_margin.to_string(),
            ]
        })
        .collect();
    write_table(args.common.out.as_deref(), &info, &header, &rows)?;
    for (p, t) in &outcome.tallies {
        summary(
            to_file,
            &format!("{p}: {} checks, {} failures, worst margin {}", t.checks, t.failures, t.worst_margin),
        );
    }
    match outcome.first_failure {
        None => {
            summary(to_file, "all properties hold");
            Ok(0)
        }
        Some((f, text)) => {
            write_dump(&args.dump, &text)?;
            eprintln!(
                "property {} violated at trial {}: {} (counterexample written to {})",
                f.property,
                f.trial,
                f.detail,
                args.dump.display()
            );
            Ok(1)
        }
    }
}

fn write_dump(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
