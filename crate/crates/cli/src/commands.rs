use std::f64::consts::PI;
use std::path::Path;

use anyhow::Result;
use entbound::lattice::{sweep_lattice, Boundary, LatticeModel};
use entbound::optimize::{optimize_tilt, refine_lattice_time, OptimizeResult, OptimizerConfig};
use entbound::qcore::fock_enumerate;
use entbound::spin1::{
    beam_split, ground_scan, ground_state_3mode, quench_state, twin_fock_scaling, with_tilt_params,
    Phase, Spin1Model, Su3Tilt,
};
use entbound::BoundReport;
use rayon::prelude::*;

use crate::args::{Common, GroundArgs, LatticeArgs, OptimizerArgs, QuenchArgs, TiltArgs};
use crate::grid::{parse_grid, parse_list};
use crate::output::{parse_log_base, summary, write_reports, write_table, RunInfo};
use crate::usage;

const SHORT_TIME_IMPRINT: [f64; 3] = [0.095, -0.495, 0.400];

fn run_info(command: &'static str, common: &Common) -> RunInfo {
    let mut info = RunInfo::new(command, parse_log_base(&common.log_base));
    info.set("seed", common.seed);
    info
}

fn optimizer_config(args: &OptimizerArgs, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        max_evals: args.max_evals,
        restarts: args.restarts,
        tolerance: args.tolerance,
        seed,
        ..OptimizerConfig::default()
    }
}

fn record_optimizer(info: &mut RunInfo, args: &OptimizerArgs) {
    info.set("max-evals", args.max_evals);
    info.set("restarts", args.restarts);
    info.set("tolerance", args.tolerance);
}

fn write_trace(path: &Path, info: &RunInfo, traces: &[(String, OptimizeResult)]) -> Result<()> {
    let dim = traces
        .iter()
        .find_map(|(_, r)| r.trace.first().map(|t| t.params.len()))
        .unwrap_or(0);
    let mut header: Vec<String> = ["point", "run", "eval"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=dim).map(|k| format!("p{k}")));
    header.extend(["value".to_string(), "incumbent".to_string()]);
    let rows: Vec<Vec<String>> = traces
        .iter()
        .flat_map(|(label, res)| {
            res.trace.iter().map(move |t| {
                let mut row = vec![label.clone(), t.run.to_string(), t.eval.to_string()];
                row.extend(t.params.iter().map(|p| p.to_string()));
                row.extend([t.value.to_string(), t.incumbent.to_string()]);
                row
            })
        })
        .collect();
    write_table(Some(path), info, &header, &rows)
}

fn argmax(reports: &[BoundReport]) -> usize {
    (0..reports.len())
        .max_by(|&a, &b| reports[a].bound_fsd.total_cmp(&reports[b].bound_fsd))
        .unwrap_or(0)
}

pub fn lattice(args: &LatticeArgs) -> Result<i32> {
    let grid = parse_grid(&args.t_grid).map_err(usage)?;
    if args.sites < 2 {
        return Err(usage(format!("--L must be at least 2, got {}", args.sites)));
    }
    let model = LatticeModel {
        sites: args.sites,
        hopping: 1.0,
        interaction: args.u_over_j,
        boundary: if args.periodic { Boundary::Periodic } else { Boundary::Open },
    };
    let mut info = run_info("lattice", &args.common);
    info.set("L", args.sites);
    info.set("U-over-J", args.u_over_j);
    info.set("t-grid", &args.t_grid);
    info.set("periodic", args.periodic);
    info.set("refine", args.refine);
    let reports = sweep_lattice(&model, &grid)?;
    let best = argmax(&reports);
    let to_file = args.common.out.is_some();
    let base = info.log_base;
    let r = reports[best].in_base(base);
    summary(
        to_file,
        &format!(
            "max bound_fsd = {} at tJ = {} (true -H(A|B) = {}, max bound_mu = {})",
            r.bound_fsd,
            grid[best],
            r.true_neg_hab.unwrap_or(f64::NAN),
            reports.iter().map(|x| x.in_base(base).bound_mu).fold(f64::NEG_INFINITY, f64::max)
        ),
    );
    if args.refine {
        record_optimizer(&mut info, &args.optimizer);
        let cfg = OptimizerConfig {
            restarts: 0,
            ..optimizer_config(&args.optimizer, args.common.seed)
        };
        let (t, rep) = refine_lattice_time(&model, &grid, &cfg)?;
        let line = format!("refined tJ = {t}, bound_fsd = {}", rep.in_base(base).bound_fsd);
        summary(to_file, &line);
        info.notes.push(line);
    }
    write_reports(args.common.out.as_deref(), &info, &reports)?;
    Ok(0)
}

fn resolve_tilt(t: &TiltArgs, info: &mut RunInfo) -> Result<Su3Tilt> {
    let phases_pi: Vec<f64> = if t.short_time_imprint {
        SHORT_TIME_IMPRINT.to_vec()
    } else if let Some(s) = &t.phases {
        parse_list(s).map_err(usage)?
    } else {
        vec![0.0; 3]
    };
    if phases_pi.len() != 3 {
        return Err(usage("--phases needs three values"));
    }
    let phases = [phases_pi[0] * PI, phases_pi[1] * PI, phases_pi[2] * PI];
    let tilt = match &t.tilt {
        Some(s) => {
            let c: Vec<f64> = parse_list(s).map_err(usage)?;
            if c.len() != 8 {
                return Err(usage("--tilt needs eight Gell-Mann coefficients"));
            }
            let mut coefficients = [0.0; 8];
            coefficients.copy_from_slice(&c);
            Su3Tilt { coefficients, phases }
        }
        None => Su3Tilt::fourier(phases),
    };
    info.set(
        "phases",
        phases_pi.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","),
    );
    info.set("tilt", t.tilt.as_deref().unwrap_or("fourier"));
    info.set("optimize", t.optimize);
    Ok(tilt)
}

pub fn spin1_quench(args: &QuenchArgs) -> Result<i32> {
    if args.particles < 2 {
        return Err(usage(format!("--N must be at least 2, got {}", args.particles)));
    }
    let grid = parse_grid(&args.t_grid).map_err(usage)?;
    let model = match args.q {
        Some(q) => Spin1Model::new(args.particles, args.g, q)?,
        None => Spin1Model::quench(args.particles, args.g)?,
    };
    let mut info = run_info("spin1-quench", &args.common);
    info.set("N", args.particles);
    info.set("g", args.g);
    info.set("q", model.zeeman);
    info.set("t-grid", &args.t_grid);
    let tilt = resolve_tilt(&args.tilt, &mut info)?;
    let reports = if args.tilt.optimize {
        record_optimizer(&mut info, &args.optimizer);
        let cfg = optimizer_config(&args.optimizer, args.common.seed);
        let basis = fock_enumerate(3, args.particles)?;
        let g = args.g.abs();
        let results: Vec<(BoundReport, OptimizeResult)> = grid
            .par_iter()
            .map(|&tg| -> Result<_> {
                let t = if g > 0.0 { tg / g } else { tg };
                let split = beam_split(&quench_state(&model, t)?, &basis)?;
                let (best, rep, res) = optimize_tilt(&split, &tilt, &cfg)?;
                let rep = rep.with_param("g", args.g).with_param("tg", tg);
                Ok((with_tilt_params(rep, &best), res))
            })
            .collect::<Result<_>>()?;
        if let Some(path) = &args.optimizer.trace {
            let traces: Vec<(String, OptimizeResult)> = grid
                .iter()
                .zip(&results)
                .map(|(t, (_, res))| (t.to_string(), res.clone()))
                .collect();
            write_trace(path, &info, &traces)?;
        }
        results.into_iter().map(|(r, _)| r).collect()
    } else {
        entbound::spin1::quench_sweep(&model, &grid, &tilt)?
    };
    let best = argmax(&reports);
    let r = reports[best].in_base(info.log_base);
    let positive: Vec<f64> = grid
        .iter()
        .zip(&reports)
        .filter(|(_, r)| r.bound_fsd > 0.0)
        .map(|(t, _)| *t)
        .collect();
    let window = match (positive.first(), positive.last()) {
        (Some(a), Some(b)) => format!("bound_fsd > 0 for tg in [{a}, {b}] ({} points)", positive.len()),
        _ => "bound_fsd never positive on this grid".to_string(),
    };
    summary(
        args.common.out.is_some(),
        &format!(
            "max bound_fsd = {} at tg = {} (configurational -H(A|B) = {}); {window}",
            r.bound_fsd,
            grid[best],
            r.true_neg_hab.unwrap_or(f64::NAN)
        ),
    );
    write_reports(args.common.out.as_deref(), &info, &reports)?;
    Ok(0)
}

pub fn spin1_ground(args: &GroundArgs) -> Result<i32> {
    if args.g == 0.0 {
        return Err(usage("--g must be nonzero"));
    }
    let mut info = run_info("spin1-ground", &args.common);
    info.set("g", args.g);
    let tilt = resolve_tilt(&args.tilt, &mut info)?;
    let to_file = args.common.out.is_some();
    let base = info.log_base;
    if let Some(list) = &args.scaling {
        let ns: Vec<usize> = parse_list(list).map_err(usage)?;
        info.set("scaling", list);
        info.set("q-over-qc", args.q_over_qc);
        info.set("b-max", args.b_max);
        let res = twin_fock_scaling(
            &ns,
            args.g,
            args.q_over_qc,
            &tilt,
            (f64::NEG_INFINITY, args.b_max),
        )?;
        let s = base.scale();
        for (name, fit) in [("bound_fsd", &res.bound_fit), ("true_neg_hab", &res.truth_fit)] {
            let line = format!(
                "fit {name} = a*log2(N+b)+c: a = {}, b = {}, c = {}, rss = {}",
                fit.a * s,
                fit.b,
                fit.c * s,
                fit.rss() * s * s
            );
            summary(to_file, &line);
            info.notes.push(line);
        }
        let reports: Vec<BoundReport> = res.points.iter().map(|p| p.report.in_base(base)).collect();
        let mut header = reports[0].csv_header();
        header.extend(["fit_residual_bound".to_string(), "fit_residual_truth".to_string()]);
        let mut fit_index = 0;
        let rows: Vec<Vec<String>> = res
            .points
            .iter()
            .zip(&reports)
            .map(|(p, r)| {
                let mut row = r.csv_record();
                if p.particles % 2 == 0 {
                    row.push((res.bound_fit.residuals[fit_index] * s).to_string());
                    row.push((res.truth_fit.residuals[fit_index] * s).to_string());
                    fit_index += 1;
                } else {
                    row.extend([String::new(), String::new()]);
                }
                row
            })
            .collect();
        write_table(args.common.out.as_deref(), &info, &header, &rows)?;
        return Ok(0);
    }
    let q_spec = args.q_grid.as_deref().unwrap_or_default();
    let grid = parse_grid(q_spec).map_err(usage)?;
    info.set("N", args.particles);
    info.set("q-grid", q_spec);
    let reports = if args.tilt.optimize {
        record_optimizer(&mut info, &args.optimizer);
        let cfg = optimizer_config(&args.optimizer, args.common.seed);
        let basis = fock_enumerate(3, args.particles)?;
        let results: Vec<(BoundReport, OptimizeResult)> = grid
            .par_iter()
            .map(|&r| -> Result<_> {
                let model = Spin1Model::from_ratio(args.particles, args.g, r)?;
                let split = beam_split(&ground_state_3mode(&model)?, &basis)?;
                let (best, rep, res) = optimize_tilt(&split, &tilt, &cfg)?;
                let rep = rep
                    .with_param("g", args.g)
                    .with_param("q_over_qc", r)
                    .with_param("phase", Phase::of(&model).label());
                Ok((with_tilt_params(rep, &best), res))
            })
            .collect::<Result<_>>()?;
        if let Some(path) = &args.optimizer.trace {
            let traces: Vec<(String, OptimizeResult)> = grid
                .iter()
                .zip(&results)
                .map(|(q, (_, res))| (q.to_string(), res.clone()))
                .collect();
            write_trace(path, &info, &traces)?;
        }
        results.into_iter().map(|(r, _)| r).collect()
    } else {
        ground_scan(args.particles, args.g, &grid, &tilt)?
    };
    let best = argmax(&reports);
    let r = reports[best].in_base(base);
    summary(
        to_file,
        &format!(
            "max bound_fsd = {} at q/q_c = {} ({} phase, configurational -H(A|B) = {})",
            r.bound_fsd,
            grid[best],
            r.param("phase").unwrap_or(""),
            r.true_neg_hab.unwrap_or(f64::NAN)
        ),
    );
    write_reports(args.common.out.as_deref(), &info, &reports)?;
    Ok(0)
}
