//! Acceptance criteria, one line per criterion. Exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::Command;
use std::time::{Duration, Instant};

use entbound::bounds::{assemble_report, BasisSet};
use entbound::lattice::{sweep_lattice, LatticeModel};
use entbound::measure::{fourier_basis, MeasurementBasis, StateRef};
use entbound::qcore::{fock_enumerate, DensityMatrix, StateVector};
use entbound::random::{ginibre, haar_unitary, random_basis, random_mixed, random_pure};
use entbound::spin1::{
    beam_split, ground_state_3mode, quench_state, quench_sweep, split_report, twin_fock_scaling,
    SectorLifts, Spin1Model, SplitState, Su3Tilt, DEFAULT_B_RANGE,
};
use entbound::{BoundReport, C64};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

// ---- test-side oracles ---------------------------------------------------

fn spectrum_entropy(m: &DMatrix<C64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .filter(|&&l| l > 1e-14)
        .map(|&l| -l * l.log2())
        .sum()
}

/// `H(ρ_B) − H(ρ_AB)` with an explicit index loop for the partial trace.
fn oracle_coherent_information(rho: &DMatrix<C64>, da: usize, db: usize) -> f64 {
    let mut rb = DMatrix::<C64>::zeros(db, db);
    for a in 0..da {
        for b in 0..db {
            for b2 in 0..db {
                rb[(b, b2)] += rho[(a * db + b, a * db + b2)];
            }
        }
    }
    spectrum_entropy(&rb) - spectrum_entropy(rho)
}

/// `Σ_n p(n) H(ρ_B^(n))` from the eigenvalues of `Ψ_n† Ψ_n`.
fn oracle_configurational(s: &SplitState) -> f64 {
    s.blocks()
        .iter()
        .map(|psi| {
            let p = psi.norm_squared();
            if p <= 0.0 {
                return 0.0;
            }
            let rho_b = psi.adjoint() * psi / C64::from(p);
            p * spectrum_entropy(&rho_b)
        })
        .sum()
}

/// Ground state of `[[U, −2], [−2, 0]]` on the symmetric two-site sector,
/// Schmidt weights `(a ± b)²` of the amplitude matrix `[[a, b], [b, a]]`.
fn oracle_two_site_entropy(u: f64) -> f64 {
    let e = u / 2.0 - (u * u / 4.0 + 4.0).sqrt();
    let alpha = 1.0 / (1.0 + (2.0 / e).powi(2)).sqrt();
    let beta = alpha * (-2.0 / e);
    let (a, b) = (alpha / 2f64.sqrt(), beta / 2f64.sqrt());
    [(a + b).powi(2), (a - b).powi(2)]
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

// ---- shared random suite ------------------------------------------------

struct Sample {
    report: BoundReport,
    oracle: f64,
}

fn random_suite(seed: u64, trials: usize) -> Result<Vec<Sample>, String> {
    let dims = [2usize, 3, 4];
    (0..trials)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let d = dims[i % 3];
            let bases: Vec<MeasurementBasis> =
                (0..4).map(|_| random_basis(d, &mut rng).unwrap()).collect();
            let set = BasisSet { x: &bases[0], x_prime: &bases[1], z: &bases[2], z_prime: &bases[3] };
            let (report, rho) = if i % 2 == 0 {
                let psi = random_pure(d, d, &mut rng).unwrap();
                let r = assemble_report((&psi).into(), &psi.indexer().unwrap(), &set, None);
                (r, psi.to_density().entries().clone())
            } else {
                let rank = rng.random_range(1..=d * d);
                let rho: DensityMatrix = random_mixed(d, d, rank, &mut rng).unwrap();
                let r = assemble_report(StateRef::Mixed(&rho), &rho.indexer().unwrap(), &set, None);
                (r, rho.entries().clone())
            };
            Ok(Sample {
                report: report.map_err(|e| format!("trial {i}: {e}"))?,
                oracle: oracle_coherent_information(&rho, d, d),
            })
        })
        .collect()
}

// ---- criteria -------------------------------------------------------------

fn c1_mub_tightness() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4, 5, 8] {
        let psi = StateVector::maximally_entangled(d).map_err(|e| e.to_string())?;
        let ix = psi.indexer().unwrap();
        let x = MeasurementBasis::computational(d).unwrap();
        let f = fourier_basis(d).unwrap();
        let fc = MeasurementBasis::new(f.columns().map(|c| c.conj()), f.labels().to_vec()).unwrap();
        let r = assemble_report((&psi).into(), &ix, &BasisSet { x: &x, x_prime: &x, z: &f, z_prime: &fc }, None)
            .map_err(|e| e.to_string())?;
        let log_d = (d as f64).log2();
        for v in [r.bound_fsd, r.bound_mu, r.true_neg_hab.unwrap()] {
            worst = worst.max((v - log_d).abs());
            check((v - log_d).abs() < 1e-8, format!("d = {d}: {v} vs log2 d = {log_d}"))?;
        }
    }
    Ok(format!("d in {{2,3,4,5,8}}: bound_fsd = bound_mu = -H(A|B) = log2 d, max deviation {worst:.1e}"))
}

fn c2_validity() -> Outcome {
    let suite = random_suite(2024, 1000)?;
    let mut worst_fsd = f64::NEG_INFINITY;
    let mut worst_mu = f64::NEG_INFINITY;
    let mut worst_truth: f64 = 0.0;
    for (i, s) in suite.iter().enumerate() {
        let truth = s.report.true_neg_hab.unwrap();
        worst_truth = worst_truth.max((truth - s.oracle).abs());
        check((truth - s.oracle).abs() < 1e-8, format!("trial {i}: truth {truth} vs oracle {}", s.oracle))?;
        worst_fsd = worst_fsd.max(s.report.bound_fsd - s.oracle);
        worst_mu = worst_mu.max(s.report.bound_mu - s.oracle);
        check(s.report.bound_fsd <= s.oracle + 1e-7, format!("trial {i}: bound_fsd {} > {}", s.report.bound_fsd, s.oracle))?;
        check(s.report.bound_mu <= s.oracle + 1e-7, format!("trial {i}: bound_mu {} > {}", s.report.bound_mu, s.oracle))?;
    }
    Ok(format!(
        "1000 states (pure+mixed, d = 2,3,4): max(bound_fsd - truth) = {worst_fsd:.3e}, max(bound_mu - truth) = {worst_mu:.3e}, truth vs oracle {worst_truth:.1e}"
    ))
}

fn c3_hierarchy() -> Outcome {
    let suite = random_suite(2024, 1000)?;
    for (i, s) in suite.iter().enumerate() {
        let r = &s.report;
        check(r.q_mu <= r.q_c + 1e-9 && r.q_c <= r.q_fsd + 1e-9, format!("trial {i}: q_mu {} q_c {} q_fsd {}", r.q_mu, r.q_c, r.q_fsd))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut spin_checks = 0;
    for n in 2..=6 {
        let model = Spin1Model::quench(n, -1.0).unwrap();
        let basis = fock_enumerate(3, n).unwrap();
        for k in 0..8 {
            let split = beam_split(&quench_state(&model, 0.07 * k as f64).unwrap(), &basis).unwrap();
            let u = haar_unitary(3, &mut rng);
            let r = split_report(&split, &SectorLifts::new(&u, split.space()).unwrap()).map_err(|e| e.to_string())?;
            let q_pn = r.q_pn.unwrap();
            check(
                q_pn <= r.q_c + 1e-9 && r.q_mu <= r.q_c + 1e-9 && r.q_c <= r.q_fsd + 1e-9,
                format!("N = {n}: q_mu {} q_pn {q_pn} q_c {} q_fsd {}", r.q_mu, r.q_c, r.q_fsd),
            )?;
            spin_checks += 1;
        }
    }
    Ok(format!("q_mu <= q_c <= q_fsd on 1000 random instances; q_pn <= q_c on {spin_checks} spin-1 instances (N <= 6)"))
}

fn c4_two_site() -> Outcome {
    let m = LatticeModel::open(2, -100.0).unwrap();
    let grid: Vec<f64> = (0..=160).map(|k| 0.005 * k as f64).collect();
    let reps = sweep_lattice(&m, &grid).map_err(|e| e.to_string())?;
    let truth = oracle_two_site_entropy(-100.0);
    let k = (0..reps.len()).max_by(|&a, &b| reps[a].bound_fsd.total_cmp(&reps[b].bound_fsd)).unwrap();
    let best = reps[k].bound_fsd;
    check((reps[k].true_neg_hab.unwrap() - truth).abs() < 1e-8, "library truth differs from two-site oracle".into())?;
    check(best >= 0.98 * truth, format!("max bound_fsd {best} < 0.98 x {truth}"))?;
    check((grid[k] - FRAC_PI_4).abs() <= 0.02, format!("argmax tJ = {} not within 0.02 of pi/4", grid[k]))?;
    Ok(format!("max bound_fsd = {best:.5} = {:.4} x truth {truth:.5} at tJ = {:.3}", best / truth, grid[k]))
}

fn c5_detection_gap() -> Outcome {
    let grid: Vec<f64> = (0..=300).map(|k| 0.01 * k as f64).collect();
    let mut parts = Vec::new();
    for l in [4, 8] {
        let m = LatticeModel::open(l, -100.0).unwrap();
        let reps = sweep_lattice(&m, &grid).map_err(|e| e.to_string())?;
        let max_fsd = reps.iter().map(|r| r.bound_fsd).fold(f64::NEG_INFINITY, f64::max);
        let max_mu = reps.iter().map(|r| r.bound_mu).fold(f64::NEG_INFINITY, f64::max);
        check(max_fsd > 0.1, format!("L = {l}: max bound_fsd {max_fsd} <= 0.1"))?;
        check(max_mu < max_fsd, format!("L = {l}: max bound_mu {max_mu} >= {max_fsd}"))?;
        for (t, r) in grid.iter().zip(&reps) {
            check(r.bound_mu <= r.bound_fsd, format!("L = {l}, tJ = {t}: bound_mu {} > bound_fsd {}", r.bound_mu, r.bound_fsd))?;
            check(r.bound_fsd <= r.true_neg_hab.unwrap() + 1e-7, format!("L = {l}, tJ = {t}: bound above truth"))?;
        }
        parts.push(format!("L = {l}: max bound_fsd {max_fsd:.3}, max bound_mu {max_mu:.3}"));
    }
    Ok(parts.join("; "))
}

fn c6_vacuum() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut count = 0;
    for n in 1..=8 {
        let basis = fock_enumerate(3, n).unwrap();
        for _ in 0..5 {
            let v = ginibre(basis.len(), 1, &mut rng).column(0).into_owned();
            let psi = StateVector::normalized(v).unwrap();
            let split = beam_split(&psi, &basis).unwrap();
            let tilt = Su3Tilt::from_params(&(0..11).map(|_| rng.random_range(-PI..PI)).collect::<Vec<_>>()).unwrap();
            let r = split_report(&split, &SectorLifts::new(&tilt.unitary(), split.space()).unwrap()).map_err(|e| e.to_string())?;
            check(r.q_mu.abs() <= 1e-12, format!("N = {n}: q_mu = {}", r.q_mu))?;
            count += 1;
        }
    }
    Ok(format!("q_mu = 0 on {count} random split states with random SU(3) tilts (N = 1..8)"))
}

fn c7_quench() -> Outcome {
    let model = Spin1Model::quench(10, -1.0).unwrap();
    let grid: Vec<f64> = (0..=120).map(|k| 0.005 * k as f64).collect();
    let imprint = quench_sweep(&model, &grid, &Su3Tilt::fourier_short_time()).map_err(|e| e.to_string())?;
    let zero = quench_sweep(&model, &grid, &Su3Tilt::fourier([0.0; 3])).map_err(|e| e.to_string())?;
    let basis = fock_enumerate(3, 10).unwrap();
    for (t, (a, b)) in grid.iter().zip(imprint.iter().zip(&zero)) {
        let truth = a.true_neg_hab.unwrap();
        check(a.bound_fsd <= truth + 1e-7 && b.bound_fsd <= truth + 1e-7, format!("tg = {t}: bound above truth"))?;
    }
    for &k in &[0usize, 20, 40, 80] {
        let split = beam_split(&quench_state(&model, grid[k]).unwrap(), &basis).unwrap();
        let oracle = oracle_configurational(&split);
        let lib = imprint[k].true_neg_hab.unwrap();
        check((lib - oracle).abs() < 1e-8, format!("tg = {}: truth {lib} vs oracle {oracle}", grid[k]))?;
    }
    check(imprint[0].true_neg_hab.unwrap().abs() < 1e-12 && imprint[0].bound_fsd <= 0.0, "t = 0 row not unentangled".into())?;
    let first_pos = |reps: &[BoundReport]| reps.iter().position(|r| r.bound_fsd > 0.0);
    let a = first_pos(&imprint).ok_or("imprinted Fourier never detects")?;
    let b = first_pos(&zero).ok_or("zero-imprint Fourier never detects")?;
    check(grid[a] <= 0.15, format!("imprinted tilt first detects at tg = {}", grid[a]))?;
    check(b > a, format!("zero imprint detects at tg = {} before imprint at {}", grid[b], grid[a]))?;
    let best = |reps: &[BoundReport], lo: usize, hi: usize| reps[lo..hi].iter().map(|r| r.bound_fsd).fold(f64::NEG_INFINITY, f64::max);
    Ok(format!(
        "N = 10: imprint detects from tg = {:.3} (max {:.3} for tg < 0.15); zero imprint detects from tg = {:.3} (max {:.3})",
        grid[a],
        best(&imprint, 0, 31),
        grid[b],
        best(&zero, 0, grid.len())
    ))
}

fn c8_twin_fock() -> Outcome {
    let model = Spin1Model::from_ratio(10, -1.0, -5.0).unwrap();
    let psi = ground_state_3mode(&model).map_err(|e| e.to_string())?;
    let basis = fock_enumerate(3, 10).unwrap();
    let overlap = psi.amplitudes()[basis.index_of(&[5, 0, 5]).unwrap()].norm_sqr();
    check(overlap > 0.99, format!("|<5,0,5|psi>|^2 = {overlap}"))?;
    let split = beam_split(&psi, &basis).unwrap();
    let tilt = Su3Tilt::fourier([0.0; 3]);
    let r = split_report(&split, &SectorLifts::new(&tilt.unitary(), split.space()).unwrap()).map_err(|e| e.to_string())?;
    let truth = oracle_configurational(&split);
    check((r.true_neg_hab.unwrap() - truth).abs() < 1e-8, "truth differs from oracle".into())?;
    check(r.bound_fsd >= 0.5 * truth, format!("bound_fsd {} < 0.5 x {truth}", r.bound_fsd))?;
    Ok(format!(
        "overlap {overlap:.4}; bound_fsd {:.4} = {:.3} x configurational {truth:.4}",
        r.bound_fsd,
        r.bound_fsd / truth
    ))
}

fn c9_scaling() -> Outcome {
    let res = twin_fock_scaling(&[4, 6, 8, 10, 12, 14, 16], -1.0, -5.0, &Su3Tilt::fourier([0.0; 3]), DEFAULT_B_RANGE)
        .map_err(|e| e.to_string())?;
    let (a, t) = (res.bound_fit.a, res.truth_fit.a);
    check((0.4..=0.8).contains(&a), format!("bound fit a = {a}"))?;
    check((0.4..=0.6).contains(&t), format!("truth fit a = {t}"))?;
    Ok(format!(
        "bound: a = {a:.3} (b = {:.2}); truth: a = {t:.3} (b = {:.2})",
        res.bound_fit.b, res.truth_fit.b
    ))
}

fn c10_determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("entbound-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let runs: [&[&str]; 4] = [
        &["lattice", "--L", "4", "--t-grid", "0:2:0.05", "--seed", "11"],
        &["verify", "--trials", "200", "--seed", "11"],
        &["spin1-quench", "--N", "4", "--t-grid", "0.1,0.2", "--optimize", "--max-evals", "80", "--restarts", "2", "--seed", "11"],
        &["spin1-ground", "--N", "6", "--q-grid=-2:2:0.5", "--seed", "11", "--log-base", "e"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = dir.join(format!("run{k}_{rep}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_entbound"))
                .args(*args)
                .arg("--out")
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            check(status.status.success(), format!("{args:?} exited with {:?}", status.status.code()))?;
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        check(outputs[0] == outputs[1], format!("{args:?}: CSVs differ"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok("lattice, verify, spin1-quench (optimized), spin1-ground: byte-identical CSVs across two runs".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("MUB tightness", c1_mub_tightness, Duration::from_secs(1)),
        ("validity suite", c2_validity, Duration::from_secs(60)),
        ("hierarchy", c3_hierarchy, Duration::from_secs(60)),
        ("two-site lattice tightness", c4_two_site, Duration::from_secs(5)),
        ("lattice detection gap", c5_detection_gap, Duration::from_secs(30)),
        ("spin-1 vacuum degeneracy", c6_vacuum, Duration::from_secs(1)),
        ("spin-1 quench detection", c7_quench, Duration::from_secs(300)),
        ("Twin-Fock phase", c8_twin_fock, Duration::from_secs(120)),
        ("scaling fit", c9_scaling, Duration::from_secs(600)),
        ("determinism", c10_determinism, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(d) if elapsed <= *limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; exceeded {limit:?}")),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} [{status}] {name}: {detail} ({:.2} s)", k + 1, elapsed.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
