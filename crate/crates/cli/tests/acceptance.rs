//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use finsmooth_cli::{run, Command, ExperimentConfig};
use finsmooth_core::converge::{self, ConvergenceReport, SweepConfig};
use finsmooth_core::extremal::{self, IntegrationOptions};
use finsmooth_core::liealg::{AlgebraName, LieAlgebraModel};
use finsmooth_core::{asymnorm, mollify, vecops, NormModel, ProfileGrid, SmoothingOptions};

const CONS_TOL: f64 = 1e-6;
const CONS_SPAN: (f64, f64) = (-5.0, 5.0);
const CONS_STEP: f64 = 1e-3;
const CONS_BUDGET: Duration = Duration::from_secs(10);
const STATIONARY_TOL: f64 = 1e-12;
const MONO_SLACK: f64 = 0.05;
const FINAL_RATIO: f64 = 0.2;
const SWEEP_BUDGET: Duration = Duration::from_secs(120);
const EUCLIDEAN_GAMMA0: f64 = 1.0 / 28.0;
const PAIRS: usize = 10_000;
const GROWTH_SAMPLES: usize = 10_000;
const SEED: u64 = 20240917;

struct Line {
    passed: bool,
    text: String,
}

fn line(n: usize, passed: bool, what: &str, detail: String) -> Line {
    Line { passed, text: format!("criterion {n}: {} {what} ({detail})", if passed { "PASS" } else { "FAIL" }) }
}

fn catalog(dim: usize) -> Vec<NormModel> {
    let mut drift = vec![0.0; dim];
    drift[0] = 0.5;
    vec![NormModel::euclidean(dim).unwrap(), NormModel::randers(drift).unwrap(), NormModel::shifted_max(dim).unwrap()]
}

fn a0_for(dim: usize) -> Vec<f64> {
    if dim == 2 {
        vec![1.0, 1.0]
    } else {
        vec![0.5, -1.0, 0.8]
    }
}

/// Criteria 1 and 2 share the long-horizon integrations.
fn conservation_and_stationarity() -> (Line, Line) {
    let mut worst_drift: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    let mut failures = Vec::new();
    let mut abelian_exact = true;
    let mut so3_gap: f64 = 0.0;
    for name in [AlgebraName::Abelian2, AlgebraName::AffR, AlgebraName::Heisenberg3, AlgebraName::So3] {
        let alg = LieAlgebraModel::named(name).unwrap();
        for norm in catalog(alg.dim()) {
            let a0 = a0_for(alg.dim());
            let opts = IntegrationOptions { cons_tol: CONS_TOL, max_halvings: 0, ..IntegrationOptions::default() };
            let t = Instant::now();
            let res = extremal::integrate_vertical(&alg, &norm, &a0, CONS_SPAN, CONS_STEP, &opts);
            let elapsed = t.elapsed();
            slowest = slowest.max(elapsed);
            match res {
                Ok(traj) => {
                    let drift = traj.conservation_drift();
                    worst_drift = worst_drift.max(drift);
                    if drift > CONS_TOL || elapsed > CONS_BUDGET {
                        failures.push(format!("{name}/{}: drift {drift:e} in {elapsed:?}", norm.label()));
                    }
                    if alg.is_abelian() {
                        abelian_exact &= traj.a_states.iter().all(|a| *a == a0);
                    }
                    if name == AlgebraName::So3 && matches!(norm.kind(), finsmooth_core::NormKind::Euclidean) {
                        so3_gap = traj.a_states.iter().map(|a| vecops::max_abs_diff(a, &a0)).fold(0.0, f64::max);
                    }
                }
                Err(e) => failures.push(format!("{name}/{}: {e}", norm.label())),
            }
        }
    }
    let c1 = line(
        1,
        failures.is_empty(),
        "conservation of F*(a(t)) on 12 algebra/norm pairs over [-5,5] at h=1e-3",
        if failures.is_empty() {
            format!(
                "worst relative drift {worst_drift:.3e} <= {CONS_TOL:e}, slowest pair {slowest:.2?} <= {CONS_BUDGET:?}"
            )
        } else {
            failures.join("; ")
        },
    );
    let c2 = line(
        2,
        abelian_exact && so3_gap <= STATIONARY_TOL,
        "stationary oracles",
        format!("abelian a(t) == a0 bitwise: {abelian_exact}; so3 euclidean max |a(t)-a0| = {so3_gap:.3e} <= {STATIONARY_TOL:e}"),
    );
    (c1, c2)
}

fn sweep(alg: AlgebraName, norm: &NormModel, a0: Vec<f64>, grid: Option<ProfileGrid>) -> ConvergenceReport {
    let alg = LieAlgebraModel::named(alg).unwrap();
    let tau = asymnorm::constants(norm, 256).unwrap().tau;
    let eps = [0.5, 0.25, 0.125, 0.0625].iter().map(|f| f * tau).collect();
    let mut cfg = SweepConfig::new(norm.dim(), eps, a0, (0.0, 3.0), 1e-2);
    cfg.mono_slack = MONO_SLACK;
    cfg.seed = SEED;
    if let Some(g) = grid {
        cfg.smoothing.grid = g;
    }
    converge::run_sweep(&cfg, norm, &alg).unwrap()
}

fn describe(checks: &[finsmooth_core::CheckReport]) -> String {
    checks
        .iter()
        .map(|c| format!("{} {}", c.name, c.value.map(|v| format!("ratio {v:.3e}")).unwrap_or_else(|| "-".into())))
        .collect::<Vec<_>>()
        .join("; ")
}

fn ratio_ok(checks: &[finsmooth_core::CheckReport]) -> bool {
    checks.iter().all(|c| c.passed && c.value.is_some_and(|v| v < FINAL_RATIO))
}

fn euclidean_shared_modulus() -> (bool, String) {
    let norm = NormModel::euclidean(2).unwrap();
    let consts = asymnorm::constants(&norm, 256).unwrap();
    let exact = (consts.gamma0 - EUCLIDEAN_GAMMA0).abs() <= 1e-15;
    let mut all = exact;
    for f in [0.5, 0.25, 0.125, 0.0625] {
        let m = mollify::smoothed_norm(&norm, &consts, f * consts.tau, &SmoothingOptions::default_for(2)).unwrap();
        all &= asymnorm::check_strong_convexity(&m, EUCLIDEAN_GAMMA0, PAIRS, SEED).passed;
    }
    (all, format!("euclidean gamma0 = {:.17} (1/28 = {EUCLIDEAN_GAMMA0:.17})", consts.gamma0))
}

fn radial_growth() -> Line {
    let mut fails = Vec::new();
    let mut count = 0;
    for dim in [2, 3] {
        for norm in catalog(dim) {
            let consts = asymnorm::constants(&norm, 400).unwrap();
            let rep = asymnorm::check_radial_growth(&norm, &consts, GROWTH_SAMPLES, SEED);
            count += 1;
            if !rep.passed || rep.samples < GROWTH_SAMPLES {
                fails.push(format!("{rep}"));
            }
        }
    }
    line(
        7,
        fails.is_empty(),
        "radial growth inequalities",
        if fails.is_empty() { format!("{count} norms x {GROWTH_SAMPLES} samples") } else { fails.join("; ") },
    )
}

fn determinism() -> Line {
    let text =
        "[norm]\nkind = randers\ndrift = 0.5, 0.0\n[algebra]\nname = aff_r\n[sweep]\nspan = -1, 2\nstep = 0.02\n\
                lipschitz_pairs = 500\nconvexity_pairs = 500\n[output]\nsvg = true\n";
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut produced = Vec::new();
    for d in &dirs {
        let mut cfg = ExperimentConfig::parse(text).unwrap();
        cfg.out_dir = d.path().to_path_buf();
        cfg.seed = SEED;
        for cmd in [Command::NormTable, Command::Smooth, Command::Dual, Command::Extremal, Command::Converge] {
            run(cmd, &cfg).unwrap();
        }
        produced.push(list_csv(d.path()));
    }
    let same_names = produced[0] == produced[1];
    let mut differing = Vec::new();
    for name in &produced[0] {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).ok();
        if Some(a) != b {
            differing.push(name.clone());
        }
    }
    line(
        9,
        same_names && differing.is_empty() && !produced[0].is_empty(),
        "byte-identical CSVs on rerun with the same config and seed",
        if differing.is_empty() { format!("{} files compared", produced[0].len()) } else { differing.join(", ") },
    )
}

fn list_csv(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    v.sort();
    v
}

fn main() -> ExitCode {
    let mut lines = Vec::new();
    let (c1, c2) = conservation_and_stationarity();
    lines.push(c1);
    lines.push(c2);

    let randers = NormModel::randers(vec![0.5, 0.0]).unwrap();
    let t = Instant::now();
    let main_sweep = sweep(AlgebraName::AffR, &randers, vec![1.0, 1.0], None);
    let sweep_time = t.elapsed();

    let statics = main_sweep.static_decay(MONO_SLACK);
    lines.push(line(3, ratio_ok(&statics), "smoothing convergence for randers b=(1/2,0), n=2", describe(&statics)));

    let traj = main_sweep.trajectory_decay(MONO_SLACK);
    let c4 = ratio_ok(&traj) && traj.len() == 2 && sweep_time <= SWEEP_BUDGET;
    lines.push(line(
        4,
        c4,
        "extremal convergence on aff_r, a0=(1,1), [0,3]",
        format!("{}; sweep took {sweep_time:.2?}", describe(&traj)),
    ));

    let shared = main_sweep.shared_checks();
    let (euc_ok, euc_detail) = euclidean_shared_modulus();
    lines.push(line(
        5,
        shared[0].passed && euc_ok,
        "shared strong convexity modulus gamma0 for every eps",
        format!("randers gamma0 = {:.6e} on {} rows; {euc_detail}", main_sweep.constants.gamma0, main_sweep.rows.len()),
    ));

    let ref_ok =
        main_sweep.reference_u_ratio <= main_sweep.k1 && main_sweep.reference_field_ratio <= main_sweep.k_tilde;
    lines.push(line(
        6,
        shared[1].passed && ref_ok,
        "shared lipschitz constants K1 and K~ for u, u_eps, E, E_eps",
        format!(
            "K1 = {:.3e}, K~ = {:.3e}, reference ratios {:.3e}/{:.3e}, {PAIRS} pairs per model",
            main_sweep.k1, main_sweep.k_tilde, main_sweep.reference_u_ratio, main_sweep.reference_field_ratio
        ),
    ));

    lines.push(radial_growth());

    let others = [
        ("aff_r/randers", main_sweep),
        ("abelian2/randers", sweep(AlgebraName::Abelian2, &randers, vec![1.0, 1.0], None)),
        (
            "so3/euclidean",
            sweep(
                AlgebraName::So3,
                &NormModel::euclidean(3).unwrap(),
                a0_for(3),
                Some(ProfileGrid::Sphere { colat: 32, azimuth: 64 }),
            ),
        ),
    ];
    let mut filippov_fail = Vec::new();
    for (name, rep) in &others {
        for c in converge::check_filippov_hypotheses(rep, MONO_SLACK) {
            if !c.passed {
                filippov_fail.push(format!("{name}: {c}"));
            }
        }
    }
    lines.push(line(
        8,
        filippov_fail.is_empty(),
        "filippov hypotheses (1)-(5)",
        if filippov_fail.is_empty() {
            format!("{} sweep configurations x 5 items", others.len())
        } else {
            filippov_fail.join("; ")
        },
    ));

    lines.push(determinism());

    let mut ok = true;
    for l in &lines {
        println!("{}", l.text);
        ok &= l.passed;
    }
    if ok {
        println!("acceptance: all {} criteria pass", lines.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of {} criteria fail", lines.iter().filter(|l| !l.passed).count(), lines.len());
        ExitCode::FAILURE
    }
}
