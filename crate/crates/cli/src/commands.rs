//! Subcommands: each writes its artifacts under the output directory and returns the
//! invariant checks it ran.

use std::path::PathBuf;
use std::thread;

use finsmooth_core::converge::{self, ConvergenceReport};
use finsmooth_core::dualmax::{self, DualAnnulus};
use finsmooth_core::extremal::{self, GroupIntegrator, IntegrationOptions};
use finsmooth_core::mollify::{self, MollifiedNorm};
use finsmooth_core::{asymnorm, sphere, CheckReport, NormModel};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{float, loglog_svg_from_csv, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] finsmooth_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    NormTable,
    Smooth,
    Dual,
    Extremal,
    Converge,
    Certify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::NormTable => "norm-table",
            Command::Smooth => "smooth",
            Command::Dual => "dual",
            Command::Extremal => "extremal",
            Command::Converge => "converge",
            Command::Certify => "certify",
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub checks: Vec<CheckReport>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }

    fn absorb(&mut self, other: Outcome) {
        self.checks.extend(other.checks);
        self.files.extend(other.files);
    }

    /// One tab-separated line per check; failures read `FAIL\t<check>\t<detail>`.
    pub fn summary_lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                let mut detail = format!("failures={}/{} worst_margin={:e}", c.failures, c.samples, c.worst_margin);
                if let Some(v) = c.value {
                    detail.push_str(&format!(" value={v:e}"));
                }
                for n in &c.notes {
                    detail.push_str(&format!(" {n}"));
                }
                format!("{}\t{}\t{}", if c.passed { "PASS" } else { "FAIL" }, c.name, detail)
            })
            .collect()
    }
}

fn checks_table(checks: &[CheckReport]) -> Table {
    let mut t = Table::new(["check", "passed", "samples", "failures", "skipped", "worst_margin", "value"]);
    for c in checks {
        t.push(vec![
            c.name.clone(),
            c.passed.to_string(),
            c.samples.to_string(),
            c.failures.to_string(),
            c.skipped.to_string(),
            float(c.worst_margin),
            c.value.map(float).unwrap_or_default(),
        ]);
    }
    t
}

/// Runs `cmd`, writes `resolved.ini` and `<cmd>_checks.csv` next to its artifacts.
pub fn run(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    let resolved = cfg.out_dir.join("resolved.ini");
    std::fs::write(&resolved, cfg.to_ini())?;
    let mut out = match cmd {
        Command::NormTable => norm_table(cfg)?,
        Command::Smooth => smooth(cfg)?,
        Command::Dual => dual(cfg)?,
        Command::Extremal => extremal_cmd(cfg)?,
        Command::Converge => converge_cmd(cfg)?,
        Command::Certify => {
            let mut all = Outcome::default();
            for sub in [norm_table, smooth, dual, extremal_cmd, converge_cmd] {
                all.absorb(sub(cfg)?);
            }
            all
        }
    };
    out.files.push(resolved);
    out.files.push(checks_table(&out.checks).write(&cfg.out_dir, &format!("{}_checks.csv", cmd.name()))?);
    Ok(out)
}

fn norm_table(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let norm = cfg.norm()?;
    let c = &cfg.constants;
    let n = cfg.dim;
    let mut header: Vec<String> = if n == 2 { vec!["theta".into()] } else { vec!["colat".into(), "azimuth".into()] };
    header.extend((1..=n).map(|i| format!("y_{i}")));
    header.push("F".into());
    let mut table = Table::new(header);
    for d in sphere::cover(n, if n == 2 { 360 } else { 400 }) {
        let mut row = sphere::angles(&d);
        row.extend_from_slice(&d);
        row.push(norm.eval(&d));
        table.push_floats(&row);
    }
    let mut consts = Table::new(["name", "value"]);
    for (k, v) in [
        ("r_m", c.r_m),
        ("r_max", c.r_max),
        ("tau", c.tau),
        ("gamma", c.gamma.value),
        ("gamma0", c.gamma0),
        ("lambda_lower", c.lambda_lower()),
        ("growth_lower", c.growth_lower()),
        ("growth_upper", c.growth_upper()),
    ] {
        consts.push(vec![k.into(), float(v)]);
    }
    let seed = cfg.seed;
    let s = &cfg.samples;
    let checks = vec![
        asymnorm::check_homogeneity(&norm, 2000, seed),
        asymnorm::check_triangle(&norm, 2000, seed),
        asymnorm::check_equivalence(&norm, c, 2000, seed),
        asymnorm::check_lipschitz(&norm, 2000, seed),
        asymnorm::check_strong_convexity(&norm, c.gamma.value, s.convexity_pairs, seed),
        asymnorm::check_radial_growth(&norm, c, 10_000, seed),
        asymnorm::check_enclosing_sphere(&norm, c.gamma.value, 200),
    ];
    Ok(Outcome {
        checks,
        files: vec![table.write(&cfg.out_dir, "norm_table.csv")?, consts.write(&cfg.out_dir, "constants.csv")?],
    })
}

fn build_all(cfg: &ExperimentConfig, norm: &NormModel) -> Vec<finsmooth_core::Result<MollifiedNorm>> {
    let opts = cfg.sweep_config().smoothing;
    thread::scope(|s| {
        let handles: Vec<_> = cfg
            .eps
            .iter()
            .map(|&e| {
                let opts = &opts;
                s.spawn(move || mollify::build_mollified_norm(norm, &cfg.constants, e, opts))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("smoothing worker panicked")).collect()
    })
}

fn smooth(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let norm = cfg.norm()?;
    let gamma0 = cfg.constants.gamma0;
    let mut out = Outcome::default();
    let mut summary = Table::new([
        "eps",
        "r_eps_m",
        "r_eps_max",
        "gamma_eps",
        "lambda_eps_min",
        "max_residual",
        "mollifier_mass",
        "warnings",
    ]);
    for (k, built) in build_all(cfg, &norm).into_iter().enumerate() {
        let mn = built?;
        let grid = mn.profile().grid();
        let n = cfg.dim;
        let mut header: Vec<String> =
            if n == 2 { vec!["theta".into()] } else { vec!["colat".into(), "azimuth".into()] };
        header.extend(["phi", "F_eps", "F"].map(String::from));
        let mut table = Table::new(header);
        for (a, phi) in grid.node_angles().iter().zip(mn.profile().node_values()) {
            let d = sphere::direction(a);
            let mut row = a.clone();
            row.extend([*phi, mn.eval(&d), norm.eval(&d)]);
            table.push_floats(&row);
        }
        out.files.push(table.write(&cfg.out_dir, &format!("smooth_eps{k}.csv"))?);
        for w in &mn.warnings {
            eprintln!("warning: eps {:e}: {w}", mn.epsilon());
        }
        summary.push(vec![
            float(mn.epsilon()),
            float(mn.r_eps_m),
            float(mn.r_eps_max),
            float(mn.gamma_eps),
            float(mn.lambda_eps_min),
            float(mn.max_residual),
            float(mn.mollifier_mass),
            mn.warnings.len().to_string(),
        ]);
        let mut dominate = CheckReport::new(format!("gamma_eps >= gamma0 at eps={:e}", mn.epsilon()));
        dominate.record(mn.gamma_eps - gamma0);
        out.checks.push(dominate);
        let smoothed = NormModel::mollified(std::sync::Arc::new(mn));
        out.checks.push(asymnorm::check_strong_convexity(&smoothed, gamma0, cfg.samples.convexity_pairs, cfg.seed));
    }
    out.files.push(summary.write(&cfg.out_dir, "smooth_summary.csv")?);
    Ok(out)
}

/// Trapping shell of `a0` for the configured norm.
fn base_shell(cfg: &ExperimentConfig, norm: &NormModel) -> Result<DualAnnulus, CliError> {
    let c0 = dualmax::dual_norm(norm, &cfg.a0)?.fstar;
    Ok(extremal::trapping_annulus(c0, cfg.constants.r_m, cfg.constants.r_max)?)
}

fn dual(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let norm = cfg.norm()?;
    let alg = cfg.algebra_model()?;
    let shell = base_shell(cfg, &norm)?;
    let n = cfg.dim;
    let mut header: Vec<String> = (1..=n).map(|i| format!("a_{i}")).collect();
    header.push("fstar".into());
    header.extend((1..=n).map(|i| format!("u_{i}")));
    header.extend((1..=n).map(|i| format!("field_{i}")));
    let mut table = Table::new(header);
    for a in shell.grid(n, cfg.samples.grid_radii, cfg.samples.grid_directions) {
        let de = dualmax::dual_norm(&norm, &a)?;
        let mut row = a.clone();
        row.push(de.fstar);
        row.extend(&de.maximizer);
        row.extend(alg.coadjoint_field(&a, &de.maximizer));
        table.push_floats(&row);
    }
    let c = &cfg.constants;
    let budget =
        dualmax::lipschitz_budget(&norm, c.r_m, c.gamma.value, shell, alg.c_hat(), cfg.samples.sphere_samples)?;
    let pairs = cfg.samples.lipschitz_pairs;
    let checks = vec![
        dualmax::check_gradient_identity(&norm, 1000, cfg.seed)?,
        dualmax::certify_u_lipschitz(&norm, &budget, shell, pairs, cfg.seed)?,
        dualmax::certify_grad_lipschitz(&norm, c.gamma.value, shell, pairs, cfg.seed)?,
        extremal::certify_field_lipschitz(&alg, &norm, &shell.sample_pairs(n, pairs, cfg.seed), budget.k_e)?,
    ];
    Ok(Outcome { checks, files: vec![table.write(&cfg.out_dir, "dual.csv")?] })
}

fn extremal_cmd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let norm = cfg.norm()?;
    let alg = cfg.algebra_model()?;
    let shell = base_shell(cfg, &norm)?;
    let opts = IntegrationOptions { cons_tol: cfg.cons_tol, annulus: Some(shell), ..IntegrationOptions::default() };
    let mut traj = extremal::integrate_vertical(&alg, &norm, &cfg.a0, cfg.span, cfg.step, &opts)?;
    let mut checks = Vec::new();
    if alg.has_realization() {
        let x0 = match &cfg.x0 {
            Some(c) => alg.element(c)?,
            None => alg.identity()?,
        };
        traj = extremal::reconstruct_group(&traj, &alg, &norm, &x0, GroupIntegrator::CommutatorFree4)?;
        checks.push(extremal::check_group_lipschitz(&traj, &alg)?);
    }
    let mut cons = CheckReport::new("conservation of F*(a(t))").with_value(traj.conservation_drift());
    cons.record(cfg.cons_tol - traj.conservation_drift());
    checks.insert(0, cons);
    let mut inside = CheckReport::new("trajectory stays in the trapping shell");
    for a in &traj.a_states {
        inside.record(if shell.contains(a) { 1.0 } else { -1.0 });
    }
    checks.push(inside);
    let horizon = cfg.span.1.max(-cfg.span.0);
    let gap = extremal::time_reversal_gap(&alg, &norm, &cfg.a0, horizon, cfg.step)?;
    let mut rev = CheckReport::new("time reversal").with_value(gap);
    rev.record(1e-10 - gap);
    checks.push(rev);

    let n = cfg.dim;
    let mut header: Vec<String> = vec!["t".into()];
    header.extend((1..=n).map(|i| format!("a_{i}")));
    header.extend((1..=n).map(|i| format!("u_{i}")));
    header.push("fstar_conserved".into());
    if let Some(xs) = &traj.group_states {
        let m = xs[0].size();
        header.extend((0..m * m).map(|k| format!("x_{}{}", k / m, k % m)));
    }
    let mut table = Table::new(header);
    for k in 0..traj.len() {
        let mut row = vec![traj.times[k]];
        row.extend(&traj.a_states[k]);
        row.extend(&traj.controls[k]);
        row.push(traj.conserved[k]);
        if let Some(xs) = &traj.group_states {
            row.extend(xs[k].matrix());
        }
        table.push_floats(&row);
    }
    Ok(Outcome { checks, files: vec![table.write(&cfg.out_dir, "extremal.csv")?] })
}

/// Report table in the column order of the sweep rows; failed rows carry their error.
pub fn converge_table(rep: &ConvergenceReport) -> Table {
    let mut t = Table::new([
        "eps",
        "sup_F_err",
        "sup_fstar_err",
        "sup_u_err",
        "sup_E_err",
        "sup_a_traj_err",
        "sup_x_traj_err",
        "gamma0_pass",
        "lipschitz_shared_pass",
        "status",
    ]);
    for row in &rep.rows {
        match &row.result {
            Ok(r) => t.push(vec![
                float(r.eps),
                float(r.sup_f_err),
                float(r.sup_fstar_err),
                float(r.sup_u_err),
                float(r.sup_e_err),
                float(r.sup_a_traj_err),
                r.sup_x_traj_err.map(float).unwrap_or_default(),
                r.gamma0_pass.to_string(),
                r.lipschitz_shared_pass.to_string(),
                "ok".into(),
            ]),
            Err(e) => {
                let mut cells = vec![float(row.eps)];
                cells.extend(std::iter::repeat_n(String::new(), 8));
                cells.push(e.replace([',', '\n'], ";"));
                t.push(cells);
            }
        }
    }
    t
}

fn converge_cmd(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let norm = cfg.norm()?;
    let alg = cfg.algebra_model()?;
    let rep = converge::run_sweep(&cfg.sweep_config(), &norm, &alg)?;
    let table = converge_table(&rep);
    let mut files = vec![table.write(&cfg.out_dir, "converge.csv")?];

    let mut diag = Table::new(["eps", "gamma_eps", "u_ratio", "field_ratio", "field_sup", "conservation_drift"]);
    for r in rep.ok_rows() {
        diag.push_floats(&[r.eps, r.gamma_eps, r.u_ratio, r.field_ratio, r.field_sup, r.conservation_drift]);
    }
    files.push(diag.write(&cfg.out_dir, "converge_diagnostics.csv")?);
    let mut shared = Table::new(["name", "value"]);
    for (k, v) in [
        ("gamma0", rep.constants.gamma0),
        ("k1", rep.k1),
        ("k_tilde", rep.k_tilde),
        ("r_bound", rep.r_bound),
        ("field_bound", rep.field_bound),
        ("shell_inner", rep.annulus.inner),
        ("shell_outer", rep.annulus.outer),
        ("reference_drift", rep.reference_drift),
    ] {
        shared.push(vec![k.into(), float(v)]);
    }
    files.push(shared.write(&cfg.out_dir, "converge_constants.csv")?);
    if cfg.svg {
        let path = cfg.out_dir.join("converge.svg");
        std::fs::write(&path, loglog_svg_from_csv(&table.to_csv(), "sup errors against eps"))?;
        files.push(path);
    }

    let mut checks = rep.static_decay(cfg.mono_slack);
    checks.extend(rep.trajectory_decay(cfg.mono_slack));
    checks.extend(rep.shared_checks());
    checks.extend(converge::check_filippov_hypotheses(&rep, cfg.mono_slack));
    Ok(Outcome { checks, files })
}
