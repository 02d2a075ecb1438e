//! The ε-sweep: builds `F̃ε` for each smoothing radius, compares norms, duals, maximizers,
//! fields and trajectories against the unsmoothed reference, and evaluates the hypotheses
//! of the limit theorem for the family of fields.

use std::thread;

use crate::asymnorm::{self, NormConstants, NormModel};
use crate::dualmax::{self, DualAnnulus, LipschitzBudget};
use crate::error::{Error, Result};
use crate::extremal::{self, ExtremalTrajectory, GroupIntegrator, IntegrationOptions};
use crate::liealg::LieAlgebraModel;
use crate::mollify::{self, SmoothingOptions};
use crate::report::CheckReport;
use crate::vecops;

pub const MONO_SLACK: f64 = 0.05;
/// Required `last / first` ratio of every decaying column.
pub const FINAL_RATIO: f64 = 0.2;
/// Columns whose entries all sit below this are treated as identically zero.
pub const ZERO_FLOOR: f64 = 1e-8;
/// Reference trajectories use `h / REFERENCE_REFINEMENT`.
pub const REFERENCE_REFINEMENT: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSamples {
    /// Radii and directions of the fixed evaluation grids.
    pub grid_radii: usize,
    pub grid_directions: usize,
    pub lipschitz_pairs: usize,
    pub convexity_pairs: usize,
    pub sphere_samples: usize,
}

impl SweepSamples {
    pub fn default_for(dim: usize) -> Self {
        Self {
            grid_radii: 5,
            grid_directions: if dim == 2 { 64 } else { 200 },
            lipschitz_pairs: 10_000,
            convexity_pairs: 10_000,
            sphere_samples: if dim == 2 { 256 } else { 400 },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Strictly decreasing smoothing radii, each below `τ`.
    pub eps_list: Vec<f64>,
    pub span: (f64, f64),
    pub step: f64,
    pub a0: Vec<f64>,
    /// Group coordinates of `x(0)`; identity when absent.
    pub x0: Option<Vec<f64>>,
    /// Dual compact for the static comparisons; the trapping shell of `a0` when absent.
    pub annulus: Option<DualAnnulus>,
    pub samples: SweepSamples,
    pub smoothing: SmoothingOptions,
    pub cons_tol: f64,
    pub mono_slack: f64,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(dim: usize, eps_list: Vec<f64>, a0: Vec<f64>, span: (f64, f64), step: f64) -> Self {
        Self {
            eps_list,
            span,
            step,
            a0,
            x0: None,
            annulus: None,
            samples: SweepSamples::default_for(dim),
            smoothing: SmoothingOptions::default_for(dim),
            cons_tol: extremal::CONS_TOL,
            mono_slack: MONO_SLACK,
            seed: 7,
        }
    }

    /// Positive, strictly decreasing, all below `tau`.
    pub fn validate(&self, tau: f64) -> Result<()> {
        if self.eps_list.is_empty() {
            return Err(Error::Parameter("eps list is empty".into()));
        }
        for (i, &e) in self.eps_list.iter().enumerate() {
            if !(e > 0.0) {
                return Err(Error::Parameter(format!("eps {e} must be positive")));
            }
            if e >= tau {
                return Err(Error::EpsilonTooLarge { eps: e, tau });
            }
            if i > 0 && !(e < self.eps_list[i - 1]) {
                return Err(Error::Parameter("eps list must be strictly decreasing".into()));
            }
        }
        if !(self.step > 0.0) {
            return Err(Error::Parameter("step must be positive".into()));
        }
        Ok(())
    }
}

/// Per-ε measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    pub sup_f_err: f64,
    pub sup_fstar_err: f64,
    pub sup_u_err: f64,
    pub sup_e_err: f64,
    pub sup_a_traj_err: f64,
    /// Absent when the algebra has no matrix realization.
    pub sup_x_traj_err: Option<f64>,
    pub gamma0_pass: bool,
    pub lipschitz_shared_pass: bool,
    pub gamma_eps: f64,
    /// Largest observed ratios for `u_ε` and `Ẽε`.
    pub u_ratio: f64,
    pub field_ratio: f64,
    pub field_sup: f64,
    pub trajectory_in_shell: bool,
    pub conservation_drift: f64,
}

#[derive(Debug, Clone)]
pub struct RowOutcome {
    pub eps: f64,
    pub result: std::result::Result<SweepRow, String>,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub algebra: String,
    pub norm: String,
    pub constants: NormConstants,
    pub annulus: DualAnnulus,
    pub budget: LipschitzBudget,
    /// `𝒦₁` and `𝒦̃`, shared by all ε.
    pub k1: f64,
    pub k_tilde: f64,
    /// Bound `R` on `|u|` and every `|u_ε|`.
    pub r_bound: f64,
    /// Analytic bound on `|Ẽε|` over the shell.
    pub field_bound: f64,
    pub reference_u_ratio: f64,
    pub reference_field_ratio: f64,
    pub reference_field_sup: f64,
    pub reference_in_shell: bool,
    pub reference_drift: f64,
    pub rows: Vec<RowOutcome>,
}

impl ConvergenceReport {
    pub fn ok_rows(&self) -> Vec<&SweepRow> {
        self.rows.iter().filter_map(|r| r.result.as_ref().ok()).collect()
    }

    /// Decay checks of the static columns (norm, dual norm, maximizer, field).
    pub fn static_decay(&self, slack: f64) -> Vec<CheckReport> {
        let rows = self.ok_rows();
        let col = |f: fn(&SweepRow) -> f64| rows.iter().map(|r| f(r)).collect::<Vec<_>>();
        vec![
            decay_check("sup |F_eps - F|", &col(|r| r.sup_f_err), slack),
            decay_check("sup |F*_eps - F*|", &col(|r| r.sup_fstar_err), slack),
            decay_check("sup |u_eps - u|", &col(|r| r.sup_u_err), slack),
            decay_check("sup |E_eps - E|", &col(|r| r.sup_e_err), slack),
        ]
    }

    /// Decay checks of the trajectory columns.
    pub fn trajectory_decay(&self, slack: f64) -> Vec<CheckReport> {
        let rows = self.ok_rows();
        let mut out = vec![decay_check(
            "sup |a_eps(t) - a(t)|",
            &rows.iter().map(|r| r.sup_a_traj_err).collect::<Vec<_>>(),
            slack,
        )];
        let xs: Option<Vec<f64>> = rows.iter().map(|r| r.sup_x_traj_err).collect();
        if let Some(xs) = xs {
            out.push(decay_check("sup d_G(x_eps(t), x(t))", &xs, slack));
        }
        out
    }

    /// Every row built and passed both shared-constant checks.
    pub fn shared_checks(&self) -> Vec<CheckReport> {
        let mut g = CheckReport::new("shared modulus gamma0 for every eps");
        let mut l = CheckReport::new("shared lipschitz constants for every eps");
        for row in &self.rows {
            match &row.result {
                Ok(r) => {
                    g.record(if r.gamma0_pass { 1.0 } else { -1.0 });
                    l.record(if r.lipschitz_shared_pass { 1.0 } else { -1.0 });
                }
                Err(e) => {
                    g.fail(format!("eps {}: {e}", row.eps));
                    l.fail(format!("eps {}: {e}", row.eps));
                }
            }
        }
        vec![g, l]
    }
}

/// Nonincreasing within `slack`, and `last / first < FINAL_RATIO`, unless the whole column
/// sits below `ZERO_FLOOR`.
pub fn decay_check(name: &str, values: &[f64], slack: f64) -> CheckReport {
    let mut rep = CheckReport::new(name);
    if values.is_empty() {
        rep.fail("no rows");
        return rep;
    }
    for v in values {
        if !(v.is_finite() && *v >= 0.0) {
            rep.fail(format!("invalid entry {v}"));
            return rep;
        }
    }
    for w in values.windows(2) {
        rep.record(w[0] * (1.0 + slack) + ZERO_FLOOR - w[1]);
    }
    let (first, last) = (values[0], values[values.len() - 1]);
    if first > ZERO_FLOOR {
        let ratio = last / first;
        rep.record(FINAL_RATIO - ratio);
        rep = rep.with_value(ratio);
    } else {
        rep.note("column below zero floor");
        rep = rep.with_value(0.0);
    }
    rep
}

/// Largest `|f(p) - g(p)|` over `points`.
fn sup_err(points: &[Vec<f64>], mut f: impl FnMut(&[f64]) -> Result<f64>) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in points {
        worst = worst.max(f(p)?);
    }
    Ok(worst)
}

/// Dual data of one model at a fixed point set.
struct DualSample {
    fstar: Vec<f64>,
    u: Vec<Vec<f64>>,
    field: Vec<Vec<f64>>,
}

fn dual_sample(alg: &LieAlgebraModel, norm: &NormModel, points: &[Vec<f64>]) -> Result<DualSample> {
    let mut s = DualSample { fstar: Vec::new(), u: Vec::new(), field: Vec::new() };
    for a in points {
        let de = dualmax::dual_norm(norm, a)?;
        s.field.push(alg.coadjoint_field(a, &de.maximizer));
        s.fstar.push(de.fstar);
        s.u.push(de.maximizer);
    }
    Ok(s)
}

/// Largest ratios `|u(a)-u(b)|/|a-b|` and `|Ẽ(a)-Ẽ(b)|/|a-b|` over the pairs.
fn pair_ratios(alg: &LieAlgebraModel, norm: &NormModel, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<(f64, f64)> {
    let (mut ru, mut re) = (0.0f64, 0.0f64);
    for (a, b) in pairs {
        let d = vecops::dist(a, b);
        if d == 0.0 {
            continue;
        }
        let (da, db) = (dualmax::dual_norm(norm, a)?, dualmax::dual_norm(norm, b)?);
        ru = ru.max(vecops::dist(&da.maximizer, &db.maximizer) / d);
        let (ea, eb) = (alg.coadjoint_field(a, &da.maximizer), alg.coadjoint_field(b, &db.maximizer));
        re = re.max(vecops::dist(&ea, &eb) / d);
    }
    Ok((ru, re))
}

fn trajectory(
    alg: &LieAlgebraModel,
    norm: &NormModel,
    cfg: &SweepConfig,
    shell: DualAnnulus,
    step: f64,
) -> Result<ExtremalTrajectory> {
    let opts = IntegrationOptions { cons_tol: cfg.cons_tol, annulus: Some(shell), ..IntegrationOptions::default() };
    let traj = extremal::integrate_vertical(alg, norm, &cfg.a0, cfg.span, step, &opts)?;
    if !alg.has_realization() {
        return Ok(traj);
    }
    let x0 = match &cfg.x0 {
        Some(c) => alg.element(c)?,
        None => alg.identity()?,
    };
    extremal::reconstruct_group(&traj, alg, norm, &x0, GroupIntegrator::CommutatorFree4)
}

/// Sup distances between a trajectory and the reference on the reference's coarse nodes.
fn trajectory_errors(
    alg: &LieAlgebraModel,
    traj: &ExtremalTrajectory,
    reference: &ExtremalTrajectory,
) -> Result<(f64, Option<f64>)> {
    if traj.halvings != 0 || traj.len() != reference.len() {
        return Err(Error::Integration(format!(
            "trajectory grid ({} nodes, {} halvings) does not match the reference ({} nodes)",
            traj.len(),
            traj.halvings,
            reference.len()
        )));
    }
    let a_err = traj.a_states.iter().zip(&reference.a_states).map(|(p, q)| vecops::dist(p, q)).fold(0.0, f64::max);
    let x_err = match (&traj.group_states, &reference.group_states) {
        (Some(xs), Some(ys)) => {
            let mut worst: f64 = 0.0;
            for (x, y) in xs.iter().zip(ys) {
                worst = worst.max(alg.distance(x, y)?);
            }
            Some(worst)
        }
        _ => None,
    };
    Ok((a_err, x_err))
}

/// Shell containing the level sets `{F* = F*(a0)}` of the base norm and every smoothed norm.
fn joint_shell(a0: &[f64], models: &[(&NormModel, f64, f64)]) -> Result<DualAnnulus> {
    let (mut inner, mut outer) = (f64::INFINITY, 0.0f64);
    for (norm, r_m, r_max) in models {
        let c = dualmax::dual_norm(norm, a0)?.fstar;
        inner = inner.min(c * r_m);
        outer = outer.max(c * r_max);
    }
    DualAnnulus::new(inner * (1.0 - extremal::ANNULUS_SLACK), outer * (1.0 + extremal::ANNULUS_SLACK))
}

/// Runs the full sweep. Errors from a single ε are recorded on its row.
pub fn run_sweep(cfg: &SweepConfig, norm: &NormModel, alg: &LieAlgebraModel) -> Result<ConvergenceReport> {
    let dim = norm.dim();
    if alg.dim() != dim || cfg.a0.len() != dim {
        return Err(Error::Parameter("norm, algebra and a0 dimensions differ".into()));
    }
    if vecops::norm(&cfg.a0) == 0.0 {
        return Err(Error::Parameter("a0 must be nonzero".into()));
    }
    let consts = asymnorm::constants(norm, cfg.samples.sphere_samples)?;
    cfg.validate(consts.tau)?;

    let smoothed: Vec<Result<mollify::MollifiedNorm>> = thread::scope(|s| {
        let consts = &consts;
        let handles: Vec<_> = cfg
            .eps_list
            .iter()
            .map(|&e| s.spawn(move || mollify::build_mollified_norm(norm, consts, e, &cfg.smoothing)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("smoothing worker panicked")).collect()
    });
    let models: Vec<Option<NormModel>> = smoothed
        .iter()
        .map(|m| m.as_ref().ok().map(|mn| NormModel::mollified(std::sync::Arc::new(mn.clone()))))
        .collect();

    let mut shell_inputs = vec![(norm, consts.r_m, consts.r_max)];
    for (m, built) in models.iter().zip(&smoothed) {
        if let (Some(m), Ok(mn)) = (m, built) {
            shell_inputs.push((m, mn.r_eps_m, mn.r_eps_max));
        }
    }
    let trap = joint_shell(&cfg.a0, &shell_inputs)?;
    let shell = cfg.annulus.unwrap_or(trap);

    let r_bound = shell_inputs.iter().map(|(_, r_m, _)| 1.0 / r_m).fold(0.0, f64::max);
    let budget =
        dualmax::lipschitz_budget(norm, consts.r_m, consts.gamma0, shell, alg.c_hat(), cfg.samples.sphere_samples)?;
    let k1 = budget.k1();
    let k_tilde = budget.shared_field_constant(r_bound);
    let field_bound = alg.c_hat() * (dim * dim) as f64 * shell.outer * r_bound;

    let primal = DualAnnulus::new(consts.annulus.0, consts.annulus.1)?.grid(
        dim,
        cfg.samples.grid_radii,
        cfg.samples.grid_directions,
    );
    let dual_grid = shell.grid(dim, cfg.samples.grid_radii, cfg.samples.grid_directions);
    let pairs = shell.sample_pairs(dim, cfg.samples.lipschitz_pairs, cfg.seed);
    let base = dual_sample(alg, norm, &dual_grid)?;
    let (reference_u_ratio, reference_field_ratio) = pair_ratios(alg, norm, &pairs)?;
    let reference_field_sup = base.field.iter().map(|f| vecops::norm(f)).fold(0.0, f64::max);

    let reference = trajectory(alg, norm, cfg, trap, cfg.step / REFERENCE_REFINEMENT as f64)?;
    let reference_in_shell = reference.a_states.iter().all(|a| trap.contains(a));
    let reference_drift = reference.conservation_drift();
    let reference = reference.subsample(REFERENCE_REFINEMENT);

    let rows: Vec<RowOutcome> = thread::scope(|s| {
        let handles: Vec<_> = cfg
            .eps_list
            .iter()
            .zip(&models)
            .zip(&smoothed)
            .map(|((&eps, model), built)| {
                let (primal, dual_grid, pairs, base, reference) = (&primal, &dual_grid, &pairs, &base, &reference);
                let consts = &consts;
                s.spawn(move || {
                    let result = match (model, built) {
                        (Some(m), Ok(mn)) => sweep_row(
                            cfg,
                            alg,
                            norm,
                            m,
                            mn.gamma_eps,
                            consts,
                            trap,
                            primal,
                            dual_grid,
                            pairs,
                            base,
                            reference,
                            k1,
                            k_tilde,
                        )
                        .map_err(|e| e.to_string()),
                        (_, Err(e)) => Err(e.to_string()),
                        _ => unreachable!(),
                    };
                    RowOutcome { eps, result }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    Ok(ConvergenceReport {
        algebra: alg.name().to_string(),
        norm: norm.label(),
        constants: consts,
        annulus: shell,
        budget,
        k1,
        k_tilde,
        r_bound,
        field_bound,
        reference_u_ratio,
        reference_field_ratio,
        reference_field_sup,
        reference_in_shell,
        reference_drift,
        rows,
    })
}

#[allow(clippy::too_many_arguments)]
fn sweep_row(
    cfg: &SweepConfig,
    alg: &LieAlgebraModel,
    norm: &NormModel,
    smoothed: &NormModel,
    gamma_eps: f64,
    consts: &NormConstants,
    trap: DualAnnulus,
    primal: &[Vec<f64>],
    dual_grid: &[Vec<f64>],
    pairs: &[(Vec<f64>, Vec<f64>)],
    base: &DualSample,
    reference: &ExtremalTrajectory,
    k1: f64,
    k_tilde: f64,
) -> Result<SweepRow> {
    let sup_f_err = sup_err(primal, |y| Ok((smoothed.eval(y) - norm.eval(y)).abs()))?;
    let s = dual_sample(alg, smoothed, dual_grid)?;
    let sup_fstar_err = s.fstar.iter().zip(&base.fstar).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    let sup_u_err = s.u.iter().zip(&base.u).map(|(p, q)| vecops::dist(p, q)).fold(0.0, f64::max);
    let sup_e_err = s.field.iter().zip(&base.field).map(|(p, q)| vecops::dist(p, q)).fold(0.0, f64::max);
    let field_sup = s.field.iter().map(|f| vecops::norm(f)).fold(0.0, f64::max);

    let convex = asymnorm::check_strong_convexity(smoothed, consts.gamma0, cfg.samples.convexity_pairs, cfg.seed);
    let (u_ratio, field_ratio) = pair_ratios(alg, smoothed, pairs)?;

    let traj = trajectory(alg, smoothed, cfg, trap, cfg.step)?;
    let (sup_a_traj_err, sup_x_traj_err) = trajectory_errors(alg, &traj, reference)?;
    Ok(SweepRow {
        eps: smoothed_eps(smoothed),
        sup_f_err,
        sup_fstar_err,
        sup_u_err,
        sup_e_err,
        sup_a_traj_err,
        sup_x_traj_err,
        gamma0_pass: convex.passed,
        lipschitz_shared_pass: u_ratio <= k1 && field_ratio <= k_tilde,
        gamma_eps,
        u_ratio,
        field_ratio,
        field_sup,
        trajectory_in_shell: traj.a_states.iter().all(|a| trap.contains(a)),
        conservation_drift: traj.conservation_drift(),
    })
}

fn smoothed_eps(m: &NormModel) -> f64 {
    match m.kind() {
        asymnorm::NormKind::Mollified(mn) => mn.epsilon(),
        _ => 0.0,
    }
}

/// The five hypotheses of the limit theorem for the family `{Ẽε}` on the shell.
pub fn check_filippov_hypotheses(report: &ConvergenceReport, slack: f64) -> Vec<CheckReport> {
    let rows = report.ok_rows();
    let mut item1 = CheckReport::new("filippov (1): field independent of t");
    item1.note("autonomous field");
    item1.record(1.0);

    let mut item2 =
        CheckReport::new("filippov (2): uniform bound on |E_eps| over the shell").with_value(report.field_bound);
    item2.record(report.field_bound - report.reference_field_sup);
    for r in &rows {
        item2.record(report.field_bound - r.field_sup);
    }

    let mut item3 = CheckReport::new("filippov (3): shared lipschitz constant").with_value(report.k_tilde);
    item3.record(report.k_tilde - report.reference_field_ratio);
    for r in &rows {
        item3.record(report.k_tilde - r.field_ratio);
    }

    let mut item4 = decay_check(
        "filippov (4): E_eps -> E on the shell grid",
        &rows.iter().map(|r| r.sup_e_err).collect::<Vec<_>>(),
        slack,
    );
    item4.name = "filippov (4): E_eps -> E on the shell grid".into();

    let mut item5 = CheckReport::new("filippov (5): reference trajectory stays in the shell");
    item5.record(if report.reference_in_shell { 1.0 } else { -1.0 });
    for r in &rows {
        item5.record(if r.trajectory_in_shell { 1.0 } else { -1.0 });
    }

    let mut out = vec![item1, item2, item3, item4, item5];
    for row in &report.rows {
        if let Err(e) = &row.result {
            for item in out.iter_mut().skip(1) {
                item.fail(format!("eps {}: {e}", row.eps));
            }
        }
    }
    out
}

/// Sphere grid used by the static columns, exposed for callers that tabulate norms.
pub fn primal_grid(consts: &NormConstants, radii: usize, directions: usize) -> Result<Vec<Vec<f64>>> {
    Ok(DualAnnulus::new(consts.annulus.0, consts.annulus.1)?.grid(consts.dim, radii, directions))
}
