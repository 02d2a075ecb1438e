//! Vertical extremals `ȧ = a([u(a), ·])` on the punctured dual algebra, their conserved
//! quantity `F*(a)`, and reconstruction of the group curve `ẋ = x · u(a(t))`.

use crate::asymnorm::{self, NormModel};
use crate::dualmax::{self, DualAnnulus};
use crate::error::{Error, Result};
use crate::liealg::{GroupElement, LieAlgebraModel};
use crate::report::CheckReport;
use crate::vecops;

pub const CONS_TOL: f64 = 1e-6;
/// Relative widening of the analytic shell `[c r_m, c r_M]` that traps the trajectory.
pub const ANNULUS_SLACK: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationOptions {
    pub cons_tol: f64,
    pub max_halvings: usize,
    /// Shell that must contain the trajectory; derived from the norm when absent.
    pub annulus: Option<DualAnnulus>,
    /// Integrate `ȧ = -a([u(a), ·])` instead.
    pub reverse_field: bool,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { cons_tol: CONS_TOL, max_halvings: 4, annulus: None, reverse_field: false }
    }
}

#[derive(Debug, Clone)]
pub struct ExtremalTrajectory {
    pub times: Vec<f64>,
    pub a_states: Vec<Vec<f64>>,
    pub controls: Vec<Vec<f64>>,
    pub group_states: Option<Vec<GroupElement>>,
    /// `F*(a(t))` at each node.
    pub conserved: Vec<f64>,
    pub annulus: DualAnnulus,
    /// Step actually used after any halving.
    pub step: f64,
    pub halvings: usize,
    reverse_field: bool,
}

impl ExtremalTrajectory {
    /// `max |F*(a(t)) - F*(a(0))| / F*(a(0))`.
    pub fn conservation_drift(&self) -> f64 {
        let i0 = self.origin_index();
        let c0 = self.conserved[i0];
        self.conserved.iter().map(|c| (c - c0).abs() / c0).fold(0.0, f64::max)
    }

    /// Index of the node at `t = 0`.
    pub fn origin_index(&self) -> usize {
        self.times.iter().position(|t| *t == 0.0).expect("trajectory grid contains t = 0")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Every `factor`-th node counted from `t = 0` in both directions.
    pub fn subsample(&self, factor: usize) -> ExtremalTrajectory {
        let i0 = self.origin_index();
        let keep: Vec<usize> = (0..self.len()).filter(|i| i.abs_diff(i0) % factor == 0).collect();
        let pick = |v: &Vec<Vec<f64>>| keep.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        ExtremalTrajectory {
            times: keep.iter().map(|&i| self.times[i]).collect(),
            a_states: pick(&self.a_states),
            controls: pick(&self.controls),
            group_states: self.group_states.as_ref().map(|g| keep.iter().map(|&i| g[i].clone()).collect()),
            conserved: keep.iter().map(|&i| self.conserved[i]).collect(),
            annulus: self.annulus,
            step: self.step * factor as f64,
            halvings: self.halvings,
            reverse_field: self.reverse_field,
        }
    }

    /// Largest `|u|` over the recorded controls.
    pub fn control_bound(&self) -> f64 {
        self.controls.iter().map(|u| vecops::norm(u)).fold(0.0, f64::max)
    }
}

/// Shell `[c r_m (1 - s), c r_M (1 + s)]` for `c = F*(a0)`, which contains the whole
/// level set `{F* = c}`.
pub fn trapping_annulus(fstar0: f64, r_m: f64, r_max: f64) -> Result<DualAnnulus> {
    DualAnnulus::new(fstar0 * r_m * (1.0 - ANNULUS_SLACK), fstar0 * r_max * (1.0 + ANNULUS_SLACK))
}

fn field(alg: &LieAlgebraModel, norm: &NormModel, a: &[f64], sign: f64) -> Result<(Vec<f64>, dualmax::DualEval)> {
    let de = dualmax::dual_norm(norm, a)?;
    let mut f = alg.coadjoint_field(a, &de.maximizer);
    if sign < 0.0 {
        for v in f.iter_mut() {
            *v = -*v;
        }
    }
    Ok((f, de))
}

struct Leg {
    states: Vec<Vec<f64>>,
    controls: Vec<Vec<f64>>,
    conserved: Vec<f64>,
}

/// RK4 from `a0` over `steps` steps of signed size `h`, with fresh `u` at every stage.
fn rk4_leg(
    alg: &LieAlgebraModel,
    norm: &NormModel,
    a0: &[f64],
    h: f64,
    steps: usize,
    sign: f64,
    annulus: DualAnnulus,
) -> Result<Leg> {
    let mut states = Vec::with_capacity(steps + 1);
    let mut controls = Vec::with_capacity(steps + 1);
    let mut conserved = Vec::with_capacity(steps + 1);
    let mut a = a0.to_vec();
    for k in 0..=steps {
        let (k1, de) = field(alg, norm, &a, sign)?;
        states.push(a.clone());
        controls.push(de.maximizer.clone());
        conserved.push(de.fstar);
        if k == steps {
            break;
        }
        let (k2, _) = field(alg, norm, &vecops::axpy(&a, 0.5 * h, &k1), sign)?;
        let (k3, _) = field(alg, norm, &vecops::axpy(&a, 0.5 * h, &k2), sign)?;
        let (k4, _) = field(alg, norm, &vecops::axpy(&a, h, &k3), sign)?;
        for i in 0..a.len() {
            a[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !annulus.contains(&a) {
            return Err(Error::ConservationBreach {
                t: (k + 1) as f64 * h,
                detail: format!(
                    "|a| = {} left the shell [{}, {}]; try a smaller step",
                    vecops::norm(&a),
                    annulus.inner,
                    annulus.outer
                ),
            });
        }
    }
    Ok(Leg { states, controls, conserved })
}

/// Integrates the vertical extremal through `a(0) = a0` over `span = [t0, t1]` with `t0 <= 0 <= t1`.
pub fn integrate_vertical(
    alg: &LieAlgebraModel,
    norm: &NormModel,
    a0: &[f64],
    span: (f64, f64),
    h: f64,
    opts: &IntegrationOptions,
) -> Result<ExtremalTrajectory> {
    if a0.len() != alg.dim() || norm.dim() != alg.dim() {
        return Err(Error::Parameter("a0, norm and algebra dimensions differ".into()));
    }
    if vecops::norm(a0) == 0.0 {
        return Err(Error::Parameter("a0 must be nonzero".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Parameter("step must be positive".into()));
    }
    let (t0, t1) = span;
    if !(t0 <= 0.0 && t1 >= 0.0 && t1 > t0) {
        return Err(Error::Parameter(format!("span [{t0}, {t1}] must contain 0 and have positive length")));
    }
    let annulus = match opts.annulus {
        Some(a) => a,
        None => {
            let ex = asymnorm::estimate_extrema(norm, 256)?;
            trapping_annulus(dualmax::dual_norm(norm, a0)?.fstar, ex.r_m, ex.r_max)?
        }
    };
    if !annulus.contains(a0) {
        return Err(Error::Parameter("a0 lies outside the trapping shell".into()));
    }
    let sign = if opts.reverse_field { -1.0 } else { 1.0 };
    let mut step = h;
    for halvings in 0..=opts.max_halvings {
        let n_fwd = (t1 / step).round().max(if t1 > 0.0 { 1.0 } else { 0.0 }) as usize;
        let n_bwd = (-t0 / step).round().max(if t0 < 0.0 { 1.0 } else { 0.0 }) as usize;
        let h_fwd = if n_fwd > 0 { t1 / n_fwd as f64 } else { step };
        let h_bwd = if n_bwd > 0 { -t0 / n_bwd as f64 } else { step };
        let fwd = rk4_leg(alg, norm, a0, h_fwd, n_fwd, sign, annulus)?;
        let bwd = rk4_leg(alg, norm, a0, -h_bwd, n_bwd, sign, annulus)?;
        let mut times = Vec::with_capacity(n_fwd + n_bwd + 1);
        let mut a_states = Vec::with_capacity(times.capacity());
        let mut controls = Vec::with_capacity(times.capacity());
        let mut conserved = Vec::with_capacity(times.capacity());
        for k in (1..=n_bwd).rev() {
            times.push(-(k as f64) * h_bwd);
            a_states.push(bwd.states[k].clone());
            controls.push(bwd.controls[k].clone());
            conserved.push(bwd.conserved[k]);
        }
        for k in 0..=n_fwd {
            times.push(k as f64 * h_fwd);
            a_states.push(fwd.states[k].clone());
            controls.push(fwd.controls[k].clone());
            conserved.push(fwd.conserved[k]);
        }
        let traj = ExtremalTrajectory {
            times,
            a_states,
            controls,
            group_states: None,
            conserved,
            annulus,
            step,
            halvings,
            reverse_field: opts.reverse_field,
        };
        let drift = traj.conservation_drift();
        if drift <= opts.cons_tol {
            return Ok(traj);
        }
        if halvings == opts.max_halvings {
            return Err(Error::ConservationBreach {
                t: t1,
                detail: format!("relative drift {drift:e} exceeds {:e} at step {step:e}", opts.cons_tol),
            });
        }
        step *= 0.5;
    }
    unreachable!()
}

/// Group reconstruction scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupIntegrator {
    /// Fourth-order commutator-free scheme with two exponentials per step at the Gauss nodes.
    CommutatorFree4,
    /// `x_{k+1} = x_k exp(h u_k)`.
    EulerLie,
}

const SQRT3_6: f64 = 0.288_675_134_594_812_9;

/// One commutator-free step `x exp(h(α1 U1 + α2 U2)) exp(h(α2 U1 + α1 U2))`.
pub fn cf4_step(alg: &LieAlgebraModel, x: &GroupElement, u1: &[f64], u2: &[f64], h: f64) -> Result<GroupElement> {
    let (al1, al2) = (0.25 + SQRT3_6, 0.25 - SQRT3_6);
    let first: Vec<f64> = u1.iter().zip(u2).map(|(a, b)| h * (al1 * a + al2 * b)).collect();
    let second: Vec<f64> = u1.iter().zip(u2).map(|(a, b)| h * (al2 * a + al1 * b)).collect();
    let next = x.mul(&alg.exp(&first)?).mul(&alg.exp(&second)?);
    next.check()?;
    Ok(next)
}

/// `a(t_k + s h)` from cubic Hermite data at both ends of a step.
fn hermite(a0: &[f64], a1: &[f64], f0: &[f64], f1: &[f64], h: f64, s: f64) -> Vec<f64> {
    let s2 = s * s;
    let s3 = s2 * s;
    let (h00, h10, h01, h11) = (2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2);
    (0..a0.len()).map(|i| h00 * a0[i] + h10 * h * f0[i] + h01 * a1[i] + h11 * h * f1[i]).collect()
}

/// Fills `group_states` from `x(0) = x0`; stage controls come from Hermite interpolation of `a`.
pub fn reconstruct_group(
    traj: &ExtremalTrajectory,
    alg: &LieAlgebraModel,
    norm: &NormModel,
    x0: &GroupElement,
    method: GroupIntegrator,
) -> Result<ExtremalTrajectory> {
    if !alg.has_realization() {
        return Err(Error::NoRealization(format!("{}", alg.name())));
    }
    x0.check()?;
    let n = traj.len();
    let i0 = traj.origin_index();
    let sign = if traj.reverse_field { -1.0 } else { 1.0 };
    let rates: Vec<Vec<f64>> = traj
        .a_states
        .iter()
        .zip(&traj.controls)
        .map(|(a, u)| vecops::scale(&alg.coadjoint_field(a, u), sign))
        .collect();
    let mut xs: Vec<Option<GroupElement>> = vec![None; n];
    xs[i0] = Some(x0.clone());
    let step_between = |from: usize, to: usize, x: &GroupElement| -> Result<GroupElement> {
        let h = traj.times[to] - traj.times[from];
        match method {
            GroupIntegrator::EulerLie => alg.group_step(x, &traj.controls[from], h),
            GroupIntegrator::CommutatorFree4 => {
                let mut us = Vec::with_capacity(2);
                for s in [0.5 - SQRT3_6, 0.5 + SQRT3_6] {
                    let a = hermite(&traj.a_states[from], &traj.a_states[to], &rates[from], &rates[to], h, s);
                    us.push(dualmax::dual_norm(norm, &a)?.maximizer);
                }
                cf4_step(alg, x, &us[0], &us[1], h)
            }
        }
    };
    for k in i0..n - 1 {
        let next = step_between(k, k + 1, xs[k].as_ref().unwrap())?;
        xs[k + 1] = Some(next);
    }
    for k in (1..=i0).rev() {
        let prev = step_between(k, k - 1, xs[k].as_ref().unwrap())?;
        xs[k - 1] = Some(prev);
    }
    let mut out = traj.clone();
    out.group_states = Some(xs.into_iter().map(|x| x.unwrap()).collect());
    Ok(out)
}

/// `d_G(x(t_k), x(t_{k+1})) <= R̃ |t_{k+1} - t_k|` with `R̃ = max |u|` on adjacent nodes.
pub fn check_group_lipschitz(traj: &ExtremalTrajectory, alg: &LieAlgebraModel) -> Result<CheckReport> {
    let xs = traj.group_states.as_ref().ok_or_else(|| Error::Parameter("trajectory has no group states".into()))?;
    let bound = traj.control_bound();
    let mut rep = CheckReport::new(format!("group lipschitz on {}", alg.name())).with_value(bound);
    if !alg.distance_is_length_metric() {
        rep.note("distance is not a length metric; check skipped");
        rep.skipped = traj.len() - 1;
        return Ok(rep);
    }
    for k in 0..traj.len() - 1 {
        let dt = traj.times[k + 1] - traj.times[k];
        let d = alg.distance(&xs[k], &xs[k + 1])?;
        rep.record(bound * dt * (1.0 + 1e-8) + 1e-14 - d);
    }
    Ok(rep)
}

/// Largest node-wise distance between the trajectory on `[0, T]` of the reversed field and
/// the forward trajectory on `[-T, 0]` read backwards.
pub fn time_reversal_gap(alg: &LieAlgebraModel, norm: &NormModel, a0: &[f64], horizon: f64, h: f64) -> Result<f64> {
    let back = integrate_vertical(alg, norm, a0, (-horizon, 0.0), h, &IntegrationOptions::default())?;
    let rev_opts = IntegrationOptions { reverse_field: true, ..IntegrationOptions::default() };
    let rev = integrate_vertical(alg, norm, a0, (0.0, horizon), h, &rev_opts)?;
    let n = back.len();
    if n != rev.len() {
        return Err(Error::Integration("time grids of the two legs differ".into()));
    }
    Ok((0..n).map(|k| vecops::dist(&rev.a_states[k], &back.a_states[n - 1 - k])).fold(0.0, f64::max))
}

/// `|Ẽ(a) - Ẽ(b)| <= bound |a - b|` over the sampled pairs.
pub fn certify_field_lipschitz(
    alg: &LieAlgebraModel,
    norm: &NormModel,
    pairs: &[(Vec<f64>, Vec<f64>)],
    bound: f64,
) -> Result<CheckReport> {
    dualmax::ratio_check(&format!("field lipschitz for {} on {}", norm.label(), alg.name()), pairs, bound, |a| {
        Ok(alg.coadjoint_field(a, &dualmax::dual_norm(norm, a)?.maximizer))
    })
}

/// Largest `|Ẽ(a)|` over `points`.
pub fn field_sup(alg: &LieAlgebraModel, norm: &NormModel, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for a in points {
        let u = dualmax::dual_norm(norm, a)?.maximizer;
        worst = worst.max(vecops::norm(&alg.coadjoint_field(a, &u)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::AlgebraName;
    use approx::assert_relative_eq;

    fn alg(name: AlgebraName) -> LieAlgebraModel {
        LieAlgebraModel::named(name).unwrap()
    }

    #[test]
    fn abelian_is_stationary() {
        let a = alg(AlgebraName::Abelian2);
        let n = NormModel::randers(vec![0.5, 0.0]).unwrap();
        let t = integrate_vertical(&a, &n, &[1.0, -0.5], (-1.0, 1.0), 1e-2, &IntegrationOptions::default()).unwrap();
        assert!(t.a_states.iter().all(|s| s == &vec![1.0, -0.5]));
    }

    #[test]
    fn so3_euclidean_is_stationary() {
        let a = alg(AlgebraName::So3);
        let n = NormModel::euclidean(3).unwrap();
        let a0 = [0.3, -1.0, 0.8];
        let t = integrate_vertical(&a, &n, &a0, (0.0, 2.0), 1e-2, &IntegrationOptions::default()).unwrap();
        for s in &t.a_states {
            assert!(vecops::max_abs_diff(s, &a0) < 1e-12);
        }
    }

    #[test]
    fn zero_covector_rejected() {
        let a = alg(AlgebraName::AffR);
        let n = NormModel::euclidean(2).unwrap();
        let e = integrate_vertical(&a, &n, &[0.0, 0.0], (0.0, 1.0), 1e-2, &IntegrationOptions::default());
        assert!(matches!(e, Err(Error::Parameter(m)) if m.contains("a0 must be nonzero")));
    }

    #[test]
    fn conservation_on_heisenberg_randers() {
        let a = alg(AlgebraName::Heisenberg3);
        let n = NormModel::randers(vec![0.2, -0.1, 0.3]).unwrap();
        let t =
            integrate_vertical(&a, &n, &[0.4, 1.0, -0.7], (-1.0, 1.0), 1e-2, &IntegrationOptions::default()).unwrap();
        assert!(t.conservation_drift() < 1e-8, "{:e}", t.conservation_drift());
    }

    #[test]
    fn self_convergence_is_fourth_order() {
        let a = alg(AlgebraName::AffR);
        let n = NormModel::randers(vec![0.5, 0.0]).unwrap();
        let o = IntegrationOptions::default();
        let a0 = [1.0, 1.0];
        let reference = integrate_vertical(&a, &n, &a0, (0.0, 3.0), 0.1 / 32.0, &o).unwrap();
        let err = |h: f64| {
            let t = integrate_vertical(&a, &n, &a0, (0.0, 3.0), h, &o).unwrap();
            let r = reference.subsample((h / reference.step).round() as usize);
            t.a_states.iter().zip(&r.a_states).map(|(p, q)| vecops::dist(p, q)).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.1), err(0.05));
        assert!(e1 / e2 >= 8.0, "{e1:e} {e2:e}");
    }

    #[test]
    fn time_reversal_matches() {
        let a = alg(AlgebraName::AffR);
        let n = NormModel::shifted_max(2).unwrap();
        let gap = time_reversal_gap(&a, &n, &[0.7, -1.2], 1.0, 1e-2).unwrap();
        assert!(gap < 1e-12, "{gap:e}");
    }

    #[test]
    fn abelian_reconstruction_is_straight() {
        let a = alg(AlgebraName::Abelian2);
        let n = NormModel::randers(vec![0.5, 0.0]).unwrap();
        let t = integrate_vertical(&a, &n, &[1.0, 2.0], (-0.5, 1.0), 0.05, &IntegrationOptions::default()).unwrap();
        let x0 = a.element(&[0.3, -0.2]).unwrap();
        let g = reconstruct_group(&t, &a, &n, &x0, GroupIntegrator::CommutatorFree4).unwrap();
        let u0 = dualmax::dual_norm(&n, &[1.0, 2.0]).unwrap().maximizer;
        for (time, x) in g.times.iter().zip(g.group_states.as_ref().unwrap()) {
            let c = x.coordinates();
            assert!((c[0] - (0.3 + time * u0[0])).abs() < 1e-12);
            assert!((c[1] - (-0.2 + time * u0[1])).abs() < 1e-12);
        }
    }

    #[test]
    fn so3_euclidean_reconstruction_is_one_parameter_subgroup() {
        let a = alg(AlgebraName::So3);
        let n = NormModel::euclidean(3).unwrap();
        let a0 = [0.0, 1.0, 1.0];
        let t = integrate_vertical(&a, &n, &a0, (0.0, 2.0), 0.05, &IntegrationOptions::default()).unwrap();
        let x0 = a.element(&[0.1, 0.2, -0.3]).unwrap();
        let g = reconstruct_group(&t, &a, &n, &x0, GroupIntegrator::CommutatorFree4).unwrap();
        let u0 = vecops::normalized(&a0);
        for (time, x) in g.times.iter().zip(g.group_states.as_ref().unwrap()) {
            let exact = x0.mul(&a.exp(&vecops::scale(&u0, *time)).unwrap());
            assert!(vecops::max_abs_diff(exact.matrix(), x.matrix()) < 1e-12);
        }
    }

    #[test]
    fn cf4_is_fourth_order_for_varying_control() {
        let a = alg(AlgebraName::So3);
        let u = |t: f64| vec![t.cos(), (2.0 * t).sin(), 0.5 + 0.3 * t];
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut x = a.identity().unwrap();
            for k in 0..n {
                let t = k as f64 * h;
                x = cf4_step(&a, &x, &u(t + (0.5 - SQRT3_6) * h), &u(t + (0.5 + SQRT3_6) * h), h).unwrap();
            }
            x
        };
        let reference = run(2048);
        let e1 = a.distance(&run(16), &reference).unwrap();
        let e2 = a.distance(&run(32), &reference).unwrap();
        assert!(e1 / e2 > 12.0, "{e1:e} {e2:e}");
    }

    #[test]
    fn left_invariance_of_reconstruction() {
        let a = alg(AlgebraName::Heisenberg3);
        let n = NormModel::shifted_max(3).unwrap();
        let t =
            integrate_vertical(&a, &n, &[0.5, -1.0, 0.8], (-0.5, 0.5), 0.05, &IntegrationOptions::default()).unwrap();
        let g0 = a.element(&[1.0, -2.0, 0.5]).unwrap();
        let from_id = reconstruct_group(&t, &a, &n, &a.identity().unwrap(), GroupIntegrator::CommutatorFree4).unwrap();
        let from_g0 = reconstruct_group(&t, &a, &n, &g0, GroupIntegrator::CommutatorFree4).unwrap();
        for (p, q) in from_id.group_states.unwrap().iter().zip(from_g0.group_states.unwrap().iter()) {
            assert!(vecops::max_abs_diff(g0.mul(p).matrix(), q.matrix()) < 1e-12);
        }
    }

    #[test]
    fn aff_r_distance_lipschitz_along_trajectory() {
        let a = alg(AlgebraName::AffR);
        let n = NormModel::randers(vec![0.5, 0.0]).unwrap();
        let t = integrate_vertical(&a, &n, &[1.0, 1.0], (-1.0, 2.0), 1e-2, &IntegrationOptions::default()).unwrap();
        let g = reconstruct_group(&t, &a, &n, &a.identity().unwrap(), GroupIntegrator::CommutatorFree4).unwrap();
        let rep = check_group_lipschitz(&g, &a).unwrap();
        assert!(rep.passed, "{rep}");
    }

    #[test]
    fn long_horizon_stays_trapped() {
        let a = alg(AlgebraName::AffR);
        let n = NormModel::randers(vec![0.5, 0.0]).unwrap();
        let t = integrate_vertical(&a, &n, &[1.0, 1.0], (-50.0, 50.0), 1e-2, &IntegrationOptions::default()).unwrap();
        assert!(t.a_states.iter().all(|s| t.annulus.contains(s)));
        assert_relative_eq!(t.times[0], -50.0);
    }
}
