//! Asymmetric norms on ℝ² and ℝ³, their geometric constants and sampled convexity checks.

use std::fmt;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::mollify::MollifiedNorm;
use crate::profile::RadialProfile;
use crate::report::CheckReport;
use crate::sphere;
use crate::vecops;

/// Fraction of the admissible upper bound on the smoothing radius that is actually used.
pub const TAU_SAFETY: f64 = 0.999;
pub const TOL_HOM: f64 = 1e-9;
pub const TOL_TRI: f64 = 1e-9;
pub const KINK_THRESHOLD: f64 = 1e-6;
const KINK_STEP: f64 = 1e-7;
const ANGLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum NormKind {
    Euclidean,
    Randers {
        drift: Vec<f64>,
    },
    /// `F² = |y|² + max(0, y¹)²`
    ShiftedMax,
    Table(Arc<RadialProfile>),
    Mollified(Arc<MollifiedNorm>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaSource {
    /// Closed-form modulus (or a closed-form lower bound).
    Analytic,
    /// Derived from a proven bound evaluated on computed constants.
    Certified,
    /// Sampled Hessian quotient; never a certificate.
    Estimated,
}

impl fmt::Display for GammaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaSource::Analytic => "analytic",
            GammaSource::Certified => "certified",
            GammaSource::Estimated => "estimated",
        })
    }
}

/// Modulus of strong convexity of `F²` together with where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus {
    pub value: f64,
    pub source: GammaSource,
}

#[derive(Debug, Clone)]
pub struct NormModel {
    dim: usize,
    kind: NormKind,
    gamma: Option<Modulus>,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("dimension {dim} unsupported; use 2 or 3")))
    }
}

/// Lower bound on the smallest Hessian eigenvalue of `F²` for `F = |y| + b·y`.
fn randers_modulus(b_norm: f64) -> f64 {
    let c = 1.0 - b_norm;
    let c_hi = 1.0 + b_norm;
    2.0 * c * c * c / (c_hi * c_hi + c_hi + b_norm * b_norm)
}

impl NormModel {
    pub fn euclidean(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, kind: NormKind::Euclidean, gamma: Some(Modulus { value: 2.0, source: GammaSource::Analytic }) })
    }

    pub fn randers(drift: Vec<f64>) -> Result<Self> {
        check_dim(drift.len())?;
        let b = vecops::norm(&drift);
        if !(b < 1.0) {
            return Err(Error::Parameter(format!("randers drift must have norm < 1, got {b}")));
        }
        let gamma = Some(Modulus { value: randers_modulus(b), source: GammaSource::Analytic });
        Ok(Self { dim: drift.len(), kind: NormKind::Randers { drift }, gamma })
    }

    pub fn shifted_max(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, kind: NormKind::ShiftedMax, gamma: Some(Modulus { value: 2.0, source: GammaSource::Analytic }) })
    }

    pub fn table(profile: RadialProfile) -> Self {
        Self { dim: profile.dim(), kind: NormKind::Table(Arc::new(profile)), gamma: None }
    }

    pub fn mollified(mn: Arc<MollifiedNorm>) -> Self {
        let gamma = Some(mn.modulus());
        Self { dim: mn.dim(), kind: NormKind::Mollified(mn), gamma }
    }

    pub fn with_gamma(mut self, gamma: Modulus) -> Self {
        self.gamma = Some(gamma);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn gamma(&self) -> Option<Modulus> {
        self.gamma
    }

    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Euclidean => "euclidean".into(),
            NormKind::Randers { drift } => {
                let parts: Vec<String> = drift.iter().map(|x| format!("{x}")).collect();
                format!("randers({})", parts.join(","))
            }
            NormKind::ShiftedMax => "shifted_max".into(),
            NormKind::Table(_) => "table".into(),
            NormKind::Mollified(m) => format!("mollified[{}; eps={:e}]", m.base().label(), m.epsilon()),
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.dim);
        match &self.kind {
            NormKind::Euclidean => vecops::norm(y),
            NormKind::Randers { drift } => vecops::norm(y) + vecops::dot(drift, y),
            NormKind::ShiftedMax => {
                let p = y[0].max(0.0);
                (vecops::dot(y, y) + p * p).sqrt()
            }
            NormKind::Table(p) => p.eval(y),
            NormKind::Mollified(m) => m.eval(y),
        }
    }

    pub fn eval_sq(&self, y: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Euclidean => vecops::dot(y, y),
            NormKind::ShiftedMax => {
                let p = y[0].max(0.0);
                vecops::dot(y, y) + p * p
            }
            _ => {
                let f = self.eval(y);
                f * f
            }
        }
    }

    /// Whether `gradient` is exact rather than a central difference.
    pub fn has_exact_gradient(&self) -> bool {
        match &self.kind {
            NormKind::Table(p) => p.dim() == 2,
            NormKind::Mollified(m) => m.dim() == 2,
            _ => true,
        }
    }

    /// Gradient of `F` at `y ≠ 0`.
    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        match &self.kind {
            NormKind::Euclidean => vecops::normalized(y),
            NormKind::Randers { drift } => vecops::add(&vecops::normalized(y), drift),
            NormKind::ShiftedMax => {
                let f = self.eval(y);
                let mut g = vecops::scale(y, 1.0 / f);
                g[0] += y[0].max(0.0) / f;
                g
            }
            NormKind::Table(p) => p.gradient(y).unwrap_or_else(|| self.central_gradient(y)),
            NormKind::Mollified(m) => m.profile().gradient(y).unwrap_or_else(|| self.central_gradient(y)),
        }
    }

    fn central_gradient(&self, y: &[f64]) -> Vec<f64> {
        let h = 1e-6 * vecops::norm(y);
        let mut g = vec![0.0; y.len()];
        let mut p = y.to_vec();
        for k in 0..y.len() {
            p[k] = y[k] + h;
            let fp = self.eval(&p);
            p[k] = y[k] - h;
            let fm = self.eval(&p);
            p[k] = y[k];
            g[k] = (fp - fm) / (2.0 * h);
        }
        g
    }
}

/// One-sided second-order derivatives of `F²` at `y` along `v`: (forward, backward).
pub fn one_sided_derivatives(norm: &NormModel, y: &[f64], v: &[f64]) -> (f64, f64) {
    let h = KINK_STEP;
    let f = |s: f64| norm.eval_sq(&vecops::axpy(y, s, v));
    let f0 = f(0.0);
    let fwd = (-3.0 * f0 + 4.0 * f(h) - f(2.0 * h)) / (2.0 * h);
    let bwd = (3.0 * f0 - 4.0 * f(-h) + f(-2.0 * h)) / (2.0 * h);
    (fwd, bwd)
}

/// Gradient of `F²` assembled from one-sided coordinate derivatives; `None` at a detected kink.
pub fn subgradient_sq(norm: &NormModel, y: &[f64]) -> Option<Vec<f64>> {
    let n = y.len();
    let mut g = vec![0.0; n];
    for (k, gk) in g.iter_mut().enumerate() {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        let (fwd, bwd) = one_sided_derivatives(norm, y, &e);
        if (fwd - bwd).abs() > KINK_THRESHOLD {
            return None;
        }
        *gk = 0.5 * (fwd + bwd);
    }
    Some(g)
}

pub fn is_kink(norm: &NormModel, y: &[f64]) -> bool {
    subgradient_sq(norm, y).is_none()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extrema {
    pub r_m: f64,
    pub r_max: f64,
    pub argmin: Vec<f64>,
    pub argmax: Vec<f64>,
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Minimizes `f` over the unit sphere near `start` by golden-section sweeps in a tangent chart.
fn polish_on_sphere(dim: usize, f: &impl Fn(&[f64]) -> f64, start: &[f64], width: f64) -> Vec<f64> {
    if dim == 2 {
        let th0 = sphere::angles(start)[0];
        let th = golden_min(|t| f(&sphere::direction2(t)), th0 - width, th0 + width, ANGLE_TOL);
        return sphere::direction2(th).to_vec();
    }
    let basis = sphere::tangent_basis(start);
    let mut s = [0.0, 0.0];
    for _ in 0..60 {
        let old = s;
        for k in 0..2 {
            let lo = s[k] - width;
            let hi = s[k] + width;
            s[k] = golden_min(
                |x| {
                    let mut t = s;
                    t[k] = x;
                    f(&sphere::chart(start, &basis, &t))
                },
                lo,
                hi,
                ANGLE_TOL,
            );
        }
        if (s[0] - old[0]).abs().max((s[1] - old[1]).abs()) < ANGLE_TOL {
            break;
        }
    }
    sphere::chart(start, &basis, &s)
}

/// Extremes of `f` on the unit sphere: dense deterministic cover, then local polish.
pub(crate) fn sphere_extrema(dim: usize, samples: usize, f: impl Fn(&[f64]) -> f64) -> (Vec<f64>, Vec<f64>) {
    let cover = sphere::cover(dim, samples);
    let vals: Vec<f64> = cover.iter().map(|d| f(d)).collect();
    let imin = (0..vals.len()).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let imax = (0..vals.len()).max_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let width = match dim {
        2 => 2.0 * sphere::TWO_PI / samples as f64,
        _ => 3.0 * (4.0 * std::f64::consts::PI / samples as f64).sqrt(),
    };
    let argmin = polish_on_sphere(dim, &f, &cover[imin], width);
    let argmax = polish_on_sphere(dim, &|y: &[f64]| -f(y), &cover[imax], width);
    (argmin, argmax)
}

/// `min` and `max` of `F` on the Euclidean unit sphere.
pub fn estimate_extrema(norm: &NormModel, sphere_samples: usize) -> Result<Extrema> {
    if sphere_samples < 8 {
        return Err(Error::Parameter("sphere_samples must be at least 8".into()));
    }
    let (argmin, argmax) = sphere_extrema(norm.dim(), sphere_samples, |y| norm.eval(y));
    let r_m = norm.eval(&argmin);
    let r_max = norm.eval(&argmax);
    if !(r_m >= 1e-12) {
        return Err(Error::Construction(format!("degenerate norm: minimum {r_m:e} on the unit sphere")));
    }
    Ok(Extrema { r_m, r_max, argmin, argmax })
}

/// Smallest sampled second difference quotient of `F²` over unit points and unit directions.
pub fn estimate_gamma(norm: &NormModel, samples: usize) -> f64 {
    let h = 1e-4;
    let pts = sphere::cover(norm.dim(), samples);
    let dirs = sphere::cover(norm.dim(), 4 * norm.dim() * norm.dim());
    let mut best = f64::INFINITY;
    for y in &pts {
        let f0 = norm.eval_sq(y);
        for v in &dirs {
            let q = (norm.eval_sq(&vecops::axpy(y, h, v)) - 2.0 * f0 + norm.eval_sq(&vecops::axpy(y, -h, v))) / (h * h);
            best = best.min(q);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormConstants {
    pub dim: usize,
    pub r_max: f64,
    pub r_m: f64,
    pub tau: f64,
    pub gamma: Modulus,
    pub gamma0: f64,
    /// Radii of the working annulus `1/2 <= |y| <= 2 r_M / r_m`.
    pub annulus: (f64, f64),
}

impl NormConstants {
    pub fn new(dim: usize, r_m: f64, r_max: f64, gamma: Modulus) -> Self {
        Self {
            dim,
            r_max,
            r_m,
            tau: tau_bound(dim, r_m, r_max) * TAU_SAFETY,
            gamma,
            gamma0: gamma0(r_m, r_max, gamma.value),
            annulus: (0.5, 2.0 * r_max / r_m),
        }
    }

    /// Lower constant `r_m²/32` of the radial growth inequality.
    pub fn growth_lower(&self) -> f64 {
        self.r_m * self.r_m / 32.0
    }

    /// Upper constant `(2 r_m r_M³ + 12 r_M⁴) / r_m²`.
    pub fn growth_upper(&self) -> f64 {
        let (m, mx) = (self.r_m, self.r_max);
        (2.0 * m * mx.powi(3) + 12.0 * mx.powi(4)) / (m * m)
    }

    /// Lower bound `r_m⁴ / (8 r_m r_M³ + 48 r_M⁴)` on the radial-derivative quotient.
    pub fn lambda_lower(&self) -> f64 {
        lambda_lower(self.r_m, self.r_max)
    }
}

/// Open upper bound `r_m / (8 n r_M)` on the smoothing radius.
pub fn tau_bound(dim: usize, r_m: f64, r_max: f64) -> f64 {
    r_m / (8.0 * dim as f64 * r_max)
}

pub fn lambda_lower(r_m: f64, r_max: f64) -> f64 {
    r_m.powi(4) / (8.0 * r_m * r_max.powi(3) + 48.0 * r_max.powi(4))
}

pub fn gamma0(r_m: f64, r_max: f64, gamma: f64) -> f64 {
    (r_m * r_m / 2.0).min(gamma * lambda_lower(r_m, r_max))
}

/// Extrema plus derived constants; uses the sampled modulus when none is attached to the norm.
pub fn constants(norm: &NormModel, sphere_samples: usize) -> Result<NormConstants> {
    let ex = estimate_extrema(norm, sphere_samples)?;
    let gamma =
        norm.gamma().unwrap_or_else(|| Modulus { value: estimate_gamma(norm, 512), source: GammaSource::Estimated });
    if !(gamma.value > 0.0) {
        return Err(Error::Construction(format!("non-positive convexity modulus {}", gamma.value)));
    }
    Ok(NormConstants::new(norm.dim(), ex.r_m, ex.r_max, gamma))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Midpoint-type strong convexity test of an arbitrary function `f2` on the ball of radius 2.
pub fn check_strong_convexity_fn(
    name: &str,
    dim: usize,
    f2: impl Fn(&[f64]) -> f64,
    gamma_claim: f64,
    pair_samples: usize,
    seed: u64,
) -> CheckReport {
    let mut rep = CheckReport::new(name);
    let mut r = rng(seed);
    let origin = vec![0.0; dim];
    for k in 0..pair_samples {
        let y = sphere::random_in_ball(&mut r, &origin, 2.0);
        let z = if k % 4 == 3 {
            let rad = 10f64.powf(r.random_range(-3.0..-1.0));
            sphere::random_in_ball(&mut r, &y, rad)
        } else {
            sphere::random_in_ball(&mut r, &origin, 2.0)
        };
        let t: f64 = r.random_range(0.0..1.0);
        let mid: Vec<f64> = y.iter().zip(&z).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let (fy, fz) = (f2(&y), f2(&z));
        let d2 = vecops::dist(&y, &z).powi(2);
        let rhs = t * fy + (1.0 - t) * fz - 0.5 * gamma_claim * t * (1.0 - t) * d2;
        let tol = 1e-9 * (1.0 + t * fy + (1.0 - t) * fz);
        rep.record(rhs + tol - f2(&mid));
    }
    rep
}

pub fn check_strong_convexity(norm: &NormModel, gamma_claim: f64, pair_samples: usize, seed: u64) -> CheckReport {
    check_strong_convexity_fn(
        &format!("strong convexity of {}^2 at gamma={gamma_claim:e}", norm.label()),
        norm.dim(),
        |y| norm.eval_sq(y),
        gamma_claim,
        pair_samples,
        seed,
    )
}

/// For each sampled unit-sphere point `y` with subgradient `α`, the ball centered at `y - α/γ`
/// with radius `|α|/γ` must contain every sampled unit-sphere point. Reports the largest radius.
pub fn check_enclosing_sphere(norm: &NormModel, gamma: f64, samples: usize) -> CheckReport {
    let mut rep = CheckReport::new(format!("enclosing sphere of {}", norm.label()));
    let pts: Vec<Vec<f64>> =
        sphere::cover(norm.dim(), samples).iter().map(|d| vecops::scale(d, 1.0 / norm.eval(d))).collect();
    let mut radius_max: f64 = 0.0;
    for y in &pts {
        let Some(alpha) = subgradient_sq(norm, y) else {
            rep.skip();
            continue;
        };
        let center = vecops::axpy(y, -1.0 / gamma, &alpha);
        let radius = vecops::norm(&alpha) / gamma;
        radius_max = radius_max.max(radius);
        let worst = pts.iter().map(|p| vecops::dist(p, &center)).fold(0.0, f64::max);
        rep.record(radius + 1e-7 * (1.0 + radius) - worst);
    }
    if rep.skipped > 0 {
        rep.note(format!("{} kink points skipped", rep.skipped));
    }
    rep.with_value(radius_max)
}

/// Samples `v` in the working annulus, `w` near `v` and `t ∈ (0,1)` and checks
/// `r_m²/32 · t < f2(w + t v/|v|) - f2(w) < (2 r_m r_M³ + 12 r_M⁴)/r_m² · t`.
pub fn check_radial_growth_fn(
    name: &str,
    dim: usize,
    f2: impl Fn(&[f64]) -> f64,
    consts: &NormConstants,
    samples: usize,
    seed: u64,
) -> CheckReport {
    let mut rep = CheckReport::new(name);
    let mut r = rng(seed);
    let (lo, hi) = (consts.growth_lower(), consts.growth_upper());
    let n = dim as f64;
    let mut slope_lo = f64::INFINITY;
    let mut slope_hi: f64 = 0.0;
    for k in 0..samples {
        let v = sphere::random_in_shell(&mut r, dim, consts.annulus.0, consts.annulus.1);
        let vn = vecops::norm(&v);
        let eps = consts.r_m * vn / (4.0 * n * consts.r_max);
        let w = sphere::random_in_ball(&mut r, &v, eps);
        let t = if k % 5 == 0 { 1e-4 } else { r.random_range(1e-6..1.0) };
        let inc = f2(&vecops::axpy(&w, t / vn, &v)) - f2(&w);
        slope_lo = slope_lo.min(inc / t);
        slope_hi = slope_hi.max(inc / t);
        rep.record((inc - lo * t).min(hi * t - inc) / t);
    }
    rep.note(format!("slopes in [{slope_lo:.4e}, {slope_hi:.4e}] vs ({lo:.4e}, {hi:.4e})"));
    rep
}

pub fn check_radial_growth(norm: &NormModel, consts: &NormConstants, samples: usize, seed: u64) -> CheckReport {
    check_radial_growth_fn(
        &format!("radial growth of {}", norm.label()),
        norm.dim(),
        |y| norm.eval_sq(y),
        consts,
        samples,
        seed,
    )
}

/// `F(μy) = μF(y)` within relative `TOL_HOM`.
pub fn check_homogeneity(norm: &NormModel, samples: usize, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new(format!("homogeneity of {}", norm.label()));
    let mut r = rng(seed);
    let origin = vec![0.0; norm.dim()];
    if norm.eval(&origin) != 0.0 {
        rep.fail("F(0) != 0");
    }
    for _ in 0..samples {
        let y = sphere::random_in_ball(&mut r, &origin, 3.0);
        let mu: f64 = 10f64.powf(r.random_range(-2.0..2.0));
        let fy = norm.eval(&y);
        if !(fy > 0.0) {
            rep.record(-1.0);
            continue;
        }
        let lhs = norm.eval(&vecops::scale(&y, mu));
        rep.record(TOL_HOM * mu * fy - (lhs - mu * fy).abs());
    }
    rep
}

pub fn check_triangle(norm: &NormModel, samples: usize, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new(format!("triangle inequality of {}", norm.label()));
    let mut r = rng(seed);
    let origin = vec![0.0; norm.dim()];
    for _ in 0..samples {
        let y = sphere::random_in_ball(&mut r, &origin, 3.0);
        let z = sphere::random_in_ball(&mut r, &origin, 3.0);
        rep.record(norm.eval(&y) + norm.eval(&z) + TOL_TRI - norm.eval(&vecops::add(&y, &z)));
    }
    rep
}

/// `r_m |y| <= F(y) <= r_M |y|`.
pub fn check_equivalence(norm: &NormModel, consts: &NormConstants, samples: usize, seed: u64) -> CheckReport {
    let mut rep = CheckReport::new(format!("norm equivalence of {}", norm.label()));
    let mut r = rng(seed);
    let origin = vec![0.0; norm.dim()];
    for _ in 0..samples {
        let y = sphere::random_in_ball(&mut r, &origin, 3.0);
        let (f, e) = (norm.eval(&y), vecops::norm(&y));
        let tol = 1e-10 * (1.0 + e);
        rep.record((f - consts.r_m * e + tol).min(consts.r_max * e + tol - f));
    }
    rep
}

/// `|F(y) - F(z)| <= C |y - z|` with `C = √n · max F` on the unit sphere of the sum norm.
pub fn check_lipschitz(norm: &NormModel, samples: usize, seed: u64) -> CheckReport {
    let dim = norm.dim();
    let sum_sphere_max = sphere::cover(dim, 4096)
        .iter()
        .map(|d| norm.eval(d) / d.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let c = (dim as f64).sqrt() * sum_sphere_max * 1.01;
    let mut rep = CheckReport::new(format!("lipschitz bound of {}", norm.label())).with_value(c);
    let mut r = rng(seed);
    let origin = vec![0.0; dim];
    for k in 0..samples {
        let y = sphere::random_in_ball(&mut r, &origin, 3.0);
        let z = if k % 2 == 0 {
            sphere::random_in_ball(&mut r, &y, 1e-2)
        } else {
            sphere::random_in_ball(&mut r, &origin, 3.0)
        };
        rep.record(c * vecops::dist(&y, &z) + 1e-12 - (norm.eval(&y) - norm.eval(&z)).abs());
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn randers_rejects_large_drift() {
        assert!(NormModel::randers(vec![1.0, 0.0]).is_err());
        assert!(NormModel::randers(vec![0.6, 0.8]).is_err());
        assert!(NormModel::randers(vec![0.5, 0.0]).is_ok());
    }

    #[test]
    fn extrema_of_catalog() {
        let e = estimate_extrema(&NormModel::euclidean(2).unwrap(), 64).unwrap();
        assert_relative_eq!(e.r_m, 1.0, epsilon = 1e-14);
        assert_relative_eq!(e.r_max, 1.0, epsilon = 1e-14);

        let e = estimate_extrema(&NormModel::randers(vec![0.5, 0.0]).unwrap(), 64).unwrap();
        assert_relative_eq!(e.r_m, 0.5, epsilon = 1e-12);
        assert_relative_eq!(e.r_max, 1.5, epsilon = 1e-12);

        // Brute force over a dense grid.
        let sm = NormModel::shifted_max(2).unwrap();
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for k in 0..100_000 {
            let th = sphere::TWO_PI * k as f64 / 100_000.0;
            let f = sm.eval(&sphere::direction2(th));
            lo = lo.min(f);
            hi = hi.max(f);
        }
        let e = estimate_extrema(&sm, 64).unwrap();
        assert_relative_eq!(e.r_m, lo, epsilon = 1e-12);
        assert_relative_eq!(e.r_max, hi, epsilon = 1e-12);
        assert_relative_eq!(e.r_max, 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn extrema_in_space() {
        let e = estimate_extrema(&NormModel::randers(vec![0.1, -0.3, 0.2]).unwrap(), 200).unwrap();
        let b = (0.14f64).sqrt();
        assert_relative_eq!(e.r_m, 1.0 - b, epsilon = 1e-12);
        assert_relative_eq!(e.r_max, 1.0 + b, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_sample_count_rejected() {
        assert!(estimate_extrema(&NormModel::euclidean(2).unwrap(), 4).is_err());
    }

    #[test]
    fn constants_for_randers() {
        let c = constants(&NormModel::randers(vec![0.5, 0.0]).unwrap(), 64).unwrap();
        assert!(c.tau < 1.0 / 48.0);
        assert_relative_eq!(c.gamma.value, 1.0 / 16.0, epsilon = 1e-15);
        assert_relative_eq!(c.annulus.1, 6.0, epsilon = 1e-10);
    }

    #[test]
    fn euclidean_gamma0() {
        let c = constants(&NormModel::euclidean(2).unwrap(), 64).unwrap();
        assert_relative_eq!(c.gamma0, 1.0 / 28.0, epsilon = 1e-15);
    }

    #[test]
    fn strong_convexity_examples() {
        let e = NormModel::euclidean(2).unwrap();
        assert!(check_strong_convexity(&e, 2.0, 4000, 1).passed);
        assert!(!check_strong_convexity(&e, 2.5, 4000, 1).passed);
        assert!(!check_strong_convexity(&e, 2.0 + 1e-3, 4000, 1).passed);
        assert!(check_strong_convexity(&NormModel::shifted_max(2).unwrap(), 2.0, 4000, 2).passed);
        let r = NormModel::randers(vec![0.5, 0.0]).unwrap();
        assert!(check_strong_convexity(&r, r.gamma().unwrap().value, 4000, 3).passed);
    }

    #[test]
    fn antipodal_equality_case() {
        // t = 1/2, z = -y: margin is exactly zero at γ = 2.
        let e = NormModel::euclidean(2).unwrap();
        let y = [0.6, -0.8];
        let lhs = e.eval_sq(&[0.0, 0.0]);
        let rhs = 0.5 * e.eval_sq(&y) + 0.5 * e.eval_sq(&[-0.6, 0.8]) - 0.5 * 2.0 * 0.25 * 4.0;
        assert_relative_eq!(lhs, rhs, epsilon = 1e-15);
    }

    #[test]
    fn randers_modulus_bounds_hessian() {
        for b in [vec![0.5, 0.0], vec![0.2, 0.3], vec![0.0, 0.4, 0.3]] {
            let r = NormModel::randers(b).unwrap();
            assert!(estimate_gamma(&r, 400) >= r.gamma().unwrap().value);
        }
    }

    #[test]
    fn enclosing_sphere_euclidean_is_unit() {
        let e = NormModel::euclidean(2).unwrap();
        let rep = check_enclosing_sphere(&e, 2.0, 256);
        assert!(rep.passed);
        assert_relative_eq!(rep.value.unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn radial_growth_euclidean_point() {
        let c = constants(&NormModel::euclidean(2).unwrap(), 64).unwrap();
        let inc = 1.5f64.powi(2) - 1.0;
        assert!(c.growth_lower() * 0.5 < inc && inc < c.growth_upper() * 0.5);
        assert_relative_eq!(c.growth_upper(), 14.0);
    }

    #[test]
    fn shifted_max_has_no_first_order_kink() {
        let sm = NormModel::shifted_max(2).unwrap();
        assert!(!is_kink(&sm, &[0.0, 1.0]));
        assert!(!is_kink(&sm, &[1e-9, -0.7]));
    }

    #[test]
    fn gradients_match_differences() {
        for norm in [
            NormModel::euclidean(3).unwrap(),
            NormModel::randers(vec![0.2, -0.1, 0.3]).unwrap(),
            NormModel::shifted_max(3).unwrap(),
        ] {
            let y = [0.4, -0.3, 0.8];
            let g = norm.gradient(&y);
            let fd = norm.central_gradient(&y);
            assert!(vecops::max_abs_diff(&g, &fd) < 1e-8, "{}", norm.label());
        }
    }
}
