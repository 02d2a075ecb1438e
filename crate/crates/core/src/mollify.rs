//! The standard mollifier, the convolution `η_ε * F²`, and the smoothed norm `F̃ε`
//! whose `r_M`-level set is the `r_M²`-level set of the convolution.

use std::sync::{Arc, OnceLock};

use crate::asymnorm::{self, GammaSource, Modulus, NormConstants, NormModel};
use crate::error::{Error, Result};
use crate::profile::{ProfileGrid, RadialProfile};
use crate::quadrature::{self, BallOrders, BallRule};
use crate::sphere;
use crate::vecops;

pub const QUAD_TOL: f64 = 1e-8;
pub const ROOTFIND_TOL: f64 = 1e-12;

/// Profile of the unnormalized bump `exp(1/(s - 1))` in `s = |ζ|²`, zero for `s >= 1`.
fn bump(s: f64) -> f64 {
    if s < 1.0 {
        (1.0 / (s - 1.0)).exp()
    } else {
        0.0
    }
}

/// Normalization `C` making the unit mollifier integrate to one; computed once per dimension.
pub fn normalization(dim: usize) -> f64 {
    static C2: OnceLock<f64> = OnceLock::new();
    static C3: OnceLock<f64> = OnceLock::new();
    let compute = || {
        let integral: f64 = quadrature::gauss_legendre(400, 0.0, 1.0)
            .iter()
            .map(|&(r, w)| w * r.powi(dim as i32 - 1) * bump(r * r))
            .sum();
        1.0 / (quadrature::sphere_area(dim) * integral)
    };
    match dim {
        2 => *C2.get_or_init(compute),
        3 => *C3.get_or_init(compute),
        n => panic!("unsupported dimension {n}"),
    }
}

/// `η(ζ) = C exp(1/(|ζ|² - 1))` on the open unit ball.
pub fn unit_mollifier(zeta: &[f64]) -> f64 {
    normalization(zeta.len()) * bump(vecops::dot(zeta, zeta))
}

/// `∇η(ζ) = η(ζ) · (-2ζ / (|ζ|² - 1)²)`.
pub fn unit_mollifier_gradient(zeta: &[f64]) -> Vec<f64> {
    let s = vecops::dot(zeta, zeta);
    if s >= 1.0 {
        return vec![0.0; zeta.len()];
    }
    let f = unit_mollifier(zeta) * (-2.0 / ((s - 1.0) * (s - 1.0)));
    vecops::scale(zeta, f)
}

/// `η_ε(z) = ε⁻ⁿ η(z/ε)` discretized on a polar product rule over `B[0, ε]`.
#[derive(Debug, Clone)]
pub struct Mollifier {
    dim: usize,
    epsilon: f64,
    normalization: f64,
    /// Unit-ball nodes `ζ_i`; the physical offsets are `ε ζ_i`.
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    grad_weights: Vec<Vec<f64>>,
    mass: f64,
}

impl Mollifier {
    pub fn new(dim: usize, epsilon: f64, orders: BallOrders) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Parameter(format!("mollifier radius must be positive, got {epsilon}")));
        }
        if dim != 2 && dim != 3 {
            return Err(Error::Parameter(format!("dimension {dim} unsupported")));
        }
        let rule = BallRule::new(dim, orders);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut grad_weights = Vec::new();
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let eta = unit_mollifier(p);
            if eta == 0.0 {
                continue;
            }
            nodes.push(p.clone());
            weights.push(w * eta);
            grad_weights.push(vecops::scale(&unit_mollifier_gradient(p), *w));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > QUAD_TOL {
            return Err(Error::Construction(format!(
                "mollifier mass {mass} differs from 1 by more than {QUAD_TOL:e}; raise the radial order"
            )));
        }
        // Remove the residual quadrature bias so constants convolve exactly.
        for w in weights.iter_mut() {
            *w /= mass;
        }
        for g in grad_weights.iter_mut() {
            for gk in g.iter_mut() {
                *gk /= mass;
            }
        }
        Ok(Self { dim, epsilon, normalization: normalization(dim), nodes, weights, grad_weights, mass })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Discrete integral of `η_ε` under the raw quadrature rule, before renormalization.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// `η_ε(z)`; exactly zero outside `B[0, ε)`.
    pub fn eval(&self, z: &[f64]) -> f64 {
        let zeta = vecops::scale(z, 1.0 / self.epsilon);
        unit_mollifier(&zeta) / self.epsilon.powi(self.dim as i32)
    }

    /// `∫ η_ε(z) g(y - z) dz` and `∫ ∇η_ε(z) g(y - z) dz`.
    pub fn convolve_with_gradient(&self, g: impl Fn(&[f64]) -> f64, y: &[f64]) -> (f64, Vec<f64>) {
        let mut value = 0.0;
        let mut grad = vec![0.0; self.dim];
        let mut p = vec![0.0; self.dim];
        for ((zeta, w), gw) in self.nodes.iter().zip(&self.weights).zip(&self.grad_weights) {
            for k in 0..self.dim {
                p[k] = y[k] - self.epsilon * zeta[k];
            }
            let gv = g(&p);
            value += w * gv;
            for k in 0..self.dim {
                grad[k] += gw[k] * gv;
            }
        }
        for gk in grad.iter_mut() {
            *gk /= self.epsilon;
        }
        (value, grad)
    }

    pub fn convolve(&self, g: impl Fn(&[f64]) -> f64, y: &[f64]) -> f64 {
        let mut value = 0.0;
        let mut p = vec![0.0; self.dim];
        for (zeta, w) in self.nodes.iter().zip(&self.weights) {
            for k in 0..self.dim {
                p[k] = y[k] - self.epsilon * zeta[k];
            }
            value += w * g(&p);
        }
        value
    }
}

/// `η_ε * F²` for a norm whose admissible smoothing window `(0, τ)` contains `ε`.
#[derive(Debug, Clone)]
pub struct Convolution<'a> {
    norm: &'a NormModel,
    mollifier: &'a Mollifier,
}

impl<'a> Convolution<'a> {
    pub fn new(norm: &'a NormModel, consts: &NormConstants, mollifier: &'a Mollifier) -> Result<Self> {
        if mollifier.epsilon() >= consts.tau {
            return Err(Error::EpsilonTooLarge { eps: mollifier.epsilon(), tau: consts.tau });
        }
        if mollifier.dim() != norm.dim() {
            return Err(Error::Parameter("mollifier and norm dimensions differ".into()));
        }
        Ok(Self { norm, mollifier })
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        self.mollifier.convolve(|p| self.norm.eval_sq(p), y)
    }

    pub fn value_and_gradient(&self, y: &[f64]) -> (f64, Vec<f64>) {
        self.mollifier.convolve_with_gradient(|p| self.norm.eval_sq(p), y)
    }
}

/// `(η_ε * F²)(y)`.
pub fn convolve_f2(norm: &NormModel, consts: &NormConstants, mollifier: &Mollifier, y: &[f64]) -> Result<f64> {
    Ok(Convolution::new(norm, consts, mollifier)?.value(y))
}

/// Radius along one direction where the convolution reaches `r_M²`, with the radial derivative there.
fn level_radius(conv: &Convolution, consts: &NormConstants, d: &[f64]) -> Result<(f64, f64, f64)> {
    let target = consts.r_max * consts.r_max;
    let f = |r: f64| {
        let (v, g) = conv.value_and_gradient(&vecops::scale(d, r));
        (v - target, vecops::dot(&g, d))
    };
    let (mut lo, mut hi) = consts.annulus;
    let (f_lo, _) = f(lo);
    let (f_hi, _) = f(hi);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::RadialMonotonicity { direction: d.to_vec() });
    }
    let mut r = (consts.r_max / conv.norm.eval(d)).clamp(lo, hi);
    for _ in 0..200 {
        let (v, slope) = f(r);
        if v < 0.0 {
            lo = r;
        } else {
            hi = r;
        }
        let newton = r - v / slope;
        let next = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        let step = (next - r).abs();
        r = next;
        if step < ROOTFIND_TOL || hi - lo < ROOTFIND_TOL {
            let (v, slope) = f(r);
            return Ok((r, v.abs(), slope));
        }
    }
    Err(Error::Construction(format!("level radius did not converge along {d:?}")))
}

/// `φε` at every node of `grid`.
pub fn extract_phi(conv: &Convolution, consts: &NormConstants, grid: ProfileGrid) -> Result<Vec<f64>> {
    grid.node_angles().iter().map(|a| level_radius(conv, consts, &sphere::direction(a)).map(|(r, _, _)| r)).collect()
}

/// Resolution of a smoothing run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingOptions {
    pub orders: BallOrders,
    pub grid: ProfileGrid,
    pub sphere_samples: usize,
}

impl SmoothingOptions {
    pub fn default_for(dim: usize) -> Self {
        Self {
            orders: BallOrders::default_for(dim),
            grid: ProfileGrid::default_for(dim),
            sphere_samples: if dim == 2 { 256 } else { 400 },
        }
    }
}

#[derive(Debug, Clone)]
pub struct MollifiedNorm {
    base: NormModel,
    base_constants: NormConstants,
    epsilon: f64,
    profile: RadialProfile,
    pub r_eps_m: f64,
    pub r_eps_max: f64,
    pub gamma_eps: f64,
    pub gamma_source: GammaSource,
    pub lambda_eps_min: f64,
    /// Largest `|(η_ε*F²)(φε θ) - r_M²|` over the grid nodes.
    pub max_residual: f64,
    pub mollifier_mass: f64,
    pub warnings: Vec<String>,
}

impl MollifiedNorm {
    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &NormModel {
        &self.base
    }

    pub fn base_constants(&self) -> &NormConstants {
        &self.base_constants
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn modulus(&self) -> Modulus {
        Modulus { value: self.gamma_eps, source: self.gamma_source }
    }

    /// `F̃ε(y) = |y| r_M / φε(y/|y|)`.
    pub fn eval(&self, y: &[f64]) -> f64 {
        self.profile.eval(y)
    }
}

/// Builds `F̃ε`: extracts `φε` on the grid, its extrema on the unit sphere, the minimal
/// radial-derivative quotient `λ_{ε,m}` and the modulus `γε = min(2 r_{ε,m}², γ λ_{ε,m})`.
pub fn build_mollified_norm(
    norm: &NormModel,
    consts: &NormConstants,
    epsilon: f64,
    opts: &SmoothingOptions,
) -> Result<MollifiedNorm> {
    if !(epsilon > 0.0) {
        return Err(Error::Parameter(format!("smoothing radius must be positive, got {epsilon}")));
    }
    let mollifier = Mollifier::new(norm.dim(), epsilon, opts.orders)?;
    let conv = Convolution::new(norm, consts, &mollifier)?;
    let mut phi = Vec::with_capacity(opts.grid.len());
    let mut max_residual: f64 = 0.0;
    let mut lambda_min = f64::INFINITY;
    let r2 = consts.r_max * consts.r_max;
    for a in opts.grid.node_angles() {
        let d = sphere::direction(&a);
        let (r, residual, slope) = level_radius(&conv, consts, &d)?;
        if !(r > consts.annulus.0 && r < consts.annulus.1) {
            return Err(Error::Construction(format!("level radius {r} left the working annulus")));
        }
        max_residual = max_residual.max(residual);
        lambda_min = lambda_min.min((2.0 * r2 / r) / slope);
        phi.push(r);
    }
    let profile = RadialProfile::new(opts.grid, phi, consts.r_max)?;
    let (argmin, argmax) = asymnorm::sphere_extrema(norm.dim(), opts.sphere_samples, |y| profile.eval(y));
    let r_eps_m = profile.eval(&argmin);
    let r_eps_max = profile.eval(&argmax);
    let mut warnings = Vec::new();
    if !(r_eps_m > 0.5 * consts.r_m && r_eps_m < 1.5 * consts.r_m) {
        warnings.push(format!("r_eps_m = {r_eps_m} outside the window ({}, {})", 0.5 * consts.r_m, 1.5 * consts.r_m));
    }
    let bound = consts.lambda_lower();
    if !(lambda_min > 1.1 * bound) {
        warnings.push(format!("lambda_eps_min = {lambda_min:e} within 10% of lower bound {bound:e}"));
    }
    let gamma_eps = (2.0 * r_eps_m * r_eps_m).min(consts.gamma.value * lambda_min);
    let gamma_source = match consts.gamma.source {
        GammaSource::Estimated => GammaSource::Estimated,
        _ => GammaSource::Certified,
    };
    Ok(MollifiedNorm {
        base: norm.clone(),
        base_constants: consts.clone(),
        epsilon,
        profile,
        r_eps_m,
        r_eps_max,
        gamma_eps,
        gamma_source,
        lambda_eps_min: lambda_min,
        max_residual,
        mollifier_mass: mollifier.mass(),
        warnings,
    })
}

/// Convenience wrapper returning the smoothed norm as a `NormModel`.
pub fn smoothed_norm(
    norm: &NormModel,
    consts: &NormConstants,
    epsilon: f64,
    opts: &SmoothingOptions,
) -> Result<NormModel> {
    Ok(NormModel::mollified(Arc::new(build_mollified_norm(norm, consts, epsilon, opts)?)))
}

/// `F̃ε(y)`.
pub fn eval_mollified(mn: &MollifiedNorm, y: &[f64]) -> f64 {
    mn.eval(y)
}

/// Largest change of the central second difference of `θ ↦ F(direction(θ))` between neighbouring
/// probe angles `δ` apart in `[θ0 - window, θ0 + window]`; small values mean a continuous second derivative.
pub fn angular_smoothness_probe(norm: &NormModel, theta0: f64, window: f64, h: f64, delta: f64) -> f64 {
    let f = |t: f64| norm.eval(&sphere::direction2(t));
    let d2 = |t: f64| (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    let steps = (2.0 * window / delta).ceil() as usize;
    let mut prev = d2(theta0 - window);
    let mut worst: f64 = 0.0;
    for k in 1..=steps {
        let cur = d2(theta0 - window + k as f64 * delta);
        worst = worst.max((cur - prev).abs());
        prev = cur;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymnorm::constants;
    use approx::assert_relative_eq;

    /// Second moment `∫ η |ζ|² dζ` by composite Simpson on the radial profile (independent of Gauss–Legendre).
    fn second_moment_oracle(dim: usize) -> f64 {
        let n = 200_000;
        let h = 1.0 / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..=n {
            let r = k as f64 * h;
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let b = bump(r * r) * r.powi(dim as i32 - 1);
            num += w * b * r * r;
            den += w * b;
        }
        num / den
    }

    #[test]
    fn normalization_integrates_to_one() {
        for dim in [2, 3] {
            let m = Mollifier::new(dim, 0.01, BallOrders::default_for(dim)).unwrap();
            assert!((m.mass() - 1.0).abs() < QUAD_TOL);
        }
    }

    #[test]
    fn support_is_the_closed_ball() {
        let m = Mollifier::new(2, 0.1, BallOrders::default_for(2)).unwrap();
        assert_eq!(m.eval(&[0.1, 0.0]), 0.0);
        assert_eq!(m.eval(&[0.2, 0.05]), 0.0);
        assert!(m.eval(&[0.099, 0.0]) > 0.0);
    }

    #[test]
    fn low_radial_order_is_rejected() {
        let orders = BallOrders { radial: 12, azimuthal: 48, polar: 0 };
        assert!(Mollifier::new(2, 0.01, orders).is_err());
    }

    #[test]
    fn euclidean_convolution_shift() {
        for dim in [2, 3] {
            let e = NormModel::euclidean(dim).unwrap();
            let c = constants(&e, 64).unwrap();
            let eps = 0.5 * c.tau;
            let m = Mollifier::new(dim, eps, BallOrders::default_for(dim)).unwrap();
            let kappa = eps * eps * second_moment_oracle(dim);
            let mut y = vec![0.0; dim];
            y[0] = 0.7;
            y[1] = -0.4;
            let v = convolve_f2(&e, &c, &m, &y).unwrap();
            assert!((v - (0.65 + kappa)).abs() < 1e-10, "dim {dim}: {v} vs {}", 0.65 + kappa);
        }
    }

    #[test]
    fn epsilon_at_tau_rejected() {
        let r = NormModel::randers(vec![0.5, 0.0]).unwrap();
        let c = constants(&r, 64).unwrap();
        let m = Mollifier::new(2, c.tau, BallOrders::default_for(2)).unwrap();
        assert!(matches!(convolve_f2(&r, &c, &m, &[1.0, 0.0]), Err(Error::EpsilonTooLarge { .. })));
    }

    #[test]
    fn gradient_of_convolution_matches_differences() {
        let r = NormModel::randers(vec![0.5, 0.0]).unwrap();
        let c = constants(&r, 64).unwrap();
        let m = Mollifier::new(2, 0.5 * c.tau, BallOrders::default_for(2)).unwrap();
        let conv = Convolution::new(&r, &c, &m).unwrap();
        let y = [0.8, 0.6];
        let (_, g) = conv.value_and_gradient(&y);
        let h = 1e-5;
        for k in 0..2 {
            let mut yp = y;
            let mut ym = y;
            yp[k] += h;
            ym[k] -= h;
            let fd = (conv.value(&yp) - conv.value(&ym)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-6 * g[k].abs(), "{fd} {}", g[k]);
        }
    }

    #[test]
    fn euclidean_phi_is_constant_root() {
        let e = NormModel::euclidean(2).unwrap();
        let c = constants(&e, 64).unwrap();
        let eps = 0.25 * c.tau;
        let opts = SmoothingOptions { grid: ProfileGrid::Circle { count: 64 }, ..SmoothingOptions::default_for(2) };
        let mn = build_mollified_norm(&e, &c, eps, &opts).unwrap();
        let expected = (1.0 - eps * eps * second_moment_oracle(2)).sqrt();
        for v in mn.profile().node_values() {
            assert!((v - expected).abs() < 1e-11);
        }
        assert!(mn.max_residual < 1e-10);
        assert!(mn.gamma_eps >= c.gamma0);
        assert!(mn.lambda_eps_min > c.lambda_lower());
        assert!(mn.warnings.is_empty(), "{:?}", mn.warnings);
        // rescaled euclidean: F̃ε = |y| / φ.
        assert_relative_eq!(mn.eval(&[0.3, 0.4]), 0.5 / expected, epsilon = 1e-12);
    }

    #[test]
    fn randers_level_set_residual_off_grid() {
        let r = NormModel::randers(vec![0.5, 0.0]).unwrap();
        let c = constants(&r, 64).unwrap();
        let eps = 0.5 * c.tau;
        let opts = SmoothingOptions::default_for(2);
        let mn = build_mollified_norm(&r, &c, eps, &opts).unwrap();
        let m = Mollifier::new(2, eps, opts.orders).unwrap();
        let conv = Convolution::new(&r, &c, &m).unwrap();
        let n_fine = 10 * 1024;
        let mut worst: f64 = 0.0;
        for k in (0..n_fine).step_by(7) {
            let th = sphere::TWO_PI * (k as f64 + 0.5) / n_fine as f64;
            let d = sphere::direction2(th);
            let phi = mn.profile().radius(&d);
            worst = worst.max((conv.value(&vecops::scale(&d, phi)) - c.r_max * c.r_max).abs());
        }
        assert!(worst < 1e-10, "residual {worst:e}");
        // on the level set F̃ε = r_M, and homogeneity holds by construction
        let d = sphere::direction2(1.0);
        let y = vecops::scale(&d, mn.profile().radius(&d));
        assert_relative_eq!(mn.eval(&y), c.r_max, epsilon = 1e-14);
        assert_relative_eq!(mn.eval(&vecops::scale(&y, 2.0)), 2.0 * c.r_max, epsilon = 1e-13);
    }

    #[test]
    fn shifted_max_smoothing_removes_curvature_jump() {
        let sm = NormModel::shifted_max(2).unwrap();
        let c = constants(&sm, 64).unwrap();
        let smoothed = smoothed_norm(&sm, &c, 0.5 * c.tau, &SmoothingOptions::default_for(2)).unwrap();
        let half_pi = std::f64::consts::FRAC_PI_2;
        let raw = angular_smoothness_probe(&sm, half_pi, 2e-3, 1e-3, 5e-7);
        let smooth = angular_smoothness_probe(&smoothed, half_pi, 2e-3, 1e-3, 5e-7);
        assert!(raw > 1e-4, "raw probe {raw:e}");
        assert!(smooth < 1e-4, "smoothed probe {smooth:e}");
    }
}
