//! Dual asymmetric norm `F*(α) = max α(y)` over the unit sphere of `F`, its maximizer `u(α)`,
//! and the Lipschitz budget of `u` and of the coadjoint field over a dual annulus.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::asymnorm::NormModel;
use crate::error::{Error, Result};
use crate::report::CheckReport;
use crate::sphere;
use crate::vecops;

/// Angular agreement demanded of the two independent ascent runs.
pub const TIE_TOL: f64 = 1e-8;
/// Relative allowance on ratio bounds for rounding in the dual maximization.
pub const RATIO_TOL: f64 = 1e-8;
const HESS_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct DualEval {
    pub fstar: f64,
    /// `u(α)`, the point of the unit sphere of `F` where `α` is largest.
    pub maximizer: Vec<f64>,
    /// `dF*²(α) = 2 F*(α) u(α)`.
    pub grad_fstar2: Vec<f64>,
}

fn scan_count(dim: usize) -> usize {
    if dim == 2 {
        32
    } else {
        96
    }
}

/// Gradient of the degree-zero function `g(y) = α·y / F(y)`.
fn ratio_gradient(norm: &NormModel, alpha: &[f64], y: &[f64]) -> Vec<f64> {
    let f = norm.eval(y);
    let grad_f = norm.gradient(y);
    let ay = vecops::dot(alpha, y);
    alpha.iter().zip(&grad_f).map(|(a, g)| a / f - ay * g / (f * f)).collect()
}

fn ratio(norm: &NormModel, alpha: &[f64], y: &[f64]) -> f64 {
    vecops::dot(alpha, y) / norm.eval(y)
}

/// Newton ascent of `g` in tangent charts of the sphere, damped on the gradient norm.
fn ascend(norm: &NormModel, alpha: &[f64], start: &[f64]) -> Vec<f64> {
    let m = norm.dim() - 1;
    let mut d = start.to_vec();
    let mut grad = ratio_gradient(norm, alpha, &d);
    let mut gnorm = vecops::norm(&grad);
    let mut value = ratio(norm, alpha, &d);
    let mut radius = 0.3;
    for _ in 0..100 {
        let basis = sphere::tangent_basis(&d);
        let gt: Vec<f64> = basis.iter().map(|e| vecops::dot(&grad, e)).collect();
        let mut hess = vec![vec![0.0; m]; m];
        for j in 0..m {
            let gp = ratio_gradient(norm, alpha, &vecops::axpy(&d, HESS_STEP, &basis[j]));
            let gm = ratio_gradient(norm, alpha, &vecops::axpy(&d, -HESS_STEP, &basis[j]));
            for i in 0..m {
                hess[i][j] = (vecops::dot(&gp, &basis[i]) - vecops::dot(&gm, &basis[i])) / (2.0 * HESS_STEP);
            }
        }
        let mut step = newton_step(&hess, &gt).unwrap_or_else(|| vecops::scale(&gt, 0.5 / (1.0 + gnorm)));
        let len = vecops::norm(&step);
        if len > radius {
            step = vecops::scale(&step, radius / len);
        }
        let mut accepted = false;
        for _ in 0..50 {
            let mut y = d.clone();
            for (e, s) in basis.iter().zip(&step) {
                y = vecops::axpy(&y, *s, e);
            }
            let cand = vecops::normalized(&y);
            let cand_grad = ratio_gradient(norm, alpha, &cand);
            let cand_gnorm = vecops::norm(&cand_grad);
            let cand_value = ratio(norm, alpha, &cand);
            if cand_gnorm < gnorm || cand_value > value + 1e-15 * value.abs() {
                let moved = vecops::norm(&step);
                d = cand;
                grad = cand_grad;
                gnorm = cand_gnorm;
                value = cand_value;
                accepted = true;
                radius = (2.0 * moved).clamp(1e-3, 0.3);
                if moved < 1e-13 {
                    return d;
                }
                break;
            }
            step = vecops::scale(&step, 0.5);
        }
        if !accepted || gnorm == 0.0 {
            return d;
        }
    }
    d
}

/// `-H⁻¹ g` when `H` is negative definite (m ≤ 2).
fn newton_step(h: &[Vec<f64>], g: &[f64]) -> Option<Vec<f64>> {
    match g.len() {
        1 => (h[0][0] < 0.0).then(|| vec![-g[0] / h[0][0]]),
        2 => {
            let a = h[0][0];
            let b = 0.5 * (h[0][1] + h[1][0]);
            let c = h[1][1];
            let det = a * c - b * b;
            if a < 0.0 && det > 0.0 {
                Some(vec![-(c * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det])
            } else {
                None
            }
        }
        _ => None,
    }
}

/// `F*(α)`, `u(α)` and `dF*²(α)` by a coarse sphere scan followed by two independent ascents.
pub fn dual_norm(norm: &NormModel, alpha: &[f64]) -> Result<DualEval> {
    if alpha.len() != norm.dim() {
        return Err(Error::Parameter(format!(
            "covector has {} components, norm has dimension {}",
            alpha.len(),
            norm.dim()
        )));
    }
    if !alpha.iter().all(|a| a.is_finite()) || vecops::norm(alpha) == 0.0 {
        return Err(Error::Parameter("covector must be nonzero and finite".into()));
    }
    let cover = sphere::cover(norm.dim(), scan_count(norm.dim()));
    let vals: Vec<f64> = cover.iter().map(|d| ratio(norm, alpha, d)).collect();
    let mut order: Vec<usize> = (0..cover.len()).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let first = ascend(norm, alpha, &cover[order[0]]);
    let second = ascend(norm, alpha, &cover[order[1]]);
    let gap = vecops::dot(&first, &second).clamp(-1.0, 1.0).acos();
    let gap = if gap.is_nan() { 0.0 } else { gap.min(vecops::dist(&first, &second)) };
    if gap > TIE_TOL {
        return Err(Error::NotStrictlyConvex { gap });
    }
    let best = if ratio(norm, alpha, &first) >= ratio(norm, alpha, &second) { first } else { second };
    let maximizer = vecops::scale(&best, 1.0 / norm.eval(&best));
    let fstar = vecops::dot(alpha, &maximizer);
    let grad_fstar2 = vecops::scale(&maximizer, 2.0 * fstar);
    Ok(DualEval { fstar, maximizer, grad_fstar2 })
}

/// `|k1 - k2| / |α|`, the distance between the parallel hyperplanes `{α = k1}` and `{α = k2}`.
pub fn hyperplane_distance(alpha: &[f64], k1: f64, k2: f64) -> Result<f64> {
    let a = vecops::norm(alpha);
    if a == 0.0 {
        return Err(Error::Parameter("covector must be nonzero".into()));
    }
    Ok((k1 - k2).abs() / a)
}

/// Shell `inner <= |α| <= outer` in the dual space (Euclidean dual norm of the orthonormal basis).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualAnnulus {
    pub inner: f64,
    pub outer: f64,
}

impl DualAnnulus {
    pub fn new(inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && outer > inner && outer.is_finite()) {
            return Err(Error::Parameter(format!("dual annulus needs 0 < inner < outer, got ({inner}, {outer})")));
        }
        Ok(Self { inner, outer })
    }

    pub fn contains(&self, a: &[f64]) -> bool {
        let r = vecops::norm(a);
        r >= self.inner && r <= self.outer
    }

    /// Samples of the shell; every other pair is a near pair.
    pub fn sample_pairs(&self, dim: usize, pairs: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(pairs);
        while out.len() < pairs {
            let a = sphere::random_in_shell(&mut rng, dim, self.inner, self.outer);
            let b = if out.len() % 2 == 0 {
                let rad = vecops::norm(&a) * 10f64.powf(rng.random_range(-4.0..-1.0));
                sphere::random_in_ball(&mut rng, &a, rad)
            } else {
                sphere::random_in_shell(&mut rng, dim, self.inner, self.outer)
            };
            if self.contains(&b) {
                out.push((a, b));
            }
        }
        out
    }

    /// Deterministic grid of the shell: `radii` spheres of `directions` points each.
    pub fn grid(&self, dim: usize, radii: usize, directions: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(radii * directions);
        for i in 0..radii {
            let r = if radii == 1 {
                0.5 * (self.inner + self.outer)
            } else {
                self.inner + (self.outer - self.inner) * i as f64 / (radii - 1) as f64
            };
            let offset = 0.5 / directions as f64;
            for d in sphere::cover(dim, directions) {
                let d = if dim == 2 {
                    let th = sphere::angles(&d)[0] + offset * sphere::TWO_PI;
                    sphere::direction2(th).to_vec()
                } else {
                    d
                };
                out.push(vecops::scale(&d, r));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzBudget {
    /// `max 1/F*` over the annulus.
    pub c1: f64,
    /// `max F*` over the annulus.
    pub c2: f64,
    /// `max |dF*²|` over the annulus.
    pub c3: f64,
    /// `max F*` on the dual unit sphere.
    pub l1: f64,
    /// Modulus used in `4/γ`.
    pub gamma: f64,
    /// Lipschitz constant of `u` on the annulus.
    pub k_u: f64,
    /// `C̃ = max |a|` over the annulus.
    pub c_tilde: f64,
    /// `Ĉ = max |c_ij^k|`.
    pub c_hat: f64,
    pub r_m: f64,
    pub dim: usize,
    /// Lipschitz constant of the coadjoint field on the annulus.
    pub k_e: f64,
}

/// Extremes of `F*`, `F*·|u|` over the dual unit sphere.
fn dual_sphere_extrema(norm: &NormModel, samples: usize) -> Result<(f64, f64, f64)> {
    let mut fmin = f64::INFINITY;
    let mut fmax: f64 = 0.0;
    let mut gmax: f64 = 0.0;
    for beta in sphere::cover(norm.dim(), samples) {
        let de = dual_norm(norm, &beta)?;
        fmin = fmin.min(de.fstar);
        fmax = fmax.max(de.fstar);
        gmax = gmax.max(de.fstar * vecops::norm(&de.maximizer));
    }
    Ok((fmin, fmax, gmax))
}

/// Budget constants by sampling the dual unit sphere and scaling by homogeneity.
pub fn lipschitz_budget(
    norm: &NormModel,
    r_m: f64,
    gamma: f64,
    annulus: DualAnnulus,
    c_hat: f64,
    samples: usize,
) -> Result<LipschitzBudget> {
    if !(gamma > 0.0 && r_m > 0.0) {
        return Err(Error::Parameter("budget needs positive gamma and r_m".into()));
    }
    let (fmin, fmax, gmax) = dual_sphere_extrema(norm, samples)?;
    let c1 = 1.0 / (annulus.inner * fmin);
    let c2 = annulus.outer * fmax;
    let c3 = 2.0 * annulus.outer * gmax;
    let l1 = fmax;
    let k_u = 0.5 * (c1 * c1 * c3 * l1 + c1 * c1 * c2 * 4.0 / gamma);
    let dim = norm.dim();
    let c_tilde = annulus.outer;
    let k_e = (c_tilde * k_u + 1.0 / r_m) * c_hat * (dim as f64).powi(3);
    Ok(LipschitzBudget { c1, c2, c3, l1, gamma, k_u, c_tilde, c_hat, r_m, dim, k_e })
}

impl LipschitzBudget {
    /// `𝒦₁ = 𝒦 + 1`, shared by `u` and every smoothed `u_ε`.
    pub fn k1(&self) -> f64 {
        self.k_u + 1.0
    }

    /// `𝒦̃ = (C̃ 𝒦₁ + R) Ĉ n³` with `R` bounding `|u|` and `|u_ε|`.
    pub fn shared_field_constant(&self, r_bound: f64) -> f64 {
        (self.c_tilde * self.k1() + r_bound) * self.c_hat * (self.dim as f64).powi(3)
    }
}

/// Largest observed `|f(α) - f(β)| / |α - β|` over the pairs, against `bound`.
pub fn ratio_check(
    name: &str,
    pairs: &[(Vec<f64>, Vec<f64>)],
    bound: f64,
    f: impl Fn(&[f64]) -> Result<Vec<f64>>,
) -> Result<CheckReport> {
    let mut rep = CheckReport::new(name);
    let mut worst: f64 = 0.0;
    for (a, b) in pairs {
        let d = vecops::dist(a, b);
        let ratio = if d == 0.0 { 0.0 } else { vecops::dist(&f(a)?, &f(b)?) / d };
        worst = worst.max(ratio);
        rep.record(bound * (1.0 + RATIO_TOL) - ratio);
    }
    rep.note(format!("bound {bound:.6e}"));
    Ok(rep.with_value(worst))
}

/// `|u(α) - u(β)| <= 𝒦 |α - β|` on sampled pairs of the annulus.
pub fn certify_u_lipschitz(
    norm: &NormModel,
    budget: &LipschitzBudget,
    annulus: DualAnnulus,
    pairs: usize,
    seed: u64,
) -> Result<CheckReport> {
    let sample = annulus.sample_pairs(norm.dim(), pairs, seed);
    ratio_check(
        &format!("u lipschitz for {}", norm.label()),
        &sample,
        budget.k_u,
        |a| Ok(dual_norm(norm, a)?.maximizer),
    )
}

/// `|dF*²(α) - dF*²(β)| <= (4/γ) |α - β|`.
pub fn certify_grad_lipschitz(
    norm: &NormModel,
    gamma: f64,
    annulus: DualAnnulus,
    pairs: usize,
    seed: u64,
) -> Result<CheckReport> {
    let sample = annulus.sample_pairs(norm.dim(), pairs, seed);
    ratio_check(&format!("dF*^2 lipschitz for {}", norm.label()), &sample, 4.0 / gamma, |a| {
        Ok(dual_norm(norm, a)?.grad_fstar2)
    })
}

/// `F(dF*²(α)) = 2 F*(α)` on random covectors.
pub fn check_gradient_identity(norm: &NormModel, samples: usize, seed: u64) -> Result<CheckReport> {
    let mut rep = CheckReport::new(format!("F(dF*^2) = 2F* for {}", norm.label()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let a = sphere::random_in_shell(&mut rng, norm.dim(), 0.1, 3.0);
        let de = dual_norm(norm, &a)?;
        let lhs = norm.eval(&de.grad_fstar2);
        rep.record(1e-9 * (1.0 + de.fstar) - (lhs - 2.0 * de.fstar).abs());
        rep.record(1e-10 - (norm.eval(&de.maximizer) - 1.0).abs());
    }
    Ok(rep)
}
