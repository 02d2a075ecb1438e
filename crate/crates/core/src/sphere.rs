//! Angular parameterizations and deterministic covers of the unit sphere in ℝ² and ℝ³.

use std::f64::consts::PI;

use rand::{Rng, RngExt};

use crate::vecops;

pub const TWO_PI: f64 = 2.0 * PI;

/// Unit vector at angle `theta` in the plane.
pub fn direction2(theta: f64) -> [f64; 2] {
    [theta.cos(), theta.sin()]
}

/// Unit vector at colatitude `vartheta` and azimuth `psi`.
pub fn direction3(vartheta: f64, psi: f64) -> [f64; 3] {
    let s = vartheta.sin();
    [s * psi.cos(), s * psi.sin(), vartheta.cos()]
}

/// Angles of a nonzero vector: `[theta]` in `[0, 2π)` for n = 2,
/// `[colatitude, azimuth]` for n = 3.
pub fn angles(y: &[f64]) -> Vec<f64> {
    match y.len() {
        2 => vec![y[1].atan2(y[0]).rem_euclid(TWO_PI)],
        3 => {
            let rho = (y[0] * y[0] + y[1] * y[1]).sqrt();
            vec![rho.atan2(y[2]), y[1].atan2(y[0]).rem_euclid(TWO_PI)]
        }
        n => panic!("unsupported dimension {n}"),
    }
}

pub fn direction(angles: &[f64]) -> Vec<f64> {
    match angles.len() {
        1 => direction2(angles[0]).to_vec(),
        2 => direction3(angles[0], angles[1]).to_vec(),
        n => panic!("unsupported angle count {n}"),
    }
}

/// Deterministic quasi-uniform cover: equispaced angles for n = 2,
/// a golden-angle spiral for n = 3.
pub fn cover(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        2 => (0..count).map(|k| direction2(TWO_PI * k as f64 / count as f64).to_vec()).collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|k| {
                    let z = 1.0 - (2.0 * k as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let psi = golden * k as f64;
                    vec![r * psi.cos(), r * psi.sin(), z]
                })
                .collect()
        }
        n => panic!("unsupported dimension {n}"),
    }
}

/// Orthonormal basis of the tangent space of the sphere at unit `d`.
pub fn tangent_basis(d: &[f64]) -> Vec<Vec<f64>> {
    match d.len() {
        2 => vec![vec![-d[1], d[0]]],
        3 => {
            let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
            let e1 = vecops::normalized(&vecops::cross(d, &helper));
            let e2 = vecops::cross(d, &e1).to_vec();
            vec![e1, e2]
        }
        n => panic!("unsupported dimension {n}"),
    }
}

/// Point on the sphere reached from `d` along tangent coordinates `s`.
pub fn chart(d: &[f64], basis: &[Vec<f64>], s: &[f64]) -> Vec<f64> {
    let mut y = d.to_vec();
    for (e, si) in basis.iter().zip(s) {
        for (yk, ek) in y.iter_mut().zip(e) {
            *yk += si * ek;
        }
    }
    vecops::normalized(&y)
}

pub fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = vecops::norm(&v);
        if r > 1e-3 && r <= 1.0 {
            return vecops::scale(&v, 1.0 / r);
        }
    }
}

/// Uniform sample of the ball of radius `radius` centered at `center`.
pub fn random_in_ball<R: Rng>(rng: &mut R, center: &[f64], radius: f64) -> Vec<f64> {
    let dim = center.len();
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if vecops::norm(&v) <= 1.0 {
            return vecops::axpy(center, radius, &v);
        }
    }
}

/// Sample of the shell `inner <= |y| <= outer`, uniform in direction and radius.
pub fn random_in_shell<R: Rng>(rng: &mut R, dim: usize, inner: f64, outer: f64) -> Vec<f64> {
    let d = random_unit(rng, dim);
    let r = if outer > inner { rng.random_range(inner..outer) } else { inner };
    vecops::scale(&d, r)
}
