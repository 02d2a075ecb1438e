//! Positively homogeneous functions described by a radial profile on the sphere:
//! `F(y) = |y| * level / phi(direction of y)`, with `phi` interpolated by periodic splines.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sphere::{self, TWO_PI};
use crate::spline::{PeriodicSpline, PeriodicSpline2};
use crate::vecops;

#[derive(Debug, Clone)]
enum Interp {
    Circle(PeriodicSpline),
    /// Double-covered colatitude in `[0, 2π)` so that the grid is periodic in both angles.
    Sphere {
        spline: PeriodicSpline2,
    },
}

#[derive(Debug, Clone)]
pub struct RadialProfile {
    dim: usize,
    level: f64,
    grid: ProfileGrid,
    nodes: Vec<f64>,
    interp: Interp,
}

/// Node layout of a radial profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileGrid {
    /// `count` equispaced angles starting at 0.
    Circle { count: usize },
    /// Colatitude cell centers `(i + 1/2) π / colat` times azimuths `2π j / azimuth`.
    Sphere { colat: usize, azimuth: usize },
}

impl ProfileGrid {
    pub fn default_for(dim: usize) -> Self {
        match dim {
            2 => ProfileGrid::Circle { count: 4096 },
            _ => ProfileGrid::Sphere { colat: 64, azimuth: 128 },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ProfileGrid::Circle { .. } => 2,
            ProfileGrid::Sphere { .. } => 3,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            ProfileGrid::Circle { count } => count,
            ProfileGrid::Sphere { colat, azimuth } => colat * azimuth,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Angles of every node, in storage order.
    pub fn node_angles(&self) -> Vec<Vec<f64>> {
        match *self {
            ProfileGrid::Circle { count } => (0..count).map(|k| vec![TWO_PI * k as f64 / count as f64]).collect(),
            ProfileGrid::Sphere { colat, azimuth } => {
                let mut out = Vec::with_capacity(colat * azimuth);
                for i in 0..colat {
                    for j in 0..azimuth {
                        out.push(vec![(i as f64 + 0.5) * PI / colat as f64, TWO_PI * j as f64 / azimuth as f64]);
                    }
                }
                out
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ProfileGrid::Circle { count } if count >= 8 => Ok(()),
            ProfileGrid::Sphere { colat, azimuth } if colat >= 4 && azimuth >= 8 && azimuth % 2 == 0 => Ok(()),
            g => Err(Error::Parameter(format!("profile grid too coarse or azimuth count odd: {g:?}"))),
        }
    }
}

impl RadialProfile {
    /// `nodes` holds `phi` at the grid nodes in `grid.node_angles()` order; every value must be positive.
    pub fn new(grid: ProfileGrid, nodes: Vec<f64>, level: f64) -> Result<Self> {
        grid.validate()?;
        if nodes.len() != grid.len() {
            return Err(Error::Parameter(format!(
                "profile has {} values but the grid has {} nodes",
                nodes.len(),
                grid.len()
            )));
        }
        if nodes.iter().any(|v| !(v.is_finite() && *v > 0.0)) || !(level > 0.0) {
            return Err(Error::Parameter("profile radii and level must be positive".into()));
        }
        let interp = match grid {
            ProfileGrid::Circle { .. } => Interp::Circle(PeriodicSpline::new(0.0, TWO_PI, nodes.clone())),
            ProfileGrid::Sphere { colat, azimuth } => {
                // Rows i >= colat continue past the south pole: phi(2π - ϑ, ψ) = phi(ϑ, ψ + π).
                let nx = 2 * colat;
                let half = azimuth / 2;
                let mut ext = vec![0.0; nx * azimuth];
                for i in 0..nx {
                    for j in 0..azimuth {
                        ext[i * azimuth + j] = if i < colat {
                            nodes[i * azimuth + j]
                        } else {
                            nodes[(nx - 1 - i) * azimuth + (j + half) % azimuth]
                        };
                    }
                }
                let origin = [0.5 * PI / colat as f64, 0.0];
                Interp::Sphere { spline: PeriodicSpline2::new(origin, [TWO_PI, TWO_PI], nx, azimuth, ext) }
            }
        };
        Ok(Self { dim: grid.dim(), level, grid, nodes, interp })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn grid(&self) -> ProfileGrid {
        self.grid
    }

    pub fn node_values(&self) -> &[f64] {
        &self.nodes
    }

    /// Interpolated radius `phi` in the direction of `y`.
    pub fn radius(&self, y: &[f64]) -> f64 {
        let ang = sphere::angles(y);
        match &self.interp {
            Interp::Circle(s) => s.eval(ang[0]),
            Interp::Sphere { spline } => spline.eval(ang[0], ang[1]),
        }
    }

    pub fn eval(&self, y: &[f64]) -> f64 {
        let r = vecops::norm(y);
        if r == 0.0 {
            return 0.0;
        }
        r * self.level / self.radius(y)
    }

    /// Exact gradient in the plane; `None` on the sphere where callers difference instead.
    pub fn gradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        match &self.interp {
            Interp::Circle(s) => {
                let r = vecops::norm(y);
                let theta = y[1].atan2(y[0]);
                let (phi, dphi) = s.eval_with_derivative(theta.rem_euclid(TWO_PI));
                let radial = self.level / phi;
                let angular = -self.level * dphi / (phi * phi);
                let (c, sn) = (y[0] / r, y[1] / r);
                Some(vec![radial * c - angular * sn, radial * sn + angular * c])
            }
            Interp::Sphere { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_profile_is_scaled_euclidean() {
        let grid = ProfileGrid::Sphere { colat: 8, azimuth: 16 };
        let p = RadialProfile::new(grid, vec![0.5; grid.len()], 2.0).unwrap();
        for y in [[0.3, 0.4, 1.2], [0.0, 0.0, 1.0], [0.0, 0.0, -2.0], [-1.0, 0.2, -0.1]] {
            assert!((p.eval(&y) - 4.0 * vecops::norm(&y)).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_profile_smooth_through_poles() {
        // phi = 1 + 0.2 z + 0.1 x, a smooth function on the sphere.
        let grid = ProfileGrid::Sphere { colat: 24, azimuth: 48 };
        let vals: Vec<f64> = grid
            .node_angles()
            .iter()
            .map(|a| {
                let d = sphere::direction(a);
                1.0 + 0.2 * d[2] + 0.1 * d[0]
            })
            .collect();
        let p = RadialProfile::new(grid, vals, 1.0).unwrap();
        for y in [[0.01, 0.0, 1.0], [0.0, 0.001, -1.0], [0.5, -0.3, 0.2], [-0.7, 0.7, 0.1]] {
            let d = vecops::normalized(&y);
            let exact = 1.0 + 0.2 * d[2] + 0.1 * d[0];
            assert!((p.radius(&y) - exact).abs() < 1e-5, "{y:?}");
        }
    }

    #[test]
    fn planar_gradient_matches_differences() {
        let grid = ProfileGrid::Circle { count: 256 };
        let vals: Vec<f64> = grid.node_angles().iter().map(|a| 1.0 / (1.0 + 0.4 * a[0].cos())).collect();
        let p = RadialProfile::new(grid, vals, 1.0).unwrap();
        let y = [0.3, -0.8];
        let g = p.gradient(&y).unwrap();
        let h = 1e-6;
        for k in 0..2 {
            let mut yp = y;
            let mut ym = y;
            yp[k] += h;
            ym[k] -= h;
            let fd = (p.eval(&yp) - p.eval(&ym)) / (2.0 * h);
            assert!((fd - g[k]).abs() < 1e-7);
        }
    }
}
