//! Gauss–Legendre rules and polar product rules on the unit ball.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights of the Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre(order: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order must be positive"));
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (mid + half * x, half * w)).collect()
}

/// Polar product rule orders on the unit ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BallOrders {
    pub radial: usize,
    /// Angles per circle in the plane, or azimuth count in space.
    pub azimuthal: usize,
    /// Gauss–Legendre nodes in cos(colatitude); ignored in the plane.
    pub polar: usize,
}

impl BallOrders {
    pub fn default_for(dim: usize) -> Self {
        match dim {
            2 => Self { radial: 32, azimuthal: 48, polar: 0 },
            _ => Self { radial: 32, azimuthal: 24, polar: 12 },
        }
    }
}

/// Points of the unit ball with the volume weights of a polar product rule.
/// Radial direction is Gauss–Legendre; the periodic azimuth uses the trapezoid rule.
#[derive(Debug, Clone)]
pub struct BallRule {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn new(dim: usize, orders: BallOrders) -> Self {
        let radial = gauss_legendre(orders.radial, 0.0, 1.0);
        let m = orders.azimuthal;
        let dpsi = 2.0 * PI / m as f64;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        match dim {
            2 => {
                for &(r, wr) in &radial {
                    for k in 0..m {
                        let psi = (k as f64 + 0.5) * dpsi;
                        points.push(vec![r * psi.cos(), r * psi.sin()]);
                        weights.push(wr * r * dpsi);
                    }
                }
            }
            3 => {
                let polar = gauss_legendre(orders.polar, -1.0, 1.0);
                for &(r, wr) in &radial {
                    for &(c, wc) in &polar {
                        let s = (1.0 - c * c).sqrt();
                        for k in 0..m {
                            let psi = (k as f64 + 0.5) * dpsi;
                            points.push(vec![r * s * psi.cos(), r * s * psi.sin(), r * c]);
                            weights.push(wr * r * r * wc * dpsi);
                        }
                    }
                }
            }
            n => panic!("unsupported dimension {n}"),
        }
        Self { dim, points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Surface area of the unit sphere in ℝⁿ.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        n => panic!("unsupported dimension {n}"),
    }
}
