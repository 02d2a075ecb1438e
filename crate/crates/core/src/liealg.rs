//! Lie algebras given by structure constants in an orthonormal basis, the coadjoint field,
//! and matrix realizations of the corresponding groups with closed-form exponentials.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::vecops;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgebraName {
    Abelian2,
    Abelian3,
    /// `[e1, e2] = e1`
    AffR,
    /// `[e1, e2] = e3`
    Heisenberg3,
    /// `[e_i, e_j] = ε_ijk e_k`
    So3,
    Custom,
}

impl fmt::Display for AlgebraName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebraName::Abelian2 => "abelian2",
            AlgebraName::Abelian3 => "abelian3",
            AlgebraName::AffR => "aff_r",
            AlgebraName::Heisenberg3 => "heisenberg3",
            AlgebraName::So3 => "so3",
            AlgebraName::Custom => "custom",
        })
    }
}

impl FromStr for AlgebraName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "abelian2" => AlgebraName::Abelian2,
            "abelian3" => AlgebraName::Abelian3,
            "aff_r" => AlgebraName::AffR,
            "heisenberg3" => AlgebraName::Heisenberg3,
            "so3" => AlgebraName::So3,
            "custom" => AlgebraName::Custom,
            other => return Err(Error::Parameter(format!("unknown algebra '{other}'"))),
        })
    }
}

pub const JACOBI_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebraModel {
    name: AlgebraName,
    dim: usize,
    /// `c[(i*n + j)*n + k] = c_ij^k`
    c: Vec<f64>,
}

impl LieAlgebraModel {
    pub fn named(name: AlgebraName) -> Result<Self> {
        let (dim, entries): (usize, Vec<(usize, usize, usize, f64)>) = match name {
            AlgebraName::Abelian2 => (2, vec![]),
            AlgebraName::Abelian3 => (3, vec![]),
            AlgebraName::AffR => (2, vec![(0, 1, 0, 1.0)]),
            AlgebraName::Heisenberg3 => (3, vec![(0, 1, 2, 1.0)]),
            AlgebraName::So3 => (3, vec![(0, 1, 2, 1.0), (1, 2, 0, 1.0), (2, 0, 1, 1.0)]),
            AlgebraName::Custom => {
                return Err(Error::Parameter("custom algebras need explicit structure constants".into()))
            }
        };
        let mut c = vec![0.0; dim * dim * dim];
        for (i, j, k, v) in entries {
            c[(i * dim + j) * dim + k] = v;
            c[(j * dim + i) * dim + k] = -v;
        }
        Ok(Self { name, dim, c })
    }

    /// Structure constants supplied as `n³` values `c_ij^k` in `(i, j, k)` row-major order.
    pub fn custom(dim: usize, c: Vec<f64>) -> Result<Self> {
        if dim == 0 || c.len() != dim * dim * dim {
            return Err(Error::Parameter(format!("expected {} structure constants, got {}", dim * dim * dim, c.len())));
        }
        let alg = Self { name: AlgebraName::Custom, dim, c };
        let anti = alg.antisymmetry_residual();
        if anti > 0.0 {
            return Err(Error::Parameter(format!("structure constants not antisymmetric (residual {anti:e})")));
        }
        let jac = alg.jacobi_residual();
        if jac >= JACOBI_TOL {
            return Err(Error::Parameter(format!("Jacobi identity fails (residual {jac:e})")));
        }
        Ok(alg)
    }

    pub fn name(&self) -> AlgebraName {
        self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure_constants(&self) -> &[f64] {
        &self.c
    }

    /// `Ĉ = max |c_ij^k|`.
    pub fn c_hat(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|v| *v == 0.0)
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.structure_constant(i, j, k) + self.structure_constant(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Largest component of `[[e_i,e_j],e_l] + [[e_j,e_l],e_i] + [[e_l,e_i],e_j]`.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let e = |i: usize| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        };
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let a = self.bracket(&self.bracket(&e(i), &e(j)), &e(l));
                    let b = self.bracket(&self.bracket(&e(j), &e(l)), &e(i));
                    let c = self.bracket(&self.bracket(&e(l), &e(i)), &e(j));
                    for k in 0..n {
                        worst = worst.max((a[k] + b[k] + c[k]).abs());
                    }
                }
            }
        }
        worst
    }

    /// `[y, z] = y^i z^j c_ij^k e_k`.
    pub fn bracket(&self, y: &[f64], z: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if y[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = y[i] * z[j];
                if w == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.c[(i * n + j) * n + k];
                }
            }
        }
        out
    }

    /// Components of `v ↦ a([u, v])`: `(result)_k = a_m u^j c_jk^m`.
    pub fn coadjoint_field(&self, a: &[f64], u: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut out = vec![0.0; n];
        for j in 0..n {
            if u[j] == 0.0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                let base = (j * n + k) * n;
                let mut s = 0.0;
                for m in 0..n {
                    s += a[m] * self.c[base + m];
                }
                *o += u[j] * s;
            }
        }
        out
    }

    pub fn has_realization(&self) -> bool {
        self.name != AlgebraName::Custom
    }

    /// `exp(u)` in the matrix realization.
    pub fn exp(&self, u: &[f64]) -> Result<GroupElement> {
        let n = self.dim;
        let m = match self.name {
            AlgebraName::Abelian2 | AlgebraName::Abelian3 => {
                let d = n + 1;
                let mut m = identity(d);
                for k in 0..n {
                    m[k * d + n] = u[k];
                }
                m
            }
            AlgebraName::AffR => {
                // e1 = E12, e2 = -E11: u ↦ [[-u2, u1], [0, 0]].
                let a = -u[1];
                let phi1 = if a.abs() < 1e-8 { 1.0 + 0.5 * a + a * a / 6.0 } else { a.exp_m1() / a };
                vec![a.exp(), u[0] * phi1, 0.0, 1.0]
            }
            AlgebraName::Heisenberg3 => {
                vec![1.0, u[0], u[2] + 0.5 * u[0] * u[1], 0.0, 1.0, u[1], 0.0, 0.0, 1.0]
            }
            AlgebraName::So3 => rodrigues(u),
            AlgebraName::Custom => return Err(Error::NoRealization("custom structure constants".into())),
        };
        Ok(GroupElement { algebra: self.name, m })
    }

    pub fn identity(&self) -> Result<GroupElement> {
        self.exp(&vec![0.0; self.dim])
    }

    /// `g · exp(h u)`, the left-invariant Euler–Lie step.
    pub fn group_step(&self, g: &GroupElement, u: &[f64], h: f64) -> Result<GroupElement> {
        if h == 0.0 {
            return Err(Error::Parameter("group step needs h != 0".into()));
        }
        let next = g.mul(&self.exp(&vecops::scale(u, h))?);
        next.check()?;
        Ok(next)
    }

    /// Distance in the left-invariant metric making the basis orthonormal; exact for
    /// abelian, aff_r and so3. For heisenberg3 it is the exponential-coordinate gauge
    /// `|log(x⁻¹y)|`, which vanishes only on the diagonal but is not bounded by curve length.
    /// Whether `distance` is the length metric, so that `d(x(t), x(s)) <= R̃ |t - s|` applies.
    pub fn distance_is_length_metric(&self) -> bool {
        matches!(self.name, AlgebraName::Abelian2 | AlgebraName::Abelian3 | AlgebraName::AffR | AlgebraName::So3)
    }

    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<f64> {
        match self.name {
            AlgebraName::Abelian2 | AlgebraName::Abelian3 => Ok(vecops::dist(&x.coordinates(), &y.coordinates())),
            AlgebraName::AffR => {
                let (p, q) = (x.coordinates(), y.coordinates());
                let arg = ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)) / (2.0 * p[1] * q[1]);
                // acosh(1 + s) without cancellation
                Ok((arg + (arg * (arg + 2.0)).sqrt()).ln_1p())
            }
            AlgebraName::Heisenberg3 => {
                let r = x.inverse().mul(y);
                let (a, b, c) = (r.m[1], r.m[5], r.m[2]);
                Ok((a * a + b * b + (c - 0.5 * a * b).powi(2)).sqrt())
            }
            AlgebraName::So3 => {
                let r = x.inverse().mul(y);
                let m = &r.m;
                let s = 0.5 * ((m[7] - m[5]).powi(2) + (m[2] - m[6]).powi(2) + (m[3] - m[1]).powi(2)).sqrt();
                let c = 0.5 * (m[0] + m[4] + m[8] - 1.0);
                Ok(s.atan2(c))
            }
            AlgebraName::Custom => Err(Error::NoRealization("custom structure constants".into())),
        }
    }

    /// Group element from coordinates: translation vector (abelian), `(x¹, x²)` with `x² > 0` (aff_r),
    /// `(x, y, z)` (heisenberg3), rotation vector (so3).
    pub fn element(&self, coords: &[f64]) -> Result<GroupElement> {
        if coords.len() != self.dim {
            return Err(Error::Parameter(format!("expected {} group coordinates", self.dim)));
        }
        let g = match self.name {
            AlgebraName::AffR => GroupElement { algebra: self.name, m: vec![coords[1], coords[0], 0.0, 1.0] },
            AlgebraName::Heisenberg3 => GroupElement {
                algebra: self.name,
                m: vec![1.0, coords[0], coords[2], 0.0, 1.0, coords[1], 0.0, 0.0, 1.0],
            },
            _ => self.exp(coords)?,
        };
        g.check()?;
        Ok(g)
    }
}

fn identity(d: usize) -> Vec<f64> {
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    m
}

fn rodrigues(w: &[f64]) -> Vec<f64> {
    let th2 = vecops::dot(w, w);
    let th = th2.sqrt();
    let (a, b) = if th < 1e-6 {
        (1.0 - th2 / 6.0 + th2 * th2 / 120.0, 0.5 - th2 / 24.0 + th2 * th2 / 720.0)
    } else {
        (th.sin() / th, (1.0 - th.cos()) / th2)
    };
    let k = [0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0];
    let mut m = identity(3);
    for i in 0..3 {
        for j in 0..3 {
            let mut kk = 0.0;
            for l in 0..3 {
                kk += k[i * 3 + l] * k[l * 3 + j];
            }
            m[i * 3 + j] += a * k[i * 3 + j] + b * kk;
        }
    }
    m
}

/// A group element in its matrix realization (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    algebra: AlgebraName,
    m: Vec<f64>,
}

impl GroupElement {
    pub fn size(&self) -> usize {
        (self.m.len() as f64).sqrt().round() as usize
    }

    pub fn matrix(&self) -> &[f64] {
        &self.m
    }

    pub fn algebra(&self) -> AlgebraName {
        self.algebra
    }

    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        let d = self.size();
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for l in 0..d {
                let a = self.m[i * d + l];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.m[l * d + j];
                }
            }
        }
        GroupElement { algebra: self.algebra, m: out }
    }

    pub fn inverse(&self) -> GroupElement {
        let m = &self.m;
        let inv = match self.algebra {
            AlgebraName::Abelian2 | AlgebraName::Abelian3 => {
                let d = self.size();
                let mut out = m.clone();
                for k in 0..d - 1 {
                    out[k * d + d - 1] = -m[k * d + d - 1];
                }
                out
            }
            AlgebraName::AffR => vec![1.0 / m[0], -m[1] / m[0], 0.0, 1.0],
            AlgebraName::Heisenberg3 => {
                let (x, y, z) = (m[1], m[5], m[2]);
                vec![1.0, -x, x * y - z, 0.0, 1.0, -y, 0.0, 0.0, 1.0]
            }
            AlgebraName::So3 => vec![m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]],
            AlgebraName::Custom => m.clone(),
        };
        GroupElement { algebra: self.algebra, m: inv }
    }

    /// Coordinates inverse to `LieAlgebraModel::element` (rotation matrices are returned as their entries).
    pub fn coordinates(&self) -> Vec<f64> {
        let m = &self.m;
        match self.algebra {
            AlgebraName::Abelian2 | AlgebraName::Abelian3 => {
                let d = self.size();
                (0..d - 1).map(|k| m[k * d + d - 1]).collect()
            }
            AlgebraName::AffR => vec![m[1], m[0]],
            AlgebraName::Heisenberg3 => vec![m[1], m[5], m[2]],
            _ => m.clone(),
        }
    }

    /// Representation invariants of the realization.
    pub fn check(&self) -> Result<()> {
        let m = &self.m;
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration("non-finite group element".into()));
        }
        let ok = match self.algebra {
            AlgebraName::Abelian2 | AlgebraName::Abelian3 => {
                let d = self.size();
                (0..d).all(|i| (0..d - 1).all(|j| m[i * d + j] == if i == j { 1.0 } else { 0.0 }))
                    && m[d * d - 1] == 1.0
            }
            AlgebraName::AffR => m[0] > 0.0 && m[2] == 0.0 && m[3] == 1.0,
            AlgebraName::Heisenberg3 => {
                m[0] == 1.0 && m[4] == 1.0 && m[8] == 1.0 && m[3] == 0.0 && m[6] == 0.0 && m[7] == 0.0
            }
            AlgebraName::So3 => orthogonality_residual(m) < 1e-9 && det3(m) > 0.0,
            AlgebraName::Custom => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Integration(format!("{} representation invariant violated: {m:?}", self.algebra)))
        }
    }
}

pub fn orthogonality_residual(m: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let s: f64 = (0..3).map(|l| m[l * 3 + i] * m[l * 3 + j]).sum();
            worst = worst.max((s - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

pub fn det3(m: &[f64]) -> f64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn all() -> Vec<LieAlgebraModel> {
        [AlgebraName::Abelian2, AlgebraName::Abelian3, AlgebraName::AffR, AlgebraName::Heisenberg3, AlgebraName::So3]
            .into_iter()
            .map(|n| LieAlgebraModel::named(n).unwrap())
            .collect()
    }

    #[test]
    fn catalog_is_valid() {
        for alg in all() {
            assert_eq!(alg.antisymmetry_residual(), 0.0);
            assert!(alg.jacobi_residual() < JACOBI_TOL);
            LieAlgebraModel::custom(alg.dim(), alg.structure_constants().to_vec()).unwrap();
        }
    }

    #[test]
    fn custom_validation() {
        let mut c = vec![0.0; 8];
        c[2] = 1.0; // c_10^0 without its antisymmetric partner
        assert!(LieAlgebraModel::custom(2, c).is_err());
        assert!(LieAlgebraModel::custom(2, vec![0.0; 7]).is_err());
        // [e1,e2] = e2, [e2,e3] = e1 fails Jacobi on (e1, e2, e3)
        let mut c = vec![0.0; 27];
        let mut set = |i: usize, j: usize, k: usize, v: f64| {
            c[(i * 3 + j) * 3 + k] = v;
            c[(j * 3 + i) * 3 + k] = -v;
        };
        set(0, 1, 1, 1.0);
        set(1, 2, 0, 1.0);
        assert!(LieAlgebraModel::custom(3, c).is_err());
    }

    #[test]
    fn bracket_examples() {
        let ab = LieAlgebraModel::named(AlgebraName::Abelian2).unwrap();
        assert_eq!(ab.bracket(&[1.0, 2.0], &[3.0, -1.0]), vec![0.0, 0.0]);
        let h = LieAlgebraModel::named(AlgebraName::Heisenberg3).unwrap();
        assert_eq!(h.bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), vec![0.0, 0.0, 1.0]);
        let so = LieAlgebraModel::named(AlgebraName::So3).unwrap();
        assert_eq!(so.bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn coadjoint_examples() {
        let so = LieAlgebraModel::named(AlgebraName::So3).unwrap();
        assert_eq!(so.coadjoint_field(&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]), vec![0.0, 1.0, 0.0]);
        let aff = LieAlgebraModel::named(AlgebraName::AffR).unwrap();
        assert_eq!(aff.coadjoint_field(&[1.0, 0.0], &[0.0, 1.0]), vec![-1.0, 0.0]);
        let ab = LieAlgebraModel::named(AlgebraName::Abelian3).unwrap();
        assert_eq!(ab.coadjoint_field(&[1.0, 2.0, 3.0], &[0.3, 0.1, 0.2]), vec![0.0; 3]);
    }

    /// Matrix realization of an algebra element, differentiated from `exp` at 0.
    fn realize(alg: &LieAlgebraModel, u: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        let p = alg.exp(&vecops::scale(u, h)).unwrap();
        let m = alg.exp(&vecops::scale(u, -h)).unwrap();
        p.matrix().iter().zip(m.matrix()).map(|(a, b)| (a - b) / (2.0 * h)).collect()
    }

    #[test]
    fn realizations_are_homomorphisms() {
        for alg in all() {
            let n = alg.dim();
            let y: Vec<f64> = (0..n).map(|k| 0.3 + 0.2 * k as f64).collect();
            let z: Vec<f64> = (0..n).map(|k| -0.5 + 0.4 * k as f64).collect();
            let (ry, rz) = (realize(&alg, &y), realize(&alg, &z));
            let d = (ry.len() as f64).sqrt() as usize;
            let mut comm = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    for l in 0..d {
                        comm[i * d + j] += ry[i * d + l] * rz[l * d + j] - rz[i * d + l] * ry[l * d + j];
                    }
                }
            }
            let rb = realize(&alg, &alg.bracket(&y, &z));
            assert!(vecops::max_abs_diff(&comm, &rb) < 1e-8, "{}", alg.name());
        }
    }

    #[test]
    fn group_step_examples() {
        let ab = LieAlgebraModel::named(AlgebraName::Abelian2).unwrap();
        let g = ab.element(&[1.0, -2.0]).unwrap();
        let n = ab.group_step(&g, &[0.5, 0.25], 2.0).unwrap();
        assert_eq!(n.coordinates(), vec![2.0, -1.5]);

        // e2 = -E11, so the control (0, -1) scales x² by e.
        let aff = LieAlgebraModel::named(AlgebraName::AffR).unwrap();
        let n = aff.group_step(&aff.identity().unwrap(), &[0.0, -1.0], 1.0).unwrap();
        assert_relative_eq!(n.coordinates()[1], std::f64::consts::E, epsilon = 1e-15);
        assert_eq!(n.coordinates()[0], 0.0);

        let so = LieAlgebraModel::named(AlgebraName::So3).unwrap();
        let mut g = so.identity().unwrap();
        for _ in 0..1000 {
            g = so.group_step(&g, &[0.3, -1.1, 0.7], 0.01).unwrap();
        }
        assert!(orthogonality_residual(g.matrix()) < 1e-10);
        assert!((det3(g.matrix()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn aff_r_group_law() {
        let aff = LieAlgebraModel::named(AlgebraName::AffR).unwrap();
        let x = aff.element(&[0.5, 2.0]).unwrap();
        let z = aff.element(&[-1.0, 0.25]).unwrap();
        // (x¹, x²)·(z¹, z²) = (x² z¹ + x¹, x² z²)
        assert_eq!(x.mul(&z).coordinates(), vec![-2.0 + 0.5, 0.5]);
        assert!(aff.element(&[0.0, -1.0]).is_err());
    }

    #[test]
    fn distances_of_one_parameter_subgroups() {
        // |t u| for small t along a one-parameter subgroup from the identity.
        for alg in all() {
            let n = alg.dim();
            let u: Vec<f64> = (0..n).map(|k| 0.4 - 0.3 * k as f64).collect();
            let t = 0.3;
            let e = alg.identity().unwrap();
            let g = alg.exp(&vecops::scale(&u, t)).unwrap();
            let d = alg.distance(&e, &g).unwrap();
            if matches!(alg.name(), AlgebraName::AffR) {
                assert!(d <= t * vecops::norm(&u) + 1e-12);
            } else {
                assert_relative_eq!(d, t * vecops::norm(&u), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn hyperbolic_distance_examples() {
        let aff = LieAlgebraModel::named(AlgebraName::AffR).unwrap();
        let a = aff.element(&[0.0, 1.0]).unwrap();
        let b = aff.element(&[0.0, std::f64::consts::E]).unwrap();
        assert_relative_eq!(aff.distance(&a, &b).unwrap(), 1.0, epsilon = 1e-14);
        // left-invariance
        let g = aff.element(&[3.0, 0.2]).unwrap();
        assert_relative_eq!(aff.distance(&g.mul(&a), &g.mul(&b)).unwrap(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn custom_has_no_group() {
        let c = LieAlgebraModel::named(AlgebraName::So3).unwrap().structure_constants().to_vec();
        let custom = LieAlgebraModel::custom(3, c).unwrap();
        assert!(matches!(custom.identity(), Err(Error::NoRealization(_))));
    }

    proptest! {
        #[test]
        fn pairing_consistency(a in proptest::collection::vec(-3.0f64..3.0, 3),
                               u in proptest::collection::vec(-3.0f64..3.0, 3),
                               v in proptest::collection::vec(-3.0f64..3.0, 3)) {
            for name in [AlgebraName::Heisenberg3, AlgebraName::So3, AlgebraName::Abelian3] {
                let alg = LieAlgebraModel::named(name).unwrap();
                let lhs = vecops::dot(&alg.coadjoint_field(&a, &u), &v);
                let rhs = vecops::dot(&a, &alg.bracket(&u, &v));
                prop_assert!((lhs - rhs).abs() < 1e-12);
            }
            let aff = LieAlgebraModel::named(AlgebraName::AffR).unwrap();
            let lhs = vecops::dot(&aff.coadjoint_field(&a[..2], &u[..2]), &v[..2]);
            let rhs = vecops::dot(&a[..2], &aff.bracket(&u[..2], &v[..2]));
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn bracket_antisymmetric(y in proptest::collection::vec(-2.0f64..2.0, 3),
                                 z in proptest::collection::vec(-2.0f64..2.0, 3)) {
            let alg = LieAlgebraModel::named(AlgebraName::So3).unwrap();
            let a = alg.bracket(&y, &z);
            let b = alg.bracket(&z, &y);
            prop_assert!(a.iter().zip(&b).all(|(p, q)| (p + q).abs() < 1e-14));
        }
    }
}
