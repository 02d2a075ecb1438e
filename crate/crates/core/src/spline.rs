//! Periodic cubic splines on uniform grids, in one and two variables.

/// Solves the cyclic system `M[k-1] + 4 M[k] + M[k+1] = rhs[k]`.
fn solve_cyclic_141(rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    if n == 1 {
        return vec![rhs[0] / 6.0];
    }
    if n == 2 {
        // M0*4 + 2*M1 = r0, 2*M0 + 4*M1 = r1
        let det = 12.0;
        return vec![(4.0 * rhs[0] - 2.0 * rhs[1]) / det, (4.0 * rhs[1] - 2.0 * rhs[0]) / det];
    }
    // Sherman-Morrison around the tridiagonal part.
    let gamma = -4.0;
    let mut diag = vec![4.0; n];
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    let x = thomas(&diag, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = 1.0;
    let z = thomas(&diag, &u);
    let fact = (x[0] + x[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

/// Tridiagonal solve with unit off-diagonals.
fn thomas(diag: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = 1.0 / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - c[i - 1];
        c[i] = 1.0 / m;
        d[i] = (rhs[i] - d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Periodic cubic interpolant of samples at `origin + k*h`, period `n*h`.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    origin: f64,
    h: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(origin: f64, period: f64, values: Vec<f64>) -> Self {
        let n = values.len();
        assert!(n >= 3, "periodic spline needs at least three nodes");
        let h = period / n as f64;
        let rhs: Vec<f64> = (0..n)
            .map(|k| {
                let prev = values[(k + n - 1) % n];
                let next = values[(k + 1) % n];
                6.0 * (next - 2.0 * values[k] + prev) / (h * h)
            })
            .collect();
        let second = solve_cyclic_141(&rhs);
        Self { origin, h, values, second }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.values.len();
        let s = (x - self.origin) / self.h;
        let k = s.floor();
        let t = s - k;
        ((k as i64).rem_euclid(n as i64) as usize, t)
    }

    /// Value and first derivative.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let n = self.values.len();
        let (k, t) = self.locate(x);
        let k1 = (k + 1) % n;
        let (f0, f1) = (self.values[k], self.values[k1]);
        let (m0, m1) = (self.second[k], self.second[k1]);
        let h = self.h;
        let a = 1.0 - t;
        let value = m0 * a * a * a * h * h / 6.0
            + m1 * t * t * t * h * h / 6.0
            + (f0 - m0 * h * h / 6.0) * a
            + (f1 - m1 * h * h / 6.0) * t;
        let slope = -m0 * a * a * h / 2.0 + m1 * t * t * h / 2.0 + (f1 - f0) / h - (m1 - m0) * h / 6.0;
        (value, slope)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    /// First derivatives at the nodes.
    pub fn node_slopes(&self) -> Vec<f64> {
        let n = self.values.len();
        let h = self.h;
        (0..n)
            .map(|k| {
                let k1 = (k + 1) % n;
                (self.values[k1] - self.values[k]) / h - h * (2.0 * self.second[k] + self.second[k1]) / 6.0
            })
            .collect()
    }
}

/// Tensor-product periodic cubic spline on a uniform grid, stored as bicubic
/// Hermite data (value, two first derivatives, mixed derivative) per node.
#[derive(Debug, Clone)]
pub struct PeriodicSpline2 {
    origin: [f64; 2],
    h: [f64; 2],
    nx: usize,
    ny: usize,
    f: Vec<f64>,
    fx: Vec<f64>,
    fy: Vec<f64>,
    fxy: Vec<f64>,
}

impl PeriodicSpline2 {
    /// `values[i * ny + j]` is the sample at `(origin[0] + i*hx, origin[1] + j*hy)`.
    pub fn new(origin: [f64; 2], period: [f64; 2], nx: usize, ny: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), nx * ny);
        let h = [period[0] / nx as f64, period[1] / ny as f64];
        let mut fx = vec![0.0; nx * ny];
        let mut fy = vec![0.0; nx * ny];
        let mut fxy = vec![0.0; nx * ny];
        for j in 0..ny {
            let col: Vec<f64> = (0..nx).map(|i| values[i * ny + j]).collect();
            let s = PeriodicSpline::new(origin[0], period[0], col).node_slopes();
            for i in 0..nx {
                fx[i * ny + j] = s[i];
            }
        }
        for i in 0..nx {
            let row = values[i * ny..(i + 1) * ny].to_vec();
            let s = PeriodicSpline::new(origin[1], period[1], row).node_slopes();
            fy[i * ny..(i + 1) * ny].copy_from_slice(&s);
            let row_x = fx[i * ny..(i + 1) * ny].to_vec();
            let sx = PeriodicSpline::new(origin[1], period[1], row_x).node_slopes();
            fxy[i * ny..(i + 1) * ny].copy_from_slice(&sx);
        }
        Self { origin, h, nx, ny, f: values, fx, fy, fxy }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let sx = (x - self.origin[0]) / self.h[0];
        let sy = (y - self.origin[1]) / self.h[1];
        let (kx, ky) = (sx.floor(), sy.floor());
        let (tx, ty) = (sx - kx, sy - ky);
        let i0 = (kx as i64).rem_euclid(self.nx as i64) as usize;
        let j0 = (ky as i64).rem_euclid(self.ny as i64) as usize;
        let i1 = (i0 + 1) % self.nx;
        let j1 = (j0 + 1) % self.ny;
        let hx = hermite(tx);
        let hy = hermite(ty);
        let mut acc = 0.0;
        for (ci, ii) in [(0usize, i0), (1, i1)] {
            for (cj, jj) in [(0usize, j0), (1, j1)] {
                let idx = ii * self.ny + jj;
                acc += self.f[idx] * hx.value[ci] * hy.value[cj]
                    + self.h[0] * self.fx[idx] * hx.slope[ci] * hy.value[cj]
                    + self.h[1] * self.fy[idx] * hx.value[ci] * hy.slope[cj]
                    + self.h[0] * self.h[1] * self.fxy[idx] * hx.slope[ci] * hy.slope[cj];
            }
        }
        acc
    }
}

struct HermiteBasis {
    value: [f64; 2],
    slope: [f64; 2],
}

fn hermite(t: f64) -> HermiteBasis {
    let t2 = t * t;
    let t3 = t2 * t;
    HermiteBasis { value: [2.0 * t3 - 3.0 * t2 + 1.0, -2.0 * t3 + 3.0 * t2], slope: [t3 - 2.0 * t2 + t, t3 - t2] }
}
