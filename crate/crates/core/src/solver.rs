//! Symmetric grid-graph Laplacian systems and their solvers.
//!
//! Unknowns live on the cells of a rectangular `nx × ny` index space. Each
//! active cell couples to its east and north neighbors with a non-negative
//! conductance; couplings to fixed (Dirichlet) values are folded into the
//! diagonal and the right-hand side. The border ring of cells is always
//! inactive, so neighbor indexing never leaves the arrays.
//!
//! The iterative solver is conjugate gradients preconditioned by the modified
//! incomplete Cholesky factorization MIC(0) in natural row-major order. The
//! stopping rule is on the scaled residual `max_i |r_i| / a_ii`, which for the
//! lattice Laplacian is exactly the defect of the discrete mean-value property.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default bound on the scaled residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

const MIC_RELAXATION: f64 = 0.97;

#[derive(Clone, Debug)]
pub struct GridSystem {
    nx: usize,
    ny: usize,
    active: Vec<bool>,
    diag: Vec<f64>,
    east: Vec<f64>,
    north: Vec<f64>,
    rhs: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    /// Values on active cells, zero elsewhere.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub scaled_residual: f64,
}

impl GridSystem {
    /// An empty system; all cells inactive.
    pub fn new(nx: usize, ny: usize) -> Self {
        let n = nx * ny;
        GridSystem {
            nx,
            ny,
            active: vec![false; n],
            diag: vec![0.0; n],
            east: vec![0.0; n],
            north: vec![0.0; n],
            rhs: vec![0.0; n],
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn set_active(&mut self, idx: usize) {
        let (i, j) = (idx % self.nx, idx / self.nx);
        assert!(
            i > 0 && j > 0 && i + 1 < self.nx && j + 1 < self.ny,
            "border cells must stay inactive"
        );
        self.active[idx] = true;
    }

    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    /// Conductance between two active cells `idx` and `idx + 1`.
    pub fn couple_east(&mut self, idx: usize, c: f64) {
        debug_assert!(self.active[idx] && self.active[idx + 1]);
        self.east[idx] += c;
        self.diag[idx] += c;
        self.diag[idx + 1] += c;
    }

    /// Conductance between two active cells `idx` and `idx + nx`.
    pub fn couple_north(&mut self, idx: usize, c: f64) {
        debug_assert!(self.active[idx] && self.active[idx + self.nx]);
        self.north[idx] += c;
        self.diag[idx] += c;
        self.diag[idx + self.nx] += c;
    }

    /// Conductance from active cell `idx` to a node held at `value`.
    pub fn couple_fixed(&mut self, idx: usize, c: f64, value: f64) {
        debug_assert!(self.active[idx]);
        self.diag[idx] += c;
        self.rhs[idx] += c * value;
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `y = A x` on active cells.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let nx = self.nx;
        for idx in 0..x.len() {
            if !self.active[idx] {
                y[idx] = 0.0;
                continue;
            }
            y[idx] = self.diag[idx] * x[idx]
                - self.east[idx] * x[idx + 1]
                - self.east[idx - 1] * x[idx - 1]
                - self.north[idx] * x[idx + nx]
                - self.north[idx - nx] * x[idx - nx];
        }
    }

    /// `max_i |b_i − (A x)_i| / a_ii` over active cells.
    pub fn scaled_residual(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; x.len()];
        self.apply(x, &mut ax);
        self.scaled_norm(&self.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect::<Vec<_>>())
    }

    fn scaled_norm(&self, r: &[f64]) -> f64 {
        let mut m = 0.0f64;
        for idx in 0..r.len() {
            if self.active[idx] {
                m = m.max(r[idx].abs() / self.diag[idx]);
            }
        }
        m
    }

    fn check_definite(&self) -> Result<()> {
        if let Some(idx) = (0..self.diag.len()).find(|&i| self.active[i] && self.diag[i] <= 0.0) {
            return Err(Error::Numeric(format!("cell {idx} has no conductance")));
        }
        Ok(())
    }

    fn mic_diagonal(&self) -> Vec<f64> {
        let nx = self.nx;
        let mut d = vec![0.0; self.diag.len()];
        for idx in 0..d.len() {
            if !self.active[idx] {
                continue;
            }
            let (w, s) = (idx - 1, idx - nx);
            let ew = self.east[w];
            let ns = self.north[s];
            let mut di = self.diag[idx];
            let mut ic = self.diag[idx];
            if ew != 0.0 {
                di -= ew * (ew + MIC_RELAXATION * self.north[w]) / d[w];
                ic -= ew * ew / d[w];
            }
            if ns != 0.0 {
                di -= ns * (ns + MIC_RELAXATION * self.east[s]) / d[s];
                ic -= ns * ns / d[s];
            }
            // Plain IC(0) when the modified pivot degenerates.
            d[idx] = if di > 1e-3 * self.diag[idx] { di } else { ic };
        }
        d
    }

    fn precondition(&self, d: &[f64], r: &[f64], z: &mut [f64]) {
        let nx = self.nx;
        let n = r.len();
        for idx in 0..n {
            z[idx] = if self.active[idx] {
                (r[idx] + self.east[idx - 1] * z[idx - 1] + self.north[idx - nx] * z[idx - nx]) / d[idx]
            } else {
                0.0
            };
        }
        for idx in (0..n).rev() {
            if self.active[idx] {
                z[idx] += (self.east[idx] * z[idx + 1] + self.north[idx] * z[idx + nx]) / d[idx];
            }
        }
    }

    /// Preconditioned conjugate gradients from a zero initial guess.
    pub fn solve(&self, tolerance: f64) -> Result<Solution> {
        self.check_definite()?;
        let n = self.diag.len();
        let active = self.active_count();
        let mut x = vec![0.0; n];
        if active == 0 {
            return Ok(Solution { values: x, iterations: 0, scaled_residual: 0.0 });
        }
        let d = self.mic_diagonal();
        let max_iter = 50 + 20 * ((active as f64).sqrt() as usize);
        let mut r = self.rhs.clone();
        for idx in 0..n {
            if !self.active[idx] {
                r[idx] = 0.0;
            }
        }
        let mut z = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        let mut iterations = 0;
        // Outer loop restarts from the true residual if recursion drifted.
        for _restart in 0..4 {
            self.precondition(&d, &r, &mut z);
            p.copy_from_slice(&z);
            let mut rz: f64 = dot(&r, &z);
            while iterations < max_iter {
                if self.scaled_norm(&r) <= 0.25 * tolerance || rz == 0.0 {
                    break;
                }
                self.apply(&p, &mut q);
                let pq = dot(&p, &q);
                if pq <= 0.0 {
                    return Err(Error::Numeric("operator is not positive definite".into()));
                }
                let alpha = rz / pq;
                for i in 0..n {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * q[i];
                }
                self.precondition(&d, &r, &mut z);
                let rz_new = dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                for i in 0..n {
                    p[i] = z[i] + beta * p[i];
                }
                iterations += 1;
            }
            let mut ax = vec![0.0; n];
            self.apply(&x, &mut ax);
            for i in 0..n {
                r[i] = if self.active[i] { self.rhs[i] - ax[i] } else { 0.0 };
            }
            let res = self.scaled_norm(&r);
            if res <= tolerance {
                return Ok(Solution { values: x, iterations, scaled_residual: res });
            }
            if iterations >= max_iter {
                return Err(Error::Numeric(format!(
                    "conjugate gradients stalled at scaled residual {res:.3e} after {iterations} iterations"
                )));
            }
        }
        let res = self.scaled_residual(&x);
        Err(Error::Numeric(format!("no convergence, scaled residual {res:.3e}")))
    }

    /// Direct dense solve; intended for small systems and cross-checks.
    pub fn solve_dense(&self) -> Result<Solution> {
        self.check_definite()?;
        let cells: Vec<usize> = (0..self.diag.len()).filter(|&i| self.active[i]).collect();
        let m = cells.len();
        if m > 4000 {
            return Err(Error::Refused(format!("dense solve of {m} unknowns")));
        }
        if m == 0 {
            return Ok(Solution { values: vec![0.0; self.diag.len()], iterations: 0, scaled_residual: 0.0 });
        }
        let mut pos = vec![usize::MAX; self.diag.len()];
        for (k, &c) in cells.iter().enumerate() {
            pos[c] = k;
        }
        let mut a = DMatrix::<f64>::zeros(m, m);
        let mut b = DVector::<f64>::zeros(m);
        for (k, &c) in cells.iter().enumerate() {
            a[(k, k)] = self.diag[c];
            b[k] = self.rhs[c];
            for (nb, w) in [(c + 1, self.east[c]), (c + self.nx, self.north[c])] {
                if w != 0.0 {
                    let l = pos[nb];
                    a[(k, l)] -= w;
                    a[(l, k)] -= w;
                }
            }
        }
        let sol = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::Numeric("singular dense system".into()))?;
        let mut values = vec![0.0; self.diag.len()];
        for (k, &c) in cells.iter().enumerate() {
            values[c] = sol[k];
        }
        let scaled_residual = self.scaled_residual(&values);
        Ok(Solution { values, iterations: 0, scaled_residual })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
