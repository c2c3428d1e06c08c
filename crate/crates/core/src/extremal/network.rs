//! Weighted resistor networks with two terminals and their potentials.
//!
//! Free nodes carry unknown potentials; terminal couplings are folded into
//! the diagonal and right-hand side (terminal `V1` at 0, `V2` at 1). The
//! linear system is solved by conjugate gradients preconditioned with a
//! modified incomplete Cholesky factorization in node order, falling back to
//! the unmodified pivot where the modified one degenerates.

use crate::error::{Error, Result};

const MIC_RELAXATION: f64 = 0.97;

/// Symmetric graph Laplacian restricted to free nodes, in compressed rows.
#[derive(Clone, Debug)]
pub(crate) struct Network {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    weights: Vec<f64>,
    diag: Vec<f64>,
    rhs: Vec<f64>,
}

impl Network {
    /// `edges` join free nodes; `links` are `(node, conductance, terminal value)`.
    pub(crate) fn new(nodes: usize, edges: &[(usize, usize, f64)], links: &[(usize, f64, f64)]) -> Self {
        let mut degree = vec![0usize; nodes];
        for &(a, b, _) in edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut row_start = vec![0usize; nodes + 1];
        for i in 0..nodes {
            row_start[i + 1] = row_start[i] + degree[i];
        }
        let mut fill = row_start[..nodes].to_vec();
        let mut cols = vec![0usize; row_start[nodes]];
        let mut weights = vec![0.0; row_start[nodes]];
        let mut diag = vec![0.0; nodes];
        let mut rhs = vec![0.0; nodes];
        for &(a, b, c) in edges {
            for (u, v) in [(a, b), (b, a)] {
                cols[fill[u]] = v;
                weights[fill[u]] = c;
                fill[u] += 1;
            }
            diag[a] += c;
            diag[b] += c;
        }
        for i in 0..nodes {
            let (s, e) = (row_start[i], row_start[i + 1]);
            let mut row: Vec<(usize, f64)> = cols[s..e].iter().copied().zip(weights[s..e].iter().copied()).collect();
            row.sort_by_key(|&(c, _)| c);
            for (k, (c, w)) in row.into_iter().enumerate() {
                cols[s + k] = c;
                weights[s + k] = w;
            }
        }
        for &(a, c, value) in links {
            diag[a] += c;
            rhs[a] += c * value;
        }
        Network { row_start, cols, weights, diag, rhs }
    }

    pub(crate) fn len(&self) -> usize {
        self.diag.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.row_start[i], self.row_start[i + 1]);
        self.cols[s..e].iter().copied().zip(self.weights[s..e].iter().copied())
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.diag[i] * x[i] - self.row(i).map(|(j, w)| w * x[j]).sum::<f64>();
        }
    }

    fn scaled_norm(&self, r: &[f64]) -> f64 {
        r.iter().zip(&self.diag).map(|(r, d)| (r / d).abs()).fold(0.0, f64::max)
    }

    fn pivots(&self) -> Vec<f64> {
        let n = self.len();
        // Sum of couplings from each node to higher-numbered nodes.
        let upper: Vec<f64> = (0..n).map(|j| self.row(j).filter(|&(k, _)| k > j).map(|(_, w)| w).sum()).collect();
        let mut d = vec![0.0; n];
        for i in 0..n {
            let mut mic = self.diag[i];
            let mut ic = self.diag[i];
            for (j, c) in self.row(i).take_while(|&(j, _)| j < i) {
                mic -= c * (c + MIC_RELAXATION * (upper[j] - c)) / d[j];
                ic -= c * c / d[j];
            }
            d[i] = if mic > 1e-3 * self.diag[i] { mic } else { ic };
        }
        d
    }

    fn precondition(&self, d: &[f64], r: &[f64], z: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let s: f64 = self.row(i).take_while(|&(j, _)| j < i).map(|(j, w)| w * z[j]).sum();
            z[i] = (r[i] + s) / d[i];
        }
        for i in (0..n).rev() {
            let s: f64 = self.row(i).filter(|&(j, _)| j > i).map(|(j, w)| w * z[j]).sum();
            z[i] += s / d[i];
        }
    }

    /// Potentials of the free nodes with scaled residual at most `tolerance`.
    pub(crate) fn solve(&self, tolerance: f64) -> Result<(Vec<f64>, usize)> {
        let n = self.len();
        if let Some(i) = self.diag.iter().position(|&d| d <= 0.0) {
            return Err(Error::Numeric(format!("node {i} has no conductance")));
        }
        let mut x = vec![0.0; n];
        if n == 0 {
            return Ok((x, 0));
        }
        let d = self.pivots();
        let max_iter = 100 + 40 * ((n as f64).sqrt() as usize);
        let mut r = self.rhs.clone();
        let (mut z, mut p, mut q) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut iterations = 0;
        for _restart in 0..4 {
            self.precondition(&d, &r, &mut z);
            p.copy_from_slice(&z);
            let mut rz = dot(&r, &z);
            while iterations < max_iter && rz != 0.0 && self.scaled_norm(&r) > 0.25 * tolerance {
                self.apply(&p, &mut q);
                let pq = dot(&p, &q);
                if pq <= 0.0 {
                    return Err(Error::Numeric("network operator is not positive definite".into()));
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
            self.apply(&x, &mut q);
            for i in 0..n {
                r[i] = self.rhs[i] - q[i];
            }
            let res = self.scaled_norm(&r);
            if res <= tolerance {
                return Ok((x, iterations));
            }
            if iterations >= max_iter {
                return Err(Error::Numeric(format!(
                    "network solve stalled at scaled residual {res:.3e} after {iterations} iterations"
                )));
            }
        }
        Err(Error::Numeric("network solve did not converge".into()))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_chain() {
        // 0 -[1]- a -[1]- b -[1]- 1  → potentials 1/3, 2/3.
        let net = Network::new(2, &[(0, 1, 1.0)], &[(0, 1.0, 0.0), (1, 1.0, 1.0)]);
        let (x, _) = net.solve(1e-13).unwrap();
        assert!((x[0] - 1.0 / 3.0).abs() < 1e-12 && (x[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ring_with_chords() {
        let n = 40;
        let mut edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 1.0 + (i % 3) as f64)).collect();
        edges.push((0, 20, 0.5));
        let net = Network::new(n, &edges, &[(5, 2.0, 0.0), (30, 1.0, 1.0)]);
        let (x, _) = net.solve(1e-12).unwrap();
        let mut ax = vec![0.0; n];
        net.apply(&x, &mut ax);
        for i in 0..n {
            assert!((ax[i] - net.rhs[i]).abs() < 1e-10);
        }
        assert!(x.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
    }
}
