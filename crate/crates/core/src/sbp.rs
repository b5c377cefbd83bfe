//! Gauss-Lobatto collocation operators with the summation-by-parts property.

use crate::error::{Error, Result};

/// Tolerance used when validating operators at construction.
pub const SBP_TOL: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct SbpOperators {
    pub k: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `d[j][m] = L_m'(xi_j)`.
    pub d: Vec<Vec<f64>>,
    pub s: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    bary: Vec<f64>,
}

/// Legendre polynomial `P_n` and its derivative at `x`.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        0.5 * nf * (nf + 1.0) * x.powi(n as i32 + 1)
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Gauss-Lobatto-Legendre nodes and weights for polynomial degree `k`.
pub fn gll(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k < 1 {
        return Err(Error::config("polynomial degree must be at least 1"));
    }
    let n = k + 1;
    let kf = k as f64;
    let mut nodes = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[k] = 1.0;
    for j in 1..k {
        // Chebyshev-Gauss-Lobatto seed, then Newton on P_k'.
        let mut x = -(std::f64::consts::PI * j as f64 / kf).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(k, x);
            // P_k'' from the Legendre ODE: (1-x^2) P'' = 2x P' - k(k+1) P.
            let d2p = (2.0 * x * dp - kf * (kf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[j] = x;
    }
    // Symmetrize to remove round-off asymmetry.
    for j in 0..n / 2 {
        let a = 0.5 * (nodes[k - j] - nodes[j]);
        nodes[j] = -a;
        nodes[k - j] = a;
    }
    if n % 2 == 1 {
        nodes[k / 2] = 0.0;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre(k, x);
            2.0 / (kf * (kf + 1.0) * p * p)
        })
        .collect();
    Ok((nodes, weights))
}

impl SbpOperators {
    pub fn new(k: usize) -> Result<Self> {
        let (nodes, weights) = gll(k)?;
        let n = k + 1;
        let bary: Vec<f64> = (0..n)
            .map(|m| 1.0 / (0..n).filter(|&j| j != m).map(|j| nodes[m] - nodes[j]).product::<f64>())
            .collect();
        let mut d = vec![vec![0.0; n]; n];
        for j in 0..n {
            for m in 0..n {
                if j != m {
                    d[j][m] = bary[m] / (bary[j] * (nodes[j] - nodes[m]));
                }
            }
            d[j][j] = -(0..n).filter(|&m| m != j).map(|m| d[j][m]).sum::<f64>();
        }
        let s: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|m| weights[j] * d[j][m]).collect()).collect();
        let mut b = vec![vec![0.0; n]; n];
        b[0][0] = -1.0;
        b[k][k] = 1.0;
        let ops = SbpOperators { k, nodes, weights, d, s, b, bary };
        ops.validate()?;
        Ok(ops)
    }

    pub fn n(&self) -> usize {
        self.k + 1
    }

    /// Boundary indicator `tau_m`: -1 at the left node, +1 at the right, 0 inside.
    pub fn tau(&self, m: usize) -> f64 {
        self.b[m][m]
    }

    /// Mass matrix as a dense matrix.
    pub fn mass(&self) -> Vec<Vec<f64>> {
        let n = self.n();
        (0..n)
            .map(|j| (0..n).map(|m| if j == m { self.weights[j] } else { 0.0 }).collect())
            .collect()
    }

    /// Largest violations of the SBP identities: `(S+S^T-B, S-MD, row sums of D, column sums of S - tau)`.
    pub fn identity_residuals(&self) -> [f64; 4] {
        let n = self.n();
        let mut r = [0.0f64; 4];
        for j in 0..n {
            let mut row = 0.0;
            for m in 0..n {
                r[0] = r[0].max((self.s[j][m] + self.s[m][j] - self.b[j][m]).abs());
                r[1] = r[1].max((self.s[j][m] - self.weights[j] * self.d[j][m]).abs());
                row += self.d[j][m];
            }
            r[2] = r[2].max(row.abs());
            let col: f64 = (0..n).map(|i| self.s[i][j]).sum();
            r[3] = r[3].max((col - self.tau(j)).abs());
        }
        r
    }

    fn validate(&self) -> Result<()> {
        let r = self.identity_residuals();
        let wsum: f64 = self.weights.iter().sum();
        if r.iter().any(|&x| !(x < SBP_TOL)) || (wsum - 2.0).abs() > SBP_TOL || self.weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::config(format!(
                "SBP operator for k={} violates its identities: residuals {r:?}, weight sum {wsum}",
                self.k
            )));
        }
        Ok(())
    }

    /// Nodal derivative on the reference element.
    pub fn differentiate(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.check_len(values.len())?;
        Ok(self.d.iter().map(|row| row.iter().zip(values).map(|(a, b)| a * b).sum()).collect())
    }

    /// GLL quadrature with the given Jacobian (`dx/2` for a 1D cell).
    pub fn quadrature(&self, values: &[f64], jacobian: f64) -> Result<f64> {
        self.check_len(values.len())?;
        Ok(jacobian * self.weights.iter().zip(values).map(|(w, v)| w * v).sum::<f64>())
    }

    /// Lagrange basis function `L_m` evaluated at `x`.
    pub fn basis(&self, m: usize, x: f64) -> f64 {
        (0..self.n())
            .filter(|&j| j != m)
            .map(|j| (x - self.nodes[j]) / (self.nodes[m] - self.nodes[j]))
            .product()
    }

    /// Evaluate the nodal interpolant at `x` (barycentric form).
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (m, &v) in values.iter().enumerate() {
            let dx = x - self.nodes[m];
            if dx == 0.0 {
                return v;
            }
            let t = self.bary[m] / dx;
            num += t * v;
            den += t;
        }
        num / den
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n() {
            return Err(Error::Shape { expected: self.n(), got });
        }
        Ok(())
    }
}
