//! Five-point macro system and its solver.

use crate::error::{Error, Result};

pub const NONE: usize = usize::MAX;

/// Aˢρ = b on the compact interior numbering.
///
/// `off[p][k]` multiplies ρ at `nb[p][k]` (west, east, south, north); entries
/// with `nb == NONE` are unused. `rhs_i` collects ρⁿ, the I⃗ⁿ flux part and
/// fixed boundary values; `rhs_phi` the exchange and κφⁿ flux parts.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroSystem {
    pub diag: Vec<f64>,
    pub off: Vec<[f64; 4]>,
    pub nb: Vec<[usize; 4]>,
    pub rhs_i: Vec<f64>,
    pub rhs_phi: Vec<f64>,
}

impl MacroSystem {
    pub fn new(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![[0.0; 4]; n],
            nb: vec![[NONE; 4]; n],
            rhs_i: vec![0.0; n],
            rhs_phi: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn west(&self) -> Vec<f64> {
        self.off.iter().map(|o| o[0]).collect()
    }
    pub fn east(&self) -> Vec<f64> {
        self.off.iter().map(|o| o[1]).collect()
    }
    pub fn south(&self) -> Vec<f64> {
        self.off.iter().map(|o| o[2]).collect()
    }
    pub fn north(&self) -> Vec<f64> {
        self.off.iter().map(|o| o[3]).collect()
    }

    /// Add `coef`·ρ_q to row p, folding a self-reference into the diagonal.
    pub fn couple(&mut self, p: usize, slot: usize, q: usize, coef: f64) {
        if q == p {
            self.diag[p] += coef;
        } else {
            self.off[p][slot] += coef;
            self.nb[p][slot] = q;
        }
    }

    pub fn rhs(&self) -> Vec<f64> {
        self.rhs_i.iter().zip(&self.rhs_phi).map(|(a, b)| a + b).collect()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for p in 0..self.len() {
            let mut s = self.diag[p] * x[p];
            for k in 0..4 {
                let q = self.nb[p][k];
                if q != NONE {
                    s += self.off[p][k] * x[q];
                }
            }
            y[p] = s;
        }
    }

    pub fn residual_inf(&self, x: &[f64], rhs: &[f64]) -> f64 {
        let mut y = vec![0.0; self.len()];
        self.apply(x, &mut y);
        y.iter().zip(rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Off-diagonals ≤ 0 and strictly positive row sums.
    pub fn check_m_matrix(&self) -> Result<()> {
        for p in 0..self.len() {
            let mut sum = self.diag[p];
            for k in 0..4 {
                if self.nb[p][k] != NONE {
                    if self.off[p][k] > 0.0 {
                        return Err(Error::Invariant(format!("positive off-diagonal in row {p}")));
                    }
                    sum += self.off[p][k];
                }
            }
            if !(sum > 0.0) {
                return Err(Error::Invariant(format!("row {p} sum {sum:e} not positive")));
            }
        }
        Ok(())
    }

    fn is_diagonal(&self) -> bool {
        self.off.iter().zip(&self.nb).all(|(o, n)| (0..4).all(|k| n[k] == NONE || o[k] == 0.0))
    }

    /// Whether every coupling links p to p ± 1 (a tridiagonal chain).
    fn is_chain(&self) -> bool {
        self.nb.iter().enumerate().all(|(p, n)| {
            (0..4).all(|k| n[k] == NONE || n[k] + 1 == p || n[k] == p + 1 || self.off[p][k] == 0.0)
        })
    }
}

pub const SOLVE_TOL: f64 = 1e-12;

/// Solve the macro system; returns the solution and the iteration count.
///
/// Residual contract: ‖Ax − b‖∞ ≤ 1e−12·‖b‖∞. When b ≥ 0 the returned
/// solution is nonnegative.
pub fn solve_macro(sys: &MacroSystem) -> Result<(Vec<f64>, usize)> {
    let b = sys.rhs();
    let n = sys.len();
    let bnorm = b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = SOLVE_TOL * bnorm;
    if bnorm == 0.0 {
        return Ok((vec![0.0; n], 0));
    }
    let (mut x, mut iters) = if sys.is_diagonal() {
        ((0..n).map(|p| b[p] / sys.diag[p]).collect(), 1)
    } else if sys.is_chain() {
        (thomas(sys, &b), 1)
    } else {
        pcg(sys, &b, 0.1 * tol)?
    };
    let nonneg_rhs = b.iter().all(|v| *v >= 0.0);
    if nonneg_rhs && x.iter().any(|v| *v < 0.0) {
        x.iter_mut().for_each(|v| *v = v.max(0.0));
    }
    let mut res = sys.residual_inf(&x, &b);
    let mut sweeps = 0;
    while res > tol {
        // Gauss–Seidel keeps a nonnegative iterate nonnegative for an M-matrix
        // with b ≥ 0.
        gauss_seidel(sys, &b, &mut x);
        sweeps += 1;
        res = sys.residual_inf(&x, &b);
        if sweeps > 20_000 {
            return Err(Error::LinearSolve { iters: iters + sweeps, residual: res / bnorm });
        }
    }
    iters += sweeps;
    Ok((x, iters))
}

fn gauss_seidel(sys: &MacroSystem, b: &[f64], x: &mut [f64]) {
    for p in 0..sys.len() {
        let mut s = b[p];
        for k in 0..4 {
            let q = sys.nb[p][k];
            if q != NONE {
                s -= sys.off[p][k] * x[q];
            }
        }
        x[p] = s / sys.diag[p];
    }
}

fn thomas(sys: &MacroSystem, b: &[f64]) -> Vec<f64> {
    let n = sys.len();
    let (mut lo, mut up) = (vec![0.0; n], vec![0.0; n]);
    for p in 0..n {
        for k in 0..4 {
            let q = sys.nb[p][k];
            if q == NONE {
                continue;
            }
            if q + 1 == p {
                lo[p] += sys.off[p][k];
            } else if q == p + 1 {
                up[p] += sys.off[p][k];
            }
        }
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut piv = sys.diag[0];
    c[0] = up[0] / piv;
    d[0] = b[0] / piv;
    for p in 1..n {
        piv = sys.diag[p] - lo[p] * c[p - 1];
        c[p] = up[p] / piv;
        d[p] = (b[p] - lo[p] * d[p - 1]) / piv;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for p in (0..n - 1).rev() {
        x[p] = d[p] - c[p] * x[p + 1];
    }
    x
}

/// Jacobi-preconditioned conjugate gradients (the stencil is symmetric).
fn pcg(sys: &MacroSystem, b: &[f64], tol: f64) -> Result<(Vec<f64>, usize)> {
    let n = sys.len();
    let mut x: Vec<f64> = (0..n).map(|p| b[p] / sys.diag[p]).collect();
    let mut r = vec![0.0; n];
    sys.apply(&x, &mut r);
    for p in 0..n {
        r[p] = b[p] - r[p];
    }
    let mut z: Vec<f64> = (0..n).map(|p| r[p] / sys.diag[p]).collect();
    let mut dir = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut q = vec![0.0; n];
    let cap = 20 * n + 1000;
    for it in 0..cap {
        let rinf = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if rinf <= tol {
            return Ok((x, it));
        }
        sys.apply(&dir, &mut q);
        let pq: f64 = dir.iter().zip(&q).map(|(a, b)| a * b).sum();
        if pq <= 0.0 {
            break;
        }
        let alpha = rz / pq;
        for p in 0..n {
            x[p] += alpha * dir[p];
            r[p] -= alpha * q[p];
            z[p] = r[p] / sys.diag[p];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for p in 0..n {
            dir[p] = z[p] + beta * dir[p];
        }
    }
    // Fall through to Gauss–Seidel refinement in the caller.
    Ok((x, cap))
}
