//! Interface kernels of the UGKS integral solution, the IMC factor κ and the
//! positivity/CFL time-step controller.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{Axis, Grid2D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsConstants {
    /// Radiation constant.
    pub a: f64,
    /// Light speed.
    pub c: f64,
    /// Knudsen number ε.
    pub eps: f64,
}

impl PhysicsConstants {
    pub fn scaled(eps: f64) -> Self {
        Self { a: 1.0, c: 1.0, eps }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.c > 0.0 && self.eps > 0.0) {
            return Err(Error::Config(format!("physics constants must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// β = 4acT³/C_v.
pub fn beta(t: f64, a: f64, c: f64, cv: f64) -> f64 {
    4.0 * a * c * t.powi(3) / cv
}

/// κ = ε²/(ε² + Δtβσ).
pub fn kappa(dt: f64, eps: f64, beta_val: f64, sigma: f64) -> f64 {
    let e2 = eps * eps;
    e2 / (e2 + dt * beta_val * sigma)
}

/// Harmonic mean of two cell opacities; zero when either vanishes.
pub fn interface_sigma(sigma_l: f64, sigma_r: f64) -> f64 {
    let s = sigma_l + sigma_r;
    if s == 0.0 || sigma_l == 0.0 || sigma_r == 0.0 {
        0.0
    } else {
        2.0 * sigma_l * sigma_r / s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UgksCoefficients {
    pub alpha: f64,
    pub b: f64,
    pub cc: f64,
    pub d: f64,
    pub nu: f64,
    pub kappa: f64,
    /// b̃/α̃, evaluated without forming the quotient of two small numbers.
    pub b_over_alpha: f64,
}

/// Below this νΔt the bracketed expressions are summed from their series.
pub const SERIES_SWITCH: f64 = 0.5;
const SERIES_TERMS: usize = 22;

/// Series of (A, B, H, G₂) in x where
/// A = (1−e^{−x})/x, B = (1−e^{−x}−xe^{−x})/x², H = 1−A,
/// G₂ = (1+e^{−x}−2A)/x².
pub fn bracket_series(x: f64) -> (f64, f64, f64, f64) {
    let (mut a, mut b, mut h, mut g) = (0.0, 0.0, 0.0, 0.0);
    // Sum from the smallest term for accuracy.
    let fact: Vec<f64> = (0..SERIES_TERMS + 3)
        .scan(1.0, |f, k| {
            if k > 0 {
                *f *= k as f64;
            }
            Some(*f)
        })
        .collect();
    for k in (0..SERIES_TERMS).rev() {
        let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
        let xk = x.powi(k as i32);
        a += sgn * xk / fact[k + 1];
        // H = Σ_{k≥1} (−1)^{k+1} x^k/(k+1)!
        if k >= 1 {
            h -= sgn * xk / fact[k + 1];
        }
        // B = Σ_{j≥2} (−1)^j (j−1)/j! x^{j−2}, with j = k+2
        b += sgn * (k + 1) as f64 / fact[k + 2] * xk;
        // G₂ = Σ_{j≥2} (−1)^j (j−1)/(j+1)! x^{j−2}
        g += sgn * (k + 1) as f64 / fact[k + 3] * xk;
    }
    (a, b, h, g)
}

/// α̃, b̃, c̃, d̃ and ν for one interface at (Δt, σ); κ from `beta_val`.
pub fn ugks_kernels(dt: f64, sigma: f64, beta_val: f64, k: &PhysicsConstants) -> UgksCoefficients {
    let (c, eps) = (k.c, k.eps);
    let nu = c * sigma / (eps * eps);
    let x = nu * dt;
    let four_pi = 4.0 * PI;
    let (alpha, b, cc, d, b_over_alpha) = if x < SERIES_SWITCH {
        let (sa, sb, sh, sg) = bracket_series(x);
        (
            c / eps * sa,
            -(c * c * dt / (eps * eps)) * sb,
            c / (four_pi * eps) * sh,
            // −c³Δt²σ/(4πε⁴)·G₂ written as −(c/4π)(cΔt/ε²)·x·G₂
            -(c / four_pi) * (c * dt / (eps * eps)) * x * sg,
            -(c * dt / eps) * sb / sa,
        )
    } else {
        let em = (-x).exp();
        let one_m = -(-x).exp_m1();
        let ratio = one_m / x;
        let num_b = one_m - x * em;
        (
            eps / (sigma * dt) * one_m,
            -(eps * eps / (sigma * sigma * dt)) * num_b,
            c / (four_pi * eps) * (1.0 - ratio),
            -(c / (four_pi * sigma)) * (1.0 + em - 2.0 * ratio),
            -(eps / sigma) * num_b / one_m,
        )
    };
    UgksCoefficients { alpha, b, cc, d, nu, kappa: kappa(dt, eps, beta_val, sigma), b_over_alpha }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimestepMode {
    PpStrict,
    CflOnly,
}

/// Inputs of the time-step controller: cell opacities (ghosts included) on
/// `grid`, and which axes carry transport.
pub struct TimestepInput<'a> {
    pub grid: &'a Grid2D,
    pub sigma: &'a [f64],
    pub active: [bool; 2],
    pub consts: &'a PhysicsConstants,
}

impl TimestepInput<'_> {
    fn faces(&self, axis: Axis) -> Vec<(usize, usize)> {
        let g = self.grid;
        let (nx, ny) = (g.nx as isize, g.ny as isize);
        let mut out = Vec::new();
        match axis {
            Axis::X => {
                for j in 0..ny {
                    for i in 0..=nx {
                        out.push((g.idx(i - 1, j), g.idx(i, j)));
                    }
                }
            }
            Axis::Y => {
                for j in 0..=ny {
                    for i in 0..nx {
                        out.push((g.idx(i, j - 1), g.idx(i, j)));
                    }
                }
            }
        }
        out
    }

    /// Whether every positivity constraint holds at `dt`.
    pub fn admits(&self, dt: f64) -> bool {
        let g = self.grid;
        let k = self.consts;
        let axes: Vec<Axis> = [Axis::X, Axis::Y]
            .into_iter()
            .zip(self.active)
            .filter(|(_, a)| *a)
            .map(|(ax, _)| ax)
            .collect();
        if axes.is_empty() {
            return true;
        }
        let inv_h: f64 = axes.iter().map(|a| 1.0 / g.h(*a)).sum();
        let inv_h2: f64 = axes.iter().map(|a| 1.0 / g.h(*a).powi(2)).sum();
        let h_min = axes.iter().map(|a| g.h(*a)).fold(f64::INFINITY, f64::min);

        let sigma_min = g.interior().map(|c| self.sigma[c]).fold(f64::INFINITY, f64::min);
        let first = dt * ugks_kernels(dt, sigma_min, 0.0, k).alpha;
        if first > 1.0 / (2.0 * inv_h) {
            return false;
        }
        let bound_d = 3.0 * k.c / (8.0 * PI * k.eps * k.eps * inv_h2);
        for ax in axes {
            for (l, r) in self.faces(ax) {
                let sf = interface_sigma(self.sigma[l], self.sigma[r]);
                let co = ugks_kernels(dt, sf, 0.0, k);
                if -co.b_over_alpha > h_min {
                    return false;
                }
                if sf > 0.0 {
                    // −d̃/σ for each interior cell touching the face
                    let s_cell = [l, r]
                        .into_iter()
                        .filter(|c| self.is_interior(*c))
                        .map(|c| self.sigma[c])
                        .fold(f64::INFINITY, f64::min);
                    if -co.d / s_cell > bound_d {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn is_interior(&self, c: usize) -> bool {
        let s = self.grid.stride();
        let (i, j) = ((c % s) as isize - 2, (c / s) as isize - 2);
        i >= 0 && j >= 0 && i < self.grid.nx as isize && j < self.grid.ny as isize
    }
}

/// Largest admissible Δt ≤ `cfl_bound`.
pub fn max_timestep(input: &TimestepInput, mode: TimestepMode, cfl_bound: f64) -> Result<f64> {
    if !(cfl_bound > 0.0 && cfl_bound.is_finite()) {
        return Err(Error::InvalidState(format!("CFL bound {cfl_bound}")));
    }
    if input.grid.interior().any(|c| !input.sigma[c].is_finite() || input.sigma[c] < 0.0) {
        return Err(Error::InvalidState("non-finite or negative opacity".into()));
    }
    if mode == TimestepMode::CflOnly || input.admits(cfl_bound) {
        return Ok(cfl_bound);
    }
    let (mut lo, mut hi) = (0.0, cfl_bound);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if input.admits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
