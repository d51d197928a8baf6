//! Piecewise-linear reconstruction and the linear scaling limiters that make
//! the macro update positivity preserving.

use crate::angular::AngularTables;
use crate::error::{Error, Result};
use crate::mesh::{Axis, Grid2D};

/// Monotonized-central slope: minmod(2Δ₋, (Δ₋+Δ₊)/2, 2Δ₊) / h.
#[inline]
pub fn muscl_slope(w_left: f64, w_center: f64, w_right: f64, h: f64) -> f64 {
    let back = (w_center - w_left) / h;
    let fwd = (w_right - w_center) / h;
    if back * fwd <= 0.0 {
        return 0.0;
    }
    let centred = 0.5 * (back + fwd);
    let mag = (2.0 * back.abs()).min(2.0 * fwd.abs()).min(centred.abs());
    mag.copysign(centred)
}

/// Interface mean and difference quotient of a cell scalar.
#[inline]
pub fn interface_scalar(w_left: f64, w_right: f64, h: f64) -> (f64, f64) {
    (0.5 * (w_left + w_right), (w_right - w_left) / h)
}

/// MUSCL slopes along `axis` of a field with `m` components per cell, for
/// interior cells only; ghosts must be filled.
pub fn compute_slopes(field: &[f64], m: usize, grid: &Grid2D, axis: Axis, out: &mut [f64]) {
    let step = grid.step(axis) * m;
    let h = grid.h(axis);
    for c in grid.interior() {
        let base = c * m;
        for k in 0..m {
            let w = field[base + k];
            out[base + k] = muscl_slope(field[base + k - step], w, field[base + k + step], h);
        }
    }
}

/// Largest λ ∈ [0,1] with aᵢ + λ·bᵢ ≥ 0 for every pair (aᵢ, bᵢ).
pub fn max_scaling(conditions: &[(f64, f64)]) -> f64 {
    let mut lam = 1.0f64;
    for &(a, b) in conditions {
        if a + b < 0.0 {
            let r = if b < 0.0 { a / -b } else { 0.0 };
            lam = lam.min(r.clamp(0.0, 1.0));
        }
    }
    lam
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inputs of the λ¹ limiter for one cell.
#[derive(Debug, Clone, Copy)]
pub struct CellFaces {
    /// α̃ on the west, east, south and north faces.
    pub alpha: [f64; 4],
    /// b̃/α̃ on the same faces.
    pub b_over_alpha: [f64; 4],
    pub dx: f64,
    pub dy: f64,
    /// Transport along x / y resolved.
    pub active: [bool; 2],
}

/// The affine conditions (13) and (17) as (A·ρ, B·İ) pairs.
pub fn lambda1_conditions(rho: f64, micro: &[f64], f: &CellFaces, t: &AngularTables) -> [(f64, f64); 5] {
    let xp = dot(&t.x.m1_pos[1..], micro);
    let xn = dot(&t.x.m1_neg[1..], micro);
    let yp = dot(&t.y.m1_pos[1..], micro);
    let yn = dot(&t.y.m1_neg[1..], micro);
    let [aw, ae, as_, an] = f.alpha;
    let (mut a13, mut b13) = (0.0, 0.0);
    if f.active[0] {
        a13 += (aw + ae) / f.dx;
        b13 += aw / f.dx * xn - ae / f.dx * xp;
    }
    if f.active[1] {
        a13 += (as_ + an) / f.dy;
        b13 += as_ / f.dy * yn - an / f.dy * yp;
    }
    let q = 0.25 * rho;
    [(0.25 * a13 * rho, b13), (q, xp), (q, -xn), (q, yp), (q, -yn)]
}

/// λ¹: uniform scaling of İ so that (13) and (17) hold.
pub fn lambda1(rho: f64, micro: &[f64], faces: &CellFaces, t: &AngularTables) -> Result<f64> {
    if rho < 0.0 || !rho.is_finite() {
        return Err(Error::InvalidInput(format!("lambda1 requires rho >= 0, got {rho}")));
    }
    Ok(max_scaling(&lambda1_conditions(rho, micro, faces, t)))
}

/// Conditions (14) (x) or (15) (y) for the slope `slope` of the λ¹-limited
/// full vector `full`, as (constant, slope term) pairs.
pub fn lambda2_conditions(
    full: &[f64],
    slope: &[f64],
    b_over_alpha: [f64; 2],
    h: f64,
    t: &AngularTables,
    axis: Axis,
) -> [(f64, f64); 4] {
    let dt = t.dir(axis);
    let c1 = dot(&dt.m1_pos, full);
    let c2 = -dot(&dt.m1_neg, full);
    // [lower face, upper face] ratios: the positive half leaves through the
    // upper face, the negative half through the lower one. The b̃ term flips
    // sign with the half range: the characteristic foot of the lower face
    // sits at x − h/2 + (b̃/α̃)μ for μ < 0.
    let s1 = 0.5 * h * dot(&dt.m1_pos, slope) + b_over_alpha[1] * dot(&dt.m2_pos, slope);
    let s2 = 0.5 * h * dot(&dt.m1_neg, slope) - b_over_alpha[0] * dot(&dt.m2_neg, slope);
    [(c1, s1), (c1, -s1), (c2, s2), (c2, -s2)]
}

/// λ²¹ (x) or λ²² (y): uniform scaling of a slope vector.
pub fn lambda2(
    full: &[f64],
    slope: &[f64],
    b_over_alpha: [f64; 2],
    h: f64,
    t: &AngularTables,
    axis: Axis,
) -> Result<f64> {
    let mut conds = lambda2_conditions(full, slope, b_over_alpha, h, t, axis);
    let scale = full[0].abs() * 2.0 * std::f64::consts::PI.sqrt();
    for (a, _) in conds.iter_mut() {
        if *a < 0.0 {
            if *a < -1e-12 * scale.max(f64::MIN_POSITIVE) {
                return Err(Error::InvalidInput(format!("lambda2 constant term {a:e} < 0")));
            }
            *a = 0.0;
        }
    }
    Ok(max_scaling(&conds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::FilterKind;

    #[test]
    fn muscl_examples() {
        assert_eq!(muscl_slope(1.0, 1.0, 1.0, 1.0), 0.0);
        assert_eq!(muscl_slope(0.0, 1.0, 2.0, 1.0), 1.0);
        assert_eq!(muscl_slope(0.0, 1.0, 0.0, 1.0), 0.0);
        assert_eq!(muscl_slope(0.0, 1.0, 2.5, 1.0), 1.25);
        for (a, b, c) in [(0.3, 1.1, 1.4), (2.0, -1.0, -1.5), (0.0, 0.1, 5.0)] {
            assert_eq!(muscl_slope(a, b, c, 0.5), -muscl_slope(c, b, a, 0.5));
        }
    }

    #[test]
    fn interface_examples() {
        assert_eq!(interface_scalar(2.0, 2.0, 0.5), (2.0, 0.0));
        assert_eq!(interface_scalar(0.0, 2.0, 1.0), (1.0, 2.0));
    }

    #[test]
    fn lambda1_trivial_cases() {
        let t = AngularTables::new(3, FilterKind::None);
        let f = CellFaces { alpha: [1.0; 4], b_over_alpha: [0.0; 4], dx: 0.1, dy: 0.1, active: [true, true] };
        let micro = vec![0.0; t.d - 1];
        assert_eq!(lambda1(1.0, &micro, &f, &t).unwrap(), 1.0);
        let mut micro = vec![0.0; t.d - 1];
        micro[2] = 0.3; // ψ₁¹ component
        assert_eq!(lambda1(0.0, &micro, &f, &t).unwrap(), 0.0);
        assert!(lambda1(-1.0, &micro, &f, &t).is_err());
    }

    #[test]
    fn lambda2_homogeneity() {
        let t = AngularTables::new(2, FilterKind::None);
        let mut full = vec![0.0; t.d];
        full[0] = 1.0 / (2.0 * std::f64::consts::PI.sqrt());
        let mut slope = vec![0.0; t.d];
        slope[0] = 40.0;
        slope[3] = -13.0;
        let l1 = lambda2(&full, &slope, [-0.01, -0.02], 0.1, &t, Axis::X).unwrap();
        assert!(l1 < 0.5);
        let s2: Vec<f64> = slope.iter().map(|v| 2.0 * v).collect();
        let l2 = lambda2(&full, &s2, [-0.01, -0.02], 0.1, &t, Axis::X).unwrap();
        assert!((l2 - 0.5 * l1).abs() < 1e-15);
        let zero = vec![0.0; t.d];
        assert_eq!(lambda2(&full, &zero, [0.0, 0.0], 0.1, &t, Axis::Y).unwrap(), 1.0);
    }

    #[test]
    fn limited_slopes_bound_half_range_fluxes() {
        use crate::fluxes::{macro_neg, macro_pos, FluxMode, Side};
        use rand::{Rng, SeedableRng};
        let t = AngularTables::new(3, FilterKind::None);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let h = 0.1;
        let mut checked = 0;
        for _ in 0..2000 {
            let mut full: Vec<f64> = (0..t.d).map(|_| rng.gen_range(-0.05..0.05)).collect();
            full[0] = rng.gen_range(0.0..1.0);
            let slope: Vec<f64> = (0..t.d).map(|_| rng.gen_range(-20.0..20.0)).collect();
            let ba = [rng.gen_range(-0.08..0.0), rng.gen_range(-0.08..0.0)];
            for axis in [Axis::X, Axis::Y] {
                let dt = t.dir(axis);
                let c1 = dot(&dt.m1_pos, &full);
                let c2 = -dot(&dt.m1_neg, &full);
                if c1 < 0.0 || c2 < 0.0 {
                    continue;
                }
                let lam = lambda2(&full, &slope, ba, h, &t, axis).unwrap();
                let sl: Vec<f64> = slope.iter().map(|v| lam * v).collect();
                let side = Side { full: &full, slope: &sl };
                // unit α̃, so b̃ = b̃/α̃ on each face
                let out_hi = macro_pos(dt, side, h, 1.0, ba[1], FluxMode::Full);
                let out_lo = macro_neg(dt, side, h, 1.0, ba[0], FluxMode::Full);
                let tol = 1e-13 * (c1 + c2 + 1.0);
                assert!(out_hi >= -tol && out_hi <= 2.0 * c1 + tol, "{out_hi} vs {c1}");
                assert!(out_lo <= tol && -out_lo <= 2.0 * c2 + tol, "{out_lo} vs {c2}");
                checked += 1;
            }
        }
        assert!(checked > 1000);
    }
}
