//! Error norms, observed orders and diagnostic quantities.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::{Grid2D, MomentState};

/// ‖a − b‖₂ / ‖b‖₂.
pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// max|a − b| / max|b|.
pub fn rel_linf(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.abs()).fold(0.0, f64::max);
    num / den
}

/// log₂(e_h / e_{h/2}).
pub fn order(e_coarse: f64, e_fine: f64) -> f64 {
    (e_coarse / e_fine).log2()
}

/// Average a compact fine field onto the grid coarsened by two in x (and in
/// y when `ny_fine > 1`).
pub fn restrict(fine: &[f64], nx_fine: usize, ny_fine: usize) -> Result<Vec<f64>> {
    if nx_fine % 2 != 0 || (ny_fine > 1 && ny_fine % 2 != 0) || fine.len() != nx_fine * ny_fine {
        return Err(Error::Config(format!("cannot restrict a {nx_fine}x{ny_fine} field")));
    }
    let nxc = nx_fine / 2;
    if ny_fine == 1 {
        return Ok((0..nxc).map(|i| 0.5 * (fine[2 * i] + fine[2 * i + 1])).collect());
    }
    let nyc = ny_fine / 2;
    let mut out = vec![0.0; nxc * nyc];
    for j in 0..nyc {
        for i in 0..nxc {
            let at = |ii: usize, jj: usize| fine[jj * nx_fine + ii];
            out[j * nxc + i] =
                0.25 * (at(2 * i, 2 * j) + at(2 * i + 1, 2 * j) + at(2 * i, 2 * j + 1) + at(2 * i + 1, 2 * j + 1));
        }
    }
    Ok(out)
}

/// Interior values of a ghosted field in compact order.
pub fn interior(grid: &Grid2D, field: &[f64]) -> Vec<f64> {
    grid.interior().map(|c| field[c]).collect()
}

/// max over cells of |I₀⁰ − φ/(2√π)| + Σ|I_ℓ^m|.
pub fn err_ap(state: &MomentState) -> f64 {
    let m = state.n_micro();
    let s = 2.0 * PI.sqrt();
    state
        .grid
        .interior()
        .map(|c| {
            let micro: f64 = state.micro[c * m..(c + 1) * m].iter().map(|v| v.abs()).sum();
            (state.rho[c] - state.phi[c]).abs() / s + micro
        })
        .fold(0.0, f64::max)
}

/// T_r = (ρ/(ac))^{1/4}, with negative ρ mapped to 0.
pub fn radiation_temperature(rho: f64, a: f64, c: f64) -> f64 {
    (rho.max(0.0) / (a * c)).powf(0.25)
}

/// Bilinear interpolation of a compact cell-centred field; points outside
/// the centre lattice are clamped.
pub fn bilinear(grid: &Grid2D, field: &[f64], x: f64, y: f64) -> f64 {
    let fx = ((x - grid.x0) / grid.dx - 0.5).clamp(0.0, (grid.nx - 1) as f64);
    let fy = ((y - grid.y0) / grid.dy - 0.5).clamp(0.0, (grid.ny - 1) as f64);
    let (i0, j0) = (fx.floor() as usize, fy.floor() as usize);
    let (i1, j1) = ((i0 + 1).min(grid.nx - 1), (j0 + 1).min(grid.ny - 1));
    let (tx, ty) = (fx - i0 as f64, fy - j0 as f64);
    let at = |i: usize, j: usize| field[j * grid.nx + i];
    (1.0 - ty) * ((1.0 - tx) * at(i0, j0) + tx * at(i1, j0)) + ty * ((1.0 - tx) * at(i0, j1) + tx * at(i1, j1))
}

/// Samples of a compact field along the segment p0 → p1.
pub fn lineout(grid: &Grid2D, field: &[f64], p0: (f64, f64), p1: (f64, f64), n: usize) -> Vec<(f64, f64)> {
    let len = ((p1.0 - p0.0).powi(2) + (p1.1 - p0.1).powi(2)).sqrt();
    (0..n)
        .map(|k| {
            let s = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
            let (x, y) = (p0.0 + s * (p1.0 - p0.0), p0.1 + s * (p1.1 - p0.1));
            (s * len, bilinear(grid, field, x, y))
        })
        .collect()
}

/// Per-radius (max − min)/mean of bilinear samples on `n_angles` uniform
/// angles around the origin.
pub fn symmetry_metric(grid: &Grid2D, field: &[f64], radii: &[f64], n_angles: usize) -> Result<Vec<f64>> {
    let reach = (-grid.x0).min(grid.x1()).min(-grid.y0).min(grid.y1());
    radii
        .iter()
        .map(|&r| {
            if !(r >= 0.0 && r < reach) {
                return Err(Error::InvalidInput(format!("radius {r} outside the domain")));
            }
            let vals: Vec<f64> = (0..n_angles)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / n_angles as f64;
                    bilinear(grid, field, r * th.cos(), r * th.sin())
                })
                .collect();
            let mx = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mn = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let mean = vals.iter().sum::<f64>() / n_angles as f64;
            Ok((mx - mn) / mean)
        })
        .collect()
}

/// First position where `values` falls below `level`, scanning left to
/// right, linearly interpolated between samples.
pub fn front_position(xs: &[f64], values: &[f64], level: f64) -> Option<f64> {
    if values.first().map_or(true, |v| *v < level) {
        return None;
    }
    for k in 1..values.len() {
        if values[k] < level {
            let (v0, v1) = (values[k - 1], values[k]);
            let s = (v0 - level) / (v0 - v1);
            return Some(xs[k - 1] + s * (xs[k] - xs[k - 1]));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_and_orders() {
        assert_eq!(rel_l2(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert!((rel_l2(&[2.0], &[1.0]) - 1.0).abs() < 1e-15);
        assert_eq!(rel_linf(&[1.0, 3.0], &[1.0, 2.0]), 0.5);
        assert_eq!(order(4.0, 1.0), 2.0);
    }

    #[test]
    fn restriction_of_affine_field_is_exact() {
        // cell averages of an affine profile restrict to the coarse centres
        let nx = 16;
        let f: Vec<f64> = (0..nx).map(|i| 3.0 + 2.0 * (i as f64 + 0.5) / nx as f64).collect();
        let c = restrict(&f, nx, 1).unwrap();
        for (i, v) in c.iter().enumerate() {
            let exact = 3.0 + 2.0 * (i as f64 + 0.5) / (nx / 2) as f64;
            assert!((v - exact).abs() < 1e-14);
        }
        assert!(restrict(&f[..15], 15, 1).is_err());
    }

    #[test]
    fn lineout_along_diagonal_of_affine_field() {
        let g = Grid2D::new(20, 20, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let mut f = vec![0.0; 400];
        for j in 0..20 {
            for i in 0..20 {
                f[j * 20 + i] = 1.0 + 2.0 * g.xc(i as isize) - g.yc(j as isize);
            }
        }
        for (s, v) in lineout(&g, &f, (0.0, 0.0), (0.9, 0.9), 11) {
            let t = s / 2f64.sqrt();
            assert!((v - (1.0 + 2.0 * t - t)).abs() < 1e-13);
        }
    }

    #[test]
    fn symmetry_of_radial_and_perturbed_fields() {
        let g = Grid2D::new(200, 200, (-1.0, 1.0), (-1.0, 1.0)).unwrap();
        let mut radial = vec![0.0; g.n_interior()];
        let mut bumpy = vec![0.0; g.n_interior()];
        for j in 0..200 {
            for i in 0..200 {
                let (x, y) = (g.xc(i as isize), g.yc(j as isize));
                let r2 = x * x + y * y;
                let th = y.atan2(x);
                radial[j * 200 + i] = 5.0 - r2;
                bumpy[j * 200 + i] = 1.0 + 0.1 * (4.0 * th).cos();
            }
        }
        let d = symmetry_metric(&g, &radial, &[0.5], 64).unwrap();
        assert!(d[0] < 1e-3);
        // (1.1 − 0.9)/1 for the 4-fold perturbation, up to interpolation
        let d = symmetry_metric(&g, &bumpy, &[0.5], 64).unwrap();
        assert!((d[0] - 0.2).abs() < 0.01);
        assert!(symmetry_metric(&g, &radial, &[1.5], 8).is_err());
    }

    #[test]
    fn front_detection() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(front_position(&xs, &[1.0, 0.8, 0.2, 0.0], 0.5), Some(1.5));
        assert_eq!(front_position(&xs, &[0.1, 0.0, 0.0, 0.0], 0.5), None);
    }
}
