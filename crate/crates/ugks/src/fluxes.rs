//! Interface fluxes: macro Φ/Υ and micro G⃗/H⃗ in full (UGKS) and simplified
//! (SUGKS) form.
//!
//! A face flux splits into a part from the reconstructed I⃗ⁿ, a part from
//! κφⁿ, and the coefficients of the two neighbouring ρ^{n+1} values, so the
//! macro solver can keep δρ^{n+1} implicit.
//!
//! The I⃗ⁿ part is a sum of one contribution from each neighbour: the lower
//! cell supplies the positive half-range, the upper cell the negative one.
//! The `*_pos` / `*_neg` functions compute those pieces; the solver evaluates
//! them once per cell and adds them per face.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::angular::{AngularTables, DirectionTables};
use crate::coeffs::UgksCoefficients;
use crate::mesh::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluxMode {
    /// All UGKS terms.
    Full,
    /// Drops the b̃ blocks and the micro c̃ block.
    Simplified,
}

impl std::str::FromStr for FluxMode {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ugks" | "full" => Ok(FluxMode::Full),
            "sugks" | "simplified" => Ok(FluxMode::Simplified),
            o => Err(crate::Error::Config(format!("unknown flux mode '{o}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceFluxParts<T> {
    pub from_in: T,
    pub from_phin: T,
    /// Multipliers of ρ^{n+1} in the lower and upper neighbour.
    pub rho_coupling: [T; 2],
}

impl FaceFluxParts<f64> {
    pub fn total(&self, rho_l: f64, rho_r: f64) -> f64 {
        self.from_in + self.from_phin + self.rho_coupling[0] * rho_l + self.rho_coupling[1] * rho_r
    }
}

impl FaceFluxParts<Vec<f64>> {
    pub fn total(&self, rho_l: f64, rho_r: f64) -> Vec<f64> {
        (0..self.from_in.len())
            .map(|k| {
                self.from_in[k]
                    + self.from_phin[k]
                    + self.rho_coupling[0][k] * rho_l
                    + self.rho_coupling[1][k] * rho_r
            })
            .collect()
    }
}

/// Reconstructed state of one neighbour: full moment vector and its slope
/// along the face normal.
#[derive(Debug, Clone, Copy)]
pub struct Side<'a> {
    pub full: &'a [f64],
    pub slope: &'a [f64],
}

/// Macro contribution of the lower cell: α̃·⟨μψ⟩₊·(I + h/2 δI) + b̃·⟨μ²ψ⟩₊·δI.
#[inline]
pub fn macro_pos(t: &DirectionTables, s: Side, h: f64, alpha: f64, b: f64, mode: FluxMode) -> f64 {
    let mut acc = 0.0;
    let mut acc2 = 0.0;
    for k in 0..s.full.len() {
        acc += t.m1_pos[k] * (s.full[k] + 0.5 * h * s.slope[k]);
        acc2 += t.m2_pos[k] * s.slope[k];
    }
    alpha * acc + if mode == FluxMode::Full { b * acc2 } else { 0.0 }
}

/// Macro contribution of the upper cell: α̃·⟨μψ⟩₋·(I − h/2 δI) + b̃·⟨μ²ψ⟩₋·δI.
#[inline]
pub fn macro_neg(t: &DirectionTables, s: Side, h: f64, alpha: f64, b: f64, mode: FluxMode) -> f64 {
    let mut acc = 0.0;
    let mut acc2 = 0.0;
    for k in 0..s.full.len() {
        acc += t.m1_neg[k] * (s.full[k] - 0.5 * h * s.slope[k]);
        acc2 += t.m2_neg[k] * s.slope[k];
    }
    alpha * acc + if mode == FluxMode::Full { b * acc2 } else { 0.0 }
}

/// Micro contribution of the lower cell, added into `out` (length D−1).
pub fn micro_pos(
    t: &DirectionTables,
    s: Side,
    h: f64,
    alpha: f64,
    b: f64,
    mode: FluxMode,
    scratch: &mut [f64],
    out: &mut [f64],
) {
    for k in 0..s.full.len() {
        scratch[k] = s.full[k] + 0.5 * h * s.slope[k];
    }
    t.rows1_pos.mul_add(&scratch[..s.full.len()], alpha, out);
    if mode == FluxMode::Full && b != 0.0 {
        t.rows2_pos.mul_add(s.slope, b, out);
    }
}

/// Micro contribution of the upper cell, added into `out`.
pub fn micro_neg(
    t: &DirectionTables,
    s: Side,
    h: f64,
    alpha: f64,
    b: f64,
    mode: FluxMode,
    scratch: &mut [f64],
    out: &mut [f64],
) {
    for k in 0..s.full.len() {
        scratch[k] = s.full[k] - 0.5 * h * s.slope[k];
    }
    t.rows1_neg.mul_add(&scratch[..s.full.len()], alpha, out);
    if mode == FluxMode::Full && b != 0.0 {
        t.rows2_neg.mul_add(s.slope, b, out);
    }
}

/// κφⁿ-part and ρ^{n+1} multipliers of the macro flux.
#[inline]
pub fn macro_source_parts(co: &UgksCoefficients, kphi: [f64; 2], h: f64) -> (f64, [f64; 2]) {
    let w = co.d * 4.0 * PI / 3.0;
    let r = w * (1.0 - co.kappa) / h;
    (w * (kphi[1] - kphi[0]) / h, [-r, r])
}

/// Scalar multipliers (of ⟨μψ̆⟩ and ⟨μ²ψ̆⟩) of the micro source part:
/// returns ((phin₁, phin₂), [(ρ_L₁, ρ_L₂), (ρ_R₁, ρ_R₂)]).
#[inline]
pub fn micro_source_weights(
    co: &UgksCoefficients,
    kphi: [f64; 2],
    h: f64,
    mode: FluxMode,
) -> ((f64, f64), [(f64, f64); 2]) {
    let cc = if mode == FluxMode::Full { co.cc } else { 0.0 };
    let om = 1.0 - co.kappa;
    (
        (cc * 0.5 * (kphi[0] + kphi[1]), co.d * (kphi[1] - kphi[0]) / h),
        [(cc * 0.5 * om, -co.d * om / h), (cc * 0.5 * om, co.d * om / h)],
    )
}

/// Macro flux through the face between `lower` and `upper` along `axis`.
/// `co` carries the face kernels with κ evaluated at the face.
pub fn macro_flux(
    t: &AngularTables,
    axis: Axis,
    lower: Side,
    upper: Side,
    kphi: [f64; 2],
    co: &UgksCoefficients,
    h: f64,
    mode: FluxMode,
) -> FaceFluxParts<f64> {
    let dt = t.dir(axis);
    let from_in = macro_pos(dt, lower, h, co.alpha, co.b, mode) + macro_neg(dt, upper, h, co.alpha, co.b, mode);
    let (from_phin, rho_coupling) = macro_source_parts(co, kphi, h);
    FaceFluxParts { from_in, from_phin, rho_coupling }
}

pub fn macro_flux_x(
    t: &AngularTables,
    lower: Side,
    upper: Side,
    kphi: [f64; 2],
    co: &UgksCoefficients,
    h: f64,
    mode: FluxMode,
) -> FaceFluxParts<f64> {
    macro_flux(t, Axis::X, lower, upper, kphi, co, h, mode)
}

pub fn macro_flux_y(
    t: &AngularTables,
    lower: Side,
    upper: Side,
    kphi: [f64; 2],
    co: &UgksCoefficients,
    h: f64,
    mode: FluxMode,
) -> FaceFluxParts<f64> {
    macro_flux(t, Axis::Y, lower, upper, kphi, co, h, mode)
}

/// Micro flux (length D−1) through the face between `lower` and `upper`.
pub fn micro_flux(
    t: &AngularTables,
    axis: Axis,
    lower: Side,
    upper: Side,
    kphi: [f64; 2],
    co: &UgksCoefficients,
    h: f64,
    mode: FluxMode,
) -> FaceFluxParts<Vec<f64>> {
    let dt = t.dir(axis);
    let m = t.d - 1;
    let mut scratch = vec![0.0; t.d];
    let mut from_in = vec![0.0; m];
    micro_pos(dt, lower, h, co.alpha, co.b, mode, &mut scratch, &mut from_in);
    micro_neg(dt, upper, h, co.alpha, co.b, mode, &mut scratch, &mut from_in);
    let ((p1, p2), rho_w) = micro_source_weights(co, kphi, h, mode);
    let comb = |w1: f64, w2: f64| -> Vec<f64> { (0..m).map(|k| w1 * dt.full1[k] + w2 * dt.full2[k]).collect() };
    FaceFluxParts {
        from_in,
        from_phin: comb(p1, p2),
        rho_coupling: [comb(rho_w[0].0, rho_w[0].1), comb(rho_w[1].0, rho_w[1].1)],
    }
}

pub fn micro_flux_x(
    t: &AngularTables,
    lower: Side,
    upper: Side,
    kphi: [f64; 2],
    co: &UgksCoefficients,
    h: f64,
    mode: FluxMode,
) -> FaceFluxParts<Vec<f64>> {
    micro_flux(t, Axis::X, lower, upper, kphi, co, h, mode)
}

pub fn micro_flux_y(
    t: &AngularTables,
    lower: Side,
    upper: Side,
    kphi: [f64; 2],
    co: &UgksCoefficients,
    h: f64,
    mode: FluxMode,
) -> FaceFluxParts<Vec<f64>> {
    micro_flux(t, Axis::Y, lower, upper, kphi, co, h, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::FilterKind;
    use crate::coeffs::{ugks_kernels, PhysicsConstants};

    #[test]
    fn constant_isotropic_state_fluxes() {
        let t = AngularTables::new(3, FilterKind::None);
        let mut full = vec![0.0; t.d];
        full[0] = 2.0 / (2.0 * PI.sqrt());
        let zero = vec![0.0; t.d];
        let s = Side { full: &full, slope: &zero };
        let co = ugks_kernels(0.01, 1.0, 4.0, &PhysicsConstants::scaled(1.0));
        let f1 = macro_flux_x(&t, s, s, [0.5, 0.5], &co, 0.1, FluxMode::Full).total(2.0, 2.0);
        // equal in-flux from both halves cancels exactly up to rounding
        assert!(f1.abs() < 1e-15);
        // the micro flux is a pure ⟨ηψ̆⟩ multiple: isotropic streaming plus the
        // equilibrium part, without gradient terms
        let g = micro_flux_y(&t, s, s, [0.5, 0.5], &co, 0.1, FluxMode::Full).total(2.0, 2.0);
        let w = co.alpha * 2.0 / (4.0 * PI) + co.cc * (0.5 + (1.0 - co.kappa) * 2.0);
        for (gv, f1) in g.iter().zip(&t.y.full1) {
            assert!((gv - w * f1).abs() < 1e-14);
        }
    }

    #[test]
    fn free_streaming_into_vacuum() {
        let t = AngularTables::new(3, FilterKind::None);
        let rho_l = 3.0;
        let mut full = vec![0.0; t.d];
        full[0] = rho_l / (2.0 * PI.sqrt());
        let zero = vec![0.0; t.d];
        let k = PhysicsConstants { a: 1.0, c: 2.0, eps: 0.5 };
        let co = ugks_kernels(0.01, 0.0, 0.0, &k);
        let f = macro_flux_x(
            &t,
            Side { full: &full, slope: &zero },
            Side { full: &zero, slope: &zero },
            [0.0, 0.0],
            &co,
            0.1,
            FluxMode::Full,
        );
        assert!((f.total(rho_l, 0.0) - k.c / k.eps * rho_l / 4.0).abs() < 1e-12);
    }

    #[test]
    fn simplified_drops_b_block() {
        let t = AngularTables::new(2, FilterKind::None);
        let full: Vec<f64> = (0..t.d).map(|k| 0.1 * k as f64 + 0.3).collect();
        let slope: Vec<f64> = (0..t.d).map(|k| (k as f64).cos()).collect();
        let s = Side { full: &full, slope: &slope };
        let mut co = ugks_kernels(0.05, 1.0, 1.0, &PhysicsConstants::scaled(1.0));
        let simp = macro_flux_x(&t, s, s, [0.2, 0.4], &co, 0.1, FluxMode::Simplified);
        co.b = 0.0;
        let full_nob = macro_flux_x(&t, s, s, [0.2, 0.4], &co, 0.1, FluxMode::Full);
        assert_eq!(simp, full_nob);
        let g = micro_flux_x(&t, s, s, [0.2, 0.4], &co, 0.1, FluxMode::Simplified);
        co.cc = 0.0;
        let g2 = micro_flux_x(&t, s, s, [0.2, 0.4], &co, 0.1, FluxMode::Full);
        assert_eq!(g, g2);
    }
}
