//! Real spherical-harmonic basis, quadrant-split sphere quadrature and the
//! precomputed moment tables consumed by the interface fluxes.
//!
//! Directions are Ω = (ξ, η, ζ) = (sinθ cosϕ, sinθ sinϕ, cosθ). The basis is
//! the orthonormal real harmonic set without the Condon–Shortley phase, so
//! ψ₁¹ ∝ ξ, ψ₁⁻¹ ∝ η and ψ₁⁰ ∝ ζ.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Position of ψ_l^m in the flat `(N+1)²` ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisIndex {
    pub l: usize,
    pub m: i64,
}

impl BasisIndex {
    pub fn new(l: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > l {
            return Err(Error::InvalidIndex { l, m });
        }
        Ok(Self { l, m })
    }

    pub fn flat(self) -> usize {
        ((self.l * (self.l + 1)) as i64 + self.m) as usize
    }

    pub fn from_flat(flat: usize) -> Self {
        let l = (flat as f64).sqrt().floor() as usize;
        let l = if (l + 1) * (l + 1) <= flat { l + 1 } else { l };
        let m = flat as i64 - (l * (l + 1)) as i64;
        Self { l, m }
    }
}

/// Number of basis functions for order `n`.
pub fn basis_len(n: usize) -> usize {
    (n + 1) * (n + 1)
}

/// Degree `l` of every flat index up to order `n`.
pub fn degrees(n: usize) -> Vec<usize> {
    (0..basis_len(n)).map(|k| BasisIndex::from_flat(k).l).collect()
}

/// Evaluate every basis function up to order `n` at `dir` into `out`.
pub fn eval_all(n: usize, dir: [f64; 3], out: &mut [f64]) {
    let d = basis_len(n);
    assert!(out.len() >= d);
    let (xi, eta, zeta) = (dir[0], dir[1], dir[2]);
    let s = (xi * xi + eta * eta).sqrt();
    let (cphi, sphi) = if s > 0.0 { (xi / s, eta / s) } else { (1.0, 0.0) };

    // Unnormalized associated Legendre P_l^m(ζ) without the (−1)^m phase.
    let mut p = vec![0.0; d];
    let pidx = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut tri = vec![0.0; (n + 1) * (n + 2) / 2];
    let mut pmm = 1.0;
    for m in 0..=n {
        if m > 0 {
            pmm *= (2 * m - 1) as f64 * s;
        }
        tri[pidx(m, m)] = pmm;
        if m < n {
            tri[pidx(m + 1, m)] = zeta * (2 * m + 1) as f64 * pmm;
        }
        for l in (m + 2)..=n {
            tri[pidx(l, m)] = ((2 * l - 1) as f64 * zeta * tri[pidx(l - 1, m)]
                - (l + m - 1) as f64 * tri[pidx(l - 2, m)])
                / (l - m) as f64;
        }
    }

    // cos(mϕ), sin(mϕ) by the angle-addition recurrence.
    let mut cm = vec![1.0; n + 1];
    let mut sm = vec![0.0; n + 1];
    for m in 1..=n {
        cm[m] = cm[m - 1] * cphi - sm[m - 1] * sphi;
        sm[m] = sm[m - 1] * cphi + cm[m - 1] * sphi;
    }

    for l in 0..=n {
        for m in 0..=l {
            // (l−m)!/(l+m)! as a running product.
            let mut ratio = 1.0;
            for k in (l - m + 1)..=(l + m) {
                ratio /= k as f64;
            }
            let norm = ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt();
            let plm = tri[pidx(l, m)];
            let base = l * (l + 1);
            if m == 0 {
                p[base] = norm * plm;
            } else {
                let v = std::f64::consts::SQRT_2 * norm * plm;
                p[base + m] = v * cm[m];
                p[base - m] = v * sm[m];
            }
        }
    }
    out[..d].copy_from_slice(&p);
}

/// Orthonormal real spherical harmonic ψ_l^m at `dir`.
pub fn eval_harmonic(idx: BasisIndex, dir: [f64; 3]) -> Result<f64> {
    if idx.m.unsigned_abs() as usize > idx.l {
        return Err(Error::InvalidIndex { l: idx.l, m: idx.m });
    }
    let mut out = vec![0.0; basis_len(idx.l)];
    eval_all(idx.l, dir, &mut out);
    Ok(out[idx.flat()])
}

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    // P_n(z) and P_n'(z) by the three-term recurrence.
    let legendre = |z: f64| {
        let (mut p0, mut p1) = (0.0, 1.0);
        for j in 1..=n {
            let p2 = p0;
            p0 = p1;
            p1 = ((2 * j - 1) as f64 * z * p0 - (j - 1) as f64 * p2) / j as f64;
        }
        (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
    };
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(z);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Product quadrature on the unit sphere split into the four (ξ, η) quadrants.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    /// 1: ξ>0,η>0  2: ξ<0,η>0  3: ξ<0,η<0  4: ξ>0,η<0
    pub quadrant: Vec<u8>,
    pub n_polar: usize,
    pub n_azimuth: usize,
}

impl SphereQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// ∫ f dΩ restricted to the nodes accepted by `keep`.
    pub fn integrate<F, K>(&self, f: F, keep: K) -> f64
    where
        F: Fn([f64; 3]) -> f64,
        K: Fn(u8) -> bool,
    {
        self.nodes
            .iter()
            .zip(&self.weights)
            .zip(&self.quadrant)
            .filter(|(_, q)| keep(**q))
            .map(|((n, w), _)| w * f(*n))
            .sum()
    }
}

/// Sizes of the product rule used for basis order `n`.
pub fn quadrature_sizes(n: usize) -> (usize, usize) {
    (2 * n + 14, n + 10)
}

/// Gauss–Legendre in the polar angle θ ∈ (0, π) times four azimuthal panels
/// [kπ/2, (k+1)π/2] of Gauss nodes, so quadrant seams are panel endpoints.
pub fn build_quadrature(n: usize) -> SphereQuadrature {
    let (nt, np) = quadrature_sizes(n);
    let (tx, tw) = gauss_legendre(nt);
    let (px, pw) = gauss_legendre(np);
    let mut nodes = Vec::with_capacity(nt * np * 4);
    let mut weights = Vec::with_capacity(nt * np * 4);
    let mut quadrant = Vec::with_capacity(nt * np * 4);
    for panel in 0..4u8 {
        let lo = panel as f64 * PI / 2.0;
        for (u, wu) in px.iter().zip(&pw) {
            let phi = lo + (u + 1.0) * PI / 4.0;
            let wphi = wu * PI / 4.0;
            for (v, wv) in tx.iter().zip(&tw) {
                let theta = (v + 1.0) * PI / 2.0;
                let wt = wv * PI / 2.0 * theta.sin();
                let st = theta.sin();
                nodes.push([st * phi.cos(), st * phi.sin(), theta.cos()]);
                weights.push(wt * wphi);
                quadrant.push(panel + 1);
            }
        }
    }
    SphereQuadrature { nodes, weights, quadrant, n_polar: nt, n_azimuth: np }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    None,
    Sspline,
    Lanczos,
}

impl FilterKind {
    /// f(λ); f(0) = 1.
    pub fn value(self, lambda: f64) -> f64 {
        match self {
            FilterKind::None => 1.0,
            FilterKind::Sspline => 1.0 / (1.0 + lambda.powi(4)),
            FilterKind::Lanczos => {
                if lambda == 0.0 {
                    1.0
                } else {
                    lambda.sin() / lambda
                }
            }
        }
    }

    /// −ln f(λ), evaluated without forming f where a direct form exists.
    pub fn neg_log(self, lambda: f64) -> f64 {
        match self {
            FilterKind::None => 0.0,
            FilterKind::Sspline => lambda.powi(4).ln_1p(),
            FilterKind::Lanczos => -self.value(lambda).ln(),
        }
    }
}

impl std::str::FromStr for FilterKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(FilterKind::None),
            "sspline" => Ok(FilterKind::Sspline),
            "lanczos" => Ok(FilterKind::Lanczos),
            other => Err(Error::Config(format!("unknown filter '{other}'"))),
        }
    }
}

/// Row-compressed rows 1..D of a dense D×D table (the ψ̆ rows), zeros dropped.
#[derive(Debug, Clone)]
pub struct MicroRows {
    row_ptr: Vec<usize>,
    col: Vec<u32>,
    val: Vec<f64>,
}

impl MicroRows {
    fn from_dense(dense: &[f64], d: usize) -> Self {
        let scale = dense.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let cut = 1e-14 * scale;
        let mut row_ptr = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        for r in 1..d {
            for c in 0..d {
                let v = dense[r * d + c];
                if v.abs() > cut {
                    col.push(c as u32);
                    val.push(v);
                }
            }
            row_ptr.push(col.len());
        }
        Self { row_ptr, col, val }
    }

    /// out[r−1] += scale · Σ_c A[r,c] x[c] for r = 1..D.
    #[inline]
    pub fn mul_add(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut acc = 0.0;
            for k in a..b {
                acc += self.val[k] * x[self.col[k] as usize];
            }
            *o += scale * acc;
        }
    }
}

/// Half-range and full-sphere tables for one transport direction (ξ or η).
///
/// `pos` is the half where the direction cosine is positive (⟨·⟩₁,₄ for ξ,
/// ⟨·⟩₁,₂ for η), `neg` the complementary half.
#[derive(Debug, Clone)]
pub struct DirectionTables {
    pub m1_pos: Vec<f64>,
    pub m1_neg: Vec<f64>,
    pub m2_pos: Vec<f64>,
    pub m2_neg: Vec<f64>,
    /// Dense D×D ⟨μψψ′⟩ and ⟨μ²ψψ′⟩ on each half, row-major.
    pub mat1_pos: Vec<f64>,
    pub mat1_neg: Vec<f64>,
    pub mat2_pos: Vec<f64>,
    pub mat2_neg: Vec<f64>,
    pub rows1_pos: MicroRows,
    pub rows1_neg: MicroRows,
    pub rows2_pos: MicroRows,
    pub rows2_neg: MicroRows,
    /// Full-sphere ⟨μψ̆⟩ and ⟨μ²ψ̆⟩ (length D−1).
    pub full1: Vec<f64>,
    pub full2: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct AngularTables {
    pub n: usize,
    pub d: usize,
    pub n_polar: usize,
    pub n_azimuth: usize,
    pub x: DirectionTables,
    pub y: DirectionTables,
    /// Gram matrix ⟨ψψ′⟩ as integrated by the rule (identity up to rounding).
    pub gram: Vec<f64>,
    pub filter: FilterKind,
    /// −ln f(l/(N+1)) per flat index.
    pub filter_diagonal: Vec<f64>,
}

/// Weighted Gram-type product Σ_k w_k B[k,a] B[k,b] over the selected nodes.
fn weighted_gram(basis: &[f64], d: usize, w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for (k, wk) in w.iter().enumerate() {
        if *wk == 0.0 {
            continue;
        }
        let row = &basis[k * d..(k + 1) * d];
        for a in 0..d {
            let s = wk * row[a];
            let o = &mut out[a * d..a * d + d];
            for b in a..d {
                o[b] += s * row[b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            out[a * d + b] = out[b * d + a];
        }
    }
    out
}

fn weighted_sum(basis: &[f64], d: usize, w: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d];
    for (k, wk) in w.iter().enumerate() {
        for a in 0..d {
            out[a] += wk * basis[k * d + a];
        }
    }
    out
}

fn direction_tables(basis: &[f64], d: usize, q: &SphereQuadrature, axis: usize) -> DirectionTables {
    let pos_quadrant = |quad: u8| match axis {
        0 => quad == 1 || quad == 4,
        _ => quad == 1 || quad == 2,
    };
    let weights = |power: i32, pos: bool| -> Vec<f64> {
        q.nodes
            .iter()
            .zip(&q.weights)
            .zip(&q.quadrant)
            .map(|((n, w), qd)| if pos_quadrant(*qd) == pos { w * n[axis].powi(power) } else { 0.0 })
            .collect()
    };
    let (w1p, w1n, w2p, w2n) = (weights(1, true), weights(1, false), weights(2, true), weights(2, false));
    let mat1_pos = weighted_gram(basis, d, &w1p);
    let mat1_neg = weighted_gram(basis, d, &w1n);
    let mat2_pos = weighted_gram(basis, d, &w2p);
    let mat2_neg = weighted_gram(basis, d, &w2n);
    let m1_pos = weighted_sum(basis, d, &w1p);
    let m1_neg = weighted_sum(basis, d, &w1n);
    let m2_pos = weighted_sum(basis, d, &w2p);
    let m2_neg = weighted_sum(basis, d, &w2n);
    let full1: Vec<f64> = (1..d).map(|a| m1_pos[a] + m1_neg[a]).collect();
    let full2: Vec<f64> = (1..d).map(|a| m2_pos[a] + m2_neg[a]).collect();
    DirectionTables {
        rows1_pos: MicroRows::from_dense(&mat1_pos, d),
        rows1_neg: MicroRows::from_dense(&mat1_neg, d),
        rows2_pos: MicroRows::from_dense(&mat2_pos, d),
        rows2_neg: MicroRows::from_dense(&mat2_neg, d),
        m1_pos,
        m1_neg,
        m2_pos,
        m2_neg,
        mat1_pos,
        mat1_neg,
        mat2_pos,
        mat2_neg,
        full1,
        full2,
    }
}

/// Build every table for basis order `n` from quadrature `q`.
pub fn build_tables(n: usize, q: &SphereQuadrature, filter: FilterKind) -> Result<AngularTables> {
    let (nt, np) = quadrature_sizes(n);
    if q.n_polar < nt || q.n_azimuth < np {
        return Err(Error::Config(format!("quadrature too coarse for N = {n}")));
    }
    let d = basis_len(n);
    let mut basis = vec![0.0; q.len() * d];
    for (k, dir) in q.nodes.iter().enumerate() {
        eval_all(n, *dir, &mut basis[k * d..(k + 1) * d]);
    }
    let gram = weighted_gram(&basis, d, &q.weights);
    let filter_diagonal = degrees(n)
        .into_iter()
        .map(|l| filter.neg_log(l as f64 / (n + 1) as f64))
        .collect();
    Ok(AngularTables {
        n,
        d,
        n_polar: q.n_polar,
        n_azimuth: q.n_azimuth,
        x: direction_tables(&basis, d, q, 0),
        y: direction_tables(&basis, d, q, 1),
        gram,
        filter,
        filter_diagonal,
    })
}

impl AngularTables {
    /// Convenience constructor using [`build_quadrature`].
    pub fn new(n: usize, filter: FilterKind) -> Self {
        build_tables(n, &build_quadrature(n), filter).expect("matching quadrature")
    }

    pub fn dir(&self, axis: crate::mesh::Axis) -> &DirectionTables {
        match axis {
            crate::mesh::Axis::X => &self.x,
            crate::mesh::Axis::Y => &self.y,
        }
    }

    const MAGIC: &'static [u8; 8] = b"UGKSTAB1";

    /// Binary dump: magic, u32 N, u32 polar nodes, u32 azimuth nodes per
    /// panel, u8 filter, then the tables as little-endian f64 in a fixed order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(Self::MAGIC);
        for v in [self.n, self.n_polar, self.n_azimuth] {
            out.extend_from_slice(&(v as u32).to_le_bytes());
        }
        out.push(self.filter as u8);
        let mut put = |v: &[f64]| {
            for x in v {
                out.extend_from_slice(&x.to_le_bytes());
            }
        };
        for t in [&self.x, &self.y] {
            for v in [
                &t.m1_pos, &t.m1_neg, &t.m2_pos, &t.m2_neg, &t.mat1_pos, &t.mat1_neg, &t.mat2_pos,
                &t.mat2_neg, &t.full1, &t.full2,
            ] {
                put(v);
            }
        }
        put(&self.gram);
        put(&self.filter_diagonal);
        out
    }
}
