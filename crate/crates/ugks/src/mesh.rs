//! Structured grid with two ghost layers, moment-state storage and boundary
//! conditions.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::angular::{basis_len, BasisIndex};
use crate::error::{Error, Result};

pub const GHOST: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Grid2D {
    /// Uniform grid covering [x0, x1] × [y0, y1].
    pub fn new(nx: usize, ny: usize, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) -> Result<Self> {
        if nx == 0 || ny == 0 || !(x1 > x0) || !(y1 > y0) {
            return Err(Error::Config(format!("bad grid {nx}x{ny} on [{x0},{x1}]x[{y0},{y1}]")));
        }
        Ok(Self { nx, ny, dx: (x1 - x0) / nx as f64, dy: (y1 - y0) / ny as f64, x0, y0 })
    }

    pub fn stride(&self) -> usize {
        self.nx + 2 * GHOST
    }

    /// Number of stored cells including ghosts.
    pub fn len(&self) -> usize {
        self.stride() * (self.ny + 2 * GHOST)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_interior(&self) -> usize {
        self.nx * self.ny
    }

    /// Storage index of cell (i, j); i ∈ [−2, nx+1], j ∈ [−2, ny+1].
    #[inline]
    pub fn idx(&self, i: isize, j: isize) -> usize {
        (j + GHOST as isize) as usize * self.stride() + (i + GHOST as isize) as usize
    }

    /// Storage offset between neighbours along `axis`.
    #[inline]
    pub fn step(&self, axis: Axis) -> usize {
        match axis {
            Axis::X => 1,
            Axis::Y => self.stride(),
        }
    }

    pub fn h(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.dx,
            Axis::Y => self.dy,
        }
    }

    pub fn xc(&self, i: isize) -> f64 {
        self.x0 + (i as f64 + 0.5) * self.dx
    }

    pub fn yc(&self, j: isize) -> f64 {
        self.y0 + (j as f64 + 0.5) * self.dy
    }

    pub fn x1(&self) -> f64 {
        self.x0 + self.nx as f64 * self.dx
    }

    pub fn y1(&self) -> f64 {
        self.y0 + self.ny as f64 * self.dy
    }

    /// Storage indices of interior cells in row-major (j outer) order.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.ny as isize).flat_map(move |j| (0..self.nx as isize).map(move |i| self.idx(i, j)))
    }

    /// Position of a storage index in the compact interior numbering.
    pub fn compact(&self, i: isize, j: isize) -> usize {
        j as usize * self.nx + i as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeKind {
    Vacuum,
    /// Isotropic incoming Planckian at temperature `t_b`.
    Planckian { t_b: f64 },
    /// Isotropic incoming intensity (used by the linear problems).
    Isotropic { intensity: f64 },
    Periodic,
    Reflective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    /// Extent along the edge in physical coordinates.
    pub lo: f64,
    pub hi: f64,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    West,
    East,
    South,
    North,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    pub west: Vec<Segment>,
    pub east: Vec<Segment>,
    pub south: Vec<Segment>,
    pub north: Vec<Segment>,
}

impl BoundaryCondition {
    /// Same kind on every edge; segments span the whole edge.
    pub fn uniform(kind: EdgeKind) -> Self {
        Self::per_edge(kind, kind, kind, kind)
    }

    pub fn per_edge(west: EdgeKind, east: EdgeKind, south: EdgeKind, north: EdgeKind) -> Self {
        let whole = |kind| vec![Segment { lo: f64::NEG_INFINITY, hi: f64::INFINITY, kind }];
        Self { west: whole(west), east: whole(east), south: whole(south), north: whole(north) }
    }

    /// A 1-D slab: given x edges, reflective top and bottom.
    pub fn slab(west: EdgeKind, east: EdgeKind) -> Self {
        Self::per_edge(west, east, EdgeKind::Reflective, EdgeKind::Reflective)
    }

    pub fn edge(&self, e: Edge) -> &[Segment] {
        match e {
            Edge::West => &self.west,
            Edge::East => &self.east,
            Edge::South => &self.south,
            Edge::North => &self.north,
        }
    }

    /// Kind of the segment containing coordinate `s` along edge `e`.
    pub fn kind_at(&self, e: Edge, s: f64) -> Result<EdgeKind> {
        self.edge(e)
            .iter()
            .find(|seg| s >= seg.lo && s < seg.hi)
            .map(|seg| seg.kind)
            .ok_or_else(|| Error::Config(format!("no boundary segment covers {s} on {e:?}")))
    }

    fn all_kind(&self, e: Edge, pred: impl Fn(&EdgeKind) -> bool) -> bool {
        self.edge(e).iter().all(|s| pred(&s.kind))
    }

    fn any_kind(&self, e: Edge, pred: impl Fn(&EdgeKind) -> bool) -> bool {
        self.edge(e).iter().any(|s| pred(&s.kind))
    }

    pub fn validate(&self, grid: &Grid2D) -> Result<()> {
        for e in [Edge::West, Edge::East, Edge::South, Edge::North] {
            let mut segs: Vec<_> = self.edge(e).to_vec();
            if segs.is_empty() {
                return Err(Error::Config(format!("edge {e:?} has no segments")));
            }
            segs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            for w in segs.windows(2) {
                if w[0].hi != w[1].lo {
                    return Err(Error::Config(format!("segments on {e:?} overlap or leave a gap")));
                }
            }
            let (lo, hi) = match e {
                Edge::West | Edge::East => (grid.y0, grid.y1()),
                _ => (grid.x0, grid.x1()),
            };
            if segs[0].lo > lo || segs[segs.len() - 1].hi < hi {
                return Err(Error::Config(format!("segments do not cover edge {e:?}")));
            }
        }
        let periodic = |k: &EdgeKind| matches!(k, EdgeKind::Periodic);
        for (a, b) in [(Edge::West, Edge::East), (Edge::South, Edge::North)] {
            let pa = self.any_kind(a, periodic);
            let pb = self.any_kind(b, periodic);
            if (pa || pb) && !(self.all_kind(a, periodic) && self.all_kind(b, periodic)) {
                return Err(Error::Config(format!("periodic boundary on {a:?} must pair with {b:?}")));
            }
        }
        Ok(())
    }

    /// Whether transport along `axis` is resolved. A single-cell direction
    /// closed by reflective walls carries no net flux and is skipped.
    pub fn axis_active(&self, grid: &Grid2D, axis: Axis) -> bool {
        let refl = |k: &EdgeKind| matches!(k, EdgeKind::Reflective);
        match axis {
            Axis::X => !(grid.nx == 1 && self.all_kind(Edge::West, refl) && self.all_kind(Edge::East, refl)),
            Axis::Y => !(grid.ny == 1 && self.all_kind(Edge::South, refl) && self.all_kind(Edge::North, refl)),
        }
    }
}

/// Sign of ψ_a under ξ → −ξ (`Axis::X`) or η → −η (`Axis::Y`). The map is a
/// pure sign flip per flat index (a signed identity permutation).
pub fn parity_signs(n: usize, axis: Axis) -> Vec<f64> {
    (0..basis_len(n))
        .map(|k| {
            let b = BasisIndex::from_flat(k);
            let odd_m = b.m.unsigned_abs() % 2 == 1;
            match axis {
                // ϕ → π − ϕ: cos(mϕ) ↦ (−1)^m cos, sin(mϕ) ↦ −(−1)^m sin
                Axis::X => {
                    let s = if odd_m { -1.0 } else { 1.0 };
                    if b.m < 0 {
                        -s
                    } else {
                        s
                    }
                }
                // ϕ → −ϕ
                Axis::Y => {
                    if b.m < 0 {
                        -1.0
                    } else {
                        1.0
                    }
                }
            }
        })
        .collect()
}

pub fn parity_map_x(n: usize) -> Vec<(usize, f64)> {
    parity_signs(n, Axis::X).into_iter().enumerate().collect()
}

pub fn parity_map_y(n: usize) -> Vec<(usize, f64)> {
    parity_signs(n, Axis::Y).into_iter().enumerate().collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GhostRule {
    Periodic,
    Mirror(Axis),
    Vacuum,
    Inflow { rho: f64, phi: f64, t: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct GhostEntry {
    pub dst: usize,
    /// Wrapped or mirrored source for periodic/mirror, adjacent interior
    /// cell otherwise.
    pub src: usize,
    pub rule: GhostRule,
    /// Ghost layer (1 = touching the boundary face).
    pub layer: usize,
}

/// Resolved ghost-cell sources for a (grid, boundary) pair.
#[derive(Debug, Clone)]
pub struct GhostPlan {
    pub entries: Vec<GhostEntry>,
}

impl GhostPlan {
    pub fn new(grid: &Grid2D, bc: &BoundaryCondition, a: f64, c: f64) -> Result<Self> {
        bc.validate(grid)?;
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let inflow = |kind: EdgeKind| -> GhostRule {
            match kind {
                EdgeKind::Planckian { t_b } => {
                    let rho = a * c * t_b.powi(4);
                    GhostRule::Inflow { rho, phi: rho, t: t_b }
                }
                EdgeKind::Isotropic { intensity } => {
                    let rho = 4.0 * PI * intensity;
                    GhostRule::Inflow { rho, phi: rho, t: (rho / (a * c)).powf(0.25) }
                }
                EdgeKind::Vacuum => GhostRule::Vacuum,
                _ => unreachable!(),
            }
        };
        let mut entries = Vec::new();
        for k in 1..=GHOST as isize {
            for j in 0..ny {
                for (edge, gi, periodic_src, mirror_src, adj) in [
                    (Edge::West, -k, nx - k, k - 1, 0),
                    (Edge::East, nx - 1 + k, k - 1, nx - k, nx - 1),
                ] {
                    let kind = bc.kind_at(edge, grid.yc(j))?;
                    let (src, rule) = match kind {
                        EdgeKind::Periodic => (grid.idx(periodic_src.rem_euclid(nx), j), GhostRule::Periodic),
                        EdgeKind::Reflective => (grid.idx(mirror_src.clamp(0, nx - 1), j), GhostRule::Mirror(Axis::X)),
                        other => (grid.idx(adj, j), inflow(other)),
                    };
                    entries.push(GhostEntry { dst: grid.idx(gi, j), src, rule, layer: k as usize });
                }
            }
            for i in 0..nx {
                for (edge, gj, periodic_src, mirror_src, adj) in [
                    (Edge::South, -k, ny - k, k - 1, 0),
                    (Edge::North, ny - 1 + k, k - 1, ny - k, ny - 1),
                ] {
                    let kind = bc.kind_at(edge, grid.xc(i))?;
                    let (src, rule) = match kind {
                        EdgeKind::Periodic => (grid.idx(i, periodic_src.rem_euclid(ny)), GhostRule::Periodic),
                        EdgeKind::Reflective => (grid.idx(i, mirror_src.clamp(0, ny - 1)), GhostRule::Mirror(Axis::Y)),
                        other => (grid.idx(i, adj), inflow(other)),
                    };
                    entries.push(GhostEntry { dst: grid.idx(i, gj), src, rule, layer: k as usize });
                }
            }
        }
        Ok(Self { entries })
    }

    /// Scalar material-like field: copied from the source/adjacent cell.
    pub fn fill_copy(&self, f: &mut [f64]) {
        for e in &self.entries {
            f[e.dst] = f[e.src];
        }
    }

    /// φ or T: copied except at inflow edges where the boundary value is set.
    pub fn fill_scalar(&self, f: &mut [f64], pick: impl Fn(&GhostRule) -> Option<f64>) {
        for e in &self.entries {
            f[e.dst] = pick(&e.rule).unwrap_or(f[e.src]);
        }
    }

    /// ρ-like field: zero at vacuum, boundary value at inflow.
    pub fn fill_rho(&self, f: &mut [f64]) {
        for e in &self.entries {
            f[e.dst] = match e.rule {
                GhostRule::Periodic | GhostRule::Mirror(_) => f[e.src],
                GhostRule::Vacuum => 0.0,
                GhostRule::Inflow { rho, .. } => rho,
            };
        }
    }

    /// Vector field with `m` components per cell.
    ///
    /// `first` is the flat basis index of component 0 (0 for full moment
    /// vectors, 1 for micro vectors); `inflow0` gives component 0 at inflow
    /// edges; `slope_axis` marks a derivative along that axis, which flips
    /// sign under a mirror across the same axis.
    pub fn fill_vector(
        &self,
        f: &mut [f64],
        m: usize,
        first: usize,
        parity: &ParitySigns,
        inflow0: impl Fn(f64) -> f64,
        slope_axis: Option<Axis>,
    ) {
        for e in &self.entries {
            let (d, s) = (e.dst * m, e.src * m);
            match e.rule {
                GhostRule::Periodic => f.copy_within(s..s + m, d),
                GhostRule::Mirror(ax) => {
                    let signs = parity.get(ax);
                    let flip = if slope_axis == Some(ax) { -1.0 } else { 1.0 };
                    for k in 0..m {
                        f[d + k] = flip * signs[first + k] * f[s + k];
                    }
                }
                GhostRule::Vacuum => f[d..d + m].iter_mut().for_each(|v| *v = 0.0),
                GhostRule::Inflow { rho, .. } => {
                    f[d..d + m].iter_mut().for_each(|v| *v = 0.0);
                    if first == 0 && slope_axis.is_none() {
                        f[d] = inflow0(rho);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParitySigns {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl ParitySigns {
    pub fn new(n: usize) -> Self {
        Self { x: parity_signs(n, Axis::X), y: parity_signs(n, Axis::Y) }
    }

    pub fn get(&self, axis: Axis) -> &[f64] {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }
}

/// Radiation moments and material state on a grid (ghosts included).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentState {
    pub grid: Grid2D,
    /// Basis order N.
    pub n: usize,
    pub rho: Vec<f64>,
    /// (N+1)²−1 moments per cell, flat indices 1.. of the basis.
    pub micro: Vec<f64>,
    pub temp: Vec<f64>,
    pub phi: Vec<f64>,
}

impl MomentState {
    pub fn zeros(grid: Grid2D, n: usize) -> Self {
        let len = grid.len();
        Self {
            grid,
            n,
            rho: vec![0.0; len],
            micro: vec![0.0; len * (basis_len(n) - 1)],
            temp: vec![0.0; len],
            phi: vec![0.0; len],
        }
    }

    pub fn n_micro(&self) -> usize {
        basis_len(self.n) - 1
    }

    pub fn micro_at(&self, cell: usize) -> &[f64] {
        let m = self.n_micro();
        &self.micro[cell * m..(cell + 1) * m]
    }

    /// Full moment vector I⃗ = (ρ/(2√π), İ) of one cell.
    pub fn full_vector(&self, cell: usize, out: &mut [f64]) {
        out[0] = self.rho[cell] / (2.0 * PI.sqrt());
        out[1..].copy_from_slice(self.micro_at(cell));
    }

    /// Populate ghost cells of every field.
    pub fn fill_ghosts(&mut self, plan: &GhostPlan, parity: &ParitySigns) {
        plan.fill_rho(&mut self.rho);
        plan.fill_scalar(&mut self.phi, |r| match r {
            GhostRule::Inflow { phi, .. } => Some(*phi),
            _ => None,
        });
        plan.fill_scalar(&mut self.temp, |r| match r {
            GhostRule::Inflow { t, .. } => Some(*t),
            _ => None,
        });
        let m = self.n_micro();
        plan.fill_vector(&mut self.micro, m, 1, parity, |_| 0.0, None);
    }

    pub fn min_interior(&self, f: &[f64]) -> f64 {
        self.grid.interior().map(|c| f[c]).fold(f64::INFINITY, f64::min)
    }
}

/// Convenience: build the plan and fill ghosts in one call.
pub fn fill_ghosts(state: &mut MomentState, bc: &BoundaryCondition, a: f64, c: f64) -> Result<()> {
    let plan = GhostPlan::new(&state.grid, bc, a, c)?;
    state.fill_ghosts(&plan, &ParitySigns::new(state.n));
    Ok(())
}
