//! One UGKS time step: limiting, source iteration on the macro system, φ/T
//! update and the micro moment update.

pub mod diffusion;
pub mod linear;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::angular::{AngularTables, FilterKind};
use crate::coeffs::{self, interface_sigma, ugks_kernels, PhysicsConstants, TimestepInput, TimestepMode, UgksCoefficients};
use crate::error::{Error, Result};
use crate::fluxes::{self, FaceFluxParts, FluxMode, Side};
use crate::mesh::{Axis, BoundaryCondition, GhostPlan, GhostRule, Grid2D, MomentState, ParitySigns, GHOST};
use crate::recon_limit::{compute_slopes, lambda1, lambda2, CellFaces};

pub use diffusion::{DiffusionSolver, DiffusionState};
pub use linear::{solve_macro, MacroSystem};

/// Opacity law σ = coeff / max(T, floor)^power, specific heat and filter
/// strength of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellMaterial {
    pub sigma_coeff: f64,
    pub sigma_power: f64,
    pub cv: f64,
    pub sigma_f: f64,
}

impl CellMaterial {
    pub fn constant(sigma: f64, cv: f64, sigma_f: f64) -> Self {
        Self { sigma_coeff: sigma, sigma_power: 0.0, cv, sigma_f }
    }

    #[inline]
    pub fn sigma(&self, t: f64, t_floor: f64) -> f64 {
        if self.sigma_power == 0.0 {
            self.sigma_coeff
        } else {
            self.sigma_coeff / t.max(t_floor).powf(self.sigma_power)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: FluxMode,
    /// Apply the λ limiters and reject negative ρ.
    pub positivity: bool,
    /// Linear transport: φ ≡ ρ, κ = 0, no temperature update.
    pub linear: bool,
    pub tol_outer: f64,
    pub max_sweeps: usize,
    /// Temperature floor used when evaluating σ(T).
    pub t_floor: f64,
    /// Assert the M-matrix property and the residual identity each sweep.
    pub check_invariants: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: FluxMode::Full,
            positivity: true,
            linear: false,
            tol_outer: 1e-10,
            max_sweeps: 200,
            t_floor: 1e-6,
            check_invariants: true,
        }
    }
}

pub const CHANGE_FLOOR: f64 = 1e-300;
pub const RESIDUAL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct IterationReport {
    pub sweeps: usize,
    pub linear_iters: Vec<usize>,
    pub final_change: f64,
    /// Minimum λ¹, λ²¹, λ²² over the cells (1 when limiting is off).
    pub min_lambda: [f64; 3],
    pub max_residual: f64,
    pub min_rho: f64,
}

/// Per-cell limiter values of the last step, compact interior order.
#[derive(Debug, Clone, Default)]
pub struct LimiterField {
    pub lambda1: Vec<f64>,
    pub lambda21: Vec<f64>,
    pub lambda22: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
enum Alias {
    Cell(usize),
    Fixed(f64),
    Unused,
}

/// Coefficients, limited data and slopes for one temperature iterate.
struct Prepared {
    sigma: Vec<f64>,
    kappa: Vec<f64>,
    fx: Vec<UgksCoefficients>,
    fy: Vec<UgksCoefficients>,
    full: Vec<f64>,
    sx: Vec<f64>,
    sy: Vec<f64>,
    limiters: LimiterField,
}

pub struct Solver {
    pub grid: Grid2D,
    pub bc: BoundaryCondition,
    pub consts: PhysicsConstants,
    pub tables: Arc<AngularTables>,
    pub config: SolverConfig,
    pub state: MomentState,
    pub time: f64,
    pub steps: usize,
    pub last_report: IterationReport,
    pub last_limiters: LimiterField,
    material: Vec<CellMaterial>,
    plan: GhostPlan,
    parity: ParitySigns,
    active: [bool; 2],
    alias: Vec<Alias>,
}

impl Solver {
    /// `material` is given per interior cell in compact (row-major) order.
    pub fn new(
        grid: Grid2D,
        bc: BoundaryCondition,
        consts: PhysicsConstants,
        n: usize,
        filter: FilterKind,
        material: Vec<CellMaterial>,
        config: SolverConfig,
    ) -> Result<Self> {
        let tables = Arc::new(AngularTables::new(n, filter));
        Self::with_tables(grid, bc, consts, tables, material, config)
    }

    pub fn with_tables(
        grid: Grid2D,
        bc: BoundaryCondition,
        consts: PhysicsConstants,
        tables: Arc<AngularTables>,
        material: Vec<CellMaterial>,
        config: SolverConfig,
    ) -> Result<Self> {
        consts.validate()?;
        if material.len() != grid.n_interior() {
            return Err(Error::Config(format!(
                "material has {} cells, grid has {}",
                material.len(),
                grid.n_interior()
            )));
        }
        for m in &material {
            let ok = m.sigma_coeff >= 0.0 && m.sigma_f >= 0.0 && m.cv > 0.0 && m.sigma_power.is_finite();
            if !ok || !m.sigma_coeff.is_finite() || !m.cv.is_finite() || !m.sigma_f.is_finite() {
                return Err(Error::Config(format!("invalid material {m:?}")));
            }
        }
        if !(config.tol_outer > 0.0 && config.max_sweeps > 0) {
            return Err(Error::Config("tol_outer and max_sweeps must be positive".into()));
        }
        let plan = GhostPlan::new(&grid, &bc, consts.a, consts.c)?;
        let mut mat = vec![material[0]; grid.len()];
        for (p, c) in grid.interior().enumerate() {
            mat[c] = material[p];
        }
        for e in &plan.entries {
            mat[e.dst] = mat[e.src];
        }
        let mut alias = vec![Alias::Unused; grid.len()];
        for (p, c) in grid.interior().enumerate() {
            alias[c] = Alias::Cell(p);
        }
        let compact = |c: usize| -> usize {
            let s = grid.stride();
            grid.compact((c % s) as isize - GHOST as isize, (c / s) as isize - GHOST as isize)
        };
        for e in plan.entries.iter().filter(|e| e.layer == 1) {
            alias[e.dst] = match e.rule {
                GhostRule::Periodic | GhostRule::Mirror(_) => Alias::Cell(compact(e.src)),
                GhostRule::Vacuum => Alias::Fixed(0.0),
                GhostRule::Inflow { rho, .. } => Alias::Fixed(rho),
            };
        }
        let active = [bc.axis_active(&grid, Axis::X), bc.axis_active(&grid, Axis::Y)];
        let n = tables.n;
        Ok(Self {
            state: MomentState::zeros(grid, n),
            parity: ParitySigns::new(n),
            grid,
            bc,
            consts,
            tables,
            config,
            time: 0.0,
            steps: 0,
            last_report: IterationReport::default(),
            last_limiters: LimiterField::default(),
            material: mat,
            plan,
            active,
            alias,
        })
    }

    pub fn active_axes(&self) -> [bool; 2] {
        self.active
    }

    pub fn plan(&self) -> &GhostPlan {
        &self.plan
    }

    pub fn material_at(&self, cell: usize) -> CellMaterial {
        self.material[cell]
    }

    /// Isotropic Planckian initial data I = acT⁴/(4π) from a temperature
    /// profile at cell centres.
    pub fn set_equilibrium(&mut self, temp: impl Fn(f64, f64) -> f64) {
        let (a, c) = (self.consts.a, self.consts.c);
        let g = self.grid;
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                let k = g.idx(i, j);
                let t = temp(g.xc(i), g.yc(j));
                self.state.temp[k] = t;
                self.state.rho[k] = a * c * t.powi(4);
                self.state.phi[k] = self.state.rho[k];
            }
        }
        self.state.micro.iter_mut().for_each(|v| *v = 0.0);
        self.state.fill_ghosts(&self.plan, &self.parity);
    }

    /// Isotropic initial data for the linear model, from a ρ profile.
    pub fn set_isotropic(&mut self, rho: impl Fn(f64, f64) -> f64) {
        let g = self.grid;
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                let k = g.idx(i, j);
                let r = rho(g.xc(i), g.yc(j));
                self.state.rho[k] = r;
                self.state.phi[k] = r;
                self.state.temp[k] = if r > 0.0 { (r / (self.consts.a * self.consts.c)).powf(0.25) } else { 0.0 };
            }
        }
        self.state.micro.iter_mut().for_each(|v| *v = 0.0);
        self.state.fill_ghosts(&self.plan, &self.parity);
    }

    /// Replace the state (e.g. from a checkpoint); ghosts are refilled.
    pub fn set_state(&mut self, state: MomentState, time: f64) -> Result<()> {
        if state.grid != self.grid || state.n != self.tables.n {
            return Err(Error::InvalidState("state does not match solver grid/order".into()));
        }
        self.state = state;
        self.time = time;
        self.state.fill_ghosts(&self.plan, &self.parity);
        Ok(())
    }

    fn cell_sigma(&self, temp: &[f64]) -> Vec<f64> {
        let fl = self.config.t_floor;
        self.material.iter().zip(temp).map(|(m, t)| m.sigma(*t, fl)).collect()
    }

    /// Largest admissible Δt ≤ `cfl_bound` for the current state.
    pub fn max_timestep(&self, mode: TimestepMode, cfl_bound: f64) -> Result<f64> {
        let mut temp = self.state.temp.clone();
        self.fill_temp_ghosts(&mut temp);
        let sigma = self.cell_sigma(&temp);
        let input = TimestepInput { grid: &self.grid, sigma: &sigma, active: self.active, consts: &self.consts };
        coeffs::max_timestep(&input, mode, cfl_bound)
    }

    fn fill_temp_ghosts(&self, t: &mut [f64]) {
        self.plan.fill_scalar(t, |r| match r {
            GhostRule::Inflow { t, .. } => Some(*t),
            _ => None,
        });
    }

    fn faces(&self, axis: Axis) -> impl Iterator<Item = (usize, usize)> + '_ {
        let g = self.grid;
        let (nx, ny) = (g.nx as isize, g.ny as isize);
        let (ni, nj, di, dj) = match axis {
            Axis::X => (nx + 1, ny, 1, 0),
            Axis::Y => (nx, ny + 1, 0, 1),
        };
        (0..nj).flat_map(move |j| (0..ni).map(move |i| (g.idx(i - di, j - dj), g.idx(i, j))))
    }

    fn is_interior(&self, c: usize) -> bool {
        matches!(self.alias[c], Alias::Cell(_)) && {
            let s = self.grid.stride();
            let (i, j) = (c % s, c / s);
            i >= GHOST && j >= GHOST && i < GHOST + self.grid.nx && j < GHOST + self.grid.ny
        }
    }

    /// Coefficients at temperature iterate `temp` (ghosts filled) and the
    /// limited reconstruction of the time-level-n data.
    fn prepare(&self, dt: f64, temp: &[f64], full: &[f64], sx: &[f64], sy: &[f64]) -> Result<Prepared> {
        let g = &self.grid;
        let k = &self.consts;
        let d = self.tables.d;
        let sigma = self.cell_sigma(temp);
        let beta: Vec<f64> = if self.config.linear {
            vec![0.0; g.len()]
        } else {
            self.material.iter().zip(temp).map(|(m, t)| coeffs::beta(*t, k.a, k.c, m.cv)).collect()
        };
        let kappa: Vec<f64> = if self.config.linear {
            vec![0.0; g.len()]
        } else {
            sigma.iter().zip(&beta).map(|(s, b)| coeffs::kappa(dt, k.eps, *b, *s)).collect()
        };
        let mut fx = vec![UgksCoefficients::default(); g.len()];
        let mut fy = vec![UgksCoefficients::default(); g.len()];
        for (axis, store) in [(Axis::X, &mut fx), (Axis::Y, &mut fy)] {
            if !self.active[axis as usize] {
                continue;
            }
            for (l, r) in self.faces(axis) {
                let sf = interface_sigma(sigma[l], sigma[r]);
                let bf = if self.config.linear { 0.0 } else { 0.5 * (beta[l] + beta[r]) };
                let mut co = ugks_kernels(dt, sf, bf, k);
                if self.config.linear {
                    co.kappa = 0.0;
                }
                store[r] = co;
            }
        }
        let mut out_full = full.to_vec();
        let mut out_sx = sx.to_vec();
        let mut out_sy = sy.to_vec();
        let mut limiters = LimiterField::default();
        if self.config.positivity {
            let t = &*self.tables;
            let (sx_step, sy_step) = (g.step(Axis::X), g.step(Axis::Y));
            let n_int = g.n_interior();
            limiters.lambda1.reserve(n_int);
            for c in g.interior() {
                let faces = CellFaces {
                    alpha: [fx[c].alpha, fx[c + sx_step].alpha, fy[c].alpha, fy[c + sy_step].alpha],
                    b_over_alpha: [
                        fx[c].b_over_alpha,
                        fx[c + sx_step].b_over_alpha,
                        fy[c].b_over_alpha,
                        fy[c + sy_step].b_over_alpha,
                    ],
                    dx: g.dx,
                    dy: g.dy,
                    active: self.active,
                };
                let rho = full[c * d] * 2.0 * PI.sqrt();
                let l1 = lambda1(rho, &full[c * d + 1..(c + 1) * d], &faces, t)?;
                if l1 < 1.0 {
                    out_full[c * d + 1..(c + 1) * d].iter_mut().for_each(|v| *v *= l1);
                }
                limiters.lambda1.push(l1);
            }
            let inv = 1.0 / (2.0 * PI.sqrt());
            self.plan.fill_vector(&mut out_full, d, 0, &self.parity, |r| r * inv, None);
            for (axis, slope, dst, fc, step) in
                [(Axis::X, sx, &mut out_sx, &fx, sx_step), (Axis::Y, sy, &mut out_sy, &fy, sy_step)]
            {
                let field = match axis {
                    Axis::X => &mut limiters.lambda21,
                    Axis::Y => &mut limiters.lambda22,
                };
                if !self.active[axis as usize] {
                    field.resize(n_int, 1.0);
                    continue;
                }
                for c in g.interior() {
                    let l2 = lambda2(
                        &out_full[c * d..(c + 1) * d],
                        &slope[c * d..(c + 1) * d],
                        [fc[c].b_over_alpha, fc[c + step].b_over_alpha],
                        g.h(axis),
                        t,
                        axis,
                    )?;
                    if l2 < 1.0 {
                        dst[c * d..(c + 1) * d].iter_mut().for_each(|v| *v *= l2);
                    }
                    field.push(l2);
                }
                self.plan.fill_vector(dst, d, 0, &self.parity, |_| 0.0, Some(axis));
            }
        }
        Ok(Prepared { sigma, kappa, fx, fy, full: out_full, sx: out_sx, sy: out_sy, limiters })
    }

    /// Macro face fluxes of one axis with κφⁿ from `kphi`.
    fn macro_faces(&self, p: &Prepared, axis: Axis, kphi: &[f64]) -> Vec<(usize, usize, FaceFluxParts<f64>)> {
        let d = self.tables.d;
        let h = self.grid.h(axis);
        let slopes = match axis {
            Axis::X => &p.sx,
            Axis::Y => &p.sy,
        };
        let co_store = match axis {
            Axis::X => &p.fx,
            Axis::Y => &p.fy,
        };
        let side = |c: usize| Side { full: &p.full[c * d..(c + 1) * d], slope: &slopes[c * d..(c + 1) * d] };
        self.faces(axis)
            .map(|(l, r)| {
                let parts = fluxes::macro_flux(
                    &self.tables,
                    axis,
                    side(l),
                    side(r),
                    [kphi[l], kphi[r]],
                    &co_store[r],
                    h,
                    self.config.mode,
                );
                (l, r, parts)
            })
            .collect()
    }

    fn couple(&self, sys: &mut MacroSystem, p: usize, slot: usize, nb: usize, coef: f64) {
        match self.alias[nb] {
            Alias::Cell(q) => sys.couple(p, slot, q, coef),
            Alias::Fixed(v) => sys.rhs_i[p] -= coef * v,
            Alias::Unused => unreachable!("face neighbour outside the first ghost layer"),
        }
    }

    fn assemble(
        &self,
        dt: f64,
        p: &Prepared,
        rho_n: &[f64],
        phi_n: &[f64],
        faces: &[(Axis, Vec<(usize, usize, FaceFluxParts<f64>)>)],
    ) -> MacroSystem {
        let g = &self.grid;
        let k = &self.consts;
        let mut sys = MacroSystem::new(g.n_interior());
        for (q, c) in g.interior().enumerate() {
            let ex = p.sigma[c] * k.c * dt / (k.eps * k.eps) * p.kappa[c];
            sys.diag[q] = 1.0 + ex;
            sys.rhs_i[q] = rho_n[c];
            sys.rhs_phi[q] = ex * phi_n[c];
        }
        for (axis, list) in faces {
            let f = dt / g.h(*axis);
            let (lo_slot, hi_slot) = match axis {
                Axis::X => (0, 1),
                Axis::Y => (2, 3),
            };
            for (l, r, parts) in list {
                let [r0, r1] = parts.rho_coupling;
                if let Alias::Cell(q) = self.alias[*r] {
                    if self.is_interior(*r) {
                        sys.rhs_i[q] += f * parts.from_in;
                        sys.rhs_phi[q] += f * parts.from_phin;
                        sys.diag[q] -= f * r1;
                        self.couple(&mut sys, q, lo_slot, *l, -f * r0);
                    }
                }
                if let Alias::Cell(q) = self.alias[*l] {
                    if self.is_interior(*l) {
                        sys.rhs_i[q] -= f * parts.from_in;
                        sys.rhs_phi[q] -= f * parts.from_phin;
                        sys.diag[q] += f * r0;
                        self.couple(&mut sys, q, hi_slot, *r, f * r1);
                    }
                }
            }
        }
        sys
    }

    /// Macro residual identity evaluated from the face fluxes, independent of
    /// the assembled matrix. Returns the max relative residual.
    fn residual_identity(
        &self,
        dt: f64,
        p: &Prepared,
        rho_n: &[f64],
        phi_n: &[f64],
        rho_new: &[f64],
        faces: &[(Axis, Vec<(usize, usize, FaceFluxParts<f64>)>)],
    ) -> f64 {
        let g = &self.grid;
        let k = &self.consts;
        let mut res = vec![0.0; g.len()];
        let mut scale = vec![0.0f64; g.len()];
        for c in g.interior() {
            let ex = p.sigma[c] * k.c * dt / (k.eps * k.eps) * p.kappa[c];
            res[c] = rho_new[c] - rho_n[c] - ex * (phi_n[c] - rho_new[c]);
            scale[c] = rho_new[c].abs() + rho_n[c].abs() + ex * (phi_n[c].abs() + rho_new[c].abs());
        }
        for (axis, list) in faces {
            let f = dt / g.h(*axis);
            for (l, r, parts) in list {
                let flux = f * parts.total(rho_new[*l], rho_new[*r]);
                let mag = f
                    * (parts.from_in.abs()
                        + parts.from_phin.abs()
                        + (parts.rho_coupling[0] * rho_new[*l]).abs()
                        + (parts.rho_coupling[1] * rho_new[*r]).abs());
                // cell r gains the flux, cell l loses it
                res[*r] -= flux;
                scale[*r] += mag;
                res[*l] += flux;
                scale[*l] += mag;
            }
        }
        let smax = g.interior().map(|c| scale[c]).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        g.interior().map(|c| res[c].abs()).fold(0.0, f64::max) / smax
    }

    /// Advance the state by `dt`.
    pub fn advance(&mut self, dt: f64) -> Result<IterationReport> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidState(format!("time step {dt}")));
        }
        let g = self.grid;
        let k = self.consts;
        let d = self.tables.d;
        let m = d - 1;
        let cfg = self.config;
        self.state.fill_ghosts(&self.plan, &self.parity);

        // time-level-n data with slopes
        let inv = 1.0 / (2.0 * PI.sqrt());
        let mut full = vec![0.0; g.len() * d];
        for c in 0..g.len() {
            full[c * d] = self.state.rho[c] * inv;
            full[c * d + 1..(c + 1) * d].copy_from_slice(&self.state.micro[c * m..(c + 1) * m]);
        }
        let mut sx = vec![0.0; g.len() * d];
        let mut sy = vec![0.0; g.len() * d];
        for (axis, s) in [(Axis::X, &mut sx), (Axis::Y, &mut sy)] {
            if self.active[axis as usize] {
                compute_slopes(&full, d, &g, axis, s);
                self.plan.fill_vector(s, d, 0, &self.parity, |_| 0.0, Some(axis));
            }
        }

        let rho_n = self.state.rho.clone();
        let phi_n = self.state.phi.clone();
        let mut temp = self.state.temp.clone();
        let mut rho_it = rho_n.clone();
        let mut phi_it = phi_n.clone();
        let mut report = IterationReport { min_lambda: [1.0; 3], ..Default::default() };
        let mut prepared = self.prepare(dt, &temp, &full, &sx, &sy)?;
        let mut converged = false;
        for sweep in 0..cfg.max_sweeps {
            let kphi: Vec<f64> = prepared.kappa.iter().zip(&phi_n).map(|(a, b)| a * b).collect();
            let mut faces = Vec::new();
            for axis in [Axis::X, Axis::Y] {
                if self.active[axis as usize] {
                    faces.push((axis, self.macro_faces(&prepared, axis, &kphi)));
                }
            }
            let sys = self.assemble(dt, &prepared, &rho_n, &phi_n, &faces);
            if cfg.check_invariants {
                sys.check_m_matrix()?;
            }
            let (sol, iters) = solve_macro(&sys)?;
            report.linear_iters.push(iters);
            report.sweeps = sweep + 1;
            let mut rho_new = rho_it.clone();
            for (q, c) in g.interior().enumerate() {
                rho_new[c] = sol[q];
            }
            self.plan.fill_rho(&mut rho_new);
            if cfg.check_invariants {
                let r = self.residual_identity(dt, &prepared, &rho_n, &phi_n, &rho_new, &faces);
                report.max_residual = report.max_residual.max(r);
                if r > RESIDUAL_TOL {
                    return Err(Error::Invariant(format!("macro residual identity violated: {r:e}")));
                }
            }
            let min_rho = g.interior().map(|c| rho_new[c]).fold(f64::INFINITY, f64::min);
            if cfg.positivity && min_rho < 0.0 {
                return Err(Error::Invariant(format!("negative rho {min_rho:e} with limiters on")));
            }
            let mut change = 0.0f64;
            let mut phi_new = phi_it.clone();
            for c in g.interior() {
                phi_new[c] = if cfg.linear {
                    rho_new[c]
                } else {
                    prepared.kappa[c] * phi_n[c] + (1.0 - prepared.kappa[c]) * rho_new[c]
                };
                change = change
                    .max((rho_new[c] - rho_it[c]).abs() / (rho_new[c].abs() + CHANGE_FLOOR))
                    .max((phi_new[c] - phi_it[c]).abs() / (phi_new[c].abs() + CHANGE_FLOOR));
            }
            rho_it = rho_new;
            phi_it = phi_new;
            for l in [&prepared.limiters.lambda1, &prepared.limiters.lambda21, &prepared.limiters.lambda22]
                .iter()
                .enumerate()
            {
                let mn = l.1.iter().copied().fold(1.0, f64::min);
                report.min_lambda[l.0] = report.min_lambda[l.0].min(mn);
            }
            if cfg.linear {
                // coefficients do not depend on the iterate: one sweep is exact
                report.final_change = 0.0;
                converged = true;
                break;
            }
            let ac = k.a * k.c;
            for c in g.interior() {
                temp[c] = (phi_it[c].max(0.0) / ac).powf(0.25);
            }
            self.fill_temp_ghosts(&mut temp);
            report.final_change = change;
            prepared = self.prepare(dt, &temp, &full, &sx, &sy)?;
            if change <= cfg.tol_outer {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::SourceIteration { sweeps: report.sweeps, change: report.final_change });
        }

        // micro update with coefficients at T^{n+1}
        let kphi: Vec<f64> = prepared.kappa.iter().zip(&phi_n).map(|(a, b)| a * b).collect();
        let mut div = vec![0.0; g.n_interior() * m];
        let mut scratch = vec![0.0; d];
        let mut flux = vec![0.0; m];
        let t = &*self.tables;
        for axis in [Axis::X, Axis::Y] {
            if !self.active[axis as usize] {
                continue;
            }
            let h = g.h(axis);
            let f = dt / h;
            let (slopes, co_store) = match axis {
                Axis::X => (&prepared.sx, &prepared.fx),
                Axis::Y => (&prepared.sy, &prepared.fy),
            };
            let dtab = t.dir(axis);
            for (l, r) in self.faces(axis) {
                let co = &co_store[r];
                flux.iter_mut().for_each(|v| *v = 0.0);
                let sl = Side { full: &prepared.full[l * d..(l + 1) * d], slope: &slopes[l * d..(l + 1) * d] };
                let sr = Side { full: &prepared.full[r * d..(r + 1) * d], slope: &slopes[r * d..(r + 1) * d] };
                fluxes::micro_pos(dtab, sl, h, co.alpha, co.b, cfg.mode, &mut scratch, &mut flux);
                fluxes::micro_neg(dtab, sr, h, co.alpha, co.b, cfg.mode, &mut scratch, &mut flux);
                let ((p1, p2), rw) = fluxes::micro_source_weights(co, [kphi[l], kphi[r]], h, cfg.mode);
                let w1 = p1 + rw[0].0 * rho_it[l] + rw[1].0 * rho_it[r];
                let w2 = p2 + rw[0].1 * rho_it[l] + rw[1].1 * rho_it[r];
                for q in 0..m {
                    flux[q] += w1 * dtab.full1[q] + w2 * dtab.full2[q];
                }
                if self.is_interior(r) {
                    if let Alias::Cell(q) = self.alias[r] {
                        for (dv, fv) in div[q * m..(q + 1) * m].iter_mut().zip(&flux) {
                            *dv += f * fv;
                        }
                    }
                }
                if self.is_interior(l) {
                    if let Alias::Cell(q) = self.alias[l] {
                        for (dv, fv) in div[q * m..(q + 1) * m].iter_mut().zip(&flux) {
                            *dv -= f * fv;
                        }
                    }
                }
            }
        }
        let filt = &t.filter_diagonal;
        for (q, c) in g.interior().enumerate() {
            let base = 1.0 + prepared.sigma[c] * k.c * dt / (k.eps * k.eps);
            let sf = self.material[c].sigma_f;
            for a in 0..m {
                let num = prepared.full[c * d + 1 + a] + div[q * m + a];
                self.state.micro[c * m + a] = num / (base + dt * sf * filt[1 + a]);
            }
        }
        for c in g.interior() {
            self.state.rho[c] = rho_it[c];
            self.state.phi[c] = phi_it[c];
            if !cfg.linear {
                self.state.temp[c] = temp[c];
            }
        }
        report.min_rho = self.state.min_interior(&self.state.rho);
        self.state.fill_ghosts(&self.plan, &self.parity);
        self.time += dt;
        self.steps += 1;
        self.last_limiters = prepared.limiters;
        self.last_report = report.clone();
        Ok(report)
    }
}
