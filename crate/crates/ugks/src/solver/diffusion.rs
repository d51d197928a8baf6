//! Backward-Euler reference integrator for the diffusion limit
//! C_v ∂T/∂t + a ∂T⁴/∂t = ∇·(ac/3σ)∇T⁴, and its linear counterpart
//! ∂ρ/∂t = ∇·(c/3σ)∇ρ.

use crate::coeffs::{interface_sigma, PhysicsConstants};
use crate::error::{Error, Result};
use crate::mesh::{Axis, BoundaryCondition, GhostPlan, GhostRule, Grid2D, GHOST};

use super::linear::{solve_macro, MacroSystem};
use super::CellMaterial;

const NEWTON_TOL: f64 = 1e-10;
const NEWTON_CAP: usize = 100;

/// T (nonlinear) or ρ (linear) on the ghosted grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionState {
    pub field: Vec<f64>,
    pub time: f64,
}

pub struct DiffusionSolver {
    pub grid: Grid2D,
    pub consts: PhysicsConstants,
    pub linear: bool,
    pub t_floor: f64,
    material: Vec<CellMaterial>,
    plan: GhostPlan,
}

#[derive(Clone, Copy)]
enum Nb {
    Cell(usize),
    Fixed(f64),
}

impl DiffusionSolver {
    pub fn new(
        grid: Grid2D,
        bc: &BoundaryCondition,
        consts: PhysicsConstants,
        material: Vec<CellMaterial>,
        linear: bool,
        t_floor: f64,
    ) -> Result<Self> {
        if material.len() != grid.n_interior() {
            return Err(Error::Config("material size does not match grid".into()));
        }
        if material.iter().any(|m| !(m.sigma_coeff > 0.0)) {
            return Err(Error::Config("diffusion reference needs a positive opacity everywhere".into()));
        }
        let plan = GhostPlan::new(&grid, bc, consts.a, consts.c)?;
        let mut mat = vec![material[0]; grid.len()];
        for (p, c) in grid.interior().enumerate() {
            mat[c] = material[p];
        }
        for e in &plan.entries {
            mat[e.dst] = mat[e.src];
        }
        Ok(Self { grid, consts, linear, t_floor, material: mat, plan })
    }

    pub fn state_from(&self, f: impl Fn(f64, f64) -> f64) -> DiffusionState {
        let g = self.grid;
        let mut field = vec![0.0; g.len()];
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                field[g.idx(i, j)] = f(g.xc(i), g.yc(j));
            }
        }
        DiffusionState { field, time: 0.0 }
    }

    fn compact(&self, c: usize) -> usize {
        let s = self.grid.stride();
        self.grid.compact((c % s) as isize - GHOST as isize, (c / s) as isize - GHOST as isize)
    }

    /// Ghost values of the unknown (ρ or T⁴) and of T for the conductivity.
    fn neighbours(&self) -> Vec<Option<(Nb, Option<f64>)>> {
        let mut out = vec![None; self.grid.len()];
        let ac = self.consts.a * self.consts.c;
        for e in self.plan.entries.iter().filter(|e| e.layer == 1) {
            out[e.dst] = Some(match e.rule {
                GhostRule::Periodic | GhostRule::Mirror(_) => (Nb::Cell(e.src), None),
                GhostRule::Vacuum => (Nb::Fixed(0.0), None),
                GhostRule::Inflow { rho, t, .. } => {
                    (Nb::Fixed(if self.linear { rho } else { rho / ac }), Some(t))
                }
            });
        }
        out
    }

    fn sigma(&self, cell: usize, t: f64) -> f64 {
        self.material[cell].sigma(t, self.t_floor)
    }

    /// Face conductivity from the harmonic-mean face opacity, the same face
    /// rule as the kinetic scheme (an arithmetic mean of the cell K values).
    fn face_conductivity(&self, sigma_l: f64, sigma_r: f64) -> f64 {
        let k = &self.consts;
        let base = if self.linear { k.c } else { k.a * k.c };
        let sf = interface_sigma(sigma_l, sigma_r);
        if sf > 0.0 {
            base / (3.0 * sf)
        } else {
            0.0
        }
    }

    /// Assemble I·diag_extra + Δt·L with lagged conductivities; `u` holds the
    /// current unknown on interior cells, `t` the temperature for K.
    fn laplacian(&self, dt: f64, t: &[f64], diag_extra: &[f64]) -> (MacroSystem, Vec<f64>) {
        let g = &self.grid;
        let nbs = self.neighbours();
        let mut sys = MacroSystem::new(g.n_interior());
        let mut fixed = vec![0.0; g.n_interior()];
        for (p, c) in g.interior().enumerate() {
            sys.diag[p] = diag_extra[p];
            let sc = self.sigma(c, t[c]);
            for (slot, axis, off) in [
                (0usize, Axis::X, -(g.step(Axis::X) as isize)),
                (1, Axis::X, g.step(Axis::X) as isize),
                (2, Axis::Y, -(g.step(Axis::Y) as isize)),
                (3, Axis::Y, g.step(Axis::Y) as isize),
            ] {
                let nb = (c as isize + off) as usize;
                let (target, t_nb) = match nbs[nb] {
                    None => (Nb::Cell(nb), t[nb]),
                    Some((Nb::Cell(src), _)) => (Nb::Cell(src), t[src]),
                    Some((fixed_v, tb)) => (fixed_v, tb.unwrap_or(t[c])),
                };
                let kf = self.face_conductivity(sc, self.sigma(nb, t_nb));
                let w = dt * kf / (g.h(axis) * g.h(axis));
                if w == 0.0 {
                    continue;
                }
                sys.diag[p] += w;
                match target {
                    Nb::Cell(src) => sys.couple(p, slot, self.compact(src), -w),
                    Nb::Fixed(v) => fixed[p] += w * v,
                }
            }
        }
        (sys, fixed)
    }

    /// One backward-Euler step; returns the Newton iteration count.
    pub fn step(&self, state: &mut DiffusionState, dt: f64) -> Result<usize> {
        let g = self.grid;
        if self.linear {
            let t = vec![0.0; g.len()];
            let (mut sys, fixed) = self.laplacian(dt, &t, &vec![1.0; g.n_interior()]);
            for (p, c) in g.interior().enumerate() {
                sys.rhs_i[p] = state.field[c] + fixed[p];
            }
            let (x, _) = solve_macro(&sys)?;
            for (p, c) in g.interior().enumerate() {
                state.field[c] = x[p];
            }
            state.time += dt;
            return Ok(1);
        }
        let a = self.consts.a;
        let t_old = state.field.clone();
        let mut t = state.field.clone();
        let mut u: Vec<f64> = g.interior().map(|c| t[c].powi(4)).collect();
        let u_old = u.clone();
        let u_min = self.t_floor.powi(4);
        for it in 1..=NEWTON_CAP {
            let cv: Vec<f64> = g.interior().map(|c| self.material[c].cv).collect();
            let jd: Vec<f64> = (0..u.len()).map(|p| cv[p] / (4.0 * u[p].max(u_min).powf(0.75)) + a).collect();
            let (mut sys, fixed) = self.laplacian(dt, &t, &jd);
            // residual R = Δt·(storage) + Δt·K-terms, written as J-form rows
            let mut lu = vec![0.0; u.len()];
            let mut lap = sys.clone();
            lap.diag.iter_mut().zip(&jd).for_each(|(d, j)| *d -= j);
            lap.apply(&u, &mut lu);
            for (p, c) in g.interior().enumerate() {
                let storage = cv[p] * (u[p].max(0.0).powf(0.25) - t_old[c]) + a * (u[p] - u_old[p]);
                let r = storage + lu[p] - fixed[p];
                sys.rhs_i[p] = -r;
            }
            let (delta, _) = solve_macro(&sys)?;
            let mut change = 0.0f64;
            for p in 0..u.len() {
                let next = (u[p] + delta[p]).max(0.1 * u[p]);
                change = change.max((next - u[p]).abs() / (next.abs() + 1e-300));
                u[p] = next;
            }
            for (p, c) in g.interior().enumerate() {
                t[c] = u[p].powf(0.25);
            }
            if change <= NEWTON_TOL {
                state.field = t;
                state.time += dt;
                return Ok(it);
            }
        }
        Err(Error::Newton(f64::NAN))
    }
}
