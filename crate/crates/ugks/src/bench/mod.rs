//! Paper scenarios: registry, driver, metrics and result files.

pub mod metrics;
pub mod output;
pub mod scenarios;

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::angular::{gauss_legendre, FilterKind};
use crate::coeffs::TimestepMode;
use crate::error::{Error, Result};
use crate::fluxes::FluxMode;
use crate::mesh::Grid2D;
use crate::solver::{DiffusionSolver, DiffusionState, Solver, SolverConfig};

pub use scenarios::{scenario, DtLaw, InitialCondition, Preset, Scenario, NAMES};

/// Fields at one output time, compact interior order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub time: f64,
    pub rho: Vec<f64>,
    pub temp: Vec<f64>,
    pub phi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSeries {
    pub name: String,
    /// (t, T, T_r)
    pub samples: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricReport {
    pub scenario: String,
    pub steps: usize,
    pub final_time: f64,
    pub wall_seconds: f64,
    /// (t, min ρ) after every step.
    pub min_rho: Vec<(f64, f64)>,
    /// (t, err_ap) after every step.
    pub err_ap: Vec<(f64, f64)>,
    pub probes: Vec<ProbeSeries>,
    pub snapshots: Vec<Snapshot>,
    /// Diffusion-limit reference at the same output times (ρ for linear
    /// problems, T otherwise).
    pub reference: Vec<Snapshot>,
    /// (radius, (max − min)/mean) at the final time, 2-D origin-centred runs.
    pub symmetry: Vec<(f64, f64)>,
    pub max_sweeps: usize,
    pub total_sweeps: usize,
    pub max_residual: f64,
    pub min_lambda: [f64; 3],
}

impl MetricReport {
    pub fn overall_min_rho(&self) -> f64 {
        self.min_rho.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }
}

pub struct RunResult {
    pub report: MetricReport,
    pub solver: Solver,
}

/// Overrides from the config file and command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub scenario: Option<String>,
    pub preset: Option<String>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub n_order: Option<usize>,
    pub filter: Option<String>,
    pub sigma_f: Option<f64>,
    pub mode: Option<String>,
    pub pp: Option<String>,
    /// acoustic | parabolic; the cfl factor carries over unless `cfl` is set.
    pub dt_law: Option<String>,
    pub cfl: Option<f64>,
    pub t_end: Option<f64>,
    pub eps: Option<f64>,
    pub out_dir: Option<PathBuf>,
    pub meshes: Option<Vec<usize>>,
}

impl Overrides {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// `self` with every field set in `top` replaced.
    pub fn merged(self, top: Overrides) -> Overrides {
        Overrides {
            scenario: top.scenario.or(self.scenario),
            preset: top.preset.or(self.preset),
            nx: top.nx.or(self.nx),
            ny: top.ny.or(self.ny),
            n_order: top.n_order.or(self.n_order),
            filter: top.filter.or(self.filter),
            sigma_f: top.sigma_f.or(self.sigma_f),
            mode: top.mode.or(self.mode),
            pp: top.pp.or(self.pp),
            dt_law: top.dt_law.or(self.dt_law),
            cfl: top.cfl.or(self.cfl),
            t_end: top.t_end.or(self.t_end),
            eps: top.eps.or(self.eps),
            out_dir: top.out_dir.or(self.out_dir),
            meshes: top.meshes.or(self.meshes),
        }
    }

    /// Resolve the scenario named here (or `default_name`) and apply.
    pub fn resolve(&self) -> Result<Scenario> {
        let name = self.scenario.as_deref().ok_or_else(|| Error::Config("no scenario given".into()))?;
        let preset: Preset = self.preset.as_deref().unwrap_or("desk").parse()?;
        let mut s = scenario(name, preset)?;
        self.apply(&mut s)?;
        Ok(s)
    }

    pub fn apply(&self, s: &mut Scenario) -> Result<()> {
        if let Some(v) = self.nx {
            s.nx = v;
        }
        if let Some(v) = self.ny {
            s.ny = v;
        }
        if let Some(v) = self.n_order {
            s.n_order = v;
        }
        if let Some(v) = &self.filter {
            s.filter = v.parse::<FilterKind>()?;
        }
        if let Some(v) = self.sigma_f {
            if !(v >= 0.0) {
                return Err(Error::Config(format!("sigma_f must be >= 0, got {v}")));
            }
            s.material.set_sigma_f(v);
        }
        if let Some(v) = &self.mode {
            s.mode = v.parse::<FluxMode>()?;
        }
        if let Some(v) = &self.pp {
            s.positivity = match v.as_str() {
                "on" | "true" => true,
                "off" | "false" => false,
                o => return Err(Error::Config(format!("pp must be on|off, got '{o}'"))),
            };
        }
        if let Some(v) = &self.dt_law {
            let cfl = s.dt_law.cfl();
            s.dt_law = match v.as_str() {
                "acoustic" => DtLaw::Acoustic { cfl },
                "parabolic" => DtLaw::Parabolic { cfl },
                o => return Err(Error::Config(format!("dt_law must be acoustic|parabolic, got '{o}'"))),
            };
        }
        if let Some(v) = self.cfl {
            s.dt_law = s.dt_law.with_cfl(v);
        }
        if let Some(v) = self.t_end {
            s.t_end = v;
            s.output_times.retain(|t| *t <= v);
        }
        if let Some(v) = self.eps {
            s.consts.eps = v;
        }
        s.validate()
    }
}

/// Cell averages of the Gaussian pulse by tensor Gauss quadrature.
fn gaussian_average(grid: &Grid2D, i: isize, j: isize, width: f64) -> f64 {
    let (xs, ws) = gauss_legendre(6);
    let (xc, yc) = (grid.xc(i), grid.yc(j));
    let mut acc = 0.0;
    for (a, wa) in xs.iter().zip(&ws) {
        for (b, wb) in xs.iter().zip(&ws) {
            let x = xc + 0.5 * grid.dx * a;
            let y = yc + 0.5 * grid.dy * b;
            acc += wa * wb * (-(x * x + y * y) / (2.0 * width * width)).exp();
        }
    }
    0.25 * acc / (2.0 * std::f64::consts::PI * width * width)
}

pub fn build_solver(s: &Scenario) -> Result<Solver> {
    s.validate()?;
    let grid = s.grid()?;
    let cfg = SolverConfig {
        mode: s.mode,
        positivity: s.positivity,
        linear: s.linear,
        t_floor: s.t_floor,
        ..Default::default()
    };
    let mut solver = Solver::new(grid, s.bc.clone(), s.consts, s.n_order, s.filter, s.materials()?, cfg)?;
    match s.initial {
        InitialCondition::Gaussian { width, floor } => {
            let mut rho = vec![0.0; grid.n_interior()];
            for j in 0..grid.ny as isize {
                for i in 0..grid.nx as isize {
                    rho[grid.compact(i, j)] = gaussian_average(&grid, i, j, width) + floor;
                }
            }
            let g = grid;
            solver.set_isotropic(|x, y| {
                let i = ((x - g.x0) / g.dx).floor() as isize;
                let j = ((y - g.y0) / g.dy).floor() as isize;
                rho[g.compact(i, j)]
            });
        }
        InitialCondition::UniformRho { rho } => solver.set_isotropic(|_, _| rho),
        InitialCondition::UniformTemperature { t } => solver.set_equilibrium(|_, _| t),
        InitialCondition::SineTemperature { mean, amp } => {
            solver.set_equilibrium(|x, _| mean + amp * (2.0 * std::f64::consts::PI * x).sin())
        }
    }
    Ok(solver)
}

fn build_reference(s: &Scenario, solver: &Solver) -> Result<(DiffusionSolver, DiffusionState)> {
    let grid = solver.grid;
    let d = DiffusionSolver::new(grid, &s.bc, s.consts, s.materials()?, s.linear, s.t_floor)?;
    let src = if s.linear { &solver.state.rho } else { &solver.state.temp };
    let mut st = d.state_from(|_, _| 0.0);
    for c in grid.interior() {
        st.field[c] = src[c];
    }
    Ok((d, st))
}

fn snapshot(solver: &Solver) -> Snapshot {
    let g = &solver.grid;
    Snapshot {
        time: solver.time,
        rho: metrics::interior(g, &solver.state.rho),
        temp: metrics::interior(g, &solver.state.temp),
        phi: metrics::interior(g, &solver.state.phi),
    }
}

/// Nominal step of a scenario on its own grid.
pub fn nominal_dt(s: &Scenario, solver: &Solver) -> f64 {
    s.dt_law.dt(&solver.grid, solver.active_axes(), s.consts.c)
}

/// Run a scenario to its end time; writes outputs when `out_dir` is given.
pub fn run_scenario(s: &Scenario, out_dir: Option<&Path>) -> Result<RunResult> {
    let start = Instant::now();
    let mut solver = build_solver(s)?;
    let mut reference = if s.diffusion_reference { Some(build_reference(s, &solver)?) } else { None };
    let g = solver.grid;
    let dt_nominal = nominal_dt(s, &solver);
    let mut outputs: Vec<f64> = s.output_times.iter().copied().filter(|t| *t < s.t_end).collect();
    outputs.push(s.t_end);
    outputs.sort_by(f64::total_cmp);
    outputs.dedup();
    let probe_cells: Vec<usize> = s
        .probes
        .iter()
        .map(|p| {
            let i = (((p.x - g.x0) / g.dx).floor() as isize).clamp(0, g.nx as isize - 1);
            let j = (((p.y - g.y0) / g.dy).floor() as isize).clamp(0, g.ny as isize - 1);
            g.idx(i, j)
        })
        .collect();
    let mut report = MetricReport {
        scenario: s.name.clone(),
        min_lambda: [1.0; 3],
        probes: s.probes.iter().map(|p| ProbeSeries { name: p.name.clone(), samples: vec![] }).collect(),
        ..Default::default()
    };
    let (a, c) = (s.consts.a, s.consts.c);
    let record_probes = |solver: &Solver, report: &mut MetricReport| {
        for (series, &cell) in report.probes.iter_mut().zip(&probe_cells) {
            let tr = metrics::radiation_temperature(solver.state.rho[cell], a, c);
            series.samples.push((solver.time, solver.state.temp[cell], tr));
        }
    };
    record_probes(&solver, &mut report);
    let mut next_out = 0;
    while next_out < outputs.len() {
        let target = outputs[next_out];
        let mut dt = dt_nominal;
        if s.positivity {
            dt = solver.max_timestep(TimestepMode::PpStrict, dt)?;
        }
        let remaining = target - solver.time;
        let mut hit = false;
        if dt >= remaining * (1.0 - 1e-10) {
            dt = remaining;
            hit = true;
        }
        let it = solver.advance(dt)?;
        if hit {
            // land exactly on the output time
            solver.time = target;
        }
        if let Some((d, st)) = reference.as_mut() {
            d.step(st, dt)?;
            st.time = solver.time;
        }
        report.steps += 1;
        report.total_sweeps += it.sweeps;
        report.max_sweeps = report.max_sweeps.max(it.sweeps);
        report.max_residual = report.max_residual.max(it.max_residual);
        for k in 0..3 {
            report.min_lambda[k] = report.min_lambda[k].min(it.min_lambda[k]);
        }
        report.min_rho.push((solver.time, it.min_rho));
        report.err_ap.push((solver.time, metrics::err_ap(&solver.state)));
        record_probes(&solver, &mut report);
        if hit {
            report.snapshots.push(snapshot(&solver));
            if let Some((_, st)) = reference.as_ref() {
                let f = metrics::interior(&g, &st.field);
                let (rho, temp) = if s.linear { (f.clone(), vec![]) } else { (vec![], f) };
                report.reference.push(Snapshot { time: solver.time, rho, temp, phi: vec![] });
            }
            next_out += 1;
        }
    }
    report.final_time = solver.time;
    let origin_centred = g.x0 < 0.0 && g.x1() > 0.0 && g.y0 < 0.0 && g.y1() > 0.0 && g.ny > 1;
    if origin_centred {
        let rho = metrics::interior(&g, &solver.state.rho);
        let reach = (-g.x0).min(g.x1()).min(-g.y0).min(g.y1());
        let radii: Vec<f64> = [0.25, 0.5, 0.75].into_iter().filter(|r| *r < reach).collect();
        let dev = metrics::symmetry_metric(&g, &rho, &radii, 128)?;
        report.symmetry = radii.into_iter().zip(dev).collect();
    }
    report.wall_seconds = start.elapsed().as_secs_f64();
    if let Some(dir) = out_dir {
        output::emit_outputs(dir, s, &report, &solver)?;
    }
    Ok(RunResult { report, solver })
}

/// One row of a convergence table: errors of the run on `nx` cells against
/// the next finer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderRow {
    pub nx: usize,
    pub l2_rho: f64,
    pub linf_rho: f64,
    pub l2_t: f64,
    pub linf_t: f64,
    /// Orders against the previous row (NaN for the first).
    pub order_l2_rho: f64,
    pub order_linf_rho: f64,
    pub order_l2_t: f64,
    pub order_linf_t: f64,
}

/// Self-convergence study: each mesh is compared with the next finer one.
pub fn convergence_study(base: &Scenario, meshes: &[usize], law: DtLaw) -> Result<Vec<OrderRow>> {
    if meshes.len() < 3 {
        return Err(Error::Config("a convergence study needs at least three meshes".into()));
    }
    if meshes.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::Config(format!("meshes {meshes:?} are not nested by factors of two")));
    }
    let two_d = base.ny > 1;
    let mut finals = Vec::new();
    for &nx in meshes {
        let mut s = base.clone();
        s.nx = nx;
        if two_d {
            s.ny = base.ny * nx / base.nx;
        }
        s.dt_law = law;
        s.output_times.clear();
        let r = run_scenario(&s, None)?;
        let snap = r.report.snapshots.last().cloned().expect("final snapshot");
        finals.push((nx, s.ny, snap));
    }
    let mut rows: Vec<OrderRow> = Vec::new();
    for k in 0..finals.len() - 1 {
        let (nx, _, coarse) = &finals[k];
        let (nxf, nyf, fine) = &finals[k + 1];
        let rr = metrics::restrict(&fine.rho, *nxf, *nyf)?;
        let rt = metrics::restrict(&fine.temp, *nxf, *nyf)?;
        let mut row = OrderRow {
            nx: *nx,
            l2_rho: metrics::rel_l2(&coarse.rho, &rr),
            linf_rho: metrics::rel_linf(&coarse.rho, &rr),
            l2_t: metrics::rel_l2(&coarse.temp, &rt),
            linf_t: metrics::rel_linf(&coarse.temp, &rt),
            order_l2_rho: f64::NAN,
            order_linf_rho: f64::NAN,
            order_l2_t: f64::NAN,
            order_linf_t: f64::NAN,
        };
        if let Some(prev) = rows.last() {
            row.order_l2_rho = metrics::order(prev.l2_rho, row.l2_rho);
            row.order_linf_rho = metrics::order(prev.linf_rho, row.linf_rho);
            row.order_l2_t = metrics::order(prev.l2_t, row.l2_t);
            row.order_linf_t = metrics::order(prev.linf_t, row.linf_t);
        }
        rows.push(row);
    }
    Ok(rows)
}
