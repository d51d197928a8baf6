//! Registry of the benchmark problems with paper and desk presets.

use serde::{Deserialize, Serialize};

use crate::angular::FilterKind;
use crate::coeffs::PhysicsConstants;
use crate::error::{Error, Result};
use crate::fluxes::FluxMode;
use crate::mesh::{BoundaryCondition, EdgeKind, Grid2D, Segment};
use crate::solver::CellMaterial;

/// Light speed (cm/ns) and radiation constant (GJ/(cm³·keV⁴)) of the
/// dimensional problems.
pub const C_LIGHT: f64 = 29.98;
pub const A_RAD: f64 = 0.01372;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Paper,
    Desk,
}

impl std::str::FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Preset::Paper),
            "desk" => Ok(Preset::Desk),
            o => Err(Error::Config(format!("unknown preset '{o}'"))),
        }
    }
}

/// Nominal time step as a function of the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DtLaw {
    /// cfl · min(Δx, Δy) / c
    Acoustic { cfl: f64 },
    /// cfl · Δx²
    Parabolic { cfl: f64 },
}

impl DtLaw {
    pub fn dt(&self, grid: &Grid2D, active: [bool; 2], c: f64) -> f64 {
        let h = match active {
            [true, true] | [false, false] => grid.dx.min(grid.dy),
            [true, false] => grid.dx,
            [false, true] => grid.dy,
        };
        match *self {
            DtLaw::Acoustic { cfl } => cfl * h / c,
            DtLaw::Parabolic { cfl } => cfl * h * h,
        }
    }

    pub fn cfl(&self) -> f64 {
        match *self {
            DtLaw::Acoustic { cfl } | DtLaw::Parabolic { cfl } => cfl,
        }
    }

    pub fn with_cfl(self, cfl: f64) -> Self {
        match self {
            DtLaw::Acoustic { .. } => DtLaw::Acoustic { cfl },
            DtLaw::Parabolic { .. } => DtLaw::Parabolic { cfl },
        }
    }
}

/// Axis-aligned rectangle [x0,x1]×[y0,y1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x > self.x0 && x < self.x1 && y > self.y0 && y < self.y1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaterialSpec {
    Uniform { material: CellMaterial },
    /// `thick` inside any of `regions`, `thin` elsewhere.
    Regions { thin: CellMaterial, thick: CellMaterial, regions: Vec<Rect> },
}

impl MaterialSpec {
    pub fn at(&self, x: f64, y: f64) -> CellMaterial {
        match self {
            MaterialSpec::Uniform { material } => *material,
            MaterialSpec::Regions { thin, thick, regions } => {
                if regions.iter().any(|r| r.contains(x, y)) {
                    *thick
                } else {
                    *thin
                }
            }
        }
    }

    /// Replace σ_f everywhere it is nonzero (Uniform: unconditionally).
    pub fn set_sigma_f(&mut self, sf: f64) {
        match self {
            MaterialSpec::Uniform { material } => material.sigma_f = sf,
            MaterialSpec::Regions { thin, thick, .. } => {
                for m in [thin, thick] {
                    if m.sigma_f != 0.0 {
                        m.sigma_f = sf;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Isotropic ρ = peak/(2πς²)·exp(−r²/(2ς²)) + floor (cell averages).
    Gaussian { width: f64, floor: f64 },
    /// Linear problems: uniform isotropic ρ.
    UniformRho { rho: f64 },
    /// Equilibrium at uniform T.
    UniformTemperature { t: f64 },
    /// Equilibrium at T = mean + amp·sin(2πx).
    SineTemperature { mean: f64, amp: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub preset: Preset,
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub t_end: f64,
    pub consts: PhysicsConstants,
    pub n_order: usize,
    pub filter: FilterKind,
    pub mode: FluxMode,
    pub positivity: bool,
    pub linear: bool,
    pub dt_law: DtLaw,
    pub t_floor: f64,
    pub bc: BoundaryCondition,
    pub material: MaterialSpec,
    pub initial: InitialCondition,
    /// Times at which full fields are written (t_end always included).
    pub output_times: Vec<f64>,
    pub probes: Vec<Probe>,
    /// Run the diffusion-limit reference alongside.
    pub diffusion_reference: bool,
}

impl Scenario {
    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.nx, self.ny, self.x_range, self.y_range)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.grid()?;
        self.bc.validate(&g)?;
        self.consts.validate()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.dt_law.cfl() > 0.0) {
            return Err(Error::Config("cfl must be positive".into()));
        }
        if self.n_order == 0 || self.n_order > 31 {
            return Err(Error::Config(format!("basis order {} out of range", self.n_order)));
        }
        Ok(())
    }

    pub fn materials(&self) -> Result<Vec<CellMaterial>> {
        let g = self.grid()?;
        let mut out = Vec::with_capacity(g.n_interior());
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                out.push(self.material.at(g.xc(i), g.yc(j)));
            }
        }
        Ok(out)
    }
}

pub const NAMES: [&str; 6] = ["line_source", "ap_test", "accuracy", "marshak_2b", "marshak_2a", "tophat"];

pub fn describe(name: &str) -> Result<&'static str> {
    Ok(match name {
        "line_source" => "Example 1: linear transport, Gaussian pulse on [-1.5,1.5]^2, vacuum edges, t = 1",
        "ap_test" => "Example 2: linear slab, eps = 1e-8, isotropic inflow I = 1 on the left, diffusion comparison",
        "accuracy" => "Example 3: periodic nonlinear problem, T0 = 1 + 0.5 sin(2 pi x), t = 0.2, dt = dx^2",
        "marshak_2b" => "Example 4: Marshak wave 2B, sigma = 300/T^3 cm^-1, 1 keV left boundary",
        "marshak_2a" => "Example 5: Marshak wave 2A, sigma = 30/T^3 cm^-1, 1 keV left boundary",
        "tophat" => "Example 6: Tophat pipe, thick/thin regions, 0.5 keV source on the left for |y| < 0.5",
        o => return Err(Error::Config(format!("unknown scenario '{o}'"))),
    })
}

fn slab_bc(west: EdgeKind, east: EdgeKind) -> BoundaryCondition {
    BoundaryCondition::slab(west, east)
}

/// Build a registered scenario.
pub fn scenario(name: &str, preset: Preset) -> Result<Scenario> {
    describe(name)?;
    let desk = preset == Preset::Desk;
    let s = match name {
        "line_source" => {
            let n = if desk { 100 } else { 150 };
            Scenario {
                name: name.into(),
                preset,
                nx: n,
                ny: n,
                x_range: (-1.5, 1.5),
                y_range: (-1.5, 1.5),
                t_end: 1.0,
                consts: PhysicsConstants { a: 1.0, c: 1.0, eps: 1.0 },
                n_order: 11,
                filter: FilterKind::Sspline,
                mode: FluxMode::Full,
                positivity: true,
                linear: true,
                dt_law: DtLaw::Acoustic { cfl: 0.1 },
                t_floor: 1e-6,
                bc: BoundaryCondition::uniform(EdgeKind::Vacuum),
                material: MaterialSpec::Uniform { material: CellMaterial::constant(1.0, 1.0, 45.0) },
                initial: InitialCondition::Gaussian { width: 0.03, floor: 0.0 },
                output_times: vec![1.0],
                probes: vec![],
                diffusion_reference: false,
            }
        }
        "ap_test" => Scenario {
            name: name.into(),
            preset,
            nx: if desk { 100 } else { 200 },
            ny: 1,
            x_range: (0.0, 1.0),
            y_range: (0.0, if desk { 0.01 } else { 0.005 }),
            t_end: 2.0,
            consts: PhysicsConstants { a: 1.0, c: 1.0, eps: 1e-8 },
            n_order: 3,
            filter: FilterKind::None,
            mode: FluxMode::Full,
            positivity: true,
            linear: true,
            dt_law: DtLaw::Acoustic { cfl: if desk { 0.25 } else { 0.1 } },
            t_floor: 1e-6,
            bc: slab_bc(EdgeKind::Isotropic { intensity: 1.0 }, EdgeKind::Vacuum),
            material: MaterialSpec::Uniform { material: CellMaterial::constant(1.0, 1.0, 0.0) },
            initial: InitialCondition::UniformRho { rho: 0.0 },
            output_times: vec![0.01, 0.05, 0.15, 2.0],
            probes: vec![],
            diffusion_reference: true,
        },
        "accuracy" => Scenario {
            name: name.into(),
            preset,
            nx: if desk { 40 } else { 80 },
            ny: 1,
            x_range: (0.0, 1.0),
            y_range: (0.0, 0.025),
            t_end: 0.2,
            consts: PhysicsConstants { a: 1.0, c: 1.0, eps: 1.0 },
            n_order: 7,
            filter: FilterKind::None,
            mode: FluxMode::Full,
            positivity: true,
            linear: false,
            dt_law: DtLaw::Parabolic { cfl: 1.0 },
            t_floor: 1e-6,
            bc: BoundaryCondition::per_edge(
                EdgeKind::Periodic,
                EdgeKind::Periodic,
                EdgeKind::Reflective,
                EdgeKind::Reflective,
            ),
            material: MaterialSpec::Uniform { material: CellMaterial::constant(1.0, 1.0, 0.0) },
            initial: InitialCondition::SineTemperature { mean: 1.0, amp: 0.5 },
            output_times: vec![0.2],
            probes: vec![],
            diffusion_reference: false,
        },
        "marshak_2b" | "marshak_2a" => {
            let two_b = name == "marshak_2b";
            let nx = if desk { 100 } else { 200 };
            let t_end = if two_b {
                if desk {
                    15.0
                } else {
                    74.0
                }
            } else {
                1.0
            };
            let output_times = if two_b {
                if desk {
                    vec![3.0, 6.0, 9.0, 12.0, 15.0]
                } else {
                    vec![15.0, 30.0, 45.0, 60.0, 74.0]
                }
            } else {
                vec![0.2, 0.4, 0.6, 0.8, 1.0]
            };
            let density = 3.0;
            let coeff = if two_b { 100.0 } else { 10.0 } * density;
            Scenario {
                name: name.into(),
                preset,
                nx,
                ny: 1,
                x_range: (0.0, 1.0),
                y_range: (0.0, 0.01),
                t_end,
                consts: PhysicsConstants { a: A_RAD, c: C_LIGHT, eps: 1.0 },
                n_order: 3,
                filter: FilterKind::None,
                mode: FluxMode::Full,
                positivity: true,
                linear: false,
                dt_law: DtLaw::Acoustic { cfl: if two_b { 0.7 } else { 0.25 } },
                t_floor: 1e-6,
                bc: slab_bc(EdgeKind::Planckian { t_b: 1.0 }, EdgeKind::Vacuum),
                material: MaterialSpec::Uniform {
                    material: CellMaterial { sigma_coeff: coeff, sigma_power: 3.0, cv: 0.1 * density, sigma_f: 0.0 },
                },
                initial: InitialCondition::UniformTemperature { t: 1e-6 },
                output_times,
                probes: vec![],
                diffusion_reference: two_b,
            }
        }
        "tophat" => {
            let (nx, ny) = if desk { (64, 32) } else { (128, 64) };
            let thin = CellMaterial { sigma_coeff: 0.2, sigma_power: 0.0, cv: 0.1 * 0.01, sigma_f: 2000.0 };
            let thick = CellMaterial { sigma_coeff: 2000.0, sigma_power: 0.0, cv: 0.1 * 10.0, sigma_f: 0.0 };
            let r = |x0: f64, x1: f64, y0: f64, y1: f64| Rect { x0, x1, y0, y1 };
            let regions = vec![
                r(0.0, 2.5, 0.5, 2.0),
                r(0.0, 2.5, -2.0, -0.5),
                r(2.5, 4.5, 1.5, 2.0),
                r(2.5, 4.5, -2.0, -1.5),
                r(3.0, 4.0, -1.0, 1.0),
                r(4.5, 7.0, 0.5, 2.0),
                r(4.5, 7.0, -2.0, -0.5),
            ];
            let west = vec![
                Segment { lo: -2.0, hi: -0.5, kind: EdgeKind::Vacuum },
                Segment { lo: -0.5, hi: 0.5, kind: EdgeKind::Planckian { t_b: 0.5 } },
                Segment { lo: 0.5, hi: 2.0, kind: EdgeKind::Vacuum },
            ];
            let v = || vec![Segment { lo: f64::NEG_INFINITY, hi: f64::INFINITY, kind: EdgeKind::Vacuum }];
            let probe = |n: &str, x: f64, y: f64| Probe { name: n.into(), x, y };
            Scenario {
                name: name.into(),
                preset,
                nx,
                ny,
                x_range: (0.0, 7.0),
                y_range: (-2.0, 2.0),
                t_end: 1.0,
                consts: PhysicsConstants { a: A_RAD, c: C_LIGHT, eps: 1.0 },
                n_order: 7,
                filter: FilterKind::Lanczos,
                mode: FluxMode::Full,
                positivity: true,
                linear: false,
                dt_law: DtLaw::Acoustic { cfl: 0.25 },
                t_floor: 1e-6,
                bc: BoundaryCondition { west, east: v(), south: v(), north: v() },
                material: MaterialSpec::Regions { thin, thick, regions },
                initial: InitialCondition::UniformTemperature { t: 0.05 },
                output_times: vec![0.5, 1.0],
                probes: vec![
                    probe("A", 0.25, 0.0),
                    probe("B", 2.75, 0.0),
                    probe("C", 3.5, 1.25),
                    probe("D", 4.25, 0.0),
                    probe("E", 6.75, 0.0),
                ],
                diffusion_reference: false,
            }
        }
        _ => unreachable!(),
    };
    Ok(s)
}
