//! Registry of the benchmark problems: equation, domain, boundary
//! conditions, initial data and (where known) the exact solution.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::equations::{Advection, Burgers, ConservationLaw, Euler};
use crate::error::{Result, SolverError};
use crate::grid::{Boundary, BoundarySpec, Field, Grid, Placement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProblemId {
    #[serde(rename = "advection")]
    Advection,
    #[serde(rename = "burgers")]
    Burgers,
    #[serde(rename = "euler1d")]
    Euler1d,
    #[serde(rename = "euler2d-smooth")]
    Euler2dSmooth,
    #[serde(rename = "dmr")]
    Dmr,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] =
        [ProblemId::Advection, ProblemId::Burgers, ProblemId::Euler1d, ProblemId::Euler2dSmooth, ProblemId::Dmr];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Advection => "advection",
            ProblemId::Burgers => "burgers",
            ProblemId::Euler1d => "euler1d",
            ProblemId::Euler2dSmooth => "euler2d-smooth",
            ProblemId::Dmr => "dmr",
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| SolverError::Config(format!("unknown problem '{s}'")))
    }
}

/// Mach 10 double Mach reflection data.
pub mod dmr {
    use super::*;

    pub const SHOCK_X0: f64 = 0.25;
    /// Post-shock primitive state `(rho, v^x, v^y, E)`.
    pub fn post_shock() -> [f64; 4] {
        [8.0, 8.25 * (PI / 6.0).cos(), -8.25 * (PI / 6.0).sin(), 563.5]
    }
    /// Pre-shock primitive state.
    pub const PRE_SHOCK: [f64; 4] = [1.4, 0.0, 0.0, 2.5];

    /// Whether `(x, y)` lies behind the initial shock `x = 1/4 + tan(pi/6) y`,
    /// which meets the wall at `x = 1/4` and the top edge where the moving
    /// top boundary data places it at `t = 0`.
    pub fn behind_initial_shock(x: f64, y: f64) -> bool {
        x <= SHOCK_X0 + (PI / 6.0).tan() * y
    }

    /// Shock position along the top boundary at time `t`.
    pub fn top_shock_position(t: f64) -> f64 {
        SHOCK_X0 + (1.0 + 20.0 * t) / 3f64.sqrt()
    }
}

pub struct Problem {
    pub id: ProblemId,
    pub eq: Box<dyn ConservationLaw>,
    pub bc: BoundarySpec,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub placement: Placement,
    pub default_tend: f64,
}

/// Burgers initial data `1/2 + sin(pi x)`; shocks form at `t = 1/pi`.
fn burgers_initial(x: f64) -> f64 {
    0.5 + (PI * x).sin()
}

/// Density wave carried by the 1D Euler flow at unit velocity and pressure.
fn density_wave(x: f64) -> f64 {
    1.0 + 0.2 * (PI * x).sin()
}

impl Problem {
    pub fn new(id: ProblemId) -> Result<Self> {
        let euler2 = Euler::new(2);
        Ok(match id {
            ProblemId::Advection => Problem {
                id,
                eq: Box::new(Advection::new(vec![1.0])),
                bc: BoundarySpec::periodic(1),
                lower: vec![-1.0],
                upper: vec![1.0],
                placement: Placement::Nodal,
                default_tend: 0.5,
            },
            ProblemId::Burgers => Problem {
                id,
                eq: Box::new(Burgers),
                bc: BoundarySpec::periodic(1),
                lower: vec![-1.0],
                upper: vec![1.0],
                placement: Placement::Nodal,
                default_tend: 0.15,
            },
            ProblemId::Euler1d => Problem {
                id,
                eq: Box::new(Euler::new(1)),
                bc: BoundarySpec::periodic(1),
                lower: vec![-1.0],
                upper: vec![1.0],
                placement: Placement::Nodal,
                default_tend: 0.5,
            },
            ProblemId::Euler2dSmooth => Problem {
                id,
                eq: Box::new(euler2),
                bc: BoundarySpec::periodic(2),
                lower: vec![-1.0, -1.0],
                upper: vec![1.0, 1.0],
                placement: Placement::Nodal,
                default_tend: 0.025,
            },
            ProblemId::Dmr => {
                let c1 = euler2.primitive_to_conservative(&dmr::post_shock())?;
                let c2 = euler2.primitive_to_conservative(&dmr::PRE_SHOCK)?;
                let top: Arc<dyn Fn([f64; 2], f64) -> Vec<f64> + Send + Sync> = {
                    let (c1, c2) = (c1.clone(), c2);
                    Arc::new(
                        move |x: [f64; 2], t: f64| {
                            if x[0] <= dmr::top_shock_position(t) {
                                c1.clone()
                            } else {
                                c2.clone()
                            }
                        },
                    )
                };
                let bottom = Boundary::Split {
                    at: dmr::SHOCK_X0,
                    below: Box::new(Boundary::Outflow),
                    above: Box::new(Boundary::Reflecting),
                };
                Problem {
                    id,
                    eq: Box::new(euler2),
                    bc: BoundarySpec {
                        sides: vec![[Boundary::Inflow(c1), Boundary::Outflow], [bottom, Boundary::TimeDependent(top)]],
                    },
                    lower: vec![0.0, 0.0],
                    upper: vec![4.0, 1.0],
                    placement: Placement::CellCentered,
                    default_tend: 0.2,
                }
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Grid with `nx` nodes along x; `ny` defaults to keeping square cells.
    pub fn grid(&self, nx: usize, ny: Option<usize>, ghost: usize) -> Result<Grid> {
        let mut extents = vec![nx];
        if self.dim() == 2 {
            let aspect = (self.upper[1] - self.lower[1]) / (self.upper[0] - self.lower[0]);
            let ny = ny.unwrap_or(((nx as f64) * aspect).round().max(1.0) as usize);
            extents.push(ny);
        } else if ny.is_some_and(|v| v != 1) {
            return Err(SolverError::Config(format!("problem {} is one-dimensional", self.id)));
        }
        Grid::new(&extents, &self.lower, &self.upper, &vec![self.placement; self.dim()], ghost)
    }

    /// Conservative initial state at `x`.
    pub fn initial_state(&self, x: [f64; 2]) -> Result<Vec<f64>> {
        let euler = |dim: usize, prim: &[f64]| Euler::new(dim).primitive_to_conservative(prim);
        match self.id {
            ProblemId::Advection => Ok(vec![(PI * x[0]).sin()]),
            ProblemId::Burgers => Ok(vec![burgers_initial(x[0])]),
            ProblemId::Euler1d => {
                let rho = density_wave(x[0]);
                // p = 1, v = 1
                Ok(vec![rho, rho, 1.0 / 0.4 + 0.5 * rho])
            }
            ProblemId::Euler2dSmooth => {
                let s = PI * (x[0] + x[1]);
                euler(2, &[0.75 + 0.5 * s.cos(), 0.25 + 0.5 * s.cos(), 0.25 + 0.5 * s.sin(), 0.75 + 0.5 * s.sin()])
            }
            ProblemId::Dmr => {
                if dmr::behind_initial_shock(x[0], x[1]) {
                    euler(2, &dmr::post_shock())
                } else {
                    euler(2, &dmr::PRE_SHOCK)
                }
            }
        }
    }

    pub fn initial_field(&self, grid: Grid) -> Result<Field> {
        let mut f = Field::new(grid, self.eq.ncomp());
        f.sample(|x| self.initial_state(x))?;
        Ok(f)
    }

    /// Exact conservative solution where one is available in closed form
    /// (Burgers only before the shock time `1/pi`).
    pub fn exact_state(&self, x: [f64; 2], t: f64) -> Option<Vec<f64>> {
        match self.id {
            ProblemId::Advection => Some(vec![(PI * (x[0] - t)).sin()]),
            ProblemId::Burgers if t < 1.0 / PI => Some(vec![burgers_characteristic(x[0], t)]),
            ProblemId::Euler1d => {
                let rho = density_wave(x[0] - t);
                Some(vec![rho, rho, 1.0 / 0.4 + 0.5 * rho])
            }
            _ => None,
        }
    }

    pub fn has_exact_solution(&self, t: f64) -> bool {
        self.exact_state([0.0, 0.0], t).is_some()
    }
}

/// Solves `u = u0(x - u t)` by Newton's method (smooth regime only).
fn burgers_characteristic(x: f64, t: f64) -> f64 {
    let mut u = burgers_initial(x);
    for _ in 0..100 {
        let xi = x - u * t;
        let g = u - burgers_initial(xi);
        let dg = 1.0 + PI * (PI * xi).cos() * t;
        let step = g / dg;
        u -= step;
        if step.abs() < 1e-15 {
            break;
        }
    }
    u
}
