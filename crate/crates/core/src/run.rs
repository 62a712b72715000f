//! Single runs: set up a problem, march it, dump and summarize.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::equations::{ConservationLaw, Euler};
use crate::error::{Result, SolverError};
use crate::grid::Field;
use crate::norms::{error_norms, ErrorNorms};
use crate::output::{schlieren, write_dump, SCHLIEREN_KAPPA};
use crate::problems::{Problem, ProblemId};
use crate::solver::{Integrator, SchemeConfig, Simulation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub scheme: SchemeConfig,
    pub nx: usize,
    pub ny: Option<usize>,
    /// Defaults to the problem's end time.
    pub tend: Option<f64>,
    pub out: Option<PathBuf>,
    /// Dump every `k` steps in addition to the initial and final states.
    pub dump_every: Option<usize>,
}

impl RunConfig {
    pub fn new(problem: ProblemId, scheme: SchemeConfig, nx: usize) -> Self {
        RunConfig { problem, scheme, nx, ny: None, tend: None, out: None, dump_every: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: ProblemId,
    pub scheme: String,
    pub nx: usize,
    pub ny: usize,
    pub steps: usize,
    pub t_final: f64,
    pub wall_seconds: f64,
    /// Extremes of density (component 0) over every step.
    pub min_density: f64,
    pub max_density: f64,
    /// Smallest pressure over every step (gas dynamics only).
    pub min_pressure: Option<f64>,
    /// Error against the closed-form solution when one exists.
    pub error: Option<ErrorNorms>,
}

struct Extremes {
    rho: (f64, f64),
    p: Option<f64>,
}

impl Extremes {
    fn update(&mut self, field: &Field, euler: Option<&Euler>) {
        for (i, j) in field.interior_iter() {
            let u = field.node(i, j);
            self.rho.0 = self.rho.0.min(u[0]);
            self.rho.1 = self.rho.1.max(u[0]);
            if let (Some(eq), Some(p)) = (euler, self.p.as_mut()) {
                *p = p.min(eq.pressure(u));
            }
        }
    }
}

/// Runs `cfg` to completion; dumps go to `cfg.out` when set.
pub fn solve(cfg: &RunConfig) -> Result<(Field, RunSummary)> {
    let problem = Problem::new(cfg.problem)?;
    let integrator = Integrator::new(&cfg.scheme)?;
    let grid = problem.grid(cfg.nx, cfg.ny, integrator.ghost_width())?;
    let field = problem.initial_field(grid)?;
    let tend = cfg.tend.unwrap_or(problem.default_tend);
    if !(tend >= 0.0) {
        return Err(SolverError::Config(format!("end time must be non-negative, got {tend}")));
    }
    if cfg.dump_every == Some(0) {
        return Err(SolverError::Config("dump interval must be positive".into()));
    }
    let eq = problem.eq.as_ref();
    let euler = (eq.ncomp() == problem.dim() + 2).then(|| Euler::new(problem.dim()));
    let mut sim = Simulation::new(field, eq, problem.bc.clone(), &cfg.scheme)?;
    let mut ext = Extremes { rho: (f64::INFINITY, f64::NEG_INFINITY), p: euler.as_ref().map(|_| f64::INFINITY) };
    ext.update(&sim.field, euler.as_ref());
    if let Some(out) = &cfg.out {
        dump(out, "initial", &sim.field, eq)?;
    }

    let start = Instant::now();
    sim.run_until(tend, |s, info| {
        ext.update(&s.field, euler.as_ref());
        if let (Some(out), Some(k)) = (&cfg.out, cfg.dump_every) {
            if info.step % k == 0 {
                dump(out, &format!("step_{:06}", info.step), &s.field, eq)?;
            }
        }
        Ok(())
    })?;
    let wall = start.elapsed().as_secs_f64();

    let error =
        if problem.has_exact_solution(sim.field.time) { Some(error_vs_exact(&problem, &sim.field)?) } else { None };
    let summary = RunSummary {
        problem: cfg.problem,
        scheme: cfg.scheme.label(),
        nx: sim.field.grid().n(0),
        ny: sim.field.grid().n(1),
        steps: sim.steps,
        t_final: sim.field.time,
        wall_seconds: wall,
        min_density: ext.rho.0,
        max_density: ext.rho.1,
        min_pressure: ext.p,
        error,
    };
    if let Some(out) = &cfg.out {
        dump(out, "final", &sim.field, eq)?;
        let json = serde_json::to_string_pretty(&summary).map_err(|e| SolverError::Io(e.to_string()))?;
        std::fs::write(out.join("summary.json"), json)?;
    }
    Ok((sim.field, summary))
}

fn dump(out: &Path, name: &str, field: &Field, eq: &dyn ConservationLaw) -> Result<()> {
    let dir = out.join(name);
    if field.grid().dim() == 2 && eq.ncomp() == 4 {
        let s = schlieren(field, SCHLIEREN_KAPPA);
        write_dump(&dir, field, &[("schlieren", &s)])?;
    } else {
        write_dump(&dir, field, &[])?;
    }
    Ok(())
}

/// Field holding the closed-form solution at `field.time`.
pub fn exact_field(problem: &Problem, field: &Field) -> Result<Field> {
    let mut exact = Field::new(field.grid().clone(), field.ncomp());
    exact.time = field.time;
    exact.sample(|x| {
        problem
            .exact_state(x, field.time)
            .ok_or_else(|| SolverError::Config(format!("{} has no exact solution at t = {}", problem.id, field.time)))
    })?;
    Ok(exact)
}

pub fn error_vs_exact(problem: &Problem, field: &Field) -> Result<ErrorNorms> {
    error_norms(field, &exact_field(problem, field)?)
}
