//! Scheme selection and the time-marching driver.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::equations::ConservationLaw;
use crate::error::{Result, SolverError};
use crate::grid::{fill_ghosts, max_wave_speed, BoundarySpec, Field};
use crate::lw::{LaxWendroff, SampleCheck, Tower};
use crate::rk::Rk3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Rk3,
    /// Exact Lax-Wendroff (scalar 1D, `R <= 3`).
    Lw,
    /// Approximate Lax-Wendroff.
    Lwa,
    /// Exact Lax-Wendroff with fluctuation control.
    Lwf,
    /// Approximate Lax-Wendroff with fluctuation control.
    Lwaf,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [Scheme::Rk3, Scheme::Lw, Scheme::Lwa, Scheme::Lwf, Scheme::Lwaf];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Rk3 => "rk3",
            Scheme::Lw => "lw",
            Scheme::Lwa => "lwa",
            Scheme::Lwf => "lwf",
            Scheme::Lwaf => "lwaf",
        }
    }

    pub fn fluctuation_control(self) -> bool {
        matches!(self, Scheme::Lwf | Scheme::Lwaf)
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Scheme::Lw | Scheme::Lwf)
    }

    /// Adds fluctuation control to a Lax-Wendroff variant.
    pub fn with_fluctuation_control(self) -> Result<Scheme> {
        match self {
            Scheme::Lw | Scheme::Lwf => Ok(Scheme::Lwf),
            Scheme::Lwa | Scheme::Lwaf => Ok(Scheme::Lwaf),
            Scheme::Rk3 => Err(SolverError::Config("fluctuation control applies to Lax-Wendroff schemes only".into())),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|v| v.name() == s.to_ascii_lowercase())
            .ok_or_else(|| SolverError::Config(format!("unknown scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    /// Spatial order `2r - 1`.
    pub space_order: usize,
    /// Temporal order `R` (ignored by RK3).
    pub time_order: usize,
    pub cfl: f64,
    /// Require admissible Taylor samples inside the LW recursion.
    #[serde(default)]
    pub strict_samples: bool,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, space_order: usize, time_order: usize, cfl: f64) -> Self {
        SchemeConfig { scheme, space_order, time_order, cfl, strict_samples: false }
    }

    pub fn with_strict_samples(mut self, strict: bool) -> Self {
        self.strict_samples = strict;
        self
    }

    /// WENO5-LWA5 style label.
    pub fn label(&self) -> String {
        match self.scheme {
            Scheme::Rk3 => format!("WENO{}-RK3", self.space_order),
            s => format!("WENO{}-{}{}", self.space_order, s.name().to_uppercase(), self.time_order),
        }
    }

    pub fn r(&self) -> Result<usize> {
        if self.space_order < 3 || self.space_order.is_multiple_of(2) {
            return Err(SolverError::Config(format!("space order must be odd and >= 3, got {}", self.space_order)));
        }
        Ok(self.space_order.div_ceil(2))
    }
}

// one integrator per simulation; boxing the LW tables buys nothing
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone)]
pub enum Integrator {
    Rk3(Rk3),
    Lw(LaxWendroff),
}

impl Integrator {
    pub fn new(cfg: &SchemeConfig) -> Result<Self> {
        if !(cfg.cfl > 0.0) || !cfg.cfl.is_finite() {
            return Err(SolverError::Config(format!("CFL must be positive, got {}", cfg.cfl)));
        }
        let r = cfg.r()?;
        Ok(match cfg.scheme {
            Scheme::Rk3 => Integrator::Rk3(Rk3::new(r)?),
            s => {
                let check = if cfg.strict_samples { SampleCheck::Strict } else { SampleCheck::FluxDomain };
                let lw = LaxWendroff::new(r, cfg.time_order, s.fluctuation_control(), s.is_exact())?;
                Integrator::Lw(lw.with_sample_check(check))
            }
        })
    }

    pub fn ghost_width(&self) -> usize {
        match self {
            Integrator::Rk3(rk) => rk.ghost_width(),
            Integrator::Lw(lw) => lw.ghost_width(),
        }
    }
}

/// Splitting speeds per axis and the CFL step `cfl / max_a(alpha_a / h_a)`.
/// Ghosts must be filled.
pub fn stable_step<E: ConservationLaw + ?Sized>(field: &Field, eq: &E, cfl: f64) -> Result<(f64, Vec<f64>)> {
    let grid = field.grid();
    let mut alpha = Vec::with_capacity(grid.dim());
    let mut rate = 0.0f64;
    for axis in 0..grid.dim() {
        let a = max_wave_speed(field, eq, axis)?;
        rate = rate.max(a / grid.h(axis));
        alpha.push(a);
    }
    let delta = cfl / rate;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(SolverError::Config(format!("CFL condition gives non-positive step {delta}")));
    }
    Ok((delta, alpha))
}

/// Field plus everything needed to march it in time.
pub struct Simulation<'a, E: ConservationLaw + ?Sized> {
    pub field: Field,
    pub eq: &'a E,
    pub bc: BoundarySpec,
    pub integrator: Integrator,
    pub cfl: f64,
    pub steps: usize,
}

/// Per-step information handed to observers.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub step: usize,
    pub time: f64,
    pub delta: f64,
}

impl<'a, E: ConservationLaw + ?Sized> Simulation<'a, E> {
    pub fn new(field: Field, eq: &'a E, bc: BoundarySpec, cfg: &SchemeConfig) -> Result<Self> {
        let integrator = Integrator::new(cfg)?;
        if field.grid().ghost() < integrator.ghost_width() {
            return Err(SolverError::Config(format!(
                "grid has {} ghost layers, {} needs {}",
                field.grid().ghost(),
                cfg.label(),
                integrator.ghost_width()
            )));
        }
        bc.validate(field.grid().dim())?;
        if let Integrator::Lw(lw) = &integrator {
            if lw.is_exact() && (eq.ncomp() != 1 || eq.ndim() != 1 || eq.scalar_derivatives(0.0).is_none()) {
                return Err(SolverError::Config(format!("{} needs a scalar 1D law, got {}", cfg.label(), eq.name())));
            }
        }
        let mut sim = Simulation { field, eq, bc, integrator, cfl: cfg.cfl, steps: 0 };
        sim.fill()?;
        Ok(sim)
    }

    pub fn fill(&mut self) -> Result<()> {
        let t = self.field.time;
        fill_ghosts(&mut self.field, &self.bc, self.eq, t)
    }

    /// One step, clipped so the time does not pass `t_max`.
    pub fn step(&mut self, t_max: f64) -> Result<StepInfo> {
        let (mut delta, alpha) = stable_step(&self.field, self.eq, self.cfl)?;
        if self.field.time + delta > t_max {
            delta = t_max - self.field.time;
        }
        match &self.integrator {
            Integrator::Rk3(rk) => rk.step(&mut self.field, self.eq, &self.bc, &alpha, delta)?,
            Integrator::Lw(lw) => lw.step(&mut self.field, self.eq, &alpha, delta)?,
        }
        self.steps += 1;
        self.field.time += delta;
        self.check_admissible()?;
        self.fill()?;
        Ok(StepInfo { step: self.steps, time: self.field.time, delta })
    }

    /// Marches to `t_end`, calling `observer` after every step.
    pub fn run_until<F>(&mut self, t_end: f64, mut observer: F) -> Result<()>
    where
        F: FnMut(&Self, StepInfo) -> Result<()>,
    {
        // relative slack so round-off in the accumulated time ends the loop
        let tol = 1e-12 * t_end.abs().max(1.0);
        while self.field.time < t_end - tol {
            let info = self.step(t_end).map_err(|e| annotate(e, self.steps + 1, self.field.time))?;
            observer(self, info)?;
        }
        Ok(())
    }

    /// Derivative tower of the current state with the CFL step (LW schemes).
    pub fn tower(&self) -> Result<Tower> {
        let Integrator::Lw(lw) = &self.integrator else {
            return Err(SolverError::Config("Runge-Kutta schemes have no derivative tower".into()));
        };
        let (delta, alpha) = stable_step(&self.field, self.eq, self.cfl)?;
        lw.tower(&self.field, self.eq, &alpha, delta)
    }

    fn check_admissible(&self) -> Result<()> {
        for (i, j) in self.field.interior_iter() {
            let u = self.field.node(i, j);
            if !self.eq.admissible(u) {
                return Err(SolverError::Positivity(format!("inadmissible state {u:?} at node ({i}, {j})")));
            }
        }
        Ok(())
    }
}

fn annotate(e: SolverError, step: usize, t: f64) -> SolverError {
    match e {
        SolverError::Positivity(msg) => SolverError::Positivity(format!("step {step} from t = {t:.6e}: {msg}")),
        other => other,
    }
}
