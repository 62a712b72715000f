//! Conservation-law systems `u_t + sum_i f^i(u)_{x_i} = 0`.
//!
//! Each system provides its physical flux per axis, the spectral radius of
//! the flux Jacobian used for CFL and Lax-Friedrichs splitting, and an
//! admissibility check. Scalar 1D laws can also expose `f'` and `f''`, which
//! the exact Lax-Wendroff oracle needs.

use crate::error::{Result, SolverError};

/// Ratio of specific heats used by every Euler problem in this crate.
pub const GAMMA: f64 = 1.4;

/// Floor applied to density and pressure inside wave-speed estimates only.
pub const POSITIVITY_FLOOR: f64 = 1e-12;

pub trait ConservationLaw: Send + Sync {
    /// Number of conserved components `m`.
    fn ncomp(&self) -> usize;

    /// Space dimension `d`.
    fn ndim(&self) -> usize;

    /// Physical flux along `axis`, written into `out` (length `ncomp`).
    fn flux(&self, u: &[f64], axis: usize, out: &mut [f64]);

    /// Fluxes along every axis, axis `a` at `out[a * m..(a + 1) * m]`.
    fn fluxes(&self, u: &[f64], out: &mut [f64]) {
        let m = self.ncomp();
        for axis in 0..self.ndim() {
            self.flux(u, axis, &mut out[axis * m..(axis + 1) * m]);
        }
    }

    /// Spectral radius of `df^axis/du` at a single state.
    fn wave_speed(&self, u: &[f64], axis: usize) -> Result<f64>;

    /// Whether the state lies in the admissible set (positive density and
    /// pressure for gas dynamics). Scalar laws accept every finite value.
    fn admissible(&self, u: &[f64]) -> bool {
        u.iter().all(|v| v.is_finite())
    }

    /// Whether the flux is well defined at `u` (it may still be unphysical).
    fn in_flux_domain(&self, u: &[f64]) -> bool {
        u.iter().all(|v| v.is_finite())
    }

    /// Mirror a state across a wall normal to `axis`.
    fn reflect(&self, _u: &mut [f64], _axis: usize) {}

    /// `(f'(u), f''(u))` for scalar one-dimensional laws.
    fn scalar_derivatives(&self, _u: f64) -> Option<(f64, f64)> {
        None
    }

    fn name(&self) -> &'static str;
}

/// Checked flux evaluation returning a fresh vector.
pub fn eval_flux<E: ConservationLaw + ?Sized>(eq: &E, u: &[f64], axis: usize) -> Result<Vec<f64>> {
    if u.len() != eq.ncomp() {
        return Err(SolverError::InvalidState(format!("state has {} components, expected {}", u.len(), eq.ncomp())));
    }
    if axis >= eq.ndim() {
        return Err(SolverError::Config(format!("axis {axis} out of range")));
    }
    if let Some(v) = u.iter().find(|v| !v.is_finite()) {
        return Err(SolverError::InvalidState(format!("non-finite component {v}")));
    }
    let mut out = vec![0.0; eq.ncomp()];
    eq.flux(u, axis, &mut out);
    Ok(out)
}

/// Linear advection `u_t + a . grad u = 0` in one or two dimensions.
#[derive(Debug, Clone)]
pub struct Advection {
    velocity: Vec<f64>,
}

impl Advection {
    pub fn new(velocity: Vec<f64>) -> Self {
        assert!(!velocity.is_empty() && velocity.len() <= 2, "advection supports 1 or 2 dimensions");
        Self { velocity }
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }
}

impl ConservationLaw for Advection {
    fn ncomp(&self) -> usize {
        1
    }

    fn ndim(&self) -> usize {
        self.velocity.len()
    }

    fn flux(&self, u: &[f64], axis: usize, out: &mut [f64]) {
        out[0] = self.velocity[axis] * u[0];
    }

    fn wave_speed(&self, _u: &[f64], axis: usize) -> Result<f64> {
        Ok(self.velocity[axis].abs())
    }

    fn scalar_derivatives(&self, _u: f64) -> Option<(f64, f64)> {
        (self.velocity.len() == 1).then(|| (self.velocity[0], 0.0))
    }

    fn name(&self) -> &'static str {
        "advection"
    }
}

/// Inviscid Burgers equation, `f(u) = u^2 / 2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Burgers;

impl ConservationLaw for Burgers {
    fn ncomp(&self) -> usize {
        1
    }

    fn ndim(&self) -> usize {
        1
    }

    fn flux(&self, u: &[f64], _axis: usize, out: &mut [f64]) {
        out[0] = 0.5 * u[0] * u[0];
    }

    fn wave_speed(&self, u: &[f64], _axis: usize) -> Result<f64> {
        Ok(u[0].abs())
    }

    fn scalar_derivatives(&self, u: f64) -> Option<(f64, f64)> {
        Some((u, 1.0))
    }

    fn name(&self) -> &'static str {
        "burgers"
    }
}

/// Compressible Euler equations for an ideal gas in `dim` = 1 or 2
/// dimensions. Conservative layout: `(rho, rho v_1, .., rho v_d, E)`.
#[derive(Debug, Clone, Copy)]
pub struct Euler {
    dim: usize,
    gamma: f64,
}

impl Euler {
    pub fn new(dim: usize) -> Self {
        assert!(dim == 1 || dim == 2, "Euler supports 1 or 2 dimensions");
        Self { dim, gamma: GAMMA }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `p = (gamma - 1) (E - |m|^2 / (2 rho))`.
    pub fn pressure(&self, u: &[f64]) -> f64 {
        let rho = u[0];
        let m2: f64 = u[1..=self.dim].iter().map(|m| m * m).sum();
        (self.gamma - 1.0) * (u[self.dim + 1] - 0.5 * m2 / rho)
    }

    /// `(rho, v, E) -> (rho, rho v, E)`.
    pub fn primitive_to_conservative(&self, prim: &[f64]) -> Result<Vec<f64>> {
        self.check_len(prim)?;
        let rho = prim[0];
        if !(rho > 0.0) {
            return Err(SolverError::Positivity(format!("density {rho} is not positive")));
        }
        let mut out = prim.to_vec();
        for m in &mut out[1..=self.dim] {
            *m *= rho;
        }
        Ok(out)
    }

    /// `(rho, rho v, E) -> (rho, v, E)`.
    pub fn conservative_to_primitive(&self, cons: &[f64]) -> Result<Vec<f64>> {
        self.check_len(cons)?;
        let rho = cons[0];
        if !(rho > 0.0) {
            return Err(SolverError::Positivity(format!("density {rho} is not positive")));
        }
        let mut out = cons.to_vec();
        for v in &mut out[1..=self.dim] {
            *v /= rho;
        }
        Ok(out)
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim + 2 {
            return Err(SolverError::InvalidState(format!(
                "Euler state has {} components, expected {}",
                u.len(),
                self.dim + 2
            )));
        }
        Ok(())
    }
}

impl ConservationLaw for Euler {
    fn ncomp(&self) -> usize {
        self.dim + 2
    }

    fn ndim(&self) -> usize {
        self.dim
    }

    fn flux(&self, u: &[f64], axis: usize, out: &mut [f64]) {
        let d = self.dim;
        let rho = u[0];
        let vn = u[1 + axis] / rho;
        let p = self.pressure(u);
        out[0] = u[1 + axis];
        for k in 0..d {
            out[1 + k] = u[1 + k] * vn;
        }
        out[1 + axis] += p;
        out[d + 1] = vn * (u[d + 1] + p);
    }

    fn fluxes(&self, u: &[f64], out: &mut [f64]) {
        let g1 = self.gamma - 1.0;
        match (self.dim, u, out) {
            (1, &[rho, m, e], [f0, f1, f2, ..]) => {
                let v = m / rho;
                let p = g1 * (e - 0.5 * m * v);
                (*f0, *f1, *f2) = (m, m * v + p, v * (e + p));
            }
            (2, &[rho, mx, my, e], [f0, f1, f2, f3, g0, g1_, g2, g3, ..]) => {
                let (vx, vy) = (mx / rho, my / rho);
                let p = g1 * (e - 0.5 * (mx * vx + my * vy));
                (*f0, *f1, *f2, *f3) = (mx, mx * vx + p, my * vx, vx * (e + p));
                (*g0, *g1_, *g2, *g3) = (my, mx * vy, my * vy + p, vy * (e + p));
            }
            (_, u, out) => {
                let m = self.dim + 2;
                for axis in 0..self.dim {
                    self.flux(u, axis, &mut out[axis * m..(axis + 1) * m]);
                }
            }
        }
    }

    fn wave_speed(&self, u: &[f64], axis: usize) -> Result<f64> {
        let rho = u[0];
        if !(rho > POSITIVITY_FLOOR) {
            return Err(SolverError::Positivity(format!("vacuum state, density {rho}")));
        }
        let p = self.pressure(u).max(POSITIVITY_FLOOR);
        let c = (self.gamma * p / rho).sqrt();
        Ok((u[1 + axis] / rho).abs() + c)
    }

    fn admissible(&self, u: &[f64]) -> bool {
        u.iter().all(|v| v.is_finite()) && u[0] > 0.0 && self.pressure(u) > 0.0
    }

    fn in_flux_domain(&self, u: &[f64]) -> bool {
        u.iter().all(|v| v.is_finite()) && u[0] > 0.0
    }

    fn reflect(&self, u: &mut [f64], axis: usize) {
        u[1 + axis] = -u[1 + axis];
    }

    fn name(&self) -> &'static str {
        if self.dim == 1 {
            "euler1d"
        } else {
            "euler2d"
        }
    }
}
