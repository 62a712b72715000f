//! Third-order TVD Runge-Kutta (Shu-Osher) with the WENO flux derivative as
//! the spatial operator.

use crate::equations::ConservationLaw;
use crate::error::Result;
use crate::grid::{fill_ghosts, BoundarySpec, Field};
use crate::weno::{flux_derivative, WenoReconstructor};

#[derive(Debug, Clone)]
pub struct Rk3 {
    weno: WenoReconstructor,
}

impl Rk3 {
    pub fn new(r: usize) -> Result<Self> {
        Ok(Rk3 { weno: WenoReconstructor::new(r)? })
    }

    pub fn r(&self) -> usize {
        self.weno.r()
    }

    pub fn ghost_width(&self) -> usize {
        self.weno.r()
    }

    /// One step of size `delta` from `field.time`. Ghosts must be filled at
    /// the current time; stages refill them at `t + delta` and
    /// `t + delta / 2`. The splitting speeds `alpha` stay frozen.
    pub fn step<E: ConservationLaw + ?Sized>(
        &self,
        field: &mut Field,
        eq: &E,
        bc: &BoundarySpec,
        alpha: &[f64],
        delta: f64,
    ) -> Result<()> {
        let t = field.time;
        let mut l = vec![0.0; field.data.len()];
        let un = field.data.clone();

        // u1 = u + delta L(u)
        flux_derivative(field, eq, &self.weno, alpha, 0, &mut l)?;
        for (u, d) in field.data.iter_mut().zip(&l) {
            *u += delta * d;
        }
        fill_ghosts(field, bc, eq, t + delta)?;

        // u2 = 3/4 u + 1/4 (u1 + delta L(u1))
        flux_derivative(field, eq, &self.weno, alpha, 0, &mut l)?;
        for ((u, d), u0) in field.data.iter_mut().zip(&l).zip(&un) {
            *u = 0.75 * u0 + 0.25 * (*u + delta * d);
        }
        fill_ghosts(field, bc, eq, t + 0.5 * delta)?;

        // u^{n+1} = 1/3 u + 2/3 (u2 + delta L(u2))
        flux_derivative(field, eq, &self.weno, alpha, 0, &mut l)?;
        for ((u, d), u0) in field.data.iter_mut().zip(&l).zip(&un) {
            *u = u0 / 3.0 + 2.0 / 3.0 * (*u + delta * d);
        }
        Ok(())
    }
}
