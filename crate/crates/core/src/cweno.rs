//! Central WENO approximation of the first flux derivative, used to keep
//! O(1/h) fluctuations at discontinuities out of the Lax-Wendroff recursion.
//!
//! On the `2r - 1` node stencil `i-r+1 ..= i+r-1` each substencil `k`
//! contributes `q_k'(x_i) = (p_k(x_{i+1/2}) - p_k(x_{i-1/2})) / h`, where
//! `p_k` is the degree `r - 1` polynomial whose cell averages equal the flux
//! samples. The ideal weights `c_k` recombine these into the full-stencil
//! derivative; the nonlinear weights use Jiang-Shu indicators with
//! `epsilon = lambda h^2` and exponent `ceil(r / 2)`.

use rayon::prelude::*;

use crate::equations::ConservationLaw;
use crate::error::{Result, SolverError};
use crate::grid::Field;
use crate::weno::{par_rows, SubstencilBasis, MAX_R};

/// Lower bound for the per-component `lambda` scale.
pub const LAMBDA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct CwenoDerivative {
    basis: SubstencilBasis,
    ideal: Vec<f64>,
    slopes: Vec<Vec<f64>>,
    exponent: i32,
}

impl CwenoDerivative {
    pub fn new(r: usize) -> Result<Self> {
        let basis = SubstencilBasis::new(r)?;
        let slopes: Vec<Vec<f64>> =
            (0..r).map(|k| basis.right_face(k).iter().zip(basis.left_face(k)).map(|(a, b)| a - b).collect()).collect();
        let big: Vec<f64> = basis.big_right_face().iter().zip(basis.big_left_face()).map(|(a, b)| a - b).collect();
        let ideal = basis.ideal_weights(&slopes, &big);
        if ideal.iter().any(|&c| !(c > 0.0 && c < 1.0)) {
            return Err(SolverError::UnsupportedOrder(format!("no convex ideal weights for r = {r}: {ideal:?}")));
        }
        Ok(CwenoDerivative { basis, ideal, slopes, exponent: r.div_ceil(2) as i32 })
    }

    pub fn r(&self) -> usize {
        self.basis.r()
    }

    pub fn ideal_weights(&self) -> &[f64] {
        &self.ideal
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    /// `h q_k'(x_i)` as weights on substencil `k`'s values.
    pub fn slope_row(&self, k: usize) -> &[f64] {
        &self.slopes[k]
    }

    /// Smoothness indicator `I_k` of substencil `k` for a `2r - 1` window.
    pub fn smoothness(&self, k: usize, window: &[f64]) -> f64 {
        self.basis.smoothness(k, window)
    }

    /// `w_k = a_k / sum a`, `a_k = c_k / (I_k + epsilon)^m`.
    pub fn weights_from_indicators(&self, indicators: &[f64], epsilon: f64, out: &mut [f64]) {
        let r = self.r();
        let mut sum = 0.0;
        for k in 0..r {
            let a = self.ideal[k] / (indicators[k] + epsilon).powi(self.exponent);
            out[k] = a;
            sum += a;
        }
        for w in out.iter_mut().take(r) {
            *w /= sum;
        }
    }

    pub fn weights(&self, window: &[f64], h: f64, lambda: f64, out: &mut [f64]) {
        let mut ind = [0.0; MAX_R];
        for (k, v) in ind.iter_mut().enumerate().take(self.r()) {
            *v = self.basis.smoothness(k, window);
        }
        self.weights_from_indicators(&ind, lambda * h * h, out);
    }

    /// `-sum_k w_k q_k'(x_i)` from the flux samples `f_{i-r+1} ..= f_{i+r-1}`.
    #[inline]
    pub fn fluctuation_controlled_derivative(&self, window: &[f64], h: f64, lambda: f64) -> f64 {
        match (self.r(), self.exponent) {
            (2, 1) => self.derivative_fixed::<2, 1>(window, h, lambda),
            (3, 2) => self.derivative_fixed::<3, 2>(window, h, lambda),
            (4, 2) => self.derivative_fixed::<4, 2>(window, h, lambda),
            _ => self.derivative_generic(window, h, lambda),
        }
    }

    #[inline(always)]
    fn derivative_fixed<const R: usize, const P: usize>(&self, window: &[f64], h: f64, lambda: f64) -> f64 {
        let base = window[R - 1];
        let mut d = [0.0; 7];
        for t in 0..2 * R - 1 {
            d[t] = window[t] - base;
        }
        let eps = lambda * h * h;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..R {
            let beta = self.basis.smoothness_fixed::<R>(k, &d);
            let e = beta + eps;
            let mut ep = e;
            for _ in 1..P {
                ep *= e;
            }
            let w = self.ideal[k] / ep;
            let row = &self.slopes[k];
            let mut s = 0.0;
            for a in 0..R {
                s += row[a] * d[k + a];
            }
            num += w * s;
            den += w;
        }
        -(num / den) / h
    }

    fn derivative_generic(&self, window: &[f64], h: f64, lambda: f64) -> f64 {
        let r = self.r();
        let mut w = [0.0; MAX_R];
        self.weights(window, h, lambda, &mut w);
        let base = window[r - 1];
        let mut acc = 0.0;
        for k in 0..r {
            acc += w[k] * self.slope(k, window, base);
        }
        -acc / h
    }

    /// `h q_k'(x_i)`; slope rows sum to zero, so values are taken relative
    /// to `base`.
    #[inline]
    fn slope(&self, k: usize, window: &[f64], base: f64) -> f64 {
        let r = self.r();
        self.slopes[k].iter().zip(&window[k..k + r]).map(|(a, b)| a * (b - base)).sum()
    }

    /// Linear (ideal-weight) combination, `-sum_k c_k q_k'(x_i)`.
    pub fn linear_derivative(&self, window: &[f64], h: f64) -> f64 {
        let base = window[self.r() - 1];
        -(0..self.r()).map(|k| self.ideal[k] * self.slope(k, window, base)).sum::<f64>() / h
    }
}

/// Ideal derivative weights `c_0..c_{r-1}`.
pub fn ideal_derivative_weights(r: usize) -> Result<Vec<f64>> {
    Ok(CwenoDerivative::new(r)?.ideal)
}

/// Jiang-Shu indicator of a single substencil given its `r` flux values.
///
/// The indicator is expressed in scaled coordinates, so the grid spacing
/// enters only through the sample values themselves.
pub fn smoothness_indicator(substencil: &[f64]) -> Result<f64> {
    let r = substencil.len();
    let basis = SubstencilBasis::new(r)?;
    // place the substencil at offset 0 of a padded window
    let mut window = vec![0.0; 2 * r - 1];
    window[..r].copy_from_slice(substencil);
    Ok(basis.smoothness(0, &window))
}

/// Per-component `lambda = max(floor, max_i |f_{i+1} - f_{i-1}| / (2h))` over
/// the interior for the flux along `axis`.
fn lambda_scale(flux: &[f64], field: &Field, axis: usize) -> Vec<f64> {
    let grid = field.grid();
    let m = field.ncomp();
    let ns = grid.node_stride(axis);
    let h = grid.h(axis);
    let mut lambda = vec![LAMBDA_FLOOR; m];
    for (i, j) in field.interior_iter() {
        let k = grid.index(i, j);
        for (c, l) in lambda.iter_mut().enumerate() {
            let d = (flux[(k + ns) * m + c] - flux[(k - ns) * m + c]).abs() / (2.0 * h);
            if d > *l {
                *l = d;
            }
        }
    }
    lambda
}

/// Fluctuation-controlled `u_t` on the interior grown by `margin`, written
/// into `out` (field-shaped). Ghosts must be filled.
pub fn fluctuation_controlled_field<E: ConservationLaw + ?Sized>(
    field: &Field,
    eq: &E,
    cweno: &CwenoDerivative,
    margin: usize,
    out: &mut [f64],
) -> Result<()> {
    let grid = field.grid();
    let m = field.ncomp();
    let r = cweno.r();
    if margin + r > grid.ghost() {
        return Err(SolverError::Config(format!(
            "ghost width {} too small for margin {margin} with r = {r}",
            grid.ghost()
        )));
    }
    let region = grid.region(margin);
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut flux = vec![0.0; out.len()];
    let row_len = grid.ext(0) * m;
    let gy = grid.ghost_along(1) as isize;
    for axis in 0..grid.dim() {
        let h = grid.h(axis);
        let ns = grid.node_stride(axis) as isize;
        let reach = r as isize - 1;
        let (ilo, ihi, jlo, jhi) = if axis == 0 {
            (region.i.0 - reach, region.i.1 + reach, region.j.0, region.j.1)
        } else {
            (region.i.0, region.i.1, region.j.0 - reach, region.j.1 + reach)
        };
        // lambda needs +-1 neighbours of every interior node
        let (ilo, ihi) = (ilo.min(-1), ihi.max(grid.n(0) as isize + 1));
        let (jlo, jhi) = if axis == 1 { (jlo.min(-1), jhi.max(grid.n(1) as isize + 1)) } else { (jlo, jhi) };
        flux.par_chunks_mut(row_len).enumerate().for_each(|(jj, row)| {
            let j = jj as isize - gy;
            if j >= jlo && j < jhi {
                for i in ilo..ihi {
                    let base = grid.col(i) * m;
                    eq.flux(field.node(i, j), axis, &mut row[base..base + m]);
                }
            }
        });
        let lambda = lambda_scale(&flux, field, axis);
        let flux_ref = &flux;
        par_rows(out, field, m, region.j, |j, row| {
            let mut window = [0.0; 2 * MAX_R - 1];
            for i in region.i.0..region.i.1 {
                let node = grid.index(i, j) as isize;
                let local = grid.col(i) * m;
                for c in 0..m {
                    for (t, w) in window.iter_mut().enumerate().take(2 * r - 1) {
                        let off = t as isize - reach;
                        *w = flux_ref[((node + off * ns) as usize) * m + c];
                    }
                    row[local + c] += cweno.fluctuation_controlled_derivative(&window[..2 * r - 1], h, lambda[c]);
                }
            }
        });
    }
    Ok(())
}
