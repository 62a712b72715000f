//! One-step Lax-Wendroff time integration of arbitrary order `R`.
//!
//! The first time derivative comes from the upwind WENO flux difference.
//! Higher ones follow the recursion
//!
//! ```text
//! f~(k)   = D_delta^{k, ceil((R-k)/2)} [ f(T_k(j delta)) ]
//! u~(k+1) = -sum_axes D_h^{1, ceil((R-k)/2)} f~(k)
//! ```
//!
//! where `T_k` is the degree-`k` Taylor polynomial built from the derivatives
//! computed so far. The update is `u + sum_l delta^l / l! u~(l)`. With
//! fluctuation control the CWENO derivative replaces `u~(1)` inside the
//! recursion only; the update keeps the upwind one.
//!
//! The exact variant (scalar 1D, `R <= 3`) replaces the temporal difference
//! by the chain rule: `f~(1) = f' u_t`, `f~(2) = f'' u_t^2 + f' u_tt`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cweno::{fluctuation_controlled_field, CwenoDerivative};
use crate::equations::ConservationLaw;
use crate::error::{Result, SolverError};
use crate::grid::Field;
use crate::stencil::{centered_coefficients, StencilCoefficients};
use crate::weno::{flux_derivative, WenoReconstructor};

/// Largest component count handled by the fixed-size node buffers.
pub const MAX_COMPONENTS: usize = 8;

/// Largest temporal stencil length (offsets `-3..=3`, enough for `R <= 7`).
const MAX_SAMPLES: usize = 7;

/// Accuracy parameter `q_k = ceil((R - k) / 2)` of the level-`k` operators.
pub fn level_accuracy(time_order: usize, k: usize) -> usize {
    (time_order - k).div_ceil(2)
}

/// Ghost width needed by WENO of width `r` combined with an order-`R`
/// recursion: `r + sum_{k=1}^{R-1} ceil((R-k)/2)`.
pub fn ghost_width(r: usize, time_order: usize) -> usize {
    r + (1..time_order).map(|k| level_accuracy(time_order, k)).sum::<usize>()
}

/// `sum_{l<=k} derivs[l] rho^l / l!` by Horner's rule.
pub fn taylor_eval(derivs: &[&[f64]], rho: f64, out: &mut [f64]) {
    let k = derivs.len() - 1;
    let m = out.len();
    out.copy_from_slice(&derivs[k][..m]);
    for l in (0..k).rev() {
        let s = rho / (l + 1) as f64;
        let d = &derivs[l][..m];
        for c in 0..m {
            out[c] = d[c] + out[c] * s;
        }
    }
}

/// Which temporal samples `T_k(j delta)` the recursion accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleCheck {
    /// Every sample must be admissible (positive density and pressure).
    Strict,
    /// Samples only need to lie in the flux's domain (finite, positive
    /// density); transiently negative pressure inside the Taylor
    /// extrapolation is tolerated. Updated states are always checked
    /// strictly by the driver.
    #[default]
    FluxDomain,
}

impl SampleCheck {
    #[inline]
    pub fn accepts<E: ConservationLaw + ?Sized>(self, eq: &E, u: &[f64]) -> bool {
        match self {
            SampleCheck::Strict => eq.admissible(u),
            SampleCheck::FluxDomain => eq.in_flux_domain(u),
        }
    }
}

/// `f~(k)` at one node from the Taylor data `derivs[0..=k]`.
pub fn flux_time_derivative<E: ConservationLaw + ?Sized>(
    derivs: &[&[f64]],
    eq: &E,
    axis: usize,
    delta: f64,
    time_order: usize,
    check: SampleCheck,
) -> Result<Vec<f64>> {
    let k = derivs.len() - 1;
    if k == 0 || k >= time_order {
        return Err(SolverError::Config(format!("flux time derivative level {k} outside 1..{time_order}")));
    }
    let st = centered_coefficients(k, level_accuracy(time_order, k))?;
    let m = eq.ncomp();
    let mut state = vec![0.0; m];
    let mut samples = vec![0.0; st.offsets.len() * m];
    for (&o, f) in st.offsets.iter().zip(samples.chunks_exact_mut(m)) {
        taylor_eval(derivs, o as f64 * delta, &mut state);
        if !check.accepts(eq, &state) {
            return Err(SolverError::Positivity(format!(
                "temporal sample T_{k}({o} delta) is inadmissible: {state:?}"
            )));
        }
        eq.flux(&state, axis, f);
    }
    let mut out = vec![0.0; m];
    combine_symmetric(&st, &samples, m, delta.powi(k as i32), &mut out);
    Ok(out)
}

/// Applies a centered operator to `samples` (one `width`-vector per offset),
/// pairing mirrored offsets so constants cancel exactly:
/// `sum_o w_o (s_o - s_-o)` for odd order, `sum_o w_o (s_o + s_-o - 2 s_0)`
/// for even order.
#[inline]
fn combine_symmetric(st: &StencilCoefficients, samples: &[f64], width: usize, scale: f64, out: &mut [f64]) {
    let s = st.half_width();
    let even = st.p.is_multiple_of(2);
    let centre = &samples[s * width..(s + 1) * width];
    for (c, o) in out.iter_mut().enumerate().take(width) {
        let mut acc = 0.0;
        for t in 1..=s {
            let plus = samples[(s + t) * width + c];
            let minus = samples[(s - t) * width + c];
            let pair = if even { (plus - centre[c]) + (minus - centre[c]) } else { plus - minus };
            acc += st.weights[s + t] * pair;
        }
        *o = acc / scale;
    }
}

/// Per-node time derivatives `u~(0..=R)` in field-shaped storage.
#[derive(Debug, Clone)]
pub struct Tower {
    pub delta: f64,
    /// `levels[l]` holds `u~(l)`; level `l` is valid on the interior grown by
    /// the level's margin.
    pub levels: Vec<Vec<f64>>,
    /// Fluctuation-controlled first derivative used by the recursion.
    pub controlled: Option<Vec<f64>>,
}

impl Tower {
    /// `max_l |delta^l u~(l) / l!|` at storage node `node`, component `c`.
    pub fn max_taylor_term(&self, node: usize, m: usize, c: usize) -> f64 {
        let mut scale = 1.0;
        let mut best = 0.0f64;
        for (l, level) in self.levels.iter().enumerate() {
            if l > 0 {
                scale *= self.delta / l as f64;
            }
            best = best.max((scale * level[node * m + c]).abs());
        }
        best
    }
}

#[derive(Debug, Clone)]
pub struct LaxWendroff {
    time_order: usize,
    weno: WenoReconstructor,
    cweno: Option<CwenoDerivative>,
    exact: bool,
    sample_check: SampleCheck,
    /// index `k`: temporal operator `D^{k, q_k}` (unused at 0)
    temporal: Vec<StencilCoefficients>,
    /// index `k`: spatial operator `D^{1, q_k}`
    spatial: Vec<StencilCoefficients>,
    /// index `k`: margin on which `u~(k)` is needed
    margins: Vec<usize>,
}

impl LaxWendroff {
    pub fn new(r: usize, time_order: usize, fluctuation_control: bool, exact: bool) -> Result<Self> {
        if !(1..=7).contains(&time_order) {
            return Err(SolverError::UnsupportedOrder(format!("time order must lie in 1..=7, got {time_order}")));
        }
        if exact && time_order > 3 {
            return Err(SolverError::UnsupportedOrder(format!(
                "exact Lax-Wendroff is limited to R <= 3, got {time_order}"
            )));
        }
        let weno = WenoReconstructor::new(r)?;
        let cweno = if fluctuation_control { Some(CwenoDerivative::new(r)?) } else { None };
        let mut temporal = vec![centered_coefficients(1, 1)?];
        let mut spatial = vec![centered_coefficients(1, 1)?];
        for k in 1..time_order {
            let q = level_accuracy(time_order, k);
            temporal.push(centered_coefficients(k, q)?);
            spatial.push(centered_coefficients(1, q)?);
        }
        let mut margins = vec![0; time_order + 1];
        for k in (1..time_order).rev() {
            margins[k] = margins[k + 1] + spatial[k].half_width();
        }
        margins[0] = margins[1];
        Ok(LaxWendroff {
            time_order,
            weno,
            cweno,
            exact,
            sample_check: SampleCheck::default(),
            temporal,
            spatial,
            margins,
        })
    }

    pub fn with_sample_check(mut self, check: SampleCheck) -> Self {
        self.sample_check = check;
        self
    }

    pub fn sample_check(&self) -> SampleCheck {
        self.sample_check
    }

    pub fn time_order(&self) -> usize {
        self.time_order
    }

    pub fn r(&self) -> usize {
        self.weno.r()
    }

    pub fn ghost_width(&self) -> usize {
        ghost_width(self.weno.r(), self.time_order)
    }

    pub fn fluctuation_control(&self) -> bool {
        self.cweno.is_some()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Builds the derivative tower for a field whose ghosts are filled.
    pub fn tower<E: ConservationLaw + ?Sized>(
        &self,
        field: &Field,
        eq: &E,
        alpha: &[f64],
        delta: f64,
    ) -> Result<Tower> {
        let grid = field.grid();
        let m = field.ncomp();
        let dim = grid.dim();
        if eq.ndim() != dim || eq.ncomp() != m {
            return Err(SolverError::Config(format!(
                "{} law does not match a {dim}D field with {m} components",
                eq.name()
            )));
        }
        if m > MAX_COMPONENTS {
            return Err(SolverError::Config(format!("{m} components exceed {MAX_COMPONENTS}")));
        }
        if grid.ghost() < self.ghost_width() {
            return Err(SolverError::Config(format!(
                "ghost width {} below the required {}",
                grid.ghost(),
                self.ghost_width()
            )));
        }
        if self.exact && (m != 1 || dim != 1 || eq.scalar_derivatives(0.0).is_none()) {
            return Err(SolverError::Config("exact Lax-Wendroff needs a scalar 1D law with known f', f''".into()));
        }
        let len = field.data.len();
        let mut levels = Vec::with_capacity(self.time_order + 1);
        levels.push(field.data.clone());
        let mut first = vec![0.0; len];
        flux_derivative(field, eq, &self.weno, alpha, self.margins[1], &mut first)?;
        levels.push(first);
        let controlled = match &self.cweno {
            Some(cw) => {
                let mut buf = vec![0.0; len];
                fluctuation_controlled_field(field, eq, cw, self.margins[1], &mut buf)?;
                Some(buf)
            }
            None => None,
        };

        let width = m * dim;
        let mut ft = vec![0.0; grid.total_nodes() * width];
        for k in 1..self.time_order {
            // Taylor data used by the recursion
            let rec: Vec<&[f64]> = (0..=k)
                .map(|l| match (&controlled, l) {
                    (Some(c), 1) => c.as_slice(),
                    _ => levels[l].as_slice(),
                })
                .collect();
            let region = grid.region(self.margins[k]);
            let temporal = &self.temporal[k];
            let sample_check = self.sample_check;
            let scale = delta.powi(k as i32);
            try_rows(&mut ft, field, width, region.j, |j, row| {
                let mut state = [0.0; MAX_COMPONENTS];
                let mut samples = [0.0; MAX_SAMPLES * 2 * MAX_COMPONENTS];
                let mut d: [&[f64]; 8] = [&[]; 8];
                for i in region.i.0..region.i.1 {
                    let node = grid.index(i, j);
                    for (l, src) in rec.iter().enumerate() {
                        d[l] = &src[node * m..(node + 1) * m];
                    }
                    let out = &mut row[grid.col(i) * width..(grid.col(i) + 1) * width];
                    out.iter_mut().for_each(|v| *v = 0.0);
                    if self.exact {
                        exact_flux_derivative(eq, &d[..=k], &mut out[..1]);
                        continue;
                    }
                    for (t, &o) in temporal.offsets.iter().enumerate() {
                        if o == 0 && k % 2 == 1 {
                            // odd differences never read the centre sample
                            continue;
                        }
                        taylor_eval(&d[..=k], o as f64 * delta, &mut state[..m]);
                        if !sample_check.accepts(eq, &state[..m]) {
                            return Err(SolverError::Positivity(format!(
                                "temporal sample T_{k}({o} delta) inadmissible at node ({i}, {j}): {:?}",
                                &state[..m]
                            )));
                        }
                        eq.fluxes(&state[..m], &mut samples[t * width..(t + 1) * width]);
                    }
                    combine_symmetric(temporal, &samples, width, scale, out);
                }
                Ok(())
            })?;

            let mut next = vec![0.0; len];
            let region = grid.region(self.margins[k + 1]);
            let spatial = &self.spatial[k];
            let ft_ref = &ft;
            try_rows(&mut next, field, m, region.j, |j, row| {
                for i in region.i.0..region.i.1 {
                    let node = grid.index(i, j) as isize;
                    let local = grid.col(i) * m;
                    for axis in 0..dim {
                        let ns = grid.node_stride(axis) as isize;
                        let h = grid.h(axis);
                        for c in 0..m {
                            let mut acc = 0.0;
                            for (&o, &w) in spatial.offsets.iter().zip(&spatial.weights) {
                                acc += w * ft_ref[((node + o * ns) as usize) * width + axis * m + c];
                            }
                            row[local + c] -= acc / h;
                        }
                    }
                }
                Ok(())
            })?;
            levels.push(next);
        }
        Ok(Tower { delta, levels, controlled })
    }

    /// Advances the interior of `field` by `delta`. Ghosts must be filled at
    /// the current time; they are left stale.
    pub fn step<E: ConservationLaw + ?Sized>(
        &self,
        field: &mut Field,
        eq: &E,
        alpha: &[f64],
        delta: f64,
    ) -> Result<()> {
        let tower = self.tower(field, eq, alpha, delta)?;
        apply_taylor(field, &tower);
        Ok(())
    }
}

/// `u <- sum_l delta^l / l! u~(l)` on the interior.
pub fn apply_taylor(field: &mut Field, tower: &Tower) {
    let grid = field.grid().clone();
    let m = field.ncomp();
    let mut coef = Vec::with_capacity(tower.levels.len());
    let mut c = 1.0;
    for l in 0..tower.levels.len() {
        if l > 0 {
            c *= tower.delta / l as f64;
        }
        coef.push(c);
    }
    let levels = &tower.levels;
    let region = grid.region(0);
    let row_len = grid.ext(0) * m;
    let gy = grid.ghost_along(1) as isize;
    field.data.par_chunks_mut(row_len).enumerate().for_each(|(jj, row)| {
        let j = jj as isize - gy;
        if !region.contains_row(j) {
            return;
        }
        for i in region.i.0..region.i.1 {
            let node = grid.index(i, j);
            let local = grid.col(i) * m;
            for cc in 0..m {
                let mut acc = 0.0;
                // highest order first keeps small terms from being swamped
                for l in (1..levels.len()).rev() {
                    acc += coef[l] * levels[l][node * m + cc];
                }
                row[local + cc] += acc;
            }
        }
    });
}

fn exact_flux_derivative<E: ConservationLaw + ?Sized>(eq: &E, d: &[&[f64]], out: &mut [f64]) {
    let (fp, fpp) = eq.scalar_derivatives(d[0][0]).expect("checked scalar law");
    out[0] = match d.len() - 1 {
        1 => fp * d[1][0],
        2 => fpp * d[1][0] * d[1][0] + fp * d[2][0],
        k => unreachable!("exact level {k}"),
    };
}

/// Fallible parallel map over padded storage rows in `rows`.
pub(crate) fn try_rows<F>(buf: &mut [f64], field: &Field, width: usize, rows: (isize, isize), f: F) -> Result<()>
where
    F: Fn(isize, &mut [f64]) -> Result<()> + Sync + Send,
{
    let grid = field.grid();
    let row_len = grid.ext(0) * width;
    let gy = grid.ghost_along(1) as isize;
    buf.par_chunks_mut(row_len).enumerate().try_for_each(|(jj, row)| {
        let j = jj as isize - gy;
        if j >= rows.0 && j < rows.1 {
            f(j, row)
        } else {
            Ok(())
        }
    })
}
