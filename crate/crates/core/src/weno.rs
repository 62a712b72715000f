//! Upwind WENO reconstruction of order `2r - 1` and the flux-form
//! (Shu-Osher) first derivative with global Lax-Friedrichs splitting.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::equations::ConservationLaw;
use crate::error::{Result, SolverError};
use crate::grid::Field;

/// Largest supported substencil width.
pub const MAX_R: usize = 6;

/// Sliding-average polynomials on the `2r - 1` cells around a center cell.
///
/// Window index `t` (0-based) refers to the cell whose center sits at
/// `t - (r - 1)` in units of `h` relative to the center cell. Substencil `k`
/// covers window indices `k..k + r`. For each substencil the basis stores the
/// polynomial's values at the center cell's faces and the Jiang-Shu
/// smoothness indicator as a quadratic form in the window values, all in
/// scaled coordinates so they are independent of `h`.
#[derive(Debug, Clone)]
pub struct SubstencilBasis {
    r: usize,
    right: Vec<Vec<f64>>,
    left: Vec<Vec<f64>>,
    smoothness: Vec<Vec<f64>>,
    // the same quadratic forms at a fixed row stride, for unrolled kernels
    quad: [[f64; MAX_R * MAX_R]; MAX_R],
    big_right: Vec<f64>,
    big_left: Vec<f64>,
}

/// Rows of the inverse cell-average matrix: `coeffs[n][t]` is the weight of
/// window value `t` in the `xi^n` coefficient.
fn average_to_monomials(centers: &[f64]) -> DMatrix<f64> {
    let n = centers.len();
    let a = DMatrix::from_fn(n, n, |row, col| {
        let c = centers[row];
        let e = col as i32 + 1;
        ((c + 0.5).powi(e) - (c - 0.5).powi(e)) / e as f64
    });
    a.try_inverse().expect("cell-average matrix is nonsingular")
}

fn eval_row(coeffs: &DMatrix<f64>, xi: f64) -> Vec<f64> {
    let n = coeffs.nrows();
    (0..coeffs.ncols()).map(|t| (0..n).map(|p| coeffs[(p, t)] * xi.powi(p as i32)).sum()).collect()
}

impl SubstencilBasis {
    pub fn new(r: usize) -> Result<Self> {
        if !(2..=MAX_R).contains(&r) {
            return Err(SolverError::UnsupportedOrder(format!("substencil width r = {r} not in 2..={MAX_R}")));
        }
        let mut right = Vec::with_capacity(r);
        let mut left = Vec::with_capacity(r);
        let mut smoothness: Vec<Vec<f64>> = Vec::with_capacity(r);
        // integral over [-1/2, 1/2] of xi^e
        let moment = |e: usize| if e % 2 == 1 { 0.0 } else { 2.0 * 0.5f64.powi(e as i32 + 1) / (e + 1) as f64 };
        for k in 0..r {
            let centers: Vec<f64> = (0..r).map(|t| (k + t) as f64 - (r - 1) as f64).collect();
            let coeffs = average_to_monomials(&centers);
            right.push(eval_row(&coeffs, 0.5));
            left.push(eval_row(&coeffs, -0.5));
            // sum_l int (P^(l))^2 = a^T M a with a = coeffs * v
            let mut mono = DMatrix::<f64>::zeros(r, r);
            for l in 1..r {
                for n1 in l..r {
                    for n2 in l..r {
                        let f1: f64 = ((n1 - l + 1)..=n1).map(|v| v as f64).product();
                        let f2: f64 = ((n2 - l + 1)..=n2).map(|v| v as f64).product();
                        mono[(n1, n2)] += f1 * f2 * moment(n1 + n2 - 2 * l);
                    }
                }
            }
            let q = coeffs.transpose() * mono * &coeffs;
            // row-major (q is symmetric anyway)
            smoothness.push(q.transpose().iter().copied().collect());
        }
        let big_centers: Vec<f64> = (0..2 * r - 1).map(|t| t as f64 - (r - 1) as f64).collect();
        let big = average_to_monomials(&big_centers);
        let mut quad = [[0.0; MAX_R * MAX_R]; MAX_R];
        for (k, q) in smoothness.iter().enumerate() {
            for a in 0..r {
                quad[k][a * MAX_R..a * MAX_R + r].copy_from_slice(&q[a * r..(a + 1) * r]);
            }
        }
        Ok(SubstencilBasis {
            r,
            right,
            left,
            smoothness,
            quad,
            big_right: eval_row(&big, 0.5),
            big_left: eval_row(&big, -0.5),
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Value of substencil `k`'s polynomial at the right face of the center
    /// cell, as weights on that substencil's `r` values.
    pub fn right_face(&self, k: usize) -> &[f64] {
        &self.right[k]
    }

    pub fn left_face(&self, k: usize) -> &[f64] {
        &self.left[k]
    }

    /// Right-face weights of the full `2r - 1` cell polynomial.
    pub fn big_right_face(&self) -> &[f64] {
        &self.big_right
    }

    pub fn big_left_face(&self) -> &[f64] {
        &self.big_left
    }

    /// Jiang-Shu indicator of substencil `k` for the full window.
    #[inline]
    pub fn smoothness(&self, k: usize, window: &[f64]) -> f64 {
        // offsets from the center value keep constants exactly in the kernel
        let r = self.r;
        let base = window[r - 1];
        let v = &window[k..k + r];
        let q = &self.smoothness[k];
        let mut acc = 0.0;
        for a in 0..r {
            let mut row = 0.0;
            for b in 0..r {
                row += q[a * r + b] * (v[b] - base);
            }
            acc += (v[a] - base) * row;
        }
        acc
    }

    /// Indicator of substencil `k` from window offsets `d[t] = v[t] - v[r-1]`,
    /// for `R == self.r()`.
    #[inline(always)]
    pub(crate) fn smoothness_fixed<const R: usize>(&self, k: usize, d: &[f64; 7]) -> f64 {
        let q = &self.quad[k];
        let mut acc = 0.0;
        for a in 0..R {
            let mut row = 0.0;
            for b in 0..R {
                row += q[a * MAX_R + b] * d[k + b];
            }
            acc += d[k + a] * row;
        }
        acc
    }

    /// Convex weights `d_k` with `sum_k d_k rows_k = big`, where `rows_k` is
    /// placed at window offset `k`. The system is triangular in the first `r`
    /// window positions.
    pub fn ideal_weights(&self, rows: &[Vec<f64>], big: &[f64]) -> Vec<f64> {
        let r = self.r;
        let mut d = vec![0.0; r];
        for pos in 0..r {
            let mut acc = big[pos];
            for (k, dk) in d.iter().enumerate().take(pos) {
                acc -= dk * rows[k][pos - k];
            }
            d[pos] = acc / rows[pos][0];
        }
        d
    }
}

#[derive(Debug, Clone)]
pub struct WenoReconstructor {
    basis: SubstencilBasis,
    ideal: Vec<f64>,
    epsilon: f64,
    power: i32,
    // flat copies for the unrolled kernels
    right: [[f64; MAX_R]; MAX_R],
    ideal_fixed: [f64; MAX_R],
}

impl WenoReconstructor {
    /// Jiang-Shu WENO with `epsilon = 1e-6` and power 2.
    pub fn new(r: usize) -> Result<Self> {
        Self::with_parameters(r, 1e-6, 2)
    }

    pub fn with_parameters(r: usize, epsilon: f64, power: i32) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(SolverError::Config(format!("WENO epsilon must be positive, got {epsilon}")));
        }
        let basis = SubstencilBasis::new(r)?;
        let ideal = basis.ideal_weights(&basis.right, &basis.big_right);
        let mut right = [[0.0; MAX_R]; MAX_R];
        let mut ideal_fixed = [0.0; MAX_R];
        for k in 0..r {
            right[k][..r].copy_from_slice(&basis.right[k]);
            ideal_fixed[k] = ideal[k];
        }
        Ok(WenoReconstructor { basis, ideal, epsilon, power, right, ideal_fixed })
    }

    pub fn r(&self) -> usize {
        self.basis.r
    }

    pub fn ideal_weights(&self) -> &[f64] {
        &self.ideal
    }

    pub fn basis(&self) -> &SubstencilBasis {
        &self.basis
    }

    /// Nonlinear weights for a `2r - 1` window.
    pub fn weights(&self, window: &[f64], out: &mut [f64]) {
        let r = self.basis.r;
        let mut sum = 0.0;
        for k in 0..r {
            let beta = self.basis.smoothness(k, window);
            let a = self.ideal[k] / (self.epsilon + beta).powi(self.power);
            out[k] = a;
            sum += a;
        }
        for w in out.iter_mut().take(r) {
            *w /= sum;
        }
    }

    /// Interface value at the right face of the window's center cell.
    #[inline]
    pub fn reconstruct(&self, window: &[f64]) -> f64 {
        if self.power == 2 {
            match self.basis.r {
                2 => return self.reconstruct_fixed::<2>(window),
                3 => return self.reconstruct_fixed::<3>(window),
                4 => return self.reconstruct_fixed::<4>(window),
                _ => {}
            }
        }
        self.reconstruct_generic(window)
    }

    #[inline(always)]
    fn reconstruct_fixed<const R: usize>(&self, window: &[f64]) -> f64 {
        let base = window[R - 1];
        let mut d = [0.0; 7];
        for t in 0..2 * R - 1 {
            d[t] = window[t] - base;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..R {
            let c = &self.right[k];
            let beta = self.basis.smoothness_fixed::<R>(k, &d);
            let mut cand = 0.0;
            for a in 0..R {
                cand += c[a] * d[k + a];
            }
            let e = self.epsilon + beta;
            let w = self.ideal_fixed[k] / (e * e);
            num += w * cand;
            den += w;
        }
        base + num / den
    }

    fn reconstruct_generic(&self, window: &[f64]) -> f64 {
        let r = self.basis.r;
        let mut w = [0.0; MAX_R];
        self.weights(window, &mut w);
        let base = window[r - 1];
        let mut acc = 0.0;
        for k in 0..r {
            let c = &self.basis.right[k];
            let v = &window[k..k + r];
            let cand: f64 = c.iter().zip(v).map(|(a, b)| a * (b - base)).sum();
            acc += w[k] * cand;
        }
        base + acc
    }
}

/// Lax-Friedrichs-split WENO numerical flux at `x_{i+1/2}` from the `2r`
/// states `u_{i-r+1}, .., u_{i+r}`.
pub fn upwind_flux<E: ConservationLaw + ?Sized>(
    weno: &WenoReconstructor,
    states: &[&[f64]],
    eq: &E,
    axis: usize,
    alpha: f64,
) -> Vec<f64> {
    let r = weno.r();
    assert_eq!(states.len(), 2 * r, "upwind flux needs 2r states");
    let m = eq.ncomp();
    let mut flux = vec![0.0; m];
    let mut plus = vec![vec![0.0; 2 * r]; m];
    let mut minus = vec![vec![0.0; 2 * r]; m];
    for (t, u) in states.iter().enumerate() {
        eq.flux(u, axis, &mut flux);
        for c in 0..m {
            plus[c][t] = 0.5 * (flux[c] + alpha * u[c]);
            minus[c][t] = 0.5 * (flux[c] - alpha * u[c]);
        }
    }
    (0..m)
        .map(|c| {
            let wp = &plus[c][..2 * r - 1];
            let wm: Vec<f64> = minus[c][1..].iter().rev().copied().collect();
            weno.reconstruct(wp) + weno.reconstruct(&wm)
        })
        .collect()
}

/// Parallel map over padded rows `j` in `rows`, handing each closure the
/// full storage row (`ext(0) * width` values) for row `j`.
pub(crate) fn par_rows<F>(buf: &mut [f64], field: &Field, width: usize, rows: (isize, isize), f: F)
where
    F: Fn(isize, &mut [f64]) + Sync + Send,
{
    let grid = field.grid();
    let row_len = grid.ext(0) * width;
    let gy = grid.ghost_along(1) as isize;
    buf.par_chunks_mut(row_len).enumerate().for_each(|(jj, row)| {
        let j = jj as isize - gy;
        if j >= rows.0 && j < rows.1 {
            f(j, row);
        }
    });
}

/// `u_t = -sum_axes (fhat_{i+1/2} - fhat_{i-1/2}) / h` on the interior grown
/// by `margin`, written into `out` (field-shaped storage). `alpha[axis]` is
/// the splitting speed. Ghosts must be filled and `margin + r` must not
/// exceed the ghost width.
pub fn flux_derivative<E: ConservationLaw + ?Sized>(
    field: &Field,
    eq: &E,
    weno: &WenoReconstructor,
    alpha: &[f64],
    margin: usize,
    out: &mut [f64],
) -> Result<()> {
    let grid = field.grid();
    let r = weno.r();
    let m = field.ncomp();
    if margin + r > grid.ghost() {
        return Err(SolverError::Config(format!(
            "ghost width {} too small for margin {margin} with r = {r}",
            grid.ghost()
        )));
    }
    let n_total = grid.total_nodes() * m;
    assert_eq!(out.len(), n_total);
    let region = grid.region(margin);
    let mut plus = vec![0.0; n_total];
    let mut minus = vec![0.0; n_total];
    let mut hat = vec![0.0; n_total];
    out.iter_mut().for_each(|v| *v = 0.0);

    for axis in 0..grid.dim() {
        let a = alpha[axis];
        let h = grid.h(axis);
        let ns = grid.node_stride(axis) as isize;
        let ri = r as isize;
        // rows/cols that need split fluxes
        let (ilo, ihi, jlo, jhi) = if axis == 0 {
            (region.i.0 - ri, region.i.1 + ri, region.j.0, region.j.1)
        } else {
            (region.i.0, region.i.1, region.j.0 - ri, region.j.1 + ri)
        };
        {
            let split = |j: isize, prow: &mut [f64], mrow: &mut [f64]| {
                let mut f = [0.0; 8];
                for i in ilo..ihi {
                    let u = field.node(i, j);
                    eq.flux(u, axis, &mut f[..m]);
                    let base = grid.col(i) * m;
                    for c in 0..m {
                        prow[base + c] = 0.5 * (f[c] + a * u[c]);
                        mrow[base + c] = 0.5 * (f[c] - a * u[c]);
                    }
                }
            };
            let row_len = grid.ext(0) * m;
            let gy = grid.ghost_along(1) as isize;
            plus.par_chunks_mut(row_len).zip(minus.par_chunks_mut(row_len)).enumerate().for_each(
                |(jj, (prow, mrow))| {
                    let j = jj as isize - gy;
                    if j >= jlo && j < jhi {
                        split(j, prow, mrow);
                    }
                },
            );
        }
        // interface i+1/2 stored at node i, for i in [lo - 1, hi)
        let (hjlo, hjhi) = if axis == 0 { (region.j.0, region.j.1) } else { (region.j.0 - 1, region.j.1) };
        let hilo = if axis == 0 { region.i.0 - 1 } else { region.i.0 };
        let (plus_ref, minus_ref) = (&plus, &minus);
        par_rows(&mut hat, field, m, (hjlo, hjhi), |j, row| {
            let mut wp = [0.0; 2 * MAX_R - 1];
            let mut wm = [0.0; 2 * MAX_R - 1];
            for i in hilo..region.i.1 {
                let node = grid.index(i, j) as isize;
                let local = grid.col(i) * m;
                for c in 0..m {
                    for t in 0..(2 * r - 1) {
                        let off = t as isize - (ri - 1);
                        wp[t] = plus_ref[((node + off * ns) as usize) * m + c];
                        wm[t] = minus_ref[((node + (1 - off) * ns) as usize) * m + c];
                    }
                    row[local + c] = weno.reconstruct(&wp[..2 * r - 1]) + weno.reconstruct(&wm[..2 * r - 1]);
                }
            }
        });
        let hat_ref = &hat;
        par_rows(out, field, m, region.j, |j, row| {
            for i in region.i.0..region.i.1 {
                let node = grid.index(i, j);
                let prev = node - ns as usize;
                let local = grid.col(i) * m;
                for c in 0..m {
                    row[local + c] -= (hat_ref[node * m + c] - hat_ref[prev * m + c]) / h;
                }
            }
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{Advection, Burgers};
    use crate::grid::{fill_ghosts, BoundarySpec, Grid, Placement};
    use approx::assert_abs_diff_eq;

    #[test]
    fn classic_ideal_weights() {
        let w2 = WenoReconstructor::new(2).unwrap();
        assert_abs_diff_eq!(w2.ideal_weights()[0], 1.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w2.ideal_weights()[1], 2.0 / 3.0, epsilon = 1e-14);
        let w3 = WenoReconstructor::new(3).unwrap();
        for (a, b) in w3.ideal_weights().iter().zip([0.1, 0.6, 0.3]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn jiang_shu_indicators_r3() {
        let basis = SubstencilBasis::new(3).unwrap();
        let v = [0.3f64, -1.2, 2.5, 0.7, 4.1];
        let b0 = 13.0 / 12.0 * (v[0] - 2.0 * v[1] + v[2]).powi(2) + 0.25 * (v[0] - 4.0 * v[1] + 3.0 * v[2]).powi(2);
        let b1 = 13.0 / 12.0 * (v[1] - 2.0 * v[2] + v[3]).powi(2) + 0.25 * (v[1] - v[3]).powi(2);
        let b2 = 13.0 / 12.0 * (v[2] - 2.0 * v[3] + v[4]).powi(2) + 0.25 * (3.0 * v[2] - 4.0 * v[3] + v[4]).powi(2);
        assert_abs_diff_eq!(basis.smoothness(0, &v), b0, epsilon = 1e-11);
        assert_abs_diff_eq!(basis.smoothness(1, &v), b1, epsilon = 1e-11);
        assert_abs_diff_eq!(basis.smoothness(2, &v), b2, epsilon = 1e-11);
    }

    #[test]
    fn classic_candidate_rows_r3() {
        let basis = SubstencilBasis::new(3).unwrap();
        let expect = [
            [1.0 / 3.0, -7.0 / 6.0, 11.0 / 6.0],
            [-1.0 / 6.0, 5.0 / 6.0, 1.0 / 3.0],
            [1.0 / 3.0, 5.0 / 6.0, -1.0 / 6.0],
        ];
        for k in 0..3 {
            for t in 0..3 {
                assert_abs_diff_eq!(basis.right_face(k)[t], expect[k][t], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn reproduces_constants_and_lines() {
        for r in 2..=4 {
            let w = WenoReconstructor::new(r).unwrap();
            let c = vec![2.75; 2 * r - 1];
            assert_abs_diff_eq!(w.reconstruct(&c), 2.75, epsilon = 1e-13);
        }
        let w = WenoReconstructor::new(3).unwrap();
        // cell averages of f(x) = x on unit cells centered at -2..2
        let lin = [-2.0, -1.0, 0.0, 1.0, 2.0];
        assert_abs_diff_eq!(w.reconstruct(&lin), 0.5, epsilon = 1e-13);
    }

    #[test]
    fn weights_form_partition_of_unity() {
        let w = WenoReconstructor::new(3).unwrap();
        let mut out = [0.0; 3];
        for window in [[0.0, 0.0, 0.0, 1.0, 1.0], [1.0, 3.0, -2.0, 0.5, 8.0], [1.0; 5]] {
            w.weights(&window, &mut out);
            assert!(out.iter().all(|&x| (0.0..=1.0).contains(&x)));
            assert_abs_diff_eq!(out.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn step_picks_smooth_substencil() {
        // jump between window cells 3 and 4: only substencil 0 is smooth
        let w = WenoReconstructor::new(3).unwrap();
        let basis = w.basis();
        for h in [0.1, 0.05, 0.025] {
            let f = |x: f64| 1.0 + x;
            let window: Vec<f64> = (0..5)
                .map(|t| {
                    let x = (t as f64 - 2.0) * h;
                    if t >= 4 {
                        10.0 + f(x)
                    } else {
                        f(x)
                    }
                })
                .collect();
            let smooth: f64 = basis.right_face(0).iter().zip(&window[0..3]).map(|(a, b)| a * b).sum();
            let got = w.reconstruct(&window);
            assert!((got - smooth).abs() < 10.0 * h.powi(3), "h={h}: {got} vs {smooth}");
        }
    }

    #[test]
    fn upwind_flux_constant_state() {
        let w = WenoReconstructor::new(3).unwrap();
        let s = [1.7];
        let states: Vec<&[f64]> = vec![&s; 6];
        let f = upwind_flux(&w, &states, &Burgers, 0, 1.7);
        assert_abs_diff_eq!(f[0], 0.5 * 1.7 * 1.7, epsilon = 1e-14);
    }

    #[test]
    fn upwind_flux_degenerates_to_left_biased() {
        let w = WenoReconstructor::new(3).unwrap();
        let eq = Advection::new(vec![1.0]);
        let vals: Vec<[f64; 1]> = (0..6).map(|t| [((t as f64) * 0.3).sin()]).collect();
        let states: Vec<&[f64]> = vals.iter().map(|v| v.as_slice()).collect();
        let f = upwind_flux(&w, &states, &eq, 0, 1.0);
        let left: Vec<f64> = vals[..5].iter().map(|v| v[0]).collect();
        assert_abs_diff_eq!(f[0], w.reconstruct(&left), epsilon = 1e-15);
    }

    fn periodic_derivative_error(n: usize, r: usize) -> (f64, f64) {
        let grid = Grid::new(&[n], &[0.0], &[1.0], &[Placement::Nodal], r + 1).unwrap();
        let mut f = Field::new(grid, 1);
        let tau = std::f64::consts::TAU;
        f.sample(|x| Ok(vec![(tau * x[0]).sin()])).unwrap();
        let eq = Advection::new(vec![1.0]);
        fill_ghosts(&mut f, &BoundarySpec::periodic(1), &eq, 0.0).unwrap();
        let w = WenoReconstructor::new(r).unwrap();
        let mut out = vec![0.0; f.data.len()];
        flux_derivative(&f, &eq, &w, &[1.0], 0, &mut out).unwrap();
        let h = 1.0 / n as f64;
        let mut l1 = 0.0;
        let mut sum = 0.0;
        for i in 0..n as isize {
            let k = f.grid().index(i, 0);
            let x = f.grid().coord(0, i);
            l1 += h * (out[k] + tau * (tau * x).cos()).abs();
            sum += out[k];
        }
        (l1, sum)
    }

    #[test]
    fn flux_derivative_order_and_conservation() {
        // WENO3-JS with epsilon = 1e-6 is pre-asymptotic below ~300 nodes here
        for (r, n0) in [(2usize, 160usize), (3, 40)] {
            let (e1, s1) = periodic_derivative_error(n0, r);
            let (e2, _) = periodic_derivative_error(2 * n0, r);
            let (e3, s3) = periodic_derivative_error(4 * n0, r);
            let order = (e2 / e3).log2();
            assert!(order >= (2 * r - 1) as f64 - 0.3, "r={r}: order {order} ({e1} {e2} {e3})");
            assert!(s1.abs() < 1e-11 && s3.abs() < 1e-10, "telescoping sums {s1} {s3}");
        }
    }

    #[test]
    fn constant_field_has_zero_derivative() {
        let grid = Grid::new(&[8, 8], &[0.0, 0.0], &[1.0, 1.0], &[Placement::Nodal; 2], 3).unwrap();
        let mut f = Field::new(grid, 1);
        f.sample(|_| Ok(vec![0.4])).unwrap();
        let eq = Advection::new(vec![1.0, -2.0]);
        fill_ghosts(&mut f, &BoundarySpec::periodic(2), &eq, 0.0).unwrap();
        let w = WenoReconstructor::new(3).unwrap();
        let mut out = vec![1.0; f.data.len()];
        flux_derivative(&f, &eq, &w, &[1.0, 2.0], 0, &mut out).unwrap();
        for (i, j) in f.interior_iter() {
            assert_abs_diff_eq!(out[f.grid().index(i, j)], 0.0, epsilon = 1e-13);
        }
    }
}
