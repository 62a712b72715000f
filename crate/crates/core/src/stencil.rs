//! Centered finite-difference operators of arbitrary derivative order `p`
//! and accuracy order `2q`.
//!
//! Weights are generated with Fornberg's recurrence on the integer offsets
//! `-s..=s`, `s = ceil(p/2) + q - 1`, which solves the same moment system
//! `sum_j w_j o_j^n = p! [n == p]` as a Vandermonde solve but stays well
//! conditioned for wide stencils.

use crate::error::{Result, SolverError};

/// Largest supported `p + 2q`.
pub const MAX_TOTAL_ORDER: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct StencilCoefficients {
    pub p: usize,
    pub q: usize,
    pub offsets: Vec<isize>,
    pub weights: Vec<f64>,
}

impl StencilCoefficients {
    pub fn half_width(&self) -> usize {
        self.offsets.len() / 2
    }

    /// Applies the operator to `samples` (one m-vector per offset, in offset
    /// order) on a grid with spacing `h`.
    pub fn apply(&self, samples: &[&[f64]], h: f64) -> Vec<f64> {
        assert_eq!(samples.len(), self.weights.len(), "samples must cover every offset");
        let m = samples.first().map_or(0, |s| s.len());
        let mut out = vec![0.0; m];
        for (w, s) in self.weights.iter().zip(samples) {
            for (o, v) in out.iter_mut().zip(s.iter()) {
                *o += w * v;
            }
        }
        let scale = h.powi(self.p as i32);
        out.iter_mut().for_each(|o| *o /= scale);
        out
    }

    /// Scalar convenience form of [`apply`](Self::apply).
    pub fn apply_scalar(&self, samples: &[f64], h: f64) -> f64 {
        assert_eq!(samples.len(), self.weights.len(), "samples must cover every offset");
        let acc: f64 = self.weights.iter().zip(samples).map(|(w, v)| w * v).sum();
        acc / h.powi(self.p as i32)
    }
}

/// Half-width of the minimal centered stencil for `Delta^{p,q}`.
pub fn half_width(p: usize, q: usize) -> usize {
    p.div_ceil(2) + q - 1
}

pub fn centered_coefficients(p: usize, q: usize) -> Result<StencilCoefficients> {
    if p == 0 || q == 0 {
        return Err(SolverError::Config(format!("stencil needs p >= 1 and q >= 1, got ({p}, {q})")));
    }
    if p + 2 * q > MAX_TOTAL_ORDER {
        return Err(SolverError::UnsupportedOrder(format!("p + 2q = {} exceeds {MAX_TOTAL_ORDER}", p + 2 * q)));
    }
    let s = half_width(p, q) as isize;
    let offsets: Vec<isize> = (-s..=s).collect();
    let nodes: Vec<f64> = offsets.iter().map(|&o| o as f64).collect();
    let mut weights = fornberg(&nodes, 0.0, p);
    // Exact zeros and exact (anti)symmetry; the recurrence leaves round-off.
    let n = weights.len();
    for j in 0..n / 2 {
        let (a, b) = (weights[j], weights[n - 1 - j]);
        if p.is_multiple_of(2) {
            let avg = 0.5 * (a + b);
            weights[j] = avg;
            weights[n - 1 - j] = avg;
        } else {
            let avg = 0.5 * (b - a);
            weights[j] = -avg;
            weights[n - 1 - j] = avg;
        }
    }
    if p % 2 == 1 {
        weights[n / 2] = 0.0;
    }
    Ok(StencilCoefficients { p, q, offsets, weights })
}

/// Weights of the `order`-th derivative at `x0` from samples at `nodes`
/// (Fornberg 1988).
fn fornberg(nodes: &[f64], x0: f64, order: usize) -> Vec<f64> {
    let n = nodes.len();
    // c[k][j]: weight of node j for the k-th derivative
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    c.swap_remove(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_weights(p: usize, q: usize, expected: &[f64]) {
        let c = centered_coefficients(p, q).unwrap();
        assert_eq!(c.weights.len(), expected.len());
        for (w, e) in c.weights.iter().zip(expected) {
            assert_abs_diff_eq!(*w, *e, epsilon = 1e-14);
        }
    }

    #[test]
    fn classic_stencils() {
        assert_weights(1, 1, &[-0.5, 0.0, 0.5]);
        assert_weights(2, 1, &[1.0, -2.0, 1.0]);
        assert_weights(1, 2, &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0]);
        assert_eq!(centered_coefficients(1, 1).unwrap().offsets, vec![-1, 0, 1]);
    }

    #[test]
    fn apply_examples() {
        let c11 = centered_coefficients(1, 1).unwrap();
        let h = 0.1;
        assert_abs_diff_eq!(c11.apply_scalar(&[-h, 0.0, h], h), 1.0, epsilon = 1e-14);
        let c21 = centered_coefficients(2, 1).unwrap();
        assert_eq!(c21.apply_scalar(&[3.0, 3.0, 3.0], 0.25), 0.0);
        let c12 = centered_coefficients(1, 2).unwrap();
        let h = 0.5f64;
        let samples: Vec<f64> = (-2..=2).map(|j| (j as f64 * h).powi(4)).collect();
        assert_eq!(c12.apply_scalar(&samples, h), 0.0);
    }

    #[test]
    fn apply_vector_samples() {
        let c = centered_coefficients(1, 1).unwrap();
        let a = [0.0, 10.0];
        let b = [1.0, 10.0];
        let d = [2.0, 10.0];
        let out = c.apply(&[&a, &b, &d], 1.0);
        assert_abs_diff_eq!(out[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    #[should_panic(expected = "cover every offset")]
    fn missing_offsets_panic() {
        let c = centered_coefficients(1, 2).unwrap();
        c.apply_scalar(&[1.0, 2.0, 3.0], 1.0);
    }

    #[test]
    fn invalid_orders() {
        assert!(matches!(centered_coefficients(0, 1), Err(SolverError::Config(_))));
        assert!(matches!(centered_coefficients(1, 10), Err(SolverError::UnsupportedOrder(_))));
        assert!(centered_coefficients(2, 9).is_ok());
    }

    #[test]
    fn exact_on_monomials() {
        for p in 1..=6 {
            for q in 1..=3 {
                if p + 2 * q > 12 {
                    continue;
                }
                let c = centered_coefficients(p, q).unwrap();
                for h in [1.0, 0.1] {
                    for j in 0..p + 2 * q {
                        // derivative of x^j at a = 0.3
                        let a = 0.3f64;
                        let samples: Vec<f64> = c.offsets.iter().map(|&o| (a + o as f64 * h).powi(j as i32)).collect();
                        let exact = if j < p {
                            0.0
                        } else {
                            let fall: f64 = ((j - p + 1)..=j).map(|v| v as f64).product();
                            fall * a.powi((j - p) as i32)
                        };
                        let got = c.apply_scalar(&samples, h);
                        // dot-product rounding bound on top of the relative target
                        let scale: f64 =
                            c.weights.iter().zip(&samples).map(|(w, v)| (w * v).abs()).sum::<f64>() / h.powi(p as i32);
                        let tol = 1e-10 * exact.abs().max(1.0) + 32.0 * f64::EPSILON * scale;
                        assert!((got - exact).abs() <= tol, "p={p} q={q} j={j} h={h}: {got} vs {exact}");
                    }
                }
            }
        }
    }

    #[test]
    fn weight_parity() {
        for p in 1..=5 {
            for q in 1..=4 {
                let w = centered_coefficients(p, q).unwrap().weights;
                let n = w.len();
                for j in 0..n {
                    let mirrored = if p % 2 == 0 { w[n - 1 - j] } else { -w[n - 1 - j] };
                    assert_eq!(w[j], mirrored);
                }
            }
        }
    }
}
