//! Density-component error norms and reference restriction.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::grid::{Field, Grid};

/// Grid-weighted L1 and max-norm errors of component 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub l1: f64,
    pub linf: f64,
}

/// `L1 = (prod h) sum |e_0|`, `Linf = max |e_0|` over interior nodes.
pub fn error_norms(numeric: &Field, reference: &Field) -> Result<ErrorNorms> {
    let (a, b) = (numeric.grid(), reference.grid());
    if !same_nodes(a, b) || numeric.ncomp() != reference.ncomp() {
        return Err(SolverError::Config("error norms need fields on the same grid".into()));
    }
    let (mut sum, mut max) = (0.0, 0.0f64);
    for (i, j) in numeric.interior_iter() {
        let e = (numeric.node(i, j)[0] - reference.node(i, j)[0]).abs();
        sum += e;
        max = max.max(e);
    }
    Ok(ErrorNorms { l1: a.cell_volume() * sum, linf: max })
}

fn same_nodes(a: &Grid, b: &Grid) -> bool {
    a.dim() == b.dim()
        && (0..a.dim()).all(|ax| {
            a.n(ax) == b.n(ax) && a.coord(ax, 0) == b.coord(ax, 0) && (a.h(ax) - b.h(ax)).abs() <= 1e-14 * a.h(ax)
        })
}

/// Copies the fine-grid nodes that coincide with `coarse` nodes into a new
/// field on `coarse` (interior only). Fails unless every coarse node has an
/// exact fine counterpart.
pub fn restrict(fine: &Field, coarse: &Grid) -> Result<Field> {
    let fg = fine.grid();
    if fg.dim() != coarse.dim() {
        return Err(SolverError::Config("restriction between grids of different dimension".into()));
    }
    let mut ratio = [1usize; 2];
    let mut shift = [0isize; 2];
    for ax in 0..coarse.dim() {
        let nf = fg.n(ax);
        let nc = coarse.n(ax);
        if !nf.is_multiple_of(nc) || fg.lower(ax) != coarse.lower(ax) || (fg.upper(ax) - coarse.upper(ax)).abs() > 1e-12
        {
            return Err(SolverError::Config(format!("axis {ax}: {nf} fine nodes do not nest {nc} coarse nodes")));
        }
        let k = nf / nc;
        // fine index of coarse node 0
        let offset = (coarse.coord(ax, 0) - fg.coord(ax, 0)) / fg.h(ax);
        if (offset - offset.round()).abs() > 1e-9 {
            return Err(SolverError::Config(format!("axis {ax}: coarse nodes fall between fine nodes")));
        }
        ratio[ax] = k;
        shift[ax] = offset.round() as isize;
    }
    let mut out = Field::new(coarse.clone(), fine.ncomp());
    out.time = fine.time;
    for j in 0..coarse.n(1) as isize {
        for i in 0..coarse.n(0) as isize {
            let fi = shift[0] + ratio[0] as isize * i;
            let fj = shift[1] + ratio[1] as isize * j;
            out.node_mut(i, j).copy_from_slice(fine.node(fi, fj));
        }
    }
    Ok(out)
}

/// `log2(prev / next)`.
pub fn order(prev: f64, next: f64) -> f64 {
    (prev / next).log2()
}
