//! Structured 1D/2D node grids with ghost layers and boundary conditions.

use std::fmt;
use std::sync::Arc;

use crate::equations::ConservationLaw;
use crate::error::{Result, SolverError};

/// Where nodes sit along an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// `x_i = x_min + i h`, right endpoint excluded (periodic axes).
    Nodal,
    /// `x_i = x_min + (i + 1/2) h`.
    CellCentered,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    n: [usize; 2],
    ghost: [usize; 2],
    lower: [f64; 2],
    h: [f64; 2],
    shift: [f64; 2],
}

impl Grid {
    /// Uniform grid with `n[a]` interior nodes on `[lower[a], upper[a]]`.
    pub fn new(extents: &[usize], lower: &[f64], upper: &[f64], placement: &[Placement], ghost: usize) -> Result<Self> {
        let dim = extents.len();
        if !(1..=2).contains(&dim) || lower.len() != dim || upper.len() != dim || placement.len() != dim {
            return Err(SolverError::Config("grid needs 1 or 2 consistent axes".into()));
        }
        let mut g = Grid { dim, n: [1, 1], ghost: [ghost, 0], lower: [0.0; 2], h: [1.0; 2], shift: [0.0; 2] };
        if dim == 2 {
            g.ghost[1] = ghost;
        }
        for a in 0..dim {
            if extents[a] == 0 {
                return Err(SolverError::Config(format!("axis {a} has no nodes")));
            }
            let h = (upper[a] - lower[a]) / extents[a] as f64;
            if !(h > 0.0) || !h.is_finite() {
                return Err(SolverError::Config(format!("axis {a} has non-positive spacing {h}")));
            }
            g.n[a] = extents[a];
            g.lower[a] = lower[a];
            g.h[a] = h;
            g.shift[a] = match placement[a] {
                Placement::Nodal => 0.0,
                Placement::CellCentered => 0.5,
            };
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Interior node count along `axis` (1 for the inactive axis in 1D).
    pub fn n(&self, axis: usize) -> usize {
        self.n[axis]
    }

    pub fn ghost(&self) -> usize {
        self.ghost[0]
    }

    pub fn ghost_along(&self, axis: usize) -> usize {
        self.ghost[axis]
    }

    pub fn h(&self, axis: usize) -> f64 {
        self.h[axis]
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.lower[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.lower[axis] + self.n[axis] as f64 * self.h[axis]
    }

    /// Storage extent along `axis`, ghosts included.
    pub fn ext(&self, axis: usize) -> usize {
        self.n[axis] + 2 * self.ghost[axis]
    }

    pub fn total_nodes(&self) -> usize {
        self.ext(0) * self.ext(1)
    }

    pub fn interior_nodes(&self) -> usize {
        self.n[0] * self.n[1]
    }

    /// Linear node index of interior coordinates `(i, j)`; negative values
    /// and values past `n` address ghost nodes.
    #[inline]
    pub fn index(&self, i: isize, j: isize) -> usize {
        let ii = (i + self.ghost[0] as isize) as usize;
        let jj = (j + self.ghost[1] as isize) as usize;
        jj * self.ext(0) + ii
    }

    /// Position of column `i` within a padded storage row.
    #[inline]
    pub fn col(&self, i: isize) -> usize {
        (i + self.ghost[0] as isize) as usize
    }

    /// Node stride (in nodes) between neighbours along `axis`.
    #[inline]
    pub fn node_stride(&self, axis: usize) -> usize {
        if axis == 0 {
            1
        } else {
            self.ext(0)
        }
    }

    pub fn coord(&self, axis: usize, i: isize) -> f64 {
        self.lower[axis] + (i as f64 + self.shift[axis]) * self.h[axis]
    }

    pub fn position(&self, i: isize, j: isize) -> [f64; 2] {
        [self.coord(0, i), if self.dim == 2 { self.coord(1, j) } else { 0.0 }]
    }

    /// Index ranges of the interior grown by `margin` along every active axis.
    pub fn region(&self, margin: usize) -> Region {
        let m = margin as isize;
        let my = if self.dim == 2 { m } else { 0 };
        Region { i: (-m, self.n[0] as isize + m), j: (-my, self.n[1] as isize + my) }
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.h[a]).product()
    }
}

/// Half-open index box `[i.0, i.1) x [j.0, j.1)` in interior coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub i: (isize, isize),
    pub j: (isize, isize),
}

impl Region {
    pub fn contains_row(&self, j: isize) -> bool {
        j >= self.j.0 && j < self.j.1
    }
}

/// Node-based conservative-variable field with ghost layers.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    ncomp: usize,
    pub data: Vec<f64>,
    pub time: f64,
}

impl Field {
    pub fn new(grid: Grid, ncomp: usize) -> Self {
        let data = vec![0.0; grid.total_nodes() * ncomp];
        Field { grid, ncomp, data, time: 0.0 }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    #[inline]
    pub fn node(&self, i: isize, j: isize) -> &[f64] {
        let k = self.grid.index(i, j) * self.ncomp;
        &self.data[k..k + self.ncomp]
    }

    #[inline]
    pub fn node_mut(&mut self, i: isize, j: isize) -> &mut [f64] {
        let k = self.grid.index(i, j) * self.ncomp;
        &mut self.data[k..k + self.ncomp]
    }

    /// Samples `ic` pointwise at every interior node.
    pub fn sample<F>(&mut self, ic: F) -> Result<()>
    where
        F: Fn([f64; 2]) -> Result<Vec<f64>>,
    {
        for j in 0..self.grid.n(1) as isize {
            for i in 0..self.grid.n(0) as isize {
                let v = ic(self.grid.position(i, j))?;
                if v.len() != self.ncomp {
                    return Err(SolverError::Config(format!(
                        "initial condition returned {} components, expected {}",
                        v.len(),
                        self.ncomp
                    )));
                }
                self.node_mut(i, j).copy_from_slice(&v);
            }
        }
        Ok(())
    }

    /// Interior values of one component, row-major (`x` fastest).
    pub fn interior_component(&self, c: usize) -> Vec<f64> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.interior_nodes());
        for j in 0..g.n(1) as isize {
            for i in 0..g.n(0) as isize {
                out.push(self.node(i, j)[c]);
            }
        }
        out
    }

    /// Sum of a component over the interior nodes.
    pub fn interior_sum(&self, c: usize) -> f64 {
        self.interior_component(c).iter().sum()
    }

    pub fn interior_iter(&self) -> impl Iterator<Item = (isize, isize)> + '_ {
        let (nx, ny) = (self.grid.n(0) as isize, self.grid.n(1) as isize);
        (0..ny).flat_map(move |j| (0..nx).map(move |i| (i, j)))
    }
}

pub type StateFn = Arc<dyn Fn([f64; 2], f64) -> Vec<f64> + Send + Sync>;

/// Boundary condition on one side of the domain.
#[derive(Clone)]
pub enum Boundary {
    Periodic,
    /// Zero-order extrapolation of the nearest interior node.
    Outflow,
    /// Mirror image with the normal momentum negated.
    Reflecting,
    /// Fixed conservative state.
    Inflow(Vec<f64>),
    /// Conservative state given as a function of ghost position and time.
    TimeDependent(StateFn),
    /// `below` applies where the tangential coordinate is `<= at`, `above`
    /// elsewhere.
    Split {
        at: f64,
        below: Box<Boundary>,
        above: Box<Boundary>,
    },
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Periodic => write!(f, "Periodic"),
            Boundary::Outflow => write!(f, "Outflow"),
            Boundary::Reflecting => write!(f, "Reflecting"),
            Boundary::Inflow(s) => write!(f, "Inflow({s:?})"),
            Boundary::TimeDependent(_) => write!(f, "TimeDependent(..)"),
            Boundary::Split { at, below, above } => write!(f, "Split({at}, {below:?}, {above:?})"),
        }
    }
}

impl Boundary {
    fn is_periodic(&self) -> bool {
        matches!(self, Boundary::Periodic)
    }

    fn resolve(&self, tangential: f64) -> &Boundary {
        match self {
            Boundary::Split { at, below, above } => {
                if tangential <= *at {
                    below.resolve(tangential)
                } else {
                    above.resolve(tangential)
                }
            }
            b => b,
        }
    }
}

/// Boundary conditions per axis, `[lower, upper]`.
#[derive(Debug, Clone)]
pub struct BoundarySpec {
    pub sides: Vec<[Boundary; 2]>,
}

impl BoundarySpec {
    pub fn periodic(dim: usize) -> Self {
        BoundarySpec { sides: vec![[Boundary::Periodic, Boundary::Periodic]; dim] }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.sides.len() != dim {
            return Err(SolverError::Config(format!("boundary spec has {} axes, grid has {dim}", self.sides.len())));
        }
        for (a, [lo, hi]) in self.sides.iter().enumerate() {
            if lo.is_periodic() != hi.is_periodic() {
                return Err(SolverError::Config(format!("unmatched periodic pair on axis {a}")));
            }
        }
        Ok(())
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.sides[axis][0].is_periodic()
    }
}

/// Populates every ghost node of `field` at time `t`.
///
/// Axis 0 is filled on interior rows first, then axis 1 across the full
/// padded rows so corner ghosts inherit consistent values.
pub fn fill_ghosts<E: ConservationLaw + ?Sized>(field: &mut Field, bc: &BoundarySpec, eq: &E, t: f64) -> Result<()> {
    let grid = field.grid.clone();
    bc.validate(grid.dim())?;
    let m = field.ncomp;
    let mut tmp = vec![0.0; m];
    for axis in 0..grid.dim() {
        let g = grid.ghost_along(axis) as isize;
        let n = grid.n(axis) as isize;
        let other = 1 - axis;
        let (t_lo, t_hi) = if axis == 0 {
            (0, grid.n(1) as isize)
        } else {
            let go = grid.ghost_along(0) as isize;
            (-go, grid.n(0) as isize + go)
        };
        let at = |along: isize, across: isize| if axis == 0 { (along, across) } else { (across, along) };
        for side in 0..2 {
            for tan in t_lo..t_hi {
                let tangential = if grid.dim() == 2 { grid.coord(other, tan) } else { 0.0 };
                let b = bc.sides[axis][side].resolve(tangential);
                for d in 1..=g {
                    let ghost = if side == 0 { -d } else { n - 1 + d };
                    let (gi, gj) = at(ghost, tan);
                    match b {
                        Boundary::Periodic => {
                            let src = if side == 0 { n - d } else { d - 1 };
                            let (si, sj) = at(src, tan);
                            tmp.copy_from_slice(field.node(si, sj));
                        }
                        Boundary::Outflow => {
                            let src = if side == 0 { 0 } else { n - 1 };
                            let (si, sj) = at(src, tan);
                            tmp.copy_from_slice(field.node(si, sj));
                        }
                        Boundary::Reflecting => {
                            let src = if side == 0 { d - 1 } else { n - d };
                            let (si, sj) = at(src, tan);
                            tmp.copy_from_slice(field.node(si, sj));
                            eq.reflect(&mut tmp, axis);
                        }
                        Boundary::Inflow(state) => {
                            check_len(state.len(), m)?;
                            tmp.copy_from_slice(state);
                        }
                        Boundary::TimeDependent(func) => {
                            let state = func(grid.position(gi, gj), t);
                            check_len(state.len(), m)?;
                            tmp.copy_from_slice(&state);
                        }
                        Boundary::Split { .. } => unreachable!("resolved above"),
                    }
                    if let Some(v) = tmp.iter().find(|v| !v.is_finite()) {
                        return Err(SolverError::InvalidState(format!("non-finite ghost value {v} at ({gi}, {gj})")));
                    }
                    field.node_mut(gi, gj).copy_from_slice(&tmp);
                }
            }
        }
    }
    Ok(())
}

fn check_len(got: usize, m: usize) -> Result<()> {
    if got != m {
        return Err(SolverError::Config(format!("boundary state has {got} components, expected {m}")));
    }
    Ok(())
}

/// Global maximum wave speed along `axis` over every stored node.
pub fn max_wave_speed<E: ConservationLaw + ?Sized>(field: &Field, eq: &E, axis: usize) -> Result<f64> {
    let mut best = 0.0f64;
    for u in field.data.chunks_exact(field.ncomp) {
        best = best.max(eq.wave_speed(u, axis)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equations::{Burgers, Euler};
    use crate::stencil::centered_coefficients;

    fn periodic_1d(n: usize, g: usize) -> Field {
        let grid = Grid::new(&[n], &[0.0], &[1.0], &[Placement::Nodal], g).unwrap();
        Field::new(grid, 1)
    }

    #[test]
    fn node_placement() {
        let g = Grid::new(&[4], &[-1.0], &[1.0], &[Placement::Nodal], 2).unwrap();
        assert_eq!(g.h(0), 0.5);
        let xs: Vec<f64> = (0..4).map(|i| g.coord(0, i)).collect();
        assert_eq!(xs, vec![-1.0, -0.5, 0.0, 0.5]);
        let c = Grid::new(&[4], &[0.0], &[4.0], &[Placement::CellCentered], 2).unwrap();
        assert_eq!(c.coord(0, 0), 0.5);
    }

    #[test]
    fn bad_spacing_is_config_error() {
        let err = Grid::new(&[4], &[1.0], &[1.0], &[Placement::Nodal], 2).unwrap_err();
        assert!(matches!(err, SolverError::Config(_)));
    }

    #[test]
    fn constant_ic() {
        let mut f = periodic_1d(5, 1);
        f.sample(|_| Ok(vec![3.0])).unwrap();
        assert!(f.interior_component(0).iter().all(|&v| v == 3.0));
    }

    #[test]
    fn periodic_wrap() {
        let mut f = periodic_1d(6, 3);
        f.sample(|x| Ok(vec![x[0]])).unwrap();
        fill_ghosts(&mut f, &BoundarySpec::periodic(1), &Burgers, 0.0).unwrap();
        assert_eq!(f.node(-1, 0)[0], f.node(5, 0)[0]);
        assert_eq!(f.node(6, 0)[0], f.node(0, 0)[0]);
        assert_eq!(f.node(-3, 0)[0], f.node(3, 0)[0]);
    }

    #[test]
    fn periodic_stencil_matches_extended_sequence() {
        let n = 16usize;
        let mut f = periodic_1d(n, 2);
        let u = |i: isize| ((i.rem_euclid(n as isize)) as f64 * 0.37).sin();
        f.sample(|x| Ok(vec![(((x[0] * n as f64).round()) * 0.37).sin()])).unwrap();
        fill_ghosts(&mut f, &BoundarySpec::periodic(1), &Burgers, 0.0).unwrap();
        let c = centered_coefficients(1, 2).unwrap();
        for i in [0isize, 1, 14, 15] {
            let s: Vec<f64> = (-2..=2).map(|o| f.node(i + o, 0)[0]).collect();
            let e: Vec<f64> = (-2..=2).map(|o| u(i + o)).collect();
            assert_eq!(c.apply_scalar(&s, 1.0), c.apply_scalar(&e, 1.0));
        }
    }

    #[test]
    fn unmatched_periodic_pair() {
        let mut f = periodic_1d(4, 1);
        let bc = BoundarySpec { sides: vec![[Boundary::Periodic, Boundary::Outflow]] };
        assert!(matches!(fill_ghosts(&mut f, &bc, &Burgers, 0.0), Err(SolverError::Config(_))));
    }

    #[test]
    fn reflecting_and_outflow_2d() {
        let eq = Euler::new(2);
        let grid = Grid::new(&[4, 3], &[0.0, 0.0], &[4.0, 3.0], &[Placement::CellCentered, Placement::CellCentered], 2)
            .unwrap();
        let mut f = Field::new(grid, 4);
        f.sample(|x| Ok(vec![1.0 + x[0], 0.5, 0.25 + x[1], 10.0])).unwrap();
        let bc = BoundarySpec {
            sides: vec![
                [Boundary::Inflow(vec![2.0, 0.0, 0.0, 5.0]), Boundary::Outflow],
                [Boundary::Reflecting, Boundary::Outflow],
            ],
        };
        fill_ghosts(&mut f, &bc, &eq, 0.0).unwrap();
        let interior = f.node(1, 0).to_vec();
        let ghost = f.node(1, -1).to_vec();
        assert_eq!(ghost, vec![interior[0], interior[1], -interior[2], interior[3]]);
        assert_eq!(f.node(1, -2)[2], -f.node(1, 1)[2]);
        assert_eq!(f.node(5, 1), f.node(3, 1));
        assert_eq!(f.node(-2, 1), &[2.0, 0.0, 0.0, 5.0]);
        // corners follow the x-fill then the y-fill
        assert_eq!(f.node(-1, -1)[2], -0.0);
        assert_eq!(f.node(5, 4), f.node(3, 2));
    }

    #[test]
    fn reflecting_is_involution() {
        let eq = Euler::new(2);
        let mut s = vec![1.0, 2.0, -3.0, 9.0];
        let orig = s.clone();
        eq.reflect(&mut s, 1);
        eq.reflect(&mut s, 1);
        assert_eq!(s, orig);
    }

    #[test]
    fn split_and_time_dependent() {
        let eq = Euler::new(2);
        let grid = Grid::new(&[8, 2], &[0.0, 0.0], &[4.0, 1.0], &[Placement::CellCentered, Placement::CellCentered], 1)
            .unwrap();
        let mut f = Field::new(grid, 4);
        f.sample(|_| Ok(vec![1.0, 0.0, 1.0, 3.0])).unwrap();
        let top: StateFn =
            Arc::new(|x, t| if x[0] <= 1.0 + t { vec![8.0, 0.0, 0.0, 1.0] } else { vec![1.4, 0.0, 0.0, 2.5] });
        let bc = BoundarySpec {
            sides: vec![
                [Boundary::Outflow, Boundary::Outflow],
                [
                    Boundary::Split {
                        at: 0.25 * 4.0,
                        below: Box::new(Boundary::Outflow),
                        above: Box::new(Boundary::Reflecting),
                    },
                    Boundary::TimeDependent(top),
                ],
            ],
        };
        fill_ghosts(&mut f, &bc, &eq, 0.0).unwrap();
        // x = 0.25, 0.75 are below the split; x = 1.25 reflects
        assert_eq!(f.node(0, -1)[2], 1.0);
        assert_eq!(f.node(1, -1)[2], 1.0);
        assert_eq!(f.node(2, -1)[2], -1.0);
        assert_eq!(f.node(1, 2)[0], 8.0);
        assert_eq!(f.node(2, 2)[0], 1.4);
        fill_ghosts(&mut f, &bc, &eq, 1.0).unwrap();
        assert_eq!(f.node(3, 2)[0], 8.0);
    }
}
