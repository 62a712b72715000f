//! Grid-refinement studies.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::grid::Field;
use crate::norms::{error_norms, order, restrict, ErrorNorms};
use crate::problems::{Problem, ProblemId};
use crate::run::{error_vs_exact, solve, RunConfig};
use crate::solver::{Scheme, SchemeConfig};

/// Refinement factor of the numerical reference over the finest level.
pub const REFERENCE_FACTOR: usize = 4;

/// One CSV row: `n, err1, ord1, errinf, ordinf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub err1: f64,
    pub ord1: Option<f64>,
    pub errinf: f64,
    pub ordinf: Option<f64>,
}

/// Builds rows with orders `log2(err_{k-1} / err_k)`.
pub fn rows_from_errors(levels: &[usize], errors: &[ErrorNorms]) -> Vec<ConvergenceRow> {
    levels
        .iter()
        .zip(errors)
        .enumerate()
        .map(|(k, (&n, e))| ConvergenceRow {
            n,
            err1: e.l1,
            ord1: (k > 0).then(|| order(errors[k - 1].l1, e.l1)),
            errinf: e.linf,
            ordinf: (k > 0).then(|| order(errors[k - 1].linf, e.linf)),
        })
        .collect()
}

/// Runs `scheme` on every level to `tend` (problem default when `None`) and
/// measures the density error against the exact solution, or against a
/// WENO5-LWA5 run on a grid `REFERENCE_FACTOR` times finer than the finest
/// level when no closed form exists.
pub fn convergence_study(
    problem: ProblemId,
    scheme: &SchemeConfig,
    levels: &[usize],
    tend: Option<f64>,
) -> Result<Vec<ConvergenceRow>> {
    if levels.is_empty() {
        return Err(SolverError::Config("no resolutions given".into()));
    }
    if problem == ProblemId::Dmr {
        return Err(SolverError::Config("no reference solution for dmr".into()));
    }
    let prob = Problem::new(problem)?;
    let t = tend.unwrap_or(prob.default_tend);
    let mut runs: Vec<Field> = Vec::with_capacity(levels.len());
    for &n in levels {
        let cfg = RunConfig { tend: Some(t), ..RunConfig::new(problem, *scheme, n) };
        let (field, _) = solve(&cfg).map_err(|e| e.context(format!("n = {n}")))?;
        runs.push(field);
    }
    let errors: Vec<ErrorNorms> = if prob.has_exact_solution(t) {
        runs.iter().map(|f| error_vs_exact(&prob, f)).collect::<Result<_>>()?
    } else {
        let finest = *levels.iter().max().unwrap();
        let reference = reference_run(problem, scheme.cfl, finest * REFERENCE_FACTOR, t)?;
        runs.iter().map(|f| error_norms(f, &restrict(&reference, f.grid())?)).collect::<Result<_>>()?
    };
    Ok(rows_from_errors(levels, &errors))
}

/// WENO5-LWA5 solution on an `n`-node grid.
pub fn reference_run(problem: ProblemId, cfl: f64, n: usize, tend: f64) -> Result<Field> {
    let cfg = RunConfig { tend: Some(tend), ..RunConfig::new(problem, SchemeConfig::new(Scheme::Lwa, 5, 5, cfl), n) };
    Ok(solve(&cfg).map_err(|e| e.context(format!("reference n = {n}")))?.0)
}

pub fn write_csv<W: Write>(rows: &[ConvergenceRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| SolverError::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(r: R) -> Result<Vec<ConvergenceRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| SolverError::Io(e.to_string()))
}
