//! Wall-clock comparison of Runge-Kutta and Lax-Wendroff time stepping on
//! the double Mach reflection.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::problems::ProblemId;
use crate::run::{solve, RunConfig};
use crate::solver::{Scheme, SchemeConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scheme: String,
    pub nx: usize,
    pub ny: usize,
    pub steps: usize,
    pub seconds: f64,
    /// `t_RK3 / t_scheme`.
    pub efficiency: f64,
    /// `ok`, or the failure kind.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub nx: usize,
    pub tend: f64,
    pub cfl: f64,
    pub schemes: Vec<SchemeConfig>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        let cfl = 0.4;
        BenchConfig {
            nx: 200,
            tend: 0.2,
            cfl,
            schemes: vec![
                SchemeConfig::new(Scheme::Rk3, 5, 3, cfl),
                SchemeConfig::new(Scheme::Lwa, 5, 5, cfl),
                SchemeConfig::new(Scheme::Lwaf, 5, 5, cfl),
            ],
        }
    }
}

/// Runs every scheme sequentially on a single worker thread. The first
/// scheme must be RK3; its time is the efficiency baseline.
pub fn bench_efficiency(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.schemes.first().map(|s| s.scheme) != Some(Scheme::Rk3) {
        return Err(SolverError::Config("the first benchmarked scheme must be rk3".into()));
    }
    let pool =
        rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| SolverError::Config(e.to_string()))?;
    let mut rows = Vec::new();
    for s in &cfg.schemes {
        let run = RunConfig { tend: Some(cfg.tend), ..RunConfig::new(ProblemId::Dmr, *s, cfg.nx) };
        let row = match pool.install(|| solve(&run)) {
            Ok((_, sum)) => BenchRow {
                scheme: sum.scheme,
                nx: sum.nx,
                ny: sum.ny,
                steps: sum.steps,
                seconds: sum.wall_seconds,
                efficiency: f64::NAN,
                status: "ok".into(),
            },
            Err(e) if e.is_positivity() => BenchRow {
                scheme: s.label(),
                nx: cfg.nx,
                ny: cfg.nx / 4,
                steps: 0,
                seconds: f64::NAN,
                efficiency: f64::NAN,
                status: "positivity".into(),
            },
            Err(e) => return Err(e),
        };
        rows.push(row);
    }
    let base = rows[0].seconds;
    for r in &mut rows {
        r.efficiency = base / r.seconds;
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| SolverError::Io(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}
