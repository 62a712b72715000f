//! Field dumps (flat little-endian f64 files plus a JSON sidecar) and
//! schlieren images.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SolverError};
use crate::grid::{Field, Placement};
use crate::stencil::centered_coefficients;

/// Schlieren contrast used by the exports.
pub const SCHLIEREN_KAPPA: f64 = 15.0;

pub const META_FILE: &str = "meta.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpMeta {
    pub nx: usize,
    pub ny: usize,
    pub h: Vec<f64>,
    pub t: f64,
    /// One `<name>.bin` file per entry, row-major with x fastest.
    pub components: Vec<String>,
    pub domain: Vec<[f64; 2]>,
    pub cell_centered: bool,
    pub dtype: String,
}

/// Conventional component names for `ncomp` conserved variables.
pub fn component_names(ncomp: usize, dim: usize) -> Vec<String> {
    let names: Vec<&str> = match (ncomp, dim) {
        (1, _) => vec!["u"],
        (3, 1) => vec!["rho", "mx", "E"],
        (4, 2) => vec!["rho", "mx", "my", "E"],
        _ => return (0..ncomp).map(|c| format!("c{c}")).collect(),
    };
    names.into_iter().map(String::from).collect()
}

/// Writes every component of `field` plus `extra` named interior arrays into
/// `dir`.
pub fn write_dump(dir: &Path, field: &Field, extra: &[(&str, &[f64])]) -> Result<DumpMeta> {
    let grid = field.grid();
    fs::create_dir_all(dir)?;
    let mut components = component_names(field.ncomp(), grid.dim());
    for (c, name) in components.iter().enumerate() {
        write_f64(&dir.join(format!("{name}.bin")), &field.interior_component(c))?;
    }
    for (name, values) in extra {
        if values.len() != grid.interior_nodes() {
            return Err(SolverError::Config(format!("extra array '{name}' has the wrong length")));
        }
        write_f64(&dir.join(format!("{name}.bin")), values)?;
        components.push(name.to_string());
    }
    let meta = DumpMeta {
        nx: grid.n(0),
        ny: grid.n(1),
        h: (0..grid.dim()).map(|a| grid.h(a)).collect(),
        t: field.time,
        components,
        domain: (0..grid.dim()).map(|a| [grid.lower(a), grid.upper(a)]).collect(),
        cell_centered: grid.coord(0, 0) != grid.lower(0),
        dtype: "f64-le".into(),
    };
    let json = serde_json::to_string_pretty(&meta).map_err(|e| SolverError::Io(e.to_string()))?;
    fs::write(dir.join(META_FILE), json)?;
    Ok(meta)
}

fn write_f64(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads one component written by [`write_dump`].
pub fn read_component(dir: &Path, name: &str) -> Result<(DumpMeta, Vec<f64>)> {
    let meta: DumpMeta =
        serde_json::from_str(&fs::read_to_string(dir.join(META_FILE))?).map_err(|e| SolverError::Io(e.to_string()))?;
    let bytes = fs::read(dir.join(format!("{name}.bin")))?;
    if bytes.len() != meta.nx * meta.ny * 8 {
        return Err(SolverError::Io(format!(
            "{name}.bin has {} bytes, expected {}",
            bytes.len(),
            meta.nx * meta.ny * 8
        )));
    }
    let values = bytes.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().unwrap())).collect();
    Ok((meta, values))
}

/// `exp(-kappa |grad rho| / max |grad rho|)` on the interior, gradients by
/// second-order central differences (ghosts must be filled).
pub fn schlieren(field: &Field, kappa: f64) -> Vec<f64> {
    let grid = field.grid();
    let d = centered_coefficients(1, 1).expect("valid stencil");
    let mut mag = Vec::with_capacity(grid.interior_nodes());
    for (i, j) in field.interior_iter() {
        let mut g2 = 0.0;
        for axis in 0..grid.dim() {
            let samples: Vec<f64> = d
                .offsets
                .iter()
                .map(|&o| if axis == 0 { field.node(i + o, j)[0] } else { field.node(i, j + o)[0] })
                .collect();
            g2 += d.apply_scalar(&samples, grid.h(axis)).powi(2);
        }
        mag.push(g2.sqrt());
    }
    let max = mag.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return vec![1.0; mag.len()];
    }
    mag.iter().map(|g| (-kappa * g / max).exp()).collect()
}

/// Placement recorded in a dump.
pub fn placement_of(meta: &DumpMeta) -> Placement {
    if meta.cell_centered {
        Placement::CellCentered
    } else {
        Placement::Nodal
    }
}
