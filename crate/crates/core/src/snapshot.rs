//! Field snapshot format: a 64-byte text header ("EPFLD1", nx, ny,
//! component count, field name) followed by row-major little-endian f64
//! cell data, plus a plain-text `.meta` sidecar. Cells are ordered with i
//! fastest (index j*nx + i); components are interleaved per cell.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Result, SimError};
use crate::fields::{Field, Grid, ScalarField, TensorField, VectorField};
use crate::tensorkin::Tensor2;
use crate::transport::StateFields;

pub const MAGIC: &str = "EPFLD1";

pub struct RawSnapshot {
    pub name: String,
    pub nx: usize,
    pub ny: usize,
    pub ncomp: usize,
    pub data: Vec<f64>,
}

fn header_bytes(nx: usize, ny: usize, ncomp: usize, name: &str) -> Result<[u8; 64]> {
    let text = format!("{MAGIC} {nx} {ny} {ncomp} {name}");
    if text.len() > 64 {
        return Err(SimError::Validation(format!(
            "snapshot header too long: '{text}'"
        )));
    }
    let mut out = [b' '; 64];
    out[..text.len()].copy_from_slice(text.as_bytes());
    Ok(out)
}

pub fn write_snapshot(
    path: &Path,
    grid: &Grid,
    name: &str,
    ncomp: usize,
    values: &[f64],
    step: usize,
    time: f64,
) -> Result<()> {
    debug_assert_eq!(values.len(), grid.n_cells() * ncomp);
    let mut file = std::fs::File::create(path)?;
    file.write_all(&header_bytes(grid.nx, grid.ny, ncomp, name)?)?;
    let mut buf = Vec::with_capacity(values.len() * 8);
    for v in values {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    file.write_all(&buf)?;

    let meta = format!(
        "field = {name}\nstep = {step}\ntime = {time}\nnx = {}\nny = {}\nncomp = {ncomp}\nhx = {}\nhy = {}\nlayout = row-major cells (index j*nx+i), {ncomp} little-endian f64 per cell\n",
        grid.nx, grid.ny, grid.hx, grid.hy
    );
    std::fs::write(path.with_extension("epfld.meta"), meta)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<RawSnapshot> {
    let mut file = std::fs::File::open(path)?;
    let mut header = [0u8; 64];
    file.read_exact(&mut header)?;
    let text = std::str::from_utf8(&header)
        .map_err(|_| SimError::Parse("snapshot header is not UTF-8".into()))?
        .trim_end()
        .to_string();
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != 5 || parts[0] != MAGIC {
        return Err(SimError::Parse(format!(
            "bad snapshot header: '{text}'"
        )));
    }
    let nx: usize = parts[1]
        .parse()
        .map_err(|_| SimError::Parse("bad nx in snapshot header".into()))?;
    let ny: usize = parts[2]
        .parse()
        .map_err(|_| SimError::Parse("bad ny in snapshot header".into()))?;
    let ncomp: usize = parts[3]
        .parse()
        .map_err(|_| SimError::Parse("bad ncomp in snapshot header".into()))?;
    let name = parts[4].to_string();
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    if bytes.len() != nx * ny * ncomp * 8 {
        return Err(SimError::Parse(format!(
            "snapshot payload has {} bytes, expected {}",
            bytes.len(),
            nx * ny * ncomp * 8
        )));
    }
    let data = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(RawSnapshot {
        name,
        nx,
        ny,
        ncomp,
        data,
    })
}

fn scalar_comps(f: &ScalarField) -> Vec<f64> {
    f.data.clone()
}

fn vector_comps(f: &VectorField) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * f.data.len());
    for v in &f.data {
        out.extend_from_slice(v);
    }
    out
}

fn tensor_comps(f: &TensorField) -> Vec<f64> {
    let mut out = Vec::with_capacity(4 * f.data.len());
    for t in &f.data {
        out.extend_from_slice(&[t.get(0, 0), t.get(0, 1), t.get(1, 0), t.get(1, 1)]);
    }
    out
}

/// Writes the full state as one snapshot file per field:
/// `stepNNNNNN.<name>.epfld` for v, xi, fp, lp, w, theta.
pub fn write_state(dir: &Path, grid: &Grid, state: &StateFields, step: usize) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let fields: [(&str, usize, Vec<f64>); 6] = [
        ("v", 2, vector_comps(&state.v)),
        ("xi", 2, vector_comps(&state.xi)),
        ("fp", 4, tensor_comps(&state.fp)),
        ("lp", 4, tensor_comps(&state.lp)),
        ("w", 1, scalar_comps(&state.w)),
        ("theta", 1, scalar_comps(&state.theta)),
    ];
    for (name, ncomp, values) in fields {
        let path = dir.join(format!("step{step:06}.{name}.epfld"));
        write_snapshot(&path, grid, name, ncomp, &values, step, state.t)?;
    }
    Ok(())
}

/// Reads a full state previously written by `write_state`.
pub fn read_state(dir: &Path, grid: &Grid, step: usize, time: f64) -> Result<StateFields> {
    let load = |name: &str, ncomp: usize| -> Result<Vec<f64>> {
        let path = dir.join(format!("step{step:06}.{name}.epfld"));
        let raw = read_snapshot(&path)?;
        if raw.nx != grid.nx || raw.ny != grid.ny || raw.ncomp != ncomp {
            return Err(SimError::Parse(format!(
                "snapshot {name} at step {step} does not match the configured grid"
            )));
        }
        Ok(raw.data)
    };
    let v_raw = load("v", 2)?;
    let xi_raw = load("xi", 2)?;
    let fp_raw = load("fp", 4)?;
    let lp_raw = load("lp", 4)?;
    let w_raw = load("w", 1)?;
    let theta_raw = load("theta", 1)?;
    let n = grid.n_cells();
    let to_vec = |raw: &[f64]| -> VectorField {
        Field {
            nx: grid.nx,
            ny: grid.ny,
            data: (0..n).map(|c| [raw[2 * c], raw[2 * c + 1]]).collect(),
        }
    };
    let to_tensor = |raw: &[f64]| -> TensorField {
        Field {
            nx: grid.nx,
            ny: grid.ny,
            data: (0..n)
                .map(|c| {
                    Tensor2::from_rows2([
                        [raw[4 * c], raw[4 * c + 1]],
                        [raw[4 * c + 2], raw[4 * c + 3]],
                    ])
                })
                .collect(),
        }
    };
    Ok(StateFields {
        v: to_vec(&v_raw),
        xi: to_vec(&xi_raw),
        fp: to_tensor(&fp_raw),
        lp: to_tensor(&lp_raw),
        w: Field {
            nx: grid.nx,
            ny: grid.ny,
            data: w_raw,
        },
        theta: Field {
            nx: grid.nx,
            ny: grid.ny,
            data: theta_raw,
        },
        t: time,
    })
}

/// Step indices with a complete snapshot set in `dir`, ascending.
pub fn snapshot_steps(dir: &Path) -> Result<Vec<usize>> {
    let mut steps = Vec::new();
    if !dir.exists() {
        return Ok(steps);
    }
    for entry in std::fs::read_dir(dir)? {
        let entry = entry?;
        let name = entry.file_name().to_string_lossy().to_string();
        if let Some(rest) = name.strip_prefix("step") {
            if let Some(num) = rest.strip_suffix(".theta.epfld") {
                if let Ok(step) = num.parse::<usize>() {
                    steps.push(step);
                }
            }
        }
    }
    steps.sort_unstable();
    Ok(steps)
}
