//! File formats: grid and line-out CSV, legacy VTK, binary checkpoints.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::angular::AngularTables;
use crate::error::{Error, Result};
use crate::mesh::{Grid2D, MomentState};
use crate::solver::LimiterField;

const CHECKPOINT_MAGIC: &[u8; 8] = b"UGKSCKP1";
const CHECKPOINT_VERSION: u32 = 1;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// `x,y,value` rows over interior cells of a ghosted field, 17 significant
/// digits.
pub fn write_grid_csv(path: &Path, grid: &Grid2D, field: &[f64]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "x,y,value")?;
    for j in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", grid.xc(i), grid.yc(j), field[grid.idx(i, j)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Read back a grid CSV as (x, y, value) triples.
pub fn read_grid_csv(path: &Path) -> Result<Vec<[f64; 3]>> {
    let r = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        if k == 0 || line.trim().is_empty() {
            continue;
        }
        let mut row = [0.0; 3];
        let mut parts = line.split(',');
        for v in row.iter_mut() {
            let s = parts.next().ok_or_else(|| Error::InvalidInput(format!("short row {k}")))?;
            *v = s.trim().parse().map_err(|e| Error::InvalidInput(format!("row {k}: {e}")))?;
        }
        out.push(row);
    }
    Ok(out)
}

/// Generic CSV with a header and rows of numbers.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let s: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", s.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Legacy-VTK structured points with one cell-data scalar per field.
pub fn write_vtk(path: &Path, grid: &Grid2D, fields: &[(&str, &[f64])]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "# vtk DataFile Version 3.0\nugks output\nASCII\nDATASET STRUCTURED_POINTS")?;
    writeln!(w, "DIMENSIONS {} {} 1", grid.nx + 1, grid.ny + 1)?;
    writeln!(w, "ORIGIN {:.16e} {:.16e} 0", grid.x0, grid.y0)?;
    writeln!(w, "SPACING {:.16e} {:.16e} 1", grid.dx, grid.dy)?;
    writeln!(w, "CELL_DATA {}", grid.n_interior())?;
    for (name, f) in fields {
        writeln!(w, "SCALARS {name} double 1\nLOOKUP_TABLE default")?;
        for c in grid.interior() {
            writeln!(w, "{:.16e}", f[c])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn put_f64s(w: &mut impl Write, v: &[f64]) -> Result<()> {
    w.write_all(&(v.len() as u64).to_le_bytes())?;
    for x in v {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn get_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_bits(get_u64(r)?))
}

fn get_f64s(r: &mut impl Read, expect: usize) -> Result<Vec<f64>> {
    let n = get_u64(r)? as usize;
    if n != expect {
        return Err(Error::InvalidInput(format!("checkpoint array of {n}, expected {expect}")));
    }
    (0..n).map(|_| get_f64(r)).collect()
}

/// Binary checkpoint: magic, version, grid, order, time, then ρ, İ, T, φ
/// (ghosts included) as little-endian doubles.
pub fn write_checkpoint(path: &Path, state: &MomentState, time: f64) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    let g = &state.grid;
    for v in [g.nx as u64, g.ny as u64, state.n as u64] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in [g.dx, g.dy, g.x0, g.y0, time] {
        w.write_all(&v.to_le_bytes())?;
    }
    for f in [&state.rho, &state.micro, &state.temp, &state.phi] {
        put_f64s(&mut w, f)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_checkpoint(path: &Path) -> Result<(MomentState, f64)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::InvalidInput("not a checkpoint file".into()));
    }
    let mut vb = [0u8; 4];
    r.read_exact(&mut vb)?;
    let version = u32::from_le_bytes(vb);
    if version != CHECKPOINT_VERSION {
        return Err(Error::InvalidInput(format!("unsupported checkpoint version {version}")));
    }
    let (nx, ny, n) = (get_u64(&mut r)? as usize, get_u64(&mut r)? as usize, get_u64(&mut r)? as usize);
    let (dx, dy, x0, y0, time) = (get_f64(&mut r)?, get_f64(&mut r)?, get_f64(&mut r)?, get_f64(&mut r)?, get_f64(&mut r)?);
    let grid = Grid2D { nx, ny, dx, dy, x0, y0 };
    let mut s = MomentState::zeros(grid, n);
    let len = grid.len();
    s.rho = get_f64s(&mut r, len)?;
    s.micro = get_f64s(&mut r, len * s.n_micro())?;
    s.temp = get_f64s(&mut r, len)?;
    s.phi = get_f64s(&mut r, len)?;
    Ok((s, time))
}

/// Per-cell λ¹, λ²¹, λ²² of the last step.
pub fn write_limiters_csv(path: &Path, grid: &Grid2D, l: &LimiterField) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "x,y,lambda1,lambda21,lambda22")?;
    let mut p = 0;
    for j in 0..grid.ny as isize {
        for i in 0..grid.nx as isize {
            let get = |v: &Vec<f64>| v.get(p).copied().unwrap_or(1.0);
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                grid.xc(i),
                grid.yc(j),
                get(&l.lambda1),
                get(&l.lambda21),
                get(&l.lambda22)
            )?;
            p += 1;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_tables(path: &Path, t: &AngularTables) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(&t.to_bytes())?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_csv_round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid2D::new(5, 3, (0.0, 1.0), (-1.0, 2.0)).unwrap();
        let mut f = vec![0.0; g.len()];
        for (k, c) in g.interior().enumerate() {
            f[c] = (k as f64 * 0.731).sin() * 1e-7 + 1.0 / 3.0;
        }
        let p = dir.path().join("f.csv");
        write_grid_csv(&p, &g, &f).unwrap();
        let rows = read_grid_csv(&p).unwrap();
        for (row, c) in rows.iter().zip(g.interior()) {
            assert_eq!(row[2].to_bits(), f[c].to_bits());
        }
    }

    #[test]
    fn checkpoint_round_trip_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid2D::new(3, 2, (0.0, 1.0), (0.0, 1.0)).unwrap();
        let mut s = MomentState::zeros(g, 2);
        for (k, v) in s.micro.iter_mut().enumerate() {
            *v = (k as f64).cos() / 7.0;
        }
        s.rho.iter_mut().enumerate().for_each(|(k, v)| *v = k as f64 * std::f64::consts::E);
        let p = dir.path().join("c.bin");
        write_checkpoint(&p, &s, 0.125).unwrap();
        let (back, t) = read_checkpoint(&p).unwrap();
        assert_eq!(t, 0.125);
        assert_eq!(back, s);
    }
}
