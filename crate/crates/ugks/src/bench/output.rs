//! Result files: manifest, grid and line-out CSVs, series and order tables.

use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

use super::metrics::{self, radiation_temperature};
use super::{MetricReport, OrderRow, Scenario};
use crate::error::{Error, Result};
use crate::io;
use crate::solver::Solver;

#[derive(Serialize)]
struct Manifest<'a> {
    library_version: &'a str,
    scenario: &'a Scenario,
    summary: Summary,
}

#[derive(Serialize)]
struct Summary {
    steps: usize,
    final_time: f64,
    wall_seconds: f64,
    min_rho: f64,
    max_sweeps: usize,
    total_sweeps: usize,
    max_residual: f64,
    min_lambda1: f64,
    min_lambda21: f64,
    min_lambda22: f64,
}

fn to_toml<T: Serialize>(v: &T) -> Result<String> {
    toml::to_string_pretty(v).map_err(|e| Error::InvalidState(format!("manifest serialisation: {e}")))
}

pub fn write_manifest(dir: &Path, s: &Scenario, r: &MetricReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let m = Manifest {
        library_version: crate::VERSION,
        scenario: s,
        summary: Summary {
            steps: r.steps,
            final_time: r.final_time,
            wall_seconds: r.wall_seconds,
            min_rho: if r.min_rho.is_empty() { 0.0 } else { r.overall_min_rho() },
            max_sweeps: r.max_sweeps,
            total_sweeps: r.total_sweeps,
            max_residual: r.max_residual,
            min_lambda1: r.min_lambda[0],
            min_lambda21: r.min_lambda[1],
            min_lambda22: r.min_lambda[2],
        },
    };
    std::fs::write(dir.join("manifest.toml"), to_toml(&m)?)?;
    Ok(())
}

fn tag(t: f64) -> String {
    format!("{t:.6}").trim_end_matches('0').trim_end_matches('.').replace('.', "p")
}

/// All files of a finished run. An empty report yields the manifest only.
pub fn emit_outputs(dir: &Path, s: &Scenario, r: &MetricReport, solver: &Solver) -> Result<()> {
    write_manifest(dir, s, r)?;
    if r.steps == 0 {
        return Ok(());
    }
    let g = solver.grid;
    let (a, c) = (s.consts.a, s.consts.c);
    let mut ghosted = vec![0.0; g.len()];
    let mut put = |vals: &[f64]| -> Vec<f64> {
        for (v, cell) in vals.iter().zip(g.interior()) {
            ghosted[cell] = *v;
        }
        ghosted.clone()
    };
    for snap in &r.snapshots {
        let t = tag(snap.time);
        let tr: Vec<f64> = snap.rho.iter().map(|v| radiation_temperature(*v, a, c)).collect();
        io::write_grid_csv(&dir.join(format!("rho_t{t}.csv")), &g, &put(&snap.rho))?;
        if !s.linear {
            io::write_grid_csv(&dir.join(format!("temp_t{t}.csv")), &g, &put(&snap.temp))?;
            io::write_grid_csv(&dir.join(format!("tr_t{t}.csv")), &g, &put(&tr))?;
        }
        if g.ny == 1 {
            let refsnap = r.reference.iter().find(|q| q.time == snap.time);
            let mut header = vec!["x", "rho", "T", "Tr"];
            if refsnap.is_some() {
                header.push("reference");
            }
            let rows: Vec<Vec<f64>> = (0..g.nx)
                .map(|i| {
                    let mut row = vec![g.xc(i as isize), snap.rho[i], snap.temp[i], tr[i]];
                    if let Some(q) = refsnap {
                        row.push(if s.linear { q.rho[i] } else { q.temp[i] });
                    }
                    row
                })
                .collect();
            io::write_table_csv(&dir.join(format!("lineout_t{t}.csv")), &header, &rows)?;
        }
    }
    if g.ny > 1 {
        if let Some(last) = r.snapshots.last() {
            let rho = put(&last.rho);
            let temp = put(&last.temp);
            io::write_vtk(&dir.join("final.vtk"), &g, &[("rho", &rho), ("T", &temp)])?;
            // line-outs along the positive x axis and the diagonal
            let xmax = g.x1().min(g.y1());
            for (name, p1) in [("lineout_x", (xmax, 0.0)), ("lineout_diag", (xmax, xmax))] {
                if g.x0 < 0.0 && g.y0 < 0.0 {
                    let rows: Vec<Vec<f64>> =
                        metrics::lineout(&g, &last.rho, (0.0, 0.0), p1, 201).into_iter().map(|(s, v)| vec![s, v]).collect();
                    io::write_table_csv(&dir.join(format!("{name}.csv")), &["s", "rho"], &rows)?;
                }
            }
        }
    }
    let series = |v: &[(f64, f64)]| -> Vec<Vec<f64>> { v.iter().map(|(t, x)| vec![*t, *x]).collect() };
    io::write_table_csv(&dir.join("min_rho.csv"), &["t", "min_rho"], &series(&r.min_rho))?;
    io::write_table_csv(&dir.join("err_ap.csv"), &["t", "err_ap"], &series(&r.err_ap))?;
    if !r.probes.is_empty() {
        let mut header = vec!["t".to_string()];
        for p in &r.probes {
            header.push(format!("T_{}", p.name));
            header.push(format!("Tr_{}", p.name));
        }
        let n = r.probes[0].samples.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let mut row = vec![r.probes[0].samples[k].0];
                for p in &r.probes {
                    row.push(p.samples[k].1);
                    row.push(p.samples[k].2);
                }
                row
            })
            .collect();
        let h: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        io::write_table_csv(&dir.join("probes.csv"), &h, &rows)?;
    }
    if !r.symmetry.is_empty() {
        let rows: Vec<Vec<f64>> = r.symmetry.iter().map(|(a, b)| vec![*a, *b]).collect();
        io::write_table_csv(&dir.join("symmetry.csv"), &["radius", "deviation"], &rows)?;
    }
    io::write_limiters_csv(&dir.join("limiters.csv"), &g, &solver.last_limiters)?;
    io::write_checkpoint(&dir.join("final.ckpt"), &solver.state, solver.time)?;
    Ok(())
}

/// Order table as aligned text.
pub fn format_order_table(rows: &[OrderRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>12} {:>7} {:>12} {:>7} {:>12} {:>7} {:>12} {:>7}",
        "Nx", "L2(rho)", "order", "Linf(rho)", "order", "L2(T)", "order", "Linf(T)", "order"
    );
    let o = |v: f64| if v.is_nan() { "-".to_string() } else { format!("{v:.2}") };
    for r in rows {
        let _ = writeln!(
            out,
            "{:>6} {:>12.4e} {:>7} {:>12.4e} {:>7} {:>12.4e} {:>7} {:>12.4e} {:>7}",
            r.nx,
            r.l2_rho,
            o(r.order_l2_rho),
            r.linf_rho,
            o(r.order_linf_rho),
            r.l2_t,
            o(r.order_l2_t),
            r.linf_t,
            o(r.order_linf_t)
        );
    }
    out
}

pub fn write_order_table(dir: &Path, rows: &[OrderRow]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("orders.txt"), format_order_table(rows))?;
    let data: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| {
            vec![
                r.nx as f64,
                r.l2_rho,
                r.order_l2_rho,
                r.linf_rho,
                r.order_linf_rho,
                r.l2_t,
                r.order_l2_t,
                r.linf_t,
                r.order_linf_t,
            ]
        })
        .collect();
    io::write_table_csv(
        &dir.join("orders.csv"),
        &["nx", "l2_rho", "order_l2_rho", "linf_rho", "order_linf_rho", "l2_T", "order_l2_T", "linf_T", "order_linf_T"],
        &data,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{build_solver, scenario, Preset};

    #[test]
    fn empty_report_writes_manifest_only() {
        let dir = tempfile::tempdir().unwrap();
        let s = scenario("accuracy", Preset::Desk).unwrap();
        let solver = build_solver(&s).unwrap();
        emit_outputs(dir.path(), &s, &MetricReport::default(), &solver).unwrap();
        let names: Vec<String> =
            std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        assert_eq!(names, vec!["manifest.toml".to_string()]);
        let text = std::fs::read_to_string(dir.path().join("manifest.toml")).unwrap();
        assert!(text.contains("library_version"));
    }

    #[test]
    fn tags() {
        assert_eq!(tag(0.2), "0p2");
        assert_eq!(tag(15.0), "15");
    }
}
