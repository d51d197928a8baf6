use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use ugks::bench::{self, output, Overrides, NAMES};
use ugks::{Error, Result};

#[derive(Parser)]
#[command(name = "ugks-bench", version, about = "Benchmark driver for the FP_N UGKS radiative-transfer solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario to its end time.
    Run(Opts),
    /// Self-convergence study over nested meshes.
    Converge(Opts),
    /// List registered scenarios.
    List,
    /// Print the resolved configuration of a scenario.
    Describe(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    #[arg(long)]
    scenario: Option<String>,
    /// Key-value config file (TOML) with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long = "n-order")]
    n_order: Option<usize>,
    #[arg(long)]
    filter: Option<String>,
    #[arg(long = "sigma-f")]
    sigma_f: Option<f64>,
    /// ugks | sugks
    #[arg(long)]
    mode: Option<String>,
    /// on | off
    #[arg(long)]
    pp: Option<String>,
    /// acoustic | parabolic
    #[arg(long = "dt-law")]
    dt_law: Option<String>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Comma-separated mesh sizes for `converge`.
    #[arg(long, value_delimiter = ',')]
    meshes: Option<Vec<usize>>,
}

impl Opts {
    fn overrides(&self) -> Result<Overrides> {
        let file = match &self.config {
            Some(p) => Overrides::from_file(p)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            scenario: self.scenario.clone(),
            preset: self.preset.clone(),
            nx: self.nx,
            ny: self.ny,
            n_order: self.n_order,
            filter: self.filter.clone(),
            sigma_f: self.sigma_f,
            mode: self.mode.clone(),
            pp: self.pp.clone(),
            dt_law: self.dt_law.clone(),
            cfl: self.cfl,
            t_end: self.t_end,
            eps: self.eps,
            out_dir: self.out_dir.clone(),
            meshes: self.meshes.clone(),
        };
        Ok(file.merged(flags))
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::List => {
            for n in NAMES {
                println!("{n:<12} {}", bench::scenarios::describe(n)?);
            }
        }
        Cmd::Describe(o) => {
            let s = o.overrides()?.resolve()?;
            let text = toml::to_string_pretty(&s).map_err(|e| Error::InvalidState(e.to_string()))?;
            print!("{text}");
        }
        Cmd::Run(o) => {
            let ov = o.overrides()?;
            let s = ov.resolve()?;
            let out = ov.out_dir.clone().unwrap_or_else(|| PathBuf::from(format!("out/{}", s.name)));
            let r = bench::run_scenario(&s, Some(&out))?;
            let rep = &r.report;
            println!(
                "{}: {} steps to t = {:.6e} in {:.2} s; min rho = {:.6e}; max sweeps = {}",
                s.name,
                rep.steps,
                rep.final_time,
                rep.wall_seconds,
                rep.overall_min_rho(),
                rep.max_sweeps
            );
            for (r, d) in &rep.symmetry {
                println!("symmetry deviation at r = {r}: {d:.4e}");
            }
            println!("outputs in {}", out.display());
        }
        Cmd::Converge(o) => {
            let ov = o.overrides()?;
            let s = ov.resolve()?;
            let meshes = ov.meshes.clone().unwrap_or_else(|| vec![20, 40, 80, 160]);
            let rows = bench::convergence_study(&s, &meshes, s.dt_law)?;
            print!("{}", output::format_order_table(&rows));
            let out = ov.out_dir.clone().unwrap_or_else(|| PathBuf::from(format!("out/{}_converge", s.name)));
            output::write_order_table(&out, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
