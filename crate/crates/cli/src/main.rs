use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use curvspec::config::{OrientationKind, RunConfig};
use curvspec::field::{tau_per_tesla, FieldConfig};
use curvspec::oracle::{GridSpec, Stencil};
use curvspec::solver::{ground_state_composition, EnergySelector, DEFAULT_THRESHOLD};
use curvspec::sweep::{self, verification_points, Model, Orientation, Variant};
use curvspec::Error;

const EXIT_VERIFY_FAILED: u8 = 2;

/// Electron spectra on a torus in a tilted magnetic field.
#[derive(Parser, Debug)]
#[command(name = "curvspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ground-state eps0 versus flux, one CSV per orientation.
    Sweep(Common),
    /// Ground-state compositions at the configured flux values.
    Table(Common),
    /// Compare the basis solver against the grid oracle.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Oracle grid as THETAxPHI, e.g. 64x32.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        stencil: Option<Stencil>,
    },
    /// Write the theta-function basis as JSON; optionally the matrix too.
    BasisDump {
        #[command(flatten)]
        common: Common,
        /// Also export the matrix and spectrum at this flux.
        #[arg(long)]
        matrix_tau: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// axial, tilted, in-plane or all.
    #[arg(long)]
    orientation: Option<String>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_step: Option<f64>,
    /// Read --tau-max and --tau-step as field strengths in tesla.
    #[arg(long)]
    tesla: bool,
    /// Curvature potential on or off.
    #[arg(long, value_parser = parse_switch)]
    vc: Option<bool>,
    /// Magnetic geometric potential on or off.
    #[arg(long, value_parser = parse_switch)]
    vmag: Option<bool>,
}

fn parse_switch(s: &str) -> Result<bool, String> {
    match s {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        other => Err(format!("expected on or off, got '{other}'")),
    }
}

struct Run {
    cfg: RunConfig,
    orientations: Vec<Orientation>,
    /// Whether `--orientation` was given.
    explicit_orientation: bool,
}

impl Common {
    fn resolve(&self) -> Result<Run, Error> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        let unit = if self.tesla {
            tau_per_tesla(cfg.geometry.major_radius)
        } else {
            1.0
        };
        if let Some(t) = self.tau_max {
            cfg.sweep.tau_stop = t * unit;
        }
        if let Some(t) = self.tau_step {
            cfg.sweep.tau_step = t * unit;
        }
        if self.vc.is_some() {
            cfg.field.vc = self.vc;
        }
        if self.vmag.is_some() {
            cfg.field.vmag = self.vmag;
        }
        let mut all = false;
        if let Some(o) = &self.orientation {
            if o == "all" {
                all = true;
            } else {
                cfg.field.orientation = o.parse::<OrientationKind>()?;
            }
        }
        cfg.validate()?;
        let orientations = if all {
            let tilted = Orientation::Tilted {
                degrees: cfg.field.tilt_degrees,
            };
            vec![Orientation::Axial, tilted, Orientation::InPlane]
        } else {
            vec![cfg.orientation()]
        };
        Ok(Run {
            cfg,
            orientations,
            explicit_orientation: self.orientation.is_some(),
        })
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn run_sweep(common: &Common) -> Result<u8, Error> {
    let run = common.resolve()?;
    let taus = run.cfg.tau_grid()?;
    let model = Model::from_config(&run.cfg)?;
    for o in &run.orientations {
        let points = sweep::run_sweep(&model, *o, &taus, &run.cfg.variants())?;
        let path = write_file(&run.cfg.output.dir, &format!("sweep_{}.csv", o.slug()), &sweep::sweep_csv(&points))?;
        println!("{}", path.display());
    }
    Ok(0)
}

fn run_table(common: &Common) -> Result<u8, Error> {
    let run = common.resolve()?;
    let model = Model::from_config(&run.cfg)?;
    for o in &run.orientations {
        let report = sweep::table(&model, *o, &run.cfg.sweep.table_taus, &run.cfg.variants())?;
        print!("{report}");
        write_file(&run.cfg.output.dir, &format!("table_{}.json", o.slug()), &report.to_json())?;
    }
    Ok(0)
}

fn parse_grid(s: &str) -> Result<GridSpec, Error> {
    let bad = || Error::Config(format!("grid must look like 64x32, got '{s}'"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    GridSpec::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
}

fn run_verify(common: &Common, grid: Option<&str>, stencil: Option<Stencil>) -> Result<u8, Error> {
    let mut run = common.resolve()?;
    if let Some(s) = stencil {
        run.cfg.verify.stencil = s;
    }
    let grid = match grid {
        Some(g) => parse_grid(g)?,
        None => run.cfg.grid()?,
    };
    let model = Model::from_config(&run.cfg)?;
    let taus = &run.cfg.sweep.table_taus;
    let points: Vec<(Orientation, f64)> = if run.explicit_orientation {
        run.orientations
            .iter()
            .flat_map(|&o| taus.iter().map(move |&t| (o, t)))
            .collect()
    } else {
        verification_points(taus)
    };
    let variant = run.cfg.variants().last().copied().unwrap_or(Variant::ON_ON);
    let v = &run.cfg.verify;
    let report = sweep::verify(
        &model,
        &points,
        variant,
        grid,
        run.cfg.oracle_options(),
        v.absolute_tolerance,
        v.relative_tolerance,
    )?;
    print!("{report}");
    write_file(&run.cfg.output.dir, "verify.json", &report.to_json())?;
    Ok(if report.all_pass() { 0 } else { EXIT_VERIFY_FAILED })
}

fn run_basis_dump(common: &Common, matrix_tau: Option<f64>) -> Result<u8, Error> {
    let run = common.resolve()?;
    let model = Model::from_config(&run.cfg)?;
    let dir = &run.cfg.output.dir;
    let json = model.basis.to_json();
    println!("{json}");
    write_file(dir, "basis.json", &json)?;
    if let Some(tau) = matrix_tau {
        if !tau.is_finite() {
            return Err(Error::Config("matrix tau must be finite".into()));
        }
        let variant = run.cfg.variants().last().copied().unwrap_or(Variant::ON_ON);
        for o in &run.orientations {
            let field: FieldConfig = o.field(tau, variant);
            let h = model.assemble(&field)?;
            let s = curvspec::solver::eigensolve(&h)?;
            let comp = ground_state_composition(&s, EnergySelector::Ground, DEFAULT_THRESHOLD);
            let stem = format!("{}_tau{tau}", o.slug());
            write_file(dir, &format!("matrix_{stem}.csv"), &h.to_csv())?;
            write_file(dir, &format!("spectrum_{stem}.json"), &s.to_json())?;
            write_file(dir, &format!("composition_{stem}.json"), &comp.to_json())?;
            eprintln!("{o} tau = {tau} [{variant}]: eps0 = {:+.8}  {comp}", s.ground_eps());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Sweep(c) => run_sweep(c),
        Command::Table(c) => run_table(c),
        Command::Verify { common, grid, stencil } => run_verify(common, grid.as_deref(), *stencil),
        Command::BasisDump { common, matrix_tau } => run_basis_dump(common, *matrix_tau),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
