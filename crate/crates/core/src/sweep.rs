//! Flux sweeps, composition tables and oracle verification runs.

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::basis::BasisSet;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::field::{energy_scale_mev, FieldConfig};
use crate::geometry::TorusGeometry;
use crate::hamiltonian::{assemble_with, AssemblyOptions, HamiltonianMatrix};
use crate::oracle::{grid_solve_with, GridSpec, OracleOptions};
use crate::par::{par_map, seq_map};
use crate::solver::{eigensolve, ground_state_composition, EnergySelector, SpectrumResult, StateComposition, DEFAULT_THRESHOLD};

const MAX_SWEEP_POINTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Field along the symmetry axis.
    Axial,
    /// Field at `degrees` above the torus plane, in the x-z plane.
    Tilted { degrees: f64 },
    /// Field along x, in the torus plane.
    InPlane,
}

impl Orientation {
    pub const TILTED_45: Orientation = Orientation::Tilted { degrees: 45.0 };

    /// `(tau0, tau1)` for field magnitude `tau`.
    pub fn components(&self, tau: f64) -> (f64, f64) {
        match *self {
            Orientation::Axial => (tau, 0.0),
            Orientation::InPlane => (0.0, tau),
            Orientation::Tilted { degrees } => {
                if degrees == 45.0 {
                    let c = tau * std::f64::consts::FRAC_1_SQRT_2;
                    (c, c)
                } else {
                    let (s, c) = degrees.to_radians().sin_cos();
                    (tau * s, tau * c)
                }
            }
        }
    }

    pub fn field(&self, tau: f64, variant: Variant) -> FieldConfig {
        let (t0, t1) = self.components(tau);
        FieldConfig::new(t0, t1).with_toggles(variant.vc, variant.vmag)
    }

    /// Short name used in file names.
    pub fn slug(&self) -> String {
        match *self {
            Orientation::Axial => "axial".into(),
            Orientation::InPlane => "in-plane".into(),
            Orientation::Tilted { degrees } => format!("tilted{degrees}"),
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Orientation::Axial => f.write_str("axial"),
            Orientation::InPlane => f.write_str("in-plane"),
            Orientation::Tilted { degrees } => write!(f, "tilted({degrees} deg)"),
        }
    }
}

/// Curvature-potential toggles of one curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub vc: bool,
    pub vmag: bool,
}

impl Variant {
    pub const OFF_OFF: Variant = Variant { vc: false, vmag: false };
    pub const ON_OFF: Variant = Variant { vc: true, vmag: false };
    pub const ON_ON: Variant = Variant { vc: true, vmag: true };
    pub const STANDARD: [Variant; 3] = [Self::OFF_OFF, Self::ON_OFF, Self::ON_ON];

    pub fn label(&self) -> String {
        let s = |b: bool| if b { "on" } else { "off" };
        format!("{}/{}", s(self.vc), s(self.vmag))
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `start, start + step, ..., stop` (inclusive when `stop` lands on the grid).
pub fn tau_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(Error::Config("sweep bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(Error::Config(format!("tau step must be positive, got {step}")));
    }
    if stop < start {
        return Err(Error::Config(format!("tau stop {stop} is below tau start {start}")));
    }
    let span = (stop - start) / step;
    let n = (span + 1e-9).floor();
    if n as usize >= MAX_SWEEP_POINTS {
        return Err(Error::Config(format!("sweep would have more than {MAX_SWEEP_POINTS} points")));
    }
    Ok((0..=n as usize).map(|i| start + i as f64 * step).collect())
}

/// Geometry, basis and assembly options shared by every point of a run.
#[derive(Debug, Clone)]
pub struct Model {
    pub geom: TorusGeometry,
    pub basis: BasisSet,
    pub options: AssemblyOptions,
}

impl Model {
    pub fn new(geom: TorusGeometry, basis: BasisSet, options: AssemblyOptions) -> Self {
        Self { geom, basis, options }
    }

    pub fn from_config(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self::new(cfg.geometry()?, cfg.build_basis()?, cfg.assembly_options()))
    }

    pub fn assemble(&self, field: &FieldConfig) -> Result<HamiltonianMatrix> {
        assemble_with(&self.geom, field, &self.basis, self.options)
    }

    pub fn spectrum(&self, field: &FieldConfig) -> Result<SpectrumResult> {
        eigensolve(&self.assemble(field)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub tau: f64,
    pub variant: Variant,
    pub eps0: f64,
    pub nu_dominant: i32,
}

impl SweepPoint {
    /// `-eps0`, proportional to the physical energy.
    pub fn eps0_physical(&self) -> f64 {
        -self.eps0
    }
}

fn sweep_items(taus: &[f64], variants: &[Variant]) -> Vec<(f64, Variant)> {
    taus.iter().flat_map(|&t| variants.iter().map(move |&v| (t, v))).collect()
}

fn solve_point(model: &Model, orientation: Orientation, tau: f64, variant: Variant) -> Result<SweepPoint> {
    let s = model.spectrum(&orientation.field(tau, variant))?;
    let comp = ground_state_composition(&s, EnergySelector::Ground, DEFAULT_THRESHOLD);
    Ok(SweepPoint {
        tau,
        variant,
        eps0: s.ground_eps(),
        nu_dominant: comp.nu_dominant(),
    })
}

/// Ground-state sweep over `taus` x `variants`, ordered by tau then variant.
pub fn run_sweep(model: &Model, orientation: Orientation, taus: &[f64], variants: &[Variant]) -> Result<Vec<SweepPoint>> {
    par_map(&sweep_items(taus, variants), |&(t, v)| solve_point(model, orientation, t, v))
        .into_iter()
        .collect()
}

/// Same as [`run_sweep`] on the calling thread only.
pub fn run_sweep_sequential(
    model: &Model,
    orientation: Orientation,
    taus: &[f64],
    variants: &[Variant],
) -> Result<Vec<SweepPoint>> {
    seq_map(&sweep_items(taus, variants), |&(t, v)| solve_point(model, orientation, t, v))
        .into_iter()
        .collect()
}

pub const CSV_HEADER: &str = "tau,variant,eps0,eps0_physical,nu_dominant";

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for p in points {
        let _ = writeln!(s, "{},{},{},{},{}", p.tau, p.variant, p.eps0, p.eps0_physical(), p.nu_dominant);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub tau: f64,
    pub variant: Variant,
    pub eps0: f64,
    /// Physical ground energy `-eps0 * hbar^2 / (2 m a^2)` in meV.
    pub energy_mev: f64,
    pub composition: StateComposition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub orientation: Orientation,
    pub cells: Vec<TableCell>,
}

impl TableReport {
    pub fn cell(&self, tau: f64, variant: Variant) -> Option<&TableCell> {
        self.cells.iter().find(|c| c.tau == tau && c.variant == variant)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

impl fmt::Display for TableReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Ground states, {} field", self.orientation)?;
        let mut variants: Vec<Variant> = Vec::new();
        for c in &self.cells {
            if !variants.contains(&c.variant) {
                variants.push(c.variant);
            }
        }
        for v in variants {
            writeln!(f, "[{v}]")?;
            for c in self.cells.iter().filter(|c| c.variant == v) {
                writeln!(f, "  tau = {:<5} eps0 = {:+.6}  {}", c.tau, c.eps0, c.composition)?;
            }
        }
        Ok(())
    }
}

/// Ground-state compositions at each `tau` for each variant.
pub fn table(model: &Model, orientation: Orientation, taus: &[f64], variants: &[Variant]) -> Result<TableReport> {
    let scale = energy_scale_mev(model.geom.minor_radius());
    let cells = par_map(&sweep_items(taus, variants), |&(tau, variant)| -> Result<TableCell> {
        let s = model.spectrum(&orientation.field(tau, variant))?;
        let composition = ground_state_composition(&s, EnergySelector::Ground, DEFAULT_THRESHOLD);
        Ok(TableCell {
            tau,
            variant,
            eps0: s.ground_eps(),
            energy_mev: -s.ground_eps() * scale,
            composition,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut cells = cells;
    cells.sort_by(|a, b| {
        let key = |c: &TableCell| Variant::STANDARD.iter().position(|v| *v == c.variant).unwrap_or(3);
        key(a).cmp(&key(b)).then(a.tau.total_cmp(&b.tau))
    });
    Ok(TableReport { orientation, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub orientation: Orientation,
    pub tau: f64,
    pub variant: Variant,
    pub basis_eps0: f64,
    pub grid_eps0: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub refinement_difference: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub grid: GridSpec,
    pub stencil: crate::oracle::Stencil,
    pub entries: Vec<VerifyEntry>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "oracle grid {} ({} stencil)", self.grid, self.stencil)?;
        for e in &self.entries {
            writeln!(
                f,
                "{} {:<16} tau = {:<4} [{}] basis {:+.6} grid {:+.6} |diff| {:.2e} tol {:.1e}",
                if e.pass { "PASS" } else { "FAIL" },
                e.orientation.to_string(),
                e.tau,
                e.variant,
                e.basis_eps0,
                e.grid_eps0,
                e.difference,
                e.tolerance
            )?;
        }
        Ok(())
    }
}

/// Compares the basis ground eigenvalue with the grid oracle at every
/// `(orientation, tau)` pair. Grid refinement failures are returned as
/// errors; disagreements are reported per entry.
pub fn verify(
    model: &Model,
    points: &[(Orientation, f64)],
    variant: Variant,
    grid: GridSpec,
    oracle: OracleOptions,
    absolute_tolerance: f64,
    relative_tolerance: f64,
) -> Result<VerifyReport> {
    let entries = par_map(points, |&(orientation, tau)| -> Result<VerifyEntry> {
        let field = orientation.field(tau, variant);
        let basis_eps0 = model.spectrum(&field)?.ground_eps();
        let g = grid_solve_with(&model.geom, &field, grid, 1, oracle)?;
        let difference = (g.eps0() - basis_eps0).abs();
        let tolerance = absolute_tolerance.max(relative_tolerance * basis_eps0.abs());
        Ok(VerifyEntry {
            orientation,
            tau,
            variant,
            basis_eps0,
            grid_eps0: g.eps0(),
            difference,
            tolerance,
            refinement_difference: g.refinement.map(|r| r.difference),
            pass: difference <= tolerance,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(VerifyReport {
        grid,
        stencil: oracle.stencil,
        entries,
    })
}

/// The three orientations crossed with `taus`.
pub fn verification_points(taus: &[f64]) -> Vec<(Orientation, f64)> {
    [Orientation::Axial, Orientation::TILTED_45, Orientation::InPlane]
        .iter()
        .flat_map(|&o| taus.iter().map(move |&t| (o, t)))
        .collect()
}
