//! Run configuration, read from TOML.
//!
//! ```toml
//! [geometry]
//! major_radius = 500.0
//! minor_radius = 250.0
//!
//! [field]
//! orientation = "tilted"
//! tilt_degrees = 45.0
//!
//! [basis]
//! n_even = 6
//! n_odd = 6
//! nu_min = -2
//! nu_max = 2
//!
//! [sweep]
//! tau_start = 0.0
//! tau_stop = 3.0
//! tau_step = 0.05
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Every key is optional. Lengths are in Angstrom.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::{gram_schmidt_basis, BasisSet};
use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::hamiltonian::{AssemblyOptions, Closure, VcForm};
use crate::oracle::{GridSpec, OracleOptions, Stencil};
use crate::sweep::{Orientation, Variant};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometrySection,
    pub field: FieldSection,
    pub basis: BasisSection,
    pub sweep: SweepSection,
    pub verify: VerifySection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySection {
    pub major_radius: f64,
    pub minor_radius: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            major_radius: 500.0,
            minor_radius: 250.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationKind {
    #[default]
    Axial,
    Tilted,
    InPlane,
}

impl std::str::FromStr for OrientationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "axial" => Ok(Self::Axial),
            "tilted" => Ok(Self::Tilted),
            "in-plane" | "in_plane" | "inplane" => Ok(Self::InPlane),
            other => Err(Error::Config(format!(
                "unknown orientation '{other}' (expected axial, tilted or in-plane)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldSection {
    pub orientation: OrientationKind,
    /// Angle of the field above the torus plane for `tilted`.
    pub tilt_degrees: f64,
    /// Restricts runs to one curvature-potential setting; both when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vc: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vmag: Option<bool>,
}

impl Default for FieldSection {
    fn default() -> Self {
        Self {
            orientation: OrientationKind::Axial,
            tilt_degrees: 45.0,
            vc: None,
            vmag: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasisSection {
    pub n_even: usize,
    pub n_odd: usize,
    pub nu_min: i32,
    pub nu_max: i32,
    pub closure: Closure,
    pub vc_form: VcForm,
    pub quadrature_nodes: usize,
}

impl Default for BasisSection {
    fn default() -> Self {
        Self {
            n_even: 6,
            n_odd: 6,
            nu_min: -2,
            nu_max: 2,
            closure: Closure::EvenRows,
            vc_form: VcForm::Metric,
            quadrature_nodes: 512,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub tau_start: f64,
    pub tau_stop: f64,
    pub tau_step: f64,
    /// Flux values used by `table` and `verify`.
    pub table_taus: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            tau_start: 0.0,
            tau_stop: 3.0,
            tau_step: 0.05,
            table_taus: vec![0.0, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub n_theta: usize,
    pub n_phi: usize,
    pub stencil: Stencil,
    pub absolute_tolerance: f64,
    pub relative_tolerance: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            n_theta: 64,
            n_phi: 32,
            stencil: Stencil::FourthOrder,
            absolute_tolerance: 1e-3,
            relative_tolerance: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> Result<()> {
        self.geometry()?;
        self.tau_grid()?;
        let b = &self.basis;
        if b.n_even == 0 && b.n_odd == 0 {
            return Err(Error::Config("basis must contain at least one theta-function".into()));
        }
        if b.nu_min > b.nu_max {
            return Err(Error::Config(format!("nu_min = {} exceeds nu_max = {}", b.nu_min, b.nu_max)));
        }
        if b.quadrature_nodes < 16 {
            return Err(Error::Config("quadrature_nodes must be at least 16".into()));
        }
        if !self.field.tilt_degrees.is_finite() {
            return Err(Error::Config("tilt_degrees must be finite".into()));
        }
        if self.sweep.table_taus.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("table_taus must be finite".into()));
        }
        self.grid()?;
        let v = &self.verify;
        if !(v.absolute_tolerance >= 0.0 && v.relative_tolerance >= 0.0) {
            return Err(Error::Config("verification tolerances must be non-negative".into()));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<TorusGeometry> {
        TorusGeometry::new(self.geometry.major_radius, self.geometry.minor_radius)
    }

    pub fn build_basis(&self) -> Result<BasisSet> {
        let b = &self.basis;
        gram_schmidt_basis(&self.geometry()?, b.n_even, b.n_odd, b.nu_min, b.nu_max)
    }

    pub fn assembly_options(&self) -> AssemblyOptions {
        AssemblyOptions {
            closure: self.basis.closure,
            vc_form: self.basis.vc_form,
            quadrature_nodes: self.basis.quadrature_nodes,
        }
    }

    pub fn orientation(&self) -> Orientation {
        match self.field.orientation {
            OrientationKind::Axial => Orientation::Axial,
            OrientationKind::Tilted => Orientation::Tilted {
                degrees: self.field.tilt_degrees,
            },
            OrientationKind::InPlane => Orientation::InPlane,
        }
    }

    /// The three standard variants, or the single one pinned by `vc`/`vmag`.
    pub fn variants(&self) -> Vec<Variant> {
        match (self.field.vc, self.field.vmag) {
            (None, None) => Variant::STANDARD.to_vec(),
            (vc, vmag) => vec![Variant {
                vc: vc.unwrap_or(true),
                vmag: vmag.unwrap_or(vc.unwrap_or(true)),
            }],
        }
    }

    pub fn tau_grid(&self) -> Result<Vec<f64>> {
        crate::sweep::tau_grid(self.sweep.tau_start, self.sweep.tau_stop, self.sweep.tau_step)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.verify.n_theta, self.verify.n_phi)
    }

    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions {
            stencil: self.verify.stencil,
            closure: self.basis.closure,
            ..OracleOptions::default()
        }
    }
}
