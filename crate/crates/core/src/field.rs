//! Uniform magnetic field `B = B1 i + B0 k` on the torus.
//!
//! Field strengths are carried as dimensionless fluxes
//! `tau = B pi R^2 / (pi hbar / e) = e B R^2 / hbar`. Vector potentials are
//! returned in units of `hbar / (e L)`, where `L` is the length unit of the
//! [`TorusGeometry`]; in those units `B = tau / R^2`.

use serde::{Deserialize, Serialize};

use crate::geometry::{torus_curvatures, TorusGeometry};

/// Elementary charge in coulomb.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Reduced Planck constant in J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Electron mass in kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
const ANGSTROM: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    /// Flux of the axial component B0 through a disc of radius R.
    pub tau0: f64,
    /// Flux of the in-plane component B1 through a disc of radius R.
    pub tau1: f64,
    pub vc_on: bool,
    pub vmag_on: bool,
}

impl FieldConfig {
    pub fn new(tau0: f64, tau1: f64) -> Self {
        Self {
            tau0,
            tau1,
            vc_on: true,
            vmag_on: true,
        }
    }

    pub fn with_toggles(mut self, vc_on: bool, vmag_on: bool) -> Self {
        self.vc_on = vc_on;
        self.vmag_on = vmag_on;
        self
    }

    pub fn reversed(self) -> Self {
        Self {
            tau0: -self.tau0,
            tau1: -self.tau1,
            ..self
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tau0.is_finite() && self.tau1.is_finite()
    }

    /// `(B0, B1)` in units of `hbar / (e L^2)`.
    pub fn field_strengths(&self, geom: &TorusGeometry) -> (f64, f64) {
        let r2 = geom.major_radius() * geom.major_radius();
        (self.tau0 / r2, self.tau1 / r2)
    }
}

/// Flux parameter per tesla for a torus of major radius `R` (in Angstrom):
/// `tau = e R^2 B / hbar`.
///
/// For R = 500 A this is about 3.80 per tesla. The often-quoted
/// `tau = 0.263 B` for the same torus is the reciprocal (tesla per unit tau).
pub fn tau_per_tesla(major_radius_angstrom: f64) -> f64 {
    let r = major_radius_angstrom * ANGSTROM;
    ELEMENTARY_CHARGE * r * r / HBAR
}

/// Energy unit `hbar^2 / (2 m_e a^2)` in meV for a tube radius in Angstrom.
pub fn energy_scale_mev(minor_radius_angstrom: f64) -> f64 {
    let a = minor_radius_angstrom * ANGSTROM;
    HBAR * HBAR / (2.0 * ELECTRON_MASS * a * a) / ELEMENTARY_CHARGE * 1e3
}

/// Components of `A` in the surface frame `(e_theta, e_phi, e_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceVectorPotential {
    pub a_theta: f64,
    pub a_phi: f64,
    pub a_n: f64,
}

impl SurfaceVectorPotential {
    pub fn norm_sqr(&self) -> f64 {
        self.a_theta * self.a_theta + self.a_phi * self.a_phi + self.a_n * self.a_n
    }
}

/// Coulomb-gauge `A = B x x / 2` at the point `(theta, phi, q)` near the torus.
///
/// `q` is the signed distance along `e_n` and must satisfy `|q| < a`.
pub fn vector_potential(
    geom: &TorusGeometry,
    field: &FieldConfig,
    theta: f64,
    phi: f64,
    q: f64,
) -> SurfaceVectorPotential {
    debug_assert!(q.abs() < geom.minor_radius());
    let (b0, b1) = field.field_strengths(geom);
    let r = geom.major_radius();
    let a_q = geom.minor_radius() + q;
    let w_q = geom.w(theta) + q * theta.cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    SurfaceVectorPotential {
        a_theta: 0.5 * b1 * sp * (r * ct + a_q),
        a_phi: 0.5 * (b0 * w_q - b1 * a_q * st * cp),
        a_n: 0.5 * b1 * r * sp * st,
    }
}

/// `A = B x x / 2` evaluated directly in Cartesian coordinates.
pub fn cartesian_vector_potential(geom: &TorusGeometry, field: &FieldConfig, x: [f64; 3]) -> [f64; 3] {
    let (b0, b1) = field.field_strengths(geom);
    let b = [b1, 0.0, b0];
    [
        0.5 * (b[1] * x[2] - b[2] * x[1]),
        0.5 * (b[2] * x[0] - b[0] * x[2]),
        0.5 * (b[0] * x[1] - b[1] * x[0]),
    ]
}

/// Real coefficient of the magnetic geometric potential in the
/// dimensionless surface operator:
/// `(alpha tau1 / 2) sin(theta) sin(phi) (1 + 2 alpha cos(theta)) / F(theta)`.
///
/// The term enters the operator multiplied by `i`; that factor is applied
/// during assembly. `dA_n/dq` vanishes for a uniform field, so only the
/// `h A_n` piece contributes.
pub fn vmag_potential(geom: &TorusGeometry, field: &FieldConfig, theta: f64, phi: f64) -> f64 {
    let alpha = geom.alpha();
    let (st, ct) = theta.sin_cos();
    0.5 * alpha * field.tau1 * st * phi.sin() * (1.0 + 2.0 * alpha * ct) / geom.metric_factor(theta)
}

/// Same quantity built from its geometric ingredients: `2 a^2 h A_n(q = 0)`
/// in units where `hbar = e = 1`.
pub fn vmag_from_curvature(geom: &TorusGeometry, field: &FieldConfig, theta: f64, phi: f64) -> f64 {
    let h = torus_curvatures(geom, theta).h;
    let a_n = vector_potential(geom, field, theta, phi, 0.0).a_n;
    let a = geom.minor_radius();
    2.0 * a * a * h * a_n
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn axial_field_has_no_normal_or_meridian_component() {
        let g = TorusGeometry::reference();
        let f = FieldConfig::new(1.7, 0.0);
        let (b0, _) = f.field_strengths(&g);
        for &(t, p, q) in &[(0.3, 1.1, 0.0), (2.5, -0.4, 10.0), (4.0, 3.0, -100.0)] {
            let a = vector_potential(&g, &f, t, p, q);
            assert_eq!(a.a_theta, 0.0);
            assert_eq!(a.a_n, 0.0);
            let w_q = g.w(t) + q * f64::cos(t);
            assert_relative_eq!(a.a_phi, 0.5 * b0 * w_q, max_relative = 1e-14);
        }
    }

    #[test]
    fn normal_component_vanishes_on_outer_equator() {
        let g = TorusGeometry::reference();
        let f = FieldConfig::new(0.0, 2.0);
        for p in [0.0, 0.9, 2.2, 5.0] {
            assert_eq!(vector_potential(&g, &f, 0.0, p, 0.0).a_n, 0.0);
        }
    }

    #[test]
    fn normal_component_independent_of_q() {
        let g = TorusGeometry::reference();
        let f = FieldConfig::new(0.4, 1.3);
        for q in [-120.0, -5.0, 0.0, 33.0, 200.0] {
            let a = vector_potential(&g, &f, 1.2, 0.8, q);
            let a0 = vector_potential(&g, &f, 1.2, 0.8, 0.0);
            assert_eq!(a.a_n, a0.a_n);
        }
    }

    #[test]
    fn vmag_reference_values() {
        let g = TorusGeometry::reference();
        assert_eq!(vmag_potential(&g, &FieldConfig::new(3.0, 0.0), 1.0, 1.0), 0.0);
        let f = FieldConfig::new(0.0, 1.6);
        assert_relative_eq!(
            vmag_potential(&g, &f, FRAC_PI_2, FRAC_PI_2),
            f.tau1 / 4.0,
            max_relative = 1e-14
        );
        let v = vmag_potential(&g, &f, 0.7, 0.4);
        assert_relative_eq!(vmag_potential(&g, &f, 0.7, -0.4), -v, max_relative = 1e-15);
    }

    #[test]
    fn reference_flux_conversion() {
        let t = tau_per_tesla(500.0);
        assert!((t - 3.798).abs() < 1e-3, "{t}");
        assert!((1.0 / t - 0.263).abs() < 1e-3);
        let e = energy_scale_mev(250.0);
        assert!((e - 0.06096).abs() < 1e-4, "{e}");
    }
}
