//! Differential geometry of azimuthally symmetric surfaces.
//!
//! A surface of revolution is given in Monge form `r(rho, phi) = rho e_rho +
//! S(rho) e_z`. The unit normal is `e_n = (-S' e_rho + e_z) / Z` with
//! `Z = sqrt(1 + S'^2)`, which points "up" (towards +z). With this normal the
//! principal curvatures are `k1 = -S'' / Z^3` (meridian) and
//! `k2 = -S' / (rho Z)` (parallel), and the parallel surface at distance `q`
//! has area element `(1 + 2 h q + k q^2) dA`.
//!
//! The torus uses `e_n = cos(theta) e_rho + sin(theta) e_z`, pointing away
//! from the tube axis. On the upper half of the torus (`0 < theta < pi`) this
//! coincides with the Monge normal of [`TorusMonge::upper`], so both routes
//! give the same signed curvatures there. On the lower half the Monge normal
//! points into the tube and both curvatures flip sign; `h^2 - k` is
//! unaffected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A height profile `S(rho)` with analytic first and second derivatives.
pub trait SurfaceProfile {
    fn shape(&self, rho: f64) -> f64;
    fn d1(&self, rho: f64) -> f64;
    fn d2(&self, rho: f64) -> f64;
}

/// `S(rho) = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Plane;

impl SurfaceProfile for Plane {
    fn shape(&self, _rho: f64) -> f64 {
        0.0
    }
    fn d1(&self, _rho: f64) -> f64 {
        0.0
    }
    fn d2(&self, _rho: f64) -> f64 {
        0.0
    }
}

/// Upper hemisphere `S(rho) = sqrt(R^2 - rho^2)`, valid for `rho < R`.
#[derive(Debug, Clone, Copy)]
pub struct Hemisphere {
    pub radius: f64,
}

impl SurfaceProfile for Hemisphere {
    fn shape(&self, rho: f64) -> f64 {
        (self.radius * self.radius - rho * rho).sqrt()
    }
    fn d1(&self, rho: f64) -> f64 {
        -rho / self.shape(rho)
    }
    fn d2(&self, rho: f64) -> f64 {
        let s = self.shape(rho);
        -self.radius * self.radius / (s * s * s)
    }
}

/// Catenoid `S(rho) = c arccosh(rho / c)`, valid for `rho > c`. A minimal
/// surface, so its mean curvature vanishes identically.
#[derive(Debug, Clone, Copy)]
pub struct Catenoid {
    pub waist: f64,
}

impl SurfaceProfile for Catenoid {
    fn shape(&self, rho: f64) -> f64 {
        self.waist * (rho / self.waist).acosh()
    }
    fn d1(&self, rho: f64) -> f64 {
        let c = self.waist;
        c / (rho * rho - c * c).sqrt()
    }
    fn d2(&self, rho: f64) -> f64 {
        let c = self.waist;
        let u = rho * rho - c * c;
        -c * rho / (u * u.sqrt())
    }
}

/// One half of a ring torus written as a Monge profile,
/// `S(rho) = +/- sqrt(a^2 - (rho - R)^2)` for `R - a < rho < R + a`.
#[derive(Debug, Clone, Copy)]
pub struct TorusMonge {
    pub major_radius: f64,
    pub minor_radius: f64,
    pub upper: bool,
}

impl TorusMonge {
    pub fn upper(geom: &TorusGeometry) -> Self {
        Self {
            major_radius: geom.major_radius(),
            minor_radius: geom.minor_radius(),
            upper: true,
        }
    }

    pub fn lower(geom: &TorusGeometry) -> Self {
        Self {
            upper: false,
            ..Self::upper(geom)
        }
    }

    fn sign(&self) -> f64 {
        if self.upper {
            1.0
        } else {
            -1.0
        }
    }

    fn root(&self, rho: f64) -> f64 {
        let x = rho - self.major_radius;
        (self.minor_radius * self.minor_radius - x * x).sqrt()
    }
}

impl SurfaceProfile for TorusMonge {
    fn shape(&self, rho: f64) -> f64 {
        self.sign() * self.root(rho)
    }
    fn d1(&self, rho: f64) -> f64 {
        -self.sign() * (rho - self.major_radius) / self.root(rho)
    }
    fn d2(&self, rho: f64) -> f64 {
        let s = self.root(rho);
        -self.sign() * self.minor_radius * self.minor_radius / (s * s * s)
    }
}

/// Profile assembled from three closures.
pub struct FnProfile<S, D1, D2> {
    pub shape: S,
    pub d1: D1,
    pub d2: D2,
}

impl<S, D1, D2> SurfaceProfile for FnProfile<S, D1, D2>
where
    S: Fn(f64) -> f64,
    D1: Fn(f64) -> f64,
    D2: Fn(f64) -> f64,
{
    fn shape(&self, rho: f64) -> f64 {
        (self.shape)(rho)
    }
    fn d1(&self, rho: f64) -> f64 {
        (self.d1)(rho)
    }
    fn d2(&self, rho: f64) -> f64 {
        (self.d2)(rho)
    }
}

/// Metric factor, principal, mean and Gaussian curvature at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureData {
    pub z: f64,
    pub k1: f64,
    pub k2: f64,
    pub h: f64,
    pub k: f64,
}

impl CurvatureData {
    fn from_principal(z: f64, k1: f64, k2: f64) -> Self {
        Self {
            z,
            k1,
            k2,
            h: 0.5 * (k1 + k2),
            k: k1 * k2,
        }
    }

    /// `h^2 - k`, which equals `(k1 - k2)^2 / 4` and is never negative.
    pub fn vc(&self) -> f64 {
        self.h * self.h - self.k
    }
}

pub fn curvatures<P: SurfaceProfile + ?Sized>(profile: &P, rho: f64) -> Result<CurvatureData> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(Error::Domain { rho });
    }
    let s1 = profile.d1(rho);
    let s2 = profile.d2(rho);
    if !s1.is_finite() || !s2.is_finite() {
        return Err(Error::Domain { rho });
    }
    let z = (1.0 + s1 * s1).sqrt();
    let k1 = -s2 / (z * z * z);
    let k2 = -s1 / (rho * z);
    Ok(CurvatureData::from_principal(z, k1, k2))
}

/// Curvature part of the thin-layer geometric potential, `h^2 - k`
/// (units of 1/length^2, no energy prefactor).
pub fn geometric_potential_vc<P: SurfaceProfile + ?Sized>(profile: &P, rho: f64) -> Result<f64> {
    curvatures(profile, rho).map(|c| c.vc())
}

/// Ring torus with major radius `R` and minor (tube) radius `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TorusRadii", into = "TorusRadii")]
pub struct TorusGeometry {
    major_radius: f64,
    minor_radius: f64,
    alpha: f64,
}

#[derive(Serialize, Deserialize)]
struct TorusRadii {
    major_radius: f64,
    minor_radius: f64,
}

impl TryFrom<TorusRadii> for TorusGeometry {
    type Error = Error;
    fn try_from(r: TorusRadii) -> Result<Self> {
        TorusGeometry::new(r.major_radius, r.minor_radius)
    }
}

impl From<TorusGeometry> for TorusRadii {
    fn from(g: TorusGeometry) -> Self {
        TorusRadii {
            major_radius: g.major_radius,
            minor_radius: g.minor_radius,
        }
    }
}

impl TorusGeometry {
    pub fn new(major_radius: f64, minor_radius: f64) -> Result<Self> {
        if !(major_radius.is_finite() && minor_radius.is_finite()) {
            return Err(Error::Config("torus radii must be finite".into()));
        }
        if !(minor_radius > 0.0 && minor_radius < major_radius) {
            return Err(Error::Config(format!(
                "ring torus requires 0 < a < R (got R = {major_radius}, a = {minor_radius})"
            )));
        }
        Ok(Self {
            major_radius,
            minor_radius,
            alpha: minor_radius / major_radius,
        })
    }

    pub fn from_alpha(major_radius: f64, alpha: f64) -> Result<Self> {
        Self::new(major_radius, alpha * major_radius)
    }

    /// R = 500 Angstrom, a = 250 Angstrom (alpha = 1/2).
    pub fn reference() -> Self {
        Self::new(500.0, 250.0).expect("reference torus is valid")
    }

    pub fn major_radius(&self) -> f64 {
        self.major_radius
    }

    pub fn minor_radius(&self) -> f64 {
        self.minor_radius
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Distance from the symmetry axis, `W = R + a cos(theta)`.
    pub fn w(&self, theta: f64) -> f64 {
        self.major_radius + self.minor_radius * theta.cos()
    }

    /// `F = 1 + alpha cos(theta) = W / R`.
    pub fn metric_factor(&self, theta: f64) -> f64 {
        1.0 + self.alpha * theta.cos()
    }

    /// Point `x(theta, phi, q) = W e_rho + a sin(theta) e_z + q e_n` in Cartesian coordinates.
    pub fn embed(&self, theta: f64, phi: f64, q: f64) -> [f64; 3] {
        let rho = self.w(theta) + q * theta.cos();
        [
            rho * phi.cos(),
            rho * phi.sin(),
            (self.minor_radius + q) * theta.sin(),
        ]
    }

    /// Orthonormal frame `(e_theta, e_phi, e_n)` at `(theta, phi)`.
    pub fn frame(&self, theta: f64, phi: f64) -> [[f64; 3]; 3] {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        [
            [-st * cp, -st * sp, ct],
            [-sp, cp, 0.0],
            [ct * cp, ct * sp, st],
        ]
    }
}

pub fn torus_curvatures(geom: &TorusGeometry, theta: f64) -> CurvatureData {
    let k1 = 1.0 / geom.minor_radius();
    let k2 = theta.cos() / geom.w(theta);
    CurvatureData::from_principal(1.0, k1, k2)
}

pub fn metric_factor_f(geom: &TorusGeometry, theta: f64) -> f64 {
    geom.metric_factor(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn plane_is_flat() {
        for rho in [0.1, 1.0, 17.0] {
            let c = curvatures(&Plane, rho).unwrap();
            assert_eq!((c.k1, c.k2, c.h, c.k), (0.0, 0.0, 0.0, 0.0));
            assert_eq!(c.z, 1.0);
        }
    }

    #[test]
    fn hemisphere_is_umbilic() {
        let r = 3.0;
        let c = curvatures(&Hemisphere { radius: r }, r / 2.0).unwrap();
        assert_relative_eq!(c.k1, 1.0 / r, max_relative = 1e-14);
        assert_relative_eq!(c.k2, 1.0 / r, max_relative = 1e-14);
        assert!(c.vc().abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_rho() {
        assert!(matches!(
            curvatures(&Plane, 0.0),
            Err(Error::Domain { rho }) if rho == 0.0
        ));
        // outside the hemisphere the root is NaN
        assert!(matches!(
            curvatures(&Hemisphere { radius: 1.0 }, 2.0),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn torus_curvatures_reference_points() {
        let g = TorusGeometry::reference();
        let c = torus_curvatures(&g, FRAC_PI_2);
        assert_relative_eq!(c.k1, 1.0 / 250.0);
        assert!(c.k2.abs() < 1e-18);
        assert!(c.k.abs() < 1e-20);

        let c0 = torus_curvatures(&g, 0.0);
        assert_relative_eq!(c0.k2, (1.0 / 500.0) * (1.0 / 1.5), max_relative = 1e-15);
    }

    #[test]
    fn metric_factor_values() {
        let g = TorusGeometry::reference();
        assert_eq!(metric_factor_f(&g, 0.0), 1.5);
        assert_relative_eq!(metric_factor_f(&g, PI), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn geometry_validation() {
        assert!(TorusGeometry::new(1.0, 1.0).is_err());
        assert!(TorusGeometry::new(1.0, 0.0).is_err());
        assert!(TorusGeometry::new(f64::NAN, 0.5).is_err());
        let g = TorusGeometry::from_alpha(500.0, 0.5).unwrap();
        assert_eq!(g.alpha(), 0.5);
    }

    #[test]
    fn vc_at_outer_equator_of_monge_torus() {
        // theta = pi/2 sits at rho = R on the upper half
        let g = TorusGeometry::reference();
        let monge = TorusMonge::upper(&g);
        let vc = geometric_potential_vc(&monge, g.major_radius()).unwrap();
        let t = torus_curvatures(&g, FRAC_PI_2);
        assert_relative_eq!(vc, (t.k1 - t.k2).powi(2) / 4.0, max_relative = 1e-12);
        assert_relative_eq!(vc, 1.0 / (4.0 * 250.0 * 250.0), max_relative = 1e-12);
    }

    #[test]
    fn frame_is_orthonormal() {
        let g = TorusGeometry::reference();
        let f = g.frame(0.7, -2.1);
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|c| f[i][c] * f[j][c]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn torus_serde_validates() {
        let ok: TorusGeometry =
            serde_json::from_str(r#"{"major_radius":500.0,"minor_radius":250.0}"#).unwrap();
        assert_eq!(ok.alpha(), 0.5);
        let bad = serde_json::from_str::<TorusGeometry>(
            r#"{"major_radius":1.0,"minor_radius":2.0}"#,
        );
        assert!(bad.is_err());
    }
}
