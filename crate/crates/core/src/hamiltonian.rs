//! Dense matrix of the dimensionless surface operator in the
//! Gram-Schmidt x azimuthal basis.
//!
//! The operator acting on `psi(theta, phi)` is
//!
//! ```text
//! d2/dth2 - (alpha sin th / F) d/dth + (alpha^2 / F^2) d2/dph2
//!   + [V_C]   1 / (4 F^2)
//!   + [V_mag] i (alpha tau1 / 2) sin th sin ph (1 + 2 alpha cos th) / F
//!   + i (tau0 alpha^2 - (tau1 alpha^3 / F) sin th cos ph) d/dph
//!   + i alpha tau1 sin ph (alpha + cos th) d/dth
//!   - tau0^2 alpha^2 F^2 / 4
//!   - (tau1^2 alpha^2 F^2 / 4) (sin^2 ph + alpha^2 sin^2 th / F^2)
//!   + (tau0 tau1 alpha^3 F / 2) sin th cos ph
//! ```
//!
//! Matrix elements are `<chi_row | H chi_col>` over `F dtheta dphi`. The phi
//! integrals are done in closed form: every coefficient is a trigonometric
//! polynomial of degree <= 2 in phi, so each term is split into harmonics
//! `e^{i m phi}`, `|m| <= 2`, and couples `nu_col` only to `nu_col + m`. The
//! theta integrals use a periodic trapezoid rule.
//!
//! With `tau1 != 0` the operator is not self-adjoint under the weighted
//! measure: the non-Hermitian part lives entirely in the even/odd coupling
//! blocks. [`Closure`] selects how the Hermitian matrix is completed; the
//! default evaluates the even-row block `H^{+-}` and sets `H^{-+}` to its
//! adjoint.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisLabel, BasisSet, Parity};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::geometry::{torus_curvatures, TorusGeometry};
use crate::quadrature::PeriodicRule;

/// How the even/odd coupling blocks of the Hermitian matrix are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closure {
    /// `H^{+-}` evaluated with even rows, `H^{-+} = (H^{+-})^dagger`.
    #[default]
    EvenRows,
    /// `H^{-+}` evaluated with odd rows, `H^{+-} = (H^{-+})^dagger`.
    OddRows,
    /// Hermitian part `(G + G^dagger) / 2` of the raw Galerkin matrix.
    Symmetric,
}

impl std::str::FromStr for Closure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even-rows" => Ok(Closure::EvenRows),
            "odd-rows" => Ok(Closure::OddRows),
            "symmetric" => Ok(Closure::Symmetric),
            other => Err(Error::Config(format!("unknown closure '{other}'"))),
        }
    }
}

/// Which expression is used for the curvature potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VcForm {
    /// `1 / (4 F^2)`.
    #[default]
    Metric,
    /// `a^2 (h^2 - k)` from the torus curvatures; identical to `Metric`
    /// analytically, useful as a cross-check.
    Curvature,
}

impl std::str::FromStr for VcForm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "metric" => Ok(VcForm::Metric),
            "curvature" => Ok(VcForm::Curvature),
            other => Err(Error::Config(format!("unknown V_C form '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    pub closure: Closure,
    pub vc_form: VcForm,
    pub quadrature_nodes: usize,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        Self {
            closure: Closure::EvenRows,
            vc_form: VcForm::Metric,
            quadrature_nodes: 512,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    pub entries: DMatrix<Complex64>,
    pub labels: Vec<BasisLabel>,
    pub field: FieldConfig,
    pub alpha: f64,
    pub options: AssemblyOptions,
}

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn index_of(&self, label: &BasisLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, row: &BasisLabel, col: &BasisLabel) -> Option<Complex64> {
        Some(self.entries[(self.index_of(row)?, self.index_of(col)?)])
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.entries)
    }

    /// The `(row parity, col parity)` block, e.g. `(Even, Odd)` for `H^{+-}`.
    pub fn block(&self, row: Parity, col: Parity) -> DMatrix<Complex64> {
        let rows: Vec<usize> = (0..self.dim()).filter(|&i| self.labels[i].parity == row).collect();
        let cols: Vec<usize> = (0..self.dim()).filter(|&i| self.labels[i].parity == col).collect();
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.entries[(rows[i], cols[j])])
    }

    /// Plain-text export, one `row,col,re,im` line per entry.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,re,im\n");
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.entries[(i, j)];
                let _ = writeln!(s, "{i},{j},{:.17e},{:.17e}", z.re, z.im);
            }
        }
        s
    }
}

pub fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Theta-dependent coefficients of one phi-harmonic: the operator maps
/// `u(theta) e^{i nu phi}` to `(c0 u + c1 u' + c2 u'') e^{i (nu + m) phi}`.
struct HarmonicCoefficients {
    c0: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
}

/// Precomputed quadrature data shared by all matrix elements of one assembly.
struct Assembler<'a> {
    basis: &'a BasisSet,
    field: FieldConfig,
    alpha: f64,
    options: AssemblyOptions,
    theta: Vec<f64>,
    weight: f64,
    metric: Vec<f64>,
    // per theta-function: values, first and second derivatives at the nodes
    samples: Vec<[Vec<f64>; 3]>,
    labels: Vec<BasisLabel>,
    vc: Vec<f64>,
}

impl<'a> Assembler<'a> {
    fn new(
        geom: &TorusGeometry,
        field: &FieldConfig,
        basis: &'a BasisSet,
        options: AssemblyOptions,
    ) -> Result<Self> {
        if basis.alpha != geom.alpha() {
            return Err(Error::Config(format!(
                "basis was built for alpha = {} but geometry has alpha = {}",
                basis.alpha,
                geom.alpha()
            )));
        }
        if !field.is_finite() {
            return Err(Error::Config("flux parameters must be finite".into()));
        }
        if options.quadrature_nodes < 16 {
            return Err(Error::Config("at least 16 quadrature nodes are required".into()));
        }
        let rule = PeriodicRule::new(options.quadrature_nodes);
        let theta = rule.nodes().to_vec();
        let metric: Vec<f64> = theta.iter().map(|&t| geom.metric_factor(t)).collect();
        let samples = basis
            .theta_functions()
            .map(|f| {
                let mut v = [
                    Vec::with_capacity(theta.len()),
                    Vec::with_capacity(theta.len()),
                    Vec::with_capacity(theta.len()),
                ];
                for &t in &theta {
                    let d = f.eval_with_derivatives(t);
                    for k in 0..3 {
                        v[k].push(d[k]);
                    }
                }
                v
            })
            .collect();
        let a2 = geom.minor_radius() * geom.minor_radius();
        let vc = theta
            .iter()
            .zip(&metric)
            .map(|(&t, &f)| match options.vc_form {
                VcForm::Metric => 0.25 / (f * f),
                VcForm::Curvature => a2 * torus_curvatures(geom, t).vc(),
            })
            .collect();
        Ok(Self {
            basis,
            field: *field,
            alpha: geom.alpha(),
            options,
            theta,
            weight: rule.weight(),
            metric,
            samples,
            labels: basis.labels(),
            vc,
        })
    }

    fn coefficients(&self, m: i32, nu: i32) -> HarmonicCoefficients {
        let n = self.theta.len();
        let mut c = HarmonicCoefficients {
            c0: vec![0.0; n],
            c1: vec![0.0; n],
            c2: vec![0.0; n],
        };
        let al = self.alpha;
        let (t0, t1) = (self.field.tau0, self.field.tau1);
        let nu_f = nu as f64;
        for j in 0..n {
            let (st, ct) = self.theta[j].sin_cos();
            let f = self.metric[j];
            match m {
                0 => {
                    c.c2[j] = 1.0;
                    c.c1[j] = -al * st / f;
                    let mut v = -al * al * nu_f * nu_f / (f * f);
                    if self.field.vc_on {
                        v += self.vc[j];
                    }
                    v -= t0 * al * al * nu_f;
                    v -= t0 * t0 * al * al * f * f / 4.0;
                    // sin^2 phi = 1/2 - (e^{2i phi} + e^{-2i phi}) / 4
                    v -= t1 * t1 * al * al * f * f / 8.0;
                    v -= t1 * t1 * al.powi(4) * st * st / 4.0;
                    c.c0[j] = v;
                }
                1 | -1 => {
                    let s = m as f64;
                    // sin phi = (e^{i phi} - e^{-i phi}) / (2i), cos phi = (e^{i phi} + e^{-i phi}) / 2
                    let mut v = 0.0;
                    if self.field.vmag_on {
                        let vmag = 0.5 * al * t1 * st * (1.0 + 2.0 * al * ct) / f;
                        v += s * vmag / 2.0;
                    }
                    // -i (tau1 alpha^3 / F) sin th cos ph * (i nu)
                    v += t1 * al.powi(3) * nu_f * st / (2.0 * f);
                    v += t0 * t1 * al.powi(3) * f * st / 4.0;
                    c.c0[j] = v;
                    c.c1[j] = s * al * t1 * (al + ct) / 2.0;
                }
                2 | -2 => {
                    c.c0[j] = t1 * t1 * al * al * f * f / 16.0;
                }
                _ => {}
            }
        }
        c
    }

    /// Raw `<chi_row | H chi_col>` for theta slots and azimuthal indices,
    /// with `coeffs` the harmonic for `m = nu_row - nu_col`.
    fn element(&self, row_slot: usize, col_slot: usize, coeffs: &HarmonicCoefficients) -> f64 {
        let u = &self.samples[row_slot][0];
        let [v, dv, ddv] = &self.samples[col_slot];
        let mut s = 0.0;
        for j in 0..self.theta.len() {
            let hv = coeffs.c0[j] * v[j] + coeffs.c1[j] * dv[j] + coeffs.c2[j] * ddv[j];
            s += self.metric[j] * u[j] * hv;
        }
        self.weight * s
    }

    fn galerkin(&self) -> DMatrix<Complex64> {
        let n_nu = self.basis.nu_count();
        let n_theta = self.basis.theta_count();
        let dim = self.labels.len();
        let mut g = DMatrix::<Complex64>::zeros(dim, dim);
        for nu_c in self.basis.nu_min..=self.basis.nu_max {
            for nu_r in self.basis.nu_min..=self.basis.nu_max {
                let m = nu_r - nu_c;
                if m.abs() > 2 {
                    continue;
                }
                let coeffs = self.coefficients(m, nu_c);
                for rs in 0..n_theta {
                    for cs in 0..n_theta {
                        let i = rs * n_nu + (nu_r - self.basis.nu_min) as usize;
                        let k = cs * n_nu + (nu_c - self.basis.nu_min) as usize;
                        g[(i, k)] = Complex64::new(self.element(rs, cs, &coeffs), 0.0);
                    }
                }
            }
        }
        g
    }

    fn close(&self, g: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let dim = g.nrows();
        DMatrix::from_fn(dim, dim, |i, k| {
            let (pi, pk) = (self.labels[i].parity, self.labels[k].parity);
            let avg = 0.5 * (g[(i, k)] + g[(k, i)].conj());
            if pi == pk {
                return avg;
            }
            match self.options.closure {
                Closure::Symmetric => avg,
                Closure::EvenRows if pi == Parity::Even => g[(i, k)],
                Closure::OddRows if pi == Parity::Odd => g[(i, k)],
                _ => g[(k, i)].conj(),
            }
        })
    }
}

/// Assembles the Hermitian matrix with default options.
pub fn assemble(geom: &TorusGeometry, field: &FieldConfig, basis: &BasisSet) -> Result<HamiltonianMatrix> {
    assemble_with(geom, field, basis, AssemblyOptions::default())
}

pub fn assemble_with(
    geom: &TorusGeometry,
    field: &FieldConfig,
    basis: &BasisSet,
    options: AssemblyOptions,
) -> Result<HamiltonianMatrix> {
    let asm = Assembler::new(geom, field, basis, options)?;
    let entries = asm.close(&asm.galerkin());
    Ok(HamiltonianMatrix {
        entries,
        labels: asm.labels,
        field: *field,
        alpha: geom.alpha(),
        options,
    })
}

/// Raw Galerkin matrix `<chi_row | H chi_col>` before any closure.
pub fn galerkin_matrix(
    geom: &TorusGeometry,
    field: &FieldConfig,
    basis: &BasisSet,
    options: AssemblyOptions,
) -> Result<DMatrix<Complex64>> {
    Ok(Assembler::new(geom, field, basis, options)?.galerkin())
}

/// Single entry of [`assemble`], computed without building the full matrix.
pub fn matrix_element(
    geom: &TorusGeometry,
    field: &FieldConfig,
    basis: &BasisSet,
    row: &BasisLabel,
    col: &BasisLabel,
) -> Result<Complex64> {
    matrix_element_with(geom, field, basis, row, col, AssemblyOptions::default())
}

pub fn matrix_element_with(
    geom: &TorusGeometry,
    field: &FieldConfig,
    basis: &BasisSet,
    row: &BasisLabel,
    col: &BasisLabel,
    options: AssemblyOptions,
) -> Result<Complex64> {
    let asm = Assembler::new(geom, field, basis, options)?;
    let slot = |l: &BasisLabel| -> Result<usize> {
        if l.nu < basis.nu_min || l.nu > basis.nu_max {
            return Err(Error::Config(format!("{l} is outside the azimuthal range")));
        }
        basis
            .theta_slot(l.parity, l.index)
            .ok_or_else(|| Error::Config(format!("{l} is not in the basis")))
    };
    let (rs, cs) = (slot(row)?, slot(col)?);
    let raw = |a: usize, nu_a: i32, b: usize, nu_b: i32| -> f64 {
        let m = nu_a - nu_b;
        if m.abs() > 2 {
            0.0
        } else {
            asm.element(a, b, &asm.coefficients(m, nu_b))
        }
    };
    let forward = raw(rs, row.nu, cs, col.nu);
    let backward = raw(cs, col.nu, rs, row.nu);
    let value = if row.parity == col.parity {
        0.5 * (forward + backward)
    } else {
        match (options.closure, row.parity) {
            (Closure::Symmetric, _) => 0.5 * (forward + backward),
            (Closure::EvenRows, Parity::Even) | (Closure::OddRows, Parity::Odd) => forward,
            _ => backward,
        }
    };
    Ok(Complex64::new(value, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gram_schmidt_basis;

    fn setup() -> (TorusGeometry, BasisSet) {
        let g = TorusGeometry::reference();
        let b = gram_schmidt_basis(&g, 6, 6, -2, 2).unwrap();
        (g, b)
    }

    fn label(parity: Parity, index: usize, nu: i32) -> BasisLabel {
        BasisLabel { parity, index, nu }
    }

    #[test]
    fn field_free_constant_mode_is_zero() {
        let (g, b) = setup();
        let f = FieldConfig::new(0.0, 0.0).with_toggles(false, false);
        let f0 = label(Parity::Even, 0, 0);
        assert!(matrix_element(&g, &f, &b, &f0, &f0).unwrap().norm() < 1e-14);
    }

    #[test]
    fn azimuthal_kinetic_diagonal_has_closed_form() {
        let (g, b) = setup();
        let f = FieldConfig::new(0.0, 0.0).with_toggles(false, false);
        let al = g.alpha();
        for nu in -2..=2 {
            let l = label(Parity::Even, 0, nu);
            let got = matrix_element(&g, &f, &b, &l, &l).unwrap().re;
            let want = -(nu * nu) as f64 * al * al / (1.0 - al * al).sqrt();
            assert!((got - want).abs() < 1e-12, "nu={nu}: {got} vs {want}");
        }
    }

    #[test]
    fn selection_rule_beyond_two() {
        let (g, b) = setup();
        let f = FieldConfig::new(0.8, 1.3);
        let z = matrix_element(&g, &f, &b, &label(Parity::Even, 0, -2), &label(Parity::Odd, 1, 1)).unwrap();
        assert_eq!(z, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn element_matches_assembled_entry() {
        let (g, b) = setup();
        let f = FieldConfig::new(0.6, -1.1);
        for closure in [Closure::EvenRows, Closure::OddRows, Closure::Symmetric] {
            let opts = AssemblyOptions { closure, ..Default::default() };
            let h = assemble_with(&g, &f, &b, opts).unwrap();
            for (r, c) in [(0usize, 37usize), (37, 0), (12, 13), (44, 51), (6, 33)] {
                let e = matrix_element_with(&g, &f, &b, &h.labels[r], &h.labels[c], opts).unwrap();
                assert!((e - h.entries[(r, c)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn mismatched_basis_is_rejected() {
        let (_, b) = setup();
        let other = TorusGeometry::new(500.0, 100.0).unwrap();
        let err = assemble(&other, &FieldConfig::new(0.0, 0.0), &b).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn parse_enums() {
        assert_eq!("odd-rows".parse::<Closure>().unwrap(), Closure::OddRows);
        assert_eq!("curvature".parse::<VcForm>().unwrap(), VcForm::Curvature);
        assert!("diagonal".parse::<Closure>().is_err());
    }

    #[test]
    fn csv_export_has_all_entries() {
        let g = TorusGeometry::reference();
        let b = gram_schmidt_basis(&g, 2, 1, 0, 1).unwrap();
        let h = assemble(&g, &FieldConfig::new(0.5, 0.5), &b).unwrap();
        let csv = h.to_csv();
        assert_eq!(csv.lines().count(), 1 + 36);
        assert!(csv.starts_with("row,col,re,im\n0,0,"));
    }
}
