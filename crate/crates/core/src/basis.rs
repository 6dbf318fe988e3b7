//! Orthonormal theta-functions on the torus.
//!
//! Even functions `f_n` are built from `1, cos(theta), cos(2 theta), ...` and
//! odd functions `g_n` from `sin(theta), sin(2 theta), ...` by Gram-Schmidt
//! under the weighted inner product `<u, v> = int u v F dtheta` with
//! `F = 1 + alpha cos(theta)`. Each full basis state is
//! `f(theta) e^{i nu phi} / sqrt(2 pi)`.
//!
//! All inner products are evaluated exactly on trigonometric polynomials.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TorusGeometry;
use crate::quadrature::PeriodicRule;
use crate::trig::TrigPoly;

const ORTHO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn symbol(self) -> char {
        match self {
            Parity::Even => 'f',
            Parity::Odd => 'g',
        }
    }
}

/// One orthonormal theta-function.
///
/// `coeffs[j]` multiplies `cos(j theta)` for even functions and
/// `sin((j + 1) theta)` for odd ones. `index` is the harmonic of the
/// primitive the function was built from (`f_0, f_1, ...`, `g_1, g_2, ...`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaFunction {
    pub parity: Parity,
    pub index: usize,
    pub coeffs: Vec<f64>,
}

impl ThetaFunction {
    pub fn primitive(parity: Parity, index: usize) -> Self {
        let slot = match parity {
            Parity::Even => index,
            Parity::Odd => index - 1,
        };
        let mut coeffs = vec![0.0; slot + 1];
        coeffs[slot] = 1.0;
        Self {
            parity,
            index,
            coeffs,
        }
    }

    pub fn to_trig(&self) -> TrigPoly {
        match self.parity {
            Parity::Even => {
                let mut p = TrigPoly::zero(self.coeffs.len().saturating_sub(1));
                p.cos.copy_from_slice(&self.coeffs);
                p
            }
            Parity::Odd => {
                let mut p = TrigPoly::zero(self.coeffs.len());
                p.sin[1..].copy_from_slice(&self.coeffs);
                p
            }
        }
    }

    /// Value and first two derivatives at `theta`.
    pub fn eval_with_derivatives(&self, theta: f64) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (j, &c) in self.coeffs.iter().enumerate() {
            let n = match self.parity {
                Parity::Even => j,
                Parity::Odd => j + 1,
            } as f64;
            let (s, co) = (n * theta).sin_cos();
            match self.parity {
                Parity::Even => {
                    out[0] += c * co;
                    out[1] -= c * n * s;
                    out[2] -= c * n * n * co;
                }
                Parity::Odd => {
                    out[0] += c * s;
                    out[1] += c * n * co;
                    out[2] -= c * n * n * s;
                }
            }
        }
        out
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_with_derivatives(theta)[0]
    }

    pub fn label(&self) -> String {
        format!("{}{}", self.parity.symbol(), self.index)
    }
}

/// `int_0^{2 pi} f g F dtheta`, exact.
pub fn weighted_inner_product(geom: &TorusGeometry, f: &ThetaFunction, g: &ThetaFunction) -> f64 {
    trig_inner_product(geom.alpha(), &f.to_trig(), &g.to_trig())
}

pub fn trig_inner_product(alpha: f64, f: &TrigPoly, g: &TrigPoly) -> f64 {
    f.mul(g).mul(&TrigPoly::metric(alpha)).integral()
}

/// Trapezoidal version of [`weighted_inner_product`], kept for cross-checks.
pub fn weighted_inner_product_quadrature(
    geom: &TorusGeometry,
    f: &ThetaFunction,
    g: &ThetaFunction,
    nodes: usize,
) -> f64 {
    PeriodicRule::new(nodes).integrate(|t| f.eval(t) * g.eval(t) * geom.metric_factor(t))
}

/// Label of one full basis state `f(theta) e^{i nu phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisLabel {
    pub parity: Parity,
    pub index: usize,
    pub nu: i32,
}

impl BasisLabel {
    pub fn theta_label(&self) -> String {
        format!("{}{}", self.parity.symbol(), self.index)
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}[nu={}]", self.parity.symbol(), self.index, self.nu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSet {
    pub alpha: f64,
    pub even: Vec<ThetaFunction>,
    pub odd: Vec<ThetaFunction>,
    pub nu_min: i32,
    pub nu_max: i32,
}

impl BasisSet {
    pub fn nu_count(&self) -> usize {
        (self.nu_max - self.nu_min + 1) as usize
    }

    pub fn theta_functions(&self) -> impl Iterator<Item = &ThetaFunction> {
        self.even.iter().chain(self.odd.iter())
    }

    pub fn theta_count(&self) -> usize {
        self.even.len() + self.odd.len()
    }

    pub fn len(&self) -> usize {
        self.theta_count() * self.nu_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row order used by the Hamiltonian: even before odd, then by theta
    /// index, then by ascending `nu`.
    pub fn labels(&self) -> Vec<BasisLabel> {
        self.theta_functions()
            .flat_map(|f| {
                (self.nu_min..=self.nu_max).map(move |nu| BasisLabel {
                    parity: f.parity,
                    index: f.index,
                    nu,
                })
            })
            .collect()
    }

    /// Position of `(theta function, nu)` in [`BasisSet::labels`].
    pub fn position(&self, theta_slot: usize, nu: i32) -> usize {
        theta_slot * self.nu_count() + (nu - self.nu_min) as usize
    }

    pub fn theta_slot(&self, parity: Parity, index: usize) -> Option<usize> {
        match parity {
            Parity::Even => self.even.iter().position(|f| f.index == index),
            Parity::Odd => self
                .odd
                .iter()
                .position(|f| f.index == index)
                .map(|i| i + self.even.len()),
        }
    }

    /// Gram matrix of the theta-functions under the weighted inner product.
    pub fn gram_matrix(&self) -> Vec<Vec<f64>> {
        let polys: Vec<TrigPoly> = self.theta_functions().map(|f| f.to_trig()).collect();
        polys
            .iter()
            .map(|p| polys.iter().map(|q| trig_inner_product(self.alpha, p, q)).collect())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("basis serializes")
    }
}

/// Builds `n_even` even and `n_odd` odd orthonormal theta-functions and
/// attaches the azimuthal range `nu_min..=nu_max`.
pub fn gram_schmidt_basis(
    geom: &TorusGeometry,
    n_even: usize,
    n_odd: usize,
    nu_min: i32,
    nu_max: i32,
) -> Result<BasisSet> {
    if n_even == 0 {
        return Err(Error::Config("at least one even theta-function is required".into()));
    }
    if nu_min > nu_max {
        return Err(Error::Config(format!("empty azimuthal range {nu_min}..={nu_max}")));
    }
    let alpha = geom.alpha();
    let even = orthonormalize(alpha, Parity::Even, (0..n_even).collect(), 0)?;
    let odd = orthonormalize(alpha, Parity::Odd, (1..=n_odd).collect(), n_even)?;
    let basis = BasisSet {
        alpha,
        even,
        odd,
        nu_min,
        nu_max,
    };
    // cross-parity products vanish by symmetry; check the full Gram matrix anyway
    let gram = basis.gram_matrix();
    for (i, row) in gram.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            let dev = (v - want).abs();
            if dev > ORTHO_TOL {
                return Err(Error::NumericalDegeneracy {
                    index: i.max(j),
                    deviation: dev,
                });
            }
        }
    }
    Ok(basis)
}

/// Modified Gram-Schmidt with one re-orthogonalization pass, carried out on
/// coefficient vectors. `offset` only shifts the index reported on failure.
fn orthonormalize(
    alpha: f64,
    parity: Parity,
    harmonics: Vec<usize>,
    offset: usize,
) -> Result<Vec<ThetaFunction>> {
    let mut out: Vec<ThetaFunction> = Vec::with_capacity(harmonics.len());
    let mut polys: Vec<TrigPoly> = Vec::with_capacity(harmonics.len());
    for (slot, &n) in harmonics.iter().enumerate() {
        let mut v = ThetaFunction::primitive(parity, n);
        let width = v.coeffs.len();
        let primitive_norm = trig_inner_product(alpha, &v.to_trig(), &v.to_trig()).sqrt();
        for _pass in 0..2 {
            for (u, up) in out.iter().zip(&polys) {
                let c = trig_inner_product(alpha, up, &v.to_trig());
                for (k, uk) in u.coeffs.iter().enumerate() {
                    v.coeffs[k] -= c * uk;
                }
            }
        }
        let norm = trig_inner_product(alpha, &v.to_trig(), &v.to_trig()).sqrt();
        if !(norm > 1e-8 * primitive_norm) {
            return Err(Error::NumericalDegeneracy {
                index: offset + slot,
                deviation: 1.0 - norm / primitive_norm,
            });
        }
        v.coeffs.iter_mut().for_each(|c| *c /= norm);
        // the leading coefficient starts at 1 and stays positive; keep it that way
        if v.coeffs[width - 1] < 0.0 {
            v.coeffs.iter_mut().for_each(|c| *c = -*c);
        }
        polys.push(v.to_trig());
        out.push(v);
    }
    Ok(out)
}
