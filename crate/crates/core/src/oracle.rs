//! Brute-force reference: the surface operator discretized on a periodic
//! `(theta, phi)` grid, solved for its top eigenpairs.
//!
//! The raw grid operator `X` applies every term of the operator pointwise
//! with 1D derivative matrices. The even/odd coupling is completed the same
//! way as in [`crate::hamiltonian`], using the grid reflection
//! `theta_i -> theta_{N-i}` for the parity projectors. With `D = diag(F)`
//! the matrix handed to the eigensolver is
//! `M = (D^{1/2} Y D^{-1/2} + (D^{1/2} Y D^{-1/2})^dagger) / 2`,
//! which is Hermitian in the plain inner product.
//!
//! The top eigenpairs of `M` come from a block Davidson iteration with a
//! shifted-Laplacian preconditioner applied in Fourier space.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::geometry::TorusGeometry;
use crate::hamiltonian::Closure;
use crate::solver::hermitian_eigen;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl GridSpec {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        for (name, n) in [("n_theta", n_theta), ("n_phi", n_phi)] {
            if n < 16 || n % 2 != 0 {
                return Err(Error::Config(format!("{name} = {n}: grid counts must be even and at least 16")));
            }
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn refined(&self) -> Self {
        Self {
            n_theta: 2 * self.n_theta,
            n_phi: self.n_phi,
        }
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_theta: 64, n_phi: 32 }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_theta, self.n_phi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stencil {
    /// Five-point fourth-order central differences.
    #[default]
    FourthOrder,
    /// Periodic Fourier differentiation matrices.
    Spectral,
}

impl std::str::FromStr for Stencil {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourth-order" | "fd4" => Ok(Stencil::FourthOrder),
            "spectral" => Ok(Stencil::Spectral),
            other => Err(Error::Config(format!("unknown stencil '{other}'"))),
        }
    }
}

impl fmt::Display for Stencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stencil::FourthOrder => "fourth-order",
            Stencil::Spectral => "spectral",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub stencil: Stencil,
    pub closure: Closure,
    /// Also solve on the grid with doubled `n_theta` and compare.
    pub refinement_check: bool,
    pub refinement_tolerance: f64,
    pub residual_tolerance: f64,
    pub max_iterations: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            stencil: Stencil::FourthOrder,
            closure: Closure::EvenRows,
            refinement_check: true,
            refinement_tolerance: 1e-4,
            residual_tolerance: 1e-8,
            max_iterations: 2000,
        }
    }
}

/// 1D periodic differentiation matrices `(d/dx, d2/dx2)` and the symbol of
/// `-d2/dx2` at each FFT frequency index.
fn derivative_matrices(n: usize, stencil: Stencil) -> (DMatrix<f64>, DMatrix<f64>, Vec<f64>) {
    let h = 2.0 * PI / n as f64;
    let mut d1 = DMatrix::zeros(n, n);
    let mut d2 = DMatrix::zeros(n, n);
    match stencil {
        Stencil::FourthOrder => {
            for i in 0..n {
                let at = |o: isize| ((i as isize + o).rem_euclid(n as isize)) as usize;
                d1[(i, at(1))] += 8.0 / (12.0 * h);
                d1[(i, at(-1))] -= 8.0 / (12.0 * h);
                d1[(i, at(2))] -= 1.0 / (12.0 * h);
                d1[(i, at(-2))] += 1.0 / (12.0 * h);
                let h2 = 12.0 * h * h;
                d2[(i, i)] -= 30.0 / h2;
                d2[(i, at(1))] += 16.0 / h2;
                d2[(i, at(-1))] += 16.0 / h2;
                d2[(i, at(2))] -= 1.0 / h2;
                d2[(i, at(-2))] -= 1.0 / h2;
            }
        }
        Stencil::Spectral => {
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        d2[(i, j)] = -PI * PI / (3.0 * h * h) - 1.0 / 6.0;
                        continue;
                    }
                    let x = (i as f64 - j as f64) * h / 2.0;
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    d1[(i, j)] = 0.5 * sign / x.tan();
                    d2[(i, j)] = -0.5 * sign / (x.sin() * x.sin());
                }
            }
        }
    }
    let symbol = (0..n)
        .map(|k| {
            let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            match stencil {
                Stencil::FourthOrder => {
                    let t = kk * h;
                    (30.0 - 32.0 * t.cos() + 2.0 * (2.0 * t).cos()) / (12.0 * h * h)
                }
                Stencil::Spectral => kk * kk,
            }
        })
        .collect();
    (d1, d2, symbol)
}

/// Matrix-free grid operator for one geometry and field.
pub struct GridOperator {
    grid: GridSpec,
    stencil: Stencil,
    closure: Closure,
    d1t: DMatrix<Complex64>,
    d2t: DMatrix<Complex64>,
    d1p_t: DMatrix<Complex64>,
    d2p_t: DMatrix<Complex64>,
    // pointwise coefficients, n_theta x n_phi
    c_t: DMatrix<Complex64>,
    c_pp: DMatrix<Complex64>,
    c_p: DMatrix<Complex64>,
    c_0: DMatrix<Complex64>,
    sqrt_f: DMatrix<f64>,
    symbol_t: Vec<f64>,
    symbol_p: Vec<f64>,
    azimuthal_weight: f64,
    fft_t: (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>),
    fft_p: (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>),
}

impl GridOperator {
    pub fn new(geom: &TorusGeometry, field: &FieldConfig, grid: GridSpec, stencil: Stencil, closure: Closure) -> Result<Self> {
        let grid = GridSpec::new(grid.n_theta, grid.n_phi)?;
        if !field.is_finite() {
            return Err(Error::Config("flux parameters must be finite".into()));
        }
        let (nt, np) = (grid.n_theta, grid.n_phi);
        let (d1t, d2t, symbol_t) = derivative_matrices(nt, stencil);
        let (d1p, d2p, symbol_p) = derivative_matrices(np, stencil);
        let al = geom.alpha();
        let (t0, t1) = (field.tau0, field.tau1);
        let i = Complex64::i();
        let theta = |k: usize| 2.0 * PI * k as f64 / nt as f64;
        let phi = |k: usize| 2.0 * PI * k as f64 / np as f64;
        let c_t = DMatrix::from_fn(nt, np, |a, b| {
            let (st, ct) = theta(a).sin_cos();
            let f = 1.0 + al * ct;
            -al * st / f + i * al * t1 * phi(b).sin() * (al + ct)
        });
        let c_pp = DMatrix::from_fn(nt, np, |a, _| {
            let f = 1.0 + al * theta(a).cos();
            Complex64::new(al * al / (f * f), 0.0)
        });
        let c_p = DMatrix::from_fn(nt, np, |a, b| {
            let (st, ct) = theta(a).sin_cos();
            let f = 1.0 + al * ct;
            i * (t0 * al * al - t1 * al.powi(3) * st * phi(b).cos() / f)
        });
        let c_0 = DMatrix::from_fn(nt, np, |a, b| {
            let (st, ct) = theta(a).sin_cos();
            let (sp, cp) = phi(b).sin_cos();
            let f = 1.0 + al * ct;
            let mut v = Complex64::new(0.0, 0.0);
            if field.vc_on {
                v += 0.25 / (f * f);
            }
            if field.vmag_on {
                v += i * 0.5 * al * t1 * st * sp * (1.0 + 2.0 * al * ct) / f;
            }
            v -= t0 * t0 * al * al * f * f / 4.0;
            v -= t1 * t1 * al * al * f * f / 4.0 * (sp * sp + al * al * st * st / (f * f));
            v += t0 * t1 * al.powi(3) * f / 2.0 * st * cp;
            v
        });
        let sqrt_f = DMatrix::from_fn(nt, np, |a, _| (1.0 + al * theta(a).cos()).sqrt());
        let to_c = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
        let mut planner = FftPlanner::new();
        Ok(Self {
            grid,
            stencil,
            closure,
            d1t: to_c(&d1t),
            d2t: to_c(&d2t),
            d1p_t: to_c(&d1p.transpose()),
            d2p_t: to_c(&d2p.transpose()),
            c_t,
            c_pp,
            c_p,
            c_0,
            sqrt_f,
            symbol_t,
            symbol_p,
            azimuthal_weight: al * al / (1.0 - al * al).powf(1.5),
            fft_t: (planner.plan_fft_forward(nt), planner.plan_fft_inverse(nt)),
            fft_p: (planner.plan_fft_forward(np), planner.plan_fft_inverse(np)),
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    /// Raw operator `X` on an `n_theta x n_phi` field.
    pub fn apply_raw(&self, psi: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let mut out = &self.d2t * psi;
        out += self.c_t.component_mul(&(&self.d1t * psi));
        out += self.c_pp.component_mul(&(psi * &self.d2p_t));
        out += self.c_p.component_mul(&(psi * &self.d1p_t));
        out += self.c_0.component_mul(psi);
        out
    }

    /// Plain conjugate transpose `X^dagger`.
    pub fn apply_raw_adjoint(&self, psi: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        // D1^T = -D1 and D2^T = D2 for both stencils
        let mut out = &self.d2t * psi;
        out -= &self.d1t * self.c_t.map(|z| z.conj()).component_mul(psi);
        out += self.c_pp.map(|z| z.conj()).component_mul(psi) * &self.d2p_t;
        out -= self.c_p.map(|z| z.conj()).component_mul(psi) * &self.d1p_t;
        out += self.c_0.map(|z| z.conj()).component_mul(psi);
        out
    }

    fn reflect(&self, psi: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = self.grid.n_theta;
        DMatrix::from_fn(n, self.grid.n_phi, |a, b| psi[((n - a) % n, b)])
    }

    fn split(&self, psi: &DMatrix<Complex64>) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let r = self.reflect(psi);
        ((psi + &r).scale(0.5), (psi - &r).scale(0.5))
    }

    /// `Y psi` (or `Y^dagger psi` when `adjoint`) for the selected closure.
    fn apply_closed(&self, psi: &DMatrix<Complex64>, adjoint: bool) -> DMatrix<Complex64> {
        let op = |v: &DMatrix<Complex64>| {
            if adjoint {
                self.apply_raw_adjoint(v)
            } else {
                self.apply_raw(v)
            }
        };
        let (even, odd) = self.split(psi);
        let x_even = op(&even);
        let x_odd = op(&odd);
        let mut out = &x_even + &x_odd;
        // Y = X + Pe X Po - Po X Pe; Y^dagger swaps the roles of Pe and Po
        let sign = match (self.closure, adjoint) {
            (Closure::Symmetric, _) => return out,
            (Closure::EvenRows, false) | (Closure::OddRows, true) => 1.0,
            _ => -1.0,
        };
        let (x_odd_even, _) = self.split(&x_odd);
        let (_, x_even_odd) = self.split(&x_even);
        out += (x_odd_even - x_even_odd).scale(sign);
        out
    }

    /// Hermitian operator `M` on an `n_theta x n_phi` field.
    pub fn apply(&self, chi: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let down = chi.component_div(&self.sqrt_f.map(|x| Complex64::new(x, 0.0)));
        let up = chi.component_mul(&self.sqrt_f.map(|x| Complex64::new(x, 0.0)));
        let a = self.apply_closed(&down, false).component_mul(&self.sqrt_f.map(|x| Complex64::new(x, 0.0)));
        let b = self.apply_closed(&up, true).component_div(&self.sqrt_f.map(|x| Complex64::new(x, 0.0)));
        (a + b).scale(0.5)
    }

    /// Dense `M`, with unknowns in column-major `(theta, phi)` order.
    pub fn dense(&self) -> DMatrix<Complex64> {
        let n = self.grid.len();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut e = DMatrix::zeros(self.grid.n_theta, self.grid.n_phi);
            e[k] = Complex64::new(1.0, 0.0);
            let col = self.apply(&e);
            m.set_column(k, &DVector::from_column_slice(col.as_slice()));
        }
        m
    }

    /// `(1 - Laplacian)^{-1}` in Fourier space.
    fn precondition(&self, r: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let (nt, np) = (self.grid.n_theta, self.grid.n_phi);
        let mut work = r.clone();
        // nalgebra storage is column-major: each column is one theta line
        for col in work.column_iter_mut() {
            let mut line: Vec<Complex64> = col.iter().copied().collect();
            self.fft_t.0.process(&mut line);
            for (dst, src) in col.into_iter().zip(line) {
                *dst = src;
            }
        }
        for mut row in work.row_iter_mut() {
            let mut line: Vec<Complex64> = row.iter().copied().collect();
            self.fft_p.0.process(&mut line);
            for (dst, src) in row.iter_mut().zip(line) {
                *dst = src;
            }
        }
        for a in 0..nt {
            for b in 0..np {
                let d = 1.0 + self.symbol_t[a] + self.azimuthal_weight * self.symbol_p[b];
                work[(a, b)] /= d;
            }
        }
        for mut row in work.row_iter_mut() {
            let mut line: Vec<Complex64> = row.iter().copied().collect();
            self.fft_p.1.process(&mut line);
            for (dst, src) in row.iter_mut().zip(line) {
                *dst = src;
            }
        }
        for col in work.column_iter_mut() {
            let mut line: Vec<Complex64> = col.iter().copied().collect();
            self.fft_t.1.process(&mut line);
            for (dst, src) in col.into_iter().zip(line) {
                *dst = src;
            }
        }
        work.unscale((nt * np) as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementCheck {
    pub fine_grid: GridSpec,
    pub fine_eps0: f64,
    pub difference: f64,
}

#[derive(Debug, Clone)]
pub struct GridSolution {
    /// Top eigenvalues `eps`, descending (ascending physical energy).
    pub eps: Vec<f64>,
    /// Eigenfunctions `psi(theta_a, phi_b)`, normalized under
    /// `sum |psi|^2 F dtheta dphi`.
    pub eigenfunctions: Vec<DMatrix<Complex64>>,
    pub grid: GridSpec,
    pub stencil: Stencil,
    pub iterations: usize,
    pub refinement: Option<RefinementCheck>,
}

impl GridSolution {
    pub fn eps0(&self) -> f64 {
        self.eps[0]
    }

    /// Normalized azimuthal power `sum_theta |psi_nu(theta)|^2 F` per
    /// harmonic `nu`, indexed by FFT bin.
    pub fn azimuthal_spectrum(&self, state: usize, geom: &TorusGeometry) -> Vec<(i32, f64)> {
        let psi = &self.eigenfunctions[state];
        let (nt, np) = (self.grid.n_theta, self.grid.n_phi);
        let fft = FftPlanner::new().plan_fft_forward(np);
        let mut power = vec![0.0; np];
        for a in 0..nt {
            let f = geom.metric_factor(2.0 * PI * a as f64 / nt as f64);
            let mut line: Vec<Complex64> = psi.row(a).iter().copied().collect();
            fft.process(&mut line);
            for (p, z) in power.iter_mut().zip(line) {
                *p += z.norm_sqr() * f;
            }
        }
        let total: f64 = power.iter().sum();
        power
            .into_iter()
            .enumerate()
            .map(|(k, p)| {
                let nu = if k <= np / 2 { k as i32 } else { k as i32 - np as i32 };
                (nu, p / total)
            })
            .collect()
    }
}

/// Top-`k` eigenpairs of `M` by block Davidson.
pub fn davidson(op: &GridOperator, k: usize, tol: f64, max_iterations: usize) -> Result<(Vec<f64>, Vec<DMatrix<Complex64>>, usize)> {
    let (nt, np) = (op.grid.n_theta, op.grid.n_phi);
    let n = nt * np;
    let max_basis = (8 * k).max(48).min(n);
    let k = k.min(n);
    let block = (k + 2).min(n);

    let to_vec = |m: &DMatrix<Complex64>| DVector::from_column_slice(m.as_slice());
    let to_grid = |v: &DVector<Complex64>| DMatrix::from_column_slice(nt, np, v.as_slice());

    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    let mut images: Vec<DVector<Complex64>> = Vec::new();
    let push = |v: DVector<Complex64>, basis: &mut Vec<DVector<Complex64>>, images: &mut Vec<DVector<Complex64>>| -> bool {
        let mut w = v;
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dotc(&w);
                w -= b * c;
            }
        }
        let norm = w.norm();
        if norm < 1e-10 {
            return false;
        }
        w /= Complex64::new(norm, 0.0);
        images.push(to_vec(&op.apply(&to_grid(&w))));
        basis.push(w);
        true
    };

    // low Fourier modes times F^{1/2}
    let seeds: [(usize, i32); 9] = [(0, 0), (0, 1), (0, -1), (1, 0), (1, 1), (1, -1), (2, 0), (0, 2), (0, -2)];
    for (m, nu) in seeds {
        let g = DMatrix::from_fn(nt, np, |a, b| {
            let t = 2.0 * PI * a as f64 / nt as f64;
            let p = 2.0 * PI * b as f64 / np as f64;
            let angular = Complex64::from_polar(1.0, nu as f64 * p);
            let radial = if m == 0 { 1.0 } else { (m as f64 * t).cos() + 0.5 * (m as f64 * t).sin() };
            angular * radial * op.sqrt_f[(a, b)]
        });
        push(to_vec(&g), &mut basis, &mut images);
    }

    for iter in 1..=max_iterations {
        let m = basis.len();
        let small = DMatrix::from_fn(m, m, |i, j| basis[i].dotc(&images[j]));
        let small = (&small + small.adjoint()).scale(0.5);
        let (vals, vecs) = hermitian_eigen(&small)?;
        let top: Vec<usize> = (0..m).rev().take(block).collect();
        let ritz = |idx: usize| -> (DVector<Complex64>, DVector<Complex64>) {
            let mut x = DVector::zeros(n);
            let mut ax = DVector::zeros(n);
            for j in 0..m {
                x += &basis[j] * vecs[(j, idx)];
                ax += &images[j] * vecs[(j, idx)];
            }
            (x, ax)
        };
        let pairs: Vec<(f64, DVector<Complex64>, DVector<Complex64>)> = top
            .iter()
            .map(|&idx| {
                let (x, ax) = ritz(idx);
                let r = &ax - &x * Complex64::new(vals[idx], 0.0);
                (vals[idx], x, r)
            })
            .collect();
        let scale = pairs.iter().fold(1.0f64, |a, p| a.max(p.0.abs()));
        let converged = pairs.iter().take(k).all(|p| p.2.norm() <= tol * scale);
        if converged {
            let eps = pairs.iter().take(k).map(|p| p.0).collect();
            let states = pairs.iter().take(k).map(|p| to_grid(&p.1)).collect();
            return Ok((eps, states, iter));
        }
        if basis.len() + block > max_basis {
            let keep: Vec<DVector<Complex64>> = (0..m).rev().take(2 * block).map(|idx| ritz(idx).0).collect();
            basis.clear();
            images.clear();
            for v in keep {
                push(v, &mut basis, &mut images);
            }
        }
        let mut added = 0;
        for p in pairs.iter().filter(|p| p.2.norm() > tol * scale) {
            let t = op.precondition(&to_grid(&p.2));
            if push(to_vec(&t), &mut basis, &mut images) {
                added += 1;
            }
        }
        if added == 0 {
            return Err(Error::NoConvergence("Davidson subspace stagnated".into()));
        }
    }
    Err(Error::NoConvergence(format!("Davidson did not converge in {max_iterations} iterations")))
}

/// `k` lowest physical-energy eigenpairs on `grid` with default options.
pub fn grid_solve(geom: &TorusGeometry, field: &FieldConfig, grid: GridSpec, k: usize) -> Result<GridSolution> {
    grid_solve_with(geom, field, grid, k, OracleOptions::default())
}

pub fn grid_solve_with(
    geom: &TorusGeometry,
    field: &FieldConfig,
    grid: GridSpec,
    k: usize,
    opts: OracleOptions,
) -> Result<GridSolution> {
    if k == 0 {
        return Err(Error::Config("at least one eigenpair must be requested".into()));
    }
    let op = GridOperator::new(geom, field, grid, opts.stencil, opts.closure)?;
    let (eps, states, iterations) = davidson(&op, k, opts.residual_tolerance, opts.max_iterations)?;
    let cell = (2.0 * PI / grid.n_theta as f64) * (2.0 * PI / grid.n_phi as f64);
    let eigenfunctions = states
        .into_iter()
        .map(|chi| {
            let psi = chi.component_div(&op.sqrt_f.map(|x| Complex64::new(x, 0.0)));
            let max = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = psi.iter().position(|z| z.norm() >= max * (1.0 - 1e-12)).unwrap_or(0);
            let phase = psi[pivot].conj() / psi[pivot].norm();
            psi.map(|z| z * phase / cell.sqrt())
        })
        .collect();
    let mut solution = GridSolution {
        eps,
        eigenfunctions,
        grid,
        stencil: opts.stencil,
        iterations,
        refinement: None,
    };
    if opts.refinement_check {
        let fine = grid.refined();
        let fine_opts = OracleOptions { refinement_check: false, ..opts };
        let fine_solution = grid_solve_with(geom, field, fine, 1, fine_opts)?;
        let difference = (fine_solution.eps0() - solution.eps0()).abs();
        if !(difference < opts.refinement_tolerance) {
            return Err(Error::Accuracy {
                coarse: solution.eps0(),
                fine: fine_solution.eps0(),
                coarse_grid: grid.to_string(),
                fine_grid: fine.to_string(),
            });
        }
        solution.refinement = Some(RefinementCheck {
            fine_grid: fine,
            fine_eps0: fine_solution.eps0(),
            difference,
        });
    }
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(16, 16).is_ok());
        assert!(GridSpec::new(14, 16).is_err());
        assert!(GridSpec::new(17, 32).is_err());
        assert_eq!(GridSpec::default().to_string(), "64x32");
    }

    #[test]
    fn derivative_matrices_are_exact_on_low_modes() {
        for stencil in [Stencil::FourthOrder, Stencil::Spectral] {
            let n = 32;
            let (d1, d2, _) = derivative_matrices(n, stencil);
            let x: Vec<f64> = (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect();
            let f = DVector::from_iterator(n, x.iter().map(|t| t.sin()));
            let df = &d1 * &f;
            let ddf = &d2 * &f;
            let tol = if stencil == Stencil::Spectral { 1e-12 } else { 1e-4 };
            for i in 0..n {
                assert!((df[i] - x[i].cos()).abs() < tol);
                assert!((ddf[i] + x[i].sin()).abs() < tol);
            }
            assert!((&d1 + d1.transpose()).abs().max() < 1e-12);
            assert!((&d2 - d2.transpose()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn preconditioner_inverts_symbol() {
        let g = TorusGeometry::reference();
        let op = GridOperator::new(&g, &FieldConfig::new(0.0, 0.0), GridSpec::new(16, 16).unwrap(), Stencil::Spectral, Closure::EvenRows).unwrap();
        let r = DMatrix::from_fn(16, 16, |a, _| Complex64::new((2.0 * PI * a as f64 / 16.0).cos(), 0.0));
        let p = op.precondition(&r);
        for a in 0..16 {
            assert!((p[(a, 3)] - r[(a, 3)] / 2.0).norm() < 1e-12);
        }
    }
}
