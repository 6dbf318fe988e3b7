//! Dense Hermitian eigendecomposition and ground-state composition analysis.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisLabel, Parity};
use crate::error::{Error, Result};
use crate::hamiltonian::{hermiticity_deviation, HamiltonianMatrix};

/// Largest `|H - H^dagger|` entry accepted by [`eigensolve`].
pub const HERMITICITY_LIMIT: f64 = 1e-8;
/// Relative gap below which eigenvalues are treated as one degenerate cluster.
pub const DEGENERACY_TOLERANCE: f64 = 1e-9;
/// Default display cutoff for composition terms.
pub const DEFAULT_THRESHOLD: f64 = 0.09;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumRecord", into = "SpectrumRecord")]
pub struct SpectrumResult {
    /// Ascending eigenvalues `eps` of the dimensionless operator.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: DMatrix<Complex64>,
    pub labels: Vec<BasisLabel>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumRecord {
    eigenvalues: Vec<f64>,
    labels: Vec<BasisLabel>,
    /// `eigenvectors[i][row] = [re, im]`.
    eigenvectors: Vec<Vec<[f64; 2]>>,
}

impl From<SpectrumResult> for SpectrumRecord {
    fn from(s: SpectrumResult) -> Self {
        let eigenvectors = s
            .eigenvectors
            .column_iter()
            .map(|c| c.iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self {
            eigenvalues: s.eigenvalues,
            labels: s.labels,
            eigenvectors,
        }
    }
}

impl TryFrom<SpectrumRecord> for SpectrumResult {
    type Error = String;
    fn try_from(r: SpectrumRecord) -> std::result::Result<Self, String> {
        let n = r.labels.len();
        if r.eigenvalues.len() != n || r.eigenvectors.len() != n || r.eigenvectors.iter().any(|c| c.len() != n) {
            return Err(format!("inconsistent spectrum dimensions for {n} labels"));
        }
        let eigenvectors = DMatrix::from_fn(n, n, |i, j| {
            let [re, im] = r.eigenvectors[j][i];
            Complex64::new(re, im)
        });
        Ok(Self {
            eigenvalues: r.eigenvalues,
            eigenvectors,
            labels: r.labels,
        })
    }
}

/// Picks an eigenstate by physical energy `E = -eps`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnergySelector {
    /// Lowest physical energy, i.e. largest `eps`.
    #[default]
    Ground,
    /// `k`-th state above the ground state in physical energy.
    Excited(usize),
    /// Direct index into the ascending `eps` list.
    Index(usize),
}

impl SpectrumResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn index_of(&self, which: EnergySelector) -> usize {
        let n = self.dim();
        match which {
            EnergySelector::Ground => n - 1,
            EnergySelector::Excited(k) => n - 1 - k.min(n - 1),
            EnergySelector::Index(i) => i.min(n - 1),
        }
    }

    /// Largest eigenvalue, the ground state under the sign convention.
    pub fn ground_eps(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    pub fn eigenvalue(&self, which: EnergySelector) -> f64 {
        self.eigenvalues[self.index_of(which)]
    }

    pub fn eigenvector(&self, which: EnergySelector) -> DVector<Complex64> {
        self.eigenvectors.column(self.index_of(which)).into_owned()
    }

    /// `max_i |H v_i - eps_i v_i| / |v_i|`.
    pub fn max_residual(&self, h: &DMatrix<Complex64>) -> f64 {
        (0..self.dim())
            .map(|i| {
                let v = self.eigenvectors.column(i);
                let r = h * v - v * Complex64::new(self.eigenvalues[i], 0.0);
                r.norm() / v.norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max |V^dagger V - I|`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let g = self.eigenvectors.adjoint() * &self.eigenvectors;
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Eigendecomposition of an assembled matrix.
pub fn eigensolve(h: &HamiltonianMatrix) -> Result<SpectrumResult> {
    let (eigenvalues, eigenvectors) = hermitian_eigen(&h.entries)?;
    Ok(SpectrumResult {
        eigenvalues,
        eigenvectors,
        labels: h.labels.clone(),
    })
}

/// Ascending eigenvalues and canonically phased eigenvectors of a Hermitian
/// matrix.
///
/// Inside a degenerate cluster the basis is rebuilt by projecting unit
/// vectors `e_0, e_1, ...` onto the cluster, so the first vector is the one
/// with the largest weight on the lowest-index basis state. Every vector is
/// phased so that its pivot component (the projected unit vector's index,
/// or the largest-magnitude component for a simple eigenvalue) is real and
/// positive.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::Config(format!("expected a non-empty square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NoConvergence("matrix has non-finite entries".into()));
    }
    let deviation = hermiticity_deviation(m);
    if deviation > HERMITICITY_LIMIT {
        return Err(Error::NotHermitian { deviation });
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }

    let scale = values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= DEGENERACY_TOLERANCE * scale {
            end += 1;
        }
        if end - start == 1 {
            let mut col = vectors.column(start).into_owned();
            phase_by_largest(&mut col);
            vectors.set_column(start, &col);
        } else {
            let cluster = vectors.columns(start, end - start).into_owned();
            let canon = canonical_cluster_basis(&cluster);
            vectors.columns_mut(start, end - start).copy_from(&canon);
        }
        start = end;
    }
    Ok((values, vectors))
}

fn phase_by_largest(v: &mut DVector<Complex64>) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().position(|z| z.norm() >= max * (1.0 - 1e-12)) {
        let phase = v[pivot].conj() / v[pivot].norm();
        *v *= phase;
    }
}

fn canonical_cluster_basis(cluster: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (n, k) = cluster.shape();
    let mut chosen: Vec<DVector<Complex64>> = Vec::with_capacity(k);
    for i in 0..n {
        if chosen.len() == k {
            break;
        }
        // projection of e_i onto the cluster
        let mut w: DVector<Complex64> = cluster * cluster.row(i).adjoint();
        for c in &chosen {
            let overlap = c.dotc(&w);
            w -= c * overlap;
        }
        let norm = w.norm();
        if norm < 1e-6 {
            continue;
        }
        w /= Complex64::new(norm, 0.0);
        let phase = if w[i].norm() > 1e-14 {
            w[i].conj() / w[i].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        w *= phase;
        chosen.push(w);
    }
    let mut out = DMatrix::zeros(n, k);
    for (j, c) in chosen.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionTerm {
    pub theta_label: String,
    pub parity: Parity,
    pub index: usize,
    pub nu: i32,
    pub amplitude: Complex64,
}

/// A term of the real-combination view: `coefficient * f(theta) * kind(phi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealTerm {
    pub theta_label: String,
    pub nu: i32,
    pub kind: RealKind,
    pub coefficient: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealKind {
    /// `nu = 0`.
    Constant,
    /// Only one of `+-nu` present: `e^{i nu phi}` with signed `nu`.
    Exp,
    /// `a_+ + a_-` multiplying `cos(nu phi)`.
    Cos,
    /// `a_+ - a_-` multiplying `i sin(nu phi)`.
    ISin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateComposition {
    pub eps: f64,
    /// All amplitudes, by descending magnitude.
    pub terms: Vec<CompositionTerm>,
    pub threshold: f64,
}

impl StateComposition {
    pub fn displayed(&self) -> impl Iterator<Item = &CompositionTerm> {
        self.terms.iter().filter(|t| t.amplitude.norm() >= self.threshold)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.norm_sqr()).sum()
    }

    pub fn amplitude(&self, parity: Parity, index: usize, nu: i32) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.parity == parity && t.index == index && t.nu == nu)
            .map(|t| t.amplitude)
            .unwrap_or_default()
    }

    /// Coefficient of `f(theta) cos(n phi)`: `a(+n) + a(-n)`.
    pub fn cos_coefficient(&self, parity: Parity, index: usize, n: i32) -> Complex64 {
        self.amplitude(parity, index, n) + self.amplitude(parity, index, -n)
    }

    /// Coefficient of `f(theta) i sin(n phi)`: `a(+n) - a(-n)`.
    pub fn sin_coefficient(&self, parity: Parity, index: usize, n: i32) -> Complex64 {
        self.amplitude(parity, index, n) - self.amplitude(parity, index, -n)
    }

    /// Expectation value of `-i d/dphi`.
    pub fn mean_angular_momentum(&self) -> f64 {
        self.terms.iter().map(|t| t.amplitude.norm_sqr() * t.nu as f64).sum()
    }

    /// Azimuthal weights `sum |a|^2` per `nu`, ascending in `nu`.
    pub fn nu_weights(&self) -> Vec<(i32, f64)> {
        let mut w: Vec<(i32, f64)> = Vec::new();
        for t in &self.terms {
            match w.iter_mut().find(|(nu, _)| *nu == t.nu) {
                Some(e) => e.1 += t.amplitude.norm_sqr(),
                None => w.push((t.nu, t.amplitude.norm_sqr())),
            }
        }
        w.sort_by_key(|e| e.0);
        w
    }

    /// `nu` carrying the most weight; ties go to smaller `|nu|`, then negative.
    pub fn nu_dominant(&self) -> i32 {
        let mut best: (i32, f64) = (0, f64::NEG_INFINITY);
        for (nu, w) in self.nu_weights() {
            let better = w > best.1 + 1e-9
                || ((w - best.1).abs() <= 1e-9 && (nu.abs(), nu) < (best.0.abs(), best.0));
            if better {
                best = (nu, w);
            }
        }
        best.0
    }

    /// Terms grouped into the `cos / i sin` notation, above the threshold.
    pub fn real_view(&self) -> Vec<RealTerm> {
        let mut slots: Vec<(Parity, usize, String)> = Vec::new();
        let mut max_nu = 0;
        for t in &self.terms {
            if !slots.iter().any(|s| s.0 == t.parity && s.1 == t.index) {
                slots.push((t.parity, t.index, t.theta_label.clone()));
            }
            max_nu = max_nu.max(t.nu.abs());
        }
        let mut out = Vec::new();
        for (parity, index, label) in slots {
            let a0 = self.amplitude(parity, index, 0);
            if a0.norm() >= self.threshold {
                out.push(RealTerm { theta_label: label.clone(), nu: 0, kind: RealKind::Constant, coefficient: a0 });
            }
            for n in 1..=max_nu {
                let (ap, am) = (self.amplitude(parity, index, n), self.amplitude(parity, index, -n));
                if ap.norm().max(am.norm()) < self.threshold {
                    continue;
                }
                if am.norm() < self.threshold * 0.1 {
                    out.push(RealTerm { theta_label: label.clone(), nu: n, kind: RealKind::Exp, coefficient: ap });
                } else if ap.norm() < self.threshold * 0.1 {
                    out.push(RealTerm { theta_label: label.clone(), nu: -n, kind: RealKind::Exp, coefficient: am });
                } else {
                    for (kind, c) in [(RealKind::Cos, ap + am), (RealKind::ISin, ap - am)] {
                        if c.norm() >= self.threshold {
                            out.push(RealTerm { theta_label: label.clone(), nu: n, kind, coefficient: c });
                        }
                    }
                }
            }
        }
        out.sort_by(|a, b| b.coefficient.norm().total_cmp(&a.coefficient.norm()));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("composition serializes")
    }
}

fn fmt_coefficient(c: Complex64) -> String {
    if c.im.abs() < 5e-4 {
        format!("{:+.3}", c.re)
    } else if c.re.abs() < 5e-4 {
        format!("{:+.3}i", c.im)
    } else {
        format!("({:+.3}{:+.3}i)", c.re, c.im)
    }
}

impl fmt::Display for StateComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .real_view()
            .iter()
            .map(|t| {
                let c = fmt_coefficient(t.coefficient);
                match t.kind {
                    RealKind::Constant => format!("{c} {}", t.theta_label),
                    RealKind::Exp => format!("{c} {} e^{{{}i phi}}", t.theta_label, t.nu),
                    RealKind::Cos if t.nu == 1 => format!("{c} {} cos phi", t.theta_label),
                    RealKind::Cos => format!("{c} {} cos {}phi", t.theta_label, t.nu),
                    RealKind::ISin if t.nu == 1 => format!("{c} i {} sin phi", t.theta_label),
                    RealKind::ISin => format!("{c} i {} sin {}phi", t.theta_label, t.nu),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Composition of the selected eigenstate, globally phased so the
/// largest-magnitude amplitude is real and positive.
pub fn ground_state_composition(s: &SpectrumResult, which: EnergySelector, threshold: f64) -> StateComposition {
    let mut v = s.eigenvector(which);
    phase_by_largest(&mut v);
    let mut terms: Vec<CompositionTerm> = s
        .labels
        .iter()
        .zip(v.iter())
        .map(|(l, &a)| CompositionTerm {
            theta_label: l.theta_label(),
            parity: l.parity,
            index: l.index,
            nu: l.nu,
            amplitude: a,
        })
        .collect();
    terms.sort_by(|a, b| b.amplitude.norm().total_cmp(&a.amplitude.norm()));
    StateComposition {
        eps: s.eigenvalue(which),
        terms,
        threshold,
    }
}
