//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line per
//! criterion to stderr (unbuffered, so it shows even for passing tests),
//! preceded by the individual checks.

use std::io::Write;

use curvspec::basis::{gram_schmidt_basis, BasisSet, Parity};
use curvspec::field::FieldConfig;
use curvspec::geometry::TorusGeometry;
use curvspec::hamiltonian::{assemble, AssemblyOptions, HamiltonianMatrix};
use curvspec::oracle::{grid_solve, GridSpec};
use curvspec::solver::{eigensolve, ground_state_composition, EnergySelector, StateComposition, DEFAULT_THRESHOLD};
use curvspec::sweep::{tau_grid, verification_points, Model, Orientation, Variant};


struct Criterion {
    id: u32,
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Self { id, name, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        let mut err = std::io::stderr().lock();
        let _ = writeln!(err, "  [{}] {} {}", self.id, if ok { "ok  " } else { "FAIL" }, detail);
        if !ok {
            self.failures.push(detail);
        }
    }

    fn finish(self) {
        let verdict = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        let _ = writeln!(std::io::stderr().lock(), "criterion {} ({}): {verdict}", self.id, self.name);
        assert!(self.failures.is_empty(), "criterion {} failed:\n{}", self.id, self.failures.join("\n"));
    }
}

fn default_model() -> Model {
    let geom = TorusGeometry::reference();
    let basis = gram_schmidt_basis(&geom, 6, 6, -2, 2).unwrap();
    Model::new(geom, basis, AssemblyOptions::default())
}

fn ground(model: &Model, orientation: Orientation, tau: f64, variant: Variant) -> StateComposition {
    let s = model.spectrum(&orientation.field(tau, variant)).unwrap();
    ground_state_composition(&s, EnergySelector::Ground, DEFAULT_THRESHOLD)
}

/// One printed table amplitude.
#[derive(Clone, Copy)]
enum Term {
    /// `|a|` of `theta-function e^{i nu phi}`.
    Exp(Parity, usize, i32, f64),
    /// `|a(+n) + a(-n)|`, the `cos(n phi)` coefficient.
    Cos(Parity, usize, i32, f64),
    /// `|a(+n) - a(-n)|`, the `i sin(n phi)` coefficient.
    ISin(Parity, usize, i32, f64),
}

use Parity::{Even as F, Odd as G};

fn term_name(t: Term) -> (String, f64) {
    let sym = |p: Parity| if p == F { 'f' } else { 'g' };
    match t {
        Term::Exp(p, i, nu, m) => (format!("{}{i} e^({nu}i phi)", sym(p)), m),
        Term::Cos(p, i, n, m) => (format!("{}{i} cos {n}phi", sym(p)), m),
        Term::ISin(p, i, n, m) => (format!("i {}{i} sin {n}phi", sym(p)), m),
    }
}

fn measured(c: &StateComposition, t: Term) -> f64 {
    match t {
        Term::Exp(p, i, nu, _) => c.amplitude(p, i, nu).norm(),
        Term::Cos(p, i, n, _) => c.cos_coefficient(p, i, n).norm(),
        Term::ISin(p, i, n, _) => c.sin_coefficient(p, i, n).norm(),
    }
}

#[allow(clippy::too_many_arguments)]
fn check_cell(crit: &mut Criterion, table: &str, model: &Model, o: Orientation, tau: f64, v: Variant, terms: &[Term], tol: f64) {
    let c = ground(model, o, tau, v);
    for &t in terms {
        let (name, want) = term_name(t);
        let got = measured(&c, t);
        crit.check(
            (got - want).abs() <= tol,
            format!("{table} [{v}] tau={tau}: |{name}| = {got:.4}, table {want:.3}, tol {tol}"),
        );
    }
}

#[test]
fn criterion_1_basis_regression() {
    let mut crit = Criterion::new(1, "basis regression");
    let geom = TorusGeometry::reference();
    let b = gram_schmidt_basis(&geom, 6, 6, -2, 2).unwrap();
    let pi = std::f64::consts::PI;
    let f0 = &b.even[0].coeffs;
    let f1 = &b.even[1].coeffs;
    let g1 = &b.odd[0].coeffs;
    let printed = [("f0 const", f0[0], 0.3987), ("f1 cos", f1[1], 0.6031), ("f1 const", f1[0], -0.1508), ("g1 sin", g1[0], 0.5642)];
    for (name, got, want) in printed {
        crit.check((got - want).abs() <= 2e-3, format!("{name} = {got:.6}, printed {want}"));
    }
    let n1 = (0.875 * pi).sqrt();
    let exact = [
        ("f0 const", f0[0], 1.0 / (2.0 * pi).sqrt()),
        ("f1 cos", f1[1], 1.0 / n1),
        ("f1 const", f1[0], -0.25 / n1),
        ("g1 sin", g1[0], 1.0 / pi.sqrt()),
    ];
    for (name, got, want) in exact {
        crit.check((got - want).abs() <= 1e-10, format!("{name} closed form, |diff| = {:.2e}", (got - want).abs()));
    }
    crit.check(f0.len() == 1 && f1.len() == 2 && g1.len() == 1, "no higher harmonics in f0, f1, g1".into());
    crit.finish();
}

#[test]
fn criterion_2_table_axial() {
    let mut crit = Criterion::new(2, "axial field table");
    let model = default_model();
    let o = Orientation::Axial;
    let tol = 0.01;
    check_cell(&mut crit, "axial", &model, o, 0.0, Variant::OFF_OFF, &[Term::Exp(F, 0, 0, 1.0)], tol);
    check_cell(&mut crit, "axial", &model, o, 1.0, Variant::OFF_OFF, &[Term::Exp(F, 0, 0, 1.0)], tol);
    check_cell(&mut crit, "axial", &model, o, 2.0, Variant::OFF_OFF, &[Term::Exp(F, 0, -1, 0.969), Term::Exp(F, 1, -1, 0.245)], tol);
    for v in [Variant::ON_OFF, Variant::ON_ON] {
        check_cell(&mut crit, "axial", &model, o, 0.0, v, &[Term::Exp(F, 0, 0, 0.968), Term::Exp(F, 1, 0, 0.244)], tol);
        check_cell(&mut crit, "axial", &model, o, 1.0, v, &[Term::Exp(F, 0, 0, 0.957), Term::Exp(F, 1, 0, 0.254)], tol);
        check_cell(&mut crit, "axial", &model, o, 2.0, v, &[Term::Exp(F, 0, -1, 0.987), Term::Exp(F, 1, -1, 0.158)], tol);
    }
    for v in Variant::STANDARD {
        let nu = ground(&model, o, 2.0, v).nu_dominant();
        crit.check(nu == -1, format!("axial [{v}] tau=2: dominant nu = {nu}, expected -1"));
    }
    for tau in [0.0, 1.0, 2.0] {
        let a = model.assemble(&o.field(tau, Variant::ON_OFF)).unwrap();
        let b = model.assemble(&o.field(tau, Variant::ON_ON)).unwrap();
        crit.check(a.entries == b.entries, format!("axial tau={tau}: [on/off] and [on/on] matrices identical"));
    }
    crit.finish();
}

#[test]
fn criterion_3_table_tilted() {
    let mut crit = Criterion::new(3, "tilted field table");
    let model = default_model();
    let o = Orientation::TILTED_45;
    let tol = 0.02;
    check_cell(
        &mut crit,
        "tilted",
        &model,
        o,
        1.0,
        Variant::ON_ON,
        &[Term::Exp(F, 0, 0, 0.957), Term::Exp(F, 1, 0, 0.232), Term::Exp(G, 1, 1, 0.094), Term::Exp(G, 1, -1, 0.127)],
        tol,
    );
    check_cell(
        &mut crit,
        "tilted",
        &model,
        o,
        2.0,
        Variant::ON_ON,
        &[Term::Exp(F, 0, -1, 0.909), Term::Exp(F, 0, 0, 0.126), Term::Exp(G, 1, -1, 0.173), Term::Exp(G, 1, 0, 0.351)],
        tol,
    );
    let gap = |tau: f64| {
        let on_on = model.spectrum(&o.field(tau, Variant::ON_ON)).unwrap().ground_eps();
        let on_off = model.spectrum(&o.field(tau, Variant::ON_OFF)).unwrap().ground_eps();
        (on_on, on_off)
    };
    let (a2, b2) = gap(2.0);
    crit.check(a2 > b2, format!("tilted tau=2: eps0[on/on] = {a2:.6} > eps0[on/off] = {b2:.6}"));
    let mut prev = -1.0;
    for tau in [0.0, 1.0, 2.0] {
        let (a, b) = gap(tau);
        let d = (a - b).abs();
        crit.check(d > prev, format!("tilted tau={tau}: |eps0[on/on] - eps0[on/off]| = {d:.6} grows"));
        prev = d;
    }
    crit.finish();
}

#[test]
fn criterion_4_table_in_plane() {
    let mut crit = Criterion::new(4, "in-plane field table");
    let model = default_model();
    let o = Orientation::InPlane;
    let tol = 0.02;
    let cells: [(f64, Variant, Vec<Term>); 6] = [
        (1.0, Variant::OFF_OFF, vec![Term::Exp(F, 0, 0, 0.978), Term::ISin(G, 1, 1, 0.279)]),
        (2.0, Variant::OFF_OFF, vec![Term::Exp(F, 0, 0, 0.894), Term::Exp(F, 1, 0, 0.133), Term::ISin(G, 1, 1, 0.552)]),
        (1.0, Variant::ON_OFF, vec![Term::Exp(F, 0, 0, 0.964), Term::Exp(F, 1, 0, 0.218)]),
        (2.0, Variant::ON_OFF, vec![Term::Exp(F, 0, 0, 0.941), Term::Exp(F, 1, 0, 0.132), Term::ISin(G, 1, 1, 0.403)]),
        (1.0, Variant::ON_ON, vec![Term::Exp(F, 0, 0, 0.954), Term::Exp(F, 1, 0, 0.178), Term::ISin(G, 1, 1, 0.320)]),
        (2.0, Variant::ON_ON, vec![Term::Exp(F, 0, 0, 0.869), Term::Cos(F, 1, 1, 0.250), Term::ISin(G, 1, 1, 0.314)]),
    ];
    for (tau, v, terms) in &cells {
        check_cell(&mut crit, "in-plane", &model, o, *tau, *v, terms, tol);
    }
    for tau in [1.0, 2.0] {
        let l = ground(&model, o, tau, Variant::OFF_OFF).mean_angular_momentum();
        crit.check(l.abs() <= 1e-8, format!("in-plane [off/off] tau={tau}: <-i d/dphi> = {l:.2e}"));
    }
    crit.finish();
}

fn oracle_check(crit: &mut Criterion, model: &Model, label: &str) {
    let grid = GridSpec::default();
    for (o, tau) in verification_points(&[0.0, 1.0, 2.0]) {
        let field = o.field(tau, Variant::ON_ON);
        let basis = model.spectrum(&field).unwrap().ground_eps();
        let g = grid_solve(&model.geom, &field, grid, 1).unwrap();
        let diff = (g.eps0() - basis).abs();
        let tol = 1e-3f64.max(1e-3 * basis.abs());
        crit.check(
            diff <= tol,
            format!("{label} {o} tau={tau}: basis {basis:.6}, grid {:.6}, |diff| {diff:.2e}, tol {tol:.1e}", g.eps0()),
        );
    }
}

#[test]
fn criterion_5_oracle_equivalence() {
    let mut crit = Criterion::new(5, "oracle equivalence");
    let start = std::time::Instant::now();
    oracle_check(&mut crit, &default_model(), "60-state basis");
    let secs = start.elapsed().as_secs_f64();
    crit.check(secs < 60.0, format!("runtime {secs:.1} s"));
    crit.finish();
}

#[test]
fn oracle_equivalence_with_enlarged_basis() {
    let geom = TorusGeometry::reference();
    let basis = gram_schmidt_basis(&geom, 8, 8, -3, 3).unwrap();
    let model = Model::new(geom, basis, AssemblyOptions::default());
    let mut crit = Criterion::new(5, "oracle equivalence, 8+8 x nu in [-3,3] basis (supplementary)");
    oracle_check(&mut crit, &model, "112-state basis");
    crit.finish();
}

fn fields_for_properties() -> Vec<FieldConfig> {
    let mut out = Vec::new();
    for (t0, t1) in [(0.0, 0.0), (1.3, 0.0), (0.0, 1.7), (0.9, -1.2), (2.0 / 2f64.sqrt(), 2.0 / 2f64.sqrt()), (-2.5, 0.6)] {
        for (vc, vmag) in [(false, false), (true, false), (true, true), (false, true)] {
            out.push(FieldConfig::new(t0, t1).with_toggles(vc, vmag));
        }
    }
    out
}

fn decoupling_deviation(h: &HamiltonianMatrix) -> f64 {
    let mut worst = 0.0f64;
    for (i, li) in h.labels.iter().enumerate() {
        for (j, lj) in h.labels.iter().enumerate() {
            if li.nu != lj.nu || li.parity != lj.parity {
                worst = worst.max(h.entries[(i, j)].norm());
            }
        }
    }
    worst
}

fn spectrum_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn criterion_6_property_suite() {
    let mut crit = Criterion::new(6, "property suite");
    let model = default_model();
    let gram = model.basis.gram_matrix();
    let ortho = gram
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, &g)| (g - if i == j { 1.0 } else { 0.0 }).abs()))
        .fold(0.0, f64::max);
    crit.check(ortho <= 1e-10, format!("basis orthonormality, max deviation {ortho:.2e}"));

    let (mut herm, mut reversal, mut residual, mut vecs) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut decoupling = 0.0f64;
    for f in fields_for_properties() {
        let h = model.assemble(&f).unwrap();
        herm = herm.max(h.hermiticity_deviation());
        let s = eigensolve(&h).unwrap();
        residual = residual.max(s.max_residual(&h.entries));
        vecs = vecs.max(s.orthonormality_deviation());
        let r = model.spectrum(&f.reversed()).unwrap();
        reversal = reversal.max(spectrum_distance(&s.eigenvalues, &r.eigenvalues));
        if f.tau1 == 0.0 {
            decoupling = decoupling.max(decoupling_deviation(&h));
        }
    }
    crit.check(herm <= 1e-10, format!("Hermiticity, max |H - H^dagger| = {herm:.2e}"));
    crit.check(decoupling <= 1e-12, format!("nu and parity decoupling at tau1 = 0, max entry {decoupling:.2e}"));
    crit.check(reversal <= 1e-10, format!("field reversal, max eigenvalue shift {reversal:.2e}"));
    crit.check(residual <= 1e-8, format!("eigenpair residuals, max {residual:.2e}"));
    crit.check(vecs <= 1e-8, format!("eigenvector orthonormality, max deviation {vecs:.2e}"));

    let geom = TorusGeometry::reference();
    let nested: Vec<BasisSet> = [(2, 2, 0, 0), (4, 4, -1, 1), (6, 6, -2, 2), (8, 8, -3, 3)]
        .iter()
        .map(|&(ne, no, lo, hi)| gram_schmidt_basis(&geom, ne, no, lo, hi).unwrap())
        .collect();
    for f in fields_for_properties() {
        let energies: Vec<f64> = nested
            .iter()
            .map(|b| -eigensolve(&assemble(&geom, &f, b).unwrap()).unwrap().ground_eps())
            .collect();
        let monotone = energies.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        crit.check(
            monotone,
            format!(
                "variational monotonicity tau=({:.2},{:.2}) [{}/{}]: E = {:?}",
                f.tau0,
                f.tau1,
                f.vc_on as u8,
                f.vmag_on as u8,
                energies.iter().map(|e| format!("{e:.5}")).collect::<Vec<_>>()
            ),
        );
    }
    crit.finish();
}

/// First sweep value where the dominant `nu` of the ground state changes.
fn first_crossover(model: &Model, o: Orientation, v: Variant, taus: &[f64]) -> Option<(f64, i32, i32)> {
    let nus: Vec<i32> = taus.iter().map(|&t| ground(model, o, t, v).nu_dominant()).collect();
    nus.windows(2).zip(taus.windows(2)).find(|(n, _)| n[0] != n[1]).map(|(n, t)| (0.5 * (t[0] + t[1]), n[0], n[1]))
}

#[test]
fn criterion_7_figure_shapes() {
    let mut crit = Criterion::new(7, "figure shapes");
    let model = default_model();
    let taus = tau_grid(0.0, 3.0, 0.05).unwrap();
    let off = first_crossover(&model, Orientation::Axial, Variant::OFF_OFF, &taus);
    crit.check(
        matches!(off, Some((t, 0, -1)) if (0.8..=1.3).contains(&t)),
        format!("axial [off/off]: first ground-state nu change {off:?}, expected 0 -> -1 near tau = 1"),
    );
    let on = first_crossover(&model, Orientation::Axial, Variant::ON_OFF, &taus);
    crit.check(
        !matches!(on, Some((t, _, _)) if (0.8..=1.3).contains(&t)),
        format!("axial [on/off]: first ground-state nu change {on:?}, none expected near tau = 1"),
    );
    let delta = |tau: f64| {
        let o = Orientation::InPlane;
        let a = model.spectrum(&o.field(tau, Variant::ON_ON)).unwrap().ground_eps();
        let b = model.spectrum(&o.field(tau, Variant::ON_OFF)).unwrap().ground_eps();
        (a - b).abs()
    };
    let (d1, dq) = (delta(1.0), delta(0.25));
    crit.check(d1 > dq, format!("in-plane |eps0[on/on] - eps0[on/off]|: {d1:.5} at tau=1 > {dq:.5} at tau=0.25"));
    crit.finish();
}
