//! Acceptance suite: one test per criterion, each printing a PASS line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

use std::collections::HashMap;
use std::time::Instant;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use pxforms::cochain::{coboundary, Cochain};
use pxforms::diagnostics::{
    algebra_suite, ball_pairs, campanato_fit, meyers_probe, morrey_fit, uhlenbeck_check,
    AlgebraSuiteConfig, CellField, XiChoice,
};
use pxforms::exterior::{interior, wedge_covector, FormValue, MetricTensor};
use pxforms::model::{BoundaryMode, EnergyModel, ExponentField, WeightField};
use pxforms::solver::{
    coulomb_potential, div_curl_solve, linear_hodge_solve, minimize, SolverConfig, TraceMode,
};
use pxforms::whitney::{codifferential, MassOperator};
use pxforms::{dyadic_radii, meshgen, MetricMode, SimplicialComplex};

fn mesh_families() -> Vec<(&'static str, SimplicialComplex)> {
    vec![
        ("interval8", meshgen::interval_mesh(8, 0.0, 1.0).unwrap()),
        (
            "square4",
            meshgen::square_mesh(4, [0.0, 1.0, 0.0, 1.0]).unwrap(),
        ),
        (
            "cube2",
            meshgen::cube_mesh(2, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap(),
        ),
        ("disk3", meshgen::disk_mesh(3).unwrap()),
    ]
}

fn random_cochain(
    complex: &SimplicialComplex,
    k: usize,
    nc: usize,
    rng: &mut ChaCha8Rng,
) -> Cochain {
    let mut u = Cochain::zero(complex, k, nc);
    for v in u.values_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    u
}

#[test]
fn criterion_01_algebraic_inequality_battery() {
    let start = Instant::now();
    let cfg = AlgebraSuiteConfig::default(); // 1e5 samples, m {1,2,3,6}, p [1.1,8], mu [0,2], seed 42
    let report = algebra_suite(&cfg);
    assert!(report.pass, "violations found");
    for c in &report.checks {
        assert_eq!(c.samples, 100_000, "{}", c.name);
        assert_eq!(c.violations, 0, "{}: {} violations", c.name, c.violations);
        assert!(
            c.min_margin >= -cfg.tolerance,
            "{}: min margin {}",
            c.name,
            c.min_margin
        );
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 30.0, "battery took {secs:.1} s (budget 30 s)");
    println!("ACCEPTANCE 1: PASS — algebra battery, 10 checks x 1e5 samples, zero violations in {secs:.1} s");
}

#[test]
fn criterion_02_operator_identities() {
    // d∘d = 0 exactly: integer composition of the signed incidence
    for (name, mesh) in mesh_families() {
        for k in 2..=mesh.dim() {
            for i in 0..mesh.num_simplices(k) {
                let mut acc: HashMap<usize, i64> = HashMap::new();
                for (j, &f) in mesh.simplex_faces(k, i).iter().enumerate() {
                    let sj = if j % 2 == 0 { 1i64 } else { -1 };
                    for (l, &g) in mesh.simplex_faces(k - 1, f).iter().enumerate() {
                        let sl = if l % 2 == 0 { 1i64 } else { -1 };
                        *acc.entry(g).or_insert(0) += sj * sl;
                    }
                }
                assert!(acc.values().all(|&v| v == 0), "{name}: ∂∂ ≠ 0");
            }
        }
    }
    // adjointness to 1e-10 on 100 random cochains per mesh family
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (name, mesh) in mesh_families() {
        for k in 0..mesh.dim() {
            let mk = MassOperator::assemble(&mesh, k, MetricMode::Cell).unwrap();
            let mk1 = MassOperator::assemble(&mesh, k + 1, MetricMode::Cell).unwrap();
            for _ in 0..100 {
                let u = random_cochain(&mesh, k, 1, &mut rng);
                let eta = random_cochain(&mesh, k + 1, 1, &mut rng);
                let du = coboundary(&mesh, &u).unwrap();
                let ds = codifferential(&eta, &mesh, &mk1, &mk).unwrap();
                let lhs = mk1.inner(&du, &eta);
                let rhs = mk.inner(&u, &ds);
                assert!(
                    (lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()),
                    "{name} k={k}: adjointness defect {}",
                    (lhs - rhs).abs()
                );
            }
        }
    }
    // splitting identity to 1e-12
    for _ in 0..300 {
        let dim = *[2usize, 3, 4].choose(&mut rng).unwrap();
        let k = rng.gen_range(1..dim);
        let g = MetricTensor::euclidean(dim);
        let mut xi = FormValue::zero(dim, k, 2);
        for slot in 0..xi.slots() {
            for c in 0..2 {
                let v = rng.gen_range(-5.0..5.0);
                xi.set(slot, c, v);
            }
        }
        let mut nu: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nn = nu.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nn < 1e-3 {
            continue;
        }
        for x in &mut nu {
            *x /= nn;
        }
        let t = interior(&nu, &wedge_covector(&nu, &xi).unwrap(), &g).unwrap();
        let m = wedge_covector(&nu, &interior(&nu, &xi, &g).unwrap()).unwrap();
        for slot in 0..xi.slots() {
            for c in 0..2 {
                let s = t.get(slot, c) + m.get(slot, c);
                assert!((s - xi.get(slot, c)).abs() <= 1e-12);
            }
        }
    }
    println!(
        "ACCEPTANCE 2: PASS — d∘d = 0 exact, adjointness ≤ 1e-10 (100/family), splitting ≤ 1e-12"
    );
}

#[test]
fn criterion_03_gradient_energy_consistency() {
    let square = meshgen::square_mesh(2, [0.0, 1.0, 0.0, 1.0]).unwrap();
    let cube = meshgen::cube_mesh(1, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
    let interval = meshgen::interval_mesh(6, 0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pairs = 0usize;
    // (mesh, degree, vec_dim) × (p, μ) — 20 random model/v pairs
    let combos: Vec<(&SimplicialComplex, usize, usize)> = vec![
        (&square, 0, 1),
        (&square, 1, 2),
        (&cube, 1, 1),
        (&interval, 0, 2),
    ];
    let pmu = [
        (1.3, 0.0),
        (1.3, 0.5),
        (2.0, 0.0),
        (2.0, 0.5),
        (3.5, 0.0),
        (3.5, 0.5),
    ];
    'outer: for (mesh, k, nc) in combos {
        for &(pv, mu) in &pmu {
            if pairs >= 20 {
                break 'outer;
            }
            let p = ExponentField::from_fn(mesh, |x| pv + 0.05 * x[0]).unwrap();
            let a = WeightField::from_fn(mesh, |x| 1.0 + 0.2 * x[0].abs()).unwrap();
            let mut f = Cochain::zero(mesh, k + 1, nc);
            for v in f.values_mut() {
                *v = rng.gen_range(-0.5..0.5);
            }
            let mut u0 = Cochain::zero(mesh, k, nc);
            for v in u0.values_mut() {
                *v = rng.gen_range(-0.5..0.5);
            }
            let boundary = if pairs % 2 == 0 {
                BoundaryMode::DirichletTangential
            } else {
                BoundaryMode::NeumannNatural
            };
            let model = EnergyModel::new(mesh, k, nc, mu, p, a, f, u0, boundary).unwrap();
            let mut v = Cochain::zero(mesh, k, nc);
            for val in v.values_mut() {
                *val = rng.gen_range(-0.6..0.6);
            }
            let grad = model.energy_gradient(&v).unwrap();
            let h = 1e-6;
            for i in 0..v.len() {
                for c in 0..nc {
                    let masked =
                        boundary == BoundaryMode::DirichletTangential && mesh.is_boundary(k, i);
                    if masked {
                        assert_eq!(grad.get(i, c), 0.0);
                        continue;
                    }
                    let mut vp = v.clone();
                    vp.set(i, c, v.get(i, c) + h);
                    let mut vm = v.clone();
                    vm.set(i, c, v.get(i, c) - h);
                    let fd = (model.total_energy(&vp).unwrap() - model.total_energy(&vm).unwrap())
                        / (2.0 * h);
                    let gi = grad.get(i, c);
                    assert!(
                        (fd - gi).abs() <= 1e-6 * (1.0 + gi.abs()),
                        "pair {pairs} p={pv} mu={mu} dof=({i},{c}): fd={fd} grad={gi}"
                    );
                }
            }
            pairs += 1;
        }
    }
    assert_eq!(pairs, 20);
    println!("ACCEPTANCE 3: PASS — central differences match energy_gradient to rel 1e-6 on 20 (model, v) pairs");
}

fn p2_equivalence_case(
    label: &str,
    mesh: &SimplicialComplex,
    degree: usize,
    source: impl Fn(&[f64]) -> FormValue + Sync,
) -> f64 {
    let start = Instant::now();
    let p = ExponentField::constant(mesh, 2.0).unwrap();
    let a = WeightField::constant(mesh, 1.0).unwrap();
    let f = Cochain::from_form_fn(mesh, degree + 1, 1, source).unwrap();
    let u0 = Cochain::zero(mesh, degree, 1);
    let model = EnergyModel::new(
        mesh,
        degree,
        1,
        0.0,
        p,
        a,
        f,
        u0,
        BoundaryMode::DirichletTangential,
    )
    .unwrap();
    let cfg = SolverConfig {
        grad_tol: 1e-12,
        max_iters: 200_000,
        ..Default::default()
    };
    let lin = linear_hodge_solve(&model, &cfg).unwrap();
    let non = minimize(&model, &cfg).unwrap();
    let mass = model.flux_mass();
    let mut diff = non.omega.clone();
    diff.add_scaled(&lin.omega, -1.0);
    let err = mass.norm(&diff);
    let secs = start.elapsed().as_secs_f64();
    assert!(err <= 1e-8, "{label}: omega mismatch {err:e}");
    assert!(
        (non.energy - lin.energy).abs() <= 1e-8 * (1.0 + lin.energy.abs()),
        "{label}: energy mismatch"
    );
    assert!(secs < 60.0, "{label}: solve took {secs:.1} s (budget 60 s)");
    secs
}

#[test]
fn criterion_04_linear_oracle_equivalence() {
    let two_tri = meshgen::square_mesh(1, [0.0, 1.0, 0.0, 1.0]).unwrap();
    let t1 = p2_equivalence_case("2-triangle square", &two_tri, 0, |x| {
        let mut v = FormValue::zero(2, 1, 1);
        v.set_tuple(&[0], 0, x[0] * x[1]);
        v.set_tuple(&[1], 0, x[1]);
        v
    });
    let square = meshgen::square_mesh(32, [0.0, 1.0, 0.0, 1.0]).unwrap();
    let t2 = p2_equivalence_case("32x32 square", &square, 0, |x| {
        let mut v = FormValue::zero(2, 1, 1);
        v.set_tuple(&[0], 0, x[0] * x[1]);
        v.set_tuple(&[1], 0, (std::f64::consts::PI * x[1]).sin());
        v
    });
    let cube = meshgen::cube_mesh(8, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
    let t3 = p2_equivalence_case("8^3 cube (k=1)", &cube, 1, |x| {
        let mut v = FormValue::zero(3, 2, 1);
        v.set_tuple(&[0, 1], 0, x[2]);
        v.set_tuple(&[1, 2], 0, x[0] * x[1]);
        v
    });
    println!(
        "ACCEPTANCE 4: PASS — nonlinear minimizer matches CG Hodge solve ≤ 1e-8 (L²): 2-tri {t1:.1}s, 32x32 {t2:.1}s, 8^3 cube {t3:.1}s"
    );
}

#[test]
fn criterion_05_gauge_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // degree-0 potentials: closed 0-forms are constants
    let square = meshgen::square_mesh(8, [0.0, 1.0, 0.0, 1.0]).unwrap();
    let p = ExponentField::from_fn(&square, |x| 2.0 + 0.4 * x[0]).unwrap();
    let a = WeightField::constant(&square, 1.0).unwrap();
    let f = Cochain::from_form_fn(&square, 1, 1, |x| {
        let mut v = FormValue::zero(2, 1, 1);
        v.set_tuple(&[0], 0, x[0]);
        v.set_tuple(&[1], 0, x[1] * x[0]);
        v
    })
    .unwrap();
    let u0 =
        Cochain::from_form_fn(&square, 0, 1, |x| FormValue::scalar(2, &[x[0] * x[1]])).unwrap();
    let cfg = SolverConfig {
        grad_tol: 1e-11,
        ..Default::default()
    };
    let model = EnergyModel::new(
        &square,
        0,
        1,
        0.0,
        p.clone(),
        a.clone(),
        f.clone(),
        u0.clone(),
        BoundaryMode::DirichletTangential,
    )
    .unwrap();
    let base = minimize(&model, &cfg).unwrap();
    let mut u0_shift = u0.clone();
    let c = rng.gen_range(-2.0..2.0);
    for v in u0_shift.values_mut() {
        *v += c;
    }
    let model2 = EnergyModel::new(
        &square,
        0,
        1,
        0.0,
        p,
        a,
        f,
        u0_shift,
        BoundaryMode::DirichletTangential,
    )
    .unwrap();
    let shifted = minimize(&model2, &cfg).unwrap();
    let mass = model.flux_mass();
    let mut diff = base.omega.clone();
    diff.add_scaled(&shifted.omega, -1.0);
    let err0 = mass.norm(&diff);
    assert!(err0 <= 1e-9, "degree 0: omega changed by {err0:e}");

    // degree-1 potentials on a cube: closed shift = d(random 0-cochain)
    let cube = meshgen::cube_mesh(2, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
    let p = ExponentField::constant(&cube, 2.5).unwrap();
    let a = WeightField::constant(&cube, 1.0).unwrap();
    let mut f = Cochain::zero(&cube, 2, 1);
    for v in f.values_mut() {
        *v = rng.gen_range(-0.3..0.3);
    }
    let mut u0 = Cochain::zero(&cube, 1, 1);
    for v in u0.values_mut() {
        *v = rng.gen_range(-0.3..0.3);
    }
    let model = EnergyModel::new(
        &cube,
        1,
        1,
        0.2,
        p.clone(),
        a.clone(),
        f.clone(),
        u0.clone(),
        BoundaryMode::DirichletTangential,
    )
    .unwrap();
    let base = minimize(&model, &cfg).unwrap();
    let chi = {
        let w = random_cochain(&cube, 0, 1, &mut rng);
        coboundary(&cube, &w).unwrap()
    };
    let mut u0_shift = u0.clone();
    u0_shift.add_scaled(&chi, 1.0);
    let model2 = EnergyModel::new(
        &cube,
        1,
        1,
        0.2,
        p,
        a,
        f,
        u0_shift,
        BoundaryMode::DirichletTangential,
    )
    .unwrap();
    let shifted = minimize(&model2, &cfg).unwrap();
    let mass = model.flux_mass();
    let mut diff = base.omega.clone();
    diff.add_scaled(&shifted.omega, -1.0);
    let err1 = mass.norm(&diff);
    assert!(err1 <= 1e-9, "degree 1: omega changed by {err1:e}");
    println!("ACCEPTANCE 5: PASS — gauge invariance: closed shifts move omega by {err0:.2e} (k=0), {err1:.2e} (k=1)");
}

#[test]
fn criterion_06_div_curl_oracle() {
    // The uniform hexagonal disk reproduces the rotational field exactly
    // (it lies in the lowest-order edge-element space and the symmetric
    // boundary cancels the weak-trace defect), so the convergence study runs
    // on the jittered disk where the O(h) boundary error is visible.
    let mut errors = Vec::new();
    let mut hs = Vec::new();
    for rings in [8usize, 16, 32] {
        let mesh = meshgen::disk_mesh_jittered(rings, 0.3).unwrap();
        let f = Cochain::from_form_fn(&mesh, 2, 1, |_| FormValue::basis(2, &[0, 1])).unwrap();
        let w = Cochain::zero(&mesh, 0, 1);
        let sol = div_curl_solve(
            &mesh,
            1,
            Some(&f),
            Some(&w),
            TraceMode::Normal,
            None,
            MetricMode::Cell,
        )
        .unwrap();
        assert!(
            sol.du_residual < 1e-9,
            "rings {rings}: du residual {}",
            sol.du_residual
        );
        assert!(
            sol.dstar_residual < 1e-9,
            "rings {rings}: d* residual {}",
            sol.dstar_residual
        );
        let exact = Cochain::from_form_fn(&mesh, 1, 1, |x| {
            let mut v = FormValue::zero(2, 1, 1);
            v.set_tuple(&[0], 0, -0.5 * x[1]);
            v.set_tuple(&[1], 0, 0.5 * x[0]);
            v
        })
        .unwrap();
        let m1 = MassOperator::assemble(&mesh, 1, MetricMode::Cell).unwrap();
        let mut diff = sol.u.clone();
        diff.add_scaled(&exact, -1.0);
        errors.push(m1.norm(&diff));
        hs.push(1.0 / rings as f64);
    }
    // least-squares slope of log error against log h
    let pts: Vec<(f64, f64)> = hs
        .iter()
        .zip(&errors)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    let (slope, _, _) = pxforms::diagnostics::linear_fit(&pts);
    assert!(
        slope >= 0.9,
        "convergence slope {slope} below 0.9; errors {errors:?}"
    );
    println!(
        "ACCEPTANCE 6: PASS — div-curl rotational oracle: L² errors {errors:?}, slope {slope:.2}"
    );
}

#[test]
fn criterion_07_regularity_diagnostics_on_analytic_oracles() {
    let start = Instant::now();
    // Campanato: (x¹₊)^{1/2} on a fine 1D mesh, α̃ = 0.5 ± 0.05
    let line = meshgen::interval_mesh(768, -0.5, 1.0).unwrap();
    let field = CellField::from_fn(&line, 0, 1, |x| {
        FormValue::scalar(1, &[x[0].max(0.0).sqrt()])
    });
    let camp = campanato_fit(
        &line,
        &field,
        2.0,
        &[vec![0.0]],
        &dyadic_radii(0.25, 4).unwrap(),
    )
    .unwrap();
    assert!(
        (camp.alpha - 0.5).abs() <= 0.05,
        "campanato alpha {} (want 0.5 ± 0.05)",
        camp.alpha
    );
    // Morrey: |x|^{-1/4} scalar field in 2D, slope 1.5 ± 0.1
    // (oracle: ∫_{B_ρ}|x|^{-1/2} dV ∝ ρ^{3/2})
    let square = meshgen::square_mesh(64, [-1.0, 1.0, -1.0, 1.0]).unwrap();
    let field = CellField::from_fn(&square, 0, 1, |x| {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        FormValue::scalar(2, &[r.powf(-0.25)])
    });
    let p = ExponentField::constant(&square, 2.0).unwrap();
    let fit = morrey_fit(
        &square,
        &field,
        &p,
        &[vec![0.0, 0.0]],
        &dyadic_radii(0.4, 4).unwrap(),
    )
    .unwrap();
    assert!(
        (fit.worst_slope - 1.5).abs() <= 0.1,
        "morrey slope {} (want 1.5 ± 0.1)",
        fit.worst_slope
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 120.0, "diagnostics took {secs:.1} s (budget 120 s)");
    println!(
        "ACCEPTANCE 7: PASS — campanato alpha {:.3} (0.5 ± 0.05), morrey slope {:.3} (1.5 ± 0.1) in {secs:.1} s",
        camp.alpha, fit.worst_slope
    );
}

#[test]
fn criterion_08_meyers_probe_sanity() {
    // p ≡ 2, F = 0, harmonic-potential ω on the 32×32 square
    let mesh = meshgen::square_mesh(32, [0.0, 1.0, 0.0, 1.0]).unwrap();
    let p = ExponentField::constant(&mesh, 2.0).unwrap();
    let a = WeightField::constant(&mesh, 1.0).unwrap();
    let f = Cochain::zero(&mesh, 1, 1);
    let u0 = Cochain::from_form_fn(&mesh, 0, 1, |x| {
        FormValue::scalar(2, &[x[0] * x[0] - x[1] * x[1]])
    })
    .unwrap();
    let model = EnergyModel::new(
        &mesh,
        0,
        1,
        0.0,
        p.clone(),
        a,
        f,
        u0,
        BoundaryMode::DirichletTangential,
    )
    .unwrap();
    let sol = minimize(&model, &SolverConfig::default()).unwrap();
    assert!(sol.converged);
    let field = CellField::from_cochain(&mesh, &sol.omega).unwrap();
    let grid: Vec<f64> = (1..=10).map(|i| 0.05 * i as f64).collect();
    let pairs = ball_pairs(&mesh, 0.2, 3).unwrap();
    let src = CellField::from_cochain(&mesh, model.source()).unwrap();
    let probe = meyers_probe(
        &mesh,
        &field,
        &p,
        Some(&src),
        XiChoice::BallMean,
        &grid,
        &pairs,
        10.0,
    )
    .unwrap();
    let sigma = probe.sigma_star.unwrap_or(0.0);
    assert!(sigma >= 0.25, "sigma* = {sigma} (want ≥ 0.25)");
    println!("ACCEPTANCE 8: PASS — meyers probe on harmonic omega: sigma* = {sigma}");
}

#[test]
fn criterion_09_uhlenbeck_decay_standin() {
    let mesh = meshgen::square_mesh(32, [0.0, 1.0, 0.0, 1.0]).unwrap();
    for pv in [1.5, 3.0] {
        let p = ExponentField::constant(&mesh, pv).unwrap();
        let a = WeightField::constant(&mesh, 1.0).unwrap();
        let f = Cochain::zero(&mesh, 1, 1);
        let u0 = Cochain::from_form_fn(&mesh, 0, 1, |x| {
            FormValue::scalar(2, &[x[0] * x[0] - x[1] * x[1]])
        })
        .unwrap();
        let model = EnergyModel::new(
            &mesh,
            0,
            1,
            0.0,
            p,
            a,
            f,
            u0,
            BoundaryMode::DirichletTangential,
        )
        .unwrap();
        let sol = minimize(&model, &SolverConfig::default()).unwrap();
        assert!(sol.converged, "p = {pv}");
        let field = CellField::from_cochain(&mesh, &sol.omega).unwrap();
        let pairs = ball_pairs(&mesh, 0.2, 3).unwrap();
        let radii = dyadic_radii(0.2, 3).unwrap();
        let report = uhlenbeck_check(&model, &field, &pairs, &radii).unwrap();
        assert!(
            report.beta_meas > 0.0,
            "p = {pv}: beta {}",
            report.beta_meas
        );
        assert!(report.c1_meas < 5.0, "p = {pv}: c1 {}", report.c1_meas);
        println!(
            "ACCEPTANCE 9 (p = {pv}): PASS — uhlenbeck stand-in: c1 = {:.3}, beta = {:.3}",
            report.c1_meas, report.beta_meas
        );
    }
}

#[test]
fn coulomb_gauge_pipeline_consistency() {
    // supporting check used by several criteria: the reconstructed Coulomb
    // potential reproduces omega and is gauge-orthogonal
    let mesh = meshgen::disk_mesh(6).unwrap();
    let p = ExponentField::from_fn(&mesh, |x| 2.0 + 0.3 * x[0].abs()).unwrap();
    let a = WeightField::constant(&mesh, 1.0).unwrap();
    let f = Cochain::from_form_fn(&mesh, 1, 1, |x| {
        let mut v = FormValue::zero(2, 1, 1);
        v.set_tuple(&[0], 0, x[0]);
        v.set_tuple(&[1], 0, x[1]);
        v
    })
    .unwrap();
    let u0 = Cochain::zero(&mesh, 0, 1);
    let model = EnergyModel::new(
        &mesh,
        0,
        1,
        0.1,
        p,
        a,
        f,
        u0,
        BoundaryMode::DirichletTangential,
    )
    .unwrap();
    let sol = minimize(&model, &SolverConfig::default()).unwrap();
    assert!(sol.converged);
    let gauge = coulomb_potential(&mesh, &sol.omega).unwrap();
    let mut du = coboundary(&mesh, &gauge.u_tilde).unwrap();
    du.add_scaled(&sol.omega, -1.0);
    assert!(du.l2() <= 1e-9 * (1.0 + sol.omega.l2()));
    assert!(gauge.du_residual <= 1e-9);
}
