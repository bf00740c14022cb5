//! Deterministic self-test: the algebraic inequality battery plus operator
//! identity checks on the shipped mesh families.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use pxforms::cochain::{coboundary, Cochain};
use pxforms::diagnostics::{algebra_suite, AlgebraSuiteConfig};
use pxforms::exterior::{hodge_star, inner, interior, wedge_covector, FormValue, MetricTensor};
use pxforms::whitney::{codifferential, MassOperator};
use pxforms::{MetricMode, SimplicialComplex};

pub struct SelftestOutcome {
    pub report: String,
    pub pass: bool,
}

fn families() -> Vec<(&'static str, SimplicialComplex)> {
    vec![
        (
            "interval8",
            pxforms::meshgen::interval_mesh(8, 0.0, 1.0).unwrap(),
        ),
        (
            "square4",
            pxforms::meshgen::square_mesh(4, [0.0, 1.0, 0.0, 1.0]).unwrap(),
        ),
        (
            "cube2",
            pxforms::meshgen::cube_mesh(2, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap(),
        ),
        ("disk3", pxforms::meshgen::disk_mesh(3).unwrap()),
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

/// Integer composition of the signed incidence: ∂∘∂ = 0 exactly.
fn check_dd_integer(complex: &SimplicialComplex) -> bool {
    for k in 2..=complex.dim() {
        for i in 0..complex.num_simplices(k) {
            let mut acc: HashMap<usize, i64> = HashMap::new();
            for (j, &f) in complex.simplex_faces(k, i).iter().enumerate() {
                let sj = if j % 2 == 0 { 1i64 } else { -1 };
                for (l, &g) in complex.simplex_faces(k - 1, f).iter().enumerate() {
                    let sl = if l % 2 == 0 { 1i64 } else { -1 };
                    *acc.entry(g).or_insert(0) += sj * sl;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
    }
    true
}

pub fn selftest(seed: u64, inject_violation: bool) -> SelftestOutcome {
    let mut out = String::new();
    let mut pass = true;
    let _ = writeln!(out, "pxforms selftest (seed {seed})");

    // 1. algebraic inequality battery
    let cfg = AlgebraSuiteConfig {
        seed,
        inject_violation,
        ..Default::default()
    };
    let report = algebra_suite(&cfg);
    for c in &report.checks {
        let _ = writeln!(
            out,
            "check algebra.{} samples={} violations={} min_margin={}",
            c.name, c.samples, c.violations, c.min_margin
        );
        if c.violations > 0 {
            pass = false;
            if let Some(w) = &c.worst {
                let _ = writeln!(
                    out,
                    "witness {} m={} p={} mu={} xi={:?} eta={:?} lhs={} rhs={}",
                    c.name, w.m, w.p, w.mu, w.xi, w.eta, w.lhs, w.rhs
                );
            }
        }
    }

    // 2. operator identities per mesh family
    for (name, mesh) in families() {
        let n = mesh.dim();
        let dd_ok = check_dd_integer(&mesh);
        let _ = writeln!(out, "check {name}.boundary_of_boundary exact={dd_ok}");
        pass &= dd_ok;

        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        // fp coboundary composition
        let mut worst_dd = 0.0f64;
        if n >= 2 {
            for _ in 0..20 {
                let u = random_cochain(&mesh, n - 2, 2, &mut rng);
                let ddu = coboundary(&mesh, &coboundary(&mesh, &u).unwrap()).unwrap();
                worst_dd = worst_dd.max(ddu.values().iter().fold(0.0f64, |a, &b| a.max(b.abs())));
            }
        }
        let dd_fp_ok = worst_dd <= 1e-12;
        let _ = writeln!(
            out,
            "check {name}.dd_roundoff worst={worst_dd} pass={dd_fp_ok}"
        );
        pass &= dd_fp_ok;

        // adjointness ⟨du, η⟩ = ⟨u, d*η⟩ on 100 random cochains
        let mut worst_adj = 0.0f64;
        for k in 0..n {
            let mk = MassOperator::assemble(&mesh, k, MetricMode::Cell).unwrap();
            let mk1 = MassOperator::assemble(&mesh, k + 1, MetricMode::Cell).unwrap();
            for _ in 0..100 {
                let u = random_cochain(&mesh, k, 1, &mut rng);
                let eta = random_cochain(&mesh, k + 1, 1, &mut rng);
                let du = coboundary(&mesh, &u).unwrap();
                let ds = codifferential(&eta, &mesh, &mk1, &mk).unwrap();
                let lhs = mk1.inner(&du, &eta);
                let rhs = mk.inner(&u, &ds);
                worst_adj = worst_adj.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
            }
        }
        let adj_ok = worst_adj <= 1e-10;
        let _ = writeln!(
            out,
            "check {name}.adjointness worst={worst_adj} pass={adj_ok}"
        );
        pass &= adj_ok;
    }

    // 3. pointwise splitting identity and Hodge involution
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa19);
    let mut worst_split = 0.0f64;
    let mut worst_star = 0.0f64;
    for _ in 0..500 {
        let dim = *[2usize, 3, 4].choose(&mut rng).unwrap();
        let k = rng.gen_range(1..dim);
        let g = MetricTensor::euclidean(dim);
        let mut xi = FormValue::zero(dim, k, 2);
        for slot in 0..xi.slots() {
            for c in 0..2 {
                let val = rng.gen_range(-5.0..5.0);
                xi.set(slot, c, val);
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
                let s = t.get(slot, c) + m.get(slot, c) - xi.get(slot, c);
                worst_split = worst_split.max(s.abs());
            }
        }
        let ss = hodge_star(&hodge_star(&xi, &g).unwrap(), &g).unwrap();
        let sign = if (k * (dim - k)) % 2 == 0 { 1.0 } else { -1.0 };
        for slot in 0..xi.slots() {
            for c in 0..2 {
                worst_star = worst_star.max((ss.get(slot, c) - sign * xi.get(slot, c)).abs());
            }
        }
        // ⟨ξ,ξ⟩ ≥ 0
        let nrm = inner(&xi, &xi, &g).unwrap();
        if nrm < 0.0 {
            pass = false;
        }
    }
    let split_ok = worst_split <= 1e-12;
    let star_ok = worst_star <= 1e-12;
    let _ = writeln!(
        out,
        "check splitting_identity worst={worst_split} pass={split_ok}"
    );
    let _ = writeln!(
        out,
        "check hodge_involution worst={worst_star} pass={star_ok}"
    );
    pass &= split_ok && star_ok;

    let _ = writeln!(out, "result = {}", if pass { "PASS" } else { "FAIL" });
    SelftestOutcome { report: out, pass }
}
