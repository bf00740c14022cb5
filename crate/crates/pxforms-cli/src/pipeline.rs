//! The batch pipeline: build mesh and fields from a config, minimize,
//! gauge-fix, run diagnostics, and write the report tree.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use pxforms::cochain::Cochain;
use pxforms::diagnostics::{
    algebra_suite, ball_pairs, campanato_fit, interior_lattice, meyers_probe, morrey_fit,
    uhlenbeck_check, AlgebraReport, AlgebraSuiteConfig, CellField, DecayFit, RegularityReport,
    XiChoice,
};
use pxforms::exterior::{binomial, index_tuples, FormValue};
use pxforms::model::{exponent_moduli, BoundaryMode, EnergyModel, ExponentField, WeightField};
use pxforms::solver::{
    coulomb_potential, minimize, CoulombPotential, Precond, Solution, SolverConfig,
};
use pxforms::{dyadic_radii, Error, Result, SimplicialComplex};

use crate::config::{BoundaryKind, Config, FormSpec, MeshSource, ScalarSpec, UhlenbeckMode};
use crate::expr::Expr;

pub struct RunArtifacts {
    pub solution: Solution,
    pub coulomb: CoulombPotential,
    pub regularity: RegularityReport,
    pub algebra: Option<AlgebraReport>,
    pub report_dir: PathBuf,
}

pub fn build_mesh_from_spec(spec: &str) -> Result<SimplicialComplex> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[0] {
        "interval" => {
            let m = gen_size(&parts, 1)?;
            let (lo, hi) = match parts.get(2) {
                None => (0.0, 1.0),
                Some(b) => {
                    let v = parse_bounds(b, 2)?;
                    (v[0], v[1])
                }
            };
            pxforms::meshgen::interval_mesh(m, lo, hi)
        }
        "square" => {
            let m = gen_size(&parts, 1)?;
            let bounds = match parts.get(2) {
                None => [0.0, 1.0, 0.0, 1.0],
                Some(b) => {
                    let v = parse_bounds(b, 4)?;
                    [v[0], v[1], v[2], v[3]]
                }
            };
            pxforms::meshgen::square_mesh(m, bounds)
        }
        "cube" => {
            let m = gen_size(&parts, 1)?;
            let bounds = match parts.get(2) {
                None => [0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
                Some(b) => {
                    let v = parse_bounds(b, 6)?;
                    [v[0], v[1], v[2], v[3], v[4], v[5]]
                }
            };
            pxforms::meshgen::cube_mesh(m, bounds)
        }
        "disk" => {
            let m = gen_size(&parts, 1)?;
            pxforms::meshgen::disk_mesh(m)
        }
        other => Err(Error::Mesh(format!("unknown mesh generator `{other}`"))),
    }
}

fn gen_size(parts: &[&str], idx: usize) -> Result<usize> {
    parts.get(idx).and_then(|t| t.parse().ok()).ok_or_else(|| {
        Error::Mesh(format!(
            "generator spec needs a size, got `{}`",
            parts.join(":")
        ))
    })
}

fn parse_bounds(text: &str, n: usize) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> =
        text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let v = v.map_err(|_| Error::Mesh(format!("bad generator bounds `{text}`")))?;
    if v.len() != n {
        return Err(Error::Mesh(format!("expected {n} bounds, got {}", v.len())));
    }
    Ok(v)
}

fn build_mesh(cfg: &Config) -> Result<SimplicialComplex> {
    match &cfg.mesh {
        MeshSource::Generator(spec) => build_mesh_from_spec(spec),
        MeshSource::File(path) => pxforms::io::read_mesh(path),
    }
}

fn build_scalar(complex: &SimplicialComplex, spec: &ScalarSpec, what: &str) -> Result<Vec<f64>> {
    match spec {
        ScalarSpec::Const(c) => Ok(vec![*c; complex.num_cells()]),
        ScalarSpec::File(path) => pxforms::io::read_field(path, complex.num_cells()),
        ScalarSpec::Expr(text) => {
            let e = Expr::parse(text)
                .map_err(|err| Error::Field(format!("{what} expression: {err}")))?;
            if let Some(mc) = e.max_coord() {
                if mc >= complex.dim() {
                    return Err(Error::Field(format!(
                        "{what} expression references x{} on a {}-dimensional mesh",
                        mc + 1,
                        complex.dim()
                    )));
                }
            }
            Ok((0..complex.num_cells())
                .map(|c| e.eval(complex.cell_barycenter(c)))
                .collect())
        }
    }
}

fn build_form(
    complex: &SimplicialComplex,
    spec: &FormSpec,
    degree: usize,
    vec_dim: usize,
    what: &str,
) -> Result<Cochain> {
    match spec {
        FormSpec::Zero => Ok(Cochain::zero(complex, degree, vec_dim)),
        FormSpec::File(path) => {
            let u = pxforms::io::read_cochain(path)?;
            if u.degree() != degree || u.vec_dim() != vec_dim {
                return Err(Error::Mismatch(format!(
                    "{what} cochain file has degree {} / vecdim {}, expected {degree} / {vec_dim}",
                    u.degree(),
                    u.vec_dim()
                )));
            }
            if u.len() != complex.num_simplices(degree) {
                return Err(Error::Mismatch(format!(
                    "{what} cochain file has {} entries for {} simplices",
                    u.len(),
                    complex.num_simplices(degree)
                )));
            }
            Ok(u)
        }
        FormSpec::Components(comps) => {
            let n = complex.dim();
            let slots = binomial(n, degree);
            if comps.len() != slots {
                return Err(Error::Field(format!(
                    "{what} needs {slots} components for degree {degree} in dimension {n}, got {}",
                    comps.len()
                )));
            }
            let mut parsed: Vec<Vec<Expr>> = Vec::with_capacity(slots);
            for (i, comp) in comps.iter().enumerate() {
                let sub: Vec<&str> = comp
                    .trim()
                    .trim_start_matches('(')
                    .trim_end_matches(')')
                    .split(';')
                    .collect();
                if sub.len() != vec_dim {
                    return Err(Error::Field(format!(
                        "{what} component {i} has {} vector parts, expected {vec_dim}",
                        sub.len()
                    )));
                }
                let exprs: std::result::Result<Vec<Expr>, _> =
                    sub.iter().map(|s| Expr::parse(s.trim())).collect();
                parsed.push(
                    exprs.map_err(|err| Error::Field(format!("{what} component {i}: {err}")))?,
                );
            }
            let tuples = index_tuples(n, degree);
            let _ = &tuples;
            Cochain::from_form_fn(complex, degree, vec_dim, move |x| {
                let mut v = FormValue::zero(n, degree, vec_dim);
                for (slot, comp) in parsed.iter().enumerate() {
                    for (j, e) in comp.iter().enumerate() {
                        v.set(slot, j, e.eval(x));
                    }
                }
                v
            })
        }
    }
}

pub struct Timings {
    entries: Vec<(String, f64)>,
}

impl Timings {
    fn new() -> Self {
        Timings {
            entries: Vec::new(),
        }
    }

    fn record<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.entries
            .push((name.to_string(), t.elapsed().as_secs_f64()));
        out
    }
}

/// Runs the full pipeline. Everything is validated and computed before any
/// output is written, so failures leave no partial output tree.
pub fn run(cfg: &Config, output_override: Option<&Path>) -> Result<RunArtifacts> {
    let mut timings = Timings::new();
    let complex = timings.record("mesh", || build_mesh(cfg))?;
    let k = cfg.degree;
    if k >= complex.dim() {
        return Err(Error::Degree(format!(
            "potential degree {k} must be below the mesh dimension {}",
            complex.dim()
        )));
    }
    let p = ExponentField::from_values(&complex, build_scalar(&complex, &cfg.p, "p")?)?;
    let a = WeightField::from_values(&complex, build_scalar(&complex, &cfg.a, "a")?)?;
    let f = build_form(&complex, &cfg.f, k + 1, cfg.vec_dim, "f")?;
    let u0 = build_form(&complex, &cfg.u0, k, cfg.vec_dim, "u0")?;
    let boundary = match cfg.boundary {
        BoundaryKind::Dirichlet => BoundaryMode::DirichletTangential,
        BoundaryKind::Neumann => BoundaryMode::NeumannNatural,
    };
    let model = EnergyModel::new(
        &complex,
        k,
        cfg.vec_dim,
        cfg.mu,
        p.clone(),
        a,
        f,
        u0,
        boundary,
    )?;
    let solver_cfg = SolverConfig {
        grad_tol: cfg.solver.tol,
        max_iters: cfg.solver.max_iters,
        ls_backtrack: cfg.solver.ls_backtrack,
        ls_c1: cfg.solver.ls_c1,
        precond: if cfg.solver.precond == "p2" {
            Precond::P2Laplace
        } else {
            Precond::None
        },
        seed: cfg.solver.seed,
    };
    let solution = timings.record("solve", || minimize(&model, &solver_cfg))?;
    let coulomb = timings.record("gauge", || coulomb_potential(&complex, &solution.omega))?;

    // diagnostics on ω
    let field = CellField::from_cochain(&complex, &solution.omega)?;
    let radii = dyadic_radii(cfg.diag.rho0, cfg.diag.levels)?;
    let fit_centers = interior_lattice(&complex, cfg.diag.lattice, cfg.diag.rho0);
    let mut regularity = RegularityReport {
        k0: solution.k0,
        ..Default::default()
    };
    let diag_result: Result<()> = timings.record("diagnostics", || {
        if cfg.diag.moduli {
            regularity.moduli = Some(exponent_moduli(&p, &complex, &radii)?);
        }
        if cfg.diag.morrey && !fit_centers.is_empty() {
            regularity.morrey = Some(morrey_fit(&complex, &field, &p, &fit_centers, &radii)?);
        }
        if cfg.diag.campanato && !fit_centers.is_empty() {
            regularity.campanato = Some(campanato_fit(
                &complex,
                &field,
                p.p_minus(),
                &fit_centers,
                &radii,
            )?);
        }
        if cfg.diag.meyers {
            let pairs = ball_pairs(&complex, cfg.diag.radius, cfg.diag.lattice)?;
            let src_field = CellField::from_cochain(&complex, model.source())?;
            regularity.meyers = Some(meyers_probe(
                &complex,
                &field,
                &p,
                Some(&src_field),
                XiChoice::BallMean,
                &cfg.diag.sigma_grid,
                &pairs,
                cfg.diag.c_probe,
            )?);
        }
        if cfg.diag.uhlenbeck == UhlenbeckMode::Auto
            && model.exponent().is_constant()
            && model.source().l2() == 0.0
        {
            let pairs = ball_pairs(&complex, cfg.diag.radius, cfg.diag.lattice)?;
            regularity.uhlenbeck = Some(uhlenbeck_check(&model, &field, &pairs, &radii)?);
        }
        Ok(())
    });
    diag_result?;

    let algebra = if cfg.diag.algebra_samples > 0 {
        let acfg = AlgebraSuiteConfig {
            seed: cfg.diag.seed,
            samples: cfg.diag.algebra_samples,
            ..Default::default()
        };
        Some(timings.record("algebra", || algebra_suite(&acfg)))
    } else {
        None
    };

    // write the output tree
    let report_dir = output_override
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output_dir.clone());
    std::fs::create_dir_all(&report_dir)?;
    std::fs::write(report_dir.join("config_echo.cfg"), cfg.canonical_echo())?;
    pxforms::io::write_cochain(&report_dir.join("u_bar.coch"), &solution.u_bar)?;
    pxforms::io::write_cochain(&report_dir.join("omega.coch"), &solution.omega)?;
    pxforms::io::write_cochain(&report_dir.join("u_tilde.coch"), &coulomb.u_tilde)?;
    let report = render_report(
        cfg,
        &complex,
        &solution,
        &coulomb,
        &regularity,
        algebra.as_ref(),
    );
    std::fs::write(report_dir.join("report.txt"), report)?;
    let mut tl = String::new();
    let _ = writeln!(
        tl,
        "# wall-clock seconds per stage; excluded from determinism guarantees"
    );
    for (name, secs) in &timings.entries {
        let _ = writeln!(tl, "{name} {secs:.6}");
    }
    std::fs::write(report_dir.join("timings.txt"), tl)?;

    Ok(RunArtifacts {
        solution,
        coulomb,
        regularity,
        algebra,
        report_dir,
    })
}

fn worst_fit(fits: &[DecayFit]) -> Option<&DecayFit> {
    fits.iter()
        .filter(|f| !f.degenerate)
        .min_by(|a, b| a.slope.partial_cmp(&b.slope).unwrap())
}

fn render_report(
    cfg: &Config,
    complex: &SimplicialComplex,
    solution: &Solution,
    coulomb: &CoulombPotential,
    reg: &RegularityReport,
    algebra: Option<&AlgebraReport>,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pxforms run report");
    let _ = writeln!(out, "version = {}", pxforms::VERSION);
    let _ = writeln!(out, "config_hash = {}", cfg.hash());
    let _ = writeln!(out, "mesh_dim = {}", complex.dim());
    let _ = writeln!(out, "mesh_vertices = {}", complex.num_vertices());
    let _ = writeln!(out, "mesh_cells = {}", complex.num_cells());
    let _ = writeln!(out, "mesh_volume = {}", complex.total_volume());
    let _ = writeln!(out, "degree = {}", cfg.degree);
    let _ = writeln!(out, "vec_dim = {}", cfg.vec_dim);

    let _ = writeln!(out, "\n[solution]");
    let _ = writeln!(out, "converged = {}", solution.converged);
    let _ = writeln!(out, "energy = {}", solution.energy);
    let _ = writeln!(out, "grad_norm = {}", solution.grad_norm);
    let _ = writeln!(out, "initial_grad_norm = {}", solution.initial_grad_norm);
    let _ = writeln!(out, "iterations = {}", solution.iterations);
    let _ = writeln!(out, "mu_used = {}", solution.mu_used);
    let _ = writeln!(out, "k0 = {}", solution.k0);
    for f in &solution.flags {
        let _ = writeln!(out, "flag = {f}");
    }

    let _ = writeln!(out, "\n[coulomb]");
    let _ = writeln!(out, "gauge_residual = {}", coulomb.gauge_residual);
    let _ = writeln!(out, "du_residual = {}", coulomb.du_residual);
    for f in &coulomb.flags {
        let _ = writeln!(out, "flag = {f}");
    }

    if let Some(m) = &reg.moduli {
        let _ = writeln!(out, "\n[moduli]");
        let _ = writeln!(out, "c_log = {}", m.c_log);
        let _ = writeln!(out, "degenerate = {}", m.degenerate);
        match m.holder_fit {
            Some((ch, a1)) => {
                let _ = writeln!(out, "holder_CH = {ch}");
                let _ = writeln!(out, "holder_alpha1 = {a1}");
            }
            None => {
                let _ = writeln!(out, "holder_CH = none");
            }
        }
        for ((r, th), (_, van)) in m.table.iter().zip(&m.vanishing) {
            let _ = writeln!(out, "theta {r} {th} {van}");
        }
    }

    if let Some(m) = &reg.morrey {
        let _ = writeln!(out, "\n[fit.morrey]");
        let _ = writeln!(out, "worst_slope = {}", m.worst_slope);
        let _ = writeln!(out, "tau = {}", complex.dim() as f64 - m.worst_slope);
        let _ = writeln!(out, "degenerate = {}", m.degenerate);
        for w in &m.warnings {
            let _ = writeln!(out, "warning = {w}");
        }
        if let Some(f) = worst_fit(&m.per_center) {
            let _ = writeln!(out, "r_squared = {}", f.r_squared);
            for &(r, v) in &f.points {
                let fitted = (f.log_intercept + f.slope * r.ln()).exp();
                let _ = writeln!(out, "point {r} {v} {fitted}");
            }
        }
    }

    if let Some(c) = &reg.campanato {
        let _ = writeln!(out, "\n[fit.campanato]");
        let _ = writeln!(out, "beta = {}", c.beta);
        let _ = writeln!(out, "alpha = {}", c.alpha);
        let _ = writeln!(out, "exact = {}", c.exact);
        let _ = writeln!(out, "clamped = {}", c.clamped);
        for w in &c.warnings {
            let _ = writeln!(out, "warning = {w}");
        }
        if let Some(f) = worst_fit(&c.per_center) {
            let _ = writeln!(out, "r_squared = {}", f.r_squared);
            for &(r, v) in &f.points {
                let fitted = (f.log_intercept + f.slope * r.ln()).exp();
                let _ = writeln!(out, "point {r} {v} {fitted}");
            }
        }
    }

    if let Some(p) = &reg.meyers {
        let _ = writeln!(out, "\n[probe.meyers]");
        match p.sigma_star {
            Some(s) => {
                let _ = writeln!(out, "sigma_star = {s}");
            }
            None => {
                let _ = writeln!(out, "sigma_star = none");
            }
        }
        let _ = writeln!(out, "c_probe = {}", p.c_probe);
        for &(s, r) in &p.ratios {
            let _ = writeln!(out, "ratio {s} {r}");
        }
    }

    if let Some(u) = &reg.uhlenbeck {
        let _ = writeln!(out, "\n[uhlenbeck]");
        let _ = writeln!(out, "c1_meas = {}", u.c1_meas);
        let _ = writeln!(out, "beta_meas = {}", u.beta_meas);
    }

    let _ = writeln!(out, "\n[k0]");
    let _ = writeln!(out, "k0 = {}", reg.k0);

    if let Some(a) = algebra {
        let _ = writeln!(out, "\n[algebra]");
        let _ = writeln!(out, "pass = {}", a.pass);
        for c in &a.checks {
            let _ = writeln!(
                out,
                "check {} samples={} violations={} min_margin={}",
                c.name, c.samples, c.violations, c.min_margin
            );
            if c.violations > 0 {
                if let Some(w) = &c.worst {
                    let _ = writeln!(
                        out,
                        "witness {} p={} mu={} xi={:?} eta={:?} lhs={} rhs={}",
                        c.name, w.p, w.mu, w.xi, w.eta, w.lhs, w.rhs
                    );
                }
            }
        }
    }
    out
}

/// Converts report tables into plot-ready CSV files.
pub fn emit_plot_data(report_dir: &Path) -> Result<Vec<PathBuf>> {
    let report_path = report_dir.join("report.txt");
    if !report_path.exists() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("no report.txt in {}", report_dir.display()),
        )));
    }
    let text = std::fs::read_to_string(&report_path)?;
    let mut section = String::new();
    let mut morrey = Vec::new();
    let mut campanato = Vec::new();
    let mut meyers = Vec::new();
    let mut moduli = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].to_string();
            continue;
        }
        let mut toks = line.split_whitespace();
        match (section.as_str(), toks.next()) {
            ("fit.morrey", Some("point")) => {
                morrey.push(toks.map(str::to_string).collect::<Vec<_>>())
            }
            ("fit.campanato", Some("point")) => {
                campanato.push(toks.map(str::to_string).collect::<Vec<_>>())
            }
            ("probe.meyers", Some("ratio")) => {
                meyers.push(toks.map(str::to_string).collect::<Vec<_>>())
            }
            ("moduli", Some("theta")) => moduli.push(toks.map(str::to_string).collect::<Vec<_>>()),
            _ => {}
        }
    }
    let mut written = Vec::new();
    let mut emit = |name: &str, header: &str, rows: &[Vec<String>]| -> Result<()> {
        let path = report_dir.join(name);
        let mut out = String::from(header);
        out.push('\n');
        for row in rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        std::fs::write(&path, out)?;
        written.push(path);
        Ok(())
    };
    emit("morrey.csv", "radius,value,fitted", &morrey)?;
    emit("campanato.csv", "radius,value,fitted", &campanato)?;
    emit("meyers.csv", "sigma,worst_ratio", &meyers)?;
    emit("moduli.csv", "radius,theta,vanishing", &moduli)?;
    Ok(written)
}
