//! Convex minimization of the variable-exponent energy, the exact p = 2
//! linear solve, and Coulomb-gauge potential reconstruction via discrete
//! div–curl least squares.

use crate::cochain::{coboundary, coboundary_transpose, Cochain};
use crate::error::{Error, Result};
use crate::exterior::inner;
use crate::mesh::{MetricMode, SimplicialComplex};
use crate::model::{BoundaryMode, EnergyModel};
use crate::sparse::{cg_solve, dot, Csr};
use crate::whitney::{CellBasis, MassOperator};

/// Regularization floor substituted when μ = 0 meets p < 2.
pub const MU_EFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precond {
    None,
    P2Laplace,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// relative gradient tolerance: stop at ‖g‖ ≤ tol·(1 + ‖g(0)‖)
    pub grad_tol: f64,
    pub max_iters: usize,
    /// backtracking shrink factor in (0,1)
    pub ls_backtrack: f64,
    /// Armijo sufficient-decrease constant in (0,1)
    pub ls_c1: f64,
    pub precond: Precond,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grad_tol: 1e-9,
            max_iters: 50_000,
            ls_backtrack: 0.5,
            ls_c1: 1e-4,
            precond: Precond::None,
            seed: 0,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::Solver("gradient tolerance must be positive".into()));
        }
        if !(self.ls_backtrack > 0.0 && self.ls_backtrack < 1.0)
            || !(self.ls_c1 > 0.0 && self.ls_c1 < 1.0)
        {
            return Err(Error::Solver(
                "line-search factors must lie in (0,1)".into(),
            ));
        }
        Ok(())
    }
}

/// Minimizer record: potential ū = u₀ + v, field ω = dū, and convergence
/// metadata. The Coulomb representative is attached separately.
#[derive(Debug, Clone)]
pub struct Solution {
    pub u_bar: Cochain,
    pub omega: Cochain,
    pub energy: f64,
    pub grad_norm: f64,
    pub initial_grad_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// μ actually used by the iteration (MU_EFF substitution when μ = 0, p⁻ < 2)
    pub mu_used: f64,
    /// K₀ = ∫|ω|^{p(x)} dV + 1
    pub k0: f64,
    pub flags: Vec<String>,
}

fn l2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Minimizes I over the admissible set by nonlinear conjugate gradients
/// (Polak–Ribière⁺) with a secant-initialized Armijo backtracking search.
pub fn minimize(model: &EnergyModel, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let complex = model.complex();
    let mut flags = Vec::new();
    let mu_used = if model.mu() == 0.0 && model.exponent().p_minus() < 2.0 {
        flags.push(format!("mu regularized: 0 -> {MU_EFF:e} (p_minus < 2)"));
        MU_EFF
    } else {
        model.mu()
    };
    let em;
    let eval: &EnergyModel = if mu_used != model.mu() {
        em = model.with_mu(mu_used);
        &em
    } else {
        model
    };

    let precond = match cfg.precond {
        Precond::None => None,
        Precond::P2Laplace => Some(P2Preconditioner::build(eval)?),
    };

    let mut v = Cochain::zero(complex, model.degree(), model.vec_dim());
    let mut g = eval.energy_gradient(&v)?;
    let g0_norm = l2(g.values());
    let target = cfg.grad_tol * (1.0 + g0_norm);
    let mut z = apply_precond(&precond, eval, &g)?;
    let mut d = z.clone();
    d.scale(-1.0);
    let mut energy = eval.total_energy(&v)?;
    let restart_every = (v.values().len()).max(100);
    let mut iterations = 0;
    let mut converged = l2(g.values()) <= target;

    while !converged && iterations < cfg.max_iters {
        let mut dirder = dot(g.values(), d.values());
        if dirder >= 0.0 {
            // not a descent direction: restart on steepest descent
            d = z.clone();
            d.scale(-1.0);
            dirder = dot(g.values(), d.values());
            if dirder >= 0.0 {
                flags.push("stalled: no descent direction".into());
                break;
            }
        }
        let (alpha, e_new) = match line_search(eval, &v, &d, &g, energy, dirder, cfg) {
            Ok(pair) => pair,
            Err(Error::Solver(msg)) if msg.contains("stalled") => {
                flags.push(msg);
                break;
            }
            Err(e) => return Err(e),
        };
        v.add_scaled(&d, alpha);
        let g_new = eval.energy_gradient(&v)?;
        let z_new = apply_precond(&precond, eval, &g_new)?;
        iterations += 1;
        let gnorm = l2(g_new.values());
        if gnorm <= target {
            g = g_new;
            energy = e_new;
            converged = true;
            break;
        }
        let beta = if iterations % restart_every == 0 {
            0.0
        } else {
            let mut diff = g_new.clone();
            diff.add_scaled(&g, -1.0);
            let denom = dot(z.values(), g.values());
            if denom <= 0.0 {
                0.0
            } else {
                (dot(z_new.values(), diff.values()) / denom).max(0.0)
            }
        };
        let mut d_next = z_new.clone();
        d_next.scale(-1.0);
        d_next.add_scaled(&d, beta);
        d = d_next;
        g = g_new;
        z = z_new;
        energy = e_new;
    }
    if !converged && iterations >= cfg.max_iters {
        flags.push(format!("not converged within {} iterations", cfg.max_iters));
    }

    finish_solution(
        model,
        v,
        energy,
        l2(g.values()),
        g0_norm,
        iterations,
        converged,
        mu_used,
        flags,
    )
}

#[allow(clippy::too_many_arguments)]
fn finish_solution(
    model: &EnergyModel,
    v: Cochain,
    _energy_eval: f64,
    grad_norm: f64,
    initial_grad_norm: f64,
    iterations: usize,
    converged: bool,
    mu_used: f64,
    mut flags: Vec<String>,
) -> Result<Solution> {
    let complex = model.complex();
    let mut u_bar = model.base_datum().clone();
    u_bar.add_scaled(&model.mask(&v), 1.0);
    let omega = coboundary(complex, &u_bar)?;
    let energy = model.total_energy(&v)?;
    let k0 = crate::whitney::modular(complex, &omega, model.exponent())? + 1.0;
    if model.boundary() == BoundaryMode::NeumannNatural && model.degree() == 0 {
        flags.push(
            "pure-Neumann degree-0 problem: potential determined up to an additive constant".into(),
        );
    }
    Ok(Solution {
        u_bar,
        omega,
        energy,
        grad_norm,
        initial_grad_norm,
        iterations,
        converged,
        mu_used,
        k0,
        flags,
    })
}

fn line_search(
    model: &EnergyModel,
    v: &Cochain,
    d: &Cochain,
    g: &Cochain,
    energy: f64,
    dirder: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let dnorm = l2(d.values());
    if dnorm == 0.0 {
        return Err(Error::Solver("line search stalled: zero direction".into()));
    }
    // secant estimate of the directional curvature; exact step on quadratics
    let probe = 1e-7 * (1.0 + l2(v.values())) / dnorm;
    let mut vp = v.clone();
    vp.add_scaled(d, probe);
    let gp = model.energy_gradient(&vp)?;
    let mut diff = gp;
    diff.add_scaled(g, -1.0);
    let curv = dot(diff.values(), d.values()) / probe;
    let mut alpha = if curv > 0.0 && curv.is_finite() {
        -dirder / curv
    } else {
        1.0 / dnorm
    };
    if !alpha.is_finite() || alpha <= 0.0 {
        alpha = 1.0 / dnorm;
    }
    // near the minimum the true decrease sinks below the rounding floor of
    // the energy sum; the guard keeps such steps acceptable
    let guard = 1e-14 * (1.0 + energy.abs());
    for _ in 0..80 {
        let mut vt = v.clone();
        vt.add_scaled(d, alpha);
        let e_try = model.total_energy(&vt)?;
        if !e_try.is_finite() {
            return Err(Error::Solver(
                "line search produced a non-finite energy".into(),
            ));
        }
        if e_try <= energy + cfg.ls_c1 * alpha * dirder + guard {
            return Ok((alpha, e_try));
        }
        alpha *= cfg.ls_backtrack;
        if alpha * dnorm < 1e-17 * (1.0 + l2(v.values())) {
            break;
        }
    }
    Err(Error::Solver(
        "line search stalled: no acceptable step".into(),
    ))
}

struct P2Preconditioner {
    quad: Csr,
}

impl P2Preconditioner {
    fn build(model: &EnergyModel) -> Result<Self> {
        Ok(P2Preconditioner {
            quad: assemble_flux_quadrature(model.complex(), model.flux_basis(), |c| {
                model.complex().cell_volume(c) * model.weight().value(c)
            })?,
        })
    }
}

fn apply_precond(
    p: &Option<P2Preconditioner>,
    model: &EnergyModel,
    g: &Cochain,
) -> Result<Cochain> {
    match p {
        None => Ok(g.clone()),
        Some(pre) => {
            let complex = model.complex();
            let k = model.degree();
            let nc = g.vec_dim();
            let count = complex.num_simplices(k);
            let mut out = Cochain::zero(complex, k, nc);
            let mut b = vec![0.0; count];
            for c in 0..nc {
                for i in 0..count {
                    b[i] = g.get(i, c);
                }
                let apply = |x: &[f64], y: &mut [f64]| {
                    let mut xm = x.to_vec();
                    mask_slice(model, complex, k, &mut xm);
                    let mut up = vec![0.0; complex.num_simplices(k + 1)];
                    d_apply(complex, k, &xm, &mut up);
                    let qu = pre.quad.matvec_alloc(&up);
                    let mut down = vec![0.0; count];
                    dt_apply(complex, k, &qu, &mut down);
                    mask_slice(model, complex, k, &mut down);
                    y.copy_from_slice(&down);
                };
                let (x, _) = cg_solve(apply, &b, 1e-8, 400)?;
                for i in 0..count {
                    out.set(i, c, x[i]);
                }
            }
            model.mask_in_place(&mut out);
            Ok(out)
        }
    }
}

fn mask_slice(model: &EnergyModel, complex: &SimplicialComplex, k: usize, x: &mut [f64]) {
    if model.boundary() == BoundaryMode::DirichletTangential {
        for i in 0..x.len() {
            if complex.is_boundary(k, i) {
                x[i] = 0.0;
            }
        }
    }
}

/// Scalar-slice coboundary y = D x for degree k → k+1.
fn d_apply(complex: &SimplicialComplex, k: usize, x: &[f64], y: &mut [f64]) {
    let count = complex.num_simplices(k + 1);
    for t in 0..count {
        let faces = complex.simplex_faces(k + 1, t);
        let mut s = 0.0;
        for (j, &f) in faces.iter().enumerate() {
            if j % 2 == 0 {
                s += x[f];
            } else {
                s -= x[f];
            }
        }
        y[t] = s;
    }
}

/// Scalar-slice transpose y = Dᵀ x for degree k+1 → k.
fn dt_apply(complex: &SimplicialComplex, k: usize, x: &[f64], y: &mut [f64]) {
    y.fill(0.0);
    for t in 0..complex.num_simplices(k + 1) {
        let faces = complex.simplex_faces(k + 1, t);
        let xt = x[t];
        if xt == 0.0 {
            continue;
        }
        for (j, &f) in faces.iter().enumerate() {
            if j % 2 == 0 {
                y[f] += xt;
            } else {
                y[f] -= xt;
            }
        }
    }
}

/// One-point-quadrature pairing on (k+1)-cochains: Q[i,j] = Σ_c s(c) ⟨W_i, W_j⟩_{g_c},
/// with a caller-supplied per-cell scale (typically w_c·a_c).
fn assemble_flux_quadrature<F: Fn(usize) -> f64 + Sync>(
    complex: &SimplicialComplex,
    basis: &CellBasis,
    scale: F,
) -> Result<Csr> {
    let count = complex.num_simplices(basis.degree());
    let per_cell = crate::exec::map_collect(complex.num_cells(), |c| {
        let g = complex.cell_metric(c);
        let s = scale(c);
        let entries = basis.cell_entries(c);
        let mut trip = Vec::with_capacity(entries.len() * entries.len());
        for (gi, ci) in entries {
            let mut fi = crate::exterior::FormValue::zero(complex.dim(), basis.degree(), 1);
            fi.coeffs_mut().copy_from_slice(ci);
            for (gj, cj) in entries {
                let mut fj = crate::exterior::FormValue::zero(complex.dim(), basis.degree(), 1);
                fj.coeffs_mut().copy_from_slice(cj);
                trip.push((*gi, *gj, s * inner(&fi, &fj, g).expect("well-formed")));
            }
        }
        trip
    });
    let mut triplets = Vec::new();
    for t in per_cell {
        triplets.extend(t);
    }
    Ok(Csr::from_triplets(count, count, triplets))
}

/// Exact solve of the p ≡ 2 quadratic energy by conjugate gradients on the
/// SPD normal equations.
pub fn linear_hodge_solve(model: &EnergyModel, cfg: &SolverConfig) -> Result<Solution> {
    cfg.validate()?;
    let p = model.exponent();
    if (p.p_minus() - 2.0).abs() > 1e-12 || (p.p_plus() - 2.0).abs() > 1e-12 {
        return Err(Error::Solver(format!(
            "linear Hodge solve requires p ≡ 2, got [{}, {}]",
            p.p_minus(),
            p.p_plus()
        )));
    }
    let complex = model.complex();
    let k = model.degree();
    let nc = model.vec_dim();
    let count = complex.num_simplices(k);
    let quad = assemble_flux_quadrature(complex, model.flux_basis(), |c| {
        complex.cell_volume(c) * model.weight().value(c)
    })?;
    let du0 = coboundary(complex, model.base_datum())?;
    let mut v = Cochain::zero(complex, k, nc);
    let mut iterations = 0;
    let mut converged = true;
    let up_count = complex.num_simplices(k + 1);
    for comp in 0..nc {
        // rhs = P Dᵀ (M F − Q D u₀)
        let mut rhs_up = vec![0.0; up_count];
        for i in 0..up_count {
            rhs_up[i] = model.source_weighted().get(i, comp);
        }
        let mut du0_s = vec![0.0; up_count];
        for i in 0..up_count {
            du0_s[i] = du0.get(i, comp);
        }
        let qdu0 = quad.matvec_alloc(&du0_s);
        for i in 0..up_count {
            rhs_up[i] -= qdu0[i];
        }
        let mut rhs = vec![0.0; count];
        dt_apply(complex, k, &rhs_up, &mut rhs);
        mask_slice(model, complex, k, &mut rhs);
        let apply = |x: &[f64], y: &mut [f64]| {
            let mut xm = x.to_vec();
            mask_slice(model, complex, k, &mut xm);
            let mut up = vec![0.0; up_count];
            d_apply(complex, k, &xm, &mut up);
            let qu = quad.matvec_alloc(&up);
            dt_apply(complex, k, &qu, y);
            mask_slice(model, complex, k, y);
        };
        let (x, outcome) = cg_solve(apply, &rhs, 1e-13, 60 * count + 500)?;
        if outcome.relative_residual > 1e-10 {
            converged = false;
        }
        iterations = iterations.max(outcome.iterations);
        for i in 0..count {
            v.set(i, comp, x[i]);
        }
    }
    let grad = model.energy_gradient(&v)?;
    let flags = if converged {
        Vec::new()
    } else {
        vec!["linear solve did not reach the requested residual".into()]
    };
    finish_solution(
        model,
        v,
        0.0,
        l2(grad.values()),
        l2(grad.values()),
        iterations,
        converged,
        model.mu(),
        flags,
    )
}

/// Trace condition for the div–curl problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// ν∧u prescribed (tangential / Dirichlet-type); enforced strongly by
    /// masking boundary DOFs, with the d*-residual tested on interior forms.
    Tangential,
    /// ν⌟u = 0 weakly (normal / Neumann-type) via the full adjoint.
    Normal,
}

#[derive(Debug, Clone)]
pub struct DivCurlSolution {
    pub u: Cochain,
    /// ‖du − f‖_M / (1 + ‖f‖_M)
    pub du_residual: f64,
    /// dual-norm residual of d*u − w on the tested space
    pub dstar_residual: f64,
    pub iterations: usize,
    pub flags: Vec<String>,
}

/// Solves du = f, d*u = w with the requested trace, as an SPD least-squares
/// system ‖du−f‖²_M + ‖d*u−w‖²_M minimized by conjugate gradients.
pub fn div_curl_solve(
    complex: &SimplicialComplex,
    degree: usize,
    f: Option<&Cochain>,
    w: Option<&Cochain>,
    trace: TraceMode,
    datum: Option<&Cochain>,
    metric: MetricMode,
) -> Result<DivCurlSolution> {
    let n = complex.dim();
    let k = degree;
    if k > n {
        return Err(Error::Degree(format!(
            "div–curl degree {k} above mesh dimension {n}"
        )));
    }
    let nc = match (f, w, datum) {
        (Some(f), _, _) => f.vec_dim(),
        (None, Some(w), _) => w.vec_dim(),
        (None, None, Some(d)) => d.vec_dim(),
        _ => {
            return Err(Error::Incompatible(
                "div–curl needs at least one of f, w, datum".into(),
            ))
        }
    };
    if let Some(f) = f {
        if f.degree() != k + 1 || k == n {
            return Err(Error::Degree("f must be a (k+1)-cochain".into()));
        }
    }
    if let Some(w) = w {
        if k == 0 || w.degree() + 1 != k {
            return Err(Error::Degree("w must be a (k−1)-cochain".into()));
        }
    }
    let mass_k = MassOperator::assemble(complex, k, metric)?;
    let mass_up = if k < n {
        Some(MassOperator::assemble(complex, k + 1, metric)?)
    } else {
        None
    };
    let mass_down = if k >= 1 {
        Some(MassOperator::assemble(complex, k - 1, metric)?)
    } else {
        None
    };

    let mut flags = Vec::new();
    // shift by the datum: solve for z with u = datum + z and zero trace data
    let mut f_eff: Option<Cochain> = f.cloned();
    if let (Some(d), true) = (datum, k < n) {
        let dd = coboundary(complex, d)?;
        match &mut f_eff {
            Some(fe) => fe.add_scaled(&dd, -1.0),
            None => {
                let mut neg = dd;
                neg.scale(-1.0);
                f_eff = Some(neg);
            }
        }
    }

    // closedness check df = 0
    if let Some(fe) = &f_eff {
        if fe.degree() < n {
            let dfe = coboundary(complex, fe)?;
            let r = dfe.l2();
            if r > 1e-10 * (1.0 + fe.l2()) {
                return Err(Error::Incompatible(format!("df ≠ 0: residual {r:e}")));
            }
        }
    }
    // co-closedness check d*w = 0, tested as the covector D_{k−2}ᵀ M w
    if let (Some(w), true) = (w, k >= 2) {
        let mw = mass_down.as_ref().unwrap().apply(w);
        let r = coboundary_transpose(complex, &mw)?.l2();
        if r > 1e-10 * (1.0 + w.l2()) {
            return Err(Error::Incompatible(format!("d*w ≠ 0: residual {r:e}")));
        }
    }

    // compatibility integrals, checked and enforced by projection
    if trace == TraceMode::Tangential && k == n - 1 {
        if let Some(fe) = &mut f_eff {
            let vol = complex.total_volume();
            for comp in 0..nc {
                let total: f64 = (0..complex.num_cells())
                    .map(|c| complex.cell_orientation(c) as f64 * fe.get(c, comp))
                    .sum();
                if total.abs() > 1e-12 * (1.0 + fe.l2()) {
                    for c in 0..complex.num_cells() {
                        let adj =
                            complex.cell_orientation(c) as f64 * complex.cell_volume(c) * total
                                / vol;
                        fe.set(c, comp, fe.get(c, comp) - adj);
                    }
                    flags.push(format!("projected incompatible volume component {total:e} from f (component {comp})"));
                }
            }
        }
    }
    let mut w_eff: Option<Cochain> = w.cloned();
    if trace == TraceMode::Normal && k == 1 {
        if let Some(we) = &mut w_eff {
            let m0 = mass_down.as_ref().unwrap();
            let vol = complex.total_volume();
            let ones = Cochain::from_values(0, 1, vec![1.0; complex.num_simplices(0)]).unwrap();
            let m_ones = m0.apply(&ones);
            for comp in 0..nc {
                let total: f64 = (0..we.len())
                    .map(|i| m_ones.get(i, 0) * we.get(i, comp))
                    .sum();
                if total.abs() > 1e-12 * (1.0 + we.l2()) {
                    for i in 0..we.len() {
                        we.set(i, comp, we.get(i, comp) - total / vol);
                    }
                    flags.push(format!(
                        "projected incompatible mean {total:e} from w (component {comp})"
                    ));
                }
            }
        }
    }

    let count = complex.num_simplices(k);
    let up_count = if k < n {
        complex.num_simplices(k + 1)
    } else {
        0
    };
    let down_count = if k >= 1 {
        complex.num_simplices(k - 1)
    } else {
        0
    };
    let tangential = trace == TraceMode::Tangential;
    let mask = |x: &mut [f64]| {
        if tangential {
            for i in 0..x.len() {
                if complex.is_boundary(k, i) {
                    x[i] = 0.0;
                }
            }
        }
    };
    let mask_down = |x: &mut [f64]| {
        if tangential && k >= 1 {
            for i in 0..x.len() {
                if complex.is_boundary(k - 1, i) {
                    x[i] = 0.0;
                }
            }
        }
    };
    // restricted (interior) mass solve for the tangential mode; full solve
    // for the normal mode
    let down_solve = |rhs: &[f64]| -> Result<Vec<f64>> {
        let m = mass_down.as_ref().unwrap().matrix();
        let apply = |x: &[f64], y: &mut [f64]| {
            if tangential {
                let mut xm = x.to_vec();
                mask_down(&mut xm);
                m.matvec(&xm, y);
                mask_down(y);
                for i in 0..x.len() {
                    if complex.is_boundary(k - 1, i) {
                        y[i] += x[i];
                    }
                }
            } else {
                m.matvec(x, y);
            }
        };
        let (x, _) = cg_solve(apply, rhs, 1e-13, 60 * down_count + 500)?;
        Ok(x)
    };

    let mut u = Cochain::zero(complex, k, nc);
    let mut iterations = 0;
    for comp in 0..nc {
        // rhs = P[Dᵀ M f' + B M̃⁻¹ (M_{k−1} w − Bᵀ u₀)] with B = M_k D_{k−1}
        let mut rhs = vec![0.0; count];
        if let (Some(fe), Some(mu_)) = (&f_eff, &mass_up) {
            let mut fs = vec![0.0; up_count];
            for i in 0..up_count {
                fs[i] = fe.get(i, comp);
            }
            let mf = mu_.matrix().matvec_alloc(&fs);
            let mut tmp = vec![0.0; count];
            dt_apply(complex, k, &mf, &mut tmp);
            for i in 0..count {
                rhs[i] += tmp[i];
            }
        }
        if k >= 1 {
            // t = M_{k−1} w − D_{k−1}ᵀ M_k u₀
            let mut t = vec![0.0; down_count];
            if let Some(we) = &w_eff {
                let mut ws = vec![0.0; down_count];
                for i in 0..down_count {
                    ws[i] = we.get(i, comp);
                }
                let mw = mass_down.as_ref().unwrap().matrix().matvec_alloc(&ws);
                t.copy_from_slice(&mw);
            }
            if let Some(d0) = datum {
                let mut ds = vec![0.0; count];
                for i in 0..count {
                    ds[i] = d0.get(i, comp);
                }
                let md = mass_k.matrix().matvec_alloc(&ds);
                let mut bt = vec![0.0; down_count];
                dt_apply(complex, k - 1, &md, &mut bt);
                for i in 0..down_count {
                    t[i] -= bt[i];
                }
            }
            mask_down(&mut t);
            let y = down_solve(&t)?;
            let mut ym = y;
            mask_down(&mut ym);
            let mut dy = vec![0.0; count];
            d_apply(complex, k - 1, &ym, &mut dy);
            let bdy = mass_k.matrix().matvec_alloc(&dy);
            for i in 0..count {
                rhs[i] += bdy[i];
            }
        }
        mask(&mut rhs);

        let apply = |x: &[f64], y: &mut [f64]| {
            let mut xm = x.to_vec();
            mask(&mut xm);
            y.fill(0.0);
            if let Some(mu_) = &mass_up {
                let mut up = vec![0.0; up_count];
                d_apply(complex, k, &xm, &mut up);
                let mup = mu_.matrix().matvec_alloc(&up);
                let mut down = vec![0.0; count];
                dt_apply(complex, k, &mup, &mut down);
                for i in 0..count {
                    y[i] += down[i];
                }
            }
            if k >= 1 {
                let mx = mass_k.matrix().matvec_alloc(&xm);
                let mut t = vec![0.0; down_count];
                dt_apply(complex, k - 1, &mx, &mut t);
                mask_down(&mut t);
                let s = down_solve(&t).expect("inner mass solve");
                let mut sm = s;
                mask_down(&mut sm);
                let mut ds = vec![0.0; count];
                d_apply(complex, k - 1, &sm, &mut ds);
                let bds = mass_k.matrix().matvec_alloc(&ds);
                for i in 0..count {
                    y[i] += bds[i];
                }
            }
            mask(y);
        };
        let (x, outcome) = cg_solve(apply, &rhs, 1e-12, 80 * count + 1000)?;
        iterations = iterations.max(outcome.iterations);
        for i in 0..count {
            u.set(i, comp, x[i]);
        }
    }
    if tangential {
        let mut masked = u.clone();
        crate::cochain::mask_tangential(complex, &mut masked);
        u = masked;
    }
    if let Some(d0) = datum {
        u.add_scaled(d0, 1.0);
    }

    // pure-Neumann degree-0: fix the additive constant by the weighted mean
    if trace == TraceMode::Normal && k == 0 {
        let vol = complex.total_volume();
        let ones = Cochain::from_values(0, 1, vec![1.0; count]).unwrap();
        let m_ones = mass_k.apply(&ones);
        for comp in 0..nc {
            let mean: f64 = (0..count)
                .map(|i| m_ones.get(i, 0) * u.get(i, comp))
                .sum::<f64>()
                / vol;
            for i in 0..count {
                u.set(i, comp, u.get(i, comp) - mean);
            }
        }
        flags.push("additive constant fixed by mean-zero".into());
    }

    // residual report
    let du_residual = if let (Some(f0), Some(mu_)) = (f, &mass_up) {
        let mut r = coboundary(complex, &u)?;
        r.add_scaled(f0, -1.0);
        mu_.norm(&r) / (1.0 + mu_.norm(f0))
    } else {
        0.0
    };
    let dstar_residual = if k >= 1 {
        let mut t = coboundary_transpose(complex, &mass_k.apply(&u))?;
        if let Some(w0) = w {
            let mw = mass_down.as_ref().unwrap().apply(w0);
            t.add_scaled(&mw, -1.0);
        }
        let mut worst = 0.0f64;
        let md = mass_down.as_ref().unwrap();
        for comp in 0..nc {
            let mut ts = vec![0.0; down_count];
            for i in 0..down_count {
                ts[i] = t.get(i, comp);
            }
            mask_down(&mut ts);
            let y = down_solve(&ts)?;
            let my = md.matrix().matvec_alloc(&y);
            let norm2 = dot(&y, &my).max(0.0);
            worst = worst.max(norm2.sqrt());
        }
        worst
    } else {
        0.0
    };

    Ok(DivCurlSolution {
        u,
        du_residual,
        dstar_residual,
        iterations,
        flags,
    })
}

/// Coulomb-gauge potential for an exact field: dũ = ω, d*₀ũ = 0, ν⌟₀ũ = 0,
/// with the gauge operators taken in the Euclidean metric.
#[derive(Debug, Clone)]
pub struct CoulombPotential {
    pub u_tilde: Cochain,
    /// ‖d*ũ‖ in the gauge metric (0 for degree-0 potentials after mean-zero)
    pub gauge_residual: f64,
    pub du_residual: f64,
    pub flags: Vec<String>,
}

pub fn coulomb_potential(complex: &SimplicialComplex, omega: &Cochain) -> Result<CoulombPotential> {
    if omega.degree() == 0 || omega.degree() > complex.dim() {
        return Err(Error::Degree(
            "Coulomb potential needs a field of degree 1..=n".into(),
        ));
    }
    let k = omega.degree() - 1;
    if omega.degree() < complex.dim() {
        let r = coboundary(complex, omega)?.l2();
        if r > 1e-9 * (1.0 + omega.l2()) {
            return Err(Error::Incompatible(format!(
                "field is not closed (dω residual {r:e}); reconstruction unsupported"
            )));
        }
    }
    let w_zero = if k >= 1 {
        Some(Cochain::zero(complex, k - 1, omega.vec_dim()))
    } else {
        None
    };
    let sol = div_curl_solve(
        complex,
        k,
        Some(omega),
        w_zero.as_ref(),
        TraceMode::Normal,
        None,
        MetricMode::Euclidean,
    )?;
    Ok(CoulombPotential {
        u_tilde: sol.u,
        gauge_residual: sol.dstar_residual,
        du_residual: sol.du_residual,
        flags: sol.flags,
    })
}
