//! Coefficient fields and the variable-exponent energy
//! I[u] = ∫ [ (a(x)/p(x)) (μ² + |du|²)^{p(x)/2} − ⟨F, du⟩ ] dV,
//! with its gradient and exponent-regularity diagnostics.

use crate::cochain::{coboundary, coboundary_transpose, mask_tangential, Cochain};
use crate::error::{Error, Result};
use crate::exec;
use crate::exterior::{inner, FormValue, MetricTensor};
use crate::mesh::{MetricMode, SimplicialComplex};
use crate::whitney::{CellBasis, MassOperator};

/// Per-top-cell exponent samples with observed bounds, 1 < p⁻ ≤ p⁺ < ∞.
#[derive(Debug, Clone)]
pub struct ExponentField {
    values: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
}

impl ExponentField {
    pub fn from_values(complex: &SimplicialComplex, values: Vec<f64>) -> Result<Self> {
        if values.len() != complex.num_cells() {
            return Err(Error::Field(format!(
                "exponent field has {} samples for {} cells",
                values.len(),
                complex.num_cells()
            )));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::Field(
                    "exponent field holds a non-finite sample".into(),
                ));
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(lo > 1.0) {
            return Err(Error::Field(format!(
                "exponent bound violated: requires p⁻ > 1, got p⁻ = {lo}"
            )));
        }
        Ok(ExponentField {
            values,
            p_minus: lo,
            p_plus: hi,
        })
    }

    pub fn constant(complex: &SimplicialComplex, p: f64) -> Result<Self> {
        Self::from_values(complex, vec![p; complex.num_cells()])
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(complex: &SimplicialComplex, f: F) -> Result<Self> {
        let values = (0..complex.num_cells())
            .map(|c| f(complex.cell_barycenter(c)))
            .collect();
        Self::from_values(complex, values)
    }

    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn is_constant(&self) -> bool {
        self.p_plus == self.p_minus
    }

    /// Conjugate exponent p/(p−1) at a cell.
    pub fn conjugate(&self, cell: usize) -> f64 {
        let p = self.values[cell];
        p / (p - 1.0)
    }
}

/// Per-top-cell weight samples with observed bounds, 0 < a⁻ ≤ a⁺ < ∞.
#[derive(Debug, Clone)]
pub struct WeightField {
    values: Vec<f64>,
    a_minus: f64,
    a_plus: f64,
}

impl WeightField {
    pub fn from_values(complex: &SimplicialComplex, values: Vec<f64>) -> Result<Self> {
        if values.len() != complex.num_cells() {
            return Err(Error::Field(format!(
                "weight field has {} samples for {} cells",
                values.len(),
                complex.num_cells()
            )));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &values {
            if !v.is_finite() {
                return Err(Error::Field(
                    "weight field holds a non-finite sample".into(),
                ));
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !(lo > 0.0) {
            return Err(Error::Field(format!(
                "weight bound violated: requires a⁻ > 0, got a⁻ = {lo}"
            )));
        }
        Ok(WeightField {
            values,
            a_minus: lo,
            a_plus: hi,
        })
    }

    pub fn constant(complex: &SimplicialComplex, a: f64) -> Result<Self> {
        Self::from_values(complex, vec![a; complex.num_cells()])
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(complex: &SimplicialComplex, f: F) -> Result<Self> {
        let values = (0..complex.num_cells())
            .map(|c| f(complex.cell_barycenter(c)))
            .collect();
        Self::from_values(complex, values)
    }

    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn a_minus(&self) -> f64 {
        self.a_minus
    }

    pub fn a_plus(&self) -> f64 {
        self.a_plus
    }
}

/// Boundary condition for the minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryMode {
    /// tv = 0 enforced on the variable part (Dirichlet).
    DirichletTangential,
    /// no constraint; the flux condition holds weakly (natural Neumann).
    NeumannNatural,
}

/// Density E(q, η) = (1/q)(μ² + |η|²)^{q/2}.
pub fn energy_density(q: f64, eta: &FormValue, g: &MetricTensor, mu: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::Field(format!(
            "energy exponent must exceed 1, got {q}"
        )));
    }
    let s = mu * mu + inner(eta, eta, g)?;
    Ok(s.powf(q / 2.0) / q)
}

/// Flux A(q, η) = (μ² + |η|²)^{(q−2)/2} η — the η-derivative of
/// [energy_density]. A(q, 0) = 0, removable also for μ = 0, q < 2.
pub fn flux(q: f64, eta: &FormValue, g: &MetricTensor, mu: f64) -> Result<FormValue> {
    if !(q > 1.0) {
        return Err(Error::Field(format!(
            "flux exponent must exceed 1, got {q}"
        )));
    }
    let s = mu * mu + inner(eta, eta, g)?;
    let mut out = eta.clone();
    if s == 0.0 {
        out.scale(0.0);
        return Ok(out);
    }
    out.scale(s.powf((q - 2.0) / 2.0));
    Ok(out)
}

/// The fields (a, p, μ, F) plus boundary mode and base datum defining I[u].
#[derive(Debug, Clone)]
pub struct EnergyModel<'a> {
    complex: &'a SimplicialComplex,
    degree: usize,
    vec_dim: usize,
    mu: f64,
    mu_cap: f64,
    p: ExponentField,
    a: WeightField,
    source: Cochain,
    u0: Cochain,
    boundary: BoundaryMode,
    basis: CellBasis,
    mass_flux: MassOperator,
    /// M_{k+1} F, flattened — the covector of the linear term.
    source_weighted: Cochain,
}

impl<'a> EnergyModel<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        complex: &'a SimplicialComplex,
        degree: usize,
        vec_dim: usize,
        mu: f64,
        p: ExponentField,
        a: WeightField,
        source: Cochain,
        u0: Cochain,
        boundary: BoundaryMode,
    ) -> Result<Self> {
        if degree >= complex.dim() {
            return Err(Error::Degree(format!(
                "potential degree {degree} must be below mesh dimension {}",
                complex.dim()
            )));
        }
        if source.degree() != degree + 1 || source.vec_dim() != vec_dim {
            return Err(Error::Mismatch(
                "source must be a (k+1)-cochain of matching vector dimension".into(),
            ));
        }
        if u0.degree() != degree || u0.vec_dim() != vec_dim {
            return Err(Error::Mismatch(
                "base datum must be a k-cochain of matching vector dimension".into(),
            ));
        }
        if !(mu >= 0.0) {
            return Err(Error::Field(format!("μ must be nonnegative, got {mu}")));
        }
        let mu_cap = mu.max(2.0);
        let basis = CellBasis::build(complex, degree + 1)?;
        let mass_flux = MassOperator::assemble(complex, degree + 1, MetricMode::Cell)?;
        let source_weighted = mass_flux.apply(&source);
        Ok(EnergyModel {
            complex,
            degree,
            vec_dim,
            mu,
            mu_cap,
            p,
            a,
            source,
            u0,
            boundary,
            basis,
            mass_flux,
            source_weighted,
        })
    }

    pub fn complex(&self) -> &'a SimplicialComplex {
        self.complex
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vec_dim(&self) -> usize {
        self.vec_dim
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mu_cap(&self) -> f64 {
        self.mu_cap
    }

    pub fn exponent(&self) -> &ExponentField {
        &self.p
    }

    pub fn weight(&self) -> &WeightField {
        &self.a
    }

    pub fn source(&self) -> &Cochain {
        &self.source
    }

    pub fn base_datum(&self) -> &Cochain {
        &self.u0
    }

    pub fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    pub fn flux_mass(&self) -> &MassOperator {
        &self.mass_flux
    }

    pub fn flux_basis(&self) -> &CellBasis {
        &self.basis
    }

    /// The covector M_{k+1}F of the linear term.
    pub(crate) fn source_weighted(&self) -> &Cochain {
        &self.source_weighted
    }

    /// Clone with a different regularization parameter; caches are reused.
    pub fn with_mu(&self, mu: f64) -> EnergyModel<'a> {
        let mut m = self.clone();
        m.mu = mu;
        m.mu_cap = m.mu_cap.max(mu);
        m
    }

    /// Applies the boundary-mode admissibility mask to a variable part.
    pub fn mask(&self, v: &Cochain) -> Cochain {
        match self.boundary {
            BoundaryMode::DirichletTangential => {
                let mut w = v.clone();
                mask_tangential(self.complex, &mut w);
                w
            }
            BoundaryMode::NeumannNatural => v.clone(),
        }
    }

    pub fn mask_in_place(&self, v: &mut Cochain) {
        if self.boundary == BoundaryMode::DirichletTangential {
            mask_tangential(self.complex, v);
        }
    }

    fn check_variable(&self, v: &Cochain) -> Result<()> {
        if v.degree() != self.degree || v.vec_dim() != self.vec_dim {
            return Err(Error::Mismatch(
                "variable part has wrong degree or vector dimension".into(),
            ));
        }
        Ok(())
    }

    /// I[u₀ + v] with the admissibility mask applied to v.
    pub fn total_energy(&self, v: &Cochain) -> Result<f64> {
        self.check_variable(v)?;
        let mut ubar = self.u0.clone();
        ubar.add_scaled(&self.mask(v), 1.0);
        let du = coboundary(self.complex, &ubar)?;
        let terms = exec::map_collect(self.complex.num_cells(), |c| {
            let omega = self.basis.reconstruct(self.complex, &du, c);
            let g = self.complex.cell_metric(c);
            let q = self.p.value(c);
            let s = self.mu * self.mu + inner(&omega, &omega, g).expect("well-formed");
            self.complex.cell_volume(c) * self.a.value(c) * s.powf(q / 2.0) / q
        });
        let nonlinear = exec::sum_ordered(&terms);
        let linear: f64 = self
            .source_weighted
            .values()
            .iter()
            .zip(du.values())
            .map(|(a, b)| a * b)
            .sum();
        let total = nonlinear - linear;
        if !total.is_finite() {
            return Err(Error::Solver(
                "energy evaluated to a non-finite value".into(),
            ));
        }
        Ok(total)
    }

    /// Gradient of [EnergyModel::total_energy] with respect to the DOFs of v;
    /// Dirichlet DOFs are masked to zero.
    pub fn energy_gradient(&self, v: &Cochain) -> Result<Cochain> {
        self.check_variable(v)?;
        let mut ubar = self.u0.clone();
        ubar.add_scaled(&self.mask(v), 1.0);
        let du = coboundary(self.complex, &ubar)?;
        let nc = self.vec_dim;
        // per-cell contributions to the (k+1)-covector, gathered sequentially
        let locals = exec::map_collect(self.complex.num_cells(), |c| {
            let omega = self.basis.reconstruct(self.complex, &du, c);
            let g = self.complex.cell_metric(c);
            let q = self.p.value(c);
            let s = self.mu * self.mu + inner(&omega, &omega, g).expect("well-formed");
            let factor = if s == 0.0 {
                0.0
            } else {
                s.powf((q - 2.0) / 2.0)
            };
            let wa = self.complex.cell_volume(c) * self.a.value(c) * factor;
            let entries = self.basis.cell_entries(c);
            let mut out = Vec::with_capacity(entries.len() * nc);
            for (gi, coeffs) in entries {
                for comp in 0..nc {
                    // ⟨ω, W⟩_g for this component
                    let mut val = 0.0;
                    if g.is_euclidean() {
                        for (slot, w) in coeffs.iter().enumerate() {
                            val += omega.get(slot, comp) * w;
                        }
                    } else {
                        let mut wf = FormValue::zero(omega.dim(), omega.degree(), 1);
                        wf.coeffs_mut().copy_from_slice(coeffs);
                        let mut of = FormValue::zero(omega.dim(), omega.degree(), 1);
                        for slot in 0..omega.slots() {
                            of.set(slot, 0, omega.get(slot, comp));
                        }
                        val = inner(&of, &wf, g).expect("well-formed");
                    }
                    out.push((*gi, comp, wa * val));
                }
            }
            out
        });
        let mut covector = Cochain::zero(self.complex, self.degree + 1, nc);
        for cell in locals {
            for (gi, comp, val) in cell {
                let x = covector.get(gi, comp) + val;
                covector.set(gi, comp, x);
            }
        }
        covector.add_scaled(&self.source_weighted, -1.0);
        let mut grad = coboundary_transpose(self.complex, &covector)?;
        self.mask_in_place(&mut grad);
        if grad.values().iter().any(|x| !x.is_finite()) {
            return Err(Error::Solver(
                "gradient evaluated to a non-finite value".into(),
            ));
        }
        Ok(grad)
    }
}

/// Observed continuity moduli of an exponent field.
#[derive(Debug, Clone)]
pub struct ExponentModuli {
    /// (R, Θ_p(R)) with Θ the modulus of continuity over barycenter pairs.
    pub table: Vec<(f64, f64)>,
    /// max over pairs of |p(x)−p(y)| · log(e + 1/dist(x,y)).
    pub c_log: f64,
    /// (R, Θ_p(R)·log(1/R)) — the vanishing-log-Hölder curve.
    pub vanishing: Vec<(f64, f64)>,
    /// (C_H, α₁) from a log-log fit of Θ_p(R) ≤ C_H R^{α₁}.
    pub holder_fit: Option<(f64, f64)>,
    pub degenerate: bool,
}

/// Measures Θ_p, c_log and a Hölder fit over all barycenter pairs.
pub fn exponent_moduli(
    p: &ExponentField,
    complex: &SimplicialComplex,
    radii: &[f64],
) -> Result<ExponentModuli> {
    if radii.len() < 2 {
        return Err(Error::Diagnostic(
            "exponent moduli need at least 2 radii".into(),
        ));
    }
    let nc = complex.num_cells();
    if nc < 2 {
        return Ok(ExponentModuli {
            table: radii.iter().map(|&r| (r, 0.0)).collect(),
            c_log: 0.0,
            vanishing: radii.iter().map(|&r| (r, 0.0)).collect(),
            holder_fit: None,
            degenerate: true,
        });
    }
    let mut sorted_radii: Vec<f64> = radii.to_vec();
    sorted_radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // per-cell partial maxima, then an ordered merge
    let partial = exec::map_collect(nc, |i| {
        let bi = complex.cell_barycenter(i);
        let pi = p.value(i);
        let mut theta = vec![0.0f64; sorted_radii.len()];
        let mut clog = 0.0f64;
        for j in i + 1..nc {
            let bj = complex.cell_barycenter(j);
            let d2: f64 = bi.iter().zip(bj).map(|(a, b)| (a - b) * (a - b)).sum();
            let d = d2.sqrt();
            let dp = (pi - p.value(j)).abs();
            clog = clog.max(dp * (std::f64::consts::E + 1.0 / d).ln());
            for (ri, &r) in sorted_radii.iter().enumerate() {
                if d <= r {
                    theta[ri] = theta[ri].max(dp);
                }
            }
        }
        (theta, clog)
    });
    let mut theta = vec![0.0f64; sorted_radii.len()];
    let mut c_log = 0.0f64;
    for (t, c) in partial {
        for (a, b) in theta.iter_mut().zip(t) {
            *a = a.max(b);
        }
        c_log = c_log.max(c);
    }
    let table: Vec<(f64, f64)> = sorted_radii
        .iter()
        .copied()
        .zip(theta.iter().copied())
        .collect();
    let vanishing: Vec<(f64, f64)> = table
        .iter()
        .map(|&(r, th)| (r, if r < 1.0 { th * (1.0 / r).ln() } else { 0.0 }))
        .collect();
    // Hölder fit on the strictly positive part of the modulus
    let pts: Vec<(f64, f64)> = table
        .iter()
        .filter(|&&(r, th)| th > 0.0 && r > 0.0)
        .map(|&(r, th)| (r.ln(), th.ln()))
        .collect();
    let holder_fit = if pts.len() >= 2 {
        let (slope, intercept, _) = crate::diagnostics::linear_fit(&pts);
        Some((intercept.exp(), slope))
    } else {
        None
    };
    Ok(ExponentModuli {
        table,
        c_log,
        vanishing,
        holder_fit,
        degenerate: false,
    })
}
