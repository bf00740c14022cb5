//! Empirical regularity diagnostics on computed fields — local modulars,
//! Morrey/Campanato decay fits, the higher-integrability probe, sup-bound
//! checks — plus the randomized battery for the algebraic inequalities with
//! their explicit constants.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::exec;
use crate::exterior::{norm, FormValue};
use crate::mesh::{BallSample, SimplicialComplex};
use crate::model::{EnergyModel, ExponentField};
use crate::whitney::CellBasis;

/// Per-top-cell form values (barycenter samples) of a field.
#[derive(Debug, Clone)]
pub struct CellField {
    degree: usize,
    vec_dim: usize,
    values: Vec<FormValue>,
    norms: Vec<f64>,
}

impl CellField {
    pub fn from_cochain(complex: &SimplicialComplex, u: &Cochain) -> Result<Self> {
        let basis = CellBasis::build(complex, u.degree())?;
        let values: Vec<FormValue> =
            exec::map_collect(complex.num_cells(), |c| basis.reconstruct(complex, u, c));
        let norms = exec::map_collect(complex.num_cells(), |c| {
            norm(&values[c], complex.cell_metric(c))
        });
        Ok(CellField {
            degree: u.degree(),
            vec_dim: u.vec_dim(),
            values,
            norms,
        })
    }

    /// Samples an analytic field at cell barycenters.
    pub fn from_fn<F: Fn(&[f64]) -> FormValue + Sync>(
        complex: &SimplicialComplex,
        degree: usize,
        vec_dim: usize,
        f: F,
    ) -> Self {
        let values: Vec<FormValue> =
            exec::map_collect(complex.num_cells(), |c| f(complex.cell_barycenter(c)));
        let norms = exec::map_collect(complex.num_cells(), |c| {
            norm(&values[c], complex.cell_metric(c))
        });
        CellField {
            degree,
            vec_dim,
            values,
            norms,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vec_dim(&self) -> usize {
        self.vec_dim
    }

    pub fn value(&self, cell: usize) -> &FormValue {
        &self.values[cell]
    }

    pub fn norm(&self, cell: usize) -> f64 {
        self.norms[cell]
    }
}

/// Exponent argument for local modulars: a constant or a per-cell field.
#[derive(Debug, Clone, Copy)]
pub enum Exponent<'a> {
    Const(f64),
    Field(&'a ExponentField),
}

impl Exponent<'_> {
    fn at(&self, cell: usize) -> f64 {
        match self {
            Exponent::Const(p) => *p,
            Exponent::Field(f) => f.value(cell),
        }
    }
}

/// Σ_{member cells} w_c |field(bary_c)|^{exponent(c)}.
pub fn local_modular(field: &CellField, exponent: Exponent, ball: &BallSample) -> Result<f64> {
    if ball.is_empty() {
        return Err(Error::Diagnostic("local modular over an empty ball".into()));
    }
    let mut acc = 0.0;
    for (&c, &w) in ball.cells.iter().zip(&ball.weights) {
        acc += w * field.norm(c).powf(exponent.at(c));
    }
    Ok(acc)
}

/// p₂(r) = max of p over the 4r-ball around the center.
pub fn p2_of_r(
    complex: &SimplicialComplex,
    p: &ExponentField,
    center: &[f64],
    r: f64,
) -> Result<f64> {
    let ball = complex.ball(center, 4.0 * r)?;
    if ball.is_empty() {
        return Err(Error::Diagnostic(format!("empty 4r-ball at radius {r}")));
    }
    Ok(ball
        .cells
        .iter()
        .map(|&c| p.value(c))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Ordinary least squares on (x, y) pairs: (slope, intercept, R²).
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (0.0, sy / n, 0.0);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ybar = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - ybar) * (p.1 - ybar)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + intercept);
            e * e
        })
        .sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    (slope, intercept, r2)
}

/// A log-log decay fit Φ(ρ) ≈ C ρ^λ.
#[derive(Debug, Clone)]
pub struct DecayFit {
    /// (radius, value) pairs that entered the fit
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
    pub log_intercept: f64,
    pub r_squared: f64,
    /// all values vanished; no slope information
    pub degenerate: bool,
}

fn fit_decay(points: Vec<(f64, f64)>) -> DecayFit {
    let positive: Vec<(f64, f64)> = points.iter().filter(|&&(_, v)| v > 0.0).copied().collect();
    if positive.len() < 3 {
        return DecayFit {
            points,
            slope: 0.0,
            log_intercept: 0.0,
            r_squared: 0.0,
            degenerate: true,
        };
    }
    let logs: Vec<(f64, f64)> = positive.iter().map(|&(r, v)| (r.ln(), v.ln())).collect();
    let (slope, intercept, r2) = linear_fit(&logs);
    DecayFit {
        points,
        slope,
        log_intercept: intercept,
        r_squared: r2,
        degenerate: false,
    }
}

#[derive(Debug, Clone)]
pub struct MorreyFit {
    pub per_center: Vec<DecayFit>,
    /// smallest fitted slope over centers — the binding decay rate;
    /// τ reads off as n − slope
    pub worst_slope: f64,
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

/// Log-log fit of Φ(r) = ∫_{B_r} |ω|^{p₂(r)} dV against r, per center;
/// reports the worst-center slope.
pub fn morrey_fit(
    complex: &SimplicialComplex,
    field: &CellField,
    p: &ExponentField,
    centers: &[Vec<f64>],
    radii: &[f64],
) -> Result<MorreyFit> {
    if radii.len() < 3 || centers.is_empty() {
        return Err(Error::Diagnostic(
            "morrey fit needs ≥ 3 radii and ≥ 1 center".into(),
        ));
    }
    let mut warnings = Vec::new();
    let mut fits = Vec::new();
    for (ci, center) in centers.iter().enumerate() {
        let mut pts = Vec::new();
        for &r in radii {
            let ball = complex.ball(center, r)?;
            if ball.is_empty() {
                warnings.push(format!("center {ci}: empty ball at radius {r} dropped"));
                continue;
            }
            let p2 = p2_of_r(complex, p, center, r)?;
            pts.push((r, local_modular(field, Exponent::Const(p2), &ball)?));
        }
        if pts.len() < 3 {
            warnings.push(format!(
                "center {ci}: fewer than 3 usable radii, fit rejected"
            ));
            continue;
        }
        fits.push(fit_decay(pts));
    }
    if fits.is_empty() {
        return Err(Error::Diagnostic(
            "morrey fit: no center produced a usable fit".into(),
        ));
    }
    let live: Vec<&DecayFit> = fits.iter().filter(|f| !f.degenerate).collect();
    let degenerate = live.is_empty();
    let worst_slope = live.iter().map(|f| f.slope).fold(f64::INFINITY, f64::min);
    Ok(MorreyFit {
        per_center: fits,
        worst_slope: if degenerate { 0.0 } else { worst_slope },
        degenerate,
        warnings,
    })
}

#[derive(Debug, Clone)]
pub struct CampanatoFit {
    pub per_center: Vec<DecayFit>,
    /// fitted oscillation-decay exponent β (slope / p⁻), worst center
    pub beta: f64,
    /// β clamped to [0, 1]
    pub alpha: f64,
    pub clamped: bool,
    /// oscillation vanished identically (constant field): α̃ = 1 exactly
    pub exact: bool,
    pub warnings: Vec<String>,
}

/// Fits the mean-oscillation decay ⨍_{B_ρ}|ω − (ω)_ρ|^{p⁻} ≈ C ρ^{p⁻ β} and
/// returns the Hölder exponent α̃ = clamp(β).
pub fn campanato_fit(
    complex: &SimplicialComplex,
    field: &CellField,
    p_minus: f64,
    centers: &[Vec<f64>],
    radii: &[f64],
) -> Result<CampanatoFit> {
    if radii.len() < 3 || centers.is_empty() {
        return Err(Error::Diagnostic(
            "campanato fit needs ≥ 3 radii and ≥ 1 center".into(),
        ));
    }
    let mut warnings = Vec::new();
    let mut fits = Vec::new();
    for (ci, center) in centers.iter().enumerate() {
        let mut pts = Vec::new();
        for &r in radii {
            let ball = complex.ball(center, r)?;
            if ball.is_empty() {
                warnings.push(format!("center {ci}: empty ball at radius {r} dropped"));
                continue;
            }
            // componentwise ball mean
            let mut mean = FormValue::zero(complex.dim(), field.degree(), field.vec_dim());
            for (&c, &w) in ball.cells.iter().zip(&ball.weights) {
                mean.add_scaled(field.value(c), w);
            }
            mean.scale(1.0 / ball.total_weight);
            let mut acc = 0.0;
            for (&c, &w) in ball.cells.iter().zip(&ball.weights) {
                let mut diff = field.value(c).clone();
                diff.add_scaled(&mean, -1.0);
                acc += w * norm(&diff, complex.cell_metric(c)).powf(p_minus);
            }
            pts.push((r, acc / ball.total_weight));
        }
        if pts.len() < 3 {
            warnings.push(format!(
                "center {ci}: fewer than 3 usable radii, fit rejected"
            ));
            continue;
        }
        fits.push(fit_decay(pts));
    }
    if fits.is_empty() {
        return Err(Error::Diagnostic(
            "campanato fit: no center produced a usable fit".into(),
        ));
    }
    let live: Vec<&DecayFit> = fits.iter().filter(|f| !f.degenerate).collect();
    if live.is_empty() {
        // oscillation identically zero: constant field
        return Ok(CampanatoFit {
            per_center: fits,
            beta: 1.0,
            alpha: 1.0,
            clamped: false,
            exact: true,
            warnings,
        });
    }
    let worst = live.iter().map(|f| f.slope).fold(f64::INFINITY, f64::min);
    let beta = worst / p_minus;
    let alpha = beta.clamp(0.0, 1.0);
    Ok(CampanatoFit {
        per_center: fits,
        beta,
        alpha,
        clamped: alpha != beta,
        exact: false,
        warnings,
    })
}

/// A nested pair (B_{R/2}, B_R) around one center.
#[derive(Debug, Clone)]
pub struct BallPair {
    pub center: Vec<f64>,
    pub inner: BallSample,
    pub outer: BallSample,
}

/// Lattice of candidate centers over the mesh bounding box, keeping points
/// whose distance to the boundary is at least `min_distance`.
pub fn interior_lattice(
    complex: &SimplicialComplex,
    per_axis: usize,
    min_distance: f64,
) -> Vec<Vec<f64>> {
    let n = complex.dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for v in 0..complex.num_vertices() {
        let p = complex.vertex(v);
        for d in 0..n {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let mut centers: Vec<Vec<f64>> = vec![vec![]];
    for d in 0..n {
        let mut next = Vec::new();
        for base in &centers {
            for i in 0..per_axis {
                let t = (i as f64 + 1.0) / (per_axis as f64 + 1.0);
                let mut c = base.clone();
                c.push(lo[d] + t * (hi[d] - lo[d]));
                next.push(c);
            }
        }
        centers = next;
    }
    centers
        .into_iter()
        .filter(|c| complex.distance_to_boundary(c) >= min_distance)
        .collect()
}

/// Nested ball pairs on an interior lattice: candidate centers are kept when
/// their distance to the boundary is at least R.
pub fn ball_pairs(
    complex: &SimplicialComplex,
    radius: f64,
    per_axis: usize,
) -> Result<Vec<BallPair>> {
    if !(radius > 0.0) || per_axis == 0 {
        return Err(Error::Diagnostic(
            "ball pairs need a positive radius and lattice size".into(),
        ));
    }
    let mut pairs = Vec::new();
    for c in interior_lattice(complex, per_axis, radius) {
        let inner = complex.ball(&c, radius / 2.0)?;
        let outer = complex.ball(&c, radius)?;
        if inner.is_empty() || outer.is_empty() {
            continue;
        }
        pairs.push(BallPair {
            center: c,
            inner,
            outer,
        });
    }
    if pairs.is_empty() {
        return Err(Error::Diagnostic(
            "no interior ball pair fits the mesh at this radius".into(),
        ));
    }
    Ok(pairs)
}

/// Half-ball pairs for boundary-adjacent diagnostics: centers sit on
/// boundary-facet barycenters whose neighborhood of radius R is flat (all
/// nearby boundary facets lie in one hyperplane). Balls centered on the
/// boundary clip to the mesh, so the samples are the inner half-balls.
/// Curved boundaries yield no admissible centers.
pub fn boundary_half_ball_pairs(complex: &SimplicialComplex, radius: f64) -> Result<Vec<BallPair>> {
    if !(radius > 0.0) {
        return Err(Error::Diagnostic(
            "half-ball pairs need a positive radius".into(),
        ));
    }
    let n = complex.dim();
    let k = n - 1;
    let facet_frame = |i: usize| -> (Vec<f64>, Vec<f64>) {
        // (barycenter, unit normal) of a boundary facet
        let b = complex.barycenter(k, i);
        let t = complex.simplex_vertices(k, i);
        let normal = match n {
            1 => vec![1.0],
            2 => {
                let a = complex.vertex(t[0]);
                let c = complex.vertex(t[1]);
                let d = [c[0] - a[0], c[1] - a[1]];
                let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
                vec![-d[1] / l, d[0] / l]
            }
            _ => {
                let a = complex.vertex(t[0]);
                let b1 = complex.vertex(t[1]);
                let c = complex.vertex(t[2]);
                let u = [b1[0] - a[0], b1[1] - a[1], b1[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let cr = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let l = (cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]).sqrt();
                vec![cr[0] / l, cr[1] / l, cr[2] / l]
            }
        };
        (b, normal)
    };
    let facets: Vec<usize> = (0..complex.num_simplices(k))
        .filter(|&i| complex.is_boundary(k, i))
        .collect();
    let mut pairs = Vec::new();
    for &i in &facets {
        let (center, normal) = facet_frame(i);
        // flatness: all boundary facets within R lie in the center's plane
        let mut flat = true;
        for &j in &facets {
            let bj = complex.barycenter(k, j);
            let d2: f64 = bj.iter().zip(&center).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 >= radius * radius {
                continue;
            }
            for vjj in complex.simplex_vertices(k, j) {
                let p = complex.vertex(*vjj);
                let off: f64 = p
                    .iter()
                    .zip(&center)
                    .zip(&normal)
                    .map(|((a, b), nn)| (a - b) * nn)
                    .sum();
                if off.abs() > 1e-9 {
                    flat = false;
                    break;
                }
            }
            if !flat {
                break;
            }
        }
        if !flat {
            continue;
        }
        let inner = complex.ball(&center, radius / 2.0)?;
        let outer = complex.ball(&center, radius)?;
        if inner.is_empty() || outer.is_empty() {
            continue;
        }
        pairs.push(BallPair {
            center,
            inner,
            outer,
        });
    }
    Ok(pairs)
}

/// Choice of the co-closed shift ξ in the higher-integrability probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiChoice {
    Zero,
    /// componentwise mean of F over each outer ball (constant forms are
    /// co-closed)
    BallMean,
}

#[derive(Debug, Clone)]
pub struct MeyersProbe {
    /// largest grid σ passing the probe, by first crossing
    pub sigma_star: Option<f64>,
    /// (σ, worst ratio over pairs)
    pub ratios: Vec<(f64, f64)>,
    pub c_probe: f64,
}

/// Reverse-Hölder probe: σ* is the largest grid σ with
/// (⨍_{B_{R/2}}|ω|^{p(x)(1+σ)})^{1/(1+σ)} ≤ c·[⨍_{B_R}|ω|^{p(x)} +
/// (1 + ⨍_{B_R}|F−ξ|^{(1+σ)p'(x)})^{1/(1+σ)}] over all sampled pairs.
pub fn meyers_probe(
    complex: &SimplicialComplex,
    field: &CellField,
    p: &ExponentField,
    source: Option<&CellField>,
    xi: XiChoice,
    sigma_grid: &[f64],
    pairs: &[BallPair],
    c_probe: f64,
) -> Result<MeyersProbe> {
    if pairs.is_empty() {
        return Err(Error::Diagnostic(
            "meyers probe needs at least one ball pair".into(),
        ));
    }
    if sigma_grid.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
        return Err(Error::Diagnostic("σ grid must lie in (0,1)".into()));
    }
    let mut grid: Vec<f64> = sigma_grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ratios = Vec::with_capacity(grid.len());
    let mut sigma_star = None;
    let mut crossed = false;
    for &sigma in &grid {
        let mut worst: f64 = 0.0;
        for pair in pairs {
            // LHS: averaged modular over the inner ball at exponent p(x)(1+σ)
            let mut lhs_acc = 0.0;
            for (&c, &w) in pair.inner.cells.iter().zip(&pair.inner.weights) {
                lhs_acc += w * field.norm(c).powf(p.value(c) * (1.0 + sigma));
            }
            let lhs = (lhs_acc / pair.inner.total_weight).powf(1.0 / (1.0 + sigma));
            // RHS term 1: averaged natural modular over the outer ball
            let mut rhs1 = 0.0;
            for (&c, &w) in pair.outer.cells.iter().zip(&pair.outer.weights) {
                rhs1 += w * field.norm(c).powf(p.value(c));
            }
            rhs1 /= pair.outer.total_weight;
            // RHS term 2: source oscillation at the conjugate exponent
            let rhs2 = match source {
                None => 1.0,
                Some(fsrc) => {
                    let shift = match xi {
                        XiChoice::Zero => None,
                        XiChoice::BallMean => {
                            let mut mean =
                                FormValue::zero(complex.dim(), fsrc.degree(), fsrc.vec_dim());
                            for (&c, &w) in pair.outer.cells.iter().zip(&pair.outer.weights) {
                                mean.add_scaled(fsrc.value(c), w);
                            }
                            mean.scale(1.0 / pair.outer.total_weight);
                            Some(mean)
                        }
                    };
                    let mut acc = 0.0;
                    for (&c, &w) in pair.outer.cells.iter().zip(&pair.outer.weights) {
                        let nrm = match &shift {
                            None => fsrc.norm(c),
                            Some(m) => {
                                let mut d = fsrc.value(c).clone();
                                d.add_scaled(m, -1.0);
                                norm(&d, complex.cell_metric(c))
                            }
                        };
                        acc += w * nrm.powf((1.0 + sigma) * p.conjugate(c));
                    }
                    (1.0 + acc / pair.outer.total_weight).powf(1.0 / (1.0 + sigma))
                }
            };
            let ratio = lhs / (rhs1 + rhs2);
            worst = worst.max(ratio);
        }
        ratios.push((sigma, worst));
        if !crossed {
            if worst <= c_probe {
                sigma_star = Some(sigma);
            } else {
                crossed = true;
            }
        }
    }
    Ok(MeyersProbe {
        sigma_star,
        ratios,
        c_probe,
    })
}

#[derive(Debug, Clone)]
pub struct UhlenbeckReport {
    /// max over pairs of sup_{B_{R/2}}|ω| / (⨍_{B_R}(μ²+|ω|²)^{p/2})^{1/p}
    pub c1_meas: f64,
    /// Campanato oscillation-decay exponent β on the same centers
    pub beta_meas: f64,
}

/// Sup-bound and oscillation-decay constants for a constant-exponent
/// homogeneous (F = 0) run.
pub fn uhlenbeck_check(
    model: &EnergyModel,
    field: &CellField,
    pairs: &[BallPair],
    radii: &[f64],
) -> Result<UhlenbeckReport> {
    if !model.exponent().is_constant() {
        return Err(Error::Diagnostic(
            "uhlenbeck check requires a constant exponent field".into(),
        ));
    }
    if model.source().l2() > 0.0 {
        return Err(Error::Diagnostic(
            "uhlenbeck check requires a homogeneous run (F = 0)".into(),
        ));
    }
    if pairs.is_empty() {
        return Err(Error::Diagnostic("uhlenbeck check needs ball pairs".into()));
    }
    let p = model.exponent().p_minus();
    let mu = model.mu();
    let complex = model.complex();
    let mut c1: f64 = 0.0;
    for pair in pairs {
        let sup = pair
            .inner
            .cells
            .iter()
            .map(|&c| field.norm(c))
            .fold(0.0f64, f64::max);
        let mut mean = 0.0;
        for (&c, &w) in pair.outer.cells.iter().zip(&pair.outer.weights) {
            let n2 = mu * mu + field.norm(c) * field.norm(c);
            mean += w * n2.powf(p / 2.0);
        }
        mean /= pair.outer.total_weight;
        if mean > 0.0 {
            c1 = c1.max(sup / mean.powf(1.0 / p));
        }
    }
    let centers: Vec<Vec<f64>> = pairs.iter().map(|p| p.center.clone()).collect();
    let camp = campanato_fit(complex, field, p, &centers, radii)?;
    Ok(UhlenbeckReport {
        c1_meas: c1,
        beta_meas: if camp.exact { 1.0 } else { camp.beta },
    })
}

/// Aggregated regularity measurements of one computed field.
#[derive(Debug, Clone, Default)]
pub struct RegularityReport {
    pub meyers: Option<MeyersProbe>,
    pub morrey: Option<MorreyFit>,
    pub campanato: Option<CampanatoFit>,
    pub uhlenbeck: Option<UhlenbeckReport>,
    /// K₀ = ∫|ω|^{p(x)} dV + 1
    pub k0: f64,
    pub moduli: Option<crate::model::ExponentModuli>,
}

// ---------------------------------------------------------------------------
// algebraic inequality battery
// ---------------------------------------------------------------------------

/// Comparison constant for the combined monotonicity lemma, frozen from a
/// brute-force grid maximization of the quotient
/// |ξ|^p / (μ^p + |η|^p + ⟨A_μ(ξ)−A_μ(η), ξ−η⟩) over p ∈ [1.1, 8],
/// |η|/|ξ| ∈ [0, 3], all angles, μ/|ξ| ∈ [0, 3] (grid max 3.782, doubled).
pub const C_TEST: f64 = 7.564;

#[derive(Debug, Clone)]
pub struct AlgebraSuiteConfig {
    pub seed: u64,
    /// samples per inequality
    pub samples: usize,
    pub m_values: Vec<usize>,
    pub p_range: (f64, f64),
    pub mu_range: (f64, f64),
    pub c_test: f64,
    /// relative floating-point guard on margins
    pub tolerance: f64,
    /// negative control: corrupt one constant to force a failure
    pub inject_violation: bool,
}

impl Default for AlgebraSuiteConfig {
    fn default() -> Self {
        AlgebraSuiteConfig {
            seed: 42,
            samples: 100_000,
            m_values: vec![1, 2, 3, 6],
            p_range: (1.1, 8.0),
            mu_range: (0.0, 2.0),
            c_test: C_TEST,
            tolerance: 1e-9,
            inject_violation: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub m: usize,
    pub p: f64,
    pub mu: f64,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub name: &'static str,
    pub samples: usize,
    pub violations: usize,
    /// minimum of (lhs − rhs)/(|lhs| + |rhs|) over samples, orientation such
    /// that nonnegative means the inequality holds
    pub min_margin: f64,
    pub worst: Option<Witness>,
}

#[derive(Debug, Clone)]
pub struct AlgebraReport {
    pub checks: Vec<InequalityReport>,
    pub pass: bool,
}

const CHECK_NAMES: [&str; 10] = [
    "alg1",
    "alg2",
    "mu1",
    "mu3",
    "comparison_p_ge_2",
    "comparison_p_lt_2",
    "clarkson_p_ge_2",
    "clarkson_p_lt_2",
    "monotone_comparison",
    "convexity_lower_bound",
];

fn a0(x: &[f64], p: f64) -> Vec<f64> {
    let n2: f64 = x.iter().map(|v| v * v).sum();
    if n2 == 0.0 {
        return vec![0.0; x.len()];
    }
    let f = n2.powf((p - 2.0) / 2.0);
    x.iter().map(|v| f * v).collect()
}

fn a_mu(x: &[f64], p: f64, mu: f64) -> Vec<f64> {
    let s: f64 = mu * mu + x.iter().map(|v| v * v).sum::<f64>();
    if s == 0.0 {
        return vec![0.0; x.len()];
    }
    let f = s.powf((p - 2.0) / 2.0);
    x.iter().map(|v| f * v).collect()
}

fn vdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vnorm2(a: &[f64]) -> f64 {
    vdot(a, a)
}

/// One (lhs, rhs) pair per check, with lhs ≥ rhs the asserted direction.
fn evaluate_check(
    idx: usize,
    rng: &mut ChaCha8Rng,
    cfg: &AlgebraSuiteConfig,
    m: usize,
) -> (f64, f64, Witness) {
    let (p_lo, p_hi) = cfg.p_range;
    let (mu_lo, mu_hi) = cfg.mu_range;
    let mu = rng.gen_range(mu_lo..=mu_hi);
    let draw_vec =
        |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..m).map(|_| rng.gen_range(-10.0..10.0)).collect() };
    // per-check exponent subranges keep every sample applicable
    let p_ge2 = |rng: &mut ChaCha8Rng| rng.gen_range(p_lo.max(2.0)..=p_hi);
    let p_lt2 = |rng: &mut ChaCha8Rng| rng.gen_range(p_lo..=p_hi.min(2.0));
    let p_any = |rng: &mut ChaCha8Rng| rng.gen_range(p_lo..=p_hi);

    let make_witness =
        |m: usize, p: f64, mu: f64, xi: &[f64], eta: &[f64], lhs: f64, rhs: f64| Witness {
            m,
            p,
            mu,
            xi: xi.to_vec(),
            eta: eta.to_vec(),
            lhs,
            rhs,
            margin: (lhs - rhs) / (lhs.abs() + rhs.abs() + 1e-300),
        };

    match idx {
        0 => {
            // alg1: ⟨A₀ξ − A₀η, ξ−η⟩ ≥ 2^{1−p} |ξ−η|^p, p ≥ 2
            let p = p_ge2(rng);
            let xi = draw_vec(rng);
            let eta = draw_vec(rng);
            let d: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
            let lhs = vdot(
                &a0(&xi, p)
                    .iter()
                    .zip(a0(&eta, p).iter())
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
                &d,
            );
            let factor = if cfg.inject_violation { 4.0 } else { 1.0 };
            let rhs = factor * (2.0f64).powf(1.0 - p) * vnorm2(&d).powf(p / 2.0);
            (lhs, rhs, make_witness(m, p, mu, &xi, &eta, lhs, rhs))
        }
        1 => {
            // alg2: ⟨A₀ξ − A₀η, ξ−η⟩ ≥ (p−1)(|ξ|²+|η|²)^{(p−2)/2}|ξ−η|², 1 < p ≤ 2
            let p = p_lt2(rng);
            let xi = draw_vec(rng);
            let eta = draw_vec(rng);
            let d: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
            let lhs = vdot(
                &a0(&xi, p)
                    .iter()
                    .zip(a0(&eta, p).iter())
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
                &d,
            );
            let s = vnorm2(&xi) + vnorm2(&eta);
            let rhs = if s > 0.0 {
                (p - 1.0) * s.powf((p - 2.0) / 2.0) * vnorm2(&d)
            } else {
                0.0
            };
            (lhs, rhs, make_witness(m, p, mu, &xi, &eta, lhs, rhs))
        }
        2 => {
            // mu1: ⟨A_μξ − A_μη, ξ−η⟩ ≥ 2^{−p}|ξ−η|^p + ¼ μ^{p−2}|ξ−η|², p ≥ 2
            let p = p_ge2(rng);
            let xi = draw_vec(rng);
            let eta = draw_vec(rng);
            let d: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
            let lhs = vdot(
                &a_mu(&xi, p, mu)
                    .iter()
                    .zip(a_mu(&eta, p, mu).iter())
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
                &d,
            );
            let mu_term = if mu > 0.0 {
                0.25 * mu.powf(p - 2.0) * vnorm2(&d)
            } else {
                0.0
            };
            let rhs = (2.0f64).powf(-p) * vnorm2(&d).powf(p / 2.0) + mu_term;
            (lhs, rhs, make_witness(m, p, mu, &xi, &eta, lhs, rhs))
        }
        3 => {
            // mu3: |ξ−η|^p ≤ 2^{p⁺} |(μ²+|ξ|²)^{(p−2)/4}ξ − (μ²+|η|²)^{(p−2)/4}η|²
            let p = p_ge2(rng);
            let xi = draw_vec(rng);
            let eta = draw_vec(rng);
            let d: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
            let fx = (mu * mu + vnorm2(&xi)).powf((p - 2.0) / 4.0);
            let fy = (mu * mu + vnorm2(&eta)).powf((p - 2.0) / 4.0);
            let h: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| fx * a - fy * b).collect();
            let small = vnorm2(&d).powf(p / 2.0);
            let big = (2.0f64).powf(p_hi) * vnorm2(&h);
            (big, small, make_witness(m, p, mu, &xi, &eta, big, small))
        }
        4 => {
            // comparison, p ≥ 2: |ξ|^p ≤ 2^{p+2}(|η|^p + (|ξ|²+|η|²)^{(p−2)/2}|ξ−η|²)
            let p = p_ge2(rng);
            let xi = draw_vec(rng);
            let eta = draw_vec(rng);
            let d: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
            let s = vnorm2(&xi) + vnorm2(&eta);
            let c = (2.0f64).powf(p + 2.0);
            let big = c
                * (vnorm2(&eta).powf(p / 2.0)
                    + if s > 0.0 {
                        s.powf((p - 2.0) / 2.0) * vnorm2(&d)
                    } else {
                        0.0
                    });
            let small = vnorm2(&xi).powf(p / 2.0);
            (big, small, make_witness(m, p, mu, &xi, &eta, big, small))
        }
        5 => {
            // comparison, p < 2, universal c = 20 with the μ terms
            let p = p_lt2(rng);
            let xi = draw_vec(rng);
            let eta = draw_vec(rng);
            let d: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
            let s = mu * mu + vnorm2(&xi) + vnorm2(&eta);
            let big = 20.0
                * (mu.powf(p)
                    + vnorm2(&eta).powf(p / 2.0)
                    + if s > 0.0 {
                        s.powf((p - 2.0) / 2.0) * vnorm2(&d)
                    } else {
                        0.0
                    });
            let small = vnorm2(&xi).powf(p / 2.0);
            (big, small, make_witness(m, p, mu, &xi, &eta, big, small))
        }
        6 | 7 => {
            // Clarkson gap for the shifted N-function φ(t) = (μ²+t²)^{p/2} − μ^p:
            // φ((u+v)/2) ≤ (1−δ)(φ(u)+φ(v))/2 whenever |u−v| > ε max(u,v),
            // δ = (ε/2)^{p⁺} for p ≥ 2,
            // δ = (1−2^{1−p⁻})(ε/2)^{p⁻/(p⁻−1)} for p ≤ 2.
            let p = if idx == 6 { p_ge2(rng) } else { p_lt2(rng) };
            let u: f64 = rng.gen_range(1e-6..10.0);
            let v: f64 = rng.gen_range(1e-6..10.0);
            let gap = (u - v).abs() / u.max(v);
            let eps: f64 = rng.gen_range(0.0f64..1.0) * gap;
            let phi = |t: f64| (mu * mu + t * t).powf(p / 2.0) - mu.powf(p);
            let delta = if idx == 6 {
                (eps / 2.0).powf(p_hi)
            } else {
                (1.0 - (2.0f64).powf(1.0 - p_lo)) * (eps / 2.0).powf(p_lo / (p_lo - 1.0))
            };
            let big = (1.0 - delta) * 0.5 * (phi(u) + phi(v));
            let small = phi(0.5 * (u + v));
            (
                big,
                small,
                make_witness(m, p, mu, &[u, eps], &[v], big, small),
            )
        }
        8 => {
            // combined lemma with the frozen C_test:
            // |ξ|^p ≤ C(μ^p + |η|^p + ⟨A_μξ − A_μη, ξ−η⟩)
            let p = p_any(rng);
            let xi = draw_vec(rng);
            let eta = draw_vec(rng);
            let d: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| a - b).collect();
            let mono = vdot(
                &a_mu(&xi, p, mu)
                    .iter()
                    .zip(a_mu(&eta, p, mu).iter())
                    .map(|(a, b)| a - b)
                    .collect::<Vec<_>>(),
                &d,
            );
            let big = cfg.c_test * (mu.powf(p) + vnorm2(&eta).powf(p / 2.0) + mono);
            let small = vnorm2(&xi).powf(p / 2.0);
            (big, small, make_witness(m, p, mu, &xi, &eta, big, small))
        }
        9 => {
            // convexity lower bound: E(p,η) ≤ ⟨A(p,η),η⟩ + 1 + μ^{p⁺}
            let p = p_any(rng);
            let eta = draw_vec(rng);
            let s = mu * mu + vnorm2(&eta);
            let e = s.powf(p / 2.0) / p;
            let big = vdot(&a_mu(&eta, p, mu), &eta) + 1.0 + mu.powf(p_hi);
            (big, e, make_witness(m, p, mu, &eta, &[], big, e))
        }
        _ => unreachable!(),
    }
}

/// Randomized verification of the appendix inequalities at their explicit
/// constants. Zero violations expected; margins are scale-normalized and
/// allowed a relative rounding guard.
pub fn algebra_suite(cfg: &AlgebraSuiteConfig) -> AlgebraReport {
    let batch = 8192usize;
    let mut checks = Vec::with_capacity(CHECK_NAMES.len());
    for (idx, name) in CHECK_NAMES.iter().enumerate() {
        let batches = cfg.samples.div_ceil(batch);
        let partials = exec::map_collect(batches, |b| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed
                    .wrapping_mul(0x9E3779B97F4A7C15)
                    .wrapping_add((idx as u64) << 32)
                    .wrapping_add(b as u64),
            );
            let lo = b * batch;
            let hi = ((b + 1) * batch).min(cfg.samples);
            let mut violations = 0usize;
            let mut min_margin = f64::INFINITY;
            let mut worst: Option<Witness> = None;
            for s in lo..hi {
                let m = cfg.m_values[s % cfg.m_values.len()];
                let (lhs, rhs, wit) = evaluate_check(idx, &mut rng, cfg, m);
                let margin = (lhs - rhs) / (lhs.abs() + rhs.abs() + 1e-300);
                if margin < min_margin {
                    min_margin = margin;
                    worst = Some(wit);
                }
                if margin < -cfg.tolerance {
                    violations += 1;
                }
            }
            (violations, min_margin, worst, hi - lo)
        });
        let mut violations = 0;
        let mut min_margin = f64::INFINITY;
        let mut worst = None;
        let mut samples = 0;
        for (v, m, w, s) in partials {
            violations += v;
            if m < min_margin {
                min_margin = m;
                worst = w;
            }
            samples += s;
        }
        checks.push(InequalityReport {
            name,
            samples,
            violations,
            min_margin,
            worst,
        });
    }
    let pass = checks.iter().all(|c| c.violations == 0);
    AlgebraReport { checks, pass }
}
