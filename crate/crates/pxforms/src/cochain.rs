//! Discrete R^N-valued k-forms: one N-vector per oriented k-simplex, the
//! value being the form integrated over the simplex in its sorted-vertex
//! orientation.

use crate::error::{Error, Result};
use crate::exterior::FormValue;
use crate::mesh::SimplicialComplex;

#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    degree: usize,
    vec_dim: usize,
    values: Vec<f64>, // stride vec_dim
}

impl Cochain {
    pub fn zero(complex: &SimplicialComplex, degree: usize, vec_dim: usize) -> Self {
        Cochain {
            degree,
            vec_dim,
            values: vec![0.0; complex.num_simplices(degree) * vec_dim],
        }
    }

    pub fn from_values(degree: usize, vec_dim: usize, values: Vec<f64>) -> Result<Self> {
        if vec_dim == 0 || values.len() % vec_dim != 0 {
            return Err(Error::Mismatch(
                "cochain value array not a multiple of vec_dim".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Field("cochain holds a non-finite entry".into()));
        }
        Ok(Cochain {
            degree,
            vec_dim,
            values,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vec_dim(&self) -> usize {
        self.vec_dim
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.vec_dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, simplex: usize, component: usize) -> f64 {
        self.values[simplex * self.vec_dim + component]
    }

    pub fn set(&mut self, simplex: usize, component: usize, v: f64) {
        self.values[simplex * self.vec_dim + component] = v;
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn add_scaled(&mut self, other: &Cochain, s: f64) {
        debug_assert_eq!(self.values.len(), other.values.len());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += s * b;
        }
    }

    pub fn l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// De Rham map of an analytic form: integrates `form` over every
    /// k-simplex with a fixed degree-2-exact quadrature rule.
    pub fn from_form_fn<F>(
        complex: &SimplicialComplex,
        degree: usize,
        vec_dim: usize,
        form: F,
    ) -> Result<Self>
    where
        F: Fn(&[f64]) -> FormValue + Sync,
    {
        let k = degree;
        if k > complex.dim() {
            return Err(Error::Degree(format!(
                "cochain degree {k} above mesh dimension {}",
                complex.dim()
            )));
        }
        let n = complex.dim();
        let count = complex.num_simplices(k);
        let rows = crate::exec::map_collect(count, |i| {
            let tuple = complex.simplex_vertices(k, i);
            if k == 0 {
                let v = form(complex.vertex(tuple[0]));
                return v.coeffs()[..vec_dim].to_vec();
            }
            let v0 = complex.vertex(tuple[0]);
            let edges: Vec<Vec<f64>> = (1..=k)
                .map(|j| {
                    let vj = complex.vertex(tuple[j]);
                    (0..n).map(|d| vj[d] - v0[d]).collect()
                })
                .collect();
            let edge_refs: Vec<&[f64]> = edges.iter().map(|e| e.as_slice()).collect();
            let rule = quadrature_rule(k);
            let mut acc = vec![0.0; vec_dim];
            for (wq, bary) in &rule {
                let mut x = vec![0.0; n];
                for d in 0..n {
                    x[d] = bary
                        .iter()
                        .zip(tuple)
                        .map(|(l, &vi)| l * complex.vertex(vi)[d])
                        .sum();
                }
                let val = form(&x).eval_on(&edge_refs);
                for c in 0..vec_dim {
                    acc[c] += wq * val[c];
                }
            }
            let kfact: f64 = (1..=k).map(|i| i as f64).product();
            acc.iter().map(|a| a / kfact).collect()
        });
        let mut values = Vec::with_capacity(count * vec_dim);
        for r in rows {
            values.extend_from_slice(&r);
        }
        Cochain::from_values(degree, vec_dim, values)
    }
}

/// Normalized barycentric quadrature exact for polynomials of degree ≤ 2.
fn quadrature_rule(k: usize) -> Vec<(f64, Vec<f64>)> {
    match k {
        1 => {
            let a = 0.5 + 0.5 / 3f64.sqrt();
            vec![(0.5, vec![a, 1.0 - a]), (0.5, vec![1.0 - a, a])]
        }
        2 => vec![
            (1.0 / 3.0, vec![0.5, 0.5, 0.0]),
            (1.0 / 3.0, vec![0.5, 0.0, 0.5]),
            (1.0 / 3.0, vec![0.0, 0.5, 0.5]),
        ],
        3 => {
            let a = 0.585_410_196_624_968_5;
            let b = 0.138_196_601_125_010_5;
            vec![
                (0.25, vec![a, b, b, b]),
                (0.25, vec![b, a, b, b]),
                (0.25, vec![b, b, a, b]),
                (0.25, vec![b, b, b, a]),
            ]
        }
        _ => unreachable!("quadrature requested for degree {k}"),
    }
}

/// Coboundary (discrete exterior derivative): Stokes-consistent signed sum
/// over faces, (du)_τ = Σ_j (−1)^j u_{τ∖j}.
pub fn coboundary(complex: &SimplicialComplex, u: &Cochain) -> Result<Cochain> {
    let k = u.degree();
    if k >= complex.dim() {
        return Err(Error::Degree(format!(
            "coboundary of degree {k} exceeds mesh dimension {}",
            complex.dim()
        )));
    }
    let nc = u.vec_dim();
    let count = complex.num_simplices(k + 1);
    let rows = crate::exec::map_collect(count, |t| {
        let faces = complex.simplex_faces(k + 1, t);
        let mut acc = vec![0.0; nc];
        for (j, &f) in faces.iter().enumerate() {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            for c in 0..nc {
                acc[c] += s * u.get(f, c);
            }
        }
        acc
    });
    let mut values = Vec::with_capacity(count * nc);
    for r in rows {
        values.extend_from_slice(&r);
    }
    Ok(Cochain {
        degree: k + 1,
        vec_dim: nc,
        values,
    })
}

/// Transpose of the coboundary acting on covectors of degree k+1, producing
/// a covector of degree k: y_{σ} = Σ_{τ ⊃ σ} (±) x_τ.
pub fn coboundary_transpose(complex: &SimplicialComplex, x: &Cochain) -> Result<Cochain> {
    let kp1 = x.degree();
    if kp1 == 0 || kp1 > complex.dim() {
        return Err(Error::Degree(
            "coboundary transpose degree out of range".into(),
        ));
    }
    let k = kp1 - 1;
    let nc = x.vec_dim();
    let mut out = Cochain::zero(complex, k, nc);
    for t in 0..complex.num_simplices(kp1) {
        let faces = complex.simplex_faces(kp1, t);
        for (j, &f) in faces.iter().enumerate() {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            for c in 0..nc {
                let v = out.get(f, c) + s * x.get(t, c);
                out.set(f, c, v);
            }
        }
    }
    Ok(out)
}

/// Zeroes all values on simplices flagged as boundary — the discrete
/// realization of the vanishing tangential trace tω = 0.
pub fn tangential_zero(complex: &SimplicialComplex, u: &Cochain) -> Cochain {
    let mut out = u.clone();
    mask_tangential(complex, &mut out);
    out
}

pub fn mask_tangential(complex: &SimplicialComplex, u: &mut Cochain) {
    let k = u.degree();
    let nc = u.vec_dim();
    for i in 0..complex.num_simplices(k) {
        if complex.is_boundary(k, i) {
            for c in 0..nc {
                u.set(i, c, 0.0);
            }
        }
    }
}
