//! Oriented simplicial complexes in R^n (n = 1, 2, 3) with per-cell metric,
//! signed incidence, volume weights and Euclidean-ball sampling.
//!
//! Every simplex is stored with its vertex indices sorted ascending; that
//! sorted order *is* the simplex orientation, and all boundary signs are the
//! alternating (−1)^j of the vertex-deletion position. Geometric orientation
//! of a top cell relative to the sorted order is kept as a separate ±1.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exec;
use crate::exterior::MetricTensor;

/// Per-cell metric choice at build time.
#[derive(Debug, Clone)]
pub enum MetricSpec {
    Euclidean,
    /// One constant metric for every top cell.
    Uniform(MetricTensor),
    /// One metric per top cell, in cell order.
    PerCell(Vec<MetricTensor>),
}

/// Which metric the mass matrices and pointwise norms should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    /// The per-cell metric the complex was built with.
    Cell,
    /// Plain Euclidean metric (used by the Coulomb-gauge solves).
    Euclidean,
}

#[derive(Debug, Clone, Default)]
struct SimplexSet {
    /// vertex indices, sorted ascending, stride = k+1
    verts: Vec<usize>,
    /// indices into the (k−1)-set, stride = k+1, entry j = simplex minus
    /// vertex j; the incidence sign is (−1)^j
    faces: Vec<usize>,
    /// contained in the topological boundary
    boundary: Vec<bool>,
}

impl SimplexSet {
    fn len(&self, k: usize) -> usize {
        if k + 1 == 0 {
            0
        } else {
            self.verts.len() / (k + 1)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    dim: usize,
    coords: Vec<f64>, // stride dim
    sets: Vec<SimplexSet>,
    metrics: Vec<MetricTensor>,
    /// metric volume weight w_c = √g · |cell|
    volumes: Vec<f64>,
    euclid_volumes: Vec<f64>,
    /// sign of det(edge matrix) of the sorted top cell
    orientations: Vec<i8>,
    top_barycenters: Vec<f64>, // stride dim
}

impl SimplicialComplex {
    /// Builds the full complex from vertex coordinates and top-cell vertex
    /// tuples. Lower-dimensional simplices are enumerated uniquely and
    /// ordered lexicographically; incidence is signed by the sorted-tuple
    /// convention.
    pub fn build(
        dim: usize,
        coords: Vec<f64>,
        top_cells: &[Vec<usize>],
        metric: MetricSpec,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Mesh(format!("mesh dimension {dim} not in 1..=3")));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::Mesh(
                "vertex coordinate array length is not a multiple of dim".into(),
            ));
        }
        let nv = coords.len() / dim;
        let mut sets: Vec<SimplexSet> = vec![SimplexSet::default(); dim + 1];
        sets[0].verts = (0..nv).collect();

        // top cells: sort tuples, validate
        let mut top = Vec::with_capacity(top_cells.len() * (dim + 1));
        for (ci, cell) in top_cells.iter().enumerate() {
            if cell.len() != dim + 1 {
                return Err(Error::Mesh(format!(
                    "cell {ci} has {} vertices, expected {}",
                    cell.len(),
                    dim + 1
                )));
            }
            let mut t = cell.clone();
            t.sort_unstable();
            t.dedup();
            if t.len() != dim + 1 {
                return Err(Error::Mesh(format!("cell {ci} repeats a vertex")));
            }
            if *t.last().unwrap() >= nv {
                return Err(Error::Mesh(format!(
                    "cell {ci} references vertex {} out of range",
                    t.last().unwrap()
                )));
            }
            top.extend_from_slice(&t);
        }
        sets[dim].verts = top;

        // enumerate lower strata from the one above, lexicographically ordered
        for k in (1..=dim).rev() {
            if k == 1 {
                // faces of edges are vertices; identity indexing
                continue;
            }
            let upper: Vec<Vec<usize>> = {
                let s = &sets[k];
                (0..s.len(k))
                    .map(|i| s.verts[i * (k + 1)..(i + 1) * (k + 1)].to_vec())
                    .collect()
            };
            let mut uniq: Vec<Vec<usize>> = Vec::new();
            let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
            for t in &upper {
                for j in 0..=k {
                    let mut f = t.clone();
                    f.remove(j);
                    if seen.insert(f.clone(), ()).is_none() {
                        uniq.push(f);
                    }
                }
            }
            uniq.sort_unstable();
            let mut flat = Vec::with_capacity(uniq.len() * k);
            for t in &uniq {
                flat.extend_from_slice(t);
            }
            sets[k - 1].verts = flat;
        }
        // face index tables
        let mut index_of: Vec<HashMap<&[usize], usize>> = Vec::with_capacity(dim + 1);
        for k in 0..=dim {
            let s = &sets[k];
            let mut m = HashMap::with_capacity(s.len(k));
            for i in 0..s.len(k) {
                m.insert(&s.verts[i * (k + 1)..(i + 1) * (k + 1)], i);
            }
            index_of.push(m);
        }
        let mut faces_all: Vec<Vec<usize>> = vec![Vec::new(); dim + 1];
        for k in 1..=dim {
            let count = sets[k].len(k);
            let mut faces = Vec::with_capacity(count * (k + 1));
            for i in 0..count {
                let t = &sets[k].verts[i * (k + 1)..(i + 1) * (k + 1)];
                for j in 0..=k {
                    let mut f = t.to_vec();
                    f.remove(j);
                    let fi = *index_of[k - 1].get(f.as_slice()).expect("face enumerated");
                    faces.push(fi);
                }
            }
            faces_all[k] = faces;
        }
        drop(index_of);
        for k in 1..=dim {
            sets[k].faces = std::mem::take(&mut faces_all[k]);
        }

        // boundary flags: (n−1)-simplices with exactly one top coface, then
        // downward closure
        let n_top = sets[dim].len(dim);
        let mut coface_count = vec![
            0usize;
            if dim >= 1 {
                sets[dim - 1].len(dim - 1)
            } else {
                0
            }
        ];
        for i in 0..n_top {
            for j in 0..=dim {
                coface_count[sets[dim].faces[i * (dim + 1) + j]] += 1;
            }
        }
        for (k, s) in sets.iter_mut().enumerate() {
            s.boundary = vec![false; s.len(k)];
        }
        for (i, &c) in coface_count.iter().enumerate() {
            if c == 1 {
                sets[dim - 1].boundary[i] = true;
            } else if c > 2 {
                return Err(Error::Mesh(format!(
                    "non-manifold facet {i}: bounds {c} top cells"
                )));
            }
        }
        for k in (1..dim).rev() {
            let count = sets[k].len(k);
            let mut flags = vec![false; sets[k - 1].len(k - 1)];
            for i in 0..count {
                if sets[k].boundary[i] {
                    for j in 0..=k {
                        flags[sets[k].faces[i * (k + 1) + j]] = true;
                    }
                }
            }
            for (i, f) in flags.into_iter().enumerate() {
                if f {
                    sets[k - 1].boundary[i] = true;
                }
            }
        }

        // metrics
        let metrics: Vec<MetricTensor> = match metric {
            MetricSpec::Euclidean => vec![MetricTensor::euclidean(dim); n_top],
            MetricSpec::Uniform(g) => {
                if g.dim() != dim {
                    return Err(Error::Metric("uniform metric dimension mismatch".into()));
                }
                vec![g; n_top]
            }
            MetricSpec::PerCell(gs) => {
                if gs.len() != n_top {
                    return Err(Error::Metric(format!(
                        "got {} per-cell metrics for {} cells",
                        gs.len(),
                        n_top
                    )));
                }
                for g in &gs {
                    if g.dim() != dim {
                        return Err(Error::Metric("per-cell metric dimension mismatch".into()));
                    }
                }
                gs
            }
        };

        // geometry
        let mut volumes = Vec::with_capacity(n_top);
        let mut euclid_volumes = Vec::with_capacity(n_top);
        let mut orientations = Vec::with_capacity(n_top);
        let mut top_barycenters = Vec::with_capacity(n_top * dim);
        let factorial: f64 = (1..=dim).map(|i| i as f64).product();
        for i in 0..n_top {
            let t = &sets[dim].verts[i * (dim + 1)..(i + 1) * (dim + 1)];
            let mut edge = vec![0.0; dim * dim]; // columns v_j - v_0
            for j in 1..=dim {
                for d in 0..dim {
                    edge[d * dim + (j - 1)] = coords[t[j] * dim + d] - coords[t[0] * dim + d];
                }
            }
            let det = det_n(dim, &edge);
            let vol = det.abs() / factorial;
            if vol <= 1e-14 {
                return Err(Error::DegenerateCell {
                    cell: i,
                    volume: vol,
                });
            }
            euclid_volumes.push(vol);
            volumes.push(vol * metrics[i].sqrt_det());
            orientations.push(if det >= 0.0 { 1 } else { -1 });
            for d in 0..dim {
                let b: f64 =
                    t.iter().map(|&v| coords[v * dim + d]).sum::<f64>() / (dim as f64 + 1.0);
                top_barycenters.push(b);
            }
        }

        Ok(SimplicialComplex {
            dim,
            coords,
            sets,
            metrics,
            volumes,
            euclid_volumes,
            orientations,
            top_barycenters,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.sets[0].len(0)
    }

    pub fn num_simplices(&self, k: usize) -> usize {
        if k > self.dim {
            0
        } else {
            self.sets[k].len(k)
        }
    }

    pub fn num_cells(&self) -> usize {
        self.num_simplices(self.dim)
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn simplex_vertices(&self, k: usize, i: usize) -> &[usize] {
        &self.sets[k].verts[i * (k + 1)..(i + 1) * (k + 1)]
    }

    /// Faces of the i-th k-simplex; entry j is the sub-simplex with vertex j
    /// removed and carries incidence sign (−1)^j.
    pub fn simplex_faces(&self, k: usize, i: usize) -> &[usize] {
        &self.sets[k].faces[i * (k + 1)..(i + 1) * (k + 1)]
    }

    pub fn is_boundary(&self, k: usize, i: usize) -> bool {
        self.sets[k].boundary[i]
    }

    pub fn cell_metric(&self, c: usize) -> &MetricTensor {
        &self.metrics[c]
    }

    pub fn metric_for(&self, c: usize, mode: MetricMode) -> MetricTensor {
        match mode {
            MetricMode::Cell => self.metrics[c].clone(),
            MetricMode::Euclidean => MetricTensor::euclidean(self.dim),
        }
    }

    /// Metric volume weight w_c = √g · |cell|.
    pub fn cell_volume(&self, c: usize) -> f64 {
        self.volumes[c]
    }

    pub fn cell_volume_for(&self, c: usize, mode: MetricMode) -> f64 {
        match mode {
            MetricMode::Cell => self.volumes[c],
            MetricMode::Euclidean => self.euclid_volumes[c],
        }
    }

    pub fn cell_euclid_volume(&self, c: usize) -> f64 {
        self.euclid_volumes[c]
    }

    /// Sign of the sorted top cell relative to positive geometric orientation.
    pub fn cell_orientation(&self, c: usize) -> i8 {
        self.orientations[c]
    }

    pub fn total_volume(&self) -> f64 {
        exec::sum_ordered(&self.volumes)
    }

    pub fn cell_barycenter(&self, c: usize) -> &[f64] {
        &self.top_barycenters[c * self.dim..(c + 1) * self.dim]
    }

    pub fn barycenter(&self, k: usize, i: usize) -> Vec<f64> {
        let t = self.simplex_vertices(k, i);
        let mut b = vec![0.0; self.dim];
        for &v in t {
            for d in 0..self.dim {
                b[d] += self.coords[v * self.dim + d];
            }
        }
        for x in &mut b {
            *x /= t.len() as f64;
        }
        b
    }

    /// Euclidean volume of any k-simplex (Gram determinant).
    pub fn simplex_euclid_volume(&self, k: usize, i: usize) -> f64 {
        if k == 0 {
            return 1.0;
        }
        let t = self.simplex_vertices(k, i);
        let n = self.dim;
        let mut gram = vec![0.0; k * k];
        for a in 1..=k {
            for b in 1..=k {
                let mut s = 0.0;
                for d in 0..n {
                    s += (self.coords[t[a] * n + d] - self.coords[t[0] * n + d])
                        * (self.coords[t[b] * n + d] - self.coords[t[0] * n + d]);
                }
                gram[(a - 1) * k + (b - 1)] = s;
            }
        }
        let factorial: f64 = (1..=k).map(|i| i as f64).product();
        det_n(k, &gram).max(0.0).sqrt() / factorial
    }

    /// Euclidean-ball sample: member cells are those whose barycenter lies
    /// strictly within `rho` of `x0`.
    pub fn ball(&self, x0: &[f64], rho: f64) -> Result<BallSample> {
        if x0.len() != self.dim {
            return Err(Error::Mismatch("ball center dimension mismatch".into()));
        }
        if !(rho > 0.0) {
            return Err(Error::Mesh(format!("ball radius {rho} must be positive")));
        }
        let n = self.num_cells();
        let members = exec::map_collect(n, |c| {
            let b = self.cell_barycenter(c);
            let d2: f64 = b.iter().zip(x0).map(|(x, y)| (x - y) * (x - y)).sum();
            d2 < rho * rho
        });
        let mut cells = Vec::new();
        let mut weights = Vec::new();
        for (c, &m) in members.iter().enumerate() {
            if m {
                cells.push(c);
                weights.push(self.volumes[c]);
            }
        }
        let total = exec::sum_ordered(&weights);
        Ok(BallSample {
            center: x0.to_vec(),
            radius: rho,
            cells,
            weights,
            total_weight: total,
        })
    }

    /// Approximate Euclidean distance from a point to the mesh boundary,
    /// measured to boundary-facet barycenters (O(h) accurate).
    pub fn distance_to_boundary(&self, x: &[f64]) -> f64 {
        let k = self.dim - 1;
        let mut best = f64::INFINITY;
        for i in 0..self.num_simplices(k) {
            if !self.is_boundary(k, i) {
                continue;
            }
            let b = self.barycenter(k, i);
            let d2: f64 = b.iter().zip(x).map(|(p, q)| (p - q) * (p - q)).sum();
            if d2 < best {
                best = d2;
            }
        }
        best.sqrt()
    }
}

fn det_n(n: usize, m: &[f64]) -> f64 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {
            let mut a = m.to_vec();
            let mut det = 1.0;
            for col in 0..n {
                let mut piv = col;
                for r in col + 1..n {
                    if a[r * n + col].abs() > a[piv * n + col].abs() {
                        piv = r;
                    }
                }
                if a[piv * n + col] == 0.0 {
                    return 0.0;
                }
                if piv != col {
                    for c in 0..n {
                        a.swap(col * n + c, piv * n + c);
                    }
                    det = -det;
                }
                det *= a[col * n + col];
                for r in col + 1..n {
                    let f = a[r * n + col] / a[col * n + col];
                    for c in col..n {
                        a[r * n + c] -= f * a[col * n + c];
                    }
                }
            }
            det
        }
    }
}

/// Cells sampled by a Euclidean ball, with their metric weights.
#[derive(Debug, Clone)]
pub struct BallSample {
    pub center: Vec<f64>,
    pub radius: f64,
    pub cells: Vec<usize>,
    pub weights: Vec<f64>,
    pub total_weight: f64,
}

impl BallSample {
    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Strictly decreasing dyadic radii ρ_j = ρ₀ 2^{−j}, j = 0..levels.
pub fn dyadic_radii(rho0: f64, levels: usize) -> Result<Vec<f64>> {
    if !(rho0 > 0.0) {
        return Err(Error::Mesh(format!("base radius {rho0} must be positive")));
    }
    if levels < 2 {
        return Err(Error::Mesh(format!("need at least 2 levels, got {levels}")));
    }
    Ok((0..levels).map(|j| rho0 / (1u64 << j) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meshgen;

    #[test]
    fn interval_counts() {
        let m = meshgen::interval_mesh(2, 0.0, 1.0).unwrap();
        assert_eq!(m.num_vertices(), 3);
        assert_eq!(m.num_simplices(1), 2);
        // ∂₁ has 4 nonzeros: each edge has 2 signed vertex incidences
        let nnz: usize = (0..2).map(|i| m.simplex_faces(1, i).len()).sum();
        assert_eq!(nnz, 4);
    }

    #[test]
    fn square_euler_count() {
        let m = meshgen::square_mesh(1, [0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_simplices(1), 5);
        assert_eq!(m.num_simplices(2), 2);
        assert_eq!(
            m.num_vertices() + m.num_simplices(2) - m.num_simplices(1),
            1
        );
    }

    #[test]
    fn boundary_incidence_composes_to_zero() {
        // signed incidence ∂∂ = 0, composed in integers
        for mesh in [
            meshgen::square_mesh(3, [0.0, 1.0, 0.0, 1.0]).unwrap(),
            meshgen::cube_mesh(2, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap(),
        ] {
            for k in 2..=mesh.dim() {
                for i in 0..mesh.num_simplices(k) {
                    let mut acc: HashMap<usize, i64> = HashMap::new();
                    let faces = mesh.simplex_faces(k, i);
                    for (j, &f) in faces.iter().enumerate() {
                        let sj = if j % 2 == 0 { 1i64 } else { -1 };
                        let sub = mesh.simplex_faces(k - 1, f);
                        for (l, &g) in sub.iter().enumerate() {
                            let sl = if l % 2 == 0 { 1i64 } else { -1 };
                            *acc.entry(g).or_insert(0) += sj * sl;
                        }
                    }
                    for (_, v) in acc {
                        assert_eq!(v, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn volumes_sum_to_domain_volume() {
        let m = meshgen::square_mesh(7, [0.0, 2.0, 0.0, 1.0]).unwrap();
        assert!((m.total_volume() - 2.0).abs() < 1e-10);
        let c = meshgen::cube_mesh(3, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!((c.total_volume() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn metric_volume_scaling() {
        let g = MetricTensor::new(2, &[4.0, 0.0, 0.0, 1.0]).unwrap();
        let mut mesh = meshgen::square_cells(2, [0.0, 1.0, 0.0, 1.0]);
        let built = SimplicialComplex::build(
            2,
            std::mem::take(&mut mesh.0),
            &mesh.1,
            MetricSpec::Uniform(g),
        )
        .unwrap();
        assert!((built.total_volume() - 2.0).abs() < 1e-10); // √det = 2
    }

    #[test]
    fn degenerate_cell_rejected() {
        let coords = vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0];
        let r = SimplicialComplex::build(2, coords, &[vec![0, 1, 2]], MetricSpec::Euclidean);
        assert!(matches!(r, Err(Error::DegenerateCell { .. })));
    }

    #[test]
    fn inconsistent_cells_rejected() {
        let coords = vec![0.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        // out-of-range vertex index
        let r =
            SimplicialComplex::build(2, coords.clone(), &[vec![0, 1, 7]], MetricSpec::Euclidean);
        assert!(matches!(r, Err(Error::Mesh(_))));
        // repeated vertex
        let r = SimplicialComplex::build(2, coords, &[vec![0, 1, 1]], MetricSpec::Euclidean);
        assert!(matches!(r, Err(Error::Mesh(_))));
    }

    #[test]
    fn ball_membership_1d() {
        // uniform mesh on [0,1], h = 1/8: barycenters at (2j+1)/16
        let m = meshgen::interval_mesh(8, 0.0, 1.0).unwrap();
        let b = m.ball(&[0.5], 0.2).unwrap();
        assert_eq!(b.cells.len(), 4);
        assert!((b.total_weight - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ball_full_and_empty() {
        let m = meshgen::square_mesh(4, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let full = m.ball(&[0.5, 0.5], 10.0).unwrap();
        assert_eq!(full.cells.len(), m.num_cells());
        assert!((full.total_weight - m.total_volume()).abs() < 1e-12);
        let empty = m.ball(&[-5.0, -5.0], 0.01).unwrap();
        assert!(empty.is_empty());
        assert_eq!(empty.total_weight, 0.0);
    }

    #[test]
    fn ball_monotone_in_radius() {
        let m = meshgen::square_mesh(6, [0.0, 1.0, 0.0, 1.0]).unwrap();
        let small = m.ball(&[0.4, 0.6], 0.2).unwrap();
        let large = m.ball(&[0.4, 0.6], 0.35).unwrap();
        for c in &small.cells {
            assert!(large.cells.contains(c));
        }
    }

    #[test]
    fn dyadic_radii_sequence() {
        assert_eq!(dyadic_radii(0.4, 3).unwrap(), vec![0.4, 0.2, 0.1]);
        assert!(dyadic_radii(1.0, 1).is_err());
        let r = dyadic_radii(0.3, 4).unwrap();
        for w in r.windows(2) {
            assert_eq!(w[0] / w[1], 2.0);
        }
    }

    #[test]
    fn flagged_boundary_is_closed() {
        // every flagged (n−2)-simplex bounds an even number of flagged facets
        for mesh in [
            meshgen::square_mesh(4, [0.0, 1.0, 0.0, 1.0]).unwrap(),
            meshgen::cube_mesh(2, [0.0, 1.0, 0.0, 1.0, 0.0, 1.0]).unwrap(),
            meshgen::disk_mesh(4).unwrap(),
        ] {
            let n = mesh.dim();
            if n < 2 {
                continue;
            }
            let mut counts = vec![0usize; mesh.num_simplices(n - 2)];
            for i in 0..mesh.num_simplices(n - 1) {
                if mesh.is_boundary(n - 1, i) {
                    for &f in mesh.simplex_faces(n - 1, i) {
                        counts[f] += 1;
                    }
                }
            }
            for (i, &c) in counts.iter().enumerate() {
                if mesh.is_boundary(n - 2, i) {
                    assert!(
                        c > 0 && c % 2 == 0,
                        "facet ring at sub-simplex {i}: count {c}"
                    );
                }
            }
        }
    }
}
