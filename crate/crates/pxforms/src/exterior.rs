//! Pointwise exterior algebra of vector-valued alternating k-tensors.
//!
//! Values live on an n-dimensional inner-product space (n ≤ 4) and carry an
//! R^N coefficient per strictly increasing index tuple. All signs come from
//! explicit shuffle-permutation parities; there are no lookup tables.

use crate::error::{Error, Result};

/// Largest ambient dimension supported by the tuple machinery.
pub const MAX_DIM: usize = 4;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Strictly increasing k-tuples over `0..n` in lexicographic order.
pub fn index_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Lexicographic rank of a strictly increasing tuple among all k-tuples of `0..n`.
pub fn tuple_rank(n: usize, tuple: &[usize]) -> usize {
    let k = tuple.len();
    let mut rank = 0;
    let mut prev: i64 = -1;
    for (pos, &t) in tuple.iter().enumerate() {
        for v in (prev + 1) as usize..t {
            rank += binomial(n - v - 1, k - pos - 1);
        }
        prev = t as i64;
    }
    rank
}

/// Sign of the permutation that maps the concatenation (a, b) of two sorted
/// disjoint tuples to the fully sorted tuple. Zero overlap is the caller's
/// responsibility.
pub fn shuffle_sign(a: &[usize], b: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for &x in a {
        inversions += b.iter().filter(|&&y| y < x).count();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Symmetric positive-definite metric on the ambient space, with its inverse
/// and volume factor √det(g) cached.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    dim: usize,
    g: Vec<f64>,
    g_inv: Vec<f64>,
    sqrt_det: f64,
}

impl MetricTensor {
    pub fn euclidean(dim: usize) -> Self {
        let mut g = vec![0.0; dim * dim];
        for i in 0..dim {
            g[i * dim + i] = 1.0;
        }
        MetricTensor {
            dim,
            g_inv: g.clone(),
            g,
            sqrt_det: 1.0,
        }
    }

    /// Builds a metric from row-major entries, checking symmetry and
    /// positive definiteness (via Cholesky) and that g·g⁻¹ = I to 1e-12.
    pub fn new(dim: usize, entries: &[f64]) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::Metric(format!(
                "dimension {dim} out of range 1..={MAX_DIM}"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::Metric(format!(
                "expected {} entries, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for i in 0..dim {
            for j in 0..i {
                if (entries[i * dim + j] - entries[j * dim + i]).abs() > 1e-12 {
                    return Err(Error::Metric("matrix is not symmetric".into()));
                }
            }
        }
        // Cholesky: fails iff not positive definite; det g = prod(l_ii)^2.
        let mut l = vec![0.0; dim * dim];
        let mut det = 1.0;
        for i in 0..dim {
            for j in 0..=i {
                let mut s = entries[i * dim + j];
                for t in 0..j {
                    s -= l[i * dim + t] * l[j * dim + t];
                }
                if i == j {
                    if s <= 0.0 {
                        return Err(Error::Metric("matrix is not positive definite".into()));
                    }
                    l[i * dim + i] = s.sqrt();
                    det *= s;
                } else {
                    l[i * dim + j] = s / l[j * dim + j];
                }
            }
        }
        let g_inv = invert(dim, entries)?;
        for i in 0..dim {
            for j in 0..dim {
                let mut s = 0.0;
                for t in 0..dim {
                    s += entries[i * dim + t] * g_inv[t * dim + j];
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                if (s - expect).abs() > 1e-12 {
                    return Err(Error::Metric(
                        "g·g⁻¹ deviates from identity beyond 1e-12".into(),
                    ));
                }
            }
        }
        Ok(MetricTensor {
            dim,
            g: entries.to_vec(),
            g_inv,
            sqrt_det: det.sqrt(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sqrt_det(&self) -> f64 {
        self.sqrt_det
    }

    pub fn entries(&self) -> &[f64] {
        &self.g
    }

    pub fn inv_entry(&self, i: usize, j: usize) -> f64 {
        self.g_inv[i * self.dim + j]
    }

    pub fn is_euclidean(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let e = if i == j { 1.0 } else { 0.0 };
                self.g[i * self.dim + j] == e
            })
        })
    }

    /// Raises covector indices: v^i = g^{ij} v_j.
    pub fn raise(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| (0..n).map(|j| self.g_inv[i * n + j] * v[j]).sum())
            .collect()
    }

    /// Inner product of covectors: ⟨a, b⟩ = g^{ij} a_i b_j.
    pub fn covector_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = self.dim;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += self.g_inv[i * n + j] * a[i] * b[j];
            }
        }
        s
    }

    /// Minor G^{IJ}: determinant of the submatrix of g⁻¹ at rows I, columns J.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> f64 {
        let k = rows.len();
        debug_assert_eq!(k, cols.len());
        match k {
            0 => 1.0,
            1 => self.inv_entry(rows[0], cols[0]),
            2 => {
                self.inv_entry(rows[0], cols[0]) * self.inv_entry(rows[1], cols[1])
                    - self.inv_entry(rows[0], cols[1]) * self.inv_entry(rows[1], cols[0])
            }
            _ => {
                let mut m = vec![0.0; k * k];
                for (a, &i) in rows.iter().enumerate() {
                    for (b, &j) in cols.iter().enumerate() {
                        m[a * k + b] = self.inv_entry(i, j);
                    }
                }
                det_small(k, &m)
            }
        }
    }
}

fn det_small(n: usize, m: &[f64]) -> f64 {
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

fn invert(n: usize, m: &[f64]) -> Result<Vec<f64>> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; n * n];
    for i in 0..n {
        inv[i * n + i] = 1.0;
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col] == 0.0 {
            return Err(Error::Metric("matrix is singular".into()));
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
                inv.swap(col * n + c, piv * n + c);
            }
        }
        let d = a[col * n + col];
        for c in 0..n {
            a[col * n + c] /= d;
            inv[col * n + c] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r * n + col];
                for c in 0..n {
                    a[r * n + c] -= f * a[col * n + c];
                    inv[r * n + c] -= f * inv[col * n + c];
                }
            }
        }
    }
    Ok(inv)
}

/// An R^N-valued alternating k-tensor: one N-vector per strictly increasing
/// index tuple, tuples in lexicographic order, coefficients tuple-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FormValue {
    dim: usize,
    degree: usize,
    vec_dim: usize,
    coeffs: Vec<f64>,
}

impl FormValue {
    pub fn zero(dim: usize, degree: usize, vec_dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "ambient dimension {dim} above {MAX_DIM}");
        assert!(vec_dim >= 1);
        let slots = if degree > dim {
            0
        } else {
            binomial(dim, degree)
        };
        FormValue {
            dim,
            degree,
            vec_dim,
            coeffs: vec![0.0; slots * vec_dim],
        }
    }

    /// Scalar-valued (N = 1) basis covector-power dx^I.
    pub fn basis(dim: usize, tuple: &[usize]) -> Self {
        let mut v = FormValue::zero(dim, tuple.len(), 1);
        v.coeffs[tuple_rank(dim, tuple)] = 1.0;
        v
    }

    /// A 0-form holding the given N-vector.
    pub fn scalar(dim: usize, value: &[f64]) -> Self {
        let mut v = FormValue::zero(dim, 0, value.len());
        v.coeffs.copy_from_slice(value);
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn vec_dim(&self) -> usize {
        self.vec_dim
    }

    pub fn slots(&self) -> usize {
        if self.degree > self.dim {
            0
        } else {
            binomial(self.dim, self.degree)
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, slot: usize, component: usize) -> f64 {
        self.coeffs[slot * self.vec_dim + component]
    }

    pub fn set(&mut self, slot: usize, component: usize, value: f64) {
        self.coeffs[slot * self.vec_dim + component] = value;
    }

    pub fn get_tuple(&self, tuple: &[usize], component: usize) -> f64 {
        self.get(tuple_rank(self.dim, tuple), component)
    }

    pub fn set_tuple(&mut self, tuple: &[usize], component: usize, value: f64) {
        self.set(tuple_rank(self.dim, tuple), component, value)
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    pub fn add_scaled(&mut self, other: &FormValue, s: f64) {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += s * b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Evaluates the tensor on k vectors: Σ_I ξ_I det[v_m[i_l]].
    pub fn eval_on(&self, vectors: &[&[f64]]) -> Vec<f64> {
        let k = self.degree;
        assert_eq!(vectors.len(), k);
        let mut out = vec![0.0; self.vec_dim];
        if k > self.dim {
            return out;
        }
        for (slot, tuple) in index_tuples(self.dim, k).iter().enumerate() {
            let mut m = vec![0.0; k * k];
            for (a, &i) in tuple.iter().enumerate() {
                for (b, v) in vectors.iter().enumerate() {
                    m[a * k + b] = v[i];
                }
            }
            let d = if k == 0 { 1.0 } else { det_small(k, &m) };
            for c in 0..self.vec_dim {
                out[c] += self.get(slot, c) * d;
            }
        }
        out
    }
}

/// Exterior product of a covector with a k-form:
/// coefficient at I equals Σ_j (−1)^{j−1} v_{i_j} ξ_{I∖i_j}.
pub fn wedge_covector(v: &[f64], xi: &FormValue) -> Result<FormValue> {
    let n = xi.dim();
    if v.len() != n {
        return Err(Error::Mismatch(format!(
            "covector length {} vs ambient dimension {}",
            v.len(),
            n
        )));
    }
    let k = xi.degree();
    if k >= n {
        return Err(Error::Degree(format!(
            "cannot wedge a covector onto degree {k} in dimension {n}"
        )));
    }
    let mut out = FormValue::zero(n, k + 1, xi.vec_dim());
    for (slot, tuple) in index_tuples(n, k + 1).iter().enumerate() {
        for (pos, &i) in tuple.iter().enumerate() {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            let mut reduced = tuple.clone();
            reduced.remove(pos);
            let src = tuple_rank(n, &reduced);
            for c in 0..xi.vec_dim() {
                let val = out.get(slot, c) + sign * vi * xi.get(src, c);
                out.set(slot, c, val);
            }
        }
    }
    Ok(out)
}

/// Interior product (v ⌟ ξ)_I = Σ_j v^j ξ_{jI}, indices raised with g⁻¹.
pub fn interior(v: &[f64], xi: &FormValue, g: &MetricTensor) -> Result<FormValue> {
    let n = xi.dim();
    if v.len() != n || g.dim() != n {
        return Err(Error::Mismatch("covector/metric dimension mismatch".into()));
    }
    let k = xi.degree();
    if k == 0 {
        return Err(Error::Degree("interior product of a 0-form".into()));
    }
    let raised = g.raise(v);
    let mut out = FormValue::zero(n, k - 1, xi.vec_dim());
    for (slot, tuple) in index_tuples(n, k - 1).iter().enumerate() {
        for j in 0..n {
            if raised[j] == 0.0 || tuple.contains(&j) {
                continue;
            }
            // sign moving j into sorted position within (j, I)
            let less = tuple.iter().filter(|&&t| t < j).count();
            let sign = if less % 2 == 0 { 1.0 } else { -1.0 };
            let mut full = tuple.clone();
            full.insert(less, j);
            let src = tuple_rank(n, &full);
            for c in 0..xi.vec_dim() {
                let val = out.get(slot, c) + sign * raised[j] * xi.get(src, c);
                out.set(slot, c, val);
            }
        }
    }
    Ok(out)
}

/// Hodge star (⋆ξ)_I = √g G^{JK} ξ_J sign(K, I) with K the complement of I.
pub fn hodge_star(xi: &FormValue, g: &MetricTensor) -> Result<FormValue> {
    let n = xi.dim();
    if g.dim() != n {
        return Err(Error::Mismatch("metric dimension mismatch".into()));
    }
    let k = xi.degree();
    if k > n {
        return Err(Error::Degree(format!(
            "degree {k} above ambient dimension {n}"
        )));
    }
    let sg = g.sqrt_det();
    let mut out = FormValue::zero(n, n - k, xi.vec_dim());
    let src_tuples = index_tuples(n, k);
    for (slot, tuple) in index_tuples(n, n - k).iter().enumerate() {
        let comp: Vec<usize> = (0..n).filter(|i| !tuple.contains(i)).collect();
        let sign = shuffle_sign(&comp, tuple);
        for (js, jt) in src_tuples.iter().enumerate() {
            let gm = g.minor(jt, &comp);
            if gm == 0.0 {
                continue;
            }
            for c in 0..xi.vec_dim() {
                let val = out.get(slot, c) + sg * gm * xi.get(js, c) * sign;
                out.set(slot, c, val);
            }
        }
    }
    Ok(out)
}

/// Scalar product ⟨ξ, η⟩ = Σ_{I,J} ⟨ξ_I, η_J⟩ G^{IJ}.
pub fn inner(xi: &FormValue, eta: &FormValue, g: &MetricTensor) -> Result<f64> {
    if xi.degree() != eta.degree() || xi.vec_dim() != eta.vec_dim() || xi.dim() != eta.dim() {
        return Err(Error::Mismatch(
            "inner product arguments differ in shape".into(),
        ));
    }
    let n = xi.dim();
    if g.dim() != n {
        return Err(Error::Mismatch("metric dimension mismatch".into()));
    }
    let nc = xi.vec_dim();
    if g.is_euclidean() {
        let mut s = 0.0;
        for (a, b) in xi.coeffs.iter().zip(&eta.coeffs) {
            s += a * b;
        }
        return Ok(s);
    }
    let tuples = index_tuples(n, xi.degree());
    let mut s = 0.0;
    for (si, ti) in tuples.iter().enumerate() {
        for (sj, tj) in tuples.iter().enumerate() {
            let gm = g.minor(ti, tj);
            if gm == 0.0 {
                continue;
            }
            let mut dot = 0.0;
            for c in 0..nc {
                dot += xi.get(si, c) * eta.get(sj, c);
            }
            s += gm * dot;
        }
    }
    Ok(s)
}

/// Pointwise norm |ξ|_g = ⟨ξ, ξ⟩^{1/2}.
pub fn norm(xi: &FormValue, g: &MetricTensor) -> f64 {
    inner(xi, xi, g)
        .expect("norm of a well-formed value")
        .max(0.0)
        .sqrt()
}
