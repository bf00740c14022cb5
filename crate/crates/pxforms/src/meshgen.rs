//! Structured mesh generators: interval, square (alternating-diagonal
//! triangles), cube (Kuhn tetrahedra) and a hexagonal-ring unit disk.

use crate::error::{Error, Result};
use crate::mesh::{MetricSpec, SimplicialComplex};

pub fn interval_cells(m: usize, lo: f64, hi: f64) -> (Vec<f64>, Vec<Vec<usize>>) {
    let h = (hi - lo) / m as f64;
    let coords: Vec<f64> = (0..=m).map(|i| lo + i as f64 * h).collect();
    let cells: Vec<Vec<usize>> = (0..m).map(|i| vec![i, i + 1]).collect();
    (coords, cells)
}

pub fn interval_mesh(m: usize, lo: f64, hi: f64) -> Result<SimplicialComplex> {
    if m == 0 || !(hi > lo) {
        return Err(Error::Mesh("interval mesh needs m ≥ 1 and hi > lo".into()));
    }
    let (coords, cells) = interval_cells(m, lo, hi);
    SimplicialComplex::build(1, coords, &cells, MetricSpec::Euclidean)
}

/// m×m squares, each split along a diagonal that alternates with the parity
/// of (i+j).
pub fn square_cells(m: usize, bounds: [f64; 4]) -> (Vec<f64>, Vec<Vec<usize>>) {
    let [x0, x1, y0, y1] = bounds;
    let hx = (x1 - x0) / m as f64;
    let hy = (y1 - y0) / m as f64;
    let idx = |i: usize, j: usize| j * (m + 1) + i;
    let mut coords = Vec::with_capacity((m + 1) * (m + 1) * 2);
    for j in 0..=m {
        for i in 0..=m {
            coords.push(x0 + i as f64 * hx);
            coords.push(y0 + j as f64 * hy);
        }
    }
    let mut cells = Vec::with_capacity(2 * m * m);
    for j in 0..m {
        for i in 0..m {
            let v00 = idx(i, j);
            let v10 = idx(i + 1, j);
            let v01 = idx(i, j + 1);
            let v11 = idx(i + 1, j + 1);
            if (i + j) % 2 == 0 {
                cells.push(vec![v00, v10, v11]);
                cells.push(vec![v00, v11, v01]);
            } else {
                cells.push(vec![v00, v10, v01]);
                cells.push(vec![v10, v11, v01]);
            }
        }
    }
    (coords, cells)
}

pub fn square_mesh(m: usize, bounds: [f64; 4]) -> Result<SimplicialComplex> {
    if m == 0 || !(bounds[1] > bounds[0]) || !(bounds[3] > bounds[2]) {
        return Err(Error::Mesh(
            "square mesh needs m ≥ 1 and increasing bounds".into(),
        ));
    }
    let (coords, cells) = square_cells(m, bounds);
    SimplicialComplex::build(2, coords, &cells, MetricSpec::Euclidean)
}

/// m×m×m cubes, each split into 6 Kuhn tetrahedra (one per axis
/// permutation); the subdivision is conforming across cube faces.
pub fn cube_cells(m: usize, bounds: [f64; 6]) -> (Vec<f64>, Vec<Vec<usize>>) {
    let [x0, x1, y0, y1, z0, z1] = bounds;
    let h = [
        (x1 - x0) / m as f64,
        (y1 - y0) / m as f64,
        (z1 - z0) / m as f64,
    ];
    let lo = [x0, y0, z0];
    let idx = |i: usize, j: usize, k: usize| (k * (m + 1) + j) * (m + 1) + i;
    let mut coords = Vec::with_capacity((m + 1).pow(3) * 3);
    for k in 0..=m {
        for j in 0..=m {
            for i in 0..=m {
                coords.push(lo[0] + i as f64 * h[0]);
                coords.push(lo[1] + j as f64 * h[1]);
                coords.push(lo[2] + k as f64 * h[2]);
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut cells = Vec::with_capacity(6 * m * m * m);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                for perm in PERMS {
                    let mut p = [i, j, k];
                    let mut tet = vec![idx(p[0], p[1], p[2])];
                    for &axis in &perm {
                        p[axis] += 1;
                        tet.push(idx(p[0], p[1], p[2]));
                    }
                    cells.push(tet);
                }
            }
        }
    }
    (coords, cells)
}

pub fn cube_mesh(m: usize, bounds: [f64; 6]) -> Result<SimplicialComplex> {
    if m == 0 || !(bounds[1] > bounds[0]) || !(bounds[3] > bounds[2]) || !(bounds[5] > bounds[4]) {
        return Err(Error::Mesh(
            "cube mesh needs m ≥ 1 and increasing bounds".into(),
        ));
    }
    let (coords, cells) = cube_cells(m, bounds);
    SimplicialComplex::build(3, coords, &cells, MetricSpec::Euclidean)
}

/// Unit disk centered at the origin: `rings` concentric hexagonal rings,
/// ring j carrying 6j vertices at radius j/rings. 6·rings² triangles.
pub fn disk_cells(rings: usize) -> (Vec<f64>, Vec<Vec<usize>>) {
    let m = rings;
    let ring_start = |j: usize| if j == 0 { 0 } else { 1 + 3 * j * (j - 1) };
    let ring_vertex = |j: usize, i: usize| {
        if j == 0 {
            0
        } else {
            ring_start(j) + i % (6 * j)
        }
    };
    let mut coords = vec![0.0, 0.0];
    for j in 1..=m {
        let r = j as f64 / m as f64;
        for i in 0..6 * j {
            let a = 2.0 * std::f64::consts::PI * i as f64 / (6 * j) as f64;
            coords.push(r * a.cos());
            coords.push(r * a.sin());
        }
    }
    let mut cells = Vec::with_capacity(6 * m * m);
    for j in 1..=m {
        for s in 0..6 {
            for t in 0..j {
                let o0 = ring_vertex(j, s * j + t);
                let o1 = ring_vertex(j, s * j + t + 1);
                let i0 = ring_vertex(j - 1, s * (j - 1) + t);
                cells.push(vec![i0, o0, o1]);
                if t + 1 < j {
                    let i1 = ring_vertex(j - 1, s * (j - 1) + t + 1);
                    cells.push(vec![i0, o1, i1]);
                }
            }
        }
    }
    (coords, cells)
}

pub fn disk_mesh(rings: usize) -> Result<SimplicialComplex> {
    if rings == 0 {
        return Err(Error::Mesh("disk mesh needs at least one ring".into()));
    }
    let (coords, cells) = disk_cells(rings);
    SimplicialComplex::build(2, coords, &cells, MetricSpec::Euclidean)
}

/// Disk mesh with a deterministic angular jitter. Boundary vertices stay on
/// the unit circle; the perturbation breaks the mirror symmetries of the
/// uniform rings that would otherwise cancel boundary quadrature defects.
pub fn disk_mesh_jittered(rings: usize, amplitude: f64) -> Result<SimplicialComplex> {
    if rings == 0 {
        return Err(Error::Mesh("disk mesh needs at least one ring".into()));
    }
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::Mesh("jitter amplitude must lie in [0, 0.5)".into()));
    }
    let (mut coords, cells) = disk_cells(rings);
    // splitmix-style hash to a value in [-0.5, 0.5)
    let jitter = |i: u64| -> f64 {
        let mut z = i
            .wrapping_mul(0x9E3779B97F4A7C15)
            .wrapping_add(0xD1B54A32D192ED03);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        ((z >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let m = rings;
    let mut v = 1usize;
    for j in 1..=m {
        let r = j as f64 / m as f64;
        let step = 2.0 * std::f64::consts::PI / (6 * j) as f64;
        for i in 0..6 * j {
            let a = step * (i as f64 + amplitude * jitter(v as u64));
            // interior rings also move radially; the boundary ring must not
            let rr = if j < m {
                r + amplitude * jitter(v as u64 ^ 0xABCD) / m as f64
            } else {
                r
            };
            coords[2 * v] = rr * a.cos();
            coords[2 * v + 1] = rr * a.sin();
            v += 1;
        }
    }
    SimplicialComplex::build(2, coords, &cells, MetricSpec::Euclidean)
}
