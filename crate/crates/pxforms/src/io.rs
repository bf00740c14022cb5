//! Line-oriented text formats for meshes, cochains and per-cell scalar
//! fields.
//!
//! Mesh file:
//! ```text
//! dim <n> <vcount> <ccount>
//! <n coordinates>            # vcount vertex lines
//! <n+1 vertex indices>       # ccount top-cell lines
//! metric <cell> <n*n row-major entries>   # optional per-cell blocks
//! ```
//!
//! Cochain file:
//! ```text
//! degree <k> vecdim <N> count <count>
//! <N reals>                  # one line per simplex, canonical order
//! ```
//!
//! Field file: one scalar per top cell in canonical cell order.
//! `#` starts a comment anywhere; blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::cochain::Cochain;
use crate::error::{Error, Result};
use crate::exterior::MetricTensor;
use crate::mesh::{MetricSpec, SimplicialComplex};

fn strip(line: &str) -> &str {
    match line.find('#') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    /// next non-empty line as (1-based number, content)
    fn next_content(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            let s = strip(raw);
            if !s.is_empty() {
                return Some((i + 1, s));
            }
        }
        None
    }
}

pub fn parse_mesh(text: &str) -> Result<SimplicialComplex> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines
        .next_content()
        .ok_or_else(|| parse_err(1, "empty mesh file"))?;
    let mut it = header.split_whitespace();
    if it.next() != Some("dim") {
        return Err(parse_err(ln, "mesh header must start with `dim`"));
    }
    let dim: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "cannot parse mesh dimension"))?;
    let vcount: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "cannot parse vertex count"))?;
    let ccount: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(ln, "cannot parse cell count"))?;
    let mut coords = Vec::with_capacity(vcount * dim);
    for _ in 0..vcount {
        let (ln, s) = lines
            .next_content()
            .ok_or_else(|| parse_err(0, "unexpected end of file in vertex block"))?;
        let vals: Vec<f64> = s
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad vertex coordinate: {e}")))?;
        if vals.len() != dim {
            return Err(parse_err(
                ln,
                format!("expected {dim} coordinates, got {}", vals.len()),
            ));
        }
        coords.extend(vals);
    }
    let mut cells = Vec::with_capacity(ccount);
    for _ in 0..ccount {
        let (ln, s) = lines
            .next_content()
            .ok_or_else(|| parse_err(0, "unexpected end of file in cell block"))?;
        let idx: Vec<usize> = s
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad cell index: {e}")))?;
        if idx.len() != dim + 1 {
            return Err(parse_err(
                ln,
                format!("expected {} vertex indices, got {}", dim + 1, idx.len()),
            ));
        }
        cells.push(idx);
    }
    // optional per-cell metric blocks
    let mut metrics: Option<Vec<MetricTensor>> = None;
    while let Some((ln, s)) = lines.next_content() {
        let mut it = s.split_whitespace();
        if it.next() != Some("metric") {
            return Err(parse_err(
                ln,
                "expected `metric <cell> <entries>` or end of file",
            ));
        }
        let cell: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(ln, "cannot parse metric cell index"))?;
        if cell >= ccount {
            return Err(parse_err(ln, format!("metric cell {cell} out of range")));
        }
        let entries: Vec<f64> = it
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad metric entry: {e}")))?;
        if entries.len() != dim * dim {
            return Err(parse_err(
                ln,
                format!(
                    "expected {} metric entries, got {}",
                    dim * dim,
                    entries.len()
                ),
            ));
        }
        let g = MetricTensor::new(dim, &entries).map_err(|e| parse_err(ln, e.to_string()))?;
        let slot = metrics.get_or_insert_with(|| vec![MetricTensor::euclidean(dim); ccount]);
        slot[cell] = g;
    }
    let spec = match metrics {
        None => MetricSpec::Euclidean,
        Some(v) => MetricSpec::PerCell(v),
    };
    SimplicialComplex::build(dim, coords, &cells, spec)
}

pub fn read_mesh(path: &Path) -> Result<SimplicialComplex> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text)
}

pub fn format_mesh(complex: &SimplicialComplex) -> String {
    let n = complex.dim();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "dim {} {} {}",
        n,
        complex.num_vertices(),
        complex.num_cells()
    );
    for v in 0..complex.num_vertices() {
        let p = complex.vertex(v);
        let line: Vec<String> = p.iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    for c in 0..complex.num_cells() {
        let t = complex.simplex_vertices(n, c);
        let line: Vec<String> = t.iter().map(|x| format!("{x}")).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    for c in 0..complex.num_cells() {
        let g = complex.cell_metric(c);
        if !g.is_euclidean() {
            let entries: Vec<String> = g.entries().iter().map(|x| format!("{x}")).collect();
            let _ = writeln!(out, "metric {} {}", c, entries.join(" "));
        }
    }
    out
}

pub fn write_mesh(path: &Path, complex: &SimplicialComplex) -> Result<()> {
    std::fs::write(path, format_mesh(complex))?;
    Ok(())
}

pub fn parse_cochain(text: &str) -> Result<Cochain> {
    let mut lines = Lines::new(text);
    let (ln, header) = lines
        .next_content()
        .ok_or_else(|| parse_err(1, "empty cochain file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 6 || toks[0] != "degree" || toks[2] != "vecdim" || toks[4] != "count" {
        return Err(parse_err(
            ln,
            "cochain header must be `degree <k> vecdim <N> count <count>`",
        ));
    }
    let degree: usize = toks[1].parse().map_err(|_| parse_err(ln, "bad degree"))?;
    let vec_dim: usize = toks[3].parse().map_err(|_| parse_err(ln, "bad vecdim"))?;
    let count: usize = toks[5].parse().map_err(|_| parse_err(ln, "bad count"))?;
    let mut values = Vec::with_capacity(count * vec_dim);
    for _ in 0..count {
        let (ln, s) = lines
            .next_content()
            .ok_or_else(|| parse_err(0, "unexpected end of file in cochain values"))?;
        let vals: Vec<f64> = s
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_err(ln, format!("bad cochain value: {e}")))?;
        if vals.len() != vec_dim {
            return Err(parse_err(
                ln,
                format!("expected {vec_dim} values, got {}", vals.len()),
            ));
        }
        values.extend(vals);
    }
    Cochain::from_values(degree, vec_dim, values)
}

pub fn read_cochain(path: &Path) -> Result<Cochain> {
    let text = std::fs::read_to_string(path)?;
    parse_cochain(&text)
}

pub fn format_cochain(u: &Cochain) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "degree {} vecdim {} count {}",
        u.degree(),
        u.vec_dim(),
        u.len()
    );
    for i in 0..u.len() {
        let line: Vec<String> = (0..u.vec_dim())
            .map(|c| format!("{}", u.get(i, c)))
            .collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn write_cochain(path: &Path, u: &Cochain) -> Result<()> {
    std::fs::write(path, format_cochain(u))?;
    Ok(())
}

/// Per-top-cell scalar table: one value per line in canonical cell order.
pub fn parse_field(text: &str, expected: usize) -> Result<Vec<f64>> {
    let mut lines = Lines::new(text);
    let mut values = Vec::with_capacity(expected);
    while let Some((ln, s)) = lines.next_content() {
        for tok in s.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|e| parse_err(ln, format!("bad field value: {e}")))?;
            values.push(v);
        }
    }
    if values.len() != expected {
        return Err(Error::Field(format!(
            "field table has {} values for {} cells",
            values.len(),
            expected
        )));
    }
    Ok(values)
}

pub fn read_field(path: &Path, expected: usize) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    parse_field(&text, expected)
}
