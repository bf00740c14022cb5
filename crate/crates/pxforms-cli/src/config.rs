//! Experiment configuration: structured text with [mesh], [model], [solver],
//! [diagnostics], [output] sections. See docs/config.md for the grammar.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use pxforms::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Generator(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScalarSpec {
    Const(f64),
    Expr(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormSpec {
    Zero,
    /// component expressions in lexicographic tuple order; each component
    /// holds vec_dim expressions separated by `;`
    Components(Vec<String>),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UhlenbeckMode {
    Auto,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub tol: f64,
    pub max_iters: usize,
    pub ls_backtrack: f64,
    pub ls_c1: f64,
    pub precond: String,
    pub seed: u64,
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            tol: 1e-9,
            max_iters: 50_000,
            ls_backtrack: 0.5,
            ls_c1: 1e-4,
            precond: "none".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagSection {
    pub seed: u64,
    /// pair radius R for the probe and sup-bound checks
    pub radius: f64,
    /// interior lattice points per axis
    pub lattice: usize,
    /// base radius and level count of the dyadic decay fits
    pub rho0: f64,
    pub levels: usize,
    pub sigma_grid: Vec<f64>,
    pub c_probe: f64,
    /// 0 skips the inequality battery
    pub algebra_samples: usize,
    pub meyers: bool,
    pub morrey: bool,
    pub campanato: bool,
    pub uhlenbeck: UhlenbeckMode,
    pub moduli: bool,
}

impl Default for DiagSection {
    fn default() -> Self {
        DiagSection {
            seed: 42,
            radius: 0.2,
            lattice: 3,
            rho0: 0.2,
            levels: 4,
            sigma_grid: (1..=10).map(|i| 0.05 * i as f64).collect(),
            c_probe: 10.0,
            algebra_samples: 0,
            meyers: true,
            morrey: true,
            campanato: true,
            uhlenbeck: UhlenbeckMode::Auto,
            moduli: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub mesh: MeshSource,
    pub degree: usize,
    pub vec_dim: usize,
    pub p: ScalarSpec,
    pub a: ScalarSpec,
    pub mu: f64,
    pub f: FormSpec,
    pub u0: FormSpec,
    pub boundary: BoundaryKind,
    pub solver: SolverSection,
    pub diag: DiagSection,
    pub output_dir: PathBuf,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

struct Sections {
    /// section -> key -> (line, value)
    map: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

impl Sections {
    fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, BTreeMap<String, (usize, String)>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find('#') {
                Some(p) => raw[..p].trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(perr(line_no, "unterminated section header"));
                }
                let name = line[1..line.len() - 1].trim().to_string();
                if !matches!(
                    name.as_str(),
                    "mesh" | "model" | "solver" | "diagnostics" | "output"
                ) {
                    return Err(perr(line_no, format!("unknown section [{name}]")));
                }
                map.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let section = current
                .clone()
                .ok_or_else(|| perr(line_no, "key outside of any [section]"))?;
            let eq = line
                .find('=')
                .ok_or_else(|| perr(line_no, "expected `key = value`"))?;
            let key = line[..eq].trim().to_string();
            let value = line[eq + 1..].trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(perr(line_no, "empty key or value"));
            }
            let sec = map.get_mut(&section).unwrap();
            if sec.insert(key.clone(), (line_no, value)).is_some() {
                return Err(perr(
                    line_no,
                    format!("duplicate key `{key}` in [{section}]"),
                ));
            }
        }
        Ok(Sections { map })
    }

    fn get(&self, section: &str, key: &str) -> Option<&(usize, String)> {
        self.map.get(section).and_then(|s| s.get(key))
    }

    fn require(&self, section: &str, key: &str) -> Result<&(usize, String)> {
        self.get(section, key)
            .ok_or_else(|| perr(0, format!("missing required key `{key}` in [{section}]")))
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse()
        .map_err(|_| perr(line, format!("`{key}` expects a number, got `{v}`")))
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| {
        perr(
            line,
            format!("`{key}` expects a nonnegative integer, got `{v}`"),
        )
    })
}

fn parse_u64(line: usize, key: &str, v: &str) -> Result<u64> {
    v.parse().map_err(|_| {
        perr(
            line,
            format!("`{key}` expects a nonnegative integer, got `{v}`"),
        )
    })
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(perr(line, format!("`{key}` expects on/off, got `{v}`"))),
    }
}

fn parse_scalar_spec(v: &str) -> ScalarSpec {
    if let Some(path) = v.strip_prefix("file:") {
        return ScalarSpec::File(PathBuf::from(path));
    }
    if let Ok(c) = v.parse::<f64>() {
        return ScalarSpec::Const(c);
    }
    ScalarSpec::Expr(v.to_string())
}

fn parse_form_spec(line: usize, v: &str) -> Result<FormSpec> {
    if v == "zero" || v == "0" {
        return Ok(FormSpec::Zero);
    }
    if let Some(path) = v.strip_prefix("file:") {
        return Ok(FormSpec::File(PathBuf::from(path)));
    }
    if v.starts_with('[') && v.ends_with(']') {
        let inner = &v[1..v.len() - 1];
        let comps: Vec<String> = split_top_level(inner)
            .into_iter()
            .map(|s| s.trim().to_string())
            .collect();
        if comps.iter().any(|c| c.is_empty()) {
            return Err(perr(line, "empty component in form list"));
        }
        return Ok(FormSpec::Components(comps));
    }
    Err(perr(
        line,
        format!("form spec must be `zero`, `file:PATH` or `[expr, ...]`, got `{v}`"),
    ))
}

/// splits on commas that are not inside parentheses
fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() || !out.is_empty() {
        out.push(cur);
    }
    out
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        let s = Sections::parse(text)?;

        let (ln, src) = s.require("mesh", "source")?;
        let mesh = if let Some(path) = src.strip_prefix("file:") {
            MeshSource::File(PathBuf::from(path))
        } else {
            let kind = src.split(':').next().unwrap_or("");
            if !matches!(kind, "interval" | "square" | "cube" | "disk") {
                return Err(perr(
                    *ln,
                    format!("mesh source must be file:PATH or interval/square/cube/disk generator, got `{src}`"),
                ));
            }
            MeshSource::Generator(src.clone())
        };

        let degree = match s.get("model", "degree") {
            Some((ln, v)) => parse_usize(*ln, "degree", v)?,
            None => 0,
        };
        let vec_dim = match s.get("model", "vec_dim") {
            Some((ln, v)) => {
                let n = parse_usize(*ln, "vec_dim", v)?;
                if n == 0 {
                    return Err(perr(*ln, "`vec_dim` must be at least 1"));
                }
                n
            }
            None => 1,
        };
        let p = match s.get("model", "p") {
            Some((_, v)) => parse_scalar_spec(v),
            None => ScalarSpec::Const(2.0),
        };
        if let ScalarSpec::Const(c) = p {
            if !(c > 1.0) {
                let ln = s.get("model", "p").map(|x| x.0).unwrap_or(0);
                return Err(perr(
                    ln,
                    format!("exponent bound violated: requires p⁻ > 1, got p = {c}"),
                ));
            }
        }
        let a = match s.get("model", "a") {
            Some((_, v)) => parse_scalar_spec(v),
            None => ScalarSpec::Const(1.0),
        };
        let mu = match s.get("model", "mu") {
            Some((ln, v)) => {
                let m = parse_f64(*ln, "mu", v)?;
                if m < 0.0 {
                    return Err(perr(*ln, "`mu` must be nonnegative"));
                }
                m
            }
            None => 0.0,
        };
        let f = match s.get("model", "f") {
            Some((ln, v)) => parse_form_spec(*ln, v)?,
            None => FormSpec::Zero,
        };
        let u0 = match s.get("model", "u0") {
            Some((ln, v)) => parse_form_spec(*ln, v)?,
            None => FormSpec::Zero,
        };
        let boundary = match s.get("model", "boundary") {
            Some((ln, v)) => match v.as_str() {
                "dirichlet" => BoundaryKind::Dirichlet,
                "neumann" => BoundaryKind::Neumann,
                _ => {
                    return Err(perr(
                        *ln,
                        format!("boundary must be dirichlet or neumann, got `{v}`"),
                    ))
                }
            },
            None => BoundaryKind::Dirichlet,
        };

        let mut solver = SolverSection::default();
        if let Some((ln, v)) = s.get("solver", "tol") {
            solver.tol = parse_f64(*ln, "tol", v)?;
            if !(solver.tol > 0.0) {
                return Err(perr(*ln, "`tol` must be positive"));
            }
        }
        if let Some((ln, v)) = s.get("solver", "max_iters") {
            solver.max_iters = parse_usize(*ln, "max_iters", v)?;
        }
        if let Some((ln, v)) = s.get("solver", "ls_backtrack") {
            solver.ls_backtrack = parse_f64(*ln, "ls_backtrack", v)?;
            if !(solver.ls_backtrack > 0.0 && solver.ls_backtrack < 1.0) {
                return Err(perr(*ln, "`ls_backtrack` must lie in (0,1)"));
            }
        }
        if let Some((ln, v)) = s.get("solver", "ls_c1") {
            solver.ls_c1 = parse_f64(*ln, "ls_c1", v)?;
            if !(solver.ls_c1 > 0.0 && solver.ls_c1 < 1.0) {
                return Err(perr(*ln, "`ls_c1` must lie in (0,1)"));
            }
        }
        if let Some((ln, v)) = s.get("solver", "precond") {
            if !matches!(v.as_str(), "none" | "p2") {
                return Err(perr(*ln, format!("precond must be none or p2, got `{v}`")));
            }
            solver.precond = v.clone();
        }
        if let Some((ln, v)) = s.get("solver", "seed") {
            solver.seed = parse_u64(*ln, "seed", v)?;
        }

        let mut diag = DiagSection::default();
        if let Some((ln, v)) = s.get("diagnostics", "seed") {
            diag.seed = parse_u64(*ln, "seed", v)?;
        }
        if let Some((ln, v)) = s.get("diagnostics", "radius") {
            diag.radius = parse_f64(*ln, "radius", v)?;
            if !(diag.radius > 0.0) {
                return Err(perr(*ln, "`radius` must be positive"));
            }
        }
        if let Some((ln, v)) = s.get("diagnostics", "lattice") {
            diag.lattice = parse_usize(*ln, "lattice", v)?;
        }
        if let Some((ln, v)) = s.get("diagnostics", "rho0") {
            diag.rho0 = parse_f64(*ln, "rho0", v)?;
            if !(diag.rho0 > 0.0) {
                return Err(perr(*ln, "`rho0` must be positive"));
            }
        }
        if let Some((ln, v)) = s.get("diagnostics", "levels") {
            diag.levels = parse_usize(*ln, "levels", v)?;
            if diag.levels < 2 {
                return Err(perr(*ln, "`levels` must be at least 2"));
            }
        }
        if let Some((ln, v)) = s.get("diagnostics", "sigma_grid") {
            let vals: std::result::Result<Vec<f64>, _> =
                v.split(',').map(|t| t.trim().parse::<f64>()).collect();
            diag.sigma_grid =
                vals.map_err(|_| perr(*ln, "`sigma_grid` expects comma-separated numbers"))?;
            if diag.sigma_grid.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
                return Err(perr(*ln, "`sigma_grid` values must lie in (0,1)"));
            }
        }
        if let Some((ln, v)) = s.get("diagnostics", "c_probe") {
            diag.c_probe = parse_f64(*ln, "c_probe", v)?;
        }
        if let Some((ln, v)) = s.get("diagnostics", "algebra_samples") {
            diag.algebra_samples = parse_usize(*ln, "algebra_samples", v)?;
        }
        if let Some((ln, v)) = s.get("diagnostics", "meyers") {
            diag.meyers = parse_bool(*ln, "meyers", v)?;
        }
        if let Some((ln, v)) = s.get("diagnostics", "morrey") {
            diag.morrey = parse_bool(*ln, "morrey", v)?;
        }
        if let Some((ln, v)) = s.get("diagnostics", "campanato") {
            diag.campanato = parse_bool(*ln, "campanato", v)?;
        }
        if let Some((ln, v)) = s.get("diagnostics", "uhlenbeck") {
            diag.uhlenbeck = match v.as_str() {
                "auto" => UhlenbeckMode::Auto,
                "off" => UhlenbeckMode::Off,
                _ => {
                    return Err(perr(
                        *ln,
                        format!("uhlenbeck must be auto or off, got `{v}`"),
                    ))
                }
            };
        }
        if let Some((ln, v)) = s.get("diagnostics", "moduli") {
            diag.moduli = parse_bool(*ln, "moduli", v)?;
        }

        let output_dir = match s.get("output", "dir") {
            Some((_, v)) => PathBuf::from(v),
            None => PathBuf::from("out"),
        };

        Ok(Config {
            mesh,
            degree,
            vec_dim,
            p,
            a,
            mu,
            f,
            u0,
            boundary,
            solver,
            diag,
            output_dir,
        })
    }

    /// Canonical echo of the experiment definition. The [output] section is
    /// intentionally omitted so the echo (and its hash) identify the
    /// experiment, not where its results land.
    pub fn canonical_echo(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "[mesh]");
        match &self.mesh {
            MeshSource::Generator(g) => {
                let _ = writeln!(out, "source = {g}");
            }
            MeshSource::File(p) => {
                let _ = writeln!(out, "source = file:{}", p.display());
            }
        }
        let _ = writeln!(out, "\n[model]");
        let _ = writeln!(out, "degree = {}", self.degree);
        let _ = writeln!(out, "vec_dim = {}", self.vec_dim);
        let scalar = |s: &ScalarSpec| match s {
            ScalarSpec::Const(c) => format!("{c}"),
            ScalarSpec::Expr(e) => e.clone(),
            ScalarSpec::File(p) => format!("file:{}", p.display()),
        };
        let _ = writeln!(out, "p = {}", scalar(&self.p));
        let _ = writeln!(out, "a = {}", scalar(&self.a));
        let _ = writeln!(out, "mu = {}", self.mu);
        let form = |f: &FormSpec| match f {
            FormSpec::Zero => "zero".to_string(),
            FormSpec::Components(cs) => format!("[{}]", cs.join(", ")),
            FormSpec::File(p) => format!("file:{}", p.display()),
        };
        let _ = writeln!(out, "f = {}", form(&self.f));
        let _ = writeln!(out, "u0 = {}", form(&self.u0));
        let _ = writeln!(
            out,
            "boundary = {}",
            match self.boundary {
                BoundaryKind::Dirichlet => "dirichlet",
                BoundaryKind::Neumann => "neumann",
            }
        );
        let _ = writeln!(out, "\n[solver]");
        let _ = writeln!(out, "tol = {}", self.solver.tol);
        let _ = writeln!(out, "max_iters = {}", self.solver.max_iters);
        let _ = writeln!(out, "ls_backtrack = {}", self.solver.ls_backtrack);
        let _ = writeln!(out, "ls_c1 = {}", self.solver.ls_c1);
        let _ = writeln!(out, "precond = {}", self.solver.precond);
        let _ = writeln!(out, "seed = {}", self.solver.seed);
        let _ = writeln!(out, "\n[diagnostics]");
        let _ = writeln!(out, "seed = {}", self.diag.seed);
        let _ = writeln!(out, "radius = {}", self.diag.radius);
        let _ = writeln!(out, "lattice = {}", self.diag.lattice);
        let _ = writeln!(out, "rho0 = {}", self.diag.rho0);
        let _ = writeln!(out, "levels = {}", self.diag.levels);
        let grid: Vec<String> = self
            .diag
            .sigma_grid
            .iter()
            .map(|x| format!("{x}"))
            .collect();
        let _ = writeln!(out, "sigma_grid = {}", grid.join(","));
        let _ = writeln!(out, "c_probe = {}", self.diag.c_probe);
        let _ = writeln!(out, "algebra_samples = {}", self.diag.algebra_samples);
        let onoff = |b: bool| if b { "on" } else { "off" };
        let _ = writeln!(out, "meyers = {}", onoff(self.diag.meyers));
        let _ = writeln!(out, "morrey = {}", onoff(self.diag.morrey));
        let _ = writeln!(out, "campanato = {}", onoff(self.diag.campanato));
        let _ = writeln!(
            out,
            "uhlenbeck = {}",
            match self.diag.uhlenbeck {
                UhlenbeckMode::Auto => "auto",
                UhlenbeckMode::Off => "off",
            }
        );
        let _ = writeln!(out, "moduli = {}", onoff(self.diag.moduli));
        out
    }

    pub fn hash(&self) -> String {
        format!("{:016x}", fnv1a(self.canonical_echo().as_bytes()))
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[mesh]
source = square:8

[model]
degree = 0
vec_dim = 1
p = 2 + 0.5*x1
a = 1
mu = 0.1
f = [x2, 0 - x1]
u0 = zero
boundary = dirichlet

[solver]
tol = 1e-10
seed = 3

[diagnostics]
seed = 7
radius = 0.25

[output]
dir = out/test
"#;

    #[test]
    fn parse_and_roundtrip() {
        let cfg = Config::parse(SAMPLE).unwrap();
        assert_eq!(cfg.degree, 0);
        assert!(matches!(cfg.p, ScalarSpec::Expr(_)));
        assert_eq!(cfg.solver.tol, 1e-10);
        assert_eq!(cfg.diag.radius, 0.25);
        // echoed config reparses to an equal configuration (output dir is
        // not part of the echo)
        let echo = cfg.canonical_echo();
        let back = Config::parse(&echo).unwrap();
        let mut cfg2 = cfg.clone();
        cfg2.output_dir = PathBuf::from("out");
        assert_eq!(back, cfg2);
        assert_eq!(back.hash(), cfg.hash());
    }

    #[test]
    fn rejects_p_at_one() {
        let text = SAMPLE.replace("p = 2 + 0.5*x1", "p = 1.0");
        let err = Config::parse(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("p⁻ > 1"), "{msg}");
    }

    #[test]
    fn rejects_unknown_section_and_bad_values() {
        assert!(Config::parse("[bogus]\nx = 1\n").is_err());
        let text = SAMPLE.replace("boundary = dirichlet", "boundary = periodic");
        assert!(Config::parse(&text).is_err());
        let text = SAMPLE.replace("tol = 1e-10", "tol = -1");
        assert!(Config::parse(&text).is_err());
    }

    #[test]
    fn line_numbers_in_errors() {
        let text = "[mesh]\nsource = square:4\n[model]\nmu = frogs\n";
        match Config::parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
