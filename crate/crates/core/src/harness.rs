//! Experiment drivers behind the command-line tool: configuration, sweeps,
//! and CSV/JSON output.
//!
//! Everything is deterministic; only the timing columns vary between runs.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{discretize, preset_geometry, Grid, Point, Preset};
use crate::material::Material;
use crate::operators::{from_flat, spectrum, BlockMatrix, Spectrum};
use crate::scattering::{
    boundary_data, circle_points, directions, evaluate, exact_field, far_field, far_field_gap, max_field_error,
    solve, FarField, Formulation, Incident, OperatorCache, Solution,
};

/// A scalar or a list of values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            Self::One(v) => vec![v.clone()],
            Self::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    #[serde(default = "default_lambda")]
    pub lambda: f64,
    #[serde(default = "one")]
    pub mu: f64,
    #[serde(default = "one")]
    pub rho: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        Self { lambda: 2.0, mu: 1.0, rho: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmresConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_maxit")]
    pub maxit: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self { tol: default_tol(), maxit: default_maxit() }
    }
}

/// Rectangular grid of field points, `[min, max, count]` per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldGrid {
    pub x: (f64, f64, usize),
    pub y: (f64, f64, usize),
}

impl FieldGrid {
    pub fn points(&self) -> Vec<Point> {
        let axis = |(a, b, n): (f64, f64, usize)| -> Vec<f64> {
            if n == 1 {
                vec![a]
            } else {
                (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
            }
        };
        let (xs, ys) = (axis(self.x), axis(self.y));
        ys.iter().flat_map(|&y| xs.iter().map(move |&x| [x, y])).collect()
    }
}

/// Error-measurement circle for convergence tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorPoints {
    pub radius: f64,
    #[serde(default = "default_error_count")]
    pub count: usize,
}

/// One JSON document drives every subcommand; fields a command does not use
/// are ignored by it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: Preset,
    #[serde(default)]
    pub material: MaterialConfig,
    pub omega: OneOrMany<f64>,
    #[serde(default = "default_incident")]
    pub incident: Incident,
    #[serde(default = "default_formulations")]
    pub formulation: OneOrMany<String>,
    /// Node count (`N` on arcs, half the node count on closed curves).
    #[serde(rename = "N", default)]
    pub n: Option<OneOrMany<usize>>,
    /// Iteration tables: `N = round(n_per_omega * omega)` when `N` is absent.
    #[serde(default)]
    pub n_per_omega: Option<f64>,
    #[serde(default)]
    pub gmres: GmresConfig,
    /// Output directory (created if missing).
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// `solve`: near-field points written to `field.csv`.
    #[serde(default)]
    pub near_field: Option<FieldGrid>,
    /// Convergence tables: reference size, default twice the largest `N`.
    #[serde(default)]
    pub reference_n: Option<usize>,
    #[serde(default = "default_reference_tol")]
    pub reference_tol: f64,
    #[serde(default)]
    pub error_points: Option<ErrorPoints>,
    /// Spectrum: `"identity"` or a formulation tag (its system operator).
    #[serde(default)]
    pub operator: Option<String>,
    /// Strip limit: ellipse semi-axes.
    #[serde(default)]
    pub a: Option<Vec<f64>>,
    /// Strip limit: Chebyshev size for the flat strip (default `N`).
    #[serde(default)]
    pub strip_n: Option<usize>,
}

fn default_lambda() -> f64 {
    2.0
}
fn one() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-8
}
fn default_maxit() -> usize {
    5000
}
fn default_error_count() -> usize {
    64
}
fn default_incident() -> Incident {
    Incident::Plane { angle: PI / 4.0 }
}
fn default_formulations() -> OneOrMany<String> {
    OneOrMany::Many(Formulation::ALL.iter().map(|f| f.tag().to_string()).collect())
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_reference_tol() -> f64 {
    1e-12
}

fn bad(field: &str, msg: impl Into<String>) -> Error {
    Error::Config { field: field.into(), msg: msg.into() }
}

/// Number of far-field directions in the strip-limit study.
pub const STRIP_LIMIT_DIRECTIONS: usize = 360;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| bad("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| bad("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every physical and numerical constraint up front.
    pub fn validate(&self) -> Result<()> {
        let omegas = self.omegas();
        if omegas.is_empty() {
            return Err(bad("omega", "empty sweep"));
        }
        for &w in &omegas {
            let m = &self.material;
            Material::new(m.lambda, m.mu, m.rho, w).map_err(|e| {
                let field = if !(m.mu > 0.0) {
                    "material.mu"
                } else if !(m.lambda + m.mu > 0.0) {
                    "material.lambda"
                } else if !(m.rho > 0.0) {
                    "material.rho"
                } else {
                    "omega"
                };
                bad(field, e.to_string())
            })?;
        }
        preset_geometry(self.geometry).map_err(|e| bad("geometry", e.to_string()))?;
        self.formulations()?;
        if let Some(n) = &self.n {
            let ns = n.to_vec();
            if ns.is_empty() {
                return Err(bad("N", "empty sweep"));
            }
            if let Some(&bad_n) = ns.iter().find(|&&n| n < 4) {
                return Err(bad("N", format!("need N >= 4, got {bad_n}")));
            }
        }
        if let Some(r) = self.n_per_omega {
            if !(r > 0.0 && r.is_finite()) {
                return Err(bad("n_per_omega", "must be positive"));
            }
        }
        if !(self.gmres.tol > 0.0 && self.gmres.tol < 1.0) {
            return Err(bad("gmres.tol", "must lie in (0, 1)"));
        }
        if self.gmres.maxit == 0 {
            return Err(bad("gmres.maxit", "must be positive"));
        }
        if !(self.reference_tol > 0.0 && self.reference_tol < 1.0) {
            return Err(bad("reference_tol", "must lie in (0, 1)"));
        }
        if let Some(r) = self.reference_n {
            if r < 4 {
                return Err(bad("reference_n", "need at least 4"));
            }
        }
        match self.incident {
            Incident::Plane { angle } if !angle.is_finite() => return Err(bad("incident.angle", "not finite")),
            Incident::Point { z0 } if !z0.iter().all(|v| v.is_finite()) => {
                return Err(bad("incident.z0", "not finite"))
            }
            _ => {}
        }
        if let Some(e) = &self.error_points {
            if !(e.radius > 0.0) || e.count == 0 {
                return Err(bad("error_points", "need radius > 0 and count > 0"));
            }
        }
        if let Some(g) = &self.near_field {
            if g.x.2 == 0 || g.y.2 == 0 {
                return Err(bad("near_field", "axis counts must be positive"));
            }
        }
        if let Some(op) = &self.operator {
            if op != "identity" && Formulation::from_tag(op).is_none() {
                return Err(bad("operator", format!("unknown operator `{op}`")));
            }
        }
        if let Some(a) = &self.a {
            if a.is_empty() || a.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(bad("a", "need a non-empty list of positive semi-axes"));
            }
        }
        if let Some(n) = self.strip_n {
            if n < 4 {
                return Err(bad("strip_n", "need at least 4"));
            }
        }
        Ok(())
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.omega.to_vec()
    }

    pub fn formulations(&self) -> Result<Vec<Formulation>> {
        let tags = self.formulation.to_vec();
        if tags.is_empty() {
            return Err(bad("formulation", "empty list"));
        }
        tags.iter()
            .map(|t| Formulation::from_tag(t).ok_or_else(|| bad("formulation", format!("unknown formulation `{t}`"))))
            .collect()
    }

    fn material(&self, omega: f64) -> Result<Material> {
        let m = &self.material;
        Material::new(m.lambda, m.mu, m.rho, omega)
    }

    fn sizes(&self) -> Result<Vec<usize>> {
        self.n.as_ref().map(|n| n.to_vec()).ok_or_else(|| bad("N", "missing"))
    }

    fn single<T: Clone>(v: Vec<T>, field: &str) -> Result<T> {
        match v.as_slice() {
            [x] => Ok(x.clone()),
            _ => Err(bad(field, "this command needs a single value")),
        }
    }
}

/// Whether every solve in a command reached the tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub converged: bool,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub formulation: String,
    pub omega: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub wall_seconds: f64,
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let p = dir.join(name);
    fs::write(&p, contents)?;
    Ok(p)
}

/// Shortest round-trip representation.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn setup(cfg: &RunConfig, omega: f64, n: usize) -> Result<(Material, Grid)> {
    let m = cfg.material(omega)?;
    let grid = discretize(&preset_geometry(cfg.geometry)?, n)?;
    Ok((m, grid))
}

/// Parameter values of the nodes: `(theta, t)` on arcs, `(s, s)` on closed
/// curves.
fn node_params(grid: &Grid) -> Vec<(f64, f64)> {
    match grid {
        Grid::Open(g) => g.theta.iter().zip(&g.t).map(|(a, b)| (*a, *b)).collect(),
        Grid::Closed(g) => g.s.iter().map(|s| (*s, *s)).collect(),
    }
}

/// Solves one formulation and writes `density.csv`, `report.json` and,
/// when requested, `field.csv`.
pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let omega = RunConfig::single(cfg.omegas(), "omega")?;
    let n = RunConfig::single(cfg.sizes()?, "N")?;
    let f = RunConfig::single(cfg.formulations()?, "formulation")?;
    let (m, grid) = setup(cfg, omega, n)?;
    let data = boundary_data(&m, &grid, &cfg.incident)?;
    let mut ops = OperatorCache::new(m, grid.clone());
    let sol = solve(&mut ops, f, &data, cfg.gmres.tol, cfg.gmres.maxit)?;

    let mut csv = String::from("j,theta,t,x1,x2,re_a1,im_a1,re_a2,im_a2\n");
    let dens = from_flat(&sol.density);
    for (j, ((p, (th, t)), a)) in grid.points().iter().zip(node_params(&grid)).zip(&dens).enumerate() {
        let _ = writeln!(
            csv,
            "{j},{},{},{},{},{},{},{},{}",
            num(th),
            num(t),
            num(p[0]),
            num(p[1]),
            num(a[0].re),
            num(a[0].im),
            num(a[1].re),
            num(a[1].im)
        );
    }
    write(&cfg.output, "density.csv", &csv)?;
    let rec = SolveRecord {
        formulation: f.tag().into(),
        omega,
        n,
        iterations: sol.report.iterations,
        converged: sol.report.converged,
        final_residual: sol.report.final_residual(),
        wall_seconds: sol.report.wall_seconds,
    };
    write(&cfg.output, "report.json", &(serde_json::to_string_pretty(&rec)? + "\n"))?;

    if let Some(fg) = &cfg.near_field {
        let pts = fg.points();
        let u = evaluate(&m, &grid, &sol, &pts)?;
        let mut csv = String::from("x1,x2,re_u1,im_u1,re_u2,im_u2\n");
        for (p, v) in pts.iter().zip(&u) {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                num(p[0]),
                num(p[1]),
                num(v[0].re),
                num(v[0].im),
                num(v[1].re),
                num(v[1].im)
            );
        }
        write(&cfg.output, "field.csv", &csv)?;
    }
    Ok(Outcome { converged: sol.report.converged })
}

/// Default error circle: twice the curve's radius about the origin.
fn error_points(cfg: &RunConfig, grid: &Grid) -> Vec<Point> {
    let e = cfg.error_points.unwrap_or_else(|| {
        let r = grid.points().iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
        ErrorPoints { radius: 2.0 * r, count: default_error_count() }
    });
    circle_points(e.radius, e.count)
}

fn field_of(cfg: &RunConfig, m: &Material, grid: &Grid, f: Formulation, tol: f64, pts: &[Point]) -> Result<(Solution, Vec<[c64; 2]>)> {
    let data = boundary_data(m, grid, &cfg.incident)?;
    let mut ops = OperatorCache::new(*m, grid.clone());
    let sol = solve(&mut ops, f, &data, tol, cfg.gmres.maxit)?;
    let u = evaluate(m, grid, &sol, pts)?;
    Ok((sol, u))
}

/// Near-field errors over an `N` sweep, one row per `(omega, N, formulation)`.
///
/// With a point-source incident field the exact solution is the reference;
/// otherwise the reference is computed at `reference_n` (default twice the
/// largest `N`) with `S^w` for Dirichlet rows and `N^w S^w` for Neumann rows.
pub fn cmd_convergence_table(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let ns = cfg.sizes()?;
    let fs = cfg.formulations()?;
    let mut converged = true;
    let mut csv = String::from("omega,N,formulation,error\n");
    for omega in cfg.omegas() {
        let m = cfg.material(omega)?;
        let nref = cfg.reference_n.unwrap_or(2 * ns.iter().max().unwrap());
        let (_, ref_grid) = setup(cfg, omega, nref)?;
        let pts = error_points(cfg, &ref_grid);
        let (mut ref_dir, mut ref_neu) = (None, None);
        if exact_field(&m, &cfg.incident, pts[0]).is_some() {
            let u: Vec<[c64; 2]> = pts.iter().map(|&x| exact_field(&m, &cfg.incident, x).unwrap()).collect::<Result<_>>()?;
            ref_dir = Some(u.clone());
            ref_neu = Some(u);
        } else {
            if fs.iter().any(|f| f.is_dirichlet()) {
                let (s, u) = field_of(cfg, &m, &ref_grid, Formulation::DirSw, cfg.reference_tol, &pts)?;
                converged &= s.report.converged;
                ref_dir = Some(u);
            }
            if fs.iter().any(|f| !f.is_dirichlet()) {
                let (s, u) = field_of(cfg, &m, &ref_grid, Formulation::NeuNwSw, cfg.reference_tol, &pts)?;
                converged &= s.report.converged;
                ref_neu = Some(u);
            }
        }
        drop(ref_grid);
        for &n in &ns {
            let (_, grid) = setup(cfg, omega, n)?;
            let data = boundary_data(&m, &grid, &cfg.incident)?;
            let mut ops = OperatorCache::new(m, grid.clone());
            for &f in &fs {
                let sol = solve(&mut ops, f, &data, cfg.gmres.tol, cfg.gmres.maxit)?;
                converged &= sol.report.converged;
                let u = evaluate(&m, &grid, &sol, &pts)?;
                let r = if f.is_dirichlet() { &ref_dir } else { &ref_neu };
                let err = max_field_error(&u, r.as_ref().unwrap());
                let _ = writeln!(csv, "{},{n},{},{}", num(omega), f.tag(), num(err));
            }
        }
    }
    write(&cfg.output, "convergence.csv", &csv)?;
    Ok(Outcome { converged })
}

/// GMRES iteration counts and solver wall time over an `omega` sweep.
pub fn cmd_iterations_table(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let omegas = cfg.omegas();
    let ns: Vec<usize> = match (&cfg.n, cfg.n_per_omega) {
        (Some(n), _) => {
            let v = n.to_vec();
            if v.len() == 1 {
                vec![v[0]; omegas.len()]
            } else if v.len() == omegas.len() {
                v
            } else {
                return Err(bad("N", "give one size or one per omega"));
            }
        }
        (None, Some(r)) => omegas.iter().map(|w| ((r * w).round() as usize).max(4)).collect(),
        (None, None) => return Err(bad("N", "missing (or set n_per_omega)")),
    };
    let fs = cfg.formulations()?;
    let mut converged = true;
    let mut csv = String::from("omega,N,formulation,iterations,seconds\n");
    for (&omega, &n) in omegas.iter().zip(&ns) {
        let (m, grid) = setup(cfg, omega, n)?;
        let data = boundary_data(&m, &grid, &cfg.incident)?;
        let mut ops = OperatorCache::new(m, grid);
        for &f in &fs {
            let sol = solve(&mut ops, f, &data, cfg.gmres.tol, cfg.gmres.maxit)?;
            converged &= sol.report.converged;
            let _ = writeln!(csv, "{},{n},{},{},{:.6}", num(omega), f.tag(), sol.report.iterations, sol.report.wall_seconds);
        }
    }
    write(&cfg.output, "iterations.csv", &csv)?;
    Ok(Outcome { converged })
}

/// Metadata written next to `spectrum.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub operator: String,
    pub geometry: String,
    pub omega: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub count: usize,
    pub c_lm: f64,
    /// `-1/4 + C^2`, where `N S` accumulates.
    pub accumulation_ns: f64,
    /// `-1/4`, where `Ñ S` accumulates.
    pub accumulation_nts: f64,
    pub min_abs: f64,
    pub max_abs: f64,
    /// Share of eigenvalues within 0.05 of each accumulation point.
    pub fraction_near_ns: f64,
    pub fraction_near_nts: f64,
}

pub const CLUSTER_RADIUS: f64 = 0.05;

/// Every eigenvalue of one operator, sorted; `"identity"` is a sanity preset.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let omega = RunConfig::single(cfg.omegas(), "omega")?;
    let n = RunConfig::single(cfg.sizes()?, "N")?;
    let op = cfg.operator.clone().unwrap_or_else(|| "DirNwSw".into());
    let (m, grid) = setup(cfg, omega, n)?;
    let a = if op == "identity" {
        BlockMatrix::identity(grid.points().len())
    } else {
        let f = Formulation::from_tag(&op).ok_or_else(|| bad("operator", format!("unknown operator `{op}`")))?;
        let mut ops = OperatorCache::new(m, grid.clone());
        ops.system(f)?.materialize()
    };
    let Spectrum { eigenvalues } = match spectrum(&a) {
        Ok(s) => s,
        Err(Error::EigenNonConvergence) => return Ok(Outcome { converged: false }),
        Err(e) => return Err(e),
    };
    let mut csv = String::from("index,re,im\n");
    for (k, z) in eigenvalues.iter().enumerate() {
        let _ = writeln!(csv, "{k},{},{}", num(z.re), num(z.im));
    }
    write(&cfg.output, "spectrum.csv", &csv)?;
    let s = Spectrum { eigenvalues };
    let ns_point = -0.25 + m.c_lm * m.c_lm;
    let rec = SpectrumRecord {
        operator: op,
        geometry: preset_geometry(cfg.geometry)?.name,
        omega,
        n,
        count: s.eigenvalues.len(),
        c_lm: m.c_lm,
        accumulation_ns: ns_point,
        accumulation_nts: -0.25,
        min_abs: s.min_abs(),
        max_abs: s.max_abs(),
        fraction_near_ns: s.fraction_near(c64::new(ns_point, 0.0), CLUSTER_RADIUS),
        fraction_near_nts: s.fraction_near(c64::new(-0.25, 0.0), CLUSTER_RADIUS),
    };
    write(&cfg.output, "spectrum.json", &(serde_json::to_string_pretty(&rec)? + "\n"))?;
    Ok(Outcome { converged: true })
}

/// Far fields of `S^w`-type Dirichlet solutions for thin ellipses and the
/// flat strip, on a shared grid of 360 directions.
#[derive(Debug, Clone)]
pub struct StripLimit {
    /// `(a, far field)`, ellipses first, then the strip as `a = 0`.
    pub rows: Vec<(f64, FarField)>,
    pub converged: bool,
}

impl StripLimit {
    /// Relative magnitude gap of each ellipse to the strip.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let strip = &self.rows.last().unwrap().1;
        self.rows[..self.rows.len() - 1].iter().map(|(a, ff)| (*a, far_field_gap(ff, strip))).collect()
    }
}

pub fn strip_limit(cfg: &RunConfig) -> Result<StripLimit> {
    cfg.validate()?;
    let omega = RunConfig::single(cfg.omegas(), "omega")?;
    let n = RunConfig::single(cfg.sizes()?, "N")?;
    let avals = cfg.a.clone().ok_or_else(|| bad("a", "missing"))?;
    let m = cfg.material(omega)?;
    let dirs = directions(STRIP_LIMIT_DIRECTIONS);
    let mut rows = Vec::new();
    let mut converged = true;
    let mut run = |preset: Preset, size: usize| -> Result<FarField> {
        let grid = discretize(&preset_geometry(preset)?, size)?;
        let data = boundary_data(&m, &grid, &cfg.incident)?;
        let mut ops = OperatorCache::new(m, grid.clone());
        let sol = solve(&mut ops, Formulation::DirSw, &data, cfg.gmres.tol, cfg.gmres.maxit)?;
        converged &= sol.report.converged;
        far_field(&m, &grid, &sol.density, &dirs)
    };
    for &a in &avals {
        rows.push((a, run(Preset::Ellipse { a }, n)?));
    }
    rows.push((0.0, run(Preset::FlatStrip, cfg.strip_n.unwrap_or(n))?));
    Ok(StripLimit { rows, converged })
}

/// Writes `strip_limit.csv` (`a,angle,|up|,|us|`) and the gaps to
/// `strip_limit.json`.
pub fn cmd_strip_limit(cfg: &RunConfig) -> Result<Outcome> {
    let sl = strip_limit(cfg)?;
    let mut csv = String::from("a,angle,|up|,|us|\n");
    for (a, ff) in &sl.rows {
        for (k, _) in ff.directions.iter().enumerate() {
            let angle = 2.0 * PI * k as f64 / ff.directions.len() as f64;
            let _ = writeln!(csv, "{},{},{},{}", num(*a), num(angle), num(ff.up[k].norm()), num(ff.us[k].norm()));
        }
    }
    write(&cfg.output, "strip_limit.csv", &csv)?;
    let gaps: Vec<serde_json::Value> =
        sl.gaps().iter().map(|(a, g)| serde_json::json!({ "a": a, "gap": g })).collect();
    write(&cfg.output, "strip_limit.json", &(serde_json::to_string_pretty(&gaps)? + "\n"))?;
    Ok(Outcome { converged: sl.converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> RunConfig {
        RunConfig::from_json(r#"{"geometry": {"name": "flat_strip"}, "omega": 2.0, "N": 16}"#).unwrap()
    }

    #[test]
    fn defaults_follow_the_open_arc_setup() {
        let c = base();
        assert_eq!(c.material, MaterialConfig { lambda: 2.0, mu: 1.0, rho: 1.0 });
        assert_eq!(c.formulations().unwrap().len(), 5);
        assert_eq!(c.incident, Incident::Plane { angle: PI / 4.0 });
        c.validate().unwrap();
    }

    #[test]
    fn invalid_fields_are_named() {
        let mut c = base();
        c.material.mu = -1.0;
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "material.mu"),
            other => panic!("{other:?}"),
        }
        let mut c = base();
        c.formulation = OneOrMany::One("DirXX".into());
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "formulation"));
        let mut c = base();
        c.n = Some(OneOrMany::One(2));
        assert!(matches!(c.validate(), Err(Error::Config { field, .. }) if field == "N"));
        assert!(matches!(RunConfig::from_json("{\"omega\": 1}"), Err(Error::Config { .. })));
    }

    #[test]
    fn sweeps_parse() {
        let c = RunConfig::from_json(
            r#"{"geometry": {"name": "ellipse", "a": 0.5}, "omega": [10, 30], "N": [100, 150],
                "incident": {"kind": "point", "z0": [0.0, 0.1]}, "formulation": "NeuNw"}"#,
        )
        .unwrap();
        assert_eq!(c.omegas(), vec![10.0, 30.0]);
        assert_eq!(c.sizes().unwrap(), vec![100, 150]);
        assert_eq!(c.formulations().unwrap(), vec![Formulation::NeuNw]);
    }

    #[test]
    fn field_grid_is_row_major_in_y() {
        let g = FieldGrid { x: (0.0, 1.0, 3), y: (2.0, 3.0, 2) };
        let p = g.points();
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], [0.5, 2.0]);
        assert_eq!(p[3], [0.0, 3.0]);
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -2.5e-17, 1.0 / 3.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }
}
