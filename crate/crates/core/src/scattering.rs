//! Boundary-value problems, incident fields, and field evaluation.
//!
//! Open arcs carry smooth densities at the Chebyshev nodes: the single-layer
//! density is `phi = alpha / w` and the double-layer density is
//! `psi = beta * w`, with `w = sin(theta)`. Closed curves carry the physical
//! densities at the periodic nodes.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as c64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Grid, Point};
use crate::kernels::{double_layer_kernel, navier_tensor, Mat2C};
use crate::linear_solvers::{gmres, SolveReport};
use crate::material::Material;
use crate::operators::{
    assemble_closed, assemble_nw, assemble_sw, compose, from_flat, BlockMatrix, ClosedKind, DiscreteOperator,
    NwOperator, OperatorKind,
};
use crate::special::BesselSet;

const I: c64 = c64::new(0.0, 1.0);
const ZERO: c64 = c64::new(0.0, 0.0);

/// The five boundary integral formulations. On closed curves the weighted
/// operators are replaced by their unweighted counterparts (`S`, `N`, `Ñ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formulation {
    /// `S^w alpha = F`.
    DirSw,
    /// `N^w S^w alpha = N^w F`.
    DirNwSw,
    /// `Ñ^w S^w alpha = Ñ^w F`.
    DirNtwSw,
    /// `N^w beta = G`.
    NeuNw,
    /// `N^w S^w gamma = G`, `beta = S^w gamma`.
    NeuNwSw,
}

impl Formulation {
    pub const ALL: [Formulation; 5] =
        [Formulation::DirSw, Formulation::DirNwSw, Formulation::DirNtwSw, Formulation::NeuNw, Formulation::NeuNwSw];

    pub fn is_dirichlet(self) -> bool {
        matches!(self, Self::DirSw | Self::DirNwSw | Self::DirNtwSw)
    }

    pub fn representation(self) -> Representation {
        if self.is_dirichlet() {
            Representation::SingleLayer
        } else {
            Representation::DoubleLayer
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Self::DirSw => "DirSw",
            Self::DirNwSw => "DirNwSw",
            Self::DirNtwSw => "DirNtwSw",
            Self::NeuNw => "NeuNw",
            Self::NeuNwSw => "NeuNwSw",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.tag() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    SingleLayer,
    DoubleLayer,
}

/// Plane pressure wave `d exp(i k_p x . d)`, `d = (cos a, sin a)`.
#[derive(Debug, Clone, Copy)]
pub struct PlaneWave {
    pub kp: f64,
    pub lambda: f64,
    pub mu: f64,
    pub dir: Point,
}

pub fn incident_plane_pwave(m: &Material, angle: f64) -> PlaneWave {
    PlaneWave { kp: m.kp, lambda: m.lambda, mu: m.mu, dir: [angle.cos(), angle.sin()] }
}

impl PlaneWave {
    fn phase(&self, x: Point) -> c64 {
        (I * self.kp * (x[0] * self.dir[0] + x[1] * self.dir[1])).exp()
    }

    pub fn u(&self, x: Point) -> [c64; 2] {
        let e = self.phase(x);
        [e * self.dir[0], e * self.dir[1]]
    }

    pub fn div(&self, x: Point) -> c64 {
        I * self.kp * self.phase(x)
    }

    /// `lambda (div u) nu + 2 mu (grad u)_sym nu`.
    pub fn traction(&self, x: Point, nu: Point) -> [c64; 2] {
        let ik = I * self.kp * self.phase(x);
        let dn = self.dir[0] * nu[0] + self.dir[1] * nu[1];
        [0, 1].map(|i| ik * (self.lambda * nu[i] + 2.0 * self.mu * dn * self.dir[i]))
    }
}

/// Exact radiating field `grad_x H0(k_p |x - z0|)`.
#[derive(Debug, Clone, Copy)]
pub struct PointSource {
    pub kp: f64,
    pub lambda: f64,
    pub mu: f64,
    pub z0: Point,
}

pub fn point_source_field(m: &Material, z0: Point) -> PointSource {
    PointSource { kp: m.kp, lambda: m.lambda, mu: m.mu, z0 }
}

impl PointSource {
    fn setup(&self, x: Point) -> Result<(Point, f64, BesselSet)> {
        let d = [x[0] - self.z0[0], x[1] - self.z0[1]];
        let r = d[0].hypot(d[1]);
        if r == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        Ok(([d[0] / r, d[1] / r], r, BesselSet::new(self.kp * r)))
    }

    pub fn u(&self, x: Point) -> Result<[c64; 2]> {
        let (dh, _, b) = self.setup(x)?;
        let g = -self.kp * b.h1();
        Ok([g * dh[0], g * dh[1]])
    }

    /// Hessian of `H0(k r)`:
    /// `-k^2 H0 dd^T + (2k H1 / r) dd^T - (k H1 / r) I`.
    pub fn hessian(&self, x: Point) -> Result<[[c64; 2]; 2]> {
        let (dh, r, b) = self.setup(x)?;
        let k = self.kp;
        let a = -k * k * b.h0() + 2.0 * k * b.h1() / r;
        let c = -k * b.h1() / r;
        Ok([[a * dh[0] * dh[0] + c, a * dh[0] * dh[1]], [a * dh[1] * dh[0], a * dh[1] * dh[1] + c]])
    }

    pub fn traction(&self, x: Point, nu: Point) -> Result<[c64; 2]> {
        let (_, _, b) = self.setup(x)?;
        let div = -self.kp * self.kp * b.h0();
        let h = self.hessian(x)?;
        Ok([0, 1].map(|i| self.lambda * div * nu[i] + 2.0 * self.mu * (h[i][0] * nu[0] + h[i][1] * nu[1])))
    }
}

/// Illumination of the obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Incident {
    /// Plane P-wave; the data are `F = -u_inc`, `G = -T u_inc`.
    Plane { angle: f64 },
    /// Known radiating solution `grad H0(k_p|x - z0|)`; the data are its own
    /// trace and traction.
    Point { z0: Point },
}

/// Dirichlet and Neumann data at the nodes, component-major.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub f: Vec<c64>,
    pub g: Vec<c64>,
}

fn grid_geometry(grid: &Grid) -> (&[Point], &[Point]) {
    match grid {
        Grid::Open(g) => (&g.points, &g.normal),
        Grid::Closed(g) => (&g.points, &g.normal),
    }
}

pub fn boundary_data(m: &Material, grid: &Grid, inc: &Incident) -> Result<BoundaryData> {
    let (pts, nrm) = grid_geometry(grid);
    let n = pts.len();
    let (mut f, mut g) = (vec![ZERO; 2 * n], vec![ZERO; 2 * n]);
    for j in 0..n {
        let (u, t) = match inc {
            Incident::Plane { angle } => {
                let w = incident_plane_pwave(m, *angle);
                let (u, t) = (w.u(pts[j]), w.traction(pts[j], nrm[j]));
                ([-u[0], -u[1]], [-t[0], -t[1]])
            }
            Incident::Point { z0 } => {
                let p = point_source_field(m, *z0);
                (p.u(pts[j])?, p.traction(pts[j], nrm[j])?)
            }
        };
        for a in 0..2 {
            f[a * n + j] = u[a];
            g[a * n + j] = t[a];
        }
    }
    Ok(BoundaryData { f, g })
}

/// Exact scattered field for [`Incident::Point`], `None` otherwise.
pub fn exact_field(m: &Material, inc: &Incident, x: Point) -> Option<Result<[c64; 2]>> {
    match inc {
        Incident::Point { z0 } => Some(point_source_field(m, *z0).u(x)),
        Incident::Plane { .. } => None,
    }
}

/// Lazily assembled operators for one material and grid.
pub struct OperatorCache {
    pub material: Material,
    pub grid: Grid,
    s: Option<Arc<BlockMatrix>>,
    n: Option<Arc<NwOperator>>,
    nt: Option<Arc<NwOperator>>,
    n_closed: Option<Arc<BlockMatrix>>,
    nt_closed: Option<Arc<BlockMatrix>>,
}

impl OperatorCache {
    pub fn new(material: Material, grid: Grid) -> Self {
        Self { material, grid, s: None, n: None, nt: None, n_closed: None, nt_closed: None }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.grid, Grid::Closed(_))
    }

    /// `S^w` on arcs, `S` on closed curves.
    pub fn single_layer(&mut self) -> Result<DiscreteOperator> {
        if self.s.is_none() {
            let s = match &self.grid {
                Grid::Open(g) => assemble_sw(&self.material, g),
                Grid::Closed(g) => assemble_closed(&self.material, g, ClosedKind::S)?,
            };
            self.s = Some(Arc::new(s));
        }
        let kind = if self.is_closed() { OperatorKind::SClosed } else { OperatorKind::Sw };
        Ok(DiscreteOperator::Dense(kind, self.s.clone().unwrap()))
    }

    /// `N^w` / `Ñ^w` on arcs, `N` / `Ñ` on closed curves.
    pub fn hypersingular(&mut self, modified: bool) -> Result<DiscreteOperator> {
        let m = self.material;
        match &self.grid {
            Grid::Open(g) => {
                let slot = if modified { &mut self.nt } else { &mut self.n };
                let op = slot.get_or_insert_with(|| Arc::new(assemble_nw(&m, g, modified))).clone();
                let kind = if modified { OperatorKind::Ntw } else { OperatorKind::Nw };
                Ok(DiscreteOperator::Hypersingular(kind, op))
            }
            Grid::Closed(g) => {
                let slot = if modified { &mut self.nt_closed } else { &mut self.n_closed };
                if slot.is_none() {
                    let which = if modified { ClosedKind::Ntilde } else { ClosedKind::N };
                    *slot = Some(Arc::new(assemble_closed(&m, g, which)?));
                }
                let kind = if modified { OperatorKind::NtildeClosed } else { OperatorKind::NClosed };
                Ok(DiscreteOperator::Dense(kind, slot.clone().unwrap()))
            }
        }
    }

    /// System operator of a formulation.
    pub fn system(&mut self, f: Formulation) -> Result<DiscreteOperator> {
        let closed = self.is_closed();
        Ok(match f {
            Formulation::DirSw => self.single_layer()?,
            Formulation::NeuNw => self.hypersingular(false)?,
            Formulation::DirNwSw | Formulation::NeuNwSw => {
                let kind = if closed { OperatorKind::NSClosed } else { OperatorKind::NwSw };
                compose(self.hypersingular(false)?, self.single_layer()?, kind)?
            }
            Formulation::DirNtwSw => {
                let kind = if closed { OperatorKind::NtSClosed } else { OperatorKind::NtwSw };
                compose(self.hypersingular(true)?, self.single_layer()?, kind)?
            }
        })
    }
}

/// A solved boundary integral equation.
#[derive(Debug, Clone)]
pub struct Solution {
    pub formulation: Formulation,
    /// Smooth density on arcs (`alpha` or `beta`), physical density on
    /// closed curves.
    pub density: Vec<c64>,
    pub report: SolveReport,
}

impl Solution {
    pub fn representation(&self) -> Representation {
        self.formulation.representation()
    }
}

/// Solves the formulation `f` with GMRES from a zero initial guess.
pub fn solve(
    ops: &mut OperatorCache,
    f: Formulation,
    data: &BoundaryData,
    tol: f64,
    maxit: usize,
) -> Result<Solution> {
    let a = ops.system(f)?;
    if data.f.len() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: data.f.len() });
    }
    let rhs = match f {
        Formulation::DirSw => data.f.clone(),
        Formulation::DirNwSw => ops.hypersingular(false)?.apply(&data.f),
        Formulation::DirNtwSw => ops.hypersingular(true)?.apply(&data.f),
        Formulation::NeuNw | Formulation::NeuNwSw => data.g.clone(),
    };
    let (x, report) = gmres(|v| a.apply(v), &rhs, tol, maxit)?;
    let density = match f {
        Formulation::NeuNwSw => ops.single_layer()?.apply(&x),
        _ => x,
    };
    Ok(Solution { formulation: f, density, report })
}

/// Physical density at the nodes (`alpha / w` or `beta * w` on arcs).
pub fn physical_density(grid: &Grid, sol: &Solution) -> Vec<[c64; 2]> {
    let mut d = from_flat(&sol.density);
    if let Grid::Open(g) = grid {
        for (v, w) in d.iter_mut().zip(&g.weight) {
            let s = match sol.representation() {
                Representation::SingleLayer => 1.0 / w,
                Representation::DoubleLayer => *w,
            };
            *v = [v[0] * s, v[1] * s];
        }
    }
    d
}

/// Arc length by the grid's own quadrature.
pub fn arc_length(grid: &Grid) -> f64 {
    match grid {
        Grid::Open(g) => {
            let w = crate::quadrature::fejer_weights(g.n);
            // Fejér weights in t integrate |x'(t)| dt
            g.jac.iter().zip(&w).map(|(j, w)| j * w).sum()
        }
        Grid::Closed(g) => g.jac.iter().sum::<f64>() * PI / g.n as f64,
    }
}

/// Minimum admissible distance from the curve for field evaluation.
pub fn min_distance(grid: &Grid) -> f64 {
    let nodes = grid.points().len();
    5.0 * arc_length(grid) / nodes as f64
}

/// Layer potential at `points`.
pub fn near_field(
    m: &Material,
    grid: &Grid,
    density: &[c64],
    repr: Representation,
    points: &[Point],
) -> Result<Vec<[c64; 2]>> {
    let (pts, nrm) = grid_geometry(grid);
    let n = pts.len();
    if density.len() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: density.len() });
    }
    // quadrature weight per node, edge weights folded in on arcs
    let qw: Vec<f64> = match (grid, repr) {
        (Grid::Open(g), Representation::SingleLayer) => g.jac.iter().map(|j| PI / n as f64 * j).collect(),
        (Grid::Open(g), Representation::DoubleLayer) => {
            (0..n).map(|j| PI / n as f64 * g.jac[j] * g.weight[j] * g.weight[j]).collect()
        }
        (Grid::Closed(g), _) => g.jac.iter().map(|j| PI / g.n as f64 * j).collect(),
    };
    let dmin = min_distance(grid);
    for x in points {
        let d = pts.iter().map(|y| (x[0] - y[0]).hypot(x[1] - y[1])).fold(f64::INFINITY, f64::min);
        if d < dmin {
            return Err(Error::PointTooClose { x: x[0], y: x[1], min_dist: dmin });
        }
    }
    let dens = from_flat(density);
    points
        .par_iter()
        .map(|&x| {
            let mut u = [ZERO; 2];
            for j in 0..n {
                let k: Mat2C = match repr {
                    Representation::SingleLayer => navier_tensor(m, x, pts[j])?,
                    Representation::DoubleLayer => double_layer_kernel(m, x, pts[j], nrm[j])?,
                };
                let v = k.apply(dens[j]);
                u[0] += v[0] * qw[j];
                u[1] += v[1] * qw[j];
            }
            Ok(u)
        })
        .collect()
}

/// Field of a solution at `points`.
pub fn evaluate(m: &Material, grid: &Grid, sol: &Solution, points: &[Point]) -> Result<Vec<[c64; 2]>> {
    near_field(m, grid, &sol.density, sol.representation(), points)
}

/// `count` points equispaced on a circle of the given radius.
pub fn circle_points(radius: f64, count: usize) -> Vec<Point> {
    (0..count)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / count as f64;
            [radius * a.cos(), radius * a.sin()]
        })
        .collect()
}

/// Maximum componentwise modulus difference.
pub fn max_field_error(a: &[[c64; 2]], b: &[[c64; 2]]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(p, q)| [(p[0] - q[0]).norm(), (p[1] - q[1]).norm()])
        .fold(0.0, f64::max)
}

/// Pressure and shear far-field amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    pub directions: Vec<Point>,
    pub up: Vec<c64>,
    pub us: Vec<c64>,
}

/// `count` directions `(cos a, sin a)`, `a = 2 pi k / count`.
pub fn directions(count: usize) -> Vec<Point> {
    circle_points(1.0, count)
}

/// Far-field amplitudes of a single-layer solution:
/// `u_p = int exp(-i k_p xh.y) xh.phi ds`,
/// `u_s = int exp(-i k_s xh.y) xh_perp.phi ds`.
///
/// Multiplying by [`far_field_scales`] gives the coefficients of
/// `exp(i k|x| + i pi/4) / sqrt(8 pi k |x|)` in the field itself.
pub fn far_field(m: &Material, grid: &Grid, density: &[c64], dirs: &[Point]) -> Result<FarField> {
    let (pts, _) = grid_geometry(grid);
    let n = pts.len();
    if density.len() != 2 * n {
        return Err(Error::DimensionMismatch { expected: 2 * n, got: density.len() });
    }
    // phi ds in the sampling variable: alpha |x'| dtheta on arcs
    let qw: Vec<f64> = match grid {
        Grid::Open(g) => g.jac.iter().map(|j| PI / n as f64 * j).collect(),
        Grid::Closed(g) => g.jac.iter().map(|j| PI / g.n as f64 * j).collect(),
    };
    let dens = from_flat(density);
    let (mut up, mut us) = (Vec::with_capacity(dirs.len()), Vec::with_capacity(dirs.len()));
    for xh in dirs {
        let perp = [-xh[1], xh[0]];
        let (mut p, mut s) = (ZERO, ZERO);
        for j in 0..n {
            let xy = xh[0] * pts[j][0] + xh[1] * pts[j][1];
            let d = dens[j];
            p += (-I * m.kp * xy).exp() * (d[0] * xh[0] + d[1] * xh[1]) * qw[j];
            s += (-I * m.ks * xy).exp() * (d[0] * perp[0] + d[1] * perp[1]) * qw[j];
        }
        up.push(p);
        us.push(s);
    }
    Ok(FarField { directions: dirs.to_vec(), up, us })
}

/// Material factors `(1 / (lambda + 2 mu), 1 / mu)` linking the far-field
/// integrals to the actual asymptotic amplitudes.
pub fn far_field_scales(m: &Material) -> (f64, f64) {
    (1.0 / (m.lambda + 2.0 * m.mu), 1.0 / m.mu)
}

/// Asymptotic field `u(R xh)` predicted by a far-field pattern.
pub fn far_field_asymptotic(m: &Material, ff: &FarField, k: usize, radius: f64) -> [c64; 2] {
    let (sp, ss) = far_field_scales(m);
    let xh = ff.directions[k];
    let wave = |kk: f64| (I * (kk * radius + PI / 4.0)).exp() / (8.0 * PI * kk * radius).sqrt();
    let ap = wave(m.kp) * ff.up[k] * sp;
    let a_s = wave(m.ks) * ff.us[k] * ss;
    [ap * xh[0] - a_s * xh[1], ap * xh[1] + a_s * xh[0]]
}

/// Relative sup-norm gap between far-field magnitudes:
/// `max(sup||a.up| - |b.up|| / sup|b.up|, sup||a.us| - |b.us|| / sup|b.us|)`.
pub fn far_field_gap(a: &FarField, b: &FarField) -> f64 {
    let rel = |x: &[c64], y: &[c64]| {
        let d = x.iter().zip(y).map(|(p, q)| (p.norm() - q.norm()).abs()).fold(0.0, f64::max);
        d / y.iter().map(|q| q.norm()).fold(0.0, f64::max)
    };
    rel(&a.up, &b.up).max(rel(&a.us, &b.us))
}
