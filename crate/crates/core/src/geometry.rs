//! Curve parameterizations and their discretizations.
//!
//! Open arcs are parameterized over `t in [-1, 1]` and sampled at Chebyshev
//! points `t_j = cos(theta_j)`. Closed curves are parameterized over
//! `s in [0, 2 pi)` and sampled at `2n` equispaced nodes.
//!
//! The unit normal is the tangent rotated clockwise:
//! `nu = (x2', -x1') / |x'|`. Counter-clockwise closed curves therefore get
//! the outward normal. Flipping orientation is done by reversing the
//! parameter, never by negating the normal, so that the identity between the
//! Günter matrix and the tangential derivative keeps holding.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Built-in curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    /// Closed circle of radius `r` centred at the origin.
    Circle { r: f64 },
    /// Closed ellipse `(cos s, a sin s)`.
    Ellipse { a: f64 },
    /// Open segment `[-1, 1] x {0}`.
    FlatStrip,
    /// Open arc `exp(t) (cos 5t, sin 5t)`.
    Spiral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArcGeometry {
    pub preset: Preset,
    pub closed: bool,
    pub name: String,
    /// Traverse the curve backwards (flips the normal).
    pub reversed: bool,
}

/// Position and first two derivatives at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: Point,
    pub dx: Point,
    pub ddx: Point,
}

impl CurvePoint {
    pub fn speed(&self) -> f64 {
        self.dx[0].hypot(self.dx[1])
    }

    pub fn normal(&self) -> Point {
        let s = self.speed();
        [self.dx[1] / s, -self.dx[0] / s]
    }
}

impl ArcGeometry {
    pub fn new(preset: Preset, reversed: bool) -> Result<Self> {
        let (closed, name) = match preset {
            Preset::Circle { r } => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::InvalidGeometry(format!("circle radius must be positive, got {r}")));
                }
                (true, format!("circle(r={r})"))
            }
            Preset::Ellipse { a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::InvalidGeometry(format!("ellipse semi-axis must be positive, got {a}")));
                }
                (true, format!("ellipse(a={a})"))
            }
            Preset::FlatStrip => (false, "flat_strip".to_string()),
            Preset::Spiral => (false, "spiral".to_string()),
        };
        let g = Self { preset, closed, name, reversed };
        // dense sample of the speed
        let (lo, hi) = g.param_range();
        for i in 0..=4096 {
            let t = lo + (hi - lo) * i as f64 / 4096.0;
            let sp = g.eval(t).speed();
            if !(sp > 0.0 && sp.is_finite()) {
                return Err(Error::InvalidGeometry(format!("{}: degenerate speed at t={t}", g.name)));
            }
        }
        Ok(g)
    }

    /// Parameter interval: `[-1, 1]` for arcs, `[0, 2 pi]` for closed curves.
    pub fn param_range(&self) -> (f64, f64) {
        if self.closed {
            (0.0, 2.0 * PI)
        } else {
            (-1.0, 1.0)
        }
    }

    pub fn eval(&self, t: f64) -> CurvePoint {
        let (t, sgn) = if self.reversed { (-t, -1.0) } else { (t, 1.0) };
        let mut p = match self.preset {
            Preset::Circle { r } => {
                let (s, c) = t.sin_cos();
                CurvePoint { x: [r * c, r * s], dx: [-r * s, r * c], ddx: [-r * c, -r * s] }
            }
            Preset::Ellipse { a } => {
                let (s, c) = t.sin_cos();
                CurvePoint { x: [c, a * s], dx: [-s, a * c], ddx: [-c, -a * s] }
            }
            Preset::FlatStrip => CurvePoint { x: [t, 0.0], dx: [1.0, 0.0], ddx: [0.0, 0.0] },
            Preset::Spiral => {
                let e = t.exp();
                let (s, c) = (5.0 * t).sin_cos();
                CurvePoint {
                    x: [e * c, e * s],
                    dx: [e * (c - 5.0 * s), e * (s + 5.0 * c)],
                    ddx: [e * (-24.0 * c - 10.0 * s), e * (-24.0 * s + 10.0 * c)],
                }
            }
        };
        p.dx = [sgn * p.dx[0], sgn * p.dx[1]];
        p
    }
}

pub fn preset_geometry(preset: Preset) -> Result<ArcGeometry> {
    ArcGeometry::new(preset, false)
}

/// Chebyshev sampling of an open arc.
#[derive(Debug, Clone)]
pub struct ChebyshevGrid {
    pub n: usize,
    pub theta: Vec<f64>,
    pub t: Vec<f64>,
    pub points: Vec<Point>,
    pub deriv: Vec<Point>,
    pub jac: Vec<f64>,
    pub normal: Vec<Point>,
    /// Edge weight `sin(theta_j) = sqrt(1 - t_j^2)`.
    pub weight: Vec<f64>,
}

impl ChebyshevGrid {
    pub fn new(geom: &ArcGeometry, n: usize) -> Result<Self> {
        if geom.closed {
            return Err(Error::InvalidGeometry(format!("{} is closed; use PeriodicGrid", geom.name)));
        }
        if n < 4 {
            return Err(Error::InvalidGeometry(format!("need at least 4 nodes, got {n}")));
        }
        let theta: Vec<f64> = (0..n).map(|j| PI * (2 * j + 1) as f64 / (2 * n) as f64).collect();
        let t: Vec<f64> = theta.iter().map(|th| th.cos()).collect();
        let weight = theta.iter().map(|th| th.sin()).collect();
        let cp: Vec<CurvePoint> = t.iter().map(|&t| geom.eval(t)).collect();
        Ok(Self {
            n,
            theta,
            t,
            points: cp.iter().map(|p| p.x).collect(),
            deriv: cp.iter().map(|p| p.dx).collect(),
            jac: cp.iter().map(|p| p.speed()).collect(),
            normal: cp.iter().map(|p| p.normal()).collect(),
            weight,
        })
    }
}

/// Equispaced sampling of a closed curve with `2n` nodes `s_j = pi j / n`.
#[derive(Debug, Clone)]
pub struct PeriodicGrid {
    /// Half the node count.
    pub n: usize,
    pub s: Vec<f64>,
    pub points: Vec<Point>,
    pub deriv: Vec<Point>,
    pub jac: Vec<f64>,
    pub normal: Vec<Point>,
}

impl PeriodicGrid {
    pub fn new(geom: &ArcGeometry, n: usize) -> Result<Self> {
        if !geom.closed {
            return Err(Error::InvalidGeometry(format!("{} is open; use ChebyshevGrid", geom.name)));
        }
        if n < 4 {
            return Err(Error::InvalidGeometry(format!("need n >= 4, got {n}")));
        }
        let s: Vec<f64> = (0..2 * n).map(|j| PI * j as f64 / n as f64).collect();
        let cp: Vec<CurvePoint> = s.iter().map(|&s| geom.eval(s)).collect();
        Ok(Self {
            n,
            s,
            points: cp.iter().map(|p| p.x).collect(),
            deriv: cp.iter().map(|p| p.dx).collect(),
            jac: cp.iter().map(|p| p.speed()).collect(),
            normal: cp.iter().map(|p| p.normal()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Either kind of grid, picked by whether the curve is closed.
#[derive(Debug, Clone)]
pub enum Grid {
    Open(ChebyshevGrid),
    Closed(PeriodicGrid),
}

impl Grid {
    pub fn points(&self) -> &[Point] {
        match self {
            Grid::Open(g) => &g.points,
            Grid::Closed(g) => &g.points,
        }
    }

    /// Quadrature weights for `ds` against smooth integrands in the natural
    /// variable: `(pi/N)|x'|` on arcs (the edge weight is left out) and
    /// `(pi/n)|x'|` on closed curves.
    pub fn ds_weights(&self) -> Vec<f64> {
        match self {
            Grid::Open(g) => g.jac.iter().map(|j| PI / g.n as f64 * j).collect(),
            Grid::Closed(g) => g.jac.iter().map(|j| PI / g.n as f64 * j).collect(),
        }
    }
}

/// Chebyshev grid for arcs, `2n`-point periodic grid for closed curves.
pub fn discretize(geom: &ArcGeometry, n: usize) -> Result<Grid> {
    if geom.closed {
        PeriodicGrid::new(geom, n).map(Grid::Closed)
    } else {
        ChebyshevGrid::new(geom, n).map(Grid::Open)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_values() {
        let p = preset_geometry(Preset::FlatStrip).unwrap().eval(0.5);
        assert_eq!(p.x, [0.5, 0.0]);
        assert_eq!(p.dx, [1.0, 0.0]);
        let p = preset_geometry(Preset::Spiral).unwrap().eval(0.0);
        assert!((p.x[0] - 1.0).abs() < 1e-15 && p.x[1].abs() < 1e-15);
        assert!((p.dx[0] - 1.0).abs() < 1e-15 && (p.dx[1] - 5.0).abs() < 1e-15);
        let p = preset_geometry(Preset::Ellipse { a: 0.01 }).unwrap().eval(PI / 2.0);
        assert!(p.x[0].abs() < 1e-15 && (p.x[1] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn spiral_derivatives_match_finite_differences() {
        let g = preset_geometry(Preset::Spiral).unwrap();
        let h = 1e-5;
        for t in [-0.9, -0.3, 0.2, 0.77] {
            let (a, b, c) = (g.eval(t - h), g.eval(t), g.eval(t + h));
            for k in 0..2 {
                let d1 = (c.x[k] - a.x[k]) / (2.0 * h);
                let d2 = (c.x[k] - 2.0 * b.x[k] + a.x[k]) / (h * h);
                assert!((d1 - b.dx[k]).abs() < 1e-8);
                assert!((d2 - b.ddx[k]).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn chebyshev_nodes() {
        let g = ChebyshevGrid::new(&preset_geometry(Preset::FlatStrip).unwrap(), 4).unwrap();
        let want = [PI / 8.0, 3.0 * PI / 8.0, 5.0 * PI / 8.0, 7.0 * PI / 8.0];
        for (a, b) in g.theta.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
        for w in g.t.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert!(g.t.iter().all(|t| t.abs() < 1.0));
        for (w, t) in g.weight.iter().zip(&g.t) {
            assert!((w - (1.0 - t * t).sqrt()).abs() < 1e-15);
        }
        for n in &g.normal {
            assert_eq!(*n, g.normal[0]);
            assert!(n[0] == 0.0 && n[1].abs() == 1.0);
        }
    }

    #[test]
    fn normals_are_unit_and_orthogonal() {
        let g = ChebyshevGrid::new(&preset_geometry(Preset::Spiral).unwrap(), 33).unwrap();
        for (n, d) in g.normal.iter().zip(&g.deriv) {
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-14);
            assert!((n[0] * d[0] + n[1] * d[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn circle_grid_is_equispaced_with_outward_normal() {
        let g = PeriodicGrid::new(&preset_geometry(Preset::Circle { r: 1.0 }).unwrap(), 4).unwrap();
        assert_eq!(g.len(), 8);
        for (j, (p, nu)) in g.points.iter().zip(&g.normal).enumerate() {
            let s = PI * j as f64 / 4.0;
            assert!((p[0] - s.cos()).abs() < 1e-15 && (p[1] - s.sin()).abs() < 1e-15);
            assert!((nu[0] - p[0]).abs() < 1e-15 && (nu[1] - p[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn reversal_flips_the_normal() {
        let f = ArcGeometry::new(Preset::Spiral, false).unwrap();
        let r = ArcGeometry::new(Preset::Spiral, true).unwrap();
        let (a, b) = (f.eval(0.3), r.eval(-0.3));
        assert_eq!(a.x, b.x);
        let (na, nb) = (a.normal(), b.normal());
        assert!((na[0] + nb[0]).abs() < 1e-15 && (na[1] + nb[1]).abs() < 1e-15);
    }

    #[test]
    fn spiral_arc_length_self_converges() {
        let geom = preset_geometry(Preset::Spiral).unwrap();
        let len = |n: usize| {
            let g = ChebyshevGrid::new(&geom, n).unwrap();
            crate::quadrature::fejer_weights(n).iter().zip(&g.jac).map(|(w, j)| w * j).sum::<f64>()
        };
        // the error at N is squared (roughly) when N doubles
        let (a, b, c) = (len(6), len(12), len(24));
        assert!((b - c).abs() < 1e-7 * (a - c).abs(), "{a} {b} {c}");
        // exact value: sqrt(26) (e - 1/e)
        let exact = 26f64.sqrt() * (1f64.exp() - (-1f64).exp());
        assert!((c - exact).abs() < 1e-14 * exact, "{c} {exact}");
    }

    #[test]
    fn invalid_presets() {
        assert!(preset_geometry(Preset::Circle { r: 0.0 }).is_err());
        assert!(preset_geometry(Preset::Ellipse { a: -1.0 }).is_err());
        let strip = preset_geometry(Preset::FlatStrip).unwrap();
        assert!(ChebyshevGrid::new(&strip, 3).is_err());
        assert!(PeriodicGrid::new(&strip, 8).is_err());
    }
}
