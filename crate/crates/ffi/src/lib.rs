//! C interface to the arcwave solvers.
//!
//! Objects are opaque handles created by `*_new` functions and released
//! with the matching `*_free`. Every fallible call returns an
//! [`ArcwaveStatus`]; on failure a description is available from
//! [`arcwave_last_error`] on the same thread.
//!
//! Complex vectors cross the boundary as interleaved `(re, im)` doubles.
//! Two-component fields at `m` points use `4 m` doubles laid out as
//! `re u1, im u1, re u2, im u2` per point.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use arcwave::geometry::{discretize, preset_geometry, Grid, Preset};
use arcwave::material::Material;
use arcwave::operators::from_flat;
use arcwave::scattering::{self, boundary_data, directions, evaluate, far_field, Formulation, Incident, OperatorCache};
use arcwave::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcwaveStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidMaterial = 3,
    InvalidGeometry = 4,
    /// GMRES hit the iteration cap; the solution handle is still produced.
    NotConverged = 5,
    /// Breakdown, eigen-solver failure, or evaluation too close to the curve.
    Numerical = 6,
    /// A Rust panic was caught at the boundary.
    Internal = 7,
}

/// Built-in curves.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcwaveCurve {
    /// Closed circle; `param` is the radius.
    Circle = 0,
    /// Closed ellipse `(cos s, a sin s)`; `param` is `a`.
    Ellipse = 1,
    /// Open segment `[-1, 1] x {0}`; `param` is ignored.
    FlatStrip = 2,
    /// Open arc `exp(t)(cos 5t, sin 5t)`; `param` is ignored.
    Spiral = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcwaveFormulation {
    DirSw = 0,
    DirNwSw = 1,
    DirNtwSw = 2,
    NeuNw = 3,
    NeuNwSw = 4,
}

impl From<ArcwaveFormulation> for Formulation {
    fn from(f: ArcwaveFormulation) -> Self {
        match f {
            ArcwaveFormulation::DirSw => Formulation::DirSw,
            ArcwaveFormulation::DirNwSw => Formulation::DirNwSw,
            ArcwaveFormulation::DirNtwSw => Formulation::DirNtwSw,
            ArcwaveFormulation::NeuNw => Formulation::NeuNw,
            ArcwaveFormulation::NeuNwSw => Formulation::NeuNwSw,
        }
    }
}

/// Opaque elastic medium.
pub struct ArcwaveMaterial(Material);

/// Opaque discretized obstacle with its cached operators.
pub struct ArcwaveProblem {
    cache: OperatorCache,
}

/// Opaque solved density plus solver statistics.
pub struct ArcwaveSolution {
    grid: Grid,
    material: Material,
    sol: scattering::Solution,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).unwrap_or_default());
}

fn status_of(e: &Error) -> ArcwaveStatus {
    match e {
        Error::InvalidMaterial(_) => ArcwaveStatus::InvalidMaterial,
        Error::InvalidGeometry(_) => ArcwaveStatus::InvalidGeometry,
        Error::DimensionMismatch { .. } | Error::Domain(_) | Error::Config { .. } | Error::Unsupported(_) => {
            ArcwaveStatus::InvalidArgument
        }
        _ => ArcwaveStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<ArcwaveStatus, Error>) -> ArcwaveStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            ArcwaveStatus::Internal
        }
    }
}

macro_rules! nonnull {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return Ok(ArcwaveStatus::NullPointer);
        })+
    };
}

/// Message for the most recent failure on this thread (empty if none).
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn arcwave_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn arcwave_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn arcwave_material_new(
    lambda: f64,
    mu: f64,
    rho: f64,
    omega: f64,
    out: *mut *mut ArcwaveMaterial,
) -> ArcwaveStatus {
    guard(|| {
        nonnull!(out);
        *out = ptr::null_mut();
        let m = Material::new(lambda, mu, rho, omega)?;
        *out = Box::into_raw(Box::new(ArcwaveMaterial(m)));
        Ok(ArcwaveStatus::Ok)
    })
}

/// Shear and pressure wavenumbers.
///
/// # Safety
/// `m` must come from [`arcwave_material_new`]; `ks`, `kp` must be writable.
#[no_mangle]
pub unsafe extern "C" fn arcwave_material_wavenumbers(
    m: *const ArcwaveMaterial,
    ks: *mut f64,
    kp: *mut f64,
) -> ArcwaveStatus {
    guard(|| {
        nonnull!(m, ks, kp);
        *ks = (*m).0.ks;
        *kp = (*m).0.kp;
        Ok(ArcwaveStatus::Ok)
    })
}

/// # Safety
/// `m` must come from [`arcwave_material_new`] (or be null) and not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn arcwave_material_free(m: *mut ArcwaveMaterial) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Discretizes a curve with `n` Chebyshev nodes (open arcs) or `2 n`
/// periodic nodes (closed curves). The material is copied.
///
/// # Safety
/// `m` must be a live material handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn arcwave_problem_new(
    m: *const ArcwaveMaterial,
    curve: ArcwaveCurve,
    param: f64,
    n: usize,
    out: *mut *mut ArcwaveProblem,
) -> ArcwaveStatus {
    guard(|| {
        nonnull!(m, out);
        *out = ptr::null_mut();
        let preset = match curve {
            ArcwaveCurve::Circle => Preset::Circle { r: param },
            ArcwaveCurve::Ellipse => Preset::Ellipse { a: param },
            ArcwaveCurve::FlatStrip => Preset::FlatStrip,
            ArcwaveCurve::Spiral => Preset::Spiral,
        };
        let grid = discretize(&preset_geometry(preset)?, n)?;
        let cache = OperatorCache::new((*m).0, grid);
        *out = Box::into_raw(Box::new(ArcwaveProblem { cache }));
        Ok(ArcwaveStatus::Ok)
    })
}

/// Number of discretization nodes (the unknown count is twice this).
///
/// # Safety
/// `p` must be a live problem handle.
#[no_mangle]
pub unsafe extern "C" fn arcwave_problem_node_count(p: *const ArcwaveProblem) -> usize {
    if p.is_null() {
        return 0;
    }
    (*p).cache.grid.points().len()
}

/// Node coordinates as `2 * node_count` doubles `(x1, x2)` per node.
///
/// # Safety
/// `xy` must have room for `2 * node_count` doubles.
#[no_mangle]
pub unsafe extern "C" fn arcwave_problem_nodes(p: *const ArcwaveProblem, xy: *mut f64, len: usize) -> ArcwaveStatus {
    guard(|| {
        nonnull!(p, xy);
        let pts = (*p).cache.grid.points();
        if len < 2 * pts.len() {
            return Err(Error::DimensionMismatch { expected: 2 * pts.len(), got: len });
        }
        let out = std::slice::from_raw_parts_mut(xy, 2 * pts.len());
        for (k, q) in pts.iter().enumerate() {
            out[2 * k] = q[0];
            out[2 * k + 1] = q[1];
        }
        Ok(ArcwaveStatus::Ok)
    })
}

/// # Safety
/// `p` must come from [`arcwave_problem_new`] (or be null).
#[no_mangle]
pub unsafe extern "C" fn arcwave_problem_free(p: *mut ArcwaveProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

unsafe fn solve_with(
    p: *mut ArcwaveProblem,
    f: ArcwaveFormulation,
    inc: Incident,
    tol: f64,
    maxit: usize,
    out: *mut *mut ArcwaveSolution,
) -> Result<ArcwaveStatus, Error> {
    nonnull!(p, out);
    *out = ptr::null_mut();
    if !(tol > 0.0 && tol < 1.0) || maxit == 0 {
        return Err(Error::Domain(format!("need 0 < tol < 1 and maxit > 0, got tol={tol}, maxit={maxit}")));
    }
    let cache = &mut (*p).cache;
    let data = boundary_data(&cache.material, &cache.grid, &inc)?;
    let sol = scattering::solve(cache, f.into(), &data, tol, maxit)?;
    let converged = sol.report.converged;
    let s = ArcwaveSolution { grid: cache.grid.clone(), material: cache.material, sol };
    *out = Box::into_raw(Box::new(s));
    if converged {
        Ok(ArcwaveStatus::Ok)
    } else {
        set_error(format!("GMRES stopped after {maxit} iterations"));
        Ok(ArcwaveStatus::NotConverged)
    }
}

/// Scattering of a plane P-wave travelling in direction `angle`.
/// Operators are assembled on first use and cached in the problem.
///
/// # Safety
/// `p` must be a live problem handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn arcwave_solve_plane_wave(
    p: *mut ArcwaveProblem,
    formulation: ArcwaveFormulation,
    angle: f64,
    tol: f64,
    maxit: usize,
    out: *mut *mut ArcwaveSolution,
) -> ArcwaveStatus {
    guard(|| solve_with(p, formulation, Incident::Plane { angle }, tol, maxit, out))
}

/// Boundary data of a known point source at `(z1, z2)` (which must lie
/// inside the obstacle for the result to be a scattering solution).
///
/// # Safety
/// As for [`arcwave_solve_plane_wave`].
#[no_mangle]
pub unsafe extern "C" fn arcwave_solve_point_source(
    p: *mut ArcwaveProblem,
    formulation: ArcwaveFormulation,
    z1: f64,
    z2: f64,
    tol: f64,
    maxit: usize,
    out: *mut *mut ArcwaveSolution,
) -> ArcwaveStatus {
    guard(|| solve_with(p, formulation, Incident::Point { z0: [z1, z2] }, tol, maxit, out))
}

/// GMRES statistics. Any output pointer may be null.
///
/// # Safety
/// `s` must be a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn arcwave_solution_stats(
    s: *const ArcwaveSolution,
    iterations: *mut usize,
    converged: *mut bool,
    final_residual: *mut f64,
) -> ArcwaveStatus {
    guard(|| {
        nonnull!(s);
        let r = &(*s).sol.report;
        if !iterations.is_null() {
            *iterations = r.iterations;
        }
        if !converged.is_null() {
            *converged = r.converged;
        }
        if !final_residual.is_null() {
            *final_residual = r.final_residual();
        }
        Ok(ArcwaveStatus::Ok)
    })
}

/// Solver density per node, `4 * node_count` doubles.
///
/// # Safety
/// `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn arcwave_solution_density(s: *const ArcwaveSolution, out: *mut f64, len: usize) -> ArcwaveStatus {
    guard(|| {
        nonnull!(s, out);
        let d = from_flat(&(*s).sol.density);
        write_pairs(&d, out, len)
    })
}

unsafe fn write_pairs(v: &[[num_complex::Complex64; 2]], out: *mut f64, len: usize) -> Result<ArcwaveStatus, Error> {
    if len < 4 * v.len() {
        return Err(Error::DimensionMismatch { expected: 4 * v.len(), got: len });
    }
    let o = std::slice::from_raw_parts_mut(out, 4 * v.len());
    for (k, u) in v.iter().enumerate() {
        o[4 * k..4 * k + 4].copy_from_slice(&[u[0].re, u[0].im, u[1].re, u[1].im]);
    }
    Ok(ArcwaveStatus::Ok)
}

/// Scattered field at `count` points given as `(x1, x2)` pairs; writes
/// `4 * count` doubles. Points too close to the curve are rejected.
///
/// # Safety
/// `xy` must hold `2 * count` doubles and `out` room for `4 * count`.
#[no_mangle]
pub unsafe extern "C" fn arcwave_solution_field(
    s: *const ArcwaveSolution,
    xy: *const f64,
    count: usize,
    out: *mut f64,
) -> ArcwaveStatus {
    guard(|| {
        nonnull!(s, xy, out);
        let raw = std::slice::from_raw_parts(xy, 2 * count);
        let pts: Vec<[f64; 2]> = raw.chunks_exact(2).map(|c| [c[0], c[1]]).collect();
        let s = &*s;
        let u = evaluate(&s.material, &s.grid, &s.sol, &pts)?;
        write_pairs(&u, out, 4 * count)
    })
}

/// Far-field amplitudes `u_p`, `u_s` of a single-layer (Dirichlet) solution
/// at `count` equispaced directions; each output gets `2 * count` doubles.
///
/// # Safety
/// `up` and `us` must each have room for `2 * count` doubles.
#[no_mangle]
pub unsafe extern "C" fn arcwave_solution_far_field(
    s: *const ArcwaveSolution,
    count: usize,
    up: *mut f64,
    us: *mut f64,
) -> ArcwaveStatus {
    guard(|| {
        nonnull!(s, up, us);
        let s = &*s;
        if !s.sol.formulation.is_dirichlet() {
            return Err(Error::Unsupported("far fields are available for single-layer solutions".into()));
        }
        let ff = far_field(&s.material, &s.grid, &s.sol.density, &directions(count))?;
        let (a, b) = (std::slice::from_raw_parts_mut(up, 2 * count), std::slice::from_raw_parts_mut(us, 2 * count));
        for k in 0..count {
            a[2 * k] = ff.up[k].re;
            a[2 * k + 1] = ff.up[k].im;
            b[2 * k] = ff.us[k].re;
            b[2 * k + 1] = ff.us[k].im;
        }
        Ok(ArcwaveStatus::Ok)
    })
}

/// # Safety
/// `s` must come from a solve call (or be null).
#[no_mangle]
pub unsafe extern "C" fn arcwave_solution_free(s: *mut ArcwaveSolution) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
