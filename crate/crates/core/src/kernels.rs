//! Pointwise integral kernels: the Helmholtz fundamental solution, the
//! Navier (Kupradze) tensor and the kernels of the regularized
//! hypersingular operator, each with a logarithmic split.
//!
//! Every kernel is an affine combination of the Hankel "channels"
//!
//! ```text
//! c0 = H0(kr),  c1 = (H1(kr) + 2i/(pi k r)) / r,
//! c2 = (H2(kr) + 4i/(pi k^2 r^2) + i/pi) / r^2
//! ```
//!
//! for the two wavenumbers, plus terms without a logarithm. Each channel is
//! `log * ln r + reg` with `log = (2i/pi) J_n(kr)/r^n` and an analytic `reg`,
//! both summed directly near `r = 0` so that nothing cancels. The poles that
//! were stripped off cancel between `k_s` and `k_p` except for the bounded
//! term `(k_s^2 - k_p^2)/(4 pi) ddT/r^2` of the tensor, which is carried
//! explicitly.

use std::f64::consts::{FRAC_2_PI, PI};
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};
use crate::geometry::{ArcGeometry, Point};
use crate::material::Material;
use crate::special::{BesselSet, EULER_GAMMA};

const I: c64 = c64::new(0.0, 1.0);
const ZERO: c64 = c64::new(0.0, 0.0);
const ONE: c64 = c64::new(1.0, 0.0);

/// Dense complex 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2C(pub [[c64; 2]; 2]);

impl Mat2C {
    pub const ZERO: Mat2C = Mat2C([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn identity() -> Self {
        Self::scalar(ONE)
    }

    pub fn scalar(s: c64) -> Self {
        Mat2C([[s, ZERO], [ZERO, s]])
    }

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        Mat2C(m.map(|r| r.map(|v| c64::new(v, 0.0))))
    }

    /// `a b^T`.
    pub fn outer(a: Point, b: Point) -> Self {
        Self::from_real([[a[0] * b[0], a[0] * b[1]], [a[1] * b[0], a[1] * b[1]]])
    }

    pub fn transpose(&self) -> Self {
        let m = self.0;
        Mat2C([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn matmul(&self, o: &Mat2C) -> Mat2C {
        let (a, b) = (self.0, o.0);
        let mut r = [[ZERO; 2]; 2];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2C(r)
    }

    pub fn apply(&self, v: [c64; 2]) -> [c64; 2] {
        let m = self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        let mut r = self;
        r += o;
        r
    }
}

impl AddAssign for Mat2C {
    fn add_assign(&mut self, o: Mat2C) {
        for i in 0..2 {
            for j in 0..2 {
                self.0[i][j] += o.0[i][j];
            }
        }
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        self + (-o)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        Mat2C(self.0.map(|r| r.map(|v| -v)))
    }
}

impl Mul<c64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, s: c64) -> Mat2C {
        Mat2C(self.0.map(|r| r.map(|v| v * s)))
    }
}

impl Mul<f64> for Mat2C {
    type Output = Mat2C;
    fn mul(self, s: f64) -> Mat2C {
        Mat2C(self.0.map(|r| r.map(|v| v * s)))
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        self.matmul(&o)
    }
}

/// The Günter matrix: rotation by `pi/2`.
pub fn gunter_matrix() -> [[f64; 2]; 2] {
    [[0.0, -1.0], [1.0, 0.0]]
}

fn gunter() -> Mat2C {
    Mat2C::from_real(gunter_matrix())
}

/// Hankel channels of one wavenumber at one distance.
#[derive(Debug, Clone, Copy)]
pub struct Channels {
    /// Full values `c0, c1, c2` (undefined at `r = 0`).
    pub value: [c64; 3],
    /// Coefficients of `ln r`.
    pub log: [c64; 3],
    /// Analytic remainders: `value = log * ln r + reg`.
    pub reg: [c64; 3],
}

/// Above this argument the channels come from the Bessel values directly.
const CHANNEL_SERIES_LIMIT: f64 = 4.0;

impl Channels {
    pub fn new(k: f64, r: f64) -> Self {
        let x = k * r;
        let lk = (0.5 * k).ln();
        if x <= CHANNEL_SERIES_LIMIT {
            // J_n / x^n and the analytic part A_n / x^n of Y_n, where
            // Y_n = (2/pi) ln(x/2) J_n + A_n + poles.
            let q = -0.25 * x * x;
            let mut jn = [0.0; 3];
            let mut an = [0.0; 3];
            for n in 0..3 {
                let mut term = 1.0 / [1.0, 2.0, 8.0][n]; // 1/(2^n n!)
                // psi(k+1) + psi(n+k+1)
                let mut hk = 0.0;
                let mut hnk: f64 = (1..=n).map(|m| 1.0 / m as f64).sum();
                let (mut sj, mut sa) = (0.0, 0.0);
                for kk in 0..40 {
                    if kk > 0 {
                        let kf = kk as f64;
                        term *= q / (kf * (kf + n as f64));
                        hk += 1.0 / kf;
                        hnk += 1.0 / (kf + n as f64);
                    }
                    sj += term;
                    sa += (hk + hnk - 2.0 * EULER_GAMMA) * term;
                    if term.abs() < 1e-18 * sj.abs().max(1e-300) && kk > 2 {
                        break;
                    }
                }
                let kn = k.powi(n as i32);
                jn[n] = sj * kn;
                an[n] = -sa / PI * kn;
            }
            let log = jn.map(|v| I * (FRAC_2_PI * v));
            let reg = [0, 1, 2].map(|n| c64::new(jn[n], FRAC_2_PI * lk * jn[n] + an[n]));
            let value = if r > 0.0 {
                let lr = r.ln();
                [0, 1, 2].map(|n| reg[n] + log[n] * lr)
            } else {
                [c64::new(f64::NAN, f64::NAN); 3]
            };
            Self { value, log, reg }
        } else {
            let b = BesselSet::new(x);
            let lx = (0.5 * x).ln();
            let (r1, r2) = (1.0 / r, 1.0 / (r * r));
            let j = [b.j0, b.j1 * r1, b.j2 * r2];
            // pole-free parts of Y_n, scaled like the channels
            let y = [b.y0, b.y1_reg * r1, (b.y2_reg + 1.0 / PI) * r2];
            let log = j.map(|v| I * (FRAC_2_PI * v));
            let a = [0, 1, 2].map(|n| y[n] - FRAC_2_PI * lx * j[n]);
            let reg = [0, 1, 2].map(|n| c64::new(j[n], FRAC_2_PI * lk * j[n] + a[n]));
            let value = [0, 1, 2].map(|n| c64::new(j[n], y[n]));
            Self { value, log, reg }
        }
    }
}

/// Relative geometry of a source/target pair.
#[derive(Debug, Clone, Copy)]
pub struct PairGeom {
    /// `x - y`.
    pub d: Point,
    pub r: f64,
    /// `d / r`; on the diagonal, the unit tangent.
    pub dhat: Point,
    pub nx: Point,
    pub ny: Point,
}

impl PairGeom {
    pub fn new(x: Point, nx: Point, y: Point, ny: Point) -> Self {
        let d = [x[0] - y[0], x[1] - y[1]];
        let r = d[0].hypot(d[1]);
        Self { d, r, dhat: [d[0] / r, d[1] / r], nx, ny }
    }

    /// Coincident pair with unit tangent `tau` and normal `nu`.
    pub fn diagonal(tau: Point, nu: Point) -> Self {
        Self { d: [0.0, 0.0], r: 0.0, dhat: tau, nx: nu, ny: nu }
    }
}

/// Which part of a kernel to evaluate: all three are the same affine map of
/// the channels, except that log coefficients drop the terms without a
/// logarithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    Value,
    Log,
    Reg,
}

fn pick(c: &Channels, p: Part) -> [c64; 3] {
    match p {
        Part::Value => c.value,
        Part::Log => c.log,
        Part::Reg => c.reg,
    }
}

/// All kernels needed by the single-layer and regularized hypersingular
/// operators, for one part.
#[derive(Debug, Clone, Copy)]
pub struct KernelSet {
    /// Navier tensor `E`.
    pub e: Mat2C,
    /// `gamma_{k_s}`.
    pub gamma_s: c64,
    /// `gamma_{k_p}`.
    pub gamma_p: c64,
    /// `grad_x (gamma_s - gamma_p)`.
    pub grad_diff: [c64; 2],
    /// Weakly singular block of the regularized hypersingular operator.
    pub w: Mat2C,
    /// `A E A`.
    pub aea: Mat2C,
    /// `nu_x grad_x^T (gamma_s - gamma_p) A`.
    pub s3: Mat2C,
    /// `A grad_y (gamma_s - gamma_p) nu_y^T`.
    pub s4: Mat2C,
}

fn kernel_set(m: &Material, g: &PairGeom, cs: &Channels, cp: &Channels, part: Part) -> KernelSet {
    let (ks, kp, rw2) = (m.ks, m.kp, m.rho_omega2());
    let (s, p) = (pick(cs, part), pick(cp, part));
    let extra = if part == Part::Log { 0.0 } else { 1.0 };
    let quarter_i = I * 0.25;

    let gamma_s = quarter_i * s[0];
    let gamma_p = quarter_i * p[0];
    let diag = quarter_i * (p[1] * kp - s[1] * ks);
    let dd = quarter_i * (s[2] * (ks * ks) - p[2] * (kp * kp));
    let e = Mat2C::scalar(gamma_s / m.mu)
        + (Mat2C::scalar(diag) + Mat2C::outer(g.d, g.d) * dd) * (1.0 / rw2)
        + Mat2C::outer(g.dhat, g.dhat) * (extra * (ks * ks - kp * kp) / (4.0 * PI * rw2));

    let grad_diff = [diag * g.d[0], diag * g.d[1]];
    let a = gunter();
    let nxny = Mat2C::outer(g.nx, g.ny);
    let jm = Mat2C::outer(g.ny, g.nx) - nxny;
    let dot = g.nx[0] * g.ny[0] + g.nx[1] * g.ny[1];
    let w = (nxny - Mat2C::from_real([[dot, 0.0], [0.0, dot]])) * (gamma_s * rw2)
        - jm * (gamma_s * (m.mu_tilde * ks * ks))
        - nxny * (gamma_p * rw2);
    let nx_g = Mat2C([
        [grad_diff[0] * g.nx[0], grad_diff[1] * g.nx[0]],
        [grad_diff[0] * g.nx[1], grad_diff[1] * g.nx[1]],
    ]);
    let s3 = nx_g * a;
    // grad_y = -grad_x for radial kernels
    let g_ny = Mat2C([
        [-grad_diff[0] * g.ny[0], -grad_diff[0] * g.ny[1]],
        [-grad_diff[1] * g.ny[0], -grad_diff[1] * g.ny[1]],
    ]);
    let s4 = a * g_ny;
    KernelSet { e, gamma_s, gamma_p, grad_diff, w, aea: a * e * a, s3, s4 }
}

/// Logarithmic split `K = K1 ln(rho) + K2` of every kernel in [`KernelSet`].
#[derive(Debug, Clone, Copy)]
pub struct SplitSet {
    pub log: KernelSet,
    pub smooth: KernelSet,
}

/// Splits all kernels at a pair with respect to `ln(rho)`, where `rho` is a
/// parameter-space distance with `r / rho` smooth and positive;
/// `log_ratio = ln(r / rho)` (its limit on the diagonal).
pub fn split_set(m: &Material, g: &PairGeom, log_ratio: f64) -> SplitSet {
    let cs = Channels::new(m.ks, g.r);
    let cp = Channels::new(m.kp, g.r);
    let log = kernel_set(m, g, &cs, &cp, Part::Log);
    let reg = kernel_set(m, g, &cs, &cp, Part::Reg);
    let mix = |l: Mat2C, r: Mat2C| r + l * log_ratio;
    let smooth = KernelSet {
        e: mix(log.e, reg.e),
        gamma_s: reg.gamma_s + log.gamma_s * log_ratio,
        gamma_p: reg.gamma_p + log.gamma_p * log_ratio,
        grad_diff: [0, 1].map(|i| reg.grad_diff[i] + log.grad_diff[i] * log_ratio),
        w: mix(log.w, reg.w),
        aea: mix(log.aea, reg.aea),
        s3: mix(log.s3, reg.s3),
        s4: mix(log.s4, reg.s4),
    };
    SplitSet { log, smooth }
}

/// Full kernel values at a distinct pair.
pub fn kernel_values(m: &Material, g: &PairGeom) -> KernelSet {
    let cs = Channels::new(m.ks, g.r);
    let cp = Channels::new(m.kp, g.r);
    kernel_set(m, g, &cs, &cp, Part::Value)
}

fn check_distinct(x: Point, y: Point) -> Result<()> {
    if x == y {
        Err(Error::CoincidentPoints)
    } else {
        Ok(())
    }
}

/// `(i/4) H0(k |x - y|)`.
pub fn helmholtz_gamma(k: f64, x: Point, y: Point) -> Result<c64> {
    check_distinct(x, y)?;
    let r = (x[0] - y[0]).hypot(x[1] - y[1]);
    Ok(I * 0.25 * BesselSet::new(k * r).h0())
}

/// Navier tensor `E(x, y)`.
pub fn navier_tensor(m: &Material, x: Point, y: Point) -> Result<Mat2C> {
    check_distinct(x, y)?;
    let n = [0.0, 0.0];
    Ok(kernel_values(m, &PairGeom::new(x, n, y, n)).e)
}

/// `E1` (log coefficient) and `E2` (smooth remainder) at a parameter pair.
#[derive(Debug, Clone, Copy)]
pub struct KernelSplit {
    pub e1: Mat2C,
    pub e2: Mat2C,
}

/// Split of the Navier tensor on an open arc: `E = E1 ln|t - tau| + E2`.
pub fn kernel_split_e(m: &Material, geom: &ArcGeometry, t: f64, tau: f64) -> KernelSplit {
    let (a, b) = (geom.eval(t), geom.eval(tau));
    let (g, ratio) = if t == tau {
        let sp = a.speed();
        (PairGeom::diagonal([a.dx[0] / sp, a.dx[1] / sp], a.normal()), sp.ln())
    } else {
        let g = PairGeom::new(a.x, a.normal(), b.x, b.normal());
        let ratio = (g.r / (t - tau).abs()).ln();
        (g, ratio)
    };
    let s = split_set(m, &g, ratio);
    KernelSplit { e1: s.log.e, e2: s.smooth.e }
}

/// Kernels of the regularized hypersingular operator at a distinct pair.
#[derive(Debug, Clone, Copy)]
pub struct AuxKernels {
    pub k_w: Mat2C,
    pub k_s1: Mat2C,
    pub k_s2: c64,
    pub k_s3: Mat2C,
    pub k_s4: Mat2C,
}

pub fn aux_kernels(m: &Material, x: Point, nx: Point, y: Point, ny: Point) -> Result<AuxKernels> {
    check_distinct(x, y)?;
    let k = kernel_values(m, &PairGeom::new(x, nx, y, ny));
    Ok(AuxKernels { k_w: k.w, k_s1: k.aea, k_s2: k.gamma_s, k_s3: k.s3, k_s4: k.s4 })
}

/// `J = nu_y nu_x^T - nu_x nu_y^T`.
pub fn j_matrix(nx: Point, ny: Point) -> [[f64; 2]; 2] {
    let mut j = [[0.0; 2]; 2];
    for (a, row) in j.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = ny[a] * nx[b] - nx[a] * ny[b];
        }
    }
    j
}

/// Derivatives of `E(x, y)` in `x`: `out[k] = d E / d x_k`, at a distinct
/// pair. Used for tractions of the fundamental solution away from the curve.
pub fn navier_gradient(m: &Material, x: Point, y: Point) -> Result<[Mat2C; 2]> {
    check_distinct(x, y)?;
    let d = [x[0] - y[0], x[1] - y[1]];
    let r = d[0].hypot(d[1]);
    let (bs, bp) = (BesselSet::new(m.ks * r), BesselSet::new(m.kp * r));
    let rw2 = m.rho_omega2();
    let quarter_i = I * 0.25;
    // d_k gamma = -(i/4) k H1/r d_k
    let g1 = |k: f64, b: &BesselSet| -quarter_i * k * b.h1() / r;
    // third derivatives of H0(kr): -k^3 H3/r^3 d_i d_j d_k + k^2 H2/r^2 (sym)
    let c3 = quarter_i * (-(m.ks.powi(3)) * bs.h3() + m.kp.powi(3) * bp.h3()) / (r * r * r);
    let c2 = quarter_i * (m.ks * m.ks * bs.h2() - m.kp * m.kp * bp.h2()) / (r * r);
    let gs = g1(m.ks, &bs);
    let mut out = [Mat2C::ZERO; 2];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
                let third = c3 * (d[i] * d[j] * d[k])
                    + c2 * (delta(i, j) * d[k] + delta(i, k) * d[j] + delta(j, k) * d[i]);
                o.0[i][j] = gs * (delta(i, j) * d[k] / m.mu) + third / rw2;
            }
        }
    }
    Ok(out)
}

/// Double-layer kernel `(T_y E(x, y))^T` for the physical traction with
/// normal `ny` at the source point.
pub fn double_layer_kernel(m: &Material, x: Point, y: Point, ny: Point) -> Result<Mat2C> {
    // T_y acts on columns of E(x, .); with grad_y = -grad_x:
    // (T_y E e_j)_i = -[lambda nu_i d_k E_kj + mu nu_k (d_k E_ij + d_i E_kj)]
    let de = navier_gradient(m, x, y)?;
    let mut t = Mat2C::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            let mut v = ZERO;
            for k in 0..2 {
                v += m.lambda * ny[i] * de[k].0[k][j] + m.mu * ny[k] * (de[k].0[i][j] + de[i].0[k][j]);
            }
            t.0[i][j] = -v;
        }
    }
    Ok(t.transpose())
}
