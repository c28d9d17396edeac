//! Nyström discretizations of the boundary operators.
//!
//! Vectors and matrices are component-major: the value of component `a` at
//! node `i` lives at index `a * N + i`, so a `2x2` block `(i, j)` is spread
//! over rows `{i, N + i}` and columns `{j, N + j}`. With this layout the
//! scalar operators `D0`, `T0` and the periodic derivative act block-wise.
//!
//! Open-arc operators take and return the smooth densities at the Chebyshev
//! angles; closed-curve operators act on nodal values at the `2n` periodic
//! nodes.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatMut, MatRef, Par};
use num_complex::Complex64 as c64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{ChebyshevGrid, PeriodicGrid, Point};
use crate::kernels::{split_set, Mat2C, PairGeom, SplitSet};
use crate::material::Material;
use crate::quadrature::{d0_matrix, periodic_diff_matrix, t0_matrix, KressWeights, SymmWeights};

const ZERO: c64 = c64::new(0.0, 0.0);
const ONE: c64 = c64::new(1.0, 0.0);

fn par() -> Par {
    match rayon::current_num_threads() {
        0 | 1 => Par::Seq,
        n => Par::rayon(n),
    }
}

/// Dense `2N x 2N` complex matrix made of `2x2` node blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    /// Number of nodes.
    pub n: usize,
    /// Column-major entries.
    data: Vec<c64>,
}

impl BlockMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ZERO; 4 * n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for k in 0..2 * n {
            m.data[k * 2 * n + k] = ONE;
        }
        m
    }

    pub fn from_mat(n: usize, m: MatRef<'_, c64>) -> Self {
        assert_eq!((m.nrows(), m.ncols()), (2 * n, 2 * n));
        let mut out = Self::zeros(n);
        out.as_mut().copy_from(m);
        out
    }

    /// Matrix dimension `2N`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn as_ref(&self) -> MatRef<'_, c64> {
        MatRef::from_column_major_slice(&self.data, self.dim(), self.dim())
    }

    pub fn as_mut(&mut self) -> MatMut<'_, c64> {
        let d = self.dim();
        MatMut::from_column_major_slice_mut(&mut self.data, d, d)
    }

    pub fn to_mat(&self) -> Mat<c64> {
        self.as_ref().to_owned()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> c64 {
        self.data[col * self.dim() + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: c64) {
        let d = self.dim();
        self.data[col * d + row] = v;
    }

    pub fn block(&self, i: usize, j: usize) -> Mat2C {
        let n = self.n;
        let mut b = Mat2C::ZERO;
        for a in 0..2 {
            for c in 0..2 {
                b.0[a][c] = self.get(a * n + i, c * n + j);
            }
        }
        b
    }

    pub fn set_block(&mut self, i: usize, j: usize, b: Mat2C) {
        let n = self.n;
        for a in 0..2 {
            for c in 0..2 {
                self.set(a * n + i, c * n + j, b.0[a][c]);
            }
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        matvec(self.as_ref(), x)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn transpose(&self) -> BlockMatrix {
        BlockMatrix::from_mat(self.n, self.as_ref().transpose())
    }

    /// Scales column `c` by `w[c]`.
    pub fn scale_cols(&mut self, w: &[f64]) {
        let d = self.dim();
        for (c, col) in self.data.chunks_mut(d).enumerate() {
            col.iter_mut().for_each(|v| *v *= w[c]);
        }
    }

    /// Scales row `r` by `w[r]`.
    pub fn scale_rows(&mut self, w: &[f64]) {
        let d = self.dim();
        for col in self.data.chunks_mut(d) {
            col.iter_mut().zip(w).for_each(|(v, s)| *v *= s);
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: c64, other: &BlockMatrix) {
        assert_eq!(self.n, other.n);
        self.data.iter_mut().zip(&other.data).for_each(|(a, b)| *a += alpha * b);
    }

    pub fn matmul(&self, other: &BlockMatrix) -> BlockMatrix {
        assert_eq!(self.n, other.n);
        let mut out = BlockMatrix::zeros(self.n);
        matmul(out.as_mut(), Accum::Replace, self.as_ref(), other.as_ref(), ONE, par());
        out
    }

    /// `self * (I_2 (x) s)` for a real `N x N` matrix `s`.
    pub fn mul_blockdiag_right(&self, s: MatRef<'_, f64>) -> BlockMatrix {
        let (n, d) = (self.n, self.dim());
        let mut out = BlockMatrix::zeros(n);
        for b in 0..2 {
            // the columns of one component form a contiguous complex 2N x N
            // panel, which is a real 4N x N panel
            let src = &self.data[b * n * d..(b + 1) * n * d];
            let dst = &mut out.data[b * n * d..(b + 1) * n * d];
            let src = MatRef::from_column_major_slice(as_real(src), 2 * d, n);
            let dst = MatMut::from_column_major_slice_mut(as_real_mut(dst), 2 * d, n);
            matmul(dst, Accum::Replace, src, s, 1.0, par());
        }
        out
    }

    /// `(I_2 (x) s) * self` for a real `N x N` matrix `s`.
    pub fn mul_blockdiag_left(&self, s: MatRef<'_, f64>) -> BlockMatrix {
        let n = self.n;
        let sc = Mat::<c64>::from_fn(n, n, |i, j| c64::new(s[(i, j)], 0.0));
        let mut out = BlockMatrix::zeros(n);
        for a in 0..2 {
            let src = self.as_ref().subrows(a * n, n);
            let dst = out.as_mut().subrows_mut(a * n, n);
            matmul(dst, Accum::Replace, sc.as_ref(), src, ONE, par());
        }
        out
    }
}

fn as_real(v: &[c64]) -> &[f64] {
    // Complex<f64> is repr(C) { re, im }
    unsafe { std::slice::from_raw_parts(v.as_ptr() as *const f64, 2 * v.len()) }
}

fn as_real_mut(v: &mut [c64]) -> &mut [f64] {
    unsafe { std::slice::from_raw_parts_mut(v.as_mut_ptr() as *mut f64, 2 * v.len()) }
}

/// Dense complex matrix-vector product.
pub fn matvec(a: MatRef<'_, c64>, x: &[c64]) -> Vec<c64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![ZERO; a.nrows()];
    let xr = MatRef::from_column_major_slice(x, x.len(), 1);
    let yr = MatMut::from_column_major_slice_mut(&mut y, a.nrows(), 1);
    matmul(yr, Accum::Replace, a, xr, ONE, par());
    y
}

/// `(I_2 (x) s) x` for a real row-major `N x N` matrix.
fn blockdiag_apply(s: &[f64], n: usize, x: &[c64]) -> Vec<c64> {
    let mut y = vec![ZERO; 2 * n];
    for a in 0..2 {
        for i in 0..n {
            let row = &s[i * n..(i + 1) * n];
            y[a * n + i] = row.iter().zip(&x[a * n..(a + 1) * n]).map(|(r, v)| v * r).sum();
        }
    }
    y
}

fn row_major_to_mat(s: &[f64], n: usize) -> Mat<f64> {
    Mat::from_fn(n, n, |i, j| s[i * n + j])
}

/// Column pointer that can be shared across the assembly workers; each
/// worker writes only its own columns.
#[derive(Clone, Copy)]
struct SharedCols(*mut c64);
unsafe impl Send for SharedCols {}
unsafe impl Sync for SharedCols {}

/// Assembles `K` block matrices node-column by node-column in parallel.
fn fill<const K: usize>(n: usize, f: impl Fn(usize, usize) -> [Mat2C; K] + Sync) -> [BlockMatrix; K] {
    let mut mats: [BlockMatrix; K] = std::array::from_fn(|_| BlockMatrix::zeros(n));
    let ptrs: [SharedCols; K] = std::array::from_fn(|k| SharedCols(mats[k].data.as_mut_ptr()));
    let d = 2 * n;
    (0..n).into_par_iter().for_each(|j| {
        let ptrs = ptrs;
        for i in 0..n {
            let blocks = f(i, j);
            for (k, b) in blocks.iter().enumerate() {
                for a in 0..2 {
                    for c in 0..2 {
                        let idx = (c * n + j) * d + a * n + i;
                        // SAFETY: column c*n+j is written only by worker j
                        unsafe { *ptrs[k].0.add(idx) = b.0[a][c] };
                    }
                }
            }
        }
    });
    mats
}

fn unit(v: Point) -> Point {
    let s = v[0].hypot(v[1]);
    [v[0] / s, v[1] / s]
}

/// Kernel splits on the Chebyshev grid against `ln|t_i - t_j|`.
fn open_split(m: &Material, g: &ChebyshevGrid, i: usize, j: usize) -> SplitSet {
    if i == j {
        let pg = PairGeom::diagonal(unit(g.deriv[i]), g.normal[i]);
        split_set(m, &pg, g.jac[i].ln())
    } else {
        let pg = PairGeom::new(g.points[i], g.normal[i], g.points[j], g.normal[j]);
        // t_i - t_j from half-angle sines, exact to rounding
        let dt = 2.0 * (0.5 * (g.theta[i] + g.theta[j])).sin() * (0.5 * (g.theta[j] - g.theta[i])).sin();
        split_set(m, &pg, (pg.r / dt.abs()).ln())
    }
}

/// Kernel splits on the periodic grid against `ln(4 sin^2((s_i - s_j)/2))`.
/// The returned log parts are already halved.
fn closed_split(m: &Material, g: &PeriodicGrid, i: usize, j: usize) -> SplitSet {
    let mut s = if i == j {
        let pg = PairGeom::diagonal(unit(g.deriv[i]), g.normal[i]);
        split_set(m, &pg, g.jac[i].ln())
    } else {
        let pg = PairGeom::new(g.points[i], g.normal[i], g.points[j], g.normal[j]);
        let rho = 2.0 * (0.5 * (g.s[i] - g.s[j])).sin().abs();
        split_set(m, &pg, (pg.r / rho).ln())
    };
    let l = &mut s.log;
    l.e = l.e * 0.5;
    l.gamma_s *= 0.5;
    l.gamma_p *= 0.5;
    l.w = l.w * 0.5;
    l.aea = l.aea * 0.5;
    l.s3 = l.s3 * 0.5;
    l.s4 = l.s4 * 0.5;
    s
}

/// `S^w`: maps the smooth density `alpha` to `S[alpha / w]` at the nodes.
pub fn assemble_sw(m: &Material, grid: &ChebyshevGrid) -> BlockMatrix {
    let n = grid.n;
    let w = SymmWeights::new(n);
    let h = PI / n as f64;
    let [s] = fill(n, |i, j| {
        let sp = open_split(m, grid, i, j);
        [(sp.log.e * w.r(i, j) + sp.smooth.e) * (h * grid.jac[j])]
    });
    s
}

/// Single-layer operator acting on nodal values of the physical density
/// (no edge weight absorbed): `S^w diag(w)`.
pub fn assemble_s_unweighted(m: &Material, grid: &ChebyshevGrid) -> BlockMatrix {
    let mut s = assemble_sw(m, grid);
    let w: Vec<f64> = grid.weight.iter().chain(&grid.weight).copied().collect();
    s.scale_cols(&w);
    s
}

/// The five pieces of the regularized weighted hypersingular operator.
///
/// With `c = mu + mu_tilde`, `W = diag(|x'| sin^2 theta)` and
/// `J^-1 = diag(1/|x'|)`:
///
/// ```text
/// N^w = - S_W W                       (i)
///       - c^2 J^-1 D0 S_AEA T0        (ii)
///       - 2c  J^-1 D0 S_gamma T0      (iii)
///       + c   S_3 T0                  (iv)
///       - c   J^-1 D0 S_4 W           (v)
/// ```
///
/// The signs of the derivative terms follow from `ds = |x'| sin(theta)
/// dtheta` and `d/dt = -(1/sin theta) d/dtheta`.
#[derive(Debug, Clone)]
pub struct NwOperator {
    pub n: usize,
    /// `mu + mu_tilde`.
    pub c: f64,
    /// `S_W W`.
    pub s_w: BlockMatrix,
    pub s_aea: BlockMatrix,
    /// Scalar `gamma_{k_s}` operator, `N x N`.
    pub s_gamma: Mat<c64>,
    pub s_3: BlockMatrix,
    /// `S_4 W`.
    pub s_4: BlockMatrix,
    pub jinv: Vec<f64>,
    d0: Vec<f64>,
    t0: Vec<f64>,
}

impl NwOperator {
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    fn d0(&self, x: &[c64]) -> Vec<c64> {
        blockdiag_apply(&self.d0, self.n, x)
    }

    fn t0(&self, x: &[c64]) -> Vec<c64> {
        blockdiag_apply(&self.t0, self.n, x)
    }

    fn jinv(&self, x: &mut [c64]) {
        let n = self.n;
        for (k, v) in x.iter_mut().enumerate() {
            *v *= self.jinv[k % n];
        }
    }

    fn gamma_apply(&self, x: &[c64]) -> Vec<c64> {
        let n = self.n;
        let mut y = vec![ZERO; 2 * n];
        for a in 0..2 {
            let r = matvec(self.s_gamma.as_ref(), &x[a * n..(a + 1) * n]);
            y[a * n..(a + 1) * n].copy_from_slice(&r);
        }
        y
    }

    /// The five terms applied separately, in the order listed above.
    pub fn apply_terms(&self, x: &[c64]) -> [Vec<c64>; 5] {
        let c = self.c;
        let tx = self.t0(x);
        let t1: Vec<c64> = self.s_w.apply(x).iter().map(|v| -v).collect();
        let mut t2 = self.d0(&self.s_aea.apply(&tx));
        self.jinv(&mut t2);
        t2.iter_mut().for_each(|v| *v *= -c * c);
        let mut t3 = self.d0(&self.gamma_apply(&tx));
        self.jinv(&mut t3);
        t3.iter_mut().for_each(|v| *v *= -2.0 * c);
        let t4: Vec<c64> = self.s_3.apply(&tx).iter().map(|v| v * c).collect();
        let mut t5 = self.d0(&self.s_4.apply(x));
        self.jinv(&mut t5);
        t5.iter_mut().for_each(|v| *v *= -c);
        [t1, t2, t3, t4, t5]
    }

    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        let c = self.c;
        let tx = self.t0(x);
        let mut inner = self.s_aea.apply(&tx);
        let g = self.gamma_apply(&tx);
        let s4 = self.s_4.apply(x);
        for k in 0..inner.len() {
            inner[k] = inner[k] * c + g[k] * 2.0 + s4[k];
        }
        let mut y = self.d0(&inner);
        self.jinv(&mut y);
        let sw = self.s_w.apply(x);
        let s3 = self.s_3.apply(&tx);
        for k in 0..y.len() {
            y[k] = -y[k] * c - sw[k] + s3[k] * c;
        }
        y
    }

    /// Dense matrix of [`NwOperator::apply`].
    pub fn materialize(&self) -> BlockMatrix {
        let n = self.n;
        let c = self.c;
        let t0 = row_major_to_mat(&self.t0, n);
        let d0 = row_major_to_mat(&self.d0, n);
        // c S_AEA + 2 (I (x) S_gamma), then * T0, then + S_4 W
        let mut m1 = self.s_aea.clone();
        m1.data.iter_mut().for_each(|v| *v *= c);
        for a in 0..2 {
            for j in 0..n {
                for i in 0..n {
                    let (r, col) = (a * n + i, a * n + j);
                    let v = m1.get(r, col) + self.s_gamma[(i, j)] * 2.0;
                    m1.set(r, col, v);
                }
            }
        }
        let mut inner = m1.mul_blockdiag_right(t0.as_ref());
        drop(m1);
        inner.axpy(ONE, &self.s_4);
        let mut out = inner.mul_blockdiag_left(d0.as_ref());
        drop(inner);
        let jr: Vec<f64> = (0..2 * n).map(|k| -c * self.jinv[k % n]).collect();
        out.scale_rows(&jr);
        let s3t = self.s_3.mul_blockdiag_right(t0.as_ref());
        out.axpy(c64::new(c, 0.0), &s3t);
        drop(s3t);
        out.axpy(-ONE, &self.s_w);
        out
    }
}

/// Regularized `N^w` (`modified = false`, `mu_tilde = mu`) or `Ñ^w`.
pub fn assemble_nw(m: &Material, grid: &ChebyshevGrid, modified: bool) -> NwOperator {
    let m = if modified { *m } else { m.unmodified() };
    let n = grid.n;
    let w = SymmWeights::new(n);
    let h = PI / n as f64;
    let wd: Vec<f64> = (0..n).map(|j| grid.jac[j] * grid.weight[j] * grid.weight[j]).collect();
    let [s_w, s_aea, s_3, s_4, gam] = fill(n, |i, j| {
        let sp = open_split(&m, grid, i, j);
        let r = w.r(i, j);
        let q = |l: Mat2C, s: Mat2C| (l * r + s) * h;
        [
            q(sp.log.w, sp.smooth.w) * wd[j],
            q(sp.log.aea, sp.smooth.aea),
            q(sp.log.s3, sp.smooth.s3),
            q(sp.log.s4, sp.smooth.s4) * wd[j],
            Mat2C::scalar((sp.log.gamma_s * r + sp.smooth.gamma_s) * h),
        ]
    });
    let s_gamma = Mat::from_fn(n, n, |i, j| gam.get(i, j));
    drop(gam);
    NwOperator {
        n,
        c: m.mu + m.mu_tilde,
        s_w,
        s_aea,
        s_gamma,
        s_3,
        s_4,
        jinv: grid.jac.iter().map(|j| 1.0 / j).collect(),
        d0: d0_matrix(n),
        t0: t0_matrix(n),
    }
}

/// Closed-curve operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedKind {
    S,
    N,
    Ntilde,
    Kstar,
}

/// Nyström matrix of a closed-curve operator on `2n` periodic nodes.
pub fn assemble_closed(m: &Material, grid: &PeriodicGrid, which: ClosedKind) -> Result<BlockMatrix> {
    match which {
        ClosedKind::S => Ok(assemble_closed_s(m, grid)),
        ClosedKind::N => Ok(assemble_closed_n(&m.unmodified(), grid)),
        ClosedKind::Ntilde => Ok(assemble_closed_n(m, grid)),
        ClosedKind::Kstar => Err(Error::Unsupported("adjoint double-layer operator".into())),
    }
}

fn assemble_closed_s(m: &Material, g: &PeriodicGrid) -> BlockMatrix {
    let nn = g.len();
    let w = KressWeights::new(g.n);
    let h = PI / g.n as f64;
    let [s] = fill(nn, |i, j| {
        let sp = closed_split(m, g, i, j);
        [(sp.log.e * w.r(i, j) + sp.smooth.e * h) * g.jac[j]]
    });
    s
}

fn assemble_closed_n(m: &Material, g: &PeriodicGrid) -> BlockMatrix {
    let nn = g.len();
    let w = KressWeights::new(g.n);
    let h = PI / g.n as f64;
    let c = m.mu + m.mu_tilde;
    // N = -S_W J + c J^-1 Dp (M1 Dp) - c S_3 Dp - c J^-1 Dp S_4 J,
    // M1 = c AEA + 2 gamma_s I
    let [s_w, m1, s_3, s_4] = fill(nn, |i, j| {
        let sp = closed_split(m, g, i, j);
        let r = w.r(i, j);
        let q = |l: Mat2C, s: Mat2C| l * r + s * h;
        let gam = Mat2C::scalar(sp.log.gamma_s * r + sp.smooth.gamma_s * h);
        [
            q(sp.log.w, sp.smooth.w) * g.jac[j],
            q(sp.log.aea, sp.smooth.aea) * c + gam * 2.0,
            q(sp.log.s3, sp.smooth.s3),
            q(sp.log.s4, sp.smooth.s4) * g.jac[j],
        ]
    });
    let dp = row_major_to_mat(&periodic_diff_matrix(g.n), nn);
    let mut inner = m1.mul_blockdiag_right(dp.as_ref());
    drop(m1);
    inner.axpy(-ONE, &s_4);
    drop(s_4);
    let mut out = inner.mul_blockdiag_left(dp.as_ref());
    drop(inner);
    let jr: Vec<f64> = (0..2 * nn).map(|k| c / g.jac[k % nn]).collect();
    out.scale_rows(&jr);
    let s3d = s_3.mul_blockdiag_right(dp.as_ref());
    out.axpy(c64::new(-c, 0.0), &s3d);
    out.axpy(-ONE, &s_w);
    out
}

/// Operator tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Sw,
    Nw,
    Ntw,
    NwSw,
    NtwSw,
    SClosed,
    NClosed,
    NtildeClosed,
    KstarClosed,
    NSClosed,
    NtSClosed,
    Identity,
    Other,
}

/// A discrete operator: assembled, lazily applied, or a composition.
#[derive(Debug, Clone)]
pub enum DiscreteOperator {
    Dense(OperatorKind, Arc<BlockMatrix>),
    Hypersingular(OperatorKind, Arc<NwOperator>),
    Composite(OperatorKind, Box<DiscreteOperator>, Box<DiscreteOperator>),
    Identity(usize),
}

impl DiscreteOperator {
    pub fn kind(&self) -> OperatorKind {
        match self {
            Self::Dense(k, _) | Self::Hypersingular(k, _) | Self::Composite(k, _, _) => *k,
            Self::Identity(_) => OperatorKind::Identity,
        }
    }

    /// Number of nodes.
    pub fn nodes(&self) -> usize {
        match self {
            Self::Dense(_, m) => m.n,
            Self::Hypersingular(_, op) => op.n,
            Self::Composite(_, l, _) => l.nodes(),
            Self::Identity(n) => *n,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.nodes()
    }

    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        match self {
            Self::Dense(_, m) => m.apply(x),
            Self::Hypersingular(_, op) => op.apply(x),
            Self::Composite(_, l, r) => l.apply(&r.apply(x)),
            Self::Identity(_) => x.to_vec(),
        }
    }

    pub fn materialize(&self) -> BlockMatrix {
        match self {
            Self::Dense(_, m) => (**m).clone(),
            Self::Hypersingular(_, op) => op.materialize(),
            Self::Composite(_, l, r) => {
                if let Self::Identity(_) = **r {
                    return l.materialize();
                }
                if let Self::Identity(_) = **l {
                    return r.materialize();
                }
                l.materialize().matmul(&r.materialize())
            }
            Self::Identity(n) => BlockMatrix::identity(*n),
        }
    }

    /// Replaces a lazily applied factor by its dense matrix.
    pub fn into_dense(self) -> DiscreteOperator {
        match self {
            Self::Hypersingular(k, op) => Self::Dense(k, Arc::new(op.materialize())),
            Self::Composite(k, l, r) => Self::Composite(k, Box::new(l.into_dense()), Box::new(r.into_dense())),
            other => other,
        }
    }
}

/// `left * right`, applied lazily.
pub fn compose(left: DiscreteOperator, right: DiscreteOperator, kind: OperatorKind) -> Result<DiscreteOperator> {
    if left.dim() != right.dim() {
        return Err(Error::DimensionMismatch { expected: left.dim(), got: right.dim() });
    }
    Ok(DiscreteOperator::Composite(kind, Box::new(left), Box::new(right)))
}

/// Eigenvalues of a materialized operator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<c64>,
}

impl Spectrum {
    pub fn min_abs(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Fraction of eigenvalues within `radius` of `center`.
    pub fn fraction_near(&self, center: c64, radius: f64) -> f64 {
        let k = self.eigenvalues.iter().filter(|z| (*z - center).norm() <= radius).count();
        k as f64 / self.eigenvalues.len().max(1) as f64
    }
}

pub fn spectrum(a: &BlockMatrix) -> Result<Spectrum> {
    let mut ev = a.as_ref().eigenvalues().map_err(|_| Error::EigenNonConvergence)?;
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenNonConvergence);
    }
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(Spectrum { eigenvalues: ev })
}

/// Largest relative residual `|A v - lambda v| / (|A|_F |v|)` over the
/// first `count` eigenpairs.
pub fn eigen_residual(a: &BlockMatrix, count: usize) -> Result<f64> {
    let e = a.as_ref().eigen().map_err(|_| Error::EigenNonConvergence)?;
    let (u, s) = (e.U(), e.S());
    let an = a.norm();
    let mut worst: f64 = 0.0;
    let d = a.dim();
    let step = (d / count.max(1)).max(1);
    for k in (0..d).step_by(step).take(count) {
        let v: Vec<c64> = (0..d).map(|i| u[(i, k)]).collect();
        let av = a.apply(&v);
        let lam = s[k];
        let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - lam * y).norm_sqr()).sum::<f64>().sqrt();
        let vn: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(res / (an * vn));
    }
    Ok(worst)
}

/// Interleaves per-node 2-vectors into the component-major layout.
pub fn to_flat(v: &[[c64; 2]]) -> Vec<c64> {
    let n = v.len();
    let mut out = vec![ZERO; 2 * n];
    for (i, p) in v.iter().enumerate() {
        out[i] = p[0];
        out[n + i] = p[1];
    }
    out
}

pub fn from_flat(x: &[c64]) -> Vec<[c64; 2]> {
    let n = x.len() / 2;
    (0..n).map(|i| [x[i], x[n + i]]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset_geometry, Preset};

    fn mat(omega: f64) -> Material {
        Material::new(2.0, 1.0, 1.0, omega).unwrap()
    }

    fn rand_vec(len: usize, seed: u64) -> Vec<c64> {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        (0..len).map(|_| c64::new(next(), next())).collect()
    }

    fn max_err(a: &[c64], b: &[c64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn block_layout() {
        let mut b = BlockMatrix::zeros(3);
        let blk = Mat2C([[c64::new(1.0, 0.0), c64::new(2.0, 0.0)], [c64::new(3.0, 0.0), c64::new(4.0, 0.0)]]);
        b.set_block(1, 2, blk);
        assert_eq!(b.block(1, 2), blk);
        assert_eq!(b.get(1, 2), c64::new(1.0, 0.0));
        assert_eq!(b.get(1, 5), c64::new(2.0, 0.0));
        assert_eq!(b.get(4, 2), c64::new(3.0, 0.0));
        let x = to_flat(&[[ZERO, ZERO], [ZERO, ZERO], [ONE, ONE]]);
        let y = b.apply(&x);
        assert_eq!(from_flat(&y)[1], [c64::new(3.0, 0.0), c64::new(7.0, 0.0)]);
    }

    #[test]
    fn blockdiag_products() {
        let n = 5;
        let a = BlockMatrix::from_mat(n, Mat::from_fn(2 * n, 2 * n, |i, j| c64::new((i * 3 + j) as f64, (i as f64) - (j as f64))).as_ref());
        let s = Mat::<f64>::from_fn(n, n, |i, j| ((i + 2 * j) % 7) as f64 - 3.0);
        let mut sb = BlockMatrix::zeros(n);
        for a_ in 0..2 {
            for i in 0..n {
                for j in 0..n {
                    sb.set(a_ * n + i, a_ * n + j, c64::new(s[(i, j)], 0.0));
                }
            }
        }
        let r1 = a.mul_blockdiag_right(s.as_ref());
        let r2 = a.matmul(&sb);
        assert!((r1.to_mat() - r2.to_mat()).norm_max() < 1e-12);
        let l1 = a.mul_blockdiag_left(s.as_ref());
        let l2 = sb.matmul(&a);
        assert!((l1.to_mat() - l2.to_mat()).norm_max() < 1e-12);
    }

    #[test]
    fn zero_density_maps_to_zero() {
        let g = ChebyshevGrid::new(&preset_geometry(Preset::FlatStrip).unwrap(), 8).unwrap();
        let s = assemble_sw(&mat(1.0), &g);
        assert!(s.apply(&vec![ZERO; 16]).iter().all(|v| *v == ZERO));
    }

    #[test]
    fn nw_lazy_matches_materialized_and_terms_sum() {
        let g = ChebyshevGrid::new(&preset_geometry(Preset::Spiral).unwrap(), 24).unwrap();
        let op = assemble_nw(&mat(3.0), &g, true);
        let dense = op.materialize();
        for seed in 0..3 {
            let x = rand_vec(48, seed);
            let a = op.apply(&x);
            let b = dense.apply(&x);
            let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(max_err(&a, &b) < 1e-12 * scale);
            let terms = op.apply_terms(&x);
            let sum: Vec<c64> = (0..48).map(|k| terms.iter().map(|t| t[k]).sum()).collect();
            assert!(max_err(&sum, &a) < 1e-12 * scale);
        }
    }

    #[test]
    fn nw_unmodified_equals_forced_tildes() {
        let g = ChebyshevGrid::new(&preset_geometry(Preset::Spiral).unwrap(), 12).unwrap();
        let m = mat(2.0);
        let a = assemble_nw(&m, &g, false).materialize();
        let b = assemble_nw(&m.unmodified(), &g, true).materialize();
        assert_eq!(a, b);
    }

    #[test]
    fn closed_s_is_symmetric_on_circle() {
        let g = PeriodicGrid::new(&preset_geometry(Preset::Circle { r: 1.0 }).unwrap(), 16).unwrap();
        let s = assemble_closed(&mat(5.0), &g, ClosedKind::S).unwrap();
        let d = (s.to_mat() - s.transpose().to_mat()).norm_l2();
        assert!(d <= 1e-10 * s.norm());
    }

    #[test]
    fn compose_and_materialize() {
        let g = ChebyshevGrid::new(&preset_geometry(Preset::Spiral).unwrap(), 10).unwrap();
        let m = mat(2.0);
        let s = DiscreteOperator::Dense(OperatorKind::Sw, Arc::new(assemble_sw(&m, &g)));
        let nw = DiscreteOperator::Hypersingular(OperatorKind::Nw, Arc::new(assemble_nw(&m, &g, false)));
        let id = compose(s.clone(), DiscreteOperator::Identity(10), OperatorKind::Sw).unwrap();
        let x = rand_vec(20, 9);
        assert_eq!(id.apply(&x), s.apply(&x));
        let ns = compose(nw, s, OperatorKind::NwSw).unwrap();
        let dense = ns.materialize();
        for seed in 0..10 {
            let x = rand_vec(20, seed);
            let (a, b) = (ns.apply(&x), dense.apply(&x));
            let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(max_err(&a, &b) < 1e-12 * scale);
        }
        assert!(matches!(
            compose(DiscreteOperator::Identity(3), DiscreteOperator::Identity(4), OperatorKind::Other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spectrum_of_simple_matrices() {
        let s = spectrum(&BlockMatrix::identity(4)).unwrap();
        assert!(s.eigenvalues.iter().all(|z| (z - ONE).norm() < 1e-14));
        let mut d = BlockMatrix::zeros(3);
        for k in 0..6 {
            d.set(k, k, c64::new(k as f64 + 1.0, -(k as f64)));
        }
        let s = spectrum(&d).unwrap();
        for k in 0..6 {
            let want = c64::new(k as f64 + 1.0, -(k as f64));
            assert!(s.eigenvalues.iter().any(|z| (z - want).norm() < 1e-12));
        }
    }

    #[test]
    fn eigenpairs_have_small_residuals() {
        let g = ChebyshevGrid::new(&preset_geometry(Preset::Spiral).unwrap(), 20).unwrap();
        let a = assemble_sw(&mat(5.0), &g);
        assert!(eigen_residual(&a, 10).unwrap() < 1e-8);
    }
}
