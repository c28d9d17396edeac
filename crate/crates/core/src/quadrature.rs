//! Spectral quadrature and differentiation on Chebyshev and periodic grids.
//!
//! Chebyshev angles are `theta_j = pi (2j+1) / (2N)`. All transforms use
//! the type-II/III cosine and sine pairings at these angles, computed either
//! by direct summation or through a length-`2N` complex FFT.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64 as c64;
use rustfft::FftPlanner;

/// Direct summation is used below this size unless a route is forced.
pub const FFT_THRESHOLD: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Auto,
    Direct,
    Fft,
}

impl Route {
    fn use_fft(self, n: usize) -> bool {
        match self {
            Route::Auto => n >= FFT_THRESHOLD,
            Route::Direct => false,
            Route::Fft => true,
        }
    }
}

/// Eigenvalues of the logarithmic operator on `cos(n theta)`.
pub fn symm_lambda(n: usize) -> f64 {
    if n == 0 {
        LN_2 / 2.0
    } else {
        1.0 / (2.0 * n as f64)
    }
}

/// Weights of the product rule for
/// `int_0^pi ln|cos theta - cos theta'| f(theta') dtheta'`
/// on the Chebyshev angles.
#[derive(Debug, Clone)]
pub struct SymmWeights {
    pub n: usize,
    /// `table[l] = -sum_m (2 - delta_0m) lambda_m cos(l m pi / N)`, `l < 2N`.
    pub table: Vec<f64>,
}

impl SymmWeights {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "symm weights need N >= 2");
        let cos = cos_table(2 * n, PI / n as f64);
        let table = (0..2 * n)
            .map(|l| {
                // ascending m: the larger weights come first
                -(0..n)
                    .map(|m| {
                        let c = if m == 0 { 1.0 } else { 2.0 };
                        c * symm_lambda(m) * cos[(l * m) % (2 * n)]
                    })
                    .sum::<f64>()
            })
            .collect();
        Self { n, table }
    }

    /// `R_j(theta_i)`.
    #[inline]
    pub fn r(&self, i: usize, j: usize) -> f64 {
        self.table[i.abs_diff(j)] + self.table[i + j + 1]
    }

    /// `R_j(theta)` at an arbitrary angle.
    pub fn r_at(&self, j: usize, theta: f64) -> f64 {
        let tj = PI * (2 * j + 1) as f64 / (2 * self.n) as f64;
        -(0..self.n)
            .map(|m| {
                let c = if m == 0 { 2.0 } else { 4.0 };
                c * symm_lambda(m) * (m as f64 * tj).cos() * (m as f64 * theta).cos()
            })
            .sum::<f64>()
    }
}

pub fn symm_weights(n: usize) -> SymmWeights {
    SymmWeights::new(n)
}

/// `(pi/N) sum_j f_j R_j(theta)`.
pub fn log_quadrature(f: &[c64], w: &SymmWeights, theta: f64) -> c64 {
    assert_eq!(f.len(), w.n);
    let s: c64 = f.iter().enumerate().map(|(j, v)| v * w.r_at(j, theta)).sum();
    s * (PI / w.n as f64)
}

/// `(pi/N) sum_j f_j`.
pub fn trapezoid_cheb(f: &[c64]) -> c64 {
    f.iter().sum::<c64>() * (PI / f.len() as f64)
}

fn cos_table(len: usize, step: f64) -> Vec<f64> {
    (0..len).map(|k| (k as f64 * step).cos()).collect()
}

/// Sums `C_n = sum_j f_j cos(n theta_j)` and `S_n = sum_j f_j sin(n theta_j)`
/// for `n = 0..=N`.
fn analysis_sums(f: &[c64], route: Route) -> (Vec<c64>, Vec<c64>) {
    let n = f.len();
    if route.use_fft(n) {
        let m = 2 * n;
        let mut planner = FftPlanner::<f64>::new();
        let mut p: Vec<c64> = f.to_vec();
        p.resize(m, c64::new(0.0, 0.0));
        let mut q = p.clone();
        planner.plan_fft_forward(m).process(&mut p);
        planner.plan_fft_inverse(m).process(&mut q);
        let mut c = Vec::with_capacity(n + 1);
        let mut s = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let ph = c64::from_polar(1.0, PI * k as f64 / m as f64);
            // P_k = sum f_j e^{-i k theta_j}, Q_k = sum f_j e^{+i k theta_j}
            let pk = p[k % m] * ph.conj();
            let qk = q[k % m] * ph;
            c.push((pk + qk) * 0.5);
            s.push((pk - qk) * c64::new(0.0, 0.5));
        }
        (c, s)
    } else {
        // angles k pi / (2N), k = n (2j+1) mod 4N
        let m4 = 4 * n;
        let step = PI / (2 * n) as f64;
        let mut c = vec![c64::new(0.0, 0.0); n + 1];
        let mut s = vec![c64::new(0.0, 0.0); n + 1];
        let ct = cos_table(m4, step);
        let st: Vec<f64> = (0..m4).map(|k| (k as f64 * step).sin()).collect();
        for k in 0..=n {
            for (j, v) in f.iter().enumerate() {
                let idx = (k * (2 * j + 1)) % m4;
                c[k] += v * ct[idx];
                s[k] += v * st[idx];
            }
        }
        (c, s)
    }
}

/// `g_i = sum_{k=0}^{len-1} b_k cos(k theta_i)` at the `n` Chebyshev angles.
fn cos_synthesis(b: &[c64], n: usize, route: Route) -> Vec<c64> {
    assert!(b.len() <= 2 * n);
    if route.use_fft(n) {
        let m = 2 * n;
        let mut planner = FftPlanner::<f64>::new();
        let mut up = vec![c64::new(0.0, 0.0); m];
        let mut dn = vec![c64::new(0.0, 0.0); m];
        for (k, v) in b.iter().enumerate() {
            let ph = c64::from_polar(1.0, PI * k as f64 / m as f64);
            up[k] = v * ph;
            dn[k] = v * ph.conj();
        }
        planner.plan_fft_inverse(m).process(&mut up);
        planner.plan_fft_forward(m).process(&mut dn);
        (0..n).map(|i| (up[i] + dn[i]) * 0.5).collect()
    } else {
        let m4 = 4 * n;
        let ct = cos_table(m4, PI / (2 * n) as f64);
        (0..n)
            .map(|i| b.iter().enumerate().map(|(k, v)| v * ct[(k * (2 * i + 1)) % m4]).sum())
            .collect()
    }
}

/// Chebyshev coefficients `a_n = (2 - delta_0n)/N sum_j f_j cos(n theta_j)`.
pub fn cos_coefficients(f: &[c64], route: Route) -> Vec<c64> {
    let n = f.len();
    let (c, _) = analysis_sums(f, route);
    (0..n).map(|k| c[k] * if k == 0 { 1.0 } else { 2.0 } / n as f64).collect()
}

/// Inverse of [`cos_coefficients`].
pub fn cos_evaluate(a: &[c64], route: Route) -> Vec<c64> {
    cos_synthesis(a, a.len(), route)
}

/// Sine coefficients `s_n`, `n = 1..=N` (stored at `n - 1`) of the
/// interpolant `sum s_n sin(n theta)`.
pub fn sin_coefficients(g: &[c64], route: Route) -> Vec<c64> {
    let n = g.len();
    let (_, s) = analysis_sums(g, route);
    (1..=n).map(|k| s[k] * if k == n { 1.0 } else { 2.0 } / n as f64).collect()
}

/// `d phi / dt` at the nodes, where `phi(cos theta) = f(theta)`.
pub fn d0_derivative(f: &[c64]) -> Vec<c64> {
    d0_derivative_with(f, Route::Auto)
}

pub fn d0_derivative_with(f: &[c64], route: Route) -> Vec<c64> {
    let n = f.len();
    let a = cos_coefficients(f, route);
    // derivative recurrence b_{k-1} = b_{k+1} + 2k a_k
    let mut b = vec![c64::new(0.0, 0.0); n + 1];
    for k in (1..n).rev() {
        b[k - 1] = b[k + 1] + a[k] * (2.0 * k as f64);
    }
    b[0] *= 0.5;
    b.truncate(n);
    cos_synthesis(&b, n, route)
}

/// `d/dtheta (f sin theta)` at the nodes.
pub fn t0_derivative(f: &[c64]) -> Vec<c64> {
    t0_derivative_with(f, Route::Auto)
}

pub fn t0_derivative_with(f: &[c64], route: Route) -> Vec<c64> {
    let n = f.len();
    let g: Vec<c64> = f
        .iter()
        .enumerate()
        .map(|(j, v)| v * (PI * (2 * j + 1) as f64 / (2 * n) as f64).sin())
        .collect();
    let s = sin_coefficients(&g, route);
    // cos(N theta_i) = 0, so the last mode drops out
    let b: Vec<c64> = (0..n).map(|k| if k == 0 { c64::new(0.0, 0.0) } else { s[k - 1] * k as f64 }).collect();
    cos_synthesis(&b, n, route)
}

/// Fejér's first rule: weights for `int_{-1}^1 f(t) dt` at `t_j = cos(theta_j)`.
pub fn fejer_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let th = PI * (2 * j + 1) as f64 / (2 * n) as f64;
            let s: f64 = (1..=n / 2).map(|k| (2.0 * k as f64 * th).cos() / (4.0 * (k * k) as f64 - 1.0)).sum();
            2.0 / n as f64 * (1.0 - 2.0 * s)
        })
        .collect()
}

/// Dense `N x N` matrix of [`d0_derivative`], row-major.
///
/// Barycentric differentiation at the Chebyshev-Gauss points with weights
/// `(-1)^j sin(theta_j)`; node differences are formed from half-angle sines
/// to avoid cancellation.
pub fn d0_matrix(n: usize) -> Vec<f64> {
    let th: Vec<f64> = (0..n).map(|j| PI * (2 * j + 1) as f64 / (2 * n) as f64).collect();
    let w: Vec<f64> = th.iter().enumerate().map(|(j, t)| if j % 2 == 0 { t.sin() } else { -t.sin() }).collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            // cos a - cos b = -2 sin((a+b)/2) sin((a-b)/2)
            let dt = -2.0 * (0.5 * (th[i] + th[j])).sin() * (0.5 * (th[i] - th[j])).sin();
            let v = (w[j] / w[i]) / dt;
            d[i * n + j] = v;
            diag -= v;
        }
        d[i * n + i] = diag;
    }
    d
}

/// Dense matrix of [`t0_derivative`]: `diag(t) - diag(1 - t^2) D0`.
pub fn t0_matrix(n: usize) -> Vec<f64> {
    let mut m = d0_matrix(n);
    for i in 0..n {
        let th = PI * (2 * i + 1) as f64 / (2 * n) as f64;
        let s2 = th.sin().powi(2);
        for v in &mut m[i * n..(i + 1) * n] {
            *v *= -s2;
        }
        m[i * n + i] += th.cos();
    }
    m
}

/// Product weights for `int_0^{2pi} ln(4 sin^2((s - sigma)/2)) f(sigma) dsigma`
/// on `2n` equispaced nodes.
#[derive(Debug, Clone)]
pub struct KressWeights {
    pub n: usize,
    /// `table[l] = R(l pi / n)`.
    pub table: Vec<f64>,
}

impl KressWeights {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let m = 2 * n;
        let cos = cos_table(m, PI / n as f64);
        let table = (0..m)
            .map(|l| {
                let s: f64 = (1..n).map(|k| cos[(k * l) % m] / k as f64).sum();
                let last = if l % 2 == 0 { 1.0 } else { -1.0 };
                -2.0 * PI / n as f64 * s - PI / (n * n) as f64 * last
            })
            .collect();
        Self { n, table }
    }

    /// `R(s_i - s_j)`.
    #[inline]
    pub fn r(&self, i: usize, j: usize) -> f64 {
        let m = 2 * self.n;
        self.table[(i + m - j) % m]
    }

    /// `R(s - s_j)` at an arbitrary target.
    pub fn r_at(&self, s: f64, j: usize) -> f64 {
        let n = self.n;
        let d = s - PI * j as f64 / n as f64;
        let sum: f64 = (1..n).map(|k| (k as f64 * d).cos() / k as f64).sum();
        -2.0 * PI / n as f64 * sum - PI / (n * n) as f64 * (n as f64 * d).cos()
    }
}

pub fn kress_log_weights(n: usize) -> KressWeights {
    KressWeights::new(n)
}

/// Spectral differentiation matrix on `2n` periodic nodes, row-major.
pub fn periodic_diff_matrix(n: usize) -> Vec<f64> {
    let m = 2 * n;
    let h = PI / n as f64;
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                let l = i as isize - j as isize;
                let sgn = if l.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                d[i * m + j] = 0.5 * sgn / (0.5 * l as f64 * h).tan();
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thetas(n: usize) -> Vec<f64> {
        (0..n).map(|j| PI * (2 * j + 1) as f64 / (2 * n) as f64).collect()
    }

    fn cx(v: &[f64]) -> Vec<c64> {
        v.iter().map(|&x| c64::new(x, 0.0)).collect()
    }

    fn max_err(a: &[c64], b: &[c64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn symm_eigenvalues() {
        assert_eq!(symm_lambda(0), LN_2 / 2.0);
        assert_eq!(symm_lambda(1), 0.5);
        assert!((symm_lambda(3) - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn symm_rule_reproduces_eigenrelation() {
        for n in [8, 33] {
            let w = SymmWeights::new(n);
            let th = thetas(n);
            for k in 0..n {
                for i in 0..n {
                    let s: f64 = (0..n).map(|j| (k as f64 * th[j]).cos() * w.r(i, j)).sum();
                    let lhs = s / (2.0 * n as f64);
                    let rhs = -symm_lambda(k) * (k as f64 * th[i]).cos();
                    assert!((lhs - rhs).abs() < 1e-12, "N={n} k={k} i={i}");
                }
            }
        }
    }

    #[test]
    fn symm_weights_symmetric_and_consistent() {
        let w = SymmWeights::new(12);
        let th = thetas(12);
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(w.r(i, j), w.r(j, i));
                assert!((w.r(i, j) - w.r_at(j, th[i])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn log_quadrature_low_modes() {
        let n = 16;
        let w = SymmWeights::new(n);
        let th = thetas(n);
        let one = vec![c64::new(1.0, 0.0); n];
        let cs = cx(&th.iter().map(|t| t.cos()).collect::<Vec<_>>());
        for theta in [0.1, 1.3, 2.9] {
            assert!((log_quadrature(&one, &w, theta) - c64::new(-PI * LN_2, 0.0)).norm() < 1e-12);
            assert!((log_quadrature(&cs, &w, theta) - c64::new(-PI * theta.cos(), 0.0)).norm() < 1e-12);
            let two: Vec<c64> = cs.iter().map(|v| v * 2.0).collect();
            assert!((log_quadrature(&two, &w, theta) - log_quadrature(&cs, &w, theta) * 2.0).norm() < 1e-13);
        }
    }

    #[test]
    fn log_quadrature_converges_spectrally() {
        // exp(cos theta) against the finest rule
        let q = |n: usize| {
            let f: Vec<c64> = thetas(n).iter().map(|t| c64::new(t.cos().exp(), 0.0)).collect();
            log_quadrature(&f, &SymmWeights::new(n), 0.7)
        };
        let r = q(64);
        let (e4, e8, e16) = ((q(4) - r).norm(), (q(8) - r).norm(), (q(16) - r).norm());
        assert!(e8 < 1e-3 * e4, "{e4} {e8}");
        assert!(e16 < 1e-12, "{e16}");
    }

    #[test]
    fn fejer_integrates_polynomials() {
        for n in [5, 12, 31] {
            let w = fejer_weights(n);
            let t: Vec<f64> = thetas(n).iter().map(|x| x.cos()).collect();
            for p in 0..n {
                let q: f64 = w.iter().zip(&t).map(|(w, t)| w * t.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p + 1) as f64 };
                assert!((q - exact).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn trapezoid_basics() {
        let n = 10;
        let th = thetas(n);
        assert!((trapezoid_cheb(&vec![c64::new(1.0, 0.0); n]).re - PI).abs() < 1e-15);
        let f = cx(&th.iter().map(|t| (2.0 * t).cos()).collect::<Vec<_>>());
        assert!(trapezoid_cheb(&f).norm() < 1e-15);
    }

    #[test]
    fn transforms_roundtrip_and_routes_agree() {
        for n in [7, 64, 300] {
            let f: Vec<c64> = (0..n).map(|j| c64::new((j as f64 * 0.37).sin(), (j as f64).sqrt() * 0.1)).collect();
            for route in [Route::Direct, Route::Fft] {
                let back = cos_evaluate(&cos_coefficients(&f, route), route);
                assert!(max_err(&back, &f) < 1e-13, "n={n} {route:?}");
            }
            let a = cos_coefficients(&f, Route::Direct);
            let b = cos_coefficients(&f, Route::Fft);
            assert!(max_err(&a, &b) < 1e-12);
            let s1 = sin_coefficients(&f, Route::Direct);
            let s2 = sin_coefficients(&f, Route::Fft);
            assert!(max_err(&s1, &s2) < 1e-12);
        }
    }

    #[test]
    fn d0_on_polynomials() {
        let n = 16;
        let th = thetas(n);
        let t: Vec<f64> = th.iter().map(|x| x.cos()).collect();
        let c = d0_derivative(&vec![c64::new(3.0, -1.0); n]);
        // coefficient round-off is amplified by ~N^2 near the endpoints
        assert!(c.iter().all(|v| v.norm() < 1e-12));
        let d = d0_derivative(&cx(&t));
        assert!(d.iter().all(|v| (v - 1.0).norm() < 1e-13));
        // T5' = 5 U4, U4(cos th) = sin(5 th)/sin(th)
        let t5: Vec<f64> = th.iter().map(|x| (5.0 * x).cos()).collect();
        let d = d0_derivative(&cx(&t5));
        for (i, x) in th.iter().enumerate() {
            assert!((d[i].re - 5.0 * (5.0 * x).sin() / x.sin()).abs() < 1e-11);
        }
    }

    #[test]
    fn t0_on_trig_inputs() {
        let n = 16;
        let th = thetas(n);
        let r = t0_derivative(&vec![c64::new(1.0, 0.0); n]);
        for (v, x) in r.iter().zip(&th) {
            assert!((v.re - x.cos()).abs() < 1e-13);
        }
        let r = t0_derivative(&cx(&th.iter().map(|x| x.cos()).collect::<Vec<_>>()));
        for (v, x) in r.iter().zip(&th) {
            assert!((v.re - (2.0 * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn d0_t0_are_linear_and_exact_to_degree_n_minus_2() {
        let n = 20;
        let th = thetas(n);
        let f: Vec<c64> = th.iter().map(|x| c64::new(((n - 2) as f64 * x).cos(), 0.0)).collect();
        let k = (n - 2) as f64;
        let d = d0_derivative(&f);
        for (i, x) in th.iter().enumerate() {
            assert!((d[i].re - k * (k * x).sin() / x.sin()).abs() < 1e-11 * k * k);
        }
        let z = c64::new(0.3, -2.0);
        let fz: Vec<c64> = f.iter().map(|v| v * z).collect();
        assert!(max_err(&d0_derivative(&fz), &d0_derivative(&f).iter().map(|v| v * z).collect::<Vec<_>>()) < 1e-11);
        assert!(max_err(&t0_derivative(&fz), &t0_derivative(&f).iter().map(|v| v * z).collect::<Vec<_>>()) < 1e-11);
    }

    #[test]
    fn matrices_match_transforms() {
        for n in [9, 40, 260] {
            let f: Vec<c64> = thetas(n).iter().map(|x| c64::new((x.cos() * 1.7).sin(), (x.cos()).exp())).collect();
            let mv = |m: &[f64]| -> Vec<c64> {
                (0..n).map(|i| (0..n).map(|j| f[j] * m[i * n + j]).sum()).collect()
            };
            let scale = (n * n) as f64;
            assert!(max_err(&mv(&d0_matrix(n)), &d0_derivative_with(&f, Route::Direct)) < 1e-13 * scale);
            assert!(max_err(&mv(&t0_matrix(n)), &t0_derivative_with(&f, Route::Direct)) < 1e-13 * scale);
            // the derivative recurrence amplifies transform round-off by ~N^3
            let tol = 1e-15 * (n * n * n) as f64;
            assert!(max_err(&d0_derivative_with(&f, Route::Fft), &d0_derivative_with(&f, Route::Direct)) < tol);
            assert!(max_err(&t0_derivative_with(&f, Route::Fft), &t0_derivative_with(&f, Route::Direct)) < tol);
            let exact: Vec<c64> =
                thetas(n).iter().map(|x| c64::new(1.7 * (x.cos() * 1.7).cos(), x.cos().exp())).collect();
            for route in [Route::Direct, Route::Fft] {
                if n >= 40 {
                    assert!(max_err(&d0_derivative_with(&f, route), &exact) < tol);
                }
            }
        }
    }

    #[test]
    fn kress_weights() {
        let n = 16;
        let w = KressWeights::new(n);
        for i in 0..2 * n {
            let s: f64 = (0..2 * n).map(|j| w.r(i, j)).sum();
            assert!(s.abs() < 1e-12);
        }
        // ln(4 sin^2(s/2)) = -2 sum cos(m s)/m, so cos maps to -2 pi cos
        let s: f64 = (0..2 * n).map(|j| w.r(0, j) * (PI * j as f64 / n as f64).cos()).sum();
        assert!((s + 2.0 * PI).abs() < 1e-12);
        for j in 0..2 * n {
            assert!((w.r(3, j) - w.r_at(3.0 * PI / n as f64, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_diff_exact_on_trig() {
        let n = 8;
        let d = periodic_diff_matrix(n);
        let s: Vec<f64> = (0..2 * n).map(|j| PI * j as f64 / n as f64).collect();
        let f: Vec<f64> = s.iter().map(|x| (3.0 * x).sin() + (x).cos()).collect();
        for i in 0..2 * n {
            let v: f64 = (0..2 * n).map(|j| d[i * 2 * n + j] * f[j]).sum();
            assert!((v - (3.0 * (3.0 * s[i]).cos() - s[i].sin())).abs() < 1e-12);
        }
    }
}
