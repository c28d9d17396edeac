//! Bessel and Hankel functions of the first kind, orders 0 through 2 (and 3
//! for third-derivative kernels), for real positive arguments.
//!
//! Three regimes are used:
//!
//! * `x <= 4`: ascending power series. The pole terms of `Y1`/`Y2` are kept
//!   apart so that kernels can cancel them analytically.
//! * `4 < x < 20`: Miller backward recurrence for `J_n`, normalized with
//!   `J0 + 2 sum J_{2k} = 1`, and Neumann series for `Y0`, `Y1`.
//! * `x >= 20`: Hankel asymptotic expansions, truncated at the smallest term.
//!
//! All three agree with extended-precision references to about `1e-15`
//! absolute.

use num_complex::Complex64 as c64;
use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const SERIES_LIMIT: f64 = 4.0;
const ASYMPTOTIC_LIMIT: f64 = 20.0;

/// Values of `J0, J1, J2, Y0` together with the pole-free parts of `Y1` and
/// `Y2` at one argument.
///
/// `y1_reg = Y1 + 2/(pi x)` and `y2_reg = Y2 + 4/(pi x^2)`. Both stay bounded
/// by `O(|ln x|)` as `x -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselSet {
    pub x: f64,
    pub j0: f64,
    pub j1: f64,
    pub j2: f64,
    pub y0: f64,
    pub y1_reg: f64,
    pub y2_reg: f64,
}

impl BesselSet {
    /// Evaluates the whole set at `x > 0`.
    pub fn new(x: f64) -> Self {
        debug_assert!(x > 0.0 && x.is_finite());
        if x <= SERIES_LIMIT {
            series(x)
        } else if x < ASYMPTOTIC_LIMIT {
            miller(x)
        } else {
            asymptotic(x)
        }
    }

    pub fn y1(&self) -> f64 {
        self.y1_reg - FRAC_2_PI / self.x
    }

    pub fn y2(&self) -> f64 {
        self.y2_reg - 2.0 * FRAC_2_PI / (self.x * self.x)
    }

    /// `Y3` from the upward recurrence (stable for `Y`).
    pub fn y3(&self) -> f64 {
        4.0 / self.x * self.y2() - self.y1()
    }

    /// `J3` from the three-term recurrence; adequate away from `x -> 0`,
    /// which is the only place it is used (off-surface field evaluation).
    pub fn j3(&self) -> f64 {
        if self.x < 1.0 {
            series_j(3, self.x)
        } else {
            4.0 / self.x * self.j2 - self.j1
        }
    }

    pub fn h0(&self) -> c64 {
        c64::new(self.j0, self.y0)
    }

    pub fn h1(&self) -> c64 {
        c64::new(self.j1, self.y1())
    }

    pub fn h2(&self) -> c64 {
        c64::new(self.j2, self.y2())
    }

    pub fn h3(&self) -> c64 {
        c64::new(self.j3(), self.y3())
    }
}

fn series_j(n: u32, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powi(n as i32) / factorial(n);
    let mut sum = term;
    for k in 1..60 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn series(x: f64) -> BesselSet {
    let q = -0.25 * x * x;
    let lg = (0.5 * x).ln() + EULER_GAMMA;

    // J0 and the harmonic-number series for Y0.
    let mut t = 1.0;
    let mut j0 = 1.0;
    let mut harmonic = 0.0;
    let mut y0_tail = 0.0;
    // J1 and the digamma series for Y1: psi(k+1) + psi(k+2) = -2 gamma + H_k + H_{k+1}.
    let mut t1 = 0.5 * x;
    let mut j1 = t1;
    let mut y1_tail = t1 * (1.0 - 2.0 * EULER_GAMMA);
    for k in 1..40 {
        let kf = k as f64;
        t *= q / (kf * kf);
        harmonic += 1.0 / kf;
        j0 += t;
        y0_tail += t * harmonic;
        t1 *= q / (kf * (kf + 1.0));
        j1 += t1;
        y1_tail += t1 * (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA);
        if t.abs() < 1e-18 && t1.abs() < 1e-18 {
            break;
        }
    }
    let j2 = series_j(2, x);
    let y0 = FRAC_2_PI * (lg * j0 - y0_tail);
    // Y1 = -2/(pi x) + (2/pi) ln(x/2) J1 - (1/pi) sum (psi(k+1)+psi(k+2)) (x/2)^{2k+1}/(k!(k+1)!) (-1)^k
    let y1_reg = FRAC_2_PI * (0.5 * x).ln() * j1 - y1_tail / PI;
    let y2_reg = 2.0 / x * y1_reg - y0;
    BesselSet {
        x,
        j0,
        j1,
        j2,
        y0,
        y1_reg,
        y2_reg,
    }
}

fn miller(x: f64) -> BesselSet {
    let mut m = (x + 25.0 + 4.0 * x.cbrt()) as usize;
    m += m % 2;
    let mut jp = 0.0; // J_{k+1}
    let mut jk = 1e-30; // J_k
    let mut norm = 0.0;
    let mut s0 = 0.0; // sum_{k>=1} (-1)^k J_{2k} / k
    let mut s1 = 0.0; // sum_{k>=1} (-1)^k (J_{2k-1} - J_{2k+1}) / k
    let (mut j0, mut j1, mut j2) = (0.0, 0.0, 0.0);
    let mut i = m;
    loop {
        // jk holds J_i (unnormalized).
        if i % 2 == 0 {
            if i == 0 {
                norm += jk;
            } else {
                norm += 2.0 * jk;
                let k = (i / 2) as f64;
                let sign = if (i / 2) % 2 == 0 { 1.0 } else { -1.0 };
                s0 += sign * jk / k;
            }
        } else {
            let up = (i + 1) / 2;
            let sign_up = if up % 2 == 0 { 1.0 } else { -1.0 };
            s1 += sign_up * jk / up as f64;
            if i >= 3 {
                let down = (i - 1) / 2;
                let sign_down = if down % 2 == 0 { 1.0 } else { -1.0 };
                s1 -= sign_down * jk / down as f64;
            }
        }
        match i {
            0 => j0 = jk,
            1 => j1 = jk,
            2 => j2 = jk,
            _ => {}
        }
        if i == 0 {
            break;
        }
        let jm = 2.0 * i as f64 / x * jk - jp;
        jp = jk;
        jk = jm;
        i -= 1;
    }
    let scale = 1.0 / norm;
    let (j0, j1, j2) = (j0 * scale, j1 * scale, j2 * scale);
    let (s0, s1) = (s0 * scale, s1 * scale);
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let y0 = FRAC_2_PI * lg * j0 - 2.0 * FRAC_2_PI * s0;
    let y1 = FRAC_2_PI * (lg * j1 - j0 / x) + FRAC_2_PI * s1;
    let y1_reg = y1 + FRAC_2_PI / x;
    let y2 = 2.0 / x * y1 - y0;
    let y2_reg = y2 + 2.0 * FRAC_2_PI / (x * x);
    BesselSet {
        x,
        j0,
        j1,
        j2,
        y0,
        y1_reg,
        y2_reg,
    }
}

/// Hankel's expansion `P(nu, x), Q(nu, x)`.
fn hankel_pq(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) / (k as f64 * 8.0 * x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // term_k contributes to Q for odd k, to P for even k, with alternating signs.
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if mag < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn asymptotic(x: f64) -> BesselSet {
    let amp = (FRAC_2_PI / x).sqrt();
    let jy = |nu: f64| {
        let (p, q) = hankel_pq(nu, x);
        let chi = x - (0.5 * nu + 0.25) * PI;
        let (s, c) = chi.sin_cos();
        (amp * (p * c - q * s), amp * (p * s + q * c))
    };
    let (j0, y0) = jy(0.0);
    let (j1, y1) = jy(1.0);
    let (j2, y2) = jy(2.0);
    BesselSet {
        x,
        j0,
        j1,
        j2,
        y0,
        y1_reg: y1 + FRAC_2_PI / x,
        y2_reg: y2 + 2.0 * FRAC_2_PI / (x * x),
    }
}

/// Bessel function of the first kind, orders 0..=3, `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("bessel_j argument must be finite and >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let b = BesselSet::new(x);
    match n {
        0 => Ok(b.j0),
        1 => Ok(b.j1),
        2 => Ok(b.j2),
        3 => Ok(b.j3()),
        _ => Err(Error::Domain(format!("bessel_j order {n} not supported"))),
    }
}

/// Bessel function of the second kind, orders 0..=3, `x > 0`.
pub fn bessel_y(n: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("bessel_y argument must be > 0, got {x}")));
    }
    let b = BesselSet::new(x);
    match n {
        0 => Ok(b.y0),
        1 => Ok(b.y1()),
        2 => Ok(b.y2()),
        3 => Ok(b.y3()),
        _ => Err(Error::Domain(format!("bessel_y order {n} not supported"))),
    }
}

/// Hankel function `H_n^(1)(x) = J_n(x) + i Y_n(x)`, orders 0..=3, `x > 0`.
pub fn hankel1(n: u32, x: f64) -> Result<c64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("hankel1 argument must be > 0, got {x}")));
    }
    let b = BesselSet::new(x);
    match n {
        0 => Ok(b.h0()),
        1 => Ok(b.h1()),
        2 => Ok(b.h2()),
        3 => Ok(b.h3()),
        _ => Err(Error::Domain(format!("hankel1 order {n} not supported"))),
    }
}
