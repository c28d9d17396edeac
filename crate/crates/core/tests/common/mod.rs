//! Independent numerical tools for the integration tests: adaptive
//! Gauss-Kronrod quadrature and high-order finite differences.
#![allow(dead_code, clippy::excessive_precision)]

use num_complex::Complex64 as c64;

// Gauss-Kronrod 7/15 abscissae (non-negative half) and weights
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<const D: usize>(f: &dyn Fn(f64) -> [c64; D], a: f64, b: f64) -> ([c64; D], f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let zero = c64::new(0.0, 0.0);
    let (mut k, mut g) = ([zero; D], [zero; D]);
    let fc = f(c);
    for d in 0..D {
        k[d] = fc[d] * WGK[7];
        g[d] = fc[d] * WG[3];
    }
    for i in 0..7 {
        let (f1, f2) = (f(c - h * XGK[i]), f(c + h * XGK[i]));
        for d in 0..D {
            let s = f1[d] + f2[d];
            k[d] += s * WGK[i];
            if i % 2 == 1 {
                g[d] += s * WG[i / 2];
            }
        }
    }
    let mut err: f64 = 0.0;
    for d in 0..D {
        k[d] *= h;
        g[d] *= h;
        err = err.max((k[d] - g[d]).norm());
    }
    (k, err)
}

fn adapt<const D: usize>(f: &dyn Fn(f64) -> [c64; D], a: f64, b: f64, tol: f64, depth: u32, acc: &mut [c64; D]) {
    let (v, err) = gk15(f, a, b);
    if err <= tol || depth >= 60 {
        for d in 0..D {
            acc[d] += v[d];
        }
        return;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, tol / 2f64.sqrt(), depth + 1, acc);
    adapt(f, m, b, tol / 2f64.sqrt(), depth + 1, acc);
}

/// `int_a^b f` to absolute accuracy ~`tol`, with integrable (e.g.
/// logarithmic) singularities allowed at the points of `breaks` inside
/// `(a, b)`. Each piece touching a break is graded towards it by
/// `x = p + (q - p) u^6`, which makes the integrand smooth enough for
/// Gauss-Kronrod.
pub fn integrate<const D: usize>(f: &dyn Fn(f64) -> [c64; D], a: f64, b: f64, breaks: &[f64], tol: f64) -> [c64; D] {
    let inner: Vec<f64> = breaks.iter().copied().filter(|&p| p > a && p < b).collect();
    let mut pts = vec![a, b];
    for &p in &inner {
        pts.push(p);
    }
    pts.sort_by(f64::total_cmp);
    let mut acc = [c64::new(0.0, 0.0); D];
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (sp, sq) = (inner.contains(&p), inner.contains(&q));
        let mut pieces = vec![];
        match (sp, sq) {
            (false, false) => adapt(f, p, q, tol, 0, &mut acc),
            (true, false) => pieces.push((p, q)),
            (false, true) => pieces.push((q, p)),
            (true, true) => {
                let m = 0.5 * (p + q);
                pieces.push((p, m));
                pieces.push((q, m));
            }
        }
        // graded from the singular end `s` to the regular end `e`
        for (s, e) in pieces {
            let g = |u: f64| {
                let u5 = u.powi(5);
                let v = f(s + (e - s) * u5 * u);
                v.map(|z| z * (6.0 * (e - s).abs() * u5))
            };
            adapt(&g, 0.0, 1.0, tol, 0, &mut acc);
        }
    }
    acc
}

/// Eighth-order central difference of `g` at `t` with step `h`.
pub fn derivative<const D: usize>(g: &dyn Fn(f64) -> [c64; D], t: f64, h: f64) -> [c64; D] {
    const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let mut out = [c64::new(0.0, 0.0); D];
    for (k, c) in C.iter().enumerate() {
        let s = (k + 1) as f64 * h;
        let (p, q) = (g(t + s), g(t - s));
        for d in 0..D {
            out[d] += (p[d] - q[d]) * *c;
        }
    }
    out.map(|v| v / h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_singularity() {
        // int_0^1 ln x dx = -1
        let v = integrate(&|x: f64| [c64::new(x.ln(), 0.0)], 0.0, 1.0, &[], 1e-14);
        assert!((v[0].re + 1.0).abs() < 1e-12);
    }
}
