//! Unrestarted GMRES for dense complex systems.

use std::time::Instant;

use num_complex::Complex64 as c64;

use crate::error::{Error, Result};

/// Outcome of a GMRES run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residual `|b - A x_k| / |b|` for `k = 0..=iterations`.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub wall_seconds: f64,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().unwrap_or(&f64::NAN)
    }
}

fn norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Relative residual `|b - A x| / |b|`.
pub fn relative_residual(apply: impl Fn(&[c64]) -> Vec<c64>, x: &[c64], b: &[c64]) -> f64 {
    let ax = apply(x);
    let r: Vec<c64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
    norm(&r) / norm(b)
}

/// Solves `A x = b` from `x0 = 0`, stopping once the relative residual is at
/// most `tol` or after `maxit` iterations (then `converged = false`).
///
/// Arnoldi uses modified Gram-Schmidt with one reorthogonalization pass;
/// the least-squares problem is updated with Givens rotations. An exactly
/// invariant Krylov space ends the iteration with the exact solution; a
/// breakdown that does not solve the system is an error.
pub fn gmres(apply: impl Fn(&[c64]) -> Vec<c64>, b: &[c64], tol: f64, maxit: usize) -> Result<(Vec<c64>, SolveReport)> {
    let start = Instant::now();
    let n = b.len();
    let beta = norm(b);
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain("gmres requires a finite nonzero right-hand side".into()));
    }
    let mut basis: Vec<Vec<c64>> = vec![b.iter().map(|v| v / beta).collect()];
    // columns of the Hessenberg matrix, already rotated
    let mut h: Vec<Vec<c64>> = Vec::new();
    let mut rot: Vec<(f64, c64)> = Vec::new();
    let mut g = vec![c64::new(beta, 0.0)];
    let mut history = vec![1.0];
    let mut k = 0;
    let mut converged = 1.0 <= tol;

    while !converged && k < maxit.min(n) {
        let mut w = apply(&basis[k]);
        if w.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: w.len() });
        }
        let wnorm0 = norm(&w);
        let mut col = vec![c64::new(0.0, 0.0); k + 2];
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = dot(v, &w);
                col[i] += c;
                w.iter_mut().zip(v).for_each(|(a, b)| *a -= c * b);
            }
        }
        let hn = norm(&w);
        col[k + 1] = c64::new(hn, 0.0);
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (a, b) = (col[i], col[i + 1]);
            col[i] = a * c + s * b;
            col[i + 1] = -s.conj() * a + b * c;
        }
        let (a, b) = (col[k], col[k + 1]);
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if r == 0.0 {
            return Err(Error::Breakdown { iteration: k + 1 });
        }
        let (c, s) = if a.norm() == 0.0 {
            (0.0, c64::new(1.0, 0.0))
        } else {
            let ph = a / a.norm();
            (a.norm() / r, ph * b.conj() / r)
        };
        col[k] = c * a + s * b;
        col[k + 1] = c64::new(0.0, 0.0);
        rot.push((c, s));
        let gk = g[k];
        g[k] = c * gk;
        g.push(-s.conj() * gk);
        h.push(col);
        k += 1;
        let res = g[k].norm() / beta;
        history.push(res);
        converged = res <= tol;
        let lucky = hn <= 1e-14 * wnorm0.max(f64::MIN_POSITIVE);
        if lucky {
            if !converged && res > 1e-12 {
                return Err(Error::Breakdown { iteration: k });
            }
            converged = true;
            break;
        }
        if !converged {
            basis.push(w.iter().map(|v| v / hn).collect());
        }
    }

    // back substitution
    let mut y = vec![c64::new(0.0, 0.0); k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    let mut x = vec![c64::new(0.0, 0.0); n];
    for (yj, v) in y.iter().zip(&basis) {
        x.iter_mut().zip(v).for_each(|(a, b)| *a += yj * b);
    }
    let report = SolveReport {
        iterations: k,
        residual_history: history,
        converged,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    Ok((x, report))
}
