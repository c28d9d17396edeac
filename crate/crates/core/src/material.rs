//! Isotropic elastic medium at a fixed angular frequency.

use crate::error::{Error, Result};

/// Lamé constants, density and frequency, with derived constants cached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
    pub omega: f64,
    /// Shear wavenumber `omega * sqrt(rho / mu)`.
    pub ks: f64,
    /// Pressure wavenumber `omega * sqrt(rho / (lambda + 2 mu))`.
    pub kp: f64,
    /// Modified shear modulus `mu (lambda + mu) / (lambda + 3 mu)`.
    pub mu_tilde: f64,
    /// `lambda + mu - mu_tilde`.
    pub lambda_tilde: f64,
    /// Spectral shift `mu / (2 (lambda + 2 mu))`.
    pub c_lm: f64,
}

impl Material {
    pub fn new(lambda: f64, mu: f64, rho: f64, omega: f64) -> Result<Self> {
        let checks = [
            (mu > 0.0, "mu > 0"),
            (lambda + mu > 0.0, "lambda + mu > 0"),
            (rho > 0.0, "rho > 0"),
            (omega > 0.0, "omega > 0"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(Error::InvalidMaterial(format!("requires {what}")));
            }
        }
        if ![lambda, mu, rho, omega].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidMaterial("parameters must be finite".into()));
        }
        let mu_tilde = mu * (lambda + mu) / (lambda + 3.0 * mu);
        Ok(Self {
            lambda,
            mu,
            rho,
            omega,
            ks: omega * (rho / mu).sqrt(),
            kp: omega * (rho / (lambda + 2.0 * mu)).sqrt(),
            mu_tilde,
            lambda_tilde: lambda + mu - mu_tilde,
            c_lm: mu / (2.0 * (lambda + 2.0 * mu)),
        })
    }

    /// `rho * omega^2`.
    pub fn rho_omega2(&self) -> f64 {
        self.rho * self.omega * self.omega
    }

    /// Copy with the modified constants collapsed onto the physical ones, so
    /// that the modified-traction path reduces to the physical traction.
    pub fn unmodified(&self) -> Self {
        Self { mu_tilde: self.mu, lambda_tilde: self.lambda, ..*self }
    }
}

/// Convenience constructor mirroring [`Material::new`].
pub fn make_material(lambda: f64, mu: f64, rho: f64, omega: f64) -> Result<Material> {
    Material::new(lambda, mu, rho, omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumbers() {
        let m = make_material(2.0, 1.0, 1.0, 10.0).unwrap();
        assert!((m.ks - 10.0).abs() < 1e-14);
        assert!((m.kp - 5.0).abs() < 1e-14);
        assert!(m.kp < m.ks);
        assert!((m.kp / m.ks - (m.mu / (m.lambda + 2.0 * m.mu)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn modified_constants() {
        let m = make_material(2.0, 1.0, 1.0, 50.0).unwrap();
        assert!((m.mu_tilde - 0.6).abs() < 1e-15);
        assert!((m.lambda_tilde - 2.4).abs() < 1e-15);
        assert!((m.c_lm - 0.125).abs() < 1e-15);
        assert!((-0.25 + m.c_lm * m.c_lm + 0.234375).abs() < 1e-15);
        assert_eq!(m.lambda_tilde + m.mu_tilde, m.lambda + m.mu);
    }

    #[test]
    fn nearly_incompressible_limit_is_valid() {
        let m = make_material(-0.99, 1.0, 1.0, 50.0).unwrap();
        assert!((m.c_lm - 1.0 / (2.0 * 1.01)).abs() < 1e-15);
        assert!(m.c_lm > 0.0 && m.c_lm < 0.5);
    }

    #[test]
    fn rejects_bad_parameters() {
        for (l, mu, rho, w, tag) in [
            (2.0, -1.0, 1.0, 1.0, "mu > 0"),
            (-1.0, 1.0, 1.0, 1.0, "lambda + mu > 0"),
            (2.0, 1.0, 0.0, 1.0, "rho > 0"),
            (2.0, 1.0, 1.0, -3.0, "omega > 0"),
        ] {
            let e = make_material(l, mu, rho, w).unwrap_err().to_string();
            assert!(e.contains(tag), "{e}");
        }
    }

    #[test]
    fn unmodified_collapses_tildes() {
        let m = make_material(2.0, 1.0, 1.0, 5.0).unwrap().unmodified();
        assert_eq!(m.mu_tilde, m.mu);
        assert_eq!(m.lambda_tilde, m.lambda);
    }
}
