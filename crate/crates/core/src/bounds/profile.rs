use serde::Serialize;

use crate::error::{Error, Result};

/// The exponential moment assumption
/// `log E exp(gamma^T xi) <= nu0^2 ||gamma||^2 / 2` for `||gamma|| <= g`.
///
/// `g = +inf` is the sub-Gaussian (in particular Gaussian) case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentProfile {
    nu0: f64,
    g: f64,
}

impl MomentProfile {
    pub fn new(nu0: f64, g: f64) -> Result<Self> {
        if !nu0.is_finite() || nu0 < 1.0 {
            return Err(Error::BadArgs(format!("nu0 must be finite and >= 1, got {nu0}")));
        }
        if g.is_nan() || g <= 0.0 {
            return Err(Error::BadArgs(format!("g must be positive, got {g}")));
        }
        Ok(Self { nu0, g })
    }

    /// `nu0 = 1` with radius `g`.
    pub fn standard(g: f64) -> Result<Self> {
        Self::new(1.0, g)
    }

    pub fn gaussian() -> Self {
        Self { nu0: 1.0, g: f64::INFINITY }
    }

    pub fn nu0(&self) -> f64 {
        self.nu0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn is_gaussian_limit(&self) -> bool {
        self.g.is_infinite()
    }

    /// The equivalent profile of `xi / nu0`: `nu0 = 1`, radius `nu0 g`.
    pub fn normalized(&self) -> Self {
        Self { nu0: 1.0, g: self.nu0 * self.g }
    }
}

/// Moves a norm threshold `y` on `xi` into the coordinates of `xi / nu0`.
pub fn nu0_reduce(profile: &MomentProfile, threshold_y: f64) -> (MomentProfile, f64) {
    (profile.normalized(), threshold_y / profile.nu0)
}
