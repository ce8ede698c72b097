use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian (RBF) or polynomial kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Kernel {
    /// `exp(-|x - x'|^2 / (2 sigma^2))`
    Rbf { sigma: f64 },
    /// `(scale <x, x'> + offset)^degree`
    ///
    /// A non-integer degree is only defined for a non-negative base; evaluating
    /// it on a negative base is an error.
    Polynomial { scale: f64, offset: f64, degree: f64 },
}

impl Kernel {
    pub fn rbf(sigma: f64) -> Self {
        Kernel::Rbf { sigma }
    }

    pub fn polynomial(scale: f64, offset: f64, degree: f64) -> Self {
        Kernel::Polynomial { scale, offset, degree }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Rbf { sigma } if !(sigma > 0.0 && sigma.is_finite()) => Err(
                Error::InvalidParameter(format!("RBF sigma must be positive, got {sigma}")),
            ),
            Kernel::Polynomial { degree, .. } if !(degree > 0.0 && degree.is_finite()) => Err(
                Error::InvalidParameter(format!("polynomial degree must be positive, got {degree}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        match *self {
            Kernel::Rbf { sigma } => {
                let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
                Ok((-d2 / (2.0 * sigma * sigma)).exp())
            }
            Kernel::Polynomial { scale, offset, degree } => {
                let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                let base = scale * dot + offset;
                if degree.fract() == 0.0 && degree.abs() <= i32::MAX as f64 {
                    Ok(base.powi(degree as i32))
                } else if base >= 0.0 {
                    Ok(base.powf(degree))
                } else {
                    Err(Error::NegativePolynomialBase { base, degree })
                }
            }
        }
    }
}

impl std::fmt::Display for Kernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Kernel::Rbf { sigma } => write!(f, "rbf(sigma={sigma})"),
            Kernel::Polynomial { scale, offset, degree } => {
                write!(f, "poly(a={scale}, b={offset}, d={degree})")
            }
        }
    }
}
