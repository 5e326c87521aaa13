use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Linear,
    /// `(u·v + coef0)^degree`
    Polynomial {
        degree: u32,
        coef0: f64,
    },
    /// `exp(-|u - v|² / (2σ²))`
    Rbf {
        sigma: f64,
    },
}

pub const KERNEL_KINDS: &[&str] = &["linear", "quadratic", "polynomial", "rbf"];

impl KernelSpec {
    pub fn quadratic() -> Self {
        KernelSpec::Polynomial { degree: 2, coef0: 1.0 }
    }

    pub fn cubic() -> Self {
        KernelSpec::Polynomial { degree: 3, coef0: 1.0 }
    }

    pub fn rbf(sigma: f64) -> Self {
        KernelSpec::Rbf { sigma }
    }

    /// Linear, quadratic, cubic polynomial and RBF with σ = 2.
    pub fn standard_set() -> Vec<KernelSpec> {
        vec![
            KernelSpec::Linear,
            KernelSpec::quadratic(),
            KernelSpec::cubic(),
            KernelSpec::rbf(2.0),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Polynomial { degree, coef0 } => {
                if degree < 2 {
                    return Err(Error::InvalidConfig(format!(
                        "polynomial kernel degree must be at least 2, got {degree}"
                    )));
                }
                if !coef0.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "polynomial coef0 must be finite, got {coef0}"
                    )));
                }
                Ok(())
            }
            KernelSpec::Rbf { sigma } => {
                if sigma > 0.0 && sigma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidConfig(format!("rbf sigma must be positive, got {sigma}")))
                }
            }
        }
    }

    pub fn eval(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                actual: v.len(),
            });
        }
        Ok(self.eval_unchecked(u, v))
    }

    pub(crate) fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(u, v),
            KernelSpec::Polynomial { degree, coef0 } => (dot(u, v) + coef0).powi(degree as i32),
            KernelSpec::Rbf { sigma } => {
                let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-d2 / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Polynomial { degree: 2, coef0: 1.0 } => write!(f, "quadratic"),
            KernelSpec::Polynomial { degree, coef0: 1.0 } => write!(f, "polynomial(degree={degree})"),
            KernelSpec::Polynomial { degree, coef0 } => write!(f, "polynomial(degree={degree},coef0={coef0})"),
            KernelSpec::Rbf { sigma } => write!(f, "rbf(sigma={sigma})"),
        }
    }
}

/// Parses `linear`, `quadratic`, `polynomial[:degree]`, `cubic` and
/// `rbf[:sigma]`. Bare `polynomial` is degree 3, bare `rbf` is σ = 2.
impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let num = |what: &str| -> Result<Option<f64>> {
            arg.map(|a| {
                a.parse::<f64>()
                    .map_err(|_| Error::InvalidConfig(format!("invalid {what} `{a}` in kernel `{s}`")))
            })
            .transpose()
        };
        let spec = match name.to_ascii_lowercase().as_str() {
            "linear" if arg.is_none() => KernelSpec::Linear,
            "quadratic" if arg.is_none() => KernelSpec::quadratic(),
            "cubic" if arg.is_none() => KernelSpec::cubic(),
            "polynomial" | "poly" => {
                let degree = num("degree")?.unwrap_or(3.0);
                if degree.fract() != 0.0 || degree < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "polynomial degree must be an integer, got {degree}"
                    )));
                }
                KernelSpec::Polynomial {
                    degree: degree as u32,
                    coef0: 1.0,
                }
            }
            "rbf" => KernelSpec::rbf(num("sigma")?.unwrap_or(2.0)),
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown kernel `{s}`; valid kinds: {}",
                    KERNEL_KINDS.join(", ")
                )))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}
