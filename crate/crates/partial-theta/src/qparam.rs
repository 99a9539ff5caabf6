//! The parameter q with its domain classification.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classification of the parameter q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QKind {
    PositiveReal,
    NegativeReal,
    Complex,
}

/// The parameter q of theta(q, x), with 0 <= |q| < 1.
///
/// The theorem-level operations (zero finding, spectrum, factorization)
/// require q != 0; the plain evaluators additionally accept q = 0, for
/// which the series degenerates to the constant 1. q = 0 is classified
/// as `PositiveReal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QParam {
    value: Complex64,
    kind: QKind,
}

impl QParam {
    /// Classify and validate a parameter value. Fails for |q| >= 1.
    pub fn new(value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::Domain("q must be finite".into()));
        }
        if value.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "q must satisfy |q| < 1, got |q| = {}",
                value.norm()
            )));
        }
        let kind = if value.im == 0.0 {
            if value.re >= 0.0 {
                QKind::PositiveReal
            } else {
                QKind::NegativeReal
            }
        } else {
            QKind::Complex
        };
        Ok(QParam { value, kind })
    }

    /// Real parameter shorthand.
    pub fn real(q: f64) -> Result<Self> {
        Self::new(Complex64::new(q, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn kind(&self) -> QKind {
        self.kind
    }

    /// |q|.
    pub fn modulus(&self) -> f64 {
        self.value.norm()
    }

    pub fn is_real(&self) -> bool {
        self.kind != QKind::Complex
    }

    /// Re(q) for a real-kind parameter.
    pub fn real_value(&self) -> Option<f64> {
        self.is_real().then_some(self.value.re)
    }

    /// Require q != 0, as the theorems do.
    pub fn require_nonzero(&self) -> Result<()> {
        if self.value == Complex64::new(0.0, 0.0) {
            Err(Error::Domain(
                "this operation requires q != 0".into(),
            ))
        } else {
            Ok(())
        }
    }

    /// Require q real positive in (0, 1).
    pub fn require_positive_real(&self) -> Result<f64> {
        match self.kind {
            QKind::PositiveReal if self.value.re > 0.0 => Ok(self.value.re),
            _ => Err(Error::Domain(format!(
                "this operation requires q in (0, 1), got {}",
                self.value
            ))),
        }
    }

    /// Require q real negative in (-1, 0).
    pub fn require_negative_real(&self) -> Result<f64> {
        match self.kind {
            QKind::NegativeReal => Ok(self.value.re),
            _ => Err(Error::Domain(format!(
                "this operation requires q in (-1, 0), got {}",
                self.value
            ))),
        }
    }
}
