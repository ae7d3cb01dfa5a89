//! The two-component logarithmic-series group: pairs A(t) + B(t)*log t with
//! A(0) = B(0) = 0, and the entropy operator
//! L(f) = (1 - t*log t * d/dt) log f acting on unit-constant-term series.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{Rat, Ring};
use crate::series::TruncatedSeries;
use crate::witt::WittElement;

/// A(t) + B(t) * log t, both parts vanishing at t = 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogSeries {
    regular: TruncatedSeries,
    logpart: TruncatedSeries,
}

impl LogSeries {
    pub fn new(regular: TruncatedSeries, logpart: TruncatedSeries) -> Result<LogSeries> {
        if regular.ring() != logpart.ring() {
            return Err(Error::RingMismatch(
                regular.ring().name(),
                logpart.ring().name(),
            ));
        }
        if !regular.coeff(0).is_zero() {
            return Err(Error::NonZeroConstant(regular.coeff(0).to_string()));
        }
        if !logpart.coeff(0).is_zero() {
            return Err(Error::NonZeroConstant(logpart.coeff(0).to_string()));
        }
        let trunc = regular.trunc().min(logpart.trunc());
        Ok(LogSeries {
            regular: regular.truncate(trunc),
            logpart: logpart.truncate(trunc),
        })
    }

    pub fn zero(ring: Ring, trunc: usize) -> LogSeries {
        LogSeries {
            regular: TruncatedSeries::zero(ring, trunc),
            logpart: TruncatedSeries::zero(ring, trunc),
        }
    }

    pub fn regular(&self) -> &TruncatedSeries {
        &self.regular
    }

    pub fn logpart(&self) -> &TruncatedSeries {
        &self.logpart
    }

    pub fn ring(&self) -> Ring {
        self.regular.ring()
    }

    pub fn trunc(&self) -> usize {
        self.regular.trunc()
    }

    pub fn add(&self, other: &LogSeries) -> Result<LogSeries> {
        LogSeries::new(
            self.regular.add(&other.regular)?,
            self.logpart.add(&other.logpart)?,
        )
    }

    pub fn sub(&self, other: &LogSeries) -> Result<LogSeries> {
        LogSeries::new(
            self.regular.sub(&other.regular)?,
            self.logpart.sub(&other.logpart)?,
        )
    }

    pub fn neg(&self) -> LogSeries {
        LogSeries {
            regular: self.regular.neg(),
            logpart: self.logpart.neg(),
        }
    }

    pub fn scalar_mul(&self, lambda: &Rat) -> LogSeries {
        LogSeries {
            regular: self.regular.mul_rat(lambda),
            logpart: self.logpart.mul_rat(lambda),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.regular.is_zero() && self.logpart.is_zero()
    }

    /// Numeric value A(t) + B(t)*ln t for t in (0,1); rational coefficients only.
    pub fn eval_f64(&self, t: f64) -> Result<f64> {
        Ok(self.regular.eval_f64(t)? + self.logpart.eval_f64(t)? * t.ln())
    }

    /// JSON: {"regular":[...],"logpart":[...],"trunc":N} with the same
    /// coefficient encoding as plain series.
    pub fn to_json(&self) -> Value {
        let reg = self.regular.to_json();
        let lg = self.logpart.to_json();
        json!({
            "ring": self.ring().name(),
            "regular": reg["coeffs"],
            "logpart": lg["coeffs"],
            "trunc": self.trunc(),
        })
    }

    pub fn from_json(v: &Value) -> Result<LogSeries> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Json("log series must be a JSON object".into()))?;
        let ring = obj
            .get("ring")
            .and_then(Value::as_str)
            .unwrap_or("Q")
            .to_string();
        let trunc = obj
            .get("trunc")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Json("missing 'trunc'".into()))?;
        let part = |key: &str| -> Result<TruncatedSeries> {
            let coeffs = obj
                .get(key)
                .cloned()
                .ok_or_else(|| Error::Json(format!("missing '{key}'")))?;
            TruncatedSeries::from_json(&json!({
                "ring": ring,
                "trunc": trunc,
                "coeffs": coeffs,
            }))
        };
        LogSeries::new(part("regular")?, part("logpart")?)
    }
}

/// The entropy operator L(f) = log f - (t * d/dt log f) * log t.
pub fn entropy_op(f: &WittElement) -> LogSeries {
    let a = f.series().log().expect("unit constant term");
    let b = a.t_ddt().neg();
    LogSeries {
        regular: a,
        logpart: b,
    }
}
