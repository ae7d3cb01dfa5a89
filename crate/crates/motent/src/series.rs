//! Truncated formal power series over an exact coefficient ring, working
//! modulo t^(N+1). All operations are exact; mixing truncations yields the
//! minimum of the operands' truncation orders.

use std::fmt;

use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{rat_from_str, rat_to_string, Rat, Ring, Scalar};

/// Default truncation order used by the CLI when none is given.
pub const DEFAULT_TRUNC: usize = 16;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    ring: Ring,
    trunc: usize,
    coeffs: Vec<Scalar>, // length trunc + 1, coefficient of t^n at index n
}

impl TruncatedSeries {
    pub fn new(ring: Ring, trunc: usize, coeffs: Vec<Scalar>) -> Result<TruncatedSeries> {
        if coeffs.len() != trunc + 1 {
            return Err(Error::CoeffLength {
                got: coeffs.len(),
                want: trunc + 1,
            });
        }
        for c in &coeffs {
            if c.ring() != ring {
                return Err(Error::RingMismatch(ring.name(), c.ring().name()));
            }
        }
        Ok(TruncatedSeries { ring, trunc, coeffs })
    }

    /// Builds a series from the coefficients given, padding with zeros up to
    /// the truncation order.
    pub fn from_coeffs(ring: Ring, trunc: usize, mut coeffs: Vec<Scalar>) -> Result<TruncatedSeries> {
        if coeffs.len() > trunc + 1 {
            return Err(Error::CoeffLength {
                got: coeffs.len(),
                want: trunc + 1,
            });
        }
        coeffs.resize(trunc + 1, Scalar::zero(ring));
        TruncatedSeries::new(ring, trunc, coeffs)
    }

    pub fn from_int_coeffs(ring: Ring, trunc: usize, ints: &[i64]) -> TruncatedSeries {
        let coeffs = ints.iter().map(|&n| Scalar::from_int(ring, n)).collect();
        TruncatedSeries::from_coeffs(ring, trunc, coeffs).expect("within truncation")
    }

    pub fn zero(ring: Ring, trunc: usize) -> TruncatedSeries {
        TruncatedSeries {
            ring,
            trunc,
            coeffs: vec![Scalar::zero(ring); trunc + 1],
        }
    }

    pub fn one(ring: Ring, trunc: usize) -> TruncatedSeries {
        let mut s = TruncatedSeries::zero(ring, trunc);
        s.coeffs[0] = Scalar::one(ring);
        s
    }

    /// The monomial c * t^k.
    pub fn monomial(c: Scalar, k: usize, trunc: usize) -> TruncatedSeries {
        let ring = c.ring();
        let mut s = TruncatedSeries::zero(ring, trunc);
        if k <= trunc {
            s.coeffs[k] = c;
        }
        s
    }

    /// The series 1 - a*t.
    pub fn one_minus(a: &Scalar, trunc: usize) -> TruncatedSeries {
        let ring = a.ring();
        let mut s = TruncatedSeries::one(ring, trunc);
        if trunc >= 1 {
            s.coeffs[1] = a.neg();
        }
        s
    }

    /// The geometric series (1 - a*t)^{-1}.
    pub fn geometric(a: &Scalar, trunc: usize) -> TruncatedSeries {
        let ring = a.ring();
        let mut coeffs = Vec::with_capacity(trunc + 1);
        let mut acc = Scalar::one(ring);
        for _ in 0..=trunc {
            coeffs.push(acc.clone());
            acc = acc.mul(a);
        }
        TruncatedSeries { ring, trunc, coeffs }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, n: usize) -> &Scalar {
        &self.coeffs[n]
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Scalar::is_zero)
    }

    pub fn truncate(&self, trunc: usize) -> TruncatedSeries {
        let trunc = trunc.min(self.trunc);
        TruncatedSeries {
            ring: self.ring,
            trunc,
            coeffs: self.coeffs[..=trunc].to_vec(),
        }
    }

    fn check_ring(&self, other: &TruncatedSeries) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.name(), other.ring.name()));
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_ring(other)?;
        let trunc = self.trunc.min(other.trunc);
        let coeffs = (0..=trunc)
            .map(|n| self.coeffs[n].add(&other.coeffs[n]))
            .collect();
        Ok(TruncatedSeries { ring: self.ring, trunc, coeffs })
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_ring(other)?;
        let trunc = self.trunc.min(other.trunc);
        let coeffs = (0..=trunc)
            .map(|n| self.coeffs[n].sub(&other.coeffs[n]))
            .collect();
        Ok(TruncatedSeries { ring: self.ring, trunc, coeffs })
    }

    pub fn neg(&self) -> TruncatedSeries {
        TruncatedSeries {
            ring: self.ring,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(Scalar::neg).collect(),
        }
    }

    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_ring(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut coeffs = vec![Scalar::zero(self.ring); trunc + 1];
        for i in 0..=trunc {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(trunc - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].add(&self.coeffs[i].mul(&other.coeffs[j]));
            }
        }
        Ok(TruncatedSeries { ring: self.ring, trunc, coeffs })
    }

    pub fn mul_scalar(&self, c: &Scalar) -> Result<TruncatedSeries> {
        if c.ring() != self.ring {
            return Err(Error::RingMismatch(self.ring.name(), c.ring().name()));
        }
        Ok(TruncatedSeries {
            ring: self.ring,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|x| x.mul(c)).collect(),
        })
    }

    pub fn mul_rat(&self, r: &Rat) -> TruncatedSeries {
        TruncatedSeries {
            ring: self.ring,
            trunc: self.trunc,
            coeffs: self.coeffs.iter().map(|x| x.mul_rat(r)).collect(),
        }
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn inv(&self) -> Result<TruncatedSeries> {
        let c0_inv = self.coeffs[0].inv()?;
        let mut out = vec![Scalar::zero(self.ring); self.trunc + 1];
        out[0] = c0_inv.clone();
        for n in 1..=self.trunc {
            let mut acc = Scalar::zero(self.ring);
            for k in 1..=n {
                if self.coeffs[k].is_zero() || out[n - k].is_zero() {
                    continue;
                }
                acc = acc.add(&self.coeffs[k].mul(&out[n - k]));
            }
            out[n] = acc.mul(&c0_inv).neg();
        }
        Ok(TruncatedSeries {
            ring: self.ring,
            trunc: self.trunc,
            coeffs: out,
        })
    }

    /// Plain derivative d/dt (degree drops by one; result keeps the same
    /// truncation order, with the top coefficient unknown set to zero).
    pub fn derivative(&self) -> TruncatedSeries {
        let mut coeffs = Vec::with_capacity(self.trunc + 1);
        for n in 1..=self.trunc {
            coeffs.push(self.coeffs[n].mul_rat(&crate::scalar::rat_int(n as i64)));
        }
        coeffs.push(Scalar::zero(self.ring));
        TruncatedSeries {
            ring: self.ring,
            trunc: self.trunc,
            coeffs,
        }
    }

    /// The operator t*d/dt: coefficient c_n becomes n*c_n.
    pub fn t_ddt(&self) -> TruncatedSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c.mul_rat(&crate::scalar::rat_int(n as i64)))
            .collect();
        TruncatedSeries {
            ring: self.ring,
            trunc: self.trunc,
            coeffs,
        }
    }

    /// Formal logarithm; requires constant term 1. Computed through the
    /// logarithmic derivative: L' = f'/f, integrated termwise.
    pub fn log(&self) -> Result<TruncatedSeries> {
        if !self.coeffs[0].is_one() {
            return Err(Error::NonUnitConstant(self.coeffs[0].to_string()));
        }
        let quotient = self.derivative().mul(&self.inv()?)?;
        let mut coeffs = vec![Scalar::zero(self.ring); self.trunc + 1];
        for n in 1..=self.trunc {
            coeffs[n] = quotient.coeffs[n - 1].div_int(n);
        }
        Ok(TruncatedSeries {
            ring: self.ring,
            trunc: self.trunc,
            coeffs,
        })
    }

    /// Formal exponential; requires constant term 0. Uses the recursion
    /// n*e_n = sum_{k=1}^{n} k*f_k*e_{n-k} from E' = f'E.
    pub fn exp(&self) -> Result<TruncatedSeries> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::NonZeroConstant(self.coeffs[0].to_string()));
        }
        let mut out = vec![Scalar::zero(self.ring); self.trunc + 1];
        out[0] = Scalar::one(self.ring);
        for n in 1..=self.trunc {
            let mut acc = Scalar::zero(self.ring);
            for k in 1..=n {
                if self.coeffs[k].is_zero() || out[n - k].is_zero() {
                    continue;
                }
                acc = acc.add(
                    &self.coeffs[k]
                        .mul_rat(&crate::scalar::rat_int(k as i64))
                        .mul(&out[n - k]),
                );
            }
            out[n] = acc.div_int(n);
        }
        Ok(TruncatedSeries {
            ring: self.ring,
            trunc: self.trunc,
            coeffs: out,
        })
    }

    /// Rational power f^lambda = exp(lambda * log f); requires constant term 1.
    pub fn pow(&self, lambda: &Rat) -> Result<TruncatedSeries> {
        self.log()?.mul_rat(lambda).exp()
    }

    /// Integer power via `pow`; requires constant term 1.
    pub fn powi(&self, n: i64) -> Result<TruncatedSeries> {
        self.pow(&crate::scalar::rat_int(n))
    }

    /// Applies a coefficient map, producing a series over the target ring.
    pub fn map_coeffs<F>(&self, target: Ring, f: F) -> Result<TruncatedSeries>
    where
        F: Fn(&Scalar) -> Result<Scalar>,
    {
        let mut coeffs = Vec::with_capacity(self.trunc + 1);
        for c in &self.coeffs {
            let mapped = f(c)?;
            if mapped.ring() != target {
                return Err(Error::RingMismatch(target.name(), mapped.ring().name()));
            }
            coeffs.push(mapped);
        }
        TruncatedSeries::new(target, self.trunc, coeffs)
    }

    /// Numeric evaluation at a float t; rational coefficients only.
    pub fn eval_f64(&self, t: f64) -> Result<f64> {
        let mut acc = 0.0;
        let mut tp = 1.0;
        for c in &self.coeffs {
            let r = c
                .as_rat()
                .ok_or(Error::RingMismatch("Q", self.ring.name()))?;
            acc += rat_to_f64(r) * tp;
            tp *= t;
        }
        Ok(acc)
    }

    /// Exact evaluation of the truncated polynomial at a rational t.
    pub fn eval_rat(&self, t: &Rat) -> Result<Rat> {
        let mut acc = Rat::from_integer(0.into());
        for c in self.coeffs.iter().rev() {
            let r = c
                .as_rat()
                .ok_or(Error::RingMismatch("Q", self.ring.name()))?;
            acc = acc * t + r;
        }
        Ok(acc)
    }

    fn scalar_to_json(c: &Scalar) -> Value {
        match c {
            Scalar::Q(r) => Value::String(rat_to_string(r)),
            Scalar::Z(p) => Value::Array(
                p.coeffs()
                    .iter()
                    .map(|r| Value::String(rat_to_string(r)))
                    .collect(),
            ),
        }
    }

    fn scalar_from_json(ring: Ring, v: &Value) -> Result<Scalar> {
        match (ring, v) {
            (Ring::Q, Value::String(s)) => Ok(Scalar::Q(rat_from_str(s)?)),
            (Ring::QZ, Value::Array(items)) => {
                let mut coeffs = Vec::with_capacity(items.len());
                for item in items {
                    let s = item
                        .as_str()
                        .ok_or_else(|| Error::Json("polynomial coefficient must be a string".into()))?;
                    coeffs.push(rat_from_str(s)?);
                }
                Ok(Scalar::Z(crate::scalar::Poly::new(coeffs)))
            }
            _ => Err(Error::Json(format!(
                "coefficient {v} does not match ring {}",
                ring.name()
            ))),
        }
    }

    /// JSON form: {"ring":"Q"|"Q[z]","trunc":N,"coeffs":[...]}.
    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.name(),
            "trunc": self.trunc,
            "coeffs": self.coeffs.iter().map(Self::scalar_to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<TruncatedSeries> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Json("series must be a JSON object".into()))?;
        let ring = Ring::from_name(
            obj.get("ring")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Json("missing 'ring'".into()))?,
        )?;
        let trunc = obj
            .get("trunc")
            .and_then(Value::as_u64)
            .and_then(|n| n.to_usize())
            .ok_or_else(|| Error::Json("missing 'trunc'".into()))?;
        let items = obj
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("missing 'coeffs'".into()))?;
        let coeffs = items
            .iter()
            .map(|item| Self::scalar_from_json(ring, item))
            .collect::<Result<Vec<_>>>()?;
        TruncatedSeries::new(ring, trunc, coeffs)
    }
}

fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Extremely large numerators/denominators: fall back to a quotient of
        // truncated floats.
        let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() && !(n == 0 && self.is_zero()) {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match n {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c} t")?,
                _ => write!(f, "{c} t^{n}")?,
            }
        }
        if !first {
            write!(f, " + O(t^{})", self.trunc + 1)?;
        }
        Ok(())
    }
}
