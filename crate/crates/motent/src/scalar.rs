//! Exact coefficient rings: the rationals Q and the univariate polynomial
//! ring Q[z] in the reserved indeterminate z. Both are Q-algebras, so every
//! element can be divided by a nonzero integer.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational n/d.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `p/q` in lowest terms, always with a denominator.
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer.
pub fn rat_from_str(s: &str) -> Result<Rat> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Json(format!("bad integer '{t}'")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::Json(format!("zero denominator in '{s}'")));
            }
            Ok(Rat::new(parse_int(n)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Tag for the two supported coefficient rings.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Ring {
    /// The rationals.
    Q,
    /// Polynomials Q[z].
    QZ,
}

impl Ring {
    pub fn name(self) -> &'static str {
        match self {
            Ring::Q => "Q",
            Ring::QZ => "Q[z]",
        }
    }

    pub fn from_name(s: &str) -> Result<Ring> {
        match s {
            "Q" => Ok(Ring::Q),
            "Q[z]" => Ok(Ring::QZ),
            other => Err(Error::Json(format!("unknown ring '{other}'"))),
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Dense univariate polynomial over Q in z, coefficients by ascending degree,
/// no trailing zeros (the zero polynomial has an empty coefficient list).
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: Rat) -> Poly {
        Poly::new(vec![c])
    }

    /// The monomial c * z^k.
    pub fn monomial(c: Rat, k: usize) -> Poly {
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn as_constant(&self) -> Option<Rat> {
        match self.coeffs.len() {
            0 => Some(Rat::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn eval(&self, z: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Substitution z -> z^r.
    pub fn subst_pow(&self, r: usize) -> Poly {
        let mut out = vec![Rat::zero(); self.coeffs.len().saturating_sub(1) * r + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out[k * r] = c.clone();
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn mul_rat(&self, r: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * r).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    f.write_str("-")?;
                }
                first = false;
            } else {
                write!(f, " {sign} ")?;
            }
            let show_coeff = !mag.is_one() || k == 0;
            if show_coeff {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "{}/{}", mag.numer(), mag.denom())?;
                }
            }
            match k {
                0 => {}
                1 => {
                    if show_coeff {
                        f.write_str("*z")?;
                    } else {
                        f.write_str("z")?;
                    }
                }
                _ => {
                    if show_coeff {
                        write!(f, "*z^{k}")?;
                    } else {
                        write!(f, "z^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// A coefficient: either a rational or a polynomial in z.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub enum Scalar {
    Q(Rat),
    Z(Poly),
}

impl Scalar {
    pub fn ring(&self) -> Ring {
        match self {
            Scalar::Q(_) => Ring::Q,
            Scalar::Z(_) => Ring::QZ,
        }
    }

    pub fn zero(ring: Ring) -> Scalar {
        match ring {
            Ring::Q => Scalar::Q(Rat::zero()),
            Ring::QZ => Scalar::Z(Poly::zero()),
        }
    }

    pub fn one(ring: Ring) -> Scalar {
        match ring {
            Ring::Q => Scalar::Q(Rat::one()),
            Ring::QZ => Scalar::Z(Poly::constant(Rat::one())),
        }
    }

    pub fn from_rat(ring: Ring, r: Rat) -> Scalar {
        match ring {
            Ring::Q => Scalar::Q(r),
            Ring::QZ => Scalar::Z(Poly::constant(r)),
        }
    }

    pub fn from_int(ring: Ring, n: i64) -> Scalar {
        Scalar::from_rat(ring, rat_int(n))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::Z(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_one(),
            Scalar::Z(p) => p.as_constant().is_some_and(|c| c.is_one()),
        }
    }

    fn mismatch(&self, other: &Scalar) -> ! {
        panic!(
            "coefficient ring mismatch: {} vs {}",
            self.ring().name(),
            other.ring().name()
        )
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::Z(a), Scalar::Z(b)) => Scalar::Z(a.add(b)),
            _ => self.mismatch(other),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a - b),
            (Scalar::Z(a), Scalar::Z(b)) => Scalar::Z(a.sub(b)),
            _ => self.mismatch(other),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::Z(a), Scalar::Z(b)) => Scalar::Z(a.mul(b)),
            _ => self.mismatch(other),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a.clone()),
            Scalar::Z(a) => Scalar::Z(a.neg()),
        }
    }

    pub fn mul_rat(&self, r: &Rat) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(a * r),
            Scalar::Z(a) => Scalar::Z(a.mul_rat(r)),
        }
    }

    /// Division by a nonzero integer; both rings are Q-algebras.
    pub fn div_int(&self, n: usize) -> Scalar {
        assert!(n != 0, "division by zero integer");
        self.mul_rat(&Rat::new(BigInt::one(), BigInt::from(n)))
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Q(a) => {
                if a.is_zero() {
                    Err(Error::NonInvertibleConstant)
                } else {
                    Ok(Scalar::Q(a.recip()))
                }
            }
            Scalar::Z(p) => match p.as_constant() {
                Some(c) if !c.is_zero() => Ok(Scalar::Z(Poly::constant(c.recip()))),
                _ => Err(Error::NonInvertibleConstant),
            },
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Scalar::Q(r) => Some(r),
            Scalar::Z(_) => None,
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            Scalar::Z(p) => Some(p),
            Scalar::Q(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Z(p) => {
                if p.is_constant() {
                    write!(f, "{p}")
                } else {
                    write!(f, "({p})")
                }
            }
        }
    }
}
