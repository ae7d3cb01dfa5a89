//! Global Hasse-Weil entropy over Z: the Dirichlet log-series of
//! L(X,s) = prod_p Z(X_p, p^{-s}) for classes with uniform counting
//! polynomials, the (1 - s d/ds) entropy evaluation, and the von Mangoldt
//! identity.

use std::collections::BTreeMap;

use num_traits::{ToPrimitive, Zero};

use crate::classes::{Atom, KClass};
use crate::error::{Error, Result};
use crate::scalar::{rat, rat_int, Poly, Rat};

/// The polynomial C with #X(F_{p^k}) = C(p^k), for classes built from pt,
/// A^n, P^n. Betti and fq atoms have no uniform reduction.
pub fn counting_polynomial(class: &KClass) -> Result<Poly> {
    let mut acc = Poly::zero();
    for (atom, mult) in class.terms() {
        let p = match atom {
            Atom::Pt => Poly::constant(rat_int(1)),
            Atom::Affine(n) => Poly::monomial(rat_int(1), *n as usize),
            Atom::Projective(n) => {
                Poly::new((0..=*n as usize).map(|_| rat_int(1)).collect())
            }
            Atom::Betti(_) | Atom::Fq { .. } => {
                return Err(Error::MeasureAtom(format!(
                    "atom '{atom}' has no uniform counting polynomial"
                )))
            }
        };
        acc = acc.add(&p.mul_rat(&rat_int(mult)));
    }
    Ok(acc)
}

/// log L(X,s) = sum c_n n^{-s}, truncated: c_{p^k} = C(p^k)/k for primes
/// p <= pmax, k <= kmax, p^k <= pmax.
pub struct DirichletLogSeries {
    nmax: u64,
    coeffs: BTreeMap<u64, Rat>,
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let mut sieve = vec![true; (n + 1) as usize];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2usize;
    while p * p <= n as usize {
        if sieve[p] {
            let mut k = p * p;
            while k <= n as usize {
                sieve[k] = false;
                k += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&i| sieve[i as usize]).collect()
}

pub fn dirichlet_log_l(class: &KClass, pmax: u64, kmax: u32) -> Result<DirichletLogSeries> {
    let poly = counting_polynomial(class)?;
    let mut coeffs = BTreeMap::new();
    for p in primes_up_to(pmax) {
        let mut pk = 1u64;
        for k in 1..=kmax {
            pk = match pk.checked_mul(p) {
                Some(v) if v <= pmax => v,
                _ => break,
            };
            let c = poly.eval(&rat_int(pk as i64)) / rat_int(k as i64);
            if !c.is_zero() {
                coeffs.insert(pk, c);
            }
        }
    }
    Ok(DirichletLogSeries { nmax: pmax, coeffs })
}

impl DirichletLogSeries {
    pub fn nmax(&self) -> u64 {
        self.nmax
    }

    pub fn coeff(&self, n: u64) -> Rat {
        self.coeffs.get(&n).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u64, &Rat)> {
        self.coeffs.iter().map(|(&n, c)| (n, c))
    }

    /// Numeric log L(s) = sum c_n n^{-s}.
    pub fn logl_at(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&n, c)| c.to_f64().unwrap() * (n as f64).powf(-s))
            .sum()
    }

    /// Numeric -s d/ds log L(s) = s sum c_n ln(n) n^{-s}.
    pub fn sdds_at(&self, s: f64) -> f64 {
        s * self
            .coeffs
            .iter()
            .map(|(&n, c)| c.to_f64().unwrap() * (n as f64).ln() * (n as f64).powf(-s))
            .sum::<f64>()
    }
}

/// The value S(X,s) = (1 - s d/ds) log L(X,s) with its two parts.
pub struct GlobalEntropyEval {
    pub s: f64,
    pub value: f64,
    pub logl: f64,
    pub sdds: f64,
    pub pmax: u64,
    pub kmax: u32,
}

/// Abscissa of convergence: 1 + deg C, where C is the counting polynomial.
pub fn abscissa(class: &KClass) -> Result<f64> {
    let poly = counting_polynomial(class)?;
    Ok(match poly.degree() {
        None => f64::NEG_INFINITY,
        Some(d) => 1.0 + d as f64,
    })
}

pub fn global_entropy(
    class: &KClass,
    s: f64,
    pmax: u64,
    kmax: u32,
) -> Result<GlobalEntropyEval> {
    let a = abscissa(class)?;
    if s <= a {
        return Err(Error::Abscissa { s, abscissa: a });
    }
    let series = dirichlet_log_l(class, pmax, kmax)?;
    let logl = series.logl_at(s);
    let sdds = series.sdds_at(s);
    Ok(GlobalEntropyEval {
        s,
        value: logl + sdds,
        logl,
        sdds,
        pmax,
        kmax,
    })
}

/// Verifies the von Mangoldt identity for the point class exactly: the
/// Dirichlet coefficients satisfy c_n ln n = Lambda(n), i.e. c_{p^k} = 1/k
/// at prime powers and c_n = 0 elsewhere, for all n <= nmax.
pub fn von_mangoldt_check(nmax: u64) -> Result<bool> {
    let series = dirichlet_log_l(&KClass::point(), nmax, 64)?;
    for n in 2..=nmax {
        let c = series.coeff(n);
        match crate::ffcount::prime_power(n) {
            Ok((_, k)) => {
                if c != rat(1, k as i64) {
                    return Ok(false);
                }
            }
            Err(_) => {
                if !c.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
