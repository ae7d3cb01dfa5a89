//! The big Witt ring W(R) truncated to length N. Additively W(R) is the
//! group of power series with constant term 1 under multiplication; the ring
//! product is computed through ghost coordinates, which is exact because both
//! coefficient rings are Q-algebras.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Ring, Scalar};
use crate::series::TruncatedSeries;

/// A series with constant term 1, viewed as an element of W(R).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WittElement {
    series: TruncatedSeries,
}

/// Ghost components g_1..g_N, where g_n = n * [t^n] log f.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GhostVector {
    ring: Ring,
    components: Vec<Scalar>,
}

impl WittElement {
    pub fn new(series: TruncatedSeries) -> Result<WittElement> {
        if !series.coeff(0).is_one() {
            return Err(Error::NonUnitConstant(series.coeff(0).to_string()));
        }
        Ok(WittElement { series })
    }

    /// The Witt zero: the constant series 1.
    pub fn zero(ring: Ring, trunc: usize) -> WittElement {
        WittElement {
            series: TruncatedSeries::one(ring, trunc),
        }
    }

    /// The Witt unit (1-t)^{-1}.
    pub fn unit(ring: Ring, trunc: usize) -> WittElement {
        teichmuller(&Scalar::one(ring), trunc)
    }

    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn into_series(self) -> TruncatedSeries {
        self.series
    }

    pub fn ring(&self) -> Ring {
        self.series.ring()
    }

    pub fn trunc(&self) -> usize {
        self.series.trunc()
    }

    pub fn is_zero(&self) -> bool {
        self.series.is_one()
    }

    /// JSON form is the series payload with a "witt":true marker.
    pub fn to_json(&self) -> Value {
        let mut v = self.series.to_json();
        v.as_object_mut()
            .expect("series JSON is an object")
            .insert("witt".into(), Value::Bool(true));
        v
    }

    pub fn from_json(v: &Value) -> Result<WittElement> {
        if v.get("witt") != Some(&Value::Bool(true)) {
            return Err(Error::Json("missing 'witt':true marker".into()));
        }
        WittElement::new(TruncatedSeries::from_json(v)?)
    }
}

/// Witt addition: the ordinary product of series.
pub fn witt_add(f: &WittElement, g: &WittElement) -> Result<WittElement> {
    Ok(WittElement {
        series: f.series.mul(&g.series)?,
    })
}

/// Witt subtraction: the ordinary quotient of series.
pub fn witt_sub(f: &WittElement, g: &WittElement) -> Result<WittElement> {
    Ok(WittElement {
        series: f.series.mul(&g.series.inv()?)?,
    })
}

pub fn witt_neg(f: &WittElement) -> WittElement {
    WittElement {
        series: f.series.inv().expect("unit constant term"),
    }
}

/// Integer Witt multiple n *_W f = f^n as a series.
pub fn witt_int_mul(n: i64, f: &WittElement) -> WittElement {
    WittElement {
        series: f.series.powi(n).expect("unit constant term"),
    }
}

/// Rational Witt multiple via the power structure.
pub fn witt_rat_mul(lambda: &crate::scalar::Rat, f: &WittElement) -> WittElement {
    WittElement {
        series: f.series.pow(lambda).expect("unit constant term"),
    }
}

pub fn ghost(f: &WittElement) -> GhostVector {
    let lg = f.series.log().expect("unit constant term");
    let components = (1..=f.trunc())
        .map(|n| lg.coeff(n).mul_rat(&rat_int(n as i64)))
        .collect();
    GhostVector {
        ring: f.ring(),
        components,
    }
}

pub fn ghost_inv(g: &GhostVector) -> WittElement {
    let trunc = g.components.len();
    let mut coeffs = vec![Scalar::zero(g.ring); trunc + 1];
    for n in 1..=trunc {
        coeffs[n] = g.components[n - 1].div_int(n);
    }
    let lg = TruncatedSeries::new(g.ring, trunc, coeffs).expect("length matches");
    WittElement {
        series: lg.exp().expect("zero constant term"),
    }
}

impl GhostVector {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn components(&self) -> &[Scalar] {
        &self.components
    }

    /// Ghost component g_n, 1-indexed.
    pub fn component(&self, n: usize) -> &Scalar {
        &self.components[n - 1]
    }

    pub fn from_components(ring: Ring, components: Vec<Scalar>) -> Result<GhostVector> {
        for c in &components {
            if c.ring() != ring {
                return Err(Error::RingMismatch(ring.name(), c.ring().name()));
            }
        }
        Ok(GhostVector { ring, components })
    }

    fn zip_with(
        &self,
        other: &GhostVector,
        f: impl Fn(&Scalar, &Scalar) -> Scalar,
    ) -> Result<GhostVector> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.name(), other.ring.name()));
        }
        let n = self.components.len().min(other.components.len());
        let components = (0..n)
            .map(|i| f(&self.components[i], &other.components[i]))
            .collect();
        Ok(GhostVector {
            ring: self.ring,
            components,
        })
    }

    pub fn add(&self, other: &GhostVector) -> Result<GhostVector> {
        self.zip_with(other, Scalar::add)
    }

    pub fn mul(&self, other: &GhostVector) -> Result<GhostVector> {
        self.zip_with(other, Scalar::mul)
    }
}

/// Witt multiplication via componentwise ghost product.
pub fn witt_mul(f: &WittElement, g: &WittElement) -> Result<WittElement> {
    let gf = ghost(f);
    let gg = ghost(g);
    Ok(ghost_inv(&gf.mul(&gg)?))
}

/// Teichmuller lift tau(a) = (1 - a t)^{-1}.
pub fn teichmuller(a: &Scalar, trunc: usize) -> WittElement {
    WittElement {
        series: TruncatedSeries::geometric(a, trunc),
    }
}

/// Adams operation Psi_n(f): the n-th ghost component.
pub fn adams(f: &WittElement, n: usize) -> Result<Scalar> {
    if n == 0 || n > f.trunc() {
        return Err(Error::AdamsOutOfRange(n, f.trunc()));
    }
    Ok(ghost(f).component(n).clone())
}

/// Applies a coefficient-ring map to a Witt element (functoriality of W).
pub fn witt_map<F>(f: &WittElement, target: Ring, map: F) -> Result<WittElement>
where
    F: Fn(&Scalar) -> Result<Scalar>,
{
    WittElement::new(f.series.map_coeffs(target, map)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Poly, Rat};
    use num_traits::One;

    const N: usize = 12;

    fn tau_q(a: i64) -> WittElement {
        teichmuller(&Scalar::from_int(Ring::Q, a), N)
    }

    #[test]
    fn witt_add_is_series_product() {
        let f = tau_q(1);
        let double = witt_add(&f, &f).unwrap();
        let one_minus_t = TruncatedSeries::one_minus(&Scalar::from_int(Ring::Q, 1), N);
        assert!(double
            .series()
            .mul(&one_minus_t)
            .unwrap()
            .mul(&one_minus_t)
            .unwrap()
            .is_one());
        let z = WittElement::zero(Ring::Q, N);
        assert_eq!(witt_add(&f, &z).unwrap(), f);
        assert_eq!(witt_sub(&f, &f).unwrap(), z);
    }

    #[test]
    fn ghost_of_teichmuller_is_powers() {
        let g = ghost(&tau_q(3));
        let mut p = rat_int(1);
        for n in 1..=N {
            p *= rat_int(3);
            assert_eq!(g.component(n).as_rat().unwrap(), &p);
        }
        let gz = ghost(&WittElement::zero(Ring::Q, N));
        assert!(gz.components().iter().all(Scalar::is_zero));
    }

    #[test]
    fn ghost_is_additive_and_invertible() {
        let f = witt_add(&tau_q(2), &tau_q(-5)).unwrap();
        let g = witt_add(&tau_q(7), &tau_q(1)).unwrap();
        let sum = witt_add(&f, &g).unwrap();
        assert_eq!(ghost(&sum), ghost(&f).add(&ghost(&g)).unwrap());
        assert_eq!(ghost_inv(&ghost(&f)), f);
        assert_eq!(ghost_inv(&ghost(&sum)), sum);
    }

    #[test]
    fn witt_mul_on_teichmuller_multiplies_parameters() {
        assert_eq!(witt_mul(&tau_q(2), &tau_q(3)).unwrap(), tau_q(6));
        let f = witt_add(&tau_q(2), &tau_q(-1)).unwrap();
        assert_eq!(witt_mul(&f, &WittElement::unit(Ring::Q, N)).unwrap(), f);
        // (1-t)^{-2} * (1-5t)^{-1} = (1-5t)^{-2}
        let two_pts = witt_add(&tau_q(1), &tau_q(1)).unwrap();
        let expect = witt_add(&tau_q(5), &tau_q(5)).unwrap();
        assert_eq!(witt_mul(&two_pts, &tau_q(5)).unwrap(), expect);
    }

    #[test]
    fn ring_laws_on_teichmuller_combinations() {
        let a = witt_add(&tau_q(2), &tau_q(-3)).unwrap();
        let b = witt_sub(&tau_q(4), &tau_q(1)).unwrap();
        let c = witt_add(&tau_q(-1), &tau_q(5)).unwrap();
        assert_eq!(witt_mul(&a, &b).unwrap(), witt_mul(&b, &a).unwrap());
        assert_eq!(
            witt_mul(&witt_mul(&a, &b).unwrap(), &c).unwrap(),
            witt_mul(&a, &witt_mul(&b, &c).unwrap()).unwrap()
        );
        assert_eq!(
            witt_mul(&a, &witt_add(&b, &c).unwrap()).unwrap(),
            witt_add(&witt_mul(&a, &b).unwrap(), &witt_mul(&a, &c).unwrap()).unwrap()
        );
    }

    #[test]
    fn adams_values() {
        for n in 1..=N {
            assert_eq!(
                adams(&tau_q(4), n).unwrap().as_rat().unwrap(),
                &rat_int(4i64.pow(n as u32))
            );
            // (1-t)^{-c}: every Adams component equals c
            let f = witt_int_mul(3, &tau_q(1));
            assert_eq!(adams(&f, n).unwrap(), Scalar::from_int(Ring::Q, 3));
            assert!(adams(&WittElement::zero(Ring::Q, N), n).unwrap().is_zero());
        }
        assert!(adams(&tau_q(1), 0).is_err());
        assert!(adams(&tau_q(1), N + 1).is_err());
    }

    #[test]
    fn adams_composition_law() {
        // Psi_n(Psi_m applied via Teichmuller): a^(nm)
        let a = rat(3, 2);
        let f = teichmuller(&Scalar::Q(a.clone()), N);
        for (n, m) in [(2usize, 3usize), (3, 2), (2, 2)] {
            let inner = adams(&f, m).unwrap();
            let lifted = teichmuller(&inner, N);
            let outer = adams(&lifted, n).unwrap();
            assert_eq!(outer, adams(&f, n * m).unwrap());
        }
    }

    #[test]
    fn functorial_under_evaluation() {
        // z -> 2 commutes with +_W, star, tau, ghost
        let c = rat_int(2);
        let eval = |s: &Scalar| -> Result<Scalar> {
            Ok(Scalar::Q(s.as_poly().expect("Q[z] coefficient").eval(&c)))
        };
        let z = Scalar::Z(Poly::monomial(Rat::one(), 1));
        let z2 = Scalar::Z(Poly::monomial(Rat::one(), 2));
        let f = witt_add(&teichmuller(&z, N), &teichmuller(&z2, N)).unwrap();
        let g = teichmuller(&Scalar::Z(Poly::new(vec![rat_int(1), rat_int(1)])), N);

        let fq = witt_map(&f, Ring::Q, eval).unwrap();
        let gq = witt_map(&g, Ring::Q, eval).unwrap();
        assert_eq!(fq, witt_add(&tau_q(2), &tau_q(4)).unwrap());
        assert_eq!(gq, tau_q(3));
        assert_eq!(
            witt_map(&witt_mul(&f, &g).unwrap(), Ring::Q, eval).unwrap(),
            witt_mul(&fq, &gq).unwrap()
        );
        let gh = ghost(&f);
        let gh_q = ghost(&fq);
        for n in 1..=N {
            assert_eq!(eval(gh.component(n)).unwrap(), *gh_q.component(n));
        }
    }

    #[test]
    fn json_round_trip_with_marker() {
        let f = witt_add(&tau_q(2), &tau_q(3)).unwrap();
        let v = f.to_json();
        assert_eq!(v.get("witt"), Some(&Value::Bool(true)));
        assert_eq!(WittElement::from_json(&v).unwrap(), f);
        assert!(WittElement::from_json(&f.series().to_json()).is_err());
    }
}
