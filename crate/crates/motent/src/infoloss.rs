//! The three information-loss functionals: ring-homomorphism loss,
//! proper-pushforward loss, and flat-pullback loss, with their additivity
//! laws, the Euler-characteristic Riemann-Hurwitz form, and brute-force
//! Kullback-Leibler oracles over enumerated zero-cycles.

use num_traits::{Signed, ToPrimitive, Zero};

use crate::classes::{kapranov_zeta, FqRegistry, KClass, Measure};
use crate::error::{Error, Result};
use crate::logring::{entropy_op, LogSeries};
use crate::scalar::{rat_int, Rat, Ring, Scalar};
use crate::series::TruncatedSeries;
use crate::witt::WittElement;

/// A homomorphism between the coefficient rings.
#[derive(Clone, Debug)]
pub enum RingHom {
    Identity(Ring),
    /// Evaluation Q[z] -> Q at z = c.
    EvalZ(Rat),
    Compose(Box<RingHom>, Box<RingHom>),
}

impl RingHom {
    pub fn compose(outer: RingHom, inner: RingHom) -> Result<RingHom> {
        if inner.codomain() != outer.domain() {
            return Err(Error::HomDomain(format!(
                "cannot compose: inner codomain {} != outer domain {}",
                inner.codomain().name(),
                outer.domain().name()
            )));
        }
        Ok(RingHom::Compose(Box::new(outer), Box::new(inner)))
    }

    pub fn domain(&self) -> Ring {
        match self {
            RingHom::Identity(r) => *r,
            RingHom::EvalZ(_) => Ring::QZ,
            RingHom::Compose(_, inner) => inner.domain(),
        }
    }

    pub fn codomain(&self) -> Ring {
        match self {
            RingHom::Identity(r) => *r,
            RingHom::EvalZ(_) => Ring::Q,
            RingHom::Compose(outer, _) => outer.codomain(),
        }
    }

    pub fn apply(&self, x: &Scalar) -> Result<Scalar> {
        if x.ring() != self.domain() {
            return Err(Error::RingMismatch(self.domain().name(), x.ring().name()));
        }
        match self {
            RingHom::Identity(_) => Ok(x.clone()),
            RingHom::EvalZ(c) => Ok(Scalar::Q(x.as_poly().expect("Q[z] element").eval(c))),
            RingHom::Compose(outer, inner) => outer.apply(&inner.apply(x)?),
        }
    }

    pub fn apply_series(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        f.map_coeffs(self.codomain(), |c| self.apply(c))
    }

    pub fn apply_logseries(&self, s: &LogSeries) -> Result<LogSeries> {
        LogSeries::new(
            self.apply_series(s.regular())?,
            self.apply_series(s.logpart())?,
        )
    }
}

fn check_hom(phi: &RingHom, mu: &Measure, mu2: &Measure) -> Result<()> {
    if phi.domain() != mu.ring() {
        return Err(Error::HomDomain(format!(
            "homomorphism domain {} does not match measure ring {}",
            phi.domain().name(),
            mu.ring().name()
        )));
    }
    if phi.codomain() != mu2.ring() {
        return Err(Error::HomDomain(format!(
            "homomorphism codomain {} does not match measure ring {}",
            phi.codomain().name(),
            mu2.ring().name()
        )));
    }
    Ok(())
}

/// I_X(phi, mu, mu') = S_{phi o mu}(X) - S_{mu'}(X).
pub fn ringhom_loss(
    phi: &RingHom,
    mu: &Measure,
    mu2: &Measure,
    class: &KClass,
    n: usize,
    reg: &FqRegistry,
) -> Result<LogSeries> {
    check_hom(phi, mu, mu2)?;
    let z_mu = kapranov_zeta(mu, class, n, reg)?;
    let mapped = WittElement::new(phi.apply_series(z_mu.series())?)?;
    let z_mu2 = kapranov_zeta(mu2, class, n, reg)?;
    entropy_op(&mapped).sub(&entropy_op(&z_mu2))
}

/// L( zeta_{phi1 o mu}^lambda * zeta_{phi2 o mu}^{1-lambda} / zeta_{mu'} );
/// equals lambda I(phi1) + (1-lambda) I(phi2).
pub fn ringhom_loss_combination(
    phi1: &RingHom,
    phi2: &RingHom,
    lambda: &Rat,
    mu: &Measure,
    mu2: &Measure,
    class: &KClass,
    n: usize,
    reg: &FqRegistry,
) -> Result<LogSeries> {
    check_hom(phi1, mu, mu2)?;
    check_hom(phi2, mu, mu2)?;
    let z_mu = kapranov_zeta(mu, class, n, reg)?;
    let z1 = phi1.apply_series(z_mu.series())?;
    let z2 = phi2.apply_series(z_mu.series())?;
    let z_mu2 = kapranov_zeta(mu2, class, n, reg)?;
    let one_minus = rat_int(1) - lambda;
    let combined = z1
        .pow(lambda)?
        .mul(&z2.pow(&one_minus)?)?
        .mul(&z_mu2.series().inv()?)?;
    Ok(entropy_op(&WittElement::new(combined)?))
}

/// A proper morphism f: X -> Y, described by the two zeta functions.
#[derive(Clone, Debug)]
pub struct ProperMorphismDesc {
    pub source_zeta: WittElement,
    pub target_zeta: WittElement,
}

impl ProperMorphismDesc {
    pub fn new(source_zeta: WittElement, target_zeta: WittElement) -> ProperMorphismDesc {
        ProperMorphismDesc {
            source_zeta,
            target_zeta,
        }
    }
}

/// I(f_*) = log(Z(X,t)/Z(Y,t)); pushforward preserves cycle degrees, so the
/// log t part vanishes.
pub fn proper_loss(f: &ProperMorphismDesc) -> Result<LogSeries> {
    let ratio = f
        .source_zeta
        .series()
        .mul(&f.target_zeta.series().inv()?)?;
    let regular = ratio.log()?;
    let trunc = regular.trunc();
    LogSeries::new(regular, TruncatedSeries::zero(f.source_zeta.ring(), trunc))
}

/// A finite flat surjective morphism f: X -> Y of constant degree.
#[derive(Clone, Debug)]
pub struct FlatFiniteMorphismDesc {
    pub source_zeta: WittElement,
    pub target_zeta: WittElement,
    pub degree: u64,
}

impl FlatFiniteMorphismDesc {
    pub fn new(
        source_zeta: WittElement,
        target_zeta: WittElement,
        degree: u64,
    ) -> FlatFiniteMorphismDesc {
        assert!(degree >= 1, "flat morphism degree must be positive");
        FlatFiniteMorphismDesc {
            source_zeta,
            target_zeta,
            degree,
        }
    }
}

/// I(f^*) = log(Z(Y)/Z(X)) + (deg f - 1) * (t d/dt log Z(Y)) * log t.
pub fn flat_loss(f: &FlatFiniteMorphismDesc) -> Result<LogSeries> {
    let log_y = f.target_zeta.series().log()?;
    let log_x = f.source_zeta.series().log()?;
    let regular = log_y.sub(&log_x)?;
    let logpart = log_y.t_ddt().mul_rat(&rat_int(f.degree as i64 - 1));
    LogSeries::new(regular, logpart)
}

/// Euler-characteristic data of a degree-delta finite flat surjection that is
/// etale away from S in Y, with F = f^{-1}(S).
#[derive(Clone, Copy, Debug)]
pub struct EulerFlatDesc {
    pub chi_x: i64,
    pub chi_y: i64,
    pub delta: i64,
    pub chi_s: i64,
    pub chi_f: i64,
}

impl EulerFlatDesc {
    pub fn new(chi_x: i64, chi_y: i64, delta: i64, chi_s: i64, chi_f: i64) -> Result<EulerFlatDesc> {
        if chi_x != delta * chi_y + chi_f - delta * chi_s {
            return Err(Error::RiemannHurwitz);
        }
        Ok(EulerFlatDesc {
            chi_x,
            chi_y,
            delta,
            chi_s,
            chi_f,
        })
    }
}

/// The flat loss for the Euler-characteristic measure from the numeric data:
/// S_chi(Y) - S_chi(X) + (delta*chi_S - chi_F) * t log t / (1-t).
/// By the Riemann-Hurwitz relation this equals `flat_loss` applied to the
/// zeta functions (1-t)^{-chi}.
pub fn euler_flat_loss(d: &EulerFlatDesc, n: usize) -> Result<LogSeries> {
    let geo = TruncatedSeries::geometric(&Scalar::from_int(Ring::Q, 1), n);
    let log_inv = geo.log()?;
    let regular = log_inv.mul_rat(&rat_int(d.chi_y - d.chi_x));
    let t_over = TruncatedSeries::monomial(Scalar::from_int(Ring::Q, 1), 1, n).mul(&geo)?;
    let b_entropy = t_over.mul_rat(&rat_int(d.chi_x - d.chi_y));
    let shift = t_over.mul_rat(&rat_int(d.delta * d.chi_s - d.chi_f));
    LogSeries::new(regular, b_entropy.add(&shift)?)
}

/// Numeric value and truncated probability mass of a KL-style oracle sum.
pub struct KlOracleEval {
    pub value: f64,
    pub truncated_mass: f64,
}

fn rat_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn check_radius(zeta: &WittElement, t0: &Rat) -> Result<()> {
    let n = zeta.trunc();
    if n >= 2 {
        let top = zeta.series().coeff(n).as_rat().cloned().unwrap_or_else(Rat::zero);
        let prev = zeta.series().coeff(n - 1).as_rat().cloned().unwrap_or_else(Rat::zero);
        if !prev.is_zero() {
            let ratio = (rat_f64(&top) / rat_f64(&prev)).abs();
            if ratio * rat_f64(t0) >= 1.0 {
                return Err(Error::OutsideRadius(t0.to_string()));
            }
        }
    }
    if !t0.is_positive() || *t0 >= rat_int(1) {
        return Err(Error::OutsideRadius(t0.to_string()));
    }
    Ok(())
}

fn eval_q_series(f: &TruncatedSeries, t0: &Rat, upto: usize) -> Result<(Rat, Rat)> {
    // returns (sum c_n t0^n for n <= upto, weighted sum n c_n t0^n)
    let mut total = Rat::zero();
    let mut weighted = Rat::zero();
    let mut tp = Rat::from_integer(1.into());
    for n in 0..=upto.min(f.trunc()) {
        let c = f
            .coeff(n)
            .as_rat()
            .ok_or(Error::RingMismatch("Q", f.ring().name()))?;
        total += c * &tp;
        weighted += c * &tp * rat_int(n as i64);
        tp *= t0;
    }
    Ok((total, weighted))
}

/// Truncated KL sum for a proper morphism: every degree-preserved cycle
/// contributes P(alpha) * ln(Q(f_* alpha)/P(alpha)) = P(alpha) * ln(Z_X/Z_Y),
/// summed over cycles of degree <= D with P(alpha) = t0^{deg}/Z(X,t0).
pub fn proper_loss_kl_oracle(
    f: &ProperMorphismDesc,
    d: usize,
    t0: &Rat,
) -> Result<KlOracleEval> {
    check_radius(&f.source_zeta, t0)?;
    check_radius(&f.target_zeta, t0)?;
    let (zx, _) = eval_q_series(f.source_zeta.series(), t0, f.source_zeta.trunc())?;
    let (zy, _) = eval_q_series(f.target_zeta.series(), t0, f.target_zeta.trunc())?;
    let (mass_num, _) = eval_q_series(f.source_zeta.series(), t0, d)?;
    let mass = &mass_num / &zx;
    let log_ratio = (rat_f64(&zx) / rat_f64(&zy)).ln();
    Ok(KlOracleEval {
        value: rat_f64(&mass) * log_ratio,
        truncated_mass: rat_f64(&mass),
    })
}

/// Truncated KL sum for a flat morphism: a degree-n cycle of Y pulls back to
/// degree delta*n, so each term is
/// Q(gamma) * [ln(Z_Y/Z_X) + (delta - 1) n ln t0].
pub fn flat_loss_kl_oracle(
    f: &FlatFiniteMorphismDesc,
    d: usize,
    t0: &Rat,
) -> Result<KlOracleEval> {
    check_radius(&f.source_zeta, t0)?;
    check_radius(&f.target_zeta, t0)?;
    let (zx, _) = eval_q_series(f.source_zeta.series(), t0, f.source_zeta.trunc())?;
    let (zy, _) = eval_q_series(f.target_zeta.series(), t0, f.target_zeta.trunc())?;
    let (mass_num, weighted_num) = eval_q_series(f.target_zeta.series(), t0, d)?;
    let mass = &mass_num / &zy;
    let weighted = &weighted_num / &zy;
    let log_ratio = (rat_f64(&zy) / rat_f64(&zx)).ln();
    let value = rat_f64(&mass) * log_ratio
        + (f.degree as f64 - 1.0) * rat_f64(&weighted) * rat_f64(t0).ln();
    Ok(KlOracleEval {
        value,
        truncated_mass: rat_f64(&mass),
    })
}

/// lambda I(f1) + (1-lambda) I(f2) for proper morphisms, computed through
/// the power structure: log((Z_X1/Z_Y1)^lambda (Z_X2/Z_Y2)^{1-lambda}).
pub fn proper_combination_loss(
    f1: &ProperMorphismDesc,
    f2: &ProperMorphismDesc,
    lambda: &Rat,
) -> Result<LogSeries> {
    let r1 = f1
        .source_zeta
        .series()
        .mul(&f1.target_zeta.series().inv()?)?;
    let r2 = f2
        .source_zeta
        .series()
        .mul(&f2.target_zeta.series().inv()?)?;
    let one_minus = rat_int(1) - lambda;
    let regular = r1.pow(lambda)?.mul(&r2.pow(&one_minus)?)?.log()?;
    let trunc = regular.trunc();
    let ring = regular.ring();
    LogSeries::new(regular, TruncatedSeries::zero(ring, trunc))
}

/// lambda I(f1) + (1-lambda) I(f2) for flat morphisms of equal degree.
pub fn flat_combination_loss(
    f1: &FlatFiniteMorphismDesc,
    f2: &FlatFiniteMorphismDesc,
    lambda: &Rat,
) -> Result<LogSeries> {
    if f1.degree != f2.degree {
        return Err(Error::DegreeMismatch(f1.degree, f2.degree));
    }
    let one_minus = rat_int(1) - lambda;
    let y_mix = f1
        .target_zeta
        .series()
        .pow(lambda)?
        .mul(&f2.target_zeta.series().pow(&one_minus)?)?;
    let x_mix = f1
        .source_zeta
        .series()
        .pow(lambda)?
        .mul(&f2.source_zeta.series().pow(&one_minus)?)?;
    let log_y = y_mix.log()?;
    let regular = log_y.sub(&x_mix.log()?)?;
    let logpart = log_y.t_ddt().mul_rat(&rat_int(f1.degree as i64 - 1));
    LogSeries::new(regular, logpart)
}
