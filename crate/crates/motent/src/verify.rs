//! Batch verification suites: each suite re-runs a family of identities and
//! reports a pass/fail line per check.

use num_traits::One;

use crate::classes::{
    kapranov_zeta, measure_eval, motivic_entropy, parse_class, poincare_entropy_components,
    FqRegistry, Measure,
};
use crate::error::{Error, Result};
use crate::ffcount::{cycle_counts_from_closed_points, hasse_weil_zeta, FqVarietyDef, VarietyKind};
use crate::global::{dirichlet_log_l, global_entropy, von_mangoldt_check};
use crate::infoloss::{
    euler_flat_loss, flat_loss, proper_combination_loss, proper_loss, proper_loss_kl_oracle,
    ringhom_loss, EulerFlatDesc, FlatFiniteMorphismDesc, ProperMorphismDesc, RingHom,
};
use crate::logring::entropy_op;
use crate::scalar::{rat, rat_int, Poly, Rat, Ring, Scalar};
use crate::series::TruncatedSeries;
use crate::witt::{
    adams, ghost, ghost_inv, teichmuller, witt_add, witt_int_mul, witt_mul, witt_sub, WittElement,
};

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

pub const SUITES: &[&str] = &[
    "series", "witt", "entropy", "classes", "ffcount", "global", "infoloss",
];

const N: usize = 12;

/// Deterministic pseudo-random integer stream for randomized law checks.
struct Lcg(u64);

impl Lcg {
    fn new(seed: u64) -> Lcg {
        Lcg(seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493))
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 11
    }

    fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    fn rat(&mut self) -> Rat {
        rat(self.int(-9, 9), self.int(1, 9))
    }

    fn unit_series(&mut self, ring: Ring, n: usize) -> TruncatedSeries {
        let mut coeffs = vec![Scalar::one(ring)];
        for _ in 1..=n {
            coeffs.push(Scalar::from_rat(ring, self.rat()));
        }
        TruncatedSeries::from_coeffs(ring, n, coeffs).expect("length checked")
    }
}

fn check<F>(out: &mut Vec<Check>, name: &str, f: F)
where
    F: FnOnce() -> Result<bool>,
{
    let (passed, detail) = match f() {
        Ok(true) => (true, None),
        Ok(false) => (false, None),
        Err(e) => (false, Some(e.to_string())),
    };
    out.push(Check {
        name: name.to_string(),
        passed,
        detail,
    });
}

fn tau(a: i64) -> WittElement {
    teichmuller(&Scalar::from_int(Ring::Q, a), N)
}

pub fn series_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = Lcg::new(11);
    check(&mut out, "mul/inv round trip on random unit series", || {
        for _ in 0..20 {
            let f = rng.unit_series(Ring::Q, N);
            if !f.mul(&f.inv()?)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "exp(log f) = f on random unit series", || {
        for _ in 0..20 {
            let f = rng.unit_series(Ring::Q, N);
            if f.log()?.exp()? != f {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "log turns products into sums", || {
        for _ in 0..20 {
            let f = rng.unit_series(Ring::Q, N);
            let g = rng.unit_series(Ring::Q, N);
            if f.mul(&g)?.log()? != f.log()?.add(&g.log()?)? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "pow(f,a/b)^b = f^a", || {
        for _ in 0..10 {
            let f = rng.unit_series(Ring::Q, N);
            let l = rng.int(1, 4);
            let k = rng.int(-3, 3);
            if f.pow(&rat(k, l))?.powi(l)? != f.powi(k)? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    out
}

pub fn witt_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = Lcg::new(23);
    check(&mut out, "teichmuller products: tau(a) * tau(b) = tau(ab)", || {
        for _ in 0..50 {
            let a = rng.int(-9, 9);
            let b = rng.int(-9, 9);
            if witt_mul(&tau(a), &tau(b))? != tau(a * b) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "witt ring laws on random elements", || {
        for _ in 0..10 {
            let f = WittElement::new(rng.unit_series(Ring::Q, N))?;
            let g = WittElement::new(rng.unit_series(Ring::Q, N))?;
            let h = WittElement::new(rng.unit_series(Ring::Q, N))?;
            let assoc = witt_mul(&witt_mul(&f, &g)?, &h)? == witt_mul(&f, &witt_mul(&g, &h)?)?;
            let comm = witt_mul(&f, &g)? == witt_mul(&g, &f)?;
            let distrib = witt_mul(&f, &witt_add(&g, &h)?)?
                == witt_add(&witt_mul(&f, &g)?, &witt_mul(&f, &h)?)?;
            let unit = witt_mul(&f, &WittElement::unit(Ring::Q, N))? == f;
            let inverse = witt_sub(&f, &f)?.is_zero();
            if !(assoc && comm && distrib && unit && inverse) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "ghost map is a ring homomorphism", || {
        for _ in 0..10 {
            let f = WittElement::new(rng.unit_series(Ring::Q, N))?;
            let g = WittElement::new(rng.unit_series(Ring::Q, N))?;
            let add_ok = ghost(&witt_add(&f, &g)?) == ghost(&f).add(&ghost(&g))?;
            let mul_ok = ghost(&witt_mul(&f, &g)?) == ghost(&f).mul(&ghost(&g))?;
            let inv_ok = ghost_inv(&ghost(&f)) == f;
            if !(add_ok && mul_ok && inv_ok) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "adams operations on (1-t)^{-c}", || {
        for c in [1i64, 2, 5] {
            let f = witt_int_mul(c, &tau(1));
            for n in 1..=N {
                if adams(&f, n)? != Scalar::from_int(Ring::Q, c) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    });
    out
}

pub fn entropy_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = Lcg::new(37);
    check(&mut out, "logpart coefficients are -n times regular", || {
        for _ in 0..30 {
            let f = WittElement::new(rng.unit_series(Ring::Q, N))?;
            let s = entropy_op(&f);
            for n in 0..=N {
                if s.logpart().coeff(n) != &s.regular().coeff(n).mul_rat(&rat_int(-(n as i64))) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    });
    check(&mut out, "entropy is additive over the Witt sum", || {
        for _ in 0..20 {
            let f = WittElement::new(rng.unit_series(Ring::Q, N))?;
            let g = WittElement::new(rng.unit_series(Ring::Q, N))?;
            if entropy_op(&witt_add(&f, &g)?) != entropy_op(&f).add(&entropy_op(&g))? {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "only the zero element has zero entropy", || {
        if !entropy_op(&WittElement::zero(Ring::Q, N)).is_zero() {
            return Ok(false);
        }
        for _ in 0..50 {
            let f = WittElement::new(rng.unit_series(Ring::Q, N))?;
            if !f.is_zero() && entropy_op(&f).is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    out
}

pub fn classes_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let reg = FqRegistry::new();
    check(&mut out, "measure table on standard atoms", || {
        let p2 = parse_class("P^2")?;
        let p1 = parse_class("P^1")?;
        Ok(
            measure_eval(&Measure::EulerChar, &p2, &reg)? == Scalar::from_int(Ring::Q, 3)
                && measure_eval(&Measure::PointCount(3), &p1, &reg)?
                    == Scalar::from_int(Ring::Q, 4),
        )
    });
    check(&mut out, "euler zeta is (1-t)^{-chi}", || {
        for (text, chi) in [("pt", 1i64), ("P^2", 3), ("P^1 * P^1", 4), ("P^1 - pt", 1)] {
            let c = parse_class(text)?;
            let z = kapranov_zeta(&Measure::EulerChar, &c, N, &reg)?;
            if z != witt_int_mul(chi, &tau(1)) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "poincare zeta of betti[1,2,1]", || {
        let c = parse_class("betti[1,2,1]")?;
        let z = kapranov_zeta(&Measure::Poincare, &c, N, &reg)?;
        let zq = |j: usize| Scalar::Z(Poly::monomial(Rat::one(), j));
        let want = witt_add(
            &witt_add(&teichmuller(&zq(0), N), &teichmuller(&zq(2), N))?,
            &witt_int_mul(-2, &teichmuller(&zq(1), N)),
        )?;
        Ok(z == want)
    });
    check(&mut out, "zeta is additive over classes", || {
        let x = parse_class("P^2")?;
        let y = parse_class("A^1 + 2 pt")?;
        for mu in [Measure::EulerChar, Measure::PointCount(2)] {
            let lhs = kapranov_zeta(&mu, &x.add(&y), N, &reg)?;
            let rhs = witt_add(
                &kapranov_zeta(&mu, &x, N, &reg)?,
                &kapranov_zeta(&mu, &y, N, &reg)?,
            )?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "point-count zeta multiplies over products", || {
        let x = parse_class("P^1")?;
        let y = parse_class("A^2 + pt")?;
        let mu = Measure::PointCount(3);
        let lhs = kapranov_zeta(&mu, &x.mul(&y)?, N, &reg)?;
        let rhs = witt_mul(
            &kapranov_zeta(&mu, &x, N, &reg)?,
            &kapranov_zeta(&mu, &y, N, &reg)?,
        )?;
        Ok(lhs == rhs)
    });
    check(&mut out, "poincare entropy splits with zero log z part", || {
        for text in ["P^1", "P^2", "betti[1,2,1]"] {
            let c = parse_class(text)?;
            let parts = poincare_entropy_components(&c, N)?;
            let s = motivic_entropy(&Measure::Poincare, &c, N, &reg)?;
            if !parts.log_z.is_zero()
                || &parts.regular != s.regular()
                || &parts.log_t != s.logpart()
            {
                return Ok(false);
            }
        }
        Ok(true)
    });
    out
}

pub fn ffcount_suite() -> Vec<Check> {
    let mut out = Vec::new();
    fn def(q: u64, kind: VarietyKind, vars: &[&str], polys: &[&str]) -> Result<FqVarietyDef> {
        FqVarietyDef::new(q, kind, vars.iter().map(|s| s.to_string()).collect(), polys)
    }
    check(&mut out, "affine line counts q^m", || {
        let d = def(3, VarietyKind::Affine, &["x"], &[])?;
        let z = hasse_weil_zeta(&d, 6)?;
        Ok(z.point_counts == vec![3, 9, 27, 81, 243, 729])
    });
    check(&mut out, "multiplicative group counts q^m - 1", || {
        let d = def(4, VarietyKind::Affine, &["x", "y"], &["x*y + 1"])?;
        let z = hasse_weil_zeta(&d, 4)?;
        Ok(z.point_counts == vec![3, 15, 63, 255])
    });
    check(&mut out, "zeta coefficients equal cycle counts", || {
        let d = def(3, VarietyKind::Projective, &["x", "y"], &[])?;
        let z = hasse_weil_zeta(&d, 8)?;
        let cycles = cycle_counts_from_closed_points(&z.closed_points, 8);
        for (n, c) in cycles.iter().enumerate() {
            if z.zeta.series().coeff(n) != &Scalar::Q(crate::ffcount::rat_from_u128(*c)) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "elliptic curve point count over F_3", || {
        let d = def(
            3,
            VarietyKind::Affine,
            &["x", "y"],
            &["y^2 + 2*x^3 + 2*x"],
        )?;
        let z = hasse_weil_zeta(&d, 4)?;
        Ok(z.point_counts[0] == 3)
    });
    check(&mut out, "product of varieties multiplies ghosts", || {
        let a1 = def(2, VarietyKind::Affine, &["x"], &[])?;
        let gm = def(2, VarietyKind::Affine, &["x", "y"], &["x*y + 1"])?;
        let za = hasse_weil_zeta(&a1, 6)?.zeta;
        let zg = hasse_weil_zeta(&gm, 6)?.zeta;
        let prod = def(2, VarietyKind::Affine, &["x", "y", "z"], &["y*z + 1"])?;
        let zp = hasse_weil_zeta(&prod, 6)?.zeta;
        Ok(witt_mul(&za, &zg)? == zp)
    });
    out
}

pub fn global_suite() -> Vec<Check> {
    let mut out = Vec::new();
    check(&mut out, "von Mangoldt identity to 1000", || {
        von_mangoldt_check(1000)
    });
    check(&mut out, "projective Dirichlet coefficients split", || {
        let p2 = dirichlet_log_l(&parse_class("P^2")?, 300, 10)?;
        let pt = dirichlet_log_l(&parse_class("pt")?, 300, 10)?;
        let a1 = dirichlet_log_l(&parse_class("A^1")?, 300, 10)?;
        let a2 = dirichlet_log_l(&parse_class("A^2")?, 300, 10)?;
        for (n, c) in p2.coeffs() {
            if c != &(pt.coeff(n) + a1.coeff(n) + a2.coeff(n)) {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "evaluation rejected at or below the abscissa", || {
        Ok(global_entropy(&parse_class("A^1")?, 2.0, 100, 5).is_err()
            && global_entropy(&parse_class("A^1")?, 2.5, 100, 5).is_ok())
    });
    out
}

pub fn infoloss_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let reg = FqRegistry::new();
    check(&mut out, "proper losses add under composition", || {
        let za = witt_add(&tau(3), &tau(1))?;
        let f = ProperMorphismDesc::new(za.clone(), tau(3));
        let g = ProperMorphismDesc::new(tau(3), tau(1));
        let gf = ProperMorphismDesc::new(za, tau(1));
        Ok(proper_loss(&gf)? == proper_loss(&f)?.add(&proper_loss(&g)?)?)
    });
    check(&mut out, "proper combination is affine in lambda", || {
        let f1 = ProperMorphismDesc::new(witt_add(&tau(2), &tau(1))?, tau(1));
        let f2 = ProperMorphismDesc::new(tau(3), tau(1));
        let i1 = proper_loss(&f1)?;
        let i2 = proper_loss(&f2)?;
        for lambda in [rat_int(0), rat_int(1), rat(1, 2), rat(1, 3), rat(2, 5)] {
            let got = proper_combination_loss(&f1, &f2, &lambda)?;
            let want = i1
                .scalar_mul(&lambda)
                .add(&i2.scalar_mul(&(rat_int(1) - &lambda)))?;
            if got != want {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "z = -1 specialization loses nothing on even classes", || {
        let phi = RingHom::EvalZ(rat_int(-1));
        for text in ["pt", "P^2", "A^3"] {
            let c = parse_class(text)?;
            let l = ringhom_loss(&phi, &Measure::Poincare, &Measure::EulerChar, &c, N, &reg)?;
            if !l.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    });
    check(&mut out, "euler data reproduces the flat loss", || {
        let d = EulerFlatDesc::new(2, 2, 2, 2, 2)?;
        let direct = flat_loss(&FlatFiniteMorphismDesc::new(
            witt_int_mul(2, &tau(1)),
            witt_int_mul(2, &tau(1)),
            2,
        ))?;
        Ok(euler_flat_loss(&d, N)? == direct)
    });
    check(&mut out, "proper KL sum matches the closed form", || {
        let f = ProperMorphismDesc::new(witt_add(&tau(1), &tau(2))?, tau(1));
        let t0 = rat(1, 4);
        let kl = proper_loss_kl_oracle(&f, N, &t0)?;
        let closed = proper_loss(&f)?.regular().eval_f64(0.25)?;
        Ok((kl.value - closed).abs() < 1e-3 && kl.truncated_mass > 0.999)
    });
    out
}

pub fn run_suite(name: &str) -> Result<Vec<Check>> {
    match name {
        "series" => Ok(series_suite()),
        "witt" => Ok(witt_suite()),
        "entropy" => Ok(entropy_suite()),
        "classes" => Ok(classes_suite()),
        "ffcount" => Ok(ffcount_suite()),
        "global" => Ok(global_suite()),
        "infoloss" => Ok(infoloss_suite()),
        "all" => {
            let mut all = Vec::new();
            for s in SUITES {
                all.extend(run_suite(s)?);
            }
            Ok(all)
        }
        other => Err(Error::Json(format!(
            "unknown suite '{other}'; available: {}, all",
            SUITES.join(", ")
        ))),
    }
}
