//! Formal Grothendieck-ring classes built from variety atoms, the three
//! exponentiable measures (Euler characteristic, virtual Poincare polynomial,
//! finite-field point count), and their Kapranov zeta functions and entropy.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ffcount::{count_points, rat_from_u128, FqVarietyDef};
use crate::logring::{entropy_op, LogSeries};
use crate::scalar::{rat_int, Poly, Rat, Ring, Scalar};
use crate::series::TruncatedSeries;
use crate::witt::{ghost_inv, teichmuller, witt_add, witt_int_mul, GhostVector, WittElement};

/// An irreducible building block of a class. `Fq` is a product of registered
/// finite-field varieties together with an affine-space factor A^shift.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Atom {
    Pt,
    Affine(u32),
    Projective(u32),
    Betti(Vec<u64>),
    Fq { handles: Vec<String>, shift: u32 },
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Pt => f.write_str("pt"),
            Atom::Affine(n) => write!(f, "A^{n}"),
            Atom::Projective(n) => write!(f, "P^{n}"),
            Atom::Betti(b) => {
                f.write_str("betti[")?;
                for (i, v) in b.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("]")
            }
            Atom::Fq { handles, shift } => {
                for (i, h) in handles.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "fq:{h}")?;
                }
                if *shift > 0 {
                    write!(f, "*A^{shift}")?;
                }
                Ok(())
            }
        }
    }
}

/// A formal Z-linear combination of atoms.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct KClass {
    terms: BTreeMap<Atom, i64>,
}

impl KClass {
    pub fn empty() -> KClass {
        KClass::default()
    }

    pub fn atom(a: Atom) -> KClass {
        KClass::atom_mult(a, 1)
    }

    pub fn atom_mult(a: Atom, mult: i64) -> KClass {
        let mut c = KClass::empty();
        c.insert(a, mult);
        c
    }

    /// The ring unit: a single point.
    pub fn point() -> KClass {
        KClass::atom(Atom::Pt)
    }

    fn insert(&mut self, a: Atom, mult: i64) {
        if mult == 0 {
            return;
        }
        let entry = self.terms.entry(a.clone()).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            self.terms.remove(&a);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Atom, i64)> {
        self.terms.iter().map(|(a, &m)| (a, m))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &KClass) -> KClass {
        let mut out = self.clone();
        for (a, m) in other.terms() {
            out.insert(a.clone(), m);
        }
        out
    }

    pub fn neg(&self) -> KClass {
        let mut out = KClass::empty();
        for (a, m) in self.terms() {
            out.insert(a.clone(), -m);
        }
        out
    }

    pub fn sub(&self, other: &KClass) -> KClass {
        self.add(&other.neg())
    }

    pub fn int_mul(&self, n: i64) -> KClass {
        let mut out = KClass::empty();
        for (a, m) in self.terms() {
            out.insert(a.clone(), n * m);
        }
        out
    }

    pub fn mul(&self, other: &KClass) -> Result<KClass> {
        let mut out = KClass::empty();
        for (a, ma) in self.terms() {
            for (b, mb) in other.terms() {
                let prod = atom_mul(a, b)?;
                out = out.add(&prod.int_mul(ma * mb));
            }
        }
        Ok(out)
    }

    /// JSON: [{"atom": "...", "mult": n}] with atoms in normal-form syntax.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(a, m)| json!({"atom": a.to_string(), "mult": m}))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<KClass> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Json("class must be a JSON array".into()))?;
        let mut out = KClass::empty();
        for item in items {
            let atom_text = item
                .get("atom")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::Json("missing 'atom'".into()))?;
            let mult = item
                .get("mult")
                .and_then(Value::as_i64)
                .ok_or_else(|| Error::Json("missing 'mult'".into()))?;
            let parsed = parse_class(atom_text)?;
            out = out.add(&parsed.int_mul(mult));
        }
        Ok(out)
    }
}

/// Expansion of P^n as pt + A^1 + ... + A^n, used when multiplying.
fn projective_expansion(n: u32) -> KClass {
    let mut out = KClass::point();
    for i in 1..=n {
        out.insert(Atom::Affine(i), 1);
    }
    out
}

fn betti_shift(b: &[u64], by: usize) -> Vec<u64> {
    let mut out = vec![0; b.len() + by];
    out[by..].copy_from_slice(b);
    out
}

fn betti_convolve(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn atom_mul(a: &Atom, b: &Atom) -> Result<KClass> {
    use Atom::*;
    let out = match (a, b) {
        (Pt, other) | (other, Pt) => KClass::atom(other.clone()),
        (Affine(n), Affine(m)) => KClass::atom(Affine(n + m)),
        (Projective(n), other) | (other, Projective(n)) => {
            projective_expansion(*n).mul(&KClass::atom(other.clone()))?
        }
        (Betti(x), Betti(y)) => KClass::atom(Betti(betti_convolve(x, y))),
        (Betti(x), Affine(n)) | (Affine(n), Betti(x)) => {
            KClass::atom(Betti(betti_shift(x, 2 * *n as usize)))
        }
        (Fq { handles, shift }, Affine(n)) | (Affine(n), Fq { handles, shift }) => {
            KClass::atom(Fq {
                handles: handles.clone(),
                shift: shift + n,
            })
        }
        (Fq { handles: h1, shift: s1 }, Fq { handles: h2, shift: s2 }) => {
            let mut handles: Vec<String> = h1.iter().chain(h2).cloned().collect();
            handles.sort();
            KClass::atom(Fq {
                handles,
                shift: s1 + s2,
            })
        }
        (Betti(_), Fq { .. }) | (Fq { .. }, Betti(_)) => {
            return Err(Error::MeasureAtom(
                "product of betti and fq atoms is not supported".into(),
            ))
        }
    };
    Ok(out)
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        for (i, (a, m)) in self.terms().enumerate() {
            if i == 0 {
                if m < 0 {
                    f.write_str("- ")?;
                }
            } else if m < 0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mag = m.unsigned_abs();
            if mag != 1 {
                write!(f, "{mag} ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Parses the class grammar:
/// expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
/// factor := INT | atom | '(' expr ')';
/// atom := 'pt' | 'A^'INT | 'P^'INT | 'L' | 'betti[' INT (',' INT)* ']' | 'fq:'IDENT.
/// Juxtaposed factors ("3 pt") multiply.
pub fn parse_class(text: &str) -> Result<KClass> {
    let mut p = ClassParser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let c = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(Error::Parse {
            pos: p.pos,
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(c)
}

struct ClassParser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl ClassParser<'_> {
    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<KClass> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<KClass> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?)?;
                }
                // juxtaposition: another factor follows directly
                Some(c) if c == b'(' || c.is_ascii_digit() || c.is_ascii_alphabetic() => {
                    acc = acc.mul(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<KClass> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse {
                        pos: self.pos,
                        msg: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(KClass::point().int_mul(n))
            }
            Some(_) => self.atom(),
            None => Err(Error::Parse {
                pos: self.pos,
                msg: "expected a factor".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<KClass> {
        self.skip_ws();
        let start = self.pos;
        if self.eat("pt") {
            return Ok(KClass::point());
        }
        if self.eat("A^") {
            let n = self.index()?;
            return Ok(KClass::atom(Atom::Affine(n)));
        }
        if self.eat("P^") {
            let n = self.index()?;
            return Ok(KClass::atom(Atom::Projective(n)));
        }
        if self.eat("L") {
            return Ok(KClass::atom(Atom::Affine(1)));
        }
        if self.eat("betti[") {
            let mut b = vec![u64::try_from(self.integer()?).map_err(|_| Error::Parse {
                pos: self.pos,
                msg: "Betti numbers must be nonnegative".into(),
            })?];
            while self.peek() == Some(b',') {
                self.pos += 1;
                b.push(u64::try_from(self.integer()?).map_err(|_| Error::Parse {
                    pos: self.pos,
                    msg: "Betti numbers must be nonnegative".into(),
                })?);
            }
            if self.peek() != Some(b']') {
                return Err(Error::Parse {
                    pos: self.pos,
                    msg: "expected ']'".into(),
                });
            }
            self.pos += 1;
            return Ok(KClass::atom(Atom::Betti(b)));
        }
        if self.eat("fq:") {
            let ident_start = self.pos;
            while self
                .bytes
                .get(self.pos)
                .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
            {
                self.pos += 1;
            }
            if self.pos == ident_start {
                return Err(Error::Parse {
                    pos: ident_start,
                    msg: "expected identifier after 'fq:'".into(),
                });
            }
            let name = std::str::from_utf8(&self.bytes[ident_start..self.pos]).unwrap();
            return Ok(KClass::atom(Atom::Fq {
                handles: vec![name.to_string()],
                shift: 0,
            }));
        }
        Err(Error::Parse {
            pos: start,
            msg: "expected an atom".into(),
        })
    }

    fn eat(&mut self, word: &str) -> bool {
        if self.bytes[self.pos..].starts_with(word.as_bytes()) {
            // keywords must not run into a longer identifier
            if word.chars().all(|c| c.is_ascii_alphanumeric()) {
                if let Some(&next) = self.bytes.get(self.pos + word.len()) {
                    if next.is_ascii_alphanumeric() || next == b'_' {
                        return false;
                    }
                }
            }
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse {
                pos: start,
                msg: "expected integer".into(),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "integer out of range".into(),
            })
    }

    fn index(&mut self) -> Result<u32> {
        let n = self.integer()?;
        u32::try_from(n).map_err(|_| Error::Parse {
            pos: self.pos,
            msg: "index out of range".into(),
        })
    }
}

/// Registry of named finite-field varieties with a point-count cache.
#[derive(Default)]
pub struct FqRegistry {
    defs: HashMap<String, FqVarietyDef>,
    cache: Mutex<HashMap<(String, usize), u128>>,
}

impl FqRegistry {
    pub fn new() -> FqRegistry {
        FqRegistry::default()
    }

    pub fn register(&mut self, name: &str, def: FqVarietyDef) {
        self.defs.insert(name.to_string(), def);
    }

    pub fn get(&self, name: &str) -> Result<&FqVarietyDef> {
        self.defs
            .get(name)
            .ok_or_else(|| Error::UnknownVariety(name.to_string()))
    }

    pub fn count(&self, name: &str, m: usize) -> Result<u128> {
        let key = (name.to_string(), m);
        if let Some(&n) = self.cache.lock().unwrap().get(&key) {
            return Ok(n);
        }
        let n = count_points(self.get(name)?, m)?;
        self.cache.lock().unwrap().insert(key, n);
        Ok(n)
    }
}

/// The three exponentiable measures.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Measure {
    EulerChar,
    Poincare,
    PointCount(u64),
}

impl Measure {
    pub fn ring(&self) -> Ring {
        match self {
            Measure::Poincare => Ring::QZ,
            _ => Ring::Q,
        }
    }
}

fn z_pow(k: usize) -> Scalar {
    Scalar::Z(Poly::monomial(Rat::one(), k))
}

fn measure_atom(mu: &Measure, atom: &Atom, reg: &FqRegistry) -> Result<Scalar> {
    match (mu, atom) {
        (Measure::EulerChar, Atom::Pt) => Ok(Scalar::from_int(Ring::Q, 1)),
        (Measure::EulerChar, Atom::Affine(_)) => Ok(Scalar::from_int(Ring::Q, 1)),
        (Measure::EulerChar, Atom::Projective(n)) => Ok(Scalar::from_int(Ring::Q, *n as i64 + 1)),
        (Measure::EulerChar, Atom::Betti(b)) => {
            let chi: i64 = b
                .iter()
                .enumerate()
                .map(|(j, &v)| if j % 2 == 0 { v as i64 } else { -(v as i64) })
                .sum();
            Ok(Scalar::from_int(Ring::Q, chi))
        }
        (Measure::Poincare, Atom::Pt) => Ok(Scalar::one(Ring::QZ)),
        (Measure::Poincare, Atom::Affine(n)) => Ok(z_pow(2 * *n as usize)),
        (Measure::Poincare, Atom::Projective(n)) => {
            let mut acc = Scalar::zero(Ring::QZ);
            for i in 0..=*n as usize {
                acc = acc.add(&z_pow(2 * i));
            }
            Ok(acc)
        }
        (Measure::Poincare, Atom::Betti(b)) => {
            let mut acc = Scalar::zero(Ring::QZ);
            for (j, &v) in b.iter().enumerate() {
                acc = acc.add(&z_pow(j).mul_rat(&rat_int(v as i64)));
            }
            Ok(acc)
        }
        (Measure::PointCount(q), Atom::Pt) => {
            let _ = q;
            Ok(Scalar::from_int(Ring::Q, 1))
        }
        (Measure::PointCount(q), Atom::Affine(n)) => {
            Ok(Scalar::Q(rat_from_u128((*q as u128).pow(*n))))
        }
        (Measure::PointCount(q), Atom::Projective(n)) => {
            let mut acc = 0u128;
            for i in 0..=*n {
                acc += (*q as u128).pow(i);
            }
            Ok(Scalar::Q(rat_from_u128(acc)))
        }
        (Measure::PointCount(q), Atom::Fq { handles, shift }) => {
            let mut acc = (*q as u128).pow(*shift);
            for h in handles {
                let def = reg.get(h)?;
                if def.q() != *q {
                    return Err(Error::MeasureAtom(format!(
                        "variety '{h}' is over F_{} but the measure counts over F_{q}",
                        def.q()
                    )));
                }
                acc *= reg.count(h, 1)?;
            }
            Ok(Scalar::Q(rat_from_u128(acc)))
        }
        (Measure::PointCount(_), Atom::Betti(_)) => Err(Error::MeasureAtom(
            "point counting is undefined on betti atoms".into(),
        )),
        (Measure::EulerChar | Measure::Poincare, Atom::Fq { .. }) => Err(Error::MeasureAtom(
            "fq atoms support only the point-count measure".into(),
        )),
    }
}

/// Evaluates a measure on a class, additively over atoms.
pub fn measure_eval(mu: &Measure, class: &KClass, reg: &FqRegistry) -> Result<Scalar> {
    let mut acc = Scalar::zero(mu.ring());
    for (atom, mult) in class.terms() {
        let v = measure_atom(mu, atom, reg)?;
        acc = acc.add(&v.mul_rat(&rat_int(mult)));
    }
    Ok(acc)
}

/// Per-j Teichmuller weights (exponent of z, signed count) of an atom under
/// the Poincare measure: the zeta factor is prod_j tau(z^j)^(w_j) in W(Q[z]).
fn poincare_weights(atom: &Atom) -> Result<Vec<(usize, i64)>> {
    match atom {
        Atom::Pt => Ok(vec![(0, 1)]),
        Atom::Affine(n) => Ok(vec![(2 * *n as usize, 1)]),
        Atom::Projective(n) => Ok((0..=*n as usize).map(|i| (2 * i, 1)).collect()),
        Atom::Betti(b) => Ok(b
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(j, &v)| (j, if j % 2 == 0 { v as i64 } else { -(v as i64) }))
            .collect()),
        Atom::Fq { .. } => Err(Error::MeasureAtom(
            "fq atoms support only the point-count measure".into(),
        )),
    }
}

fn atom_zeta(mu: &Measure, atom: &Atom, n: usize, reg: &FqRegistry) -> Result<WittElement> {
    match mu {
        Measure::EulerChar => {
            let chi = measure_atom(mu, atom, reg)?;
            Ok(crate::witt::witt_rat_mul(
                chi.as_rat().unwrap(),
                &teichmuller(&Scalar::one(Ring::Q), n),
            ))
        }
        Measure::Poincare => {
            let mut acc = WittElement::zero(Ring::QZ, n);
            for (j, w) in poincare_weights(atom)? {
                let tau = teichmuller(&z_pow(j), n);
                acc = witt_add(&acc, &witt_int_mul(w, &tau))?;
            }
            Ok(acc)
        }
        Measure::PointCount(q) => match atom {
            Atom::Pt => Ok(teichmuller(&Scalar::from_int(Ring::Q, 1), n)),
            Atom::Affine(k) => Ok(teichmuller(
                &Scalar::Q(rat_from_u128((*q as u128).pow(*k))),
                n,
            )),
            Atom::Projective(k) => {
                let mut acc = WittElement::zero(Ring::Q, n);
                for i in 0..=*k {
                    let tau = teichmuller(&Scalar::Q(rat_from_u128((*q as u128).pow(i))), n);
                    acc = witt_add(&acc, &tau)?;
                }
                Ok(acc)
            }
            Atom::Fq { handles, shift } => {
                // ghost_m = prod_h N_m(h) * q^(shift*m), then invert
                let mut components = Vec::with_capacity(n);
                for m in 1..=n {
                    let mut g = (*q as u128).checked_pow(*shift * m as u32).ok_or(
                        Error::CapExceeded {
                            needed: u128::MAX,
                            cap: crate::ffcount::enum_cap(),
                        },
                    )?;
                    for h in handles {
                        let def = reg.get(h)?;
                        if def.q() != *q {
                            return Err(Error::MeasureAtom(format!(
                                "variety '{h}' is over F_{} but the measure counts over F_{q}",
                                def.q()
                            )));
                        }
                        g *= reg.count(h, m)?;
                    }
                    components.push(Scalar::Q(rat_from_u128(g)));
                }
                Ok(ghost_inv(&GhostVector::from_components(
                    Ring::Q, components,
                )?))
            }
            Atom::Betti(_) => Err(Error::MeasureAtom(
                "point counting is undefined on betti atoms".into(),
            )),
        },
    }
}

/// The Kapranov zeta function of a class under a measure, to order N.
pub fn kapranov_zeta(
    mu: &Measure,
    class: &KClass,
    n: usize,
    reg: &FqRegistry,
) -> Result<WittElement> {
    let mut acc = WittElement::zero(mu.ring(), n);
    for (atom, mult) in class.terms() {
        let z = atom_zeta(mu, atom, n, reg)?;
        acc = witt_add(&acc, &witt_int_mul(mult, &z))?;
    }
    Ok(acc)
}

/// Motivic entropy: the entropy operator applied to the Kapranov zeta.
pub fn motivic_entropy(
    mu: &Measure,
    class: &KClass,
    n: usize,
    reg: &FqRegistry,
) -> Result<LogSeries> {
    Ok(entropy_op(&kapranov_zeta(mu, class, n, reg)?))
}

/// Mutual information S(X) + S(Y) - S(X ∩ Y) with a caller-supplied
/// intersection class.
pub fn mutual_information(
    mu: &Measure,
    x: &KClass,
    y: &KClass,
    x_cap_y: &KClass,
    n: usize,
    reg: &FqRegistry,
) -> Result<LogSeries> {
    let sx = motivic_entropy(mu, x, n, reg)?;
    let sy = motivic_entropy(mu, y, n, reg)?;
    let sxy = motivic_entropy(mu, x_cap_y, n, reg)?;
    sx.add(&sy)?.sub(&sxy)
}

/// The Poincare entropy split into coefficients of 1, log t, and log z:
/// for each weight (j, w), the contribution is
/// w * [S(u, 1-u) + u*j*log z] / (1-u) with u = z^j t, expanded literally.
pub struct PoincareEntropyReport {
    pub regular: TruncatedSeries,
    pub log_t: TruncatedSeries,
    pub log_z: TruncatedSeries,
}

pub fn poincare_entropy_components(class: &KClass, n: usize) -> Result<PoincareEntropyReport> {
    let mut regular = TruncatedSeries::zero(Ring::QZ, n);
    let mut log_t = TruncatedSeries::zero(Ring::QZ, n);
    let mut log_z = TruncatedSeries::zero(Ring::QZ, n);
    for (atom, mult) in class.terms() {
        for (j, w) in poincare_weights(atom)? {
            let weight = rat_int(w * mult);
            let u = TruncatedSeries::monomial(z_pow(j), 1, n);
            let one_minus_u = TruncatedSeries::one(Ring::QZ, n).sub(&u)?;
            let inv = one_minus_u.inv()?;
            // S(u, 1-u) = -u log u - (1-u) log(1-u), log u = log t + j log z:
            //   1     : -(1-u) log(1-u)
            //   log t : -u
            //   log z : -j u
            // plus the shift term u * j * log z; everything over (1-u)
            let reg_part = one_minus_u.log()?.mul(&one_minus_u)?.neg().mul(&inv)?;
            let logt_part = u.neg().mul(&inv)?;
            let logz_part = u
                .mul_rat(&rat_int(-(j as i64)))
                .add(&u.mul_rat(&rat_int(j as i64)))?
                .mul(&inv)?;
            regular = regular.add(&reg_part.mul_rat(&weight))?;
            log_t = log_t.add(&logt_part.mul_rat(&weight))?;
            log_z = log_z.add(&logz_part.mul_rat(&weight))?;
        }
    }
    Ok(PoincareEntropyReport {
        regular,
        log_t,
        log_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcount::VarietyKind;
    use crate::scalar::rat;
    use crate::witt::{ghost, witt_mul, witt_sub};

    const N: usize = 12;

    fn reg() -> FqRegistry {
        let mut r = FqRegistry::new();
        r.register(
            "gm",
            FqVarietyDef::new(
                3,
                VarietyKind::Affine,
                vec!["x".into(), "y".into()],
                &["x*y - 1"],
            )
            .unwrap(),
        );
        r
    }

    #[test]
    fn parse_basic_atoms() {
        assert_eq!(parse_class("P^1").unwrap(), KClass::atom(Atom::Projective(1)));
        let c = parse_class("P^1 - pt").unwrap();
        let mut want = KClass::atom(Atom::Projective(1));
        want = want.sub(&KClass::point());
        assert_eq!(c, want);
        assert_eq!(parse_class("L").unwrap(), KClass::atom(Atom::Affine(1)));
        assert_eq!(
            parse_class("betti[1,2,1]").unwrap(),
            KClass::atom(Atom::Betti(vec![1, 2, 1]))
        );
    }

    #[test]
    fn parse_products_expand() {
        // A^2 * P^1 + 3 pt = A^2 + A^3 + 3 pt
        let c = parse_class("A^2 * P^1 + 3 pt").unwrap();
        let mut want = KClass::atom(Atom::Affine(2));
        want.insert(Atom::Affine(3), 1);
        want.insert(Atom::Pt, 3);
        assert_eq!(c, want);
        assert_eq!(parse_class("3 pt").unwrap(), KClass::point().int_mul(3));
        assert_eq!(parse_class("L * L").unwrap(), KClass::atom(Atom::Affine(2)));
        assert_eq!(
            parse_class("(P^1 - pt) * L").unwrap(),
            KClass::atom(Atom::Affine(2))
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_class("P^1 + @") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 6),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_class("betti[1,2").is_err());
        assert!(parse_class("fq:").is_err());
    }

    #[test]
    fn print_parse_round_trip() {
        for text in [
            "P^1",
            "P^1 - pt",
            "A^2 * P^1 + 3 pt",
            "betti[1,2,1] - 2 A^3",
            "fq:gm + pt",
        ] {
            let c = parse_class(text).unwrap();
            assert_eq!(parse_class(&c.to_string()).unwrap(), c);
        }
    }

    #[test]
    fn measure_atom_table() {
        let r = reg();
        let chi = |t: &str| {
            measure_eval(&Measure::EulerChar, &parse_class(t).unwrap(), &r)
                .unwrap()
                .as_rat()
                .unwrap()
                .clone()
        };
        assert_eq!(chi("P^2"), rat_int(3));
        assert_eq!(chi("A^3"), rat_int(1));
        assert_eq!(chi("betti[1,2,1]"), rat_int(0));
        let count = measure_eval(&Measure::PointCount(3), &parse_class("P^1").unwrap(), &r)
            .unwrap();
        assert_eq!(count, Scalar::from_int(Ring::Q, 4));
        let p = measure_eval(&Measure::Poincare, &parse_class("betti[1,2,1]").unwrap(), &r)
            .unwrap();
        let poly = p.as_poly().unwrap();
        assert_eq!(poly.eval(&rat_int(1)), rat_int(4));
        assert_eq!(poly.eval(&rat_int(-1)), rat_int(0));
    }

    #[test]
    fn poincare_at_minus_one_is_euler() {
        let r = reg();
        for text in ["pt", "A^2", "P^3", "betti[1,2,1]", "P^1 * betti[2,0,4] - 3 L"] {
            let c = parse_class(text).unwrap();
            let p = measure_eval(&Measure::Poincare, &c, &r).unwrap();
            let chi = measure_eval(&Measure::EulerChar, &c, &r).unwrap();
            assert_eq!(
                p.as_poly().unwrap().eval(&rat_int(-1)),
                chi.as_rat().unwrap().clone(),
                "{text}"
            );
        }
    }

    #[test]
    fn measure_is_a_ring_homomorphism() {
        let r = reg();
        let x = parse_class("P^2 - 2 pt + A^1").unwrap();
        let y = parse_class("betti[1,0,3] + L").unwrap();
        for mu in [Measure::EulerChar, Measure::Poincare] {
            let sum = measure_eval(&mu, &x.add(&y), &r).unwrap();
            assert_eq!(
                sum,
                measure_eval(&mu, &x, &r)
                    .unwrap()
                    .add(&measure_eval(&mu, &y, &r).unwrap())
            );
            let prod = measure_eval(&mu, &x.mul(&y).unwrap(), &r).unwrap();
            assert_eq!(
                prod,
                measure_eval(&mu, &x, &r)
                    .unwrap()
                    .mul(&measure_eval(&mu, &y, &r).unwrap())
            );
        }
    }

    #[test]
    fn zeta_atoms() {
        let r = reg();
        let z = kapranov_zeta(&Measure::EulerChar, &KClass::point(), N, &r).unwrap();
        assert_eq!(z, teichmuller(&Scalar::from_int(Ring::Q, 1), N));
        // A^1 under counting: (1-qt)^{-1}; [t^n] = q^n = #monic degree-n polys
        let z = kapranov_zeta(
            &Measure::PointCount(3),
            &KClass::atom(Atom::Affine(1)),
            N,
            &r,
        )
        .unwrap();
        assert_eq!(z, teichmuller(&Scalar::from_int(Ring::Q, 3), N));
        for n in 0..=N {
            assert_eq!(
                z.series().coeff(n).as_rat().unwrap(),
                &rat_int(3i64.pow(n as u32))
            );
        }
        // betti[1,2,1]: (1-t)^{-1} (1-zt)^2 (1-z^2 t)^{-1}
        let z = kapranov_zeta(
            &Measure::Poincare,
            &KClass::atom(Atom::Betti(vec![1, 2, 1])),
            N,
            &r,
        )
        .unwrap();
        let t0 = teichmuller(&Scalar::one(Ring::QZ), N);
        let t1 = teichmuller(&z_pow(1), N);
        let t2 = teichmuller(&z_pow(2), N);
        let want = witt_sub(&witt_add(&t0, &t2).unwrap(), &witt_int_mul(2, &t1)).unwrap();
        assert_eq!(z, want);
    }

    #[test]
    fn zeta_group_and_product_laws() {
        let r = reg();
        let x = parse_class("P^1 + 2 pt").unwrap();
        let y = parse_class("A^2 - pt").unwrap();
        for mu in [Measure::EulerChar, Measure::PointCount(3)] {
            let zx = kapranov_zeta(&mu, &x, N, &r).unwrap();
            let zy = kapranov_zeta(&mu, &y, N, &r).unwrap();
            assert_eq!(
                kapranov_zeta(&mu, &x.add(&y), N, &r).unwrap(),
                witt_add(&zx, &zy).unwrap()
            );
            assert_eq!(
                kapranov_zeta(&mu, &x.mul(&y).unwrap(), N, &r).unwrap(),
                witt_mul(&zx, &zy).unwrap()
            );
        }
    }

    #[test]
    fn zeta_of_fq_atoms_counts_points() {
        let r = reg();
        let mu = Measure::PointCount(3);
        let gm = parse_class("fq:gm").unwrap();
        let z = kapranov_zeta(&mu, &gm, 8, &r).unwrap();
        let g = ghost(&z);
        for m in 1..=8 {
            assert_eq!(
                g.component(m).as_rat().unwrap(),
                &rat_int(3i64.pow(m as u32) - 1)
            );
        }
        // product with A^1 multiplies counts by 3^m
        let prod = parse_class("fq:gm * A^1").unwrap();
        let zp = kapranov_zeta(&mu, &prod, 8, &r).unwrap();
        let a1 = kapranov_zeta(&mu, &parse_class("A^1").unwrap(), 8, &r).unwrap();
        assert_eq!(zp, witt_mul(&z, &a1).unwrap());
        // gm = A^1 - pt as classes: same zeta either way
        let alt = kapranov_zeta(&mu, &parse_class("A^1 - pt").unwrap(), 8, &r).unwrap();
        assert_eq!(z, alt);
    }

    #[test]
    fn entropy_scales_with_euler_characteristic() {
        let r = reg();
        // chi = 5
        let c = parse_class("P^4").unwrap();
        let s = motivic_entropy(&Measure::EulerChar, &c, N, &r).unwrap();
        let spt = motivic_entropy(&Measure::EulerChar, &KClass::point(), N, &r).unwrap();
        assert_eq!(s, spt.scalar_mul(&rat_int(5)));
        for n in 1..=N {
            assert_eq!(s.regular().coeff(n).as_rat().unwrap(), &rat(5, n as i64));
        }
    }

    #[test]
    fn inclusion_exclusion_and_mutual_information() {
        let r = reg();
        // X1 = P^1, X2 = P^1, X1 cap X2 = pt: two lines glued at a point
        let p1 = parse_class("P^1").unwrap();
        let pt = KClass::point();
        let union = p1.add(&p1).sub(&pt);
        let mu = Measure::EulerChar;
        let s_union = motivic_entropy(&mu, &union, N, &r).unwrap();
        let direct = motivic_entropy(&mu, &p1, N, &r)
            .unwrap()
            .add(&motivic_entropy(&mu, &p1, N, &r).unwrap())
            .unwrap()
            .sub(&motivic_entropy(&mu, &pt, N, &r).unwrap())
            .unwrap();
        assert_eq!(s_union, direct);
        // chi of the glued space is 3
        let spt = motivic_entropy(&mu, &pt, N, &r).unwrap();
        assert_eq!(s_union, spt.scalar_mul(&rat_int(3)));
        let mi = mutual_information(&mu, &p1, &p1, &pt, N, &r).unwrap();
        assert_eq!(mi, s_union);
        // disjoint and identical cases
        let mi_disjoint =
            mutual_information(&mu, &p1, &pt, &KClass::empty(), N, &r).unwrap();
        assert_eq!(
            mi_disjoint,
            motivic_entropy(&mu, &p1, N, &r)
                .unwrap()
                .add(&spt)
                .unwrap()
        );
        let mi_same = mutual_information(&mu, &p1, &p1, &p1, N, &r).unwrap();
        assert_eq!(mi_same, motivic_entropy(&mu, &p1, N, &r).unwrap());
    }

    #[test]
    fn poincare_components_match_entropy() {
        let r = reg();
        for text in ["P^1", "P^2", "betti[1,2,1]"] {
            let c = parse_class(text).unwrap();
            let report = poincare_entropy_components(&c, N).unwrap();
            assert!(report.log_z.is_zero(), "{text}: log z residue");
            let s = motivic_entropy(&Measure::Poincare, &c, N, &r).unwrap();
            assert_eq!(&report.regular, s.regular(), "{text}: regular part");
            assert_eq!(&report.log_t, s.logpart(), "{text}: log t part");
        }
    }

    #[test]
    fn class_json_round_trip() {
        for text in ["P^1 - pt", "A^2 * P^1 + 3 pt", "betti[1,2,1] + fq:gm"] {
            let c = parse_class(text).unwrap();
            assert_eq!(KClass::from_json(&c.to_json()).unwrap(), c);
        }
    }
}
