//! Exact commutative-ring arithmetic.
//!
//! Three families of coefficient rings are supported: the integers, the
//! residue rings `Z/m`, and sparse multivariate polynomial rings over either
//! of those. Elements are stored as an [`Elem`] payload that is always kept in
//! canonical form, so structural equality is ring equality.

mod poly;

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use poly::{Monomial, Poly};

use crate::error::{Error, Result};

/// Which commutative ring the coefficients live in.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingDescriptor {
    Integers,
    Modular {
        modulus: u64,
    },
    Polynomial {
        base: Box<RingDescriptor>,
        num_vars: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree_bound: Option<u32>,
    },
}

impl RingDescriptor {
    pub fn validate(&self) -> Result<()> {
        match self {
            RingDescriptor::Integers => Ok(()),
            RingDescriptor::Modular { modulus } => {
                if *modulus < 2 {
                    Err(Error::InvalidDescriptor(format!(
                        "modulus must be at least 2, got {modulus}"
                    )))
                } else {
                    Ok(())
                }
            }
            RingDescriptor::Polynomial { base, num_vars, .. } => {
                if *num_vars == 0 {
                    return Err(Error::InvalidDescriptor(
                        "polynomial ring needs at least one variable".into(),
                    ));
                }
                if matches!(**base, RingDescriptor::Polynomial { .. }) {
                    return Err(Error::InvalidDescriptor(
                        "polynomials over polynomial rings are not supported".into(),
                    ));
                }
                base.validate()
            }
        }
    }

    /// Parses the command-line grammar `int`, `zmod:<m>`,
    /// `poly:<base>:<k>[:<degree bound>]`. A degree bound `d` denotes the
    /// truncated ring `base[x_1..x_k] / (monomials of degree > d)`, which is
    /// finite when the base is.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens: Vec<&str> = text.trim().split(':').collect();
        let bad = || Error::InvalidDescriptor(format!("cannot parse ring '{text}'"));
        let (desc, used) = Self::parse_tokens(&tokens).ok_or_else(bad)?;
        if used != tokens.len() {
            return Err(bad());
        }
        desc.validate()?;
        Ok(desc)
    }

    fn parse_tokens(tokens: &[&str]) -> Option<(Self, usize)> {
        match *tokens.first()? {
            "int" => Some((RingDescriptor::Integers, 1)),
            "zmod" => {
                let modulus = tokens.get(1)?.parse().ok()?;
                Some((RingDescriptor::Modular { modulus }, 2))
            }
            "poly" => {
                let (base, used) = Self::parse_tokens(&tokens[1..])?;
                let mut pos = 1 + used;
                let num_vars = tokens.get(pos)?.parse().ok()?;
                pos += 1;
                let degree_bound = match tokens.get(pos) {
                    Some(t) => {
                        pos += 1;
                        Some(t.parse().ok()?)
                    }
                    None => None,
                };
                Some((
                    RingDescriptor::Polynomial {
                        base: Box::new(base),
                        num_vars,
                        degree_bound,
                    },
                    pos,
                ))
            }
            _ => None,
        }
    }

    pub fn is_enumerable(&self) -> bool {
        match self {
            RingDescriptor::Integers => false,
            RingDescriptor::Modular { .. } => true,
            RingDescriptor::Polynomial {
                base, degree_bound, ..
            } => matches!(**base, RingDescriptor::Modular { .. }) && degree_bound.is_some(),
        }
    }

    /// Number of elements of an enumerable ring (for a degree-bounded
    /// polynomial ring, the number of polynomials within the bound).
    pub fn element_count(&self) -> Option<u128> {
        match self {
            RingDescriptor::Integers => None,
            RingDescriptor::Modular { modulus } => Some(*modulus as u128),
            RingDescriptor::Polynomial {
                base,
                num_vars,
                degree_bound,
            } => {
                let m = base.element_count()?;
                let monomials = Monomial::up_to_degree(*num_vars, (*degree_bound)?).len();
                let mut count: u128 = 1;
                for _ in 0..monomials {
                    count = count.checked_mul(m)?;
                }
                Some(count)
            }
        }
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Integers => write!(f, "int"),
            RingDescriptor::Modular { modulus } => write!(f, "zmod:{modulus}"),
            RingDescriptor::Polynomial {
                base,
                num_vars,
                degree_bound,
            } => {
                write!(f, "poly:{base}:{num_vars}")?;
                if let Some(d) = degree_bound {
                    write!(f, ":{d}")?;
                }
                Ok(())
            }
        }
    }
}

/// Canonical element payload. Residues lie in `[0, m)`; polynomial terms
/// carry nonzero scalar coefficients only.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Elem {
    Int(BigInt),
    Res(u64),
    Poly(Poly),
}

/// Shared handle to a validated ring descriptor. Cloning is cheap.
#[derive(Clone, Debug)]
pub struct Ring(Arc<RingDescriptor>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for Ring {}

impl Deref for Ring {
    type Target = RingDescriptor;

    fn deref(&self) -> &RingDescriptor {
        &self.0
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Ring {
    pub fn new(desc: RingDescriptor) -> Result<Self> {
        desc.validate()?;
        Ok(Ring(Arc::new(desc)))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ring::new(RingDescriptor::parse(text)?)
    }

    pub fn integers() -> Self {
        Ring(Arc::new(RingDescriptor::Integers))
    }

    pub fn zmod(modulus: u64) -> Result<Self> {
        Ring::new(RingDescriptor::Modular { modulus })
    }

    pub fn polynomial(base: RingDescriptor, num_vars: usize) -> Result<Self> {
        Ring::new(RingDescriptor::Polynomial {
            base: Box::new(base),
            num_vars,
            degree_bound: None,
        })
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.0
    }

    /// Modulus when this is `Z/m`.
    pub fn modulus(&self) -> Option<u64> {
        match &*self.0 {
            RingDescriptor::Modular { modulus } => Some(*modulus),
            _ => None,
        }
    }

    pub fn value(&self, elem: Elem) -> RingValue {
        RingValue {
            owner: self.clone(),
            elem,
        }
    }

    pub fn zero(&self) -> Elem {
        desc_zero(&self.0)
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> Elem {
        self.from_bigint(&BigInt::from(x))
    }

    pub fn from_bigint(&self, x: &BigInt) -> Elem {
        desc_from_bigint(&self.0, x)
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Int(x) => x.is_zero(),
            Elem::Res(x) => *x == 0,
            Elem::Poly(p) => p.is_zero(),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        desc_add(&self.0, a, b)
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        desc_neg(&self.0, a)
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        desc_add(&self.0, a, &desc_neg(&self.0, b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        desc_mul(&self.0, a, b)
    }

    /// `sum a_i * b_i`
    pub fn dot(&self, a: &[Elem], b: &[Elem]) -> Elem {
        a.iter()
            .zip(b)
            .fold(self.zero(), |acc, (x, y)| self.add(&acc, &self.mul(x, y)))
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Elem>) -> Elem {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    /// Polynomial variable `x_{index+1}`.
    pub fn variable(&self, index: usize) -> Result<Elem> {
        match &*self.0 {
            RingDescriptor::Polynomial {
                base,
                num_vars,
                degree_bound,
            } if index < *num_vars => {
                let mut p = Poly::zero();
                if *degree_bound == Some(0) {
                    return Ok(Elem::Poly(p));
                }
                p.terms.insert(
                    Monomial::var(*num_vars, index),
                    desc_from_bigint(base, &BigInt::one()),
                );
                Ok(Elem::Poly(p))
            }
            _ => Err(Error::IndexOutOfRange(format!(
                "variable {index} does not exist in {self}"
            ))),
        }
    }

    /// Random element used by the property sweeps: integers uniform in
    /// `[-9, 9]`, residues uniform over the ring, polynomials of degree at
    /// most one with random base coefficients.
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        desc_random(&self.0, rng)
    }

    /// Every element exactly once, in a fixed order.
    pub fn elements(&self) -> Result<ElementIter> {
        ElementIter::new(&self.0)
    }

    pub fn canonical_bytes(&self, a: &Elem) -> Vec<u8> {
        let mut out = Vec::new();
        write_canonical(a, &mut out);
        out
    }

    pub fn to_json(&self, a: &Elem) -> Value {
        elem_to_json(a)
    }

    pub fn from_json(&self, v: &Value) -> Result<Elem> {
        desc_from_json(&self.0, v)
    }

    pub fn format(&self, a: &Elem) -> String {
        format_elem(a)
    }

    /// Residue of an element of `Z/m` as a machine integer.
    pub fn residue(&self, a: &Elem) -> Option<u64> {
        match a {
            Elem::Res(x) => Some(*x),
            _ => None,
        }
    }
}

fn desc_zero(desc: &RingDescriptor) -> Elem {
    match desc {
        RingDescriptor::Integers => Elem::Int(BigInt::zero()),
        RingDescriptor::Modular { .. } => Elem::Res(0),
        RingDescriptor::Polynomial { .. } => Elem::Poly(Poly::zero()),
    }
}

fn desc_from_bigint(desc: &RingDescriptor, x: &BigInt) -> Elem {
    match desc {
        RingDescriptor::Integers => Elem::Int(x.clone()),
        RingDescriptor::Modular { modulus } => {
            let r = x.mod_floor(&BigInt::from(*modulus));
            Elem::Res(r.to_u64().expect("residue fits in u64"))
        }
        RingDescriptor::Polynomial { base, num_vars, .. } => {
            let c = desc_from_bigint(base, x);
            let mut p = Poly::zero();
            if !is_zero_scalar(&c) {
                p.terms.insert(Monomial::one(*num_vars), c);
            }
            Elem::Poly(p)
        }
    }
}

fn is_zero_scalar(a: &Elem) -> bool {
    match a {
        Elem::Int(x) => x.is_zero(),
        Elem::Res(x) => *x == 0,
        Elem::Poly(p) => p.is_zero(),
    }
}

fn desc_add(desc: &RingDescriptor, a: &Elem, b: &Elem) -> Elem {
    match (desc, a, b) {
        (RingDescriptor::Integers, Elem::Int(x), Elem::Int(y)) => Elem::Int(x + y),
        (RingDescriptor::Modular { modulus }, Elem::Res(x), Elem::Res(y)) => {
            let s = (*x as u128 + *y as u128) % *modulus as u128;
            Elem::Res(s as u64)
        }
        (RingDescriptor::Polynomial { base, .. }, Elem::Poly(p), Elem::Poly(q)) => {
            let mut terms = p.terms.clone();
            for (m, c) in &q.terms {
                match terms.get_mut(m) {
                    Some(existing) => {
                        let s = desc_add(base, existing, c);
                        if is_zero_scalar(&s) {
                            terms.remove(m);
                        } else {
                            *existing = s;
                        }
                    }
                    None => {
                        terms.insert(m.clone(), c.clone());
                    }
                }
            }
            Elem::Poly(Poly { terms })
        }
        _ => panic!("element payload does not match ring {desc}"),
    }
}

fn desc_neg(desc: &RingDescriptor, a: &Elem) -> Elem {
    match (desc, a) {
        (RingDescriptor::Integers, Elem::Int(x)) => Elem::Int(-x),
        (RingDescriptor::Modular { modulus }, Elem::Res(x)) => {
            Elem::Res(if *x == 0 { 0 } else { modulus - x })
        }
        (RingDescriptor::Polynomial { base, .. }, Elem::Poly(p)) => Elem::Poly(Poly {
            terms: p
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), desc_neg(base, c)))
                .collect(),
        }),
        _ => panic!("element payload does not match ring {desc}"),
    }
}

fn desc_mul(desc: &RingDescriptor, a: &Elem, b: &Elem) -> Elem {
    match (desc, a, b) {
        (RingDescriptor::Integers, Elem::Int(x), Elem::Int(y)) => Elem::Int(x * y),
        (RingDescriptor::Modular { modulus }, Elem::Res(x), Elem::Res(y)) => {
            Elem::Res(((*x as u128 * *y as u128) % *modulus as u128) as u64)
        }
        (
            RingDescriptor::Polynomial {
                base, degree_bound, ..
            },
            Elem::Poly(p),
            Elem::Poly(q),
        ) => {
            let mut terms: std::collections::BTreeMap<Monomial, Elem> = Default::default();
            for (m1, c1) in &p.terms {
                for (m2, c2) in &q.terms {
                    let m = m1.mul(m2);
                    if degree_bound.is_some_and(|d| m.degree() > d) {
                        continue;
                    }
                    let prod = desc_mul(base, c1, c2);
                    if is_zero_scalar(&prod) {
                        continue;
                    }
                    match terms.get_mut(&m) {
                        Some(existing) => *existing = desc_add(base, existing, &prod),
                        None => {
                            terms.insert(m, prod);
                        }
                    }
                }
            }
            terms.retain(|_, c| !is_zero_scalar(c));
            Elem::Poly(Poly { terms })
        }
        _ => panic!("element payload does not match ring {desc}"),
    }
}

fn desc_random<R: Rng + ?Sized>(desc: &RingDescriptor, rng: &mut R) -> Elem {
    match desc {
        RingDescriptor::Integers => Elem::Int(BigInt::from(rng.gen_range(-9i64..=9))),
        RingDescriptor::Modular { modulus } => Elem::Res(rng.gen_range(0..*modulus)),
        RingDescriptor::Polynomial {
            base,
            num_vars,
            degree_bound,
        } => {
            let bound = degree_bound.unwrap_or(1).min(1);
            let mut p = Poly::zero();
            for m in Monomial::up_to_degree(*num_vars, bound) {
                let c = desc_random(base, rng);
                if !is_zero_scalar(&c) {
                    p.terms.insert(m, c);
                }
            }
            Elem::Poly(p)
        }
    }
}

fn write_canonical(a: &Elem, out: &mut Vec<u8>) {
    match a {
        Elem::Int(x) => {
            out.push(b'Z');
            out.push(match x.sign() {
                Sign::Minus => b'-',
                _ => b'+',
            });
            let (_, mag) = x.to_bytes_be();
            out.extend_from_slice(&(mag.len() as u32).to_be_bytes());
            out.extend_from_slice(&mag);
        }
        Elem::Res(x) => {
            out.push(b'M');
            out.extend_from_slice(&x.to_be_bytes());
        }
        Elem::Poly(p) => {
            out.push(b'P');
            out.extend_from_slice(&(p.terms.len() as u32).to_be_bytes());
            for (m, c) in &p.terms {
                out.extend_from_slice(&(m.exponents().len() as u32).to_be_bytes());
                for e in m.exponents() {
                    out.extend_from_slice(&e.to_be_bytes());
                }
                write_canonical(c, out);
            }
        }
    }
}

fn elem_to_json(a: &Elem) -> Value {
    match a {
        Elem::Int(x) => Value::String(x.to_string()),
        Elem::Res(x) => json!(x),
        Elem::Poly(p) => Value::Array(
            p.terms
                .iter()
                .map(|(m, c)| json!([m.exponents(), elem_to_json(c)]))
                .collect(),
        ),
    }
}

fn parse_bigint(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

fn desc_from_json(desc: &RingDescriptor, v: &Value) -> Result<Elem> {
    let bad = || Error::Parse(format!("cannot read {v} as an element of {desc}"));
    match desc {
        RingDescriptor::Integers | RingDescriptor::Modular { .. } => {
            let x = parse_bigint(v).ok_or_else(bad)?;
            Ok(desc_from_bigint(desc, &x))
        }
        RingDescriptor::Polynomial {
            base,
            num_vars,
            degree_bound,
        } => {
            if let Some(x) = parse_bigint(v) {
                return Ok(desc_from_bigint(desc, &x));
            }
            let terms = v.as_array().ok_or_else(bad)?;
            let mut acc = desc_zero(desc);
            for term in terms {
                let pair = term.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
                let exps: Vec<u32> = pair[0]
                    .as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|e| e.as_u64().map(|e| e as u32))
                    .collect::<Option<_>>()
                    .ok_or_else(bad)?;
                if exps.len() != *num_vars {
                    return Err(bad());
                }
                let c = desc_from_json(base, &pair[1])?;
                let m = Monomial::from_exponents(exps);
                let mut single = Poly::zero();
                if !is_zero_scalar(&c) && !degree_bound.is_some_and(|d| m.degree() > d) {
                    single.terms.insert(m, c);
                }
                acc = desc_add(desc, &acc, &Elem::Poly(single));
            }
            Ok(acc)
        }
    }
}

fn format_elem(a: &Elem) -> String {
    match a {
        Elem::Int(x) => x.to_string(),
        Elem::Res(x) => x.to_string(),
        Elem::Poly(p) => {
            if p.is_zero() {
                return "0".into();
            }
            let parts: Vec<String> = p
                .terms()
                .rev()
                .map(|(m, c)| {
                    let c = format_elem(c);
                    if m.is_one() {
                        c
                    } else if c == "1" {
                        m.to_string()
                    } else {
                        format!("{c}*{m}")
                    }
                })
                .collect();
            parts.join(" + ")
        }
    }
}

/// Enumerates an enumerable ring in a fixed order: residues ascending, and
/// polynomial coefficient vectors as a mixed-radix counter over the
/// graded-lexicographic monomial list.
pub struct ElementIter {
    modulus: u64,
    monomials: Vec<Monomial>,
    counter: Vec<u64>,
    done: bool,
    poly: bool,
}

impl ElementIter {
    fn new(desc: &RingDescriptor) -> Result<Self> {
        if !desc.is_enumerable() {
            return Err(Error::NotEnumerable(desc.to_string()));
        }
        match desc {
            RingDescriptor::Modular { modulus } => Ok(ElementIter {
                modulus: *modulus,
                monomials: vec![],
                counter: vec![0],
                done: false,
                poly: false,
            }),
            RingDescriptor::Polynomial {
                base,
                num_vars,
                degree_bound: Some(d),
            } => {
                let RingDescriptor::Modular { modulus } = **base else {
                    unreachable!("checked by is_enumerable")
                };
                let monomials = Monomial::up_to_degree(*num_vars, *d);
                Ok(ElementIter {
                    modulus,
                    counter: vec![0; monomials.len()],
                    monomials,
                    done: false,
                    poly: true,
                })
            }
            _ => unreachable!("checked by is_enumerable"),
        }
    }
}

impl Iterator for ElementIter {
    type Item = Elem;

    fn next(&mut self) -> Option<Elem> {
        if self.done {
            return None;
        }
        let item = if self.poly {
            let mut p = Poly::zero();
            for (m, &c) in self.monomials.iter().zip(&self.counter) {
                if c != 0 {
                    p.terms.insert(m.clone(), Elem::Res(c));
                }
            }
            Elem::Poly(p)
        } else {
            Elem::Res(self.counter[0])
        };
        // advance the counter, last digit fastest
        let mut pos = self.counter.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.counter[pos] += 1;
            if self.counter[pos] < self.modulus {
                break;
            }
            self.counter[pos] = 0;
        }
        Some(item)
    }
}

/// A ring element together with the ring that owns it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingValue {
    pub owner: Ring,
    pub elem: Elem,
}

impl RingValue {
    fn check_owner(&self, other: &RingValue) -> Result<()> {
        if self.owner != other.owner {
            return Err(Error::RingMismatch {
                left: self.owner.to_string(),
                right: other.owner.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &RingValue) -> Result<RingValue> {
        self.check_owner(other)?;
        Ok(self.owner.value(self.owner.add(&self.elem, &other.elem)))
    }

    pub fn mul(&self, other: &RingValue) -> Result<RingValue> {
        self.check_owner(other)?;
        Ok(self.owner.value(self.owner.mul(&self.elem, &other.elem)))
    }

    pub fn neg(&self) -> RingValue {
        self.owner.value(self.owner.neg(&self.elem))
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        self.owner.canonical_bytes(&self.elem)
    }

    pub fn to_json(&self) -> Value {
        self.owner.to_json(&self.elem)
    }

    /// Integer value when the owner is the integers.
    pub fn as_bigint(&self) -> Option<&BigInt> {
        match &self.elem {
            Elem::Int(x) => Some(x),
            _ => None,
        }
    }
}

impl fmt::Display for RingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_elem(&self.elem))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Mul,
    Neg,
}

/// Single ring operation on owned values; `y` is ignored for negation and
/// required otherwise.
pub fn ring_arith(op: ArithOp, x: &RingValue, y: Option<&RingValue>) -> Result<RingValue> {
    let need = || Error::Precondition("binary operation needs a second operand".into());
    match op {
        ArithOp::Add => x.add(y.ok_or_else(need)?),
        ArithOp::Mul => x.mul(y.ok_or_else(need)?),
        ArithOp::Neg => Ok(x.neg()),
    }
}

/// Helper for tests and callers that build values from machine integers.
pub fn int_value(x: i64) -> RingValue {
    Ring::integers().value(Elem::Int(BigInt::from(x)))
}

#[allow(dead_code)]
pub(crate) fn bigint_is_negative(x: &BigInt) -> bool {
    x.is_negative()
}
