//! The base field: `Q` or a real quadratic field `Q(sqrt D)`.
//!
//! Elements are stored in the integral basis `(1, omega)` with
//! `omega = sqrt D` when `D = 2, 3 (mod 4)` and `omega = (1 + sqrt D)/2`
//! when `D = 1 (mod 4)`. All predicates are exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclo::rat_string;
use crate::Error;

/// `Q` or a real quadratic field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Rational,
    RealQuadratic,
}

/// Which integral basis is in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OmegaKind {
    /// `omega = 1` placeholder for `Q` (second coordinate unused).
    None,
    /// `omega = sqrt D`.
    Root,
    /// `omega = (1 + sqrt D)/2`.
    HalfInteger,
}

/// Element `a + b*omega` with rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    pub a: BigRational,
    pub b: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl FieldElement {
    pub fn new(a: BigRational, b: BigRational) -> Self {
        FieldElement { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        FieldElement { a: rat(a), b: rat(b) }
    }

    pub fn from_i128(a: i128, b: i128) -> Self {
        FieldElement {
            a: BigRational::from_integer(BigInt::from(a)),
            b: BigRational::from_integer(BigInt::from(b)),
        }
    }

    pub fn from_rational(q: BigRational) -> Self {
        FieldElement { a: q, b: BigRational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Both coordinates integral, i.e. the element lies in the ring of integers.
    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    /// Integer coordinates, if integral and small enough.
    pub fn to_i128_pair(&self) -> Option<(i128, i128)> {
        if !self.is_integral() {
            return None;
        }
        Some((self.a.numer().to_i128()?, self.b.numer().to_i128()?))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        FieldElement { a: &self.a * q, b: &self.b * q }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&rat(n))
    }
}

impl Add for &FieldElement {
    type Output = FieldElement;
    fn add(self, o: &FieldElement) -> FieldElement {
        FieldElement { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &FieldElement {
    type Output = FieldElement;
    fn sub(self, o: &FieldElement) -> FieldElement {
        FieldElement { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { a: -&self.a, b: -&self.b }
    }
}

/// Invariants reported by [`BaseField::invariants`].
#[derive(Clone, Debug, PartialEq)]
pub struct ElementInvariants {
    pub trace: BigRational,
    pub norm: BigRational,
    pub totally_positive: bool,
    pub embeddings: Vec<f64>,
}

/// `Q` or `Q(sqrt D)` with its integral basis and unit data.
#[derive(Clone, Debug)]
pub struct BaseField {
    kind: FieldKind,
    d: i64,
    disc: i64,
    omega: OmegaKind,
    fund_unit: FieldElement,
    tp_unit: FieldElement,
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.d == other.d
    }
}
impl Eq for BaseField {}

/// Squarefree part of a nonzero integer, keeping the sign.
pub fn squarefree_core(n: i64) -> i64 {
    let sign = n.signum();
    let mut n = n.abs();
    let mut core = sign;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e % 2 == 1 {
            core *= p;
        }
        p += 1;
    }
    core * n
}

impl BaseField {
    /// `d = 0` gives `Q`; `d >= 2` gives `Q(sqrt d)` reduced to its squarefree core.
    pub fn new(d: i64) -> Result<Self, Error> {
        if d == 0 {
            return Ok(Self::rational());
        }
        if d < 0 {
            return Err(Error::InvalidInput(format!("d = {d} is not totally real")));
        }
        if d == 1 {
            return Err(Error::InvalidInput("d = 1 does not define a quadratic field".into()));
        }
        let core = squarefree_core(d);
        if core == 1 {
            return Err(Error::InvalidInput(format!("d = {d} is a perfect square")));
        }
        let omega = if core % 4 == 1 { OmegaKind::HalfInteger } else { OmegaKind::Root };
        let disc = if core % 4 == 1 { core } else { 4 * core };
        let mut f = BaseField {
            kind: FieldKind::RealQuadratic,
            d: core,
            disc,
            omega,
            fund_unit: FieldElement::one(),
            tp_unit: FieldElement::one(),
        };
        f.fund_unit = f.compute_fundamental_unit();
        f.tp_unit = if f.is_totally_positive(&f.fund_unit) {
            f.fund_unit.clone()
        } else {
            f.mul(&f.fund_unit, &f.fund_unit)
        };
        Ok(f)
    }

    pub fn rational() -> Self {
        BaseField {
            kind: FieldKind::Rational,
            d: 0,
            disc: 1,
            omega: OmegaKind::None,
            fund_unit: FieldElement::one(),
            tp_unit: FieldElement::one(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn is_rational(&self) -> bool {
        self.kind == FieldKind::Rational
    }

    pub fn degree(&self) -> u32 {
        if self.is_rational() {
            1
        } else {
            2
        }
    }

    /// Squarefree `D` (0 for `Q`).
    pub fn d(&self) -> i64 {
        self.d
    }

    /// Field discriminant.
    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn omega_kind(&self) -> OmegaKind {
        self.omega
    }

    /// Trace of `omega`.
    pub fn omega_trace(&self) -> i64 {
        match self.omega {
            OmegaKind::HalfInteger => 1,
            _ => 0,
        }
    }

    /// Norm of `omega`.
    pub fn omega_norm(&self) -> i64 {
        match self.omega {
            OmegaKind::None => 0,
            OmegaKind::Root => -self.d,
            OmegaKind::HalfInteger => (1 - self.d) / 4,
        }
    }

    /// Fundamental unit `eps` with `eps > 1` in the first embedding.
    pub fn fund_unit(&self) -> &FieldElement {
        &self.fund_unit
    }

    /// Generator of the totally positive units, `> 1` in the first embedding.
    pub fn tp_unit(&self) -> &FieldElement {
        &self.tp_unit
    }

    /// Norm of the fundamental unit (`-1` or `1`; `1` for `Q`).
    pub fn unit_norm(&self) -> i64 {
        self.norm(&self.fund_unit).to_integer().to_i64().unwrap()
    }

    /// `sqrt D` as an element (1 for `Q`).
    pub fn sqrt_d(&self) -> FieldElement {
        match self.omega {
            OmegaKind::None => FieldElement::one(),
            OmegaKind::Root => FieldElement::from_ints(0, 1),
            OmegaKind::HalfInteger => FieldElement::from_ints(-1, 2),
        }
    }

    /// Generator of the different: `sqrt(disc)`.
    pub fn different_gen(&self) -> FieldElement {
        match self.omega {
            OmegaKind::None => FieldElement::one(),
            OmegaKind::Root => FieldElement::from_ints(0, 2),
            OmegaKind::HalfInteger => self.sqrt_d(),
        }
    }

    /// Element `x + y sqrt D`.
    pub fn from_sqrt_coords(&self, x: BigRational, y: BigRational) -> FieldElement {
        match self.omega {
            OmegaKind::None => FieldElement::from_rational(x),
            OmegaKind::Root => FieldElement::new(x, y),
            OmegaKind::HalfInteger => {
                // y sqrt D = y(2 omega - 1)
                FieldElement::new(x - &y, y * rat(2))
            }
        }
    }

    /// Coordinates `(x, y)` with value `x + y sqrt D`.
    pub fn sqrt_coords(&self, e: &FieldElement) -> (BigRational, BigRational) {
        match self.omega {
            OmegaKind::None => (e.a.clone(), BigRational::zero()),
            OmegaKind::Root => (e.a.clone(), e.b.clone()),
            OmegaKind::HalfInteger => {
                let half = BigRational::new(1.into(), 2.into());
                (&e.a + &e.b * &half, &e.b * &half)
            }
        }
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        // omega^2 = t omega - n
        let t = rat(self.omega_trace());
        let n = rat(self.omega_norm());
        let bb = &x.b * &y.b;
        FieldElement {
            a: &x.a * &y.a - &bb * &n,
            b: &x.a * &y.b + &x.b * &y.a + &bb * &t,
        }
    }

    pub fn pow(&self, x: &FieldElement, e: u32) -> FieldElement {
        let mut r = FieldElement::one();
        for _ in 0..e {
            r = self.mul(&r, x);
        }
        r
    }

    /// Galois conjugate (identity on `Q`).
    pub fn conj(&self, x: &FieldElement) -> FieldElement {
        match self.omega {
            OmegaKind::None => x.clone(),
            // conj(omega) = t - omega
            _ => FieldElement {
                a: &x.a + &x.b * rat(self.omega_trace()),
                b: -&x.b,
            },
        }
    }

    pub fn trace(&self, x: &FieldElement) -> BigRational {
        if self.is_rational() {
            return x.a.clone();
        }
        &x.a * rat(2) + &x.b * rat(self.omega_trace())
    }

    pub fn norm(&self, x: &FieldElement) -> BigRational {
        if self.is_rational() {
            return x.a.clone();
        }
        &x.a * &x.a + &x.a * &x.b * rat(self.omega_trace()) + &x.b * &x.b * rat(self.omega_norm())
    }

    pub fn inv(&self, x: &FieldElement) -> FieldElement {
        assert!(!x.is_zero(), "inverse of zero");
        if self.is_rational() {
            return FieldElement::from_rational(x.a.recip());
        }
        let n = self.norm(x);
        self.conj(x).scale(&n.recip())
    }

    pub fn div(&self, x: &FieldElement, y: &FieldElement) -> FieldElement {
        self.mul(x, &self.inv(y))
    }

    /// Exact sign of `x + y sqrt D` (`D = 0` allowed).
    pub fn sign_of(&self, x: &BigRational, y: &BigRational) -> Ordering {
        if self.is_rational() || y.is_zero() {
            return x.cmp(&BigRational::zero());
        }
        let dy2 = y * y * rat(self.d);
        let x2 = x * x;
        let zero = BigRational::zero();
        match (x.cmp(&zero), y.cmp(&zero)) {
            (Ordering::Less, Ordering::Greater) | (Ordering::Equal, Ordering::Greater) => dy2.cmp(&x2),
            (Ordering::Greater, Ordering::Less) | (Ordering::Equal, Ordering::Less) => x2.cmp(&dy2),
            (Ordering::Greater, _) => Ordering::Greater,
            (Ordering::Less, _) => Ordering::Less,
            (Ordering::Equal, Ordering::Equal) => Ordering::Equal,
        }
    }

    /// Exact signs under the two embeddings (one for `Q`).
    pub fn embedding_signs(&self, e: &FieldElement) -> Vec<Ordering> {
        let (x, y) = self.sqrt_coords(e);
        if self.is_rational() {
            vec![self.sign_of(&x, &y)]
        } else {
            vec![self.sign_of(&x, &y), self.sign_of(&x, &-y)]
        }
    }

    pub fn is_totally_positive(&self, e: &FieldElement) -> bool {
        self.embedding_signs(e).iter().all(|s| *s == Ordering::Greater)
    }

    /// Totally positive or zero.
    pub fn is_tp_or_zero(&self, e: &FieldElement) -> bool {
        e.is_zero() || self.is_totally_positive(e)
    }

    /// Real embeddings (advisory floats).
    pub fn embeddings(&self, e: &FieldElement) -> Vec<f64> {
        let (x, y) = self.sqrt_coords(e);
        let x = x.to_f64().unwrap_or(f64::NAN);
        let y = y.to_f64().unwrap_or(f64::NAN);
        if self.is_rational() {
            vec![x]
        } else {
            let s = (self.d as f64).sqrt();
            vec![x + y * s, x - y * s]
        }
    }

    pub fn invariants(&self, e: &FieldElement) -> ElementInvariants {
        ElementInvariants {
            trace: self.trace(e),
            norm: self.norm(e),
            totally_positive: self.is_totally_positive(e),
            embeddings: self.embeddings(e),
        }
    }

    /// Sort key `(trace, norm, coordinates)` used for all canonical orderings.
    pub fn sort_key(&self, e: &FieldElement) -> (BigRational, BigRational, BigRational, BigRational) {
        (self.trace(e), self.norm(e), e.a.clone(), e.b.clone())
    }

    pub fn sort_elements(&self, v: &mut [FieldElement]) {
        v.sort_by_cached_key(|e| self.sort_key(e));
    }

    /// All totally positive integral elements of trace at most `t`, plus zero.
    pub fn enumerate_totally_positive(&self, t: i64) -> Vec<FieldElement> {
        let mut out = vec![FieldElement::zero()];
        if self.is_rational() {
            out.extend((1..=t).map(|a| FieldElement::from_ints(a, 0)));
            return out;
        }
        let tw = self.omega_trace();
        let sd = (self.d as f64).sqrt();
        for tr in 1..=t {
            // trace = 2a + b tw; positivity forces |y| sqrt D < trace/2
            let bmax = match self.omega {
                OmegaKind::HalfInteger => (tr as f64 / sd).ceil() as i64 + 1,
                _ => (tr as f64 / (2.0 * sd)).ceil() as i64 + 1,
            };
            for b in -bmax..=bmax {
                let twice_a = tr - b * tw;
                if twice_a % 2 != 0 {
                    continue;
                }
                let e = FieldElement::from_ints(twice_a / 2, b);
                if self.is_totally_positive(&e) {
                    out.push(e);
                }
            }
        }
        self.sort_elements(&mut out);
        out
    }

    /// Render as `a+b√D` in `sqrt D` coordinates.
    pub fn format(&self, e: &FieldElement) -> String {
        let (x, y) = self.sqrt_coords(e);
        if y.is_zero() {
            return rat_string(&x);
        }
        let root = format!("√{}", self.d);
        let ypart = if y.abs().is_one() { root.clone() } else { format!("{}{}", rat_string(&y.abs()), root) };
        if x.is_zero() {
            return if y.is_negative() { format!("-{ypart}") } else { ypart };
        }
        format!("{}{}{}", rat_string(&x), if y.is_negative() { "-" } else { "+" }, ypart)
    }

    fn compute_fundamental_unit(&self) -> FieldElement {
        // Continued fraction of omega = (P + sqrt D)/Q.
        let d = self.d as i128;
        let s = (d as u128).sqrt() as i128;
        let (mut p, mut q) = match self.omega {
            OmegaKind::HalfInteger => (1i128, 2i128),
            _ => (0i128, 1i128),
        };
        let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
        let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
        for _ in 0..10_000 {
            let num = if q > 0 { p + s } else { p + s + 1 };
            let a = Integer::div_floor(&num, &q);
            let h_next = BigInt::from(a) * &h + &h_prev;
            let k_next = BigInt::from(a) * &k + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
            // candidate h - k omega
            let cand = FieldElement::new(BigRational::from_integer(h.clone()), BigRational::from_integer(-k.clone()));
            let n = self.norm(&cand);
            if n.abs().is_one() {
                return self.normalize_unit(cand);
            }
            p = a * q - p;
            q = (d - p * p) / q;
        }
        panic!("continued fraction did not produce a unit");
    }

    /// Among `+-u, +-conj(u)` pick the one exceeding 1 in the first embedding.
    fn normalize_unit(&self, u: FieldElement) -> FieldElement {
        let c = self.conj(&u);
        let cands = [u.clone(), -&u, c.clone(), -&c];
        let one = FieldElement::one();
        for x in cands {
            let (dx, dy) = self.sqrt_coords(&(&x - &one));
            if self.sign_of(&dx, &dy) == Ordering::Greater {
                return x;
            }
        }
        unreachable!()
    }

    /// Parse `"a,b"` (integral-basis coordinates), a rational, or the printed form
    /// `"x+y√D"` / `"y√D"` / `"x-√D"`.
    pub fn parse_element(&self, s: &str) -> Result<FieldElement, Error> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let parse = |t: &str| {
            crate::cyclo::parse_rat(t).ok_or_else(|| Error::InvalidInput(format!("bad coordinate '{t}'")))
        };
        if let Some(pos) = s.find('√') {
            let radicand = &s[pos + '√'.len_utf8()..];
            if radicand.parse::<i64>().ok() != Some(self.d) || self.is_rational() {
                return Err(Error::InvalidInput(format!("'{s}' does not use √{} of this field", self.d)));
            }
            let head = &s[..pos];
            // split "x+y" / "x-y" at the last sign that is not leading
            let split = head.char_indices().filter(|&(i, c)| i > 0 && (c == '+' || c == '-')).map(|(i, _)| i).last();
            let (x, y) = match split {
                Some(i) => (parse(&head[..i])?, &head[i..]),
                None => (BigRational::zero(), head),
            };
            let y = match y {
                "" | "+" => BigRational::one(),
                "-" => -BigRational::one(),
                t => parse(t.trim_start_matches('+'))?,
            };
            return Ok(self.from_sqrt_coords(x, y));
        }
        let parts: Vec<&str> = s.split(',').collect();
        match parts.len() {
            1 => Ok(FieldElement::from_rational(parse(parts[0])?)),
            2 => Ok(FieldElement::new(parse(parts[0])?, parse(parts[1])?)),
            _ => Err(Error::InvalidInput(format!("bad element '{s}'"))),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", rat_string(&self.a), rat_string(&self.b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_over_q_and_printed_form_round_trip() {
        let q = BaseField::rational();
        assert_eq!(q.div(&FieldElement::from_ints(1, 0), &FieldElement::from_ints(9, 0)).a, BigRational::new(1.into(), 9.into()));
        for d in [5, 10, 13] {
            let f = BaseField::new(d).unwrap();
            for x in f.enumerate_totally_positive(12) {
                assert_eq!(f.parse_element(&f.format(&x)).unwrap(), x);
                let m = -&x;
                assert_eq!(f.parse_element(&f.format(&m)).unwrap(), m);
            }
        }
        let f = BaseField::new(10).unwrap();
        assert_eq!(f.parse_element("3-2√10").unwrap(), FieldElement::from_ints(3, -2));
        assert_eq!(f.parse_element("-√10").unwrap(), FieldElement::from_ints(0, -1));
        assert!(f.parse_element("1+√5").is_err());
    }

    fn q(n: i64) -> BigRational {
        rat(n)
    }

    #[test]
    fn sqrt40_data() {
        let f = BaseField::new(40).unwrap();
        assert_eq!(f.d(), 10);
        assert_eq!(f.disc(), 40);
        assert_eq!(f.omega_kind(), OmegaKind::Root);
        assert_eq!(*f.fund_unit(), FieldElement::from_ints(3, 1));
        assert_eq!(f.unit_norm(), -1);
        assert_eq!(*f.tp_unit(), FieldElement::from_ints(19, 6));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BaseField::new(-3).is_err());
        assert!(BaseField::new(1).is_err());
        assert!(BaseField::new(9).is_err());
        assert!(BaseField::new(0).unwrap().is_rational());
    }

    #[test]
    fn units_of_small_fields() {
        let cases = [(2, (1, 1)), (3, (2, 1)), (5, (0, 1)), (13, (1, 1)), (79, (80, 9))];
        for (d, (a, b)) in cases {
            let f = BaseField::new(d).unwrap();
            assert_eq!(*f.fund_unit(), FieldElement::from_ints(a, b), "D={d}");
            assert!(f.is_totally_positive(f.tp_unit()));
            assert!(f.norm(f.tp_unit()).is_one());
        }
    }

    #[test]
    fn invariants_match_examples() {
        let f = BaseField::new(10).unwrap();
        let inv = f.invariants(&FieldElement::from_ints(7, 2));
        assert_eq!(inv.trace, q(14));
        assert_eq!(inv.norm, q(9));
        assert!(inv.totally_positive);
        let inv = f.invariants(&FieldElement::from_ints(3, 1));
        assert_eq!(inv.norm, q(-1));
        assert!(!inv.totally_positive);
        let qf = BaseField::rational();
        let inv = qf.invariants(&FieldElement::from_ints(5, 0));
        assert_eq!((inv.trace, inv.norm, inv.totally_positive), (q(5), q(5), true));
    }

    #[test]
    fn half_integer_basis() {
        let f = BaseField::new(5).unwrap();
        let w = FieldElement::from_ints(0, 1);
        // omega^2 = omega + 1
        assert_eq!(f.mul(&w, &w), FieldElement::from_ints(1, 1));
        assert_eq!(f.norm(&w), q(-1));
        assert_eq!(f.mul(&f.sqrt_d(), &f.sqrt_d()), FieldElement::from_ints(5, 0));
    }

    #[test]
    fn enumeration_examples() {
        let qf = BaseField::rational();
        assert_eq!(qf.enumerate_totally_positive(3).len(), 4);
        let f = BaseField::new(10).unwrap();
        let v = f.enumerate_totally_positive(4);
        assert_eq!(v, vec![FieldElement::zero(), FieldElement::from_ints(1, 0), FieldElement::from_ints(2, 0)]);
        let v = f.enumerate_totally_positive(14);
        assert!(v.contains(&FieldElement::from_ints(7, 2)));
        assert!(v.contains(&FieldElement::from_ints(7, -2)));
    }

    #[test]
    fn format_elements() {
        let f = BaseField::new(10).unwrap();
        assert_eq!(f.format(&FieldElement::from_ints(7, -2)), "7-2√10");
        assert_eq!(f.format(&FieldElement::from_ints(0, 1)), "√10");
        let g = BaseField::new(5).unwrap();
        assert_eq!(g.format(&FieldElement::from_ints(0, 1)), "1/2+1/2√5");
    }
}
