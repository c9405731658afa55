//! Integral ideals of the ring of integers.
//!
//! An ideal is stored as the Hermite basis `{A, B + C*omega}` of its lattice
//! in integral-basis coordinates, with `A` the least positive rational integer
//! in the ideal, `0 <= B < A` and norm `A*C`. Over `Q` the basis is `{A}`.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive};

use crate::arith::{ext_gcd, factorize, gcd, primes_up_to, sqrt_mod};
use crate::base_field::{BaseField, FieldElement};
use crate::Error;

/// Hermite-normal-form lattice of an integral ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    a: i128,
    b: i128,
    c: i128,
}

impl Ideal {
    pub fn unit() -> Self {
        Ideal { a: 1, b: 0, c: 1 }
    }

    /// The ideal `(n)` for a rational integer `n != 0`.
    pub fn rational(f: &BaseField, n: i128) -> Self {
        Self::principal_int(f, (n, 0))
    }

    /// Hermite basis `(A, B, C)`.
    pub fn hnf(&self) -> (i128, i128, i128) {
        (self.a, self.b, self.c)
    }

    pub fn norm(&self) -> i128 {
        self.a * self.c
    }

    pub fn is_unit(&self) -> bool {
        self.a == 1 && self.c == 1
    }

    /// Lattice spanned over `Z` by the given coordinate vectors.
    fn from_lattice(f: &BaseField, vecs: &[(i128, i128)]) -> Self {
        if f.is_rational() {
            let a = vecs.iter().fold(0, |g, v| gcd(g, v.0));
            assert!(a != 0, "zero ideal");
            return Ideal { a, b: 0, c: 1 };
        }
        let mut a = 0i128;
        let mut piv: Option<(i128, i128)> = None;
        for &(x, y) in vecs {
            if y == 0 {
                a = gcd(a, x);
                continue;
            }
            match piv {
                None => piv = Some((x, y)),
                Some((px, py)) => {
                    let (g, s, t) = ext_gcd(py, y);
                    let nx = s * px + t * x;
                    // kernel combination has second coordinate 0
                    let kx = (y / g) * px - (py / g) * x;
                    a = gcd(a, kx);
                    piv = Some((nx, g));
                }
            }
            if a != 0 {
                if let Some((px, py)) = piv {
                    piv = Some((px.rem_euclid(a), py));
                }
            }
        }
        let (mut b, mut c) = piv.expect("degenerate lattice");
        assert!(a != 0, "degenerate lattice");
        if c < 0 {
            c = -c;
            b = -b;
        }
        b = b.rem_euclid(a);
        Ideal { a, b, c }
    }

    /// Ideal generated by the given integral elements (coordinate pairs).
    pub fn from_generators(f: &BaseField, gens: &[(i128, i128)]) -> Self {
        let mut vecs = Vec::with_capacity(2 * gens.len());
        for &g in gens {
            vecs.push(g);
            if !f.is_rational() {
                vecs.push(mul_int(f, g, (0, 1)));
            }
        }
        Self::from_lattice(f, &vecs)
    }

    pub fn principal_int(f: &BaseField, g: (i128, i128)) -> Self {
        Self::from_generators(f, &[g])
    }

    pub fn principal(f: &BaseField, x: &FieldElement) -> Result<Self, Error> {
        let g = x
            .to_i128_pair()
            .ok_or_else(|| Error::InvalidInput("element is not integral".into()))?;
        if g == (0, 0) {
            return Err(Error::InvalidInput("zero has no ideal factorization".into()));
        }
        Ok(Self::principal_int(f, g))
    }

    /// Two lattice basis vectors.
    pub fn basis(&self, f: &BaseField) -> Vec<(i128, i128)> {
        if f.is_rational() {
            vec![(self.a, 0)]
        } else {
            vec![(self.a, 0), (self.b, self.c)]
        }
    }

    pub fn mul(&self, f: &BaseField, other: &Ideal) -> Ideal {
        let mut gens = Vec::new();
        for x in self.basis(f) {
            for y in other.basis(f) {
                gens.push(mul_int(f, x, y));
            }
        }
        Self::from_generators(f, &gens)
    }

    pub fn pow(&self, f: &BaseField, e: u32) -> Ideal {
        let mut r = Ideal::unit();
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    pub fn conj(&self, f: &BaseField) -> Ideal {
        if f.is_rational() {
            return *self;
        }
        let t = f.omega_trace() as i128;
        let gens: Vec<_> = self.basis(f).into_iter().map(|(x, y)| (x + t * y, -y)).collect();
        Self::from_generators(f, &gens)
    }

    pub fn contains(&self, v: (i128, i128)) -> bool {
        if v.1 % self.c != 0 {
            return false;
        }
        (v.0 - (v.1 / self.c) * self.b) % self.a == 0
    }

    pub fn contains_elem(&self, x: &FieldElement) -> bool {
        match x.to_i128_pair() {
            Some(v) => self.contains(v),
            None => false,
        }
    }

    /// `other ⊆ self`, i.e. `self | other`.
    pub fn divides(&self, f: &BaseField, other: &Ideal) -> bool {
        other.basis(f).into_iter().all(|v| self.contains(v))
    }

    /// Exact quotient `self / d` for a divisor `d`.
    pub fn div(&self, f: &BaseField, d: &Ideal) -> Ideal {
        // self * conj(d) = (self/d) * (N d)
        let p = self.mul(f, &d.conj(f));
        let n = d.norm();
        let gens: Vec<_> = p.basis(f).into_iter().map(|(x, y)| (x / n, y / n)).collect();
        debug_assert!(p.basis(f).iter().all(|&(x, y)| x % n == 0 && y % n == 0));
        Self::from_lattice(f, &lattice_closure(f, &gens))
    }

    pub fn to_json(&self, f: &BaseField) -> serde_json::Value {
        let basis: Vec<Vec<String>> = self
            .basis(f)
            .into_iter()
            .map(|(x, y)| vec![x.to_string(), y.to_string()])
            .collect();
        serde_json::json!({"norm": self.norm().to_string(), "basis": basis})
    }
}

fn lattice_closure(f: &BaseField, gens: &[(i128, i128)]) -> Vec<(i128, i128)> {
    // the rows already form a lattice basis; omega multiples keep it an ideal
    let mut v = gens.to_vec();
    if !f.is_rational() {
        v.extend(gens.iter().map(|&g| mul_int(f, g, (0, 1))));
    }
    v
}

/// Product of integral elements given by coordinates.
pub fn mul_int(f: &BaseField, x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
    if f.is_rational() {
        return (x.0 * y.0, 0);
    }
    let t = f.omega_trace() as i128;
    let n = f.omega_norm() as i128;
    let bb = x.1 * y.1;
    (x.0 * y.0 - bb * n, x.0 * y.1 + x.1 * y.0 + bb * t)
}

/// Norm of an integral element given by coordinates.
pub fn norm_int(f: &BaseField, x: (i128, i128)) -> i128 {
    if f.is_rational() {
        return x.0;
    }
    let t = f.omega_trace() as i128;
    let n = f.omega_norm() as i128;
    x.0 * x.0 + x.0 * x.1 * t + x.1 * x.1 * n
}

/// A prime ideal of the ring of integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeIdeal {
    pub p: u64,
    /// Root of the minimal polynomial of omega mod p (split and ramified primes).
    pub root: Option<i64>,
    pub residue_deg: u8,
    pub ram_index: u8,
    pub ideal: Ideal,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.residue_deg as u32)
    }

    /// Valuation of a nonzero integral element.
    pub fn valuation(&self, f: &BaseField, x: (i128, i128)) -> u32 {
        assert!(x != (0, 0));
        let mut v = 0;
        let mut pw = self.ideal;
        while pw.contains(x) {
            v += 1;
            pw = pw.mul(f, &self.ideal);
        }
        v
    }

    pub fn label(&self, f: &BaseField) -> String {
        match (self.root, f.is_rational()) {
            (_, true) | (None, _) => format!("({})", self.p),
            (Some(r), false) => format!("({}, ω-{})", self.p, r),
        }
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.root {
            Some(r) if self.ideal.c == 1 => write!(f, "P({},{})", self.p, r),
            _ => write!(f, "P({})", self.p),
        }
    }
}

/// Primes of the ring of integers above the rational prime `p`.
pub fn factor_rational_prime(f: &BaseField, p: u64) -> Vec<PrimeIdeal> {
    let pi = p as i128;
    if f.is_rational() {
        return vec![PrimeIdeal { p, root: None, residue_deg: 1, ram_index: 1, ideal: Ideal::rational(f, pi) }];
    }
    let t = f.omega_trace() as i128;
    let n = f.omega_norm() as i128;
    let roots: Vec<i128> = if p == 2 {
        (0..2).filter(|&r| (r * r - t * r + n).rem_euclid(2) == 0).collect()
    } else {
        let disc = t * t - 4 * n;
        match sqrt_mod(disc, pi) {
            None => vec![],
            Some(s) => {
                let inv2 = (pi + 1) / 2;
                let r1 = ((t + s) * inv2).rem_euclid(pi);
                let r2 = ((t - s) * inv2).rem_euclid(pi);
                if r1 == r2 {
                    vec![r1]
                } else {
                    let mut v = vec![r1, r2];
                    v.sort_unstable();
                    v
                }
            }
        }
    };
    let ramified = f.disc() % p as i64 == 0;
    match roots.len() {
        0 => vec![PrimeIdeal { p, root: None, residue_deg: 2, ram_index: 1, ideal: Ideal::rational(f, pi) }],
        1 => {
            debug_assert!(ramified);
            let r = roots[0];
            let ideal = Ideal::from_generators(f, &[(pi, 0), (-r, 1)]);
            vec![PrimeIdeal { p, root: Some(r as i64), residue_deg: 1, ram_index: 2, ideal }]
        }
        _ => roots
            .into_iter()
            .map(|r| PrimeIdeal {
                p,
                root: Some(r as i64),
                residue_deg: 1,
                ram_index: 1,
                ideal: Ideal::from_generators(f, &[(pi, 0), (-r, 1)]),
            })
            .collect(),
    }
}

/// Product of prime powers, kept sorted with distinct primes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FactoredIdeal {
    factors: Vec<(PrimeIdeal, u32)>,
}

impl FactoredIdeal {
    pub fn unit() -> Self {
        FactoredIdeal { factors: vec![] }
    }

    pub fn from_factors(mut v: Vec<(PrimeIdeal, u32)>) -> Self {
        v.retain(|x| x.1 > 0);
        v.sort();
        let mut out: Vec<(PrimeIdeal, u32)> = Vec::with_capacity(v.len());
        for (p, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == p => last.1 += e,
                _ => out.push((p, e)),
            }
        }
        FactoredIdeal { factors: out }
    }

    pub fn prime(p: PrimeIdeal) -> Self {
        FactoredIdeal { factors: vec![(p, 1)] }
    }

    pub fn factors(&self) -> &[(PrimeIdeal, u32)] {
        &self.factors
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn norm(&self) -> u128 {
        self.factors.iter().map(|(p, e)| (p.norm() as u128).pow(*e)).product()
    }

    pub fn exponent(&self, p: &PrimeIdeal) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map_or(0, |x| x.1)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut v = self.factors.clone();
        v.extend(other.factors.iter().cloned());
        Self::from_factors(v)
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::from_factors(self.factors.iter().map(|(p, k)| (*p, k * e)).collect())
    }

    /// `self / d`, assuming `d | self`.
    pub fn div(&self, d: &Self) -> Self {
        let v = self
            .factors
            .iter()
            .map(|(p, e)| {
                let k = d.exponent(p);
                assert!(k <= *e, "not a divisor");
                (*p, e - k)
            })
            .collect();
        Self::from_factors(v)
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.factors.iter().all(|(p, e)| other.exponent(p) >= *e)
    }

    /// Multiply out to a Hermite-basis ideal.
    pub fn to_ideal(&self, f: &BaseField) -> Ideal {
        let mut r = Ideal::unit();
        for (p, e) in &self.factors {
            r = r.mul(f, &p.ideal.pow(f, *e));
        }
        r
    }

    /// All integral divisors, in canonical order.
    pub fn divisors(&self) -> Vec<FactoredIdeal> {
        let mut out = vec![FactoredIdeal::unit()];
        for (p, e) in &self.factors {
            let cur = out.clone();
            for k in 1..=*e {
                for d in &cur {
                    let mut v = d.factors.clone();
                    v.push((*p, k));
                    out.push(FactoredIdeal::from_factors(v));
                }
            }
        }
        out.sort_by_key(|d| (d.norm(), d.clone()));
        out
    }

    pub fn moebius(&self) -> i32 {
        if self.factors.iter().any(|x| x.1 >= 2) {
            0
        } else if self.factors.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Product of the primes dividing this ideal.
    pub fn radical(&self) -> Self {
        Self::from_factors(self.factors.iter().map(|(p, _)| (*p, 1)).collect())
    }

    pub fn label(&self, f: &BaseField) -> String {
        if self.factors.is_empty() {
            return "(1)".into();
        }
        self.factors
            .iter()
            .map(|(p, e)| if *e == 1 { p.label(f) } else { format!("{}^{}", p.label(f), e) })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Factorization of the principal ideal `(x)`.
pub fn factor_principal(f: &BaseField, x: &FieldElement) -> Result<FactoredIdeal, Error> {
    let g = x
        .to_i128_pair()
        .ok_or_else(|| Error::InvalidInput("element is not integral".into()))?;
    factor_principal_int(f, g)
}

pub fn factor_principal_int(f: &BaseField, g: (i128, i128)) -> Result<FactoredIdeal, Error> {
    if g == (0, 0) {
        return Err(Error::InvalidInput("zero has no ideal factorization".into()));
    }
    let n = norm_int(f, g).unsigned_abs();
    let mut v = Vec::new();
    for (p, e) in factorize(n) {
        let primes = factor_rational_prime(f, p);
        if primes.len() == 1 && primes[0].residue_deg == 2 {
            v.push((primes[0], e / 2));
        } else if primes.len() == 1 {
            v.push((primes[0], e));
        } else {
            for q in primes {
                let k = q.valuation(f, g);
                v.push((q, k));
            }
        }
    }
    Ok(FactoredIdeal::from_factors(v))
}

/// Factorization of an arbitrary integral ideal given in Hermite form.
pub fn factor_ideal(f: &BaseField, i: &Ideal) -> FactoredIdeal {
    let mut v = Vec::new();
    let mut rest = *i;
    for (p, _) in factorize(i.norm() as u128) {
        for q in factor_rational_prime(f, p) {
            let mut k = 0;
            while q.ideal.divides(f, &rest) && rest.norm() > 1 {
                rest = rest.div(f, &q.ideal);
                k += 1;
            }
            v.push((q, k));
        }
    }
    debug_assert!(rest.is_unit());
    FactoredIdeal::from_factors(v)
}

/// Every integral ideal of norm at most `bound`, sorted by norm.
pub fn enumerate_ideals(f: &BaseField, bound: u64) -> Vec<FactoredIdeal> {
    let mut primes: Vec<PrimeIdeal> = Vec::new();
    for p in primes_up_to(bound) {
        for q in factor_rational_prime(f, p) {
            if q.norm() <= bound {
                primes.push(q);
            }
        }
    }
    let mut out = Vec::new();
    fn rec(
        primes: &[PrimeIdeal],
        idx: usize,
        cur: &mut Vec<(PrimeIdeal, u32)>,
        norm: u64,
        bound: u64,
        out: &mut Vec<FactoredIdeal>,
    ) {
        out.push(FactoredIdeal::from_factors(cur.clone()));
        for j in idx..primes.len() {
            let q = primes[j];
            let qn = q.norm();
            if norm.saturating_mul(qn) > bound {
                // primes are sorted by rational prime, norms mostly ascending
                if q.residue_deg == 1 {
                    break;
                }
                continue;
            }
            let mut n = norm * qn;
            let mut e = 1;
            while n <= bound {
                cur.push((q, e));
                rec(primes, j + 1, cur, n, bound, out);
                cur.pop();
                e += 1;
                n = match n.checked_mul(qn) {
                    Some(x) => x,
                    None => break,
                };
            }
        }
    }
    rec(&primes, 0, &mut Vec::new(), 1, bound, &mut out);
    out.sort_by_key(|d| (d.norm(), d.clone()));
    out
}

/// Element as coordinate pair, for integral elements.
pub fn coords(x: &FieldElement) -> Option<(i128, i128)> {
    x.to_i128_pair()
}

/// Norm of an element as an integer (for integral elements).
pub fn int_norm(f: &BaseField, x: &FieldElement) -> i128 {
    let n = f.norm(x);
    assert!(n.denom().is_one());
    let v = n.numer().to_i128().unwrap();
    if n.is_negative() {
        debug_assert!(v < 0);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn f10() -> BaseField {
        BaseField::new(10).unwrap()
    }

    #[test]
    fn splitting_in_sqrt10() {
        let f = f10();
        let p2 = factor_rational_prime(&f, 2);
        assert_eq!(p2.len(), 1);
        assert_eq!((p2[0].norm(), p2[0].ram_index), (2, 2));
        let p3 = factor_rational_prime(&f, 3);
        assert_eq!(p3.len(), 2);
        assert!(p3.iter().all(|q| q.norm() == 3));
        let p7 = factor_rational_prime(&f, 7);
        assert_eq!((p7.len(), p7[0].norm()), (1, 49));
    }

    #[test]
    fn prime_products_recover_p() {
        for d in [2, 5, 10, 13, 79] {
            let f = BaseField::new(d).unwrap();
            for p in primes_up_to(100) {
                let ps = factor_rational_prime(&f, p);
                let mut prod = Ideal::unit();
                let mut ef = 0;
                for q in &ps {
                    prod = prod.mul(&f, &q.ideal.pow(&f, q.ram_index as u32));
                    ef += q.ram_index * q.residue_deg;
                }
                assert_eq!(ef, 2);
                assert_eq!(prod, Ideal::rational(&f, p as i128), "D={d} p={p}");
            }
        }
    }

    #[test]
    fn principal_factorizations() {
        let f = f10();
        let two = factor_principal(&f, &FieldElement::from_ints(2, 0)).unwrap();
        assert_eq!(two.factors().len(), 1);
        assert_eq!(two.factors()[0].1, 2);
        let r = factor_principal(&f, &FieldElement::from_ints(0, 1)).unwrap();
        assert_eq!(r.norm(), 10);
        assert_eq!(r.factors().len(), 2);
        assert!(factor_principal(&f, &FieldElement::one()).unwrap().is_unit());
        assert!(factor_principal(&f, &FieldElement::zero()).is_err());
    }

    #[test]
    fn recomposition_matches_principal_ideal() {
        for d in [5, 10, 13] {
            let f = BaseField::new(d).unwrap();
            for a in -7i128..8 {
                for b in -5i128..6 {
                    if (a, b) == (0, 0) {
                        continue;
                    }
                    let fi = factor_principal_int(&f, (a, b)).unwrap();
                    assert_eq!(fi.to_ideal(&f), Ideal::principal_int(&f, (a, b)));
                    assert_eq!(fi.norm() as i128, norm_int(&f, (a, b)).abs());
                    assert_eq!(factor_ideal(&f, &fi.to_ideal(&f)), fi);
                }
            }
        }
    }

    #[test]
    fn divisors_and_moebius() {
        let f = f10();
        let p2 = factor_rational_prime(&f, 2)[0];
        let p3 = factor_rational_prime(&f, 3)[0];
        let a = FactoredIdeal::from_factors(vec![(p2, 2)]);
        assert_eq!(a.divisors().len(), 3);
        assert_eq!(FactoredIdeal::unit().divisors().len(), 1);
        let b = FactoredIdeal::from_factors(vec![(p2, 2), (p3, 1)]);
        assert_eq!(b.divisors().len(), 6);
        assert_eq!(FactoredIdeal::unit().moebius(), 1);
        assert_eq!(FactoredIdeal::prime(p2).moebius(), -1);
        assert_eq!(a.moebius(), 0);
    }

    #[test]
    fn ideal_enumeration() {
        let q = BaseField::rational();
        assert_eq!(enumerate_ideals(&q, 4).len(), 4);
        let f = f10();
        let v = enumerate_ideals(&f, 3);
        assert_eq!(v.iter().map(|i| i.norm()).collect::<Vec<_>>(), vec![1, 2, 3, 3]);
        let v = enumerate_ideals(&f, 9);
        assert!(v.iter().any(|i| i.norm() == 6));
    }

    #[test]
    fn enumeration_counts_match_sublattice_scan() {
        // ideals of norm N are the index-N sublattices closed under omega
        for d in [2, 5, 10] {
            let f = BaseField::new(d).unwrap();
            let ideals = enumerate_ideals(&f, 30);
            for n in 1..=30i128 {
                let mut count = 0;
                for a in 1..=n {
                    if n % a != 0 {
                        continue;
                    }
                    let c = n / a;
                    for b in 0..a {
                        let i = Ideal { a, b, c };
                        let closed = i.basis(&f).into_iter().all(|v| i.contains(mul_int(&f, v, (0, 1))));
                        if closed && a.is_multiple_of(&c) {
                            count += 1;
                        }
                    }
                }
                let listed = ideals.iter().filter(|i| i.norm() as i128 == n).count();
                assert_eq!(listed, count, "D={d} N={n}");
            }
        }
    }

    #[test]
    fn norm_multiplicative() {
        let f = f10();
        let ideals = enumerate_ideals(&f, 40);
        for i in ideals.iter().step_by(3) {
            for j in ideals.iter().step_by(5) {
                let p = i.to_ideal(&f).mul(&f, &j.to_ideal(&f));
                assert_eq!(p.norm() as u128, i.norm() * j.norm());
                assert_eq!(p, i.mul(j).to_ideal(&f));
            }
        }
    }
}
