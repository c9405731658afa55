//! Local square-class invariants of `xi` and the `mod 4` square test.
//!
//! At a finite place `v` write `xi = pi^{2m} u` (even order) with
//! `u` in `U_r \ U_{r+1}` for the filtration `U_r = o^{x2}(1 + p^{2r})`,
//! `0 <= r <= e`, `e = ord_v(2)`. Then the conductor exponent is
//! `f = m - e + r` and the local symbol is `+1` (split), `-1` (unramified,
//! non-split) or `0` (ramified). Odd order gives `f = m - e` and symbol `0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{factorize, legendre};
use crate::base_field::{BaseField, FieldElement};
use crate::ideal::{factor_principal, factor_rational_prime, FactoredIdeal, Ideal, PrimeIdeal};
use crate::{Error, Result};

/// A finite place with the data used by the local computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalPlaceData {
    pub prime: PrimeIdeal,
    /// Residue field size.
    pub q: u64,
    /// `ord_v(2)`.
    pub e: u32,
    /// `ord_v` of the different.
    pub c: u32,
}

impl LocalPlaceData {
    pub fn new(f: &BaseField, prime: PrimeIdeal) -> Self {
        let e = if prime.p == 2 { prime.ram_index as u32 } else { 0 };
        let dg = f.different_gen().to_i128_pair().unwrap();
        let c = if f.is_rational() { 0 } else { prime.valuation(f, dg) };
        LocalPlaceData { prime, q: prime.norm(), e, c }
    }
}

/// Conductor exponent and local symbol at one place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalInvariant {
    /// `None` encodes `+infinity` (for `xi = 0`).
    pub f: Option<i64>,
    pub chi: i32,
}

/// A prime-to-`p` element of `o` with the square class of `xi / pi^{2m}`.
fn unit_part(f: &BaseField, p: &PrimeIdeal, xi: &FieldElement, m: u32) -> FieldElement {
    if m == 0 {
        return xi.clone();
    }
    let pm = BigRational::from_integer(BigInt::from(p.p).pow(2 * m));
    if f.is_rational() || p.residue_deg == 2 {
        return xi.scale(&pm.recip());
    }
    let pi = uniformizer(f, p);
    let pibar = f.conj(&pi);
    let x = f.mul(xi, &f.pow(&pibar, 2 * m));
    let u = x.scale(&pm.recip());
    debug_assert!(u.is_integral());
    u
}

/// An element of `p \ p^2` prime to the conjugate prime (degree-one primes).
fn uniformizer(f: &BaseField, p: &PrimeIdeal) -> FieldElement {
    let r = p.root.expect("degree-one prime has a root") as i128;
    let pp = p.p as i128;
    let sq = p.ideal.pow(f, 2);
    for cand in [(-r, 1), (-r + pp, 1), (-r - pp, 1)] {
        if !sq.contains(cand) {
            return FieldElement::from_i128(cand.0, cand.1);
        }
    }
    unreachable!("one of the candidates has valuation one")
}

fn coords_mod(x: &FieldElement, modulus: i128) -> (i128, i128) {
    let m = BigInt::from(modulus);
    let a = x.a.numer() * modinv_big(x.a.denom(), &m);
    let b = x.b.numer() * modinv_big(x.b.denom(), &m);
    let red = |v: BigInt| ((v % &m + &m) % &m).to_i128().unwrap();
    (red(a), red(b))
}

fn modinv_big(d: &BigInt, m: &BigInt) -> BigInt {
    let dm = ((d % m) + m) % m;
    let e = num_integer::Integer::extended_gcd(&dm, m);
    assert!(e.gcd.is_one(), "denominator not invertible");
    e.x
}

/// `u` is a square modulo `p^k` (exhaustive over `o / p^k`).
fn is_square_mod_prime_power(f: &BaseField, p: &PrimeIdeal, u: &FieldElement, k: u32) -> bool {
    if k == 0 {
        return true;
    }
    let pk = p.ideal.pow(f, k);
    let (a_, _, c_) = pk.hnf();
    let modulus = (p.p as i128).pow(k);
    let uu = coords_mod(u, modulus);
    for a in 0..a_ {
        for b in 0..c_ {
            let y = crate::ideal::mul_int(f, (a, b), (a, b));
            if pk.contains((uu.0 - y.0, uu.1 - y.1)) {
                return true;
            }
        }
    }
    false
}

/// Quadratic character of a `p`-unit in the residue field at an odd prime.
fn residue_symbol(f: &BaseField, p: &PrimeIdeal, u: &FieldElement) -> i32 {
    let pp = p.p as i128;
    let (a, b) = coords_mod(u, pp);
    if f.is_rational() {
        return legendre(a, pp);
    }
    match p.root {
        Some(r) => legendre(a + b * r as i128, pp),
        None => legendre(crate::ideal::norm_int(f, (a, b)), pp),
    }
}

/// Conductor exponent and local symbol of `xi` at `v`.
pub fn local_invariants(f: &BaseField, v: &LocalPlaceData, xi: &FieldElement) -> Result<LocalInvariant> {
    if xi.is_zero() {
        return Ok(LocalInvariant { f: None, chi: 1 });
    }
    let g = xi
        .to_i128_pair()
        .ok_or_else(|| Error::InvalidInput("element is not integral".into()))?;
    let ord = v.prime.valuation(f, g);
    let e = v.e as i64;
    let m = (ord / 2) as i64;
    if ord % 2 == 1 {
        return Ok(LocalInvariant { f: Some(m - e), chi: 0 });
    }
    let u = unit_part(f, &v.prime, xi, ord / 2);
    if v.e == 0 {
        return Ok(LocalInvariant { f: Some(m), chi: residue_symbol(f, &v.prime, &u) });
    }
    let mut r = 0;
    for k in (1..=v.e).rev() {
        if is_square_mod_prime_power(f, &v.prime, &u, 2 * k) {
            r = k;
            break;
        }
    }
    let chi = if r < v.e {
        0
    } else if is_square_mod_prime_power(f, &v.prime, &u, 2 * v.e + 1) {
        1
    } else {
        -1
    };
    Ok(LocalInvariant { f: Some(m - e + r as i64), chi })
}

/// The factorization `(xi) = F^2 D` with `D` the relative discriminant of `F(sqrt xi)/F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeDiscriminant {
    pub disc: FactoredIdeal,
    /// Positive part of the conductor ideal.
    pub conductor: FactoredIdeal,
    /// False when some local exponent is negative.
    pub integral: bool,
    pub local: Vec<(PrimeIdeal, LocalInvariant)>,
}

impl RelativeDiscriminant {
    pub fn min_exponent(&self) -> i64 {
        self.local.iter().map(|(_, l)| l.f.unwrap()).min().unwrap_or(0)
    }
}

/// Primes dividing `2 xi`.
fn primes_of_2xi(f: &BaseField, xi: &FieldElement) -> Result<Vec<PrimeIdeal>> {
    let fx = factor_principal(f, xi)?;
    let mut ps: Vec<PrimeIdeal> = fx.factors().iter().map(|(p, _)| *p).collect();
    for p in factor_rational_prime(f, 2) {
        if !ps.contains(&p) {
            ps.push(p);
        }
    }
    ps.sort();
    Ok(ps)
}

pub fn relative_discriminant(f: &BaseField, xi: &FieldElement) -> Result<RelativeDiscriminant> {
    let g = xi
        .to_i128_pair()
        .ok_or_else(|| Error::InvalidInput("element is not integral".into()))?;
    let mut disc = Vec::new();
    let mut cond = Vec::new();
    let mut local = Vec::new();
    let mut integral = true;
    for p in primes_of_2xi(f, xi)? {
        let v = LocalPlaceData::new(f, p);
        let li = local_invariants(f, &v, xi)?;
        let fe = li.f.unwrap();
        let ord = p.valuation(f, g) as i64;
        if fe < 0 {
            integral = false;
        } else {
            cond.push((p, fe as u32));
        }
        disc.push((p, (ord - 2 * fe) as u32));
        local.push((p, li));
    }
    Ok(RelativeDiscriminant {
        disc: FactoredIdeal::from_factors(disc),
        conductor: FactoredIdeal::from_factors(cond),
        integral,
        local,
    })
}

/// `xi = y^2 (mod 4)` for some integral `y`, by scanning `y` over `o / 2o`.
pub fn is_square_mod4(f: &BaseField, xi: &FieldElement) -> bool {
    let Some(x) = xi.to_i128_pair() else { return false };
    let bs: &[i128] = if f.is_rational() { &[0] } else { &[0, 1] };
    for a in 0..2 {
        for &b in bs {
            let y = crate::ideal::mul_int(f, (a, b), (a, b));
            if (x.0 - y.0).rem_euclid(4) == 0 && (x.1 - y.1).rem_euclid(4) == 0 {
                return true;
            }
        }
    }
    false
}

/// Local symbol of `xi` at a single prime.
pub fn chi_xi_at_prime(f: &BaseField, xi: &FieldElement, p: &PrimeIdeal) -> Result<i32> {
    if p.p != 2 {
        let g = xi
            .to_i128_pair()
            .ok_or_else(|| Error::InvalidInput("element is not integral".into()))?;
        if !p.ideal.contains(g) {
            return Ok(residue_symbol(f, p, xi));
        }
    }
    let v = LocalPlaceData::new(f, *p);
    Ok(local_invariants(f, &v, xi)?.chi)
}

/// Multiplicative extension of the local symbols to ideals.
pub fn chi_xi_on_ideal(f: &BaseField, xi: &FieldElement, a: &FactoredIdeal) -> Result<i32> {
    if xi.is_zero() {
        return Err(Error::InvalidInput("xi = 0".into()));
    }
    let mut s = 1;
    for (p, e) in a.factors() {
        let c = chi_xi_at_prime(f, xi, p)?;
        s *= c.pow(*e);
        if s == 0 {
            break;
        }
    }
    Ok(s)
}

/// Is `x` a square in the field.
pub fn is_field_square(f: &BaseField, x: &FieldElement) -> bool {
    if x.is_zero() {
        return true;
    }
    if f.is_rational() {
        return rational_is_square(&x.a);
    }
    // x = (s + t sqrt D)^2 requires N(x) to be a rational square
    let n = f.norm(x);
    if !rational_is_square(&n) {
        return false;
    }
    let (xx, _) = f.sqrt_coords(x);
    let sn = rational_sqrt(&n).unwrap();
    // s^2 = (X +- sqrt N(x)) / 2
    for sgn in [1i64, -1] {
        let s2 = (&xx + &sn * BigRational::from_integer(sgn.into())) / BigRational::from_integer(2.into());
        if s2 > BigRational::zero() && rational_is_square(&s2) {
            let s = rational_sqrt(&s2).unwrap();
            let (_, y) = f.sqrt_coords(x);
            let t = &y / (&s * BigRational::from_integer(2.into()));
            let cand = f.from_sqrt_coords(s, t);
            if &f.mul(&cand, &cand) == x {
                return true;
            }
        }
    }
    false
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q < &BigRational::zero() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

fn rational_is_square(q: &BigRational) -> bool {
    rational_sqrt(q).is_some()
}

/// Do `x` and `y` differ by a nonzero square.
pub fn same_square_class(f: &BaseField, x: &FieldElement, y: &FieldElement) -> bool {
    is_field_square(f, &f.mul(x, y))
}

/// All places above the primes dividing `n`.
pub fn places_above(f: &BaseField, n: u64) -> Vec<LocalPlaceData> {
    factorize(n as u128)
        .into_iter()
        .flat_map(|(p, _)| factor_rational_prime(f, p))
        .map(|p| LocalPlaceData::new(f, p))
        .collect()
}

/// Ideal `(xi)` helper used by tests and callers.
pub fn principal_ideal(f: &BaseField, xi: &FieldElement) -> Result<Ideal> {
    Ideal::principal(f, xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn place(f: &BaseField, p: u64) -> LocalPlaceData {
        LocalPlaceData::new(f, factor_rational_prime(f, p)[0])
    }

    fn li(f: &BaseField, p: u64, x: i64) -> (i64, i32) {
        let r = local_invariants(f, &place(f, p), &FieldElement::from_ints(x, 0)).unwrap();
        (r.f.unwrap(), r.chi)
    }

    #[test]
    fn rational_examples() {
        let q = BaseField::rational();
        assert_eq!(li(&q, 2, 12), (0, 0));
        assert_eq!(li(&q, 2, 4), (1, 1));
        assert_eq!(li(&q, 2, 5), (0, -1));
        assert_eq!(li(&q, 3, 18), (1, -1));
        assert_eq!(li(&q, 2, 2), (-1, 0));
        assert_eq!(li(&q, 2, 3), (-1, 0));
        assert_eq!(li(&q, 2, 17), (0, 1));
    }

    #[test]
    fn place_data() {
        let f = BaseField::new(10).unwrap();
        let v = place(&f, 2);
        assert_eq!((v.q, v.e, v.c), (2, 2, 3));
        let v = place(&f, 5);
        assert_eq!((v.q, v.e, v.c), (5, 0, 1));
        let g = BaseField::new(3).unwrap();
        assert_eq!(place(&g, 2).c, 2);
    }

    #[test]
    fn relative_discriminants_over_q() {
        let q = BaseField::rational();
        let r = relative_discriminant(&q, &FieldElement::from_ints(12, 0)).unwrap();
        assert_eq!((r.disc.norm(), r.conductor.norm()), (12, 1));
        let r = relative_discriminant(&q, &FieldElement::from_ints(9, 0)).unwrap();
        assert_eq!((r.disc.norm(), r.conductor.norm()), (1, 3));
        let r = relative_discriminant(&q, &FieldElement::from_ints(40, 0)).unwrap();
        assert_eq!((r.disc.norm(), r.conductor.norm()), (40, 1));
        let r = relative_discriminant(&q, &FieldElement::from_ints(-4, 0)).unwrap();
        assert_eq!((r.disc.norm(), r.conductor.norm()), (4, 1));
    }

    #[test]
    fn fundamental_discriminants_over_q() {
        // D(xi) equals |fundamental discriminant of Q(sqrt xi)|
        let q = BaseField::rational();
        for n in [-20i64, -15, -8, -7, -4, -3, 5, 8, 12, 13, 21, 24, 28, 44, 60] {
            for k in [1i64, 2, 3, 6] {
                let r = relative_discriminant(&q, &FieldElement::from_ints(n * k * k, 0)).unwrap();
                assert_eq!(r.disc.norm() as i64, n.abs(), "n={n} k={k}");
                assert_eq!(r.conductor.norm() as i64, k);
            }
        }
    }

    #[test]
    fn square_mod4() {
        let q = BaseField::rational();
        let t = |f: &BaseField, a, b| is_square_mod4(f, &FieldElement::from_ints(a, b));
        assert!(t(&q, 5, 0));
        assert!(!t(&q, 2, 0));
        assert!(!t(&q, 3, 0));
        let f = BaseField::new(10).unwrap();
        assert!(t(&f, 2, 0));
        assert!(!t(&f, 3, 0));
    }

    #[test]
    fn chi_on_ideals() {
        let q = BaseField::rational();
        let two = FactoredIdeal::prime(factor_rational_prime(&q, 2)[0]);
        assert_eq!(chi_xi_on_ideal(&q, &FieldElement::from_ints(5, 0), &two).unwrap(), -1);
        assert_eq!(chi_xi_on_ideal(&q, &FieldElement::from_ints(12, 0), &two).unwrap(), 0);
        let f = BaseField::new(10).unwrap();
        for p in [2u64, 3, 5, 7, 11, 13] {
            for pr in factor_rational_prime(&f, p) {
                let a = FactoredIdeal::prime(pr);
                assert_eq!(chi_xi_on_ideal(&f, &FieldElement::from_ints(4, 0), &a).unwrap(), 1);
            }
        }
    }

    #[test]
    fn field_squares() {
        let f = BaseField::new(10).unwrap();
        assert!(is_field_square(&f, &FieldElement::from_ints(19, 6)));
        assert!(!is_field_square(&f, &FieldElement::from_ints(3, 1)));
        assert!(is_field_square(&f, &FieldElement::from_ints(4, 0)));
        assert!(!is_field_square(&f, &FieldElement::from_ints(10, 0)));
        let g = BaseField::new(5).unwrap();
        let w = FieldElement::from_ints(0, 1);
        assert!(is_field_square(&g, &g.mul(&w, &w)));
    }
}

#[cfg(test)]
mod equivalence {
    use super::*;

    #[test]
    fn mod4_square_iff_integral_conductor() {
        for d in [0, 2, 5, 10, 13] {
            let f = BaseField::new(d).unwrap();
            for xi in f.enumerate_totally_positive(20).into_iter().skip(1) {
                let r = relative_discriminant(&f, &xi).unwrap();
                assert_eq!(is_square_mod4(&f, &xi), r.min_exponent() >= 0, "D={d} xi={xi}");
                let prod = r.conductor.pow(2).mul(&r.disc);
                if r.integral {
                    assert_eq!(prod, factor_principal(&f, &xi).unwrap());
                }
            }
        }
    }
}
