//! Cone decomposition of a totally positive lattice modulo the totally positive
//! unit group, and the values at non-positive integers of the resulting
//! two-dimensional cone zeta functions.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::bernoulli::bernoulli_poly;
use crate::base_field::{BaseField, FieldElement};
use crate::ideal::Ideal;
use crate::{Error, Result};

fn rat(n: i128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: usize) -> BigRational {
    (1..=n).fold(BigRational::one(), |acc, k| acc * rat(k as i128))
}

/// Determinant of two elements in `(1, omega)` coordinates.
fn det(x: &FieldElement, y: &FieldElement) -> BigRational {
    &x.a * &y.b - &x.b * &y.a
}

/// Totally positive basis `(A, B + C omega + t A)` of a lattice in Hermite form.
fn tp_basis(f: &BaseField, m: &Ideal) -> (FieldElement, FieldElement) {
    let (a, b, c) = m.hnf();
    let g1 = FieldElement::from_i128(a, 0);
    let mut t = 0;
    loop {
        let g2 = FieldElement::from_i128(b + t * a, c);
        if f.is_totally_positive(&g2) {
            return (g1, g2);
        }
        t += 1;
    }
}

/// `v0` has larger slope `iota_2 / iota_1` than `v1`.
fn steeper(f: &BaseField, v0: &FieldElement, v1: &FieldElement) -> bool {
    let w = f.mul(v1, &f.conj(v0));
    f.sqrt_coords(&w).1 > BigRational::zero()
}

/// Consecutive generators `(v_t, v_{t+1})` of unimodular cones for the lattice `m`, covering
/// the totally positive quadrant modulo the totally positive unit exactly once when each
/// cone keeps its first ray and drops its second.
pub fn cones(f: &BaseField, m: &Ideal) -> Result<Vec<(FieldElement, FieldElement)>> {
    let (mut v0, mut v1) = tp_basis(f, m);
    if !steeper(f, &v0, &v1) {
        std::mem::swap(&mut v0, &mut v1);
    }
    let eps_inv = f.inv(f.tp_unit());
    let mut seq = vec![v0.clone(), v1.clone()];
    let mut seen: HashMap<FieldElement, usize> = HashMap::from([(v0, 0), (v1, 1)]);
    while seq.len() < 100_000 {
        let (a, b) = (&seq[seq.len() - 2], &seq[seq.len() - 1]);
        let mut k = 1i64;
        let next = loop {
            let c = &b.scale_int(k) - a;
            if f.is_totally_positive(&c) {
                break c;
            }
            k += 1;
        };
        let back = f.mul(&next, &eps_inv);
        seq.push(next.clone());
        if let Some(&i) = seen.get(&back) {
            let j = seq.len() - 1;
            return Ok((i..j).map(|t| (seq[t].clone(), seq[t + 1].clone())).collect());
        }
        seen.insert(next, seq.len() - 1);
    }
    Err(Error::Computation("cone decomposition did not close up".into()))
}

/// Coefficients `0..=n` of `(a + b u)^e` for `e >= -1`.
fn binomial_series(f: &BaseField, a: &FieldElement, b: &FieldElement, e: i64, n: usize) -> Vec<FieldElement> {
    if e < 0 {
        let ai = f.inv(a);
        let r = f.mul(b, &ai).scale_int(-1);
        let mut cur = ai;
        let mut out = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            out.push(cur.clone());
            cur = f.mul(&cur, &r);
        }
        return out;
    }
    let e = e as usize;
    (0..=n)
        .map(|j| {
            if j > e {
                FieldElement::zero()
            } else {
                let c = BigRational::from_integer(binomial(BigInt::from(e), BigInt::from(j)));
                f.mul(&f.pow(a, (e - j) as u32), &f.pow(b, j as u32)).scale(&c)
            }
        })
        .collect()
}

/// Per-cone coefficients `T_l` such that the cone zeta value at `s = 1 - m` in box coordinates
/// `(x1, x2)` is `sum_l T_l B_l(x1) B_{2m-l}(x2)`.
pub fn cone_coefficients(f: &BaseField, m: u32, v1: &FieldElement, v2: &FieldElement) -> Vec<BigRational> {
    let m = m as usize;
    let (c1, c2) = (f.conj(v1), f.conj(v2));
    let pre = {
        let fm = factorial(m - 1);
        &fm * &fm / rat(2)
    };
    (0..=2 * m)
        .map(|l1| {
            let l2 = 2 * m - l1;
            let s1 = binomial_series(f, v1, &c1, l1 as i64 - 1, m - 1);
            let s2 = binomial_series(f, v2, &c2, l2 as i64 - 1, m - 1);
            let mut c = FieldElement::zero();
            for i in 0..m {
                c = &c + &f.mul(&s1[i], &s2[m - 1 - i]);
            }
            f.trace(&c) * &pre / (factorial(l1) * factorial(l2))
        })
        .collect()
}

/// Evaluate the cone value at a box point.
pub fn cone_value(coeffs: &[BigRational], x1: &BigRational, x2: &BigRational) -> BigRational {
    let n = coeffs.len() - 1;
    let b1: Vec<BigRational> = (0..=n).map(|l| bernoulli_poly(l, x1)).collect();
    let b2: Vec<BigRational> = (0..=n).map(|l| bernoulli_poly(l, x2)).collect();
    let mut s = BigRational::zero();
    for (l, t) in coeffs.iter().enumerate() {
        if !t.is_zero() {
            s += t * &b1[l] * &b2[n - l];
        }
    }
    s
}

/// Representatives `i e1 + j e2` of `lattice / sub` for Hermite-form lattices `sub` inside
/// `lattice`.
pub fn residues(lattice: &Ideal, sub: &Ideal) -> Vec<FieldElement> {
    let (a, b, c) = lattice.hnf();
    let (a2, _, c2) = sub.hnf();
    let (ni, nj) = (a2 / a, c2 / c);
    let mut out = Vec::with_capacity((ni * nj) as usize);
    for j in 0..nj {
        for i in 0..ni {
            out.push(FieldElement::from_i128(i * a + j * b, j * c));
        }
    }
    out
}

/// Translate `r` into the half-open box `{x1 v1 + x2 v2 : 0 < x1 <= 1, 0 <= x2 < 1}`.
pub fn box_point(
    r: &FieldElement,
    v1: &FieldElement,
    v2: &FieldElement,
) -> (BigRational, BigRational, FieldElement) {
    let d = det(v1, v2);
    let x1 = det(r, v2) / &d;
    let x2 = det(v1, r) / &d;
    let x1 = &x1 - x1.ceil() + BigRational::one();
    let x2 = &x2 - x2.floor();
    let mu = &v1.scale(&x1) + &v2.scale(&x2);
    (x1, x2, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Value of the cones of the lattice itself with trivial weight.
    fn lattice_zeta(f: &BaseField, lat: &Ideal, m: u32) -> BigRational {
        let mut s = BigRational::zero();
        for (v1, v2) in cones(f, lat).unwrap() {
            let t = cone_coefficients(f, m, &v1, &v2);
            s += cone_value(&t, &q(1, 1), &q(0, 1));
        }
        s / num_traits::pow(rat(lat.norm()), m as usize - 1)
    }

    #[test]
    fn dedekind_zeta_of_class_number_one_fields() {
        let f5 = BaseField::new(5).unwrap();
        assert_eq!(lattice_zeta(&f5, &Ideal::unit(), 2), q(1, 30));
        assert_eq!(lattice_zeta(&f5, &Ideal::unit(), 1), q(0, 1));
        let f2 = BaseField::new(2).unwrap();
        assert_eq!(lattice_zeta(&f2, &Ideal::unit(), 2), q(1, 12));
        let f13 = BaseField::new(13).unwrap();
        assert_eq!(lattice_zeta(&f13, &Ideal::unit(), 2), q(1, 6));
    }

    #[test]
    fn unit_of_norm_plus_one_needs_two_lattices() {
        let f = BaseField::new(3).unwrap();
        let sqrt3 = Ideal::principal(&f, &f.sqrt_d()).unwrap();
        let z = lattice_zeta(&f, &Ideal::unit(), 2) + lattice_zeta(&f, &sqrt3, 2);
        assert_eq!(z, q(1, 6));
    }

    #[test]
    fn partial_zetas_of_q_sqrt10() {
        let f = BaseField::new(10).unwrap();
        let p2 = Ideal::from_generators(&f, &[(2, 0), (0, 1)]);
        assert_eq!(lattice_zeta(&f, &Ideal::unit(), 2), q(47, 60));
        assert_eq!(lattice_zeta(&f, &p2, 2), q(23, 60));
        assert_eq!(lattice_zeta(&f, &Ideal::unit(), 4) + lattice_zeta(&f, &p2, 4), q(1577, 60));
    }

    #[test]
    fn box_and_residues() {
        let f = BaseField::new(10).unwrap();
        let lat = Ideal::unit();
        let sub = Ideal::rational(&f, 3);
        let rs = residues(&lat, &sub);
        assert_eq!(rs.len(), 9);
        let (v1, v2) = cones(&f, &sub).unwrap()[0].clone();
        for r in &rs {
            let (x1, x2, mu) = box_point(r, &v1, &v2);
            assert!(x1 > q(0, 1) && x1 <= q(1, 1) && x2 >= q(0, 1) && x2 < q(1, 1));
            assert!(f.is_totally_positive(&mu));
            assert!(sub.contains_elem(&(&mu - r)));
        }
    }
}
