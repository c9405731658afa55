//! Bernoulli numbers, Bernoulli polynomials and generalized Bernoulli numbers
//! of Kronecker characters.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::{exact_sqrt, kronecker};
use crate::base_field::squarefree_core;

/// `B_0..=B_n` with `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    static CACHE: OnceLock<Mutex<Vec<BigRational>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(|| Mutex::new(vec![BigRational::one()])).lock().unwrap();
    while cache.len() <= n {
        let m = cache.len();
        let mut s = BigRational::zero();
        for (k, b) in cache.iter().enumerate() {
            s += b * BigRational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(k)));
        }
        cache.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
    }
    cache[..=n].to_vec()
}

/// `B_l(x) = sum_k binom(l, k) B_k x^{l-k}`.
pub fn bernoulli_poly(l: usize, x: &BigRational) -> BigRational {
    let b = bernoulli_numbers(l);
    // Horner from the highest power x^l, whose coefficient is binom(l,0) B_0
    let mut acc = BigRational::zero();
    for (k, bk) in b.iter().enumerate() {
        acc = acc * x + bk * BigRational::from_integer(binomial(BigInt::from(l), BigInt::from(k)));
    }
    acc
}

/// Discriminant of `Q(sqrt n)` (1 when `n` is a square) and `f` with `n = disc * f^2`
/// when that quotient is a square integer.
pub fn fundamental_discriminant(n: i64) -> (i64, Option<u64>) {
    assert!(n != 0);
    let core = squarefree_core(n);
    let disc = if core.rem_euclid(4) == 1 { core } else { 4 * core };
    let f = if n % disc == 0 { exact_sqrt((n / disc) as i128).map(|s| s as u64) } else { None };
    (disc, f)
}

/// `B_{r, chi_d} = f^{r-1} sum_{a=1}^{f} chi_d(a) B_r(a/f)` with `f = |d|`; `d = 1` gives `B_r`
/// with the convention `B_1 = +1/2`.
pub fn generalized_bernoulli(r: usize, d: i64) -> BigRational {
    let f = d.unsigned_abs() as i128;
    let fr = BigRational::from_integer(BigInt::from(f));
    let mut s = BigRational::zero();
    for a in 1..=f {
        let c = kronecker(d as i128, a);
        if c == 0 {
            continue;
        }
        let v = bernoulli_poly(r, &BigRational::new(BigInt::from(a), BigInt::from(f)));
        if c > 0 {
            s += v;
        } else {
            s -= v;
        }
    }
    s * num_traits::pow(fr, r - 1)
}

/// `L(1 - r, chi_d) = -B_{r, chi_d} / r` for the Kronecker character of a fundamental
/// discriminant `d` (`d = 1`: Riemann zeta).
pub fn kronecker_l_value(r: usize, d: i64) -> BigRational {
    -generalized_bernoulli(r, d) / BigRational::from_integer(BigInt::from(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn numbers_and_polys() {
        let b = bernoulli_numbers(6);
        assert_eq!(b[1], q(-1, 2));
        assert_eq!(b[2], q(1, 6));
        assert_eq!(b[4], q(-1, 30));
        assert_eq!(b[6], q(1, 42));
        assert_eq!(bernoulli_poly(2, &q(1, 3)), q(1, 9) - q(1, 3) + q(1, 6));
        assert_eq!(bernoulli_poly(1, &q(1, 1)), q(1, 2));
        for l in 2..8 {
            assert_eq!(bernoulli_poly(l, &q(1, 1)), bernoulli_poly(l, &q(0, 1)));
        }
    }

    #[test]
    fn l_values() {
        assert_eq!(kronecker_l_value(2, 1), q(-1, 12));
        assert_eq!(kronecker_l_value(4, 1), q(1, 120));
        assert_eq!(kronecker_l_value(1, 1), q(-1, 2));
        assert_eq!(kronecker_l_value(2, 5), q(-2, 5));
        assert_eq!(kronecker_l_value(1, -4), q(1, 2));
        assert_eq!(kronecker_l_value(1, -3), q(1, 3));
        assert_eq!(kronecker_l_value(3, -4), q(-1, 2));
    }

    #[test]
    fn discriminants() {
        assert_eq!(fundamental_discriminant(5), (5, Some(1)));
        assert_eq!(fundamental_discriminant(-4), (-4, Some(1)));
        assert_eq!(fundamental_discriminant(-3), (-3, Some(1)));
        assert_eq!(fundamental_discriminant(12), (12, Some(1)));
        assert_eq!(fundamental_discriminant(20), (5, Some(2)));
        assert_eq!(fundamental_discriminant(4), (1, Some(2)));
        assert_eq!(fundamental_discriminant(3), (12, None));
    }
}
