//! Finite-sum verification of the local harmonic analysis over `Q_p`.
//!
//! Everything is exact: additive characters take values in `Q(zeta_{p^k})`, square roots
//! of `p` are written as quadratic Gauss sums, and every p-adic integral of a locally
//! constant function is a finite sum over a residue ring. The additive character is
//! `psi(x) = exp(-2 pi i {x}_p)`, trivial on `Z_p` and nontrivial on `p^{-1} Z_p`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime, legendre, mod_inv};
use crate::cyclo::CycRat;
use crate::{Error, Result};

mod metaplectic;
mod suite;
mod whittaker;

pub use suite::{run_local_suite, Check};

pub use metaplectic::{
    convolution_check, ek_closed_c_unit, ek_closed_lower, ek_closed_lower_first_form, ek_weil, epsilon_even,
    kubota_cocycle, ConvolutionReport, Mat2, Meta,
};
pub use whittaker::{
    constant_integral, f_plus_w1u, local_f_chi, psi_exact, stratum_integral, whittaker_vs_psi, WhittakerComparison,
};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `p`-adic valuation of a nonzero rational.
pub fn ord(p: u64, x: &BigRational) -> i64 {
    assert!(!x.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let mut k = 0i64;
        while (&n % &pb).is_zero() {
            n /= &pb;
            k += 1;
        }
        k
    };
    count(x.numer()) - count(x.denom())
}

/// `x = p^v u` with `u` a unit.
pub fn split(p: u64, x: &BigRational) -> (i64, BigRational) {
    let v = ord(p, x);
    (v, x * pow_p(p, -v))
}

/// `p^k` as a rational (any sign of `k`).
pub fn pow_p(p: u64, k: i64) -> BigRational {
    let m = num_traits::pow(BigInt::from(p), k.unsigned_abs() as usize);
    if k >= 0 {
        BigRational::from_integer(m)
    } else {
        BigRational::new(BigInt::one(), m)
    }
}

/// Residue of `x in Z_(p)` modulo `p^k`.
pub fn residue(p: u64, x: &BigRational, k: u32) -> i128 {
    let m = (p as i128).pow(k);
    if m == 1 {
        return 0;
    }
    let mb = BigInt::from(m);
    let n = x.numer().mod_floor(&mb).to_i128().unwrap();
    let d = x.denom().mod_floor(&mb).to_i128().unwrap();
    let di = mod_inv(d, m).expect("denominator prime to p");
    n * di % m
}

/// `{x}_p = r / p^k` with `0 <= r < p^k`.
pub fn fractional_part(p: u64, x: &BigRational) -> (u32, i128) {
    if x.is_zero() {
        return (0, 0);
    }
    let v = ord(p, x);
    if v >= 0 {
        return (0, 0);
    }
    let k = (-v) as u32;
    (k, residue(p, &(x * pow_p(p, k as i64)), k))
}

/// Sums of roots of unity of order `p^k` with integer multiplicities.
#[derive(Clone, Debug)]
pub(crate) struct RootCounter {
    p: u64,
    k: u32,
    counts: Vec<i64>,
}

impl RootCounter {
    pub(crate) fn new(p: u64, k: u32) -> Self {
        RootCounter { p, k, counts: vec![0; (p as usize).pow(k)] }
    }

    /// Add `mult * zeta_{p^j}^e`, `j <= k`.
    pub(crate) fn add(&mut self, j: u32, e: i128, mult: i64) {
        assert!(j <= self.k, "root of unity of order p^{j} beyond p^{}", self.k);
        let m = self.counts.len() as i128;
        let step = (self.p as i128).pow(self.k - j);
        let idx = (e * step).rem_euclid(m);
        self.counts[idx as usize] += mult;
    }

    pub(crate) fn finish(self, scale: &BigRational) -> CycRat {
        let m = self.counts.len() as u32;
        let coeffs = self.counts.iter().map(|&c| BigRational::from_integer(BigInt::from(c)) * scale).collect();
        CycRat::from_power_sum(m, coeffs).simplify()
    }
}

/// `psi(x)` as an exact root of unity.
pub fn psi(p: u64, x: &BigRational) -> CycRat {
    let (k, r) = fractional_part(p, x);
    CycRat::root_of_unity((p as u32).pow(k), -(r as i64))
}

/// Exact `sqrt(p)` in a cyclotomic field.
pub fn sqrt_p(p: u64) -> CycRat {
    if p == 2 {
        return &CycRat::root_of_unity(8, 1) + &CycRat::root_of_unity(8, -1);
    }
    let mut g = CycRat::zero();
    for t in 1..p as i64 {
        let z = CycRat::root_of_unity(p as u32, t);
        g = if legendre(t as i128, p as i128) == 1 { &g + &z } else { &g - &z };
    }
    if p % 4 == 1 {
        g
    } else {
        &g * &CycRat::root_of_unity(4, -1)
    }
}

/// Local data for `Q_p` with the unramified character above.
#[derive(Clone, Debug)]
pub struct PadicContext {
    pub p: u64,
    /// `ord_p(2)`.
    pub e: u32,
    sqrt_p: CycRat,
    /// Weil constants on square classes, keyed by `(ord mod 2, unit residue mod p^{1+2e})`.
    alpha: HashMap<(i64, i128), CycRat>,
}

impl PadicContext {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let e = u32::from(p == 2);
        let mut ctx = PadicContext { p, e, sqrt_p: sqrt_p(p), alpha: HashMap::new() };
        let m = ctx.unit_modulus();
        for v in 0..2 {
            for r in 1..m {
                if r % p as i128 != 0 {
                    let a = pow_p(p, v) * int(r as i64);
                    let val = ctx.weil_constant_direct(&a);
                    ctx.alpha.insert((v, r), val);
                }
            }
        }
        Ok(ctx)
    }

    pub fn q(&self) -> i64 {
        self.p as i64
    }

    /// Units are squares iff they are `1` modulo this.
    pub fn unit_modulus(&self) -> i128 {
        (self.p as i128).pow(1 + 2 * self.e)
    }

    /// `p^{j/2}` exactly.
    pub fn sqrt_p_pow(&self, j: i64) -> CycRat {
        let base = CycRat::from_rational(pow_p(self.p, j.div_euclid(2)));
        if j.rem_euclid(2) == 0 {
            base
        } else {
            &base * &self.sqrt_p
        }
    }

    /// `|x|^{1/2}`.
    pub fn abs_sqrt(&self, x: &BigRational) -> CycRat {
        self.sqrt_p_pow(-ord(self.p, x))
    }

    pub fn psi(&self, x: &BigRational) -> CycRat {
        psi(self.p, x)
    }

    /// `int_{Z_p} psi(a t^2) dt` (conjugated integrand if `conj`).
    pub fn gauss_integral(&self, a: &BigRational, conj: bool) -> CycRat {
        self.gauss_integral_at(a, conj, 0)
    }

    /// The same integral truncated at `p^{M + extra}` instead of the minimal level `p^M`.
    pub fn gauss_integral_at(&self, a: &BigRational, conj: bool, extra: u32) -> CycRat {
        if a.is_zero() || ord(self.p, a) >= 0 {
            return CycRat::one();
        }
        let k = (-ord(self.p, a)) as u32;
        let lvl = k + extra;
        let m = (self.p as i128).pow(lvl);
        let au = residue(self.p, &(a * pow_p(self.p, k as i64)), k);
        let mut acc = RootCounter::new(self.p, k);
        for t in 0..m {
            let r = au * (t * t % m) % (self.p as i128).pow(k);
            acc.add(k, if conj { r } else { -r }, 1);
        }
        acc.finish(&pow_p(self.p, -(lvl as i64)))
    }

    /// `alpha_psi(a) = |2a|^{-1/2} int_{Z_p} psi(t^2 / 4a) dt` after moving `a` into
    /// `Z_p` by an even power of `p`.
    pub fn weil_constant_direct(&self, a: &BigRational) -> CycRat {
        let (v, u) = split(self.p, a);
        let a1 = &u * pow_p(self.p, v.rem_euclid(2));
        let g = self.gauss_integral(&(int(4) * &a1).recip(), false);
        &self.sqrt_p_pow(ord(self.p, &(int(2) * &a1))) * &g
    }

    /// Weil constant from the square-class table.
    pub fn weil_constant(&self, a: &BigRational) -> CycRat {
        let (v, u) = split(self.p, a);
        let r = residue(self.p, &u, 1 + 2 * self.e);
        self.alpha[&(v.rem_euclid(2), r)].clone()
    }

    /// `(int_{Z_p^x} alpha(t) dt, int_{Z_p^x} alpha(p t) dt)`, sampling units modulo
    /// `p^{1 + 2e + extra}`.
    pub fn unit_integrals_at(&self, extra: u32) -> (CycRat, CycRat) {
        let k = 1 + 2 * self.e + extra;
        let m = (self.p as i64).pow(k);
        let (mut a, mut b) = (CycRat::zero(), CycRat::zero());
        for u in 1..m {
            if u % self.p as i64 != 0 {
                a = &a + &self.weil_constant_direct(&int(u));
                b = &b + &self.weil_constant_direct(&int(u * self.p as i64));
            }
        }
        let w = pow_p(self.p, -(k as i64));
        (a.scale(&w), b.scale(&w))
    }

    pub fn unit_integrals(&self) -> (CycRat, CycRat) {
        self.unit_integrals_at(0)
    }

    pub fn hilbert(&self, a: &BigRational, b: &BigRational) -> i32 {
        hilbert_symbol(self.p, a, b)
    }
}

/// Hilbert symbol `<a, b>_p` by the valuation/residue formula.
pub fn hilbert_symbol(p: u64, a: &BigRational, b: &BigRational) -> i32 {
    let (al, u) = split(p, a);
    let (be, v) = split(p, b);
    if p == 2 {
        let u8 = residue(2, &u, 3);
        let v8 = residue(2, &v, 3);
        let eps = |x: i128| ((x - 1) / 2) % 2;
        let omega = |x: i128| ((x * x - 1) / 8) % 2;
        let s = eps(u8) * eps(v8) + (al as i128) * omega(v8) + (be as i128) * omega(u8);
        return if s.rem_euclid(2) == 0 { 1 } else { -1 };
    }
    let pi = p as i128;
    let lu = legendre(residue(p, &u, 1), pi);
    let lv = legendre(residue(p, &v, 1), pi);
    let mut s = 1;
    if (al * be).rem_euclid(2) == 1 && (pi - 1) / 2 % 2 == 1 {
        s = -s;
    }
    if be.rem_euclid(2) == 1 {
        s *= lu;
    }
    if al.rem_euclid(2) == 1 {
        s *= lv;
    }
    s
}

/// Is `z^2 = a x^2 + b y^2` solvable nontrivially, decided by a primitive search
/// modulo `p^6` (`p = 2`) or `p^3` after reducing `a, b` modulo squares.
pub fn conic_solvable(p: u64, a: &BigRational, b: &BigRational) -> bool {
    let e = u32::from(p == 2);
    let reduce = |x: &BigRational| {
        let (v, u) = split(p, x);
        (p as i128).pow(v.rem_euclid(2) as u32) * residue(p, &u, 1 + 2 * e)
    };
    let (ra, rb) = (reduce(a), reduce(b));
    let n = if p == 2 { 6 } else { 3 };
    let m = (p as i128).pow(n);
    let pi = p as i128;
    for x in 0..m {
        for y in 0..m {
            let rhs = (ra * x % m * x + rb * y % m * y) % m;
            for z in 0..m {
                if x % pi == 0 && y % pi == 0 && z % pi == 0 {
                    continue;
                }
                if z * z % m == rhs {
                    return true;
                }
            }
        }
    }
    false
}
