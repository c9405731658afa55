//! Exact arithmetic in cyclotomic fields.
//!
//! A [`CycRat`] is an element of `Q(zeta_m)` stored in the power basis
//! `1, zeta, ..., zeta^(phi(m)-1)` and reduced modulo the `m`-th cyclotomic
//! polynomial. Orders `m = 2 (mod 4)` are folded into `m/2`, so `m = 2`
//! degenerates to a plain rational with order 1.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn phi_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (low degree first) of the `m`-th cyclotomic polynomial.
pub fn cyclotomic_poly(m: u32) -> Arc<Vec<i64>> {
    if let Some(p) = phi_cache().lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by every Phi_d with d | m, d < m.
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            let div = cyclotomic_poly(d);
            num = poly_exact_div(&num, &div);
        }
    }
    let arc = Arc::new(num);
    phi_cache().lock().unwrap().insert(m, arc.clone());
    arc
}

fn poly_exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    let mut q = vec![0i64; nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd];
        q[k] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[k + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    q
}

/// Euler's totient.
pub fn totient(m: u32) -> u32 {
    let mut n = m;
    let mut r = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            r -= r / p;
        }
        p += 1;
    }
    if n > 1 {
        r -= r / n;
    }
    r
}

fn fold_order(m: u32) -> u32 {
    if m % 4 == 2 {
        m / 2
    } else {
        m
    }
}

/// Reduce a polynomial in `zeta_m` (arbitrary length) modulo `Phi_m`.
fn reduce(m: u32, mut v: Vec<BigRational>) -> Vec<BigRational> {
    let phi = cyclotomic_poly(m);
    let deg = phi.len() - 1;
    if v.len() <= deg {
        v.resize(deg, BigRational::zero());
        return v;
    }
    let nz: Vec<(usize, i64)> = phi[..deg]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i, c))
        .collect();
    for k in (deg..v.len()).rev() {
        if v[k].is_zero() {
            continue;
        }
        let c = std::mem::replace(&mut v[k], BigRational::zero());
        for &(i, pc) in &nz {
            let idx = k - deg + i;
            v[idx] -= &c * BigRational::from_integer(BigInt::from(pc));
        }
    }
    v.truncate(deg);
    v
}

/// Element of the cyclotomic field `Q(zeta_m)`.
#[derive(Clone, Debug)]
pub struct CycRat {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CycRat {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        CycRat { order: 1, coeffs: vec![q] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// `zeta_m^k` with `zeta_m = exp(2 pi i / m)`.
    pub fn root_of_unity(m: u32, k: i64) -> Self {
        assert!(m >= 1);
        let k = k.rem_euclid(m as i64) as usize;
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = BigRational::one();
        Self::from_power_sum(m, v)
    }

    /// Build `sum_k c_k zeta_m^k` from a coefficient vector of any length.
    pub fn from_power_sum(m: u32, coeffs: Vec<BigRational>) -> Self {
        assert!(m >= 1);
        if m % 4 == 2 {
            // zeta_m = -zeta_{m/2}^{(m/2+1)/2}
            let h = m / 2;
            let t = ((h + 1) / 2) as usize;
            let mut w = vec![BigRational::zero(); h as usize];
            for (k, c) in coeffs.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let idx = (k * t) % h as usize;
                if k % 2 == 1 {
                    w[idx] -= c;
                } else {
                    w[idx] += c;
                }
            }
            return Self::from_power_sum(h, w);
        }
        let mut v = coeffs;
        // fold exponents >= m using zeta^m = 1 before dividing by Phi_m
        if v.len() > m as usize {
            let mut w = vec![BigRational::zero(); m as usize];
            for (k, c) in v.into_iter().enumerate() {
                if !c.is_zero() {
                    w[k % m as usize] += c;
                }
            }
            v = w;
        }
        CycRat { order: m, coeffs: reduce(m, v) }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The rational value, if the element lies in `Q`.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-express in `Q(zeta_M)` for a multiple `M` of the current order.
    pub fn lift(&self, big: u32) -> Self {
        let big = fold_order(big);
        assert!(big % self.order == 0, "order {} does not divide {}", self.order, big);
        if big == self.order {
            return self.clone();
        }
        let step = (big / self.order) as usize;
        let mut v = vec![BigRational::zero(); (self.coeffs.len().saturating_sub(1)) * step + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[k * step] = c.clone();
            }
        }
        CycRat { order: big, coeffs: reduce(big, v) }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        if self.order == other.order {
            return (self.clone(), other.clone());
        }
        let l = fold_order(self.order.lcm(&other.order));
        (self.lift(l), other.lift(l))
    }

    /// Drop to order 1 when the value is rational.
    pub fn simplify(self) -> Self {
        if self.order != 1 {
            if let Some(q) = self.to_rational() {
                return Self::from_rational(q);
            }
        }
        self
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        CycRat { order: self.order, coeffs: self.coeffs.iter().map(|c| c * q).collect() }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&BigRational::from_integer(BigInt::from(n)))
    }

    /// Image under `zeta -> zeta^j` (`j` coprime to the order).
    pub fn galois(&self, j: i64) -> Self {
        let m = self.order as i64;
        let j = j.rem_euclid(m.max(1)) as usize;
        let mut v = vec![BigRational::zero(); self.order as usize];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                v[(k * j) % self.order as usize] += c;
            }
        }
        CycRat { order: self.order, coeffs: reduce(self.order, v) }
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Self {
        self.galois(-1)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = CycRat::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Field norm down to `Q`.
    pub fn norm(&self) -> BigRational {
        let mut p = CycRat::one();
        for j in 1..self.order.max(2) as i64 {
            if self.order == 1 {
                break;
            }
            if j.gcd(&(self.order as i64)) == 1 {
                p = &p * &self.galois(j);
            }
        }
        if self.order == 1 {
            return self.coeffs[0].clone();
        }
        p.to_rational().expect("norm is rational")
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        if let Some(q) = self.to_rational() {
            return Self::from_rational(q.recip());
        }
        let mut p = CycRat::one();
        for j in 2..self.order as i64 {
            if j.gcd(&(self.order as i64)) == 1 {
                p = &p * &self.galois(j);
            }
        }
        let n = (&p * self).to_rational().expect("norm is rational");
        p.scale(&n.recip())
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        let mut z = Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let ang = 2.0 * std::f64::consts::PI * (k as f64) / m;
            z += Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), ang);
        }
        z
    }

    /// Coordinates as "p/q" strings (power basis).
    pub fn coord_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_string).collect()
    }
}

/// Render a rational as "p/q" (or "p" when integral).
pub fn rat_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parse "p/q" or "p".
pub fn parse_rat(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        Some(BigRational::from_integer(s.parse().ok()?))
    }
}

impl PartialEq for CycRat {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.coeffs == b.coeffs
    }
}
impl Eq for CycRat {}

impl<'a> Add<&'a CycRat> for &'a CycRat {
    type Output = CycRat;
    fn add(self, rhs: &CycRat) -> CycRat {
        let (a, b) = self.common(rhs);
        CycRat {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }
}

impl<'a> Sub<&'a CycRat> for &'a CycRat {
    type Output = CycRat;
    fn sub(self, rhs: &CycRat) -> CycRat {
        let (a, b) = self.common(rhs);
        CycRat {
            order: a.order,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }
}

impl<'a> Mul<&'a CycRat> for &'a CycRat {
    type Output = CycRat;
    fn mul(self, rhs: &CycRat) -> CycRat {
        if self.order == 1 {
            return rhs.scale(&self.coeffs[0]);
        }
        if rhs.order == 1 {
            return self.scale(&rhs.coeffs[0]);
        }
        let (a, b) = self.common(rhs);
        let n = a.coeffs.len();
        let mut v = vec![BigRational::zero(); 2 * n - 1];
        let bnz: Vec<(usize, &BigRational)> =
            b.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for &(j, y) in &bnz {
                v[i + j] += x * y;
            }
        }
        CycRat { order: a.order, coeffs: reduce(a.order, v) }
    }
}

impl Neg for &CycRat {
    type Output = CycRat;
    fn neg(self) -> CycRat {
        CycRat { order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr<CycRat> for CycRat {
            type Output = CycRat;
            fn $f(self, rhs: CycRat) -> CycRat {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a CycRat> for CycRat {
            type Output = CycRat;
            fn $f(self, rhs: &CycRat) -> CycRat {
                (&self).$f(rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl Neg for CycRat {
    type Output = CycRat;
    fn neg(self) -> CycRat {
        -&self
    }
}

impl fmt::Display for CycRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{}", rat_string(&q));
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            let body = match (k, a.is_one()) {
                (0, _) => rat_string(&a),
                (1, true) => format!("z{}", self.order),
                (1, false) => format!("{}*z{}", rat_string(&a), self.order),
                (_, true) => format!("z{}^{}", self.order, k),
                (_, false) => format!("{}*z{}^{}", rat_string(&a), self.order, k),
            };
            write!(f, "{}{}", s, body)?;
            first = false;
        }
        Ok(())
    }
}

/// Rank of a matrix over a cyclotomic field, by exact Gaussian elimination.
pub fn matrix_rank(rows: &[Vec<CycRat>]) -> usize {
    let mut m: Vec<Vec<CycRat>> = rows.to_vec();
    let nrows = m.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = m[0].len();
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = m[rank][col].inv();
        for r in 0..nrows {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] * &inv;
                for c in col..ncols {
                    let t = &f * &m[rank][c];
                    m[r][c] = &m[r][c] - &t;
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_poly(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_poly(12).len() - 1, 4);
        assert_eq!(totient(36), 12);
    }

    #[test]
    fn roots_of_unity_have_order() {
        for m in [3u32, 4, 5, 8, 12] {
            let z = CycRat::root_of_unity(m, 1);
            assert_eq!(z.pow(m), CycRat::one());
            assert_ne!(z.pow(m - 1), CycRat::one());
        }
        assert_eq!(CycRat::root_of_unity(2, 1), CycRat::from_int(-1));
        assert_eq!(CycRat::root_of_unity(6, 1).order(), 3);
        assert_eq!(CycRat::root_of_unity(6, 3), CycRat::from_int(-1));
    }

    #[test]
    fn lift_and_compare() {
        let i = CycRat::root_of_unity(4, 1);
        let z8 = CycRat::root_of_unity(8, 1);
        assert_eq!(&z8 * &z8, i);
        let sqrt2 = &z8 + &z8.conj();
        assert_eq!(&sqrt2 * &sqrt2, CycRat::from_int(2));
        assert!((sqrt2.to_complex().re - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn inverse_and_norm() {
        let z = CycRat::root_of_unity(5, 1);
        let x = &CycRat::from_int(2) + &z;
        let y = x.inv();
        assert_eq!(&x * &y, CycRat::one());
        assert_eq!(x.norm(), BigRational::from_integer(11.into()));
    }

    #[test]
    fn rank_over_cyclotomic() {
        let i = CycRat::root_of_unity(4, 1);
        let rows = vec![
            vec![CycRat::one(), i.clone()],
            vec![i.clone(), CycRat::from_int(-1)],
        ];
        assert_eq!(matrix_rank(&rows), 1);
        let rows2 = vec![vec![CycRat::one(), i.clone()], vec![CycRat::one(), -&i]];
        assert_eq!(matrix_rank(&rows2), 2);
    }
}
