//! Elementary integer number theory on machine integers.

/// Modular exponentiation `b^e mod m`.
pub fn mod_pow(b: i128, mut e: u128, m: i128) -> i128 {
    let mut r = 1i128.rem_euclid(m);
    let mut b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Extended gcd: `(g, s, t)` with `s a + t b = g >= 0`.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

pub fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` when it exists.
pub fn mod_inv(a: i128, m: i128) -> Option<i128> {
    let (g, s, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| s.rem_euclid(m))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a as i128, d as u128, n as i128);
        if x == 1 || x == n as i128 - 1 {
            continue;
        }
        for _ in 1..s {
            x = x * x % n as i128;
            if x == n as i128 - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes up to `n` inclusive.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return vec![];
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
}

/// Prime factorization of `|n|` by trial division, primes ascending.
pub fn factorize(n: u128) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p: u128 = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p as u64, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n as u64, 1));
    }
    out
}

/// Legendre symbol `(a/p)` for an odd prime `p`.
pub fn legendre(a: i128, p: i128) -> i32 {
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    if mod_pow(a, ((p - 1) / 2) as u128, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(a/n)` for `n >= 1`.
pub fn kronecker(a: i128, n: i128) -> i32 {
    assert!(n >= 1);
    let mut res = 1;
    for (p, e) in factorize(n as u128) {
        let s = if p == 2 {
            if a % 2 == 0 {
                0
            } else if a.rem_euclid(8) == 1 || a.rem_euclid(8) == 7 {
                1
            } else {
                -1
            }
        } else {
            legendre(a, p as i128)
        };
        if e % 2 == 1 {
            res *= s;
        } else if s == 0 {
            res = 0;
        }
    }
    res
}

/// A square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod(a: i128, p: i128) -> Option<i128> {
    let a = a.rem_euclid(p);
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a, p) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while legendre(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q as u128, p);
    let mut t = mod_pow(a, q as u128, p);
    let mut r = mod_pow(a, ((q + 1) / 2) as u128, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = t2 * t2 % p;
            i += 1;
        }
        let b = mod_pow(c, 1u128 << (m - i - 1), p);
        m = i;
        c = b * b % p;
        t = t * c % p;
        r = r * b % p;
    }
    Some(r)
}

/// Integer square root if `n` is a perfect square.
pub fn exact_sqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    (r * r == n).then_some(r)
}

/// Moebius function of a positive integer.
pub fn moebius_int(n: u64) -> i32 {
    let f = factorize(n as u128);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Positive divisors of `n`, ascending.
pub fn divisors_int(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n as u128) {
        let cur = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(cur.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(mod_pow(3, 4, 7), 4);
        assert_eq!(ext_gcd(12, 18).0, 6);
        assert_eq!(mod_inv(3, 7), Some(5));
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001));
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors_int(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(moebius_int(30), -1);
        assert_eq!(moebius_int(12), 0);
    }

    #[test]
    fn symbols() {
        assert_eq!(legendre(2, 7), 1);
        assert_eq!(legendre(3, 7), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(12, 2), 0);
        assert_eq!(kronecker(-4, 3), -1);
        for p in [3i128, 5, 13, 17, 41, 97] {
            for a in 1..p {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(r * r % p, a);
                }
            }
        }
    }
}
