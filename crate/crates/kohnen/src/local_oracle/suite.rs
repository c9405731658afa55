//! The local verification suite as a list of named checks.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use super::metaplectic::{
    convolution_check, ek_closed_c_unit, ek_closed_lower, ek_closed_lower_first_form, ek_weil, epsilon_even,
    lift_residue_matrix, Mat2, Meta,
};
use super::whittaker::{constant_integral, stratum_integral, whittaker_vs_psi};
use super::{conic_solvable, hilbert_symbol, int, pow_p, rat, residue, split, PadicContext};
use crate::cyclo::CycRat;

/// One named verification with its outcome.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, failures: Vec<String>, count: usize) -> Self {
        let passed = failures.is_empty() && count > 0;
        let detail = if passed {
            format!("{count} cases")
        } else if count == 0 {
            "no cases".into()
        } else {
            format!("{} of {count} failed; first: {}", failures.len(), failures[0])
        };
        Check { name: name.into(), passed, detail }
    }
}

const PRIMES: [u64; 3] = [2, 3, 5];

fn random_rational(rng: &mut StdRng) -> BigRational {
    loop {
        let n: i64 = rng.gen_range(-400..=400);
        let d: i64 = rng.gen_range(1..=60);
        if n != 0 {
            return rat(n, d);
        }
    }
}

fn hilbert_vs_conics() -> Check {
    let mut fails = Vec::new();
    let mut count = 0;
    for p in PRIMES {
        let e = u32::from(p == 2);
        let class = |x: i64| {
            let (v, u) = split(p, &int(x));
            (v.rem_euclid(2), residue(p, &u, 1 + 2 * e))
        };
        let mut cache: HashMap<((i64, i128), (i64, i128)), bool> = HashMap::new();
        for a in -50..=50i64 {
            for b in -50..=50i64 {
                if a == 0 || b == 0 {
                    continue;
                }
                count += 1;
                let solvable = *cache
                    .entry((class(a), class(b)))
                    .or_insert_with(|| conic_solvable(p, &int(a), &int(b)));
                let h = hilbert_symbol(p, &int(a), &int(b));
                if (h == 1) != solvable {
                    fails.push(format!("p={p} a={a} b={b}"));
                }
            }
        }
    }
    Check::new("Hilbert symbol agrees with conic solvability, |a|,|b| <= 50", fails, count)
}

fn hilbert_algebra(seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut fails = Vec::new();
    let mut count = 0;
    for p in PRIMES {
        for _ in 0..50 {
            let (a, b, c) = (random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng));
            count += 1;
            let h = |x: &BigRational, y: &BigRational| hilbert_symbol(p, x, y);
            if h(&a, &b) != h(&b, &a) || h(&(&a * &b), &c) != h(&a, &c) * h(&b, &c) || h(&a, &(-&a)) != 1 {
                fails.push(format!("p={p} a={a} b={b} c={c}"));
            }
        }
    }
    Check::new("Hilbert symbol is symmetric and bimultiplicative", fails, count)
}

fn weil_constant_properties(seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut fails = Vec::new();
    let mut count = 0;
    for p in PRIMES {
        let ctx = PadicContext::new(p).expect("prime");
        for _ in 0..50 {
            let a = random_rational(&mut rng);
            let b = random_rational(&mut rng);
            count += 1;
            let al = ctx.weil_constant_direct(&a);
            let ok = al.pow(8) == CycRat::one()
                && al.norm().is_one()
                && (&al * &al.conj()) == CycRat::one()
                && ctx.weil_constant_direct(&(&a * &b * &b)) == al
                && ctx.weil_constant_direct(&(-&a)) == al.conj()
                && ctx.weil_constant(&a) == al;
            if !ok {
                fails.push(format!("p={p} a={a}"));
            }
        }
    }
    Check::new("Weil constant: eighth root of unity, square classes, conjugation", fails, count)
}

fn weil_constant_hilbert(seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut fails = Vec::new();
    let mut count = 0;
    for p in PRIMES {
        let ctx = PadicContext::new(p).expect("prime");
        let one = ctx.weil_constant_direct(&int(1));
        for _ in 0..50 {
            let (a, b) = (random_rational(&mut rng), random_rational(&mut rng));
            count += 1;
            let lhs = &ctx.weil_constant_direct(&a) * &ctx.weil_constant_direct(&b);
            let rhs = (&one * &ctx.weil_constant_direct(&(&a * &b))).scale_int(ctx.hilbert(&a, &b) as i64);
            if lhs != rhs {
                fails.push(format!("p={p} a={a} b={b}"));
            }
        }
    }
    Check::new("Weil constant ratio equals the Hilbert symbol", fails, count)
}

fn unit_integrals() -> Check {
    let mut fails = Vec::new();
    for p in PRIMES {
        let ctx = PadicContext::new(p).expect("prime");
        let (a, b) = ctx.unit_integrals();
        let want = ctx.sqrt_p_pow(-(ctx.e as i64)).scale(&(BigRational::one() - pow_p(p, -1)));
        if a != want || !b.is_zero() || ctx.unit_integrals_at(1) != (a.clone(), b.clone()) {
            fails.push(format!("p={p}: got ({a}, {b})"));
        }
    }
    Check::new("unit integrals of the Weil constant", fails, PRIMES.len())
}

fn ek_closed_forms(seed: u64) -> Check {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut fails = Vec::new();
    let mut count = 0;
    for p in PRIMES {
        let ctx = PadicContext::new(p).expect("prime");
        let qe = CycRat::from_int((p as i64).pow(ctx.e));
        count += 1;
        if ek_weil(&ctx, &Meta::section(Mat2::identity())) != qe {
            fails.push(format!("p={p}: identity"));
        }
        for _ in 0..30 {
            // lower unipotents of every small valuation
            let v = rng.gen_range(0..6u32);
            let u: i64 = loop {
                let u = rng.gen_range(-200..200);
                if u % p as i64 != 0 {
                    break u;
                }
            };
            let d: i64 = loop {
                let d = rng.gen_range(1..50);
                if d % p as i64 != 0 {
                    break d;
                }
            };
            let x = rat(u * (p as i64).pow(v), d);
            count += 1;
            let w = ek_weil(&ctx, &Meta::section(Mat2::lower(x.clone())));
            if w != ek_closed_lower(&ctx, &x) || w != ek_closed_lower_first_form(&ctx, &x) {
                fails.push(format!("p={p} u_b({x})"));
            }
            if ctx.e > 0 && v % 2 == 1 && v < 2 * ctx.e && !w.is_zero() {
                fails.push(format!("p={p} u_b({x}) should vanish"));
            }
        }
        for _ in 0..30 {
            // elements with unit lower-left entry, through residue lifts
            let m = (p as i64).pow(3);
            let (a, c, d) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
            if c % p as i64 == 0 || a % p as i64 == 0 {
                continue;
            }
            let b = ((a * d - 1) * (crate::arith::mod_inv(c as i128, m as i128).unwrap() as i64)).rem_euclid(m);
            let g = lift_residue_matrix(p, a, b, c, d);
            count += 1;
            let w = ek_weil(&ctx, &Meta::section(g.clone()));
            if w != ek_closed_c_unit(&ctx, &g.c) {
                fails.push(format!("p={p} c-unit element {:?}", (a, b, c, d)));
            }
        }
        if p == 2 {
            for _ in 0..30 {
                let m = 64i64;
                let (a, c4, bb) = (2 * rng.gen_range(0..32) + 1, rng.gen_range(0..16), rng.gen_range(0..m));
                let g = lift_residue_matrix(2, a, bb, 4 * c4, 1);
                count += 1;
                let x = Meta::section(g);
                let z = Meta { zeta: -1, ..x.clone() };
                if ek_weil(&ctx, &x) != epsilon_even(&ctx, &x).scale_int(2)
                    || ek_weil(&ctx, &z) != epsilon_even(&ctx, &z).scale_int(2)
                {
                    fails.push(format!("Gamma element {:?}", x.g));
                }
            }
            for a in [1, 3, 5, 7] {
                count += 1;
                let x = Meta::section(Mat2::diag(int(a)));
                if ek_weil(&ctx, &x) != epsilon_even(&ctx, &x).scale_int(2) {
                    fails.push(format!("diagonal {a}"));
                }
            }
        }
    }
    Check::new("e^K from the Weil representation matches its closed forms", fails, count)
}

fn geometric(p: u64, s: i64, num_shift: i64) -> BigRational {
    // (1 - q^{-2s-shift}) / (1 - q^{-2s})
    (BigRational::one() - pow_p(p, -2 * s - num_shift)) / (BigRational::one() - pow_p(p, -2 * s))
}

fn strata_and_constant() -> Check {
    let mut fails = Vec::new();
    let mut count = 0;
    for p in PRIMES {
        let ctx = PadicContext::new(p).expect("prime");
        for s in [1, 2, 3] {
            count += 1;
            let want = CycRat::from_rational(geometric(p, s, 1));
            match constant_integral(&ctx, s) {
                Ok(v) if v == want => {}
                other => fails.push(format!("constant p={p} s={s}: {other:?}")),
            }
            let q = p as i64;
            let expected: Vec<BigRational> = if ctx.e == 0 {
                vec![geometric(p, s, 1)]
            } else {
                let tail = (BigRational::one() - rat(1, q)) * pow_p(p, -2 * s) / (BigRational::one() - pow_p(p, -2 * s));
                vec![BigRational::one(), tail]
            };
            for (r, want) in expected.into_iter().enumerate() {
                count += 1;
                match stratum_integral(&ctx, r as u32, s) {
                    Ok(v) if v == CycRat::from_rational(want.clone()) => {}
                    other => fails.push(format!("stratum {r} p={p} s={s}: {other:?}")),
                }
            }
        }
    }
    Check::new("stratum and constant-term integrals", fails, count)
}

/// The `(p, xi)` pairs used for the Whittaker comparison.
pub fn whittaker_cases() -> Vec<(u64, BigRational)> {
    let mut v = Vec::new();
    for x in [1, 3, 5, 7, 2, 6, 10, 4, 12, 20, 28, 8, 17, 16, 48, 68, -1, -4] {
        v.push((2, int(x)));
    }
    v.push((2, rat(1, 2)));
    v.push((2, rat(5, 4)));
    for x in [1, 2, 3, 6, 9, 18, 27, 45, -1, -9] {
        v.push((3, int(x)));
    }
    v.push((3, rat(1, 3)));
    for x in [1, 2, 3, 5, 10, 25, 50, 125, -1] {
        v.push((5, int(x)));
    }
    v.push((5, rat(2, 25)));
    v
}

fn whittaker_suite() -> Check {
    let cases = whittaker_cases();
    let ctxs: HashMap<u64, PadicContext> = PRIMES.iter().map(|&p| (p, PadicContext::new(p).expect("prime"))).collect();
    let jobs: Vec<(u64, BigRational, i64)> =
        cases.into_iter().flat_map(|(p, x)| [1i64, 2].into_iter().map(move |s| (p, x.clone(), s))).collect();
    let count = jobs.len();
    let fails: Vec<String> = jobs
        .par_iter()
        .filter_map(|(p, xi, s)| match whittaker_vs_psi(&ctxs[p], xi, *s) {
            Ok(c) if c.agrees() => None,
            Ok(c) => Some(format!("p={p} xi={xi} s={s}: {} vs {}", c.integral_side, c.psi_side)),
            Err(e) => Some(format!("p={p} xi={xi} s={s}: {e}")),
        })
        .collect();
    Check::new("Whittaker integral equals |xi|^(1/2) Psi(xi, q^-s)", fails, count)
}

fn idempotence(seed: u64) -> Check {
    let mut fails = Vec::new();
    let mut count = 0;
    for (p, levels, samples) in [(2u64, vec![3u32, 4], 20usize), (3, vec![1, 2], 5)] {
        let ctx = PadicContext::new(p).expect("prime");
        match convolution_check(&ctx, &levels, samples, seed) {
            Ok(r) => {
                count += r.points * r.levels.len();
                for (n, i) in r.mismatches {
                    fails.push(format!("p={p} level p^{n} point {i}"));
                }
            }
            Err(e) => fails.push(format!("p={p}: {e}")),
        }
    }
    Check::new("e^K * e^K = e^K at levels 2^3, 2^4 (and 3, 3^2)", fails, count)
}

/// Run every local check; deterministic for a fixed seed.
pub fn run_local_suite(seed: u64) -> Vec<Check> {
    let jobs: Vec<Box<dyn Fn() -> Check + Send + Sync>> = vec![
        Box::new(hilbert_vs_conics),
        Box::new(move || hilbert_algebra(seed)),
        Box::new(move || weil_constant_properties(seed + 1)),
        Box::new(move || weil_constant_hilbert(seed + 2)),
        Box::new(unit_integrals),
        Box::new(move || ek_closed_forms(seed + 3)),
        Box::new(strata_and_constant),
        Box::new(whittaker_suite),
        Box::new(move || idempotence(seed + 4)),
    ];
    jobs.par_iter()
        .map(|f| {
            let t = std::time::Instant::now();
            let c = f();
            if std::env::var_os("KOHNEN_TIMING").is_some() {
                eprintln!("{:?} {}", t.elapsed(), c.name);
            }
            c
        })
        .collect()
}
