//! The section `f^+` of the induced representation and its Whittaker integral.
//!
//! Values of `f^+` on `Lambda` come from the closed forms for `e^K`; values elsewhere from
//! the Iwasawa decomposition `g = u#(b) m(a) k` with an explicit cocycle. Integrals over
//! `Q_p` split into `Z_p` and shells `p^{-n} Z_p^x`, each a finite sum.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::metaplectic::{ek_closed_c_unit, ek_closed_lower, epsilon_even, kubota_cocycle, Mat2, Meta};
use super::{fractional_part, int, ord, pow_p, residue, split, PadicContext, RootCounter};
use crate::cyclo::CycRat;
use crate::{Error, Result};

/// `(f_xi, chi_xi)` for `Q_p(sqrt xi) / Q_p`.
pub fn local_f_chi(p: u64, xi: &BigRational) -> (i64, i32) {
    let (v, u) = split(p, xi);
    let m = v.div_euclid(2);
    if v.rem_euclid(2) == 1 {
        let e = i64::from(p == 2);
        return (m - e, 0);
    }
    if p == 2 {
        match residue(2, &u, 3) {
            1 => (m, 1),
            5 => (m, -1),
            _ => (m - 1, 0),
        }
    } else {
        let l = crate::arith::legendre(residue(p, &u, 1), p as i128);
        (m, l)
    }
}

/// `Psi(xi, y)` from `(f, chi)`, with `y` rational.
pub fn psi_exact(ctx: &PadicContext, f: i64, chi: i32, y: &BigRational) -> CycRat {
    if f < 0 {
        return CycRat::zero();
    }
    let ypow = |k: i64| {
        if k >= 0 {
            num_traits::pow(y.clone(), k as usize)
        } else {
            num_traits::pow(y.recip(), (-k) as usize)
        }
    };
    let mut a = BigRational::zero();
    for j in 0..=f {
        a += ypow(f - 2 * j);
    }
    let mut b = BigRational::zero();
    for j in 0..f {
        b += ypow(f - 1 - 2 * j);
    }
    let tail = ctx.sqrt_p_pow(-1).scale(&(b * int(chi as i64)));
    &CycRat::from_rational(a) - &tail
}

/// Which closed form gives `e^K` on an element of `Lambda`.
fn ek_closed(ctx: &PadicContext, k: &Meta) -> Result<CycRat> {
    let g = &k.g;
    let z = k.zeta as i64;
    let v = if !g.c.is_zero() && ord(ctx.p, &g.c) == 0 {
        ek_closed_c_unit(ctx, &g.c)
    } else if g.a.is_one() && g.d.is_one() && g.b.is_zero() && !g.c.is_zero() {
        ek_closed_lower(ctx, &g.c)
    } else if ctx.p == 2 && g.in_gamma(2) {
        epsilon_even(ctx, &Meta::section(g.clone())).scale_int(2)
    } else {
        return Err(Error::Unsupported("no closed form for e^K at this element".into()));
    };
    Ok(v.scale_int(z))
}

fn in_stratum(ctx: &PadicContext, r: u32, g: &Mat2) -> bool {
    if r == ctx.e {
        g.in_gamma(ctx.p)
    } else {
        g.in_lambda(ctx.p) && !g.c.is_zero() && ord(ctx.p, &g.c) == 2 * r as i64
    }
}

/// `f_r` on the cover of `Lambda`: `q^{-e/2} alpha(1) conj e^K(g)` on the stratum `X_r`.
fn f_stratum_on_lambda(ctx: &PadicContext, r: u32, k: &Meta) -> Result<CycRat> {
    if !in_stratum(ctx, r, &k.g) {
        return Ok(CycRat::zero());
    }
    let ek = ek_closed(ctx, k)?;
    Ok(&(&ctx.sqrt_p_pow(-(ctx.e as i64)) * &ctx.weil_constant(&int(1))) * &ek.conj())
}

/// Which combination of strata to evaluate.
#[derive(Clone, Copy, Debug)]
enum Section {
    Stratum(u32),
    Plus,
}

fn section_on_lambda(ctx: &PadicContext, sec: Section, k: &Meta, s: i64) -> Result<CycRat> {
    match sec {
        Section::Stratum(r) => f_stratum_on_lambda(ctx, r, k),
        Section::Plus => {
            let mut acc = CycRat::zero();
            for r in 0..=ctx.e {
                let w = pow_p(ctx.p, (2 * s + 1) * r as i64 - ctx.e as i64);
                acc = &acc + &f_stratum_on_lambda(ctx, r, k)?.scale(&w);
            }
            Ok(acc)
        }
    }
}

/// Evaluate a section of `I(s)` at `[g, zeta]` through `g = u#(b) m(a) k`, `k in Lambda`.
fn section_value(ctx: &PadicContext, sec: Section, x: &Meta, s: i64) -> Result<CycRat> {
    let g = &x.g;
    let p = ctx.p;
    if g.in_lambda(p) {
        return section_on_lambda(ctx, sec, x, s);
    }
    let k = if g.c.is_zero() || (!g.d.is_zero() && ord(p, &g.c) >= ord(p, &g.d)) {
        let t = if g.c.is_zero() { BigRational::zero() } else { &g.c / &g.d };
        Mat2::lower(t)
    } else {
        Mat2::new(int(0), int(-1), int(1), &g.d / &g.c)
    };
    let pm = g.mul(&k.inv());
    debug_assert!(pm.c.is_zero());
    let a = pm.a.clone();
    if !k.in_lambda(p) {
        return Err(Error::Computation("Iwasawa factor outside Lambda".into()));
    }
    let sign = x.zeta * kubota_cocycle(ctx, &pm, &k);
    let inner = section_on_lambda(ctx, sec, &Meta::section(k), s)?;
    let ratio = &ctx.weil_constant(&int(1)) * &ctx.weil_constant(&a).conj();
    let modulus = pow_p(p, -ord(p, &a) * (s + 1));
    Ok((&ratio * &inner).scale(&(modulus * int(sign as i64))))
}

fn w1_upper(x: &BigRational) -> Meta {
    Meta::section(Mat2::new(int(0), int(-1), int(1), x.clone()))
}

/// `f^+(w_1 u#(x))` at the integer parameter `s`.
pub fn f_plus_w1u(ctx: &PadicContext, x: &BigRational, s: i64) -> Result<CycRat> {
    section_value(ctx, Section::Plus, &w1_upper(x), s)
}

/// `sum_x F(x) conj psi(xi x)` over the given points, grouping equal values of `F` so that
/// the character sums stay in integer form until the end.
fn weighted_character_sum(
    ctx: &PadicContext,
    f: &dyn Fn(&BigRational) -> Result<CycRat>,
    xi: &BigRational,
    points: impl Iterator<Item = BigRational>,
    order: u32,
) -> Result<CycRat> {
    let mut groups: Vec<(CycRat, RootCounter)> = Vec::new();
    for x in points {
        let v = f(&x)?;
        if v.is_zero() {
            continue;
        }
        let (j, r) = fractional_part(ctx.p, &(xi * &x));
        let idx = match groups.iter().position(|(w, _)| *w == v) {
            Some(i) => i,
            None => {
                groups.push((v, RootCounter::new(ctx.p, order)));
                groups.len() - 1
            }
        };
        groups[idx].1.add(j, r, 1);
    }
    let mut acc = CycRat::zero();
    for (v, c) in groups {
        acc = &acc + &(&v * &c.finish(&BigRational::one()));
    }
    Ok(acc)
}

fn char_order(p: u64, xi: &BigRational, n: i64) -> u32 {
    if xi.is_zero() {
        0
    } else {
        (n - ord(p, xi)).max(0) as u32
    }
}

/// `int_{Z_p} F(x) conj psi(xi x) dx` with `F` sampled modulo `p^k`.
fn integral_over_zp(
    ctx: &PadicContext,
    f: &dyn Fn(&BigRational) -> Result<CycRat>,
    xi: &BigRational,
    k: u32,
) -> Result<CycRat> {
    let m = (ctx.p as i64).pow(k);
    let s = weighted_character_sum(ctx, f, xi, (0..m).map(int), char_order(ctx.p, xi, 0))?;
    Ok(s.scale(&pow_p(ctx.p, -(k as i64))))
}

/// `int_{p^{-n} Z_p^x} F(x) conj psi(xi x) dx` with units sampled modulo `p^k`.
fn integral_over_shell(
    ctx: &PadicContext,
    f: &dyn Fn(&BigRational) -> Result<CycRat>,
    xi: &BigRational,
    n: i64,
    k: u32,
) -> Result<CycRat> {
    let m = (ctx.p as i64).pow(k);
    let p = ctx.p as i64;
    let pts = (1..m).filter(|u| u % p != 0).map(|u| int(u) * pow_p(ctx.p, -n));
    let s = weighted_character_sum(ctx, f, xi, pts, char_order(ctx.p, xi, n))?;
    Ok(s.scale(&pow_p(ctx.p, n - k as i64)))
}

/// Evaluate at level `k` and `k + 1`; disagreement means the truncation was too coarse.
fn stable(a: Result<CycRat>, b: Result<CycRat>, what: &str) -> Result<CycRat> {
    let (a, b) = (a?, b?);
    if a != b {
        return Err(Error::Computation(format!("{what} did not stabilise under level refinement")));
    }
    Ok(a)
}

fn zp_part(ctx: &PadicContext, f: &dyn Fn(&BigRational) -> Result<CycRat>, xi: &BigRational) -> Result<CycRat> {
    let k = if xi.is_zero() { 1 } else { (-ord(ctx.p, xi)).max(1) as u32 };
    stable(integral_over_zp(ctx, f, xi, k), integral_over_zp(ctx, f, xi, k + 1), "Z_p integral")
}

fn shell(ctx: &PadicContext, f: &dyn Fn(&BigRational) -> Result<CycRat>, xi: &BigRational, n: i64) -> Result<CycRat> {
    let base = 1 + 2 * ctx.e as i64;
    let k = if xi.is_zero() { base } else { base.max(n - ord(ctx.p, xi)) } as u32;
    stable(
        integral_over_shell(ctx, f, xi, n, k),
        integral_over_shell(ctx, f, xi, n, k + 1),
        "shell integral",
    )
}

/// `int_{Q_p} F(x) dx` for `F(x) = |x|^{-s-1} (periodic in ord x)` far out: shells from
/// `tail` on satisfy `shell(n + 2) = q^{-2s} shell(n)`, which is checked and summed.
fn integral_with_geometric_tail(
    ctx: &PadicContext,
    f: &dyn Fn(&BigRational) -> Result<CycRat>,
    s: i64,
) -> Result<CycRat> {
    let zero = BigRational::zero();
    let tail = (2 * ctx.e as i64).max(1);
    let mut total = zp_part(ctx, f, &zero)?;
    for n in 1..tail {
        total = &total + &shell(ctx, f, &zero, n)?;
    }
    let sh: Vec<CycRat> = (0..4).map(|j| shell(ctx, f, &zero, tail + j)).collect::<Result<_>>()?;
    let r = pow_p(ctx.p, -2 * s);
    if sh[2] != sh[0].scale(&r) || sh[3] != sh[1].scale(&r) {
        return Err(Error::Computation("shell integrals are not geometric".into()));
    }
    let denom = (BigRational::one() - r).recip();
    Ok(&total + &(&sh[0] + &sh[1]).scale(&denom))
}

/// `int_{Q_p} f_r(w_1 u#(t)) dt`.
pub fn stratum_integral(ctx: &PadicContext, r: u32, s: i64) -> Result<CycRat> {
    if r > ctx.e {
        return Err(Error::InvalidInput(format!("stratum {r} beyond e = {}", ctx.e)));
    }
    let f = |x: &BigRational| section_value(ctx, Section::Stratum(r), &w1_upper(x), s);
    integral_with_geometric_tail(ctx, &f, s)
}

/// `int_{Q_p} f^+(w_1 u#(t)) dt`.
pub fn constant_integral(ctx: &PadicContext, s: i64) -> Result<CycRat> {
    let f = |x: &BigRational| f_plus_w1u(ctx, x, s);
    integral_with_geometric_tail(ctx, &f, s)
}

/// Both sides of `W_xi(1) = |xi|^{1/2} Psi(xi, q^{-s})`.
#[derive(Clone, Debug)]
pub struct WhittakerComparison {
    pub p: u64,
    pub xi: BigRational,
    pub s: i64,
    pub f: i64,
    pub chi: i32,
    pub integral_side: CycRat,
    pub psi_side: CycRat,
}

impl WhittakerComparison {
    pub fn agrees(&self) -> bool {
        self.integral_side == self.psi_side
    }
}

/// Evaluate the Whittaker integral at `g = 1` by shells; shells beyond
/// `ord(xi) + 1 + 2e` must vanish (two extra shells are checked).
pub fn whittaker_vs_psi(ctx: &PadicContext, xi: &BigRational, s: i64) -> Result<WhittakerComparison> {
    if xi.is_zero() {
        return Err(Error::InvalidInput("the Whittaker integral needs xi != 0".into()));
    }
    if s == 0 {
        return Err(Error::InvalidInput("s = 0 is a pole of the constant term".into()));
    }
    let p = ctx.p;
    let f = |x: &BigRational| f_plus_w1u(ctx, x, s);
    let v = ord(p, xi);
    let last = (2 * ctx.e as i64).max(v + 1 + 2 * ctx.e as i64).max(1);
    let mut integral = zp_part(ctx, &f, xi)?;
    for n in 1..=last {
        integral = &integral + &shell(ctx, &f, xi, n)?;
    }
    for n in last + 1..=last + 2 {
        if !shell(ctx, &f, xi, n)?.is_zero() {
            return Err(Error::Computation(format!("shell {n} beyond the support window is nonzero")));
        }
    }
    let (fx, chi) = local_f_chi(p, xi);
    let y = pow_p(p, -s);
    // gamma(xi, y)^{-1} = (1 - chi y / sqrt q) / (1 - y^2 / q)
    let num = &CycRat::one() - &ctx.sqrt_p_pow(-1).scale(&(&y * int(chi as i64)));
    let den = (BigRational::one() - &y * &y / int(ctx.q())).recip();
    let gamma_inv = num.scale(&den);
    let half = ctx.abs_sqrt(xi);
    let integral_side = &(&half * &gamma_inv) * &integral.scale(&pow_p(p, fx * s));
    let psi_side = &half * &psi_exact(ctx, fx, chi, &y);
    Ok(WhittakerComparison { p, xi: xi.clone(), s, f: fx, chi, integral_side, psi_side })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_oracle::rat;

    #[test]
    fn local_invariants_examples() {
        assert_eq!(local_f_chi(2, &int(1)), (0, 1));
        assert_eq!(local_f_chi(2, &int(5)), (0, -1));
        assert_eq!(local_f_chi(2, &int(3)), (-1, 0));
        assert_eq!(local_f_chi(2, &int(2)), (-1, 0));
        assert_eq!(local_f_chi(2, &int(8)), (0, 0));
        assert_eq!(local_f_chi(2, &int(4)), (1, 1));
        assert_eq!(local_f_chi(3, &int(9)), (1, 1));
        assert_eq!(local_f_chi(3, &int(2)), (0, -1));
        assert_eq!(local_f_chi(5, &rat(1, 5)), (-1, 0));
    }

    #[test]
    fn psi_matches_float_formula() {
        let ctx = PadicContext::new(3).unwrap();
        for (f, chi) in [(0, 1), (1, -1), (2, 0), (3, 1)] {
            let y = rat(1, 9);
            let exact = psi_exact(&ctx, f, chi, &y).to_complex();
            let float = crate::eisenstein::psi_value(f, chi, 3, num_complex::Complex64::new(1.0 / 9.0, 0.0));
            assert!((exact - float).norm() < 1e-9);
        }
    }

    #[test]
    fn f_plus_on_integers_is_q_to_minus_e() {
        for p in [2, 3] {
            let ctx = PadicContext::new(p).unwrap();
            let want = CycRat::from_rational(pow_p(p, -i64::from(p == 2)));
            assert_eq!(f_plus_w1u(&ctx, &int(3), 1).unwrap(), want);
        }
    }

    #[test]
    fn constant_term_p3() {
        let ctx = PadicContext::new(3).unwrap();
        let got = constant_integral(&ctx, 1).unwrap();
        // (1 - 3^{-3}) / (1 - 3^{-2}) = 13/12
        assert_eq!(got, CycRat::from_frac(13, 12));
    }
}
