//! The metaplectic cover of `SL_2(Q_p)`, the Weil-representation value of `e^K`, and the
//! convolution square of `e^K`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::{int, ord, pow_p, residue, PadicContext, RootCounter};
use crate::cyclo::CycRat;
use crate::{Error, Result};

/// `[[a, b], [c, d]]` with rational entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Mat2 {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(int(1), int(0), int(0), int(1))
    }

    pub fn upper(x: BigRational) -> Self {
        Mat2::new(int(1), x, int(0), int(1))
    }

    pub fn lower(x: BigRational) -> Self {
        Mat2::new(int(1), int(0), x, int(1))
    }

    pub fn diag(a: BigRational) -> Self {
        let ai = a.recip();
        Mat2::new(a, int(0), int(0), ai)
    }

    /// `[[0, -1/a], [a, 0]]`.
    pub fn w(a: BigRational) -> Self {
        Mat2::new(int(0), -a.recip(), a, int(0))
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    pub fn det(&self) -> BigRational {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> Mat2 {
        Mat2::new(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    fn integral_at(&self, p: u64) -> bool {
        [&self.a, &self.b, &self.c, &self.d].iter().all(|x| x.is_zero() || ord(p, x) >= 0)
    }

    /// Entries in `Z_p`.
    pub fn in_lambda(&self, p: u64) -> bool {
        self.integral_at(p)
    }

    /// Entries in `Z_p` and lower-left entry in `4 Z_p`.
    pub fn in_gamma(&self, p: u64) -> bool {
        let e = i64::from(p == 2);
        self.integral_at(p) && (self.c.is_zero() || ord(p, &self.c) >= 2 * e)
    }

    fn tau(&self) -> &BigRational {
        if self.c.is_zero() {
            &self.d
        } else {
            &self.c
        }
    }
}

/// `c(g1, g2) = <tau(g1)/tau(g1 g2), tau(g2)/tau(g1 g2)>`.
pub fn kubota_cocycle(ctx: &PadicContext, g1: &Mat2, g2: &Mat2) -> i32 {
    let g12 = g1.mul(g2);
    let t = g12.tau();
    ctx.hilbert(&(g1.tau() / t), &(g2.tau() / t))
}

/// `[g, zeta]` in the metaplectic cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Meta {
    pub g: Mat2,
    pub zeta: i32,
}

impl Meta {
    pub fn section(g: Mat2) -> Self {
        Meta { g, zeta: 1 }
    }

    pub fn mul(&self, ctx: &PadicContext, o: &Meta) -> Meta {
        Meta { g: self.g.mul(&o.g), zeta: self.zeta * o.zeta * kubota_cocycle(ctx, &self.g, &o.g) }
    }

    pub fn inv(&self, ctx: &PadicContext) -> Meta {
        let gi = self.g.inv();
        let c = kubota_cocycle(ctx, &self.g, &gi);
        Meta { zeta: self.zeta * c, g: gi }
    }
}

/// `e^K(g) = q^e (phi_0, omega_psi(g) phi_0)` from the Weil representation itself.
///
/// For `c != 0`, `[g] = u#(a/c - 1/c) u_b(c) u#(d/c - 1/c)` and
/// `u_b(c) = u#(1/c) w_c u#(1/c)` with trivial cocycles, which reduces the inner product
/// to `alpha(c) |2/c|^{1/2} int int conj psi((a t^2 - 2ts + d s^2)/c) ds dt` over `Z_p^2`.
pub fn ek_weil(ctx: &PadicContext, x: &Meta) -> CycRat {
    let g = &x.g;
    let p = ctx.p;
    if !g.in_lambda(p) {
        return CycRat::zero();
    }
    let qe = CycRat::from_int(ctx.q().pow(ctx.e));
    let z = CycRat::from_int(x.zeta as i64);
    if g.c.is_zero() {
        // [g] = u#(ab) m(a); omega(m(a)) phi_0 = alpha(1)/alpha(a) phi_0
        let v = &ctx.weil_constant(&int(1)).conj() * &ctx.weil_constant(&g.a);
        return &(&qe * &z) * &v;
    }
    let k = ord(p, &g.c);
    let e = ctx.e as i64;
    let lvl = (k - e).max((k + 1) / 2).max(0) as u32;
    let m = (p as i128).pow(lvl);
    let kk = k as u32;
    let pk = (p as i128).pow(kk);
    let cu = &g.c * pow_p(p, -k);
    let ci = crate::arith::mod_inv(residue(p, &cu, kk), pk).unwrap_or(0);
    let (ra, rd) = (residue(p, &g.a, kk), residue(p, &g.d, kk));
    let mut acc = RootCounter::new(p, kk);
    for t in 0..m {
        for s in 0..m {
            let qn = ((ra * (t * t % pk) - 2 * t * s + rd * (s * s % pk)) % pk * ci).rem_euclid(pk);
            // conj psi(qn / p^k)
            acc.add(kk, qn, 1);
        }
    }
    let dbl = acc.finish(&pow_p(p, -2 * lvl as i64));
    let scale = &ctx.weil_constant(&g.c) * &ctx.sqrt_p_pow(k - e);
    &(&(&qe * &z) * &scale) * &dbl
}

/// `e^K(u_b(x)) = |2|^{-1} int_{Z_p} psi(x t^2 / 4) dt` for nonzero `x in Z_p`.
pub fn ek_closed_lower(ctx: &PadicContext, x: &BigRational) -> CycRat {
    ctx.gauss_integral(&(x / int(4)), false).scale(&int(ctx.q().pow(ctx.e)))
}

/// `e^K(u_b(x)) = alpha(x) |2x|^{-1/2} int_{Z_p} conj psi(t^2/x) dt`.
pub fn ek_closed_lower_first_form(ctx: &PadicContext, x: &BigRational) -> CycRat {
    let g = ctx.gauss_integral(&x.recip(), true);
    let s = ctx.sqrt_p_pow(ord(ctx.p, &(int(2) * x)));
    &(&ctx.weil_constant(x) * &s) * &g
}

/// `e^K([g]) = alpha(c) |2|^{-1/2}` when the lower-left entry `c` is a unit.
pub fn ek_closed_c_unit(ctx: &PadicContext, c: &BigRational) -> CycRat {
    &ctx.weil_constant(c) * &ctx.sqrt_p_pow(ctx.e as i64)
}

/// The genuine character on the cover of `Gamma` for `p = 2`.
pub fn epsilon_even(ctx: &PadicContext, x: &Meta) -> CycRat {
    assert_eq!(ctx.p, 2);
    let g = &x.g;
    let z = CycRat::from_int(x.zeta as i64);
    let a1 = ctx.weil_constant(&int(1));
    let ad = ctx.weil_constant(&g.d);
    if g.c.is_zero() {
        &z * &(&ad * &a1.conj())
    } else {
        let h = ctx.hilbert(&g.c, &g.d) as i64;
        (&z * &(&a1 * &ad.conj())).scale_int(h)
    }
}

/// A lift to `SL_2(Z_(p))` of a matrix with determinant one modulo `p^n`.
pub fn lift_residue_matrix(p: u64, a: i64, b: i64, c: i64, d: i64) -> Mat2 {
    if a % p as i64 != 0 {
        let dd = (int(1) + int(b) * int(c)) / int(a);
        Mat2::new(int(a), int(b), int(c), dd)
    } else {
        let bb = (int(a) * int(d) - int(1)) / int(c);
        Mat2::new(int(a), bb, int(c), int(d))
    }
}

/// All of `SL_2(Z/p^n)`, lifted.
pub fn sl2_residues(p: u64, n: u32) -> Vec<Mat2> {
    let m = (p as i64).pow(n);
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if (a * d - b * c - 1).rem_euclid(m) == 0 {
                        out.push(lift_residue_matrix(p, a, b, c, d));
                    }
                }
            }
        }
    }
    out
}

/// Outcome of comparing `e^K * e^K` with `e^K`.
#[derive(Clone, Debug)]
pub struct ConvolutionReport {
    pub levels: Vec<u32>,
    pub points: usize,
    /// `(level, point index)` of every disagreement.
    pub mismatches: Vec<(u32, usize)>,
}

impl ConvolutionReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.points > 0
    }
}

/// `(e^K * e^K)(g)` as an average over `SL_2(Z/p^n)`; the integrand
/// `e^K(g h^{-1}) e^K(h)` does not depend on the lift of `h` to the cover.
pub fn convolution_at_level(ctx: &PadicContext, g: &Mat2, hs: &[(Meta, Meta, CycRat)]) -> CycRat {
    let gm = Meta::section(g.clone());
    let mut acc = CycRat::zero();
    for (_, hinv, eh) in hs {
        if eh.is_zero() {
            continue;
        }
        let v = ek_weil(ctx, &gm.mul(ctx, hinv));
        acc = &acc + &(&v * eh);
    }
    acc.scale(&BigRational::new(One::one(), (hs.len() as i64).into()))
}

/// Idempotence of `e^K` on the identity and `samples` random cosets of level `p^3`,
/// evaluated with Haar sums at each level in `levels`.
pub fn convolution_check(ctx: &PadicContext, levels: &[u32], samples: usize, seed: u64) -> Result<ConvolutionReport> {
    if levels.is_empty() {
        return Err(Error::InvalidInput("no levels".into()));
    }
    let p = ctx.p;
    let m = (p as i64).pow(3);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut points = vec![Mat2::identity()];
    while points.len() < samples + 1 {
        let (a, b, c) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
        // solve a d - b c = 1 mod p^3 for d, or b from d
        let d = rng.gen_range(0..m);
        if (a * d - b * c - 1).rem_euclid(m) == 0 {
            points.push(lift_residue_matrix(p, a, b, c, d));
        }
    }
    let mut mismatches = Vec::new();
    for &n in levels {
        let hs: Vec<(Meta, Meta, CycRat)> = sl2_residues(p, n)
            .into_iter()
            .map(|h| {
                let hm = Meta::section(h);
                let hi = hm.inv(ctx);
                let eh = ek_weil(ctx, &hm);
                (hm, hi, eh)
            })
            .collect();
        for (i, g) in points.iter().enumerate() {
            let conv = convolution_at_level(ctx, g, &hs);
            if conv != ek_weil(ctx, &Meta::section(g.clone())) {
                mismatches.push((n, i));
            }
        }
    }
    Ok(ConvolutionReport { levels: levels.to_vec(), points: points.len(), mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_oracle::rat;

    #[test]
    fn identity_value_is_q_to_the_e() {
        for p in [2, 3, 5] {
            let ctx = PadicContext::new(p).unwrap();
            let v = ek_weil(&ctx, &Meta::section(Mat2::identity()));
            assert_eq!(v, CycRat::from_int(if p == 2 { 2 } else { 1 }));
        }
    }

    #[test]
    fn lower_unipotents_match_closed_forms() {
        for p in [2, 3, 5] {
            let ctx = PadicContext::new(p).unwrap();
            for x in [1, 2, 3, 4, 5, 6, 8, 12, 16, 25, 27, 40, 48, 96, 125] {
                let x = rat(x, 7);
                let w = ek_weil(&ctx, &Meta::section(Mat2::lower(x.clone())));
                assert_eq!(w, ek_closed_lower(&ctx, &x), "p={p} x={x}");
                assert_eq!(w, ek_closed_lower_first_form(&ctx, &x), "p={p} x={x}");
            }
        }
        let ctx = PadicContext::new(2).unwrap();
        for x in [2, 6, 10, -2] {
            assert!(ek_weil(&ctx, &Meta::section(Mat2::lower(int(x)))).is_zero());
        }
    }

    #[test]
    fn genuine_sign() {
        let ctx = PadicContext::new(2).unwrap();
        let g = Mat2::new(int(3), int(1), int(5), int(2));
        let a = ek_weil(&ctx, &Meta { g: g.clone(), zeta: 1 });
        let b = ek_weil(&ctx, &Meta { g, zeta: -1 });
        assert_eq!(a, -b);
    }

    #[test]
    fn epsilon_on_gamma() {
        let ctx = PadicContext::new(2).unwrap();
        for (a, b, c, d) in [(1, 0, 0, 1), (3, 1, 8, 3), (5, 2, 12, 5), (1, 3, 4, 13), (1, 2, 0, 1), (-1, 5, 4, -21)] {
            let g = Mat2::new(int(a), int(b), int(c), int(d));
            assert_eq!(g.det(), int(1));
            let x = Meta::section(g);
            assert_eq!(ek_weil(&ctx, &x), epsilon_even(&ctx, &x).scale_int(2), "{a} {b} {c} {d}");
        }
    }
}
