//! Fourier coefficients of the plus-space Eisenstein series `G_{k+1/2}(z, chi')`.
//!
//! With `eta = (-1)^k` the expansion is
//!
//! ```text
//! G = L(1-2k, conj(chi')^2) + sum_{xi >> 0, eta xi = square mod 4}
//!       chi'(D_{eta xi}) L(1-k, conj(chi_{eta xi} chi')) C_k(eta xi) q^xi
//! ```
//!
//! where `(t) = F_t^2 D_t` splits off the relative discriminant `D_t` of `F(sqrt t)/F` and
//! `C_k(t) = sum_{a | F_t} mu(a) chi_t(a) chi'(a) N(a)^{k-1} sigma_{2k-1, chi'^2}(F_t / a)`.

pub mod classical;
pub mod qexp;
pub mod sources;

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::base_field::{BaseField, FieldElement};
use crate::class_group::{ClassCharacter, ClassGroup};
use crate::cyclo::CycRat;
use crate::ideal::{FactoredIdeal, PrimeIdeal};
use crate::lvalues::{CharacterSpec, LFunctions};
use crate::quad_invariants::{chi_xi_on_ideal, is_square_mod4, relative_discriminant};
use crate::{Error, Result};

pub use classical::{classical_series, cohen_coefficient, cohen_series, ClassicalKind};
pub use qexp::QExpansion;
pub use sources::{hecke_t_plus, hecke_t_plus_lazy, CoefficientSource, HeckeImage, LinearCombination, Product};

/// Weight `k + 1/2`, base field and class character of an Eisenstein series.
#[derive(Clone)]
pub struct EisensteinSpec {
    kappa: u32,
    chi_prime: ClassCharacter,
    lfun: Arc<LFunctions>,
}

impl std::fmt::Debug for EisensteinSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EisensteinSpec")
            .field("field", self.field())
            .field("kappa", &self.kappa)
            .field("chi_prime", &self.chi_prime.exponent_vector())
            .finish()
    }
}

impl EisensteinSpec {
    pub fn new(lfun: Arc<LFunctions>, kappa: u32, chi_prime: ClassCharacter) -> Result<Self> {
        if kappa == 0 {
            return Err(Error::InvalidInput("kappa must be at least 1".into()));
        }
        if kappa == 1 && lfun.field().is_rational() {
            return Err(Error::Unsupported(
                "weight 3/2 over Q is excluded: the constant term computation breaks down there \
                 (the finite part of the xi = m^2 coefficients has a pole)"
                    .into(),
            ));
        }
        if !Arc::ptr_eq(chi_prime.group(), lfun.group()) {
            return Err(Error::InvalidInput("character belongs to a different class group".into()));
        }
        Ok(EisensteinSpec { kappa, chi_prime, lfun })
    }

    /// Spec for the `j`-th class character of the field `Q(sqrt d)` (`d = 0`: `Q`).
    pub fn for_field(d: i64, kappa: u32, chi_index: usize) -> Result<Self> {
        let f = BaseField::new(d)?;
        let g = ClassGroup::compute(&f)?;
        let chi = g.character(chi_index)?;
        Self::new(Arc::new(LFunctions::new(g)), kappa, chi)
    }

    pub fn field(&self) -> &BaseField {
        self.lfun.field()
    }

    pub fn group(&self) -> &Arc<ClassGroup> {
        self.lfun.group()
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// `(-1)^kappa`.
    pub fn eta(&self) -> i32 {
        if self.kappa % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn chi_prime(&self) -> &ClassCharacter {
        &self.chi_prime
    }

    pub fn lfunctions(&self) -> &Arc<LFunctions> {
        &self.lfun
    }

    /// The local parameter `q^{1/2-k} chi'(p)^{-1}` that turns the Whittaker polynomial
    /// product into the divisor sum.
    pub fn local_y(&self, p: &PrimeIdeal) -> Complex64 {
        let q = p.norm() as f64;
        let v = self.chi_prime.value(&FactoredIdeal::prime(*p)).to_complex();
        q.powf(0.5 - self.kappa as f64) / v
    }

    /// Constant term `L(1 - 2k, conj(chi')^2)`.
    pub fn constant_term(&self) -> Result<CycRat> {
        let chi = CharacterSpec::new(None, self.chi_prime.square(), true)?;
        self.lfun.exact(2 * self.kappa, &chi)
    }
}

/// `Psi(f, chi; y) = sum_{j=0}^{f} y^{f-2j} - chi q^{-1/2} sum_{j=0}^{f-1} y^{f-1-2j}`, and 0 for
/// `f < 0`.
pub fn psi_value(f: i64, chi_loc: i32, q: u64, y: Complex64) -> Complex64 {
    if f < 0 {
        return Complex64::zero();
    }
    let mut s = Complex64::zero();
    for j in 0..=f {
        s += y.powi((f - 2 * j) as i32);
    }
    let c = chi_loc as f64 / (q as f64).sqrt();
    for j in 0..f {
        s -= y.powi((f - 1 - 2 * j) as i32) * c;
    }
    s
}

/// Exact sums `sum_k c_k zeta_m^k` accumulated coefficient-wise before reduction.
#[derive(Clone, Debug)]
pub(crate) struct PowerSum {
    m: u32,
    acc: Vec<BigRational>,
}

impl PowerSum {
    pub(crate) fn new(m: u32) -> Self {
        PowerSum { m, acc: vec![BigRational::zero(); m as usize] }
    }

    pub(crate) fn add(&mut self, k: u32, c: &BigRational) {
        self.acc[(k % self.m) as usize] += c;
    }

    /// Add `zeta^shift * other`.
    pub(crate) fn add_shifted(&mut self, shift: u32, scale: &BigRational, other: &PowerSum) {
        for (k, c) in other.acc.iter().enumerate() {
            if !c.is_zero() {
                self.add(k as u32 + shift, &(c * scale));
            }
        }
    }

    pub(crate) fn finish(self) -> CycRat {
        CycRat::from_power_sum(self.m, self.acc)
    }
}

fn big(n: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn twisted_sigma_sum(k: u32, chi: &ClassCharacter, a: &FactoredIdeal) -> PowerSum {
    let mut s = PowerSum::new(chi.modulus());
    for b in a.divisors() {
        s.add(chi.log_value(&b), &num_traits::pow(big(b.norm()), k as usize));
    }
    s
}

/// `sigma_{k, chi}(A) = sum_{b | A} N(b)^k chi(b)`.
pub fn twisted_sigma(k: u32, chi: &ClassCharacter, a: &FactoredIdeal) -> CycRat {
    twisted_sigma_sum(k, chi, a).finish()
}

fn not_plus_space() -> Error {
    Error::InvalidInput("not a plus-space index".into())
}

/// The divisor sum `C_k(t)` for `t = eta xi` with all conductor exponents non-negative.
pub fn frak_c(spec: &EisensteinSpec, t: &FieldElement) -> Result<CycRat> {
    let f = spec.field();
    if t.is_zero() {
        return Err(not_plus_space());
    }
    let rd = relative_discriminant(f, t)?;
    if !rd.integral {
        return Err(not_plus_space());
    }
    let k = spec.kappa;
    let chi = &spec.chi_prime;
    let chi2 = chi.square();
    let mut total = PowerSum::new(chi.modulus());
    for a in rd.conductor.divisors() {
        let mu = a.moebius();
        if mu == 0 {
            continue;
        }
        let ct = chi_xi_on_ideal(f, t, &a)?;
        if ct == 0 {
            continue;
        }
        let sigma = twisted_sigma_sum(2 * k - 1, &chi2, &rd.conductor.div(&a));
        let scale = num_traits::pow(big(a.norm()), (k - 1) as usize) * BigRational::from_integer((mu * ct).into());
        total.add_shifted(chi.log_value(&a), &scale, &sigma);
    }
    Ok(total.finish())
}

/// Which power of `chi'(p)` enters the local parameter of the product formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalConvention {
    /// `y = q^{1/2-k} chi'(p)^{-1}` (the one matching the divisor sum).
    Inverse,
    /// `y = q^{1/2-k} chi'(p)`.
    Direct,
}

/// Floating evaluation of `N(F_t)^{k-1/2} chi'(F_t) prod_v Psi(t_v; y_v)`.
pub fn frak_c_product(spec: &EisensteinSpec, t: &FieldElement, conv: LocalConvention) -> Result<Complex64> {
    let f = spec.field();
    let rd = relative_discriminant(f, t)?;
    if !rd.integral {
        return Ok(Complex64::zero());
    }
    let k = spec.kappa as f64;
    let mut v = Complex64::new((rd.conductor.norm() as f64).powf(k - 0.5), 0.0);
    v *= spec.chi_prime.value(&rd.conductor).to_complex();
    for (p, li) in &rd.local {
        let fe = li.f.unwrap();
        if fe == 0 {
            continue;
        }
        let y = match conv {
            LocalConvention::Inverse => spec.local_y(p),
            LocalConvention::Direct => 1.0 / spec.local_y(p) * (p.norm() as f64).powf(1.0 - 2.0 * k),
        };
        v *= psi_value(fe, li.chi, p.norm(), y);
    }
    Ok(v)
}

/// The coefficient of `q^xi` in `G_{k+1/2}(z, chi')`.
pub fn eisenstein_coefficient(spec: &EisensteinSpec, xi: &FieldElement) -> Result<CycRat> {
    let f = spec.field();
    if xi.is_zero() {
        return spec.constant_term();
    }
    if !xi.is_integral() || !f.is_totally_positive(xi) {
        return Ok(CycRat::zero());
    }
    let t = xi.scale_int(spec.eta() as i64);
    if !is_square_mod4(f, &t) {
        return Ok(CycRat::zero());
    }
    let chi = CharacterSpec::new(Some(t.clone()), spec.chi_prime.clone(), true)?;
    let l = spec.lfun.exact(spec.kappa, &chi)?;
    if l.is_zero() {
        return Ok(l);
    }
    let c = frak_c(spec, &t)?;
    let twist = spec.chi_prime.value(&chi.modulus);
    Ok(&(&twist * &l) * &c)
}

/// `G_{k+1/2}(z, chi')` on all indices of trace at most `trace_bound`.
pub fn eisenstein_qexpansion(spec: &EisensteinSpec, trace_bound: i64) -> Result<QExpansion> {
    if trace_bound < 1 {
        return Err(Error::InvalidInput("trace bound must be at least 1".into()));
    }
    let f = spec.field();
    let idx = f.enumerate_totally_positive(trace_bound);
    // warm the constant-term cache before the parallel phase
    spec.constant_term()?;
    let vals: Vec<(FieldElement, CycRat)> = idx
        .into_par_iter()
        .map(|xi| eisenstein_coefficient(spec, &xi).map(|v| (xi, v)))
        .collect::<Result<_>>()?;
    let label = format!("G_{{{}/2}}(z, chi_{})", 2 * spec.kappa + 1, spec.chi_prime.index());
    let mut q = QExpansion::new(f.clone(), label, trace_bound);
    for (xi, v) in vals {
        q.insert(xi, v);
    }
    Ok(q)
}

impl CoefficientSource for EisensteinSpec {
    fn field(&self) -> &BaseField {
        EisensteinSpec::field(self)
    }

    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat> {
        eisenstein_coefficient(self, xi)
    }
}

/// Sanity helper for callers that need `1 + N(p)^{2k-1}`.
pub fn hecke_eigenvalue(kappa: u32, norm: u64) -> BigRational {
    BigRational::one() + num_traits::pow(big(norm as u128), (2 * kappa - 1) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: i64, k: u32, j: usize) -> EisensteinSpec {
        EisensteinSpec::for_field(d, k, j).unwrap()
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_value(0, -1, 3, Complex64::new(0.3, 0.0)), Complex64::new(1.0, 0.0));
        assert_eq!(psi_value(-1, 1, 3, Complex64::new(0.3, 0.0)), Complex64::zero());
        let y = Complex64::new(2f64.powf(-1.5), 0.0);
        let v = psi_value(1, 1, 2, y) * 2f64.powf(1.5);
        assert!((v.re - 7.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_examples() {
        let s = spec(10, 2, 0);
        let f = s.field().clone();
        let p2 = crate::ideal::factor_rational_prime(&f, 2)[0];
        let a = FactoredIdeal::from_factors(vec![(p2, 2)]);
        assert_eq!(twisted_sigma(3, s.chi_prime(), &a), CycRat::from_int(73));
        assert_eq!(twisted_sigma(3, s.chi_prime(), &FactoredIdeal::unit()), CycRat::one());
        let q = spec(0, 2, 0);
        let two = FactoredIdeal::prime(crate::ideal::factor_rational_prime(q.field(), 2)[0]);
        assert_eq!(twisted_sigma(3, q.chi_prime(), &two), CycRat::from_int(9));
    }

    #[test]
    fn frak_c_examples() {
        let q = spec(0, 2, 0);
        assert_eq!(frak_c(&q, &FieldElement::from_ints(4, 0)).unwrap(), CycRat::from_int(7));
        assert_eq!(frak_c(&q, &FieldElement::from_ints(5, 0)).unwrap(), CycRat::one());
        assert!(frak_c(&q, &FieldElement::from_ints(3, 0)).is_err());
        let s = spec(10, 2, 0);
        assert_eq!(frak_c(&s, &FieldElement::from_ints(4, 0)).unwrap(), CycRat::from_int(55));
    }

    #[test]
    fn coefficient_examples() {
        let s = spec(10, 2, 0);
        let c = |a, b| eisenstein_coefficient(&s, &FieldElement::from_ints(a, b)).unwrap();
        assert_eq!(c(0, 0), CycRat::from_frac(1577, 60));
        assert_eq!(c(1, 0), CycRat::from_frac(7, 6));
        assert_eq!(c(3, 0), CycRat::zero());
        let t = spec(10, 2, 1);
        assert_eq!(eisenstein_coefficient(&t, &FieldElement::from_ints(1, 0)).unwrap(), CycRat::from_frac(2, 5));
    }

    #[test]
    fn weight_three_halves_over_q_is_rejected() {
        assert!(matches!(EisensteinSpec::for_field(0, 1, 0), Err(Error::Unsupported(_))));
    }
}
