//! Lazily evaluated coefficient sources and the Hecke operator `T+(alpha^2)`.
//!
//! `T+(alpha^2)` reads `c(xi alpha^2)`, whose trace is far beyond the output range, so series
//! entering it are described by how to compute a single coefficient rather than by a stored
//! table.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::base_field::{BaseField, FieldElement, OmegaKind};
use crate::cyclo::CycRat;
use crate::ideal::{factor_principal, PrimeIdeal};
use crate::quad_invariants::{chi_xi_at_prime, is_square_mod4};
use crate::{Error, Result};

use super::QExpansion;

/// Anything that can produce the coefficient `c(xi)` of a q-expansion on demand.
pub trait CoefficientSource: Send + Sync {
    fn field(&self) -> &BaseField;

    /// `c(xi)`; indices that are not integral and totally positive (or zero) give 0.
    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat>;

    /// All nonzero terms of trace at most `t`, when the source can list them cheaply.
    fn terms_below(&self, _t: i64) -> Option<Result<Vec<(FieldElement, CycRat)>>> {
        None
    }
}

fn trace_i64(f: &BaseField, x: &FieldElement) -> i64 {
    f.trace(x).to_integer().to_i64().expect("trace fits in i64")
}

/// Is `xi` an admissible index: integral and totally positive or zero.
pub(crate) fn is_index(f: &BaseField, xi: &FieldElement) -> bool {
    xi.is_integral() && (xi.is_zero() || f.is_totally_positive(xi))
}

impl CoefficientSource for QExpansion {
    fn field(&self) -> &BaseField {
        &self.field
    }

    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat> {
        if !is_index(&self.field, xi) {
            return Ok(CycRat::zero());
        }
        if trace_i64(&self.field, xi) > self.trace_bound {
            return Err(Error::Computation(format!(
                "coefficient at {} lies beyond the trace bound {}",
                self.field.format(xi),
                self.trace_bound
            )));
        }
        Ok(QExpansion::coefficient(self, xi))
    }

    fn terms_below(&self, t: i64) -> Option<Result<Vec<(FieldElement, CycRat)>>> {
        if t > self.trace_bound {
            return Some(Err(Error::Computation(format!("terms up to trace {t} exceed the bound {}", self.trace_bound))));
        }
        let f = &self.field;
        Some(Ok(self
            .terms()
            .into_iter()
            .filter(|(x, _)| trace_i64(f, x) <= t)
            .map(|(x, v)| (x.clone(), v.clone()))
            .collect()))
    }
}

/// Integral `y` with `0 <= y <= xi` in every embedding (both ends included).
pub fn box_elements(f: &BaseField, xi: &FieldElement) -> Vec<FieldElement> {
    let t = trace_i64(f, xi);
    if f.is_rational() {
        return (0..=t).map(|a| FieldElement::from_ints(a, 0)).collect();
    }
    let sd = (f.d() as f64).sqrt();
    let tw = f.omega_trace();
    let bmax = match f.omega_kind() {
        OmegaKind::HalfInteger => (t as f64 / sd).ceil() as i64 + 1,
        _ => (t as f64 / (2.0 * sd)).ceil() as i64 + 1,
    };
    let mut out = Vec::new();
    for tr in 0..=t {
        for b in -bmax..=bmax {
            let twice_a = tr - b * tw;
            if twice_a % 2 != 0 {
                continue;
            }
            let y = FieldElement::from_ints(twice_a / 2, b);
            if f.is_tp_or_zero(&y) && f.is_tp_or_zero(&(xi - &y)) {
                out.push(y);
            }
        }
    }
    out
}

/// `f(k z)`.
pub struct Dilated {
    pub factor: i64,
    pub inner: Arc<dyn CoefficientSource>,
}

impl CoefficientSource for Dilated {
    fn field(&self) -> &BaseField {
        self.inner.field()
    }

    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat> {
        let y = xi.scale(&BigRational::new(BigInt::from(1), BigInt::from(self.factor)));
        if !is_index(self.field(), &y) {
            return Ok(CycRat::zero());
        }
        self.inner.coefficient(&y)
    }

    fn terms_below(&self, t: i64) -> Option<Result<Vec<(FieldElement, CycRat)>>> {
        let inner = self.inner.terms_below(t.div_euclid(self.factor))?;
        Some(inner.map(|v| v.into_iter().map(|(x, c)| (x.scale_int(self.factor), c)).collect()))
    }
}

/// `a(z) b(z)`; a factor that lists its terms drives the convolution.
pub struct Product {
    pub left: Arc<dyn CoefficientSource>,
    pub right: Arc<dyn CoefficientSource>,
}

impl CoefficientSource for Product {
    fn field(&self) -> &BaseField {
        self.left.field()
    }

    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat> {
        let f = self.field();
        if !is_index(f, xi) {
            return Ok(CycRat::zero());
        }
        let t = trace_i64(f, xi);
        let (sparse, other) = match self.left.terms_below(t) {
            Some(terms) => (Some(terms?), &self.right),
            None => match self.right.terms_below(t) {
                Some(terms) => (Some(terms?), &self.left),
                None => (None, &self.right),
            },
        };
        let mut s = CycRat::zero();
        match sparse {
            Some(terms) => {
                for (x, c) in terms {
                    let rest = xi - &x;
                    if f.is_tp_or_zero(&rest) {
                        s = &s + &(&c * &other.coefficient(&rest)?);
                    }
                }
            }
            None => {
                for y in box_elements(f, xi) {
                    let a = self.left.coefficient(&y)?;
                    if a.is_zero() {
                        continue;
                    }
                    s = &s + &(&a * &self.right.coefficient(&(xi - &y))?);
                }
            }
        }
        Ok(s)
    }
}

/// `sum_i c_i f_i`.
pub struct LinearCombination {
    pub field: BaseField,
    pub terms: Vec<(CycRat, Arc<dyn CoefficientSource>)>,
}

impl CoefficientSource for LinearCombination {
    fn field(&self) -> &BaseField {
        &self.field
    }

    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat> {
        let mut s = CycRat::zero();
        for (c, src) in &self.terms {
            s = &s + &(c * &src.coefficient(xi)?);
        }
        Ok(s)
    }
}

/// `T+_{k+1/2}(alpha^2) f` for `(alpha)` an odd prime ideal.
pub struct HeckeImage {
    kappa: u32,
    alpha_sq: FieldElement,
    prime: PrimeIdeal,
    inner: Arc<dyn CoefficientSource>,
}

impl HeckeImage {
    pub fn new(kappa: u32, alpha: &FieldElement, inner: Arc<dyn CoefficientSource>) -> Result<Self> {
        let f = inner.field();
        if kappa == 0 {
            return Err(Error::InvalidInput("kappa must be at least 1".into()));
        }
        if alpha.is_zero() || !alpha.is_integral() {
            return Err(Error::InvalidInput("alpha must be a nonzero integral element".into()));
        }
        let fac = factor_principal(f, alpha)?;
        let prime = match fac.factors() {
            [(p, 1)] => *p,
            _ => return Err(Error::InvalidInput(format!("({}) is not a prime ideal", f.format(alpha)))),
        };
        if prime.p == 2 {
            return Err(Error::InvalidInput("T+ is only defined here for odd primes".into()));
        }
        Ok(HeckeImage { kappa, alpha_sq: f.mul(alpha, alpha), prime, inner })
    }

    pub fn prime(&self) -> &PrimeIdeal {
        &self.prime
    }

    /// Largest trace bound `t` with `trace(xi alpha^2) <= t_in` for every `xi` of trace `<= t`.
    pub fn output_bound(&self, t_in: i64) -> i64 {
        let f = self.inner.field();
        let m = f.embeddings(&self.alpha_sq).into_iter().fold(0.0f64, f64::max);
        let mut t = (t_in as f64 / m).floor() as i64;
        // guard against rounding in the float estimate
        while t > 0 && f.enumerate_totally_positive(t).iter().any(|x| trace_i64(f, &f.mul(x, &self.alpha_sq)) > t_in) {
            t -= 1;
        }
        t.max(0)
    }

    fn symbol(&self, xi: &FieldElement) -> Result<i64> {
        let f = self.inner.field();
        let eta = if self.kappa % 2 == 0 { 1 } else { -1 };
        let g = xi.to_i128_pair().expect("integral index");
        if self.prime.ideal.contains(g) {
            return Ok(0);
        }
        Ok(chi_xi_at_prime(f, &xi.scale_int(eta), &self.prime)? as i64)
    }
}

impl CoefficientSource for HeckeImage {
    fn field(&self) -> &BaseField {
        self.inner.field()
    }

    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat> {
        let f = self.inner.field();
        if !is_index(f, xi) {
            return Ok(CycRat::zero());
        }
        let n = BigInt::from(self.prime.norm());
        let big_n = |e: u32| BigRational::from_integer(num_traits::pow(n.clone(), e as usize));
        let top = big_n(2 * self.kappa - 1);
        if xi.is_zero() {
            let c0 = self.inner.coefficient(xi)?;
            return Ok(&c0 + &c0.scale(&top));
        }
        let eta = if self.kappa % 2 == 0 { 1 } else { -1 };
        if !is_square_mod4(f, &xi.scale_int(eta)) {
            return Ok(CycRat::zero());
        }
        let mut s = self.inner.coefficient(&f.mul(xi, &self.alpha_sq))?;
        let sym = self.symbol(xi)?;
        if sym != 0 {
            let mid = big_n(self.kappa - 1) * BigRational::from_integer(sym.into());
            s = &s + &self.inner.coefficient(xi)?.scale(&mid);
        }
        let down = f.div(xi, &self.alpha_sq);
        if down.is_integral() {
            s = &s + &self.inner.coefficient(&down)?.scale(&top);
        }
        Ok(s)
    }
}

/// Evaluate a source on every index of trace at most `t`.
pub fn materialize(src: &dyn CoefficientSource, label: impl Into<String>, t: i64) -> Result<QExpansion> {
    let f = src.field().clone();
    let vals: Vec<(FieldElement, CycRat)> = f
        .enumerate_totally_positive(t)
        .into_par_iter()
        .map(|xi| src.coefficient(&xi).map(|v| (xi, v)))
        .collect::<Result<_>>()?;
    let mut q = QExpansion::new(f, label, t);
    for (xi, v) in vals {
        q.insert(xi, v);
    }
    Ok(q)
}

/// `T+(alpha^2) f` on a stored expansion; the output bound shrinks so that every `c(xi alpha^2)`
/// read is covered by the input.
pub fn hecke_t_plus(kappa: u32, alpha: &FieldElement, f: &QExpansion) -> Result<QExpansion> {
    if f.exponent_denominator != 1 {
        return Err(Error::InvalidInput("T+ needs integral exponents".into()));
    }
    let src: Arc<dyn CoefficientSource> = Arc::new(f.clone());
    let h = HeckeImage::new(kappa, alpha, src)?;
    let t = h.output_bound(f.trace_bound);
    if t < 1 {
        return Err(Error::InvalidInput(format!(
            "trace bound {} is too small for T+(({})^2): no output coefficient can be certified",
            f.trace_bound,
            f.field.format(alpha)
        )));
    }
    let label = format!("T+(({})^2) {}", f.field.format(alpha), f.label);
    materialize(&h, label, t)
}

/// `T+(alpha^2)` applied to a lazily evaluated source, up to trace `t_out`.
pub fn hecke_t_plus_lazy(
    kappa: u32,
    alpha: &FieldElement,
    src: Arc<dyn CoefficientSource>,
    t_out: i64,
) -> Result<QExpansion> {
    let label = format!("T+(({})^2) f", src.field().format(alpha));
    let h = HeckeImage::new(kappa, alpha, src)?;
    materialize(&h, label, t_out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_contains_endpoints() {
        let f = BaseField::new(10).unwrap();
        let xi = FieldElement::from_ints(7, 2);
        let b = box_elements(&f, &xi);
        assert!(b.contains(&FieldElement::zero()));
        assert!(b.contains(&xi));
        assert!(b.iter().all(|y| f.is_tp_or_zero(&(&xi - y))));
    }

    #[test]
    fn non_prime_alpha_is_rejected() {
        let f = BaseField::new(10).unwrap();
        let q: Arc<dyn CoefficientSource> = Arc::new(QExpansion::new(f, "zero", 10));
        assert!(HeckeImage::new(2, &FieldElement::from_ints(3, 0), q.clone()).is_err());
        assert!(HeckeImage::new(2, &FieldElement::from_ints(2, 0), q.clone()).is_err());
        assert!(HeckeImage::new(2, &FieldElement::from_ints(3, -2), q).is_ok());
    }
}
