//! Classical series: theta functions, weight-2 Eisenstein series attached to ideal classes,
//! and Cohen's series over `Q`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{divisors_int, kronecker, moebius_int};
use crate::base_field::{BaseField, FieldElement};
use crate::class_group::ClassGroup;
use crate::cyclo::CycRat;
use crate::ideal::{factor_principal, factor_rational_prime, Ideal};
use crate::lvalues::{fundamental_discriminant, kronecker_l_value, LFunctions};
use crate::{Error, Result};

use super::sources::{is_index, materialize, CoefficientSource};
use super::QExpansion;

/// Which classical series to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicalKind {
    /// `sum_{x in o} q^{x^2}`.
    Theta1,
    /// `sum_{x in p5} q^{x^2 / 5}` for the prime `p5` with `p5^2 = (5)`.
    Theta2,
    /// `zeta_{F,i}(-1)/4 + sum_{xi >> 0} sigma_{1,i}(xi) q^xi` for the class with index `i`
    /// (index 0 is the principal class).
    E2(usize),
}

/// A theta series `sum_{x in L} q^{x^2 / n}`.
pub struct Theta {
    field: BaseField,
    lattice: Option<Ideal>,
    divisor: i64,
}

impl Theta {
    pub fn unit_lattice(field: &BaseField) -> Self {
        Theta { field: field.clone(), lattice: None, divisor: 1 }
    }

    /// The series over the prime above 5, which must be ramified.
    pub fn over_ramified_five(field: &BaseField) -> Result<Self> {
        let ps = factor_rational_prime(field, 5);
        match ps.as_slice() {
            [p] if p.ram_index == 2 => Ok(Theta { field: field.clone(), lattice: Some(p.ideal), divisor: 5 }),
            _ => Err(Error::InvalidInput(format!("5 does not ramify in the field of discriminant {}", field.disc()))),
        }
    }

    fn in_lattice(&self, x: &FieldElement) -> bool {
        x.is_integral() && self.lattice.as_ref().map_or(true, |l| l.contains_elem(x))
    }

    /// Integral `x` in the lattice with `x^2 = n xi`.
    fn roots(&self, xi: &FieldElement) -> Vec<FieldElement> {
        let f = &self.field;
        let target = xi.scale_int(self.divisor);
        if target.is_zero() {
            return vec![FieldElement::zero()];
        }
        let emb = f.embeddings(&target);
        if emb.iter().any(|&e| e <= 0.0) {
            return Vec::new();
        }
        let mut out = Vec::new();
        let half = |n: f64| BigRational::new(BigInt::from(n.round() as i64), BigInt::from(2));
        if f.is_rational() {
            let r = emb[0].sqrt();
            for s in [r, -r] {
                let x = FieldElement::new(half(2.0 * s), BigRational::zero());
                if !out.contains(&x) && f.mul(&x, &x) == target && self.in_lattice(&x) {
                    out.push(x);
                }
            }
            return out;
        }
        let sd = (f.d() as f64).sqrt();
        let (r1, r2) = (emb[0].sqrt(), emb[1].sqrt());
        for (a, b) in [(r1, r2), (r1, -r2), (-r1, r2), (-r1, -r2)] {
            let x = f.from_sqrt_coords(half(a + b), half((a - b) / sd));
            if !out.contains(&x) && f.mul(&x, &x) == target && self.in_lattice(&x) {
                out.push(x);
            }
        }
        out
    }
}

impl CoefficientSource for Theta {
    fn field(&self) -> &BaseField {
        &self.field
    }

    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat> {
        if !is_index(&self.field, xi) {
            return Ok(CycRat::zero());
        }
        Ok(CycRat::from_int(self.roots(xi).len() as i64))
    }

    fn terms_below(&self, t: i64) -> Option<Result<Vec<(FieldElement, CycRat)>>> {
        // x = u + v sqrt(D) with (2u, 2v) = (a, b): trace(x^2) = (a^2 + D b^2) / 2
        let f = &self.field;
        let lim = 2 * t * self.divisor;
        let d = if f.is_rational() { 0 } else { f.d() };
        let inv = BigRational::new(BigInt::from(1), BigInt::from(self.divisor));
        let mut acc: BTreeMap<FieldElement, i64> = BTreeMap::new();
        let amax = (lim as f64).sqrt() as i64 + 1;
        for a in -amax..=amax {
            if a * a > lim {
                continue;
            }
            let bmax = if d == 0 { 0 } else { (((lim - a * a) as f64) / d as f64).sqrt() as i64 + 1 };
            for b in -bmax..=bmax {
                if a * a + d * b * b > lim {
                    continue;
                }
                let x = f.from_sqrt_coords(BigRational::new(a.into(), 2.into()), BigRational::new(b.into(), 2.into()));
                if !self.in_lattice(&x) {
                    continue;
                }
                let y = f.mul(&x, &x).scale(&inv);
                *acc.entry(y).or_insert(0) += 1;
            }
        }
        let mut v: Vec<_> = acc.into_iter().map(|(x, n)| (x, CycRat::from_int(n))).collect();
        v.sort_by_cached_key(|(x, _)| f.sort_key(x));
        Some(Ok(v))
    }
}

/// Weight-2 Eisenstein series of an ideal class.
pub struct ClassEisenstein2 {
    group: Arc<ClassGroup>,
    class: usize,
    constant: BigRational,
}

impl ClassEisenstein2 {
    pub fn new(group: Arc<ClassGroup>, class: usize) -> Result<Self> {
        if class >= group.order() {
            return Err(Error::InvalidInput(format!("class index {class} out of range (h = {})", group.order())));
        }
        let four = BigRational::from_integer(BigInt::from(4));
        let constant = if group.field().is_rational() {
            kronecker_l_value(2, 1) / four
        } else {
            LFunctions::new(group.clone()).partial_zeta(class, 2)? / four
        };
        Ok(ClassEisenstein2 { group, class, constant })
    }
}

impl CoefficientSource for ClassEisenstein2 {
    fn field(&self) -> &BaseField {
        self.group.field()
    }

    fn coefficient(&self, xi: &FieldElement) -> Result<CycRat> {
        let f = self.group.field();
        if !is_index(f, xi) {
            return Ok(CycRat::zero());
        }
        if xi.is_zero() {
            return Ok(CycRat::from_rational(self.constant.clone()));
        }
        let mut s = BigInt::zero();
        for c in factor_principal(f, xi)?.divisors() {
            if self.group.class_of(&c) == self.class {
                s += BigInt::from(c.norm());
            }
        }
        Ok(CycRat::from_rational(BigRational::from_integer(s)))
    }
}

/// A lazy source for one of the classical series.
pub fn classical_source(group: &Arc<ClassGroup>, kind: ClassicalKind) -> Result<Arc<dyn CoefficientSource>> {
    let f = group.field();
    Ok(match kind {
        ClassicalKind::Theta1 => Arc::new(Theta::unit_lattice(f)),
        ClassicalKind::Theta2 => Arc::new(Theta::over_ramified_five(f)?),
        ClassicalKind::E2(i) => Arc::new(ClassEisenstein2::new(group.clone(), i)?),
    })
}

/// The series on every index of trace at most `t`.
pub fn classical_series(group: &Arc<ClassGroup>, kind: ClassicalKind, t: i64) -> Result<QExpansion> {
    if t < 1 {
        return Err(Error::InvalidInput("trace bound must be at least 1".into()));
    }
    let src = classical_source(group, kind)?;
    let label = match kind {
        ClassicalKind::Theta1 => "theta_1".to_string(),
        ClassicalKind::Theta2 => "theta_2".to_string(),
        ClassicalKind::E2(i) => format!("E_2 (class {i})"),
    };
    match src.terms_below(t) {
        Some(terms) => {
            let mut q = QExpansion::new(group.field().clone(), label, t);
            for (x, v) in terms? {
                q.insert(x, v);
            }
            Ok(q)
        }
        None => materialize(src.as_ref(), label, t),
    }
}

/// Cohen's coefficient `H(r, n)`: `zeta(1 - 2r)` at `n = 0`; otherwise, with
/// `(-1)^r n = d f^2` and `d` a fundamental discriminant,
/// `L(1 - r, chi_d) sum_{a | f} mu(a) chi_d(a) a^{r-1} sigma_{2r-1}(f / a)`, and 0 when
/// `(-1)^r n = 2, 3 mod 4`.
pub fn cohen_coefficient(r: u32, n: u64) -> Result<BigRational> {
    if r < 2 {
        return Err(Error::InvalidInput("Cohen's series needs r >= 2".into()));
    }
    if n == 0 {
        return Ok(kronecker_l_value(2 * r as usize, 1));
    }
    let disc = if r % 2 == 0 { n as i64 } else { -(n as i64) };
    if matches!(disc.rem_euclid(4), 2 | 3) {
        return Ok(BigRational::zero());
    }
    let (d, f) = fundamental_discriminant(disc);
    let f = f.ok_or_else(|| Error::Computation(format!("{disc} is not a discriminant times a square")))?;
    let mut s = BigInt::zero();
    for a in divisors_int(f) {
        let mu = moebius_int(a);
        let c = kronecker(d as i128, a as i128);
        if mu == 0 || c == 0 {
            continue;
        }
        let sigma: BigInt = divisors_int(f / a).into_iter().map(|b| num_traits::pow(BigInt::from(b), (2 * r - 1) as usize)).sum();
        s += BigInt::from(mu * c) * num_traits::pow(BigInt::from(a), (r - 1) as usize) * sigma;
    }
    Ok(kronecker_l_value(r as usize, d) * BigRational::from_integer(s))
}

/// Cohen's series `H_r` over `Q` for `0 <= n <= n_max`.
pub fn cohen_series(r: u32, n_max: u64) -> Result<QExpansion> {
    let bound = n_max.to_i64().ok_or_else(|| Error::InvalidInput("bound too large".into()))?;
    let mut q = QExpansion::new(BaseField::rational(), format!("H_{r}"), bound);
    for n in 0..=n_max {
        q.insert(FieldElement::from_ints(n as i64, 0), CycRat::from_rational(cohen_coefficient(r, n)?));
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn cohen_examples() {
        let v: Vec<_> = (0..=5).map(|n| cohen_coefficient(2, n).unwrap()).collect();
        assert_eq!(v, vec![q(1, 120), q(-1, 12), q(0, 1), q(0, 1), q(-7, 12), q(-2, 5)]);
        assert!(cohen_coefficient(1, 3).is_err());
    }

    #[test]
    fn theta_counts() {
        let g = ClassGroup::compute(&BaseField::rational()).unwrap();
        let t = classical_series(&g, ClassicalKind::Theta1, 10).unwrap();
        let c = |n| t.coefficient(&FieldElement::from_ints(n, 0));
        assert_eq!((c(0), c(1), c(2), c(4)), (CycRat::one(), CycRat::from_int(2), CycRat::zero(), CycRat::from_int(2)));
        let f = BaseField::new(10).unwrap();
        let g = ClassGroup::compute(&f).unwrap();
        let t = classical_series(&g, ClassicalKind::Theta1, 40).unwrap();
        assert_eq!(t.coefficient(&FieldElement::from_ints(19, 6)), CycRat::from_int(2));
        let lazy = Theta::unit_lattice(&f);
        for (x, v) in t.terms() {
            assert_eq!(&lazy.coefficient(x).unwrap(), v);
        }
    }

    #[test]
    fn theta2_needs_ramified_five() {
        let g = ClassGroup::compute(&BaseField::new(2).unwrap()).unwrap();
        assert!(classical_series(&g, ClassicalKind::Theta2, 10).is_err());
        let f = BaseField::new(10).unwrap();
        let g = ClassGroup::compute(&f).unwrap();
        let t = classical_series(&g, ClassicalKind::Theta2, 20).unwrap();
        // x = sqrt(10): x^2 / 5 = 2; x = 5: 5
        assert_eq!(t.coefficient(&FieldElement::from_ints(2, 0)), CycRat::from_int(2));
        assert_eq!(t.coefficient(&FieldElement::from_ints(5, 0)), CycRat::from_int(2));
        let lazy = Theta::over_ramified_five(&f).unwrap();
        for (x, v) in t.terms() {
            assert_eq!(&lazy.coefficient(x).unwrap(), v);
        }
    }

    #[test]
    fn e2_small_coefficients() {
        let f = BaseField::new(10).unwrap();
        let g = ClassGroup::compute(&f).unwrap();
        let one = FieldElement::one();
        let e0 = ClassEisenstein2::new(g.clone(), 0).unwrap();
        let e1 = ClassEisenstein2::new(g.clone(), 1).unwrap();
        assert_eq!(e0.coefficient(&one).unwrap(), CycRat::one());
        assert_eq!(e1.coefficient(&one).unwrap(), CycRat::zero());
        // (2) = p2^2 with p2 non-principal: principal divisors 1, 4; the other class has p2
        let two = FieldElement::from_ints(2, 0);
        assert_eq!(e0.coefficient(&two).unwrap(), CycRat::from_int(5));
        assert_eq!(e1.coefficient(&two).unwrap(), CycRat::from_int(2));
        let sum = &e0.coefficient(&FieldElement::zero()).unwrap() + &e1.coefficient(&FieldElement::zero()).unwrap();
        assert_eq!(sum, CycRat::from_frac(7, 24));
    }
}
