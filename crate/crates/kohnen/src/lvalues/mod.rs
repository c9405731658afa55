//! L-values `L_F(1 - k, chi)` at non-positive integers for characters
//! `chi = chi_xi * psi`, `chi_xi` the quadratic character of `F(sqrt xi)/F` and `psi`
//! a character of the wide class group.
//!
//! Over a real quadratic field the exact value is a finite sum of cone zeta values:
//! for each class `c` pick an integral ideal `b` in the inverse class; every integral
//! ideal of class `c` is `(mu) b^{-1}` for a totally positive `mu` in `b`, unique up to
//! the totally positive unit. The weight `mu -> chi((mu) b^{-1})` only depends on `mu`
//! modulo `m b`, `m` the conductor of `chi_xi`, so summing over cones that are
//! unimodular for `m b` and over residues of `b / m b` gives the value. When the
//! fundamental unit has norm `+1` the lattice `b sqrt(D)` is added to reach the ideals
//! with no totally positive generator.
//!
//! Over `Q` the values come from generalized Bernoulli numbers.

pub mod bernoulli;
pub mod numeric;
pub mod shintani;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::base_field::{BaseField, FieldElement};
use crate::class_group::{ClassCharacter, ClassGroup};
use crate::cyclo::CycRat;
use crate::ideal::{factor_principal, Ideal, FactoredIdeal};
use crate::quad_invariants::{chi_xi_on_ideal, is_field_square, relative_discriminant};
use crate::{Error, Result};

pub use bernoulli::{fundamental_discriminant, generalized_bernoulli, kronecker_l_value};
pub use numeric::{hecke_l_numeric, NumericLValue};

/// The character `chi_xi * psi` (or `chi_xi * psi^{-1}`) on integral ideals.
#[derive(Clone, Debug)]
pub struct CharacterSpec {
    pub field: BaseField,
    pub twist_xi: Option<FieldElement>,
    pub class_char: ClassCharacter,
    pub conjugate_class_char: bool,
    /// Conductor of `chi_xi` (the relative discriminant of `F(sqrt xi)/F`).
    pub modulus: FactoredIdeal,
}

impl CharacterSpec {
    pub fn new(twist_xi: Option<FieldElement>, class_char: ClassCharacter, conjugate_class_char: bool) -> Result<Self> {
        let field = class_char.group().field().clone();
        let modulus = match &twist_xi {
            None => FactoredIdeal::unit(),
            Some(x) if x.is_zero() => return Err(Error::InvalidInput("twist must be nonzero".into())),
            Some(x) => relative_discriminant(&field, x)?.disc,
        };
        Ok(CharacterSpec { field, twist_xi, class_char, conjugate_class_char, modulus })
    }

    /// `chi_xi` alone.
    pub fn quadratic(group: &Arc<ClassGroup>, xi: FieldElement) -> Result<Self> {
        Self::new(Some(xi), ClassCharacter::trivial(group), false)
    }

    pub fn trivial(group: &Arc<ClassGroup>) -> Self {
        Self::new(None, ClassCharacter::trivial(group), false).expect("trivial character")
    }

    /// The class-group factor with the conjugation flag applied.
    pub fn class_part(&self) -> ClassCharacter {
        if self.conjugate_class_char {
            self.class_char.conj()
        } else {
            self.class_char.clone()
        }
    }

    /// The complex-conjugate character.
    pub fn conj(&self) -> Self {
        CharacterSpec { conjugate_class_char: !self.conjugate_class_char, ..self.clone() }
    }

    /// Values lie in `Q(zeta_m)` for this `m`.
    pub fn cyclotomic_order(&self) -> u32 {
        self.class_char.modulus()
    }

    fn twist_is_trivial(&self) -> bool {
        self.twist_xi.as_ref().map_or(true, |x| is_field_square(&self.field, x))
    }

    pub fn is_trivial(&self) -> bool {
        self.twist_is_trivial() && self.class_char.is_trivial()
    }

    /// 0 if the character is trivial at every real place, 1 if it is the sign at every real
    /// place, `None` for mixed signature.
    pub fn parity(&self) -> Option<u32> {
        let Some(x) = &self.twist_xi else { return Some(0) };
        let signs = self.field.embedding_signs(x);
        if signs.iter().all(|s| s.is_gt()) {
            Some(0)
        } else if signs.iter().all(|s| s.is_lt()) {
            Some(1)
        } else {
            None
        }
    }

    /// `chi_xi(a)` in `{-1, 0, 1}`.
    pub fn quadratic_value(&self, a: &FactoredIdeal) -> Result<i32> {
        match &self.twist_xi {
            None => Ok(1),
            Some(x) => chi_xi_on_ideal(&self.field, x, a),
        }
    }

    /// `chi(a) = sign * zeta_m^k` as `Some((sign, k))`, or `None` when `chi(a) = 0`.
    pub fn value_log(&self, a: &FactoredIdeal) -> Result<Option<(i32, u32)>> {
        let s = self.quadratic_value(a)?;
        if s == 0 {
            return Ok(None);
        }
        Ok(Some((s, self.class_part().log_value(a))))
    }

    pub fn value(&self, a: &FactoredIdeal) -> Result<CycRat> {
        Ok(match self.value_log(a)? {
            None => CycRat::zero(),
            Some((s, k)) => CycRat::root_of_unity(self.cyclotomic_order(), k as i64).scale_int(s as i64),
        })
    }
}

/// `L(1 - r, chi)` over `Q` for a quadratic (or trivial) character via `-B_{r,chi}/r`.
pub fn bernoulli_l_rational(r: u32, chi: &CharacterSpec) -> Result<BigRational> {
    if !chi.field.is_rational() {
        return Err(Error::InvalidInput("base field is not Q".into()));
    }
    if r == 0 {
        return Err(Error::InvalidInput("r must be at least 1".into()));
    }
    let d = match &chi.twist_xi {
        None => 1,
        Some(x) => {
            let n = x
                .to_i128_pair()
                .ok_or_else(|| Error::InvalidInput("twist must be an integer".into()))?
                .0;
            fundamental_discriminant(i64::try_from(n).map_err(|_| Error::InvalidInput("twist too large".into()))?).0
        }
    };
    if d == 1 && r == 1 {
        return Err(Error::InvalidInput("pole: trivial character at s = 0 is excluded".into()));
    }
    Ok(kronecker_l_value(r as usize, d))
}

type ExactKey = (u32, Vec<u32>, FactoredIdeal, Option<u32>);

/// Exact L-values over a fixed field with cached cone tables and results.
///
/// Results are cached by the square class of the twist, so `xi` and `xi * a^2` share one
/// evaluation.
pub struct LFunctions {
    group: Arc<ClassGroup>,
    cones: Mutex<HashMap<Ideal, Arc<Vec<(FieldElement, FieldElement)>>>>,
    values: Mutex<HashMap<ExactKey, Vec<(Option<FieldElement>, CycRat)>>>,
}

impl LFunctions {
    pub fn new(group: Arc<ClassGroup>) -> Self {
        LFunctions { group, cones: Mutex::new(HashMap::new()), values: Mutex::new(HashMap::new()) }
    }

    pub fn group(&self) -> &Arc<ClassGroup> {
        &self.group
    }

    pub fn field(&self) -> &BaseField {
        self.group.field()
    }

    fn cones_for(&self, m: &Ideal) -> Result<Arc<Vec<(FieldElement, FieldElement)>>> {
        if let Some(c) = self.cones.lock().unwrap().get(m) {
            return Ok(c.clone());
        }
        let c = Arc::new(shintani::cones(self.field(), m)?);
        self.cones.lock().unwrap().insert(*m, c.clone());
        Ok(c)
    }

    /// Lattices `b` (and `b sqrt D` when needed) whose totally positive elements modulo the
    /// totally positive unit parametrize the integral ideals of class `c`.
    fn lattices_for_class(&self, c: usize) -> Result<Vec<(Ideal, FactoredIdeal)>> {
        let f = self.field();
        let inv = self.group.inv(c);
        let b = *self.group.rep_ideal(inv);
        let bf = self.group.reps()[inv].clone();
        let mut out = vec![(b, bf.clone())];
        if f.unit_norm() == 1 {
            let s = f.sqrt_d();
            let sf = factor_principal(f, &s)?;
            out.push((b.mul(f, &Ideal::principal(f, &s)?), bf.mul(&sf)));
        }
        Ok(out)
    }

    /// `sum over mu` of `chi_xi((mu) c^{-1}) * N(mu)^{m-1}` over `mu >> 0` in `lat` modulo the
    /// totally positive unit, normalized by `N(lat)^{1-m}`.
    fn lattice_sum(&self, chi: &CharacterSpec, m: u32, lat: &Ideal, lat_f: &FactoredIdeal) -> Result<BigRational> {
        let f = self.field();
        let modulus = if chi.twist_is_trivial() { Ideal::unit() } else { chi.modulus.to_ideal(f) };
        let sub = lat.mul(f, &modulus);
        let cones = self.cones_for(&sub)?;
        let reps = shintani::residues(lat, &sub);
        // weights are constant on residue classes; evaluate once on the first cone
        let (w1, w2) = &cones[0];
        let mut weights = Vec::with_capacity(reps.len());
        for r in &reps {
            let w = if chi.twist_is_trivial() {
                1
            } else {
                let (_, _, mu) = shintani::box_point(r, w1, w2);
                let a = factor_principal(f, &mu)?.div(lat_f);
                chi.quadratic_value(&a)?
            };
            weights.push(w);
        }
        let mut total = BigRational::zero();
        for (v1, v2) in cones.iter() {
            let coeffs = shintani::cone_coefficients(f, m, v1, v2);
            for (r, &w) in reps.iter().zip(&weights) {
                if w == 0 {
                    continue;
                }
                let (x1, x2, _) = shintani::box_point(r, v1, v2);
                let z = shintani::cone_value(&coeffs, &x1, &x2);
                if w > 0 {
                    total += z;
                } else {
                    total -= z;
                }
            }
        }
        let n = BigRational::from_integer(BigInt::from(lat.norm()));
        Ok(total / num_traits::pow(n, m as usize - 1))
    }

    /// Exact `L_F(1 - m, chi)`.
    pub fn exact(&self, m: u32, chi: &CharacterSpec) -> Result<CycRat> {
        if m == 0 {
            return Err(Error::InvalidInput("argument 1 - m needs m >= 1".into()));
        }
        if m == 1 && chi.is_trivial() {
            return Err(Error::InvalidInput("pole: trivial character at s = 0 is excluded".into()));
        }
        if chi.field.is_rational() {
            return bernoulli_l_rational(m, chi).map(CycRat::from_rational);
        }
        let psi = chi.class_part();
        let key: ExactKey = (m, psi.exponent_vector().to_vec(), chi.modulus.clone(), chi.parity());
        let twist = if chi.twist_is_trivial() { None } else { chi.twist_xi.clone() };
        if let Some(list) = self.values.lock().unwrap().get(&key) {
            for (t, v) in list {
                let same = match (t, &twist) {
                    (None, None) => true,
                    (Some(a), Some(b)) => crate::quad_invariants::same_square_class(self.field(), a, b),
                    _ => false,
                };
                if same {
                    return Ok(v.clone());
                }
            }
        }
        let order = psi.modulus();
        let mut acc = vec![BigRational::zero(); order as usize];
        for c in 0..self.group.order() {
            let k = psi.log_on_class(c) as usize;
            for (lat, lat_f) in self.lattices_for_class(c)? {
                acc[k] += self.lattice_sum(chi, m, &lat, &lat_f)?;
            }
        }
        let v = CycRat::from_power_sum(order, acc);
        self.values.lock().unwrap().entry(key).or_default().push((twist, v.clone()));
        Ok(v)
    }

    /// `zeta_{F,i}(1 - m)`: the partial zeta function of the ideals in class `i`.
    pub fn partial_zeta(&self, class: usize, m: u32) -> Result<BigRational> {
        if class >= self.group.order() {
            return Err(Error::InvalidInput(format!("class index {class} out of range")));
        }
        if m == 0 {
            return Err(Error::InvalidInput("argument 1 - m needs m >= 1".into()));
        }
        let chi = CharacterSpec::trivial(&self.group);
        let mut s = BigRational::zero();
        for (lat, lat_f) in self.lattices_for_class(class)? {
            s += self.lattice_sum(&chi, m, &lat, &lat_f)?;
        }
        Ok(s)
    }
}

/// Exact `L_F(1 - k, chi)` (one-off evaluation without a shared cache).
pub fn hecke_l_exact(kappa: u32, chi: &CharacterSpec) -> Result<CycRat> {
    LFunctions::new(chi.class_char.group().clone()).exact(kappa, chi)
}

/// Exact partial zeta value `zeta_{F,i}(1 - k)` of a real quadratic field.
pub fn zeta_partial_class(group: &Arc<ClassGroup>, class: usize, kappa: u32) -> Result<BigRational> {
    if group.field().is_rational() {
        return Err(Error::InvalidInput("partial zeta values need a real quadratic field".into()));
    }
    LFunctions::new(group.clone()).partial_zeta(class, kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> CycRat {
        CycRat::from_frac(n, d)
    }

    #[test]
    fn rational_values() {
        let g = ClassGroup::compute(&BaseField::rational()).unwrap();
        assert_eq!(hecke_l_exact(2, &CharacterSpec::trivial(&g)).unwrap(), q(-1, 12));
        assert_eq!(hecke_l_exact(4, &CharacterSpec::trivial(&g)).unwrap(), q(1, 120));
        let chi5 = CharacterSpec::quadratic(&g, FieldElement::from_ints(5, 0)).unwrap();
        assert_eq!(hecke_l_exact(2, &chi5).unwrap(), q(-2, 5));
        let chi20 = CharacterSpec::quadratic(&g, FieldElement::from_ints(20, 0)).unwrap();
        assert_eq!(hecke_l_exact(2, &chi20).unwrap(), q(-2, 5));
        assert!(hecke_l_exact(1, &CharacterSpec::trivial(&g)).is_err());
    }

    #[test]
    fn q_sqrt10_zeta_and_partials() {
        let g = ClassGroup::compute(&BaseField::new(10).unwrap()).unwrap();
        let l = LFunctions::new(g.clone());
        let one = CharacterSpec::trivial(&g);
        assert_eq!(l.exact(2, &one).unwrap(), q(7, 6));
        assert_eq!(l.exact(4, &one).unwrap(), q(1577, 60));
        let z1 = l.partial_zeta(0, 2).unwrap();
        let z2 = l.partial_zeta(1, 2).unwrap();
        assert_eq!(CycRat::from_rational(z1.clone()), q(47, 60));
        assert_eq!(CycRat::from_rational(z2.clone()), q(23, 60));
        let genus = CharacterSpec::new(None, g.character(1).unwrap(), false).unwrap();
        assert_eq!(l.exact(2, &genus).unwrap(), q(2, 5));
    }

    #[test]
    fn quadratic_twist_over_q_sqrt5_matches_product_formula() {
        // L_F(s, chi_{-1}) = L(s, chi_{-4}) L(s, chi_{-20}) for F = Q(sqrt 5)
        let f = BaseField::new(5).unwrap();
        let g = ClassGroup::compute(&f).unwrap();
        let chi = CharacterSpec::quadratic(&g, FieldElement::from_ints(-1, 0)).unwrap();
        let l = hecke_l_exact(1, &chi).unwrap();
        let expect = kronecker_l_value(1, -4) * kronecker_l_value(1, -20);
        assert_eq!(l, CycRat::from_rational(expect));
        let l3 = hecke_l_exact(3, &chi).unwrap();
        let expect3 = kronecker_l_value(3, -4) * kronecker_l_value(3, -20);
        assert_eq!(l3, CycRat::from_rational(expect3));
    }
}
