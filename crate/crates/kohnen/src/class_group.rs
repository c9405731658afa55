//! The wide ideal class group and its characters.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::arith::primes_up_to;
use crate::base_field::BaseField;
use crate::cyclo::CycRat;
use crate::ideal::{factor_rational_prime, norm_int, FactoredIdeal, Ideal, PrimeIdeal};
use crate::{Error, Result};

/// Search for a generator of `i`: an element of `i` with `|N| = N(i)`.
///
/// Every principal ideal has a generator with both embeddings bounded by
/// `sqrt(N(i) * eps)` in absolute value, so the search is complete.
pub fn find_generator(f: &BaseField, i: &Ideal) -> Option<(i128, i128)> {
    let (a_, b_, c_) = i.hnf();
    if f.is_rational() {
        return Some((a_, 0));
    }
    let n = i.norm();
    let eps = f.embeddings(f.fund_unit())[0];
    let r = ((n as f64) * eps).sqrt() * (1.0 + 1e-9) + 1.0;
    let sd = (f.d() as f64).sqrt();
    let (w1, w2) = match f.omega_trace() {
        1 => ((1.0 + sd) / 2.0, (1.0 - sd) / 2.0),
        _ => (sd, -sd),
    };
    let bmax = (2.0 * r / (w1 - w2)).ceil() as i128 + 1;
    let kmax = bmax / c_ + 1;
    for k in -kmax..=kmax {
        let b = k * c_;
        let lo = (-r - b as f64 * w2).max(-r - b as f64 * w1).floor() as i128 - 1;
        let hi = (r - b as f64 * w2).min(r - b as f64 * w1).ceil() as i128 + 1;
        if lo > hi {
            continue;
        }
        // a must be congruent to k*B mod A
        let base = (k * b_).rem_euclid(a_);
        let start = lo + (base - lo).rem_euclid(a_);
        let mut a = start;
        while a <= hi {
            if norm_int(f, (a, b)).abs() == n {
                debug_assert!(i.contains((a, b)));
                return Some((a, b));
            }
            a += a_;
        }
    }
    None
}

pub fn is_principal(f: &BaseField, i: &Ideal) -> bool {
    find_generator(f, i).is_some()
}

/// The wide class group with a fixed decomposition into cyclic factors.
#[derive(Debug)]
pub struct ClassGroup {
    field: BaseField,
    reps: Vec<FactoredIdeal>,
    rep_ideals: Vec<Ideal>,
    mul_table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
    cycle_structure: Vec<u32>,
    coords: Vec<Vec<u32>>,
    exponent: u32,
    prime_cache: Mutex<HashMap<PrimeIdeal, usize>>,
}

impl ClassGroup {
    pub fn compute(f: &BaseField) -> Result<Arc<ClassGroup>> {
        let mut reps = vec![FactoredIdeal::unit()];
        let mut rep_ideals = vec![Ideal::unit()];
        let mut gens: Vec<PrimeIdeal> = Vec::new();
        if !f.is_rational() {
            let mink = ((f.disc() as f64).sqrt() / 2.0).floor() as u64;
            for p in primes_up_to(mink) {
                for q in factor_rational_prime(f, p) {
                    if q.norm() <= mink {
                        gens.push(q);
                    }
                }
            }
        }
        let conj_reps = |rep_ideals: &Vec<Ideal>| rep_ideals.iter().map(|r| r.conj(f)).collect::<Vec<_>>();
        let mut changed = true;
        while changed {
            changed = false;
            let cr = conj_reps(&rep_ideals);
            let snapshot = reps.clone();
            for r in &snapshot {
                for g in &gens {
                    let x = r.mul(&FactoredIdeal::prime(*g));
                    let xi = x.to_ideal(f);
                    let known = cr.iter().any(|c| is_principal(f, &xi.mul(f, c)));
                    if !known {
                        reps.push(x);
                        rep_ideals.push(xi);
                        changed = true;
                        break;
                    }
                }
                if changed {
                    break;
                }
            }
        }
        let h = reps.len();
        let cr = conj_reps(&rep_ideals);
        let locate = |i: &Ideal| -> Result<usize> {
            let hits: Vec<usize> = (0..h).filter(|&k| is_principal(f, &i.mul(f, &cr[k]))).collect();
            match hits.as_slice() {
                [k] => Ok(*k),
                _ => Err(Error::Computation(format!("class lookup found {} matches", hits.len()))),
            }
        };
        let mut mul_table = vec![vec![0usize; h]; h];
        for i in 0..h {
            for j in i..h {
                let k = locate(&rep_ideals[i].mul(f, &rep_ideals[j]))?;
                mul_table[i][j] = k;
                mul_table[j][i] = k;
            }
        }
        let inverse: Vec<usize> = (0..h).map(|i| (0..h).find(|&j| mul_table[i][j] == 0).unwrap()).collect();
        let (cycle_structure, basis) = decompose(&mul_table);
        let exponent = cycle_structure.last().copied().unwrap_or(1);
        // coordinates of each class in the chosen basis
        let mut coords = vec![vec![0u32; cycle_structure.len()]; h];
        let mut idx = vec![0u32; cycle_structure.len()];
        loop {
            let mut c = 0usize;
            for (g, &e) in basis.iter().zip(&idx) {
                for _ in 0..e {
                    c = mul_table[c][*g];
                }
            }
            coords[c] = idx.clone();
            if !increment(&mut idx, &cycle_structure) {
                break;
            }
        }
        let g = ClassGroup {
            field: f.clone(),
            reps,
            rep_ideals,
            mul_table,
            inverse,
            cycle_structure,
            coords,
            exponent,
            prime_cache: Mutex::new(HashMap::new()),
        };
        Ok(Arc::new(g))
    }

    pub fn field(&self) -> &BaseField {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    /// Invariant factors `d_1 | d_2 | ...` (empty for the trivial group).
    pub fn cycle_structure(&self) -> &[u32] {
        &self.cycle_structure
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// Integral representative of each class; index 0 is principal.
    pub fn reps(&self) -> &[FactoredIdeal] {
        &self.reps
    }

    pub fn rep_ideal(&self, c: usize) -> &Ideal {
        &self.rep_ideals[c]
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul_table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn pow(&self, a: usize, e: u32) -> usize {
        let mut r = 0;
        for _ in 0..e {
            r = self.mul(r, a);
        }
        r
    }

    /// Exponent coordinates of a class in the cyclic decomposition.
    pub fn coords(&self, c: usize) -> &[u32] {
        &self.coords[c]
    }

    /// Class of an ideal given in Hermite form.
    pub fn class_of_ideal(&self, i: &Ideal) -> Result<usize> {
        let f = &self.field;
        let hits: Vec<usize> = (0..self.order())
            .filter(|&k| is_principal(f, &i.mul(f, &self.rep_ideals[k].conj(f))))
            .collect();
        match hits.as_slice() {
            [k] => Ok(*k),
            _ => Err(Error::Computation(format!("class lookup found {} matches", hits.len()))),
        }
    }

    pub fn class_of_prime(&self, p: &PrimeIdeal) -> usize {
        if self.order() == 1 {
            return 0;
        }
        if let Some(&c) = self.prime_cache.lock().unwrap().get(p) {
            return c;
        }
        let c = self
            .class_of_ideal(&p.ideal)
            .expect("principality search is complete for prime ideals");
        self.prime_cache.lock().unwrap().insert(*p, c);
        c
    }

    /// Class of a factored ideal.
    pub fn class_of(&self, a: &FactoredIdeal) -> usize {
        let mut c = 0;
        for (p, e) in a.factors() {
            let k = self.class_of_prime(p);
            for _ in 0..*e {
                c = self.mul(c, k);
            }
        }
        c
    }

    /// All characters, indexed lexicographically by exponent vector; index 0 is trivial.
    pub fn characters(self: &Arc<Self>) -> Vec<ClassCharacter> {
        let mut out = Vec::new();
        let mut idx = vec![0u32; self.cycle_structure.len()];
        loop {
            out.push(ClassCharacter::from_exponents(self, out.len(), idx.clone()));
            if !increment(&mut idx, &self.cycle_structure) {
                break;
            }
        }
        out
    }

    pub fn character(self: &Arc<Self>, j: usize) -> Result<ClassCharacter> {
        self.characters()
            .into_iter()
            .nth(j)
            .ok_or_else(|| Error::InvalidInput(format!("character index {j} out of range (h = {})", self.order())))
    }
}

fn increment(idx: &mut [u32], bounds: &[u32]) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < bounds[i] {
            return true;
        }
        idx[i] = 0;
    }
    false
}

fn element_order(t: &[Vec<usize>], g: usize) -> u32 {
    let mut x = g;
    let mut k = 1;
    while x != 0 {
        x = t[x][g];
        k += 1;
    }
    k
}

/// Invariant factors and a matching basis, by exhaustive search.
fn decompose(t: &[Vec<usize>]) -> (Vec<u32>, Vec<usize>) {
    let h = t.len();
    if h == 1 {
        return (vec![], vec![]);
    }
    let orders: Vec<u32> = (0..h).map(|g| element_order(t, g)).collect();
    for k in 1..=h {
        let mut tuple = vec![0usize; k];
        loop {
            let ds: Vec<u32> = tuple.iter().map(|&g| orders[g]).collect();
            let chain = ds.windows(2).all(|w| w[1] % w[0] == 0) && ds.iter().all(|&d| d > 1);
            if chain && ds.iter().product::<u32>() as usize == h {
                let mut seen = vec![false; h];
                let mut idx = vec![0u32; k];
                let mut ok = true;
                loop {
                    let mut c = 0;
                    for (g, &e) in tuple.iter().zip(&idx) {
                        for _ in 0..e {
                            c = t[c][*g];
                        }
                    }
                    if seen[c] {
                        ok = false;
                        break;
                    }
                    seen[c] = true;
                    if !increment(&mut idx, &ds) {
                        break;
                    }
                }
                if ok {
                    return (ds, tuple);
                }
            }
            // next tuple
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                tuple[i] += 1;
                if tuple[i] < h {
                    break;
                }
                tuple[i] = 0;
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    unreachable!("every finite abelian group has a cyclic decomposition")
}

/// A character of the class group with values in `Q(zeta_m)`, `m` the exponent.
#[derive(Clone, Debug)]
pub struct ClassCharacter {
    group: Arc<ClassGroup>,
    index: usize,
    exponents: Vec<u32>,
    /// Value on class `c` is `zeta_m^{vals[c]}`.
    vals: Vec<u32>,
}

impl PartialEq for ClassCharacter {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.group, &other.group) && self.vals == other.vals
    }
}

impl ClassCharacter {
    fn from_exponents(g: &Arc<ClassGroup>, index: usize, exponents: Vec<u32>) -> Self {
        let m = g.exponent;
        let vals = (0..g.order())
            .map(|c| {
                let mut s = 0u64;
                for ((x, e), d) in g.coords[c].iter().zip(&exponents).zip(&g.cycle_structure) {
                    s += (*x as u64) * (*e as u64) * (m / d) as u64;
                }
                (s % m as u64) as u32
            })
            .collect();
        ClassCharacter { group: g.clone(), index, exponents, vals }
    }

    pub fn trivial(g: &Arc<ClassGroup>) -> Self {
        Self::from_exponents(g, 0, vec![0; g.cycle_structure.len()])
    }

    pub fn group(&self) -> &Arc<ClassGroup> {
        &self.group
    }

    /// Position in the lexicographic enumeration (meaningless after `mul`/`conj`).
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn exponent_vector(&self) -> &[u32] {
        &self.exponents
    }

    /// The cyclotomic order `m` in which values live.
    pub fn modulus(&self) -> u32 {
        self.group.exponent
    }

    pub fn is_trivial(&self) -> bool {
        self.vals.iter().all(|&v| v == 0)
    }

    /// True if all values are `+-1`.
    pub fn is_real(&self) -> bool {
        let m = self.modulus();
        self.vals.iter().all(|&v| (2 * v) % m == 0)
    }

    /// Exponent `k` with value `zeta_m^k` on class `c`.
    pub fn log_on_class(&self, c: usize) -> u32 {
        self.vals[c]
    }

    pub fn on_class(&self, c: usize) -> CycRat {
        CycRat::root_of_unity(self.modulus(), self.vals[c] as i64)
    }

    pub fn value(&self, a: &FactoredIdeal) -> CycRat {
        self.on_class(self.group.class_of(a))
    }

    pub fn log_value(&self, a: &FactoredIdeal) -> u32 {
        self.vals[self.group.class_of(a)]
    }

    /// Complex-conjugate (inverse) character.
    pub fn conj(&self) -> Self {
        let m = self.modulus();
        let vals = self.vals.iter().map(|&v| (m - v) % m).collect();
        let exponents = self
            .exponents
            .iter()
            .zip(&self.group.cycle_structure)
            .map(|(e, d)| (d - e) % d)
            .collect();
        ClassCharacter { group: self.group.clone(), index: usize::MAX, exponents, vals }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus();
        let vals = self.vals.iter().zip(&other.vals).map(|(a, b)| (a + b) % m).collect();
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .zip(&self.group.cycle_structure)
            .map(|((a, b), d)| (a + b) % d)
            .collect();
        ClassCharacter { group: self.group.clone(), index: usize::MAX, exponents, vals }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_field::FieldElement;
    use crate::ideal::{enumerate_ideals, factor_principal};

    #[test]
    fn class_numbers() {
        let expect = [(2, 1), (3, 1), (5, 1), (10, 2), (13, 1), (15, 2), (79, 3), (82, 4), (226, 8)];
        for (d, h) in expect {
            let f = BaseField::new(d).unwrap();
            let g = ClassGroup::compute(&f).unwrap();
            assert_eq!(g.order(), h, "D={d}");
        }
        let g = ClassGroup::compute(&BaseField::rational()).unwrap();
        assert_eq!(g.order(), 1);
    }

    #[test]
    fn sqrt10_classes() {
        let f = BaseField::new(10).unwrap();
        let g = ClassGroup::compute(&f).unwrap();
        let p2 = factor_rational_prime(&f, 2)[0];
        let p3 = factor_rational_prime(&f, 3)[0];
        assert!(!is_principal(&f, &p2.ideal));
        assert_ne!(g.class_of_prime(&p2), 0);
        let x = factor_principal(&f, &FieldElement::from_ints(4, 1)).unwrap();
        assert_eq!(g.class_of(&x), 0);
        let y = FactoredIdeal::from_factors(vec![(p2, 1), (p3, 1)]);
        assert_eq!(g.class_of(&y), 0);
        assert_eq!(g.class_of(&FactoredIdeal::unit()), 0);
        let chars = g.characters();
        assert!(chars[0].is_trivial());
        assert_eq!(chars[1].value(&FactoredIdeal::prime(p2)), CycRat::from_int(-1));
    }

    #[test]
    fn structure_of_noncyclic_group() {
        let f = BaseField::new(226).unwrap();
        let g = ClassGroup::compute(&f).unwrap();
        assert_eq!(g.cycle_structure().iter().product::<u32>(), 8);
    }

    #[test]
    fn orthogonality_and_multiplicativity() {
        for d in [10, 79, 82] {
            let f = BaseField::new(d).unwrap();
            let g = ClassGroup::compute(&f).unwrap();
            let h = g.order();
            let chars = g.characters();
            for a in &chars {
                for b in &chars {
                    let mut s = CycRat::zero();
                    for c in 0..h {
                        s = &s + &(&a.on_class(c) * &b.on_class(c).conj());
                    }
                    let expect = if a == b { h as i64 } else { 0 };
                    assert_eq!(s, CycRat::from_int(expect));
                }
            }
            let ideals = enumerate_ideals(&f, 60);
            for chi in &chars {
                for (i, x) in ideals.iter().enumerate().step_by(4) {
                    let y = &ideals[(i * 7 + 3) % ideals.len()];
                    assert_eq!(chi.value(&x.mul(y)), &chi.value(x) * &chi.value(y));
                }
            }
        }
    }

    #[test]
    fn class_assignment_matches_element_search() {
        // A ~ B iff A * conj(B) has a generator of the right norm
        let f = BaseField::new(10).unwrap();
        let g = ClassGroup::compute(&f).unwrap();
        let ideals = enumerate_ideals(&f, 50);
        for a in ideals.iter().step_by(3) {
            for b in ideals.iter().step_by(5) {
                let same = g.class_of(a) == g.class_of(b);
                let prod = a.to_ideal(&f).mul(&f, &b.to_ideal(&f).conj(&f));
                assert_eq!(same, is_principal(&f, &prod));
            }
        }
    }
}
