//! Floating-point L-values: the Dirichlet series at `s = k` summed over ideals of
//! norm at most `B`, pulled back to `s = 1 - k` by the functional equation.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::CharacterSpec;
use crate::arith::primes_up_to;
use crate::ideal::{factor_principal, factor_rational_prime, FactoredIdeal};
use crate::{Error, Result};

/// Approximate value with a bound on the truncation error.
#[derive(Clone, Copy, Debug)]
pub struct NumericLValue {
    pub value: Complex64,
    pub error_bound: f64,
}

/// `sum_{N a <= bound} chi(a) N(a)^{-s}` by multiplicativity over rational primes.
pub fn dirichlet_series(chi: &CharacterSpec, s: f64, bound: u64) -> Result<Complex64> {
    let f = &chi.field;
    let psi = chi.class_part();
    let m = psi.modulus() as f64;
    let n = bound as usize;
    let mut coeff = vec![Complex64::new(0.0, 0.0); n + 1];
    // smallest prime factor sieve
    let mut spf = vec![0u32; n + 1];
    for p in primes_up_to(bound) {
        let p = p as usize;
        let mut k = p;
        while k <= n {
            if spf[k] == 0 {
                spf[k] = p as u32;
            }
            k += p;
        }
        // local factor prod_P (1 - chi(P) T^{f_P})^{-1} truncated at p^k <= bound
        let mut kmax = 0;
        let mut pk = 1usize;
        while pk <= n / p {
            pk *= p;
            kmax += 1;
        }
        let mut local = vec![Complex64::new(0.0, 0.0); kmax + 1];
        local[0] = Complex64::new(1.0, 0.0);
        for prime in factor_rational_prime(f, p as u64) {
            let fp = FactoredIdeal::prime(prime);
            let sign = chi.quadratic_value(&fp)?;
            if sign == 0 {
                continue;
            }
            let k = psi.log_value(&fp);
            let v = Complex64::from_polar(sign as f64, 2.0 * PI * k as f64 / m);
            let deg = prime.residue_deg as usize;
            // multiply by 1 + v T^deg + v^2 T^{2 deg} + ...
            for i in deg..=kmax {
                let add = local[i - deg] * v;
                local[i] += add;
            }
        }
        let mut pk = 1usize;
        for c in local {
            coeff[pk] = c;
            if pk > n / p {
                break;
            }
            pk *= p;
        }
    }
    coeff[1] = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(1.0, 0.0);
    for k in 2..=n {
        let p = spf[k] as usize;
        let mut q = k;
        let mut pk = 1;
        while q % p == 0 {
            q /= p;
            pk *= p;
        }
        if q != 1 {
            coeff[k] = coeff[pk] * coeff[q];
        }
        if coeff[k].norm_sqr() != 0.0 {
            total += coeff[k] * (k as f64).powf(-s);
        }
    }
    Ok(total)
}

/// `Gamma_R(1 - k + a) / Gamma_R(k + a)` with `Gamma_R(s) = pi^{-s/2} Gamma(s/2)`, in the
/// pole-free form: `pi^{k-1/2} Gamma((1-k)/2) / Gamma(k/2)` for even characters and
/// `pi^{k-1/2} Gamma(1-k/2) / Gamma((k+1)/2)` for odd ones.
fn gamma_ratio(k: u32, parity: u32) -> f64 {
    let k = k as f64;
    let p = PI.powf(k - 0.5);
    if parity == 0 {
        p * libm::tgamma((1.0 - k) / 2.0) / libm::tgamma(k / 2.0)
    } else {
        p * libm::tgamma(1.0 - k / 2.0) / libm::tgamma((k + 1.0) / 2.0)
    }
}

/// Numeric `L_F(1 - k, chi)` for `k >= 2` from the functional equation
/// `L(k, conj chi) = W |d_F N f|^{1/2-k} (Gamma ratio)^n L(1-k, chi)`, with root number
/// `W = conj psi(f d)`, `f` the conductor and `d` the different.
pub fn hecke_l_numeric(kappa: u32, chi: &CharacterSpec, bound: u64) -> Result<NumericLValue> {
    if kappa < 2 {
        return Err(Error::Unsupported("the numeric backend needs k >= 2".into()));
    }
    let parity = chi
        .parity()
        .ok_or_else(|| Error::Unsupported("characters of mixed signature".into()))?;
    if (kappa + parity) % 2 == 1 {
        // trivial zero of the Gamma factor
        return Ok(NumericLValue { value: Complex64::new(0.0, 0.0), error_bound: 0.0 });
    }
    let f = &chi.field;
    let n = f.degree() as i32;
    let dual = chi.conj();
    let series = dirichlet_series(&dual, kappa as f64, bound)?;
    let cond = chi.modulus.norm() as f64;
    let disc = if f.is_rational() { 1.0 } else { f.disc() as f64 };
    let a = (disc * cond).powf(0.5 - kappa as f64);
    let w = if f.is_rational() {
        Complex64::new(1.0, 0.0)
    } else {
        let diff = factor_principal(f, &f.different_gen())?;
        dual.class_part().value(&chi.modulus.mul(&diff)).to_complex()
    };
    let factor = w * a * gamma_ratio(kappa, parity).powi(n);
    let k = kappa as f64;
    let b = bound as f64;
    let ideals_per_norm = if f.is_rational() {
        b.powf(1.0 - k) / (k - 1.0)
    } else {
        b.powf(1.0 - k) * (b.ln() / (k - 1.0) + 1.0 / ((k - 1.0) * (k - 1.0)) + 1.2 / (k - 1.0))
    };
    Ok(NumericLValue { value: series / factor, error_bound: 1.1 * ideals_per_norm / factor.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base_field::{BaseField, FieldElement};
    use crate::class_group::ClassGroup;

    #[test]
    fn riemann_zeta() {
        let g = ClassGroup::compute(&BaseField::rational()).unwrap();
        let chi = CharacterSpec::trivial(&g);
        let r = hecke_l_numeric(4, &chi, 10_000).unwrap();
        assert!((r.value.re - 1.0 / 120.0).abs() < 1e-9);
        let r = hecke_l_numeric(2, &chi, 100_000).unwrap();
        assert!((r.value.re + 1.0 / 12.0).abs() <= r.error_bound.max(1e-6));
        assert_eq!(hecke_l_numeric(3, &chi, 100).unwrap().value.re, 0.0);
    }

    #[test]
    fn odd_character_over_q() {
        let g = ClassGroup::compute(&BaseField::rational()).unwrap();
        let chi = CharacterSpec::quadratic(&g, FieldElement::from_ints(-4, 0)).unwrap();
        let r = hecke_l_numeric(3, &chi, 100_000).unwrap();
        assert!((r.value.re + 0.5).abs() < 1e-6, "{:?}", r);
    }
}
