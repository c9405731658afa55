//! Sparse exact q-expansions indexed by totally positive integral elements.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::base_field::{BaseField, FieldElement};
use crate::cyclo::{parse_rat, rat_string, CycRat};
use crate::{Error, Result};

/// Coefficients `c(xi)` for `xi = 0` or `xi >> 0` with `trace(xi) <= trace_bound`; absent keys
/// are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    pub field: BaseField,
    pub label: String,
    pub trace_bound: i64,
    /// Exponents are `xi / exponent_denominator`.
    pub exponent_denominator: u32,
    coefficients: BTreeMap<FieldElement, CycRat>,
}

fn int_trace(f: &BaseField, x: &FieldElement) -> i64 {
    f.trace(x).to_integer().to_i64().expect("trace fits in i64")
}

impl QExpansion {
    pub fn new(field: BaseField, label: impl Into<String>, trace_bound: i64) -> Self {
        QExpansion { field, label: label.into(), trace_bound, exponent_denominator: 1, coefficients: BTreeMap::new() }
    }

    /// Is `xi` a valid index within the bound.
    pub fn in_range(&self, xi: &FieldElement) -> bool {
        xi.is_integral()
            && (xi.is_zero() || self.field.is_totally_positive(xi))
            && int_trace(&self.field, xi) <= self.trace_bound
    }

    /// Store a coefficient; zero values remove the key.
    pub fn insert(&mut self, xi: FieldElement, v: CycRat) {
        if v.is_zero() {
            self.coefficients.remove(&xi);
        } else {
            self.coefficients.insert(xi, v);
        }
    }

    pub fn coefficient(&self, xi: &FieldElement) -> CycRat {
        self.coefficients.get(xi).cloned().unwrap_or_else(CycRat::zero)
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Nonzero terms ordered by `(trace, norm, coordinates)`.
    pub fn terms(&self) -> Vec<(&FieldElement, &CycRat)> {
        let mut v: Vec<_> = self.coefficients.iter().collect();
        v.sort_by_cached_key(|(k, _)| self.field.sort_key(k));
        v
    }

    pub fn scale(&self, c: &CycRat) -> Self {
        let mut out = QExpansion { coefficients: BTreeMap::new(), ..self.clone() };
        for (k, v) in &self.coefficients {
            out.insert(k.clone(), v * c);
        }
        out
    }

    fn check_compatible(&self, o: &Self) -> Result<()> {
        if self.field != o.field {
            return Err(Error::InvalidInput("q-expansions over different fields".into()));
        }
        if self.exponent_denominator != o.exponent_denominator {
            return Err(Error::InvalidInput("q-expansions with different exponent denominators".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let mut out = self.restrict(self.trace_bound.min(o.trace_bound));
        out.label = format!("({}) + ({})", self.label, o.label);
        for (k, v) in &o.coefficients {
            if out.in_range(k) {
                let s = &out.coefficient(k) + v;
                out.insert(k.clone(), s);
            }
        }
        Ok(out)
    }

    /// Cauchy product, valid up to the smaller trace bound.
    pub fn multiply(&self, o: &Self) -> Result<Self> {
        self.check_compatible(o)?;
        let t = self.trace_bound.min(o.trace_bound);
        let f = &self.field;
        let a: Vec<_> = self.coefficients.iter().map(|(k, v)| (int_trace(f, k), k, v)).collect();
        let b: Vec<_> = o.coefficients.iter().map(|(k, v)| (int_trace(f, k), k, v)).collect();
        let mut acc: BTreeMap<FieldElement, CycRat> = BTreeMap::new();
        for (ta, ka, va) in &a {
            for (tb, kb, vb) in &b {
                if ta + tb > t {
                    continue;
                }
                let k = *ka + *kb;
                let p = *va * *vb;
                let e = acc.entry(k).or_insert_with(CycRat::zero);
                *e = &*e + &p;
            }
        }
        let mut out = QExpansion::new(f.clone(), format!("({}) * ({})", self.label, o.label), t);
        out.exponent_denominator = self.exponent_denominator;
        for (k, v) in acc {
            out.insert(k, v);
        }
        Ok(out)
    }

    /// `f(z) -> f(k z)`: exponents are multiplied by `k`.
    pub fn dilate(&self, k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidInput("dilation factor must be positive".into()));
        }
        let mut out = QExpansion::new(self.field.clone(), format!("({})({k}z)", self.label), self.trace_bound * k);
        out.exponent_denominator = self.exponent_denominator;
        for (x, v) in &self.coefficients {
            out.insert(x.scale_int(k), v.clone());
        }
        Ok(out)
    }

    /// Drop coefficients beyond a smaller trace bound.
    pub fn restrict(&self, t: i64) -> Self {
        let mut out = QExpansion { coefficients: BTreeMap::new(), trace_bound: t.min(self.trace_bound), ..self.clone() };
        for (k, v) in &self.coefficients {
            if int_trace(&self.field, k) <= out.trace_bound {
                out.coefficients.insert(k.clone(), v.clone());
            }
        }
        out
    }

    /// JSON document; `scale` multiplies every value at print time.
    pub fn to_json(&self, scale: i64) -> Value {
        let f = &self.field;
        let coeffs: Vec<Value> = self
            .terms()
            .into_iter()
            .map(|(x, v)| {
                let v = v.scale_int(scale);
                json!({
                    "xi": [rat_string(&x.a), rat_string(&x.b)],
                    "trace": rat_string(&f.trace(x)),
                    "norm": rat_string(&f.norm(x)),
                    "value": value_json(&v),
                })
            })
            .collect();
        json!({
            "field": {"kind": f.kind(), "D": f.d()},
            "label": self.label,
            "trace_bound": self.trace_bound,
            "exponent_denominator": self.exponent_denominator,
            "scale": scale,
            "coefficients": coeffs,
        })
    }

    /// Inverse of [`QExpansion::to_json`] (the stored values are divided by `scale`).
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidInput(format!("malformed q-expansion JSON: {what}"));
        let d = v["field"]["D"].as_i64().ok_or_else(|| bad("field.D"))?;
        let field = BaseField::new(d)?;
        let label = v["label"].as_str().ok_or_else(|| bad("label"))?;
        let tb = v["trace_bound"].as_i64().ok_or_else(|| bad("trace_bound"))?;
        let den = v["exponent_denominator"].as_u64().ok_or_else(|| bad("exponent_denominator"))?;
        let scale = v.get("scale").and_then(Value::as_i64).unwrap_or(1);
        if scale == 0 {
            return Err(bad("scale"));
        }
        let inv = BigRational::new(BigInt::from(1), BigInt::from(scale));
        let mut out = QExpansion::new(field, label, tb);
        out.exponent_denominator = den as u32;
        for c in v["coefficients"].as_array().ok_or_else(|| bad("coefficients"))? {
            let xi = c["xi"].as_array().ok_or_else(|| bad("xi"))?;
            let coord = |i: usize| {
                xi.get(i).and_then(Value::as_str).and_then(parse_rat).ok_or_else(|| bad("xi coordinate"))
            };
            let x = FieldElement::new(coord(0)?, coord(1)?);
            out.insert(x, parse_value(&c["value"]).ok_or_else(|| bad("value"))?.scale(&inv));
        }
        Ok(out)
    }

    /// Plain-text table `index  value` (values multiplied by `scale`).
    pub fn to_table(&self, scale: i64) -> String {
        let mut s = format!("# {} (trace <= {}, scaled by {scale})\n", self.label, self.trace_bound);
        for (x, v) in self.terms() {
            s.push_str(&format!("{}\t{}\n", self.field.format(x), v.scale_int(scale)));
        }
        s
    }
}

/// `"p/q"` for rational values, `{"order": m, "coords": [...]}` otherwise.
pub fn value_json(v: &CycRat) -> Value {
    match v.to_rational() {
        Some(q) => Value::String(rat_string(&q)),
        None => json!({"order": v.order(), "coords": v.coord_strings()}),
    }
}

pub fn parse_value(v: &Value) -> Option<CycRat> {
    if let Some(s) = v.as_str() {
        return parse_rat(s).map(CycRat::from_rational);
    }
    let m = v["order"].as_u64()? as u32;
    let coords: Option<Vec<BigRational>> = v["coords"].as_array()?.iter().map(|c| c.as_str().and_then(parse_rat)).collect();
    Some(CycRat::from_power_sum(m, coords?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta_q(n: i64) -> QExpansion {
        let mut q = QExpansion::new(BaseField::rational(), "theta", n);
        let mut k = 0;
        while k * k <= n {
            q.insert(FieldElement::from_ints(k * k, 0), CycRat::from_int(if k == 0 { 1 } else { 2 }));
            k += 1;
        }
        q
    }

    #[test]
    fn products_and_dilation() {
        let t = theta_q(20);
        let t2 = t.multiply(&t).unwrap();
        assert_eq!(t2.coefficient(&FieldElement::from_ints(1, 0)), CycRat::from_int(4));
        assert_eq!(t2.coefficient(&FieldElement::from_ints(5, 0)), CycRat::from_int(8));
        assert_eq!(t2.coefficient(&FieldElement::from_ints(3, 0)), CycRat::zero());
        let d = t.dilate(4).unwrap();
        assert_eq!(d.coefficient(&FieldElement::from_ints(4, 0)), CycRat::from_int(2));
        assert_eq!(d.coefficient(&FieldElement::from_ints(1, 0)), CycRat::zero());
        assert_eq!(d.trace_bound, 80);
    }

    #[test]
    fn json_round_trip() {
        let mut q = theta_q(10);
        q.insert(FieldElement::from_ints(2, 0), CycRat::root_of_unity(3, 1));
        let j = q.to_json(60);
        let back = QExpansion::from_json(&j).unwrap();
        assert_eq!(back, q);
        assert_eq!(back.to_json(60), j);
    }
}
