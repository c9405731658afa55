use std::fmt::Write as _;
use std::sync::Arc;

use kohnen::class_group::ClassGroup;
use kohnen::eisenstein::qexp::value_json;
use kohnen::eisenstein::{
    cohen_series, eisenstein_coefficient, eisenstein_qexpansion, hecke_eigenvalue, hecke_t_plus_lazy, EisensteinSpec,
    QExpansion,
};
use kohnen::ideal::FactoredIdeal;
use kohnen::local_oracle::run_local_suite;
use kohnen::lvalues::{hecke_l_numeric, CharacterSpec, LFunctions};
use kohnen::{BaseField, CycRat, FieldElement};
use serde_json::{json, Value};

use crate::verify::run_suite;
use crate::{
    CohenArgs, Document, Failure, FieldArgs, HeckeArgs, LocalArgs, LvalueArgs, SeriesArgs, VerifyArgs,
};

/// The field with discriminant `disc`; 0 and 1 both mean `Q`.
pub fn field_from_disc(disc: i64) -> Result<BaseField, Failure> {
    if disc == 0 || disc == 1 {
        return Ok(BaseField::rational());
    }
    if disc < 0 {
        return Err(Failure::usage(format!("--field {disc}: only Q and real quadratic fields are supported")));
    }
    let not_fundamental = || Failure::usage(format!("--field {disc} is not a fundamental discriminant"));
    let f = BaseField::new(disc).map_err(|_| not_fundamental())?;
    if f.is_rational() || f.disc() != disc {
        return Err(not_fundamental());
    }
    Ok(f)
}

fn group_for(disc: i64) -> Result<Arc<ClassGroup>, Failure> {
    let f = field_from_disc(disc)?;
    Ok(ClassGroup::compute(&f)?)
}

fn check_chi(g: &ClassGroup, chi: usize) -> Result<(), Failure> {
    if chi >= g.order() {
        return Err(Failure::usage(format!(
            "--chi {chi} is out of range: the class number is {}",
            g.order()
        )));
    }
    Ok(())
}

fn check_scale(scale: i64) -> Result<(), Failure> {
    if scale == 0 {
        return Err(Failure::usage("--scale must be nonzero"));
    }
    Ok(())
}

fn spec_for(disc: i64, kappa: u32, chi: usize) -> Result<EisensteinSpec, Failure> {
    let g = group_for(disc)?;
    check_chi(&g, chi)?;
    let lf = Arc::new(LFunctions::new(g.clone()));
    Ok(EisensteinSpec::new(lf, kappa, g.character(chi)?)?)
}

fn field_name(f: &BaseField) -> String {
    if f.is_rational() {
        "Q".into()
    } else {
        format!("Q(√{})", f.d())
    }
}

fn field_json(f: &BaseField) -> Value {
    json!({"kind": f.kind(), "D": f.d(), "discriminant": if f.is_rational() { 1 } else { f.disc() }})
}

/// Unscaled q-expansion of the Eisenstein series up to `trace_bound`.
pub fn eisenstein_expansion(disc: i64, kappa: u32, chi: usize, trace_bound: i64) -> Result<QExpansion, Failure> {
    let spec = spec_for(disc, kappa, chi)?;
    Ok(eisenstein_qexpansion(&spec, trace_bound)?)
}

pub(crate) fn field(a: &FieldArgs) -> Result<Document, Failure> {
    let f = field_from_disc(a.disc)?;
    if f.is_rational() {
        return Ok(Document {
            table: "field: Q\ndiscriminant: 1\n".into(),
            json: json!({"field": field_json(&f)}),
        });
    }
    let omega = f.format(&FieldElement::from_ints(0, 1));
    let eps = f.format(f.fund_unit());
    let tp = f.format(f.tp_unit());
    let mut t = String::new();
    writeln!(t, "field: {}", field_name(&f)).unwrap();
    writeln!(t, "discriminant: {}", f.disc()).unwrap();
    writeln!(t, "integral basis: 1, {omega}").unwrap();
    writeln!(t, "fundamental unit: {eps}").unwrap();
    writeln!(t, "norm of fundamental unit: {}", f.unit_norm()).unwrap();
    writeln!(t, "totally positive unit: {tp}").unwrap();
    Ok(Document {
        table: t,
        json: json!({
            "field": field_json(&f),
            "omega": omega,
            "fundamental_unit": eps,
            "unit_norm": f.unit_norm(),
            "totally_positive_unit": tp,
        }),
    })
}

fn ideal_label(f: &BaseField, a: &FactoredIdeal) -> String {
    if a.factors().is_empty() {
        return "(1)".into();
    }
    a.factors()
        .iter()
        .map(|(p, e)| if *e == 1 { p.label(f) } else { format!("{}^{e}", p.label(f)) })
        .collect::<Vec<_>>()
        .join("·")
}

pub(crate) fn classgroup(a: &FieldArgs) -> Result<Document, Failure> {
    let g = group_for(a.disc)?;
    let f = g.field().clone();
    let structure: Vec<String> = g.cycle_structure().iter().map(|d| format!("C{d}")).collect();
    let structure = if structure.is_empty() { "trivial".to_string() } else { structure.join(" x ") };
    let mut t = String::new();
    writeln!(t, "field: {}", field_name(&f)).unwrap();
    writeln!(t, "class number: {}", g.order()).unwrap();
    writeln!(t, "structure: {structure}").unwrap();
    let mut classes = Vec::new();
    for (c, rep) in g.reps().iter().enumerate() {
        let label = ideal_label(&f, rep);
        let (x, y, z) = g.rep_ideal(c).hnf();
        writeln!(t, "class {c}: {label}  norm {}  hnf ({x}, {y}, {z})", rep.norm()).unwrap();
        classes.push(json!({"index": c, "representative": label, "norm": rep.norm().to_string(), "hnf": [x.to_string(), y.to_string(), z.to_string()]}));
    }
    let mut chars = Vec::new();
    for chi in g.characters() {
        let vals: Vec<CycRat> = (0..g.order()).map(|c| chi.on_class(c)).collect();
        let shown: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
        writeln!(t, "character {}: exponents {:?}  values [{}]", chi.index(), chi.exponent_vector(), shown.join(", "))
            .unwrap();
        chars.push(json!({
            "index": chi.index(),
            "exponents": chi.exponent_vector(),
            "values": vals.iter().map(value_json).collect::<Vec<_>>(),
        }));
    }
    Ok(Document {
        table: t,
        json: json!({
            "field": field_json(&f),
            "class_number": g.order(),
            "cycle_structure": g.cycle_structure(),
            "classes": classes,
            "characters": chars,
        }),
    })
}

pub(crate) fn eisenstein(a: &SeriesArgs) -> Result<Document, Failure> {
    check_scale(a.scale)?;
    let q = eisenstein_expansion(a.disc, a.kappa, a.chi, a.trace_bound)?;
    Ok(Document { table: q.to_table(a.scale), json: q.to_json(a.scale) })
}

pub(crate) fn cohen(a: &CohenArgs) -> Result<Document, Failure> {
    check_scale(a.scale)?;
    let q = cohen_series(a.r, a.n_max)?;
    let mut t = format!("# {} (n <= {}, scaled by {})\n", q.label, a.n_max, a.scale);
    for n in 0..=a.n_max {
        let v = q.coefficient(&FieldElement::from_ints(n as i64, 0)).scale_int(a.scale);
        writeln!(t, "{n}\t{v}").unwrap();
    }
    Ok(Document { table: t, json: q.to_json(a.scale) })
}

fn parse_element(f: &BaseField, flag: &str, s: &str) -> Result<FieldElement, Failure> {
    let x = f.parse_element(s).map_err(|e| Failure::usage(format!("{flag} {s}: {e}")))?;
    if x.is_zero() || !x.is_integral() {
        return Err(Failure::usage(format!("{flag} {s}: expected a nonzero integral element")));
    }
    Ok(x)
}

pub(crate) fn lvalue(a: &LvalueArgs) -> Result<Document, Failure> {
    let g = group_for(a.disc)?;
    check_chi(&g, a.chi)?;
    let f = g.field().clone();
    let twist = a.twist.as_deref().map(|s| parse_element(&f, "--twist", s)).transpose()?;
    let chi = CharacterSpec::new(twist.clone(), g.character(a.chi)?, false)?;
    let exact = LFunctions::new(g.clone()).exact(a.kappa, &chi)?;
    let twist_label = twist.as_ref().map(|x| f.format(x));
    let name = match &twist_label {
        Some(t) => format!("L(1-{}, chi_{}·({}/.)) over {}", a.kappa, a.chi, t, field_name(&f)),
        None => format!("L(1-{}, chi_{}) over {}", a.kappa, a.chi, field_name(&f)),
    };
    let mut t = format!("{name} = {exact}\n");
    let mut j = json!({
        "field": field_json(&f),
        "kappa": a.kappa,
        "chi": a.chi,
        "twist": twist_label,
        "exact": value_json(&exact),
    });
    if let Some(terms) = a.numeric_terms {
        let n = hecke_l_numeric(a.kappa, &chi, terms)?;
        let diff = (exact.to_complex() - n.value).norm();
        let agrees = diff <= n.error_bound.max(1e-9 * n.value.norm().max(1.0));
        writeln!(
            t,
            "numeric: {:.12} {:+.12}i  error bound {:.3e}  {}",
            n.value.re,
            n.value.im,
            n.error_bound,
            if agrees { "agrees" } else { "DISAGREES" }
        )
        .unwrap();
        j["numeric"] = json!({"re": n.value.re, "im": n.value.im, "error_bound": n.error_bound, "agrees": agrees});
    }
    Ok(Document { table: t, json: j })
}

pub(crate) fn hecke(a: &HeckeArgs) -> Result<Document, Failure> {
    check_scale(a.scale)?;
    let spec = spec_for(a.disc, a.kappa, a.chi)?;
    let f = spec.field().clone();
    let alpha = parse_element(&f, "--alpha", &a.alpha)?;
    let mut image = hecke_t_plus_lazy(a.kappa, &alpha, Arc::new(spec.clone()), a.trace_bound)?;
    image.label = format!("T+(({})^2) G_{{{}/2}}(z, chi_{})", f.format(&alpha), 2 * a.kappa + 1, a.chi);

    let mut ratio: Option<CycRat> = None;
    let mut eigen = true;
    for xi in f.enumerate_totally_positive(a.trace_bound) {
        let g = eisenstein_coefficient(&spec, &xi)?;
        let t = image.coefficient(&xi);
        match (&ratio, g.is_zero()) {
            (_, true) => eigen &= t.is_zero(),
            (None, false) => ratio = Some(&t * &g.inv()),
            (Some(l), false) => eigen &= t == &g * l,
        }
    }
    let eigenvalue = if eigen { ratio } else { None };
    let norm = f.norm(&alpha).to_integer();
    let norm = u64::try_from(norm.magnitude()).map_err(|_| Failure::usage("--alpha has too large a norm"))?;
    let predicted = hecke_eigenvalue(a.kappa, norm);

    let mut t = image.to_table(a.scale);
    match &eigenvalue {
        Some(l) => writeln!(t, "# eigenvalue: {l}").unwrap(),
        None => writeln!(t, "# eigenvalue: none (not proportional on this range)").unwrap(),
    }
    writeln!(t, "# predicted 1 + N^(2k-1): {predicted}").unwrap();
    let mut j = image.to_json(a.scale);
    j["eigenvalue"] = eigenvalue.as_ref().map(value_json).unwrap_or(Value::Null);
    j["predicted_eigenvalue"] = value_json(&CycRat::from_rational(predicted));
    Ok(Document { table: t, json: j })
}

pub(crate) fn local(a: &LocalArgs) -> Result<(Document, bool), Failure> {
    let checks = run_local_suite(a.seed);
    let ok = checks.iter().all(|c| c.passed);
    let mut t = String::new();
    for c in &checks {
        writeln!(t, "{}  {}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
    }
    let j = json!({"seed": a.seed, "passed": ok, "checks": serde_json::to_value(&checks).expect("checks serialize")});
    Ok((Document { table: t, json: j }, ok))
}

pub(crate) fn verify(a: &VerifyArgs) -> Result<(Document, bool), Failure> {
    let results = run_suite(&a.only);
    let ok = results.iter().all(|r| r.passed);
    let mut t = String::new();
    for r in &results {
        writeln!(t, "{:>2}  {}  {}", r.id, if r.passed { "PASS" } else { "FAIL" }, r.name).unwrap();
        if !r.passed {
            writeln!(t, "      {}", r.detail).unwrap();
        }
    }
    let rows: Vec<Value> = results
        .iter()
        .map(|r| json!({"criterion": r.id, "name": r.name, "passed": r.passed, "detail": r.detail}))
        .collect();
    Ok((Document { table: t, json: json!({"passed": ok, "criteria": rows}) }, ok))
}
