//! Runs the directives of a checked session and collects one report each.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

use ksv_core::bgg::{self, SupportMode};
use ksv_core::extdg::DgLambdaModule;
use ksv_core::koszul::{self, reduce_t, KoszulError, TensorSupportReport};
use ksv_core::modengine::{resolve_and_tor, PresentedModule};
use ksv_core::polyring::{HilbertSeries, PolyRing};
use ksv_core::varieties::{self, Comparison, VarietyHandle};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::model::{Model, Object};
use crate::syntax::{Directive, Pos};

pub const DEFAULT_WINDOW: i32 = 6;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub window: i32,
    pub timings: bool,
}

impl Default for Options {
    fn default() -> Options {
        Options { window: DEFAULT_WINDOW, timings: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub directive: String,
    pub line: usize,
    pub status: Status,
    pub details: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    pub fn failed(&self) -> bool {
        matches!(self.status, Status::Fail | Status::Error)
    }
}

type Details = BTreeMap<String, Value>;
type Outcome = Result<(Status, Details), String>;

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn variety(v: &VarietyHandle) -> Value {
    json!({
        "ideal": v.canonical_generators().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        "classification": v.classification().to_string(),
        "proj_dim": v.proj_dim().to_string(),
    })
}

fn hilbert(h: &HilbertSeries, upto: i64) -> Value {
    let lo = h.numerator.terms().map(|(e, _)| e).min().unwrap_or(0).min(0);
    json!({
        "numerator": h.numerator.to_string(),
        "weights": h.weights,
        "dims": (lo..=upto).map(|d| json!([d, h.coefficient(d)])).collect::<Vec<_>>(),
        "proj_dim": h.proj_dim().to_string(),
    })
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn tensor_details(r: &TensorSupportReport) -> Details {
    let mut d = Details::new();
    d.insert("join".into(), variety(&r.join));
    d.insert("direct".into(), variety(&r.direct));
    d.insert("comparison".into(), json!(r.comparison.to_string()));
    if let Some(o) = &r.oracle {
        d.insert(
            "window_oracle".into(),
            json!({
                "window": o.window,
                "weight": o.weight,
                "columns": ["n", "observed", "predicted"],
                "rows": o.rows.iter().map(|(n, obs, pred)| json!([n, obs, pred])).collect::<Vec<_>>(),
                "matches": o.matches,
            }),
        );
    }
    d
}

struct Ctx<'a> {
    model: &'a Model,
    s: Arc<PolyRing>,
}

impl Ctx<'_> {
    fn obj(&self, name: &str) -> &Object {
        &self.model.objects[name]
    }

    /// The DG Λ-module behind a module argument.
    fn lambda(&self, name: &str) -> Option<DgLambdaModule> {
        match self.obj(name) {
            Object::Lambda(m) => Some(m.clone()),
            Object::Koszul(m) => Some(reduce_t(m)),
            Object::Ideal(_) => None,
        }
    }

    fn ext(&self, name: &str) -> Result<PresentedModule, String> {
        match self.obj(name) {
            Object::Ideal(i) => Ok(PresentedModule::cyclic(i, 0)),
            _ => bgg::ext_module_in(&self.s, &self.lambda(name).unwrap()).map_err(err),
        }
    }

    fn support(&self, name: &str) -> Result<VarietyHandle, String> {
        match self.obj(name) {
            Object::Ideal(i) => Ok(VarietyHandle::new(i.clone())),
            Object::Koszul(m) => koszul::support_e(m).map_err(err),
            Object::Lambda(m) => bgg::support_in(&self.s, m, SupportMode::D).map_err(err),
        }
    }
}

fn run_one(ctx: &Ctx, dir: &Directive, opts: Options) -> Outcome {
    let args: Vec<&str> = dir.args.iter().map(|(a, _)| a.as_str()).collect();
    let window = dir.window.map_or(opts.window, |w| w as i32);
    let mut d = Details::new();
    match (dir.verb.as_str(), dir.what.as_str()) {
        ("compute", "support") => {
            let v = ctx.support(args[0])?;
            d.insert("support".into(), variety(&v));
            if let Object::Lambda(m) = ctx.obj(args[0]) {
                let b = bgg::support_in(&ctx.s, m, SupportMode::B).map_err(err)?;
                d.insert("support_b".into(), variety(&b));
            }
            Ok((Status::Ok, d))
        }
        ("compute", "ext") | ("compute", "hilbert") => {
            let e = ctx.ext(args[0])?;
            d.insert("hilbert".into(), hilbert(&e.hilbert_series(), window as i64));
            if dir.what == "ext" {
                d.insert("generator_degrees".into(), json!(e.degrees));
                d.insert("relations".into(), json!(e.relations.len()));
                d.insert("generator_degree_bound".into(), json!(e.generator_degree_bound()));
            }
            Ok((Status::Ok, d))
        }
        ("compute", "join") => {
            let (u, v) = (ctx.support(args[0])?, ctx.support(args[1])?);
            let j = varieties::join(&u, &v).map_err(err)?;
            d.insert("join".into(), variety(&j));
            Ok((Status::Ok, d))
        }
        ("compute", "tensor-support") | ("verify", "theorem") => {
            let r = match (ctx.obj(args[0]), ctx.obj(args[1])) {
                (Object::Koszul(m), Object::Koszul(n)) => koszul::tensor_support_e(m, n, Some(window)),
                _ => koszul::lambda_tensor_support(&ctx.lambda(args[0]).unwrap(), &ctx.lambda(args[1]).unwrap(), Some(window)),
            }
            .map_err(err)?;
            let status = if dir.verb == "verify" { verdict(r.passes()) } else { Status::Ok };
            Ok((status, tensor_details(&r)))
        }
        ("compute", "rhom-support") => {
            let (Object::Koszul(m), Object::Koszul(n)) = (ctx.obj(args[0]), ctx.obj(args[1])) else {
                return Err("rhom-support needs kmodules".into());
            };
            let r = koszul::rhom_support(m, n, Some(window)).map_err(err)?;
            d.insert("predicted".into(), variety(&r.predicted));
            d.insert("support".into(), variety(&r.tensor.direct));
            d.insert("comparison".into(), json!(r.comparison.to_string()));
            d.insert("dagger_comparison".into(), json!(r.dagger.comparison.to_string()));
            d.insert("tensor".into(), Value::Object(tensor_details(&r.tensor).into_iter().collect()));
            d.insert("holds".into(), json!(r.passes()));
            Ok((Status::Ok, d))
        }
        ("verify", "dual") => {
            let m = ctx.lambda(args[0]).unwrap();
            let support = ctx.support(args[0])?;
            let dagger = bgg::support_in(&ctx.s, &m.hom_into_lambda(), SupportMode::D).map_err(err)?;
            let via_dual = bgg::support_in(&ctx.s, &m.dual(), SupportMode::B).map_err(err)?;
            let c1 = varieties::compare(&dagger, &support).map_err(err)?;
            let same = via_dual.canonical_generators() == bgg::support_in(&ctx.s, &m, SupportMode::D).map_err(err)?.canonical_generators();
            d.insert("support".into(), variety(&support));
            d.insert("dagger".into(), variety(&dagger));
            d.insert("comparison".into(), json!(c1.to_string()));
            d.insert("d_equals_b_of_dual".into(), json!(same));
            Ok((verdict(c1 == Comparison::Equal && same), d))
        }
        ("verify", "hopf") => {
            let (m, n) = (ctx.lambda(args[0]).unwrap(), ctx.lambda(args[1]).unwrap());
            let t = m.tensor_k(&n).map_err(err)?;
            let direct = bgg::support_in(&ctx.s, &t, SupportMode::D).map_err(err)?;
            let u = bgg::support_in(&ctx.s, &m, SupportMode::D).map_err(err)?;
            let v = bgg::support_in(&ctx.s, &n, SupportMode::D).map_err(err)?;
            let meet = varieties::intersection(&u, &v).map_err(err)?;
            let c = varieties::compare(&direct, &meet).map_err(err)?;
            d.insert("tensor".into(), variety(&direct));
            d.insert("intersection".into(), variety(&meet));
            d.insert("comparison".into(), json!(c.to_string()));
            Ok((verdict(c == Comparison::Equal), d))
        }
        ("verify", "tor-bound") => {
            let r = match (ctx.obj(args[0]), ctx.obj(args[1])) {
                (Object::Koszul(m), Object::Koszul(n)) => koszul::tor_containment_check(m, n, dir.window.map(|w| w as i32)),
                _ => koszul::lambda_tor_containment(&ctx.s, &ctx.lambda(args[0]).unwrap(), &ctx.lambda(args[1]).unwrap(), dir.window.map(|w| w as i32)),
            }
            .map_err(|e| match e {
                KoszulError::WindowTooSmall { required } => format!("window too small: s + t = {required}"),
                e => e.to_string(),
            })?;
            d.insert("s".into(), json!(r.s));
            d.insert("t".into(), json!(r.t));
            d.insert("window".into(), json!(r.window));
            d.insert("join".into(), variety(&r.join));
            d.insert(
                "homology".into(),
                json!(r.homology.iter().map(|(i, n, v)| json!({"degree": i, "dim": n, "support": variety(v)})).collect::<Vec<_>>()),
            );
            d.insert("union".into(), variety(&r.union));
            d.insert("truncation".into(), variety(&r.truncation));
            d.insert("chain_holds".into(), json!(r.chain_holds));
            Ok((verdict(r.holds), d))
        }
        ("verify", "nak") => {
            let (x, y) = (ctx.ext(args[0])?, ctx.ext(args[1])?);
            let tors = resolve_and_tor(&x, &y, ctx.s.nvars());
            let mut union = VarietyHandle::empty(&ctx.s);
            let mut dims = Vec::new();
            for t in &tors {
                dims.push(t.hilbert_series().total_dimension());
                if !t.is_zero() {
                    union = varieties::union(&union, &VarietyHandle::new(t.annihilator())).map_err(err)?;
                }
            }
            let meet = varieties::intersection(&VarietyHandle::new(x.annihilator()), &VarietyHandle::new(y.annihilator())).map_err(err)?;
            let c = varieties::compare(&union, &meet).map_err(err)?;
            d.insert("tor_union".into(), variety(&union));
            d.insert("intersection".into(), variety(&meet));
            d.insert("tor_lengths".into(), json!(dims));
            d.insert("comparison".into(), json!(c.to_string()));
            Ok((verdict(c == Comparison::Equal), d))
        }
        (v, w) => Err(format!("unsupported directive `{v} {w}`")),
    }
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".into()
    }
}

/// Runs every directive (in parallel) and returns the reports in file order.
pub fn run(model: &Model, opts: Options) -> Vec<Report> {
    let s = model.cohomology_ring().unwrap_or_else(|| PolyRing::cohomological(model.field, &[]));
    let ctx = Ctx { model, s };
    model
        .directives
        .par_iter()
        .map(|(pos, dir): &(Pos, Directive)| {
            let start = Instant::now();
            let outcome = catch_unwind(AssertUnwindSafe(|| run_one(&ctx, dir, opts))).unwrap_or_else(|p| Err(format!("internal error: {}", panic_message(p))));
            let elapsed_ms = opts.timings.then(|| start.elapsed().as_millis() as u64);
            let (status, details, error) = match outcome {
                Ok((s, d)) => (s, d, None),
                Err(e) => (Status::Error, Details::new(), Some(e)),
            };
            Report { directive: dir.to_string(), line: pos.line, status, details, error, elapsed_ms }
        })
        .collect()
}

/// Canonical JSON: sorted keys, reports in file order.
pub fn to_json(model: &Model, reports: &[Report]) -> String {
    let v = json!({
        "field": model.field.to_string(),
        "reports": reports,
        "failures": reports.iter().filter(|r| r.failed()).count(),
    });
    serde_json::to_string_pretty(&v).expect("serializable")
}

fn text_value(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            if let (Some(Value::Array(ideal)), Some(c)) = (m.get("ideal"), m.get("classification")) {
                let gens: Vec<&str> = ideal.iter().filter_map(|g| g.as_str()).collect();
                out.push_str(&format!(" V({}) [{}, dim {}]\n", gens.join(", "), c.as_str().unwrap_or(""), m["proj_dim"].as_str().unwrap_or("")));
                return;
            }
            out.push('\n');
            for (k, v) in m {
                out.push_str(&format!("{pad}{k}:"));
                text_value(v, indent + 1, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object()) => {
            let items: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!(" [{}]\n", items.join(", ")));
        }
        Value::Array(a) => {
            out.push('\n');
            for x in a {
                out.push_str(&format!("{pad}-"));
                text_value(x, indent + 1, out);
            }
        }
        Value::String(s) => out.push_str(&format!(" {s}\n")),
        v => out.push_str(&format!(" {v}\n")),
    }
}

pub fn to_text(reports: &[Report]) -> String {
    let mut out = String::new();
    for r in reports {
        let tag = match r.status {
            Status::Ok => "OK",
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        out.push_str(&format!("[line {}] {}: {tag}", r.line, r.directive));
        if let Some(ms) = r.elapsed_ms {
            out.push_str(&format!(" ({ms} ms)"));
        }
        out.push('\n');
        if let Some(e) = &r.error {
            out.push_str(&format!("  error: {e}\n"));
        }
        for (k, v) in &r.details {
            out.push_str(&format!("  {k}:"));
            text_value(v, 2, &mut out);
        }
    }
    out
}
