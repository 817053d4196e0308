//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use ksv::exec::{self, Options};
use ksv::model::{self, Model, Object};
use ksv::syntax::{self, Tok};
use ksv_core::bgg::{self, SupportMode};
use ksv_core::extdg::{ext_dimensions_linear, DgLambdaModule, ExteriorAlgebra};
use ksv_core::koszul::{self, reduce_t, KoszulDgModule};
use ksv_core::modengine::{resolve_and_tor, PresentedModule};
use ksv_core::polyring::{HomogeneousIdeal, PolyRing, Polynomial};
use ksv_core::random::{random_dg_module, random_monomial_ideal, random_presented_module};
use ksv_core::varieties::{self, compare, Comparison, VarietyHandle};
use ksv_core::{Field, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: &str = include_str!("../golden/ci.ksv");
const LIMIT: Duration = Duration::from_secs(60);

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn golden(field: Field) -> Model {
    let line = match field {
        Field::Rationals => "field Q".to_string(),
        Field::Prime(p) => format!("field Fp {p}"),
    };
    let src = GOLDEN.replacen("field Fp 5", &line, 1);
    model::load(&src).expect("golden file loads").1
}

fn kmod<'a>(m: &'a Model, name: &str) -> &'a KoszulDgModule {
    match &m.objects[name] {
        Object::Koszul(k) => k,
        _ => panic!("{name} is not a kmodule"),
    }
}

fn lmod<'a>(m: &'a Model, name: &str) -> &'a DgLambdaModule {
    match &m.objects[name] {
        Object::Lambda(l) => l,
        _ => panic!("{name} is not an lmodule"),
    }
}

fn fields() -> [Field; 2] {
    [Field::Rationals, Field::Prime(5)]
}

fn var_ideal(s: &Arc<PolyRing>, vars: &[usize]) -> VarietyHandle {
    VarietyHandle::new(HomogeneousIdeal::new(s, vars.iter().map(|&i| s.var(i)).collect()).unwrap())
}

fn equal(u: &VarietyHandle, v: &VarietyHandle) -> bool {
    compare(u, v).unwrap() == Comparison::Equal
}

/// The golden Λ-modules: k, Λ, Λ/(e1), Λ/(e2), and the reductions of the Koszul modules.
fn golden_lambda(m: &Model) -> Vec<(String, DgLambdaModule)> {
    let mut out: Vec<(String, DgLambdaModule)> = ["k", "L", "L1", "L2"].iter().map(|n| (n.to_string(), lmod(m, n).clone())).collect();
    for n in ["A", "B", "C", "E"] {
        out.push((format!("t{n}"), reduce_t(kmod(m, n))));
    }
    out
}

const PAIRS: [(&str, &str); 6] = [("A", "A"), ("A", "B"), ("A", "C"), ("B", "B"), ("B", "C"), ("C", "C")];

fn criterion_1() -> Check {
    for k in fields() {
        let m = golden(k);
        let s = m.cohomology_ring().unwrap();
        let expected = [("A", var_ideal(&s, &[1])), ("B", var_ideal(&s, &[0])), ("C", VarietyHandle::everything(&s)), ("E", var_ideal(&s, &[0, 1]))];
        for (name, want) in &expected {
            let got = koszul::support_e(kmod(&m, name)).map_err(|e| e.to_string())?;
            ensure(equal(&got, want), || format!("{k}: V_E({name}) = {got}, expected {want}"))?;
        }
    }
    Ok("V_E(A) = V(χ2), V_E(B) = V(χ1), V_E(C) = V(0) over ℚ and F5".into())
}

fn criterion_2() -> Check {
    let mut count = 0;
    for k in fields() {
        let m = golden(k);
        let pairs = PAIRS.iter().copied().chain([("A", "E"), ("B", "E"), ("C", "E")]);
        for (x, y) in pairs {
            let r = koszul::tensor_support_e(kmod(&m, x), kmod(&m, y), Some(6)).map_err(|e| e.to_string())?;
            ensure(r.equal_up_to_radical(), || format!("{k} ({x},{y}): join {} vs direct {}", r.join, r.direct))?;
            let o = r.oracle.as_ref().ok_or("no window oracle")?;
            ensure(o.window == 6 && o.matches && o.rows.len() == 7, || format!("{k} ({x},{y}): oracle rows {:?}", o.rows))?;
            ensure(o.rows.iter().all(|(_, a, b)| a == b), || format!("{k} ({x},{y}): oracle rows {:?}", o.rows))?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs: join = direct, window-6 oracle matches"))
}

fn criterion_3() -> Check {
    for k in fields() {
        let m = golden(k);
        let (a, b) = (kmod(&m, "A"), kmod(&m, "B"));
        let tor = koszul::tor_window_e(a, b, 6).map_err(|e| e.to_string())?;
        let dims: Vec<Option<i64>> = tor.iter().map(|t| t.dim).collect();
        let want: Vec<Option<i64>> = (0..=6).map(|i| Some(if i == 0 { 1 } else { 0 })).collect();
        ensure(dims == want, || format!("{k}: Tor dims {dims:?}"))?;
        let j = varieties::join(&koszul::support_e(a).unwrap(), &koszul::support_e(b).unwrap()).map_err(|e| e.to_string())?;
        ensure(j.ideal().is_zero() && j.is_everything(), || format!("{k}: join is {j}"))?;
    }
    Ok("Tor_0 = 1, Tor_1..6 = 0, join ideal (0)".into())
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 0..50 {
        let c = 1 + n % 3;
        let s = PolyRing::cohomological(Field::Prime(5), &vec![1; c]);
        let u = VarietyHandle::new(random_monomial_ideal(&mut rng, &s, 3, 3));
        let v = VarietyHandle::new(random_monomial_ideal(&mut rng, &s, 3, 3));
        let k = varieties::external_sum(&u, &v).map_err(|e| e.to_string())?;
        let pre = VarietyHandle::new(varieties::delta_preimage(&s, &k).map_err(|e| e.to_string())?);
        let j = varieties::join(&u, &v).map_err(|e| e.to_string())?;
        ensure(equal(&pre, &j), || format!("instance {n}: Δ⁻¹ = {pre}, join = {j} for {u}, {v}"))?;
    }
    Ok("50 random monomial pairs over F5".into())
}

fn nak_holds(x: &PresentedModule, y: &PresentedModule) -> bool {
    let s = &x.ring;
    let mut union = VarietyHandle::empty(s);
    for t in resolve_and_tor(x, y, s.nvars()) {
        if !t.is_zero() {
            union = varieties::union(&union, &VarietyHandle::new(t.annihilator())).unwrap();
        }
    }
    let meet = varieties::intersection(&VarietyHandle::new(x.annihilator()), &VarietyHandle::new(y.annihilator())).unwrap();
    equal(&union, &meet)
}

fn criterion_5() -> Check {
    let s = PolyRing::cohomological(Field::Prime(5), &[1, 1]);
    let cyc = |vars: &[usize], d: i64| PresentedModule::cyclic(&HomogeneousIdeal::new(&s, vars.iter().map(|&i| s.var(i)).collect()).unwrap(), d);
    let (x1, x2, free) = (cyc(&[0], 0), cyc(&[1], 0), cyc(&[], 0));

    let t = resolve_and_tor(&x1, &x2, 2);
    ensure(t[0].hilbert_series() == cyc(&[0, 1], 0).hilbert_series() && t[1].is_zero(), || "Tor(S/χ1, S/χ2)".into())?;
    let t = resolve_and_tor(&x1, &x1, 2);
    ensure(
        t[0].hilbert_series() == x1.hilbert_series() && t[1].hilbert_series() == cyc(&[0], 2).hilbert_series() && t[2].is_zero(),
        || "Tor(S/χ1, S/χ1)".into(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x = random_presented_module(&mut rng, &s);
    let t = resolve_and_tor(&x, &free, 2);
    ensure(t[0].hilbert_series() == x.hilbert_series() && t[1..].iter().all(|m| m.is_zero()), || "Tor(X, S)".into())?;
    for (a, b) in [(&x1, &x2), (&x1, &x1), (&x, &free)] {
        ensure(nak_holds(a, b), || "support identity on a worked example".into())?;
    }
    for n in 0..25 {
        let c = 1 + n % 3;
        let s = PolyRing::cohomological(Field::Prime(5), &vec![1; c]);
        let (a, b) = (random_presented_module(&mut rng, &s), random_presented_module(&mut rng, &s));
        ensure(nak_holds(&a, &b), || format!("random pair {n}"))?;
    }
    Ok("3 worked examples + 25 random pairs".into())
}

fn criterion_6() -> Check {
    let m = golden(Field::Prime(5));
    let s = m.cohomology_ring().unwrap();
    let names = ["k", "L", "L1", "L2"];
    for x in names {
        for y in names {
            let (a, b) = (lmod(&m, x), lmod(&m, y));
            let direct = bgg::support_in(&s, &a.tensor_k(b).unwrap(), SupportMode::D).map_err(|e| e.to_string())?;
            let meet = varieties::intersection(&bgg::support_in(&s, a, SupportMode::D).unwrap(), &bgg::support_in(&s, b, SupportMode::D).unwrap())
                .map_err(|e| e.to_string())?;
            ensure(equal(&direct, &meet), || format!("{x} ⊗ {y}: {direct} vs {meet}"))?;
        }
    }
    let t = lmod(&m, "L1").tensor_k(lmod(&m, "L2")).unwrap();
    let v = bgg::support_in(&s, &t, SupportMode::D).unwrap();
    ensure(t.dim() == 4 && v.classification() == varieties::Classification::ConePoint, || format!("diagonal tensor: {v}"))?;
    Ok("16 ordered pairs; Λ/(e1) ⊗ Λ/(e2) is a cone point".into())
}

fn d_b_checks(m: &DgLambdaModule) -> Result<(), String> {
    let s = bgg::cohomology_ring(m);
    let d = bgg::support_in(&s, m, SupportMode::D).map_err(|e| e.to_string())?;
    let b_dual = bgg::support_in(&s, &m.dual(), SupportMode::B).map_err(|e| e.to_string())?;
    ensure(d.canonical_generators() == b_dual.canonical_generators(), || format!("V^d = {d} but V^b(M^∨) = {b_dual}"))?;
    let b = bgg::support_in(&s, m, SupportMode::B).map_err(|e| e.to_string())?;
    ensure(equal(&d, &b), || format!("V^d = {d} but V^b = {b}"))
}

fn criterion_7() -> Check {
    let m = golden(Field::Prime(5));
    for (name, l) in golden_lambda(&m) {
        d_b_checks(&l).map_err(|e| format!("{name}: {e}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 0..100 {
        let alg = ExteriorAlgebra::koszul(Field::Prime(5), 1 + n % 3);
        let l = random_dg_module(&mut rng, &alg, 8);
        d_b_checks(&l).map_err(|e| format!("random module {n}: {e}"))?;
    }
    Ok("8 golden + 100 random modules".into())
}

fn criterion_8() -> Check {
    for k in fields() {
        let m = golden(k);
        for name in ["A", "B", "C", "E"] {
            let r = koszul::dagger_support(kmod(&m, name)).map_err(|e| e.to_string())?;
            let v = koszul::support_e(kmod(&m, name)).unwrap();
            ensure(r.comparison == Comparison::Equal && equal(&r.dagger, &v), || format!("{k} {name}: dagger {} vs {v}", r.dagger))?;
        }
    }
    Ok("A, B, C, E over ℚ and F5".into())
}

fn criterion_9() -> Check {
    let mut lines = Vec::new();
    for k in fields() {
        let m = golden(k);
        for (x, y) in PAIRS {
            let r = koszul::tor_containment_check(kmod(&m, x), kmod(&m, y), None).map_err(|e| e.to_string())?;
            ensure(r.window as i64 == r.s + r.t, || "window is s + t".into())?;
            ensure(r.holds, || format!("{k} ({x},{y}): join {} ⊄ {}", r.join, r.union))?;
            if k == Field::Prime(5) {
                lines.push(format!("{x}{y}:s+t={}", r.s + r.t));
            }
        }
    }
    Ok(format!("6 pairs over ℚ and F5 ({})", lines.join(" ")))
}

fn points_p1() -> Vec<Vec<Scalar>> {
    let k = Field::Prime(5);
    let mut pts = vec![vec![k.zero(), k.one()]];
    pts.extend((0..5).map(|a| vec![k.one(), k.from_int(a)]));
    pts
}

fn criterion_10() -> Check {
    let m = golden(Field::Prime(5));
    let mut probes = 0;
    for (name, l) in golden_lambda(&m) {
        if l.has_zero_differential() {
            let v = bgg::support(&l, SupportMode::D).map_err(|e| e.to_string())?;
            for p in points_p1() {
                let probe = bgg::point_probe(&l, &p).map_err(|e| e.to_string())?;
                ensure(probe == v.contains_point(&p), || format!("{name} at {p:?}: probe {probe}, V(ann) = {v}"))?;
                probes += 1;
            }
        }
        let hs = bgg::ext_module(&l).map_err(|e| e.to_string())?.hilbert_series();
        for (d, n) in ext_dimensions_linear(&l, 10) {
            ensure(hs.coefficient(d) == n as i64, || format!("{name}: Ext degree {d}: {} vs {n}", hs.coefficient(d)))?;
        }
    }
    Ok(format!("{probes} point probes; Ext paths agree through degree 10"))
}

fn is_reduced_gb(ideal: &HomogeneousIdeal) -> Result<(), String> {
    let gb = ideal.groebner_basis();
    for (i, g) in gb.iter().enumerate() {
        ensure(g.lead_coeff().is_some_and(|c| c.is_one()), || format!("{g} is not monic"))?;
        for (j, h) in gb.iter().enumerate() {
            let lh = h.lead_monomial().unwrap();
            ensure(i == j || g.terms().iter().all(|(m, _)| !lh.divides(m)), || format!("{g} reducible by {h}"))?;
        }
    }
    for g in ideal.generators() {
        ensure(ideal.normal_form(g).is_zero(), || format!("generator {g} not reduced to zero"))?;
    }
    for (i, g) in gb.iter().enumerate() {
        for h in &gb[i + 1..] {
            let (lg, lh) = (g.lead_monomial().unwrap(), h.lead_monomial().unwrap());
            let l = lg.lcm(lh);
            let k = g.ring().field();
            let sp: Polynomial = &g.mul_term(&lg.quotient_of(&l), &k.one()) - &h.mul_term(&lh.quotient_of(&l), &k.one());
            ensure(ideal.normal_form(&sp).is_zero(), || format!("S({g}, {h}) does not reduce to zero"))?;
        }
    }
    Ok(())
}

fn random_poly(rng: &mut ChaCha8Rng, s: &Arc<PolyRing>, deg: i64) -> Polynomial {
    let mut p = s.zero();
    for m in s.monomials_of_degree(deg) {
        if rng.gen_bool(0.4) {
            p = &p + &Polynomial::term(s, m, s.field().from_int(rng.gen_range(-3..=3)));
        }
    }
    p
}

fn render(toks: &[Tok]) -> String {
    toks.iter()
        .map(|t| match t {
            Tok::Ident(s) => s.clone(),
            Tok::Int(n) => n.to_string(),
            Tok::Sym(s) => s.to_string(),
            Tok::Eof => String::new(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn mutate(rng: &mut ChaCha8Rng, toks: &[Tok]) -> Vec<Tok> {
    let mut t: Vec<Tok> = toks.iter().filter(|t| **t != Tok::Eof).cloned().collect();
    for _ in 0..rng.gen_range(1..=3) {
        let n = t.len();
        let i = rng.gen_range(0..n);
        match rng.gen_range(0..4) {
            0 => {
                t.remove(i);
            }
            1 => t.insert(i, t[rng.gen_range(0..n)].clone()),
            2 => t.swap(i, rng.gen_range(0..n)),
            _ => t[i] = t[rng.gen_range(0..n)].clone(),
        }
    }
    t
}

fn criterion_11() -> Check {
    // Buchberger: reduced, and every S-polynomial reduces to zero
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 0..40 {
        let k = if n % 2 == 0 { Field::Prime(5) } else { Field::Rationals };
        let s = PolyRing::standard(k, &["x", "y", "z"]);
        let gens = (0..rng.gen_range(1..=4))
            .map(|_| {
                let d = rng.gen_range(1..=3);
                random_poly(&mut rng, &s, d)
            })
            .collect();
        is_reduced_gb(&HomogeneousIdeal::new(&s, gens).unwrap()).map_err(|e| format!("instance {n}: {e}"))?;
    }

    // determinism, including across thread counts
    let m = golden(Field::Prime(5));
    let opts = Options::default();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| exec::to_json(&m, &exec::run(&m, opts)));
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(|| exec::to_json(&m, &exec::run(&m, opts)));
    ensure(one == many && one == exec::to_json(&m, &exec::run(&m, opts)), || "reports differ between runs".into())?;
    let text = exec::to_text(&exec::run(&m, opts));
    ensure(text == exec::to_text(&exec::run(&m, opts)), || "text reports differ".into())?;

    // round trip on the golden file
    let session = syntax::parse(GOLDEN).map_err(|e| e.to_string())?;
    let printed = syntax::pretty(&session);
    ensure(syntax::parse(&printed).as_ref() == Ok(&session), || "golden file does not round-trip".into())?;

    // fuzz: mutated token streams never panic; errors are located; any
    // session that parses also round-trips
    let toks: Vec<Tok> = syntax::lex(GOLDEN).unwrap().into_iter().map(|(t, _)| t).collect();
    let (mut rejected, mut parsed) = (0, 0);
    for n in 0..600 {
        let src = render(&mutate(&mut rng, &toks));
        let outcome = catch_unwind(AssertUnwindSafe(|| model::load(&src))).map_err(|_| format!("mutation {n} panicked:\n{src}"))?;
        match outcome {
            Err(e) => {
                ensure(e.pos().line >= 1 && e.to_string().contains("line"), || format!("mutation {n}: unlocated error {e}"))?;
                rejected += 1;
            }
            Ok((s, _)) => {
                ensure(syntax::parse(&syntax::pretty(&s)).as_ref() == Ok(&s), || format!("mutation {n} does not round-trip"))?;
                parsed += 1;
            }
        }
    }

    // a few mutations through the binary itself
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for n in 0..25 {
        let src = render(&mutate(&mut rng, &toks));
        let path = dir.path().join(format!("fuzz{n}.ksv"));
        std::fs::write(&path, &src).map_err(|e| e.to_string())?;
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_ksv")).arg("check").arg(&path).output().map_err(|e| e.to_string())?;
        let code = out.status.code();
        ensure(matches!(code, Some(0) | Some(2)), || format!("binary exited with {code:?} on:\n{src}"))?;
        if code == Some(2) {
            let err = String::from_utf8_lossy(&out.stderr);
            ensure(err.contains("line"), || format!("unlocated error: {err}"))?;
        }
    }
    Ok(format!("40 Gröbner bases, deterministic reports, round trip, fuzz {rejected} rejected / {parsed} accepted"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 11] = [
        ("golden supports", criterion_1),
        ("main theorem on golden pairs", criterion_2),
        ("Tor-independent pair", criterion_3),
        ("join as diagonal preimage", criterion_4),
        ("support of derived tensor over S", criterion_5),
        ("Hopf tensor formula", criterion_6),
        ("V^d and V^b", criterion_7),
        ("dagger support", criterion_8),
        ("Tor containment", criterion_9),
        ("oracle coherence", criterion_10),
        ("infrastructure", criterion_11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {:>2}: {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| if elapsed > LIMIT { Err(format!("took {elapsed:?} (> 60 s): {msg}")) } else { Ok(msg) });
        match result {
            Ok(msg) => println!("PASS {label} ({:.2} s) — {msg}", elapsed.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("FAIL {label} ({:.2} s) — {msg}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
