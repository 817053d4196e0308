//! Semantic pass: turns a parsed session into rings, ideals and validated modules.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use ksv_core::extdg::{DgLambdaModule, ExteriorAlgebra};
use ksv_core::koszul::{GradedBase, KoszulData, KoszulDgModule, KoszulError};
use ksv_core::linalg::Matrix;
use ksv_core::modengine::Column;
use ksv_core::polyring::{HomogeneousIdeal, MonomialOrder, PolyRing, Polynomial};
use ksv_core::Field;
use num_bigint::BigInt;
use thiserror::Error;

use crate::syntax::{self, Directive, Entry, Expr, FieldSpec, Pos, Session, StmtKind, SyntaxError};

/// Degree cap for polynomial literals; keeps exponent arithmetic in range.
const MAX_DEGREE: i64 = 512;
/// Largest rank accepted for a module block.
const MAX_RANK: usize = 256;
pub const MAX_WINDOW: i64 = 40;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct SemanticError {
    pub pos: Pos,
    pub message: String,
}

/// Anything wrong with the input file; reported with its location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error("error at {0}")]
    Semantic(#[from] SemanticError),
}

impl InputError {
    pub fn pos(&self) -> Pos {
        match self {
            InputError::Syntax(e) => e.pos,
            InputError::Semantic(e) => e.pos,
        }
    }
}

fn fail<T>(pos: Pos, message: impl Into<String>) -> Result<T, SemanticError> {
    Err(SemanticError { pos, message: message.into() })
}

#[derive(Debug, Clone)]
pub enum Object {
    Ideal(HomogeneousIdeal),
    Lambda(DgLambdaModule),
    Koszul(KoszulDgModule),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Ideal(_) => "ideal",
            Object::Lambda(_) => "lmodule",
            Object::Koszul(_) => "kmodule",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub field: Field,
    pub base: Option<GradedBase>,
    pub koszul: Option<KoszulData>,
    pub alg: Option<ExteriorAlgebra>,
    pub gorenstein: bool,
    pub objects: BTreeMap<String, Object>,
    pub directives: Vec<(Pos, Directive)>,
}

impl Model {
    /// `S = k[χ_1..χ_c]`, once the exterior algebra is known.
    pub fn cohomology_ring(&self) -> Option<Arc<PolyRing>> {
        self.alg.as_ref().map(|a| PolyRing::cohomological(a.field(), a.generator_degrees()))
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "field {}", self.field)?;
        if let Some(a) = &self.alg {
            write!(f, ", c = {}", a.c())?;
        }
        write!(f, ", {} objects, {} directives", self.objects.len(), self.directives.len())
    }
}

/// Parses and checks a whole file.
pub fn load(src: &str) -> Result<(Session, Model), InputError> {
    let session = syntax::parse(src)?;
    let model = analyze(&session)?;
    Ok((session, model))
}

pub fn eval(ring: &Arc<PolyRing>, e: &Expr, what: &str) -> Result<Polynomial, SemanticError> {
    let k = ring.field();
    let p = match e {
        Expr::Int(n) => ring.from_int(*n),
        Expr::Frac(a, b) => match k.from_ratio(&BigInt::from(*a), &BigInt::from(*b)) {
            Ok(s) => ring.constant(s),
            Err(err) => return fail(Pos::default(), format!("{a}/{b}: {err}")),
        },
        Expr::Var(v, pos) => match ring.var_index(v) {
            Some(i) => ring.var(i),
            None => return fail(*pos, format!("unknown variable `{v}` in {what}")),
        },
        Expr::Pow(b, n) => {
            let b = eval(ring, b, what)?;
            if b.max_degree().unwrap_or(0) * (*n as i64) > MAX_DEGREE {
                return fail(pos_of(e), "degree too large");
            }
            b.pow(*n)
        }
        Expr::Mul(fs) => {
            let mut acc = ring.one();
            for f in fs {
                acc = &acc * &eval(ring, f, what)?;
                if acc.max_degree().unwrap_or(0) > MAX_DEGREE {
                    return fail(pos_of(e), "degree too large");
                }
            }
            acc
        }
        Expr::Sum(ts) => {
            let mut acc = ring.zero();
            for (neg, t) in ts {
                let t = eval(ring, t, what)?;
                acc = if *neg { &acc - &t } else { &acc + &t };
            }
            acc
        }
    };
    Ok(p)
}

/// First variable position inside an expression, for error messages.
fn pos_of(e: &Expr) -> Pos {
    match e {
        Expr::Var(_, p) => *p,
        Expr::Pow(b, _) => pos_of(b),
        Expr::Mul(fs) => fs.iter().map(pos_of).find(|p| p.line > 0).unwrap_or_default(),
        Expr::Sum(ts) => ts.iter().map(|(_, t)| pos_of(t)).find(|p| p.line > 0).unwrap_or_default(),
        _ => Pos::default(),
    }
}

fn eval_at(ring: &Arc<PolyRing>, e: &Expr, what: &str, at: Pos) -> Result<Polynomial, SemanticError> {
    eval(ring, e, what).map_err(|mut err| {
        if err.pos.line == 0 {
            err.pos = at;
        }
        err
    })
}

fn homogeneous(p: Polynomial, at: Pos, what: &str) -> Result<Polynomial, SemanticError> {
    if p.is_homogeneous() {
        Ok(p)
    } else {
        fail(at, format!("{what} `{p}` is not homogeneous"))
    }
}

struct Basis<'a> {
    module: &'a str,
    index: BTreeMap<&'a str, usize>,
}

impl<'a> Basis<'a> {
    fn new(module: &'a str, names: impl Iterator<Item = &'a String>, at: Pos, reserved: &PolyRing) -> Result<Basis<'a>, SemanticError> {
        let mut index = BTreeMap::new();
        for (i, n) in names.enumerate() {
            if index.insert(n.as_str(), i).is_some() {
                return fail(at, format!("{module}: basis element `{n}` declared twice"));
            }
            if reserved.var_index(n).is_some() {
                return fail(at, format!("{module}: basis element `{n}` clashes with a ring variable"));
            }
        }
        if index.len() > MAX_RANK {
            return fail(at, format!("{module}: rank {} exceeds the limit {MAX_RANK}", index.len()));
        }
        Ok(Basis { module, index })
    }

    fn get(&self, name: &str, at: Pos) -> Result<usize, SemanticError> {
        match self.index.get(name) {
            Some(&i) => Ok(i),
            None => fail(at, format!("{}: unknown basis element `{name}`", self.module)),
        }
    }

    fn len(&self) -> usize {
        self.index.len()
    }

    /// Columns of the map given by `entries`: column `src` holds its image.
    fn columns(&self, ring: &Arc<PolyRing>, label: &str, entries: &[Entry]) -> Result<Vec<Column>, SemanticError> {
        let n = self.len();
        let mut cols: Vec<Column> = vec![vec![ring.zero(); n]; n];
        let mut seen = vec![false; n];
        for e in entries {
            let src = self.get(&e.source, e.pos)?;
            if std::mem::replace(&mut seen[src], true) {
                return fail(e.pos, format!("{}: `{}` appears twice in `{label}`", self.module, e.source));
            }
            for t in &e.terms {
                let tgt = self.get(&t.target, t.pos)?;
                let mut c = match &t.coeff {
                    Some(c) => eval_at(ring, c, &format!("{} `{label}`", self.module), t.pos)?,
                    None => ring.one(),
                };
                if t.negative {
                    c = -&c;
                }
                cols[src][tgt] = &cols[src][tgt] + &c;
            }
        }
        Ok(cols)
    }
}

fn scalar_matrix(cols: &[Column], field: Field) -> Matrix {
    let n = cols.len();
    let mut m = Matrix::zeros(field, n, n);
    for (c, col) in cols.iter().enumerate() {
        for (r, p) in col.iter().enumerate() {
            if !p.is_zero() {
                m.set(r, c, p.constant_term());
            }
        }
    }
    m
}

fn check_indices(module: &str, ops: &[(i64, Vec<Entry>)], c: usize, label: &str, at: Pos) -> Result<(), SemanticError> {
    let mut seen = vec![false; c];
    for (i, _) in ops {
        if *i < 1 || *i as usize > c {
            return fail(at, format!("{module}: `{label}{i}` but the exterior algebra has {c} generators"));
        }
        if std::mem::replace(&mut seen[*i as usize - 1], true) {
            return fail(at, format!("{module}: `{label}{i}` given twice"));
        }
    }
    Ok(())
}

pub fn analyze(session: &Session) -> Result<Model, SemanticError> {
    let mut model = Model {
        field: Field::Rationals,
        base: None,
        koszul: None,
        alg: None,
        gorenstein: false,
        objects: BTreeMap::new(),
        directives: Vec::new(),
    };
    let mut exterior_pos: Option<Pos> = None;
    for (n, stmt) in session.stmts.iter().enumerate() {
        let at = stmt.pos;
        match &stmt.kind {
            StmtKind::Field(spec) => {
                if n != 0 {
                    return fail(at, "`field` must be the first statement");
                }
                model.field = match spec {
                    FieldSpec::Q => Field::Rationals,
                    FieldSpec::Fp(p) => match u64::try_from(*p).ok().map(Field::prime) {
                        Some(Ok(f)) => f,
                        _ => return fail(at, format!("Fp {p}: the modulus must be a prime below 2^31")),
                    },
                };
            }
            StmtKind::Ring { vars, relations } => {
                if model.base.is_some() {
                    return fail(at, "the ring is already declared");
                }
                let mut weights = Vec::new();
                for (v, w) in vars {
                    match w {
                        None => weights.push(1),
                        Some(w) if (1..=64).contains(w) => weights.push(*w as u32),
                        Some(w) => return fail(at, format!("weight {w} of `{v}` must be between 1 and 64")),
                    }
                }
                let names = vars.iter().map(|(v, _)| v.clone()).collect();
                let ring = PolyRing::new(model.field, names, weights, MonomialOrder::Grevlex).or_else(|e| fail(at, e.to_string()))?;
                let mut rels = Vec::new();
                for r in relations {
                    let p = homogeneous(eval_at(&ring, r, "a ring relation", at)?, at, "relation")?;
                    if p.is_constant() && !p.is_zero() {
                        return fail(at, format!("relation `{p}` is a unit"));
                    }
                    rels.push(p);
                }
                model.base = Some(GradedBase::new(&ring, rels).or_else(|e| fail(at, e.to_string()))?);
            }
            StmtKind::Koszul { f } => {
                let Some(base) = model.base.clone() else { return fail(at, "`koszul` needs a `ring` statement first") };
                if model.koszul.is_some() {
                    return fail(at, "`koszul` is already declared");
                }
                let mut fs = Vec::new();
                for e in f {
                    fs.push(eval_at(base.ring(), e, "f", at)?);
                }
                let data = match KoszulData::new(base, fs) {
                    Ok(d) => d,
                    Err(KoszulError::BadF { index, poly }) => {
                        return fail(at, format!("f_{index} = {poly} must be homogeneous of positive degree and nonzero in R"))
                    }
                    Err(e) => return fail(at, e.to_string()),
                };
                let alg = data.exterior();
                match &model.alg {
                    Some(a) if *a != alg => {
                        return fail(at, format!("`koszul` has {} generators of degree 1, which conflicts with `exterior`", data.c()))
                    }
                    Some(_) => {}
                    None if !model.objects.is_empty() => {
                        return fail(at, "`koszul` must come before the modules and ideals that use it")
                    }
                    None => model.alg = Some(alg),
                }
                model.koszul = Some(data);
            }
            StmtKind::Exterior { degrees } => {
                if exterior_pos.is_some() || model.alg.is_some() {
                    return fail(at, "the exterior algebra is already fixed");
                }
                let mut d = Vec::new();
                for &x in degrees {
                    if !(1..=63).contains(&x) || x % 2 == 0 {
                        return fail(at, format!("generator degree {x} must be odd and between 1 and 63"));
                    }
                    d.push(x as u32);
                }
                if d.len() > 8 {
                    return fail(at, "at most 8 exterior generators are supported");
                }
                model.alg = Some(ExteriorAlgebra::new(model.field, d).or_else(|e| fail(at, e.to_string()))?);
                exterior_pos = Some(at);
            }
            StmtKind::Assume(a) => match a.as_str() {
                "gorenstein" => model.gorenstein = true,
                other => return fail(at, format!("unknown assumption `{other}` (expected `gorenstein`)")),
            },
            StmtKind::Ideal { name, gens } => {
                let Some(s) = model.cohomology_ring() else {
                    return fail(at, format!("ideal {name}: declare `koszul` or `exterior` first to fix the ring of χ's"));
                };
                let mut ps = Vec::new();
                for g in gens {
                    ps.push(homogeneous(eval_at(&s, g, &format!("ideal {name}"), at)?, at, "generator")?);
                }
                let ideal = HomogeneousIdeal::new(&s, ps).or_else(|e| fail(at, e.to_string()))?;
                insert(&mut model, name, Object::Ideal(ideal), at)?;
            }
            StmtKind::LModule { name, basis, d, actions } => {
                let alg = match &model.alg {
                    Some(a) => a.clone(),
                    None => {
                        let c = actions.iter().map(|(i, _)| *i).max().unwrap_or(0);
                        if !(0..=8).contains(&c) {
                            return fail(at, format!("lmodule {name}: `e{c}` is out of range"));
                        }
                        let a = ExteriorAlgebra::koszul(model.field, c as usize);
                        model.alg = Some(a.clone());
                        a
                    }
                };
                check_indices(&format!("lmodule {name}"), actions, alg.c(), "e", at)?;
                let scalars = PolyRing::standard(model.field, &[]);
                let module = format!("lmodule {name}");
                let b = Basis::new(&module, basis.iter().map(|(n, _)| n), at, &scalars)?;
                let mut degrees = Vec::new();
                for (v, deg) in basis {
                    match i32::try_from(*deg) {
                        Ok(d) if d.abs() <= 1000 => degrees.push(d),
                        _ => return fail(at, format!("{module}: degree of `{v}` is out of range")),
                    }
                }
                let differential = scalar_matrix(&b.columns(&scalars, "d", d)?, model.field);
                let mut acts = vec![Matrix::zeros(model.field, b.len(), b.len()); alg.c()];
                for (i, entries) in actions {
                    acts[*i as usize - 1] = scalar_matrix(&b.columns(&scalars, &format!("e{i}"), entries)?, model.field);
                }
                let m = DgLambdaModule::new(alg, degrees, differential, acts).or_else(|e| fail(at, format!("{module} is not a DG module: {e}")))?;
                insert(&mut model, name, Object::Lambda(m), at)?;
            }
            StmtKind::KModule { name, gens, d, sigmas } => {
                let Some(data) = model.koszul.clone() else { return fail(at, format!("kmodule {name}: declare `koszul` first")) };
                let module = format!("kmodule {name}");
                check_indices(&module, sigmas, data.c(), "sigma", at)?;
                let ring = data.base.ring().clone();
                let b = Basis::new(&module, gens.iter().map(|g| &g.0), at, &ring)?;
                let mut degs = Vec::new();
                for (g, h, i) in gens {
                    match i32::try_from(*h) {
                        Ok(h) if h.abs() <= 1000 && i.abs() <= 100_000 => degs.push((h, *i)),
                        _ => return fail(at, format!("{module}: degree of `{g}` is out of range")),
                    }
                }
                let differential = b.columns(&ring, "d", d)?;
                let mut sig = vec![vec![vec![ring.zero(); b.len()]; b.len()]; data.c()];
                for (i, entries) in sigmas {
                    sig[*i as usize - 1] = b.columns(&ring, &format!("sigma{i}"), entries)?;
                }
                let m = KoszulDgModule::new(data, degs, differential, sig).or_else(|e| match e {
                    KoszulError::Invalid(v) => fail(at, format!("{module} is not a Koszul module: {v}")),
                    e => fail(at, format!("{module}: {e}")),
                })?;
                insert(&mut model, name, Object::Koszul(m), at)?;
            }
            StmtKind::Directive(dir) => {
                check_directive(&model, dir, at)?;
                model.directives.push((at, dir.clone()));
            }
        }
    }
    Ok(model)
}

fn insert(model: &mut Model, name: &str, obj: Object, at: Pos) -> Result<(), SemanticError> {
    if let Some(old) = model.objects.get(name) {
        return fail(at, format!("`{name}` is already defined as an {}", old.kind()));
    }
    model.objects.insert(name.to_string(), obj);
    Ok(())
}

/// Argument kinds accepted by each directive.
pub fn arity(dir: &Directive) -> (usize, usize) {
    match dir.what.as_str() {
        "support" | "ext" | "hilbert" => (1, 1),
        "dual" => (1, 1),
        "tensor-support" | "join" | "rhom-support" | "theorem" | "hopf" | "tor-bound" | "nak" => (2, 2),
        _ => (0, 0),
    }
}

fn check_directive(model: &Model, dir: &Directive, at: Pos) -> Result<(), SemanticError> {
    let (lo, hi) = arity(dir);
    if dir.args.len() < lo || dir.args.len() > hi {
        return fail(at, format!("`{} {}` takes {lo} argument{}, got {}", dir.verb, dir.what, if lo == 1 { "" } else { "s" }, dir.args.len()));
    }
    if let Some(w) = dir.window {
        if !(0..=MAX_WINDOW).contains(&w) {
            return fail(at, format!("window {w} must be between 0 and {MAX_WINDOW}"));
        }
    }
    let mut kinds = Vec::new();
    for (a, p) in &dir.args {
        match model.objects.get(a) {
            Some(o) => kinds.push(o.kind()),
            None => return fail(*p, format!("`{a}` is not defined")),
        }
    }
    let modules_only = matches!(dir.what.as_str(), "tensor-support" | "rhom-support" | "theorem" | "dual" | "hopf" | "tor-bound");
    if modules_only && kinds.contains(&"ideal") {
        return fail(at, format!("`{} {}` needs modules, not ideals", dir.verb, dir.what));
    }
    if kinds.len() == 2 && kinds[0] != kinds[1] && kinds.iter().all(|k| *k != "ideal") {
        return fail(at, format!("`{} {}` needs two modules of the same kind", dir.verb, dir.what));
    }
    if dir.what == "rhom-support" {
        if kinds[0] != "kmodule" {
            return fail(at, "`rhom-support` needs kmodules");
        }
        if !model.gorenstein {
            return fail(at, "`rhom-support` needs `assume gorenstein`");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_session_shape() {
        let (_, m) = load(include_str!("../golden/ci.ksv")).unwrap();
        assert_eq!(m.field, Field::Prime(5));
        assert_eq!(m.alg.as_ref().unwrap().c(), 2);
        assert_eq!(m.cohomology_ring().unwrap().weights(), &[2, 2]);
        assert!(m.gorenstein);
    }

    #[test]
    fn trivial_module_without_koszul_data() {
        let (_, m) = load("field Q\nlmodule K { basis: v:0; d: ; e1: ; e2: ; }").unwrap();
        match &m.objects["K"] {
            Object::Lambda(k) => assert_eq!(k, &DgLambdaModule::trivial(&ExteriorAlgebra::koszul(Field::Rationals, 2))),
            o => panic!("{}", o.kind()),
        }
    }

    #[test]
    fn errors_are_located() {
        let e = load("field Q\nring [x, y]\nkoszul f = [x^2, z]\n").unwrap_err();
        assert_eq!(e.pos().line, 3);
        assert!(e.to_string().contains("unknown variable `z`"), "{e}");
        let e = load("field Q\nring [x]\nkoszul f = [x]\nassume gorenstein\nideal I = [chi1]\nverify nak I\n").unwrap_err();
        assert_eq!(e.pos().line, 6);
        let e = load("field Q\nring [x]\nkoszul f = [x]\nideal I = [chi1]\ncompute rhom-support I I\n").unwrap_err();
        assert!(e.to_string().contains("needs modules"), "{e}");
    }
}
