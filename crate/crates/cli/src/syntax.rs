//! Lexer, AST, recursive-descent parser and pretty-printer for `.ksv` files.

use std::fmt::{self, Write as _};

use thiserror::Error;

/// Source position. All positions compare equal so that ASTs can be compared
/// structurally across reformatting.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, SyntaxError> {
    Err(SyntaxError { pos, message: message.into() })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: &[&str] = &["->", "[", "]", "(", ")", "{", "}", ",", ":", ";", "/", "*", "^", "+", "-", "="];

pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            match text.parse::<i64>() {
                Ok(n) => out.push((Tok::Int(n), pos)),
                Err(_) => return err(pos, format!("integer literal `{text}` is too large")),
            }
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push((Tok::Sym(s), pos));
            }
            None => return err(pos, format!("unexpected character `{c}`")),
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Polynomial expressions, kept as written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Frac(i64, i64),
    Var(String, Pos),
    Pow(Box<Expr>, u32),
    Mul(Vec<Expr>),
    /// Terms with a `negative` flag; the first flag is a leading minus.
    Sum(Vec<(bool, Expr)>),
}

/// `coeff * target`, possibly negated; a missing coefficient means 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub negative: bool,
    pub coeff: Option<Expr>,
    pub target: String,
    pub pos: Pos,
}

/// `source -> Σ terms`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub source: String,
    pub pos: Pos,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    Q,
    Fp(i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Directive {
    pub verb: String,
    pub what: String,
    pub args: Vec<(String, Pos)>,
    pub window: Option<i64>,
}

impl fmt::Display for Directive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.verb, self.what)?;
        for (a, _) in &self.args {
            write!(f, " {a}")?;
        }
        if let Some(w) = self.window {
            write!(f, " window {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Field(FieldSpec),
    Ring { vars: Vec<(String, Option<i64>)>, relations: Vec<Expr> },
    Koszul { f: Vec<Expr> },
    Exterior { degrees: Vec<i64> },
    Ideal { name: String, gens: Vec<Expr> },
    Assume(String),
    LModule { name: String, basis: Vec<(String, i64)>, d: Vec<Entry>, actions: Vec<(i64, Vec<Entry>)> },
    KModule { name: String, gens: Vec<(String, i64, i64)>, d: Vec<Entry>, sigmas: Vec<(i64, Vec<Entry>)> },
    Directive(Directive),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub pos: Pos,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Session {
    pub stmts: Vec<Stmt>,
}

pub const COMPUTE: &[&str] = &["support", "ext", "hilbert", "tensor-support", "join", "rhom-support"];
pub const VERIFY: &[&str] = &["theorem", "dual", "hopf", "tor-bound", "nak"];
const MAX_DEPTH: usize = 64;

/// Basis declarations, the differential, and the indexed operators.
type ModuleBody<B> = (Vec<B>, Vec<Entry>, Vec<(i64, Vec<Entry>)>);

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == w)
    }

    fn expected<T>(&self, what: &str) -> Result<T, SyntaxError> {
        err(self.pos(), format!("expected {what}, found {}", self.peek()))
    }

    fn sym(&mut self, s: &str) -> Result<Pos, SyntaxError> {
        if self.is_sym(s) {
            Ok(self.bump().1)
        } else {
            self.expected(&format!("`{s}`"))
        }
    }

    fn word(&mut self, w: &str) -> Result<Pos, SyntaxError> {
        if self.is_word(w) {
            Ok(self.bump().1)
        } else {
            self.expected(&format!("`{w}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let p = self.bump().1;
                Ok((s, p))
            }
            _ => self.expected(what),
        }
    }

    fn int(&mut self) -> Result<i64, SyntaxError> {
        match *self.peek() {
            Tok::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.expected("an integer"),
        }
    }

    fn signed_int(&mut self) -> Result<i64, SyntaxError> {
        if self.is_sym("-") {
            self.bump();
            Ok(-self.int()?)
        } else {
            self.int()
        }
    }

    /// `open item (, item)* close`, reporting an unclosed delimiter at its opening.
    fn list<T>(&mut self, open: &str, close: &str, mut item: impl FnMut(&mut Parser) -> Result<T, SyntaxError>) -> Result<Vec<T>, SyntaxError> {
        let opened = self.sym(open)?;
        let mut out = Vec::new();
        if self.is_sym(close) {
            self.bump();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.is_sym(",") {
                self.bump();
                continue;
            }
            if self.is_sym(close) {
                self.bump();
                return Ok(out);
            }
            return err(
                self.pos(),
                format!("expected `,` or `{close}` to close the `{open}` opened at {opened}, found {}", self.peek()),
            );
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return err(self.pos(), "expression nested too deeply");
        }
        let mut terms = Vec::new();
        let mut negative = if self.is_sym("-") {
            self.bump();
            true
        } else {
            false
        };
        loop {
            terms.push((negative, self.product()?));
            if self.is_sym("+") {
                negative = false;
            } else if self.is_sym("-") {
                negative = true;
            } else {
                break;
            }
            self.bump();
        }
        self.depth -= 1;
        if terms.len() == 1 && !terms[0].0 {
            return Ok(terms.pop().unwrap().1);
        }
        Ok(Expr::Sum(terms))
    }

    fn product(&mut self) -> Result<Expr, SyntaxError> {
        let mut factors = vec![self.power()?];
        while self.is_sym("*") {
            self.bump();
            factors.push(self.power()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { Expr::Mul(factors) })
    }

    fn power(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.is_sym("^") {
            self.bump();
            let p = self.pos();
            let e = self.int()?;
            if !(0..=u16::MAX as i64 / 4).contains(&e) {
                return err(p, "exponent out of range");
            }
            return Ok(Expr::Pow(Box::new(base), e as u32));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                if self.is_sym("/") && matches!(self.peek2(), Tok::Int(_)) {
                    self.bump();
                    let p = self.pos();
                    let d = self.int()?;
                    if d == 0 {
                        return err(p, "division by zero");
                    }
                    return Ok(Expr::Frac(n, d));
                }
                Ok(Expr::Int(n))
            }
            Tok::Ident(s) => {
                let p = self.bump().1;
                Ok(Expr::Var(s, p))
            }
            Tok::Sym("(") => {
                let opened = self.bump().1;
                let e = self.expr()?;
                if !self.is_sym(")") {
                    return err(self.pos(), format!("expected `)` to close the `(` opened at {opened}, found {}", self.peek()));
                }
                self.bump();
                Ok(e)
            }
            _ => self.expected("a number, a variable or `(`"),
        }
    }

    /// `[-] factor (* factor)* ident` terms joined by `+`/`-`, ending the
    /// entry at the next `ident ->` or `;`.
    fn polycomb(&mut self) -> Result<Vec<Term>, SyntaxError> {
        let mut terms = Vec::new();
        let mut negative = if self.is_sym("-") {
            self.bump();
            true
        } else {
            false
        };
        loop {
            let pos = self.pos();
            let mut factors = vec![self.power()?];
            while self.is_sym("*") {
                self.bump();
                factors.push(self.power()?);
            }
            let target = match factors.pop() {
                Some(Expr::Var(name, _)) => name,
                _ => return err(pos, "a term must end with the name of a basis element"),
            };
            let coeff = match factors.len() {
                0 => None,
                1 => factors.pop(),
                _ => Some(Expr::Mul(factors)),
            };
            terms.push(Term { negative, coeff, target, pos });
            if self.is_sym("+") {
                negative = false;
            } else if self.is_sym("-") {
                negative = true;
            } else {
                return Ok(terms);
            }
            self.bump();
        }
    }

    fn entries(&mut self) -> Result<Vec<Entry>, SyntaxError> {
        let mut out = Vec::new();
        while !self.is_sym(";") {
            let (source, pos) = self.ident("a basis element or `;`")?;
            self.sym("->")?;
            let terms = self.polycomb()?;
            out.push(Entry { source, pos, terms });
        }
        self.bump();
        Ok(out)
    }

    /// `name N :` for `e1:` or `sigma2:`; returns `N`.
    fn indexed_label(&mut self, prefix: &str) -> Result<Option<i64>, SyntaxError> {
        let Tok::Ident(s) = self.peek().clone() else { return Ok(None) };
        let Some(rest) = s.strip_prefix(prefix) else { return Ok(None) };
        let p = self.pos();
        let Ok(n) = rest.parse::<i64>() else { return err(p, format!("expected `{prefix}` followed by an index")) };
        if rest.starts_with('0') || rest.starts_with('+') {
            return err(p, format!("expected `{prefix}` followed by an index starting at 1"));
        }
        self.bump();
        self.sym(":")?;
        Ok(Some(n))
    }

    fn module_body<B>(
        &mut self,
        intro: &str,
        mut basis_item: impl FnMut(&mut Parser) -> Result<B, SyntaxError>,
        op: &str,
    ) -> Result<ModuleBody<B>, SyntaxError> {
        let opened = self.sym("{")?;
        self.word(intro)?;
        self.sym(":")?;
        let mut basis = Vec::new();
        while !self.is_sym(";") {
            basis.push(basis_item(self)?);
        }
        self.bump();
        self.word("d")?;
        self.sym(":")?;
        let d = self.entries()?;
        let mut ops = Vec::new();
        while let Some(i) = self.indexed_label(op)? {
            ops.push((i, self.entries()?));
        }
        if !self.is_sym("}") {
            return err(self.pos(), format!("expected `{op}N:` or `}}` to close the `{{` opened at {opened}, found {}", self.peek()));
        }
        self.bump();
        Ok((basis, d, ops))
    }

    fn stmt(&mut self) -> Result<Stmt, SyntaxError> {
        let pos = self.pos();
        let (kw, _) = self.ident("a statement keyword")?;
        let kind = match kw.as_str() {
            "field" => {
                if self.is_word("Q") {
                    self.bump();
                    StmtKind::Field(FieldSpec::Q)
                } else if self.is_word("Fp") {
                    self.bump();
                    StmtKind::Field(FieldSpec::Fp(self.int()?))
                } else {
                    return self.expected("`Q` or `Fp`");
                }
            }
            "ring" => {
                let vars = self.list("[", "]", |p| {
                    let (v, _) = p.ident("a variable name")?;
                    let w = if p.is_sym(":") {
                        p.bump();
                        Some(p.int()?)
                    } else {
                        None
                    };
                    Ok((v, w))
                })?;
                let relations = if self.is_sym("/") {
                    self.bump();
                    self.list("(", ")", |p| p.expr())?
                } else {
                    Vec::new()
                };
                StmtKind::Ring { vars, relations }
            }
            "koszul" => {
                self.word("f")?;
                self.sym("=")?;
                StmtKind::Koszul { f: self.list("[", "]", |p| p.expr())? }
            }
            "exterior" => StmtKind::Exterior { degrees: self.list("[", "]", |p| p.int())? },
            "ideal" => {
                let (name, _) = self.ident("an ideal name")?;
                self.sym("=")?;
                StmtKind::Ideal { name, gens: self.list("[", "]", |p| p.expr())? }
            }
            "assume" => StmtKind::Assume(self.ident("an assumption such as `gorenstein`")?.0),
            "lmodule" => {
                let (name, _) = self.ident("a module name")?;
                let (basis, d, actions) = self.module_body(
                    "basis",
                    |p| {
                        let (b, _) = p.ident("a basis element or `;`")?;
                        p.sym(":")?;
                        Ok((b, p.signed_int()?))
                    },
                    "e",
                )?;
                StmtKind::LModule { name, basis, d, actions }
            }
            "kmodule" => {
                let (name, _) = self.ident("a module name")?;
                let (gens, d, sigmas) = self.module_body(
                    "gens",
                    |p| {
                        let (g, _) = p.ident("a generator name or `;`")?;
                        p.sym(":")?;
                        p.sym("(")?;
                        let h = p.signed_int()?;
                        p.sym(",")?;
                        let i = p.signed_int()?;
                        p.sym(")")?;
                        Ok((g, h, i))
                    },
                    "sigma",
                )?;
                StmtKind::KModule { name, gens, d, sigmas }
            }
            "compute" | "verify" => {
                let table = if kw == "compute" { COMPUTE } else { VERIFY };
                let wpos = self.pos();
                let (mut what, _) = self.ident("a directive name")?;
                while self.is_sym("-") && matches!(self.peek2(), Tok::Ident(_)) {
                    self.bump();
                    what.push('-');
                    what.push_str(&self.ident("a directive name")?.0);
                }
                if !table.contains(&what.as_str()) {
                    return err(wpos, format!("unknown `{kw}` directive `{what}` (expected one of: {})", table.join(", ")));
                }
                let mut args = Vec::new();
                while let Tok::Ident(s) = self.peek().clone() {
                    if s == "window" || self.is_statement_start() {
                        break;
                    }
                    let p = self.bump().1;
                    args.push((s, p));
                }
                let window = if self.is_word("window") {
                    self.bump();
                    Some(self.int()?)
                } else {
                    None
                };
                StmtKind::Directive(Directive { verb: kw, what, args, window })
            }
            other => return err(pos, format!("unknown statement `{other}`")),
        };
        Ok(Stmt { pos, kind })
    }

    /// Directive arguments stop at a keyword that begins a new statement.
    fn is_statement_start(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if matches!(s.as_str(),
            "field" | "ring" | "koszul" | "exterior" | "ideal" | "assume" | "lmodule" | "kmodule" | "compute" | "verify"))
    }
}

pub fn parse(src: &str) -> Result<Session, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, depth: 0 };
    let mut stmts = Vec::new();
    while *p.peek() != Tok::Eof {
        stmts.push(p.stmt()?);
    }
    Ok(Session { stmts })
}

/// A comma-separated list of polynomial expressions, as in `x^2, x*y`.
pub fn parse_exprs(src: &str) -> Result<Vec<Expr>, SyntaxError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0, depth: 0 };
    let mut out = Vec::new();
    if *p.peek() == Tok::Eof {
        return Ok(out);
    }
    loop {
        out.push(p.expr()?);
        match p.peek() {
            Tok::Eof => return Ok(out),
            Tok::Sym(",") => {
                p.bump();
            }
            _ => return p.expected("`,` or the end of the list"),
        }
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(n) => write!(out, "{n}").unwrap(),
        Expr::Frac(a, b) => write!(out, "{a}/{b}").unwrap(),
        Expr::Var(v, _) => out.push_str(v),
        Expr::Pow(b, n) => {
            match **b {
                Expr::Int(_) | Expr::Var(..) => write_expr(out, b),
                _ => {
                    out.push('(');
                    write_expr(out, b);
                    out.push(')');
                }
            }
            write!(out, "^{n}").unwrap();
        }
        Expr::Mul(fs) => {
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                write_factor(out, f);
            }
        }
        Expr::Sum(ts) => {
            for (i, (neg, t)) in ts.iter().enumerate() {
                match (i, neg) {
                    (0, true) => out.push('-'),
                    (0, false) => {}
                    (_, true) => out.push_str(" - "),
                    (_, false) => out.push_str(" + "),
                }
                if matches!(t, Expr::Sum(_)) {
                    out.push('(');
                    write_expr(out, t);
                    out.push(')');
                } else {
                    write_expr(out, t);
                }
            }
        }
    }
}

fn write_factor(out: &mut String, f: &Expr) {
    if matches!(f, Expr::Sum(_) | Expr::Mul(_)) {
        out.push('(');
        write_expr(out, f);
        out.push(')');
    } else {
        write_expr(out, f);
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_entries(out: &mut String, label: &str, entries: &[Entry]) {
    write!(out, "  {label}:").unwrap();
    for e in entries {
        write!(out, " {} ->", e.source).unwrap();
        for (i, t) in e.terms.iter().enumerate() {
            match (i, t.negative) {
                (0, true) => out.push_str(" -"),
                (0, false) => out.push(' '),
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if let Some(c) = &t.coeff {
                if let Expr::Mul(fs) = c {
                    for f in fs {
                        write_factor(out, f);
                        out.push('*');
                    }
                } else {
                    write_factor(out, c);
                    out.push('*');
                }
            }
            out.push_str(&t.target);
        }
    }
    out.push_str(";\n");
}

fn join_exprs(es: &[Expr]) -> String {
    es.iter().map(expr_to_string).collect::<Vec<_>>().join(", ")
}

/// Canonical text of a session; reparses to an equal session.
pub fn pretty(session: &Session) -> String {
    let mut out = String::new();
    for s in &session.stmts {
        match &s.kind {
            StmtKind::Field(FieldSpec::Q) => out.push_str("field Q\n"),
            StmtKind::Field(FieldSpec::Fp(p)) => writeln!(out, "field Fp {p}").unwrap(),
            StmtKind::Ring { vars, relations } => {
                let v: Vec<String> = vars
                    .iter()
                    .map(|(n, w)| match w {
                        Some(w) => format!("{n}:{w}"),
                        None => n.clone(),
                    })
                    .collect();
                write!(out, "ring [{}]", v.join(", ")).unwrap();
                if !relations.is_empty() {
                    write!(out, " / ({})", join_exprs(relations)).unwrap();
                }
                out.push('\n');
            }
            StmtKind::Koszul { f } => writeln!(out, "koszul f = [{}]", join_exprs(f)).unwrap(),
            StmtKind::Exterior { degrees } => {
                let d: Vec<String> = degrees.iter().map(|d| d.to_string()).collect();
                writeln!(out, "exterior [{}]", d.join(", ")).unwrap();
            }
            StmtKind::Ideal { name, gens } => writeln!(out, "ideal {name} = [{}]", join_exprs(gens)).unwrap(),
            StmtKind::Assume(a) => writeln!(out, "assume {a}").unwrap(),
            StmtKind::LModule { name, basis, d, actions } => {
                writeln!(out, "lmodule {name} {{").unwrap();
                out.push_str("  basis:");
                for (b, deg) in basis {
                    write!(out, " {b}:{deg}").unwrap();
                }
                out.push_str(";\n");
                write_entries(&mut out, "d", d);
                for (i, e) in actions {
                    write_entries(&mut out, &format!("e{i}"), e);
                }
                out.push_str("}\n");
            }
            StmtKind::KModule { name, gens, d, sigmas } => {
                writeln!(out, "kmodule {name} {{").unwrap();
                out.push_str("  gens:");
                for (g, h, i) in gens {
                    write!(out, " {g}:({h}, {i})").unwrap();
                }
                out.push_str(";\n");
                write_entries(&mut out, "d", d);
                for (i, e) in sigmas {
                    write_entries(&mut out, &format!("sigma{i}"), e);
                }
                out.push_str("}\n");
            }
            StmtKind::Directive(d) => writeln!(out, "{d}").unwrap(),
        }
    }
    out
}
