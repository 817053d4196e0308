//! DG modules over the Koszul complex `E = R⟨e_1..e_c | ∂e_i = f_i⟩` of a
//! graded base ring, given as bounded complexes of free `R`-modules with
//! explicit homotopy operators `σ_i`; their reduction to the exterior
//! algebra and the support computations built on it.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::bgg::{self, BggError, SupportMode};
use crate::extdg::{self, DgLambdaModule, DividedPowers, ExtError, ExteriorAlgebra};
use crate::linalg::Matrix;
use crate::modengine::{column_degree, subquotient, syzygies, Column, ModError, PresentedModule};
use crate::polyring::{HilbertSeries, HomogeneousIdeal, PolyError, PolyRing, Polynomial};
use crate::varieties::{self, compare, Comparison, VarietyError, VarietyHandle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KoszulError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("f_{index} = {poly} must be a nonzero homogeneous element of the maximal ideal")]
    BadF { index: usize, poly: String },
    #[error("invalid Koszul module: {0}")]
    Invalid(KoszulViolation),
    #[error("modules live over different Koszul complexes")]
    Mismatch,
    #[error("window too small: need at least {required}")]
    WindowTooSmall { required: i64 },
    #[error(transparent)]
    Bgg(#[from] BggError),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Module(#[from] ModError),
}

/// `R = k[x_1..x_n] / (q_1..q_m)`, graded with `m = (x_1..x_n)`.
#[derive(Debug, Clone)]
pub struct GradedBase {
    ring: Arc<PolyRing>,
    relations: HomogeneousIdeal,
}

impl PartialEq for GradedBase {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.relations.canonical_generators() == other.relations.canonical_generators()
    }
}

impl GradedBase {
    pub fn new(ring: &Arc<PolyRing>, relations: Vec<Polynomial>) -> Result<GradedBase, KoszulError> {
        Ok(GradedBase { ring: ring.clone(), relations: HomogeneousIdeal::new(ring, relations)? })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn relations(&self) -> &HomogeneousIdeal {
        &self.relations
    }

    pub fn normal_form(&self, p: &Polynomial) -> Polynomial {
        if self.relations.is_zero() {
            p.clone()
        } else {
            self.relations.normal_form(p)
        }
    }
}

/// The base ring together with `f_1..f_c ∈ m`.
#[derive(Debug, Clone, PartialEq)]
pub struct KoszulData {
    pub base: GradedBase,
    pub f: Vec<Polynomial>,
}

impl KoszulData {
    pub fn new(base: GradedBase, f: Vec<Polynomial>) -> Result<KoszulData, KoszulError> {
        for (i, p) in f.iter().enumerate() {
            let ok = matches!(p.homogeneous_degree(), Some(Some(d)) if d > 0);
            if !ok || base.normal_form(p).is_zero() {
                return Err(KoszulError::BadF { index: i + 1, poly: p.to_string() });
            }
        }
        Ok(KoszulData { base, f })
    }

    pub fn c(&self) -> usize {
        self.f.len()
    }

    /// Internal degrees `deg f_i`.
    pub fn f_degrees(&self) -> Vec<i64> {
        self.f.iter().map(|p| p.homogeneous_degree().flatten().unwrap_or(0)).collect()
    }

    /// The fiber `k ⊗_R E`, generators in degree one.
    pub fn exterior(&self) -> ExteriorAlgebra {
        ExteriorAlgebra::koszul(self.base.ring.field(), self.c())
    }

    pub fn cohomology_ring(&self) -> Arc<PolyRing> {
        PolyRing::cohomological(self.base.ring.field(), &vec![1; self.c()])
    }
}

/// The first identity a candidate Koszul module fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KoszulViolation {
    Shape(String),
    Degree { op: String, row: usize, col: usize },
    DifferentialSquare,
    Homotopy { index: usize, f: String },
    Anticommute(usize, usize),
    Square(usize),
}

impl fmt::Display for KoszulViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KoszulViolation::Shape(s) => write!(f, "shape: {s}"),
            KoszulViolation::Degree { op, row, col } => write!(f, "{op} entry ({row}, {col}) has the wrong degree"),
            KoszulViolation::DifferentialSquare => write!(f, "∂² ≠ 0"),
            KoszulViolation::Homotopy { index, f: p } => write!(f, "∂σ_{index} + σ_{index}∂ ≠ {p}·id"),
            KoszulViolation::Anticommute(i, j) => write!(f, "σ_{i}σ_{j} + σ_{j}σ_{i} ≠ 0"),
            KoszulViolation::Square(i) => write!(f, "σ_{i}² ≠ 0"),
        }
    }
}

/// A bounded complex of free `R`-modules with homotopies `σ_i` for the `f_i`.
/// Generator `j` has homological degree `gens[j].0` and internal degree
/// `gens[j].1`; matrices are stored by columns.
#[derive(Debug, Clone)]
pub struct KoszulDgModule {
    pub data: KoszulData,
    pub gens: Vec<(i32, i64)>,
    pub differential: Vec<Column>,
    pub sigmas: Vec<Vec<Column>>,
}

fn is_zero_matrix(m: &[Column]) -> bool {
    m.iter().all(|c| c.iter().all(|p| p.is_zero()))
}

impl KoszulDgModule {
    pub fn new(
        data: KoszulData,
        gens: Vec<(i32, i64)>,
        differential: Vec<Column>,
        sigmas: Vec<Vec<Column>>,
    ) -> Result<KoszulDgModule, KoszulError> {
        let mut m = KoszulDgModule { data, gens, differential, sigmas };
        m.reduce_entries();
        m.validate().map_err(KoszulError::Invalid)?;
        Ok(m)
    }

    /// The Koszul complex `E` itself, with `σ_i` left multiplication by `e_i`.
    pub fn koszul_complex(data: &KoszulData) -> KoszulDgModule {
        let c = data.c();
        let ring = data.base.ring.clone();
        let degs = data.f_degrees();
        let n = 1usize << c;
        let gens: Vec<(i32, i64)> = (0..n)
            .map(|s| {
                let h = s.count_ones() as i32;
                let d = (0..c).filter(|i| s >> i & 1 == 1).map(|i| degs[i]).sum();
                (h, d)
            })
            .collect();
        let mut differential = vec![vec![ring.zero(); n]; n];
        for (s, col) in differential.iter_mut().enumerate() {
            for i in 0..c {
                if s >> i & 1 == 1 {
                    let before = (s & ((1 << i) - 1)).count_ones();
                    let p = if before % 2 == 1 { -&data.f[i] } else { data.f[i].clone() };
                    col[s & !(1 << i)] = p;
                }
            }
        }
        let alg = data.exterior();
        let sigmas = (0..c)
            .map(|i| {
                let l = alg.left_mult(i);
                (0..n).map(|col| (0..n).map(|row| ring.constant(l.get(row, col).clone())).collect()).collect()
            })
            .collect();
        KoszulDgModule { data: data.clone(), gens, differential, sigmas }
    }

    fn ring(&self) -> &Arc<PolyRing> {
        &self.data.base.ring
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    fn reduce_entries(&mut self) {
        let base = self.data.base.clone();
        let fix = |m: &mut Vec<Column>| {
            for col in m.iter_mut() {
                for p in col.iter_mut() {
                    *p = base.normal_form(p);
                }
            }
        };
        fix(&mut self.differential);
        for s in self.sigmas.iter_mut() {
            fix(s);
        }
    }

    fn mul(&self, a: &[Column], b: &[Column]) -> Vec<Column> {
        let mut out = crate::modengine::mat_mul(self.ring(), a, b, self.rank());
        for col in out.iter_mut() {
            for p in col.iter_mut() {
                *p = self.data.base.normal_form(p);
            }
        }
        out
    }

    fn add(a: &[Column], b: &[Column]) -> Vec<Column> {
        a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
    }

    /// Checks shapes, bidegrees and the identities modulo the base relations.
    pub fn validate(&self) -> Result<(), KoszulViolation> {
        let n = self.rank();
        let c = self.data.c();
        if self.sigmas.len() != c {
            return Err(KoszulViolation::Shape(format!("expected {c} homotopies, got {}", self.sigmas.len())));
        }
        for m in std::iter::once(&self.differential).chain(self.sigmas.iter()) {
            if m.len() != n || m.iter().any(|col| col.len() != n) {
                return Err(KoszulViolation::Shape(format!("matrices must be {n}x{n}")));
            }
        }
        let fdeg = self.data.f_degrees();
        let check = |m: &[Column], h: i32, d: i64, op: String| -> Result<(), KoszulViolation> {
            for (col, entries) in m.iter().enumerate() {
                for (row, p) in entries.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    let want = self.gens[col].1 + d - self.gens[row].1;
                    let ok = self.gens[row].0 == self.gens[col].0 + h
                        && matches!(p.homogeneous_degree(), Some(Some(e)) if e == want);
                    if !ok {
                        return Err(KoszulViolation::Degree { op, row, col });
                    }
                }
            }
            Ok(())
        };
        check(&self.differential, -1, 0, "∂".into())?;
        for (i, s) in self.sigmas.iter().enumerate() {
            check(s, 1, fdeg[i], format!("σ_{}", i + 1))?;
        }
        let d = &self.differential;
        if !is_zero_matrix(&self.mul(d, d)) {
            return Err(KoszulViolation::DifferentialSquare);
        }
        for (i, s) in self.sigmas.iter().enumerate() {
            let h = KoszulDgModule::add(&self.mul(d, s), &self.mul(s, d));
            let f = self.data.base.normal_form(&self.data.f[i]);
            let ok = h.iter().enumerate().all(|(col, entries)| {
                entries.iter().enumerate().all(|(row, p)| if row == col { *p == f } else { p.is_zero() })
            });
            if !ok {
                return Err(KoszulViolation::Homotopy { index: i + 1, f: self.data.f[i].to_string() });
            }
        }
        for (i, s) in self.sigmas.iter().enumerate() {
            if !is_zero_matrix(&self.mul(s, s)) {
                return Err(KoszulViolation::Square(i + 1));
            }
        }
        for i in 0..c {
            for j in (i + 1)..c {
                let (a, b) = (&self.sigmas[i], &self.sigmas[j]);
                if !is_zero_matrix(&KoszulDgModule::add(&self.mul(a, b), &self.mul(b, a))) {
                    return Err(KoszulViolation::Anticommute(i + 1, j + 1));
                }
            }
        }
        Ok(())
    }

    /// `M ⊕ (R --id--> R)` with the new generators in homological degrees
    /// `h, h − 1` and internal degree `d`; the homotopies extend by zero.
    pub fn with_contractible_summand(&self, h: i32, d: i64) -> KoszulDgModule {
        let ring = self.ring().clone();
        let n = self.rank();
        let grow = |m: &[Column]| -> Vec<Column> {
            let mut out: Vec<Column> = m
                .iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.extend([ring.zero(), ring.zero()]);
                    c
                })
                .collect();
            out.push(vec![ring.zero(); n + 2]);
            out.push(vec![ring.zero(); n + 2]);
            out
        };
        let mut differential = grow(&self.differential);
        differential[n][n + 1] = ring.one();
        let mut gens = self.gens.clone();
        gens.extend([(h, d), (h - 1, d)]);
        // the σ's must still satisfy ∂σ + σ∂ = f on the new summand
        let mut sigmas: Vec<Vec<Column>> = self.sigmas.iter().map(|s| grow(s)).collect();
        for (i, s) in sigmas.iter_mut().enumerate() {
            s[n + 1][n] = self.data.f[i].clone();
        }
        KoszulDgModule { data: self.data.clone(), gens, differential, sigmas }
    }
}

fn constants(m: &[Column]) -> Matrix {
    let n = m.len();
    let field = m.first().and_then(|c| c.first()).map(|p| p.ring().field());
    let Some(field) = field else {
        return Matrix::zeros(crate::Field::Rationals, 0, 0);
    };
    let mut out = Matrix::zeros(field, n, n);
    for (col, entries) in m.iter().enumerate() {
        for (row, p) in entries.iter().enumerate() {
            let c = p.constant_term();
            if !c.is_zero() {
                out.set(row, col, c);
            }
        }
    }
    out
}

/// `t M = k ⊗_R M`: set every base variable to zero.
pub fn reduce_t(m: &KoszulDgModule) -> DgLambdaModule {
    let alg = m.data.exterior();
    if m.rank() == 0 {
        return DgLambdaModule::trivial_of_dim(&alg, &[]);
    }
    DgLambdaModule {
        alg,
        degrees: m.gens.iter().map(|g| g.0).collect(),
        differential: constants(&m.differential),
        actions: m.sigmas.iter().map(|s| constants(s)).collect(),
    }
}

/// `V_E(M) = V^d_Λ(t M)`.
pub fn support_e(m: &KoszulDgModule) -> Result<VarietyHandle, KoszulError> {
    Ok(bgg::support_in(&m.data.cohomology_ring(), &reduce_t(m), SupportMode::D)?)
}

/// Dimension-for-dimension comparison of `Ext^n(τ_{≤u}(X ⊗^L Y), k)` with
/// the Künneth prediction `Σ_{a+b=n} dim Ext^a(X,k) · dim Ext^b(Y,k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowOracle {
    pub window: i32,
    pub weight: usize,
    /// `(n, observed, predicted)`.
    pub rows: Vec<(i64, i64, i64)>,
    pub matches: bool,
}

#[derive(Debug, Clone)]
pub struct TensorSupportReport {
    pub join: VarietyHandle,
    pub direct: VarietyHandle,
    pub comparison: Comparison,
    pub oracle: Option<WindowOracle>,
}

impl TensorSupportReport {
    pub fn equal_up_to_radical(&self) -> bool {
        self.comparison == Comparison::Equal
    }

    pub fn passes(&self) -> bool {
        self.equal_up_to_radical() && self.oracle.as_ref().is_none_or(|o| o.matches)
    }
}

/// `A ⊗_k B` as a module over `S^e = k[y, z]`.
pub fn external_tensor(se: &Arc<PolyRing>, a: &PresentedModule, b: &PresentedModule) -> Result<PresentedModule, KoszulError> {
    let c = a.ring.nvars();
    let to_y: Vec<usize> = (0..c).collect();
    let to_z: Vec<usize> = (0..c).map(|i| c + i).collect();
    let (m, n) = (a.degrees.len(), b.degrees.len());
    let degrees = a.degrees.iter().flat_map(|x| b.degrees.iter().map(move |y| x + y)).collect();
    let mut rels = Vec::new();
    for r in &a.relations {
        for j in 0..n {
            let mut col = vec![se.zero(); m * n];
            for i in 0..m {
                col[i * n + j] = r[i].remap(se, &to_y);
            }
            rels.push(col);
        }
    }
    for r in &b.relations {
        for i in 0..m {
            let mut col = vec![se.zero(); m * n];
            for j in 0..n {
                col[i * n + j] = r[j].remap(se, &to_z);
            }
            rels.push(col);
        }
    }
    Ok(PresentedModule::new(se, degrees, rels)?)
}

fn convolution(a: &HilbertSeries, a_lo: i64, b: &HilbertSeries, b_lo: i64, n: i64) -> i64 {
    (a_lo..=n - b_lo).map(|x| a.coefficient(x) * b.coefficient(n - x)).sum()
}

/// The Künneth window oracle for `X ⊗^L_Λ Y` through degree `window`.
pub fn window_oracle(x: &DgLambdaModule, y: &DgLambdaModule, window: i32) -> Result<WindowOracle, KoszulError> {
    let s = bgg::cohomology_ring(x);
    let ha = bgg::ext_module_in(&s, x)?.hilbert_series();
    let hb = bgg::ext_module_in(&s, y)?.hilbert_series();
    let weight = extdg::tensor_window_weight(x, y, window);
    let w = extdg::derived_tensor_window(x, y, weight, window)?;
    let lo = (x.low_degree() + y.low_degree()) as i64;
    let observed: HashMap<i64, usize> = extdg::ext_dimensions_linear(&w.truncated, window as i64).into_iter().collect();
    let rows: Vec<(i64, i64, i64)> = (lo..=window as i64)
        .map(|n| {
            let obs = observed.get(&n).copied().unwrap_or(0) as i64;
            (n, obs, convolution(&ha, x.low_degree() as i64, &hb, y.low_degree() as i64, n))
        })
        .collect();
    let matches = rows.iter().all(|r| r.1 == r.2);
    Ok(WindowOracle { window, weight, rows, matches })
}

/// Join of the supports against `Δ^{-1}(ann_{S^e}(Ext(X) ⊗_k Ext(Y)))`.
pub fn lambda_tensor_support(x: &DgLambdaModule, y: &DgLambdaModule, window: Option<i32>) -> Result<TensorSupportReport, KoszulError> {
    if x.alg != y.alg {
        return Err(KoszulError::Mismatch);
    }
    let s = bgg::cohomology_ring(x);
    let a = bgg::ext_module_in(&s, x)?;
    let b = bgg::ext_module_in(&s, y)?;
    let u = VarietyHandle::new(a.annihilator());
    let v = VarietyHandle::new(b.annihilator());
    let join = varieties::join(&u, &v)?;
    let se = varieties::enveloping_ring(&s);
    let ann = external_tensor(&se, &a, &b)?.annihilator();
    let direct = VarietyHandle::new(varieties::delta_preimage(&s, &ann)?);
    let comparison = compare(&join, &direct)?;
    let oracle = match window {
        Some(wd) => Some(window_oracle(x, y, wd)?),
        None => None,
    };
    Ok(TensorSupportReport { join, direct, comparison, oracle })
}

fn same_data(m: &KoszulDgModule, n: &KoszulDgModule) -> Result<(), KoszulError> {
    if m.data == n.data {
        Ok(())
    } else {
        Err(KoszulError::Mismatch)
    }
}

/// `V_E(M ⊗^L_E N)` two ways: the join of the supports and the direct
/// Künneth computation, with an optional Ext window oracle.
pub fn tensor_support_e(m: &KoszulDgModule, n: &KoszulDgModule, window: Option<i32>) -> Result<TensorSupportReport, KoszulError> {
    same_data(m, n)?;
    lambda_tensor_support(&reduce_t(m), &reduce_t(n), window)
}

#[derive(Debug, Clone)]
pub struct DaggerReport {
    pub dagger: VarietyHandle,
    pub support: VarietyHandle,
    pub comparison: Comparison,
}

/// `V^d(Hom_Λ(tM, Λ))`, which should equal `V_E(M)`.
pub fn dagger_support(m: &KoszulDgModule) -> Result<DaggerReport, KoszulError> {
    let tm = reduce_t(m);
    let s = m.data.cohomology_ring();
    let dagger = bgg::support_in(&s, &tm.hom_into_lambda(), SupportMode::D)?;
    let support = bgg::support_in(&s, &tm, SupportMode::D)?;
    let comparison = compare(&dagger, &support)?;
    Ok(DaggerReport { dagger, support, comparison })
}

/// One homological degree of `Tor^E(M, N)`.
#[derive(Debug, Clone)]
pub struct TorEntry {
    pub degree: i32,
    /// `None` when the `R`-module has infinite length.
    pub dim: Option<i64>,
    pub hilbert: HilbertSeries,
}

/// `Tor^E_n(M, N)` for `n ≤ max_degree`, from the complex
/// `Γ_R ⊗_R M ⊗_R N` with differential
/// `∂_M + (−1)^{|m|}∂_N + Σ_i χ_i⌟ ⊗ (σ_i ⊗ 1 − (−1)^{|m|} ⊗ τ_i)`,
/// whose homology is computed over the polynomial ring modulo the relations.
pub fn tor_window_e(m: &KoszulDgModule, n: &KoszulDgModule, max_degree: i32) -> Result<Vec<TorEntry>, KoszulError> {
    same_data(m, n)?;
    let data = &m.data;
    let ring = data.base.ring.clone();
    let fdeg = data.f_degrees();
    let lo = m.gens.iter().map(|g| g.0).min().unwrap_or(0) + n.gens.iter().map(|g| g.0).min().unwrap_or(0);
    let weight = ((max_degree + 1 - lo).max(0) / 2) as usize;
    let gamma = DividedPowers::new(&data.exterior(), weight);
    let (nm, nn) = (m.rank(), n.rank());
    // basis (g, a, b) up to homological degree max_degree + 1
    let mut index: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut hdeg = Vec::new();
    let mut ideg = Vec::new();
    for g in 0..gamma.len() {
        let gi: i64 = gamma.exponents[g].iter().zip(&fdeg).map(|(&e, &d)| e as i64 * d).sum();
        for a in 0..nm {
            for b in 0..nn {
                let h = gamma.degrees[g] + m.gens[a].0 + n.gens[b].0;
                if h <= max_degree + 1 {
                    index.insert((g, a, b), hdeg.len());
                    hdeg.push(h);
                    ideg.push(gi + m.gens[a].1 + n.gens[b].1);
                }
            }
        }
    }
    let total = hdeg.len();
    let mut columns: Vec<Vec<(usize, Polynomial)>> = vec![Vec::new(); total];
    let sign = |a: usize, p: &Polynomial| if m.gens[a].0.rem_euclid(2) == 1 { -p } else { p.clone() };
    for (&(g, a, b), &col) in &index {
        let mut push = |key: (usize, usize, usize), p: Polynomial| {
            if let Some(&row) = index.get(&key) {
                if !p.is_zero() {
                    columns[col].push((row, p));
                }
            }
        };
        for (a2, p) in m.differential[a].iter().enumerate() {
            push((g, a2, b), p.clone());
        }
        for (b2, p) in n.differential[b].iter().enumerate() {
            push((g, a, b2), sign(a, p));
        }
        for i in 0..data.c() {
            if let Some(h) = gamma.contract(i, g) {
                for (a2, p) in m.sigmas[i][a].iter().enumerate() {
                    push((h, a2, b), p.clone());
                }
                for (b2, p) in n.sigmas[i][b].iter().enumerate() {
                    push((h, a, b2), -&sign(a, p));
                }
            }
        }
    }
    let by_degree = |t: i32| -> Vec<usize> { (0..total).filter(|&i| hdeg[i] == t).collect() };
    let rels = data.base.relations.generators().to_vec();
    let dense = |cols: &[usize], rows: &[usize]| -> Vec<Column> {
        let pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(x, &r)| (r, x)).collect();
        cols.iter()
            .map(|&c| {
                let mut v = vec![ring.zero(); rows.len()];
                for (r, p) in &columns[c] {
                    if let Some(&x) = pos.get(r) {
                        v[x] = &v[x] + p;
                    }
                }
                v
            })
            .collect()
    };
    // q_j e_r for every generator r
    let relation_columns = |rows: &[usize]| -> Vec<Column> {
        let mut out = Vec::new();
        for q in &rels {
            for x in 0..rows.len() {
                let mut v = vec![ring.zero(); rows.len()];
                v[x] = q.clone();
                out.push(v);
            }
        }
        out
    };
    let mut out = Vec::new();
    for t in lo..=max_degree {
        let here = by_degree(t);
        let below = by_degree(t - 1);
        let above = by_degree(t + 1);
        let amb: Vec<i64> = here.iter().map(|&i| ideg[i]).collect();
        let nonzero = |c: &Column| c.iter().any(|p| !p.is_zero());
        let cycles: Vec<Column> = if below.is_empty() {
            (0..here.len())
                .map(|x| {
                    let mut v = vec![ring.zero(); here.len()];
                    v[x] = ring.one();
                    v
                })
                .collect()
        } else {
            let bdeg: Vec<i64> = below.iter().map(|&i| ideg[i]).collect();
            let mut cols = dense(&here, &below);
            let mut src = amb.clone();
            let qc = relation_columns(&below);
            src.extend(qc.iter().map(|c| column_degree(c, &bdeg).unwrap_or(0)));
            cols.extend(qc);
            syzygies(&ring, &bdeg, &src, &cols)
                .into_iter()
                .map(|c| c[..here.len()].to_vec())
                .filter(nonzero)
                .collect()
        };
        let mut bounds: Vec<Column> = dense(&above, &here).into_iter().filter(nonzero).collect();
        bounds.extend(relation_columns(&here));
        let h = if here.is_empty() {
            PresentedModule::free(&ring, Vec::new())
        } else {
            subquotient(&ring, &amb, &cycles, &bounds)
        };
        let hilbert = h.hilbert_series();
        out.push(TorEntry { degree: t, dim: hilbert.total_dimension(), hilbert });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct TorContainmentReport {
    pub s: i64,
    pub t: i64,
    pub window: i32,
    pub join: VarietyHandle,
    /// `(i, dim H_i, V^d(H_i))` for the homology of `tM ⊗^L_Λ tN`.
    pub homology: Vec<(i32, usize, VarietyHandle)>,
    pub union: VarietyHandle,
    /// `V^d(τ_{≤window}(tM ⊗^L_Λ tN))`, sandwiched between the two sides.
    pub truncation: VarietyHandle,
    pub holds: bool,
    pub chain_holds: bool,
}

/// `Join(V_E(M), V_E(N)) ⊆ ∪_{i ≤ s+t} V^d(H_i(tM ⊗^L_Λ tN))`, where `s, t`
/// bound the generator degrees of the Ext modules.
pub fn tor_containment_check(m: &KoszulDgModule, n: &KoszulDgModule, window: Option<i32>) -> Result<TorContainmentReport, KoszulError> {
    same_data(m, n)?;
    lambda_tor_containment(&m.data.cohomology_ring(), &reduce_t(m), &reduce_t(n), window)
}

/// The same containment for DG Λ-modules `tm`, `tn` directly.
pub fn lambda_tor_containment(
    s_ring: &Arc<PolyRing>,
    tm: &DgLambdaModule,
    tn: &DgLambdaModule,
    window: Option<i32>,
) -> Result<TorContainmentReport, KoszulError> {
    if tm.alg != tn.alg {
        return Err(KoszulError::Mismatch);
    }
    let a = bgg::ext_module_in(s_ring, tm)?;
    let b = bgg::ext_module_in(s_ring, tn)?;
    let s = a.generator_degree_bound().unwrap_or(0);
    let t = b.generator_degree_bound().unwrap_or(0);
    let required = s + t;
    let window = window.unwrap_or(required as i32);
    if (window as i64) < required {
        return Err(KoszulError::WindowTooSmall { required });
    }
    let join = varieties::join(&VarietyHandle::new(a.annihilator()), &VarietyHandle::new(b.annihilator()))?;
    let weight = extdg::tensor_window_weight(tm, tn, window);
    let w = extdg::derived_tensor_window(tm, tn, weight, window)?;
    let alg = tm.alg.clone();
    let mut homology = Vec::new();
    let mut union = VarietyHandle::empty(s_ring);
    for &(i, dim) in &w.tor_dims {
        if i as i64 > required {
            continue;
        }
        // a module concentrated in one degree: Λ^{>0} acts by zero
        let h = DgLambdaModule::trivial_of_dim(&alg, &vec![i; dim]);
        let v = bgg::support_in(s_ring, &h, SupportMode::D)?;
        union = varieties::union(&union, &v)?;
        homology.push((i, dim, v));
    }
    let truncation = bgg::support_in(s_ring, &w.truncated, SupportMode::D)?;
    let holds = varieties::contained_in(&join, &union)?;
    let chain_holds = varieties::contained_in(&join, &truncation)? && varieties::contained_in(&truncation, &union)?;
    Ok(TorContainmentReport { s, t, window, join, homology, union, truncation, holds, chain_holds })
}

#[derive(Debug, Clone)]
pub struct RhomReport {
    /// `Join(V_E(M), V_E(N))`.
    pub predicted: VarietyHandle,
    pub dagger: DaggerReport,
    /// Support of `Hom_Λ(tM, Λ) ⊗^L_Λ tN ≃ t RHom_E(M, N)`.
    pub tensor: TensorSupportReport,
    pub comparison: Comparison,
}

impl RhomReport {
    pub fn passes(&self) -> bool {
        self.comparison == Comparison::Equal && self.dagger.comparison == Comparison::Equal && self.tensor.passes()
    }
}

/// Support of `RHom_E(M, N)` over a Gorenstein base (an assumption the caller
/// makes), computed as the support of `Hom_Λ(tM, Λ) ⊗^L_Λ tN`.
pub fn rhom_support(m: &KoszulDgModule, n: &KoszulDgModule, window: Option<i32>) -> Result<RhomReport, KoszulError> {
    same_data(m, n)?;
    let predicted = varieties::join(&support_e(m)?, &support_e(n)?)?;
    let dagger = dagger_support(m)?;
    let dual = reduce_t(m).hom_into_lambda();
    let tensor = lambda_tensor_support(&dual, &reduce_t(n), window)?;
    let comparison = compare(&predicted, &tensor.direct)?;
    Ok(RhomReport { predicted, dagger, tensor, comparison })
}
