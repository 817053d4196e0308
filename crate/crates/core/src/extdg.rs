//! Exterior algebras on odd generators and finite-dimensional DG modules over
//! them: validation, duals, Hopf-diagonal tensor products, Hom into the
//! algebra, soft truncation, and truncated universal resolutions.
//!
//! Degrees are homological (lower): the differential has degree −1 and `e_i`
//! has degree `+|e_i|`. Matrices act on column vectors; column `j` holds the
//! image of basis vector `j`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalars::{Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtError {
    #[error("generator degrees must be positive and odd (got {0})")]
    EvenGenerator(u32),
    #[error("modules are over different exterior algebras")]
    AlgebraMismatch,
    #[error("window too small: need D >= {required} (got {given})")]
    WindowTooSmall { required: usize, given: usize },
    #[error("invalid module: {0}")]
    Invalid(Violation),
}

/// The first identity a candidate DG module fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    Degree { op: String, row: usize, col: usize },
    DifferentialSquare,
    Leibniz(usize),
    Anticommute(usize, usize),
    Square(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(s) => write!(f, "shape: {s}"),
            Violation::Degree { op, row, col } => write!(f, "{op} entry ({row}, {col}) has the wrong degree"),
            Violation::DifferentialSquare => write!(f, "∂² ≠ 0"),
            Violation::Leibniz(i) => write!(f, "∂e_{0} + e_{0}∂ ≠ 0", i + 1),
            Violation::Anticommute(i, j) => write!(f, "e_{}e_{} + e_{}e_{} ≠ 0", i + 1, j + 1, j + 1, i + 1),
            Violation::Square(i) => write!(f, "e_{}² ≠ 0", i + 1),
        }
    }
}

fn sign(field: Field, odd: bool) -> Scalar {
    if odd {
        field.from_int(-1)
    } else {
        field.one()
    }
}

fn parity_diag(field: Field, degrees: &[i32]) -> Matrix {
    Matrix::diagonal(field, &degrees.iter().map(|d| sign(field, d.rem_euclid(2) == 1)).collect::<Vec<_>>())
}

/// `Λ = ⋀_k(e_1, …, e_c)` with odd generator degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExteriorAlgebra {
    field: Field,
    degrees: Vec<u32>,
}

impl ExteriorAlgebra {
    pub fn new(field: Field, degrees: Vec<u32>) -> Result<ExteriorAlgebra, ExtError> {
        if let Some(&d) = degrees.iter().find(|&&d| d % 2 == 0) {
            return Err(ExtError::EvenGenerator(d));
        }
        Ok(ExteriorAlgebra { field, degrees })
    }

    /// `c` generators of degree one.
    pub fn koszul(field: Field, c: usize) -> ExteriorAlgebra {
        ExteriorAlgebra { field, degrees: vec![1; c] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn c(&self) -> usize {
        self.degrees.len()
    }

    pub fn generator_degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn min_degree(&self) -> u32 {
        self.degrees.iter().copied().min().unwrap_or(1)
    }

    /// Degree of the basis monomial `e_S` for the bitmask `S`.
    pub fn mask_degree(&self, mask: usize) -> i32 {
        (0..self.c()).filter(|i| mask >> i & 1 == 1).map(|i| self.degrees[i] as i32).sum()
    }

    /// Left multiplication by `e_i` on the monomial basis (indexed by bitmask).
    pub fn left_mult(&self, i: usize) -> Matrix {
        let n = 1usize << self.c();
        let mut m = Matrix::zeros(self.field, n, n);
        for s in 0..n {
            if s >> i & 1 == 1 {
                continue;
            }
            let before = (s & ((1 << i) - 1)).count_ones();
            m.set(s | 1 << i, s, sign(self.field, before % 2 == 1));
        }
        m
    }
}

/// A finite-dimensional DG module over an exterior algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DgLambdaModule {
    pub alg: ExteriorAlgebra,
    pub degrees: Vec<i32>,
    pub differential: Matrix,
    pub actions: Vec<Matrix>,
}

impl DgLambdaModule {
    /// Builds and validates.
    pub fn new(alg: ExteriorAlgebra, degrees: Vec<i32>, differential: Matrix, actions: Vec<Matrix>) -> Result<DgLambdaModule, ExtError> {
        let m = DgLambdaModule { alg, degrees, differential, actions };
        m.validate().map_err(ExtError::Invalid)?;
        Ok(m)
    }

    /// The trivial module `k` in degree 0.
    pub fn trivial(alg: &ExteriorAlgebra) -> DgLambdaModule {
        DgLambdaModule::trivial_of_dim(alg, &[0])
    }

    /// A module with zero differential and zero action on a graded basis.
    pub fn trivial_of_dim(alg: &ExteriorAlgebra, degrees: &[i32]) -> DgLambdaModule {
        let n = degrees.len();
        let k = alg.field();
        DgLambdaModule {
            alg: alg.clone(),
            degrees: degrees.to_vec(),
            differential: Matrix::zeros(k, n, n),
            actions: vec![Matrix::zeros(k, n, n); alg.c()],
        }
    }

    /// `Λ` as a module over itself.
    pub fn free(alg: &ExteriorAlgebra) -> DgLambdaModule {
        let n = 1usize << alg.c();
        DgLambdaModule {
            alg: alg.clone(),
            degrees: (0..n).map(|s| alg.mask_degree(s)).collect(),
            differential: Matrix::zeros(alg.field(), n, n),
            actions: (0..alg.c()).map(|i| alg.left_mult(i)).collect(),
        }
    }

    /// `Λ / (e_i : i ∈ gens)`, a cyclic module generated in degree 0.
    pub fn cyclic_quotient(alg: &ExteriorAlgebra, gens: &[usize]) -> DgLambdaModule {
        let forbidden: usize = gens.iter().map(|i| 1usize << i).sum();
        let basis: Vec<usize> = (0..1usize << alg.c()).filter(|s| s & forbidden == 0).collect();
        let index: HashMap<usize, usize> = basis.iter().enumerate().map(|(k, &s)| (s, k)).collect();
        let n = basis.len();
        let k = alg.field();
        let actions = (0..alg.c())
            .map(|i| {
                let mut m = Matrix::zeros(k, n, n);
                if forbidden >> i & 1 == 0 {
                    let l = alg.left_mult(i);
                    for (col, &s) in basis.iter().enumerate() {
                        if s >> i & 1 == 0 {
                            let t = s | 1 << i;
                            m.set(index[&t], col, l.get(t, s).clone());
                        }
                    }
                }
                m
            })
            .collect();
        DgLambdaModule {
            alg: alg.clone(),
            degrees: basis.iter().map(|&s| alg.mask_degree(s)).collect(),
            differential: Matrix::zeros(k, n, n),
            actions,
        }
    }

    pub fn field(&self) -> Field {
        self.alg.field()
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn low_degree(&self) -> i32 {
        self.degrees.iter().copied().min().unwrap_or(0)
    }

    pub fn high_degree(&self) -> i32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn has_zero_differential(&self) -> bool {
        self.differential.is_zero()
    }

    /// Checks shapes, degrees and the four defining identities.
    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.dim();
        let c = self.alg.c();
        if self.actions.len() != c {
            return Err(Violation::Shape(format!("expected {c} action matrices, got {}", self.actions.len())));
        }
        let all = std::iter::once(&self.differential).chain(self.actions.iter());
        for m in all {
            if m.rows() != n || m.cols() != n {
                return Err(Violation::Shape(format!("matrix is {}x{}, expected {n}x{n}", m.rows(), m.cols())));
            }
            if m.field() != self.field() {
                return Err(Violation::Shape("matrix over the wrong field".into()));
            }
        }
        for (r, col, _) in self.differential.nonzero_entries() {
            if self.degrees[r] != self.degrees[col] - 1 {
                return Err(Violation::Degree { op: "∂".into(), row: r, col });
            }
        }
        for (i, a) in self.actions.iter().enumerate() {
            let d = self.alg.degrees[i] as i32;
            for (r, col, _) in a.nonzero_entries() {
                if self.degrees[r] != self.degrees[col] + d {
                    return Err(Violation::Degree { op: format!("e_{}", i + 1), row: r, col });
                }
            }
        }
        let dd = &self.differential;
        if !dd.mul(dd).is_zero() {
            return Err(Violation::DifferentialSquare);
        }
        for (i, a) in self.actions.iter().enumerate() {
            if !a.mul(a).is_zero() {
                return Err(Violation::Square(i));
            }
        }
        for (i, a) in self.actions.iter().enumerate() {
            if !dd.mul(a).add(&a.mul(dd)).is_zero() {
                return Err(Violation::Leibniz(i));
            }
        }
        for i in 0..c {
            for j in (i + 1)..c {
                let (a, b) = (&self.actions[i], &self.actions[j]);
                if !a.mul(b).add(&b.mul(a)).is_zero() {
                    return Err(Violation::Anticommute(i, j));
                }
            }
        }
        Ok(())
    }

    fn parity(&self) -> Matrix {
        parity_diag(self.field(), &self.degrees)
    }

    /// `M^∨ = Hom_k(M, k)` with the action through the antipode. For the
    /// dual basis `φ_k` one has `e_i φ_k = −(−1)^{|m_k|} Σ_j a_{kj} φ_j`, and
    /// the differential is dualized the same way.
    pub fn dual(&self) -> DgLambdaModule {
        let s = self.parity();
        let dualize = |a: &Matrix| a.transpose().mul(&s).scale(&self.field().from_int(-1));
        DgLambdaModule {
            alg: self.alg.clone(),
            degrees: self.degrees.iter().map(|d| -d).collect(),
            differential: dualize(&self.differential),
            actions: self.actions.iter().map(dualize).collect(),
        }
    }

    /// `Σ^n M`: degrees shifted up by `n`, structure maps twisted by `(−1)^n`.
    pub fn shift(&self, n: i32) -> DgLambdaModule {
        let s = sign(self.field(), n.rem_euclid(2) == 1);
        DgLambdaModule {
            alg: self.alg.clone(),
            degrees: self.degrees.iter().map(|d| d + n).collect(),
            differential: self.differential.scale(&s),
            actions: self.actions.iter().map(|a| a.scale(&s)).collect(),
        }
    }

    pub fn direct_sum(&self, other: &DgLambdaModule) -> Result<DgLambdaModule, ExtError> {
        if self.alg != other.alg {
            return Err(ExtError::AlgebraMismatch);
        }
        let (a, b) = (self.dim(), other.dim());
        let block = |x: &Matrix, y: &Matrix| {
            let mut m = Matrix::zeros(self.field(), a + b, a + b);
            for (r, c, v) in x.nonzero_entries() {
                m.set(r, c, v.clone());
            }
            for (r, c, v) in y.nonzero_entries() {
                m.set(a + r, a + c, v.clone());
            }
            m
        };
        let mut degrees = self.degrees.clone();
        degrees.extend(&other.degrees);
        Ok(DgLambdaModule {
            alg: self.alg.clone(),
            degrees,
            differential: block(&self.differential, &other.differential),
            actions: self.actions.iter().zip(&other.actions).map(|(x, y)| block(x, y)).collect(),
        })
    }

    /// `M ⊗_k N` through the coproduct: `e_i(m⊗n) = e_i m⊗n + (−1)^{|m|} m⊗e_i n`,
    /// and likewise for the differential. Basis index is `a · dim N + b`.
    pub fn tensor_k(&self, other: &DgLambdaModule) -> Result<DgLambdaModule, ExtError> {
        if self.alg != other.alg {
            return Err(ExtError::AlgebraMismatch);
        }
        let k = self.field();
        let inn = Matrix::identity(k, other.dim());
        let s = self.parity();
        let combine = |a: &Matrix, b: &Matrix| a.kron(&inn).add(&s.kron(b));
        let degrees = self.degrees.iter().flat_map(|a| other.degrees.iter().map(move |b| a + b)).collect();
        Ok(DgLambdaModule {
            alg: self.alg.clone(),
            degrees,
            differential: combine(&self.differential, &other.differential),
            actions: self.actions.iter().zip(&other.actions).map(|(a, b)| combine(a, b)).collect(),
        })
    }

    /// Euler characteristic `Σ (−1)^d dim M_d`.
    pub fn euler_characteristic(&self) -> i64 {
        self.degrees.iter().map(|d| if d.rem_euclid(2) == 0 { 1 } else { -1 }).sum()
    }

    /// `(degree, dim H_degree)` for every degree carrying basis vectors.
    pub fn homology_dims(&self) -> Vec<(i32, usize)> {
        crate::linalg::homology_dimensions(&self.degrees, &self.differential)
    }

    pub fn total_homology(&self) -> usize {
        self.homology_dims().iter().map(|(_, d)| d).sum()
    }

    /// `Hom_Λ(M, Λ)`: in degree `p` the maps `φ` raising degree by `p` with
    /// `φ A_i = (−1)^{p|e_i|} e_i φ`; `e_i` acts by `φ ↦ e_i ∘ φ` and the
    /// differential is `φ ↦ −(−1)^p φ∂`.
    pub fn hom_into_lambda(&self) -> DgLambdaModule {
        let alg = &self.alg;
        let k = self.field();
        let lam = DgLambdaModule::free(alg);
        let nl = lam.dim();
        let nm = self.dim();
        if nm == 0 {
            return DgLambdaModule::trivial_of_dim(alg, &[]);
        }
        let lo = lam.low_degree() - self.high_degree();
        let hi = lam.high_degree() - self.low_degree();
        // variables of degree p: positions (u, j) with |u| = |m_j| + p
        let vars = |p: i32| -> Vec<(usize, usize)> {
            let mut v = Vec::new();
            for j in 0..nm {
                for u in 0..nl {
                    if lam.degrees[u] == self.degrees[j] + p {
                        v.push((u, j));
                    }
                }
            }
            v
        };
        // (degree, positions, block)
        #[allow(clippy::type_complexity)]
        let mut blocks: Vec<(i32, Vec<(usize, usize)>, Matrix)> = Vec::new();
        for p in lo..=hi {
            let v = vars(p);
            if v.is_empty() {
                continue;
            }
            let pos: HashMap<(usize, usize), usize> = v.iter().enumerate().map(|(x, &y)| (y, x)).collect();
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for (i, a) in self.actions.iter().enumerate() {
                let s = sign(k, p.rem_euclid(2) == 1 && alg.degrees[i] % 2 == 1);
                let l = &lam.actions[i];
                // (Φ A_i − s L_i Φ)[u, j] = 0
                for u in 0..nl {
                    for j in 0..nm {
                        let mut row = vec![k.zero(); v.len()];
                        let mut any = false;
                        for kk in 0..nm {
                            let akj = a.get(kk, j);
                            if !akj.is_zero() {
                                if let Some(&x) = pos.get(&(u, kk)) {
                                    row[x] = &row[x] + akj;
                                    any = true;
                                }
                            }
                        }
                        for w in 0..nl {
                            let luw = l.get(u, w);
                            if !luw.is_zero() {
                                if let Some(&x) = pos.get(&(w, j)) {
                                    row[x] = &row[x] - &(&s * luw);
                                    any = true;
                                }
                            }
                        }
                        if any {
                            rows.push(row);
                        }
                    }
                }
            }
            let basis = if rows.is_empty() {
                Matrix::identity(k, v.len())
            } else {
                Matrix::from_rows(k, &rows).nullspace()
            };
            if basis.cols() > 0 {
                blocks.push((p, v, basis));
            }
        }
        let mut offsets = HashMap::new();
        let mut degrees = Vec::new();
        for (p, _, b) in &blocks {
            offsets.insert(*p, degrees.len());
            degrees.extend(std::iter::repeat_n(*p, b.cols()));
        }
        let n = degrees.len();
        let block_of = |p: i32| blocks.iter().find(|b| b.0 == p);
        // turn a basis vector into its Φ matrix
        let phi = |p: i32, col: usize| -> Matrix {
            let (_, v, b) = block_of(p).unwrap();
            let mut m = Matrix::zeros(k, nl, nm);
            for (x, &(u, j)) in v.iter().enumerate() {
                let val = b.get(x, col);
                if !val.is_zero() {
                    m.set(u, j, val.clone());
                }
            }
            m
        };
        // express a Φ matrix of degree q in the basis of Hom_q
        let coords = |q: i32, m: &Matrix| -> Option<Vec<Scalar>> {
            if m.is_zero() {
                return None;
            }
            let (_, v, b) = block_of(q).expect("image lies in Hom");
            let vec: Vec<Scalar> = v.iter().map(|&(u, j)| m.get(u, j).clone()).collect();
            Some(b.solve(&vec).expect("image lies in Hom"))
        };
        let mut differential = Matrix::zeros(k, n, n);
        let mut actions = vec![Matrix::zeros(k, n, n); alg.c()];
        for (p, _, b) in &blocks {
            for col in 0..b.cols() {
                let f = phi(*p, col);
                let src = offsets[p] + col;
                // −(−1)^p
                let dsign = sign(k, p.rem_euclid(2) == 0);
                let df = f.mul(&self.differential).scale(&dsign);
                if let Some(x) = coords(p - 1, &df) {
                    let off = offsets[&(p - 1)];
                    for (r, val) in x.into_iter().enumerate() {
                        differential.set(off + r, src, val);
                    }
                }
                for (i, l) in lam.actions.iter().enumerate() {
                    let ef = l.mul(&f);
                    let q = p + alg.degrees[i] as i32;
                    if let Some(x) = coords(q, &ef) {
                        let off = offsets[&q];
                        for (r, val) in x.into_iter().enumerate() {
                            actions[i].set(off + r, src, val);
                        }
                    }
                }
            }
        }
        DgLambdaModule { alg: alg.clone(), degrees, differential, actions }
    }

    /// `τ_{≤u} M = M / (M_{>u} + ∂M_{u+1})`.
    pub fn soft_truncation(&self, u: i32) -> DgLambdaModule {
        let k = self.field();
        let low: Vec<usize> = (0..self.dim()).filter(|&i| self.degrees[i] < u).collect();
        let top: Vec<usize> = (0..self.dim()).filter(|&i| self.degrees[i] == u).collect();
        let above: Vec<usize> = (0..self.dim()).filter(|&i| self.degrees[i] == u + 1).collect();
        // boundaries in degree u, and a complement spanned by standard vectors
        let w = self.differential.select(&top, &above);
        let aug = w.hstack(&Matrix::identity(k, top.len()));
        let (_, pivots) = aug.rref();
        let nb = w.cols();
        let comp: Vec<usize> = pivots.iter().filter(|&&p| p >= nb).map(|p| p - nb).collect();
        let wrank = pivots.iter().filter(|&&p| p < nb).count();
        let wcols: Vec<usize> = pivots.iter().filter(|&&p| p < nb).copied().collect();
        // basis of T_u written as [W-part | complement]: projection onto the complement
        let mut change = Matrix::zeros(k, top.len(), wrank + comp.len());
        for (x, &c) in wcols.iter().enumerate() {
            for r in 0..top.len() {
                change.set(r, x, w.get(r, c).clone());
            }
        }
        for (x, &c) in comp.iter().enumerate() {
            change.set(c, wrank + x, k.one());
        }
        let project = |v: Vec<Scalar>| -> Vec<Scalar> {
            let sol = change.solve(&v).expect("full basis");
            sol[wrank..].to_vec()
        };
        // new basis: low vectors, then complement vectors in degree u
        let mut basis_old: Vec<usize> = low.clone();
        basis_old.extend(comp.iter().map(|&c| top[c]));
        let nlow = low.len();
        let n = basis_old.len();
        let low_index: HashMap<usize, usize> = low.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let top_index: HashMap<usize, usize> = top.iter().enumerate().map(|(a, &b)| (b, a)).collect();
        let remap = |m: &Matrix| -> Matrix {
            let mut out = Matrix::zeros(k, n, n);
            for (col, &old) in basis_old.iter().enumerate() {
                let image = m.column(old);
                let mut topv = vec![k.zero(); top.len()];
                let mut any_top = false;
                for (r, val) in image.into_iter().enumerate() {
                    if val.is_zero() {
                        continue;
                    }
                    if let Some(&li) = low_index.get(&r) {
                        out.set(li, col, val);
                    } else if let Some(&ti) = top_index.get(&r) {
                        topv[ti] = val;
                        any_top = true;
                    }
                }
                if any_top {
                    for (x, val) in project(topv).into_iter().enumerate() {
                        if !val.is_zero() {
                            out.set(nlow + x, col, val);
                        }
                    }
                }
            }
            out
        };
        DgLambdaModule {
            alg: self.alg.clone(),
            degrees: basis_old.iter().map(|&i| self.degrees[i]).collect(),
            differential: remap(&self.differential),
            actions: self.actions.iter().map(remap).collect(),
        }
    }
}

/// The divided-power coalgebra `Γ` truncated to weight `≤ D`: basis `γ^{(a)}`
/// for `a ∈ ℕ^c`, `|a| ≤ D`, of degree `Σ a_i (|e_i| + 1)`.
#[derive(Debug, Clone)]
pub struct DividedPowers {
    pub exponents: Vec<Vec<u16>>,
    pub degrees: Vec<i32>,
    index: HashMap<Vec<u16>, usize>,
}

impl DividedPowers {
    pub fn new(alg: &ExteriorAlgebra, max_weight: usize) -> DividedPowers {
        let c = alg.c();
        let mut exponents = Vec::new();
        fn rec(i: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
            if i == cur.len() {
                out.push(cur.clone());
                return;
            }
            for e in 0..=left {
                cur[i] = e as u16;
                rec(i + 1, left - e, cur, out);
            }
            cur[i] = 0;
        }
        let mut cur = vec![0u16; c];
        rec(0, max_weight, &mut cur, &mut exponents);
        exponents.sort_by_key(|a| (a.iter().map(|&e| e as usize).sum::<usize>(), std::cmp::Reverse(a.clone())));
        let degrees = exponents
            .iter()
            .map(|a| a.iter().zip(alg.generator_degrees()).map(|(&e, &d)| e as i32 * (d as i32 + 1)).sum())
            .collect();
        let index = exponents.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        DividedPowers { exponents, degrees, index }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn weight(&self, g: usize) -> usize {
        self.exponents[g].iter().map(|&e| e as usize).sum()
    }

    /// The contraction `χ_i ⌟ γ^{(a)} = γ^{(a − ε_i)}`, if `a_i > 0`.
    pub fn contract(&self, i: usize, g: usize) -> Option<usize> {
        let a = &self.exponents[g];
        if a[i] == 0 {
            return None;
        }
        let mut b = a.clone();
        b[i] -= 1;
        self.index.get(&b).copied()
    }

    /// Matrix of the contraction by `χ_i`.
    pub fn contraction_matrix(&self, field: Field, i: usize) -> Matrix {
        let n = self.len();
        let mut m = Matrix::zeros(field, n, n);
        for g in 0..n {
            if let Some(h) = self.contract(i, g) {
                m.set(h, g, field.one());
            }
        }
        m
    }
}

/// Smallest weight bound `D` for which a `Γ_{≤D}` window is exact through
/// degree `n`, for modules whose lowest degree is `lo`.
pub fn required_weight(alg: &ExteriorAlgebra, n: i64, lo: i64) -> usize {
    let step = alg.min_degree() as i64 + 1;
    let need = n + 1 - lo;
    if need <= 0 {
        0
    } else {
        (need / step) as usize
    }
}

/// The truncated universal resolution `u_{≤D} M = Λ ⊗ Γ_{≤D} ⊗ M`, a
/// semifree DG module whose augmentation to `M` is a quasi-isomorphism in
/// low degrees. Basis index is `(S · |Γ| + g) · dim M + m`.
#[derive(Debug, Clone)]
pub struct UniversalWindow {
    pub gamma: DividedPowers,
    pub module: DgLambdaModule,
    pub max_weight: usize,
}

impl UniversalWindow {
    /// Number of free generators `γ ⊗ m` in each Γ-weight `0..=D`.
    pub fn free_ranks_by_weight(&self, dim_m: usize) -> Vec<usize> {
        let mut out = vec![0; self.max_weight + 1];
        for g in 0..self.gamma.len() {
            out[self.gamma.weight(g)] += dim_m;
        }
        out
    }

    /// Degrees through which the window computes the resolution exactly.
    pub fn exact_through(&self, m: &DgLambdaModule) -> i64 {
        let step = m.alg.min_degree() as i64 + 1;
        step * (self.max_weight as i64 + 1) + m.low_degree() as i64 - 2
    }
}

/// `u_{≤D} M`, with `D(1⊗γ⊗m) = 1⊗γ⊗∂m + Σ_i (1⊗χ_i⌟γ⊗e_i m − e_i⊗χ_i⌟γ⊗m)`.
pub fn universal_window(m: &DgLambdaModule, max_weight: usize) -> UniversalWindow {
    let alg = &m.alg;
    let k = m.field();
    let gamma = DividedPowers::new(alg, max_weight);
    let lam = DgLambdaModule::free(alg);
    let p = lam.parity();
    let ig = Matrix::identity(k, gamma.len());
    let im = Matrix::identity(k, m.dim());
    let mut d = p.kron(&ig).kron(&m.differential);
    for i in 0..alg.c() {
        let ci = gamma.contraction_matrix(k, i);
        d = d.add(&p.kron(&ci).kron(&m.actions[i]));
        d = d.sub(&lam.actions[i].kron(&ci).kron(&im));
    }
    let actions = lam.actions.iter().map(|l| l.kron(&ig).kron(&im)).collect();
    let mut degrees = Vec::with_capacity(lam.dim() * gamma.len() * m.dim());
    for s in &lam.degrees {
        for g in &gamma.degrees {
            for x in &m.degrees {
                degrees.push(s + g + x);
            }
        }
    }
    UniversalWindow {
        module: DgLambdaModule { alg: alg.clone(), degrees, differential: d, actions },
        gamma,
        max_weight,
    }
}

/// A graded complex of vector spaces with a sparse differential of degree −1.
#[derive(Debug, Clone)]
pub struct SparseComplex {
    pub field: Field,
    pub degrees: Vec<i32>,
    /// `(row, col, value)`: basis vector `col` maps to `value · row`.
    pub entries: Vec<(usize, usize, Scalar)>,
}

impl SparseComplex {
    /// `dim H_t` for `t ∈ lo..=hi`, computed one degree block at a time.
    pub fn homology(&self, lo: i32, hi: i32) -> Vec<(i32, usize)> {
        let mut local = vec![0usize; self.degrees.len()];
        let mut count: HashMap<i32, usize> = HashMap::new();
        for (i, &d) in self.degrees.iter().enumerate() {
            let c = count.entry(d).or_insert(0);
            local[i] = *c;
            *c += 1;
        }
        let dim = |t: i32| count.get(&t).copied().unwrap_or(0);
        // rank of the block leaving degree t
        let mut blocks: HashMap<i32, Matrix> = HashMap::new();
        for (r, c, v) in &self.entries {
            let t = self.degrees[*c];
            if t < lo || t > hi + 1 {
                continue;
            }
            let b = blocks.entry(t).or_insert_with(|| Matrix::zeros(self.field, dim(t - 1), dim(t)));
            b.add_to(local[*r], local[*c], v);
        }
        let ranks: HashMap<i32, usize> = blocks.iter().map(|(t, b)| (*t, b.rank())).collect();
        let rank = |t: i32| ranks.get(&t).copied().unwrap_or(0);
        (lo..=hi).map(|t| (t, dim(t) - rank(t) - rank(t + 1))).collect()
    }
}

fn sparse(m: &Matrix) -> Vec<(usize, usize, Scalar)> {
    m.nonzero_entries().map(|(r, c, v)| (r, c, v.clone())).collect()
}

fn blockwise_homology(degrees: &[i32], d: &Matrix, lo: i32, hi: i32) -> Vec<(i32, usize)> {
    SparseComplex { field: d.field(), degrees: degrees.to_vec(), entries: sparse(d) }.homology(lo, hi)
}

/// The reduced complex `Γ_{≤D} ⊗ M` with differential `∂ + Σ χ_i⌟ ⊗ e_i`,
/// keeping only basis vectors of degree `≤ top`.
pub fn reduced_complex(m: &DgLambdaModule, max_weight: usize, top: i32) -> SparseComplex {
    let gamma = DividedPowers::new(&m.alg, max_weight);
    let nm = m.dim();
    let mut index = HashMap::new();
    let mut degrees = Vec::new();
    for g in 0..gamma.len() {
        for x in 0..nm {
            let d = gamma.degrees[g] + m.degrees[x];
            if d <= top {
                index.insert(g * nm + x, degrees.len());
                degrees.push(d);
            }
        }
    }
    let dm = sparse(&m.differential);
    let acts: Vec<_> = m.actions.iter().map(sparse).collect();
    let mut entries = Vec::new();
    for g in 0..gamma.len() {
        for (r, c, v) in &dm {
            if let (Some(&row), Some(&col)) = (index.get(&(g * nm + r)), index.get(&(g * nm + c))) {
                entries.push((row, col, v.clone()));
            }
        }
        for (i, a) in acts.iter().enumerate() {
            if let Some(h) = gamma.contract(i, g) {
                for (r, c, v) in a {
                    if let (Some(&row), Some(&col)) = (index.get(&(h * nm + r)), index.get(&(g * nm + c))) {
                        entries.push((row, col, v.clone()));
                    }
                }
            }
        }
    }
    SparseComplex { field: m.field(), degrees, entries }
}

/// `dim_k Ext^n_Λ(M, k)` for `n` from the lowest degree of `M` through
/// `max_degree`, as the homology of the reduced complex `k ⊗_Λ u_{≤D}M`.
/// Pure linear algebra.
pub fn ext_dimensions_linear(m: &DgLambdaModule, max_degree: i64) -> Vec<(i64, usize)> {
    if m.dim() == 0 {
        return Vec::new();
    }
    let lo = m.low_degree() as i64;
    let dmax = required_weight(&m.alg, max_degree, lo);
    let c = reduced_complex(m, dmax, max_degree as i32 + 1);
    c.homology(lo as i32, max_degree as i32).into_iter().map(|(t, n)| (t as i64, n)).collect()
}

/// The derived tensor window `τ_{≤u}(u_{≤D}M ⊗_Λ N)` and the dimensions of
/// `Tor^Λ_n(M, N)` for `n` from the lowest degree through `u`.
#[derive(Debug, Clone)]
pub struct TensorWindow {
    pub truncated: DgLambdaModule,
    pub tor_dims: Vec<(i32, usize)>,
    pub max_weight: usize,
}

/// `u_{≤D}M ⊗_Λ N ≅ Γ_{≤D} ⊗ M ⊗ N` with differential
/// `∂_M + (−1)^{|m|}∂_N + Σ_i χ_i⌟ ⊗ (e_i ⊗ 1 − (−1)^{|m|} ⊗ e_i)` and
/// `Λ` acting by `(−1)^{|m|} ⊗ e_i`. Basis index `g · dim M · dim N + a · dim N + b`.
pub fn derived_tensor_complex(m: &DgLambdaModule, n: &DgLambdaModule, max_weight: usize) -> Result<DgLambdaModule, ExtError> {
    if m.alg != n.alg {
        return Err(ExtError::AlgebraMismatch);
    }
    let k = m.field();
    let gamma = DividedPowers::new(&m.alg, max_weight);
    let ig = Matrix::identity(k, gamma.len());
    let inn = Matrix::identity(k, n.dim());
    let sm = m.parity();
    let mut d = ig.kron(&m.differential.kron(&inn).add(&sm.kron(&n.differential)));
    for i in 0..m.alg.c() {
        let ci = gamma.contraction_matrix(k, i);
        let inner = m.actions[i].kron(&inn).sub(&sm.kron(&n.actions[i]));
        d = d.add(&ci.kron(&inner));
    }
    let actions = n.actions.iter().map(|b| ig.kron(&sm.kron(b))).collect();
    let mut degrees = Vec::new();
    for g in &gamma.degrees {
        for a in &m.degrees {
            for b in &n.degrees {
                degrees.push(g + a + b);
            }
        }
    }
    Ok(DgLambdaModule { alg: m.alg.clone(), degrees, differential: d, actions })
}

pub fn derived_tensor_window(m: &DgLambdaModule, n: &DgLambdaModule, max_weight: usize, u: i32) -> Result<TensorWindow, ExtError> {
    if m.alg != n.alg {
        return Err(ExtError::AlgebraMismatch);
    }
    let lo = (m.low_degree() + n.low_degree()) as i64;
    let required = required_weight(&m.alg, u as i64 + 1, lo + 1).max(required_weight(&m.alg, u as i64, lo));
    if max_weight < required {
        return Err(ExtError::WindowTooSmall { required, given: max_weight });
    }
    let t = derived_tensor_complex(m, n, max_weight)?;
    let truncated = t.soft_truncation(u);
    let tor_dims = blockwise_homology(&t.degrees, &t.differential, lo as i32, u);
    Ok(TensorWindow { truncated, tor_dims, max_weight })
}

/// Smallest admissible weight bound for [`derived_tensor_window`].
pub fn tensor_window_weight(m: &DgLambdaModule, n: &DgLambdaModule, u: i32) -> usize {
    let lo = (m.low_degree() + n.low_degree()) as i64;
    required_weight(&m.alg, u as i64 + 1, lo + 1).max(required_weight(&m.alg, u as i64, lo))
}
