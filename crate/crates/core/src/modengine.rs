//! Finitely presented graded modules over a weighted polynomial ring:
//! kernels, subquotients, annihilators, Hilbert series, Tor and the homology
//! of square-zero endomorphisms of free modules.
//!
//! Degrees are in the upper (cohomological) convention. A generator of
//! degree `d` spans a copy of `S(-d)`. A matrix is stored as a list of
//! columns; column `j` is the image of source generator `j`.

use std::sync::Arc;

use thiserror::Error;

use crate::polyring::{
    groebner, monomial_numerator, reduce_vector, HilbertSeries, HomogeneousIdeal, LaurentPoly, Monomial,
    ModuleOrder, PolyError, PolyRing, Polynomial, SVec,
};

pub type Column = Vec<Polynomial>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModError {
    #[error("entry ({row}, {col}) is not homogeneous of degree {expected}")]
    Inhomogeneous { row: usize, col: usize, expected: i64 },
    #[error("not a differential: the square is nonzero")]
    NotADifferential,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A graded free module `⊕ S(-d_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeModule {
    pub ring: Arc<PolyRing>,
    pub degrees: Vec<i64>,
}

impl FreeModule {
    pub fn new(ring: &Arc<PolyRing>, degrees: Vec<i64>) -> FreeModule {
        FreeModule { ring: ring.clone(), degrees }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }
}

/// A homogeneous map of free modules of the given degree: entry `(i, j)` has
/// degree `deg(source_j) + degree - deg(target_i)`.
#[derive(Debug, Clone)]
pub struct GradedMap {
    pub source: FreeModule,
    pub target: FreeModule,
    pub columns: Vec<Column>,
    pub degree: i64,
}

impl GradedMap {
    pub fn new(source: FreeModule, target: FreeModule, columns: Vec<Column>, degree: i64) -> Result<GradedMap, ModError> {
        if columns.len() != source.rank() || columns.iter().any(|c| c.len() != target.rank()) {
            return Err(ModError::DimensionMismatch(format!(
                "expected {} columns of length {}",
                source.rank(),
                target.rank()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            for (i, a) in col.iter().enumerate() {
                let expected = source.degrees[j] + degree - target.degrees[i];
                match a.homogeneous_degree() {
                    Some(None) => {}
                    Some(Some(d)) if d == expected => {}
                    _ => return Err(ModError::Inhomogeneous { row: i, col: j, expected }),
                }
            }
        }
        Ok(GradedMap { source, target, columns, degree })
    }

    pub fn compose(&self, inner: &GradedMap) -> Vec<Column> {
        mat_mul(&self.target.ring, &self.columns, &inner.columns, self.target.rank())
    }
}

/// `A · B` for column-stored matrices; `rows` is the row count of `A`.
pub fn mat_mul(ring: &Arc<PolyRing>, a: &[Column], b: &[Column], rows: usize) -> Vec<Column> {
    b.iter()
        .map(|bcol| {
            let mut out = vec![ring.zero(); rows];
            for (k, bk) in bcol.iter().enumerate() {
                if bk.is_zero() {
                    continue;
                }
                for (i, aik) in a[k].iter().enumerate() {
                    if !aik.is_zero() {
                        out[i] = &out[i] + &(aik * bk);
                    }
                }
            }
            out
        })
        .collect()
}

/// Degree of a homogeneous column in the free module with the given
/// generator degrees; `None` for the zero column.
pub fn column_degree(col: &[Polynomial], degrees: &[i64]) -> Option<i64> {
    col.iter().zip(degrees).find(|(a, _)| !a.is_zero()).map(|(a, d)| a.homogeneous_degree().flatten().unwrap() + d)
}

fn column_to_svec(order: &ModuleOrder, col: &[Polynomial], offset: usize) -> SVec {
    let mut v = SVec::new();
    for (i, a) in col.iter().enumerate() {
        for (m, c) in a.terms() {
            v.push((i + offset, m.clone(), c.clone()));
        }
    }
    order.normalize(v)
}

fn svec_to_column(ring: &Arc<PolyRing>, v: &SVec, offset: usize, len: usize) -> Column {
    let mut parts: Vec<Vec<(Monomial, crate::Scalar)>> = vec![Vec::new(); len];
    for (c, m, s) in v {
        if *c >= offset && *c < offset + len {
            parts[c - offset].push((m.clone(), s.clone()));
        }
    }
    parts.into_iter().map(|t| Polynomial::from_terms(ring, t)).collect()
}

fn module_order(ring: &PolyRing, degrees: &[i64]) -> ModuleOrder {
    ModuleOrder::top(ring.order(), ring.weights(), degrees)
}

/// Columns generating `{u : Σ u_j a_j = 0}` for the given columns `a_j` in a
/// free module with generator degrees `target`. `source` are the degrees of
/// the `a_j` (needed only for the term order heuristic).
pub fn syzygies(ring: &Arc<PolyRing>, target: &[i64], source: &[i64], cols: &[Column]) -> Vec<Column> {
    let m = target.len();
    let n = cols.len();
    if n == 0 {
        return Vec::new();
    }
    let mut comp_deg: Vec<i64> = target.to_vec();
    comp_deg.extend_from_slice(source);
    let mut blocks = vec![0u8; m];
    blocks.extend(std::iter::repeat_n(1u8, n));
    let order = ModuleOrder::top(ring.order(), ring.weights(), &comp_deg).with_blocks(blocks);
    let one = Monomial::one(ring.nvars());
    let gens: Vec<SVec> = cols
        .iter()
        .enumerate()
        .map(|(j, col)| {
            let mut v = column_to_svec(&order, col, 0);
            v.push((m + j, one.clone(), ring.field().one()));
            order.normalize(v)
        })
        .collect();
    let gb = groebner(gens, &order);
    gb.iter().filter(|v| v.iter().all(|t| t.0 >= m)).map(|v| svec_to_column(ring, v, m, n)).collect()
}

/// Generators of the kernel of a graded map (as columns in the source).
pub fn kernel(map: &GradedMap) -> Vec<Column> {
    let src: Vec<i64> = map.source.degrees.iter().map(|d| d + map.degree).collect();
    syzygies(&map.target.ring, &map.target.degrees, &src, &map.columns)
}

/// `coker(relations)` over a free module with the given generator degrees.
#[derive(Debug, Clone)]
pub struct PresentedModule {
    pub ring: Arc<PolyRing>,
    pub degrees: Vec<i64>,
    pub relations: Vec<Column>,
}

impl PresentedModule {
    pub fn new(ring: &Arc<PolyRing>, degrees: Vec<i64>, relations: Vec<Column>) -> Result<PresentedModule, ModError> {
        for (j, col) in relations.iter().enumerate() {
            if col.len() != degrees.len() {
                return Err(ModError::DimensionMismatch(format!("relation {j} has wrong length")));
            }
            let first = col.iter().zip(&degrees).enumerate().find(|(_, (a, _))| !a.is_zero());
            let d = match first {
                None => continue,
                Some((i, (a, di))) => match a.homogeneous_degree() {
                    Some(Some(e)) => e + di,
                    _ => return Err(ModError::Inhomogeneous { row: i, col: j, expected: 0 }),
                },
            };
            for (i, a) in col.iter().enumerate() {
                if !a.is_zero() && a.homogeneous_degree() != Some(Some(d - degrees[i])) {
                    return Err(ModError::Inhomogeneous { row: i, col: j, expected: d - degrees[i] });
                }
            }
        }
        let relations = relations.into_iter().filter(|c| c.iter().any(|a| !a.is_zero())).collect();
        Ok(PresentedModule { ring: ring.clone(), degrees, relations })
    }

    /// The free module `⊕ S(-d)`.
    pub fn free(ring: &Arc<PolyRing>, degrees: Vec<i64>) -> PresentedModule {
        PresentedModule { ring: ring.clone(), degrees, relations: Vec::new() }
    }

    /// `S/I` shifted to live in degree `d`.
    pub fn cyclic(ideal: &HomogeneousIdeal, d: i64) -> PresentedModule {
        let ring = ideal.ring().clone();
        let rels = ideal.generators().iter().map(|g| vec![g.clone()]).collect();
        PresentedModule { ring, degrees: vec![d], relations: rels }
    }

    pub fn num_generators(&self) -> usize {
        self.degrees.len()
    }

    fn order(&self) -> ModuleOrder {
        module_order(&self.ring, &self.degrees)
    }

    /// Reduced Gröbner basis of the relation module.
    pub fn relation_basis(&self) -> Vec<SVec> {
        let order = self.order();
        groebner(self.relations.iter().map(|c| column_to_svec(&order, c, 0)).collect(), &order)
    }

    /// Normal form of a column modulo the relations.
    pub fn normal_form(&self, col: &[Polynomial]) -> Column {
        let order = self.order();
        let gb = self.relation_basis();
        let r = reduce_vector(column_to_svec(&order, col, 0), &gb, &order);
        svec_to_column(&self.ring, &r, 0, self.degrees.len())
    }

    pub fn hilbert_series(&self) -> HilbertSeries {
        let gb = self.relation_basis();
        let mut num = LaurentPoly::zero();
        for (j, &d) in self.degrees.iter().enumerate() {
            let leads: Vec<Monomial> =
                gb.iter().filter(|v| v.last().unwrap().0 == j).map(|v| v.last().unwrap().1.clone()).collect();
            num = num.add(&monomial_numerator(&leads, self.ring.weights()).shift(d));
        }
        HilbertSeries { numerator: num, weights: self.ring.weights().to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.hilbert_series().is_zero()
    }

    /// `(0 :_S M)`, as the intersection over generators of `(relations : e_j)`.
    pub fn annihilator(&self) -> HomogeneousIdeal {
        let n = self.degrees.len();
        let mut acc: Option<HomogeneousIdeal> = None;
        for j in 0..n {
            let mut unit = vec![self.ring.zero(); n];
            unit[j] = self.ring.one();
            let mut cols = vec![unit];
            cols.extend(self.relations.iter().cloned());
            let mut src = vec![self.degrees[j]];
            src.extend(self.relations.iter().map(|c| column_degree(c, &self.degrees).unwrap_or(0)));
            let syz = syzygies(&self.ring, &self.degrees, &src, &cols);
            let q = HomogeneousIdeal::new(&self.ring, syz.into_iter().map(|c| c[0].clone()).collect())
                .expect("homogeneous quotient");
            acc = Some(match acc {
                None => q,
                Some(a) => a.intersect(&q),
            });
            if acc.as_ref().unwrap().is_unit() {
                break;
            }
        }
        acc.unwrap_or_else(|| HomogeneousIdeal::unit(&self.ring))
    }

    /// Repeatedly eliminates a generator that some relation expresses in
    /// terms of the others (a relation with a nonzero constant entry).
    /// Afterwards every relation entry lies in the irrelevant ideal, so the
    /// remaining generators are minimal.
    pub fn prune(&self) -> PresentedModule {
        let mut degrees = self.degrees.clone();
        // reduce the relations first so redundant columns disappear
        let mut rels: Vec<Column> =
            self.relation_basis().iter().map(|v| svec_to_column(&self.ring, v, 0, degrees.len())).collect();
        loop {
            let found = rels.iter().enumerate().find_map(|(j, col)| {
                col.iter().enumerate().find(|(_, a)| !a.is_zero() && a.is_constant()).map(|(i, _)| (j, i))
            });
            let Some((j, r)) = found else { break };
            let pivot = rels.swap_remove(j);
            let c = pivot[r].terms()[0].1.clone();
            let cinv = c.inv().expect("nonzero");
            for col in rels.iter_mut() {
                if col[r].is_zero() {
                    continue;
                }
                let f = col[r].scale(&cinv);
                for (i, p) in pivot.iter().enumerate() {
                    if !p.is_zero() {
                        col[i] = &col[i] - &(&f * p);
                    }
                }
                debug_assert!(col[r].is_zero());
            }
            for col in rels.iter_mut() {
                col.remove(r);
            }
            degrees.remove(r);
            rels.retain(|c| c.iter().any(|a| !a.is_zero()));
        }
        PresentedModule { ring: self.ring.clone(), degrees, relations: rels }
    }

    /// Degree of a largest minimal generator (after pruning); `None` for zero.
    pub fn generator_degree_bound(&self) -> Option<i64> {
        let p = self.prune();
        p.degrees.iter().copied().max()
    }

    /// `X ⊗_S Y` presented on pairs of generators (index `a * |Y| + b`).
    pub fn tensor(&self, other: &PresentedModule) -> PresentedModule {
        let (m, n) = (self.degrees.len(), other.degrees.len());
        let degrees = self.degrees.iter().flat_map(|a| other.degrees.iter().map(move |b| a + b)).collect();
        let mut rels = Vec::new();
        for r in &self.relations {
            for b in 0..n {
                let mut col = vec![self.ring.zero(); m * n];
                for a in 0..m {
                    col[a * n + b] = r[a].clone();
                }
                rels.push(col);
            }
        }
        for r in &other.relations {
            for a in 0..m {
                let mut col = vec![self.ring.zero(); m * n];
                for b in 0..n {
                    col[a * n + b] = r[b].reorder(&self.ring);
                }
                rels.push(col);
            }
        }
        PresentedModule { ring: self.ring.clone(), degrees, relations: rels }
    }
}

/// `(K + Z) / Z` inside a free module with generator degrees `ambient`,
/// presented on the columns of `k`. The relations are the `K`-parts of the
/// syzygies of `[K | Z]`.
pub fn subquotient(ring: &Arc<PolyRing>, ambient: &[i64], k: &[Column], z: &[Column]) -> PresentedModule {
    let kdeg: Vec<i64> = k.iter().map(|c| column_degree(c, ambient).unwrap_or(0)).collect();
    let zdeg: Vec<i64> = z.iter().map(|c| column_degree(c, ambient).unwrap_or(0)).collect();
    let mut cols: Vec<Column> = k.to_vec();
    cols.extend(z.iter().cloned());
    let mut src = kdeg.clone();
    src.extend(zdeg);
    let syz = syzygies(ring, ambient, &src, &cols);
    let rels: Vec<Column> =
        syz.into_iter().map(|c| c[..k.len()].to_vec()).filter(|c| c.iter().any(|a| !a.is_zero())).collect();
    PresentedModule { ring: ring.clone(), degrees: kdeg, relations: rels }
}

/// Homology `ker δ / im δ` of a square-zero homogeneous endomorphism of a
/// free module, pruned to a minimal presentation.
pub fn dg_homology(free: &FreeModule, delta: &[Column], degree: i64) -> Result<PresentedModule, ModError> {
    let map = GradedMap::new(free.clone(), free.clone(), delta.to_vec(), degree)?;
    let sq = map.compose(&map);
    if sq.iter().any(|c| c.iter().any(|a| !a.is_zero())) {
        return Err(ModError::NotADifferential);
    }
    let ker: Vec<Column> = kernel(&map)
        .into_iter()
        .filter(|c| c.iter().any(|a| !a.is_zero()))
        .collect();
    let im: Vec<Column> = delta.iter().filter(|c| c.iter().any(|a| !a.is_zero())).cloned().collect();
    Ok(subquotient(&free.ring, &free.degrees, &ker, &im).prune())
}

/// A free resolution of `coker(relations)`: the list of differentials
/// `d_1, d_2, …` (as column lists) together with the ranks' degrees.
pub fn resolve(x: &PresentedModule, length: usize) -> Vec<(Vec<i64>, Vec<Column>)> {
    let mut out: Vec<(Vec<i64>, Vec<Column>)> = Vec::new();
    let mut degrees = x.degrees.clone();
    let mut cols = x.relations.clone();
    for _ in 0..length {
        let src: Vec<i64> = cols.iter().map(|c| column_degree(c, &degrees).unwrap_or(0)).collect();
        let next = syzygies(&x.ring, &degrees, &src, &cols);
        out.push((src.clone(), cols));
        degrees = src;
        cols = next;
        if cols.is_empty() {
            break;
        }
    }
    out
}

/// `Tor_i^S(X, Y)` for `0 ≤ i ≤ maxlen`, computed from a free resolution of `X`.
pub fn resolve_and_tor(x: &PresentedModule, y: &PresentedModule, maxlen: usize) -> Vec<PresentedModule> {
    let ring = &x.ring;
    let res = resolve(x, maxlen + 1);
    // F_i degrees and d_i : F_i -> F_{i-1}
    let mut fdeg: Vec<Vec<i64>> = vec![x.degrees.clone()];
    let mut maps: Vec<Vec<Column>> = vec![Vec::new()];
    for (src, cols) in &res {
        fdeg.push(src.clone());
        maps.push(cols.clone());
    }
    let ny = y.degrees.len();
    let tensor_deg = |d: &[i64]| -> Vec<i64> { d.iter().flat_map(|a| y.degrees.iter().map(move |b| a + b)).collect() };
    // d ⊗ 1 as columns
    let d_tensor = |i: usize| -> Vec<Column> {
        let rows = fdeg[i - 1].len() * ny;
        let mut out = Vec::new();
        for col in &maps[i] {
            for b in 0..ny {
                let mut c = vec![ring.zero(); rows];
                for (a, p) in col.iter().enumerate() {
                    c[a * ny + b] = p.clone();
                }
                out.push(c);
            }
        }
        out
    };
    let one_tensor_ry = |i: usize| -> Vec<Column> {
        let na = fdeg[i].len();
        let mut out = Vec::new();
        for r in &y.relations {
            for a in 0..na {
                let mut c = vec![ring.zero(); na * ny];
                for (b, p) in r.iter().enumerate() {
                    c[a * ny + b] = p.reorder(ring);
                }
                out.push(c);
            }
        }
        out
    };
    let mut tors = Vec::new();
    for i in 0..=maxlen {
        let amb = if i < fdeg.len() { tensor_deg(&fdeg[i]) } else { Vec::new() };
        if amb.is_empty() {
            tors.push(PresentedModule::free(ring, Vec::new()));
            continue;
        }
        let ry = one_tensor_ry(i);
        // cycles: first block of ker [d_i ⊗ 1 | 1 ⊗ R_Y] (all of F_0 ⊗ Y when i = 0)
        let cycles: Vec<Column> = if i == 0 {
            (0..amb.len())
                .map(|k| {
                    let mut c = vec![ring.zero(); amb.len()];
                    c[k] = ring.one();
                    c
                })
                .collect()
        } else {
            let lower = tensor_deg(&fdeg[i - 1]);
            let dt = d_tensor(i);
            let ry_low = one_tensor_ry(i - 1);
            let mut cols = dt.clone();
            cols.extend(ry_low.iter().cloned());
            let mut src = amb.clone();
            src.extend(ry_low.iter().map(|c| column_degree(c, &lower).unwrap_or(0)));
            syzygies(ring, &lower, &src, &cols)
                .into_iter()
                .map(|c| c[..amb.len()].to_vec())
                .filter(|c| c.iter().any(|a| !a.is_zero()))
                .collect()
        };
        let mut bounds = ry;
        if i + 1 < maps.len() {
            bounds.extend(d_tensor(i + 1));
        }
        bounds.retain(|c| c.iter().any(|a| !a.is_zero()));
        tors.push(subquotient(ring, &amb, &cycles, &bounds).prune());
    }
    tors
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Field;

    fn s2() -> Arc<PolyRing> {
        PolyRing::cohomological(Field::Rationals, &[1, 1])
    }

    #[test]
    fn koszul_syzygy() {
        let s = s2();
        let (a, b) = (s.var(0), s.var(1));
        let map = GradedMap::new(FreeModule::new(&s, vec![2, 2]), FreeModule::new(&s, vec![0]), vec![vec![a.clone()], vec![b.clone()]], 0)
            .unwrap();
        let k = kernel(&map);
        assert_eq!(k.len(), 1);
        let c = &k[0];
        // proportional to (chi2, -chi1)
        assert!((&(&c[0] * &a) + &(&c[1] * &b)).is_zero());
        assert_eq!(c[0].homogeneous_degree(), Some(Some(2)));
        let single = GradedMap::new(FreeModule::new(&s, vec![2]), FreeModule::new(&s, vec![0]), vec![vec![a.clone()]], 0).unwrap();
        assert!(kernel(&single).is_empty());
        let zero = GradedMap::new(FreeModule::new(&s, vec![0]), FreeModule::new(&s, vec![0]), vec![vec![s.zero()]], 0).unwrap();
        assert_eq!(kernel(&zero).len(), 1);
    }

    #[test]
    fn annihilators() {
        let s = s2();
        let (a, b) = (s.var(0), s.var(1));
        let m = PresentedModule::new(&s, vec![0], vec![vec![a.clone()]]).unwrap();
        assert_eq!(m.annihilator().canonical_generators(), vec![a.clone()]);
        let k = PresentedModule::new(&s, vec![0], vec![vec![a.clone()], vec![b.clone()]]).unwrap();
        let ann = k.annihilator();
        assert!(ann.contains(&a) && ann.contains(&b) && !ann.is_unit());
    }

    #[test]
    fn tor_examples() {
        let s = s2();
        let (a, b) = (s.var(0), s.var(1));
        let x = PresentedModule::new(&s, vec![0], vec![vec![a.clone()]]).unwrap();
        let y = PresentedModule::new(&s, vec![0], vec![vec![b.clone()]]).unwrap();
        let t = resolve_and_tor(&x, &y, 2);
        assert_eq!(t[0].hilbert_series().dims(0, 4), vec![1, 0, 0, 0, 0]);
        assert!(t[1].is_zero());
        let t = resolve_and_tor(&x, &x, 2);
        assert_eq!(t[0].hilbert_series().dims(0, 6), vec![1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(t[1].hilbert_series().dims(0, 6), vec![0, 0, 1, 0, 1, 0, 1]);
        assert!(t[2].is_zero());
        let free = PresentedModule::free(&s, vec![0]);
        let t = resolve_and_tor(&x, &free, 2);
        assert_eq!(t[0].hilbert_series(), x.hilbert_series());
        assert!(t[1].is_zero());
    }

    #[test]
    fn homology_of_simple_differentials() {
        let s = s2();
        let b = s.var(1);
        let f = FreeModule::new(&s, vec![0]);
        let h = dg_homology(&f, &[vec![s.zero()]], 1).unwrap();
        assert_eq!(h.hilbert_series().dims(0, 4), vec![1, 0, 2, 0, 3]);
        // δ = [[0, chi2], [0, 0]] with generators in degrees 0 and 1
        let f2 = FreeModule::new(&s, vec![0, 1]);
        let delta2 = vec![vec![s.zero(), s.zero()], vec![b.clone(), s.zero()]];
        let h = dg_homology(&f2, &delta2, 1).unwrap();
        assert_eq!(h.num_generators(), 1);
        assert_eq!(h.hilbert_series().dims(0, 6), vec![1, 0, 1, 0, 1, 0, 1]);
        assert_eq!(h.hilbert_series().proj_dim(), crate::polyring::ProjDim::Dim(0));
        assert_eq!(h.annihilator().canonical_generators(), vec![b.clone()]);
        let bad = vec![vec![s.zero(), b.clone()], vec![b.clone(), s.zero()]];
        assert!(dg_homology(&FreeModule::new(&s, vec![0, 0]), &bad, 2).is_err());
    }

    #[test]
    fn pruning_removes_redundant_generators() {
        let s = s2();
        let a = s.var(0);
        // generators g0, g1 in degree 0 with relation g0 - g1 and chi1 * g0
        let m = PresentedModule::new(&s, vec![0, 0], vec![vec![s.one(), -&s.one()], vec![a.clone(), s.zero()]]).unwrap();
        let p = m.prune();
        assert_eq!(p.num_generators(), 1);
        assert_eq!(p.hilbert_series(), m.hilbert_series());
        assert_eq!(p.generator_degree_bound(), Some(0));
    }

    #[test]
    fn inhomogeneous_map_rejected() {
        let s = s2();
        let bad = &s.var(0) + &s.one();
        let r = GradedMap::new(FreeModule::new(&s, vec![2]), FreeModule::new(&s, vec![0]), vec![vec![bad]], 0);
        assert!(matches!(r, Err(ModError::Inhomogeneous { .. })));
    }
}
