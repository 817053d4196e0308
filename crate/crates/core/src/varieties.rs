//! Closed cones in `Spec S` up to radical: joins through the diagonal,
//! Δ-preimages, and containment tests.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::polyring::{HomogeneousIdeal, MonomialOrder, PolyError, PolyRing, Polynomial, ProjDim};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error("varieties live in different ambient rings")]
    AmbientMismatch,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    /// Empty cone: the defining ideal is the unit ideal.
    Unit,
    /// Only the vertex: radical is the irrelevant ideal.
    ConePoint,
    Positive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Unit => "UNIT",
            Classification::ConePoint => "CONE_POINT",
            Classification::Positive => "POSITIVE",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Equal,
    /// The first argument is strictly contained in the second.
    Subset,
    /// The second argument is strictly contained in the first.
    Superset,
    Incomparable,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Equal => "equal",
            Comparison::Subset => "subset",
            Comparison::Superset => "superset",
            Comparison::Incomparable => "incomparable",
        })
    }
}

/// `V(I)` for a homogeneous ideal `I` of `S`.
#[derive(Debug, Clone)]
pub struct VarietyHandle {
    ideal: HomogeneousIdeal,
    class: Classification,
    dim: ProjDim,
}

impl VarietyHandle {
    pub fn new(ideal: HomogeneousIdeal) -> VarietyHandle {
        let ring = ideal.ring().clone();
        let class = if ideal.is_unit() {
            Classification::Unit
        } else if (0..ring.nvars()).all(|i| ideal.radical_contains(&ring.var(i))) {
            Classification::ConePoint
        } else {
            Classification::Positive
        };
        let dim = match class {
            Classification::Unit => ProjDim::Empty,
            Classification::ConePoint => ProjDim::Dim(-1),
            Classification::Positive => ideal.hilbert_series().proj_dim(),
        };
        VarietyHandle { ideal, class, dim }
    }

    /// The whole space, `V(0)`.
    pub fn everything(ring: &Arc<PolyRing>) -> VarietyHandle {
        VarietyHandle::new(HomogeneousIdeal::zero(ring))
    }

    pub fn cone_point(ring: &Arc<PolyRing>) -> VarietyHandle {
        VarietyHandle::new(HomogeneousIdeal::irrelevant(ring))
    }

    pub fn empty(ring: &Arc<PolyRing>) -> VarietyHandle {
        VarietyHandle::new(HomogeneousIdeal::unit(ring))
    }

    pub fn ideal(&self) -> &HomogeneousIdeal {
        &self.ideal
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        self.ideal.ring()
    }

    pub fn classification(&self) -> Classification {
        self.class
    }

    /// Dimension in `Proj S`; the cone point has dimension −1.
    pub fn proj_dim(&self) -> ProjDim {
        self.dim
    }

    /// The ambient ring is a domain, so only the zero ideal cuts out everything.
    pub fn is_everything(&self) -> bool {
        self.ideal.is_zero()
    }

    /// Whether the point with coordinates `a` lies on the cone.
    pub fn contains_point(&self, a: &[crate::Scalar]) -> bool {
        self.ideal.generators().iter().all(|g| g.evaluate(a).is_zero())
    }

    /// Canonical generators of the defining ideal.
    pub fn canonical_generators(&self) -> Vec<Polynomial> {
        self.ideal.canonical_generators()
    }
}

impl fmt::Display for VarietyHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.canonical_generators().iter().map(|p| p.to_string()).collect();
        write!(f, "V({})", g.join(", "))
    }
}

fn same_ambient(a: &PolyRing, b: &PolyRing) -> bool {
    a.field() == b.field() && a.names() == b.names() && a.weights() == b.weights()
}

fn check(u: &VarietyHandle, v: &VarietyHandle) -> Result<(), VarietyError> {
    if same_ambient(u.ring(), v.ring()) {
        Ok(())
    } else {
        Err(VarietyError::AmbientMismatch)
    }
}

fn fresh_names(s: &PolyRing, prefix: &str) -> Vec<String> {
    (1..=s.nvars())
        .map(|i| {
            let mut n = format!("{prefix}{i}");
            while s.names().contains(&n) {
                n.insert(0, '_');
            }
            n
        })
        .collect()
}

/// `S^e = S ⊗_k S = k[y, z]`, with `y_i, z_i` of the same weight as `χ_i`.
pub fn enveloping_ring(s: &PolyRing) -> Arc<PolyRing> {
    let mut names = fresh_names(s, "y");
    names.extend(fresh_names(s, "z"));
    let mut weights = s.weights().to_vec();
    weights.extend_from_slice(s.weights());
    PolyRing::new(s.field(), names, weights, MonomialOrder::Grevlex).expect("fresh names")
}

/// `k[χ, y, z]` with the three blocks in that order.
fn triple_ring(s: &PolyRing) -> Arc<PolyRing> {
    let mut names = s.names().to_vec();
    names.extend(fresh_names(s, "y"));
    names.extend(fresh_names(s, "z"));
    let mut weights = Vec::new();
    for _ in 0..3 {
        weights.extend_from_slice(s.weights());
    }
    PolyRing::new(s.field(), names, weights, MonomialOrder::Grevlex).expect("fresh names")
}

fn diagonal_relations(big: &Arc<PolyRing>, c: usize) -> Vec<Polynomial> {
    (0..c).map(|i| &(&big.var(i) - &big.var(c + i)) - &big.var(2 * c + i)).collect()
}

fn eliminate_to(s: &Arc<PolyRing>, big_ideal: HomogeneousIdeal, c: usize) -> Result<HomogeneousIdeal, VarietyError> {
    let block: Vec<usize> = (c..3 * c).collect();
    let out = big_ideal.eliminate(&block)?;
    Ok(out.in_ring(s))
}

/// Join of two cones: eliminate `y, z` from `I(y) + J(z) + (χ − y − z)`.
pub fn join(u: &VarietyHandle, v: &VarietyHandle) -> Result<VarietyHandle, VarietyError> {
    check(u, v)?;
    let s = u.ring().clone();
    let c = s.nvars();
    let big = triple_ring(&s);
    let to_y: Vec<usize> = (0..c).map(|i| c + i).collect();
    let to_z: Vec<usize> = (0..c).map(|i| 2 * c + i).collect();
    let mut gens: Vec<Polynomial> = u.ideal.generators().iter().map(|g| g.remap(&big, &to_y)).collect();
    gens.extend(v.ideal.generators().iter().map(|g| g.remap(&big, &to_z)));
    gens.extend(diagonal_relations(&big, c));
    let ideal = eliminate_to(&s, HomogeneousIdeal::new(&big, gens)?, c)?;
    Ok(VarietyHandle::new(ideal))
}

/// The same join computed by substituting `z = χ − y`: eliminate `y` from
/// `I(y) + J(χ − y)`.
pub fn join_by_substitution(u: &VarietyHandle, v: &VarietyHandle) -> Result<VarietyHandle, VarietyError> {
    check(u, v)?;
    let s = u.ring().clone();
    let c = s.nvars();
    let mut names = s.names().to_vec();
    names.extend(fresh_names(&s, "y"));
    let mut weights = s.weights().to_vec();
    weights.extend_from_slice(s.weights());
    let big = PolyRing::new(s.field(), names, weights, MonomialOrder::Grevlex)?;
    let to_y: Vec<usize> = (0..c).map(|i| c + i).collect();
    let images: Vec<Polynomial> = (0..c).map(|i| &big.var(i) - &big.var(c + i)).collect();
    let mut gens: Vec<Polynomial> = u.ideal.generators().iter().map(|g| g.remap(&big, &to_y)).collect();
    gens.extend(v.ideal.generators().iter().map(|g| g.substitute(&big, &images)));
    let block: Vec<usize> = (c..2 * c).collect();
    let ideal = HomogeneousIdeal::new(&big, gens)?.eliminate(&block)?.in_ring(&s);
    Ok(VarietyHandle::new(ideal))
}

/// `Δ^{-1}(K)` for `K ⊆ S^e`: eliminate `y, z` from `K + (χ − y − z)`.
pub fn delta_preimage(s: &Arc<PolyRing>, k: &HomogeneousIdeal) -> Result<HomogeneousIdeal, VarietyError> {
    let c = s.nvars();
    if k.ring().nvars() != 2 * c || k.ring().weights()[..c] != *s.weights() || k.ring().field() != s.field() {
        return Err(VarietyError::AmbientMismatch);
    }
    let big = triple_ring(s);
    let shift: Vec<usize> = (0..2 * c).map(|i| c + i).collect();
    let mut gens: Vec<Polynomial> = k.generators().iter().map(|g| g.remap(&big, &shift)).collect();
    gens.extend(diagonal_relations(&big, c));
    eliminate_to(s, HomogeneousIdeal::new(&big, gens)?, c)
}

/// `I(y) + J(z)` in `S^e`.
pub fn external_sum(u: &VarietyHandle, v: &VarietyHandle) -> Result<HomogeneousIdeal, VarietyError> {
    check(u, v)?;
    let s = u.ring();
    let c = s.nvars();
    let se = enveloping_ring(s);
    let to_y: Vec<usize> = (0..c).collect();
    let to_z: Vec<usize> = (0..c).map(|i| c + i).collect();
    let mut gens: Vec<Polynomial> = u.ideal.generators().iter().map(|g| g.remap(&se, &to_y)).collect();
    gens.extend(v.ideal.generators().iter().map(|g| g.remap(&se, &to_z)));
    Ok(HomogeneousIdeal::new(&se, gens)?)
}

/// `U ⊆ V` iff every generator of `I(V)` lies in `√I(U)`.
pub fn contained_in(u: &VarietyHandle, v: &VarietyHandle) -> Result<bool, VarietyError> {
    check(u, v)?;
    Ok(u.ideal.radical_contains_ideal(&v.ideal))
}

pub fn compare(u: &VarietyHandle, v: &VarietyHandle) -> Result<Comparison, VarietyError> {
    let a = contained_in(u, v)?;
    let b = contained_in(v, u)?;
    Ok(match (a, b) {
        (true, true) => Comparison::Equal,
        (true, false) => Comparison::Subset,
        (false, true) => Comparison::Superset,
        (false, false) => Comparison::Incomparable,
    })
}

pub fn intersection(u: &VarietyHandle, v: &VarietyHandle) -> Result<VarietyHandle, VarietyError> {
    check(u, v)?;
    Ok(VarietyHandle::new(u.ideal.sum(&v.ideal.in_ring(u.ring()))))
}

pub fn union(u: &VarietyHandle, v: &VarietyHandle) -> Result<VarietyHandle, VarietyError> {
    check(u, v)?;
    Ok(VarietyHandle::new(u.ideal.product(&v.ideal.in_ring(u.ring()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Field;

    fn s2(k: Field) -> Arc<PolyRing> {
        PolyRing::cohomological(k, &[1, 1])
    }

    fn v(s: &Arc<PolyRing>, gens: Vec<Polynomial>) -> VarietyHandle {
        VarietyHandle::new(HomogeneousIdeal::new(s, gens).unwrap())
    }

    #[test]
    fn join_examples() {
        let s = s2(Field::Rationals);
        let (x, y) = (s.var(0), s.var(1));
        let j = join(&v(&s, vec![x.clone()]), &v(&s, vec![y.clone()])).unwrap();
        assert!(j.ideal().is_zero());
        assert_eq!(j.proj_dim(), ProjDim::Dim(1));
        let j = join(&v(&s, vec![x.clone()]), &v(&s, vec![x.clone()])).unwrap();
        assert_eq!(compare(&j, &v(&s, vec![x.clone()])).unwrap(), Comparison::Equal);
        let u = v(&s, vec![&x * &y]);
        let jp = join(&u, &VarietyHandle::cone_point(&s)).unwrap();
        assert_eq!(compare(&jp, &u).unwrap(), Comparison::Equal);
        let ju = join(&u, &VarietyHandle::empty(&s)).unwrap();
        assert_eq!(ju.classification(), Classification::Unit);
        let js = join_by_substitution(&v(&s, vec![x.clone()]), &v(&s, vec![y])).unwrap();
        assert!(js.ideal().is_zero());
    }

    #[test]
    fn delta_preimage_examples() {
        let s = s2(Field::Rationals);
        let se = enveloping_ring(&s);
        let k = HomogeneousIdeal::new(&se, vec![se.var(0), se.var(2)]).unwrap();
        let p = delta_preimage(&s, &k).unwrap();
        assert_eq!(p.canonical_generators(), vec![s.var(0)]);
        let k = HomogeneousIdeal::new(&se, vec![se.var(0), se.var(3)]).unwrap();
        assert!(delta_preimage(&s, &k).unwrap().is_zero());
        assert!(delta_preimage(&s, &HomogeneousIdeal::unit(&se)).unwrap().is_unit());
    }

    #[test]
    fn compare_examples() {
        for k in [Field::Rationals, Field::Prime(2)] {
            let s = s2(k);
            let (x, y) = (s.var(0), s.var(1));
            assert_eq!(compare(&v(&s, vec![x.clone()]), &v(&s, vec![x.pow(2)])).unwrap(), Comparison::Equal);
            assert_eq!(compare(&v(&s, vec![x.clone(), y.clone()]), &v(&s, vec![x.clone()])).unwrap(), Comparison::Subset);
            let w = v(&s, vec![&x.pow(2) + &y.pow(2), &x * &y]);
            assert_eq!(w.classification(), Classification::ConePoint);
            assert_eq!(compare(&w, &v(&s, vec![x, y])).unwrap(), Comparison::Equal);
        }
    }

    #[test]
    fn ambient_mismatch() {
        let a = VarietyHandle::everything(&s2(Field::Rationals));
        let b = VarietyHandle::everything(&PolyRing::cohomological(Field::Rationals, &[1, 1, 1]));
        assert!(matches!(join(&a, &b), Err(VarietyError::AmbientMismatch)));
    }
}
