use std::fmt;
use std::sync::{Arc, OnceLock};

use super::groebner::{groebner, reduce_vector, ModuleOrder, SVec};
use super::hilbert::{monomial_numerator, HilbertSeries};
use super::{Monomial, MonomialOrder, PolyError, PolyRing, Polynomial};

pub(crate) fn to_svec(p: &Polynomial, comp: usize) -> SVec {
    p.terms().iter().rev().map(|(m, c)| (comp, m.clone(), c.clone())).collect()
}

pub(crate) fn from_svec(ring: &Arc<PolyRing>, v: &SVec) -> Polynomial {
    Polynomial::from_terms(ring, v.iter().map(|(_, m, c)| (m.clone(), c.clone())).collect())
}

/// An ideal generated by homogeneous polynomials, with a lazily computed
/// reduced Gröbner basis in the ring's own monomial order.
#[derive(Clone)]
pub struct HomogeneousIdeal {
    ring: Arc<PolyRing>,
    gens: Vec<Polynomial>,
    gb: OnceLock<Vec<Polynomial>>,
}

impl fmt::Debug for HomogeneousIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for HomogeneousIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gens.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", g.join(", "))
    }
}

impl HomogeneousIdeal {
    pub fn new(ring: &Arc<PolyRing>, gens: Vec<Polynomial>) -> Result<HomogeneousIdeal, PolyError> {
        for g in &gens {
            if !g.is_homogeneous() {
                return Err(PolyError::Inhomogeneous(g.to_string()));
            }
        }
        Ok(HomogeneousIdeal::unchecked(ring, gens))
    }

    /// Skips the homogeneity check; used for auxiliary computations such as
    /// the Rabinowitsch test.
    pub(crate) fn unchecked(ring: &Arc<PolyRing>, gens: Vec<Polynomial>) -> HomogeneousIdeal {
        let gens = gens.into_iter().filter(|g| !g.is_zero()).map(|g| g.reorder(ring)).collect();
        HomogeneousIdeal { ring: ring.clone(), gens, gb: OnceLock::new() }
    }

    pub fn zero(ring: &Arc<PolyRing>) -> HomogeneousIdeal {
        HomogeneousIdeal::unchecked(ring, Vec::new())
    }

    pub fn unit(ring: &Arc<PolyRing>) -> HomogeneousIdeal {
        HomogeneousIdeal::unchecked(ring, vec![ring.one()])
    }

    /// The irrelevant ideal generated by all variables.
    pub fn irrelevant(ring: &Arc<PolyRing>) -> HomogeneousIdeal {
        HomogeneousIdeal::unchecked(ring, (0..ring.nvars()).map(|i| ring.var(i)).collect())
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn groebner_basis(&self) -> &[Polynomial] {
        self.gb.get_or_init(|| {
            let order = ModuleOrder::ideal(self.ring.order(), self.ring.weights());
            let gb = groebner(self.gens.iter().map(|g| to_svec(g, 0)).collect(), &order);
            gb.iter().map(|v| from_svec(&self.ring, v)).collect()
        })
    }

    /// Reduced Gröbner basis for another order on the same variables.
    pub fn groebner_basis_in(&self, order: MonomialOrder) -> Vec<Polynomial> {
        let r = self.ring.with_order(order);
        let mo = ModuleOrder::ideal(order, self.ring.weights());
        let gb = groebner(self.gens.iter().map(|g| to_svec(&g.reorder(&r), 0)).collect(), &mo);
        gb.iter().map(|v| from_svec(&r, v)).collect()
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        let gb: Vec<SVec> = self.groebner_basis().iter().map(|g| to_svec(g, 0)).collect();
        let order = ModuleOrder::ideal(self.ring.order(), self.ring.weights());
        from_svec(&self.ring, &reduce_vector(to_svec(&f.reorder(&self.ring), 0), &gb, &order))
    }

    pub fn contains(&self, f: &Polynomial) -> bool {
        self.normal_form(f).is_zero()
    }

    pub fn contains_ideal(&self, other: &HomogeneousIdeal) -> bool {
        other.gens.iter().all(|g| self.contains(g))
    }

    pub fn is_unit(&self) -> bool {
        self.groebner_basis().iter().any(|g| g.is_constant())
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn lead_monomials(&self) -> Vec<Monomial> {
        self.groebner_basis().iter().map(|g| g.lead_monomial().unwrap().clone()).collect()
    }

    pub fn sum(&self, other: &HomogeneousIdeal) -> HomogeneousIdeal {
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().map(|p| p.reorder(&self.ring)));
        HomogeneousIdeal::unchecked(&self.ring, g)
    }

    pub fn product(&self, other: &HomogeneousIdeal) -> HomogeneousIdeal {
        let mut g = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                g.push(a * &b.reorder(&self.ring));
            }
        }
        HomogeneousIdeal::unchecked(&self.ring, g)
    }

    /// `I ∩ J`, as the kernel of `S → S/I ⊕ S/J`.
    pub fn intersect(&self, other: &HomogeneousIdeal) -> HomogeneousIdeal {
        let mut gens: Vec<SVec> = Vec::new();
        let mut diag = SVec::new();
        let one = Monomial::one(self.ring.nvars());
        let k = self.ring.field();
        diag.push((2, one.clone(), k.one()));
        diag.push((1, one.clone(), k.one()));
        diag.push((0, one, k.one()));
        gens.push(diag);
        gens.extend(self.gens.iter().map(|g| to_svec(g, 0)));
        gens.extend(other.gens.iter().map(|g| to_svec(&g.reorder(&self.ring), 1)));
        let order = ModuleOrder::top(self.ring.order(), self.ring.weights(), &[0, 0, 0]).with_blocks(vec![0, 0, 1]);
        let gb = groebner(gens, &order);
        let out = gb.iter().filter(|v| v.iter().all(|t| t.0 == 2)).map(|v| from_svec(&self.ring, v)).collect();
        HomogeneousIdeal::unchecked(&self.ring, out)
    }

    /// `I ∩ k[remaining variables]`, returned in a ring on the remaining
    /// variables (original relative order, grevlex).
    pub fn eliminate(&self, block: &[usize]) -> Result<HomogeneousIdeal, PolyError> {
        let n = self.ring.nvars();
        if let Some(&b) = block.iter().find(|&&b| b >= n) {
            return Err(PolyError::BadVariable(b));
        }
        let keep: Vec<usize> = (0..n).filter(|i| !block.contains(i)).collect();
        let mut elim: Vec<usize> = block.to_vec();
        elim.sort_unstable();
        elim.dedup();
        // permute so the eliminated block comes first
        let mut perm = vec![0; n];
        for (pos, &v) in elim.iter().chain(keep.iter()).enumerate() {
            perm[v] = pos;
        }
        let names: Vec<String> = elim.iter().chain(keep.iter()).map(|&v| self.ring.names()[v].clone()).collect();
        let weights: Vec<u32> = elim.iter().chain(keep.iter()).map(|&v| self.ring.weights()[v]).collect();
        let big = PolyRing::new(self.ring.field(), names, weights, MonomialOrder::Block(elim.len()))?;
        let mapped = HomogeneousIdeal::unchecked(&big, self.gens.iter().map(|g| g.remap(&big, &perm)).collect());
        let small = PolyRing::new(
            self.ring.field(),
            keep.iter().map(|&v| self.ring.names()[v].clone()).collect(),
            keep.iter().map(|&v| self.ring.weights()[v]).collect(),
            MonomialOrder::Grevlex,
        )?;
        let m = elim.len();
        let back: Vec<usize> = (0..n).map(|i| i.saturating_sub(m)).collect();
        let out = mapped
            .groebner_basis()
            .iter()
            .filter(|g| g.terms().iter().all(|(mono, _)| mono.exponents()[..m].iter().all(|&e| e == 0)))
            .map(|g| g.remap(&small, &back))
            .collect();
        Ok(HomogeneousIdeal::unchecked(&small, out))
    }

    /// Moves the ideal into an equal ring value (e.g. after elimination).
    pub fn in_ring(&self, ring: &Arc<PolyRing>) -> HomogeneousIdeal {
        assert_eq!(ring.names(), self.ring.names());
        HomogeneousIdeal::unchecked(ring, self.gens.iter().map(|g| g.reorder(ring)).collect())
    }

    /// `f ∈ √I`, decided by `1 ∈ I + (1 - t f)`.
    pub fn radical_contains(&self, f: &Polynomial) -> bool {
        if f.is_zero() || self.contains(f) {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        let n = self.ring.nvars();
        let mut names = self.ring.names().to_vec();
        let mut t = String::from("t");
        while names.contains(&t) {
            t.push('_');
        }
        names.push(t);
        let mut weights = self.ring.weights().to_vec();
        weights.push(1);
        let big = PolyRing::new(self.ring.field(), names, weights, MonomialOrder::Grevlex).expect("fresh variable");
        let emb: Vec<usize> = (0..n).collect();
        let mut gens: Vec<Polynomial> = self.gens.iter().map(|g| g.remap(&big, &emb)).collect();
        let tf = &big.var(n) * &f.remap(&big, &emb);
        gens.push(&big.one() - &tf);
        HomogeneousIdeal::unchecked(&big, gens).is_unit()
    }

    /// `other ⊆ √self`.
    pub fn radical_contains_ideal(&self, other: &HomogeneousIdeal) -> bool {
        other.gens.iter().all(|g| self.radical_contains(g))
    }

    pub fn same_radical(&self, other: &HomogeneousIdeal) -> bool {
        self.radical_contains_ideal(other) && other.radical_contains_ideal(self)
    }

    /// Hilbert series of `S/I`.
    pub fn hilbert_series(&self) -> HilbertSeries {
        HilbertSeries {
            numerator: monomial_numerator(&self.lead_monomials(), self.ring.weights()),
            weights: self.ring.weights().to_vec(),
        }
    }

    /// Canonical generators: the reduced Gröbner basis in grevlex, sorted.
    pub fn canonical_generators(&self) -> Vec<Polynomial> {
        let r = self.ring.with_order(MonomialOrder::Grevlex);
        let mut gb: Vec<Polynomial> = if self.ring.order() == MonomialOrder::Grevlex {
            self.groebner_basis().iter().map(|g| g.reorder(&r)).collect()
        } else {
            self.groebner_basis_in(MonomialOrder::Grevlex)
        };
        super::canonical_sort(&mut gb);
        gb
    }
}
