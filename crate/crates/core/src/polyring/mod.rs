//! Weighted polynomial rings, Gröbner bases, elimination and Hilbert series.

mod groebner;
mod hilbert;
mod ideal;
mod monomial;
mod poly;

use std::sync::Arc;

use thiserror::Error;

use crate::scalars::{Field, Scalar};

pub use groebner::{groebner, reduce_vector, spoly_reduces_to_zero, ModuleOrder, SVec};
pub use hilbert::monomial_numerator;
pub use hilbert::{HilbertSeries, LaurentPoly, ProjDim};
pub use ideal::HomogeneousIdeal;
pub use monomial::{Monomial, MonomialOrder};
pub use poly::{canonical_sort, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable weight must be positive (got {0} for `{1}`)")]
    BadWeight(i64, String),
    #[error("polynomial `{0}` is not homogeneous")]
    Inhomogeneous(String),
    #[error("polynomials live in different rings")]
    RingMismatch,
    #[error("variable index {0} out of range")]
    BadVariable(usize),
    #[error("too many variables ({0})")]
    TooManyVariables(usize),
}

/// A polynomial ring over an exact field with per-variable positive weights.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyRing {
    field: Field,
    names: Vec<String>,
    weights: Vec<u32>,
    order: MonomialOrder,
}

impl PolyRing {
    pub fn new(field: Field, names: Vec<String>, weights: Vec<u32>, order: MonomialOrder) -> Result<Arc<PolyRing>, PolyError> {
        assert_eq!(names.len(), weights.len(), "one weight per variable");
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(PolyError::DuplicateVariable(n.clone()));
            }
        }
        for (n, &w) in names.iter().zip(&weights) {
            if w == 0 {
                return Err(PolyError::BadWeight(0, n.clone()));
            }
        }
        if let MonomialOrder::Block(b) = order {
            if b > names.len() {
                return Err(PolyError::BadVariable(b));
            }
        }
        Ok(Arc::new(PolyRing { field, names, weights, order }))
    }

    /// Standard-graded ring with grevlex order.
    pub fn standard(field: Field, names: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(field, names.iter().map(|s| s.to_string()).collect(), vec![1; names.len()], MonomialOrder::Grevlex)
            .expect("valid ring")
    }

    /// `k[chi1..chic]` with `deg chi_i = |e_i| + 1`.
    pub fn cohomological(field: Field, generator_degrees: &[u32]) -> Arc<PolyRing> {
        let names = (1..=generator_degrees.len()).map(|i| format!("chi{i}")).collect();
        let weights = generator_degrees.iter().map(|d| d + 1).collect();
        PolyRing::new(field, names, weights, MonomialOrder::Grevlex).expect("valid ring")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn with_order(&self, order: MonomialOrder) -> Arc<PolyRing> {
        Arc::new(PolyRing { order, ..self.clone() })
    }

    pub fn zero(self: &Arc<Self>) -> Polynomial {
        Polynomial::zero(self)
    }

    pub fn one(self: &Arc<Self>) -> Polynomial {
        Polynomial::one(self)
    }

    pub fn var(self: &Arc<Self>, i: usize) -> Polynomial {
        Polynomial::var(self, i)
    }

    pub fn constant(self: &Arc<Self>, c: Scalar) -> Polynomial {
        Polynomial::constant(self, c)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> Polynomial {
        Polynomial::constant(self, self.field.from_int(n))
    }

    /// Monomial from exponents, with coefficient one.
    pub fn monomial(self: &Arc<Self>, exps: &[u16]) -> Polynomial {
        Polynomial::term(self, Monomial::from_exponents(exps), self.field.one())
    }

    /// Number of monomials of weighted degree `d`, and the monomials themselves.
    pub fn monomials_of_degree(&self, d: i64) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u16; self.nvars()];
        fn rec(i: usize, left: i64, w: &[u32], cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
            if i == w.len() {
                if left == 0 {
                    out.push(Monomial::from_exponents(cur));
                }
                return;
            }
            let wi = w[i] as i64;
            let mut e = 0;
            while e * wi <= left {
                cur[i] = e as u16;
                rec(i + 1, left - e * wi, w, cur, out);
                e += 1;
            }
            cur[i] = 0;
        }
        if d >= 0 {
            rec(0, d, &self.weights, &mut cur, &mut out);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_validation() {
        let bad = PolyRing::new(Field::Rationals, vec!["x".into(), "x".into()], vec![1, 1], MonomialOrder::Grevlex);
        assert!(matches!(bad, Err(PolyError::DuplicateVariable(_))));
        let zero_w = PolyRing::new(Field::Rationals, vec!["x".into()], vec![0], MonomialOrder::Grevlex);
        assert!(zero_w.is_err());
    }

    #[test]
    fn arithmetic_and_display() {
        let r = PolyRing::standard(Field::Rationals, &["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.to_string(), "x^2 - y^2");
        let q = &(&x * &x) - &(&y * &y);
        assert_eq!(p, q);
        assert!(p.is_homogeneous());
        let inh = &x + &r.one();
        assert!(!inh.is_homogeneous());
        assert_eq!((&p - &q).to_string(), "0");
    }

    #[test]
    fn substitution() {
        let r = PolyRing::standard(Field::Rationals, &["x", "y"]);
        let x = r.var(0);
        let y = r.var(1);
        let p = &x * &y;
        let img = p.substitute(&r, &[&x + &y, y.clone()]);
        assert_eq!(img, &(&x * &y) + &(&y * &y));
        assert_eq!(p.evaluate(&[r.field().from_int(2), r.field().from_int(3)]), r.field().from_int(6));
    }

    #[test]
    fn degree_enumeration() {
        let s = PolyRing::cohomological(Field::Rationals, &[1, 1]);
        assert_eq!(s.monomials_of_degree(4).len(), 3);
        assert_eq!(s.monomials_of_degree(3).len(), 0);
    }
}
