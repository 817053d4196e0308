//! Hilbert series of quotients by monomial ideals, via the pivot recursion.

use std::collections::BTreeMap;
use std::fmt;

use super::Monomial;

/// A Laurent polynomial in `t` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly(BTreeMap<i64, i64>);

impl LaurentPoly {
    pub fn zero() -> LaurentPoly {
        LaurentPoly(BTreeMap::new())
    }

    pub fn monomial(e: i64, c: i64) -> LaurentPoly {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(e, c);
        }
        LaurentPoly(m)
    }

    pub fn one() -> LaurentPoly {
        LaurentPoly::monomial(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, e: i64) -> i64 {
        self.0.get(&e).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.0.iter().map(|(&e, &c)| (e, c))
    }

    pub fn add_term(&mut self, e: i64, c: i64) {
        if c == 0 {
            return;
        }
        let v = self.0.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(&e);
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, -c);
        }
        out
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (a, x) in self.terms() {
            for (b, y) in other.terms() {
                out.add_term(a + b, x * y);
            }
        }
        out
    }

    pub fn shift(&self, by: i64) -> LaurentPoly {
        LaurentPoly(self.0.iter().map(|(&e, &c)| (e + by, c)).collect())
    }

    /// Multiplicity of `t = 1` as a root.
    fn root_multiplicity_at_one(&self) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lo = *self.0.keys().next().unwrap();
        let hi = *self.0.keys().next_back().unwrap();
        let mut c: Vec<i64> = (lo..=hi).map(|e| self.coeff(e)).collect();
        let mut mult = 0;
        loop {
            if c.iter().sum::<i64>() != 0 {
                return mult;
            }
            // synthetic division by (t - 1), coefficients low to high
            let n = c.len();
            let mut q = vec![0i64; n - 1];
            let mut acc = 0i64;
            for k in (1..n).rev() {
                acc += c[k];
                q[k - 1] = acc;
            }
            c = q;
            mult += 1;
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms() {
            let (sign, abs) = if c < 0 { ("-", -c) } else { ("+", c) };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match e {
                0 => write!(f, "{abs}")?,
                _ => {
                    if abs != 1 {
                        write!(f, "{abs}*")?;
                    }
                    if e == 1 {
                        write!(f, "t")?
                    } else {
                        write!(f, "t^{e}")?
                    }
                }
            }
        }
        Ok(())
    }
}

/// Projective dimension of the support: empty module, finite length (`-1`),
/// or a non-negative dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjDim {
    Empty,
    Dim(i64),
}

impl fmt::Display for ProjDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjDim::Empty => write!(f, "-inf"),
            ProjDim::Dim(d) => write!(f, "{d}"),
        }
    }
}

/// `numerator / prod_i (1 - t^{w_i})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSeries {
    pub numerator: LaurentPoly,
    pub weights: Vec<u32>,
}

impl HilbertSeries {
    /// Dimension of the degree-`d` piece.
    pub fn coefficient(&self, d: i64) -> i64 {
        let lo = self.numerator.0.keys().next().copied().unwrap_or(0);
        if d < lo {
            return 0;
        }
        let span = (d - lo) as usize;
        let mut p = vec![0i64; span + 1];
        p[0] = 1;
        for &w in &self.weights {
            let w = w as usize;
            for k in w..=span {
                p[k] += p[k - w];
            }
        }
        self.numerator.terms().filter(|(e, _)| *e <= d).map(|(e, c)| c * p[(d - e) as usize]).sum()
    }

    /// Dimensions in degrees `lo..=hi`.
    pub fn dims(&self, lo: i64, hi: i64) -> Vec<i64> {
        (lo..=hi).map(|d| self.coefficient(d)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Order of the pole at `t = 1`, i.e. the Krull dimension (zero module: `None`).
    pub fn pole_order(&self) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let m = self.numerator.root_multiplicity_at_one();
        Some(self.weights.len().saturating_sub(m))
    }

    pub fn proj_dim(&self) -> ProjDim {
        match self.pole_order() {
            None => ProjDim::Empty,
            Some(p) => ProjDim::Dim(p as i64 - 1),
        }
    }

    /// Total dimension, if finite.
    pub fn total_dimension(&self) -> Option<i64> {
        match self.pole_order() {
            None => Some(0),
            Some(0) => {
                // numerator / prod(1 - t^w) is a Laurent polynomial; its value at 1 is the length
                let mut q = self.numerator.clone();
                for &w in &self.weights {
                    q = divide_exact(&q, w as i64);
                }
                Some(q.terms().map(|(_, c)| c).sum())
            }
            Some(_) => None,
        }
    }
}

/// Exact division by `1 - t^w`.
fn divide_exact(p: &LaurentPoly, w: i64) -> LaurentPoly {
    // q (1 - t^w) = p, solved from the low end: q_e = p_e + q_{e-w}
    let mut out = LaurentPoly::zero();
    if p.is_zero() {
        return out;
    }
    let lo = *p.0.keys().next().unwrap();
    let hi = *p.0.keys().next_back().unwrap();
    let mut q: BTreeMap<i64, i64> = BTreeMap::new();
    for e in lo..=hi - w {
        let v = p.coeff(e) + q.get(&(e - w)).copied().unwrap_or(0);
        q.insert(e, v);
    }
    for (e, c) in q {
        out.add_term(e, c);
    }
    out
}

fn minimalize(mut gens: Vec<Monomial>) -> Vec<Monomial> {
    gens.sort_by_key(|m| m.degree());
    let mut out: Vec<Monomial> = Vec::new();
    for g in gens {
        if !out.iter().any(|h| h.divides(&g)) {
            out.push(g);
        }
    }
    out
}

/// Numerator `N` with `HS(S/I) = N / prod (1 - t^{w_i})` for the monomial ideal `I`.
pub fn monomial_numerator(gens: &[Monomial], weights: &[u32]) -> LaurentPoly {
    let gens = minimalize(gens.to_vec());
    numerator_rec(gens, weights)
}

fn numerator_rec(gens: Vec<Monomial>, weights: &[u32]) -> LaurentPoly {
    let nonpure: Vec<&Monomial> = gens.iter().filter(|m| m.pure_power().is_none() && !m.is_one()).collect();
    if nonpure.is_empty() {
        let mut acc = LaurentPoly::one();
        for g in &gens {
            acc = acc.mul(&LaurentPoly::one().sub(&LaurentPoly::monomial(g.weighted_degree(weights), 1)));
        }
        return acc;
    }
    let n = weights.len();
    let mut counts = vec![0usize; n];
    for m in &nonpure {
        for (i, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                counts[i] += 1;
            }
        }
    }
    let x = (0..n).max_by_key(|&i| (counts[i], std::cmp::Reverse(i))).unwrap();
    let e = nonpure.iter().map(|m| m.exp(x)).filter(|&e| e > 0).min().unwrap();
    let p = Monomial::var(n, x, e);
    let mut plus = gens.clone();
    plus.push(p.clone());
    let colon: Vec<Monomial> = gens.iter().map(|g| g.colon(&p)).collect();
    let a = numerator_rec(minimalize(plus), weights);
    let b = numerator_rec(minimalize(colon), weights);
    a.add(&b.shift(p.weighted_degree(weights)))
}
