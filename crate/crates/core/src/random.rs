//! Random valid inputs for property tests: DG Λ-modules built as cones of
//! strict maps between small modules, monomial ideals, and cyclic S-modules.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::extdg::{DgLambdaModule, ExteriorAlgebra};
use crate::linalg::Matrix;
use crate::modengine::PresentedModule;
use crate::polyring::{HomogeneousIdeal, Monomial, PolyRing, Polynomial};
use crate::{Field, Scalar};

pub fn random_scalar<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    match field {
        Field::Prime(p) => field.from_int(rng.gen_range(0..p as i64)),
        Field::Rationals => field.from_int(rng.gen_range(-3..=3)),
    }
}

fn random_nonzero<R: Rng>(rng: &mut R, field: Field) -> Scalar {
    loop {
        let s = random_scalar(rng, field);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A small module with zero differential: `k`, `Λ`, or `Λ/(e_i : i ∈ S)`, shifted.
pub fn random_piece<R: Rng>(rng: &mut R, alg: &ExteriorAlgebra, max_dim: usize) -> DgLambdaModule {
    let c = alg.c();
    loop {
        let m = match rng.gen_range(0..3) {
            0 => DgLambdaModule::trivial(alg),
            1 => DgLambdaModule::free(alg),
            _ => {
                let gens: Vec<usize> = (0..c).filter(|_| rng.gen_bool(0.5)).collect();
                DgLambdaModule::cyclic_quotient(alg, &gens)
            }
        };
        if m.dim() <= max_dim {
            let m = if rng.gen_bool(0.3) { m.dual() } else { m };
            return m.shift(rng.gen_range(-2..=2));
        }
    }
}

/// Basis of the degree-0 maps `f: A → B` with `f A_i = B_i f` and `f ∂ = ∂ f`.
pub fn strict_maps(a: &DgLambdaModule, b: &DgLambdaModule) -> Vec<Matrix> {
    let k = a.field();
    let vars: Vec<(usize, usize)> = (0..b.dim())
        .flat_map(|r| (0..a.dim()).map(move |c| (r, c)))
        .filter(|&(r, c)| b.degrees[r] == a.degrees[c])
        .collect();
    if vars.is_empty() {
        return Vec::new();
    }
    let mut rows = Vec::new();
    let ops: Vec<(&Matrix, &Matrix)> =
        std::iter::once((&a.differential, &b.differential)).chain(a.actions.iter().zip(&b.actions)).collect();
    for (oa, ob) in ops {
        for r in 0..b.dim() {
            for c in 0..a.dim() {
                // (f oa − ob f)[r, c]
                let mut row = vec![k.zero(); vars.len()];
                let mut any = false;
                for (x, &(vr, vc)) in vars.iter().enumerate() {
                    if vr == r && !oa.get(vc, c).is_zero() {
                        row[x] = &row[x] + oa.get(vc, c);
                        any = true;
                    }
                    if vc == c && !ob.get(r, vr).is_zero() {
                        row[x] = &row[x] - ob.get(r, vr);
                        any = true;
                    }
                }
                if any {
                    rows.push(row);
                }
            }
        }
    }
    let ns = if rows.is_empty() { Matrix::identity(k, vars.len()) } else { Matrix::from_rows(k, &rows).nullspace() };
    (0..ns.cols())
        .map(|j| {
            let mut f = Matrix::zeros(k, b.dim(), a.dim());
            for (x, &(r, c)) in vars.iter().enumerate() {
                f.set(r, c, ns.get(x, j).clone());
            }
            f
        })
        .collect()
}

/// `Cone(f) = B ⊕ ΣA` with `∂(sa) = f(a) − s∂a`.
pub fn cone(f: &Matrix, a: &DgLambdaModule, b: &DgLambdaModule) -> DgLambdaModule {
    let sa = a.shift(1);
    let mut m = b.direct_sum(&sa).expect("same algebra");
    let nb = b.dim();
    for (r, c, v) in f.nonzero_entries() {
        m.differential.set(r, nb + c, v.clone());
    }
    m
}

/// Conjugates by a random automorphism preserving degrees.
pub fn scramble<R: Rng>(rng: &mut R, m: &DgLambdaModule) -> DgLambdaModule {
    let k = m.field();
    let n = m.dim();
    let p = loop {
        let mut p = Matrix::identity(k, n);
        for r in 0..n {
            for c in 0..n {
                if r != c && m.degrees[r] == m.degrees[c] && rng.gen_bool(0.5) {
                    p.set(r, c, random_scalar(rng, k));
                }
            }
            p.set(r, r, random_nonzero(rng, k));
        }
        if p.rank() == n {
            break p;
        }
    };
    let pinv = p.solve_matrix(&Matrix::identity(k, n)).expect("invertible");
    let conj = |a: &Matrix| p.mul(a).mul(&pinv);
    DgLambdaModule {
        alg: m.alg.clone(),
        degrees: m.degrees.clone(),
        differential: conj(&m.differential),
        actions: m.actions.iter().map(conj).collect(),
    }
}

/// A random valid DG module of dimension at most `max_dim`, often with a
/// nonzero differential.
pub fn random_dg_module<R: Rng>(rng: &mut R, alg: &ExteriorAlgebra, max_dim: usize) -> DgLambdaModule {
    let max_dim = max_dim.max(1);
    loop {
        let a = random_piece(rng, alg, max_dim);
        if a.dim() >= max_dim || rng.gen_bool(0.2) {
            return scramble(rng, &a);
        }
        let b = random_piece(rng, alg, max_dim - a.dim());
        let maps = strict_maps(&b, &a);
        let m = if maps.is_empty() || rng.gen_bool(0.15) {
            a.direct_sum(&b).expect("same algebra")
        } else {
            let mut f = Matrix::zeros(alg.field(), a.dim(), b.dim());
            for g in &maps {
                f = f.add(&g.scale(&random_scalar(rng, alg.field())));
            }
            cone(&f, &b, &a)
        };
        if m.dim() <= max_dim {
            let m = scramble(rng, &m);
            debug_assert!(m.validate().is_ok());
            return m;
        }
    }
}

/// A random monomial ideal with up to `max_gens` generators of degree ≤ `max_deg`.
pub fn random_monomial_ideal<R: Rng>(rng: &mut R, s: &Arc<PolyRing>, max_gens: usize, max_deg: u16) -> HomogeneousIdeal {
    let n = s.nvars();
    let count = rng.gen_range(0..=max_gens);
    let gens = (0..count)
        .map(|_| {
            let mut e = vec![0u16; n];
            let total = rng.gen_range(1..=max_deg);
            for _ in 0..total {
                e[rng.gen_range(0..n)] += 1;
            }
            Polynomial::term(s, Monomial::from_exponents(&e), s.field().one())
        })
        .collect();
    HomogeneousIdeal::new(s, gens).expect("monomials are homogeneous")
}

/// `S/I(−d)` for a random monomial ideal, or a direct sum of two of them.
pub fn random_presented_module<R: Rng>(rng: &mut R, s: &Arc<PolyRing>) -> PresentedModule {
    let parts = rng.gen_range(1..=2);
    let mut degrees = Vec::new();
    let mut blocks = Vec::new();
    for _ in 0..parts {
        let i = random_monomial_ideal(rng, s, 3, 3);
        degrees.push(*[0i64, 0, 2].choose(rng).unwrap());
        blocks.push(i);
    }
    let n = degrees.len();
    let mut rels = Vec::new();
    for (j, i) in blocks.iter().enumerate() {
        for g in i.generators() {
            let mut col = vec![s.zero(); n];
            col[j] = g.clone();
            rels.push(col);
        }
    }
    PresentedModule::new(s, degrees, rels).expect("homogeneous relations")
}
