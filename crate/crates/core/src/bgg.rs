//! The BGG functor: a finite DG Λ-module `M` goes to the free DG `S`-module
//! `S ⊗ M^∨` with differential `1 ⊗ ∂ + Σ χ_i ⊗ e_i`, whose homology is
//! `Ext_Λ(M, k)`.

use std::sync::Arc;

use thiserror::Error;

use crate::extdg::DgLambdaModule;
use crate::modengine::{dg_homology, Column, FreeModule, ModError, PresentedModule};
use crate::polyring::{HomogeneousIdeal, PolyRing, Polynomial};
use crate::varieties::VarietyHandle;
use crate::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BggError {
    /// Only reachable through a sign-convention bug: valid modules give δ² = 0.
    #[error("BGG differential does not square to zero")]
    NotSquareZero,
    #[error("probe undefined: {0}")]
    ProbeUndefined(&'static str),
    #[error(transparent)]
    Module(ModError),
}

impl From<ModError> for BggError {
    fn from(e: ModError) -> Self {
        match e {
            ModError::NotADifferential => BggError::NotSquareZero,
            e => BggError::Module(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SupportMode {
    D,
    B,
}

/// `S ⊗ M^∨` as a free module with a square-zero endomorphism of degree +1.
#[derive(Debug, Clone)]
pub struct BggComplex {
    pub free: FreeModule,
    pub delta: Vec<Column>,
}

/// The cohomology ring `S = k[χ_1..χ_c]` with `deg χ_i = |e_i| + 1`.
pub fn cohomology_ring(m: &DgLambdaModule) -> Arc<PolyRing> {
    PolyRing::cohomological(m.field(), m.alg.generator_degrees())
}

pub fn bgg_complex(m: &DgLambdaModule) -> Result<BggComplex, BggError> {
    bgg_complex_in(&cohomology_ring(m), m)
}

pub fn bgg_complex_in(s: &Arc<PolyRing>, m: &DgLambdaModule) -> Result<BggComplex, BggError> {
    let d = m.dual();
    let n = m.dim();
    let mut delta: Vec<Column> = vec![vec![s.zero(); n]; n];
    for (j, k, v) in d.differential.nonzero_entries() {
        delta[k][j] = &delta[k][j] + &s.constant(v.clone());
    }
    for (i, a) in d.actions.iter().enumerate() {
        let chi = s.var(i);
        for (j, k, v) in a.nonzero_entries() {
            delta[k][j] = &delta[k][j] + &chi.scale(v);
        }
    }
    let free = FreeModule::new(s, m.degrees.iter().map(|&d| d as i64).collect());
    let c = BggComplex { free, delta };
    let sq = crate::modengine::mat_mul(s, &c.delta, &c.delta, n);
    if sq.iter().any(|col| col.iter().any(|p| !p.is_zero())) {
        return Err(BggError::NotSquareZero);
    }
    Ok(c)
}

/// `Ext_Λ(M, k) = H(S ⊗ M^∨)`, minimally presented.
pub fn ext_module(m: &DgLambdaModule) -> Result<PresentedModule, BggError> {
    ext_module_in(&cohomology_ring(m), m)
}

pub fn ext_module_in(s: &Arc<PolyRing>, m: &DgLambdaModule) -> Result<PresentedModule, BggError> {
    let c = bgg_complex_in(s, m)?;
    Ok(dg_homology(&c.free, &c.delta, 1)?)
}

/// Largest degree of a minimal generator of `Ext_Λ(M, k)`; `None` when zero.
pub fn generator_degree_bound(m: &DgLambdaModule) -> Result<Option<i64>, BggError> {
    Ok(ext_module(m)?.generator_degree_bound())
}

/// `V^d(M) = V(ann Ext_Λ(M,k))`; `V^b(M) = V^d(M^∨)`.
pub fn support(m: &DgLambdaModule, mode: SupportMode) -> Result<VarietyHandle, BggError> {
    support_in(&cohomology_ring(m), m, mode)
}

pub fn support_in(s: &Arc<PolyRing>, m: &DgLambdaModule, mode: SupportMode) -> Result<VarietyHandle, BggError> {
    let target = match mode {
        SupportMode::D => m.clone(),
        SupportMode::B => m.dual(),
    };
    let ext = ext_module_in(s, &target)?;
    Ok(VarietyHandle::new(ext.annihilator()))
}

/// Rank-variety test: `M` is not free over `k[e_a]`, i.e.
/// `rank(Σ a_i e_i) < dim M / 2`.
pub fn point_probe(m: &DgLambdaModule, a: &[Scalar]) -> Result<bool, BggError> {
    if !m.has_zero_differential() {
        return Err(BggError::ProbeUndefined("nonzero differential"));
    }
    if m.alg.generator_degrees().iter().any(|&d| d != 1) {
        return Err(BggError::ProbeUndefined("generators must have degree one"));
    }
    if a.len() != m.alg.c() || a.iter().all(|x| x.is_zero()) {
        return Err(BggError::ProbeUndefined("point must be nonzero with one coordinate per generator"));
    }
    let mut ea = crate::linalg::Matrix::zeros(m.field(), m.dim(), m.dim());
    for (x, act) in a.iter().zip(&m.actions) {
        ea = ea.add(&act.scale(x));
    }
    Ok(2 * ea.rank() < m.dim())
}

/// Whether the point `a` lies in `V(I)`.
pub fn point_in(ideal: &HomogeneousIdeal, a: &[Scalar]) -> bool {
    ideal.generators().iter().all(|g: &Polynomial| g.evaluate(a).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extdg::{ext_dimensions_linear, ExteriorAlgebra};
    use crate::polyring::ProjDim;
    use crate::varieties::{compare, Classification, Comparison};
    use crate::Field;

    fn alg() -> ExteriorAlgebra {
        ExteriorAlgebra::koszul(Field::Prime(5), 2)
    }

    #[test]
    fn complexes() {
        let a = alg();
        let k = bgg_complex(&DgLambdaModule::trivial(&a)).unwrap();
        assert_eq!(k.free.rank(), 1);
        assert!(k.delta[0][0].is_zero());
        let q = bgg_complex(&DgLambdaModule::cyclic_quotient(&a, &[0])).unwrap();
        let nz: Vec<String> = q.delta.iter().flatten().filter(|p| !p.is_zero()).map(|p| p.to_string()).collect();
        assert_eq!(nz.len(), 1);
        assert!(nz[0].ends_with("chi2"));
        let f = bgg_complex(&DgLambdaModule::free(&a)).unwrap();
        assert_eq!(f.delta.iter().flatten().filter(|p| !p.is_zero()).count(), 4);
    }

    #[test]
    fn ext_modules() {
        let a = alg();
        let k = ext_module(&DgLambdaModule::trivial(&a)).unwrap();
        assert_eq!(k.hilbert_series().dims(0, 6), vec![1, 0, 2, 0, 3, 0, 4]);
        assert_eq!(k.generator_degree_bound(), Some(0));
        let f = ext_module(&DgLambdaModule::free(&a)).unwrap();
        assert_eq!(f.hilbert_series().total_dimension(), Some(1));
        assert_eq!(f.generator_degree_bound(), Some(0));
        let q = ext_module(&DgLambdaModule::cyclic_quotient(&a, &[0])).unwrap();
        assert_eq!(q.hilbert_series().dims(0, 6), vec![1, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn supports() {
        let a = alg();
        let s = support(&DgLambdaModule::trivial(&a), SupportMode::D).unwrap();
        assert_eq!(s.proj_dim(), ProjDim::Dim(1));
        let s = support(&DgLambdaModule::free(&a), SupportMode::D).unwrap();
        assert_eq!(s.classification(), Classification::ConePoint);
        let q = DgLambdaModule::cyclic_quotient(&a, &[0]);
        let s = support(&q, SupportMode::D).unwrap();
        let chi2 = VarietyHandle::new(HomogeneousIdeal::new(s.ring(), vec![s.ring().var(1)]).unwrap());
        assert_eq!(compare(&s, &chi2).unwrap(), Comparison::Equal);
        let b = support(&q, SupportMode::B).unwrap();
        assert_eq!(compare(&s, &b).unwrap(), Comparison::Equal);
    }

    #[test]
    fn probes() {
        let a = alg();
        let k = a.field();
        let p = |x: i64, y: i64| vec![k.from_int(x), k.from_int(y)];
        assert!(point_probe(&DgLambdaModule::trivial(&a), &p(1, 3)).unwrap());
        assert!(!point_probe(&DgLambdaModule::free(&a), &p(1, 3)).unwrap());
        let q = DgLambdaModule::cyclic_quotient(&a, &[0]);
        assert!(point_probe(&q, &p(1, 0)).unwrap());
        assert!(!point_probe(&q, &p(0, 1)).unwrap());
    }

    #[test]
    fn two_ext_paths_agree() {
        let a = alg();
        for m in [DgLambdaModule::trivial(&a), DgLambdaModule::free(&a), DgLambdaModule::cyclic_quotient(&a, &[1])] {
            let hs = ext_module(&m).unwrap().hilbert_series();
            for (d, n) in ext_dimensions_linear(&m, 10) {
                assert_eq!(hs.coefficient(d), n as i64, "degree {d}");
            }
        }
    }
}
