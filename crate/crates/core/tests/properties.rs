use std::collections::HashMap;

use ksv_core::bgg::{self, SupportMode};
use ksv_core::extdg::{self, DgLambdaModule, ExteriorAlgebra};
use ksv_core::linalg::Matrix;
use ksv_core::modengine::{dg_homology, resolve_and_tor};
use ksv_core::polyring::{groebner, spoly_reduces_to_zero, HomogeneousIdeal, ModuleOrder, PolyRing};
use ksv_core::random::{random_dg_module, random_monomial_ideal, random_presented_module};
use ksv_core::varieties::{self, compare, Comparison, VarietyHandle};
use ksv_core::Field;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f5() -> Field {
    Field::Prime(5)
}

#[test]
fn bgg_square_zero_on_random_modules() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..100 {
        let alg = ExteriorAlgebra::koszul(f5(), 2 + i % 2);
        let m = random_dg_module(&mut rng, &alg, 8);
        assert!(bgg::bgg_complex(&m).is_ok(), "{m:?}");
    }
}

#[test]
fn constructors_preserve_validity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..100 {
        let alg = ExteriorAlgebra::koszul(f5(), 2 + i % 2);
        let m = random_dg_module(&mut rng, &alg, 8);
        let n = random_dg_module(&mut rng, &alg, 4);
        assert_eq!(m.dual().validate(), Ok(()));
        assert_eq!(m.hom_into_lambda().validate(), Ok(()));
        let t = m.tensor_k(&n).unwrap();
        assert_eq!(t.validate(), Ok(()));
        assert_eq!(t.dim(), m.dim() * n.dim());
        assert_eq!(t.euler_characteristic(), m.euler_characteristic() * n.euler_characteristic());
        let u = m.low_degree() + 1;
        assert_eq!(m.soft_truncation(u).validate(), Ok(()));
    }
}

#[test]
fn tensor_is_associative_and_unital() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let alg = ExteriorAlgebra::koszul(f5(), 2);
    for _ in 0..20 {
        let a = random_dg_module(&mut rng, &alg, 2);
        let b = random_dg_module(&mut rng, &alg, 2);
        let c = random_dg_module(&mut rng, &alg, 2);
        let left = a.tensor_k(&b).unwrap().tensor_k(&c).unwrap();
        let right = a.tensor_k(&b.tensor_k(&c).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(DgLambdaModule::trivial(&alg).tensor_k(&a).unwrap(), a);
    }
}

#[test]
fn double_dual_is_parity_conjugate() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let alg = ExteriorAlgebra::koszul(f5(), 3);
    for _ in 0..30 {
        let m = random_dg_module(&mut rng, &alg, 8);
        let dd = m.dual().dual();
        let s = Matrix::diagonal(
            alg.field(),
            &m.degrees.iter().map(|d| alg.field().from_int(if d % 2 == 0 { 1 } else { -1 })).collect::<Vec<_>>(),
        );
        assert_eq!(dd.degrees, m.degrees);
        assert_eq!(dd.differential, s.mul(&m.differential).mul(&s));
        for (x, y) in dd.actions.iter().zip(&m.actions) {
            assert_eq!(*x, s.mul(y).mul(&s));
        }
    }
}

#[test]
fn tor_window_independent_of_weight() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let alg = ExteriorAlgebra::koszul(f5(), 2);
    for _ in 0..10 {
        let m = random_dg_module(&mut rng, &alg, 4);
        let n = random_dg_module(&mut rng, &alg, 4);
        let u = 3;
        let w = extdg::tensor_window_weight(&m, &n, u);
        let a = extdg::derived_tensor_window(&m, &n, w, u).unwrap();
        let b = extdg::derived_tensor_window(&m, &n, w + 2, u).unwrap();
        assert_eq!(a.tor_dims, b.tor_dims);
    }
}

#[test]
fn universal_window_resolves() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let alg = ExteriorAlgebra::koszul(f5(), 2);
    for _ in 0..10 {
        let m = random_dg_module(&mut rng, &alg, 4);
        let u = extdg::universal_window(&m, 3);
        assert_eq!(u.module.validate(), Ok(()));
        let top = u.exact_through(&m) as i32 - 1;
        let hu: HashMap<i32, usize> = u.module.homology_dims().into_iter().collect();
        let hm: HashMap<i32, usize> = m.homology_dims().into_iter().collect();
        for d in m.low_degree()..=top {
            assert_eq!(hu.get(&d).copied().unwrap_or(0), hm.get(&d).copied().unwrap_or(0), "degree {d}");
        }
    }
}

#[test]
fn ext_paths_agree_on_random_modules() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..30 {
        let alg = ExteriorAlgebra::koszul(f5(), 2 + i % 2);
        let m = random_dg_module(&mut rng, &alg, 6);
        let hs = bgg::ext_module(&m).unwrap().hilbert_series();
        for (d, n) in extdg::ext_dimensions_linear(&m, 8) {
            assert_eq!(hs.coefficient(d), n as i64, "degree {d} of {m:?}");
        }
    }
}

#[test]
fn contractible_summand_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let alg = ExteriorAlgebra::koszul(f5(), 2);
    let k = alg.field();
    for _ in 0..15 {
        let m = random_dg_module(&mut rng, &alg, 6);
        let mut pair = DgLambdaModule::trivial_of_dim(&alg, &[1, 0]);
        pair.differential.set(1, 0, k.one());
        let big = m.direct_sum(&pair).unwrap();
        let a = bgg::ext_module(&m).unwrap().hilbert_series();
        let b = bgg::ext_module(&big).unwrap().hilbert_series();
        assert_eq!(a.dims(-4, 10), b.dims(-4, 10));
        let sa = bgg::support(&m, SupportMode::D).unwrap();
        let sb = bgg::support(&big, SupportMode::D).unwrap();
        assert_eq!(compare(&sa, &sb).unwrap(), Comparison::Equal);
    }
}

#[test]
fn supports_through_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..40 {
        let alg = ExteriorAlgebra::koszul(f5(), 2 + i % 2);
        let m = random_dg_module(&mut rng, &alg, 8);
        let d = bgg::support(&m, SupportMode::D).unwrap();
        let b_dual = bgg::support(&m.dual(), SupportMode::B).unwrap();
        assert_eq!(d.canonical_generators(), b_dual.canonical_generators());
        if m.total_homology() > 0 {
            let b = bgg::support(&m, SupportMode::B).unwrap();
            assert_eq!(compare(&d, &b).unwrap(), Comparison::Equal);
        }
    }
}

#[test]
fn dg_homology_rank_nullity() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let alg = ExteriorAlgebra::koszul(f5(), 2);
    for _ in 0..10 {
        let m = random_dg_module(&mut rng, &alg, 6);
        let c = bgg::bgg_complex(&m).unwrap();
        let h = dg_homology(&c.free, &c.delta, 1).unwrap();
        // every annihilator generator kills every generator of H
        let ann = h.annihilator();
        for g in ann.generators() {
            for j in 0..h.num_generators() {
                let mut col = vec![h.ring.zero(); h.num_generators()];
                col[j] = g.clone();
                assert!(h.normal_form(&col).iter().all(|p| p.is_zero()));
            }
        }
        // dim H_d = dim F_d − rank δ_d − rank δ_{d−1}, with δ_d: F_d → F_{d+1} expanded over k
        let hs = h.hilbert_series();
        let s = c.free.ring.clone();
        let basis = |d: i64| -> Vec<(usize, ksv_core::polyring::Monomial)> {
            c.free.degrees.iter().enumerate().flat_map(|(j, &g)| s.monomials_of_degree(d - g).into_iter().map(move |m| (j, m))).collect()
        };
        let rank = |d: i64| -> usize {
            let (src, tgt) = (basis(d), basis(d + 1));
            if src.is_empty() || tgt.is_empty() {
                return 0;
            }
            let pos: HashMap<_, _> = tgt.iter().cloned().enumerate().map(|(x, y)| (y, x)).collect();
            let mut mat = Matrix::zeros(s.field(), tgt.len(), src.len());
            for (col, (j, m)) in src.iter().enumerate() {
                for (i, p) in c.delta[*j].iter().enumerate() {
                    for (mono, coeff) in p.terms() {
                        mat.add_to(pos[&(i, mono.mul(m))], col, coeff);
                    }
                }
            }
            mat.rank()
        };
        for d in -4..=10i64 {
            let expected = basis(d).len() as i64 - rank(d) as i64 - rank(d - 1) as i64;
            assert_eq!(hs.coefficient(d), expected, "degree {d}");
        }
    }
}

#[test]
fn tor_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = PolyRing::cohomological(f5(), &[1, 1]);
    for _ in 0..10 {
        let x = random_presented_module(&mut rng, &s);
        let y = random_presented_module(&mut rng, &s);
        let a = resolve_and_tor(&x, &y, 2);
        let b = resolve_and_tor(&y, &x, 2);
        for (p, q) in a.iter().zip(&b) {
            assert_eq!(p.hilbert_series().dims(0, 12), q.hilbert_series().dims(0, 12));
        }
    }
}

#[test]
fn join_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..50 {
        let c = 2 + i % 2;
        let s = PolyRing::cohomological(f5(), &vec![1; c]);
        let u = VarietyHandle::new(random_monomial_ideal(&mut rng, &s, 2, 2));
        let v = VarietyHandle::new(random_monomial_ideal(&mut rng, &s, 2, 2));
        let w = VarietyHandle::new(random_monomial_ideal(&mut rng, &s, 2, 2));
        let uv = varieties::join(&u, &v).unwrap();
        let vu = varieties::join(&v, &u).unwrap();
        assert_eq!(compare(&uv, &vu).unwrap(), Comparison::Equal);
        let sub = varieties::join_by_substitution(&u, &v).unwrap();
        assert_eq!(compare(&uv, &sub).unwrap(), Comparison::Equal);
        if i % 5 == 0 {
            let l = varieties::join(&uv, &w).unwrap();
            let r = varieties::join(&u, &varieties::join(&v, &w).unwrap()).unwrap();
            assert_eq!(compare(&l, &r).unwrap(), Comparison::Equal);
        }
        use ksv_core::varieties::Classification::Unit;
        if u.classification() != Unit && v.classification() != Unit {
            assert!(varieties::contained_in(&u, &uv).unwrap());
            assert!(varieties::contained_in(&v, &uv).unwrap());
        }
        use ksv_core::polyring::ProjDim;
        if let (ProjDim::Dim(a), ProjDim::Dim(b), ProjDim::Dim(j)) = (u.proj_dim(), v.proj_dim(), uv.proj_dim()) {
            assert!(j <= a + b + 1);
        }
    }
}

fn arb_ideal() -> impl Strategy<Value = Vec<Vec<(Vec<u16>, i64)>>> {
    prop::collection::vec(prop::collection::vec((prop::collection::vec(0u16..3, 3), -2i64..3), 1..3), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn buchberger_output_is_reduced(spec in arb_ideal()) {
        let s = PolyRing::standard(f5(), &["a", "b", "c"]);
        // homogenize each polynomial by keeping only its top-degree part
        let polys: Vec<_> = spec.iter().map(|terms| {
            let p = terms.iter().fold(s.zero(), |acc, (e, c)| &acc + &ksv_core::polyring::Polynomial::term(&s, ksv_core::polyring::Monomial::from_exponents(e), s.field().from_int(*c)));
            let top = p.max_degree();
            ksv_core::polyring::Polynomial::from_terms(&s, p.terms().iter().filter(|(m, _)| Some(m.degree() as i64) == top).cloned().collect())
        }).collect();
        let ideal = HomogeneousIdeal::new(&s, polys.clone()).unwrap();
        let gb = ideal.groebner_basis();
        // monic, lead terms pairwise non-dividing, tails irreducible
        for (i, g) in gb.iter().enumerate() {
            prop_assert!(g.lead_coeff().unwrap().is_one());
            for (j, h) in gb.iter().enumerate() {
                if i != j {
                    for (m, _) in h.terms() {
                        prop_assert!(!g.lead_monomial().unwrap().divides(m));
                    }
                }
            }
        }
        for p in &polys {
            prop_assert!(ideal.contains(p));
        }
        let order = ModuleOrder::ideal(s.order(), s.weights());
        let svecs: Vec<_> = gb.iter().map(|g| g.terms().iter().rev().map(|(m, c)| (0usize, m.clone(), c.clone())).collect::<Vec<_>>()).collect();
        prop_assert!(spoly_reduces_to_zero(&svecs, &order));
        prop_assert_eq!(groebner(svecs.clone(), &order).len(), svecs.len());
    }
}
