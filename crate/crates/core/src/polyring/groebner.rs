//! Buchberger's algorithm for submodules of free modules over a polynomial
//! ring (ideals are the rank-one case).
//!
//! Vectors are sparse lists of `(component, monomial, coefficient)` sorted
//! ascending in the module order, so the lead term is the *last* entry.

use std::cmp::Ordering;

use super::{Monomial, MonomialOrder};
use crate::scalars::Scalar;

pub type SVec = Vec<(usize, Monomial, Scalar)>;

/// A module monomial order. Components carry a block number (smaller blocks
/// dominate) which makes elimination of components possible; within a block
/// the order is term-over-position (default) or position-over-term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleOrder {
    pub mono: MonomialOrder,
    pub pot: bool,
    /// Block number per component; missing entries mean block 0.
    pub blocks: Vec<u8>,
    /// Degree of each component, used only for the sugar heuristic.
    pub comp_degrees: Vec<i64>,
    /// Variable weights, used only for the sugar heuristic.
    pub weights: Vec<u32>,
    /// Total number of components; one means the ideal case.
    pub ncomps: usize,
}

impl ModuleOrder {
    pub fn ideal(mono: MonomialOrder, weights: &[u32]) -> ModuleOrder {
        ModuleOrder { mono, pot: false, blocks: Vec::new(), comp_degrees: Vec::new(), weights: weights.to_vec(), ncomps: 1 }
    }

    pub fn top(mono: MonomialOrder, weights: &[u32], comp_degrees: &[i64]) -> ModuleOrder {
        ModuleOrder {
            mono,
            pot: false,
            blocks: Vec::new(),
            comp_degrees: comp_degrees.to_vec(),
            weights: weights.to_vec(),
            ncomps: comp_degrees.len(),
        }
    }

    pub fn with_blocks(mut self, blocks: Vec<u8>) -> ModuleOrder {
        self.blocks = blocks;
        self
    }

    fn block(&self, c: usize) -> u8 {
        self.blocks.get(c).copied().unwrap_or(0)
    }

    pub fn cmp(&self, ca: usize, ma: &Monomial, cb: usize, mb: &Monomial) -> Ordering {
        match self.block(cb).cmp(&self.block(ca)) {
            Ordering::Equal => {}
            o => return o,
        }
        if self.pot {
            cb.cmp(&ca).then_with(|| self.mono.cmp(ma, mb))
        } else {
            self.mono.cmp(ma, mb).then_with(|| cb.cmp(&ca))
        }
    }

    fn sugar_of(&self, v: &SVec) -> i64 {
        v.iter()
            .map(|(c, m, _)| m.weighted_degree(&self.weights) + self.comp_degrees.get(*c).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Sorts and merges an arbitrary term list into a valid vector.
    pub fn normalize(&self, mut v: SVec) -> SVec {
        v.sort_by(|a, b| self.cmp(a.0, &a.1, b.0, &b.1));
        let mut out: SVec = Vec::with_capacity(v.len());
        for (c, m, s) in v {
            match out.last_mut() {
                Some((lc, lm, ls)) if *lc == c && *lm == m => *ls = &*ls + &s,
                _ => out.push((c, m, s)),
            }
        }
        out.retain(|t| !t.2.is_zero());
        out
    }
}

/// `p - coef * mono * g`, both ascending; the result is ascending.
fn sub_scaled(order: &ModuleOrder, p: &SVec, g: &SVec, mono: &Monomial, coef: &Scalar) -> SVec {
    let mut out = Vec::with_capacity(p.len() + g.len());
    let mut i = 0;
    let mut j = 0;
    let mut gt: Option<(usize, Monomial, Scalar)> = None;
    let next_g = |j: usize| -> Option<(usize, Monomial, Scalar)> {
        g.get(j).map(|(c, m, s)| (*c, m.mul(mono), s * coef))
    };
    if j < g.len() {
        gt = next_g(j);
    }
    while i < p.len() || gt.is_some() {
        match (&p.get(i), &gt) {
            (Some(a), Some(b)) => match order.cmp(a.0, &a.1, b.0, &b.1) {
                Ordering::Less => {
                    out.push((*a).clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let (c, m, s) = gt.take().unwrap();
                    out.push((c, m, -s));
                    j += 1;
                    gt = next_g(j);
                }
                Ordering::Equal => {
                    let s = &a.2 - &b.2;
                    if !s.is_zero() {
                        out.push((a.0, a.1.clone(), s));
                    }
                    i += 1;
                    j += 1;
                    gt = next_g(j);
                }
            },
            (Some(a), None) => {
                out.push((*a).clone());
                i += 1;
            }
            (None, Some(_)) => {
                let (c, m, s) = gt.take().unwrap();
                out.push((c, m, -s));
                j += 1;
                gt = next_g(j);
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

fn make_monic(v: &mut SVec) {
    if let Some((_, _, c)) = v.last() {
        if !c.is_one() {
            let inv = c.inv().expect("nonzero lead");
            for t in v.iter_mut() {
                t.2 = &t.2 * &inv;
            }
        }
    }
}

struct Reducers<'a> {
    polys: &'a [SVec],
    by_comp: Vec<Vec<usize>>,
}

impl<'a> Reducers<'a> {
    fn new(polys: &'a [SVec], active: impl Iterator<Item = usize>, ncomps: usize) -> Reducers<'a> {
        let mut by_comp = vec![Vec::new(); ncomps.max(1)];
        for i in active {
            let (c, _, _) = polys[i].last().expect("nonzero");
            if *c >= by_comp.len() {
                by_comp.resize(*c + 1, Vec::new());
            }
            by_comp[*c].push(i);
        }
        Reducers { polys, by_comp }
    }

    fn find(&self, comp: usize, m: &Monomial, skip: Option<usize>) -> Option<usize> {
        self.by_comp.get(comp)?.iter().copied().find(|&i| Some(i) != skip && self.polys[i].last().unwrap().1.divides(m))
    }
}

fn reduce_with(order: &ModuleOrder, mut p: SVec, red: &Reducers<'_>, full: bool, skip: Option<usize>) -> SVec {
    let mut done: SVec = Vec::new();
    while let Some((comp, m, c)) = p.last().cloned() {
        if let Some(gi) = red.find(comp, &m, skip) {
            let g = &red.polys[gi];
            let (_, gm, gc) = g.last().unwrap();
            let q = gm.quotient_of(&m);
            let coef = c.checked_div(gc).expect("nonzero lead");
            p = sub_scaled(order, &p, g, &q, &coef);
        } else if full {
            done.push(p.pop().unwrap());
        } else {
            return p;
        }
    }
    done.reverse();
    done
}

/// Fully reduces `p` modulo a Gröbner basis computed for `order`.
pub fn reduce_vector(p: SVec, basis: &[SVec], order: &ModuleOrder) -> SVec {
    let red = Reducers::new(basis, 0..basis.len(), order.ncomps);
    reduce_with(order, p, &red, true, None)
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    comp: usize,
    sugar: i64,
}

struct Engine<'o> {
    order: &'o ModuleOrder,
    polys: Vec<SVec>,
    sugar: Vec<i64>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
}

impl<'o> Engine<'o> {
    fn lead(&self, i: usize) -> (usize, &Monomial) {
        let t = self.polys[i].last().unwrap();
        (t.0, &t.1)
    }

    fn reducers(&self) -> Reducers<'_> {
        Reducers::new(&self.polys, (0..self.polys.len()).filter(|&i| self.active[i]), self.order.ncomps)
    }

    fn pair_sugar(&self, i: usize, j: usize, lcm: &Monomial) -> i64 {
        let w = &self.order.weights;
        let d = lcm.weighted_degree(w);
        let si = self.sugar[i] + d - self.lead(i).1.weighted_degree(w);
        let sj = self.sugar[j] + d - self.lead(j).1.weighted_degree(w);
        si.max(sj)
    }

    fn update(&mut self, h: usize) {
        let ideal_case = self.order.ncomps <= 1;
        let (hc, hm) = {
            let (c, m) = self.lead(h);
            (c, m.clone())
        };
        let mut cands: Vec<(usize, Monomial, bool)> = (0..self.polys.len())
            .filter(|&g| g != h && self.active[g] && self.lead(g).0 == hc)
            .map(|g| {
                let gm = self.lead(g).1;
                (g, hm.lcm(gm), ideal_case && hm.is_coprime(gm))
            })
            .collect();
        let mut kept: Vec<(usize, Monomial, bool)> = Vec::new();
        while let Some((g1, l1, coprime)) = cands.pop() {
            let dominated = cands.iter().chain(kept.iter()).any(|(_, l2, _)| l2.divides(&l1));
            if coprime || !dominated {
                kept.push((g1, l1, coprime));
            }
        }
        let polys = &self.polys;
        self.pairs.retain(|p| {
            if p.comp != hc || !hm.divides(&p.lcm) {
                return true;
            }
            let li = hm.lcm(&polys[p.i].last().unwrap().1);
            let lj = hm.lcm(&polys[p.j].last().unwrap().1);
            li == p.lcm || lj == p.lcm
        });
        for (g, l, coprime) in kept {
            if coprime {
                continue;
            }
            let sugar = self.pair_sugar(h, g, &l);
            self.pairs.push(Pair { i: g, j: h, lcm: l, comp: hc, sugar });
        }
        for g in 0..self.polys.len() {
            if g != h && self.active[g] {
                let (gc, gm) = self.lead(g);
                if gc == hc && hm.divides(gm) {
                    self.active[g] = false;
                }
            }
        }
    }

    fn insert(&mut self, mut v: SVec, sugar: i64) {
        make_monic(&mut v);
        self.polys.push(v);
        self.sugar.push(sugar);
        self.active.push(true);
        let h = self.polys.len() - 1;
        self.update(h);
    }

    fn spoly(&self, p: &Pair) -> SVec {
        let (_, mi, ci) = self.polys[p.i].last().unwrap();
        let (_, mj, cj) = self.polys[p.j].last().unwrap();
        let qi = mi.quotient_of(&p.lcm);
        let qj = mj.quotient_of(&p.lcm);
        // leads are monic, but be safe
        let a: SVec = self.polys[p.i].iter().map(|(c, m, s)| (*c, m.mul(&qi), s.checked_div(ci).unwrap())).collect();
        let coef = cj.inv().unwrap();
        let mut s = sub_scaled(self.order, &a, &self.polys[p.j], &qj, &coef);
        // the leads cancel exactly; drop a stray zero if any
        s.retain(|t| !t.2.is_zero());
        s
    }
}

/// Computes the reduced Gröbner basis of the submodule generated by `gens`.
/// The result is sorted ascending by lead term and every element is monic.
pub fn groebner(gens: Vec<SVec>, order: &ModuleOrder) -> Vec<SVec> {
    let mut eng = Engine { order, polys: Vec::new(), sugar: Vec::new(), active: Vec::new(), pairs: Vec::new() };
    let mut input: Vec<(i64, SVec)> =
        gens.into_iter().filter(|v| !v.is_empty()).map(|v| (order.sugar_of(&v), v)).collect();
    input.sort_by(|a, b| {
        a.0.cmp(&b.0).then_with(|| {
            let (x, y) = (a.1.last().unwrap(), b.1.last().unwrap());
            order.cmp(x.0, &x.1, y.0, &y.1)
        })
    });
    let mut input = input.into_iter();
    loop {
        // interleave inputs by sugar with pending pairs
        let next_pair = eng
            .pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.sugar.cmp(&b.sugar).then_with(|| order.mono.cmp(&a.lcm, &b.lcm)))
            .map(|(k, p)| (k, p.sugar));
        let peek_input = input.as_slice().first().map(|(s, _)| *s);
        let (v, sugar) = match (next_pair, peek_input) {
            (None, None) => break,
            (Some((_, ps)), Some(is)) if is <= ps => input.next().map(|(s, v)| (v, s)).unwrap(),
            (None, Some(_)) => input.next().map(|(s, v)| (v, s)).unwrap(),
            (Some((k, _)), _) => {
                let p = eng.pairs.swap_remove(k);
                (eng.spoly(&p), p.sugar)
            }
        };
        let r = {
            let red = eng.reducers();
            reduce_with(order, v, &red, true, None)
        };
        if !r.is_empty() {
            let s = sugar.max(order.sugar_of(&r));
            eng.insert(r, s);
        }
    }
    // inter-reduce the minimal basis
    let act: Vec<usize> = (0..eng.polys.len()).filter(|&i| eng.active[i]).collect();
    let red = Reducers::new(&eng.polys, act.iter().copied(), order.ncomps);
    let mut out: Vec<SVec> = act
        .iter()
        .map(|&i| {
            let mut v = reduce_with(order, eng.polys[i].clone(), &red, true, Some(i));
            make_monic(&mut v);
            v
        })
        .collect();
    out.sort_by(|a, b| {
        let (x, y) = (a.last().unwrap(), b.last().unwrap());
        order.cmp(x.0, &x.1, y.0, &y.1)
    });
    out
}

/// Buchberger's criterion: every S-vector of `basis` reduces to zero.
pub fn spoly_reduces_to_zero(basis: &[SVec], order: &ModuleOrder) -> bool {
    let red = Reducers::new(basis, 0..basis.len(), order.ncomps);
    for i in 0..basis.len() {
        for j in (i + 1)..basis.len() {
            let (ci, mi, ai) = basis[i].last().unwrap();
            let (cj, mj, aj) = basis[j].last().unwrap();
            if ci != cj {
                continue;
            }
            let l = mi.lcm(mj);
            let a: SVec =
                basis[i].iter().map(|(c, m, s)| (*c, m.mul(&mi.quotient_of(&l)), s.checked_div(ai).unwrap())).collect();
            let s = sub_scaled(order, &a, &basis[j], &mj.quotient_of(&l), &aj.inv().unwrap());
            if !reduce_with(order, s, &red, true, None).is_empty() {
                return false;
            }
        }
    }
    true
}
