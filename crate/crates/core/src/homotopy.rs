//! Homotopy type of finite spaces.
//!
//! Two finite spaces are homotopy equivalent exactly when their cores are
//! isomorphic, so [`are_homotopy_equivalent`] reduces both sides and runs an
//! isomorphism search. [`brute_force_homotopy_equivalent`] decides the same
//! question from the definition and exists to cross-check it.

use std::collections::{BTreeMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::maps::{enumerate_monotone, FunctionPoset, MonotoneMap};
use crate::poset::Poset;
use crate::reduction::{core, Core, RemovalPolicy};

/// An order isomorphism, `mapping[x]` being the image of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoWitness {
    pub mapping: Vec<usize>,
}

impl IsoWitness {
    /// Bijective, and `x <= y` iff `f(x) <= f(y)`.
    pub fn is_valid(&self, p: &Poset, q: &Poset) -> bool {
        let n = p.len();
        if q.len() != n || self.mapping.len() != n {
            return false;
        }
        let mut hit = vec![false; n];
        for &v in &self.mapping {
            if v >= n || hit[v] {
                return false;
            }
            hit[v] = true;
        }
        (0..n).all(|x| (0..n).all(|y| p.leq(x, y) == q.leq(self.mapping[x], self.mapping[y])))
    }
}

struct Refiner {
    table: BTreeMap<Vec<u64>, u64>,
}

impl Refiner {
    fn intern(&mut self, sig: Vec<u64>) -> u64 {
        let next = self.table.len() as u64;
        *self.table.entry(sig).or_insert(next)
    }

    fn initial(&mut self, p: &Poset, base: Option<usize>) -> Vec<u64> {
        let heights = chain_lengths(p, false);
        let depths = chain_lengths(p, true);
        (0..p.len())
            .map(|x| {
                let sig = vec![
                    p.down_set(x).count_ones(..) as u64,
                    p.up_set(x).count_ones(..) as u64,
                    p.lower_covers(x).len() as u64,
                    p.upper_covers(x).len() as u64,
                    heights[x] as u64,
                    depths[x] as u64,
                    u64::from(Some(x) == base),
                ];
                self.intern(sig)
            })
            .collect()
    }

    fn step(&mut self, p: &Poset, colours: &[u64]) -> Vec<u64> {
        (0..p.len())
            .map(|x| {
                let mut below: Vec<u64> = p
                    .down_set(x)
                    .ones()
                    .filter(|&y| y != x)
                    .map(|y| colours[y])
                    .collect();
                let mut above: Vec<u64> = p
                    .up_set(x)
                    .ones()
                    .filter(|&y| y != x)
                    .map(|y| colours[y])
                    .collect();
                below.sort_unstable();
                above.sort_unstable();
                let mut sig = vec![colours[x], u64::MAX];
                sig.extend(below);
                sig.push(u64::MAX);
                sig.extend(above);
                self.intern(sig)
            })
            .collect()
    }
}

/// Longest chain (in steps) ending at each element, or starting at it when
/// `from_top`.
fn chain_lengths(p: &Poset, from_top: bool) -> Vec<usize> {
    let n = p.len();
    let mut order: Vec<usize> = (0..n).collect();
    if from_top {
        order.sort_by_key(|&x| p.up_set(x).count_ones(..));
    } else {
        order.sort_by_key(|&x| p.down_set(x).count_ones(..));
    }
    let mut best = vec![0usize; n];
    for &x in &order {
        let rel = if from_top { p.up_set(x) } else { p.down_set(x) };
        for y in rel.ones() {
            if y != x {
                best[x] = best[x].max(best[y] + 1);
            }
        }
    }
    best
}

fn count_colours(c: &[u64]) -> BTreeMap<u64, usize> {
    let mut m = BTreeMap::new();
    for &v in c {
        *m.entry(v).or_insert(0) += 1;
    }
    m
}

/// Order isomorphism between `p` and `q`, if one exists.
pub fn are_isomorphic(p: &Poset, q: &Poset) -> Option<IsoWitness> {
    isomorphism(p, None, q, None)
}

/// Isomorphism sending basepoint to basepoint.
pub fn are_isomorphic_pointed(p: &Poset, bp: usize, q: &Poset, bq: usize) -> Option<IsoWitness> {
    isomorphism(p, Some(bp), q, Some(bq))
}

fn isomorphism(p: &Poset, bp: Option<usize>, q: &Poset, bq: Option<usize>) -> Option<IsoWitness> {
    let n = p.len();
    if q.len() != n || p.covers().len() != q.covers().len() {
        return None;
    }
    let mut r = Refiner {
        table: BTreeMap::new(),
    };
    let mut cp = r.initial(p, bp);
    let mut cq = r.initial(q, bq);
    loop {
        if count_colours(&cp) != count_colours(&cq) {
            return None;
        }
        let classes = count_colours(&cp).len();
        let np = r.step(p, &cp);
        let nq = r.step(q, &cq);
        cp = np;
        cq = nq;
        if count_colours(&cp).len() == classes {
            if count_colours(&cp) != count_colours(&cq) {
                return None;
            }
            break;
        }
    }
    // Most constrained elements first.
    let sizes = count_colours(&cp);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| (sizes[&cp[x]], x));

    struct Search<'s> {
        p: &'s Poset,
        q: &'s Poset,
        cp: &'s [u64],
        cq: &'s [u64],
        order: &'s [usize],
        mapping: Vec<usize>,
        used: Vec<bool>,
    }
    impl Search<'_> {
        fn go(&mut self, k: usize) -> bool {
            if k == self.order.len() {
                return true;
            }
            let x = self.order[k];
            for v in 0..self.q.len() {
                if self.used[v] || self.cq[v] != self.cp[x] {
                    continue;
                }
                let consistent = self.order[..k].iter().all(|&z| {
                    let fz = self.mapping[z];
                    self.p.leq(z, x) == self.q.leq(fz, v) && self.p.leq(x, z) == self.q.leq(v, fz)
                });
                if !consistent {
                    continue;
                }
                self.mapping[x] = v;
                self.used[v] = true;
                if self.go(k + 1) {
                    return true;
                }
                self.used[v] = false;
            }
            false
        }
    }
    let mut s = Search {
        p,
        q,
        cp: &cp,
        cq: &cq,
        order: &order,
        mapping: vec![usize::MAX; n],
        used: vec![false; n],
    };
    if !s.go(0) {
        return None;
    }
    let w = IsoWitness { mapping: s.mapping };
    assert!(
        w.is_valid(p, q),
        "isomorphism search produced an invalid witness"
    );
    if let (Some(a), Some(b)) = (bp, bq) {
        assert_eq!(w.mapping[a], b);
    }
    Some(w)
}

/// Evidence for a homotopy-equivalence decision.
#[derive(Debug, Clone)]
pub struct EquivalenceEvidence {
    pub equivalent: bool,
    pub core_p: Core,
    pub core_q: Core,
    /// Isomorphism between the two cores when they match.
    pub iso: Option<IsoWitness>,
}

/// `P ≃ Q` iff their cores are isomorphic; with basepoints, pointed cores
/// and basepoint-preserving isomorphisms are used.
pub fn are_homotopy_equivalent(
    p: &Poset,
    bp: Option<usize>,
    q: &Poset,
    bq: Option<usize>,
) -> EquivalenceEvidence {
    let core_p = core(p, bp, RemovalPolicy::default());
    let core_q = core(q, bq, RemovalPolicy::default());
    let iso = match (core_p.basepoint, core_q.basepoint) {
        (Some(a), Some(b)) => are_isomorphic_pointed(&core_p.poset, a, &core_q.poset, b),
        _ => are_isomorphic(&core_p.poset, &core_q.poset),
    };
    EquivalenceEvidence {
        equivalent: iso.is_some(),
        core_p,
        core_q,
        iso,
    }
}

/// Dense table over all functions `X -> Y` (mixed-radix codes) giving the
/// homotopy class of each monotone one.
struct ClassTable {
    radix: usize,
    class: Vec<u32>,
    classes: usize,
}

impl ClassTable {
    fn build(c: &FunctionPoset<'_>) -> Self {
        let radix = c.codomain().len();
        let total = radix.pow(c.domain().len() as u32);
        let mut class = vec![u32::MAX; total];
        let ids = c.class_ids();
        for (i, m) in c.maps().iter().enumerate() {
            class[encode(m.values(), radix)] = ids[i] as u32;
        }
        ClassTable {
            radix,
            class,
            classes: ids.iter().map(|&k| k + 1).max().unwrap_or(0),
        }
    }
}

fn encode(values: &[usize], radix: usize) -> usize {
    values.iter().fold(0, |acc, &v| acc * radix + v)
}

/// One map per homotopy class.
fn class_representatives(c: &FunctionPoset<'_>) -> Vec<Vec<usize>> {
    let mut seen = vec![false; c.maps().len()];
    let mut reps = Vec::new();
    for (i, k) in c.class_ids().into_iter().enumerate() {
        if !std::mem::replace(&mut seen[k], true) {
            reps.push(c.map(i).values().to_vec());
        }
    }
    reps
}

/// Searches for `f: P -> Q`, `g: Q -> P` with `g∘f ≃ id_P` and `f∘g ≃ id_Q`,
/// where `≃` is connection by a comparability chain in `C(P,P)` or `C(Q,Q)`.
///
/// Since composition preserves comparability, one map per homotopy class
/// of `C(P,Q)` and `C(Q,P)` suffices.
pub fn brute_force_homotopy_equivalent(p: &Poset, q: &Poset, limits: &Limits) -> Result<bool> {
    let dense_guard = |base: usize, exp: usize| -> Result<()> {
        let total = (base as u128).checked_pow(exp as u32).unwrap_or(u128::MAX);
        if total > limits.max_maps as u128 * 64 {
            return Err(Error::GuardExceeded {
                what: "function table size",
                count: total,
                limit: limits.max_maps as u128 * 64,
            });
        }
        Ok(())
    };
    dense_guard(p.len(), p.len())?;
    dense_guard(q.len(), q.len())?;
    let cpq = enumerate_monotone(p, q, limits)?;
    let cqp = enumerate_monotone(q, p, limits)?;
    let cpp = enumerate_monotone(p, p, limits)?;
    let cqq = enumerate_monotone(q, q, limits)?;
    let tp = ClassTable::build(&cpp);
    let tq = ClassTable::build(&cqq);
    let id_p = tp.class[encode(MonotoneMap::identity(p).values(), tp.radix)];
    let id_q = tq.class[encode(MonotoneMap::identity(q).values(), tq.radix)];
    debug_assert!(tp.classes > 0 || p.is_empty());

    let fs = class_representatives(&cpq);
    let gs = class_representatives(&cqp);
    let pairs = fs.len() as u128 * gs.len() as u128;
    if pairs > limits.max_oracle_pairs {
        return Err(Error::GuardExceeded {
            what: "oracle class pairs",
            count: pairs,
            limit: limits.max_oracle_pairs,
        });
    }
    // f∘g only depends on (f, g); g∘f likewise. Check the cheaper side first.
    let mut gf = vec![0usize; p.len()];
    let mut fg = vec![0usize; q.len()];
    for f in &fs {
        for g in &gs {
            for x in 0..p.len() {
                gf[x] = g[f[x]];
            }
            if tp.class[encode(&gf, tp.radix)] != id_p {
                continue;
            }
            for y in 0..q.len() {
                fg[y] = f[g[y]];
            }
            if tq.class[encode(&fg, tq.radix)] == id_q {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// The core is a single point. The empty poset is not contractible.
pub fn is_contractible(p: &Poset) -> bool {
    core(p, None, RemovalPolicy::default()).poset.len() == 1
}

fn height_at_most_one(p: &Poset) -> Result<()> {
    match p.height() {
        Ok(h) if h > 1 => Err(Error::HeightExceeded(h)),
        _ => Ok(()),
    }
}

/// Height-one criterion: connected and crown-free, i.e. the comparability
/// graph (here equal to the cover graph) is a tree.
pub fn contractible_height1(p: &Poset) -> Result<bool> {
    height_at_most_one(p)?;
    if p.is_empty() {
        return Ok(false);
    }
    Ok(p.is_connected() && p.covers().len() == p.len() - 1)
}

fn cover_adjacency(p: &Poset) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); p.len()];
    for &(a, b) in p.covers() {
        adj[a].push(b);
        adj[b].push(a);
    }
    adj
}

/// A shortest cycle of the cover graph of a height-one poset, which spans a
/// crown; `None` when the cover graph is a forest.
pub fn contains_crown(p: &Poset) -> Result<Option<Vec<usize>>> {
    height_at_most_one(p)?;
    let adj = cover_adjacency(p);
    let n = p.len();
    let mut best: Option<Vec<usize>> = None;
    for root in 0..n {
        // BFS tree from root; a non-tree edge closes a cycle through root's
        // tree. The shortest cycle overall is found from one of its vertices.
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if parent[v] != w {
                    let len = dist[v] + dist[w] + 1;
                    if best.as_ref().is_some_and(|b| b.len() <= len) {
                        continue;
                    }
                    let path_to_root = |mut u: usize| {
                        let mut path = vec![u];
                        while u != root {
                            u = parent[u];
                            path.push(u);
                        }
                        path
                    };
                    let pv = path_to_root(v);
                    let pw = path_to_root(w);
                    // Only a simple cycle when the two branches meet at root.
                    let shared = pv.iter().filter(|u| pw.contains(u)).count();
                    if shared != 1 {
                        continue;
                    }
                    // root .. v, then w .. (child of root)
                    let mut full: Vec<usize> = pv.into_iter().rev().collect();
                    full.extend(&pw[..pw.len() - 1]);
                    best = Some(full);
                }
            }
        }
    }
    Ok(best)
}

/// Every `y` is joined to `x` by exactly one s-path whose consecutive
/// members are in the cover relation.
///
/// Counts simple cover-graph paths from `x`, stopping at the first element
/// reached twice.
pub fn unique_spath_condition(p: &Poset, x: usize) -> bool {
    let adj = cover_adjacency(p);
    let n = p.len();
    let mut count = vec![0u8; n];
    let mut on_path = vec![false; n];
    fn go(v: usize, adj: &[Vec<usize>], count: &mut [u8], on_path: &mut [bool]) -> bool {
        count[v] += 1;
        if count[v] > 1 {
            return false;
        }
        on_path[v] = true;
        for &w in &adj[v] {
            if !on_path[w] && !go(w, adj, count, on_path) {
                return false;
            }
        }
        on_path[v] = false;
        true
    }
    go(x, &adj, &mut count, &mut on_path) && count.iter().all(|&c| c == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        antichain, canonical_code, chain, crown, fence, posets_up_to_iso, random_poset,
    };

    #[test]
    fn isomorphism_examples() {
        let c3 = chain(3);
        let relabeled = c3
            .relabeled(vec!["p".into(), "q".into(), "r".into()])
            .unwrap();
        assert!(are_isomorphic(&c3, &relabeled).is_some());
        assert!(are_isomorphic(&c3, &fence(3).unwrap()).is_none());
        let cr = crown(2).unwrap();
        let rotated = cr.permuted(&[1, 0, 3, 2]);
        let w = are_isomorphic(&cr, &rotated).unwrap();
        assert!(w.is_valid(&cr, &rotated));
        assert!(are_isomorphic(&Poset::empty(), &Poset::empty()).is_some());
    }

    #[test]
    fn isomorphism_matches_canonical_codes() {
        let all: Vec<Poset> = (0..=4).flat_map(|n| posets_up_to_iso(n).unwrap()).collect();
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                assert_eq!(are_isomorphic(a, b).is_some(), i == j);
            }
        }
        for seed in 0..40 {
            let p = random_poset(6, 0.4, seed).unwrap();
            let perm = [3, 5, 0, 1, 4, 2];
            let q = p.permuted(&perm);
            assert!(are_isomorphic(&p, &q).is_some());
            let r = random_poset(6, 0.4, seed + 1000).unwrap();
            assert_eq!(
                are_isomorphic(&p, &r).is_some(),
                canonical_code(&p).unwrap() == canonical_code(&r).unwrap()
            );
        }
    }

    #[test]
    fn pointed_isomorphism_respects_basepoints() {
        let f3 = fence(3).unwrap();
        // endpoints are interchangeable, the top is not an endpoint
        assert!(are_isomorphic_pointed(&f3, 0, &f3, 2).is_some());
        assert!(are_isomorphic_pointed(&f3, 0, &f3, 1).is_none());
    }

    #[test]
    fn equivalence_examples() {
        let pt = chain(1);
        assert!(are_homotopy_equivalent(&fence(5).unwrap(), None, &pt, None).equivalent);
        let ev = are_homotopy_equivalent(&crown(2).unwrap(), None, &crown(3).unwrap(), None);
        assert!(!ev.equivalent);
        assert_eq!((ev.core_p.poset.len(), ev.core_q.poset.len()), (4, 6));
        assert!(are_homotopy_equivalent(&chain(4), None, &fence(7).unwrap(), None).equivalent);
    }

    #[test]
    fn oracle_examples() {
        let l = Limits::default();
        assert!(brute_force_homotopy_equivalent(&chain(1), &chain(2), &l).unwrap());
        assert!(!brute_force_homotopy_equivalent(&crown(2).unwrap(), &chain(1), &l).unwrap());
        let f = fence(4).unwrap();
        assert!(brute_force_homotopy_equivalent(&f, &f, &l).unwrap());
        assert!(!brute_force_homotopy_equivalent(&antichain(2), &chain(1), &l).unwrap());
        assert!(brute_force_homotopy_equivalent(&Poset::empty(), &Poset::empty(), &l).unwrap());
        assert!(!brute_force_homotopy_equivalent(&Poset::empty(), &chain(1), &l).unwrap());
    }

    #[test]
    fn contractibility() {
        for n in 1..=10 {
            assert!(is_contractible(&fence(n).unwrap()));
            assert!(is_contractible(&chain(n)));
            assert_eq!(contractible_height1(&fence(n).unwrap()), Ok(true));
        }
        for n in 2..=5 {
            assert!(!is_contractible(&crown(n).unwrap()));
        }
        assert!(!is_contractible(&Poset::empty()));
        assert_eq!(contractible_height1(&crown(2).unwrap()), Ok(false));
        let two = fence(3).unwrap().disjoint_union(&fence(2).unwrap());
        assert_eq!(contractible_height1(&two), Ok(false));
        assert_eq!(
            contractible_height1(&chain(3)),
            Err(Error::HeightExceeded(2))
        );
    }

    #[test]
    fn crown_detection() {
        let c3 = crown(3).unwrap();
        let cyc = contains_crown(&c3).unwrap().unwrap();
        assert_eq!(cyc.len(), 6);
        for i in 0..6 {
            assert!(c3.comparable(cyc[i], cyc[(i + 1) % 6]));
        }
        assert_eq!(contains_crown(&fence(5).unwrap()).unwrap(), None);
        // crown(2) plus a pendant minimum under b1
        let p = Poset::from_covers(
            &["a1", "a2", "b1", "b2", "m"],
            &[
                ("a1", "b1"),
                ("a1", "b2"),
                ("a2", "b1"),
                ("a2", "b2"),
                ("m", "b1"),
            ],
        )
        .unwrap();
        let cyc = contains_crown(&p).unwrap().unwrap();
        assert_eq!(cyc.len(), 4);
        assert!(!cyc.contains(&4));
        assert!(contains_crown(&chain(3)).is_err());
    }

    #[test]
    fn unique_paths() {
        let f5 = fence(5).unwrap();
        assert!((0..5).all(|x| unique_spath_condition(&f5, x)));
        let cr = crown(2).unwrap();
        assert!((0..4).all(|x| !unique_spath_condition(&cr, x)));
        assert!(unique_spath_condition(&chain(3), 0));
        assert!(!unique_spath_condition(&antichain(2), 0));
        // matches "cover graph is a tree"
        for seed in 0..50 {
            let p = random_poset(7, 0.3, seed).unwrap();
            let tree = p.is_connected() && p.covers().len() + 1 == p.len();
            assert_eq!(unique_spath_condition(&p, 0), tree);
            if tree {
                assert!(is_contractible(&p));
                // and the point itself is a strong deformation retract
                let c = core(&p, Some(0), RemovalPolicy::default());
                assert_eq!(c.elements, vec![0]);
            }
        }
    }
}
