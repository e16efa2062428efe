//! Order-preserving maps and the function poset `C(X, Y)`.
//!
//! For finite `X` and `Y` the compact-open topology on `C(X, Y)` is the
//! down-set topology of the pointwise order, so homotopies are exactly
//! finite comparability chains `f = h0 ~ h1 ~ ... ~ hk = g`. This module
//! only represents homotopies that way; the characterization does not carry
//! over to infinite spaces.

use std::collections::{HashMap, VecDeque};
use std::ops::ControlFlow;
use std::sync::OnceLock;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::poset::{element_set, ElementSet, Poset};

/// A map between two posets, stored as the image of each domain element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MonotoneMap {
    values: Vec<usize>,
}

impl MonotoneMap {
    /// Checks that `values` is an order-preserving map `domain -> codomain`.
    pub fn new(domain: &Poset, codomain: &Poset, values: Vec<usize>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidArgument(format!(
                "map has {} values for a domain of {} elements",
                values.len(),
                domain.len()
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= codomain.len()) {
            return Err(Error::InvalidArgument(format!(
                "value {v} outside a codomain of {} elements",
                codomain.len()
            )));
        }
        let map = MonotoneMap { values };
        if !map.is_monotone(domain, codomain) {
            return Err(Error::InvalidArgument("map is not order-preserving".into()));
        }
        Ok(map)
    }

    /// Wraps values without checking monotonicity.
    pub fn from_values_unchecked(values: Vec<usize>) -> Self {
        MonotoneMap { values }
    }

    pub fn identity(x: &Poset) -> Self {
        MonotoneMap {
            values: (0..x.len()).collect(),
        }
    }

    pub fn constant(x: &Poset, y: usize) -> Self {
        MonotoneMap {
            values: vec![y; x.len()],
        }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn apply(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &MonotoneMap) -> MonotoneMap {
        MonotoneMap {
            values: inner.values.iter().map(|&v| self.values[v]).collect(),
        }
    }

    pub fn is_monotone(&self, domain: &Poset, codomain: &Poset) -> bool {
        domain
            .covers()
            .iter()
            .all(|&(a, b)| codomain.leq(self.values[a], self.values[b]))
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Pointwise `self <= other`.
    pub fn leq(&self, other: &MonotoneMap, codomain: &Poset) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| codomain.leq(a, b))
    }

    pub fn comparable(&self, other: &MonotoneMap, codomain: &Poset) -> bool {
        self.leq(other, codomain) || other.leq(self, codomain)
    }

    pub fn image(&self, codomain_len: usize) -> ElementSet {
        element_set(codomain_len, self.values.iter().copied())
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&x| self.values[x] == x)
            .collect()
    }
}

/// Backtracking enumeration of monotone maps in lexicographic order of their
/// value vectors. `allowed[x]`, when given, restricts the value of `x`.
/// At most `budget` search nodes are expanded.
fn search_monotone(
    x: &Poset,
    y: &Poset,
    allowed: Option<&[ElementSet]>,
    budget: usize,
    visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
) -> Result<ControlFlow<()>> {
    struct Search<'s> {
        x: &'s Poset,
        y: &'s Poset,
        allowed: Option<&'s [ElementSet]>,
        values: Vec<usize>,
        nodes: usize,
        budget: usize,
    }
    impl Search<'_> {
        fn go(&mut self, visit: &mut dyn FnMut(&[usize]) -> ControlFlow<()>) -> ControlFlow<bool> {
            self.nodes += 1;
            if self.nodes > self.budget {
                return ControlFlow::Break(true);
            }
            let i = self.values.len();
            if i == self.x.len() {
                return visit(&self.values).map_break(|_| false);
            }
            let mut cand = match self.allowed {
                Some(a) => a[i].clone(),
                None => self.y.full_set(),
            };
            for (z, &fz) in self.values.iter().enumerate() {
                if self.x.leq(z, i) {
                    cand.intersect_with(self.y.up_set(fz));
                }
                if self.x.leq(i, z) {
                    cand.intersect_with(self.y.down_set(fz));
                }
            }
            for v in cand.ones() {
                self.values.push(v);
                self.go(visit)?;
                self.values.pop();
            }
            ControlFlow::Continue(())
        }
    }
    let mut s = Search {
        x,
        y,
        allowed,
        values: Vec::with_capacity(x.len()),
        nodes: 0,
        budget,
    };
    match s.go(visit) {
        ControlFlow::Break(true) => Err(Error::GuardExceeded {
            what: "monotone map search nodes",
            count: s.nodes as u128,
            limit: budget as u128,
        }),
        ControlFlow::Break(false) => Ok(ControlFlow::Break(())),
        ControlFlow::Continue(()) => Ok(ControlFlow::Continue(())),
    }
}

fn collect_maps(
    x: &Poset,
    y: &Poset,
    allowed: Option<&[ElementSet]>,
    limit: usize,
) -> Result<Vec<MonotoneMap>> {
    let mut maps = Vec::new();
    // Node budget well above `limit * depth`; dead ends are rare.
    let budget = limit
        .saturating_mul(x.len() + 1)
        .saturating_mul(4)
        .saturating_add(1);
    let flow = search_monotone(x, y, allowed, budget, &mut |v| {
        if maps.len() == limit {
            return ControlFlow::Break(());
        }
        maps.push(MonotoneMap { values: v.to_vec() });
        ControlFlow::Continue(())
    })?;
    if flow.is_break() {
        return Err(Error::GuardExceeded {
            what: "monotone map count",
            count: limit as u128 + 1,
            limit: limit as u128,
        });
    }
    Ok(maps)
}

/// `C(X, Y)`: every order-preserving map with the pointwise order.
pub struct FunctionPoset<'a> {
    domain: &'a Poset,
    codomain: &'a Poset,
    maps: Vec<MonotoneMap>,
    index: HashMap<Vec<usize>, usize>,
    max_materialized: usize,
    order: OnceLock<Poset>,
}

impl std::fmt::Debug for FunctionPoset<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FunctionPoset")
            .field("domain", &self.domain.len())
            .field("codomain", &self.codomain.len())
            .field("maps", &self.maps.len())
            .finish()
    }
}

/// Enumerates `C(X, Y)` in lexicographic order of assignments.
pub fn enumerate_monotone<'a>(
    x: &'a Poset,
    y: &'a Poset,
    limits: &Limits,
) -> Result<FunctionPoset<'a>> {
    let maps = collect_maps(x, y, None, limits.max_maps)?;
    Ok(FunctionPoset::from_maps(x, y, maps, limits))
}

/// Monotone maps `X -> Y` with `f(x) = fixed[x]` wherever `fixed[x]` is set.
pub fn enumerate_fixing<'a>(
    x: &'a Poset,
    y: &'a Poset,
    fixed: &[Option<usize>],
    limits: &Limits,
) -> Result<FunctionPoset<'a>> {
    let allowed: Vec<ElementSet> = fixed
        .iter()
        .map(|f| match f {
            Some(v) => element_set(y.len(), [*v]),
            None => y.full_set(),
        })
        .collect();
    let maps = collect_maps(x, y, Some(&allowed), limits.max_maps)?;
    Ok(FunctionPoset::from_maps(x, y, maps, limits))
}

impl<'a> FunctionPoset<'a> {
    fn from_maps(x: &'a Poset, y: &'a Poset, maps: Vec<MonotoneMap>, limits: &Limits) -> Self {
        let index = maps
            .iter()
            .enumerate()
            .map(|(i, m)| (m.values.clone(), i))
            .collect();
        FunctionPoset {
            domain: x,
            codomain: y,
            maps,
            index,
            max_materialized: limits.max_function_poset,
            order: OnceLock::new(),
        }
    }

    pub fn domain(&self) -> &'a Poset {
        self.domain
    }

    pub fn codomain(&self) -> &'a Poset {
        self.codomain
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[MonotoneMap] {
        &self.maps
    }

    pub fn map(&self, i: usize) -> &MonotoneMap {
        &self.maps[i]
    }

    pub fn index_of(&self, f: &MonotoneMap) -> Option<usize> {
        self.index.get(&f.values).copied()
    }

    /// Pointwise `maps[i] <= maps[j]`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.maps[i].leq(&self.maps[j], self.codomain)
    }

    fn guard(&self) -> Result<()> {
        if self.maps.len() > self.max_materialized {
            return Err(Error::GuardExceeded {
                what: "function poset size",
                count: self.maps.len() as u128,
                limit: self.max_materialized as u128,
            });
        }
        Ok(())
    }

    /// The pointwise order as a [`Poset`] over map indices. Labels are the
    /// assignments written as codomain labels joined by `,`.
    pub fn order(&self) -> Result<&Poset> {
        if let Some(p) = self.order.get() {
            return Ok(p);
        }
        self.guard()?;
        let n = self.maps.len();
        let labels = self
            .maps
            .iter()
            .map(|m| {
                let parts: Vec<&str> = m.values.iter().map(|&v| self.codomain.label(v)).collect();
                format!("[{}]", parts.join(","))
            })
            .collect();
        let below = (0..n)
            .map(|j| element_set(n, (0..n).filter(|&i| self.leq(i, j))))
            .collect();
        Ok(self
            .order
            .get_or_init(|| Poset::from_closure(labels, below)))
    }

    /// `f↓ = { g : g <= f }`
    pub fn down_set(&self, i: usize) -> ElementSet {
        element_set(self.len(), (0..self.len()).filter(|&j| self.leq(j, i)))
    }

    /// Maps differing from `maps[i]` at exactly one point, at a value
    /// comparable to the old one.
    pub fn single_moves(&self, i: usize) -> Vec<usize> {
        let f = &self.maps[i].values;
        let mut out = Vec::new();
        let mut g = f.clone();
        for x in 0..f.len() {
            let old = f[x];
            for v in self.codomain.comparability_set(old).ones() {
                if v == old {
                    continue;
                }
                g[x] = v;
                if let Some(&j) = self.index.get(&g) {
                    out.push(j);
                }
            }
            g[x] = old;
        }
        out
    }

    /// Component number of every map in the comparability graph of `C(X, Y)`.
    ///
    /// Computed on single-point moves: when `f <= g`, moving the points of an
    /// up-set from `f` to `g` one at a time stays monotone, so both graphs
    /// have the same components.
    pub fn class_ids(&self) -> Vec<usize> {
        let n = self.len();
        let mut class = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if class[s] != usize::MAX {
                continue;
            }
            class[s] = next;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for w in self.single_moves(v) {
                    if class[w] == usize::MAX {
                        class[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        class
    }

    /// Homotopy classes, each sorted, ordered by smallest member.
    pub fn homotopy_classes(&self) -> Vec<Vec<usize>> {
        let ids = self.class_ids();
        let count = ids.iter().map(|&c| c + 1).max().unwrap_or(0);
        let mut classes = vec![Vec::new(); count];
        for (i, c) in ids.into_iter().enumerate() {
            classes[c].push(i);
        }
        classes
    }

    /// Shortest comparability chain from `maps[from]` to a map satisfying
    /// `target`, as a list of map indices starting at `from`.
    pub fn shortest_chain_to(
        &self,
        from: usize,
        target: impl Fn(usize) -> bool,
    ) -> Result<Option<Vec<usize>>> {
        self.guard()?;
        let n = self.len();
        let mut parent = vec![usize::MAX; n];
        let mut seen = FixedBitSet::with_capacity(n);
        seen.insert(from);
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            if target(v) {
                let mut path = vec![v];
                let mut cur = v;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Ok(Some(path));
            }
            for w in 0..n {
                if !seen.contains(w) && (self.leq(v, w) || self.leq(w, v)) {
                    seen.insert(w);
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        Ok(None)
    }

    /// Decides `f ≃ g` and returns a shortest comparability chain from `f`
    /// to `g` as witness.
    pub fn is_homotopic(
        &self,
        f: &MonotoneMap,
        g: &MonotoneMap,
    ) -> Result<Option<Vec<MonotoneMap>>> {
        let (Some(i), Some(j)) = (self.index_of(f), self.index_of(g)) else {
            return Err(Error::InvalidArgument(
                "map is not in this function poset".into(),
            ));
        };
        Ok(self
            .shortest_chain_to(i, |k| k == j)?
            .map(|path| path.into_iter().map(|k| self.maps[k].clone()).collect()))
    }
}

/// Length of the shortest comparability chain in `C(X, X)` from `id_X` to a
/// constant map; `None` when `X` is not contractible (or empty).
pub fn min_contraction_chain(x: &Poset, limits: &Limits) -> Result<Option<usize>> {
    if x.is_empty() {
        return Ok(None);
    }
    let c = enumerate_monotone(x, x, limits)?;
    let id = c
        .index_of(&MonotoneMap::identity(x))
        .expect("identity is monotone");
    Ok(c.shortest_chain_to(id, |k| c.map(k).is_constant())?
        .map(|path| path.len() - 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FppReport {
    pub has_fpp: bool,
    /// A fixed-point-free monotone self-map, first in lexicographic order.
    pub witness: Option<MonotoneMap>,
}

/// Fixed point property: every monotone self-map of `X` has a fixed point.
pub fn has_fpp(x: &Poset, limits: &Limits) -> Result<FppReport> {
    let allowed: Vec<ElementSet> = (0..x.len())
        .map(|i| {
            let mut s = x.full_set();
            s.set(i, false);
            s
        })
        .collect();
    let budget = limits.max_maps.saturating_mul(x.len() + 1);
    let mut witness = None;
    let flow = search_monotone(x, x, Some(&allowed), budget, &mut |v| {
        witness = Some(MonotoneMap { values: v.to_vec() });
        ControlFlow::Break(())
    })?;
    Ok(FppReport {
        has_fpp: flow.is_continue(),
        witness,
    })
}

/// Kind flags of a retraction `r: X -> A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RetractionKind {
    /// `r(X) = A` and `r` fixes `A` pointwise.
    pub is_retraction: bool,
    pub monotone: bool,
    /// `r(x) ~ x` everywhere.
    pub comparative: bool,
    /// `r(x) >= x` everywhere.
    pub up: bool,
    /// `r(x) <= x` everywhere.
    pub down: bool,
    /// For comparative `r`: `r = r_d ∘ r_u` with both factors monotone.
    pub splits: Option<bool>,
}

/// Classifies `r` as a retraction of `X` onto `A`.
pub fn is_retraction(x: &Poset, r: &MonotoneMap, a: &ElementSet) -> RetractionKind {
    let n = x.len();
    let monotone = r.len() == n && r.values.iter().all(|&v| v < n) && r.is_monotone(x, x);
    if r.len() != n || r.values.iter().any(|&v| v >= n) {
        return RetractionKind {
            is_retraction: false,
            monotone: false,
            comparative: false,
            up: false,
            down: false,
            splits: None,
        };
    }
    let image = r.image(n);
    let is_retraction = monotone && image == *a && a.ones().all(|v| r.apply(v) == v);
    let comparative = (0..n).all(|i| x.comparable(i, r.apply(i)));
    let up = (0..n).all(|i| x.leq(i, r.apply(i)));
    let down = (0..n).all(|i| x.leq(r.apply(i), i));
    let splits = comparative.then(|| {
        let (ru, rd) = split_comparative(x, r);
        ru.is_monotone(x, x) && rd.is_monotone(x, x) && rd.compose(&ru) == *r
    });
    RetractionKind {
        is_retraction,
        monotone,
        comparative,
        up,
        down,
        splits,
    }
}

/// The up and down parts `(r_u, r_d)` of a comparative map.
pub fn split_comparative(x: &Poset, r: &MonotoneMap) -> (MonotoneMap, MonotoneMap) {
    let n = x.len();
    let ru = (0..n)
        .map(|i| if x.leq(i, r.apply(i)) { r.apply(i) } else { i })
        .collect();
    let rd = (0..n)
        .map(|i| if x.leq(r.apply(i), i) { r.apply(i) } else { i })
        .collect();
    (MonotoneMap { values: ru }, MonotoneMap { values: rd })
}
