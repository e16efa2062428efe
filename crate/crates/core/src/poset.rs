//! Finite posets, i.e. finite T0 Alexandroff spaces.
//!
//! Elements are dense ids `0..n` with a label table. The order is stored
//! closed (per-element bitsets of everything below and above) together with
//! its cover relation, so order queries are a single bit test.

use std::collections::{HashMap, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};

/// A set of element ids of one poset.
pub type ElementSet = FixedBitSet;

/// Builds an [`ElementSet`] of capacity `n` from ids.
pub fn element_set(n: usize, ids: impl IntoIterator<Item = usize>) -> ElementSet {
    let mut s = FixedBitSet::with_capacity(n);
    for i in ids {
        s.insert(i);
    }
    s
}

/// Default number of elements up to which the longest simple comparability
/// path is searched exactly.
pub const EXACT_PATH_LIMIT: usize = 24;

#[derive(Clone, PartialEq, Eq)]
pub struct Poset {
    labels: Vec<String>,
    /// `(a, b)` with `b` covering `a`, sorted.
    covers: Vec<(usize, usize)>,
    /// `below[x] = { y : y <= x }`
    below: Vec<FixedBitSet>,
    /// `above[x] = { y : y >= x }`
    above: Vec<FixedBitSet>,
}

impl std::fmt::Debug for Poset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let covers: Vec<_> = self
            .covers
            .iter()
            .map(|&(a, b)| format!("{}<{}", self.labels[a], self.labels[b]))
            .collect();
        f.debug_struct("Poset")
            .field("labels", &self.labels)
            .field("covers", &covers)
            .finish()
    }
}

impl Poset {
    /// The poset with no elements.
    pub fn empty() -> Self {
        Poset {
            labels: Vec::new(),
            covers: Vec::new(),
            below: Vec::new(),
            above: Vec::new(),
        }
    }

    /// Builds a poset from labels and pairs `(a, b)` meaning `a < b`.
    ///
    /// Pairs need not be covers: the order is closed and re-reduced. Pairs
    /// `(a, a)` are ignored.
    pub fn from_covers<S: AsRef<str>>(labels: &[S], pairs: &[(S, S)]) -> Result<Self> {
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.as_ref(), i).is_some() {
                return Err(Error::DuplicateLabel(l.as_ref().to_string()));
            }
        }
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| Error::UnknownLabel(s.as_ref().to_string()))
        };
        let mut edges = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            edges.push((lookup(a)?, lookup(b)?));
        }
        let labels = labels.iter().map(|l| l.as_ref().to_string()).collect();
        Self::from_edges(labels, &edges)
    }

    /// Builds a poset on `labels` from id pairs `(a, b)` meaning `a < b`.
    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = labels.len();
        {
            let mut seen = HashMap::with_capacity(n);
            for l in &labels {
                if seen.insert(l.as_str(), ()).is_some() {
                    return Err(Error::DuplicateLabel(l.clone()));
                }
            }
        }
        let mut succ = vec![Vec::new(); n];
        let mut indeg = vec![0usize; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!(
                    "pair ({a}, {b}) out of range for {n} elements"
                )));
            }
            if a != b {
                succ[a].push(b);
                indeg[b] += 1;
            }
        }
        // Kahn's algorithm; anything left over lies on a cycle.
        let mut order = Vec::with_capacity(n);
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &succ[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        if order.len() < n {
            let stuck: Vec<usize> = (0..n).filter(|&v| indeg[v] > 0).collect();
            let a = stuck[0];
            let b = succ[a].iter().copied().find(|w| indeg[*w] > 0).unwrap_or(a);
            return Err(Error::Cycle(labels[a].clone(), labels[b].clone()));
        }
        let mut below: Vec<FixedBitSet> = (0..n).map(|v| element_set(n, [v])).collect();
        for &v in &order {
            for &w in &succ[v] {
                let bv = below[v].clone();
                below[w].union_with(&bv);
            }
        }
        Ok(Self::from_closure(labels, below))
    }

    /// Builds a poset from an already reflexive, transitive and antisymmetric
    /// `below` table. Callers must guarantee the invariants.
    pub(crate) fn from_closure(labels: Vec<String>, below: Vec<FixedBitSet>) -> Self {
        let n = labels.len();
        let mut above: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
        for (x, bx) in below.iter().enumerate() {
            for y in bx.ones() {
                above[y].insert(x);
            }
        }
        let mut covers = Vec::new();
        for b in 0..n {
            for a in below[b].ones() {
                if a != b && above[a].intersection_count(&below[b]) == 2 {
                    covers.push((a, b));
                }
            }
        }
        covers.sort_unstable();
        Poset {
            labels,
            covers,
            below,
            above,
        }
    }

    /// Builds a poset on `n` elements from an order predicate `leq(i, j)`.
    ///
    /// The predicate is closed reflexively and transitively; a cycle is an
    /// error.
    pub fn from_relation(labels: Vec<String>, leq: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let n = labels.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && leq(i, j) {
                    edges.push((i, j));
                }
            }
        }
        Self::from_edges(labels, &edges)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Cover pairs `(a, b)`, `b` covering `a`, in sorted order.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.below[y].contains(x)
    }

    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    /// `x↓`, which is also the minimal open neighbourhood `U_x`.
    pub fn down_set(&self, x: usize) -> &ElementSet {
        &self.below[x]
    }

    /// `x↑`
    pub fn up_set(&self, x: usize) -> &ElementSet {
        &self.above[x]
    }

    /// Everything comparable to `x`, including `x`.
    pub fn comparability_set(&self, x: usize) -> ElementSet {
        let mut s = self.below[x].clone();
        s.union_with(&self.above[x]);
        s
    }

    /// Elements covering `x`.
    pub fn upper_covers(&self, x: usize) -> Vec<usize> {
        self.covers
            .iter()
            .filter(|&&(a, _)| a == x)
            .map(|&(_, b)| b)
            .collect()
    }

    /// Elements covered by `x`.
    pub fn lower_covers(&self, x: usize) -> Vec<usize> {
        self.covers
            .iter()
            .filter(|&&(_, b)| b == x)
            .map(|&(a, _)| a)
            .collect()
    }

    pub fn full_set(&self) -> ElementSet {
        let mut s = FixedBitSet::with_capacity(self.len());
        s.insert_range(..);
        s
    }

    /// True iff `s` is closed downward.
    pub fn is_down_set(&self, s: &ElementSet) -> bool {
        s.ones().all(|x| self.below[x].is_subset(s))
    }

    pub fn is_up_set(&self, s: &ElementSet) -> bool {
        s.ones().all(|x| self.above[x].is_subset(s))
    }

    /// Connected components of the comparability graph, each sorted, ordered
    /// by smallest member. For finite spaces these are both the connected and
    /// the path components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = FixedBitSet::with_capacity(n);
        let mut out = Vec::new();
        for start in 0..n {
            if seen.contains(start) {
                continue;
            }
            let mut comp = FixedBitSet::with_capacity(n);
            let mut frontier = element_set(n, [start]);
            while !frontier.is_clear() {
                comp.union_with(&frontier);
                let mut next = FixedBitSet::with_capacity(n);
                for v in frontier.ones() {
                    next.union_with(&self.below[v]);
                    next.union_with(&self.above[v]);
                }
                next.difference_with(&comp);
                frontier = next;
            }
            seen.union_with(&comp);
            out.push(comp.ones().collect());
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// BFS distances from `x` in the comparability graph; `None` for
    /// unreachable elements.
    pub fn spath_distances(&self, x: usize) -> Vec<Option<usize>> {
        let n = self.len();
        let mut dist = vec![None; n];
        dist[x] = Some(0);
        let mut queue = VecDeque::from([x]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for w in self.comparability_set(v).ones() {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// `d_X(x, y)`: the minimal number of steps of an s-path from `x` to `y`,
    /// `None` when they lie in different components.
    pub fn spath_distance(&self, x: usize, y: usize) -> Option<usize> {
        self.spath_distances(x)[y]
    }

    /// `B(x, n) = { y : d_X(x, y) <= n }`
    pub fn ball(&self, x: usize, radius: usize) -> ElementSet {
        let dist = self.spath_distances(x);
        element_set(
            self.len(),
            (0..self.len()).filter(|&y| matches!(dist[y], Some(d) if d <= radius)),
        )
    }

    /// Length (number of steps) of the longest chain.
    pub fn height(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::EmptyPoset);
        }
        Ok(self.longest_chain_elements() - 1)
    }

    fn longest_chain_elements(&self) -> usize {
        // Longest chain ending at each element; |x↓| gives a topological order.
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| self.below[x].count_ones(..));
        let mut best = vec![1usize; self.len()];
        for &x in &order {
            for y in self.below[x].ones() {
                if y != x {
                    best[x] = best[x].max(best[y] + 1);
                }
            }
        }
        best.into_iter().max().unwrap_or(0)
    }

    pub fn max_elements(&self) -> ElementSet {
        element_set(
            self.len(),
            (0..self.len()).filter(|&x| self.above[x].count_ones(..) == 1),
        )
    }

    pub fn min_elements(&self) -> ElementSet {
        element_set(
            self.len(),
            (0..self.len()).filter(|&x| self.below[x].count_ones(..) == 1),
        )
    }

    /// Maximal elements of the subset `s` (in the induced order).
    pub fn max_of(&self, s: &ElementSet) -> ElementSet {
        element_set(
            self.len(),
            s.ones()
                .filter(|&x| self.above[x].intersection_count(s) == 1),
        )
    }

    pub fn is_antichain(&self, s: &ElementSet) -> bool {
        s.ones().all(|x| self.below[x].intersection_count(s) == 1)
    }

    /// The induced subposet on `s`, with `map[new] = old`.
    pub fn induced(&self, s: &ElementSet) -> (Poset, Vec<usize>) {
        let map: Vec<usize> = s.ones().collect();
        let m = map.len();
        let labels = map.iter().map(|&x| self.labels[x].clone()).collect();
        let below = map
            .iter()
            .map(|&x| element_set(m, (0..m).filter(|&j| self.leq(map[j], x))))
            .collect();
        (Poset::from_closure(labels, below), map)
    }

    /// Disjoint union; labels of `other` get `suffix` appended on clashes.
    pub fn disjoint_union(&self, other: &Poset) -> Poset {
        let n = self.len();
        let mut labels = self.labels.clone();
        for l in &other.labels {
            let mut l = l.clone();
            while labels.contains(&l) {
                l.push('\'');
            }
            labels.push(l);
        }
        let total = labels.len();
        let mut below = Vec::with_capacity(total);
        for x in 0..n {
            below.push(element_set(total, self.below[x].ones()));
        }
        for x in 0..other.len() {
            below.push(element_set(total, other.below[x].ones().map(|y| y + n)));
        }
        Poset::from_closure(labels, below)
    }

    /// The same order with new labels.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<Poset> {
        if labels.len() != self.len() {
            return Err(Error::InvalidArgument("label count mismatch".into()));
        }
        let mut seen = HashMap::new();
        for l in &labels {
            if seen.insert(l.clone(), ()).is_some() {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Poset {
            labels,
            ..self.clone()
        })
    }

    /// Renumbers elements: old element `x` becomes `perm[x]`.
    pub fn permuted(&self, perm: &[usize]) -> Poset {
        let n = self.len();
        let mut labels = vec![String::new(); n];
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for x in 0..n {
            labels[perm[x]] = self.labels[x].clone();
            below[perm[x]] = element_set(n, self.below[x].ones().map(|y| perm[y]));
        }
        Poset::from_closure(labels, below)
    }

    /// The dual (opposite) order.
    pub fn dual(&self) -> Poset {
        Poset::from_closure(self.labels.clone(), self.above.clone())
    }

    /// Order-theoretic summary: chain/path finiteness predicates and the
    /// bp bound.
    pub fn classify(&self) -> Classification {
        self.classify_with_limit(EXACT_PATH_LIMIT)
    }

    pub fn classify_with_limit(&self, exact_limit: usize) -> Classification {
        let max_degree = (0..self.len())
            .map(|x| self.comparability_set(x).count_ones(..) - 1)
            .max()
            .unwrap_or(0);
        let (steps, approximate) = self.longest_spath(exact_limit);
        Classification {
            finite_chains: true,
            fp: true,
            locally_finite: true,
            longest_chain_elements: self.longest_chain_elements(),
            max_comparability_degree: max_degree,
            bp_steps: steps,
            bp_elements: if self.is_empty() { 0 } else { steps + 1 },
            approximate,
        }
    }

    /// Longest simple path (in steps) of the comparability graph. Exact by
    /// pruned DFS when `|P| <= exact_limit` and the search budget suffices;
    /// otherwise the largest component size minus one, flagged approximate.
    fn longest_spath(&self, exact_limit: usize) -> (usize, bool) {
        let comps = self.components();
        let trivial_bound = comps.iter().map(|c| c.len() - 1).max().unwrap_or(0);
        if self.len() > exact_limit {
            return (trivial_bound, true);
        }
        let mut search = PathSearch {
            poset: self,
            best: 0,
            budget: 5_000_000,
        };
        for comp in &comps {
            let cap = comp.len() - 1;
            if cap <= search.best {
                continue;
            }
            let comp_set = element_set(self.len(), comp.iter().copied());
            for &start in comp {
                let mut visited = element_set(self.len(), [start]);
                search.extend(start, 0, &mut visited, &comp_set, cap);
                if search.best == cap || search.budget == 0 {
                    break;
                }
            }
            if search.budget == 0 {
                return (trivial_bound, true);
            }
        }
        (search.best, false)
    }
}

struct PathSearch<'a> {
    poset: &'a Poset,
    best: usize,
    budget: u64,
}

impl PathSearch<'_> {
    fn extend(
        &mut self,
        v: usize,
        len: usize,
        visited: &mut FixedBitSet,
        comp: &FixedBitSet,
        cap: usize,
    ) {
        if self.budget == 0 {
            return;
        }
        self.budget -= 1;
        self.best = self.best.max(len);
        if self.best == cap {
            return;
        }
        // Cannot beat `best` even by visiting every remaining element.
        let remaining = comp.count_ones(..) - visited.intersection_count(comp);
        if len + remaining <= self.best {
            return;
        }
        let mut next = self.poset.comparability_set(v);
        next.difference_with(visited);
        for w in next.ones() {
            visited.insert(w);
            self.extend(w, len + 1, visited, comp, cap);
            visited.set(w, false);
            if self.best == cap || self.budget == 0 {
                return;
            }
        }
    }
}

/// Finiteness predicates of a finite poset, with witnesses.
///
/// On finite inputs `finite_chains`, `fp` and `locally_finite` always hold;
/// the witness fields carry the bounds that make them hold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub finite_chains: bool,
    pub fp: bool,
    pub locally_finite: bool,
    pub longest_chain_elements: usize,
    /// Largest `|{y : y ~ x}| - 1`.
    pub max_comparability_degree: usize,
    /// Longest simple comparability path, counted in steps.
    pub bp_steps: usize,
    /// The same path counted in elements (0 for the empty poset).
    pub bp_elements: usize,
    /// Set when the path search was not exhaustive and `bp_steps` is only an
    /// upper bound.
    pub approximate: bool,
}

/// A PointedPoset is a poset with a distinguished basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedPoset {
    pub poset: Poset,
    pub basepoint: usize,
}

impl PointedPoset {
    pub fn new(poset: Poset, basepoint: usize) -> Result<Self> {
        if basepoint >= poset.len() {
            return Err(Error::InvalidArgument(format!(
                "basepoint {basepoint} not in a poset of {} elements",
                poset.len()
            )));
        }
        Ok(PointedPoset { poset, basepoint })
    }
}

/// A reflexive, transitive relation, possibly with distinct mutually related
/// elements (a non-T0 finite space).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preorder {
    labels: Vec<String>,
    /// `up[x] = { y : x <= y }`
    up: Vec<FixedBitSet>,
}

impl Preorder {
    /// Reflexive-transitive closure of the pairs `(a, b)` meaning `a <= b`.
    pub fn new<S: AsRef<str>>(labels: &[S], pairs: &[(S, S)]) -> Result<Self> {
        let n = labels.len();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.as_ref(), i).is_some() {
                return Err(Error::DuplicateLabel(l.as_ref().to_string()));
            }
        }
        let mut up: Vec<FixedBitSet> = (0..n).map(|i| element_set(n, [i])).collect();
        for (a, b) in pairs {
            let a = *index
                .get(a.as_ref())
                .ok_or_else(|| Error::UnknownLabel(a.as_ref().to_string()))?;
            let b = *index
                .get(b.as_ref())
                .ok_or_else(|| Error::UnknownLabel(b.as_ref().to_string()))?;
            up[a].insert(b);
        }
        // Warshall
        for k in 0..n {
            let uk = up[k].clone();
            for row in up.iter_mut() {
                if row.contains(k) {
                    row.union_with(&uk);
                }
            }
        }
        Ok(Preorder {
            labels: labels.iter().map(|l| l.as_ref().to_string()).collect(),
            up,
        })
    }

    /// Wraps `up[x] = { y : x <= y }`. Callers must pass a reflexive,
    /// transitive relation.
    pub(crate) fn from_up_sets(labels: Vec<String>, up: Vec<FixedBitSet>) -> Self {
        Preorder { labels, up }
    }

    pub fn from_poset(p: &Poset) -> Self {
        Preorder {
            labels: p.labels.clone(),
            up: p.above.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    /// True iff the relation is antisymmetric.
    pub fn is_t0(&self) -> bool {
        (0..self.len()).all(|x| self.up[x].ones().all(|y| y == x || !self.leq(y, x)))
    }

    /// The T0 quotient by `x ~ y iff x <= y <= x`, with the projection
    /// `proj[x] = class of x`. Classes are numbered by first member and
    /// labelled by joining member labels with `|`.
    pub fn kolmogorov_quotient(&self) -> (Poset, Vec<usize>) {
        let n = self.len();
        let mut proj = vec![usize::MAX; n];
        let mut reps = Vec::new();
        let mut labels = Vec::new();
        for x in 0..n {
            if proj[x] != usize::MAX {
                continue;
            }
            let class = reps.len();
            let members: Vec<usize> = (x..n)
                .filter(|&y| self.leq(x, y) && self.leq(y, x))
                .collect();
            for &y in &members {
                proj[y] = class;
            }
            labels.push(
                members
                    .iter()
                    .map(|&y| self.labels[y].as_str())
                    .collect::<Vec<_>>()
                    .join("|"),
            );
            reps.push(x);
        }
        let m = reps.len();
        let below = (0..m)
            .map(|c| element_set(m, (0..m).filter(|&d| self.leq(reps[d], reps[c]))))
            .collect();
        (Poset::from_closure(labels, below), proj)
    }
}
