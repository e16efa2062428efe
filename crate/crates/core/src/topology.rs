//! Finite topologies as explicit set families.
//!
//! The down-set topology of a poset, the compact-open subbasis `[x, y↓]` on a
//! function poset, closure of a subbasis to the topology it generates, and the
//! specialization order of a topology. Infinite-space statements about these
//! topologies are out of reach here; on finite inputs every equality is
//! checked by enumeration.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::maps::FunctionPoset;
use crate::poset::{element_set, ElementSet, Poset, Preorder};

/// A duplicate-free family of subsets of `0..ground_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetFamily {
    ground_size: usize,
    sets: BTreeSet<FixedBitSet>,
}

impl SetFamily {
    pub fn new(ground_size: usize, sets: impl IntoIterator<Item = ElementSet>) -> Result<Self> {
        let mut fam = SetFamily {
            ground_size,
            sets: BTreeSet::new(),
        };
        for s in sets {
            fam.insert(s)?;
        }
        Ok(fam)
    }

    /// Adds a member; sets given with a smaller capacity are widened.
    pub fn insert(&mut self, mut s: ElementSet) -> Result<bool> {
        if s.len() > self.ground_size {
            if s.ones().any(|i| i >= self.ground_size) {
                return Err(Error::InvalidArgument(format!(
                    "set is not contained in a ground set of size {}",
                    self.ground_size
                )));
            }
            s = element_set(self.ground_size, s.ones());
        } else if s.len() < self.ground_size {
            s.grow(self.ground_size);
        }
        Ok(self.sets.insert(s))
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, s: &ElementSet) -> bool {
        self.sets.contains(s)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ElementSet> {
        self.sets.iter()
    }

    fn empty_set(&self) -> ElementSet {
        FixedBitSet::with_capacity(self.ground_size)
    }

    fn full_set(&self) -> ElementSet {
        let mut s = FixedBitSet::with_capacity(self.ground_size);
        s.insert_range(..);
        s
    }

    /// Contains `∅` and the ground set and is closed under pairwise `∩`
    /// and `∪` (which on a finite ground set is all a topology needs).
    pub fn is_topology(&self) -> bool {
        if !self.contains(&self.empty_set()) || !self.contains(&self.full_set()) {
            return false;
        }
        let members: Vec<&ElementSet> = self.sets.iter().collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let mut u = (*a).clone();
                u.union_with(b);
                let mut n = (*a).clone();
                n.intersect_with(b);
                if !self.contains(&u) || !self.contains(&n) {
                    return false;
                }
            }
        }
        true
    }
}

/// Set-of-sets equality; families over different ground sets are unequal.
pub fn families_equal(a: &SetFamily, b: &SetFamily) -> bool {
    a == b
}

fn ground_guard(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::GuardExceeded {
            what,
            count: n as u128,
            limit: limit as u128,
        });
    }
    Ok(())
}

/// All down-sets of `P`: the open sets of its Alexandroff topology.
///
/// Enumerated as unions of principal down-sets over the antichains of `P`,
/// each antichain giving its own down-set exactly once.
pub fn alexandroff_topology(p: &Poset, limits: &Limits) -> Result<SetFamily> {
    ground_guard(
        p.len(),
        limits.max_topology_ground,
        "down-set enumeration size",
    )?;
    let n = p.len();
    let mut fam = SetFamily {
        ground_size: n,
        sets: BTreeSet::new(),
    };
    fn go(
        p: &Poset,
        next: usize,
        blocked: &ElementSet,
        current: &ElementSet,
        out: &mut BTreeSet<FixedBitSet>,
    ) {
        out.insert(current.clone());
        for x in next..p.len() {
            if blocked.contains(x) {
                continue;
            }
            let mut b = blocked.clone();
            b.union_with(&p.comparability_set(x));
            let mut c = current.clone();
            c.union_with(p.down_set(x));
            go(p, x + 1, &b, &c, out);
        }
    }
    let none = FixedBitSet::with_capacity(n);
    go(p, 0, &none, &none, &mut fam.sets);
    Ok(fam)
}

/// `U_x`, the intersection of all open sets containing `x`.
pub fn minimal_nbhd(p: &Poset, x: usize) -> ElementSet {
    p.down_set(x).clone()
}

/// `max(P)` is finite and every element lies below a maximal one.
///
/// Both clauses hold for every finite poset (and vacuously for the empty
/// one); the check spells them out rather than returning `true` outright.
pub fn is_compact_shape(p: &Poset) -> bool {
    let maxima = p.max_elements();
    let finite = maxima.count_ones(..) <= p.len();
    finite && (0..p.len()).all(|x| p.up_set(x).intersection_count(&maxima) > 0)
}

fn interval(c: &FunctionPoset<'_>, k: &ElementSet, u: &ElementSet) -> ElementSet {
    element_set(
        c.len(),
        (0..c.len()).filter(|&i| k.ones().all(|x| u.contains(c.map(i).apply(x)))),
    )
}

/// `[K, U] = { f : f(K) ⊆ U }` for a down-set `U` of the codomain, as a set
/// of map indices. Also checks `[K, U] = [max(K), U]`.
pub fn hom_set_interval(
    c: &FunctionPoset<'_>,
    k: &ElementSet,
    u: &ElementSet,
) -> Result<ElementSet> {
    let y = c.codomain();
    let x = c.domain();
    if u.ones().any(|v| v >= y.len()) || k.ones().any(|v| v >= x.len()) {
        return Err(Error::InvalidArgument(
            "set outside the domain or codomain".into(),
        ));
    }
    let u = element_set(y.len(), u.ones());
    let k = element_set(x.len(), k.ones());
    if !y.is_down_set(&u) {
        return Err(Error::NotDownSet);
    }
    let full = interval(c, &k, &u);
    let reduced = interval(c, &x.max_of(&k), &u);
    assert_eq!(full, reduced, "[K,U] differs from [max K, U]");
    Ok(full)
}

/// The subbasis `{ [x, y↓] : x ∈ X, y ∈ Y }` of the compact-open topology
/// on `C(X, Y)`, over map indices.
pub fn compact_open_subbasis(c: &FunctionPoset<'_>) -> SetFamily {
    let (x, y) = (c.domain(), c.codomain());
    let mut fam = SetFamily {
        ground_size: c.len(),
        sets: BTreeSet::new(),
    };
    for a in 0..x.len() {
        let k = element_set(x.len(), [a]);
        for b in 0..y.len() {
            fam.sets.insert(interval(c, &k, y.down_set(b)));
        }
    }
    fam
}

/// The smallest topology containing `sub`: adjoin `∅` and the ground set,
/// then close under pairwise `∩` and `∪` until nothing new appears.
pub fn generate_topology(sub: &SetFamily, limits: &Limits) -> Result<SetFamily> {
    ground_guard(
        sub.ground_size,
        limits.max_topology_ground,
        "topology ground size",
    )?;
    let mut fam = sub.clone();
    fam.sets.insert(fam.empty_set());
    fam.sets.insert(fam.full_set());
    let mut members: Vec<ElementSet> = fam.sets.iter().cloned().collect();
    let mut done = 0;
    // Each round combines the not-yet-processed members with everything.
    while done < members.len() {
        let end = members.len();
        for i in done..end {
            for j in 0..end {
                if j >= done && j > i {
                    continue;
                }
                let mut meet = members[i].clone();
                meet.intersect_with(&members[j]);
                let mut join = members[i].clone();
                join.union_with(&members[j]);
                for combined in [meet, join] {
                    if fam.sets.insert(combined.clone()) {
                        if fam.sets.len() > limits.max_topology_sets {
                            return Err(Error::GuardExceeded {
                                what: "generated topology size",
                                count: fam.sets.len() as u128,
                                limit: limits.max_topology_sets as u128,
                            });
                        }
                        members.push(combined);
                    }
                }
            }
        }
        done = end;
    }
    Ok(fam)
}

/// `x <= y` iff every open set containing `y` contains `x`.
pub fn specialization_order(t: &SetFamily) -> Result<Preorder> {
    if !t.is_topology() {
        return Err(Error::NotATopology(
            "not closed under finite unions and intersections",
        ));
    }
    let n = t.ground_size;
    let mut up: Vec<FixedBitSet> = (0..n).map(|_| FixedBitSet::with_capacity(n)).collect();
    for (x, row) in up.iter_mut().enumerate() {
        for y in 0..n {
            if t.iter().all(|s| !s.contains(y) || s.contains(x)) {
                row.insert(y);
            }
        }
    }
    Ok(Preorder::from_up_sets(
        (0..n).map(|i| i.to_string()).collect(),
        up,
    ))
}

/// Sets in a family that are not down-sets of `p`.
pub fn non_down_sets<'f>(p: &Poset, fam: &'f SetFamily) -> Vec<&'f ElementSet> {
    fam.iter().filter(|s| !p.is_down_set(s)).collect()
}
