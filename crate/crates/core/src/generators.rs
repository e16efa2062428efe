//! Constructors for the standard example families and random instances.
//!
//! Random posets use PCG32 (`rand_pcg::Pcg32::new(seed, RANDOM_STREAM)`),
//! drawing one `next_u64` per candidate pair and accepting the pair when
//! `(draw >> 11) * 2^-53 < edge_prob`. Pairs `(i, j)` with `i < j` are
//! visited with `i` in the outer loop, so the output is reproducible from
//! `(n, edge_prob, seed)` alone.

use std::collections::BTreeMap;

use rand_core::Rng;
use rand_pcg::Pcg32;

use crate::error::{Error, Result};
use crate::poset::{PointedPoset, Poset};

/// PCG stream selector shared by all random generators.
pub const RANDOM_STREAM: u64 = 0xda3e_39cb_94b9_5bdb;

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// The chain `x0 < x1 < ... < x(n-1)`.
pub fn chain(n: usize) -> Poset {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Poset::from_edges(numbered("x", n), &edges).expect("chain is acyclic")
}

/// `n` pairwise incomparable points.
pub fn antichain(n: usize) -> Poset {
    Poset::from_edges(numbered("x", n), &[]).expect("antichain")
}

/// The interval `a..=b` of the Khalimsky line: `n ⊑ m` iff `n = m`, or
/// `|n - m| = 1` and `m` is even. Labels are the integers.
pub fn khalimsky_interval(a: i64, b: i64) -> Result<Poset> {
    if a > b {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let labels: Vec<String> = (a..=b).map(|v| v.to_string()).collect();
    let mut edges = Vec::new();
    for (i, v) in (a..b).enumerate() {
        // v and v + 1: the even one is on top
        if v.rem_euclid(2) == 0 {
            edges.push((i + 1, i));
        } else {
            edges.push((i, i + 1));
        }
    }
    Poset::from_edges(labels, &edges)
}

/// The fence `x0 < x1 > x2 < x3 ...` on `n >= 1` elements.
pub fn fence(n: usize) -> Result<Poset> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "fence needs at least one element".into(),
        ));
    }
    Ok(zigzag(numbered("x", n), 0))
}

/// Zigzag on the given labels starting upward from the first element, shifted
/// by `offset` ids (used to splice fences into larger posets).
fn zigzag(labels: Vec<String>, offset: usize) -> Poset {
    let n = labels.len();
    let edges: Vec<_> = (1..n)
        .map(|i| {
            if i % 2 == 1 {
                (offset + i - 1, offset + i)
            } else {
                (offset + i, offset + i - 1)
            }
        })
        .collect();
    Poset::from_edges(labels, &edges).expect("zigzag is acyclic")
}

/// The crown on `2n` elements: `a_i < b_i` and `a_i < b_(i+1 mod n)`.
/// Ids `0..n` are `a1..an`, ids `n..2n` are `b1..bn`.
pub fn crown(n: usize) -> Result<Poset> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "crown needs n >= 2, got {n}"
        )));
    }
    let mut labels: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    labels.extend((1..=n).map(|i| format!("b{i}")));
    let mut edges = Vec::with_capacity(2 * n);
    for i in 0..n {
        edges.push((i, n + i));
        edges.push((i, n + (i + 1) % n));
    }
    Poset::from_edges(labels, &edges)
}

/// A center `c` (the basepoint) placed below the first element of one fence
/// per entry of `lengths`; each leg then alternates `l0 > l1 < l2 > ...`.
///
/// A finite analogue of the transfinite spider, not an instance of it:
/// every finite spider dismantles to its center.
pub fn spider(lengths: &[usize]) -> Result<PointedPoset> {
    if lengths.contains(&0) {
        return Err(Error::InvalidArgument(
            "spider legs need length >= 1".into(),
        ));
    }
    let mut labels = vec!["c".to_string()];
    let mut edges = Vec::new();
    for (leg, &len) in lengths.iter().enumerate() {
        let first = labels.len();
        labels.extend((0..len).map(|j| format!("l{leg}_{j}")));
        edges.push((0, first));
        for j in 1..len {
            let (prev, cur) = (first + j - 1, first + j);
            // l0 is above the center, so l1 < l0, l2 > l1, ...
            if j % 2 == 1 {
                edges.push((cur, prev));
            } else {
                edges.push((prev, cur));
            }
        }
    }
    PointedPoset::new(Poset::from_edges(labels, &edges)?, 0)
}

fn unit_draw(rng: &mut Pcg32) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {p} not in [0, 1]"
        )));
    }
    Ok(())
}

/// A random poset: each pair `(i, j)`, `i < j`, is related with probability
/// `edge_prob`, then the relation is closed and reduced.
pub fn random_poset(n: usize, edge_prob: f64, seed: u64) -> Result<Poset> {
    check_prob(edge_prob)?;
    let mut rng = Pcg32::new(seed, RANDOM_STREAM);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if unit_draw(&mut rng) < edge_prob {
                edges.push((i, j));
            }
        }
    }
    Poset::from_edges(numbered("x", n), &edges)
}

/// A random poset of height at most one: the first `k` ids are minimal
/// (`k` drawn uniformly from `1..=n`), every (minimal, other) pair is related
/// with probability `edge_prob`.
pub fn random_height_one(n: usize, edge_prob: f64, seed: u64) -> Result<Poset> {
    check_prob(edge_prob)?;
    if n == 0 {
        return Ok(Poset::empty());
    }
    let mut rng = Pcg32::new(seed, RANDOM_STREAM);
    let k = 1 + (rng.next_u64() % n as u64) as usize;
    let mut edges = Vec::new();
    for i in 0..k {
        for j in k..n {
            if unit_draw(&mut rng) < edge_prob {
                edges.push((i, j));
            }
        }
    }
    Poset::from_edges(numbered("x", n), &edges)
}

/// Largest size accepted by [`canonical_code`] and [`posets_up_to_iso`].
pub const BRUTE_FORCE_ISO_LIMIT: usize = 7;

fn strict_code(p: &Poset, perm: &[usize]) -> u64 {
    let n = p.len();
    let mut code = 0u64;
    for x in 0..n {
        for y in 0..n {
            if x != y && p.leq(x, y) {
                let (a, b) = (perm[x], perm[y]);
                code |= 1 << (a * n + b);
            }
        }
    }
    code
}

fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    // Heap's algorithm
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Isomorphism-invariant code of the strict order: the minimum over all
/// relabelings of its adjacency bitmask. Exhaustive over `n!` permutations.
pub fn canonical_code(p: &Poset) -> Result<u64> {
    let n = p.len();
    if n > BRUTE_FORCE_ISO_LIMIT {
        return Err(Error::GuardExceeded {
            what: "brute-force canonical form size",
            count: n as u128,
            limit: BRUTE_FORCE_ISO_LIMIT as u128,
        });
    }
    let mut best = u64::MAX;
    for_each_permutation(n, |perm| best = best.min(strict_code(p, perm)));
    Ok(best)
}

/// One representative of every isomorphism class of posets on `n` elements,
/// ordered by canonical code.
///
/// Every finite poset has a linear extension, so it suffices to enumerate the
/// transitive relations contained in `i < j`.
pub fn posets_up_to_iso(n: usize) -> Result<Vec<Poset>> {
    if n > 6 {
        return Err(Error::GuardExceeded {
            what: "iso-class enumeration size",
            count: n as u128,
            limit: 6,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut classes = BTreeMap::new();
    for mask in 0u32..(1 << pairs.len()) {
        let rel = |i: usize, j: usize| -> bool {
            i < j && mask & (1 << pairs.iter().position(|&q| q == (i, j)).unwrap()) != 0
        };
        let transitive = (0..n)
            .all(|i| (i + 1..n).all(|j| !rel(i, j) || (j + 1..n).all(|k| !rel(j, k) || rel(i, k))));
        if !transitive {
            continue;
        }
        let edges: Vec<_> = pairs.iter().copied().filter(|&(i, j)| rel(i, j)).collect();
        let p = Poset::from_edges(numbered("x", n), &edges)?;
        classes.entry(canonical_code(&p)?).or_insert(p);
    }
    Ok(classes.into_values().collect())
}

/// All iso classes with at most `max_n` elements, smallest first.
pub fn posets_up_to_iso_through(max_n: usize) -> Result<Vec<Poset>> {
    let mut out = Vec::new();
    for n in 0..=max_n {
        out.extend(posets_up_to_iso(n)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chains_and_antichains() {
        assert!(chain(0).is_empty());
        assert_eq!(chain(2).covers(), &[(0, 1)]);
        assert!(antichain(3).covers().is_empty());
    }

    #[test]
    fn khalimsky_examples() {
        let p = khalimsky_interval(0, 0).unwrap();
        assert_eq!(p.len(), 1);
        let p = khalimsky_interval(0, 2).unwrap();
        let (z, one, two) = (0, 1, 2);
        assert!(p.lt(one, z) && p.lt(one, two) && !p.comparable(z, two));
        let p = khalimsky_interval(1, 4).unwrap();
        let maxima: Vec<&str> = p.max_elements().ones().map(|x| p.label(x)).collect();
        assert_eq!(maxima, vec!["2", "4"]);
        let p = khalimsky_interval(-3, -1).unwrap();
        assert!(p.lt(0, 1) && p.lt(2, 1));
        assert!(khalimsky_interval(3, 2).is_err());
    }

    #[test]
    fn fence_examples() {
        assert_eq!(fence(1).unwrap().len(), 1);
        assert_eq!(fence(2).unwrap(), chain(2));
        assert_eq!(fence(4).unwrap().covers(), &[(0, 1), (2, 1), (2, 3)]);
        assert!(fence(0).is_err());
    }

    #[test]
    fn crown_examples() {
        let c2 = crown(2).unwrap();
        assert_eq!((c2.len(), c2.covers().len()), (4, 4));
        let c3 = crown(3).unwrap();
        assert_eq!(c3.covers().len(), 6);
        assert!(crown(1).is_err());
    }

    #[test]
    fn spider_examples() {
        let s = spider(&[1]).unwrap();
        assert_eq!(s.poset.covers(), chain(2).covers());
        let s = spider(&[2, 2]).unwrap();
        assert_eq!(s.poset.len(), 5);
        assert_eq!(s.basepoint, 0);
        // c < l0_0 > l0_1
        assert!(s.poset.lt(0, 1) && s.poset.lt(2, 1) && !s.poset.comparable(0, 2));
        assert_eq!(spider(&[]).unwrap().poset.len(), 1);
    }

    #[test]
    fn random_extremes() {
        assert_eq!(random_poset(6, 0.0, 3).unwrap(), antichain(6));
        assert_eq!(random_poset(6, 1.0, 3).unwrap(), chain(6));
        assert!(random_poset(3, 1.5, 0).is_err());
        for seed in 0..20 {
            let p = random_height_one(9, 0.4, seed).unwrap();
            assert!(p.height().unwrap() <= 1);
        }
    }

    #[test]
    fn random_is_reproducible() {
        let a = random_poset(5, 0.3, 7).unwrap();
        let b = random_poset(5, 0.3, 7).unwrap();
        assert_eq!(a.covers(), b.covers());
    }

    #[test]
    fn iso_class_counts() {
        // OEIS A000112
        let counts: Vec<usize> = (0..=5)
            .map(|n| posets_up_to_iso(n).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 16, 63]);
    }

    #[test]
    fn canonical_code_ignores_labels() {
        let f = fence(4).unwrap();
        let g = f.permuted(&[3, 1, 0, 2]);
        assert_eq!(canonical_code(&f), canonical_code(&g));
        assert_ne!(canonical_code(&f), canonical_code(&chain(4)));
    }
}
