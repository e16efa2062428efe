//! Order complexes and their integral homology.
//!
//! Homology is computed from boundary matrices in Smith normal form over
//! the integers, so torsion shows up. Elimination runs on `i64` with
//! overflow checks and restarts on big integers if a check trips.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::poset::{ElementSet, Poset};
use crate::reduction::{core, RemovalPolicy};

/// Dense matrices above this many entries are refused.
pub const MAX_MATRIX_ENTRIES: usize = 1 << 26;

/// A finite abstract simplicial complex, faces grouped by dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    /// The complex generated by `facets`: every nonempty subset of a facet.
    pub fn from_facets(vertex_count: usize, facets: &[Vec<usize>]) -> Result<Self> {
        let mut all = std::collections::BTreeSet::new();
        for f in facets {
            let mut f = f.clone();
            f.sort_unstable();
            f.dedup();
            if let Some(&v) = f.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v} out of range for {vertex_count} vertices"
                )));
            }
            if f.len() > 24 {
                return Err(Error::InvalidArgument(
                    "facet too large to close under faces".into(),
                ));
            }
            for mask in 1u32..(1 << f.len()) {
                let face: Vec<usize> = (0..f.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| f[i])
                    .collect();
                all.insert(face);
            }
        }
        Ok(Self::from_sorted_faces(vertex_count, all.into_iter()))
    }

    fn from_sorted_faces(vertex_count: usize, faces: impl Iterator<Item = Vec<usize>>) -> Self {
        let mut simplices: Vec<Vec<Vec<usize>>> = Vec::new();
        for f in faces {
            let d = f.len() - 1;
            if simplices.len() <= d {
                simplices.resize(d + 1, Vec::new());
            }
            simplices[d].push(f);
        }
        for level in &mut simplices {
            level.sort();
            level.dedup();
        }
        SimplicialComplex {
            vertex_count,
            simplices,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.simplices.len().checked_sub(1)
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    /// Number of simplices of each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.simplices.iter().map(Vec::len).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(d, &n)| if d % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Every face of every simplex is present.
    pub fn is_closed(&self) -> bool {
        (1..self.simplices.len()).all(|d| {
            self.simplices[d].iter().all(|s| {
                (0..s.len()).all(|i| {
                    let mut face = s.clone();
                    face.remove(i);
                    self.simplices[d - 1].binary_search(&face).is_ok()
                })
            })
        })
    }
}

/// The complex of nonempty chains of `p`; vertex ids are element ids.
pub fn order_complex(p: &Poset, limits: &Limits) -> Result<SimplicialComplex> {
    let mut faces = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..p.len()).map(|x| vec![x]).collect();
    while let Some(chain) = stack.pop() {
        let top = *chain.last().unwrap();
        for y in p.up_set(top).ones().filter(|&y| y != top) {
            let mut next = chain.clone();
            next.push(y);
            stack.push(next);
        }
        faces.push(chain);
        if faces.len() > limits.max_simplices {
            return Err(Error::GuardExceeded {
                what: "order complex simplices",
                count: faces.len() as u128,
                limit: limits.max_simplices as u128,
            });
        }
    }
    for f in &mut faces {
        f.sort_unstable();
    }
    Ok(SimplicialComplex::from_sorted_faces(
        p.len(),
        faces.into_iter(),
    ))
}

/// Homology in one degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub degree: isize,
    pub betti: usize,
    /// Invariant factors greater than one.
    #[serde(serialize_with = "as_decimal")]
    pub torsion: Vec<BigUint>,
}

fn as_decimal<S: Serializer>(v: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|n| n.to_string()))
}

/// Integral homology, one entry per degree up to the dimension (from −1
/// when reduced).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyProfile {
    pub reduced: bool,
    pub groups: Vec<HomologyGroup>,
}

impl HomologyProfile {
    pub fn group(&self, degree: isize) -> Option<&HomologyGroup> {
        self.groups.iter().find(|g| g.degree == degree)
    }

    /// Zero for degrees not listed.
    pub fn betti(&self, degree: isize) -> usize {
        self.group(degree).map_or(0, |g| g.betti)
    }

    pub fn has_torsion(&self) -> bool {
        self.groups.iter().any(|g| !g.torsion.is_empty())
    }

    /// All groups vanish. Only meaningful for reduced profiles.
    pub fn is_acyclic(&self) -> bool {
        self.groups
            .iter()
            .all(|g| g.betti == 0 && g.torsion.is_empty())
    }
}

trait Entry: Clone + PartialEq {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn abs_key(&self) -> BigUint;
    fn small_abs(&self) -> Option<u64>;
    fn abs_lt(&self, other: &Self) -> bool;
    /// `self - q * other`
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self>;
    fn add(&self, other: &Self) -> Option<Self>;
    fn quot(&self, other: &Self) -> Option<Self>;
    fn divides(&self, other: &Self) -> bool;
}

impl Entry for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn abs_key(&self) -> BigUint {
        BigUint::from(self.unsigned_abs())
    }
    fn small_abs(&self) -> Option<u64> {
        Some(self.unsigned_abs())
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.unsigned_abs() < other.unsigned_abs()
    }
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self> {
        self.checked_sub(q.checked_mul(*other)?)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn quot(&self, other: &Self) -> Option<Self> {
        self.checked_div(*other)
    }
    fn divides(&self, other: &Self) -> bool {
        other.wrapping_rem(*self) == 0
    }
}

impl Entry for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs_key(&self) -> BigUint {
        self.magnitude().clone()
    }
    fn small_abs(&self) -> Option<u64> {
        self.magnitude().to_u64()
    }
    fn abs_lt(&self, other: &Self) -> bool {
        self.magnitude() < other.magnitude()
    }
    fn sub_mul(&self, q: &Self, other: &Self) -> Option<Self> {
        Some(self - q * other)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn quot(&self, other: &Self) -> Option<Self> {
        Some(self / other)
    }
    fn divides(&self, other: &Self) -> bool {
        Zero::is_zero(&(other % self))
    }
}

/// Absolute values of the nonzero diagonal entries of the Smith normal
/// form, or `None` if `i64` arithmetic would overflow.
fn smith_diagonal<T: Entry>(mut a: Vec<Vec<T>>, cols: usize) -> Option<Vec<BigUint>> {
    let rows = a.len();
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        // pivot: smallest nonzero magnitude in the remaining block
        let mut best: Option<(usize, usize)> = None;
        'scan: for i in t..rows {
            for j in t..cols {
                let v = &a[i][j];
                if v.is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| v.abs_lt(&a[bi][bj])) {
                    best = Some((i, j));
                    if v.small_abs() == Some(1) {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut moved = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].quot(&a[t][t])?;
                for j in t..cols {
                    a[i][j] = a[i][j].sub_mul(&q, &a[t][j])?;
                }
                if !a[i][t].is_zero() {
                    a.swap(i, t);
                    moved = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].quot(&a[t][t])?;
                for row in a.iter_mut().skip(t) {
                    row[j] = row[j].sub_mul(&q, &row[t])?;
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    moved = true;
                }
            }
            if moved {
                continue;
            }
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[t][t].divides(&a[i][j])));
            match bad {
                Some(i) => {
                    for j in t..cols {
                        a[t][j] = a[t][j].add(&a[i][j])?;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs_key());
    }
    Some(diag)
}

/// Sparse boundary columns: for each simplex, `(row, ±1)` per facet.
type Boundary = Vec<Vec<(usize, i64)>>;

fn boundary(lower: &[Vec<usize>], upper: &[Vec<usize>]) -> Boundary {
    let index: HashMap<&[usize], usize> = lower
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    upper
        .iter()
        .map(|s| {
            (0..s.len())
                .map(|i| {
                    let mut face = s.clone();
                    face.remove(i);
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    (index[face.as_slice()], sign)
                })
                .collect()
        })
        .collect()
}

fn assert_composes_to_zero(outer: &Boundary, inner: &Boundary) {
    for col in inner {
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for &(mid, s) in col {
            for &(row, t) in &outer[mid] {
                *acc.entry(row).or_insert(0) += s * t;
            }
        }
        assert!(
            acc.values().all(|&v| v == 0),
            "boundary of a boundary is nonzero"
        );
    }
}

/// Nonzero invariant factors of a sparse matrix with `rows` rows.
fn invariant_factors(m: &Boundary, rows: usize) -> Result<Vec<BigUint>> {
    let cols = m.len();
    if rows == 0 || cols == 0 {
        return Ok(Vec::new());
    }
    if rows.saturating_mul(cols) > MAX_MATRIX_ENTRIES {
        return Err(Error::GuardExceeded {
            what: "boundary matrix entries",
            count: (rows as u128) * (cols as u128),
            limit: MAX_MATRIX_ENTRIES as u128,
        });
    }
    let mut a = vec![vec![0i64; cols]; rows];
    for (j, col) in m.iter().enumerate() {
        for &(i, s) in col {
            a[i][j] = s;
        }
    }
    if let Some(d) = smith_diagonal(a.clone(), cols) {
        return Ok(d);
    }
    let big: Vec<Vec<BigInt>> = a
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from_i64).collect())
        .collect();
    Ok(smith_diagonal(big, cols).expect("big integer elimination cannot overflow"))
}

/// Integral simplicial homology of `k`; `reduced` augments with degree −1.
pub fn homology(k: &SimplicialComplex, reduced: bool, limits: &Limits) -> Result<HomologyProfile> {
    if k.total() > limits.max_simplices {
        return Err(Error::GuardExceeded {
            what: "simplices",
            count: k.total() as u128,
            limit: limits.max_simplices as u128,
        });
    }
    let dims = k.simplices.len();
    // Chain groups indexed by degree + 1, so slot 0 is the augmentation.
    let mut sizes: Vec<usize> = vec![usize::from(reduced)];
    sizes.extend(k.f_vector());
    // boundaries[d] maps slot d+1 to slot d
    let mut boundaries: Vec<Boundary> = Vec::with_capacity(dims);
    let empty: [Vec<usize>; 1] = [Vec::new()];
    for d in 0..dims {
        let b = if d == 0 {
            if reduced {
                boundary(&empty, k.simplices(0))
            } else {
                vec![Vec::new(); sizes[1]]
            }
        } else {
            boundary(k.simplices(d - 1), k.simplices(d))
        };
        if let Some(prev) = boundaries.last() {
            assert_composes_to_zero(prev, &b);
        }
        boundaries.push(b);
    }
    let factors: Vec<Vec<BigUint>> = boundaries
        .iter()
        .enumerate()
        .map(|(d, b)| invariant_factors(b, sizes[d]))
        .collect::<Result<_>>()?;
    let rank = |slot: usize| factors.get(slot).map_or(0, Vec::len);
    let first = if reduced { 0 } else { 1 };
    let mut groups = Vec::new();
    for slot in first..sizes.len() {
        // kernel of the map out of this slot, minus the image into it
        let out = if slot == 0 { 0 } else { rank(slot - 1) };
        let betti = sizes[slot] - out - rank(slot);
        let torsion = factors
            .get(slot)
            .map(|f| {
                f.iter()
                    .filter(|v| **v > BigUint::from(1u8))
                    .cloned()
                    .collect()
            })
            .unwrap_or_default();
        groups.push(HomologyGroup {
            degree: slot as isize - 1,
            betti,
            torsion,
        });
    }
    let profile = HomologyProfile { reduced, groups };
    let alternating: i64 = profile
        .groups
        .iter()
        .map(|g| {
            if g.degree.rem_euclid(2) == 0 {
                g.betti as i64
            } else {
                -(g.betti as i64)
            }
        })
        .sum();
    let expected = k.euler_characteristic() - i64::from(reduced);
    assert_eq!(alternating, expected, "Euler characteristic mismatch");
    Ok(profile)
}

/// Simplices of `k` ordered by inclusion, labelled like `{0,2}`.
pub fn face_poset(k: &SimplicialComplex) -> Poset {
    let all: Vec<&Vec<usize>> = k.simplices.iter().flatten().collect();
    let labels = all
        .iter()
        .map(|s| {
            format!(
                "{{{}}}",
                s.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            )
        })
        .collect();
    Poset::from_relation(labels, |a, b| {
        all[a].iter().all(|v| all[b].binary_search(v).is_ok())
    })
    .expect("inclusion is a partial order")
}

/// The subposet of elements other than `x` comparable to `x`.
pub fn link(p: &Poset, x: usize) -> Poset {
    let mut s: ElementSet = p.comparability_set(x);
    s.set(x, false);
    p.induced(&s).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaVerdict {
    /// The link has a one-point core, so it is contractible.
    CertifiedYes,
    /// The link is acyclic but not contractible by core reduction;
    /// homology alone cannot settle homotopical triviality.
    HomologyYes,
    /// The link has nonzero reduced homology.
    No,
    /// A size guard stopped the homology computation.
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    pub verdict: GammaVerdict,
    pub link_size: usize,
    pub link_core_size: usize,
    pub reduced_homology: Option<HomologyProfile>,
}

/// Classifies `x` by the homotopy type of its link.
pub fn is_gamma_point(p: &Poset, x: usize, limits: &Limits) -> GammaReport {
    let l = link(p, x);
    let c = core(&l, None, RemovalPolicy::default());
    let mut report = GammaReport {
        verdict: GammaVerdict::Unknown,
        link_size: l.len(),
        link_core_size: c.poset.len(),
        reduced_homology: None,
    };
    if c.poset.len() == 1 {
        report.verdict = GammaVerdict::CertifiedYes;
        return report;
    }
    // The core has the homotopy type of the link and is smaller.
    let h = order_complex(&c.poset, limits).and_then(|k| homology(&k, true, limits));
    if let Ok(h) = h {
        report.verdict = if h.is_acyclic() {
            GammaVerdict::HomologyYes
        } else {
            GammaVerdict::No
        };
        report.reduced_homology = Some(h);
    }
    report
}

/// Homology of `p` and of its core agree in every degree.
pub fn homology_invariant_under_reduction(p: &Poset, limits: &Limits) -> Result<bool> {
    let c = core(p, None, RemovalPolicy::default());
    let hp = homology(&order_complex(p, limits)?, false, limits)?;
    let hc = homology(&order_complex(&c.poset, limits)?, false, limits)?;
    // Degrees above the smaller dimension must vanish on the larger side.
    let top = hp.groups.len().max(hc.groups.len()) as isize;
    Ok((0..top).all(|d| {
        hp.betti(d) == hc.betti(d)
            && hp.group(d).map_or(&[][..], |g| &g.torsion)
                == hc.group(d).map_or(&[][..], |g| &g.torsion)
    }))
}
