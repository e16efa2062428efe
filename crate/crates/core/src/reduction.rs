//! Beat points, retractions removing them, and dismantling traces.
//!
//! All subspaces are subsets of the starting poset and keep its element ids.
//! A step map is stored over the full id range and acts as the identity
//! outside its domain, so composing steps is plain map composition.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::maps::{enumerate_fixing, MonotoneMap};
use crate::poset::{element_set, ElementSet, Poset};

/// `u_x`: the smallest element of `(x↑ ∩ sub) ∖ {x}`, if it exists.
fn up_target(p: &Poset, sub: &ElementSet, x: usize) -> Option<usize> {
    let mut above = p.up_set(x).clone();
    above.intersect_with(sub);
    above.set(x, false);
    above.ones().find(|&m| above.ones().all(|y| p.leq(m, y)))
}

/// `d_x`: the largest element of `(x↓ ∩ sub) ∖ {x}`, if it exists.
fn down_target(p: &Poset, sub: &ElementSet, x: usize) -> Option<usize> {
    let mut below = p.down_set(x).clone();
    below.intersect_with(sub);
    below.set(x, false);
    below.ones().find(|&m| below.ones().all(|y| p.leq(y, m)))
}

fn eligible(sub: &ElementSet, basepoint: Option<usize>) -> impl Iterator<Item = usize> + '_ {
    sub.ones().filter(move |&x| Some(x) != basepoint)
}

/// Up-beat points of `P`, never including the basepoint.
pub fn up_beat_points(p: &Poset, basepoint: Option<usize>) -> ElementSet {
    let sub = p.full_set();
    element_set(
        p.len(),
        eligible(&sub, basepoint).filter(|&x| up_target(p, &sub, x).is_some()),
    )
}

/// Down-beat points of `P`, never including the basepoint.
pub fn down_beat_points(p: &Poset, basepoint: Option<usize>) -> ElementSet {
    let sub = p.full_set();
    element_set(
        p.len(),
        eligible(&sub, basepoint).filter(|&x| down_target(p, &sub, x).is_some()),
    )
}

pub fn beat_points(p: &Poset, basepoint: Option<usize>) -> ElementSet {
    let mut s = up_beat_points(p, basepoint);
    s.union_with(&down_beat_points(p, basepoint));
    s
}

/// No beat points (other than a protected basepoint).
pub fn is_core(p: &Poset, basepoint: Option<usize>) -> bool {
    beat_points(p, basepoint).is_clear()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    RemoveUpBeat,
    RemoveDownBeat,
    BulkUp,
    BulkDown,
}

/// One retraction of a dismantling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetractionStep {
    pub kind: StepKind,
    /// Elements of the domain not in the image.
    pub removed: ElementSet,
    /// The retraction over the starting poset's ids, identity off `domain`.
    pub map: MonotoneMap,
    /// The subspace the retraction acts on.
    pub domain: ElementSet,
    /// `(x, u_x)` or `(x, d_x)` for single removals; every moved point with
    /// its final image for bulk steps.
    pub targets: Vec<(usize, usize)>,
}

impl RetractionStep {
    pub fn image(&self) -> ElementSet {
        let mut img = self.domain.clone();
        img.difference_with(&self.removed);
        img
    }

    pub fn is_identity(&self) -> bool {
        self.removed.is_clear()
    }

    /// The step is a monotone, comparative retraction of its domain onto its
    /// image.
    pub fn is_comparative_retraction(&self, p: &Poset) -> bool {
        let img = self.image();
        let maps_into = self.domain.ones().all(|x| img.contains(self.map.apply(x)));
        let fixes = img.ones().all(|x| self.map.apply(x) == x);
        let comparative = self
            .domain
            .ones()
            .all(|x| p.comparable(x, self.map.apply(x)));
        let monotone = self.domain.ones().all(|x| {
            self.domain
                .ones()
                .all(|y| !p.leq(x, y) || p.leq(self.map.apply(x), self.map.apply(y)))
        });
        maps_into && fixes && comparative && monotone && self.removed.is_disjoint(&img)
    }
}

fn single_step(
    p: &Poset,
    sub: &ElementSet,
    x: usize,
    target: usize,
    kind: StepKind,
) -> RetractionStep {
    let mut values: Vec<usize> = (0..p.len()).collect();
    values[x] = target;
    RetractionStep {
        kind,
        removed: element_set(p.len(), [x]),
        map: MonotoneMap::from_values_unchecked(values),
        domain: sub.clone(),
        targets: vec![(x, target)],
    }
}

/// The retraction removing the beat point `x`, sending it to `d_x` when `x`
/// is a down-beat point and to `u_x` otherwise.
pub fn remove_beat_point(p: &Poset, x: usize) -> Result<RetractionStep> {
    let sub = p.full_set();
    if let Some(d) = down_target(p, &sub, x) {
        Ok(single_step(p, &sub, x, d, StepKind::RemoveDownBeat))
    } else if let Some(u) = up_target(p, &sub, x) {
        Ok(single_step(p, &sub, x, u, StepKind::RemoveUpBeat))
    } else {
        Err(Error::NotABeatPoint(p.label(x).to_string()))
    }
}

/// Order in which [`core()`] picks the next beat point to remove.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RemovalPolicy {
    /// Lowest id first; a point that is both kinds goes down.
    #[default]
    LowestIdDownFirst,
    /// Highest id first; a point that is both kinds goes up.
    HighestIdUpFirst,
}

/// A finite dismantling of `start` (optionally pointed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DismantlingTrace {
    pub start: Poset,
    pub basepoint: Option<usize>,
    pub steps: Vec<RetractionStep>,
    /// `last ∘ ... ∘ first`, as a map from `start` to itself.
    pub composed: MonotoneMap,
    /// The surviving subspace.
    pub final_set: ElementSet,
}

impl DismantlingTrace {
    fn new(start: &Poset, basepoint: Option<usize>) -> Self {
        DismantlingTrace {
            start: start.clone(),
            basepoint,
            steps: Vec::new(),
            composed: MonotoneMap::identity(start),
            final_set: start.full_set(),
        }
    }

    fn push(&mut self, step: RetractionStep) {
        debug_assert_eq!(step.domain, self.final_set);
        self.composed = step.map.compose(&self.composed);
        self.final_set = step.image();
        self.steps.push(step);
    }

    /// The surviving subspace as a poset, with `map[new] = old id`.
    pub fn final_poset(&self) -> (Poset, Vec<usize>) {
        self.start.induced(&self.final_set)
    }

    /// Number of points removed one at a time.
    pub fn single_removals(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s.kind, StepKind::RemoveUpBeat | StepKind::RemoveDownBeat))
            .count()
    }

    /// The bookkeeping invariants: consecutive domains chain up, the
    /// composed map is a retraction onto the final set, and the basepoint
    /// stays put.
    pub fn is_consistent(&self) -> bool {
        let mut dom = self.start.full_set();
        let mut composed = MonotoneMap::identity(&self.start);
        for s in &self.steps {
            if s.domain != dom {
                return false;
            }
            composed = s.map.compose(&composed);
            dom = s.image();
        }
        let n = self.start.len();
        dom == self.final_set
            && composed == self.composed
            && composed.image(n) == self.final_set
            && self.final_set.ones().all(|x| composed.apply(x) == x)
            && self.basepoint.is_none_or(|b| composed.apply(b) == b)
    }
}

/// The core of a finite poset, with the dismantling that produced it.
#[derive(Debug, Clone)]
pub struct Core {
    /// The core as a poset of its own.
    pub poset: Poset,
    /// `elements[i]` is the starting-poset id of core element `i`.
    pub elements: Vec<usize>,
    /// Position of the basepoint inside `poset`, for pointed cores.
    pub basepoint: Option<usize>,
    pub trace: DismantlingTrace,
}

/// Removes beat points one at a time until none is left.
///
/// The result has no beat points, so it admits no comparative retraction
/// other than the identity either. With a basepoint the basepoint is never
/// removed.
pub fn core(p: &Poset, basepoint: Option<usize>, policy: RemovalPolicy) -> Core {
    let mut trace = DismantlingTrace::new(p, basepoint);
    loop {
        let sub = trace.final_set.clone();
        let candidates: Vec<usize> = match policy {
            RemovalPolicy::LowestIdDownFirst => eligible(&sub, basepoint).collect(),
            RemovalPolicy::HighestIdUpFirst => {
                let mut v: Vec<usize> = eligible(&sub, basepoint).collect();
                v.reverse();
                v
            }
        };
        let step = candidates.into_iter().find_map(|x| {
            let (d, u) = (down_target(p, &sub, x), up_target(p, &sub, x));
            let down = d.map(|t| (t, StepKind::RemoveDownBeat));
            let up = u.map(|t| (t, StepKind::RemoveUpBeat));
            let pick = match policy {
                RemovalPolicy::LowestIdDownFirst => down.or(up),
                RemovalPolicy::HighestIdUpFirst => up.or(down),
            };
            pick.map(|(t, kind)| single_step(p, &sub, x, t, kind))
        });
        match step {
            Some(s) => trace.push(s),
            None => break,
        }
    }
    let (poset, elements) = trace.final_poset();
    let basepoint = basepoint.map(|b| {
        elements
            .iter()
            .position(|&e| e == b)
            .expect("basepoint kept")
    });
    Core {
        poset,
        elements,
        basepoint,
        trace,
    }
}

fn bulk_step(p: &Poset, sub: &ElementSet, basepoint: Option<usize>, up: bool) -> RetractionStep {
    let n = p.len();
    let target = |x: usize| -> Option<usize> {
        if Some(x) == basepoint {
            return None;
        }
        if up {
            up_target(p, sub, x)
        } else {
            down_target(p, sub, x)
        }
    };
    // One application of u_X (or d_X).
    let mut once: Vec<usize> = (0..n).collect();
    for x in sub.ones() {
        if let Some(t) = target(x) {
            once[x] = t;
        }
    }
    // Iterate to the eventual fixpoint; strictly monotone chains are finite.
    let mut values: Vec<usize> = (0..n).collect();
    let mut targets = Vec::new();
    for x in sub.ones() {
        let mut y = x;
        while once[y] != y {
            y = once[y];
        }
        values[x] = y;
        if y != x {
            targets.push((x, y));
        }
    }
    let removed = element_set(n, targets.iter().map(|&(x, _)| x));
    RetractionStep {
        kind: if up {
            StepKind::BulkUp
        } else {
            StepKind::BulkDown
        },
        removed,
        map: MonotoneMap::from_values_unchecked(values),
        domain: sub.clone(),
        targets,
    }
}

/// `U_X`: every up-beat point pushed up to the eventual fixpoint of `u_X`.
pub fn bulk_up(p: &Poset, basepoint: Option<usize>) -> RetractionStep {
    bulk_step(p, &p.full_set(), basepoint, true)
}

/// `D_X`: the dual of [`bulk_up`].
pub fn bulk_down(p: &Poset, basepoint: Option<usize>) -> RetractionStep {
    bulk_step(p, &p.full_set(), basepoint, false)
}

/// Result of running the alternating bulk schedule.
#[derive(Debug, Clone)]
pub struct StandardSequence {
    /// Only the non-identity steps.
    pub trace: DismantlingTrace,
    /// Two consecutive identity rounds were observed.
    pub stabilized: bool,
    /// Rounds executed, identity rounds included.
    pub rounds_run: usize,
    /// One past the index of the last non-identity round (0 if none).
    pub effective_rounds: usize,
}

/// Alternates `D`, `U`, `D`, ... on the current subspace, starting with `D`,
/// until two consecutive rounds are identities or `max_rounds` rounds ran.
pub fn standard_sequence(
    p: &Poset,
    basepoint: Option<usize>,
    max_rounds: usize,
) -> Result<StandardSequence> {
    if max_rounds == 0 {
        return Err(Error::InvalidArgument(
            "max_rounds must be at least 1".into(),
        ));
    }
    let mut trace = DismantlingTrace::new(p, basepoint);
    let mut idle = 0;
    let mut rounds_run = 0;
    let mut effective_rounds = 0;
    while rounds_run < max_rounds && idle < 2 {
        let up = rounds_run % 2 == 1;
        let step = bulk_step(p, &trace.final_set.clone(), basepoint, up);
        rounds_run += 1;
        if step.is_identity() {
            idle += 1;
        } else {
            idle = 0;
            effective_rounds = rounds_run;
            trace.push(step);
        }
    }
    Ok(StandardSequence {
        trace,
        stabilized: idle >= 2,
        rounds_run,
        effective_rounds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeformationReport {
    /// The composed map is a retraction onto the final set.
    pub retraction: bool,
    /// Every step is a monotone comparative retraction.
    pub comparative_steps: bool,
    /// Whether the homotopy check (c) ran; false when `C(X, X)` exceeded the
    /// guard and only (a) and (b) were checked.
    pub homotopy_checked: bool,
    /// The composed map is joined to the identity by a comparability chain
    /// of maps that fix the final set pointwise.
    pub homotopy_rel_final: Option<bool>,
}

impl DeformationReport {
    pub fn holds(&self) -> bool {
        self.retraction && self.comparative_steps && self.homotopy_rel_final != Some(false)
    }
}

/// Checks that a trace exhibits its final set as a strong deformation
/// retract of the start.
pub fn verify_strong_deformation(trace: &DismantlingTrace, limits: &Limits) -> DeformationReport {
    let p = &trace.start;
    let retraction = trace.is_consistent();
    // Only the steps: a composite of comparative retractions need not be
    // comparative itself.
    let comparative_steps = trace.steps.iter().all(|s| s.is_comparative_retraction(p));
    let fixed: Vec<Option<usize>> = (0..p.len())
        .map(|x| trace.final_set.contains(x).then_some(x))
        .collect();
    let (homotopy_checked, homotopy_rel_final) = match enumerate_fixing(p, p, &fixed, limits) {
        Ok(c) if c.len() <= limits.max_function_poset => {
            let id = c.index_of(&MonotoneMap::identity(p));
            let r = c.index_of(&trace.composed);
            let ok = match (id, r) {
                (Some(i), Some(j)) => {
                    let class = c.class_ids();
                    class[i] == class[j]
                }
                _ => false,
            };
            (true, Some(ok))
        }
        _ => (false, None),
    };
    DeformationReport {
        retraction,
        comparative_steps,
        homotopy_checked,
        homotopy_rel_final,
    }
}
