//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits non-zero if any criterion fails.

use std::collections::VecDeque;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use finspace::complex::{homology, homology_invariant_under_reduction, order_complex};
use finspace::generators::{
    antichain, chain, crown, fence, posets_up_to_iso_through, random_height_one, random_poset,
};
use finspace::homotopy::{
    are_homotopy_equivalent, are_isomorphic, brute_force_homotopy_equivalent, contractible_height1,
    is_contractible,
};
use finspace::limits::Limits;
use finspace::maps::{
    enumerate_monotone, has_fpp, min_contraction_chain, FunctionPoset, MonotoneMap,
};
use finspace::poset::{element_set, ElementSet, Poset};
use finspace::reduction::{core, is_core, standard_sequence, RemovalPolicy};
use finspace::topology::{
    alexandroff_topology, compact_open_subbasis, families_equal, generate_topology,
    hom_set_interval, specialization_order,
};
use finspace_cli::document::{emit_poset, load, parse_poset};

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: false,
        detail: detail.into(),
    }
}

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/tests/data")
}

/// Maps of `c` reachable from `start` by comparable steps.
fn comparability_component(c: &FunctionPoset<'_>, start: usize) -> Vec<usize> {
    let cod = c.codomain();
    let maps = c.maps();
    let mut seen = vec![false; maps.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut out = vec![start];
    while let Some(i) = queue.pop_front() {
        for j in 0..maps.len() {
            if !seen[j] && maps[i].comparable(&maps[j], cod) {
                seen[j] = true;
                out.push(j);
                queue.push_back(j);
            }
        }
    }
    out
}

/// Shortest comparable-step chain from the identity to a constant map.
fn contraction_length(c: &FunctionPoset<'_>) -> Option<usize> {
    let cod = c.codomain();
    let maps = c.maps();
    let start = maps.iter().position(MonotoneMap::is_identity)?;
    let mut dist = vec![usize::MAX; maps.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        if maps[i].is_constant() {
            return Some(dist[i]);
        }
        for j in 0..maps.len() {
            if dist[j] == usize::MAX && maps[i].comparable(&maps[j], cod) {
                dist[j] = dist[i] + 1;
                queue.push_back(j);
            }
        }
    }
    None
}

/// Longest path (in edges) with pairwise distinct vertices in the
/// comparability graph.
fn longest_comparability_path(p: &Poset) -> usize {
    fn go(p: &Poset, v: usize, used: &mut Vec<bool>) -> usize {
        let mut best = 0;
        for w in 0..p.len() {
            if !used[w] && p.comparable(v, w) {
                used[w] = true;
                best = best.max(1 + go(p, w, used));
                used[w] = false;
            }
        }
        best
    }
    (0..p.len())
        .map(|v| {
            let mut used = vec![false; p.len()];
            used[v] = true;
            go(p, v, &mut used)
        })
        .max()
        .unwrap_or(0)
}

fn all_subsets(n: usize) -> impl Iterator<Item = ElementSet> {
    (0u32..1 << n).map(move |m| element_set(n, (0..n).filter(|i| m >> i & 1 == 1)))
}

fn criterion_1() -> Outcome {
    for n in 1..=50 {
        let c = core(&fence(n).unwrap(), None, RemovalPolicy::default());
        if c.poset.len() != 1 {
            return fail(format!("core(fence({n})) has {} points", c.poset.len()));
        }
    }
    for n in 2..=20 {
        let p = crown(n).unwrap();
        let c = core(&p, None, RemovalPolicy::default());
        if c.poset.len() != p.len() || c.poset.covers() != p.covers() {
            return fail(format!("core(crown({n})) is not crown({n})"));
        }
    }
    ok("fence(1..=50) -> point, crown(2..=20) fixed")
}

fn criterion_2(limits: &Limits) -> Outcome {
    let classes = posets_up_to_iso_through(4).unwrap();
    let mut pairs = 0;
    let mut equivalent = 0;
    let mut check = |p: &Poset, q: &Poset, what: &str| -> Option<Outcome> {
        let fast = are_homotopy_equivalent(p, None, q, None).equivalent;
        let slow = match brute_force_homotopy_equivalent(p, q, limits) {
            Ok(v) => v,
            Err(e) => return Some(fail(format!("{what}: oracle failed: {e}"))),
        };
        pairs += 1;
        equivalent += usize::from(slow);
        (fast != slow).then(|| fail(format!("{what}: cores say {fast}, oracle says {slow}")))
    };
    for (i, p) in classes.iter().enumerate() {
        for (j, q) in classes.iter().enumerate() {
            if let Some(f) = check(p, q, &format!("iso classes {i},{j}")) {
                return f;
            }
        }
    }
    let probs = [0.2, 0.35, 0.5, 0.65];
    for i in 0..200u64 {
        let p = random_poset(5 + (i % 2) as usize, probs[(i % 4) as usize], 1000 + 2 * i).unwrap();
        let q = random_poset(
            5 + (i / 2 % 2) as usize,
            probs[(i / 4 % 4) as usize],
            1001 + 2 * i,
        )
        .unwrap();
        if let Some(f) = check(&p, &q, &format!("random pair {i}")) {
            return f;
        }
    }
    ok(format!(
        "{} classes (<= 4 points), {pairs} pairs, {equivalent} equivalent, 0 disagreements",
        classes.len()
    ))
}

fn criterion_3(limits: &Limits) -> Outcome {
    let family = [
        ("chain(1)", chain(1)),
        ("chain(2)", chain(2)),
        ("chain(3)", chain(3)),
        ("antichain(2)", antichain(2)),
        ("fence(3)", fence(3).unwrap()),
    ];
    let mut checked = 0;
    for (nx, x) in &family {
        for (ny, y) in &family {
            let run = || -> finspace::error::Result<bool> {
                let c = enumerate_monotone(x, y, limits)?;
                let generated = generate_topology(&compact_open_subbasis(&c), limits)?;
                let alex = alexandroff_topology(c.order()?, limits)?;
                Ok(families_equal(&generated, &alex))
            };
            match run() {
                Ok(true) => checked += 1,
                Ok(false) => return fail(format!("C({nx}, {ny}): topologies differ")),
                Err(e) => return fail(format!("C({nx}, {ny}): {e}")),
            }
        }
    }
    ok(format!(
        "{checked} function spaces, compact-open = Alexandroff"
    ))
}

fn criterion_4(limits: &Limits) -> Outcome {
    let small: Vec<Poset> = posets_up_to_iso_through(3).unwrap();
    let mut checked = 0u64;
    for x in &small {
        for y in &small {
            let c = enumerate_monotone(x, y, limits).unwrap();
            let downs = alexandroff_topology(y, limits).unwrap();
            for k in all_subsets(x.len()) {
                let max_k = x.max_of(&k);
                for u in downs.iter() {
                    // by definition, directly on the maps
                    let by_def = |set: &ElementSet| {
                        element_set(
                            c.len(),
                            (0..c.len())
                                .filter(|&i| set.ones().all(|a| u.contains(c.map(i).apply(a)))),
                        )
                    };
                    if by_def(&k) != by_def(&max_k) {
                        return fail(format!("[K,U] != [max K,U] for K={k:?}"));
                    }
                    match hom_set_interval(&c, &k, u) {
                        Ok(s) if s == by_def(&k) => {}
                        _ => return fail("hom_set_interval disagrees with the definition"),
                    }
                    checked += 1;
                }
            }
        }
    }
    ok(format!("{checked} (X, Y, K, U) cases, zero failures"))
}

fn criterion_5(limits: &Limits) -> Outcome {
    let mut cores = 0;
    for p in posets_up_to_iso_through(5).unwrap() {
        if p.is_empty() || !is_core(&p, None) {
            continue;
        }
        cores += 1;
        let c = enumerate_monotone(&p, &p, limits).unwrap();
        let id = c.index_of(&MonotoneMap::identity(&p)).unwrap();
        let size = comparability_component(&c, id).len();
        if size != 1 {
            return fail(format!(
                "a {}-point core has an id component of size {size}",
                p.len()
            ));
        }
    }
    ok(format!(
        "{cores} cores with <= 5 points, each id component is a singleton"
    ))
}

fn criterion_6() -> Outcome {
    let probs = [0.15, 0.3, 0.45, 0.6];
    let mut contractible = 0;
    for i in 0..500u64 {
        let n = 1 + (i % 9) as usize;
        let p = random_height_one(n, probs[(i / 9 % 4) as usize], i).unwrap();
        let a = match contractible_height1(&p) {
            Ok(v) => v,
            Err(e) => return fail(format!("sample {i}: {e}")),
        };
        let b = is_contractible(&p);
        contractible += usize::from(b);
        if a != b {
            return fail(format!("sample {i}: criterion {a}, core {b}"));
        }
    }
    ok(format!(
        "500 samples, {contractible} contractible, zero disagreements"
    ))
}

fn criterion_7(limits: &Limits) -> Outcome {
    for n in 2..=4 {
        let k = order_complex(&crown(n).unwrap(), limits).unwrap();
        let h = homology(&k, true, limits).unwrap();
        let expected: Vec<(isize, usize)> = (-1..=1).map(|d| (d, usize::from(d == 1))).collect();
        let got: Vec<(isize, usize)> = h.groups.iter().map(|g| (g.degree, g.betti)).collect();
        if got != expected || h.has_torsion() {
            return fail(format!("crown({n}) reduced profile {got:?}"));
        }
    }
    let probs = [0.2, 0.35, 0.5];
    for i in 0..100u64 {
        let p = random_poset(1 + (i % 8) as usize, probs[(i % 3) as usize], 500 + i).unwrap();
        match homology_invariant_under_reduction(&p, limits) {
            Ok(true) => {}
            Ok(false) => return fail(format!("sample {i}: homology changed under reduction")),
            Err(e) => return fail(format!("sample {i}: {e}")),
        }
    }
    ok("crown(2..=4): reduced betti (0;0;1), no torsion; 100 samples invariant")
}

fn criterion_8(limits: &Limits) -> Outcome {
    let classes = posets_up_to_iso_through(4).unwrap();
    let fpp: Vec<bool> = classes
        .iter()
        .map(|p| has_fpp(p, limits).unwrap().has_fpp)
        .collect();
    let mut equivalent_pairs = 0;
    for i in 0..classes.len() {
        for j in 0..classes.len() {
            if are_homotopy_equivalent(&classes[i], None, &classes[j], None).equivalent {
                equivalent_pairs += 1;
                if fpp[i] != fpp[j] {
                    return fail(format!(
                        "classes {i} and {j} are equivalent but differ on FPP"
                    ));
                }
            }
        }
    }
    let c2 = crown(2).unwrap();
    let r = has_fpp(&c2, limits).unwrap();
    let witness_ok = r.witness.as_ref().is_some_and(|w| {
        w.is_monotone(&c2, &c2) && w.fixed_points().is_empty() && w.len() == c2.len()
    });
    if r.has_fpp || !witness_ok {
        return fail("crown(2) lacks a checked fixed-point-free witness");
    }
    for n in 1..=5 {
        if !has_fpp(&chain(n), limits).unwrap().has_fpp {
            return fail(format!("chain({n}) reported without FPP"));
        }
    }
    ok(format!("{equivalent_pairs} equivalent pairs agree; crown(2) witness checked; chain(1..=5) have FPP"))
}

fn criterion_9() -> Outcome {
    let probs = [0.15, 0.3, 0.45];
    let mut worst = 0usize;
    for i in 0..200u64 {
        let n = 1 + (i % 10) as usize;
        let p = random_poset(n, probs[(i % 3) as usize], 7000 + i).unwrap();
        let s = match standard_sequence(&p, None, 4 * n + 8) {
            Ok(s) => s,
            Err(e) => return fail(format!("sample {i}: {e}")),
        };
        if !s.stabilized {
            return fail(format!("sample {i}: did not stabilize"));
        }
        let (fin, _) = s.trace.final_poset();
        let c = core(&p, None, RemovalPolicy::default());
        if are_isomorphic(&fin, &c.poset).is_none() {
            return fail(format!(
                "sample {i}: final subspace is not isomorphic to the core"
            ));
        }
        let bound = 2 * longest_comparability_path(&p) + 2;
        if s.effective_rounds > bound {
            return fail(format!(
                "sample {i}: {} effective rounds > {bound}",
                s.effective_rounds
            ));
        }
        worst = worst.max(s.effective_rounds);
    }
    ok(format!(
        "200 samples stabilize to their cores; max effective rounds {worst}"
    ))
}

fn criterion_10(limits: &Limits) -> Outcome {
    let golden_path = data_dir().join("fence_contraction_lengths.golden");
    let golden: Vec<(usize, usize)> = std::fs::read_to_string(&golden_path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut it = l.split_whitespace().map(|t| t.parse::<usize>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    let mut values = Vec::new();
    for n in 2..=6 {
        let f = fence(n).unwrap();
        let lib = min_contraction_chain(&f, limits).unwrap();
        let c = enumerate_monotone(&f, &f, limits).unwrap();
        let oracle = contraction_length(&c);
        if lib != oracle {
            return fail(format!("fence({n}): library {lib:?}, oracle {oracle:?}"));
        }
        values.push((n, oracle.unwrap()));
    }
    if values != golden {
        return fail(format!("values {values:?} differ from golden {golden:?}"));
    }
    let increasing = values.windows(2).all(|w| w[0].1 < w[1].1);
    let shown: Vec<String> = values.iter().map(|(n, v)| format!("{n}:{v}")).collect();
    if increasing {
        ok(format!("lengths {}", shown.join(" ")))
    } else {
        fail(format!(
            "lengths {} are not strictly increasing",
            shown.join(" ")
        ))
    }
}

fn criterion_11(limits: &Limits) -> Outcome {
    let mut files = 0;
    for entry in std::fs::read_dir(data_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "poset" && e != "json") {
            continue;
        }
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        let Ok(doc) = load(&path) else { continue };
        if doc.to_poset().is_err() {
            continue;
        }
        let again = parse_poset(&emit_poset(&doc).unwrap()).unwrap();
        if again != doc {
            return fail(format!("{name} does not round-trip"));
        }
        files += 1;
    }
    let mut suite: Vec<Poset> = posets_up_to_iso_through(5).unwrap();
    suite.extend((1..=8).map(|n| fence(n).unwrap()));
    suite.extend((2..=5).map(|n| crown(n).unwrap()));
    suite.extend((0..20).map(|s| random_poset(8, 0.3, s).unwrap()));
    for (i, p) in suite.iter().enumerate() {
        let spec = specialization_order(&alexandroff_topology(p, limits).unwrap()).unwrap();
        let n = p.len();
        if !(0..n).all(|a| (0..n).all(|b| spec.leq(a, b) == p.leq(a, b))) {
            return fail(format!("suite poset {i}: specialization order differs"));
        }
    }
    ok(format!(
        "{files} corpus files round-trip; {} suite posets recovered from their topologies",
        suite.len()
    ))
}

fn main() {
    let limits = Limits::default();
    type Check<'a> = (&'a str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);
    let checks: Vec<Check> = vec![
        (
            "core correctness",
            Some(Duration::from_secs(1)),
            Box::new(criterion_1),
        ),
        (
            "oracle equivalence",
            Some(Duration::from_secs(60)),
            Box::new(|| criterion_2(&limits)),
        ),
        (
            "function-space topology",
            Some(Duration::from_secs(10)),
            Box::new(|| criterion_3(&limits)),
        ),
        ("subbasis lemma", None, Box::new(|| criterion_4(&limits))),
        (
            "identity components of cores",
            None,
            Box::new(|| criterion_5(&limits)),
        ),
        ("height-one criterion", None, Box::new(criterion_6)),
        (
            "homology",
            Some(Duration::from_secs(30)),
            Box::new(|| criterion_7(&limits)),
        ),
        ("FPP invariance", None, Box::new(|| criterion_8(&limits))),
        ("standard sequence", None, Box::new(criterion_9)),
        (
            "fence contraction growth",
            None,
            Box::new(|| criterion_10(&limits)),
        ),
        ("round-trips", None, Box::new(|| criterion_11(&limits))),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let mut out = check();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            if elapsed > *b {
                out.pass = false;
                out.detail = format!("{} (over the {:.0?} budget)", out.detail, b);
            }
        }
        failed += usize::from(!out.pass);
        println!(
            "[{}] {:>2}. {name}: {} ({:.2} s)",
            if out.pass { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        checks.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
