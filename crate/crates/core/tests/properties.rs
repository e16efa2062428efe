use finspace::complex::{homology, order_complex};
use finspace::generators::random_poset;
use finspace::homotopy::{are_homotopy_equivalent, are_isomorphic};
use finspace::limits::Limits;
use finspace::maps::{enumerate_monotone, MonotoneMap};
use finspace::poset::{element_set, Poset, Preorder};
use finspace::reduction::{
    beat_points, core, is_core, remove_beat_point, verify_strong_deformation, RemovalPolicy,
};
use proptest::prelude::*;

fn poset(max_n: usize) -> impl Strategy<Value = Poset> {
    (0..=max_n, 0.0f64..=1.0, any::<u64>())
        .prop_map(|(n, p, seed)| random_poset(n, p, seed).unwrap())
}

/// Covers by definition: `a < b` with nothing strictly between.
fn covers_by_definition(p: &Poset) -> Vec<(usize, usize)> {
    let n = p.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if p.lt(a, b) && !(0..n).any(|c| p.lt(a, c) && p.lt(c, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn order_axioms(p in poset(9)) {
        let n = p.len();
        for a in 0..n {
            prop_assert!(p.leq(a, a));
            for b in 0..n {
                prop_assert!(!(a != b && p.leq(a, b) && p.leq(b, a)));
                for c in 0..n {
                    prop_assert!(!(p.leq(a, b) && p.leq(b, c)) || p.leq(a, c));
                }
            }
        }
        let mut covers = covers_by_definition(&p);
        covers.sort_unstable();
        prop_assert_eq!(p.covers(), covers.as_slice());
    }

    #[test]
    fn covers_round_trip(p in poset(9)) {
        let pairs: Vec<(String, String)> = p
            .covers()
            .iter()
            .map(|&(a, b)| (p.label(a).to_string(), p.label(b).to_string()))
            .collect();
        let q = Poset::from_covers(p.labels(), &pairs).unwrap();
        prop_assert_eq!(q, p);
    }

    #[test]
    fn spath_distance_is_a_metric_on_components(p in poset(8)) {
        let n = p.len();
        for x in 0..n {
            prop_assert_eq!(p.spath_distance(x, x), Some(0));
            for y in 0..n {
                let dxy = p.spath_distance(x, y);
                prop_assert_eq!(dxy, p.spath_distance(y, x));
                prop_assert_eq!(dxy == Some(1), x != y && p.comparable(x, y));
                for z in 0..n {
                    if let (Some(a), Some(b)) = (dxy, p.spath_distance(y, z)) {
                        let c = p.spath_distance(x, z);
                        prop_assert!(c.is_some_and(|c| c <= a + b));
                    }
                }
            }
        }
    }

    #[test]
    fn dual_and_permutation(p in poset(8), shift in 0usize..8) {
        prop_assert_eq!(p.dual().dual(), p.clone());
        let n = p.len();
        if n > 0 {
            let perm: Vec<usize> = (0..n).map(|x| (x + shift) % n).collect();
            let q = p.permuted(&perm);
            let w = are_isomorphic(&p, &q).unwrap();
            prop_assert!(w.is_valid(&p, &q));
        }
    }

    #[test]
    fn preorder_quotient_is_t0(n in 1usize..7, pairs in proptest::collection::vec((0usize..7, 0usize..7), 0..12)) {
        let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let pairs: Vec<(String, String)> = pairs
            .into_iter()
            .filter(|&(a, b)| a < n && b < n)
            .map(|(a, b)| (labels[a].clone(), labels[b].clone()))
            .collect();
        let pre = Preorder::new(&labels, &pairs).unwrap();
        let (q, proj) = pre.kolmogorov_quotient();
        for a in 0..n {
            for b in 0..n {
                // the projection reflects and preserves the preorder
                prop_assert_eq!(pre.leq(a, b), q.leq(proj[a], proj[b]));
            }
        }
        prop_assert!(Preorder::from_poset(&q).is_t0());
    }

    #[test]
    fn cores_are_canonical(p in poset(9)) {
        let a = core(&p, None, RemovalPolicy::LowestIdDownFirst);
        let b = core(&p, None, RemovalPolicy::HighestIdUpFirst);
        prop_assert!(is_core(&a.poset, None));
        prop_assert!(a.trace.is_consistent());
        prop_assert!(are_isomorphic(&a.poset, &b.poset).is_some());
        let again = core(&a.poset, None, RemovalPolicy::default());
        prop_assert_eq!(again.poset.len(), a.poset.len());
        prop_assert!(are_homotopy_equivalent(&p, None, &a.poset, None).equivalent);
    }

    #[test]
    fn dismantling_is_a_strong_deformation(p in poset(6)) {
        let c = core(&p, None, RemovalPolicy::default());
        let report = verify_strong_deformation(&c.trace, &Limits::default());
        prop_assert!(report.holds());
    }

    #[test]
    fn homology_survives_one_beat_point(p in poset(8)) {
        let l = Limits::default();
        let base = homology(&order_complex(&p, &l).unwrap(), true, &l).unwrap();
        for x in beat_points(&p, None).ones() {
            let step = remove_beat_point(&p, x).unwrap();
            let (q, _) = p.induced(&step.image());
            let h = homology(&order_complex(&q, &l).unwrap(), true, &l).unwrap();
            for d in -1..=p.len() as isize {
                prop_assert_eq!(h.betti(d), base.betti(d));
                prop_assert_eq!(
                    h.group(d).map(|g| g.torsion.clone()).unwrap_or_default(),
                    base.group(d).map(|g| g.torsion.clone()).unwrap_or_default()
                );
            }
        }
    }

    #[test]
    fn euler_characteristic_matches(p in poset(8)) {
        let l = Limits::default();
        let k = order_complex(&p, &l).unwrap();
        let h = homology(&k, false, &l).unwrap();
        let alt: i64 = h.groups.iter().map(|g| if g.degree % 2 == 0 { g.betti as i64 } else { -(g.betti as i64) }).sum();
        prop_assert_eq!(alt, k.euler_characteristic());
        prop_assert!(k.is_closed());
        // a poset and its dual share the order complex
        let hd = homology(&order_complex(&p.dual(), &l).unwrap(), false, &l).unwrap();
        prop_assert_eq!(hd, h);
    }

    #[test]
    fn monotone_maps_match_filtered_functions(x in poset(4), y in poset(4)) {
        let c = enumerate_monotone(&x, &y, &Limits::default()).unwrap();
        let (nx, ny) = (x.len(), y.len());
        let mut expected = 0;
        let total = ny.pow(nx as u32);
        for code in 0..total {
            let mut v = Vec::with_capacity(nx);
            let mut r = code;
            for _ in 0..nx {
                v.push(r % ny.max(1));
                r /= ny.max(1);
            }
            let f = MonotoneMap::from_values_unchecked(v);
            if (0..nx).all(|a| (0..nx).all(|b| !x.leq(a, b) || y.leq(f.apply(a), f.apply(b)))) {
                expected += 1;
                prop_assert!(c.index_of(&f).is_some());
            }
        }
        prop_assert_eq!(c.len(), expected);
    }

    #[test]
    fn ball_matches_distances(p in poset(8), r in 0usize..4) {
        for x in 0..p.len() {
            let ball = p.ball(x, r);
            let expected = element_set(
                p.len(),
                (0..p.len()).filter(|&y| p.spath_distance(x, y).is_some_and(|d| d <= r)),
            );
            prop_assert_eq!(ball, expected);
        }
    }
}
