use std::collections::HashSet;
use std::sync::LazyLock;

use magnet_core::atlas::{builtin_p2_double_scalar, from_smooth_complete_fan};
use magnet_core::attractor::{attractor, AttractorDescription};
use magnet_core::lambda::{
    halfspace_set, is_lambdafiable, verify_lambda_witness, LinearFunctional,
};
use magnet_core::lattice::{integer_affine_solutions, LatticeVector};
use magnet_core::magnet::{
    enumerate_pure_magnets, is_additively_stable, purify, weight_set, StableSet, WeightSet,
};
use magnet_core::monoid::{is_face, is_member, unit_group, MonoidPresentation};
use magnet_core::report::{analyze, AnalysisReport};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn vec2(lo: i64, hi: i64) -> impl Strategy<Value = [i64; 2]> {
    [lo..=hi, lo..=hi]
}

fn monoid(gens: &[[i64; 2]]) -> MonoidPresentation {
    MonoidPresentation::new(2, gens.iter().map(|&g| g.into())).unwrap()
}

static P2_ATTRACTORS: LazyLock<Vec<AttractorDescription>> = LazyLock::new(|| {
    let atlas = builtin_p2_double_scalar();
    let pure = enumerate_pure_magnets(&weight_set(&atlas)).unwrap();
    pure.iter().map(|e| attractor(e, &atlas)).collect()
});

static P2_REPORT: LazyLock<AnalysisReport> =
    LazyLock::new(|| analyze(&builtin_p2_double_scalar()).unwrap());

fn p2_phi() -> WeightSet {
    weight_set(&builtin_p2_double_scalar())
}

/// All sums `Σ cᵢgᵢ` with every `cᵢ` in `range`, split into two halves so
/// six generators stay cheap: a target is hit iff `t − s` lies in the first
/// half's sums for some `s` in the second half's.
fn half_sums(gens: &[[i64; 2]], range: std::ops::RangeInclusive<i64>) -> HashSet<[i64; 2]> {
    let mut sums = HashSet::from([[0, 0]]);
    for g in gens {
        let mut next = HashSet::new();
        for s in &sums {
            for c in range.clone() {
                next.insert([s[0] + c * g[0], s[1] + c * g[1]]);
            }
        }
        sums = next;
    }
    sums
}

fn brute_force_hit(
    gens: &[[i64; 2]],
    range: std::ops::RangeInclusive<i64>,
    target: [i64; 2],
) -> bool {
    let (a, b) = gens.split_at(gens.len() / 2);
    let left = half_sums(a, range.clone());
    let right = half_sums(b, range);
    right
        .iter()
        .any(|s| left.contains(&[target[0] - s[0], target[1] - s[1]]))
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn affine_solutions_agree_with_brute_force(
        gens in prop::collection::vec(vec2(-3, 3), 0..=6),
        target in vec2(-3, 3),
    ) {
        let g: Vec<LatticeVector> = gens.iter().map(|&v| v.into()).collect();
        let t: LatticeVector = target.into();
        let found = integer_affine_solutions(&g, &t).unwrap();
        prop_assert_eq!(found.is_some(), brute_force_hit(&gens, -20..=20, target));
        if let Some(sol) = found {
            let apply = |c: &LatticeVector| {
                g.iter().zip(c.entries()).fold(LatticeVector::zero(2), |acc, (gi, ci)| &acc + &gi.scale(ci))
            };
            prop_assert_eq!(apply(&sol.particular), t.clone());
            for k in &sol.kernel_basis {
                prop_assert!(apply(k).is_zero());
                prop_assert_eq!(apply(&(&sol.particular + k)), t.clone());
            }
        }
    }

    #[test]
    fn membership_agrees_with_naive_enumeration(gens in prop::collection::vec(vec2(-2, 2), 1..=4)) {
        let n = monoid(&gens);
        for x in -4..=4 {
            for y in -4..=4 {
                let naive = brute_force_hit(&gens, 0..=25, [x, y]);
                prop_assert_eq!(is_member(&[x, y].into(), &n).unwrap(), naive, "target ({},{})", x, y);
            }
        }
    }

    #[test]
    fn purification_is_idempotent_and_stable(gens in prop::collection::vec(vec2(-2, 2), 0..=4)) {
        let phi = p2_phi();
        let e = purify(&monoid(&gens), &phi).unwrap();
        let list: Vec<LatticeVector> = e.elements().iter().cloned().collect();
        prop_assert!(is_additively_stable(&list, &phi).unwrap());
        prop_assert_eq!(purify(&e.monoid(2), &phi).unwrap(), e);
    }

    #[test]
    fn attractors_grow_with_the_magnet(i in 0usize..29, j in 0usize..29) {
        let atlas = builtin_p2_double_scalar();
        let (a, b) = (&P2_ATTRACTORS[i], &P2_ATTRACTORS[j]);
        // order the pair so that comparable magnets are always exercised
        let (a, b) = if b.magnet.is_subset(&a.magnet) { (b, a) } else { (a, b) };
        prop_assume!(a.magnet.is_subset(&b.magnet));
        for chart in &atlas.charts {
            prop_assert!(a.chart_part(&chart.id).iter().all(|c| b.chart_part(&chart.id).contains(c)));
        }
        let (oa, ob) = (a.orbit_ids.as_ref().unwrap(), b.orbit_ids.as_ref().unwrap());
        prop_assert!(oa.iter().all(|o| ob.contains(o)));
    }

    #[test]
    fn halfspaces_are_stable(f in vec2(-10, 10), extra in prop::collection::vec(vec2(-2, 2), 0..=6)) {
        let f = LinearFunctional::new(f.into());
        let p2 = p2_phi();
        let h: Vec<LatticeVector> = halfspace_set(&f, &p2).unwrap().elements().iter().cloned().collect();
        prop_assert!(is_additively_stable(&h, &p2).unwrap());

        let phi = WeightSet::new(2, extra.iter().map(|&v| v.into())).unwrap();
        let h: Vec<LatticeVector> = halfspace_set(&f, &phi).unwrap().elements().iter().cloned().collect();
        prop_assert!(is_additively_stable(&h, &phi).unwrap());
    }

    #[test]
    fn witnesses_are_sound_and_complete(
        weights in prop::collection::vec(vec2(-2, 2), 1..=7),
        mask in any::<u8>(),
    ) {
        let phi = WeightSet::new(2, weights.iter().map(|&v| v.into())).unwrap();
        let subset: Vec<LatticeVector> = phi
            .weights()
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, w)| w.clone())
            .collect();
        prop_assume!(is_additively_stable(&subset, &phi).unwrap());
        let e = StableSet::new(subset, &phi).unwrap();
        let found = is_lambdafiable(&e, &phi).unwrap();
        if let Some(f) = &found {
            prop_assert!(verify_lambda_witness(f, &e, &phi));
        }
        let cuts = |bound: i64| {
            (-bound..=bound).any(|a| (-bound..=bound).any(|b| verify_lambda_witness(&[a, b].into(), &e, &phi)))
        };
        prop_assert_eq!(found.is_some(), cuts(8));
        // a larger box never finds a witness the engine missed
        if found.is_none() {
            prop_assert!(!cuts(12));
        }
    }

    #[test]
    fn fan_matches_builtin_for_p2(
        steps in prop::collection::vec((0usize..4, -2i64..=2), 0..=4),
        rotate in 0usize..3,
        reverse in any::<bool>(),
    ) {
        // a random element of GL₂(Z) as a product of elementary matrices
        let mut m = [[1i64, 0], [0, 1]];
        for (kind, k) in steps {
            let e = match kind {
                0 => [[1, k], [0, 1]],
                1 => [[1, 0], [k, 1]],
                2 => [[0, 1], [1, 0]],
                _ => [[-1, 0], [0, 1]],
            };
            m = [
                [e[0][0] * m[0][0] + e[0][1] * m[1][0], e[0][0] * m[0][1] + e[0][1] * m[1][1]],
                [e[1][0] * m[0][0] + e[1][1] * m[1][0], e[1][0] * m[0][1] + e[1][1] * m[1][1]],
            ];
        }
        let mut rays: Vec<LatticeVector> = [[1, 0], [0, 1], [-1, -1]]
            .iter()
            .map(|r| [m[0][0] * r[0] + m[0][1] * r[1], m[1][0] * r[0] + m[1][1] * r[1]].into())
            .collect();
        rays.rotate_left(rotate);
        if reverse {
            rays.reverse();
        }
        let fan = analyze(&from_smooth_complete_fan(&rays).unwrap()).unwrap();
        let builtin = &*P2_REPORT;
        prop_assert_eq!(fan.pure_magnet_count, builtin.pure_magnet_count);
        prop_assert_eq!(&fan.cardinality_histogram, &builtin.cardinality_histogram);
        prop_assert_eq!(fan.lambdafiable_count, builtin.lambdafiable_count);
        prop_assert_eq!(fan.hasse.edge_count, builtin.hasse.edge_count);
        prop_assert_eq!(fan.hasse.intermediate_edge_count, builtin.hasse.intermediate_edge_count);
        let counts = |r: &AnalysisReport| {
            let mut c: Vec<_> = r.attractors.iter().map(|a| (a.magnet.len(), a.component_count())).collect();
            c.sort();
            c
        };
        prop_assert_eq!(counts(&fan), counts(builtin));
        prop_assert_eq!(
            fan.stratification.as_ref().map(|s| s.strata.len()),
            builtin.stratification.as_ref().map(|s| s.strata.len())
        );
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn members_are_closed_under_addition(
        gens in prop::collection::vec(vec2(-2, 2), 1..=4),
        a in prop::collection::vec(0u8..4, 4),
        b in prop::collection::vec(0u8..4, 4),
    ) {
        let n = monoid(&gens);
        let combo = |c: &[u8]| {
            n.generators().iter().zip(c).fold(LatticeVector::zero(2), |acc, (g, &k)| &acc + &g.scale(&k.into()))
        };
        let (u, v) = (combo(&a), combo(&b));
        prop_assert!(is_member(&u, &n).unwrap() && is_member(&v, &n).unwrap());
        prop_assert!(is_member(&(&u + &v), &n).unwrap());
    }

    #[test]
    fn units_are_invertible(gens in prop::collection::vec(vec2(-2, 2), 0..=4)) {
        let n = monoid(&gens);
        for u in unit_group(&n).unwrap() {
            prop_assert!(is_member(&u, &n).unwrap());
            prop_assert!(is_member(&-&u, &n).unwrap());
        }
    }

    #[test]
    fn faces_absorb_summands(
        gens in prop::collection::vec(vec2(-2, 2), 1..=4),
        mask in 0u8..16,
        a in prop::collection::vec(0u8..3, 4),
        b in prop::collection::vec(0u8..3, 4),
    ) {
        let n = monoid(&gens);
        let face = MonoidPresentation::new(
            2,
            n.generators().iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, g)| g.clone()),
        ).unwrap();
        prop_assume!(is_face(&face, &n).unwrap());
        let combo = |c: &[u8]| {
            n.generators().iter().zip(c).fold(LatticeVector::zero(2), |acc, (g, &k)| &acc + &g.scale(&k.into()))
        };
        let (u, v) = (combo(&a), combo(&b));
        if is_member(&(&u + &v), &face).unwrap() {
            prop_assert!(is_member(&u, &face).unwrap() && is_member(&v, &face).unwrap());
        }
    }
}
