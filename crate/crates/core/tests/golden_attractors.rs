//! Chart-level attractors of all pure magnets of P², against a hand
//! transcription of the published table of attractors.
//!
//! Each golden entry lists the magnet by the generators shown in the table,
//! the table's piece notation, the dimension of the piece in each chart
//! (plus its weight where the table names one) and the number of
//! `⊔`-separated pieces.
//!
//! One sentence of the accompanying text introduces the attractor of
//! `[±(1,0)⟩` but then gives the chart pieces `{x}`, `A¹_(0,1)`, ... and
//! concludes for `[±(0,1)⟩`. The chart data is what matches the table, so
//! the golden entry for `[±(0,1)⟩` follows the chart computation and the
//! entry for `[±(1,0)⟩` follows its own table row `{y} ⊔ P¹ ∋ x,z`.

use std::collections::{BTreeMap, BTreeSet};

use magnet_core::atlas::builtin_p2_double_scalar;
use magnet_core::attractor::attractor;
use magnet_core::lattice::LatticeVector;
use magnet_core::magnet::{enumerate_pure_magnets, purify, weight_set};
use magnet_core::monoid::MonoidPresentation;
use serde::Deserialize;

#[derive(Deserialize)]
struct Piece {
    dim: usize,
    weight: Option<LatticeVector>,
}

#[derive(Deserialize)]
struct Golden {
    generators: Vec<LatticeVector>,
    pieces: String,
    charts: BTreeMap<String, Piece>,
    components: usize,
}

fn golden() -> Vec<Golden> {
    serde_json::from_str(include_str!("golden/p2_attractors.json")).unwrap()
}

#[test]
fn golden_covers_every_pure_magnet_once() {
    let atlas = builtin_p2_double_scalar();
    let phi = weight_set(&atlas);
    let pure: BTreeSet<_> = enumerate_pure_magnets(&phi).unwrap().into_iter().collect();
    let mut seen = BTreeSet::new();
    for g in golden() {
        let e = purify(&MonoidPresentation::new(2, g.generators).unwrap(), &phi).unwrap();
        assert!(pure.contains(&e), "{e} is not an enumerated pure magnet");
        assert!(seen.insert(e.clone()), "{e} appears twice");
    }
    assert_eq!(seen, pure);
}

#[test]
fn chart_pieces_match_the_table() {
    let atlas = builtin_p2_double_scalar();
    let phi = weight_set(&atlas);
    for g in golden() {
        let e = purify(&MonoidPresentation::new(2, g.generators).unwrap(), &phi).unwrap();
        let attr = attractor(&e, &atlas);
        for (chart, piece) in &g.charts {
            let kept = attr.chart_part(chart);
            assert_eq!(
                kept.len(),
                piece.dim,
                "{} in chart {chart} for {e}",
                g.pieces
            );
            if let Some(w) = &piece.weight {
                let coord = atlas.chart(chart).unwrap().coordinate(&kept[0]).unwrap();
                assert_eq!(&coord.weight, w, "{} in chart {chart}", g.pieces);
            }
        }
        assert_eq!(
            attr.component_count(),
            Some(g.components),
            "{} for {e}",
            g.pieces
        );
    }
}

#[test]
fn single_weight_and_opposite_pair() {
    let atlas = builtin_p2_double_scalar();
    let phi = weight_set(&atlas);
    let m = |gens: &[[i64; 2]]| MonoidPresentation::new(2, gens.iter().map(|&g| g.into())).unwrap();

    let up = attractor(&purify(&m(&[[0, 1]]), &phi).unwrap(), &atlas);
    assert_eq!(up.chart_part("z"), ["y".to_string()]);
    assert!(up.chart_part("x").is_empty() && up.chart_part("y").is_empty());

    let line = attractor(&purify(&m(&[[0, 1], [0, -1]]), &phi).unwrap(), &atlas);
    assert_eq!(line.component_count(), Some(2));
    assert_eq!(
        line.components.unwrap(),
        vec![vec!["f_y", "f_z", "l_yz"], vec!["f_x"]]
    );
}
