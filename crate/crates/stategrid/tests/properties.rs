//! Property tests for the algebraic invariants: Kleene laws under
//! arbitrary values, rational formatting, grid put/get coherence, and the
//! placement orderings over generated expressions.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use stategrid::grid::{CellContent, Coordinate, Grid, StateCell};
use stategrid::lang::{parse, print, Expr};
use stategrid::rat::{format_rational, parse_rational, rat};
use stategrid::stratify::{depth_of, hierarchy_of, Mode};
use stategrid::testgen;
use stategrid::tri::{and3, implies3, info_leq, not3, or3, TriValue};

fn tri() -> impl Strategy<Value = TriValue> {
    prop_oneof![
        Just(TriValue::True),
        Just(TriValue::False),
        Just(TriValue::Undefinable),
    ]
}

proptest! {
    #[test]
    fn kleene_connectives_commute_and_distribute(a in tri(), b in tri(), c in tri()) {
        prop_assert_eq!(and3(a, b), and3(b, a));
        prop_assert_eq!(or3(a, b), or3(b, a));
        prop_assert_eq!(and3(and3(a, b), c), and3(a, and3(b, c)));
        prop_assert_eq!(or3(or3(a, b), c), or3(a, or3(b, c)));
        prop_assert_eq!(not3(and3(a, b)), or3(not3(a), not3(b)));
        prop_assert_eq!(not3(not3(a)), a);
        prop_assert_eq!(implies3(a, b), or3(not3(a), b));
        // Distribution laws hold in the strong tables as well.
        prop_assert_eq!(and3(a, or3(b, c)), or3(and3(a, b), and3(a, c)));
        prop_assert_eq!(or3(a, and3(b, c)), and3(or3(a, b), or3(a, c)));
    }

    #[test]
    fn information_order_is_a_partial_order(a in tri(), b in tri(), c in tri()) {
        prop_assert!(info_leq(a, a));
        if info_leq(a, b) && info_leq(b, a) {
            prop_assert_eq!(a, b);
        }
        if info_leq(a, b) && info_leq(b, c) {
            prop_assert!(info_leq(a, c));
        }
    }

    #[test]
    fn rational_text_round_trips(n in -10_000i64..10_000, d in 1i64..1_000) {
        let r = rat(n, d);
        let text = format_rational(&r);
        prop_assert_eq!(parse_rational(&text), Some(r));
    }

    #[test]
    fn grid_put_get_coherence(cells in proptest::collection::vec(
        (0u32..4, 0u32..4, 0u32..2),
        0..12,
    )) {
        let mut grid = Grid::new();
        let mut expected: Vec<(String, Coordinate)> = Vec::new();
        for (k, (d, h, t)) in cells.iter().enumerate() {
            let coord = Coordinate::new(*d, *h, *t);
            let id = format!("cell{k}");
            let cell = StateCell::new(
                id.as_str(),
                coord,
                &id,
                CellContent::GroundSet("G".to_string()),
            )
            .unwrap();
            grid = grid.put(cell).unwrap();
            expected.push((id, coord));
        }
        // Every coordinate returns exactly the ids inserted at it.
        let coords: BTreeSet<Coordinate> = expected.iter().map(|(_, c)| *c).collect();
        for coord in coords {
            let got: Vec<&str> = grid.at(coord).iter().map(|c| c.id.as_str()).collect();
            let mut want: Vec<&str> = expected
                .iter()
                .filter(|(_, c)| *c == coord)
                .map(|(id, _)| id.as_str())
                .collect();
            want.sort();
            prop_assert_eq!(got, want);
        }
        prop_assert!(grid.at(Coordinate::new(9, 9, 9)).is_empty());
    }

    #[test]
    fn parse_inverts_print(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = testgen::gen_formula(&mut rng, 3);
        let text = print(&e);
        prop_assert_eq!(parse(&text, &testgen::std_vocab()).unwrap(), e);
    }

    #[test]
    fn transparent_never_exceeds_elevating(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = testgen::gen_formula(&mut rng, 4);
        let vocab = testgen::std_vocab();
        prop_assert!(
            hierarchy_of(&e, &vocab, Mode::Transparent)
                <= hierarchy_of(&e, &vocab, Mode::Elevating)
        );
    }

    #[test]
    fn depth_is_monotone_along_every_edge(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = testgen::gen_formula(&mut rng, 4);
        let reg = testgen::std_registry();
        check_edges(&e, &reg)?;
    }
}

/// Depth of a parent subtree dominates each child subtree. Bound
/// variables make bare `depth_of` of an inner subtree fail, so open
/// subtrees are closed over their free variables first.
fn check_edges(e: &Expr, reg: &stategrid::stratify::DepthRegistry) -> Result<(), TestCaseError> {
    fn closed_depth(e: &Expr, reg: &stategrid::stratify::DepthRegistry) -> u32 {
        let mut closed = e.clone();
        for name in stategrid::lang::free_vars(e) {
            if reg.get(&name).is_none() {
                closed = Expr::forall(&name, "S", closed);
            }
        }
        depth_of(&closed, reg).expect("generated names are registered")
    }
    let parent = closed_depth(e, reg);
    for child in e.children() {
        prop_assert!(
            closed_depth(child, reg) <= parent,
            "child deeper than parent in {e:?}"
        );
        check_edges(child, reg)?;
    }
    Ok(())
}
