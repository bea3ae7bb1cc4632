use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::eval::{growth_expr, shrink_expr, Value};
use crate::grid::Coordinate;
use crate::lang::{parse, SymbolKind};
use crate::testgen;
use crate::tri::{False, True, Undefinable};

fn atoms(names: &[&str]) -> BTreeSet<Value> {
    names.iter().map(|n| Value::atom(n)).collect()
}

/// Vocabulary I, O (families) and g (mapping, left uninterpreted); one
/// snapshot whose family history is already written out.
fn demo_universe() -> Universe {
    let mut u = Universe::new("u");
    u.vocab.declare("I", SymbolKind::TimedFamily).unwrap();
    u.vocab.declare("O", SymbolKind::TimedFamily).unwrap();
    u.vocab.declare("g", SymbolKind::Mapping(1)).unwrap();
    for name in ["I", "O", "g"] {
        u.registry.set(name, 2);
    }
    u.models[0] = crate::eval::Model::new()
        .with_family(
            "I",
            vec![
                (0u32, atoms(&["a"])),
                (1u32, atoms(&["a", "b"])),
                (2u32, atoms(&["a", "b", "c"])),
            ],
        )
        .with_family("O", vec![(0u32, atoms(&["x"])), (1u32, atoms(&["x", "y"]))]);

    let grow = StateCell::new(
        "growth",
        Coordinate::new(3, 3, 0),
        "input growth",
        CellContent::PredicateState(growth_expr("I")),
    )
    .unwrap();
    let shrink = StateCell::new(
        "shrink",
        Coordinate::new(3, 3, 0),
        "input shrink",
        CellContent::PredicateState(shrink_expr("I")),
    )
    .unwrap();
    let later = StateCell::new(
        "later",
        Coordinate::new(3, 3, 0),
        "growth at 2",
        CellContent::PredicateState(parse("card(I@(2)) > card(I@(1))", &u.vocab).unwrap()),
    )
    .unwrap();
    let verdict = StateCell::new(
        "verdict",
        Coordinate::new(1, 0, 0),
        "stored result",
        CellContent::TruthResult(Undefinable),
    )
    .unwrap();
    let ground = StateCell::new(
        "base.I",
        Coordinate::new(2, 0, 0),
        "I",
        CellContent::GroundSet("I".to_string()),
    )
    .unwrap();
    for cell in [grow, shrink, later, verdict, ground] {
        u = u.insert_cell(cell).unwrap();
    }
    u
}

#[test]
fn insert_cell_checks_well_formedness() {
    let u = demo_universe();
    let bad = StateCell::new(
        "bad",
        Coordinate::new(2, 2, 0),
        "bad",
        CellContent::PredicateState(Expr::cmp(
            crate::lang::CmpOp::Eq,
            Expr::atom("nope"),
            Expr::atom("nope"),
        )),
    )
    .unwrap();
    assert!(matches!(
        u.insert_cell(bad),
        Err(UniverseError::Lang(ParseError::UnknownSymbol(_)))
    ));
}

mod translation {
    use super::*;

    fn target_vocab() -> Vocabulary {
        let mut v = Vocabulary::new();
        v.declare("In2", SymbolKind::TimedFamily).unwrap();
        v.declare("Out2", SymbolKind::TimedFamily).unwrap();
        v.declare("g2", SymbolKind::Mapping(1)).unwrap();
        v
    }

    fn total_map() -> TranslationMap {
        TranslationMap::new("u", "v")
            .with("I", "In2")
            .with("O", "Out2")
            .with("g", "g2")
    }

    #[test]
    fn bijective_round_trip_is_identity() {
        let u = demo_universe();
        let there = u.translate(&total_map(), &target_vocab()).unwrap();
        assert_eq!(there.id, "v");
        let back = there.translate(&total_map().inverse(), &u.vocab).unwrap();
        assert_eq!(back.id, u.id);
        assert_eq!(back.vocab, u.vocab);
        assert_eq!(back.grid, u.grid);
        assert_eq!(back.models, u.models);
        assert_eq!(back.registry, u.registry);
    }

    #[test]
    fn partial_map_flags_exactly_the_cells_using_unmapped_names() {
        let u = demo_universe();
        // `O` is unmapped but no cell uses it; `I` unmapped flags the
        // three predicate cells and the ground cell, not the verdict.
        let map_without_i = TranslationMap::new("u", "v")
            .with("O", "Out2")
            .with("g", "g2");
        let mut v = target_vocab();
        v.declare("I", SymbolKind::TimedFamily).unwrap();
        let translated = u.translate(&map_without_i, &v).unwrap();
        let flagged: Vec<&str> = translated
            .grid
            .cells()
            .filter(|c| c.tags.contains(TAG_UNTRANSLATED))
            .map(|c| c.id.as_str())
            .collect();
        assert_eq!(flagged, vec!["base.I", "growth", "later", "shrink"]);
        for id in flagged {
            let cell = translated.grid.get(&CellId::new(id)).unwrap();
            assert_eq!(cell.definability, Undefinable);
        }
        assert_eq!(
            translated
                .grid
                .get(&CellId::new("verdict"))
                .unwrap()
                .definability,
            True
        );
    }

    #[test]
    fn empty_map_flags_every_symbol_using_cell() {
        let u = demo_universe();
        let mut v = Vocabulary::new();
        for (name, kind) in u.vocab.declared() {
            v.declare(name, kind).unwrap();
        }
        let translated = u
            .translate(&TranslationMap::new("u", "w"), &v)
            .unwrap();
        let flagged = translated
            .grid
            .cells()
            .filter(|c| c.tags.contains(TAG_UNTRANSLATED))
            .count();
        // Only the stored truth result uses no vocabulary symbol.
        assert_eq!(flagged, u.grid.len() - 1);
    }

    #[test]
    fn coordinates_and_ids_are_preserved() {
        let u = demo_universe();
        let translated = u.translate(&total_map(), &target_vocab()).unwrap();
        for cell in u.grid.cells() {
            let t = translated.grid.get(&cell.id).unwrap();
            assert_eq!(t.coord, cell.coord);
        }
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let u = demo_universe();
        let mut v = Vocabulary::new();
        v.declare("In2", SymbolKind::CarrierSet).unwrap();
        let tm = TranslationMap::new("u", "v").with("I", "In2");
        assert_eq!(
            u.translate(&tm, &v).unwrap_err(),
            UniverseError::KindMismatch("I".to_string())
        );
    }

    #[test]
    fn wrong_source_is_rejected() {
        let u = demo_universe();
        let tm = TranslationMap::new("other", "v");
        assert!(matches!(
            u.translate(&tm, &Vocabulary::new()),
            Err(UniverseError::SourceMismatch { .. })
        ));
    }
}

mod integration {
    use super::*;

    fn set_truth(u: &Universe, id: &str, value: crate::tri::TriValue) -> Universe {
        let mut cells: Vec<StateCell> = u.grid.cells().cloned().collect();
        for c in &mut cells {
            if c.id.as_str() == id {
                c.content = CellContent::TruthResult(value);
            }
        }
        let mut next = u.clone();
        next.grid = Grid::from_cells(cells).unwrap();
        next
    }

    fn relabel(u: &Universe, id: &str, label: &str) -> Universe {
        let mut cells: Vec<StateCell> = u.grid.cells().cloned().collect();
        for c in &mut cells {
            if c.id.as_str() == id {
                c.label = label.to_string();
            }
        }
        let mut next = u.clone();
        next.grid = Grid::from_cells(cells).unwrap();
        next
    }

    #[test]
    fn merging_three_copies_is_the_identity() {
        let base = demo_universe();
        let out = Universe::integrate(&base, &base, &base).unwrap();
        assert!(out.conflicts.is_empty());
        assert_eq!(out.merged.grid, base.grid);
    }

    #[test]
    fn disjoint_edits_both_land() {
        let base = demo_universe();
        let a = relabel(&base, "growth", "A's label");
        let b = relabel(&base, "shrink", "B's label");
        let out = Universe::integrate(&base, &a, &b).unwrap();
        assert!(out.conflicts.is_empty());
        assert_eq!(
            out.merged.grid.get(&CellId::new("growth")).unwrap().label,
            "A's label"
        );
        assert_eq!(
            out.merged.grid.get(&CellId::new("shrink")).unwrap().label,
            "B's label"
        );
    }

    #[test]
    fn diverging_edits_conflict_and_demote() {
        let base = demo_universe();
        let a = set_truth(&base, "verdict", True);
        let b = set_truth(&base, "verdict", False);
        let out = Universe::integrate(&base, &a, &b).unwrap();
        assert_eq!(out.conflicts.len(), 1);
        let c = &out.conflicts[0];
        assert_eq!(c.cell, CellId::new("verdict"));
        assert_eq!(c.left, Some(CellContent::TruthResult(True)));
        assert_eq!(c.right, Some(CellContent::TruthResult(False)));
        let kept = out.merged.grid.get(&CellId::new("verdict")).unwrap();
        assert_eq!(kept.definability, Undefinable);
        // Neither side's value is silently adopted.
        assert_eq!(kept.content, base.grid.get(&CellId::new("verdict")).unwrap().content);
    }

    #[test]
    fn identical_edits_agree() {
        let base = demo_universe();
        let a = set_truth(&base, "verdict", False);
        let b = set_truth(&base, "verdict", False);
        let out = Universe::integrate(&base, &a, &b).unwrap();
        assert!(out.conflicts.is_empty());
        assert_eq!(
            out.merged.grid.get(&CellId::new("verdict")).unwrap().content,
            CellContent::TruthResult(False)
        );
    }

    #[test]
    fn additions_on_either_side_are_included() {
        let base = demo_universe();
        let extra = StateCell::new(
            "extra",
            Coordinate::new(1, 0, 0),
            "extra",
            CellContent::TruthResult(True),
        )
        .unwrap();
        let a = base.insert_cell(extra.clone()).unwrap();
        let out = Universe::integrate(&base, &a, &base).unwrap();
        assert!(out.conflicts.is_empty());
        assert!(out.merged.grid.contains(&CellId::new("extra")));

        // Added on both sides with different content: conflict, demoted.
        let clash = StateCell::new(
            "extra",
            Coordinate::new(1, 0, 0),
            "other",
            CellContent::TruthResult(False),
        )
        .unwrap();
        let b = base.insert_cell(clash).unwrap();
        let out = Universe::integrate(&base, &a, &b).unwrap();
        assert_eq!(out.conflicts.len(), 1);
        assert_eq!(
            out.merged.grid.get(&CellId::new("extra")).unwrap().definability,
            Undefinable
        );
    }

    #[test]
    fn unrelated_universes_are_rejected() {
        let base = demo_universe();
        let stranger = Universe::new("stranger");
        assert_eq!(
            Universe::integrate(&base, &stranger, &base).unwrap_err(),
            UniverseError::UnrelatedUniverses
        );
    }

    #[test]
    fn merge_is_commutative_up_to_conflict_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for round in 0..50 {
            let base = testgen::gen_universe(&mut rng, &format!("b{round}"));
            let mut a = base.clone();
            let mut b = base.clone();
            for _ in 0..rng.gen_range(1..=3) {
                a = testgen::gen_edit(&mut rng, &a, "a");
            }
            for _ in 0..rng.gen_range(1..=3) {
                b = testgen::gen_edit(&mut rng, &b, "b");
            }
            let ab = Universe::integrate(&base, &a, &b).unwrap();
            let ba = Universe::integrate(&base, &b, &a).unwrap();
            assert_eq!(ab.merged, ba.merged);
            let mut ab_cells: Vec<_> = ab.conflicts.iter().map(|c| c.cell.clone()).collect();
            let mut ba_cells: Vec<_> = ba.conflicts.iter().map(|c| c.cell.clone()).collect();
            ab_cells.sort();
            ba_cells.sort();
            assert_eq!(ab_cells, ba_cells);
        }
    }

    #[test]
    fn merge_with_self_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for round in 0..50 {
            let base = testgen::gen_universe(&mut rng, &format!("i{round}"));
            let mut a = base.clone();
            for _ in 0..rng.gen_range(1..=3) {
                a = testgen::gen_edit(&mut rng, &a, "a");
            }
            let out = Universe::integrate(&base, &a, &a).unwrap();
            assert!(out.conflicts.is_empty());
            assert_eq!(out.merged.grid, a.grid);
        }
    }
}

mod real_time {
    use super::*;

    #[test]
    fn full_mask_copies_the_snapshot() {
        let u = demo_universe();
        let mask: BTreeSet<String> = ["I", "O", "g"].iter().map(|s| s.to_string()).collect();
        let next = u.advance_time(&mask).unwrap();
        assert_eq!(next.t_max(), 1);
        assert_eq!(next.models[1], u.models[0]);
    }

    #[test]
    fn empty_mask_loses_everything() {
        let u = demo_universe();
        let next = u.advance_time(&BTreeSet::new()).unwrap();
        assert!(next.models[1].interpreted.is_empty());
        let growth = growth_expr("I");
        assert_eq!(next.eval_at(&growth, 1).unwrap(), Undefinable);
        // History is untouched.
        assert_eq!(next.eval_at(&growth, 0).unwrap(), True);
    }

    #[test]
    fn partial_mask_keeps_only_the_masked_symbol() {
        let u = demo_universe();
        let mask: BTreeSet<String> = [String::from("I")].into();
        let next = u.advance_time(&mask).unwrap();
        assert_eq!(next.eval_at(&growth_expr("I"), 1).unwrap(), True);
        assert_eq!(next.eval_at(&growth_expr("O"), 1).unwrap(), Undefinable);
    }

    #[test]
    fn masked_cells_are_copied_to_the_new_time() {
        let u = demo_universe();
        let mask: BTreeSet<String> = [String::from("growth")].into();
        let next = u.advance_time(&mask).unwrap();
        let copy = next.grid.get(&CellId::new("growth@t1")).unwrap();
        assert_eq!(copy.coord.time, 1);
        let original = next.grid.get(&CellId::new("growth")).unwrap();
        assert_eq!(original.coord.time, 0);
    }

    #[test]
    fn history_reevaluates_identically_after_ticks() {
        let u = demo_universe();
        let growth = growth_expr("I");
        let before = format!("{:?}", u.eval_at(&growth, 0).unwrap());
        let mut current = u;
        for _ in 0..3 {
            current = current.advance_time(&BTreeSet::new()).unwrap();
        }
        let after = format!("{:?}", current.eval_at(&growth, 0).unwrap());
        assert_eq!(before, after);
    }

    #[test]
    fn widening_the_mask_never_loses_definedness() {
        let u = demo_universe();
        let small: BTreeSet<String> = [String::from("I")].into();
        let large: BTreeSet<String> = ["I", "O"].iter().map(|s| s.to_string()).collect();
        for e in [growth_expr("I"), growth_expr("O"), shrink_expr("I")] {
            let with_small = u.advance_time(&small).unwrap().eval_at(&e, 1).unwrap();
            let with_large = u.advance_time(&large).unwrap().eval_at(&e, 1).unwrap();
            assert!(crate::tri::info_leq(with_small, with_large));
        }
    }
}

mod predictions {
    use super::*;

    #[test]
    fn confirmed_when_time_arrives_and_the_claim_holds() {
        let u = demo_universe();
        let u = u
            .record_prediction(&CellId::new("later"), True, 2)
            .unwrap();
        assert_eq!(u.predictions[0].status, PredictionStatus::Pending);

        // Verifying before the target time changes nothing.
        let early = u.verify_predictions().unwrap();
        assert_eq!(early.predictions[0].status, PredictionStatus::Pending);

        let mask: BTreeSet<String> = [String::from("I")].into();
        let u = u.advance_time(&mask).unwrap().advance_time(&mask).unwrap();
        let verified = u.verify_predictions().unwrap();
        assert_eq!(verified.predictions[0].status, PredictionStatus::Confirmed);
    }

    #[test]
    fn pending_forever_when_the_symbol_is_never_carried() {
        let u = demo_universe()
            .record_prediction(&CellId::new("later"), True, 2)
            .unwrap();
        let empty = BTreeSet::new();
        let u = u
            .advance_time(&empty)
            .unwrap()
            .advance_time(&empty)
            .unwrap();
        let verified = u.verify_predictions().unwrap();
        assert_eq!(verified.predictions[0].status, PredictionStatus::Pending);
    }

    #[test]
    fn refuted_when_the_value_comes_out_opposite() {
        let u = demo_universe()
            .record_prediction(&CellId::new("later"), False, 2)
            .unwrap();
        let mask: BTreeSet<String> = [String::from("I")].into();
        let u = u.advance_time(&mask).unwrap().advance_time(&mask).unwrap();
        let verified = u.verify_predictions().unwrap();
        assert_eq!(verified.predictions[0].status, PredictionStatus::Refuted);

        // Resolution is permanent.
        let again = verified.verify_predictions().unwrap();
        assert_eq!(again.predictions[0].status, PredictionStatus::Refuted);
    }

    #[test]
    fn rejects_past_targets_and_undefinable_claims() {
        let u = demo_universe();
        assert_eq!(
            u.record_prediction(&CellId::new("later"), True, 0)
                .unwrap_err(),
            UniverseError::NotAFuturePrediction { at: 0, now: 0 }
        );
        assert_eq!(
            u.record_prediction(&CellId::new("later"), Undefinable, 2)
                .unwrap_err(),
            UniverseError::UndefinableClaim
        );
        assert!(matches!(
            u.record_prediction(&CellId::new("missing"), True, 2),
            Err(UniverseError::UnknownCell(_))
        ));
        assert!(matches!(
            u.record_prediction(&CellId::new("verdict"), True, 2),
            Err(UniverseError::NotAPredicateCell(_))
        ));
    }
}

mod classification {
    use super::*;

    #[test]
    fn total_translation_is_macrocosm() {
        let u = demo_universe();
        let tm = TranslationMap::new("u", "v")
            .with("I", "I2")
            .with("O", "O2")
            .with("g", "g2");
        assert_eq!(
            classify_operation(&u, &OpDescriptor::for_translation(&tm)),
            OpClass::Macrocosm
        );
    }

    #[test]
    fn single_term_translation_is_microcosm() {
        let u = demo_universe();
        let tm = TranslationMap::new("u", "v").with("I", "I2");
        assert_eq!(
            classify_operation(&u, &OpDescriptor::for_translation(&tm)),
            OpClass::Microcosm
        );
    }

    #[test]
    fn merge_touching_all_cells_is_macrocosm_when_cells_cover_the_vocabulary() {
        let mut u = demo_universe();
        // Add cells using g and O so the grid covers the whole vocabulary.
        let uses_g = StateCell::new(
            "uses_g",
            Coordinate::new(2, 2, 0),
            "g observed",
            CellContent::PredicateState(parse("g(0) = 0", &u.vocab).unwrap()),
        )
        .unwrap();
        let uses_o = StateCell::new(
            "uses_o",
            Coordinate::new(3, 3, 0),
            "output growth",
            CellContent::PredicateState(growth_expr("O")),
        )
        .unwrap();
        u = u.insert_cell(uses_g).unwrap().insert_cell(uses_o).unwrap();
        let all: Vec<CellId> = u.grid.ids().cloned().collect();
        assert_eq!(
            classify_operation(&u, &OpDescriptor::for_merge(&u, &all)),
            OpClass::Macrocosm
        );
        let one = [CellId::new("growth")];
        assert_eq!(
            classify_operation(&u, &OpDescriptor::for_merge(&u, &one)),
            OpClass::Microcosm
        );
    }
}

mod codomain {
    use super::*;

    #[test]
    fn fully_interpreted_universe_is_verifiable() {
        let mut u = demo_universe();
        // Interpret g so every referenced symbol is known.
        u.models[0] = u.models[0]
            .clone()
            .with_mapping("g", vec![(Value::int(0), Value::int(0))]);
        let report = u.codomain_check();
        assert!(report.verifiable);
        assert!(report.offending.is_empty());
    }

    #[test]
    fn uninterpreted_symbol_is_reported_per_cell() {
        let mut u = demo_universe();
        let uses_g = StateCell::new(
            "uses_g",
            Coordinate::new(2, 2, 0),
            "g observed",
            CellContent::PredicateState(parse("g(0) = 0", &u.vocab).unwrap()),
        )
        .unwrap();
        u = u.insert_cell(uses_g).unwrap();
        let report = u.codomain_check();
        assert!(!report.verifiable);
        assert_eq!(report.offending.len(), 1);
        assert_eq!(report.offending[0].0, CellId::new("uses_g"));
        assert_eq!(
            report.offending[0].1,
            [String::from("g")].into_iter().collect::<BTreeSet<_>>()
        );
    }

    #[test]
    fn everything_offends_after_a_blank_tick() {
        let u = demo_universe().advance_time(&BTreeSet::new()).unwrap();
        let report = u.codomain_check();
        assert!(!report.verifiable);
        let predicate_cells = u
            .grid
            .cells()
            .filter(|c| matches!(c.content, CellContent::PredicateState(_)))
            .count();
        assert_eq!(report.offending.len(), predicate_cells);
    }
}
