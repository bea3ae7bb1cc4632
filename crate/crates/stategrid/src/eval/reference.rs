//! The two reference judgments shipped with the engine: continuity of a
//! mapping over finite carriers, and the growth-based combined judgment
//! over timed families. Both come with their vocabularies, depth
//! registries, fixture models, and grid placements.

use std::collections::BTreeSet;

use super::{
    booleanize, input_growth_body, internal_process_body, output_emission_body, JudgmentFn, Model,
    Value,
};
use crate::grid::StateCell;
use crate::lang::{parse, Expr, SymbolKind, Vocabulary};
use crate::rat::rat;
use crate::stratify::{
    component_cells, judgment_cell, judgment_over, truth_cell, DepthRegistry, Mode, StratifyError,
};

/// The continuity predicate body. `Func(f)` requires `f` to be a function;
/// the quantified part is the usual epsilon-delta condition, with the
/// epsilon and delta ranges named separately so fixtures can pin them
/// independently.
pub const CONTINUITY_TEXT: &str = "Func(f) and (forall a in R . forall eps in Reps . \
     exists delta in Rdelta . forall x in R . \
     (abs(x - a) < delta -> abs(f(x) - f(a)) < eps))";

pub fn continuity_vocabulary() -> Vocabulary {
    let mut v = Vocabulary::new();
    v.declare("R", SymbolKind::CarrierSet).unwrap();
    v.declare("Reps", SymbolKind::CarrierSet).unwrap();
    v.declare("Rdelta", SymbolKind::CarrierSet).unwrap();
    v.declare("f", SymbolKind::Mapping(1)).unwrap();
    v
}

pub fn continuity_body() -> Expr {
    parse(CONTINUITY_TEXT, &continuity_vocabulary()).expect("reference body parses")
}

pub fn continuity_judgment() -> JudgmentFn {
    booleanize("Cont", continuity_body(), "f").expect("f is free in the body")
}

/// Default registry plus the continuity carriers and mapping, all at the
/// complete-field depth.
pub fn continuity_registry() -> DepthRegistry {
    let mut reg = DepthRegistry::with_defaults();
    for name in ["R", "Reps", "Rdelta", "f"] {
        reg.set(name, 5);
    }
    reg
}

fn rationals(values: &[(i64, i64)]) -> Vec<Value> {
    values.iter().map(|&(n, d)| Value::rational(rat(n, d))).collect()
}

/// The identity mapping on {0, 1/2, 1}, with epsilon and delta both
/// ranging over {1/4, 1}. Continuous on this grid: delta = 1/4 isolates
/// each point.
pub fn identity_model() -> Model {
    Model::new()
        .with_carrier("R", rationals(&[(0, 1), (1, 2), (1, 1)]))
        .with_carrier("Reps", rationals(&[(1, 4), (1, 1)]))
        .with_carrier("Rdelta", rationals(&[(1, 4), (1, 1)]))
        .with_mapping(
            "f",
            rationals(&[(0, 1), (1, 2), (1, 1)])
                .into_iter()
                .map(|v| (v.clone(), v)),
        )
}

/// A step mapping {(0,0), (1/2,0), (1,1)} with epsilon fixed at 1/4 and
/// delta fixed at 1. Every delta admits x = 1 near a = 1/2 with a jump of
/// size 1, so the judgment fails.
pub fn step_model() -> Model {
    Model::new()
        .with_carrier("R", rationals(&[(0, 1), (1, 2), (1, 1)]))
        .with_carrier("Reps", rationals(&[(1, 4)]))
        .with_carrier("Rdelta", rationals(&[(1, 1)]))
        .with_mapping(
            "f",
            vec![
                (Value::rational(rat(0, 1)), Value::rational(rat(0, 1))),
                (Value::rational(rat(1, 2)), Value::rational(rat(0, 1))),
                (Value::rational(rat(1, 1)), Value::rational(rat(1, 1))),
            ],
        )
}

/// Carriers only; the tested mapping is left uninterpreted.
pub fn uninterpreted_model() -> Model {
    Model::new()
        .with_carrier("R", rationals(&[(0, 1), (1, 2), (1, 1)]))
        .with_carrier("Reps", rationals(&[(1, 4), (1, 1)]))
        .with_carrier("Rdelta", rationals(&[(1, 4), (1, 1)]))
}

/// The grid cells of the continuity judgment in transparent mode: the
/// variable domains, the field arithmetic, the order predicate, the tested
/// mapping, the predicate body, its judgment, and the truth-value plane.
pub fn continuity_placement_cells(time: u32) -> Result<Vec<StateCell>, StratifyError> {
    let vocab = continuity_vocabulary();
    let reg = continuity_registry();
    let body = continuity_body();
    let mode = Mode::Transparent;
    let mut cells = component_cells(&body, "phi_cont", "phi_cont", &vocab, &reg, mode, time)?;
    cells.push(judgment_cell("Cont", &body, &vocab, &reg, mode, time)?);
    cells.push(truth_cell(&reg, time)?);
    Ok(cells)
}

pub fn intelligence_vocabulary() -> Vocabulary {
    let mut v = Vocabulary::new();
    for name in ["I", "O", "T", "V"] {
        v.declare(name, SymbolKind::TimedFamily).unwrap();
    }
    v
}

/// Default registry plus the observed families at the base-set depth.
pub fn intelligence_registry() -> DepthRegistry {
    let mut reg = DepthRegistry::with_defaults();
    for name in ["I", "O", "T", "V"] {
        reg.set(name, 2);
    }
    reg
}

pub fn input_judgment() -> JudgmentFn {
    booleanize("In", input_growth_body("I", "O"), "I").expect("I is free")
}

pub fn output_judgment() -> JudgmentFn {
    booleanize("Out", output_emission_body("I", "O"), "I").expect("I is free")
}

pub fn process_judgment() -> JudgmentFn {
    booleanize("Proc", internal_process_body("T", "V"), "T").expect("T is free")
}

fn atom_set(names: &[&str]) -> BTreeSet<Value> {
    names.iter().map(|n| Value::atom(n)).collect()
}

/// A fully interpreted family history: the input family grows then
/// shrinks, the output family grows throughout, and the observed
/// substructures equal the input family.
pub fn growth_model() -> Model {
    let input: Vec<(u32, BTreeSet<Value>)> = vec![
        (0, atom_set(&["a"])),
        (1, atom_set(&["a", "b"])),
        (2, atom_set(&["a"])),
    ];
    let output: Vec<(u32, BTreeSet<Value>)> = vec![
        (0, atom_set(&[])),
        (1, atom_set(&["x"])),
        (2, atom_set(&["x", "y"])),
    ];
    Model::new()
        .with_family("I", input.clone())
        .with_family("O", output)
        .with_family("T", input.clone())
        .with_family("V", input)
}

/// The grid cells of the combined growth judgment in elevating mode: the
/// base families, cardinality, time indices and their successor step, the
/// order predicates, the three structure predicates, their three tests,
/// the combined judgment, and the truth-value plane.
pub fn intelligence_placement_cells(time: u32) -> Result<Vec<StateCell>, StratifyError> {
    let vocab = intelligence_vocabulary();
    let reg = intelligence_registry();
    let mode = Mode::Elevating;

    let c_in_body = input_growth_body("I", "O");
    let c_out_body = output_emission_body("I", "O");
    let c_proc_body = internal_process_body("T", "V");

    let mut by_id = std::collections::BTreeMap::new();
    for (id, body) in [
        ("C_i", &c_in_body),
        ("C_o", &c_out_body),
        ("C_p", &c_proc_body),
    ] {
        for cell in component_cells(body, id, id, &vocab, &reg, mode, time)? {
            by_id.entry(cell.id.clone()).or_insert(cell);
        }
    }

    let tests = [
        judgment_cell("In", &c_in_body, &vocab, &reg, mode, time)?,
        judgment_cell("Out", &c_out_body, &vocab, &reg, mode, time)?,
        judgment_cell("Proc", &c_proc_body, &vocab, &reg, mode, time)?,
    ];
    let combined = judgment_over("Int", &tests.iter().collect::<Vec<_>>(), time)?;

    let mut cells: Vec<StateCell> = by_id.into_values().collect();
    cells.extend(tests);
    cells.push(combined);
    cells.push(truth_cell(&reg, time)?);
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeMap, BTreeSet};

    use super::*;
    use crate::grid::Grid;
    use crate::stratify::{hierarchy_of, report};

    fn coordinate_set(cells: &[StateCell]) -> BTreeSet<(u32, u32)> {
        cells
            .iter()
            .map(|c| (c.coord.depth, c.coord.hierarchy))
            .collect()
    }

    fn labels_by_coordinate(cells: &[StateCell]) -> BTreeMap<(u32, u32), BTreeSet<String>> {
        let mut out: BTreeMap<(u32, u32), BTreeSet<String>> = BTreeMap::new();
        for c in cells {
            out.entry((c.coord.depth, c.coord.hierarchy))
                .or_default()
                .insert(c.label.clone());
        }
        out
    }

    #[test]
    fn continuity_places_on_seven_coordinates() {
        let cells = continuity_placement_cells(0).unwrap();
        assert_eq!(
            coordinate_set(&cells),
            BTreeSet::from([(5, 0), (4, 1), (3, 2), (5, 1), (5, 2), (5, 3), (1, 0)])
        );
        let labels = labels_by_coordinate(&cells);
        assert_eq!(
            labels[&(5, 0)],
            BTreeSet::from(["R".into(), "Reps".into(), "Rdelta".into()])
        );
        assert_eq!(labels[&(4, 1)], BTreeSet::from(["abs".to_string()]));
        assert_eq!(labels[&(3, 2)], BTreeSet::from(["<".to_string()]));
        assert_eq!(labels[&(5, 1)], BTreeSet::from(["f".to_string()]));
        assert_eq!(labels[&(5, 2)], BTreeSet::from(["phi_cont".to_string()]));
        assert_eq!(labels[&(5, 3)], BTreeSet::from(["Cont".to_string()]));
        assert_eq!(labels[&(1, 0)], BTreeSet::from(["Bool".to_string()]));
    }

    #[test]
    fn intelligence_places_on_nine_coordinates() {
        let cells = intelligence_placement_cells(0).unwrap();
        assert_eq!(
            coordinate_set(&cells),
            BTreeSet::from([
                (2, 0),
                (2, 1),
                (3, 0),
                (3, 1),
                (3, 2),
                (3, 3),
                (3, 4),
                (3, 5),
                (1, 0)
            ])
        );
        let labels = labels_by_coordinate(&cells);
        assert_eq!(
            labels[&(2, 0)],
            BTreeSet::from(["I".into(), "O".into(), "T".into(), "V".into()])
        );
        assert_eq!(labels[&(2, 1)], BTreeSet::from(["card".to_string()]));
        assert_eq!(labels[&(3, 0)], BTreeSet::from(["i, i+1".to_string()]));
        assert_eq!(labels[&(3, 1)], BTreeSet::from(["succ".to_string()]));
        assert_eq!(
            labels[&(3, 2)],
            BTreeSet::from(["<".to_string(), ">".to_string()])
        );
        assert_eq!(
            labels[&(3, 3)],
            BTreeSet::from(["C_i".into(), "C_o".into(), "C_p".into()])
        );
        assert_eq!(
            labels[&(3, 4)],
            BTreeSet::from(["In".into(), "Out".into(), "Proc".into()])
        );
        assert_eq!(labels[&(3, 5)], BTreeSet::from(["Int".to_string()]));
        assert_eq!(labels[&(1, 0)], BTreeSet::from(["Bool".to_string()]));
    }

    #[test]
    fn judgment_sits_one_level_above_its_body() {
        let vocab = continuity_vocabulary();
        let body = continuity_body();
        assert_eq!(hierarchy_of(&body, &vocab, Mode::Transparent), 2);
        assert_eq!(continuity_judgment().hierarchy(&vocab, Mode::Transparent), 3);
    }

    #[test]
    fn placement_grid_is_structurally_sound_and_reportable() {
        let grid = Grid::from_cells(continuity_placement_cells(0).unwrap()).unwrap();
        grid.validate_hierarchy().unwrap();
        let text = report(&grid);
        let expected = "depth\thierarchy\ttime\tlabels\n\
                        1\t0\t0\tBool\n\
                        3\t2\t0\t<\n\
                        4\t1\t0\tabs\n\
                        5\t0\t0\tR, Rdelta, Reps\n\
                        5\t1\t0\tf\n\
                        5\t2\t0\tphi_cont\n\
                        5\t3\t0\tCont\n";
        assert_eq!(text, expected);

        let grid = Grid::from_cells(intelligence_placement_cells(0).unwrap()).unwrap();
        grid.validate_hierarchy().unwrap();
    }
}
