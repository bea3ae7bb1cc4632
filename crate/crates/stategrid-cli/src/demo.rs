//! The two bundled end-to-end demonstrations: the continuity judgment and
//! the combined growth judgment, each shown as a placement table plus live
//! verdicts on the bundled fixtures.

use stategrid::eval::reference::{
    continuity_judgment, continuity_placement_cells, continuity_vocabulary, growth_model,
    identity_model, intelligence_placement_cells, intelligence_vocabulary, step_model,
    uninterpreted_model,
};
use stategrid::eval::{int_literal, int_windowed, SubsetMode};
use stategrid::grid::Grid;
use stategrid::stratify::report;

pub fn demo_continuity() -> String {
    let cells = continuity_placement_cells(0).expect("reference placement is well-formed");
    let grid = Grid::from_cells(cells).expect("reference cell ids are unique");
    let vocab = continuity_vocabulary();
    let judgment = continuity_judgment();

    let identity = judgment
        .apply(&vocab, &identity_model(), "f")
        .expect("fixture evaluates");
    let step = judgment
        .apply(&vocab, &step_model(), "f")
        .expect("fixture evaluates");
    let unknown = judgment
        .apply(&vocab, &uninterpreted_model(), "f")
        .expect("fixture evaluates");

    let mut out = String::new();
    out.push_str("continuity judgment placement (transparent mode)\n");
    out.push_str(&report(&grid));
    out.push_str("verdicts\n");
    out.push_str(&format!(
        "  identity mapping on {{0, 1/2, 1}}: {identity}\n"
    ));
    out.push_str(&format!(
        "  step mapping {{(0,0),(1/2,0),(1,1)}}: {step}\n"
    ));
    out.push_str(&format!("  uninterpreted mapping: {unknown}\n"));
    out
}

pub fn demo_intelligence() -> String {
    let cells = intelligence_placement_cells(0).expect("reference placement is well-formed");
    let grid = Grid::from_cells(cells).expect("reference cell ids are unique");
    let vocab = intelligence_vocabulary();
    let m = growth_model();

    let mut out = String::new();
    out.push_str("combined growth judgment placement (elevating mode)\n");
    out.push_str(&report(&grid));

    out.push_str("single-index judgment (growth and shrink demanded at one index)\n");
    for i in [0u32, 1] {
        let v = int_literal("I", "O", "T", "V", i, &vocab, &m, SubsetMode::Declared)
            .expect("fixture evaluates");
        out.push_str(&format!("  index {i}: {v}\n"));
    }
    out.push_str("  the input clause requires growth while the output clause requires\n");
    out.push_str("  shrinkage of the same family, so no single index can satisfy both\n");

    let windowed = int_windowed("I", "O", "T", "V", &[0, 1], &vocab, &m, SubsetMode::Declared)
        .expect("fixture evaluates");
    out.push_str(&format!("windowed judgment over {{0, 1}}: {windowed}\n"));
    out
}
