//! Seeded random generators for well-formed expressions, models, and
//! universes. Test-only machinery: compiled for this crate's own tests and
//! for downstream test suites via the `testgen` feature. Generation is
//! fully deterministic in the seed.

use std::collections::BTreeSet;

use rand::prelude::*;

use crate::eval::{Model, Value};
use crate::grid::{CellContent, Coordinate, StateCell};
use crate::lang::{check_well_formed, CmpOp, Expr, IndexExpr, SymbolKind, Vocabulary};
use crate::rat::rat;
use crate::stratify::DepthRegistry;
use crate::tri::TriValue;
use crate::universe::Universe;

pub const CARRIERS: [&str; 2] = ["S", "Q"];
pub const MAPPINGS: [&str; 2] = ["f", "g"];
pub const FAMILIES: [&str; 2] = ["I", "O"];

/// Two carriers, two unary mappings, two timed families.
pub fn std_vocab() -> Vocabulary {
    let mut v = Vocabulary::new();
    for c in CARRIERS {
        v.declare(c, SymbolKind::CarrierSet).unwrap();
    }
    for m in MAPPINGS {
        v.declare(m, SymbolKind::Mapping(1)).unwrap();
    }
    for f in FAMILIES {
        v.declare(f, SymbolKind::TimedFamily).unwrap();
    }
    v
}

pub fn std_registry() -> DepthRegistry {
    let mut reg = DepthRegistry::with_defaults();
    for c in CARRIERS {
        reg.set(c, 2);
    }
    for m in MAPPINGS {
        reg.set(m, 4);
    }
    for f in FAMILIES {
        reg.set(f, 2);
    }
    reg
}

fn small_rational(rng: &mut impl Rng) -> Expr {
    Expr::num(rat(rng.gen_range(-2..=2), rng.gen_range(1..=3)))
}

fn point_values() -> Vec<Value> {
    vec![
        Value::rational(rat(-1, 1)),
        Value::rational(rat(0, 1)),
        Value::rational(rat(1, 2)),
        Value::rational(rat(1, 1)),
        Value::rational(rat(2, 1)),
    ]
}

/// A random well-formed formula with nesting bounded by `depth`. Every
/// generated expression passes `check_well_formed` against [`std_vocab`].
pub fn gen_formula(rng: &mut impl Rng, depth: u32) -> Expr {
    gen_with(rng, depth, false)
}

/// Like [`gen_formula`], but mapping arguments are kept to variables and
/// pool literals. Against an `interpret_all` model from [`gen_model`],
/// every application such a formula makes is defined, so evaluation stays
/// classical.
pub fn gen_formula_classical(rng: &mut impl Rng, depth: u32) -> Expr {
    gen_with(rng, depth, true)
}

fn gen_with(rng: &mut impl Rng, depth: u32, classical: bool) -> Expr {
    let mut scope = Vec::new();
    let e = formula(rng, depth, &mut scope, classical);
    debug_assert!(check_well_formed(&e, &std_vocab()).is_ok());
    e
}

fn formula(rng: &mut impl Rng, depth: u32, scope: &mut Vec<String>, classical: bool) -> Expr {
    if depth == 0 {
        return leaf_formula(rng, scope, classical);
    }
    match rng.gen_range(0..8) {
        0 => Expr::negate(formula(rng, depth - 1, scope, classical)),
        1 => Expr::and(
            formula(rng, depth - 1, scope, classical),
            formula(rng, depth - 1, scope, classical),
        ),
        2 => Expr::or(
            formula(rng, depth - 1, scope, classical),
            formula(rng, depth - 1, scope, classical),
        ),
        3 => Expr::implies(
            formula(rng, depth - 1, scope, classical),
            formula(rng, depth - 1, scope, classical),
        ),
        4 | 5 => {
            let var = format!("v{}", scope.len());
            let carrier = *CARRIERS.choose(rng).unwrap();
            scope.push(var.clone());
            let body = formula(rng, depth - 1, scope, classical);
            scope.pop();
            if rng.gen_bool(0.5) {
                Expr::forall(&var, carrier, body)
            } else {
                Expr::exists(&var, carrier, body)
            }
        }
        _ => leaf_formula(rng, scope, classical),
    }
}

fn leaf_formula(rng: &mut impl Rng, scope: &mut Vec<String>, classical: bool) -> Expr {
    match rng.gen_range(0..6) {
        0 | 1 => {
            let op = *[CmpOp::Lt, CmpOp::Gt, CmpOp::Eq, CmpOp::Le, CmpOp::Ge]
                .choose(rng)
                .unwrap();
            Expr::cmp(
                op,
                term(rng, 1, scope, classical),
                term(rng, 1, scope, classical),
            )
        }
        2 => Expr::Member(
            Box::new(term(rng, 1, scope, classical)),
            Box::new(set_expr(rng, scope, classical)),
        ),
        3 => Expr::SubsetOf(
            Box::new(set_expr(rng, scope, classical)),
            Box::new(set_expr(rng, scope, classical)),
        ),
        4 => Expr::app(
            crate::lang::SYM_FUNC,
            vec![Expr::atom(MAPPINGS.choose(rng).unwrap())],
        ),
        _ => Expr::cmp(
            CmpOp::Ge,
            Expr::card(set_expr(rng, scope, classical)),
            literal(rng, classical),
        ),
    }
}

fn literal(rng: &mut impl Rng, classical: bool) -> Expr {
    if classical {
        Expr::num(
            match point_values().choose(rng).unwrap() {
                Value::Num(r) => r.clone(),
                _ => unreachable!("pool holds rationals"),
            },
        )
    } else {
        small_rational(rng)
    }
}

fn leaf_term(rng: &mut impl Rng, scope: &[String], classical: bool) -> Expr {
    if !scope.is_empty() && rng.gen_bool(0.5) {
        Expr::atom(scope.choose(rng).unwrap())
    } else {
        literal(rng, classical)
    }
}

fn term(rng: &mut impl Rng, depth: u32, scope: &mut Vec<String>, classical: bool) -> Expr {
    if depth == 0 || (scope.is_empty() && rng.gen_bool(0.3)) {
        return leaf_term(rng, scope, classical);
    }
    match rng.gen_range(0..6) {
        0 => {
            // In classical mode only variables and pool literals feed
            // mappings, keeping applications inside the fixture domain.
            let arg = if classical {
                leaf_term(rng, scope, classical)
            } else {
                term(rng, depth - 1, scope, classical)
            };
            Expr::app(MAPPINGS.choose(rng).unwrap(), vec![arg])
        }
        1 => Expr::app(
            crate::lang::SYM_PLUS,
            vec![
                term(rng, depth - 1, scope, classical),
                term(rng, depth - 1, scope, classical),
            ],
        ),
        2 => Expr::app(
            crate::lang::SYM_MINUS,
            vec![
                term(rng, depth - 1, scope, classical),
                term(rng, depth - 1, scope, classical),
            ],
        ),
        3 => Expr::AbsDiff(
            Box::new(term(rng, depth - 1, scope, classical)),
            Box::new(term(rng, depth - 1, scope, classical)),
        ),
        4 => Expr::card(set_expr(rng, scope, classical)),
        _ => leaf_term(rng, scope, classical),
    }
}

fn set_expr(rng: &mut impl Rng, scope: &[String], classical: bool) -> Expr {
    match rng.gen_range(0..4) {
        0 => Expr::atom(CARRIERS.choose(rng).unwrap()),
        1 => {
            let idx = match rng.gen_range(0..3) {
                0 => IndexExpr::Var,
                1 => IndexExpr::Succ,
                _ => IndexExpr::Lit(rng.gen_range(0..3)),
            };
            Expr::at_time(FAMILIES.choose(rng).unwrap(), idx)
        }
        _ => {
            let n = rng.gen_range(0..3);
            Expr::SetLit((0..n).map(|_| leaf_term(rng, scope, classical)).collect())
        }
    }
}

/// A random model over [`std_vocab`]. With `interpret_all`, every symbol
/// is interpreted and mappings are total functions on their carrier, so
/// classical two-valued evaluation applies. Otherwise each symbol is
/// independently left out with some probability and relations may be
/// partial or ambiguous.
pub fn gen_model(rng: &mut impl Rng, interpret_all: bool) -> Model {
    let pool = point_values();
    let mut m = Model::new();

    let mut carrier_sets = Vec::new();
    for name in CARRIERS {
        let size = rng.gen_range(1..=3);
        let mut set = BTreeSet::new();
        while set.len() < size {
            set.insert(pool.choose(rng).unwrap().clone());
        }
        carrier_sets.push(set.clone());
        if interpret_all || rng.gen_bool(0.8) {
            m = m.with_carrier(name, set);
        }
    }

    for name in MAPPINGS {
        if !interpret_all && rng.gen_bool(0.25) {
            continue;
        }
        let mut pairs = Vec::new();
        if interpret_all {
            // Total function on the union of both carriers, so every
            // application a generated term can make is defined.
            let mut domain: BTreeSet<Value> = BTreeSet::new();
            for set in &carrier_sets {
                domain.extend(set.iter().cloned());
            }
            domain.extend(pool.iter().cloned());
            for x in domain {
                pairs.push((x, pool.choose(rng).unwrap().clone()));
            }
        } else {
            for _ in 0..rng.gen_range(0..5) {
                pairs.push((
                    pool.choose(rng).unwrap().clone(),
                    pool.choose(rng).unwrap().clone(),
                ));
            }
        }
        m = m.with_mapping(name, pairs);
    }

    for name in FAMILIES {
        if !interpret_all && rng.gen_bool(0.25) {
            continue;
        }
        let atoms = ["a", "b", "c", "d"];
        let mut series = Vec::new();
        for idx in 0..=4u32 {
            if !interpret_all && rng.gen_bool(0.25) {
                continue;
            }
            let size = rng.gen_range(0..=3);
            let set: BTreeSet<Value> = atoms
                .choose_multiple(rng, size)
                .map(|a| Value::atom(a))
                .collect();
            series.push((idx, set));
        }
        if interpret_all && series.is_empty() {
            series.push((0, BTreeSet::new()));
        }
        m = m.with_family(name, series);
    }

    m
}

/// Drops each interpreted symbol with probability 1/2, producing a model
/// that knows strictly less and agrees on what it keeps.
pub fn thin_model(rng: &mut impl Rng, m: &Model) -> Model {
    let keep: BTreeSet<String> = m
        .interpreted
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect();
    m.masked(&keep)
}

/// A small universe whose contents stay inside the textual document
/// format: rational carriers, rational mapping pairs, atom families.
pub fn gen_universe(rng: &mut impl Rng, id: &str) -> Universe {
    let mut u = Universe::new(id);
    let mut vocab = Vocabulary::new();
    vocab.declare("S", SymbolKind::CarrierSet).unwrap();
    vocab.declare("m", SymbolKind::Mapping(1)).unwrap();
    vocab.declare("F", SymbolKind::TimedFamily).unwrap();
    u.vocab = vocab;
    for (name, depth) in [("S", 2), ("m", 4), ("F", 2)] {
        u.registry.set(name, depth);
    }

    let pool = point_values();
    let mut model = Model::new();
    if rng.gen_bool(0.9) {
        let set: BTreeSet<Value> = (0..rng.gen_range(0..=3))
            .map(|_| pool.choose(rng).unwrap().clone())
            .collect();
        model = model.with_carrier("S", set);
    }
    if rng.gen_bool(0.9) {
        let pairs: Vec<(Value, Value)> = (0..rng.gen_range(0..=3))
            .map(|_| {
                (
                    pool.choose(rng).unwrap().clone(),
                    pool.choose(rng).unwrap().clone(),
                )
            })
            .collect();
        model = model.with_mapping("m", pairs);
    }
    if rng.gen_bool(0.9) {
        let atoms = ["a", "b", "c"];
        let series: Vec<(u32, BTreeSet<Value>)> = (0..=rng.gen_range(0..=3u32))
            .map(|idx| {
                let size = rng.gen_range(0..=3);
                (
                    idx,
                    atoms
                        .choose_multiple(rng, size)
                        .map(|a| Value::atom(a))
                        .collect(),
                )
            })
            .collect();
        model = model.with_family("F", series);
    }
    u.models[0] = model;

    let n_cells = rng.gen_range(1..=6);
    for k in 0..n_cells {
        u = u.insert_cell(gen_cell(rng, &format!("cell{k}"))).unwrap();
    }

    // Sometimes advance time and record a prediction, so serialized
    // universes exercise multiple snapshots and the prediction section.
    if rng.gen_bool(0.4) {
        let mask: BTreeSet<String> = ["S", "m", "F"]
            .iter()
            .filter(|_| rng.gen_bool(0.5))
            .map(|s| s.to_string())
            .collect();
        u = u.advance_time(&mask).unwrap();
    }
    if rng.gen_bool(0.4) {
        let pred_cells: Vec<_> = u
            .grid
            .cells()
            .filter(|c| matches!(c.content, CellContent::PredicateState(_)))
            .map(|c| c.id.clone())
            .collect();
        if let Some(cell) = pred_cells.first() {
            let claim = if rng.gen_bool(0.5) {
                TriValue::True
            } else {
                TriValue::False
            };
            u = u
                .record_prediction(cell, claim, u.t_max() + rng.gen_range(1..=2))
                .unwrap();
        }
    }
    u
}

/// A cell drawn from the universe's little vocabulary.
pub fn gen_cell(rng: &mut impl Rng, id: &str) -> StateCell {
    let coord = Coordinate::new(rng.gen_range(0..=5), rng.gen_range(0..=3), 0);
    let label = format!("L{}", rng.gen_range(0..100));
    match rng.gen_range(0..4) {
        0 => StateCell::new(id, coord, &label, CellContent::GroundSet("S".to_string())).unwrap(),
        1 => StateCell::new(
            id,
            coord,
            &label,
            CellContent::MappingDecl {
                name: "m".to_string(),
                arity: 1,
            },
        )
        .unwrap(),
        2 => {
            let value = *[TriValue::True, TriValue::False, TriValue::Undefinable]
                .choose(rng)
                .unwrap();
            StateCell::new(
                id,
                Coordinate::new(1, coord.hierarchy, coord.time),
                &label,
                CellContent::TruthResult(value),
            )
            .unwrap()
        }
        _ => {
            let body = match rng.gen_range(0..3) {
                0 => crate::eval::growth_expr("F"),
                1 => crate::eval::shrink_expr("F"),
                _ => Expr::cmp(
                    CmpOp::Eq,
                    Expr::app("m", vec![Expr::num(rat(0, 1))]),
                    Expr::num(rat(0, 1)),
                ),
            };
            StateCell::new(id, coord, &label, CellContent::PredicateState(body)).unwrap()
        }
    }
}

/// One random in-place cell edit (relabel, retag, flip a truth result, or
/// add a cell). Distinct `salt`s give edits that cannot collide on added
/// cell ids.
pub fn gen_edit(rng: &mut impl Rng, u: &Universe, salt: &str) -> Universe {
    let ids: Vec<_> = u.grid.ids().cloned().collect();
    match rng.gen_range(0..4) {
        0 => {
            let cell_id = ids.choose(rng).unwrap();
            let mut cells: Vec<StateCell> = u.grid.cells().cloned().collect();
            for c in &mut cells {
                if &c.id == cell_id {
                    c.label = format!("edited-{}", rng.gen_range(0..1000));
                }
            }
            with_cells(u, cells)
        }
        1 => {
            let cell_id = ids.choose(rng).unwrap();
            let mut cells: Vec<StateCell> = u.grid.cells().cloned().collect();
            for c in &mut cells {
                if &c.id == cell_id {
                    if let CellContent::TruthResult(v) = c.content {
                        c.content = CellContent::TruthResult(crate::tri::not3(v));
                    } else {
                        c.tags.insert(format!("t{}", rng.gen_range(0..10)));
                    }
                }
            }
            with_cells(u, cells)
        }
        2 => {
            let id = format!("added-{salt}-{}", rng.gen_range(0..1000));
            u.insert_cell(gen_cell(rng, &id)).unwrap()
        }
        _ => {
            let cell_id = ids.choose(rng).unwrap();
            let mut cells: Vec<StateCell> = u.grid.cells().cloned().collect();
            for c in &mut cells {
                if &c.id == cell_id {
                    c.tags.insert(format!("tag{}", rng.gen_range(0..10)));
                }
            }
            with_cells(u, cells)
        }
    }
}

fn with_cells(u: &Universe, cells: Vec<StateCell>) -> Universe {
    let mut next = u.clone();
    next.grid = crate::grid::Grid::from_cells(cells).unwrap();
    next
}
