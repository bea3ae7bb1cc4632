//! Placement of expressions on the grid.
//!
//! The *hierarchy* of a node is computed from its shape: labels are 0th
//! order, a mapping applied to labels is 1st order, a predicate over an
//! order-k object is order k+1. Connectives and quantifiers come in two
//! conventions, selected by [`Mode`]: `Transparent` keeps a composition at
//! the order of its parts, `Elevating` treats each composition layer as one
//! more mapping order. Both are legitimate readings and both are kept.
//!
//! The *depth* of a node is not computed but assigned: every symbol carries
//! a registry depth, a bound variable carries the depth of its quantifier
//! domain, and a composite sits at the maximum depth used anywhere in its
//! subtree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::grid::{CellContent, Coordinate, Grid, GridError, StateCell};
use crate::lang::{CmpOp, Expr, IndexExpr, SymbolKind, Vocabulary, SYM_MINUS, SYM_PLUS};

/// Registry key for rational literals.
pub const DEPTH_RATIONAL: &str = "rational";
/// Registry key for set literals.
pub const DEPTH_SET: &str = "set";
/// Registry key for the truth-value plane.
pub const DEPTH_BOOL: &str = "Bool";
/// Registry key for time indices.
pub const DEPTH_TIME: &str = "i";
/// Registry key for the index successor step.
pub const DEPTH_SUCC: &str = "succ";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Connectives and quantifiers stay at the order of their parts.
    Transparent,
    /// Each composition layer adds one mapping order.
    Elevating,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Transparent => write!(f, "transparent"),
            Mode::Elevating => write!(f, "elevating"),
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "transparent" => Ok(Mode::Transparent),
            "elevating" => Ok(Mode::Elevating),
            other => Err(format!(
                "unknown mode `{other}` (expected `transparent` or `elevating`)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StratifyError {
    #[error("symbol `{0}` has no depth registry entry")]
    UnregisteredSymbol(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Depth assignments per symbol. Depth is a modelling choice, not a
/// computed quantity, so the registry is user-editable; `with_defaults`
/// seeds the conventional column layout: truth values at 1, cardinality
/// and set relations at 2, order and time at 3, field arithmetic at 4,
/// and the function-ness test at 5.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DepthRegistry {
    entries: BTreeMap<String, u32>,
}

impl DepthRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn with_defaults() -> Self {
        let mut reg = Self::default();
        for (name, depth) in [
            (DEPTH_BOOL, 1),
            ("card", 2),
            ("subset", 2),
            ("in", 2),
            (DEPTH_SET, 2),
            ("<", 3),
            (">", 3),
            ("=", 3),
            ("<=", 3),
            (">=", 3),
            (DEPTH_TIME, 3),
            (DEPTH_SUCC, 3),
            (SYM_PLUS, 4),
            (SYM_MINUS, 4),
            ("abs", 4),
            (DEPTH_RATIONAL, 4),
            (crate::lang::SYM_FUNC, 5),
        ] {
            reg.entries.insert(name.to_string(), depth);
        }
        reg
    }

    pub fn set(&mut self, name: &str, depth: u32) {
        self.entries.insert(name.to_string(), depth);
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.entries.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<u32, StratifyError> {
        self.get(name)
            .ok_or_else(|| StratifyError::UnregisteredSymbol(name.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, u32)> {
        self.entries.iter().map(|(n, d)| (n.as_str(), *d))
    }
}

/// Mapping hierarchy of an expression under the given composition mode.
pub fn hierarchy_of(e: &Expr, vocab: &Vocabulary, mode: Mode) -> u32 {
    match e {
        Expr::Atom(n) => match vocab.kind_of(n) {
            Some(SymbolKind::Mapping(_)) | Some(SymbolKind::Predicate) => 1,
            _ => 0,
        },
        Expr::Num(_) | Expr::SetLit(_) | Expr::AtTime(_, _) => 0,
        // An application is one order above its arguments *as objects*:
        // an application result is a plain value, so composing mappings
        // stays 1st order; passing an unapplied mapping symbol (as the
        // function-ness test does) makes the applier 2nd order.
        Expr::App(_, args) => 1 + args.iter().map(|a| object_order(a, vocab)).max().unwrap_or(0),
        Expr::AbsDiff(a, b) => 1 + object_order(a, vocab).max(object_order(b, vocab)),
        // Cardinality always treats its operand as a plain object.
        Expr::Card(_) => 1,
        Expr::Cmp(_, a, b) | Expr::Member(a, b) | Expr::SubsetOf(a, b) => {
            1 + hierarchy_of(a, vocab, mode).max(hierarchy_of(b, vocab, mode))
        }
        Expr::Not(x) => match mode {
            Mode::Transparent => hierarchy_of(x, vocab, mode),
            Mode::Elevating => 1 + hierarchy_of(x, vocab, mode),
        },
        Expr::And(_, _) => composition(e, conj_parts(e), vocab, mode),
        Expr::Or(_, _) => composition(e, disj_parts(e), vocab, mode),
        Expr::Implies(a, b) => {
            let inner = hierarchy_of(a, vocab, mode).max(hierarchy_of(b, vocab, mode));
            match mode {
                Mode::Transparent => inner,
                Mode::Elevating => 1 + inner,
            }
        }
        Expr::Forall(_, _, _) | Expr::Exists(_, _, _) => {
            let body = skip_same_quantifier(e);
            match mode {
                Mode::Transparent => hierarchy_of(body, vocab, mode),
                Mode::Elevating => 1 + hierarchy_of(body, vocab, mode),
            }
        }
    }
}

/// The order of an expression when handed over as an object: an unapplied
/// mapping symbol is a 1st-order thing, everything that denotes a value or
/// a set is 0th order.
fn object_order(e: &Expr, vocab: &Vocabulary) -> u32 {
    match e {
        Expr::Atom(n) => match vocab.kind_of(n) {
            Some(SymbolKind::Mapping(_)) | Some(SymbolKind::Predicate) => 1,
            _ => 0,
        },
        _ => 0,
    }
}

fn composition(whole: &Expr, parts: Vec<&Expr>, vocab: &Vocabulary, mode: Mode) -> u32 {
    match mode {
        Mode::Transparent => whole
            .children()
            .iter()
            .map(|c| hierarchy_of(c, vocab, mode))
            .max()
            .unwrap_or(0),
        // A run of the same associative connective counts as one layer,
        // so an n-ary conjunction is not taller than a binary one.
        Mode::Elevating => {
            1 + parts
                .iter()
                .map(|p| hierarchy_of(p, vocab, mode))
                .max()
                .unwrap_or(0)
        }
    }
}

fn conj_parts(e: &Expr) -> Vec<&Expr> {
    fn go<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
        if let Expr::And(a, b) = e {
            go(a, out);
            go(b, out);
        } else {
            out.push(e);
        }
    }
    let mut out = Vec::new();
    go(e, &mut out);
    out
}

fn disj_parts(e: &Expr) -> Vec<&Expr> {
    fn go<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
        if let Expr::Or(a, b) = e {
            go(a, out);
            go(b, out);
        } else {
            out.push(e);
        }
    }
    let mut out = Vec::new();
    go(e, &mut out);
    out
}

/// A run of same-kind binders counts as one quantification layer.
fn skip_same_quantifier(e: &Expr) -> &Expr {
    match e {
        Expr::Forall(_, _, _) => {
            let mut cur = e;
            while let Expr::Forall(_, _, body) = cur {
                cur = body;
            }
            cur
        }
        Expr::Exists(_, _, _) => {
            let mut cur = e;
            while let Expr::Exists(_, _, body) = cur {
                cur = body;
            }
            cur
        }
        _ => e,
    }
}

/// State depth of an expression: the maximum registry depth over every
/// symbol in the subtree, with bound variables contributing the depth of
/// their quantifier domain.
pub fn depth_of(e: &Expr, reg: &DepthRegistry) -> Result<u32, StratifyError> {
    depth_rec(e, reg, &mut Vec::new())
}

fn depth_rec(
    e: &Expr,
    reg: &DepthRegistry,
    bound: &mut Vec<(String, String)>,
) -> Result<u32, StratifyError> {
    let own = match e {
        Expr::Atom(n) => {
            let carrier = bound
                .iter()
                .rev()
                .find(|(v, _)| v == n)
                .map(|(_, c)| c.clone());
            match carrier {
                Some(c) => reg.require(&c)?,
                None => reg.require(n)?,
            }
        }
        Expr::Num(_) => reg.require(DEPTH_RATIONAL)?,
        Expr::SetLit(_) => reg.require(DEPTH_SET)?,
        Expr::App(f, _) => reg.require(f)?,
        Expr::Card(_) => reg.require("card")?,
        Expr::AbsDiff(_, _) => reg.require("abs")?,
        Expr::Cmp(op, _, _) => reg.require(op.symbol())?,
        Expr::Member(_, _) => reg.require("in")?,
        Expr::SubsetOf(_, _) => reg.require("subset")?,
        Expr::Not(_) | Expr::And(_, _) | Expr::Or(_, _) | Expr::Implies(_, _) => {
            reg.require(DEPTH_BOOL)?
        }
        Expr::Forall(_, c, _) | Expr::Exists(_, c, _) => reg.require(c)?,
        Expr::AtTime(f, _) => reg.require(f)?.max(reg.require(DEPTH_TIME)?),
    };

    let mut depth = own;
    match e {
        Expr::Forall(v, c, body) | Expr::Exists(v, c, body) => {
            bound.push((v.clone(), c.clone()));
            depth = depth.max(depth_rec(body, reg, bound)?);
            bound.pop();
        }
        _ => {
            for child in e.children() {
                depth = depth.max(depth_rec(child, reg, bound)?);
            }
        }
    }
    Ok(depth)
}

/// Per-node coordinates for a whole expression. Node ids are preorder
/// indices; the root is node 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub assignments: BTreeMap<usize, Coordinate>,
    pub mode: Mode,
}

impl Placement {
    pub fn root(&self) -> Coordinate {
        self.assignments[&0]
    }

    /// The set of distinct coordinates used.
    pub fn coordinates(&self) -> BTreeSet<Coordinate> {
        self.assignments.values().copied().collect()
    }
}

pub fn place(
    e: &Expr,
    vocab: &Vocabulary,
    reg: &DepthRegistry,
    mode: Mode,
    time: u32,
) -> Result<Placement, StratifyError> {
    let mut assignments = BTreeMap::new();
    let mut counter = 0usize;
    place_rec(
        e,
        vocab,
        reg,
        mode,
        time,
        &mut Vec::new(),
        &mut counter,
        &mut assignments,
    )?;
    Ok(Placement { assignments, mode })
}

#[allow(clippy::too_many_arguments)]
fn place_rec(
    e: &Expr,
    vocab: &Vocabulary,
    reg: &DepthRegistry,
    mode: Mode,
    time: u32,
    bound: &mut Vec<(String, String)>,
    counter: &mut usize,
    out: &mut BTreeMap<usize, Coordinate>,
) -> Result<u32, StratifyError> {
    let id = *counter;
    *counter += 1;

    let mut depth = depth_shallow(e, reg, bound)?;
    match e {
        Expr::Forall(v, c, body) | Expr::Exists(v, c, body) => {
            bound.push((v.clone(), c.clone()));
            depth = depth.max(place_rec(body, vocab, reg, mode, time, bound, counter, out)?);
            bound.pop();
        }
        _ => {
            for child in e.children() {
                depth = depth.max(place_rec(child, vocab, reg, mode, time, bound, counter, out)?);
            }
        }
    }

    let coord = Coordinate::new(depth, hierarchy_of(e, vocab, mode), time);
    out.insert(id, coord);
    Ok(depth)
}

fn depth_shallow(
    e: &Expr,
    reg: &DepthRegistry,
    bound: &[(String, String)],
) -> Result<u32, StratifyError> {
    match e {
        Expr::Atom(n) => {
            let carrier = bound.iter().rev().find(|(v, _)| v == n).map(|(_, c)| c);
            match carrier {
                Some(c) => reg.require(c),
                None => reg.require(n),
            }
        }
        Expr::Num(_) => reg.require(DEPTH_RATIONAL),
        Expr::SetLit(_) => reg.require(DEPTH_SET),
        Expr::App(f, _) => reg.require(f),
        Expr::Card(_) => reg.require("card"),
        Expr::AbsDiff(_, _) => reg.require("abs"),
        Expr::Cmp(op, _, _) => reg.require(op.symbol()),
        Expr::Member(_, _) => reg.require("in"),
        Expr::SubsetOf(_, _) => reg.require("subset"),
        Expr::Not(_) | Expr::And(_, _) | Expr::Or(_, _) | Expr::Implies(_, _) => {
            reg.require(DEPTH_BOOL)
        }
        Expr::Forall(_, c, _) | Expr::Exists(_, c, _) => reg.require(c),
        Expr::AtTime(f, _) => Ok(reg.require(f)?.max(reg.require(DEPTH_TIME)?)),
    }
}

/// The distinct symbol classes used by an expression, each with the
/// coordinate its kind of state occupies: domains at hierarchy 0, mappings
/// and cardinality at 1, order and set relations at 2, and the whole
/// predicate at its computed place. This is the view the grid tables take
/// of a definition; per-node coordinates are available via [`place`].
pub fn component_cells(
    e: &Expr,
    root_id: &str,
    root_label: &str,
    vocab: &Vocabulary,
    reg: &DepthRegistry,
    mode: Mode,
    time: u32,
) -> Result<Vec<StateCell>, StratifyError> {
    let mut uses = SymbolUses::default();
    collect_uses(e, vocab, &mut Vec::new(), &mut uses);

    let mut cells = Vec::new();
    for name in &uses.carriers {
        cells.push(StateCell::new(
            format!("set.{name}").as_str(),
            Coordinate::new(reg.require(name)?, 0, time),
            name,
            CellContent::GroundSet(name.clone()),
        )?);
    }
    for name in &uses.families {
        cells.push(StateCell::new(
            format!("set.{name}").as_str(),
            Coordinate::new(reg.require(name)?, 0, time),
            name,
            CellContent::GroundSet(name.clone()),
        )?);
    }
    for name in &uses.mappings {
        let arity = match vocab.kind_of(name) {
            Some(SymbolKind::Mapping(n)) => n,
            _ => 1,
        };
        cells.push(StateCell::new(
            format!("map.{name}").as_str(),
            Coordinate::new(reg.require(name)?, 1, time),
            name,
            CellContent::MappingDecl {
                name: name.clone(),
                arity,
            },
        )?);
    }
    if uses.abs_diff {
        cells.push(StateCell::new(
            "map.abs",
            Coordinate::new(reg.require("abs")?, 1, time),
            "abs",
            CellContent::MappingDecl {
                name: "abs".to_string(),
                arity: 2,
            },
        )?);
    }
    if uses.card {
        cells.push(StateCell::new(
            "map.card",
            Coordinate::new(reg.require("card")?, 1, time),
            "card",
            CellContent::MappingDecl {
                name: "card".to_string(),
                arity: 1,
            },
        )?);
    }
    for op in &uses.cmp_ops {
        let sym = op.symbol();
        cells.push(StateCell::new(
            format!("pred.{sym}").as_str(),
            Coordinate::new(reg.require(sym)?, 2, time),
            sym,
            CellContent::MappingDecl {
                name: sym.to_string(),
                arity: 2,
            },
        )?);
    }
    if uses.member {
        cells.push(StateCell::new(
            "pred.in",
            Coordinate::new(reg.require("in")?, 2, time),
            "in",
            CellContent::MappingDecl {
                name: "in".to_string(),
                arity: 2,
            },
        )?);
    }
    if uses.subset {
        cells.push(StateCell::new(
            "pred.subset",
            Coordinate::new(reg.require("subset")?, 2, time),
            "subset",
            CellContent::MappingDecl {
                name: "subset".to_string(),
                arity: 2,
            },
        )?);
    }
    if uses.time_index {
        let label = if uses.succ { "i, i+1" } else { "i" };
        cells.push(StateCell::new(
            "set.time",
            Coordinate::new(reg.require(DEPTH_TIME)?, 0, time),
            label,
            CellContent::GroundSet(DEPTH_TIME.to_string()),
        )?);
    }
    if uses.succ {
        cells.push(StateCell::new(
            "map.succ",
            Coordinate::new(reg.require(DEPTH_SUCC)?, 1, time),
            "succ",
            CellContent::MappingDecl {
                name: DEPTH_SUCC.to_string(),
                arity: 1,
            },
        )?);
    }

    cells.push(StateCell::new(
        root_id,
        Coordinate::new(depth_of(e, reg)?, hierarchy_of(e, vocab, mode), time),
        root_label,
        CellContent::PredicateState(e.clone()),
    )?);
    Ok(cells)
}

#[derive(Default)]
struct SymbolUses {
    carriers: BTreeSet<String>,
    families: BTreeSet<String>,
    mappings: BTreeSet<String>,
    abs_diff: bool,
    card: bool,
    cmp_ops: BTreeSet<CmpOp>,
    member: bool,
    subset: bool,
    time_index: bool,
    succ: bool,
}

fn collect_uses(e: &Expr, vocab: &Vocabulary, bound: &mut Vec<String>, out: &mut SymbolUses) {
    match e {
        Expr::Atom(n) => {
            if !bound.iter().any(|b| b == n) {
                match vocab.kind_of(n) {
                    Some(SymbolKind::CarrierSet) => {
                        out.carriers.insert(n.clone());
                    }
                    Some(SymbolKind::TimedFamily) => {
                        out.families.insert(n.clone());
                    }
                    Some(SymbolKind::Mapping(_)) => {
                        out.mappings.insert(n.clone());
                    }
                    _ => {}
                }
            }
        }
        Expr::App(f, args) => {
            match vocab.kind_of(f) {
                Some(SymbolKind::Mapping(_)) if !bound.iter().any(|b| b == f) => {
                    out.mappings.insert(f.clone());
                }
                // The function-ness test contributes no cell of its own;
                // the mapping it examines appears via its argument.
                _ => {}
            }
            for a in args {
                collect_uses(a, vocab, bound, out);
            }
        }
        Expr::AbsDiff(a, b) => {
            out.abs_diff = true;
            collect_uses(a, vocab, bound, out);
            collect_uses(b, vocab, bound, out);
        }
        Expr::Card(x) => {
            out.card = true;
            collect_uses(x, vocab, bound, out);
        }
        Expr::Cmp(op, a, b) => {
            out.cmp_ops.insert(*op);
            collect_uses(a, vocab, bound, out);
            collect_uses(b, vocab, bound, out);
        }
        Expr::Member(a, b) => {
            out.member = true;
            collect_uses(a, vocab, bound, out);
            collect_uses(b, vocab, bound, out);
        }
        Expr::SubsetOf(a, b) => {
            out.subset = true;
            collect_uses(a, vocab, bound, out);
            collect_uses(b, vocab, bound, out);
        }
        Expr::Forall(v, c, body) | Expr::Exists(v, c, body) => {
            out.carriers.insert(c.clone());
            bound.push(v.clone());
            collect_uses(body, vocab, bound, out);
            bound.pop();
        }
        Expr::AtTime(f, idx) => {
            out.families.insert(f.clone());
            out.time_index = true;
            if *idx == IndexExpr::Succ {
                out.succ = true;
            }
        }
        _ => {
            for child in e.children() {
                collect_uses(child, vocab, bound, out);
            }
        }
    }
}

/// The cell for a judgment built over a predicate body: same depth, one
/// hierarchy level up.
pub fn judgment_cell(
    name: &str,
    body: &Expr,
    vocab: &Vocabulary,
    reg: &DepthRegistry,
    mode: Mode,
    time: u32,
) -> Result<StateCell, StratifyError> {
    let coord = Coordinate::new(
        depth_of(body, reg)?,
        hierarchy_of(body, vocab, mode) + 1,
        time,
    );
    Ok(StateCell::new(
        name,
        coord,
        name,
        CellContent::MappingDecl {
            name: name.to_string(),
            arity: 1,
        },
    )?)
}

/// The cell for a judgment combining earlier judgments: maximum depth of
/// its parts, one hierarchy level above the tallest.
pub fn judgment_over(name: &str, parts: &[&StateCell], time: u32) -> Result<StateCell, GridError> {
    let depth = parts.iter().map(|c| c.coord.depth).max().unwrap_or(0);
    let hierarchy = parts.iter().map(|c| c.coord.hierarchy).max().unwrap_or(0) + 1;
    StateCell::new(
        name,
        Coordinate::new(depth, hierarchy, time),
        name,
        CellContent::MappingDecl {
            name: name.to_string(),
            arity: 1,
        },
    )
}

/// The cell for the truth-value plane that every judgment lands in.
pub fn truth_cell(reg: &DepthRegistry, time: u32) -> Result<StateCell, StratifyError> {
    Ok(StateCell::new(
        "set.Bool",
        Coordinate::new(reg.require(DEPTH_BOOL)?, 0, time),
        "Bool",
        CellContent::GroundSet(DEPTH_BOOL.to_string()),
    )?)
}

/// Renders a grid as a deterministic table: one row per occupied
/// coordinate, sorted by (depth, hierarchy, time), labels joined in id
/// order. UTF-8, LF line endings.
pub fn report(g: &Grid) -> String {
    let mut out = String::from("depth\thierarchy\ttime\tlabels\n");
    for coord in g.coordinates() {
        let labels: Vec<&str> = g.at(coord).iter().map(|c| c.label.as_str()).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            coord.depth,
            coord.hierarchy,
            coord.time,
            labels.join(", ")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    fn demo_vocab() -> Vocabulary {
        let mut v = Vocabulary::new();
        v.declare("R", SymbolKind::CarrierSet).unwrap();
        v.declare("f", SymbolKind::Mapping(1)).unwrap();
        v.declare("I", SymbolKind::TimedFamily).unwrap();
        v
    }

    #[test]
    fn atoms_are_order_zero_mappings_order_one() {
        let v = demo_vocab();
        assert_eq!(hierarchy_of(&Expr::atom("R"), &v, Mode::Transparent), 0);
        assert_eq!(hierarchy_of(&Expr::atom("f"), &v, Mode::Transparent), 1);
    }

    #[test]
    fn application_and_comparison_orders() {
        let v = demo_vocab();
        let app = parse("f(x)", &{
            let mut v2 = v.clone();
            v2.declare("x", SymbolKind::CarrierSet).unwrap();
            v2
        })
        .unwrap();
        assert_eq!(hierarchy_of(&app, &v, Mode::Transparent), 1);

        // A predicate over the output of a 1st-order mapping is 2nd order.
        let vx = {
            let mut v2 = v.clone();
            v2.declare("x", SymbolKind::CarrierSet).unwrap();
            v2.declare("y", SymbolKind::CarrierSet).unwrap();
            v2
        };
        let cmp = parse("f(x) = y", &vx).unwrap();
        assert_eq!(hierarchy_of(&cmp, &vx, Mode::Transparent), 2);

        // Cardinality of a ground family is a 1st-order mapping, and the
        // comparison over it is 2nd order.
        let card_cmp = parse("card(I@(i+1)) > card(I@i)", &v).unwrap();
        assert_eq!(hierarchy_of(&card_cmp, &v, Mode::Transparent), 2);
    }

    #[test]
    fn modes_diverge_only_at_composition() {
        let v = demo_vocab();
        let e = parse("card(I@(i+1)) > card(I@i) and card(I@(i+1)) > card(I@i)", &v).unwrap();
        assert_eq!(hierarchy_of(&e, &v, Mode::Transparent), 2);
        assert_eq!(hierarchy_of(&e, &v, Mode::Elevating), 3);
    }

    #[test]
    fn elevating_counts_connective_runs_once() {
        let v = demo_vocab();
        let leaf = "card(I@(i+1)) > card(I@i)";
        let two = parse(&format!("{leaf} and {leaf}"), &v).unwrap();
        let three = parse(&format!("{leaf} and {leaf} and {leaf}"), &v).unwrap();
        assert_eq!(
            hierarchy_of(&two, &v, Mode::Elevating),
            hierarchy_of(&three, &v, Mode::Elevating)
        );
    }

    #[test]
    fn single_leaf_placement() {
        let mut reg = DepthRegistry::empty();
        reg.set("R", 5);
        let v = demo_vocab();
        let p = place(&Expr::atom("R"), &v, &reg, Mode::Transparent, 7).unwrap();
        assert_eq!(p.assignments.len(), 1);
        assert_eq!(p.root(), Coordinate::new(5, 0, 7));
        let p2 = place(&Expr::atom("R"), &v, &reg, Mode::Elevating, 7).unwrap();
        assert_eq!(p2.root(), Coordinate::new(5, 0, 7));
    }

    #[test]
    fn unregistered_symbol_is_an_error() {
        let v = demo_vocab();
        let reg = DepthRegistry::empty();
        let err = place(&Expr::atom("R"), &v, &reg, Mode::Transparent, 0).unwrap_err();
        assert_eq!(err, StratifyError::UnregisteredSymbol("R".to_string()));
    }

    #[test]
    fn depth_is_max_over_subtree_and_monotone() {
        let v = demo_vocab();
        let mut reg = DepthRegistry::with_defaults();
        reg.set("R", 5);
        reg.set("f", 5);
        let e = parse("forall x in R . f(x) = x", &v).unwrap();
        let p = place(&e, &v, &reg, Mode::Transparent, 0).unwrap();
        // Bound variables carry their domain's depth.
        for coord in p.assignments.values() {
            assert!(coord.depth <= p.root().depth);
        }
        assert_eq!(p.root().depth, 5);
    }

    #[test]
    fn placement_is_deterministic() {
        let v = demo_vocab();
        let mut reg = DepthRegistry::with_defaults();
        reg.set("R", 5);
        reg.set("f", 5);
        let e = parse("forall x in R . not (f(x) = x) or f(x) < x", &v).unwrap();
        let a = place(&e, &v, &reg, Mode::Elevating, 3).unwrap();
        let b = place(&e, &v, &reg, Mode::Elevating, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_empty_grid_is_header_only() {
        assert_eq!(report(&Grid::new()), "depth\thierarchy\ttime\tlabels\n");
    }

    #[test]
    fn report_merges_labels_at_shared_coordinates() {
        let c = Coordinate::new(2, 0, 0);
        let g = Grid::from_cells([
            StateCell::new("set.b", c, "B", CellContent::GroundSet("B".into())).unwrap(),
            StateCell::new("set.a", c, "A", CellContent::GroundSet("A".into())).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            report(&g),
            "depth\thierarchy\ttime\tlabels\n2\t0\t0\tA, B\n"
        );
    }
}
