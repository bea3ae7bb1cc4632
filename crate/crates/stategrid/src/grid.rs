//! The coordinate grid of states. Every cell sits at a `(depth, hierarchy,
//! time)` address; several cells may share an address, and identity is by
//! cell id. Grids are immutable values: `put` returns a new grid.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::lang::Expr;
use crate::tri::TriValue;

/// A grid address: state depth (how complex the state is), mapping
/// hierarchy (how predicate-like it is), and the real-time index.
/// The derived order sorts by depth, then hierarchy, then time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coordinate {
    pub depth: u32,
    pub hierarchy: u32,
    pub time: u32,
}

impl Coordinate {
    pub fn new(depth: u32, hierarchy: u32, time: u32) -> Self {
        Coordinate {
            depth,
            hierarchy,
            time,
        }
    }

    pub fn at_time(self, time: u32) -> Self {
        Coordinate { time, ..self }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.depth, self.hierarchy, self.time)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub String);

impl CellId {
    pub fn new(id: &str) -> Self {
        CellId(id.to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for CellId {
    fn from(s: &str) -> Self {
        CellId(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CellContent {
    /// A label-like base set, named.
    GroundSet(String),
    /// A declared mapping symbol.
    MappingDecl { name: String, arity: usize },
    /// A predicate held as a state.
    PredicateState(Expr),
    /// A stored evaluation result.
    TruthResult(TriValue),
}

/// The tag that marks a cell as a structure; such cells must hold a
/// predicate state.
pub const TAG_STRUCTURE: &str = "structure";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StateCell {
    pub id: CellId,
    pub coord: Coordinate,
    pub label: String,
    pub content: CellContent,
    /// Restricted to `True` or `Undefinable`: the depth-0 plane of the
    /// cell itself. Conflicted or untranslatable cells are demoted here.
    pub definability: TriValue,
    pub tags: BTreeSet<String>,
}

impl StateCell {
    pub fn new(
        id: impl Into<CellId>,
        coord: Coordinate,
        label: &str,
        content: CellContent,
    ) -> Result<Self, GridError> {
        let cell = StateCell {
            id: id.into(),
            coord,
            label: label.to_string(),
            content,
            definability: TriValue::True,
            tags: BTreeSet::new(),
        };
        cell.validate()?;
        Ok(cell)
    }

    pub fn with_definability(mut self, d: TriValue) -> Result<Self, GridError> {
        self.definability = d;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tag(mut self, tag: &str) -> Result<Self, GridError> {
        self.tags.insert(tag.to_string());
        self.validate()?;
        Ok(self)
    }

    /// Local invariants: definability never `False`, truth results live at
    /// depth 1, and structure-tagged cells hold predicate states.
    pub fn validate(&self) -> Result<(), GridError> {
        if self.definability == TriValue::False {
            return Err(GridError::InvalidDefinability(self.id.clone()));
        }
        if matches!(self.content, CellContent::TruthResult(_)) && self.coord.depth != 1 {
            return Err(GridError::TruthResultDepth {
                id: self.id.clone(),
                depth: self.coord.depth,
            });
        }
        if self.tags.contains(TAG_STRUCTURE)
            && !matches!(self.content, CellContent::PredicateState(_))
        {
            return Err(GridError::StructureTag(self.id.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("duplicate cell id `{0}`")]
    DuplicateCell(CellId),
    #[error("cell `{0}`: definability must be True or Undefinable")]
    InvalidDefinability(CellId),
    #[error("cell `{id}`: a truth result must sit at depth 1, not {depth}")]
    TruthResultDepth { id: CellId, depth: u32 },
    #[error("cell `{0}` is tagged as a structure but holds no predicate state")]
    StructureTag(CellId),
    #[error("mapping cell `{id}` at hierarchy {hierarchy} has no domain cells at hierarchy {below}")]
    MissingDomain {
        id: CellId,
        hierarchy: u32,
        below: u32,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grid {
    cells: BTreeMap<CellId, StateCell>,
    index: BTreeMap<Coordinate, BTreeSet<CellId>>,
}

impl Grid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_cells<I: IntoIterator<Item = StateCell>>(cells: I) -> Result<Self, GridError> {
        let mut g = Grid::new();
        for cell in cells {
            g.insert(cell)?;
        }
        Ok(g)
    }

    /// Returns a new grid containing the cell.
    pub fn put(&self, cell: StateCell) -> Result<Grid, GridError> {
        let mut next = self.clone();
        next.insert(cell)?;
        Ok(next)
    }

    fn insert(&mut self, cell: StateCell) -> Result<(), GridError> {
        cell.validate()?;
        if self.cells.contains_key(&cell.id) {
            return Err(GridError::DuplicateCell(cell.id));
        }
        self.index
            .entry(cell.coord)
            .or_default()
            .insert(cell.id.clone());
        self.cells.insert(cell.id.clone(), cell);
        Ok(())
    }

    /// Exactly the cells at the coordinate, sorted by id.
    pub fn at(&self, coord: Coordinate) -> Vec<&StateCell> {
        self.index
            .get(&coord)
            .map(|ids| ids.iter().map(|id| &self.cells[id]).collect())
            .unwrap_or_default()
    }

    pub fn get(&self, id: &CellId) -> Option<&StateCell> {
        self.cells.get(id)
    }

    pub fn contains(&self, id: &CellId) -> bool {
        self.cells.contains_key(id)
    }

    /// All cells, sorted by id.
    pub fn cells(&self) -> impl Iterator<Item = &StateCell> {
        self.cells.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &CellId> {
        self.cells.keys()
    }

    /// Occupied coordinates, sorted.
    pub fn coordinates(&self) -> impl Iterator<Item = Coordinate> + '_ {
        self.index.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Checks that every mapping cell above hierarchy 0 has domain cells
    /// one hierarchy level below it at the same time. This mirrors how
    /// mapping order is defined: an n-th-order mapping takes
    /// (n-1)-th-order states as its domain.
    pub fn validate_hierarchy(&self) -> Result<(), GridError> {
        for cell in self.cells.values() {
            if let CellContent::MappingDecl { .. } = cell.content {
                let h = cell.coord.hierarchy;
                if h == 0 {
                    continue;
                }
                let found = self.cells.values().any(|other| {
                    other.coord.hierarchy == h - 1 && other.coord.time == cell.coord.time
                });
                if !found {
                    return Err(GridError::MissingDomain {
                        id: cell.id.clone(),
                        hierarchy: h,
                        below: h - 1,
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tri::{TriValue, Undefinable};

    fn ground(id: &str, coord: Coordinate) -> StateCell {
        StateCell::new(id, coord, id, CellContent::GroundSet(id.to_string())).unwrap()
    }

    #[test]
    fn empty_grid_has_no_cells_anywhere() {
        let g = Grid::new();
        assert!(g.at(Coordinate::new(5, 3, 0)).is_empty());
    }

    #[test]
    fn put_then_at_finds_the_cell() {
        let c = Coordinate::new(2, 1, 0);
        let g = Grid::new().put(ground("a", c)).unwrap();
        let found = g.at(c);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].id, CellId::new("a"));
        assert!(g.at(Coordinate::new(2, 1, 1)).is_empty());
    }

    #[test]
    fn coordinates_are_shared_ids_are_not() {
        let c = Coordinate::new(3, 2, 0);
        let g = Grid::new()
            .put(ground("x", c))
            .unwrap()
            .put(ground("y", c))
            .unwrap();
        let ids: Vec<&str> = g.at(c).iter().map(|cell| cell.id.as_str()).collect();
        assert_eq!(ids, vec!["x", "y"]);

        let err = g.put(ground("x", Coordinate::new(0, 0, 0))).unwrap_err();
        assert_eq!(err, GridError::DuplicateCell(CellId::new("x")));
    }

    #[test]
    fn put_is_persistent() {
        let g0 = Grid::new();
        let g1 = g0.put(ground("a", Coordinate::new(1, 0, 0))).unwrap();
        assert!(g0.is_empty());
        assert_eq!(g1.len(), 1);
    }

    #[test]
    fn truth_results_live_at_depth_one() {
        let ok = StateCell::new(
            "t",
            Coordinate::new(1, 0, 0),
            "result",
            CellContent::TruthResult(TriValue::True),
        );
        assert!(ok.is_ok());
        let bad = StateCell::new(
            "t",
            Coordinate::new(2, 0, 0),
            "result",
            CellContent::TruthResult(TriValue::True),
        );
        assert!(matches!(bad, Err(GridError::TruthResultDepth { .. })));
    }

    #[test]
    fn definability_never_false() {
        let cell = ground("a", Coordinate::new(0, 0, 0));
        assert!(cell.clone().with_definability(Undefinable).is_ok());
        assert!(cell.with_definability(TriValue::False).is_err());
    }

    #[test]
    fn structure_tag_requires_predicate_state() {
        let cell = ground("a", Coordinate::new(0, 0, 0));
        assert!(matches!(
            cell.with_tag(TAG_STRUCTURE),
            Err(GridError::StructureTag(_))
        ));
        let pred = StateCell::new(
            "p",
            Coordinate::new(2, 2, 0),
            "p",
            CellContent::PredicateState(Expr::atom("x")),
        )
        .unwrap();
        assert!(pred.with_tag(TAG_STRUCTURE).is_ok());
    }

    #[test]
    fn mapping_cells_need_a_domain_below() {
        let lone = StateCell::new(
            "m",
            Coordinate::new(2, 1, 0),
            "m",
            CellContent::MappingDecl {
                name: "m".to_string(),
                arity: 1,
            },
        )
        .unwrap();
        let g = Grid::new().put(lone).unwrap();
        assert!(matches!(
            g.validate_hierarchy(),
            Err(GridError::MissingDomain { .. })
        ));
        let g = g.put(ground("base", Coordinate::new(2, 0, 0))).unwrap();
        assert!(g.validate_hierarchy().is_ok());
    }
}
