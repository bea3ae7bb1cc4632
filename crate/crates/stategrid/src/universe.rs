//! Whole definition universes as values, and the operations between them:
//! vocabulary translation, three-way integration of divergent copies,
//! real-time advancement under an observability mask, prediction recording
//! with deferred verification, macro/micro operation classification, and
//! the codomain verifiability check.
//!
//! Universes are immutable; every operation returns a new one and appends
//! to the log. Two copies may evolve independently and meet again only in
//! `integrate`, which is the rendezvous point: non-conflicting edits merge,
//! conflicting cells are kept but demoted to `Undefinable` rather than
//! silently resolved either way.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::eval::{eval, Env, EvalError, Model};
use crate::grid::{CellContent, CellId, Grid, GridError, StateCell};
use crate::lang::{
    check_well_formed, referenced_symbols, rename_symbol, Expr, ParseError, Vocabulary,
};
use crate::stratify::DepthRegistry;
use crate::tri::TriValue;

/// Tag put on cells whose expression could not be carried across a
/// translation.
pub const TAG_UNTRANSLATED: &str = "untranslated";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LogEntry {
    pub seq: u64,
    pub op: String,
    pub digest: String,
}

pub fn digest_of(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let bytes = hasher.finalize();
    bytes[..6].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PredictionStatus {
    Pending,
    Confirmed,
    Refuted,
}

impl fmt::Display for PredictionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredictionStatus::Pending => write!(f, "pending"),
            PredictionStatus::Confirmed => write!(f, "confirmed"),
            PredictionStatus::Refuted => write!(f, "refuted"),
        }
    }
}

/// A claimed defined truth value for a predicate cell at a future time.
/// Claiming `Undefinable` is rejected: verification means the value
/// becoming definable, so it cannot be the thing claimed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Prediction {
    pub cell: CellId,
    pub claim: TriValue,
    pub at: u32,
    pub status: PredictionStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    pub id: String,
    pub vocab: Vocabulary,
    pub registry: DepthRegistry,
    pub grid: Grid,
    /// Snapshot per real-time index, contiguous from 0.
    pub models: Vec<Model>,
    pub predictions: Vec<Prediction>,
    pub log: Vec<LogEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniverseError {
    #[error("translation map is for universe `{map}`, not `{universe}`")]
    SourceMismatch { map: String, universe: String },
    #[error("translated symbol `{0}` changes kind between the vocabularies")]
    KindMismatch(String),
    #[error("universes do not derive from the given base")]
    UnrelatedUniverses,
    #[error("prediction target {at} is not after the current time {now}")]
    NotAFuturePrediction { at: u32, now: u32 },
    #[error("prediction claim must be True or False")]
    UndefinableClaim,
    #[error("unknown cell `{0}`")]
    UnknownCell(CellId),
    #[error("cell `{0}` does not hold a predicate state")]
    NotAPredicateCell(CellId),
    #[error("time {0} is not materialized")]
    TimeNotMaterialized(u32),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Lang(#[from] ParseError),
}

impl Universe {
    /// A fresh universe with an empty vocabulary, the default depth
    /// registry, and a single empty snapshot at time 0.
    pub fn new(id: &str) -> Universe {
        Universe {
            id: id.to_string(),
            vocab: Vocabulary::new(),
            registry: DepthRegistry::with_defaults(),
            grid: Grid::new(),
            models: vec![Model::new()],
            predictions: Vec::new(),
            log: vec![LogEntry {
                seq: 0,
                op: "new".to_string(),
                digest: digest_of(id),
            }],
        }
    }

    pub fn t_max(&self) -> u32 {
        (self.models.len() - 1) as u32
    }

    pub fn model_at(&self, t: u32) -> Option<&Model> {
        self.models.get(t as usize)
    }

    pub fn current_model(&self) -> &Model {
        self.models.last().expect("at least one snapshot exists")
    }

    fn logged(mut self, op: &str, args: &str) -> Universe {
        let seq = self.log.last().map(|e| e.seq + 1).unwrap_or(0);
        self.log.push(LogEntry {
            seq,
            op: op.to_string(),
            digest: digest_of(args),
        });
        self
    }

    /// Adds a cell, checking predicate contents against the vocabulary.
    pub fn insert_cell(&self, cell: StateCell) -> Result<Universe, UniverseError> {
        if let CellContent::PredicateState(e) = &cell.content {
            check_well_formed(e, &self.vocab)?;
        }
        let mut next = self.clone();
        next.grid = next.grid.put(cell)?;
        Ok(next)
    }

    /// Evaluates an expression against the snapshot at `t`, with the
    /// ambient index variable bound to `t`.
    pub fn eval_at(&self, e: &Expr, t: u32) -> Result<TriValue, UniverseError> {
        let model = self
            .model_at(t)
            .ok_or(UniverseError::TimeNotMaterialized(t))?;
        Ok(eval(e, &self.vocab, model, &Env::with_time(t))?)
    }

    /// Rewrites the universe into a target vocabulary, symbol by symbol.
    /// Cells whose expressions use unmapped declared symbols are carried
    /// over unrewritten, demoted to `Undefinable`, and tagged. Coordinates
    /// and cell ids are preserved throughout: the grid addresses are
    /// language-independent.
    pub fn translate(
        &self,
        tm: &TranslationMap,
        target_vocab: &Vocabulary,
    ) -> Result<Universe, UniverseError> {
        if tm.source != self.id {
            return Err(UniverseError::SourceMismatch {
                map: tm.source.clone(),
                universe: self.id.clone(),
            });
        }
        for (from, to) in &tm.entries {
            let from_kind = self.vocab.kind_of(from);
            let to_kind = target_vocab.kind_of(to);
            if from_kind.is_none() || from_kind != to_kind {
                return Err(UniverseError::KindMismatch(from.clone()));
            }
        }

        let declared = self.vocab.names();
        let mut cells = Vec::new();
        for cell in self.grid.cells() {
            cells.push(translate_cell(cell, tm, &declared)?);
        }

        let mut registry = DepthRegistry::empty();
        for (name, depth) in self.registry.entries() {
            let target = tm.entries.get(name).map(|s| s.as_str()).unwrap_or(name);
            registry.set(target, depth);
        }

        let models = self
            .models
            .iter()
            .map(|m| translate_model(m, tm, &declared))
            .collect();

        Ok(Universe {
            id: tm.target.clone(),
            vocab: target_vocab.clone(),
            registry,
            grid: Grid::from_cells(cells)?,
            models,
            predictions: self.predictions.clone(),
            log: self.log.clone(),
        }
        .logged("translate", &format!("{}->{}", tm.source, tm.target)))
    }

    /// Three-way merge of two universes that both derive from `base`
    /// (checked through the log). Per cell id: edits on one side win,
    /// identical edits agree, diverging edits conflict. A conflicted cell
    /// is never resolved to either side; it stays in the result demoted to
    /// `Undefinable`, and the pair of contents is reported.
    pub fn integrate(
        base: &Universe,
        left: &Universe,
        right: &Universe,
    ) -> Result<MergeOutcome, UniverseError> {
        if !is_log_prefix(&base.log, &left.log) || !is_log_prefix(&base.log, &right.log) {
            return Err(UniverseError::UnrelatedUniverses);
        }

        let mut ids: BTreeSet<CellId> = BTreeSet::new();
        ids.extend(base.grid.ids().cloned());
        ids.extend(left.grid.ids().cloned());
        ids.extend(right.grid.ids().cloned());

        let mut cells = Vec::new();
        let mut conflicts = Vec::new();
        for id in ids {
            let b = base.grid.get(&id);
            let l = left.grid.get(&id);
            let r = right.grid.get(&id);
            let l_changed = l != b;
            let r_changed = r != b;
            let keep = match (l_changed, r_changed) {
                (false, false) => b.cloned(),
                (true, false) => l.cloned(),
                (false, true) => r.cloned(),
                (true, true) if l == r => l.cloned(),
                (true, true) => {
                    conflicts.push(Conflict {
                        cell: id.clone(),
                        left: l.map(|c| c.content.clone()),
                        right: r.map(|c| c.content.clone()),
                    });
                    // Keep the base version where one exists, otherwise the
                    // smaller of the two additions; either way the cell is
                    // demoted, never silently resolved.
                    b.or_else(|| l.min(r)).cloned().map(demote)
                }
            };
            if let Some(cell) = keep {
                cells.push(cell);
            }
        }

        // The log entry must not depend on argument order, or merging
        // a-with-b and b-with-a would produce distinguishable universes.
        let mut sides = [left.id.as_str(), right.id.as_str()];
        sides.sort();
        let merged = Universe {
            id: base.id.clone(),
            vocab: pick_side(&base.vocab, &left.vocab, &right.vocab),
            registry: pick_side(&base.registry, &left.registry, &right.registry),
            grid: Grid::from_cells(cells)?,
            models: pick_side(&base.models, &left.models, &right.models),
            predictions: pick_side(&base.predictions, &left.predictions, &right.predictions),
            log: base.log.clone(),
        }
        .logged(
            "merge",
            &format!("{}+{}:{}", sides[0], sides[1], conflicts.len()),
        );

        Ok(MergeOutcome { merged, conflicts })
    }

    /// Advances real time by one tick. Interpretations of masked names are
    /// carried from the previous snapshot into the new one; every other
    /// symbol becomes uninterpreted there, so evaluations at the new time
    /// come out `Undefinable`. Masked cell ids are copied to the new time
    /// coordinate under a derived id. History is never touched.
    pub fn advance_time(&self, mask: &BTreeSet<String>) -> Result<Universe, UniverseError> {
        let new_t = self.t_max() + 1;
        let mut next = self.clone();
        next.models.push(self.current_model().masked(mask));

        for id in mask {
            let cell_id = CellId::new(id);
            if let Some(cell) = self.grid.get(&cell_id) {
                let mut copy = cell.clone();
                copy.id = CellId::new(&format!("{id}@t{new_t}"));
                copy.coord = copy.coord.at_time(new_t);
                next.grid = next.grid.put(copy)?;
            }
        }

        let mask_text: Vec<&str> = mask.iter().map(|s| s.as_str()).collect();
        Ok(next.logged("tick", &format!("t{new_t}:{}", mask_text.join(","))))
    }

    /// Records a claimed truth value for a predicate cell at a strictly
    /// future time.
    pub fn record_prediction(
        &self,
        cell: &CellId,
        claim: TriValue,
        at: u32,
    ) -> Result<Universe, UniverseError> {
        if !claim.definable() {
            return Err(UniverseError::UndefinableClaim);
        }
        let found = self
            .grid
            .get(cell)
            .ok_or_else(|| UniverseError::UnknownCell(cell.clone()))?;
        if !matches!(found.content, CellContent::PredicateState(_)) {
            return Err(UniverseError::NotAPredicateCell(cell.clone()));
        }
        if at <= self.t_max() {
            return Err(UniverseError::NotAFuturePrediction {
                at,
                now: self.t_max(),
            });
        }
        let mut next = self.clone();
        next.predictions.push(Prediction {
            cell: cell.clone(),
            claim,
            at,
            status: PredictionStatus::Pending,
        });
        next.predictions.sort();
        Ok(next.logged("predict", &format!("{cell}:{claim}@{at}")))
    }

    /// Re-evaluates every pending prediction whose target time has
    /// arrived, against the snapshot at that target time. A defined result
    /// confirms or refutes permanently; an undefinable one stays pending.
    pub fn verify_predictions(&self) -> Result<Universe, UniverseError> {
        let mut next = self.clone();
        let mut resolved = 0usize;
        for p in &mut next.predictions {
            if p.status != PredictionStatus::Pending || p.at > self.t_max() {
                continue;
            }
            let cell = self
                .grid
                .get(&p.cell)
                .ok_or_else(|| UniverseError::UnknownCell(p.cell.clone()))?;
            let expr = match &cell.content {
                CellContent::PredicateState(e) => e,
                _ => return Err(UniverseError::NotAPredicateCell(p.cell.clone())),
            };
            let outcome = self.eval_at(expr, p.at)?;
            if outcome.definable() {
                p.status = if outcome == p.claim {
                    PredictionStatus::Confirmed
                } else {
                    PredictionStatus::Refuted
                };
                resolved += 1;
            }
        }
        next.predictions.sort();
        Ok(next.logged("verify", &format!("resolved:{resolved}")))
    }

    /// Is every predicate cell mechanically checkable here and now: all of
    /// its symbols interpreted in the latest snapshot? Carriers are finite
    /// by construction, so interpretedness is the whole question.
    pub fn codomain_check(&self) -> CodomainReport {
        let model = self.current_model();
        let mut offending = Vec::new();
        for cell in self.grid.cells() {
            if let CellContent::PredicateState(e) = &cell.content {
                let missing: BTreeSet<String> = referenced_symbols(e)
                    .into_iter()
                    .filter(|n| !model.interprets(n))
                    .collect();
                if !missing.is_empty() {
                    offending.push((cell.id.clone(), missing));
                }
            }
        }
        CodomainReport {
            verifiable: offending.is_empty(),
            offending,
        }
    }
}

fn demote(mut cell: StateCell) -> StateCell {
    cell.definability = TriValue::Undefinable;
    cell
}

fn pick_side<T: Clone + PartialEq>(base: &T, left: &T, right: &T) -> T {
    // Non-cell state merges by the simple rule: take the side that moved;
    // if both moved differently, keep the base.
    if left == right {
        left.clone()
    } else if left == base {
        right.clone()
    } else if right == base {
        left.clone()
    } else {
        base.clone()
    }
}

fn is_log_prefix(prefix: &[LogEntry], log: &[LogEntry]) -> bool {
    log.len() >= prefix.len() && &log[..prefix.len()] == prefix
}

fn translate_cell(
    cell: &StateCell,
    tm: &TranslationMap,
    declared: &BTreeSet<String>,
) -> Result<StateCell, UniverseError> {
    let used: BTreeSet<String> = match &cell.content {
        CellContent::PredicateState(e) => referenced_symbols(e)
            .into_iter()
            .filter(|n| declared.contains(n))
            .collect(),
        CellContent::GroundSet(name) | CellContent::MappingDecl { name, .. } => {
            if declared.contains(name) {
                BTreeSet::from([name.clone()])
            } else {
                BTreeSet::new()
            }
        }
        CellContent::TruthResult(_) => BTreeSet::new(),
    };

    let unmapped: Vec<&String> = used.iter().filter(|n| !tm.entries.contains_key(*n)).collect();
    if !unmapped.is_empty() {
        let mut copy = cell.clone();
        copy.definability = TriValue::Undefinable;
        copy.tags.insert(TAG_UNTRANSLATED.to_string());
        return Ok(copy);
    }

    let mut copy = cell.clone();
    copy.content = match &cell.content {
        CellContent::PredicateState(e) => {
            let mut out = e.clone();
            for (from, to) in &tm.entries {
                out = rename_symbol(&out, from, to);
            }
            CellContent::PredicateState(out)
        }
        CellContent::GroundSet(name) => CellContent::GroundSet(rename(name, tm)),
        CellContent::MappingDecl { name, arity } => CellContent::MappingDecl {
            name: rename(name, tm),
            arity: *arity,
        },
        CellContent::TruthResult(v) => CellContent::TruthResult(*v),
    };
    Ok(copy)
}

fn rename(name: &str, tm: &TranslationMap) -> String {
    tm.entries
        .get(name)
        .cloned()
        .unwrap_or_else(|| name.to_string())
}

fn translate_model(m: &Model, tm: &TranslationMap, declared: &BTreeSet<String>) -> Model {
    // Interpretations of mapped names move under their new names; declared
    // but unmapped names have no place in the target and are dropped,
    // which is exactly the information loss the flagged cells record.
    let keep = |name: &String| -> Option<String> {
        match tm.entries.get(name) {
            Some(to) => Some(to.clone()),
            None if declared.contains(name) => None,
            None => Some(name.clone()),
        }
    };
    let mut out = Model::new();
    for (name, v) in &m.carriers {
        if let Some(n) = keep(name) {
            out.carriers.insert(n, v.clone());
        }
    }
    for (name, v) in &m.mappings {
        if let Some(n) = keep(name) {
            out.mappings.insert(n, v.clone());
        }
    }
    for (name, v) in &m.families {
        if let Some(n) = keep(name) {
            out.families.insert(n, v.clone());
        }
    }
    for name in &m.interpreted {
        if let Some(n) = keep(name) {
            out.interpreted.insert(n);
        }
    }
    out
}

/// A kind-preserving partial renaming between two universes' vocabularies.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranslationMap {
    pub source: String,
    pub target: String,
    pub entries: BTreeMap<String, String>,
}

impl TranslationMap {
    pub fn new(source: &str, target: &str) -> Self {
        TranslationMap {
            source: source.to_string(),
            target: target.to_string(),
            entries: BTreeMap::new(),
        }
    }

    pub fn with(mut self, from: &str, to: &str) -> Self {
        self.entries.insert(from.to_string(), to.to_string());
        self
    }

    /// The inverse renaming; meaningful for injective maps.
    pub fn inverse(&self) -> TranslationMap {
        TranslationMap {
            source: self.target.clone(),
            target: self.source.clone(),
            entries: self
                .entries
                .iter()
                .map(|(a, b)| (b.clone(), a.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conflict {
    pub cell: CellId,
    pub left: Option<CellContent>,
    pub right: Option<CellContent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeOutcome {
    pub merged: Universe,
    pub conflicts: Vec<Conflict>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodomainReport {
    pub verifiable: bool,
    pub offending: Vec<(CellId, BTreeSet<String>)>,
}

/// Whether an operation spans the whole vocabulary or only part of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpClass {
    Macrocosm,
    Microcosm,
}

impl fmt::Display for OpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpClass::Macrocosm => write!(f, "macrocosm"),
            OpClass::Microcosm => write!(f, "microcosm"),
        }
    }
}

/// An operation together with the names it touches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDescriptor {
    pub name: String,
    pub footprint: BTreeSet<String>,
}

impl OpDescriptor {
    pub fn new(name: &str, footprint: BTreeSet<String>) -> Self {
        OpDescriptor {
            name: name.to_string(),
            footprint,
        }
    }

    /// Footprint of a translation: the symbols it maps.
    pub fn for_translation(tm: &TranslationMap) -> Self {
        OpDescriptor {
            name: format!("translate {}->{}", tm.source, tm.target),
            footprint: tm.entries.keys().cloned().collect(),
        }
    }

    /// Footprint of a merge: every declared symbol referenced by the
    /// touched cells.
    pub fn for_merge(universe: &Universe, touched: &[CellId]) -> Self {
        let declared = universe.vocab.names();
        let mut footprint = BTreeSet::new();
        for id in touched {
            if let Some(cell) = universe.grid.get(id) {
                match &cell.content {
                    CellContent::PredicateState(e) => {
                        footprint.extend(
                            referenced_symbols(e)
                                .into_iter()
                                .filter(|n| declared.contains(n)),
                        );
                    }
                    CellContent::GroundSet(name) | CellContent::MappingDecl { name, .. } => {
                        if declared.contains(name) {
                            footprint.insert(name.clone());
                        }
                    }
                    CellContent::TruthResult(_) => {}
                }
            }
        }
        OpDescriptor {
            name: "merge".to_string(),
            footprint,
        }
    }
}

/// Macrocosm when the footprint covers the entire vocabulary, microcosm
/// otherwise.
pub fn classify_operation(universe: &Universe, op: &OpDescriptor) -> OpClass {
    let names = universe.vocab.names();
    if names.is_subset(&op.footprint) {
        OpClass::Macrocosm
    } else {
        OpClass::Microcosm
    }
}

#[cfg(test)]
mod tests;
