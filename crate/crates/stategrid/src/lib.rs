//! An executable engine for definitions held as states on a coordinate
//! grid.
//!
//! Every component of a formal definition is placed at a `(state depth,
//! mapping hierarchy, time)` coordinate; predicates written in a small
//! first-order language are evaluated over finite models under a
//! three-valued semantics in which unobserved symbols make judgments
//! `Undefinable` rather than failing. Whole definition universes are
//! values that can be translated between vocabularies, merged three-way
//! with conflict demotion, advanced in real time under observability
//! masks, and queried for predictions whose verification waits until
//! their target time arrives.
//!
//! - [`tri`]: the three-valued truth kernel (strong Kleene).
//! - [`rat`]: exact rational arithmetic.
//! - [`lang`]: the predicate language, its parser and printer.
//! - [`grid`]: cells and the coordinate-indexed store.
//! - [`stratify`]: hierarchy computation and depth placement.
//! - [`eval`]: finite-model evaluation and the reference judgments.
//! - [`universe`]: universes and the operations between them.

pub mod eval;
pub mod grid;
pub mod lang;
pub mod rat;
pub mod stratify;
#[cfg(any(test, feature = "testgen"))]
pub mod testgen;
pub mod tri;
pub mod universe;
