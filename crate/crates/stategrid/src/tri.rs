//! Three-valued truth kernel.
//!
//! `TriValue` fuses two planes of judgment: *definability* (is the question
//! answerable in the current descriptive state at all?) and *truth* (given
//! that it is answerable, does it hold?). `Undefinable` is the bottom of the
//! information order; the connectives are the strong Kleene extensions of
//! the Boolean ones, which keeps them monotone under refinement: observing
//! more can turn `Undefinable` into `True` or `False`, never the reverse.

use std::fmt;

/// A truth value with an explicit "not decidable here" state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TriValue {
    True,
    False,
    Undefinable,
}

pub use TriValue::{False, True, Undefinable};

impl TriValue {
    /// The definability plane: everything except `Undefinable` is definable.
    pub fn definable(self) -> bool {
        self != Undefinable
    }

    /// The truth plane, meaningful only when `definable`.
    pub fn truth(self) -> Option<bool> {
        match self {
            True => Some(true),
            False => Some(false),
            Undefinable => None,
        }
    }

    pub fn negate(self) -> TriValue {
        not3(self)
    }

    /// All three values, in a fixed order. Handy for exhaustive law checks.
    pub const ALL: [TriValue; 3] = [True, False, Undefinable];
}

impl From<bool> for TriValue {
    fn from(b: bool) -> Self {
        if b {
            True
        } else {
            False
        }
    }
}

impl fmt::Display for TriValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            True => write!(f, "True"),
            False => write!(f, "False"),
            Undefinable => write!(f, "Undefinable"),
        }
    }
}

/// Strong Kleene conjunction: `False` annihilates even an unknown conjunct.
pub fn and3(a: TriValue, b: TriValue) -> TriValue {
    match (a, b) {
        (False, _) | (_, False) => False,
        (True, True) => True,
        _ => Undefinable,
    }
}

/// Strong Kleene disjunction.
pub fn or3(a: TriValue, b: TriValue) -> TriValue {
    match (a, b) {
        (True, _) | (_, True) => True,
        (False, False) => False,
        _ => Undefinable,
    }
}

/// Negation swaps the defined values and preserves unknownness.
pub fn not3(a: TriValue) -> TriValue {
    match a {
        True => False,
        False => True,
        Undefinable => Undefinable,
    }
}

/// Material implication, defined as `or3(not3(a), b)`.
pub fn implies3(a: TriValue, b: TriValue) -> TriValue {
    or3(not3(a), b)
}

/// Information order: `Undefinable` sits below both defined values, and
/// defined values are comparable only to themselves.
pub fn info_leq(a: TriValue, b: TriValue) -> bool {
    a == Undefinable || a == b
}

/// Fold a conjunction over an iterator (empty input is vacuously `True`).
pub fn all3<I: IntoIterator<Item = TriValue>>(items: I) -> TriValue {
    items.into_iter().fold(True, and3)
}

/// Fold a disjunction over an iterator (empty input is `False`).
pub fn any3<I: IntoIterator<Item = TriValue>>(items: I) -> TriValue {
    items.into_iter().fold(False, or3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connective_tables() {
        assert_eq!(and3(True, Undefinable), Undefinable);
        assert_eq!(and3(False, Undefinable), False);
        assert_eq!(and3(Undefinable, False), False);
        assert_eq!(or3(True, Undefinable), True);
        assert_eq!(or3(False, Undefinable), Undefinable);
        assert_eq!(not3(Undefinable), Undefinable);
        assert_eq!(implies3(Undefinable, True), True);
        assert_eq!(implies3(True, Undefinable), Undefinable);
        assert_eq!(implies3(False, Undefinable), True);
    }

    #[test]
    fn info_order() {
        assert!(info_leq(Undefinable, True));
        assert!(info_leq(Undefinable, False));
        assert!(info_leq(Undefinable, Undefinable));
        assert!(info_leq(False, False));
        assert!(!info_leq(True, False));
        assert!(!info_leq(True, Undefinable));
    }

    #[test]
    fn kleene_laws_exhaustive() {
        for a in TriValue::ALL {
            assert_eq!(not3(not3(a)), a);
            for b in TriValue::ALL {
                assert_eq!(and3(a, b), and3(b, a));
                assert_eq!(or3(a, b), or3(b, a));
                assert_eq!(not3(and3(a, b)), or3(not3(a), not3(b)));
                assert_eq!(not3(or3(a, b)), and3(not3(a), not3(b)));
                for c in TriValue::ALL {
                    assert_eq!(and3(and3(a, b), c), and3(a, and3(b, c)));
                    assert_eq!(or3(or3(a, b), c), or3(a, or3(b, c)));
                }
            }
        }
    }

    #[test]
    fn monotone_in_information_order() {
        for a in TriValue::ALL {
            for a2 in TriValue::ALL {
                if !info_leq(a, a2) {
                    continue;
                }
                assert!(info_leq(not3(a), not3(a2)));
                for b in TriValue::ALL {
                    for b2 in TriValue::ALL {
                        if !info_leq(b, b2) {
                            continue;
                        }
                        assert!(info_leq(and3(a, b), and3(a2, b2)));
                        assert!(info_leq(or3(a, b), or3(a2, b2)));
                    }
                }
            }
        }
    }

    #[test]
    fn classical_restriction() {
        for a in [true, false] {
            assert_eq!(not3(a.into()), TriValue::from(!a));
            for b in [true, false] {
                assert_eq!(and3(a.into(), b.into()), TriValue::from(a && b));
                assert_eq!(or3(a.into(), b.into()), TriValue::from(a || b));
                assert_eq!(implies3(a.into(), b.into()), TriValue::from(!a || b));
            }
        }
    }

    #[test]
    fn folds() {
        assert_eq!(all3([]), True);
        assert_eq!(any3([]), False);
        assert_eq!(all3([True, Undefinable]), Undefinable);
        assert_eq!(all3([False, Undefinable]), False);
        assert_eq!(any3([False, True, Undefinable]), True);
    }
}
