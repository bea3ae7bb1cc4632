//! The predicate definition language: a small first-order syntax with
//! quantifiers over named carriers, exact rational literals, cardinality,
//! absolute difference, comparisons, set membership, and time-indexed
//! family access (`I@i`, `I@(i+1)`, `I@2`).
//!
//! Expressions are checked against a [`Vocabulary`] at parse time, so no
//! partially bound or arity-violating AST ever leaves this module. `parse`
//! is a left inverse of `print`: `parse(print(e)) == e` for every
//! well-formed expression.

mod lexer;
mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::rat::Rational;

pub use parser::parse;
pub use printer::print;

/// Binary mapping used for infix `+`.
pub const SYM_PLUS: &str = "+";
/// Binary mapping used for infix `-`.
pub const SYM_MINUS: &str = "-";
/// Built-in predicate testing that a named mapping relates each point to at
/// most one value.
pub const SYM_FUNC: &str = "Func";

/// Words the parser claims for itself; they cannot be declared.
pub const RESERVED: [&str; 9] = [
    "forall", "exists", "in", "subset", "not", "and", "or", "card", "abs",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SymbolKind {
    CarrierSet,
    Mapping(usize),
    TimedFamily,
    Predicate,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::CarrierSet => write!(f, "a carrier set"),
            SymbolKind::Mapping(n) => write!(f, "a mapping of arity {n}"),
            SymbolKind::TimedFamily => write!(f, "a timed family"),
            SymbolKind::Predicate => write!(f, "a predicate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("symbol `{0}` is already declared with a different kind")]
    KindConflict(String),
    #[error("`{0}` is reserved and cannot be declared")]
    Reserved(String),
    #[error("mapping `{0}` must have arity at least 1")]
    ZeroArity(String),
}

/// The declared symbols of a definition universe. Kinds are fixed once
/// declared. `+`, `-` and `Func` are built in and always visible.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entries: std::collections::BTreeMap<String, SymbolKind>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn builtin_kind(name: &str) -> Option<SymbolKind> {
        match name {
            SYM_PLUS | SYM_MINUS => Some(SymbolKind::Mapping(2)),
            SYM_FUNC => Some(SymbolKind::Predicate),
            _ => None,
        }
    }

    pub fn declare(&mut self, name: &str, kind: SymbolKind) -> Result<(), VocabError> {
        if RESERVED.contains(&name) || Self::builtin_kind(name).is_some() {
            return Err(VocabError::Reserved(name.to_string()));
        }
        if let SymbolKind::Mapping(0) = kind {
            return Err(VocabError::ZeroArity(name.to_string()));
        }
        match self.entries.get(name) {
            Some(existing) if *existing != kind => Err(VocabError::KindConflict(name.to_string())),
            _ => {
                self.entries.insert(name.to_string(), kind);
                Ok(())
            }
        }
    }

    /// Resolves declared symbols first, then built-ins.
    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        self.entries
            .get(name)
            .copied()
            .or_else(|| Self::builtin_kind(name))
    }

    /// Declared (non-built-in) symbols, sorted by name.
    pub fn declared(&self) -> impl Iterator<Item = (&str, SymbolKind)> {
        self.entries.iter().map(|(n, k)| (n.as_str(), *k))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> BTreeSet<String> {
        self.entries.keys().cloned().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CmpOp {
    Lt,
    Gt,
    Eq,
    Le,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::Eq => "=",
            CmpOp::Le => "<=",
            CmpOp::Ge => ">=",
        }
    }
}

/// Time index inside `family@index`. Only `i`, `i+1` and literals exist;
/// general index arithmetic is rejected at parse time.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IndexExpr {
    /// The ambient index variable `i`.
    Var,
    /// Its successor `i+1`.
    Succ,
    /// A literal index.
    Lit(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Atom(String),
    Num(Rational),
    SetLit(Vec<Expr>),
    App(String, Vec<Expr>),
    Card(Box<Expr>),
    AbsDiff(Box<Expr>, Box<Expr>),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Member(Box<Expr>, Box<Expr>),
    SubsetOf(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Forall(String, String, Box<Expr>),
    Exists(String, String, Box<Expr>),
    AtTime(String, IndexExpr),
}

impl Expr {
    pub fn atom(name: &str) -> Expr {
        Expr::Atom(name.to_string())
    }

    pub fn num(r: Rational) -> Expr {
        Expr::Num(r)
    }

    pub fn app(name: &str, args: Vec<Expr>) -> Expr {
        Expr::App(name.to_string(), args)
    }

    pub fn card(e: Expr) -> Expr {
        Expr::Card(Box::new(e))
    }

    pub fn cmp(op: CmpOp, l: Expr, r: Expr) -> Expr {
        Expr::Cmp(op, Box::new(l), Box::new(r))
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Expr, r: Expr) -> Expr {
        Expr::Implies(Box::new(l), Box::new(r))
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn forall(var: &str, carrier: &str, body: Expr) -> Expr {
        Expr::Forall(var.to_string(), carrier.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, carrier: &str, body: Expr) -> Expr {
        Expr::Exists(var.to_string(), carrier.to_string(), Box::new(body))
    }

    pub fn at_time(family: &str, index: IndexExpr) -> Expr {
        Expr::AtTime(family.to_string(), index)
    }

    /// Immediate children, in syntactic order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Atom(_) | Expr::Num(_) | Expr::AtTime(_, _) => Vec::new(),
            Expr::SetLit(es) => es.iter().collect(),
            Expr::App(_, args) => args.iter().collect(),
            Expr::Card(e) | Expr::Not(e) | Expr::Forall(_, _, e) | Expr::Exists(_, _, e) => {
                vec![e]
            }
            Expr::AbsDiff(a, b)
            | Expr::Cmp(_, a, b)
            | Expr::Member(a, b)
            | Expr::SubsetOf(a, b)
            | Expr::And(a, b)
            | Expr::Or(a, b)
            | Expr::Implies(a, b) => vec![a, b],
        }
    }

    /// Preorder traversal; the closure sees every node exactly once.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        for child in self.children() {
            child.walk(f);
        }
    }

    pub fn node_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: expected {expected}")]
    Syntax { pos: usize, expected: String },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("arity mismatch for `{name}`: got {got}, want {want}")]
    ArityMismatch {
        name: String,
        got: usize,
        want: usize,
    },
    #[error("`card` needs a set-valued operand (a set literal, a carrier, or a timed family)")]
    CardOperand,
    #[error("`{name}` cannot be applied: it is {kind}")]
    NotApplicable { name: String, kind: String },
    #[error("quantifier domain `{0}` is not a declared carrier set")]
    NotACarrier(String),
    #[error("`{0}` is not a timed family")]
    NotAFamily(String),
}

/// Names that are free in the variable sense: atom and mapping-application
/// occurrences not bound by an enclosing quantifier, plus timed-family
/// references. Quantifier domains and built-in operation symbols do not
/// count; they are part of the scaffolding, not of what is being tested.
pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_free(e, &mut Vec::new(), &mut out);
    out
}

fn collect_free(e: &Expr, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match e {
        Expr::Atom(n) => {
            if !bound.iter().any(|b| b == n) {
                out.insert(n.clone());
            }
        }
        Expr::App(f, args) => {
            if Vocabulary::builtin_kind(f).is_none() && !bound.iter().any(|b| b == f) {
                out.insert(f.clone());
            }
            for a in args {
                collect_free(a, bound, out);
            }
        }
        Expr::AtTime(family, _) => {
            out.insert(family.clone());
        }
        Expr::Forall(v, _, body) | Expr::Exists(v, _, body) => {
            bound.push(v.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        _ => {
            for child in e.children() {
                collect_free(child, bound, out);
            }
        }
    }
}

/// Every vocabulary-level symbol an expression relies on, including
/// quantifier domains. This is the footprint used by translation and by
/// the codomain check. Built-in symbols are excluded.
pub fn referenced_symbols(e: &Expr) -> BTreeSet<String> {
    let mut out = free_vars(e);
    e.walk(&mut |node| {
        if let Expr::Forall(_, carrier, _) | Expr::Exists(_, carrier, _) = node {
            out.insert(carrier.clone());
        }
    });
    out
}

/// Rewrites every vocabulary-level occurrence of `from` to `to`: free
/// atoms, applications, timed families, and quantifier domains. Bound
/// variables shadow as usual.
pub fn rename_symbol(e: &Expr, from: &str, to: &str) -> Expr {
    fn go(e: &Expr, from: &str, to: &str, bound: &mut Vec<String>) -> Expr {
        let subst = |n: &str, bound: &Vec<String>| -> String {
            if n == from && !bound.iter().any(|b| b == n) {
                to.to_string()
            } else {
                n.to_string()
            }
        };
        match e {
            Expr::Atom(n) => Expr::Atom(subst(n, bound)),
            Expr::Num(r) => Expr::Num(r.clone()),
            Expr::SetLit(es) => Expr::SetLit(es.iter().map(|x| go(x, from, to, bound)).collect()),
            Expr::App(f, args) => Expr::App(
                subst(f, bound),
                args.iter().map(|x| go(x, from, to, bound)).collect(),
            ),
            Expr::Card(x) => Expr::Card(Box::new(go(x, from, to, bound))),
            Expr::AbsDiff(a, b) => Expr::AbsDiff(
                Box::new(go(a, from, to, bound)),
                Box::new(go(b, from, to, bound)),
            ),
            Expr::Cmp(op, a, b) => Expr::Cmp(
                *op,
                Box::new(go(a, from, to, bound)),
                Box::new(go(b, from, to, bound)),
            ),
            Expr::Member(a, b) => Expr::Member(
                Box::new(go(a, from, to, bound)),
                Box::new(go(b, from, to, bound)),
            ),
            Expr::SubsetOf(a, b) => Expr::SubsetOf(
                Box::new(go(a, from, to, bound)),
                Box::new(go(b, from, to, bound)),
            ),
            Expr::Not(x) => Expr::Not(Box::new(go(x, from, to, bound))),
            Expr::And(a, b) => Expr::And(
                Box::new(go(a, from, to, bound)),
                Box::new(go(b, from, to, bound)),
            ),
            Expr::Or(a, b) => Expr::Or(
                Box::new(go(a, from, to, bound)),
                Box::new(go(b, from, to, bound)),
            ),
            Expr::Implies(a, b) => Expr::Implies(
                Box::new(go(a, from, to, bound)),
                Box::new(go(b, from, to, bound)),
            ),
            Expr::Forall(v, c, body) => {
                let c2 = if c == from { to.to_string() } else { c.clone() };
                bound.push(v.clone());
                let b2 = go(body, from, to, bound);
                bound.pop();
                Expr::Forall(v.clone(), c2, Box::new(b2))
            }
            Expr::Exists(v, c, body) => {
                let c2 = if c == from { to.to_string() } else { c.clone() };
                bound.push(v.clone());
                let b2 = go(body, from, to, bound);
                bound.pop();
                Expr::Exists(v.clone(), c2, Box::new(b2))
            }
            Expr::AtTime(family, idx) => {
                let f2 = if family == from {
                    to.to_string()
                } else {
                    family.clone()
                };
                Expr::AtTime(f2, idx.clone())
            }
        }
    }
    go(e, from, to, &mut Vec::new())
}

/// Static checks beyond the grammar: every free name declared, application
/// arity matches, `card` only over set-valued operands, quantifier domains
/// are carriers, `@` only on timed families.
pub fn check_well_formed(e: &Expr, vocab: &Vocabulary) -> Result<(), ParseError> {
    check_wf(e, vocab, &mut Vec::new())
}

fn is_set_valued(e: &Expr, vocab: &Vocabulary, bound: &[String]) -> bool {
    match e {
        Expr::SetLit(_) | Expr::AtTime(_, _) => true,
        Expr::Atom(n) => {
            !bound.iter().any(|b| b == n)
                && matches!(
                    vocab.kind_of(n),
                    Some(SymbolKind::CarrierSet) | Some(SymbolKind::TimedFamily)
                )
        }
        _ => false,
    }
}

fn check_wf(e: &Expr, vocab: &Vocabulary, bound: &mut Vec<String>) -> Result<(), ParseError> {
    match e {
        Expr::Atom(n) => {
            if bound.iter().any(|b| b == n) || vocab.kind_of(n).is_some() {
                Ok(())
            } else {
                Err(ParseError::UnknownSymbol(n.clone()))
            }
        }
        Expr::Num(_) => Ok(()),
        Expr::SetLit(es) => es.iter().try_for_each(|x| check_wf(x, vocab, bound)),
        Expr::App(f, args) => {
            if bound.iter().any(|b| b == f) {
                return Err(ParseError::NotApplicable {
                    name: f.clone(),
                    kind: "a bound variable".to_string(),
                });
            }
            match vocab.kind_of(f) {
                None => return Err(ParseError::UnknownSymbol(f.clone())),
                Some(SymbolKind::Mapping(want)) => {
                    if args.len() != want {
                        return Err(ParseError::ArityMismatch {
                            name: f.clone(),
                            got: args.len(),
                            want,
                        });
                    }
                }
                Some(SymbolKind::Predicate) => {}
                Some(kind) => {
                    return Err(ParseError::NotApplicable {
                        name: f.clone(),
                        kind: kind.to_string(),
                    });
                }
            }
            args.iter().try_for_each(|x| check_wf(x, vocab, bound))
        }
        Expr::Card(x) => {
            if !is_set_valued(x, vocab, bound) {
                return Err(ParseError::CardOperand);
            }
            check_wf(x, vocab, bound)
        }
        Expr::AbsDiff(a, b)
        | Expr::Cmp(_, a, b)
        | Expr::Member(a, b)
        | Expr::SubsetOf(a, b)
        | Expr::And(a, b)
        | Expr::Or(a, b)
        | Expr::Implies(a, b) => {
            check_wf(a, vocab, bound)?;
            check_wf(b, vocab, bound)
        }
        Expr::Not(x) => check_wf(x, vocab, bound),
        Expr::Forall(v, carrier, body) | Expr::Exists(v, carrier, body) => {
            if vocab.kind_of(carrier) != Some(SymbolKind::CarrierSet) {
                return Err(ParseError::NotACarrier(carrier.clone()));
            }
            bound.push(v.clone());
            let r = check_wf(body, vocab, bound);
            bound.pop();
            r
        }
        Expr::AtTime(family, _) => {
            if vocab.kind_of(family) != Some(SymbolKind::TimedFamily) {
                return Err(ParseError::NotAFamily(family.clone()));
            }
            Ok(())
        }
    }
}
