//! Finite-model evaluation under the three-valued semantics.
//!
//! A [`Model`] interprets some subset of a vocabulary: carriers as finite
//! value sets, mappings as finite relations (functionality is checked, not
//! assumed), timed families as index-to-set series. Evaluation is classical
//! wherever every symbol involved is interpreted; any sub-expression that
//! touches an uninterpreted symbol comes out `Undefinable`. That rule is
//! the depth-0 axiom made operational: an unobserved fact is not an error,
//! it is a fact whose definability has not arrived yet. Malformed queries
//! (unbound variables, terms where predicates belong) are errors instead.
//!
//! Quantifiers expand over the named carrier with strong-Kleene folds, so
//! results never depend on evaluation order. All arithmetic is exact.

pub mod reference;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::lang::{
    free_vars, print, rename_symbol, CmpOp, Expr, IndexExpr, SymbolKind, Vocabulary, SYM_FUNC,
    SYM_MINUS, SYM_PLUS,
};
use crate::rat::{abs_diff, format_rational, rat_int, Rational};
use crate::tri::{all3, and3, any3, not3, or3, TriValue};

/// A point value: an exact rational, an uninterpreted atom, or a tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Value {
    Num(Rational),
    Atom(String),
    Tuple(Vec<Value>),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Num(rat_int(n))
    }

    pub fn rational(r: Rational) -> Value {
        Value::Num(r)
    }

    pub fn atom(name: &str) -> Value {
        Value::Atom(name.to_string())
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(r) => write!(f, "{}", format_rational(r)),
            Value::Atom(a) => write!(f, "{a}"),
            Value::Tuple(vs) => {
                write!(f, "(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finite interpretation of part of a vocabulary. `interpreted` is the
/// authoritative set of known symbols; the builders keep it in sync with
/// the containers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub carriers: BTreeMap<String, BTreeSet<Value>>,
    pub mappings: BTreeMap<String, BTreeSet<(Value, Value)>>,
    pub families: BTreeMap<String, BTreeMap<u32, BTreeSet<Value>>>,
    pub interpreted: BTreeSet<String>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_carrier<I: IntoIterator<Item = Value>>(mut self, name: &str, values: I) -> Self {
        self.carriers
            .insert(name.to_string(), values.into_iter().collect());
        self.interpreted.insert(name.to_string());
        self
    }

    pub fn with_mapping<I: IntoIterator<Item = (Value, Value)>>(
        mut self,
        name: &str,
        pairs: I,
    ) -> Self {
        self.mappings
            .insert(name.to_string(), pairs.into_iter().collect());
        self.interpreted.insert(name.to_string());
        self
    }

    /// A family with no indices at all carries no information, so it is
    /// normalized away rather than recorded as interpreted-but-empty.
    pub fn with_family<I: IntoIterator<Item = (u32, BTreeSet<Value>)>>(
        mut self,
        name: &str,
        series: I,
    ) -> Self {
        let series: BTreeMap<u32, BTreeSet<Value>> = series.into_iter().collect();
        if series.is_empty() {
            return self;
        }
        self.families.insert(name.to_string(), series);
        self.interpreted.insert(name.to_string());
        self
    }

    pub fn interprets(&self, name: &str) -> bool {
        self.interpreted.contains(name)
    }

    /// The restriction of this model to the masked names: everything else
    /// drops out of `interpreted` and so becomes undefinable downstream.
    pub fn masked(&self, mask: &BTreeSet<String>) -> Model {
        Model {
            carriers: self
                .carriers
                .iter()
                .filter(|(n, _)| mask.contains(*n))
                .map(|(n, v)| (n.clone(), v.clone()))
                .collect(),
            mappings: self
                .mappings
                .iter()
                .filter(|(n, _)| mask.contains(*n))
                .map(|(n, v)| (n.clone(), v.clone()))
                .collect(),
            families: self
                .families
                .iter()
                .filter(|(n, _)| mask.contains(*n))
                .map(|(n, v)| (n.clone(), v.clone()))
                .collect(),
            interpreted: self.interpreted.intersection(mask).cloned().collect(),
        }
    }

    fn family_at(&self, name: &str, index: u32) -> Option<&BTreeSet<Value>> {
        if !self.interprets(name) {
            return None;
        }
        self.families.get(name).and_then(|s| s.get(&index))
    }
}

/// Variable bindings plus the ambient time index `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Env {
    vars: BTreeMap<String, Value>,
    pub time: Option<u32>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_time(time: u32) -> Self {
        Env {
            vars: BTreeMap::new(),
            time: Some(time),
        }
    }

    pub fn bind(&self, name: &str, value: Value) -> Env {
        let mut next = self.clone();
        next.vars.insert(name.to_string(), value);
        next
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.vars.get(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{0}` is not a predicate expression")]
    NotAPredicate(String),
    #[error("`{0}` is not a point-valued term")]
    NotATerm(String),
    #[error("the function test expects one argument naming a mapping, got `{0}`")]
    FuncOperand(String),
    #[error("family `{family}` is not a subset of `{of}` at index {index}")]
    SubsetViolation {
        family: String,
        of: String,
        index: u32,
    },
    #[error("window must not be empty")]
    EmptyWindow,
    #[error("object `{object}` is not free in the body of `{name}`")]
    ObjectNotFree { name: String, object: String },
}

/// Evaluates a predicate expression to a [`TriValue`].
pub fn eval(e: &Expr, vocab: &Vocabulary, m: &Model, env: &Env) -> Result<TriValue, EvalError> {
    match e {
        Expr::Cmp(op, l, r) => {
            let a = eval_term(l, vocab, m, env)?;
            let b = eval_term(r, vocab, m, env)?;
            Ok(match (a, b) {
                (Some(a), Some(b)) => compare(*op, &a, &b).into(),
                _ => TriValue::Undefinable,
            })
        }
        Expr::Member(x, s) => {
            let point = eval_term(x, vocab, m, env)?;
            let set = eval_set(s, vocab, m, env)?;
            Ok(match (point, set) {
                (Some(p), Some(s)) => s.contains(&p).into(),
                _ => TriValue::Undefinable,
            })
        }
        Expr::SubsetOf(a, b) => {
            let sa = eval_set(a, vocab, m, env)?;
            let sb = eval_set(b, vocab, m, env)?;
            Ok(match (sa, sb) {
                (Some(sa), Some(sb)) => sa.is_subset(&sb).into(),
                _ => TriValue::Undefinable,
            })
        }
        Expr::Not(x) => Ok(not3(eval(x, vocab, m, env)?)),
        Expr::And(a, b) => Ok(and3(eval(a, vocab, m, env)?, eval(b, vocab, m, env)?)),
        Expr::Or(a, b) => Ok(or3(eval(a, vocab, m, env)?, eval(b, vocab, m, env)?)),
        Expr::Implies(a, b) => Ok(crate::tri::implies3(
            eval(a, vocab, m, env)?,
            eval(b, vocab, m, env)?,
        )),
        Expr::Forall(v, carrier, body) => {
            if !m.interprets(carrier) {
                return Ok(TriValue::Undefinable);
            }
            let empty = BTreeSet::new();
            let values = m.carriers.get(carrier).unwrap_or(&empty);
            let mut acc = TriValue::True;
            for value in values {
                let inner = eval(body, vocab, m, &env.bind(v, value.clone()))?;
                acc = and3(acc, inner);
            }
            Ok(acc)
        }
        Expr::Exists(v, carrier, body) => {
            if !m.interprets(carrier) {
                return Ok(TriValue::Undefinable);
            }
            let empty = BTreeSet::new();
            let values = m.carriers.get(carrier).unwrap_or(&empty);
            let mut acc = TriValue::False;
            for value in values {
                let inner = eval(body, vocab, m, &env.bind(v, value.clone()))?;
                acc = or3(acc, inner);
            }
            Ok(acc)
        }
        Expr::App(f, args) => match vocab.kind_of(f) {
            Some(SymbolKind::Predicate) if f == SYM_FUNC => {
                if let [Expr::Atom(name)] = args.as_slice() {
                    if matches!(vocab.kind_of(name), Some(SymbolKind::Mapping(_))) {
                        return func_check(name, m);
                    }
                }
                Err(EvalError::FuncOperand(
                    args.iter().map(print).collect::<Vec<_>>().join(", "),
                ))
            }
            // A declared predicate symbol has no model structure to
            // interpret it, so applying one is an unknown, not an error.
            Some(SymbolKind::Predicate) => Ok(TriValue::Undefinable),
            _ => Err(EvalError::NotAPredicate(print(e))),
        },
        _ => Err(EvalError::NotAPredicate(print(e))),
    }
}

fn compare(op: CmpOp, a: &Value, b: &Value) -> bool {
    // Rationals compare numerically; anything else falls back to the
    // structural order, which keeps every comparison decided.
    let ord = a.cmp(b);
    match op {
        CmpOp::Lt => ord.is_lt(),
        CmpOp::Gt => ord.is_gt(),
        CmpOp::Eq => ord.is_eq(),
        CmpOp::Le => ord.is_le(),
        CmpOp::Ge => ord.is_ge(),
    }
}

/// Point-level evaluation. `Ok(None)` means the term has no defined point
/// value here: a missing interpretation, a partial or ambiguous mapping
/// image, or a set-valued expression in a point position.
fn eval_term(
    e: &Expr,
    vocab: &Vocabulary,
    m: &Model,
    env: &Env,
) -> Result<Option<Value>, EvalError> {
    match e {
        Expr::Atom(n) => {
            if let Some(v) = env.get(n) {
                return Ok(Some(v.clone()));
            }
            match vocab.kind_of(n) {
                None => Err(EvalError::UnboundVariable(n.clone())),
                Some(_) => Ok(None),
            }
        }
        Expr::Num(r) => Ok(Some(Value::Num(r.clone()))),
        Expr::App(f, args) => {
            if f == SYM_PLUS || f == SYM_MINUS {
                let a = eval_term(&args[0], vocab, m, env)?;
                let b = eval_term(&args[1], vocab, m, env)?;
                return Ok(match (a, b) {
                    (Some(Value::Num(a)), Some(Value::Num(b))) => {
                        if f == SYM_PLUS {
                            Some(Value::Num(a + b))
                        } else {
                            Some(Value::Num(a - b))
                        }
                    }
                    _ => None,
                });
            }
            match vocab.kind_of(f) {
                Some(SymbolKind::Mapping(arity)) => {
                    if !m.interprets(f) {
                        return Ok(None);
                    }
                    let mut key_parts = Vec::with_capacity(args.len());
                    for arg in args {
                        match eval_term(arg, vocab, m, env)? {
                            Some(v) => key_parts.push(v),
                            None => return Ok(None),
                        }
                    }
                    let key = if arity == 1 {
                        key_parts.pop().expect("arity checked at parse time")
                    } else {
                        Value::Tuple(key_parts)
                    };
                    let empty = BTreeSet::new();
                    let pairs = m.mappings.get(f).unwrap_or(&empty);
                    let images: BTreeSet<&Value> = pairs
                        .iter()
                        .filter(|(x, _)| *x == key)
                        .map(|(_, y)| y)
                        .collect();
                    // A point with no image or an ambiguous one has no
                    // defined value; functionality is a separate judgment.
                    Ok(if images.len() == 1 {
                        images.into_iter().next().cloned().map(Some).unwrap()
                    } else {
                        None
                    })
                }
                None => Err(EvalError::UnboundVariable(f.clone())),
                _ => Err(EvalError::NotATerm(print(e))),
            }
        }
        Expr::Card(x) => {
            let set = eval_set(x, vocab, m, env)?;
            Ok(set.map(|s| Value::int(s.len() as i64)))
        }
        Expr::AbsDiff(a, b) => {
            let a = eval_term(a, vocab, m, env)?;
            let b = eval_term(b, vocab, m, env)?;
            Ok(match (a, b) {
                (Some(Value::Num(a)), Some(Value::Num(b))) => {
                    Some(Value::Num(abs_diff(&a, &b)))
                }
                _ => None,
            })
        }
        Expr::SetLit(_) | Expr::AtTime(_, _) => Ok(None),
        _ => Err(EvalError::NotATerm(print(e))),
    }
}

/// Set-level evaluation: set literals, interpreted carriers, and family
/// snapshots. Anything else has no set denotation and yields `None`.
fn eval_set(
    e: &Expr,
    vocab: &Vocabulary,
    m: &Model,
    env: &Env,
) -> Result<Option<BTreeSet<Value>>, EvalError> {
    match e {
        Expr::SetLit(es) => {
            let mut out = BTreeSet::new();
            for x in es {
                match eval_term(x, vocab, m, env)? {
                    Some(v) => {
                        out.insert(v);
                    }
                    None => return Ok(None),
                }
            }
            Ok(Some(out))
        }
        Expr::Atom(n) => {
            if env.get(n).is_some() {
                return Ok(None);
            }
            match vocab.kind_of(n) {
                None => Err(EvalError::UnboundVariable(n.clone())),
                Some(SymbolKind::CarrierSet) => {
                    if m.interprets(n) {
                        Ok(Some(m.carriers.get(n).cloned().unwrap_or_default()))
                    } else {
                        Ok(None)
                    }
                }
                Some(_) => Ok(None),
            }
        }
        Expr::AtTime(family, idx) => {
            let index = resolve_index(idx, env)?;
            Ok(m.family_at(family, index).cloned())
        }
        _ => Ok(None),
    }
}

fn resolve_index(idx: &IndexExpr, env: &Env) -> Result<u32, EvalError> {
    match idx {
        IndexExpr::Lit(n) => Ok(*n),
        IndexExpr::Var => env
            .time
            .ok_or_else(|| EvalError::UnboundVariable("i".to_string())),
        IndexExpr::Succ => env
            .time
            .map(|t| t + 1)
            .ok_or_else(|| EvalError::UnboundVariable("i".to_string())),
    }
}

/// Is the named relation a function: does every first component have a
/// unique second component? `Undefinable` when the name is uninterpreted;
/// the empty relation passes vacuously.
pub fn func_check(name: &str, m: &Model) -> Result<TriValue, EvalError> {
    if !m.interprets(name) {
        return Ok(TriValue::Undefinable);
    }
    let empty = BTreeSet::new();
    let pairs = m.mappings.get(name).unwrap_or(&empty);
    for (x, y) in pairs {
        for (x2, y2) in pairs {
            if x == x2 && y != y2 {
                return Ok(TriValue::False);
            }
        }
    }
    Ok(TriValue::True)
}

/// A predicate wrapped into a named 0/1 judgment over one tested object.
/// Wrapping raises the mapping hierarchy by one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JudgmentFn {
    pub name: String,
    pub body: Expr,
    pub object: String,
}

pub fn booleanize(name: &str, body: Expr, object: &str) -> Result<JudgmentFn, EvalError> {
    if !free_vars(&body).contains(object) {
        return Err(EvalError::ObjectNotFree {
            name: name.to_string(),
            object: object.to_string(),
        });
    }
    Ok(JudgmentFn {
        name: name.to_string(),
        body,
        object: object.to_string(),
    })
}

impl JudgmentFn {
    /// Applies the judgment to the named subject: the body is evaluated
    /// with the object symbol standing for `subject` under the model's
    /// interpretation of it.
    pub fn apply(&self, vocab: &Vocabulary, m: &Model, subject: &str) -> Result<TriValue, EvalError> {
        self.apply_with(vocab, m, subject, &Env::new())
    }

    pub fn apply_with(
        &self,
        vocab: &Vocabulary,
        m: &Model,
        subject: &str,
        env: &Env,
    ) -> Result<TriValue, EvalError> {
        if subject == self.object {
            eval(&self.body, vocab, m, env)
        } else {
            let body = rename_symbol(&self.body, &self.object, subject);
            eval(&body, vocab, m, env)
        }
    }

    pub fn hierarchy(&self, vocab: &Vocabulary, mode: crate::stratify::Mode) -> u32 {
        crate::stratify::hierarchy_of(&self.body, vocab, mode) + 1
    }
}

/// `card(F@(i+1)) > card(F@i)`.
pub fn growth_expr(family: &str) -> Expr {
    Expr::cmp(
        CmpOp::Gt,
        Expr::card(Expr::at_time(family, IndexExpr::Succ)),
        Expr::card(Expr::at_time(family, IndexExpr::Var)),
    )
}

/// `card(F@(i+1)) < card(F@i)`.
pub fn shrink_expr(family: &str) -> Expr {
    Expr::cmp(
        CmpOp::Lt,
        Expr::card(Expr::at_time(family, IndexExpr::Succ)),
        Expr::card(Expr::at_time(family, IndexExpr::Var)),
    )
}

/// Input-structure predicate: both the input and output families grow.
pub fn input_growth_body(input: &str, output: &str) -> Expr {
    Expr::and(growth_expr(input), growth_expr(output))
}

/// Output-structure predicate: the input family shrinks while the output
/// family grows.
pub fn output_emission_body(input: &str, output: &str) -> Expr {
    Expr::and(shrink_expr(input), growth_expr(output))
}

/// Processing-structure predicate over two named substructures: one
/// shrinks or the other grows.
pub fn internal_process_body(t_family: &str, v_family: &str) -> Expr {
    Expr::or(shrink_expr(t_family), growth_expr(v_family))
}

/// How the existential substructures of the processing predicate are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetMode {
    /// `T` and `V` are declared observables, checked to be subsets of the
    /// input family wherever both are known.
    Declared,
    /// The existential ranges over all subsets; it collapses to the closed
    /// form "some input exists at i or i+1".
    Free,
}

pub fn c_in(
    input: &str,
    output: &str,
    i: u32,
    vocab: &Vocabulary,
    m: &Model,
) -> Result<TriValue, EvalError> {
    eval(
        &input_growth_body(input, output),
        vocab,
        m,
        &Env::with_time(i),
    )
}

pub fn c_out(
    input: &str,
    output: &str,
    i: u32,
    vocab: &Vocabulary,
    m: &Model,
) -> Result<TriValue, EvalError> {
    eval(
        &output_emission_body(input, output),
        vocab,
        m,
        &Env::with_time(i),
    )
}

#[allow(clippy::too_many_arguments)]
pub fn c_proc(
    input: &str,
    t_family: &str,
    v_family: &str,
    i: u32,
    vocab: &Vocabulary,
    m: &Model,
    mode: SubsetMode,
) -> Result<TriValue, EvalError> {
    match mode {
        SubsetMode::Declared => {
            for fam in [t_family, v_family] {
                for index in [i, i + 1] {
                    if let (Some(sub), Some(sup)) =
                        (m.family_at(fam, index), m.family_at(input, index))
                    {
                        if !sub.is_subset(sup) {
                            return Err(EvalError::SubsetViolation {
                                family: fam.to_string(),
                                of: input.to_string(),
                                index,
                            });
                        }
                    }
                }
            }
            eval(
                &internal_process_body(t_family, v_family),
                vocab,
                m,
                &Env::with_time(i),
            )
        }
        SubsetMode::Free => {
            // Closed form of the unrestricted existential: pick T as the
            // whole input with an empty successor, or V as empty with any
            // nonempty successor. Either works as soon as the input is
            // nonempty at i or i+1.
            let nonempty = |idx: IndexExpr| {
                Expr::cmp(
                    CmpOp::Ge,
                    Expr::card(Expr::at_time(input, idx)),
                    Expr::num(rat_int(1)),
                )
            };
            eval(
                &Expr::or(nonempty(IndexExpr::Var), nonempty(IndexExpr::Succ)),
                vocab,
                m,
                &Env::with_time(i),
            )
        }
    }
}

/// The combined judgment exactly as written: input, output, and processing
/// structures must all hold at the same index. The input clause demands
/// growth while the output clause demands shrinkage of the same family, so
/// on fully interpreted data this is constantly `False`; the property is
/// surfaced rather than patched, and [`int_windowed`] offers the reading
/// where the structures may show themselves at different indices.
#[allow(clippy::too_many_arguments)]
pub fn int_literal(
    input: &str,
    output: &str,
    t_family: &str,
    v_family: &str,
    i: u32,
    vocab: &Vocabulary,
    m: &Model,
    mode: SubsetMode,
) -> Result<TriValue, EvalError> {
    let a = c_in(input, output, i, vocab, m)?;
    let b = c_out(input, output, i, vocab, m)?;
    let c = c_proc(input, t_family, v_family, i, vocab, m, mode)?;
    Ok(all3([a, b, c]))
}

/// Windowed combined judgment: each structure may be exhibited at its own
/// index within the window.
#[allow(clippy::too_many_arguments)]
pub fn int_windowed(
    input: &str,
    output: &str,
    t_family: &str,
    v_family: &str,
    window: &[u32],
    vocab: &Vocabulary,
    m: &Model,
    mode: SubsetMode,
) -> Result<TriValue, EvalError> {
    if window.is_empty() {
        return Err(EvalError::EmptyWindow);
    }
    let mut ins = Vec::new();
    let mut outs = Vec::new();
    let mut procs = Vec::new();
    for &i in window {
        ins.push(c_in(input, output, i, vocab, m)?);
        outs.push(c_out(input, output, i, vocab, m)?);
        procs.push(c_proc(input, t_family, v_family, i, vocab, m, mode)?);
    }
    Ok(all3([any3(ins), any3(outs), any3(procs)]))
}
