//! Line-oriented textual persistence for universes. One declaration per
//! line, UTF-8, LF endings, every section sorted, so a universe always
//! serializes to exactly one byte sequence and golden-file comparison is
//! trivial.
//!
//! ```text
//! stategrid-universe v1
//! universe <id>
//! time <t_max>
//! symbol <name> kind=<set|map:ARITY|family|pred>
//! depth <name> <nat>
//! carrier t=<nat> <name> = {<rational>,...}
//! map t=<nat> <name> = {(<rational>,<rational>),...}
//! family t=<nat> <name>@<index> = {<atom>,...}
//! cell <id> coord=(<d>,<h>,<t>) label="<text>" kind=<ground|mapdecl|pred|truth>
//!      [name=<token>] [arity=<nat>] [expr="<text>"] [value=<true|false|undef>]
//!      def=<true|undef> tags=<comma list>
//! prediction <cell-id> claim=<true|false> at=<nat> status=<pending|confirmed|refuted>
//! log <seq> <op> <digest>
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use stategrid::eval::{Model, Value};
use stategrid::grid::{CellContent, CellId, Coordinate, Grid, StateCell};
use stategrid::lang::{check_well_formed, parse, print, SymbolKind, Vocabulary};
use stategrid::rat::{format_rational, parse_rational};
use stategrid::stratify::DepthRegistry;
use stategrid::tri::TriValue;
use stategrid::universe::{LogEntry, Prediction, PredictionStatus, Universe};

pub const HEADER: &str = "stategrid-universe v1";

#[derive(Debug, Error)]
pub enum DocError {
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error("unsupported document version `{0}` (this build reads v1)")]
    VersionMismatch(String),
    #[error("universe is not representable in the v1 format: {0}")]
    Unrepresentable(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_err(line: usize, reason: impl Into<String>) -> DocError {
    DocError::Format {
        line,
        reason: reason.into(),
    }
}

// ---------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------

fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| !c.is_whitespace() && c != '"')
}

fn is_atom_token(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out
}

fn rational_token(v: &Value, what: &str) -> Result<String, DocError> {
    match v {
        Value::Num(r) => Ok(format_rational(r)),
        other => Err(DocError::Unrepresentable(format!(
            "{what} holds non-rational value `{other}`"
        ))),
    }
}

fn atom_token(v: &Value, what: &str) -> Result<String, DocError> {
    match v {
        Value::Atom(a) if is_atom_token(a) => Ok(a.clone()),
        other => Err(DocError::Unrepresentable(format!(
            "{what} holds a value `{other}` that is not an atom token"
        ))),
    }
}

fn kind_token(kind: SymbolKind) -> String {
    match kind {
        SymbolKind::CarrierSet => "set".to_string(),
        SymbolKind::Mapping(n) => format!("map:{n}"),
        SymbolKind::TimedFamily => "family".to_string(),
        SymbolKind::Predicate => "pred".to_string(),
    }
}

pub fn save(u: &Universe) -> Result<String, DocError> {
    if !is_token(&u.id) {
        return Err(DocError::Unrepresentable(format!(
            "universe id `{}` is not a single token",
            u.id
        )));
    }
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("universe {}\n", u.id));
    out.push_str(&format!("time {}\n", u.t_max()));

    for (name, kind) in u.vocab.declared() {
        out.push_str(&format!("symbol {} kind={}\n", name, kind_token(kind)));
    }
    for (name, depth) in u.registry.entries() {
        if !is_token(name) {
            return Err(DocError::Unrepresentable(format!(
                "registry name `{name}` is not a single token"
            )));
        }
        out.push_str(&format!("depth {name} {depth}\n"));
    }

    for (t, model) in u.models.iter().enumerate() {
        save_model(&mut out, u, model, t as u32)?;
    }

    for cell in u.grid.cells() {
        save_cell(&mut out, u, cell)?;
    }

    for p in &u.predictions {
        let claim = match p.claim {
            TriValue::True => "true",
            TriValue::False => "false",
            TriValue::Undefinable => {
                return Err(DocError::Unrepresentable(
                    "prediction claims an undefinable value".to_string(),
                ))
            }
        };
        out.push_str(&format!(
            "prediction {} claim={} at={} status={}\n",
            p.cell, claim, p.at, p.status
        ));
    }

    for entry in &u.log {
        if !is_token(&entry.op) || !is_token(&entry.digest) {
            return Err(DocError::Unrepresentable(format!(
                "log entry {} is not token-shaped",
                entry.seq
            )));
        }
        out.push_str(&format!("log {} {} {}\n", entry.seq, entry.op, entry.digest));
    }

    Ok(out)
}

fn save_model(out: &mut String, u: &Universe, model: &Model, t: u32) -> Result<(), DocError> {
    for name in &model.interpreted {
        let kind = u.vocab.kind_of(name).ok_or_else(|| {
            DocError::Unrepresentable(format!("interpreted symbol `{name}` is not declared"))
        })?;
        match kind {
            SymbolKind::CarrierSet => {
                let values = model.carriers.get(name).ok_or_else(|| {
                    DocError::Unrepresentable(format!("carrier `{name}` has no value set"))
                })?;
                let items: Result<Vec<String>, DocError> = values
                    .iter()
                    .map(|v| rational_token(v, &format!("carrier `{name}`")))
                    .collect();
                out.push_str(&format!("carrier t={t} {name} = {{{}}}\n", items?.join(",")));
            }
            SymbolKind::Mapping(_) => {
                let pairs = model.mappings.get(name).ok_or_else(|| {
                    DocError::Unrepresentable(format!("mapping `{name}` has no pair set"))
                })?;
                let items: Result<Vec<String>, DocError> = pairs
                    .iter()
                    .map(|(a, b)| {
                        Ok(format!(
                            "({},{})",
                            rational_token(a, &format!("mapping `{name}`"))?,
                            rational_token(b, &format!("mapping `{name}`"))?
                        ))
                    })
                    .collect();
                out.push_str(&format!("map t={t} {name} = {{{}}}\n", items?.join(",")));
            }
            SymbolKind::TimedFamily => {
                let series = model.families.get(name).ok_or_else(|| {
                    DocError::Unrepresentable(format!("family `{name}` has no series"))
                })?;
                for (idx, set) in series {
                    let items: Result<Vec<String>, DocError> = set
                        .iter()
                        .map(|v| atom_token(v, &format!("family `{name}`")))
                        .collect();
                    out.push_str(&format!(
                        "family t={t} {name}@{idx} = {{{}}}\n",
                        items?.join(",")
                    ));
                }
            }
            SymbolKind::Predicate => {
                return Err(DocError::Unrepresentable(format!(
                    "predicate symbol `{name}` cannot carry an interpretation"
                )));
            }
        }
    }
    Ok(())
}

fn save_cell(out: &mut String, u: &Universe, cell: &StateCell) -> Result<(), DocError> {
    if !is_token(cell.id.as_str()) {
        return Err(DocError::Unrepresentable(format!(
            "cell id `{}` is not a single token",
            cell.id
        )));
    }
    if cell.label.contains('\n') {
        return Err(DocError::Unrepresentable(format!(
            "label of `{}` contains a newline",
            cell.id
        )));
    }
    out.push_str(&format!(
        "cell {} coord=({},{},{}) label=\"{}\"",
        cell.id,
        cell.coord.depth,
        cell.coord.hierarchy,
        cell.coord.time,
        escape(&cell.label)
    ));
    match &cell.content {
        CellContent::GroundSet(name) => {
            if !is_token(name) {
                return Err(DocError::Unrepresentable(format!(
                    "ground set name `{name}` is not a single token"
                )));
            }
            out.push_str(&format!(" kind=ground name={name}"));
        }
        CellContent::MappingDecl { name, arity } => {
            if !is_token(name) {
                return Err(DocError::Unrepresentable(format!(
                    "mapping name `{name}` is not a single token"
                )));
            }
            out.push_str(&format!(" kind=mapdecl name={name} arity={arity}"));
        }
        CellContent::PredicateState(e) => {
            check_well_formed(e, &u.vocab).map_err(|err| {
                DocError::Unrepresentable(format!(
                    "cell `{}` is not well-formed against the vocabulary: {err}",
                    cell.id
                ))
            })?;
            out.push_str(&format!(" kind=pred expr=\"{}\"", escape(&print(e))));
        }
        CellContent::TruthResult(v) => {
            let value = match v {
                TriValue::True => "true",
                TriValue::False => "false",
                TriValue::Undefinable => "undef",
            };
            out.push_str(&format!(" kind=truth value={value}"));
        }
    }
    let def = match cell.definability {
        TriValue::True => "true",
        TriValue::Undefinable => "undef",
        TriValue::False => {
            return Err(DocError::Unrepresentable(format!(
                "cell `{}` has False definability",
                cell.id
            )))
        }
    };
    for tag in &cell.tags {
        if !is_atom_token(tag) {
            return Err(DocError::Unrepresentable(format!(
                "tag `{tag}` is not an atom token"
            )));
        }
    }
    let tags: Vec<&str> = cell.tags.iter().map(|t| t.as_str()).collect();
    out.push_str(&format!(" def={def} tags={}\n", tags.join(",")));
    Ok(())
}

pub fn save_file(u: &Universe, path: &Path) -> Result<(), DocError> {
    let text = save(u)?;
    std::fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------

pub fn load(text: &str) -> Result<Universe, DocError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, line)) if line == HEADER => {}
        Some((_, line)) if line.starts_with("stategrid-universe v") => {
            return Err(DocError::VersionMismatch(
                line.trim_start_matches("stategrid-universe ").to_string(),
            ));
        }
        Some((_, line)) => {
            return Err(format_err(1, format!("expected `{HEADER}`, found `{line}`")));
        }
        None => return Err(format_err(1, "empty document")),
    }

    // First pass: bucket lines by section, keeping line numbers for
    // diagnostics. Order between sections is not enforced; within the
    // model sections the time indices are.
    let mut id: Option<(usize, String)> = None;
    let mut t_max: Option<(usize, u32)> = None;
    let mut symbols = Vec::new();
    let mut depths = Vec::new();
    let mut carriers = Vec::new();
    let mut maps = Vec::new();
    let mut families = Vec::new();
    let mut cells = Vec::new();
    let mut predictions = Vec::new();
    let mut log_lines = Vec::new();

    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            return Err(format_err(line_no, "blank line"));
        }
        let word = line.split_whitespace().next().unwrap_or("");
        let rest = line[word.len()..].trim_start().to_string();
        match word {
            "universe" => {
                if id.is_some() {
                    return Err(format_err(line_no, "duplicate `universe` line"));
                }
                if !is_token(&rest) {
                    return Err(format_err(line_no, "universe id must be a single token"));
                }
                id = Some((line_no, rest));
            }
            "time" => {
                if t_max.is_some() {
                    return Err(format_err(line_no, "duplicate `time` line"));
                }
                let t = rest
                    .parse::<u32>()
                    .map_err(|_| format_err(line_no, "time must be a natural number"))?;
                t_max = Some((line_no, t));
            }
            "symbol" => symbols.push((line_no, rest)),
            "depth" => depths.push((line_no, rest)),
            "carrier" => carriers.push((line_no, rest)),
            "map" => maps.push((line_no, rest)),
            "family" => families.push((line_no, rest)),
            "cell" => cells.push((line_no, rest)),
            "prediction" => predictions.push((line_no, rest)),
            "log" => log_lines.push((line_no, rest)),
            other => {
                return Err(format_err(line_no, format!("unknown declaration `{other}`")));
            }
        }
    }

    let (_, id) = id.ok_or_else(|| format_err(1, "missing `universe` line"))?;
    let (_, t_max) = t_max.ok_or_else(|| format_err(1, "missing `time` line"))?;

    let mut vocab = Vocabulary::new();
    for (line_no, rest) in symbols {
        let (name, kind) = parse_symbol(line_no, &rest)?;
        vocab
            .declare(&name, kind)
            .map_err(|e| format_err(line_no, e.to_string()))?;
    }

    let mut registry = DepthRegistry::empty();
    for (line_no, rest) in depths {
        let mut parts = rest.split_whitespace();
        let name = parts
            .next()
            .ok_or_else(|| format_err(line_no, "missing symbol name"))?;
        let depth: u32 = parts
            .next()
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| format_err(line_no, "missing or invalid depth"))?;
        if parts.next().is_some() {
            return Err(format_err(line_no, "trailing tokens on depth line"));
        }
        registry.set(name, depth);
    }

    let mut models = vec![Model::new(); t_max as usize + 1];
    for (line_no, rest) in carriers {
        let (t, name, body) = parse_timed(line_no, &rest, t_max)?;
        expect_kind(line_no, &vocab, &name, SymbolKind::CarrierSet, "carrier")?;
        let values = parse_braced_list(line_no, &body)?
            .into_iter()
            .map(|tok| {
                parse_rational(&tok)
                    .map(Value::Num)
                    .ok_or_else(|| format_err(line_no, format!("invalid rational `{tok}`")))
            })
            .collect::<Result<BTreeSet<Value>, DocError>>()?;
        let model = &mut models[t as usize];
        model.carriers.insert(name.clone(), values);
        model.interpreted.insert(name);
    }
    for (line_no, rest) in maps {
        let (t, name, body) = parse_timed(line_no, &rest, t_max)?;
        match vocab.kind_of(&name) {
            Some(SymbolKind::Mapping(_)) => {}
            _ => {
                return Err(format_err(
                    line_no,
                    format!("`{name}` is not declared as a mapping"),
                ))
            }
        }
        let pairs = parse_braced_list(line_no, &body)?
            .into_iter()
            .map(|tok| parse_pair(line_no, &tok))
            .collect::<Result<BTreeSet<(Value, Value)>, DocError>>()?;
        let model = &mut models[t as usize];
        model.mappings.insert(name.clone(), pairs);
        model.interpreted.insert(name);
    }
    for (line_no, rest) in families {
        let (t, name_at, body) = parse_timed(line_no, &rest, t_max)?;
        let (name, index) = name_at
            .split_once('@')
            .ok_or_else(|| format_err(line_no, "family lines need `<name>@<index>`"))?;
        let index: u32 = index
            .parse()
            .map_err(|_| format_err(line_no, "invalid family index"))?;
        expect_kind(line_no, &vocab, name, SymbolKind::TimedFamily, "family")?;
        let values = parse_braced_list(line_no, &body)?
            .into_iter()
            .map(|tok| {
                if is_atom_token(&tok) {
                    Ok(Value::Atom(tok))
                } else {
                    Err(format_err(line_no, format!("invalid atom `{tok}`")))
                }
            })
            .collect::<Result<BTreeSet<Value>, DocError>>()?;
        let model = &mut models[t as usize];
        model
            .families
            .entry(name.to_string())
            .or_default()
            .insert(index, values);
        model.interpreted.insert(name.to_string());
    }

    let mut grid = Grid::new();
    for (line_no, rest) in cells {
        let cell = parse_cell(line_no, &rest, &vocab)?;
        grid = grid
            .put(cell)
            .map_err(|e| format_err(line_no, e.to_string()))?;
    }

    let mut preds = Vec::new();
    for (line_no, rest) in predictions {
        let p = parse_prediction(line_no, &rest, &grid, t_max)?;
        preds.push(p);
    }
    preds.sort();

    let mut log = Vec::new();
    for (line_no, rest) in log_lines {
        let mut parts = rest.split_whitespace();
        let seq: u64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format_err(line_no, "invalid log sequence number"))?;
        let op = parts
            .next()
            .ok_or_else(|| format_err(line_no, "missing log operation"))?
            .to_string();
        let digest = parts
            .next()
            .ok_or_else(|| format_err(line_no, "missing log digest"))?
            .to_string();
        if parts.next().is_some() {
            return Err(format_err(line_no, "trailing tokens on log line"));
        }
        log.push(LogEntry { seq, op, digest });
    }

    Ok(Universe {
        id,
        vocab,
        registry,
        grid,
        models,
        predictions: preds,
        log,
    })
}

pub fn load_file(path: &Path) -> Result<Universe, DocError> {
    let text = std::fs::read_to_string(path)?;
    load(&text)
}

fn parse_symbol(line_no: usize, rest: &str) -> Result<(String, SymbolKind), DocError> {
    let mut parts = rest.split_whitespace();
    let name = parts
        .next()
        .ok_or_else(|| format_err(line_no, "missing symbol name"))?
        .to_string();
    let kind_field = parts
        .next()
        .ok_or_else(|| format_err(line_no, "missing kind field"))?;
    if parts.next().is_some() {
        return Err(format_err(line_no, "trailing tokens on symbol line"));
    }
    let kind_text = kind_field
        .strip_prefix("kind=")
        .ok_or_else(|| format_err(line_no, "expected `kind=...`"))?;
    let kind = match kind_text {
        "set" => SymbolKind::CarrierSet,
        "family" => SymbolKind::TimedFamily,
        "pred" => SymbolKind::Predicate,
        other => match other.strip_prefix("map:") {
            Some(arity) => SymbolKind::Mapping(arity.parse().map_err(|_| {
                format_err(line_no, format!("invalid mapping arity in `{other}`"))
            })?),
            None => return Err(format_err(line_no, format!("unknown kind `{other}`"))),
        },
    };
    Ok((name, kind))
}

fn expect_kind(
    line_no: usize,
    vocab: &Vocabulary,
    name: &str,
    want: SymbolKind,
    section: &str,
) -> Result<(), DocError> {
    if vocab.kind_of(name) != Some(want) {
        return Err(format_err(
            line_no,
            format!("`{name}` is not declared with the kind this {section} line needs"),
        ));
    }
    Ok(())
}

/// `t=<nat> <name> = <body>`.
fn parse_timed(line_no: usize, rest: &str, t_max: u32) -> Result<(u32, String, String), DocError> {
    let mut parts = rest.split_whitespace();
    let t_field = parts
        .next()
        .ok_or_else(|| format_err(line_no, "missing `t=` field"))?;
    let t: u32 = t_field
        .strip_prefix("t=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format_err(line_no, "expected `t=<nat>`"))?;
    if t > t_max {
        return Err(format_err(
            line_no,
            format!("snapshot index {t} exceeds declared time {t_max}"),
        ));
    }
    let name = parts
        .next()
        .ok_or_else(|| format_err(line_no, "missing name"))?
        .to_string();
    match parts.next() {
        Some("=") => {}
        _ => return Err(format_err(line_no, "expected `=`")),
    }
    let body = parts
        .next()
        .ok_or_else(|| format_err(line_no, "missing value set"))?
        .to_string();
    if parts.next().is_some() {
        return Err(format_err(line_no, "trailing tokens"));
    }
    Ok((t, name, body))
}

fn parse_braced_list(line_no: usize, body: &str) -> Result<Vec<String>, DocError> {
    let inner = body
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| format_err(line_no, "expected `{...}`"))?;
    if inner.is_empty() {
        return Ok(Vec::new());
    }
    // Pairs contain commas of their own, so split at top level only.
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in inner.chars() {
        match c {
            '(' => {
                depth += 1;
                current.push(c);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| format_err(line_no, "unbalanced parentheses"))?;
                current.push(c);
            }
            ',' if depth == 0 => {
                items.push(std::mem::take(&mut current));
            }
            _ => current.push(c),
        }
    }
    items.push(current);
    if depth != 0 {
        return Err(format_err(line_no, "unbalanced parentheses"));
    }
    Ok(items)
}

fn parse_pair(line_no: usize, tok: &str) -> Result<(Value, Value), DocError> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format_err(line_no, format!("expected `(a,b)`, found `{tok}`")))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| format_err(line_no, format!("expected `(a,b)`, found `{tok}`")))?;
    let a = parse_rational(a)
        .ok_or_else(|| format_err(line_no, format!("invalid rational `{a}`")))?;
    let b = parse_rational(b)
        .ok_or_else(|| format_err(line_no, format!("invalid rational `{b}`")))?;
    Ok((Value::Num(a), Value::Num(b)))
}

/// Splits `key=value` fields where a value may be a quoted string with
/// `\"` and `\\` escapes.
fn parse_fields(line_no: usize, rest: &str) -> Result<BTreeMap<String, String>, DocError> {
    let mut out = BTreeMap::new();
    let chars: Vec<char> = rest.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        while i < chars.len() && chars[i].is_whitespace() {
            i += 1;
        }
        if i >= chars.len() {
            break;
        }
        let key_start = i;
        while i < chars.len() && chars[i] != '=' {
            if chars[i].is_whitespace() {
                return Err(format_err(line_no, "expected `key=value` field"));
            }
            i += 1;
        }
        if i >= chars.len() {
            return Err(format_err(line_no, "expected `=` in field"));
        }
        let key: String = chars[key_start..i].iter().collect();
        i += 1;
        let value = if chars.get(i) == Some(&'"') {
            i += 1;
            let mut v = String::new();
            loop {
                match chars.get(i) {
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some(c @ ('"' | '\\')) => v.push(*c),
                            _ => return Err(format_err(line_no, "bad escape sequence")),
                        }
                        i += 2;
                    }
                    Some(c) => {
                        v.push(*c);
                        i += 1;
                    }
                    None => return Err(format_err(line_no, "unterminated quoted value")),
                }
            }
            v
        } else {
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() {
                i += 1;
            }
            chars[start..i].iter().collect()
        };
        if out.insert(key.clone(), value).is_some() {
            return Err(format_err(line_no, format!("duplicate field `{key}`")));
        }
    }
    Ok(out)
}

fn parse_cell(line_no: usize, rest: &str, vocab: &Vocabulary) -> Result<StateCell, DocError> {
    let (id, fields_text) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| format_err(line_no, "cell line needs an id and fields"))?;
    let mut fields = parse_fields(line_no, fields_text)?;
    let mut take = |key: &str| -> Result<String, DocError> {
        fields
            .remove(key)
            .ok_or_else(|| format_err(line_no, format!("missing `{key}=` field")))
    };

    let coord_text = take("coord")?;
    let coord = parse_coord(line_no, &coord_text)?;
    let label = take("label")?;
    let kind = take("kind")?;
    let content = match kind.as_str() {
        "ground" => CellContent::GroundSet(take("name")?),
        "mapdecl" => CellContent::MappingDecl {
            name: take("name")?,
            arity: take("arity")?
                .parse()
                .map_err(|_| format_err(line_no, "invalid arity"))?,
        },
        "pred" => {
            let text = take("expr")?;
            let e = parse(&text, vocab)
                .map_err(|err| format_err(line_no, format!("in expr: {err}")))?;
            CellContent::PredicateState(e)
        }
        "truth" => CellContent::TruthResult(match take("value")?.as_str() {
            "true" => TriValue::True,
            "false" => TriValue::False,
            "undef" => TriValue::Undefinable,
            other => {
                return Err(format_err(line_no, format!("unknown truth value `{other}`")))
            }
        }),
        other => return Err(format_err(line_no, format!("unknown cell kind `{other}`"))),
    };
    let definability = match take("def")?.as_str() {
        "true" => TriValue::True,
        "undef" => TriValue::Undefinable,
        other => {
            return Err(format_err(
                line_no,
                format!("definability must be true or undef, found `{other}`"),
            ))
        }
    };
    let tags_text = take("tags")?;
    let tags: BTreeSet<String> = if tags_text.is_empty() {
        BTreeSet::new()
    } else {
        tags_text.split(',').map(|t| t.to_string()).collect()
    };
    if !fields.is_empty() {
        let extra: Vec<String> = fields.into_keys().collect();
        return Err(format_err(
            line_no,
            format!("unknown fields: {}", extra.join(", ")),
        ));
    }

    let mut cell = StateCell::new(id, coord, &label, content)
        .map_err(|e| format_err(line_no, e.to_string()))?;
    cell.definability = definability;
    cell.tags = tags;
    cell.validate().map_err(|e| format_err(line_no, e.to_string()))?;
    Ok(cell)
}

fn parse_coord(line_no: usize, text: &str) -> Result<Coordinate, DocError> {
    let inner = text
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format_err(line_no, "expected `coord=(d,h,t)`"))?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(format_err(line_no, "coordinate needs three components"));
    }
    let nums: Result<Vec<u32>, DocError> = parts
        .iter()
        .map(|p| {
            p.parse()
                .map_err(|_| format_err(line_no, format!("invalid coordinate component `{p}`")))
        })
        .collect();
    let nums = nums?;
    Ok(Coordinate::new(nums[0], nums[1], nums[2]))
}

fn parse_prediction(
    line_no: usize,
    rest: &str,
    grid: &Grid,
    t_max: u32,
) -> Result<Prediction, DocError> {
    let (cell_id, fields_text) = rest
        .split_once(char::is_whitespace)
        .ok_or_else(|| format_err(line_no, "prediction line needs a cell id and fields"))?;
    let cell = CellId::new(cell_id);
    if !grid.contains(&cell) {
        return Err(format_err(
            line_no,
            format!("prediction refers to unknown cell `{cell_id}`"),
        ));
    }
    let mut fields = parse_fields(line_no, fields_text)?;
    let mut take = |key: &str| -> Result<String, DocError> {
        fields
            .remove(key)
            .ok_or_else(|| format_err(line_no, format!("missing `{key}=` field")))
    };
    let claim = match take("claim")?.as_str() {
        "true" => TriValue::True,
        "false" => TriValue::False,
        other => return Err(format_err(line_no, format!("invalid claim `{other}`"))),
    };
    let at: u32 = take("at")?
        .parse()
        .map_err(|_| format_err(line_no, "invalid target time"))?;
    let status = match take("status")?.as_str() {
        "pending" => PredictionStatus::Pending,
        "confirmed" => PredictionStatus::Confirmed,
        "refuted" => PredictionStatus::Refuted,
        other => return Err(format_err(line_no, format!("invalid status `{other}`"))),
    };
    if status != PredictionStatus::Pending && at > t_max {
        return Err(format_err(
            line_no,
            "a resolved prediction cannot target a time beyond the universe",
        ));
    }
    Ok(Prediction {
        cell,
        claim,
        at,
        status,
    })
}
