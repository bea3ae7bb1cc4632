use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use stategrid::grid::CellId;
use stategrid::lang::{parse, print, Vocabulary};
use stategrid::stratify::{component_cells, report, DepthRegistry, Mode};
use stategrid::tri::TriValue;
use stategrid::universe::{
    classify_operation, OpDescriptor, TranslationMap, Universe, UniverseError,
};

use stategrid_cli::demo::{demo_continuity, demo_intelligence};
use stategrid_cli::doc::{load_file, save, save_file, DocError};

/// Exit status 1: the operation ran but reported a domain-level negative
/// (a failed evaluation precondition, merge conflicts, an unverifiable
/// codomain). Exit status 2: the invocation or an input file was malformed.
enum Failure {
    Domain(String),
    Input(String),
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<UniverseError> for Failure {
    fn from(e: UniverseError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<stategrid::lang::ParseError> for Failure {
    fn from(e: stategrid::lang::ParseError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<stategrid::stratify::StratifyError> for Failure {
    fn from(e: stategrid::stratify::StratifyError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<stategrid::eval::EvalError> for Failure {
    fn from(e: stategrid::eval::EvalError) -> Self {
        Failure::Domain(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "stategrid",
    version,
    about = "Place, evaluate, and evolve definition universes on the state grid"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClaimArg {
    True,
    False,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoKind {
    /// Continuity judgment: placement table and fixture verdicts.
    Cont,
    /// Combined growth judgment: placement table, single-index and
    /// windowed runs.
    Intelligence,
}

#[derive(Subcommand)]
enum Cmd {
    /// Create a fresh universe document.
    New {
        id: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Parse an expression against a universe's vocabulary and print its
    /// canonical form.
    Parse {
        #[arg(short, long)]
        universe: PathBuf,
        expr: String,
    },
    /// Place an expression's components on the grid and print the table.
    Place {
        #[arg(short, long)]
        universe: PathBuf,
        #[arg(long, default_value = "transparent")]
        mode: String,
        /// Extra `name depth` lines overriding the universe registry.
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        time: u32,
        expr: String,
    },
    /// Evaluate an expression against the snapshot at a time.
    Eval {
        #[arg(short, long)]
        universe: PathBuf,
        #[arg(long, default_value_t = 0)]
        time: u32,
        expr: String,
    },
    /// Print the universe's grid as a table.
    Report {
        #[arg(short, long)]
        universe: PathBuf,
    },
    /// Rewrite the universe through a translation map file.
    Translate {
        #[arg(short, long)]
        universe: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Three-way merge: BASE and two universes derived from it.
    Merge {
        base: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Advance real time by one tick, carrying only the masked names and
    /// cell ids.
    Tick {
        #[arg(short, long)]
        universe: PathBuf,
        #[arg(long, value_delimiter = ',')]
        mask: Vec<String>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Record a claimed truth value for a predicate cell at a future time.
    Predict {
        #[arg(short, long)]
        universe: PathBuf,
        #[arg(long)]
        cell: String,
        #[arg(long, value_enum)]
        claim: ClaimArg,
        #[arg(long)]
        at: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Re-evaluate pending predictions whose target time has arrived.
    Verify {
        #[arg(short, long)]
        universe: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Classify an operation footprint as macrocosm or microcosm.
    Classify {
        #[arg(short, long)]
        universe: PathBuf,
        /// Classify the translation described by this map file.
        #[arg(long, conflicts_with = "names")]
        map: Option<PathBuf>,
        /// Classify an operation touching these symbols.
        #[arg(long, value_delimiter = ',')]
        names: Vec<String>,
    },
    /// Check that every predicate cell is evaluable at the current time.
    CheckCodomain {
        #[arg(short, long)]
        universe: PathBuf,
    },
    /// Run a bundled end-to-end demonstration.
    Demo {
        #[arg(value_enum)]
        which: DemoKind,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Writes the universe to `out` when given, otherwise prints the document
/// to standard output.
fn emit(u: &Universe, out: &Option<PathBuf>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            save_file(u, path)?;
            Ok(())
        }
        None => {
            print!("{}", save(u)?);
            Ok(())
        }
    }
}

fn parse_mode(text: &str) -> Result<Mode, Failure> {
    text.parse::<Mode>().map_err(Failure::Input)
}

fn read_registry_file(path: &Path, base: &DepthRegistry) -> Result<DepthRegistry, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(e.to_string()))?;
    let mut reg = base.clone();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let name = parts.next();
        let depth = parts.next().and_then(|d| d.parse::<u32>().ok());
        match (name, depth, parts.next()) {
            (Some(name), Some(depth), None) => reg.set(name, depth),
            _ => {
                return Err(Failure::Input(format!(
                    "{}:{}: registry lines are `<name> <depth>`",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok(reg)
}

/// Map files: a `map <source> -> <target>` header, then `<from> <to>`
/// lines.
fn read_map_file(path: &Path) -> Result<TranslationMap, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(e.to_string()))?;
    let mut tm: Option<TranslationMap> = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match (&mut tm, parts.as_slice()) {
            (slot @ None, ["map", source, "->", target]) => {
                *slot = Some(TranslationMap::new(source, target));
            }
            (None, _) => {
                return Err(Failure::Input(format!(
                    "{}:{}: expected `map <source> -> <target>` first",
                    path.display(),
                    i + 1
                )))
            }
            (Some(tm), [from, to]) => {
                tm.entries.insert(from.to_string(), to.to_string());
            }
            (Some(_), _) => {
                return Err(Failure::Input(format!(
                    "{}:{}: expected `<from> <to>`",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    tm.ok_or_else(|| Failure::Input(format!("{}: empty map file", path.display())))
}

/// The target vocabulary of a translation: the source vocabulary with the
/// mapped names renamed, kinds preserved.
fn derive_target_vocab(source: &Vocabulary, tm: &TranslationMap) -> Result<Vocabulary, Failure> {
    let mut out = Vocabulary::new();
    for (name, kind) in source.declared() {
        let target = tm.entries.get(name).map(|s| s.as_str()).unwrap_or(name);
        out.declare(target, kind)
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    Ok(out)
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::New { id, out } => {
            let u = Universe::new(&id);
            emit(&u, &out)
        }
        Cmd::Parse { universe, expr } => {
            let u = load_file(&universe)?;
            let e = parse(&expr, &u.vocab)?;
            println!("{}", print(&e));
            Ok(())
        }
        Cmd::Place {
            universe,
            mode,
            registry,
            time,
            expr,
        } => {
            let u = load_file(&universe)?;
            let mode = parse_mode(&mode)?;
            let reg = match registry {
                Some(path) => read_registry_file(&path, &u.registry)?,
                None => u.registry.clone(),
            };
            let e = parse(&expr, &u.vocab)?;
            let label = print(&e);
            let cells = component_cells(&e, "expr", &label, &u.vocab, &reg, mode, time)?;
            let grid = stategrid::grid::Grid::from_cells(cells)
                .map_err(|e| Failure::Domain(e.to_string()))?;
            print!("{}", report(&grid));
            Ok(())
        }
        Cmd::Eval {
            universe,
            time,
            expr,
        } => {
            let u = load_file(&universe)?;
            if u.model_at(time).is_none() {
                return Err(Failure::Domain(format!("time {time} not materialized")));
            }
            let e = parse(&expr, &u.vocab)?;
            let v = u.eval_at(&e, time)?;
            println!("{v}");
            Ok(())
        }
        Cmd::Report { universe } => {
            let u = load_file(&universe)?;
            print!("{}", report(&u.grid));
            Ok(())
        }
        Cmd::Translate { universe, map, out } => {
            let u = load_file(&universe)?;
            let tm = read_map_file(&map)?;
            let target_vocab = derive_target_vocab(&u.vocab, &tm)?;
            let translated = u.translate(&tm, &target_vocab)?;
            let flagged = translated
                .grid
                .cells()
                .filter(|c| c.tags.contains(stategrid::universe::TAG_UNTRANSLATED))
                .count();
            emit(&translated, &out)?;
            eprintln!(
                "translated {} cells, {} left undefinable",
                translated.grid.len() - flagged,
                flagged
            );
            Ok(())
        }
        Cmd::Merge { base, a, b, out } => {
            let base = load_file(&base)?;
            let left = load_file(&a)?;
            let right = load_file(&b)?;
            let outcome = Universe::integrate(&base, &left, &right)?;
            emit(&outcome.merged, &out)?;
            if outcome.conflicts.is_empty() {
                Ok(())
            } else {
                for c in &outcome.conflicts {
                    eprintln!("conflict at cell {}", c.cell);
                }
                Err(Failure::Domain(format!(
                    "{} conflicting cells left undefinable",
                    outcome.conflicts.len()
                )))
            }
        }
        Cmd::Tick {
            universe,
            mask,
            out,
        } => {
            let u = load_file(&universe)?;
            let mask: BTreeSet<String> = mask.into_iter().filter(|s| !s.is_empty()).collect();
            let next = u.advance_time(&mask)?;
            emit(&next, &out)
        }
        Cmd::Predict {
            universe,
            cell,
            claim,
            at,
            out,
        } => {
            let u = load_file(&universe)?;
            let claim = match claim {
                ClaimArg::True => TriValue::True,
                ClaimArg::False => TriValue::False,
            };
            let next = u.record_prediction(&CellId::new(&cell), claim, at)?;
            emit(&next, &out)
        }
        Cmd::Verify { universe, out } => {
            let u = load_file(&universe)?;
            let next = u.verify_predictions()?;
            for p in &next.predictions {
                eprintln!("{} claim={} at={} {}", p.cell, p.claim, p.at, p.status);
            }
            emit(&next, &out)
        }
        Cmd::Classify {
            universe,
            map,
            names,
        } => {
            let u = load_file(&universe)?;
            let descriptor = match map {
                Some(path) => OpDescriptor::for_translation(&read_map_file(&path)?),
                None => {
                    if names.is_empty() {
                        return Err(Failure::Input(
                            "classify needs --map FILE or --names a,b,…".to_string(),
                        ));
                    }
                    OpDescriptor::new("described operation", names.into_iter().collect())
                }
            };
            println!("{}", classify_operation(&u, &descriptor));
            Ok(())
        }
        Cmd::CheckCodomain { universe } => {
            let u = load_file(&universe)?;
            let report = u.codomain_check();
            if report.verifiable {
                println!("verifiable");
                Ok(())
            } else {
                println!("not verifiable");
                for (cell, missing) in &report.offending {
                    let names: Vec<&str> = missing.iter().map(|s| s.as_str()).collect();
                    println!("  {} missing {}", cell, names.join(", "));
                }
                Err(Failure::Domain(format!(
                    "{} cells cannot be evaluated at the current time",
                    report.offending.len()
                )))
            }
        }
        Cmd::Demo { which } => {
            match which {
                DemoKind::Cont => print!("{}", demo_continuity()),
                DemoKind::Intelligence => print!("{}", demo_intelligence()),
            }
            Ok(())
        }
    }
}
