//! `morphtag`: run projects over documents, compare tags files, inspect
//! morphological analyses and serve the HTTP API.

use clap::{Parser, Subcommand};
use morphtag::analysis::{diff_tags, DiffReport, MatchPredicate, Tag};
use morphtag::io::{canonical_json, read_project, read_tags, read_text, write_graph, write_tags, TagsFile};
use morphtag::morphology::{load_solutions_file, solutions_to_string, SolutionTable};
use morphtag::number::Number;
use morphtag::pipeline::{Engine, EngineError, Stage};
use morphtag::regex::DEFAULT_MAX_STEPS;
use morphtag_server::AppState;
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Debug, Parser)]
#[command(name = "morphtag", version, about = "Morphology-driven entity and relation extraction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a project over a document and write its tags and graph files.
    Run {
        #[arg(long)]
        project: PathBuf,
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Precomputed solutions to use instead of the project lexicon.
        #[arg(long)]
        solutions: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
    },
    /// Compare a candidate tags file against a reference tags file.
    Diff {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        /// intersection, exact, a-includes-b or b-includes-a.
        #[arg(long, default_value = "exact")]
        predicate: MatchPredicate,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Print the morphological solutions of a document.
    Analyze {
        #[arg(long)]
        project: PathBuf,
        #[arg(long)]
        doc: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        #[arg(long)]
        project: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
    },
}

fn load_err(e: impl std::fmt::Display) -> EngineError {
    EngineError::new(Stage::Load, e)
}

fn doc_name(doc: &Path) -> String {
    doc.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn run(project: &Path, doc: &Path, out: &Path, solutions: Option<&Path>, max_steps: u64) -> Result<(), EngineError> {
    let mut engine = Engine::load(project)?.with_max_steps(max_steps);
    let text = read_text(doc).map_err(load_err)?;
    if let Some(path) = solutions {
        let words = load_solutions_file(path).map_err(load_err)?;
        engine = engine.with_analyzer(Arc::new(SolutionTable::new(&words)));
    }
    let output = engine.run(&text)?;
    let write = |e: morphtag::io::IoError| EngineError::new(Stage::Write, e);
    std::fs::create_dir_all(out).map_err(|e| EngineError::new(Stage::Write, format!("{}: {e}", out.display())))?;
    let stem = doc.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "doc".into());
    let graph_name = format!("{stem}.graph.json");
    let name = Some(doc_name(doc));
    write_graph(&output.graph_file(name.clone()), &out.join(&graph_name)).map_err(write)?;
    write_tags(&output.tags_file(name, Some(graph_name)), &out.join(format!("{stem}.tags.json"))).map_err(write)?;
    println!(
        "{} words, {} matches, {} annotations, {} nodes, {} edges",
        output.document.len(),
        output.matches.len(),
        output.env.emitted.len(),
        output.graph.nodes.len(),
        output.graph.edges.len()
    );
    for line in &output.env.output {
        println!("{line}");
    }
    Ok(())
}

/// Word tags and expression matches of a tags file.
fn comparable_tags(file: &TagsFile) -> Vec<Tag> {
    let matches = file
        .matches
        .iter()
        .filter(|m| m.length > 0)
        .map(|m| Tag::new(m.index, m.length, m.rule.clone()));
    file.tags.iter().cloned().chain(matches).collect()
}

fn decimal(n: Number) -> String {
    format!("{:.4}", *n.numer() as f64 / *n.denom() as f64)
}

fn row(label: &str, r: &DiffReport) -> String {
    format!(
        "{:<16} {:>6} {:>6} {:>7} {:>10} {:>10} {:>10}",
        label,
        r.common.len() + r.only_a.len(),
        r.common.len() + r.only_b.len(),
        r.common.len(),
        decimal(r.precision),
        decimal(r.recall),
        decimal(r.f_measure)
    )
}

fn diff(reference: &Path, candidate: &Path, predicate: MatchPredicate, json: bool) -> Result<(), EngineError> {
    let a = read_tags(reference).map_err(load_err)?;
    let b = read_tags(candidate).map_err(load_err)?;
    if a.document.sha256 != b.document.sha256 {
        return Err(load_err("the tags files refer to different documents"));
    }
    let (ta, tb) = (comparable_tags(&a), comparable_tags(&b));
    let total = diff_tags(&ta, &tb, predicate);
    if json {
        print!("{}", canonical_json(&total));
        return Ok(());
    }
    println!("predicate: {predicate}");
    println!(
        "{:<16} {:>6} {:>6} {:>7} {:>10} {:>10} {:>10}",
        "label", "ref", "cand", "common", "precision", "recall", "f-measure"
    );
    let labels: BTreeSet<&str> = ta.iter().chain(&tb).map(|t| t.label.as_str()).collect();
    for label in labels {
        let pick = |ts: &[Tag]| ts.iter().filter(|t| t.label == label).cloned().collect::<Vec<_>>();
        println!("{}", row(label, &diff_tags(&pick(&ta), &pick(&tb), predicate)));
    }
    println!("{}", row("all", &total));
    Ok(())
}

fn analyze(project: &Path, doc: &Path, out: Option<&Path>) -> Result<(), EngineError> {
    let engine = Engine::load(project)?;
    let text = read_text(doc).map_err(load_err)?;
    let json = solutions_to_string(&engine.analyze(&text));
    match out {
        Some(path) => std::fs::write(path, json).map_err(|e| EngineError::new(Stage::Write, e)),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn serve(project: Option<&Path>, port: u16, max_steps: u64) -> Result<(), EngineError> {
    let base = project
        .and_then(Path::parent)
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let state = AppState::new(base).with_max_steps(max_steps);
    if let Some(p) = project {
        state.set_project(read_project(p).map_err(load_err)?)?;
    }
    let rt = tokio::runtime::Runtime::new().map_err(load_err)?;
    let addr = std::net::SocketAddr::from(([127, 0, 0, 1], port));
    eprintln!("listening on http://{addr}");
    rt.block_on(morphtag_server::serve(addr, state)).map_err(load_err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            project,
            doc,
            out,
            solutions,
            max_steps,
        } => run(project, doc, out, solutions.as_deref(), *max_steps),
        Command::Diff {
            reference,
            candidate,
            predicate,
            json,
        } => diff(reference, candidate, *predicate, *json),
        Command::Analyze { project, doc, out } => analyze(project, doc, out.as_deref()),
        Command::Serve {
            project,
            port,
            max_steps,
        } => serve(project.as_deref(), *port, *max_steps),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {}", e.stage, e.message);
            ExitCode::from(if e.stage == Stage::Load { 2 } else { 1 })
        }
    }
}
