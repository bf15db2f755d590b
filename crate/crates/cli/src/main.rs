//! `iwahori`: generate, verify and explore orbit hypergraphs of p-adic
//! symmetric spaces.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on
//! invalid or malformed input.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use iwahori::coxeter::parse_word;
use iwahori::hecke_module::{m_act_gen, m_generation_check, m_specialize, m_verify_relations, render_specialized, ModuleError, ModuleVector};
use iwahori::orbit_graph::{og_validate, OrbitGraph};
use iwahori::rank1_oracle::{fo_gamma_crosscheck, fo_verify_table, PrimeField};
use iwahori::spaces::{resolve_vertex, sl2t_length_audit, sp_build, QMode, SpaceKind, SpacesError, SymSpaceDescriptor};
use iwahori::Rational;
use serde_json::json;

#[derive(Parser)]
#[command(name = "iwahori", version, about = "Iwahori-Hecke modules of p-adic symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    #[value(name = "sl2-t")]
    Sl2T,
    Slsp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Build an orbit hypergraph and write it as JSON (or DOT).
    Generate {
        #[arg(long, value_enum)]
        space: Space,
        /// Half the matrix size for slsp (SL_2n / Sp_2n).
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        max_length: usize,
        /// 3mod4 or 1mod4 (sl2-t only).
        #[arg(long, default_value = "3mod4")]
        q_mode: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Validate a graph and check the Hecke relations up to a depth in l_σ.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        depth: u32,
    },
    /// Apply T_{s_1}⋯T_{s_k} to a basis vector. The word "s0 s1" is applied
    /// right to left, so s1 acts first.
    Act {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long)]
        vertex: String,
        /// Specialize t to this rational value.
        #[arg(long)]
        at: Option<String>,
    },
    /// Brute-force the rank-one orbit table over F_q and print CSV.
    Oracle {
        /// Comma-separated odd primes.
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
    },
    /// Compare derived SL2/T lengths with closed forms.
    AuditLengths {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 11)]
        max_length: usize,
    },
    /// Re-export a graph file.
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Check(String),
    Input(String),
}

type Outcome = Result<(), Failure>;

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn load(path: &Path) -> Result<OrbitGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    OrbitGraph::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render(g: &OrbitGraph, format: Format) -> String {
    match format {
        Format::Json => g.to_json(),
        Format::Dot => g.to_dot(),
    }
}

fn generate(space: Space, n: usize, max_length: usize, q_mode: &str, out: Option<&Path>, format: Format) -> Outcome {
    let q_mode: QMode = q_mode.parse().map_err(input)?;
    let kind = match space {
        Space::Sl2T => SpaceKind::Sl2T,
        Space::Slsp => SpaceKind::SlSp,
    };
    let desc = SymSpaceDescriptor { kind, n, max_length, q_mode };
    let g = sp_build(&desc).map_err(|e| match e {
        SpacesError::UnsupportedQMode(_) => Failure::Input("unsupported: the 4|q−1 variant is unspecified; use --q-mode 3mod4".into()),
        other => input(other),
    })?;
    let violations = og_validate(&g);
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{v}");
        }
        return Err(Failure::Input(format!("{} validation violations", violations.len())));
    }
    emit(&render(&g, format), out)?;
    let report = |line: String| if out.is_some() { println!("{line}") } else { eprintln!("{line}") };
    for (l, (verts, edges)) in g.layer_counts() {
        report(format!("l_sigma={l} vertices={verts} edges={edges}"));
    }
    report(format!("total vertices={} edges={}", g.len(), g.edges().len()));
    Ok(())
}

fn verify(path: &Path, depth: u32) -> Outcome {
    let g = load(path)?;
    let mut failed = 0usize;
    for v in og_validate(&g) {
        failed += 1;
        let line = json!({
            "check": "validate",
            "vertex": v.vertex.map(|x| g.vertex(x).label.clone()),
            "generator": v.generator.map(|s| format!("s{s}")),
            "status": "fail",
            "detail": v.to_string(),
        });
        println!("{line}");
    }
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} validation violations")));
    }
    let report = m_verify_relations(&g, depth).map_err(|e| match e {
        ModuleError::InsufficientMargin { .. } => Failure::Input(format!("InsufficientMargin: {e}")),
        other => Failure::Check(other.to_string()),
    })?;
    print!("{}", report.to_json_lines());
    failed += report.failures().count();
    let generation = m_generation_check(&g, depth);
    for ex in &generation.exceptions {
        let line = json!({
            "check": "generation",
            "vertex": g.vertex(ex.vertex).label,
            "generator": null,
            "status": "fail",
            "detail": ex.reason,
        });
        println!("{line}");
    }
    failed += generation.exceptions.len();
    let minimal: Vec<&str> = generation.minimal.iter().map(|&v| g.vertex(v).label.as_str()).collect();
    let summary = json!({
        "check": "generation",
        "vertex": null,
        "generator": null,
        "status": if generation.is_clean() { "pass" } else { "fail" },
        "minimal": minimal,
        "certified": generation.certified,
    });
    println!("{summary}");
    if failed > 0 {
        Err(Failure::Check(format!("{failed} failed checks")))
    } else {
        Ok(())
    }
}

fn act(path: &Path, word: &str, vertex: &str, at: Option<&str>) -> Outcome {
    let g = load(path)?;
    let v = resolve_vertex(&g, vertex).ok_or_else(|| Failure::Input(format!("unknown vertex {vertex:?}")))?;
    let word = parse_word(word).map_err(input)?;
    if let Some(&s) = word.iter().find(|&&s| s >= g.rank()) {
        return Err(Failure::Input(format!("generator s{s} out of range for rank {}", g.rank())));
    }
    let q = at
        .map(|text| text.trim().parse::<Rational>().map_err(|e| Failure::Input(format!("--at {text:?}: {e}"))))
        .transpose()?;
    let mut cur = ModuleVector::basis(v);
    for (applied, &s) in word.iter().rev().enumerate() {
        cur = match m_act_gen(&g, s, &cur) {
            Ok(next) => next,
            Err(ModuleError::BoundaryTouched(b)) => {
                eprintln!(
                    "boundary contact at {} before applying s{s} ({applied} of {} letters applied)",
                    g.vertex(b).label,
                    word.len()
                );
                eprintln!("partial result: {}", cur.render(&g));
                return Err(Failure::Check("boundary contact".into()));
            }
            Err(e) => return Err(input(e)),
        };
    }
    match q {
        None => println!("{}", cur.render(&g)),
        Some(q) => {
            let spec = m_specialize(&cur, &q).map_err(input)?;
            println!("{}", render_specialized(&g, &spec));
        }
    }
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn oracle(qs: &[u64]) -> Outcome {
    for &q in qs {
        PrimeField::new(q).map_err(input)?;
    }
    println!("case,q,expected_sizes,computed_sizes,status");
    let mut failed = 0;
    let status = |ok: bool| if ok { "pass" } else { "fail" };
    for &q in qs {
        for r in fo_verify_table(q).map_err(|e| Failure::Check(e.to_string()))? {
            failed += usize::from(!r.pass());
            println!("{},{q},{},{},{}", r.row, join(&r.expected), join(&r.computed), status(r.pass()));
        }
        for r in fo_gamma_crosscheck(q).map_err(|e| Failure::Check(e.to_string()))? {
            failed += usize::from(!r.pass());
            println!("gamma:{},{q},{},{},{}", r.row, join(&r.gamma_values()), join(&r.computed), status(r.pass()));
        }
    }
    if failed > 0 {
        Err(Failure::Check(format!("{failed} oracle rows failed")))
    } else {
        Ok(())
    }
}

fn audit(graph: Option<&Path>, max_length: usize) -> Outcome {
    let g = match graph {
        Some(p) => load(p)?,
        None => sp_build(&SymSpaceDescriptor::sl2t(max_length)).map_err(input)?,
    };
    let rows = sl2t_length_audit(&g);
    if rows.is_empty() {
        return Err(Failure::Input("graph has no x/y family vertices".into()));
    }
    println!("label,l_w,derived,closed_form,candidate,closed_form_status");
    for r in &rows {
        println!(
            "{},{},{},{},{},{}",
            r.label,
            r.word_length,
            r.derived,
            r.closed_form,
            r.candidate,
            if r.closed_form_agrees() { "agree" } else { "disagree" }
        );
    }
    let closed = rows.iter().filter(|r| !r.closed_form_agrees()).count();
    let candidate = rows.iter().filter(|r| !r.candidate_agrees()).count();
    eprintln!(
        "closed form 2*floor(l/2)+1 disagrees at {closed} of {} vertices; 2*min(l(w), l(ws))+1 disagrees at {candidate}",
        rows.len()
    );
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Generate { space, n, max_length, q_mode, out, format } => {
            generate(space, n, max_length, &q_mode, out.as_deref(), format)
        }
        Command::Verify { graph, depth } => verify(&graph, depth),
        Command::Act { graph, word, vertex, at } => act(&graph, &word, &vertex, at.as_deref()),
        Command::Oracle { q } => oracle(&q),
        Command::AuditLengths { graph, max_length } => audit(graph.as_deref(), max_length),
        Command::Export { graph, format, out } => {
            let g = load(&graph)?;
            emit(&render(&g, format), out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
