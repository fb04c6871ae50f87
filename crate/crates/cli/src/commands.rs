//! Subcommands. Each one loads its input, makes the matching core call and
//! prints the result as JSON (quiver files in canonical form).

use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use wquiv_core::analysis::{
    c_vectors, check_nondegenerate, frame, is_sign_coherent, sample_nondegenerate, sign_coherence_experiment,
};
use wquiv_core::corpus::{generate_corpus, sign_coherence_catalog, write_corpus, CorpusSpec, WeightPolicy};
use wquiv_core::equivalence::{are_equivalent_bounded, DEFAULT_EXPONENT_BOUND};
use wquiv_core::io::{document_to_json, load_document, load_quiver, QuiverFile, SCHEMA_VERSION};
use wquiv_core::mutation::{mutate_along, MutationOptions};
use wquiv_core::potential::{qp_mutate, split};
use wquiv_core::session::{Session, SessionConfig};
use wquiv_core::tame::{canonicalize_to_cycle, classify_tame};
use wquiv_core::{GroupKind, VertexId, WeightedQuiver};

pub type CliResult = Result<bool, Box<dyn Error>>;

#[derive(Debug, Parser)]
#[command(name = "wquiv", version, about = "Mutation of group-weighted quivers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mutate at each vertex of `--at` in turn and print the result.
    Mutate {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<VertexId>,
        /// Allow mutation while 2-cycles survive away from the mutation vertex.
        #[arg(long)]
        lenient: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Search mutation sequences up to `--depth` for a surviving 2-cycle.
    CheckNondeg {
        file: PathBuf,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Also run seeded random walks longer than `--depth`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1000)]
        walks: usize,
        /// Length of each random walk; defaults to twice the depth.
        #[arg(long)]
        walk_len: Option<usize>,
    },
    /// Add a frozen source with one arrow into every vertex.
    Frame {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// c-vectors of a framed quiver, after optional mutations. Unframed input is framed first.
    CVectors {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        at: Vec<VertexId>,
    },
    /// Frame every catalog quiver and check c-vector sign coherence up to `--max-len` mutations.
    SignCoherenceExperiment {
        /// Directory of quiver files; the built-in catalog when absent.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Vertex bound of the built-in catalog.
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide whether two weight systems on the same quiver are gauge equivalent.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        /// Exponent bound of the free-group conjugator search.
        #[arg(long, default_value_t = DEFAULT_EXPONENT_BOUND)]
        bound: i64,
    },
    /// Gauge-trivial, member of C_n(t), or unknown.
    ClassifyTame { file: PathBuf },
    /// Mutate a member of C_n(t) to an unoriented n-cycle.
    Canonicalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split a quiver with potential into trivial and reduced parts.
    QpSplit {
        file: PathBuf,
        /// Truncation degree; defaults to twice the potential degree plus 2.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Mutate a quiver with potential and print the reduced result.
    QpMutate {
        file: PathBuf,
        #[arg(long)]
        at: VertexId,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a seeded corpus of quiver files.
    GenCorpus {
        #[arg(long)]
        policy: WeightPolicy,
        /// `trivial`, `cyclic:M`, `free-abelian:R` or `free:R`.
        #[arg(long)]
        group: GroupKind,
        #[arg(long)]
        count: usize,
        /// Vertex count `N` or range `A-B`.
        #[arg(long)]
        n: VertexRange,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        max_parallel: usize,
        /// Largest number of random mutations for the `cn` policy; defaults to twice the vertex bound.
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve an interactive mutation session over HTTP.
    Serve {
        file: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        lenient: bool,
        #[arg(long, default_value_t = 4)]
        analysis_depth: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexRange(pub usize, pub usize);

impl FromStr for VertexRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        match s.split_once('-') {
            Some((a, b)) => Ok(VertexRange(num(a)?, num(b)?)),
            None => {
                let n = num(s)?;
                Ok(VertexRange(n, n))
            }
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Box<dyn Error>> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display()).into()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

fn quiver_json(q: &WeightedQuiver) -> Value {
    serde_json::to_value(QuiverFile::from_document(q, None)).expect("quiver files serialize")
}

/// Quiver files in `dir`, sorted by file name, named by file stem.
fn load_catalog(dir: &Path) -> Result<Vec<(String, WeightedQuiver)>, Box<dyn Error>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let q = load_quiver(&p).map_err(|e| format!("{}: {e}", p.display()))?;
            Ok((name, q))
        })
        .collect()
}

pub fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Mutate {
            file,
            at,
            lenient,
            output,
        } => {
            let q = load_quiver(&file)?;
            let out = mutate_along(&q, &at, MutationOptions { lenient })?;
            emit(&document_to_json(&out, None), output.as_deref())?;
            Ok(true)
        }
        Command::CheckNondeg {
            file,
            depth,
            seed,
            walks,
            walk_len,
        } => {
            let q = load_quiver(&file)?;
            let verdict = check_nondegenerate(&q, depth);
            let mut clean = verdict.is_clean();
            let mut value = json!({ "schema_version": SCHEMA_VERSION, "exhaustive": verdict });
            if let Some(seed) = seed {
                let len = walk_len.unwrap_or(2 * depth);
                let found = sample_nondegenerate(&q, walks, len, seed);
                clean &= found.is_none();
                value["random_walks"] = json!({
                    "seed": seed,
                    "walks": walks,
                    "length": len,
                    "counterexample": found.map(|(sequence, c)| json!({ "sequence": sequence, "two_cycle": [c.0, c.1] })),
                });
            }
            value["clean"] = json!(clean);
            emit(&report(&value), None)?;
            Ok(clean)
        }
        Command::Frame { file, output } => {
            let q = load_quiver(&file)?;
            emit(&document_to_json(&frame(&q)?, None), output.as_deref())?;
            Ok(true)
        }
        Command::CVectors { file, at } => {
            let q = load_quiver(&file)?;
            let start = if q.frozen_vertices().next().is_some() {
                q
            } else {
                frame(&q)?
            };
            let cur = mutate_along(&start, &at, MutationOptions::STRICT)?;
            let m = c_vectors(&cur)?;
            let coherence = is_sign_coherent(&m);
            let value = json!({
                "schema_version": SCHEMA_VERSION,
                "sequence": at,
                "c_vectors": m,
                "sign_coherence": coherence,
            });
            emit(&report(&value), None)?;
            Ok(true)
        }
        Command::SignCoherenceExperiment {
            catalog,
            max_len,
            max_vertices,
            output,
        } => {
            let cases = match catalog {
                Some(dir) => load_catalog(&dir)?,
                None => sign_coherence_catalog(max_vertices, 2),
            };
            let r = sign_coherence_experiment(&cases, max_len)?;
            emit(&report(&serde_json::to_value(&r)?), output.as_deref())?;
            Ok(r.passed)
        }
        Command::Equiv { left, right, bound } => {
            let a = load_quiver(&left)?;
            let b = load_quiver(&right)?;
            let verdict = are_equivalent_bounded(&a, &b, bound)?;
            let value = json!({ "schema_version": SCHEMA_VERSION, "verdict": verdict });
            emit(&report(&value), None)?;
            Ok(true)
        }
        Command::ClassifyTame { file } => {
            let q = load_quiver(&file)?;
            let value = json!({ "schema_version": SCHEMA_VERSION, "classification": classify_tame(&q) });
            emit(&report(&value), None)?;
            Ok(true)
        }
        Command::Canonicalize { file, output } => {
            let q = load_quiver(&file)?;
            let c = canonicalize_to_cycle(&q)?;
            let value = json!({
                "schema_version": SCHEMA_VERSION,
                "sequence": c.sequence,
                "steps": c.steps,
                "initial_cycle_length": c.initial_cycle_length,
                "cycle": c.cycle,
                "t": c.t,
                "result": quiver_json(&c.result),
            });
            emit(&report(&value), output.as_deref())?;
            Ok(true)
        }
        Command::QpSplit { file, degree } => {
            let doc = load_document(&file)?;
            let s = doc.potential.ok_or("the file has no potential")?;
            let degree = degree.unwrap_or_else(|| s.default_truncation());
            let r = split(&doc.quiver, &s, degree)?;
            let value = json!({
                "schema_version": SCHEMA_VERSION,
                "degree": r.degree,
                "pairs": r.pairs,
                "trivial": QuiverFile::from_document(&r.trivial_quiver, Some(&r.trivial_potential)),
                "reduced": QuiverFile::from_document(&r.reduced_quiver, Some(&r.reduced_potential)),
            });
            emit(&report(&value), None)?;
            Ok(true)
        }
        Command::QpMutate {
            file,
            at,
            degree,
            output,
        } => {
            let doc = load_document(&file)?;
            let s = doc.potential.ok_or("the file has no potential")?;
            let degree = degree.unwrap_or_else(|| s.default_truncation().max(8));
            let m = qp_mutate(&doc.quiver, &s, at, degree)?;
            if m.matches_weighted_mutation == Some(false) {
                eprintln!("warning: the reduced quiver does not weight-reduce to the weighted mutation");
            }
            emit(&document_to_json(m.quiver(), Some(m.potential())), output.as_deref())?;
            Ok(m.matches_weighted_mutation != Some(false))
        }
        Command::GenCorpus {
            policy,
            group,
            count,
            n,
            seed,
            max_parallel,
            max_steps,
            out,
        } => {
            let spec = CorpusSpec {
                count,
                min_vertices: n.0,
                max_vertices: n.1,
                group,
                policy,
                seed,
                max_parallel,
                max_steps: max_steps.unwrap_or(2 * n.1),
            };
            let entries = generate_corpus(&spec)?;
            let paths = write_corpus(&entries, &out)?;
            for p in paths {
                println!("{}", p.display());
            }
            Ok(true)
        }
        Command::Serve {
            file,
            port,
            lenient,
            analysis_depth,
        } => {
            let q = load_quiver(&file)?;
            let session = Session::new(
                q,
                SessionConfig {
                    lenient,
                    analysis_depth,
                },
            )?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(crate::server::serve(session, port))
                .map_err(|e| format!("cannot serve on port {port}: {e}"))?;
            Ok(true)
        }
    }
}
