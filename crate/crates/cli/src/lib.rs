//! Command-line front end: `detect`, `eval` and `match`.
//!
//! Exit codes: 0 on success, 1 for input or data errors, 2 for pattern
//! syntax errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use udneg_core::conllu::parse_conllu;
use udneg_core::detector::{read_results, write_results};
use udneg_core::eval::{eval_negation, eval_positive, read_gold, report};
use udneg_core::lexicon::load_lexicon;
use udneg_core::pattern::{load_rules, PatternError, RuleFileError};
use udneg_core::{compile, default_lexicon, default_rules, parse_pattern, Document, Engine, Matcher};

#[derive(Debug, Parser)]
#[command(
    name = "udneg",
    version,
    about = "Negation and uncertainty detection over CoNLL-U dependency graphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recognize findings and assign each a status; writes one JSON line per document.
    Detect(DetectArgs),
    /// Score detection results against gold annotations.
    Eval(EvalArgs),
    /// Show every binding of a pattern in a CoNLL-U file.
    Match(MatchArgs),
}

#[derive(Debug, clap::Args)]
pub struct DetectArgs {
    /// Rule file (defaults to the bundled rules).
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Lexicon file (defaults to the bundled lexicon).
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// CoNLL-U input files or glob patterns; repeatable.
    #[arg(long = "in", value_name = "PATH", num_args = 1..)]
    pub inputs: Vec<String>,
    /// Output file (standard output if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Positive,
    Negation,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// Results written by `detect`.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_enum, default_value = "positive")]
    pub mode: Mode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct MatchArgs {
    #[arg(long)]
    pub pattern: String,
    #[arg(long = "in", value_name = "PATH", num_args = 1..)]
    pub inputs: Vec<String>,
    /// Restrict anchors to vertices with this lemma, or to this 1-based index.
    #[arg(long)]
    pub anchor: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Error carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = if error.chain().any(|e| e.is::<PatternError>()) {
            2
        } else {
            1
        };
        Failure { code, error }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("udneg: {:#}", f.error);
            f.code
        }
    }
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Detect(a) => cmd_detect(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Match(a) => cmd_match(&a),
    }
}

fn expand_inputs(patterns: &[String]) -> anyhow::Result<Vec<PathBuf>> {
    if patterns.is_empty() {
        bail!("no input files given (use --in PATH)");
    }
    let mut paths = Vec::new();
    for p in patterns {
        if p.contains(['*', '?', '[']) {
            let mut hits: Vec<PathBuf> = glob::glob(p)
                .with_context(|| format!("bad glob {p:?}"))?
                .collect::<Result<_, _>>()?;
            if hits.is_empty() {
                bail!("{p:?} matches no files");
            }
            hits.sort();
            paths.extend(hits);
        } else {
            paths.push(PathBuf::from(p));
        }
    }
    Ok(paths)
}

fn read_corpus(paths: &[PathBuf]) -> anyhow::Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in paths {
        let file = fs::File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("doc");
        let parsed = parse_conllu(BufReader::new(file), stem).with_context(|| format!("{}", path.display()))?;
        for d in parsed {
            if let Some(prev) = seen.insert(d.doc_id.clone(), path.clone()) {
                bail!(
                    "document {:?} appears in both {} and {}",
                    d.doc_id,
                    prev.display(),
                    path.display()
                );
            }
            docs.push(d);
        }
    }
    Ok(docs)
}

fn load_engine(rules: Option<&Path>, lexicon: Option<&Path>) -> anyhow::Result<Engine> {
    let rules = match rules {
        None => default_rules(),
        Some(p) => {
            let f = fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            load_rules(BufReader::new(f)).map_err(|e| match e {
                RuleFileError::Pattern { line, rule_id, source } => {
                    anyhow::Error::new(source).context(format!("{}: line {line}: rule {rule_id:?}", p.display()))
                }
                other => anyhow::Error::new(other).context(p.display().to_string()),
            })?
        }
    };
    let lexicon = match lexicon {
        None => default_lexicon(),
        Some(p) => {
            let f = fs::File::open(p).with_context(|| format!("cannot open {}", p.display()))?;
            load_lexicon(BufReader::new(f)).with_context(|| p.display().to_string())?
        }
    };
    Ok(Engine::new(lexicon, rules))
}

/// Writes `text` to `out`, or to standard output. A failed file write leaves no file behind.
fn emit(out: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match out {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
        Some(p) => {
            if let Err(e) = fs::write(p, text) {
                let _ = fs::remove_file(p);
                return Err(anyhow!(e).context(format!("cannot write {}", p.display())));
            }
        }
    }
    Ok(())
}

pub fn cmd_detect(args: &DetectArgs) -> Result<(), Failure> {
    // A stale file from an earlier run must not survive a failed one.
    if let Some(out) = &args.out {
        if out.exists() {
            fs::remove_file(out).with_context(|| format!("cannot replace {}", out.display()))?;
        }
    }
    let paths = expand_inputs(&args.inputs)?;
    let engine = load_engine(args.rules.as_deref(), args.lexicon.as_deref())?;
    let docs = read_corpus(&paths)?;
    let results = detect_with_jobs(&engine, &docs, args.jobs)?;
    emit(args.out.as_deref(), &write_results(&results))?;
    Ok(())
}

#[cfg(feature = "parallel")]
fn detect_with_jobs(
    engine: &Engine,
    docs: &[Document],
    jobs: Option<usize>,
) -> anyhow::Result<Vec<udneg_core::DocumentResult>> {
    match jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(1) => Ok(engine.detect_corpus_sequential(docs)),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            Ok(pool.install(|| engine.detect_corpus_parallel(docs)))
        }
        None => Ok(engine.detect_corpus(docs)),
    }
}

#[cfg(not(feature = "parallel"))]
fn detect_with_jobs(
    engine: &Engine,
    docs: &[Document],
    jobs: Option<usize>,
) -> anyhow::Result<Vec<udneg_core::DocumentResult>> {
    if jobs == Some(0) {
        bail!("--jobs must be at least 1");
    }
    Ok(engine.detect_corpus_sequential(docs))
}

pub fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    let open = |p: &Path| fs::File::open(p).with_context(|| format!("cannot open {}", p.display()));
    let results = read_results(BufReader::new(open(&args.input)?)).with_context(|| args.input.display().to_string())?;
    let gold = read_gold(BufReader::new(open(&args.gold)?)).with_context(|| args.gold.display().to_string())?;
    let (title, eval) = match args.mode {
        Mode::Positive => ("Positive findings", eval_positive(&results, &gold)),
        Mode::Negation => ("Negated mentions", eval_negation(&results, &gold)),
    };
    let eval = eval.map_err(anyhow::Error::new)?;
    emit(args.out.as_deref(), &report(title, &eval))?;
    Ok(())
}

pub fn cmd_match(args: &MatchArgs) -> Result<(), Failure> {
    let ast = parse_pattern(&args.pattern)
        .map_err(|e| anyhow::Error::new(e).context(format!("pattern {:?}", args.pattern)))?;
    let q = compile(&ast);
    let paths = expand_inputs(&args.inputs)?;
    let docs = read_corpus(&paths)?;
    let anchor_index = args.anchor.as_deref().and_then(|a| a.parse::<usize>().ok());
    let matcher = Matcher::default();

    let mut out = String::new();
    let mut total = 0usize;
    for d in &docs {
        for g in &d.sentences {
            for v in g.vertices() {
                let wanted = match (&args.anchor, anchor_index) {
                    (None, _) => true,
                    (Some(_), Some(i)) => v.index == i,
                    (Some(lemma), None) => v.lemma == lemma.to_lowercase(),
                };
                if !wanted {
                    continue;
                }
                let bindings = matcher.all(g, &q, v.index).map_err(anyhow::Error::new)?;
                if bindings.is_empty() {
                    continue;
                }
                writeln!(out, "{} {} anchor {} ({})", d.doc_id, g.sentence_id(), v.index, v.word).unwrap();
                for b in &bindings {
                    let map: Vec<String> = b
                        .assignment
                        .iter()
                        .enumerate()
                        .map(|(node, &vx)| format!("{node}->{vx}"))
                        .collect();
                    let scope: Vec<String> = b.scope.iter().map(|i| i.to_string()).collect();
                    writeln!(out, "  {}  scope {{{}}}", map.join(" "), scope.join(",")).unwrap();
                    total += 1;
                }
            }
        }
    }
    writeln!(out, "{total} binding(s)").unwrap();
    emit(args.out.as_deref(), &out)?;
    Ok(())
}
