use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tensor_ltc::code::{set_enumeration_threshold, Word};
use tensor_ltc::harness::{
    parse_word_json, parse_word_list, query_account, run_compose_check, run_expansion_check,
    run_sweep, CodeSpec, ComposeConfig, CorpusSpec, ExpansionMode, ExperimentConfig, GraphSpec,
    HarnessError, InstanceSpec, Mode,
};
use tensor_ltc::ratio::{parse_rational, to_fraction_string, Rational};
use tensor_ltc::tanner::{set_graph_budget, TannerCode};
use tensor_ltc::tester::{Delta, ReportOptions, ReportRecord, TestInstance, WordSource};

#[derive(Parser)]
#[command(name = "ltc", version, about = "Exact experiments on tensor codes and their testers")]
struct Cli {
    /// Largest number of codewords an oracle may enumerate.
    #[arg(long, global = true)]
    threshold: Option<u64>,
    /// Largest number of adjacency entries a graph may materialize.
    #[arg(long, global = true)]
    graph_budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a code's parameters and its JSON description.
    BuildCode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force minimum distance.
    MinDistance {
        #[arg(long)]
        code: String,
    },
    /// Encode a message (comma-separated symbols).
    Encode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        message: String,
    },
    /// Membership in a linear code (--code) or a Tanner code (--graph, --small).
    Membership {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        word: WordArg,
    },
    /// Robustness of one word.
    Robustness {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        word: WordArg,
        #[command(flatten)]
        eval: EvalArgs,
        /// Seed for --sampled.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Include the per-view robustness list.
        #[arg(long)]
        views: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Robustness over a seeded corpus.
    Sweep {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        views: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the composition identity on OUTER © INNER.
    ComposeCheck {
        /// Outer graph family.
        #[arg(long)]
        graph: String,
        /// Inner graph family.
        #[arg(long)]
        inner: String,
        /// Base code both families are built over.
        #[arg(long)]
        small: String,
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the 1/8 expansion bound.
    ExpansionCheck {
        #[arg(long)]
        graph: String,
        /// Sample pairs instead of enumerating them.
        #[arg(long)]
        sampled: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Query complexity of the amplified H^n_t tester.
    QueryAccount {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        t: usize,
        /// Per-level robustness constant.
        #[arg(long, default_value = "2^-32")]
        alpha: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct Target {
    /// Linear code spec.
    #[arg(long, conflicts_with_all = ["graph", "small"])]
    code: Option<String>,
    #[arg(long, requires = "small")]
    graph: Option<String>,
    #[arg(long, requires = "graph")]
    small: Option<String>,
}

#[derive(Args)]
struct InstanceArgs {
    /// Graph family or JSON graph file.
    #[arg(long)]
    graph: String,
    /// Base code for graph families; the small code for graph files.
    #[arg(long)]
    small: String,
    /// Tested code, for graph files only.
    #[arg(long)]
    code: Option<String>,
}

impl InstanceArgs {
    fn spec(&self) -> Result<InstanceSpec, HarnessError> {
        let mut spec = InstanceSpec::new(GraphSpec::parse(&self.graph)?, CodeSpec::parse(&self.small)?);
        spec.code = self.code.as_deref().map(CodeSpec::parse).transpose()?;
        Ok(spec)
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct WordArg {
    /// Comma-separated symbols.
    #[arg(long)]
    word: Option<String>,
    /// JSON array, or an object with a `symbols` array.
    #[arg(long)]
    word_file: Option<PathBuf>,
}

impl WordArg {
    fn load(&self, field: tensor_ltc::field::Field) -> Result<Word, CliError> {
        match (&self.word, &self.word_file) {
            (Some(w), _) => Ok(parse_word_list(w, field)?),
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("reading {}: {e}", path.display())))?;
                Ok(parse_word_json(&text, field)?)
            }
            (None, None) => Err(CliError::Usage("give --word or --word-file".into())),
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Exact expected robustness (default).
    #[arg(long, conflicts_with = "sampled")]
    exact: bool,
    /// Estimate robustness from --samples seeded views.
    #[arg(long)]
    sampled: bool,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Robustness constant to certify (p/q, integer, or 2^-k).
    #[arg(long)]
    alpha: Option<String>,
    /// Threshold for the soundness error.
    #[arg(long)]
    tau: Option<String>,
}

impl EvalArgs {
    fn mode(&self) -> Mode {
        if self.sampled {
            Mode::Sampled {
                samples: self.samples,
            }
        } else {
            Mode::Exact
        }
    }
}

#[derive(Args)]
struct CorpusArgs {
    /// Comma-separated corpus kinds, e.g. mixed or uniform,planted_slice.
    #[arg(long, default_value = "mixed")]
    corpus: String,
    /// Number of random words.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => fs::write(path, text)
                .map_err(|e| CliError::Usage(format!("writing {}: {e}", path.display()))),
            None => {
                io::stdout()
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Usage(e.to_string()))
            }
        }
    }
}

enum CliError {
    Usage(String),
    Property(String),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::Usage(e.to_string())
    }
}

macro_rules! from_lib_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Usage(e.to_string())
            }
        }
    )*};
}
from_lib_error!(
    tensor_ltc::code::CodeError,
    tensor_ltc::tanner::GraphError,
    tensor_ltc::tester::TesterError,
    tensor_ltc::ratio::ParseRationalError
);

fn rational(arg: Option<&str>) -> Result<Option<Rational>, CliError> {
    Ok(arg.map(parse_rational).transpose()?)
}

/// One flat CSV row per robustness report.
#[derive(Serialize)]
struct CsvRow<'a> {
    instance: &'a str,
    kind: &'a str,
    index: usize,
    weight: Option<usize>,
    axis: Option<usize>,
    slice: Option<usize>,
    rho: &'a str,
    rho_decimal: &'a str,
    delta: Option<&'a str>,
    delta_decimal: Option<&'a str>,
    delta_lower: Option<&'a str>,
    delta_upper: Option<&'a str>,
    ratio: Option<&'a str>,
    ratio_decimal: Option<&'a str>,
    alpha: Option<&'a str>,
    holds: Option<bool>,
    tau: Option<&'a str>,
    epsilon: Option<&'a str>,
    std_error: Option<f64>,
}

fn to_csv(records: &[ReportRecord]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        let bounds = r.delta_bounds.as_ref();
        w.serialize(CsvRow {
            instance: &r.instance,
            kind: &r.word_source.kind,
            index: r.word_source.index,
            weight: r.word_source.weight,
            axis: r.word_source.axis,
            slice: r.word_source.slice,
            rho: &r.rho,
            rho_decimal: &r.rho_decimal,
            delta: r.delta.as_deref(),
            delta_decimal: r.delta_decimal.as_deref(),
            delta_lower: bounds.map(|b| b[0].as_str()),
            delta_upper: bounds.map(|b| b[1].as_str()),
            ratio: r.ratio.as_deref(),
            ratio_decimal: r.ratio_decimal.as_deref(),
            alpha: r.alpha.as_deref(),
            holds: r.holds,
            tau: r.tau.as_deref(),
            epsilon: r.epsilon.as_deref(),
            std_error: r.estimate.map(|e| e.std_error),
        })
        .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threshold {
        if t == 0 {
            return Err(CliError::Usage("--threshold must be positive".into()));
        }
        set_enumeration_threshold(t);
    }
    if let Some(b) = cli.graph_budget {
        if b == 0 {
            return Err(CliError::Usage("--graph-budget must be positive".into()));
        }
        set_graph_budget(b);
    }
    match cli.command {
        Command::BuildCode { code, out } => {
            let c = CodeSpec::parse(&code)?.build()?;
            let json = pretty(&c.to_spec_file());
            match out {
                Some(path) => {
                    fs::write(&path, &json)
                        .map_err(|e| CliError::Usage(format!("writing {}: {e}", path.display())))?;
                    println!("[{}, {}] over GF({})", c.n(), c.k(), c.field().modulus());
                }
                None => print!("{json}"),
            }
        }
        Command::MinDistance { code } => {
            let c = CodeSpec::parse(&code)?.build()?;
            println!("{}", c.min_distance()?);
        }
        Command::Encode { code, message } => {
            let c = CodeSpec::parse(&code)?.build()?;
            let msg = parse_word_list(&message, c.field())?;
            let w = c.encode(msg.symbols())?;
            println!("{}", join(w.symbols()));
        }
        Command::Membership { target, word } => {
            let member = match (&target.code, &target.graph, &target.small) {
                (Some(code), _, _) => {
                    let c = CodeSpec::parse(code)?.build()?;
                    c.is_codeword(&word.load(c.field())?)?
                }
                (None, Some(graph), Some(small)) => {
                    let g = GraphSpec::parse(graph)?.build_graph()?;
                    let small = CodeSpec::parse(small)?.build()?;
                    let w = word.load(small.field())?;
                    TannerCode::new(g.into(), small)?.contains(&w)?
                }
                _ => return Err(CliError::Usage("give --code, or --graph with --small".into())),
            };
            println!("{member}");
        }
        Command::Robustness {
            instance,
            word,
            eval,
            seed,
            views,
            output,
        } => {
            let inst: TestInstance = instance.spec()?.build()?;
            let w = word.load(inst.small().field())?;
            let options = ReportOptions {
                alpha: rational(eval.alpha.as_deref())?.or_else(|| inst.guaranteed_alpha()),
                tau: rational(eval.tau.as_deref())?,
                include_views: views,
            };
            let source = WordSource::named("input", 0);
            let report = match eval.mode() {
                Mode::Exact => inst.report(&w, source, &options)?,
                Mode::Sampled { samples } => inst.report_sampled(&w, source, &options, seed, samples)?,
            };
            let record = report.record();
            let text = match output.format.unwrap_or(Format::Text) {
                Format::Json => pretty(&record),
                Format::Csv => to_csv(std::slice::from_ref(&record))?,
                Format::Text => {
                    let mut s = format!("rho={}", record.rho);
                    match &report.delta {
                        Delta::Exact(d) => s += &format!(" delta={}", to_fraction_string(d)),
                        Delta::Bounds { lower, upper } => {
                            s += &format!(" delta in [{}, {}]", to_fraction_string(lower), to_fraction_string(upper))
                        }
                    }
                    if let Some(e) = &record.estimate {
                        s += &format!(" (estimate, {} samples, std error {:.3e})", e.samples, e.std_error);
                    }
                    if let Some(eps) = &record.epsilon {
                        s += &format!(" epsilon={eps}");
                    }
                    if let (Some(a), Some(h)) = (&record.alpha, record.holds) {
                        s += &format!(" alpha={a} holds={h}");
                    }
                    s.push('\n');
                    s
                }
            };
            output.emit(&text)?;
            if report.holds == Some(false) {
                return Err(CliError::Property("rho < alpha * delta".into()));
            }
        }
        Command::Sweep {
            instance,
            corpus,
            eval,
            views,
            output,
        } => {
            let mut config = ExperimentConfig::new(
                instance.spec()?,
                CorpusSpec::parse(&corpus.corpus, corpus.count)?,
                corpus.seed,
            );
            config.mode = eval.mode();
            config.alpha = rational(eval.alpha.as_deref())?;
            config.tau = rational(eval.tau.as_deref())?;
            config.include_views = views;
            config.enumeration_threshold = cli.threshold;
            config.graph_budget = cli.graph_budget;
            let start = Instant::now();
            let report = run_sweep(&config)?;
            let text = match output.format.unwrap_or(Format::Json) {
                Format::Csv => to_csv(&report.reports)?,
                _ => {
                    let mut s = report.to_json();
                    s.push('\n');
                    s
                }
            };
            output.emit(&text)?;
            let s = &report.summary;
            eprintln!(
                "{} words, {} violations, {} undecided, min ratio {}, {:.2?}",
                s.words,
                s.violations,
                s.undecided,
                s.min_ratio_decimal.as_deref().unwrap_or("n/a"),
                start.elapsed()
            );
            if let Some(msg) = &s.aborted {
                return Err(CliError::Property(format!("sweep aborted: {msg}")));
            }
            if s.violations > 0 {
                return Err(CliError::Property(format!("{} violations", s.violations)));
            }
        }
        Command::ComposeCheck {
            graph,
            inner,
            small,
            corpus,
            output,
        } => {
            let config = ComposeConfig {
                outer: GraphSpec::parse(&graph)?,
                inner: GraphSpec::parse(&inner)?,
                base: CodeSpec::parse(&small)?,
                corpus: CorpusSpec::parse(&corpus.corpus, corpus.count)?,
                seed: corpus.seed,
            };
            let report = run_compose_check(&config)?;
            let mut text = report.to_json();
            text.push('\n');
            output.emit(&text)?;
            let s = &report.summary;
            eprintln!(
                "{} words, {} mismatches, c1={} c2={} composed={}",
                s.words,
                s.mismatches,
                s.c1.as_deref().unwrap_or("n/a"),
                s.c2.as_deref().unwrap_or("n/a"),
                s.c_composed.as_deref().unwrap_or("n/a")
            );
            if report.failed() {
                return Err(CliError::Property("composition identity failed".into()));
            }
        }
        Command::ExpansionCheck {
            graph,
            sampled,
            samples,
            seed,
            output,
        } => {
            let mode = if sampled {
                ExpansionMode::Sampled { pairs: samples, seed }
            } else {
                ExpansionMode::Exhaustive
            };
            let report = run_expansion_check(&GraphSpec::parse(&graph)?, mode)?;
            let mut text = report.to_json();
            text.push('\n');
            output.emit(&text)?;
            if report.violations > 0 {
                return Err(CliError::Property(format!("{} violations", report.violations)));
            }
        }
        Command::QueryAccount { n, t, alpha, output } => {
            let alpha0 = parse_rational(&alpha)?;
            let account = query_account(n, t, &alpha0)?;
            output.emit(&pretty(&account))?;
            if account.degree_matches == Some(false) {
                return Err(CliError::Property("H^n_t degree differs from n^2".into()));
            }
        }
    }
    Ok(())
}

fn join(symbols: &[u32]) -> String {
    symbols
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Property(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
