use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use alae::analysis::{entry_bound, format_bound, ungapped_bound_params};
use alae::scoring::threshold_from_evalue;
use alae::search::{format_tsv, ratios};
use alae::sequence::{concatenate, parse_fasta};
use alae::{
    search, Alphabet, AlphabetKind, FmIndex, Mode, Query, ScoringScheme, SearchOptions, Toggles,
};

#[derive(Parser)]
#[command(name = "alae", version, about = "Exact local alignment search over an FM-index")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a FASTA database.
    BuildIndex {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "dna")]
        alphabet: AlphabetKind,
        #[arg(long)]
        output: PathBuf,
        /// Encode unknown symbols as never-matching instead of failing.
        #[arg(long)]
        lenient: bool,
    },
    /// Report every end pair scoring at least the threshold, as TSV.
    Search(SearchArgs),
    /// Run the baseline and the filtered engine and compare their work.
    Compare(SearchArgs),
    /// Print the expected entry-count bound for a scheme.
    Analyze {
        #[arg(long, default_value = "1,-3,-5,-2", allow_hyphen_values = true)]
        score: ScoringScheme,
        #[arg(long)]
        sigma: usize,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    index: PathBuf,
    #[arg(long)]
    query: PathBuf,
    #[arg(long, default_value = "1,-3,-5,-2", allow_hyphen_values = true)]
    score: ScoringScheme,
    #[arg(long, conflicts_with_all = ["evalue", "karlin_k", "karlin_lambda"])]
    threshold: Option<i32>,
    #[arg(long, requires_all = ["karlin_k", "karlin_lambda"])]
    evalue: Option<f64>,
    #[arg(long, requires = "evalue")]
    karlin_k: Option<f64>,
    #[arg(long, requires = "evalue")]
    karlin_lambda: Option<f64>,
    #[arg(long, default_value = "alae")]
    mode: Mode,
    #[arg(long)]
    no_length_filter: bool,
    #[arg(long)]
    no_score_filter: bool,
    #[arg(long)]
    no_prefix_filter: bool,
    #[arg(long)]
    no_domination: bool,
    /// Bitwise global filter instead of domination (small inputs only).
    #[arg(long)]
    gmatrix: bool,
    #[arg(long)]
    no_reuse: bool,
    #[arg(long)]
    no_path_sharing: bool,
    /// Encode unknown query symbols as never-matching.
    #[arg(long)]
    lenient: bool,
    /// Print work counters to standard error.
    #[arg(long)]
    stats: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

enum Failure {
    Data(String),
    Usage(String),
    Alarm(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Data(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Alarm(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Data(m) | Failure::Usage(m) | Failure::Alarm(m) => m,
        }
    }
}

fn data<E: std::fmt::Display>(ctx: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Data(format!("{}: {e}", ctx.display()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ALAE_LOG", "error")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::BuildIndex {
            input,
            alphabet,
            output,
            lenient,
        } => build_index(&input, alphabet, &output, lenient),
        Command::Search(args) => run_search(&args),
        Command::Compare(args) => run_compare(&args),
        Command::Analyze { score, sigma } => analyze(&score, sigma),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn build_index(input: &Path, kind: AlphabetKind, output: &Path, lenient: bool) -> Result<(), Failure> {
    let t0 = Instant::now();
    let bytes = fs::read(input).map_err(data(input))?;
    let records = parse_fasta(&bytes, Alphabet::new(kind), lenient).map_err(data(input))?;
    let count = records.len();
    let text = concatenate(records).map_err(data(input))?;
    let index = FmIndex::build(&text, kind).map_err(data(input))?;
    fs::write(output, index.serialize()).map_err(data(output))?;
    println!("n\t{}", index.len());
    println!("records\t{count}");
    eprintln!("build time {:.3}s", t0.elapsed().as_secs_f64());
    Ok(())
}

struct Loaded {
    index: FmIndex,
    queries: Vec<Query>,
}

fn load(args: &SearchArgs) -> Result<Loaded, Failure> {
    if args.threshold.is_none() && args.evalue.is_none() {
        return Err(Failure::Usage(
            "one of --threshold or --evalue with --karlin-k and --karlin-lambda is required".into(),
        ));
    }
    let bytes = fs::read(&args.index).map_err(data(&args.index))?;
    let index = FmIndex::deserialize(&bytes).map_err(data(&args.index))?;
    let qbytes = fs::read(&args.query).map_err(data(&args.query))?;
    let queries = parse_fasta(&qbytes, Alphabet::new(index.kind()), args.lenient)
        .map_err(data(&args.query))?
        .into_iter()
        .map(|r| Query::new(r.id, r.codes))
        .collect();
    Ok(Loaded { index, queries })
}

fn threshold(args: &SearchArgs, m: usize, n: usize) -> Result<i32, Failure> {
    if let Some(h) = args.threshold {
        return Ok(h);
    }
    match (args.evalue, args.karlin_k, args.karlin_lambda) {
        (Some(e), Some(k), Some(l)) => {
            threshold_from_evalue(e, k, l, m, n).map_err(|e| Failure::Usage(e.to_string()))
        }
        _ => Err(Failure::Usage(
            "--evalue needs --karlin-k and --karlin-lambda".into(),
        )),
    }
}

fn options(args: &SearchArgs, mode: Mode) -> SearchOptions {
    SearchOptions {
        mode,
        toggles: Toggles {
            length_filter: !args.no_length_filter,
            score_filter: !args.no_score_filter,
            prefix_filter: !args.no_prefix_filter,
            domination: !args.no_domination,
            gmatrix: args.gmatrix,
            reuse: !args.no_reuse,
            path_sharing: !args.no_path_sharing,
        },
        threads: args.threads,
    }
}

fn run_search(args: &SearchArgs) -> Result<(), Failure> {
    let Loaded { index, queries } = load(args)?;
    let opts = options(args, args.mode);
    for q in &queries {
        let h = threshold(args, q.len(), index.len())?;
        let t0 = Instant::now();
        let out = search(&index, q, &args.score, h, &opts).map_err(data(&args.query))?;
        print!("{}", format_tsv(&index, &q.id, &out.hits));
        log::info!("{}: {} hits in {:.3}s", q.id, out.hits.len(), t0.elapsed().as_secs_f64());
        if args.stats {
            eprint!("{}", out.counters.report());
        }
    }
    Ok(())
}

fn run_compare(args: &SearchArgs) -> Result<(), Failure> {
    let Loaded { index, queries } = load(args)?;
    for q in &queries {
        let h = threshold(args, q.len(), index.len())?;
        let base = search(&index, q, &args.score, h, &options(args, Mode::Bwtsw))
            .map_err(data(&args.query))?;
        let alae = search(&index, q, &args.score, h, &options(args, Mode::Alae))
            .map_err(data(&args.query))?;
        let c = alae.counters.with_baseline(&base.counters);
        let (filtering, reusing) = ratios(&c).unwrap_or((0.0, c.reusing_ratio()));
        println!("query\t{}", q.id);
        println!("threshold\t{h}");
        println!("baseline_calculated\t{}", base.counters.calculated);
        println!("alae_calculated\t{}", c.calculated);
        println!("alae_reused\t{}", c.reused);
        println!("baseline_weighted_cost\t{}", base.counters.weighted_cost);
        println!("alae_weighted_cost\t{}", c.weighted_cost);
        println!("filtering_ratio\t{filtering:.6}");
        println!("reusing_ratio\t{reusing:.6}");
        println!("hits\t{}", alae.hits.len());
        let key = |v: &[alae::AlignmentHit]| -> Vec<(usize, usize, i32)> {
            v.iter().map(|x| (x.end_t, x.end_p, x.score)).collect()
        };
        if key(&base.hits) != key(&alae.hits) {
            return Err(Failure::Alarm(format!(
                "{}: hit sets differ (baseline {}, alae {})",
                q.id,
                base.hits.len(),
                alae.hits.len()
            )));
        }
    }
    Ok(())
}

fn analyze(score: &ScoringScheme, sigma: usize) -> Result<(), Failure> {
    let a = ungapped_bound_params(score, sigma).map_err(|e| Failure::Data(e.to_string()))?;
    let (coef, exp) = entry_bound(score, sigma).map_err(|e| Failure::Data(e.to_string()))?;
    println!("s\t{}", a.s);
    println!("q\t{}", a.q);
    println!("k1\t{:.6}", a.k1);
    println!("k2\t{:.6}", a.k2);
    println!("coefficient\t{coef:.6}");
    println!("exponent\t{exp:.6}");
    println!("{}", format_bound(coef, exp));
    Ok(())
}
