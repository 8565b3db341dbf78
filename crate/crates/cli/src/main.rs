use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use forest_spectra::embed::{embed, SymmetricMatrix};
use forest_spectra::generate::GraphFamily;
use forest_spectra::io::{load_graph, load_matrix, write_edge_list, Format};
use forest_spectra::moments::{admissible_interval, classify, validate_sequence, MomentSequence, Regularity};
use forest_spectra::oracle::{exact_matrix_oracle, exact_oracle, DEFAULT_EXACT_CAP};
use forest_spectra::pipeline::{bench_costs, estimate_cdf, Input, Mode, Params, RunConfig};
use forest_spectra::seed::stream;
use forest_spectra::{Error, Execution, WeightedGraph};

#[derive(Parser)]
#[command(name = "forest-spectra", version, about = "Spectral distribution of graph Laplacians from random spanning forests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate F(q) on the geometric grid.
    Estimate(EstimateArgs),
    /// Write a benchmark graph as an edge list.
    Generate(GenerateArgs),
    /// Dense eigenvalues of -L (or -M in symmetric mode).
    Exact(ExactArgs),
    /// Measure trajectory costs against their theoretical values.
    Bench(BenchArgs),
    /// Build the double-cover sub-Laplacians of a symmetric matrix.
    Embed(EmbedArgs),
    /// Moment sequence utilities.
    Moments {
        #[command(subcommand)]
        command: MomentsCommand,
    },
    /// Sample one coupled trajectory and print root counts on a grid.
    Sample(SampleArgs),
}

#[derive(Args)]
struct GraphSource {
    /// Input file (edge list or Matrix Market).
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    /// Generator spec such as `er:n=2000,p=0.0114` instead of a file.
    #[arg(long, conflicts_with = "graph")]
    generator: Option<String>,
    /// Seed for random generators.
    #[arg(long, default_value_t = 1)]
    graph_seed: u64,
}

impl GraphSource {
    fn format(&self, path: &Path) -> Result<Format, Error> {
        match &self.format {
            Some(f) => f.parse(),
            None => Ok(Format::from_path(path)),
        }
    }

    fn input(&self) -> Result<Input, Error> {
        match (&self.graph, &self.generator) {
            (Some(path), None) => Ok(Input::File {
                path: path.clone(),
                format: self.format(path)?,
            }),
            (None, Some(spec)) => Ok(Input::Generator {
                family: spec.parse()?,
                seed: self.graph_seed,
            }),
            _ => Err(Error::InvalidParameter("give exactly one of --graph or --generator".into())),
        }
    }

    fn load(&self) -> Result<WeightedGraph, Error> {
        match self.input()? {
            Input::File { path, format } => Ok(load_graph(&path, format)?.graph),
            Input::Generator { family, seed } => family.build(seed),
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: GraphSource,
    /// laplacian, sub-laplacian or symmetric.
    #[arg(long, default_value = "laplacian")]
    mode: String,
    #[arg(long, default_value_t = 0.01)]
    eps0: f64,
    #[arg(long, default_value_t = 4)]
    replicas: usize,
    #[arg(long, default_value_t = 400)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add the dense reference F to the report.
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: usize,
    /// Add a non-decreasing repair of the predictions.
    #[arg(long)]
    isotonic: bool,
    /// Extra diagonal shift in symmetric mode.
    #[arg(long, default_value_t = 0.0)]
    extra_shift: f64,
    /// Disable the thread pool.
    #[arg(long)]
    sequential: bool,
    /// Report CSV; a `.json` mirror and `.moments.csv` are written next to it.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// Family: er, er_mean_degree, ba, sbm, sensor, comet, torus, star, path, complete.
    family: String,
    /// Parameters as key=value.
    params: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Treat a Matrix Market input as a general symmetric matrix.
    #[arg(long)]
    symmetric: bool,
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    cap: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    q0: f64,
    #[arg(long, default_value_t = 100)]
    trajectories: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct EmbedArgs {
    /// Symmetric Matrix Market file.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    extra_shift: f64,
    /// Writes `<prefix>.l1.txt` and `<prefix>.l2.txt`.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum MomentsCommand {
    /// Admissibility report for a sequence given as JSON.
    Check {
        /// `{"a": .., "b": .., "moments": [m0, m1, ..], "radii": [..]}`.
        #[arg(long)]
        json: PathBuf,
    },
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    qmin: f64,
    #[arg(long)]
    qmax: f64,
    /// Comma-separated grid inside [qmin, qmax].
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Deserialize)]
struct MomentInput {
    a: f64,
    b: f64,
    moments: Vec<f64>,
    #[serde(default)]
    radii: Vec<f64>,
}

#[derive(Serialize)]
struct MomentReport {
    order: usize,
    regularity: Regularity,
    k_valid: usize,
    next_moment_interval: Option<(f64, f64)>,
}

fn execution(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn json_out<T: Serialize>(value: &T, out: impl Write) -> Result<(), Error> {
    serde_json::to_writer_pretty(out, value).map_err(|e| Error::Io(e.into()))
}

fn estimate(args: EstimateArgs) -> Result<(), Error> {
    let cfg = RunConfig {
        input: args.source.input()?,
        mode: args.mode.parse::<Mode>()?,
        params: Params {
            eps0: args.eps0,
            replicas: args.replicas,
            samples: args.samples,
            seed: args.seed,
            exact_cap: args.exact.then_some(args.exact_cap),
            isotonic: args.isotonic,
            extra_shift: args.extra_shift,
            execution: execution(args.sequential),
            ..Params::default()
        },
    };
    let report = estimate_cdf(&cfg)?;
    let mut out = create(&args.output)?;
    report.write_csv(&mut out)?;
    out.flush()?;
    let mut js = create(&sibling(&args.output, ".json"))?;
    json_out(&serde_json::json!({ "config": cfg, "report": report }), &mut js)?;
    js.flush()?;
    let estimates: Vec<_> = if report.components.is_empty() {
        report.estimates.iter().collect()
    } else {
        report.components.iter().flat_map(|c| c.estimates.iter()).collect()
    };
    for (i, est) in estimates.iter().enumerate() {
        let suffix = if estimates.len() == 1 {
            ".moments.csv".to_string()
        } else {
            format!(".l{}.moments.csv", i + 1)
        };
        let mut m = create(&sibling(&args.output, &suffix))?;
        est.write_csv(&mut m)?;
        m.flush()?;
    }
    let counts = report.rows.iter().fold([0usize; 3], |mut acc, r| {
        acc[r.method as usize] += 1;
        acc
    });
    eprintln!(
        "{} grid points: {} markov-exact, {} maxent, {} trivial; {} fit failures",
        report.rows.len(),
        counts[0],
        counts[1],
        counts[2],
        report.events.len()
    );
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<(), Error> {
    let params: Vec<&str> = args.params.iter().map(String::as_str).collect();
    let g = GraphFamily::parse(&args.family, &params)?.build(args.seed)?;
    let mut out = create(&args.output)?;
    write_edge_list(&g, &mut out)?;
    out.flush()?;
    eprintln!("n = {}, edges = {}", g.n(), g.edge_count());
    Ok(())
}

fn exact(args: ExactArgs) -> Result<(), Error> {
    let spectrum = match (&args.source.graph, args.symmetric) {
        (Some(path), true) => exact_matrix_oracle(&load_matrix(path)?, args.cap)?,
        _ => exact_oracle(&args.source.load()?, args.cap)?,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for l in &spectrum.eigenvalues {
        writeln!(out, "{l}")?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Error> {
    let g = args.source.load()?;
    let report = bench_costs(&g, args.q0, args.trajectories, args.seed, execution(args.sequential))?;
    json_out(&report, io::stdout().lock())?;
    println!();
    Ok(())
}

fn embed_cmd(args: EmbedArgs) -> Result<(), Error> {
    let m: SymmetricMatrix = load_matrix(&args.matrix)?;
    let pair = embed(&m, args.extra_shift)?;
    for (g, suffix) in [(&pair.l1, ".l1.txt"), (&pair.l2, ".l2.txt")] {
        let path = args.output.with_file_name(format!(
            "{}{suffix}",
            args.output.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
        ));
        let mut out = create(&path)?;
        write_edge_list(g, &mut out)?;
        out.flush()?;
    }
    println!("shift {}", pair.shift);
    Ok(())
}

fn moments_check(path: &Path) -> Result<(), Error> {
    let text = std::fs::read_to_string(path)?;
    let input: MomentInput = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let ms = MomentSequence::new(input.a, input.b, input.moments)?;
    let regularity = classify(&ms)?;
    let report = MomentReport {
        order: ms.order(),
        k_valid: validate_sequence(&ms, &input.radii),
        next_moment_interval: match regularity {
            Regularity::Regular => Some(admissible_interval(&ms)?),
            _ => None,
        },
        regularity,
    };
    json_out(&report, io::stdout().lock())?;
    println!();
    Ok(())
}

fn sample(args: SampleArgs) -> Result<(), Error> {
    let g = args.source.load()?;
    let mut grid = args.grid.clone();
    grid.sort_by(f64::total_cmp);
    let sampler = forest_spectra::forest::ForestSampler::new(&g);
    let mut rng = stream(args.seed, 0, 0);
    let t = sampler.trajectory(args.qmin, args.qmax, &grid, &mut rng, Default::default())?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "q,roots")?;
    for (q, s) in grid.iter().zip(&t.snapshots) {
        writeln!(out, "{q},{}", s.root_count())?;
    }
    writeln!(out, "# sampled={} rereads={}", t.cost.sampled, t.cost.rereads)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Estimate(a) => estimate(a),
        Command::Generate(a) => generate(a),
        Command::Exact(a) => exact(a),
        Command::Bench(a) => bench(a),
        Command::Embed(a) => embed_cmd(a),
        Command::Moments {
            command: MomentsCommand::Check { json },
        } => moments_check(&json),
        Command::Sample(a) => sample(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
