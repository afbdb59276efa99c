use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use topood_core::bootstrap::{
    run_bootstrap_with, RunControl, DEFAULT_CI_LEVEL, DEFAULT_ITERATIONS, DEFAULT_SAMPLE_SIZES,
};
use topood_core::compare::{render_table, render_verdict};
use topood_core::io::{self, PointFormat, ReportDocument, DEFAULT_HISTOGRAM_BINS, REPORT_FORMAT};
use topood_core::{
    compare_distributions, compute_persistence, generate, ood_verdict, summarize, BootstrapConfig, EmptyPolicy, Error,
    PersistenceConfig, PointCloud, Role, StatisticId, SynthSpec, ThresholdPolicy,
};

#[derive(Parser)]
#[command(
    name = "topood",
    version,
    about = "Rips persistence and bootstrap OOD comparison for embedding clouds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic point cloud.
    Generate(GenerateArgs),
    /// Compute the H0/H1 persistence diagram of a point cloud.
    Ph(PhArgs),
    /// Bootstrap distributions of diagram statistics.
    Bootstrap(BootstrapArgs),
    /// Compare Train/Test/OOD distribution files and decide on OOD.
    Compare(CompareArgs),
    /// Run the bootstrap at several sample sizes.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Circle,
    Clusters,
    UniformCube,
    Hexagon,
    Square,
    Line,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Topd,
}

impl From<FormatArg> for PointFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => PointFormat::Csv,
            FormatArg::Topd => PointFormat::Topd,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RoleArg {
    Train,
    Test,
    Ood,
    Unlabeled,
}

impl From<RoleArg> for Role {
    fn from(r: RoleArg) -> Self {
        match r {
            RoleArg::Train => Role::Train,
            RoleArg::Test => Role::Test,
            RoleArg::Ood => Role::Ood,
            RoleArg::Unlabeled => Role::Unlabeled,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EmptyArg {
    Zero,
    Skip,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of points (circle, uniform-cube).
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Number of clusters.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 20)]
    per_cluster: usize,
    #[arg(long, default_value_t = 10.0)]
    separation: f64,
    /// Noise scale.
    #[arg(long, default_value_t = 0.0)]
    sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 1.0)]
    side: f64,
    #[arg(long, value_delimiter = ',', default_value = "0,1,3", allow_negative_numbers = true)]
    positions: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    low: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    high: f64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "unlabeled")]
    role: RoleArg,
    /// Output format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct InputArgs {
    /// Point cloud file (.csv or .topd).
    input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Override the role recorded in the file.
    #[arg(long, value_enum)]
    role: Option<RoleArg>,
    /// Standardize every feature to zero mean and unit variance first.
    #[arg(long)]
    standardize: bool,
}

impl InputArgs {
    fn load(&self) -> Result<PointCloud, Error> {
        io::read_point_cloud(&self.input, self.format.map(Into::into), self.role.map(Into::into))
    }
}

#[derive(Args)]
struct PersistenceArgs {
    /// `enclosing` or a fixed non-negative scale.
    #[arg(long, default_value = "enclosing")]
    threshold: String,
    /// Keep the zero-length H0 bars produced by duplicate points.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    include_zero_bars: bool,
    /// Reduce every column instead of pairing zero-persistence edges early.
    #[arg(long)]
    no_apparent_pairs: bool,
}

impl PersistenceArgs {
    fn config(&self) -> Result<PersistenceConfig, Error> {
        Ok(PersistenceConfig {
            threshold: self.threshold.parse::<ThresholdPolicy>()?,
            include_zero_bars: self.include_zero_bars,
            apparent_pairs: !self.no_apparent_pairs,
        })
    }
}

#[derive(Args)]
struct PhArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    persistence: PersistenceArgs,
    /// Diagram output; printed to stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    persistence: PersistenceArgs,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CI_LEVEL)]
    ci_level: f64,
    /// How diagrams without finite bars enter the distributions.
    #[arg(long, value_enum, default_value = "zero")]
    empty_policy: EmptyArg,
    /// Comma-separated statistics, e.g. h0.avg_lifetime,h1.max_lifetime. Default: all eight.
    #[arg(long, value_delimiter = ',')]
    statistics: Vec<String>,
    /// Worker threads; the output does not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_HISTOGRAM_BINS)]
    bins: usize,
    /// Print progress counts to stderr.
    #[arg(long)]
    progress: bool,
}

impl RunArgs {
    fn config(&self, sample_size: usize) -> Result<BootstrapConfig, Error> {
        let statistics = if self.statistics.is_empty() {
            StatisticId::all()
        } else {
            self.statistics
                .iter()
                .map(|s| s.parse())
                .collect::<Result<Vec<_>, _>>()?
        };
        let config = BootstrapConfig {
            sample_size,
            iterations: self.iterations,
            ci_level: self.ci_level,
            master_seed: self.seed,
            persistence: self.persistence.config()?,
            empty_policy: match self.empty_policy {
                EmptyArg::Zero => EmptyPolicy::Zero,
                EmptyArg::Skip => EmptyPolicy::Skip,
            },
            standardize: self.input.standardize,
            statistics,
        };
        config.validate()?;
        Ok(config)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, Error> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            builder = builder.num_threads(t);
        }
        builder
            .build()
            .map_err(|e| Error::Resource(format!("thread pool: {e}")))
    }
}

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = 150)]
    sample_size: usize,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SAMPLE_SIZES)]
    sizes: Vec<usize>,
    /// Directory receiving one distribution file per sample size plus sweep.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    train: Option<PathBuf>,
    #[arg(long)]
    test: Option<PathBuf>,
    #[arg(long)]
    ood: Option<PathBuf>,
    /// Statistic shown in the printed interval table.
    #[arg(long, default_value = "h0.avg_lifetime")]
    statistic: String,
    /// Report output (JSON).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Ph(a) => cmd_ph(a),
        Command::Bootstrap(a) => cmd_bootstrap(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_resource() { 3 } else { 2 })
        }
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<(), Error> {
    let spec = match a.kind {
        Kind::Circle => SynthSpec::Circle {
            n: a.n,
            radius: a.radius,
            sigma: a.sigma,
            dim: a.dim,
            seed: a.seed,
        },
        Kind::Clusters => SynthSpec::Clusters {
            k: a.k,
            per_cluster: a.per_cluster,
            separation: a.separation,
            sigma: a.sigma,
            dim: a.dim,
            seed: a.seed,
        },
        Kind::UniformCube => SynthSpec::UniformCube {
            n: a.n,
            dim: a.dim,
            low: a.low,
            high: a.high,
            seed: a.seed,
        },
        Kind::Hexagon => SynthSpec::Hexagon {
            radius: a.radius,
            dim: a.dim,
        },
        Kind::Square => SynthSpec::Square {
            side: a.side,
            dim: a.dim,
        },
        Kind::Line => SynthSpec::Line {
            positions: a.positions,
            dim: a.dim,
        },
    };
    let cloud = generate(&spec, a.role.into())?;
    io::write_point_cloud(&cloud, &a.out, a.format.map(Into::into))?;
    eprintln!(
        "wrote {} points in R^{} to {}",
        cloud.len(),
        cloud.dim(),
        a.out.display()
    );
    Ok(())
}

fn cmd_ph(a: PhArgs) -> Result<(), Error> {
    let mut cloud = a.input.load()?;
    if a.input.standardize {
        cloud = cloud.standardized();
    }
    let config = a.persistence.config()?;
    let diagram = compute_persistence(&cloud, &config)?;
    match &a.out {
        Some(path) => io::write_diagram(&diagram, &config, &cloud.source, path)?,
        None => print!("{}", io::encode_diagram(&diagram, &config, &cloud.source)),
    }
    for dim in [0, 1] {
        let s = summarize(&diagram, dim);
        eprintln!(
            "H{dim}: {} finite, {} essential; avg lifetime {:.6}, max lifetime {:.6}, avg birth {:.6}, avg death {:.6}",
            s.n_finite_bars, s.n_essential_bars, s.avg_lifetime, s.max_lifetime, s.avg_birth, s.avg_death
        );
    }
    Ok(())
}

fn run_one(run: &RunArgs, cloud: &PointCloud, sample_size: usize, out: &Path) -> Result<(), Error> {
    let config = run.config(sample_size)?;
    let total = config.iterations;
    let step = (total / 20).max(1);
    let report = |done: usize| {
        if done.is_multiple_of(step) || done == total {
            eprintln!("progress: n={sample_size} {done}/{total}");
        }
    };
    let control = RunControl {
        cancel: None,
        progress: run.progress.then_some(&report as &(dyn Fn(usize) + Sync)),
    };
    let output = run.pool()?.install(|| run_bootstrap_with(cloud, &config, control))?;
    io::write_distributions(&output, run.bins, out)?;
    if let Some(d) = output.get(StatisticId::H0_AVG_LIFETIME) {
        eprintln!(
            "n={sample_size}: h0.avg_lifetime mean {:.4}, std {:.4}, {}% CI ({:.4}, {:.4})",
            d.mean,
            d.std,
            config.ci_level * 100.0,
            d.ci_low,
            d.ci_high
        );
    }
    Ok(())
}

fn cmd_bootstrap(a: BootstrapArgs) -> Result<(), Error> {
    let cloud = a.run.input.load()?;
    run_one(&a.run, &cloud, a.sample_size, &a.out)
}

fn cmd_sweep(a: SweepArgs) -> Result<(), Error> {
    let cloud = a.run.input.load()?;
    std::fs::create_dir_all(&a.out_dir).map_err(|source| Error::Write {
        path: a.out_dir.clone(),
        source,
    })?;
    let mut rows = Vec::new();
    for &n in &a.sizes {
        let path = a.out_dir.join(format!("distributions_n{n}.json"));
        run_one(&a.run, &cloud, n, &path)?;
        let doc = io::read_distributions(&path)?;
        for r in &doc.statistics {
            rows.push(serde_json::json!({
                "sample_size": n,
                "statistic": r.statistic,
                "mean": r.mean,
                "std": r.std,
                "ci_low": r.ci_low,
                "ci_high": r.ci_high,
                "file": path.file_name().map(|f| f.to_string_lossy().into_owned()),
            }));
        }
    }
    let summary = serde_json::json!({
        "format": "topood-sweep/1",
        "config": a.run.config(a.sizes.first().copied().unwrap_or(1))?,
        "sample_sizes": a.sizes,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&summary).expect("sweep summary serializes");
    text.push('\n');
    io::write_atomic(&a.out_dir.join("sweep.json"), text.as_bytes())
}

fn cmd_compare(a: CompareArgs) -> Result<(), Error> {
    let load = |p: &Option<PathBuf>| -> Result<Option<_>, Error> {
        p.as_deref()
            .map(|p| io::read_distributions(p).map(|d| d.to_distribution_set()))
            .transpose()
    };
    let (train, test, ood) = (load(&a.train)?, load(&a.test)?, load(&a.ood)?);
    let report = compare_distributions(train.as_ref(), test.as_ref(), ood.as_ref())?;
    let verdict = ood_verdict(&report)?;
    let statistic: StatisticId = a.statistic.parse()?;
    let table = render_table(&report, statistic).ok_or_else(|| Error::MissingStatistic(statistic.to_string()))?;
    print!("{table}");
    print!("{}", render_verdict(&verdict));
    if let Some(out) = &a.out {
        let inputs = [(Role::Train, &a.train), (Role::Test, &a.test), (Role::Ood, &a.ood)]
            .into_iter()
            .filter_map(|(r, p)| p.clone().map(|p| (r, p)))
            .collect();
        let doc = ReportDocument {
            format: REPORT_FORMAT.into(),
            inputs,
            report,
            verdict,
        };
        io::write_report(&doc, out)?;
    }
    Ok(())
}
