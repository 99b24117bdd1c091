use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ripslab::config::{parse_list, ConfigFile};
use ripslab::emit::{emit_to_path, to_csv, to_json, EmitFormat};
use ripslab::formats;
use ripslab::sweep::{
    run_sweep, CheckSet, DensityChoice, DomainSpec, RadiusSpec, SweepConfig, TrialResult,
};
use ripslab::threshold::estimate_threshold;
use ripslab::radius_from_c;

use ripslab_core::complex;
use ripslab_core::covernerve::{build_cover_adaptive, verify_nerve};
use ripslab_core::dismantle::{dismantle, pursue, RobberStrategy};
use ripslab_core::domains::{sample, Domain, PointCloud};
use ripslab_core::proximity::{build_graph, GeometricGraph};

/// Invalid configuration or arguments: exit code 2. Runtime failures exit 1.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser)]
#[command(
    name = "ripslab",
    about = "Vietoris-Rips contractibility laboratory: sampling, radius graphs, \
             dismantling certificates, GF(2) homology, covers and nerve checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample a point cloud and write it as CSV
    Sample(SampleArgs),
    /// Build the radius graph and export its edge list
    Graph(GraphArgs),
    /// Run the dismantling engine; write the elimination record as JSON
    Dismantle(DismantleArgs),
    /// Enumerate the clique complex and compute GF(2) Betti numbers
    Betti(BettiArgs),
    /// Build a covering family over the domain
    Cover(CoverArgs),
    /// Build a cover and verify the three nerve conditions
    VerifyNerve(VerifyNerveArgs),
    /// Play the pursuit game on a dismantlable graph
    Pursuit(PursuitArgs),
    /// Run a Monte Carlo sweep over (n, c) cells
    Sweep(SweepArgs),
    /// Estimate the location of a probability threshold from sweep results
    Threshold(ThresholdArgs),
}

#[derive(Args)]
struct CloudSource {
    /// Point-cloud CSV to load (alternative to sampling)
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// Domain to sample from: unit-box | ball:R | annulus:I,O | box:min;max
    #[arg(long)]
    domain: Option<DomainSpec>,
    /// Density: uniform | bounded:<c..,r,w>[;...]
    #[arg(long, default_value = "uniform")]
    density: DensityChoice,
    /// Ambient dimension
    #[arg(long)]
    dim: Option<usize>,
    /// Number of sample points
    #[arg(long)]
    n: Option<usize>,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl CloudSource {
    fn domain(&self) -> Result<Option<Domain>> {
        match (&self.domain, self.dim) {
            (Some(spec), Some(d)) => Ok(Some(spec.instantiate(d).map_err(|e| usage(e.to_string()))?)),
            (Some(_), None) => Err(usage("--domain needs --dim")),
            _ => Ok(None),
        }
    }

    fn load(&self) -> Result<(PointCloud, Option<Domain>)> {
        if let Some(path) = &self.cloud {
            let cloud = formats::read_cloud(path).context("reading cloud")?;
            return Ok((cloud, self.domain()?));
        }
        let Some(domain) = self.domain()? else {
            return Err(usage("provide either --cloud or --domain with --dim"));
        };
        let n = self.n.ok_or_else(|| usage("--n is required when sampling"))?;
        let density = self
            .density
            .instantiate(&domain)
            .map_err(|e| usage(e.to_string()))?;
        let cloud = sample(&domain, &density, n, self.seed)?;
        Ok((cloud, Some(domain)))
    }
}

#[derive(Args)]
struct RadiusArg {
    /// Connection radius
    #[arg(long)]
    r: Option<f64>,
    /// Scale constant: radius becomes c (ln n / n)^{1/d}
    #[arg(long)]
    c: Option<f64>,
}

impl RadiusArg {
    fn resolve(&self, n: usize, d: usize) -> Result<f64> {
        match (self.r, self.c) {
            (Some(r), None) if r > 0.0 => Ok(r),
            (None, Some(c)) if c > 0.0 => Ok(radius_from_c(c, n, d)),
            (None, None) => Err(usage("one of --r or --c is required")),
            (Some(_), Some(_)) => Err(usage("--r and --c are mutually exclusive")),
            _ => Err(usage("radius must be positive")),
        }
    }
}

fn write_or_print(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{body}"),
    }
    Ok(())
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    source: CloudSource,
    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    #[command(flatten)]
    source: CloudSource,
    #[command(flatten)]
    radius: RadiusArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DismantleArgs {
    #[command(flatten)]
    source: CloudSource,
    #[command(flatten)]
    radius: RadiusArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BettiArgs {
    #[command(flatten)]
    source: CloudSource,
    #[command(flatten)]
    radius: RadiusArg,
    /// Maximum simplex dimension to enumerate
    #[arg(long, value_name = "K")]
    dim_cap: Option<usize>,
    /// Total simplex budget
    #[arg(long, default_value_t = complex::DEFAULT_SIMPLEX_BUDGET)]
    budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoverArgs {
    /// Domain: unit-box | ball:R | annulus:I,O | box:min;max
    #[arg(long)]
    domain: DomainSpec,
    #[arg(long)]
    dim: usize,
    #[command(flatten)]
    radius: RadiusArg,
    /// n used only to resolve --c into a radius
    #[arg(long)]
    n: Option<usize>,
    /// Starting inflation step (halved automatically on overflow)
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optimizer budget per index set
    #[arg(long, default_value_t = 4000)]
    probe_budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyNerveArgs {
    #[command(flatten)]
    source: CloudSource,
    #[command(flatten)]
    radius: RadiusArg,
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
    #[arg(long, default_value_t = 4000)]
    probe_budget: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RobberArg {
    /// Maximize graph distance from the cop
    Greedy,
    /// Uniform over the closed neighborhood
    Random,
}

#[derive(Args)]
struct PursuitArgs {
    #[command(flatten)]
    source: CloudSource,
    #[command(flatten)]
    radius: RadiusArg,
    #[arg(long, value_enum, default_value_t = RobberArg::Greedy)]
    robber: RobberArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Key-value config file; command-line flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    domain: Option<DomainSpec>,
    #[arg(long)]
    density: Option<DensityChoice>,
    /// Dimensions, comma separated
    #[arg(long)]
    dim: Option<String>,
    /// n values, comma separated
    #[arg(long)]
    n: Option<String>,
    /// c values, comma separated (radius c (ln n / n)^{1/d})
    #[arg(long)]
    c: Option<String>,
    /// raw radii, comma separated (alternative to --c)
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dim_cap: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    /// Checks to run: subset of dismantle,betti,coverage,nerve,pursuit
    #[arg(long)]
    checks: Option<CheckSet>,
    /// Permit radii above diam(K)
    #[arg(long)]
    allow_r_above_diam: bool,
    #[arg(long, default_value = "csv")]
    format: EmitFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    /// Sweep results in JSON form
    #[arg(long)]
    input: PathBuf,
    /// Probability level to locate
    #[arg(long, default_value_t = 0.5)]
    target: f64,
    #[arg(long, default_value_t = 200)]
    bootstrap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn graph_from(source: &CloudSource, radius: &RadiusArg) -> Result<(PointCloud, GeometricGraph, f64)> {
    let (cloud, domain) = source.load()?;
    let d = cloud.dim;
    let r = radius.resolve(cloud.points.len(), d)?;
    let _ = domain;
    let gg = build_graph(&cloud, r);
    Ok((cloud, gg, r))
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Sample(args) => {
            let (cloud, _) = args.source.load()?;
            write_or_print(&args.out, &formats::cloud_to_csv(&cloud))?;
        }
        Cmd::Graph(args) => {
            let (_, gg, r) = graph_from(&args.source, &args.radius)?;
            eprintln!(
                "graph: n={} m={} r={r}",
                gg.graph.n(),
                gg.graph.edge_count()
            );
            write_or_print(&args.out, &formats::graph_to_edge_list(&gg.graph))?;
        }
        Cmd::Dismantle(args) => {
            let (_, gg, r) = graph_from(&args.source, &args.radius)?;
            let record = dismantle(&gg.graph)?;
            eprintln!(
                "dismantle: r={r} complete={} steps={} residual={}",
                record.complete,
                record.steps.len(),
                record.residual.len()
            );
            let body = serde_json::to_string_pretty(&record)?;
            write_or_print(&args.out, &body)?;
        }
        Cmd::Betti(args) => {
            let (cloud, gg, r) = graph_from(&args.source, &args.radius)?;
            let dim_cap = args.dim_cap.unwrap_or(cloud.dim + 1);
            let cx = complex::enumerate_with_budget(&gg.graph, dim_cap, args.budget)?;
            let profile = complex::betti(&cx);
            let counts: serde_json::Map<String, serde_json::Value> = cx
                .counts()
                .iter()
                .enumerate()
                .map(|(k, &c)| (k.to_string(), c.into()))
                .collect();
            let betti: serde_json::Map<String, serde_json::Value> = profile
                .betti
                .iter()
                .enumerate()
                .map(|(k, &b)| (k.to_string(), b.into()))
                .collect();
            let body = serde_json::to_string_pretty(&serde_json::json!({
                "r": r,
                "dim_cap": dim_cap,
                "simplex_counts": counts,
                "betti": betti,
                "euler": profile.euler,
                "truncated": profile.truncated,
                "point_like": profile.is_point_like(),
            }))?;
            eprintln!("betti: {:?} euler={} truncated={}", profile.betti, profile.euler, profile.truncated);
            write_or_print(&args.out, &body)?;
        }
        Cmd::Cover(args) => {
            let domain = args
                .domain
                .instantiate(args.dim)
                .map_err(|e| usage(e.to_string()))?;
            let r = match (args.radius.r, args.radius.c, args.n) {
                (Some(r), None, _) => r,
                (None, Some(c), Some(n)) => radius_from_c(c, n, args.dim),
                (None, Some(_), None) => return Err(usage("--c needs --n to resolve a radius")),
                _ => return Err(usage("one of --r or --c is required")),
            };
            let cover = build_cover_adaptive(&domain, r, args.epsilon, args.probe_budget, args.seed)?;
            eprintln!(
                "cover: N={} epsilon={} inflations={} faces={}",
                cover.len(),
                cover.epsilon,
                cover.inflated.len(),
                cover.faces.len()
            );
            let body = serde_json::to_string_pretty(&cover)?;
            write_or_print(&args.out, &body)?;
        }
        Cmd::VerifyNerve(args) => {
            let (cloud, domain) = args.source.load()?;
            let Some(domain) = domain else {
                return Err(usage("verify-nerve needs --domain with --dim (cover construction)"));
            };
            let r = args.radius.resolve(cloud.points.len(), cloud.dim)?;
            let gg = build_graph(&cloud, r);
            let cover = build_cover_adaptive(&domain, r, args.epsilon, args.probe_budget, args.source.seed)?;
            let report = verify_nerve(&cloud, &gg, &cover)?;
            eprintln!(
                "nerve: a={} b={} c={} (epsilon={}, issues={})",
                report.condition_a,
                report.condition_b,
                report.condition_c,
                report.epsilon,
                report.issues.len()
            );
            let body = serde_json::to_string_pretty(&report)?;
            write_or_print(&args.out, &body)?;
        }
        Cmd::Pursuit(args) => {
            let (_, gg, r) = graph_from(&args.source, &args.radius)?;
            let record = dismantle(&gg.graph)?;
            if !record.complete {
                bail!(
                    "graph at r={r} is not dismantlable (residual {}); no cop strategy exists",
                    record.residual.len()
                );
            }
            let strategy = match args.robber {
                RobberArg::Greedy => RobberStrategy::GreedyEscape,
                RobberArg::Random => RobberStrategy::UniformRandom,
            };
            let transcript = pursue(&gg.graph, &record, strategy, args.source.seed)?;
            eprintln!(
                "pursuit: captured={} turns={} |V|={}",
                transcript.captured,
                transcript.turns,
                gg.graph.n()
            );
            let body = serde_json::to_string_pretty(&transcript)?;
            write_or_print(&args.out, &body)?;
        }
        Cmd::Sweep(args) => {
            let results = run_sweep_cmd(&args)?;
            eprintln!("sweep: {} trials", results.len());
            match (&args.out, args.format) {
                (Some(path), fmt) => emit_to_path(path, &results, fmt)?,
                (None, EmitFormat::Csv) => print!("{}", to_csv(&results)),
                (None, EmitFormat::Json) => print!("{}", to_json(&results)?),
            }
        }
        Cmd::Threshold(args) => {
            let text = std::fs::read_to_string(&args.input)
                .with_context(|| format!("reading {}", args.input.display()))?;
            let results: Vec<TrialResult> = serde_json::from_str(&text)
                .context("parsing results JSON (emit the sweep with --format json)")?;
            if !(args.target > 0.0 && args.target < 1.0) {
                return Err(usage("--target must be in (0, 1)"));
            }
            let estimates = estimate_threshold(&results, args.target, args.bootstrap, args.seed)?;
            for e in &estimates {
                eprintln!(
                    "threshold: d={} n={} {}: c_hat={:.4} ci=({:.4}, {:.4}) slope={:.2}",
                    e.d, e.n, e.domain, e.c_hat, e.ci.0, e.ci.1, e.slope
                );
            }
            let body = serde_json::to_string_pretty(&estimates)?;
            write_or_print(&args.out, &body)?;
        }
    }
    Ok(())
}

fn run_sweep_cmd(args: &SweepArgs) -> Result<Vec<TrialResult>> {
    let cfg = match &args.config {
        Some(path) => ConfigFile::load(path).map_err(|e| usage(e.to_string()))?,
        None => ConfigFile::default(),
    };
    let resolve_str = |key: &str, flag: &Option<String>| -> Option<String> {
        flag.clone().or_else(|| cfg.get(key).map(str::to_string))
    };

    let domain: DomainSpec = match cfg.resolve("domain", args.domain.clone()) {
        Ok(Some(d)) => d,
        Ok(None) => DomainSpec::UnitBox,
        Err(e) => return Err(usage(e)),
    };
    let density: DensityChoice = match cfg.resolve("density", args.density.clone()) {
        Ok(Some(d)) => d,
        Ok(None) => DensityChoice::Uniform,
        Err(e) => return Err(usage(e)),
    };
    let dims: Vec<usize> = match resolve_str("dim", &args.dim) {
        Some(text) => parse_list(&text).map_err(usage)?,
        None => vec![2],
    };
    let ns: Vec<usize> = match resolve_str("n", &args.n) {
        Some(text) => parse_list(&text).map_err(usage)?,
        None => return Err(usage("--n (or config key n) is required")),
    };
    let c_text = resolve_str("c", &args.c);
    let r_text = resolve_str("r", &args.r);
    let radius = match (c_text, r_text) {
        (Some(c), None) => RadiusSpec::C(parse_list(&c).map_err(usage)?),
        (None, Some(r)) => RadiusSpec::R(parse_list(&r).map_err(usage)?),
        (Some(_), Some(_)) => return Err(usage("--c and --r are mutually exclusive")),
        (None, None) => return Err(usage("--c or --r (or config keys) required")),
    };
    let checks = match cfg.resolve("checks", args.checks) {
        Ok(Some(c)) => c,
        Ok(None) => CheckSet::dismantle_only(),
        Err(e) => return Err(usage(e)),
    };
    let config = SweepConfig {
        domain,
        density,
        dims,
        ns,
        radius,
        trials: cfg.resolve("trials", args.trials).map_err(usage)?.unwrap_or(1),
        base_seed: cfg.resolve("seed", args.seed).map_err(usage)?.unwrap_or(0),
        dim_cap: cfg.resolve("dim-cap", args.dim_cap).map_err(usage)?,
        epsilon: cfg.resolve("epsilon", args.epsilon).map_err(usage)?.unwrap_or(0.05),
        simplex_budget: cfg
            .resolve("budget", args.budget)
            .map_err(usage)?
            .unwrap_or(complex::DEFAULT_SIMPLEX_BUDGET),
        checks,
        allow_r_above_diam: args.allow_r_above_diam
            || cfg.get("allow-r-above-diam").map(|v| v == "true").unwrap_or(false),
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    run_sweep(&config).map_err(|e| usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<UsageError>().is_some()
                || err.downcast_ref::<ripslab::sweep::SweepError>().is_some()
            {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
