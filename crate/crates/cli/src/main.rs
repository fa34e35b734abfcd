//! `chromatic-tiler`: build, verify and inspect colorings of ℝⁿ_K.
//!
//! Exit codes: 0 success, 1 a verification or certificate failure,
//! 2 invalid input or an unsupported request.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use chromatic_tiler::color::{
    build_coloring, butler_bound_ln_ratio, chromatic_bound, default_resolutions,
    partition_seven_baseline, verify_coloring, Coloring, ColoringFile, ColoringRun, Construction,
    PipelineConfig, VerificationReport,
};
use chromatic_tiler::tiling::tiling_parameters;
use chromatic_tiler::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

/// Version of every JSON document this tool writes.
const SCHEMA: u32 = 1;
const THREADS_VAR: &str = "CHROMATIC_TILER_THREADS";

#[derive(Parser)]
#[command(
    name = "chromatic-tiler",
    version,
    about = "Verified colorings of normed spaces from multilattice tilings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the tiling parameters α, β, γ, μ of a construction.
    Gamma(RunArgs),
    /// Run the full pipeline and write coloring.json, report.json and (n = 2) coloring.svg.
    Color(RunArgs),
    /// Re-verify a coloring file.
    Verify(VerifyArgs),
    /// Tabulate the bound formulas.
    Bounds(BoundsArgs),
    /// Build and verify the classical 7-coloring of the plane.
    Baseline7(BaselineArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructionArg {
    Hexagonal,
    Square,
    BallGeneric,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    construction: Option<ConstructionArg>,
    /// Dimension for --construction ball-generic.
    #[arg(long)]
    n: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of sampled unit-distance pairs.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    cand_res: Option<usize>,
    #[arg(long)]
    sat_res: Option<usize>,
    #[arg(long)]
    lift_res: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// A coloring.json written by `color` or `baseline7`.
    coloring: PathBuf,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resolution of the totality grid (default depends on n).
    #[arg(long)]
    lift_res: Option<usize>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Dimensions to tabulate (repeatable).
    #[arg(long, required = true, num_args = 1..)]
    n: Vec<u64>,
    /// Number of translates in the multilattice.
    #[arg(long, default_value_t = 1)]
    k: u64,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Free constant of the Butler formula.
    #[arg(long, default_value_t = 3.0)]
    c: f64,
}

#[derive(Args)]
struct BaselineArgs {
    /// Directory for coloring.json, report.json and coloring.svg; print only when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<Error>() {
            Some(e) if e.is_certificate_failure() => 1,
            _ => 2,
        };
        Failure { code, error }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type CmdResult = Result<bool, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = configure_threads()
        .map_err(Failure::from)
        .and_then(|_| match cli.command {
            Command::Gamma(a) => cmd_gamma(&a),
            Command::Color(a) => cmd_color(&a),
            Command::Verify(a) => cmd_verify(&a),
            Command::Bounds(a) => cmd_bounds(&a),
            Command::Baseline7(a) => cmd_baseline(&a),
        });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_VAR}={v:?} is not a count"))?;
    if threads == 0 {
        bail!("{THREADS_VAR} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    Ok(())
}

fn load_config(a: &RunArgs) -> anyhow::Result<PipelineConfig> {
    let mut c = match &a.config {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => PipelineConfig::default(),
    };
    match (a.construction, a.n) {
        (Some(ConstructionArg::Hexagonal), _) => c.construction = Construction::Hexagonal,
        (Some(ConstructionArg::Square), _) => c.construction = Construction::Square,
        (Some(ConstructionArg::BallGeneric), Some(n)) => {
            c.construction = Construction::BallGeneric { n }
        }
        (Some(ConstructionArg::BallGeneric), None) => {
            bail!("--construction ball-generic needs --n")
        }
        (None, Some(n)) => match &mut c.construction {
            Construction::BallGeneric { n: m } => *m = n,
            _ => bail!("--n only applies to the ball-generic construction"),
        },
        (None, None) => {}
    }
    if let Some(v) = a.seed {
        c.seed = v;
    }
    if let Some(v) = a.samples {
        c.pair_samples = v;
    }
    if let Some(v) = a.eta {
        c.eta = v;
    }
    c.delta = a.delta.or(c.delta);
    c.cand_res = a.cand_res.or(c.cand_res);
    c.sat_res = a.sat_res.or(c.sat_res);
    c.lift_res = a.lift_res.or(c.lift_res);
    c.resolved()?;
    Ok(c)
}

fn print_json(v: &impl Serialize) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn write_json(path: &Path, v: &impl Serialize) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn cmd_gamma(a: &RunArgs) -> CmdResult {
    let c = load_config(a)?;
    let tiling = c.construction.build()?;
    let params = tiling_parameters(&tiling, &c.body(), c.eta)?;
    print_json(&json!({
        "schema": SCHEMA,
        "n": tiling.dim(),
        "k": tiling.cells().len(),
        "body": c.body(),
        "parameters": params,
        "nu": params.nu(),
    }))?;
    Ok(true)
}

fn write_coloring(dir: &Path, coloring: &Coloring, report: &Value) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_json(&dir.join("coloring.json"), &coloring.to_file())?;
    write_json(&dir.join("report.json"), report)?;
    if coloring.dim() == 2 {
        let path = dir.join("coloring.svg");
        fs::write(&path, svg::render(coloring))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run_report(c: &PipelineConfig, run: &ColoringRun) -> Value {
    json!({
        "schema": SCHEMA,
        "passed": run.passed(),
        "config": c,
        "resolved": run.config,
        "parameters": run.params,
        "instance": run.instance,
        "verification": run.verification,
        "bounds": run.bounds,
    })
}

fn cmd_color(a: &RunArgs) -> CmdResult {
    let c = load_config(a)?;
    let run = build_coloring(&c)?;
    let report = run_report(&c, &run);
    write_coloring(&a.out, &run.coloring, &report)?;
    let v = &run.verification;
    println!(
        "{} colors; max diameter {:.9}, min separation {:.9}; {} sampled pairs, {} violations; written to {}",
        run.coloring.color_count(),
        v.structural.max_diameter,
        v.structural.min_separation,
        v.sampled.pairs,
        v.sampled.violations,
        a.out.display()
    );
    Ok(run.passed())
}

fn cmd_verify(a: &VerifyArgs) -> CmdResult {
    let text = fs::read_to_string(&a.coloring)
        .with_context(|| format!("reading {}", a.coloring.display()))?;
    let file: ColoringFile =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", a.coloring.display()))?;
    let coloring = Coloring::from_file(file)?;
    let res = a
        .lift_res
        .unwrap_or_else(|| default_resolutions(coloring.dim()).2);
    let report = verify_coloring(&coloring, a.samples, a.seed, Some(res))?;
    print_verification(&report)?;
    Ok(report.passed())
}

fn print_verification(r: &VerificationReport) -> anyhow::Result<()> {
    print_json(&json!({ "schema": SCHEMA, "passed": r.passed(), "verification": r }))
}

fn cmd_bounds(a: &BoundsArgs) -> CmdResult {
    let rows =
        a.n.iter()
            .map(|&n| {
                let t = chromatic_bound(n, a.k, a.gamma)?;
                // vol(DK)/vol(K) = 2ⁿ for symmetric K; 2ⁿ overflows past n ≈ 1000,
                // so the ratio enters through its logarithm.
                let butler = if n >= 3 {
                    Some(butler_bound_ln_ratio(
                        n,
                        n as f64 * std::f64::consts::LN_2,
                        a.c,
                    )?)
                } else {
                    None
                };
                Ok(json!({
                    "n": n,
                    "k": a.k,
                    "gamma": a.gamma,
                    "two_ln_k": 2.0 * (a.k as f64).ln(),
                    "bracket": t.bracket,
                    "chromatic_bound_ln": t.ln_value,
                    "chromatic_bound": t.value,
                    "chromatic_bound_per_dimension": t.per_dimension,
                    "warning": t.warning,
                    "butler_c": a.c,
                    "butler": butler,
                }))
            })
            .collect::<Result<Vec<Value>, Error>>()?;
    print_json(&json!({ "schema": SCHEMA, "rows": rows }))?;
    Ok(true)
}

fn cmd_baseline(a: &BaselineArgs) -> CmdResult {
    let (coloring, report) = partition_seven_baseline(a.samples, a.seed)?;
    if let Some(dir) = &a.out {
        let doc = json!({ "schema": SCHEMA, "passed": report.passed(), "verification": report });
        write_coloring(dir, &coloring, &doc)?;
    }
    print_verification(&report)?;
    Ok(report.passed())
}
