//! Command-line front end: cut family windows, square graphs, hunt for ray
//! bundles and minor models, query the minor oracle, print exclusion
//! bounds, and drive reproducible experiments.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;
use thicket::dot::{bundle_dot, graph_dot, model_dot};
use thicket::experiments::{run_experiment, ConfigLayer, ExperimentConfig, WallClock};
use thicket::formats::{
    parse_ratio, ratio_display, to_canonical_json, BundleDoc, GraphDoc, ModelDoc,
};
use thicket_core::bounds::{bound_report, BoundInputs, BoundVariant, BoundsError};
use thicket_core::builder::build_km_minor;
use thicket_core::families::{cut_window, FamilySpec, Window};
use thicket_core::oracle::{has_minor_with_clock, verify_model, MinorOutcome, SearchBudget};
use thicket_core::rays::{disjoint_rays, verify_bundle, RayBundle};
use thicket_core::FiniteGraph;

#[derive(Parser)]
#[command(
    name = "thicket",
    version,
    about = "Windows of graph families, minor models in their squares, and clique-minor exclusion bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut a ball-shaped window out of a family and emit the graph.
    Gen(GenArgs),
    /// Square a graph document (same vertices, edges at distance 1 or 2).
    Square(SquareArgs),
    /// Look for disjoint rays to the boundary that leave along one end.
    Rays(RaysArgs),
    /// Build a complete-minor model in the square of a window.
    BuildMinor(BuildArgs),
    /// Decide whether a pattern graph is a minor of a host graph.
    Oracle(OracleArgs),
    /// Print the clique-order exclusion bounds for given constants.
    Bound(BoundArgs),
    /// Run a thick-side or tree-side experiment and write its artifacts.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Dot,
}

#[derive(Args)]
struct GenArgs {
    /// Family id: grid_z2, regular_tree:D, line_z:S, ladder, free_product:K.
    family: String,
    /// Ball radius around the basepoint.
    radius: u32,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SquareArgs {
    /// Graph document to square.
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RaysArgs {
    /// Family id to cut the window from.
    family: String,
    /// Window radius.
    radius: u32,
    /// Number of pairwise disjoint rays to look for.
    m: u32,
    /// Radius the rays start from; defaults to half the window radius.
    #[arg(long)]
    r_star: Option<u32>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Family id to cut the window from.
    family: String,
    /// Window radius.
    radius: u32,
    /// Order of the complete minor to build.
    m: u32,
    /// Radius the rays start from; defaults to half the window radius.
    #[arg(long)]
    r_star: Option<u32>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Host graph document.
    host: PathBuf,
    /// Pattern: K_N (for example K_4) or a path to a graph document.
    pattern: String,
    /// Search-tree node budget.
    #[arg(long, default_value_t = 1_000_000)]
    max_nodes: u64,
    /// Wall-clock budget in seconds.
    #[arg(long, default_value_t = 60)]
    time_cap_secs: u64,
    /// Write the found model here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    /// Maximum degree on the graph side.
    #[arg(long)]
    graph_degree: u32,
    /// Maximum degree on the tree side.
    #[arg(long)]
    tree_degree: u32,
    /// Multiplicative constant, an integer or a fraction like 3/2.
    #[arg(long)]
    gamma: String,
    /// Additive constant, an integer or a fraction like 1/2.
    #[arg(long)]
    c: String,
    /// Round non-integer constants up instead of refusing them.
    #[arg(long)]
    round_up: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// thick or tree.
    #[arg(long)]
    kind: Option<String>,
    /// Family id the experiment runs over.
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated ascending radii, for example 6,8,10.
    #[arg(long)]
    radii: Option<String>,
    /// Order range with both ends inclusive, for example 2..5, or one value.
    #[arg(long)]
    m: Option<String>,
    /// TOML config file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_nodes: Option<u64>,
    #[arg(long)]
    time_cap_secs: Option<u64>,
    /// nominal or safe.
    #[arg(long)]
    variant: Option<String>,
    /// Output directory; beats the THICKET_OUT_DIR environment variable.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Name recorded in the report; defaults to kind and family.
    #[arg(long)]
    name: Option<String>,
}

/// A failure with the exit code it maps to. 1 is a negative answer or a
/// failed check, 2 is an exhausted budget, 3 is bad input or environment.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn config(message: impl Into<String>) -> Fail {
        Fail { code: 3, message: message.into() }
    }

    fn check(message: impl Into<String>) -> Fail {
        Fail { code: 1, message: message.into() }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Fail {
        Fail::config(e.to_string())
    }
}

impl From<thicket::formats::FormatError> for Fail {
    fn from(e: thicket::formats::FormatError) -> Fail {
        Fail::config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Fail> {
    match command {
        Command::Gen(args) => gen(args),
        Command::Square(args) => square(args),
        Command::Rays(args) => rays(args),
        Command::BuildMinor(args) => build_minor(args),
        Command::Oracle(args) => oracle(args),
        Command::Bound(args) => bound(args),
        Command::Experiment(args) => experiment(args),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_family(id: &str) -> Result<FamilySpec, Fail> {
    FamilySpec::parse_id(id).map_err(|e| Fail::config(format!("family {id:?}: {e}")))
}

fn window_of(family: &str, radius: u32) -> Result<Window, Fail> {
    let spec = parse_family(family)?;
    cut_window(&spec, radius).map_err(|e| Fail::config(e.to_string()))
}

fn load_graph(path: &Path) -> Result<FiniteGraph, Fail> {
    let text = fs::read_to_string(path)
        .map_err(|e| Fail::config(format!("{}: {e}", path.display())))?;
    let doc: GraphDoc = serde_json::from_str(&text)
        .map_err(|e| Fail::config(format!("{}: {e}", path.display())))?;
    doc.to_graph()
        .map_err(|e| Fail::config(format!("{}: {e}", path.display())))
}

fn bundle_of(w: &Window, m: u32, r_star: Option<u32>) -> Result<Option<RayBundle>, Fail> {
    let r_star = r_star.unwrap_or(w.radius / 2);
    disjoint_rays(w, m as usize, r_star).map_err(|e| Fail::config(e.to_string()))
}

fn gen(args: GenArgs) -> Result<u8, Fail> {
    let w = window_of(&args.family, args.radius)?;
    let text = match args.format {
        OutputFormat::Json => to_canonical_json(&GraphDoc::from_graph(&w.graph)),
        OutputFormat::Dot => graph_dot(&w.graph, &w.family.id_string()),
    };
    emit(&args.out, &text)?;
    Ok(0)
}

fn square(args: SquareArgs) -> Result<u8, Fail> {
    let g = load_graph(&args.input)?;
    let squared = g.square();
    let text = match args.format {
        OutputFormat::Json => to_canonical_json(&GraphDoc::from_graph(&squared)),
        OutputFormat::Dot => graph_dot(&squared, "square"),
    };
    emit(&args.out, &text)?;
    Ok(0)
}

fn rays(args: RaysArgs) -> Result<u8, Fail> {
    let w = window_of(&args.family, args.radius)?;
    let Some(bundle) = bundle_of(&w, args.m, args.r_star)? else {
        eprintln!(
            "no {} disjoint one-ended rays from radius {} in this window",
            args.m,
            args.r_star.unwrap_or(w.radius / 2)
        );
        return Ok(1);
    };
    verify_bundle(&w, &bundle)
        .map_err(|v| Fail::check(format!("bundle failed verification: {v}")))?;
    let text = match args.format {
        OutputFormat::Json => to_canonical_json(&BundleDoc::from_bundle(&bundle)),
        OutputFormat::Dot => bundle_dot(&w, &bundle),
    };
    emit(&args.out, &text)?;
    Ok(0)
}

fn build_minor(args: BuildArgs) -> Result<u8, Fail> {
    let w = window_of(&args.family, args.radius)?;
    let Some(bundle) = bundle_of(&w, args.m, args.r_star)? else {
        eprintln!(
            "no {} disjoint one-ended rays from radius {}; cannot build the model",
            args.m,
            args.r_star.unwrap_or(w.radius / 2)
        );
        return Ok(1);
    };
    let model = build_km_minor(&w, &bundle)
        .map_err(|e| Fail::check(format!("builder gave up: {e}")))?;
    verify_model(&model)
        .map_err(|v| Fail::check(format!("built model failed verification: {v}")))?;
    let text = match args.format {
        OutputFormat::Json => to_canonical_json(&ModelDoc::from_model(&model)?),
        OutputFormat::Dot => model_dot(&model),
    };
    emit(&args.out, &text)?;
    Ok(0)
}

fn parse_pattern(text: &str) -> Result<FiniteGraph, Fail> {
    let k_form = text.strip_prefix("K_").or_else(|| text.strip_prefix('K'));
    if let Some(digits) = k_form {
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            let n: u32 = digits
                .parse()
                .map_err(|_| Fail::config(format!("pattern {text:?}: order too large")))?;
            return Ok(FiniteGraph::complete(n));
        }
    }
    load_graph(Path::new(text))
}

fn oracle(args: OracleArgs) -> Result<u8, Fail> {
    let host = load_graph(&args.host)?;
    let pattern = parse_pattern(&args.pattern)?;
    let budget = SearchBudget {
        max_nodes: args.max_nodes,
        time_cap: Duration::from_secs(args.time_cap_secs),
    };
    let clock = WallClock::start();
    let (outcome, stats) = has_minor_with_clock(&host, &pattern, &budget, &clock);
    match outcome {
        MinorOutcome::Yes(model) => {
            verify_model(&model).map_err(|v| {
                Fail::config(format!("oracle returned a model that does not verify: {v}"))
            })?;
            emit(&args.out, &to_canonical_json(&ModelDoc::from_model(&model)?))?;
            eprintln!("minor found ({} search nodes)", stats.nodes);
            Ok(0)
        }
        MinorOutcome::No => {
            eprintln!("no such minor ({} search nodes)", stats.nodes);
            Ok(1)
        }
        MinorOutcome::BudgetExhausted => {
            eprintln!("undecided: budget exhausted after {} search nodes", stats.nodes);
            Ok(2)
        }
    }
}

fn variant_name(variant: BoundVariant) -> &'static str {
    match variant {
        BoundVariant::Nominal => "nominal",
        BoundVariant::Safe => "safe",
    }
}

fn bound(args: BoundArgs) -> Result<u8, Fail> {
    let gamma = parse_ratio(&args.gamma)?;
    let c = parse_ratio(&args.c)?;
    let mut lines = Vec::new();
    for variant in [BoundVariant::Nominal, BoundVariant::Safe] {
        let inputs = BoundInputs::new(args.graph_degree, args.tree_degree, gamma, c, variant)
            .map_err(|e| Fail::config(e.to_string()))?;
        let inputs = if args.round_up { inputs.rounded_up() } else { inputs };
        let report = bound_report(&inputs).map_err(|e| match e {
            BoundsError::NonIntegerLimits { .. } => {
                Fail::config(format!("{e}; pass --round-up to coarsen them"))
            }
            other => Fail::config(other.to_string()),
        })?;
        if args.round_up && (inputs.gamma != gamma || inputs.c != c) {
            lines.push(format!(
                "constants rounded up to gamma = {}, c = {}",
                ratio_display(inputs.gamma),
                ratio_display(inputs.c)
            ));
        }
        lines.push(format!(
            "{:<8} m_tree = {:<12} m_graph = {:<12} n_max = {}{}",
            variant_name(variant),
            report.m_tree,
            report.m_graph,
            report.n_max,
            if report.degenerate { "  (degenerate: a sum is empty)" } else { "" }
        ));
    }
    for line in lines {
        println!("{line}");
    }
    Ok(0)
}

fn experiment(args: ExperimentArgs) -> Result<u8, Fail> {
    let mut flags = ConfigLayer {
        name: args.name,
        kind: args.kind,
        family: args.family,
        max_nodes: args.max_nodes,
        time_cap_secs: args.time_cap_secs,
        variant: args.variant,
        out_dir: args.out_dir,
        ..ConfigLayer::default()
    };
    if let Some(radii) = &args.radii {
        let parsed: Result<Vec<u32>, _> = radii.split(',').map(|r| r.trim().parse()).collect();
        flags.radii =
            Some(parsed.map_err(|_| Fail::config(format!("radii {radii:?}: expected integers")))?);
    }
    if let Some(range) = &args.m {
        let (lo, hi) = parse_m_range(range)?;
        flags.m_min = Some(lo);
        flags.m_max = Some(hi);
    }

    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Fail::config(format!("{}: {e}", path.display())))?;
            Some(ConfigLayer::from_toml(&text).map_err(|e| Fail::config(e.to_string()))?)
        }
        None => None,
    };
    let env_out = std::env::var_os("THICKET_OUT_DIR").map(PathBuf::from);
    let cfg = ExperimentConfig::resolve(flags, file, env_out)
        .map_err(|e| Fail { code: e.exit_code(), message: e.to_string() })?;
    match run_experiment(&cfg) {
        Ok(_) => Ok(0),
        Err(e) => Err(Fail { code: e.exit_code(), message: e.to_string() }),
    }
}

fn parse_m_range(text: &str) -> Result<(u32, u32), Fail> {
    let bad = || Fail::config(format!("m range {text:?}: expected N or A..B"));
    let parse_end = |s: &str| s.trim().parse::<u32>().map_err(|_| bad());
    match text.split_once("..") {
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            Ok((parse_end(lo)?, parse_end(hi)?))
        }
        None => {
            let single = parse_end(text)?;
            Ok((single, single))
        }
    }
}
