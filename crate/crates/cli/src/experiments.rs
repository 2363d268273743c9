//! Reproducible experiment runs wiring families, rays, the builder, the
//! minor oracle, and the exclusion bounds together.
//!
//! Two kinds are shipped. A `thick` run cuts windows at increasing radii,
//! asks for m disjoint coherent rays, builds a complete-minor model in the
//! window square for every m that supports one, and reports the largest
//! order that verified per radius (which must not decrease with radius).
//! A `tree` run checks a family's quasi-isometry certificate, the fiber
//! counts, both bound variants, and the Hadwiger number of each window,
//! asserting the number stays within the safe bound.
//!
//! Radii are processed concurrently up to the machine's parallelism, and
//! the report is assembled in radius order, so artifacts are deterministic:
//! `report.json` and the DOT files carry no timings, and `rows.csv` keeps
//! wall times in its final column only.

use crate::dot::model_dot;
use crate::formats::{to_canonical_json, CertificateDoc, RatioRepr};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};
use thicket_core::bounds::{
    bound_report, fiber_check, identity_certificate, ladder_to_line_certificate,
    line_pair_certificate, squared_window_certificate, verify_qi, BoundInputs, BoundReport,
    BoundVariant, BoundsError, QiCertificate, QiOutcome, Ratio64,
};
use thicket_core::builder::build_km_minor;
use thicket_core::families::{cut_window, FamilyError, FamilySpec, Window};
use thicket_core::oracle::{
    hadwiger_number_with_clock, verify_model, Clock, HadwigerResult, SearchBudget,
};
use thicket_core::rays::disjoint_rays;

/// Coherence radius used for every thick-side ray search. Small on purpose:
/// rays reaching back to the sphere of radius two are as long as the window
/// allows, which is what gives the builder room for the larger orders.
const THICK_COHERENCE_RADIUS: u32 = 2;

/// Real elapsed time since construction, for oracle time caps.
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Thick,
    Tree,
}

impl ExperimentKind {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        match text {
            "thick" => Ok(ExperimentKind::Thick),
            "tree" => Ok(ExperimentKind::Tree),
            other => Err(RunError::Config(format!(
                "kind must be \"thick\" or \"tree\", got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentKind::Thick => write!(f, "thick"),
            ExperimentKind::Tree => write!(f, "tree"),
        }
    }
}

pub fn parse_variant(text: &str) -> Result<BoundVariant, RunError> {
    match text {
        "nominal" => Ok(BoundVariant::Nominal),
        "safe" => Ok(BoundVariant::Safe),
        other => Err(RunError::Config(format!(
            "variant must be \"nominal\" or \"safe\", got {other:?}"
        ))),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// 1 = a theorem-level check failed, 2 = out of budget, 3 = bad config
    /// or environment.
    pub fn exit_code(&self) -> u8 {
        match self {
            RunError::Assertion(_) => 1,
            RunError::Budget(_) => 2,
            RunError::Config(_) | RunError::Io(_) => 3,
        }
    }
}

fn config_err(e: impl fmt::Display) -> RunError {
    RunError::Config(e.to_string())
}

/// One layer of settings: a config file, or the command-line flags laid
/// over it. Unknown fields in a file are rejected outright.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub name: Option<String>,
    pub kind: Option<String>,
    pub family: Option<String>,
    pub radii: Option<Vec<u32>>,
    pub m_min: Option<u32>,
    pub m_max: Option<u32>,
    pub max_nodes: Option<u64>,
    pub time_cap_secs: Option<u64>,
    pub variant: Option<String>,
    pub out_dir: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(config_err)
    }

    fn or(self, under: ConfigLayer) -> ConfigLayer {
        ConfigLayer {
            name: self.name.or(under.name),
            kind: self.kind.or(under.kind),
            family: self.family.or(under.family),
            radii: self.radii.or(under.radii),
            m_min: self.m_min.or(under.m_min),
            m_max: self.m_max.or(under.m_max),
            max_nodes: self.max_nodes.or(under.max_nodes),
            time_cap_secs: self.time_cap_secs.or(under.time_cap_secs),
            variant: self.variant.or(under.variant),
            out_dir: self.out_dir.or(under.out_dir),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub name: String,
    pub kind: ExperimentKind,
    pub family: FamilySpec,
    pub radii: Vec<u32>,
    pub m_min: u32,
    pub m_max: u32,
    pub max_nodes: u64,
    pub time_cap_secs: u64,
    pub variant: BoundVariant,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Flags win over the file; the environment only supplies a fallback
    /// output directory; everything else has a default.
    pub fn resolve(
        flags: ConfigLayer,
        file: Option<ConfigLayer>,
        env_out_dir: Option<PathBuf>,
    ) -> Result<ExperimentConfig, RunError> {
        let merged = flags.or(file.unwrap_or_default());
        let kind = ExperimentKind::parse(
            merged.kind.as_deref().ok_or_else(|| {
                RunError::Config(String::from("missing experiment kind (thick or tree)"))
            })?,
        )?;
        let family_id = merged.family.unwrap_or_else(|| {
            String::from(match kind {
                ExperimentKind::Thick => "grid_z2",
                ExperimentKind::Tree => "ladder",
            })
        });
        let family = FamilySpec::parse_id(&family_id)
            .map_err(|e| RunError::Config(format!("family: {e}")))?;
        let radii = merged.radii.unwrap_or_else(|| match kind {
            ExperimentKind::Thick => vec![6, 8, 10],
            ExperimentKind::Tree => vec![4, 6, 8],
        });
        if radii.is_empty() {
            return Err(RunError::Config(String::from("radii must be nonempty")));
        }
        if !radii.windows(2).all(|w| w[0] < w[1]) {
            return Err(RunError::Config(format!("radii must be strictly ascending, got {radii:?}")));
        }
        let m_min = merged.m_min.unwrap_or(2);
        let m_max = merged.m_max.unwrap_or(24);
        if m_min < 1 || m_min > m_max {
            return Err(RunError::Config(format!(
                "m range must satisfy 1 <= m_min <= m_max, got {m_min}..{m_max}"
            )));
        }
        let max_nodes = merged.max_nodes.unwrap_or(1_000_000);
        if max_nodes < 1 {
            return Err(RunError::Config(String::from("max_nodes must be at least 1")));
        }
        let variant = parse_variant(merged.variant.as_deref().unwrap_or("safe"))?;
        let name = merged.name.unwrap_or_else(|| {
            let slug: String = family_id
                .chars()
                .map(|ch| if ch == ':' || ch == ',' { '-' } else { ch })
                .collect();
            format!("{kind}-{slug}")
        });
        let out_dir = merged
            .out_dir
            .or(env_out_dir)
            .unwrap_or_else(|| PathBuf::from("thicket-out"));
        Ok(ExperimentConfig {
            name,
            kind,
            family,
            radii,
            m_min,
            m_max,
            max_nodes,
            time_cap_secs: merged.time_cap_secs.unwrap_or(60),
            variant,
            out_dir,
        })
    }

    fn budget(&self) -> SearchBudget {
        SearchBudget {
            max_nodes: self.max_nodes,
            time_cap: Duration::from_secs(self.time_cap_secs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub radius: u32,
    /// Attempted order on thick runs; the Hadwiger value on tree runs.
    pub m: u32,
    pub ray_found: bool,
    pub built: bool,
    pub verified: bool,
    pub oracle_nodes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LargestVerified {
    pub radius: u32,
    pub m: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThickSummary {
    pub largest_verified: Vec<LargestVerified>,
    pub nondecreasing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCells {
    pub m_tree: u128,
    pub m_graph: u128,
    pub n_max: u128,
    pub degenerate: bool,
}

impl BoundCells {
    fn of(report: &BoundReport) -> BoundCells {
        BoundCells {
            m_tree: report.m_tree,
            m_graph: report.m_graph,
            n_max: report.n_max,
            degenerate: report.degenerate,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeRow {
    pub radius: u32,
    pub qi_holds: bool,
    pub max_fiber: usize,
    pub fiber_ok_nominal: bool,
    pub fiber_ok_safe: bool,
    pub nominal: BoundCells,
    pub safe: BoundCells,
    pub hadwiger: usize,
    pub hadwiger_exact: bool,
    pub within_safe: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TreeSummary {
    pub source: String,
    pub target: String,
    pub gamma: RatioRepr,
    pub c: RatioRepr,
    pub per_radius: Vec<TreeRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub kind: ExperimentKind,
    pub family: String,
    pub radii: Vec<u32>,
    pub m_min: u32,
    pub m_max: u32,
    pub max_nodes: u64,
    pub rows: Vec<ReportRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thick: Option<ThickSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeSummary>,
}

struct RunArtifacts {
    report: ExperimentReport,
    /// (row, milliseconds) pairs; wall time stays out of the report.
    timed_rows: Vec<(ReportRow, u128)>,
    /// Extra files beyond report.json and rows.csv: (name, content).
    files: Vec<(String, String)>,
    /// Failure to surface after artifacts are written.
    deferred: Option<RunError>,
}

/// Runs one job per radius, at most a machine's worth at a time, and
/// returns the results in radius order: rows are computed concurrently but
/// the reduction is deterministic.
fn per_radius<T, F>(radii: &[u32], job: F) -> Vec<T>
where
    T: Send,
    F: Fn(u32) -> T + Sync,
{
    let cap = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let mut out = Vec::with_capacity(radii.len());
    for chunk in radii.chunks(cap.max(1)) {
        let mut batch: Vec<T> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|&radius| {
                    let job = &job;
                    scope.spawn(move || job(radius))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("radius worker panicked"))
                .collect()
        });
        out.append(&mut batch);
    }
    out
}

/// Runs the experiment, writes `report.json`, `rows.csv`, and any DOT or
/// certificate files into the output directory, prints a summary, and
/// returns the report. Assertion and budget failures are surfaced after
/// the artifacts are on disk so the evidence survives.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, RunError> {
    fs::create_dir_all(&cfg.out_dir)?;
    let artifacts = match cfg.kind {
        ExperimentKind::Thick => run_thick(cfg)?,
        ExperimentKind::Tree => run_tree(cfg)?,
    };
    fs::write(
        cfg.out_dir.join("report.json"),
        to_canonical_json(&artifacts.report),
    )?;
    let mut csv = String::from("radius,m,ray_found,built,verified,oracle_nodes,millis\n");
    for (row, millis) in &artifacts.timed_rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.radius, row.m, row.ray_found, row.built, row.verified, row.oracle_nodes, millis
        ));
    }
    fs::write(cfg.out_dir.join("rows.csv"), csv)?;
    for (name, content) in &artifacts.files {
        fs::write(cfg.out_dir.join(name), content)?;
    }
    print_summary(cfg, &artifacts.report);
    match artifacts.deferred {
        Some(err) => Err(err),
        None => Ok(artifacts.report),
    }
}

fn print_summary(cfg: &ExperimentConfig, report: &ExperimentReport) {
    println!("experiment {} ({} rows)", report.name, report.rows.len());
    if let Some(thick) = &report.thick {
        for entry in &thick.largest_verified {
            match entry.m {
                Some(m) => println!("  radius {:>3}: largest verified order {}", entry.radius, m),
                None => println!("  radius {:>3}: no order verified", entry.radius),
            }
        }
        println!("  nondecreasing: {}", thick.nondecreasing);
    }
    if let Some(tree) = &report.tree {
        for row in &tree.per_radius {
            println!(
                "  radius {:>3}: hadwiger {}{}, safe bound {}, qi {}, max fiber {}",
                row.radius,
                row.hadwiger,
                if row.hadwiger_exact { "" } else { " (lower bound)" },
                row.safe.n_max,
                if row.qi_holds { "holds" } else { "VIOLATED" },
                row.max_fiber,
            );
        }
    }
    println!("  artifacts in {}", cfg.out_dir.display());
}

struct ThickRadius {
    rows: Vec<(ReportRow, u128)>,
    files: Vec<(String, String)>,
    best: Option<u32>,
}

fn thick_radius(cfg: &ExperimentConfig, radius: u32) -> Result<ThickRadius, RunError> {
    let w = cut_window(&cfg.family, radius).map_err(config_err)?;
    let r_star = THICK_COHERENCE_RADIUS.min(radius);
    let mut rows = Vec::new();
    let mut files = Vec::new();
    let mut best = None;
    for m in cfg.m_min..=cfg.m_max {
        let t0 = Instant::now();
        let bundle = disjoint_rays(&w, m as usize, r_star).map_err(config_err)?;
        let (ray_found, built, verified) = match &bundle {
            None => (false, false, false),
            Some(b) => match build_km_minor(&w, b) {
                Err(_) => (true, false, false),
                Ok(model) => {
                    if let Err(v) = verify_model(&model) {
                        return Err(RunError::Assertion(format!(
                            "model built at radius {radius}, order {m} failed verification: {v}"
                        )));
                    }
                    files.push((format!("model_r{radius}_m{m}.dot"), model_dot(&model)));
                    (true, true, true)
                }
            },
        };
        rows.push((
            ReportRow { radius, m, ray_found, built, verified, oracle_nodes: 0 },
            t0.elapsed().as_millis(),
        ));
        if verified {
            best = Some(m);
        }
        if !ray_found {
            break;
        }
    }
    Ok(ThickRadius { rows, files, best })
}

fn run_thick(cfg: &ExperimentConfig) -> Result<RunArtifacts, RunError> {
    let outcomes = per_radius(&cfg.radii, |radius| thick_radius(cfg, radius));
    let mut timed_rows = Vec::new();
    let mut files = Vec::new();
    let mut largest = Vec::new();
    for (outcome, &radius) in outcomes.into_iter().zip(&cfg.radii) {
        let mut part = outcome?;
        timed_rows.append(&mut part.rows);
        files.append(&mut part.files);
        largest.push(LargestVerified { radius, m: part.best });
    }
    let nondecreasing = largest
        .windows(2)
        .all(|w| w[0].m.unwrap_or(0) <= w[1].m.unwrap_or(0));
    let deferred = if nondecreasing {
        None
    } else {
        Some(RunError::Assertion(String::from(
            "largest verified order decreased with the window radius",
        )))
    };
    let report = ExperimentReport {
        name: cfg.name.clone(),
        kind: cfg.kind,
        family: cfg.family.id_string(),
        radii: cfg.radii.clone(),
        m_min: cfg.m_min,
        m_max: cfg.m_max,
        max_nodes: cfg.max_nodes,
        rows: timed_rows.iter().map(|(r, _)| r.clone()).collect(),
        thick: Some(ThickSummary { largest_verified: largest, nondecreasing }),
        tree: None,
    };
    Ok(RunArtifacts { report, timed_rows, files, deferred })
}

/// The shipped certificate for a tree-side family: ladder and double-jump
/// line map onto the unit line; tree-like families map onto themselves
/// (squares of regular trees via the halved-distance certificate, plain
/// trees via the identity).
fn tree_side_setup(
    family: &FamilySpec,
    radius: u32,
) -> Result<(Window, Window, QiCertificate), RunError> {
    let conf = |e: FamilyError| config_err(e);
    let cert_err = |e: BoundsError| config_err(e);
    let source = cut_window(family, radius).map_err(conf)?;
    let id = family.id_string();
    if id == "ladder" {
        let line = FamilySpec::line_z([1]).expect("constant jump set");
        let target = cut_window(&line, radius).map_err(conf)?;
        let cert = ladder_to_line_certificate(&source, &target).map_err(cert_err)?;
        return Ok((source, target, cert));
    }
    if id == "line_z:1,2" {
        let line = FamilySpec::line_z([1]).expect("constant jump set");
        let target = cut_window(&line, 2 * radius).map_err(conf)?;
        let cert = line_pair_certificate(&source, &target).map_err(cert_err)?;
        return Ok((source, target, cert));
    }
    if id.starts_with("regular_tree:") {
        let cert = squared_window_certificate(&source).map_err(cert_err)?;
        let target = source.clone();
        return Ok((source, target, cert));
    }
    if id == "line_z:1" || id.starts_with("free_product:") {
        let cert = identity_certificate(
            &source,
            Ratio64::from_integer(1),
            Ratio64::from_integer(0),
        )
        .map_err(cert_err)?;
        let target = source.clone();
        return Ok((source, target, cert));
    }
    Err(RunError::Config(format!(
        "no tree-side certificate is shipped for family {id}"
    )))
}

struct TreeRadius {
    row: (ReportRow, u128),
    files: Vec<(String, String)>,
    detail: TreeRow,
    head: (String, String, Ratio64, Ratio64),
    assertion: Option<String>,
    budget: Option<String>,
}

fn tree_radius(cfg: &ExperimentConfig, radius: u32) -> Result<TreeRadius, RunError> {
    let (source, target, cert) = tree_side_setup(&cfg.family, radius)?;
    let head = (
        cert.source.id_string(),
        cert.target.id_string(),
        cert.gamma,
        cert.c,
    );
    let files = vec![(
        format!("certificate_r{radius}.json"),
        to_canonical_json(&CertificateDoc::from_certificate(&cert)),
    )];
    let mut assertion = None;
    let mut budget = None;

    let t0 = Instant::now();
    let qi = verify_qi(&cert, &source, &target).map_err(config_err)?;
    let qi_holds = matches!(qi, QiOutcome::Holds);
    if let QiOutcome::Violated(v) = &qi {
        assertion = Some(format!("certificate violated at radius {radius}: {v}"));
    }

    let nominal_inputs =
        BoundInputs::for_certificate(&cert, BoundVariant::Nominal).map_err(config_err)?;
    let safe_inputs =
        BoundInputs::for_certificate(&cert, BoundVariant::Safe).map_err(config_err)?;
    let nominal = bound_report(&nominal_inputs).map_err(config_err)?;
    let safe = bound_report(&safe_inputs).map_err(config_err)?;
    let fib_nominal = fiber_check(&cert, &source, &nominal_inputs).map_err(config_err)?;
    let fib_safe = fiber_check(&cert, &source, &safe_inputs).map_err(config_err)?;
    if !fib_safe.ok && assertion.is_none() {
        assertion = Some(format!(
            "fiber size {} exceeds the safe bound {} at radius {radius}",
            fib_safe.max_fiber, fib_safe.limit
        ));
    }

    let host = cert.source.realize(&source).map_err(config_err)?;
    let clock = WallClock::start();
    let (result, stats) = hadwiger_number_with_clock(&host, &cfg.budget(), &clock);
    let (hadwiger, exact) = match result {
        HadwigerResult::Exact(n) => (n, true),
        HadwigerResult::LowerBound(n) => (n, false),
    };
    if !exact {
        budget = Some(format!(
            "hadwiger search at radius {radius} stopped at a lower bound of {hadwiger}"
        ));
    }
    let within_safe = (hadwiger as u128) <= safe.n_max;
    if !within_safe && assertion.is_none() {
        assertion = Some(format!(
            "hadwiger number {hadwiger} exceeds the safe bound {} at radius {radius}",
            safe.n_max
        ));
    }

    Ok(TreeRadius {
        row: (
            ReportRow {
                radius,
                m: hadwiger as u32,
                ray_found: false,
                built: false,
                verified: exact,
                oracle_nodes: stats.nodes,
            },
            t0.elapsed().as_millis(),
        ),
        files,
        detail: TreeRow {
            radius,
            qi_holds,
            max_fiber: fib_safe.max_fiber,
            fiber_ok_nominal: fib_nominal.ok,
            fiber_ok_safe: fib_safe.ok,
            nominal: BoundCells::of(&nominal),
            safe: BoundCells::of(&safe),
            hadwiger,
            hadwiger_exact: exact,
            within_safe,
        },
        head,
        assertion,
        budget,
    })
}

fn run_tree(cfg: &ExperimentConfig) -> Result<RunArtifacts, RunError> {
    let outcomes = per_radius(&cfg.radii, |radius| tree_radius(cfg, radius));
    let mut timed_rows = Vec::new();
    let mut files = Vec::new();
    let mut per_radius_rows = Vec::new();
    let mut head = None;
    let mut assertion: Option<String> = None;
    let mut budget: Option<String> = None;
    for outcome in outcomes {
        let mut part = outcome?;
        timed_rows.push(part.row);
        files.append(&mut part.files);
        per_radius_rows.push(part.detail);
        head.get_or_insert(part.head);
        if let Some(msg) = part.assertion {
            assertion.get_or_insert(msg);
        }
        if let Some(msg) = part.budget {
            budget.get_or_insert(msg);
        }
    }
    let (source_id, target_id, gamma, c) = head.expect("radii validated nonempty");
    let deferred = match (assertion, budget) {
        (Some(msg), _) => Some(RunError::Assertion(msg)),
        (None, Some(msg)) => Some(RunError::Budget(msg)),
        (None, None) => None,
    };
    let report = ExperimentReport {
        name: cfg.name.clone(),
        kind: cfg.kind,
        family: cfg.family.id_string(),
        radii: cfg.radii.clone(),
        m_min: cfg.m_min,
        m_max: cfg.m_max,
        max_nodes: cfg.max_nodes,
        rows: timed_rows.iter().map(|(r, _)| r.clone()).collect(),
        thick: None,
        tree: Some(TreeSummary {
            source: source_id,
            target: target_id,
            gamma: RatioRepr(gamma),
            c: RatioRepr(c),
            per_radius: per_radius_rows,
        }),
    };
    Ok(RunArtifacts { report, timed_rows, files, deferred })
}
