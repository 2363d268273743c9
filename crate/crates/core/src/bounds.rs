//! Clique-minor exclusion bounds from quasi-isometry certificates.
//!
//! A [`QiCertificate`] is an explicit vertex map between two windows plus
//! constants (gamma, c) claiming the two-sided distance inequality
//!
//! ```text
//! (1/gamma) d_T(f(x), f(y)) - c  <=  d_G(x, y)  <=  gamma d_T(f(x), f(y)) + c
//! ```
//!
//! [`verify_qi`] checks the claim pair by pair. From the constants and the
//! two maximum degrees, [`clique_bound`] computes the largest order a
//! complete minor of the source graph can have when the target is a tree,
//! in two variants: the bare geometric sums of the underlying counting
//! argument, and a padded version using full ball-volume bounds. The bare
//! sums undercount real balls (see [`fiber_check`] on the ladder for a
//! direct counterexample), so [`BoundVariant::Safe`] is the default and
//! [`BoundVariant::Nominal`] is kept for comparison, flagged degenerate
//! when a sum collapses to zero.

use crate::families::{FamilyCoord, FamilySpec, Window};
use crate::graph::{FiniteGraph, VertexId};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_rational::Ratio;

pub type Ratio64 = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    /// Bare geometric series over sphere sizes. Can undercount actual
    /// balls, and collapses to zero for small constants.
    Nominal,
    /// Full ball-volume bounds `1 + D * sum` for the same radii; never
    /// below 1. The trustworthy default.
    Safe,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoundsError {
    ConstantOutOfRange(&'static str),
    DegreeOutOfRange(&'static str),
    /// The summation limits require integer `gamma + c` and `c`.
    NonIntegerLimits { which: &'static str },
    Overflow,
    SpecMismatch { expected: String, found: String },
    /// The certificate map has no image for a source-window vertex.
    MapMissesVertex { vertex: VertexId },
    /// The image of a source vertex is not a target-window vertex.
    ImageOutsideTarget { vertex: VertexId },
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::ConstantOutOfRange(what) => write!(f, "{what}"),
            BoundsError::DegreeOutOfRange(what) => write!(f, "{what}"),
            BoundsError::NonIntegerLimits { which } => write!(
                f,
                "{which} is not an integer; round the constants up first, \
                 e.g. via BoundInputs::rounded_up"
            ),
            BoundsError::Overflow => write!(f, "bound arithmetic overflowed 128 bits"),
            BoundsError::SpecMismatch { expected, found } => {
                write!(f, "window family mismatch: certificate names {expected}, window is {found}")
            }
            BoundsError::MapMissesVertex { vertex } => {
                write!(f, "certificate map has no image for source vertex {vertex}")
            }
            BoundsError::ImageOutsideTarget { vertex } => {
                write!(f, "image of source vertex {vertex} is not a target-window vertex")
            }
        }
    }
}

/// Names the graph a certificate side refers to: a family window as cut,
/// or the square of one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecRef {
    Family(FamilySpec),
    Square(FamilySpec),
}

impl SpecRef {
    pub fn family(&self) -> &FamilySpec {
        match self {
            SpecRef::Family(f) | SpecRef::Square(f) => f,
        }
    }

    pub fn id_string(&self) -> String {
        match self {
            SpecRef::Family(f) => f.id_string(),
            SpecRef::Square(f) => {
                let mut s = String::from("square:");
                s.push_str(&f.id_string());
                s
            }
        }
    }

    pub fn parse_id(s: &str) -> Result<SpecRef, crate::families::FamilyError> {
        match s.strip_prefix("square:") {
            Some(rest) => Ok(SpecRef::Square(FamilySpec::parse_id(rest)?)),
            None => Ok(SpecRef::Family(FamilySpec::parse_id(s)?)),
        }
    }

    /// Maximum degree of the referenced graph. For squares this is the
    /// generic `d + d(d-1)` estimate: exact on regular trees, an upper
    /// bound in general (which is the sound direction for the bounds).
    pub fn max_degree(&self) -> u32 {
        match self {
            SpecRef::Family(f) => f.max_degree(),
            SpecRef::Square(f) => {
                let d = f.max_degree();
                d * d
            }
        }
    }

    /// The concrete graph this side of a certificate talks about, given a
    /// window of the right family.
    pub fn realize(&self, window: &Window) -> Result<FiniteGraph, BoundsError> {
        if window.family != *self.family() {
            return Err(BoundsError::SpecMismatch {
                expected: self.id_string(),
                found: window.family.id_string(),
            });
        }
        match self {
            SpecRef::Family(_) => Ok(window.graph.clone()),
            SpecRef::Square(_) => Ok(window.graph.square()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QiCertificate {
    pub gamma: Ratio64,
    pub c: Ratio64,
    /// Total map from source-window vertex ids to target-window vertex ids.
    pub map: BTreeMap<VertexId, VertexId>,
    pub source: SpecRef,
    pub target: SpecRef,
}

impl QiCertificate {
    pub fn new(
        gamma: Ratio64,
        c: Ratio64,
        map: BTreeMap<VertexId, VertexId>,
        source: SpecRef,
        target: SpecRef,
    ) -> Result<Self, BoundsError> {
        if gamma < Ratio64::from_integer(1) {
            return Err(BoundsError::ConstantOutOfRange("gamma must be at least 1"));
        }
        if c < Ratio64::from_integer(0) {
            return Err(BoundsError::ConstantOutOfRange("c must be nonnegative"));
        }
        Ok(QiCertificate { gamma, c, map, source, target })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundInputs {
    /// Maximum degree of the graph whose minors are being bounded.
    pub graph_degree: u32,
    /// Maximum degree of the tree on the target side.
    pub tree_degree: u32,
    pub gamma: Ratio64,
    pub c: Ratio64,
    pub variant: BoundVariant,
}

impl BoundInputs {
    pub fn new(
        graph_degree: u32,
        tree_degree: u32,
        gamma: Ratio64,
        c: Ratio64,
        variant: BoundVariant,
    ) -> Result<Self, BoundsError> {
        if graph_degree < 1 {
            return Err(BoundsError::DegreeOutOfRange("graph degree must be at least 1"));
        }
        if tree_degree < 2 {
            return Err(BoundsError::DegreeOutOfRange("tree degree must be at least 2"));
        }
        if gamma < Ratio64::from_integer(1) {
            return Err(BoundsError::ConstantOutOfRange("gamma must be at least 1"));
        }
        if c < Ratio64::from_integer(0) {
            return Err(BoundsError::ConstantOutOfRange("c must be nonnegative"));
        }
        Ok(BoundInputs { graph_degree, tree_degree, gamma, c, variant })
    }

    /// Degrees from the certificate's two sides, constants copied over.
    pub fn for_certificate(
        cert: &QiCertificate,
        variant: BoundVariant,
    ) -> Result<Self, BoundsError> {
        BoundInputs::new(
            cert.source.max_degree(),
            cert.target.max_degree(),
            cert.gamma,
            cert.c,
            variant,
        )
    }

    /// Rounds the constants up onto the integer grid the summation limits
    /// need: `c` to `ceil(c)` and `gamma` to `ceil(gamma + c) - ceil(c)`,
    /// so both limits only grow. `gamma >= 1` is preserved because
    /// `ceil(gamma + c) >= 1 + ceil(c)` whenever `gamma >= 1`.
    pub fn rounded_up(&self) -> BoundInputs {
        let c = self.c.ceil();
        let gamma = (self.gamma + self.c).ceil() - c;
        BoundInputs { gamma, c, ..self.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub variant: BoundVariant,
    /// Ball-size quantity on the tree side (radius gamma + c - 1).
    pub m_tree: u128,
    /// Ball-size quantity on the graph side (radius c).
    pub m_graph: u128,
    pub n_max: u128,
    /// Set when a nominal sum collapsed to zero and the bound is vacuous.
    pub degenerate: bool,
}

fn int_limit(r: Ratio64, which: &'static str) -> Result<i64, BoundsError> {
    if !r.is_integer() {
        return Err(BoundsError::NonIntegerLimits { which });
    }
    Ok(r.to_integer())
}

/// `sum_{i=0}^{limit} base^i`, empty (0) when `limit < 0`.
fn geometric_sum(base: u128, limit: i64) -> Result<u128, BoundsError> {
    if limit < 0 {
        return Ok(0);
    }
    match base {
        0 => Ok(1),
        1 => u128::try_from(limit + 1).map_err(|_| BoundsError::Overflow),
        _ => {
            let mut total: u128 = 0;
            let mut term: u128 = 1;
            for i in 0..=limit {
                total = total.checked_add(term).ok_or(BoundsError::Overflow)?;
                if i < limit {
                    term = term.checked_mul(base).ok_or(BoundsError::Overflow)?;
                }
            }
            Ok(total)
        }
    }
}

/// The two ball-size quantities `(M_tree, M_graph)` behind the bound:
/// geometric sums over sphere sizes up to radii `gamma + c - 1` and `c`.
/// Nominal returns the bare sums (empty sums are 0); Safe pads them to the
/// full ball-volume bounds `1 + D * sum`, which are never below 1.
pub fn ball_bounds(inputs: &BoundInputs) -> Result<(u128, u128), BoundsError> {
    let tree_limit = int_limit(inputs.gamma + inputs.c, "gamma + c")?
        .checked_sub(2)
        .ok_or(BoundsError::Overflow)?;
    let graph_limit = int_limit(inputs.c, "c")?.checked_sub(1).ok_or(BoundsError::Overflow)?;
    let tree_sum = geometric_sum(u128::from(inputs.tree_degree) - 1, tree_limit)?;
    let graph_sum = geometric_sum(u128::from(inputs.graph_degree) - 1, graph_limit)?;
    match inputs.variant {
        BoundVariant::Nominal => Ok((tree_sum, graph_sum)),
        BoundVariant::Safe => {
            let pad = |d: u32, sum: u128| {
                u128::from(d)
                    .checked_mul(sum)
                    .and_then(|x| x.checked_add(1))
                    .ok_or(BoundsError::Overflow)
            };
            Ok((pad(inputs.tree_degree, tree_sum)?, pad(inputs.graph_degree, graph_sum)?))
        }
    }
}

/// Largest order a complete minor can have in a bounded-degree graph that
/// is (gamma, c)-quasi-isometric to a tree of the given maximum degree:
/// `max(2 M_tree^2 M_graph^2, M_graph (D_tree M_tree + 1))`.
pub fn clique_bound(inputs: &BoundInputs) -> Result<u128, BoundsError> {
    Ok(bound_report(inputs)?.n_max)
}

pub fn bound_report(inputs: &BoundInputs) -> Result<BoundReport, BoundsError> {
    let (m_tree, m_graph) = ball_bounds(inputs)?;
    let quad = m_tree
        .checked_mul(m_tree)
        .and_then(|x| x.checked_mul(m_graph))
        .and_then(|x| x.checked_mul(m_graph))
        .and_then(|x| x.checked_mul(2))
        .ok_or(BoundsError::Overflow)?;
    let linear = u128::from(inputs.tree_degree)
        .checked_mul(m_tree)
        .and_then(|x| x.checked_add(1))
        .and_then(|x| x.checked_mul(m_graph))
        .ok_or(BoundsError::Overflow)?;
    Ok(BoundReport {
        variant: inputs.variant,
        m_tree,
        m_graph,
        n_max: quad.max(linear),
        degenerate: m_tree == 0 || m_graph == 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IneqSide {
    /// Source distance exceeds `gamma * target distance + c`.
    Upper,
    /// Target distance exceeds `gamma * (source distance + c)`.
    Lower,
}

impl fmt::Display for IneqSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IneqSide::Upper => write!(f, "source distance above gamma * target + c"),
            IneqSide::Lower => write!(f, "target distance above gamma * (source + c)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QiViolation {
    pub x: VertexId,
    pub y: VertexId,
    pub d_source: usize,
    pub d_target: usize,
    pub side: IneqSide,
}

impl fmt::Display for QiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair ({}, {}) with source distance {} and target distance {}: {}",
            self.x, self.y, self.d_source, self.d_target, self.side
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QiOutcome {
    Holds,
    Violated(QiViolation),
}

/// Window vertices whose cut-metric distance from the root is at most half
/// the cut radius. Window distances are only guaranteed to agree with the
/// infinite family there, so certificate checks restrict to these.
fn inner_ball(window: &Window) -> Vec<VertexId> {
    let dist = window
        .graph
        .bfs_distances(window.root_id)
        .expect("window root is a window vertex");
    let cap = window.radius / 2;
    window
        .graph
        .vertices()
        .iter()
        .copied()
        .filter(|v| {
            matches!(dist[window.graph.index_of(*v).expect("own vertex")], Some(d) if d <= cap)
        })
        .collect()
}

fn check_map_total(
    cert: &QiCertificate,
    source_vertices: &[VertexId],
    target: &FiniteGraph,
) -> Result<(), BoundsError> {
    for &v in source_vertices {
        match cert.map.get(&v) {
            None => return Err(BoundsError::MapMissesVertex { vertex: v }),
            Some(&img) if !target.has_vertex(img) => {
                return Err(BoundsError::ImageOutsideTarget { vertex: v })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

/// Checks both quasi-isometry inequalities for every pair of inner-ball
/// vertices of the source window, distances measured in the realized
/// graphs. Pairs run in ascending id order and the first violation is
/// reported, upper side checked first.
pub fn verify_qi(
    cert: &QiCertificate,
    source: &Window,
    target: &Window,
) -> Result<QiOutcome, BoundsError> {
    let source_graph = cert.source.realize(source)?;
    let target_graph = cert.target.realize(target)?;
    check_map_total(cert, source.graph.vertices(), &target_graph)?;

    let inner = inner_ball(source);
    let mut target_dist: BTreeMap<VertexId, Vec<Option<u32>>> = BTreeMap::new();
    for &v in &inner {
        let img = cert.map[&v];
        target_dist
            .entry(img)
            .or_insert_with(|| target_graph.bfs_distances(img).expect("image checked above"));
    }

    for (i, &x) in inner.iter().enumerate() {
        let from_x = source_graph.bfs_distances(x).expect("inner vertex");
        let dist_from_fx = &target_dist[&cert.map[&x]];
        for &y in &inner[i + 1..] {
            let d_source = from_x[source_graph.index_of(y).expect("inner vertex")]
                .expect("windows are connected") as usize;
            let d_target = dist_from_fx[target_graph.index_of(cert.map[&y]).expect("image")]
                .expect("windows are connected") as usize;
            let dg = Ratio64::from_integer(d_source as i64);
            let dh = Ratio64::from_integer(d_target as i64);
            if dg > cert.gamma * dh + cert.c {
                return Ok(QiOutcome::Violated(QiViolation {
                    x,
                    y,
                    d_source,
                    d_target,
                    side: IneqSide::Upper,
                }));
            }
            if dh > cert.gamma * (dg + cert.c) {
                return Ok(QiOutcome::Violated(QiViolation {
                    x,
                    y,
                    d_source,
                    d_target,
                    side: IneqSide::Lower,
                }));
            }
        }
    }
    Ok(QiOutcome::Holds)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberReport {
    /// The graph-side ball bound the fibers are measured against.
    pub limit: u128,
    pub max_fiber: usize,
    /// Target vertex with the largest preimage (smallest id on ties).
    pub busiest_target: Option<VertexId>,
    pub ok: bool,
}

/// Counts preimage sizes of the certificate map over the source inner
/// ball and compares the largest against the chosen variant's `M_graph`.
/// The underlying argument needs fibers no larger than that, so an
/// oversized fiber is direct evidence against the variant's counting.
pub fn fiber_check(
    cert: &QiCertificate,
    source: &Window,
    inputs: &BoundInputs,
) -> Result<FiberReport, BoundsError> {
    let (_, m_graph) = ball_bounds(inputs)?;
    let inner = inner_ball(source);
    for &v in &inner {
        if !cert.map.contains_key(&v) {
            return Err(BoundsError::MapMissesVertex { vertex: v });
        }
    }
    let mut fibers: BTreeMap<VertexId, usize> = BTreeMap::new();
    for &v in &inner {
        *fibers.entry(cert.map[&v]).or_insert(0) += 1;
    }
    let max_fiber = fibers.values().copied().max().unwrap_or(0);
    let busiest_target = fibers
        .iter()
        .find(|(_, &n)| n == max_fiber)
        .map(|(&t, _)| t);
    Ok(FiberReport {
        limit: m_graph,
        max_fiber,
        busiest_target,
        ok: (max_fiber as u128) <= m_graph,
    })
}

fn coord_map<F>(
    source: &Window,
    target: &Window,
    image_coord: F,
) -> Result<BTreeMap<VertexId, VertexId>, BoundsError>
where
    F: Fn(&FamilyCoord) -> Option<FamilyCoord>,
{
    let index = target.coord_index();
    let mut map = BTreeMap::new();
    for (i, coord) in source.coords().iter().enumerate() {
        let v = i as VertexId;
        let img = image_coord(coord).ok_or(BoundsError::MapMissesVertex { vertex: v })?;
        let t = *index
            .get(&img)
            .ok_or(BoundsError::ImageOutsideTarget { vertex: v })?;
        map.insert(v, t);
    }
    Ok(map)
}

/// Ladder onto its base line by dropping the side: `(x, s) -> x`, with
/// gamma = 1, c = 1. The target window must be at least as wide as the
/// ladder window.
pub fn ladder_to_line_certificate(
    source: &Window,
    target: &Window,
) -> Result<QiCertificate, BoundsError> {
    let line = FamilySpec::line_z([1]).expect("constant jump set");
    if source.family != FamilySpec::ladder() || target.family != line {
        return Err(BoundsError::SpecMismatch {
            expected: String::from("ladder onto line_z:1"),
            found: source.family.id_string(),
        });
    }
    let map = coord_map(source, target, |c| match c {
        FamilyCoord::Ladder { x, .. } => Some(FamilyCoord::Line(*x)),
        _ => None,
    })?;
    QiCertificate::new(
        Ratio64::from_integer(1),
        Ratio64::from_integer(1),
        map,
        SpecRef::Family(source.family.clone()),
        SpecRef::Family(target.family.clone()),
    )
}

/// Double-jump line onto the unit line, identity on integer positions,
/// with gamma = 2, c = 0. The double-jump ball of radius r spans 2r
/// positions, so the target window needs at least twice the radius.
pub fn line_pair_certificate(
    source: &Window,
    target: &Window,
) -> Result<QiCertificate, BoundsError> {
    let double = FamilySpec::line_z([1, 2]).expect("constant jump set");
    let unit = FamilySpec::line_z([1]).expect("constant jump set");
    if source.family != double || target.family != unit {
        return Err(BoundsError::SpecMismatch {
            expected: String::from("line_z:1,2 onto line_z:1"),
            found: source.family.id_string(),
        });
    }
    let map = coord_map(source, target, |c| match c {
        FamilyCoord::Line(n) => Some(FamilyCoord::Line(*n)),
        _ => None,
    })?;
    QiCertificate::new(
        Ratio64::from_integer(2),
        Ratio64::from_integer(0),
        map,
        SpecRef::Family(source.family.clone()),
        SpecRef::Family(target.family.clone()),
    )
}

/// The square of a window onto the window itself, identity on vertices,
/// with gamma = 2, c = 0. Distances in the square are halved and rounded
/// up, so this holds for every family.
pub fn squared_window_certificate(window: &Window) -> Result<QiCertificate, BoundsError> {
    let map = window
        .graph
        .vertices()
        .iter()
        .map(|&v| (v, v))
        .collect();
    QiCertificate::new(
        Ratio64::from_integer(2),
        Ratio64::from_integer(0),
        map,
        SpecRef::Square(window.family.clone()),
        SpecRef::Family(window.family.clone()),
    )
}

/// Identity certificate of a window onto itself with chosen constants,
/// mostly for exercising the bound arithmetic end to end.
pub fn identity_certificate(
    window: &Window,
    gamma: Ratio64,
    c: Ratio64,
) -> Result<QiCertificate, BoundsError> {
    let map = window
        .graph
        .vertices()
        .iter()
        .map(|&v| (v, v))
        .collect();
    QiCertificate::new(
        gamma,
        c,
        map,
        SpecRef::Family(window.family.clone()),
        SpecRef::Family(window.family.clone()),
    )
}
