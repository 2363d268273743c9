//! Implicit generators for infinite vertex-transitive graph families and the
//! machinery that cuts finite metric balls ("windows") out of them.
//!
//! Every family exposes a root and a neighbor rule with a fixed canonical
//! order. Windows number vertices 0, 1, 2, ... in BFS discovery order from
//! the root, so the numbering of a window of radius r is a prefix of the
//! numbering of any larger window of the same family.

use crate::graph::{FiniteGraph, GraphError, VertexId};
use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

/// Default cap on window size before cutting reports a resource error.
pub const DEFAULT_VERTEX_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyError {
    /// regular_tree needs degree >= 2 to be infinite.
    DegreeTooSmall(u32),
    /// line_z needs a non-empty set of positive jump lengths.
    EmptyGenerators,
    ZeroGenerator,
    /// free_product_demo needs at least one generator.
    RankTooSmall,
    /// The requested window would exceed the vertex budget.
    WindowBudgetExceeded { radius: u32, budget: usize },
    /// A family id string did not parse.
    BadFamilyId(String),
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::DegreeTooSmall(d) => {
                write!(f, "regular_tree degree must be at least 2, got {d}")
            }
            FamilyError::EmptyGenerators => write!(f, "line_z needs at least one jump length"),
            FamilyError::ZeroGenerator => write!(f, "line_z jump lengths must be positive"),
            FamilyError::RankTooSmall => write!(f, "free_product_demo rank must be at least 1"),
            FamilyError::WindowBudgetExceeded { radius, budget } => write!(
                f,
                "window of radius {radius} exceeds the vertex budget of {budget}"
            ),
            FamilyError::BadFamilyId(s) => write!(f, "unrecognized family id '{s}'"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum FamilyKind {
    /// Integer grid Z^2 with unit steps.
    GridZ2,
    /// Infinite d-regular tree.
    RegularTree { degree: u32 },
    /// Integers with jumps +-s for each s in a fixed set.
    LineZ { jumps: Vec<u32> },
    /// Z x K2.
    Ladder,
    /// 2k-regular tree presented as reduced words over k free generators.
    FreeProductDemo { rank: u32 },
}

/// A validated family description.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FamilySpec {
    kind: FamilyKind,
}

/// Coordinates of a vertex inside its family.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FamilyCoord {
    Grid { x: i64, y: i64 },
    Line(i64),
    /// Rail position and side (0 or 1).
    Ladder { x: i64, side: u8 },
    /// Child indices along the path from the root.
    TreePath(Vec<u8>),
    /// Reduced word; letter g in 1..=rank, negative for the inverse.
    Word(Vec<i32>),
}

impl FamilySpec {
    pub fn grid_z2() -> Self {
        FamilySpec { kind: FamilyKind::GridZ2 }
    }

    pub fn regular_tree(degree: u32) -> Result<Self, FamilyError> {
        if degree < 2 {
            return Err(FamilyError::DegreeTooSmall(degree));
        }
        Ok(FamilySpec { kind: FamilyKind::RegularTree { degree } })
    }

    pub fn line_z<I: IntoIterator<Item = u32>>(jumps: I) -> Result<Self, FamilyError> {
        let set: BTreeSet<u32> = jumps.into_iter().collect();
        if set.is_empty() {
            return Err(FamilyError::EmptyGenerators);
        }
        if set.contains(&0) {
            return Err(FamilyError::ZeroGenerator);
        }
        Ok(FamilySpec { kind: FamilyKind::LineZ { jumps: set.into_iter().collect() } })
    }

    pub fn ladder() -> Self {
        FamilySpec { kind: FamilyKind::Ladder }
    }

    pub fn free_product_demo(rank: u32) -> Result<Self, FamilyError> {
        if rank < 1 {
            return Err(FamilyError::RankTooSmall);
        }
        Ok(FamilySpec { kind: FamilyKind::FreeProductDemo { rank } })
    }

    /// Degree bound of the infinite family (attained at every vertex).
    pub fn max_degree(&self) -> u32 {
        match &self.kind {
            FamilyKind::GridZ2 => 4,
            FamilyKind::RegularTree { degree } => *degree,
            FamilyKind::LineZ { jumps } => 2 * jumps.len() as u32,
            FamilyKind::Ladder => 3,
            FamilyKind::FreeProductDemo { rank } => 2 * rank,
        }
    }

    /// Canonical id string, also accepted by [`FamilySpec::parse_id`].
    pub fn id_string(&self) -> String {
        match &self.kind {
            FamilyKind::GridZ2 => String::from("grid_z2"),
            FamilyKind::RegularTree { degree } => format!("regular_tree:{degree}"),
            FamilyKind::LineZ { jumps } => {
                let parts: Vec<String> = jumps.iter().map(|s| format!("{s}")).collect();
                format!("line_z:{}", parts.join(","))
            }
            FamilyKind::Ladder => String::from("ladder"),
            FamilyKind::FreeProductDemo { rank } => format!("free_product:{rank}"),
        }
    }

    /// Parses ids of the shape `grid_z2`, `regular_tree:3`, `line_z:1,2`,
    /// `ladder`, `free_product:2`.
    pub fn parse_id(s: &str) -> Result<Self, FamilyError> {
        let bad = || FamilyError::BadFamilyId(String::from(s));
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        match (name, param) {
            ("grid_z2", None) => Ok(FamilySpec::grid_z2()),
            ("ladder", None) => Ok(FamilySpec::ladder()),
            ("regular_tree", Some(p)) => {
                let d: u32 = p.parse().map_err(|_| bad())?;
                FamilySpec::regular_tree(d)
            }
            ("free_product", Some(p)) => {
                let k: u32 = p.parse().map_err(|_| bad())?;
                FamilySpec::free_product_demo(k)
            }
            ("line_z", Some(p)) => {
                let jumps: Result<Vec<u32>, _> =
                    p.split(',').map(|t| t.trim().parse::<u32>()).collect();
                FamilySpec::line_z(jumps.map_err(|_| bad())?)
            }
            _ => Err(bad()),
        }
    }

    fn root(&self) -> FamilyCoord {
        match &self.kind {
            FamilyKind::GridZ2 => FamilyCoord::Grid { x: 0, y: 0 },
            FamilyKind::RegularTree { .. } => FamilyCoord::TreePath(Vec::new()),
            FamilyKind::LineZ { .. } => FamilyCoord::Line(0),
            FamilyKind::Ladder => FamilyCoord::Ladder { x: 0, side: 0 },
            FamilyKind::FreeProductDemo { .. } => FamilyCoord::Word(Vec::new()),
        }
    }

    /// Neighbors of a coordinate in the fixed canonical order:
    /// grid east/west/north/south; ladder east/west/across; line +-s by
    /// ascending jump; tree parent then children; words a1, a1^-1, a2, ...
    fn neighbors(&self, c: &FamilyCoord) -> Vec<FamilyCoord> {
        match (&self.kind, c) {
            (FamilyKind::GridZ2, FamilyCoord::Grid { x, y }) => vec![
                FamilyCoord::Grid { x: x + 1, y: *y },
                FamilyCoord::Grid { x: x - 1, y: *y },
                FamilyCoord::Grid { x: *x, y: y + 1 },
                FamilyCoord::Grid { x: *x, y: y - 1 },
            ],
            (FamilyKind::Ladder, FamilyCoord::Ladder { x, side }) => vec![
                FamilyCoord::Ladder { x: x + 1, side: *side },
                FamilyCoord::Ladder { x: x - 1, side: *side },
                FamilyCoord::Ladder { x: *x, side: 1 - side },
            ],
            (FamilyKind::LineZ { jumps }, FamilyCoord::Line(n)) => jumps
                .iter()
                .flat_map(|&s| [FamilyCoord::Line(n + s as i64), FamilyCoord::Line(n - s as i64)])
                .collect(),
            (FamilyKind::RegularTree { degree }, FamilyCoord::TreePath(path)) => {
                let mut out = Vec::new();
                let child_count = if path.is_empty() { *degree } else { *degree - 1 };
                if let Some((_, parent)) = path.split_last() {
                    out.push(FamilyCoord::TreePath(parent.to_vec()));
                }
                for j in 0..child_count {
                    let mut child = path.clone();
                    child.push(j as u8);
                    out.push(FamilyCoord::TreePath(child));
                }
                out
            }
            (FamilyKind::FreeProductDemo { rank }, FamilyCoord::Word(w)) => (1..=*rank as i32)
                .flat_map(|g| {
                    [g, -g].map(|letter| {
                        let mut next = w.clone();
                        if next.last() == Some(&-letter) {
                            next.pop();
                        } else {
                            next.push(letter);
                        }
                        FamilyCoord::Word(next)
                    })
                })
                .collect(),
            _ => unreachable!("coordinate kind matches family kind"),
        }
    }

    fn label(&self, c: &FamilyCoord) -> String {
        match c {
            FamilyCoord::Grid { x, y } => format!("({x},{y})"),
            FamilyCoord::Line(n) => format!("{n}"),
            FamilyCoord::Ladder { x, side } => format!("({x},{side})"),
            FamilyCoord::TreePath(path) => {
                if path.is_empty() {
                    String::from("root")
                } else {
                    let parts: Vec<String> = path.iter().map(|j| format!("{j}")).collect();
                    parts.join(".")
                }
            }
            FamilyCoord::Word(w) => {
                if w.is_empty() {
                    String::from("e")
                } else {
                    let parts: Vec<String> = w.iter().map(|g| format!("{g}")).collect();
                    parts.join(".")
                }
            }
        }
    }
}

/// A finite metric ball cut from a family, with BFS-canonical numbering.
///
/// The graph is exactly the subgraph induced by all vertices at distance at
/// most `radius` from the family root; `boundary` holds the vertices at
/// distance exactly `radius`. The root always receives id 0.
#[derive(Debug, Clone)]
pub struct Window {
    pub family: FamilySpec,
    pub graph: FiniteGraph,
    pub radius: u32,
    pub root_id: VertexId,
    pub boundary: BTreeSet<VertexId>,
    coords: Vec<FamilyCoord>,
}

impl Window {
    /// Family coordinates aligned with vertex ids.
    pub fn coords(&self) -> &[FamilyCoord] {
        &self.coords
    }

    pub fn coord_of(&self, v: VertexId) -> Option<&FamilyCoord> {
        self.coords.get(v as usize)
    }

    /// Reverse lookup from coordinate to window vertex id.
    pub fn coord_index(&self) -> BTreeMap<&FamilyCoord, VertexId> {
        self.coords
            .iter()
            .enumerate()
            .map(|(i, c)| (c, i as VertexId))
            .collect()
    }

    /// Low-level constructor for hand-built fixtures in tests.
    #[allow(dead_code)]
    pub(crate) fn from_parts(
        family: FamilySpec,
        graph: FiniteGraph,
        radius: u32,
        boundary: BTreeSet<VertexId>,
        coords: Vec<FamilyCoord>,
    ) -> Self {
        Window { family, graph, radius, root_id: 0, boundary, coords }
    }
}

/// Cuts the metric ball of the given radius with the default vertex budget.
pub fn cut_window(spec: &FamilySpec, radius: u32) -> Result<Window, FamilyError> {
    cut_window_with_budget(spec, radius, DEFAULT_VERTEX_BUDGET)
}

/// Cuts the metric ball of the given radius, failing once more than `budget`
/// vertices would be needed.
pub fn cut_window_with_budget(
    spec: &FamilySpec,
    radius: u32,
    budget: usize,
) -> Result<Window, FamilyError> {
    let mut ids: BTreeMap<FamilyCoord, VertexId> = BTreeMap::new();
    let mut coords: Vec<FamilyCoord> = Vec::new();
    let mut dist: Vec<u32> = Vec::new();
    let root = spec.root();
    ids.insert(root.clone(), 0);
    coords.push(root.clone());
    dist.push(0);

    let mut queue: VecDeque<usize> = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        if dist[i] == radius {
            continue;
        }
        let here = coords[i].clone();
        for nb in spec.neighbors(&here) {
            if ids.contains_key(&nb) {
                continue;
            }
            if coords.len() >= budget {
                return Err(FamilyError::WindowBudgetExceeded { radius, budget });
            }
            let id = coords.len() as VertexId;
            ids.insert(nb.clone(), id);
            coords.push(nb);
            dist.push(dist[i] + 1);
            queue.push_back(id as usize);
        }
    }

    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (i, c) in coords.iter().enumerate() {
        for nb in spec.neighbors(c) {
            if let Some(&j) = ids.get(&nb) {
                if (i as VertexId) < j {
                    edges.push((i as VertexId, j));
                }
            }
        }
    }

    let graph = FiniteGraph::new(0..coords.len() as VertexId, edges)
        .and_then(|g| {
            let labels = coords
                .iter()
                .enumerate()
                .map(|(i, c)| (i as VertexId, spec.label(c)));
            g.with_labels(labels)
        })
        .map_err(|e: GraphError| unreachable_family_bug(e))?;

    let boundary: BTreeSet<VertexId> = dist
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == radius)
        .map(|(i, _)| i as VertexId)
        .collect();

    Ok(Window { family: spec.clone(), graph, radius, root_id: 0, boundary, coords })
}

fn unreachable_family_bug(e: GraphError) -> FamilyError {
    // Family neighbor rules are symmetric and loop-free, so the window graph
    // is always simple; reaching this is a generator bug.
    unreachable!("family generator produced a malformed graph: {e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_window_radius_one() {
        let w = cut_window(&FamilySpec::grid_z2(), 1).unwrap();
        assert_eq!(w.graph.vertex_count(), 5);
        assert_eq!(w.graph.edge_count(), 4);
        assert_eq!(w.root_id, 0);
        assert_eq!(w.boundary, (1..5).collect());
        assert_eq!(w.graph.label(0), Some("(0,0)"));
    }

    #[test]
    fn grid_window_radius_two() {
        let w = cut_window(&FamilySpec::grid_z2(), 2).unwrap();
        assert_eq!(w.graph.vertex_count(), 13);
    }

    #[test]
    fn grid_ball_sizes_match_closed_form() {
        for r in 0..=20u32 {
            let w = cut_window(&FamilySpec::grid_z2(), r).unwrap();
            let expected = 2 * r * r + 2 * r + 1;
            assert_eq!(w.graph.vertex_count() as u32, expected, "radius {r}");
        }
    }

    #[test]
    fn tree_ball_sizes() {
        // d-regular tree: |B(r)| = 1 + d * ((d-1)^r - 1) / (d - 2) for d > 2.
        let spec = FamilySpec::regular_tree(3).unwrap();
        for r in 0..=6u32 {
            let w = cut_window(&spec, r).unwrap();
            let expected: u32 = 1 + 3 * (2u32.pow(r) - 1);
            assert_eq!(w.graph.vertex_count() as u32, expected, "radius {r}");
        }
    }

    #[test]
    fn window_numbering_nests() {
        for (spec, small, large) in [
            (FamilySpec::grid_z2(), 2u32, 5u32),
            (FamilySpec::regular_tree(3).unwrap(), 2, 4),
            (FamilySpec::line_z([1, 2]).unwrap(), 3, 6),
            (FamilySpec::ladder(), 3, 7),
            (FamilySpec::free_product_demo(2).unwrap(), 2, 3),
        ] {
            let a = cut_window(&spec, small).unwrap();
            let b = cut_window(&spec, large).unwrap();
            let n = a.graph.vertex_count();
            assert_eq!(a.coords(), &b.coords()[..n], "{}", spec.id_string());
            // Induced subgraph on the shared prefix agrees.
            let keep: BTreeSet<VertexId> = (0..n as VertexId).collect();
            let induced = b.graph.induced_subgraph(&keep).unwrap();
            assert_eq!(induced.edges(), a.graph.edges(), "{}", spec.id_string());
        }
    }

    #[test]
    fn degrees_are_attained_and_bounded() {
        for (spec, radius) in [
            (FamilySpec::grid_z2(), 3u32),
            (FamilySpec::regular_tree(4).unwrap(), 3),
            (FamilySpec::line_z([1, 3]).unwrap(), 6),
            (FamilySpec::ladder(), 4),
            (FamilySpec::free_product_demo(2).unwrap(), 3),
        ] {
            let w = cut_window(&spec, radius).unwrap();
            let cap = spec.max_degree() as usize;
            let max_seen = w
                .graph
                .vertices()
                .iter()
                .map(|&v| w.graph.degree(v).unwrap())
                .max()
                .unwrap();
            assert_eq!(max_seen, cap, "{}", spec.id_string());
            assert_eq!(w.graph.degree(0).unwrap(), cap, "{}", spec.id_string());
        }
    }

    #[test]
    fn ladder_is_z_times_k2() {
        let w = cut_window(&FamilySpec::ladder(), 2).unwrap();
        // Ball of radius 2: (0,0),(±1,0),(±2,0),(0,1),(±1,1) -> 8 vertices.
        assert_eq!(w.graph.vertex_count(), 8);
        let index = w.coord_index();
        let at = |x: i64, side: u8| index[&FamilyCoord::Ladder { x, side }];
        assert!(w.graph.has_edge(at(0, 0), at(0, 1)));
        assert!(w.graph.has_edge(at(-1, 0), at(0, 0)));
        assert!(!w.graph.has_edge(at(-1, 0), at(1, 0)));
    }

    #[test]
    fn line_z_jump_edges() {
        let spec = FamilySpec::line_z([1, 2]).unwrap();
        let w = cut_window(&spec, 2).unwrap();
        // Radius 2 in the jump metric reaches every integer in [-4, 4].
        assert_eq!(w.graph.vertex_count(), 9);
        let index = w.coord_index();
        let at = |n: i64| index[&FamilyCoord::Line(n)];
        assert!(w.graph.has_edge(at(0), at(2)));
        assert!(w.graph.has_edge(at(-1), at(1)));
        assert!(!w.graph.has_edge(at(-2), at(1)));
    }

    #[test]
    fn free_product_is_regular_tree() {
        let spec = FamilySpec::free_product_demo(2).unwrap();
        let w = cut_window(&spec, 3).unwrap();
        // 4-regular tree: 1 + 4*(3^3 - 1)/2 = 53 vertices.
        assert_eq!(w.graph.vertex_count(), 53);
        assert_eq!(w.graph.edge_count(), 52);
        assert_eq!(w.graph.connected_components().len(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let err = cut_window_with_budget(&FamilySpec::grid_z2(), 10, 50).unwrap_err();
        assert_eq!(
            err,
            FamilyError::WindowBudgetExceeded { radius: 10, budget: 50 }
        );
    }

    #[test]
    fn spec_validation() {
        assert_eq!(FamilySpec::regular_tree(1), Err(FamilyError::DegreeTooSmall(1)));
        assert_eq!(FamilySpec::line_z([]), Err(FamilyError::EmptyGenerators));
        assert_eq!(FamilySpec::line_z([0]), Err(FamilyError::ZeroGenerator));
        assert_eq!(FamilySpec::free_product_demo(0), Err(FamilyError::RankTooSmall));
        // line_z generators are deduplicated and sorted.
        let a = FamilySpec::line_z([2, 1, 2]).unwrap();
        assert_eq!(a.id_string(), "line_z:1,2");
        assert_eq!(a.max_degree(), 4);
    }

    #[test]
    fn id_round_trip() {
        for spec in [
            FamilySpec::grid_z2(),
            FamilySpec::regular_tree(3).unwrap(),
            FamilySpec::line_z([1, 2]).unwrap(),
            FamilySpec::ladder(),
            FamilySpec::free_product_demo(2).unwrap(),
        ] {
            assert_eq!(FamilySpec::parse_id(&spec.id_string()), Ok(spec));
        }
        assert!(FamilySpec::parse_id("banana").is_err());
        assert!(FamilySpec::parse_id("line_z:").is_err());
        assert!(FamilySpec::parse_id("regular_tree:1").is_err());
    }
}
