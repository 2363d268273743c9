//! Systems of vertex-disjoint rays in a window that all leave through the
//! same "end": below the cut radius they share one component of the
//! complement of every smaller ball.
//!
//! [`disjoint_rays`] finds such a bundle with a max-flow argument,
//! [`verify_bundle`] re-checks the defining property from scratch, and
//! [`end_degree_profile`] probes how many disjoint rays each window of a
//! family supports.

use crate::families::{cut_window, FamilyError, FamilySpec, Window};
use crate::flow::max_vertex_disjoint_paths;
use crate::graph::{validate_path, PathValidity, PathViolation, VertexId};
use crate::PathSeq;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

/// A system of vertex-disjoint rays sharing an end at scale `r_star`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayBundle {
    pub r_star: u32,
    pub rays: Vec<PathSeq>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RayError {
    ZeroRays,
    RStarExceedsRadius { r_star: u32, radius: u32 },
}

impl fmt::Display for RayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayError::ZeroRays => write!(f, "a bundle needs at least one ray"),
            RayError::RStarExceedsRadius { r_star, radius } => {
                write!(f, "cut radius {r_star} exceeds the window radius {radius}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BundleViolation {
    RStarExceedsRadius { r_star: u32, radius: u32 },
    EmptyBundle,
    InvalidPath { ray: usize, violation: PathViolation },
    SharedVertex { first: usize, second: usize, vertex: VertexId },
    EndNotOnBoundary { ray: usize },
    /// At this cut radius the ray tails do not sit in one common component.
    Incoherent { cut_radius: u32 },
}

impl fmt::Display for BundleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleViolation::RStarExceedsRadius { r_star, radius } => {
                write!(f, "cut radius {r_star} exceeds the window radius {radius}")
            }
            BundleViolation::EmptyBundle => write!(f, "bundle has no rays"),
            BundleViolation::InvalidPath { ray, violation } => {
                write!(f, "ray {ray} is not a path: {violation}")
            }
            BundleViolation::SharedVertex { first, second, vertex } => {
                write!(f, "rays {first} and {second} share vertex {vertex}")
            }
            BundleViolation::EndNotOnBoundary { ray } => {
                write!(f, "ray {ray} does not end on the window boundary")
            }
            BundleViolation::Incoherent { cut_radius } => {
                write!(f, "tails beyond radius {cut_radius} split across components")
            }
        }
    }
}

fn distances(w: &Window) -> Vec<u32> {
    w.graph
        .bfs_distances(w.root_id)
        .expect("window root is a vertex")
        .into_iter()
        .map(|d| d.expect("windows are connected"))
        .collect()
}

/// Finds `m` vertex-disjoint rays that agree on an end at scale `r_star`.
///
/// Rays run from near the root out to the window boundary; beyond the ball
/// of radius `r_star` they all stay in a single component of the remainder.
/// Returns `Ok(None)` when no component supports `m` disjoint rays.
pub fn disjoint_rays(
    w: &Window,
    m: usize,
    r_star: u32,
) -> Result<Option<RayBundle>, RayError> {
    if m == 0 {
        return Err(RayError::ZeroRays);
    }
    if r_star > w.radius {
        return Err(RayError::RStarExceedsRadius { r_star, radius: w.radius });
    }
    let dist = distances(w);

    if r_star == w.radius {
        // No room beyond the cut: use boundary vertices themselves, grouped
        // by the components they would share just below the cut.
        let outside: BTreeSet<VertexId> = w
            .graph
            .vertices()
            .iter()
            .copied()
            .filter(|&v| dist[v as usize] >= r_star)
            .collect();
        let sub = w.graph.induced_subgraph(&outside).expect("vertex subset");
        for comp in sub.connected_components() {
            let picks: Vec<VertexId> = comp
                .iter()
                .copied()
                .filter(|v| w.boundary.contains(v))
                .take(m)
                .collect();
            if picks.len() == m {
                let rays = picks
                    .into_iter()
                    .map(|v| PathSeq::new([v]).expect("single vertex"))
                    .collect();
                return Ok(Some(RayBundle { r_star, rays }));
            }
        }
        return Ok(None);
    }

    let outside: BTreeSet<VertexId> = w
        .graph
        .vertices()
        .iter()
        .copied()
        .filter(|&v| dist[v as usize] > r_star)
        .collect();
    let sub = w.graph.induced_subgraph(&outside).expect("vertex subset");
    for comp in sub.connected_components() {
        let c: BTreeSet<VertexId> = comp.into_iter().collect();
        let entries: BTreeSet<VertexId> = w
            .graph
            .vertices()
            .iter()
            .copied()
            .filter(|&v| {
                dist[v as usize] == r_star
                    && w.graph
                        .neighbors(v)
                        .expect("window vertex")
                        .iter()
                        .any(|u| c.contains(u))
            })
            .collect();
        let exits: BTreeSet<VertexId> = c.intersection(&w.boundary).copied().collect();
        if entries.len() < m || exits.len() < m {
            continue;
        }
        let paths = max_vertex_disjoint_paths(&w.graph, &c, &entries, &exits);
        if paths.len() >= m {
            let mut rays: Vec<Vec<VertexId>> = paths.into_iter().take(m).collect();
            back_extend(w, &dist, &mut rays);
            let rays = rays
                .into_iter()
                .map(|p| PathSeq::new(p).expect("flow paths are non-empty"))
                .collect();
            return Ok(Some(RayBundle { r_star, rays }));
        }
    }
    Ok(None)
}

/// Greedily prepends vertices of strictly decreasing root distance, always
/// taking the smallest unused id, so rays reach as close to the root as the
/// bundle allows.
fn back_extend(w: &Window, dist: &[u32], rays: &mut [Vec<VertexId>]) {
    let mut used: BTreeSet<VertexId> = rays.iter().flatten().copied().collect();
    for ray in rays.iter_mut() {
        loop {
            let first = ray[0];
            let d = dist[first as usize];
            if d == 0 {
                break;
            }
            let step = w
                .graph
                .neighbors(first)
                .expect("window vertex")
                .iter()
                .copied()
                .find(|&u| dist[u as usize] + 1 == d && !used.contains(&u));
            match step {
                Some(u) => {
                    ray.insert(0, u);
                    used.insert(u);
                }
                None => break,
            }
        }
    }
}

/// Re-derives the bundle property from first principles: disjoint simple
/// paths ending on the boundary whose tails beyond every cut radius up to
/// `r_star` lie in one shared component.
pub fn verify_bundle(w: &Window, b: &RayBundle) -> Result<(), BundleViolation> {
    if b.r_star > w.radius {
        return Err(BundleViolation::RStarExceedsRadius { r_star: b.r_star, radius: w.radius });
    }
    if b.rays.is_empty() {
        return Err(BundleViolation::EmptyBundle);
    }
    for (i, ray) in b.rays.iter().enumerate() {
        if let PathValidity::Invalid(violation) = validate_path(&w.graph, ray) {
            return Err(BundleViolation::InvalidPath { ray: i, violation });
        }
    }
    let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, ray) in b.rays.iter().enumerate() {
        for &v in ray.vertices() {
            if let Some(&j) = owner.get(&v) {
                return Err(BundleViolation::SharedVertex { first: j, second: i, vertex: v });
            }
            owner.insert(v, i);
        }
    }
    for (i, ray) in b.rays.iter().enumerate() {
        if !w.boundary.contains(&ray.last()) {
            return Err(BundleViolation::EndNotOnBoundary { ray: i });
        }
    }

    let dist = distances(w);
    for r in 0..=b.r_star {
        let portions: Vec<Vec<VertexId>> = b
            .rays
            .iter()
            .map(|ray| {
                ray.vertices()
                    .iter()
                    .copied()
                    .filter(|&v| dist[v as usize] > r)
                    .collect()
            })
            .collect();
        if portions.iter().all(|p| p.is_empty()) {
            continue;
        }
        if portions.iter().any(|p| p.is_empty()) {
            return Err(BundleViolation::Incoherent { cut_radius: r });
        }
        let outside: BTreeSet<VertexId> = w
            .graph
            .vertices()
            .iter()
            .copied()
            .filter(|&v| dist[v as usize] > r)
            .collect();
        let sub = w.graph.induced_subgraph(&outside).expect("vertex subset");
        let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
        for (ci, comp) in sub.connected_components().into_iter().enumerate() {
            for v in comp {
                comp_of.insert(v, ci);
            }
        }
        let mut shared: Option<usize> = None;
        for p in &portions {
            for v in p {
                let ci = comp_of[v];
                match shared {
                    None => shared = Some(ci),
                    Some(c) if c != ci => {
                        return Err(BundleViolation::Incoherent { cut_radius: r })
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(())
}

/// For each radius, the largest number of disjoint coherent rays any end of
/// the window supports, probing [`disjoint_rays`] with cut radius `r / 2`.
pub fn end_degree_profile(spec: &FamilySpec, radii: &[u32]) -> Result<Vec<u32>, FamilyError> {
    let mut out = Vec::new();
    for &r in radii {
        let w = cut_window(spec, r)?;
        let r_star = r / 2;
        let dist = distances(&w);
        let cap = dist.iter().filter(|&&d| d == r_star).count();
        let mut best = 0u32;
        let (mut lo, mut hi) = (1usize, cap);
        while lo <= hi {
            let mid = lo + (hi - lo) / 2;
            let found = disjoint_rays(&w, mid, r_star)
                .expect("profile parameters are valid")
                .is_some();
            if found {
                best = mid as u32;
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
        out.push(best);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilyCoord;
    use crate::graph::FiniteGraph;

    fn grid_vertex(w: &Window, x: i64, y: i64) -> VertexId {
        w.coords()
            .iter()
            .position(|c| *c == FamilyCoord::Grid { x, y })
            .expect("coordinate inside window") as VertexId
    }

    #[test]
    fn grid_bundle_found_and_verified() {
        let w = cut_window(&FamilySpec::grid_z2(), 6).unwrap();
        let b = disjoint_rays(&w, 4, 2).unwrap().expect("grid supports four rays");
        assert_eq!(b.rays.len(), 4);
        verify_bundle(&w, &b).unwrap();
    }

    #[test]
    fn handmade_grid_arms_are_a_valid_bundle() {
        // Independent witness that a 4-ray bundle exists: the four straight
        // arms of the diamond, written down without the solver.
        let w = cut_window(&FamilySpec::grid_z2(), 6).unwrap();
        let arm = |dx: i64, dy: i64| {
            let vs: Vec<VertexId> =
                (1..=6).map(|k| grid_vertex(&w, k * dx, k * dy)).collect();
            PathSeq::new(vs).unwrap()
        };
        let b = RayBundle {
            r_star: 2,
            rays: alloc::vec![arm(1, 0), arm(-1, 0), arm(0, 1), arm(0, -1)],
        };
        verify_bundle(&w, &b).unwrap();
    }

    #[test]
    fn line_supports_only_one_ray_per_end()  {
        let spec = FamilySpec::line_z([1]).unwrap();
        let w = cut_window(&spec, 8).unwrap();
        assert_eq!(disjoint_rays(&w, 2, 4).unwrap(), None);
        let b = disjoint_rays(&w, 1, 4).unwrap().expect("one ray always fits");
        verify_bundle(&w, &b).unwrap();
    }

    #[test]
    fn profiles() {
        let grid = end_degree_profile(&FamilySpec::grid_z2(), &[4, 6, 8]).unwrap();
        for (p, (want_min, want_max)) in grid.iter().zip([(4, 8), (6, 12), (8, 16)]) {
            assert!((want_min..=want_max).contains(p), "grid profile {grid:?}");
        }
        let tree = FamilySpec::regular_tree(3).unwrap();
        assert_eq!(end_degree_profile(&tree, &[4, 6, 8]).unwrap(), [1, 1, 1]);
        let line = FamilySpec::line_z([1]).unwrap();
        assert_eq!(end_degree_profile(&line, &[4, 6, 8]).unwrap(), [1, 1, 1]);
    }

    #[test]
    fn degenerate_cut_at_full_radius() {
        // Boundary vertices adjacent to each other can form a bundle of
        // single-vertex rays.
        let spec = FamilySpec::line_z([1, 2]).unwrap();
        let w = cut_window(&spec, 2).unwrap();
        let b = disjoint_rays(&w, 2, 2).unwrap().expect("adjacent boundary pair");
        assert!(b.rays.iter().all(|r| r.len() == 1));
        verify_bundle(&w, &b).unwrap();
        assert_eq!(disjoint_rays(&w, 3, 2).unwrap(), None);

        // Grid boundary vertices are pairwise non-adjacent, so only one
        // single-vertex ray is available per component.
        let g = cut_window(&FamilySpec::grid_z2(), 2).unwrap();
        assert_eq!(disjoint_rays(&g, 2, 2).unwrap(), None);
        let single = disjoint_rays(&g, 1, 2).unwrap().expect("one vertex suffices");
        verify_bundle(&g, &single).unwrap();
    }

    #[test]
    fn one_ray_in_every_family() {
        for spec in [
            FamilySpec::grid_z2(),
            FamilySpec::regular_tree(3).unwrap(),
            FamilySpec::line_z([1, 2]).unwrap(),
            FamilySpec::ladder(),
            FamilySpec::free_product_demo(2).unwrap(),
        ] {
            let w = cut_window(&spec, 4).unwrap();
            let b = disjoint_rays(&w, 1, 2).unwrap().expect("single ray");
            verify_bundle(&w, &b).unwrap_or_else(|e| panic!("{}: {e}", spec.id_string()));
        }
    }

    #[test]
    fn parameter_errors() {
        let w = cut_window(&FamilySpec::grid_z2(), 2).unwrap();
        assert_eq!(disjoint_rays(&w, 0, 1), Err(RayError::ZeroRays));
        assert_eq!(
            disjoint_rays(&w, 1, 5),
            Err(RayError::RStarExceedsRadius { r_star: 5, radius: 2 })
        );
    }

    #[test]
    fn verifier_rejects_broken_bundles() {
        let w = cut_window(&FamilySpec::grid_z2(), 2).unwrap();
        // Not ending on the boundary.
        let b = RayBundle { r_star: 1, rays: alloc::vec![PathSeq::new([0]).unwrap()] };
        assert_eq!(verify_bundle(&w, &b), Err(BundleViolation::EndNotOnBoundary { ray: 0 }));
        // Shared vertex.
        let e = grid_vertex(&w, 1, 0);
        let b = RayBundle {
            r_star: 0,
            rays: alloc::vec![
                PathSeq::new([e, grid_vertex(&w, 2, 0)]).unwrap(),
                PathSeq::new([e, grid_vertex(&w, 1, 1)]).unwrap(),
            ],
        };
        assert!(matches!(
            verify_bundle(&w, &b),
            Err(BundleViolation::SharedVertex { vertex, .. }) if vertex == e
        ));
        // Two opposite arms never share an end in a path graph.
        let spec = FamilySpec::line_z([1]).unwrap();
        let lw = cut_window(&spec, 3).unwrap();
        let right: Vec<VertexId> = (0..=3)
            .map(|n| {
                lw.coords()
                    .iter()
                    .position(|c| *c == FamilyCoord::Line(n))
                    .unwrap() as VertexId
            })
            .collect();
        let left: Vec<VertexId> = (1..=3)
            .map(|n| {
                lw.coords()
                    .iter()
                    .position(|c| *c == FamilyCoord::Line(-n))
                    .unwrap() as VertexId
            })
            .collect();
        let b = RayBundle {
            r_star: 1,
            rays: alloc::vec![
                PathSeq::new(right[1..].to_vec()).unwrap(),
                PathSeq::new(left).unwrap(),
            ],
        };
        assert!(matches!(verify_bundle(&lw, &b), Err(BundleViolation::Incoherent { .. })));
    }

    #[test]
    fn flow_value_matches_exhaustive_search() {
        for (spec, radius) in [
            (FamilySpec::grid_z2(), 2u32),
            (FamilySpec::grid_z2(), 3),
            (FamilySpec::regular_tree(3).unwrap(), 3),
            (FamilySpec::ladder(), 4),
            (FamilySpec::line_z([1, 2]).unwrap(), 3),
        ] {
            let w = cut_window(&spec, radius).unwrap();
            let r_star = radius / 2;
            let dist = distances(&w);
            let outside: BTreeSet<VertexId> = w
                .graph
                .vertices()
                .iter()
                .copied()
                .filter(|&v| dist[v as usize] > r_star)
                .collect();
            let sub = w.graph.induced_subgraph(&outside).unwrap();
            for comp in sub.connected_components() {
                let c: BTreeSet<VertexId> = comp.into_iter().collect();
                let entries: Vec<VertexId> = w
                    .graph
                    .vertices()
                    .iter()
                    .copied()
                    .filter(|&v| {
                        dist[v as usize] == r_star
                            && w.graph.neighbors(v).unwrap().iter().any(|u| c.contains(u))
                    })
                    .collect();
                let exits: BTreeSet<VertexId> =
                    c.intersection(&w.boundary).copied().collect();
                let entry_set: BTreeSet<VertexId> = entries.iter().copied().collect();
                let got =
                    max_vertex_disjoint_paths(&w.graph, &c, &entry_set, &exits).len();
                let mut used = BTreeSet::new();
                let want = brute_max(&w.graph, &c, &entries, &exits, &mut used);
                assert_eq!(got, want, "{} radius {radius}", spec.id_string());
            }
        }
    }

    /// Exhaustive reference: tries every way of routing disjoint paths from
    /// the entries to the exits, entries in order, paths stopped at their
    /// first exit.
    fn brute_max(
        g: &FiniteGraph,
        interior: &BTreeSet<VertexId>,
        entries: &[VertexId],
        exits: &BTreeSet<VertexId>,
        used: &mut BTreeSet<VertexId>,
    ) -> usize {
        let Some((&e, rest)) = entries.split_first() else { return 0 };
        let mut best = brute_max(g, interior, rest, exits, used);
        let mut stack: Vec<VertexId> = g
            .neighbors(e)
            .unwrap()
            .iter()
            .copied()
            .filter(|u| interior.contains(u) && !used.contains(u))
            .collect();
        fn walk(
            g: &FiniteGraph,
            interior: &BTreeSet<VertexId>,
            rest: &[VertexId],
            exits: &BTreeSet<VertexId>,
            used: &mut BTreeSet<VertexId>,
            v: VertexId,
            best: &mut usize,
        ) {
            used.insert(v);
            if exits.contains(&v) {
                let with = 1 + brute_max(g, interior, rest, exits, used);
                *best = (*best).max(with);
            } else {
                let nexts: Vec<VertexId> = g
                    .neighbors(v)
                    .unwrap()
                    .iter()
                    .copied()
                    .filter(|u| interior.contains(u) && !used.contains(u))
                    .collect();
                for u in nexts {
                    walk(g, interior, rest, exits, used, u, best);
                }
            }
            used.remove(&v);
        }
        while let Some(u) = stack.pop() {
            walk(g, interior, rest, exits, used, u, &mut best);
        }
        best
    }
}
