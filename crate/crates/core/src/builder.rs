//! Turns a bundle of m disjoint coherent rays into an explicit complete-minor
//! model in the square of the window.
//!
//! The construction runs one stage per ray pair, in lexicographic order. A
//! stage finds a shortest connector between the two rays that avoids the set
//! of vertices already committed ("used"), then resolves every crossing with
//! an intermediate ray by splitting the crossed segment between the connector
//! and the ray: alternate vertices move to the connector, the rest stay on
//! the ray, so both survive as paths with hops of length at most two. The
//! used set then grows by the connector and by a minimal prefix of each ray,
//! chosen so that everything still outside the used set is a literal,
//! unit-step suffix of the original ray. Later stages only ever touch those
//! clean suffixes, which is what keeps the splicing arithmetic valid.

use crate::graph::{validate_path, FiniteGraph, PathValidity, PathViolation, VertexId};
use crate::families::Window;
use crate::rays::{verify_bundle, BundleViolation, RayBundle};
use crate::PathSeq;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// An explicit minor model: disjoint connected branch sets in the host, one
/// per pattern vertex, with every pattern edge witnessed by a host edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorModel {
    pub pattern: FiniteGraph,
    pub host: FiniteGraph,
    pub branch_sets: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

/// Snapshot of the construction after a number of completed stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuilderState {
    /// Completed stages; equals the number of connectors laid down.
    pub stage: usize,
    /// Vertices committed so far: all connectors plus the ray prefixes.
    pub used: BTreeSet<VertexId>,
    /// Current rays, reroutes applied.
    pub rays: Vec<PathSeq>,
    /// Connector laid down at each completed stage.
    pub connectors: Vec<PathSeq>,
    /// Ray pair joined at each stage, lexicographic.
    pub pair_order: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateViolation {
    StageMismatch,
    RayCountChanged,
    RayNotPath { ray: usize, violation: PathViolation },
    RaysShareVertex { first: usize, second: usize, vertex: VertexId },
    /// Outside the used set, ray and original must agree as vertex sets.
    TailMismatch { ray: usize },
    /// The deepest used vertex on a ray must come from the original ray.
    AnchorOffOriginal { ray: usize },
    /// Used vertices on a ray must form a prefix.
    TailNotSuffix { ray: usize },
    /// Rays never gain vertices.
    RayGrew { ray: usize },
    ConnectorNotPath { connector: usize, violation: PathViolation },
    ConnectorOutsideUsedSet { connector: usize, vertex: VertexId },
    ConnectorTouchesRay { connector: usize, ray: usize, vertex: VertexId },
    ConnectorsShareVertex { first: usize, second: usize, vertex: VertexId },
    ConnectorEndpointsWrong { connector: usize },
}

impl fmt::Display for StateViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateViolation::StageMismatch => {
                write!(f, "stage counter disagrees with the number of connectors")
            }
            StateViolation::RayCountChanged => write!(f, "number of rays changed"),
            StateViolation::RayNotPath { ray, violation } => {
                write!(f, "ray {ray} is not a square-graph path: {violation}")
            }
            StateViolation::RaysShareVertex { first, second, vertex } => {
                write!(f, "rays {first} and {second} share vertex {vertex}")
            }
            StateViolation::TailMismatch { ray } => {
                write!(f, "ray {ray} disagrees with its original outside the used set")
            }
            StateViolation::AnchorOffOriginal { ray } => {
                write!(f, "deepest used vertex of ray {ray} is not an original ray vertex")
            }
            StateViolation::TailNotSuffix { ray } => {
                write!(f, "used vertices of ray {ray} do not form a prefix")
            }
            StateViolation::RayGrew { ray } => write!(f, "ray {ray} gained vertices"),
            StateViolation::ConnectorNotPath { connector, violation } => {
                write!(f, "connector {connector} is not a square-graph path: {violation}")
            }
            StateViolation::ConnectorOutsideUsedSet { connector, vertex } => {
                write!(f, "connector {connector} vertex {vertex} is outside the used set")
            }
            StateViolation::ConnectorTouchesRay { connector, ray, vertex } => {
                write!(f, "connector {connector} touches ray {ray} at interior vertex {vertex}")
            }
            StateViolation::ConnectorsShareVertex { first, second, vertex } => {
                write!(f, "connectors {first} and {second} share vertex {vertex}")
            }
            StateViolation::ConnectorEndpointsWrong { connector } => {
                write!(f, "connector {connector} endpoints miss their rays")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuildError {
    BadBundle(BundleViolation),
    ConnectorNotFound { stage: usize, pair: (usize, usize), hint: &'static str },
    /// The standalone reroute entry point needs both connector endpoints on
    /// distinct rays.
    ConnectorEndpointsOffRays,
    InternalInvariant { stage: usize, violation: StateViolation },
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::BadBundle(v) => write!(f, "input bundle is invalid: {v}"),
            BuildError::ConnectorNotFound { stage, pair, hint } => write!(
                f,
                "stage {stage}: no connector for rays {} and {}: {hint}",
                pair.0, pair.1
            ),
            BuildError::ConnectorEndpointsOffRays => {
                write!(f, "connector endpoints must lie on two distinct rays")
            }
            BuildError::InternalInvariant { stage, violation } => {
                write!(f, "stage {stage} broke a construction invariant: {violation}")
            }
        }
    }
}

/// Ray pairs in lexicographic order: (0,1), (0,2), ..., (m-2,m-1).
pub fn pair_order(m: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(m * m.saturating_sub(1) / 2);
    for k in 0..m {
        for l in k + 1..m {
            pairs.push((k, l));
        }
    }
    pairs
}

/// Resolves all crossings between a connector and the rays it does not end
/// on. Returns the updated connector and rays; both may now contain hops of
/// graph distance two, which is why the result lives in the window square.
///
/// The endpoints of `q` must lie on two distinct rays; those two rays are
/// left untouched.
pub fn reroute_crossings(
    q: &PathSeq,
    rays: &[PathSeq],
) -> Result<(PathSeq, Vec<PathSeq>), BuildError> {
    let k = rays.iter().position(|r| r.vertices().contains(&q.first()));
    let l = rays.iter().position(|r| r.vertices().contains(&q.last()));
    let (Some(k), Some(l)) = (k, l) else {
        return Err(BuildError::ConnectorEndpointsOffRays);
    };
    if k == l {
        return Err(BuildError::ConnectorEndpointsOffRays);
    }
    let ray_vecs: Vec<Vec<VertexId>> = rays.iter().map(|r| r.vertices().to_vec()).collect();
    let (q2, rays2) = reroute_inner(q.vertices().to_vec(), ray_vecs, k, l);
    Ok((
        PathSeq::new(q2).expect("connector keeps its endpoints"),
        rays2
            .into_iter()
            .map(|r| PathSeq::new(r).expect("rays keep at least one vertex"))
            .collect(),
    ))
}

fn reroute_inner(
    mut q: Vec<VertexId>,
    mut rays: Vec<Vec<VertexId>>,
    k: usize,
    l: usize,
) -> (Vec<VertexId>, Vec<Vec<VertexId>>) {
    let mut pos = 1;
    // The first crossing donates its even offsets (counted from the first
    // contact, along the ray) to the connector. Later crossings flip to odd
    // offsets whenever the previous crossing kept its last contact vertex on
    // the connector; this keeps every junction within graph distance two.
    let mut take_evens = true;
    loop {
        let owner: BTreeMap<VertexId, (usize, usize)> = rays
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k && *j != l)
            .flat_map(|(j, ray)| ray.iter().enumerate().map(move |(t, &v)| (v, (j, t))))
            .collect();
        let interior = pos..q.len().saturating_sub(1);
        let Some(p1) = interior.clone().find(|&p| owner.contains_key(&q[p])) else {
            break;
        };
        let (j, t1) = owner[&q[p1]];
        let p2 = interior
            .rev()
            .find(|&p| owner.get(&q[p]).map(|&(r, _)| r) == Some(j))
            .expect("p1 witnesses at least one contact");
        let (_, t2) = owner[&q[p2]];

        let (lo, hi) = (t1.min(t2), t1.max(t2));
        let offset_of = |t: usize| if t2 < t1 { t1 - t } else { t - t1 };
        // Connector part in contact order, ray part in ray order.
        let to_path: Vec<VertexId> = (0..=hi - lo)
            .map(|d| if t2 < t1 { rays[j][t1 - d] } else { rays[j][t1 + d] })
            .enumerate()
            .filter(|(d, _)| (d % 2 == 0) == take_evens)
            .map(|(_, v)| v)
            .collect();
        let kept: Vec<VertexId> = (lo..=hi)
            .filter(|&t| (offset_of(t) % 2 == 0) != take_evens)
            .map(|t| rays[j][t])
            .collect();

        let y2 = q[p2];
        take_evens = !to_path.contains(&y2);

        let mut new_q = q[..p1].to_vec();
        new_q.extend_from_slice(&to_path);
        let resume = new_q.len();
        new_q.extend_from_slice(&q[p2 + 1..]);
        q = new_q;

        let mut new_ray = rays[j][..lo].to_vec();
        new_ray.extend_from_slice(&kept);
        new_ray.extend_from_slice(&rays[j][hi + 1..]);
        rays[j] = new_ray;

        pos = resume;
    }
    (q, rays)
}

/// Shortest path between the free tails of two rays, avoiding the used set.
/// Multi-source BFS with ascending tie-breaking, so the result is canonical.
fn connector_search(
    g: &FiniteGraph,
    used: &BTreeSet<VertexId>,
    from: &PathSeq,
    to: &PathSeq,
) -> Result<Vec<VertexId>, &'static str> {
    let mut sources: Vec<VertexId> = from
        .vertices()
        .iter()
        .copied()
        .filter(|v| !used.contains(v))
        .collect();
    sources.sort_unstable();
    let targets: BTreeSet<VertexId> = to
        .vertices()
        .iter()
        .copied()
        .filter(|v| !used.contains(v))
        .collect();
    if sources.is_empty() || targets.is_empty() {
        return Err("a ray has no vertices left outside the used set");
    }
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut seen: BTreeSet<VertexId> = sources.iter().copied().collect();
    let mut queue: alloc::collections::VecDeque<VertexId> = sources.into_iter().collect();
    while let Some(u) = queue.pop_front() {
        if targets.contains(&u) {
            let mut path = vec![u];
            let mut v = u;
            while let Some(&p) = parent.get(&v) {
                path.push(p);
                v = p;
            }
            path.reverse();
            return Ok(path);
        }
        for &w in g.neighbors(u).expect("rays live in the graph") {
            if !used.contains(&w) && seen.insert(w) {
                parent.insert(w, u);
                queue.push_back(w);
            }
        }
    }
    Err("every route between the rays meets the used set")
}

/// Shortest prefix of a ray that swallows this stage's damage: everything at
/// or before the last rewrite or used-set contact, scanning from the tail,
/// plus one extra vertex after a rewrite so that any length-two hop at the
/// seam is fully covered.
fn prefix_len(
    new_ray: &[VertexId],
    original: &[VertexId],
    base: &BTreeSet<VertexId>,
    ray: usize,
) -> Result<usize, StateViolation> {
    let n = new_ray.len();
    let l = original.len();
    if n > l {
        return Err(StateViolation::RayGrew { ray });
    }
    for t in 0..n {
        let idx = n - 1 - t;
        let v = new_ray[idx];
        if v != original[l - 1 - t] {
            return Ok((idx + 2).min(n));
        }
        if base.contains(&v) {
            return Ok(idx + 1);
        }
    }
    Ok(0)
}

/// Checks every invariant a [`BuilderState`] is supposed to satisfy against
/// the original bundle, from scratch.
pub fn verify_builder_state(
    w: &Window,
    originals: &[PathSeq],
    state: &BuilderState,
) -> Result<(), StateViolation> {
    if state.stage != state.connectors.len() {
        return Err(StateViolation::StageMismatch);
    }
    if state.rays.len() != originals.len() {
        return Err(StateViolation::RayCountChanged);
    }
    let square = w.graph.square();

    for (i, ray) in state.rays.iter().enumerate() {
        if let PathValidity::Invalid(violation) = validate_path(&square, ray) {
            return Err(StateViolation::RayNotPath { ray: i, violation });
        }
    }
    let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, ray) in state.rays.iter().enumerate() {
        for &v in ray.vertices() {
            if let Some(&j) = owner.get(&v) {
                return Err(StateViolation::RaysShareVertex { first: j, second: i, vertex: v });
            }
            owner.insert(v, i);
        }
    }

    for (i, ray) in state.rays.iter().enumerate() {
        let mut seen_free = false;
        for &v in ray.vertices() {
            let free = !state.used.contains(&v);
            if !free && seen_free {
                return Err(StateViolation::TailNotSuffix { ray: i });
            }
            seen_free = seen_free || free;
        }

        let free_now: BTreeSet<VertexId> = ray
            .vertices()
            .iter()
            .copied()
            .filter(|v| !state.used.contains(v))
            .collect();
        let free_orig: BTreeSet<VertexId> = originals[i]
            .vertices()
            .iter()
            .copied()
            .filter(|v| !state.used.contains(v))
            .collect();
        if free_now != free_orig {
            return Err(StateViolation::TailMismatch { ray: i });
        }

        let anchor = ray
            .vertices()
            .iter()
            .rev()
            .find(|v| state.used.contains(v));
        if let Some(a) = anchor {
            if !originals[i].vertices().contains(a) {
                return Err(StateViolation::AnchorOffOriginal { ray: i });
            }
        }
    }

    let mut connector_owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (t, q) in state.connectors.iter().enumerate() {
        if let PathValidity::Invalid(violation) = validate_path(&square, q) {
            return Err(StateViolation::ConnectorNotPath { connector: t, violation });
        }
        for &v in q.vertices() {
            if !state.used.contains(&v) {
                return Err(StateViolation::ConnectorOutsideUsedSet { connector: t, vertex: v });
            }
            if let Some(&s) = connector_owner.get(&v) {
                return Err(StateViolation::ConnectorsShareVertex {
                    first: s,
                    second: t,
                    vertex: v,
                });
            }
            connector_owner.insert(v, t);
        }
        let (k, l) = state.pair_order[t];
        if !state.rays[k].vertices().contains(&q.first())
            || !state.rays[l].vertices().contains(&q.last())
        {
            return Err(StateViolation::ConnectorEndpointsWrong { connector: t });
        }
        let vs = q.vertices();
        for &v in &vs[1..vs.len() - 1] {
            if let Some(&r) = owner.get(&v) {
                return Err(StateViolation::ConnectorTouchesRay {
                    connector: t,
                    ray: r,
                    vertex: v,
                });
            }
        }
    }
    Ok(())
}

/// Builds a complete-minor model on the square of the window from a bundle
/// of disjoint coherent rays, one branch set per ray.
pub fn build_km_minor(w: &Window, bundle: &RayBundle) -> Result<MinorModel, BuildError> {
    run_build(w, bundle, false).map(|(model, _)| model)
}

/// Same as [`build_km_minor`], but returns the state after every stage and
/// re-verifies all invariants at each step, turning any internal slip into
/// an explicit error.
pub fn build_km_minor_traced(
    w: &Window,
    bundle: &RayBundle,
) -> Result<(MinorModel, Vec<BuilderState>), BuildError> {
    run_build(w, bundle, true)
}

fn run_build(
    w: &Window,
    bundle: &RayBundle,
    traced: bool,
) -> Result<(MinorModel, Vec<BuilderState>), BuildError> {
    verify_bundle(w, bundle).map_err(BuildError::BadBundle)?;
    let m = bundle.rays.len();
    let pairs = pair_order(m);

    let mut state = BuilderState {
        stage: 0,
        used: BTreeSet::new(),
        rays: bundle.rays.clone(),
        connectors: Vec::new(),
        pair_order: pairs.clone(),
    };
    let mut trace = Vec::new();
    let check = |state: &BuilderState| -> Result<(), BuildError> {
        if traced {
            verify_builder_state(w, &bundle.rays, state)
                .map_err(|violation| BuildError::InternalInvariant { stage: state.stage, violation })
        } else {
            Ok(())
        }
    };
    check(&state)?;
    if traced {
        trace.push(state.clone());
    }

    for (i, &(k, l)) in pairs.iter().enumerate() {
        let stage = i + 1;
        let q = connector_search(&w.graph, &state.used, &state.rays[k], &state.rays[l])
            .map_err(|hint| BuildError::ConnectorNotFound { stage, pair: (k, l), hint })?;

        let ray_vecs: Vec<Vec<VertexId>> =
            state.rays.iter().map(|r| r.vertices().to_vec()).collect();
        let (q2, new_rays) = reroute_inner(q, ray_vecs, k, l);

        let mut used = state.used.clone();
        used.extend(q2.iter().copied());
        let base = used.clone();
        for (j, ray) in new_rays.iter().enumerate() {
            let tau = prefix_len(ray, bundle.rays[j].vertices(), &base, j)
                .map_err(|violation| BuildError::InternalInvariant { stage, violation })?;
            used.extend(ray[..tau].iter().copied());
        }

        state = BuilderState {
            stage,
            used,
            rays: new_rays
                .into_iter()
                .map(|r| PathSeq::new(r).expect("rays keep at least one vertex"))
                .collect(),
            connectors: {
                let mut cs = state.connectors;
                cs.push(PathSeq::new(q2).expect("connectors are non-empty"));
                cs
            },
            pair_order: pairs.clone(),
        };
        check(&state)?;
        if traced {
            trace.push(state.clone());
        }
    }

    let model = assemble_model(w, &state, m)?;
    Ok((model, trace))
}

/// Cuts each final ray down to the minimal subpath spanning its connector
/// endpoints and distributes connector interiors: the split edge sits at the
/// middle of the connector, with the extra interior vertex going to the
/// lower-numbered ray.
fn assemble_model(w: &Window, state: &BuilderState, m: usize) -> Result<MinorModel, BuildError> {
    let internal = |violation| BuildError::InternalInvariant { stage: state.stage, violation };

    let mut marks: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (t, q) in state.connectors.iter().enumerate() {
        let (k, l) = state.pair_order[t];
        let pa = state.rays[k]
            .vertices()
            .iter()
            .position(|&v| v == q.first())
            .ok_or(internal(StateViolation::ConnectorEndpointsWrong { connector: t }))?;
        let pb = state.rays[l]
            .vertices()
            .iter()
            .position(|&v| v == q.last())
            .ok_or(internal(StateViolation::ConnectorEndpointsWrong { connector: t }))?;
        marks[k].push(pa);
        marks[l].push(pb);
    }

    let mut branch_sets: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
    for (j, positions) in marks.iter().enumerate() {
        let ray = state.rays[j].vertices();
        let set: BTreeSet<VertexId> = if positions.is_empty() {
            ray.iter().copied().collect()
        } else {
            let lo = *positions.iter().min().expect("non-empty");
            let hi = *positions.iter().max().expect("non-empty");
            ray[lo..=hi].iter().copied().collect()
        };
        branch_sets.insert(j as VertexId, set);
    }
    for (t, q) in state.connectors.iter().enumerate() {
        let (k, l) = state.pair_order[t];
        let vs = q.vertices();
        let last = vs.len() - 1;
        let h = last / 2;
        branch_sets
            .get_mut(&(k as VertexId))
            .expect("branch set per ray")
            .extend(vs[1..=h].iter().copied());
        branch_sets
            .get_mut(&(l as VertexId))
            .expect("branch set per ray")
            .extend(vs[h + 1..last].iter().copied());
    }

    Ok(MinorModel {
        pattern: FiniteGraph::complete(m as u32),
        host: w.graph.square(),
        branch_sets,
    })
}
