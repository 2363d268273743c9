//! Deciding whether a pattern graph is a minor of a host graph.
//!
//! [`has_minor`] answers with an explicit [`MinorModel`] on success and
//! distinguishes a proven "no" from running out of budget, so a refutation
//! is always an exhaustive-search fact, never a timeout in disguise. Two
//! shortcuts keep common cases fast without giving up completeness: a
//! greedy elimination-width bound refutes patterns that are too entangled
//! for the host, and for complete patterns a direct clique subgraph search
//! often finds a model without touching the general machinery.
//!
//! [`reference_has_minor`] is a deliberately plain exhaustive enumerator
//! over labelings, sharing no code with the search, for cross-checking.

use crate::builder::MinorModel;
use crate::graph::{FiniteGraph, VertexId};
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

/// Time source for the search time cap. The default [`NullClock`] never
/// advances, which makes the node budget the only limit; binaries can plug
/// in a wall clock.
pub trait Clock {
    fn elapsed(&self) -> Duration;
}

/// Clock that never advances.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Search nodes before giving up. Each candidate placement costs one.
    pub max_nodes: u64,
    /// Wall-time cap, only effective with a real [`Clock`].
    pub time_cap: Duration,
}

impl SearchBudget {
    pub fn nodes(max_nodes: u64) -> Self {
        SearchBudget { max_nodes, ..SearchBudget::default() }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 1_000_000, time_cap: Duration::from_secs(60) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchStats {
    pub nodes: u64,
}

// One value per query, so the size skew between variants is irrelevant.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinorOutcome {
    Yes(MinorModel),
    No,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HadwigerResult {
    /// Largest n with a complete-minor model of order n, proven tight.
    Exact(usize),
    /// The search ran out of budget after confirming this order.
    LowerBound(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelViolation {
    /// Branch set keys must be exactly the pattern vertices.
    WrongPatternVertices,
    EmptyBranchSet { pattern_vertex: VertexId },
    UnknownHostVertex { pattern_vertex: VertexId, vertex: VertexId },
    Overlap { first: VertexId, second: VertexId, vertex: VertexId },
    Disconnected { pattern_vertex: VertexId },
    MissingEdgeWitness { first: VertexId, second: VertexId },
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelViolation::WrongPatternVertices => {
                write!(f, "branch set keys disagree with the pattern vertices")
            }
            ModelViolation::EmptyBranchSet { pattern_vertex } => {
                write!(f, "branch set of pattern vertex {pattern_vertex} is empty")
            }
            ModelViolation::UnknownHostVertex { pattern_vertex, vertex } => write!(
                f,
                "branch set of pattern vertex {pattern_vertex} uses unknown host vertex {vertex}"
            ),
            ModelViolation::Overlap { first, second, vertex } => {
                write!(f, "branch sets {first} and {second} overlap at host vertex {vertex}")
            }
            ModelViolation::Disconnected { pattern_vertex } => {
                write!(f, "branch set of pattern vertex {pattern_vertex} is disconnected")
            }
            ModelViolation::MissingEdgeWitness { first, second } => {
                write!(f, "no host edge witnesses pattern edge ({first},{second})")
            }
        }
    }
}

/// Checks a minor model from first principles: branch sets keyed by pattern
/// vertices, non-empty, made of host vertices, pairwise disjoint, connected
/// in the host, with every pattern edge witnessed by a host edge.
pub fn verify_model(model: &MinorModel) -> Result<(), ModelViolation> {
    let pattern_vs: BTreeSet<VertexId> = model.pattern.vertices().iter().copied().collect();
    let keys: BTreeSet<VertexId> = model.branch_sets.keys().copied().collect();
    if pattern_vs != keys {
        return Err(ModelViolation::WrongPatternVertices);
    }

    let mut owner: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for (&p, set) in &model.branch_sets {
        if set.is_empty() {
            return Err(ModelViolation::EmptyBranchSet { pattern_vertex: p });
        }
        for &v in set {
            if !model.host.has_vertex(v) {
                return Err(ModelViolation::UnknownHostVertex { pattern_vertex: p, vertex: v });
            }
            if let Some(&q) = owner.get(&v) {
                return Err(ModelViolation::Overlap { first: q, second: p, vertex: v });
            }
            owner.insert(v, p);
        }
    }
    for (&p, set) in &model.branch_sets {
        if !model.host.is_connected_set(set).expect("members checked above") {
            return Err(ModelViolation::Disconnected { pattern_vertex: p });
        }
    }

    let mut witnessed: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
    for &(u, v) in model.host.edges() {
        if let (Some(&p), Some(&q)) = (owner.get(&u), owner.get(&v)) {
            if p != q {
                witnessed.insert((p.min(q), p.max(q)));
            }
        }
    }
    for &(a, b) in model.pattern.edges() {
        if !witnessed.contains(&(a.min(b), a.max(b))) {
            return Err(ModelViolation::MissingEdgeWitness { first: a, second: b });
        }
    }
    Ok(())
}

/// Max degree seen while repeatedly deleting a minimum-degree vertex. A
/// lower bound for treewidth, and treewidth never grows under minors.
fn degeneracy(g: &FiniteGraph) -> usize {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = neighbor_indices(g);
    let mut alive: Vec<bool> = vec![true; n];
    let mut best = 0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (adj[v].len(), v))
            .expect("some vertex is alive");
        best = best.max(adj[v].len());
        alive[v] = false;
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for u in nb {
            adj[u].remove(&v);
        }
        adj[v].clear();
    }
    best
}

fn neighbor_indices(g: &FiniteGraph) -> Vec<BTreeSet<usize>> {
    let index: BTreeMap<VertexId, usize> = g
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    g.vertices()
        .iter()
        .map(|&v| {
            g.neighbors(v)
                .expect("own vertex")
                .iter()
                .map(|u| index[u])
                .collect()
        })
        .collect()
}

/// Width of a greedy elimination order; an upper bound for treewidth.
/// `by_fill` picks the vertex whose neighborhood needs the fewest new edges
/// to become a clique, otherwise the minimum-degree vertex.
fn elimination_width(g: &FiniteGraph, by_fill: bool) -> usize {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = neighbor_indices(g);
    let mut alive: Vec<bool> = vec![true; n];
    let mut width = 0;
    for _ in 0..n {
        let pick = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| {
                let cost = if by_fill { fill_in(&adj, v) } else { adj[v].len() };
                (cost, v)
            })
            .expect("some vertex is alive");
        width = width.max(adj[pick].len());
        let nb: Vec<usize> = adj[pick].iter().copied().collect();
        for (i, &u) in nb.iter().enumerate() {
            for &w in &nb[i + 1..] {
                adj[u].insert(w);
                adj[w].insert(u);
            }
        }
        for &u in &nb {
            adj[u].remove(&pick);
        }
        adj[pick].clear();
        alive[pick] = false;
    }
    width
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nb: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &u) in nb.iter().enumerate() {
        for &w in &nb[i + 1..] {
            if !adj[u].contains(&w) {
                missing += 1;
            }
        }
    }
    missing
}

fn is_complete(g: &FiniteGraph) -> bool {
    let n = g.vertex_count();
    g.edge_count() == n * n.saturating_sub(1) / 2
}

struct Search<'a, C: Clock> {
    host: &'a FiniteGraph,
    pattern: &'a FiniteGraph,
    /// Pattern vertices by decreasing degree, ties by ascending id.
    order: Vec<VertexId>,
    /// demands[i]: earlier order positions the i-th set must reach.
    demands: Vec<Vec<usize>>,
    /// last_demander[j]: latest order position with a pattern edge to j.
    last_demander: Vec<usize>,
    complete: bool,
    budget: &'a SearchBudget,
    clock: &'a C,
    nodes: u64,
    exhausted: bool,
    owner: Vec<Option<usize>>,
    free_count: usize,
    sets: Vec<BTreeSet<VertexId>>,
    roots: Vec<VertexId>,
}

impl<'a, C: Clock> Search<'a, C> {
    fn new(
        host: &'a FiniteGraph,
        pattern: &'a FiniteGraph,
        budget: &'a SearchBudget,
        clock: &'a C,
    ) -> Self {
        let mut order: Vec<VertexId> = pattern.vertices().to_vec();
        order.sort_by_key(|&v| {
            (core::cmp::Reverse(pattern.degree(v).expect("pattern vertex")), v)
        });
        let position: BTreeMap<VertexId, usize> =
            order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut demands: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
        let mut last_demander: Vec<usize> = (0..order.len()).collect();
        for &(a, b) in pattern.edges() {
            let (i, j) = (position[&a], position[&b]);
            let (lo, hi) = (i.min(j), i.max(j));
            demands[hi].push(lo);
            last_demander[lo] = last_demander[lo].max(hi);
        }
        Search {
            host,
            pattern,
            order,
            demands,
            last_demander,
            complete: is_complete(pattern),
            budget,
            clock,
            nodes: 0,
            exhausted: false,
            owner: vec![None; host.vertex_count()],
            free_count: host.vertex_count(),
            sets: Vec::new(),
            roots: Vec::new(),
        }
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes || self.clock.elapsed() > self.budget.time_cap {
            self.exhausted = true;
            return false;
        }
        true
    }

    fn index(&self, v: VertexId) -> usize {
        self.host.index_of(v).expect("host vertex")
    }

    fn model(&self) -> MinorModel {
        let branch_sets: BTreeMap<VertexId, BTreeSet<VertexId>> = self
            .order
            .iter()
            .zip(&self.sets)
            .map(|(&p, s)| (p, s.clone()))
            .collect();
        MinorModel {
            pattern: self.pattern.clone(),
            host: self.host.clone(),
            branch_sets,
        }
    }

    fn assign(&mut self, i: usize) -> Option<MinorModel> {
        if i == self.order.len() {
            return Some(self.model());
        }
        if self.free_count < self.order.len() - i {
            return None;
        }
        let candidates: Vec<VertexId> = self.host.vertices().to_vec();
        for r in candidates {
            if self.owner[self.index(r)].is_some() {
                continue;
            }
            // Complete patterns are symmetric under permuting branch sets,
            // so roots may be forced to ascend.
            if self.complete && i > 0 && r <= self.roots[i - 1] {
                continue;
            }
            if !self.tick() {
                return None;
            }
            let ri = self.index(r);
            self.owner[ri] = Some(i);
            self.free_count -= 1;
            self.sets.push(BTreeSet::from([r]));
            self.roots.push(r);

            let mut banned = BTreeSet::new();
            let found = self.grow(i, r, &mut banned);

            self.sets.pop();
            self.roots.pop();
            self.owner[ri] = None;
            self.free_count += 1;
            if found.is_some() || self.exhausted {
                return found;
            }
        }
        None
    }

    /// Enumerates connected supersets of the current set without repeats:
    /// after a candidate has been fully explored it is banned from the rest
    /// of this subtree. Only vertices above the root are added, so each set
    /// is generated exactly once, rooted at its minimum.
    fn grow(
        &mut self,
        i: usize,
        root: VertexId,
        banned: &mut BTreeSet<VertexId>,
    ) -> Option<MinorModel> {
        if self.demands_met(i) && self.future_feasible(i) {
            if let Some(m) = self.assign(i + 1) {
                return Some(m);
            }
            if self.exhausted {
                return None;
            }
        }
        let remaining = self.order.len() - i - 1;
        if self.free_count <= remaining {
            return None;
        }
        let mut ext: Vec<VertexId> = Vec::new();
        for &v in self.sets[i].clone().iter() {
            for &u in self.host.neighbors(v).expect("host vertex") {
                if u > root
                    && self.owner[self.index(u)].is_none()
                    && !banned.contains(&u)
                    && !ext.contains(&u)
                {
                    ext.push(u);
                }
            }
        }
        ext.sort_unstable();
        let mut newly_banned: Vec<VertexId> = Vec::new();
        for v in ext {
            if !self.tick() {
                break;
            }
            let vi = self.index(v);
            self.owner[vi] = Some(i);
            self.free_count -= 1;
            self.sets[i].insert(v);

            let found = self.grow(i, root, banned);

            self.sets[i].remove(&v);
            self.owner[vi] = None;
            self.free_count += 1;
            if found.is_some() {
                return found;
            }
            if self.exhausted {
                break;
            }
            banned.insert(v);
            newly_banned.push(v);
        }
        for v in newly_banned {
            banned.remove(&v);
        }
        None
    }

    fn demands_met(&self, i: usize) -> bool {
        self.demands[i].iter().all(|&j| self.sets_touch(i, j))
    }

    fn sets_touch(&self, i: usize, j: usize) -> bool {
        self.sets[i].iter().any(|&v| {
            self.host
                .neighbors(v)
                .expect("host vertex")
                .iter()
                .any(|&u| self.owner[self.index(u)] == Some(j))
        })
    }

    /// Every placed set that a future set must reach needs at least one free
    /// neighbor left, otherwise the branch is dead.
    fn future_feasible(&self, i: usize) -> bool {
        (0..=i).all(|s| {
            if self.last_demander[s] <= i {
                return true;
            }
            self.sets[s].iter().any(|&v| {
                self.host
                    .neighbors(v)
                    .expect("host vertex")
                    .iter()
                    .any(|&u| self.owner[self.index(u)].is_none())
            })
        })
    }

    /// Direct search for a complete subgraph of the pattern's order; for
    /// complete patterns a hit yields a model of singleton branch sets.
    fn find_clique(&mut self) -> Option<MinorModel> {
        let m = self.order.len();
        let mut clique: Vec<VertexId> = Vec::new();
        let cands: Vec<VertexId> = self.host.vertices().to_vec();
        self.clique_rec(&mut clique, &cands, m)
    }

    fn clique_rec(
        &mut self,
        clique: &mut Vec<VertexId>,
        cands: &[VertexId],
        m: usize,
    ) -> Option<MinorModel> {
        if clique.len() == m {
            let branch_sets: BTreeMap<VertexId, BTreeSet<VertexId>> = self
                .order
                .iter()
                .zip(clique.iter())
                .map(|(&p, &v)| (p, BTreeSet::from([v])))
                .collect();
            return Some(MinorModel {
                pattern: self.pattern.clone(),
                host: self.host.clone(),
                branch_sets,
            });
        }
        if clique.len() + cands.len() < m {
            return None;
        }
        for (idx, &v) in cands.iter().enumerate() {
            if !self.tick() {
                return None;
            }
            let next: Vec<VertexId> = cands[idx + 1..]
                .iter()
                .copied()
                .filter(|&u| self.host.has_edge(u, v))
                .collect();
            clique.push(v);
            let found = self.clique_rec(clique, &next, m);
            clique.pop();
            if found.is_some() || self.exhausted {
                return found;
            }
        }
        None
    }
}

/// Decides whether `pattern` is a minor of `host` within the budget, with
/// the node budget as the only effective limit (see [`has_minor_with_clock`]
/// for wall-time caps). A `No` is exhaustive; budget overruns are reported
/// as [`MinorOutcome::BudgetExhausted`], never as a refutation.
pub fn has_minor(
    host: &FiniteGraph,
    pattern: &FiniteGraph,
    budget: &SearchBudget,
) -> (MinorOutcome, SearchStats) {
    has_minor_with_clock(host, pattern, budget, &NullClock)
}

pub fn has_minor_with_clock<C: Clock>(
    host: &FiniteGraph,
    pattern: &FiniteGraph,
    budget: &SearchBudget,
    clock: &C,
) -> (MinorOutcome, SearchStats) {
    let stats = SearchStats::default();
    if pattern.vertex_count() == 0 {
        let model = MinorModel {
            pattern: pattern.clone(),
            host: host.clone(),
            branch_sets: BTreeMap::new(),
        };
        return (MinorOutcome::Yes(model), stats);
    }
    if pattern.vertex_count() > host.vertex_count()
        || pattern.edge_count() > host.edge_count()
    {
        return (MinorOutcome::No, stats);
    }
    // Elimination width bounds host treewidth from above; degeneracy bounds
    // pattern treewidth from below; minors cannot raise treewidth.
    let host_width = elimination_width(host, false).min(elimination_width(host, true));
    if host_width < degeneracy(pattern) {
        return (MinorOutcome::No, stats);
    }

    let mut search = Search::new(host, pattern, budget, clock);
    if search.complete {
        if let Some(model) = search.find_clique() {
            return (MinorOutcome::Yes(model), SearchStats { nodes: search.nodes });
        }
        if search.exhausted {
            return (MinorOutcome::BudgetExhausted, SearchStats { nodes: search.nodes });
        }
    }
    let outcome = match search.assign(0) {
        Some(model) => MinorOutcome::Yes(model),
        None if search.exhausted => MinorOutcome::BudgetExhausted,
        None => MinorOutcome::No,
    };
    (outcome, SearchStats { nodes: search.nodes })
}

/// Largest order of a complete minor, probing orders upward. The budget
/// applies to each probe separately; stats accumulate across probes.
pub fn hadwiger_number(
    host: &FiniteGraph,
    budget: &SearchBudget,
) -> (HadwigerResult, SearchStats) {
    hadwiger_number_with_clock(host, budget, &NullClock)
}

pub fn hadwiger_number_with_clock<C: Clock>(
    host: &FiniteGraph,
    budget: &SearchBudget,
    clock: &C,
) -> (HadwigerResult, SearchStats) {
    let mut best = 0;
    let mut total = SearchStats::default();
    for n in 1..=host.vertex_count() + 1 {
        let pattern = FiniteGraph::complete(n as u32);
        let (outcome, stats) = has_minor_with_clock(host, &pattern, budget, clock);
        total.nodes += stats.nodes;
        match outcome {
            MinorOutcome::Yes(_) => best = n,
            MinorOutcome::No => return (HadwigerResult::Exact(best), total),
            MinorOutcome::BudgetExhausted => {
                return (HadwigerResult::LowerBound(best), total)
            }
        }
    }
    (HadwigerResult::Exact(best), total)
}

/// Exhaustive reference decision, independent of the search above: tries
/// every assignment of host vertices to pattern branch sets (plus "unused")
/// and checks the model conditions directly. Exponential; for small hosts
/// and cross-checking only. For complete patterns the assignment is
/// canonicalized (classes appear in first-use order), which divides the work
/// by the number of branch set permutations without losing any model.
pub fn reference_has_minor(host: &FiniteGraph, pattern: &FiniteGraph) -> bool {
    let k = pattern.vertex_count();
    if k == 0 {
        return true;
    }
    let n = host.vertex_count();
    if k > n {
        return false;
    }
    let complete = is_complete(pattern);
    let mut labels: Vec<usize> = vec![0; n];
    let mut class_sizes: Vec<usize> = vec![0; k + 1];
    enumerate(host, pattern, complete, &mut labels, &mut class_sizes, 0, 0)
}

fn enumerate(
    host: &FiniteGraph,
    pattern: &FiniteGraph,
    complete: bool,
    labels: &mut Vec<usize>,
    class_sizes: &mut Vec<usize>,
    pos: usize,
    used: usize,
) -> bool {
    let k = pattern.vertex_count();
    let n = host.vertex_count();
    let missing = k - used;
    if n - pos < missing {
        return false;
    }
    if pos == n {
        return labeling_is_model(host, pattern, complete, labels);
    }
    let top = if complete { (used + 1).min(k) } else { k };
    for lab in 0..=top {
        labels[pos] = lab;
        class_sizes[lab] += 1;
        let now_used = if lab > 0 && class_sizes[lab] == 1 { used + 1 } else { used };
        if enumerate(host, pattern, complete, labels, class_sizes, pos + 1, now_used) {
            return true;
        }
        class_sizes[lab] -= 1;
    }
    labels[pos] = 0;
    false
}

fn labeling_is_model(
    host: &FiniteGraph,
    pattern: &FiniteGraph,
    complete: bool,
    labels: &[usize],
) -> bool {
    let k = pattern.vertex_count();
    let mut classes: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); k];
    for (i, &lab) in labels.iter().enumerate() {
        if lab > 0 {
            classes[lab - 1].insert(host.vertices()[i]);
        }
    }
    if classes.iter().any(|c| c.is_empty()) {
        return false;
    }
    for c in &classes {
        if !host.is_connected_set(c).expect("host vertices") {
            return false;
        }
    }
    let mut touching: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(u, v) in host.edges() {
        let (a, b) = (
            labels[host.index_of(u).expect("edge endpoint")],
            labels[host.index_of(v).expect("edge endpoint")],
        );
        if a > 0 && b > 0 && a != b {
            touching.insert((a.min(b) - 1, a.max(b) - 1));
        }
    }
    if complete {
        (0..k).all(|a| (a + 1..k).all(|b| touching.contains(&(a, b))))
    } else {
        let pv = pattern.vertices();
        pattern.edges().iter().all(|&(a, b)| {
            let ia = pv.iter().position(|&v| v == a).expect("pattern vertex");
            let ib = pv.iter().position(|&v| v == b).expect("pattern vertex");
            touching.contains(&(ia.min(ib), ia.max(ib)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{cut_window, FamilySpec};

    fn cycle(n: u32) -> FiniteGraph {
        FiniteGraph::new(0..n, (0..n).map(|i| (i, (i + 1) % n)).map(|(a, b)| (a.min(b), a.max(b))))
            .unwrap()
    }

    fn path(n: u32) -> FiniteGraph {
        FiniteGraph::new(0..n, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn petersen() -> FiniteGraph {
        let outer = (0..5u32).map(|i| (i, (i + 1) % 5)).map(|(a, b)| (a.min(b), a.max(b)));
        let spokes = (0..5u32).map(|i| (i, i + 5));
        let inner = (0..5u32).map(|i| (5 + i, 5 + (i + 2) % 5)).map(|(a, b)| (a.min(b), a.max(b)));
        FiniteGraph::new(0..10, outer.chain(spokes).chain(inner)).unwrap()
    }

    fn yes_model(outcome: MinorOutcome) -> MinorModel {
        match outcome {
            MinorOutcome::Yes(m) => m,
            other => panic!("expected a model, got {other:?}"),
        }
    }

    #[test]
    fn triangle_minor_of_square_cycle() {
        let (outcome, stats) = has_minor(&cycle(4), &FiniteGraph::complete(3), &SearchBudget::default());
        let model = yes_model(outcome);
        verify_model(&model).unwrap();
        assert!(stats.nodes > 0);
    }

    #[test]
    fn k4_is_not_a_minor_of_a_cycle() {
        let (outcome, _) = has_minor(&cycle(4), &FiniteGraph::complete(4), &SearchBudget::default());
        assert_eq!(outcome, MinorOutcome::No);
    }

    #[test]
    fn complete_host_contains_itself() {
        let k5 = FiniteGraph::complete(5);
        let (outcome, _) = has_minor(&k5, &k5, &SearchBudget::default());
        verify_model(&yes_model(outcome)).unwrap();
    }

    #[test]
    fn petersen_has_a_k5_minor_but_not_k6() {
        let host = petersen();
        let (outcome, _) = has_minor(&host, &FiniteGraph::complete(5), &SearchBudget::default());
        let model = yes_model(outcome);
        verify_model(&model).unwrap();
        let (outcome, _) = has_minor(&host, &FiniteGraph::complete(6), &SearchBudget::default());
        assert_eq!(outcome, MinorOutcome::No);
    }

    #[test]
    fn ladder_window_excludes_k4() {
        let w = cut_window(&FamilySpec::ladder(), 8).unwrap();
        let (outcome, _) = has_minor(&w.graph, &FiniteGraph::complete(4), &SearchBudget::default());
        assert_eq!(outcome, MinorOutcome::No);
    }

    #[test]
    fn cycles_are_minors_of_subdivisions() {
        // Subgraph relations are found as minors too.
        let host = petersen();
        let (outcome, _) = has_minor(&host, &cycle(5), &SearchBudget::default());
        verify_model(&yes_model(outcome)).unwrap();
    }

    #[test]
    fn hadwiger_numbers() {
        let budget = SearchBudget::default();
        let (r, _) = hadwiger_number(&cycle(4), &budget);
        assert_eq!(r, HadwigerResult::Exact(3));
        let (r, _) = hadwiger_number(&FiniteGraph::complete(5), &budget);
        assert_eq!(r, HadwigerResult::Exact(5));
        let ladder = cut_window(&FamilySpec::ladder(), 6).unwrap();
        let (r, _) = hadwiger_number(&ladder.graph, &budget);
        assert_eq!(r, HadwigerResult::Exact(3));
        let tree = cut_window(&FamilySpec::regular_tree(3).unwrap(), 4).unwrap();
        let (r, _) = hadwiger_number(&tree.graph.square(), &budget);
        assert_eq!(r, HadwigerResult::Exact(4));
        let empty = FiniteGraph::new([], []).unwrap();
        let (r, _) = hadwiger_number(&empty, &budget);
        assert_eq!(r, HadwigerResult::Exact(0));
    }

    #[test]
    fn tiny_budget_reports_exhaustion_not_refutation() {
        let budget = SearchBudget::nodes(1);
        let (outcome, stats) = has_minor(&cycle(4), &FiniteGraph::complete(3), &budget);
        assert_eq!(outcome, MinorOutcome::BudgetExhausted);
        assert!(stats.nodes >= 1);
    }

    #[test]
    fn expired_clock_reports_exhaustion() {
        struct StuckClock;
        impl Clock for StuckClock {
            fn elapsed(&self) -> Duration {
                Duration::from_secs(3600)
            }
        }
        let budget = SearchBudget { max_nodes: u64::MAX, time_cap: Duration::from_secs(1) };
        let (outcome, _) =
            has_minor_with_clock(&cycle(4), &FiniteGraph::complete(3), &budget, &StuckClock);
        assert_eq!(outcome, MinorOutcome::BudgetExhausted);
    }

    #[test]
    fn empty_pattern_is_always_a_minor() {
        let empty = FiniteGraph::new([], []).unwrap();
        let (outcome, _) = has_minor(&cycle(4), &empty, &SearchBudget::default());
        verify_model(&yes_model(outcome)).unwrap();
    }

    #[test]
    fn agreement_with_reference_enumeration() {
        let k5_minus_edge = FiniteGraph::new(
            0..5,
            [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3)],
        )
        .unwrap();
        let star5 = FiniteGraph::new(0..6, (1..6).map(|i| (0, i))).unwrap();
        let grid1 = cut_window(&FamilySpec::grid_z2(), 1).unwrap().graph;
        let hosts = [cycle(4), cycle(6), path(5), star5, grid1, k5_minus_edge];
        let patterns = [
            FiniteGraph::complete(2),
            FiniteGraph::complete(3),
            FiniteGraph::complete(4),
            cycle(4),
            path(3),
        ];
        for host in &hosts {
            for pattern in &patterns {
                let (outcome, _) = has_minor(host, pattern, &SearchBudget::default());
                let expected = reference_has_minor(host, pattern);
                match outcome {
                    MinorOutcome::Yes(model) => {
                        verify_model(&model).unwrap();
                        assert!(expected, "search found a model the reference missed");
                    }
                    MinorOutcome::No => assert!(!expected, "reference found a model the search missed"),
                    MinorOutcome::BudgetExhausted => panic!("budget too small for the corpus"),
                }
            }
        }
        // The reference agrees on a larger complete-pattern case too.
        assert!(reference_has_minor(&petersen(), &FiniteGraph::complete(5)));
        assert!(!reference_has_minor(&petersen(), &FiniteGraph::complete(6)));
    }

    #[test]
    fn model_checker_rejects_broken_models() {
        let (outcome, _) = has_minor(&cycle(4), &FiniteGraph::complete(3), &SearchBudget::default());
        let good = yes_model(outcome);

        let mut broken = good.clone();
        broken.branch_sets.remove(&0);
        assert_eq!(verify_model(&broken), Err(ModelViolation::WrongPatternVertices));

        let mut broken = good.clone();
        broken.branch_sets.get_mut(&0).unwrap().clear();
        assert_eq!(
            verify_model(&broken),
            Err(ModelViolation::EmptyBranchSet { pattern_vertex: 0 })
        );

        let mut broken = good.clone();
        broken.branch_sets.get_mut(&0).unwrap().insert(99);
        assert_eq!(
            verify_model(&broken),
            Err(ModelViolation::UnknownHostVertex { pattern_vertex: 0, vertex: 99 })
        );

        // Two branch sets sharing a vertex.
        let mut broken = good.clone();
        let stolen = *broken.branch_sets[&1].iter().next().unwrap();
        broken.branch_sets.get_mut(&0).unwrap().insert(stolen);
        assert!(matches!(verify_model(&broken), Err(ModelViolation::Overlap { .. })));

        // A disconnected branch set: two opposite corners of the 4-cycle.
        let host = cycle(4);
        let model = MinorModel {
            pattern: FiniteGraph::complete(2),
            host: host.clone(),
            branch_sets: BTreeMap::from([
                (0, BTreeSet::from([0, 2])),
                (1, BTreeSet::from([1])),
            ]),
        };
        assert_eq!(
            verify_model(&model),
            Err(ModelViolation::Disconnected { pattern_vertex: 0 })
        );

        // No witness edge between the two sets.
        let host = path(4);
        let model = MinorModel {
            pattern: FiniteGraph::complete(2),
            host: host.clone(),
            branch_sets: BTreeMap::from([
                (0, BTreeSet::from([0])),
                (1, BTreeSet::from([3])),
            ]),
        };
        assert_eq!(
            verify_model(&model),
            Err(ModelViolation::MissingEdgeWitness { first: 0, second: 1 })
        );
    }

    #[test]
    fn builder_models_pass_the_model_checker() {
        use crate::builder::build_km_minor;
        use crate::rays::disjoint_rays;
        let w = cut_window(&FamilySpec::grid_z2(), 8).unwrap();
        let bundle = disjoint_rays(&w, 4, 2).unwrap().expect("grid supports four rays");
        let model = build_km_minor(&w, &bundle).unwrap();
        verify_model(&model).unwrap();
        assert_eq!(model.pattern.vertex_count(), 4);
    }
}
