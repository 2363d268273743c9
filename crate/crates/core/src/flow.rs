//! Unit-capacity max-flow on vertex-split networks, used to find maximum
//! systems of vertex-disjoint paths. Deterministic: arcs are laid out in
//! ascending vertex order and augmenting paths are found by BFS, so the
//! extracted paths depend only on the input graph.

use crate::graph::{FiniteGraph, VertexId};
use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

struct Arc {
    to: usize,
    cap: u8,
    rev: usize,
    fwd: bool,
}

struct Net {
    adj: Vec<Vec<Arc>>,
}

impl Net {
    fn new(nodes: usize) -> Self {
        Net { adj: (0..nodes).map(|_| Vec::new()).collect() }
    }

    fn add_arc(&mut self, from: usize, to: usize) {
        let rev_from = self.adj[to].len();
        let rev_to = self.adj[from].len();
        self.adj[from].push(Arc { to, cap: 1, rev: rev_from, fwd: true });
        self.adj[to].push(Arc { to: from, cap: 0, rev: rev_to, fwd: false });
    }

    /// One round of BFS augmentation; returns false when no path remains.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let n = self.adj.len();
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        'search: while let Some(u) = queue.pop_front() {
            for (idx, arc) in self.adj[u].iter().enumerate() {
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    parent[arc.to] = Some((u, idx));
                    if arc.to == t {
                        break 'search;
                    }
                    queue.push_back(arc.to);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut v = t;
        while v != s {
            let (u, idx) = parent[v].expect("augmenting path is connected");
            let rev = self.adj[u][idx].rev;
            self.adj[u][idx].cap -= 1;
            self.adj[v][rev].cap += 1;
            v = u;
        }
        true
    }
}

/// Maximum set of vertex-disjoint paths that start at a distinct entry
/// vertex, immediately leave into `interior`, and end on an exit vertex.
///
/// Entries must be disjoint from the interior; exits must lie inside it.
/// Paths never visit a second entry vertex. Returned paths are ordered by
/// their entry vertex id.
pub(crate) fn max_vertex_disjoint_paths(
    g: &FiniteGraph,
    interior: &BTreeSet<VertexId>,
    entries: &BTreeSet<VertexId>,
    exits: &BTreeSet<VertexId>,
) -> Vec<Vec<VertexId>> {
    debug_assert!(entries.iter().all(|v| !interior.contains(v)));
    debug_assert!(exits.iter().all(|v| interior.contains(v)));

    let members: Vec<VertexId> = entries.iter().chain(interior.iter()).copied().collect();
    let mut slot: alloc::collections::BTreeMap<VertexId, usize> = alloc::collections::BTreeMap::new();
    let mut sorted = members;
    sorted.sort_unstable();
    for (i, v) in sorted.iter().enumerate() {
        slot.insert(*v, i);
    }
    let n = sorted.len();
    let node_in = |i: usize| 2 * i;
    let node_out = |i: usize| 2 * i + 1;
    let source = 2 * n;
    let sink = 2 * n + 1;

    let mut net = Net::new(2 * n + 2);
    for i in 0..n {
        net.add_arc(node_in(i), node_out(i));
    }
    for (&v, &i) in &slot {
        for &w in g.neighbors(v).expect("flow vertices come from the graph") {
            if let Some(&j) = slot.get(&w) {
                // Arcs never point into an entry vertex, so every path
                // crosses the entry frontier exactly once.
                if interior.contains(&w) {
                    net.add_arc(node_out(i), node_in(j));
                }
            }
        }
    }
    for e in entries {
        net.add_arc(source, node_in(slot[e]));
    }
    for x in exits {
        net.add_arc(node_out(slot[x]), sink);
    }

    while net.augment(source, sink) {}

    // Trace each unit of flow from its entry; vertex capacities make the
    // walk unambiguous. Consumed arcs get their capacity restored so a
    // hypothetical circulation can never be walked twice.
    let mut paths = Vec::new();
    for e in entries {
        let i = slot[e];
        let from_source = net.adj[source]
            .iter()
            .position(|a| a.fwd && a.to == node_in(i) && a.cap == 0);
        if from_source.is_none() {
            continue;
        }
        let mut path = Vec::new();
        let mut u = node_in(i);
        loop {
            if u == sink {
                break;
            }
            if u % 2 == 0 {
                // in-node: record the vertex, move through its split arc.
                path.push(sorted[u / 2]);
            }
            let next = net.adj[u]
                .iter()
                .position(|a| a.fwd && a.cap == 0)
                .expect("flow conservation");
            net.adj[u][next].cap = 1;
            u = net.adj[u][next].to;
        }
        paths.push(path);
    }
    paths
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(vs: &[VertexId]) -> BTreeSet<VertexId> {
        vs.iter().copied().collect()
    }

    #[test]
    fn single_path() {
        // 0 - 1 - 2
        let g = FiniteGraph::new(0..3, [(0, 1), (1, 2)]).unwrap();
        let paths = max_vertex_disjoint_paths(&g, &set(&[1, 2]), &set(&[0]), &set(&[2]));
        assert_eq!(paths, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn bottleneck_limits_paths() {
        // Two entries funneled through one cut vertex.
        //   0        4
        //    \      /
        //     2 -- 3
        //    /      \
        //   1        5
        let g = FiniteGraph::new(0..6, [(0, 2), (1, 2), (2, 3), (3, 4), (3, 5)]).unwrap();
        let paths =
            max_vertex_disjoint_paths(&g, &set(&[2, 3, 4, 5]), &set(&[0, 1]), &set(&[4, 5]));
        assert_eq!(paths.len(), 1);
    }

    #[test]
    fn parallel_paths_stay_disjoint() {
        // 0 - 2 - 4 and 1 - 3 - 5
        let g = FiniteGraph::new(0..6, [(0, 2), (2, 4), (1, 3), (3, 5), (2, 3)]).unwrap();
        let paths =
            max_vertex_disjoint_paths(&g, &set(&[2, 3, 4, 5]), &set(&[0, 1]), &set(&[4, 5]));
        assert_eq!(paths.len(), 2);
        let mut all: Vec<VertexId> = paths.concat();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), paths[0].len() + paths[1].len(), "paths share a vertex");
    }

    #[test]
    fn entry_adjacent_to_exit() {
        let g = FiniteGraph::new(0..2, [(0, 1)]).unwrap();
        let paths = max_vertex_disjoint_paths(&g, &set(&[1]), &set(&[0]), &set(&[1]));
        assert_eq!(paths, vec![vec![0, 1]]);
    }
}
