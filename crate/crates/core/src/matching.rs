//! Bipartite multigraph primitives: matchings, edge coloring and port
//! replication for b-matchings.
//!
//! Functions return edge indices into the graph's edge list. Edges are visited
//! in `(left, right, id)` order so results do not depend on insertion order
//! beyond that key.

use std::collections::VecDeque;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub left: usize,
    pub right: usize,
    /// Caller payload, typically a flow index.
    pub id: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BipartiteMultigraph {
    left: usize,
    right: usize,
    edges: Vec<Edge>,
}

impl BipartiteMultigraph {
    pub fn new(left: usize, right: usize) -> Self {
        BipartiteMultigraph { left, right, edges: Vec::new() }
    }

    /// Adds an edge and returns its index.
    ///
    /// Panics if an endpoint is out of range.
    pub fn add_edge(&mut self, left: usize, right: usize, id: usize) -> usize {
        assert!(left < self.left && right < self.right, "edge ({left},{right}) outside {}x{}", self.left, self.right);
        self.edges.push(Edge { left, right, id });
        self.edges.len() - 1
    }

    pub fn left_count(&self) -> usize {
        self.left
    }

    pub fn right_count(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.left];
        for e in &self.edges {
            d[e.left] += 1;
        }
        d
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.right];
        for e in &self.edges {
            d[e.right] += 1;
        }
        d
    }

    pub fn max_degree(&self) -> usize {
        let l = self.left_degrees().into_iter().max().unwrap_or(0);
        let r = self.right_degrees().into_iter().max().unwrap_or(0);
        l.max(r)
    }

    fn sorted_edge_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&e| (self.edges[e], e));
        order
    }
}

/// True when no two of `edges` share an endpoint.
pub fn is_matching(g: &BipartiteMultigraph, edges: &[usize]) -> bool {
    let mut used_l = vec![false; g.left];
    let mut used_r = vec![false; g.right];
    for &e in edges {
        let Edge { left, right, .. } = g.edges[e];
        if used_l[left] || used_r[right] {
            return false;
        }
        used_l[left] = true;
        used_r[right] = true;
    }
    true
}

/// Maximum-cardinality matching by Hopcroft-Karp.
pub fn max_cardinality_matching(g: &BipartiteMultigraph) -> Vec<usize> {
    let (nl, nr) = (g.left, g.right);
    // One representative edge per (left, right) pair, in sorted order.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nl];
    for e in g.sorted_edge_order() {
        let Edge { left, right, .. } = g.edges[e];
        if adj[left].last().is_none_or(|&(r, _)| r != right) {
            adj[left].push((right, e));
        }
    }
    const FREE: usize = usize::MAX;
    let mut mate_l = vec![FREE; nl];
    let mut edge_l = vec![FREE; nl];
    let mut mate_r = vec![FREE; nr];
    let mut dist = vec![0usize; nl];

    loop {
        // BFS layers from free left vertices.
        let mut queue = VecDeque::new();
        let mut found = false;
        for u in 0..nl {
            if mate_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                let w = mate_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        let mut next = vec![0usize; nl];
        for u in 0..nl {
            if mate_l[u] == FREE {
                augment(u, &adj, &mut mate_l, &mut edge_l, &mut mate_r, &mut dist, &mut next);
            }
        }
    }

    fn augment(
        u: usize,
        adj: &[Vec<(usize, usize)>],
        mate_l: &mut [usize],
        edge_l: &mut [usize],
        mate_r: &mut [usize],
        dist: &mut [usize],
        next: &mut [usize],
    ) -> bool {
        while next[u] < adj[u].len() {
            let (v, e) = adj[u][next[u]];
            next[u] += 1;
            let w = mate_r[v];
            let ok = if w == usize::MAX { true } else { dist[w] == dist[u] + 1 && augment(w, adj, mate_l, edge_l, mate_r, dist, next) };
            if ok {
                mate_l[u] = v;
                edge_l[u] = e;
                mate_r[v] = u;
                return true;
            }
        }
        dist[u] = usize::MAX;
        false
    }

    let mut out: Vec<usize> = (0..nl).filter(|&u| mate_l[u] != FREE).map(|u| edge_l[u]).collect();
    out.sort_unstable();
    out
}

/// Maximum-weight matching via the Hungarian method on the dense
/// `max(L, R)` square assignment problem.
///
/// Among parallel edges only the heaviest (first in sorted order on ties) is
/// a candidate. Pairs assigned to a non-edge are dropped from the result.
pub fn max_weight_matching(g: &BipartiteMultigraph, weight: &[f64]) -> Vec<usize> {
    assert_eq!(weight.len(), g.edges.len(), "one weight per edge");
    let n = g.left.max(g.right);
    if n == 0 || g.edges.is_empty() {
        return Vec::new();
    }
    let mut best: Vec<Option<usize>> = vec![None; n * n];
    for e in g.sorted_edge_order() {
        let Edge { left, right, .. } = g.edges[e];
        let slot = &mut best[left * n + right];
        if slot.is_none_or(|b| weight[e] > weight[b]) {
            *slot = Some(e);
        }
    }
    let w = |i: usize, j: usize| best[i * n + j].map_or(0.0, |e| weight[e]);

    // Shortest augmenting path Hungarian algorithm minimizing -w, 1-based.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = -w(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut out: Vec<usize> = (1..=n).filter_map(|j| best[(p[j] - 1) * n + (j - 1)]).collect();
    out.sort_unstable();
    out
}

/// Partitions the edges into exactly `max_degree` matchings.
pub fn edge_color_bipartite(g: &BipartiteMultigraph) -> Vec<Vec<usize>> {
    let delta = g.max_degree();
    const NONE: usize = usize::MAX;
    let mut at_l = vec![NONE; g.left * delta];
    let mut at_r = vec![NONE; g.right * delta];
    let mut color = vec![NONE; g.edges.len()];

    for e in g.sorted_edge_order() {
        let Edge { left: u, right: v, .. } = g.edges[e];
        let a = (0..delta).find(|&c| at_l[u * delta + c] == NONE).expect("left vertex has a free color");
        let b = (0..delta).find(|&c| at_r[v * delta + c] == NONE).expect("right vertex has a free color");
        if at_r[v * delta + a] != NONE {
            // Flip the a/b alternating path starting at v; it cannot reach u.
            let mut path = Vec::new();
            let mut on_right = true;
            let mut x = v;
            let mut c = a;
            loop {
                let f = if on_right { at_r[x * delta + c] } else { at_l[x * delta + c] };
                if f == NONE {
                    break;
                }
                path.push(f);
                let ed = g.edges[f];
                x = if on_right { ed.left } else { ed.right };
                on_right = !on_right;
                c = if c == a { b } else { a };
            }
            for &f in &path {
                let ed = g.edges[f];
                at_l[ed.left * delta + color[f]] = NONE;
                at_r[ed.right * delta + color[f]] = NONE;
            }
            for &f in &path {
                let ed = g.edges[f];
                let nc = if color[f] == a { b } else { a };
                color[f] = nc;
                at_l[ed.left * delta + nc] = f;
                at_r[ed.right * delta + nc] = f;
            }
        }
        color[e] = a;
        at_l[u * delta + a] = e;
        at_r[v * delta + a] = e;
    }

    let mut classes = vec![Vec::new(); delta];
    for (e, &c) in color.iter().enumerate() {
        classes[c].push(e);
    }
    classes
}

/// A graph over port copies together with the copy-to-original maps.
///
/// Edge `i` of `graph` corresponds to edge `i` of the original graph and
/// keeps its payload id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitExpansion {
    pub graph: BipartiteMultigraph,
    pub left_origin: Vec<usize>,
    pub right_origin: Vec<usize>,
}

/// Replaces each vertex by `capacity` copies and deals its incident edges to
/// the copies round-robin in edge-index order.
pub fn expand_to_unit_graph(g: &BipartiteMultigraph, cap_left: &[u32], cap_right: &[u32]) -> UnitExpansion {
    assert_eq!(cap_left.len(), g.left);
    assert_eq!(cap_right.len(), g.right);
    fn copies(caps: &[u32]) -> (Vec<usize>, Vec<usize>) {
        let mut first = Vec::with_capacity(caps.len());
        let mut origin = Vec::new();
        for (v, &c) in caps.iter().enumerate() {
            assert!(c >= 1, "capacity must be positive");
            first.push(origin.len());
            origin.extend(std::iter::repeat_n(v, c as usize));
        }
        (first, origin)
    }
    let (first_l, left_origin) = copies(cap_left);
    let (first_r, right_origin) = copies(cap_right);
    let mut seen_l = vec![0usize; g.left];
    let mut seen_r = vec![0usize; g.right];
    let mut graph = BipartiteMultigraph::new(left_origin.len(), right_origin.len());
    for e in &g.edges {
        let l = first_l[e.left] + seen_l[e.left] % cap_left[e.left] as usize;
        let r = first_r[e.right] + seen_r[e.right] % cap_right[e.right] as usize;
        seen_l[e.left] += 1;
        seen_r[e.right] += 1;
        graph.add_edge(l, r, e.id);
    }
    UnitExpansion { graph, left_origin, right_origin }
}
