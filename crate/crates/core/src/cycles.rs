//! Berge cycles in uniform hypergraphs.
//!
//! A cycle of length `l >= 2` is a sequence of distinct edges `e_1..e_l`
//! together with distinct linking vertices `v_1..v_l` such that `v_i` lies in
//! `e_i` and `e_{i+1}` (indices cyclic). Such cycles correspond one-to-one to
//! cycles of length `2l` in the bipartite incidence graph, which is what the
//! girth computation searches.

use std::cmp::Ordering;
use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::ap::UniformHypergraph;
use crate::decider::Budget;
use crate::{invalid, Error, Result};

/// Bipartite graph on `V(H)` followed by `E(H)`: node `v < num_vertices` is
/// a vertex, node `num_vertices + e` is edge `e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGraph {
    num_vertices: usize,
    num_edges: usize,
    adjacency: Vec<Vec<u32>>,
}

impl IncidenceGraph {
    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_links(&self) -> usize {
        self.adjacency[..self.num_vertices]
            .iter()
            .map(Vec::len)
            .sum()
    }

    pub fn num_vertex_nodes(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edge_nodes(&self) -> usize {
        self.num_edges
    }

    pub fn neighbours(&self, node: usize) -> &[u32] {
        &self.adjacency[node]
    }

    pub fn edge_node(&self, edge: usize) -> usize {
        self.num_vertices + edge
    }
}

pub fn incidence_graph<V>(h: &UniformHypergraph<V>) -> IncidenceGraph {
    let nv = h.num_vertices();
    let mut adjacency = vec![Vec::new(); nv + h.num_edges()];
    for (ei, e) in h.edges().iter().enumerate() {
        for &v in e {
            adjacency[v as usize].push((nv + ei) as u32);
            adjacency[nv + ei].push(v);
        }
    }
    IncidenceGraph {
        num_vertices: nv,
        num_edges: h.num_edges(),
        adjacency,
    }
}

/// Girth of a hypergraph; acyclic hypergraphs have infinite girth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Girth {
    Finite(u32),
    Infinite,
}

impl Girth {
    pub fn is_at_least(&self, g: u32) -> bool {
        match self {
            Girth::Finite(l) => *l >= g,
            Girth::Infinite => true,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(l) => write!(f, "{l}"),
            Girth::Infinite => f.write_str("infinity"),
        }
    }
}

/// Finite girth as a number, infinity as the string `"infinity"`.
impl Serialize for Girth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Girth::Finite(l) => s.serialize_u32(*l),
            Girth::Infinite => s.serialize_str("infinity"),
        }
    }
}

/// Two edges sharing at least two vertices form a cycle of length two.
fn has_two_cycle<V>(h: &UniformHypergraph<V>) -> bool {
    let mut seen: HashSet<(u32, u32)> = HashSet::new();
    for e in h.edges() {
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                if !seen.insert((e[i], e[j])) {
                    return true;
                }
            }
        }
    }
    false
}

/// Shortest cycle in the incidence graph through BFS from every node,
/// ignoring cycles of length `>= limit`. Returns the length in the
/// incidence graph.
fn shortest_incidence_cycle(g: &IncidenceGraph, limit: usize) -> Option<usize> {
    let n = g.num_nodes();
    let mut best = limit;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    let mut touched = Vec::new();
    for s in 0..n {
        for &t in &touched {
            dist[t] = usize::MAX;
            parent[t] = usize::MAX;
        }
        touched.clear();
        queue.clear();
        dist[s] = 0;
        touched.push(s);
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            // Any cycle found from here on is at least 2 * dist[u] + 1 long.
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &w in g.neighbours(u) {
                let w = w as usize;
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else if parent[u] != w {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
        if best == 4 {
            break;
        }
    }
    (best < limit).then_some(best)
}

/// Minimum cycle length, from the incidence graph.
pub fn girth<V>(h: &UniformHypergraph<V>) -> Girth {
    if has_two_cycle(h) {
        return Girth::Finite(2);
    }
    match shortest_incidence_cycle(&incidence_graph(h), usize::MAX) {
        Some(len) => Girth::Finite((len / 2) as u32),
        None => Girth::Infinite,
    }
}

/// True iff every cycle has length at least `g`; stops at the first
/// incidence cycle shorter than `2g`.
pub fn has_girth_at_least<V>(h: &UniformHypergraph<V>, g: u32) -> Result<bool> {
    if g < 2 {
        return Err(invalid(format!(
            "girth threshold must be at least 2, got {g}"
        )));
    }
    if g == 2 {
        return Ok(true);
    }
    if has_two_cycle(h) {
        return Ok(false);
    }
    Ok(shortest_incidence_cycle(&incidence_graph(h), 2 * g as usize).is_none())
}

/// A cycle given by its edge order and linking vertices (indices into the
/// hypergraph). `linking_vertices[i]` lies in `edges[i]` and `edges[i + 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct HypergraphCycle {
    pub edges: Vec<u32>,
    pub linking_vertices: Vec<u32>,
}

impl HypergraphCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn sorted_edges(&self) -> Vec<u32> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    /// All vertices covered by the cycle's edges, sorted.
    pub fn span<V>(&self, h: &UniformHypergraph<V>) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .edges
            .iter()
            .flat_map(|&e| h.edges()[e as usize].iter().copied())
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

fn cycle_order(a: &HypergraphCycle, b: &HypergraphCycle) -> Ordering {
    a.sorted_edges()
        .cmp(&b.sorted_edges())
        .then_with(|| a.edges.cmp(&b.edges))
        .then_with(|| a.linking_vertices.cmp(&b.linking_vertices))
}

/// Checks the defining conditions of a cycle directly.
pub fn is_valid_cycle<V>(h: &UniformHypergraph<V>, c: &HypergraphCycle) -> bool {
    let l = c.edges.len();
    if l < 2 || c.linking_vertices.len() != l {
        return false;
    }
    let distinct = |xs: &[u32]| xs.iter().collect::<HashSet<_>>().len() == xs.len();
    if !distinct(&c.edges) || !distinct(&c.linking_vertices) {
        return false;
    }
    if c.edges.iter().any(|&e| e as usize >= h.num_edges()) {
        return false;
    }
    (0..l).all(|i| {
        let v = c.linking_vertices[i];
        h.edges()[c.edges[i] as usize].contains(&v)
            && h.edges()[c.edges[(i + 1) % l] as usize].contains(&v)
    })
}

/// Whether the sub-hypergraph formed by `edges` contains a cycle, i.e.
/// whether its incidence graph is not a forest.
fn edge_set_has_cycle<V>(h: &UniformHypergraph<V>, edges: &[u32]) -> bool {
    let mut verts: Vec<u32> = edges
        .iter()
        .flat_map(|&e| h.edges()[e as usize].iter().copied())
        .collect();
    verts.sort_unstable();
    verts.dedup();
    // Union-find over vertex nodes then edge nodes.
    let nodes = verts.len() + edges.len();
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, &e) in edges.iter().enumerate() {
        let en = verts.len() + i;
        for v in &h.edges()[e as usize] {
            let vn = verts.binary_search(v).expect("vertex collected");
            let (a, b) = (find(&mut parent, en), find(&mut parent, vn));
            if a == b {
                return true;
            }
            parent[a] = b;
        }
    }
    false
}

struct CycleSearch<'a, V, F> {
    h: &'a UniformHypergraph<V>,
    incidence: Vec<Vec<u32>>,
    max_len: usize,
    steps: u64,
    limit: u64,
    edges: Vec<u32>,
    linking: Vec<u32>,
    visit: F,
}

impl<V, F: FnMut(&HypergraphCycle)> CycleSearch<'_, V, F> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.limit {
            return Err(Error::BudgetExhausted { budget: self.limit });
        }
        Ok(())
    }

    /// Closes the current path into cycles and, while the path is still
    /// acyclic, extends it.
    fn grow(&mut self, path_acyclic: bool) -> Result<()> {
        self.tick()?;
        let l = self.edges.len();
        let first = self.edges[0];
        let last = self.edges[l - 1];
        if l >= 2 {
            // One representative per reflection class.
            let canonical_edges = l == 2 || self.edges[1] < self.edges[l - 1];
            if canonical_edges {
                let first_edge = &self.h.edges()[first as usize];
                for &v in &self.h.edges()[last as usize] {
                    if !first_edge.contains(&v) || self.linking.contains(&v) {
                        continue;
                    }
                    if l == 2 && v < self.linking[0] {
                        continue;
                    }
                    if self.is_minimal() {
                        let mut linking = self.linking.clone();
                        linking.push(v);
                        (self.visit)(&HypergraphCycle {
                            edges: self.edges.clone(),
                            linking_vertices: linking,
                        });
                    }
                }
            }
        }
        if !path_acyclic || l >= self.max_len {
            return Ok(());
        }
        let last_edge = self.h.edges()[last as usize].clone();
        for v in last_edge {
            if self.linking.contains(&v) {
                continue;
            }
            for t in 0..self.incidence[v as usize].len() {
                let next = self.incidence[v as usize][t];
                if next <= first || self.edges.contains(&next) {
                    continue;
                }
                self.edges.push(next);
                self.linking.push(v);
                let acyclic = !edge_set_has_cycle(self.h, &self.edges);
                let res = self.grow(acyclic);
                self.edges.pop();
                self.linking.pop();
                res?;
            }
        }
        Ok(())
    }

    /// No cycle uses a proper subset of the current edges.
    fn is_minimal(&self) -> bool {
        let l = self.edges.len();
        (0..l).all(|skip| {
            let rest: Vec<u32> = (0..l)
                .filter(|&i| i != skip)
                .map(|i| self.edges[i])
                .collect();
            !edge_set_has_cycle(self.h, &rest)
        })
    }
}

/// Calls `visit` once for every minimal cycle of length `2..=max_len`, in
/// search order. A cycle is minimal when no shorter cycle uses a subset of
/// its edges. The budget caps the number of search steps.
pub fn for_each_minimal_cycle<V>(
    h: &UniformHypergraph<V>,
    max_len: u32,
    budget: Budget,
    visit: impl FnMut(&HypergraphCycle),
) -> Result<()> {
    if max_len < 2 {
        return Err(invalid(format!(
            "maximum cycle length must be at least 2, got {max_len}"
        )));
    }
    let mut search = CycleSearch {
        h,
        incidence: h.incidence_lists(),
        max_len: max_len as usize,
        steps: 0,
        limit: budget.limit().unwrap_or(u64::MAX),
        edges: Vec::new(),
        linking: Vec::new(),
        visit,
    };
    for e in 0..h.num_edges() as u32 {
        search.edges.push(e);
        search.grow(true)?;
        search.edges.pop();
    }
    Ok(())
}

/// Every minimal cycle of length `2..=max_len`, sorted by edge set.
pub fn enumerate_minimal_cycles<V>(
    h: &UniformHypergraph<V>,
    max_len: u32,
    budget: Budget,
) -> Result<Vec<HypergraphCycle>> {
    let mut found = Vec::new();
    for_each_minimal_cycle(h, max_len, budget, |c| found.push(c.clone()))?;
    found.sort_by(cycle_order);
    Ok(found)
}

/// Minimum length over enumerated minimal cycles; independent of the BFS in
/// [`girth`].
pub fn girth_by_enumeration<V>(h: &UniformHypergraph<V>, budget: Budget) -> Result<Girth> {
    let max_len = h.num_edges().min(h.num_vertices()).max(2) as u32;
    let mut shortest: Option<u32> = None;
    for_each_minimal_cycle(h, max_len, budget, |c| {
        let l = c.len() as u32;
        shortest = Some(shortest.map_or(l, |s| s.min(l)));
    })?;
    Ok(shortest.map_or(Girth::Infinite, Girth::Finite))
}

/// The vertex count and incidence degrees of one minimal cycle.
#[derive(Debug, Clone, Serialize)]
pub struct SpanCheck {
    pub cycle: HypergraphCycle,
    pub length: usize,
    pub span: usize,
    pub expected_span: usize,
    /// Each linking vertex lies in exactly two cycle edges.
    pub linking_degrees_ok: bool,
    /// Each other spanned vertex lies in exactly one cycle edge.
    pub other_degrees_ok: bool,
}

impl SpanCheck {
    pub fn pass(&self) -> bool {
        self.span == self.expected_span && self.linking_degrees_ok && self.other_degrees_ok
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanReport {
    pub k: u32,
    pub max_len: u32,
    /// Minimal cycles of length two, which the span identity does not cover.
    pub skipped_two_cycles: u64,
    /// Checked cycles per length, ascending.
    pub counts_by_length: Vec<(usize, u64)>,
    /// Checks that did not pass.
    pub failures: Vec<SpanCheck>,
}

impl SpanReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn checked(&self) -> u64 {
        self.counts_by_length.iter().map(|&(_, n)| n).sum()
    }
}

pub fn check_cycle_span<V>(h: &UniformHypergraph<V>, cycle: &HypergraphCycle) -> SpanCheck {
    let k = h.uniformity() as usize;
    let span = cycle.span(h);
    let degree = |v: u32| {
        cycle
            .edges
            .iter()
            .filter(|&&e| h.edges()[e as usize].contains(&v))
            .count()
    };
    SpanCheck {
        cycle: cycle.clone(),
        length: cycle.len(),
        span: span.len(),
        expected_span: (k - 1) * cycle.len(),
        linking_degrees_ok: cycle.linking_vertices.iter().all(|&v| degree(v) == 2),
        other_degrees_ok: span
            .iter()
            .filter(|v| !cycle.linking_vertices.contains(v))
            .all(|&v| degree(v) == 1),
    }
}

/// Checks that every minimal cycle of length `3..=max_len` spans exactly
/// `(k - 1) l` vertices, with linking vertices in two cycle edges and all
/// other vertices in one.
pub fn verify_minimal_cycle_spans<V>(
    h: &UniformHypergraph<V>,
    max_len: u32,
    budget: Budget,
) -> Result<SpanReport> {
    if max_len < 3 {
        return Err(invalid(format!(
            "maximum cycle length must be at least 3, got {max_len}"
        )));
    }
    let mut skipped_two_cycles = 0;
    let mut counts = vec![0u64; max_len as usize + 1];
    let mut failures = Vec::new();
    for_each_minimal_cycle(h, max_len, budget, |c| {
        if c.len() == 2 {
            skipped_two_cycles += 1;
            return;
        }
        counts[c.len()] += 1;
        let check = check_cycle_span(h, c);
        if !check.pass() {
            failures.push(check);
        }
    })?;
    Ok(SpanReport {
        k: h.uniformity(),
        max_len,
        skipped_two_cycles,
        counts_by_length: (3..counts.len())
            .filter(|&l| counts[l] > 0)
            .map(|l| (l, counts[l]))
            .collect(),
        failures,
    })
}
