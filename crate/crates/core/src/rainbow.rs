//! The rainbow hypergraph `R(n, k, r)`.
//!
//! Vertices are pairs `(colour, x)` with `colour < r` and `x` in `[n]`; the
//! vertex index is `colour * n + (x - 1)`. Edges are the k-APs of `[n]`
//! carrying pairwise distinct colours.

use std::collections::HashMap;

use bitvec::vec::BitVec;
use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::ap::{check_length, count_aps_in_interval, enumerate_aps, GroundSet, UniformHypergraph};
use crate::colouring::Colouring;
use crate::{invalid, Ratio, Result};

#[derive(Debug, Clone)]
pub struct RainbowHypergraph {
    n: u32,
    k: u32,
    r: u32,
    graph: UniformHypergraph<(u32, u32)>,
}

pub fn falling_factorial(r: u32, k: u32) -> u64 {
    (0..k).map(|i| u64::from(r.saturating_sub(i))).product()
}

/// Builds every edge: each k-AP of `[n]` with each injective colour
/// assignment, in `(a, d)` then lexicographic colour order.
pub fn build_rainbow_hypergraph(n: u32, k: u32, r: u32) -> Result<RainbowHypergraph> {
    check_length(k)?;
    if r < k {
        return Err(invalid(format!(
            "rainbow hypergraph needs r >= k, got r={r}, k={k}"
        )));
    }
    let vertices: Vec<(u32, u32)> = (0..r).flat_map(|c| (1..=n).map(move |x| (c, x))).collect();
    let aps = enumerate_aps(&GroundSet::interval(n), k)?;
    let mut edges = Vec::with_capacity(aps.len() * falling_factorial(r, k) as usize);
    for ap in &aps {
        for colours in (0..r).permutations(k as usize) {
            let mut e: Vec<u32> = ap
                .elements()
                .zip(&colours)
                .map(|(x, &c)| c * n + (x - 1))
                .collect();
            e.sort_unstable();
            edges.push(e);
        }
    }
    Ok(RainbowHypergraph {
        n,
        k,
        r,
        graph: UniformHypergraph::from_parts_unchecked(k, vertices, edges),
    })
}

impl RainbowHypergraph {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn hypergraph(&self) -> &UniformHypergraph<(u32, u32)> {
        &self.graph
    }

    pub fn num_vertices(&self) -> u64 {
        self.graph.num_vertices() as u64
    }

    pub fn num_edges(&self) -> u64 {
        self.graph.num_edges() as u64
    }

    pub fn vertex_index(&self, colour: u32, x: u32) -> u32 {
        colour * self.n + (x - 1)
    }

    /// `Delta_l`: the largest number of edges containing a common l-set of
    /// vertices. Counts only l-subsets of actual edges, so memory is
    /// `e(R) * C(k, l)` keys.
    pub fn max_degree(&self, ell: u32) -> Result<u64> {
        if ell == 0 || ell > self.k {
            return Err(invalid(format!(
                "degree order must lie in 1..={}, got {ell}",
                self.k
            )));
        }
        if ell == 1 {
            let mut deg = vec![0u64; self.graph.num_vertices()];
            for e in self.graph.edges() {
                for &v in e {
                    deg[v as usize] += 1;
                }
            }
            return Ok(deg.into_iter().max().unwrap_or(0));
        }
        let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
        for e in self.graph.edges() {
            for sub in e.iter().copied().combinations(ell as usize) {
                *counts.entry(sub).or_insert(0) += 1;
            }
        }
        Ok(counts.into_values().max().unwrap_or(0))
    }

    /// Number of edges with every vertex in `subset`, by scanning the edge list.
    pub fn count_edges_within(&self, subset: &VertexSubset) -> u64 {
        self.graph
            .edges()
            .iter()
            .filter(|e| e.iter().all(|&v| subset.members[v as usize]))
            .count() as u64
    }
}

/// One line of the degree report.
#[derive(Debug, Clone, Serialize)]
pub struct DegreeRow {
    pub ell: u32,
    pub max_degree: u64,
    /// `k^3 r^k n^{-(l-1)/(k-1)} e(R) / v(R)`, for display only.
    pub bound: f64,
    /// Decided in exact integer arithmetic.
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DegreeReport {
    pub n: u32,
    pub k: u32,
    pub r: u32,
    pub edges: u64,
    pub vertices: u64,
    pub rows: Vec<DegreeRow>,
    /// `e(R) >= (n/k)^2`.
    pub edge_lower_bound: bool,
    /// `Delta_1 <= k n r^{k-1}`.
    pub vertex_degree_bound: bool,
    /// `Delta_l <= k^2 r^{k-2}` for every `l >= 2`.
    pub pair_degree_bound: bool,
}

impl DegreeReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
            && self.edge_lower_bound
            && self.vertex_degree_bound
            && self.pair_degree_bound
    }

    /// CSV with header `ell,max_degree,bound,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("ell,max_degree,bound,pass\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                row.ell, row.max_degree, row.bound, row.pass
            ));
        }
        out
    }
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// Checks every degree bound of the codegree estimate for `R(n, k, r)`.
pub fn verify_degree_bounds(graph: &RainbowHypergraph) -> Result<DegreeReport> {
    let (n, k, r) = (u64::from(graph.n), u64::from(graph.k), u64::from(graph.r));
    let e = graph.num_edges();
    let v = graph.num_vertices();
    let c = k.pow(3) * r.pow(graph.k);
    let mut rows = Vec::new();
    let mut vertex_degree_bound = true;
    let mut pair_degree_bound = true;
    for ell in 1..=graph.k {
        let delta = graph.max_degree(ell)?;
        // delta <= c n^{-(l-1)/(k-1)} e / v
        //   <=> (delta v)^{k-1} n^{l-1} <= (c e)^{k-1}
        let lhs = (big(delta) * big(v)).pow(graph.k - 1) * big(n).pow(ell - 1);
        let rhs = (big(c) * big(e)).pow(graph.k - 1);
        let bound =
            c as f64 * (n as f64).powf(-f64::from(ell - 1) / (k - 1) as f64) * e as f64 / v as f64;
        rows.push(DegreeRow {
            ell,
            max_degree: delta,
            bound,
            pass: lhs <= rhs,
        });
        if ell == 1 {
            vertex_degree_bound = delta <= k * n * r.pow(graph.k - 1);
        } else {
            pair_degree_bound &= delta <= k * k * r.pow(graph.k - 2);
        }
    }
    Ok(DegreeReport {
        n: graph.n,
        k: graph.k,
        r: graph.r,
        edges: e,
        vertices: v,
        rows,
        edge_lower_bound: u128::from(e) * u128::from(k * k) >= u128::from(n * n),
        vertex_degree_bound,
        pair_degree_bound,
    })
}

/// A set `U` of vertices of `R(n, k, r)`.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSubset {
    n: u32,
    r: u32,
    members: BitVec,
}

impl std::fmt::Debug for VertexSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("VertexSubset")
            .field("n", &self.n)
            .field("r", &self.r)
            .field("pairs", &self.pairs())
            .finish()
    }
}

impl VertexSubset {
    pub fn empty(n: u32, r: u32) -> Self {
        Self {
            n,
            r,
            members: BitVec::repeat(false, n as usize * r as usize),
        }
    }

    pub fn full(n: u32, r: u32) -> Self {
        Self {
            n,
            r,
            members: BitVec::repeat(true, n as usize * r as usize),
        }
    }

    pub fn from_pairs(n: u32, r: u32, pairs: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut s = Self::empty(n, r);
        for (c, x) in pairs {
            s.insert(c, x)?;
        }
        Ok(s)
    }

    fn index(&self, colour: u32, x: u32) -> Result<usize> {
        if colour >= self.r || x == 0 || x > self.n {
            return Err(invalid(format!(
                "vertex ({colour}, {x}) outside [{}] x [{}]",
                self.r, self.n
            )));
        }
        Ok(colour as usize * self.n as usize + (x - 1) as usize)
    }

    pub fn insert(&mut self, colour: u32, x: u32) -> Result<()> {
        let i = self.index(colour, x)?;
        self.members.set(i, true);
        Ok(())
    }

    pub fn contains(&self, colour: u32, x: u32) -> bool {
        self.index(colour, x).is_ok_and(|i| self.members[i])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.members.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.members.not_any()
    }

    /// Members as `(colour, x)`, ordered by colour then integer.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.members
            .iter_ones()
            .map(|i| {
                (
                    (i / self.n as usize) as u32,
                    (i % self.n as usize) as u32 + 1,
                )
            })
            .collect()
    }

    /// The fibre `U_x`: colours `c` with `(c, x)` in `U`.
    pub fn colour_set(&self, x: u32) -> Vec<u32> {
        if x == 0 || x > self.n {
            return Vec::new();
        }
        (0..self.r).filter(|&c| self.contains(c, x)).collect()
    }

    /// The projection onto `[n]`: integers with a non-empty fibre.
    pub fn project(&self) -> GroundSet {
        let elems = (1..=self.n).filter(|&x| (0..self.r).any(|c| self.contains(c, x)));
        GroundSet::new(self.n, elems.collect()).expect("projection lies in [n]")
    }

    /// Counts rainbow k-APs spanned by `U` from the fibres: for every k-AP in
    /// the projection, the number of injective colour choices from its fibres.
    pub fn count_rainbow_edges(&self, k: u32) -> Result<u64> {
        let projection = self.project();
        let mut total = 0;
        for ap in enumerate_aps(&projection, k)? {
            let fibres: Vec<Vec<u32>> = ap.elements().map(|x| self.colour_set(x)).collect();
            total += count_injective_choices(&fibres, &mut Vec::with_capacity(fibres.len()));
        }
        Ok(total)
    }
}

fn count_injective_choices(fibres: &[Vec<u32>], taken: &mut Vec<u32>) -> u64 {
    let Some((first, rest)) = fibres.split_first() else {
        return 1;
    };
    let mut total = 0;
    for &c in first {
        if !taken.contains(&c) {
            taken.push(c);
            total += count_injective_choices(rest, taken);
            taken.pop();
        }
    }
    total
}

/// `e(R[U])`: rainbow edges with all vertices in `U`.
pub fn count_rainbow_edges_in(subset: &VertexSubset, k: u32) -> Result<u64> {
    subset.count_rainbow_edges(k)
}

/// The coloured set `{(phi(z), z) : z in Z}` inside `[r] x [n]`, where `n`
/// is the ambient bound of `Z`.
pub fn embed_coloured_set(phi: &Colouring, r: u32) -> Result<VertexSubset> {
    if phi.palette_size() > r {
        return Err(invalid(format!(
            "colouring uses {} colours but only {r} are available",
            phi.palette_size()
        )));
    }
    let domain = phi.domain();
    VertexSubset::from_pairs(
        domain.ambient(),
        r,
        domain
            .elements()
            .iter()
            .zip(phi.assignment())
            .map(|(&z, &c)| (c, z)),
    )
}

/// The sets built from `U` when bounding the colours of a container.
#[derive(Debug, Clone, Serialize)]
pub struct ContainerStructure {
    pub n: u32,
    pub k: u32,
    /// `A`: the projection of `U`.
    pub projection: GroundSet,
    /// `D`: integers whose fibre has at least `k` colours.
    pub many_coloured: GroundSet,
    /// `A' = A \ D`.
    pub few_coloured: GroundSet,
    /// `Omega`: colours used at least `beta n / 4` times over `A'`.
    pub popular_colours: Vec<u32>,
    /// `B`: integers of `A'` whose whole fibre lies in `Omega`.
    pub covered: GroundSet,
    /// `M = ceil(4k / beta)`.
    pub colour_budget: u64,
    /// `e(R[U])`.
    pub rainbow_edges: u64,
    pub flags: ContainerFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ContainerFlags {
    /// `|A| >= 3n/4`.
    pub projection_large: bool,
    /// `e(R[U]) < epsilon n^2`.
    pub few_rainbow_edges: bool,
    /// `|B| >= n/4`.
    pub covered_large: bool,
    /// `|Omega| <= M`.
    pub colours_within_budget: bool,
    /// `|Omega| < 4k / beta`, which holds for every `U`.
    pub colours_strictly_bounded: bool,
    /// `U_b` is a subset of `Omega` for every `b` in `B`.
    pub fibres_covered: bool,
}

impl ContainerStructure {
    /// The three conclusions `|B| >= n/4`, `|Omega| <= M`, `U_b in Omega`.
    pub fn conclusion_holds(&self) -> bool {
        self.flags.covered_large && self.flags.colours_within_budget && self.flags.fibres_covered
    }
}

/// Applies the colour-bounding construction to `U` unconditionally and
/// reports which of its guarantees hold.
pub fn extract_container_structure(
    subset: &VertexSubset,
    k: u32,
    beta: Ratio,
    epsilon: Ratio,
) -> Result<ContainerStructure> {
    check_length(k)?;
    if beta.is_zero() || epsilon.is_zero() {
        return Err(invalid("beta and epsilon must be positive"));
    }
    let n = subset.n;
    let projection = subset.project();
    let fibres: Vec<Vec<u32>> = (0..=n).map(|x| subset.colour_set(x)).collect();
    let (many, few): (Vec<u32>, Vec<u32>) = projection
        .elements()
        .iter()
        .partition(|&&x| fibres[x as usize].len() >= k as usize);

    // |U cap ({c} x A')| for every colour c.
    let mut uses = vec![0u64; subset.r as usize];
    for &x in &few {
        for &c in &fibres[x as usize] {
            uses[c as usize] += 1;
        }
    }
    // uses * 4 >= beta * n, exactly.
    let popular: Vec<u32> = (0..subset.r)
        .filter(|&c| {
            u128::from(uses[c as usize]) * 4 * u128::from(*beta.denom())
                >= u128::from(*beta.numer()) * u128::from(n)
        })
        .collect();
    let covered: Vec<u32> = few
        .iter()
        .copied()
        .filter(|&x| {
            fibres[x as usize]
                .iter()
                .all(|c| popular.binary_search(c).is_ok())
        })
        .collect();

    let four_k_over_beta = Ratio::from_integer(4 * u64::from(k)) / beta;
    let colour_budget = four_k_over_beta.ceil().to_integer();
    let rainbow_edges = subset.count_rainbow_edges(k)?;
    let omega = popular.len() as u64;
    let flags = ContainerFlags {
        projection_large: projection.len() as u64 * 4 >= 3 * u64::from(n),
        few_rainbow_edges: Ratio::from_integer(rainbow_edges)
            < epsilon * Ratio::from_integer(u64::from(n) * u64::from(n)),
        covered_large: covered.len() as u64 * 4 >= u64::from(n),
        colours_within_budget: omega <= colour_budget,
        colours_strictly_bounded: Ratio::from_integer(omega) < four_k_over_beta,
        fibres_covered: covered
            .iter()
            .all(|&b| fibres[b as usize].iter().all(|c| popular.contains(c))),
    };
    let set = |v: Vec<u32>| GroundSet::new(n, v).expect("subset of [n]");
    Ok(ContainerStructure {
        n,
        k,
        projection: projection.clone(),
        many_coloured: set(many),
        few_coloured: set(few),
        popular_colours: popular,
        covered: set(covered),
        colour_budget,
        rainbow_edges,
        flags,
    })
}

/// Total edge count predicted by `(#k-APs in [n]) * r (r-1) ... (r-k+1)`.
pub fn expected_edge_count(n: u32, k: u32, r: u32) -> Result<u64> {
    Ok(count_aps_in_interval(n, k)? * falling_factorial(r, k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: u64, d: u64) -> Ratio {
        Ratio::new(n, d)
    }

    #[test]
    fn sizes() {
        let g = build_rainbow_hypergraph(9, 3, 3).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (27, 96));
        let g = build_rainbow_hypergraph(3, 3, 3).unwrap();
        assert_eq!((g.num_vertices(), g.num_edges()), (9, 6));
        assert!(build_rainbow_hypergraph(9, 3, 2).is_err());
        for n in 3..=12 {
            for r in 3..=5 {
                let g = build_rainbow_hypergraph(n, 3, r).unwrap();
                assert_eq!(g.num_edges(), expected_edge_count(n, 3, r).unwrap());
                assert!(g.num_edges() * 9 >= u64::from(n * n));
            }
        }
    }

    #[test]
    fn edges_are_rainbow_progressions() {
        let g = build_rainbow_hypergraph(7, 3, 4).unwrap();
        let h = g.hypergraph();
        for e in h.edges() {
            let mut pts: Vec<(u32, u32)> = e.iter().map(|&v| h.vertices()[v as usize]).collect();
            pts.sort_by_key(|p| p.1);
            assert!(pts[1].1 - pts[0].1 == pts[2].1 - pts[1].1 && pts[1].1 > pts[0].1);
            assert!(pts[0].0 != pts[1].0 && pts[1].0 != pts[2].0 && pts[0].0 != pts[2].0);
        }
    }

    #[test]
    fn degrees() {
        let g = build_rainbow_hypergraph(9, 3, 3).unwrap();
        assert_eq!(g.max_degree(3).unwrap(), 1);
        // Brute force over all vertices and pairs.
        let h = g.hypergraph();
        let v = h.num_vertices() as u32;
        let d1 = (0..v)
            .map(|x| h.edges().iter().filter(|e| e.contains(&x)).count())
            .max()
            .unwrap();
        let mut d2 = 0;
        for x in 0..v {
            for y in x + 1..v {
                d2 = d2.max(
                    h.edges()
                        .iter()
                        .filter(|e| e.contains(&x) && e.contains(&y))
                        .count(),
                );
            }
        }
        assert_eq!(g.max_degree(1).unwrap(), d1 as u64);
        assert_eq!(g.max_degree(2).unwrap(), d2 as u64);
        assert!(d1 <= 243 && d2 <= 27);
        assert!(g.max_degree(0).is_err() && g.max_degree(4).is_err());
    }

    #[test]
    fn degree_reports_pass() {
        for (n, k, rr) in [(9, 3, 3), (30, 3, 4), (20, 4, 5)] {
            let g = build_rainbow_hypergraph(n, k, rr).unwrap();
            let rep = verify_degree_bounds(&g).unwrap();
            assert!(rep.all_pass(), "{rep:?}");
            assert_eq!(rep.rows.len(), k as usize);
        }
    }

    #[test]
    fn projection_and_fibres() {
        let u = VertexSubset::empty(9, 3);
        assert!(u.project().is_empty());
        assert!((1..=9).all(|x| u.colour_set(x).is_empty()));
        let u = VertexSubset::from_pairs(9, 3, [(1, 5), (2, 5), (1, 7)]).unwrap();
        assert_eq!(u.project().elements(), &[5, 7]);
        assert_eq!(u.colour_set(5), vec![1, 2]);
        assert_eq!(u.colour_set(7), vec![1]);
        let u = VertexSubset::full(9, 3);
        assert_eq!(u.project(), GroundSet::interval(9));
        assert!((1..=9).all(|x| u.colour_set(x) == vec![0, 1, 2]));
        assert!(VertexSubset::from_pairs(9, 3, [(3, 1)]).is_err());
    }

    #[test]
    fn embedding() {
        let z = GroundSet::interval(3);
        let phi = Colouring::from_raw(z.clone(), &[0, 0, 1]).unwrap();
        let u = embed_coloured_set(&phi, 3).unwrap();
        assert_eq!(u.pairs(), vec![(0, 1), (0, 2), (1, 3)]);
        assert_eq!(count_rainbow_edges_in(&u, 3).unwrap(), 0);
        assert_eq!(u.project(), z);
        let phi = Colouring::from_raw(z, &[0, 1, 2]).unwrap();
        let u = embed_coloured_set(&phi, 3).unwrap();
        assert_eq!(count_rainbow_edges_in(&u, 3).unwrap(), 1);
        assert!(embed_coloured_set(&phi, 2).is_err());
    }

    #[test]
    fn edge_counts_within_subsets() {
        let g = build_rainbow_hypergraph(9, 3, 3).unwrap();
        let full = VertexSubset::full(9, 3);
        assert_eq!(count_rainbow_edges_in(&full, 3).unwrap(), 96);
        assert_eq!(g.count_edges_within(&full), 96);
        let u = VertexSubset::from_pairs(9, 3, [(0, 1), (1, 2), (2, 3), (1, 3), (0, 5), (2, 5)])
            .unwrap();
        assert_eq!(
            count_rainbow_edges_in(&u, 3).unwrap(),
            g.count_edges_within(&u)
        );
    }

    #[test]
    fn container_empty_subset() {
        let s = extract_container_structure(&VertexSubset::empty(12, 4), 3, r(1, 4), r(1, 100))
            .unwrap();
        assert!(s.projection.is_empty() && s.covered.is_empty() && s.popular_colours.is_empty());
        assert!(s.flags.colours_within_budget && s.flags.fibres_covered);
        assert!(!s.flags.covered_large);
        assert_eq!(s.colour_budget, 48);
    }

    #[test]
    fn container_single_colour_slab() {
        let u = VertexSubset::from_pairs(12, 4, (1..=12).map(|x| (2, x))).unwrap();
        let s = extract_container_structure(&u, 3, r(1, 4), r(1, 100)).unwrap();
        assert_eq!(s.projection, GroundSet::interval(12));
        assert!(s.many_coloured.is_empty());
        assert_eq!(s.popular_colours, vec![2]);
        assert_eq!(s.covered, GroundSet::interval(12));
        assert!(s.conclusion_holds());
        assert!(extract_container_structure(&u, 3, r(0, 1), r(1, 2)).is_err());
        assert!(extract_container_structure(&u, 3, r(1, 2), r(0, 1)).is_err());
    }
}
