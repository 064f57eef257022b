mod common;

use canvdw::colouring::count_coloured_aps;
use canvdw::rainbow::{
    build_rainbow_hypergraph, embed_coloured_set, expected_edge_count, extract_container_structure,
    verify_degree_bounds, VertexSubset,
};
use canvdw::{Colouring, GroundSet, Ratio};
use common::oracle_aps;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maximum number of edges through any `ell` vertices, by listing every
/// `ell`-subset of every edge.
fn brute_max_codegree(edges: &[Vec<u32>], ell: usize) -> u64 {
    use std::collections::HashMap;
    let mut counts: HashMap<Vec<u32>, u64> = HashMap::new();
    for e in edges {
        let k = e.len();
        for mask in 0u32..(1 << k) {
            if mask.count_ones() as usize == ell {
                let key: Vec<u32> = (0..k)
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| e[i])
                    .collect();
                *counts.entry(key).or_default() += 1;
            }
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

#[test]
fn codegrees_match_brute_force() {
    for (n, k, r) in [(12, 3, 3), (15, 3, 4), (14, 4, 4)] {
        let g = build_rainbow_hypergraph(n, k, r).unwrap();
        assert_eq!(g.num_edges(), expected_edge_count(n, k, r).unwrap());
        for ell in 1..=k {
            assert_eq!(
                g.max_degree(ell).unwrap(),
                brute_max_codegree(g.hypergraph().edges(), ell as usize),
                "n {n} k {k} r {r} ell {ell}"
            );
        }
    }
}

#[test]
fn degree_bounds_hold_on_small_cases() {
    for (n, k, r) in [(20, 3, 3), (30, 3, 4), (20, 4, 4), (16, 5, 5)] {
        let report = verify_degree_bounds(&build_rainbow_hypergraph(n, k, r).unwrap()).unwrap();
        assert!(report.all_pass(), "{n} {k} {r}: {report:?}");
        assert_eq!(report.rows.len(), k as usize);
    }
}

#[test]
fn rainbow_edge_counts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (n, k, r) = (18, 3, 4);
    let g = build_rainbow_hypergraph(n, k, r).unwrap();
    for _ in 0..100 {
        let density = rng.random_range(0.1..0.9);
        let pairs: Vec<(u32, u32)> = (0..r)
            .flat_map(|c| (1..=n).map(move |x| (c, x)))
            .filter(|_| rng.random::<f64>() < density)
            .collect();
        let u = VertexSubset::from_pairs(n, r, pairs).unwrap();
        assert_eq!(u.count_rainbow_edges(k).unwrap(), g.count_edges_within(&u));
    }
}

#[test]
fn embedded_colourings_count_their_rainbow_progressions() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let n = 20;
        let elems: Vec<u32> = (1..=n).filter(|_| rng.random::<f64>() < 0.7).collect();
        if elems.is_empty() {
            continue;
        }
        let set = GroundSet::new(n, elems.clone()).unwrap();
        let raw: Vec<u32> = elems.iter().map(|_| rng.random_range(0..4)).collect();
        let phi = Colouring::from_raw(set.clone(), &raw).unwrap();
        let u = embed_coloured_set(&phi, 4).unwrap();
        assert_eq!(u.project(), set);
        let rainbow = count_coloured_aps(&set, &phi, 3).unwrap().rainbow;
        assert_eq!(u.count_rainbow_edges(3).unwrap(), rainbow);
        // Independent count through the oracle progressions.
        let direct = oracle_aps(&elems, 3)
            .iter()
            .filter(|ap| {
                let c: Vec<u32> = ap.iter().map(|&i| phi.assignment()[i]).collect();
                c[0] != c[1] && c[1] != c[2] && c[0] != c[2]
            })
            .count() as u64;
        assert_eq!(rainbow, direct);
    }
}

#[test]
fn container_structure_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..100 {
        let n = 40;
        let r = 6;
        let density = rng.random_range(0.05..0.8);
        let pairs: Vec<(u32, u32)> = (0..r)
            .flat_map(|c| (1..=n).map(move |x| (c, x)))
            .filter(|_| rng.random::<f64>() < density)
            .collect();
        let u = VertexSubset::from_pairs(n, r, pairs).unwrap();
        let s = extract_container_structure(&u, 3, Ratio::new(1, 4), Ratio::new(1, 100)).unwrap();
        assert!(s.flags.fibres_covered);
        assert!(s.flags.colours_within_budget && s.flags.colours_strictly_bounded);
        // Partition of the projection into D and A'.
        assert_eq!(
            s.many_coloured.len() + s.few_coloured.len(),
            s.projection.len()
        );
        assert!(s.covered.is_subset_of(&s.few_coloured));
        for &b in s.covered.elements() {
            for c in u.colour_set(b) {
                assert!(s.popular_colours.contains(&c));
            }
        }
    }
}
