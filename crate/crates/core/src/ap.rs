//! Arithmetic progressions inside finite sets of positive integers.

use std::collections::HashSet;
use std::fmt;

use bitvec::vec::BitVec;
use serde::{Serialize, Serializer};

use crate::{invalid, Result};

/// A k-term arithmetic progression `a, a+d, ..., a+(k-1)d` with `d >= 1`.
///
/// Reversed progressions describe the same element set, so only the positive
/// difference is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ArithmeticProgression {
    a: u32,
    d: u32,
    k: u32,
}

impl ArithmeticProgression {
    pub fn new(a: u32, d: u32, k: u32) -> Result<Self> {
        if a == 0 {
            return Err(invalid("first term must be a positive integer"));
        }
        if d == 0 {
            return Err(invalid("common difference must be positive"));
        }
        check_length(k)?;
        if u64::from(a) + u64::from(k - 1) * u64::from(d) > u64::from(u32::MAX) {
            return Err(invalid("progression overflows u32"));
        }
        Ok(Self { a, d, k })
    }

    pub fn first(&self) -> u32 {
        self.a
    }

    pub fn difference(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> u32 {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> u32 {
        self.a + (self.k - 1) * self.d
    }

    /// The `i`-th term, `0 <= i < k`.
    pub fn term(&self, i: u32) -> u32 {
        debug_assert!(i < self.k);
        self.a + i * self.d
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.k).map(move |i| self.a + i * self.d)
    }

    pub fn contains(&self, x: u32) -> bool {
        x >= self.a && x <= self.last() && (x - self.a).is_multiple_of(self.d)
    }
}

impl fmt::Display for ArithmeticProgression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

pub(crate) fn check_length(k: u32) -> Result<()> {
    if k < 3 {
        return Err(invalid(format!(
            "progression length must be at least 3, got {k}"
        )));
    }
    Ok(())
}

/// A finite set `A` of positive integers inside the ambient interval `[n]`.
#[derive(Clone)]
pub struct GroundSet {
    n: u32,
    elements: Vec<u32>,
    members: BitVec,
}

impl GroundSet {
    /// Builds a set from a strictly increasing list of elements in `[1, n]`.
    pub fn new(n: u32, elements: Vec<u32>) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("ground set elements must be strictly increasing"));
        }
        if let (Some(&lo), Some(&hi)) = (elements.first(), elements.last()) {
            if lo == 0 || hi > n {
                return Err(invalid(format!("ground set elements must lie in [1, {n}]")));
            }
        }
        let mut members = BitVec::repeat(false, n as usize + 1);
        for &x in &elements {
            members.set(x as usize, true);
        }
        Ok(Self {
            n,
            elements,
            members,
        })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(n: u32, elements: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut v: Vec<u32> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self::new(n, v)
    }

    /// Uses the largest element as the ambient bound.
    pub fn from_elements(elements: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut v: Vec<u32> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        let n = v.last().copied().unwrap_or(0);
        Self::new(n, v)
    }

    /// The full interval `[n]`.
    pub fn interval(n: u32) -> Self {
        Self::new(n, (1..=n).collect()).expect("interval is valid")
    }

    pub fn empty(n: u32) -> Self {
        Self::new(n, Vec::new()).expect("empty set is valid")
    }

    pub fn ambient(&self) -> u32 {
        self.n
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u32) -> bool {
        (x as usize) < self.members.len() && self.members[x as usize]
    }

    /// Position of `x` in the sorted element list.
    pub fn index_of(&self, x: u32) -> Option<usize> {
        if self.contains(x) {
            self.elements.binary_search(&x).ok()
        } else {
            None
        }
    }

    pub fn is_subset_of(&self, other: &GroundSet) -> bool {
        self.elements.iter().all(|&x| other.contains(x))
    }

    pub fn contains_ap(&self, ap: &ArithmeticProgression) -> bool {
        ap.elements().all(|x| self.contains(x))
    }
}

impl PartialEq for GroundSet {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.elements == other.elements
    }
}

impl Eq for GroundSet {}

/// Serializes as the sorted element list.
impl Serialize for GroundSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elements.serialize(serializer)
    }
}

impl fmt::Debug for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroundSet")
            .field("n", &self.n)
            .field("elements", &self.elements)
            .finish()
    }
}

/// All k-APs lying entirely inside `set`, in lexicographic `(a, d)` order.
pub fn enumerate_aps(set: &GroundSet, k: u32) -> Result<Vec<ArithmeticProgression>> {
    check_length(k)?;
    let elems = set.elements();
    let max = match elems.last() {
        Some(&m) => u64::from(m),
        None => return Ok(Vec::new()),
    };
    let mut out = Vec::new();
    for (i, &a) in elems.iter().enumerate() {
        for &b in &elems[i + 1..] {
            let d = b - a;
            if u64::from(a) + u64::from(k - 1) * u64::from(d) > max {
                break;
            }
            if (2..k).all(|j| set.contains(a + j * d)) {
                out.push(ArithmeticProgression { a, d, k });
            }
        }
    }
    Ok(out)
}

/// Number of k-APs contained in `[n]`, by the closed form
/// `sum_{d >= 1} (n - (k-1)d)`.
pub fn count_aps_in_interval(n: u32, k: u32) -> Result<u64> {
    check_length(k)?;
    let (n, step) = (u64::from(n), u64::from(k - 1));
    if n < u64::from(k) {
        return Ok(0);
    }
    let dmax = (n - 1) / step;
    // sum_{d=1}^{dmax} (n - step*d)
    Ok(dmax * n - step * dmax * (dmax + 1) / 2)
}

/// All k-APs inside `[n]` that contain `x`, sorted by `(a, d)`.
pub fn aps_through_element(x: u32, n: u32, k: u32) -> Result<Vec<ArithmeticProgression>> {
    check_length(k)?;
    if x == 0 || x > n {
        return Err(invalid(format!("element {x} outside [1, {n}]")));
    }
    let mut out = Vec::new();
    let span = k - 1;
    for d in 1..=(n.saturating_sub(1) / span) {
        for pos in 0..k {
            let offset = u64::from(pos) * u64::from(d);
            if offset >= u64::from(x) {
                break;
            }
            let a = x - offset as u32;
            if u64::from(a) + u64::from(span) * u64::from(d) <= u64::from(n) {
                out.push(ArithmeticProgression { a, d, k });
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// All k-APs of positive integers containing both `x` and `y`, sorted by
/// `(a, d)`. Callers restrict to `[n]` by filtering on [`ArithmeticProgression::last`].
pub fn aps_through_pair(x: u32, y: u32, k: u32) -> Result<Vec<ArithmeticProgression>> {
    check_length(k)?;
    if x == y {
        return Err(invalid("pair elements must differ"));
    }
    if x == 0 || y == 0 {
        return Err(invalid("pair elements must be positive integers"));
    }
    let (lo, hi) = (x.min(y), x.max(y));
    let gap = hi - lo;
    let mut out = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let steps = j - i;
            if gap % steps != 0 {
                continue;
            }
            let d = gap / steps;
            let offset = u64::from(i) * u64::from(d);
            if offset >= u64::from(lo) {
                continue;
            }
            if let Ok(ap) = ArithmeticProgression::new(lo - offset as u32, d, k) {
                out.push(ap);
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// A k-uniform hypergraph with labelled vertices. Edges are stored as sorted
/// vertex-index lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UniformHypergraph<V = u32> {
    k: u32,
    vertices: Vec<V>,
    edges: Vec<Vec<u32>>,
}

impl<V> UniformHypergraph<V> {
    /// Validates uniformity, index range, distinctness and absence of
    /// duplicate edges. Each edge is sorted on the way in.
    pub fn new(k: u32, vertices: Vec<V>, edges: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut sorted_edges = Vec::with_capacity(edges.len());
        for mut e in edges {
            if e.len() != k as usize {
                return Err(invalid(format!("edge {e:?} does not have {k} vertices")));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid(format!("edge {e:?} repeats a vertex")));
            }
            if e.last().is_some_and(|&v| v as usize >= vertices.len()) {
                return Err(invalid(format!("edge {e:?} references a missing vertex")));
            }
            if !seen.insert(e.clone()) {
                return Err(invalid(format!("duplicate edge {e:?}")));
            }
            sorted_edges.push(e);
        }
        Ok(Self {
            k,
            vertices,
            edges: sorted_edges,
        })
    }

    /// Skips validation; callers guarantee the invariants.
    pub(crate) fn from_parts_unchecked(k: u32, vertices: Vec<V>, edges: Vec<Vec<u32>>) -> Self {
        Self { k, vertices, edges }
    }

    pub fn uniformity(&self) -> u32 {
        self.k
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// For each vertex, the indices of the edges containing it.
    pub fn incidence_lists(&self) -> Vec<Vec<u32>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (ei, e) in self.edges.iter().enumerate() {
            for &v in e {
                inc[v as usize].push(ei as u32);
            }
        }
        inc
    }
}

/// The hypergraph `H_kAP(A)`: vertices are the elements of `A`, edges its k-APs.
pub fn build_ap_hypergraph(set: &GroundSet, k: u32) -> Result<UniformHypergraph<u32>> {
    let aps = enumerate_aps(set, k)?;
    let edges = aps
        .iter()
        .map(|ap| {
            ap.elements()
                .map(|x| set.index_of(x).expect("AP lies in the set") as u32)
                .collect()
        })
        .collect();
    Ok(UniformHypergraph::from_parts_unchecked(
        k,
        set.elements().to_vec(),
        edges,
    ))
}
