//! Exact decision procedures with certificates.
//!
//! Every procedure answers a universally quantified colouring (or subset)
//! statement about a ground set. When the statement fails, the result
//! carries a counterexample that can be re-checked with the functions in
//! [`crate::colouring`] alone.

mod kernel;
mod partition;
mod subset;

use std::time::{Duration, Instant};

use num_traits::Zero;
use serde::Serialize;

use crate::ap::{check_length, enumerate_aps, GroundSet};
use crate::colouring::{normalize, within_fraction, Colouring};
use crate::{invalid, Ratio, Result};

use partition::{PartitionProblem, SearchOutcome};
use subset::{SubsetOutcome, SubsetProblem};

/// Upper bound on search nodes (colour or element assignments tried).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget(Option<u64>);

impl Budget {
    pub const fn unlimited() -> Self {
        Budget(None)
    }

    pub const fn nodes(limit: u64) -> Self {
        Budget(Some(limit))
    }

    pub fn limit(&self) -> Option<u64> {
        self.0
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::unlimited()
    }
}

pub(crate) struct Meter {
    nodes: u64,
    limit: u64,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Self {
            nodes: 0,
            limit: budget.0.unwrap_or(u64::MAX),
        }
    }

    /// Counts one node; false once the budget is spent.
    pub(crate) fn tick(&mut self) -> bool {
        if self.nodes >= self.limit {
            return false;
        }
        self.nodes += 1;
        true
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The Ramsey-type statement holds for the set.
    Holds,
    /// The statement fails; a certificate is attached.
    Fails,
    /// The node budget ran out before the search finished.
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    Colouring(Colouring),
    Subset(GroundSet),
}

#[derive(Debug, Clone)]
pub struct DecisionResult {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

impl DecisionResult {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn colouring(&self) -> Option<&Colouring> {
        match &self.certificate {
            Some(Certificate::Colouring(c)) => Some(c),
            _ => None,
        }
    }

    pub fn subset(&self) -> Option<&GroundSet> {
        match &self.certificate {
            Some(Certificate::Subset(s)) => Some(s),
            _ => None,
        }
    }
}

/// Progressions of `set` as flat increasing index tuples.
fn ap_indices(set: &GroundSet, k: u32) -> Result<Vec<u32>> {
    let mut flat = Vec::new();
    for ap in enumerate_aps(set, k)? {
        flat.extend(
            ap.elements()
                .map(|x| set.index_of(x).expect("AP lies in the set") as u32),
        );
    }
    Ok(flat)
}

#[derive(Clone, Copy)]
enum Forbidden {
    Mono { cap: u32 },
    MonoAndRainbow,
}

/// Searches for a colouring avoiding the forbidden patterns, after peeling
/// and splitting into components.
fn find_avoiding_colouring(
    set: &GroundSet,
    k: u32,
    forbidden: Forbidden,
    meter: &mut Meter,
) -> Result<Option<Option<Vec<u32>>>> {
    let len = set.len();
    let ku = k as usize;
    let aps = ap_indices(set, k)?;
    let (alive, order) = kernel::peel(len, ku, &aps);
    let comps = kernel::components(&alive, ku, &aps);

    let (forbid_rainbow, cap) = match forbidden {
        Forbidden::Mono { cap } => (false, cap),
        Forbidden::MonoAndRainbow => (true, u32::MAX),
    };
    let mut comp_of = vec![usize::MAX; len];
    for (ci, comp) in comps.iter().enumerate() {
        for &x in comp {
            comp_of[x] = ci;
        }
    }
    let mut comp_aps: Vec<Vec<u32>> = vec![Vec::new(); comps.len()];
    for ap in aps.chunks_exact(ku) {
        if ap.iter().all(|&x| alive[x as usize]) {
            comp_aps[comp_of[ap[0] as usize]].extend_from_slice(ap);
        }
    }

    let mut colours: Vec<Option<u32>> = vec![None; len];
    let mut offset = 0u32;
    let mut local = vec![0u32; len];
    for (comp, comp_aps) in comps.iter().zip(&mut comp_aps) {
        for (li, &x) in comp.iter().enumerate() {
            local[x] = li as u32;
        }
        for x in comp_aps.iter_mut() {
            *x = local[*x as usize];
        }
        let problem = PartitionProblem {
            len: comp.len(),
            k: ku,
            aps: comp_aps,
            forbid_mono: true,
            forbid_rainbow,
            cap,
            class_bound: None,
        };
        let found = match partition::solve(&problem, meter) {
            SearchOutcome::Found(c) => c,
            SearchOutcome::NoneExists => return Ok(Some(None)),
            SearchOutcome::Exhausted => return Ok(None),
        };
        let used = found.iter().max().map_or(0, |&m| m + 1);
        // Disjoint palettes keep the canonical classification per component;
        // the r-colour search shares one palette.
        let shift = if forbid_rainbow { offset } else { 0 };
        for (li, &x) in comp.iter().enumerate() {
            colours[x] = Some(found[li] + shift);
        }
        offset = if forbid_rainbow {
            offset + used
        } else {
            offset.max(used)
        };
    }

    // Peeled elements, last removed first: the progression they were peeled
    // with is fully coloured apart from them.
    let mut fresh = offset.max(1);
    for &(x, witness) in order.iter().rev() {
        let choice = match witness {
            None => 0,
            Some(id) => {
                let others: Vec<u32> = aps[id * ku..(id + 1) * ku]
                    .iter()
                    .filter(|&&y| y as usize != x)
                    .map(|&y| colours[y as usize].expect("coloured before peeled element"))
                    .collect();
                if !others.iter().all(|&c| c == others[0]) {
                    // Already two colours; any value for x keeps it non-mono,
                    // and repeating a colour keeps it non-rainbow.
                    others[0]
                } else if forbid_rainbow {
                    fresh += 1;
                    fresh - 1
                } else if others[0] == 0 {
                    1
                } else {
                    0
                }
            }
        };
        colours[x] = Some(choice);
    }
    let raw: Vec<u32> = colours
        .into_iter()
        .map(|c| c.expect("all elements coloured"))
        .collect();
    Ok(Some(Some(normalize(&raw))))
}

fn finish(
    set: &GroundSet,
    outcome: Option<Option<Vec<u32>>>,
    meter: &Meter,
    start: Instant,
) -> DecisionResult {
    let (verdict, certificate) = match outcome {
        None => (Verdict::BudgetExhausted, None),
        Some(None) => (Verdict::Holds, None),
        Some(Some(assignment)) => (
            Verdict::Fails,
            Some(Certificate::Colouring(Colouring::from_normalized(
                set.clone(),
                assignment,
            ))),
        ),
    };
    DecisionResult {
        verdict,
        certificate,
        nodes_explored: meter.nodes,
        elapsed: start.elapsed(),
    }
}

/// Does every `r`-colouring of `set` contain a monochromatic k-AP?
pub fn is_r_k_vdw(set: &GroundSet, r: u32, k: u32, budget: Budget) -> Result<DecisionResult> {
    check_length(k)?;
    if r == 0 {
        return Err(invalid("number of colours must be at least 1"));
    }
    let start = Instant::now();
    let mut meter = Meter::new(budget);
    let outcome = if r == 1 {
        // Only the constant colouring; peeling needs a second colour.
        if enumerate_aps(set, k)?.is_empty() {
            Some(Some(vec![0; set.len()]))
        } else {
            Some(None)
        }
    } else {
        find_avoiding_colouring(set, k, Forbidden::Mono { cap: r }, &mut meter)?
    };
    Ok(finish(set, outcome, &meter, start))
}

/// Does every colouring of `set` contain a monochromatic or a rainbow k-AP?
pub fn is_can_k_vdw(set: &GroundSet, k: u32, budget: Budget) -> Result<DecisionResult> {
    check_length(k)?;
    let start = Instant::now();
    let mut meter = Meter::new(budget);
    let outcome = find_avoiding_colouring(set, k, Forbidden::MonoAndRainbow, &mut meter)?;
    Ok(finish(set, outcome, &meter, start))
}

fn check_alpha(alpha: Ratio) -> Result<()> {
    if alpha.is_zero() || alpha > Ratio::from_integer(1) {
        return Err(invalid(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// Largest class size allowed in an alpha-bounded colouring of `len` elements.
fn class_bound(alpha: Ratio, len: usize) -> usize {
    ((*alpha.numer() as u128 * len as u128) / *alpha.denom() as u128) as usize
}

/// Number of colours the rainbow search needs to consider: any alpha-bounded
/// colouring can be merged into one with at most `floor(4 / alpha)` colours
/// that is still alpha-bounded, and merging never creates rainbow APs.
pub fn merging_palette_cap(alpha: Ratio) -> u32 {
    let cap = (Ratio::from_integer(4) / alpha).to_integer();
    cap.min(u64::from(u32::MAX)) as u32
}

fn alpha_rb(
    set: &GroundSet,
    alpha: Ratio,
    k: u32,
    cap: u32,
    budget: Budget,
) -> Result<DecisionResult> {
    check_length(k)?;
    check_alpha(alpha)?;
    let start = Instant::now();
    let mut meter = Meter::new(budget);
    let aps = ap_indices(set, k)?;
    let bound = class_bound(alpha, set.len());
    debug_assert!(within_fraction(bound, alpha, set.len()));
    let problem = PartitionProblem {
        len: set.len(),
        k: k as usize,
        aps: &aps,
        forbid_mono: false,
        forbid_rainbow: true,
        cap,
        class_bound: Some(bound),
    };
    let outcome = match partition::solve(&problem, &mut meter) {
        SearchOutcome::Found(c) => Some(Some(c)),
        SearchOutcome::NoneExists => Some(None),
        SearchOutcome::Exhausted => None,
    };
    Ok(finish(set, outcome, &meter, start))
}

/// Does every alpha-bounded colouring of `set` contain a rainbow k-AP?
///
/// Only colourings with at most [`merging_palette_cap`] colours are searched.
pub fn is_alpha_k_rb(
    set: &GroundSet,
    alpha: Ratio,
    k: u32,
    budget: Budget,
) -> Result<DecisionResult> {
    check_alpha(alpha)?;
    alpha_rb(set, alpha, k, merging_palette_cap(alpha), budget)
}

/// [`is_alpha_k_rb`] without the palette reduction; every set partition is a
/// candidate.
pub fn is_alpha_k_rb_uncapped(
    set: &GroundSet,
    alpha: Ratio,
    k: u32,
    budget: Budget,
) -> Result<DecisionResult> {
    alpha_rb(set, alpha, k, set.len().max(1) as u32, budget)
}

fn max_free_subset(set: &GroundSet, k: u32, meter: &mut Meter) -> Result<Option<GroundSet>> {
    check_length(k)?;
    let aps = ap_indices(set, k)?;
    let problem = SubsetProblem::new(set.len(), k as usize, &aps);
    Ok(match problem.solve(meter) {
        SubsetOutcome::Found(idx) => {
            let elems = idx.into_iter().map(|i| set.elements()[i]).collect();
            Some(GroundSet::new(set.ambient(), elems).expect("subset of a valid set"))
        }
        SubsetOutcome::Exhausted => None,
    })
}

/// A largest subset of `set` without k-APs; among those of maximum size, the
/// lexicographically smallest.
pub fn max_ap_free_subset(set: &GroundSet, k: u32) -> Result<GroundSet> {
    let mut meter = Meter::new(Budget::unlimited());
    Ok(max_free_subset(set, k, &mut meter)?.expect("unlimited budget"))
}

/// Does every subset of `set` with at least `alpha |A|` elements contain a k-AP?
pub fn is_alpha_k_sz(
    set: &GroundSet,
    alpha: Ratio,
    k: u32,
    budget: Budget,
) -> Result<DecisionResult> {
    check_length(k)?;
    check_alpha(alpha)?;
    let start = Instant::now();
    let mut meter = Meter::new(budget);
    let found = max_free_subset(set, k, &mut meter)?;
    let (verdict, certificate) = match found {
        None => (Verdict::BudgetExhausted, None),
        // Holds iff |B| < alpha |A| for a largest AP-free B.
        Some(b) => {
            let reaches = (b.len() as u128) * u128::from(*alpha.denom())
                >= u128::from(*alpha.numer()) * set.len() as u128;
            if reaches {
                (Verdict::Fails, Some(Certificate::Subset(b)))
            } else {
                (Verdict::Holds, None)
            }
        }
    };
    Ok(DecisionResult {
        verdict,
        certificate,
        nodes_explored: meter.nodes,
        elapsed: start.elapsed(),
    })
}
