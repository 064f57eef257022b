//! Maximum AP-free subsets by Russian-doll search.
//!
//! `best[i]` is the size of a largest AP-free subset of the suffix starting
//! at element `i`. Suffixes are solved from the right; each solve only has to
//! decide whether `best[i + 1] + 1` is reachable with element `i` included,
//! using the already-known suffix values as bounds.

use super::Meter;

pub(crate) struct SubsetProblem {
    len: usize,
    /// For each element, the other `k - 1` members of every progression in
    /// which it is the largest element.
    closing: Vec<Vec<Vec<u32>>>,
}

pub(crate) enum SubsetOutcome {
    Found(Vec<usize>),
    Exhausted,
}

impl SubsetProblem {
    pub fn new(len: usize, k: usize, aps: &[u32]) -> Self {
        let mut closing = vec![Vec::new(); len];
        for ap in aps.chunks_exact(k) {
            closing[ap[k - 1] as usize].push(ap[..k - 1].to_vec());
        }
        Self { len, closing }
    }

    fn fits(&self, x: usize, chosen: &[bool]) -> bool {
        !self.closing[x]
            .iter()
            .any(|rest| rest.iter().all(|&y| chosen[y as usize]))
    }

    /// A maximum AP-free subset, lexicographically smallest among those of
    /// maximum size.
    pub fn solve(&self, meter: &mut Meter) -> SubsetOutcome {
        let n = self.len;
        let mut best = vec![0usize; n + 1];
        let mut chosen = vec![false; n];
        for i in (0..n).rev() {
            let target = best[i + 1] + 1;
            chosen[i] = true;
            match self.extend(i + 1, 1, target, &best, &mut chosen, meter) {
                Some(found) => best[i] = if found { target } else { best[i + 1] },
                None => return SubsetOutcome::Exhausted,
            }
            chosen.iter_mut().for_each(|c| *c = false);
        }
        // Include-first descent visits equal-size subsets in lexicographic
        // order, so the first hit of size best[0] is the smallest one.
        let target = best[0];
        match self.extend(0, 0, target, &best, &mut chosen, meter) {
            Some(true) => SubsetOutcome::Found((0..n).filter(|&x| chosen[x]).collect()),
            Some(false) => unreachable!("suffix bound is attained"),
            None => SubsetOutcome::Exhausted,
        }
    }

    /// Tries to reach `target` chosen elements using indices `from..`. On
    /// success `chosen` holds the witness. `None` means the budget ran out.
    fn extend(
        &self,
        from: usize,
        size: usize,
        target: usize,
        best: &[usize],
        chosen: &mut [bool],
        meter: &mut Meter,
    ) -> Option<bool> {
        if size >= target {
            return Some(true);
        }
        for j in from..self.len {
            if size + best[j] < target {
                return Some(false);
            }
            if !self.fits(j, chosen) {
                continue;
            }
            if !meter.tick() {
                return None;
            }
            chosen[j] = true;
            if self.extend(j + 1, size + 1, target, best, chosen, meter)? {
                return Some(true);
            }
            chosen[j] = false;
        }
        Some(false)
    }
}
