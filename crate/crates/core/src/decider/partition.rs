//! Backtracking over set partitions with forward checking.
//!
//! At every node the uncoloured element with the fewest allowed colours is
//! branched on (ties: most progressions still open, then smallest index).
//! It may take any colour already in use or the single next unused colour,
//! so each set partition is visited at most once. When a progression has
//! exactly one uncoloured element left, the forbidden patterns become
//! colour bans on that element.
//!
//! Bans only ever name used colours, except the rainbow ban which removes
//! every unused colour at once. So all unused colours of an element are
//! allowed or banned together, and the bit of the next unused colour
//! stands for all of them.

use super::Meter;

pub(crate) struct PartitionProblem<'a> {
    pub len: usize,
    pub k: usize,
    /// Flat list of progressions, `k` local indices each.
    pub aps: &'a [u32],
    pub forbid_mono: bool,
    pub forbid_rainbow: bool,
    /// Maximum number of colours.
    pub cap: u32,
    /// Maximum size of a colour class.
    pub class_bound: Option<usize>,
}

pub(crate) enum SearchOutcome {
    /// A colouring in restricted-growth form.
    Found(Vec<u32>),
    NoneExists,
    Exhausted,
}

const UNCOLOURED: u32 = u32::MAX;

struct Exhausted;

struct Search<'a, 'm> {
    p: &'a PartitionProblem<'a>,
    words: usize,
    through: Vec<Vec<u32>>,
    open: Vec<u32>,
    colours: Vec<u32>,
    allowed: Vec<u64>,
    trail: Vec<(u32, u64)>,
    counts: Vec<usize>,
    scratch: Vec<u64>,
    meter: &'m mut Meter,
}

pub(crate) fn solve(problem: &PartitionProblem<'_>, meter: &mut Meter) -> SearchOutcome {
    if problem.len == 0 {
        return SearchOutcome::Found(Vec::new());
    }
    if problem.cap == 0 {
        return SearchOutcome::NoneExists;
    }
    if let Some(b) = problem.class_bound {
        if (b as u128) * u128::from(problem.cap) < problem.len as u128 {
            return SearchOutcome::NoneExists;
        }
    }
    let k = problem.k;
    let mut through = vec![Vec::new(); problem.len];
    for (id, ap) in problem.aps.chunks_exact(k).enumerate() {
        for &x in ap {
            through[x as usize].push(id as u32);
        }
    }
    let cap = problem.cap.min(problem.len as u32) as usize;
    let words = cap.div_ceil(64);
    let mut row = vec![!0u64; words];
    if !cap.is_multiple_of(64) {
        row[words - 1] = (1u64 << (cap % 64)) - 1;
    }
    let mut allowed = Vec::with_capacity(words * problem.len);
    for _ in 0..problem.len {
        allowed.extend_from_slice(&row);
    }
    let mut search = Search {
        p: problem,
        words,
        through,
        open: vec![k as u32; problem.aps.len() / k],
        colours: vec![UNCOLOURED; problem.len],
        allowed,
        trail: Vec::new(),
        counts: vec![0; cap],
        scratch: vec![0; words],
        meter,
    };
    match search.assign(0) {
        Ok(true) => SearchOutcome::Found(crate::colouring::normalize(&search.colours)),
        Ok(false) => SearchOutcome::NoneExists,
        Err(Exhausted) => SearchOutcome::Exhausted,
    }
}

impl Search<'_, '_> {
    fn is_allowed(&self, i: usize, c: usize) -> bool {
        self.allowed[i * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn set_word(&mut self, idx: usize, value: u64) {
        let old = self.allowed[idx];
        if old != value {
            self.trail.push((idx as u32, old));
            self.allowed[idx] = value;
        }
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (idx, old) = self.trail.pop().expect("trail entry");
            self.allowed[idx as usize] = old;
        }
    }

    /// Allowed colours among `0..=used` (the last standing for every unused
    /// colour), respecting the class bound.
    fn domain_size(&self, u: usize, used: usize) -> usize {
        let cap = self.counts.len();
        let top = used.min(cap - 1);
        (0..=top)
            .filter(|&c| {
                self.is_allowed(u, c) && self.p.class_bound.is_none_or(|b| self.counts[c] < b)
            })
            .count()
    }

    fn pick(&self, used: usize) -> Option<usize> {
        let mut best: Option<(usize, usize, usize)> = None;
        for u in 0..self.p.len {
            if self.colours[u] != UNCOLOURED {
                continue;
            }
            let size = self.domain_size(u, used);
            if size == 0 {
                return Some(u);
            }
            let degree = self.through[u]
                .iter()
                .filter(|&&id| self.open[id as usize] >= 2)
                .count();
            let better = match best {
                None => true,
                Some((_, s, d)) => size < s || (size == s && degree > d),
            };
            if better {
                best = Some((u, size, degree));
            }
        }
        best.map(|(u, _, _)| u)
    }

    fn assign(&mut self, used: usize) -> Result<bool, Exhausted> {
        let Some(i) = self.pick(used) else {
            return Ok(true);
        };
        let top = used.min(self.counts.len() - 1);
        for c in 0..=top {
            if !self.is_allowed(i, c) {
                continue;
            }
            if self.p.class_bound.is_some_and(|b| self.counts[c] >= b) {
                continue;
            }
            if !self.meter.tick() {
                return Err(Exhausted);
            }
            self.colours[i] = c as u32;
            self.counts[c] += 1;
            for t in 0..self.through[i].len() {
                self.open[self.through[i][t] as usize] -= 1;
            }
            let next_used = used.max(c + 1);
            let mark = self.trail.len();
            let ok = self.propagate(i, next_used) && self.assign(next_used)?;
            if ok {
                return Ok(true);
            }
            self.undo(mark);
            for t in 0..self.through[i].len() {
                self.open[self.through[i][t] as usize] += 1;
            }
            self.counts[c] -= 1;
            self.colours[i] = UNCOLOURED;
        }
        Ok(false)
    }

    /// Bans colours on the last uncoloured element of every progression
    /// through `i`. Returns false on a domain wipe-out.
    fn propagate(&mut self, i: usize, used: usize) -> bool {
        let k = self.p.k;
        for t in 0..self.through[i].len() {
            let id = self.through[i][t] as usize;
            if self.open[id] != 1 {
                continue;
            }
            let ap = &self.p.aps[id * k..(id + 1) * k];
            let u = ap
                .iter()
                .map(|&x| x as usize)
                .find(|&x| self.colours[x] == UNCOLOURED)
                .expect("one open element");
            let coloured: Vec<u32> = ap
                .iter()
                .map(|&x| self.colours[x as usize])
                .filter(|&c| c != UNCOLOURED)
                .collect();
            let first = coloured[0];
            let all_equal = coloured.iter().all(|&c| c == first);
            let all_distinct = (1..coloured.len()).all(|a| !coloured[..a].contains(&coloured[a]));
            let mut changed = false;
            if self.p.forbid_mono && all_equal {
                let idx = u * self.words + first as usize / 64;
                let w = self.allowed[idx] & !(1u64 << (first % 64));
                changed |= w != self.allowed[idx];
                self.set_word(idx, w);
            }
            if self.p.forbid_rainbow && all_distinct {
                self.scratch.iter_mut().for_each(|w| *w = 0);
                for &c in &coloured {
                    self.scratch[c as usize / 64] |= 1u64 << (c % 64);
                }
                for wi in 0..self.words {
                    let idx = u * self.words + wi;
                    let w = self.allowed[idx] & self.scratch[wi];
                    changed |= w != self.allowed[idx];
                    self.set_word(idx, w);
                }
            }
            if changed && self.domain_size(u, used) == 0 {
                return false;
            }
        }
        true
    }
}
