//! Seeded binomial random subsets and Monte Carlo estimates of property
//! probabilities, thresholds and their scaling in `n`.
//!
//! Trial `i` of a plan with seed `s` draws one uniform `u_x` per element from
//! ChaCha8 stream `i` keyed by `s`, and keeps `x` iff `u_x < p`. The same
//! uniforms are used for every `p`, so for a fixed trial the sampled sets grow
//! with `p` and monotone properties give monotone estimates.

use std::collections::HashMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::ap::{build_ap_hypergraph, GroundSet};
use crate::cycles::has_girth_at_least;
use crate::decider::{is_alpha_k_rb, is_alpha_k_sz, is_can_k_vdw, is_r_k_vdw, Budget, Verdict};
use crate::{invalid, Error, Ratio, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Property evaluated on each sampled set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Property {
    CanVdw {
        k: u32,
    },
    RkVdw {
        r: u32,
        k: u32,
    },
    AlphaRb {
        alpha: Ratio,
        k: u32,
    },
    AlphaSz {
        alpha: Ratio,
        k: u32,
    },
    GirthAtLeast {
        g: u32,
        k: u32,
    },
    /// `|A| >= m`; a property with a known binomial profile, for calibration.
    SizeAtLeast {
        m: usize,
    },
}

impl Property {
    /// Verdict and search nodes for one set.
    pub fn evaluate(&self, set: &GroundSet, budget: Budget) -> Result<(Verdict, u64)> {
        let from = |holds: bool| {
            if holds {
                Verdict::Holds
            } else {
                Verdict::Fails
            }
        };
        let decided = |r: crate::DecisionResult| (r.verdict, r.nodes_explored);
        Ok(match *self {
            Property::CanVdw { k } => decided(is_can_k_vdw(set, k, budget)?),
            Property::RkVdw { r, k } => decided(is_r_k_vdw(set, r, k, budget)?),
            Property::AlphaRb { alpha, k } => decided(is_alpha_k_rb(set, alpha, k, budget)?),
            Property::AlphaSz { alpha, k } => decided(is_alpha_k_sz(set, alpha, k, budget)?),
            Property::GirthAtLeast { g, k } => {
                let h = build_ap_hypergraph(set, k)?;
                (from(has_girth_at_least(&h, g)?), 0)
            }
            Property::SizeAtLeast { m } => (from(set.len() >= m), 0),
        })
    }

    /// Whether adding elements can only turn the property from failing to
    /// holding. Threshold bisection requires this.
    pub fn is_monotone_increasing(&self) -> bool {
        matches!(
            self,
            Property::CanVdw { .. } | Property::RkVdw { .. } | Property::SizeAtLeast { .. }
        )
    }

    fn validate(&self) -> Result<()> {
        // Evaluating on the empty set runs every parameter check cheaply.
        self.evaluate(&GroundSet::empty(0), Budget::nodes(1))
            .map(|_| ())
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::CanVdw { k } => write!(f, "can-{k}-vdw"),
            Property::RkVdw { r, k } => write!(f, "({r},{k})-vdw"),
            Property::AlphaRb { alpha, k } => write!(f, "{alpha}-{k}-rb"),
            Property::AlphaSz { alpha, k } => write!(f, "{alpha}-{k}-sz"),
            Property::GirthAtLeast { g, k } => write!(f, "girth>={g} (k={k})"),
            Property::SizeAtLeast { m } => write!(f, "size>={m}"),
        }
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// The uniforms `u_1..u_n` of one trial.
pub fn element_uniforms(n: u32, seed: u64, trial: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

fn threshold_set(n: u32, uniforms: &[f64], p: f64) -> GroundSet {
    let elems = (1..=n)
        .filter(|&x| uniforms[(x - 1) as usize] < p)
        .collect();
    GroundSet::new(n, elems).expect("increasing subset of [n]")
}

/// `[n]_p` for one trial: `x` is kept iff its uniform is below `p`.
pub fn sample_binomial_set(n: u32, p: f64, seed: u64, trial: u64) -> Result<GroundSet> {
    check_probability(p)?;
    Ok(threshold_set(n, &element_uniforms(n, seed, trial), p))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialPlan {
    pub n: u32,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub property: Property,
    pub node_budget: Budget,
}

impl TrialPlan {
    fn validate(&self) -> Result<()> {
        check_probability(self.p)?;
        if self.trials == 0 {
            return Err(invalid("at least one trial is required"));
        }
        self.property.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub size: usize,
    pub verdict: Verdict,
    pub nodes: u64,
}

/// Which way budget-exhausted trials are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// Exhausted trials are dropped.
    Point,
    /// Exhausted trials count as successes.
    Optimistic,
    /// Exhausted trials count as failures.
    Pessimistic,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Point, Band::Optimistic, Band::Pessimistic];
}

/// Wilson score interval for `successes` out of `total` at normal quantile `z`.
pub fn wilson_interval(successes: u64, total: u64, z: f64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Aggregate of a plan's trials. `timings` holds per-trial wall-clock time
/// and is not part of equality or serialization.
#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub successes: u64,
    pub failures: u64,
    pub budget_exhausted: u64,
    pub records: Vec<TrialRecord>,
    #[serde(skip)]
    pub timings: Vec<Duration>,
}

impl PartialEq for TrialOutcome {
    fn eq(&self, other: &Self) -> bool {
        (self.successes, self.failures, self.budget_exhausted)
            == (other.successes, other.failures, other.budget_exhausted)
            && self.records == other.records
    }
}

impl TrialOutcome {
    fn from_records(records: Vec<TrialRecord>, timings: Vec<Duration>) -> Self {
        let count = |v: Verdict| records.iter().filter(|r| r.verdict == v).count() as u64;
        TrialOutcome {
            successes: count(Verdict::Holds),
            failures: count(Verdict::Fails),
            budget_exhausted: count(Verdict::BudgetExhausted),
            records,
            timings,
        }
    }

    pub fn trials(&self) -> u64 {
        self.successes + self.failures + self.budget_exhausted
    }

    /// Success and total counts under a band.
    fn counts(&self, band: Band) -> (u64, u64) {
        match band {
            Band::Point => (self.successes, self.successes + self.failures),
            Band::Optimistic => (self.successes + self.budget_exhausted, self.trials()),
            Band::Pessimistic => (self.successes, self.trials()),
        }
    }

    /// Success fraction under a band. With every trial exhausted the point
    /// estimate is undefined and reported as 1/2.
    pub fn estimate(&self, band: Band) -> f64 {
        let (s, t) = self.counts(band);
        if t == 0 {
            0.5
        } else {
            s as f64 / t as f64
        }
    }

    pub fn point_estimate(&self) -> f64 {
        self.estimate(Band::Point)
    }

    pub fn interval(&self, band: Band) -> (f64, f64) {
        let (s, t) = self.counts(band);
        wilson_interval(s, t, Z_95)
    }

    pub fn confidence_interval(&self) -> (f64, f64) {
        self.interval(Band::Point)
    }

    pub fn total_time(&self) -> Duration {
        self.timings.iter().sum()
    }
}

/// Memoized property values keyed by the sampled set.
#[derive(Debug, Default)]
pub struct TrialCache {
    entries: HashMap<Vec<u32>, (Verdict, u64, Duration)>,
}

impl TrialCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Evaluates trials `range` of `plan`, in parallel over distinct sets.
fn run_trials(
    plan: &TrialPlan,
    range: std::ops::Range<u64>,
    cache: &mut TrialCache,
) -> Result<(Vec<TrialRecord>, Vec<Duration>)> {
    let sets: Vec<GroundSet> = range
        .clone()
        .into_par_iter()
        .map(|t| threshold_set(plan.n, &element_uniforms(plan.n, plan.seed, t), plan.p))
        .collect();
    let mut pending: Vec<&GroundSet> = Vec::new();
    let mut queued: std::collections::HashSet<&[u32]> = std::collections::HashSet::new();
    for s in &sets {
        if !cache.entries.contains_key(s.elements()) && queued.insert(s.elements()) {
            pending.push(s);
        }
    }
    let evaluated: Vec<(Vec<u32>, (Verdict, u64, Duration))> = pending
        .par_iter()
        .map(|s| {
            let start = Instant::now();
            let (v, nodes) = plan.property.evaluate(s, plan.node_budget)?;
            Ok((s.elements().to_vec(), (v, nodes, start.elapsed())))
        })
        .collect::<Result<_>>()?;
    cache.entries.extend(evaluated);
    let mut records = Vec::with_capacity(sets.len());
    let mut timings = Vec::with_capacity(sets.len());
    for (t, s) in range.zip(&sets) {
        let &(verdict, nodes, time) = &cache.entries[s.elements()];
        records.push(TrialRecord {
            trial: t,
            size: s.len(),
            verdict,
            nodes,
        });
        timings.push(time);
    }
    Ok((records, timings))
}

pub fn estimate_probability(plan: &TrialPlan) -> Result<TrialOutcome> {
    estimate_probability_cached(plan, &mut TrialCache::new())
}

pub fn estimate_probability_cached(
    plan: &TrialPlan,
    cache: &mut TrialCache,
) -> Result<TrialOutcome> {
    plan.validate()?;
    let (records, timings) = run_trials(plan, 0..plan.trials, cache)?;
    Ok(TrialOutcome::from_records(records, timings))
}

/// Runs trials in batches of `batch` and stops once the Wilson interval
/// under `band` excludes `target`, or after `plan.trials` trials.
pub fn estimate_until_separated(
    plan: &TrialPlan,
    target: f64,
    band: Band,
    batch: u64,
    cache: &mut TrialCache,
) -> Result<TrialOutcome> {
    plan.validate()?;
    if batch == 0 {
        return Err(invalid("early-stopping batch must be positive"));
    }
    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut done = 0;
    while done < plan.trials {
        let next = (done + batch).min(plan.trials);
        let (r, t) = run_trials(plan, done..next, cache)?;
        records.extend(r);
        timings.extend(t);
        done = next;
        let (lo, hi) = TrialOutcome::from_records(records.clone(), Vec::new()).interval(band);
        if target < lo || target > hi {
            break;
        }
    }
    Ok(TrialOutcome::from_records(records, timings))
}

#[derive(Debug, Clone, Serialize)]
pub struct BisectConfig {
    pub n: u32,
    pub property: Property,
    pub trials: u64,
    pub seed: u64,
    pub target: f64,
    /// Stop once the bracket is at most this wide.
    pub resolution: f64,
    pub node_budget: Budget,
    /// Batch size for early stopping per probe; `None` runs every trial.
    pub early_stop_batch: Option<u64>,
}

impl BisectConfig {
    pub fn new(n: u32, property: Property, trials: u64, seed: u64) -> Self {
        BisectConfig {
            n,
            property,
            trials,
            seed,
            target: 0.5,
            resolution: 1e-3,
            node_budget: Budget::unlimited(),
            early_stop_batch: None,
        }
    }

    fn plan(&self, p: f64) -> TrialPlan {
        TrialPlan {
            n: self.n,
            p,
            trials: self.trials,
            seed: self.seed,
            property: self.property,
            node_budget: self.node_budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Probe {
    pub p: f64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub budget_exhausted: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdEstimate {
    pub band: Band,
    pub p_lo: f64,
    pub p_hi: f64,
    pub at_lo: f64,
    pub at_hi: f64,
    pub probes: Vec<Probe>,
}

impl ThresholdEstimate {
    /// Midpoint of the final bracket.
    pub fn p_star(&self) -> f64 {
        0.5 * (self.p_lo + self.p_hi)
    }
}

/// Three standard deviations of the difference of two estimates.
fn noise(a: &Probe, b: &Probe) -> f64 {
    let var = |q: &Probe| q.estimate * (1.0 - q.estimate) / q.trials.max(1) as f64;
    3.0 * (var(a) + var(b)).sqrt()
}

fn probe(cfg: &BisectConfig, band: Band, p: f64, cache: &mut TrialCache) -> Result<Probe> {
    let plan = cfg.plan(p);
    let out = match cfg.early_stop_batch {
        Some(batch) => estimate_until_separated(&plan, cfg.target, band, batch, cache)?,
        None => estimate_probability_cached(&plan, cache)?,
    };
    let (ci_lo, ci_hi) = out.interval(band);
    Ok(Probe {
        p,
        trials: out.trials(),
        estimate: out.estimate(band),
        ci_lo,
        ci_hi,
        budget_exhausted: out.budget_exhausted,
    })
}

fn check_monotone(probes: &[Probe]) -> Result<()> {
    for a in probes {
        for b in probes {
            if a.p < b.p && a.estimate > b.estimate + noise(a, b) {
                return Err(Error::NonMonotone {
                    p_lo: a.p,
                    at_lo: a.estimate,
                    p_hi: b.p,
                    at_hi: b.estimate,
                });
            }
        }
    }
    Ok(())
}

/// Bisects `[0, 1]` for the `p` at which the band's estimate crosses
/// `cfg.target`. The final bracket has `estimate(p_lo) < target <=
/// estimate(p_hi)`.
pub fn threshold_bisect_band(
    cfg: &BisectConfig,
    band: Band,
    cache: &mut TrialCache,
) -> Result<ThresholdEstimate> {
    if !(cfg.target > 0.0 && cfg.target < 1.0) {
        return Err(invalid(format!(
            "target must lie in (0, 1), got {}",
            cfg.target
        )));
    }
    if cfg.resolution.is_nan() || cfg.resolution <= 0.0 {
        return Err(invalid("resolution must be positive"));
    }
    let mut probes = vec![probe(cfg, band, 0.0, cache)?, probe(cfg, band, 1.0, cache)?];
    let (mut lo, mut hi) = (probes[0].clone(), probes[1].clone());
    if !(lo.estimate < cfg.target && hi.estimate >= cfg.target) {
        return Err(Error::NoCrossing {
            target: cfg.target,
            p_lo: lo.p,
            at_lo: lo.estimate,
            p_hi: hi.p,
            at_hi: hi.estimate,
        });
    }
    while hi.p - lo.p > cfg.resolution {
        let mid = probe(cfg, band, 0.5 * (lo.p + hi.p), cache)?;
        probes.push(mid.clone());
        check_monotone(&probes)?;
        if mid.estimate >= cfg.target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    probes.sort_by(|a, b| a.p.total_cmp(&b.p));
    Ok(ThresholdEstimate {
        band,
        p_lo: lo.p,
        p_hi: hi.p,
        at_lo: lo.estimate,
        at_hi: hi.estimate,
        probes,
    })
}

pub fn threshold_bisect(cfg: &BisectConfig) -> Result<ThresholdEstimate> {
    threshold_bisect_band(cfg, Band::Point, &mut TrialCache::new())
}

/// Thresholds under all three bands, sharing one cache of decided sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandedThreshold {
    pub point: ThresholdEstimate,
    pub optimistic: ThresholdEstimate,
    pub pessimistic: ThresholdEstimate,
}

impl BandedThreshold {
    pub fn get(&self, band: Band) -> &ThresholdEstimate {
        match band {
            Band::Point => &self.point,
            Band::Optimistic => &self.optimistic,
            Band::Pessimistic => &self.pessimistic,
        }
    }
}

pub fn threshold_bands(cfg: &BisectConfig) -> Result<BandedThreshold> {
    let mut cache = TrialCache::new();
    Ok(BandedThreshold {
        point: threshold_bisect_band(cfg, Band::Point, &mut cache)?,
        optimistic: threshold_bisect_band(cfg, Band::Optimistic, &mut cache)?,
        pessimistic: threshold_bisect_band(cfg, Band::Pessimistic, &mut cache)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: u32,
    pub threshold: BandedThreshold,
}

impl ScalingRow {
    pub fn p_star(&self, band: Band) -> f64 {
        self.threshold.get(band).p_star()
    }

    /// `p* n^{1/(k-1)}`.
    pub fn normalized(&self, band: Band, k: u32) -> f64 {
        self.p_star(band) * f64::from(self.n).powf(1.0 / f64::from(k - 1))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingTable {
    pub k: u32,
    pub rows: Vec<ScalingRow>,
}

impl ScalingTable {
    /// Max over min of the normalized thresholds under `band`.
    pub fn spread(&self, band: Band) -> f64 {
        let vals: Vec<f64> = self
            .rows
            .iter()
            .map(|r| r.normalized(band, self.k))
            .collect();
        let max = vals.iter().copied().fold(f64::MIN, f64::max);
        let min = vals.iter().copied().fold(f64::MAX, f64::min);
        max / min
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,band,p_star,p_lo,p_hi,normalized\n");
        for row in &self.rows {
            for band in Band::ALL {
                let t = row.threshold.get(band);
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.n,
                    band_name(band),
                    t.p_star(),
                    t.p_lo,
                    t.p_hi,
                    row.normalized(band, self.k)
                ));
            }
        }
        out
    }
}

pub fn band_name(band: Band) -> &'static str {
    match band {
        Band::Point => "point",
        Band::Optimistic => "optimistic",
        Band::Pessimistic => "pessimistic",
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingConfig {
    pub k: u32,
    pub n_list: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    pub resolution: f64,
    pub node_budget: Budget,
    pub early_stop_batch: Option<u64>,
}

/// Can-k-vdW thresholds for each `n`, normalized by `n^{1/(k-1)}`.
pub fn scaling_experiment(cfg: &ScalingConfig) -> Result<ScalingTable> {
    if cfg.n_list.is_empty() {
        return Err(invalid("n list must not be empty"));
    }
    if cfg.n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n list must be strictly increasing"));
    }
    let rows = cfg
        .n_list
        .iter()
        .map(|&n| {
            let bisect = BisectConfig {
                n,
                property: Property::CanVdw { k: cfg.k },
                trials: cfg.trials,
                seed: cfg.seed,
                target: 0.5,
                resolution: cfg.resolution,
                node_budget: cfg.node_budget,
                early_stop_batch: cfg.early_stop_batch,
            };
            Ok(ScalingRow {
                n,
                threshold: threshold_bands(&bisect)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ScalingTable { k: cfg.k, rows })
}

/// One point of an estimated probability curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: u32,
    pub p: f64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

pub fn curve_point(plan: &TrialPlan, outcome: &TrialOutcome) -> CurvePoint {
    let (ci_lo, ci_hi) = outcome.confidence_interval();
    CurvePoint {
        n: plan.n,
        p: plan.p,
        estimate: outcome.point_estimate(),
        ci_lo,
        ci_hi,
    }
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("n,p,estimate,ci_lo,ci_hi\n");
    for c in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.n, c.p, c.estimate, c.ci_lo, c.ci_hi
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttemptRecord {
    pub attempt: u64,
    pub size: usize,
    pub girth_ok: bool,
    /// `None` when the girth check already failed.
    pub canvdw: Option<Verdict>,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SparseSearch {
    pub k: u32,
    pub g: u32,
    pub n: u32,
    pub p: f64,
    pub seed: u64,
    pub found: Option<GroundSet>,
    pub attempts: Vec<AttemptRecord>,
}

/// Samples `[n]_p` until a set is found whose k-AP hypergraph has girth at
/// least `g` and which is can-k-vdW. Attempt `i` uses trial index `i`.
pub fn search_sparse_canvdw(
    k: u32,
    g: u32,
    n: u32,
    p: f64,
    max_attempts: u64,
    seed: u64,
    budget: Budget,
) -> Result<SparseSearch> {
    check_probability(p)?;
    if g < 2 {
        return Err(invalid(format!("girth must be at least 2, got {g}")));
    }
    crate::ap::check_length(k)?;
    let mut attempts = Vec::new();
    let mut found = None;
    for attempt in 0..max_attempts {
        let set = sample_binomial_set(n, p, seed, attempt)?;
        let girth_ok = has_girth_at_least(&build_ap_hypergraph(&set, k)?, g)?;
        let (canvdw, nodes) = if girth_ok {
            let r = is_can_k_vdw(&set, k, budget)?;
            (Some(r.verdict), r.nodes_explored)
        } else {
            (None, 0)
        };
        attempts.push(AttemptRecord {
            attempt,
            size: set.len(),
            girth_ok,
            canvdw,
            nodes,
        });
        if canvdw == Some(Verdict::Holds) {
            found = Some(set);
            break;
        }
    }
    Ok(SparseSearch {
        k,
        g,
        n,
        p,
        seed,
        found,
        attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(n: u32, p: f64, trials: u64, property: Property) -> TrialPlan {
        TrialPlan {
            n,
            p,
            trials,
            seed: 7,
            property,
            node_budget: Budget::unlimited(),
        }
    }

    #[test]
    fn sampling_extremes_and_reproducibility() {
        assert!(sample_binomial_set(50, 0.0, 1, 3).unwrap().is_empty());
        assert_eq!(
            sample_binomial_set(50, 1.0, 1, 3).unwrap(),
            GroundSet::interval(50)
        );
        let a = sample_binomial_set(200, 0.3, 11, 5).unwrap();
        assert_eq!(a, sample_binomial_set(200, 0.3, 11, 5).unwrap());
        assert_ne!(a, sample_binomial_set(200, 0.3, 11, 6).unwrap());
        assert!(sample_binomial_set(10, 1.5, 1, 0).is_err());
        assert!(sample_binomial_set(10, -0.1, 1, 0).is_err());
    }

    #[test]
    fn sets_grow_with_p() {
        for t in 0..20 {
            let small = sample_binomial_set(100, 0.2, 3, t).unwrap();
            let large = sample_binomial_set(100, 0.4, 3, t).unwrap();
            assert!(small.is_subset_of(&large));
        }
    }

    #[test]
    fn wilson_reference_values() {
        let (lo, hi) = wilson_interval(5, 10, Z_95);
        assert!((lo - 0.236_593).abs() < 1e-5 && (hi - 0.763_407).abs() < 1e-5);
        let (lo, hi) = wilson_interval(0, 10, Z_95);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_533).abs() < 1e-5);
        assert_eq!(wilson_interval(0, 0, Z_95), (0.0, 1.0));
    }

    #[test]
    fn estimates_at_extremes() {
        let out = estimate_probability(&plan(20, 0.0, 16, Property::CanVdw { k: 3 })).unwrap();
        assert_eq!((out.successes, out.failures), (0, 16));
        assert_eq!(out.point_estimate(), 0.0);
        let out = estimate_probability(&plan(20, 1.0, 4, Property::SizeAtLeast { m: 20 })).unwrap();
        assert_eq!(out.point_estimate(), 1.0);
        let (lo, hi) = out.confidence_interval();
        assert!(lo <= 1.0 && hi == 1.0);
        assert!(estimate_probability(&plan(20, 0.5, 0, Property::SizeAtLeast { m: 1 })).is_err());
        assert!(estimate_probability(&plan(20, 0.5, 1, Property::CanVdw { k: 2 })).is_err());
    }

    #[test]
    fn bands_and_exhaustion() {
        let mut p = plan(9, 1.0, 3, Property::RkVdw { r: 2, k: 3 });
        p.node_budget = Budget::nodes(2);
        let out = estimate_probability(&p).unwrap();
        assert_eq!(out.budget_exhausted, 3);
        assert_eq!(out.estimate(Band::Optimistic), 1.0);
        assert_eq!(out.estimate(Band::Pessimistic), 0.0);
        assert_eq!(out.point_estimate(), 0.5);
        assert_eq!(out.trials(), 3);
    }

    #[test]
    fn determinism_ignores_timing() {
        let p = plan(40, 0.3, 24, Property::CanVdw { k: 3 });
        let a = estimate_probability(&p).unwrap();
        let b = estimate_probability(&p).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn early_stopping_stops_once_separated() {
        let p = plan(30, 1.0, 100, Property::SizeAtLeast { m: 30 });
        let out =
            estimate_until_separated(&p, 0.5, Band::Point, 10, &mut TrialCache::new()).unwrap();
        assert_eq!(out.trials(), 10);
        assert_eq!(out.records.len(), 10);
    }

    #[test]
    fn bisect_size_property() {
        let mut cfg = BisectConfig::new(100, Property::SizeAtLeast { m: 50 }, 200, 1);
        cfg.resolution = 1e-3;
        let t = threshold_bisect(&cfg).unwrap();
        assert!(t.at_lo < 0.5 && t.at_hi >= 0.5);
        assert!(t.p_hi - t.p_lo <= 1e-3);
        assert!((t.p_star() - 0.5).abs() < 0.05);
    }

    #[test]
    fn bisect_without_crossing() {
        let cfg = BisectConfig::new(10, Property::SizeAtLeast { m: 0 }, 10, 1);
        assert!(matches!(
            threshold_bisect(&cfg),
            Err(Error::NoCrossing { .. })
        ));
        let mut cfg = BisectConfig::new(10, Property::SizeAtLeast { m: 1 }, 10, 1);
        cfg.target = 1.0;
        assert!(threshold_bisect(&cfg).is_err());
    }

    #[test]
    fn non_monotone_profile_is_reported() {
        let lo = Probe {
            p: 0.2,
            trials: 1000,
            estimate: 0.9,
            ci_lo: 0.0,
            ci_hi: 1.0,
            budget_exhausted: 0,
        };
        let hi = Probe {
            p: 0.4,
            trials: 1000,
            estimate: 0.1,
            ..lo.clone()
        };
        assert!(matches!(
            check_monotone(&[lo.clone(), hi.clone()]),
            Err(Error::NonMonotone { .. })
        ));
        let rising = Probe {
            estimate: 0.95,
            ..hi
        };
        assert!(check_monotone(&[lo, rising]).is_ok());
    }

    #[test]
    fn scaling_single_row() {
        let cfg = ScalingConfig {
            k: 3,
            n_list: vec![16],
            trials: 20,
            seed: 2,
            resolution: 0.01,
            node_budget: Budget::unlimited(),
            early_stop_batch: None,
        };
        let table = scaling_experiment(&cfg).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.spread(Band::Point), 1.0);
        assert!(table.to_csv().starts_with("n,band,p_star"));
        let bad = ScalingConfig {
            n_list: vec![32, 16],
            ..cfg
        };
        assert!(scaling_experiment(&bad).is_err());
    }

    #[test]
    fn sparse_search_with_trivial_girth() {
        let res = search_sparse_canvdw(3, 2, 30, 1.0, 3, 0, Budget::unlimited()).unwrap();
        let expected = is_can_k_vdw(&GroundSet::interval(30), 3, Budget::unlimited())
            .unwrap()
            .holds();
        assert_eq!(res.found.is_some(), expected);
        assert!(res.attempts.iter().all(|a| a.girth_ok));
        assert!(search_sparse_canvdw(3, 1, 30, 0.5, 3, 0, Budget::unlimited()).is_err());
    }
}
