//! Query pipelines built from a sample and a stripe backend.
//!
//! A sample brackets the rank-`i` score between two of its own points; the
//! backend then reports everything in that stripe. The result is a small
//! set that contains the rank-`i` point whenever the sample is accurate for
//! the query, and counting the points strictly above the stripe pins the
//! exact answer inside it.

use std::cell::Cell;

use crate::epsample::{
    build_eps_sample, stripe_from_sample_at, EpsSample, SampleStripe, ThresholdPair,
};
use crate::error::{usage, Result};
use crate::hier::{HierConfig, HierIndex};
use crate::point::{Dataset, PointId};
use crate::scoring::{ScoringVector, StripeRange};
use crate::select::{check_dim, scored, select_kth_scored, select_rank_exhaustive, RankedAnswer};
use crate::srr::{ExhaustiveScan, KdTree, ScanStats, SrrBackend};

/// Widenings tried before falling back to a full selection.
pub const MAX_RETRIES: usize = 3;

/// Points retrieved for one rank query.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalSet {
    /// Ascending ids of every point in `stripe`.
    pub ids: Vec<PointId>,
    /// Size the set cannot exceed when `guaranteed` holds.
    pub kappa_target: usize,
    pub stripe: StripeRange,
    pub thresholds: ThresholdPair,
    /// The sample was checked accurate on both half-spaces bounding the
    /// stripe, which implies the rank-`i` point is in `ids`.
    pub guaranteed: bool,
    pub stats: ScanStats,
}

impl ConformalSet {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Exhaustive,
    KdTree,
    Hier,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Exhaustive => "exhaustive",
            BackendKind::KdTree => "kdtree",
            BackendKind::Hier => "hier",
        }
    }
}

impl std::str::FromStr for BackendKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(BackendKind::Exhaustive),
            "kdtree" => Ok(BackendKind::KdTree),
            "hier" => Ok(BackendKind::Hier),
            other => Err(usage(format!(
                "unknown backend {other:?} (expected exhaustive, kdtree or hier)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarPipelineConfig {
    pub epsilon: f64,
    pub phi: f64,
    pub backend: BackendKind,
    pub sample_seed: u64,
    pub index_seed: u64,
    pub decay: usize,
}

impl Default for DarPipelineConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.05,
            phi: 0.1,
            backend: BackendKind::KdTree,
            sample_seed: 0,
            index_seed: 0,
            decay: crate::hier::DEFAULT_DECAY,
        }
    }
}

impl DarPipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(usage(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        unit("epsilon", self.epsilon)?;
        unit("phi", self.phi)?;
        if self.decay < 2 {
            return Err(usage(format!("decay rate must be at least 2, got {}", self.decay)));
        }
        Ok(())
    }
}

/// Builds the backend named by `kind` over `data`.
pub fn build_backend(
    data: &Dataset,
    kind: BackendKind,
    decay: usize,
    seed: u64,
) -> Result<Box<dyn SrrBackend + Send + Sync>> {
    Ok(match kind {
        BackendKind::Exhaustive => Box::new(ExhaustiveScan),
        BackendKind::KdTree => Box::new(KdTree::build(data)),
        BackendKind::Hier => Box::new(HierIndex::build(
            data,
            HierConfig {
                decay,
                seed,
                ..HierConfig::default()
            },
        )?),
    })
}

fn check_rank(data: &Dataset, f: &ScoringVector, i: usize) -> Result<()> {
    check_dim(data, f)?;
    if i == 0 || i > data.len() {
        return Err(usage(format!("rank {i} out of range 1..={}", data.len())));
    }
    Ok(())
}

/// Half-space accuracy check for the two sides of a sample stripe.
fn sides_accurate(
    data: &Dataset,
    sample: &EpsSample,
    backend: &dyn SrrBackend,
    s: &SampleStripe,
    epsilon: f64,
) -> Result<bool> {
    let n = data.len() as f64;
    let m = sample.len() as f64;
    let f = &s.stripe.f;
    let sample_scores: Vec<f64> = sample.ids().iter().map(|&id| f.score_coords(data.coords(id))).collect();
    let check = |t: f64, strict: bool| -> Result<bool> {
        let full = backend.count_halfspace(data, f, t, strict)? as f64;
        let part = sample_scores
            .iter()
            .filter(|&&x| if strict { x > t } else { x >= t })
            .count() as f64;
        Ok((full / n - part / m).abs() <= epsilon)
    };
    let above = s.stripe.upper == f64::INFINITY || check(s.stripe.upper, true)?;
    let below = s.stripe.lower == f64::NEG_INFINITY || check(s.stripe.lower, false)?;
    Ok(above && below)
}

fn conformal_at(
    data: &Dataset,
    sample: &EpsSample,
    backend: &dyn SrrBackend,
    f: &ScoringVector,
    i: usize,
    epsilon: f64,
) -> Result<ConformalSet> {
    let s = stripe_from_sample_at(data, sample, f, i, epsilon)?;
    let hits = backend.query_stripe(data, &s.stripe)?;
    let guaranteed = sides_accurate(data, sample, backend, &s, epsilon)?;
    let bound = s.thresholds.size_bound(data.len(), sample.len(), epsilon);
    Ok(ConformalSet {
        ids: hits.ids,
        kappa_target: (bound.ceil() as usize).min(data.len()),
        stripe: s.stripe,
        thresholds: s.thresholds,
        guaranteed,
        stats: hits.stats,
    })
}

/// Stripe retrieval around the rank-`i` score, bracketed by the sample.
pub fn conformal_query(
    data: &Dataset,
    sample: &EpsSample,
    backend: &dyn SrrBackend,
    f: &ScoringVector,
    i: usize,
) -> Result<ConformalSet> {
    check_rank(data, f, i)?;
    conformal_at(data, sample, backend, f, i, sample.effective_epsilon())
}

/// How an exact answer was reached.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutcome {
    pub answer: RankedAnswer,
    /// Stripe queries issued (1 when the first stripe held the answer).
    pub attempts: usize,
    pub fell_back: bool,
    /// Points strictly above the final stripe.
    pub above: usize,
    /// Size of the final stripe's result.
    pub candidates: usize,
    pub stats: ScanStats,
}

/// The rank-`i` point, always exact.
pub fn exact_query(
    data: &Dataset,
    sample: &EpsSample,
    backend: &dyn SrrBackend,
    f: &ScoringVector,
    i: usize,
) -> Result<RankedAnswer> {
    exact_query_traced(data, sample, backend, f, i).map(|o| o.answer)
}

/// [`exact_query`] with diagnostics.
///
/// If the stripe turns out not to hold rank `i` the sample's ε is doubled
/// and the stripe rebuilt, up to [`MAX_RETRIES`] times, before a full
/// selection answers instead.
pub fn exact_query_traced(
    data: &Dataset,
    sample: &EpsSample,
    backend: &dyn SrrBackend,
    f: &ScoringVector,
    i: usize,
) -> Result<ExactOutcome> {
    check_rank(data, f, i)?;
    let mut epsilon = sample.effective_epsilon();
    let mut stats = ScanStats::default();
    let mut last = (0, 0);
    for attempt in 1..=MAX_RETRIES + 1 {
        let s = stripe_from_sample_at(data, sample, f, i, epsilon)?;
        let hits = backend.query_stripe(data, &s.stripe)?;
        stats.points_examined += hits.stats.points_examined;
        stats.nodes_visited += hits.stats.nodes_visited;
        let above = if s.stripe.upper == f64::INFINITY {
            0
        } else {
            backend.count_halfspace(data, f, s.stripe.upper, true)?
        };
        last = (above, hits.ids.len());
        if above < i && i - above <= hits.ids.len() {
            let mut items = scored(data, f, &hits.ids);
            let hit = select_kth_scored(&mut items, i - above)?;
            return Ok(ExactOutcome {
                answer: RankedAnswer {
                    id: hit.id,
                    rank: i,
                    score: hit.score,
                },
                attempts: attempt,
                fell_back: false,
                above,
                candidates: hits.ids.len(),
                stats,
            });
        }
        epsilon = if epsilon == 0.0 { 1.0 / data.len() as f64 } else { epsilon * 2.0 };
    }
    stats.points_examined += data.len();
    Ok(ExactOutcome {
        answer: select_rank_exhaustive(data, f, i)?,
        attempts: MAX_RETRIES + 1,
        fell_back: true,
        above: last.0,
        candidates: last.1,
        stats,
    })
}

/// Result of [`choose_epsilon`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonChoice {
    pub epsilon: f64,
    pub sample_size: usize,
    /// Predicted conformal-set size at this ε.
    pub bound: f64,
    /// No grid value met the target; `epsilon` is the smallest one tried.
    pub best_effort: bool,
}

/// Finest grid exponent tried by [`choose_epsilon`].
pub const EPSILON_GRID_DEPTH: u32 = 30;

/// Predicted conformal-set size `min(n, n·(3ε + 2/m))` with `m` capped at `n`.
pub fn predicted_set_size(n: usize, epsilon: f64, m: usize) -> f64 {
    let m = m.clamp(1, n) as f64;
    let n = n as f64;
    (n * (3.0 * epsilon + 2.0 / m)).min(n)
}

/// Largest `ε = 2^-j` whose predicted set size is at most `kappa`.
///
/// `sample_size` maps ε to the sample size that would be drawn at it.
pub fn choose_epsilon(
    n: usize,
    kappa: usize,
    sample_size: impl Fn(f64) -> usize,
) -> Result<EpsilonChoice> {
    if kappa == 0 || kappa > n {
        return Err(usage(format!("target size {kappa} out of range 1..={n}")));
    }
    let mut last = None;
    for j in 1..=EPSILON_GRID_DEPTH {
        let epsilon = 0.5f64.powi(j as i32);
        let m = sample_size(epsilon).min(n);
        let bound = predicted_set_size(n, epsilon, m);
        let choice = EpsilonChoice {
            epsilon,
            sample_size: m,
            bound,
            best_effort: false,
        };
        if bound <= kappa as f64 {
            return Ok(choice);
        }
        last = Some(choice);
    }
    let mut choice = last.expect("grid is nonempty");
    choice.best_effort = true;
    Ok(choice)
}

/// A sample plus a stripe backend over one dataset.
pub struct DarPipeline {
    pub config: DarPipelineConfig,
    pub sample: EpsSample,
    backend: Box<dyn SrrBackend + Send + Sync>,
}

impl DarPipeline {
    pub fn build(data: &Dataset, config: DarPipelineConfig) -> Result<Self> {
        config.validate()?;
        let sample = build_eps_sample(data, config.epsilon, config.phi, config.sample_seed)?;
        Self::with_sample(data, config, sample)
    }

    pub fn with_sample(data: &Dataset, config: DarPipelineConfig, sample: EpsSample) -> Result<Self> {
        config.validate()?;
        if sample.source_n != data.len() {
            return Err(usage("sample was not drawn from this dataset"));
        }
        let backend = build_backend(data, config.backend, config.decay, config.index_seed)?;
        Ok(Self {
            config,
            sample,
            backend,
        })
    }

    pub fn backend(&self) -> &dyn SrrBackend {
        self.backend.as_ref()
    }

    pub fn conformal(&self, data: &Dataset, f: &ScoringVector, i: usize) -> Result<ConformalSet> {
        conformal_query(data, &self.sample, self.backend(), f, i)
    }

    pub fn exact(&self, data: &Dataset, f: &ScoringVector, i: usize) -> Result<ExactOutcome> {
        exact_query_traced(data, &self.sample, self.backend(), f, i)
    }
}

/// Anything that answers "which point has rank `k` under `f`".
pub trait RankOracle {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kth(&self, f: &ScoringVector, k: usize) -> Result<RankedAnswer>;
}

/// Full selection per call.
pub struct ExhaustiveOracle<'a>(pub &'a Dataset);

impl RankOracle for ExhaustiveOracle<'_> {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn kth(&self, f: &ScoringVector, k: usize) -> Result<RankedAnswer> {
        select_rank_exhaustive(self.0, f, k)
    }
}

/// A pipeline bound to its dataset.
pub struct PipelineOracle<'a> {
    pub data: &'a Dataset,
    pub pipeline: &'a DarPipeline,
}

impl RankOracle for PipelineOracle<'_> {
    fn len(&self) -> usize {
        self.data.len()
    }

    fn kth(&self, f: &ScoringVector, k: usize) -> Result<RankedAnswer> {
        self.pipeline.exact(self.data, f, k).map(|o| o.answer)
    }
}

/// Counts calls made through it.
pub struct CountingOracle<O> {
    inner: O,
    calls: Cell<usize>,
}

impl<O: RankOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            calls: Cell::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }

    pub fn reset(&self) {
        self.calls.set(0);
    }
}

impl<O: RankOracle> RankOracle for CountingOracle<O> {
    fn len(&self) -> usize {
        self.inner.len()
    }

    fn kth(&self, f: &ScoringVector, k: usize) -> Result<RankedAnswer> {
        self.calls.set(self.calls.get() + 1);
        self.inner.kth(f, k)
    }
}

/// `|{p : f·p >= threshold}|` by binary search over ranks, using at most
/// `⌈log₂(n + 1)⌉` oracle calls.
pub fn halfspace_count_via_dar(
    oracle: &impl RankOracle,
    f: &ScoringVector,
    threshold: f64,
) -> Result<usize> {
    if threshold.is_nan() {
        return Err(usage("threshold is NaN"));
    }
    // Invariant: ranks 1..=lo score at least `threshold`, ranks past hi do not.
    let (mut lo, mut hi) = (0usize, oracle.len());
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if oracle.kth(f, mid)?.score >= threshold {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}
