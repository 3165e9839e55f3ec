//! ε-samples for stripe ranges and the rank thresholds derived from them.
//!
//! A uniform random sample of size
//! `m = ⌈(c/ε²)·((d+1)·ln((d+1)/ε) + ln(1/φ))⌉` is, with probability at least
//! `1 − φ`, an ε-sample for slabs and half-spaces in `R^d` (VC dimension
//! `d + 1`). The hidden constant `c` defaults to [`DEFAULT_SIZE_CONSTANT`].

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, Result};
use crate::point::{Dataset, PointId};
use crate::scoring::{ScoringVector, StripeRange};
use crate::select::{check_dim, select_kth_scored, scored};

pub const DEFAULT_SIZE_CONSTANT: f64 = 8.0;

/// Sample-size rule, parameterized by the constant in front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSizing {
    pub constant: f64,
}

impl Default for SampleSizing {
    fn default() -> Self {
        Self {
            constant: DEFAULT_SIZE_CONSTANT,
        }
    }
}

impl SampleSizing {
    /// Uncapped formula value.
    pub fn formula(&self, d: usize, epsilon: f64, phi: f64) -> f64 {
        let vc = (d + 1) as f64;
        (self.constant / (epsilon * epsilon)) * (vc * (vc / epsilon).ln() + (1.0 / phi).ln())
    }

    /// Formula value rounded up and capped at `n`.
    pub fn size(&self, n: usize, d: usize, epsilon: f64, phi: f64) -> usize {
        let m = self.formula(d, epsilon, phi).ceil();
        if m >= n as f64 {
            n
        } else {
            (m as usize).max(1)
        }
    }
}

/// A uniform sample of dataset ids, drawn without replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsSample {
    ids: Vec<PointId>,
    pub epsilon: f64,
    pub phi: f64,
    pub source_n: usize,
    pub seed: u64,
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(usage(format!("{name} must lie in (0, 1), got {x}")));
    }
    Ok(())
}

impl EpsSample {
    /// Rebuilds a sample from a stored id list.
    pub fn from_ids(
        ids: Vec<PointId>,
        epsilon: f64,
        phi: f64,
        source_n: usize,
        seed: u64,
    ) -> Result<Self> {
        check_unit_interval("epsilon", epsilon)?;
        check_unit_interval("phi", phi)?;
        if ids.is_empty() || ids.len() > source_n {
            return Err(usage("sample size must lie in 1..=n"));
        }
        let mut seen = vec![false; source_n];
        for &id in &ids {
            let slot = seen
                .get_mut(id as usize)
                .ok_or_else(|| usage(format!("sample id {id} outside dataset of {source_n}")))?;
            if std::mem::replace(slot, true) {
                return Err(usage(format!("sample id {id} repeated")));
            }
        }
        Ok(Self {
            ids,
            epsilon,
            phi,
            source_n,
            seed,
        })
    }

    pub fn ids(&self) -> &[PointId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// True when the sample is the whole dataset.
    pub fn is_exact(&self) -> bool {
        self.ids.len() == self.source_n
    }

    /// The ε used for threshold arithmetic: 0 for a full sample.
    pub fn effective_epsilon(&self) -> f64 {
        if self.is_exact() {
            0.0
        } else {
            self.epsilon
        }
    }
}

/// Draws an ε-sample using the default sizing constant.
pub fn build_eps_sample(data: &Dataset, epsilon: f64, phi: f64, seed: u64) -> Result<EpsSample> {
    build_eps_sample_with(data, epsilon, phi, seed, SampleSizing::default())
}

pub fn build_eps_sample_with(
    data: &Dataset,
    epsilon: f64,
    phi: f64,
    seed: u64,
    sizing: SampleSizing,
) -> Result<EpsSample> {
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("phi", phi)?;
    let n = data.len();
    let m = sizing.size(n, data.dim(), epsilon, phi);
    let mut ids: Vec<PointId> = data.ids().collect();
    if m < n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (head, _) = ids.partial_shuffle(&mut rng, m);
        ids = head.to_vec();
    }
    Ok(EpsSample {
        ids,
        epsilon,
        phi,
        source_n: n,
        seed,
    })
}

/// Largest additive error `| |S∩D|/n − |S∩N|/m |` over the given stripes,
/// by exhaustive counting.
pub fn verify_eps_sample(data: &Dataset, sample: &EpsSample, stripes: &[StripeRange]) -> Result<f64> {
    if stripes.is_empty() {
        return Err(usage("need at least one stripe to verify against"));
    }
    if sample.source_n != data.len() {
        return Err(usage("sample was not drawn from this dataset"));
    }
    let n = data.len() as f64;
    let m = sample.len() as f64;
    let mut worst = 0.0f64;
    for s in stripes {
        if s.dim() != data.dim() {
            return Err(usage("stripe dimension does not match dataset"));
        }
        let full = data.points().filter(|p| s.contains(p.coords)).count() as f64;
        let part = sample
            .ids()
            .iter()
            .filter(|&&id| s.contains(data.coords(id)))
            .count() as f64;
        worst = worst.max((full / n - part / m).abs());
    }
    Ok(worst)
}

/// Sample ranks bracketing a dataset rank. `raw_*` keep the unclamped values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdPair {
    pub i_l: usize,
    pub i_u: usize,
    pub raw_l: i64,
    pub raw_u: i64,
}

impl ThresholdPair {
    /// Raw lower rank fell below 1: no sample point is known to outscore
    /// the target.
    pub fn open_above(&self) -> bool {
        self.raw_l < 1
    }

    /// Raw upper rank fell past `m`: no sample point is known to score
    /// below the target.
    pub fn open_below(&self, m: usize) -> bool {
        self.raw_u > m as i64
    }

    /// `n·((i_u − i_l)/m + ε)`, the conformal-set size bound in the form
    /// used by the acceptance criteria.
    pub fn size_bound(&self, n: usize, m: usize, epsilon: f64) -> f64 {
        n as f64 * ((self.i_u - self.i_l) as f64 / m as f64 + epsilon)
    }
}

/// `i_l = ⌊m(i/n − ε)⌋`, `i_u = ⌈m(i/n + ε)⌉`, clamped into `[1, m]`.
pub fn thresholds(m: usize, n: usize, i: usize, epsilon: f64) -> ThresholdPair {
    debug_assert!(m >= 1 && n >= 1);
    // m·i is an exact product, so m = n with ε = 0 lands on i exactly.
    let centre = (m as f64 * i as f64) / n as f64;
    let slack = m as f64 * epsilon;
    let raw_l = (centre - slack).floor() as i64;
    let raw_u = (centre + slack).ceil() as i64;
    let clamp = |x: i64| x.clamp(1, m as i64) as usize;
    ThresholdPair {
        i_l: clamp(raw_l),
        i_u: clamp(raw_u),
        raw_l,
        raw_u,
    }
}

/// A stripe bracketing the rank-`i` score, with the thresholds behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleStripe {
    pub stripe: StripeRange,
    pub thresholds: ThresholdPair,
}

/// Stripe between the scores of the sample's `i_u`-th and `i_l`-th points,
/// using the sample's effective ε.
pub fn stripe_from_sample(
    data: &Dataset,
    sample: &EpsSample,
    f: &ScoringVector,
    i: usize,
) -> Result<SampleStripe> {
    stripe_from_sample_at(data, sample, f, i, sample.effective_epsilon())
}

/// [`stripe_from_sample`] with an explicit ε.
///
/// Ranks run in descending score, so the `i_l`-th sample point gives the
/// upper bound and the `i_u`-th the lower one. A side whose raw threshold
/// fell outside `[1, m]` is left unbounded.
pub fn stripe_from_sample_at(
    data: &Dataset,
    sample: &EpsSample,
    f: &ScoringVector,
    i: usize,
    epsilon: f64,
) -> Result<SampleStripe> {
    check_dim(data, f)?;
    let n = data.len();
    if i == 0 || i > n {
        return Err(usage(format!("rank {i} out of range 1..={n}")));
    }
    if sample.source_n != n {
        return Err(usage("sample was not drawn from this dataset"));
    }
    let m = sample.len();
    let t = thresholds(m, n, i, epsilon);
    let mut items = scored(data, f, sample.ids());
    let upper = if t.open_above() {
        f64::INFINITY
    } else {
        select_kth_scored(&mut items, t.i_l)?.score
    };
    let lower = if t.open_below(m) {
        f64::NEG_INFINITY
    } else {
        select_kth_scored(&mut items, t.i_u)?.score
    };
    Ok(SampleStripe {
        stripe: StripeRange::new(f.clone(), lower, upper)?,
        thresholds: t,
    })
}
