//! Browser bindings for a small planar dataset: rank lookup through the
//! kinetic level structure, sample-driven rank queries, and the hierarchy's
//! pruning trace for a stripe.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankaccess_core::dar::{conformal_query, exact_query_traced};
use rankaccess_core::epsample::{build_eps_sample_with, EpsSample, SampleSizing};
use rankaccess_core::hier::{ball_intersects_stripe, HierConfig, HierIndex};
use rankaccess_core::kthlevel2d::{build_levels_2d, LevelStructure2D};
use rankaccess_core::srr::SrrBackend;
use rankaccess_core::{Dataset, ScoringVector, StripeRange};
use wasm_bindgen::prelude::*;

/// Sample size constant used by the demo. The default sizing would take the
/// whole set at this scale, which hides the interesting part.
const DEMO_SIZE_CONSTANT: f64 = 0.02;

fn js(e: rankaccess_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Demo {
    data: Dataset,
    levels: LevelStructure2D,
    hier: HierIndex,
    sample: EpsSample,
}

/// Result of a sample-driven rank query.
#[wasm_bindgen]
pub struct RankQuery {
    lower: f64,
    upper: f64,
    ids: Vec<u32>,
    guaranteed: bool,
    answer: u32,
    attempts: usize,
    sample_size: usize,
}

#[wasm_bindgen]
impl RankQuery {
    /// Score bounds of the stripe. Unbounded sides come back as ±Infinity.
    #[wasm_bindgen(getter)]
    pub fn lower(&self) -> f64 {
        self.lower
    }

    #[wasm_bindgen(getter)]
    pub fn upper(&self) -> f64 {
        self.upper
    }

    #[wasm_bindgen(getter)]
    pub fn ids(&self) -> Vec<u32> {
        self.ids.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn guaranteed(&self) -> bool {
        self.guaranteed
    }

    /// The exact rank-i point.
    #[wasm_bindgen(getter)]
    pub fn answer(&self) -> u32 {
        self.answer
    }

    /// Stripe attempts the exact query needed (0 means it fell back to a scan).
    #[wasm_bindgen(getter)]
    pub fn attempts(&self) -> usize {
        self.attempts
    }

    #[wasm_bindgen(getter)]
    pub fn sample_size(&self) -> usize {
        self.sample_size
    }
}

#[wasm_bindgen]
impl Demo {
    /// `n` uniform points in the unit square.
    #[wasm_bindgen(constructor)]
    pub fn new(n: usize, seed: u32, epsilon: f64) -> Result<Demo, JsError> {
        if !(2..=2000).contains(&n) {
            return Err(JsError::new("n must lie in 2..=2000"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        let coords: Vec<f64> = (0..2 * n).map(|_| rng.gen::<f64>()).collect();
        let data = Dataset::new(2, coords).map_err(js)?;
        let levels = build_levels_2d(&data).map_err(js)?;
        let hier = HierIndex::build(
            &data,
            HierConfig {
                seed: seed as u64,
                ..HierConfig::default()
            },
        )
        .map_err(js)?;
        let sample = build_eps_sample_with(
            &data,
            epsilon,
            0.1,
            seed as u64,
            SampleSizing {
                constant: DEMO_SIZE_CONSTANT,
            },
        )
        .map_err(js)?;
        Ok(Demo {
            data,
            levels,
            hier,
            sample,
        })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Interleaved x, y coordinates.
    pub fn points(&self) -> Vec<f64> {
        self.data.raw().to_vec()
    }

    pub fn sample_ids(&self) -> Vec<u32> {
        self.sample.ids().to_vec()
    }

    /// Id of the rank-`i` point for the direction at `angle` radians.
    pub fn kth(&self, angle: f64, i: usize) -> Result<u32, JsError> {
        let f = ScoringVector::from_angle(angle);
        Ok(self.levels.query(&f, i).map_err(js)?.id)
    }

    /// Level `k` as interleaved (angle, id) pairs: from each angle on, the
    /// rank-`k` point is `id`.
    pub fn level(&self, k: usize) -> Result<Vec<f64>, JsError> {
        if k == 0 || k > self.data.len() {
            return Err(JsError::new("level out of range"));
        }
        let flat: Vec<f64> = self
            .levels
            .level(k)
            .iter()
            .flat_map(|b| [b.angle, b.id as f64])
            .collect();
        Ok(flat)
    }

    /// Stripe and candidate set the sample gives for rank `i`, plus the
    /// exact answer.
    pub fn rank_query(&self, angle: f64, i: usize) -> Result<RankQuery, JsError> {
        let f = ScoringVector::from_angle(angle);
        let set = conformal_query(&self.data, &self.sample, &self.hier, &f, i).map_err(js)?;
        let exact = exact_query_traced(&self.data, &self.sample, &self.hier, &f, i).map_err(js)?;
        Ok(RankQuery {
            lower: set.stripe.lower,
            upper: set.stripe.upper,
            ids: set.ids,
            guaranteed: set.guaranteed,
            answer: exact.answer.id,
            attempts: if exact.fell_back { 0 } else { exact.attempts },
            sample_size: self.sample.len(),
        })
    }

    /// Every ball of the hierarchy as (layer, x, y, radius, state) records.
    /// State 2: tested and reaches the stripe; 1: tested and pruned;
    /// 0: never tested because an ancestor was pruned.
    pub fn hier_trace(&self, angle: f64, lower: f64, upper: f64) -> Result<Vec<f64>, JsError> {
        let f = ScoringVector::from_angle(angle);
        let stripe = StripeRange::new(f, lower, upper).map_err(js)?;
        let layers = self.hier.upper_layers();
        let mut out = Vec::new();
        // Positions in the current layer that are reached by the descent.
        let top = layers.len();
        let mut reached: Vec<bool> = vec![true; layers.last().map_or(0, |l| l.len())];
        for layer in (1..=top).rev() {
            let ul = &layers[layer - 1];
            let below = if layer > 1 { layers[layer - 2].len() } else { 0 };
            let mut next = vec![false; below];
            for pos in 0..ul.len() {
                let ball = ul.ball(pos, 2);
                let state = if !reached[pos] {
                    0.0
                } else if ball_intersects_stripe(&ball, &stripe) {
                    for &c in ul.children.of(pos) {
                        if layer > 1 {
                            next[c as usize] = true;
                        }
                    }
                    2.0
                } else {
                    1.0
                };
                out.extend([layer as f64, ball.center[0], ball.center[1], ball.radius, state]);
            }
            reached = next;
        }
        Ok(out)
    }

    /// Points the hierarchy examined and returned for the stripe.
    pub fn hier_counts(&self, angle: f64, lower: f64, upper: f64) -> Result<Vec<u32>, JsError> {
        let f = ScoringVector::from_angle(angle);
        let stripe = StripeRange::new(f, lower, upper).map_err(js)?;
        let hits = self.hier.query_stripe(&self.data, &stripe).map_err(js)?;
        Ok(vec![hits.stats.points_examined as u32, hits.ids.len() as u32])
    }
}
