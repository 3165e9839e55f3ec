//! Hierarchical sampling index for stripe queries.
//!
//! Layer 0 is the whole dataset. Each higher layer is a uniform sample of
//! `max(1, ⌊|prev| / r⌋)` nodes drawn from the layer below, and every node of
//! the lower layer is attached to its nearest node above. A node's area is
//! the set of base points reachable through those edges; its enclosing ball
//! covers that area. A stripe query walks down from the top layer and only
//! expands nodes whose ball reaches the stripe, then filters the surviving
//! base points exactly.

mod ball;

pub use ball::{
    ball_intersects_stripe, smallest_enclosing_ball, Ball, CONTAINMENT_TOLERANCE, CORESET_ROUNDS,
    EXACT_BALL_MAX_DIM,
};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{data, usage, Result};
use crate::point::{Dataset, PointId};
use crate::scoring::{dot, ScoringVector, StripeRange};
use crate::srr::{check_query, passes, ScanStats, SrrBackend, StripeHits};

use ball::{dist_sq, intersects, slack, smallest_enclosing_ball_with};

pub const DEFAULT_DECAY: usize = 4;

/// Build parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HierConfig {
    /// Ratio between consecutive layer sizes.
    pub decay: usize,
    pub seed: u64,
    /// Layers with `|lower| · |upper|` above this many distance evaluations
    /// find nearest centroids by beam search instead of a full scan.
    pub exact_assignment_limit: u64,
    /// Nodes kept per layer during the beam search.
    pub beam_width: usize,
}

impl Default for HierConfig {
    fn default() -> Self {
        Self {
            decay: DEFAULT_DECAY,
            seed: 0,
            exact_assignment_limit: 1 << 31,
            beam_width: 24,
        }
    }
}

/// Compressed adjacency: children of node `i` are `items[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Adjacency {
    pub offsets: Vec<u32>,
    pub items: Vec<u32>,
}

impl Adjacency {
    #[inline]
    pub fn of(&self, node: usize) -> &[u32] {
        &self.items[self.offsets[node] as usize..self.offsets[node + 1] as usize]
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One layer above the base.
///
/// Nodes are identified by position; `ids[pos]` is the dataset point the
/// node was sampled as. Children are positions in the layer below (for
/// layer 1 those positions are dataset ids).
#[derive(Debug, Clone, PartialEq)]
pub struct UpperLayer {
    pub ids: Vec<PointId>,
    pub children: Adjacency,
    /// `dim` values per node.
    pub centers: Vec<f64>,
    pub radii: Vec<f64>,
    /// Base points covered by each node.
    pub area_sizes: Vec<u32>,
}

impl UpperLayer {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ball(&self, pos: usize, dim: usize) -> Ball {
        Ball {
            center: self.centers[pos * dim..(pos + 1) * dim].to_vec(),
            radius: self.radii[pos],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HierIndex {
    dim: usize,
    n: usize,
    decay: usize,
    seed: u64,
    /// `upper[k]` is layer `k + 1`.
    upper: Vec<UpperLayer>,
}

/// `⌊log_r n⌋` in exact integer arithmetic.
pub fn layer_budget(n: usize, r: usize) -> usize {
    let mut levels = 0;
    let mut power = r as u128;
    while power <= n as u128 {
        levels += 1;
        power *= r as u128;
    }
    levels
}

impl HierIndex {
    pub fn build(data: &Dataset, config: HierConfig) -> Result<Self> {
        if config.decay < 2 {
            return Err(usage(format!("decay rate must be at least 2, got {}", config.decay)));
        }
        if config.beam_width == 0 {
            return Err(usage("beam width must be positive"));
        }
        let n = data.len();
        let dim = data.dim();
        let r = config.decay;
        let budget = layer_budget(n, r);

        // Nested random samples, bottom-up.
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut samples: Vec<Vec<PointId>> = Vec::new();
        let mut prev: Vec<PointId> = data.ids().collect();
        while samples.len() < budget && prev.len() > 1 {
            let size = (prev.len() / r).max(1);
            let mut pool = prev.clone();
            let (head, _) = pool.partial_shuffle(&mut rng, size);
            let mut next = head.to_vec();
            next.sort_unstable();
            samples.push(next.clone());
            prev = next;
        }

        // Edges, top-down so larger layers can search the ones above.
        let mut assign: Vec<Vec<u32>> = vec![Vec::new(); samples.len()];
        let mut children: Vec<Adjacency> = vec![Adjacency::default(); samples.len()];
        for k in (0..samples.len()).rev() {
            let lower: &[PointId] = if k == 0 { &[] } else { &samples[k - 1] };
            let lower_len = if k == 0 { n } else { lower.len() };
            let lower_id = |q: usize| if k == 0 { q as PointId } else { lower[q] };
            let centroids = &samples[k];
            let work = lower_len as u64 * centroids.len() as u64;
            let a: Vec<u32> = if work <= config.exact_assignment_limit {
                (0..lower_len)
                    .map(|q| nearest_exact(data, centroids, data.coords(lower_id(q))))
                    .collect()
            } else {
                let searcher = BeamSearch {
                    data,
                    samples: &samples,
                    children: &children,
                    target: k,
                    width: config.beam_width,
                };
                (0..lower_len)
                    .map(|q| searcher.nearest(data.coords(lower_id(q))))
                    .collect()
            };
            children[k] = invert(&a, centroids.len());
            assign[k] = a;
        }

        // Areas and balls, bottom-up.
        let mut upper = Vec::with_capacity(samples.len());
        let mut ancestor: Vec<u32> = (0..n as u32).collect();
        for (k, ids) in samples.into_iter().enumerate() {
            for a in ancestor.iter_mut() {
                *a = assign[k][*a as usize];
            }
            let areas = invert(&ancestor, ids.len());
            let mut ball_rng = ChaCha8Rng::seed_from_u64(config.seed ^ ((k as u64 + 1) << 48));
            let mut centers = Vec::with_capacity(ids.len() * dim);
            let mut radii = Vec::with_capacity(ids.len());
            let mut area_sizes = Vec::with_capacity(ids.len());
            let mut rows: Vec<&[f64]> = Vec::new();
            for pos in 0..ids.len() {
                rows.clear();
                rows.extend(areas.of(pos).iter().map(|&p| data.coords(p)));
                // A centroid duplicating a lower-id one wins no children.
                let b = if rows.is_empty() {
                    Ball {
                        center: data.coords(ids[pos]).to_vec(),
                        radius: 0.0,
                    }
                } else {
                    smallest_enclosing_ball_with(&rows, &mut ball_rng)?
                };
                centers.extend_from_slice(&b.center);
                radii.push(b.radius);
                area_sizes.push(rows.len() as u32);
            }
            upper.push(UpperLayer {
                ids,
                children: std::mem::take(&mut children[k]),
                centers,
                radii,
                area_sizes,
            });
        }

        Ok(Self {
            dim,
            n,
            decay: r,
            seed: config.seed,
            upper,
        })
    }

    pub fn from_parts(dim: usize, n: usize, decay: usize, seed: u64, upper: Vec<UpperLayer>) -> Result<Self> {
        if dim == 0 || n == 0 || decay < 2 {
            return Err(usage("invalid hierarchy header"));
        }
        let mut below = n;
        for (k, layer) in upper.iter().enumerate() {
            let m = layer.ids.len();
            let ok = m >= 1
                && layer.children.offsets.len() == m + 1
                && layer.children.offsets.first() == Some(&0)
                && layer.children.offsets.windows(2).all(|w| w[0] <= w[1])
                && *layer.children.offsets.last().unwrap() as usize == layer.children.items.len()
                && layer.children.items.iter().all(|&c| (c as usize) < below)
                && layer.ids.iter().all(|&id| (id as usize) < n)
                && layer.centers.len() == m * dim
                && layer.radii.len() == m
                && layer.area_sizes.len() == m;
            if !ok {
                return Err(usage(format!("hierarchy layer {} is malformed", k + 1)));
            }
            below = m;
        }
        Ok(Self {
            dim,
            n,
            decay,
            seed,
            upper,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn decay(&self) -> usize {
        self.decay
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Index of the top layer (0 when the base is the only layer).
    pub fn top_layer(&self) -> usize {
        self.upper.len()
    }

    /// Sizes of layers 0 through the top.
    pub fn layer_sizes(&self) -> Vec<usize> {
        std::iter::once(self.n)
            .chain(self.upper.iter().map(|l| l.len()))
            .collect()
    }

    /// Layer `layer` for `layer >= 1`.
    pub fn upper_layer(&self, layer: usize) -> &UpperLayer {
        &self.upper[layer - 1]
    }

    pub fn upper_layers(&self) -> &[UpperLayer] {
        &self.upper
    }

    /// Dataset ids in the area of node `pos` at `layer`, ascending.
    pub fn area(&self, layer: usize, pos: usize) -> Vec<PointId> {
        let mut frontier = vec![pos as u32];
        for l in (1..=layer).rev() {
            let children = &self.upper[l - 1].children;
            frontier = frontier
                .iter()
                .flat_map(|&c| children.of(c as usize).iter().copied())
                .collect();
        }
        frontier.sort_unstable();
        frontier
    }

    /// Checks the structural invariants against the source dataset: layer
    /// size recurrence, every lower node having exactly one parent, area
    /// sizes, ball containment of every area point, and the linear space
    /// bound.
    pub fn verify_structure(&self, data: &Dataset) -> Result<()> {
        if data.len() != self.n || data.dim() != self.dim {
            return Err(usage("dataset does not match the index"));
        }
        let sizes = self.layer_sizes();
        let r = self.decay;
        if self.upper.len() > layer_budget(self.n, r) {
            return Err(data_err("more layers than ⌊log_r n⌋"));
        }
        for w in sizes.windows(2) {
            if w[1] != (w[0] / r).max(1) {
                return Err(data_err(format!("layer sizes {} -> {} break the recurrence", w[0], w[1])));
            }
        }
        let total: usize = sizes.iter().sum();
        let bound = self.n as f64 * r as f64 / (r as f64 - 1.0) + self.upper.len() as f64;
        if total as f64 > bound {
            return Err(data_err(format!("{total} stored nodes exceed bound {bound}")));
        }
        let mut covered = vec![0u32; self.n];
        for (k, layer) in self.upper.iter().enumerate() {
            let below = sizes[k];
            let mut parents = vec![0u32; below];
            for &c in &layer.children.items {
                parents[c as usize] += 1;
            }
            if parents.iter().any(|&p| p != 1) {
                return Err(data_err(format!("layer {} does not partition the layer below", k + 1)));
            }
            let mut area_total = 0usize;
            for pos in 0..layer.len() {
                let area = self.area(k + 1, pos);
                if area.len() != layer.area_sizes[pos] as usize {
                    return Err(data_err(format!("area size mismatch at layer {} node {pos}", k + 1)));
                }
                let ball = layer.ball(pos, self.dim);
                for &p in &area {
                    covered[p as usize] = k as u32 + 1;
                    if !ball.contains(data.coords(p)) {
                        return Err(data_err(format!(
                            "point {p} escapes the ball of layer {} node {pos}",
                            k + 1
                        )));
                    }
                }
                area_total += area.len();
            }
            if area_total != self.n || covered.iter().any(|&c| c != k as u32 + 1) {
                return Err(data_err(format!("areas of layer {} do not cover the dataset", k + 1)));
            }
        }
        Ok(())
    }

    /// Top-down frontier expansion; with `on_prune` seeing each (layer,
    /// node) cut off.
    fn descend(
        &self,
        stripe: &StripeRange,
        stats: &mut ScanStats,
        mut on_prune: impl FnMut(usize, usize),
    ) -> Vec<u32> {
        let top = self.upper.len();
        if top == 0 {
            return (0..self.n as u32).collect();
        }
        let f_norm = dot(stripe.f.weights(), stripe.f.weights()).sqrt();
        let mut frontier: Vec<u32> = (0..self.upper[top - 1].len() as u32).collect();
        let mut next = Vec::new();
        for layer in (1..=top).rev() {
            let l = &self.upper[layer - 1];
            next.clear();
            for &pos in &frontier {
                let pos = pos as usize;
                stats.nodes_visited += 1;
                let center = &l.centers[pos * self.dim..(pos + 1) * self.dim];
                if intersects(center, l.radii[pos], stripe, f_norm) {
                    next.extend_from_slice(l.children.of(pos));
                } else {
                    on_prune(layer, pos);
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        frontier
    }

    pub(crate) fn query_traced(
        &self,
        data: &Dataset,
        stripe: &StripeRange,
        on_prune: impl FnMut(usize, usize),
    ) -> StripeHits {
        let mut stats = ScanStats::default();
        let candidates = self.descend(stripe, &mut stats, on_prune);
        stats.points_examined = candidates.len();
        let mut ids: Vec<PointId> = candidates
            .into_iter()
            .filter(|&p| stripe.contains(data.coords(p)))
            .collect();
        ids.sort_unstable();
        StripeHits { ids, stats }
    }
}

fn data_err(msg: impl Into<String>) -> crate::Error {
    data(msg)
}

impl SrrBackend for HierIndex {
    fn name(&self) -> &'static str {
        "hier"
    }

    fn query_stripe(&self, data: &Dataset, stripe: &StripeRange) -> Result<StripeHits> {
        check_query(data, self.dim, self.n, &stripe.f)?;
        Ok(self.query_traced(data, stripe, |_, _| {}))
    }

    /// Walks the hierarchy like a stripe query. A node whose ball lies
    /// strictly past the threshold contributes its whole area size.
    fn count_halfspace(
        &self,
        data: &Dataset,
        f: &ScoringVector,
        threshold: f64,
        strict: bool,
    ) -> Result<usize> {
        check_query(data, self.dim, self.n, f)?;
        let top = self.upper.len();
        let score_passes = |p: PointId| passes(f.score_coords(data.coords(p)), threshold, strict);
        if top == 0 {
            return Ok((0..self.n as PointId).filter(|&p| score_passes(p)).count());
        }
        let f_norm = dot(f.weights(), f.weights()).sqrt();
        let mut count = 0usize;
        let mut frontier: Vec<u32> = (0..self.upper[top - 1].len() as u32).collect();
        let mut next = Vec::new();
        for layer in (1..=top).rev() {
            let l = &self.upper[layer - 1];
            next.clear();
            for &pos in &frontier {
                let pos = pos as usize;
                let center = &l.centers[pos * self.dim..(pos + 1) * self.dim];
                let c = f.score_coords(center);
                let reach = l.radii[pos] * f_norm + slack(c, l.radii[pos]);
                if c - reach > threshold {
                    count += l.area_sizes[pos] as usize;
                } else if c + reach >= threshold {
                    next.extend_from_slice(l.children.of(pos));
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        Ok(count + frontier.into_iter().filter(|&p| score_passes(p)).count())
    }
}

/// Position of the nearest centroid; equal distances go to the lowest id.
fn nearest_exact(data: &Dataset, centroids: &[PointId], p: &[f64]) -> u32 {
    let mut best = (f64::INFINITY, 0u32);
    for (pos, &c) in centroids.iter().enumerate() {
        let dd = dist_sq(p, data.coords(c));
        if dd < best.0 {
            best = (dd, pos as u32);
        }
    }
    best.1
}

/// Approximate nearest centroid at layer `target + 1`, searching down from
/// the top through the already-built edges of the layers above.
struct BeamSearch<'a> {
    data: &'a Dataset,
    samples: &'a [Vec<PointId>],
    children: &'a [Adjacency],
    /// Index into `samples` of the centroid layer.
    target: usize,
    width: usize,
}

impl BeamSearch<'_> {
    fn nearest(&self, p: &[f64]) -> u32 {
        let top = self.samples.len() - 1;
        let mut frontier: Vec<u32> = (0..self.samples[top].len() as u32).collect();
        let mut scored: Vec<(f64, u32)> = Vec::new();
        let mut k = top;
        loop {
            scored.clear();
            let ids = &self.samples[k];
            scored.extend(
                frontier
                    .iter()
                    .map(|&pos| (dist_sq(p, self.data.coords(ids[pos as usize])), pos)),
            );
            let by_rank = |a: &(f64, u32), b: &(f64, u32)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            if k == self.target {
                return scored.iter().copied().min_by(by_rank).expect("frontier nonempty").1;
            }
            if scored.len() > self.width {
                scored.select_nth_unstable_by(self.width - 1, by_rank);
                scored.truncate(self.width);
            }
            let below = &self.children[k];
            frontier.clear();
            for &(_, pos) in &scored {
                frontier.extend_from_slice(below.of(pos as usize));
            }
            k -= 1;
        }
    }
}

/// Groups `0..assign.len()` by assigned parent, children ascending.
fn invert(assign: &[u32], parents: usize) -> Adjacency {
    let mut offsets = vec![0u32; parents + 1];
    for &a in assign {
        offsets[a as usize + 1] += 1;
    }
    for i in 0..parents {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut items = vec![0u32; assign.len()];
    for (q, &a) in assign.iter().enumerate() {
        let slot = &mut cursor[a as usize];
        items[*slot as usize] = q as u32;
        *slot += 1;
    }
    Adjacency { offsets, items }
}
