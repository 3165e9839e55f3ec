//! Rank queries in the plane by precomputed rank changes.
//!
//! As the query direction turns around the circle, the rank order of a
//! planar point set only changes when two points tie, which happens at the
//! two directions perpendicular to their difference. Sweeping those events
//! once yields, for every adjacent rank pair `(k, k + 1)`, the list of angles
//! where the two ranks swap and who ends up where. A query at angle θ then
//! binary-searches the two lists touching level `i`.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use crate::error::{usage, Result};
use crate::point::{Dataset, PointId};
use crate::scoring::ScoringVector;
use crate::select::{check_dim, rank_cmp, RankedAnswer, Scored};

/// Event angles closer than this are processed as one simultaneous event.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

/// Levels on each side of the target consulted when resolving near-ties at
/// query time.
const RESOLVE_WINDOW: usize = 2;

/// Adjacent transposition of ranks `k` and `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Swap {
    /// Start of the half-open angular interval where the new order holds.
    pub angle: f64,
    /// Global processing order; breaks ties between equal angles.
    pub seq: u32,
    /// Point now at rank `k`.
    pub upper: PointId,
    /// Point now at rank `k + 1`.
    pub lower: PointId,
}

/// One entry of a level's piecewise assignment: from `angle` up to the next
/// entry's angle (wrapping around), the level's point is `id`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub angle: f64,
    pub id: PointId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelStructure2D {
    coords: Vec<f64>,
    /// Rank order just before the first event angle.
    initial: Vec<PointId>,
    /// `swaps[k - 1]` lists transpositions of ranks `k` and `k + 1` by angle.
    swaps: Vec<Vec<Swap>>,
}

/// Plain-data form for persistence.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelParts {
    pub coords: Vec<f64>,
    pub initial: Vec<PointId>,
    pub swaps: Vec<Vec<Swap>>,
}

fn angle_of(x: f64, y: f64) -> f64 {
    let a = y.atan2(x);
    let a = if a < 0.0 { a + TAU } else { a };
    if a >= TAU {
        0.0
    } else {
        a
    }
}

fn scores_at(coords: &[f64], theta: f64) -> impl Fn(PointId) -> Scored + '_ {
    let (s, c) = theta.sin_cos();
    move |id| {
        let p = &coords[2 * id as usize..2 * id as usize + 2];
        Scored {
            score: c * p[0] + s * p[1],
            id,
        }
    }
}

pub fn build_levels_2d(data: &Dataset) -> Result<LevelStructure2D> {
    if data.dim() != 2 {
        return Err(usage(format!("level structure needs d = 2, got d = {}", data.dim())));
    }
    let n = data.len();
    let coords = data.raw().to_vec();
    {
        let mut ids: Vec<PointId> = data.ids().collect();
        ids.sort_unstable_by(|&a, &b| {
            let (p, q) = (data.coords(a), data.coords(b));
            p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1]))
        });
        if let Some(w) = ids.windows(2).find(|w| data.coords(w[0]) == data.coords(w[1])) {
            return Err(usage(format!("points {} and {} coincide", w[0], w[1])));
        }
    }

    // Both tie directions of every pair.
    let mut events: Vec<(f64, PointId, PointId)> = Vec::with_capacity(n * n.saturating_sub(1));
    for a in 0..n as PointId {
        for b in a + 1..n as PointId {
            let (p, q) = (data.coords(a), data.coords(b));
            let (dx, dy) = (p[0] - q[0], p[1] - q[1]);
            // Perpendiculars to (dx, dy).
            events.push((angle_of(-dy, dx), a, b));
            events.push((angle_of(dy, -dx), a, b));
        }
    }
    events.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for j in 1..=events.len() {
        if j == events.len() || events[j].0 - events[j - 1].0 > ANGLE_TOLERANCE {
            groups.push((start, j));
            start = j;
        }
    }

    let theta0 = match (events.first(), events.last()) {
        (Some(first), Some(last)) => {
            let gap = first.0 + TAU - last.0;
            (last.0 + gap / 2.0) % TAU
        }
        _ => 0.0,
    };
    let mut order: Vec<PointId> = (0..n as PointId).collect();
    {
        let at = scores_at(&coords, theta0);
        order.sort_unstable_by(|&a, &b| rank_cmp(&at(a), &at(b)));
    }
    let initial = order.clone();
    let mut pos = vec![0usize; n];
    for (r, &id) in order.iter().enumerate() {
        pos[id as usize] = r;
    }

    let mut swaps: Vec<Vec<Swap>> = vec![Vec::new(); n.saturating_sub(1)];
    let mut seq = 0u32;
    let mut ranges: Vec<(usize, usize)> = Vec::new();
    for (g, &(lo, hi)) in groups.iter().enumerate() {
        let angle = events[lo].0;
        let next = groups
            .get(g + 1)
            .map(|&(l, _)| events[l].0)
            .unwrap_or(events[0].0 + TAU);
        let at = scores_at(&coords, (angle + next) / 2.0);

        ranges.clear();
        ranges.extend(events[lo..hi].iter().map(|&(_, a, b)| {
            let (x, y) = (pos[a as usize], pos[b as usize]);
            (x.min(y), x.max(y))
        }));
        ranges.sort_unstable();
        let mut merged: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in &ranges {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }

        for &(a, b) in &merged {
            let mut target: Vec<usize> = (0..=b - a).collect();
            target.sort_unstable_by(|&x, &y| rank_cmp(&at(order[a + x]), &at(order[a + y])));
            let mut key = vec![0usize; target.len()];
            for (t, &j) in target.iter().enumerate() {
                key[j] = t;
            }
            // Bubble into the target order, one adjacent swap at a time.
            loop {
                let mut changed = false;
                for j in 0..key.len() - 1 {
                    if key[j] > key[j + 1] {
                        key.swap(j, j + 1);
                        order.swap(a + j, a + j + 1);
                        let (up, down) = (order[a + j], order[a + j + 1]);
                        pos[up as usize] = a + j;
                        pos[down as usize] = a + j + 1;
                        swaps[a + j].push(Swap {
                            angle,
                            seq,
                            upper: up,
                            lower: down,
                        });
                        seq += 1;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
        }
    }

    Ok(LevelStructure2D {
        coords,
        initial,
        swaps,
    })
}

impl LevelStructure2D {
    pub fn len(&self) -> usize {
        self.initial.len()
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_empty()
    }

    /// Stored entries: one per swap plus the `n` initial ranks.
    pub fn breakpoint_count(&self) -> usize {
        self.initial.len() + self.swaps.iter().map(Vec::len).sum::<usize>()
    }

    pub fn swaps(&self, k: usize) -> &[Swap] {
        &self.swaps[k - 1]
    }

    /// Level `k`'s point at angle `theta` as stored, without near-tie
    /// resolution.
    pub fn level_point_at(&self, k: usize, theta: f64) -> PointId {
        let latest = |list: &[Swap]| {
            let j = list.partition_point(|s| s.angle <= theta);
            j.checked_sub(1).map(|j| list[j])
        };
        let from_above = if k >= 2 {
            latest(&self.swaps[k - 2]).map(|s| (s.seq, s.lower))
        } else {
            None
        };
        let from_below = if k < self.len() {
            latest(&self.swaps[k - 1]).map(|s| (s.seq, s.upper))
        } else {
            None
        };
        match (from_above, from_below) {
            (None, None) => self.initial[k - 1],
            (Some(a), None) => a.1,
            (None, Some(b)) => b.1,
            (Some(a), Some(b)) => {
                if a.0 > b.0 {
                    a.1
                } else {
                    b.1
                }
            }
        }
    }

    /// Level `k` as a sorted breakpoint list with strictly increasing angles.
    pub fn level(&self, k: usize) -> Vec<Breakpoint> {
        let n = self.len();
        assert!((1..=n).contains(&k), "level {k} out of range 1..={n}");
        let mut changes: Vec<(f64, u32, PointId)> = Vec::new();
        if k >= 2 {
            changes.extend(self.swaps[k - 2].iter().map(|s| (s.angle, s.seq, s.lower)));
        }
        if k < n {
            changes.extend(self.swaps[k - 1].iter().map(|s| (s.angle, s.seq, s.upper)));
        }
        changes.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut out: Vec<Breakpoint> = Vec::new();
        let mut current = self.initial[k - 1];
        for (angle, _, id) in changes {
            match out.last_mut() {
                Some(last) if last.angle == angle => last.id = id,
                _ => out.push(Breakpoint { angle, id }),
            }
            current = id;
        }
        out.dedup_by(|b, a| a.id == b.id);
        if out.len() > 1 && out.first().map(|b| b.id) == out.last().map(|b| b.id) {
            out.pop();
        }
        if out.is_empty() {
            out.push(Breakpoint { angle: 0.0, id: current });
        }
        out
    }

    /// The rank-`i` point under `f`.
    ///
    /// The breakpoint lookup gives the order between events; points whose
    /// scores tie to rounding at this exact direction are then ordered by
    /// their actual scores under `f` with the usual id tie-break.
    pub fn query(&self, f: &ScoringVector, i: usize) -> Result<RankedAnswer> {
        let n = self.len();
        if f.dim() != 2 {
            return Err(usage(format!("query vector has d = {}, expected 2", f.dim())));
        }
        if i == 0 || i > n {
            return Err(usage(format!("rank {i} out of range 1..={n}")));
        }
        let w = f.weights();
        let theta = angle_of(w[0], w[1]);
        let lo = i.saturating_sub(RESOLVE_WINDOW).max(1);
        let hi = (i + RESOLVE_WINDOW).min(n);
        let mut window: Vec<Scored> = (lo..=hi)
            .map(|k| {
                let id = self.level_point_at(k, theta);
                Scored {
                    score: f.score_coords(&self.coords[2 * id as usize..2 * id as usize + 2]),
                    id,
                }
            })
            .collect();
        window.sort_unstable_by(rank_cmp);
        let hit = window[i - lo];
        Ok(RankedAnswer {
            id: hit.id,
            rank: i,
            score: hit.score,
        })
    }

    pub fn into_parts(self) -> LevelParts {
        LevelParts {
            coords: self.coords,
            initial: self.initial,
            swaps: self.swaps,
        }
    }

    pub fn from_parts(parts: LevelParts) -> Result<Self> {
        let n = parts.initial.len();
        let mut seen = vec![false; n];
        let perm_ok = parts.initial.iter().all(|&id| {
            (id as usize) < n && !std::mem::replace(&mut seen[id as usize], true)
        });
        let ok = n >= 1
            && perm_ok
            && parts.coords.len() == 2 * n
            && parts.swaps.len() == n - 1
            && parts.swaps.iter().all(|list| {
                list.windows(2).all(|w| {
                    w[0].angle.partial_cmp(&w[1].angle) != Some(Ordering::Greater) && w[0].seq < w[1].seq
                }) && list.iter().all(|s| (s.upper as usize) < n && (s.lower as usize) < n)
            });
        if !ok {
            return Err(usage("level structure parts are malformed"));
        }
        Ok(Self {
            coords: parts.coords,
            initial: parts.initial,
            swaps: parts.swaps,
        })
    }
}

/// Free-function form of [`LevelStructure2D::query`].
pub fn query_kth_2d(
    structure: &LevelStructure2D,
    f: &ScoringVector,
    i: usize,
) -> Result<RankedAnswer> {
    structure.query(f, i)
}

/// Checks that `data` is the planar dataset behind `structure`.
pub fn check_source(structure: &LevelStructure2D, data: &Dataset) -> Result<()> {
    let f = ScoringVector::from_angle(0.0);
    check_dim(data, &f)?;
    if data.raw() != structure.coords.as_slice() {
        return Err(usage("dataset does not match the level structure"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::select::select_rank_exhaustive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(n: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Dataset::new(2, (0..2 * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    fn four_point_mock() -> Dataset {
        // A, B, C, D
        Dataset::from_rows(&[[4.0, 1.0], [3.0, 3.0], [1.0, 4.5], [3.2, 2.0]]).unwrap()
    }

    /// Counter-clockwise hull, starting from the lowest-then-leftmost point.
    fn hull(data: &Dataset) -> Vec<PointId> {
        let mut ids: Vec<PointId> = data.ids().collect();
        ids.sort_by(|&a, &b| {
            let (p, q) = (data.coords(a), data.coords(b));
            p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1]))
        });
        let cross = |o: PointId, a: PointId, b: PointId| {
            let (o, a, b) = (data.coords(o), data.coords(a), data.coords(b));
            (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
        };
        let mut lower: Vec<PointId> = Vec::new();
        for &p in &ids {
            while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<PointId> = Vec::new();
        for &p in ids.iter().rev() {
            while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        lower
    }

    #[test]
    fn single_point() {
        let data = Dataset::from_rows(&[[0.5, -2.0]]).unwrap();
        let s = build_levels_2d(&data).unwrap();
        assert_eq!(s.level(1), vec![Breakpoint { angle: 0.0, id: 0 }]);
        assert_eq!(s.breakpoint_count(), 1);
        assert_eq!(s.query(&ScoringVector::from_angle(2.0), 1).unwrap().id, 0);
    }

    #[test]
    fn two_points_swap_twice() {
        let data = Dataset::from_rows(&[[1.0, 0.2], [-0.3, 0.7]]).unwrap();
        let s = build_levels_2d(&data).unwrap();
        assert_eq!(s.level(1).len(), 2);
        assert_eq!(s.level(2).len(), 2);
        let a = s.level(1);
        assert!((a[1].angle - a[0].angle - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let three = Dataset::from_rows(&[[0.0, 0.0, 1.0]]).unwrap();
        assert!(build_levels_2d(&three).is_err());
        let dup = Dataset::from_rows(&[[0.0, 1.0], [2.0, 3.0], [0.0, 1.0]]).unwrap();
        assert!(build_levels_2d(&dup).is_err());
        let s = build_levels_2d(&random_plane(5, 1)).unwrap();
        let f = ScoringVector::from_angle(0.3);
        assert!(s.query(&f, 0).is_err());
        assert!(s.query(&f, 6).is_err());
    }

    #[test]
    fn four_point_instance() {
        let data = four_point_mock();
        let s = build_levels_2d(&data).unwrap();
        let f1 = crate::normalize(&[0.8, 0.6]).unwrap();
        let f2 = crate::normalize(&[1.0, 1.0]).unwrap();
        assert_eq!(s.query(&f1, 1).unwrap().id, 1);
        assert_eq!(s.query(&f2, 3).unwrap().id, 3);
    }

    #[test]
    fn unique_maximum_along_its_own_direction() {
        let data = random_plane(40, 2);
        let s = build_levels_2d(&data).unwrap();
        let far = (0..40u32)
            .max_by(|&a, &b| {
                let n = |p: &[f64]| p[0].hypot(p[1]);
                n(data.coords(a)).total_cmp(&n(data.coords(b)))
            })
            .unwrap();
        let f = crate::normalize(data.coords(far)).unwrap();
        assert_eq!(s.query(&f, 1).unwrap().id, far);
    }

    #[test]
    fn probe_angles_match_exhaustive() {
        let data = random_plane(50, 3);
        let s = build_levels_2d(&data).unwrap();
        for step in 0..720 {
            let f = ScoringVector::from_angle(step as f64 * TAU / 720.0);
            for i in 1..=50 {
                let want = select_rank_exhaustive(&data, &f, i).unwrap().id;
                assert_eq!(s.query(&f, i).unwrap().id, want, "step {step} rank {i}");
            }
        }
    }

    #[test]
    fn random_queries_match_exhaustive() {
        let data = random_plane(200, 4);
        let s = build_levels_2d(&data).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let f = ScoringVector::from_angle(rng.gen_range(0.0..TAU));
            let i = rng.gen_range(1..=200);
            assert_eq!(s.query(&f, i).unwrap().id, select_rank_exhaustive(&data, &f, i).unwrap().id);
        }
    }

    #[test]
    fn queries_exactly_on_breakpoints() {
        let data = random_plane(30, 6);
        let s = build_levels_2d(&data).unwrap();
        for k in 1..=30 {
            for b in s.level(k) {
                let f = ScoringVector::from_angle(b.angle);
                for i in [k.saturating_sub(1).max(1), k, (k + 1).min(30)] {
                    assert_eq!(s.query(&f, i).unwrap().id, select_rank_exhaustive(&data, &f, i).unwrap().id);
                }
            }
        }
    }

    #[test]
    fn breakpoints_tie_and_increase() {
        let data = random_plane(60, 7);
        let s = build_levels_2d(&data).unwrap();
        for k in 1..=60 {
            let level = s.level(k);
            assert!(level.windows(2).all(|w| w[0].angle < w[1].angle));
            assert!(level.iter().all(|b| (0.0..TAU).contains(&b.angle)));
            for (j, b) in level.iter().enumerate() {
                let prev = level[(j + level.len() - 1) % level.len()].id;
                let f = ScoringVector::from_angle(b.angle);
                let (p, q) = (data.coords(prev), data.coords(b.id));
                assert!((f.score_coords(p) - f.score_coords(q)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn swap_budget() {
        for n in [2usize, 3, 10, 77] {
            let s = build_levels_2d(&random_plane(n, n as u64)).unwrap();
            assert_eq!(s.breakpoint_count(), n * (n - 1) + n);
        }
    }

    #[test]
    fn collinear_and_grid_points() {
        let mut rows = Vec::new();
        for x in 0..5 {
            for y in 0..4 {
                rows.push([x as f64, y as f64]);
            }
        }
        let data = Dataset::from_rows(&rows).unwrap();
        let s = build_levels_2d(&data).unwrap();
        assert!(s.breakpoint_count() <= 20 * 19 + 20);
        for step in 0..360 {
            let f = ScoringVector::from_angle(step as f64 * TAU / 360.0 + 1e-3);
            for i in 1..=20 {
                assert_eq!(s.query(&f, i).unwrap().id, select_rank_exhaustive(&data, &f, i).unwrap().id);
            }
        }
    }

    #[test]
    fn top_level_walks_the_hull() {
        let data = random_plane(120, 8);
        let s = build_levels_2d(&data).unwrap();
        let mut level: Vec<PointId> = s.level(1).iter().map(|b| b.id).collect();
        let h = hull(&data);
        assert_eq!(level.len(), h.len());
        let start = level.iter().position(|&id| id == h[0]).unwrap();
        level.rotate_left(start);
        assert_eq!(level, h);
    }

    #[test]
    fn parts_round_trip() {
        let data = random_plane(25, 9);
        let s = build_levels_2d(&data).unwrap();
        let back = LevelStructure2D::from_parts(s.clone().into_parts()).unwrap();
        assert_eq!(back, s);
        check_source(&back, &data).unwrap();
        let mut bad = s.into_parts();
        bad.initial[0] = bad.initial[1];
        assert!(LevelStructure2D::from_parts(bad).is_err());
    }
}
