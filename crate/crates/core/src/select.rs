//! The rank order and exact selection within it.
//!
//! Points are ordered by descending score, and equal scores fall back to
//! ascending id. Every module uses this one total order, which makes "the
//! rank-`i` point" well defined on degenerate data. Score comparison is exact
//! on `f64`: the same dot product is evaluated everywhere.

use std::cmp::Ordering;

use crate::error::{usage, Result};
use crate::point::{Dataset, Point, PointId};
use crate::scoring::ScoringVector;

/// A point id paired with its score under some query vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scored {
    pub score: f64,
    pub id: PointId,
}

/// Rank-order comparison: `Less` means `a` ranks ahead of `b`.
#[inline]
pub fn rank_cmp(a: &Scored, b: &Scored) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then(a.id.cmp(&b.id))
}

/// True when `a` ranks strictly ahead of `b`.
#[inline]
pub fn precedes(a: &Scored, b: &Scored) -> bool {
    rank_cmp(a, b) == Ordering::Less
}

/// The point found at a given rank of the full dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankedAnswer {
    pub id: PointId,
    /// 1-based.
    pub rank: usize,
    pub score: f64,
}

impl RankedAnswer {
    pub fn point<'a>(&self, data: &'a Dataset) -> Point<'a> {
        data.point(self.id)
    }
}

pub(crate) fn check_dim(data: &Dataset, f: &ScoringVector) -> Result<()> {
    if data.dim() != f.dim() {
        return Err(usage(format!(
            "scoring vector has d = {}, dataset has d = {}",
            f.dim(),
            data.dim()
        )));
    }
    Ok(())
}

pub fn scored(data: &Dataset, f: &ScoringVector, ids: &[PointId]) -> Vec<Scored> {
    ids.iter()
        .map(|&id| Scored {
            score: f.score_coords(data.coords(id)),
            id,
        })
        .collect()
}

fn scored_all(data: &Dataset, f: &ScoringVector) -> Vec<Scored> {
    data.points()
        .map(|p| Scored {
            score: f.score_coords(p.coords),
            id: p.id,
        })
        .collect()
}

/// Sorts ids into rank order.
pub fn sort_by_rank(data: &Dataset, f: &ScoringVector, ids: &[PointId]) -> Vec<Scored> {
    let mut v = scored(data, f, ids);
    v.sort_unstable_by(rank_cmp);
    v
}

/// Expected-linear selection of the `k`-th element (1-based) in rank order.
/// Reorders `items`.
pub fn select_kth_scored(items: &mut [Scored], k: usize) -> Result<Scored> {
    if k == 0 || k > items.len() {
        return Err(usage(format!(
            "rank {k} out of range 1..={}",
            items.len()
        )));
    }
    let (_, kth, _) = items.select_nth_unstable_by(k - 1, rank_cmp);
    Ok(*kth)
}

/// The `k`-th point (1-based) of `ids` in rank order, without sorting.
pub fn select_kth_by_score(
    data: &Dataset,
    ids: &[PointId],
    f: &ScoringVector,
    k: usize,
) -> Result<Scored> {
    check_dim(data, f)?;
    let mut items = scored(data, f, ids);
    select_kth_scored(&mut items, k)
}

/// The rank-`i` point of the whole dataset by exhaustive selection.
pub fn select_rank_exhaustive(data: &Dataset, f: &ScoringVector, i: usize) -> Result<RankedAnswer> {
    check_dim(data, f)?;
    let mut items = scored_all(data, f);
    let s = select_kth_scored(&mut items, i)?;
    Ok(RankedAnswer {
        id: s.id,
        rank: i,
        score: s.score,
    })
}

/// 1 + the number of points ranked strictly ahead of `id`.
pub fn rank_of(data: &Dataset, f: &ScoringVector, id: PointId) -> Result<usize> {
    check_dim(data, f)?;
    let p = data
        .get(id)
        .ok_or_else(|| usage(format!("point {id} is not in the dataset")))?;
    let me = Scored {
        score: f.score_coords(p.coords),
        id,
    };
    let ahead = data
        .points()
        .filter(|q| {
            precedes(
                &Scored {
                    score: f.score_coords(q.coords),
                    id: q.id,
                },
                &me,
            )
        })
        .count();
    Ok(ahead + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_data(n: usize, d: usize, seed: u64) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Dataset::new(d, (0..n * d).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    fn random_dir(d: usize, rng: &mut impl Rng) -> ScoringVector {
        loop {
            let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if let Ok(f) = normalize(&w) {
                return f;
            }
        }
    }

    /// Full-sort oracle, written independently of `rank_cmp`.
    fn sort_oracle(data: &Dataset, f: &ScoringVector) -> Vec<PointId> {
        let mut v: Vec<(f64, PointId)> = data
            .points()
            .map(|p| (p.coords.iter().zip(f.weights()).map(|(a, b)| a * b).sum(), p.id))
            .collect();
        v.sort_by(|a, b| {
            if a.0 > b.0 {
                Ordering::Less
            } else if a.0 < b.0 {
                Ordering::Greater
            } else {
                a.1.cmp(&b.1)
            }
        });
        v.into_iter().map(|x| x.1).collect()
    }

    /// A 16-point planar configuration in the spirit of the toy example,
    /// with a direction pointing up and to the right.
    fn sixteen() -> (Dataset, ScoringVector) {
        let rows = [
            [1.0, 7.5], [2.2, 3.1], [3.0, 8.4], [4.1, 1.2], [4.8, 5.5], [5.5, 2.8],
            [6.3, 7.0], [7.0, 4.2], [7.7, 0.6], [8.2, 6.1], [8.9, 2.9], [9.5, 8.8],
            [1.6, 5.0], [3.4, 6.3], [6.0, 9.3], [9.1, 4.7],
        ];
        (Dataset::from_rows(&rows).unwrap(), normalize(&[0.8, 0.45]).unwrap())
    }

    #[test]
    fn rank_one_is_max() {
        let data = random_data(300, 3, 1);
        let f = normalize(&[0.3, -0.2, 0.9]).unwrap();
        let top = select_rank_exhaustive(&data, &f, 1).unwrap();
        let max = data
            .points()
            .map(|p| f.score_coords(p.coords))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(top.score, max);
    }

    #[test]
    fn sixteen_point_eighth() {
        let (data, f) = sixteen();
        let oracle = sort_oracle(&data, &f);
        let got = select_rank_exhaustive(&data, &f, 8).unwrap();
        assert_eq!(got.id, oracle[7]);
        assert_eq!(rank_of(&data, &f, got.id).unwrap(), 8);
    }

    #[test]
    fn equal_scores_follow_ids() {
        let data = Dataset::from_rows(&[[1.0, 5.0], [1.0, -3.0], [1.0, 0.0], [1.0, 2.0]]).unwrap();
        let f = ScoringVector::new(vec![1.0, 0.0]).unwrap();
        for k in 1..=4 {
            assert_eq!(select_rank_exhaustive(&data, &f, k).unwrap().id, (k - 1) as PointId);
        }
    }

    #[test]
    fn signed_zero_scores_tie() {
        let data = Dataset::from_rows(&[[-0.0], [0.0]]).unwrap();
        let f = ScoringVector::new(vec![1.0]).unwrap();
        assert_eq!(select_rank_exhaustive(&data, &f, 1).unwrap().id, 0);
    }

    #[test]
    fn out_of_range_ranks() {
        let data = random_data(10, 2, 2);
        let f = normalize(&[1.0, 1.0]).unwrap();
        assert!(select_rank_exhaustive(&data, &f, 0).is_err());
        assert!(select_rank_exhaustive(&data, &f, 11).is_err());
        assert!(select_kth_by_score(&data, &[], &f, 1).is_err());
        assert!(rank_of(&data, &f, 10).is_err());
        let wrong = normalize(&[1.0, 1.0, 1.0]).unwrap();
        assert!(select_rank_exhaustive(&data, &wrong, 1).is_err());
    }

    #[test]
    fn rank_of_extremes() {
        let data = random_data(100, 4, 3);
        let f = normalize(&[1.0, 2.0, -1.0, 0.5]).unwrap();
        let order = sort_oracle(&data, &f);
        assert_eq!(rank_of(&data, &f, order[0]).unwrap(), 1);
        assert_eq!(rank_of(&data, &f, order[99]).unwrap(), 100);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let id = rng.gen_range(0..100u32);
            let pos = order.iter().position(|&x| x == id).unwrap();
            assert_eq!(rank_of(&data, &f, id).unwrap(), pos + 1);
        }
    }

    #[test]
    fn subset_selection() {
        let data = random_data(1000, 3, 4);
        let f = normalize(&[0.1, 0.7, -0.3]).unwrap();
        let ids: Vec<PointId> = data.ids().collect();
        let order = sort_oracle(&data, &f);
        assert_eq!(select_kth_by_score(&data, &ids, &f, 357).unwrap().id, order[356]);
        assert_eq!(select_kth_by_score(&data, &ids, &f, 1000).unwrap().id, order[999]);
        assert_eq!(select_kth_by_score(&data, &[42], &f, 1).unwrap().id, 42);
    }

    #[test]
    fn total_order_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            // Small integer scores so ties are common.
            let mut mk = |id| Scored {
                score: rng.gen_range(0..4) as f64,
                id,
            };
            let (a, b, c) = (mk(0), mk(1), mk(2));
            assert!(precedes(&a, &b) ^ precedes(&b, &a));
            if precedes(&a, &b) && precedes(&b, &c) {
                assert!(precedes(&a, &c));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn exhaustive_matches_sort(n in 1usize..2000, d in 1usize..6, seed in any::<u64>()) {
            let data = random_data(n, d, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcdef);
            let f = random_dir(d, &mut rng);
            let order = sort_oracle(&data, &f);
            for _ in 0..8 {
                let i = rng.gen_range(1..=n);
                let got = select_rank_exhaustive(&data, &f, i).unwrap();
                prop_assert_eq!(got.id, order[i - 1]);
                prop_assert_eq!(rank_of(&data, &f, got.id).unwrap(), i);
            }
        }
    }
}
