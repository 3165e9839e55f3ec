use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{usage, Result};
use crate::scoring::{dot, StripeRange};

/// Absolute slack of [`Ball::contains`].
pub const CONTAINMENT_TOLERANCE: f64 = 1e-9;

/// Rounds of the core-set iteration used above three dimensions.
pub const CORESET_ROUNDS: usize = 100;

/// Highest dimension solved exactly with move-to-front Welzl.
pub const EXACT_BALL_MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, p: &[f64]) -> bool {
        dist_sq(&self.center, p).sqrt() <= self.radius + CONTAINMENT_TOLERANCE
    }
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Whether the ball can reach the stripe, with slack so the answer is never
/// a false negative: `lower − r ≤ f·c ≤ upper + r`, the radius scaled by
/// `‖f‖` and widened by `1e-9·(1 + |f·c| + r)`.
pub fn ball_intersects_stripe(b: &Ball, s: &StripeRange) -> bool {
    let norm = dot(s.f.weights(), s.f.weights()).sqrt();
    intersects(&b.center, b.radius, s, norm)
}

#[inline]
pub(crate) fn intersects(center: &[f64], radius: f64, s: &StripeRange, f_norm: f64) -> bool {
    let c = s.f.score_coords(center);
    let reach = radius * f_norm + slack(c, radius);
    s.lower - reach <= c && c <= s.upper + reach
}

#[inline]
pub(crate) fn slack(centre_score: f64, radius: f64) -> f64 {
    CONTAINMENT_TOLERANCE * (1.0 + centre_score.abs() + radius)
}

/// A ball containing every input point.
///
/// Up to three dimensions this is the exact minimum ball (move-to-front
/// Welzl on a shuffled copy). Higher dimensions run [`CORESET_ROUNDS`] core-set
/// steps toward the farthest point. Either way the radius is finally raised
/// to the largest center distance, so containment never depends on solver
/// accuracy.
pub fn smallest_enclosing_ball(points: &[&[f64]]) -> Result<Ball> {
    smallest_enclosing_ball_with(points, &mut ChaCha8Rng::seed_from_u64(0))
}

pub(crate) fn smallest_enclosing_ball_with(points: &[&[f64]], rng: &mut impl Rng) -> Result<Ball> {
    let first = points
        .first()
        .ok_or_else(|| usage("enclosing ball of an empty point set"))?;
    let d = first.len();
    if points.iter().any(|p| p.len() != d) {
        return Err(usage("points of mixed dimension"));
    }
    let center = if points.len() == 1 {
        first.to_vec()
    } else if d <= EXACT_BALL_MAX_DIM {
        let mut pts = points.to_vec();
        pts.shuffle(rng);
        let mut support = Vec::with_capacity(d + 1);
        let end = pts.len();
        welzl_mtf(&mut pts, end, &mut support, d).center
    } else {
        coreset_center(points)
    };
    let radius = points
        .iter()
        .map(|p| dist_sq(&center, p))
        .fold(0.0f64, f64::max)
        .sqrt();
    Ok(Ball { center, radius })
}

fn coreset_center(points: &[&[f64]]) -> Vec<f64> {
    let mut c = points[0].to_vec();
    for t in 1..=CORESET_ROUNDS {
        let far = points
            .iter()
            .map(|p| (dist_sq(&c, p), *p))
            .fold((-1.0, points[0]), |best, cur| if cur.0 > best.0 { cur } else { best })
            .1;
        let step = 1.0 / (t as f64 + 1.0);
        for (cj, fj) in c.iter_mut().zip(far) {
            *cj += (fj - *cj) * step;
        }
    }
    c
}

struct Sphere {
    center: Vec<f64>,
    r2: f64,
}

impl Sphere {
    fn empty(d: usize) -> Self {
        Sphere {
            center: vec![0.0; d],
            r2: -1.0,
        }
    }

    fn holds(&self, p: &[f64]) -> bool {
        self.r2 >= 0.0 && dist_sq(&self.center, p) <= self.r2 * (1.0 + 1e-10) + 1e-24
    }
}

/// Move-to-front Welzl: smallest ball of `pts[..end]` with `support` on its
/// boundary. Recursion depth is bounded by `d + 1`.
fn welzl_mtf<'a>(pts: &mut [&'a [f64]], end: usize, support: &mut Vec<&'a [f64]>, d: usize) -> Sphere {
    let mut ball = circumsphere(support, d);
    if support.len() == d + 1 {
        return ball;
    }
    for i in 0..end {
        if ball.holds(pts[i]) {
            continue;
        }
        let p = pts[i];
        support.push(p);
        ball = welzl_mtf(pts, i, support, d);
        support.pop();
        pts[..=i].rotate_right(1);
    }
    ball
}

/// Smallest sphere through every support point (center in their affine hull).
fn circumsphere(support: &[&[f64]], d: usize) -> Sphere {
    match support.len() {
        0 => return Sphere::empty(d),
        1 => {
            return Sphere {
                center: support[0].to_vec(),
                r2: 0.0,
            }
        }
        _ => {}
    }
    let origin = support[0];
    let k = support.len() - 1;
    let q: Vec<Vec<f64>> = support[1..]
        .iter()
        .map(|p| p.iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    // Gram system G·λ = b with G_ij = q_i·q_j, b_i = |q_i|²/2.
    let mut a = vec![vec![0.0; k + 1]; k];
    for i in 0..k {
        for j in 0..k {
            a[i][j] = dot(&q[i], &q[j]);
        }
        a[i][k] = 0.5 * dot(&q[i], &q[i]);
    }
    let Some(lambda) = solve(a) else {
        return diametral(support);
    };
    let mut center = origin.to_vec();
    for (li, qi) in lambda.iter().zip(&q) {
        for (c, x) in center.iter_mut().zip(qi) {
            *c += li * x;
        }
    }
    let r2 = support
        .iter()
        .map(|p| dist_sq(&center, p))
        .fold(0.0f64, f64::max);
    Sphere { center, r2 }
}

/// Fallback for affinely dependent supports: the ball on the farthest pair.
fn diametral(support: &[&[f64]]) -> Sphere {
    let mut best = (0, 0, -1.0);
    for i in 0..support.len() {
        for j in i + 1..support.len() {
            let dd = dist_sq(support[i], support[j]);
            if dd > best.2 {
                best = (i, j, dd);
            }
        }
    }
    let center: Vec<f64> = support[best.0]
        .iter()
        .zip(support[best.1])
        .map(|(a, b)| 0.5 * (a + b))
        .collect();
    let r2 = support
        .iter()
        .map(|p| dist_sq(&center, p))
        .fold(0.0f64, f64::max);
    Sphere { center, r2 }
}

/// Gaussian elimination with partial pivoting on an augmented `k × (k+1)`
/// matrix. `None` when a pivot is negligible against the matrix scale.
fn solve(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = a.len();
    let scale = a
        .iter()
        .flat_map(|row| row[..k].iter())
        .fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..k {
            let factor = a[row][col] / a[col][col];
            for c in col..=k {
                a[row][c] -= factor * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let tail: f64 = (row + 1..k).map(|c| a[row][c] * x[c]).sum();
        x[row] = (a[row][k] - tail) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize;
    use nalgebra::{DMatrix, DVector};

    fn rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    }

    fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(|r| r.as_slice()).collect()
    }

    /// Circumball of a support set in its affine hull, via nalgebra LU.
    fn oracle_circumball(s: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
        let d = s[0].len();
        if s.len() == 1 {
            return Some((s[0].to_vec(), 0.0));
        }
        let k = s.len() - 1;
        let q = DMatrix::from_fn(d, k, |r, c| s[c + 1][r] - s[0][r]);
        let g = q.transpose() * &q;
        let b = DVector::from_fn(k, |i, _| 0.5 * q.column(i).norm_squared());
        let lambda = g.lu().solve(&b)?;
        let c = DVector::from_column_slice(s[0]) + q * lambda;
        let r = (DVector::from_column_slice(s[0]) - &c).norm();
        Some((c.iter().copied().collect(), r))
    }

    fn brute_force_radius(pts: &[&[f64]]) -> f64 {
        let n = pts.len();
        let mut best = f64::INFINITY;
        let mut consider = |subset: &[usize]| {
            let s: Vec<&[f64]> = subset.iter().map(|&i| pts[i]).collect();
            if let Some((c, r)) = oracle_circumball(&s) {
                let covers = pts.iter().all(|p| {
                    p.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= r + 1e-9
                });
                if covers && r < best {
                    best = r;
                }
            }
        };
        for a in 0..n {
            consider(&[a]);
            for b in a + 1..n {
                consider(&[a, b]);
                for c in b + 1..n {
                    consider(&[a, b, c]);
                    for e in c + 1..n {
                        consider(&[a, b, c, e]);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn one_and_two_points() {
        let b = smallest_enclosing_ball(&[&[1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(b.center, vec![1.0, 2.0, 3.0]);
        assert_eq!(b.radius, 0.0);
        for d in [2, 7] {
            let p: Vec<f64> = (0..d).map(|j| j as f64).collect();
            let q: Vec<f64> = (0..d).map(|j| 2.0 - j as f64).collect();
            let b = smallest_enclosing_ball(&[&p, &q]).unwrap();
            let half = dist_sq(&p, &q).sqrt() / 2.0;
            // The core-set path is a (1 + 1/sqrt(rounds)) approximation.
            let slack = if d <= EXACT_BALL_MAX_DIM {
                1e-9
            } else {
                (CORESET_ROUNDS as f64).sqrt().recip()
            };
            assert!(b.radius >= half * (1.0 - 1e-12));
            assert!(b.radius <= half * (1.0 + slack));
        }
    }

    #[test]
    fn empty_input_rejected() {
        assert!(smallest_enclosing_ball(&[]).is_err());
        assert!(smallest_enclosing_ball(&[&[1.0], &[1.0, 2.0]]).is_err());
    }

    #[test]
    fn exact_in_three_dimensions() {
        for seed in 0..5 {
            let v = rows(20, 3, seed);
            let pts = refs(&v);
            let b = smallest_enclosing_ball(&pts).unwrap();
            let expected = brute_force_radius(&pts);
            assert!((b.radius - expected).abs() < 1e-6, "seed {seed}: {} vs {expected}", b.radius);
        }
    }

    #[test]
    fn exact_in_plane() {
        let v = rows(20, 2, 42);
        let pts = refs(&v);
        let b = smallest_enclosing_ball(&pts).unwrap();
        assert!((b.radius - brute_force_radius(&pts)).abs() < 1e-6);
    }

    #[test]
    fn collinear_and_duplicate_points() {
        let v: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let mut pts = refs(&v);
        pts.push(&v[3]);
        let b = smallest_enclosing_ball(&pts).unwrap();
        let half = dist_sq(&v[0], &v[9]).sqrt() / 2.0;
        assert!((b.radius - half).abs() < 1e-9);
        assert!(pts.iter().all(|p| b.contains(p)));
    }

    #[test]
    fn high_dimension_contains_everything() {
        let v = rows(500, 32, 3);
        let pts = refs(&v);
        let b = smallest_enclosing_ball(&pts).unwrap();
        assert!(pts.iter().all(|p| b.contains(p)));
        // Far from optimal would be the max pairwise distance.
        let diam = pts
            .iter()
            .flat_map(|p| pts.iter().map(move |q| dist_sq(p, q)))
            .fold(0.0f64, f64::max)
            .sqrt();
        assert!(b.radius < 0.75 * diam);
    }

    #[test]
    fn stripe_intersection_examples() {
        let f = normalize(&[1.0, 0.0]).unwrap();
        let s = StripeRange::new(f.clone(), 1.0, 2.0).unwrap();
        let inside = Ball {
            center: vec![1.5, 7.0],
            radius: 0.1,
        };
        assert!(ball_intersects_stripe(&inside, &s));
        let below = Ball {
            center: vec![0.0, 0.0],
            radius: 0.0,
        };
        assert!(!ball_intersects_stripe(&below, &s));
        let touching = Ball {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        assert!(ball_intersects_stripe(&touching, &s));
    }

    #[test]
    fn stripe_intersection_matches_slab_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let w: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let f = normalize(&w).unwrap();
            let a: f64 = rng.gen_range(-2.0..2.0);
            let width: f64 = rng.gen_range(0.0..1.0);
            let s = StripeRange::new(f.clone(), a, a + width).unwrap();
            let center: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let radius: f64 = rng.gen_range(0.0..1.0);
            let b = Ball {
                center: center.clone(),
                radius,
            };
            // Distance from center to slab, from the slab's mid-plane.
            let h: f64 = center.iter().zip(f.weights()).map(|(x, w)| x * w).sum();
            let mid = a + width / 2.0;
            let gap = ((h - mid).abs() - width / 2.0).max(0.0);
            let margin = gap - radius;
            if margin.abs() > 1e-7 {
                assert_eq!(ball_intersects_stripe(&b, &s), margin < 0.0);
            } else if margin < 0.0 {
                assert!(ball_intersects_stripe(&b, &s));
            }
        }
    }
}
