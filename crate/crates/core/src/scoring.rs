use crate::error::{usage, Result};
use crate::point::Point;

const UNIT_NORM_TOLERANCE: f64 = 1e-9;

/// Unit-norm weight vector of a linear scoring function.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringVector(Vec<f64>);

impl ScoringVector {
    /// Accepts weights that are already unit length (within 1e-9).
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
            return Err(usage("weights must be finite and nonempty"));
        }
        let norm = l2(&weights);
        if (norm - 1.0).abs() > UNIT_NORM_TOLERANCE {
            return Err(usage(format!("scoring vector has norm {norm}, expected 1")));
        }
        Ok(Self(weights))
    }

    /// Unit vector at `angle` radians from the positive x axis.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(vec![c, s])
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Score of raw coordinates; the caller guarantees matching dimension.
    #[inline]
    pub fn score_coords(&self, coords: &[f64]) -> f64 {
        dot(&self.0, coords)
    }
}

/// Scales nonzero finite weights to unit length.
pub fn normalize(weights: &[f64]) -> Result<ScoringVector> {
    if weights.is_empty() || weights.iter().any(|w| !w.is_finite()) {
        return Err(usage("weights must be finite and nonempty"));
    }
    let norm = l2(weights);
    if norm == 0.0 {
        return Err(usage("cannot normalize the zero vector"));
    }
    Ok(ScoringVector(weights.iter().map(|w| w / norm).collect()))
}

/// `f·p`, checking that the dimensions agree.
pub fn score(f: &ScoringVector, p: Point<'_>) -> Result<f64> {
    if f.dim() != p.coords.len() {
        return Err(usage(format!(
            "scoring vector has d = {}, point {} has d = {}",
            f.dim(),
            p.id,
            p.coords.len()
        )));
    }
    Ok(f.score_coords(p.coords))
}

/// Every score in the crate goes through this one expression, so two
/// components comparing the same point against the same bound always agree.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The slab `{x : lower <= f·x <= upper}`. Either bound may be infinite,
/// which turns the slab into a half-space or the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct StripeRange {
    pub f: ScoringVector,
    pub lower: f64,
    pub upper: f64,
}

impl StripeRange {
    pub fn new(f: ScoringVector, lower: f64, upper: f64) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() {
            return Err(usage("stripe bounds must not be NaN"));
        }
        if lower > upper {
            return Err(usage(format!(
                "stripe lower bound {lower} exceeds upper bound {upper}"
            )));
        }
        if lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(usage("stripe bounds must leave a nonempty slab"));
        }
        Ok(Self { f, lower, upper })
    }

    /// `{x : f·x >= threshold}`.
    pub fn at_least(f: ScoringVector, threshold: f64) -> Result<Self> {
        Self::new(f, threshold, f64::INFINITY)
    }

    #[inline]
    pub fn contains_score(&self, s: f64) -> bool {
        self.lower <= s && s <= self.upper
    }

    #[inline]
    pub fn contains(&self, coords: &[f64]) -> bool {
        self.contains_score(self.f.score_coords(coords))
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }
}
