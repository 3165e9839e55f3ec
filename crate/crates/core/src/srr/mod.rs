//! Stripe range retrieval: report every point with `lower <= f·p <= upper`.
//!
//! All backends return exactly the same id set as [`ExhaustiveScan`]; they
//! differ only in how much of the dataset they touch, which [`ScanStats`]
//! records per query.

mod kdtree;

pub use kdtree::{KdNode, KdTree, KdTreeParts, LEAF_CAPACITY};

use crate::error::{usage, Result};
use crate::point::{Dataset, PointId};
use crate::scoring::{ScoringVector, StripeRange};

/// Work done by one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanStats {
    /// Points whose score was evaluated against the query bounds.
    pub points_examined: usize,
    /// Index nodes (tree nodes or hierarchy balls) tested.
    pub nodes_visited: usize,
}

/// Result of a stripe query: member ids in ascending order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StripeHits {
    pub ids: Vec<PointId>,
    pub stats: ScanStats,
}

/// A built stripe-retrieval index over some dataset.
///
/// Implementations do not own the dataset; the caller passes the one the
/// index was built from.
pub trait SrrBackend {
    fn name(&self) -> &'static str;

    fn query_stripe(&self, data: &Dataset, stripe: &StripeRange) -> Result<StripeHits>;

    /// `|{p : f·p > threshold}|` when `strict`, else `|{p : f·p >= threshold}|`.
    fn count_halfspace(
        &self,
        data: &Dataset,
        f: &ScoringVector,
        threshold: f64,
        strict: bool,
    ) -> Result<usize>;
}

pub(crate) fn check_query(data: &Dataset, dim: usize, n: usize, f: &ScoringVector) -> Result<()> {
    if data.len() != n || data.dim() != dim {
        return Err(usage(format!(
            "index was built over {n} points in d = {dim}, got {} points in d = {}",
            data.len(),
            data.dim()
        )));
    }
    if f.dim() != dim {
        return Err(usage(format!(
            "query vector has d = {}, index has d = {dim}",
            f.dim()
        )));
    }
    Ok(())
}

#[inline]
pub(crate) fn passes(score: f64, threshold: f64, strict: bool) -> bool {
    if strict {
        score > threshold
    } else {
        score >= threshold
    }
}

/// Linear scan baseline.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExhaustiveScan;

impl SrrBackend for ExhaustiveScan {
    fn name(&self) -> &'static str {
        "exhaustive"
    }

    fn query_stripe(&self, data: &Dataset, stripe: &StripeRange) -> Result<StripeHits> {
        check_query(data, data.dim(), data.len(), &stripe.f)?;
        let ids = data
            .points()
            .filter(|p| stripe.contains(p.coords))
            .map(|p| p.id)
            .collect();
        Ok(StripeHits {
            ids,
            stats: ScanStats {
                points_examined: data.len(),
                nodes_visited: 0,
            },
        })
    }

    fn count_halfspace(
        &self,
        data: &Dataset,
        f: &ScoringVector,
        threshold: f64,
        strict: bool,
    ) -> Result<usize> {
        check_query(data, data.dim(), data.len(), f)?;
        Ok(data
            .points()
            .filter(|p| passes(f.score_coords(p.coords), threshold, strict))
            .count())
    }
}

/// Member ids of `stripe` by linear scan, ascending.
pub fn exhaustive_query_stripe(data: &Dataset, stripe: &StripeRange) -> Result<Vec<PointId>> {
    ExhaustiveScan.query_stripe(data, stripe).map(|h| h.ids)
}
