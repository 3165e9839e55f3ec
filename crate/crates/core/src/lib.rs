//! Ranked retrieval over static point sets under linear scoring functions.
//!
//! Given a dataset of `n` points in `R^d` and a unit-norm weight vector `f`,
//! every point gets the score `f·p` and the points are ordered by descending
//! score (ties broken by ascending id). This crate answers three questions
//! about that order:
//!
//! * which point sits at rank `i` ([`dar::exact_query`], [`kthlevel2d`]),
//! * a small set certain to contain the rank-`i` point
//!   ([`dar::conformal_query`]),
//! * every point whose score falls in `[lower, upper]` ([`srr`], [`hier`]).
//!
//! The exhaustive routines in [`select`] and [`srr::ExhaustiveScan`] are the
//! reference every other structure is checked against.

pub mod dar;
pub mod epsample;
mod error;
pub mod hier;
pub mod kthlevel2d;
mod point;
mod scoring;
pub mod select;
pub mod srr;

pub use error::{Error, Result};
pub use point::{Dataset, Point, PointId};
pub use scoring::{normalize, score, ScoringVector, StripeRange};
pub use select::{rank_of, select_kth_by_score, select_rank_exhaustive, RankedAnswer};
