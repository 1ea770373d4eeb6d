//! Fuzzy classification aggregation over a continuum of individuals `I = [0, 1]`.
//!
//! A profile assigns every individual a fuzzy classification of `m` objects into
//! `p` types; an aggregator (an [`Fcaf`]) maps a profile to one classification.
//! The crate provides exact piecewise-polynomial functions and density-plus-atom
//! measures, weighted-mean aggregators and a handful of deliberately broken
//! ones, seeded falsifiers for the aggregation axioms, and a black-box harness
//! that reads the representing measure back out of an aggregator.

// `!(x <= tol)` is used on purpose: NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aggregators;
pub mod axioms;
pub mod classification;
pub mod cli;
pub mod error;
pub mod function_space;
pub mod harness;
pub mod measure;
mod rng;

pub use aggregators::{AggregatorSpec, Fcaf};
pub use axioms::{Axiom, SuiteConfig};
pub use classification::{ClassPoint, IntervalSet, Profile, Shape};
pub use error::{Error, Result};
pub use function_space::{PiecewiseFn, Poly};
pub use measure::Measure;
