//! Overlap numbers and pointwise dimension for self-similar
//! measures of overlapping iterated function systems on the line.
//!
//! The pipeline has three independent legs that meet in a [`DimensionReport`]:
//!
//! * exact entropy `h` and Lyapunov exponent `χ` of a Bernoulli measure
//!   ([`measures`]);
//! * the folding entropy `F = log o`, estimated from the growth rate of the
//!   number `b_n` of order-`n` overlaps ([`overlap`]);
//! * an empirical ball-count estimate of the local dimension ([`dimension`]).
//!
//! The formula dimension `(h − F)/|χ|` is then compared with the empirical
//! one.
//!
//! ```
//! use ifsdim::{BernoulliSpec, IfsSystem, dimension_formula};
//!
//! let cantor = IfsSystem::cantor_middle_thirds();
//! let p = BernoulliSpec::uniform(2).unwrap();
//! let h = p.entropy();
//! let chi = p.lyapunov_exact(&cantor).unwrap();
//! // no overlaps: F = 0
//! let dim = dimension_formula(h, 0.0, chi).unwrap();
//! assert!((dim - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
//! ```
//!
//! The guide in `book/` walks through each leg; its code blocks are compiled
//! and run as doctests of this crate.

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod dimension;
pub mod error;
pub mod ifs;
pub mod measures;
pub mod output;
pub mod overlap;
pub mod rng;
pub mod stats;

pub use dimension::{
    bernoulli_convolution_dimension, dimension_formula, empirical_local_dimension, full_report,
    projection_entropy, DimensionReport, EmpiricalParams, RadiusGrid, ReportParams,
};
pub use error::{Error, Result};
pub use ifs::{IfsSystem, Interval, IntervalCover, SimilarityMap, Word};
pub use measures::{lyapunov_birkhoff, sample_point, BernoulliSpec, Estimate};
pub use overlap::{
    count_overlaps, folding_entropy, overlap_grid, overlap_series, OverlapCounter, OverlapQuery,
    OverlapSeries, SeriesParams,
};
pub use rng::SampleStream;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/systems.md")]
    mod systems {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/overlaps.md")]
    mod overlaps {}
    #[doc = include_str!("../../../book/src/dimension.md")]
    mod dimension {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
