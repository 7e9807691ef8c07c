//! Rotation sets of degree-1 piecewise-linear maps on lifted sun graphs.
//!
//! The pipeline is: [`pl_map`] (the map) → [`partition`] (basic cells) →
//! [`cover_graph`] (the covering graph and its towers) → [`rotation_set`]
//! (intervals, isolated values, the line part) → [`periodic`] (exact periodic
//! points realizing rational rotation numbers). [`oracle`] is the
//! brute-force layer used to check all of it.

pub mod chain;
pub mod cover_graph;
pub mod error;
pub mod io;
pub mod line_rotation;
pub mod mean_cycle;
pub mod oracle;
pub mod partition;
pub mod periodic;
pub mod pl_map;
pub mod rational;
pub mod report;
pub mod rotation_set;
pub mod space;

pub use error::{Error, Result};
pub use pl_map::{MapSpec, PLMap};
pub use rational::Rational;
pub use space::{Chart, Point, SunGraphShape, TSegment};

// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/maps.md")]
    mod maps {}
    #[doc = include_str!("../../../book/src/partition.md")]
    mod partition {}
    #[doc = include_str!("../../../book/src/covering-graph.md")]
    mod covering_graph {}
    #[doc = include_str!("../../../book/src/rotation-set.md")]
    mod rotation_set {}
    #[doc = include_str!("../../../book/src/periodic-points.md")]
    mod periodic_points {}
    #[doc = include_str!("../../../book/src/line-part.md")]
    mod line_part {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
