//! Cavity-method toolkit for sparse random graphs.
//!
//! * [`graph`]: random graph ensembles and structural probes.
//! * [`bethe`]: mean-field and Bethe fixed points for the Ising ferromagnet.
//! * [`matching`]: exact assignment solver and random-cost ensembles.
//! * [`coloring`]: Potts energy, exact oracle, warning propagation, whitening.
//! * [`survey`] / [`decimate`]: survey propagation on a given graph and a
//!   decimation-based coloring solver.
//! * [`population`]: population dynamics for the survey distribution and
//!   the complexity curve with its thresholds.
//! * [`io`]: text formats for graphs, colorings and parameter grids.

pub mod bethe;
pub mod coloring;
pub mod decimate;
pub mod error;
pub mod graph;
pub mod io;
pub mod matching;
pub mod population;
pub mod rng;
pub mod survey;

pub use error::{BetheError, ColoringError, GraphError, MatchingError, ParseError, SurveyError};
pub use graph::{DegreeModel, Graph};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
