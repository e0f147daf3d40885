//! Train tracks, carrying matrices, subshifts of finite type built from full
//! splits, and roof-function thermodynamics.
//!
//! All combinatorial and cone computations are exact. Floating point enters
//! only through logarithms and Perron roots, and every such value comes with
//! rational bounds where the value is used in a comparison.

pub mod canonical;
pub mod cone;
pub mod dyadic;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod measures;
pub mod moves;
pub mod par;
pub mod perron;
pub mod symbolic;
pub mod thermo;
pub mod track;

pub use error::{Result, TrakError};
pub use par::Execution;
pub use track::{parse_track, serialize_track, BranchKind, TopologicalType, TrainTrack};
