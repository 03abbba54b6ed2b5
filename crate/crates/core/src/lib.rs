//! Belief-function fusion over Shafer-model power sets, with a small-frame
//! hyper-power-set extension, and a sequential target type tracker driven by
//! unreliable classifier declarations.
//!
//! The library is split along the data flow of the tracking experiment:
//! - [`propositions`]: frames, power-set propositions, Dedekind-lattice elements
//! - [`belief`]: basic belief assignments, Bel/Pl, pignistic transform, discounting
//! - [`fusion`]: conjunctive consensus, conflict, Dempster's rule, PCR5, folding
//! - [`tracker`]: the sequential type estimator built on the fusion rules
//! - [`simulation`]: scenario generation and the seeded Monte-Carlo harness
//! - [`experiment`]: experiment configuration, CSV/metadata emitters

pub mod belief;
pub mod error;
pub mod experiment;
pub mod fusion;
pub mod propositions;
pub mod simulation;
pub mod tracker;

pub use belief::Bba;
pub use error::Error;
pub use fusion::FusionRule;
pub use propositions::{Frame, HyperProposition, Proposition};

pub type Result<T> = std::result::Result<T, Error>;
