//! Interactive, reward-steered evolution of object-oriented class designs.
//!
//! A [`problem::DesignProblem`] lists attributes, methods and which methods
//! use which attributes. Candidate designs ([`genome::DesignSolution`]) group
//! those elements into classes and are scored by external coupling plus four
//! symmetry-based elegance measures ([`metrics`]). An [`evolution::Episode`]
//! evolves a population, periodically shows the designer a candidate, and
//! turns the designer's star ratings into selection weights. [`designer`]
//! provides simulated designers and [`stats`] the rank statistics used to
//! analyse episode logs.

pub mod designer;
pub mod evolution;
pub mod genome;
pub mod metrics;
pub mod problem;
pub mod stats;

pub use designer::{Designer, DesignerSpec};
pub use evolution::{Episode, EpisodeConfig, EpisodeLog, Stars, Weights};
pub use genome::DesignSolution;
pub use metrics::{Elegance, MetricVector, Objective};
pub use problem::DesignProblem;
