//! Exact solvers for designing platforms that an average-reward agent adopts.
//!
//! An agent moves on a flower-shaped Markov chain. A designer may build a
//! platform on any petal, which changes how long the agent stays there and
//! what it earns. The agent adopts the subset of offered platforms that
//! maximizes its long-run average reward; the designer picks what to offer
//! to maximize its own long-run profit.

pub mod agent;
pub mod chain;
pub mod competitive;
pub mod designer;
pub mod error;
pub mod game;
pub mod instances;
pub mod model;
pub mod multiagent;
pub mod multiplatform;
pub mod rational;

pub use error::{Error, Result};
pub use model::{DerivedParams, FlowerInstance, StateParams, StateSet};
pub use rational::Rational;
