//! Exact analysis of the three-node load-balancing routing game under the
//! non-splitable and semi-splitable frameworks.

pub mod cli;
pub mod error;
pub mod f3;
pub mod f4;
pub mod game;
pub mod oracle;
pub mod rational;
pub mod report;

pub use error::{GameError, Result};
pub use game::{Framework, Params, Profile, Slopes};
pub use rational::Rational;
