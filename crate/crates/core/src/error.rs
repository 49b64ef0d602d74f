use thiserror::Error;

use crate::game::Profile;
use crate::rational::{ParseRationalError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("cost slope {name} must be positive, got {value}")]
    NonPositiveSlope { name: &'static str, value: Rational },

    #[error("connection count must be at least 1")]
    ZeroConnections,

    #[error("profile ({}, {}) is outside 0..={n}", .profile.n_abc, .profile.n_bac)]
    ProfileOutOfRange { profile: Profile, n: u32 },

    #[error("cannot switch a connection away from route {route}: it carries no connection")]
    EmptyRoute { route: &'static str },

    #[error("{what} requires {requirement}")]
    Precondition { what: &'static str, requirement: String },

    #[error("matrix shapes differ: {left:?} vs {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },

    #[error("efficiency is undefined for an empty equilibrium set")]
    EmptyEquilibria,

    #[error(transparent)]
    Parse(#[from] ParseRationalError),
}

pub type Result<T> = std::result::Result<T, GameError>;
