//! Solvers for indivisible coalitional games.
//!
//! Players share a whole number of identical objects (seats, donors, image
//! regions). The crate computes exact Shapley values and turns them into
//! integer payoffs that respect each player's floor and ceiling, stay in the
//! core of convex integer games, and can be realized as an allocation of
//! distinguishable objects when the game comes from an owner list.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix the
//! common instantiations.

pub mod apportionment;
pub mod approx;
pub mod cli;
pub mod coalition;
pub mod format;
pub mod game;
pub mod isv;
pub mod large;
pub mod matching;
pub mod matrix;
pub mod scalar;

pub use coalition::Coalition;
pub use game::{GameError, TableGame};
pub use matrix::SynergyMatrix;
pub use scalar::Scalar;

/// Exact arbitrary-precision rational.
pub type Rational = num_rational::BigRational;

/// Game with exact rational values.
pub type Game = TableGame<Rational>;

/// Game with double-precision values.
pub type FloatGame = TableGame<f64>;

/// Per-player exact payoffs.
pub type RationalVector = Vec<Rational>;

/// Per-player integer payoffs.
pub type IntVector = Vec<i64>;

/// Sampled Shapley value matrix.
pub type ShapleyMatrix = SynergyMatrix<f64>;

/// Exact Shapley value matrix.
pub type RationalMatrix = SynergyMatrix<Rational>;
