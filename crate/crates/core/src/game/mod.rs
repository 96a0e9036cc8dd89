//! Coalitional games with an explicit characteristic function.
//!
//! A [`TableGame`] stores one value per coalition, indexed by the coalition's
//! bit mask, so it is only practical for small player counts. The default cap
//! is [`DEFAULT_MAX_PLAYERS`]; larger games go through
//! [`crate::approx::ValueOracle`] instead.

mod analysis;
mod predicates;
mod reduce;

pub use analysis::{harsanyi_dividends, shapley_exact, shapley_matrix_exact, Dividends};
pub use predicates::{
    in_core, is_convex, is_convex_marginal, is_convex_supermodular, is_positive,
    is_size_bounded, SUPERMODULAR_CHECK_LIMIT,
};
pub use reduce::{reduced_game, Reduction};

use std::collections::HashSet;

use thiserror::Error;

use crate::coalition::Coalition;
use crate::scalar::Scalar;

/// Default player cap for fully materialized games.
pub const DEFAULT_MAX_PLAYERS: usize = 20;

/// Hard ceiling on the table size regardless of configuration.
pub const ABSOLUTE_MAX_PLAYERS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("a game needs at least one player")]
    NoPlayers,
    #[error("{n} players exceed the full-table limit of {cap}")]
    TooManyPlayers { n: usize, cap: usize },
    #[error("coalition {0} is listed more than once")]
    DuplicateCoalition(Coalition),
    #[error("the empty coalition must have value 0")]
    NonzeroEmptySet,
    #[error("player {player} is out of range for a game with {n} players")]
    PlayerOutOfRange { player: usize, n: usize },
    #[error("a unanimity game needs a nonempty support coalition")]
    EmptySupportCoalition,
    #[error("games have different player counts ({left} vs {right})")]
    PlayerCountMismatch { left: usize, right: usize },
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("payoff must be nonnegative")]
    NegativePayoff,
}

/// A game `(N, v)` over players `0..n` with every coalition's value stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TableGame<T> {
    n: usize,
    values: Vec<T>,
}

fn check_size(n: usize, cap: usize) -> Result<(), GameError> {
    let cap = cap.min(ABSOLUTE_MAX_PLAYERS);
    if n > cap {
        return Err(GameError::TooManyPlayers { n, cap });
    }
    Ok(())
}

impl<T: Scalar> TableGame<T> {
    /// Builds a game from sparse `(coalition, value)` entries; unlisted
    /// coalitions are worth zero.
    pub fn new<I>(n: usize, entries: I) -> Result<Self, GameError>
    where
        I: IntoIterator<Item = (Coalition, T)>,
    {
        Self::with_cap(n, entries, DEFAULT_MAX_PLAYERS)
    }

    /// Like [`TableGame::new`] with an explicit player cap.
    pub fn with_cap<I>(n: usize, entries: I, cap: usize) -> Result<Self, GameError>
    where
        I: IntoIterator<Item = (Coalition, T)>,
    {
        if n == 0 {
            return Err(GameError::NoPlayers);
        }
        check_size(n, cap)?;
        let grand = Coalition::grand(n);
        let mut values = vec![T::zero(); 1 << n];
        let mut seen = HashSet::new();
        for (coalition, value) in entries {
            if !coalition.is_subset_of(grand) {
                let player = coalition.difference(grand).iter().next().unwrap_or(n);
                return Err(GameError::PlayerOutOfRange { player, n });
            }
            if !seen.insert(coalition) {
                return Err(GameError::DuplicateCoalition(coalition));
            }
            if coalition.is_empty() && !value.is_zero() {
                return Err(GameError::NonzeroEmptySet);
            }
            values[coalition.index()] = value;
        }
        Ok(TableGame { n, values })
    }

    /// Builds a game by evaluating `f` on every coalition; `f(∅)` must be 0.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self, GameError>
    where
        F: FnMut(Coalition) -> T,
    {
        Self::from_fn_with_cap(n, f, DEFAULT_MAX_PLAYERS)
    }

    pub fn from_fn_with_cap<F>(n: usize, f: F, cap: usize) -> Result<Self, GameError>
    where
        F: FnMut(Coalition) -> T,
    {
        if n == 0 {
            return Err(GameError::NoPlayers);
        }
        check_size(n, cap)?;
        let values: Vec<T> = (0..1u64 << n).map(Coalition::from_bits).map(f).collect();
        if !values[0].is_zero() {
            return Err(GameError::NonzeroEmptySet);
        }
        Ok(TableGame { n, values })
    }

    /// Wraps a dense table of length `2^n`.
    pub fn from_table(n: usize, values: Vec<T>) -> Result<Self, GameError> {
        check_size(n, ABSOLUTE_MAX_PLAYERS)?;
        if values.len() != 1 << n {
            return Err(GameError::LengthMismatch {
                expected: 1 << n,
                found: values.len(),
            });
        }
        if !values[0].is_zero() {
            return Err(GameError::NonzeroEmptySet);
        }
        Ok(TableGame { n, values })
    }

    /// The game where every coalition is worth zero.
    pub fn null(n: usize) -> Result<Self, GameError> {
        Self::new(n, std::iter::empty())
    }

    /// `u_S`: worth 1 on supersets of `support`, 0 elsewhere.
    pub fn unanimity(n: usize, support: Coalition) -> Result<Self, GameError> {
        if support.is_empty() {
            return Err(GameError::EmptySupportCoalition);
        }
        if n == 0 {
            return Err(GameError::NoPlayers);
        }
        if !support.is_subset_of(Coalition::grand(n)) {
            return Err(GameError::PlayerOutOfRange {
                player: support.span() - 1,
                n,
            });
        }
        Self::from_fn(n, |c| {
            if support.is_subset_of(c) {
                T::one()
            } else {
                T::zero()
            }
        })
    }

    /// The additive game `v(S) = Σ_{i∈S} w_i`.
    pub fn additive(weights: &[T]) -> Result<Self, GameError> {
        Self::from_fn(weights.len(), |c| {
            c.iter().fold(T::zero(), |acc, i| acc + weights[i].clone())
        })
    }

    /// Pointwise `a·g1 + b·g2`.
    pub fn linear(a: &T, g1: &Self, b: &T, g2: &Self) -> Result<Self, GameError> {
        if g1.n != g2.n {
            return Err(GameError::PlayerCountMismatch {
                left: g1.n,
                right: g2.n,
            });
        }
        let values = g1
            .values
            .iter()
            .zip(&g2.values)
            .map(|(x, y)| a.clone() * x.clone() + b.clone() * y.clone())
            .collect();
        Ok(TableGame { n: g1.n, values })
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.n)
    }

    /// `v(S)`. Panics if `coalition` mentions a player outside the game.
    pub fn value(&self, coalition: Coalition) -> &T {
        &self.values[coalition.index()]
    }

    pub fn try_value(&self, coalition: Coalition) -> Option<&T> {
        coalition
            .is_subset_of(self.grand())
            .then(|| &self.values[coalition.index()])
    }

    pub fn grand_value(&self) -> &T {
        &self.values[self.values.len() - 1]
    }

    /// Values in coalition-index order.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `(coalition, value)` pairs for every nonzero entry, in index order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (Coalition, &T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(i, v)| (Coalition::from_bits(i as u64), v))
    }

    /// Applies `f` to every value. `f(0)` must stay 0.
    pub fn map<U: Scalar, F: FnMut(&T) -> U>(&self, f: F) -> TableGame<U> {
        let values: Vec<U> = self.values.iter().map(f).collect();
        debug_assert!(values[0].is_zero());
        TableGame { n: self.n, values }
    }

    /// Whether players `i` and `j` contribute identically to every coalition
    /// containing neither.
    pub fn are_symmetric(&self, i: usize, j: usize) -> bool {
        let rest = self.grand().without(i).without(j);
        rest.subsets()
            .all(|s| self.value(s.with(i)) == self.value(s.with(j)))
    }

    /// Whether player `i` adds nothing to any coalition.
    pub fn is_null_player(&self, i: usize) -> bool {
        let rest = self.grand().without(i);
        rest.subsets().all(|s| self.value(s.with(i)) == self.value(s))
    }

    pub(crate) fn from_parts(n: usize, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), 1 << n);
        TableGame { n, values }
    }
}
