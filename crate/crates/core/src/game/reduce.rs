use crate::coalition::Coalition;
use crate::scalar::Scalar;

use super::{GameError, TableGame};

/// Result of paying one player a fixed amount and removing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction<T> {
    /// Game over the remaining players, densely reindexed.
    pub game: TableGame<T>,
    /// Index of the removed player in the input game.
    pub removed: usize,
    /// For each input player, its index in `game` (`None` for the removed one).
    pub old_to_new: Vec<Option<usize>>,
}

/// The `c`-reduced game `Ψ^{i→c}` on `N ∖ {i}`.
///
/// The grand coalition keeps `v(N) − c`; every other nonempty `S` may either
/// stand alone or absorb `i` at price `c`, whichever is worth more. Players
/// above `i` move down one index.
///
/// Reducing a one-player game leaves the empty game, which is only valid
/// when `c` equals `v(N)`.
pub fn reduced_game<T: Scalar>(
    game: &TableGame<T>,
    player: usize,
    payoff: &T,
) -> Result<Reduction<T>, GameError> {
    let n = game.players();
    if player >= n {
        return Err(GameError::PlayerOutOfRange { player, n });
    }
    if payoff.is_negative() {
        return Err(GameError::NegativePayoff);
    }
    let remaining_grand = Coalition::grand(n - 1);
    let grand_value = game.grand_value().clone() - payoff.clone();
    if n == 1 && !grand_value.is_zero() {
        return Err(GameError::NonzeroEmptySet);
    }
    let values = remaining_grand
        .subsets()
        .map(|reduced| {
            if reduced == remaining_grand {
                grand_value.clone()
            } else if reduced.is_empty() {
                T::zero()
            } else {
                let s = reduced.expand_at(player);
                let joined = game.value(s.with(player)).clone() - payoff.clone();
                let alone = game.value(s);
                if joined > *alone {
                    joined
                } else {
                    alone.clone()
                }
            }
        })
        .collect();
    let old_to_new = (0..n)
        .map(|p| match p.cmp(&player) {
            std::cmp::Ordering::Less => Some(p),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(p - 1),
        })
        .collect();
    Ok(Reduction {
        game: TableGame::from_parts(n - 1, values),
        removed: player,
        old_to_new,
    })
}
