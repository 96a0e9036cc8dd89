use crate::coalition::Coalition;
use crate::scalar::Scalar;

use super::{harsanyi_dividends, GameError, TableGame};

/// Up to this many players [`is_convex`] uses the pairwise supermodularity
/// check; above it, the per-player marginal check.
pub const SUPERMODULAR_CHECK_LIMIT: usize = 13;

/// Whether marginal contributions weakly increase with the coalition.
pub fn is_convex<T: Scalar>(game: &TableGame<T>) -> bool {
    if game.players() <= SUPERMODULAR_CHECK_LIMIT {
        is_convex_supermodular(game)
    } else {
        is_convex_marginal(game)
    }
}

/// `v(A) + v(B) ≤ v(A ∪ B) + v(A ∩ B)` for every pair of coalitions.
pub fn is_convex_supermodular<T: Scalar>(game: &TableGame<T>) -> bool {
    let size = 1u64 << game.players();
    (0..size).all(|a| {
        let a = Coalition::from_bits(a);
        (a.bits() + 1..size).all(|b| {
            let b = Coalition::from_bits(b);
            game.value(a).clone() + game.value(b).clone()
                <= game.value(a.union(b)).clone() + game.value(a.intersection(b)).clone()
        })
    })
}

/// Marginal form: for every coalition `S` and players `i ≠ j` outside it,
/// `v(S∪i) − v(S) ≤ v(S∪{i,j}) − v(S∪j)`.
///
/// Increasing marginals between neighbouring coalitions chain to every
/// `S ⊆ T`, so this is equivalent to the full definition.
pub fn is_convex_marginal<T: Scalar>(game: &TableGame<T>) -> bool {
    let n = game.players();
    game.grand().subsets().all(|s| {
        let outside: Vec<usize> = game.grand().difference(s).iter().collect();
        let base = game.value(s);
        outside.iter().enumerate().all(|(k, &i)| {
            let with_i = game.value(s.with(i)).clone() - base.clone();
            outside[k + 1..].iter().all(|&j| {
                debug_assert!(j < n);
                with_i.clone() <= game.value(s.with(i).with(j)).clone() - game.value(s.with(j)).clone()
            })
        })
    })
}

/// All Harsanyi dividends nonnegative.
pub fn is_positive<T: Scalar>(game: &TableGame<T>) -> bool {
    let d = harsanyi_dividends(game);
    game.grand().subsets().all(|s| !d.get(s).is_negative())
}

/// `v(S) < |S|` for every nonempty coalition.
pub fn is_size_bounded<T: Scalar>(game: &TableGame<T>) -> bool {
    game.grand()
        .subsets()
        .skip(1)
        .all(|s| *game.value(s) < T::from_usize(s.len()))
}

/// Core membership: efficient and no coalition can do better on its own.
pub fn in_core<T: Scalar>(game: &TableGame<T>, payoff: &[T]) -> Result<bool, GameError> {
    let n = game.players();
    if payoff.len() != n {
        return Err(GameError::LengthMismatch {
            expected: n,
            found: payoff.len(),
        });
    }
    // x(S) built incrementally from x(S without its lowest member).
    let mut sums: Vec<T> = Vec::with_capacity(1 << n);
    sums.push(T::zero());
    for s in 1usize..1 << n {
        let low = s.trailing_zeros() as usize;
        let x = sums[s & (s - 1)].clone() + payoff[low].clone();
        if x < *game.value(Coalition::from_bits(s as u64)) {
            return Ok(false);
        }
        sums.push(x);
    }
    Ok(sums[(1 << n) - 1] == *game.grand_value())
}
