//! Indivisible Shapley value.
//!
//! Every player first receives the floor of its Shapley value. The remaining
//! units are handed out one at a time, scanning players by decreasing
//! fractional remainder, to the first player whose removal from the current
//! reduced game costs at least one unit (or, in non-convex games, who still
//! has a positive Shapley value there). After each grant the game is replaced
//! by its 1-reduced game.
//!
//! Ties between equal remainders are broken by ascending player index, both
//! when building the order and in every scan over it.

use std::cmp::Ordering;

use thiserror::Error;

use crate::game::{in_core, reduced_game, shapley_exact, GameError, TableGame, DEFAULT_MAX_PLAYERS};
use crate::scalar::Scalar;
use crate::IntVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsvError {
    #[error("grand coalition value {0} is not a nonnegative integer")]
    NotIndivisible(String),
    #[error("{n} players exceed the limit of {cap}")]
    TooManyPlayers { n: usize, cap: usize },
    #[error("no integer vector satisfies quotas, efficiency and the core")]
    EmptyFeasibleSet,
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("value {0} does not fit in a 64-bit payoff")]
    Overflow(String),
    #[error("no remaining player can receive the next unit")]
    NoEligiblePlayer,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Players sorted by decreasing Shapley remainder `SV_i − ⌊SV_i⌋`, ties by
/// ascending index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieBreakOrder(Vec<usize>);

impl TieBreakOrder {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of every player in the order.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = vec![0; self.0.len()];
        for (pos, &p) in self.0.iter().enumerate() {
            rank[p] = pos;
        }
        rank
    }

    /// Compares two payoff vectors lexicographically along this order.
    pub fn compare(&self, a: &[i64], b: &[i64]) -> Ordering {
        self.0
            .iter()
            .map(|&p| a[p].cmp(&b[p]))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl IntoIterator for TieBreakOrder {
    type Item = usize;
    type IntoIter = std::vec::IntoIter<usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

pub fn remainder_order<T: Scalar>(sv: &[T]) -> TieBreakOrder {
    let remainders: Vec<T> = sv.iter().map(|x| x.clone() - x.floor()).collect();
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| {
        remainders[b]
            .partial_cmp(&remainders[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    TieBreakOrder(order)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IsvEvent {
    /// The player received the floor of its Shapley value.
    FloorAssigned(i64),
    /// The player had an integral Shapley value and left the game at price 0.
    RemovedZero,
    /// The player received one additional unit.
    GrantedUnit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IsvStep {
    /// Index in the input game.
    pub player: usize,
    pub event: IsvEvent,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsvResult {
    pub payoffs: IntVector,
    pub trace: Vec<IsvStep>,
}

fn to_payoff<T: Scalar>(value: &T) -> Result<i64, IsvError> {
    value
        .to_i64_exact()
        .ok_or_else(|| IsvError::Overflow(value.to_string()))
}

fn check_indivisible<T: Scalar>(game: &TableGame<T>) -> Result<(), IsvError> {
    let total = game.grand_value();
    if total.is_negative() || !total.is_integral() {
        return Err(IsvError::NotIndivisible(total.to_string()));
    }
    if game.players() > DEFAULT_MAX_PLAYERS {
        return Err(IsvError::TooManyPlayers {
            n: game.players(),
            cap: DEFAULT_MAX_PLAYERS,
        });
    }
    Ok(())
}

/// Running state of the unit-granting procedure.
///
/// [`IsvProcess::start`] performs the floor assignment and the zero
/// reductions; each [`IsvProcess::grant_next`] call hands out one unit and
/// replaces the current game by its 1-reduced game.
#[derive(Clone, Debug)]
pub struct IsvProcess<T> {
    order: TieBreakOrder,
    payoffs: IntVector,
    trace: Vec<IsvStep>,
    game: TableGame<T>,
    members: Vec<usize>,
}

impl<T: Scalar> IsvProcess<T> {
    pub fn start(game: &TableGame<T>) -> Result<Self, IsvError> {
        check_indivisible(game)?;
        let n = game.players();
        let sv = shapley_exact(game);
        let order = remainder_order(&sv);
        let floors: Vec<T> = sv.iter().map(Scalar::floor).collect();

        let mut payoffs = Vec::with_capacity(n);
        let mut trace = Vec::with_capacity(2 * n);
        for (player, floor) in floors.iter().enumerate() {
            let k = to_payoff(floor)?;
            payoffs.push(k);
            trace.push(IsvStep {
                player,
                event: IsvEvent::FloorAssigned(k),
            });
        }

        // Subtract the floors from every coalition.
        let mut current = TableGame::from_fn_with_cap(
            n,
            |s| {
                s.iter()
                    .fold(game.value(s).clone(), |acc, i| acc - floors[i].clone())
            },
            n,
        )?;
        let mut members: Vec<usize> = (0..n).collect();

        for player in 0..n {
            if sv[player] != floors[player] {
                continue;
            }
            let local = members
                .iter()
                .position(|&m| m == player)
                .expect("player still present");
            current = reduced_game(&current, local, &T::zero())?.game;
            members.remove(local);
            trace.push(IsvStep {
                player,
                event: IsvEvent::RemovedZero,
            });
        }

        let current = current.map(Scalar::floor);
        Ok(IsvProcess {
            order,
            payoffs,
            trace,
            game: current,
            members,
        })
    }

    /// The current reduced game `(M, u)`, indexed densely.
    pub fn game(&self) -> &TableGame<T> {
        &self.game
    }

    /// Original index of each player of [`IsvProcess::game`].
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> &TieBreakOrder {
        &self.order
    }

    pub fn payoffs(&self) -> &[i64] {
        &self.payoffs
    }

    pub fn remaining_units(&self) -> T {
        self.game.grand_value().clone()
    }

    pub fn is_finished(&self) -> bool {
        !self.game.grand_value().is_positive()
    }

    /// Grants one unit; returns the original index of the recipient, or
    /// `None` when nothing is left to distribute.
    pub fn grant_next(&mut self) -> Result<Option<usize>, IsvError> {
        if self.is_finished() {
            return Ok(None);
        }
        let local = self.select()?;
        let player = self.members[local];
        self.game = reduced_game(&self.game, local, &T::one())?.game;
        self.members.remove(local);
        self.payoffs[player] += 1;
        self.trace.push(IsvStep {
            player,
            event: IsvEvent::GrantedUnit,
        });
        Ok(Some(player))
    }

    fn select(&self) -> Result<usize, IsvError> {
        let grand = self.game.grand();
        let total = self.game.grand_value();
        let mut local_sv: Option<Vec<T>> = None;
        for &player in self.order.as_slice() {
            let Some(local) = self.members.iter().position(|&m| m == player) else {
                continue;
            };
            let without = self.game.value(grand.without(local)).clone();
            if *total >= without + T::one() {
                return Ok(local);
            }
            let sv = local_sv.get_or_insert_with(|| shapley_exact(&self.game));
            if sv[local].is_positive() {
                return Ok(local);
            }
        }
        Err(IsvError::NoEligiblePlayer)
    }

    pub fn finish(mut self) -> Result<IsvResult, IsvError> {
        while self.grant_next()?.is_some() {}
        Ok(IsvResult {
            payoffs: self.payoffs,
            trace: self.trace,
        })
    }
}

/// Runs the full procedure on a game whose grand coalition is worth a
/// nonnegative integer. Interior values may be fractional.
pub fn indivisible_shapley<T: Scalar>(game: &TableGame<T>) -> Result<IsvResult, IsvError> {
    IsvProcess::start(game)?.finish()
}

/// Every integer vector with entries in `{⌊SV_i⌋, ⌈SV_i⌉}` summing to `v(N)`.
pub fn quota_vectors<T: Scalar>(game: &TableGame<T>) -> Result<Vec<IntVector>, IsvError> {
    check_indivisible(game)?;
    let sv = shapley_exact(game);
    let floors = sv
        .iter()
        .map(|x| to_payoff(&x.floor()))
        .collect::<Result<Vec<_>, _>>()?;
    let fractional: Vec<usize> = (0..sv.len()).filter(|&i| !sv[i].is_integral()).collect();
    let extra = to_payoff(game.grand_value())? - floors.iter().sum::<i64>();
    let mut out = Vec::new();
    if extra < 0 || extra as usize > fractional.len() {
        return Ok(out);
    }
    for mask in 0u64..1 << fractional.len() {
        if mask.count_ones() as i64 != extra {
            continue;
        }
        let mut x = floors.clone();
        for (k, &i) in fractional.iter().enumerate() {
            if mask >> k & 1 == 1 {
                x[i] += 1;
            }
        }
        out.push(x);
    }
    Ok(out)
}

fn as_scalars<T: Scalar>(x: &[i64]) -> Vec<T> {
    x.iter().map(|&v| T::from_i64(v)).collect()
}

/// Quota vectors that also lie in the core.
pub fn quota_core_vectors<T: Scalar>(game: &TableGame<T>) -> Result<Vec<IntVector>, IsvError> {
    let mut out = Vec::new();
    for x in quota_vectors(game)? {
        if in_core(game, &as_scalars::<T>(&x))? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Brute-force reference for convex integer games: the lexicographically
/// largest quota-respecting core vector along [`remainder_order`].
pub fn isv_oracle_convex<T: Scalar>(game: &TableGame<T>) -> Result<IntVector, IsvError> {
    let order = remainder_order(&shapley_exact(game));
    quota_core_vectors(game)?
        .into_iter()
        .max_by(|a, b| order.compare(a, b))
        .ok_or(IsvError::EmptyFeasibleSet)
}

/// All integer core vectors, by exhaustive enumeration.
///
/// Each entry is bounded below by `⌈v({i})⌉`, and efficiency bounds it above.
pub fn indivisible_core<T: Scalar>(game: &TableGame<T>) -> Result<Vec<IntVector>, IsvError> {
    check_indivisible(game)?;
    let n = game.players();
    let total = to_payoff(game.grand_value())?;
    let lower = (0..n)
        .map(|i| to_payoff(&game.value(crate::Coalition::singleton(i)).ceil()))
        .collect::<Result<Vec<_>, _>>()?;
    let slack = total - lower.iter().sum::<i64>();
    let mut out = Vec::new();
    if slack < 0 {
        return Ok(out);
    }
    let mut x = lower.clone();
    enumerate_compositions(&mut x, 0, slack, &mut |x| {
        if in_core(game, &as_scalars::<T>(x)).unwrap_or(false) {
            out.push(x.to_vec());
        }
    });
    Ok(out)
}

fn enumerate_compositions(x: &mut [i64], at: usize, left: i64, visit: &mut dyn FnMut(&[i64])) {
    if at + 1 == x.len() {
        x[at] += left;
        visit(x);
        x[at] -= left;
        return;
    }
    for k in 0..=left {
        x[at] += k;
        enumerate_compositions(x, at + 1, left - k, visit);
        x[at] -= k;
    }
}

/// `Σ_i |sv_i − x_i|^p`, the p-th power of the Lᵖ distance.
pub fn lp_distance<T: Scalar>(x: &[i64], sv: &[T], p: u32) -> Result<T, IsvError> {
    if x.len() != sv.len() {
        return Err(IsvError::LengthMismatch {
            expected: sv.len(),
            found: x.len(),
        });
    }
    Ok(x.iter().zip(sv).fold(T::zero(), |acc, (&xi, si)| {
        let d = (si.clone() - T::from_i64(xi)).abs();
        acc + (0..p).fold(T::one(), |pow, _| pow * d.clone())
    }))
}
