//! Indivisible Shapley value for games given by a list of object owners.
//!
//! Object `j` is jointly owned by the coalition `S_j`, and a coalition is
//! worth the number of objects all of whose owners it contains. The Shapley
//! value gives every owner an equal share of each object, so it is cheap to
//! compute, and the integer payoffs can be realized by an actual assignment
//! of objects to owners through bipartite matching.

mod bipartite;
mod flow;

pub use bipartite::{augment_from, hopcroft_karp, BipartiteState};

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::game::{GameError, TableGame, DEFAULT_MAX_PLAYERS};
use crate::isv::remainder_order;
use flow::GroupFlow;
use crate::scalar::Scalar;
use crate::{IntVector, Rational, RationalVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("object {0} has no owners")]
    EmptyOwnerSet(usize),
    #[error("object {object} lists player {player}, but there are only {players} players")]
    PlayerOutOfRange {
        object: usize,
        player: usize,
        players: usize,
    },
    #[error("{0} players exceed the coalition width")]
    TooManyPlayers(usize),
    #[error("dividend of {0} is negative")]
    NegativeDividend(Coalition),
    #[error("dividend of {coalition} is {dividend}, not an integer")]
    NonIntegerDividend { coalition: Coalition, dividend: String },
    #[error("dividend for the empty coalition")]
    EmptyDividendCoalition,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// `(S_1, …, S_k)`: the owners of each object, duplicates allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OwnerList {
    players: usize,
    owners: Vec<Coalition>,
}

impl OwnerList {
    pub fn new(players: usize, owners: Vec<Coalition>) -> Result<Self, MatchingError> {
        if players > MAX_PLAYERS {
            return Err(MatchingError::TooManyPlayers(players));
        }
        let grand = Coalition::grand(players);
        for (object, s) in owners.iter().enumerate() {
            if s.is_empty() {
                return Err(MatchingError::EmptyOwnerSet(object));
            }
            if let Some(player) = s.difference(grand).iter().next() {
                return Err(MatchingError::PlayerOutOfRange {
                    object,
                    player,
                    players,
                });
            }
        }
        Ok(OwnerList { players, owners })
    }

    pub fn players(&self) -> usize {
        self.players
    }

    pub fn owners(&self) -> &[Coalition] {
        &self.owners
    }

    pub fn objects(&self) -> usize {
        self.owners.len()
    }

    /// Objects owned (at least partly) by `player`, ascending.
    pub fn owned_by(&self, player: usize) -> Vec<usize> {
        self.owners
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(player))
            .map(|(j, _)| j)
            .collect()
    }
}

/// `v(T) = |{S_j : S_j ⊆ T}|`.
pub fn game_from_owners(list: &OwnerList) -> Result<TableGame<Rational>, MatchingError> {
    let n = list.players();
    if n == 0 {
        return Err(GameError::NoPlayers.into());
    }
    if n > DEFAULT_MAX_PLAYERS {
        return Err(GameError::TooManyPlayers {
            n,
            cap: DEFAULT_MAX_PLAYERS,
        }
        .into());
    }
    let mut counts = vec![0u64; 1 << n];
    for s in list.owners() {
        counts[s.index()] += 1;
    }
    for bit in 0..n {
        for s in 0..counts.len() {
            if s >> bit & 1 == 1 {
                counts[s] += counts[s ^ (1 << bit)];
            }
        }
    }
    let values = counts.into_iter().map(|c| Rational::from_i64(c as i64)).collect();
    Ok(TableGame::from_table(n, values)?)
}

/// Closed form: `SV_i = Σ_{S_j ∋ i} 1/|S_j|`.
pub fn shapley_from_owners(list: &OwnerList) -> RationalVector {
    let mut sv = vec![Rational::zero(); list.players()];
    for s in list.owners() {
        let share = Rational::from_ratio(1, s.len() as i64);
        for i in *s {
            sv[i] += &share;
        }
    }
    sv
}

/// Assignment of every object to one of its owners.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Allocation {
    /// `assignment[j]` receives object `j`.
    pub assignment: Vec<usize>,
}

impl Allocation {
    /// Number of objects each of `players` receives.
    pub fn counts(&self, players: usize) -> IntVector {
        let mut counts = vec![0; players];
        for &p in &self.assignment {
            counts[p] += 1;
        }
        counts
    }

    /// Objects given to `player`, ascending.
    pub fn bundle(&self, player: usize) -> Vec<usize> {
        self.assignment
            .iter()
            .enumerate()
            .filter(|(_, &p)| p == player)
            .map(|(j, _)| j)
            .collect()
    }
}

/// Intermediate state after the floor copies have been matched.
pub fn floor_matching(list: &OwnerList, sv: &[Rational]) -> BipartiteState {
    let mut state = BipartiteState::new(list.objects());
    for (player, value) in sv.iter().enumerate() {
        let copies = Scalar::floor(value).to_i64_exact().unwrap_or(0);
        let owned = list.owned_by(player);
        for _ in 0..copies {
            state.add_left(player, owned.clone());
        }
    }
    state.hopcroft_karp();
    state
}

/// Allocates objects so that each player's bundle size is its indivisible
/// Shapley value in [`game_from_owners`].
///
/// Every player first gets `⌊SV_i⌋` node copies, matched to objects with
/// Hopcroft–Karp. Then, in decreasing order of remainder, each player with a
/// fractional Shapley value gets one more copy, kept only if an augmenting
/// path from it exists.
pub fn isv_allocation(list: &OwnerList) -> (Allocation, IntVector) {
    let sv = shapley_from_owners(list);
    let mut state = floor_matching(list, &sv);
    debug_assert!(state.saturates_left(), "floor copies always fit");
    for player in remainder_order(&sv) {
        if sv[player].is_integer() {
            continue;
        }
        let copy = state.add_left(player, list.owned_by(player));
        state.augment_from(copy);
    }
    let assignment = (0..list.objects())
        .map(|j| {
            let left = state
                .matched_left(j)
                .expect("every object is matched once all remainders are processed");
            state.left_player(left)
        })
        .collect();
    let allocation = Allocation { assignment };
    let counts = allocation.counts(list.players());
    (allocation, counts)
}

/// Indivisible Shapley value of a positive game given by its nonzero
/// dividends, without materializing the game.
///
/// An integer dividend `Δ(S)` is the same as `Δ(S)` objects owned by `S`, so
/// this runs [`isv_allocation`] on that owner list with the copies of each
/// coalition kept as one capacitated group. The cost is polynomial in the
/// number of dividends and players, not in the dividend sizes.
/// Repeated coalitions are summed.
pub fn isv_from_dividends(players: usize, dividends: &[(Coalition, Rational)]) -> Result<IntVector, MatchingError> {
    if players > MAX_PLAYERS {
        return Err(MatchingError::TooManyPlayers(players));
    }
    let grand = Coalition::grand(players);
    let mut merged: BTreeMap<Coalition, Rational> = BTreeMap::new();
    for (s, d) in dividends {
        if s.is_empty() {
            return Err(MatchingError::EmptyDividendCoalition);
        }
        if let Some(player) = s.difference(grand).iter().next() {
            return Err(MatchingError::PlayerOutOfRange {
                object: 0,
                player,
                players,
            });
        }
        *merged.entry(*s).or_insert_with(Rational::zero) += d;
    }

    let mut sv = vec![Rational::zero(); players];
    let mut groups = Vec::new();
    for (s, d) in merged {
        if d.is_negative() {
            return Err(MatchingError::NegativeDividend(s));
        }
        let copies = d
            .to_i64_exact()
            .and_then(|k| u64::try_from(k).ok())
            .ok_or_else(|| MatchingError::NonIntegerDividend {
                coalition: s,
                dividend: d.to_string(),
            })?;
        if copies == 0 {
            continue;
        }
        let share = d / Rational::from_i64(s.len() as i64);
        for i in s {
            sv[i] += &share;
        }
        groups.push((s, copies));
    }

    let mut flow = GroupFlow::new(players, groups);
    for (cap, s) in flow.capacity_mut().iter_mut().zip(&sv) {
        *cap = Scalar::floor(s).to_i64_exact().expect("floor of a share fits in i64") as u64;
    }
    flow.saturate();
    debug_assert!(sv
        .iter()
        .zip(flow.load())
        .all(|(s, &l)| Scalar::floor(s).to_i64_exact() == Some(l as i64)));
    for player in remainder_order(&sv) {
        if sv[player].is_integer() {
            continue;
        }
        flow.capacity_mut()[player] += 1;
        if flow.augment() == 0 {
            flow.capacity_mut()[player] -= 1;
        }
    }
    Ok(flow.load().iter().map(|&l| l as i64).collect())
}
