//! Seat apportionment from approval ballots and from regional vote tables.

use std::cmp::Ordering;

use num_traits::Zero;
use thiserror::Error;

use crate::coalition::Coalition;
use crate::game::{GameError, TableGame, DEFAULT_MAX_PLAYERS};
use crate::isv::{indivisible_shapley, IsvError};
use crate::scalar::Scalar;
use crate::{IntVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApportionmentError {
    #[error("{parties} parties exceed the limit of {cap}")]
    TooManyParties { parties: usize, cap: usize },
    #[error("no ballots")]
    NoBallots,
    #[error("ballot group {0} approves no party")]
    EmptyApproval(usize),
    #[error("ballot group {0} has multiplicity zero")]
    ZeroMultiplicity(usize),
    #[error("party {party} is out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },
    #[error("number of seats must be positive")]
    ZeroSeats,
    #[error("all vote totals are zero")]
    AllZeroVotes,
    #[error("region {0} has no positive vote")]
    NoPositiveVote(usize),
    #[error("region {region} lists {found} vote totals, expected {expected}")]
    RegionLength {
        region: usize,
        expected: usize,
        found: usize,
    },
    #[error("{found} outsider tables given for {expected} regions")]
    OutsiderCountMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Isv(#[from] IsvError),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Approval ballots grouped by identical approval sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApprovalProfile {
    parties: Vec<String>,
    ballots: Vec<(Coalition, u64)>,
}

impl ApprovalProfile {
    pub fn new(parties: Vec<String>, ballots: Vec<(Coalition, u64)>) -> Result<Self, ApportionmentError> {
        let m = parties.len();
        if m > DEFAULT_MAX_PLAYERS {
            return Err(ApportionmentError::TooManyParties {
                parties: m,
                cap: DEFAULT_MAX_PLAYERS,
            });
        }
        for (k, (set, count)) in ballots.iter().enumerate() {
            if set.is_empty() {
                return Err(ApportionmentError::EmptyApproval(k));
            }
            if *count == 0 {
                return Err(ApportionmentError::ZeroMultiplicity(k));
            }
            if let Some(party) = set.difference(Coalition::grand(m)).iter().next() {
                return Err(ApportionmentError::PartyOutOfRange { party, parties: m });
            }
        }
        Ok(ApprovalProfile { parties, ballots })
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn ballots(&self) -> &[(Coalition, u64)] {
        &self.ballots
    }

    pub fn voters(&self) -> u64 {
        self.ballots.iter().map(|(_, c)| c).sum()
    }
}

/// `v(S) = seats · |{ballots A : A ⊆ S}| / |ballots|`.
pub fn game_from_approvals(profile: &ApprovalProfile, seats: u64) -> Result<TableGame<Rational>, ApportionmentError> {
    let m = profile.parties().len();
    if profile.voters() == 0 {
        return Err(ApportionmentError::NoBallots);
    }
    if seats == 0 {
        return Err(ApportionmentError::ZeroSeats);
    }
    let mut counts = vec![0u64; 1 << m];
    for (set, count) in profile.ballots() {
        counts[set.index()] += count;
    }
    for bit in 0..m {
        for s in 0..counts.len() {
            if s >> bit & 1 == 1 {
                counts[s] += counts[s ^ (1 << bit)];
            }
        }
    }
    let voters = Rational::from_i64(profile.voters() as i64);
    let seats = Rational::from_i64(seats as i64);
    let values = counts
        .into_iter()
        .map(|c| &seats * Rational::from_i64(c as i64) / &voters)
        .collect();
    Ok(TableGame::from_table(m, values)?)
}

/// Indivisible Shapley value of [`game_from_approvals`]. Ties between equal
/// remainders go to the lower party index.
pub fn apportion_isv(profile: &ApprovalProfile, seats: u64) -> Result<IntVector, ApportionmentError> {
    let game = game_from_approvals(profile, seats)?;
    Ok(indivisible_shapley(&game)?.payoffs)
}

/// `a/(sa+1)` against `b/(sb+1)`, exactly.
fn compare_quotients(a: u64, sa: u64, b: u64, sb: u64) -> Ordering {
    (a as u128 * (sb as u128 + 1)).cmp(&(b as u128 * (sa as u128 + 1)))
}

/// D'Hondt highest averages with divisors 1, 2, 3, …
///
/// Equal quotients go to the party with more votes, then to the lower index.
pub fn dhondt(votes: &[u64], seats: u64) -> Result<IntVector, ApportionmentError> {
    if votes.iter().all(|&v| v == 0) {
        return Err(ApportionmentError::AllZeroVotes);
    }
    let mut won = vec![0u64; votes.len()];
    for _ in 0..seats {
        let mut best = 0;
        for p in 1..votes.len() {
            let ord = compare_quotients(votes[p], won[p], votes[best], won[best]).then(votes[p].cmp(&votes[best]));
            if ord == Ordering::Greater {
                best = p;
            }
        }
        won[best] += 1;
    }
    Ok(won.into_iter().map(|w| w as i64).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Region {
    pub seats: u64,
    pub votes: Vec<u64>,
}

/// Per-region seat counts and party vote totals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RegionalVotes {
    parties: Vec<String>,
    regions: Vec<Region>,
}

impl RegionalVotes {
    pub fn new(parties: Vec<String>, regions: Vec<Region>) -> Result<Self, ApportionmentError> {
        for (k, region) in regions.iter().enumerate() {
            if region.votes.len() != parties.len() {
                return Err(ApportionmentError::RegionLength {
                    region: k,
                    expected: parties.len(),
                    found: region.votes.len(),
                });
            }
            if region.seats == 0 {
                return Err(ApportionmentError::ZeroSeats);
            }
            if region.votes.iter().all(|&v| v == 0) {
                return Err(ApportionmentError::NoPositiveVote(k));
            }
        }
        Ok(RegionalVotes { parties, regions })
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }
}

/// Seats won by the members of `merged` running as one list, in every
/// region. Members outside `merged` keep their own lists, and the outsider
/// lists of each region run unchanged.
pub fn merged_list_seats(
    rv: &RegionalVotes,
    members: Coalition,
    merged: Coalition,
    outsiders: &[Vec<u64>],
) -> Result<u64, ApportionmentError> {
    if merged.is_empty() {
        return Ok(0);
    }
    let mut total = 0;
    for (region, extra) in rv.regions().iter().zip(outsiders) {
        let mut lists = vec![merged.iter().map(|p| region.votes[p]).sum::<u64>()];
        lists.extend(members.difference(merged).iter().map(|p| region.votes[p]));
        lists.extend(extra.iter().copied());
        total += dhondt(&lists, region.seats)?[0] as u64;
    }
    Ok(total)
}

/// Game over `members` (relabeled `0..|members|` in ascending party order)
/// whose value of `T` is the number of seats `T` secures as a joint list.
pub fn coalition_game_from_regions(
    rv: &RegionalVotes,
    members: Coalition,
    outsiders: &[Vec<u64>],
) -> Result<TableGame<Rational>, ApportionmentError> {
    let m = rv.parties().len();
    if let Some(party) = members.difference(Coalition::grand(m)).iter().next() {
        return Err(ApportionmentError::PartyOutOfRange { party, parties: m });
    }
    if outsiders.len() != rv.regions().len() {
        return Err(ApportionmentError::OutsiderCountMismatch {
            expected: rv.regions().len(),
            found: outsiders.len(),
        });
    }
    let n = members.len();
    if n > DEFAULT_MAX_PLAYERS {
        return Err(ApportionmentError::TooManyParties {
            parties: n,
            cap: DEFAULT_MAX_PLAYERS,
        });
    }
    let parties: Vec<usize> = members.iter().collect();
    let mut values = vec![Rational::zero(); 1 << n];
    for (s, value) in values.iter_mut().enumerate().skip(1) {
        let merged = Coalition::from_bits(s as u64)
            .iter()
            .map(|k| parties[k])
            .collect::<Coalition>();
        *value = Rational::from_i64(merged_list_seats(rv, members, merged, outsiders)? as i64);
    }
    Ok(TableGame::from_table(n, values)?)
}
