use std::fmt;

/// Largest number of players a [`Coalition`] can address.
pub const MAX_PLAYERS: usize = 64;

/// A set of players, stored as a bit mask over indices `0..64`.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coalition(u64);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_bits(bits: u64) -> Self {
        Coalition(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Table index of this coalition in a game with at most 32 players.
    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// All players `0..n`.
    pub fn grand(n: usize) -> Self {
        assert!(n <= MAX_PLAYERS, "coalition over {n} players");
        if n == MAX_PLAYERS {
            Coalition(u64::MAX)
        } else {
            Coalition((1u64 << n) - 1)
        }
    }

    pub fn singleton(player: usize) -> Self {
        assert!(player < MAX_PLAYERS, "player {player} out of range");
        Coalition(1u64 << player)
    }

    /// Builds a coalition from player indices; duplicates are ignored.
    pub fn from_players<I: IntoIterator<Item = usize>>(players: I) -> Self {
        players
            .into_iter()
            .fold(Coalition::EMPTY, |acc, p| acc.with(p))
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, player: usize) -> bool {
        player < MAX_PLAYERS && self.0 >> player & 1 == 1
    }

    #[must_use]
    pub fn with(self, player: usize) -> Self {
        Coalition(self.0 | Coalition::singleton(player).0)
    }

    #[must_use]
    pub fn without(self, player: usize) -> Self {
        Coalition(self.0 & !Coalition::singleton(player).0)
    }

    #[must_use]
    pub const fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    #[must_use]
    pub const fn intersection(self, other: Coalition) -> Self {
        Coalition(self.0 & other.0)
    }

    #[must_use]
    pub const fn difference(self, other: Coalition) -> Self {
        Coalition(self.0 & !other.0)
    }

    pub const fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    /// Highest member index plus one, or 0 for the empty coalition.
    pub const fn span(self) -> usize {
        (64 - self.0.leading_zeros()) as usize
    }

    /// Removes `player` and shifts every higher member down by one.
    #[must_use]
    pub fn compact_without(self, player: usize) -> Self {
        let low = if player == 0 { 0 } else { self.0 & ((1u64 << player) - 1) };
        let high = if player + 1 >= MAX_PLAYERS { 0 } else { self.0 >> (player + 1) };
        Coalition(low | (high << player))
    }

    /// Inverse of [`Coalition::compact_without`]: opens a gap at `player`.
    #[must_use]
    pub fn expand_at(self, player: usize) -> Self {
        let low = if player == 0 { 0 } else { self.0 & ((1u64 << player) - 1) };
        let high = if player + 1 >= MAX_PLAYERS { 0 } else { (self.0 >> player) << (player + 1) };
        Coalition(low | high)
    }

    /// Members in ascending order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    /// Every subset of this coalition, starting from the empty set.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

impl FromIterator<usize> for Coalition {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Coalition::from_players(iter)
    }
}

impl IntoIterator for Coalition {
    type Item = usize;
    type IntoIter = Members;

    fn into_iter(self) -> Members {
        self.iter()
    }
}

#[derive(Clone, Debug)]
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let p = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(p)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

/// Subsets of a mask in increasing numeric order.
#[derive(Clone, Debug)]
pub struct Subsets {
    mask: u64,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = Coalition;

    fn next(&mut self) -> Option<Coalition> {
        let current = self.next?;
        self.next = if current == self.mask {
            None
        } else {
            Some((current.wrapping_sub(self.mask)) & self.mask)
        };
        Some(Coalition(current))
    }
}
