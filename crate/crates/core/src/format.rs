//! Text formats for games, owner lists, ballots and regional vote tables.
//!
//! All formats are line based. Blank lines and everything after `#` are
//! ignored. The first significant line is a header; errors report 1-based
//! line numbers.

use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::apportionment::{ApportionmentError, ApprovalProfile, Region, RegionalVotes};
use crate::coalition::{Coalition, MAX_PLAYERS};
use crate::game::{GameError, TableGame};
use crate::matching::{Allocation, MatchingError, OwnerList};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header line")]
    MissingHeader,
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Apportionment(#[from] ApportionmentError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Significant lines with comments stripped, paired with their line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let content = raw.split('#').next().unwrap_or("").trim();
        (!content.is_empty()).then_some((k + 1, content))
    })
}

fn parse_number<T: FromStr>(line: usize, token: &str, what: &str) -> Result<T, FormatError> {
    token
        .parse()
        .map_err(|_| syntax(line, format!("invalid {what} `{token}`")))
}

/// Parses `a`, `a/b` or a plain decimal such as `-1.25` into an exact rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    if let Some((num, den)) = text.split_once('/') {
        let num = BigInt::from_str(num).ok()?;
        let den = BigInt::from_str(den).ok()?;
        if den.is_zero() || text.contains('+') {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num = BigInt::from_str(&digits).ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let value = Rational::new(num, den);
    Some(if negative { -value } else { value })
}

/// Parses `i1,i2,…` into a coalition; the empty coalition is rejected.
pub fn parse_coalition(line: usize, text: &str) -> Result<Coalition, FormatError> {
    let mut coalition = Coalition::EMPTY;
    for token in text.split(',') {
        let player: usize = parse_number(line, token.trim(), "player index")?;
        if player >= MAX_PLAYERS {
            return Err(syntax(line, format!("player index {player} is too large")));
        }
        if coalition.contains(player) {
            return Err(syntax(line, format!("player {player} repeated")));
        }
        coalition = coalition.with(player);
    }
    Ok(coalition)
}

pub fn write_coalition(coalition: Coalition) -> String {
    coalition
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_players_header(line: usize, text: &str) -> Result<usize, FormatError> {
    let mut tokens = text.split_whitespace();
    if tokens.next() != Some("players") {
        return Err(syntax(line, "expected `players <n>`"));
    }
    let n = tokens
        .next()
        .ok_or_else(|| syntax(line, "missing player count"))
        .and_then(|t| parse_number(line, t, "player count"))?;
    if tokens.next().is_some() {
        return Err(syntax(line, "trailing text after player count"));
    }
    Ok(n)
}

fn check_range(line: usize, coalition: Coalition, n: usize) -> Result<(), FormatError> {
    match coalition.iter().find(|&p| p >= n) {
        Some(p) => Err(syntax(line, format!("player {p} is out of range for {n} players"))),
        None => Ok(()),
    }
}

/// Game file: `players <n>`, then `<i1>,<i2>,… <value>` per nonzero
/// coalition, with values written as integers, `num/den` or decimals.
pub fn parse_game(text: &str) -> Result<TableGame<Rational>, FormatError> {
    let mut it = lines(text);
    let (hline, header) = it.next().ok_or(FormatError::MissingHeader)?;
    let n = parse_players_header(hline, header)?;
    let mut entries = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (line, content) in it {
        let mut tokens = content.split_whitespace();
        let (Some(coalition), Some(value), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(syntax(line, "expected `<players> <value>`"));
        };
        let coalition = parse_coalition(line, coalition)?;
        check_range(line, coalition, n)?;
        if !seen.insert(coalition) {
            return Err(syntax(line, format!("coalition {coalition} listed twice")));
        }
        let value = parse_rational(value).ok_or_else(|| syntax(line, format!("invalid value `{value}`")))?;
        entries.push((coalition, value));
    }
    Ok(TableGame::new(n, entries)?)
}

/// Writes the nonzero entries of `game` in coalition-index order.
pub fn write_game(game: &TableGame<Rational>) -> String {
    let mut out = format!("players {}\n", game.players());
    for (coalition, value) in game.nonzero_entries() {
        let _ = writeln!(out, "{} {}", write_coalition(coalition), value);
    }
    out
}

/// Owner-list file: `players <n>`, then one owner set per object.
pub fn parse_owners(text: &str) -> Result<OwnerList, FormatError> {
    let mut it = lines(text);
    let (hline, header) = it.next().ok_or(FormatError::MissingHeader)?;
    let n = parse_players_header(hline, header)?;
    let mut owners = Vec::new();
    for (line, content) in it {
        let coalition = parse_coalition(line, content)?;
        check_range(line, coalition, n)?;
        owners.push(coalition);
    }
    Ok(OwnerList::new(n, owners)?)
}

pub fn write_owners(list: &OwnerList) -> String {
    let mut out = format!("players {}\n", list.players());
    for s in list.owners() {
        let _ = writeln!(out, "{}", write_coalition(*s));
    }
    out
}

/// One `<object> -> <player>` line per object.
pub fn write_allocation(allocation: &Allocation) -> String {
    let mut out = String::new();
    for (object, player) in allocation.assignment.iter().enumerate() {
        let _ = writeln!(out, "{object} -> {player}");
    }
    out
}

fn parse_parties_header(line: usize, text: &str) -> Result<Vec<String>, FormatError> {
    let mut tokens = text.split_whitespace();
    if tokens.next() != Some("parties") {
        return Err(syntax(line, "expected `parties <m> <names…>`"));
    }
    let m: usize = tokens
        .next()
        .ok_or_else(|| syntax(line, "missing party count"))
        .and_then(|t| parse_number(line, t, "party count"))?;
    let names: Vec<String> = tokens.map(str::to_string).collect();
    if names.len() != m {
        return Err(syntax(line, format!("expected {m} party names, found {}", names.len())));
    }
    Ok(names)
}

fn write_parties_header(parties: &[String]) -> String {
    let mut out = format!("parties {}", parties.len());
    for name in parties {
        out.push(' ');
        out.push_str(name);
    }
    out.push('\n');
    out
}

/// Ballot file: `parties <m> <names…>`, then `<count> <i1>,<i2>,…` per
/// approval set.
pub fn parse_ballots(text: &str) -> Result<ApprovalProfile, FormatError> {
    let mut it = lines(text);
    let (hline, header) = it.next().ok_or(FormatError::MissingHeader)?;
    let parties = parse_parties_header(hline, header)?;
    let mut ballots = Vec::new();
    for (line, content) in it {
        let mut tokens = content.split_whitespace();
        let (Some(count), Some(set), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(syntax(line, "expected `<count> <parties>`"));
        };
        let count: u64 = parse_number(line, count, "ballot count")?;
        if count == 0 {
            return Err(syntax(line, "ballot count must be positive"));
        }
        let set = parse_coalition(line, set)?;
        check_range(line, set, parties.len())?;
        ballots.push((set, count));
    }
    Ok(ApprovalProfile::new(parties, ballots)?)
}

pub fn write_ballots(profile: &ApprovalProfile) -> String {
    let mut out = write_parties_header(profile.parties());
    for (set, count) in profile.ballots() {
        let _ = writeln!(out, "{count} {}", write_coalition(*set));
    }
    out
}

/// Regional file: `parties <m> <names…>`, then
/// `region <seats> <v0> … <v(m-1)> | <outsider totals…>` per region.
pub fn parse_regions(text: &str) -> Result<(RegionalVotes, Vec<Vec<u64>>), FormatError> {
    let mut it = lines(text);
    let (hline, header) = it.next().ok_or(FormatError::MissingHeader)?;
    let parties = parse_parties_header(hline, header)?;
    let mut regions = Vec::new();
    let mut outsiders = Vec::new();
    for (line, content) in it {
        let (head, tail) = content.split_once('|').unwrap_or((content, ""));
        let mut tokens = head.split_whitespace();
        if tokens.next() != Some("region") {
            return Err(syntax(line, "expected `region <seats> <votes…> | <outsiders…>`"));
        }
        let seats: u64 = tokens
            .next()
            .ok_or_else(|| syntax(line, "missing seat count"))
            .and_then(|t| parse_number(line, t, "seat count"))?;
        if seats == 0 {
            return Err(syntax(line, "seat count must be positive"));
        }
        let votes = tokens
            .map(|t| parse_number(line, t, "vote total"))
            .collect::<Result<Vec<u64>, _>>()?;
        if votes.len() != parties.len() {
            return Err(syntax(
                line,
                format!("expected {} vote totals, found {}", parties.len(), votes.len()),
            ));
        }
        if votes.iter().all(|&v| v == 0) {
            return Err(syntax(line, "region has no positive vote"));
        }
        let extra = tail
            .split_whitespace()
            .map(|t| parse_number(line, t, "outsider total"))
            .collect::<Result<Vec<u64>, _>>()?;
        regions.push(Region { seats, votes });
        outsiders.push(extra);
    }
    Ok((RegionalVotes::new(parties, regions)?, outsiders))
}

pub fn write_regions(rv: &RegionalVotes, outsiders: &[Vec<u64>]) -> String {
    let mut out = write_parties_header(rv.parties());
    for (region, extra) in rv.regions().iter().zip(outsiders) {
        let _ = write!(out, "region {}", region.seats);
        for v in &region.votes {
            let _ = write!(out, " {v}");
        }
        out.push_str(" |");
        for v in extra {
            let _ = write!(out, " {v}");
        }
        out.push('\n');
    }
    out
}

/// Renders a rational as `num/den`, or bare when integral.
pub fn rational_text(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
