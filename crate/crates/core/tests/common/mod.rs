//! Fixtures, random generators and brute-force references shared by the
//! integration tests.
#![allow(dead_code)]

use isv::{Coalition, Game, Rational, Scalar, TableGame};
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub fn c(players: &[usize]) -> Coalition {
    Coalition::from_players(players.iter().copied())
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ_S d(S) u_S`, evaluated coalition by coalition (no transform).
pub fn game_from_dividends(n: usize, dividends: &[(Coalition, Rational)]) -> Game {
    TableGame::from_fn(n, |t| {
        dividends
            .iter()
            .filter(|(s, _)| s.is_subset_of(t))
            .fold(Rational::zero(), |acc, (_, d)| acc + d)
    })
    .unwrap()
}

pub fn random_coalition<R: Rng>(rng: &mut R, n: usize) -> Coalition {
    Coalition::from_bits(rng.gen_range(1..1u64 << n))
}

/// Dividends `a/b` with `a ∈ [lo, hi]`, `b ∈ [1, 4]`, on a few random supports.
pub fn random_rational_dividends<R: Rng>(rng: &mut R, n: usize, lo: i64, hi: i64) -> Vec<(Coalition, Rational)> {
    let count = rng.gen_range(1..=2 * n);
    (0..count)
        .map(|_| {
            let s = random_coalition(rng, n);
            (s, q(rng.gen_range(lo..=hi), rng.gen_range(1..=4)))
        })
        .collect()
}

/// Nonnegative integer dividends; the result is convex and integer valued.
pub fn random_positive_integer_dividends<R: Rng>(rng: &mut R, n: usize, max: i64) -> Vec<(Coalition, Rational)> {
    let count = rng.gen_range(1..=2 * n);
    (0..count)
        .map(|_| (random_coalition(rng, n), q(rng.gen_range(0..=max), 1)))
        .collect()
}

/// A random game whose interior values are arbitrary small rationals and
/// whose grand coalition is worth a natural number.
pub fn random_fractional_game<R: Rng>(rng: &mut R, n: usize) -> Game {
    let total = rng.gen_range(0..=2 * n as i64);
    let grand = Coalition::grand(n);
    TableGame::from_fn(n, |s| {
        if s.is_empty() {
            Rational::zero()
        } else if s == grand {
            q(total, 1)
        } else {
            q(rng.gen_range(-2..=2 * n as i64), rng.gen_range(1..=3))
        }
    })
    .unwrap()
}

/// `v(S) = ⌊|S|/2⌋` on four players.
pub fn half_game() -> Game {
    TableGame::from_fn(4, |s| q(s.len() as i64 / 2, 1)).unwrap()
}

/// `2u_{012} + u_{34}`.
pub fn triple_and_pair() -> Game {
    game_from_dividends(5, &[(c(&[0, 1, 2]), q(2, 1)), (c(&[3, 4]), q(1, 1))])
}

/// Calls `visit` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut counters = vec![0; n];
    visit(&perm);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            visit(&perm);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

/// Shapley value as the average marginal contribution over all `n!` orders.
pub fn permutation_shapley(game: &Game) -> Vec<Rational> {
    let n = game.players();
    let mut sums = vec![Rational::zero(); n];
    let mut orders = 0i64;
    for_each_permutation(n, |perm| {
        orders += 1;
        let mut prefix = Coalition::EMPTY;
        for &i in perm {
            let next = prefix.with(i);
            sums[i] += game.value(next) - game.value(prefix);
            prefix = next;
        }
    });
    let orders = q(orders, 1);
    sums.into_iter().map(|s| s / &orders).collect()
}

/// Direct core test: efficiency and `x(S) ≥ v(S)` for every coalition.
pub fn brute_in_core(game: &Game, x: &[i64]) -> bool {
    let sum = |s: Coalition| s.iter().map(|i| x[i]).sum::<i64>();
    if q(sum(game.grand()), 1) != *game.grand_value() {
        return false;
    }
    (0..1u64 << game.players())
        .map(Coalition::from_bits)
        .all(|s| q(sum(s), 1) >= *game.value(s))
}

fn floor_i64(x: &Rational) -> i64 {
    Scalar::floor(x).to_i64_exact().unwrap()
}

/// Every integer vector respecting both quotas and efficiency.
pub fn brute_quota_vectors(game: &Game, sv: &[Rational]) -> Vec<Vec<i64>> {
    let total = game.grand_value().to_i64_exact().unwrap();
    let mut out = Vec::new();
    let mut x = Vec::with_capacity(sv.len());
    fn go(sv: &[Rational], total: i64, x: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if x.len() == sv.len() {
            if x.iter().sum::<i64>() == total {
                out.push(x.clone());
            }
            return;
        }
        let s = &sv[x.len()];
        let lo = floor_i64(s);
        let hi = if s.is_integer() { lo } else { lo + 1 };
        for v in lo..=hi {
            x.push(v);
            go(sv, total, x, out);
            x.pop();
        }
    }
    go(sv, total, &mut x, &mut out);
    out
}

/// Lexicographically greatest quota-respecting core vector, comparing
/// players in decreasing order of Shapley remainder (ties by index).
pub fn brute_lex_oracle(game: &Game, sv: &[Rational]) -> Option<Vec<i64>> {
    let mut order: Vec<usize> = (0..sv.len()).collect();
    let rem = |i: usize| &sv[i] - Scalar::floor(&sv[i]);
    order.sort_by(|&a, &b| rem(b).cmp(&rem(a)).then(a.cmp(&b)));
    brute_quota_vectors(game, sv)
        .into_iter()
        .filter(|x| brute_in_core(game, x))
        .max_by(|a, b| {
            order
                .iter()
                .map(|&i| a[i].cmp(&b[i]))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
}
