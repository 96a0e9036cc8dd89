//! Monte-Carlo estimators for games available only as a value oracle.
//!
//! Permutation `t` of a run is derived from `(seed, t)` alone, and partial
//! sums are combined in a fixed block order, so results do not depend on the
//! number of worker threads.

mod oracle;
mod subprocess;

pub use oracle::{CachedOracle, FnOracle, OracleError, ValueOracle, DEFAULT_CACHE_CAPACITY};
pub use subprocess::{decode_query, encode_query, is_decimal, parse_reply, SubprocessOracle};

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::coalition::Coalition;
use crate::matrix::SynergyMatrix;

/// Largest player count for which all `n!` orders may be enumerated.
pub const MAX_EXHAUSTIVE_PLAYERS: usize = 9;

/// Default sample count.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Permutations per accumulation block. Fixed so that the summation order
/// is a function of the permutation index only.
const BLOCK: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("the oracle has no players")]
    NoPlayers,
    #[error("exhaustive mode supports at most {MAX_EXHAUSTIVE_PLAYERS} players, got {0}")]
    TooManyForExhaustive(usize),
    #[error("invalid harmonic range {from}..={to}")]
    InvalidRange { from: usize, to: usize },
    #[error("oracle failed on coalition {coalition}: {source}")]
    Oracle {
        coalition: Coalition,
        #[source]
        source: OracleError,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Number of random permutations `k`; ignored in exhaustive mode.
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
    /// Average over all `n!` orders instead of sampling.
    pub exhaustive: bool,
    /// Memo size for expensive oracles; 0 disables memoization.
    pub cache_capacity: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            samples: DEFAULT_SAMPLES,
            seed: 0,
            workers: 1,
            exhaustive: false,
            cache_capacity: DEFAULT_CACHE_CAPACITY,
        }
    }
}

impl SamplerConfig {
    pub fn sampled(samples: usize, seed: u64) -> Self {
        SamplerConfig {
            samples,
            seed,
            ..Default::default()
        }
    }

    pub fn exhaustive() -> Self {
        SamplerConfig {
            exhaustive: true,
            ..Default::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// `Σ_{t=from}^{to} 1/t`; the empty range `from = to + 1` sums to 0.
pub fn harmonic_tail<F: Float>(from: usize, to: usize) -> Result<F, SampleError> {
    if from == 0 || from > to + 1 {
        return Err(SampleError::InvalidRange { from, to });
    }
    Ok((from..=to).fold(F::zero(), |acc, t| acc + F::one() / cast::<F>(t)))
}

fn cast<F: Float>(x: usize) -> F {
    F::from(x).expect("count representable as float")
}

/// Permutation number `t` of players `0..n`.
enum Orders {
    Random { seed: u64 },
    All,
}

impl Orders {
    fn fill(&self, t: usize, perm: &mut [usize]) {
        match self {
            Orders::Random { seed } => {
                for (k, p) in perm.iter_mut().enumerate() {
                    *p = k;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(t as u64);
                perm.shuffle(&mut rng);
            }
            Orders::All => unrank(t, perm),
        }
    }
}

/// Lexicographic unranking via the factorial number system.
fn unrank(mut t: usize, perm: &mut [usize]) {
    let n = perm.len();
    let mut pool: Vec<usize> = (0..n).collect();
    let mut radix: usize = (1..n).product();
    for (k, slot) in perm.iter_mut().enumerate() {
        let idx = t / radix.max(1);
        t %= radix.max(1);
        *slot = pool.remove(idx);
        if n - k > 1 {
            radix /= n - k - 1;
        }
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn evaluate<F: Float, O: ValueOracle<F> + ?Sized>(oracle: &O, c: Coalition) -> Result<F, SampleError> {
    if c.is_empty() {
        return Ok(F::zero());
    }
    oracle
        .value(c)
        .map_err(|source| SampleError::Oracle { coalition: c, source })
}

/// Runs `visit` over every permutation of the run and returns the
/// normalized sum of the per-permutation accumulators.
fn accumulate<F, O, V>(oracle: &O, cfg: &SamplerConfig, width: usize, visit: V) -> Result<Vec<F>, SampleError>
where
    F: Float + Send + Sync,
    O: ValueOracle<F> + ?Sized,
    V: Fn(&dyn Fn(Coalition) -> Result<F, SampleError>, &[usize], &mut [F]) -> Result<(), SampleError> + Sync,
{
    let n = oracle.players();
    if n == 0 {
        return Err(SampleError::NoPlayers);
    }
    let (orders, total) = if cfg.exhaustive {
        if n > MAX_EXHAUSTIVE_PLAYERS {
            return Err(SampleError::TooManyForExhaustive(n));
        }
        (Orders::All, factorial(n))
    } else {
        if cfg.samples == 0 {
            return Err(SampleError::ZeroSamples);
        }
        (Orders::Random { seed: cfg.seed }, cfg.samples)
    };

    let cached;
    let lookup: &(dyn ValueOracle<F> + '_) = if oracle.is_cheap() || cfg.cache_capacity == 0 {
        &OracleRef(oracle)
    } else {
        cached = CachedOracle::new(OracleRef(oracle), cfg.cache_capacity);
        &cached
    };
    let value = |c: Coalition| evaluate(lookup, c);

    let blocks = total.div_ceil(BLOCK);
    let workers = cfg.workers.clamp(1, blocks);
    let run_block = |b: usize| -> Result<Vec<F>, SampleError> {
        let mut acc = vec![F::zero(); width];
        let mut perm = vec![0; n];
        for t in b * BLOCK..((b + 1) * BLOCK).min(total) {
            orders.fill(t, &mut perm);
            visit(&value, &perm, &mut acc)?;
        }
        Ok(acc)
    };

    let mut partials: Vec<(usize, Result<Vec<F>, SampleError>)> = if workers == 1 {
        (0..blocks).map(|b| (b, run_block(b))).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let run_block = &run_block;
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        for b in (w..blocks).step_by(workers) {
                            let r = run_block(b);
                            let failed = r.is_err();
                            out.push((b, r));
                            if failed {
                                break;
                            }
                        }
                        out
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("sampler worker panicked"))
                .collect()
        })
    };
    partials.sort_by_key(|(b, _)| *b);

    let mut sum = vec![F::zero(); width];
    for (_, partial) in partials {
        for (s, x) in sum.iter_mut().zip(partial?) {
            *s = *s + x;
        }
    }
    let scale = cast::<F>(total);
    Ok(sum.into_iter().map(|s| s / scale).collect())
}

/// Lets a `?Sized` oracle be stored behind a sized wrapper.
struct OracleRef<'a, O: ?Sized>(&'a O);

impl<F, O: ValueOracle<F> + ?Sized> ValueOracle<F> for OracleRef<'_, O> {
    fn players(&self) -> usize {
        self.0.players()
    }

    fn value(&self, coalition: Coalition) -> Result<F, OracleError> {
        self.0.value(coalition)
    }

    fn is_cheap(&self) -> bool {
        self.0.is_cheap()
    }
}

/// Permutation-sampling Shapley estimate: the average marginal-contribution
/// vector over the run's permutations.
pub fn sample_shapley<F, O>(oracle: &O, cfg: &SamplerConfig) -> Result<Vec<F>, SampleError>
where
    F: Float + Send + Sync,
    O: ValueOracle<F> + ?Sized,
{
    accumulate(oracle, cfg, oracle.players(), |value, perm, acc| {
        let mut prefix = Coalition::EMPTY;
        let mut previous = F::zero();
        for &i in perm {
            prefix = prefix.with(i);
            let current = value(prefix)?;
            acc[i] = acc[i] + (current - previous);
            previous = current;
        }
        Ok(())
    })
}

/// Estimates the Shapley value matrix.
///
/// For player `i` preceded by `S` in a permutation, every `j ∈ S` with
/// `i < j` collects the second difference
/// `v(S∪i) − v(S) − v(S∖j∪i) + v(S∖j)` weighted by `Σ_{t=|S|+1}^{n} 1/t`.
/// The upper triangle is then mirrored. The diagonal is never touched by
/// this update and stays 0.
pub fn sample_shapley_matrix<F, O>(oracle: &O, cfg: &SamplerConfig) -> Result<SynergyMatrix<F>, SampleError>
where
    F: Float + Send + Sync,
    O: ValueOracle<F> + ?Sized,
{
    let n = oracle.players();
    let tails = (0..n)
        .map(|size| harmonic_tail::<F>(size + 1, n))
        .collect::<Result<Vec<_>, _>>()?;
    let flat = accumulate(oracle, cfg, n * n, |value, perm, acc| {
        let mut prefix = Coalition::EMPTY;
        let mut prefix_value = F::zero();
        for (pos, &i) in perm.iter().enumerate() {
            let joined = value(prefix.with(i))?;
            for j in prefix.iter().filter(|&j| j > i) {
                let rest = prefix.without(j);
                // Grouped so that a null i or j contributes exactly 0.
                let second = (joined - value(rest.with(i))?) - (prefix_value - value(rest)?);
                let cell = &mut acc[i * n + j];
                *cell = *cell + second * tails[pos];
            }
            prefix = prefix.with(i);
            prefix_value = joined;
        }
        Ok(())
    })?;
    let rows = flat.chunks(n).map(<[F]>::to_vec).collect();
    let mut m = SynergyMatrix::from_rows(rows).expect("square accumulator");
    m.mirror_upper();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::TableGame;

    fn additive(w: &[f64]) -> TableGame<f64> {
        TableGame::additive(w).unwrap()
    }

    fn u01() -> TableGame<f64> {
        TableGame::unanimity(2, Coalition::from_players([0, 1])).unwrap()
    }

    #[test]
    fn harmonic_tail_examples() {
        assert_eq!(harmonic_tail::<f64>(2, 2), Ok(0.5));
        assert_eq!(harmonic_tail::<f64>(3, 2), Ok(0.0));
        let h: f64 = harmonic_tail(2, 4).unwrap();
        assert!((h - (0.5 + 1.0 / 3.0 + 0.25)).abs() < 1e-15);
        assert_eq!(harmonic_tail::<f64>(4, 2), Err(SampleError::InvalidRange { from: 4, to: 2 }));
        assert_eq!(harmonic_tail::<f64>(0, 2), Err(SampleError::InvalidRange { from: 0, to: 2 }));
    }

    #[test]
    fn unranking_covers_all_orders() {
        let mut seen = std::collections::HashSet::new();
        let mut perm = vec![0; 4];
        for t in 0..24 {
            unrank(t, &mut perm);
            seen.insert(perm.clone());
        }
        assert_eq!(seen.len(), 24);
        unrank(0, &mut perm);
        assert_eq!(perm, vec![0, 1, 2, 3]);
        unrank(23, &mut perm);
        assert_eq!(perm, vec![3, 2, 1, 0]);
    }

    #[test]
    fn additive_game_is_exact_for_any_seed() {
        let g = additive(&[1.0, 2.0, 3.0]);
        for seed in [0, 7, 99] {
            let sv: Vec<f64> = sample_shapley(&g, &SamplerConfig::sampled(5, seed)).unwrap();
            assert_eq!(sv, vec![1.0, 2.0, 3.0]);
        }
    }

    #[test]
    fn unanimity_exhaustive() {
        let sv: Vec<f64> = sample_shapley(&u01(), &SamplerConfig::exhaustive()).unwrap();
        assert_eq!(sv, vec![0.5, 0.5]);
        let m: SynergyMatrix<f64> = sample_shapley_matrix(&u01(), &SamplerConfig::exhaustive()).unwrap();
        assert_eq!(*m.get(0, 1), 0.25);
        assert_eq!(*m.get(1, 0), 0.25);
        assert_eq!(*m.get(0, 0), 0.0);
    }

    #[test]
    fn unanimity_sampled_concentrates() {
        let sv: Vec<f64> = sample_shapley(&u01(), &SamplerConfig::sampled(10_000, 42)).unwrap();
        assert!(sv.iter().all(|x| (x - 0.5).abs() <= 0.05), "{sv:?}");
    }

    #[test]
    fn additive_matrix_has_no_synergy() {
        let g = additive(&[1.0, 4.0, 2.0, 0.5]);
        let m: SynergyMatrix<f64> = sample_shapley_matrix(&g, &SamplerConfig::sampled(500, 3)).unwrap();
        assert!(m.rows().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let g = TableGame::<f64>::from_fn(6, |s| (s.len() * s.len()) as f64 + s.bits() as f64 * 0.01).unwrap();
        let base = SamplerConfig::sampled(5_000, 11);
        let one: Vec<f64> = sample_shapley(&g, &base).unwrap();
        let four: Vec<f64> = sample_shapley(&g, &base.clone().with_workers(4)).unwrap();
        assert_eq!(one, four);
        let m1: SynergyMatrix<f64> = sample_shapley_matrix(&g, &base).unwrap();
        let m3: SynergyMatrix<f64> = sample_shapley_matrix(&g, &base.with_workers(3)).unwrap();
        assert_eq!(m1, m3);
        assert!(m1.is_symmetric());
    }

    #[test]
    fn configuration_errors() {
        let g = u01();
        let r: Result<Vec<f64>, _> = sample_shapley(&g, &SamplerConfig::sampled(0, 0));
        assert_eq!(r, Err(SampleError::ZeroSamples));
        let big = TableGame::<f64>::null(10).unwrap();
        let r: Result<Vec<f64>, _> = sample_shapley(&big, &SamplerConfig::exhaustive());
        assert_eq!(r, Err(SampleError::TooManyForExhaustive(10)));
    }

    #[test]
    fn oracle_failures_carry_the_coalition() {
        struct Broken;
        impl ValueOracle<f64> for Broken {
            fn players(&self) -> usize {
                2
            }
            fn value(&self, c: Coalition) -> Result<f64, OracleError> {
                if c.len() == 2 {
                    Err(OracleError::Other("boom".into()))
                } else {
                    Ok(0.0)
                }
            }
        }
        let r: Result<Vec<f64>, _> = sample_shapley(&Broken, &SamplerConfig::sampled(3, 0));
        assert_eq!(
            r,
            Err(SampleError::Oracle {
                coalition: Coalition::from_players([0, 1]),
                source: OracleError::Other("boom".into())
            })
        );
    }

    #[test]
    fn f32_estimates_work() {
        let g = TableGame::<f32>::additive(&[1.0, 2.0]).unwrap();
        let sv: Vec<f32> = sample_shapley(&g, &SamplerConfig::sampled(10, 1)).unwrap();
        assert_eq!(sv, vec![1.0, 2.0]);
    }
}
