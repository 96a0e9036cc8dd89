use std::num::NonZeroUsize;
use std::sync::Mutex;

use lru::LruCache;
use num_traits::Float;
use thiserror::Error;

use crate::coalition::Coalition;
use crate::game::TableGame;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("failed to start oracle process: {0}")]
    SpawnFailure(String),
    #[error("oracle replied {reply:?} to query {query}")]
    ProtocolViolation { query: String, reply: String },
    #[error("oracle process exited before answering query {0}")]
    ChildExited(String),
    #[error("oracle i/o error: {0}")]
    Io(String),
    #[error("coalition {coalition} is outside the {players}-player game")]
    OutOfRange { coalition: Coalition, players: usize },
    #[error("{0}")]
    Other(String),
}

/// A characteristic function that can only be queried, one coalition at a
/// time.
///
/// Implementations must return 0 for the empty coalition and the same value
/// every time a coalition is asked within one run.
pub trait ValueOracle<F>: Sync {
    fn players(&self) -> usize;

    fn value(&self, coalition: Coalition) -> Result<F, OracleError>;

    /// Whether a lookup is cheap enough that memoizing it is pointless.
    fn is_cheap(&self) -> bool {
        false
    }
}

impl<F, O> ValueOracle<F> for &O
where
    O: ValueOracle<F> + ?Sized,
{
    fn players(&self) -> usize {
        (**self).players()
    }

    fn value(&self, coalition: Coalition) -> Result<F, OracleError> {
        (**self).value(coalition)
    }

    fn is_cheap(&self) -> bool {
        (**self).is_cheap()
    }
}

impl<T: Scalar, F: Float> ValueOracle<F> for TableGame<T> {
    fn players(&self) -> usize {
        TableGame::players(self)
    }

    fn value(&self, coalition: Coalition) -> Result<F, OracleError> {
        let v = self.try_value(coalition).ok_or(OracleError::OutOfRange {
            coalition,
            players: TableGame::players(self),
        })?;
        F::from(v.to_f64()).ok_or_else(|| OracleError::Other(format!("value {v} is not representable")))
    }

    fn is_cheap(&self) -> bool {
        true
    }
}

/// Adapts a closure into an oracle.
pub struct FnOracle<G> {
    players: usize,
    f: G,
}

impl<G> FnOracle<G> {
    pub fn new(players: usize, f: G) -> Self {
        FnOracle { players, f }
    }
}

impl<F, G> ValueOracle<F> for FnOracle<G>
where
    G: Fn(Coalition) -> F + Sync,
{
    fn players(&self) -> usize {
        self.players
    }

    fn value(&self, coalition: Coalition) -> Result<F, OracleError> {
        Ok((self.f)(coalition))
    }

    fn is_cheap(&self) -> bool {
        true
    }
}

/// Default number of coalitions remembered by [`CachedOracle`].
pub const DEFAULT_CACHE_CAPACITY: usize = 1 << 20;

/// Bounded least-recently-used memo in front of an expensive oracle.
pub struct CachedOracle<O, F> {
    inner: O,
    cache: Mutex<LruCache<Coalition, F>>,
}

impl<O, F> CachedOracle<O, F> {
    pub fn new(inner: O, capacity: usize) -> Self {
        let capacity = NonZeroUsize::new(capacity).unwrap_or(NonZeroUsize::MIN);
        CachedOracle {
            inner,
            cache: Mutex::new(LruCache::new(capacity)),
        }
    }

    pub fn into_inner(self) -> O {
        self.inner
    }

    pub fn cached_len(&self) -> usize {
        self.cache.lock().map(|c| c.len()).unwrap_or(0)
    }
}

impl<O, F> ValueOracle<F> for CachedOracle<O, F>
where
    O: ValueOracle<F>,
    F: Copy + Send,
{
    fn players(&self) -> usize {
        self.inner.players()
    }

    fn value(&self, coalition: Coalition) -> Result<F, OracleError> {
        if let Some(&v) = self.cache.lock().expect("cache lock").get(&coalition) {
            return Ok(v);
        }
        let v = self.inner.value(coalition)?;
        self.cache.lock().expect("cache lock").put(coalition, v);
        Ok(v)
    }

    fn is_cheap(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct Counting<'a> {
        calls: &'a AtomicUsize,
    }

    impl ValueOracle<f64> for Counting<'_> {
        fn players(&self) -> usize {
            3
        }

        fn value(&self, coalition: Coalition) -> Result<f64, OracleError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            Ok(coalition.len() as f64)
        }
    }

    #[test]
    fn cache_deduplicates_and_evicts() {
        let calls = AtomicUsize::new(0);
        let cached = CachedOracle::new(Counting { calls: &calls }, 2);
        let a = Coalition::from_players([0]);
        let b = Coalition::from_players([1, 2]);
        let c = Coalition::from_players([0, 1, 2]);
        assert_eq!(cached.value(a), Ok(1.0));
        assert_eq!(cached.value(a), Ok(1.0));
        assert_eq!(calls.load(Ordering::SeqCst), 1);
        cached.value(b).unwrap();
        cached.value(c).unwrap();
        assert_eq!(cached.cached_len(), 2);
        // `a` was least recently used and has been evicted.
        cached.value(a).unwrap();
        assert_eq!(calls.load(Ordering::SeqCst), 4);
    }

    #[test]
    fn table_game_oracle_rejects_foreign_players() {
        let g = TableGame::<f64>::from_fn(2, |s| s.len() as f64).unwrap();
        let v: Result<f64, _> = ValueOracle::value(&g, Coalition::from_players([0, 1]));
        assert_eq!(v, Ok(2.0));
        let v: Result<f64, _> = ValueOracle::value(&g, Coalition::from_players([2]));
        assert!(matches!(v, Err(OracleError::OutOfRange { .. })));
    }
}
