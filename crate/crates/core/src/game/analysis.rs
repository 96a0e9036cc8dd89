use crate::coalition::Coalition;
use crate::matrix::SynergyMatrix;
use crate::scalar::Scalar;

use super::TableGame;

/// Harsanyi dividends `Δ_v(S)` of a game, one per coalition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dividends<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> Dividends<T> {
    pub fn players(&self) -> usize {
        self.n
    }

    pub fn get(&self, coalition: Coalition) -> &T {
        &self.values[coalition.index()]
    }

    /// Nonzero dividends in coalition-index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (Coalition, &T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, d)| !d.is_zero())
            .map(|(s, d)| (Coalition::from_bits(s as u64), d))
    }

    /// Rebuilds `v = Σ_S Δ(S)·u_S` (zeta transform over subsets).
    pub fn reconstruct(&self) -> TableGame<T> {
        let mut values = self.values.clone();
        superset_sum(self.n, &mut values);
        TableGame::from_parts(self.n, values)
    }
}

/// In place: `values[S] ← Σ_{T ⊆ S} values[T]`.
pub(crate) fn superset_sum<T: Scalar>(n: usize, values: &mut [T]) {
    for bit in 0..n {
        let step = 1usize << bit;
        for s in 0..values.len() {
            if s & step != 0 {
                let lower = values[s ^ step].clone();
                values[s] = values[s].clone() + lower;
            }
        }
    }
}

/// Möbius inversion of the characteristic function.
pub fn harsanyi_dividends<T: Scalar>(game: &TableGame<T>) -> Dividends<T> {
    let mut values = game.values().to_vec();
    for bit in 0..game.players() {
        let step = 1usize << bit;
        for s in 0..values.len() {
            if s & step != 0 {
                let lower = values[s ^ step].clone();
                values[s] = values[s].clone() - lower;
            }
        }
    }
    Dividends {
        n: game.players(),
        values,
    }
}

/// Exact Shapley value: each dividend split equally among its coalition.
pub fn shapley_exact<T: Scalar>(game: &TableGame<T>) -> Vec<T> {
    let dividends = harsanyi_dividends(game);
    let mut sv = vec![T::zero(); game.players()];
    for (s, d) in dividends.nonzero() {
        let share = d.clone() / T::from_usize(s.len());
        for i in s {
            sv[i] = sv[i].clone() + share.clone();
        }
    }
    sv
}

/// Shapley value matrix `SV_ij = Σ_{S ⊇ {i,j}} Δ(S) / |S|²`.
///
/// Symmetric; row `i` sums to the Shapley value of `i`.
pub fn shapley_matrix_exact<T: Scalar>(game: &TableGame<T>) -> SynergyMatrix<T> {
    let n = game.players();
    let dividends = harsanyi_dividends(game);
    let mut m = SynergyMatrix::filled(n, T::zero());
    for (s, d) in dividends.nonzero() {
        let size = T::from_usize(s.len());
        let share = d.clone() / (size.clone() * size);
        for i in s {
            for j in s {
                let cell = m.get_mut(i, j);
                *cell = cell.clone() + share.clone();
            }
        }
    }
    m
}
