//! Greedy integer payoffs for games too large for a full table.
//!
//! Starting from (estimated) Shapley values `φ` and the Shapley value matrix,
//! units are granted one at a time to the player with the highest remaining
//! `φ_i`. A player holding more than one unit of value simply pays 1. A
//! player below 1 is zeroed and the shortfall `1 − φ_i` is charged to the
//! others: a fraction `α` in proportion to their synergy `φ_ij` with `i`, the
//! rest split evenly.

use num_traits::Float;
use thiserror::Error;

use crate::approx::{sample_shapley, sample_shapley_matrix, SampleError, SamplerConfig, ValueOracle};
use crate::matrix::SynergyMatrix;
use crate::IntVector;

/// Mixing weight used when none is given.
pub const DEFAULT_ALPHA: f64 = 0.5;

/// Residual tolerated before the normalized total is patched on the largest
/// entry.
pub const NORMALIZATION_RESIDUE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LargeError {
    #[error("expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(String),
    #[error("shifted attributions sum to zero; cannot rescale")]
    DegenerateTotal,
    #[error("target total must be positive")]
    NonPositiveTarget,
    #[error("at least one player is required")]
    NoPlayers,
    #[error("number of units to grant must be at least 1")]
    ZeroUnits,
    #[error(transparent)]
    Sampling(#[from] SampleError),
}

/// Shifts attributions to be nonnegative and rescales them to `target`.
///
/// The shift `c = max(0, −min φ)` is added to every `φ_i` and to the matrix
/// diagonal; then everything is multiplied by `target / Σ(φ_i + c)`.
pub fn normalize_attributions<F: Float>(
    phi: &[F],
    matrix: &SynergyMatrix<F>,
    target: F,
) -> Result<(Vec<F>, SynergyMatrix<F>), LargeError> {
    let n = phi.len();
    if n == 0 {
        return Err(LargeError::NoPlayers);
    }
    if matrix.size() != n {
        return Err(LargeError::LengthMismatch {
            expected: n,
            found: matrix.size(),
        });
    }
    if target <= F::zero() {
        return Err(LargeError::NonPositiveTarget);
    }
    let min = phi.iter().copied().fold(F::infinity(), F::min);
    let shift = (-min).max(F::zero());
    let shifted_total = phi.iter().fold(F::zero(), |acc, &x| acc + x + shift);
    if shifted_total == F::zero() {
        return Err(LargeError::DegenerateTotal);
    }
    let scale = target / shifted_total;
    let mut scaled: Vec<F> = phi.iter().map(|&x| (x + shift) * scale).collect();
    let mut m = matrix.clone();
    for i in 0..n {
        let d = m.get_mut(i, i);
        *d = *d + shift;
    }
    for x in m.entries_mut() {
        *x = *x * scale;
    }

    let residue = scaled.iter().fold(F::zero(), |acc, &x| acc + x) - target;
    if residue != F::zero() && residue.abs() <= F::from(NORMALIZATION_RESIDUE).unwrap_or(F::epsilon()) {
        let largest = argmax(&scaled);
        scaled[largest] = scaled[largest] - residue;
    }
    Ok((scaled, m))
}

/// Index of the largest entry; ties go to the lowest index.
fn argmax<F: Float>(values: &[F]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (i, &x)| if x > values[best] { i } else { best })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrantStep<F> {
    pub player: usize,
    /// `φ` after the step.
    pub phi: Vec<F>,
}

/// Working state of the greedy procedure.
#[derive(Clone, Debug)]
pub struct AttributionState<'a, F> {
    phi: Vec<F>,
    synergy: &'a SynergyMatrix<F>,
    granted: IntVector,
    total: u64,
    alpha: F,
}

impl<'a, F: Float> AttributionState<'a, F> {
    pub fn new(phi: &[F], synergy: &'a SynergyMatrix<F>, total: u64, alpha: F) -> Result<Self, LargeError> {
        if synergy.size() != phi.len() {
            return Err(LargeError::LengthMismatch {
                expected: phi.len(),
                found: synergy.size(),
            });
        }
        if phi.is_empty() {
            return Err(LargeError::NoPlayers);
        }
        if !(alpha >= F::zero() && alpha <= F::one()) {
            return Err(LargeError::AlphaOutOfRange(format!("{:?}", alpha.to_f64())));
        }
        Ok(AttributionState {
            phi: phi.to_vec(),
            synergy,
            granted: vec![0; phi.len()],
            total,
            alpha,
        })
    }

    pub fn phi(&self) -> &[F] {
        &self.phi
    }

    pub fn granted(&self) -> &[i64] {
        &self.granted
    }

    pub fn is_finished(&self) -> bool {
        self.granted.iter().sum::<i64>() as u64 >= self.total
    }

    /// Grants one unit and returns the recipient.
    pub fn step(&mut self) -> Option<usize> {
        if self.is_finished() {
            return None;
        }
        let n = self.phi.len();
        let i = argmax(&self.phi);
        self.granted[i] += 1;
        let phi_i = self.phi[i];
        if phi_i > F::one() {
            self.phi[i] = phi_i - F::one();
            return Some(i);
        }
        let deficit = F::one() - phi_i;
        if n > 1 {
            let others = F::from(n - 1).expect("player count as float");
            let row_sum = (0..n)
                .filter(|&k| k != i)
                .fold(F::zero(), |acc, k| acc + *self.synergy.get(i, k));
            // A nonpositive synergy total leaves only the even split.
            let (alpha, row_sum) = if row_sum > F::zero() {
                (self.alpha, row_sum)
            } else {
                (F::zero(), F::one())
            };
            for j in (0..n).filter(|&j| j != i) {
                let weight = alpha * *self.synergy.get(i, j) / row_sum + (F::one() - alpha) / others;
                self.phi[j] = self.phi[j] - deficit * weight;
            }
        }
        self.phi[i] = F::zero();
        Some(i)
    }

    pub fn into_grants(self) -> IntVector {
        self.granted
    }
}

/// Runs the greedy procedure to completion and records every step.
pub fn isv_large_traced<F: Float>(
    phi: &[F],
    synergy: &SynergyMatrix<F>,
    total: u64,
    alpha: F,
) -> Result<(IntVector, Vec<GrantStep<F>>), LargeError> {
    let mut state = AttributionState::new(phi, synergy, total, alpha)?;
    let mut steps = Vec::with_capacity(total as usize);
    while let Some(player) = state.step() {
        steps.push(GrantStep {
            player,
            phi: state.phi.clone(),
        });
    }
    Ok((state.into_grants(), steps))
}

pub fn isv_large<F: Float>(
    phi: &[F],
    synergy: &SynergyMatrix<F>,
    total: u64,
    alpha: F,
) -> Result<IntVector, LargeError> {
    isv_large_traced(phi, synergy, total, alpha).map(|(grants, _)| grants)
}

/// Estimates attributions from an oracle, rescales them to `units` and runs
/// the greedy procedure.
pub fn select_top_k<F, O>(oracle: &O, units: u64, cfg: &SamplerConfig, alpha: F) -> Result<IntVector, LargeError>
where
    F: Float + Send + Sync,
    O: ValueOracle<F> + ?Sized,
{
    if units == 0 {
        return Err(LargeError::ZeroUnits);
    }
    let phi = sample_shapley(oracle, cfg)?;
    let matrix = sample_shapley_matrix(oracle, cfg)?;
    let target = F::from(units).expect("unit count as float");
    let (phi, matrix) = normalize_attributions(&phi, &matrix, target)?;
    isv_large(&phi, &matrix, units, alpha)
}
