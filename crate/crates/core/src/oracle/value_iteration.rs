use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TruncatedMdp;
use crate::error::{Error, Result};
use crate::model::{JointAction, SystemState};

/// Converged value function of a truncated MDP.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTable {
    pub values: Vec<f64>,
    pub iterations: usize,
    /// Sup-norm change of the final sweep.
    pub residual: f64,
    /// Sup-norm change of every sweep, in order.
    pub residuals: Vec<f64>,
}

impl ValueTable {
    pub fn value(&self, state: usize) -> f64 {
        self.values[state]
    }
}

fn q_slot(mdp: &TruncatedMdp, values: &[f64], state: usize, slot: usize) -> f64 {
    let expected: f64 = mdp.transitions(slot).iter().map(|&(j, p)| p * values[j]).sum();
    mdp.cost(state) + mdp.config().discount() * expected
}

/// Jacobi value iteration from `V = 0` until the sup-norm change of a sweep
/// drops below `tol`.
///
/// Each sweep reads the previous table and writes a fresh one, so states
/// are updated in parallel.
pub fn value_iteration(mdp: &TruncatedMdp, tol: f64) -> Result<ValueTable> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance {tol} must be positive")));
    }
    let mut values = vec![0.0; mdp.num_states()];
    let mut residuals = Vec::new();
    loop {
        let next: Vec<f64> = (0..mdp.num_states())
            .into_par_iter()
            .map(|s| {
                mdp.action_range(s)
                    .map(|slot| q_slot(mdp, &values, s, slot))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let residual = next.iter().zip(&values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        values = next;
        residuals.push(residual);
        if residual < tol {
            return Ok(ValueTable {
                values,
                iterations: residuals.len(),
                residual,
                residuals,
            });
        }
    }
}

/// `Q(a) = c(z) + beta E[V(next) | a]` for every feasible joint action at
/// `state`, in enumeration order.
pub fn q_values(mdp: &TruncatedMdp, table: &ValueTable, state: &SystemState) -> Result<Vec<(JointAction, f64)>> {
    let index = mdp
        .index_of(state)
        .ok_or_else(|| Error::InvalidState(format!("{state} is not in the truncated MDP")))?;
    Ok(q_values_at(mdp, &table.values, index))
}

pub(crate) fn q_values_at(mdp: &TruncatedMdp, values: &[f64], state: usize) -> Vec<(JointAction, f64)> {
    mdp.action_range(state)
        .map(|slot| (mdp.action(slot).clone(), q_slot(mdp, values, state, slot)))
        .collect()
}
