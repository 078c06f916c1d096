//! Factorization of a bound product `s = x_1 ⊙ … ⊙ x_F` when each factor is
//! known to come from its own codebook.
//!
//! Every factor estimate starts as the normalized superposition of its whole
//! codebook. One iteration replaces each estimate, from the previous
//! iteration's estimates only, with
//! `sign(project(cb_f, s ⊙ Π_{g≠f} x̂_g))`. Iteration stops at an exact fixed
//! point or after `max_iters`. A result is reported as converged only when
//! rebinding the cleaned-up factors reproduces `s` bit for bit.

use crate::error::{check_dims, HdError, Result};
use crate::exec::Exec;
use crate::hv::Hypervector;
use crate::memory::ItemMemory;

pub const DEFAULT_MAX_ITERS: usize = 200;

#[derive(Clone, Debug)]
pub struct ResonatorProblem {
    pub input: Hypervector,
    pub codebooks: Vec<ItemMemory>,
    pub max_iters: usize,
    /// Keep a snapshot of every iteration's estimates in the result.
    pub record_trajectory: bool,
}

impl ResonatorProblem {
    pub fn new(input: Hypervector, codebooks: Vec<ItemMemory>) -> Result<Self> {
        let p = ResonatorProblem {
            input,
            codebooks,
            max_iters: DEFAULT_MAX_ITERS,
            record_trajectory: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_trajectory(mut self) -> Self {
        self.record_trajectory = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.codebooks.len() < 2 {
            return Err(HdError::InvalidArgument(format!(
                "need at least 2 codebooks, got {}",
                self.codebooks.len()
            )));
        }
        if self.max_iters == 0 {
            return Err(HdError::InvalidArgument("max_iters must be positive".into()));
        }
        for cb in &self.codebooks {
            check_dims(self.input.dim(), cb.dim())?;
            if cb.is_empty() {
                return Err(HdError::EmptyMemory);
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResonatorResult {
    pub factors: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
    /// `trajectory[t][f]` is the estimate of factor `f` after iteration `t + 1`.
    pub trajectory: Option<Vec<Vec<Hypervector>>>,
}

pub fn factorize(p: &ResonatorProblem) -> Result<ResonatorResult> {
    factorize_with(p, Exec::Sequential)
}

/// [`factorize`] with the per-factor updates of each iteration spread over
/// `exec`. The result does not depend on the policy.
pub fn factorize_with(p: &ResonatorProblem, exec: Exec) -> Result<ResonatorResult> {
    p.validate()?;
    let mut estimates = p
        .codebooks
        .iter()
        .map(ItemMemory::superposition)
        .collect::<Result<Vec<_>>>()?;
    let mut trajectory = p.record_trajectory.then(Vec::new);
    let mut iterations = 0;
    let mut fixed = false;

    while iterations < p.max_iters && !fixed {
        let next = exec.try_map(p.codebooks.len(), |f| {
            let mut query = p.input.clone();
            for (g, x) in estimates.iter().enumerate() {
                if g != f {
                    query = query.bind_unchecked(x);
                }
            }
            let cb = &p.codebooks[f];
            cb.project(&query)?.normalize(cb.tie_break())
        })?;
        iterations += 1;
        fixed = next == estimates;
        estimates = next;
        if let Some(t) = trajectory.as_mut() {
            t.push(estimates.clone());
        }
    }

    let mut factors = Vec::with_capacity(estimates.len());
    let mut rebound = Hypervector::ones(p.input.dim())?;
    for (cb, x) in p.codebooks.iter().zip(&estimates) {
        let hit = cb.cleanup(x)?;
        rebound = rebound.bind_unchecked(hit.vector);
        factors.push(hit.name.to_string());
    }
    Ok(ResonatorResult {
        factors,
        converged: fixed && rebound == p.input,
        iterations,
        trajectory,
    })
}
