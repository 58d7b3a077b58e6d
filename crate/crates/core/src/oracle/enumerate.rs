use crate::assignment::{FractionalAssignment, IntegralAssignment, WeightVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::{objective_value, Budget, OracleMethod, Problem, SearchConfig, SearchResult, SearchStatus};

/// Evaluates every assignment in lexicographic order. Refuses instances with
/// more than `max_assignments` candidates unless a node limit is set.
#[derive(Debug, Clone, Copy)]
pub struct Enumerate {
    pub max_assignments: u64,
}

impl Default for Enumerate {
    fn default() -> Self {
        Enumerate {
            max_assignments: 10_000_000,
        }
    }
}

impl<S: Scalar> OracleMethod<S> for Enumerate {
    fn name(&self) -> &'static str {
        "enumerate"
    }

    fn search(&self, x: &FractionalAssignment<S>, d: &WeightVector<S>, cfg: &SearchConfig<S>) -> Result<SearchResult<S>> {
        let p = Problem::new(x, d, cfg)?;
        if cfg.unattainable() {
            return Ok(SearchResult::trivial_no());
        }
        let choices: Vec<Vec<usize>> = (0..p.n).map(|j| (0..p.m).filter(|&i| cfg.allows(i, j)).collect()).collect();
        let total = choices
            .iter()
            .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
            .unwrap_or(u64::MAX);
        if total > self.max_assignments && cfg.node_limit.is_none() {
            return Err(Error::Invalid(format!(
                "{total} assignments exceed the enumeration cap of {}",
                self.max_assignments
            )));
        }

        let mut budget = Budget::new(cfg);
        let mut digits = vec![0usize; p.n];
        let mut best: Option<(S, IntegralAssignment)> = None;
        loop {
            if budget.tick().is_err() {
                return Ok(SearchResult {
                    status: SearchStatus::LimitReached,
                    value: best.as_ref().map(|b| b.0.clone()),
                    witness: best.map(|b| b.1),
                    lower_bound: None,
                    nodes_explored: budget.nodes(),
                });
            }
            let y = IntegralAssignment::from_vec_unchecked(digits.iter().enumerate().map(|(j, &k)| choices[j][k]).collect());
            let v = objective_value(cfg.objective, x, &y, d)?;
            if let Some(t) = &cfg.threshold {
                if cfg.admits(&v, t) {
                    return Ok(SearchResult {
                        status: SearchStatus::Yes,
                        value: Some(v),
                        witness: Some(y),
                        lower_bound: None,
                        nodes_explored: budget.nodes(),
                    });
                }
            } else if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, y));
            }

            // Odometer increment, last column fastest.
            let mut j = p.n;
            loop {
                if j == 0 {
                    let status = if cfg.threshold.is_some() { SearchStatus::No } else { SearchStatus::Exact };
                    return Ok(SearchResult {
                        status,
                        value: best.as_ref().map(|b| b.0.clone()),
                        witness: best.map(|b| b.1),
                        lower_bound: None,
                        nodes_explored: budget.nodes(),
                    });
                }
                j -= 1;
                digits[j] += 1;
                if digits[j] < choices[j].len() {
                    break;
                }
                digits[j] = 0;
            }
        }
    }
}
