//! Branch and bound for the prefix objective.
//!
//! After `t` columns the future only depends on the selected weight per row,
//! so `future(t, N, bound)` returns the best achievable
//! `max_{t' > t, i} |delta_{t'}(i)|` when it is below `bound`. Results are
//! memoized as exact values (with the optimal continuation) or as lower
//! bounds when the search under some bound failed.

use std::collections::HashMap;
use std::rc::Rc;

use crate::assignment::{FractionalAssignment, IntegralAssignment, WeightVector};
use crate::error::Result;
use crate::scalar::Scalar;

use super::{objective_value, Budget, Exhausted, Objective, Problem, SearchConfig, SearchResult, SearchStatus};

pub(crate) struct Step {
    row: usize,
    next: Path,
}

pub(crate) type Path = Option<Rc<Step>>;

pub(crate) fn path_rows(mut path: &Path) -> Vec<usize> {
    let mut rows = Vec::new();
    while let Some(step) = path {
        rows.push(step.row);
        path = &step.next;
    }
    rows
}

pub(crate) fn cons(row: usize, next: Path) -> Path {
    Some(Rc::new(Step { row, next }))
}

enum Memo<S> {
    Exact(S, Path),
    AtLeast(S),
}

type Key<S> = (usize, Vec<<S as Scalar>::Key>);

struct Search<'a, S: Scalar> {
    p: &'a Problem<'a, S>,
    budget: Budget,
    memo: HashMap<Key<S>, Memo<S>>,
}

impl<S: Scalar> Search<'_, S> {
    fn key(&self, t: usize, selected: &[S]) -> Key<S> {
        (t, selected.iter().map(Scalar::key).collect())
    }

    fn future(&mut self, t: usize, selected: &mut Vec<S>, bound: Option<&S>) -> Result<Option<(S, Path)>, Exhausted> {
        if t == self.p.n {
            let zero = S::zero();
            return Ok(bound.is_none_or(|b| zero < *b).then_some((zero, None)));
        }
        let key = self.p.cfg.memoize.then(|| self.key(t, selected));
        if let Some(k) = &key {
            match self.memo.get(k) {
                Some(Memo::Exact(v, path)) => {
                    return Ok(bound.is_none_or(|b| v < b).then(|| (v.clone(), path.clone())));
                }
                Some(Memo::AtLeast(lb)) if bound.is_some_and(|b| b <= lb) => return Ok(None),
                _ => {}
            }
        }
        self.budget.tick()?;

        let mut cur: Option<S> = bound.cloned();
        let mut best: Option<(S, Path)> = None;
        let dt = self.p.d[t].clone();
        for i in self.p.branch_order(t, selected) {
            let saved = selected[i].clone();
            selected[i] += dt.clone();
            let cost = (0..self.p.m)
                .map(|k| (self.p.prefix[k][t].clone() - selected[k].clone()).abs())
                .fold(S::zero(), S::max_of);
            if cur.as_ref().is_none_or(|b| cost < *b) {
                if let Some((v, path)) = self.future(t + 1, selected, cur.as_ref())? {
                    let total = S::max_of(cost, v);
                    cur = Some(total.clone());
                    best = Some((total, cons(i, path)));
                }
            }
            selected[i] = saved;
        }

        if let Some(k) = key {
            match &best {
                Some((v, path)) => {
                    self.memo.insert(k, Memo::Exact(v.clone(), path.clone()));
                }
                None => {
                    if let Some(b) = bound {
                        self.memo.insert(k, Memo::AtLeast(b.clone()));
                    }
                }
            }
        }
        Ok(best)
    }
}

pub(crate) fn search<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    cfg: &SearchConfig<S>,
) -> Result<SearchResult<S>> {
    let p = Problem::new(x, d, cfg)?;
    if cfg.unattainable() {
        return Ok(SearchResult::trivial_no());
    }
    let seed = p.seed(x, d)?;
    let seed_value = objective_value(Objective::Prefix, x, &seed, d)?;
    let mut s = Search {
        p: &p,
        budget: Budget::new(cfg),
        memo: HashMap::new(),
    };
    let mut selected = vec![S::zero(); p.m];

    let witness_of = |path: &Path| IntegralAssignment::from_vec_unchecked(path_rows(path));
    let result = |status, value: Option<S>, witness: Option<IntegralAssignment>, nodes| SearchResult {
        status,
        value,
        witness,
        lower_bound: None,
        nodes_explored: nodes,
    };

    match &cfg.threshold {
        Some(threshold) if !cfg.inclusive => {
            if seed_value < *threshold {
                return Ok(result(SearchStatus::Yes, Some(seed_value), Some(seed), 0));
            }
            Ok(match s.future(0, &mut selected, Some(threshold)) {
                Ok(Some((v, path))) => result(SearchStatus::Yes, Some(v), Some(witness_of(&path)), s.budget.nodes()),
                Ok(None) => result(SearchStatus::No, None, None, s.budget.nodes()),
                Err(Exhausted) => result(SearchStatus::LimitReached, None, None, s.budget.nodes()),
            })
        }
        _ => {
            let (status, value, witness) = match s.future(0, &mut selected, Some(&seed_value)) {
                Ok(Some((v, path))) => (SearchStatus::Exact, v, witness_of(&path)),
                Ok(None) => (SearchStatus::Exact, seed_value, seed),
                Err(Exhausted) => (SearchStatus::LimitReached, seed_value, seed),
            };
            let nodes = s.budget.nodes();
            Ok(match (&cfg.threshold, status) {
                (Some(t), SearchStatus::Exact) if value <= *t => result(SearchStatus::Yes, Some(value), Some(witness), nodes),
                (Some(_), SearchStatus::Exact) => result(SearchStatus::No, None, None, nodes),
                (Some(_), _) => result(SearchStatus::LimitReached, None, None, nodes),
                (None, _) => result(status, Some(value), Some(witness), nodes),
            })
        }
    }
}
