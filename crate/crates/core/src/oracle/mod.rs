//! Exact minimum-discrepancy search over integral assignments.
//!
//! Two objectives are supported: prefix discrepancy and interval
//! discrepancy. The branch-and-bound method walks columns left to right and
//! memoizes on the selected weight per row, which collapses to count vectors
//! when the weights repeat. Plain enumeration is kept as a cross-check.
//!
//! Methods implement [`OracleMethod`] and are looked up by name.

mod enumerate;
mod interval;
mod prefix;
mod verify;

pub use enumerate::Enumerate;
pub use verify::{verify_lower_bound, LowerBoundClaim, Verdict, VerifyReport};

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::assignment::{check_dims, FractionalAssignment, IntegralAssignment, SupportMask, WeightVector};
use crate::error::{Error, Result};
use crate::rounding::earliest_deadline_round;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    #[default]
    Prefix,
    Interval,
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::Prefix => write!(f, "prefix"),
            Objective::Interval => write!(f, "interval"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchConfig<S> {
    pub objective: Objective,
    pub support: Option<SupportMask>,
    /// Decision mode: is there an assignment with objective below this?
    pub threshold: Option<S>,
    /// Decision mode compares with `<=` instead of `<`.
    pub inclusive: bool,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub memoize: bool,
}

impl<S> Default for SearchConfig<S> {
    fn default() -> Self {
        SearchConfig {
            objective: Objective::Prefix,
            support: None,
            threshold: None,
            inclusive: false,
            node_limit: None,
            time_limit: None,
            memoize: true,
        }
    }
}

impl<S: Scalar> SearchConfig<S> {
    pub fn prefix() -> Self {
        Self::default()
    }

    pub fn interval() -> Self {
        SearchConfig {
            objective: Objective::Interval,
            ..Self::default()
        }
    }

    pub fn with_support(mut self, mask: SupportMask) -> Self {
        self.support = Some(mask);
        self
    }

    pub fn below(mut self, threshold: S) -> Self {
        self.threshold = Some(threshold);
        self.inclusive = false;
        self
    }

    pub fn at_most(mut self, threshold: S) -> Self {
        self.threshold = Some(threshold);
        self.inclusive = true;
        self
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    /// The threshold excludes every assignment: `< t` with `t <= 0`, or `<= t` with `t < 0`.
    pub(crate) fn unattainable(&self) -> bool {
        self.threshold
            .as_ref()
            .is_some_and(|t| *t < S::zero() || (!self.inclusive && t.is_zero()))
    }

    fn validate(&self, m: usize, n: usize) -> Result<()> {
        if let Some(mask) = &self.support {
            if (mask.m(), mask.n()) != (m, n) {
                return Err(Error::Dimension(format!(
                    "support mask is {}x{}, matrix is {m}x{n}",
                    mask.m(),
                    mask.n()
                )));
            }
        }
        Ok(())
    }

    fn allows(&self, i: usize, j: usize) -> bool {
        self.support.as_ref().is_none_or(|s| s.allows(i, j))
    }

    fn admits(&self, value: &S, threshold: &S) -> bool {
        if self.inclusive {
            value <= threshold
        } else {
            value < threshold
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    /// `value` is the optimum and `witness` attains it.
    Exact,
    /// Decision mode: `witness` beats the threshold.
    Yes,
    /// Decision mode: no assignment beats the threshold.
    No,
    /// A node or time limit stopped the search; nothing is certified.
    LimitReached,
}

#[derive(Debug, Clone)]
pub struct SearchResult<S> {
    pub status: SearchStatus,
    /// Objective of `witness`.
    pub value: Option<S>,
    pub witness: Option<IntegralAssignment>,
    /// Largest value known to be unattainable from below; set when a limit
    /// interrupts the interval optimization.
    pub lower_bound: Option<S>,
    pub nodes_explored: u64,
}

impl<S: Scalar> SearchResult<S> {
    pub(crate) fn trivial_no() -> Self {
        SearchResult {
            status: SearchStatus::No,
            value: None,
            witness: None,
            lower_bound: None,
            nodes_explored: 0,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "status": self.status,
            "value": self.value.as_ref().map(|v| v.to_json()),
            "witness": self.witness.as_ref().map(|w| w.to_one_based()),
            "lower_bound": self.lower_bound.as_ref().map(|v| v.to_json()),
            "nodes_explored": self.nodes_explored,
        })
    }
}

/// Node and time budget shared by one search.
pub(crate) struct Budget {
    nodes: u64,
    node_limit: Option<u64>,
    deadline: Option<Instant>,
}

/// Raised when the budget is exhausted.
#[derive(Debug)]
pub(crate) struct Exhausted;

impl Budget {
    pub(crate) fn new<S>(cfg: &SearchConfig<S>) -> Self {
        Budget {
            nodes: 0,
            node_limit: cfg.node_limit,
            deadline: cfg.time_limit.map(|t| Instant::now() + t),
        }
    }

    pub(crate) fn tick(&mut self) -> std::result::Result<(), Exhausted> {
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes > l) {
            return Err(Exhausted);
        }
        if self.nodes % 1024 == 0 && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Exhausted);
        }
        Ok(())
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes
    }
}

/// Shared read-only view of an instance.
pub(crate) struct Problem<'a, S> {
    pub m: usize,
    pub n: usize,
    pub d: &'a [S],
    /// `prefix[i][t]`: `P_{t+1}(i)`.
    pub prefix: Vec<Vec<S>>,
    pub cfg: &'a SearchConfig<S>,
}

impl<'a, S: Scalar> Problem<'a, S> {
    pub(crate) fn new(x: &FractionalAssignment<S>, d: &'a WeightVector<S>, cfg: &'a SearchConfig<S>) -> Result<Self> {
        check_dims(x, d, None)?;
        cfg.validate(x.m(), x.n())?;
        Ok(Problem {
            m: x.m(),
            n: x.n(),
            d: d.as_slice(),
            prefix: crate::rounding::prefix_sums(x, d),
            cfg,
        })
    }

    /// Rows allowed at column `j`, ordered by `P_{j+1}(i) - n[i]` descending.
    pub(crate) fn branch_order(&self, j: usize, selected: &[S]) -> Vec<usize> {
        let mut rows: Vec<usize> = (0..self.m).filter(|&i| self.cfg.allows(i, j)).collect();
        let deficit = |i: usize| self.prefix[i][j].clone() - selected[i].clone();
        rows.sort_by(|&a, &b| deficit(b).partial_cmp(&deficit(a)).unwrap_or(std::cmp::Ordering::Equal).then(a.cmp(&b)));
        rows
    }

    /// A first assignment: the Earliest Deadline output when it respects the support,
    /// otherwise the first allowed row per column.
    pub(crate) fn seed(&self, x: &FractionalAssignment<S>, d: &WeightVector<S>) -> Result<IntegralAssignment> {
        let y = earliest_deadline_round(x, d)?;
        if self.cfg.support.as_ref().is_none_or(|s| s.respects(&y)) {
            return Ok(y);
        }
        let rows = (0..self.n)
            .map(|j| (0..self.m).find(|&i| self.cfg.allows(i, j)).expect("mask allows a row per column"))
            .collect();
        IntegralAssignment::new(rows, self.m)
    }
}

/// Objective value of `y`.
pub fn objective_value<S: Scalar>(
    objective: Objective,
    x: &FractionalAssignment<S>,
    y: &IntegralAssignment,
    d: &WeightVector<S>,
) -> Result<S> {
    Ok(match objective {
        Objective::Prefix => crate::discrepancy::prefix_discrepancy(x, y, d)?.max_prefix_abs,
        Objective::Interval => {
            crate::discrepancy::interval_discrepancy(x, y, d)?
                .interval
                .expect("interval fields requested")
                .value
        }
    })
}

/// A search strategy.
pub trait OracleMethod<S: Scalar>: Send + Sync {
    fn name(&self) -> &'static str;
    fn search(&self, x: &FractionalAssignment<S>, d: &WeightVector<S>, cfg: &SearchConfig<S>) -> Result<SearchResult<S>>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BranchAndBound;

impl<S: Scalar> OracleMethod<S> for BranchAndBound {
    fn name(&self) -> &'static str {
        "branch-and-bound"
    }

    fn search(&self, x: &FractionalAssignment<S>, d: &WeightVector<S>, cfg: &SearchConfig<S>) -> Result<SearchResult<S>> {
        match cfg.objective {
            Objective::Prefix => prefix::search(x, d, cfg),
            Objective::Interval => interval::search(x, d, cfg),
        }
    }
}

pub const ORACLES: &[&str] = &["branch-and-bound", "enumerate"];

pub fn oracles<S: Scalar>() -> Vec<Box<dyn OracleMethod<S>>> {
    vec![Box::new(BranchAndBound), Box::new(Enumerate::default())]
}

pub fn oracle_by_name<S: Scalar>(name: &str) -> Result<Box<dyn OracleMethod<S>>> {
    oracles()
        .into_iter()
        .find(|o| o.name() == name)
        .ok_or_else(|| Error::unknown("oracle", name, ORACLES))
}

/// Minimum prefix discrepancy by branch and bound (`cfg.objective` is ignored).
pub fn exact_min_prefix_discrepancy<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    cfg: &SearchConfig<S>,
) -> Result<SearchResult<S>> {
    prefix::search(x, d, cfg)
}

/// Minimum interval discrepancy by branch and bound (`cfg.objective` is ignored).
pub fn exact_min_interval_discrepancy<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    cfg: &SearchConfig<S>,
) -> Result<SearchResult<S>> {
    interval::search(x, d, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_caplb, gen_random, RandomSpec};
    use crate::rounding::earliest_deadline_round;
    use crate::scalar::Rational;

    fn both(x: &FractionalAssignment<Rational>, d: &WeightVector<Rational>, cfg: &SearchConfig<Rational>) {
        let bb = BranchAndBound.search(x, d, cfg).unwrap();
        let en = Enumerate::default().search(x, d, cfg).unwrap();
        assert_eq!(bb.status, en.status);
        assert_eq!(bb.value, en.value);
        if let Some(w) = &bb.witness {
            let v = objective_value(cfg.objective, x, w, d).unwrap();
            assert_eq!(Some(v), bb.value);
            assert!(cfg.support.as_ref().is_none_or(|s| s.respects(w)));
        }
    }

    #[test]
    fn single_column_closed_form() {
        // Choosing row i costs max(1 - x_i, max_{k != i} x_k) times d.
        let x = FractionalAssignment::<Rational>::from_ratios(&[vec![(1, 5)], vec![(3, 10)], vec![(1, 2)]]).unwrap();
        let d = WeightVector::new(vec![Rational::ratio(3, 2)]).unwrap();
        let v: Vec<Rational> = (0..3).map(|i| x.get(i, 0).clone()).collect();
        let expected = (0..3)
            .map(|i| {
                let others = (0..3).filter(|&k| k != i).map(|k| v[k].clone()).fold(Rational::zero(), Scalar::max_of);
                Scalar::max_of(Rational::one() - v[i].clone(), others) * d.get(0).clone()
            })
            .fold(None, |acc: Option<Rational>, c| Some(acc.map_or(c.clone(), |a| Scalar::min_of(a, c))))
            .unwrap();
        for cfg in [SearchConfig::prefix(), SearchConfig::interval()] {
            let r = BranchAndBound.search(&x, &d, &cfg).unwrap();
            assert_eq!(r.status, SearchStatus::Exact);
            assert_eq!(r.value, Some(expected.clone()));
        }
    }

    #[test]
    fn integral_input_has_zero_optimum() {
        let y = IntegralAssignment::new(vec![2, 0, 1, 1], 3).unwrap();
        let x = FractionalAssignment::<Rational>::from_integral(&y, 3);
        let d = WeightVector::ones(4);
        for cfg in [SearchConfig::prefix(), SearchConfig::interval()] {
            let r = BranchAndBound.search(&x, &d, &cfg).unwrap();
            assert_eq!(r.value, Some(Rational::zero()));
            assert_eq!(r.witness.as_ref(), Some(&y));
        }
    }

    #[test]
    fn matches_enumeration_on_random_instances() {
        for seed in 0..25 {
            let mut spec = RandomSpec::new(2 + seed as usize % 2, 3 + seed as usize % 5, seed);
            if seed % 3 == 0 {
                spec.support_density = Some(0.6);
            }
            let (x, d, mask) = gen_random::<Rational>(&spec).unwrap();
            for mut cfg in [SearchConfig::prefix(), SearchConfig::interval()] {
                cfg.support = mask.clone();
                both(&x, &d, &cfg);
                let mut plain = cfg.clone();
                plain.memoize = false;
                both(&x, &d, &plain);
            }
        }
    }

    #[test]
    fn dominates_earliest_deadline() {
        for seed in 0..20 {
            let (x, d, _) = gen_random::<Rational>(&RandomSpec::new(3, 8, seed)).unwrap();
            let y = earliest_deadline_round(&x, &d).unwrap();
            let alg = objective_value(Objective::Prefix, &x, &y, &d).unwrap();
            let r = exact_min_prefix_discrepancy(&x, &d, &SearchConfig::prefix()).unwrap();
            assert!(r.value.unwrap() <= alg);
        }
    }

    #[test]
    fn decision_brackets_optimum() {
        let (x, d) = gen_caplb::<Rational>(4).unwrap();
        let opt = Rational::ratio(5, 6);
        let tiny = Rational::ratio(1, 1_000_000);
        for cfg in [SearchConfig::prefix(), SearchConfig::interval()] {
            let r = BranchAndBound.search(&x, &d, &cfg).unwrap();
            let v = r.value.unwrap();
            if cfg.objective == Objective::Prefix {
                assert_eq!(v, opt);
            }
            let no = BranchAndBound.search(&x, &d, &cfg.clone().below(v.clone())).unwrap();
            assert_eq!(no.status, SearchStatus::No);
            let no = BranchAndBound.search(&x, &d, &cfg.clone().at_most(v.clone() - tiny.clone())).unwrap();
            assert_eq!(no.status, SearchStatus::No);
            let yes = BranchAndBound.search(&x, &d, &cfg.clone().at_most(v.clone())).unwrap();
            assert_eq!(yes.status, SearchStatus::Yes);
            let yes = BranchAndBound.search(&x, &d, &cfg.clone().below(v + tiny.clone())).unwrap();
            assert_eq!(yes.status, SearchStatus::Yes);
        }
    }

    #[test]
    fn node_limit_is_inconclusive() {
        let (x, d, _) = gen_random::<Rational>(&RandomSpec::new(3, 12, 1)).unwrap();
        for cfg in [SearchConfig::prefix(), SearchConfig::interval()] {
            let r = BranchAndBound.search(&x, &d, &cfg.with_node_limit(3)).unwrap();
            assert_eq!(r.status, SearchStatus::LimitReached);
        }
    }

    #[test]
    fn registry() {
        let names: Vec<_> = oracles::<f64>().iter().map(|o| o.name()).collect();
        assert_eq!(names, ORACLES);
        assert!(oracle_by_name::<f64>("milp").is_err());
    }
}
