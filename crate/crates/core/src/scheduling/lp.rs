//! LP relaxation of maximum flow-time scheduling with restricted assignment:
//!
//! ```text
//! min T
//! s.t. sum_i x_ij = 1                                  for every job j
//!      sum_{j=s..t} x_ij d_j <= (r_t - r_s) + T        for every machine i, s <= t
//!      x >= 0,  x_ij = 0 when job j cannot run on i
//! ```
//!
//! Only admissible `(i, j)` pairs get a variable. The default method starts
//! from the coverage rows and the single-job rows `s = t`, then repeatedly
//! adds the most violated interval row (ties broken by smallest `(i, s, t)`)
//! and re-optimizes with dual simplex until no row is violated.

use std::collections::HashSet;

use serde::Serialize;

use crate::assignment::{FractionalAssignment, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::simplex::{Constraint, Sense, Tableau};
use super::SchedulingInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LpMethod {
    #[default]
    ConstraintGeneration,
    /// Every interval row up front; meant for cross-checking small instances.
    Full,
}

/// Interval row `(machine, start, end)`, zero-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct IntervalRow {
    pub machine: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone)]
pub struct LpSolution<S> {
    /// Optimal `T`.
    pub value: S,
    pub x: FractionalAssignment<S>,
    /// Interval rows that are tight at the optimum.
    pub certificate: Vec<IntervalRow>,
    /// Number of separation rounds (zero for the full method).
    pub rounds: usize,
    pub pivots: usize,
}

struct Layout {
    /// Column of `x_ij`, if admissible; column 0 is `T`.
    var: Vec<Option<usize>>,
    n: usize,
    n_vars: usize,
}

impl Layout {
    fn new<S: Scalar>(inst: &SchedulingInstance<S>) -> Self {
        let (m, n) = (inst.m(), inst.n());
        let mut var = vec![None; m * n];
        let mut next = 1;
        for i in 0..m {
            for j in 0..n {
                if inst.admits(i, j) {
                    var[i * n + j] = Some(next);
                    next += 1;
                }
            }
        }
        Layout { var, n, n_vars: next }
    }

    fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.var[i * self.n + j]
    }
}

fn interval_row<S: Scalar>(inst: &SchedulingInstance<S>, layout: &Layout, row: IntervalRow) -> Option<(Vec<(usize, S)>, S)> {
    let jobs = inst.jobs();
    let mut terms: Vec<(usize, S)> = (row.start..=row.end)
        .filter_map(|j| layout.get(row.machine, j).map(|v| (v, jobs[j].processing.clone())))
        .collect();
    if terms.is_empty() {
        return None;
    }
    terms.push((0, -S::one()));
    Some((terms, jobs[row.end].release.clone() - jobs[row.start].release.clone()))
}

/// Largest violation `sum_{[s,t]} x_ij d_j - (r_t - r_s) - T` over all
/// interval rows, with the lexicographically smallest maximizer. O(mn^2).
pub fn most_violated<S: Scalar>(inst: &SchedulingInstance<S>, x: &FractionalAssignment<S>, t_value: &S) -> (S, IntervalRow) {
    let jobs = inst.jobs();
    let mut best: Option<(S, IntervalRow)> = None;
    for i in 0..inst.m() {
        let mut load_before = Vec::with_capacity(inst.n() + 1);
        let mut acc = S::zero();
        load_before.push(acc.clone());
        for j in 0..inst.n() {
            acc += x.get(i, j).clone() * jobs[j].processing.clone();
            load_before.push(acc.clone());
        }
        for s in 0..inst.n() {
            for t in s..inst.n() {
                let v = load_before[t + 1].clone()
                    - load_before[s].clone()
                    - (jobs[t].release.clone() - jobs[s].release.clone())
                    - t_value.clone();
                if best.as_ref().is_none_or(|(b, _)| v > *b) {
                    best = Some((v, IntervalRow { machine: i, start: s, end: t }));
                }
            }
        }
    }
    best.expect("instance has machines and jobs")
}

pub fn solve_lp<S: Scalar>(inst: &SchedulingInstance<S>) -> Result<LpSolution<S>> {
    solve_lp_with(inst, LpMethod::ConstraintGeneration)
}

pub fn solve_lp_with<S: Scalar>(inst: &SchedulingInstance<S>, method: LpMethod) -> Result<LpSolution<S>> {
    let (m, n) = (inst.m(), inst.n());
    let layout = Layout::new(inst);
    let mut constraints = Vec::new();
    let mut rows: Vec<Option<IntervalRow>> = Vec::new();
    for j in 0..n {
        let terms: Vec<(usize, S)> = (0..m).filter_map(|i| layout.get(i, j).map(|v| (v, S::one()))).collect();
        if terms.is_empty() {
            return Err(Error::Infeasible(format!("job {} has no open machine", j + 1)));
        }
        constraints.push(Constraint { terms, sense: Sense::Eq, rhs: S::one() });
        rows.push(None);
    }
    let mut added = HashSet::new();
    let span = match method {
        LpMethod::ConstraintGeneration => 0,
        LpMethod::Full => n,
    };
    for i in 0..m {
        for s in 0..n {
            for t in s..n.min(s + span.max(1)) {
                let row = IntervalRow { machine: i, start: s, end: t };
                if let Some((terms, rhs)) = interval_row(inst, &layout, row) {
                    constraints.push(Constraint { terms, sense: Sense::Le, rhs });
                    rows.push(Some(row));
                    added.insert(row);
                }
            }
        }
    }

    let mut cost = vec![S::zero(); layout.n_vars];
    cost[0] = S::one();
    let mut tab = Tableau::solve(layout.n_vars, &cost, &constraints)?;

    let scale = S::max_of(S::one(), inst.d_max());
    let threshold = S::slack() * scale;
    let mut rounds = 0;
    let x = loop {
        let values = tab.solution();
        let x = extract(inst, &layout, &values)?;
        if method == LpMethod::Full {
            break x;
        }
        let (violation, row) = most_violated(inst, &x, &values[0]);
        if violation <= threshold || !added.insert(row) {
            break x;
        }
        let (terms, rhs) = interval_row(inst, &layout, row)
            .ok_or_else(|| Error::Internal("violated row without variables".into()))?;
        tab.add_le(&terms, rhs)?;
        rows.push(Some(row));
        rounds += 1;
    };

    let mut certificate: Vec<IntervalRow> = rows
        .iter()
        .enumerate()
        .filter_map(|(k, r)| r.filter(|_| tab.slack(k) <= threshold))
        .collect();
    certificate.sort();
    Ok(LpSolution {
        value: tab.objective(),
        x,
        certificate,
        rounds,
        pivots: tab.pivots(),
    })
}

/// Builds the assignment matrix; float noise is clamped and columns renormalized.
fn extract<S: Scalar>(inst: &SchedulingInstance<S>, layout: &Layout, values: &[S]) -> Result<FractionalAssignment<S>> {
    let (m, n) = (inst.m(), inst.n());
    let mut matrix = Matrix::from_fn(m, n, |i, j| match layout.get(i, j) {
        Some(v) if values[v] > S::zero() => values[v].clone(),
        _ => S::zero(),
    });
    if !S::is_exact() {
        let sums: Vec<S> = (0..n).map(|j| matrix.column(j).fold(S::zero(), |a, v| a + v.clone())).collect();
        matrix = Matrix::from_fn(m, n, |i, j| matrix.get(i, j).clone() / sums[j].clone());
    }
    FractionalAssignment::new(matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rounding::ClosingTime;
    use crate::scalar::Rational;
    use crate::scheduling::Job;

    fn inst<S: Scalar>(m: usize, jobs: &[(i64, i64)]) -> SchedulingInstance<S> {
        SchedulingInstance::new(
            vec![ClosingTime::Never; m],
            jobs.iter().map(|&(r, d)| Job::new(S::from_i64(r), S::from_i64(d))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_machine_two_jobs() {
        let lp = solve_lp(&inst::<Rational>(1, &[(0, 1), (0, 1)])).unwrap();
        assert_eq!(lp.value, Rational::from_i64(2));
        assert!(lp.certificate.contains(&IntervalRow { machine: 0, start: 0, end: 1 }));
    }

    #[test]
    fn one_job_split_across_machines() {
        for m in 1..5 {
            let lp = solve_lp(&inst::<Rational>(m, &[(0, 3)])).unwrap();
            assert_eq!(lp.value, Rational::ratio(3, m as i64));
        }
    }

    #[test]
    fn closed_machine_gets_nothing() {
        let machines = vec![ClosingTime::At(Rational::zero()), ClosingTime::Never];
        let jobs = vec![Job::new(Rational::zero(), Rational::one()), Job::new(Rational::one(), Rational::one())];
        let inst = SchedulingInstance::new(machines, jobs).unwrap();
        let lp = solve_lp(&inst).unwrap();
        assert!(lp.x.get(0, 1).is_zero());
        // The second job is forced onto machine 2 alone.
        assert_eq!(lp.value, Rational::one());
    }

    #[test]
    fn full_and_generated_agree() {
        for seed in 0..15 {
            let inst = crate::instances::gen_random_schedule::<Rational>(&crate::instances::ScheduleSpec { m: 3, n: 7, seed }).unwrap();
            let a = solve_lp_with(&inst, LpMethod::ConstraintGeneration).unwrap();
            let b = solve_lp_with(&inst, LpMethod::Full).unwrap();
            assert_eq!(a.value, b.value, "seed {seed}");
            let (violation, _) = most_violated(&inst, &a.x, &a.value);
            assert!(violation <= Rational::zero());
        }
    }
}
