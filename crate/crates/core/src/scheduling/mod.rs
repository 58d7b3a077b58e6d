//! Maximum flow-time scheduling with machine closing times.
//!
//! [`approx_schedule`] solves the LP relaxation, rounds its fractional
//! assignment with closing-time restricted Earliest Deadline rounding, and
//! simulates the result. Its max flow-time is at most
//! `(3 - 1/(m-1)) * max(T, d_max)` where `T` is the LP value; both terms are
//! lower bounds on the optimum, so the ratio is certified without knowing it.
//!
//! Schedulers implement [`Scheduler`] and are looked up by name.

mod instance;
mod lp;
mod simplex;
mod simulate;

pub use instance::{Job, SchedulingInstance};
pub use lp::{most_violated, solve_lp, solve_lp_with, IntervalRow, LpMethod, LpSolution};
pub use simulate::{build_schedule, fifo_assignment, fifo_schedule, Schedule};

use crate::discrepancy::one_sided_interval_excess;
use crate::error::{Error, Result};
use crate::rounding::round_with_closing_times;
use crate::scalar::Scalar;

/// `3 - 1/(m-1)` for `m >= 2`. A single machine has no rounding freedom and
/// the release-order schedule meets the LP bound, so the ratio is 1.
pub fn approx_ratio<S: Scalar>(m: usize) -> S {
    if m >= 2 {
        S::from_i64(3) - S::ratio(1, m as i64 - 1)
    } else {
        S::one()
    }
}

/// `2 - 1/(m-1)`: bound on the one-sided interval overload of the rounding, in units of `d_max`.
pub fn interval_excess_factor<S: Scalar>(m: usize) -> S {
    if m >= 2 {
        S::from_i64(2) - S::ratio(1, m as i64 - 1)
    } else {
        S::zero()
    }
}

/// Everything the approximation pipeline computed.
#[derive(Debug, Clone)]
pub struct ApproxOutcome<S> {
    pub lp: LpSolution<S>,
    pub schedule: Schedule<S>,
    /// `max(T, d_max)`, a lower bound on the optimum.
    pub lower_bound: S,
    /// `sum_{[s,t]} d_j (y_ij - x_ij)` maximized over machines and intervals.
    pub interval_excess: S,
}

impl<S: Scalar> ApproxOutcome<S> {
    /// `max_flow_time / max(T, d_max)`.
    pub fn certified_ratio(&self) -> S {
        self.schedule.max_flow_time.clone() / self.lower_bound.clone()
    }
}

pub fn approx_schedule<S: Scalar>(inst: &SchedulingInstance<S>) -> Result<Schedule<S>> {
    Ok(approx_schedule_detailed(inst, LpMethod::default())?.schedule)
}

pub fn approx_schedule_detailed<S: Scalar>(inst: &SchedulingInstance<S>, method: LpMethod) -> Result<ApproxOutcome<S>> {
    let lp = solve_lp_with(inst, method)?;
    let d = inst.weights();
    let release = inst.releases();
    let y = round_with_closing_times(&lp.x, &d, &release, inst.machines())?;
    let interval_excess = one_sided_interval_excess(&lp.x, &y, &d)?;
    let schedule = build_schedule(inst, &y)?;
    let lower_bound = S::max_of(lp.value.clone(), inst.d_max());
    Ok(ApproxOutcome {
        lp,
        schedule,
        lower_bound,
        interval_excess,
    })
}

/// A strategy producing a feasible schedule.
pub trait Scheduler<S: Scalar>: Send + Sync {
    fn name(&self) -> &'static str;
    fn schedule(&self, inst: &SchedulingInstance<S>) -> Result<Schedule<S>>;
}

/// LP rounding with the certified `3 - 1/(m-1)` ratio.
#[derive(Debug, Clone, Copy, Default)]
pub struct LpRounding {
    pub method: LpMethod,
}

impl<S: Scalar> Scheduler<S> for LpRounding {
    fn name(&self) -> &'static str {
        "approx"
    }

    fn schedule(&self, inst: &SchedulingInstance<S>) -> Result<Schedule<S>> {
        Ok(approx_schedule_detailed(inst, self.method)?.schedule)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Fifo;

impl<S: Scalar> Scheduler<S> for Fifo {
    fn name(&self) -> &'static str {
        "fifo"
    }

    fn schedule(&self, inst: &SchedulingInstance<S>) -> Result<Schedule<S>> {
        fifo_schedule(inst)
    }
}

pub const SCHEDULERS: &[&str] = &["approx", "fifo"];

pub fn schedulers<S: Scalar>() -> Vec<Box<dyn Scheduler<S>>> {
    vec![Box::new(LpRounding::default()), Box::new(Fifo)]
}

pub fn scheduler_by_name<S: Scalar>(name: &str) -> Result<Box<dyn Scheduler<S>>> {
    schedulers()
        .into_iter()
        .find(|s| s.name() == name)
        .ok_or_else(|| Error::unknown("scheduler", name, SCHEDULERS))
}
