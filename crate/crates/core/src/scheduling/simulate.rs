use crate::assignment::IntegralAssignment;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::SchedulingInstance;

/// A non-preemptive schedule: each machine runs its jobs in release order,
/// starting each one as soon as it is released and the machine is free.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule<S> {
    pub assignment: IntegralAssignment,
    pub start: Vec<S>,
    pub completion: Vec<S>,
    pub max_flow_time: S,
    /// Job attaining the maximum flow-time (zero-based).
    pub critical_job: usize,
}

impl<S: Scalar> Schedule<S> {
    pub fn flow_time(&self, inst: &SchedulingInstance<S>, job: usize) -> S {
        self.completion[job].clone() - inst.jobs()[job].release.clone()
    }

    /// Total processing executed per machine.
    pub fn busy_time(&self, inst: &SchedulingInstance<S>) -> Vec<S> {
        let mut busy = vec![S::zero(); inst.m()];
        for (j, job) in inst.jobs().iter().enumerate() {
            busy[self.assignment.row_of(j)] += job.processing.clone();
        }
        busy
    }
}

/// Simulates `assignment`: `C_j = max(r_j, previous completion on the machine) + d_j`.
pub fn build_schedule<S: Scalar>(inst: &SchedulingInstance<S>, assignment: &IntegralAssignment) -> Result<Schedule<S>> {
    if assignment.len() != inst.n() {
        return Err(Error::Dimension(format!(
            "assignment covers {} jobs, instance has {}",
            assignment.len(),
            inst.n()
        )));
    }
    let mut free_at: Vec<Option<S>> = vec![None; inst.m()];
    let mut start = Vec::with_capacity(inst.n());
    let mut completion = Vec::with_capacity(inst.n());
    let mut worst: Option<(S, usize)> = None;
    for (j, job) in inst.jobs().iter().enumerate() {
        let i = assignment.row_of(j);
        if i >= inst.m() {
            return Err(Error::Dimension(format!("job {} assigned to machine {} of {}", j + 1, i + 1, inst.m())));
        }
        if !inst.admits(i, j) {
            return Err(Error::Invalid(format!(
                "job {} is released at {} after machine {} closes at {}",
                j + 1,
                job.release,
                i + 1,
                inst.machines()[i]
            )));
        }
        let s = match &free_at[i] {
            Some(f) if *f > job.release => f.clone(),
            _ => job.release.clone(),
        };
        let c = s.clone() + job.processing.clone();
        let flow = c.clone() - job.release.clone();
        if worst.as_ref().is_none_or(|(w, _)| flow > *w) {
            worst = Some((flow, j));
        }
        free_at[i] = Some(c.clone());
        start.push(s);
        completion.push(c);
    }
    let (max_flow_time, critical_job) = worst.expect("instance has jobs");
    Ok(Schedule {
        assignment: assignment.clone(),
        start,
        completion,
        max_flow_time,
        critical_job,
    })
}

/// FIFO: in release order, each job goes to the open machine with the least
/// remaining assigned work at its release time; ties to the smallest index.
pub fn fifo_assignment<S: Scalar>(inst: &SchedulingInstance<S>) -> Result<IntegralAssignment> {
    let mut free_at = vec![S::zero(); inst.m()];
    let mut rows = Vec::with_capacity(inst.n());
    for (j, job) in inst.jobs().iter().enumerate() {
        let mut best: Option<(usize, S)> = None;
        for i in (0..inst.m()).filter(|&i| inst.admits(i, j)) {
            let remaining = S::max_of(free_at[i].clone() - job.release.clone(), S::zero());
            if best.as_ref().is_none_or(|(_, b)| remaining < *b) {
                best = Some((i, remaining));
            }
        }
        let (i, _) = best.ok_or_else(|| Error::Infeasible(format!("job {} has no open machine", j + 1)))?;
        free_at[i] = S::max_of(free_at[i].clone(), job.release.clone()) + job.processing.clone();
        rows.push(i);
    }
    IntegralAssignment::new(rows, inst.m())
}

pub fn fifo_schedule<S: Scalar>(inst: &SchedulingInstance<S>) -> Result<Schedule<S>> {
    build_schedule(inst, &fifo_assignment(inst)?)
}
