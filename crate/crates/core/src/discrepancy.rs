//! Prefix and interval discrepancy of an integral assignment against a
//! fractional one.
//!
//! For row `i` and prefix length `t`, `delta_t(i) = sum_{j<=t} d_j (x_ij - y_ij)`,
//! with `delta_0(i) = 0`. The sum over an interval `[s, t]` is
//! `delta_t(i) - delta_{s-1}(i)`, so the largest absolute interval sum of a
//! row is the spread (max minus min) of its prefix sequence including
//! `delta_0`. Everything here is a single O(mn) pass.

use serde::Serialize;

use crate::assignment::{check_dims, FractionalAssignment, IntegralAssignment, WeightVector};
use crate::error::Result;
use crate::scalar::Scalar;

/// Largest absolute interval sum and the interval attaining it.
/// `start` and `end` are one-based inclusive column indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalWitness<S> {
    pub value: S,
    pub row: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport<S> {
    /// `max_{i, t} |delta_t(i)|` over `t in 1..=n`.
    pub max_prefix_abs: S,
    /// `(row, t)` with zero-based row and prefix length `t`.
    pub argmax_prefix: (usize, usize),
    /// Per row, `(min_t delta_t(i), max_t delta_t(i))` over `t in 1..=n`.
    pub row_extrema: Vec<(S, S)>,
    pub interval: Option<IntervalWitness<S>>,
}

/// Prefix sums of one row: `delta_1, ..., delta_n`.
fn row_deltas<'a, S: Scalar>(
    x: &'a FractionalAssignment<S>,
    y: &'a IntegralAssignment,
    d: &'a WeightVector<S>,
    i: usize,
) -> impl Iterator<Item = S> + 'a {
    let mut acc = S::zero();
    x.row(i).iter().enumerate().map(move |(j, xij)| {
        acc += d.get(j).clone() * xij.clone();
        if y.row_of(j) == i {
            acc -= d.get(j).clone();
        }
        acc.clone()
    })
}

fn scan<S: Scalar>(
    x: &FractionalAssignment<S>,
    y: &IntegralAssignment,
    d: &WeightVector<S>,
    with_interval: bool,
) -> Result<DiscrepancyReport<S>> {
    check_dims(x, d, Some(y))?;
    let mut best = S::zero();
    let mut argmax = (0, 1);
    let mut first = true;
    let mut row_extrema = Vec::with_capacity(x.m());
    let mut interval: Option<IntervalWitness<S>> = None;

    for i in 0..x.m() {
        let mut lo: Option<S> = None;
        let mut hi: Option<S> = None;
        // Positions of the extrema including delta_0 = 0 at position 0.
        let (mut imax, mut imin) = ((S::zero(), 0usize), (S::zero(), 0usize));
        for (t0, delta) in row_deltas(x, y, d, i).enumerate() {
            let t = t0 + 1;
            let a = delta.abs();
            if first || a > best {
                best = a;
                argmax = (i, t);
                first = false;
            }
            if lo.as_ref().is_none_or(|v| delta < *v) {
                lo = Some(delta.clone());
            }
            if hi.as_ref().is_none_or(|v| delta > *v) {
                hi = Some(delta.clone());
            }
            if delta > imax.0 {
                imax = (delta.clone(), t);
            }
            if delta < imin.0 {
                imin = (delta, t);
            }
        }
        row_extrema.push((lo.expect("n >= 1"), hi.expect("n >= 1")));
        if with_interval {
            let spread = imax.0.clone() - imin.0.clone();
            if interval.as_ref().is_none_or(|w| spread > w.value) {
                let (a, b) = if imax.1 < imin.1 { (imax.1, imin.1) } else { (imin.1, imax.1) };
                // Equal positions only happen when the row is identically zero.
                let (start, end) = if a == b { (1, 1) } else { (a + 1, b) };
                interval = Some(IntervalWitness {
                    value: spread,
                    row: i,
                    start,
                    end,
                });
            }
        }
    }

    Ok(DiscrepancyReport {
        max_prefix_abs: best,
        argmax_prefix: argmax,
        row_extrema,
        interval,
    })
}

/// `max_{i, t} |sum_{j<=t} d_j (x_ij - y_ij)|` with its witness.
pub fn prefix_discrepancy<S: Scalar>(
    x: &FractionalAssignment<S>,
    y: &IntegralAssignment,
    d: &WeightVector<S>,
) -> Result<DiscrepancyReport<S>> {
    scan(x, y, d, false)
}

/// Prefix report with the interval fields populated:
/// `max_{i, s<=t} |sum_{j in [s,t]} d_j (x_ij - y_ij)|`.
pub fn interval_discrepancy<S: Scalar>(
    x: &FractionalAssignment<S>,
    y: &IntegralAssignment,
    d: &WeightVector<S>,
) -> Result<DiscrepancyReport<S>> {
    scan(x, y, d, true)
}

/// `max_{i, s<=t} sum_{j in [s,t]} d_j (y_ij - x_ij)`, the one-sided
/// overload of any row on any interval.
pub fn one_sided_interval_excess<S: Scalar>(
    x: &FractionalAssignment<S>,
    y: &IntegralAssignment,
    d: &WeightVector<S>,
) -> Result<S> {
    check_dims(x, d, Some(y))?;
    // sum over [s, t] of (y - x) = delta_{s-1} - delta_t; maximize over s-1 < t.
    let mut best: Option<S> = None;
    for i in 0..x.m() {
        let mut running_max = S::zero();
        for delta in row_deltas(x, y, d, i) {
            let candidate = running_max.clone() - delta.clone();
            if best.as_ref().is_none_or(|b| candidate > *b) {
                best = Some(candidate);
            }
            if delta > running_max {
                running_max = delta;
            }
        }
    }
    Ok(best.expect("n >= 1"))
}
