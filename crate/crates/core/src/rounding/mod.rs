//! Rounding fractional assignments to integral ones.
//!
//! Rounding strategies implement [`Rounder`] and are looked up by name with
//! [`rounder_by_name`]. The support-restricted variants
//! ([`round_with_open_times`], [`round_with_closing_times`]) wrap any
//! strategy; they validate the input support and check the output support.

mod earliest_deadline;

pub use earliest_deadline::{EarliestDeadline, EpsilonRule};
pub(crate) use earliest_deadline::prefix_sums;

use std::fmt;

use serde::{Serialize, Serializer};

use crate::assignment::{check_dims, FractionalAssignment, IntegralAssignment, WeightVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A strategy mapping a fractional assignment to an integral one.
pub trait Rounder<S: Scalar>: Send + Sync {
    /// Registry key.
    fn name(&self) -> &'static str;

    /// Guaranteed prefix discrepancy as a multiple of `d_max`, if any.
    fn prefix_bound(&self, m: usize) -> Option<S>;

    fn round(&self, x: &FractionalAssignment<S>, d: &WeightVector<S>) -> Result<IntegralAssignment>;
}

/// Names accepted by [`rounder_by_name`].
pub const ROUNDERS: &[&str] = &["earliest-deadline", "earliest-deadline-eps0"];

/// Every registered rounding strategy.
pub fn rounders<S: Scalar>() -> Vec<Box<dyn Rounder<S>>> {
    vec![
        Box::new(EarliestDeadline::tight()),
        Box::new(EarliestDeadline::zero_epsilon()),
    ]
}

pub fn rounder_by_name<S: Scalar>(name: &str) -> Result<Box<dyn Rounder<S>>> {
    rounders()
        .into_iter()
        .find(|r| r.name() == name)
        .ok_or_else(|| Error::unknown("rounder", name, ROUNDERS))
}

/// Earliest Deadline rounding with `eps = 1/(2m-2)`.
pub fn earliest_deadline_round<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
) -> Result<IntegralAssignment> {
    EarliestDeadline::tight().round(x, d)
}

/// One-based first usable column per row: row `i` may only take columns `j >= a_i`.
/// `a_i = n + 1` means the row is never usable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenTimes {
    a: Vec<usize>,
}

impl OpenTimes {
    pub fn new(a: Vec<usize>, n: usize) -> Result<Self> {
        if let Some((i, &ai)) = a.iter().enumerate().find(|(_, &ai)| ai == 0 || ai > n + 1) {
            return Err(Error::Invalid(format!(
                "open time of row {} is {ai}, expected a value in [1, {}]",
                i + 1,
                n + 1
            )));
        }
        Ok(OpenTimes { a })
    }

    pub fn unrestricted(m: usize) -> Self {
        OpenTimes { a: vec![1; m] }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.a
    }

    /// Whether zero-based column `j` is usable by row `i`.
    pub fn allows(&self, i: usize, j: usize) -> bool {
        j + 1 >= self.a[i]
    }
}

pub fn round_with_open_times<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    a: &OpenTimes,
) -> Result<IntegralAssignment> {
    round_with_open_times_using(&EarliestDeadline::tight(), x, d, a)
}

/// Open-time restricted rounding with any strategy. The restriction is not
/// enforced inside the strategy; rows with no fractional mass yet are never
/// candidates under the tight rule, so the output support follows from the
/// input support. The output is checked.
pub fn round_with_open_times_using<S: Scalar>(
    rounder: &dyn Rounder<S>,
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    a: &OpenTimes,
) -> Result<IntegralAssignment> {
    check_dims(x, d, None)?;
    if a.as_slice().len() != x.m() {
        return Err(Error::Dimension(format!(
            "{} open times for {} rows",
            a.as_slice().len(),
            x.m()
        )));
    }
    for i in 0..x.m() {
        for j in 0..x.n() {
            if !a.allows(i, j) && !x.get(i, j).is_zero() {
                return Err(Error::Invalid(format!(
                    "x[{}][{}] is nonzero but row {} opens at column {}",
                    i + 1,
                    j + 1,
                    i + 1,
                    a.as_slice()[i]
                )));
            }
        }
    }
    let y = rounder.round(x, d)?;
    if let Some(j) = (0..y.len()).find(|&j| !a.allows(y.row_of(j), j)) {
        return Err(Error::Internal(format!(
            "{} assigned column {} to row {} before it opens",
            rounder.name(),
            j + 1,
            y.row_of(j) + 1
        )));
    }
    Ok(y)
}

/// Machine closing time; a job released at `r` fits iff `r <= b`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosingTime<S> {
    At(S),
    Never,
}

impl<S: Scalar> ClosingTime<S> {
    pub fn admits(&self, release: &S) -> bool {
        match self {
            ClosingTime::At(b) => release <= b,
            ClosingTime::Never => true,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            ClosingTime::At(b) => b.to_json(),
            ClosingTime::Never => serde_json::Value::String("inf".into()),
        }
    }
}

impl<S: Scalar> fmt::Display for ClosingTime<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClosingTime::At(b) => write!(f, "{b}"),
            ClosingTime::Never => write!(f, "inf"),
        }
    }
}

impl<S: Scalar> Serialize for ClosingTime<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        self.to_json().serialize(serializer)
    }
}

pub fn round_with_closing_times<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    release: &[S],
    closing: &[ClosingTime<S>],
) -> Result<IntegralAssignment> {
    round_with_closing_times_using(&EarliestDeadline::tight(), x, d, release, closing)
}

/// Closing-time restricted rounding: reverse the columns, round with open
/// times `a'_i = n - a_i + 1` where `a_i` is the last job machine `i`
/// accepts, and reverse back. Two prefix bounds of the reversed instance
/// bound every interval of the original one.
pub fn round_with_closing_times_using<S: Scalar>(
    rounder: &dyn Rounder<S>,
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    release: &[S],
    closing: &[ClosingTime<S>],
) -> Result<IntegralAssignment> {
    check_dims(x, d, None)?;
    let (m, n) = (x.m(), x.n());
    if release.len() != n || closing.len() != m {
        return Err(Error::Dimension(format!(
            "{} release times and {} closing times for a {m} x {n} assignment",
            release.len(),
            closing.len()
        )));
    }
    if let Some(j) = release.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::Invalid(format!("release times decrease at job {}", j + 2)));
    }
    for i in 0..m {
        for j in 0..n {
            if !closing[i].admits(&release[j]) && !x.get(i, j).is_zero() {
                return Err(Error::Invalid(format!(
                    "x[{}][{}] is nonzero but job {} is released after machine {} closes",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    // Releases are sorted, so each machine accepts a prefix of the jobs.
    let last_accepted: Vec<usize> = closing
        .iter()
        .map(|b| release.iter().take_while(|r| b.admits(r)).count())
        .collect();
    let open = OpenTimes::new(last_accepted.iter().map(|a| n - a + 1).collect(), n)?;
    let y = round_with_open_times_using(rounder, &x.reversed_columns(), &d.reversed(), &open)?.reversed();
    debug_assert!((0..n).all(|j| closing[y.row_of(j)].admits(&release[j])));
    Ok(y)
}
