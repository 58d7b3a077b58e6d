//! Earliest Deadline rounding of fractional assignments with tight prefix
//! discrepancy, exact search oracles, and a closing-time flow-time scheduler
//! built on top of it.
//!
//! Everything numeric is generic over [`Scalar`], implemented for exact
//! [`Rational`] and for `f64`.

pub mod assignment;
pub mod discrepancy;
pub mod error;
pub mod flow;
pub mod instances;
pub mod io;
pub mod oracle;
pub mod repro;
pub mod rounding;
pub mod scalar;
pub mod scheduling;

pub use assignment::{
    validate_fractional, FractionalAssignment, IntegralAssignment, Matrix, SupportMask, Violation, WeightVector,
};
pub use discrepancy::{interval_discrepancy, one_sided_interval_excess, prefix_discrepancy, DiscrepancyReport};
pub use error::{Error, Result};
pub use rounding::{earliest_deadline_round, round_with_closing_times, round_with_open_times, OpenTimes, Rounder};
pub use scalar::{NumericMode, Rational, Scalar};
