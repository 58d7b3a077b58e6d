use std::fmt::Debug;
use std::ops::{Add, AddAssign, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::assignment::{check_dims, FractionalAssignment, IntegralAssignment, WeightVector};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

use super::Rounder;

/// Slack constant of the candidate and deadline thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonRule {
    /// `eps = 1 / (2m - 2)`; yields the `(1 - eps) d_max` prefix bound.
    Tight,
    /// `eps = 0` in both thresholds. No bound is claimed for this variant.
    Zero,
}

/// Earliest Deadline rounding.
///
/// At column `t` the candidates are the rows whose fractional prefix
/// `P_t(i)` exceeds their integral prefix `N_{t-1}(i)` by at least
/// `min(d_t / m, eps d_max)`. Among them the row with the earliest deadline
/// wins, where the deadline is the first `T >= t` with
/// `P_T(i) >= N_{t-1}(i) + (1 - eps) d_max`. Ties go to the smallest row.
///
/// Prefix sums are precomputed and each row keeps a monotone deadline
/// cursor, so a run costs O(mn).
#[derive(Debug, Clone, Copy)]
pub struct EarliestDeadline {
    pub rule: EpsilonRule,
}

impl EarliestDeadline {
    pub const fn tight() -> Self {
        EarliestDeadline {
            rule: EpsilonRule::Tight,
        }
    }

    pub const fn zero_epsilon() -> Self {
        EarliestDeadline {
            rule: EpsilonRule::Zero,
        }
    }

    /// `eps` for `m` rows under this rule.
    pub fn epsilon<S: Scalar>(&self, m: usize) -> S {
        match self.rule {
            EpsilonRule::Tight if m >= 2 => S::ratio(1, 2 * m as i64 - 2),
            _ => S::zero(),
        }
    }
}

/// Row-major prefix sums `P_t(i) = sum_{j<=t} d_j x_ij`, `t` zero-based.
pub(crate) fn prefix_sums<S: Scalar>(x: &FractionalAssignment<S>, d: &WeightVector<S>) -> Vec<Vec<S>> {
    (0..x.m())
        .map(|i| {
            let mut acc = S::zero();
            x.row(i)
                .iter()
                .zip(d.as_slice())
                .map(|(xij, dj)| {
                    acc += dj.clone() * xij.clone();
                    acc.clone()
                })
                .collect()
        })
        .collect()
}

impl<S: Scalar> Rounder<S> for EarliestDeadline {
    fn name(&self) -> &'static str {
        match self.rule {
            EpsilonRule::Tight => "earliest-deadline",
            EpsilonRule::Zero => "earliest-deadline-eps0",
        }
    }

    fn prefix_bound(&self, m: usize) -> Option<S> {
        match self.rule {
            EpsilonRule::Tight if m >= 2 => Some(S::one() - S::ratio(1, 2 * m as i64 - 2)),
            EpsilonRule::Tight => Some(S::zero()),
            EpsilonRule::Zero => None,
        }
    }

    fn round(&self, x: &FractionalAssignment<S>, d: &WeightVector<S>) -> Result<IntegralAssignment> {
        check_dims(x, d, None)?;
        if S::is_exact() {
            if let Some(rows) = self.round_integer(x, d) {
                return rows.map(IntegralAssignment::from_vec_unchecked);
            }
        }
        self.round_scalar(x, d).map(IntegralAssignment::from_vec_unchecked)
    }
}

impl EarliestDeadline {
    fn round_scalar<S: Scalar>(&self, x: &FractionalAssignment<S>, d: &WeightVector<S>) -> Result<Vec<usize>> {
        let m = x.m();
        let d_max = d.max().clone();
        // Thresholds are kept in original units: eps * d_max instead of normalizing d.
        let eps = self.epsilon::<S>(m) * d_max.clone();
        let m_scalar = S::from_i64(m as i64);
        select(
            &prefix_sums(x, d),
            d.as_slice(),
            |dt| S::min_of(dt.clone() / m_scalar.clone(), eps.clone()),
            &(d_max.clone() - eps.clone()),
            &(S::slack() * d_max),
            S::zero(),
            self.rule == EpsilonRule::Tight,
        )
    }

    /// Exact inputs scaled to integers: `x` by the lcm of its denominators,
    /// `d` likewise, and both thresholds by `m (2m - 2)`. Scaling by a positive
    /// constant preserves every comparison. `None` if a value would not fit.
    fn round_integer<S: Scalar>(&self, x: &FractionalAssignment<S>, d: &WeightVector<S>) -> Option<Result<Vec<usize>>> {
        let (m, n) = (x.m(), x.n());
        let xr: Vec<Vec<Rational>> = (0..m).map(|i| x.row(i).iter().map(|v| v.to_rational()).collect()).collect::<Option<_>>()?;
        let dr: Vec<Rational> = d.as_slice().iter().map(|v| v.to_rational()).collect::<Option<_>>()?;
        let lcm = |vals: &mut dyn Iterator<Item = &Rational>| vals.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let lx = lcm(&mut xr.iter().flatten());
        let ld = lcm(&mut dr.iter());
        let scale = |r: &Rational, l: &BigInt| (r.numer() * (l / r.denom())).to_i128();
        let xi: Vec<Vec<i128>> = xr.iter().map(|row| row.iter().map(|v| scale(v, &lx)).collect()).collect::<Option<_>>()?;
        let di: Vec<i128> = dr.iter().map(|v| scale(v, &ld)).collect::<Option<_>>()?;

        let mm = m as i128;
        let (c, margin_d, margin_max) = match self.rule {
            EpsilonRule::Tight if m >= 2 => (mm * (2 * mm - 2), 2 * mm - 2, mm),
            _ => (mm, 1, 0),
        };
        let lx = lx.to_i128()?;
        let d_max = *di.iter().max()?;
        // Every prefix sum is at most sum_j d_j * lx * c.
        let total = di.iter().try_fold(0i128, |acc, &v| acc.checked_add(v))?;
        if total.checked_mul(lx)?.checked_mul(c)? > (1i128 << 120) {
            return None;
        }
        let prefix: Vec<Vec<i128>> = xi
            .iter()
            .map(|row| {
                let mut acc = 0i128;
                row.iter()
                    .zip(&di)
                    .map(|(xv, dv)| {
                        acc += xv * dv * c;
                        acc
                    })
                    .collect()
            })
            .collect();
        // In these units one column of weight d_t counts d_t * lx * c.
        let weights: Vec<i128> = di.iter().map(|v| v * lx * c).collect();
        let rows = select(
            &prefix,
            &weights,
            |w| (w / c * margin_d).min(d_max * lx * margin_max),
            &(d_max * lx * (c - margin_max)),
            &0,
            0,
            self.rule == EpsilonRule::Tight,
        );
        debug_assert_eq!(n, prefix.first().map_or(0, Vec::len));
        Some(rows)
    }
}

/// The selection loop on precomputed prefix sums: at column `t` pick, among
/// rows with `P_t(i) >= N(i) + margin(d_t) - slack`, the one whose prefix
/// first reaches `N(i) + target - slack`; ties to the smallest row.
fn select<V>(
    prefix: &[Vec<V>],
    d: &[V],
    margin: impl Fn(&V) -> V,
    target: &V,
    slack: &V,
    zero: V,
    check_invariant: bool,
) -> Result<Vec<usize>>
where
    V: Clone + PartialOrd + Debug + Add<Output = V> + Sub<Output = V> + AddAssign,
{
    let m = prefix.len();
    let n = d.len();
    let mut taken = vec![zero; m];
    let mut cursor = vec![0usize; m];
    let mut rows = Vec::with_capacity(n);

    for (t, dt) in d.iter().enumerate() {
        let margin = margin(dt);
        let mut best: Option<(usize, usize)> = None;
        for i in 0..m {
            let candidate = prefix[i][t] >= taken[i].clone() + margin.clone() - slack.clone();
            // Thresholds only grow and P is nondecreasing, so cursors never move back.
            let threshold = taken[i].clone() + target.clone() - slack.clone();
            let c = &mut cursor[i];
            if *c < t {
                *c = t;
            }
            while *c < n && prefix[i][*c] < threshold {
                *c += 1;
            }
            if candidate && best.is_none_or(|(_, deadline)| *c < deadline) {
                best = Some((i, *c));
            }
        }
        let (chosen, _) = best.ok_or_else(|| Error::Internal(format!("no candidate at column {}", t + 1)))?;
        taken[chosen] += dt.clone();
        rows.push(chosen);

        if cfg!(debug_assertions) && check_invariant {
            let limit = target.clone() + slack.clone();
            for i in 0..m {
                debug_assert!(
                    prefix[i][t].clone() - taken[i].clone() <= limit && taken[i].clone() - prefix[i][t].clone() <= limit,
                    "|delta_{}({})| exceeds (1 - eps) d_max: P = {:?}, N = {:?}, limit {:?}",
                    t + 1,
                    i + 1,
                    prefix[i][t],
                    taken[i],
                    limit
                );
            }
        }
    }
    Ok(rows)
}
