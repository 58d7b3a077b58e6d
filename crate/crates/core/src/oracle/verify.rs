use serde::Serialize;

use crate::assignment::IntegralAssignment;
use crate::error::{Error, Result};
use crate::instances::{gen_caplb, gen_carlb, gen_intlb};
use crate::scalar::Scalar;

use super::{exact_min_interval_discrepancy, exact_min_prefix_discrepancy, Objective, SearchConfig, SearchStatus};

/// A claimed lower bound on the optimum of a named instance.
#[derive(Debug, Clone, PartialEq)]
pub enum LowerBoundClaim<S> {
    /// Every assignment of the `m`-row construction has prefix discrepancy `>= 1 - 1/(2m-2)`.
    Caplb(usize),
    /// Every support-respecting assignment has prefix discrepancy `>= 1 - delta`.
    Carlb(S),
    /// Every assignment of the 3x100 instance has interval discrepancy `> 1`.
    Intlb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// The search hit a limit; nothing is certified.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct VerifyReport<S> {
    pub instance: String,
    pub objective: Objective,
    pub bound: S,
    /// The claim with its parameters substituted.
    pub formula: String,
    /// Claim is `optimum > bound` rather than `>=`.
    pub strict: bool,
    pub verdict: Verdict,
    /// Prefix claims report the optimum; the interval claim only decides.
    pub optimum: Option<S>,
    /// Optimal assignment, or the counterexample on failure.
    pub witness: Option<IntegralAssignment>,
    pub nodes_explored: u64,
}

impl<S: Scalar> VerifyReport<S> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "instance": self.instance,
            "objective": self.objective.to_string(),
            "bound": self.bound.to_json(),
            "formula": self.formula,
            "verdict": self.verdict,
            "optimum": self.optimum.as_ref().map(|v| v.to_json()),
            "witness": self.witness.as_ref().map(|w| w.to_one_based()),
            "nodes_explored": self.nodes_explored,
        })
    }
}

/// Generates the instance, runs the matching oracle and checks the claim.
/// Only `cfg`'s limits and memoization flag are used.
pub fn verify_lower_bound<S: Scalar>(claim: &LowerBoundClaim<S>, cfg: &SearchConfig<S>) -> Result<VerifyReport<S>> {
    let limits = |objective| SearchConfig {
        objective,
        support: None,
        threshold: None,
        inclusive: false,
        node_limit: cfg.node_limit,
        time_limit: cfg.time_limit,
        memoize: cfg.memoize,
    };
    match claim {
        LowerBoundClaim::Caplb(m) => {
            let (x, d) = gen_caplb::<S>(*m)?;
            let bound = S::one() - S::ratio(1, 2 * *m as i64 - 2);
            let formula = format!("min prefix discrepancy >= 1 - 1/(2m-2) = 1 - 1/{} = {bound}", 2 * m - 2);
            let r = exact_min_prefix_discrepancy(&x, &d, &limits(Objective::Prefix))?;
            Ok(prefix_report(format!("caplb(m={m})"), bound, formula, r))
        }
        LowerBoundClaim::Carlb(delta) => {
            let (x, mask, d) = gen_carlb::<S>(delta)?;
            let bound = S::one() - delta.clone();
            let formula = format!("min support-respecting prefix discrepancy >= 1 - delta = 1 - {delta} = {bound}");
            let cfg = limits(Objective::Prefix).with_support(mask);
            let r = exact_min_prefix_discrepancy(&x, &d, &cfg)?;
            Ok(prefix_report(format!("carlb(delta={delta}, n={})", x.n()), bound, formula, r))
        }
        LowerBoundClaim::Intlb => {
            let (x, d) = gen_intlb::<S>();
            let bound = S::one();
            let r = exact_min_interval_discrepancy(&x, &d, &limits(Objective::Interval).at_most(bound.clone()))?;
            let verdict = match r.status {
                SearchStatus::No => Verdict::Pass,
                SearchStatus::Yes => Verdict::Fail,
                SearchStatus::LimitReached => Verdict::Inconclusive,
                SearchStatus::Exact => return Err(Error::Internal("decision search returned an optimum".into())),
            };
            Ok(VerifyReport {
                instance: "intlb(3x100)".into(),
                objective: Objective::Interval,
                formula: format!("no assignment has interval discrepancy <= {bound}"),
                bound,
                strict: true,
                verdict,
                optimum: None,
                witness: r.witness,
                nodes_explored: r.nodes_explored,
            })
        }
    }
}

fn prefix_report<S: Scalar>(instance: String, bound: S, formula: String, r: super::SearchResult<S>) -> VerifyReport<S> {
    let verdict = match (&r.status, &r.value) {
        (SearchStatus::Exact, Some(v)) if v.clone() >= bound.clone() - S::slack() => Verdict::Pass,
        (SearchStatus::Exact, _) => Verdict::Fail,
        // A limit may still have produced a counterexample.
        (_, Some(v)) if *v < bound.clone() - S::slack() => Verdict::Fail,
        _ => Verdict::Inconclusive,
    };
    VerifyReport {
        instance,
        objective: Objective::Prefix,
        bound,
        formula,
        strict: false,
        verdict,
        optimum: (r.status == SearchStatus::Exact).then_some(r.value).flatten(),
        witness: r.witness,
        nodes_explored: r.nodes_explored,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn caplb_claims_hold_with_equality() {
        for m in 2..=5 {
            let r = verify_lower_bound::<Rational>(&LowerBoundClaim::Caplb(m), &SearchConfig::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Pass);
            assert_eq!(r.optimum, Some(r.bound.clone()));
        }
    }

    #[test]
    fn carlb_quarter() {
        let r = verify_lower_bound(&LowerBoundClaim::Carlb(Rational::ratio(1, 4)), &SearchConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.optimum.unwrap() >= Rational::ratio(3, 4));
    }

    #[test]
    fn tiny_budget_is_inconclusive_not_pass() {
        let cfg = SearchConfig::default().with_node_limit(1);
        let r = verify_lower_bound::<Rational>(&LowerBoundClaim::Intlb, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }
}
