//! Reproduction runs for the headline claims.
//!
//! Each claim implements [`Claim`], is registered under an id (plus short
//! aliases) and produces a JSON report with the instantiated bound, the
//! measured values and a verdict. Reports depend only on the parameters and
//! the seed; wall-clock times are added only when requested.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::assignment::{FractionalAssignment, WeightVector};
use crate::discrepancy::{interval_discrepancy, prefix_discrepancy};
use crate::error::{Error, Result};
use crate::flow::{assignment_to_unsplittable, build_reduction, verify_arc_discrepancy};
use crate::instances::{
    fifo_lb_batch_assignment, gen_caplb, gen_fifo_lb, gen_intlb, gen_random, gen_random_schedule, RandomSpec,
    ScheduleSpec, WeightMode,
};
use crate::oracle::{
    exact_min_interval_discrepancy, verify_lower_bound, LowerBoundClaim, SearchConfig, SearchStatus, Verdict,
};
use crate::rounding::earliest_deadline_round;
use crate::scalar::{harmonic, NumericMode, Rational, Scalar};
use crate::scheduling::{approx_ratio, approx_schedule_detailed, build_schedule, fifo_schedule, interval_excess_factor, LpMethod};

#[derive(Debug, Clone)]
pub struct ReproParams {
    pub m: Option<usize>,
    pub delta: Option<String>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub mode: NumericMode,
    /// Float-mode tolerance on bound checks.
    pub tolerance: f64,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub timings: bool,
}

impl Default for ReproParams {
    fn default() -> Self {
        ReproParams {
            m: None,
            delta: None,
            trials: None,
            seed: 7,
            mode: NumericMode::Exact,
            tolerance: 1e-9,
            node_limit: None,
            time_limit: None,
            timings: false,
        }
    }
}

impl ReproParams {
    fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "delta": self.delta,
            "trials": self.trials,
            "seed": self.seed,
            "mode": self.mode.to_string(),
        })
    }

    fn search_limits<S: Scalar>(&self) -> SearchConfig<S> {
        SearchConfig {
            node_limit: self.node_limit,
            time_limit: self.time_limit,
            ..SearchConfig::default()
        }
    }

    fn tol<S: Scalar>(&self) -> S {
        if S::is_exact() {
            S::zero()
        } else {
            S::from_f64(self.tolerance).unwrap_or_else(|_| S::slack())
        }
    }

    fn ms(&self, default: std::ops::RangeInclusive<usize>) -> Vec<usize> {
        self.m.map_or_else(|| default.collect(), |m| vec![m])
    }

    fn deltas<S: Scalar>(&self, default: &[&str]) -> Result<Vec<S>> {
        match &self.delta {
            Some(d) => Ok(vec![S::parse(d)?]),
            None => default.iter().map(|d| S::parse(d)).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClaimReport {
    pub claim: &'static str,
    pub verdict: Verdict,
    pub details: Value,
    pub elapsed: Option<Duration>,
}

impl ClaimReport {
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("claim".into(), json!(self.claim));
        map.insert("status".into(), json!(self.verdict));
        if let Value::Object(details) = &self.details {
            for (k, v) in details {
                map.insert(k.clone(), v.clone());
            }
        }
        if let Some(e) = self.elapsed {
            map.insert("elapsed_ms".into(), json!(e.as_millis() as u64));
        }
        Value::Object(map)
    }
}

/// A reproducible check.
pub trait Claim: Send + Sync {
    fn id(&self) -> &'static str;
    fn aliases(&self) -> &'static [&'static str];
    fn summary(&self) -> &'static str;
    fn check(&self, params: &ReproParams) -> Result<(Verdict, Value)>;

    fn run(&self, params: &ReproParams) -> Result<ClaimReport> {
        let start = Instant::now();
        let (verdict, mut details) = self.check(params)?;
        if let Value::Object(map) = &mut details {
            map.insert("params".into(), params.to_json());
        }
        Ok(ClaimReport {
            claim: self.id(),
            verdict,
            details,
            elapsed: params.timings.then(|| start.elapsed()),
        })
    }
}

fn worst(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
    verdicts.into_iter().fold(Verdict::Pass, |acc, v| match (acc, v) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    })
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

macro_rules! dispatch {
    ($params:expr, $f:ident) => {
        match $params.mode {
            NumericMode::Exact => $f::<Rational>($params),
            NumericMode::Float => $f::<f64>($params),
        }
    };
}

/// Random chairman instances: `n` uniform in `1..=50`, weights alternating
/// between grid-uniform and two-valued `{1, 3/10}`.
fn random_instances(seed: u64, m: usize, trials: usize) -> impl Iterator<Item = (usize, RandomSpec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((m as u64) << 40));
    (0..trials).map(move |k| {
        let n = rng.gen_range(1..=50);
        let spec = RandomSpec {
            m,
            n,
            seed: rng.gen(),
            weight_mode: if k % 2 == 0 {
                WeightMode::Uniform
            } else {
                WeightMode::TwoValued { low: 0.3 }
            },
            support_density: None,
        };
        (k, spec)
    })
}

pub struct RoundingBound;

fn rounding_bound<S: Scalar>(p: &ReproParams) -> Result<(Verdict, Value)> {
    let trials = p.trials.unwrap_or(1000);
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for m in p.ms(2..=8) {
        if m < 2 {
            return Err(Error::Invalid("the rounding bound needs m >= 2".into()));
        }
        let bound = S::one() - S::ratio(1, 2 * m as i64 - 2);
        let mut worst_ratio = S::zero();
        let mut worst_trial = 0;
        let mut violations = 0;
        for (k, spec) in random_instances(p.seed, m, trials) {
            let (x, d, _) = gen_random::<S>(&spec)?;
            let y = earliest_deadline_round(&x, &d)?;
            let ratio = prefix_discrepancy(&x, &y, &d)?.max_prefix_abs / d.max().clone();
            if ratio > bound.clone() + p.tol::<S>() {
                violations += 1;
            }
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_trial = k;
            }
        }
        let (cx, cd) = gen_caplb::<S>(m)?;
        let tight = prefix_discrepancy(&cx, &earliest_deadline_round(&cx, &cd)?, &cd)?.max_prefix_abs;
        let tight_ok = if S::is_exact() {
            tight == bound
        } else {
            (tight.clone() - bound.clone()).abs() <= p.tol::<S>()
        };
        verdicts.push(verdict(violations == 0 && tight_ok));
        rows.push(json!({
            "m": m,
            "formula": format!("prefix discrepancy <= (1 - 1/(2m-2)) * d_max = (1 - 1/{}) * d_max = {bound} * d_max", 2 * m - 2),
            "bound": bound.to_json(),
            "trials": trials,
            "violations": violations,
            "worst_ratio": worst_ratio.to_json(),
            "worst_trial": worst_trial,
            "caplb_discrepancy": tight.to_json(),
            "caplb_attains_bound": tight_ok,
        }));
    }
    Ok((worst(verdicts), json!({ "per_m": rows })))
}

impl Claim for RoundingBound {
    fn id(&self) -> &'static str {
        "rounding-bound"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["theorem1"]
    }
    fn summary(&self) -> &'static str {
        "Earliest Deadline rounding keeps prefix discrepancy within (1 - 1/(2m-2)) d_max, with equality on caplb(m)"
    }
    fn check(&self, p: &ReproParams) -> Result<(Verdict, Value)> {
        dispatch!(p, rounding_bound)
    }
}

pub struct ScheduleRatio;

fn schedule_ratio<S: Scalar>(p: &ReproParams) -> Result<(Verdict, Value)> {
    let trials = p.trials.unwrap_or(500);
    let ms = p.ms(2..=5);
    if ms.iter().any(|&m| m < 2) {
        return Err(Error::Invalid("the schedule ratio needs m >= 2".into()));
    }
    let tol = if S::is_exact() { S::zero() } else { S::from_f64(1e-7)? };
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut per_m: Vec<(S, S, usize, usize)> = ms.iter().map(|_| (S::zero(), S::zero(), 0, 0)).collect();
    let record = |slot: &mut (S, S, usize, usize), ratio: S, excess: S, ok: bool| {
        if ratio > slot.0 {
            slot.0 = ratio;
        }
        if excess > slot.1 {
            slot.1 = excess;
        }
        slot.2 += 1;
        if !ok {
            slot.3 += 1;
        }
    };
    for _ in 0..trials {
        let idx = rng.gen_range(0..ms.len());
        let m = ms[idx];
        let spec = ScheduleSpec {
            m,
            n: rng.gen_range(1..=40),
            seed: rng.gen(),
        };
        let inst = gen_random_schedule::<S>(&spec)?;
        let out = approx_schedule_detailed(&inst, LpMethod::ConstraintGeneration)?;
        let ratio = out.certified_ratio();
        let excess = out.interval_excess.clone() / inst.d_max();
        let fifo = fifo_schedule(&inst)?;
        let ok = ratio <= approx_ratio::<S>(m) + tol.clone()
            && excess <= interval_excess_factor::<S>(m) + tol.clone()
            && out.lp.value <= out.schedule.max_flow_time.clone() + tol.clone()
            && out.lp.value <= fifo.max_flow_time + tol.clone();
        record(&mut per_m[idx], ratio, excess, ok);
    }
    let rows: Vec<Value> = ms
        .iter()
        .zip(&per_m)
        .map(|(&m, (ratio, excess, count, bad))| {
            json!({
                "m": m,
                "instances": count,
                "violations": bad,
                "ratio_formula": format!("max flow-time <= (3 - 1/(m-1)) * max(T, d_max) = (3 - 1/{}) * max(T, d_max) = {} * max(T, d_max)", m - 1, approx_ratio::<S>(m)),
                "excess_formula": format!("interval overload <= (2 - 1/(m-1)) * d_max = {} * d_max", interval_excess_factor::<S>(m)),
                "worst_ratio": ratio.to_json(),
                "worst_excess": excess.to_json(),
            })
        })
        .collect();
    let mut ok = per_m.iter().all(|r| r.3 == 0);

    let delta = S::ratio(1, 10_000);
    let mut fifo_rows = Vec::new();
    for m in [2usize, 4, 8] {
        let inst = gen_fifo_lb::<S>(m, &delta)?;
        let out = approx_schedule_detailed(&inst, LpMethod::ConstraintGeneration)?;
        let ratio = out.certified_ratio();
        let good = ratio <= approx_ratio::<S>(m) + tol.clone();
        ok &= good;
        fifo_rows.push(json!({
            "m": m,
            "lp_value": out.lp.value.to_json(),
            "max_flow_time": out.schedule.max_flow_time.to_json(),
            "certified_ratio": ratio.to_json(),
            "bound": approx_ratio::<S>(m).to_json(),
            "holds": good,
        }));
    }
    Ok((verdict(ok), json!({ "random": rows, "fifo_lb": fifo_rows })))
}

impl Claim for ScheduleRatio {
    fn id(&self) -> &'static str {
        "schedule-ratio"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["theorem2"]
    }
    fn summary(&self) -> &'static str {
        "LP rounding schedules stay within (3 - 1/(m-1)) max(T, d_max); rounded loads exceed the LP by at most (2 - 1/(m-1)) d_max"
    }
    fn check(&self, p: &ReproParams) -> Result<(Verdict, Value)> {
        dispatch!(p, schedule_ratio)
    }
}

pub struct Caplb;

fn caplb<S: Scalar>(p: &ReproParams) -> Result<(Verdict, Value)> {
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for m in p.ms(2..=6) {
        let r = verify_lower_bound::<S>(&LowerBoundClaim::Caplb(m), &p.search_limits())?;
        let (x, d) = gen_caplb::<S>(m)?;
        let alg = prefix_discrepancy(&x, &earliest_deadline_round(&x, &d)?, &d)?.max_prefix_abs;
        verdicts.push(r.verdict);
        let mut row = r.to_json();
        row["m"] = json!(m);
        row["earliest_deadline_value"] = alg.to_json();
        rows.push(row);
    }
    Ok((worst(verdicts), json!({ "per_m": rows })))
}

impl Claim for Caplb {
    fn id(&self) -> &'static str {
        "caplb"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["prop1.3"]
    }
    fn summary(&self) -> &'static str {
        "every assignment of caplb(m) has prefix discrepancy at least 1 - 1/(2m-2)"
    }
    fn check(&self, p: &ReproParams) -> Result<(Verdict, Value)> {
        dispatch!(p, caplb)
    }
}

pub struct Carlb;

fn carlb<S: Scalar>(p: &ReproParams) -> Result<(Verdict, Value)> {
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for delta in p.deltas::<S>(&["0.25", "0.1"])? {
        let r = verify_lower_bound::<S>(&LowerBoundClaim::Carlb(delta.clone()), &p.search_limits())?;
        verdicts.push(r.verdict);
        let mut row = r.to_json();
        row["delta"] = delta.to_json();
        rows.push(row);
    }
    Ok((worst(verdicts), json!({ "per_delta": rows })))
}

impl Claim for Carlb {
    fn id(&self) -> &'static str {
        "carlb"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["prop1.4"]
    }
    fn summary(&self) -> &'static str {
        "support-respecting assignments of carlb(delta) have prefix discrepancy at least 1 - delta"
    }
    fn check(&self, p: &ReproParams) -> Result<(Verdict, Value)> {
        dispatch!(p, carlb)
    }
}

pub struct Intlb;

/// Reported interval optimum of the 3x100 instance.
const INTLB_EXPECTED: (i64, i64) = (132, 100);

fn intlb<S: Scalar>(p: &ReproParams) -> Result<(Verdict, Value)> {
    let decision = verify_lower_bound::<S>(&LowerBoundClaim::Intlb, &p.search_limits())?;
    let (x, d) = gen_intlb::<S>();
    let opt = exact_min_interval_discrepancy(&x, &d, &p.search_limits())?;
    let expected = S::ratio(INTLB_EXPECTED.0, INTLB_EXPECTED.1);
    let tol = p.tol::<S>();
    let witness_value = match &opt.witness {
        Some(w) => Some(
            interval_discrepancy(&x, w, &d)?
                .interval
                .expect("interval fields requested"),
        ),
        None => None,
    };
    let optimum_verdict = match (opt.status, &opt.value) {
        (SearchStatus::Exact, Some(v)) => verdict((v.clone() - expected.clone()).abs() <= tol),
        _ => Verdict::Inconclusive,
    };
    let details = json!({
        "decision": decision.to_json(),
        "optimum": opt.to_json(),
        "expected_optimum": expected.to_json(),
        "witness_interval": witness_value.map(|w| json!({
            "value": w.value.to_json(),
            "row": w.row + 1,
            "start": w.start,
            "end": w.end,
        })),
    });
    Ok((worst([decision.verdict, optimum_verdict]), details))
}

impl Claim for Intlb {
    fn id(&self) -> &'static str {
        "intlb"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["prop1.5"]
    }
    fn summary(&self) -> &'static str {
        "the constant-column 3x100 instance has minimum interval discrepancy 1.32 > 1"
    }
    fn check(&self, p: &ReproParams) -> Result<(Verdict, Value)> {
        dispatch!(p, intlb)
    }
}

pub struct FifoGap;

fn fifo_gap<S: Scalar>(p: &ReproParams) -> Result<(Verdict, Value)> {
    let ms = p.m.map_or_else(|| vec![2, 4, 8, 16], |m| vec![m]);
    let delta = p.deltas::<S>(&["1e-4"])?.remove(0);
    let tol = p.tol::<S>();
    let mut rows = Vec::new();
    let mut ok = true;
    for m in ms {
        let inst = gen_fifo_lb::<S>(m, &delta)?;
        let fifo = fifo_schedule(&inst)?.max_flow_time;
        let batched = build_schedule(&inst, &fifo_lb_batch_assignment(m))?.max_flow_time;
        let md = S::from_i64(m as i64) * delta.clone();
        let fifo_formula = harmonic::<S>(m) - md.clone();
        let batch_formula = S::one() - md;
        let approx = approx_schedule_detailed(&inst, LpMethod::ConstraintGeneration)?;
        // The gap: FIFO is at least H_m - m delta times a feasible schedule.
        let gap_holds = fifo.clone() + tol.clone() >= fifo_formula.clone() * batched.clone();
        let approx_holds = approx.certified_ratio() <= approx_ratio::<S>(m) + tol.clone();
        ok &= gap_holds && approx_holds;
        rows.push(json!({
            "m": m,
            "fifo_max_flow_time": fifo.to_json(),
            "fifo_formula": format!("H_m - m*delta = {fifo_formula}"),
            "fifo_minus_formula": (fifo.clone() - fifo_formula.clone()).to_json(),
            "batch_max_flow_time": batched.to_json(),
            "batch_formula": format!("1 - m*delta = {batch_formula}"),
            "batch_minus_formula": (batched.clone() - batch_formula).to_json(),
            "fifo_over_batch": (fifo / batched).to_json(),
            "gap_holds": gap_holds,
            "approx_max_flow_time": approx.schedule.max_flow_time.to_json(),
            "approx_certified_ratio": approx.certified_ratio().to_json(),
            "approx_bound": approx_ratio::<S>(m).to_json(),
        }));
    }
    Ok((verdict(ok), json!({ "delta": delta.to_json(), "per_m": rows })))
}

impl Claim for FifoGap {
    fn id(&self) -> &'static str {
        "fifo-gap"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["fig2"]
    }
    fn summary(&self) -> &'static str {
        "FIFO is a factor H_m - m*delta worse than batch placement on the closing-time staircase"
    }
    fn check(&self, p: &ReproParams) -> Result<(Verdict, Value)> {
        dispatch!(p, fifo_gap)
    }
}

pub struct FlowArcs;

fn flow_arcs<S: Scalar>(p: &ReproParams) -> Result<(Verdict, Value)> {
    let trials = p.trials.unwrap_or(1000);
    let ms = p.ms(2..=8);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut worst_ratio = S::zero();
    let mut violations = 0;
    for k in 0..trials {
        let m = ms[rng.gen_range(0..ms.len())];
        let spec = RandomSpec {
            m,
            n: rng.gen_range(1..=50),
            seed: rng.gen(),
            weight_mode: if k % 2 == 0 { WeightMode::Uniform } else { WeightMode::TwoValued { low: 0.3 } },
            support_density: None,
        };
        let (x, d, _): (FractionalAssignment<S>, WeightVector<S>, _) = gen_random(&spec)?;
        let net = build_reduction(&x, &d, false)?;
        let y = earliest_deadline_round(&x, &d)?;
        let r = verify_arc_discrepancy(&net, &assignment_to_unsplittable(&net, &y)?)?;
        let ratio = r.max.clone() / r.d_max.clone();
        if r.max >= r.d_max {
            violations += 1;
        }
        if ratio > worst_ratio {
            worst_ratio = ratio;
        }
    }
    Ok((
        verdict(violations == 0),
        json!({
            "formula": "max over arcs |x_a - y_a| < max_j d_j",
            "trials": trials,
            "violations": violations,
            "worst_ratio": worst_ratio.to_json(),
        }),
    ))
}

impl Claim for FlowArcs {
    fn id(&self) -> &'static str {
        "flow-arcs"
    }
    fn aliases(&self) -> &'static [&'static str] {
        &["conj1"]
    }
    fn summary(&self) -> &'static str {
        "on the path network of an assignment, rounded flow differs from fractional flow by less than d_max on every arc"
    }
    fn check(&self, p: &ReproParams) -> Result<(Verdict, Value)> {
        dispatch!(p, flow_arcs)
    }
}

/// Every registered claim, in report order.
pub fn claims() -> Vec<Box<dyn Claim>> {
    vec![
        Box::new(RoundingBound),
        Box::new(ScheduleRatio),
        Box::new(Caplb),
        Box::new(Carlb),
        Box::new(Intlb),
        Box::new(FifoGap),
        Box::new(FlowArcs),
    ]
}

pub fn claim_by_name(name: &str) -> Result<Box<dyn Claim>> {
    let all = claims();
    let ids: Vec<&str> = all.iter().flat_map(|c| std::iter::once(c.id()).chain(c.aliases().iter().copied())).collect();
    claims()
        .into_iter()
        .find(|c| c.id() == name || c.aliases().contains(&name))
        .ok_or_else(|| Error::unknown("claim", name, &ids))
}
