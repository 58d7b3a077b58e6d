use std::path::Path;
use std::time::Duration;

use serde_json::{json, Value};

use chairman::flow::{assignment_to_unsplittable, build_reduction, verify_arc_discrepancy};
use chairman::instances::{gen_caplb, gen_carlb, gen_fifo_lb, gen_intlb, gen_random, gen_random_schedule, RandomSpec, ScheduleSpec, WeightMode};
use chairman::io::{
    assignment_to_json, instance_to_json, integral_from_json, integral_to_json, load_assignment, load_instance,
    open_times_from_json, read_json,
};
use chairman::oracle::{oracle_by_name, Objective, SearchConfig};
use chairman::repro::{claim_by_name, claims, ReproParams};
use chairman::rounding::{rounder_by_name, round_with_closing_times_using, round_with_open_times_using};
use chairman::scheduling::{
    approx_ratio, approx_schedule_detailed, fifo_schedule, interval_excess_factor, solve_lp_with, LpMethod, Schedule,
    SchedulingInstance,
};
use chairman::oracle::Verdict;
use chairman::{one_sided_interval_excess, prefix_discrepancy, Error, NumericMode, Rational, Result, Scalar};

use crate::render::Body;
use crate::{Cli, Command, FlowCommand, GenCommand, LpMethodArg, ObjectiveArg, Outcome, RunConfig, ScheduleCommand, WeightsArg};

pub fn run(cli: &Cli) -> Result<Outcome> {
    match cli.run.mode() {
        NumericMode::Exact => run_in::<Rational>(cli),
        NumericMode::Float => run_in::<f64>(cli),
    }
}

fn ok(body: Body) -> Result<Outcome> {
    Ok(Outcome { body, failed: false })
}

/// Slack for bound checks: zero in exact mode.
fn tolerance<S: Scalar>(run: &RunConfig) -> Result<S> {
    if S::is_exact() {
        Ok(S::zero())
    } else {
        S::from_f64(run.tolerance)
    }
}

fn time_limit(run: &RunConfig) -> Result<Option<Duration>> {
    match run.time_limit {
        None => Ok(None),
        Some(t) if t.is_finite() && t > 0.0 => Ok(Some(Duration::from_secs_f64(t))),
        Some(t) => Err(Error::Invalid(format!("time limit must be positive, got {t}"))),
    }
}

fn run_in<S: Scalar>(cli: &Cli) -> Result<Outcome> {
    let run = &cli.run;
    match &cli.command {
        Command::Round(args) => round::<S>(run, args),
        Command::Oracle(args) => oracle::<S>(run, args),
        Command::Gen(g) => gen::<S>(run, g),
        Command::Schedule(s) => schedule::<S>(run, s),
        Command::Flow(f) => flow::<S>(run, f),
        Command::Repro(args) => repro(run, args),
    }
}

fn round<S: Scalar>(run: &RunConfig, args: &crate::RoundArgs) -> Result<Outcome> {
    let (x, d) = load_assignment::<S>(&args.input)?;
    let rounder = rounder_by_name::<S>(&args.rounder)?;
    let tol = tolerance::<S>(run)?;
    let m = x.m();
    let mut report = json!({
        "rounder": rounder.name(),
        "m": m,
        "n": x.n(),
        "d_max": d.max().to_json(),
    });
    let mut failed = false;
    let y = if let Some(path) = &args.closing_times {
        let inst: SchedulingInstance<S> = load_instance(path)?;
        if inst.m() != m || inst.n() != x.n() {
            return Err(Error::Dimension(format!(
                "instance has {} machines and {} jobs, assignment is {m} x {}",
                inst.m(),
                inst.n(),
                x.n()
            )));
        }
        let y = round_with_closing_times_using(rounder.as_ref(), &x, &d, &inst.releases(), inst.machines())?;
        let excess = one_sided_interval_excess(&x, &y, &d)?;
        let bound = interval_excess_factor::<S>(m) * d.max().clone();
        let holds = excess <= bound.clone() + tol;
        failed |= !holds;
        report["interval_excess"] = excess.to_json();
        report["bound"] = bound.to_json();
        report["bound_formula"] = json!(format!(
            "interval overload <= (2 - 1/(m-1)) * d_max = {} * {}",
            interval_excess_factor::<S>(m),
            d.max()
        ));
        report["holds"] = json!(holds);
        y
    } else {
        let y = match &args.open_times {
            Some(path) => {
                let a = open_times_from_json(&read_json(path)?, x.n())?;
                round_with_open_times_using(rounder.as_ref(), &x, &d, &a)?
            }
            None => rounder.round(&x, &d)?,
        };
        let r = prefix_discrepancy(&x, &y, &d)?;
        report["prefix_discrepancy"] = r.max_prefix_abs.to_json();
        report["argmax"] = json!({ "row": r.argmax_prefix.0 + 1, "t": r.argmax_prefix.1 });
        match rounder.prefix_bound(m) {
            Some(factor) => {
                let bound = factor.clone() * d.max().clone();
                let holds = r.max_prefix_abs <= bound.clone() + tol;
                failed |= !holds;
                report["bound"] = bound.to_json();
                report["bound_formula"] = json!(format!("prefix discrepancy <= {factor} * d_max = {factor} * {}", d.max()));
                report["holds"] = json!(holds);
            }
            None => {
                report["bound"] = Value::Null;
                report["holds"] = Value::Null;
            }
        }
        y
    };
    report["assignment"] = json!(y.to_one_based());
    if let Some(out) = &args.output {
        write_json(out, &integral_to_json(&y))?;
    }
    Ok(Outcome {
        body: Body::json(report),
        failed,
    })
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

fn oracle<S: Scalar>(run: &RunConfig, args: &crate::OracleArgs) -> Result<Outcome> {
    let (x, d) = load_assignment::<S>(&args.input)?;
    let objective = match args.objective {
        ObjectiveArg::Prefix => Objective::Prefix,
        ObjectiveArg::Interval => Objective::Interval,
    };
    let cfg = SearchConfig {
        objective,
        support: args.support.then(|| chairman::SupportMask::support_of(&x)),
        threshold: args.threshold.as_deref().map(S::parse).transpose()?,
        inclusive: args.inclusive,
        node_limit: run.node_limit,
        time_limit: time_limit(run)?,
        memoize: !args.no_memo,
    };
    let method = oracle_by_name::<S>(&args.method)?;
    let result = method.search(&x, &d, &cfg)?;
    let mut v = result.to_json();
    v["objective"] = json!(objective.to_string());
    v["method"] = json!(method.name());
    v["threshold"] = json!(cfg.threshold.as_ref().map(Scalar::to_json));
    v["inclusive"] = json!(cfg.inclusive);
    ok(Body::json(v))
}

fn gen<S: Scalar>(run: &RunConfig, g: &GenCommand) -> Result<Outcome> {
    let v = match g {
        GenCommand::Caplb { m } => {
            let (x, d) = gen_caplb::<S>(*m)?;
            assignment_to_json(&x, &d)
        }
        GenCommand::Carlb { delta } => {
            let (x, _, d) = gen_carlb::<S>(&S::parse(delta)?)?;
            assignment_to_json(&x, &d)
        }
        GenCommand::Intlb => {
            let (x, d) = gen_intlb::<S>();
            assignment_to_json(&x, &d)
        }
        GenCommand::Fifo { m, delta } => instance_to_json(&gen_fifo_lb::<S>(*m, &S::parse(delta)?)?),
        GenCommand::Random(a) if a.schedule => instance_to_json(&gen_random_schedule::<S>(&ScheduleSpec {
            m: a.m,
            n: a.n,
            seed: run.seed,
        })?),
        GenCommand::Random(a) => {
            let spec = RandomSpec {
                m: a.m,
                n: a.n,
                seed: run.seed,
                weight_mode: match a.weights {
                    WeightsArg::Uniform => WeightMode::Uniform,
                    WeightsArg::Ones => WeightMode::Ones,
                    WeightsArg::TwoValued => WeightMode::TwoValued { low: a.low },
                },
                support_density: a.density,
            };
            let (x, d, _) = gen_random::<S>(&spec)?;
            assignment_to_json(&x, &d)
        }
    };
    ok(Body::json(v))
}

fn schedule_json<S: Scalar>(inst: &SchedulingInstance<S>, s: &Schedule<S>) -> Value {
    json!({
        "assignment": s.assignment.to_one_based(),
        "start": s.start.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "completion": s.completion.iter().map(Scalar::to_json).collect::<Vec<_>>(),
        "max_flow_time": s.max_flow_time.to_json(),
        "critical_job": s.critical_job + 1,
        "busy_time": s.busy_time(inst).iter().map(Scalar::to_json).collect::<Vec<_>>(),
    })
}

fn schedule<S: Scalar>(run: &RunConfig, cmd: &ScheduleCommand) -> Result<Outcome> {
    let (ScheduleCommand::SolveLp(args) | ScheduleCommand::Approx(args) | ScheduleCommand::Fifo(args) | ScheduleCommand::Compare(args)) = cmd;
    let inst: SchedulingInstance<S> = load_instance(&args.input)?;
    let method = match args.lp_method {
        LpMethodArg::Cuts => LpMethod::ConstraintGeneration,
        LpMethodArg::Full => LpMethod::Full,
    };
    let tol = tolerance::<S>(run)?;
    let m = inst.m();
    match cmd {
        ScheduleCommand::SolveLp(_) => {
            let lp = solve_lp_with(&inst, method)?;
            let rows: Vec<Value> = (0..lp.x.m())
                .map(|i| Value::Array(lp.x.row(i).iter().map(Scalar::to_json).collect()))
                .collect();
            ok(Body::json(json!({
                "T": lp.value.to_json(),
                "x": rows,
                "tight_rows": lp.certificate.iter().map(|r| json!({
                    "machine": r.machine + 1,
                    "start": r.start + 1,
                    "end": r.end + 1,
                })).collect::<Vec<_>>(),
                "rounds": lp.rounds,
                "pivots": lp.pivots,
            })))
        }
        ScheduleCommand::Approx(_) => {
            let out = approx_schedule_detailed(&inst, method)?;
            let ratio = out.certified_ratio();
            let bound = approx_ratio::<S>(m);
            let excess_bound = interval_excess_factor::<S>(m) * inst.d_max();
            let holds = ratio <= bound.clone() + tol.clone() && out.interval_excess <= excess_bound.clone() + tol;
            let mut v = schedule_json(&inst, &out.schedule);
            v["lp_value"] = out.lp.value.to_json();
            v["lower_bound"] = out.lower_bound.to_json();
            v["certified_ratio"] = ratio.to_json();
            v["bound"] = bound.to_json();
            v["bound_formula"] = json!(format!("max flow-time <= (3 - 1/(m-1)) * max(T, d_max) with m = {m}: {bound} * {}", out.lower_bound));
            v["interval_excess"] = out.interval_excess.to_json();
            v["interval_excess_bound"] = excess_bound.to_json();
            v["holds"] = json!(holds);
            Ok(Outcome {
                body: Body::json(v),
                failed: !holds,
            })
        }
        ScheduleCommand::Fifo(_) => ok(Body::json(schedule_json(&inst, &fifo_schedule(&inst)?))),
        ScheduleCommand::Compare(_) => {
            let out = approx_schedule_detailed(&inst, method)?;
            let fifo = fifo_schedule(&inst)?;
            let ratio = out.certified_ratio();
            let holds = ratio <= approx_ratio::<S>(m) + tol;
            Ok(Outcome {
                body: Body::table(json!({
                    "T": out.lp.value.to_json(),
                    "d_max": inst.d_max().to_json(),
                    "fifo_flow_time": fifo.max_flow_time.to_json(),
                    "approx_flow_time": out.schedule.max_flow_time.to_json(),
                    "certified_ratio": ratio.to_json(),
                    "ratio_bound": approx_ratio::<S>(m).to_json(),
                })),
                failed: !holds,
            })
        }
    }
}

fn flow<S: Scalar>(run: &RunConfig, cmd: &FlowCommand) -> Result<Outcome> {
    match cmd {
        FlowCommand::Build { input, carpool } => {
            let (x, d) = load_assignment::<S>(input)?;
            let net = build_reduction(&x, &d, *carpool)?;
            let arcs: Vec<Value> = net
                .arcs()
                .iter()
                .zip(net.flow())
                .map(|(a, f)| json!({ "from": a.from.name(), "to": a.to.name(), "flow": f.to_json() }))
                .collect();
            Ok(Outcome {
                body: Body {
                    value: json!({ "nodes": net.node_count(), "carpool": net.is_carpool(), "arcs": arcs }),
                    default: crate::Format::Table,
                    table: Some(net.to_edge_list(net.flow())),
                },
                failed: false,
            })
        }
        FlowCommand::Verify {
            input,
            assignment,
            rounder,
            carpool,
        } => {
            let (x, d) = load_assignment::<S>(input)?;
            let net = build_reduction(&x, &d, *carpool)?;
            let y = match assignment {
                Some(path) => integral_from_json(&read_json(path)?, x.m())?,
                None => rounder_by_name::<S>(rounder)?.round(&x, &d)?,
            };
            let r = verify_arc_discrepancy(&net, &assignment_to_unsplittable(&net, &y)?)?;
            let below = r.max < r.d_max.clone() + tolerance::<S>(run)?;
            let argmax = net.arcs().iter().find(|a| a.kind == r.argmax).map(|a| format!("{}->{}", a.from.name(), a.to.name()));
            Ok(Outcome {
                body: Body::json(json!({
                    "max": r.max.to_json(),
                    "argmax": argmax,
                    "path_max": r.path_max.to_json(),
                    "internal_max": r.internal_max.to_json(),
                    "source_max": r.source_max.to_json(),
                    "terminal_max": r.terminal_max.to_json(),
                    "d_max": r.d_max.to_json(),
                    "prefix_discrepancy": prefix_discrepancy(&x, &y, &d)?.max_prefix_abs.to_json(),
                    "below_d_max": below,
                    "assignment": y.to_one_based(),
                })),
                failed: !below,
            })
        }
    }
}

fn repro(run: &RunConfig, args: &crate::ReproArgs) -> Result<Outcome> {
    if args.list {
        let list: Vec<Value> = claims()
            .iter()
            .map(|c| json!({ "id": c.id(), "aliases": c.aliases(), "summary": c.summary() }))
            .collect();
        return ok(Body::json(Value::Array(list)));
    }
    let params = ReproParams {
        m: args.m,
        delta: args.delta.clone(),
        trials: args.trials,
        seed: run.seed,
        mode: run.mode(),
        tolerance: run.tolerance,
        node_limit: run.node_limit,
        time_limit: time_limit(run)?,
        timings: args.timings,
    };
    let selected = match &args.claim {
        Some(name) => vec![claim_by_name(name)?],
        None => claims(),
    };
    let mut reports = Vec::new();
    let mut failed = false;
    for claim in selected {
        let r = claim.run(&params)?;
        failed |= r.verdict == Verdict::Fail;
        reports.push(r.to_json());
    }
    let value = if args.all { Value::Array(reports) } else { reports.remove(0) };
    Ok(Outcome {
        body: Body::json(value),
        failed,
    })
}
