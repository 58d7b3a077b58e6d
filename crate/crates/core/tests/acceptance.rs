//! Acceptance criteria 1-10. Each criterion prints one PASS/FAIL line to
//! stderr (uncaptured). Reference values come from brute force and direct
//! simulation written here, not from the library's own checks.

use std::io::Write;
use std::time::{Duration, Instant};

use chairman::flow::{assignment_to_unsplittable, build_reduction, verify_arc_discrepancy};
use chairman::instances::{
    fifo_lb_batch_assignment, gen_caplb, gen_carlb, gen_fifo_lb, gen_intlb, gen_random, gen_random_schedule,
    RandomSpec, ScheduleSpec, WeightMode,
};
use chairman::oracle::{
    exact_min_interval_discrepancy, exact_min_prefix_discrepancy, oracle_by_name, verify_lower_bound, LowerBoundClaim,
    SearchConfig, SearchStatus, Verdict,
};
use chairman::scheduling::{approx_schedule_detailed, fifo_schedule, LpMethod, SchedulingInstance};
use chairman::{earliest_deadline_round, FractionalAssignment, IntegralAssignment, Rational, Scalar, SupportMask, WeightVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FLOAT_TOL: f64 = 1e-9;
const SCHEDULE_TOL: f64 = 1e-7;
const SEED: u64 = 20240607;

struct Line {
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &str, line: &Line) {
    let status = if line.pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr();
    let _ = writeln!(err, "criterion {id:>2} [{name}]: {status}  {}", line.detail);
}

fn max<S: Scalar>(a: S, b: S) -> S {
    S::max_of(a, b)
}

/// `max_{i,t} |sum_{j<=t} d_j (x_ij - y_ij)|` by direct summation.
fn naive_prefix<S: Scalar>(x: &FractionalAssignment<S>, y: &IntegralAssignment, d: &WeightVector<S>) -> S {
    let mut best = S::zero();
    for i in 0..x.m() {
        let mut acc = S::zero();
        for j in 0..x.n() {
            acc += d.get(j).clone() * x.get(i, j).clone();
            if y.row_of(j) == i {
                acc -= d.get(j).clone();
            }
            best = max(best, acc.abs());
        }
    }
    best
}

/// `max_{i, s<=t} |sum_{j in [s,t]} d_j (x_ij - y_ij)|` over every interval.
fn naive_interval<S: Scalar>(x: &FractionalAssignment<S>, y: &IntegralAssignment, d: &WeightVector<S>) -> S {
    let mut best = S::zero();
    for i in 0..x.m() {
        for s in 0..x.n() {
            let mut acc = S::zero();
            for t in s..x.n() {
                acc += d.get(t).clone() * x.get(i, t).clone();
                if y.row_of(t) == i {
                    acc -= d.get(t).clone();
                }
                best = max(best, acc.abs());
            }
        }
    }
    best
}

/// Every assignment (optionally restricted to a mask) in odometer order.
fn for_each_assignment(m: usize, n: usize, mask: Option<&SupportMask>, mut f: impl FnMut(&IntegralAssignment)) {
    let choices: Vec<Vec<usize>> = (0..n)
        .map(|j| (0..m).filter(|&i| mask.is_none_or(|mk| mk.allows(i, j))).collect())
        .collect();
    let mut digits = vec![0usize; n];
    loop {
        let rows = digits.iter().enumerate().map(|(j, &k)| choices[j][k]).collect();
        f(&IntegralAssignment::new(rows, m).unwrap());
        let mut j = 0;
        loop {
            if j == n {
                return;
            }
            digits[j] += 1;
            if digits[j] < choices[j].len() {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
    }
}

fn brute_min<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    mask: Option<&SupportMask>,
    objective: fn(&FractionalAssignment<S>, &IntegralAssignment, &WeightVector<S>) -> S,
) -> S {
    let mut best: Option<S> = None;
    for_each_assignment(x.m(), x.n(), mask, |y| {
        let v = objective(x, y, d);
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v);
        }
    });
    best.unwrap()
}

/// Max flow time of `y`: each machine runs its jobs in release order.
fn simulate<S: Scalar>(inst: &SchedulingInstance<S>, y: &IntegralAssignment) -> S {
    let mut free = vec![S::zero(); inst.m()];
    let mut worst = S::zero();
    for (j, job) in inst.jobs().iter().enumerate() {
        let i = y.row_of(j);
        assert!(inst.admits(i, j), "job {j} on closed machine {i}");
        let c = max(free[i].clone(), job.release.clone()) + job.processing.clone();
        worst = max(worst, c.clone() - job.release.clone());
        free[i] = c;
    }
    worst
}

/// Release-order list scheduling onto the open machine that frees up first.
fn simulate_fifo<S: Scalar>(inst: &SchedulingInstance<S>) -> S {
    let mut free = vec![S::zero(); inst.m()];
    let mut rows = Vec::new();
    for (j, job) in inst.jobs().iter().enumerate() {
        let i = (0..inst.m())
            .filter(|&i| inst.admits(i, j))
            .min_by(|&a, &b| {
                let fa = max(free[a].clone(), job.release.clone());
                let fb = max(free[b].clone(), job.release.clone());
                fa.partial_cmp(&fb).unwrap().then(a.cmp(&b))
            })
            .unwrap();
        free[i] = max(free[i].clone(), job.release.clone()) + job.processing.clone();
        rows.push(i);
    }
    simulate(inst, &IntegralAssignment::new(rows, inst.m()).unwrap())
}

fn harmonic(m: usize) -> Rational {
    (1..=m as i64).map(|k| Rational::ratio(1, k)).sum()
}

fn random_spec(rng: &mut ChaCha8Rng, m: usize, k: usize) -> RandomSpec {
    RandomSpec {
        m,
        n: rng.gen_range(1..=50),
        seed: rng.gen(),
        weight_mode: if k % 2 == 0 {
            WeightMode::Uniform
        } else {
            WeightMode::TwoValued { low: 0.3 }
        },
        support_density: None,
    }
}

fn criterion_1() -> Line {
    let start = Instant::now();
    let mut violations = (0, 0);
    let mut worst = 0.0f64;
    let mut instances = 0;
    for m in 2..=8usize {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + m as u64);
        let bound_e = Rational::one() - Rational::ratio(1, 2 * m as i64 - 2);
        let bound_f = bound_e.to_f64();
        for k in 0..1000 {
            let spec = random_spec(&mut rng, m, k);
            let (x, d, _) = gen_random::<Rational>(&spec).unwrap();
            let y = earliest_deadline_round(&x, &d).unwrap();
            let disc = naive_prefix(&x, &y, &d);
            if disc > bound_e.clone() * d.max().clone() {
                violations.0 += 1;
            }
            worst = worst.max((disc / d.max().clone()).to_f64());

            let (xf, df, _) = gen_random::<f64>(&spec).unwrap();
            let yf = earliest_deadline_round(&xf, &df).unwrap();
            if naive_prefix(&xf, &yf, &df) > bound_f * df.max() + FLOAT_TOL {
                violations.1 += 1;
            }
            instances += 1;
        }
    }
    let tight = (2..=8usize).all(|m| {
        let (x, d) = gen_caplb::<Rational>(m).unwrap();
        naive_prefix(&x, &earliest_deadline_round(&x, &d).unwrap(), &d)
            == Rational::one() - Rational::ratio(1, 2 * m as i64 - 2)
    });
    let elapsed = start.elapsed();
    Line {
        pass: violations == (0, 0) && tight && elapsed < Duration::from_secs(10),
        detail: format!(
            "{instances} instances per mode, violations exact={} float={}, worst disc/d_max={worst:.6}, caplb equality m=2..8: {tight}, {:.2}s (<10s)",
            violations.0,
            violations.1,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Line {
    let start = Instant::now();
    let mut ok = true;
    let mut values = Vec::new();
    for m in 2..=6usize {
        let (x, d) = gen_caplb::<Rational>(m).unwrap();
        let bound = Rational::one() - Rational::ratio(1, 2 * m as i64 - 2);
        let brute = brute_min(&x, &d, None, naive_prefix);
        let verdict = verify_lower_bound::<Rational>(&LowerBoundClaim::Caplb(m), &SearchConfig::default()).unwrap();
        ok &= brute >= bound && verdict.verdict == Verdict::Pass && verdict.optimum.as_ref() == Some(&brute);
        values.push(format!("m={m}:{brute}"));
    }
    let elapsed = start.elapsed();
    Line {
        pass: ok && elapsed < Duration::from_secs(5),
        detail: format!("min prefix discrepancy {} (each = 1 - 1/(2m-2)), {:.2}s (<5s)", values.join(" "), elapsed.as_secs_f64()),
    }
}

fn criterion_3() -> Line {
    let start = Instant::now();
    let mut ok = true;
    let mut values = Vec::new();
    for (p, q) in [(1, 4), (1, 10)] {
        let delta = Rational::ratio(p, q);
        let (x, mask, d) = gen_carlb::<Rational>(&delta).unwrap();
        let bound = Rational::one() - delta.clone();
        let brute = brute_min(&x, &d, Some(&mask), naive_prefix);
        let verdict = verify_lower_bound::<Rational>(&LowerBoundClaim::Carlb(delta.clone()), &SearchConfig::default()).unwrap();
        ok &= brute >= bound && verdict.verdict == Verdict::Pass;
        values.push(format!("delta={delta}: n={} min={brute}", x.n()));
    }
    let elapsed = start.elapsed();
    Line {
        pass: ok && elapsed < Duration::from_secs(10),
        detail: format!("{}, {:.2}s (<10s)", values.join(", "), elapsed.as_secs_f64()),
    }
}

fn criterion_4() -> Line {
    let (x, d) = gen_intlb::<Rational>();
    let start = Instant::now();
    let decision = exact_min_interval_discrepancy(&x, &d, &SearchConfig::interval().at_most(Rational::one())).unwrap();
    let decision_time = start.elapsed();
    let start = Instant::now();
    let opt = exact_min_interval_discrepancy(&x, &d, &SearchConfig::interval()).unwrap();
    let opt_time = start.elapsed();
    let expected = Rational::ratio(132, 100);
    let witness_value = opt.witness.as_ref().map(|w| naive_interval(&x, w, &d));
    let pass = decision.status == SearchStatus::No
        && decision_time < Duration::from_secs(300)
        && opt.status == SearchStatus::Exact
        && opt.value.as_ref() == Some(&expected)
        && witness_value.as_ref() == Some(&expected);
    Line {
        pass,
        detail: format!(
            "decision <= 1: {:?} in {:.3}s ({} nodes); optimum {:?} = {} in {:.2}s; witness interval discrepancy {}",
            decision.status,
            decision_time.as_secs_f64(),
            decision.nodes_explored,
            opt.status,
            opt.value.map_or("-".into(), |v| v.to_string()),
            opt_time.as_secs_f64(),
            witness_value.map_or("-".into(), |v| v.to_string()),
        ),
    }
}

/// Measured values of criterion 5, also used to pin the known deviation.
struct FifoGap {
    m: usize,
    fifo: Rational,
    fifo_formula: Rational,
    batch: Rational,
    batch_formula: Rational,
}

fn fifo_gap_rows(delta: &Rational) -> Vec<FifoGap> {
    [2usize, 4, 8, 16]
        .into_iter()
        .map(|m| {
            let inst = gen_fifo_lb::<Rational>(m, delta).unwrap();
            let fifo = simulate_fifo(&inst);
            assert_eq!(fifo, fifo_schedule(&inst).unwrap().max_flow_time, "library FIFO disagrees with simulation");
            let md = Rational::from_i64(m as i64) * delta.clone();
            FifoGap {
                m,
                fifo,
                fifo_formula: harmonic(m) - md.clone(),
                batch: simulate(&inst, &fifo_lb_batch_assignment(m)),
                batch_formula: Rational::one() - md,
            }
        })
        .collect()
}

fn criterion_5() -> (Line, Vec<FifoGap>) {
    let start = Instant::now();
    let delta = Rational::ratio(1, 10_000);
    let rows = fifo_gap_rows(&delta);
    let elapsed = start.elapsed();
    let within = |a: &Rational, b: &Rational| (a.clone() - b.clone()).abs().to_f64() <= FLOAT_TOL;
    let fifo_ok = rows.iter().all(|r| within(&r.fifo, &r.fifo_formula));
    let batch_ok = rows.iter().all(|r| within(&r.batch, &r.batch_formula));
    let detail = rows
        .iter()
        .map(|r| {
            format!(
                "m={}: fifo={:.6} (H_m-m*delta={:.6}, diff {}) batch={} (1-m*delta={}, diff {})",
                r.m,
                r.fifo.to_f64(),
                r.fifo_formula.to_f64(),
                r.fifo.clone() - r.fifo_formula.clone(),
                r.batch,
                r.batch_formula.to_f64(),
                r.batch.clone() - r.batch_formula.clone()
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    (
        Line {
            pass: fifo_ok && batch_ok && elapsed < Duration::from_secs(1),
            detail: format!("{detail}; {:.3}s (<1s)", elapsed.as_secs_f64()),
        },
        rows,
    )
}

/// One run over the 500 random closing-time instances, shared by criteria 6 and 7.
struct ScheduleRun {
    ratio_violations: usize,
    excess_violations: usize,
    worst_ratio: f64,
    worst_excess: f64,
    fifo_lb_ok: bool,
    elapsed: Duration,
}

/// `max_{i, s<=t} sum_{j in [s,t]} d_j (y_ij - x_ij)` by double loop.
fn naive_excess(x: &FractionalAssignment<Rational>, y: &IntegralAssignment, d: &WeightVector<Rational>) -> Rational {
    let mut best: Option<Rational> = None;
    for i in 0..x.m() {
        for s in 0..x.n() {
            let mut acc = Rational::zero();
            for t in s..x.n() {
                if y.row_of(t) == i {
                    acc += d.get(t).clone();
                }
                acc -= d.get(t).clone() * x.get(i, t).clone();
                if best.as_ref().is_none_or(|b| acc > *b) {
                    best = Some(acc.clone());
                }
            }
        }
    }
    best.unwrap()
}

fn schedule_run() -> ScheduleRun {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let tol = Rational::from_f64(SCHEDULE_TOL).unwrap();
    let mut run = ScheduleRun {
        ratio_violations: 0,
        excess_violations: 0,
        worst_ratio: 0.0,
        worst_excess: 0.0,
        fifo_lb_ok: true,
        elapsed: Duration::ZERO,
    };
    for _ in 0..500 {
        let m = rng.gen_range(2..=5usize);
        let spec = ScheduleSpec {
            m,
            n: rng.gen_range(1..=40),
            seed: rng.gen(),
        };
        let inst = gen_random_schedule::<Rational>(&spec).unwrap();
        let out = approx_schedule_detailed(&inst, LpMethod::ConstraintGeneration).unwrap();
        let flow = simulate(&inst, &out.schedule.assignment);
        let lower = max(out.lp.value.clone(), inst.d_max());
        let ratio = flow / lower.clone();
        let alpha = Rational::from_i64(3) - Rational::ratio(1, m as i64 - 1);
        if ratio > alpha + tol.clone() {
            run.ratio_violations += 1;
        }
        run.worst_ratio = run.worst_ratio.max(ratio.to_f64());

        let excess = naive_excess(&out.lp.x, &out.schedule.assignment, &inst.weights()) / inst.d_max();
        let beta = Rational::from_i64(2) - Rational::ratio(1, m as i64 - 1);
        if excess > beta {
            run.excess_violations += 1;
        }
        run.worst_excess = run.worst_excess.max(excess.to_f64());
    }
    for m in [2usize, 4, 8] {
        let inst = gen_fifo_lb::<Rational>(m, &Rational::ratio(1, 10_000)).unwrap();
        let out = approx_schedule_detailed(&inst, LpMethod::ConstraintGeneration).unwrap();
        let ratio = simulate(&inst, &out.schedule.assignment) / max(out.lp.value.clone(), inst.d_max());
        run.fifo_lb_ok &= ratio <= Rational::from_i64(3) - Rational::ratio(1, m as i64 - 1) + tol.clone();
    }
    run.elapsed = start.elapsed();
    run
}

fn criterion_6(run: &ScheduleRun) -> Line {
    Line {
        pass: run.ratio_violations == 0 && run.fifo_lb_ok && run.elapsed < Duration::from_secs(120),
        detail: format!(
            "500 instances, violations={}, worst flow/max(T,d_max)={:.4}, fifo_lb m=2,4,8 ok: {}, {:.2}s (<120s)",
            run.ratio_violations,
            run.worst_ratio,
            run.fifo_lb_ok,
            run.elapsed.as_secs_f64()
        ),
    }
}

fn criterion_7(run: &ScheduleRun) -> Line {
    Line {
        pass: run.excess_violations == 0,
        detail: format!(
            "500 instances, violations={}, worst overload/d_max={:.4}",
            run.excess_violations, run.worst_excess
        ),
    }
}

fn criterion_8() -> Line {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let (mut below, mut path_equal, mut internal_equal) = (0, 0, 0);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let m = rng.gen_range(2..=8usize);
        let spec = random_spec(&mut rng, m, k);
        let (x, d, _) = gen_random::<Rational>(&spec).unwrap();
        let net = build_reduction(&x, &d, false).unwrap();
        let y = earliest_deadline_round(&x, &d).unwrap();
        let r = verify_arc_discrepancy(&net, &assignment_to_unsplittable(&net, &y).unwrap()).unwrap();
        let prefix = naive_prefix(&x, &y, &d);
        below += usize::from(r.max < r.d_max);
        path_equal += usize::from(r.path_max == prefix);
        internal_equal += usize::from(r.internal_max == prefix);
        worst = worst.max((r.max / r.d_max).to_f64());
    }
    let elapsed = start.elapsed();
    Line {
        pass: below == 1000 && path_equal == 1000 && elapsed < Duration::from_secs(30),
        detail: format!(
            "max arc discrepancy < d_max on {below}/1000 (worst ratio {worst:.4}); source+internal max = prefix discrepancy on {path_equal}/1000 (internal only: {internal_equal}/1000); {:.2}s (<30s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_9() -> Line {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let bnb = oracle_by_name::<Rational>("branch-and-bound").unwrap();
    let enumerate = oracle_by_name::<Rational>("enumerate").unwrap();
    let (mut checked, mut mismatches) = (0, 0);
    for m in 2..=3usize {
        for n in 1..=10usize {
            if m.pow(n as u32) > 100_000 {
                continue;
            }
            for _ in 0..3 {
                let spec = RandomSpec {
                    m,
                    n,
                    seed: rng.gen(),
                    weight_mode: WeightMode::TwoValued { low: 0.5 },
                    support_density: None,
                };
                let (x, d, _) = gen_random::<Rational>(&spec).unwrap();
                let a = bnb.search(&x, &d, &SearchConfig::prefix()).unwrap().value.unwrap();
                let b = enumerate.search(&x, &d, &SearchConfig::prefix()).unwrap().value.unwrap();
                let alg = naive_prefix(&x, &earliest_deadline_round(&x, &d).unwrap(), &d);
                let mut ok = a == b && alg >= a;
                if m.pow(n as u32) <= 3usize.pow(7) {
                    ok &= a == brute_min(&x, &d, None, naive_prefix);
                    let iv = exact_min_interval_discrepancy(&x, &d, &SearchConfig::interval()).unwrap().value.unwrap();
                    ok &= iv == brute_min(&x, &d, None, naive_interval);
                }
                ok &= exact_min_prefix_discrepancy(&x, &d, &SearchConfig { memoize: false, ..SearchConfig::prefix() })
                    .unwrap()
                    .value
                    == Some(a.clone());
                checked += 1;
                mismatches += usize::from(!ok);
            }
        }
    }
    Line {
        pass: mismatches == 0,
        detail: format!(
            "{checked} instances (m in 2..3, m^n <= 1e5): branch-and-bound = enumeration, Earliest Deadline >= optimum, mismatches={mismatches}, {:.2}s",
            start.elapsed().as_secs_f64()
        ),
    }
}

/// Soft: returns whether the ratio was in range, plus the measured ratio.
fn criterion_10() -> (Line, bool) {
    let time = |n: usize| -> Duration {
        let spec = RandomSpec::new(8, n, SEED);
        let (x, d, _) = gen_random::<f64>(&spec).unwrap();
        (0..5)
            .map(|_| {
                let t = Instant::now();
                std::hint::black_box(earliest_deadline_round(&x, &d).unwrap());
                t.elapsed()
            })
            .min()
            .unwrap()
    };
    let (a, b) = (time(100_000), time(200_000));
    let ratio = b.as_secs_f64() / a.as_secs_f64();
    let in_range = (1.5..=2.8).contains(&ratio);
    (
        Line {
            pass: in_range,
            detail: format!(
                "m=8 float: n=1e5 {:.1}ms, n=2e5 {:.1}ms, ratio {ratio:.2} (target [1.5, 2.8]){}",
                a.as_secs_f64() * 1e3,
                b.as_secs_f64() * 1e3,
                if in_range { "" } else { "; soft criterion, flagged only" }
            ),
        },
        in_range,
    )
}

#[test]
fn acceptance_criteria() {
    let c1 = criterion_1();
    report(1, "rounding bound", &c1);
    let c2 = criterion_2();
    report(2, "caplb tightness", &c2);
    let c3 = criterion_3();
    report(3, "carlb support bound", &c3);
    let c4 = criterion_4();
    report(4, "intlb interval optimum", &c4);
    let (c5, gap) = criterion_5();
    report(5, "FIFO gap values", &c5);
    let run = schedule_run();
    let c6 = criterion_6(&run);
    report(6, "schedule ratio", &c6);
    let c7 = criterion_7(&run);
    report(7, "interval overload", &c7);
    let c8 = criterion_8();
    report(8, "arc discrepancy", &c8);
    let c9 = criterion_9();
    report(9, "oracle soundness", &c9);
    let (c10, _) = criterion_10();
    report(10, "linear time (soft)", &c10);

    for (id, line) in [(1, &c1), (2, &c2), (3, &c3), (4, &c4), (6, &c6), (7, &c7), (8, &c8), (9, &c9)] {
        assert!(line.pass, "criterion {id} failed: {}", line.detail);
    }

    // Criterion 5 is expected to fail: the simulated values differ from the
    // stated formulas. Pin the measured deviation exactly so any other
    // change still breaks the build: FIFO exceeds H_m - m*delta by exactly
    // delta, and the batch schedule has flow time exactly 1, which equals the
    // LP lower bound, so 1 - m*delta is below the optimum.
    let delta = Rational::ratio(1, 10_000);
    for r in &gap {
        assert_eq!(r.fifo.clone() - r.fifo_formula.clone(), delta, "m={}", r.m);
        assert_eq!(r.batch, Rational::one(), "m={}", r.m);
        let inst = gen_fifo_lb::<Rational>(r.m, &delta).unwrap();
        let lp = approx_schedule_detailed(&inst, LpMethod::ConstraintGeneration).unwrap().lp.value;
        assert_eq!(lp, Rational::one(), "m={}", r.m);
        // The gap itself survives: FIFO / batch >= H_m - m*delta.
        assert!(r.fifo >= r.fifo_formula.clone() * r.batch.clone());
    }
}
