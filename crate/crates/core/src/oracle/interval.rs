//! Interval objective: a decision search wrapped in an optimization loop.
//!
//! The decision search tracks, per row, the window `[min, max]` of the prefix
//! sequence `delta_0 = 0, delta_1, ..., delta_t`; a row's interval
//! discrepancy is the window width. A branch dies as soon as some width
//! exceeds the threshold. Failed states are remembered per `(t, N)`; a new
//! state whose windows all contain a failed state's windows fails as well,
//! since wider windows only make the future harder.
//!
//! Optimization bisects between `0` and the seed's value using `<=`
//! decisions, then repeatedly asks for something strictly better than the
//! best witness until the answer is no.
//!
//! In exact mode the instance is scaled by the common denominator of its
//! prefix sums and weights, so the search itself runs on `i64`.

use std::collections::HashMap;
use std::hash::Hash;
use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::assignment::{FractionalAssignment, IntegralAssignment, WeightVector};
use crate::error::Result;
use crate::scalar::{Rational, Scalar};

use super::prefix::{cons, path_rows, Path};
use super::{objective_value, Budget, Exhausted, Objective, Problem, SearchConfig, SearchResult, SearchStatus};

/// Arithmetic the decision search needs.
trait Value: Clone + PartialOrd + Add<Output = Self> + Sub<Output = Self> {
    type Key: Hash + Eq + Clone;
    fn key(&self) -> Self::Key;
    fn zero() -> Self;
}

impl<S: Scalar> Value for S {
    type Key = S::Key;

    fn key(&self) -> Self::Key {
        Scalar::key(self)
    }

    fn zero() -> Self {
        <S as Scalar>::zero()
    }
}

impl Value for i64 {
    type Key = i64;

    fn key(&self) -> i64 {
        *self
    }

    fn zero() -> i64 {
        0
    }
}

fn max_of<V: Value>(a: V, b: V) -> V {
    if b > a {
        b
    } else {
        a
    }
}

fn min_of<V: Value>(a: V, b: V) -> V {
    if b < a {
        b
    } else {
        a
    }
}

/// Widths `w` with `w <= cap` (inclusive) or `w < cap` are admissible.
#[derive(Debug, Clone)]
struct Limit<V> {
    cap: V,
    inclusive: bool,
}

impl<V: Value> Limit<V> {
    fn fits(&self, width: &V) -> bool {
        if self.inclusive {
            *width <= self.cap
        } else {
            *width < self.cap
        }
    }

    /// Every width admitted by `self` is admitted by `other`.
    fn within(&self, other: &Limit<V>) -> bool {
        self.cap < other.cap || (self.cap == other.cap && (other.inclusive || !self.inclusive))
    }
}

/// The instance in search units.
struct Kernel<V> {
    m: usize,
    n: usize,
    prefix: Vec<Vec<V>>,
    d: Vec<V>,
    allowed: Vec<Vec<usize>>,
    memoize: bool,
}

type Window<V> = (V, V);
type Key<V> = (usize, Vec<<V as Value>::Key>);

fn contains<V: Value>(outer: &[Window<V>], inner: &[Window<V>]) -> bool {
    outer.iter().zip(inner).all(|((omax, omin), (imax, imin))| imax <= omax && imin >= omin)
}

struct Decision<'k, V: Value> {
    k: &'k Kernel<V>,
    limit: Limit<V>,
    failed: HashMap<Key<V>, Vec<Vec<Window<V>>>>,
}

impl<V: Value> Decision<'_, V> {
    fn branch_order(&self, t: usize, selected: &[V]) -> Vec<usize> {
        let mut rows = self.k.allowed[t].clone();
        let deficit = |i: usize| self.k.prefix[i][t].clone() - selected[i].clone();
        rows.sort_by(|&a, &b| {
            deficit(b)
                .partial_cmp(&deficit(a))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        rows
    }

    fn run(&mut self, budget: &mut Budget, t: usize, selected: &mut Vec<V>, windows: &[Window<V>]) -> Result<Option<Path>, Exhausted> {
        if t == self.k.n {
            return Ok(Some(None));
        }
        let key = self.k.memoize.then(|| (t, selected.iter().map(Value::key).collect::<Vec<_>>()));
        if let Some(key) = &key {
            if let Some(list) = self.failed.get(key) {
                if list.iter().any(|f| contains(windows, f)) {
                    return Ok(None);
                }
            }
        }
        budget.tick()?;

        let dt = self.k.d[t].clone();
        let mut next: Vec<Window<V>> = Vec::with_capacity(self.k.m);
        for i in self.branch_order(t, selected) {
            let saved = selected[i].clone();
            selected[i] = saved.clone() + dt.clone();
            next.clear();
            let mut ok = true;
            for r in 0..self.k.m {
                let delta = self.k.prefix[r][t].clone() - selected[r].clone();
                let (hi, lo) = &windows[r];
                let w = (max_of(hi.clone(), delta.clone()), min_of(lo.clone(), delta));
                if !self.limit.fits(&(w.0.clone() - w.1.clone())) {
                    ok = false;
                    break;
                }
                next.push(w);
            }
            if ok {
                let child = next.clone();
                if let Some(path) = self.run(budget, t + 1, selected, &child)? {
                    selected[i] = saved;
                    return Ok(Some(cons(i, path)));
                }
            }
            selected[i] = saved;
        }

        if let Some(key) = key {
            let list = self.failed.entry(key).or_default();
            list.retain(|f| !contains(f, windows));
            list.push(windows.to_vec());
        }
        Ok(None)
    }
}

struct Driver<'k, V: Value> {
    k: &'k Kernel<V>,
    budget: Budget,
    decision: Option<Decision<'k, V>>,
}

impl<'k, V: Value> Driver<'k, V> {
    /// An assignment whose interval discrepancy fits `limit`, if any. Failures
    /// are kept while the limits only tighten.
    fn decide(&mut self, limit: Limit<V>) -> Result<Option<IntegralAssignment>, Exhausted> {
        let mut decision = match self.decision.take() {
            Some(mut d) if limit.within(&d.limit) => {
                d.limit = limit;
                d
            }
            _ => Decision {
                k: self.k,
                limit,
                failed: HashMap::new(),
            },
        };
        let mut selected = vec![V::zero(); self.k.m];
        let windows = vec![(V::zero(), V::zero()); self.k.m];
        let out = decision.run(&mut self.budget, 0, &mut selected, &windows);
        self.decision = Some(decision);
        Ok(out?.map(|path| IntegralAssignment::from_vec_unchecked(path_rows(&path))))
    }
}

/// Bisection stops once the bracket is narrower than `hi / 2^BISECT_BITS`.
const BISECT_BITS: i64 = 10;

/// Integer image of the instance scaled by a common denominator, when it fits in `i64`.
fn integer_kernel<S: Scalar>(p: &Problem<'_, S>) -> Option<(Kernel<i64>, BigInt)> {
    let rationals: Vec<Rational> = p
        .prefix
        .iter()
        .flatten()
        .chain(p.d)
        .map(|v| v.to_rational())
        .collect::<Option<_>>()?;
    let mut scale = BigInt::one();
    for r in &rationals {
        scale = scale.lcm(r.denom());
    }
    // Every delta and width is bounded by the total weight; keep ample headroom.
    let total: Rational = p.d.iter().filter_map(|v| v.to_rational()).sum();
    let limit = Rational::from_integer(BigInt::from(1i64 << 60));
    if total * Rational::from_integer(scale.clone()) * Rational::from_integer(4.into()) >= limit {
        return None;
    }
    let scaled = |r: &Rational| (r * Rational::from_integer(scale.clone())).to_integer().to_i64();
    let mut it = rationals.iter();
    let prefix = (0..p.m)
        .map(|_| (0..p.n).map(|_| scaled(it.next().expect("m*n prefix values"))).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    let d = it.map(scaled).collect::<Option<Vec<_>>>()?;
    Some((
        Kernel {
            m: p.m,
            n: p.n,
            prefix,
            d,
            allowed: allowed(p),
            memoize: p.cfg.memoize,
        },
        scale,
    ))
}

fn allowed<S: Scalar>(p: &Problem<'_, S>) -> Vec<Vec<usize>> {
    (0..p.n).map(|j| (0..p.m).filter(|&i| p.cfg.allows(i, j)).collect()).collect()
}

/// `width < q` and `width <= q` over integers, for a rational `q`.
fn integer_limit(q: &Rational, inclusive: bool) -> Option<Limit<i64>> {
    if q.is_integer() {
        return Some(Limit {
            cap: q.to_integer().to_i64()?,
            inclusive,
        });
    }
    let floor = q.floor().to_integer();
    let cap = if floor.is_negative() { -1 } else { floor.to_i64()? };
    Some(Limit { cap, inclusive: true })
}

pub(crate) fn search<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    cfg: &SearchConfig<S>,
) -> Result<SearchResult<S>> {
    let p = Problem::new(x, d, cfg)?;
    if cfg.unattainable() {
        return Ok(SearchResult::trivial_no());
    }
    if S::is_exact() {
        if let Some((kernel, scale)) = integer_kernel(&p) {
            let to_limit = |threshold: &S, inclusive: bool| {
                let q = threshold.to_rational().expect("exact scalar") * Rational::from_integer(scale.clone());
                integer_limit(&q, inclusive).unwrap_or(Limit {
                    cap: i64::MAX,
                    inclusive: true,
                })
            };
            return optimize(&p, x, d, &kernel, to_limit);
        }
    }
    let kernel = Kernel {
        m: p.m,
        n: p.n,
        prefix: p.prefix.clone(),
        d: p.d.to_vec(),
        allowed: allowed(&p),
        memoize: cfg.memoize,
    };
    optimize(&p, x, d, &kernel, |threshold: &S, inclusive| Limit {
        cap: threshold.clone(),
        inclusive,
    })
}

fn optimize<S: Scalar, V: Value>(
    p: &Problem<'_, S>,
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    kernel: &Kernel<V>,
    to_limit: impl Fn(&S, bool) -> Limit<V>,
) -> Result<SearchResult<S>> {
    let cfg = p.cfg;
    let seed = p.seed(x, d)?;
    let seed_value = objective_value(Objective::Interval, x, &seed, d)?;
    let mut driver = Driver {
        k: kernel,
        budget: Budget::new(cfg),
        decision: None,
    };
    let value_of = |y: &IntegralAssignment| objective_value(Objective::Interval, x, y, d);
    let finish = |status, value: Option<S>, witness, lower_bound, budget: &Budget| SearchResult {
        status,
        value,
        witness,
        lower_bound,
        nodes_explored: budget.nodes(),
    };

    if let Some(threshold) = &cfg.threshold {
        if cfg.admits(&seed_value, threshold) {
            return Ok(finish(SearchStatus::Yes, Some(seed_value), Some(seed), None, &driver.budget));
        }
        return Ok(match driver.decide(to_limit(threshold, cfg.inclusive)) {
            Ok(Some(y)) => {
                let v = value_of(&y)?;
                finish(SearchStatus::Yes, Some(v), Some(y), None, &driver.budget)
            }
            Ok(None) => finish(SearchStatus::No, None, None, None, &driver.budget),
            Err(Exhausted) => finish(SearchStatus::LimitReached, None, None, None, &driver.budget),
        });
    }

    let mut best = seed;
    let mut hi = seed_value;
    // Nothing achieves `<= lo`.
    let mut lo: Option<S> = None;
    let two = S::from_i64(2);
    let resolution = S::ratio(1, 1 << BISECT_BITS);
    loop {
        if hi.is_zero() {
            return Ok(finish(SearchStatus::Exact, Some(hi), Some(best), lo, &driver.budget));
        }
        let floor = lo.clone().unwrap_or_else(S::zero);
        let bisecting = hi.clone() - floor.clone() > hi.clone() * resolution.clone();
        let (threshold, inclusive) = if bisecting {
            ((floor + hi.clone()) / two.clone(), true)
        } else {
            (hi.clone(), false)
        };
        match driver.decide(to_limit(&threshold, inclusive)) {
            Ok(Some(y)) => {
                let v = value_of(&y)?;
                if v >= hi {
                    // Only float rounding lets the search admit a tie.
                    return Ok(finish(SearchStatus::Exact, Some(hi), Some(best), lo, &driver.budget));
                }
                hi = v;
                best = y;
            }
            Ok(None) if inclusive => lo = Some(threshold),
            Ok(None) => return Ok(finish(SearchStatus::Exact, Some(hi), Some(best), lo, &driver.budget)),
            Err(Exhausted) => return Ok(finish(SearchStatus::LimitReached, Some(hi), Some(best), lo, &driver.budget)),
        }
    }
}
