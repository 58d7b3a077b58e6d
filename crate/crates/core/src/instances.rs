//! Named lower-bound constructions and seeded random instances.
//!
//! Random instances are drawn with `ChaCha8Rng::seed_from_u64(seed)`. All
//! random reals live on a grid `k / 65536` so that the exact backend sees
//! small denominators and the float backend sees the same values. Columns
//! are sampled from the simplex by sorting `k - 1` uniform grid points and
//! taking the gaps between consecutive points (and the ends `0` and `1`),
//! where `k` is the number of allowed rows in the column.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::assignment::{FractionalAssignment, IntegralAssignment, Matrix, SupportMask, WeightVector};
use crate::error::{Error, Result};
use crate::rounding::ClosingTime;
use crate::scalar::Scalar;
use crate::scheduling::{Job, SchedulingInstance};

/// Denominator of the random grid.
pub const GRID: i64 = 1 << 16;

/// `m x (m-1)` instance on which every assignment has prefix discrepancy at
/// least `1 - 1/(2m-2)`. Column 1 is `(1/(2m-2), ..., 1/(2m-2), 1/2)`,
/// later columns give `1/(m-1)` to rows `1..m-1` and nothing to row `m`.
/// For `m = 2` this is the single column `(1/2, 1/2)`.
pub fn gen_caplb<S: Scalar>(m: usize) -> Result<(FractionalAssignment<S>, WeightVector<S>)> {
    if m < 2 {
        return Err(Error::Invalid(format!("caplb needs m >= 2, got {m}")));
    }
    let n = m - 1;
    let k = m as i64;
    let x = Matrix::from_fn(m, n, |i, j| match (i + 1 == m, j) {
        (true, 0) => S::ratio(1, 2),
        (false, 0) => S::ratio(1, 2 * k - 2),
        (true, _) => S::zero(),
        (false, _) => S::ratio(1, k - 1),
    });
    Ok((FractionalAssignment::new(x)?, WeightVector::ones(n)))
}

/// `p = ceil((1 - delta) / (2 delta))`, the number of repeated column pairs in carlb.
pub fn carlb_pairs<S: Scalar>(delta: &S) -> i64 {
    ((S::one() - delta.clone()) / (S::from_i64(2) * delta.clone())).ceil_i64()
}

/// `3 x (1 + 2p)` instance on which every support-respecting assignment has
/// prefix discrepancy at least `1 - delta`. Column 1 is `(delta, 0, 1-delta)`
/// followed by `p` copies of the pair `(1-2delta, 2delta, 0)`, `(2delta, 0, 1-2delta)`.
pub fn gen_carlb<S: Scalar>(delta: &S) -> Result<(FractionalAssignment<S>, SupportMask, WeightVector<S>)> {
    if *delta <= S::zero() || *delta >= S::ratio(1, 2) {
        return Err(Error::Invalid(format!("carlb needs 0 < delta < 1/2, got {delta}")));
    }
    let p = carlb_pairs(delta) as usize;
    let n = 1 + 2 * p;
    let one = S::one();
    let two_delta = S::from_i64(2) * delta.clone();
    let column = |j: usize| -> [S; 3] {
        if j == 0 {
            [delta.clone(), S::zero(), one.clone() - delta.clone()]
        } else if j % 2 == 1 {
            [one.clone() - two_delta.clone(), two_delta.clone(), S::zero()]
        } else {
            [two_delta.clone(), S::zero(), one.clone() - two_delta.clone()]
        }
    };
    let x = FractionalAssignment::new(Matrix::from_fn(3, n, |i, j| column(j)[i].clone()))?;
    let mask = SupportMask::support_of(&x);
    Ok((x, mask, WeightVector::ones(n)))
}

/// The constant-column `3 x 100` instance `(0.01, 0.48, 0.51)` whose minimum
/// interval discrepancy exceeds 1.
pub fn gen_intlb<S: Scalar>() -> (FractionalAssignment<S>, WeightVector<S>) {
    let v = [S::ratio(1, 100), S::ratio(48, 100), S::ratio(51, 100)];
    let x = FractionalAssignment::new(Matrix::from_fn(3, 100, |i, _| v[i].clone())).expect("columns sum to 1");
    (x, WeightVector::ones(100))
}

/// FIFO lower-bound instance: machine `i` closes at `i delta`; batch `j`
/// is released at `j delta` and holds `m - j + 1` jobs of size `1/(m - j + 1)`.
pub fn gen_fifo_lb<S: Scalar>(m: usize, delta: &S) -> Result<SchedulingInstance<S>> {
    if m < 2 {
        return Err(Error::Invalid(format!("fifo lower bound needs m >= 2, got {m}")));
    }
    let mm = m as i64;
    if *delta <= S::zero() || *delta >= S::ratio(1, mm * mm) {
        return Err(Error::Invalid(format!("fifo lower bound needs 0 < delta < 1/m^2, got {delta}")));
    }
    let machines = (1..=mm).map(|i| ClosingTime::At(S::from_i64(i) * delta.clone())).collect();
    let mut jobs = Vec::new();
    for j in 1..=mm {
        let size = mm - j + 1;
        for _ in 0..size {
            jobs.push(Job::new(S::from_i64(j) * delta.clone(), S::ratio(1, size)));
        }
    }
    SchedulingInstance::new(machines, jobs)
}

/// The schedule sending batch `j` of [`gen_fifo_lb`] to machine `j`.
pub fn fifo_lb_batch_assignment(m: usize) -> IntegralAssignment {
    let rows = (0..m).flat_map(|j| std::iter::repeat_n(j, m - j)).collect();
    IntegralAssignment::from_vec_unchecked(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum WeightMode {
    /// Grid-uniform on `(0, 1]`.
    Uniform,
    Ones,
    /// Each weight is `1` or `low` with equal probability.
    TwoValued { low: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub weight_mode: WeightMode,
    /// Probability that an entry is allowed; `None` means every entry.
    pub support_density: Option<f64>,
}

impl RandomSpec {
    pub fn new(m: usize, n: usize, seed: u64) -> Self {
        RandomSpec {
            m,
            n,
            seed,
            weight_mode: WeightMode::Uniform,
            support_density: None,
        }
    }
}

fn grid_value<S: Scalar>(k: i64) -> S {
    S::ratio(k, GRID)
}

/// Splits `GRID` into `parts` nonnegative integer gaps.
fn simplex_gaps(rng: &mut ChaCha8Rng, parts: usize) -> Vec<i64> {
    let mut cuts: Vec<i64> = (0..parts - 1).map(|_| rng.gen_range(0..=GRID)).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut gaps = Vec::with_capacity(parts);
    for c in cuts.into_iter().chain(std::iter::once(GRID)) {
        gaps.push(c - prev);
        prev = c;
    }
    gaps
}

/// Seeded random instance; the mask is returned only when a density is set.
pub fn gen_random<S: Scalar>(
    spec: &RandomSpec,
) -> Result<(FractionalAssignment<S>, WeightVector<S>, Option<SupportMask>)> {
    let (m, n) = (spec.m, spec.n);
    if m == 0 || n == 0 {
        return Err(Error::Invalid(format!("random instance needs m, n >= 1, got {m} x {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mask = match spec.support_density {
        None => None,
        Some(p) if !(p > 0.0 && p <= 1.0) => {
            return Err(Error::Invalid(format!("support density {p} is outside (0, 1]")));
        }
        Some(p) => {
            let mut allowed = vec![false; m * n];
            for j in 0..n {
                let mut any = false;
                for i in 0..m {
                    let on = p >= 1.0 || rng.gen_bool(p);
                    allowed[i * n + j] = on;
                    any |= on;
                }
                if !any {
                    allowed[rng.gen_range(0..m) * n + j] = true;
                }
            }
            Some(SupportMask::new(m, n, allowed)?)
        }
    };

    let mut grid = vec![0i64; m * n];
    for j in 0..n {
        let rows: Vec<usize> = (0..m)
            .filter(|&i| mask.as_ref().is_none_or(|mk| mk.allows(i, j)))
            .collect();
        for (i, gap) in rows.iter().zip(simplex_gaps(&mut rng, rows.len())) {
            grid[i * n + j] = gap;
        }
    }
    let x = FractionalAssignment::new(Matrix::from_fn(m, n, |i, j| grid_value(grid[i * n + j])))?;

    let d = match spec.weight_mode {
        WeightMode::Ones => WeightVector::ones(n),
        WeightMode::Uniform => WeightVector::new((0..n).map(|_| grid_value(rng.gen_range(1..=GRID))).collect())?,
        WeightMode::TwoValued { low } => {
            let low = S::from_f64(low)?;
            WeightVector::new(
                (0..n)
                    .map(|_| if rng.gen_bool(0.5) { S::one() } else { low.clone() })
                    .collect(),
            )?
        }
    };
    Ok((x, d, mask))
}

/// Parameters of a random closing-time scheduling instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub m: usize,
    pub n: usize,
    pub seed: u64,
}

/// Seeded random closing-time instance. Release gaps are `0` with
/// probability 1/4 and grid-uniform on `(0, 1/2]` otherwise; processing
/// times are grid-uniform on `(0, 1]`. Each machine closes at a uniform
/// grid point of `[0, r_n]` except one random machine, which stays open
/// (half of the time forever, otherwise until `r_n`).
pub fn gen_random_schedule<S: Scalar>(spec: &ScheduleSpec) -> Result<SchedulingInstance<S>> {
    let (m, n) = (spec.m, spec.n);
    if m == 0 || n == 0 {
        return Err(Error::Invalid(format!("random schedule needs m, n >= 1, got {m} x {n}")));
    }
    // Coarser grid for times keeps exact LP arithmetic cheap.
    const TIME_GRID: i64 = 1 << 10;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut release_ticks = Vec::with_capacity(n);
    let mut now = 0i64;
    for _ in 0..n {
        if !rng.gen_bool(0.25) {
            now += rng.gen_range(1..=TIME_GRID / 2);
        }
        release_ticks.push(now);
    }
    let jobs: Vec<Job<S>> = release_ticks
        .iter()
        .map(|&r| Job::new(S::ratio(r, TIME_GRID), S::ratio(rng.gen_range(1..=TIME_GRID), TIME_GRID)))
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng);
    let keeper = order[0];
    let machines = (0..m)
        .map(|i| {
            if i == keeper {
                if rng.gen_bool(0.5) {
                    ClosingTime::Never
                } else {
                    ClosingTime::At(S::ratio(now, TIME_GRID))
                }
            } else {
                ClosingTime::At(S::ratio(rng.gen_range(0..=now), TIME_GRID))
            }
        })
        .collect();
    SchedulingInstance::new(machines, jobs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::validate_fractional;
    use crate::scalar::Rational;

    #[test]
    fn caplb_small_cases() {
        let (x, d) = gen_caplb::<Rational>(2).unwrap();
        assert_eq!(x.matrix().to_rows(), vec![vec![Rational::ratio(1, 2)], vec![Rational::ratio(1, 2)]]);
        assert_eq!(d.len(), 1);
        let (x, _) = gen_caplb::<Rational>(3).unwrap();
        let q = Rational::ratio;
        assert_eq!(
            x.matrix().to_rows(),
            vec![vec![q(1, 4), q(1, 2)], vec![q(1, 4), q(1, 2)], vec![q(1, 2), q(0, 1)]]
        );
        assert!(gen_caplb::<Rational>(1).is_err());
        for m in 2..10 {
            let (x, _) = gen_caplb::<Rational>(m).unwrap();
            assert_eq!((x.m(), x.n()), (m, m - 1));
            assert!(validate_fractional(x.matrix()).is_ok());
        }
    }

    #[test]
    fn carlb_quarter() {
        let (x, mask, d) = gen_carlb(&Rational::ratio(1, 4)).unwrap();
        assert_eq!(x.n(), 5);
        assert_eq!(d.len(), 5);
        let q = Rational::ratio;
        let expected = [
            [q(1, 4), q(0, 1), q(3, 4)],
            [q(1, 2), q(1, 2), q(0, 1)],
            [q(1, 2), q(0, 1), q(1, 2)],
            [q(1, 2), q(1, 2), q(0, 1)],
            [q(1, 2), q(0, 1), q(1, 2)],
        ];
        for (j, col) in expected.iter().enumerate() {
            let got: Vec<Rational> = x.column(j).cloned().collect();
            assert_eq!(got, col.to_vec());
            for i in 0..3 {
                assert_eq!(mask.allows(i, j), !x.get(i, j).is_zero());
            }
        }
    }

    #[test]
    fn carlb_second_row_mass() {
        for delta in [Rational::ratio(1, 4), Rational::ratio(1, 10), Rational::ratio(3, 20), Rational::ratio(49, 100)] {
            let (x, _, _) = gen_carlb(&delta).unwrap();
            let p = carlb_pairs(&delta);
            assert_eq!(x.n() as i64, 1 + 2 * p);
            let row2 = x.row(1).iter().cloned().fold(Rational::zero(), |a, b| a + b);
            assert_eq!(row2, Rational::from_i64(2 * p) * delta.clone());
            assert!(row2 >= Rational::one() - delta);
        }
        assert_eq!(gen_carlb(&Rational::ratio(1, 10)).unwrap().0.n(), 11);
        assert!(gen_carlb(&Rational::ratio(1, 2)).is_err());
        assert!(gen_carlb(&Rational::zero()).is_err());
    }

    #[test]
    fn intlb_shape() {
        let (x, d) = gen_intlb::<Rational>();
        assert_eq!((x.m(), x.n(), d.len()), (3, 100, 100));
        assert_eq!(x.column(57).cloned().fold(Rational::zero(), |a, b| a + b), Rational::one());
    }

    #[test]
    fn fifo_lb_structure() {
        let inst = gen_fifo_lb(2, &0.01).unwrap();
        let b: Vec<_> = inst.machines().to_vec();
        assert_eq!(b, vec![ClosingTime::At(0.01), ClosingTime::At(0.02)]);
        let jobs: Vec<(f64, f64)> = inst.jobs().iter().map(|j| (j.release, j.processing)).collect();
        assert_eq!(jobs, vec![(0.01, 0.5), (0.01, 0.5), (0.02, 1.0)]);

        for m in [2usize, 3, 5, 8] {
            let delta = Rational::ratio(1, 10_000);
            let inst = gen_fifo_lb(m, &delta).unwrap();
            assert_eq!(inst.total_processing(), Rational::from_i64(m as i64));
            let mut job = 0;
            for batch in 0..m {
                for _ in 0..m - batch {
                    for i in 0..m {
                        assert_eq!(inst.admits(i, job), i >= batch);
                    }
                    job += 1;
                }
            }
            let y = fifo_lb_batch_assignment(m);
            assert_eq!(y.len(), inst.n());
        }
        assert!(gen_fifo_lb(3, &0.2).is_err());
        assert!(gen_fifo_lb(1, &0.01).is_err());
    }

    #[test]
    fn random_is_deterministic() {
        let spec = RandomSpec::new(4, 30, 7);
        let (x1, d1, _) = gen_random::<Rational>(&spec).unwrap();
        let (x2, d2, _) = gen_random::<Rational>(&spec).unwrap();
        assert_eq!((x1, d1), (x2, d2));
        let (x3, _, _) = gen_random::<Rational>(&RandomSpec::new(4, 30, 8)).unwrap();
        let (x1, _, _) = gen_random::<Rational>(&spec).unwrap();
        assert_ne!(x1, x3);
    }

    #[test]
    fn exact_and_float_instances_agree() {
        let spec = RandomSpec::new(3, 12, 99);
        let (xe, de, _) = gen_random::<Rational>(&spec).unwrap();
        let (xf, df, _) = gen_random::<f64>(&spec).unwrap();
        assert_eq!(xe.convert::<f64>().unwrap(), xf);
        assert_eq!(de.convert::<f64>().unwrap(), df);
    }

    #[test]
    fn full_density_mask() {
        let spec = RandomSpec {
            support_density: Some(1.0),
            ..RandomSpec::new(3, 10, 1)
        };
        let (_, _, mask) = gen_random::<f64>(&spec).unwrap();
        let mask = mask.unwrap();
        assert!((0..3).all(|i| (0..10).all(|j| mask.allows(i, j))));
        let bad = RandomSpec {
            support_density: Some(0.0),
            ..spec
        };
        assert!(gen_random::<f64>(&bad).is_err());
    }

    #[test]
    fn random_schedules_are_valid() {
        for seed in 0..50 {
            let inst = gen_random_schedule::<Rational>(&ScheduleSpec { m: 3, n: 15, seed }).unwrap();
            assert_eq!((inst.m(), inst.n()), (3, 15));
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(300))]

            #[test]
            fn random_instances_are_fractional_assignments(
                m in 1usize..7, n in 1usize..40, seed in any::<u64>(), density in prop::option::of(0.05f64..=1.0),
            ) {
                let spec = RandomSpec { m, n, seed, weight_mode: WeightMode::TwoValued { low: 0.3 }, support_density: density };
                let (x, d, mask) = gen_random::<Rational>(&spec).unwrap();
                prop_assert!(validate_fractional(x.matrix()).is_ok());
                prop_assert_eq!(d.len(), n);
                if let Some(mask) = mask {
                    for i in 0..m { for j in 0..n {
                        prop_assert!(mask.allows(i, j) || x.get(i, j).is_zero());
                    }}
                }
            }
        }
    }
}
