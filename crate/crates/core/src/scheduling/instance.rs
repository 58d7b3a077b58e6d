use crate::assignment::WeightVector;
use crate::error::{Error, Result};
use crate::rounding::ClosingTime;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Job<S> {
    pub release: S,
    pub processing: S,
}

impl<S: Scalar> Job<S> {
    pub fn new(release: S, processing: S) -> Self {
        Job { release, processing }
    }
}

/// Jobs with release and processing times on machines with closing times.
/// Job `j` may run on machine `i` iff `r_j <= b_i`. Jobs are kept sorted by
/// release time.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulingInstance<S> {
    machines: Vec<ClosingTime<S>>,
    jobs: Vec<Job<S>>,
}

impl<S: Scalar> SchedulingInstance<S> {
    /// Jobs must already be in nondecreasing release order.
    pub fn new(machines: Vec<ClosingTime<S>>, jobs: Vec<Job<S>>) -> Result<Self> {
        if machines.is_empty() {
            return Err(Error::Invalid("instance has no machines".into()));
        }
        if jobs.is_empty() {
            return Err(Error::Invalid("instance has no jobs".into()));
        }
        if let Some(i) = machines
            .iter()
            .position(|b| matches!(b, ClosingTime::At(v) if *v < S::zero()))
        {
            return Err(Error::Invalid(format!("machine {} has a negative closing time", i + 1)));
        }
        for (j, job) in jobs.iter().enumerate() {
            if job.release < S::zero() {
                return Err(Error::Invalid(format!("job {} has a negative release time", j + 1)));
            }
            if job.processing <= S::zero() {
                return Err(Error::Invalid(format!("job {} has non-positive processing time", j + 1)));
            }
            if !machines.iter().any(|b| b.admits(&job.release)) {
                return Err(Error::Infeasible(format!(
                    "job {} (released at {}) has no open machine",
                    j + 1,
                    job.release
                )));
            }
        }
        if let Some(j) = jobs.windows(2).position(|w| w[1].release < w[0].release) {
            return Err(Error::Invalid(format!("jobs are not sorted by release time at job {}", j + 2)));
        }
        Ok(SchedulingInstance { machines, jobs })
    }

    /// Stable-sorts jobs by release time first.
    pub fn from_unsorted(machines: Vec<ClosingTime<S>>, mut jobs: Vec<Job<S>>) -> Result<Self> {
        jobs.sort_by(|a, b| a.release.partial_cmp(&b.release).expect("finite release times"));
        Self::new(machines, jobs)
    }

    pub fn m(&self) -> usize {
        self.machines.len()
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn machines(&self) -> &[ClosingTime<S>] {
        &self.machines
    }

    pub fn jobs(&self) -> &[Job<S>] {
        &self.jobs
    }

    pub fn admits(&self, machine: usize, job: usize) -> bool {
        self.machines[machine].admits(&self.jobs[job].release)
    }

    pub fn releases(&self) -> Vec<S> {
        self.jobs.iter().map(|j| j.release.clone()).collect()
    }

    pub fn weights(&self) -> WeightVector<S> {
        WeightVector::new(self.jobs.iter().map(|j| j.processing.clone()).collect())
            .expect("processing times validated positive")
    }

    pub fn d_max(&self) -> S {
        self.jobs
            .iter()
            .map(|j| j.processing.clone())
            .reduce(S::max_of)
            .expect("non-empty")
    }

    pub fn total_processing(&self) -> S {
        self.jobs.iter().fold(S::zero(), |acc, j| acc + j.processing.clone())
    }
}
