//! Dense tableau simplex over any [`Scalar`].
//!
//! Two-phase primal simplex for the initial solve; rows added afterwards are
//! absorbed with dual simplex pivots from the previous optimal basis. Exact
//! mode always uses Bland's rule. Float mode uses Dantzig pricing and falls
//! back to Bland after a run of degenerate pivots.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Sense {
    Le,
    Eq,
}

/// Sparse row: `sum coef * var  (sense)  rhs`.
#[derive(Debug, Clone)]
pub(crate) struct Constraint<S> {
    pub terms: Vec<(usize, S)>,
    pub sense: Sense,
    pub rhs: S,
}

const MAX_PIVOTS: usize = 200_000;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug)]
pub(crate) struct Tableau<S> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    /// Reduced costs of the active objective.
    reduced: Vec<S>,
    /// Negated objective value.
    neg_obj: S,
    basis: Vec<usize>,
    n_vars: usize,
    /// Columns at or beyond this index are artificial and may not enter.
    enter_limit: usize,
    /// Slack column per constraint, in insertion order (`None` for equalities).
    slack_of: Vec<Option<usize>>,
    pivots: usize,
}

fn tol<S: Scalar>() -> S {
    S::slack()
}

impl<S: Scalar> Tableau<S> {
    /// Minimizes `cost . x` over `x >= 0` subject to `constraints`.
    pub fn solve(n_vars: usize, cost: &[S], constraints: &[Constraint<S>]) -> Result<Self> {
        let n_slack = constraints.iter().filter(|c| c.sense == Sense::Le).count();
        // Le rows with negative rhs are negated and need an artificial like equalities.
        let needs_artificial: Vec<bool> = constraints
            .iter()
            .map(|c| c.sense == Sense::Eq || c.rhs < S::zero())
            .collect();
        let n_art = needs_artificial.iter().filter(|&&a| a).count();
        let width = n_vars + n_slack + n_art;

        let mut rows = Vec::with_capacity(constraints.len());
        let mut rhs = Vec::with_capacity(constraints.len());
        let mut basis = Vec::with_capacity(constraints.len());
        let mut slack_of = Vec::with_capacity(constraints.len());
        let (mut next_slack, mut next_art) = (n_vars, n_vars + n_slack);
        for (c, &art) in constraints.iter().zip(&needs_artificial) {
            let mut row = vec![S::zero(); width];
            for (v, coef) in &c.terms {
                row[*v] += coef.clone();
            }
            let mut b = c.rhs.clone();
            let mut slack_col = None;
            if c.sense == Sense::Le {
                row[next_slack] = S::one();
                slack_col = Some(next_slack);
                next_slack += 1;
            }
            if b < S::zero() {
                row.iter_mut().for_each(|v| *v = -v.clone());
                b = -b;
            }
            if art {
                row[next_art] = S::one();
                basis.push(next_art);
                next_art += 1;
            } else {
                basis.push(slack_col.expect("Le row without artificial has a slack"));
            }
            rows.push(row);
            rhs.push(b);
            slack_of.push(slack_col);
        }

        let mut tab = Tableau {
            rows,
            rhs,
            reduced: vec![S::zero(); width],
            neg_obj: S::zero(),
            basis,
            n_vars,
            enter_limit: width,
            slack_of,
            pivots: 0,
        };

        if n_art > 0 {
            // Phase 1: minimize the sum of artificials.
            let art_start = n_vars + n_slack;
            let mut phase1 = vec![S::zero(); width];
            phase1[art_start..].iter_mut().for_each(|v| *v = S::one());
            tab.set_objective(&phase1);
            tab.primal()?;
            if -tab.neg_obj.clone() > tol::<S>() * S::from_i64(tab.rows.len().max(1) as i64) {
                return Err(Error::Infeasible("linear program has no feasible point".into()));
            }
            tab.drive_out_artificials(art_start);
            for row in &mut tab.rows {
                row.truncate(art_start);
            }
            tab.reduced.truncate(art_start);
            tab.enter_limit = art_start;
        }

        let mut full_cost = vec![S::zero(); tab.enter_limit];
        full_cost[..n_vars].clone_from_slice(cost);
        tab.set_objective(&full_cost);
        tab.primal()?;
        Ok(tab)
    }

    fn width(&self) -> usize {
        self.reduced.len()
    }

    /// Recomputes reduced costs for `cost` under the current basis.
    fn set_objective(&mut self, cost: &[S]) {
        let mut reduced = cost.to_vec();
        let mut neg_obj = S::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b].clone();
            if cb.is_zero() {
                continue;
            }
            for (red, a) in reduced.iter_mut().zip(&self.rows[r]) {
                if !a.is_zero() {
                    *red -= cb.clone() * a.clone();
                }
            }
            neg_obj -= cb * self.rhs[r].clone();
        }
        self.reduced = reduced;
        self.neg_obj = neg_obj;
    }

    fn pivot(&mut self, r: usize, c: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > MAX_PIVOTS {
            return Err(Error::Internal("simplex pivot limit exceeded".into()));
        }
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.clone() / p.clone();
            }
        }
        self.rhs[r] = self.rhs[r].clone() / p;
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r].clone();
        let nonzero: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        for k in 0..self.rows.len() {
            if k == r {
                continue;
            }
            let f = self.rows[k][c].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.rows[k];
            for &j in &nonzero {
                row[j] -= f.clone() * pivot_row[j].clone();
            }
            // Exact zero in the pivot column avoids drift in float mode.
            row[c] = S::zero();
            self.rhs[k] -= f * pivot_rhs.clone();
        }
        let f = self.reduced[c].clone();
        if !f.is_zero() {
            for &j in &nonzero {
                self.reduced[j] -= f.clone() * pivot_row[j].clone();
            }
            self.reduced[c] = S::zero();
            self.neg_obj -= f * pivot_rhs;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
        Ok(())
    }

    fn primal(&mut self) -> Result<()> {
        let t = tol::<S>();
        let neg_t = -t.clone();
        let mut degenerate = 0usize;
        loop {
            let bland = S::is_exact() || degenerate >= DEGENERATE_RUN;
            let mut enter: Option<usize> = None;
            for j in 0..self.enter_limit {
                if self.reduced[j] < neg_t {
                    match enter {
                        None => enter = Some(j),
                        Some(e) if !bland && self.reduced[j] < self.reduced[e] => enter = Some(j),
                        _ => {}
                    }
                    if bland {
                        break;
                    }
                }
            }
            let Some(c) = enter else { return Ok(()) };
            let mut leave: Option<(usize, S)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if *a > t {
                    let ratio = self.rhs[r].clone() / a.clone();
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Internal("linear program is unbounded".into()));
            };
            if ratio <= t {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c)?;
        }
    }

    fn dual(&mut self) -> Result<()> {
        let neg_t = -tol::<S>();
        loop {
            let mut leave: Option<usize> = None;
            for r in 0..self.rows.len() {
                if self.rhs[r] < neg_t {
                    match leave {
                        None => leave = Some(r),
                        Some(l) if !S::is_exact() && self.rhs[r] < self.rhs[l] => leave = Some(r),
                        _ => {}
                    }
                    if S::is_exact() {
                        break;
                    }
                }
            }
            let Some(r) = leave else { return Ok(()) };
            let mut enter: Option<(usize, S)> = None;
            for j in 0..self.enter_limit {
                let a = &self.rows[r][j];
                if *a < neg_t {
                    let ratio = S::max_of(self.reduced[j].clone(), S::zero()) / (-a.clone());
                    if enter.as_ref().is_none_or(|(_, best)| ratio < *best) {
                        enter = Some((j, ratio));
                    }
                }
            }
            let Some((c, _)) = enter else {
                return Err(Error::Infeasible("added constraint makes the program infeasible".into()));
            };
            self.pivot(r, c)?;
        }
    }

    fn drive_out_artificials(&mut self, art_start: usize) {
        let t = tol::<S>();
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= art_start {
                let col = (0..art_start).find(|&j| self.rows[r][j].abs() > t);
                match col {
                    Some(c) => {
                        // Degenerate pivot at zero level; cannot hit the pivot limit meaningfully.
                        let _ = self.pivot(r, c);
                    }
                    None => {
                        // Redundant equality.
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
    }

    /// Appends `sum coef * var <= rhs` and re-optimizes. Returns the new constraint's index.
    pub fn add_le(&mut self, terms: &[(usize, S)], rhs: S) -> Result<usize> {
        let slack_col = self.width();
        for row in &mut self.rows {
            row.push(S::zero());
        }
        self.reduced.push(S::zero());
        // New columns are appended after any truncated artificials, so they can enter.
        self.enter_limit = slack_col + 1;
        let mut row = vec![S::zero(); slack_col + 1];
        for (v, coef) in terms {
            row[*v] += coef.clone();
        }
        row[slack_col] = S::one();
        let mut b = rhs;
        for (k, &bk) in self.basis.iter().enumerate() {
            let f = row[bk].clone();
            if f.is_zero() {
                continue;
            }
            for (v, a) in row.iter_mut().zip(&self.rows[k]) {
                if !a.is_zero() {
                    *v -= f.clone() * a.clone();
                }
            }
            row[bk] = S::zero();
            b -= f * self.rhs[k].clone();
        }
        self.rows.push(row);
        self.rhs.push(b);
        self.basis.push(slack_col);
        self.slack_of.push(Some(slack_col));
        self.dual()?;
        Ok(self.slack_of.len() - 1)
    }

    pub fn objective(&self) -> S {
        -self.neg_obj.clone()
    }

    /// Values of the structural variables.
    pub fn solution(&self) -> Vec<S> {
        let mut x = vec![S::zero(); self.n_vars];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_vars {
                x[b] = self.rhs[r].clone();
            }
        }
        x
    }

    /// Slack of constraint `k` (zero for equalities).
    pub fn slack(&self, k: usize) -> S {
        match self.slack_of[k] {
            None => S::zero(),
            Some(col) => self
                .basis
                .iter()
                .position(|&b| b == col)
                .map(|r| self.rhs[r].clone())
                .unwrap_or_else(S::zero),
        }
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }
}
