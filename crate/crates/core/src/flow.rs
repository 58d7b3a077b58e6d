//! Chairman assignment as single-source unsplittable flow.
//!
//! Every row `i` becomes a path `s -> i_n -> i_{n-1} -> ... -> i_1`, and node
//! `i_j` has an arc to terminal `t_j` with demand `d_j`. Routing `x_ij d_j`
//! through row `i` puts `P_t(i) = sum_{j<=t} x_ij d_j` on the path arc
//! entering `i_t` (the source arc for `t = n`). An integral assignment routes
//! each demand along one path, so the difference on path arcs is exactly the
//! prefix discrepancy.

use std::fmt::Write as _;

use serde::Serialize;

use crate::assignment::{check_dims, FractionalAssignment, IntegralAssignment, WeightVector};
use crate::discrepancy::prefix_discrepancy;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Zero-based row and column indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    Source,
    /// Copy `i_{t+1}` of row `i` (so `t` is zero-based).
    Path { row: usize, t: usize },
    Terminal { j: usize },
}

impl Node {
    /// `s`, `i<row>_<t>` and `t<j>`, one-based.
    pub fn name(&self) -> String {
        match self {
            Node::Source => "s".to_string(),
            Node::Path { row, t } => format!("i{}_{}", row + 1, t + 1),
            Node::Terminal { j } => format!("t{}", j + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcKind {
    /// `s -> i_n`.
    Source { row: usize },
    /// `i_{t+1} -> i_t` for zero-based `t < n - 1`; carries `P_{t+1}(i)`.
    Internal { row: usize, t: usize },
    /// `i_j -> t_j`.
    Terminal { row: usize, j: usize },
}

impl ArcKind {
    pub fn is_path(&self) -> bool {
        !matches!(self, ArcKind::Terminal { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub from: Node,
    pub to: Node,
    pub kind: ArcKind,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork<S> {
    x: FractionalAssignment<S>,
    d: WeightVector<S>,
    arcs: Vec<Arc>,
    flow: Vec<S>,
    carpool: bool,
}

/// Builds the network carrying the fractional flow of `x`. With `carpool`,
/// terminal arcs with `x_ij = 0` are left out.
pub fn build_reduction<S: Scalar>(x: &FractionalAssignment<S>, d: &WeightVector<S>, carpool: bool) -> Result<FlowNetwork<S>> {
    check_dims(x, d, None)?;
    let (m, n) = (x.m(), x.n());
    let mut arcs = Vec::with_capacity(m * (2 * n));
    let mut flow = Vec::with_capacity(arcs.capacity());
    for i in 0..m {
        let mut prefix = Vec::with_capacity(n);
        let mut acc = S::zero();
        for j in 0..n {
            acc += x.get(i, j).clone() * d.get(j).clone();
            prefix.push(acc.clone());
        }
        arcs.push(Arc {
            from: Node::Source,
            to: Node::Path { row: i, t: n - 1 },
            kind: ArcKind::Source { row: i },
        });
        flow.push(prefix[n - 1].clone());
        for t in (0..n - 1).rev() {
            arcs.push(Arc {
                from: Node::Path { row: i, t: t + 1 },
                to: Node::Path { row: i, t },
                kind: ArcKind::Internal { row: i, t },
            });
            flow.push(prefix[t].clone());
        }
        for j in 0..n {
            if carpool && x.get(i, j).is_zero() {
                continue;
            }
            arcs.push(Arc {
                from: Node::Path { row: i, t: j },
                to: Node::Terminal { j },
                kind: ArcKind::Terminal { row: i, j },
            });
            flow.push(x.get(i, j).clone() * d.get(j).clone());
        }
    }
    let net = FlowNetwork {
        x: x.clone(),
        d: d.clone(),
        arcs,
        flow,
        carpool,
    };
    net.check_conservation(&net.flow)
        .map_err(|e| Error::Internal(format!("fractional flow: {e}")))?;
    Ok(net)
}

impl<S: Scalar> FlowNetwork<S> {
    pub fn m(&self) -> usize {
        self.x.m()
    }

    pub fn n(&self) -> usize {
        self.x.n()
    }

    pub fn node_count(&self) -> usize {
        1 + self.m() * self.n() + self.n()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Fractional flow, parallel to [`arcs`](Self::arcs).
    pub fn flow(&self) -> &[S] {
        &self.flow
    }

    pub fn demand(&self) -> &WeightVector<S> {
        &self.d
    }

    pub fn is_carpool(&self) -> bool {
        self.carpool
    }

    /// Conservation at every path node, demand at every terminal and total
    /// source outflow `sum_j d_j`.
    pub fn check_conservation(&self, flow: &[S]) -> Result<()> {
        let (m, n) = (self.m(), self.n());
        if flow.len() != self.arcs.len() {
            return Err(Error::Dimension(format!("{} flow values for {} arcs", flow.len(), self.arcs.len())));
        }
        let mut balance = vec![S::zero(); m * n];
        let mut inflow = vec![S::zero(); n];
        let mut out_of_source = S::zero();
        for (arc, f) in self.arcs.iter().zip(flow) {
            match arc.from {
                Node::Source => out_of_source += f.clone(),
                Node::Path { row, t } => balance[row * n + t] -= f.clone(),
                Node::Terminal { .. } => return Err(Error::Internal("arc leaves a terminal".into())),
            }
            match arc.to {
                Node::Path { row, t } => balance[row * n + t] += f.clone(),
                Node::Terminal { j } => inflow[j] += f.clone(),
                Node::Source => return Err(Error::Internal("arc enters the source".into())),
            }
        }
        let tol = S::slack() * S::max_of(S::one(), self.d.max().clone()) * S::from_i64(n as i64);
        let off = |v: S| v.abs() > tol;
        if let Some(k) = (0..m * n).find(|&k| off(balance[k].clone())) {
            let node = Node::Path { row: k / n, t: k % n };
            return Err(Error::Invalid(format!("flow not conserved at {}: net {}", node.name(), balance[k])));
        }
        if let Some(j) = (0..n).find(|&j| off(inflow[j].clone() - self.d.get(j).clone())) {
            return Err(Error::Invalid(format!(
                "terminal t{} receives {} but demands {}",
                j + 1,
                inflow[j],
                self.d.get(j)
            )));
        }
        let total = self.d.as_slice().iter().fold(S::zero(), |a, v| a + v.clone());
        if off(out_of_source.clone() - total.clone()) {
            return Err(Error::Invalid(format!("source emits {out_of_source}, total demand is {total}")));
        }
        Ok(())
    }

    /// `u v flow` per arc.
    pub fn to_edge_list(&self, flow: &[S]) -> String {
        let mut out = String::new();
        for (arc, f) in self.arcs.iter().zip(flow) {
            let _ = writeln!(out, "{} {} {}", arc.from.name(), arc.to.name(), f);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct UnsplittableFlow<S> {
    pub assignment: IntegralAssignment,
    /// Parallel to the network's arcs.
    pub flow: Vec<S>,
}

/// Routes every demand `d_j` along the path of row `s_j`.
pub fn assignment_to_unsplittable<S: Scalar>(net: &FlowNetwork<S>, y: &IntegralAssignment) -> Result<UnsplittableFlow<S>> {
    check_dims(&net.x, &net.d, Some(y))?;
    let n = net.n();
    // routed[i][t] = sum of d_j over j <= t with s_j = i.
    let mut routed = vec![vec![S::zero(); n]; net.m()];
    for (i, row) in routed.iter_mut().enumerate() {
        let mut acc = S::zero();
        for (j, slot) in row.iter_mut().enumerate() {
            if y.row_of(j) == i {
                acc += net.d.get(j).clone();
            }
            *slot = acc.clone();
        }
    }
    let mut flow = Vec::with_capacity(net.arcs.len());
    for arc in &net.arcs {
        flow.push(match arc.kind {
            ArcKind::Source { row } => routed[row][n - 1].clone(),
            ArcKind::Internal { row, t } => routed[row][t].clone(),
            ArcKind::Terminal { row, j } if y.row_of(j) == row => net.d.get(j).clone(),
            ArcKind::Terminal { .. } => S::zero(),
        });
    }
    if net.carpool {
        if let Some(j) = (0..n).find(|&j| net.x.get(y.row_of(j), j).is_zero()) {
            return Err(Error::Invalid(format!(
                "column {} routed through row {} which has no arc to t{}",
                j + 1,
                y.row_of(j) + 1,
                j + 1
            )));
        }
    }
    Ok(UnsplittableFlow {
        assignment: y.clone(),
        flow,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArcDiscrepancy<S> {
    /// `max_a |x_a - y_a|` over all arcs.
    pub max: S,
    pub argmax: ArcKind,
    /// Maximum over source and internal arcs; equals the prefix discrepancy.
    pub path_max: S,
    /// Maximum over internal arcs alone (prefixes shorter than `n`).
    pub internal_max: S,
    pub terminal_max: S,
    pub source_max: S,
    pub d_max: S,
}

/// Arc-wise difference between the fractional and the unsplittable flow.
pub fn verify_arc_discrepancy<S: Scalar>(net: &FlowNetwork<S>, uf: &UnsplittableFlow<S>) -> Result<ArcDiscrepancy<S>> {
    net.check_conservation(&uf.flow)?;
    let mut max: Option<(S, ArcKind)> = None;
    let (mut path_max, mut internal_max, mut terminal_max, mut source_max) = (S::zero(), S::zero(), S::zero(), S::zero());
    for ((arc, fx), fy) in net.arcs.iter().zip(&net.flow).zip(&uf.flow) {
        let diff = (fx.clone() - fy.clone()).abs();
        let slot = match arc.kind {
            ArcKind::Source { .. } => &mut source_max,
            ArcKind::Internal { .. } => &mut internal_max,
            ArcKind::Terminal { .. } => &mut terminal_max,
        };
        if diff > *slot {
            *slot = diff.clone();
        }
        if arc.kind.is_path() && diff > path_max {
            path_max = diff.clone();
        }
        if max.as_ref().is_none_or(|(v, _)| diff > *v) {
            max = Some((diff, arc.kind));
        }
    }
    let (max, argmax) = max.ok_or_else(|| Error::Internal("network without arcs".into()))?;
    let prefix = prefix_discrepancy(&net.x, &uf.assignment, &net.d)?.max_prefix_abs;
    // Exact mode demands equality; float sums are accumulated in a different order.
    let tol = S::slack() * S::max_of(S::one(), net.d.max().clone()) * S::from_i64(net.n() as i64);
    if (path_max.clone() - prefix.clone()).abs() > tol {
        return Err(Error::Internal(format!(
            "path arc discrepancy {path_max} differs from prefix discrepancy {prefix}"
        )));
    }
    Ok(ArcDiscrepancy {
        max,
        argmax,
        path_max,
        internal_max,
        terminal_max,
        source_max,
        d_max: net.d.max().clone(),
    })
}
