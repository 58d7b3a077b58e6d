//! Assignment matrices, weights and support masks.
//!
//! Indices are zero-based throughout the library: rows `0..m`, columns
//! `0..n`. File formats and reports convert to one-based indices at the
//! boundary.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense row-major `m x n` matrix with no value constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    m: usize,
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::Dimension("matrix has no rows".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::Dimension("matrix has no columns".into()));
        }
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
        Ok(Matrix {
            m,
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { m, n, data }
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = &S> + '_ {
        (0..self.m).map(move |i| self.get(i, j))
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.m).map(|i| self.row(i).to_vec()).collect()
    }

    /// Same matrix with column order reversed.
    pub fn reversed_columns(&self) -> Self {
        Matrix::from_fn(self.m, self.n, |i, j| self.get(i, self.n - 1 - j).clone())
    }
}

/// First invariant a candidate fractional assignment violates.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Dimensions of the inputs disagree.
    Dimension(String),
    EntryOutOfRange { row: usize, col: usize, value: String },
    ColumnSum { col: usize, sum: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension(msg) => write!(f, "dimension mismatch: {msg}"),
            Violation::EntryOutOfRange { row, col, value } => write!(
                f,
                "entry ({}, {}) = {value} is outside [0, 1]",
                row + 1,
                col + 1
            ),
            Violation::ColumnSum { col, sum } => write!(f, "column {} sums to {sum}", col + 1),
        }
    }
}

/// Checks entry range and unit column sums. Float mode accepts column sums
/// within `1e-9` of one.
pub fn validate_fractional<S: Scalar>(x: &Matrix<S>) -> std::result::Result<(), Violation> {
    let zero = S::zero();
    let one = S::one();
    let slack = S::slack();
    for j in 0..x.cols() {
        for i in 0..x.rows() {
            let v = x.get(i, j);
            if *v < zero.clone() - slack.clone() || *v > one.clone() + slack.clone() {
                return Err(Violation::EntryOutOfRange {
                    row: i,
                    col: j,
                    value: v.to_string(),
                });
            }
        }
        let sum = x.column(j).fold(S::zero(), |acc, v| acc + v.clone());
        if (sum.clone() - one.clone()).abs() > slack {
            return Err(Violation::ColumnSum {
                col: j,
                sum: sum.to_string(),
            });
        }
    }
    Ok(())
}

/// An `m x n` matrix with entries in `[0, 1]` and unit column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalAssignment<S> {
    x: Matrix<S>,
}

impl<S: Scalar> FractionalAssignment<S> {
    pub fn new(x: Matrix<S>) -> Result<Self> {
        match validate_fractional(&x) {
            Ok(()) => Ok(FractionalAssignment { x }),
            Err(Violation::Dimension(msg)) => Err(Error::Dimension(msg)),
            Err(v) => Err(Error::Invalid(v.to_string())),
        }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    /// Rows given as `(numerator, denominator)` pairs.
    pub fn from_ratios(rows: &[Vec<(i64, i64)>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| S::ratio(p, q)).collect())
                .collect(),
        )
    }

    /// The 0/1 matrix of an integral assignment.
    pub fn from_integral(y: &IntegralAssignment, m: usize) -> Self {
        FractionalAssignment {
            x: Matrix::from_fn(m, y.len(), |i, j| if y.row_of(j) == i { S::one() } else { S::zero() }),
        }
    }

    pub fn m(&self) -> usize {
        self.x.rows()
    }

    pub fn n(&self) -> usize {
        self.x.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        self.x.get(i, j)
    }

    pub fn row(&self, i: usize) -> &[S] {
        self.x.row(i)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = &S> + '_ {
        self.x.column(j)
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.x
    }

    pub fn reversed_columns(&self) -> Self {
        FractionalAssignment {
            x: self.x.reversed_columns(),
        }
    }

    /// The integral assignment this matrix encodes, if every entry is 0 or 1.
    pub fn as_integral(&self) -> Option<IntegralAssignment> {
        let rows = (0..self.n())
            .map(|j| {
                let ones: Vec<usize> = (0..self.m()).filter(|&i| *self.get(i, j) == S::one()).collect();
                (ones.len() == 1 && self.column(j).all(|v| v.is_zero() || *v == S::one())).then(|| ones[0])
            })
            .collect::<Option<Vec<_>>>()?;
        Some(IntegralAssignment { rows })
    }

    /// Converts entries to another backend.
    pub fn convert<T: Scalar>(&self) -> Result<FractionalAssignment<T>> {
        let rows = (0..self.m())
            .map(|i| self.row(i).iter().map(|v| convert_scalar::<S, T>(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FractionalAssignment::from_rows(rows)
    }
}

pub(crate) fn convert_scalar<S: Scalar, T: Scalar>(v: &S) -> Result<T> {
    if S::is_exact() {
        T::parse(&v.to_string())
    } else {
        T::from_f64(v.to_f64())
    }
}

/// Strictly positive item weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<S> {
    d: Vec<S>,
    d_max: S,
}

impl<S: Scalar> WeightVector<S> {
    pub fn new(d: Vec<S>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Dimension("weight vector is empty".into()));
        }
        if let Some((j, v)) = d.iter().enumerate().find(|(_, v)| **v <= S::zero()) {
            return Err(Error::Invalid(format!("weight {} = {v} is not positive", j + 1)));
        }
        let d_max = d.iter().cloned().reduce(S::max_of).expect("non-empty");
        Ok(WeightVector { d, d_max })
    }

    pub fn ones(n: usize) -> Self {
        WeightVector {
            d: vec![S::one(); n],
            d_max: S::one(),
        }
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn get(&self, j: usize) -> &S {
        &self.d[j]
    }

    pub fn as_slice(&self) -> &[S] {
        &self.d
    }

    pub fn max(&self) -> &S {
        &self.d_max
    }

    /// Every weight multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &S) -> Result<Self> {
        Self::new(self.d.iter().map(|v| v.clone() * factor.clone()).collect())
    }

    pub fn reversed(&self) -> Self {
        WeightVector {
            d: self.d.iter().rev().cloned().collect(),
            d_max: self.d_max.clone(),
        }
    }

    pub fn convert<T: Scalar>(&self) -> Result<WeightVector<T>> {
        WeightVector::new(self.d.iter().map(convert_scalar::<S, T>).collect::<Result<_>>()?)
    }
}

/// One selected row per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegralAssignment {
    rows: Vec<usize>,
}

impl IntegralAssignment {
    /// `rows[j]` is the zero-based row column `j` is assigned to.
    pub fn new(rows: Vec<usize>, m: usize) -> Result<Self> {
        if let Some((j, &r)) = rows.iter().enumerate().find(|(_, &r)| r >= m) {
            return Err(Error::Invalid(format!(
                "column {} assigned to row {}, but there are only {m} rows",
                j + 1,
                r + 1
            )));
        }
        Ok(IntegralAssignment { rows })
    }

    /// Builds from one-based row indices, as used by the file format.
    pub fn from_one_based(rows: &[usize], m: usize) -> Result<Self> {
        if let Some(j) = rows.iter().position(|&r| r == 0) {
            return Err(Error::Invalid(format!("column {} has row index 0; indices are 1-based", j + 1)));
        }
        Self::new(rows.iter().map(|r| r - 1).collect(), m)
    }

    pub(crate) fn from_vec_unchecked(rows: Vec<usize>) -> Self {
        IntegralAssignment { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row_of(&self, j: usize) -> usize {
        self.rows[j]
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r + 1).collect()
    }

    /// Indicator `y_ij`.
    pub fn y(&self, i: usize, j: usize) -> bool {
        self.rows[j] == i
    }

    pub fn reversed(&self) -> Self {
        IntegralAssignment {
            rows: self.rows.iter().rev().copied().collect(),
        }
    }
}

/// Which rows each column may be assigned to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMask {
    m: usize,
    n: usize,
    allowed: Vec<bool>,
}

impl SupportMask {
    pub fn new(m: usize, n: usize, allowed: Vec<bool>) -> Result<Self> {
        if allowed.len() != m * n {
            return Err(Error::Dimension(format!(
                "mask has {} entries, expected {m} x {n}",
                allowed.len()
            )));
        }
        let mask = SupportMask { m, n, allowed };
        if let Some(j) = (0..n).find(|&j| !(0..m).any(|i| mask.allows(i, j))) {
            return Err(Error::Invalid(format!("column {} has no allowed row", j + 1)));
        }
        Ok(mask)
    }

    pub fn all(m: usize, n: usize) -> Self {
        SupportMask {
            m,
            n,
            allowed: vec![true; m * n],
        }
    }

    /// The nonzero pattern of `x`.
    pub fn support_of<S: Scalar>(x: &FractionalAssignment<S>) -> Self {
        let allowed = (0..x.m())
            .flat_map(|i| x.row(i).iter().map(|v| !v.is_zero()).collect::<Vec<_>>())
            .collect();
        // Every column of a fractional assignment has a nonzero entry.
        SupportMask {
            m: x.m(),
            n: x.n(),
            allowed,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.allowed[i * self.n + j]
    }

    pub fn respects(&self, y: &IntegralAssignment) -> bool {
        y.len() == self.n && (0..self.n).all(|j| self.allows(y.row_of(j), j))
    }
}

pub(crate) fn check_dims<S: Scalar>(
    x: &FractionalAssignment<S>,
    d: &WeightVector<S>,
    y: Option<&IntegralAssignment>,
) -> Result<()> {
    if d.len() != x.n() {
        return Err(Error::Dimension(format!(
            "{} weights for {} columns",
            d.len(),
            x.n()
        )));
    }
    if let Some(y) = y {
        if y.len() != x.n() {
            return Err(Error::Dimension(format!(
                "assignment covers {} columns, matrix has {}",
                y.len(),
                x.n()
            )));
        }
        if let Some(&r) = y.rows().iter().find(|&&r| r >= x.m()) {
            return Err(Error::Dimension(format!("row index {} exceeds m = {}", r + 1, x.m())));
        }
    }
    Ok(())
}
