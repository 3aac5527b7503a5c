//! Dense `f64` vectors and row-major matrices.
//!
//! Every optimizer buffer (parameters, gradients, moment estimates) is a
//! [`RealVector`]. All arithmetic is elementwise; binary operations require
//! equal lengths and the partial operations (`div`, `sqrt`) reject inputs
//! outside their domain instead of producing NaN or infinity.

use std::ops::Index;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VectorError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("domain error in {op} at index {index}: {value}")]
    DomainError {
        op: &'static str,
        index: usize,
        value: f64,
    },
}

/// The elementwise operations understood by [`elementwise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementwiseOp {
    Add,
    Sub,
    Mul,
    Div,
    Max,
    Sqrt,
    Square,
    Scale,
}

/// Right-hand operand of [`elementwise`]. Scalars broadcast.
#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Vector(&'a RealVector),
    Scalar(f64),
    /// For the unary operations (`Sqrt`, `Square`).
    Unary,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealVector {
    data: Vec<f64>,
}

impl RealVector {
    pub fn new(data: Vec<f64>) -> Self {
        Self { data }
    }

    pub fn zeros(len: usize) -> Self {
        Self::filled(len, 0.0)
    }

    pub fn filled(len: usize, value: f64) -> Self {
        Self {
            data: vec![value; len],
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    fn check_len(&self, other: &RealVector) -> Result<(), VectorError> {
        if self.len() != other.len() {
            return Err(VectorError::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(())
    }

    fn zip_with(
        &self,
        other: &RealVector,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<RealVector, VectorError> {
        self.check_len(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect())
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> RealVector {
        self.data.iter().map(|&a| f(a)).collect()
    }

    pub fn add(&self, other: &RealVector) -> Result<RealVector, VectorError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealVector) -> Result<RealVector, VectorError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &RealVector) -> Result<RealVector, VectorError> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn div(&self, other: &RealVector) -> Result<RealVector, VectorError> {
        self.check_len(other)?;
        if let Some(index) = other.data.iter().position(|&b| b == 0.0) {
            return Err(VectorError::DomainError {
                op: "div",
                index,
                value: 0.0,
            });
        }
        self.zip_with(other, |a, b| a / b)
    }

    pub fn max(&self, other: &RealVector) -> Result<RealVector, VectorError> {
        self.zip_with(other, f64::max)
    }

    pub fn sqrt(&self) -> Result<RealVector, VectorError> {
        if let Some((index, &value)) = self.data.iter().enumerate().find(|(_, &a)| a < 0.0) {
            return Err(VectorError::DomainError {
                op: "sqrt",
                index,
                value,
            });
        }
        Ok(self.map(f64::sqrt))
    }

    pub fn square(&self) -> RealVector {
        self.map(|a| a * a)
    }

    pub fn scale(&self, factor: f64) -> RealVector {
        self.map(|a| a * factor)
    }

    pub fn add_scalar(&self, value: f64) -> RealVector {
        self.map(|a| a + value)
    }

    pub fn dot(&self, other: &RealVector) -> Result<f64, VectorError> {
        self.check_len(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn max_abs_diff(&self, other: &RealVector) -> Result<f64, VectorError> {
        self.check_len(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl From<Vec<f64>> for RealVector {
    fn from(data: Vec<f64>) -> Self {
        Self { data }
    }
}

impl From<&[f64]> for RealVector {
    fn from(data: &[f64]) -> Self {
        Self {
            data: data.to_vec(),
        }
    }
}

impl FromIterator<f64> for RealVector {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        Self {
            data: iter.into_iter().collect(),
        }
    }
}

impl Index<usize> for RealVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.data[index]
    }
}

impl<'a> IntoIterator for &'a RealVector {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.data.iter()
    }
}

/// Generic elementwise dispatch. `Scale` and scalar operands broadcast; the
/// unary operations ignore nothing and require [`Operand::Unary`].
pub fn elementwise(
    op: ElementwiseOp,
    a: &RealVector,
    b: Operand<'_>,
) -> Result<RealVector, VectorError> {
    use ElementwiseOp::*;
    match (op, b) {
        (Sqrt, Operand::Unary) => a.sqrt(),
        (Square, Operand::Unary) => Ok(a.square()),
        (Scale, Operand::Scalar(s)) | (Mul, Operand::Scalar(s)) => Ok(a.scale(s)),
        (Add, Operand::Scalar(s)) => Ok(a.add_scalar(s)),
        (Sub, Operand::Scalar(s)) => Ok(a.add_scalar(-s)),
        (Div, Operand::Scalar(s)) => a.div(&RealVector::filled(a.len(), s)),
        (Max, Operand::Scalar(s)) => Ok(a.map(|x| x.max(s))),
        (Add, Operand::Vector(b)) => a.add(b),
        (Sub, Operand::Vector(b)) => a.sub(b),
        (Mul, Operand::Vector(b)) => a.mul(b),
        (Div, Operand::Vector(b)) => a.div(b),
        (Max, Operand::Vector(b)) => a.max(b),
        (Scale, Operand::Vector(b)) => Err(VectorError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        }),
        (op, Operand::Unary) => Err(VectorError::DomainError {
            op: binary_name(op),
            index: 0,
            value: f64::NAN,
        }),
        (Sqrt | Square, _) => Err(VectorError::DomainError {
            op: if op == Sqrt { "sqrt" } else { "square" },
            index: 0,
            value: f64::NAN,
        }),
    }
}

fn binary_name(op: ElementwiseOp) -> &'static str {
    match op {
        ElementwiseOp::Add => "add",
        ElementwiseOp::Sub => "sub",
        ElementwiseOp::Mul => "mul",
        ElementwiseOp::Div => "div",
        ElementwiseOp::Max => "max",
        ElementwiseOp::Scale => "scale",
        ElementwiseOp::Sqrt => "sqrt",
        ElementwiseOp::Square => "square",
    }
}

pub fn dot(a: &RealVector, b: &RealVector) -> Result<f64, VectorError> {
    a.dot(b)
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, VectorError> {
        if data.len() != rows * cols {
            return Err(VectorError::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, VectorError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(VectorError::LengthMismatch {
                    left: row.len(),
                    right: cols,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Single-column matrix.
    pub fn column(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn col_values(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    /// New matrix made of the given rows, in order.
    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, VectorError> {
        if x.len() != self.cols {
            return Err(VectorError::LengthMismatch {
                left: self.cols,
                right: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }
}
