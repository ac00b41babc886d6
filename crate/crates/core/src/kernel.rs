//! Kernel functions and Gram matrices.

use alloc::vec::Vec;

use crate::math::{dot, exp, squared_distance};
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `uᵀv`
    Linear,
    /// `exp(-‖u - v‖² / (2h²))`
    Gaussian { bandwidth: f64 },
}

impl KernelSpec {
    pub fn gaussian(bandwidth: f64) -> Result<Self> {
        KernelSpec::Gaussian { bandwidth }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            KernelSpec::Gaussian { bandwidth } if !(bandwidth > 0.0 && bandwidth.is_finite()) => {
                Err(Error::invalid(alloc::format!("bandwidth must be > 0, got {bandwidth}")))
            }
            _ => Ok(self),
        }
    }

    pub fn bandwidth(&self) -> Option<f64> {
        match self {
            KernelSpec::Linear => None,
            KernelSpec::Gaussian { bandwidth } => Some(*bandwidth),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Gaussian { .. } => "gaussian",
        }
    }

    /// Evaluates the kernel. Fails on a dimension mismatch or empty vectors.
    pub fn value(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: u.len(), found: v.len() });
        }
        if u.is_empty() {
            return Err(Error::invalid("kernel arguments must be non-empty"));
        }
        Ok(self.eval(u, v))
    }

    /// Unchecked evaluation for callers that have already validated shapes.
    #[inline]
    pub(crate) fn eval(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => dot(u, v),
            KernelSpec::Gaussian { bandwidth } => {
                exp(-squared_distance(u, v) / (2.0 * bandwidth * bandwidth))
            }
        }
    }

    /// `G[i][j] = K(points[i], points[j])`.
    pub fn gram(&self, points: &[Vec<f64>]) -> Result<Matrix> {
        let dim = check_dims(points)?;
        if dim == 0 && !points.is_empty() {
            return Err(Error::invalid("kernel arguments must be non-empty"));
        }
        let n = points.len();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let k = if i == j && matches!(self, KernelSpec::Gaussian { .. }) {
                    1.0
                } else {
                    self.eval(&points[i], &points[j])
                };
                g[(i, j)] = k;
                g[(j, i)] = k;
            }
        }
        Ok(g)
    }
}

/// Returns the shared dimension of `points`.
pub(crate) fn check_dims(points: &[Vec<f64>]) -> Result<usize> {
    let dim = points.first().map_or(0, Vec::len);
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
    }
    Ok(dim)
}
