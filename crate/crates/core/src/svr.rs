//! ε-insensitive support vector regression on lagged series.
//!
//! The model is `Z_t = Wᵀ Z⃗_t + W₀` with `Z⃗_t = (Z_{t−1}, …, Z_{t−p})`. It is
//! fitted through the dual in the net variables `β_t = α_t − α*_t`:
//!
//! ```text
//! maximize   J_D = −½ βᵀGβ − e Σ|β_t| + Σ Z_t β_t
//! subject to Σ β_t = 0,  −c ≤ β_t ≤ c
//! ```
//!
//! with `G` the kernel Gram matrix of the regressors. `α = max(β, 0)` and
//! `α* = max(−β, 0)`, so at most one of the pair is ever non-zero.

use alloc::vec::Vec;

use crate::kernel::{check_dims, KernelSpec};
use crate::math::{all_finite, dot};
use crate::qp::{self, DualTerm};
use crate::{Error, Matrix, Result};

/// Targets `Z_{p+1..T}` with their lag vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedDataset {
    pub targets: Vec<f64>,
    /// Most recent value first: `(Z_{t−1}, …, Z_{t−p})`.
    pub regressors: Vec<Vec<f64>>,
    pub lag: usize,
    pub series_len: usize,
}

pub fn build_lagged(series: &[f64], lag: usize) -> Result<LaggedDataset> {
    if lag == 0 {
        return Err(Error::invalid("lag must be at least 1"));
    }
    if series.len() < lag + 2 {
        return Err(Error::InsufficientData { needed: lag + 2, found: series.len() });
    }
    let m = series.len() - lag;
    let targets = series[lag..].to_vec();
    let regressors = (0..m)
        .map(|i| series[i..i + lag].iter().rev().copied().collect())
        .collect();
    Ok(LaggedDataset { targets, regressors, lag, series_len: series.len() })
}

impl LaggedDataset {
    /// Builds a dataset from explicit samples.
    pub fn from_samples(targets: Vec<f64>, regressors: Vec<Vec<f64>>) -> Result<Self> {
        if targets.len() != regressors.len() {
            return Err(Error::DimensionMismatch { expected: targets.len(), found: regressors.len() });
        }
        if targets.is_empty() {
            return Err(Error::InsufficientData { needed: 1, found: 0 });
        }
        let lag = check_dims(&regressors)?;
        if lag == 0 {
            return Err(Error::invalid("regressors must be non-empty"));
        }
        let series_len = targets.len() + lag;
        Ok(Self { targets, regressors, lag, series_len })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Copy without sample `idx`.
    pub fn without(&self, idx: usize) -> LaggedDataset {
        let mut out = self.clone();
        out.targets.remove(idx);
        out.regressors.remove(idx);
        out
    }

    pub(crate) fn check_finite(&self) -> Result<()> {
        if !all_finite(&self.targets) {
            return Err(Error::NonFinite("targets"));
        }
        if !self.regressors.iter().all(|r| all_finite(r)) {
            return Err(Error::NonFinite("regressors"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrParams {
    pub c: f64,
    pub eps: f64,
    /// Stopping threshold on the maximal KKT violation.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        Self { c: 10.0, eps: 0.01, tol: 1e-8, max_sweeps: 10_000 }
    }
}

impl SvrParams {
    fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::invalid(alloc::format!("c must be > 0, got {}", self.c)));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::invalid(alloc::format!("epsilon must be >= 0, got {}", self.eps)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid(alloc::format!("tol must be > 0, got {}", self.tol)));
        }
        Ok(())
    }

    fn term(&self) -> DualTerm {
        DualTerm { lo: -self.c, hi: self.c, quad: 0.0, abs: self.eps }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SvrDiagnostics {
    /// `J_D` at the returned point.
    pub dual_objective: f64,
    /// `½‖W‖² + c Σ(ξ_t + ξ*_t)` at the returned `(W, W₀)`.
    pub primal_objective: f64,
    pub max_kkt_violation: f64,
    /// Pair updates performed.
    pub iterations: usize,
    /// `J_D` after every sweep; non-decreasing.
    pub dual_trace: Vec<f64>,
    /// Primal objective after every sweep with `W = Σβ_t Z⃗_t` and the best
    /// intercept for that `W`.
    pub primal_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvrFit {
    pub alpha: Vec<f64>,
    pub alpha_star: Vec<f64>,
    pub intercept: f64,
    /// Indices with `0 < |α_t − α*_t| < c`.
    pub support_set: Vec<usize>,
    pub kernel: KernelSpec,
    pub c: f64,
    pub eps: f64,
    /// Regressors of the training samples (the expansion centers).
    pub centers: Vec<Vec<f64>>,
    pub diagnostics: SvrDiagnostics,
}

impl SvrFit {
    /// `α_t − α*_t`
    pub fn beta(&self) -> Vec<f64> {
        self.alpha.iter().zip(&self.alpha_star).map(|(a, s)| a - s).collect()
    }

    /// `Σ_k (α_k − α*_k) K(Z⃗_k, query) + W₀`
    pub fn predict(&self, query: &[f64]) -> Result<f64> {
        let dim = self.centers.first().map_or(0, Vec::len);
        if query.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: query.len() });
        }
        let mut z = self.intercept;
        for (center, b) in self.centers.iter().zip(self.beta()) {
            if b != 0.0 {
                z += b * self.kernel.eval(center, query);
            }
        }
        Ok(z)
    }

    /// Explicit weights `W = Σ (α_t − α*_t) Z⃗_t`; only defined for the linear kernel.
    pub fn weights(&self) -> Option<Vec<f64>> {
        if self.kernel != KernelSpec::Linear {
            return None;
        }
        let dim = self.centers.first().map_or(0, Vec::len);
        let mut w = alloc::vec![0.0; dim];
        for (center, b) in self.centers.iter().zip(self.beta()) {
            for (wj, xj) in w.iter_mut().zip(center) {
                *wj += b * xj;
            }
        }
        Some(w)
    }

    /// Largest complementary-slackness residual
    /// `max_t max(|α_t (e + ξ_t − r_t)|, |α*_t (e + ξ*_t + r_t)|)` on `data`,
    /// with `r_t = Z_t − Ẑ_t` and the slacks at their optimal values.
    pub fn complementary_slackness(&self, data: &LaggedDataset) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for t in 0..data.len() {
            let r = data.targets[t] - self.predict(&data.regressors[t])?;
            let xi = (r - self.eps).max(0.0);
            let xi_star = (-r - self.eps).max(0.0);
            worst = worst
                .max((self.alpha[t] * (self.eps + xi - r)).abs())
                .max((self.alpha_star[t] * (self.eps + xi_star + r)).abs());
        }
        Ok(worst)
    }
}

/// `J_D(β) = −½ βᵀGβ − e Σ|β| + Σ Z_t β_t`.
pub fn dual_objective(gram: &Matrix, targets: &[f64], beta: &[f64], eps: f64) -> f64 {
    let gb = gram.mul_vec(beta);
    -0.5 * dot(beta, &gb) - eps * beta.iter().map(|b| b.abs()).sum::<f64>() + dot(targets, beta)
}

/// `½ βᵀGβ + c Σ max(0, |Z_t − (Gβ)_t − W₀| − e)`.
pub fn primal_objective(gram: &Matrix, targets: &[f64], beta: &[f64], intercept: f64, c: f64, eps: f64) -> f64 {
    let gb = gram.mul_vec(beta);
    let slack: f64 = targets
        .iter()
        .zip(&gb)
        .map(|(y, f)| ((y - f - intercept).abs() - eps).max(0.0))
        .sum();
    0.5 * dot(beta, &gb) + c * slack
}

/// Primal objective minimized over the intercept for fixed `W = Σβ_t Z⃗_t`.
fn primal_with_best_intercept(gb_minus_y: &[f64], c: f64, eps: f64) -> f64 {
    // The slack sum is piecewise linear in W₀ with breakpoints at residual ± e.
    let mut best = f64::INFINITY;
    for &g in gb_minus_y {
        for w0 in [-g - eps, -g + eps] {
            let s: f64 = gb_minus_y.iter().map(|&h| ((-h - w0).abs() - eps).max(0.0)).sum();
            best = best.min(s);
        }
    }
    c * best
}

pub fn solve_dual(data: &LaggedDataset, kernel: KernelSpec, params: SvrParams) -> Result<SvrFit> {
    params.validate()?;
    let kernel = kernel.validated()?;
    data.check_finite()?;
    let gram = kernel.gram(&data.regressors)?;
    if !all_finite(gram.as_slice()) {
        return Err(Error::NonFinite("gram matrix"));
    }
    let term = params.term();
    let targets = &data.targets;

    let mut dual_trace = Vec::new();
    let mut primal_trace = Vec::new();
    let sol = qp::solve(&gram, targets, &term, params.tol, params.max_sweeps, |beta, grad| {
        let quad: f64 = beta.iter().zip(grad).zip(targets).map(|((b, g), y)| b * (g + y)).sum();
        dual_trace.push(-qp::objective(beta, grad, targets, &term));
        primal_trace.push(0.5 * quad + primal_with_best_intercept(grad, params.c, params.eps));
    });

    let beta = sol.beta;
    let intercept = qp::intercept(targets, &sol.grad, &beta, &term);
    let support_set = (0..beta.len()).filter(|&t| qp::is_free(beta[t], &term)).collect();
    let fit = SvrFit {
        alpha: beta.iter().map(|b| b.max(0.0)).collect(),
        alpha_star: beta.iter().map(|b| (-b).max(0.0)).collect(),
        intercept,
        support_set,
        kernel,
        c: params.c,
        eps: params.eps,
        centers: data.regressors.clone(),
        diagnostics: SvrDiagnostics {
            dual_objective: dual_objective(&gram, targets, &beta, params.eps),
            primal_objective: primal_objective(&gram, targets, &beta, intercept, params.c, params.eps),
            max_kkt_violation: sol.violation,
            iterations: sol.iterations,
            dual_trace,
            primal_trace,
        },
    };
    if sol.converged {
        Ok(fit)
    } else {
        Err(Error::SvrNotConverged(alloc::boxed::Box::new(fit)))
    }
}

/// Intercept recovered from the KKT conditions at the dual point `beta`.
///
/// With a non-empty support set `S = {t : 0 < |β_t| < c}` this is the average
/// of `Z_t − Wᵀ Z⃗_t − sign(β_t)·e` over `S`. With `S` empty the mean target is
/// used, clamped into the interval of intercepts the KKT conditions allow.
pub fn recover_intercept(
    data: &LaggedDataset,
    kernel: KernelSpec,
    beta: &[f64],
    c: f64,
    eps: f64,
) -> Result<f64> {
    if beta.len() != data.len() {
        return Err(Error::DimensionMismatch { expected: data.len(), found: beta.len() });
    }
    let gram = kernel.gram(&data.regressors)?;
    let mut grad = gram.mul_vec(beta);
    for (g, y) in grad.iter_mut().zip(&data.targets) {
        *g -= y;
    }
    let term = DualTerm { lo: -c, hi: c, quad: 0.0, abs: eps };
    Ok(qp::intercept(&data.targets, &grad, beta, &term))
}
