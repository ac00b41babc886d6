//! Kernel-expansion trend model
//!
//! ```text
//! Z_t = Σ_j W_j K_h(Z⃗_j, Z⃗_t) + W₀
//! (W, W₀) = argmin ½ WᵀW + c Σ_t ρ(Z_t − Σ_j W_j K_h(Z⃗_j, Z⃗_t) − W₀)
//! ```
//!
//! The expansion runs over the lag vectors of the training samples. Writing
//! `K` for their Gram matrix, the problem is a regularized linear regression on
//! the rows of `K`, and it is solved through its dual
//!
//! ```text
//! minimize ½ βᵀK²β − Zᵀβ + c Σ ρ*(β_t / c)    s.t. Σβ_t = 0
//! ```
//!
//! with `W = Kβ`. The conjugate `ρ*` of each supported loss is a box plus a
//! quadratic or `|·|` term, which the pairwise solver in `qp` minimizes
//! exactly along each update direction. The dual objective never increases
//! between sweeps and `W₀` comes from the KKT conditions.

use alloc::vec::Vec;

use crate::ingest::CountrySeries;
use crate::kernel::KernelSpec;
use crate::loss::LossSpec;
use crate::math::{all_finite, dot, exp, ln, sqrt, squared_distance};
use crate::qp;
use crate::svr::{build_lagged, LaggedDataset};
use crate::{Error, Matrix, Result};

pub const DEFAULT_C: f64 = 10.0;
pub const DEFAULT_LAG: usize = 1;
pub const DEFAULT_GRID_POINTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothParams {
    pub c: f64,
    /// Stopping threshold on the maximal dual KKT violation.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for SmoothParams {
    fn default() -> Self {
        Self { c: DEFAULT_C, tol: 1e-10, max_sweeps: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SmoothDiagnostics {
    /// Regularized primal objective at the returned coefficients.
    pub objective: f64,
    /// Minimization-form dual objective after every sweep; non-increasing.
    pub objective_trace: Vec<f64>,
    pub max_kkt_violation: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothModel {
    /// One weight per training sample, in sample order.
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub kernel: KernelSpec,
    pub loss: LossSpec,
    pub c: f64,
    pub centers: Vec<Vec<f64>>,
    /// Dual coefficients `β`, with `W = Kβ`. At the optimum `β_t / c` is a
    /// subgradient of the loss at residual `t`.
    pub dual: Vec<f64>,
    pub diagnostics: SmoothDiagnostics,
}

impl SmoothModel {
    /// Weights followed by the intercept.
    pub fn coefficient_vector(&self) -> Vec<f64> {
        let mut v = self.weights.clone();
        v.push(self.intercept);
        v
    }

    pub fn predict(&self, query: &[f64]) -> Result<f64> {
        let dim = self.centers.first().map_or(0, Vec::len);
        if query.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: query.len() });
        }
        Ok(self
            .centers
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * self.kernel.eval(x, query))
            .sum::<f64>()
            + self.intercept)
    }

    pub fn fitted_values(&self) -> Vec<f64> {
        self.centers.iter().map(|x| self.predict(x).unwrap_or(f64::NAN)).collect()
    }
}

/// The primal objective over a fixed dataset, kernel and loss.
#[derive(Debug, Clone)]
pub struct SmoothProblem<'a> {
    pub gram: Matrix,
    pub targets: &'a [f64],
    pub loss: LossSpec,
    pub c: f64,
}

impl<'a> SmoothProblem<'a> {
    pub fn new(data: &'a LaggedDataset, kernel: KernelSpec, loss: LossSpec, c: f64) -> Result<Self> {
        let gram = kernel.gram(&data.regressors)?;
        Ok(Self { gram, targets: &data.targets, loss, c })
    }

    pub fn residuals(&self, weights: &[f64], intercept: f64) -> Vec<f64> {
        let fitted = self.gram.mul_vec(weights);
        self.targets.iter().zip(fitted).map(|(y, f)| y - f - intercept).collect()
    }

    pub fn objective(&self, weights: &[f64], intercept: f64) -> f64 {
        let data_term: f64 =
            self.residuals(weights, intercept).iter().map(|&r| self.loss.value(r)).sum();
        0.5 * dot(weights, weights) + self.c * data_term
    }

    /// `(∂/∂W, ∂/∂W₀)` using `loss.subgradient` for each residual.
    pub fn subgradient(&self, weights: &[f64], intercept: f64) -> (Vec<f64>, f64) {
        let s: Vec<f64> =
            self.residuals(weights, intercept).iter().map(|&r| self.loss.subgradient(r)).collect();
        self.subgradient_from(weights, &s)
    }

    /// Objective subgradient for explicitly chosen loss subgradients `s`.
    pub fn subgradient_from(&self, weights: &[f64], s: &[f64]) -> (Vec<f64>, f64) {
        // K is symmetric, so Kᵀs = Ks.
        let ks = self.gram.mul_vec(s);
        let dw = weights.iter().zip(ks).map(|(w, k)| w - self.c * k).collect();
        (dw, -self.c * s.iter().sum::<f64>())
    }
}

pub fn fit_smooth(
    data: &LaggedDataset,
    kernel: KernelSpec,
    loss: LossSpec,
    params: SmoothParams,
) -> Result<SmoothModel> {
    let kernel = kernel.validated()?;
    let loss = loss.validated()?;
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::invalid(alloc::format!("c must be > 0, got {}", params.c)));
    }
    if !(params.tol > 0.0) {
        return Err(Error::invalid(alloc::format!("tol must be > 0, got {}", params.tol)));
    }
    data.check_finite()?;
    let problem = SmoothProblem::new(data, kernel, loss, params.c)?;
    if !all_finite(problem.gram.as_slice()) {
        return Err(Error::NonFinite("gram matrix"));
    }
    let dual_gram = problem.gram.mul(&problem.gram);
    let term = loss.dual_term(params.c);
    let targets = &data.targets;

    // A dual violation δ moves the primal subgradient by up to 2c‖K‖∞·δ,
    // so aim below tol by that factor.
    let k_norm = (0..problem.gram.rows())
        .map(|i| problem.gram.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let dual_tol = params.tol / (2.0 * params.c * k_norm).max(1.0);

    let mut objective_trace = Vec::new();
    let sol = qp::solve(&dual_gram, targets, &term, dual_tol, params.max_sweeps, |b, g| {
        objective_trace.push(qp::objective(b, g, targets, &term));
    });
    let weights = problem.gram.mul_vec(&sol.beta);
    let intercept = qp::intercept(targets, &sol.grad, &sol.beta, &term);
    let objective = problem.objective(&weights, intercept);
    let model = SmoothModel {
        weights,
        intercept,
        kernel,
        loss,
        c: params.c,
        centers: data.regressors.clone(),
        dual: sol.beta,
        diagnostics: SmoothDiagnostics {
            objective,
            objective_trace,
            max_kkt_violation: sol.violation,
            iterations: sol.iterations,
        },
    };
    // The tightened target can sit below the rounding floor; the requested
    // tolerance still has to hold.
    if sol.converged || sol.violation <= params.tol {
        Ok(model)
    } else {
        Err(Error::SmoothNotConverged(alloc::boxed::Box::new(model)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthSelection {
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    /// Mean leave-one-out loss for every grid point.
    pub scores: Vec<f64>,
}

/// Mean leave-one-out prediction loss of a Gaussian-kernel fit with bandwidth `h`.
///
/// A fold that stops at the iteration cap contributes its best iterate.
pub fn loo_score(data: &LaggedDataset, h: f64, loss: LossSpec, params: SmoothParams) -> Result<f64> {
    let kernel = KernelSpec::gaussian(h)?;
    let mut total = 0.0;
    for i in 0..data.len() {
        let train = data.without(i);
        let model = match fit_smooth(&train, kernel, loss, params) {
            Ok(m) => m,
            Err(Error::SmoothNotConverged(m)) => *m,
            Err(e) => return Err(e),
        };
        total += loss.value(data.targets[i] - model.predict(&data.regressors[i])?);
    }
    Ok(total / data.len() as f64)
}

/// Picks the grid bandwidth with the smallest leave-one-out score. Scores
/// within `1e-12` (relative) of the best count as ties and go to the smaller
/// bandwidth.
pub fn select_bandwidth(
    data: &LaggedDataset,
    loss: LossSpec,
    params: SmoothParams,
    grid: &[f64],
) -> Result<BandwidthSelection> {
    if grid.is_empty() {
        return Err(Error::invalid("bandwidth grid is empty"));
    }
    if grid.iter().any(|h| !(*h > 0.0 && h.is_finite())) || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("bandwidth grid must be positive and strictly increasing"));
    }
    if data.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, found: data.len() });
    }
    let scores = grid
        .iter()
        .map(|&h| loo_score(data, h, loss, params))
        .collect::<Result<Vec<_>>>()?;
    let best = scores.iter().copied().filter(|s| s.is_finite()).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::BandwidthSelection);
    }
    let slack = 1e-12 * best.abs().max(1.0);
    let idx = scores.iter().position(|s| s.is_finite() && *s <= best + slack).unwrap_or(0);
    Ok(BandwidthSelection { bandwidth: grid[idx], grid: grid.to_vec(), scores })
}

/// `points` values log-spaced over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        n => {
            let (a, b) = (ln(lo), ln(hi));
            (0..n).map(|i| exp(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
        }
    }
}

/// Default grid: [`DEFAULT_GRID_POINTS`] log-spaced bandwidths over
/// `[0.01, 10] × scale`, where `scale` is the largest distance between two
/// lag vectors (1 when they all coincide).
pub fn default_grid(data: &LaggedDataset) -> Vec<f64> {
    let mut scale: f64 = 0.0;
    for (i, a) in data.regressors.iter().enumerate() {
        for b in &data.regressors[..i] {
            scale = scale.max(sqrt(squared_distance(a, b)));
        }
    }
    if !(scale > 0.0) {
        scale = 1.0;
    }
    log_grid(0.01 * scale, 10.0 * scale, DEFAULT_GRID_POINTS)
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelMode {
    Linear,
    /// Gaussian kernel with a fixed bandwidth.
    Fixed(f64),
    /// Gaussian kernel, bandwidth chosen by leave-one-out over the given
    /// grid, or [`default_grid`].
    Auto(Option<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub lag: usize,
    pub loss: LossSpec,
    pub kernel: KernelMode,
    pub params: SmoothParams,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            lag: DEFAULT_LAG,
            loss: LossSpec::LeastSquares,
            kernel: KernelMode::Auto(None),
            params: SmoothParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountryFit {
    pub country: alloc::string::String,
    pub model: SmoothModel,
    pub selection: Option<BandwidthSelection>,
}

/// Fits one country's normalized feature vector, read as the sequence
/// `Z_1..Z_2w` (positive weeks, then negative weeks).
pub fn fit_country(series: &CountrySeries, config: &FitConfig) -> Result<CountryFit> {
    if series.features.is_empty() {
        return Err(Error::invalid(alloc::format!("series for {} is not normalized", series.country)));
    }
    let data = build_lagged(&series.features, config.lag)?;
    let (kernel, selection) = match &config.kernel {
        KernelMode::Linear => (KernelSpec::Linear, None),
        KernelMode::Fixed(h) => (KernelSpec::gaussian(*h)?, None),
        KernelMode::Auto(grid) => {
            let grid = grid.clone().unwrap_or_else(|| default_grid(&data));
            let sel = select_bandwidth(&data, config.loss, config.params, &grid)?;
            (KernelSpec::gaussian(sel.bandwidth)?, Some(sel))
        }
    };
    let model = fit_smooth(&data, kernel, config.loss, config.params)?;
    Ok(CountryFit { country: series.country.clone(), model, selection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_series_is_absorbed_by_intercept() {
        let data = build_lagged(&[0.3; 8], 1).unwrap();
        for loss in [LossSpec::LeastSquares, LossSpec::Huber { k: 1.345 }, LossSpec::Quantile { q: 0.5 }] {
            let m = fit_smooth(&data, KernelSpec::gaussian(0.2).unwrap(), loss, SmoothParams::default()).unwrap();
            for f in m.fitted_values() {
                assert!((f - 0.3).abs() < 1e-6, "{loss:?}: {f}");
            }
            assert!(m.weights.iter().all(|w| w.abs() < 1e-9));
        }
    }

    #[test]
    fn zero_features_give_zero_coefficients() {
        let s = crate::ingest::normalize(
            CountrySeries::new("ZZ", vec![0; 4], vec![0; 4]),
            crate::ingest::Normalization::RelativeFrequency,
        );
        let fit = fit_country(&s, &FitConfig::default()).unwrap();
        assert!(fit.model.coefficient_vector().iter().all(|&c| c == 0.0));
        assert_eq!(fit.model.coefficient_vector().len(), 8);
    }

    #[test]
    fn single_point_grid() {
        let data = build_lagged(&[0.1, 0.5, 0.2, 0.6, 0.3], 1).unwrap();
        let sel = select_bandwidth(&data, LossSpec::LeastSquares, SmoothParams::default(), &[0.7]).unwrap();
        assert_eq!(sel.bandwidth, 0.7);
        assert_eq!(sel.scores.len(), 1);
    }

    #[test]
    fn grid_validation() {
        let data = build_lagged(&[0.1, 0.5, 0.2, 0.6], 1).unwrap();
        let p = SmoothParams::default();
        assert!(select_bandwidth(&data, LossSpec::LeastSquares, p, &[]).is_err());
        assert!(select_bandwidth(&data, LossSpec::LeastSquares, p, &[0.5, 0.5]).is_err());
        assert!(select_bandwidth(&data, LossSpec::LeastSquares, p, &[-1.0, 0.5]).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.01, 10.0, 20);
        assert_eq!(g.len(), 20);
        assert!((g[0] - 0.01).abs() < 1e-15);
        assert!((g[19] - 10.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn unnormalized_series_is_rejected() {
        let s = CountrySeries::new("US", vec![1; 4], vec![1; 4]);
        assert!(fit_country(&s, &FitConfig::default()).unwrap_err().is_contract_violation());
    }
}
