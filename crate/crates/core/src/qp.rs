//! Pairwise (SMO-style) solver for the separable dual
//!
//! ```text
//! minimize   ½ βᵀGβ − yᵀβ + Σ ψ(β_t)
//! subject to Σ β_t = 0,   lo ≤ β_t ≤ hi
//! ψ(s) = quad·s² + abs·|s|
//! ```
//!
//! Each step moves one coordinate up and another down by the same amount,
//! which keeps `Σβ = 0` exactly, and minimizes the piecewise-quadratic
//! restriction along that direction in closed form. The pair is the maximal
//! KKT violator.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::mean;
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DualTerm {
    pub lo: f64,
    pub hi: f64,
    pub quad: f64,
    pub abs: f64,
}

impl DualTerm {
    #[inline]
    fn value(&self, s: f64) -> f64 {
        self.quad * s * s + self.abs * s.abs()
    }

    /// Derivative of ψ when `s` increases.
    #[inline]
    fn right_slope(&self, s: f64) -> f64 {
        2.0 * self.quad * s + if s >= 0.0 { self.abs } else { -self.abs }
    }

    /// Derivative of ψ when `s` decreases.
    #[inline]
    fn left_slope(&self, s: f64) -> f64 {
        2.0 * self.quad * s + if s > 0.0 { self.abs } else { -self.abs }
    }

    fn snap(&self, s: f64, scale: f64) -> f64 {
        let tiny = 1e-13 * scale;
        if (s - self.hi).abs() <= tiny {
            self.hi
        } else if (s - self.lo).abs() <= tiny {
            self.lo
        } else if self.abs > 0.0 && s.abs() <= tiny {
            0.0
        } else {
            s.clamp(self.lo, self.hi)
        }
    }

    /// Magnitude used for snapping tolerances.
    fn scale(&self) -> f64 {
        let b = self.hi.abs().max(self.lo.abs());
        if b.is_finite() { b.max(1.0) } else { 1.0 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PairwiseSolution {
    pub beta: Vec<f64>,
    /// `Gβ − y`
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub violation: f64,
    pub converged: bool,
}

/// `½βᵀGβ − yᵀβ + Σψ(β)` computed from the gradient `Gβ − y`.
pub(crate) fn objective(beta: &[f64], grad: &[f64], targets: &[f64], term: &DualTerm) -> f64 {
    // ½βᵀGβ − yᵀβ = ½βᵀ(Gβ − y) − ½yᵀβ
    let mut f = 0.0;
    for t in 0..beta.len() {
        f += 0.5 * beta[t] * (grad[t] - targets[t]) + term.value(beta[t]);
    }
    f
}

fn gradient(gram: &Matrix, targets: &[f64], beta: &[f64]) -> Vec<f64> {
    let mut g = gram.mul_vec(beta);
    for (gi, yi) in g.iter_mut().zip(targets) {
        *gi -= yi;
    }
    g
}

/// Largest first-order KKT violation and the pair that attains it.
fn most_violating_pair(beta: &[f64], grad: &[f64], term: &DualTerm) -> (f64, usize, usize) {
    let mut up = (f64::INFINITY, usize::MAX);
    let mut down = (f64::NEG_INFINITY, usize::MAX);
    for t in 0..beta.len() {
        if beta[t] < term.hi {
            let d = grad[t] + term.right_slope(beta[t]);
            if d < up.0 {
                up = (d, t);
            }
        }
        if beta[t] > term.lo {
            let d = grad[t] + term.left_slope(beta[t]);
            if d > down.0 {
                down = (d, t);
            }
        }
    }
    if up.1 == usize::MAX || down.1 == usize::MAX {
        return (0.0, 0, 0);
    }
    (down.0 - up.0, up.1, down.1)
}

/// Exact minimizer of `φ(δ)` for the move `β_i += δ, β_j −= δ`.
///
/// `φ` is convex and piecewise quadratic, with pieces split at the box ends and
/// at the `|·|` kinks. The minimizer sits on the first piece whose right-end
/// slope is non-negative. Only slopes are compared, never objective values.
fn line_minimize(gram: &Matrix, beta: &[f64], grad: &[f64], term: &DualTerm, i: usize, j: usize) -> f64 {
    let (bi, bj) = (beta[i], beta[j]);
    let eta = (gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)]).max(0.0);
    let lin = grad[i] - grad[j];

    let lo = (term.lo - bi).max(bj - term.hi);
    let hi = (term.hi - bi).min(bj - term.lo);
    let mut points: Vec<f64> = vec![lo, hi];
    if term.abs > 0.0 {
        for k in [-bi, bj] {
            if k > lo && k < hi {
                points.push(k);
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    let curvature = eta + 4.0 * term.quad;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mid = match (a.is_finite(), b.is_finite()) {
            (true, true) => 0.5 * (a + b),
            (true, false) => a + 1.0,
            (false, true) => b - 1.0,
            (false, false) => 0.0,
        };
        let si = if bi + mid >= 0.0 { 1.0 } else { -1.0 };
        let sj = if bj - mid >= 0.0 { 1.0 } else { -1.0 };
        // φ'(δ) = curvature·δ + slope0 on this piece
        let slope0 = lin + 2.0 * term.quad * (bi - bj) + term.abs * (si - sj);
        let right = if b.is_finite() { curvature * b + slope0 } else { f64::INFINITY };
        if right >= 0.0 {
            return if curvature > 0.0 { (-slope0 / curvature).clamp(a, b) } else { a };
        }
    }
    *points.last().unwrap_or(&0.0)
}

/// Runs the solver from `β = 0`. `on_sweep(β, Gβ − y)` is called on the
/// starting point, after every sweep of `n` pair updates and on the final
/// iterate.
pub(crate) fn solve(
    gram: &Matrix,
    targets: &[f64],
    term: &DualTerm,
    tol: f64,
    max_sweeps: usize,
    mut on_sweep: impl FnMut(&[f64], &[f64]),
) -> PairwiseSolution {
    let n = targets.len();
    let mut beta = vec![0.0; n];
    let mut grad = gradient(gram, targets, &beta);
    let scale = term.scale();
    let max_iter = max_sweeps.saturating_mul(n.max(1));
    on_sweep(&beta, &grad);
    let mut iterations = 0;
    let (mut violation, mut i, mut j) = most_violating_pair(&beta, &grad, term);

    while violation > tol && iterations < max_iter {
        let d = line_minimize(gram, &beta, &grad, term, i, j);
        let new_i = term.snap(beta[i] + d, scale);
        let new_j = term.snap(beta[j] - d, scale);
        // Apply the realized moves so that Σβ stays balanced after snapping.
        let di = new_i - beta[i];
        let dj = beta[j] - new_j;
        let step = if di.abs() <= dj.abs() { di } else { dj };
        if step == 0.0 {
            // No representable progress along the best pair.
            break;
        }
        beta[i] += step;
        beta[j] -= step;
        if di != dj {
            beta[i] = term.snap(beta[i], scale);
            beta[j] = term.snap(beta[j], scale);
        }
        for t in 0..n {
            grad[t] += step * (gram[(t, i)] - gram[(t, j)]);
        }
        iterations += 1;
        if iterations % n.max(1) == 0 {
            grad = gradient(gram, targets, &beta);
            on_sweep(&beta, &grad);
        }
        (violation, i, j) = most_violating_pair(&beta, &grad, term);
    }

    grad = gradient(gram, targets, &beta);
    let (violation, _, _) = most_violating_pair(&beta, &grad, term);
    if iterations % n.max(1) != 0 {
        on_sweep(&beta, &grad);
    }
    PairwiseSolution { beta, grad, iterations, violation, converged: violation <= tol }
}

/// Intercept from the KKT conditions.
///
/// For every coordinate strictly inside its box and off the `|·|` kink, the
/// residual equals `ψ'(β_t)`, so `w0 = y_t − (Gβ)_t − ψ'(β_t)`; these values
/// are averaged. Without such coordinates the KKT conditions only bound `w0`
/// to an interval, and the mean target clamped into that interval is used.
pub(crate) fn intercept(targets: &[f64], grad: &[f64], beta: &[f64], term: &DualTerm) -> f64 {
    let (sum, count) = beta
        .iter()
        .zip(grad)
        .filter(|(&b, _)| is_free(b, term))
        .fold((0.0, 0usize), |(s, c), (&b, &g)| (s - g - term.right_slope(b), c + 1));
    if count > 0 {
        return sum / count as f64;
    }
    let (lo, hi) = intercept_bounds(grad, beta, term);
    let m = mean(targets);
    if lo <= hi {
        m.clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    }
}

pub(crate) fn is_free(b: f64, term: &DualTerm) -> bool {
    b > term.lo && b < term.hi && !(term.abs > 0.0 && b == 0.0)
}

/// Interval of intercepts consistent with the KKT conditions at `beta`.
pub(crate) fn intercept_bounds(grad: &[f64], beta: &[f64], term: &DualTerm) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (&b, &g) in beta.iter().zip(grad) {
        // residual r = -g - w0 must lie in [r_min, r_max]
        let r_min = term.left_slope(b);
        let r_max = if b >= term.hi { f64::INFINITY } else { term.right_slope(b) };
        let r_min = if b <= term.lo { f64::NEG_INFINITY } else { r_min };
        lo = lo.max(-g - r_max);
        hi = hi.min(-g - r_min);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn svr_term(c: f64, eps: f64) -> DualTerm {
        DualTerm { lo: -c, hi: c, quad: 0.0, abs: eps }
    }

    #[test]
    fn zero_targets_keep_zero_solution() {
        let g = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]);
        let sol = solve(&g, &[0.0, 0.0], &svr_term(1.0, 0.1), 1e-10, 100, |_, _| {});
        assert_eq!(sol.beta, vec![0.0, 0.0]);
        assert!(sol.converged);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn equality_constraint_is_exact() {
        let g = Matrix::from_rows(&[
            vec![1.0, 0.2, 0.1],
            vec![0.2, 1.0, 0.3],
            vec![0.1, 0.3, 1.0],
        ]);
        let sol = solve(&g, &[1.0, -2.0, 0.5], &svr_term(0.7, 0.05), 1e-12, 1000, |_, _| {});
        assert!(sol.converged);
        assert!(sol.beta.iter().sum::<f64>().abs() < 1e-14);
        assert!(sol.beta.iter().all(|b| b.abs() <= 0.7));
    }

    #[test]
    fn trace_is_monotone() {
        let g = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.0, 2.0],
            vec![1.0, 3.0, 1.0, 0.0],
            vec![0.0, 1.0, 2.0, 1.0],
            vec![2.0, 0.0, 1.0, 5.0],
        ]);
        let term = DualTerm { lo: f64::NEG_INFINITY, hi: f64::INFINITY, quad: 0.05, abs: 0.0 };
        let y = [1.0, 0.0, -1.0, 3.0];
        let mut trace = Vec::new();
        let sol = solve(&g, &y, &term, 1e-12, 10_000, |b, gr| trace.push(objective(b, gr, &y, &term)));
        assert!(sol.converged, "{} {} {:?}", sol.iterations, sol.violation, sol.beta);
        assert!(trace.len() >= 2);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }
}
