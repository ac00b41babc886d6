//! Accelerated projected gradient for the ε-insensitive SVR dual in its
//! textbook form, with separate `α` and `α*`:
//!
//! ```text
//! maximize  −½ (α−α*)ᵀG(α−α*) − e Σ(α+α*) + Σ y (α−α*)
//! s.t.      Σ(α − α*) = 0,  0 ≤ α, α* ≤ c
//! ```

pub struct OracleSolution {
    pub alpha: Vec<f64>,
    pub alpha_star: Vec<f64>,
    pub dual_objective: f64,
    pub iterations: usize,
}

pub fn dual_objective(g: &[Vec<f64>], y: &[f64], alpha: &[f64], alpha_star: &[f64], eps: f64) -> f64 {
    let n = y.len();
    let beta: Vec<f64> = (0..n).map(|t| alpha[t] - alpha_star[t]).collect();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += beta[i] * beta[j] * g[i][j];
        }
    }
    let lin: f64 = (0..n).map(|t| y[t] * beta[t] - eps * (alpha[t] + alpha_star[t])).sum();
    -0.5 * quad + lin
}

/// Projects `z` onto `{x ∈ [0,c]^2n : Σx[..n] − Σx[n..] = 0}` by bisection on
/// the multiplier of the equality constraint.
fn project(z: &[f64], n: usize, c: f64) -> Vec<f64> {
    let sign = |k: usize| if k < n { 1.0 } else { -1.0 };
    let at = |lambda: f64| -> (Vec<f64>, f64) {
        let x: Vec<f64> = z
            .iter()
            .enumerate()
            .map(|(k, &v)| (v - lambda * sign(k)).clamp(0.0, c))
            .collect();
        let s = x.iter().enumerate().map(|(k, v)| sign(k) * v).sum();
        (x, s)
    };
    let span = z.iter().fold(0.0f64, |m, v| m.max(v.abs())) + c + 1.0;
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid).1 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(0.5 * (lo + hi)).0
}

/// Runs until the gradient mapping `‖x⁺ − v‖/step` drops below `1e-12`, the
/// objective stalls for 3000 iterations, or `max_iter` is reached.
pub fn solve_svr_dual(g: &[Vec<f64>], y: &[f64], c: f64, eps: f64, max_iter: usize) -> OracleSolution {
    let n = y.len();
    let lipschitz = 2.0
        * (0..n)
            .map(|i| (0..n).map(|j| g[i][j].abs()).sum::<f64>())
            .fold(0.0, f64::max)
            .max(1e-12);
    let step = 1.0 / lipschitz;
    // minimize f = −J_D
    let grad = |x: &[f64]| -> Vec<f64> {
        let beta: Vec<f64> = (0..n).map(|t| x[t] - x[n + t]).collect();
        let gb: Vec<f64> = (0..n).map(|i| (0..n).map(|j| g[i][j] * beta[j]).sum()).collect();
        let mut out = vec![0.0; 2 * n];
        for t in 0..n {
            out[t] = gb[t] + eps - y[t];
            out[n + t] = -gb[t] + eps + y[t];
        }
        out
    };
    let f = |x: &[f64]| -dual_objective(g, y, &x[..n], &x[n..], eps);

    let mut x = vec![0.0; 2 * n];
    let mut v = x.clone();
    let mut t = 1.0f64;
    let mut fx = f(&x);
    let mut iterations = 0;
    let mut best_f = fx;
    let mut last_improvement = 0;
    for k in 0..max_iter {
        iterations = k + 1;
        let gv = grad(&v);
        let z: Vec<f64> = v.iter().zip(&gv).map(|(a, b)| a - step * b).collect();
        let x_new = project(&z, n, c);
        let f_new = f(&x_new);
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let mapping = x_new.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / step;
        if f_new < best_f - 1e-14 * best_f.abs().max(1.0) {
            best_f = f_new;
            last_improvement = k;
        } else if k - last_improvement > 3_000 {
            break;
        }
        if f_new > fx {
            // adaptive restart
            v = x.clone();
            t = 1.0;
            continue;
        }
        v = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| a + (t - 1.0) / t_new * (a - b))
            .collect();
        x = x_new;
        fx = f_new;
        t = t_new;
        if mapping < 1e-12 {
            break;
        }
    }
    OracleSolution {
        dual_objective: -fx,
        alpha: x[..n].to_vec(),
        alpha_star: x[n..].to_vec(),
        iterations,
    }
}
