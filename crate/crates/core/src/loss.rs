//! Loss functions for residuals `e = observed - fitted`.
//!
//! All four losses are convex. Subgradients at kinks follow fixed conventions:
//! the quantile and ε-insensitive losses return 0 at `e = 0`, and the
//! ε-insensitive loss returns 0 on the tube edge `|e| = eps`.

use crate::qp::DualTerm;
use crate::{Error, Result};

pub const DEFAULT_HUBER_K: f64 = 1.345;
pub const DEFAULT_QUANTILE_Q: f64 = 0.5;
pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum LossSpec {
    /// `e²`
    #[default]
    LeastSquares,
    /// `½e²` for `|e| ≤ k`, `k|e| - ½k²` beyond.
    Huber { k: f64 },
    /// Pinball loss `e (q - 1[e < 0])`, `0 ≤ q ≤ 1`.
    Quantile { q: f64 },
    /// `max(0, |e| - eps)`
    EpsInsensitive { eps: f64 },
}

impl LossSpec {
    pub fn huber(k: f64) -> Result<Self> {
        LossSpec::Huber { k }.validated()
    }

    pub fn quantile(q: f64) -> Result<Self> {
        LossSpec::Quantile { q }.validated()
    }

    pub fn eps_insensitive(eps: f64) -> Result<Self> {
        LossSpec::EpsInsensitive { eps }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        match self {
            LossSpec::LeastSquares => Ok(self),
            LossSpec::Huber { k } if k > 0.0 && k.is_finite() => Ok(self),
            LossSpec::Huber { k } => Err(Error::invalid(alloc::format!("huber k must be > 0, got {k}"))),
            LossSpec::Quantile { q } if (0.0..=1.0).contains(&q) => Ok(self),
            LossSpec::Quantile { q } => {
                Err(Error::invalid(alloc::format!("quantile q must lie in [0, 1], got {q}")))
            }
            LossSpec::EpsInsensitive { eps } if eps >= 0.0 && eps.is_finite() => Ok(self),
            LossSpec::EpsInsensitive { eps } => {
                Err(Error::invalid(alloc::format!("epsilon must be >= 0, got {eps}")))
            }
        }
    }

    /// Short name used on the command line and in output files.
    pub fn name(&self) -> &'static str {
        match self {
            LossSpec::LeastSquares => "ls",
            LossSpec::Huber { .. } => "huber",
            LossSpec::Quantile { .. } => "quantile",
            LossSpec::EpsInsensitive { .. } => "eps",
        }
    }

    pub fn value(&self, e: f64) -> f64 {
        match *self {
            LossSpec::LeastSquares => e * e,
            LossSpec::Huber { k } => {
                let a = e.abs();
                if a <= k {
                    0.5 * e * e
                } else {
                    k * a - 0.5 * k * k
                }
            }
            LossSpec::Quantile { q } => {
                if e < 0.0 {
                    e * (q - 1.0)
                } else {
                    e * q
                }
            }
            LossSpec::EpsInsensitive { eps } => (e.abs() - eps).max(0.0),
        }
    }

    pub fn subgradient(&self, e: f64) -> f64 {
        match *self {
            LossSpec::LeastSquares => 2.0 * e,
            LossSpec::Huber { k } => {
                if e.abs() <= k {
                    e
                } else {
                    k * e.signum()
                }
            }
            LossSpec::Quantile { q } => {
                if e > 0.0 {
                    q
                } else if e < 0.0 {
                    q - 1.0
                } else {
                    0.0
                }
            }
            LossSpec::EpsInsensitive { eps } => {
                if e.abs() > eps {
                    e.signum()
                } else {
                    0.0
                }
            }
        }
    }

    /// The full subdifferential `[lo, hi]` at `e`.
    pub fn subdifferential(&self, e: f64) -> (f64, f64) {
        match *self {
            LossSpec::Quantile { q } if e == 0.0 => (q - 1.0, q),
            LossSpec::EpsInsensitive { eps } => {
                let a = e.abs();
                if a < eps {
                    (0.0, 0.0)
                } else if a == eps && e > 0.0 {
                    (0.0, 1.0)
                } else if a == eps && e < 0.0 {
                    (-1.0, 0.0)
                } else if e == 0.0 {
                    // eps == 0
                    (-1.0, 1.0)
                } else {
                    let s = e.signum();
                    (s, s)
                }
            }
            _ => {
                let g = self.subgradient(e);
                (g, g)
            }
        }
    }

    /// Points where the loss is not differentiable.
    pub fn kinks(&self) -> &'static [f64] {
        match self {
            LossSpec::Quantile { .. } => &[0.0],
            _ => &[],
        }
    }

    /// Convex-conjugate term `c·ρ*(β/c)` of the dual, as a box plus a
    /// quadratic-and-absolute penalty on each dual coordinate.
    pub(crate) fn dual_term(&self, c: f64) -> DualTerm {
        match *self {
            LossSpec::LeastSquares => DualTerm {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
                quad: 0.25 / c,
                abs: 0.0,
            },
            LossSpec::Huber { k } => DualTerm { lo: -c * k, hi: c * k, quad: 0.5 / c, abs: 0.0 },
            LossSpec::Quantile { q } => DualTerm { lo: c * (q - 1.0), hi: c * q, quad: 0.0, abs: 0.0 },
            LossSpec::EpsInsensitive { eps } => DualTerm { lo: -c, hi: c, quad: 0.0, abs: eps },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(LossSpec::LeastSquares.value(3.0), 9.0);
        assert_eq!(LossSpec::Huber { k: 1.0 }.value(2.0), 1.5);
        assert_eq!(LossSpec::Huber { k: 1.0 }.value(-2.0), 1.5);
        assert!((LossSpec::Quantile { q: 0.9 }.value(-1.0) - 0.1).abs() < 1e-15);
        assert_eq!(LossSpec::EpsInsensitive { eps: 0.5 }.value(2.0), 1.5);
        assert_eq!(LossSpec::EpsInsensitive { eps: 0.5 }.value(0.3), 0.0);
    }

    #[test]
    fn zero_residual_is_free() {
        for spec in [
            LossSpec::LeastSquares,
            LossSpec::Huber { k: 1.345 },
            LossSpec::Quantile { q: 0.3 },
            LossSpec::EpsInsensitive { eps: 0.1 },
            LossSpec::EpsInsensitive { eps: 0.0 },
        ] {
            assert_eq!(spec.value(0.0), 0.0, "{spec:?}");
        }
    }

    #[test]
    fn subgradient_spot_values() {
        assert_eq!(LossSpec::LeastSquares.subgradient(3.0), 6.0);
        assert_eq!(LossSpec::Huber { k: 1.0 }.subgradient(2.0), 1.0);
        assert_eq!(LossSpec::Huber { k: 1.0 }.subgradient(-2.0), -1.0);
        assert_eq!(LossSpec::Huber { k: 1.0 }.subgradient(0.5), 0.5);
        assert_eq!(LossSpec::Quantile { q: 0.5 }.subgradient(0.0), 0.0);
        assert_eq!(LossSpec::EpsInsensitive { eps: 0.0 }.subgradient(0.0), 0.0);
    }

    #[test]
    fn subgradient_lies_in_subdifferential() {
        let specs = [
            LossSpec::Quantile { q: 0.2 },
            LossSpec::EpsInsensitive { eps: 0.5 },
            LossSpec::EpsInsensitive { eps: 0.0 },
        ];
        for spec in specs {
            for e in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                let (lo, hi) = spec.subdifferential(e);
                let g = spec.subgradient(e);
                assert!(lo <= g && g <= hi, "{spec:?} at {e}: {g} not in [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn rejects_out_of_domain_parameters() {
        assert!(LossSpec::huber(0.0).is_err());
        assert!(LossSpec::huber(-1.0).is_err());
        assert!(LossSpec::quantile(1.5).is_err());
        assert!(LossSpec::quantile(-0.1).is_err());
        assert!(LossSpec::eps_insensitive(-0.01).is_err());
        assert!(LossSpec::quantile(0.0).is_ok());
        assert!(LossSpec::quantile(1.0).is_ok());
    }
}
