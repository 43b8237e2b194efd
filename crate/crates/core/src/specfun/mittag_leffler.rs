//! Two-parameter Mittag-Leffler function on the real line.
//!
//! E_{α,β}(z) = Σ_{k≥0} z^k / Γ(αk + β).
//!
//! * `|z| ≤ 5` (and `0 < z ≤ cap`): power series with Neumaier summation.
//! * `z < -5`: exact inverse-Laplace representation. With `x = -z`, the
//!   function `t ↦ t^(β-1) E_{α,β}(-x t^α)` has transform `s^(α-β)/(s^α + x)`.
//!   Collapsing the Bromwich contour onto the branch cut gives the residues at
//!   `s = x^(1/α) e^(±iπ/α)` (present for α > 1) plus a real integral over
//!   the negative axis, evaluated by adaptive quadrature.
//!
//! The purely algebraic asymptotic series drops the pole contributions, which
//! for α near 2 are oscillatory and decay only like `exp(x^(1/α) cos(π/α))`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{cos_pi, rgamma, sin_pi};
use super::SpecFunError;
use crate::quad::{integrate, QuadOptions};

/// Series radius. Beyond it (on the negative axis) the branch-cut
/// representation takes over.
pub const SERIES_RADIUS: f64 = 5.0;

/// Largest positive argument accepted by [`mittag_leffler`].
pub const DEFAULT_POSITIVE_CAP: f64 = 50.0;

/// Parameters (α, β) of E_{α,β}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, SpecFunError> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(SpecFunError::InvalidArgument {
                name: "alpha",
                value: alpha,
                expected: "0 < alpha <= 2",
            });
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(SpecFunError::InvalidArgument {
                name: "beta",
                value: beta,
                expected: "beta > 0",
            });
        }
        Ok(Self { alpha, beta })
    }
}

/// E_{α,β}(z) with the default positive cap.
pub fn mittag_leffler(p: MLParams, z: f64) -> Result<f64, SpecFunError> {
    mittag_leffler_capped(p, z, DEFAULT_POSITIVE_CAP)
}

/// E_{α,β}(z), rejecting `z > cap`.
pub fn mittag_leffler_capped(p: MLParams, z: f64, cap: f64) -> Result<f64, SpecFunError> {
    let MLParams { alpha, beta } = p;
    if !z.is_finite() {
        return Err(SpecFunError::InvalidArgument {
            name: "z",
            value: z,
            expected: "a finite real number",
        });
    }
    if z > cap {
        return Err(SpecFunError::Overflow { z, cap });
    }
    if z >= -SERIES_RADIUS {
        return Ok(series(alpha, beta, z));
    }
    if alpha == 1.0 {
        return exponential_case(beta, z);
    }
    Ok(negative_axis(alpha, beta, -z))
}

/// Plain power series with compensated summation.
pub(crate) fn series(alpha: f64, beta: f64, z: f64) -> f64 {
    if z == 0.0 {
        return rgamma(beta);
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut power = 1.0;
    let mut quiet = 0;
    let mut k = 0usize;
    loop {
        let term = power * rgamma(alpha * k as f64 + beta);
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() <= 1e-17 * (sum + comp).abs() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        k += 1;
        power *= z;
        if k > 2000 || !power.is_finite() {
            break;
        }
    }
    sum + comp
}

fn exponential_case(beta: f64, z: f64) -> Result<f64, SpecFunError> {
    if beta == 1.0 {
        Ok(z.exp())
    } else if beta == 2.0 {
        Ok(z.exp_m1() / z)
    } else {
        Err(SpecFunError::Unsupported(
            "alpha = 1 with beta outside {1, 2} on the far negative axis",
        ))
    }
}

/// E_{α,β}(-x) for x > SERIES_RADIUS.
fn negative_axis(alpha: f64, beta: f64, x: f64) -> f64 {
    // Keep q = α - β + 1 ≥ 1/2 so the branch integral has a mild endpoint:
    // E_{α,β}(z) = (E_{α,β-α}(z) - 1/Γ(β-α)) / z.
    if beta > alpha + 0.5 {
        let lower = negative_axis(alpha, beta - alpha, x);
        return (lower - rgamma(beta - alpha)) / (-x);
    }
    pole_part(alpha, beta, x) + branch_part(alpha, beta, x)
}

/// (2/α) Re[s^(1-β) e^s] at s = x^(1/α) e^(iπ/α); zero for α ≤ 1.
fn pole_part(alpha: f64, beta: f64, x: f64) -> f64 {
    if alpha <= 1.0 {
        return 0.0;
    }
    let s = Complex64::from_polar(x.powf(1.0 / alpha), PI / alpha);
    let value = s.powf(1.0 - beta) * s.exp();
    2.0 / alpha * value.re
}

/// (1/π) ∫_0^∞ e^{-r} r^{α-β} [r^α sin πβ − x sin π(α−β)] / (r^{2α} + 2x r^α cos πα + x²) dr,
/// integrated in u = r^q, q = α − β + 1.
fn branch_part(alpha: f64, beta: f64, x: f64) -> f64 {
    let sb = sin_pi(beta);
    let sab = sin_pi(alpha - beta);
    if sb == 0.0 && sab == 0.0 {
        return 0.0;
    }
    let ca = cos_pi(alpha);
    let q = alpha - beta + 1.0;
    let r_max: f64 = 50.0;
    let u_max = r_max.powf(q);
    let integrand = |u: f64| {
        if u == 0.0 {
            return -sab / x;
        }
        let r = u.powf(1.0 / q);
        let ra = r.powf(alpha);
        let num = ra * sb - x * sab;
        let den = ra * ra + 2.0 * x * ra * ca + x * x;
        (-r).exp() * num / den
    };
    // near-resonance of the denominator when cos πα < 0
    let mut breaks = vec![1.0f64.min(u_max)];
    if ca < 0.0 {
        let r_peak = (-x * ca).powf(1.0 / alpha);
        if r_peak < r_max {
            let half_width = (x * sin_pi(alpha).abs()).powf(1.0 / alpha);
            for r in [r_peak - half_width, r_peak, r_peak + half_width] {
                if r > 0.0 && r < r_max {
                    breaks.push(r.powf(q));
                }
            }
        }
    }
    let opts = QuadOptions {
        abs_tol: 1e-17,
        rel_tol: 1e-14,
        max_intervals: 4000,
    };
    let res = integrate(integrand, 0.0, u_max, &breaks, opts);
    res.value / (PI * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ml(a: f64, b: f64, z: f64) -> f64 {
        mittag_leffler(MLParams::new(a, b).unwrap(), z).unwrap()
    }

    #[test]
    fn exponential_and_cosine() {
        assert_relative_eq!(ml(1.0, 1.0, 1.0), std::f64::consts::E, max_relative = 1e-14);
        let t = PI / 2.0;
        assert!(ml(2.0, 1.0, -t * t).abs() < 1e-10);
    }

    #[test]
    fn classical_closed_forms_far_out() {
        for x in [6.0, 40.0, 900.0, 1e4] {
            let s = f64::sqrt(x);
            assert_relative_eq!(ml(2.0, 1.0, -x), s.cos(), epsilon = 1e-13);
            assert_relative_eq!(ml(2.0, 2.0, -x), s.sin() / s, epsilon = 1e-13);
            assert_relative_eq!(ml(1.0, 1.0, -x), (-x).exp(), epsilon = 1e-300);
        }
    }

    #[test]
    fn branches_agree_at_the_seam() {
        for alpha in [1.1, 1.3, 1.5, 1.7, 1.9, 1.99] {
            for beta in [1.0, 2.0, alpha, 0.5, 3.1] {
                let s = series(alpha, beta, -5.0 - 1e-9);
                let b = negative_axis(alpha, beta, 5.0 + 1e-9);
                assert_relative_eq!(s, b, max_relative = 1e-11, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn overflow_cap() {
        let p = MLParams::new(1.5, 1.0).unwrap();
        assert!(matches!(
            mittag_leffler(p, 60.0),
            Err(SpecFunError::Overflow { .. })
        ));
        assert!(mittag_leffler_capped(p, 60.0, 100.0).is_ok());
    }

    #[test]
    fn parameter_validation() {
        assert!(MLParams::new(0.0, 1.0).is_err());
        assert!(MLParams::new(2.5, 1.0).is_err());
        assert!(MLParams::new(1.5, 0.0).is_err());
    }
}
