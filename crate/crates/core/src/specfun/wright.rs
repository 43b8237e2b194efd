//! Wright function φ_γ(z) = Σ_n (-z)^n / (n! Γ(1 - γ - γn)) on z ≥ 0, 0 < γ < 1,
//! and the subordination density t^(-γ) φ_γ(s t^(-γ)).
//!
//! The series is summed while it is well conditioned (z ≤ 1/γ). Beyond
//! that the alternating terms grow like exp((1-γ) z^(1/(1-γ))) and the
//! Hankel representation
//!
//!   φ_γ(z) = (1/2πi) ∫_Ha exp(σ - z σ^γ) σ^(γ-1) dσ
//!
//! is integrated along the parabola σ = a (1 + iu)², which crosses the real
//! axis vertically at the saddle point a = (zγ)^(1/(1-γ)).

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::rgamma;
use super::SpecFunError;
use crate::quad::{integrate, QuadOptions};

/// Order γ of the Wright function φ_γ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrightParams {
    pub gamma: f64,
}

impl WrightParams {
    pub fn new(gamma: f64) -> Result<Self, SpecFunError> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(SpecFunError::InvalidArgument {
                name: "gamma",
                value: gamma,
                expected: "0 < gamma < 1",
            });
        }
        Ok(Self { gamma })
    }
}

/// Successive series terms (-z)^n / (n! Γ(1 - γ - γn)), n = 0, 1, ...
pub fn wright_phi_terms(p: WrightParams, z: f64) -> impl Iterator<Item = f64> {
    let g = p.gamma;
    let mut power = 1.0;
    (0usize..).map(move |n| {
        if n > 0 {
            power *= -z / n as f64;
        }
        power * rgamma(1.0 - g - g * n as f64)
    })
}

/// φ_γ(z) for z ≥ 0.
pub fn wright_phi(p: WrightParams, z: f64) -> Result<f64, SpecFunError> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(SpecFunError::InvalidArgument {
            name: "z",
            value: z,
            expected: "z >= 0",
        });
    }
    if z * p.gamma <= 1.0 {
        Ok(series(p, z))
    } else {
        Ok(hankel(p, z))
    }
}

fn series(p: WrightParams, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut quiet = 0;
    for (n, term) in wright_phi_terms(p, z).enumerate() {
        sum += term;
        if term.abs() < 1e-16 * sum.abs() {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if n > 400 {
            break;
        }
    }
    sum
}

pub(crate) fn hankel(p: WrightParams, z: f64) -> f64 {
    let g = p.gamma;
    let a = (z * g).powf(1.0 / (1.0 - g));
    let integrand = |u: f64| -> Complex64 {
        let w = Complex64::new(1.0, u);
        let sigma = a * w * w;
        let exponent = sigma - z * sigma.powf(g);
        exponent.exp() * sigma.powf(g - 1.0) * w
    };
    let peak = integrand(0.0).norm();
    let mut upper = 1.0 / a.sqrt();
    while integrand(upper).norm() > 1e-22 * peak && upper < 1e6 {
        upper *= 1.5;
    }
    upper *= 1.5;
    let opts = QuadOptions {
        abs_tol: 1e-22 * peak,
        rel_tol: 1e-13,
        max_intervals: 2000,
    };
    let res = integrate(|u| integrand(u).re, 0.0, upper, &[], opts);
    2.0 * a / PI * res.value
}

/// φ_{t,γ}(s) = t^(-γ) φ_γ(s t^(-γ)); clamped at zero against rounding noise.
pub fn subordination_density(gamma: f64, t: f64, s: f64) -> Result<f64, SpecFunError> {
    let p = WrightParams::new(gamma)?;
    if !(t > 0.0) {
        return Err(SpecFunError::InvalidArgument {
            name: "t",
            value: t,
            expected: "t > 0",
        });
    }
    let scale = t.powf(-gamma);
    Ok((scale * wright_phi(p, s * scale)?).max(0.0))
}

/// Point beyond which φ_γ is below ~e^-45 of its peak, from the saddle
/// exponent Y(z) = (1-γ) γ^(γ/(1-γ)) z^(1/(1-γ)).
pub fn wright_tail_cutoff(gamma: f64) -> f64 {
    let b = (1.0 - gamma) * gamma.powf(gamma / (1.0 - gamma));
    (45.0 / b).powf(1.0 - gamma).max(2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn phi(g: f64, z: f64) -> f64 {
        wright_phi(WrightParams::new(g).unwrap(), z).unwrap()
    }

    #[test]
    fn value_at_origin() {
        assert_relative_eq!(phi(0.5, 0.0), 0.5641895835477563, max_relative = 1e-15);
    }

    #[test]
    fn half_order_is_gaussian() {
        let closed = |z: f64| (-z * z / 4.0).exp() / PI.sqrt();
        assert_relative_eq!(phi(0.5, 1.0), 0.439391289467722, max_relative = 1e-13);
        for i in 0..=60 {
            let z = 0.1 * i as f64;
            assert_relative_eq!(phi(0.5, z), closed(z), max_relative = 1e-9);
        }
    }

    #[test]
    fn series_and_contour_overlap() {
        for g in [0.3, 0.5, 0.6, 0.75, 0.9, 0.95] {
            for z in [0.6, 0.9, 1.0 / g] {
                let s = series(WrightParams { gamma: g }, z);
                let h = hankel(WrightParams { gamma: g }, z);
                assert_relative_eq!(s, h, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn term_ratio_recurrence() {
        // t_{n+1}/t_n = -z/(n+1) · Γ(1-γ-γn)/Γ(1-γ-γ(n+1)), checked where neither side hits a pole
        use crate::specfun::gamma::gamma_fn;
        let (g, z) = (0.7, 1.3);
        let terms: Vec<f64> = wright_phi_terms(WrightParams { gamma: g }, z)
            .take(30)
            .collect();
        for n in 0..29 {
            let a = 1.0 - g - g * n as f64;
            let b = a - g;
            let (Ok(ga), Ok(gb)) = (gamma_fn(a), gamma_fn(b)) else {
                continue;
            };
            let ratio = -z / (n + 1) as f64 * ga / gb;
            assert_relative_eq!(terms[n + 1], terms[n] * ratio, max_relative = 1e-12);
        }
    }

    #[test]
    fn density_examples() {
        assert_relative_eq!(
            subordination_density(0.5, 1.0, 0.0).unwrap(),
            0.5641895835477563,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            subordination_density(0.5, 4.0, 0.0).unwrap(),
            0.2820947917738781,
            max_relative = 1e-15
        );
        assert!(subordination_density(0.5, 0.0, 1.0).is_err());
        assert!(wright_phi(WrightParams { gamma: 0.5 }, -1.0).is_err());
        assert!(WrightParams::new(1.0).is_err());
    }
}
