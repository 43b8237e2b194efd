//! Euler Gamma, its reciprocal and logarithm, and the kernel `g_α`.

use std::f64::consts::PI;

use super::SpecFunError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

/// cos(πx) with exact zeros at the half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

// Lanczos sum for x >= 0.5, returns (t, series) with Γ(x) = √(2π) t^(x-1/2) e^-t series.
fn lanczos(x: f64) -> (f64, f64) {
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    (z + LANCZOS_G + 0.5, series)
}

/// Euler Gamma function. Reflection is used below 1/2.
pub fn gamma_fn(x: f64) -> Result<f64, SpecFunError> {
    if !x.is_finite() {
        return Err(SpecFunError::InvalidArgument {
            name: "x",
            value: x,
            expected: "a finite real number",
        });
    }
    if is_nonpositive_integer(x) {
        return Err(SpecFunError::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x == x.floor() && (1.0..=171.0).contains(&x) {
        // exact factorials
        return (1..x as u32).map(f64::from).product();
    }
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    let (t, series) = lanczos(x);
    // split the power so t^(x-1/2) does not overflow before e^-t compensates
    let half = t.powf(0.5 * (x - 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * series
}

/// 1/Γ(x), defined to be exactly zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1-x) / π
        return sin_pi(x) * gamma_unchecked(1.0 - x) / PI;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma_unchecked(x)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return (PI / sin_pi(x)).ln() - ln_gamma(1.0 - x);
    }
    let (t, series) = lanczos(x);
    HALF_LN_2PI + (x - 0.5) * t.ln() - t + series.ln()
}

/// g_α(t) = t^(α-1) / Γ(α).
pub fn g_kernel(alpha: f64, t: f64) -> Result<f64, SpecFunError> {
    if !(alpha > 0.0) {
        return Err(SpecFunError::InvalidArgument {
            name: "alpha",
            value: alpha,
            expected: "alpha > 0 (g_0 is the delta distribution)",
        });
    }
    if !(t > 0.0) {
        if t == 0.0 && alpha >= 1.0 {
            return Ok(if alpha == 1.0 { 1.0 } else { 0.0 });
        }
        return Err(SpecFunError::InvalidArgument {
            name: "t",
            value: t,
            expected: "t > 0",
        });
    }
    Ok(t.powf(alpha - 1.0) * rgamma(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_relative_eq!(
            gamma_fn(0.5).unwrap(),
            1.772453850905516,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            gamma_fn(-0.5).unwrap(),
            -3.544907701811032,
            max_relative = 1e-14
        );
        assert_relative_eq!(gamma_fn(5.0).unwrap(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(
            gamma_fn(21.0).unwrap(),
            2.43290200817664e18,
            max_relative = 1e-13
        );
    }

    #[test]
    fn gamma_poles_are_errors() {
        for x in [0.0, -1.0, -7.0] {
            assert!(matches!(gamma_fn(x), Err(SpecFunError::Pole(_))));
            assert_eq!(rgamma(x), 0.0);
        }
    }

    #[test]
    fn gamma_near_fifty() {
        // Γ(50) = 49!
        let fact49: f64 = (1..50).map(f64::from).product();
        assert_relative_eq!(gamma_fn(50.0).unwrap(), fact49, max_relative = 1e-12);
        assert_relative_eq!(
            gamma_fn(-49.5).unwrap() * gamma_fn(50.5).unwrap(),
            PI / sin_pi(-49.5),
            max_relative = 1e-12
        );
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for x in [0.1, 0.7, 3.3, 17.5, 120.0] {
            let direct = gamma_fn(x).unwrap().ln();
            assert_relative_eq!(ln_gamma(x), direct, max_relative = 1e-13, epsilon = 1e-14);
        }
    }

    #[test]
    fn sin_pi_exact_zeros() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-2.0), 0.0);
        assert_relative_eq!(sin_pi(0.5), 1.0);
        assert_relative_eq!(sin_pi(-1.5), 1.0);
        assert_relative_eq!(sin_pi(1.25), -(0.25 * PI).sin(), max_relative = 1e-15);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(g_kernel(1.0, 0.7).unwrap(), 1.0);
        assert_relative_eq!(g_kernel(2.0, 0.3).unwrap(), 0.3, max_relative = 1e-15);
        assert_relative_eq!(
            g_kernel(1.5, 1.0).unwrap(),
            std::f64::consts::FRAC_2_SQRT_PI,
            max_relative = 1e-14
        );
        assert!(g_kernel(0.0, 1.0).is_err());
        assert!(g_kernel(0.5, 0.0).is_err());
        assert!(g_kernel(0.5, -1.0).is_err());
    }
}
