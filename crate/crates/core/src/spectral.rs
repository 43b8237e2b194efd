//! The Dirichlet Laplacian on (0, π) in its eigenbasis.
//!
//! Eigenpairs are λ_n = −n² and e_n(x) = √(2/π) sin(nx), n = 1..N. A
//! [`SpectralField`] holds the coefficients c_n = (u, e_n); a
//! [`NodalField`] holds samples at the interior points x_j = jπ/(M+1).

use std::f64::consts::{FRAC_2_PI, PI};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::fracalc::GridValue;
use crate::specfun::sin_pi;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("{n_modes} modes need at least as many collocation points, got {points}")]
    TooFewPoints { n_modes: usize, points: usize },
    #[error("mu = {mu} is the negated eigenvalue of mode {mode}")]
    EigenvalueHit { mu: f64, mode: usize },
    #[error("invalid {name} = {value}: expected {expected}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("quadrature reached relative error {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },
}

/// A = Δ with Dirichlet conditions, truncated to N modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpectralOperator {
    n_modes: usize,
}

impl SpectralOperator {
    pub fn new(n_modes: usize) -> Result<Self, SpectralError> {
        if n_modes == 0 {
            return Err(SpectralError::InvalidArgument {
                name: "n_modes",
                value: 0.0,
                expected: "at least one mode",
            });
        }
        Ok(Self { n_modes })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// λ_n = −n² for n = 1..N.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        -((n * n) as f64)
    }

    pub fn eigenvalues(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n_modes).map(|n| self.eigenvalue(n))
    }

    pub fn zero_field(&self) -> SpectralField {
        SpectralField::zeros(self.n_modes)
    }

    /// Unit coefficient on mode `n` (1-based).
    pub fn unit(&self, n: usize) -> SpectralField {
        let mut f = self.zero_field();
        f.coeffs[n - 1] = 1.0;
        f
    }

    fn check(&self, u: &SpectralField) -> Result<(), SpectralError> {
        if u.len() != self.n_modes {
            return Err(SpectralError::SizeMismatch {
                expected: self.n_modes,
                got: u.len(),
            });
        }
        Ok(())
    }

    /// Multiplies mode n by `symbol(n)`.
    pub fn apply_symbol(
        &self,
        u: &SpectralField,
        mut symbol: impl FnMut(usize) -> f64,
    ) -> Result<SpectralField, SpectralError> {
        self.check(u)?;
        let coeffs = DVector::from_iterator(
            self.n_modes,
            u.coeffs.iter().enumerate().map(|(i, c)| symbol(i + 1) * c),
        );
        Ok(SpectralField { coeffs })
    }

    /// Dense N×N matrix of A (diagonal).
    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(self.n_modes, self.eigenvalues()))
    }
}

/// Coefficients in the orthonormal sine basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub coeffs: DVector<f64>,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: DVector::zeros(n),
        }
    }

    pub fn from_vec(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs: DVector::from_vec(coeffs),
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// L² norm (Parseval).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// ‖(−A)^β u‖ = ‖(n^{2β} c_n)‖.
    pub fn beta_norm(&self, beta: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let w = ((i + 1) as f64).powf(2.0 * beta) * c;
                w * w
            })
            .sum::<f64>()
            .sqrt()
    }
}

impl GridValue for SpectralField {
    fn zero_like(&self) -> Self {
        Self::zeros(self.len())
    }
    fn add_scaled(&mut self, a: f64, x: &Self) {
        self.coeffs.axpy(a, &x.coeffs, 1.0);
    }
    fn norm(&self) -> f64 {
        self.l2_norm()
    }
}

/// Samples at x_j = jπ/(M+1), j = 1..M; the boundary zeros are implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct NodalField {
    pub samples: Vec<f64>,
}

impl NodalField {
    pub fn sample(m: usize, f: impl FnMut(f64) -> f64) -> Self {
        Self {
            samples: collocation_points(m).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

pub fn collocation_points(m: usize) -> impl Iterator<Item = f64> {
    let h = PI / (m + 1) as f64;
    (1..=m).map(move |j| j as f64 * h)
}

/// Cached table √(2/π) sin(n x_j) for a fixed (N, M).
#[derive(Clone, Debug)]
pub struct SineBasis {
    n_modes: usize,
    points: usize,
    // row n-1, column j-1
    table: DMatrix<f64>,
}

impl SineBasis {
    pub fn new(n_modes: usize, points: usize) -> Result<Self, SpectralError> {
        if n_modes == 0 || points < n_modes {
            return Err(SpectralError::TooFewPoints { n_modes, points });
        }
        let norm = FRAC_2_PI.sqrt();
        let denom = (points + 1) as f64;
        // sin(π·nj/(M+1)) with the integer product reduced exactly
        let table = DMatrix::from_fn(n_modes, points, |r, c| {
            let k = ((r + 1) * (c + 1)) % (2 * (points + 1));
            norm * sin_pi(k as f64 / denom)
        });
        Ok(Self {
            n_modes,
            points,
            table,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// c_n = (π/(M+1)) Σ_j f(x_j) e_n(x_j).
    pub fn forward(&self, f: &NodalField) -> Result<SpectralField, SpectralError> {
        if f.len() != self.points {
            return Err(SpectralError::SizeMismatch {
                expected: self.points,
                got: f.len(),
            });
        }
        let h = PI / (self.points + 1) as f64;
        let samples = DVector::from_column_slice(&f.samples);
        Ok(SpectralField {
            coeffs: (&self.table * samples) * h,
        })
    }

    /// f(x_j) = Σ_n c_n e_n(x_j).
    pub fn inverse(&self, c: &SpectralField) -> Result<NodalField, SpectralError> {
        if c.len() != self.n_modes {
            return Err(SpectralError::SizeMismatch {
                expected: self.n_modes,
                got: c.len(),
            });
        }
        let v = self.table.tr_mul(&c.coeffs);
        Ok(NodalField {
            samples: v.iter().copied().collect(),
        })
    }
}

pub fn sine_forward(f: &NodalField, n_modes: usize) -> Result<SpectralField, SpectralError> {
    SineBasis::new(n_modes, f.len())?.forward(f)
}

pub fn sine_inverse(c: &SpectralField, points: usize) -> Result<NodalField, SpectralError> {
    SineBasis::new(c.len(), points)?.inverse(c)
}

/// c_n ↦ −n² c_n.
pub fn apply_operator(
    a: &SpectralOperator,
    u: &SpectralField,
) -> Result<SpectralField, SpectralError> {
    a.apply_symbol(u, |n| a.eigenvalue(n))
}

/// (−A)^β: c_n ↦ n^{2β} c_n, any real β.
pub fn apply_fractional_power(
    a: &SpectralOperator,
    beta: f64,
    u: &SpectralField,
) -> Result<SpectralField, SpectralError> {
    a.apply_symbol(u, |n| (n as f64).powf(2.0 * beta))
}

/// (μ − A)^{-1}: c_n ↦ c_n/(μ + n²).
pub fn apply_resolvent(
    a: &SpectralOperator,
    mu: f64,
    u: &SpectralField,
) -> Result<SpectralField, SpectralError> {
    if let Some(mode) = (1..=a.n_modes()).find(|&n| mu + (n * n) as f64 == 0.0) {
        return Err(SpectralError::EigenvalueHit { mu, mode });
    }
    a.apply_symbol(u, |n| 1.0 / (mu + (n * n) as f64))
}

/// Requested relative accuracy of [`fractional_power_via_integral`].
pub const BALAKRISHNAN_TOL: f64 = 1e-10;

/// (−A)^{-β} from (sin πβ/π) ∫_0^∞ τ^{-β} (τ − A)^{-1} dτ, 0 < β < 1.
///
/// With τ = e^y the integrand e^{(1−β)y}/(e^y + n²) is analytic in a strip
/// and decays exponentially both ways, so the truncated trapezoid rule
/// converges geometrically. The tails are bounded by
/// e^{(1−β)a}/((1−β)n²) on (−∞, a) and e^{−βb}/β on (b, ∞).
pub fn fractional_power_via_integral(
    a: &SpectralOperator,
    beta: f64,
    u: &SpectralField,
) -> Result<SpectralField, SpectralError> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(SpectralError::InvalidArgument {
            name: "beta",
            value: beta,
            expected: "0 < beta < 1",
        });
    }
    a.check(u)?;
    let prefactor = sin_pi(beta) / PI;
    let mut symbols = Vec::with_capacity(a.n_modes());
    let mut worst: f64 = 0.0;
    for n in 1..=a.n_modes() {
        let (value, err) = balakrishnan_mode(beta, (n * n) as f64);
        worst = worst.max(err / value);
        symbols.push(prefactor * value);
    }
    if worst > BALAKRISHNAN_TOL {
        return Err(SpectralError::QuadratureNonConvergence {
            achieved: worst,
            requested: BALAKRISHNAN_TOL,
        });
    }
    a.apply_symbol(u, |n| symbols[n - 1])
}

/// ∫ e^{(1−β)y}/(e^y + μ) dy over ℝ with an error estimate.
fn balakrishnan_mode(beta: f64, mu: f64) -> (f64, f64) {
    let target = 1e-3 * BALAKRISHNAN_TOL;
    // scale of the integral is about μ^{-β}
    let scale = mu.powf(-beta);
    let lo = ((target * scale * (1.0 - beta) * mu).ln()) / (1.0 - beta);
    let hi = -(target * scale * beta).ln() / beta;
    let tails = ((1.0 - beta) * lo).exp() / ((1.0 - beta) * mu) + (-beta * hi).exp() / beta;
    let f = |y: f64| ((1.0 - beta) * y).exp() / (y.exp() + mu);
    let trap = |h: f64| {
        let n = ((hi - lo) / h).ceil() as usize;
        let h = (hi - lo) / n as f64;
        let inner: f64 = (1..n).map(|i| f(lo + i as f64 * h)).sum();
        h * (inner + 0.5 * (f(lo) + f(hi)))
    };
    let coarse = trap(0.2);
    let fine = trap(0.1);
    (fine, (fine - coarse).abs() + tails)
}
