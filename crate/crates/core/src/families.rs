//! Fractional cosine, sine and Riemann–Liouville families.
//!
//! For a scalar generator λ the three families have the symbols
//!
//! ```text
//! C_α(t) = E_{α,1}(λ t^α)
//! S_α(t) = t E_{α,2}(λ t^α)
//! P_α(t) = t^{α−1} E_{α,α}(λ t^α)
//! ```
//!
//! Spectral operators act diagonally through these symbols; small dense
//! matrices use the matrix power series. [`brute_force_volterra`] solves the
//! defining Volterra equation without any Mittag-Leffler function and is the
//! oracle both paths are checked against.

use std::f64::consts::E;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::fracalc::{
    cumulative_trapezoid, numeric_laplace, rl_integral, weakly_singular_convolution, FracCalcError,
    GridFunction, ProductWeights, TimeGrid,
};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::{
    mittag_leffler, rgamma, subordination_density, wright_tail_cutoff, MLParams, SpecFunError,
};
use crate::spectral::{SpectralError, SpectralField, SpectralOperator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    FracCalc(#[from] FracCalcError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid {name} = {value}: expected {expected}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("matrix series unreliable: ‖A‖ t^α = {scale} exceeds {cap}")]
    SeriesDivergence { scale: f64, cap: f64 },
    #[error("quadrature reached error {achieved:e}, requested {requested:e}")]
    QuadratureNonConvergence { achieved: f64, requested: f64 },
    #[error("time {0} is not a grid node")]
    NotOnGrid(f64),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Cosine,
    Sine,
    RiemannLiouville,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [Self::Cosine, Self::Sine, Self::RiemannLiouville];

    /// Second Mittag-Leffler parameter of the symbol.
    pub fn ml_beta(self, alpha: f64) -> f64 {
        match self {
            Self::Cosine => 1.0,
            Self::Sine => 2.0,
            Self::RiemannLiouville => alpha,
        }
    }

    /// Power c in the prefactor t^c.
    pub fn time_power(self, alpha: f64) -> f64 {
        match self {
            Self::Cosine => 0.0,
            Self::Sine => 1.0,
            Self::RiemannLiouville => alpha - 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Cosine => "cosine",
            Self::Sine => "sine",
            Self::RiemannLiouville => "riemann_liouville",
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), FamilyError> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(FamilyError::InvalidArgument {
            name: "alpha",
            value: alpha,
            expected: "1 < alpha <= 2",
        })
    }
}

/// Scalar family value for generator λ ≤ 0 at time t ≥ 0.
pub fn family_symbol(
    alpha: f64,
    kind: FamilyKind,
    lambda: f64,
    t: f64,
) -> Result<f64, FamilyError> {
    check_alpha(alpha)?;
    if !(lambda <= 0.0) {
        return Err(FamilyError::InvalidArgument {
            name: "lambda",
            value: lambda,
            expected: "lambda <= 0",
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(FamilyError::InvalidArgument {
            name: "t",
            value: t,
            expected: "t >= 0",
        });
    }
    if t == 0.0 {
        return Ok(match kind {
            FamilyKind::Cosine => 1.0,
            _ => 0.0,
        });
    }
    let ml = regular_symbol(alpha, kind, lambda, t)?;
    Ok(t.powf(kind.time_power(alpha)) * ml)
}

/// E_{α,β}(λ t^α): the symbol without its t^c prefactor.
fn regular_symbol(alpha: f64, kind: FamilyKind, lambda: f64, t: f64) -> Result<f64, FamilyError> {
    let p = MLParams::new(alpha, kind.ml_beta(alpha))?;
    Ok(mittag_leffler(p, lambda * t.powf(alpha))?)
}

/// Symbol table m_{n,i} of one family on a spectral operator and time grid.
#[derive(Clone, Debug)]
pub struct FamilyEvaluation {
    alpha: f64,
    kind: FamilyKind,
    grid: TimeGrid,
    // n_modes × nodes
    table: DMatrix<f64>,
    // E_{α,β}(λ_n t_i^α) without the t^c prefactor
    regular: DMatrix<f64>,
}

impl FamilyEvaluation {
    pub fn new(
        alpha: f64,
        kind: FamilyKind,
        op: &SpectralOperator,
        grid: &TimeGrid,
    ) -> Result<Self, FamilyError> {
        check_alpha(alpha)?;
        let n = op.n_modes();
        let mut table = DMatrix::zeros(n, grid.len());
        let mut regular = DMatrix::zeros(n, grid.len());
        let beta = kind.ml_beta(alpha);
        let power = kind.time_power(alpha);
        for mode in 1..=n {
            let lambda = op.eigenvalue(mode);
            for (i, t) in grid.nodes().enumerate() {
                if t == 0.0 {
                    regular[(mode - 1, i)] = rgamma(beta);
                    table[(mode - 1, i)] = family_symbol(alpha, kind, lambda, t)?;
                } else {
                    let r = regular_symbol(alpha, kind, lambda, t)?;
                    regular[(mode - 1, i)] = r;
                    table[(mode - 1, i)] = t.powf(power) * r;
                }
            }
        }
        Ok(Self {
            alpha,
            kind,
            grid: *grid,
            table,
            regular,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn n_modes(&self) -> usize {
        self.table.nrows()
    }

    /// m_{n,i}, mode n is 1-based.
    pub fn symbol(&self, mode: usize, i: usize) -> f64 {
        self.table[(mode - 1, i)]
    }

    /// The Mittag-Leffler factor of m_{n,i} alone.
    pub fn regular(&self, mode: usize, i: usize) -> f64 {
        self.regular[(mode - 1, i)]
    }
}

/// c_n ↦ m_{n,i} c_n.
pub fn apply_family(
    f: &FamilyEvaluation,
    t_index: usize,
    u: &SpectralField,
) -> Result<SpectralField, FamilyError> {
    if t_index >= f.grid.len() {
        return Err(FamilyError::InvalidArgument {
            name: "t_index",
            value: t_index as f64,
            expected: "an index within the grid",
        });
    }
    if u.len() != f.n_modes() {
        return Err(SpectralError::SizeMismatch {
            expected: f.n_modes(),
            got: u.len(),
        }
        .into());
    }
    let coeffs = DVector::from_iterator(
        u.len(),
        u.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| f.table[(k, t_index)] * c),
    );
    Ok(SpectralField { coeffs })
}

/// ∫_0^t P_α(t − s) g(s) ds at every node, by product integration against
/// the t^{α−1} factor of the Riemann–Liouville symbol.
pub fn rl_family_convolution(
    p: &FamilyEvaluation,
    g: &GridFunction<SpectralField>,
) -> Result<GridFunction<SpectralField>, FamilyError> {
    if p.kind != FamilyKind::RiemannLiouville {
        return Err(FamilyError::Dimension(
            "convolution needs the Riemann–Liouville family".into(),
        ));
    }
    if g.grid() != p.grid {
        return Err(FracCalcError::GridMismatch.into());
    }
    let values = g.values();
    let n = p.n_modes();
    Ok(weakly_singular_convolution(p.alpha, &p.grid, |lag, j| {
        let coeffs = DVector::from_iterator(
            n,
            values[j]
                .coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| p.regular[(k, lag)] * c),
        );
        SpectralField { coeffs }
    })?)
}

/// Solves x(t) = rhs(t) + λ J^α x(t) by product-integration time stepping.
pub fn solve_scalar_volterra(
    alpha: f64,
    lambda: f64,
    rhs: &GridFunction<f64>,
) -> Result<GridFunction<f64>, FamilyError> {
    let grid = rhs.grid();
    let w = ProductWeights::new(alpha, &grid)?;
    let c = w.scale();
    let mut x = Vec::with_capacity(grid.len());
    x.push(rhs.values()[0]);
    for n in 1..grid.len() {
        let history: f64 = (0..n).map(|j| w.weight(n, j) * x[j]).sum();
        x.push((rhs.values()[n] + lambda * c * history) / (1.0 - lambda * c));
    }
    Ok(GridFunction::new(grid, x)?)
}

/// Scalar solution operator from x = 1 + λ J^α x, with no Mittag-Leffler
/// evaluation anywhere.
pub fn brute_force_volterra(
    alpha: f64,
    lambda: f64,
    grid: &TimeGrid,
) -> Result<GridFunction<f64>, FamilyError> {
    solve_scalar_volterra(alpha, lambda, &GridFunction::sample(*grid, |_| 1.0))
}

/// Matrix analogue: X = I + A J^α X.
pub fn brute_force_volterra_matrix(
    alpha: f64,
    a: &DenseOperator,
    grid: &TimeGrid,
) -> Result<GridFunction<DMatrix<f64>>, FamilyError> {
    let w = ProductWeights::new(alpha, grid)?;
    let c = w.scale();
    let d = a.dim();
    let id = DMatrix::<f64>::identity(d, d);
    let lu = (&id - &a.matrix * c).lu();
    let mut x: Vec<DMatrix<f64>> = Vec::with_capacity(grid.len());
    x.push(id.clone());
    for n in 1..grid.len() {
        let mut history = DMatrix::zeros(d, d);
        for (j, xj) in x.iter().enumerate() {
            history += xj * w.weight(n, j);
        }
        let rhs = &id + &a.matrix * history * c;
        x.push(
            lu.solve(&rhs)
                .ok_or_else(|| FamilyError::Dimension("I − cA is singular".into()))?,
        );
    }
    Ok(GridFunction::new(*grid, x)?)
}

/// C_α(t) u through subordination to the classical cosine family:
/// c_n ↦ c_n ∫_0^∞ φ_{t,α/2}(s) cos(ns) ds.
///
/// The integral is truncated where φ_{α/2} falls below e^{−45} of its peak;
/// `tol` bounds the absolute quadrature error per mode.
pub fn apply_family_subordinated(
    alpha: f64,
    t: f64,
    u: &SpectralField,
    tol: f64,
) -> Result<SpectralField, FamilyError> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(FamilyError::InvalidArgument {
            name: "alpha",
            value: alpha,
            expected: "1 < alpha < 2",
        });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(FamilyError::InvalidArgument {
            name: "t",
            value: t,
            expected: "t > 0",
        });
    }
    let gamma = alpha / 2.0;
    let s_max = t.powf(gamma) * wright_tail_cutoff(gamma);
    let mut coeffs = u.coeffs.clone();
    for (k, c) in coeffs.iter_mut().enumerate() {
        let n = (k + 1) as f64;
        let mut failure = None;
        let res = integrate(
            |s| match subordination_density(gamma, t, s) {
                Ok(d) => d * (n * s).cos(),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            },
            0.0,
            s_max,
            &[],
            QuadOptions {
                abs_tol: 0.1 * tol,
                rel_tol: 0.0,
                max_intervals: 4000,
            },
        );
        if let Some(e) = failure {
            return Err(e.into());
        }
        if !res.converged || res.error > tol {
            return Err(FamilyError::QuadratureNonConvergence {
                achieved: res.error,
                requested: tol,
            });
        }
        *c *= res.value;
    }
    Ok(SpectralField { coeffs })
}

/// Small dense generator, d ≤ 8.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    pub matrix: DMatrix<f64>,
}

pub const MAX_DENSE_DIM: usize = 8;

/// Largest ‖A‖ t^α for which the matrix series is evaluated.
pub const SERIES_SCALE_CAP: f64 = 40.0;

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, FamilyError> {
        if !matrix.is_square() || matrix.nrows() == 0 || matrix.nrows() > MAX_DENSE_DIM {
            return Err(FamilyError::Dimension(format!(
                "expected a square matrix of size 1..={MAX_DENSE_DIM}, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(FamilyError::Dimension(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(Self { matrix })
    }

    /// The non-normal 2×2 used by the functional-equation check.
    pub fn default_non_normal() -> Self {
        Self {
            matrix: DMatrix::from_row_slice(2, 2, &[-1.0, 4.0, 0.0, -2.0]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Σ_k A^k t^{αk+c}/Γ(αk+1+c) with c = 0, 1, α−1 for C, S, P.
pub fn matrix_family(
    alpha: f64,
    kind: FamilyKind,
    a: &DenseOperator,
    t: f64,
) -> Result<DMatrix<f64>, FamilyError> {
    let reg = matrix_regular(alpha, kind, a, t)?;
    if t == 0.0 {
        return Ok(match kind {
            FamilyKind::Cosine => reg,
            _ => reg * 0.0,
        });
    }
    Ok(reg * t.powf(kind.time_power(alpha)))
}

/// Σ_k (A t^α)^k / Γ(αk + β): the matrix family without its t^c prefactor.
pub fn matrix_regular(
    alpha: f64,
    kind: FamilyKind,
    a: &DenseOperator,
    t: f64,
) -> Result<DMatrix<f64>, FamilyError> {
    check_alpha(alpha)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(FamilyError::InvalidArgument {
            name: "t",
            value: t,
            expected: "t >= 0",
        });
    }
    let z = &a.matrix * t.powf(alpha);
    let scale = z.norm();
    if scale > SERIES_SCALE_CAP {
        return Err(FamilyError::SeriesDivergence {
            scale,
            cap: SERIES_SCALE_CAP,
        });
    }
    let beta = kind.ml_beta(alpha);
    let d = a.dim();
    let mut power = DMatrix::<f64>::identity(d, d);
    let mut sum = power.scale(rgamma(beta));
    let mut quiet = 0;
    for k in 1..400 {
        power = &power * &z;
        let term = power.scale(rgamma(alpha * k as f64 + beta));
        sum += &term;
        if term.norm() < 1e-16 * sum.norm().max(1.0) {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    Ok(sum)
}

/// One verification row.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Verification report: rows plus an echo of the run parameters.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub env: Vec<(String, String)>,
}

impl Report {
    /// Adds a row that passes when `residual ≤ tolerance`.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, tolerance: f64) {
        self.rows.push(ReportRow {
            name: name.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
        });
    }

    /// Adds a row that passes when `value ≥ threshold` (observed orders and the like).
    pub fn check_at_least(&mut self, name: impl Into<String>, value: f64, threshold: f64) {
        self.rows.push(ReportRow {
            name: name.into(),
            residual: value,
            tolerance: threshold,
            pass: value >= threshold,
        });
    }

    pub fn echo(&mut self, key: impl Into<String>, value: impl ToString) {
        self.env.push((key.into(), value.to_string()));
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
        self.env.extend(other.env);
    }
}

/// Operator whose families are checked.
#[derive(Clone, Copy, Debug)]
pub enum IdentityOperator<'a> {
    Spectral(&'a SpectralOperator),
    Dense(&'a DenseOperator),
}

/// Row tolerances of [`verify_family_identities`].
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityTolerances {
    pub volterra: f64,
    pub sine_integral: f64,
    pub rl_integral: f64,
    pub commutation: f64,
    pub sine_equation: f64,
    pub derivative: f64,
    pub convolution: f64,
    pub laplace: f64,
    pub sine_slope: f64,
    pub exponential_bound: f64,
}

impl Default for IdentityTolerances {
    fn default() -> Self {
        Self {
            volterra: 1e-5,
            sine_integral: 1e-5,
            rl_integral: 1e-5,
            commutation: 1e-12,
            sine_equation: 1e-5,
            derivative: 1e-4,
            convolution: 1e-5,
            laplace: 1e-4,
            sine_slope: 1e-3,
            exponential_bound: 1e-9,
        }
    }
}

impl IdentityTolerances {
    pub fn uniform(tol: f64) -> Self {
        Self {
            volterra: tol,
            sine_integral: tol,
            rl_integral: tol,
            sine_equation: tol,
            derivative: tol,
            convolution: tol,
            laplace: tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub tolerances: IdentityTolerances,
    /// Columns are the test vectors; identity (all basis vectors) when absent.
    pub test_vectors: Option<DMatrix<f64>>,
    /// Long grid for the Laplace rows (spectral operators only).
    pub laplace_grid: Option<TimeGrid>,
    pub laplace_abscissae: Vec<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerances: IdentityTolerances::default(),
            test_vectors: None,
            laplace_grid: None,
            laplace_abscissae: vec![1.0, 2.0, 4.0],
        }
    }
}

/// C, S, P and the regular part of P as matrices per node.
struct FamilyTables {
    a: DMatrix<f64>,
    c: Vec<DMatrix<f64>>,
    s: Vec<DMatrix<f64>>,
    p: Vec<DMatrix<f64>>,
    p_regular: Vec<DMatrix<f64>>,
}

fn family_tables(
    alpha: f64,
    op: IdentityOperator<'_>,
    grid: &TimeGrid,
) -> Result<FamilyTables, FamilyError> {
    match op {
        IdentityOperator::Spectral(a) => {
            let eval = |kind| FamilyEvaluation::new(alpha, kind, a, grid);
            let (c, s, p) = (
                eval(FamilyKind::Cosine)?,
                eval(FamilyKind::Sine)?,
                eval(FamilyKind::RiemannLiouville)?,
            );
            let diag =
                |m: &DMatrix<f64>, i: usize| DMatrix::from_diagonal(&m.column(i).into_owned());
            let n = grid.len();
            Ok(FamilyTables {
                a: a.to_matrix(),
                c: (0..n).map(|i| diag(&c.table, i)).collect(),
                s: (0..n).map(|i| diag(&s.table, i)).collect(),
                p: (0..n).map(|i| diag(&p.table, i)).collect(),
                p_regular: (0..n).map(|i| diag(&p.regular, i)).collect(),
            })
        }
        IdentityOperator::Dense(a) => {
            let table = |kind| -> Result<Vec<DMatrix<f64>>, FamilyError> {
                grid.nodes()
                    .map(|t| matrix_family(alpha, kind, a, t))
                    .collect()
            };
            Ok(FamilyTables {
                a: a.matrix.clone(),
                c: table(FamilyKind::Cosine)?,
                s: table(FamilyKind::Sine)?,
                p: table(FamilyKind::RiemannLiouville)?,
                p_regular: grid
                    .nodes()
                    .map(|t| matrix_regular(alpha, FamilyKind::RiemannLiouville, a, t))
                    .collect::<Result<_, _>>()?,
            })
        }
    }
}

fn max_abs_gap(a: &[DMatrix<f64>], b: &[DMatrix<f64>], range: impl Iterator<Item = usize>) -> f64 {
    range.map(|i| (&a[i] - &b[i]).amax()).fold(0.0, f64::max)
}

/// Residuals of the defining equations and identities of the three families.
///
/// Rows: solution-operator equation, S = ∫C, P = J^{α−1}C, commutation of A
/// with C and S, S(t) = t + J^α S A, C′ = A P (centred differences on
/// t ≥ T/4), the convolution identity for k(t) = (1+t)x, S(h)/h → I and,
/// for spectral operators, the Laplace transforms and the bound |C| ≤ 1.
pub fn verify_family_identities(
    alpha: f64,
    op: IdentityOperator<'_>,
    grid: &TimeGrid,
    options: &VerifyOptions,
) -> Result<Report, FamilyError> {
    check_alpha(alpha)?;
    let tol = &options.tolerances;
    let t = family_tables(alpha, op, grid)?;
    let d = t.a.nrows();
    let x = options
        .test_vectors
        .clone()
        .unwrap_or_else(|| DMatrix::identity(d, d));
    if x.nrows() != d {
        return Err(FamilyError::Dimension(format!(
            "test vectors have {} rows, operator has dimension {d}",
            x.nrows()
        )));
    }
    let n = grid.n_steps();
    let h = grid.step();
    let mut report = Report::default();
    report.echo("alpha", alpha);
    report.echo("horizon", grid.horizon());
    report.echo("n_steps", n);
    report.echo("dimension", d);

    let on =
        |table: &[DMatrix<f64>]| -> Vec<DMatrix<f64>> { table.iter().map(|m| m * &x).collect() };
    let cx = on(&t.c);
    let sx = on(&t.s);
    let px = on(&t.p);
    let gf = |v: Vec<DMatrix<f64>>| GridFunction::new(*grid, v);

    // C(t)x = x + J^α A C x
    let acx = gf(cx.iter().map(|m| &t.a * m).collect())?;
    let j = rl_integral(alpha, &acx)?;
    let rhs: Vec<_> = j.values().iter().map(|m| m + &x).collect();
    report.check(
        "solution_operator",
        max_abs_gap(&cx, &rhs, 0..=n),
        tol.volterra,
    );

    let int_c = cumulative_trapezoid(&gf(cx.clone())?);
    report.check(
        "sine_is_integral_of_cosine",
        max_abs_gap(&sx, int_c.values(), 0..=n),
        tol.sine_integral,
    );

    let j = rl_integral(alpha - 1.0, &gf(cx.clone())?)?;
    report.check(
        "rl_is_fractional_integral_of_cosine",
        max_abs_gap(&px, j.values(), 0..=n),
        tol.rl_integral,
    );

    let comm = |table: &[DMatrix<f64>]| {
        table
            .iter()
            .map(|m| (&t.a * m - m * &t.a).amax())
            .fold(0.0, f64::max)
    };
    report.check("commutation_cosine", comm(&t.c), tol.commutation);
    report.check("commutation_sine", comm(&t.s), tol.commutation);

    // S(t)x = t x + J^α S A x
    let sax = gf(t.s.iter().map(|m| m * &t.a * &x).collect())?;
    let j = rl_integral(alpha, &sax)?;
    let rhs: Vec<_> = j
        .values()
        .iter()
        .enumerate()
        .map(|(i, m)| m + &x * grid.node(i))
        .collect();
    report.check(
        "sine_equation",
        max_abs_gap(&sx, &rhs, 0..=n),
        tol.sine_equation,
    );

    // d/dt C(t)x = A P(t)x away from the t^α corner at the origin
    let start = (n / 4).max(1);
    let deriv = (start..n)
        .map(|i| ((&cx[i + 1] - &cx[i - 1]) / (2.0 * h) - &t.a * &px[i]).amax())
        .fold(0.0, f64::max);
    report.check("cosine_derivative", deriv, tol.derivative);

    // A ∫P(t−s)k(s)ds = ∫C(t−s)k'(s)ds + C(t)k(0) − k(t), k(t) = (1+t)x
    let conv = weakly_singular_convolution(alpha, grid, |lag, j| {
        &t.p_regular[lag] * &x * (1.0 + grid.node(j))
    })?;
    let lhs: Vec<_> = conv.values().iter().map(|m| &t.a * m).collect();
    let rhs: Vec<_> = (0..=n)
        .map(|i| {
            let mut acc = DMatrix::zeros(d, x.ncols());
            for jj in 0..=i {
                let w = if jj == 0 || jj == i { 0.5 * h } else { h };
                if i > 0 {
                    acc += &cx[i - jj] * w;
                }
            }
            acc + &cx[i] - &x * (1.0 + grid.node(i))
        })
        .collect();
    report.check(
        "convolution_identity",
        max_abs_gap(&lhs, &rhs, 0..=n),
        tol.convolution,
    );

    let slope = (&sx[1] / h - &x).amax();
    report.check("sine_slope_at_zero", slope, tol.sine_slope);

    if let IdentityOperator::Spectral(a) = op {
        let bound = t.c.iter().map(|m| m.amax()).fold(0.0, f64::max);
        report.check(
            "cosine_bound_excess",
            (bound - 1.0).max(0.0),
            tol.exponential_bound,
        );
        if let Some(lg) = options.laplace_grid {
            laplace_rows(
                alpha,
                a,
                &lg,
                &x,
                &options.laplace_abscissae,
                tol.laplace,
                &mut report,
            )?;
        }
    }
    Ok(report)
}

/// Laplace transforms of the three families against s^{α−1}, s^{α−2} and 1
/// over (s^α − λ), modewise. The tails use |C| ≤ 1, |S(t)| ≤ t and
/// |P(t)| ≤ t^{α−1}/Γ(α), each dominated by M e^{ωt} with ω = s/2.
fn laplace_rows(
    alpha: f64,
    a: &SpectralOperator,
    grid: &TimeGrid,
    x: &DMatrix<f64>,
    abscissae: &[f64],
    tol: f64,
    report: &mut Report,
) -> Result<(), FamilyError> {
    report.echo("laplace_horizon", grid.horizon());
    report.echo("laplace_n_steps", grid.n_steps());
    for kind in FamilyKind::ALL {
        let eval = FamilyEvaluation::new(alpha, kind, a, grid)?;
        let mut worst: f64 = 0.0;
        let mut worst_bound: f64 = 0.0;
        let mut pass = true;
        for mode in 1..=a.n_modes() {
            let weight = x.row(mode - 1).amax();
            if weight == 0.0 {
                continue;
            }
            let samples = GridFunction::new(
                *grid,
                (0..grid.len()).map(|i| eval.symbol(mode, i)).collect(),
            )?;
            let lambda = a.eigenvalue(mode);
            for &s in abscissae {
                let (m, omega) = match kind {
                    FamilyKind::Cosine => (1.0, 0.0),
                    FamilyKind::Sine => (1.0 / (E * 0.5 * s), 0.5 * s),
                    FamilyKind::RiemannLiouville => {
                        let q = alpha - 1.0;
                        let om = 0.5 * s;
                        ((q / (E * om)).powf(q) * rgamma(alpha), om)
                    }
                };
                let est = numeric_laplace(&samples, s, m, omega)?;
                let exact = s.powf(alpha - 1.0 - kind.time_power(alpha)) / (s.powf(alpha) - lambda);
                let err = (est.value - exact).abs() * weight;
                let bound = est.truncation_bound * weight;
                worst = worst.max(err);
                worst_bound = worst_bound.max(bound);
                pass &= err <= tol + bound;
            }
        }
        report.rows.push(ReportRow {
            name: format!("laplace_{}", kind.name()),
            residual: worst,
            tolerance: tol + worst_bound,
            pass,
        });
    }
    Ok(())
}

/// Max-norm residual of
/// C(s) J^α C(t) − J^α C(s) C(t) = J^α C(t) − J^α C(s),
/// with J^α applied along the time variable by product integration.
pub fn verify_alpha_resolvent_equation(
    alpha: f64,
    a: &DenseOperator,
    t: f64,
    s: f64,
    grid: &TimeGrid,
) -> Result<f64, FamilyError> {
    check_alpha(alpha)?;
    let it = grid.index_of(t).ok_or(FamilyError::NotOnGrid(t))?;
    let is = grid.index_of(s).ok_or(FamilyError::NotOnGrid(s))?;
    let c: Vec<DMatrix<f64>> = grid
        .nodes()
        .map(|tau| matrix_family(alpha, FamilyKind::Cosine, a, tau))
        .collect::<Result<_, _>>()?;
    let jc = rl_integral(alpha, &GridFunction::new(*grid, c.clone())?)?;
    let jc = jc.values();
    let lhs = &c[is] * &jc[it] - &jc[is] * &c[it];
    let rhs = &jc[it] - &jc[is];
    Ok((lhs - rhs).amax())
}
