//! Verification suites run by `fraccos verify`.

use std::str::FromStr;

use fraccos_core::families::{
    apply_family_subordinated, family_symbol, verify_alpha_resolvent_equation,
    verify_family_identities, DenseOperator, FamilyError, FamilyKind, IdentityOperator, Report,
    VerifyOptions,
};
use fraccos_core::fracalc::{
    caputo_derivative, numeric_laplace, rl_integral, GridFunction, TimeGrid,
};
use fraccos_core::quad::{integrate, QuadOptions};
use fraccos_core::specfun::{
    gamma_fn, mittag_leffler, rgamma, subordination_density, wright_tail_cutoff, MLParams,
};
use fraccos_core::spectral::SpectralOperator;

use crate::config::ConfigFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Specfun,
    Fracalc,
    Families,
    Chenli,
    All,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "specfun" => Ok(Self::Specfun),
            "fracalc" => Ok(Self::Fracalc),
            "families" => Ok(Self::Families),
            "chenli" => Ok(Self::Chenli),
            "all" => Ok(Self::All),
            other => Err(format!(
                "unknown suite `{other}` (expected specfun, fracalc, families, chenli or all)"
            )),
        }
    }
}

/// Suite parameters taken from a config, or the documented defaults.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteParams {
    pub alpha: f64,
    pub horizon: f64,
    pub n_steps: usize,
    pub n_modes: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            alpha: 1.5,
            horizon: 1.0,
            n_steps: 2048,
            n_modes: 4,
        }
    }
}

impl From<&ConfigFile> for SuiteParams {
    fn from(c: &ConfigFile) -> Self {
        Self {
            alpha: c.alpha,
            horizon: c.t,
            n_steps: c.n_steps,
            n_modes: c.n_modes,
        }
    }
}

fn ml(a: f64, b: f64, z: f64) -> Result<f64, FamilyError> {
    Ok(mittag_leffler(MLParams::new(a, b)?, z)?)
}

/// E_{3/2,3/2}(−2) from an extended-precision series evaluation.
const ML_15_15_AT_MINUS_2: f64 = 0.413_409_659_054_908_2;

pub fn specfun_suite() -> Result<Report, FamilyError> {
    let mut r = Report::default();
    let mut gamma_gap: f64 = 0.0;
    for k in 1..=200 {
        let x = 0.05 + 0.15 * k as f64;
        let lhs = gamma_fn(x + 1.0)?;
        gamma_gap = gamma_gap.max((lhs - x * gamma_fn(x)?).abs() / lhs.abs());
    }
    r.check("gamma_recurrence", gamma_gap, 1e-13);
    let mut exp_gap: f64 = 0.0;
    let mut cos_gap: f64 = 0.0;
    let mut sin_gap: f64 = 0.0;
    for k in 0..=100 {
        let z = -30.0 + 0.35 * k as f64;
        exp_gap = exp_gap.max((ml(1.0, 1.0, z)? - z.exp()).abs() / z.exp().max(1e-3));
        let t = 0.12 * k as f64;
        cos_gap = cos_gap.max((ml(2.0, 1.0, -t * t)? - t.cos()).abs());
        sin_gap = sin_gap.max((t * ml(2.0, 2.0, -t * t)? - t.sin()).abs());
    }
    r.check("ml_exponential", exp_gap, 1e-12);
    r.check("ml_cosine", cos_gap, 1e-12);
    r.check("ml_sine", sin_gap, 1e-12);
    let v = ml(1.5, 1.5, -2.0)?;
    r.check(
        "ml_reference_value",
        (v - ML_15_15_AT_MINUS_2).abs() / ML_15_15_AT_MINUS_2,
        1e-10,
    );
    for gamma in [0.6f64, 0.75, 0.9] {
        for t in [0.5f64, 1.0, 2.0] {
            let upper = t.powf(gamma) * wright_tail_cutoff(gamma);
            let mut failure = None;
            let q = integrate(
                |s| {
                    subordination_density(gamma, t, s).unwrap_or_else(|e| {
                        failure = Some(e);
                        0.0
                    })
                },
                0.0,
                upper,
                &[],
                QuadOptions {
                    abs_tol: 1e-12,
                    rel_tol: 1e-12,
                    max_intervals: 2000,
                },
            );
            if let Some(e) = failure {
                return Err(e.into());
            }
            r.check(
                format!("wright_normalization_g{gamma}_t{t}"),
                (q.value - 1.0).abs(),
                1e-6,
            );
        }
    }
    Ok(r)
}

pub fn fracalc_suite(alpha: f64) -> Result<Report, FamilyError> {
    let mut r = Report::default();
    r.echo("fracalc.alpha", alpha);
    let g = TimeGrid::new(2.0, 64)?;
    for a in [0.5, 1.5] {
        let j = rl_integral(a, &GridFunction::sample(g, |t| 2.0 - t))?;
        let gap = g
            .nodes()
            .zip(j.values())
            .map(|(t, v)| {
                (v - (2.0 * t.powf(a) * rgamma(a + 1.0) - t.powf(a + 1.0) * rgamma(a + 2.0))).abs()
            })
            .fold(0.0, f64::max);
        r.check(format!("rl_integral_linear_exact_a{a}"), gap, 1e-12);
    }
    // J^{1/2} g_{3/2} = g_2; interpolating √t near 0 limits this to c·h, c ≈ 0.151
    let g = TimeGrid::new(1.0, 1024)?;
    let j = rl_integral(0.5, &GridFunction::sample(g, |t| t.sqrt() * rgamma(1.5)))?;
    let gap = g
        .nodes()
        .zip(j.values())
        .map(|(t, v)| (v - t).abs())
        .fold(0.0, f64::max);
    r.check("rl_integral_sqrt_kernel", gap, 0.16 * g.step());
    // J^{0.3} J^{0.4} t² = J^{0.7} t²
    let sq = GridFunction::sample(g, |t| t * t);
    let two = rl_integral(0.3, &rl_integral(0.4, &sq)?)?;
    let exact = |t: f64| 2.0 * t.powf(2.7) * rgamma(3.7);
    let gap = g
        .nodes()
        .zip(two.values())
        .map(|(t, v)| (v - exact(t)).abs())
        .fold(0.0, f64::max);
    r.check("rl_semigroup", gap, 1e-5);
    // ᶜD^α t² = 2 t^{2−α}/Γ(3−α), away from t = 0
    let g2 = TimeGrid::new(2.0, 512)?;
    let c = caputo_derivative(alpha, &GridFunction::sample(g2, |t| t * t), &0.0, &0.0)?;
    let gap = (64..512)
        .map(|i| {
            let t = g2.node(i);
            (c.values()[i] - 2.0 * t.powf(2.0 - alpha) * rgamma(3.0 - alpha)).abs()
        })
        .fold(0.0, f64::max);
    r.check("caputo_square", gap, 1e-3);
    // Laplace transform of g_α is s^{−α}
    let long = TimeGrid::new(40.0, 16000)?;
    let kernel = GridFunction::sample(long, |t| t.powf(alpha - 1.0) * rgamma(alpha));
    for s in [1.0f64, 2.0] {
        let omega = s / 2.0;
        let m = ((alpha - 1.0) / (std::f64::consts::E * omega)).powf(alpha - 1.0) * rgamma(alpha);
        let est = numeric_laplace(&kernel, s, m, omega)?;
        r.check(
            format!("laplace_kernel_s{s}"),
            (est.value - s.powf(-alpha)).abs(),
            1e-4 + est.truncation_bound,
        );
    }
    Ok(r)
}

pub fn families_suite(p: &SuiteParams) -> Result<Report, FamilyError> {
    let mut r = Report::default();
    let op = SpectralOperator::new(p.n_modes)?;
    let grid = TimeGrid::new(p.horizon, p.n_steps)?;
    r.extend(verify_family_identities(
        p.alpha,
        IdentityOperator::Spectral(&op),
        &grid,
        &VerifyOptions::default(),
    )?);
    // transforms of the families for λ = −1 on a long horizon
    let single = SpectralOperator::new(1)?;
    let opts = VerifyOptions {
        laplace_grid: Some(TimeGrid::new(40.0, 16000)?),
        ..VerifyOptions::default()
    };
    let laplace = verify_family_identities(
        p.alpha,
        IdentityOperator::Spectral(&single),
        &TimeGrid::new(1.0, 64)?,
        &opts,
    )?;
    r.rows.extend(
        laplace
            .rows
            .into_iter()
            .filter(|row| row.name.starts_with("laplace_")),
    );
    r.echo("laplace.horizon", 40.0);
    r.echo("laplace.n_steps", 16000);
    if p.alpha < 2.0 {
        for mode in 1..=p.n_modes.min(5) {
            let c = apply_family_subordinated(p.alpha, 1.0, &op.unit(mode), 1e-10)?;
            let exact = family_symbol(p.alpha, FamilyKind::Cosine, op.eigenvalue(mode), 1.0)?;
            r.check(
                format!("subordination_mode{mode}"),
                (c.coeffs[mode - 1] - exact).abs() / exact.abs().max(1e-2),
                1e-6,
            );
        }
    }
    Ok(r)
}

pub fn chenli_suite(alpha: f64) -> Result<Report, FamilyError> {
    let mut r = Report::default();
    let a = DenseOperator::default_non_normal();
    r.echo("chenli.matrix", "[[-1,4],[0,-2]]");
    r.echo("chenli.grid", "T=1.024 n=1024,2048");
    let coarse =
        verify_alpha_resolvent_equation(alpha, &a, 0.4, 0.9, &TimeGrid::new(1.024, 1024)?)?;
    let grid = TimeGrid::new(1.024, 2048)?;
    let fine = verify_alpha_resolvent_equation(alpha, &a, 0.4, 0.9, &grid)?;
    r.check("resolvent_equation", fine, 1e-4);
    r.check_at_least("resolvent_mesh_ratio", coarse / fine, 2.0);
    let dense = verify_family_identities(
        alpha,
        IdentityOperator::Dense(&a),
        &grid,
        &VerifyOptions::default(),
    )?;
    for mut row in dense.rows {
        row.name = format!("dense_{}", row.name);
        r.rows.push(row);
    }
    Ok(r)
}

pub fn run_suite(suite: Suite, p: &SuiteParams) -> Result<Report, FamilyError> {
    let mut r = Report::default();
    r.echo("alpha", p.alpha);
    r.echo("T", p.horizon);
    r.echo("n_steps", p.n_steps);
    r.echo("n_modes", p.n_modes);
    let all = suite == Suite::All;
    if all || suite == Suite::Specfun {
        r.extend(specfun_suite()?);
    }
    if all || suite == Suite::Fracalc {
        r.extend(fracalc_suite(p.alpha)?);
    }
    if all || suite == Suite::Families {
        r.extend(families_suite(p)?);
    }
    if all || suite == Suite::Chenli {
        r.extend(chenli_suite(p.alpha)?);
    }
    Ok(r)
}
