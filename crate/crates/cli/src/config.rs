//! JSON problem configuration.
//!
//! Required: `alpha`, `T`, `n_steps`, `n_modes`. Everything else has a
//! default. Modal data (`initial_x`, `initial_y`) is either a coefficient
//! array or one or more `{"mode": n, "scale": a}` terms; the forcing `f` is a
//! list of `{"poly_t": [a0, a1, ...], "mode": n, "scale": a}` terms, each a
//! time polynomial times a mode. A parsed config is stored in canonical form
//! (coefficient arrays, forcing term lists) so serializing and re-parsing
//! gives the same value.

use std::fs;
use std::path::Path;

use fraccos_core::solver::{Forcing, Kernel, NonlinearityDescriptor, Pointwise, ProblemSpec};
use fraccos_core::spectral::{SpectralField, SpectralOperator};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
}

fn bad(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeTerm {
    pub mode: usize,
    #[serde(default = "one")]
    pub scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Coefficients(Vec<f64>),
    Terms(Vec<ModeTerm>),
    Term(ModeTerm),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingTerm {
    #[serde(default = "constant_one")]
    pub poly_t: Vec<f64>,
    pub mode: usize,
    #[serde(default = "one")]
    pub scale: f64,
}

fn constant_one() -> Vec<f64> {
    vec![1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ForcingProfile {
    Terms(Vec<ForcingTerm>),
    Term(ForcingTerm),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    Constant(f64),
    ExpDecay { scale: f64, rate: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    Sin,
    Cubic,
    Polynomial(Vec<f64>),
    Table { w: Vec<f64>, rho: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum HConfig {
    Zero,
    LinearMemory {
        kernel: KernelConfig,
    },
    Pointwise {
        map: MapConfig,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kernel: Option<KernelConfig>,
    },
}

/// The file as written; every field optional so that missing ones can be
/// reported by name.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    alpha: Option<f64>,
    beta: Option<f64>,
    #[serde(rename = "T")]
    t: Option<f64>,
    n_steps: Option<usize>,
    n_modes: Option<usize>,
    m_collocation: Option<usize>,
    initial_x: Option<Profile>,
    initial_y: Option<Profile>,
    f: Option<ForcingProfile>,
    h: Option<HConfig>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    damping: Option<f64>,
}

/// Validated configuration in canonical form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub n_steps: usize,
    pub n_modes: usize,
    pub m_collocation: usize,
    pub initial_x: Profile,
    pub initial_y: Profile,
    pub f: ForcingProfile,
    pub h: HConfig,
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
}

pub const MAX_STEPS: usize = 1_000_000;
pub const MAX_MODES: usize = 4096;

fn required<T>(v: Option<T>, field: &str) -> Result<T, ConfigError> {
    v.ok_or_else(|| bad(field, "missing required field"))
}

fn finite(v: f64, field: &str) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(field, "must be finite"))
    }
}

fn coefficients(p: &Profile, n: usize, field: &str) -> Result<Vec<f64>, ConfigError> {
    let mut c = vec![0.0; n];
    let mut add = |t: &ModeTerm| {
        if t.mode == 0 || t.mode > n {
            return Err(bad(
                field,
                format!("mode must lie in 1..={n}, got {}", t.mode),
            ));
        }
        c[t.mode - 1] += finite(t.scale, field)?;
        Ok(())
    };
    match p {
        Profile::Coefficients(v) => {
            if v.len() != n {
                return Err(bad(
                    field,
                    format!("expected {n} coefficients, got {}", v.len()),
                ));
            }
            for (i, &x) in v.iter().enumerate() {
                c[i] = finite(x, field)?;
            }
        }
        Profile::Terms(ts) => ts.iter().try_for_each(&mut add)?,
        Profile::Term(t) => add(t)?,
    }
    Ok(c)
}

fn check_kernel(k: &KernelConfig) -> Result<(), ConfigError> {
    match *k {
        KernelConfig::Constant(c) => finite(c, "h.kernel").map(|_| ()),
        KernelConfig::ExpDecay { scale, rate } => {
            finite(scale, "h.kernel.scale")?;
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(bad("h.kernel.rate", "must be finite and non-negative"));
            }
            Ok(())
        }
    }
}

fn check_h(h: &HConfig) -> Result<(), ConfigError> {
    match h {
        HConfig::Zero => Ok(()),
        HConfig::LinearMemory { kernel } => check_kernel(kernel),
        HConfig::Pointwise { map, kernel } => {
            if let Some(k) = kernel {
                check_kernel(k)?;
            }
            match map {
                MapConfig::Polynomial(a) => {
                    if a.is_empty() || a.iter().any(|v| !v.is_finite()) {
                        return Err(bad(
                            "h.map.polynomial",
                            "needs at least one finite coefficient",
                        ));
                    }
                }
                MapConfig::Table { w, rho } => {
                    if w.len() < 2 || w.len() != rho.len() {
                        return Err(bad(
                            "h.map.table",
                            "needs at least two (w, rho) pairs of equal length",
                        ));
                    }
                    if w.windows(2).any(|p| !(p[1] > p[0]))
                        || rho.iter().chain(w).any(|v| !v.is_finite())
                    {
                        return Err(bad(
                            "h.map.table",
                            "w must increase strictly and all entries must be finite",
                        ));
                    }
                }
                MapConfig::Sin | MapConfig::Cubic => {}
            }
            Ok(())
        }
    }
}

impl ConfigFile {
    /// Minimal config; everything else at its default.
    pub fn with_defaults(alpha: f64, t: f64, n_steps: usize, n_modes: usize) -> Self {
        Self {
            alpha,
            beta: 0.5,
            t,
            n_steps,
            n_modes,
            m_collocation: 2 * n_modes,
            initial_x: Profile::Coefficients(vec![0.0; n_modes]),
            initial_y: Profile::Coefficients(vec![0.0; n_modes]),
            f: ForcingProfile::Terms(Vec::new()),
            h: HConfig::Zero,
            tol: 1e-8,
            max_iter: 200,
            damping: 1.0,
        }
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let alpha = required(raw.alpha, "alpha")?;
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(bad("alpha", "alpha must lie in (1,2]"));
        }
        let t = required(raw.t, "T")?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(bad("T", "T must be positive and finite"));
        }
        let n_steps = required(raw.n_steps, "n_steps")?;
        if !(4..=MAX_STEPS).contains(&n_steps) {
            return Err(bad(
                "n_steps",
                format!("n_steps must lie in [4, {MAX_STEPS}]"),
            ));
        }
        let n_modes = required(raw.n_modes, "n_modes")?;
        if !(1..=MAX_MODES).contains(&n_modes) {
            return Err(bad(
                "n_modes",
                format!("n_modes must lie in [1, {MAX_MODES}]"),
            ));
        }
        let mut cfg = Self::with_defaults(alpha, t, n_steps, n_modes);
        if let Some(b) = raw.beta {
            if !(0.0..1.0).contains(&b) {
                return Err(bad("beta", "beta must lie in [0,1)"));
            }
            cfg.beta = b;
        }
        if let Some(m) = raw.m_collocation {
            if m < n_modes || m > 16 * MAX_MODES {
                return Err(bad(
                    "m_collocation",
                    format!("m_collocation must lie in [n_modes, {}]", 16 * MAX_MODES),
                ));
            }
            cfg.m_collocation = m;
        }
        if let Some(p) = raw.initial_x {
            cfg.initial_x = Profile::Coefficients(coefficients(&p, n_modes, "initial_x")?);
        }
        if let Some(p) = raw.initial_y {
            cfg.initial_y = Profile::Coefficients(coefficients(&p, n_modes, "initial_y")?);
        }
        if let Some(f) = raw.f {
            let terms = match f {
                ForcingProfile::Terms(ts) => ts,
                ForcingProfile::Term(t) => vec![t],
            };
            for term in &terms {
                if term.mode == 0 || term.mode > n_modes {
                    return Err(bad(
                        "f.mode",
                        format!("mode must lie in 1..={n_modes}, got {}", term.mode),
                    ));
                }
                if term.poly_t.is_empty() || term.poly_t.iter().any(|v| !v.is_finite()) {
                    return Err(bad("f.poly_t", "needs at least one finite coefficient"));
                }
                finite(term.scale, "f.scale")?;
            }
            cfg.f = ForcingProfile::Terms(terms);
        }
        if let Some(h) = raw.h {
            check_h(&h)?;
            cfg.h = h;
        }
        if let Some(tol) = raw.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(bad("tol", "tol must be positive"));
            }
            cfg.tol = tol;
        }
        if let Some(m) = raw.max_iter {
            if m == 0 {
                return Err(bad("max_iter", "max_iter must be at least 1"));
            }
            cfg.max_iter = m;
        }
        if let Some(d) = raw.damping {
            if !(d > 0.0 && d <= 1.0) {
                return Err(bad("damping", "damping must lie in (0,1]"));
            }
            cfg.damping = d;
        }
        Ok(cfg)
    }

    pub fn from_json(text: &str, path: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Self::from_raw(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn operator(&self) -> SpectralOperator {
        SpectralOperator::new(self.n_modes).expect("validated mode count")
    }

    fn field(&self, p: &Profile, name: &str) -> SpectralField {
        SpectralField::from_vec(coefficients(p, self.n_modes, name).expect("validated profile"))
    }

    pub fn problem(&self) -> ProblemSpec {
        let op = self.operator();
        let terms = match &self.f {
            ForcingProfile::Terms(ts) => ts.clone(),
            ForcingProfile::Term(t) => vec![t.clone()],
        };
        let forcing = if terms.is_empty() {
            Forcing::Zero
        } else {
            Forcing::Separable(
                terms
                    .iter()
                    .map(|t| {
                        let mut shape = op.unit(t.mode);
                        shape.coeffs *= t.scale;
                        (t.poly_t.clone(), shape)
                    })
                    .collect(),
            )
        };
        ProblemSpec {
            alpha: self.alpha,
            operator: op,
            x: self.field(&self.initial_x, "initial_x"),
            y: self.field(&self.initial_y, "initial_y"),
            f: forcing,
            h: nonlinearity(&self.h),
            beta: self.beta,
            collocation: self.m_collocation,
        }
    }
}

fn kernel(k: &KernelConfig) -> Kernel {
    match *k {
        KernelConfig::Constant(c) => Kernel::Constant(c),
        KernelConfig::ExpDecay { scale, rate } => Kernel::ExpDecay { scale, rate },
    }
}

pub fn nonlinearity(h: &HConfig) -> NonlinearityDescriptor {
    match h {
        HConfig::Zero => NonlinearityDescriptor::Zero,
        HConfig::LinearMemory { kernel: k } => NonlinearityDescriptor::LinearMemory(kernel(k)),
        HConfig::Pointwise { map, kernel: k } => NonlinearityDescriptor::Pointwise {
            map: match map {
                MapConfig::Sin => Pointwise::Sin,
                MapConfig::Cubic => Pointwise::Cubic,
                MapConfig::Polynomial(a) => Pointwise::Polynomial(a.clone()),
                MapConfig::Table { w, rho } => Pointwise::Table {
                    w: w.clone(),
                    rho: rho.clone(),
                },
            },
            kernel: k.as_ref().map(kernel),
        },
    }
}

pub fn parse_config(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ConfigFile::from_json(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<ConfigFile, ConfigError> {
        ConfigFile::from_json(s, "test.json")
    }

    #[test]
    fn defaults_filled() {
        let c = parse(r#"{"alpha": 1.5, "T": 1.0, "n_steps": 64, "n_modes": 8}"#).unwrap();
        assert_eq!(c, ConfigFile::with_defaults(1.5, 1.0, 64, 8));
        assert_eq!(c.beta, 0.5);
        assert_eq!(c.tol, 1e-8);
        assert_eq!(c.max_iter, 200);
        assert_eq!(c.damping, 1.0);
        assert_eq!(c.m_collocation, 16);
    }

    #[test]
    fn range_errors_name_the_field() {
        let e = parse(r#"{"alpha": 2.5, "T": 1.0, "n_steps": 64, "n_modes": 8}"#).unwrap_err();
        assert!(e.to_string().contains("alpha must lie in (1,2]"), "{e}");
        let e = parse(r#"{"alpha": 1.5, "n_steps": 64, "n_modes": 8}"#).unwrap_err();
        assert!(
            matches!(&e, ConfigError::Validation { field, .. } if field == "T"),
            "{e}"
        );
        let e = parse(
            r#"{"alpha": 1.5, "T": 1, "n_steps": 64, "n_modes": 2, "initial_x": {"mode": 3}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("initial_x"), "{e}");
        let e = parse(r#"{"alpha": 1.5, "T": 1, "n_steps": 64, "n_modes": 2, "damping": 0}"#)
            .unwrap_err();
        assert!(e.to_string().contains("damping"), "{e}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse("{\n  \"alpha\": 1.5,\n  \"T\": ,\n}").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 3, .. }), "{e}");
        let e = parse(r#"{"alpha": 1.5, "T": 1, "n_steps": 64, "n_modes": 2, "tolerance": 1}"#)
            .unwrap_err();
        assert!(e.to_string().contains("tolerance"), "{e}");
    }

    #[test]
    fn profiles_compose() {
        let c = parse(
            r#"{"alpha": 1.5, "T": 1, "n_steps": 64, "n_modes": 3,
                "initial_x": [{"mode": 1, "scale": 2}, {"mode": 3}, {"mode": 1, "scale": -0.5}],
                "initial_y": {"mode": 2, "scale": 4},
                "f": {"poly_t": [0, 1], "mode": 2},
                "h": {"type": "pointwise", "map": {"polynomial": [0, 1, 0.5]}, "kernel": {"exp_decay": {"scale": 1, "rate": 2}}}}"#,
        )
        .unwrap();
        assert_eq!(c.initial_x, Profile::Coefficients(vec![1.5, 0.0, 1.0]));
        assert_eq!(c.initial_y, Profile::Coefficients(vec![0.0, 4.0, 0.0]));
        let p = c.problem();
        let (f, df) = p.f.eval(3, 2.0).unwrap();
        assert_eq!(f.coeffs.as_slice(), &[0.0, 2.0, 0.0]);
        assert_eq!(df.coeffs.as_slice(), &[0.0, 1.0, 0.0]);
        assert_eq!(parse(&c.to_json()).unwrap(), c);
    }
}
