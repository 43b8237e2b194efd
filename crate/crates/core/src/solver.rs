//! Mild solutions of the fractional evolution equation
//!
//! ```text
//! ᶜD^α u = A u + ∫_0^t h(t, s, u(s)) ds + f(t),   u(0) = x,  u'(0) = y
//! ```
//!
//! on the spectral operator. The linear part is
//! φ(t) = C_α(t)x + S_α(t)y + ∫_0^t P_α(t−s) f(s) ds and the nonlinear
//! problem is the fixed point u = Q u with
//! (Q u)(t) = φ(t) + ∫_0^t P_α(t−s) ∫_0^s h(s, r, u(r)) dr ds,
//! found by damped Picard iteration.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::families::{
    family_symbol, rl_family_convolution, FamilyError, FamilyEvaluation, FamilyKind,
};
use crate::fracalc::{rl_integral, FracCalcError, GridFunction, GridValue, TimeGrid};
use crate::quad::kronrod_nodes;
use crate::specfun::{gamma_fn, rgamma};
use crate::spectral::{
    apply_operator, NodalField, SineBasis, SpectralError, SpectralField, SpectralOperator,
};

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    FracCalc(#[from] FracCalcError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("invalid {name}: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error("Picard iteration did not converge in {iterations} iterations (last update {last_residual:e})")]
    NonConvergence {
        iterations: usize,
        last_residual: f64,
        result: Box<SolveResult>,
    },
    #[error("Caputo derivative not available in closed form: {0}")]
    NoClosedForm(String),
}

fn invalid(name: &'static str, reason: impl Into<String>) -> SolverError {
    SolverError::InvalidArgument {
        name,
        reason: reason.into(),
    }
}

/// Memory kernel k(t, s) with its derivative in t.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    Constant(f64),
    /// scale · e^{−rate (t − s)}
    ExpDecay {
        scale: f64,
        rate: f64,
    },
}

impl Kernel {
    pub fn value(&self, t: f64, s: f64) -> f64 {
        match *self {
            Kernel::Constant(c) => c,
            Kernel::ExpDecay { scale, rate } => scale * (-rate * (t - s)).exp(),
        }
    }

    /// ∂k/∂t
    pub fn dt(&self, t: f64, s: f64) -> f64 {
        match *self {
            Kernel::Constant(_) => 0.0,
            Kernel::ExpDecay { rate, .. } => -rate * self.value(t, s),
        }
    }
}

/// Scalar map ρ(w) applied to nodal values.
#[derive(Clone, Debug, PartialEq)]
pub enum Pointwise {
    Sin,
    Cubic,
    /// Σ_k a_k w^k
    Polynomial(Vec<f64>),
    /// Piecewise-linear interpolation through (w_k, ρ_k), constant beyond the ends.
    Table {
        w: Vec<f64>,
        rho: Vec<f64>,
    },
}

impl Pointwise {
    pub fn eval(&self, w: f64) -> f64 {
        match self {
            Pointwise::Sin => w.sin(),
            Pointwise::Cubic => w * w * w,
            Pointwise::Polynomial(a) => a.iter().rev().fold(0.0, |acc, c| acc * w + c),
            Pointwise::Table { w: xs, rho } => {
                if w <= xs[0] {
                    return rho[0];
                }
                let last = xs.len() - 1;
                if w >= xs[last] {
                    return rho[last];
                }
                let k = xs.partition_point(|&x| x <= w) - 1;
                let theta = (w - xs[k]) / (xs[k + 1] - xs[k]);
                rho[k] + theta * (rho[k + 1] - rho[k])
            }
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        if let Pointwise::Table { w, rho } = self {
            if w.len() < 2 || w.len() != rho.len() {
                return Err(invalid(
                    "h",
                    "table needs at least two (w, rho) pairs of equal length",
                ));
            }
            if w.windows(2).any(|p| !(p[1] > p[0])) {
                return Err(invalid("h", "table abscissae must increase strictly"));
            }
        }
        Ok(())
    }
}

/// Pointwise map ρ(t, s, w) with its t-derivative.
pub type CustomFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// The nonlinearity h(t, s, w)(x) = ρ(t, s, w(x)).
#[derive(Clone)]
pub enum NonlinearityDescriptor {
    Zero,
    /// k(t, s) w
    LinearMemory(Kernel),
    /// k(t, s) ρ(w); k ≡ 1 when absent
    Pointwise {
        map: Pointwise,
        kernel: Option<Kernel>,
    },
    Custom {
        value: CustomFn,
        dt: CustomFn,
    },
}

impl fmt::Debug for NonlinearityDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::LinearMemory(k) => f.debug_tuple("LinearMemory").field(k).finish(),
            Self::Pointwise { map, kernel } => f
                .debug_struct("Pointwise")
                .field("map", map)
                .field("kernel", kernel)
                .finish(),
            Self::Custom { .. } => write!(f, "Custom"),
        }
    }
}

impl NonlinearityDescriptor {
    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    /// ρ(t, s, w)
    pub fn eval(&self, t: f64, s: f64, w: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::LinearMemory(k) => k.value(t, s) * w,
            Self::Pointwise { map, kernel } => {
                kernel.as_ref().map_or(1.0, |k| k.value(t, s)) * map.eval(w)
            }
            Self::Custom { value, .. } => value(t, s, w),
        }
    }

    /// ∂ρ/∂t (t, s, w)
    pub fn eval_dt(&self, t: f64, s: f64, w: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::LinearMemory(k) => k.dt(t, s) * w,
            Self::Pointwise { map, kernel } => {
                kernel.as_ref().map_or(0.0, |k| k.dt(t, s)) * map.eval(w)
            }
            Self::Custom { dt, .. } => dt(t, s, w),
        }
    }
}

/// Field-valued function of time returning (f(t), f'(t)).
pub type ForcingFn =
    Arc<dyn Fn(f64) -> Result<(SpectralField, SpectralField), SolverError> + Send + Sync>;

/// Inhomogeneity f together with its time derivative.
#[derive(Clone)]
pub enum Forcing {
    Zero,
    /// Σ_k p_k(t) v_k with polynomial p_k (coefficients in ascending powers).
    Separable(Vec<(Vec<f64>, SpectralField)>),
    Function(ForcingFn),
}

impl fmt::Debug for Forcing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Separable(terms) => f.debug_tuple("Separable").field(terms).finish(),
            Self::Function(_) => write!(f, "Function"),
        }
    }
}

fn poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn poly_dt(coeffs: &[f64], t: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c)
}

impl Forcing {
    /// (f(t), f'(t)) on `n` modes.
    pub fn eval(&self, n: usize, t: f64) -> Result<(SpectralField, SpectralField), SolverError> {
        match self {
            Forcing::Zero => Ok((SpectralField::zeros(n), SpectralField::zeros(n))),
            Forcing::Separable(terms) => {
                let mut f = SpectralField::zeros(n);
                let mut df = SpectralField::zeros(n);
                for (p, v) in terms {
                    f.add_scaled(poly(p, t), v);
                    df.add_scaled(poly_dt(p, t), v);
                }
                Ok((f, df))
            }
            Forcing::Function(g) => g(t),
        }
    }
}

/// Problem data of the nonlinear evolution equation.
#[derive(Clone, Debug)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub operator: SpectralOperator,
    pub x: SpectralField,
    pub y: SpectralField,
    pub f: Forcing,
    pub h: NonlinearityDescriptor,
    /// Regularity index of the solution-space norm ‖·‖_β.
    pub beta: f64,
    /// Collocation points used when h is applied nodally.
    pub collocation: usize,
}

impl ProblemSpec {
    /// Linear problem with default β = 1/2 and M = 2N.
    pub fn linear(
        alpha: f64,
        operator: SpectralOperator,
        x: SpectralField,
        y: SpectralField,
        f: Forcing,
    ) -> Self {
        let collocation = 2 * operator.n_modes();
        Self {
            alpha,
            operator,
            x,
            y,
            f,
            h: NonlinearityDescriptor::Zero,
            beta: 0.5,
            collocation,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(invalid(
                "alpha",
                format!("{} is outside (1, 2]", self.alpha),
            ));
        }
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return Err(invalid("beta", format!("{} is outside [0, 1)", self.beta)));
        }
        let n = self.operator.n_modes();
        for (name, v) in [("x", &self.x), ("y", &self.y)] {
            if v.len() != n {
                return Err(invalid(
                    name,
                    format!("has {} coefficients, operator has {n} modes", v.len()),
                ));
            }
        }
        if self.collocation < n {
            return Err(invalid(
                "collocation",
                format!("{} points for {n} modes", self.collocation),
            ));
        }
        if let NonlinearityDescriptor::Pointwise { map, .. } = &self.h {
            map.validate()?;
        }
        Ok(())
    }
}

/// Trajectory and diagnostics of a solve.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub grid: TimeGrid,
    pub trajectory: Vec<SpectralField>,
    pub iterations: usize,
    /// max_t ‖u − Qu‖_β, recomputed from the returned trajectory.
    pub fixed_point_residual: f64,
    /// Max defect of the integrated equation.
    pub volterra_residual: f64,
    /// ‖u(t_i) − Qu(t_i)‖_β per node.
    pub fixed_point_by_node: Vec<f64>,
    /// Defect of the integrated equation per node.
    pub volterra_by_node: Vec<f64>,
    /// max_t ‖u(t) − x‖_β
    pub max_beta_excursion: f64,
    pub converged: bool,
}

/// Precomputed families and transforms shared by all iterations.
struct Workspace<'a> {
    spec: &'a ProblemSpec,
    grid: TimeGrid,
    p: FamilyEvaluation,
    basis: SineBasis,
    phi: Vec<SpectralField>,
    forcing: Vec<SpectralField>,
}

impl<'a> Workspace<'a> {
    fn new(spec: &'a ProblemSpec, grid: &TimeGrid) -> Result<Self, SolverError> {
        spec.validate()?;
        let op = &spec.operator;
        let n = op.n_modes();
        let c = FamilyEvaluation::new(spec.alpha, FamilyKind::Cosine, op, grid)?;
        let s = FamilyEvaluation::new(spec.alpha, FamilyKind::Sine, op, grid)?;
        let p = FamilyEvaluation::new(spec.alpha, FamilyKind::RiemannLiouville, op, grid)?;
        let forcing = grid
            .nodes()
            .map(|t| spec.f.eval(n, t).map(|(f, _)| f))
            .collect::<Result<Vec<_>, _>>()?;
        let conv = rl_family_convolution(&p, &GridFunction::new(*grid, forcing.clone())?)?;
        let phi = (0..grid.len())
            .map(|i| {
                if i == 0 {
                    return spec.x.clone();
                }
                let mut v = SpectralField::zeros(n);
                for k in 0..n {
                    v.coeffs[k] = c.symbol(k + 1, i) * spec.x.coeffs[k]
                        + s.symbol(k + 1, i) * spec.y.coeffs[k]
                        + conv.values()[i].coeffs[k];
                }
                v
            })
            .collect();
        Ok(Self {
            spec,
            grid: *grid,
            p,
            basis: SineBasis::new(n, spec.collocation)?,
            phi,
            forcing,
        })
    }

    /// H(t_j) = ∫_0^{t_j} h(t_j, r, u(r)) dr by the trapezoid rule on the nodes.
    fn memory_term(&self, u: &[SpectralField]) -> Result<Vec<SpectralField>, SolverError> {
        let h_fn = &self.spec.h;
        let n = self.spec.operator.n_modes();
        let dt = self.grid.step();
        let nodal: Vec<NodalField> = u
            .iter()
            .map(|v| self.basis.inverse(v))
            .collect::<Result<_, _>>()?;
        let m = self.basis.points();
        let mut out = Vec::with_capacity(u.len());
        out.push(SpectralField::zeros(n));
        for j in 1..u.len() {
            let tj = self.grid.node(j);
            let mut acc = vec![0.0; m];
            for (r, w) in nodal.iter().enumerate().take(j + 1) {
                let weight = if r == 0 || r == j { 0.5 * dt } else { dt };
                let s = self.grid.node(r);
                for (a, &val) in acc.iter_mut().zip(&w.samples) {
                    *a += weight * h_fn.eval(tj, s, val);
                }
            }
            out.push(self.basis.forward(&NodalField { samples: acc })?);
        }
        Ok(out)
    }

    /// Q u at every node.
    fn q_map(&self, u: &[SpectralField]) -> Result<Vec<SpectralField>, SolverError> {
        if self.spec.h.is_zero() {
            return Ok(self.phi.clone());
        }
        let memory = self.memory_term(u)?;
        let conv = rl_family_convolution(&self.p, &GridFunction::new(self.grid, memory)?)?;
        Ok(self
            .phi
            .iter()
            .zip(conv.values())
            .enumerate()
            .map(|(i, (p, c))| {
                if i == 0 {
                    return p.clone();
                }
                let mut v = p.clone();
                v.add_scaled(1.0, c);
                v
            })
            .collect())
    }

    fn volterra_defects(&self, u: &[SpectralField]) -> Result<Vec<f64>, SolverError> {
        let spec = self.spec;
        let memory = if spec.h.is_zero() {
            vec![SpectralField::zeros(spec.operator.n_modes()); u.len()]
        } else {
            self.memory_term(u)?
        };
        let rhs = u
            .iter()
            .zip(&memory)
            .zip(&self.forcing)
            .map(|((v, m), f)| {
                let mut r = apply_operator(&spec.operator, v)?;
                r.add_scaled(1.0, m);
                r.add_scaled(1.0, f);
                Ok(r)
            })
            .collect::<Result<Vec<_>, SolverError>>()?;
        let j = rl_integral(spec.alpha, &GridFunction::new(self.grid, rhs)?)?;
        Ok(u.iter()
            .zip(j.values())
            .enumerate()
            .map(|(i, (v, jv))| {
                let mut d = v.clone();
                d.add_scaled(-1.0, &spec.x);
                d.add_scaled(-self.grid.node(i), &spec.y);
                d.add_scaled(-1.0, jv);
                d.l2_norm()
            })
            .collect())
    }

    fn finish(
        &self,
        trajectory: Vec<SpectralField>,
        iterations: usize,
        converged: bool,
    ) -> Result<SolveResult, SolverError> {
        let beta = self.spec.beta;
        let q = self.q_map(&trajectory)?;
        let fixed_point_by_node: Vec<f64> = trajectory
            .iter()
            .zip(&q)
            .map(|(u, v)| {
                let mut d = u.clone();
                d.add_scaled(-1.0, v);
                d.beta_norm(beta)
            })
            .collect();
        let volterra_by_node = self.volterra_defects(&trajectory)?;
        let max_beta_excursion = trajectory
            .iter()
            .map(|u| {
                let mut d = u.clone();
                d.add_scaled(-1.0, &self.spec.x);
                d.beta_norm(beta)
            })
            .fold(0.0, f64::max);
        Ok(SolveResult {
            grid: self.grid,
            iterations,
            fixed_point_residual: fixed_point_by_node.iter().copied().fold(0.0, f64::max),
            volterra_residual: volterra_by_node.iter().copied().fold(0.0, f64::max),
            fixed_point_by_node,
            volterra_by_node,
            max_beta_excursion,
            converged,
            trajectory,
        })
    }
}

/// φ(t) = C_α(t)x + S_α(t)y + ∫_0^t P_α(t−s) f(s) ds; h is ignored.
pub fn linear_mild_solution(
    spec: &ProblemSpec,
    grid: &TimeGrid,
) -> Result<SolveResult, SolverError> {
    let linear = ProblemSpec {
        h: NonlinearityDescriptor::Zero,
        ..spec.clone()
    };
    let ws = Workspace::new(&linear, grid)?;
    ws.finish(ws.phi.clone(), 0, true)
}

/// Picard controls.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Initial damping θ ∈ (0, 1]; halved when the update grows, never below 1/16.
    pub damping: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            damping: 1.0,
        }
    }
}

pub const MIN_DAMPING: f64 = 1.0 / 16.0;

/// Damped Picard iteration u ← (1−θ)u + θ Q u from u⁰ = φ. Stops when
/// max_t ‖u^{k+1} − u^k‖_β ≤ tol and the recomputed max_t ‖u − Qu‖_β ≤ tol.
pub fn picard_solve(
    spec: &ProblemSpec,
    grid: &TimeGrid,
    opts: &PicardOptions,
) -> Result<SolveResult, SolverError> {
    if !(opts.tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(invalid(
            "damping",
            format!("{} is outside (0, 1]", opts.damping),
        ));
    }
    if opts.max_iter == 0 {
        return Err(invalid("max_iter", "must be at least 1"));
    }
    let ws = Workspace::new(spec, grid)?;
    if spec.h.is_zero() {
        // Q is constant: one application lands on φ
        return ws.finish(ws.phi.clone(), 1, true);
    }
    let beta = spec.beta;
    let mut u = ws.phi.clone();
    let mut theta = opts.damping;
    let mut previous = f64::INFINITY;
    let mut last = f64::INFINITY;
    for iter in 1..=opts.max_iter {
        let q = ws.q_map(&u)?;
        let mut change: f64 = 0.0;
        for (i, (ui, qi)) in u.iter_mut().zip(&q).enumerate() {
            if i == 0 {
                continue;
            }
            let mut next = ui.scaled(1.0 - theta);
            next.add_scaled(theta, qi);
            let mut d = next.clone();
            d.add_scaled(-1.0, ui);
            change = change.max(d.beta_norm(beta));
            *ui = next;
        }
        u[0] = spec.x.clone();
        last = change;
        if !change.is_finite() {
            break;
        }
        if change <= opts.tol {
            // accept only if the recomputed fixed-point defect agrees
            let result = ws.finish(u.clone(), iter, true)?;
            if result.fixed_point_residual <= opts.tol {
                return Ok(result);
            }
        }
        if change > previous {
            theta = (0.5 * theta).max(MIN_DAMPING);
        }
        previous = change;
    }
    let result = ws.finish(u, opts.max_iter, false)?;
    Err(SolverError::NonConvergence {
        iterations: opts.max_iter,
        last_residual: last,
        result: Box::new(result),
    })
}

/// Defect of u(t) = x + t y + J^α[A u + ∫_0^t h(t,s,u(s)) ds + f](t) per node.
pub fn volterra_form_residual(
    spec: &ProblemSpec,
    trajectory: &[SpectralField],
    grid: &TimeGrid,
) -> Result<Vec<f64>, SolverError> {
    if trajectory.len() != grid.len() {
        return Err(invalid(
            "trajectory",
            format!("{} nodes, grid has {}", trajectory.len(), grid.len()),
        ));
    }
    let ws = Workspace::new(spec, grid)?;
    ws.volterra_defects(trajectory)
}

/// One term of a closed-form modal trajectory.
#[derive(Clone, Debug, PartialEq)]
pub enum TrajectoryTerm {
    /// t^m v, for integer m ≥ 0 or real m > α.
    Monomial { power: f64, shape: SpectralField },
    /// F_α(t) v for the cosine or sine family of the operator.
    Family {
        kind: FamilyKind,
        shape: SpectralField,
    },
}

/// Closed-form trajectory with an analytic Caputo derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct ManufacturedTrajectory {
    pub terms: Vec<TrajectoryTerm>,
}

/// Values of a trajectory and its derivatives at one time.
struct Jet {
    value: SpectralField,
    dt: SpectralField,
    caputo: SpectralField,
    caputo_dt: SpectralField,
}

impl ManufacturedTrajectory {
    pub fn monomial(power: f64, shape: SpectralField) -> Self {
        Self {
            terms: vec![TrajectoryTerm::Monomial { power, shape }],
        }
    }

    fn check(&self, alpha: f64, op: &SpectralOperator) -> Result<(), SolverError> {
        for term in &self.terms {
            match term {
                TrajectoryTerm::Monomial { power, shape } => {
                    let integer = *power >= 0.0 && power.fract() == 0.0;
                    if !(integer || *power > alpha) {
                        return Err(SolverError::NoClosedForm(format!(
                            "t^{power} is neither an integer power nor smoother than t^alpha"
                        )));
                    }
                    if shape.len() != op.n_modes() {
                        return Err(invalid("u_star", "shape size differs from the operator"));
                    }
                }
                TrajectoryTerm::Family { kind, shape } => {
                    if *kind == FamilyKind::RiemannLiouville {
                        return Err(SolverError::NoClosedForm(
                            "the Riemann–Liouville family is not differentiable at t = 0".into(),
                        ));
                    }
                    if shape.len() != op.n_modes() {
                        return Err(invalid("u_star", "shape size differs from the operator"));
                    }
                }
            }
        }
        Ok(())
    }

    /// u*(t) only.
    pub fn value(
        &self,
        alpha: f64,
        op: &SpectralOperator,
        t: f64,
    ) -> Result<SpectralField, SolverError> {
        let n = op.n_modes();
        let mut v = SpectralField::zeros(n);
        for term in &self.terms {
            match term {
                TrajectoryTerm::Monomial { power, shape } => v.add_scaled(t.powf(*power), shape),
                TrajectoryTerm::Family { kind, shape } => {
                    for k in 0..n {
                        v.coeffs[k] +=
                            family_symbol(alpha, *kind, op.eigenvalue(k + 1), t)? * shape.coeffs[k];
                    }
                }
            }
        }
        Ok(v)
    }

    fn jet(&self, alpha: f64, op: &SpectralOperator, t: f64) -> Result<Jet, SolverError> {
        let n = op.n_modes();
        let mut jet = Jet {
            value: SpectralField::zeros(n),
            dt: SpectralField::zeros(n),
            caputo: SpectralField::zeros(n),
            caputo_dt: SpectralField::zeros(n),
        };
        for term in &self.terms {
            match term {
                TrajectoryTerm::Monomial { power, shape } => {
                    let m = *power;
                    jet.value.add_scaled(t.powf(m), shape);
                    if m > 0.0 {
                        jet.dt.add_scaled(m * t.powf(m - 1.0), shape);
                    }
                    if m >= 2.0 || m > alpha {
                        // ᶜD^α t^m = Γ(m+1)/Γ(m+1−α) t^{m−α}
                        let c =
                            gamma_fn(m + 1.0).map_err(FamilyError::from)? * rgamma(m + 1.0 - alpha);
                        jet.caputo.add_scaled(c * t.powf(m - alpha), shape);
                        if t > 0.0 {
                            jet.caputo_dt
                                .add_scaled(c * (m - alpha) * t.powf(m - alpha - 1.0), shape);
                        }
                    }
                }
                TrajectoryTerm::Family { kind, shape } => {
                    // ᶜD^α F = A F;  C' = A P, S' = C
                    for k in 0..n {
                        let lambda = op.eigenvalue(k + 1);
                        let c = family_symbol(alpha, FamilyKind::Cosine, lambda, t)?;
                        let (value, dt) = match kind {
                            FamilyKind::Cosine => {
                                let p =
                                    family_symbol(alpha, FamilyKind::RiemannLiouville, lambda, t)?;
                                (c, lambda * p)
                            }
                            _ => (family_symbol(alpha, FamilyKind::Sine, lambda, t)?, c),
                        };
                        let a = shape.coeffs[k];
                        jet.value.coeffs[k] += value * a;
                        jet.dt.coeffs[k] += dt * a;
                        jet.caputo.coeffs[k] += lambda * value * a;
                        jet.caputo_dt.coeffs[k] += lambda * dt * a;
                    }
                }
            }
        }
        Ok(jet)
    }
}

/// Panels of the Kronrod rule used for the memory integral of u*.
const MANUFACTURED_PANELS: usize = 32;

/// Builds the problem solved by `u_star`: x = u*(0), y = u*'(0) and
/// f = ᶜD^α u* − A u* − ∫_0^t h(t, s, u*(s)) ds, with f' from
/// h(t, t, u*(t)) and the t-derivative of h under the integral.
pub fn make_manufactured(
    alpha: f64,
    operator: SpectralOperator,
    u_star: &ManufacturedTrajectory,
    h: NonlinearityDescriptor,
) -> Result<ProblemSpec, SolverError> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(invalid("alpha", format!("{alpha} is outside (1, 2]")));
    }
    u_star.check(alpha, &operator)?;
    let start = u_star.jet(alpha, &operator, 0.0)?;
    let collocation = 2 * operator.n_modes();
    let basis = Arc::new(SineBasis::new(operator.n_modes(), collocation)?);
    let traj = u_star.clone();
    let h_inner = h.clone();
    let forcing: ForcingFn = Arc::new(move |t: f64| {
        let jet = traj.jet(alpha, &operator, t)?;
        let mut f = jet.caputo.clone();
        f.add_scaled(-1.0, &apply_operator(&operator, &jet.value)?);
        let mut df = jet.caputo_dt.clone();
        df.add_scaled(-1.0, &apply_operator(&operator, &jet.dt)?);
        if !h_inner.is_zero() && t > 0.0 {
            let m = basis.points();
            let mut memory = vec![0.0; m];
            let mut memory_dt = vec![0.0; m];
            let panel = t / MANUFACTURED_PANELS as f64;
            for p in 0..MANUFACTURED_PANELS {
                let a = p as f64 * panel;
                for (s, w) in kronrod_nodes(a, a + panel) {
                    let u = basis.inverse(&traj.value(alpha, &operator, s)?)?;
                    for (k, &val) in u.samples.iter().enumerate() {
                        memory[k] += w * h_inner.eval(t, s, val);
                        memory_dt[k] += w * h_inner.eval_dt(t, s, val);
                    }
                }
            }
            let now = basis.inverse(&jet.value)?;
            for (k, &val) in now.samples.iter().enumerate() {
                memory_dt[k] += h_inner.eval(t, t, val);
            }
            f.add_scaled(-1.0, &basis.forward(&NodalField { samples: memory })?);
            df.add_scaled(-1.0, &basis.forward(&NodalField { samples: memory_dt })?);
        }
        Ok((f, df))
    });
    Ok(ProblemSpec {
        alpha,
        operator,
        x: start.value,
        y: start.dt,
        f: Forcing::Function(forcing),
        h,
        beta: 0.5,
        collocation,
    })
}

/// max_t ‖u(t_i) − u*(t_i)‖_β
pub fn sup_beta_error(
    result: &SolveResult,
    u_star: &ManufacturedTrajectory,
    alpha: f64,
    op: &SpectralOperator,
    beta: f64,
) -> Result<f64, SolverError> {
    let mut worst: f64 = 0.0;
    for (i, u) in result.trajectory.iter().enumerate() {
        let mut d = u.clone();
        d.add_scaled(-1.0, &u_star.value(alpha, op, result.grid.node(i))?);
        worst = worst.max(d.beta_norm(beta));
    }
    Ok(worst)
}
