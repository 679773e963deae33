//! Time integration of the mass-preserving flow
//! `∂t u = Δu + g|u|^{2σ}u + μ[u]u` and its fixed-normalization variant.
//!
//! Every scheme treats diffusion implicitly and the nonlinearity and the
//! multiplier explicitly, so a step costs one tridiagonal solve:
//!
//! ```text
//! (I - dt Δ_h) u^{n+1} = u^n + dt (g|u^n|^{2σ} u^n + m(u^n) u^n)
//! ```
//!
//! where `m` is `μ[u]` or `μ_α[u]`. The projected variant additionally
//! rescales each iterate back to the initial L² norm.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::functionals::{abs_pow, FlowParams, Snapshot};
use crate::grid::{Field, Grid, ImplicitDiffusion};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// The multiplier `μ[u^n]` evaluated explicitly.
    MultiplierSemiImplicit,
    /// Multiplier step followed by rescaling to the initial mass.
    ProjectedSemiImplicit,
    /// `μ_α[u^n] = I[u^n]/α` in place of `μ[u^n]`, no rescaling.
    MuAlphaSemiImplicit { alpha: f64 },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::MultiplierSemiImplicit => "multiplier",
            Scheme::ProjectedSemiImplicit => "projected",
            Scheme::MuAlphaSemiImplicit { .. } => "mu_alpha",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Stop once `‖u^{n+1} - u^n‖/dt` falls below this; 0 disables the check.
    pub stationarity_tol: f64,
    /// Stop once `‖∇u‖` exceeds this multiple of its initial value.
    pub growup_factor: f64,
    pub max_steps: usize,
    pub snapshot_every: usize,
}

impl FlowConfig {
    pub fn new(dt: f64, t_final: f64, scheme: Scheme) -> Self {
        Self {
            dt,
            t_final,
            scheme,
            stationarity_tol: 1e-10,
            growup_factor: 100.0,
            max_steps: usize::MAX,
            snapshot_every: 1,
        }
    }

    pub fn with_stationarity_tol(mut self, tol: f64) -> Self {
        self.stationarity_tol = tol;
        self
    }

    pub fn with_growup_factor(mut self, factor: f64) -> Self {
        self.growup_factor = factor;
        self
    }

    pub fn with_max_steps(mut self, steps: usize) -> Self {
        self.max_steps = steps;
        self
    }

    pub fn with_snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final > self.dt) {
            return Err(Error::param(
                "t_final",
                format!("must exceed dt, got {} (dt = {})", self.t_final, self.dt),
            ));
        }
        if !(self.stationarity_tol >= 0.0) {
            return Err(Error::param("stationarity_tol", "must be nonnegative"));
        }
        if !(self.growup_factor > 1.0) {
            return Err(Error::param("growup_factor", "must exceed 1"));
        }
        if self.max_steps == 0 {
            return Err(Error::param("max_steps", "must be positive"));
        }
        if self.snapshot_every == 0 {
            return Err(Error::param("snapshot_every", "must be positive"));
        }
        if let Scheme::MuAlphaSemiImplicit { alpha } = self.scheme {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
            }
        }
        Ok(())
    }

    /// Number of steps to the horizon, capped by `max_steps`.
    pub fn step_count(&self) -> usize {
        ((self.t_final / self.dt).round() as usize).clamp(1, self.max_steps)
    }
}

/// Scalar diagnostics at one time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub step: usize,
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub mu: f64,
    pub grad_l2: f64,
    pub nehari: f64,
    pub linf: f64,
    /// `‖u^n - u^{n-1}‖/dt` of the step that produced this level (0 at t = 0).
    pub step_residual: f64,
}

impl DiagnosticsRecord {
    fn from_snapshot(step: usize, t: f64, s: &Snapshot, params: &FlowParams, residual: f64) -> Self {
        let nehari = s.nehari(params);
        Self {
            step,
            t,
            mass: s.mass_sq.sqrt(),
            energy: s.energy(params),
            mu: nehari / s.mass_sq,
            grad_l2: s.grad_sq.sqrt(),
            nehari,
            linf: s.linf,
            step_residual: residual,
        }
    }

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.mass,
            self.energy,
            self.mu,
            self.grad_l2,
            self.nehari,
            self.linf,
            self.step_residual,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    HorizonReached,
    Stationary,
    GrowUpTriggered,
    Diverged,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::HorizonReached => "HorizonReached",
            Termination::Stationary => "Stationary",
            Termination::GrowUpTriggered => "GrowUpTriggered",
            Termination::Diverged => "Diverged",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_field: Field,
    pub trace: Vec<DiagnosticsRecord>,
    pub termination: Termination,
    pub scheme: Scheme,
    pub dt: f64,
}

impl RunResult {
    pub fn last(&self) -> &DiagnosticsRecord {
        self.trace.last().expect("trace is never empty")
    }

    pub fn first(&self) -> &DiagnosticsRecord {
        &self.trace[0]
    }

    /// `max_t |‖u(t)‖ - ‖u(0)‖|` over the recorded levels.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.first().mass;
        self.trace
            .iter()
            .map(|r| (r.mass - m0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest energy increase between consecutive records.
    pub fn max_energy_increase(&self) -> f64 {
        self.trace
            .windows(2)
            .map(|w| w[1].energy - w[0].energy)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Reusable stepping state for a fixed grid, step size and scheme.
#[derive(Debug, Clone)]
pub struct Stepper {
    grid: Arc<Grid>,
    params: FlowParams,
    scheme: Scheme,
    dt: f64,
    op: ImplicitDiffusion,
    target_mass: f64,
}

impl Stepper {
    /// `target_mass` is the L² norm the projected scheme rescales to.
    pub fn new(
        grid: Arc<Grid>,
        params: FlowParams,
        scheme: Scheme,
        dt: f64,
        target_mass: f64,
    ) -> Result<Self> {
        let op = grid.implicit_operator(dt)?;
        Ok(Self {
            grid,
            params,
            scheme,
            dt,
            op,
            target_mass,
        })
    }

    /// One step from `u` into `out`.
    pub fn advance(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        let grid = &self.grid;
        let snap = Snapshot::of_values(grid, u, &self.params);
        let multiplier = match self.scheme {
            Scheme::MultiplierSemiImplicit | Scheme::ProjectedSemiImplicit => {
                if snap.mass_sq == 0.0 {
                    return Err(Error::DegenerateField);
                }
                snap.nehari(&self.params) / snap.mass_sq
            }
            Scheme::MuAlphaSemiImplicit { alpha } => snap.nehari(&self.params) / alpha,
        };
        let g = self.params.g;
        let two_sigma = 2.0 * self.params.sigma;
        let dt = self.dt;
        for (o, &v) in out.iter_mut().zip(u) {
            *o = v + dt * (g * abs_pow(v, two_sigma) * v + multiplier * v);
        }
        self.op.solve_in_place(out);
        if self.scheme == Scheme::ProjectedSemiImplicit {
            let m = grid.inner(out, out).sqrt();
            if m == 0.0 || !m.is_finite() {
                return Err(Error::Diverged("projection of a degenerate iterate".into()));
            }
            let c = self.target_mass / m;
            out.iter_mut().for_each(|x| *x *= c);
        }
        Ok(())
    }
}

/// A single step of `config.scheme` from `u`. The projected scheme
/// rescales to `‖u‖`.
pub fn step(u: &Field, params: &FlowParams, config: &FlowConfig) -> Result<Field> {
    if !(config.dt.is_finite() && config.dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let m0 = crate::functionals::mass_norm(u);
    let stepper = Stepper::new(Arc::clone(u.grid()), *params, config.scheme, config.dt, m0)?;
    let mut out = vec![0.0; u.values().len()];
    stepper.advance(u.values(), &mut out)?;
    Field::new(Arc::clone(u.grid()), out)
}

fn l2_diff(grid: &Grid, a: &[f64], b: &[f64]) -> f64 {
    grid.weights()
        .iter()
        .zip(a.iter().zip(b))
        .map(|(w, (x, y))| w * (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Integrate from `u0` until the horizon or one of the monitors fires.
pub fn evolve(u0: &Field, params: &FlowParams, config: &FlowConfig) -> Result<RunResult> {
    config.validate()?;
    if u0.is_zero() {
        return Err(Error::DegenerateField);
    }
    let grid = Arc::clone(u0.grid());
    let m0 = crate::functionals::mass_norm(u0);
    let stepper = Stepper::new(Arc::clone(&grid), *params, config.scheme, config.dt, m0)?;

    let snap0 = Snapshot::of(u0, params);
    let rec0 = DiagnosticsRecord::from_snapshot(0, 0.0, &snap0, params, 0.0);
    if !rec0.is_finite() {
        return Err(Error::Diverged("initial diagnostics are not finite".into()));
    }
    let grad0 = rec0.grad_l2;
    let mut trace = vec![rec0];

    let mut u = u0.values().to_vec();
    let mut next = vec![0.0; u.len()];
    let total = config.step_count();
    let mut termination = Termination::HorizonReached;

    for k in 1..=total {
        stepper.advance(&u, &mut next)?;
        if next.iter().any(|v| !v.is_finite()) {
            termination = Termination::Diverged;
            break;
        }
        let residual = l2_diff(&grid, &next, &u) / config.dt;
        let snap = Snapshot::of_values(&grid, &next, params);
        let rec = DiagnosticsRecord::from_snapshot(k, k as f64 * config.dt, &snap, params, residual);
        if !rec.is_finite() {
            termination = Termination::Diverged;
            break;
        }
        std::mem::swap(&mut u, &mut next);

        let stop = if residual < config.stationarity_tol {
            Some(Termination::Stationary)
        } else if rec.grad_l2 > config.growup_factor * grad0 {
            Some(Termination::GrowUpTriggered)
        } else if k == total {
            Some(Termination::HorizonReached)
        } else {
            None
        };
        if stop.is_some() || k % config.snapshot_every == 0 {
            trace.push(rec);
        }
        if let Some(t) = stop {
            termination = t;
            break;
        }
    }

    Ok(RunResult {
        final_field: Field::new(grid, u)?,
        trace,
        termination,
        scheme: config.scheme,
        dt: config.dt,
    })
}

/// Evolve several initial data with the same physics and numerics.
pub fn evolve_batch(
    initial: &[Field],
    params: &FlowParams,
    config: &FlowConfig,
    exec: Execution,
) -> Vec<Result<RunResult>> {
    exec.map(initial, |u0| evolve(u0, params, config))
}

fn require_dense(trace: &[DiagnosticsRecord]) -> Result<()> {
    if trace.len() < 2 {
        return Err(Error::SparseTrace("need at least two records".into()));
    }
    if let Some(w) = trace.windows(2).find(|w| w[1].step != w[0].step + 1) {
        return Err(Error::SparseTrace(format!(
            "records at steps {} and {} are not consecutive; use snapshot_every = 1",
            w[0].step, w[1].step
        )));
    }
    Ok(())
}

/// Discrete energy-dissipation defect
/// `max_k |E(t_k) - E(0) + Σ_{j<=k} Δt_j ‖(u^j - u^{j-1})/Δt_j‖²|`.
pub fn check_dissipation(trace: &[DiagnosticsRecord], u0_energy: f64) -> Result<f64> {
    require_dense(trace)?;
    let mut dissipated = 0.0;
    let mut worst = (trace[0].energy - u0_energy).abs();
    for w in trace.windows(2) {
        let dt = w[1].t - w[0].t;
        dissipated += dt * w[1].step_residual * w[1].step_residual;
        worst = worst.max((w[1].energy - u0_energy + dissipated).abs());
    }
    Ok(worst)
}

/// Defect of the mass formula of the fixed-normalization flow,
/// `‖u(t)‖² = (‖u(0)‖² - α) exp((2/α) ∫ I[u(s)] ds) + α`, with the time
/// integral taken as a left-endpoint sum over the trace.
pub fn mass_formula_check(run: &RunResult) -> Result<f64> {
    let alpha = match run.scheme {
        Scheme::MuAlphaSemiImplicit { alpha } => alpha,
        other => {
            return Err(Error::WrongScheme(format!(
                "mass formula applies to the mu_alpha scheme, run used {}",
                other.name()
            )))
        }
    };
    let trace = &run.trace;
    if trace.len() == 1 {
        return Ok(0.0);
    }
    require_dense(trace)?;
    let m0_sq = trace[0].mass * trace[0].mass;
    let mut integral = 0.0;
    let mut worst: f64 = 0.0;
    for w in trace.windows(2) {
        integral += (w[1].t - w[0].t) * w[0].nehari;
        let predicted = (m0_sq - alpha) * (2.0 / alpha * integral).exp() + alpha;
        worst = worst.max((w[1].mass * w[1].mass - predicted).abs());
    }
    Ok(worst)
}
