//! Stationary states `0 = ΔQ + g|Q|^{2σ}Q + μ Q`.
//!
//! Two independent routes are provided: a normalized gradient flow on a
//! bounded domain (the projected scheme run to stationarity), and radial
//! shooting for the free-space profile of `ΔQ - Q + Q^{2σ+1} = 0`. Both are
//! certified by the same residuals.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flow::{evolve, DiagnosticsRecord, FlowConfig, RunResult, Scheme, Termination};
use crate::functionals::{
    abs_pow, criticality, energy, gn_quotient, mass_norm, mu, power_integral, FlowParams,
};
use crate::grid::{apply_laplacian, gradient_sq_norm, DomainSpec, Field, Grid};

/// Certification residuals of a candidate stationary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryResiduals {
    /// `sup |Δ_h Q + g|Q|^{2σ}Q + μ Q|`.
    pub pde_sup: f64,
    /// `|μ‖Q‖² - ‖∇Q‖² + g‖Q‖_{2σ+2}^{2σ+2}|`.
    pub pohozaev1: f64,
    /// `|(d-2)/2 ‖∇Q‖² - μ d/2 ‖Q‖² - d g/(2σ+2) ‖Q‖_{2σ+2}^{2σ+2}|`,
    /// whole-space surrogates only.
    pub pohozaev2: Option<f64>,
    /// `|E[Q] - (dσ-2)/(2dσ) ‖∇Q‖²|`, whole-space surrogates only.
    pub energy_relation: Option<f64>,
}

impl StationaryResiduals {
    /// Largest of the residuals that were computed.
    pub fn max(&self) -> f64 {
        [
            Some(self.pde_sup),
            Some(self.pohozaev1),
            self.pohozaev2,
            self.energy_relation,
        ]
        .into_iter()
        .flatten()
        .fold(0.0, f64::max)
    }
}

/// Residuals with the multiplier taken from `μ[Q]`. With that choice
/// `pohozaev1` vanishes identically; it is still reported as a consistency
/// check of the functionals.
pub fn pohozaev_residuals(q: &Field, params: &FlowParams) -> Result<StationaryResiduals> {
    let m = mu(q, params)?;
    residuals_with_multiplier(q, params, m)
}

/// Residuals for a prescribed multiplier (e.g. `μ = -1` for the normalized
/// free-space profile).
pub fn residuals_with_multiplier(
    q: &Field,
    params: &FlowParams,
    multiplier: f64,
) -> Result<StationaryResiduals> {
    if q.is_zero() {
        return Err(Error::DegenerateField);
    }
    let lap = apply_laplacian(q);
    let two_sigma = 2.0 * params.sigma;
    let pde_sup = lap
        .values()
        .iter()
        .zip(q.values())
        .map(|(l, &v)| (l + params.g * abs_pow(v, two_sigma) * v + multiplier * v).abs())
        .fold(0.0, f64::max);

    let grad_sq = gradient_sq_norm(q);
    let mass_sq = q.grid().inner(q.values(), q.values());
    let power = power_integral(q, params.power());
    let pohozaev1 = (multiplier * mass_sq - grad_sq + params.g * power).abs();

    let (pohozaev2, energy_relation) = if q.grid().domain().is_whole_space() {
        let d = params.dim as f64;
        let p2 = ((d - 2.0) / 2.0 * grad_sq
            - multiplier * d / 2.0 * mass_sq
            - d * params.g / params.power() * power)
            .abs();
        let ds = params.dsigma();
        let er = (energy(q, params) - (ds - 2.0) / (2.0 * ds) * grad_sq).abs();
        (Some(p2), Some(er))
    } else {
        (None, None)
    };

    Ok(StationaryResiduals {
        pde_sup,
        pohozaev1,
        pohozaev2,
        energy_relation,
    })
}

/// A certified stationary profile.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub profile: Field,
    /// The Lagrange multiplier `μ[Q]`.
    pub mu_value: f64,
    pub mass_target: f64,
    pub residuals: StationaryResiduals,
    /// Diagnostics of the flow that produced the profile (empty otherwise).
    pub trace: Vec<DiagnosticsRecord>,
}

impl GroundState {
    /// Wrap an externally computed profile, taking `μ` and the mass from it.
    pub fn certify(profile: Field, params: &FlowParams) -> Result<Self> {
        let mu_value = mu(&profile, params)?;
        let residuals = residuals_with_multiplier(&profile, params, mu_value)?;
        Ok(Self {
            mass_target: mass_norm(&profile),
            profile,
            mu_value,
            residuals,
            trace: Vec::new(),
        })
    }
}

fn check_ground_state_regime(params: &FlowParams) -> Result<()> {
    let ok = if params.g <= 0.0 {
        params.sigma < params.energy_critical_sigma()
    } else {
        params.sigma < params.mass_critical_sigma()
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Regime(format!(
            "ground-state convergence needs g <= 0 with sigma < {} or g > 0 with sigma < {} \
             (got g = {}, sigma = {})",
            params.energy_critical_sigma(),
            params.mass_critical_sigma(),
            params.g,
            params.sigma
        )))
    }
}

/// The default positive seed: the first discrete Dirichlet eigenfunction
/// scaled to `mass`.
pub fn default_seed(grid: &Arc<Grid>, mass: f64) -> Field {
    let (_, phi) = grid.first_eigenpair();
    Field::new(Arc::clone(grid), phi.iter().map(|v| v * mass).collect())
        .expect("eigenvector is finite")
}

/// Ground state of mass `mass_target` on `domain` by the projected flow from
/// the default seed.
pub fn ground_state_flow(
    domain: DomainSpec,
    grid_n: usize,
    params: &FlowParams,
    mass_target: f64,
    numerics: &FlowConfig,
) -> Result<GroundState> {
    let grid = Grid::new(domain, grid_n)?;
    let seed = default_seed(&grid, mass_target);
    ground_state_from_seed(&seed, params, mass_target, numerics)
}

/// Ground state from a caller-supplied nonnegative seed. The seed is first
/// rescaled to `mass_target`; `numerics.scheme` is overridden with the
/// projected scheme.
pub fn ground_state_from_seed(
    seed: &Field,
    params: &FlowParams,
    mass_target: f64,
    numerics: &FlowConfig,
) -> Result<GroundState> {
    if !(mass_target.is_finite() && mass_target > 0.0) {
        return Err(Error::param("mass", format!("must be positive, got {mass_target}")));
    }
    check_ground_state_regime(params)?;
    if seed.values().iter().any(|&v| v < 0.0) {
        return Err(Error::param("seed", "must be nonnegative"));
    }
    let m = mass_norm(seed);
    if m == 0.0 {
        return Err(Error::DegenerateField);
    }
    let u0 = seed.scaled(mass_target / m);
    let cfg = FlowConfig {
        scheme: Scheme::ProjectedSemiImplicit,
        ..*numerics
    };
    let run = evolve(&u0, params, &cfg)?;
    if run.termination != Termination::Stationary {
        let last = *run.last();
        return Err(Error::NotConverged {
            iterations: last.step,
            residual: last.step_residual,
            trace: Some(Box::new(run)),
        });
    }
    let RunResult { final_field, trace, .. } = run;
    let mu_value = mu(&final_field, params)?;
    let residuals = residuals_with_multiplier(&final_field, params, mu_value)?;
    Ok(GroundState {
        profile: final_field,
        mu_value,
        mass_target,
        residuals,
        trace,
    })
}

/// Numerics of the radial shooting solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    pub r_max: f64,
    /// `(lo, hi)` amplitudes: `lo` must turn back up before reaching zero,
    /// `hi` must cross zero.
    pub bracket: (f64, f64),
    /// Bisection stops when the bracket is narrower than this.
    pub tol: f64,
    /// Interior nodes of the grid the profile is sampled onto.
    pub grid_n: usize,
    pub ode_steps: usize,
}

impl ShootingConfig {
    pub fn new(r_max: f64, bracket: (f64, f64)) -> Self {
        Self {
            r_max,
            bracket,
            tol: 1e-14,
            grid_n: 4095,
            ode_steps: 100_000,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_grid_n(mut self, n: usize) -> Self {
        self.grid_n = n;
        self
    }
}

/// Free-space profile sampled onto a whole-space surrogate grid.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub field: Field,
    /// `Q(0)` found by bisection.
    pub amplitude: f64,
    pub bisections: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shot {
    /// `Q'` turned positive while `Q > 0`: amplitude too small.
    Undershoot(f64),
    /// `Q` crossed zero: amplitude too large.
    Overshoot(f64),
    /// Neither happened before `r_max`.
    Unresolved,
}

struct Trajectory {
    h: f64,
    q: Vec<f64>,
    dq: Vec<f64>,
}

// Q'' = -(d-1)/r Q' + Q - |Q|^{2σ} Q
#[inline]
fn radial_rhs(r: f64, q: f64, p: f64, dm1: f64, two_sigma: f64) -> (f64, f64) {
    (p, -dm1 / r * p + q - abs_pow(q, two_sigma) * q)
}

fn shoot(amplitude: f64, sigma: f64, dim: usize, cfg: &ShootingConfig, keep: bool) -> (Shot, Option<Trajectory>) {
    let steps = cfg.ode_steps;
    let h = cfg.r_max / steps as f64;
    let d = dim as f64;
    let dm1 = d - 1.0;
    let two_sigma = 2.0 * sigma;

    // series start: Q(r) ≈ Q(0) + r²/(2d) (Q(0) - Q(0)^{2σ+1})
    let curvature = (amplitude - abs_pow(amplitude, two_sigma) * amplitude) / d;
    let mut q = amplitude + 0.5 * h * h * curvature;
    let mut p = h * curvature;
    let mut r = h;

    let mut traj = keep.then(|| {
        let mut t = Trajectory {
            h,
            q: Vec::with_capacity(steps + 1),
            dq: Vec::with_capacity(steps + 1),
        };
        t.q.push(amplitude);
        t.dq.push(0.0);
        t.q.push(q);
        t.dq.push(p);
        t
    });

    let classify = |q: f64, p: f64, r: f64| {
        if q < 0.0 {
            Some(Shot::Overshoot(r))
        } else if p > 0.0 {
            Some(Shot::Undershoot(r))
        } else {
            None
        }
    };
    if let Some(s) = classify(q, p, r) {
        return (s, traj);
    }

    for _ in 1..steps {
        let (k1q, k1p) = radial_rhs(r, q, p, dm1, two_sigma);
        let (k2q, k2p) = radial_rhs(r + 0.5 * h, q + 0.5 * h * k1q, p + 0.5 * h * k1p, dm1, two_sigma);
        let (k3q, k3p) = radial_rhs(r + 0.5 * h, q + 0.5 * h * k2q, p + 0.5 * h * k2p, dm1, two_sigma);
        let (k4q, k4p) = radial_rhs(r + h, q + h * k3q, p + h * k3p, dm1, two_sigma);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        r += h;
        if !(q.is_finite() && p.is_finite()) {
            return (Shot::Overshoot(r), traj);
        }
        if let Some(t) = traj.as_mut() {
            t.q.push(q);
            t.dq.push(p);
        }
        if let Some(s) = classify(q, p, r) {
            return (s, traj);
        }
    }
    (Shot::Unresolved, traj)
}

impl Trajectory {
    // cubic Hermite interpolation from the stored (Q, Q') pairs
    fn eval(&self, r: f64) -> f64 {
        let last = self.q.len() - 1;
        let s = r / self.h;
        let i = (s.floor() as usize).min(last.saturating_sub(1));
        if i >= last {
            return self.q[last];
        }
        let t = s - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.q[i] + h10 * self.h * self.dq[i] + h01 * self.q[i + 1] + h11 * self.h * self.dq[i + 1]
    }
}

/// Positive decaying solution of `Q'' + (d-1)/r Q' - Q + Q^{2σ+1} = 0`,
/// `Q'(0) = 0`, found by bisection on `Q(0)` and sampled onto a
/// `TruncatedLine(r_max)` (d = 1) or whole-space `Ball(r_max, d)` grid.
pub fn shoot_radial(params: &FlowParams, cfg: &ShootingConfig) -> Result<RadialProfile> {
    if !(cfg.r_max.is_finite() && cfg.r_max > 0.0) {
        return Err(Error::param("r_max", "must be positive"));
    }
    if !(cfg.tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    if cfg.ode_steps < 10 {
        return Err(Error::param("ode_steps", "must be at least 10"));
    }
    let (sigma, dim) = (params.sigma, params.dim);
    let (mut lo, mut hi) = cfg.bracket;
    if !(lo < hi) {
        return Err(Error::BadBracket {
            lo,
            hi,
            detail: "lower end must be below upper end".into(),
        });
    }
    match shoot(lo, sigma, dim, cfg, false).0 {
        Shot::Undershoot(_) => {}
        other => {
            return Err(Error::BadBracket {
                lo,
                hi,
                detail: format!("lower amplitude gives {other:?}, expected an undershoot"),
            })
        }
    }
    match shoot(hi, sigma, dim, cfg, false).0 {
        Shot::Overshoot(_) => {}
        other => {
            return Err(Error::BadBracket {
                lo,
                hi,
                detail: format!("upper amplitude gives {other:?}, expected a zero crossing"),
            })
        }
    }

    let mut bisections = 0;
    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        bisections += 1;
        match shoot(mid, sigma, dim, cfg, false).0 {
            Shot::Undershoot(_) => lo = mid,
            Shot::Overshoot(_) => hi = mid,
            Shot::Unresolved => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let amplitude = 0.5 * (lo + hi);
    let (outcome, traj) = shoot(amplitude, sigma, dim, cfg, true);
    let mut traj = traj.expect("trajectory kept");

    // Beyond a departure point the trajectory is no longer the decaying
    // branch; it is cut to zero provided the profile is already negligible.
    let tail_limit = 1e-6 * amplitude;
    let tail = match outcome {
        Shot::Unresolved => traj.q.last().copied().unwrap_or(0.0).abs(),
        Shot::Undershoot(r) | Shot::Overshoot(r) => {
            let idx = ((r / traj.h).round() as usize).min(traj.q.len() - 1);
            let at = traj.q[..=idx].iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
            for k in idx..traj.q.len() {
                traj.q[k] = 0.0;
                traj.dq[k] = 0.0;
            }
            traj.q.resize(cfg.ode_steps + 1, 0.0);
            traj.dq.resize(cfg.ode_steps + 1, 0.0);
            at
        }
    };
    if tail >= tail_limit {
        let guidance = match outcome {
            Shot::Unresolved => "increase r_max so the profile decays below the tail limit",
            _ => "tighten the bisection tolerance or reduce r_max",
        };
        return Err(Error::TailNotResolved {
            ratio: tail / amplitude,
            r_max: cfg.r_max,
            guidance: guidance.into(),
        });
    }

    let domain = if dim == 1 {
        DomainSpec::truncated_line(cfg.r_max)?
    } else {
        DomainSpec::ball_whole_space(cfg.r_max, dim)?
    };
    let grid = Grid::new(domain, cfg.grid_n)?;
    let field = Field::from_fn(grid, |x| traj.eval(x.abs()))?;
    Ok(RadialProfile {
        field,
        amplitude,
        bisections,
    })
}

/// Gagliardo–Nirenberg constant evaluated two ways on the shot profile.
#[derive(Debug, Clone)]
pub struct GnConstant {
    /// `W(Q)`.
    pub from_quotient: f64,
    /// `(2σ+2)/(dσ) · (‖∇Q‖ ‖Q‖^α)^{2-dσ}`, which follows from the Pohozaev
    /// identities.
    pub from_pohozaev: f64,
    pub profile: RadialProfile,
}

impl GnConstant {
    pub fn relative_gap(&self) -> f64 {
        (self.from_quotient - self.from_pohozaev).abs() / self.from_quotient.abs()
    }

    pub fn value(&self) -> f64 {
        self.from_quotient
    }
}

/// Require `2/d < σ < 2/(d-2)^+`, the range of the whole-space well.
pub fn check_k_regime(params: &FlowParams) -> Result<f64> {
    let report = criticality(params);
    match (report.regime, report.alpha) {
        (crate::functionals::Regime::SupercriticalSubenergy, Some(alpha)) => Ok(alpha),
        _ => Err(Error::Regime(format!(
            "need {} < sigma < {} in d = {}, got sigma = {}",
            report.sigma_mass_critical, report.sigma_energy_critical, params.dim, params.sigma
        ))),
    }
}

pub fn gn_constant(params: &FlowParams, cfg: &ShootingConfig) -> Result<GnConstant> {
    check_k_regime(params)?;
    gn_from_profile(shoot_radial(params, cfg)?, params)
}

/// Both evaluations of the constant on an already computed profile.
pub fn gn_from_profile(profile: RadialProfile, params: &FlowParams) -> Result<GnConstant> {
    let alpha = check_k_regime(params)?;
    let q = &profile.field;
    let normalized = params.normalized();
    let from_quotient = gn_quotient(q, &normalized)?;
    let x = gradient_sq_norm(q).sqrt() * mass_norm(q).powf(alpha);
    let ds = params.dsigma();
    let from_pohozaev = params.power() / ds * x.powf(2.0 - ds);
    Ok(GnConstant {
        from_quotient,
        from_pohozaev,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn soliton_residuals() {
        let grid = Grid::new(DomainSpec::truncated_line(20.0).unwrap(), 4095).unwrap();
        let q = Field::from_fn(grid, |x| 2f64.sqrt() / x.cosh()).unwrap();
        let p = FlowParams::new(1.0, 1.0, 1).unwrap();
        let r = pohozaev_residuals(&q, &p).unwrap();
        assert!(r.pohozaev1 <= 1e-12);
        assert!(r.energy_relation.unwrap() <= 1e-4);
        assert!(r.pohozaev2.unwrap() <= 1e-4);
        let fixed = residuals_with_multiplier(&q, &p, -1.0).unwrap();
        assert!(fixed.pohozaev1 <= 1e-4);
        assert!(fixed.pde_sup <= 1e-4);
    }

    #[test]
    fn pohozaev1_is_definitional() {
        let grid = Grid::new(DomainSpec::interval(3.0).unwrap(), 50).unwrap();
        let u = Field::from_fn(grid, |x| x * (3.0 - x) * (1.0 + x.sin())).unwrap();
        let p = FlowParams::new(0.7, 1.5, 1).unwrap();
        let r = pohozaev_residuals(&u, &p).unwrap();
        assert!(r.pohozaev1 <= 1e-12 * (1.0 + gradient_sq_norm(&u)));
        assert!(r.pohozaev2.is_none() && r.energy_relation.is_none());
        assert!(r.pde_sup > 1e-3);
        assert!(pohozaev_residuals(&u.scaled(0.0), &p).is_err());
    }

    #[test]
    fn linear_ground_state_is_sine() {
        let p = FlowParams::new(0.0, 1.0, 1).unwrap();
        let cfg = FlowConfig::new(0.05, 200.0, Scheme::ProjectedSemiImplicit).with_stationarity_tol(1e-12);
        let gs = ground_state_flow(DomainSpec::interval(PI).unwrap(), 511, &p, 1.0, &cfg).unwrap();
        let grid = gs.profile.grid().clone();
        let lam = grid.line_mode_eigenvalue(1).unwrap();
        assert!((gs.mu_value - lam).abs() < 1e-10);
        let dev = gs
            .profile
            .values()
            .iter()
            .zip(grid.nodes())
            .map(|(v, x)| (v - (2.0 / PI).sqrt() * x.sin()).abs())
            .fold(0.0, f64::max);
        assert!(dev <= 1e-6, "dev {dev}");
    }

    #[test]
    fn ground_state_regime_checked() {
        let p = FlowParams::new(1.0, 1.0, 3).unwrap();
        let cfg = FlowConfig::new(0.05, 10.0, Scheme::ProjectedSemiImplicit);
        let err = ground_state_flow(DomainSpec::ball(1.0, 3).unwrap(), 50, &p, 1.0, &cfg);
        assert!(matches!(err, Err(Error::Regime(_))));
    }

    #[test]
    fn not_converged_carries_trace() {
        let p = FlowParams::new(1.0, 1.0, 1).unwrap();
        let cfg = FlowConfig::new(0.01, 0.05, Scheme::ProjectedSemiImplicit);
        match ground_state_flow(DomainSpec::interval(PI).unwrap(), 63, &p, 1.0, &cfg) {
            Err(Error::NotConverged { trace: Some(t), .. }) => assert!(!t.trace.is_empty()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn shooting_cubic_line() {
        let p = FlowParams::new(1.0, 1.0, 1).unwrap();
        let prof = shoot_radial(&p, &ShootingConfig::new(20.0, (1.1, 3.0))).unwrap();
        assert!((prof.amplitude - 2f64.sqrt()).abs() < 1e-6);
        let err = prof
            .field
            .values()
            .iter()
            .zip(prof.field.grid().nodes())
            .map(|(v, x)| (v - 2f64.sqrt() / x.cosh()).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-5, "err {err}");
    }

    #[test]
    fn shooting_bad_bracket() {
        let p = FlowParams::new(1.0, 1.0, 1).unwrap();
        let e = shoot_radial(&p, &ShootingConfig::new(20.0, (1.5, 3.0)));
        assert!(matches!(e, Err(Error::BadBracket { .. })));
        let e = shoot_radial(&p, &ShootingConfig::new(20.0, (1.1, 1.2)));
        assert!(matches!(e, Err(Error::BadBracket { .. })));
    }

    #[test]
    fn loose_tolerance_leaves_unresolved_tail() {
        let p = FlowParams::new(1.0, 1.0, 1).unwrap();
        let e = shoot_radial(&p, &ShootingConfig::new(20.0, (1.1, 3.0)).with_tol(1e-3));
        assert!(matches!(e, Err(Error::TailNotResolved { .. })), "{e:?}");
    }

    #[test]
    fn shooting_is_deterministic() {
        let p = FlowParams::new(1.0, 1.0, 3).unwrap();
        let cfg = ShootingConfig::new(16.0, (1.1, 8.0)).with_grid_n(800);
        let a = shoot_radial(&p, &cfg).unwrap();
        let b = shoot_radial(&p, &cfg).unwrap();
        assert_eq!(a.amplitude.to_bits(), b.amplitude.to_bits());
        assert!(a
            .field
            .values()
            .iter()
            .zip(b.field.values())
            .all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn gn_regime() {
        let p = FlowParams::new(1.0, 1.0, 1).unwrap();
        let cfg = ShootingConfig::new(20.0, (1.1, 3.0));
        assert!(matches!(gn_constant(&p, &cfg), Err(Error::Regime(_))));
    }
}
