//! Potential wells.
//!
//! On a bounded domain the well `W = {E < p, I > 0} ∪ {0}` and its exterior
//! `Z = {E < p, I < 0}` are built from the Sobolev constant
//! `Λ = inf ‖∇u‖ / ‖u‖_{2σ+2}` and the depth `p = σ/(2σ+2) Λ^{(2σ+2)/σ}`. On
//! whole-space surrogates the set `K` compares scale-invariant products
//! against a reference ground state.
//!
//! Classification is carried out for `g = 1`. A field for coupling `g > 0` is
//! mapped to `v = g^{1/(2σ)} u`, which multiplies `E`, `I` and `‖∇u‖²` by
//! `g^{1/σ}`; all reported scalars are in that normalized frame.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::flow::RunResult;
use crate::functionals::{abs_pow, criticality, FlowParams, Regime, Snapshot};
use crate::grid::{DomainSpec, Field, Grid};
use crate::stationary::{check_k_regime, GroundState};

/// Default relative width of the Boundary band, `tol·(1+|E|)`.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-8;

/// Numerics of the Sobolev-constant minimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevConfig {
    pub grid_n: usize,
    /// Stop when the Euler–Lagrange residual falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Pseudo-time step in units of `1/λ_1`.
    pub step_factor: f64,
    /// How the coarse and refined solves are scheduled.
    pub exec: Execution,
}

impl SobolevConfig {
    pub fn new(grid_n: usize) -> Self {
        Self {
            grid_n,
            tol: 1e-9,
            max_iter: 200_000,
            step_factor: 10.0,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellConstants {
    /// Λ on the working grid.
    pub lambda: f64,
    /// Well depth from `lambda`.
    pub p: f64,
    pub domain: DomainSpec,
    pub sigma: f64,
    pub grid_n: usize,
    /// Λ on the refined grid.
    pub lambda_refined: f64,
    /// Richardson extrapolation of the two values.
    pub lambda_extrapolated: f64,
    /// Euler–Lagrange residual at the working-grid minimizer.
    pub residual: f64,
    pub iterations: usize,
}

impl WellConstants {
    /// Assemble from a known Λ.
    pub fn from_lambda(lambda: f64, domain: DomainSpec, sigma: f64, grid_n: usize) -> Self {
        Self {
            lambda,
            p: well_depth(lambda, sigma),
            domain,
            sigma,
            grid_n,
            lambda_refined: lambda,
            lambda_extrapolated: lambda,
            residual: 0.0,
            iterations: 0,
        }
    }

    /// `|Λ_refined - Λ_extrapolated|`, a continuum-accuracy estimate.
    pub fn extrapolation_gap(&self) -> f64 {
        (self.lambda_refined - self.lambda_extrapolated).abs()
    }
}

/// `σ/(2σ+2) Λ^{(2σ+2)/σ}`.
pub fn well_depth(lambda: f64, sigma: f64) -> f64 {
    sigma / (2.0 * sigma + 2.0) * lambda.powf((2.0 * sigma + 2.0) / sigma)
}

struct Minimizer {
    lambda: f64,
    residual: f64,
    iterations: usize,
    field: Vec<f64>,
}

fn minimize_quotient(grid: &Grid, q: f64, cfg: &SobolevConfig) -> Result<Minimizer> {
    let (lambda1, seed) = grid.first_eigenpair();
    let tau = cfg.step_factor / lambda1;
    let op = grid.implicit_operator(tau)?;
    let n = grid.len();

    let normalize = |u: &mut Vec<f64>| {
        let s: Vec<f64> = u.iter().map(|v| abs_pow(*v, q)).collect();
        let norm = grid.weighted_sum(&s).powf(1.0 / q);
        u.iter_mut().for_each(|v| *v /= norm);
    };

    let mut u = seed;
    normalize(&mut u);
    let mut lap = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut form = grid.dirichlet_form(&u);
    for it in 0..cfg.max_iter {
        let nonlinear: Vec<f64> = u.iter().map(|v| abs_pow(*v, q - 2.0) * v).collect();
        grid.laplacian_into(&u, &mut lap);
        let r: Vec<f64> = lap
            .iter()
            .zip(&nonlinear)
            .map(|(l, nl)| l + form * nl)
            .collect();
        residual = grid.inner(&r, &r).sqrt();
        if !residual.is_finite() {
            return Err(Error::Diverged("Sobolev minimization produced non-finite values".into()));
        }
        if residual <= cfg.tol * (1.0 + form) {
            return Ok(Minimizer {
                lambda: form.sqrt(),
                residual,
                iterations: it,
                field: u,
            });
        }
        let mut next: Vec<f64> = u
            .iter()
            .zip(&nonlinear)
            .map(|(v, nl)| v + tau * form * nl)
            .collect();
        op.solve_in_place(&mut next);
        normalize(&mut next);
        u = next;
        form = grid.dirichlet_form(&u);
    }
    Err(Error::NotConverged {
        iterations: cfg.max_iter,
        residual,
        trace: None,
    })
}

fn refined_n(domain: &DomainSpec, n: usize) -> usize {
    match domain {
        // interior-node grids halve h with 2n+1 nodes, ball grids with 2n
        DomainSpec::Ball { .. } => 2 * n,
        _ => 2 * n + 1,
    }
}

/// Best Sobolev constant of `H¹₀(Ω) ⊂ L^{2σ+2}` on the discrete space of
/// `cfg.grid_n` nodes, with a refined solve for extrapolation.
pub fn sobolev_constant(domain: DomainSpec, sigma: f64, cfg: &SobolevConfig) -> Result<WellConstants> {
    domain.validate()?;
    if domain.is_whole_space() {
        return Err(Error::Regime(
            "the Sobolev well needs a bounded domain; on whole space p = 0 and W is empty".into(),
        ));
    }
    let params = FlowParams::new(1.0, sigma, domain.dim())?;
    if sigma >= params.energy_critical_sigma() {
        return Err(Error::Regime(format!(
            "need sigma < {} in d = {}",
            params.energy_critical_sigma(),
            params.dim
        )));
    }
    let q = params.power();
    let coarse = Grid::new(domain, cfg.grid_n)?;
    let fine = Grid::new(domain, refined_n(&domain, cfg.grid_n))?;
    let (a, b) = cfg.exec.join(
        || minimize_quotient(&coarse, q, cfg),
        || minimize_quotient(&fine, q, cfg),
    );
    let (a, b) = (a?, b?);
    Ok(WellConstants {
        lambda: a.lambda,
        p: well_depth(a.lambda, sigma),
        domain,
        sigma,
        grid_n: cfg.grid_n,
        lambda_refined: b.lambda,
        lambda_extrapolated: (4.0 * b.lambda - a.lambda) / 3.0,
        residual: a.residual,
        iterations: a.iterations,
    })
}

/// Minimizer of the Sobolev quotient on `grid`, normalized in `L^{2σ+2}`.
pub fn sobolev_minimizer(grid: &Arc<Grid>, sigma: f64, cfg: &SobolevConfig) -> Result<Field> {
    let m = minimize_quotient(grid, 2.0 * sigma + 2.0, cfg)?;
    Field::new(Arc::clone(grid), m.field)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WellLabel {
    W,
    Z,
    /// Within the tolerance band of `I = 0` or `E = p`.
    Boundary,
    /// `E > p`.
    Outside,
}

impl WellLabel {
    pub fn name(&self) -> &'static str {
        match self {
            WellLabel::W => "W",
            WellLabel::Z => "Z",
            WellLabel::Boundary => "Boundary",
            WellLabel::Outside => "Outside",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellClassification {
    pub label: WellLabel,
    pub energy: f64,
    pub nehari: f64,
    /// `min(|E - p|, |I|)`.
    pub margin: f64,
    /// `‖∇u‖ < √(2p)`, which alone implies membership in W.
    pub small: bool,
}

fn classify_scalars(energy: f64, nehari: f64, grad_sq: f64, zero: bool, p: f64, tol: f64) -> WellClassification {
    let margin = (energy - p).abs().min(nehari.abs());
    let band = tol * (1.0 + energy.abs());
    let label = if zero {
        WellLabel::W
    } else if nehari.abs() < band || (energy - p).abs() < band {
        WellLabel::Boundary
    } else if energy < p {
        if nehari > 0.0 {
            WellLabel::W
        } else {
            WellLabel::Z
        }
    } else {
        WellLabel::Outside
    };
    WellClassification {
        label,
        energy,
        nehari,
        margin,
        small: grad_sq < 2.0 * p,
    }
}

fn well_preconditions(domain: &DomainSpec, params: &FlowParams) -> Result<()> {
    if params.g <= 0.0 {
        return Err(Error::Regime(format!("the well needs g > 0, got g = {}", params.g)));
    }
    if domain.is_whole_space() {
        return Err(Error::Regime(
            "p = 0 and W is empty on whole space; use the K classifier".into(),
        ));
    }
    Ok(())
}

/// Factor `g^{1/σ}` relating the scalars of `u` to those of `g^{1/(2σ)} u`.
fn frame_factor(params: &FlowParams) -> f64 {
    params.g.powf(1.0 / params.sigma)
}

/// Label `u` with respect to `W` and `Z`.
pub fn classify_bounded(
    u: &Field,
    params: &FlowParams,
    wc: &WellConstants,
    tol: f64,
) -> Result<WellClassification> {
    well_preconditions(u.grid().domain(), params)?;
    let s = Snapshot::of(u, params);
    let c = frame_factor(params);
    Ok(classify_scalars(
        c * s.energy(params),
        c * s.nehari(params),
        c * s.grad_sq,
        u.is_zero(),
        wc.p,
        tol,
    ))
}

pub fn classify_batch(
    fields: &[Field],
    params: &FlowParams,
    wc: &WellConstants,
    tol: f64,
    exec: Execution,
) -> Vec<Result<WellClassification>> {
    exec.map(fields, |u| classify_bounded(u, params, wc, tol))
}

/// Thresholds of the set `K` taken from a reference ground state of the
/// `g = 1` problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KThresholds {
    /// `E[Q] ‖Q‖^{2α}`.
    pub energy: f64,
    /// `‖∇Q‖² ‖Q‖^{2α}`.
    pub grad: f64,
    pub alpha: f64,
}

impl KThresholds {
    pub fn from_ground_state(qref: &GroundState, params: &FlowParams) -> Result<Self> {
        let alpha = check_k_regime(params)?;
        let norm = params.normalized();
        let s = Snapshot::of(&qref.profile, &norm);
        let weight = s.mass_sq.powf(alpha);
        Ok(Self {
            energy: s.energy(&norm) * weight,
            grad: s.grad_sq * weight,
            alpha,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KClassification {
    pub member: bool,
    /// `E[v] ‖v‖^{2α}`.
    pub energy_product: f64,
    /// `‖∇v‖² ‖v‖^{2α}`.
    pub grad_product: f64,
    pub thresholds: KThresholds,
}

fn k_scalars(energy: f64, grad_sq: f64, mass_sq: f64, params: &FlowParams, th: &KThresholds) -> KClassification {
    let c = frame_factor(params);
    // ‖v‖² = c ‖u‖²
    let weight = (c * mass_sq).powf(th.alpha);
    let energy_product = c * energy * weight;
    let grad_product = c * grad_sq * weight;
    KClassification {
        member: energy_product < th.energy && grad_product < th.grad,
        energy_product,
        grad_product,
        thresholds: *th,
    }
}

pub fn classify_whole_space(u: &Field, params: &FlowParams, qref: &GroundState) -> Result<KClassification> {
    let th = KThresholds::from_ground_state(qref, params)?;
    classify_with_thresholds(u, params, &th)
}

/// As [`classify_whole_space`] with precomputed thresholds.
pub fn classify_with_thresholds(u: &Field, params: &FlowParams, th: &KThresholds) -> Result<KClassification> {
    check_k_regime(params)?;
    if params.g <= 0.0 {
        return Err(Error::Regime(format!("the set K needs g > 0, got g = {}", params.g)));
    }
    let s = Snapshot::of(u, params);
    Ok(k_scalars(s.energy(params), s.grad_sq, s.mass_sq, params, th))
}

/// `f(x) = x²/2 - C_GN/(2σ+2) x^{dσ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KBarrier {
    c_gn: f64,
    power: f64,
    dsigma: f64,
}

impl KBarrier {
    pub fn new(params: &FlowParams, c_gn: f64) -> Result<Self> {
        if params.dsigma() <= 2.0 {
            return Err(Error::Regime(format!("the barrier needs d·sigma > 2, got {}", params.dsigma())));
        }
        if !(c_gn.is_finite() && c_gn > 0.0) {
            return Err(Error::param("c_gn", "must be positive"));
        }
        Ok(Self {
            c_gn,
            power: params.power(),
            dsigma: params.dsigma(),
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        0.5 * x * x - self.c_gn / self.power * x.powf(self.dsigma)
    }

    /// The local maximum `x_1 = ((2σ+2)/(dσ C_GN))^{1/(dσ-2)}`.
    pub fn critical_point(&self) -> f64 {
        (self.power / (self.dsigma * self.c_gn)).powf(1.0 / (self.dsigma - 2.0))
    }
}

pub fn k_barrier(x: f64, params: &FlowParams, c_gn: f64) -> Result<f64> {
    Ok(KBarrier::new(params, c_gn)?.eval(x))
}

/// What to check a run against.
#[derive(Debug, Clone, Copy)]
pub enum Classifier<'a> {
    Bounded { wc: &'a WellConstants, tol: f64 },
    WholeSpace { thresholds: &'a KThresholds },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnapshotLabel {
    Well(WellLabel),
    InK,
    NotInK,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InvarianceReport {
    NotApplicable(String),
    Checked(InvarianceSummary),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceSummary {
    pub labels: Vec<(f64, SnapshotLabel)>,
    pub violations: usize,
    pub first_violation_t: Option<f64>,
    /// Snapshots labelled W where `σ/(2σ+2)‖∇u‖² ≤ E < p` failed.
    pub bound_violations: usize,
}

impl InvarianceReport {
    pub fn summary(&self) -> Option<&InvarianceSummary> {
        match self {
            InvarianceReport::Checked(s) => Some(s),
            InvarianceReport::NotApplicable(_) => None,
        }
    }
}

/// Classify every recorded snapshot of `run` from its trace scalars.
///
/// A violation is a strict label that differs from the initial strict label
/// (W or Z), or leaving `K` after starting in it. Boundary labels are never
/// violations, and runs starting outside both sets are not checked.
pub fn monitor_invariance(run: &RunResult, params: &FlowParams, classifier: Classifier<'_>) -> InvarianceReport {
    if params.g <= 0.0 {
        return InvarianceReport::NotApplicable(format!("wells need g > 0, got g = {}", params.g));
    }
    let whole = run.final_field.grid().domain().is_whole_space();
    let c = frame_factor(params);
    let labels: Vec<(f64, SnapshotLabel, bool)> = match classifier {
        Classifier::Bounded { wc, tol } => {
            if whole {
                return InvarianceReport::NotApplicable("bounded classifier on a whole-space run".into());
            }
            let ratio = params.sigma / params.power();
            run.trace
                .iter()
                .map(|r| {
                    let grad_sq = c * r.grad_l2 * r.grad_l2;
                    let cl = classify_scalars(c * r.energy, c * r.nehari, grad_sq, r.mass == 0.0, wc.p, tol);
                    let slack = 1e-12 * (1.0 + cl.energy.abs());
                    let bound_ok = cl.label != WellLabel::W
                        || (ratio * grad_sq <= cl.energy + slack && cl.energy < wc.p && ratio * grad_sq < wc.p);
                    (r.t, SnapshotLabel::Well(cl.label), bound_ok)
                })
                .collect()
        }
        Classifier::WholeSpace { thresholds } => {
            if !whole {
                return InvarianceReport::NotApplicable("K classifier on a bounded-domain run".into());
            }
            match criticality(params).regime {
                Regime::SupercriticalSubenergy => {}
                _ => return InvarianceReport::NotApplicable("K needs 2/d < sigma < 2/(d-2)^+".into()),
            }
            run.trace
                .iter()
                .map(|r| {
                    let k = k_scalars(r.energy, r.grad_l2 * r.grad_l2, r.mass * r.mass, params, thresholds);
                    let l = if k.member { SnapshotLabel::InK } else { SnapshotLabel::NotInK };
                    (r.t, l, true)
                })
                .collect()
        }
    };

    let reference = labels.first().map(|l| l.1).filter(|l| {
        matches!(
            l,
            SnapshotLabel::Well(WellLabel::W) | SnapshotLabel::Well(WellLabel::Z) | SnapshotLabel::InK
        )
    });
    let mut violations = 0;
    let mut first_violation_t = None;
    if let Some(start) = reference {
        for &(t, l, _) in &labels {
            let broken = match (start, l) {
                (_, SnapshotLabel::Well(WellLabel::Boundary)) => false,
                (SnapshotLabel::InK, l) => l != SnapshotLabel::InK,
                (s, l) => s != l,
            };
            if broken {
                violations += 1;
                first_violation_t.get_or_insert(t);
            }
        }
    }
    let bound_violations = labels.iter().filter(|l| !l.2).count();
    InvarianceReport::Checked(InvarianceSummary {
        labels: labels.into_iter().map(|(t, l, _)| (t, l)).collect(),
        violations,
        first_violation_t,
        bound_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{evolve, FlowConfig, Scheme};
    use std::f64::consts::PI;

    fn interval_constants(n: usize) -> WellConstants {
        sobolev_constant(DomainSpec::interval(PI).unwrap(), 1.0, &SobolevConfig::new(n)).unwrap()
    }

    #[test]
    fn sobolev_interval_bound_and_depth() {
        let wc = interval_constants(255);
        let bound = (PI / 2.0).sqrt() / (3.0 * PI / 8.0).powf(0.25);
        assert!(wc.lambda <= bound + 1e-4, "{} vs {bound}", wc.lambda);
        assert!(wc.lambda < bound - 1e-3);
        assert_eq!(wc.p, well_depth(wc.lambda, 1.0));
        assert!((wc.lambda - wc.lambda_refined).abs() < 1e-4);
        assert!(wc.extrapolation_gap() < 1e-5);
    }

    #[test]
    fn sobolev_monotone_in_domain() {
        let cfg = SobolevConfig::new(200);
        let small = sobolev_constant(DomainSpec::interval(PI).unwrap(), 1.0, &cfg).unwrap();
        let large = sobolev_constant(DomainSpec::interval(2.0 * PI).unwrap(), 1.0, &cfg).unwrap();
        assert!(large.lambda_extrapolated < small.lambda_extrapolated);
    }

    #[test]
    fn sobolev_preconditions() {
        let cfg = SobolevConfig::new(50);
        assert!(sobolev_constant(DomainSpec::interval(1.0).unwrap(), 0.0, &cfg).is_err());
        assert!(sobolev_constant(DomainSpec::truncated_line(5.0).unwrap(), 1.0, &cfg).is_err());
        assert!(sobolev_constant(DomainSpec::ball(1.0, 3).unwrap(), 2.5, &cfg).is_err());
    }

    #[test]
    fn sobolev_ball() {
        let cfg = SobolevConfig::new(200);
        let wc = sobolev_constant(DomainSpec::ball(1.0, 3).unwrap(), 1.0, &cfg).unwrap();
        let grid = Grid::new(DomainSpec::ball(1.0, 3).unwrap(), 200).unwrap();
        let trial = Field::from_fn(grid, |r| 1.0 - r * r).unwrap();
        let quotient = crate::grid::gradient_sq_norm(&trial).sqrt() / crate::functionals::lp_norm(&trial, 4.0).unwrap();
        assert!(wc.lambda <= quotient);
    }

    #[test]
    fn labels() {
        let wc = interval_constants(127);
        let grid = Grid::new(DomainSpec::interval(PI).unwrap(), 127).unwrap();
        let p = FlowParams::new(1.0, 1.0, 1).unwrap();
        let zero = Field::zeros(grid.clone());
        assert_eq!(classify_bounded(&zero, &p, &wc, DEFAULT_CLASSIFY_TOL).unwrap().label, WellLabel::W);

        let small = Field::from_fn(grid.clone(), |x| 0.1 * x.sin()).unwrap();
        let c = classify_bounded(&small, &p, &wc, DEFAULT_CLASSIFY_TOL).unwrap();
        assert!(c.small);
        assert_eq!(c.label, WellLabel::W);

        let big = Field::from_fn(grid.clone(), |x| 10.0 * x.sin()).unwrap();
        let c = classify_bounded(&big, &p, &wc, DEFAULT_CLASSIFY_TOL).unwrap();
        assert!(c.energy <= 0.0);
        assert_eq!(c.label, WellLabel::Z);

        // on the ray through the minimizer, I = 0 exactly where E = p
        let m = sobolev_minimizer(&grid, 1.0, &SobolevConfig::new(127)).unwrap();
        let on_nehari = m.scaled(wc.lambda);
        let c = classify_bounded(&on_nehari, &p, &wc, 1e-6).unwrap();
        assert_eq!(c.label, WellLabel::Boundary);
        let out = m.scaled(wc.lambda * 0.99);
        let c = classify_bounded(&out, &p, &wc, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(c.label, WellLabel::W);

        let defocusing = FlowParams::new(-1.0, 1.0, 1).unwrap();
        assert!(classify_bounded(&small, &defocusing, &wc, DEFAULT_CLASSIFY_TOL).is_err());
    }

    #[test]
    fn coupling_rescaling() {
        let wc = interval_constants(127);
        let grid = Grid::new(DomainSpec::interval(PI).unwrap(), 127).unwrap();
        let g = 4.0;
        let pg = FlowParams::new(g, 1.0, 1).unwrap();
        let p1 = FlowParams::new(1.0, 1.0, 1).unwrap();
        let u = Field::from_fn(grid, |x| 1.3 * x.sin()).unwrap();
        let v = u.scaled(g.powf(0.5));
        let a = classify_bounded(&u, &pg, &wc, DEFAULT_CLASSIFY_TOL).unwrap();
        let b = classify_bounded(&v, &p1, &wc, DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(a.label, b.label);
        assert!((a.energy - b.energy).abs() < 1e-12 * (1.0 + b.energy.abs()));
    }

    #[test]
    fn barrier_shape() {
        let p = FlowParams::new(1.0, 3.0, 1).unwrap();
        let b = KBarrier::new(&p, 0.7).unwrap();
        assert_eq!(b.eval(0.0), 0.0);
        let x1 = b.critical_point();
        let h = 1e-5 * x1;
        let slope = (b.eval(x1 + h) - b.eval(x1 - h)) / (2.0 * h);
        assert!(slope.abs() < 1e-8);
        let xs: Vec<f64> = (1..=200).map(|k| k as f64 / 100.0 * x1).collect();
        for w in xs.windows(2) {
            if w[1] <= x1 {
                assert!(b.eval(w[1]) > b.eval(w[0]));
            } else if w[0] >= x1 {
                assert!(b.eval(w[1]) < b.eval(w[0]));
            }
        }
        assert!(KBarrier::new(&FlowParams::new(1.0, 1.0, 1).unwrap(), 0.7).is_err());
    }

    #[test]
    fn monitor_not_applicable_for_linear() {
        let wc = interval_constants(63);
        let grid = Grid::new(DomainSpec::interval(PI).unwrap(), 63).unwrap();
        let u0 = Field::new(grid.clone(), grid.dirichlet_mode(1)).unwrap();
        let p = FlowParams::new(0.0, 1.0, 1).unwrap();
        let run = evolve(&u0, &p, &FlowConfig::new(1e-2, 0.1, Scheme::ProjectedSemiImplicit)).unwrap();
        let rep = monitor_invariance(&run, &p, Classifier::Bounded { wc: &wc, tol: DEFAULT_CLASSIFY_TOL });
        assert!(matches!(rep, InvarianceReport::NotApplicable(_)));
    }

    #[test]
    fn monitor_small_data_stays_in_w() {
        let wc = interval_constants(127);
        let grid = Grid::new(DomainSpec::interval(PI).unwrap(), 127).unwrap();
        let p = FlowParams::new(1.0, 1.0, 1).unwrap();
        let u0 = Field::from_fn(grid, |x| 0.5 * x.sin() + 0.2 * (3.0 * x).sin()).unwrap();
        let run = evolve(&u0, &p, &FlowConfig::new(1e-2, 2.0, Scheme::MultiplierSemiImplicit)).unwrap();
        let rep = monitor_invariance(&run, &p, Classifier::Bounded { wc: &wc, tol: DEFAULT_CLASSIFY_TOL });
        let s = rep.summary().unwrap();
        assert_eq!(s.labels[0].1, SnapshotLabel::Well(WellLabel::W));
        assert_eq!(s.violations, 0);
        assert_eq!(s.bound_violations, 0);
    }
}
