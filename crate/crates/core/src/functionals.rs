//! Scalar functionals of a field: mass, L^p norms, energy, the nonlocal
//! multiplier, the Nehari functional and the Gagliardo–Nirenberg quotient.
//!
//! All of them share the grid quadrature, so algebraic identities between
//! them hold to rounding rather than to discretization order.

use crate::error::{Error, Result};
use crate::grid::{gradient_sq_norm, Field, Grid};

/// Physics of the flow: coupling `g`, exponent `σ` and dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    pub g: f64,
    pub sigma: f64,
    pub dim: usize,
}

impl FlowParams {
    pub fn new(g: f64, sigma: f64, dim: usize) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::param("g", "must be finite"));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be positive, got {sigma}")));
        }
        if dim == 0 {
            return Err(Error::param("dim", "must be >= 1"));
        }
        let p = Self { g, sigma, dim };
        if sigma >= p.energy_critical_sigma() {
            log::warn!(
                "sigma = {sigma} is not energy-subcritical in d = {dim} (threshold {})",
                p.energy_critical_sigma()
            );
        }
        Ok(p)
    }

    /// `2σ + 2`.
    pub fn power(&self) -> f64 {
        2.0 * self.sigma + 2.0
    }

    /// `2/d`.
    pub fn mass_critical_sigma(&self) -> f64 {
        2.0 / self.dim as f64
    }

    /// `2/(d-2)^+`, infinite for `d <= 2`.
    pub fn energy_critical_sigma(&self) -> f64 {
        if self.dim <= 2 {
            f64::INFINITY
        } else {
            2.0 / (self.dim as f64 - 2.0)
        }
    }

    /// `d σ`.
    pub fn dsigma(&self) -> f64 {
        self.dim as f64 * self.sigma
    }

    /// The same exponent and dimension with `g = 1`.
    pub fn normalized(&self) -> Self {
        Self { g: 1.0, ..*self }
    }
}

/// Position of `σ` relative to the mass- and energy-critical exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    MassCritical,
    SupercriticalSubenergy,
    EnergyCriticalOrWorse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalityReport {
    pub sigma_mass_critical: f64,
    pub sigma_energy_critical: f64,
    pub regime: Regime,
    /// `(2 - (d-2)σ)/(dσ - 2)`, defined only when `dσ > 2`.
    pub alpha: Option<f64>,
}

// relative slack for deciding that σ sits exactly on a threshold
const THRESHOLD_EPS: f64 = 1e-12;

pub fn criticality(params: &FlowParams) -> CriticalityReport {
    let s = params.sigma;
    let mc = params.mass_critical_sigma();
    let ec = params.energy_critical_sigma();
    let regime = if (s - mc).abs() <= THRESHOLD_EPS * mc {
        Regime::MassCritical
    } else if s < mc {
        Regime::Subcritical
    } else if s < ec * (1.0 - THRESHOLD_EPS) {
        Regime::SupercriticalSubenergy
    } else {
        Regime::EnergyCriticalOrWorse
    };
    let ds = params.dsigma();
    let alpha = (ds > 2.0 && regime != Regime::MassCritical)
        .then(|| (2.0 - (params.dim as f64 - 2.0) * s) / (ds - 2.0));
    CriticalityReport {
        sigma_mass_critical: mc,
        sigma_energy_critical: ec,
        regime,
        alpha,
    }
}

/// `|x|^p` with an integer fast path.
#[inline]
pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return 0.0;
    }
    if p.fract() == 0.0 && p.abs() <= 64.0 {
        a.powi(p as i32)
    } else {
        a.powf(p)
    }
}

/// `∫ |u|^p`.
pub fn power_integral(u: &Field, p: f64) -> f64 {
    let grid = u.grid();
    grid.weights()
        .iter()
        .zip(u.values())
        .map(|(w, &v)| w * abs_pow(v, p))
        .sum()
}

/// `‖u‖_{L²}`.
pub fn mass_norm(u: &Field) -> f64 {
    u.grid().inner(u.values(), u.values()).sqrt()
}

/// `‖u‖_{L^p}`.
pub fn lp_norm(u: &Field, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::param("p", format!("must be >= 1, got {p}")));
    }
    Ok(power_integral(u, p).powf(1.0 / p))
}

/// `E[u] = ½‖∇u‖² - g/(2σ+2) ∫|u|^{2σ+2}`.
pub fn energy(u: &Field, params: &FlowParams) -> f64 {
    let q = params.power();
    0.5 * gradient_sq_norm(u) - params.g / q * power_integral(u, q)
}

/// Nehari functional `I[u] = ‖∇u‖² - g ∫|u|^{2σ+2}`.
pub fn nehari(u: &Field, params: &FlowParams) -> f64 {
    gradient_sq_norm(u) - params.g * power_integral(u, params.power())
}

/// The multiplier `μ[u] = I[u] / ‖u‖²`.
pub fn mu(u: &Field, params: &FlowParams) -> Result<f64> {
    let m2 = u.grid().inner(u.values(), u.values());
    if m2 == 0.0 {
        return Err(Error::DegenerateField);
    }
    Ok(nehari(u, params) / m2)
}

/// `μ_α[u] = I[u] / α` with a fixed normalization `α > 0`.
pub fn mu_alpha(u: &Field, params: &FlowParams, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
    }
    Ok(nehari(u, params) / alpha)
}

/// Weinstein functional
/// `W(u) = ‖u‖_{2σ+2}^{2σ+2} / (‖∇u‖^{dσ} ‖u‖_2^{2+2σ-dσ})`.
pub fn gn_quotient(u: &Field, params: &FlowParams) -> Result<f64> {
    if u.is_zero() {
        return Err(Error::DegenerateField);
    }
    let ds = params.dsigma();
    let grad = gradient_sq_norm(u).sqrt();
    let mass = mass_norm(u);
    Ok(power_integral(u, params.power())
        / (grad.powf(ds) * mass.powf(2.0 + 2.0 * params.sigma - ds)))
}

/// The scalar diagnostics of one field, computed in a single pass over
/// the shared quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub mass_sq: f64,
    pub grad_sq: f64,
    pub power: f64,
    pub linf: f64,
}

impl Snapshot {
    pub fn of(u: &Field, params: &FlowParams) -> Self {
        Self::of_values(u.grid(), u.values(), params)
    }

    pub(crate) fn of_values(grid: &Grid, values: &[f64], params: &FlowParams) -> Self {
        let q = params.power();
        let mut mass_sq = 0.0;
        let mut power = 0.0;
        let mut linf: f64 = 0.0;
        for (w, &v) in grid.weights().iter().zip(values) {
            mass_sq += w * v * v;
            power += w * abs_pow(v, q);
            linf = linf.max(v.abs());
        }
        Self {
            mass_sq,
            grad_sq: grid.dirichlet_form(values),
            power,
            linf,
        }
    }

    pub fn energy(&self, params: &FlowParams) -> f64 {
        0.5 * self.grad_sq - params.g / params.power() * self.power
    }

    pub fn nehari(&self, params: &FlowParams) -> f64 {
        self.grad_sq - params.g * self.power
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::DomainSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn sin_field(n: usize) -> Field {
        let g = Grid::new(DomainSpec::interval(PI).unwrap(), n).unwrap();
        Field::from_fn(g, f64::sin).unwrap()
    }

    fn soliton(n: usize) -> Field {
        let g = Grid::new(DomainSpec::truncated_line(20.0).unwrap(), n).unwrap();
        Field::from_fn(g, |x| 2f64.sqrt() / x.cosh()).unwrap()
    }

    fn cubic() -> FlowParams {
        FlowParams::new(1.0, 1.0, 1).unwrap()
    }

    #[test]
    fn mass_of_sine() {
        let u = sin_field(100);
        assert_relative_eq!(mass_norm(&u), (PI / 2.0).sqrt(), epsilon = 1e-14);
        assert_eq!(mass_norm(&u.scaled(0.0)), 0.0);
        assert_relative_eq!(mass_norm(&u.scaled(-2.5)), 2.5 * mass_norm(&u), epsilon = 1e-13);
    }

    #[test]
    fn lp_norms() {
        let u = sin_field(400);
        assert_relative_eq!(lp_norm(&u, 2.0).unwrap(), mass_norm(&u), epsilon = 1e-14);
        assert_relative_eq!(
            lp_norm(&u, 4.0).unwrap(),
            (3.0 * PI / 8.0).powf(0.25),
            epsilon = 1e-12
        );
        assert_eq!(lp_norm(&u.scaled(0.0), 3.0).unwrap(), 0.0);
        assert!(lp_norm(&u, 0.5).is_err());
    }

    #[test]
    fn energy_values() {
        let u = sin_field(2000);
        let free = FlowParams::new(0.0, 1.0, 1).unwrap();
        assert!((energy(&u, &free) - PI / 4.0).abs() < 1e-6);
        assert_eq!(energy(&u.scaled(0.0), &cubic()), 0.0);
        let q = soliton(4095);
        assert!((energy(&q, &cubic()) + 2.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn mu_values() {
        let u = sin_field(255);
        let free = FlowParams::new(0.0, 1.0, 1).unwrap();
        let lam = u.grid().line_mode_eigenvalue(1).unwrap();
        assert_relative_eq!(mu(&u, &free).unwrap(), lam, epsilon = 1e-13);
        assert_relative_eq!(
            mu(&u.scaled(7.0), &free).unwrap(),
            mu(&u, &free).unwrap(),
            epsilon = 1e-13
        );
        assert!(matches!(mu(&u.scaled(0.0), &free), Err(Error::DegenerateField)));
        let q = soliton(4095);
        assert!((mu(&q, &cubic()).unwrap() + 1.0).abs() < 1e-4);
    }

    #[test]
    fn mu_alpha_values() {
        let u = sin_field(255);
        let free = FlowParams::new(0.0, 1.0, 1).unwrap();
        let m2 = mass_norm(&u).powi(2);
        assert_relative_eq!(
            mu_alpha(&u, &cubic(), m2).unwrap(),
            mu(&u, &cubic()).unwrap(),
            epsilon = 1e-14
        );
        assert_eq!(mu_alpha(&u.scaled(0.0), &cubic(), 1.0).unwrap(), 0.0);
        let lam = u.grid().line_mode_eigenvalue(1).unwrap();
        assert_relative_eq!(
            mu_alpha(&u, &free, PI).unwrap(),
            lam * (PI / 2.0) / PI,
            epsilon = 1e-13
        );
        assert!(mu_alpha(&u, &free, 0.0).is_err());
        assert!(mu_alpha(&u, &free, -1.0).is_err());
    }

    #[test]
    fn nehari_values() {
        let u = sin_field(2000);
        assert!((nehari(&u, &cubic()) - PI / 8.0).abs() < 1e-6);
        assert_eq!(nehari(&u.scaled(0.0), &cubic()), 0.0);
        let free = FlowParams::new(0.0, 1.0, 1).unwrap();
        assert!(nehari(&u, &free) > 0.0);
    }

    #[test]
    fn gn_quotient_of_soliton() {
        let q = soliton(4095);
        let w = gn_quotient(&q, &cubic()).unwrap();
        assert!((w - 3f64.powf(-0.5)).abs() < 1e-4, "W = {w}");
        assert_relative_eq!(gn_quotient(&q.scaled(-3.0), &cubic()).unwrap(), w, max_relative = 1e-13);
        assert!(gn_quotient(&q.scaled(0.0), &cubic()).is_err());
    }

    #[test]
    fn gn_quotient_dilation_invariant() {
        let grid = Grid::new(DomainSpec::truncated_line(20.0).unwrap(), 4095).unwrap();
        let w = |lambda: f64| {
            let u = Field::from_fn(grid.clone(), |x| 2f64.sqrt() / (lambda * x).cosh()).unwrap();
            gn_quotient(&u, &cubic()).unwrap()
        };
        let base = w(1.0);
        for lambda in [0.7, 1.5, 2.0] {
            assert!((w(lambda) - base).abs() < 1e-4, "λ={lambda}");
        }
    }

    #[test]
    fn criticality_examples() {
        let r = criticality(&FlowParams::new(1.0, 1.0, 3).unwrap());
        assert_eq!(r.regime, Regime::SupercriticalSubenergy);
        assert_relative_eq!(r.alpha.unwrap(), 1.0);
        let r = criticality(&FlowParams::new(1.0, 3.0, 1).unwrap());
        assert_relative_eq!(r.alpha.unwrap(), 5.0);
        assert!(r.sigma_energy_critical.is_infinite());
        let r = criticality(&FlowParams::new(1.0, 1.0, 2).unwrap());
        assert_eq!(r.regime, Regime::MassCritical);
        assert!(r.alpha.is_none());
        let r = criticality(&FlowParams::new(1.0, 0.5, 1).unwrap());
        assert_eq!(r.regime, Regime::Subcritical);
        assert!(r.alpha.is_none());
        let r = criticality(&FlowParams::new(1.0, 2.0, 3).unwrap());
        assert_eq!(r.regime, Regime::EnergyCriticalOrWorse);
    }

    #[test]
    fn params_validation() {
        assert!(FlowParams::new(1.0, 0.0, 1).is_err());
        assert!(FlowParams::new(1.0, -1.0, 1).is_err());
        assert!(FlowParams::new(f64::NAN, 1.0, 1).is_err());
        // supercritical exponents only warn
        assert!(FlowParams::new(1.0, 5.0, 3).is_ok());
    }
}
