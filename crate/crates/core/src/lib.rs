//! Numerical toolkit for the L²-norm-preserving nonlinear heat flow
//!
//! ```text
//! ∂t u = Δu + g|u|^{2σ}u + μ[u]u,   μ[u] = (‖∇u‖² - g‖u‖_{2σ+2}^{2σ+2}) / ‖u‖²
//! ```
//!
//! with homogeneous Dirichlet data on intervals, radially symmetric balls and
//! truncated lines.
//!
//! - [`grid`]: uniform grids, quadrature and the discrete Laplacian
//! - [`functionals`]: mass, energy, multiplier, Nehari and Weinstein functionals
//! - [`flow`]: semi-implicit time stepping with diagnostics and monitors
//! - [`stationary`]: ground states by normalized flow, radial shooting,
//!   Pohozaev certification and the Gagliardo–Nirenberg constant
//! - [`wells`]: Sobolev constant, potential-well classification and
//!   invariance monitoring
//! - [`exec`]: sequential/parallel batch execution

pub mod error;
pub mod exec;
pub mod flow;
pub mod functionals;
pub mod grid;
pub mod stationary;
pub mod tridiag;
pub mod wells;

pub use error::{Error, ErrorClass, Result};
pub use exec::Execution;
pub use flow::{
    check_dissipation, evolve, evolve_batch, mass_formula_check, step, DiagnosticsRecord,
    FlowConfig, RunResult, Scheme, Stepper, Termination,
};
pub use functionals::{
    criticality, energy, gn_quotient, lp_norm, mass_norm, mu, mu_alpha, nehari,
    CriticalityReport, FlowParams, Regime,
};
pub use grid::{apply_laplacian, gradient_sq_norm, integrate, DomainSpec, Field, Grid};
pub use stationary::{
    ground_state_flow, ground_state_from_seed, gn_constant, gn_from_profile, pohozaev_residuals,
    residuals_with_multiplier, shoot_radial, GnConstant, GroundState, RadialProfile,
    ShootingConfig, StationaryResiduals,
};
pub use wells::{
    classify_bounded, classify_whole_space, k_barrier, monitor_invariance, sobolev_constant,
    Classifier, InvarianceReport, KBarrier, KClassification, KThresholds, SobolevConfig,
    WellClassification, WellConstants, WellLabel,
};
