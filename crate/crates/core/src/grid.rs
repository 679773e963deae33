//! Discrete domains, quadrature and the Dirichlet Laplacian.
//!
//! Every geometry is reduced to a one-dimensional chain of nodes carrying
//! positive volume weights `w_j` and edge conductances `a_{j+1/2}`. The
//! discrete Dirichlet form is
//!
//! ```text
//! D(u) = sum_edges a_{j+1/2} (u_{j+1} - u_j)^2 / h
//! ```
//!
//! with `u = 0` beyond the Dirichlet boundary, and the Laplacian is defined
//! through it as `Δ_h = -W^{-1} K` where `K` is the stiffness matrix of `D`.
//! This makes `Δ_h` self-adjoint in the weighted inner product and
//! `D(u) = -<u, Δ_h u>` holds to rounding.
//!
//! Balls are handled in the radial variable. Nodes sit at `r_j = j h`,
//! `j = 0..n-1`, `h = R/n`, so the centre is a node and `r = R` is the
//! Dirichlet boundary. Weights are dual-cell volumes
//! `ω_{d-1} (r_{j+1/2}^d - r_{j-1/2}^d)/d` (`r_{-1/2} = 0`) and conductances
//! are `ω_{d-1} r_{j+1/2}^{d-1}`. At the centre there is no inward edge,
//! which is the ghost reflection `u_{-1} = u_1`, and the stencil reduces to
//! `Δ_h u_0 = 2d (u_1 - u_0)/h^2`.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tridiag::Tridiagonal;

/// Geometry of the spatial domain. The boundary condition is always
/// homogeneous Dirichlet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    /// `(0, length)`.
    Interval { length: f64 },
    /// Radially symmetric ball `B(0, radius)` in `dim >= 2` dimensions.
    /// `whole_space` marks a large ball used as a surrogate for `R^d`.
    Ball {
        radius: f64,
        dim: usize,
        whole_space: bool,
    },
    /// `(-halfwidth, halfwidth)` standing in for the whole line.
    TruncatedLine { halfwidth: f64 },
}

impl DomainSpec {
    pub fn interval(length: f64) -> Result<Self> {
        let d = DomainSpec::Interval { length };
        d.validate()?;
        Ok(d)
    }

    pub fn ball(radius: f64, dim: usize) -> Result<Self> {
        let d = DomainSpec::Ball {
            radius,
            dim,
            whole_space: false,
        };
        d.validate()?;
        Ok(d)
    }

    /// A ball flagged as an approximation of `R^d`.
    pub fn ball_whole_space(radius: f64, dim: usize) -> Result<Self> {
        let d = DomainSpec::Ball {
            radius,
            dim,
            whole_space: true,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn truncated_line(halfwidth: f64) -> Result<Self> {
        let d = DomainSpec::TruncatedLine { halfwidth };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidGeometry(format!("{what} must be positive, got {v}")))
            }
        };
        match *self {
            DomainSpec::Interval { length } => positive(length, "length"),
            DomainSpec::TruncatedLine { halfwidth } => positive(halfwidth, "halfwidth"),
            DomainSpec::Ball { radius, dim, .. } => {
                positive(radius, "radius")?;
                match dim {
                    0 => Err(Error::InvalidGeometry("dimension must be >= 1".into())),
                    1 => Err(Error::InvalidGeometry(
                        "a one-dimensional ball is an interval; use Interval".into(),
                    )),
                    _ => Ok(()),
                }
            }
        }
    }

    /// Spatial dimension `d`.
    pub fn dim(&self) -> usize {
        match *self {
            DomainSpec::Ball { dim, .. } => dim,
            _ => 1,
        }
    }

    /// True when the domain approximates `R^d` rather than a genuinely
    /// bounded set.
    pub fn is_whole_space(&self) -> bool {
        match *self {
            DomainSpec::TruncatedLine { .. } => true,
            DomainSpec::Ball { whole_space, .. } => whole_space,
            DomainSpec::Interval { .. } => false,
        }
    }

    /// Lebesgue measure of the domain.
    pub fn measure(&self) -> f64 {
        match *self {
            DomainSpec::Interval { length } => length,
            DomainSpec::TruncatedLine { halfwidth } => 2.0 * halfwidth,
            DomainSpec::Ball { radius, dim, .. } => {
                unit_sphere_area(dim) * radius.powi(dim as i32) / dim as f64
            }
        }
    }
}

/// Surface area `ω_{d-1} = 2 π^{d/2} / Γ(d/2)` of the unit sphere in `R^d`.
pub fn unit_sphere_area(dim: usize) -> f64 {
    2.0 * PI.powf(dim as f64 / 2.0) / gamma_half(dim)
}

// Γ(k/2) for positive integer k.
fn gamma_half(k: usize) -> f64 {
    if k % 2 == 0 {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        // Γ(m + 1/2) = (2m-1)!! / 2^m · √π
        let m = k / 2;
        let mut g = PI.sqrt();
        for i in 0..m {
            g *= i as f64 + 0.5;
        }
        g
    }
}

/// Uniform grid of interior nodes with quadrature weights and edge
/// conductances. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Grid {
    domain: DomainSpec,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    // edges[j] couples node j and node j + 1; the last one reaches the boundary
    edges: Vec<f64>,
    // edge between the left boundary and node 0 (zero at a ball centre)
    left_edge: f64,
}

impl Grid {
    pub fn new(domain: DomainSpec, n: usize) -> Result<Arc<Self>> {
        domain.validate()?;
        if n < 3 {
            return Err(Error::TooFewNodes(n));
        }
        let grid = match domain {
            DomainSpec::Interval { length } => Self::line(domain, 0.0, length, n),
            DomainSpec::TruncatedLine { halfwidth } => {
                Self::line(domain, -halfwidth, halfwidth, n)
            }
            DomainSpec::Ball { radius, dim, .. } => Self::radial(domain, radius, dim, n),
        };
        Ok(Arc::new(grid))
    }

    fn line(domain: DomainSpec, a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / (n + 1) as f64;
        Self {
            domain,
            h,
            nodes: (1..=n).map(|j| a + j as f64 * h).collect(),
            weights: vec![h; n],
            edges: vec![1.0; n],
            left_edge: 1.0,
        }
    }

    fn radial(domain: DomainSpec, radius: f64, dim: usize, n: usize) -> Self {
        let h = radius / n as f64;
        let omega = unit_sphere_area(dim);
        let d = dim as i32;
        let half = |j: usize| (j as f64 + 0.5) * h;
        let weights = (0..n)
            .map(|j| {
                let outer = half(j).powi(d);
                let inner = if j == 0 { 0.0 } else { half(j - 1).powi(d) };
                omega * (outer - inner) / dim as f64
            })
            .collect();
        Self {
            domain,
            h,
            nodes: (0..n).map(|j| j as f64 * h).collect(),
            weights,
            edges: (0..n).map(|j| omega * half(j).powi(d - 1)).collect(),
            left_edge: 0.0,
        }
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weighted sum `Σ w_j f_j`.
    pub fn integrate(&self, nodal: &[f64]) -> Result<f64> {
        self.check_len(nodal.len())?;
        Ok(self.weighted_sum(nodal))
    }

    pub(crate) fn weighted_sum(&self, nodal: &[f64]) -> f64 {
        self.weights.iter().zip(nodal).map(|(w, f)| w * f).sum()
    }

    /// Weighted inner product `Σ w_j u_j v_j`.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        if got == self.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.len(),
                got,
            })
        }
    }

    /// Discrete Dirichlet form `D(u)`, i.e. `‖∇u‖²` with zero boundary values.
    pub fn dirichlet_form(&self, u: &[f64]) -> f64 {
        let n = self.len();
        let mut s = self.left_edge * u[0] * u[0];
        for j in 0..n {
            let next = if j + 1 < n { u[j + 1] } else { 0.0 };
            let diff = next - u[j];
            s += self.edges[j] * diff * diff;
        }
        s / self.h
    }

    /// Stiffness product `K u`.
    pub fn stiffness_apply(&self, u: &[f64], out: &mut [f64]) {
        let n = self.len();
        let inv_h = 1.0 / self.h;
        for j in 0..n {
            let left = if j == 0 { self.left_edge } else { self.edges[j - 1] };
            let mut s = (left + self.edges[j]) * u[j];
            if j > 0 {
                s -= self.edges[j - 1] * u[j - 1];
            }
            if j + 1 < n {
                s -= self.edges[j] * u[j + 1];
            }
            out[j] = s * inv_h;
        }
    }

    /// `Δ_h u` written into `out`.
    pub fn laplacian_into(&self, u: &[f64], out: &mut [f64]) {
        self.stiffness_apply(u, out);
        for (o, w) in out.iter_mut().zip(&self.weights) {
            *o = -*o / w;
        }
    }

    /// Diagonal and off-diagonal of `W + tau K`.
    pub(crate) fn shifted_stiffness(&self, tau: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.len();
        let inv_h = 1.0 / self.h;
        let diag = (0..n)
            .map(|j| {
                let left = if j == 0 { self.left_edge } else { self.edges[j - 1] };
                self.weights[j] + tau * (left + self.edges[j]) * inv_h
            })
            .collect();
        let off = (0..n - 1).map(|j| -tau * self.edges[j] * inv_h).collect();
        (diag, off)
    }

    /// Factor `W + tau K` for implicit diffusion steps of length `tau`.
    pub fn implicit_operator(&self, tau: f64) -> Result<ImplicitDiffusion> {
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {tau}")));
        }
        let (diag, off) = self.shifted_stiffness(tau);
        let factor = Tridiagonal::new(&diag, &off)?;
        // (W + tau K) is symmetric positive definite for tau > 0.
        assert!(factor.is_positive_definite());
        Ok(ImplicitDiffusion {
            factor,
            weights: self.weights.clone(),
        })
    }

    /// Lowest Dirichlet eigenpair `(λ_1, φ_1)` of `-Δ_h`, with `φ_1 > 0`
    /// normalized to unit weighted L² norm. Computed by inverse iteration.
    pub fn first_eigenpair(&self) -> (f64, Vec<f64>) {
        let n = self.len();
        let inv_h = 1.0 / self.h;
        let diag: Vec<f64> = (0..n)
            .map(|j| {
                let left = if j == 0 { self.left_edge } else { self.edges[j - 1] };
                (left + self.edges[j]) * inv_h
            })
            .collect();
        let off: Vec<f64> = (0..n - 1).map(|j| -self.edges[j] * inv_h).collect();
        let k = Tridiagonal::new(&diag, &off).expect("stiffness matrix is nonsingular");

        // a smooth positive start has a large component on the first mode
        let mut v: Vec<f64> = match self.domain {
            DomainSpec::Ball { radius, .. } => self
                .nodes
                .iter()
                .map(|&r| (0.5 * PI * r / radius).cos())
                .collect(),
            _ => self.dirichlet_mode(1),
        };
        let mut lambda = 0.0;
        for _ in 0..200 {
            let norm = self.inner(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            let mut next: Vec<f64> = v.iter().zip(&self.weights).map(|(x, w)| x * w).collect();
            k.solve_in_place(&mut next);
            let rayleigh = self.dirichlet_form(&next) / self.inner(&next, &next);
            let converged = (rayleigh - lambda).abs() <= 1e-15 * rayleigh;
            lambda = rayleigh;
            v = next;
            if converged {
                break;
            }
        }
        let norm = self.inner(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        (self.dirichlet_form(&v), v)
    }

    /// k-th sine mode on a line-type grid (unnormalized). On a uniform grid
    /// this is an exact eigenvector of the three-point stencil. Balls fall
    /// back to the numerically computed first mode regardless of `k`.
    pub fn dirichlet_mode(&self, k: usize) -> Vec<f64> {
        match self.domain {
            DomainSpec::Interval { length } => self
                .nodes
                .iter()
                .map(|&x| (k as f64 * PI * x / length).sin())
                .collect(),
            DomainSpec::TruncatedLine { halfwidth } => self
                .nodes
                .iter()
                .map(|&x| (k as f64 * PI * (x + halfwidth) / (2.0 * halfwidth)).sin())
                .collect(),
            DomainSpec::Ball { .. } => self.first_eigenpair().1,
        }
    }

    /// Exact eigenvalue `(2/h²)(1 - cos(kπh/L))` of the k-th sine mode on
    /// line-type grids; `None` on balls.
    pub fn line_mode_eigenvalue(&self, k: usize) -> Option<f64> {
        let len = match self.domain {
            DomainSpec::Interval { length } => length,
            DomainSpec::TruncatedLine { halfwidth } => 2.0 * halfwidth,
            DomainSpec::Ball { .. } => return None,
        };
        let theta = k as f64 * PI * self.h / len;
        let half = (0.5 * theta).sin();
        Some(4.0 * half * half / (self.h * self.h))
    }
}

/// Factorization of `W + dt K`. Solving `(W + dt K) x = W b` is one
/// backward-Euler diffusion step `x = (I - dt Δ_h)^{-1} b`.
#[derive(Debug, Clone)]
pub struct ImplicitDiffusion {
    factor: Tridiagonal,
    weights: Vec<f64>,
}

impl ImplicitDiffusion {
    /// Overwrite `b` with `(I - dt Δ_h)^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        for (x, w) in b.iter_mut().zip(&self.weights) {
            *x *= w;
        }
        self.factor.solve_in_place(b);
    }
}

/// Nodal values of `u` on a grid.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Diverged(format!("non-finite nodal value at index {j}")));
        }
        Ok(Self { grid, values })
    }

    /// Sample `f` at the nodes.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest magnitude at the nodes adjacent to the Dirichlet boundary.
    /// On whole-space surrogates this measures truncation error.
    pub fn boundary_magnitude(&self) -> f64 {
        let last = self.values[self.values.len() - 1].abs();
        match self.grid.domain() {
            DomainSpec::Ball { .. } => last,
            _ => last.max(self.values[0].abs()),
        }
    }

    /// Weighted L² distance to another field on the same grid.
    pub fn l2_distance(&self, other: &Field) -> f64 {
        let diff: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        self.grid.inner(&diff, &diff).sqrt()
    }
}

/// `Δ_h u` as a new field.
pub fn apply_laplacian(field: &Field) -> Field {
    let mut out = vec![0.0; field.values.len()];
    field.grid.laplacian_into(&field.values, &mut out);
    Field {
        grid: Arc::clone(&field.grid),
        values: out,
    }
}

/// Weighted sum of nodal values.
pub fn integrate(grid: &Grid, nodal: &[f64]) -> Result<f64> {
    grid.integrate(nodal)
}

/// Discrete `‖∇u‖²_{L²}`.
pub fn gradient_sq_norm(field: &Field) -> f64 {
    field.grid.dirichlet_form(&field.values)
}
