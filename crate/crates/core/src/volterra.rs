//! Volterra integral equation form of the fractional Sturm-Liouville equation
//!
//! ```text
//! y(t) = c1 t^{α-1} E_{2α,α}(-λt^{2α}) + c2 t^α E_{2α,α+1}(-λt^{2α})
//!        + ∫_0^t K(t-s) q(s) y(s) ds,       K(u) = u^{2α-1} E_{2α,2α}(-λu^{2α})
//! ```
//!
//! and its classical counterpart (`α = 1`, kernel `sin(√λ u)/√λ`).
//!
//! The solver marches on a uniform mesh with product-trapezoidal weights: the
//! whole kernel is integrated exactly against the hat functions through its
//! antiderivatives
//!
//! ```text
//! K1(u) = u^{2α}   E_{2α,2α+1}(-λu^{2α}),   K1' = K,
//! K2(u) = u^{2α+1} E_{2α,2α+2}(-λu^{2α}),   K2' = K1,
//! ```
//!
//! and the newest node is treated implicitly.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fractional::{rl_integral_on_mesh, second_derivative_on_mesh, Interp, SampledFunction};
use crate::gauss_jacobi::gauss_jacobi;
use crate::special::{gamma_recip, MLEvalConfig, MLParams, MittagLeffler};

/// Smallest mesh accepted by [`solve`] and [`classical_solve`].
pub const MIN_NODES: usize = 16;
/// Smallest mesh accepted by [`residual`].
pub const MIN_RESIDUAL_NODES: usize = 64;
/// Gauss-Jacobi points for the forcing of the singular `c1` mode.
const SINGULAR_MODE_POINTS: usize = 48;

/// `c1 = 𝓘^{1-α} y(0+)`, `c2 = 𝒟^α y(0+)`. In the classical case these are
/// `y(0)` and `y'(0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub c1: f64,
    pub c2: f64,
}

impl BoundaryData {
    pub fn new(c1: f64, c2: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite()) {
            return domain("boundary constants must be finite");
        }
        Ok(BoundaryData { c1, c2 })
    }
}

/// The potential `q` on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    Constant(f64),
    /// Coefficients in increasing degree.
    Polynomial(Vec<f64>),
    /// Linearly interpolated samples.
    Sampled(SampledFunction),
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match self {
            Potential::Zero => Ok(()),
            Potential::Constant(c) if c.is_finite() => Ok(()),
            Potential::Constant(c) => domain(format!("constant potential must be finite, got {c}")),
            Potential::Polynomial(cs) if cs.iter().all(|c| c.is_finite()) => Ok(()),
            Potential::Polynomial(_) => domain("polynomial coefficients must be finite"),
            Potential::Sampled(f) if f.interp() == Interp::Linear => Ok(()),
            Potential::Sampled(_) => {
                domain("a sampled potential must be bounded (linear interpolation)")
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Constant(c) => *c,
            Potential::Polynomial(cs) => cs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            Potential::Sampled(f) => f.eval(t),
        }
    }

    /// `true` for a potential that vanishes identically.
    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Constant(c) => *c == 0.0,
            Potential::Polynomial(cs) => cs.iter().all(|c| *c == 0.0),
            Potential::Sampled(f) => f.values().iter().all(|v| *v == 0.0),
        }
    }

    /// Short text form, `zero`, `const:c`, `poly:c0,c1,...` or `sampled:n`.
    pub fn descriptor(&self) -> String {
        match self {
            Potential::Zero => "zero".to_string(),
            Potential::Constant(c) => format!("const:{c}"),
            Potential::Polynomial(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                format!("poly:{}", parts.join(","))
            }
            Potential::Sampled(f) => format!("sampled:{}", f.len()),
        }
    }
}

/// Mesh values of `y`.
///
/// For `α < 1` and `c1 ≠ 0` the solution behaves like `c1 t^{α-1}/Γ(α)` at the
/// origin; node 0 then stores the regularized value `0` and the singular part
/// is recovered from `boundary.c1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub alpha: f64,
    pub lambda: f64,
    pub boundary: BoundaryData,
    pub mesh: Vec<f64>,
    pub y: Vec<f64>,
}

impl Solution {
    fn singular(&self) -> bool {
        self.alpha < 1.0 && self.boundary.c1 != 0.0
    }

    /// The solution as a sampled function `t^p g(t)`: `p = α-1` when the `c1`
    /// mode is present, `p = α` otherwise, linear for `α = 1`.
    pub fn sampled(&self) -> Result<SampledFunction> {
        if self.alpha == 1.0 {
            return SampledFunction::new(self.mesh.clone(), self.y.clone(), Interp::Linear);
        }
        let (p, g0) = if self.singular() {
            (self.alpha - 1.0, self.boundary.c1 * gamma_recip(self.alpha))
        } else {
            (self.alpha, self.boundary.c2 * gamma_recip(self.alpha + 1.0))
        };
        let mut g: Vec<f64> = self
            .mesh
            .iter()
            .zip(&self.y)
            .map(|(&t, &y)| t.powf(-p) * y)
            .collect();
        g[0] = g0;
        SampledFunction::new(self.mesh.clone(), g, Interp::PowerLaw { exponent: p })
    }

    /// `y(1)`.
    pub fn end_value(&self) -> f64 {
        *self.y.last().unwrap()
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.5..=1.0).contains(&alpha) {
        return domain(format!("alpha must lie in [0.5, 1], got {alpha}"));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !lambda.is_finite() {
        return domain(format!("lambda must be finite, got {lambda}"));
    }
    Ok(())
}

/// Mittag-Leffler evaluators for a fixed `α`. Building their tables dominates
/// the cost of a single solve, so reuse one `Solver` across many `λ`.
#[derive(Clone, Debug)]
pub struct Solver {
    alpha: f64,
    /// `E_{2α,2α}`, `E_{2α,2α+1}`, `E_{2α,2α+2}`: kernel and antiderivatives.
    g: MittagLeffler,
    g1: MittagLeffler,
    g2: MittagLeffler,
    /// `E_{2α,α}`, `E_{2α,α+1}`: free modes.
    e1: MittagLeffler,
    e2: MittagLeffler,
}

impl Solver {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let d = 2.0 * alpha;
        let ev = |theta: f64| MittagLeffler::new(MLParams::new(d, theta)?, MLEvalConfig::default());
        Ok(Solver {
            alpha,
            g: ev(d)?,
            g1: ev(d + 1.0)?,
            g2: ev(d + 2.0)?,
            e1: ev(alpha)?,
            e2: ev(alpha + 1.0)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn kernel(&self, lambda: f64) -> Kernel<'_> {
        Kernel { ev: self, lambda }
    }

    fn modes(&self, lambda: f64) -> FreeModes<'_> {
        FreeModes { ev: self, lambda }
    }

    /// `K(u)`, with the limit at `u = 0` (1 for `α = 1/2`, else 0).
    pub fn kernel_at(&self, lambda: f64, u: f64) -> Result<f64> {
        check_lambda(lambda)?;
        self.kernel(lambda).eval(u)
    }

    /// See [`free_solution`].
    pub fn free_solution(&self, lambda: f64, b: BoundaryData, t: f64) -> Result<f64> {
        check_lambda(lambda)?;
        if !(0.0..=1.0).contains(&t) {
            return domain(format!("t must lie in [0, 1], got {t}"));
        }
        if t == 0.0 && b.c1 != 0.0 && self.alpha < 1.0 {
            return domain("the c1 mode is unbounded at t = 0");
        }
        self.modes(lambda).eval(b, t)
    }

    /// See [`solve`].
    pub fn solve(
        &self,
        lambda: f64,
        q: &Potential,
        b: BoundaryData,
        n_nodes: usize,
    ) -> Result<Solution> {
        check_lambda(lambda)?;
        let alpha = self.alpha;
        let mesh = uniform_mesh(n_nodes)?;
        let qv = sample_potential(q, &mesh)?;
        let modes = self.modes(lambda);
        let singular = alpha < 1.0 && b.c1 != 0.0;

        // the c1 mode is kept analytic when it is unbounded
        let regular_part = BoundaryData {
            c1: if singular { 0.0 } else { b.c1 },
            c2: b.c2,
        };
        let mut forcing = Vec::with_capacity(n_nodes);
        for &t in &mesh {
            forcing.push(modes.eval(regular_part, t)?);
        }
        let y = if q.is_zero() {
            forcing
        } else {
            let kernel = self.kernel(lambda);
            if singular {
                add_singular_forcing(&kernel, &modes, q, b.c1, &mesh, &mut forcing)?;
            }
            let h = 1.0 / (n_nodes - 1) as f64;
            let (far, near) =
                weights_from_antiderivatives(n_nodes - 1, h, |u| kernel.k1(u), |u| kernel.k2(u))?;
            march(&forcing, &qv, &far, &near)?
        };
        let mut sol = Solution {
            alpha,
            lambda,
            boundary: b,
            mesh,
            y,
        };
        if singular {
            for (yi, &t) in sol.y.iter_mut().zip(&sol.mesh).skip(1) {
                *yi += b.c1 * t.powf(alpha - 1.0) * modes.mode1_regular(t)?;
            }
        }
        Ok(sol)
    }
}

/// The kernel at a fixed `λ`.
struct Kernel<'a> {
    ev: &'a Solver,
    lambda: f64,
}

impl Kernel<'_> {
    fn arg(&self, u: f64) -> f64 {
        -self.lambda * u.powf(2.0 * self.ev.alpha)
    }

    fn eval(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return domain(format!("kernel argument must be nonnegative, got {u}"));
        }
        if u == 0.0 {
            return Ok(if self.ev.alpha == 0.5 { 1.0 } else { 0.0 });
        }
        Ok(u.powf(2.0 * self.ev.alpha - 1.0) * self.ev.g.eval(self.arg(u))?)
    }

    /// `K1(u) = ∫_0^u K`.
    fn k1(&self, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(u.powf(2.0 * self.ev.alpha) * self.ev.g1.eval(self.arg(u))?)
    }

    /// `K2(u) = ∫_0^u K1`.
    fn k2(&self, u: f64) -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(u.powf(2.0 * self.ev.alpha + 1.0) * self.ev.g2.eval(self.arg(u))?)
    }
}

/// `K(u) = u^{2α-1} E_{2α,2α}(-λu^{2α})` for `α ∈ [1/2, 1]`, `u ≥ 0`.
pub fn kernel(alpha: f64, lambda: f64, u: f64) -> Result<f64> {
    Solver::new(alpha)?.kernel_at(lambda, u)
}

/// The two free modes at a fixed `λ`.
struct FreeModes<'a> {
    ev: &'a Solver,
    lambda: f64,
}

impl FreeModes<'_> {
    fn arg(&self, t: f64) -> f64 {
        -self.lambda * t.powf(2.0 * self.ev.alpha)
    }

    /// `E_{2α,α}(-λt^{2α})`, the `c1` mode without its `t^{α-1}` factor.
    fn mode1_regular(&self, t: f64) -> Result<f64> {
        self.ev.e1.eval(self.arg(t))
    }

    /// `t^α E_{2α,α+1}(-λt^{2α})`.
    fn mode2(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok(t.powf(self.ev.alpha) * self.ev.e2.eval(self.arg(t))?)
    }

    fn eval(&self, b: BoundaryData, t: f64) -> Result<f64> {
        let alpha = self.ev.alpha;
        let mut v = 0.0;
        if b.c1 != 0.0 {
            let r = self.mode1_regular(t)?;
            v += b.c1
                * if alpha == 1.0 {
                    r
                } else {
                    t.powf(alpha - 1.0) * r
                };
        }
        if b.c2 != 0.0 {
            v += b.c2 * self.mode2(t)?;
        }
        Ok(v)
    }
}

/// `c1 t^{α-1} E_{2α,α}(-λt^{2α}) + c2 t^α E_{2α,α+1}(-λt^{2α})`, the solution
/// for `q ≡ 0`.
pub fn free_solution(alpha: f64, lambda: f64, b: BoundaryData, t: f64) -> Result<f64> {
    Solver::new(alpha)?.free_solution(lambda, b, t)
}

fn uniform_mesh(n_nodes: usize) -> Result<Vec<f64>> {
    if n_nodes < MIN_NODES {
        return domain(format!("need at least {MIN_NODES} nodes, got {n_nodes}"));
    }
    let n = (n_nodes - 1) as f64;
    Ok((0..n_nodes).map(|i| i as f64 / n).collect())
}

fn sample_potential(q: &Potential, mesh: &[f64]) -> Result<Vec<f64>> {
    q.validate()?;
    Ok(mesh.iter().map(|&t| q.eval(t)).collect())
}

/// Product-trapezoidal march for `y = F + ∫_0^t K(t-s) q(s) y(s) ds`.
///
/// `far[d]`, `near[d]` are the cell weights at distance `d` steps.
fn march(forcing: &[f64], q: &[f64], far: &[f64], near: &[f64]) -> Result<Vec<f64>> {
    let n = forcing.len();
    let mut y = vec![0.0; n];
    let mut qy = vec![0.0; n];
    y[0] = forcing[0];
    qy[0] = q[0] * y[0];
    // interior node weight: near end of one cell plus far end of the next
    let combined: Vec<f64> = (0..n - 1)
        .map(|d| {
            if d == 0 {
                near[0]
            } else {
                near[d] + far[d - 1]
            }
        })
        .collect();
    for m in 1..n {
        let mut rhs = forcing[m] + far[m - 1] * qy[0];
        for j in 1..m {
            rhs += combined[m - j] * qy[j];
        }
        let denom = 1.0 - near[0] * q[m];
        let v = rhs / denom;
        if !v.is_finite() {
            return Err(Error::NonFiniteSolution(format!(
                "solution is not finite at t = {} (step {m} of {})",
                m as f64 / (n - 1) as f64,
                n - 1
            )));
        }
        y[m] = v;
        qy[m] = q[m] * v;
    }
    Ok(y)
}

/// Cell weights from the kernel antiderivatives `K1`, `K2`:
/// `far = K1(u0) - ΔK2/h`, `near = ΔK2/h - K1(u1)`, with `u1 = d h`,
/// `u0 = u1 + h`.
fn weights_from_antiderivatives(
    n_cells: usize,
    h: f64,
    k1: impl Fn(f64) -> Result<f64>,
    k2: impl Fn(f64) -> Result<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut a1 = Vec::with_capacity(n_cells + 1);
    let mut a2 = Vec::with_capacity(n_cells + 1);
    for i in 0..=n_cells {
        let u = i as f64 * h;
        a1.push(k1(u)?);
        a2.push(k2(u)?);
    }
    let mut far = Vec::with_capacity(n_cells);
    let mut near = Vec::with_capacity(n_cells);
    for d in 0..n_cells {
        let dk2 = (a2[d + 1] - a2[d]) / h;
        far.push(a1[d + 1] - dk2);
        near.push(dk2 - a1[d]);
    }
    Ok((far, near))
}

/// Solves the Volterra equation on a uniform mesh of `n_nodes` points.
pub fn solve(
    alpha: f64,
    lambda: f64,
    q: &Potential,
    b: BoundaryData,
    n_nodes: usize,
) -> Result<Solution> {
    Solver::new(alpha)?.solve(lambda, q, b, n_nodes)
}

/// Adds `c1 ∫_0^t K(t-s) q(s) s^{α-1} E_{2α,α}(-λs^{2α}) ds` to the forcing,
/// by Gauss-Jacobi in `s = t x` with weight `(1-x)^{2α-1} x^{α-1}`.
fn add_singular_forcing(
    kernel: &Kernel,
    modes: &FreeModes,
    q: &Potential,
    c1: f64,
    mesh: &[f64],
    forcing: &mut [f64],
) -> Result<()> {
    let alpha = kernel.ev.alpha;
    let rule = gauss_jacobi(SINGULAR_MODE_POINTS, 2.0 * alpha - 1.0, alpha - 1.0);
    for (f, &t) in forcing.iter_mut().zip(mesh).skip(1) {
        let mut sum = 0.0;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let s = t * x;
            let u = t - s;
            let g = kernel.ev.g.eval(kernel.arg(u))?;
            sum += w * g * q.eval(s) * modes.mode1_regular(s)?;
        }
        *f += c1 * t.powf(3.0 * alpha - 1.0) * sum;
    }
    Ok(())
}

/// Classical equation `-y'' + q y = λ y` through its Volterra form with kernel
/// `sin(√λ u)/√λ`; `b.c1 = y(0)`, `b.c2 = y'(0)`.
pub fn classical_solve(
    lambda: f64,
    q: &Potential,
    b: BoundaryData,
    n_nodes: usize,
) -> Result<Solution> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return domain(format!("classical solve needs lambda > 0, got {lambda}"));
    }
    let mesh = uniform_mesh(n_nodes)?;
    let qv = sample_potential(q, &mesh)?;
    let k = lambda.sqrt();
    let forcing: Vec<f64> = mesh
        .iter()
        .map(|&t| b.c1 * (k * t).cos() + b.c2 * (k * t).sin() / k)
        .collect();
    let y = if q.is_zero() {
        forcing
    } else {
        let h = 1.0 / (n_nodes - 1) as f64;
        let (far, near) = weights_from_antiderivatives(
            n_nodes - 1,
            h,
            |u| Ok(classical_k1(k, u)),
            |u| Ok(classical_k2(k, u)),
        )?;
        march(&forcing, &qv, &far, &near)?
    };
    Ok(Solution {
        alpha: 1.0,
        lambda,
        boundary: b,
        mesh,
        y,
    })
}

/// `∫_0^u sin(kv)/k dv = 2 sin²(ku/2)/k²`.
fn classical_k1(k: f64, u: f64) -> f64 {
    let s = (0.5 * k * u).sin();
    2.0 * s * s / (k * k)
}

/// `∫_0^u K1 = (u - sin(ku)/k)/k²`, by its Taylor series for small `ku`.
fn classical_k2(k: f64, u: f64) -> f64 {
    let x = k * u;
    if x < 0.5 {
        // u³ Σ (-x²)^j / (2j+3)!
        let mut term = u * u * u / 6.0;
        let mut sum = term;
        for j in 1..12 {
            let jf = j as f64;
            term *= -x * x / ((2.0 * jf + 2.0) * (2.0 * jf + 3.0));
            sum += term;
        }
        sum
    } else {
        (u - x.sin() / k) / (k * k)
    }
}

/// Sup-norm over interior nodes of `-ᶜ𝒟^α(𝒟^α y) + q y - λ y`.
///
/// With `P = 𝓘^{1-α} y` the composition is `𝓘^{1-α} P''`, so `P''` is
/// differenced directly rather than differentiating twice. Refused for the
/// unbounded `c1` mode (`α < 1`), where `P''` grows like `t^{2α-2}`.
pub fn residual(sol: &Solution, q: &Potential) -> Result<f64> {
    let n = sol.mesh.len();
    if n < MIN_RESIDUAL_NODES {
        return domain(format!(
            "residual needs at least {MIN_RESIDUAL_NODES} nodes, got {n}"
        ));
    }
    if sol.singular() {
        return domain("residual is not defined in sup-norm for the unbounded c1 mode");
    }
    q.validate()?;
    let y = sol.sampled()?;
    let p = rl_integral_on_mesh(&y, 1.0 - sol.alpha)?;
    let p2 = second_derivative_on_mesh(&sol.mesh, &p)?;
    let p2 = SampledFunction::new(sol.mesh.clone(), p2, Interp::Linear)?;
    let v = rl_integral_on_mesh(&p2, 1.0 - sol.alpha)?;
    let mut worst: f64 = 0.0;
    for i in 1..n - 1 {
        let r = -v[i] + (q.eval(sol.mesh[i]) - sol.lambda) * sol.y[i];
        worst = worst.max(r.abs());
    }
    Ok(worst)
}
