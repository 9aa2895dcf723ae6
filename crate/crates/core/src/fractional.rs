//! Left Riemann-Liouville integral and left Caputo / Riemann-Liouville
//! derivatives of sampled functions on `[0, 1]`.
//!
//! `𝓘^a f(t) = 1/Γ(a) ∫_0^t f(s) (t-s)^{a-1} ds`
//!
//! Integrals use product integration: the weight `(t-s)^{a-1}` is integrated
//! exactly against the interpolant of `f` on every cell.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gauss_jacobi::{gauss_jacobi, gauss_legendre, Rule};
use crate::special::{gamma_recip, ln_abs_gamma};

/// Meshes with fewer nodes than this are flagged as coarse.
pub const COARSE_NODES: usize = 16;

const QUAD_POINTS: usize = 16;

/// How a [`SampledFunction`] is reconstructed between nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interp {
    /// Piecewise linear in the stored values.
    Linear,
    /// `f(t) = t^p g(t)` with `g` piecewise linear in the stored values;
    /// `values[0]` holds `g(0)`. Used for functions like `t^{α-1}` that are
    /// unbounded at the origin.
    PowerLaw { exponent: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
    interp: Interp,
}

impl SampledFunction {
    /// Nodes must increase strictly from `0` to `1`; values must be finite.
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, interp: Interp) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return domain(format!(
                "need at least two nodes and one value per node, got {} nodes and {} values",
                nodes.len(),
                values.len()
            ));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return domain("nodes must start at 0 and end at 1");
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("nodes must be strictly increasing");
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("value at node {i} is not finite"));
        }
        if let Interp::PowerLaw { exponent } = interp {
            if !(exponent.is_finite() && exponent > -1.0) {
                return domain(format!("power-law exponent must exceed -1, got {exponent}"));
            }
        }
        Ok(SampledFunction {
            nodes,
            values,
            interp,
        })
    }

    /// Samples `f` on `n_cells` uniform cells, linear interpolation.
    pub fn uniform(n_cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = uniform_nodes(n_cells)?;
        let values = nodes.iter().map(|&t| f(t)).collect();
        Self::new(nodes, values, Interp::Linear)
    }

    /// Samples `t^exponent g(t)` on `n_cells` uniform cells, storing `g`.
    pub fn uniform_power(n_cells: usize, exponent: f64, g: impl Fn(f64) -> f64) -> Result<Self> {
        let nodes = uniform_nodes(n_cells)?;
        let values = nodes.iter().map(|&t| g(t)).collect();
        Self::new(nodes, values, Interp::PowerLaw { exponent })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_coarse(&self) -> bool {
        self.nodes.len() < COARSE_NODES
    }

    /// Value of the interpolant at `t ∈ [0, 1]`.
    pub fn eval(&self, t: f64) -> f64 {
        let g = self.regular(t);
        match self.interp {
            Interp::Linear => g,
            Interp::PowerLaw { exponent } => power(t, exponent) * g,
        }
    }

    /// Piecewise-linear interpolant of the stored values.
    fn regular(&self, t: f64) -> f64 {
        let k = self.cell_of(t);
        let (s0, s1) = (self.nodes[k], self.nodes[k + 1]);
        let w = (t - s0) / (s1 - s0);
        self.values[k] * (1.0 - w) + self.values[k + 1] * w
    }

    /// Index `k` of the cell `[nodes[k], nodes[k+1]]` holding `t`.
    fn cell_of(&self, t: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        }
    }

    fn uniform_step(&self) -> Option<f64> {
        let n = self.nodes.len() - 1;
        let h = 1.0 / n as f64;
        let uniform = self
            .nodes
            .iter()
            .enumerate()
            .all(|(i, &x)| (x - i as f64 * h).abs() <= 1e-12);
        uniform.then_some(h)
    }
}

fn uniform_nodes(n_cells: usize) -> Result<Vec<f64>> {
    if n_cells == 0 {
        return domain("need at least one cell");
    }
    let n = n_cells as f64;
    Ok((0..=n_cells).map(|i| i as f64 / n).collect())
}

/// `t^p` with the limits at `t = 0`.
fn power(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        match p.partial_cmp(&0.0) {
            Some(std::cmp::Ordering::Greater) => 0.0,
            Some(std::cmp::Ordering::Equal) => 1.0,
            _ => f64::INFINITY,
        }
    } else {
        t.powf(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    ProductTrapezoidal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub scheme: Scheme,
    /// Number of uniform cells used when an operand is given as a closure.
    pub refinement: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            scheme: Scheme::ProductTrapezoidal,
            refinement: 1024,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.refinement == 0 {
            return Err(Error::InvalidConfig("refinement must be >= 1".into()));
        }
        Ok(())
    }
}

/// A derivative value with a flag for meshes too coarse to trust it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub coarse: bool,
}

/// Far-end and near-end weights of a cell of width `h` whose near end lies at
/// distance `u ≥ 0` from the evaluation point, for the weight `v^{a-1}`:
///
/// `far = ∫_u^{u+h} v^{a-1} (v-u)/h dv`, `near = ∫_u^{u+h} v^{a-1} (u+h-v)/h dv`.
pub(crate) fn linear_moments(a: f64, u: f64, h: f64) -> (f64, f64) {
    if u > 4.0 * h {
        // ∫_0^1 (1+ρy)^{a-1} y^m dy by the binomial series, ρ = h/u ≤ 1/4
        let rho = h / u;
        let (mut far, mut near) = (0.0, 0.0);
        let mut c = 1.0;
        for j in 0..200 {
            let jf = j as f64;
            let tf = c / (jf + 2.0);
            let tn = c / ((jf + 1.0) * (jf + 2.0));
            far += tf;
            near += tn;
            if tf.abs() <= 1e-17 * far.abs() {
                break;
            }
            c *= (a - 1.0 - jf) / (jf + 1.0) * rho;
        }
        let scale = h * u.powf(a - 1.0);
        (scale * far, scale * near)
    } else {
        let u0 = u + h;
        let m0 = (u0.powf(a) - u.powf(a)) / a;
        let m1 = (u0.powf(a + 1.0) - u.powf(a + 1.0)) / (a + 1.0);
        ((m1 - u * m0) / h, (u0 * m0 - m1) / h)
    }
}

fn check_order(order: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&order) {
        return domain(format!("integration order must lie in [0, 1], got {order}"));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return domain(format!("t must lie in (0, 1], got {t}"));
    }
    Ok(())
}

/// `𝓘^order f(t)` for `order ∈ [0, 1]` and `t ∈ (0, 1]`; order `0` is the
/// identity.
pub fn rl_integral_left(
    f: &SampledFunction,
    order: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    check_order(order)?;
    check_t(t)?;
    if order == 0.0 {
        return Ok(f.eval(t));
    }
    Ok(match f.interp {
        Interp::Linear => linear_integral(f, order, t),
        Interp::PowerLaw { exponent } => PowerLawQuad::new(order, exponent).integral(f, t),
    })
}

/// [`rl_integral_left`] of a closure sampled on `cfg.refinement` uniform cells.
pub fn rl_integral_left_fn(
    f: impl Fn(f64) -> f64,
    order: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    cfg.validate()?;
    let sampled = SampledFunction::uniform(cfg.refinement, f)?;
    rl_integral_left(&sampled, order, t, cfg)
}

fn linear_integral(f: &SampledFunction, a: f64, t: f64) -> f64 {
    let k = f.cell_of(t);
    let mut sum = 0.0;
    for i in 1..=k {
        let (s0, s1) = (f.nodes[i - 1], f.nodes[i]);
        let (far, near) = linear_moments(a, t - s1, s1 - s0);
        sum += far * f.values[i - 1] + near * f.values[i];
    }
    let s0 = f.nodes[k];
    if t > s0 {
        let (far, near) = linear_moments(a, 0.0, t - s0);
        sum += far * f.values[k] + near * f.regular(t);
    }
    sum * gamma_recip(a)
}

/// `∫_0^t s^p g(s) (t-s)^{a-1} ds` on a sampled `g`, by Gauss rules adapted to
/// the endpoint singularities.
struct PowerLawQuad {
    a: f64,
    p: f64,
    legendre: Rule,
    left: Rule,
    right: Rule,
    /// `B(p+1, a)` and `B(p+2, a)`.
    beta0: f64,
    beta1: f64,
}

impl PowerLawQuad {
    fn new(a: f64, p: f64) -> Self {
        let beta = |x: f64, y: f64| (ln_abs_gamma(x) + ln_abs_gamma(y) - ln_abs_gamma(x + y)).exp();
        PowerLawQuad {
            a,
            p,
            legendre: gauss_legendre(QUAD_POINTS),
            left: gauss_jacobi(QUAD_POINTS, 0.0, p),
            right: gauss_jacobi(QUAD_POINTS, a - 1.0, 0.0),
            beta0: beta(p + 1.0, a),
            beta1: beta(p + 2.0, a),
        }
    }

    fn integral(&self, f: &SampledFunction, t: f64) -> f64 {
        let k = f.cell_of(t);
        let mut sum = 0.0;
        for i in 0..=k {
            let s0 = f.nodes[i];
            let s1 = if i == k { t } else { f.nodes[i + 1] };
            if s1 <= s0 {
                continue;
            }
            let g0 = f.values[i];
            let g1 = if i == k {
                f.regular(t)
            } else {
                f.values[i + 1]
            };
            let g = |s: f64| g0 + (g1 - g0) * (s - s0) / (s1 - s0);
            sum += self.cell(s0, s1, t, &g);
        }
        sum * gamma_recip(self.a)
    }

    fn cell(&self, s0: f64, s1: f64, t: f64, g: &dyn Fn(f64) -> f64) -> f64 {
        let (a, p) = (self.a, self.p);
        if s0 == 0.0 && s1 == t {
            // g(s) = g(0) + slope·s integrates in closed form
            let slope = (g(s1) - g(0.0)) / s1;
            return g(0.0) * t.powf(p + a) * self.beta0 + slope * t.powf(p + 1.0 + a) * self.beta1;
        }
        if s1 == t {
            let w = t - s0;
            return w.powf(a)
                * self.right.integrate(|x| {
                    let s = s0 + w * x;
                    s.powf(p) * g(s)
                });
        }
        if s0 == 0.0 {
            if t - s1 < s1 {
                let mid = 0.5 * s1;
                return self.left_cell(mid, t, g) + self.graded(mid, s1, t, g);
            }
            return self.left_cell(s1, t, g);
        }
        self.graded(s0, s1, t, g)
    }

    /// `∫_0^c s^p g(s) (t-s)^{a-1} ds`.
    fn left_cell(&self, c: f64, t: f64, g: &dyn Fn(f64) -> f64) -> f64 {
        let (a, p) = (self.a, self.p);
        c.powf(p + 1.0)
            * self.left.integrate(|x| {
                let s = c * x;
                g(s) * (t - s).powf(a - 1.0)
            })
    }

    /// Smooth integrand on `[s0, s1]`, graded towards `t` when it is close.
    fn graded(&self, s0: f64, s1: f64, t: f64, g: &dyn Fn(f64) -> f64) -> f64 {
        let (a, p) = (self.a, self.p);
        let h = |s: f64| s.powf(p) * g(s) * (t - s).powf(a - 1.0);
        let gl = |x0: f64, x1: f64| (x1 - x0) * self.legendre.integrate(|x| h(x0 + (x1 - x0) * x));
        let gap = t - s1;
        let mut lo = s0;
        let mut sum = 0.0;
        // halve towards s1 until the remaining piece is no wider than its gap to t
        while s1 - lo > gap && s1 - lo > 1e-15 * s1 {
            let mid = lo + 0.5 * (s1 - lo);
            sum += gl(lo, mid);
            lo = mid;
        }
        sum + gl(lo, s1)
    }
}

/// `𝓘^order f` at every node, with the `t → 0` limit at node 0.
pub fn rl_integral_on_mesh(f: &SampledFunction, order: f64) -> Result<Vec<f64>> {
    check_order(order)?;
    let n = f.nodes.len();
    if order == 0.0 {
        return Ok(f.nodes.iter().map(|&t| f.eval(t)).collect());
    }
    let mut out = vec![0.0; n];
    out[0] = integral_at_origin(f, order);
    match (f.interp, f.uniform_step()) {
        (Interp::Linear, Some(h)) => {
            let (far, near): (Vec<f64>, Vec<f64>) = (0..n - 1)
                .map(|d| linear_moments(order, d as f64 * h, h))
                .unzip();
            let scale = gamma_recip(order);
            for (m, slot) in out.iter_mut().enumerate().skip(1) {
                let mut sum = far[m - 1] * f.values[0] + near[0] * f.values[m];
                for j in 1..m {
                    sum += (near[m - j] + far[m - j - 1]) * f.values[j];
                }
                *slot = sum * scale;
            }
        }
        (Interp::Linear, None) => {
            for m in 1..n {
                out[m] = linear_integral(f, order, f.nodes[m]);
            }
        }
        (Interp::PowerLaw { exponent }, _) => {
            let quad = PowerLawQuad::new(order, exponent);
            for m in 1..n {
                out[m] = quad.integral(f, f.nodes[m]);
            }
        }
    }
    Ok(out)
}

/// `lim_{t→0+} 𝓘^a f(t)`.
fn integral_at_origin(f: &SampledFunction, a: f64) -> f64 {
    match f.interp {
        Interp::Linear => 0.0,
        Interp::PowerLaw { exponent: p } => {
            // 𝓘^a t^p = Γ(p+1)/Γ(p+1+a) t^{p+a}
            let g0 = f.values[0];
            if g0 == 0.0 {
                return 0.0;
            }
            let c = (ln_abs_gamma(p + 1.0)).exp() * gamma_recip(p + 1.0 + a);
            g0 * c * power(0.0, p + a)
        }
    }
}

/// Derivative at every node: centered three-point stencils inside, one-sided
/// four-point stencils at the ends. Needs at least four nodes.
pub fn differentiate_on_mesh(nodes: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    if n < 4 || values.len() != n {
        return domain("mesh differentiation needs at least four nodes");
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = lagrange_derivative(&nodes[i - 1..=i + 1], &values[i - 1..=i + 1], nodes[i]);
    }
    d[0] = lagrange_derivative(&nodes[..4], &values[..4], nodes[0]);
    d[n - 1] = lagrange_derivative(&nodes[n - 4..], &values[n - 4..], nodes[n - 1]);
    Ok(d)
}

/// Second derivative at every node: three-point divided differences inside,
/// one-sided four-point stencils at the ends. Needs at least four nodes.
pub fn second_derivative_on_mesh(nodes: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    if n < 4 || values.len() != n {
        return domain("mesh differentiation needs at least four nodes");
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = 2.0 * divided_difference(&nodes[i - 1..=i + 1], &values[i - 1..=i + 1]);
    }
    d[0] = cubic_second_derivative(&nodes[..4], &values[..4], nodes[0]);
    d[n - 1] = cubic_second_derivative(&nodes[n - 4..], &values[n - 4..], nodes[n - 1]);
    Ok(d)
}

fn divided_difference(xs: &[f64], fs: &[f64]) -> f64 {
    if xs.len() == 1 {
        return fs[0];
    }
    let k = xs.len() - 1;
    (divided_difference(&xs[1..], &fs[1..]) - divided_difference(&xs[..k], &fs[..k]))
        / (xs[k] - xs[0])
}

/// Second derivative at `x` of the cubic through four points, from its Newton
/// form.
fn cubic_second_derivative(xs: &[f64], fs: &[f64], x: f64) -> f64 {
    let d2 = divided_difference(&xs[..3], &fs[..3]);
    let d3 = divided_difference(xs, fs);
    2.0 * d2 + 2.0 * d3 * ((x - xs[0]) + (x - xs[1]) + (x - xs[2]))
}

/// Derivative at `x` of the polynomial through `(xs, fs)`.
fn lagrange_derivative(xs: &[f64], fs: &[f64], x: f64) -> f64 {
    let mut d = 0.0;
    for k in 0..xs.len() {
        let denom: f64 = (0..xs.len())
            .filter(|&j| j != k)
            .map(|j| xs[k] - xs[j])
            .product();
        let mut num = 0.0;
        for m in (0..xs.len()).filter(|&m| m != k) {
            num += (0..xs.len())
                .filter(|&j| j != k && j != m)
                .map(|j| x - xs[j])
                .product::<f64>();
        }
        d += fs[k] * num / denom;
    }
    d
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0, 1], got {alpha}"));
    }
    Ok(())
}

/// Caputo derivative `ᶜ𝒟^α f(t) = 𝓘^{1-α} f'(t)`, with `f'` from
/// [`differentiate_on_mesh`]. Requires linear interpolation.
pub fn caputo_left(
    f: &SampledFunction,
    alpha: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    check_alpha(alpha)?;
    check_t(t)?;
    let df = sampled_derivative(f)?;
    Ok(Estimate {
        value: rl_integral_left(&df, 1.0 - alpha, t, cfg)?,
        coarse: f.is_coarse(),
    })
}

/// Caputo derivative at every node.
pub fn caputo_on_mesh(f: &SampledFunction, alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let df = sampled_derivative(f)?;
    rl_integral_on_mesh(&df, 1.0 - alpha)
}

fn sampled_derivative(f: &SampledFunction) -> Result<SampledFunction> {
    if f.interp != Interp::Linear {
        return domain("the Caputo derivative needs a function bounded at the origin");
    }
    let d = differentiate_on_mesh(&f.nodes, &f.values)?;
    SampledFunction::new(f.nodes.clone(), d, Interp::Linear)
}

/// Riemann-Liouville derivative `𝒟^α f(t) = d/dt 𝓘^{1-α} f(t)`, differencing
/// the integral over auxiliary points one local mesh step apart.
pub fn rl_derivative_left(
    f: &SampledFunction,
    alpha: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    check_alpha(alpha)?;
    check_t(t)?;
    cfg.validate()?;
    let order = 1.0 - alpha;
    let k = f.cell_of(t);
    let h = f.nodes[k + 1] - f.nodes[k];
    let g = |s: f64| -> Result<f64> {
        if s <= 0.0 {
            Ok(integral_at_origin(f, order))
        } else {
            rl_integral_left(f, order, s.min(1.0), cfg)
        }
    };
    let value = if t + h <= 1.0 + 1e-14 && t - h >= -1e-14 {
        (g(t + h)? - g(t - h)?) / (2.0 * h)
    } else {
        // one-sided three-point stencil towards the interior
        (3.0 * g(t)? - 4.0 * g(t - h)? + g(t - 2.0 * h)?) / (2.0 * h)
    };
    Ok(Estimate {
        value,
        coarse: f.is_coarse(),
    })
}

/// Riemann-Liouville derivative at every node.
pub fn rl_derivative_on_mesh(f: &SampledFunction, alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    let g = rl_integral_on_mesh(f, 1.0 - alpha)?;
    differentiate_on_mesh(&f.nodes, &g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn validation() {
        assert!(SampledFunction::new(vec![0.0, 0.5], vec![1.0, 1.0], Interp::Linear).is_err());
        assert!(
            SampledFunction::new(vec![0.0, 0.5, 0.5, 1.0], vec![1.0; 4], Interp::Linear).is_err()
        );
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0, f64::NAN], Interp::Linear).is_err());
        let pl = Interp::PowerLaw { exponent: -1.0 };
        assert!(SampledFunction::new(vec![0.0, 1.0], vec![1.0, 1.0], pl).is_err());
        let f = SampledFunction::uniform(4, |t| t).unwrap();
        assert!(rl_integral_left(&f, 0.5, 0.0, &cfg()).is_err());
        assert!(rl_integral_left(&f, 0.5, 1.5, &cfg()).is_err());
        assert!(rl_integral_left(&f, 1.5, 0.5, &cfg()).is_err());
    }

    #[test]
    fn interpolation_and_cell_lookup() {
        let f = SampledFunction::new(vec![0.0, 0.25, 1.0], vec![0.0, 1.0, 4.0], Interp::Linear)
            .unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(0.25), 1.0);
        assert_eq!(f.eval(1.0), 4.0);
        assert!((f.eval(0.625) - 2.5).abs() < 1e-15);
        assert_eq!(f.cell_of(1.0), 1);
        assert_eq!(f.cell_of(0.25), 1);
        assert_eq!(f.cell_of(0.1), 0);
    }

    #[test]
    fn moments_series_and_closed_form_agree() {
        for &a in &[0.25, 0.5, 0.9, 1.0, 1.6] {
            let h = 0.01;
            for &u in &[0.039, 0.041, 0.2] {
                let (f1, n1) = linear_moments(a, u, h);
                let u0 = u + h;
                let m0 = (u0.powf(a) - u.powf(a)) / a;
                let m1 = (u0.powf(a + 1.0) - u.powf(a + 1.0)) / (a + 1.0);
                let (f2, n2) = ((m1 - u * m0) / h, (u0 * m0 - m1) / h);
                assert!((f1 - f2).abs() < 1e-12 * f2.abs(), "a={a} u={u}");
                assert!((n1 - n2).abs() < 1e-12 * n2.abs(), "a={a} u={u}");
            }
        }
    }

    #[test]
    fn order_one_is_the_trapezoid_rule() {
        let f = SampledFunction::uniform(10, |t| t * t).unwrap();
        let v = rl_integral_left(&f, 1.0, 1.0, &cfg()).unwrap();
        let trap: f64 = (0..10)
            .map(|i| {
                let (a, b) = (i as f64 / 10.0, (i + 1) as f64 / 10.0);
                0.05 * (a * a + b * b)
            })
            .sum();
        assert!((v - trap).abs() < 1e-15);
    }

    #[test]
    fn linear_functions_are_integrated_exactly() {
        // 𝓘^a t = t^{1+a} / Γ(2+a)
        let f = SampledFunction::uniform(7, |t| t).unwrap();
        for &a in &[0.3, 0.5, 0.8] {
            for &t in &[0.3, 0.5, 1.0] {
                let v = rl_integral_left(&f, a, t, &cfg()).unwrap();
                let exact = t.powf(1.0 + a) * gamma_recip(2.0 + a);
                assert!((v - exact).abs() < 1e-14, "a={a} t={t}");
            }
        }
    }

    #[test]
    fn mesh_version_matches_pointwise() {
        let f = SampledFunction::uniform(32, |t| (3.0 * t).sin()).unwrap();
        let mesh = rl_integral_on_mesh(&f, 0.4).unwrap();
        for (i, &t) in f.nodes().iter().enumerate().skip(1) {
            let v = rl_integral_left(&f, 0.4, t, &cfg()).unwrap();
            assert!((v - mesh[i]).abs() < 1e-14, "node {i}");
        }
        assert_eq!(mesh[0], 0.0);
    }

    #[test]
    fn power_law_is_exact_for_pure_powers() {
        // 𝓘^a t^p = Γ(p+1)/Γ(p+1+a) t^{p+a}
        let (a, p) = (0.25, -0.25);
        let f = SampledFunction::uniform_power(8, p, |_| 1.0).unwrap();
        let c = ln_abs_gamma(p + 1.0).exp() * gamma_recip(p + 1.0 + a);
        for &t in &[0.125, 0.3, 0.5, 1.0] {
            let v = rl_integral_left(&f, a, t, &cfg()).unwrap();
            assert!((v - c * t.powf(p + a)).abs() < 1e-13, "t = {t}: {v}");
        }
        let mesh = rl_integral_on_mesh(&f, 1.0 - 0.75).unwrap();
        // 𝓘^{1/4} t^{-1/4} = Γ(3/4), constant
        for v in mesh {
            assert!((v - ln_abs_gamma(0.75).exp()).abs() < 1e-13);
        }
    }

    #[test]
    fn power_law_close_to_a_node() {
        let f = SampledFunction::uniform_power(8, -0.5, |t| 1.0 + t).unwrap();
        let a = 0.5;
        // 𝓘^a [t^{-1/2} + t^{1/2}]
        let exact = |t: f64| {
            ln_abs_gamma(0.5).exp() * gamma_recip(1.0) * t.powf(0.0)
                + ln_abs_gamma(1.5).exp() * gamma_recip(2.0) * t
        };
        for &t in &[0.125 + 1e-9, 0.25 + 1e-7, 0.6] {
            let v = rl_integral_left(&f, a, t, &cfg()).unwrap();
            assert!((v - exact(t)).abs() < 1e-12, "t = {t}: {v} vs {}", exact(t));
        }
    }

    #[test]
    fn derivative_stencils_are_exact_for_quadratics() {
        let nodes = vec![0.0, 0.1, 0.3, 0.35, 0.7, 1.0];
        let vals: Vec<f64> = nodes.iter().map(|x| 2.0 * x * x - x + 3.0).collect();
        let d = differentiate_on_mesh(&nodes, &vals).unwrap();
        for (x, dx) in nodes.iter().zip(d) {
            assert!((dx - (4.0 * x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_stencils_are_exact_for_cubics_at_the_ends() {
        let nodes = vec![0.0, 0.1, 0.3, 0.35, 0.7, 1.0];
        let vals: Vec<f64> = nodes
            .iter()
            .map(|x| x * x * x - 2.0 * x * x + 1.0)
            .collect();
        let d = second_derivative_on_mesh(&nodes, &vals).unwrap();
        assert!((d[0] - (-4.0)).abs() < 1e-11);
        assert!((d[5] - 2.0).abs() < 1e-11);
        // three-point stencils are exact for quadratics only
        let vals: Vec<f64> = nodes.iter().map(|x| 3.0 * x * x - x).collect();
        let d = second_derivative_on_mesh(&nodes, &vals).unwrap();
        assert!(d.iter().all(|v| (v - 6.0).abs() < 1e-10));
    }

    #[test]
    fn caputo_of_constant_is_zero_and_coarse_flag() {
        let f = SampledFunction::uniform(8, |_| 3.0).unwrap();
        let e = caputo_left(&f, 0.5, 0.5, &cfg()).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.coarse);
        let f = SampledFunction::uniform(64, |_| 3.0).unwrap();
        assert!(!caputo_left(&f, 0.5, 0.5, &cfg()).unwrap().coarse);
    }

    #[test]
    fn caputo_refuses_power_law() {
        let f = SampledFunction::uniform_power(16, -0.5, |_| 1.0).unwrap();
        assert!(caputo_left(&f, 0.5, 0.5, &cfg()).is_err());
    }
}
