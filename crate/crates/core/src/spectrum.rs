//! Real eigenvalues through the characteristic function
//!
//! ```text
//! Δ(λ) = 𝓘^{1-α} y(1),   y the solution with c1 = 0, c2 = 1,
//! ```
//!
//! which is `E_{2α,2}(-λ)` for `q ≡ 0`.
//!
//! Zeros are searched on a grid that is uniform in the phase variable `w`,
//! `λ = (wπ / sin(π/(2α)))^{2α}`. In `w` the bracketing intervals `I_n` are
//! `(2n + 1/2 + 1/(2α), 2n + 3/2 + 1/(2α))`, so intervals and the gaps between
//! them are unit segments; the segment `(0, I_0.lo)` is scanned as well.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fractional::{rl_integral_left, QuadratureConfig};
use crate::special::{gamma_recip, MLEvalConfig, MLParams, MittagLeffler};
use crate::volterra::{self, BoundaryData, Potential};

/// Segments evaluated per parallel batch.
const BATCH_SEGMENTS: usize = 16;
/// Points per wavelength required of the mesh for `q ≠ 0`.
const POINTS_PER_RADIAN: f64 = 10.0;
/// Grid used by [`critical_alpha`] to check that the predicate is monotone.
const ALPHA_GRID: [f64; 9] = [0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub index: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, lambda: f64) -> bool {
        self.lo < lambda && lambda < self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub value: f64,
    /// `|Δ|` at `value`.
    pub residual: f64,
    /// The bracketing interval containing `value`, if any.
    pub bracket: Option<Interval>,
    pub refinement_iters: usize,
    /// Set for zeros resolved near a tangency of `Δ` with the axis.
    pub low_confidence: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub alpha: f64,
    pub potential_descriptor: String,
    pub eigenvalues: Vec<Eigenvalue>,
    pub n_star: usize,
    /// Largest λ scanned.
    pub search_bound: f64,
    /// `true` when `Δ` was shown to keep its sign beyond `search_bound`.
    pub tail_certified: bool,
}

impl SpectrumResult {
    /// Eigenvalues inside `interval`.
    pub fn count_in(&self, interval: &Interval) -> usize {
        self.eigenvalues
            .iter()
            .filter(|e| interval.contains(e.value))
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub lambda_max: f64,
    pub scan_points_per_interval: usize,
    /// Relative tolerance of the bisection.
    pub root_tol: f64,
    pub newton_max_iters: usize,
    /// Mesh nodes for the Volterra solve when `q ≠ 0`.
    pub mesh_nodes: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            lambda_max: 1e6,
            scan_points_per_interval: 48,
            root_tol: 1e-10,
            newton_max_iters: 5,
            mesh_nodes: 1024,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(self.lambda_max > 0.0 && self.lambda_max.is_finite()) {
            return bad(format!(
                "lambda_max must be positive, got {}",
                self.lambda_max
            ));
        }
        if !(self.root_tol > 0.0 && self.root_tol < 1.0) {
            return bad(format!(
                "root_tol must lie in (0, 1), got {}",
                self.root_tol
            ));
        }
        if self.scan_points_per_interval < 2 {
            return bad("scan_points_per_interval must be at least 2".into());
        }
        if self.newton_max_iters == 0 {
            return bad("newton_max_iters must be positive".into());
        }
        if self.mesh_nodes < volterra::MIN_NODES {
            return bad(format!(
                "mesh_nodes must be at least {}",
                volterra::MIN_NODES
            ));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.5 && alpha <= 1.0) {
        return domain(format!("alpha must lie in (0.5, 1], got {alpha}"));
    }
    Ok(())
}

/// `Δ(λ)` for fixed `α` and `q`, reusing the special-function evaluators.
#[derive(Clone, Debug)]
pub struct Characteristic {
    alpha: f64,
    q: Potential,
    mesh_nodes: usize,
    e22: MittagLeffler,
    solver: volterra::Solver,
}

impl Characteristic {
    pub fn new(alpha: f64, q: &Potential, cfg: &SearchConfig) -> Result<Self> {
        check_alpha(alpha)?;
        q.validate()?;
        cfg.validate()?;
        let e22 = MittagLeffler::new(MLParams::new(2.0 * alpha, 2.0)?, MLEvalConfig::default())?;
        Ok(Characteristic {
            alpha,
            q: q.clone(),
            mesh_nodes: cfg.mesh_nodes,
            e22,
            solver: volterra::Solver::new(alpha)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_free(&self) -> bool {
        self.q.is_zero()
    }

    /// `Δ(λ)` for `λ > 0`.
    pub fn eval(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("lambda must be positive and finite, got {lambda}"));
        }
        self.eval_at(lambda)
    }

    fn eval_at(&self, lambda: f64) -> Result<f64> {
        if self.is_free() {
            return self.e22.eval(-lambda);
        }
        let b = BoundaryData { c1: 0.0, c2: 1.0 };
        let sol = self.solver.solve(lambda, &self.q, b, self.mesh_nodes)?;
        if self.alpha == 1.0 {
            return Ok(sol.end_value());
        }
        let y = sol.sampled()?;
        rl_integral_left(&y, 1.0 - self.alpha, 1.0, &QuadratureConfig::default())
    }

    /// `dΔ/dλ`, available in closed form for `q ≡ 0` only.
    pub fn derivative(&self, lambda: f64) -> Option<Result<f64>> {
        self.is_free()
            .then(|| self.e22.eval_dz(-lambda).map(|d| -d))
    }
}

/// `Δ(λ; α, q)`: `E_{2α,2}(-λ)` for `q ≡ 0`, otherwise a Volterra solve followed
/// by `𝓘^{1-α}` at `t = 1`.
pub fn characteristic(alpha: f64, lambda: f64, q: &Potential, cfg: &SearchConfig) -> Result<f64> {
    Characteristic::new(alpha, q, cfg)?.eval(lambda)
}

/// Maps the phase variable to `λ`.
#[derive(Clone, Copy, Debug)]
struct Phase {
    alpha: f64,
    scale: f64,
}

impl Phase {
    fn new(alpha: f64) -> Self {
        let s = (std::f64::consts::PI / (2.0 * alpha)).sin();
        Phase {
            alpha,
            scale: std::f64::consts::PI / s,
        }
    }

    fn lambda(&self, w: f64) -> f64 {
        (w * self.scale).powf(2.0 * self.alpha)
    }

    fn w(&self, lambda: f64) -> f64 {
        lambda.powf(0.5 / self.alpha) / self.scale
    }

    /// Left end of `I_0` in `w`.
    fn first(&self) -> f64 {
        0.5 + 0.5 / self.alpha
    }

    /// Boundary `k` of the scan segments: `0`, then unit steps from `I_0.lo`.
    fn boundary(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.first() + (k - 1) as f64
        }
    }

    fn interval(&self, n: usize) -> Interval {
        let lo = self.first() + 2.0 * n as f64;
        Interval {
            index: n,
            lo: self.lambda(lo),
            hi: self.lambda(lo + 1.0),
        }
    }

    /// The interval containing `λ`, if any.
    fn interval_of(&self, lambda: f64) -> Option<Interval> {
        let x = self.w(lambda) - self.first();
        if x <= 0.0 {
            return None;
        }
        let n = (x / 2.0).floor() as usize;
        let iv = self.interval(n);
        iv.contains(lambda).then_some(iv)
    }
}

/// `I_0 .. I_{n_max}`:
/// `(((2n+½+1/(2α))π / sin(π/(2α)))^{2α}, ((2n+3/2+1/(2α))π / sin(π/(2α)))^{2α})`,
/// and `((2n+1)²π², (2n+2)²π²)` at `α = 1`.
pub fn bracket_intervals(alpha: f64, n_max: usize) -> Result<Vec<Interval>> {
    check_alpha(alpha)?;
    let ph = Phase::new(alpha);
    Ok((0..=n_max).map(|n| ph.interval(n)).collect())
}

/// `λ_{2n}(α) ≈ ((2n+2)π / sin(π/(2α)))^{2α}`.
pub fn asymptotic_eigenvalue(alpha: f64, n: usize) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(Phase::new(alpha).lambda(2.0 * n as f64 + 2.0))
}

/// Two-sided a-priori bounds on the first zero in `I_n`, which coincide with
/// the endpoints of `I_n`.
pub fn apriori_bounds(alpha: f64, n: usize) -> Result<(f64, f64)> {
    check_alpha(alpha)?;
    let iv = Phase::new(alpha).interval(n);
    Ok((iv.lo, iv.hi))
}

/// Shows that `E_{2α,2}(-λ)` has no zero for `λ ≥ Λ`.
///
/// For large `λ`, `λΔ(λ) = 1/Γ(2-2α) + λ·osc(λ) + Σ_{k≥2} c_k λ^{1-k}` with
/// `|osc| ≤ (1/α) λ^{-1/(2α)} e^{λ^{1/(2α)} cos(π/(2α))}`. The bound holds when
/// `λ·amp` is already decreasing at `Λ` and the perturbations stay below half
/// the leading term.
#[derive(Clone, Copy, Debug)]
struct TailCertificate {
    alpha: f64,
    lead: f64,
    decay: f64,
}

impl TailCertificate {
    fn new(alpha: f64) -> Option<Self> {
        if alpha >= 1.0 {
            return None;
        }
        let lead = gamma_recip(2.0 - 2.0 * alpha);
        let decay = -(std::f64::consts::PI / (2.0 * alpha)).cos();
        (lead > 0.0 && decay > 0.0).then_some(TailCertificate { alpha, lead, decay })
    }

    fn holds(&self, lambda: f64) -> bool {
        let d = 2.0 * self.alpha;
        let u = lambda.powf(1.0 / d);
        if u * self.decay <= d - 1.0 {
            return false;
        }
        let osc = lambda * (2.0 / d) * lambda.powf(-1.0 / d) * (-u * self.decay).exp();
        // algebraic terms beyond the first, with the first omitted one as the
        // truncation bound
        let mut tail = 0.0;
        let mut prev = f64::INFINITY;
        for k in 2..60 {
            let c = gamma_recip(2.0 - d * k as f64).abs();
            let term = c * lambda.powi(1 - k);
            if term > prev {
                return false;
            }
            tail += term;
            if term < 1e-6 * self.lead {
                break;
            }
            prev = term;
        }
        osc + tail < 0.5 * self.lead
    }
}

/// A point on the scan grid.
#[derive(Clone, Copy, Debug)]
struct Sample {
    w: f64,
    lambda: f64,
    value: f64,
}

/// A place where a zero was detected on the grid.
#[derive(Clone, Copy, Debug)]
enum Candidate {
    Exact(Sample),
    SignChange(Sample, Sample),
    /// Local extremum of `Δ` towards the axis without a sign change:
    /// neighbours and the middle sample.
    Tangency(Sample, Sample, Sample),
}

struct Scan {
    samples: Vec<Sample>,
    bound: f64,
    certified: bool,
}

fn scan(chr: &Characteristic, ph: &Phase, cfg: &SearchConfig, bound: f64) -> Result<Scan> {
    let m = cfg.scan_points_per_interval;
    let cert = if chr.is_free() {
        TailCertificate::new(chr.alpha)
    } else {
        None
    };
    let w_bound = ph.w(bound);
    let one = chr.eval_at(0.0)?;
    let mut samples = vec![Sample {
        w: 0.0,
        lambda: 0.0,
        value: one,
    }];
    let mut k = 0;
    loop {
        // grid points of the next batch of segments
        let mut pts = Vec::new();
        let mut ends = Vec::new();
        let mut last = false;
        for _ in 0..BATCH_SEGMENTS {
            let (a, b) = (ph.boundary(k), ph.boundary(k + 1));
            let b_cut = b.min(w_bound);
            for j in 1..=m {
                let w = a + (b - a) * j as f64 / m as f64;
                if w >= b_cut {
                    break;
                }
                pts.push(w);
            }
            pts.push(b_cut);
            ends.push(pts.len() - 1);
            k += 1;
            if b >= w_bound {
                last = true;
                break;
            }
        }
        let values: Vec<Result<Sample>> = pts
            .par_iter()
            .map(|&w| {
                let lambda = ph.lambda(w);
                chr.eval_at(lambda).map(|value| Sample { w, lambda, value })
            })
            .collect();
        let start = samples.len();
        for v in values {
            samples.push(v?);
        }
        if let Some(c) = cert {
            for &e in &ends {
                let s = samples[start + e];
                if c.holds(s.lambda) {
                    samples.truncate(start + e + 1);
                    return Ok(Scan {
                        bound: s.lambda,
                        samples,
                        certified: true,
                    });
                }
            }
        }
        if last {
            let b = samples.last().unwrap().lambda;
            return Ok(Scan {
                samples,
                bound: b,
                certified: false,
            });
        }
    }
}

fn candidates(samples: &[Sample]) -> Vec<Candidate> {
    let mut out = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        if s.value == 0.0 && s.lambda > 0.0 {
            out.push(Candidate::Exact(*s));
        }
        if i + 1 < samples.len() {
            let t = samples[i + 1];
            if s.value * t.value < 0.0 {
                out.push(Candidate::SignChange(*s, t));
            }
        }
        if i >= 1 && i + 1 < samples.len() {
            let (p, n) = (samples[i - 1], samples[i + 1]);
            let same = p.value.signum() == s.value.signum() && n.value.signum() == s.value.signum();
            let extremum =
                s.value != 0.0 && s.value.abs() <= p.value.abs() && s.value.abs() <= n.value.abs();
            if same && extremum && parabola_dips(p, *s, n) {
                out.push(Candidate::Tangency(p, *s, n));
            }
        }
    }
    out
}

/// `true` when the parabola through three samples (in `w`) comes within half
/// of the middle value of the axis.
fn parabola_dips(p: Sample, m: Sample, n: Sample) -> bool {
    let (h1, h2) = (m.w - p.w, n.w - m.w);
    let d1 = (m.value - p.value) / h1;
    let d2 = (n.value - m.value) / h2;
    let curv = (d2 - d1) / (h1 + h2);
    if curv * m.value >= 0.0 {
        // curving away from the axis: the middle sample is not an extremum of
        // the interpolant, keep it to be safe
        return true;
    }
    let slope = (d1 * h2 + d2 * h1) / (h1 + h2);
    let vertex = m.value - slope * slope / (4.0 * curv);
    vertex.abs() <= 0.5 * m.value.abs() || vertex.signum() != m.value.signum()
}

/// Bisection in `λ` to relative width `tol`, then Newton when `Δ'` is known.
fn refine(
    chr: &Characteristic,
    mut a: Sample,
    mut b: Sample,
    cfg: &SearchConfig,
) -> Result<(f64, f64, usize)> {
    let mut iters = 0;
    while (b.lambda - a.lambda) > cfg.root_tol * b.lambda && iters < 200 {
        let mid = 0.5 * (a.lambda + b.lambda);
        let v = chr.eval_at(mid)?;
        iters += 1;
        let s = Sample {
            w: 0.0,
            lambda: mid,
            value: v,
        };
        if v == 0.0 {
            return Ok((mid, 0.0, iters));
        }
        if v.signum() == a.value.signum() {
            a = s;
        } else {
            b = s;
        }
    }
    let (mut x, mut fx) = if a.value.abs() <= b.value.abs() {
        (a.lambda, a.value)
    } else {
        (b.lambda, b.value)
    };
    for _ in 0..cfg.newton_max_iters {
        let Some(d) = chr.derivative(x) else { break };
        let d = d?;
        if d == 0.0 || fx == 0.0 {
            break;
        }
        let xn = x - fx / d;
        if !(xn >= a.lambda && xn <= b.lambda) {
            break;
        }
        let fxn = chr.eval_at(xn)?;
        iters += 1;
        if fxn.abs() >= fx.abs() {
            break;
        }
        let done = (xn - x).abs() <= 4.0 * f64::EPSILON * x;
        x = xn;
        fx = fxn;
        if done {
            break;
        }
    }
    Ok((x, fx.abs(), iters))
}

/// Golden-section search for the extremum of `Δ` towards the axis on
/// `[p.w, n.w]`.
fn closest_approach(
    chr: &Characteristic,
    ph: &Phase,
    p: Sample,
    mid: Sample,
    n: Sample,
) -> Result<(Sample, usize)> {
    let sign = mid.value.signum();
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let eval = |w: f64| -> Result<Sample> {
        let lambda = ph.lambda(w);
        Ok(Sample {
            w,
            lambda,
            value: chr.eval_at(lambda)?,
        })
    };
    let (mut a, mut b) = (p.w, n.w);
    let mut c = eval(b - invphi * (b - a))?;
    let mut d = eval(a + invphi * (b - a))?;
    let mut best = mid;
    let mut iters = 2;
    while (b - a) > 1e-13 * b {
        for s in [c, d] {
            if sign * s.value < sign * best.value {
                best = s;
            }
        }
        if sign * best.value <= 0.0 {
            break;
        }
        if sign * c.value < sign * d.value {
            b = d.w;
            d = c;
            c = eval(b - invphi * (b - a))?;
        } else {
            a = c.w;
            c = d;
            d = eval(a + invphi * (b - a))?;
        }
        iters += 1;
    }
    for s in [c, d] {
        if sign * s.value < sign * best.value {
            best = s;
        }
    }
    Ok((best, iters))
}

fn resolve(
    chr: &Characteristic,
    ph: &Phase,
    cand: Candidate,
    cfg: &SearchConfig,
) -> Result<Vec<Eigenvalue>> {
    let make = |value: f64, residual: f64, iters: usize, low: bool| Eigenvalue {
        value,
        residual,
        bracket: ph.interval_of(value),
        refinement_iters: iters,
        low_confidence: low,
    };
    match cand {
        Candidate::Exact(s) => Ok(vec![make(s.lambda, 0.0, 0, false)]),
        Candidate::SignChange(a, b) => {
            let (x, r, it) = refine(chr, a, b, cfg)?;
            Ok(vec![make(x, r, it, false)])
        }
        Candidate::Tangency(p, mid, n) => {
            let (best, it) = closest_approach(chr, ph, p, mid, n)?;
            if best.value.signum() != mid.value.signum() && best.value != 0.0 {
                // one crossing on each side of the closest approach
                let (outer, inner) = if best.w < mid.w { (p, mid) } else { (n, mid) };
                let (x1, r1, i1) = refine(chr, outer, best, cfg)?;
                let (x2, r2, i2) = refine(chr, best, inner, cfg)?;
                Ok(vec![
                    make(x1, r1, it + i1, true),
                    make(x2, r2, it + i2, true),
                ])
            } else if best.value.abs() <= cfg.root_tol {
                Ok(vec![make(best.lambda, best.value.abs(), it, true)])
            } else {
                Ok(Vec::new())
            }
        }
    }
}

/// All real zeros of `Δ` in `(0, lambda_max]`, or up to the point past which
/// `Δ` provably keeps its sign (`q ≡ 0`, `α < 1`).
///
/// For `q ≠ 0` the scan also stops where the mesh no longer resolves the
/// oscillation, at `λ^{1/(2α)} = (mesh_nodes - 1) / 10`.
pub fn find_real_eigenvalues(
    alpha: f64,
    q: &Potential,
    cfg: &SearchConfig,
) -> Result<SpectrumResult> {
    let chr = Characteristic::new(alpha, q, cfg)?;
    let ph = Phase::new(alpha);
    let mut bound = cfg.lambda_max;
    if !chr.is_free() {
        let u_max = (cfg.mesh_nodes - 1) as f64 / POINTS_PER_RADIAN;
        bound = bound.min(u_max.powf(2.0 * alpha));
    }
    let sc = scan(&chr, &ph, cfg, bound)?;
    let cands = candidates(&sc.samples);
    let found: Vec<Result<Vec<Eigenvalue>>> = cands
        .par_iter()
        .map(|&c| resolve(&chr, &ph, c, cfg))
        .collect();
    let mut eigs = Vec::new();
    for f in found {
        eigs.extend(f?);
    }
    eigs.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut merged: Vec<Eigenvalue> = Vec::with_capacity(eigs.len());
    for e in eigs {
        match merged.last_mut() {
            Some(prev) if (e.value - prev.value).abs() <= 10.0 * cfg.root_tol * e.value => {
                if e.residual < prev.residual {
                    *prev = e;
                }
            }
            _ => merged.push(e),
        }
    }
    Ok(SpectrumResult {
        alpha,
        potential_descriptor: q.descriptor(),
        n_star: merged.len(),
        eigenvalues: merged,
        search_bound: sc.bound,
        tail_certified: sc.certified,
    })
}

/// Number of real zeros of `E_{2α,2}(-λ)`.
pub fn n_star(alpha: f64, cfg: &SearchConfig) -> Result<usize> {
    let r = find_real_eigenvalues(alpha, &Potential::Zero, cfg)?;
    if !r.tail_certified {
        return Err(Error::Inconclusive(format!(
            "zeros may continue beyond lambda_max = {} at alpha = {alpha} ({} found)",
            cfg.lambda_max, r.n_star
        )));
    }
    Ok(r.n_star)
}

/// Smallest `α` with at least one real zero of `E_{2α,2}(-λ)`, to within
/// `alpha_tol`, by bisection after checking that the predicate is monotone on
/// a coarse grid.
pub fn critical_alpha(cfg: &SearchConfig, alpha_tol: f64) -> Result<f64> {
    if !(1e-4..0.5).contains(&alpha_tol) {
        return Err(Error::InvalidConfig(format!(
            "alpha_tol must lie in [1e-4, 0.5), got {alpha_tol}"
        )));
    }
    let has_zero = |a: f64| n_star(a, cfg).map(|n| n >= 1);
    let grid: Vec<Result<bool>> = ALPHA_GRID.par_iter().map(|&a| has_zero(a)).collect();
    let mut flags = Vec::with_capacity(grid.len());
    for g in grid {
        flags.push(g?);
    }
    let Some(first) = flags.iter().position(|&f| f) else {
        return Err(Error::Inconclusive(format!(
            "no real zeros for alpha up to {}",
            ALPHA_GRID[ALPHA_GRID.len() - 1]
        )));
    };
    if flags[first..].iter().any(|&f| !f) {
        return Err(Error::Inconclusive(format!(
            "zero-existence is not monotone in alpha on the grid {ALPHA_GRID:?}: {flags:?}"
        )));
    }
    if first == 0 {
        return Err(Error::Inconclusive(format!(
            "real zeros already exist at alpha = {}",
            ALPHA_GRID[0]
        )));
    }
    let (mut lo, mut hi) = (ALPHA_GRID[first - 1], ALPHA_GRID[first]);
    while hi - lo > alpha_tol {
        let mid = 0.5 * (lo + hi);
        if has_zero(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
