//! Generalized Mittag-Leffler function on the real axis.
//!
//! `E_{δ,θ}(z) = Σ_{k≥0} z^k / Γ(δk + θ)`
//!
//! Three evaluation routes are combined:
//!
//! - the power series in double precision, used near the origin and for
//!   positive arguments (no cancellation there);
//! - the power series in double-double arithmetic, used on the negative axis
//!   while the alternating terms stay below roughly `e^45`;
//! - the large-argument expansion on the negative axis,
//!
//!   ```text
//!   E_{δ,θ}(-x) ≈ (2/δ) x^{(1-θ)/δ} e^{u cos(π/δ)} cos(u sin(π/δ) + (1-θ)π/δ)
//!                 - Σ_{k=1}^{K} (-x)^{-k} / Γ(θ - δk),        u = x^{1/δ},
//!   ```
//!
//!   where the first line is the contribution of the conjugate pair
//!   `ζ = u e^{±iπ/δ}` (present for `1 < δ ≤ 2`) and the algebraic sum is
//!   truncated at its smallest term.
//!
//! Every evaluation carries an error estimate; the dispatcher takes the first
//! route whose estimate meets the requested tolerance.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::dd::{self, Dd};
use super::gamma::{gamma_recip, is_gamma_pole, ln_abs_gamma};
use crate::error::{domain, Error, Result};

/// Largest `x^{1/δ}` handled by the double-double series.
const EXT_U_CAP: f64 = 45.0;
/// Hard cap on the number of algebraic terms in the large-argument expansion.
const ASYM_MAX_TERMS: usize = 400;
/// Cached coefficients of the double-precision series.
const SERIES_TABLE_LEN: usize = 96;
/// Relative size of an f64 rounding error.
const EPS: f64 = f64::EPSILON;

/// Parameters `(δ, θ)` of `E_{δ,θ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    pub delta: f64,
    pub theta: f64,
}

impl MLParams {
    pub fn new(delta: f64, theta: f64) -> Result<Self> {
        let p = MLParams { delta, theta };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return domain(format!(
                "delta must be positive and finite, got {}",
                self.delta
            ));
        }
        if !self.theta.is_finite() {
            return domain(format!("theta must be finite, got {}", self.theta));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MLEvalConfig {
    /// `r0`: below this modulus the double-precision series is tried first.
    pub series_radius: f64,
    /// `r1`: on the negative axis beyond this modulus the large-argument
    /// expansion is tried before the extended-precision series.
    pub asymptotic_radius: f64,
    /// Number of algebraic terms used by [`ml_asymptotic_negative`].
    pub asymptotic_terms: usize,
    pub rel_tol: f64,
    pub max_series_terms: usize,
    /// Digits trusted in the extended-precision series (at most 31, the
    /// double-double significand).
    pub working_precision_digits: u32,
}

impl Default for MLEvalConfig {
    fn default() -> Self {
        MLEvalConfig {
            series_radius: 5.0,
            asymptotic_radius: 50.0,
            asymptotic_terms: 10,
            rel_tol: 1e-13,
            max_series_terms: 10_000,
            working_precision_digits: 31,
        }
    }
}

impl MLEvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.series_radius > 0.0 && self.series_radius <= self.asymptotic_radius) {
            return Err(Error::InvalidConfig(format!(
                "need 0 < series_radius <= asymptotic_radius, got {} and {}",
                self.series_radius, self.asymptotic_radius
            )));
        }
        if self.asymptotic_terms == 0 {
            return Err(Error::InvalidConfig("asymptotic_terms must be >= 1".into()));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig("rel_tol must be positive".into()));
        }
        if self.max_series_terms == 0 {
            return Err(Error::InvalidConfig("max_series_terms must be >= 1".into()));
        }
        if !(1..=31).contains(&self.working_precision_digits) {
            return Err(Error::InvalidConfig(format!(
                "working_precision_digits must be in 1..=31, got {}",
                self.working_precision_digits
            )));
        }
        Ok(())
    }
}

/// Which route produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    Series,
    ExtendedSeries,
    Asymptotic,
}

/// A value of `E_{δ,θ}` together with its `z`-derivative and error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub derivative: f64,
    /// Estimated absolute error of `value`.
    pub error_estimate: f64,
    pub regime: Regime,
}

/// Truncated power series in double precision.
///
/// Stops when the running term drops below `rel_tol · |sum|` (or below a tiny
/// absolute floor when the sum is close to zero) after the terms have started
/// to decrease.
pub fn ml_series(p: MLParams, z: f64, cfg: &MLEvalConfig) -> Result<f64> {
    p.validate()?;
    cfg.validate()?;
    let s = series_f64(p, z, cfg, false, None)?;
    if s.converged {
        Ok(s.value)
    } else {
        Err(Error::NonConvergence(format!(
            "E_{{{},{}}}({z}) series not converged after {} terms",
            p.delta, p.theta, cfg.max_series_terms
        )))
    }
}

/// Algebraic branch of the large-argument expansion,
/// `-Σ_{k=1}^{N} z^{-k} / Γ(θ - δk)` with `N = cfg.asymptotic_terms`.
///
/// Requires `z < 0` and `0 < δ < 2`.
pub fn ml_asymptotic_negative(p: MLParams, z: f64, cfg: &MLEvalConfig) -> Result<f64> {
    p.validate()?;
    cfg.validate()?;
    if !(z < 0.0) {
        return domain(format!("asymptotic branch needs z < 0, got {z}"));
    }
    if !(p.delta > 0.0 && p.delta < 2.0) {
        return domain(format!(
            "asymptotic branch needs 0 < delta < 2, got {}",
            p.delta
        ));
    }
    let inv = 1.0 / z;
    let mut pow = 1.0_f64;
    let mut sum = 0.0;
    for k in 1..=cfg.asymptotic_terms {
        pow *= inv;
        sum -= gamma_recip(p.theta - p.delta * k as f64) * pow;
    }
    Ok(sum)
}

/// Contribution of the conjugate exponential pair to `E_{δ,θ}(z)` for `z < 0`
/// and `1 < δ ≤ 2`; this term carries the oscillation on the negative axis.
pub fn ml_exponential_pair(p: MLParams, z: f64) -> Result<f64> {
    p.validate()?;
    if !(z < 0.0) {
        return domain(format!("exponential pair needs z < 0, got {z}"));
    }
    if !(p.delta > 1.0 && p.delta <= 2.0) {
        return domain(format!(
            "exponential pair needs 1 < delta <= 2, got {}",
            p.delta
        ));
    }
    Ok(oscillatory_pair(p, -z).0)
}

/// `E_{δ,θ}(z)` through the regime dispatcher.
///
/// Builds a fresh [`MittagLeffler`]; repeated evaluations with the same
/// parameters should reuse one evaluator instead.
pub fn ml(p: MLParams, z: f64, cfg: &MLEvalConfig) -> Result<f64> {
    MittagLeffler::new(p, cfg.clone())?.eval(z)
}

/// `d/dz E_{δ,θ}(z)`.
pub fn ml_dz(p: MLParams, z: f64, cfg: &MLEvalConfig) -> Result<f64> {
    MittagLeffler::new(p, cfg.clone())?.eval_dz(z)
}

/// Reusable evaluator for fixed `(δ, θ)`.
///
/// Coefficient tables are built on first use and shared by later calls.
#[derive(Clone, Debug)]
pub struct MittagLeffler {
    params: MLParams,
    cfg: MLEvalConfig,
    asym: OnceLock<AsymptoticTable>,
    ext: OnceLock<ExtTable>,
    series: OnceLock<Vec<f64>>,
}

impl MittagLeffler {
    pub fn new(params: MLParams, cfg: MLEvalConfig) -> Result<Self> {
        params.validate()?;
        cfg.validate()?;
        Ok(MittagLeffler {
            params,
            cfg,
            asym: OnceLock::new(),
            ext: OnceLock::new(),
            series: OnceLock::new(),
        })
    }

    /// `1/Γ(δk+θ)` for the first terms of the double-precision series.
    fn series_table(&self) -> &[f64] {
        self.series.get_or_init(|| {
            let p = self.params;
            (0..SERIES_TABLE_LEN)
                .map(|k| gamma_recip(p.delta * k as f64 + p.theta))
                .collect()
        })
    }

    pub fn params(&self) -> MLParams {
        self.params
    }

    pub fn config(&self) -> &MLEvalConfig {
        &self.cfg
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        Ok(self.evaluate(z)?.value)
    }

    pub fn eval_dz(&self, z: f64) -> Result<f64> {
        Ok(self.evaluate(z)?.derivative)
    }

    /// Value, derivative and error estimate at `z`.
    pub fn evaluate(&self, z: f64) -> Result<Evaluation> {
        if !z.is_finite() {
            return domain(format!("argument must be finite, got {z}"));
        }
        let p = self.params;
        if z == 0.0 {
            return Ok(Evaluation {
                value: gamma_recip(p.theta),
                derivative: gamma_recip(p.delta + p.theta),
                error_estimate: 0.0,
                regime: Regime::Series,
            });
        }
        if z > 0.0 {
            return self.evaluate_positive(z);
        }
        self.evaluate_negative(z)
    }

    fn evaluate_positive(&self, z: f64) -> Result<Evaluation> {
        let p = self.params;
        if max_term_ln(p, z) > 709.0 {
            return Err(Error::Overflow(format!(
                "E_{{{},{}}}({z}) exceeds the double range",
                p.delta, p.theta
            )));
        }
        let s = series_f64(p, z, &self.cfg, true, Some(self.series_table()))?;
        if !s.converged {
            return Err(Error::NonConvergence(format!(
                "E_{{{},{}}}({z}) series not converged after {} terms",
                p.delta, p.theta, self.cfg.max_series_terms
            )));
        }
        if !s.value.is_finite() || !s.derivative.is_finite() {
            return Err(Error::Overflow(format!(
                "E_{{{},{}}}({z}) exceeds the double range",
                p.delta, p.theta
            )));
        }
        Ok(Evaluation {
            value: s.value,
            derivative: s.derivative,
            error_estimate: 4.0 * EPS * s.abs_sum,
            regime: Regime::Series,
        })
    }

    fn evaluate_negative(&self, z: f64) -> Result<Evaluation> {
        let p = self.params;
        let x = -z;
        let tol = self.cfg.rel_tol;
        // Largest series term is about e^u; beyond u ~ 40 the double series is hopeless.
        let u = x.powf(1.0 / p.delta);
        let f64_err = if u < 40.0 {
            8.0 * EPS * max_term_ln(p, x).exp()
        } else {
            f64::INFINITY
        };
        let asym = (p.delta <= 2.0 && x > self.cfg.series_radius).then(|| {
            self.asym
                .get_or_init(|| AsymptoticTable::new(p))
                .evaluate(p, x)
        });
        let scale_hint = asym.map(|a| a.scale).filter(|s| *s > 0.0);
        let accept = |err: f64, value: f64| -> bool {
            err <= tol * value.abs().max(scale_hint.unwrap_or(0.0))
        };

        let mut best: Option<Evaluation> = None;
        let consider = |e: Evaluation, best: &mut Option<Evaluation>| {
            if best.is_none_or(|b| e.error_estimate < b.error_estimate) {
                *best = Some(e);
            }
        };

        if x <= self.cfg.series_radius || f64_err <= tol * scale_hint.unwrap_or(0.0) {
            let s = series_f64(p, z, &self.cfg, true, Some(self.series_table()))?;
            if s.converged && s.value.is_finite() {
                let e = Evaluation {
                    value: s.value,
                    derivative: s.derivative,
                    error_estimate: 8.0 * EPS * s.abs_sum,
                    regime: Regime::Series,
                };
                if accept(e.error_estimate, e.value) {
                    return Ok(e);
                }
                consider(e, &mut best);
            }
        }

        let asym_eval = asym.map(|a| Evaluation {
            value: a.value,
            derivative: a.derivative,
            error_estimate: a.error,
            regime: Regime::Asymptotic,
        });
        let ext_feasible = u <= EXT_U_CAP;
        if x >= self.cfg.asymptotic_radius {
            if let Some(e) = asym_eval {
                if accept(e.error_estimate, e.value) {
                    return Ok(e);
                }
            }
        }

        if ext_feasible {
            let digits = f64::from(self.cfg.working_precision_digits);
            let table = self.ext.get_or_init(|| ExtTable::new(p));
            let s = table.sum(z);
            let e = Evaluation {
                value: s.value,
                derivative: s.derivative,
                error_estimate: (10f64.powf(-digits) * s.abs_sum).max(s.rounding) + s.tail,
                regime: Regime::ExtendedSeries,
            };
            if accept(e.error_estimate, e.value) {
                return Ok(e);
            }
            consider(e, &mut best);
        }
        if let Some(e) = asym_eval {
            if accept(e.error_estimate, e.value) {
                return Ok(e);
            }
            consider(e, &mut best);
        }

        match best {
            Some(e)
                if e.error_estimate
                    <= 1e-8 * e.value.abs().max(scale_hint.unwrap_or(0.0)) + 1e-15 =>
            {
                Ok(e)
            }
            Some(e) => Err(Error::NonConvergence(format!(
                "E_{{{},{}}}({z}): best estimate {} has error ~{:.1e}",
                p.delta, p.theta, e.value, e.error_estimate
            ))),
            None => Err(Error::NonConvergence(format!(
                "E_{{{},{}}}({z}): no evaluation route applies",
                p.delta, p.theta
            ))),
        }
    }
}

struct SeriesSum {
    value: f64,
    derivative: f64,
    abs_sum: f64,
    converged: bool,
}

/// `ln` of the largest term `|z|^k / |Γ(δk+θ)|` (ignoring Γ poles).
fn max_term_ln(p: MLParams, z: f64) -> f64 {
    let lz = z.abs().ln();
    let mut best = f64::NEG_INFINITY;
    let mut k = 0usize;
    loop {
        let arg = p.delta * k as f64 + p.theta;
        let t = if is_gamma_pole(arg) {
            f64::NEG_INFINITY
        } else if arg > 0.5 {
            k as f64 * lz - ln_gamma(arg)
        } else {
            k as f64 * lz - ln_abs_gamma(arg)
        };
        if t > best {
            best = t;
        } else if arg > 1.0 && t < best - 1.0 {
            return best;
        }
        k += 1;
        if k > 1_000_000 {
            return best;
        }
    }
}

fn series_f64(
    p: MLParams,
    z: f64,
    cfg: &MLEvalConfig,
    with_derivative: bool,
    table: Option<&[f64]>,
) -> Result<SeriesSum> {
    if z == 0.0 {
        let value = gamma_recip(p.theta);
        return Ok(SeriesSum {
            value,
            derivative: gamma_recip(p.delta + p.theta),
            abs_sum: value.abs(),
            converged: true,
        });
    }
    let mut sum = 0.0;
    let mut dsum = 0.0;
    let mut abs_sum = 0.0;
    let lz = z.abs().ln();
    let neg = z < 0.0;
    let mut prev_abs = f64::INFINITY;
    let mut pow = 1.0_f64;
    for k in 0..cfg.max_series_terms {
        let arg = p.delta * k as f64 + p.theta;
        let c = match table {
            Some(t) if k < t.len() => t[k],
            _ => gamma_recip(arg),
        };
        let term = if c == 0.0 && arg <= 170.0 {
            0.0
        } else if arg <= 170.0 && pow.abs() < 1e300 {
            c * pow
        } else {
            let mag = (k as f64 * lz - ln_gamma(arg)).exp();
            let sign = if neg && k % 2 == 1 { -1.0 } else { 1.0 };
            sign * mag
        };
        pow *= z;
        sum += term;
        abs_sum += term.abs();
        if with_derivative && k > 0 {
            dsum += k as f64 * term / z;
        }
        let a = term.abs();
        if k > 0 && a != 0.0 && a <= prev_abs {
            let floor = 1e-300_f64.max(abs_sum * EPS * EPS);
            if a <= cfg.rel_tol * sum.abs() * 1e-3 || a <= floor {
                return Ok(SeriesSum {
                    value: sum,
                    derivative: dsum,
                    abs_sum,
                    converged: true,
                });
            }
        }
        if a != 0.0 {
            prev_abs = a;
        }
        if !sum.is_finite() {
            break;
        }
    }
    Ok(SeriesSum {
        value: sum,
        derivative: dsum,
        abs_sum,
        converged: false,
    })
}

/// Coefficients `R^k / Γ(δk+θ)` in double-double, with `R = EXT_U_CAP^δ`, so
/// that for `|z| ≤ R` the terms are `c̃_k (z/R)^k` with `|z/R| ≤ 1`.
#[derive(Clone, Debug)]
struct ExtTable {
    radius: f64,
    coef: Vec<Dd>,
    /// Relative error of `coef[k] w^k`, dominated by the exponential of a
    /// large logarithm.
    rel_err: Vec<f64>,
}

struct ExtSum {
    value: f64,
    derivative: f64,
    abs_sum: f64,
    /// Rounding error bound from coefficients and powers.
    rounding: f64,
    tail: f64,
}

/// Unit roundoff of double-double arithmetic, with some slack.
const DD_ULP: f64 = 2.5e-32;

impl ExtTable {
    fn new(p: MLParams) -> Self {
        let radius = EXT_U_CAP.powf(p.delta);
        let ln_r = Dd::from_f64(radius).ln();
        let mut coef = Vec::new();
        let mut rel_err = Vec::new();
        let mut peak = f64::NEG_INFINITY;
        for k in 0.. {
            let kf = k as f64;
            let arg = Dd::prod(p.delta, kf).add_f64(p.theta);
            let (c, err) = match dd::ln_gamma_recip(arg) {
                None => (Dd::ZERO, 0.0),
                Some((sign, l)) => {
                    let e = l + ln_r.mul_f64(kf);
                    let err = DD_ULP * (4.0 + l.hi.abs() + (kf * ln_r.hi).abs() + 2.0 * kf);
                    (e.exp().mul_f64(sign), err)
                }
            };
            coef.push(c);
            rel_err.push(err);
            let lmag = if c.is_zero() {
                f64::NEG_INFINITY
            } else {
                c.hi.abs().ln()
            };
            peak = peak.max(lmag);
            // past the peak and 1e-40 below it: further terms cannot matter
            if arg.hi > 2.0 && lmag < peak - 92.0 {
                break;
            }
        }
        ExtTable {
            radius,
            coef,
            rel_err,
        }
    }

    fn sum(&self, z: f64) -> ExtSum {
        let w = Dd::from_f64(z) / Dd::from_f64(self.radius);
        let mut pow = Dd::ONE;
        let mut sum = Dd::ZERO;
        let mut dsum = Dd::ZERO;
        let mut abs_sum = 0.0;
        let mut rounding = 0.0;
        let mut last = 0.0;
        for (k, c) in self.coef.iter().enumerate() {
            let term = *c * pow;
            sum = sum + term;
            if k > 0 {
                dsum = dsum + term.mul_f64(k as f64);
            }
            last = term.hi.abs();
            abs_sum += last;
            rounding += last * self.rel_err[k];
            pow = pow * w;
        }
        ExtSum {
            value: sum.to_f64(),
            derivative: (dsum / Dd::from_f64(z)).to_f64(),
            abs_sum,
            rounding: rounding + DD_ULP * abs_sum + EPS * sum.hi.abs(),
            tail: last,
        }
    }
}

/// Coefficients of the algebraic part of the large-argument expansion.
#[derive(Clone, Debug)]
struct AsymptoticTable {
    /// `sign(1/Γ(θ-δk))`, zero at the poles of Γ.
    sign: Vec<f64>,
    /// `ln |1/Γ(θ-δk)|`.
    ln_abs: Vec<f64>,
    /// `ln` of the envelope `Γ(δk+1-θ)/π ≥ |1/Γ(θ-δk)|`, used for truncation.
    ln_env: Vec<f64>,
    /// All coefficients from some index on vanish identically.
    terminates: bool,
}

#[derive(Clone, Copy, Debug)]
struct AsymptoticValue {
    value: f64,
    derivative: f64,
    error: f64,
    scale: f64,
}

impl AsymptoticTable {
    fn new(p: MLParams) -> Self {
        let mut sign = vec![0.0; ASYM_MAX_TERMS + 1];
        let mut ln_abs = vec![f64::NEG_INFINITY; ASYM_MAX_TERMS + 1];
        let mut ln_env = vec![f64::NEG_INFINITY; ASYM_MAX_TERMS + 1];
        for k in 1..=ASYM_MAX_TERMS {
            let arg = p.theta - p.delta * k as f64;
            if !is_gamma_pole(arg) {
                sign[k] = gamma_recip(arg).signum();
                ln_abs[k] = -ln_abs_gamma(arg);
            }
            let refl = 1.0 - arg;
            ln_env[k] = if refl > 0.5 {
                ln_gamma(refl) - PI.ln()
            } else {
                ln_abs[k]
            };
            ln_env[k] = ln_env[k].max(ln_abs[k]);
        }
        let integral = |v: f64| v == v.round();
        let terminates = (p.delta == 2.0 || p.delta == 1.0) && integral(p.theta);
        AsymptoticTable {
            sign,
            ln_abs,
            ln_env,
            terminates,
        }
    }

    /// Expansion at `z = -x`, `x > 0`.
    fn evaluate(&self, p: MLParams, x: f64) -> AsymptoticValue {
        let lx = x.ln();
        let z = -x;

        let (osc, dosc_dx, amp) = if p.delta > 1.0 {
            oscillatory_pair(p, x)
        } else if self.terminates {
            // δ = 1, integer θ: E_{1,θ}(z) = z^{1-θ} e^z + polynomial in 1/z
            let v = z.powi((1.0 - p.theta) as i32) * (-x).exp();
            (v, -v * ((1.0 - p.theta) / z + 1.0), v.abs())
        } else {
            (0.0, 0.0, 0.0)
        };
        // The exponential term is not part of the expansion for δ < 1 (or
        // δ = 1 with non-integer θ); bound what is neglected.
        let neglected = if p.delta <= 1.0 && !self.terminates {
            let u = x.powf(1.0 / p.delta);
            (-u + (1.0 - p.theta) / p.delta * lx).exp() / p.delta
        } else {
            0.0
        };

        let mut alg = 0.0_f64;
        let mut alg_abs = 0.0;
        let mut dalg = 0.0;
        let mut prev_env = f64::INFINITY;
        let mut error = 0.0;
        for k in 1..=ASYM_MAX_TERMS {
            let kf = k as f64;
            let env = (self.ln_env[k] - kf * lx).exp();
            if self.terminates {
                if env < EPS * EPS * (alg.abs() + amp) {
                    break;
                }
            } else {
                if k > 1 && env > prev_env {
                    error = prev_env;
                    break;
                }
                if env < 1e-3 * EPS * (alg.abs() + amp) || env == 0.0 {
                    error = env;
                    break;
                }
                if k == ASYM_MAX_TERMS {
                    error = env;
                }
            }
            if self.sign[k] != 0.0 {
                // -c_k z^{-k} with z = -x
                let mag = (self.ln_abs[k] - kf * lx).exp();
                let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
                let term = -self.sign[k] * parity * mag;
                alg += term;
                alg_abs += term.abs();
                dalg += -kf * term / z;
            }
            prev_env = env;
        }

        let value = alg + osc;
        let scale = alg.abs() + amp;
        AsymptoticValue {
            value,
            derivative: dalg - dosc_dx,
            error: error
                + neglected
                + 8.0 * EPS * scale * (1.0 + x.powf(1.0 / p.delta) * 1e-3)
                + 4.0 * EPS * alg_abs,
            scale,
        }
    }
}

/// `(value, d/dx value, amplitude)` of the conjugate-pair term at `z = -x`.
fn oscillatory_pair(p: MLParams, x: f64) -> (f64, f64, f64) {
    let d = p.delta;
    let lx = x.ln();
    let u = (lx / d).exp();
    let (s, c) = (PI / d).sin_cos();
    let amp = 2.0 / d * ((1.0 - p.theta) / d * lx + u * c).exp();
    let phase = u * s + (1.0 - p.theta) * PI / d;
    let (sp, cp) = phase.sin_cos();
    let value = amp * cp;
    // d/dx [A cos φ] = A/(δx) [((1-θ) + c u) cos φ - s u sin φ]
    let dvalue = amp / (d * x) * (((1.0 - p.theta) + c * u) * cp - s * u * sp);
    (value, dvalue, amp)
}
