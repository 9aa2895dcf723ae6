use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use super::dd::{self, Dd};

/// Below this the upward shift of the double-double routine gets long.
const DD_MIN_ARG: f64 = -1000.0;

/// `sin(π x)` with exact argument reduction, so that integers give exactly zero.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if n % 2.0 == 0.0 {
        s
    } else {
        -s
    }
}

/// Returns `true` for `0, -1, -2, ...`, the poles of Γ.
pub fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Reciprocal Gamma function `1/Γ(x)`, evaluated in double-double and rounded.
///
/// Entire, so it is returned as exactly `0.0` at the poles `x = 0, -1, -2, ...`.
/// For large negative non-integer `x` the value can exceed the double range and
/// is returned as `±inf`.
pub fn gamma_recip(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_gamma_pole(x) {
        return 0.0;
    }
    if x >= DD_MIN_ARG {
        return match dd::ln_gamma_recip(Dd::from_f64(x)) {
            None => 0.0,
            Some((sign, l)) => sign * l.exp().to_f64(),
        };
    }
    // reflection: 1/Γ(x) = Γ(1-x) sin(πx) / π
    sin_pi(x) * (ln_gamma(1.0 - x) - PI.ln()).exp()
}

/// `ln |Γ(x)|` for any real `x` that is not a pole.
pub fn ln_abs_gamma(x: f64) -> f64 {
    if x >= DD_MIN_ARG && !is_gamma_pole(x) {
        if let Some((_, l)) = dd::ln_gamma_recip(Dd::from_f64(x)) {
            return -l.to_f64();
        }
    }
    // |Γ(x)| = π / (|sin(πx)| Γ(1-x))
    PI.ln() - sin_pi(x).abs().ln() - ln_gamma(1.0 - x)
}
