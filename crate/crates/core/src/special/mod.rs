//! Reciprocal Gamma and generalized Mittag-Leffler functions.

mod dd;
mod gamma;
mod mittag_leffler;

pub use gamma::{gamma_recip, is_gamma_pole, ln_abs_gamma, sin_pi};
pub use mittag_leffler::{
    ml, ml_asymptotic_negative, ml_dz, ml_exponential_pair, ml_series, Evaluation, MLEvalConfig,
    MLParams, MittagLeffler, Regime,
};
