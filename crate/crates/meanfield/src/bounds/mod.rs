//! Margin reports for the growth, decay and derivative bounds along the flow.

mod combinatorics;
mod decay;
mod derivatives;
mod growth;
mod kernel;
mod report;
mod scaling;
mod suite;

pub use combinatorics::{
    check_combinatorics, pair_convolution_sample, quotient_derivatives, seed_ratio_range, vandermonde_exhaustive, Combinatorics,
};
pub use decay::{c_tilde, check_bn_decay, check_cn_tail, decay_constant, ln_c_n, CnTail, CN_TAIL_THRESHOLD};
pub use derivatives::{
    check_moment_derivatives, check_pn_derivatives, check_term_derivatives, moment_derivative_order, DerivativeConstants,
};
pub use growth::{check_coefficient_growth, seed_minimum_k, select_k, Regime, K_CAP_LOG2, K_FLOOR};
pub use kernel::{check_h_family, h_inverse_bound, kernel_grid, H_FAMILY_MAX_ORDER};
pub use report::{all_pass, log_margin, params, sort_reports, BoundReport, MarginKind, ParamValue, TargetId};
pub use scaling::{check_large_n_scaling, scaled_f4_sup, SCALING_FACTOR};
pub use suite::{run_suite, suite_reports, SuiteConfig, SuiteResult};
