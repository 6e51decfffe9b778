//! The massless bound suite at one auto-selected K.

use super::decay::check_bn_decay;
use super::derivatives::{
    check_moment_derivatives, check_pn_derivatives, check_term_derivatives, moment_derivative_order, DerivativeConstants,
};
use super::growth::{check_coefficient_growth, seed_minimum_k, Regime, K_CAP_LOG2, K_FLOOR};
use super::report::{sort_reports, BoundReport};
use crate::error::Result;
use crate::massless::{fill_taylor_table, solve_ansatz, AnsatzSolution, ScanOptions};
use crate::series::ExtReal;
use crate::table::TaylorTable;

/// Inputs of a massless bound run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub f2_0: ExtReal,
    pub f4_0: ExtReal,
    pub n_components: u32,
    /// Growth triangle extent.
    pub n_max: usize,
    pub k_max: usize,
    /// Sample points for the derivative bounds.
    pub mus: Vec<ExtReal>,
    pub l_max: usize,
    /// Largest moment index in the derivative bounds.
    pub n_deriv: usize,
    pub scan: ScanOptions,
}

impl SuiteConfig {
    /// `f2,0 = 0.1`, `g4,0 = 0.01`, `N = 1`, triangle 40 x 40, `l <= 5`, `n <= 12`,
    /// `mu` in {0.1, 0.5, 1, 5, 20}.
    pub fn reference(prec: u32) -> Self {
        let r = |s: &str| ExtReal::parse(s, prec).expect("literal");
        SuiteConfig {
            f2_0: r("0.1"),
            f4_0: r("0.01"),
            n_components: 1,
            n_max: 40,
            k_max: 40,
            mus: ["0.1", "0.5", "1", "5", "20"].iter().map(|s| r(s)).collect(),
            l_max: 5,
            n_deriv: 12,
            scan: ScanOptions::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteResult {
    pub k: ExtReal,
    pub table: TaylorTable,
    pub ansatz: AnsatzSolution,
    pub reports: Vec<BoundReport>,
}

/// Reports at a fixed K.
pub fn suite_reports(cfg: &SuiteConfig, table: &TaylorTable, ansatz: &AnsatzSolution, k: &ExtReal) -> Result<Vec<BoundReport>> {
    let regime = Regime::Massless { n_components: cfg.n_components };
    let mut reports = check_coefficient_growth(table, regime, k)?;
    reports.extend(check_bn_decay(&ansatz.ansatz, cfg.n_components, k)?);
    reports.extend(check_term_derivatives(&cfg.mus, cfg.l_max, cfg.n_deriv)?);
    reports.extend(check_pn_derivatives(&cfg.mus, cfg.l_max, cfg.n_deriv)?);
    if cfg.n_components == 1 {
        let consts = DerivativeConstants::from_k(k)?;
        reports.extend(check_moment_derivatives(&ansatz.f2_jets, &consts, cfg.l_max, cfg.n_deriv)?);
    }
    sort_reports(&mut reports);
    Ok(reports)
}

/// Doubles K from `max(seed minimum, 25)` until every gating report passes or K reaches `2^64`.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    let p = cfg.f2_0.prec();
    let table = fill_taylor_table(&cfg.f2_0, &cfg.f4_0, cfg.n_components, cfg.n_max, cfg.k_max)?;
    let order = moment_derivative_order(cfg.l_max, cfg.n_deriv);
    let ansatz = solve_ansatz(&cfg.f2_0, &cfg.f4_0, cfg.n_components, &cfg.mus, order, &cfg.scan)?;
    let regime = Regime::Massless { n_components: cfg.n_components };
    let mut k = seed_minimum_k(&table, regime)?.max(&ExtReal::from_i64(K_FLOOR, p));
    let cap = ExtReal::from_i64(2, p).powi(K_CAP_LOG2);
    loop {
        let reports = suite_reports(cfg, &table, &ansatz, &k)?;
        if reports.iter().all(|r| r.pass) || k >= cap {
            return Ok(SuiteResult { k, table, ansatz, reports });
        }
        k *= 2;
    }
}
