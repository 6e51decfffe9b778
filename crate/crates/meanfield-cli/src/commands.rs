//! One function per subcommand; each returns CSV header and rows, plus whether every report passed.

use meanfield::bounds::{
    check_cn_tail, check_combinatorics, check_h_family, check_large_n_scaling, kernel_grid, pair_convolution_sample, run_suite,
    seed_ratio_range, select_k, sort_reports, vandermonde_exhaustive, BoundReport, Combinatorics, Regime, SuiteConfig,
    TargetId,
};
use meanfield::hierarchical::equivalence_check;
use meanfield::massive::{massive_taylor_table, massive_uv_scan, Boundary, HKernel};
use meanfield::massless::{boundary_values, fill_taylor_table, uv_scan, MasslessModel, ScanOptions, ScanRow};
use meanfield::table::TaylorTable;
use meanfield::tensors::verify_contraction_identities;
use meanfield::ExtReal;

use crate::config::Settings;
use crate::output::{report_rows, BOUNDS_HEADER};

/// Tabular result of a command.
pub struct Output {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub all_pass: bool,
}

impl Output {
    fn table(header: &[&'static str], rows: Vec<Vec<String>>) -> Self {
        Output { header: header.to_vec(), rows, all_pass: true }
    }

    fn reports(mut reports: Vec<BoundReport>, s: &Settings) -> Self {
        sort_reports(&mut reports);
        let all_pass = reports.iter().all(|r| r.pass);
        Output { header: BOUNDS_HEADER.to_vec(), rows: report_rows(&reports, s.digits()), all_pass }
    }
}

type CmdResult = Result<Output, String>;

fn lib<T>(r: meanfield::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn check_quartic(c04: &ExtReal) -> Result<(), String> {
    if c04.is_sign_negative() && !c04.is_zero() {
        return Err(format!("c04 must be nonnegative, got {}", c04.to_sci(6)));
    }
    Ok(())
}

fn check_report_order(n: usize) -> Result<(), String> {
    if n < 2 || n % 2 == 1 {
        return Err(format!("--n-max must be even and at least 2 for scans, got {n}"));
    }
    Ok(())
}

fn scan_rows(rows: &[ScanRow], digits: usize) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| vec![r.mu_max.to_sci(digits), r.n.to_string(), r.value.to_sci(digits)])
        .collect()
}

pub struct ScanArgs {
    pub n_components: u32,
    pub c02: ExtReal,
    pub c04: ExtReal,
    pub large_n: bool,
    pub grid: Vec<ExtReal>,
}

/// `f_n(mu_max)` for each grid value; the boundary `f2(0)` depends on `mu_max` unless `c02 = 0`.
pub fn scan(a: &ScanArgs, s: &Settings) -> CmdResult {
    check_quartic(&a.c04)?;
    check_report_order(s.n_max)?;
    if a.grid.is_empty() {
        return Err("empty grid".into());
    }
    let opts = ScanOptions::default();
    let model_at = |mu: &ExtReal| MasslessModel::new(a.n_components, a.c02.clone(), a.c04.clone(), mu.clone(), a.large_n);
    let mut rows = Vec::new();
    if a.c02.is_zero() {
        let model = lib(model_at(&a.grid[0]))?;
        let (f2, f4) = boundary_values(&model);
        rows = lib(uv_scan(&model, &f2, &f4, &a.grid, s.n_max, &opts))?.rows;
    } else {
        for mu in &a.grid {
            let model = lib(model_at(mu))?;
            let (f2, f4) = boundary_values(&model);
            rows.extend(lib(uv_scan(&model, &f2, &f4, std::slice::from_ref(mu), s.n_max, &opts))?.rows);
        }
    }
    Ok(Output::table(&["mu_max", "n", "f_n"], scan_rows(&rows, s.digits())))
}

/// `f~_n(mu_max~)` with the bare couplings held fixed.
pub fn scan_massive(c02: &ExtReal, c04: &ExtReal, grid: &[ExtReal], s: &Settings) -> CmdResult {
    check_quartic(c04)?;
    check_report_order(s.n_max)?;
    let boundary = Boundary::Bare { c02: c02.clone(), c04: c04.clone() };
    let points = lib(massive_uv_scan(&boundary, grid, s.n_max, &ScanOptions::default()))?;
    let rows: Vec<ScanRow> = points.into_iter().flat_map(|p| p.rows).collect();
    Ok(Output::table(&["mu_max_tilde", "n", "f_n"], scan_rows(&rows, s.digits())))
}

pub enum FlowChoice {
    Massless { n_components: u32 },
    Massive { beta0: ExtReal },
}

fn table_rows(t: &TaylorTable, digits: usize) -> Vec<Vec<String>> {
    let f2 = t
        .f2_coeffs()
        .iter()
        .enumerate()
        .map(|(k, v)| vec!["2".to_string(), k.to_string(), v.to_sci(digits)]);
    let g = t.g_cells().map(|(n, k, v)| vec![n.to_string(), k.to_string(), v.to_sci(digits)]);
    f2.chain(g).collect()
}

/// Taylor table cells: `n = 2` rows are `f2,k`, the rest `g_{n,k}`.
pub fn table(flow: &FlowChoice, f2_0: &ExtReal, f4_0: &ExtReal, s: &Settings) -> CmdResult {
    let t = match flow {
        FlowChoice::Massless { n_components } => lib(fill_taylor_table(f2_0, f4_0, *n_components, s.n_max, s.k_max))?,
        FlowChoice::Massive { beta0 } => {
            let kernel = lib(HKernel::new(beta0.clone()))?;
            lib(massive_taylor_table(f2_0, f4_0, &kernel, s.n_max, s.k_max))?
        }
    };
    Ok(Output::table(&["n", "k", "value"], table_rows(&t, s.digits())))
}

pub fn tensors(ns: &[u32], ranks: &[usize], s: &Settings) -> CmdResult {
    let mut reports = Vec::new();
    for &n in ns {
        for &rank in ranks {
            reports.push(lib(verify_contraction_identities(n as usize, rank))?);
        }
    }
    Ok(Output::reports(reports, s))
}

pub fn oracle(ns: &[u32], s: &Settings) -> CmdResult {
    let n_max = s.n_max.min(12).max(2) & !1;
    let reports = ns
        .iter()
        .map(|&n| lib(equivalence_check(n_max, n, s.seed, s.prec)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Output::reports(reports, s))
}

pub struct BoundsArgs {
    pub target: Option<TargetId>,
    pub exhaustive: bool,
    pub n_components: u32,
    pub f2_0: ExtReal,
    pub f4_0: ExtReal,
    pub beta0: Vec<ExtReal>,
}

/// Groups of targets computed together.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Group {
    Vandermonde,
    PairConvolution,
    PairConvolutionSum,
    SeedRatio,
    QuotientRule,
    Suite,
    LargeN,
    Massive,
    Kernel,
    Oracle,
    Tensors,
    Scaling,
}

const GROUPS: [Group; 12] = [
    Group::Vandermonde,
    Group::PairConvolution,
    Group::PairConvolutionSum,
    Group::SeedRatio,
    Group::QuotientRule,
    Group::Suite,
    Group::LargeN,
    Group::Massive,
    Group::Kernel,
    Group::Oracle,
    Group::Tensors,
    Group::Scaling,
];

fn group_of(t: TargetId) -> Group {
    use TargetId::*;
    match t {
        Vandermonde => Group::Vandermonde,
        PairConvolution => Group::PairConvolution,
        PairConvolutionSum => Group::PairConvolutionSum,
        SeedRatio => Group::SeedRatio,
        QuotientRule => Group::QuotientRule,
        GrowthSeed | GrowthF2 | GrowthG | BnDecay | CnChain | CnTail | TermDerivative | PnDerivative | F2Derivative
        | FnDerivative | RadiusFloor => Group::Suite,
        LargeNGrowth => Group::LargeN,
        MassiveGrowthSeed | MassiveGrowth => Group::Massive,
        HInverse | HDerivative | BigHDerivative | LogHDerivative => Group::Kernel,
        MomentEquivalence => Group::Oracle,
        TensorContraction => Group::Tensors,
        LargeNScaling => Group::Scaling,
    }
}

/// Index beyond which the `c_{n,N}` Cauchy tail is measured.
const TAIL_CUT: u64 = 200;

const LARGE_N_VALUES: [u32; 4] = [1, 2, 4, 8];

/// `4 pi^2 c04 = 1`, so `f4(0) = 1/N` in the large-N runs.
fn large_n_quartic(p: u32) -> ExtReal {
    ExtReal::pi(p).powi(2).recip() / 4
}

fn group_reports(g: Group, a: &BoundsArgs, s: &Settings) -> Result<Vec<BoundReport>, String> {
    let p = s.prec;
    let r = |v: i64| ExtReal::from_i64(v, p);
    Ok(match g {
        Group::Vandermonde => vandermonde_exhaustive(if a.exhaustive { 12 } else { 4 }, p),
        Group::PairConvolution => lib(pair_convolution_sample(if a.exhaustive { 1000 } else { 100 }, s.seed, p))?,
        Group::PairConvolutionSum => {
            let mut out = Vec::new();
            for (n1, n2) in [(4, 4), (4, 12), (8, 8), (12, 20), (20, 20)] {
                for k in 0..=10u32 {
                    let amin = 12u32.saturating_sub(n1.min(n2)).div_ceil(4);
                    for aa in amin..=(k + 2) / 2 {
                        for (num, den) in [(1, 4), (1, 2), (3, 4)] {
                            let l = ExtReal::from_ratio(num, den, p);
                            let case = Combinatorics::PairConvolutionSum { n1, n2, k, a: aa, l };
                            out.push(lib(check_combinatorics(&case, p))?);
                        }
                    }
                }
            }
            out
        }
        Group::SeedRatio => lib(seed_ratio_range(12, if a.exhaustive { 400 } else { 60 }, p))?,
        Group::QuotientRule => (0..=8u32)
            .flat_map(|l| (0..4u64).map(move |i| (l, i)))
            .map(|(l, i)| lib(check_combinatorics(&Combinatorics::QuotientRule { l, seed: s.seed + i }, p)))
            .collect::<Result<_, _>>()?,
        Group::Suite => {
            let mut cfg = SuiteConfig::reference(p);
            cfg.f2_0 = a.f2_0.clone();
            cfg.f4_0 = a.f4_0.clone();
            cfg.n_components = a.n_components;
            cfg.n_max = s.n_max;
            cfg.k_max = s.k_max;
            let res = lib(run_suite(&cfg))?;
            let mut out = res.reports;
            out.push(lib(check_cn_tail(a.n_components, &res.k, TAIL_CUT))?);
            out
        }
        Group::LargeN => {
            let mut out = Vec::new();
            for n in LARGE_N_VALUES {
                let f4 = r(1) / n as i64;
                let t = lib(fill_taylor_table(&r(0), &f4, n, s.n_max, s.k_max))?;
                out.extend(lib(select_k(&t, Regime::LargeN { n_components: n }))?.1);
            }
            out
        }
        Group::Massive => {
            let mut out = Vec::new();
            for beta0 in &a.beta0 {
                let kernel = lib(HKernel::new(beta0.clone()))?;
                let t = lib(massive_taylor_table(&a.f2_0, &a.f4_0, &kernel, s.n_max, s.k_max))?;
                out.extend(lib(select_k(&t, Regime::Massive))?.1);
            }
            out
        }
        Group::Kernel => {
            let mut out = Vec::new();
            for beta0 in &a.beta0 {
                let kernel = lib(HKernel::new(beta0.clone()))?;
                out.extend(lib(check_h_family(&kernel, 8, &kernel_grid(&kernel, 50)))?);
            }
            out
        }
        Group::Oracle => [1, 2, 3]
            .iter()
            .map(|&n| lib(equivalence_check(12, n, s.seed, p)))
            .collect::<Result<_, _>>()?,
        Group::Tensors => {
            let mut out = Vec::new();
            for n in 1..=4 {
                for rank in [2, 4, 6, 8] {
                    out.push(lib(verify_contraction_identities(n, rank))?);
                }
            }
            out
        }
        Group::Scaling => {
            let grid: Vec<ExtReal> = (2..=20).map(|v| r(v) / 2).collect();
            vec![lib(check_large_n_scaling(&LARGE_N_VALUES, &large_n_quartic(p), &grid, &ScanOptions::default()))?]
        }
    })
}

pub fn bounds(a: &BoundsArgs, s: &Settings) -> CmdResult {
    let groups: Vec<Group> = match a.target {
        Some(t) => vec![group_of(t)],
        None => GROUPS.to_vec(),
    };
    let mut reports = Vec::new();
    for g in groups {
        reports.extend(group_reports(g, a, s)?);
    }
    if let Some(t) = a.target {
        reports.retain(|r| r.target == t);
    }
    Ok(Output::reports(reports, s))
}
