use rayon::prelude::*;

use super::fill::fill_taylor_table;
use super::tower::tower_jets;
use super::MasslessModel;
use crate::ansatz::{b_from_f2, f2_jet, AnsatzCoefficients};
use crate::error::{Error, Result};
use crate::series::{ExtReal, Jet};
use crate::table::TaylorTable;

/// Controls for the ansatz size used by a scan.
#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Truncation tolerance relative to `sum |b_n| min(1, 1/(n mu))`.
    pub rel_tol: f64,
    /// First number of ansatz coefficients tried; doubled on failure.
    pub m_start: usize,
    pub m_cap: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { rel_tol: 1e-20, m_start: 32, m_cap: 512 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub mu_max: ExtReal,
    pub n: usize,
    pub value: ExtReal,
}

#[derive(Clone, Debug)]
pub struct ScanSolution {
    pub ansatz: AnsatzCoefficients,
    pub table: TaylorTable,
    pub rows: Vec<ScanRow>,
}

impl ScanSolution {
    pub fn value(&self, mu_max: &ExtReal, n: usize) -> Option<&ExtReal> {
        self.rows.iter().find(|r| r.n == n && &r.mu_max == mu_max).map(|r| &r.value)
    }
}

/// Truncation tolerance for the ansatz at `mu`.
pub(crate) fn ansatz_tol(b: &AnsatzCoefficients, mu: &ExtReal, rel_tol: f64) -> ExtReal {
    let p = b.prec();
    let one = ExtReal::one(p);
    let mut s = ExtReal::zero(p);
    for (i, bn) in b.coeffs().iter().enumerate() {
        let w = (mu * (i as i64 + 1)).recip().min(&one);
        s += bn.abs() * w;
    }
    let floor = ExtReal::from_i64(2, p).powi(-(p as i32));
    (s * ExtReal::from_f64(rel_tol, p)).max(&floor)
}

/// The largest `|b_n| 2^n / n^2` must sit in the lower half of the stored coefficients,
/// otherwise the self-derived tail constant has not seen the envelope peak yet.
pub(crate) fn envelope_settled(b: &AnsatzCoefficients) -> bool {
    let p = b.prec();
    let two = ExtReal::from_i64(2, p);
    let mut best = (0, ExtReal::zero(p));
    for (i, bn) in b.coeffs().iter().enumerate() {
        let n = i as i64 + 1;
        let v = bn.abs() * two.powi(n as i32) / (n * n);
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0 < b.len() / 2
}

pub(crate) fn check_grid(grid: &[ExtReal], n_report: usize) -> Result<()> {
    if grid.iter().any(|m| !(m > &0)) {
        return Err(Error::Domain("scan grid values must be positive".into()));
    }
    if n_report < 2 || n_report % 2 == 1 {
        return Err(Error::Contract(format!("n_report must be even and at least 2, got {n_report}")));
    }
    Ok(())
}

/// Ansatz with enough coefficients for `f2` jets of `order` at every grid point.
#[derive(Clone, Debug)]
pub struct AnsatzSolution {
    pub ansatz: AnsatzCoefficients,
    pub table: TaylorTable,
    /// `f2` jets at the grid points, in grid order.
    pub f2_jets: Vec<Jet>,
}

/// Doubles the number of ansatz coefficients from `opts.m_start` until the envelope has settled
/// and every grid jet meets the truncation tolerance.
pub fn solve_ansatz(
    f2_0: &ExtReal,
    f4_0: &ExtReal,
    n_components: u32,
    grid: &[ExtReal],
    order: usize,
    opts: &ScanOptions,
) -> Result<AnsatzSolution> {
    if grid.iter().any(|m| !(m > &0)) {
        return Err(Error::Domain("grid values must be positive".into()));
    }
    let mut m = opts.m_start.max(order + 1);
    loop {
        let table = fill_taylor_table(f2_0, f4_0, n_components, m + 2, m)?;
        let b = b_from_f2(table.f2_coeffs(), m)?;
        let attempt: Result<Vec<Jet>> = if envelope_settled(&b) {
            grid.par_iter()
                .map(|mu| f2_jet(&b, mu, order, &ansatz_tol(&b, mu, opts.rel_tol)))
                .collect()
        } else {
            Err(Error::InsufficientCoefficients { needed: 2 * m, available: m })
        };
        match attempt {
            Ok(f2_jets) => return Ok(AnsatzSolution { ansatz: b, table, f2_jets }),
            Err(Error::InsufficientCoefficients { .. }) if 2 * m <= opts.m_cap => m *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// `f_n(mu_max)` for n = 2..n_report on the grid, with the boundary data held fixed.
pub fn uv_scan(
    model: &MasslessModel,
    f2_0: &ExtReal,
    f4_0: &ExtReal,
    grid: &[ExtReal],
    n_report: usize,
    opts: &ScanOptions,
) -> Result<ScanSolution> {
    check_grid(grid, n_report)?;
    let nc = model.n_components;
    let sol = solve_ansatz(f2_0, f4_0, nc, grid, n_report / 2 - 1, opts)?;
    let rows: Result<Vec<Vec<ScanRow>>> = grid
        .par_iter()
        .zip(sol.f2_jets.par_iter())
        .map(|(mu, f2)| {
            let tower = tower_jets(f2, nc, n_report)?;
            Ok(tower
                .jets()
                .map(|(n, j)| ScanRow { mu_max: mu.clone(), n, value: j.value().clone() })
                .collect())
        })
        .collect();
    let rows = rows?.into_iter().flatten().collect();
    Ok(ScanSolution { ansatz: sol.ansatz, table: sol.table, rows })
}
