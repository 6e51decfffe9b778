//! `1/N` scaling of the four-point function with the quartic coupling divided by N.

use super::report::{params, BoundReport, TargetId};
use crate::error::{Error, Result};
use crate::massless::{boundary_values, uv_scan, MasslessModel, ScanOptions};
use crate::series::ExtReal;

/// Largest allowed ratio between the per-N values of `sup_mu N |f4(mu)|`.
pub const SCALING_FACTOR: i64 = 2;

/// `sup` over the grid of `N |f4(mu)|` for one N, with `f2(0) = 0` and `f4(0) = 4 pi^2 c04 / N`.
pub fn scaled_f4_sup(n_components: u32, c04: &ExtReal, grid: &[ExtReal], opts: &ScanOptions) -> Result<ExtReal> {
    let p = c04.prec();
    let top = grid.iter().max_by(|a, b| a.total_cmp(b)).ok_or(Error::Contract("empty grid".into()))?;
    let model = MasslessModel::new(n_components, ExtReal::zero(p), c04.clone(), top.clone(), true)?;
    let (f2_0, f4_0) = boundary_values(&model);
    let sol = uv_scan(&model, &f2_0, &f4_0, grid, 4, opts)?;
    let sup = sol
        .rows
        .iter()
        .filter(|r| r.n == 4)
        .map(|r| r.value.abs() * n_components as i64)
        .max_by(|a, b| a.total_cmp(b))
        .expect("grid is nonempty");
    Ok(sup)
}

/// `max_N / min_N` of `sup_mu N |f4|` against the factor 2.
pub fn check_large_n_scaling(ns: &[u32], c04: &ExtReal, grid: &[ExtReal], opts: &ScanOptions) -> Result<BoundReport> {
    let sups = ns
        .iter()
        .map(|&n| scaled_f4_sup(n, c04, grid, opts))
        .collect::<Result<Vec<_>>>()?;
    let hi = sups.iter().max_by(|a, b| a.total_cmp(b)).ok_or(Error::Contract("no N values".into()))?;
    let lo = sups.iter().min_by(|a, b| a.total_cmp(b)).expect("nonempty");
    if lo.is_zero() {
        return Err(Error::Domain("N f4 vanishes on the grid".into()));
    }
    let p = c04.prec();
    let note = ns
        .iter()
        .zip(&sups)
        .map(|(n, s)| format!("N={n}:{}", s.to_sci(6)))
        .collect::<Vec<_>>()
        .join(" ");
    let ps = params([("n_values", ns.len() as i64)]);
    Ok(BoundReport::linear(TargetId::LargeNScaling, ps, hi / lo, ExtReal::from_i64(SCALING_FACTOR, p)).with_note(note))
}
