//! O(N) moment flow with a technical infrared cutoff.

mod fill;
mod scan;
mod tower;

pub use fill::{fill_taylor_table, seed_residuals};
pub use scan::{solve_ansatz, uv_scan, AnsatzSolution, ScanOptions, ScanRow, ScanSolution};
pub use tower::{tower_jets, MomentTower};
pub(crate) use scan::{ansatz_tol, check_grid, envelope_settled};
pub(crate) use tower::{check_tower_order, pair_product};

use crate::error::{Error, Result};
use crate::series::ExtReal;

#[derive(Clone, Debug)]
pub struct MasslessModel {
    pub n_components: u32,
    pub c02: ExtReal,
    pub c04: ExtReal,
    /// `ln(1/alpha0)`.
    pub mu_max: ExtReal,
    /// Bare quartic coupling divided by N.
    pub large_n: bool,
}

impl MasslessModel {
    pub fn new(n_components: u32, c02: ExtReal, c04: ExtReal, mu_max: ExtReal, large_n: bool) -> Result<Self> {
        if n_components == 0 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        if !(mu_max > 0) {
            return Err(Error::Domain("mu_max must be positive".into()));
        }
        Ok(MasslessModel { n_components, c02, c04, mu_max, large_n })
    }

    pub fn alpha0(&self) -> ExtReal {
        (-&self.mu_max).exp()
    }
}

/// `f2(0) = 2 (2 pi)^4 alpha0 c02`, `f4(0) = 4 pi^2 c04` (over N in large-N mode).
pub fn boundary_values(model: &MasslessModel) -> (ExtReal, ExtReal) {
    let p = model.c04.prec().max(model.c02.prec());
    let two_pi = ExtReal::pi(p) * 2;
    let f2 = two_pi.powi(4) * 2 * model.alpha0() * &model.c02;
    let pi = ExtReal::pi(p);
    let mut f4 = &pi * &pi * 4 * &model.c04;
    if model.large_n {
        f4 /= model.n_components as i64;
    }
    (f2, f4)
}
