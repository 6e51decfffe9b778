use rayon::prelude::*;

use super::fill::massive_taylor_table;
use super::kernel::HKernel;
use super::tower::massive_tower_jets;
use super::{massive_boundary, MassiveModel};
use crate::ansatz::{b_from_f2, f2_jet, AnsatzCoefficients};
use crate::error::{Error, Result};
use crate::massless::{ansatz_tol, check_grid, envelope_settled, ScanOptions, ScanRow};
use crate::series::ExtReal;

/// Boundary data for a massive scan.
#[derive(Clone, Debug)]
pub enum Boundary {
    /// `f2~(0)` and `f4~(0)` held fixed across the grid.
    Fixed { f2t_0: ExtReal, f4t_0: ExtReal },
    /// Bare couplings held fixed; the boundary values follow `beta0` at each grid point.
    Bare { c02: ExtReal, c04: ExtReal },
}

/// Result at one grid point.
#[derive(Clone, Debug)]
pub struct MassivePoint {
    pub mu_max_tilde: ExtReal,
    pub beta0: ExtReal,
    pub ansatz: AnsatzCoefficients,
    pub rows: Vec<ScanRow>,
}

/// `f~_n(mu_max~)` for n = 2..n_report, with `beta0 = 1/(e^mu_max~ - 1)` at each grid point.
pub fn massive_uv_scan(
    boundary: &Boundary,
    grid: &[ExtReal],
    n_report: usize,
    opts: &ScanOptions,
) -> Result<Vec<MassivePoint>> {
    check_grid(grid, n_report)?;
    grid.par_iter().map(|mu| scan_point(boundary, mu, n_report, opts)).collect()
}

fn scan_point(boundary: &Boundary, mu: &ExtReal, n_report: usize, opts: &ScanOptions) -> Result<MassivePoint> {
    let p = mu.prec();
    let zero = ExtReal::zero(p);
    let (c02, c04) = match boundary {
        Boundary::Bare { c02, c04 } => (c02.clone(), c04.clone()),
        Boundary::Fixed { .. } => (zero.clone(), zero.clone()),
    };
    let model = MassiveModel::from_mu_max(mu, c02, c04)?;
    let kernel = HKernel::new(model.beta0.clone())?;
    let (f2t_0, f4t_0) = match boundary {
        Boundary::Fixed { f2t_0, f4t_0 } => (f2t_0.clone(), f4t_0.clone()),
        Boundary::Bare { .. } => massive_boundary(&model, &kernel)?,
    };
    let order = n_report / 2 - 1;
    let mut m = opts.m_start.max(order + 1);
    loop {
        let table = massive_taylor_table(&f2t_0, &f4t_0, &kernel, m + 2, m)?;
        let b = b_from_f2(table.f2_coeffs(), m)?;
        let attempt = if envelope_settled(&b) {
            let tol = ansatz_tol(&b, mu, opts.rel_tol);
            f2_jet(&b, mu, order, &tol).and_then(|f2| massive_tower_jets(&f2, &kernel, n_report))
        } else {
            Err(Error::InsufficientCoefficients { needed: 2 * m, available: m })
        };
        match attempt {
            Ok(tower) => {
                let rows = tower
                    .jets()
                    .map(|(n, j)| ScanRow { mu_max: mu.clone(), n, value: j.value().clone() })
                    .collect();
                return Ok(MassivePoint { mu_max_tilde: mu.clone(), beta0: model.beta0, ansatz: b, rows });
            }
            Err(Error::InsufficientCoefficients { .. }) if 2 * m <= opts.m_cap => m *= 2,
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    #[test]
    fn zero_couplings_scan_to_zero() {
        let z = ExtReal::zero(P);
        let grid = vec![ExtReal::from_i64(10, P)];
        let b = Boundary::Bare { c02: z.clone(), c04: z };
        let pts = massive_uv_scan(&b, &grid, 6, &ScanOptions::default()).unwrap();
        assert!(pts[0].rows.iter().all(|r| r.value.is_zero()));
    }
}
