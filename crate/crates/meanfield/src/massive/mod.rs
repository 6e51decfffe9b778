//! The theory with a physical infrared cutoff, in units m = 1 so that only `beta = alpha m^2` enters.

mod fill;
mod kernel;
mod scan;
mod tower;

pub use fill::{massive_seed_residuals, massive_taylor_table};
pub use kernel::{h_value, HJets, HKernel, H_jet};
pub use scan::{massive_uv_scan, Boundary, MassivePoint};
pub use tower::massive_tower_jets;

use crate::error::{Error, Result};
use crate::series::ExtReal;

#[derive(Clone, Debug)]
pub struct MassiveModel {
    pub beta0: ExtReal,
    pub c02: ExtReal,
    pub c04: ExtReal,
    /// `ln(1 + 1/beta0)`.
    pub mu_max_tilde: ExtReal,
}

impl MassiveModel {
    pub fn new(beta0: ExtReal, c02: ExtReal, c04: ExtReal) -> Result<Self> {
        let p = beta0.prec();
        // a few ulps of slack so that mu_max~ = ln 3 maps back into range
        let top = ExtReal::from_ratio(1, 2, p) * (ExtReal::from_i64(2, p).powi(8 - p as i32) + 1);
        if !(beta0 > 0) || beta0 > top {
            return Err(Error::Domain(format!("beta0 must lie in (0, 1/2], got {beta0:?}")));
        }
        let mu_max_tilde = beta0.recip().ln_1p();
        Ok(MassiveModel { beta0, c02, c04, mu_max_tilde })
    }

    /// The model whose flow range is `mu_max_tilde`: `beta0 = 1 / (e^mu - 1)`.
    pub fn from_mu_max(mu_max_tilde: &ExtReal, c02: ExtReal, c04: ExtReal) -> Result<Self> {
        if !(mu_max_tilde > &0) {
            return Err(Error::Domain("mu_max_tilde must be positive".into()));
        }
        Self::new(mu_max_tilde.exp_m1().recip(), c02, c04)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PropagatorVariant {
    /// Massless propagator with the technical cutoff `alpha <= 1/m^2`.
    MasslessCutoff,
    Massive,
}

/// Regularized propagator at momentum squared `p2`.
pub fn propagator_value(
    p2: &ExtReal,
    m: &ExtReal,
    alpha0: &ExtReal,
    alpha: &ExtReal,
    variant: PropagatorVariant,
) -> Result<ExtReal> {
    if !(alpha0 > &0) || alpha < alpha0 {
        return Err(Error::Domain("need alpha >= alpha0 > 0".into()));
    }
    if p2.is_sign_negative() && !p2.is_zero() {
        return Err(Error::Domain("p^2 must be nonnegative".into()));
    }
    let d = alpha - alpha0;
    match variant {
        PropagatorVariant::MasslessCutoff => {
            if p2.is_zero() {
                return Ok(d);
            }
            // e^(-alpha0 p2) (1 - e^(-(alpha - alpha0) p2)) / p2
            let v = -(-(&d * p2)).exp_m1() * (-(alpha0 * p2)).exp() / p2;
            Ok(v)
        }
        PropagatorVariant::Massive => {
            if !(m > &0) {
                return Err(Error::Domain("the massive propagator needs m > 0".into()));
            }
            let m2 = m * m;
            let top = m2.recip() + alpha0;
            if alpha > &top {
                return Err(Error::Domain("alpha exceeds 1/m^2 + alpha0".into()));
            }
            let x = p2 + &m2;
            let weight = (&top - alpha) * &m2;
            let v = ((-(alpha0 * &x)).exp() - (-(alpha * &x)).exp() * weight) / &x;
            Ok(v.max(&ExtReal::zero(v.prec())))
        }
    }
}

/// `f2~(0) = 2 (2 pi)^4 beta0 e^(-beta0) c02`, `f4~(0) = (2 pi)^4 e^(-2 beta0) H(0) c04`.
pub fn massive_boundary(model: &MassiveModel, kernel: &HKernel) -> Result<(ExtReal, ExtReal)> {
    let p = model.beta0.prec();
    let two_pi4 = (ExtReal::pi(p) * 2).powi(4);
    let e = (-&model.beta0).exp();
    let f2 = &two_pi4 * 2 * &model.beta0 * &e * &model.c02;
    let h0 = if model.c04.is_zero() {
        ExtReal::zero(p)
    } else {
        kernel.h_at(&ExtReal::zero(p))?
    };
    let big_h0 = ExtReal::coupling_c(p) + h0;
    let f4 = two_pi4 * &e * &e * big_h0 * &model.c04;
    Ok((f2, f4))
}
