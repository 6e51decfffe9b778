//! Uniform bounds on the massive kernel `h`, on `H`, `1/H` and `log H`.

use rayon::prelude::*;

use super::report::{params, BoundReport, ParamValue, TargetId};
use crate::error::{Error, Result};
use crate::massive::HKernel;
use crate::series::{factorial_real, ExtReal};

/// Largest derivative order checked.
pub const H_FAMILY_MAX_ORDER: usize = 8;

/// `256 e pi^2`, the uniform bound on `1/H`.
pub fn h_inverse_bound(p: u32) -> ExtReal {
    ExtReal::one(p).exp() * ExtReal::pi(p).powi(2) * 256
}

/// `points` equally spaced values from 0 to the kernel's `mu_max`, both ends included.
pub fn kernel_grid(kernel: &HKernel, points: usize) -> Vec<ExtReal> {
    let top = kernel.mu_max();
    let last = points.max(2) - 1;
    (0..=last).map(|i| &top * i as i64 / last as i64).collect()
}

/// `|l - 1|!`, with `|-1|! = 1`.
fn shifted_fact(l: usize, p: u32) -> ExtReal {
    factorial_real(&ExtReal::from_i64(l.max(1) as i64 - 1, p)).expect("integer factorial")
}

/// Per `(l, mu)`: `|d^l h| <= c (5e)^l |l-1|!`, `|d^l H| <= 3c (5e)^l |l-1|!`,
/// `|d^l log H| <= c C^l (5e)^(l+1) 2^l (l-1)!` for `l >= 1`, and `1/H <= C` with `C = 256 e pi^2`.
pub fn check_h_family(kernel: &HKernel, l_max: usize, grid: &[ExtReal]) -> Result<Vec<BoundReport>> {
    if l_max > H_FAMILY_MAX_ORDER {
        return Err(Error::Contract(format!("l_max must be at most {H_FAMILY_MAX_ORDER}, got {l_max}")));
    }
    let p = kernel.prec();
    let c = ExtReal::coupling_c(p);
    let big_c = h_inverse_bound(p);
    let five_e = ExtReal::one(p).exp() * 5;
    let slack = ExtReal::from_i64(2, p).powi(24 - p as i32);
    let beta0 = ParamValue::from(kernel.beta0());
    let per_point: Result<Vec<Vec<BoundReport>>> = grid
        .par_iter()
        .map(|mu| {
            let j = kernel.h_jets(mu, l_max)?;
            let ps = |l: usize| {
                let mut v = params([("l", l as i64)]);
                v.push(("mu".into(), ParamValue::from(mu)));
                v.push(("beta0".into(), beta0.clone()));
                v
            };
            let mut out = Vec::new();
            let inv = j.big_h.value().recip();
            out.push(BoundReport::log(TargetId::HInverse, ps(0), inv, big_c.clone()).with_slack(&slack));
            for l in 0..=l_max {
                let w = five_e.powi(l as i32) * shifted_fact(l, p);
                let dh = j.h.derivative_value(l).expect("order l_max").abs();
                out.push(BoundReport::log(TargetId::HDerivative, ps(l), dh, &c * &w).with_slack(&slack));
                let dbig = j.big_h.derivative_value(l).expect("order l_max").abs();
                out.push(BoundReport::log(TargetId::BigHDerivative, ps(l), dbig, &c * &w * 3).with_slack(&slack));
                if l >= 1 {
                    let dlog = j.log_h_prime.derivative_value(l - 1).expect("order l_max").abs();
                    let rhs = &c * big_c.powi(l as i32) * five_e.powi(l as i32 + 1)
                        * ExtReal::from_i64(2, p).powi(l as i32)
                        * shifted_fact(l, p);
                    out.push(BoundReport::log(TargetId::LogHDerivative, ps(l), dlog, rhs).with_slack(&slack));
                }
            }
            Ok(out)
        })
        .collect();
    Ok(per_point?.into_iter().flatten().collect())
}
