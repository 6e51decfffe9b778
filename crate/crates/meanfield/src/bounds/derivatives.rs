//! Derivative bounds along the massless flow: single ansatz terms, `p_n` in X, `f2` and the moments.

use super::decay::decay_constant;
use super::report::{BoundReport, ParamValue, TargetId};
use crate::ansatz::{cl_sequence, pn_jet, pn_x_jet};
use crate::error::{Error, Result};
use crate::massless::tower_jets;
use crate::series::{factorial_real, ExtReal, Jet};

/// `K1 = 25 C(1, K)` and `K2 = 2 K1`, with `C(1, K)` the decay constant of the ansatz.
#[derive(Clone, Debug)]
pub struct DerivativeConstants {
    pub c: ExtReal,
    pub k1: ExtReal,
    pub k2: ExtReal,
}

impl DerivativeConstants {
    pub fn from_k(k: &ExtReal) -> Result<Self> {
        let c = decay_constant(1, k)?;
        Self::new(c.clone(), &c * 25, &c * 50)
    }

    pub fn new(c: ExtReal, k1: ExtReal, k2: ExtReal) -> Result<Self> {
        if !(k1 > &c * 24) {
            return Err(Error::Precondition(format!("K1 = {} must exceed 24 C = {}", k1.to_sci(6), (&c * 24).to_sci(6))));
        }
        if !(k2 > k1) {
            return Err(Error::Precondition("K2 must exceed K1".into()));
        }
        Ok(DerivativeConstants { c, k1, k2 })
    }
}

fn ps(items: &[(&str, ParamValue)]) -> Vec<(String, ParamValue)> {
    items.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn int(v: usize) -> ParamValue {
    ParamValue::from(v)
}

/// Log-margin allowance for rounding in jets that attain a bound exactly.
fn rounding_slack(p: u32) -> ExtReal {
    ExtReal::from_i64(2, p).powi(24 - p as i32)
}

fn fact(n: usize, p: u32) -> ExtReal {
    factorial_real(&ExtReal::from_i64(n as i64, p)).expect("integer factorial")
}

/// `|d^l/dmu^l p_n(n mu)| <= n^(n+l-1) mu^(n-l-1) C_l / (1 + (n mu)^n)` for `n > l + 1`.
pub fn check_term_derivatives(mus: &[ExtReal], l_max: usize, n_max: usize) -> Result<Vec<BoundReport>> {
    let cl = cl_sequence(l_max)?;
    let mut out = Vec::new();
    for mu in mus {
        let p = mu.prec();
        for n in (l_max.min(1) + 1)..=n_max {
            let jet = pn_jet(n as u32, mu, l_max)?;
            let nn = ExtReal::from_i64(n as i64, p);
            let den = (mu * &nn).powi(n as i32) + 1;
            for l in 0..=l_max.min(n.saturating_sub(2)) {
                let lhs = jet.derivative_value(l).expect("order l_max").abs();
                let rhs = nn.powi((n + l - 1) as i32) * mu.powi((n - l - 1) as i32) / &den * cl[l].with_prec(p);
                let params = ps(&[("l", int(l)), ("mu", mu.into()), ("n", int(n))]);
                out.push(BoundReport::log(TargetId::TermDerivative, params, lhs, rhs).with_slack(&rounding_slack(p)));
            }
        }
    }
    Ok(out)
}

/// X-derivatives of `p_n(X)` at `X = n mu`, against the branch for `X < 3` or `X >= 3`.
pub fn check_pn_derivatives(mus: &[ExtReal], l_max: usize, n_max: usize) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for mu in mus {
        let p = mu.prec();
        for n in 1..=n_max {
            let nn = ExtReal::from_i64(n as i64, p);
            let x = mu * &nn;
            let jet = pn_x_jet(n as u32, &x, l_max)?;
            let inner = x < 3;
            for l in 0..=l_max {
                let lhs = jet.derivative_value(l).expect("order l_max").abs();
                let three = ExtReal::from_i64(3, p).powi(l as i32 + 1);
                let rhs = if inner {
                    let e = (ExtReal::from_i64(3 * l as i64, p) / &nn).exp();
                    fact(l + 2, p) * three * e / nn.powi(l as i32) / mu.powi(2 * l as i32 + 1)
                } else {
                    three * fact(l, p) / (mu * &nn).powi(l as i32)
                };
                let params = ps(&[("l", int(l)), ("mu", mu.into()), ("n", int(n))]);
                let note = if inner { "X < 3" } else { "X >= 3" };
                out.push(BoundReport::log(TargetId::PnDerivative, params, lhs, rhs).with_note(note).with_slack(&rounding_slack(p)));
            }
        }
    }
    Ok(out)
}

/// `min(mu^(2l+1), mu^l)`.
fn m_weight(mu: &ExtReal, l: usize) -> ExtReal {
    mu.powi(2 * l as i32 + 1).min(&mu.powi(l as i32))
}

/// `f2` jet order needed for moment derivatives up to `l_max` on `f_2 .. f_{n_max}`.
pub fn moment_derivative_order(l_max: usize, n_max: usize) -> usize {
    l_max + n_max / 2 - 1
}

/// `f2` and moment derivatives of the `N = 1` flow from `f2` jets at the sample points, plus the
/// coefficient bound behind the radius of convergence in x.
pub fn check_moment_derivatives(
    f2_jets: &[Jet],
    consts: &DerivativeConstants,
    l_max: usize,
    n_max: usize,
) -> Result<Vec<BoundReport>> {
    if n_max < 2 || n_max % 2 == 1 {
        return Err(Error::Contract(format!("n_max must be even and at least 2, got {n_max}")));
    }
    let order = moment_derivative_order(l_max, n_max);
    let mut out = Vec::new();
    for f2 in f2_jets {
        let mu = f2.center();
        if !(mu > &0) {
            return Err(Error::Domain("derivative bounds need mu > 0".into()));
        }
        if f2.order() < order {
            return Err(Error::Order { needed: order, available: f2.order() });
        }
        let p = mu.prec();
        let slack = rounding_slack(p);
        let (k1, k2) = (consts.k1.with_prec(p), consts.k2.with_prec(p));
        let one = ExtReal::one(p);
        for l in 0..=l_max {
            let lhs = f2.derivative_value(l).expect("order").abs();
            let rhs = k1.powi(l as i32 + 1) * fact(l + 2, p) / m_weight(mu, l);
            let params = ps(&[("l", int(l)), ("mu", mu.into())]);
            out.push(BoundReport::log(TargetId::F2Derivative, params, lhs, rhs).with_slack(&slack));
        }
        let tower = tower_jets(f2, 1, n_max)?;
        let small = mu < &one;
        let radius = mu.min(&one) / (ExtReal::from_i64(2, p).sqrt() * &k2);
        for (n, jet) in tower.jets() {
            for l in 0..=l_max {
                let lhs = jet.derivative_value(l).expect("tower order").abs();
                let mut rhs = k2.powi((n + l - 1) as i32) * fact(n + l, p) / ((l as i64 + 1).pow(2)) / fact(n, p);
                if small {
                    rhs /= mu.powi((2 * l + n - 1) as i32);
                }
                let params = ps(&[("l", int(l)), ("mu", mu.into()), ("n", int(n))]);
                let note = if small { "mu < 1" } else { "mu >= 1" };
                out.push(BoundReport::log(TargetId::FnDerivative, params, lhs, rhs).with_note(note).with_slack(&slack));
            }
            let coeff = ExtReal::from_i64(2, p).powi(n as i32 / 2) * jet.value().abs() / n as i64;
            let lhs = coeff * radius.powi(n as i32);
            let params = ps(&[("mu", mu.into()), ("n", int(n))]);
            out.push(BoundReport::log(TargetId::RadiusFloor, params, lhs, one.clone()).with_slack(&slack));
        }
    }
    Ok(out)
}
