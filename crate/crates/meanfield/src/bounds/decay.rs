//! Decay of the ansatz coefficients `b_n` and the envelope sequence `c_{n,N}`.

use super::report::{params, BoundReport, TargetId};
use crate::ansatz::AnsatzCoefficients;
use crate::error::{Error, Result};
use crate::series::{ln_factorial_of_abs, ExtReal};

/// `ln c_{n,N}` with `c_{n,N} = N^(n+1) K^(n+1/2) |n-3|! / ((|n-1|!)^(1/4) (n+1)^n)`.
pub fn ln_c_n(n: u64, n_components: u32, k: &ExtReal) -> ExtReal {
    let p = k.prec();
    let ni = n as i64;
    let lnf = |x: i64| ln_factorial_of_abs(&ExtReal::from_i64(x, p)).expect("integer factorial");
    ExtReal::from_i64(n_components as i64, p).ln() * (ni + 1) + k.ln() * ExtReal::from_ratio(2 * ni + 1, 2, p)
        + lnf(ni - 3)
        - lnf(ni - 1) / 4
        - ExtReal::from_i64(ni + 1, p).ln() * ni
}

/// Increment `ln c_{m+1} - ln c_m` for `m >= 3`.
fn ln_c_step(m: f64, ln_nk: f64) -> f64 {
    ln_nk + (m - 2.0).ln() - 0.25 * m.ln() + m * (m + 1.0).ln() - (m + 1.0) * (m + 2.0).ln()
}

/// Iterations allowed while waiting for `c_{n,N}` to turn over.
const MAX_TERMS: u64 = 50_000_000;

/// `ln c_{n,N}` for `n = 3, 4, ...` in double precision, up to the first index past the
/// peak where the term has fallen below `e^floor_ln`.
fn ln_c_profile(n_components: u32, k: &ExtReal, floor_ln: f64) -> Result<Vec<f64>> {
    let ln_nk = (ExtReal::from_i64(n_components as i64, k.prec()) * k).ln().to_f64();
    let mut v = vec![ln_c_n(3, n_components, k).to_f64()];
    let mut m = 3u64;
    loop {
        let step = ln_c_step(m as f64, ln_nk);
        let next = v.last().expect("nonempty") + step;
        v.push(next);
        m += 1;
        if step < 0.0 && next < floor_ln {
            return Ok(v);
        }
        if m > MAX_TERMS {
            return Err(Error::Capacity(format!("c_(n,N) still above threshold at n = {m}")));
        }
    }
}

/// `sup_m c_{m,N} 2^(m+3) / (m+1)^2` over all `m >= 1`.
pub fn c_tilde(n_components: u32, k: &ExtReal) -> Result<ExtReal> {
    let p = k.prec();
    let weight = |m: u64| ExtReal::from_i64(2, p).ln() * (m as i64 + 3) - ExtReal::from_i64(m as i64 + 1, p).ln() * 2;
    let profile = ln_c_profile(n_components, k, -100.0)?;
    let ln2 = std::f64::consts::LN_2;
    let (best_i, _) = profile
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let m = (i + 3) as f64;
            (i, l + (m + 3.0) * ln2 - 2.0 * (m + 1.0).ln())
        })
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    // refine at full precision around the double-precision maximum, and include m = 1, 2
    let lo = (best_i as u64 + 3).saturating_sub(2).max(1);
    let candidates = [1, 2].into_iter().chain(lo..=best_i as u64 + 5);
    let best = candidates
        .map(|m| ln_c_n(m, n_components, k) + weight(m))
        .max_by(|a, b| a.total_cmp(b))
        .expect("nonempty");
    Ok(best.exp())
}

/// `C(N, K) = 1.05 max(C~(N, K), N sqrt(K) / 2)`.
pub fn decay_constant(n_components: u32, k: &ExtReal) -> Result<ExtReal> {
    let p = k.prec();
    let floor = k.sqrt() * n_components as i64 / 2;
    Ok(c_tilde(n_components, k)?.max(&floor) * ExtReal::from_ratio(105, 100, p))
}

/// `|b_n| <= C n^2 / 2^n` and the recursive envelope
/// `|b_{n+1}| <= c_{n,N} + sum_{rho | n+1, rho >= 2} |b_{(n+1)/rho}| / rho^n`.
pub fn check_bn_decay(b: &AnsatzCoefficients, n_components: u32, k: &ExtReal) -> Result<Vec<BoundReport>> {
    let p = b.prec();
    let k = k.with_prec(p);
    let c = decay_constant(n_components, &k)?;
    let two = ExtReal::from_i64(2, p);
    let mut out = Vec::new();
    for (i, bn) in b.coeffs().iter().enumerate() {
        let n = i as i64 + 1;
        let rhs = &c * (n * n) / two.powi(n as i32);
        out.push(BoundReport::log(TargetId::BnDecay, params([("n", n)]), bn.abs(), rhs));
    }
    for n in 1..b.len() {
        let m = n + 1;
        let mut rhs = ln_c_n(n as u64, n_components, &k).exp();
        for rho in 2..=m {
            if m % rho == 0 {
                let q = b.b(m / rho).expect("index below n").abs();
                rhs += q / ExtReal::from_i64(rho as i64, p).powi(n as i32);
            }
        }
        let lhs = b.b(m).expect("stored").abs();
        out.push(BoundReport::log(TargetId::CnChain, params([("n", m as i64)]), lhs, rhs));
    }
    Ok(out)
}

/// Threshold for the Cauchy tail of the `c_{n,N}` sequence.
pub const CN_TAIL_THRESHOLD: f64 = 1e-30;

/// First `n` such that `sum_{m > n} c_{m,N} < 1e-30`, with the tail beyond every `n` tabulated.
pub struct CnTail {
    /// `ln sum_{m > n} c_{m,N}` for `n = 2, 3, ...` (entry `i` is `n = i + 2`).
    ln_tails: Vec<f64>,
    pub settled_at: u64,
}

impl CnTail {
    pub fn new(n_components: u32, k: &ExtReal) -> Result<Self> {
        let floor = CN_TAIL_THRESHOLD.ln() - 80.0;
        let profile = ln_c_profile(n_components, k, floor)?;
        // suffix log-sum-exp from the negligible end; profile[i] is ln c_{i+3}
        let mut ln_tails = vec![f64::NEG_INFINITY; profile.len() + 1];
        for i in (0..profile.len()).rev() {
            let (a, b) = (ln_tails[i + 1], profile[i]);
            let hi = a.max(b);
            ln_tails[i] = hi + ((a - hi).exp() + (b - hi).exp()).ln();
        }
        let ln_thr = CN_TAIL_THRESHOLD.ln();
        let settled = ln_tails.iter().position(|t| *t < ln_thr).expect("tail reaches the floor");
        Ok(CnTail { ln_tails, settled_at: settled as u64 + 2 })
    }

    /// `ln sum_{m > n} c_{m,N}` for `n >= 2`; beyond the table the last tabulated tail bounds it.
    pub fn ln_tail(&self, n: u64) -> f64 {
        let i = ((n.max(2) - 2) as usize).min(self.ln_tails.len() - 2);
        self.ln_tails[i]
    }
}

/// Cauchy tail of `c_{n,N}` beyond `n_cut` against `1e-30`.
pub fn check_cn_tail(n_components: u32, k: &ExtReal, n_cut: u64) -> Result<BoundReport> {
    let p = k.prec();
    let tail = CnTail::new(n_components, k)?;
    let ln_tail = ExtReal::from_f64(tail.ln_tail(n_cut), p);
    let ln_thr = ExtReal::from_f64(CN_TAIL_THRESHOLD, p).ln();
    let ps = params([("N", n_components as i64), ("n_cut", n_cut as i64)]);
    Ok(BoundReport::from_logs(TargetId::CnTail, ps, ln_tail, ln_thr)
        .with_note(format!("tail first below 1e-30 beyond n = {}", tail.settled_at)))
}
