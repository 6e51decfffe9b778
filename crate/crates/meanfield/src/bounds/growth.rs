//! Factorial growth of the Taylor coefficients at mu = 0.

use super::report::{params, BoundReport, TargetId};
use crate::error::{Error, Result};
use crate::series::{ln_factorial_of_abs, ExtReal};
use crate::table::{Flow, TaylorTable};

/// Which family of growth bounds applies to a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// O(N) flow with the bare quartic coupling of order one.
    Massless { n_components: u32 },
    /// O(N) flow with the quartic coupling scaled by `1/N`.
    LargeN { n_components: u32 },
    /// Tilded coefficients of the massive flow.
    Massive,
}

impl Regime {
    fn check_table(&self, t: &TaylorTable) -> Result<()> {
        let ok = match (self, t.flow()) {
            (Regime::Massless { n_components } | Regime::LargeN { n_components }, Flow::Massless { n_components: m }) => {
                n_components == m
            }
            (Regime::Massive, Flow::Massive { .. }) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Contract(format!("table flow {:?} does not match regime {self:?}", t.flow())))
        }
    }

    fn n(&self) -> i64 {
        match self {
            Regime::Massless { n_components } | Regime::LargeN { n_components } => *n_components as i64,
            Regime::Massive => 1,
        }
    }

    /// `(a, b)` with the seed conditions `|f2,0| <= sqrt(K)/a`, `|g4,0| <= sqrt(K)/b`.
    fn seed_divisors(&self) -> (i64, i64) {
        match self {
            Regime::Massless { .. } => (4, 32),
            Regime::LargeN { n_components } => (4, 32 * *n_components as i64),
            Regime::Massive => (16, 32),
        }
    }
}

/// Smallest K allowed by the seed conditions on `f2,0` and `g4,0`.
pub fn seed_minimum_k(table: &TaylorTable, regime: Regime) -> Result<ExtReal> {
    regime.check_table(table)?;
    let (a, b) = regime.seed_divisors();
    let (f20, g40) = seeds(table)?;
    let ka = (f20 * a).powi(2);
    let kb = (g40 * b).powi(2);
    Ok(ka.max(&kb))
}

fn seeds(table: &TaylorTable) -> Result<(ExtReal, ExtReal)> {
    let f20 = table.f2(0).ok_or_else(|| Error::Contract("table has no f2,0".into()))?;
    let g40 = table.g(4, 0).ok_or_else(|| Error::Contract("table has no g4,0".into()))?;
    Ok((f20.abs(), g40.abs()))
}

fn check_seed_conditions(table: &TaylorTable, regime: Regime, k: &ExtReal) -> Result<()> {
    if !(k > &1) {
        return Err(Error::Precondition(format!("K must exceed 1, got {}", k.to_sci(8))));
    }
    let min = seed_minimum_k(table, regime)?;
    if &min > k {
        return Err(Error::Precondition(format!(
            "K = {} violates the seed conditions, which need K >= {}",
            k.to_sci(8),
            min.to_sci(8)
        )));
    }
    Ok(())
}

fn lnf(x: ExtReal) -> ExtReal {
    ln_factorial_of_abs(&x).expect("factorial of a nonnegative real")
}

/// Per-cell bounds on `|f2,k|` and `|g_{n,k}|` for the regime, one report per stored cell.
pub fn check_coefficient_growth(table: &TaylorTable, regime: Regime, k: &ExtReal) -> Result<Vec<BoundReport>> {
    regime.check_table(table)?;
    check_seed_conditions(table, regime, k)?;
    let p = table.prec();
    let kk = k.with_prec(p);
    let ln_k = kk.ln();
    let nc = regime.n();
    let ln_n = ExtReal::from_i64(nc, p).ln();
    let r = |a: i64, b: i64| ExtReal::from_ratio(a, b, p);
    let mut out = Vec::new();

    let (seed_target, growth_g, growth_f2, power) = match regime {
        Regime::Massless { .. } => (TargetId::GrowthSeed, TargetId::GrowthG, TargetId::GrowthF2, r(1, 4)),
        Regime::LargeN { .. } => (TargetId::LargeNGrowth, TargetId::LargeNGrowth, TargetId::LargeNGrowth, r(1, 4)),
        Regime::Massive => (TargetId::MassiveGrowthSeed, TargetId::MassiveGrowth, TargetId::MassiveGrowth, r(1, 8)),
    };

    for (kk_idx, f) in table.f2_coeffs().iter().enumerate() {
        let ki = kk_idx as i64;
        let ps = params([("n", 2i64), ("k", ki)]);
        // N^(k+1) K^(k+1/2) |k-3|! / (|k-1|!)^power, with the N factor only in the plain O(N) regime
        let ln_growth = |with_n: bool| {
            let mut v = &ln_k * &r(2 * ki + 1, 2) + lnf(ExtReal::from_i64(ki - 3, p)) - lnf(ExtReal::from_i64(ki - 1, p)) * &power;
            if with_n {
                v += &ln_n * (ki + 1);
            }
            v
        };
        let rep = match (regime, ki) {
            (_, 0) => continue,
            (Regime::Massless { .. }, 1) => BoundReport::log(seed_target, ps, f.abs(), &kk * nc / 2).with_note("seed"),
            (Regime::LargeN { .. } | Regime::Massive, 1) => {
                BoundReport::log(seed_target, ps, f.abs(), &kk / 2).with_note("seed")
            }
            (Regime::Massless { .. }, _) => {
                let rep = BoundReport::log(growth_f2, ps, f.abs(), ln_growth(true).exp());
                if nc > 1 {
                    let n_free = BoundReport::log(growth_f2, vec![], f.abs(), ln_growth(false).exp());
                    rep.with_note(if n_free.pass { "N-free form also holds" } else { "N-free form fails" })
                } else {
                    rep
                }
            }
            (Regime::LargeN { .. } | Regime::Massive, _) => BoundReport::log(growth_f2, ps, f.abs(), ln_growth(false).exp()),
        };
        out.push(rep);
    }

    for (n, kc, g) in table.g_cells() {
        let ni = n as i64;
        let ki = kc as i64;
        let ps = params([("n", ni), ("k", ki)]);
        let half_n = r(ni, 2);
        // K^(n/2 + k - 3/2) |n/4 + k - 3|! / (k!)^power
        let ln_main = &ln_k * (&half_n + ki - r(3, 2)) + lnf(r(ni, 4) + ki - 3) - lnf(ExtReal::from_i64(ki, p)) * &power;
        let seed_bound = |n_weight: ExtReal| -> Option<ExtReal> {
            let k32 = ExtReal::from_i64(32, p);
            let base = (&ln_k * (&half_n - r(3, 2))).exp();
            match (regime, n, kc) {
                (_, 4, 0) => None,
                (Regime::Massive, 4, 1) => Some(&kk / &k32),
                (_, 4, 1) => Some(&kk / k32 / &n_weight),
                (Regime::Massive, _, 0) | (_, _, 0) => Some(base / (2 * ni * ni) / &n_weight),
                (Regime::Massive, _, 1) => Some((&ln_k * (&half_n - r(1, 2))).exp() / ni),
                (_, _, 1) => Some(base / (ni * ni) * (&kk * ni / 2 + 1) / &n_weight),
                _ => None,
            }
        };
        match regime {
            Regime::Massless { .. } => {
                if kc <= 1 {
                    if let Some(b) = seed_bound(ExtReal::one(p)) {
                        out.push(BoundReport::log(seed_target, ps, g.abs(), b).with_note("seed"));
                    }
                } else {
                    let ln_b = ln_main + &ln_n * (&half_n + ki - 2);
                    out.push(BoundReport::log(growth_g, ps, g.abs(), ln_b.exp()));
                }
            }
            Regime::LargeN { .. } => {
                let n_weight = (&ln_n * (&half_n - 1)).exp();
                if kc <= 1 {
                    if let Some(b) = seed_bound(n_weight.clone()) {
                        out.push(BoundReport::log(seed_target, ps.clone(), g.abs(), b).with_note("seed"));
                    }
                }
                let ln_b = ln_main - &ln_n * (&half_n - 1);
                out.push(BoundReport::log(growth_g, ps, g.abs(), ln_b.exp()));
            }
            Regime::Massive => {
                if kc <= 1 {
                    if let Some(b) = seed_bound(ExtReal::one(p)) {
                        out.push(BoundReport::log(seed_target, ps.clone(), g.abs(), b).with_note("seed"));
                    }
                }
                out.push(BoundReport::log(growth_g, ps, g.abs(), ln_main.exp()));
            }
        }
    }
    Ok(out)
}

/// Floor for the automatic K, large enough for the constant-absorbing steps of the growth induction.
pub const K_FLOOR: i64 = 25;
/// Automatic K stops doubling here.
pub const K_CAP_LOG2: i32 = 64;

/// Smallest K of the form `max(seed minimum, 25) 2^j` under which every growth report passes,
/// together with those reports. Returns the reports at the cap if none passes.
pub fn select_k(table: &TaylorTable, regime: Regime) -> Result<(ExtReal, Vec<BoundReport>)> {
    let p = table.prec();
    let floor = ExtReal::from_i64(K_FLOOR, p);
    let mut k = seed_minimum_k(table, regime)?.max(&floor);
    let cap = ExtReal::from_i64(2, p).powi(K_CAP_LOG2);
    loop {
        let reports = check_coefficient_growth(table, regime, &k)?;
        if reports.iter().all(|r| r.pass) || k >= cap {
            return Ok((k, reports));
        }
        k *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::massive::{massive_taylor_table, HKernel};
    use crate::massless::fill_taylor_table;

    const P: u32 = 256;

    fn r(s: &str) -> ExtReal {
        ExtReal::parse(s, P).unwrap()
    }

    #[test]
    fn zero_table_passes_with_margin_rhs() {
        let z = ExtReal::zero(P);
        let t = fill_taylor_table(&z, &z, 1, 12, 12).unwrap();
        let k = ExtReal::from_i64(25, P);
        let reps = check_coefficient_growth(&t, Regime::Massless { n_components: 1 }, &k).unwrap();
        assert!(!reps.is_empty());
        for rep in reps {
            assert!(rep.pass);
            assert_eq!(rep.margin, rep.rhs);
        }
    }

    #[test]
    fn reference_table_passes_at_selected_k() {
        let t = fill_taylor_table(&r("0.1"), &r("0.01"), 1, 24, 24).unwrap();
        let (k, reps) = select_k(&t, Regime::Massless { n_components: 1 }).unwrap();
        assert!(reps.iter().all(|r| r.pass), "K = {}", k.to_sci(6));
        assert!(reps.iter().any(|r| r.target == TargetId::GrowthG));
        assert!(reps.iter().any(|r| r.target == TargetId::GrowthF2));
    }

    #[test]
    fn seed_condition_is_a_precondition() {
        let t = fill_taylor_table(&r("3"), &r("0.01"), 1, 8, 8).unwrap();
        let k = ExtReal::from_i64(25, P);
        let e = check_coefficient_growth(&t, Regime::Massless { n_components: 1 }, &k).unwrap_err();
        assert!(matches!(e, Error::Precondition(_)));
        assert_eq!(seed_minimum_k(&t, Regime::Massless { n_components: 1 }).unwrap(), ExtReal::from_i64(144, P));
    }

    #[test]
    fn regime_must_match_table() {
        let z = ExtReal::zero(P);
        let t = fill_taylor_table(&z, &z, 2, 8, 8).unwrap();
        let k = ExtReal::from_i64(25, P);
        assert!(check_coefficient_growth(&t, Regime::Massless { n_components: 1 }, &k).is_err());
        assert!(check_coefficient_growth(&t, Regime::Massive, &k).is_err());
    }

    #[test]
    fn large_n_and_massive_regimes() {
        for n in [2u32, 8] {
            let g40 = ExtReal::one(P) / n as i64;
            let t = fill_taylor_table(&ExtReal::zero(P), &g40, n, 16, 16).unwrap();
            let (_, reps) = select_k(&t, Regime::LargeN { n_components: n }).unwrap();
            assert!(reps.iter().all(|r| r.pass));
        }
        let kern = HKernel::new(r("0.1")).unwrap();
        let t = massive_taylor_table(&r("0.05"), &r("0.02"), &kern, 16, 16).unwrap();
        let (_, reps) = select_k(&t, Regime::Massive).unwrap();
        assert!(reps.iter().all(|r| r.pass));
        assert!(reps.iter().any(|r| r.target == TargetId::MassiveGrowthSeed));
    }
}
