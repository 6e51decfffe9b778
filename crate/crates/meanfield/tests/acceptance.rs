//! One pass/fail line per acceptance criterion; exits nonzero if any criterion fails.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use meanfield::ansatz::{b_from_f2, f2_jet};
use meanfield::bounds::{
    check_cn_tail, check_h_family, check_large_n_scaling, kernel_grid, run_suite, seed_ratio_range, select_k,
    vandermonde_exhaustive, BoundReport, Regime, SuiteConfig,
};
use meanfield::hierarchical::{convolution_discrepancy, equivalence_check, PotentialPoly};
use meanfield::massive::{h_value, massive_taylor_table, massive_uv_scan, Boundary, HKernel};
use meanfield::massless::{boundary_values, fill_taylor_table, tower_jets, uv_scan, MasslessModel, ScanOptions};
use meanfield::series::{factorial_int, factorial_real, jet_div, jet_exp, jet_mul, ExtReal, Jet};
use meanfield::tensors::verify_contraction_identities;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const P: u32 = 256;

type Outcome = Result<String, String>;

fn r(s: &str) -> ExtReal {
    ExtReal::parse(s, P).expect("literal")
}

fn within_time(t0: Instant, limit: u64, detail: String) -> Outcome {
    let el = t0.elapsed();
    if el > Duration::from_secs(limit) {
        return Err(format!("{detail}; over the {limit} s budget"));
    }
    Ok(detail)
}

fn first_failure(reports: &[BoundReport]) -> Option<String> {
    reports.iter().find(|x| !x.pass).map(|x| format!("{} {} margin {}", x.target, x.params_string(), x.margin.to_sci(4)))
}

fn strictly_decreasing(v: &[ExtReal]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn triviality_scan() -> Outcome {
    let t0 = Instant::now();
    let grid: Vec<ExtReal> = ["10", "100", "1000", "10000"].iter().map(|s| r(s)).collect();
    let model = MasslessModel::new(1, r("0"), r("1"), grid[3].clone(), false).map_err(|e| e.to_string())?;
    let (f2_0, f4_0) = boundary_values(&model);
    let sol = uv_scan(&model, &f2_0, &f4_0, &grid, 12, &ScanOptions::default()).map_err(|e| e.to_string())?;
    let at = |n: usize| -> Vec<ExtReal> { grid.iter().map(|m| sol.value(m, n).expect("row").abs()).collect() };
    let (f2, f4) = (at(2), at(4));
    if !strictly_decreasing(&f2) || !strictly_decreasing(&f4) {
        return Err("|f2| or |f4| not strictly decreasing along the grid".into());
    }
    // mu p_n(n mu) -> 1/n term by term
    let limit = sol.ansatz.coeffs().iter().enumerate().fold(ExtReal::zero(P), |s, (i, b)| s + b / (i as i64 + 1));
    let scaled = &grid[3] * sol.value(&grid[3], 2).expect("row");
    let rel = scaled.rel_diff(&limit).to_f64();
    if rel >= 0.01 {
        return Err(format!("mu f2 = {} vs sum b_n/n = {}: rel {rel:.3e}", scaled.to_sci(6), limit.to_sci(6)));
    }
    within_time(
        t0,
        60,
        format!("|f4| {} -> {}; mu f2 vs sum b_n/n rel {rel:.2e}", f4[0].to_sci(4), f4[3].to_sci(4)),
    )
}

fn two_path_consistency() -> Outcome {
    let t0 = Instant::now();
    let order = 24;
    let mut worst = 0f64;
    let mut cells = 0;
    for nc in [1u32, 2, 4] {
        let table = fill_taylor_table(&r("0.1"), &r("0.01"), nc, 26, 26).map_err(|e| e.to_string())?;
        let b = b_from_f2(table.f2_coeffs(), order + 1).map_err(|e| e.to_string())?;
        let f2 = f2_jet(&b, &ExtReal::zero(P), order, &r("1e-70")).map_err(|e| e.to_string())?;
        let tower = tower_jets(&f2, nc, 24).map_err(|e| e.to_string())?;
        for (n, jet) in tower.jets() {
            // mu^j in f_n is g_{n,k} with j = k + n/2 - 2, and f2,j for n = 2
            let shift = if n == 2 { 0 } else { n / 2 - 2 };
            for (j, a) in jet.coeffs().iter().enumerate() {
                let Some(t) = table.moment_coeff(n, j) else { continue };
                if n + j.saturating_sub(shift) > 24 {
                    continue;
                }
                cells += 1;
                let scale = a.abs().max(&t.abs()).to_f64().max(1e-40);
                worst = worst.max((a - &t).abs().to_f64() / scale);
            }
        }
    }
    if worst > 1e-20 {
        return Err(format!("worst relative mismatch {worst:.3e} over {cells} cells"));
    }
    within_time(t0, 30, format!("{cells} cells, worst relative mismatch {worst:.2e}"))
}

fn margin_map(reports: &[BoundReport]) -> HashMap<String, ExtReal> {
    reports.iter().map(|x| (format!("{}|{}", x.target, x.params_string()), x.margin.clone())).collect()
}

fn bound_suite() -> Outcome {
    let lo = run_suite(&SuiteConfig::reference(P)).map_err(|e| e.to_string())?;
    let hi = run_suite(&SuiteConfig::reference(2 * P)).map_err(|e| e.to_string())?;
    if let Some(f) = first_failure(&lo.reports) {
        return Err(format!("K = {}: {f}", lo.k.to_sci(4)));
    }
    if lo.k.to_f64() != hi.k.to_f64() {
        return Err(format!("K moved under doubled precision: {} vs {}", lo.k.to_sci(4), hi.k.to_sci(4)));
    }
    let m_hi = margin_map(&hi.reports);
    let floor = ExtReal::from_f64(1e-30, P);
    let mut drift = 0f64;
    for (key, m) in margin_map(&lo.reports) {
        let other = m_hi.get(&key).ok_or(format!("report {key} missing at doubled precision"))?;
        let other = other.with_prec(P);
        let scale = m.abs().max(&other.abs()).max(&floor);
        drift = drift.max(((&m - &other).abs() / scale).to_f64());
    }
    if drift >= 1e-10 {
        return Err(format!("margin drift {drift:.3e} under doubled precision"));
    }
    Ok(format!(
        "K = {} at {P} and {} bits, {} reports, M = {}, margin drift {drift:.1e}",
        lo.k.to_sci(4),
        2 * P,
        lo.reports.len(),
        lo.ansatz.ansatz.len()
    ))
}

fn exact_identities() -> Outcome {
    let t0 = Instant::now();
    let mut reports = vandermonde_exhaustive(12, P);
    reports.extend(seed_ratio_range(12, 400, P).map_err(|e| e.to_string())?);
    for n in 1..=4 {
        for rank in [2, 4, 6, 8] {
            reports.push(verify_contraction_identities(n, rank).map_err(|e| e.to_string())?);
        }
    }
    if let Some(f) = first_failure(&reports) {
        return Err(f);
    }
    within_time(t0, 120, format!("{} exact reports", reports.len()))
}

fn hierarchical_oracle() -> Outcome {
    let t0 = Instant::now();
    for nc in [1, 2, 3] {
        let rep = equivalence_check(12, nc, 2024, P).map_err(|e| e.to_string())?;
        if !rep.pass {
            return Err(format!("N = {nc}: mismatch {}", rep.lhs.to_sci(4)));
        }
    }
    let table = fill_taylor_table(&r("0.01"), &r("0.001"), 1, 8, 2).map_err(|e| e.to_string())?;
    let f: Vec<ExtReal> = (1..=4).map(|i| table.moment_coeff(2 * i, 0).expect("cell")).collect();
    let u = PotentialPoly::from_moments(&f, ExtReal::one(P), 1).map_err(|e| e.to_string())?;
    let xs = [r("0"), r("0.1"), r("0.5")];
    let d1 = convolution_discrepancy(&u, &r("1.001"), &xs).map_err(|e| e.to_string())?;
    let d2 = convolution_discrepancy(&u, &r("1.0005"), &xs).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = d1.iter().zip(&d2).map(|(a, b)| (a / b).to_f64()).collect();
    if ratios.iter().any(|q| (q - 2.0).abs() > 0.4) {
        return Err(format!("halving ratios {ratios:?}"));
    }
    within_time(t0, 60, format!("equivalence N = 1, 2, 3; halving ratios {ratios:.3?}"))
}

fn massive_kernels() -> Outcome {
    let c = ExtReal::coupling_c(P);
    let small = r("1e-4");
    let lo = (h_value(&small).map_err(|e| e.to_string())? / &small / &c).to_f64();
    let hi = (h_value(&r("1e4")).map_err(|e| e.to_string())? / &c).to_f64();
    if (lo - 1.0).abs() > 0.01 || (hi - 1.0).abs() > 0.01 {
        return Err(format!("limits h/(c beta) = {lo:.5}, h/c = {hi:.5}"));
    }
    let kernel = HKernel::new(r("1e-2")).map_err(|e| e.to_string())?;
    let mut worst = 0f64;
    for mu0 in ["1", "2", "3"] {
        let jet = kernel.h_jet(&r(mu0), 48).map_err(|e| e.to_string())?;
        for d in ["-1", "-0.5", "0.5", "1"] {
            let at = &r(mu0) + r(d);
            let q = kernel.h_at(&at).map_err(|e| e.to_string())?;
            worst = worst.max(jet.eval(&r(d)).rel_diff(&q).to_f64());
        }
    }
    if worst > 1e-10 {
        return Err(format!("h jet vs quadrature rel {worst:.3e}"));
    }
    let mut n = 0;
    for beta0 in ["1e-2", "1e-4", "0.5"] {
        let k = HKernel::new(r(beta0)).map_err(|e| e.to_string())?;
        let reports = check_h_family(&k, 8, &kernel_grid(&k, 50)).map_err(|e| e.to_string())?;
        if let Some(f) = first_failure(&reports) {
            return Err(format!("beta0 = {beta0}: {f}"));
        }
        n += reports.len();
    }
    Ok(format!("limits {lo:.5}, {hi:.5}; jet vs quadrature rel {worst:.1e}; {n} kernel reports"))
}

fn massive_scan() -> Outcome {
    let grid: Vec<ExtReal> = ["10", "100", "1000"].iter().map(|s| r(s)).collect();
    let boundary = Boundary::Bare { c02: r("0"), c04: r("1") };
    let pts = massive_uv_scan(&boundary, &grid, 4, &ScanOptions::default()).map_err(|e| e.to_string())?;
    let f4: Vec<ExtReal> = pts
        .iter()
        .map(|p| p.rows.iter().find(|x| x.n == 4).expect("row").value.abs())
        .collect();
    if !strictly_decreasing(&f4) {
        return Err(format!("|f4~| not decreasing: {:?}", f4.iter().map(|v| v.to_sci(4)).collect::<Vec<_>>()));
    }
    let kernel = HKernel::new(r("1e-8")).map_err(|e| e.to_string())?;
    let (f2t, f4t) = (r("0.05"), r("0.005"));
    let tilde = massive_taylor_table(&f2t, &f4t, &kernel, 10, 10).map_err(|e| e.to_string())?;
    let plain = fill_taylor_table(&(&f2t * 2), &(&f4t * 2), 1, 10, 10).map_err(|e| e.to_string())?;
    let floor = ExtReal::from_f64(1e-30, P);
    let mut worst = 0f64;
    let pairs = plain
        .f2_coeffs()
        .iter()
        .enumerate()
        .map(|(k, v)| (2, k, v.clone(), tilde.f2(k).cloned()))
        .chain(plain.g_cells().map(|(n, k, v)| (n, k, v.clone(), tilde.g(n, k).cloned())));
    for (n, k, v, t) in pairs {
        if n + k > 10 {
            continue;
        }
        let t = t.ok_or(format!("tilded cell ({n}, {k}) missing"))? * 2;
        worst = worst.max(((&t - &v).abs() / v.abs().max(&floor)).to_f64());
    }
    if worst >= 1e-4 {
        return Err(format!("beta0 = 1e-8 continuity rel {worst:.3e}"));
    }
    Ok(format!(
        "|f4~| {} -> {}; beta0 = 1e-8 continuity rel {worst:.2e}",
        f4[0].to_sci(4),
        f4[2].to_sci(4)
    ))
}

fn large_n() -> Outcome {
    let mut ks = Vec::new();
    for nc in [1u32, 2, 4, 8] {
        let t = fill_taylor_table(&r("0"), &(r("1") / nc as i64), nc, 40, 40).map_err(|e| e.to_string())?;
        let (k, reports) = select_k(&t, Regime::LargeN { n_components: nc }).map_err(|e| e.to_string())?;
        if let Some(f) = first_failure(&reports) {
            return Err(format!("N = {nc}: {f}"));
        }
        ks.push(format!("N={nc}:K={}", k.to_sci(3)));
    }
    let c04 = ExtReal::pi(P).powi(2).recip() / 4;
    let grid: Vec<ExtReal> = (2..=20).map(|v| ExtReal::from_i64(v, P) / 2).collect();
    let rep = check_large_n_scaling(&[1, 2, 4, 8], &c04, &grid, &ScanOptions::default()).map_err(|e| e.to_string())?;
    if !rep.pass {
        return Err(format!("sup N|f4| ratio {} ({})", rep.lhs.to_sci(4), rep.note));
    }
    Ok(format!("{}; sup N|f4| ratio {}", ks.join(" "), rep.lhs.to_sci(4)))
}

fn random_jet(rng: &mut ChaCha8Rng, order: usize, positive_head: bool) -> Jet {
    let scale = 1i64 << 20;
    let mut c: Vec<ExtReal> = (0..=order).map(|_| ExtReal::from_ratio(rng.gen_range(-scale..=scale), scale, P)).collect();
    if positive_head {
        c[0] = ExtReal::from_ratio(rng.gen_range(scale..=2 * scale), scale, P);
    }
    Jet::new(ExtReal::zero(P), c).expect("finite")
}

fn scaled_ulps(x: &ExtReal, y: &ExtReal, a: &Jet, b: &Jet, k: usize) -> f64 {
    let mut s = ExtReal::zero(P);
    for i in 0..=k {
        s += a.coeffs()[i].abs() * b.coeffs()[k - i].abs();
    }
    if s.is_zero() {
        return if x == y { 0.0 } else { f64::INFINITY };
    }
    ((x - y).abs() / s.ulp()).to_f64()
}

fn series_floor() -> Outcome {
    for n in 0..=30u32 {
        let v = factorial_real(&ExtReal::from_i64(n as i64, P)).map_err(|e| e.to_string())?;
        if v != ExtReal::from_integer(&factorial_int(n), P) {
            return Err(format!("{n}! inexact"));
        }
    }
    let g = factorial_real(&ExtReal::from_ratio(-1, 2, P)).map_err(|e| e.to_string())?;
    let gamma_ulps = g.ulps_from(&ExtReal::pi(P).sqrt());
    if gamma_ulps > 2.0 {
        return Err(format!("Gamma(1/2) off by {gamma_ulps} ulp"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut div_worst, mut exp_worst) = (0f64, 0f64);
    for _ in 0..1000 {
        let order = rng.gen_range(0..8);
        let a = random_jet(&mut rng, order, false);
        let b = random_jet(&mut rng, order, true);
        let q = jet_div(&a, &b).map_err(|e| e.to_string())?;
        let back = jet_mul(&q, &b).map_err(|e| e.to_string())?;
        let lhs = jet_exp(&a.checked_add(&b).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let (ea, eb) = (jet_exp(&a).map_err(|e| e.to_string())?, jet_exp(&b).map_err(|e| e.to_string())?);
        let rhs = jet_mul(&ea, &eb).map_err(|e| e.to_string())?;
        for k in 0..=order {
            div_worst = div_worst.max(scaled_ulps(&back.coeffs()[k], &a.coeffs()[k], &q, &b, k));
            exp_worst = exp_worst.max(scaled_ulps(&lhs.coeffs()[k], &rhs.coeffs()[k], &ea, &eb, k));
        }
    }
    if div_worst > 4.0 || exp_worst > 8.0 {
        return Err(format!("div/mul {div_worst} ulp, exp {exp_worst} ulp"));
    }
    Ok(format!("0..30! exact; Gamma(1/2) {gamma_ulps} ulp; div/mul {div_worst:.2} ulp; exp {exp_worst:.2} ulp"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "triviality scan", triviality_scan),
        (2, "two-path consistency", two_path_consistency),
        (3, "bound suite", bound_suite),
        (4, "exhaustive exact identities", exact_identities),
        (5, "hierarchical oracle", hierarchical_oracle),
        (6, "massive kernels", massive_kernels),
        (7, "massive triviality scan", massive_scan),
        (8, "large N", large_n),
        (9, "series-core unit floor", series_floor),
    ];
    let mut failed = 0;
    for (id, name, f) in criteria {
        let t0 = Instant::now();
        let out = f();
        let secs = t0.elapsed().as_secs_f64();
        match out {
            Ok(d) => println!("criterion {id} PASS {name}: {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("criterion {id} FAIL {name}: {d} [{secs:.1}s]");
            }
        }
    }
    // the c_{n,N} Cauchy tail is informational: it is summable, but not by n = 200 at the selected K
    match check_cn_tail(1, &ExtReal::from_i64(25, P), 200) {
        Ok(rep) => println!("info c_n tail beyond 200 at K = 25: ln tail {} ({})", rep.lhs.to_sci(4), rep.note),
        Err(e) => println!("info c_n tail: {e}"),
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
