use std::collections::HashMap;

use meanfield::bounds::{
    check_cn_tail, check_coefficient_growth, pair_convolution_sample, run_suite, select_k, BoundReport, CnTail, Regime,
    SuiteConfig,
};
use meanfield::massless::{fill_taylor_table, ScanOptions};
use meanfield::series::ExtReal;

const P: u32 = 256;

fn r(s: &str, p: u32) -> ExtReal {
    ExtReal::parse(s, p).unwrap()
}

fn small_config(p: u32) -> SuiteConfig {
    SuiteConfig {
        f2_0: r("0.1", p),
        f4_0: r("0.01", p),
        n_components: 1,
        n_max: 16,
        k_max: 16,
        mus: vec![r("0.5", p), r("5", p)],
        l_max: 2,
        n_deriv: 6,
        scan: ScanOptions::default(),
    }
}

fn margins(reports: &[BoundReport]) -> HashMap<String, ExtReal> {
    reports.iter().map(|x| (format!("{}|{}", x.target, x.params_string()), x.margin.clone())).collect()
}

#[test]
fn pair_convolution_sample_passes_strictly() {
    let reps = pair_convolution_sample(1000, 7, P).unwrap();
    assert_eq!(reps.len(), 1000);
    assert!(reps.iter().all(|x| x.pass && x.lhs > 0));
}

#[test]
fn suite_margins_stable_under_doubled_precision() {
    let lo = run_suite(&small_config(P)).unwrap();
    let hi = run_suite(&small_config(2 * P)).unwrap();
    assert!(lo.reports.iter().all(|x| x.pass));
    assert_eq!(lo.k.to_f64(), hi.k.to_f64());
    let m_hi = margins(&hi.reports);
    let floor = ExtReal::from_f64(1e-30, P);
    for (key, m) in margins(&lo.reports) {
        let other = m_hi[&key].with_prec(P);
        let scale = m.abs().max(&other.abs()).max(&floor);
        assert!(((&m - &other).abs() / scale).to_f64() < 1e-10, "{key}");
    }
}

#[test]
fn cn_tail_at_the_floor_k() {
    let k = ExtReal::from_i64(25, P);
    let tail = CnTail::new(1, &k).unwrap();
    assert_eq!(tail.settled_at, 19640);
    assert!(!check_cn_tail(1, &k, 200).unwrap().pass);
    assert!(check_cn_tail(1, &k, tail.settled_at).unwrap().pass);
    assert!(!check_cn_tail(1, &k, tail.settled_at - 1).unwrap().pass);
}

#[test]
fn large_n_growth_selects_a_passing_k() {
    let t = fill_taylor_table(&ExtReal::zero(P), &r("0.5", P), 2, 24, 24).unwrap();
    let regime = Regime::LargeN { n_components: 2 };
    let (k, reports) = select_k(&t, regime).unwrap();
    assert!(reports.iter().all(|x| x.pass));
    assert!(check_coefficient_growth(&t, regime, &(&k * 2)).unwrap().iter().all(|x| x.pass));
    assert!(check_coefficient_growth(&t, regime, &r("1.5", P)).is_err());
}
