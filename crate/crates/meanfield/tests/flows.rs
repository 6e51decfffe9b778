use meanfield::ansatz::{b_from_f2, f2_jet};
use meanfield::massive::{massive_taylor_table, HKernel};
use meanfield::massless::{boundary_values, fill_taylor_table, solve_ansatz, tower_jets, uv_scan, MasslessModel, ScanOptions};
use meanfield::series::ExtReal;

const P: u32 = 256;

fn r(s: &str) -> ExtReal {
    ExtReal::parse(s, P).unwrap()
}

#[test]
fn tower_agrees_with_table_for_three_components() {
    let table = fill_taylor_table(&r("0.05"), &r("0.02"), 3, 18, 18).unwrap();
    let b = b_from_f2(table.f2_coeffs(), 17).unwrap();
    let f2 = f2_jet(&b, &ExtReal::zero(P), 16, &r("1e-70")).unwrap();
    let tower = tower_jets(&f2, 3, 16).unwrap();
    let mut cells = 0;
    for (n, jet) in tower.jets() {
        for (j, c) in jet.coeffs().iter().enumerate() {
            if let Some(t) = table.moment_coeff(n, j) {
                cells += 1;
                let scale = c.abs().max(&t.abs()).to_f64().max(1e-40);
                assert!((c - &t).abs().to_f64() / scale < 1e-20, "n = {n}, j = {j}: {} vs {}", c.to_sci(4), t.to_sci(4));
            }
        }
    }
    assert!(cells > 50);
}

#[test]
fn ansatz_sum_matches_taylor_sum_at_small_mu() {
    let (f20, f40) = (r("0.1"), r("0.01"));
    let mu = r("0.01");
    let sol = solve_ansatz(&f20, &f40, 1, std::slice::from_ref(&mu), 0, &ScanOptions::default()).unwrap();
    let table = fill_taylor_table(&f20, &f40, 1, 42, 40).unwrap();
    let taylor = table.f2_coeffs().iter().rev().fold(ExtReal::zero(P), |acc, c| acc * &mu + c);
    let rel = sol.f2_jets[0].value().rel_diff(&taylor).to_f64();
    assert!(rel < 1e-18, "{rel:e}");
}

#[test]
fn large_cutoff_drives_couplings_down() {
    let grid: Vec<ExtReal> = ["10", "100", "1000"].iter().map(|s| r(s)).collect();
    let model = MasslessModel::new(4, r("0"), r("1"), grid[2].clone(), false).unwrap();
    let (f20, f40) = boundary_values(&model);
    let sol = uv_scan(&model, &f20, &f40, &grid, 6, &ScanOptions::default()).unwrap();
    let f4: Vec<f64> = grid.iter().map(|m| sol.value(m, 4).unwrap().abs().to_f64()).collect();
    assert!(f4[0] > f4[1] && f4[1] > f4[2], "{f4:?}");
}

#[test]
fn massive_table_approaches_massless_as_mass_vanishes() {
    let kernel = HKernel::new(r("1e-8")).unwrap();
    let (f2t, f4t) = (r("0.05"), r("0.005"));
    let tilde = massive_taylor_table(&f2t, &f4t, &kernel, 8, 8).unwrap();
    let plain = fill_taylor_table(&(&f2t * 2), &(&f4t * 2), 1, 8, 8).unwrap();
    for (k, v) in plain.f2_coeffs().iter().enumerate() {
        let t = tilde.f2(k).unwrap() * 2;
        assert!((&t - v).abs().to_f64() <= 1e-4 * v.abs().to_f64().max(1e-30), "f2 k = {k}");
    }
    for (n, k, v) in plain.g_cells() {
        let t = tilde.g(n, k).unwrap() * 2;
        assert!((&t - v).abs().to_f64() <= 1e-4 * v.abs().to_f64().max(1e-30), "g n = {n}, k = {k}");
    }
}
