use meanfield::hierarchical::{
    convolution_discrepancy, convolution_step, equivalence_check, pde_residual, pde_rhs, PotentialPoly,
};
use meanfield::series::ExtReal;

const P: u32 = 256;

fn r(s: &str) -> ExtReal {
    ExtReal::parse(s, P).unwrap()
}

#[test]
fn pde_rhs_matches_radial_form() {
    // u = a2 r^2 + a4 r^4, rhs = ½(u'' + (N-1) u'/r) - ½ u'^2 + 4u - r u'
    let (a2, a4) = (r("0.3"), r("-0.05"));
    for nc in [1u32, 3] {
        let u = PotentialPoly::new(vec![a2.clone(), a4.clone()], ExtReal::one(P), nc).unwrap();
        for x in ["0", "0.4", "1.3"] {
            let x = r(x);
            let d1 = &a2 * 2 + &a4 * 4 * x.powi(2);
            let d2 = &a2 * 2 + &a4 * 12 * x.powi(2);
            let lap = d2 + (&a2 * 2 + &a4 * 4 * x.powi(2)) * (nc as i64 - 1);
            let grad = &d1 * &x;
            let expect = lap / 2 - grad.powi(2) / 2 + u.eval(&x) * 4 - &x * &grad;
            assert!((pde_rhs(&u, &x) - expect).abs().to_f64() < 1e-60);
        }
    }
}

#[test]
fn quadratic_residual_is_the_constant_mode() {
    let a2 = r("0.7");
    let u = PotentialPoly::new(vec![a2.clone()], ExtReal::one(P), 2).unwrap();
    for x in ["0", "0.3", "1.7"] {
        assert!((pde_residual(&u, &r(x)) - &a2 * 2).abs().to_f64() < 1e-60);
    }
}

#[test]
fn moment_round_trip() {
    let f = vec![r("0.01"), r("-0.002"), r("0.0003")];
    let u = PotentialPoly::from_moments(&f, ExtReal::one(P), 1).unwrap();
    for (a, b) in u.moments().iter().zip(&f) {
        assert!(a.rel_diff(b).to_f64() < 1e-70);
    }
    // a_4 = 2^2 f_4 / 4
    assert_eq!(u.coeffs()[1], f[1]);
}

#[test]
fn equivalence_beyond_the_reference_orders() {
    for (n_max, nc) in [(16, 5u32), (8, 1)] {
        assert!(equivalence_check(n_max, nc, 11, P).unwrap().pass);
    }
    assert!(equivalence_check(7, 1, 0, P).is_err());
}

#[test]
fn convolution_discrepancy_is_first_order_in_ln_l() {
    let u = PotentialPoly::new(vec![r("0.02"), r("0.004")], ExtReal::one(P), 1).unwrap();
    let xs = [r("0.3"), r("1")];
    let d1 = convolution_discrepancy(&u, &r("1.002"), &xs).unwrap();
    let d2 = convolution_discrepancy(&u, &r("1.001"), &xs).unwrap();
    for (a, b) in d1.iter().zip(&d2) {
        let q = (a / b).to_f64();
        assert!((q - 2.0).abs() < 0.2, "ratio {q}");
    }
}

#[test]
fn convolution_contracts() {
    let u2 = PotentialPoly::new(vec![r("0.1")], ExtReal::one(P), 2).unwrap();
    assert!(convolution_step(&u2, &r("1.01"), &[r("0")]).is_err());
    let u1 = PotentialPoly::new(vec![r("0.1")], ExtReal::one(P), 1).unwrap();
    assert!(convolution_step(&u1, &r("1"), &[r("0")]).is_err());
    assert!(convolution_step(&u1, &r("1.01"), &[r("0")]).is_ok());
}
