use meanfield::ansatz::{b_from_f2, f2k_from_b};
use meanfield::series::{factorial_int, factorial_real, jet_div, jet_exp, jet_mul, ExtReal, Jet};
use proptest::prelude::*;

const P: u32 = 256;

fn dyadic(v: i64) -> ExtReal {
    ExtReal::from_ratio(v, 1 << 20, P)
}

fn jet_from(raw: &[i64]) -> Jet {
    Jet::new(ExtReal::zero(P), raw.iter().map(|&v| dyadic(v)).collect()).unwrap()
}

/// `sum_{i+j=k} |a_i| |b_j|`, the scale at which coefficient k of a product is rounded.
fn product_scale(a: &Jet, b: &Jet, k: usize) -> ExtReal {
    let mut s = ExtReal::zero(P);
    for i in 0..=k {
        s += a.coeffs()[i].abs() * b.coeffs()[k - i].abs();
    }
    s
}

fn ulps_at(x: &ExtReal, y: &ExtReal, scale: &ExtReal) -> f64 {
    if scale.is_zero() {
        return if x == y { 0.0 } else { f64::INFINITY };
    }
    ((x - y).abs() / scale.ulp()).to_f64()
}

fn coeffs(order: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-(1i64 << 20)..=(1 << 20), order + 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn div_then_mul_round_trips(order in 0usize..8, a in coeffs(8), b in coeffs(8), b0 in (1i64 << 20)..=(2 << 20)) {
        let a = jet_from(&a[..=order]);
        let mut b = b[..=order].to_vec();
        b[0] = b0;
        let b = jet_from(&b);
        let q = jet_div(&a, &b).unwrap();
        let back = jet_mul(&q, &b).unwrap();
        for k in 0..=order {
            let u = ulps_at(&back.coeffs()[k], &a.coeffs()[k], &product_scale(&q, &b, k));
            prop_assert!(u <= 4.0, "k = {}: {} ulp", k, u);
        }
    }

    #[test]
    fn exp_is_additive(order in 0usize..8, a in coeffs(8), b in coeffs(8)) {
        let a = jet_from(&a[..=order]);
        let b = jet_from(&b[..=order]);
        let lhs = jet_exp(&a.checked_add(&b).unwrap()).unwrap();
        let (ea, eb) = (jet_exp(&a).unwrap(), jet_exp(&b).unwrap());
        let rhs = jet_mul(&ea, &eb).unwrap();
        for k in 0..=order {
            let u = ulps_at(&lhs.coeffs()[k], &rhs.coeffs()[k], &product_scale(&ea, &eb, k));
            prop_assert!(u <= 8.0, "k = {}: {} ulp", k, u);
        }
    }

    #[test]
    fn mul_commutes(a in coeffs(5), b in coeffs(5)) {
        let (a, b) = (jet_from(&a), jet_from(&b));
        prop_assert_eq!(jet_mul(&a, &b).unwrap(), jet_mul(&b, &a).unwrap());
    }

    #[test]
    fn ansatz_coefficients_round_trip(raw in prop::collection::vec(-(1i64 << 20)..=(1 << 20), 1..24)) {
        let f2k: Vec<ExtReal> = raw.iter().map(|&v| dyadic(v)).collect();
        let b = b_from_f2(&f2k, f2k.len()).unwrap();
        for (k, f) in f2k.iter().enumerate() {
            let back = f2k_from_b(&b, k).unwrap();
            let scale = f.abs().max(&ExtReal::one(P));
            prop_assert!((&back - f).abs() <= scale * ExtReal::from_i64(2, P).powi(-200));
        }
    }
}

#[test]
fn factorial_exact_through_thirty() {
    for n in 0..=30u32 {
        let x = ExtReal::from_i64(n as i64, P);
        let exact = ExtReal::from_integer(&factorial_int(n), P);
        assert_eq!(factorial_real(&x).unwrap(), exact, "n = {n}");
    }
}

#[test]
fn gamma_half_is_root_pi() {
    let g = factorial_real(&ExtReal::from_ratio(-1, 2, P)).unwrap();
    let root_pi = ExtReal::pi(P).sqrt();
    assert!(g.ulps_from(&root_pi) <= 2.0, "{} ulp", g.ulps_from(&root_pi));
    let g32 = factorial_real(&ExtReal::from_ratio(1, 2, P)).unwrap();
    assert!(g32.ulps_from(&(root_pi / 2)) <= 2.0);
}

#[test]
fn functional_equation_on_quarter_grid() {
    // Gamma(x + 1) = x Gamma(x), with Gamma(x) = (x - 1)!
    for i in 1..=41 {
        let x = ExtReal::from_ratio(i, 4, P);
        let lhs = factorial_real(&x).unwrap();
        let rhs = &x * factorial_real(&(&x - 1)).unwrap();
        assert!(lhs.ulps_from(&rhs) <= 2.0, "x = {i}/4: {} ulp", lhs.ulps_from(&rhs));
    }
}

#[test]
fn pole_is_rejected() {
    assert!(factorial_real(&ExtReal::from_i64(-3, P)).is_err());
}
