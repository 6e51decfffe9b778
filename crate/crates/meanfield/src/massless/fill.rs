use crate::error::{Error, Result};
use crate::series::ExtReal;
use crate::table::{cauchy, f2_k_limit, g_k_limit, pair_sum, Flow, TaylorTable};

fn check_shape(n_max: usize, k_max: usize) -> Result<()> {
    if n_max < 4 || n_max % 2 == 1 {
        return Err(Error::Contract(format!("n_max must be even and at least 4, got {n_max}")));
    }
    if k_max < 1 {
        return Err(Error::Contract("k_max must be at least 1".into()));
    }
    Ok(())
}

/// Taylor coefficients at mu = 0 from the boundary values, filled shell by shell in k.
pub fn fill_taylor_table(
    f2_0: &ExtReal,
    f4_0: &ExtReal,
    n_components: u32,
    n_max: usize,
    k_max: usize,
) -> Result<TaylorTable> {
    check_shape(n_max, k_max)?;
    if n_components == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    let p = f2_0.prec().max(f4_0.prec());
    let nn = n_components as i64;
    let mut t = TaylorTable::empty(Flow::Massless { n_components }, n_max, k_max);
    t.f2.push(f2_0.with_prec(p));

    // k = 0: (n-4)/n g_{n,0} + P_0(n) = 0
    t.push_g(4, 0, f4_0.with_prec(p));
    for n in (6..=n_max).step_by(2) {
        let s = pair_sum(&t, n, 0);
        t.push_g(n, 0, -s * n as i64 / (n as i64 - 4));
    }

    // k = 1: (n-2)/n g_{n,1} + P_1(n) + g_{n,0} (2 f2,0 + 1 - 4/n) = 0, P_1 over ordered pairs
    push_f2(&mut t, nn, 0);
    let f20 = t.f2[0].clone();
    let g41 = -(&f20 * t.g(4, 0).unwrap()) * 4;
    t.push_g(4, 1, g41);
    for n in (6..=n_max).step_by(2) {
        let ni = n as i64;
        let s = pair_sum(&t, n, 1);
        let lin = ExtReal::from_ratio(ni - 4, ni, p) + &f20 * 2;
        let r = s + t.g(n, 0).unwrap() * lin;
        t.push_g(n, 1, -r * ni / (ni - 2));
    }

    let f2_lim = f2_k_limit(n_max, k_max);
    for kappa in 2..=k_max {
        if kappa <= f2_lim {
            push_f2(&mut t, nn, kappa - 1);
        }
        for n in (4..=n_max).step_by(2) {
            if kappa > g_k_limit(n, n_max, k_max) {
                break;
            }
            let v = general_step(&t, nn, n, kappa);
            t.push_g(n, kappa, v);
        }
    }
    Ok(t)
}

/// `(k+1) f2,{k+1} = (N+2) g_{4,k} + f2,k - sum f2,nu f2,{k-nu}`
fn push_f2(t: &mut TaylorTable, nn: i64, k: usize) {
    let p = t.prec();
    let quad = cauchy(&t.f2, &t.f2, k, p);
    let v = (t.g(4, k).unwrap() * (nn + 2) + &t.f2[k] - quad) / (k as i64 + 1);
    t.f2.push(v);
}

/// `(n-4+2j) g_{n,j} = n(n+N) g_{n+2,j-2} - n P_j(n) - 2n sum_{nu<j} g_{n,nu} f2,{j-1-nu} - (n-4) g_{n,j-1}`
fn general_step(t: &TaylorTable, nn: i64, n: usize, j: usize) -> ExtReal {
    let p = t.prec();
    let ni = n as i64;
    let mut r = t.g(n + 2, j - 2).unwrap() * (ni * (ni + nn));
    r -= pair_sum(t, n, j) * ni;
    let mut mix = ExtReal::zero(p);
    for nu in 0..j {
        mix += t.g(n, nu).unwrap() * &t.f2[j - 1 - nu];
    }
    r -= mix * (2 * ni);
    r -= t.g(n, j - 1).unwrap() * (ni - 4);
    r / (ni - 4 + 2 * j as i64)
}

/// Relative residuals of the two regularity identities at k = 0 and k = 1, one per n >= 6,
/// each scaled by the largest term in its identity.
pub fn seed_residuals(t: &TaylorTable) -> Vec<(usize, usize, ExtReal)> {
    let p = t.prec();
    let f20 = t.f2[0].clone();
    let mut out = Vec::new();
    for n in (6..=t.n_max).step_by(2) {
        let ni = n as i64;
        let g0 = t.g(n, 0).unwrap();
        let a = g0 * ExtReal::from_ratio(ni - 4, ni, p);
        let b = pair_sum(t, n, 0);
        out.push((n, 0, scaled(&[a, b])));

        let g1 = t.g(n, 1).unwrap();
        let a = g1 * ExtReal::from_ratio(ni - 2, ni, p);
        let b = pair_sum(t, n, 1);
        let c = g0 * (&f20 * 2 + 1 - ExtReal::from_ratio(4, ni, p));
        out.push((n, 1, scaled(&[a, b, c])));
    }
    out
}

fn scaled(terms: &[ExtReal]) -> ExtReal {
    let p = terms[0].prec();
    let mut s = ExtReal::zero(p);
    let mut m = ExtReal::zero(p);
    for x in terms {
        s += x;
        m = m.max(&x.abs());
    }
    if m.is_zero() {
        m
    } else {
        s.abs() / m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn r(s: &str) -> ExtReal {
        ExtReal::parse(s, P).unwrap()
    }

    #[test]
    fn gaussian_point_stays_zero() {
        let z = ExtReal::zero(P);
        let t = fill_taylor_table(&z, &z, 3, 12, 10).unwrap();
        assert!(t.f2_coeffs().iter().all(|x| x.is_zero()));
        assert!(t.g_cells().all(|(_, _, v)| v.is_zero()));
    }

    #[test]
    fn low_order_examples() {
        let t = fill_taylor_table(&r("0.1"), &r("0.01"), 1, 12, 10).unwrap();
        assert!(t.f2(1).unwrap().ulps_from(&r("0.12")) <= 4.0);
        assert!(t.g(6, 0).unwrap().ulps_from(&r("-3e-4")) <= 4.0);
        assert!(t.g(8, 0).unwrap().ulps_from(&r("1.2e-5")) <= 4.0);
        let g41 = -(r("0.1") * t.g(4, 0).unwrap()) * 4;
        assert_eq!(t.g(4, 1).unwrap(), &g41);
    }

    #[test]
    fn triangle_is_respected() {
        let t = fill_taylor_table(&r("0.1"), &r("0.01"), 2, 12, 24).unwrap();
        assert_eq!(t.f2_coeffs().len(), 11);
        assert!(t.g(4, 9).is_some() && t.g(4, 10).is_none());
        assert!(t.g(12, 1).is_some() && t.g(12, 2).is_none());
        assert!(t.g(14, 0).is_none());
    }

    #[test]
    fn seeds_hold() {
        let t = fill_taylor_table(&r("0.3"), &r("-0.02"), 4, 20, 20).unwrap();
        let tol = ExtReal::from_i64(2, P).powi(-(P as i32) / 2);
        for (n, k, res) in seed_residuals(&t) {
            assert!(res <= tol, "n = {n}, k = {k}: {res:?}");
        }
    }

    #[test]
    fn shape_errors() {
        let z = ExtReal::zero(P);
        assert!(fill_taylor_table(&z, &z, 1, 7, 3).is_err());
        assert!(fill_taylor_table(&z, &z, 1, 8, 0).is_err());
        assert!(fill_taylor_table(&z, &z, 0, 8, 3).is_err());
    }
}
