use super::kernel::HKernel;
use crate::error::{Error, Result};
use crate::series::ExtReal;
use crate::table::{cauchy, f2_k_limit, g_k_limit, pair_sum, Flow, TaylorTable};

/// Working data shared by the tilded recursions.
struct Ctx {
    beta0: ExtReal,
    /// coefficients of `(log H)'` at 0
    hk: Vec<ExtReal>,
    inv_fact: Vec<ExtReal>,
    /// `P_j(n)` by `[n/2 - 2][j]`, filled as the table grows
    pairs: Vec<Vec<ExtReal>>,
}

impl Ctx {
    fn pair(&mut self, t: &TaylorTable, n: usize, j: usize) -> ExtReal {
        let row = &mut self.pairs[n / 2 - 2];
        while row.len() <= j {
            let jj = row.len();
            row.push(pair_sum(t, n, jj));
        }
        row[j].clone()
    }
}

/// Tilded Taylor coefficients at mu = 0, same triangle and fill order as the massless table.
pub fn massive_taylor_table(
    f2t_0: &ExtReal,
    f4t_0: &ExtReal,
    kernel: &HKernel,
    n_max: usize,
    k_max: usize,
) -> Result<TaylorTable> {
    if n_max < 4 || n_max % 2 == 1 {
        return Err(Error::Contract(format!("n_max must be even and at least 4, got {n_max}")));
    }
    if k_max < 1 {
        return Err(Error::Contract("k_max must be at least 1".into()));
    }
    let p = f2t_0.prec().max(f4t_0.prec()).max(kernel.prec());
    let zero = ExtReal::zero(p);
    let hk = kernel.h_jets(&zero, k_max)?.log_h_prime.coeffs().to_vec();
    let mut inv_fact = vec![ExtReal::one(p)];
    for k in 1..=k_max + 1 {
        let next = &inv_fact[k - 1] / k as i64;
        inv_fact.push(next);
    }
    let beta0 = kernel.beta0().with_prec(p);
    let mut cx = Ctx { beta0: beta0.clone(), hk, inv_fact, pairs: vec![Vec::new(); (n_max - 2) / 2] };
    let mut t = TaylorTable::empty(Flow::Massive { beta0: beta0.clone() }, n_max, k_max);
    t.f2.push(f2t_0.with_prec(p));

    // k = 0: (n-4)/n g_{n,0} + 2 P_0(n) = 0
    t.push_g(4, 0, f4t_0.with_prec(p));
    for n in (6..=n_max).step_by(2) {
        let s = cx.pair(&t, n, 0);
        let ni = n as i64;
        t.push_g(n, 0, -s * (2 * ni) / (ni - 4));
    }

    // k = 1: (n-2)/n g_{n,1} + 2 P_1 - beta0 P_0 + g_{n,0} ((n-4)/n + beta0 - (n-2)/n h_0 + 4 f2,0) = 0
    push_f2(&mut t, &cx, 0);
    let f20 = t.f2[0].clone();
    for n in (4..=n_max).step_by(2) {
        let ni = n as i64;
        let p1 = cx.pair(&t, n, 1);
        let p0 = cx.pair(&t, n, 0);
        let lin = ExtReal::from_ratio(ni - 4, ni, p) + &beta0 - ExtReal::from_ratio(ni - 2, ni, p) * &cx.hk[0]
            + &f20 * 4;
        let r = p1 * 2 - &beta0 * p0 + t.g(n, 0).unwrap() * lin;
        t.push_g(n, 1, -r * ni / (ni - 2));
    }

    let f2_lim = f2_k_limit(n_max, k_max);
    for kappa in 2..=k_max {
        if kappa <= f2_lim {
            push_f2(&mut t, &cx, kappa - 1);
        }
        for n in (4..=n_max).step_by(2) {
            if kappa > g_k_limit(n, n_max, k_max) {
                break;
            }
            let v = general_step(&t, &mut cx, n, kappa);
            t.push_g(n, kappa, v);
        }
    }
    Ok(t)
}

/// `(k+1) f2,{k+1} = 3 g_{4,k} + f2,k - (2+b0) Q_k - b0 sum f2,nu/(k-nu)! + b0 sum Q_{k-nu}/nu!`,
/// with `Q_m = sum f2,nu f2,{m-nu}`.
fn push_f2(t: &mut TaylorTable, cx: &Ctx, k: usize) {
    let p = t.prec();
    let b0 = &cx.beta0;
    let q: Vec<ExtReal> = (0..=k).map(|m| cauchy(&t.f2, &t.f2, m, p)).collect();
    let mut v = t.g(4, k).unwrap() * 3 + &t.f2[k] - (b0 + 2) * &q[k];
    let mut damp = ExtReal::zero(p);
    let mut mixed = ExtReal::zero(p);
    for nu in 0..=k {
        damp += &t.f2[nu] * &cx.inv_fact[k - nu];
        mixed += &q[k - nu] * &cx.inv_fact[nu];
    }
    v += b0 * (mixed - damp);
    t.f2.push(v / (k as i64 + 1));
}

fn general_step(t: &TaylorTable, cx: &mut Ctx, n: usize, j: usize) -> ExtReal {
    let p = t.prec();
    let ni = n as i64;
    let b0 = cx.beta0.clone();
    let g = |nu: usize| t.g(n, nu).unwrap();
    // S_m = sum_{nu<=m} g_{n,nu} f2,{m-nu}
    let s: Vec<ExtReal> = (0..j)
        .map(|m| {
            let mut a = ExtReal::zero(p);
            for nu in 0..=m {
                a += g(nu) * &t.f2[m - nu];
            }
            a
        })
        .collect();
    let mut r = t.g(n + 2, j - 2).unwrap() * (ni * (ni + 1));
    r -= g(j - 1) * (ni - 4);
    let mut hl = ExtReal::zero(p);
    let mut el = ExtReal::zero(p);
    let mut es = ExtReal::zero(p);
    for nu in 0..j {
        hl += g(nu) * &cx.hk[j - 1 - nu];
        el += g(nu) * &cx.inv_fact[j - 1 - nu];
        es += &s[j - 1 - nu] * &cx.inv_fact[nu];
    }
    r += hl * (ni - 2);
    r -= &b0 * el * ni;
    r -= (&b0 + 2) * &s[j - 1] * (2 * ni);
    r += &b0 * es * (2 * ni);
    let pj = cx.pair(t, n, j);
    let mut ep = ExtReal::zero(p);
    for nu in 0..=j {
        ep += cx.pair(t, n, j - nu) * &cx.inv_fact[nu];
    }
    r -= (&b0 + 2) * pj * ni;
    r += &b0 * ep * ni;
    r / (ni - 4 + 2 * j as i64)
}

/// Relative residuals of the k = 0 and k = 1 regularity identities for n >= 4 (k = 1) and n >= 6 (k = 0).
pub fn massive_seed_residuals(t: &TaylorTable, kernel: &HKernel) -> Result<Vec<(usize, usize, ExtReal)>> {
    let p = t.prec();
    let b0 = kernel.beta0().with_prec(p);
    let h0 = kernel.h_jets(&ExtReal::zero(p), 0)?.log_h_prime.value().clone();
    let f20 = t.f2[0].clone();
    let mut out = Vec::new();
    for n in (4..=t.n_max).step_by(2) {
        let ni = n as i64;
        let g0 = t.g(n, 0).unwrap();
        let p0 = pair_sum(t, n, 0);
        if n >= 6 {
            let a = g0 * ExtReal::from_ratio(ni - 4, ni, p);
            out.push((n, 0, rel(&[a, &p0 * 2])));
        }
        let g1 = t.g(n, 1).unwrap();
        let terms = [
            g1 * ExtReal::from_ratio(ni - 2, ni, p),
            g0 * ExtReal::from_ratio(ni - 4, ni, p),
            g0 * &b0,
            -(g0 * ExtReal::from_ratio(ni - 2, ni, p) * &h0),
            pair_sum(t, n, 1) * 2,
            -(&b0 * &p0),
            g0 * &f20 * 4,
        ];
        out.push((n, 1, rel(&terms)));
    }
    Ok(out)
}

fn rel(terms: &[ExtReal]) -> ExtReal {
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
    use crate::massless::fill_taylor_table;

    const P: u32 = 256;

    fn r(s: &str) -> ExtReal {
        ExtReal::parse(s, P).unwrap()
    }

    #[test]
    fn zero_boundary_gives_zero_table() {
        let k = HKernel::new(r("0.1")).unwrap();
        let z = ExtReal::zero(P);
        let t = massive_taylor_table(&z, &z, &k, 10, 8).unwrap();
        assert!(t.f2_coeffs().iter().all(|x| x.is_zero()));
        assert!(t.g_cells().all(|(_, _, v)| v.is_zero()));
    }

    #[test]
    fn low_order_examples() {
        let k = HKernel::new(r("0.05")).unwrap();
        let (f20, g40) = (r("0.2"), r("0.03"));
        let t = massive_taylor_table(&f20, &g40, &k, 12, 8).unwrap();
        let h0 = k.h_jets(&ExtReal::zero(P), 0).unwrap().log_h_prime.value().clone();
        let g41 = -(&g40 * 2) * (&f20 * 4 + r("0.05") - h0 / 2);
        assert!(t.g(4, 1).unwrap().ulps_from(&g41) <= 8.0);
        let g60 = -(&g40 * &g40) * 6;
        assert!(t.g(6, 0).unwrap().ulps_from(&g60) <= 4.0);
    }

    #[test]
    fn seeds_hold() {
        let k = HKernel::new(r("0.3")).unwrap();
        let t = massive_taylor_table(&r("0.2"), &r("-0.04"), &k, 16, 12).unwrap();
        let tol = ExtReal::from_i64(2, P).powi(-(P as i32) / 2);
        for (n, kk, res) in massive_seed_residuals(&t, &k).unwrap() {
            assert!(res <= tol, "n = {n}, k = {kk}: {res:?}");
        }
    }

    #[test]
    fn small_beta0_approaches_massless() {
        let k = HKernel::new(r("1e-8")).unwrap();
        let (f20, g40) = (r("0.05"), r("0.005"));
        let t = massive_taylor_table(&f20, &g40, &k, 10, 10).unwrap();
        let m = fill_taylor_table(&(&f20 * 2), &(&g40 * 2), 1, 10, 10).unwrap();
        for (n, kk, v) in m.g_cells() {
            if n + kk > 10 {
                continue;
            }
            let tv = t.g(n, kk).unwrap() * 2;
            let scale = v.abs().max(&ExtReal::from_f64(1e-30, P));
            let d = (&tv - v).abs() / scale;
            assert!(d.to_f64() < 1e-4, "({n}, {kk}): {d:?}");
        }
    }
}
