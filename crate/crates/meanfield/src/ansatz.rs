//! The two-point ansatz `f2(mu) = sum_n b_n p_n(n mu)` with `p_n(X) = X^(n-1) / (1 + X^n)`,
//! its coefficient maps, and jets with an analytic bound on the dropped tail.

use rug::Integer;

use crate::error::{Error, Result};
use crate::series::{binomial, factorial_int, ExtReal, Jet};

/// How the infinite ansatz sum is closed beyond the stored coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum TailPolicy {
    /// The ansatz is exactly the stored finite sum.
    Exact,
    /// `|b_n| <= C n^2 / 2^n` for every n, stored or not.
    Bounded(ExtReal),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzCoefficients {
    b: Vec<ExtReal>,
    tail: TailPolicy,
}

/// Safety factor applied to the smallest admissible tail constant.
const TAIL_SAFETY: f64 = 1.5;

impl AnsatzCoefficients {
    /// Bounded tail with `C` taken from the coefficients themselves.
    pub fn new(b: Vec<ExtReal>) -> Result<Self> {
        check_finite(&b)?;
        let prec = b[0].prec();
        let c = smallest_tail_constant(&b) * ExtReal::from_f64(TAIL_SAFETY, prec);
        Ok(AnsatzCoefficients { b, tail: TailPolicy::Bounded(c) })
    }

    /// Bounded tail with a caller-supplied constant, checked against every stored `b_n`.
    pub fn with_tail_bound(b: Vec<ExtReal>, c: ExtReal) -> Result<Self> {
        check_finite(&b)?;
        if c.is_sign_negative() {
            return Err(Error::Contract("tail constant must be nonnegative".into()));
        }
        for (i, bn) in b.iter().enumerate() {
            let n = i as u32 + 1;
            if bn.abs() > decay_envelope(&c, n) {
                return Err(Error::Contract(format!(
                    "|b_{n}| = {bn:?} exceeds C n^2/2^n with C = {c:?}"
                )));
            }
        }
        Ok(AnsatzCoefficients { b, tail: TailPolicy::Bounded(c) })
    }

    /// The finite sum of the stored terms, with nothing beyond.
    pub fn finite(b: Vec<ExtReal>) -> Result<Self> {
        check_finite(&b)?;
        Ok(AnsatzCoefficients { b, tail: TailPolicy::Exact })
    }

    /// Number of stored coefficients M.
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn coeffs(&self) -> &[ExtReal] {
        &self.b
    }

    /// `b_n` for `n >= 1`; `b_0` and indices past M are `None`.
    pub fn b(&self, n: usize) -> Option<&ExtReal> {
        if n == 0 {
            None
        } else {
            self.b.get(n - 1)
        }
    }

    pub fn tail(&self) -> &TailPolicy {
        &self.tail
    }

    pub fn tail_bound_c(&self) -> Option<&ExtReal> {
        match &self.tail {
            TailPolicy::Exact => None,
            TailPolicy::Bounded(c) => Some(c),
        }
    }

    pub fn prec(&self) -> u32 {
        self.b[0].prec()
    }
}

fn check_finite(b: &[ExtReal]) -> Result<()> {
    if b.is_empty() {
        return Err(Error::Contract("ansatz needs at least one coefficient".into()));
    }
    if b.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("ansatz coefficients"));
    }
    Ok(())
}

/// `C n^2 / 2^n`.
pub fn decay_envelope(c: &ExtReal, n: u32) -> ExtReal {
    let p = c.prec();
    let two = ExtReal::from_i64(2, p);
    c * ExtReal::from_i64((n as i64) * (n as i64), p) / two.powi(n as i32)
}

/// max over stored n of `|b_n| 2^n / n^2`.
pub fn smallest_tail_constant(b: &[ExtReal]) -> ExtReal {
    let p = b[0].prec();
    let two = ExtReal::from_i64(2, p);
    let mut c = ExtReal::zero(p);
    for (i, bn) in b.iter().enumerate() {
        let n = i as i64 + 1;
        let v = bn.abs() * two.powi(n as i32) / (n * n);
        c = c.max(&v);
    }
    c
}

/// Taylor coefficient `f2,k` of the ansatz at mu = 0:
/// `(k+1)^k sum_{rho | k+1} b_{(k+1)/rho} (-1)^(rho-1) rho^(-k)`.
pub fn f2k_from_b(b: &AnsatzCoefficients, k: usize) -> Result<ExtReal> {
    if k + 1 > b.len() {
        return Err(Error::InsufficientCoefficients { needed: k + 1, available: b.len() });
    }
    let p = b.prec();
    let m = k + 1;
    let mut acc = ExtReal::zero(p);
    for rho in 1..=m {
        if !m.is_multiple_of(rho) {
            continue;
        }
        let bn = b.b(m / rho).expect("index checked above");
        let term = bn / ExtReal::from_i64(rho as i64, p).powi(k as i32);
        if rho % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc * ExtReal::from_i64(m as i64, p).powi(k as i32))
}

/// Inverse of [`f2k_from_b`]: the first `m` ansatz coefficients from `f2,0 .. f2,m-1`.
pub fn b_sequence_from_f2(f2k: &[ExtReal], m: usize) -> Result<Vec<ExtReal>> {
    if m == 0 || f2k.len() < m {
        return Err(Error::InsufficientCoefficients { needed: m.max(1), available: f2k.len() });
    }
    let p = f2k[0].prec();
    let mut b: Vec<ExtReal> = Vec::with_capacity(m);
    b.push(f2k[0].clone());
    for n in 1..m {
        let np1 = n + 1;
        let mut v = &f2k[n] / ExtReal::from_i64(np1 as i64, p).powi(n as i32);
        for rho in 2..=np1 {
            if np1 % rho != 0 {
                continue;
            }
            let term = &b[np1 / rho - 1] / ExtReal::from_i64(rho as i64, p).powi(n as i32);
            if rho % 2 == 1 {
                v -= term;
            } else {
                v += term;
            }
        }
        b.push(v);
    }
    Ok(b)
}

/// Ansatz coefficients from Taylor data, with the self-derived tail constant.
pub fn b_from_f2(f2k: &[ExtReal], m: usize) -> Result<AnsatzCoefficients> {
    AnsatzCoefficients::new(b_sequence_from_f2(f2k, m)?)
}

/// Jet in X of `p_n(X)` at `x0`.
pub fn pn_x_jet(n: u32, x0: &ExtReal, order: usize) -> Result<Jet> {
    let p = x0.prec();
    let one = ExtReal::one(p);
    let num = Jet::affine_power(x0.clone(), x0, &one, n - 1, order);
    let den = Jet::affine_power(x0.clone(), x0, &one, n, order).add_constant(&one);
    num.checked_div(&den)
}

/// Jet in mu of `p_n(n mu)` at `mu0`, composing X = n mu0 + n t on the polynomials.
pub fn pn_jet(n: u32, mu0: &ExtReal, order: usize) -> Result<Jet> {
    let p = mu0.prec();
    let nn = ExtReal::from_i64(n as i64, p);
    let x0 = mu0 * &nn;
    let num = Jet::affine_power(mu0.clone(), &x0, &nn, n - 1, order);
    let den = Jet::affine_power(mu0.clone(), &x0, &nn, n, order).add_constant(&ExtReal::one(p));
    num.checked_div(&den)
}

/// f2 jet together with the per-coefficient bound on what the truncation dropped.
#[derive(Clone, Debug)]
pub struct F2Expansion {
    pub jet: Jet,
    /// `tail[k]` bounds the dropped contribution to coefficient k.
    pub tail: Vec<ExtReal>,
    /// Number of ansatz terms summed.
    pub terms: usize,
}

/// Jet of the ansatz at `mu0`, truncated where the analytic tail falls below `tol`.
pub fn f2_jet(b: &AnsatzCoefficients, mu0: &ExtReal, order: usize, tol: &ExtReal) -> Result<Jet> {
    f2_expansion(b, mu0, order, tol).map(|e| e.jet)
}

pub fn f2_expansion(b: &AnsatzCoefficients, mu0: &ExtReal, order: usize, tol: &ExtReal) -> Result<F2Expansion> {
    if mu0.is_sign_negative() {
        return Err(Error::Domain("the ansatz is evaluated at mu >= 0".into()));
    }
    if !(tol > &0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let p = mu0.prec();
    let (terms, tail) = match b.tail() {
        TailPolicy::Exact => (b.len(), vec![ExtReal::zero(p); order + 1]),
        TailPolicy::Bounded(c) => choose_cutoff(c, b.len(), mu0, order, tol)?,
    };
    let mut jet = Jet::zero(mu0.clone(), order);
    for n in 1..=terms {
        let bn = b.b(n).expect("n <= M");
        if bn.is_zero() {
            continue;
        }
        let t = pn_jet(n as u32, mu0, order)?.scale(bn);
        jet = jet.checked_add(&t)?;
    }
    Ok(F2Expansion { jet, tail, terms })
}

/// Working precision for tail estimates; only magnitudes matter.
const TAIL_PREC: u32 = 64;

/// `min(1, X^(n-k-1) / (1 + X^n))` with X = n mu0.
fn profile(n: u32, k: usize, mu0: &ExtReal) -> ExtReal {
    let x = mu0.with_prec(TAIL_PREC) * n as i64;
    let one = ExtReal::one(TAIL_PREC);
    if x.is_zero() {
        return ExtReal::zero(TAIL_PREC);
    }
    let v = x.powi(n as i32 - k as i32 - 1) / (x.powi(n as i32) + &one);
    v.min(&one)
}

/// Smallest cutoff M' in [order+1, M] whose tail bound is below `tol` for all coefficients.
fn choose_cutoff(c: &ExtReal, m: usize, mu0: &ExtReal, order: usize, tol: &ExtReal) -> Result<(usize, Vec<ExtReal>)> {
    let p = mu0.prec();
    if m < order + 1 {
        return Err(Error::InsufficientCoefficients { needed: order + 1, available: m });
    }
    let tol = tol.with_prec(TAIL_PREC);
    let c = c.with_prec(TAIL_PREC);
    let cl = cl_sequence(order)?;
    let fact: Vec<ExtReal> = (0..=order)
        .map(|k| ExtReal::from_integer(&factorial_int(k as u32), TAIL_PREC))
        .collect();
    let weight: Vec<ExtReal> = (0..=order)
        .map(|k| &c * cl[k].with_prec(TAIL_PREC) / &fact[k])
        .collect();
    let term = |n: u32, k: usize| -> ExtReal {
        let nn = ExtReal::from_i64(n as i64, TAIL_PREC);
        let two = ExtReal::from_i64(2, TAIL_PREC);
        &weight[k] * nn.powi(2 * k as i32 + 2) / two.powi(n as i32) * profile(n, k, mu0)
    };
    let mut tails: Vec<ExtReal> = (0..=order)
        .map(|k| infinite_tail(m as u32, k, &weight[k], mu0))
        .collect();
    if tails.iter().any(|t| t > &tol) {
        return Err(Error::InsufficientCoefficients { needed: m + 1, available: m });
    }
    let mut cut = m;
    while cut > order + 1 {
        let next: Vec<ExtReal> = (0..=order).map(|k| &tails[k] + term(cut as u32, k)).collect();
        if next.iter().any(|t| t > &tol) {
            break;
        }
        tails = next;
        cut -= 1;
    }
    Ok((cut, tails.iter().map(|t| t.with_prec(p)).collect()))
}

/// `sum_{n > m} weight n^(2k+2) 2^(-n) profile(n)`.
fn infinite_tail(m: u32, k: usize, weight: &ExtReal, mu0: &ExtReal) -> ExtReal {
    let two = ExtReal::from_i64(2, TAIL_PREC);
    let pw = 2 * k as i32 + 2;
    let mut acc = ExtReal::zero(TAIL_PREC);
    if weight.is_zero() || mu0.is_zero() {
        return acc;
    }
    let mut n = m + 1;
    loop {
        let nn = ExtReal::from_i64(n as i64, TAIL_PREC);
        let envelope = weight * nn.powi(pw) / two.powi(n as i32);
        acc += &envelope * profile(n, k, mu0);
        // ratio of consecutive envelope terms
        let r = ((n as f64 + 1.0) / n as f64).powi(pw) / 2.0;
        if r <= 0.75 {
            let closing = &envelope * ExtReal::from_f64(r / (1.0 - r), TAIL_PREC);
            let small = acc.is_zero() || closing < &acc * ExtReal::from_f64(1e-3, TAIL_PREC);
            if small || n > m + 4096 {
                return acc + closing;
            }
        }
        n += 1;
    }
}

/// Integers `C_l`: `C_0 = 1`, `C_{l+1} = 1 + sum_{j=0}^{l} binom(l+1, j) C_j`.
pub fn cl_integers(l_max: usize) -> Result<Vec<Integer>> {
    let mut c: Vec<Integer> = vec![Integer::from(1)];
    for l in 0..l_max {
        let mut next = Integer::from(1);
        for (j, cj) in c.iter().enumerate() {
            next += binomial(l as u32 + 1, j as u32) * cj;
        }
        c.push(next);
    }
    for (l, cl) in c.iter().enumerate() {
        let cap = Integer::from(Integer::u_pow_u(4, l as u32)) * factorial_int(l as u32);
        if *cl > cap {
            return Err(Error::Contract(format!("C_{l} exceeds 4^l l!")));
        }
    }
    Ok(c)
}

pub fn cl_sequence(l_max: usize) -> Result<Vec<ExtReal>> {
    Ok(cl_integers(l_max)?
        .iter()
        .map(|c| ExtReal::from_integer(c, 256.max(c.significant_bits())))
        .collect())
}
