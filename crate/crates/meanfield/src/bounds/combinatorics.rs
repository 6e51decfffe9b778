//! Exact and factorial-scale combinatorial inequalities used by the growth induction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

use super::report::{params, BoundReport, ParamValue, TargetId};
use crate::error::{Error, Result};
use crate::series::{binomial, factorial_real, jet_div, ExtReal, Jet};

/// One instance of a combinatorial statement.
#[derive(Clone, Debug)]
pub enum Combinatorics {
    /// Chu-Vandermonde with shifted upper indices, in integers.
    Vandermonde { a: u32, r: u32, m: u32 },
    /// `S(n1, n2, k, a, b)` against its envelope; needs `a + b <= k + 2`,
    /// `3 - n1/4 <= a`, `3 - n2/4 <= b`.
    PairConvolution { n1: u32, n2: u32, k: u32, a: u32, b: u32 },
    /// `F(n1, n2, k, a, a, l)` for `l` in (0, 1); needs `2a <= k + 2` and `3 - n_i/4 <= a`.
    PairConvolutionSum { n1: u32, n2: u32, k: u32, a: u32, l: ExtReal },
    /// `n/(n-2) sum 1/(n1^2 n2^2) <= 1/n^2` over even `n1 + n2 = n + 2`, `n_i >= 4`, for even `n >= 12`.
    SeedRatio { n: u32 },
    /// Derivative `l` of `f/g` by the closed recursion against jet division, on seeded random jets.
    QuotientRule { l: u32, seed: u64 },
}

/// Evaluates one combinatorial statement at working precision `prec`.
pub fn check_combinatorics(case: &Combinatorics, prec: u32) -> Result<BoundReport> {
    match case {
        Combinatorics::Vandermonde { a, r, m } => Ok(vandermonde(*a, *r, *m, prec)),
        Combinatorics::PairConvolution { n1, n2, k, a, b } => pair_convolution(*n1, *n2, *k, *a, *b, prec),
        Combinatorics::PairConvolutionSum { n1, n2, k, a, l } => pair_convolution_sum(*n1, *n2, *k, *a, l, prec),
        Combinatorics::SeedRatio { n } => seed_ratio(*n, prec),
        Combinatorics::QuotientRule { l, seed } => quotient_rule(*l, *seed, prec),
    }
}

fn vandermonde(a: u32, r: u32, m: u32, prec: u32) -> BoundReport {
    let lhs: Integer = (0..=m).map(|nu| binomial(a + nu, nu) * binomial(r + m - nu, m - nu)).sum();
    let rhs = binomial(a + r + m + 1, m);
    let ps = params([("a", a), ("r", r), ("m", m)]);
    BoundReport::exact_identity(TargetId::Vandermonde, ps, &Rational::from(lhs), &Rational::from(rhs), prec)
}

/// All `a, r, m <= max`.
pub fn vandermonde_exhaustive(max: u32, prec: u32) -> Vec<BoundReport> {
    let mut out = Vec::new();
    for a in 0..=max {
        for r in 0..=max {
            for m in 0..=max {
                out.push(vandermonde(a, r, m, prec));
            }
        }
    }
    out
}

fn check_even_n(n1: u32, n2: u32) -> Result<()> {
    if n1 < 4 || n2 < 4 || !n1.is_multiple_of(2) || !n2.is_multiple_of(2) {
        return Err(Error::Precondition(format!("need even n1, n2 >= 4, got ({n1}, {n2})")));
    }
    Ok(())
}

/// `4 a >= 12 - n`, the integer form of `3 - n/4 <= a`.
fn lower_ok(n: u32, a: u32) -> bool {
    4 * a as i64 >= 12 - n as i64
}

fn fact(x: ExtReal) -> ExtReal {
    factorial_real(&x).expect("factorial away from the poles")
}

/// `g(n1, n2, k, nu)` with its numerator and denominator split.
fn g_terms(n1: u32, n2: u32, k: u32, nu: u32, p: u32) -> (ExtReal, ExtReal) {
    let q = |x: u32| ExtReal::from_ratio(x as i64, 4, p);
    let num = fact(q(n1) + nu as i64 - 3).abs() * fact(q(n2) + k as i64 - nu as i64 - 1).abs();
    let den = fact(ExtReal::from_i64((k + 2 - nu) as i64, p)) * fact(ExtReal::from_i64(nu as i64, p));
    (num, den)
}

/// The envelope `((n1+n2)/4 + k - 3)! / (((n1+n2)/4 + a + b - 5) (k + 2 - a - b)!)`.
fn envelope(n1: u32, n2: u32, k: u32, ab: u32, p: u32) -> ExtReal {
    let s = ExtReal::from_ratio((n1 + n2) as i64, 4, p);
    fact(&s + k as i64 - 3) / ((&s + ab as i64 - 5) * fact(ExtReal::from_i64((k + 2 - ab) as i64, p)))
}

/// Relative rounding allowance for equality cases of the factorial inequalities.
fn rounding_slack(p: u32) -> ExtReal {
    ExtReal::from_i64(2, p).powi(24 - p as i32)
}

fn pair_convolution(n1: u32, n2: u32, k: u32, a: u32, b: u32, p: u32) -> Result<BoundReport> {
    check_even_n(n1, n2)?;
    if a + b > k + 2 || !lower_ok(n1, a) || !lower_ok(n2, b) {
        return Err(Error::Precondition(format!(
            "need a + b <= k + 2, 3 - n1/4 <= a, 3 - n2/4 <= b; got n1={n1} n2={n2} k={k} a={a} b={b}"
        )));
    }
    let lhs = (a..=k + 2 - b).fold(ExtReal::zero(p), |acc, nu| {
        let (num, den) = g_terms(n1, n2, k, nu, p);
        acc + num / den
    });
    let rhs = envelope(n1, n2, k, a + b, p);
    let ps = params([("n1", n1), ("n2", n2), ("k", k), ("a", a), ("b", b)]);
    Ok(BoundReport::log(TargetId::PairConvolution, ps, lhs, rhs).with_slack(&rounding_slack(p)))
}

/// The right side is read with `[a! (k + 2 - a)!]^(1 - l)`, the factorial the proof's
/// symmetric bound on `nu! (k + 2 - nu)!` produces.
fn pair_convolution_sum(n1: u32, n2: u32, k: u32, a: u32, l: &ExtReal, p: u32) -> Result<BoundReport> {
    check_even_n(n1, n2)?;
    if 2 * a > k + 2 || !lower_ok(n1, a) || !lower_ok(n2, a) {
        return Err(Error::Precondition(format!(
            "need 2a <= k + 2 and 3 - n_i/4 <= a; got n1={n1} n2={n2} k={k} a={a}"
        )));
    }
    if !(l > &0) || !(l < &1) {
        return Err(Error::Precondition("l must lie in (0, 1)".into()));
    }
    let l = l.with_prec(p);
    let lhs = (a..=k + 2 - a).fold(ExtReal::zero(p), |acc, nu| {
        let (num, den) = g_terms(n1, n2, k, nu, p);
        acc + num / den.pow(&l)
    });
    let sym = fact(ExtReal::from_i64(a as i64, p)) * fact(ExtReal::from_i64((k + 2 - a) as i64, p));
    let one_minus = ExtReal::one(p) - &l;
    let rhs = sym.pow(&one_minus) * envelope(n1, n2, k, 2 * a, p);
    let ps = vec![
        ("n1".to_string(), ParamValue::from(n1)),
        ("n2".to_string(), ParamValue::from(n2)),
        ("k".to_string(), ParamValue::from(k)),
        ("a".to_string(), ParamValue::from(a)),
        ("l".to_string(), ParamValue::from(&l)),
    ];
    Ok(BoundReport::log(TargetId::PairConvolutionSum, ps, lhs, rhs).with_slack(&rounding_slack(p)))
}

fn seed_ratio(n: u32, prec: u32) -> Result<BoundReport> {
    if n < 12 || !n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("need even n >= 12, got {n}")));
    }
    let mut sum = Rational::new();
    let mut n1 = 4;
    while n1 + 4 <= n + 2 {
        let n2 = n + 2 - n1;
        sum += Rational::from((1, Integer::from(n1 * n1) * (n2 * n2)));
        n1 += 2;
    }
    let lhs = sum * Rational::from((n, n - 2));
    let rhs = Rational::from((1, n * n));
    Ok(BoundReport::exact(TargetId::SeedRatio, params([("n", n)]), &lhs, &rhs, prec))
}

/// Even `n` in `[lo, hi]`.
pub fn seed_ratio_range(lo: u32, hi: u32, prec: u32) -> Result<Vec<BoundReport>> {
    (lo..=hi).filter(|n| n % 2 == 0).map(|n| seed_ratio(n, prec)).collect()
}

/// `count` seeded tuples inside the pair-sum hypotheses with `n_i <= 40`, `k <= 40`.
pub fn pair_convolution_sample(count: usize, seed: u64, prec: u32) -> Result<Vec<BoundReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_shift = |n: u32| 12u32.saturating_sub(n).div_ceil(4);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n1 = 2 * rng.gen_range(2..=20u32);
        let n2 = 2 * rng.gen_range(2..=20u32);
        let k = rng.gen_range(0..=40u32);
        let (amin, bmin) = (min_shift(n1), min_shift(n2));
        if amin + bmin > k + 2 {
            continue;
        }
        let a = rng.gen_range(amin..=k + 2 - bmin);
        let b = rng.gen_range(bmin..=k + 2 - a);
        out.push(pair_convolution(n1, n2, k, a, b, prec)?);
    }
    Ok(out)
}

/// Seeded random jets of order `l` with `g(0) in [1, 2]`.
fn random_pair(l: usize, seed: u64, p: u32) -> (Jet, Jet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1i64 << 20;
    let mut draw = |lo: i64, hi: i64| ExtReal::from_ratio(rng.gen_range(lo * scale..=hi * scale), scale, p);
    let f: Vec<ExtReal> = (0..=l).map(|_| draw(-1, 1)).collect();
    let mut g: Vec<ExtReal> = (0..=l).map(|_| draw(-1, 1)).collect();
    g[0] = draw(1, 2);
    let c = ExtReal::zero(p);
    (Jet::new(c.clone(), f).expect("finite"), Jet::new(c, g).expect("finite"))
}

/// `(f/g)^(l) = (1/g) [f^(l) - l! sum_{j=1}^{l} g^(l+1-j) (f/g)^(j-1) / ((l+1-j)! (j-1)!)]`.
pub fn quotient_derivatives(f: &[ExtReal], g: &[ExtReal]) -> Result<Vec<ExtReal>> {
    if f.len() != g.len() || f.is_empty() {
        return Err(Error::Contract("need derivative lists of equal nonzero length".into()));
    }
    if !(g[0] > 0) {
        return Err(Error::Precondition("g must be positive".into()));
    }
    let p = f[0].prec();
    let fl = |m: usize| ExtReal::from_integer(&Integer::from(Integer::factorial(m as u32)), p);
    let mut q: Vec<ExtReal> = Vec::with_capacity(f.len());
    for l in 0..f.len() {
        let mut s = ExtReal::zero(p);
        for j in 1..=l {
            s += &g[l + 1 - j] * &q[j - 1] / (fl(l + 1 - j) * fl(j - 1));
        }
        q.push((&f[l] - fl(l) * s) / &g[0]);
    }
    Ok(q)
}

fn quotient_rule(l: u32, seed: u64, p: u32) -> Result<BoundReport> {
    let l = l as usize;
    let (f, g) = random_pair(l, seed, p);
    let dv = |j: &Jet| -> Vec<ExtReal> { (0..=l).map(|k| j.derivative_value(k).expect("k <= order")).collect() };
    let closed = quotient_derivatives(&dv(&f), &dv(&g))?;
    let via_jets = jet_div(&f, &g)?.derivative_value(l).expect("l <= order");
    let lhs = closed[l].clone();
    let scale = via_jets.abs().max(&ExtReal::one(p));
    let slack = scale * ExtReal::from_i64(2, p).powi(32 - p as i32);
    let ps = vec![("l".to_string(), ParamValue::from(l)), ("seed".to_string(), ParamValue::Int(seed as i64))];
    Ok(BoundReport::identity(TargetId::QuotientRule, ps, lhs, via_jets, &slack))
}
