//! Real-argument factorial `x! = Gamma(x + 1)` from the Stirling series.
//!
//! The argument is raised by integer steps until the asymptotic series reaches the
//! working precision, then shifted back with the recursion `Gamma(z) = Gamma(z + 1) / z`.

use std::sync::Mutex;

use rug::{Float, Integer, Rational};

use super::real::ExtReal;
use crate::error::{Error, Result};

static BERNOULLI: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// Bernoulli number `B_m` (with `B_1 = -1/2`), memoized across calls.
pub fn bernoulli(m: usize) -> Rational {
    let mut table = BERNOULLI.lock().unwrap_or_else(|e| e.into_inner());
    if table.is_empty() {
        table.push(Rational::from(1));
    }
    while table.len() <= m {
        let n = table.len();
        // sum_{j=0}^{n} C(n+1, j) B_j = 0
        let mut acc = Rational::new();
        let mut c = Integer::from(1);
        for (j, bj) in table.iter().enumerate() {
            acc += Rational::from(bj * &c);
            c *= (n + 1 - j) as u32;
            c /= (j + 1) as u32;
        }
        let bn = -acc / Rational::from(n as u32 + 1);
        table.push(bn);
    }
    table[m].clone()
}

fn working_prec(p: u32, z: &ExtReal) -> u32 {
    let mag = z.abs().to_f64().max(2.0).log2().ceil() as u32;
    p + 64 + 2 * mag
}

/// ln Gamma(w) for w at or above the Stirling threshold.
fn ln_gamma_stirling(w: &Float) -> Result<Float> {
    let p = w.prec();
    let half = Float::with_val(p, 0.5);
    let two_pi = Float::with_val(p, rug::float::Constant::Pi) * 2u32;
    let mut s = Float::with_val(p, w - &half) * Float::with_val(p, w.ln_ref());
    s -= w;
    s += two_pi.ln() / 2u32;
    let eps = {
        let mut e = Float::with_val(p, 1);
        e >>= p as i32;
        e
    };
    let w2 = Float::with_val(p, w * w);
    let mut wpow = w.clone();
    let mut prev = Float::with_val(p, f64::INFINITY);
    for k in 1..4096usize {
        let b = bernoulli(2 * k);
        let denom = Integer::from((2 * k) as u64 * (2 * k - 1) as u64);
        let coef = Float::with_val(p, &b) / Float::with_val(p, &denom);
        let term = coef / &wpow;
        let mag = Float::with_val(p, term.abs_ref());
        if mag < Float::with_val(p, &eps * Float::with_val(p, s.abs_ref())) {
            return Ok(s);
        }
        if mag > prev {
            return Err(Error::Accuracy("Stirling series diverged before converging".into()));
        }
        s += &term;
        prev = mag;
        wpow *= &w2;
    }
    Err(Error::Accuracy("Stirling series did not converge".into()))
}

/// Shift count and shifted argument `w = z + m` with `w` beyond the Stirling threshold.
fn raise(z: &Float) -> (u32, Float) {
    let p = z.prec();
    let threshold = (0.12 * p as f64).ceil() + 12.0;
    let zf = z.to_f64();
    let m = if zf >= threshold { 0 } else { (threshold - zf).ceil() as u32 };
    (m, Float::with_val(p, z + m))
}

fn check_pole(x: &ExtReal) -> Result<()> {
    // x! has poles where x + 1 is a non-positive integer.
    if x.is_integer() && x < &ExtReal::from_i64(0, 2) {
        return Err(Error::Domain(format!("factorial pole at x = {x:?}")));
    }
    Ok(())
}

/// `x! = Gamma(x + 1)` at the precision of `x`.
pub fn factorial_real(x: &ExtReal) -> Result<ExtReal> {
    check_pole(x)?;
    let p = x.prec();
    let w = working_prec(p, x);
    let z = Float::with_val(w, x.as_float() + 1u32);
    let (m, zm) = raise(&z);
    let lg = ln_gamma_stirling(&zm)?;
    let mut g = lg.exp();
    let mut prod = Float::with_val(w, 1);
    for i in 0..m {
        prod *= Float::with_val(w, &z + i);
    }
    g /= &prod;
    ExtReal::from_float(Float::with_val(p, g)).finite("factorial")
}

/// `ln |x!|`, for comparisons that would overflow in the linear domain.
pub fn ln_abs_factorial(x: &ExtReal) -> Result<ExtReal> {
    check_pole(x)?;
    let p = x.prec();
    let w = working_prec(p, x);
    let z = Float::with_val(w, x.as_float() + 1u32);
    let (m, zm) = raise(&z);
    let mut lg = ln_gamma_stirling(&zm)?;
    for i in 0..m {
        let t = Float::with_val(w, &z + i).abs();
        lg -= t.ln();
    }
    ExtReal::from_float(Float::with_val(p, lg)).finite("log factorial")
}

/// `|x|! = Gamma(|x| + 1)`.
pub fn abs_factorial(x: &ExtReal) -> Result<ExtReal> {
    factorial_real(&x.abs())
}

/// `ln(|x|!)`.
pub fn ln_factorial_of_abs(x: &ExtReal) -> Result<ExtReal> {
    ln_abs_factorial(&x.abs())
}

/// Exact `n!` as an integer.
pub fn factorial_int(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), Rational::from(1));
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(3), Rational::from(0));
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
    }

    #[test]
    fn examples() {
        let p = 256;
        let sqrt_pi = ExtReal::pi(p).sqrt();
        let g = factorial_real(&ExtReal::from_ratio(-1, 2, p)).unwrap();
        assert!(g.ulps_from(&sqrt_pi) <= 2.0);
        assert_eq!(factorial_real(&ExtReal::from_i64(5, p)).unwrap(), ExtReal::from_i64(120, p));
        let h = factorial_real(&ExtReal::from_ratio(1, 2, p)).unwrap();
        assert!(h.ulps_from(&(sqrt_pi / 2)) <= 2.0);
    }

    #[test]
    fn poles_are_domain_errors() {
        for v in [-1, -2, -7] {
            let r = factorial_real(&ExtReal::from_i64(v, 128));
            assert!(matches!(r, Err(Error::Domain(_))));
        }
    }

    #[test]
    fn negative_non_integer() {
        // (-3/2)! = Gamma(-1/2) = -2 sqrt(pi)
        let p = 192;
        let g = factorial_real(&ExtReal::from_ratio(-3, 2, p)).unwrap();
        let expect = -(ExtReal::pi(p).sqrt() * 2);
        assert!(g.ulps_from(&expect) <= 2.0);
        let lg = ln_abs_factorial(&ExtReal::from_ratio(-3, 2, p)).unwrap();
        assert!(lg.ulps_from(&expect.abs().ln()) <= 4.0);
    }

    #[test]
    fn log_matches_linear() {
        let p = 256;
        for q in [1, 3, 7, 13, 41, 161] {
            let x = ExtReal::from_ratio(q, 4, p);
            let lin = factorial_real(&x).unwrap().ln();
            let lg = ln_abs_factorial(&x).unwrap();
            assert!(lin.rel_diff(&lg).to_f64() < 1e-70, "x = {q}/4");
        }
    }
}
