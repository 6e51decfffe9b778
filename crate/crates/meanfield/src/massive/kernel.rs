use std::collections::BTreeMap;
use std::sync::Mutex;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::quad::integrate;
use crate::series::{ExtReal, Jet};

/// Extra bits carried through the quadrature.
const QUAD_GUARD: u32 = 48;

/// `h(beta) = 2 c beta int_0^inf u^3 e^(-u^2) / (u^2 + beta) du`, to relative `2^-(prec-16)`.
pub fn h_value(beta: &ExtReal) -> Result<ExtReal> {
    if !(beta > &0) || !beta.is_finite() {
        return Err(Error::Domain("h needs beta > 0".into()));
    }
    let p = beta.prec();
    let w = p + QUAD_GUARD;
    let b = Float::with_val(w, beta.as_float());
    let rel_bits = p.saturating_sub(16).max(64);
    let c = ExtReal::coupling_c(w);
    let one = Float::with_val(w, 1);
    let v = if b < one {
        // s = u^2, s + beta = beta e^t:  h = c beta (1 - beta int_0^inf e^(-beta (e^t - 1)) dt)
        let cut = (Float::with_val(w, Float::with_val(w, 200u32 + 2 * p) / &b) + 1u32).ln();
        let f = |t: &Float| {
            let em1 = Float::with_val(w, t.exp_m1_ref());
            Float::with_val(w, -Float::with_val(w, &b * &em1)).exp()
        };
        let j = integrate(f, &Float::new(w), &cut, rel_bits + 8, w)?;
        let inner = Float::with_val(w, 1 - Float::with_val(w, &b * &j));
        Float::with_val(w, c.as_float() * &b) * inner
    } else {
        let cut = Float::with_val(w, (200 + 2 * p) as f64).sqrt() + 1u32;
        let f = |u: &Float| {
            let u2 = Float::with_val(w, u * u);
            let num = Float::with_val(w, &u2 * u) * Float::with_val(w, -&u2).exp();
            num / (u2 + &b)
        };
        let j = integrate(f, &Float::new(w), &cut, rel_bits + 8, w)?;
        Float::with_val(w, c.as_float() * &b) * j * 2u32
    };
    ExtReal::from_float(Float::with_val(p, v)).finite("h quadrature")
}

/// The massive flow kernel at fixed `beta0`, caching one quadrature value per expansion center.
#[derive(Debug)]
pub struct HKernel {
    beta0: ExtReal,
    cache: Mutex<BTreeMap<Rational, ExtReal>>,
}

impl Clone for HKernel {
    fn clone(&self) -> Self {
        let cache = self.cache.lock().unwrap_or_else(|e| e.into_inner()).clone();
        HKernel { beta0: self.beta0.clone(), cache: Mutex::new(cache) }
    }
}

/// Jets of `H` and of `d/dmu log H` at one center.
#[derive(Clone, Debug)]
pub struct HJets {
    pub h: Jet,
    pub big_h: Jet,
    pub log_h_prime: Jet,
}

impl HKernel {
    pub fn new(beta0: ExtReal) -> Result<Self> {
        if !(beta0 > 0) {
            return Err(Error::Domain("beta0 must be positive".into()));
        }
        Ok(HKernel { beta0, cache: Mutex::new(BTreeMap::new()) })
    }

    pub fn beta0(&self) -> &ExtReal {
        &self.beta0
    }

    pub fn prec(&self) -> u32 {
        self.beta0.prec()
    }

    /// `ln(1 + 1/beta0)`.
    pub fn mu_max(&self) -> ExtReal {
        self.beta0.recip().ln_1p()
    }

    /// `h(mu) = h_value(beta0 e^mu)`, memoized on the exact value of `mu`.
    pub fn h_at(&self, mu0: &ExtReal) -> Result<ExtReal> {
        let key = mu0.to_rational().ok_or(Error::NonFinite("expansion center"))?;
        if let Some(v) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(v.with_prec(mu0.prec().max(self.prec())));
        }
        let p = mu0.prec().max(self.prec());
        let beta = self.beta0.with_prec(p) * mu0.with_prec(p).exp();
        let v = h_value(&beta)?;
        self.cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .entry(key)
            .or_insert_with(|| v.clone());
        Ok(v)
    }

    /// Jet of `beta0 e^mu` at `mu0`.
    pub fn e_jet(&self, mu0: &ExtReal, order: usize) -> Jet {
        let p = mu0.prec().max(self.prec());
        let mut coeffs = Vec::with_capacity(order + 1);
        let mut c = self.beta0.with_prec(p) * mu0.with_prec(p).exp();
        for k in 0..=order {
            if k > 0 {
                c /= k as i64;
            }
            coeffs.push(c.clone());
        }
        Jet::new(mu0.with_prec(p), coeffs).expect("order + 1 coefficients")
    }

    /// h jet from `h' = (2 + beta0 e^mu) h - c beta0 e^mu`, seeded by one quadrature value.
    pub fn h_jet(&self, mu0: &ExtReal, order: usize) -> Result<Jet> {
        self.check_center(mu0)?;
        let p = mu0.prec().max(self.prec());
        let e = self.e_jet(mu0, order);
        let c = ExtReal::coupling_c(p);
        let mut h = vec![self.h_at(mu0)?];
        for k in 0..order {
            let mut r = &h[k] * 2 - &c * &e.coeffs()[k];
            for i in 0..=k {
                r += &e.coeffs()[i] * &h[k - i];
            }
            h.push(r / (k as i64 + 1));
        }
        Jet::new(mu0.with_prec(p), h)
    }

    fn check_center(&self, mu0: &ExtReal) -> Result<()> {
        // rounding slack: grids are often given as mu_max itself
        let top = self.mu_max() * (ExtReal::from_i64(2, self.prec()).powi(8 - self.prec() as i32) + 1);
        if mu0.is_sign_negative() && !mu0.is_zero() || mu0 > &top {
            return Err(Error::Domain(format!("center {mu0:?} outside [0, mu_max]")));
        }
        Ok(())
    }

    /// `H = c (1 + beta0) - c beta0 e^mu + h` and `(log H)' = H'/H` to `order`.
    pub fn h_jets(&self, mu0: &ExtReal, order: usize) -> Result<HJets> {
        let p = mu0.prec().max(self.prec());
        let c = ExtReal::coupling_c(p);
        let h = self.h_jet(mu0, order + 1)?;
        let e = self.e_jet(mu0, order + 1);
        let big_h = h
            .checked_sub(&e.scale(&c))?
            .add_constant(&(&c * (self.beta0.with_prec(p) + 1)));
        let log_h_prime = big_h.derivative()?.checked_div(&big_h.truncate(order))?;
        Ok(HJets { h: h.truncate(order), big_h: big_h.truncate(order), log_h_prime })
    }
}

/// `(H, (log H)')` at `mu0`, both of the requested order.
#[allow(non_snake_case)]
pub fn H_jet(kernel: &HKernel, mu0: &ExtReal, order: usize) -> Result<(Jet, Jet)> {
    let j = kernel.h_jets(mu0, order)?;
    Ok((j.big_h, j.log_h_prime))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    /// `c beta (1 - beta e^beta E1(beta))` with `E1(b) = -Ei(-b)`.
    fn h_closed_form(beta: &ExtReal) -> ExtReal {
        let p = beta.prec() + 64;
        let b = Float::with_val(p, beta.as_float());
        let e1 = -Float::with_val(p, (-b.clone()).eint_ref());
        let t = Float::with_val(p, &b * Float::with_val(p, b.exp_ref())) * e1;
        let v = Float::with_val(p, 1 - t) * &b * ExtReal::coupling_c(p).as_float();
        ExtReal::from_float(Float::with_val(beta.prec(), v))
    }

    #[test]
    fn quadrature_matches_exponential_integral() {
        for s in ["1e-8", "1e-4", "0.3", "0.999", "1", "2.5", "40", "1e4"] {
            let beta = ExtReal::parse(s, P).unwrap();
            let q = h_value(&beta).unwrap();
            let o = h_closed_form(&beta);
            assert!(q.rel_diff(&o).to_f64() < 1e-60, "beta = {s}: {:?}", q.rel_diff(&o));
        }
    }

    #[test]
    fn limits() {
        let c = ExtReal::coupling_c(P);
        let small = ExtReal::parse("1e-4", P).unwrap();
        let r = h_value(&small).unwrap() / &small / &c;
        assert!((r.to_f64() - 1.0).abs() < 0.01);
        let big = ExtReal::parse("1e4", P).unwrap();
        let r = h_value(&big).unwrap() / &c;
        assert!((r.to_f64() - 1.0).abs() < 0.01);
    }

    #[test]
    fn first_jet_coefficient() {
        let k = HKernel::new(ExtReal::parse("0.01", P).unwrap()).unwrap();
        let mu0 = ExtReal::from_ratio(3, 2, P);
        let j = k.h_jet(&mu0, 3).unwrap();
        let e = ExtReal::parse("0.01", P).unwrap() * mu0.exp();
        let expect = (&e + 2) * k.h_at(&mu0).unwrap() - ExtReal::coupling_c(P) * &e;
        assert!(j.coeffs()[1].ulps_from(&expect) <= 4.0);
    }

    #[test]
    fn h_at_zero_for_tiny_beta0() {
        let k = HKernel::new(ExtReal::parse("1e-6", P).unwrap()).unwrap();
        let (big_h, _) = H_jet(&k, &ExtReal::zero(P), 2).unwrap();
        let r = big_h.value() / ExtReal::coupling_c(P);
        assert!((r.to_f64() - 1.0).abs() < 0.01);
    }

    #[test]
    fn centers_outside_range_are_rejected() {
        let k = HKernel::new(ExtReal::from_ratio(1, 2, P)).unwrap();
        assert!(k.h_jet(&ExtReal::from_i64(-1, P), 2).is_err());
        assert!(k.h_jet(&ExtReal::from_i64(2, P), 2).is_err());
        assert!(k.h_jet(&ExtReal::one(P), 2).is_ok());
    }
}
