use rug::Float;

use super::real::{binomial, ExtReal};
use crate::error::{Error, Result};

/// Extra bits carried inside multi-term jet operations before the final rounding.
const GUARD: u32 = 32;

/// Truncated Taylor expansion around `center`: `coeffs[k]` is the k-th derivative over k!.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    center: ExtReal,
    coeffs: Vec<ExtReal>,
}

fn lift(xs: &[ExtReal], p: u32) -> Vec<Float> {
    xs.iter().map(|x| Float::with_val(p, x.as_float())).collect()
}

fn lower(xs: Vec<Float>, p: u32) -> Vec<ExtReal> {
    xs.into_iter()
        .map(|x| ExtReal::from_float(Float::with_val(p, x)))
        .collect()
}

impl Jet {
    /// Builds a jet from its coefficients; the order is `coeffs.len() - 1`.
    pub fn new(center: ExtReal, coeffs: Vec<ExtReal>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Contract("a jet needs at least one coefficient".into()));
        }
        Ok(Jet { center, coeffs })
    }

    pub fn zero(center: ExtReal, order: usize) -> Self {
        let p = center.prec();
        Jet {
            center,
            coeffs: vec![ExtReal::zero(p); order + 1],
        }
    }

    pub fn constant(center: ExtReal, value: ExtReal, order: usize) -> Self {
        let mut j = Jet::zero(center, order);
        j.coeffs[0] = value;
        j
    }

    /// The identity function `mu` expanded at the center: `[center, 1, 0, ...]`.
    pub fn variable(center: ExtReal, order: usize) -> Self {
        let p = center.prec();
        let mut j = Jet::constant(center.clone(), center, order);
        if order >= 1 {
            j.coeffs[1] = ExtReal::one(p);
        }
        j
    }

    /// Jet in `t` of `(a + s t)^power`, expanded exactly by the binomial theorem.
    pub fn affine_power(center: ExtReal, a: &ExtReal, s: &ExtReal, power: u32, order: usize) -> Self {
        let p = center.prec();
        let mut coeffs = Vec::with_capacity(order + 1);
        for k in 0..=order {
            if k as u32 > power {
                coeffs.push(ExtReal::zero(p));
                continue;
            }
            let c = ExtReal::from_integer(&binomial(power, k as u32), p + GUARD);
            let term = c * a.powi((power - k as u32) as i32) * s.powi(k as i32);
            coeffs.push(term.with_prec(p));
        }
        Jet { center, coeffs }
    }

    pub fn center(&self) -> &ExtReal {
        &self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ExtReal] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&ExtReal> {
        self.coeffs.get(k)
    }

    pub fn value(&self) -> &ExtReal {
        &self.coeffs[0]
    }

    pub fn prec(&self) -> u32 {
        self.center.prec()
    }

    /// k-th derivative at the center, k! times the stored coefficient.
    pub fn derivative_value(&self, k: usize) -> Option<ExtReal> {
        let c = self.coeffs.get(k)?;
        let mut f = rug::Integer::from(1);
        for i in 2..=k as u32 {
            f *= i;
        }
        Some(c * ExtReal::from_integer(&f, c.prec()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let n = (order + 1).min(self.coeffs.len());
        Jet {
            center: self.center.clone(),
            coeffs: self.coeffs[..n].to_vec(),
        }
    }

    fn same_center(&self, other: &Jet) -> Result<()> {
        if self.center == other.center {
            Ok(())
        } else {
            Err(Error::Contract(format!(
                "jet centers differ: {:?} vs {:?}",
                self.center, other.center
            )))
        }
    }

    pub fn checked_add(&self, other: &Jet) -> Result<Jet> {
        self.same_center(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect();
        Ok(Jet { center: self.center.clone(), coeffs })
    }

    pub fn checked_sub(&self, other: &Jet) -> Result<Jet> {
        self.same_center(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n).map(|k| &self.coeffs[k] - &other.coeffs[k]).collect();
        Ok(Jet { center: self.center.clone(), coeffs })
    }

    /// Cauchy product truncated at the smaller order.
    pub fn checked_mul(&self, other: &Jet) -> Result<Jet> {
        self.same_center(other)?;
        let n = self.coeffs.len().min(other.coeffs.len());
        let p = self.prec();
        let w = p + GUARD;
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = Float::new(w);
            for i in 0..=k {
                acc += Float::with_val(w, self.coeffs[i].as_float() * other.coeffs[k - i].as_float());
            }
            out.push(acc);
        }
        Ok(Jet { center: self.center.clone(), coeffs: lower(out, p) })
    }

    /// Series quotient: `q_k = (a_k - sum_{j=1..k} b_j q_{k-j}) / b_0`.
    pub fn checked_div(&self, other: &Jet) -> Result<Jet> {
        self.same_center(other)?;
        if other.coeffs[0].is_zero() {
            return Err(Error::ZeroConstantTerm);
        }
        let n = self.coeffs.len().min(other.coeffs.len());
        let p = self.prec();
        let w = p + GUARD;
        let a = lift(&self.coeffs[..n], w);
        let b = lift(&other.coeffs[..n], w);
        let mut q: Vec<Float> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = a[k].clone();
            for j in 1..=k {
                acc -= Float::with_val(w, &b[j] * &q[k - j]);
            }
            acc /= &b[0];
            q.push(acc);
        }
        let out = Jet { center: self.center.clone(), coeffs: lower(q, p) };
        out.check_finite("jet quotient")
    }

    /// `exp(a_0) * exp(a - a_0)` via `k e_k = sum_{j=1..k} j a_j e_{k-j}`.
    pub fn exp(&self) -> Result<Jet> {
        let n = self.coeffs.len();
        let p = self.prec();
        let w = p + GUARD;
        let a = lift(&self.coeffs, w);
        let mut e: Vec<Float> = Vec::with_capacity(n);
        e.push(a[0].clone().exp());
        for k in 1..n {
            let mut acc = Float::new(w);
            for j in 1..=k {
                acc += Float::with_val(w, &a[j] * &e[k - j]) * (j as u32);
            }
            acc /= k as u32;
            e.push(acc);
        }
        let out = Jet { center: self.center.clone(), coeffs: lower(e, p) };
        out.check_finite("jet exponential")
    }

    /// d/dmu as a coefficient shift; the order drops by one.
    pub fn derivative(&self) -> Result<Jet> {
        if self.coeffs.len() < 2 {
            return Err(Error::Order { needed: 1, available: 0 });
        }
        let coeffs = (1..self.coeffs.len())
            .map(|k| &self.coeffs[k] * k as i64)
            .collect();
        Ok(Jet { center: self.center.clone(), coeffs })
    }

    pub fn scale(&self, s: &ExtReal) -> Jet {
        Jet {
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add_constant(&self, s: &ExtReal) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += s;
        out
    }

    /// Horner evaluation of the truncated series at `center + offset`.
    pub fn eval(&self, offset: &ExtReal) -> ExtReal {
        let p = self.prec();
        let mut acc = ExtReal::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc * offset + c;
        }
        acc
    }

    fn check_finite(self, what: &'static str) -> Result<Jet> {
        if self.coeffs.iter().all(|c| c.is_finite()) {
            Ok(self)
        } else {
            Err(Error::NonFinite(what))
        }
    }
}

pub fn jet_mul(a: &Jet, b: &Jet) -> Result<Jet> {
    a.checked_mul(b)
}

pub fn jet_div(a: &Jet, b: &Jet) -> Result<Jet> {
    a.checked_div(b)
}

pub fn jet_exp(a: &Jet) -> Result<Jet> {
    a.exp()
}

pub fn jet_eval(a: &Jet, offset: &ExtReal) -> ExtReal {
    a.eval(offset)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn r(v: i64) -> ExtReal {
        ExtReal::from_i64(v, P)
    }

    fn jet(cs: &[i64]) -> Jet {
        Jet::new(r(0), cs.iter().map(|&c| r(c)).collect()).unwrap()
    }

    #[test]
    fn mul_examples() {
        assert_eq!(jet(&[1, 1, 0]).checked_mul(&jet(&[1, -1, 0])).unwrap(), jet(&[1, 0, -1]));
        assert_eq!(jet(&[0, 1]).checked_mul(&jet(&[0, 1])).unwrap(), jet(&[0, 0]));
        assert_eq!(jet(&[1, 2, 3]).checked_mul(&jet(&[1, 1, 1])).unwrap(), jet(&[1, 3, 6]));
    }

    #[test]
    fn order_is_the_minimum() {
        let a = jet(&[1, 2, 3, 4]);
        let b = jet(&[1, 1]);
        assert_eq!(a.checked_mul(&b).unwrap().order(), 1);
        assert_eq!(a.checked_add(&b).unwrap().order(), 1);
    }

    #[test]
    fn centers_must_match() {
        let a = jet(&[1, 2]);
        let b = Jet::new(r(1), vec![r(1), r(1)]).unwrap();
        assert!(matches!(a.checked_mul(&b), Err(Error::Contract(_))));
        assert!(matches!(a.checked_div(&b), Err(Error::Contract(_))));
    }

    #[test]
    fn div_examples() {
        assert_eq!(jet(&[1, 0, 0]).checked_div(&jet(&[1, 1, 0])).unwrap(), jet(&[1, -1, 1]));
        assert_eq!(jet(&[1, 1, 0, 0]).checked_div(&jet(&[1, 1, 0, 0])).unwrap(), jet(&[1, 0, 0, 0]));
        assert_eq!(jet(&[0, 1, 0, 0]).checked_div(&jet(&[1, 0, 1, 0])).unwrap(), jet(&[0, 1, 0, -1]));
        assert_eq!(jet(&[1, 0]).checked_div(&jet(&[0, 1])), Err(Error::ZeroConstantTerm));
    }

    #[test]
    fn exp_examples() {
        let e = jet(&[0, 1, 0]).exp().unwrap();
        assert_eq!(e, Jet::new(r(0), vec![r(1), r(1), ExtReal::from_ratio(1, 2, P)]).unwrap());
        assert_eq!(jet(&[0, 0, 0]).exp().unwrap(), jet(&[1, 0, 0]));
        let ln2 = r(2).ln();
        let e2 = Jet::new(r(0), vec![ln2, r(1)]).unwrap().exp().unwrap();
        assert!(e2.coeffs()[0].ulps_from(&r(2)) <= 1.0);
        assert!(e2.coeffs()[1].ulps_from(&r(2)) <= 1.0);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(jet(&[1, -1, 1]).eval(&r(0)), r(1));
        assert_eq!(jet(&[0, 1]).eval(&ExtReal::from_ratio(1, 2, P)), ExtReal::from_ratio(1, 2, P));
        assert_eq!(jet(&[1, 2, 3]).eval(&r(2)), r(17));
    }

    #[test]
    fn derivative_and_affine_power() {
        assert_eq!(jet(&[1, 2, 3]).derivative().unwrap(), jet(&[2, 6]));
        assert!(jet(&[1]).derivative().is_err());
        let j = Jet::affine_power(r(0), &r(2), &r(3), 2, 3);
        assert_eq!(j, jet(&[4, 12, 9, 0]));
        assert_eq!(jet(&[1, 1, 1, 1]).derivative_value(3).unwrap(), r(6));
    }
}
