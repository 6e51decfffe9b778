//! Hierarchical-model oracle: Gaussian convolution step, local-potential PDE and its moment form.
//!
//! The effective potential is `u(x) = sum_n a_n |x|^n` with `a_n = 2^(n/2) f_n / n` over even n.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Float;

use crate::bounds::{params, BoundReport, TargetId};
use crate::error::{Error, Result};
use crate::massless::tower_jets;
use crate::quad::gauss_hermite;
use crate::series::{ExtReal, Jet};

/// Even polynomial potential with coefficients `a_2, a_4, ..., a_{n_max}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialPoly {
    /// `a[i]` multiplies `|x|^(2i + 2)`.
    a: Vec<ExtReal>,
    /// Scale parameter carried along for bookkeeping.
    pub lambda: ExtReal,
    pub n_components: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentDirection {
    /// `a_n -> f_n`
    ToF,
    /// `f_n -> a_n`
    FromF,
}

/// `a_n = 2^(n/2) f_n / n` and back, for sequences indexed from n = 2 in steps of two.
pub fn moments_map(direction: MomentDirection, data: &[ExtReal]) -> Vec<ExtReal> {
    data.iter()
        .enumerate()
        .map(|(i, v)| {
            let n = 2 * i as i64 + 2;
            // 2^(n/2) is a power of two, so only the division by n rounds
            let pow = ExtReal::from_i64(2, v.prec()).powi(n as i32 / 2);
            match direction {
                MomentDirection::FromF => v * pow / n,
                MomentDirection::ToF => v * n / pow,
            }
        })
        .collect()
}

impl PotentialPoly {
    pub fn new(a: Vec<ExtReal>, lambda: ExtReal, n_components: u32) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::Contract("potential needs at least the quadratic term".into()));
        }
        if n_components == 0 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        Ok(PotentialPoly { a, lambda, n_components })
    }

    /// From moments `f_2, f_4, ..., f_{n_max}`.
    pub fn from_moments(f: &[ExtReal], lambda: ExtReal, n_components: u32) -> Result<Self> {
        Self::new(moments_map(MomentDirection::FromF, f), lambda, n_components)
    }

    pub fn moments(&self) -> Vec<ExtReal> {
        moments_map(MomentDirection::ToF, &self.a)
    }

    pub fn coeffs(&self) -> &[ExtReal] {
        &self.a
    }

    pub fn n_max(&self) -> usize {
        2 * self.a.len()
    }

    pub fn prec(&self) -> u32 {
        self.a[0].prec()
    }

    pub fn eval(&self, x: &ExtReal) -> ExtReal {
        let x2 = x * x;
        let mut acc = ExtReal::zero(self.prec().max(x.prec()));
        for c in self.a.iter().rev() {
            acc = (acc + c) * &x2;
        }
        acc
    }

    /// Coefficients of the PDE right side, `½ Δu - ½ |∇u|^2 + 4u - x·∇u`, indexed by power.
    pub fn pde_rhs_coeffs(&self) -> Vec<ExtReal> {
        let p = self.prec();
        let nn = self.n_components as i64;
        let top = 2 * self.n_max();
        let mut out = vec![ExtReal::zero(p); top + 1];
        let a = |n: usize| -> Option<&ExtReal> {
            if n >= 2 && n.is_multiple_of(2) {
                self.a.get(n / 2 - 1)
            } else {
                None
            }
        };
        for (n, slot) in out.iter_mut().enumerate().step_by(2) {
            let ni = n as i64;
            let mut v = ExtReal::zero(p);
            if let Some(an2) = a(n + 2) {
                v += an2 * ((ni + 2) * (ni + nn)) / 2;
            }
            let mut n1 = 2;
            while n1 + 2 <= n + 2 {
                if let (Some(x), Some(y)) = (a(n1), a(n + 2 - n1)) {
                    v -= x * y * (n1 as i64 * (ni + 2 - n1 as i64)) / 2;
                }
                n1 += 2;
            }
            if let Some(an) = a(n) {
                v += an * (4 - ni);
            }
            *slot = v;
        }
        out
    }

    /// `-lambda d/dlambda a_n` from the closed moment system, n = 2..n_max.
    pub fn moment_system_coeffs(&self) -> Vec<ExtReal> {
        let full = self.pde_rhs_coeffs();
        let p = self.prec();
        let mut out = vec![ExtReal::zero(p); self.n_max() + 1];
        for n in (2..=self.n_max()).step_by(2) {
            out[n] = full[n].clone();
        }
        out
    }
}

fn eval_even(coeffs: &[ExtReal], x: &ExtReal) -> ExtReal {
    let x2 = x * x;
    let mut acc = ExtReal::zero(coeffs[0].prec().max(x.prec()));
    for c in coeffs.iter().step_by(2).rev() {
        acc = acc * &x2 + c;
    }
    acc
}

/// Right side of the local-potential PDE at `x`.
pub fn pde_rhs(u: &PotentialPoly, x: &ExtReal) -> ExtReal {
    eval_even(&u.pde_rhs_coeffs(), x)
}

/// PDE right side minus the moment-system derivative: the constant mode `N a_2` plus the
/// products that land beyond `n_max`.
pub fn pde_residual(u: &PotentialPoly, x: &ExtReal) -> ExtReal {
    let full = u.pde_rhs_coeffs();
    let closed = u.moment_system_coeffs();
    let mut diff = full.clone();
    for (n, v) in closed.iter().enumerate() {
        diff[n] = &full[n] - v;
    }
    eval_even(&diff, x)
}

const GH_ORDERS: [usize; 5] = [16, 32, 64, 128, 256];
/// Exponent beyond which the integrand is rejected as unbounded.
const MAX_EXPONENT: f64 = 1e4;

/// `u(lambda / L, x) = -ln int dmu_L(y) e^(-L^4 u(x/L + y))`, one-component only.
pub fn convolution_step(u: &PotentialPoly, l: &ExtReal, x_samples: &[ExtReal]) -> Result<Vec<ExtReal>> {
    if u.n_components != 1 {
        return Err(Error::Contract("the convolution step is one-dimensional".into()));
    }
    if !(l > &1) {
        return Err(Error::Domain("L must exceed 1".into()));
    }
    let p = u.prec().max(l.prec());
    let lm1 = l - 1;
    let scale = (&lm1 * 2).sqrt();
    let clip = lm1.sqrt() * 12;
    let l4 = l.powi(4);
    let rel = ExtReal::from_f64(1e-15, p);
    x_samples
        .iter()
        .map(|x| {
            let xs = x / l;
            let mut prev: Option<ExtReal> = None;
            for &m in GH_ORDERS.iter() {
                let rule = gauss_hermite(m, p);
                let mut acc = ExtReal::zero(p);
                let mut mass = ExtReal::zero(p);
                for (z, w) in rule.0.iter().zip(rule.1.iter()) {
                    let y = &scale * ExtReal::from_float(Float::with_val(p, z));
                    if y.abs() > clip {
                        continue;
                    }
                    let e = -(&l4 * u.eval(&(&xs + &y)));
                    if e.to_f64() > MAX_EXPONENT {
                        return Err(Error::Domain(format!(
                            "potential too negative near x = {}: exponent {}",
                            (&xs + &y).to_sci(6),
                            e.to_sci(6)
                        )));
                    }
                    let w = ExtReal::from_float(Float::with_val(p, w));
                    acc += e.exp() * &w;
                    mass += w;
                }
                // normalized over the retained nodes, so the clip costs no probability mass
                let integral = acc / mass;
                if let Some(q) = &prev {
                    if (&integral - q).abs() <= &rel * integral.abs() {
                        return Ok(-integral.ln());
                    }
                }
                prev = Some(integral);
            }
            Err(Error::Accuracy("Gauss–Hermite orders did not agree".into()))
        })
        .collect()
}

/// `|(u(lambda/L, x) - u(lambda, x)) / ln L - pde_rhs(x)|` at each sample.
pub fn convolution_discrepancy(u: &PotentialPoly, l: &ExtReal, x_samples: &[ExtReal]) -> Result<Vec<ExtReal>> {
    let stepped = convolution_step(u, l, x_samples)?;
    let ln_l = l.ln();
    Ok(stepped
        .iter()
        .zip(x_samples)
        .map(|(v, x)| ((v - u.eval(x)) / &ln_l - pde_rhs(u, x)).abs())
        .collect())
}

/// Moment jets from the polynomial PDE with `-lambda d/dlambda = 2 d/dmu`, one order spent per step.
pub fn pde_route_jets(f2: &Jet, n_components: u32, n_max: usize) -> Result<Vec<Jet>> {
    let p = f2.prec();
    let nn = n_components as i64;
    let to_a = |n: i64| ExtReal::from_i64(2, p).powi(n as i32 / 2) / n;
    let mut a = vec![f2.scale(&to_a(2))];
    for n in (2..n_max).step_by(2) {
        let ni = n as i64;
        let an = &a[n / 2 - 1];
        let o = an.order().checked_sub(1).ok_or(Error::Order { needed: 1, available: 0 })?;
        // ½(n+2)(n+N) a_{n+2} = 2 a_n' + ½ sum n1 n2 a a - (4 - n) a_n
        let mut rhs = an.derivative()?.scale(&ExtReal::from_i64(2, p));
        let mut n1 = 2;
        while n1 + 2 <= n + 2 {
            let n2 = n + 2 - n1;
            let prod = a[n1 / 2 - 1].truncate(o).checked_mul(&a[n2 / 2 - 1].truncate(o))?;
            rhs = rhs.checked_add(&prod.scale(&ExtReal::from_ratio((n1 * n2) as i64, 2, p)))?;
            n1 += 2;
        }
        rhs = rhs.checked_sub(&an.truncate(o).scale(&ExtReal::from_i64(4 - ni, p)))?;
        a.push(rhs.scale(&ExtReal::from_ratio(2, (ni + 2) * (ni + nn), p)));
    }
    Ok(a.iter()
        .enumerate()
        .map(|(i, j)| {
            let n = 2 * i as i64 + 2;
            j.scale(&to_a(n).recip())
        })
        .collect())
}

/// Random `f2` jet, then both routes to `f_{n_max}`; passes when every coefficient agrees to 1e-30.
pub fn equivalence_check(n_max: usize, n_components: u32, seed: u64, prec: u32) -> Result<BoundReport> {
    if n_max < 4 || n_max % 2 == 1 {
        return Err(Error::Contract(format!("n_max must be even and at least 4, got {n_max}")));
    }
    let order = n_max / 2 + 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<ExtReal> = (0..=order)
        .map(|_| ExtReal::from_f64(rng.gen_range(-1.0..1.0), prec))
        .collect();
    let f2 = Jet::new(ExtReal::zero(prec), coeffs)?;
    equivalence_report(&f2, n_components, n_max, seed)
}

/// Both routes from a given `f2` jet.
pub fn equivalence_report(f2: &Jet, n_components: u32, n_max: usize, seed: u64) -> Result<BoundReport> {
    let p = f2.prec();
    let tower = tower_jets(f2, n_components, n_max)?;
    let pde = pde_route_jets(f2, n_components, n_max)?;
    let mut worst = ExtReal::zero(p);
    for (n, jb) in tower.jets() {
        let ja = &pde[n / 2 - 1];
        let scale = jb.coeffs().iter().fold(ExtReal::zero(p), |m, c| m.max(&c.abs()));
        for (x, y) in ja.coeffs().iter().zip(jb.coeffs()) {
            let d = (x - y).abs();
            let r = if scale.is_zero() { d } else { d / &scale };
            worst = worst.max(&r);
        }
    }
    let tol = ExtReal::parse("1e-30", p)?;
    Ok(BoundReport::linear(
        TargetId::MomentEquivalence,
        params([("N", n_components as i64), ("n_max", n_max as i64), ("seed", seed as i64)]),
        worst,
        tol,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn r(s: &str) -> ExtReal {
        ExtReal::parse(s, P).unwrap()
    }

    #[test]
    fn moments_map_examples() {
        let a = moments_map(MomentDirection::FromF, &[ExtReal::one(P)]);
        assert_eq!(a[0], ExtReal::one(P));
        let f = vec![r("0.3"), r("-1.7"), r("2e-5"), r("11")];
        let back = moments_map(MomentDirection::ToF, &moments_map(MomentDirection::FromF, &f));
        for (x, y) in f.iter().zip(&back) {
            assert!(x.ulps_from(y) <= 2.0);
        }
        let z = vec![ExtReal::zero(P); 3];
        assert!(moments_map(MomentDirection::FromF, &z).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn zero_potential() {
        let u = PotentialPoly::new(vec![ExtReal::zero(P); 3], ExtReal::one(P), 1).unwrap();
        let xs = [r("0"), r("0.4")];
        let out = convolution_step(&u, &r("1.001"), &xs).unwrap();
        assert!(out.iter().all(|v| v.is_zero()));
        assert!(pde_residual(&u, &r("0.7")).is_zero());
    }

    #[test]
    fn convolution_is_even() {
        let u = PotentialPoly::new(vec![r("0.2"), r("0.05"), r("-0.01")], ExtReal::one(P), 1).unwrap();
        let xs = [r("0.3"), r("-0.3")];
        let out = convolution_step(&u, &r("1.001"), &xs).unwrap();
        assert!(out[0].ulps_from(&out[1]) <= 64.0);
    }

    #[test]
    fn quadratic_step_tracks_the_pde() {
        let u = PotentialPoly::new(vec![r("0.01")], ExtReal::one(P), 1).unwrap();
        let xs = [r("0"), r("0.5")];
        let d1 = convolution_discrepancy(&u, &r("1.001"), &xs).unwrap();
        let d2 = convolution_discrepancy(&u, &r("1.0005"), &xs).unwrap();
        for (a, b) in d1.iter().zip(&d2) {
            let ratio = (a / b).to_f64();
            assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
        }
    }

    #[test]
    fn single_mode_residual_is_the_constant_mode() {
        let u = PotentialPoly::new(vec![r("0.3")], ExtReal::one(P), 1).unwrap();
        for x in ["0", "0.5", "2"] {
            assert!(pde_residual(&u, &r(x)).ulps_from(&r("0.3")) <= 2.0);
        }
        // at x = 0 only the Laplacian acts
        assert_eq!(pde_rhs(&u, &r("0")), r("0.3"));
    }

    #[test]
    fn f4_from_both_routes() {
        let c = vec![r("0.2"), r("-0.1"), r("0.05"), r("0.3")];
        let f2 = Jet::new(ExtReal::zero(P), c).unwrap();
        let pde = pde_route_jets(&f2, 1, 4).unwrap();
        let expect = (r("0.04") - r("0.2") + r("-0.1")) / 3;
        assert!(pde[1].value().ulps_from(&expect) <= 8.0);
    }

    #[test]
    fn equivalence_passes() {
        for nc in [1, 2, 3] {
            let rep = equivalence_check(12, nc, 7, P).unwrap();
            assert!(rep.pass, "N = {nc}: {:?}", rep.lhs);
        }
        let f2 = Jet::zero(ExtReal::zero(P), 8);
        let rep = equivalence_report(&f2, 1, 12, 0).unwrap();
        assert!(rep.pass && rep.lhs.is_zero());
    }
}
