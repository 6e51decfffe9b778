//! Gauss–Legendre (adaptive) and Gauss–Hermite quadrature at arbitrary precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rug::Float;

use crate::error::{Error, Result};

const POINTS: usize = 40;
const MAX_PANELS: usize = 1 << 14;

type Rule = Arc<(Vec<Float>, Vec<Float>)>;

static RULES: Mutex<Option<HashMap<(usize, u32), Rule>>> = Mutex::new(None);
static HERMITE: Mutex<Option<HashMap<(usize, u32), Rule>>> = Mutex::new(None);

/// Nodes and weights on [-1, 1], by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize, prec: u32) -> Rule {
    let mut guard = RULES.lock().unwrap_or_else(|e| e.into_inner());
    let map = guard.get_or_insert_with(HashMap::new);
    if let Some(r) = map.get(&(n, prec)) {
        return r.clone();
    }
    let w = prec + 32;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let tol = Float::with_val(w, Float::i_exp(1, -(prec as i32) - 8));
    for i in 0..n {
        let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut x = Float::with_val(w, guess);
        let mut dp = Float::new(w);
        for _ in 0..200 {
            let (p, d) = legendre(n, &x);
            let step = Float::with_val(w, &p / &d);
            x -= &step;
            dp = d;
            if step.abs() < tol {
                let (_, d) = legendre(n, &x);
                dp = d;
                break;
            }
        }
        let one_m = Float::with_val(w, 1 - Float::with_val(w, &x * &x));
        let wt = Float::with_val(w, 2) / (one_m * Float::with_val(w, &dp * &dp));
        nodes.push(Float::with_val(prec, &x));
        weights.push(Float::with_val(prec, &wt));
    }
    let rule = Arc::new((nodes, weights));
    map.insert((n, prec), rule.clone());
    rule
}

/// `(P_n(x), P_n'(x))`.
fn legendre(n: usize, x: &Float) -> (Float, Float) {
    let w = x.prec();
    let mut p0 = Float::with_val(w, 1);
    let mut p1 = x.clone();
    for k in 2..=n {
        let kf = k as u32;
        let t = Float::with_val(w, x * &p1) * (2 * kf - 1) - Float::with_val(w, &p0 * (kf - 1));
        let p2 = t / kf;
        p0 = p1;
        p1 = p2;
    }
    let num = Float::with_val(w, x * &p1) - &p0;
    let den = Float::with_val(w, x * x) - 1u32;
    let d = num * n as u32 / den;
    (p1, d)
}

fn panel<F: Fn(&Float) -> Float>(f: &F, a: &Float, b: &Float, rule: &Rule) -> Float {
    let w = a.prec();
    let half = Float::with_val(w, b - a) / 2u32;
    let mid = Float::with_val(w, b + a) / 2u32;
    let mut acc = Float::new(w);
    for (x, wt) in rule.0.iter().zip(rule.1.iter()) {
        let t = Float::with_val(w, &mid + Float::with_val(w, &half * x));
        acc += Float::with_val(w, f(&t) * wt);
    }
    acc * half
}

/// `int_a^b f` to relative accuracy `2^-rel_bits` of the integral magnitude, evaluated at `prec` bits.
pub fn integrate<F: Fn(&Float) -> Float>(f: F, a: &Float, b: &Float, rel_bits: u32, prec: u32) -> Result<Float> {
    let rule = gauss_legendre(POINTS, prec);
    let a = Float::with_val(prec, a);
    let b = Float::with_val(prec, b);
    // coarse whole-interval estimate sets the absolute target
    let mut coarse = Float::new(prec);
    let mut pieces = Vec::new();
    for i in 0..8u32 {
        let len = Float::with_val(prec, &b - &a) / 8u32;
        let lo = Float::with_val(prec, &a + Float::with_val(prec, &len * i));
        let hi = Float::with_val(prec, &a + Float::with_val(prec, &len * (i + 1)));
        let v = panel(&f, &lo, &hi, &rule);
        coarse += &v;
        pieces.push((lo, hi, v));
    }
    let scale = Float::with_val(prec, coarse.abs_ref());
    let mut eps = Float::with_val(prec, &scale * Float::with_val(prec, Float::i_exp(1, -(rel_bits as i32))));
    if eps.is_zero() {
        eps = Float::with_val(prec, Float::i_exp(1, -(prec as i32)));
    }
    let mut total = Float::new(prec);
    let mut stack = pieces;
    let mut count = 0usize;
    while let Some((lo, hi, whole)) = stack.pop() {
        count += 1;
        if count > MAX_PANELS {
            return Err(Error::Accuracy("quadrature did not converge".into()));
        }
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        let left = panel(&f, &lo, &mid, &rule);
        let right = panel(&f, &mid, &hi, &rule);
        let split = Float::with_val(prec, &left + &right);
        let err = Float::with_val(prec, &split - &whole).abs();
        let width = Float::with_val(prec, &hi - &lo);
        let span = Float::with_val(prec, &b - &a);
        let budget = Float::with_val(prec, &eps * &width) / &span;
        if err <= budget {
            total += &split;
        } else {
            stack.push((lo, mid.clone(), left));
            stack.push((mid, hi, right));
        }
    }
    Ok(total)
}

/// Orthonormal Hermite values `(psi_n(z), psi_{n-1}(z))` without the Gaussian factor.
fn hermite_pair(n: usize, z: &Float) -> (Float, Float) {
    let w = z.prec();
    let pi = Float::with_val(w, rug::float::Constant::Pi);
    let mut p1 = Float::with_val(w, pi.sqrt().sqrt().recip());
    let mut p2 = Float::new(w);
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let a = Float::with_val(w, Float::with_val(w, 2u32) / j as u32).sqrt();
        let b = Float::with_val(w, Float::with_val(w, (j - 1) as u32) / j as u32).sqrt();
        p1 = Float::with_val(w, z * &p2) * a - Float::with_val(w, &p3 * b);
    }
    (p1, p2)
}

/// Nodes and weights for `int e^(-z^2) g(z) dz`, nodes ascending.
pub fn gauss_hermite(n: usize, prec: u32) -> Rule {
    let mut guard = HERMITE.lock().unwrap_or_else(|e| e.into_inner());
    let map = guard.get_or_insert_with(HashMap::new);
    if let Some(r) = map.get(&(n, prec)) {
        return r.clone();
    }
    let w = prec + 32;
    let m = n.div_ceil(2);
    let nf = n as f64;
    let tol = Float::with_val(w, Float::i_exp(1, -(prec as i32) - 8));
    let mut pos: Vec<(Float, Float)> = Vec::with_capacity(m);
    let mut guesses: Vec<f64> = Vec::with_capacity(m);
    for i in 0..m {
        // starting values for the largest roots first
        let z: f64 = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => guesses[0] - 1.14 * nf.powf(0.426) / guesses[0],
            2 => 1.86 * guesses[1] - 0.86 * guesses[0],
            3 => 1.91 * guesses[2] - 0.91 * guesses[1],
            _ => 2.0 * guesses[i - 1] - guesses[i - 2],
        };
        let mut x = Float::with_val(w, z);
        let mut dp = Float::new(w);
        for _ in 0..200 {
            let (p, q) = hermite_pair(n, &x);
            dp = Float::with_val(w, Float::with_val(w, 2 * n as u32).sqrt() * &q);
            let step = Float::with_val(w, &p / &dp);
            x -= &step;
            if step.abs() < tol {
                let (_, q) = hermite_pair(n, &x);
                dp = Float::with_val(w, Float::with_val(w, 2 * n as u32).sqrt() * &q);
                break;
            }
        }
        guesses.push(x.to_f64());
        let wt = Float::with_val(w, 2) / Float::with_val(w, &dp * &dp);
        pos.push((x, wt));
    }
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (x, wt) in pos.iter() {
        nodes.push(Float::with_val(prec, -x));
        weights.push(Float::with_val(prec, wt));
    }
    let skip = if n % 2 == 1 { 1 } else { 0 };
    for (x, wt) in pos.iter().rev().skip(skip) {
        nodes.push(Float::with_val(prec, x));
        weights.push(Float::with_val(prec, wt));
    }
    if n % 2 == 1 {
        // the middle root is exactly zero
        let mid = n / 2;
        nodes[mid] = Float::new(prec);
    }
    let rule = Arc::new((nodes, weights));
    map.insert((n, prec), rule.clone());
    rule
}
