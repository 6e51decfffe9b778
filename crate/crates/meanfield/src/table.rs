//! Triangular storage for the Taylor coefficients `f2,k` and `g_{n,k}` at mu = 0.

use crate::series::ExtReal;

/// Which flow produced a table.
#[derive(Clone, Debug, PartialEq)]
pub enum Flow {
    Massless { n_components: u32 },
    Massive { beta0: ExtReal },
}

/// Coefficients `f2,k` and `g_{n,k}` (n even, n >= 4) on the computable triangle.
///
/// `g_{n,k}` exists for `k <= 1` and for `k >= 2` with `n + 2 ceil((k-1)/2) <= n_max`;
/// `f2,k` exists when `g_{4,k-1}` does.
#[derive(Clone, Debug)]
pub struct TaylorTable {
    pub(crate) flow: Flow,
    pub(crate) f2: Vec<ExtReal>,
    /// `g[n/2 - 2][k]`
    pub(crate) g: Vec<Vec<ExtReal>>,
    pub(crate) n_max: usize,
    pub(crate) k_max: usize,
}

/// Largest k stored for `g_{n,k}`.
pub fn g_k_limit(n: usize, n_max: usize, k_max: usize) -> usize {
    let d = (n_max - n) / 2;
    k_max.min(2 * d + 1)
}

/// Largest k stored for `f2,k`.
pub fn f2_k_limit(n_max: usize, k_max: usize) -> usize {
    k_max.min(g_k_limit(4, n_max, k_max) + 1)
}

pub fn in_triangle(n: usize, k: usize, n_max: usize, k_max: usize) -> bool {
    n >= 4 && n.is_multiple_of(2) && n <= n_max && k <= g_k_limit(n, n_max, k_max)
}

impl TaylorTable {
    pub(crate) fn empty(flow: Flow, n_max: usize, k_max: usize) -> Self {
        let rows = (n_max - 2) / 2;
        TaylorTable {
            flow,
            f2: Vec::with_capacity(k_max + 1),
            g: (0..rows).map(|_| Vec::new()).collect(),
            n_max,
            k_max,
        }
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn prec(&self) -> u32 {
        self.f2[0].prec()
    }

    pub fn f2(&self, k: usize) -> Option<&ExtReal> {
        self.f2.get(k)
    }

    pub fn f2_coeffs(&self) -> &[ExtReal] {
        &self.f2
    }

    /// `g_{n,k}`, absent outside the computable triangle.
    pub fn g(&self, n: usize, k: usize) -> Option<&ExtReal> {
        if n < 4 || n % 2 == 1 || n > self.n_max {
            return None;
        }
        self.g[n / 2 - 2].get(k)
    }

    /// Every stored `g_{n,k}` in ascending (n, k).
    pub fn g_cells(&self) -> impl Iterator<Item = (usize, usize, &ExtReal)> {
        self.g
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(k, v)| (2 * i + 4, k, v)))
    }

    /// Coefficient of mu^j in `f_n(mu)`: `g_{n, j - n/2 + 2}`, and `f2,j` for n = 2.
    pub fn moment_coeff(&self, n: usize, j: usize) -> Option<ExtReal> {
        if n == 2 {
            return self.f2(j).cloned();
        }
        let shift = n / 2 - 2;
        if j < shift {
            return Some(ExtReal::zero(self.prec()));
        }
        self.g(n, j - shift).cloned()
    }

    pub(crate) fn push_g(&mut self, n: usize, k: usize, v: ExtReal) {
        let row = &mut self.g[n / 2 - 2];
        debug_assert_eq!(row.len(), k);
        row.push(v);
    }
}

/// `sum_{n1 + n2 = n + 2, n_i >= 4} sum_{nu=0}^{j} g_{n1,nu} g_{n2,j-nu}` over ordered pairs.
pub(crate) fn pair_sum(t: &TaylorTable, n: usize, j: usize) -> ExtReal {
    let p = t.prec();
    let mut acc = ExtReal::zero(p);
    let mut n1 = 4;
    while n1 + 4 <= n + 2 {
        let n2 = n + 2 - n1;
        for nu in 0..=j {
            let a = t.g(n1, nu).expect("pair factor inside the triangle");
            let b = t.g(n2, j - nu).expect("pair factor inside the triangle");
            acc += a * b;
        }
        n1 += 2;
    }
    acc
}

/// Cauchy coefficient `sum_{nu=0}^{j} a_nu b_{j-nu}`.
pub(crate) fn cauchy(a: &[ExtReal], b: &[ExtReal], j: usize, prec: u32) -> ExtReal {
    let mut acc = ExtReal::zero(prec);
    for nu in 0..=j {
        acc += &a[nu] * &b[j - nu];
    }
    acc
}
