//! Exact rational algebra of O(N)-invariant symmetric tensors built from Kronecker deltas.

use rug::{Integer, Rational};

use crate::bounds::{params, BoundReport, TargetId};
use crate::error::{Error, Result};
use crate::series::ExtReal;

/// Largest number of components handled densely.
pub const MAX_COMPONENTS: usize = 4;
/// Largest rank handled densely.
pub const MAX_RANK: usize = 8;

fn check_capacity(n: usize, rank: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("need at least one component".into()));
    }
    if n > MAX_COMPONENTS || rank > MAX_RANK {
        return Err(Error::Capacity(format!(
            "dense tensors limited to N <= {MAX_COMPONENTS}, rank <= {MAX_RANK}; got N = {n}, rank = {rank}"
        )));
    }
    Ok(())
}

/// Dense rank-`rank` tensor over `{0..n}^rank`, row-major in the slot order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    n: usize,
    rank: usize,
    entries: Vec<Rational>,
}

impl Tensor {
    pub fn zeros(n: usize, rank: usize) -> Result<Self> {
        check_capacity(n, rank)?;
        Ok(Tensor { n, rank, entries: vec![Rational::new(); n.pow(rank as u32)] })
    }

    /// `delta_{i_a i_b}` over the given disjoint slot pairs covering every slot.
    pub fn delta_product(n: usize, rank: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut seen = vec![false; rank];
        for &(a, b) in pairs {
            for s in [a, b] {
                if s >= rank || seen[s] {
                    return Err(Error::Contract(format!("slot {s} missing or repeated in the pairing")));
                }
                seen[s] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Contract("pairing must cover every slot".into()));
        }
        let mut t = Tensor::zeros(n, rank)?;
        let mut idx = vec![0; rank];
        for lin in 0..t.entries.len() {
            t.decode(lin, &mut idx);
            if pairs.iter().all(|&(a, b)| idx[a] == idx[b]) {
                t.entries[lin] = Rational::from(1);
            }
        }
        Ok(t)
    }

    pub fn n_components(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    fn encode(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + i)
    }

    fn decode(&self, mut lin: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = lin % self.n;
            lin /= self.n;
        }
    }

    /// Entry at zero-based indices.
    pub fn get(&self, idx: &[usize]) -> Result<&Rational> {
        if idx.len() != self.rank || idx.iter().any(|&i| i >= self.n) {
            return Err(Error::Contract(format!("index {idx:?} outside {}^{}", self.n, self.rank)));
        }
        Ok(&self.entries[self.encode(idx)])
    }

    pub fn scale(&self, s: &Rational) -> Tensor {
        let entries = self.entries.iter().map(|e| Rational::from(e * s)).collect();
        Tensor { n: self.n, rank: self.rank, entries }
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        if self.n != other.n || self.rank != other.rank {
            return Err(Error::Contract("tensor shapes differ".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| Rational::from(a + b)).collect();
        Ok(Tensor { n: self.n, rank: self.rank, entries })
    }

    /// Exhaustive symmetry test under every adjacent transposition.
    pub fn is_symmetric(&self) -> bool {
        let mut idx = vec![0; self.rank];
        for lin in 0..self.entries.len() {
            self.decode(lin, &mut idx);
            for s in 1..self.rank {
                idx.swap(s - 1, s);
                let other = self.encode(&idx);
                idx.swap(s - 1, s);
                if self.entries[other] != self.entries[lin] {
                    return false;
                }
            }
        }
        true
    }

    /// Full contraction `T_{i1..in} x_{i1} .. x_{in}`.
    pub fn contract_vector(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.n {
            return Err(Error::Contract("vector length must equal N".into()));
        }
        let mut idx = vec![0; self.rank];
        let mut acc = Rational::new();
        for (lin, e) in self.entries.iter().enumerate() {
            if *e == 0 {
                continue;
            }
            self.decode(lin, &mut idx);
            let mut term = e.clone();
            for &i in &idx {
                term *= &x[i];
            }
            acc += term;
        }
        Ok(acc)
    }
}

/// Fully symmetric tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymTensor(Tensor);

impl std::ops::Deref for SymTensor {
    type Target = Tensor;
    fn deref(&self) -> &Tensor {
        &self.0
    }
}

impl SymTensor {
    /// Accepts `t` only if it is fully symmetric.
    pub fn try_from_tensor(t: Tensor) -> Result<Self> {
        if !t.is_symmetric() {
            return Err(Error::Contract("tensor is not symmetric".into()));
        }
        Ok(SymTensor(t))
    }

    pub fn into_tensor(self) -> Tensor {
        self.0
    }

    /// Builds a symmetric tensor from its value on sorted index tuples.
    fn from_sorted_fn(n: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Rational) -> Result<Self> {
        let mut t = Tensor::zeros(n, rank)?;
        let mut cache = std::collections::HashMap::new();
        let mut idx = vec![0; rank];
        for lin in 0..t.entries.len() {
            t.decode(lin, &mut idx);
            let mut key = idx.clone();
            key.sort_unstable();
            let v = cache.entry(key).or_insert_with_key(|k| f(k)).clone();
            t.entries[lin] = v;
        }
        Ok(SymTensor(t))
    }

    /// `lambda` with `self = lambda * other`, if one exists.
    pub fn ratio_to(&self, other: &SymTensor) -> Option<Rational> {
        if self.n != other.n || self.rank != other.rank {
            return None;
        }
        let pivot = other.entries.iter().position(|e| *e != 0)?;
        let lambda = Rational::from(&self.entries[pivot] / &other.entries[pivot]);
        let same = self.entries.iter().zip(&other.entries).all(|(a, b)| *a == Rational::from(b * &lambda));
        same.then_some(lambda)
    }
}

/// Average of `t` over all permutations of its slots.
pub fn symmetrize(t: &Tensor) -> Result<SymTensor> {
    SymTensor::from_sorted_fn(t.n, t.rank, |sorted| {
        let mut perm = sorted.to_vec();
        let mut acc = Rational::new();
        let mut count = 0u64;
        // distinct rearrangements of the multiset are equally weighted in the full average
        loop {
            acc += t.get(&perm).expect("index in range");
            count += 1;
            if !next_permutation(&mut perm) {
                break;
            }
        }
        acc / Integer::from(count)
    })
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("successor exists");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn double_factorial_odd(m: i64) -> Integer {
    // (m)!! for odd m, with (-1)!! = 1
    let mut acc = Integer::from(1);
    let mut k = m;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// The symmetrized delta product `delta_(i1 i2 .. delta_in-1 in)`.
///
/// An entry is the fraction of perfect pairings of the slots that join equal indices.
pub fn build_pairing_tensor(n: usize, rank: usize) -> Result<SymTensor> {
    check_capacity(n, rank)?;
    if !rank.is_multiple_of(2) {
        return Err(Error::Domain(format!("pairing tensors have even rank, got {rank}")));
    }
    let total = double_factorial_odd(rank as i64 - 1);
    SymTensor::from_sorted_fn(n, rank, |sorted| {
        let mut counts = vec![0i64; n];
        for &i in sorted {
            counts[i] += 1;
        }
        if counts.iter().any(|c| c % 2 != 0) {
            return Rational::new();
        }
        let good = counts.iter().fold(Integer::from(1), |acc, &c| acc * double_factorial_odd(c - 1));
        Rational::from((good, total.clone()))
    })
}

/// `sum_j T_{i1..in j j}`.
pub fn trace_last_pair(t: &SymTensor) -> Result<SymTensor> {
    if t.rank < 2 {
        return Err(Error::Domain("trace needs rank >= 2".into()));
    }
    let r = t.rank - 2;
    SymTensor::from_sorted_fn(t.n, r, |sorted| {
        let mut idx = sorted.to_vec();
        idx.extend([0, 0]);
        let mut acc = Rational::new();
        for j in 0..t.n {
            idx[r] = j;
            idx[r + 1] = j;
            acc += t.get(&idx).expect("index in range");
        }
        acc
    })
}

/// `sum_j S[A_{i1..i(n1-1) j} B_{j i(n1)..in}]`, where `S` averages over the ways of
/// distributing the output slots between the two factors.
pub fn symmetrized_contraction(a: &SymTensor, b: &SymTensor) -> Result<SymTensor> {
    if a.n != b.n {
        return Err(Error::Contract("component counts differ".into()));
    }
    if a.rank == 0 || b.rank == 0 {
        return Err(Error::Domain("both factors need rank >= 1".into()));
    }
    let (n1, n2) = (a.rank, b.rank);
    let rank = n1 + n2 - 2;
    let subsets = subsets_of_size(rank, n1 - 1);
    let count = Integer::from(subsets.len());
    SymTensor::from_sorted_fn(a.n, rank, |sorted| {
        let mut acc = Rational::new();
        let mut ia = vec![0; n1];
        let mut ib = vec![0; n2];
        for mask in &subsets {
            let (mut pa, mut pb) = (0, 1);
            for (s, &i) in sorted.iter().enumerate() {
                if mask & (1 << s) != 0 {
                    ia[pa] = i;
                    pa += 1;
                } else {
                    ib[pb] = i;
                    pb += 1;
                }
            }
            for j in 0..a.n {
                ia[n1 - 1] = j;
                ib[0] = j;
                acc += Rational::from(a.get(&ia).expect("index in range") * b.get(&ib).expect("index in range"));
            }
        }
        acc / &count
    })
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).collect()
}

/// `T'_{i1..in} = M_{i1 j1} .. M_{in jn} T_{j1..jn}`, applied one slot at a time.
pub fn apply_orthogonal(t: &Tensor, m: &[Vec<Rational>]) -> Result<Tensor> {
    check_orthogonal(m, t.n)?;
    let mut cur = t.clone();
    let mut idx = vec![0; t.rank];
    for slot in 0..t.rank {
        let mut next = Tensor::zeros(t.n, t.rank)?;
        for lin in 0..next.entries.len() {
            cur.decode(lin, &mut idx);
            let i = idx[slot];
            let mut acc = Rational::new();
            for j in 0..t.n {
                if m[i][j] == 0 {
                    continue;
                }
                idx[slot] = j;
                acc += Rational::from(&m[i][j] * &cur.entries[cur.encode(&idx)]);
            }
            next.entries[lin] = acc;
        }
        cur = next;
    }
    Ok(cur)
}

fn check_orthogonal(m: &[Vec<Rational>], n: usize) -> Result<()> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::Contract(format!("matrix must be {n}x{n}")));
    }
    for i in 0..n {
        for j in 0..n {
            let dot = (0..n).fold(Rational::new(), |acc, k| acc + Rational::from(&m[i][k] * &m[j][k]));
            if dot != u32::from(i == j) {
                return Err(Error::Contract("matrix is not orthogonal".into()));
            }
        }
    }
    Ok(())
}

/// Reflection in the hyperplane orthogonal to the basis vector `e_k`.
pub fn reflection(n: usize, k: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| (0..n).map(|j| Rational::from(i64::from(i == j) - 2 * i64::from(i == k && j == k))).collect())
        .collect()
}

/// Rotation in the `(p, q)` plane with `cos = c/h`, `sin = s/h` for a Pythagorean triple.
pub fn plane_rotation(n: usize, p: usize, q: usize, (c, s, h): (i64, i64, i64)) -> Result<Vec<Vec<Rational>>> {
    if c * c + s * s != h * h || h == 0 || p == q || p >= n || q >= n {
        return Err(Error::Contract("need a Pythagorean triple and two distinct axes".into()));
    }
    let mut m: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| Rational::from(i64::from(i == j))).collect()).collect();
    m[p][p] = Rational::from((c, h));
    m[q][q] = Rational::from((c, h));
    m[p][q] = Rational::from((-s, h));
    m[q][p] = Rational::from((s, h));
    Ok(m)
}

/// Both sides of `Laplacian |x|^rank = rank (N + rank - 2) |x|^(rank-2)`, the left side
/// taken through the tensor route `rank (rank - 1) (tr F) . x^(rank-2)`.
pub fn laplacian_identity(n: usize, rank: usize, x: &[Rational]) -> Result<(Rational, Rational)> {
    if rank < 2 {
        return Err(Error::Domain("need rank >= 2".into()));
    }
    let f = build_pairing_tensor(n, rank)?;
    let tr = trace_last_pair(&f)?;
    let r = rank as i64;
    let tensor_route = tr.contract_vector(x)? * Integer::from(r * (r - 1));
    let norm2 = x.iter().fold(Rational::new(), |acc, xi| acc + Rational::from(xi * xi));
    let mut power = Rational::from(1);
    for _ in 0..(rank - 2) / 2 {
        power *= &norm2;
    }
    let closed = power * Integer::from(r * (n as i64 + r - 2));
    Ok((tensor_route, closed))
}

struct Mismatch {
    identity: &'static str,
    split: Option<(usize, usize)>,
    index: Vec<usize>,
    deviation: Rational,
}

fn first_mismatch(lhs: &Tensor, rhs: &Tensor) -> Option<(Vec<usize>, Rational)> {
    let pos = lhs.entries.iter().zip(&rhs.entries).position(|(a, b)| a != b)?;
    let mut idx = vec![0; lhs.rank];
    lhs.decode(pos, &mut idx);
    Some((idx, Rational::from(&lhs.entries[pos] - &rhs.entries[pos]).abs()))
}

/// Checks, entrywise and exactly, the trace identity
/// `sum_j F_{i1..i(r-2) j j} = (N + r - 2)/(r - 1) F_{i1..i(r-2)}` and, for every even split
/// `n1 + n2 = r + 2`, `sum_j S[F_{..j} F_{j..}] = F` at output rank `r`.
pub fn verify_contraction_identities(n: usize, rank: usize) -> Result<BoundReport> {
    check_capacity(n, rank)?;
    if rank < 2 || !rank.is_multiple_of(2) {
        return Err(Error::Domain(format!("need an even rank >= 2, got {rank}")));
    }
    let mut mismatch: Option<Mismatch> = None;
    let mut checked = 0usize;

    let full = build_pairing_tensor(n, rank)?;
    let lower = build_pairing_tensor(n, rank - 2)?;
    let tr = trace_last_pair(&full)?;
    let expect = lower.scale(&Rational::from(((n + rank - 2) as i64, (rank - 1) as i64)));
    checked += tr.entries.len();
    if let Some((index, deviation)) = first_mismatch(&tr, &expect) {
        mismatch = Some(Mismatch { identity: "trace", split: None, index, deviation });
    }

    let mut n1 = 2;
    while n1 <= rank && mismatch.is_none() {
        let n2 = rank + 2 - n1;
        let a = build_pairing_tensor(n, n1)?;
        let b = build_pairing_tensor(n, n2)?;
        let c = symmetrized_contraction(&a, &b)?;
        checked += c.entries.len();
        if let Some((index, deviation)) = first_mismatch(&c, &full) {
            mismatch = Some(Mismatch { identity: "product", split: Some((n1, n2)), index, deviation });
        }
        n1 += 2;
    }

    let p = 64;
    let ps = params([("N", n), ("rank", rank)]);
    let zero = ExtReal::zero(p);
    Ok(match mismatch {
        None => BoundReport::identity(TargetId::TensorContraction, ps, zero.clone(), zero.clone(), &zero)
            .with_note(format!("{checked} entries exact")),
        Some(m) => {
            let dev = ExtReal::from_rational(&m.deviation, p);
            let one_based: Vec<usize> = m.index.iter().map(|i| i + 1).collect();
            let split = m.split.map(|(a, b)| format!(" split ({a},{b})")).unwrap_or_default();
            BoundReport::identity(TargetId::TensorContraction, ps, dev, zero.clone(), &zero)
                .with_note(format!("{} identity{split} fails at {one_based:?}", m.identity))
        }
    })
}
