//! Occupation-vector combinatorics.
//!
//! An occupation vector `α = (α_1, …, α_d)` with `Σ α_j = n` labels a Dicke
//! state, an orbit of entries of a symmetric tensor and a monomial `x^α`.
//! Everything downstream stores data keyed by occupation vectors in the
//! lexicographic order produced by [`enumerate_occupations`].

use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest order for which factorials are evaluated exactly in `u128`.
pub const MAX_EXACT_ORDER: u32 = 30;

/// Errors raised by combinatorial routines.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CombinatError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested size exceeds the configured desk-scale bounds.
    #[error("size (n={n}, d={d}) exceeds the configured bounds (n<={max_n}, d<={max_d})")]
    BoundExceeded { n: u32, d: usize, max_n: u32, max_d: usize },
}

/// A `d`-tuple of nonnegative integers; its order is the sum of the entries.
///
/// The derived ordering is lexicographic on the entries, which is the total
/// order used for every map keyed by occupation vectors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    /// Wraps a list of entries.
    pub fn new(entries: Vec<u32>) -> Self {
        OccupationVector(entries)
    }

    /// The zero vector of dimension `d`.
    pub fn zeros(d: usize) -> Self {
        OccupationVector(vec![0; d])
    }

    /// `k · e_j` in dimension `d` (0-based `j`).
    pub fn unit(d: usize, j: usize, k: u32) -> Self {
        let mut v = vec![0; d];
        v[j] = k;
        OccupationVector(v)
    }

    /// Checks that the entries sum to `n`.
    pub fn with_order(entries: Vec<u32>, n: u32) -> Result<Self, CombinatError> {
        let v = OccupationVector(entries);
        if v.order() != n {
            return Err(CombinatError::Domain(format!(
                "occupation vector {v} has order {} but {n} was declared",
                v.order()
            )));
        }
        Ok(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    /// Number of slots `d`.
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Sum of the entries `n = |α|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    /// Entrywise sum; both vectors must have the same dimension.
    pub fn add(&self, other: &OccupationVector) -> OccupationVector {
        debug_assert_eq!(self.dim(), other.dim());
        OccupationVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Entrywise difference, or `None` if some entry would become negative.
    pub fn checked_sub(&self, other: &OccupationVector) -> Option<OccupationVector> {
        if self.dim() != other.dim() {
            return None;
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(OccupationVector)
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &OccupationVector) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Every entry multiplied by `k`.
    pub fn scale(&self, k: u32) -> OccupationVector {
        OccupationVector(self.0.iter().map(|a| a * k).collect())
    }

    /// Indices `j` (0-based) with a nonzero entry.
    pub fn support(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.0[j] > 0).collect()
    }

    /// The multinomial coefficient `n!/(α_1!···α_d!)` with `n = |α|`.
    pub fn multinomial(&self) -> Result<u128, CombinatError> {
        multinomial(self.order(), self)
    }

    /// The multinomial coefficient as a float.
    ///
    /// # Panics
    /// Panics if the order exceeds [`MAX_EXACT_ORDER`]; every container in
    /// the workspace rejects such orders at construction.
    pub fn weight(&self) -> f64 {
        self.multinomial()
            .expect("order within exact multinomial range") as f64
    }

    /// Position of this vector in `enumerate_occupations(order, dim)`.
    pub fn rank(&self) -> usize {
        let d = self.dim();
        let mut remaining = self.order();
        let mut rank = 0usize;
        for (i, &a) in self.0.iter().enumerate() {
            let slots_after = d - i - 1;
            if slots_after == 0 {
                break;
            }
            for v in 0..a {
                rank += sym_dim(remaining - v, slots_after);
            }
            remaining -= a;
        }
        rank
    }
}

impl fmt::Debug for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A dense multi-index `i = (i_1, …, i_n)` with 1-based entries in `[1..d]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when the entries are nondecreasing.
    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|w| w[0] <= w[1])
    }
}

/// A nonincreasing occupation vector; it represents an orbit under
/// permutations of the `d` slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(OccupationVector);

impl Partition {
    /// Accepts a nonincreasing occupation vector.
    pub fn new(parts: OccupationVector) -> Result<Self, CombinatError> {
        if parts.entries().windows(2).any(|w| w[0] < w[1]) {
            return Err(CombinatError::Domain(format!(
                "partition {parts} is not nonincreasing"
            )));
        }
        Ok(Partition(parts))
    }

    /// The partition whose orbit contains `α` (its entries sorted downwards).
    pub fn of(alpha: &OccupationVector) -> Self {
        let mut e = alpha.entries().to_vec();
        e.sort_unstable_by(|a, b| b.cmp(a));
        Partition(OccupationVector(e))
    }

    pub fn parts(&self) -> &OccupationVector {
        &self.0
    }
}

/// Counts how often each value `1..=d` occurs in `i` (the map `γ`).
pub fn occupation_count(i: &MultiIndex, d: usize) -> Result<OccupationVector, CombinatError> {
    let mut counts = vec![0u32; d];
    for &e in i.entries() {
        if e == 0 || e as usize > d {
            return Err(CombinatError::Domain(format!(
                "multi-index entry {e} outside [1..{d}]"
            )));
        }
        counts[e as usize - 1] += 1;
    }
    Ok(OccupationVector(counts))
}

/// The nondecreasing multi-index whose occupation count is `α`.
pub fn canonical_index(alpha: &OccupationVector) -> MultiIndex {
    let mut out = Vec::with_capacity(alpha.order() as usize);
    for (j, &a) in alpha.entries().iter().enumerate() {
        out.extend(std::iter::repeat_n(j as u32 + 1, a as usize));
    }
    MultiIndex(out)
}

fn factorial(n: u32) -> Result<u128, CombinatError> {
    if n > MAX_EXACT_ORDER {
        return Err(CombinatError::Domain(format!(
            "factorial of {n} exceeds the exact range (n <= {MAX_EXACT_ORDER})"
        )));
    }
    let mut acc: u128 = 1;
    for k in 2..=n as u128 {
        acc = acc
            .checked_mul(k)
            .ok_or_else(|| CombinatError::Domain(format!("overflow computing {n}!")))?;
    }
    Ok(acc)
}

/// `n!/(α_1!···α_d!)`, exact.
pub fn multinomial(n: u32, alpha: &OccupationVector) -> Result<u128, CombinatError> {
    if alpha.order() != n {
        return Err(CombinatError::Domain(format!(
            "multinomial({n}, {alpha}): entries sum to {}",
            alpha.order()
        )));
    }
    let mut acc = factorial(n)?;
    for &a in alpha.entries() {
        acc /= factorial(a)?;
    }
    Ok(acc)
}

/// `binom(n, k)`, exact; zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc · (n − i) is divisible by (i + 1) at every step.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of occupation vectors of order `n` in dimension `d`,
/// `binom(n+d−1, d−1)`; zero when `d = 0` and `n > 0`.
pub fn sym_dim(n: u32, d: usize) -> usize {
    if d == 0 {
        return usize::from(n == 0);
    }
    binomial(n + d as u32 - 1, d as u32 - 1) as usize
}

/// All occupation vectors of order `n` in dimension `d`, lexicographically
/// ascending.
pub fn enumerate_occupations(n: u32, d: usize) -> Vec<OccupationVector> {
    let mut out = Vec::with_capacity(sym_dim(n, d));
    if d == 0 {
        if n == 0 {
            out.push(OccupationVector(vec![]));
        }
        return out;
    }
    let mut cur = vec![0u32; d];
    fill(&mut cur, 0, n, &mut out);
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<OccupationVector>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(OccupationVector(cur.clone()));
        return;
    }
    for v in 0..=remaining {
        cur[pos] = v;
        fill(cur, pos + 1, remaining - v, out);
    }
}

/// All `δ ≤ β` (componentwise) with `|δ| = r`, lexicographically ascending.
pub fn sub_occupations(beta: &OccupationVector, r: u32) -> Vec<OccupationVector> {
    enumerate_occupations(r, beta.dim())
        .into_iter()
        .filter(|delta| delta.le(beta))
        .collect()
}

/// Integer partitions of `n` with at most `d` parts, padded to length `d`,
/// listed from `(n, 0, …)` downwards in lexicographic order.
pub fn partitions(n: u32, d: usize) -> Vec<Partition> {
    let mut out: Vec<Partition> = enumerate_occupations(n, d)
        .into_iter()
        .filter(|a| a.entries().windows(2).all(|w| w[0] >= w[1]))
        .map(Partition)
        .collect();
    out.reverse();
    out
}

/// All distinct permutations of the entries of `μ`, lexicographically ascending.
pub fn orbit(mu: &Partition) -> Vec<OccupationVector> {
    let mut e = mu.parts().entries().to_vec();
    e.sort_unstable();
    let mut out = vec![OccupationVector(e.clone())];
    while next_permutation(&mut e) {
        out.push(OccupationVector(e.clone()));
    }
    out
}

fn next_permutation(v: &mut [u32]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Desk-scale size limits applied when containers are constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bounds {
    pub max_n: u32,
    pub max_d: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_n: 12, max_d: 8 }
    }
}

impl Bounds {
    /// Bounds that only enforce the exact-arithmetic limit.
    pub fn relaxed() -> Self {
        Bounds { max_n: MAX_EXACT_ORDER, max_d: usize::MAX }
    }

    pub fn check(&self, n: u32, d: usize) -> Result<(), CombinatError> {
        if d == 0 {
            return Err(CombinatError::Domain("dimension d must be at least 1".into()));
        }
        if n > self.max_n.min(MAX_EXACT_ORDER) || d > self.max_d {
            return Err(CombinatError::BoundExceeded {
                n,
                d,
                max_n: self.max_n.min(MAX_EXACT_ORDER),
                max_d: self.max_d,
            });
        }
        Ok(())
    }
}

/// Occupation count of the dense position `flat` in `[d]^n`, where the
/// first leg is the most significant base-`d` digit.
pub fn flat_occupation(mut flat: usize, n: u32, d: usize) -> OccupationVector {
    let mut counts = vec![0u32; d];
    for _ in 0..n {
        counts[flat % d] += 1;
        flat /= d;
    }
    OccupationVector(counts)
}

/// The base-`d` digits (0-based, most significant first) of `flat` in `[d]^n`.
pub fn flat_digits(mut flat: usize, n: u32, d: usize) -> Vec<usize> {
    let mut digits = vec![0usize; n as usize];
    for k in (0..n as usize).rev() {
        digits[k] = flat % d;
        flat /= d;
    }
    digits
}

/// `d^n` as `usize`, or `None` on overflow.
pub fn dense_len(n: u32, d: usize) -> Option<usize> {
    d.checked_pow(n)
}
