//! One-line permutation models of types `A_{n−1}` (`S_n`), `B_n` (signed
//! permutations) and `D_n` (signed permutations with an even number of
//! negative entries).
//!
//! Descent counts follow the inverse convention: `des(w)` counts `i < n` with
//! `w⁻¹(i) > w⁻¹(i + 1)`. With generators acting on values by left
//! multiplication this is the number of *left* descents, which differs from
//! the more common position-based (right) descent count.
//!
//! Generator table used by [`ModelElement::left_multiply`], with engine nodes
//! 0-based as in [`crate::coxeter`]:
//!
//! | family | node 0              | node 1            | node `k ≥ 2`          |
//! |--------|---------------------|-------------------|-----------------------|
//! | A      | swap values 1, 2    | swap values 2, 3  | swap `k+1`, `k+2`     |
//! | B      | negate value 1      | swap values 1, 2  | swap `k`, `k+1`       |
//! | D      | `1 ↦ −2`, `2 ↦ −1`  | swap values 1, 2  | swap `k`, `k+1`       |

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three permutation families. `A` with parameter `n` means `S_n`,
/// the Coxeter group of rank `n − 1`.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    D,
}

impl Family {
    /// Coxeter rank of the group with `n` values.
    pub fn rank(self, n: usize) -> usize {
        match self {
            Family::A => n.saturating_sub(1),
            Family::B | Family::D => n,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::A => "A",
            Family::B => "B",
            Family::D => "D",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "D" | "d" => Ok(Family::D),
            other => Err(Error::param(format!("unknown family {other:?}; expected A, B or D"))),
        }
    }
}

/// A permutation of `[n]` in one-line notation `w(1) ⋯ w(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn new(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            let v = v as usize;
            if v == 0 || v > n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::param(format!("{images:?} is not a permutation of 1..={n}")));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (1..=n as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0u32; self.len()];
        for (pos, &v) in self.images.iter().enumerate() {
            inv[v as usize - 1] = pos as u32 + 1;
        }
        Self { images: inv }
    }

    /// Left multiplication by the transposition of values `k`, `k + 1`.
    pub fn swap_values(&mut self, k: u32) {
        for v in &mut self.images {
            if *v == k {
                *v = k + 1;
            } else if *v == k + 1 {
                *v = k;
            }
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_words(f, self.images.iter())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| Error::param(format!("bad permutation entry {t:?}"))))
            .collect::<Result<_>>()?;
        Self::new(images)
    }
}

fn write_words<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: impl Iterator<Item = T>) -> fmt::Result {
    for (i, v) in items.enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// A signed permutation, stored by its positive window `w(1) ⋯ w(n)`;
/// `w(−i) = −w(i)` is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPermutation {
    images: Vec<i32>,
}

impl SignedPermutation {
    pub fn new(images: Vec<i32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            let a = v.unsigned_abs() as usize;
            if a == 0 || a > n || std::mem::replace(&mut seen[a], true) {
                return Err(Error::param(format!("{images:?} is not a signed permutation of ±[{n}]")));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self { images: (1..=n as i32).collect() }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[i32] {
        &self.images
    }

    /// `w(i)` for `i ∈ ±[n]`.
    pub fn apply(&self, i: i32) -> i32 {
        let v = self.images[i.unsigned_abs() as usize - 1];
        if i < 0 {
            -v
        } else {
            v
        }
    }

    /// Number of negative entries in the positive window.
    pub fn neg(&self) -> usize {
        self.images.iter().filter(|&&v| v < 0).count()
    }

    /// Membership in the type-D subgroup.
    pub fn is_even(&self) -> bool {
        self.neg().is_multiple_of(2)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0i32; self.len()];
        for (pos, &v) in self.images.iter().enumerate() {
            let pos = pos as i32 + 1;
            inv[v.unsigned_abs() as usize - 1] = if v < 0 { -pos } else { pos };
        }
        Self { images: inv }
    }

    /// The full one-line notation `(w(−n), …, w(−1), w(1), …, w(n))`.
    pub fn full_one_line(&self) -> Vec<i32> {
        let mut out: Vec<i32> = self.images.iter().rev().map(|v| -v).collect();
        out.extend_from_slice(&self.images);
        out
    }

    /// Left multiplication by a signed permutation `u` acting on values.
    fn map_values(&mut self, u: impl Fn(i32) -> i32) {
        for v in &mut self.images {
            *v = u(*v);
        }
    }
}

impl fmt::Display for SignedPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_words(f, self.images.iter())
    }
}

impl FromStr for SignedPermutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .split_whitespace()
            .map(|t| t.parse::<i32>().map_err(|_| Error::param(format!("bad signed entry {t:?}"))))
            .collect::<Result<_>>()?;
        Self::new(images)
    }
}

/// Counts pairs `i < j` with `v[i] > v[j]` by merge sort.
pub fn count_inversions<T: Ord + Copy>(values: &[T]) -> u64 {
    fn sort_count<T: Ord + Copy>(v: &mut [T], buf: &mut Vec<T>) -> u64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = sort_count(&mut v[..mid], buf) + sort_count(&mut v[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if v[j] < v[i] {
                count += (mid - i) as u64;
                buf.push(v[j]);
                j += 1;
            } else {
                buf.push(v[i]);
                i += 1;
            }
        }
        buf.extend_from_slice(&v[i..mid]);
        buf.extend_from_slice(&v[j..]);
        v.copy_from_slice(buf);
        count
    }
    let mut v = values.to_vec();
    sort_count(&mut v, &mut Vec::with_capacity(values.len()))
}

/// Type-A statistics: `inv = ℓ_A` and `des = d_A`.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub struct AStats {
    pub inv: u64,
    pub des: u64,
}

pub fn stats_a(w: &Permutation) -> AStats {
    let inv = count_inversions(&w.images);
    let pos = w.inverse();
    let des = pos.images.windows(2).filter(|p| p[0] > p[1]).count() as u64;
    AStats { inv, des }
}

/// Signed-permutation statistics. `des_d` is `None` when `n < 2`.
#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub struct BStats {
    pub inv: u64,
    pub nsp: u64,
    pub neg: u64,
    pub inv_b: u64,
    pub inv_d: u64,
    pub des: u64,
    pub des_b: u64,
    pub des_d: Option<u64>,
}

/// Pairs `i < j` with `w(i) + w(j) < 0`.
fn negative_sum_pairs(images: &[i32]) -> u64 {
    // The condition is symmetric in the pair, so count over the sorted values.
    let mut v = images.to_vec();
    v.sort_unstable();
    let mut count = 0u64;
    let mut hi = v.len();
    for lo in 0..v.len() {
        while hi > 0 && v[lo] + v[hi - 1] >= 0 {
            hi -= 1;
        }
        // Partners j with v[lo] + v[j] < 0 are indices below hi; keep only j > lo.
        if hi > lo + 1 {
            count += (hi - lo - 1) as u64;
        } else {
            break;
        }
    }
    count
}

pub fn stats_b(w: &SignedPermutation) -> BStats {
    let n = w.len();
    let inv = count_inversions(&w.images);
    let nsp = negative_sum_pairs(&w.images);
    let neg = w.neg() as u64;
    let pos = w.inverse();
    let des = pos.images.windows(2).filter(|p| p[0] > p[1]).count() as u64;
    let des_b = des + u64::from(n >= 1 && pos.images[0] < 0);
    let des_d = (n >= 2).then(|| des + u64::from(pos.apply(-2) > pos.apply(1)));
    BStats { inv, nsp, neg, inv_b: inv + nsp + neg, inv_d: inv + nsp, des, des_b, des_d }
}

/// `des_D(w) = des(w) + [w⁻¹(−2) > w⁻¹(1)]`.
pub fn des_d(w: &SignedPermutation) -> Result<u64> {
    stats_b(w).des_d.ok_or_else(|| Error::param("des_D needs n ≥ 2"))
}

/// `w'(i) = w(i)`, `w'(−i) = −w(i)`; the image lies in both `S_n^B` and `S_n^D`.
pub fn phi_b(w: &Permutation) -> SignedPermutation {
    SignedPermutation { images: w.images.iter().map(|&v| v as i32).collect() }
}

pub fn phi_d(w: &Permutation) -> SignedPermutation {
    phi_b(w)
}

/// An element of one of the three models.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModelElement {
    Perm(Permutation),
    Signed(SignedPermutation),
}

impl ModelElement {
    pub fn identity(family: Family, n: usize) -> Self {
        match family {
            Family::A => ModelElement::Perm(Permutation::identity(n)),
            Family::B | Family::D => ModelElement::Signed(SignedPermutation::identity(n)),
        }
    }

    /// `(ℓ(w), d(w))` in the given family.
    pub fn length_and_descents(&self, family: Family) -> Result<(u64, u64)> {
        match (family, self) {
            (Family::A, ModelElement::Perm(w)) => {
                let s = stats_a(w);
                Ok((s.inv, s.des))
            }
            (Family::B, ModelElement::Signed(w)) => {
                let s = stats_b(w);
                Ok((s.inv_b, s.des_b))
            }
            (Family::D, ModelElement::Signed(w)) => {
                let s = stats_b(w);
                if !w.is_even() {
                    return Err(Error::param(format!("{w} has an odd number of negatives")));
                }
                // S_1^D is trivial and has no descents.
                Ok((s.inv_d, s.des_d.unwrap_or(0)))
            }
            _ => Err(Error::param(format!("element does not belong to family {family}"))),
        }
    }

    /// Left multiplication by the generator at engine node `node` (see the
    /// module table).
    pub fn left_multiply(&mut self, family: Family, node: usize) -> Result<()> {
        let k = node as i32;
        match (family, self) {
            (Family::A, ModelElement::Perm(w)) if node + 1 < w.len() => w.swap_values(node as u32 + 1),
            (Family::B, ModelElement::Signed(w)) if node < w.len() => {
                if node == 0 {
                    w.map_values(|v| if v.abs() == 1 { -v } else { v });
                } else {
                    w.map_values(|v| swap_abs(v, k, k + 1));
                }
            }
            (Family::D, ModelElement::Signed(w)) if node < w.len() && w.len() >= 2 => match node {
                0 => w.map_values(|v| match v {
                    1 => -2,
                    2 => -1,
                    -1 => 2,
                    -2 => 1,
                    v => v,
                }),
                1 => w.map_values(|v| swap_abs(v, 1, 2)),
                _ => w.map_values(|v| swap_abs(v, k, k + 1)),
            },
            _ => return Err(Error::param(format!("node {node} is not a generator of this {family} model"))),
        }
        Ok(())
    }
}

fn swap_abs(v: i32, a: i32, b: i32) -> i32 {
    match v.abs() {
        x if x == a => v.signum() * b,
        x if x == b => v.signum() * a,
        _ => v,
    }
}

/// Uniform sample from `S_n`.
pub fn sample_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
    let mut images: Vec<u32> = (1..=n as u32).collect();
    images.shuffle(rng);
    Permutation { images }
}

/// Uniform sample from `S_n^B`: a uniform permutation with independent fair signs.
pub fn sample_signed<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SignedPermutation {
    let p = sample_permutation(n, rng);
    let images = p.images.iter().map(|&v| if rng.gen::<bool>() { -(v as i32) } else { v as i32 }).collect();
    SignedPermutation { images }
}

/// Uniform sample from `S_n^D`.
///
/// Draws from `S_n^B` and, when the number of negatives is odd, flips the sign
/// of the entry at position 1. That flip is a bijection from the odd coset
/// onto `S_n^D`, so every even element receives probability exactly
/// `2 / |S_n^B|`.
pub fn sample_signed_d<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SignedPermutation {
    let mut w = sample_signed(n, rng);
    if !w.is_even() {
        w.images[0] = -w.images[0];
    }
    w
}

pub fn sample_uniform<R: Rng + ?Sized>(family: Family, n: usize, rng: &mut R) -> ModelElement {
    match family {
        Family::A => ModelElement::Perm(sample_permutation(n, rng)),
        Family::B => ModelElement::Signed(sample_signed(n, rng)),
        Family::D => ModelElement::Signed(sample_signed_d(n, rng)),
    }
}

/// Runs the insertion chain with an explicit choice function.
///
/// At step `t` the chooser receives the number of options and returns an
/// index below it. Type A has `t` options: insert `t` at position `k`. Type B
/// has `2t` options: choice `c` inserts `t` (even `c`) or `−t` (odd `c`) at
/// position `c / 2`, which places `t` at one of the `2t` indices of `±[t]`.
pub fn insertion_chain_with(family: Family, n: usize, mut choose: impl FnMut(usize) -> usize) -> Result<ModelElement> {
    match family {
        Family::A => {
            let mut images: Vec<u32> = Vec::with_capacity(n);
            for t in 1..=n {
                let k = choose(t);
                debug_assert!(k < t);
                images.insert(k, t as u32);
            }
            Ok(ModelElement::Perm(Permutation { images }))
        }
        Family::B => {
            let mut images: Vec<i32> = Vec::with_capacity(n);
            for t in 1..=n {
                let c = choose(2 * t);
                debug_assert!(c < 2 * t);
                let v = if c.is_multiple_of(2) { t as i32 } else { -(t as i32) };
                images.insert(c / 2, v);
            }
            Ok(ModelElement::Signed(SignedPermutation { images }))
        }
        Family::D => Err(Error::param("the insertion chain is defined for families A and B")),
    }
}

pub fn insertion_chain<R: Rng + ?Sized>(family: Family, n: usize, rng: &mut R) -> Result<ModelElement> {
    insertion_chain_with(family, n, |options| rng.gen_range(0..options))
}

/// Calls `f` on every element of the model with `n` values, in a fixed order:
/// permutations lexicographically, and for each of them the sign patterns in
/// binary counting order (bit `i` negates position `i + 1`).
pub fn visit_elements(family: Family, n: usize, mut f: impl FnMut(&ModelElement)) {
    let mut cur: Vec<u32> = (1..=n as u32).collect();
    let mut signed = ModelElement::Signed(SignedPermutation { images: vec![0; n] });
    loop {
        match family {
            Family::A => f(&ModelElement::Perm(Permutation { images: cur.clone() })),
            Family::B | Family::D => {
                for signs in 0u64..(1 << n) {
                    if family == Family::D && signs.count_ones() % 2 == 1 {
                        continue;
                    }
                    if let ModelElement::Signed(w) = &mut signed {
                        for (i, (slot, &v)) in w.images.iter_mut().zip(&cur).enumerate() {
                            *slot = if signs >> i & 1 == 1 { -(v as i32) } else { v as i32 };
                        }
                    }
                    f(&signed);
                }
            }
        }
        // Next lexicographic permutation.
        let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
}

/// Every element of the model with `n` values, in the order of [`visit_elements`].
pub fn all_elements(family: Family, n: usize) -> Vec<ModelElement> {
    let mut out = Vec::new();
    visit_elements(family, n, |w| out.push(w.clone()));
    out
}

/// All of `S_n` in lexicographic order.
pub fn all_permutations(n: usize) -> Vec<Permutation> {
    let mut out = Vec::new();
    visit_elements(Family::A, n, |w| {
        if let ModelElement::Perm(p) = w {
            out.push(p.clone());
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn inv_naive<T: Ord>(v: &[T]) -> u64 {
        let mut c = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                c += u64::from(v[i] > v[j]);
            }
        }
        c
    }

    fn nsp_naive(v: &[i32]) -> u64 {
        let mut c = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                c += u64::from(v[i] + v[j] < 0);
            }
        }
        c
    }

    fn perm(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn signed(s: &str) -> SignedPermutation {
        s.parse().unwrap()
    }

    #[test]
    fn type_a_examples() {
        assert_eq!(stats_a(&Permutation::identity(5)), AStats { inv: 0, des: 0 });
        assert_eq!(stats_a(&perm("2 1 4 3")), AStats { inv: 2, des: 2 });
        for n in 1..8u64 {
            let rev = Permutation::new((1..=n as u32).rev().collect()).unwrap();
            assert_eq!(stats_a(&rev), AStats { inv: n * (n - 1) / 2, des: n - 1 });
        }
    }

    #[test]
    fn type_b_examples() {
        let s = stats_b(&signed("-2 -1"));
        assert_eq!(
            s,
            BStats { inv: 0, nsp: 1, neg: 2, inv_b: 3, inv_d: 1, des: 0, des_b: 1, des_d: Some(1) }
        );
        let s = stats_b(&signed("2 -1"));
        assert_eq!((s.inv, s.nsp, s.neg, s.inv_b, s.inv_d), (1, 0, 1, 2, 1));
        let id = stats_b(&SignedPermutation::identity(4));
        assert_eq!(id, BStats { inv: 0, nsp: 0, neg: 0, inv_b: 0, inv_d: 0, des: 0, des_b: 0, des_d: Some(0) });
        assert!(des_d(&signed("-1")).is_err());
        assert_eq!(stats_b(&signed("-1")).des_b, 1);
    }

    #[test]
    fn parse_and_print() {
        let w = signed("2 -1 3");
        assert_eq!(w.to_string(), "2 -1 3");
        assert_eq!(w.full_one_line(), vec![-3, 1, -2, 2, -1, 3]);
        assert!("1 1".parse::<Permutation>().is_err());
        assert!("2 -2".parse::<SignedPermutation>().is_err());
        assert!("0".parse::<SignedPermutation>().is_err());
        assert!("x".parse::<Permutation>().is_err());
    }

    #[test]
    fn embeddings_preserve_statistics() {
        assert_eq!(phi_b(&Permutation::identity(3)), SignedPermutation::identity(3));
        let w = perm("2 1");
        let b = phi_b(&w);
        assert_eq!(b, signed("2 1"));
        assert_eq!(stats_b(&b).inv_b, 1);
        for n in 1..=6 {
            for w in all_permutations(n) {
                let a = stats_a(&w);
                let b = stats_b(&phi_b(&w));
                let d = stats_b(&phi_d(&w));
                assert_eq!(b.neg, 0);
                assert_eq!((b.inv_b, d.inv_d), (a.inv, a.inv));
                assert_eq!(b.des_b, a.des);
                if n >= 2 {
                    assert_eq!(d.des_d, Some(a.des));
                }
            }
        }
    }

    #[test]
    fn inverse_invariance_exhaustive() {
        for n in 1..=4 {
            for w in all_permutations(n) {
                assert_eq!(stats_a(&w).inv, stats_a(&w.inverse()).inv);
            }
            for w in all_elements(Family::B, n) {
                let ModelElement::Signed(w) = w else { unreachable!() };
                let (s, si) = (stats_b(&w), stats_b(&w.inverse()));
                assert_eq!(s.inv_d, si.inv_d);
                assert_eq!(s.inv_b, si.inv_b);
                assert!(s.des + 1 >= s.des_b);
                if let Some(dd) = s.des_d {
                    assert!(s.des + 1 >= dd);
                }
                assert!(s.inv_d <= s.inv_b);
            }
        }
    }

    #[test]
    fn group_sizes() {
        assert_eq!(all_elements(Family::A, 4).len(), 24);
        assert_eq!(all_elements(Family::B, 3).len(), 48);
        assert_eq!(all_elements(Family::D, 4).len(), 192);
    }

    #[test]
    fn generator_table_acts_as_involutions() {
        for (family, n) in [(Family::A, 4), (Family::B, 3), (Family::D, 4)] {
            for w in all_elements(family, n) {
                for node in 0..family.rank(n) {
                    let mut u = w.clone();
                    u.left_multiply(family, node).unwrap();
                    let (l0, _) = w.length_and_descents(family).unwrap();
                    let (l1, _) = u.length_and_descents(family).unwrap();
                    assert_eq!(l0.abs_diff(l1), 1);
                    u.left_multiply(family, node).unwrap();
                    assert_eq!(u, w);
                }
            }
        }
    }

    #[test]
    fn d_sampler_on_trivial_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            assert_eq!(sample_signed_d(1, &mut rng), SignedPermutation::identity(1));
        }
    }

    #[test]
    fn b2_sampler_hits_all_elements_evenly() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws = 80_000;
        let mut freq: HashMap<SignedPermutation, u64> = HashMap::new();
        for _ in 0..draws {
            *freq.entry(sample_signed(2, &mut rng)).or_default() += 1;
        }
        assert_eq!(freq.len(), 8);
        let expected = draws as f64 / 8.0;
        let chi2: f64 = freq.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
        // 7 degrees of freedom; 24.32 is the 0.999 quantile.
        assert!(chi2 < 24.32, "chi-square {chi2}");
    }

    #[test]
    fn a_sampler_mean_inversions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10;
        let draws = 100_000;
        let total: u64 = (0..draws).map(|_| stats_a(&sample_permutation(n, &mut rng)).inv).sum();
        let mean = total as f64 / draws as f64;
        // Mean 22.5, variance n(n−1)(2n+5)/72 = 31.25; 5 standard errors ≈ 0.09.
        assert!((mean - 22.5).abs() < 0.09, "mean {mean}");
    }

    #[test]
    fn insertion_chain_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(insertion_chain(Family::A, 1, &mut rng).unwrap(), ModelElement::Perm(Permutation::identity(1)));
        assert!(insertion_chain(Family::D, 3, &mut rng).is_err());
        // All 6 paths for n = 3 give each permutation once.
        let mut outcomes = Vec::new();
        for c in 0..6usize {
            let digits = [0, c % 2, c / 2];
            let mut step = 0;
            outcomes.push(
                insertion_chain_with(Family::A, 3, |_| {
                    step += 1;
                    digits[step - 1]
                })
                .unwrap(),
            );
        }
        outcomes.sort_by_key(|e| format!("{e:?}"));
        outcomes.dedup();
        assert_eq!(outcomes.len(), 6);
    }

    proptest! {
        #[test]
        fn merge_count_matches_naive(v in proptest::collection::vec(-50i32..50, 0..60)) {
            prop_assert_eq!(count_inversions(&v), inv_naive(&v));
        }

        #[test]
        fn signed_stats_match_naive(seed in any::<u64>(), n in 1usize..40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = sample_signed(n, &mut rng);
            let s = stats_b(&w);
            prop_assert_eq!(s.nsp, nsp_naive(&w.images));
            prop_assert_eq!(s.inv, inv_naive(&w.images));
            prop_assert_eq!(s.inv_d, stats_b(&w.inverse()).inv_d);
            let wd = sample_signed_d(n, &mut rng);
            prop_assert!(wd.is_even());
        }

        #[test]
        fn inverse_is_involution(seed in any::<u64>(), n in 1usize..30) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = sample_signed(n, &mut rng);
            prop_assert_eq!(w.inverse().inverse(), w.clone());
            for i in 1..=n as i32 {
                prop_assert_eq!(w.inverse().apply(w.apply(i)), i);
                prop_assert_eq!(w.apply(-i), -w.apply(i));
            }
        }
    }
}
