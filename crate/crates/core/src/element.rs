//! Group elements in the geometric representation.
//!
//! An element `w` is stored as the matrix of `w⁻¹` in the simple-root basis:
//! column `j` holds the coordinates of `w⁻¹(α_j)`. Then
//!
//! - `j` is a left descent of `w` iff column `j` is a negative root, and
//! - `(s_i w)⁻¹ = w⁻¹ s_i`, so left multiplication only touches column `i`
//!   and the columns of its diagram neighbours.
//!
//! Crystallographic bonds use integer Cartan entries (`1`, `2` or `3` for
//! bonds 3, 4 and 6); bond 5 uses `φ` on both sides. Entries are held in
//! checked `i64` pairs and promoted to arbitrary precision on overflow.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};

use crate::coxeter::{CoxeterMatrix, TypeLabel};
use crate::error::{Error, Result};
use crate::ring::{decode_i64, RingScalar, SmallGolden};

/// Upper bound on the number of roots generated before giving up.
const ROOT_CAP: usize = 100_000;

/// Coordinates of a vector in the simple-root basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootVector(pub Vec<RingScalar>);

impl RootVector {
    /// `Greater` if all coordinates are ≥ 0, `Less` if all ≤ 0, `None` when mixed.
    /// The zero vector reports `Equal`.
    pub fn sign(&self) -> Option<Ordering> {
        uniform_sign(self.0.iter().map(RingScalar::signum))
    }
}

fn uniform_sign(signs: impl Iterator<Item = Ordering>) -> Option<Ordering> {
    let mut seen = Ordering::Equal;
    for s in signs {
        match (seen, s) {
            (_, Ordering::Equal) => {}
            (Ordering::Equal, s) => seen = s,
            (a, b) if a == b => {}
            _ => return None,
        }
    }
    Some(seen)
}

#[derive(Debug, Clone)]
enum Entries {
    Small(Box<[SmallGolden]>),
    Big(Box<[RingScalar]>),
}

/// A group element with its cached length.
#[derive(Debug, Clone)]
pub struct GroupElement {
    rank: usize,
    length: usize,
    entries: Entries,
}

impl GroupElement {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Entry `(row, col)` of the stored `w⁻¹` matrix.
    pub fn entry(&self, row: usize, col: usize) -> RingScalar {
        let idx = col * self.rank + row;
        match &self.entries {
            Entries::Small(e) => e[idx].into(),
            Entries::Big(e) => e[idx].clone(),
        }
    }

    /// Column `j`, i.e. `w⁻¹(α_j)`.
    pub fn column(&self, j: usize) -> RootVector {
        RootVector((0..self.rank).map(|r| self.entry(r, j)).collect())
    }

    /// Whether the matrix has been promoted to arbitrary precision.
    pub fn is_big(&self) -> bool {
        matches!(self.entries, Entries::Big(_))
    }

    fn big_entries(&self) -> Vec<RingScalar> {
        match &self.entries {
            Entries::Small(e) => e.iter().map(|&s| s.into()).collect(),
            Entries::Big(e) => e.to_vec(),
        }
    }

    fn column_sign(&self, j: usize) -> Option<Ordering> {
        let n = self.rank;
        match &self.entries {
            Entries::Small(e) => uniform_sign(e[j * n..(j + 1) * n].iter().map(|s| s.signum())),
            Entries::Big(e) => uniform_sign(e[j * n..(j + 1) * n].iter().map(RingScalar::signum)),
        }
    }

    /// Sign of the first nonzero entry in column `j`.
    fn column_leading_sign(&self, j: usize) -> Ordering {
        let n = self.rank;
        let first = match &self.entries {
            Entries::Small(e) => e[j * n..(j + 1) * n].iter().map(|s| s.signum()).find(|s| s.is_ne()),
            Entries::Big(e) => e[j * n..(j + 1) * n].iter().map(RingScalar::signum).find(|s| s.is_ne()),
        };
        first.unwrap_or(Ordering::Equal)
    }
}

impl PartialEq for GroupElement {
    fn eq(&self, other: &Self) -> bool {
        if self.rank != other.rank {
            return false;
        }
        match (&self.entries, &other.entries) {
            (Entries::Small(a), Entries::Small(b)) => a == b,
            _ => self.big_entries() == other.big_entries(),
        }
    }
}

impl Eq for GroupElement {}

/// Exact geometric representation of a finite Coxeter group.
#[derive(Debug, Clone)]
pub struct Engine {
    matrix: CoxeterMatrix,
    rank: usize,
    golden: bool,
    /// `factors[i * n + j]`: coefficient of `α_i` in `s_i(α_j)`.
    factors: Vec<SmallGolden>,
    neighbors: Vec<Vec<usize>>,
}

impl Engine {
    pub fn new(matrix: CoxeterMatrix) -> Result<Self> {
        let n = matrix.rank();
        if n > 64 {
            return Err(Error::Unsupported(format!("rank {n} exceeds the engine limit of 64")));
        }
        let mut factors = vec![SmallGolden::ZERO; n * n];
        let mut neighbors = vec![Vec::new(); n];
        let mut golden = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let m = matrix.bond(i, j);
                // Products c_ij * c_ji = 4 cos²(π / m); the longer side sits on the smaller index.
                let c = match (m, i < j) {
                    (2, _) => continue,
                    (3, _) => SmallGolden::new(1, 0),
                    (4, true) => SmallGolden::new(2, 0),
                    (4, false) => SmallGolden::new(1, 0),
                    (6, true) => SmallGolden::new(3, 0),
                    (6, false) => SmallGolden::new(1, 0),
                    (5, _) => {
                        golden = true;
                        SmallGolden::new(0, 1)
                    }
                    _ => {
                        return Err(Error::Unsupported(format!(
                            "bond label {m} between generators {} and {} has no exact ring here",
                            i + 1,
                            j + 1
                        )))
                    }
                };
                factors[i * n + j] = c;
                neighbors[i].push(j);
            }
        }
        Ok(Self { matrix, rank: n, golden, factors, neighbors })
    }

    pub fn standard(label: TypeLabel) -> Result<Self> {
        Self::new(CoxeterMatrix::standard(label)?)
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Whether entries carry a `φ` coefficient.
    pub fn is_golden(&self) -> bool {
        self.golden
    }

    /// Coefficient `c_ij` with `s_i(α_j) = α_j + c_ij α_i` (`c_ii` is reported as 0).
    pub fn cartan_factor(&self, i: usize, j: usize) -> RingScalar {
        self.factors[i * self.rank + j].into()
    }

    pub fn identity(&self) -> GroupElement {
        let n = self.rank;
        let mut e = vec![SmallGolden::ZERO; n * n];
        for i in 0..n {
            e[i * n + i] = SmallGolden::ONE;
        }
        GroupElement { rank: n, length: 0, entries: Entries::Small(e.into()) }
    }

    fn check_generator(&self, i: usize) -> Result<()> {
        if i < self.rank {
            Ok(())
        } else {
            Err(Error::param(format!("generator index {} out of range for rank {}", i + 1, self.rank)))
        }
    }

    pub fn simple_reflection(&self, i: usize) -> Result<GroupElement> {
        self.check_generator(i)?;
        Ok(self.left_multiply(i, &self.identity()))
    }

    /// `s_i · g`. Panics if `i` is out of range.
    pub fn left_multiply(&self, i: usize, g: &GroupElement) -> GroupElement {
        assert!(i < self.rank, "generator index out of range");
        let descent = g.column_leading_sign(i) == Ordering::Less;
        let length = if descent { g.length - 1 } else { g.length + 1 };
        let entries = match &g.entries {
            Entries::Small(e) => match self.left_multiply_small(i, e) {
                Some(out) => Entries::Small(out),
                None => Entries::Big(self.left_multiply_big(i, &g.big_entries())),
            },
            Entries::Big(e) => Entries::Big(self.left_multiply_big(i, e)),
        };
        GroupElement { rank: self.rank, length, entries }
    }

    fn left_multiply_small(&self, i: usize, e: &[SmallGolden]) -> Option<Box<[SmallGolden]>> {
        let n = self.rank;
        let mut out: Box<[SmallGolden]> = e.into();
        let col_i = &e[i * n..(i + 1) * n];
        for &j in &self.neighbors[i] {
            let c = self.factors[i * n + j];
            for r in 0..n {
                let delta = if c.b == 0 {
                    SmallGolden::new(col_i[r].a.checked_mul(c.a)?, col_i[r].b.checked_mul(c.a)?)
                } else {
                    col_i[r].checked_mul(c)?
                };
                out[j * n + r] = out[j * n + r].checked_add(delta)?;
            }
        }
        for r in 0..n {
            out[i * n + r] = col_i[r].checked_neg()?;
        }
        Some(out)
    }

    fn left_multiply_big(&self, i: usize, e: &[RingScalar]) -> Box<[RingScalar]> {
        let n = self.rank;
        let mut out: Box<[RingScalar]> = e.into();
        for &j in &self.neighbors[i] {
            let c: RingScalar = self.factors[i * n + j].into();
            for r in 0..n {
                out[j * n + r] = &out[j * n + r] + &(&e[i * n + r] * &c);
            }
        }
        for r in 0..n {
            out[i * n + r] = -&e[i * n + r];
        }
        out
    }

    /// The product `s_{w_1} ⋯ s_{w_k}` for a 0-based word.
    pub fn from_word(&self, word: &[usize]) -> Result<GroupElement> {
        let mut g = self.identity();
        for &i in word.iter().rev() {
            self.check_generator(i)?;
            g = self.left_multiply(i, &g);
        }
        Ok(g)
    }

    /// Bit `j` is set iff `j` is a left descent of `g`. Fails if a column is
    /// not uniformly signed.
    pub fn descent_mask(&self, g: &GroupElement) -> Result<u64> {
        let mut mask = 0u64;
        for j in 0..g.rank {
            match g.column_sign(j) {
                Some(Ordering::Less) => mask |= 1 << j,
                Some(Ordering::Greater) => {}
                _ => {
                    return Err(Error::Internal(format!(
                        "column {} of an element is not a root (mixed or zero signs)",
                        j + 1
                    )))
                }
            }
        }
        Ok(mask)
    }

    /// `J(g)` as sorted 0-based indices.
    pub fn left_descents(&self, g: &GroupElement) -> Result<Vec<usize>> {
        let mask = self.descent_mask(g)?;
        Ok((0..g.rank).filter(|j| mask >> j & 1 == 1).collect())
    }

    /// Reduced word peeling the smallest left descent at each step.
    pub fn canonical_word(&self, g: &GroupElement) -> Vec<usize> {
        let mut word = Vec::with_capacity(g.length);
        let mut v = g.clone();
        while v.length > 0 {
            let i = (0..v.rank)
                .find(|&j| v.column_leading_sign(j) == Ordering::Less)
                .expect("nonidentity element has a left descent");
            word.push(i);
            v = self.left_multiply(i, &v);
        }
        word
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let mut word = self.canonical_word(g);
        word.reverse();
        self.from_word(&word).expect("canonical word letters are in range")
    }

    /// Canonical byte image of the matrix, used as the deduplication key.
    pub fn key(&self, g: &GroupElement) -> Vec<u8> {
        let mut out = Vec::with_capacity(g.rank * g.rank * if self.golden { 2 } else { 1 });
        match &g.entries {
            Entries::Small(e) => e.iter().for_each(|s| s.encode(self.golden, &mut out)),
            Entries::Big(e) => e.iter().for_each(|s| s.encode(self.golden, &mut out)),
        }
        out
    }

    /// Inverse of [`Engine::key`]; `length` is not part of the key.
    pub fn from_key(&self, key: &[u8], length: usize) -> Result<GroupElement> {
        let n = self.rank;
        let corrupt = || Error::Internal("malformed element key".into());
        let mut pos = 0;
        let mut small = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let a = decode_i64(key, &mut pos);
            let b = if self.golden { decode_i64(key, &mut pos) } else { Some(0) };
            match (a, b) {
                (Some(a), Some(b)) => small.push(SmallGolden::new(a, b)),
                _ => {
                    return self.decode_big_key(key, length).map_err(|_| corrupt());
                }
            }
        }
        if pos != key.len() {
            return Err(corrupt());
        }
        Ok(GroupElement { rank: n, length, entries: Entries::Small(small.into()) })
    }

    fn decode_big_key(&self, key: &[u8], length: usize) -> Result<GroupElement> {
        let n = self.rank;
        let mut pos = 0;
        let mut read = || -> Result<BigInt> {
            let mut v = BigUint::default();
            let mut shift = 0u32;
            loop {
                let byte = *key.get(pos).ok_or_else(|| Error::Internal("truncated key".into()))?;
                pos += 1;
                v |= BigUint::from(byte & 0x7f) << shift;
                if byte & 0x80 == 0 {
                    break;
                }
                shift += 7;
            }
            let negative = v.bit(0);
            let half = BigInt::from(v >> 1u32);
            Ok(if negative { -half - 1 } else { half })
        };
        let mut entries = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let a = read()?;
            let b = if self.golden { read()? } else { BigInt::default() };
            entries.push(RingScalar::golden(a, b));
        }
        Ok(GroupElement { rank: n, length, entries: Entries::Big(entries.into()) })
    }

    /// Image of a root-basis vector under the simple reflection `s_i`.
    pub fn reflect(&self, i: usize, v: &RootVector) -> RootVector {
        let n = self.rank;
        let mut out = v.clone();
        let mut coord = -&v.0[i];
        for &j in &self.neighbors[i] {
            let c: RingScalar = self.factors[i * n + j].into();
            coord = &coord + &(&c * &v.0[j]);
        }
        out.0[i] = coord;
        out
    }

    /// All positive roots, in breadth-first discovery order from the simple roots.
    pub fn positive_roots(&self) -> Result<Vec<RootVector>> {
        let n = self.rank;
        let simple = |i: usize| {
            RootVector((0..n).map(|r| if r == i { RingScalar::one() } else { RingScalar::zero() }).collect())
        };
        let mut seen: HashSet<RootVector> = HashSet::new();
        let mut queue: Vec<RootVector> = (0..n).map(simple).collect();
        seen.extend(queue.iter().cloned());
        let mut head = 0;
        while head < queue.len() {
            let root = queue[head].clone();
            head += 1;
            for i in 0..n {
                let image = self.reflect(i, &root);
                if seen.insert(image.clone()) {
                    if seen.len() > ROOT_CAP {
                        return Err(Error::Unsupported(format!(
                            "root closure exceeded {ROOT_CAP} roots; the group is not finite"
                        )));
                    }
                    queue.push(image);
                }
            }
        }
        let positives: Vec<RootVector> =
            queue.into_iter().filter(|r| r.sign() == Some(Ordering::Greater)).collect();
        Ok(positives)
    }

    /// Number of positive roots `β` with `g(β) < 0`, evaluated with full
    /// precision independently of the cached length.
    pub fn length_by_roots(&self, g: &GroupElement, positive_roots: &[RootVector]) -> Result<usize> {
        // ℓ(w) = ℓ(w⁻¹) = #{β > 0 : w⁻¹(β) < 0}, and the stored matrix is w⁻¹.
        let n = self.rank;
        let entries = g.big_entries();
        let mut count = 0;
        for beta in positive_roots {
            let image = RootVector(
                (0..n)
                    .map(|r| {
                        (0..n).fold(RingScalar::zero(), |acc, c| &acc + &(&entries[c * n + r] * &beta.0[c]))
                    })
                    .collect(),
            );
            match image.sign() {
                Some(Ordering::Less) => count += 1,
                Some(Ordering::Greater) => {}
                _ => return Err(Error::Internal("image of a root is not a root".into())),
            }
        }
        Ok(count)
    }
}
