//! Coxeter matrices, diagram components and the `maxw0` statistic.
//!
//! Generators are indexed from 0 in the API; text formats (layer files, CLI)
//! use 1-based indices. The standard diagrams are numbered as follows, with
//! 1-based labels:
//!
//! ```text
//! A_n   1 - 2 - 3 - ... - n
//! B_n   1 =4= 2 - 3 - ... - n
//! D_n   1 - 3 - 4 - ... - n,   2 - 3
//! E_n   1 - 3 - 4 - 5 - ... - n,   2 - 4      (branch node 4)
//! F_4   1 - 2 =4= 3 - 4
//! H_n   1 =5= 2 - 3 (- 4)
//! I2(m) 1 =m= 2
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

/// A finite irreducible Coxeter type.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeLabel {
    A(usize),
    B(usize),
    D(usize),
    E6,
    E7,
    E8,
    F4,
    H3,
    H4,
    /// Dihedral group with bond label `m`.
    I2(u32),
}

impl TypeLabel {
    /// Number of generators.
    pub fn rank(self) -> usize {
        match self {
            TypeLabel::A(n) | TypeLabel::B(n) | TypeLabel::D(n) => n,
            TypeLabel::E6 => 6,
            TypeLabel::E7 => 7,
            TypeLabel::E8 => 8,
            TypeLabel::F4 => 4,
            TypeLabel::H3 => 3,
            TypeLabel::H4 => 4,
            TypeLabel::I2(_) => 2,
        }
    }

    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            TypeLabel::A(n) => n >= 1,
            TypeLabel::B(n) => n >= 2,
            TypeLabel::D(n) => n >= 4,
            TypeLabel::I2(m) => m >= 3,
            _ => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::param(format!("invalid rank parameter for {self}")))
        }
    }

    /// Length of the longest element `w0`.
    pub fn longest_length(self) -> u64 {
        match self {
            TypeLabel::A(n) => (n * (n + 1) / 2) as u64,
            TypeLabel::B(n) => (n * n) as u64,
            TypeLabel::D(n) => (n * n - n) as u64,
            TypeLabel::E6 => 36,
            TypeLabel::E7 => 63,
            TypeLabel::E8 => 120,
            TypeLabel::F4 => 24,
            TypeLabel::H3 => 15,
            TypeLabel::H4 => 60,
            TypeLabel::I2(m) => m as u64,
        }
    }

    /// Number of elements of the group.
    pub fn group_order(self) -> BigUint {
        let factorial = |n: usize| (1..=n).fold(BigUint::one(), |acc, k| acc * k);
        match self {
            TypeLabel::A(n) => factorial(n + 1),
            TypeLabel::B(n) => (BigUint::one() << n) * factorial(n),
            TypeLabel::D(n) => (BigUint::one() << (n - 1)) * factorial(n),
            TypeLabel::E6 => 51_840u32.into(),
            TypeLabel::E7 => 2_903_040u32.into(),
            TypeLabel::E8 => 696_729_600u32.into(),
            TypeLabel::F4 => 1_152u32.into(),
            TypeLabel::H3 => 120u32.into(),
            TypeLabel::H4 => 14_400u32.into(),
            TypeLabel::I2(m) => BigUint::from(2 * m),
        }
    }

    /// Degrees of the basic invariants.
    pub fn degrees(self) -> Vec<u64> {
        match self {
            TypeLabel::A(n) => (2..=n as u64 + 1).collect(),
            TypeLabel::B(n) => (1..=n as u64).map(|k| 2 * k).collect(),
            TypeLabel::D(n) => (1..n as u64).map(|k| 2 * k).chain([n as u64]).collect(),
            TypeLabel::E6 => vec![2, 5, 6, 8, 9, 12],
            TypeLabel::E7 => vec![2, 6, 8, 10, 12, 14, 18],
            TypeLabel::E8 => vec![2, 8, 12, 14, 18, 20, 24, 30],
            TypeLabel::F4 => vec![2, 6, 8, 12],
            TypeLabel::H3 => vec![2, 6, 10],
            TypeLabel::H4 => vec![2, 12, 20, 30],
            TypeLabel::I2(m) => vec![2, m as u64],
        }
    }

    /// Coefficients of the Poincaré polynomial `Π (1 + q + ⋯ + q^{d−1})`: entry
    /// `ℓ` is the number of elements of length `ℓ`.
    pub fn poincare_coefficients(self) -> Vec<BigUint> {
        let mut poly = vec![BigUint::one()];
        for d in self.degrees() {
            let d = d as usize;
            let mut next = vec![BigUint::default(); poly.len() + d - 1];
            for (i, c) in poly.iter().enumerate() {
                for slot in &mut next[i..i + d] {
                    *slot += c;
                }
            }
            poly = next;
        }
        poly
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::A(n) => write!(f, "A{n}"),
            TypeLabel::B(n) => write!(f, "B{n}"),
            TypeLabel::D(n) => write!(f, "D{n}"),
            TypeLabel::E6 => f.write_str("E6"),
            TypeLabel::E7 => f.write_str("E7"),
            TypeLabel::E8 => f.write_str("E8"),
            TypeLabel::F4 => f.write_str("F4"),
            TypeLabel::H3 => f.write_str("H3"),
            TypeLabel::H4 => f.write_str("H4"),
            TypeLabel::I2(m) => write!(f, "I2({m})"),
        }
    }
}

impl FromStr for TypeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::param(format!("unknown group label {s:?}"));
        let label = match s {
            "E6" => TypeLabel::E6,
            "E7" => TypeLabel::E7,
            "E8" => TypeLabel::E8,
            "F4" => TypeLabel::F4,
            "H3" => TypeLabel::H3,
            "H4" => TypeLabel::H4,
            _ if s.starts_with("I2(") && s.ends_with(')') => {
                TypeLabel::I2(s[3..s.len() - 1].parse().map_err(|_| bad())?)
            }
            _ => {
                let (family, rank) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
                let rank: usize = rank.parse().map_err(|_| bad())?;
                match family {
                    "A" => TypeLabel::A(rank),
                    "B" => TypeLabel::B(rank),
                    "D" => TypeLabel::D(rank),
                    _ => return Err(bad()),
                }
            }
        };
        label.validate()
    }
}

/// Symmetric matrix of bond labels `m(i, j)`; `m(i, i) = 1`, `m(i, j) ≥ 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoxeterMatrix {
    rank: usize,
    bonds: Vec<u32>,
    label: Option<TypeLabel>,
}

impl CoxeterMatrix {
    /// Builds a matrix from row-major bond labels.
    pub fn new(rank: usize, bonds: Vec<u32>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::param("rank must be at least 1"));
        }
        if bonds.len() != rank * rank {
            return Err(Error::param(format!(
                "expected {} bond labels, got {}",
                rank * rank,
                bonds.len()
            )));
        }
        for i in 0..rank {
            for j in 0..rank {
                let m = bonds[i * rank + j];
                if m != bonds[j * rank + i] {
                    return Err(Error::param(format!("bond matrix is not symmetric at ({i}, {j})")));
                }
                if (i == j) != (m == 1) {
                    return Err(Error::param(format!("bad bond label {m} at ({i}, {j})")));
                }
            }
        }
        Ok(Self { rank, bonds, label: None })
    }

    /// The standard diagram of a finite irreducible type.
    pub fn standard(label: TypeLabel) -> Result<Self> {
        let label = label.validate()?;
        let n = label.rank();
        let mut edges: Vec<(usize, usize, u32)> = Vec::new();
        let path = |edges: &mut Vec<_>, from: usize| {
            for i in from..n.saturating_sub(1) {
                edges.push((i, i + 1, 3));
            }
        };
        match label {
            TypeLabel::A(_) => path(&mut edges, 0),
            TypeLabel::B(_) => {
                edges.push((0, 1, 4));
                path(&mut edges, 1);
            }
            TypeLabel::D(_) => {
                edges.push((0, 2, 3));
                edges.push((1, 2, 3));
                path(&mut edges, 2);
            }
            TypeLabel::E6 | TypeLabel::E7 | TypeLabel::E8 => {
                edges.push((0, 2, 3));
                edges.push((1, 3, 3));
                path(&mut edges, 2);
            }
            TypeLabel::F4 => {
                edges.extend([(0, 1, 3), (1, 2, 4), (2, 3, 3)]);
            }
            TypeLabel::H3 | TypeLabel::H4 => {
                edges.push((0, 1, 5));
                path(&mut edges, 1);
            }
            TypeLabel::I2(m) => edges.push((0, 1, m)),
        }
        let mut bonds = vec![2u32; n * n];
        for i in 0..n {
            bonds[i * n + i] = 1;
        }
        for (i, j, m) in edges {
            bonds[i * n + j] = m;
            bonds[j * n + i] = m;
        }
        Ok(Self { rank: n, bonds, label: Some(label) })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bond(&self, i: usize, j: usize) -> u32 {
        self.bonds[i * self.rank + j]
    }

    /// The standard type this matrix was built from, if any.
    pub fn label(&self) -> Option<TypeLabel> {
        self.label
    }

    pub fn is_standard(&self) -> bool {
        self.label.is_some()
    }

    /// Name used for directories and reports.
    pub fn name(&self) -> String {
        self.label.map_or_else(|| "custom".to_string(), |l| l.to_string())
    }

    /// Connected components of the subdiagram induced on `subset`, each
    /// classified by shape. Components are ordered by smallest vertex.
    pub fn components(&self, subset: &[usize]) -> Result<Vec<DiagramComponent>> {
        let set: BTreeSet<usize> = subset.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&v| v >= self.rank) {
            return Err(Error::param(format!("generator index {bad} out of range for rank {}", self.rank)));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &set {
            if !seen.insert(start) {
                continue;
            }
            let mut vertices = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &u in &set {
                    if self.bond(v, u) >= 3 && seen.insert(u) {
                        vertices.push(u);
                        stack.push(u);
                    }
                }
            }
            vertices.sort_unstable();
            let label = self.classify(&vertices)?;
            out.push(DiagramComponent { vertices, label });
        }
        Ok(out)
    }

    /// Classifies a connected vertex set by degree sequence and bond positions.
    fn classify(&self, vertices: &[usize]) -> Result<TypeLabel> {
        let k = vertices.len();
        let unclassifiable = || {
            Error::Unsupported(format!(
                "component on generators {:?} is not a finite Coxeter diagram",
                vertices.iter().map(|v| v + 1).collect::<Vec<_>>()
            ))
        };
        let mut edges = Vec::new();
        for (a, &u) in vertices.iter().enumerate() {
            for &v in &vertices[a + 1..] {
                let m = self.bond(u, v);
                if m >= 3 {
                    edges.push((u, v, m));
                }
            }
        }
        if edges.len() + 1 != k {
            return Err(unclassifiable());
        }
        if k == 1 {
            return Ok(TypeLabel::A(1));
        }
        if k == 2 {
            return Ok(match edges[0].2 {
                3 => TypeLabel::A(2),
                4 => TypeLabel::B(2),
                m => TypeLabel::I2(m),
            });
        }
        let neighbors = |v: usize| vertices.iter().copied().filter(move |&u| u != v && self.bond(u, v) >= 3);
        let degree = |v: usize| neighbors(v).count();
        let branch: Vec<usize> = vertices.iter().copied().filter(|&v| degree(v) >= 3).collect();
        let special: Vec<&(usize, usize, u32)> = edges.iter().filter(|e| e.2 != 3).collect();

        match branch.as_slice() {
            [] => {
                // Walk the path from an endpoint, recording bond labels in order.
                let start = vertices.iter().copied().find(|&v| degree(v) == 1).ok_or_else(unclassifiable)?;
                let mut labels = Vec::with_capacity(k - 1);
                let (mut prev, mut cur) = (usize::MAX, start);
                while let Some(next) = neighbors(cur).find(|&u| u != prev) {
                    labels.push(self.bond(cur, next));
                    prev = cur;
                    cur = next;
                }
                let odd: Vec<(usize, u32)> = labels.iter().copied().enumerate().filter(|&(_, m)| m != 3).collect();
                match odd.as_slice() {
                    [] => Ok(TypeLabel::A(k)),
                    [(pos, 4)] if *pos == 0 || *pos == k - 2 => Ok(TypeLabel::B(k)),
                    [(1, 4)] if k == 4 => Ok(TypeLabel::F4),
                    [(pos, 5)] if *pos == 0 || *pos == k - 2 => match k {
                        3 => Ok(TypeLabel::H3),
                        4 => Ok(TypeLabel::H4),
                        _ => Err(unclassifiable()),
                    },
                    _ => Err(unclassifiable()),
                }
            }
            [center] if special.is_empty() => {
                let mut arms: Vec<usize> = neighbors(*center)
                    .map(|first| {
                        let (mut prev, mut cur, mut len) = (*center, first, 1);
                        while let Some(next) = neighbors(cur).find(|&u| u != prev) {
                            prev = cur;
                            cur = next;
                            len += 1;
                        }
                        len
                    })
                    .collect();
                arms.sort_unstable();
                match arms.as_slice() {
                    [1, 1, r] => Ok(TypeLabel::D(r + 3)),
                    [1, 2, 2] => Ok(TypeLabel::E6),
                    [1, 2, 3] => Ok(TypeLabel::E7),
                    [1, 2, 4] => Ok(TypeLabel::E8),
                    _ => Err(unclassifiable()),
                }
            }
            _ => Err(unclassifiable()),
        }
    }

    /// `ℓ(w0(W_I))`, summed over the components of `subset`.
    pub fn w0_length_subset(&self, subset: &[usize]) -> Result<u64> {
        Ok(self.components(subset)?.iter().map(|c| c.label.longest_length()).sum())
    }

    /// Exhaustive `maxw0`: the largest `w0_length_subset` over all subsets of size `x`.
    pub fn maxw0_bruteforce(&self, x: usize) -> Result<u64> {
        let n = self.rank;
        if x > n {
            return Err(Error::param(format!("x = {x} exceeds rank {n}")));
        }
        if n >= 64 {
            return Err(Error::Resource(format!("exhaustive maxw0 over rank {n} is not supported")));
        }
        if x == 0 {
            return Ok(0);
        }
        let mut best = 0;
        let mut subset = Vec::with_capacity(x);
        // Gosper's hack: visit every n-bit mask with exactly x bits set.
        let mut mask: u64 = (1u64 << x) - 1;
        while mask < (1u64 << n) {
            subset.clear();
            subset.extend((0..n).filter(|i| mask >> i & 1 == 1));
            best = best.max(self.w0_length_subset(&subset)?);
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
        Ok(best)
    }
}

/// A connected component of an induced subdiagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramComponent {
    /// Sorted 0-based generator indices.
    pub vertices: Vec<usize>,
    pub label: TypeLabel,
}

fn choose2_plus(x: u64) -> u64 {
    x * (x + 1) / 2
}

/// `maxw0` for type `A`: `C(x + 1, 2)`.
pub fn maxw0_a(x: u64) -> u64 {
    choose2_plus(x)
}

/// `maxw0` for type `B`: `x²`.
pub fn maxw0_b(x: u64) -> u64 {
    x * x
}

/// `maxw0` for type `D`: `x² − x` above 3, `C(x + 1, 2)` otherwise.
pub fn maxw0_d(x: u64) -> u64 {
    if x > 3 {
        x * x - x
    } else {
        choose2_plus(x)
    }
}

/// Closed-form `maxw0(W, x)` for a standard type.
pub fn maxw0_closed(label: TypeLabel, x: usize) -> Result<u64> {
    if x > label.rank() {
        return Err(Error::param(format!("x = {x} exceeds rank of {label}")));
    }
    let xu = x as u64;
    Ok(match label {
        TypeLabel::A(_) => maxw0_a(xu),
        TypeLabel::B(_) => maxw0_b(xu),
        TypeLabel::D(_) => maxw0_d(xu),
        TypeLabel::E6 | TypeLabel::E7 | TypeLabel::E8 => [0, 1, 3, 6, 12, 20, 36, 63, 120][x],
        TypeLabel::F4 => [0, 1, 4, 9, 24][x],
        TypeLabel::H3 | TypeLabel::H4 => [0, 1, 5, 15, 60][x],
        TypeLabel::I2(m) => {
            if x == 2 {
                m as u64
            } else {
                xu
            }
        }
    })
}

/// Lookup `x ↦ maxw0(W, x)` for `0 ≤ x ≤ rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxW0Table {
    label: Option<TypeLabel>,
    entries: Vec<u64>,
}

impl MaxW0Table {
    pub fn closed(label: TypeLabel) -> Result<Self> {
        let entries = (0..=label.rank()).map(|x| maxw0_closed(label, x)).collect::<Result<_>>()?;
        Ok(Self { label: Some(label), entries })
    }

    pub fn bruteforce(matrix: &CoxeterMatrix) -> Result<Self> {
        let entries = (0..=matrix.rank()).map(|x| matrix.maxw0_bruteforce(x)).collect::<Result<_>>()?;
        Ok(Self { label: matrix.label(), entries })
    }

    /// Closed form for standard matrices, brute force otherwise.
    pub fn for_matrix(matrix: &CoxeterMatrix) -> Result<Self> {
        match matrix.label() {
            Some(label) => Self::closed(label),
            None => Self::bruteforce(matrix),
        }
    }

    pub fn label(&self) -> Option<TypeLabel> {
        self.label
    }

    pub fn rank(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn get(&self, x: usize) -> Option<u64> {
        self.entries.get(x).copied()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }
}
