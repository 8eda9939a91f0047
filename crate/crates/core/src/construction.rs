//! A family `P_n ⊆ S_n` of proper permutations of size `(q!/(s!)^b)^a`.
//!
//! Write `n = aq + r` and `q = sb + d` with `0 ≤ r < q` and `0 ≤ d < s`. A
//! block permutation `π ∈ S_q` is admissible when
//! `π⁻¹(st+1) > π⁻¹(st+2) > ⋯ > π⁻¹(st+s)` for `t = 0, …, b−1`; the last `d`
//! values are unconstrained. `P_n` consists of the `w` with
//! `w(αq + β) = αq + π_α(β)` for admissible `π_0, …, π_{a−1}` and `w(i) = i`
//! for `i > aq`.
//!
//! With `q = 6, s = 4`, both `453216` and `453261` are admissible: the
//! constraint only orders the positions of the values `1, 2, 3, 4`.

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;

use crate::coxeter::maxw0_a;
use crate::error::{Error, Result};
use crate::perm::{stats_a, Permutation};

/// Default cap on `|P_n|` for [`verify_all_proper`].
pub const VERIFY_CAP: u64 = 10_000_000;

#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub struct ConstructionParams {
    pub n: usize,
    pub q: usize,
    pub s: usize,
    pub a: usize,
    pub r: usize,
    pub b: usize,
    pub d: usize,
}

impl ConstructionParams {
    pub fn new(n: usize, q: usize, s: usize) -> Result<Self> {
        if s == 0 || s > q || q > n {
            return Err(Error::param(format!("need 1 ≤ s ≤ q ≤ n, got n={n}, q={q}, s={s}")));
        }
        Ok(Self { n, q, s, a: n / q, r: n % q, b: q / s, d: q % s })
    }
}

/// All admissible block permutations of `S_q`, in one-line notation.
///
/// Each run of values `st+1, …, st+s` is given a set of positions, and the
/// values are placed in decreasing position order; the remaining `d` values
/// fill the leftover positions in every order.
pub fn block_permutations(q: usize, s: usize) -> Vec<Vec<u32>> {
    let b = q / s;
    let mut out = Vec::new();
    let mut slots = vec![0u32; q];
    place_runs(q, s, b, 0, &mut slots, &mut out);
    out.sort();
    out
}

fn place_runs(q: usize, s: usize, b: usize, t: usize, slots: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let free: Vec<usize> = (0..q).filter(|&p| slots[p] == 0).collect();
    if t == b {
        let first = (s * b) as u32 + 1;
        let tail: Vec<u32> = (first..=q as u32).collect();
        permute_into(&free, &tail, slots, out);
        return;
    }
    for chosen in combinations(&free, s) {
        // The largest position receives the smallest value of the run.
        for (k, &p) in chosen.iter().rev().enumerate() {
            slots[p] = (s * t + k + 1) as u32;
        }
        place_runs(q, s, b, t + 1, slots, out);
        for &p in &chosen {
            slots[p] = 0;
        }
    }
}

fn permute_into(free: &[usize], values: &[u32], slots: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if values.is_empty() {
        out.push(slots.clone());
        return;
    }
    for (i, &p) in free.iter().enumerate() {
        slots[p] = values[0];
        let rest: Vec<usize> = free.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
        permute_into(&rest, &values[1..], slots, out);
        slots[p] = 0;
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Iterator over `P_n` in lexicographic order of `(π_0, …, π_{a−1})`.
pub struct PnIter {
    params: ConstructionParams,
    blocks: Vec<Vec<u32>>,
    odometer: Vec<usize>,
    done: bool,
}

impl Iterator for PnIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        if self.done {
            return None;
        }
        let ConstructionParams { n, q, a, .. } = self.params;
        let mut images = Vec::with_capacity(n);
        for alpha in 0..a {
            let base = (alpha * q) as u32;
            images.extend(self.blocks[self.odometer[alpha]].iter().map(|&v| base + v));
        }
        images.extend((a * q) as u32 + 1..=n as u32);
        let mut k = a;
        loop {
            if k == 0 {
                self.done = true;
                break;
            }
            k -= 1;
            self.odometer[k] += 1;
            if self.odometer[k] < self.blocks.len() {
                break;
            }
            self.odometer[k] = 0;
        }
        Some(Permutation::new(images).expect("blocks are permutations"))
    }
}

pub fn enumerate_pn(params: ConstructionParams) -> PnIter {
    let blocks = block_permutations(params.q, params.s);
    PnIter { params, done: blocks.is_empty(), blocks, odometer: vec![0; params.a] }
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `(q!)^a / (s!)^{ab}`.
///
/// The division is always exact: `q!/(s!)^b` is the multinomial coefficient
/// `q!/((s!)^b d!)` times `d!`. It also equals `|P_n|` for every parameter
/// set, since each admissible block permutation is fixed by its run position
/// sets and the order of the last `d` values.
pub fn lower_bound_count(params: ConstructionParams) -> BigUint {
    let num = factorial(params.q).pow(params.a as u32);
    let den = factorial(params.s).pow((params.a * params.b) as u32);
    debug_assert!((&num % &den) == BigUint::default());
    num / den
}

/// `nq/2 ≤ n + (a(s−1)b)²/2`, evaluated as `nq ≤ 2n + (a(s−1)b)²`.
pub fn properness_condition(params: ConstructionParams) -> bool {
    let ConstructionParams { n, q, s, a, b, .. } = params;
    let (n, q) = (n as u128, q as u128);
    let k = (a * (s - 1) * b) as u128;
    n * q <= 2 * n + k * k
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProperReport {
    pub params: ConstructionParams,
    pub total: u64,
    pub proper: u64,
    pub condition: bool,
    /// Up to ten non-proper elements, in enumeration order.
    pub violations: Vec<Permutation>,
}

/// Checks properness in type `A_{n−1}` for every element of `P_n`.
pub fn verify_all_proper(params: ConstructionParams, cap: u64, threads: usize) -> Result<ProperReport> {
    let size = lower_bound_count(params);
    if size > BigUint::from(cap) {
        return Err(Error::Resource(format!("|P_n| = {size} exceeds the cap of {cap}; sample instead")));
    }
    let n = params.n;
    let elements: Vec<Permutation> = enumerate_pn(params).collect();
    let pool = crate::enumerate::thread_pool(threads)?;
    let flags: Vec<bool> = pool.install(|| {
        elements
            .par_iter()
            .map(|w| {
                let st = stats_a(w);
                st.inv <= (n as u64 - 1) + maxw0_a(st.des)
            })
            .collect()
    });
    let proper = flags.iter().filter(|&&f| f).count() as u64;
    let violations = elements.iter().zip(&flags).filter(|(_, &f)| !f).take(10).map(|(w, _)| w.clone()).collect();
    Ok(ProperReport { params, total: elements.len() as u64, proper, condition: properness_condition(params), violations })
}
