//! The properness predicate `ℓ(w) ≤ n + maxw0(W, d(w))`, dihedral counts, and
//! the search for `I`-spherical reduced words.

use std::collections::HashSet;

use crate::coxeter::{maxw0_a, maxw0_b, maxw0_d, DiagramComponent, MaxW0Table};
use crate::element::{Engine, GroupElement};
use crate::error::{Error, Result};
use crate::perm::{Family, ModelElement};

/// Default cap on search nodes for [`is_i_spherical`].
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

/// The data needed to decide properness: rank `n`, `ℓ(w)`, `d(w)` and the
/// `maxw0` table of the group.
#[derive(Debug, Clone, Copy)]
pub struct ProperQuery<'a> {
    pub rank: usize,
    pub length: u64,
    pub descents: usize,
    pub table: &'a MaxW0Table,
}

pub fn is_proper(q: &ProperQuery<'_>) -> Result<bool> {
    if q.descents > q.rank {
        return Err(Error::param(format!("d(w) = {} exceeds rank {}", q.descents, q.rank)));
    }
    let bound = q
        .table
        .get(q.descents)
        .ok_or_else(|| Error::param(format!("maxw0 table has no entry for {}", q.descents)))?;
    Ok(q.length <= q.rank as u64 + bound)
}

/// Properness of an engine element.
pub fn is_proper_element(engine: &Engine, table: &MaxW0Table, g: &GroupElement) -> Result<bool> {
    let descents = engine.descent_mask(g)?.count_ones() as usize;
    is_proper(&ProperQuery { rank: engine.rank(), length: g.length() as u64, descents, table })
}

/// `maxw0(W, x)` for the model group with `n` values.
///
/// `D_2 = A_1 × A_1` and `D_3 = A_3` have no type-D closed form of their own;
/// `D_3` agrees with the `D` formula but `D_2` does not, so it is treated here.
pub fn maxw0_family(family: Family, n: usize, x: usize) -> u64 {
    let x = x as u64;
    match family {
        Family::A => maxw0_a(x),
        Family::B => maxw0_b(x),
        Family::D if n <= 2 => x,
        Family::D => maxw0_d(x),
    }
}

/// Properness of a permutation-model element.
pub fn is_proper_model(family: Family, w: &ModelElement) -> Result<bool> {
    let n = match w {
        ModelElement::Perm(p) => p.len(),
        ModelElement::Signed(p) => p.len(),
    };
    let (length, descents) = w.length_and_descents(family)?;
    Ok(length <= family.rank(n) as u64 + maxw0_family(family, n, descents as usize))
}

/// Number of proper elements of `I2(m)`.
///
/// The identity and `w0` are always proper. Any other element has exactly
/// one left descent, so it is proper iff `ℓ(w) ≤ 2 + maxw0(I2(m), 1) = 3`;
/// there are two elements of each length `1 ≤ k < m`.
pub fn proper_count_dihedral(m: u32) -> Result<u64> {
    if m < 3 {
        return Err(Error::param(format!("I2(m) needs m ≥ 3, got {m}")));
    }
    Ok(2 + 2 * u64::from(m.saturating_sub(1).min(3)))
}

/// Brute-force count over the `2m` elements of `I2(m)`, written as
/// alternating words. A word of length `k < m` starting with letter `a` has
/// `J(w) = {a}`; `w0` has both letters as left descents.
pub fn proper_count_dihedral_bruteforce(m: u32) -> Result<u64> {
    if m < 3 {
        return Err(Error::param(format!("I2(m) needs m ≥ 3, got {m}")));
    }
    let table = MaxW0Table::closed(crate::coxeter::TypeLabel::I2(m))?;
    let mut elements: Vec<(u64, HashSet<u8>)> = vec![(0, HashSet::new())];
    for first in [1u8, 2] {
        for k in 1..m {
            let word: Vec<u8> = (0..k).map(|t| if t % 2 == 0 { first } else { 3 - first }).collect();
            elements.push((k as u64, HashSet::from([word[0]])));
        }
    }
    elements.push((m as u64, HashSet::from([1, 2])));
    debug_assert_eq!(elements.len(), 2 * m as usize);
    let mut count = 0;
    for (length, descents) in elements {
        if is_proper(&ProperQuery { rank: 2, length, descents: descents.len(), table: &table })? {
            count += 1;
        }
    }
    Ok(count)
}

/// Letter budgets for the `I`-spherical conditions: each generator outside
/// `I` may appear at most once, and the letters from a component `C` of `I`
/// may appear at most `ℓ(w0(W_C)) + |C|` times in total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphericalBudget {
    pub outside: Vec<usize>,
    pub components: Vec<(DiagramComponent, u64)>,
}

impl SphericalBudget {
    pub fn new(engine: &Engine, subset: &[usize]) -> Result<Self> {
        let n = engine.rank();
        let components = engine
            .matrix()
            .components(subset)?
            .into_iter()
            .map(|c| {
                let budget = c.label.longest_length() + c.vertices.len() as u64;
                (c, budget)
            })
            .collect();
        let outside = (0..n).filter(|i| !subset.contains(i)).collect();
        Ok(Self { outside, components })
    }
}

/// Whether some reduced word of `w` (given by any reduced word) satisfies the
/// `I`-spherical budgets. `word` and `subset` are 0-based.
pub fn is_i_spherical(engine: &Engine, word: &[usize], subset: &[usize], node_cap: u64) -> Result<bool> {
    let w = engine.from_word(word)?;
    if w.length() != word.len() {
        return Err(Error::param(format!("word {word:?} is not reduced")));
    }
    let descents = engine.descent_mask(&w)?;
    if let Some(&bad) = subset.iter().find(|&&i| i >= engine.rank() || descents >> i & 1 == 0) {
        return Err(Error::param(format!("generator {} is not a left descent of w", bad + 1)));
    }
    let budget = SphericalBudget::new(engine, subset)?;
    let n = engine.rank();
    // slot[i]: index into the residual vector; outside letters come first.
    let mut slot = vec![0usize; n];
    for (k, &i) in budget.outside.iter().enumerate() {
        slot[i] = k;
    }
    for (z, (c, _)) in budget.components.iter().enumerate() {
        for &v in &c.vertices {
            slot[v] = budget.outside.len() + z;
        }
    }
    let residual: Vec<u64> =
        budget.outside.iter().map(|_| 1).chain(budget.components.iter().map(|(_, b)| *b)).collect();
    let mut search = Search { engine, slot, failed: HashSet::new(), nodes: 0, node_cap };
    search.run(&w, residual)
}

struct Search<'a> {
    engine: &'a Engine,
    slot: Vec<usize>,
    failed: HashSet<(Vec<u8>, Vec<u64>)>,
    nodes: u64,
    node_cap: u64,
}

impl Search<'_> {
    fn run(&mut self, v: &GroupElement, residual: Vec<u64>) -> Result<bool> {
        if v.length() == 0 {
            return Ok(true);
        }
        if (v.length() as u64) > residual.iter().sum::<u64>() {
            return Ok(false);
        }
        let memo = (self.engine.key(v), residual);
        if self.failed.contains(&memo) {
            return Ok(false);
        }
        self.nodes += 1;
        if self.nodes > self.node_cap {
            return Err(Error::Resource(format!("spherical search exceeded {} nodes", self.node_cap)));
        }
        let mut residual = memo.1.clone();
        let mask = self.engine.descent_mask(v)?;
        for i in (0..self.engine.rank()).filter(|i| mask >> i & 1 == 1) {
            let s = self.slot[i];
            if residual[s] == 0 {
                continue;
            }
            residual[s] -= 1;
            let next = self.engine.left_multiply(i, v);
            let found = self.run(&next, residual.clone())?;
            residual[s] += 1;
            if found {
                return Ok(true);
            }
        }
        self.failed.insert(memo);
        Ok(false)
    }
}
