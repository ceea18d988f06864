use std::fmt;

use crate::error::{Error, Result};

/// A collection of blocks over `[n]`, kept in canonical order: elements
/// ascending inside each block, blocks ordered by their minimum (ties, which
/// only occur in invalid input, broken lexicographically).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkedPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NclStatistics {
    /// Elements lying in two blocks.
    pub dc: usize,
    /// Singly covered minima of blocks with at least two elements.
    pub sc: usize,
    /// Singleton blocks.
    pub sg: usize,
}

/// Kind of a doubly covered element `k` in `E ∩ F` with `k = min F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkType {
    /// `k = max E`: one block ends where the next starts.
    TypeI,
    /// `k` is an interior element of `E`.
    TypeII,
}

impl LinkedPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::MalformedInput("ground set must be nonempty".into()));
        }
        let mut canon = Vec::with_capacity(blocks.len());
        for mut b in blocks {
            if b.is_empty() {
                return Err(Error::MalformedInput("empty block".into()));
            }
            if let Some(&x) = b.iter().find(|&&x| x == 0 || x > n) {
                return Err(Error::MalformedInput(format!("element {x} outside [1, {n}]")));
            }
            b.sort_unstable();
            if b.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedInput("repeated element inside a block".into()));
            }
            canon.push(b);
        }
        canon.sort();
        Ok(Self { n, blocks: canon })
    }

    pub(crate) fn from_canonical_unchecked(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        blocks.sort();
        Self { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    fn coverage(&self) -> Vec<usize> {
        let mut cover = vec![0; self.n + 1];
        for b in &self.blocks {
            for &x in b {
                cover[x] += 1;
            }
        }
        cover
    }

    /// Checks every defining condition of a non-crossing linked partition.
    pub fn is_valid(&self) -> bool {
        let cover = self.coverage();
        if cover[1..].iter().any(|&c| c == 0 || c > 2) {
            return false;
        }
        if cover[1] != 1 || cover[self.n] != 1 {
            return false;
        }
        for (i, e) in self.blocks.iter().enumerate() {
            for f in &self.blocks[i + 1..] {
                if crossing(e, f) || crossing(f, e) || !nearly_disjoint(e, f) {
                    return false;
                }
                let shared = e.iter().filter(|x| f.binary_search(x).is_ok()).count();
                if shared > 1 || (shared == 1 && (e.len() < 2 || f.len() < 2)) {
                    return false;
                }
            }
        }
        true
    }

    /// (dc, sc, sg). Only meaningful for valid partitions.
    pub fn statistics(&self) -> Result<NclStatistics> {
        if !self.is_valid() {
            return Err(Error::InvalidPartition);
        }
        let cover = self.coverage();
        let dc = cover.iter().filter(|&&c| c == 2).count();
        let sg = self.blocks.iter().filter(|b| b.len() == 1).count();
        let sc = self.blocks.iter().filter(|b| b.len() >= 2 && cover[b[0]] == 1).count();
        Ok(NclStatistics { dc, sc, sg })
    }

    /// Doubly covered elements together with their link type, ascending.
    pub fn doubly_covered_types(&self) -> Vec<(usize, LinkType)> {
        let mut out = Vec::new();
        for f in &self.blocks {
            let k = f[0];
            if let Some(e) = self.blocks.iter().find(|e| *e != f && e[0] != k && e.binary_search(&k).is_ok()) {
                let ty = if *e.last().unwrap() == k { LinkType::TypeI } else { LinkType::TypeII };
                out.push((k, ty));
            }
        }
        out.sort_by_key(|&(k, _)| k);
        out
    }

    pub fn block_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().map(Vec::len)
    }
}

/// Is there `e1 < f1 < e2 < f2` with `e_i ∈ e`, `f_i ∈ f`?
fn crossing(e: &[usize], f: &[usize]) -> bool {
    for (i, &e1) in e.iter().enumerate() {
        for &e2 in &e[i + 1..] {
            let inside = f.iter().any(|&x| e1 < x && x < e2);
            let outside = f.iter().any(|&x| x > e2);
            if inside && outside {
                return true;
            }
        }
    }
    false
}

/// Conditions (a)/(b): every shared element is the minimum of exactly one of
/// the two blocks, and that block is not a singleton.
fn nearly_disjoint(e: &[usize], f: &[usize]) -> bool {
    let (min_e, min_f) = (e[0], f[0]);
    e.iter().filter(|x| f.binary_search(x).is_ok()).all(|&i| {
        let a = i == min_e && e.len() > 1 && i != min_f;
        let b = i != min_e && i == min_f && f.len() > 1;
        a || b
    })
}

/// Validates raw blocks; out-of-range or malformed input is an error rather than `false`.
pub fn validate_ncl(n: usize, blocks: Vec<Vec<usize>>) -> Result<bool> {
    Ok(LinkedPartition::new(n, blocks)?.is_valid())
}

impl fmt::Display for LinkedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, x) in b.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}
