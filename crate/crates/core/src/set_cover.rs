//! Weighted set cover: Chvátal's greedy rule and an exhaustive solver used
//! as ground truth.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::graph::VertexId;
use crate::par::{self, Execution};
use crate::subsets::{masks_of_size, LexMask};

/// Most subsets the exhaustive solver accepts.
pub const EXACT_COVER_LIMIT: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetCoverError {
    #[error("subset {subset} has member {member} outside a universe of {universe_size}")]
    MemberOutOfRange {
        subset: usize,
        member: usize,
        universe_size: usize,
    },
    #[error("{0} subsets exceed the exhaustive limit of {EXACT_COVER_LIMIT}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSubset {
    /// Vertex this subset stands for (used for tie-breaking).
    pub owner: VertexId,
    /// Sorted, duplicate-free universe indices.
    pub members: Vec<usize>,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetCoverInstance {
    universe_size: usize,
    subsets: Vec<CoverSubset>,
}

impl SetCoverInstance {
    pub fn new(universe_size: usize, mut subsets: Vec<CoverSubset>) -> Result<Self, SetCoverError> {
        for (i, s) in subsets.iter_mut().enumerate() {
            s.members.sort_unstable();
            s.members.dedup();
            if let Some(&m) = s.members.last().filter(|&&m| m >= universe_size) {
                return Err(SetCoverError::MemberOutOfRange {
                    subset: i,
                    member: m,
                    universe_size,
                });
            }
        }
        Ok(SetCoverInstance {
            universe_size,
            subsets,
        })
    }

    /// Unit-weight instance whose subset `i` is owned by vertex `i`.
    pub fn unweighted(universe_size: usize, sets: Vec<Vec<usize>>) -> Result<Self, SetCoverError> {
        let subsets = sets
            .into_iter()
            .enumerate()
            .map(|(i, members)| CoverSubset {
                owner: i,
                members,
                weight: 1,
            })
            .collect();
        Self::new(universe_size, subsets)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn subsets(&self) -> &[CoverSubset] {
        &self.subsets
    }

    pub fn is_feasible(&self) -> bool {
        let all: Vec<usize> = (0..self.subsets.len()).collect();
        self.covers(&all)
    }

    /// Whether the union of the listed subsets is the whole universe.
    pub fn covers(&self, chosen: &[usize]) -> bool {
        let mut hit = vec![false; self.universe_size];
        for &i in chosen {
            for &m in &self.subsets[i].members {
                hit[m] = true;
            }
        }
        hit.into_iter().all(|h| h)
    }

    pub fn weight_of(&self, chosen: &[usize]) -> u64 {
        chosen.iter().map(|&i| self.subsets[i].weight).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution {
    /// Subset indices; pick order for greedy, ascending for the exact solver.
    pub chosen: Vec<usize>,
    pub covered: bool,
    pub total_weight: u64,
}

/// Greedy cover: repeatedly take the subset of least weight per newly
/// covered element, breaking ties by owner id and then subset index.
pub fn greedy_cover(inst: &SetCoverInstance) -> CoverSolution {
    let mut hit = vec![false; inst.universe_size];
    let mut remaining = inst.universe_size;
    let mut taken = vec![false; inst.subsets.len()];
    let mut chosen = Vec::new();
    let mut total_weight = 0;

    while remaining > 0 {
        let mut best: Option<(usize, u64, u64)> = None;
        for (i, s) in inst.subsets.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let gain = s.members.iter().filter(|&&m| !hit[m]).count() as u64;
            if gain == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, bw, bgain)) => {
                    // weight / gain < bw / bgain, compared exactly
                    let lhs = s.weight as u128 * bgain as u128;
                    let rhs = bw as u128 * gain as u128;
                    lhs < rhs || (lhs == rhs && (s.owner, i) < (inst.subsets[b].owner, b))
                }
            };
            if better {
                best = Some((i, s.weight, gain));
            }
        }
        let Some((i, w, gain)) = best else {
            return CoverSolution {
                chosen,
                covered: false,
                total_weight,
            };
        };
        taken[i] = true;
        chosen.push(i);
        total_weight += w;
        remaining -= gain as usize;
        for &m in &inst.subsets[i].members {
            hit[m] = true;
        }
    }

    CoverSolution {
        chosen,
        covered: true,
        total_weight,
    }
}

pub fn exact_cover(inst: &SetCoverInstance) -> Result<CoverSolution, SetCoverError> {
    exact_cover_with(inst, Execution::default())
}

/// Minimum-weight cover by enumeration. With all weights equal and positive
/// the search goes by increasing cardinality and stops at the first level
/// holding a cover; otherwise all `2^m` families are scanned. Among optimal
/// covers the lexicographically smallest index sequence is returned.
pub fn exact_cover_with(inst: &SetCoverInstance, exec: Execution) -> Result<CoverSolution, SetCoverError> {
    let m = inst.subsets.len();
    if m > EXACT_COVER_LIMIT {
        return Err(SetCoverError::TooLarge(m));
    }
    let tables = UnionTables::new(inst);
    let uniform = inst.subsets.first().is_none_or(|f| {
        f.weight > 0 && inst.subsets.iter().all(|s| s.weight == f.weight)
    });

    let best = if uniform {
        (0..=m).find_map(|k| {
            let level = masks_of_size(m, k);
            par::min_over_slice(exec, &level, |&mask| {
                tables.covers(mask).then_some(LexMask(mask))
            })
            .map(|lm| (tables.weight(lm.0), lm))
        })
    } else {
        par::min_over_range(exec, 0..1u64 << m, |mask| {
            tables
                .covers(mask)
                .then(|| (tables.weight(mask), LexMask(mask)))
        })
    };

    Ok(match best {
        Some((total_weight, LexMask(mask))) => CoverSolution {
            chosen: crate::subsets::indices(mask),
            covered: true,
            total_weight,
        },
        None => CoverSolution {
            chosen: Vec::new(),
            covered: false,
            total_weight: 0,
        },
    })
}

// Unions and weights of every subfamily of the low and high halves of the
// subset list, so any family's union is one OR of two table rows.
struct UnionTables {
    split: usize,
    words: usize,
    full: Vec<u64>,
    lo_bits: Vec<u64>,
    lo_weight: Vec<u64>,
    hi_bits: Vec<u64>,
    hi_weight: Vec<u64>,
}

impl UnionTables {
    fn new(inst: &SetCoverInstance) -> Self {
        let m = inst.subsets.len();
        let words = inst.universe_size.div_ceil(64).max(1);
        let split = m / 2;
        let mut full = vec![0u64; words];
        for e in 0..inst.universe_size {
            full[e / 64] |= 1 << (e % 64);
        }
        let row = |s: &CoverSubset| {
            let mut r = vec![0u64; words];
            for &e in &s.members {
                r[e / 64] |= 1 << (e % 64);
            }
            r
        };
        let build = |sets: &[CoverSubset]| {
            let count = 1usize << sets.len();
            let mut bits = vec![0u64; count * words];
            let mut weight = vec![0u64; count];
            let rows: Vec<Vec<u64>> = sets.iter().map(row).collect();
            for mask in 1..count {
                let low = mask.trailing_zeros() as usize;
                let rest = mask & (mask - 1);
                for w in 0..words {
                    bits[mask * words + w] = bits[rest * words + w] | rows[low][w];
                }
                weight[mask] = weight[rest] + sets[low].weight;
            }
            (bits, weight)
        };
        let (lo_bits, lo_weight) = build(&inst.subsets[..split]);
        let (hi_bits, hi_weight) = build(&inst.subsets[split..]);
        UnionTables {
            split,
            words,
            full,
            lo_bits,
            lo_weight,
            hi_bits,
            hi_weight,
        }
    }

    fn halves(&self, mask: u64) -> (usize, usize) {
        let lo = (mask & ((1u64 << self.split) - 1)) as usize;
        let hi = (mask >> self.split) as usize;
        (lo, hi)
    }

    fn covers(&self, mask: u64) -> bool {
        let (lo, hi) = self.halves(mask);
        (0..self.words).all(|w| {
            self.lo_bits[lo * self.words + w] | self.hi_bits[hi * self.words + w] == self.full[w]
        })
    }

    fn weight(&self, mask: u64) -> u64 {
        let (lo, hi) = self.halves(mask);
        self.lo_weight[lo] + self.hi_weight[hi]
    }
}

/// The harmonic number `H(n) = 1 + 1/2 + ... + 1/n` as an exact fraction.
pub fn harmonic(n: usize) -> BigRational {
    let mut h = BigRational::from_integer(BigInt::from(0));
    for i in 1..=n {
        h += BigRational::new(BigInt::from(1), BigInt::from(i));
    }
    h
}
