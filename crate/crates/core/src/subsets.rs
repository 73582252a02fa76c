//! Bit-mask subset enumeration shared by the exhaustive solvers.

use std::cmp::Ordering;

/// A subset of `[0, 64)` ordered lexicographically by its ascending element
/// sequence, so `{0, 5} < {1} < {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LexMask(pub u64);

impl Ord for LexMask {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let i = diff.trailing_zeros();
        let above = |m: u64| if i == 63 { 0 } else { m >> (i + 1) };
        // The sets agree below i. Whoever holds i is smaller unless the other
        // sequence already ended there.
        if self.0 >> i & 1 == 1 {
            if above(other.0) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if above(self.0) != 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl PartialOrd for LexMask {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All `k`-element subsets of `[0, m)` as masks (Gosper's hack).
pub(crate) fn masks_of_size(m: usize, k: usize) -> Vec<u64> {
    assert!(m < 64);
    if k > m {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << m;
    let mut out = Vec::new();
    let mut x = (1u64 << k) - 1;
    while x < limit {
        out.push(x);
        let c = x & x.wrapping_neg();
        let r = x + c;
        x = (((r ^ x) >> 2) / c) | r;
    }
    out
}

pub(crate) fn indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}
