//! Exact integer span sets of lattice walks.

use super::sets::SpanSet;
use crate::error::{Error, Result};
use crate::paths::LatticePath;

/// Default length cap for [`span_lattice_oracle`].
pub const DEFAULT_ORACLE_CAP: usize = 5000;

pub(crate) struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub(crate) fn new(n: usize) -> Self {
        Self { words: vec![0; n.div_ceil(64)] }
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

pub(crate) fn lag_bitset_to_vec(bits: &Bitset) -> Vec<u64> {
    let mut out = Vec::with_capacity(bits.count());
    for (wi, &w) in bits.words.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let b = w.trailing_zeros() as u64;
            out.push(wi as u64 * 64 + b);
            w &= w - 1;
        }
    }
    out
}

/// Indices of the walk grouped by position: returns (order, group starts).
/// One-dimensional walks use a counting sort; higher dimensions sort packed keys.
fn group_by_position(walk: &LatticePath) -> (Vec<u32>, Vec<usize>) {
    let n = walk.len();
    let coords = walk.coords();
    let order: Vec<u32>;
    let mut starts = Vec::new();
    if walk.dim() == 1 {
        let min = *coords.iter().min().unwrap();
        let max = *coords.iter().max().unwrap();
        let m = (max - min) as usize + 1;
        let mut count = vec![0usize; m + 1];
        for &p in coords {
            count[(p - min) as usize + 1] += 1;
        }
        for i in 1..=m {
            count[i] += count[i - 1];
        }
        starts.extend_from_slice(&count[..m]);
        let mut fill = count[..m].to_vec();
        let mut o = vec![0u32; n];
        for (k, &p) in coords.iter().enumerate() {
            let c = &mut fill[(p - min) as usize];
            o[*c] = k as u32;
            *c += 1;
        }
        order = o;
        starts.dedup();
    } else {
        // Each coordinate, offset into u32 range, occupies 32 bits of the key.
        let dim = walk.dim();
        let key = |k: usize| -> u128 {
            coords[k * dim..(k + 1) * dim]
                .iter()
                .fold(0u128, |acc, &c| (acc << 32) | (c as i64 + (1i64 << 31)) as u128)
        };
        let mut keyed: Vec<(u128, u32)> = (0..n).map(|k| (key(k), k as u32)).collect();
        keyed.sort_unstable();
        for (i, w) in keyed.windows(2).enumerate() {
            if w[0].0 != w[1].0 {
                starts.push(i + 1);
            }
        }
        starts.insert(0, 0);
        order = keyed.into_iter().map(|x| x.1).collect();
    }
    starts.push(n);
    (order, starts)
}

/// `{k - l ≥ 0 : RW_k = RW_l}` via grouping indices by position; the cost is
/// `O(N log N + Σ group_size²)`.
pub fn span_lattice(walk: &LatticePath) -> SpanSet {
    let (order, starts) = group_by_position(walk);
    let mut bits = Bitset::new(walk.len());
    bits.set(0);
    for g in starts.windows(2) {
        let group = &order[g[0]..g[1]];
        for (a, &i) in group.iter().enumerate() {
            for &j in &group[a + 1..] {
                bits.set(i.abs_diff(j) as usize);
            }
        }
    }
    SpanSet::from_sorted(lag_bitset_to_vec(&bits))
}

/// Brute-force double loop over all index pairs, for cross-checking.
pub fn span_lattice_oracle(walk: &LatticePath) -> Result<SpanSet> {
    span_lattice_oracle_with_cap(walk, DEFAULT_ORACLE_CAP)
}

pub fn span_lattice_oracle_with_cap(walk: &LatticePath, cap: usize) -> Result<SpanSet> {
    if walk.len() > cap {
        return Err(Error::OracleCapExceeded { len: walk.len(), cap });
    }
    let mut lags = vec![false; walk.len()];
    for l in 0..walk.len() {
        for k in l..walk.len() {
            if walk.position(k) == walk.position(l) {
                lags[k - l] = true;
            }
        }
    }
    let lags = lags.iter().enumerate().filter(|x| *x.1).map(|x| x.0 as u64).collect();
    Ok(SpanSet::from_sorted(lags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::gen_srw;

    fn walk(p: &[i32]) -> LatticePath {
        LatticePath::from_positions(p).unwrap()
    }

    #[test]
    fn hand_examples() {
        assert_eq!(span_lattice(&walk(&[0, 1, 0])).lags(), &[0, 2]);
        assert_eq!(span_lattice(&walk(&[0, 1, 2, 3])).lags(), &[0]);
        assert_eq!(span_lattice_oracle(&walk(&[0, 1, 0])).unwrap().lags(), &[0, 2]);
        assert_eq!(span_lattice_oracle(&walk(&[0, 1, 2, 1])).unwrap().lags(), &[0, 2]);
    }

    #[test]
    fn oracle_cap() {
        let w = gen_srw(1, 20, 1).unwrap();
        assert!(matches!(
            span_lattice_oracle_with_cap(&w, 10),
            Err(Error::OracleCapExceeded { len: 21, cap: 10 })
        ));
    }

    #[test]
    fn agrees_with_oracle() {
        for dim in 1..=3 {
            for seed in 0..30 {
                let w = gen_srw(dim, 50 + seed as usize * 11, seed).unwrap();
                assert_eq!(span_lattice(&w), span_lattice_oracle(&w).unwrap());
            }
        }
    }
}
