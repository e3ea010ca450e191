//! Partitions and torus-fixed points of `Hilb^{n_0}(S) × ... × Hilb^{n_s}(S)`.
//!
//! A fixed point assigns to every factor and every chart a monomial ideal,
//! i.e. a partition. Points are indexed in mixed radix over the factors, so
//! the full product is never materialized and any index range can be
//! consumed independently.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

/// Weakly decreasing positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// `None` unless the parts are positive and weakly decreasing.
    pub fn new(parts: Vec<u32>) -> Option<Self> {
        let ok = parts.iter().all(|&p| p > 0) && parts.windows(2).all(|w| w[0] >= w[1]);
        ok.then_some(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Boxes `(i, j)`, 0-based, with `j < parts[i]`.
    pub fn boxes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &p)| (0..p as i64).map(move |j| (i as i64, j)))
    }

    pub fn conjugate(&self) -> Partition {
        let width = self.0.first().copied().unwrap_or(0);
        Partition((0..width).map(|j| self.0.iter().filter(|&&p| p > j).count() as u32).collect())
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", s.join(","))
    }
}

/// All partitions of `n` in lexicographic order of their part sequences.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for p in 1..=rest.min(max) {
            prefix.push(p);
            rec(rest - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// A fixed point: `parts[factor][chart]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FixedPoint {
    pub parts: Vec<Vec<Partition>>,
}

impl FixedPoint {
    pub fn factor(&self, i: usize) -> &[Partition] {
        &self.parts[i]
    }

    pub fn sizes(&self) -> Vec<u32> {
        self.parts.iter().map(|f| f.iter().map(Partition::size).sum()).collect()
    }
}

/// Lexicographic list of per-chart partition tuples with total size `n`.
fn chart_distributions(charts: usize, n: u32) -> Vec<Vec<Partition>> {
    fn rec(charts: usize, rest: u32, prefix: &mut Vec<Partition>, out: &mut Vec<Vec<Partition>>) {
        if charts == 1 {
            for p in partitions_of(rest) {
                prefix.push(p);
                out.push(prefix.clone());
                prefix.pop();
            }
            return;
        }
        for k in 0..=rest {
            for p in partitions_of(k) {
                prefix.push(p);
                rec(charts - 1, rest - k, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    if charts == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(charts, n, &mut Vec::new(), &mut out);
    out
}

/// Index space of the fixed points for given chart count and sizes.
#[derive(Debug, Clone)]
pub struct FixedPointSpace {
    factors: Vec<Vec<Vec<Partition>>>,
    len: usize,
}

impl FixedPointSpace {
    pub fn new(charts: usize, n: &[u32]) -> Self {
        let factors: Vec<_> = n.iter().map(|&k| chart_distributions(charts, k)).collect();
        let len = factors.iter().map(Vec::len).product();
        FixedPointSpace { factors, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Fixed point number `idx`; the last factor varies fastest.
    pub fn get(&self, mut idx: usize) -> FixedPoint {
        assert!(idx < self.len, "fixed point index out of range");
        let mut parts = vec![Vec::new(); self.factors.len()];
        for (i, f) in self.factors.iter().enumerate().rev() {
            parts[i] = f[idx % f.len()].clone();
            idx /= f.len();
        }
        FixedPoint { parts }
    }

    pub fn range(&self, r: Range<usize>) -> impl Iterator<Item = FixedPoint> + '_ {
        r.map(move |i| self.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = FixedPoint> + '_ {
        self.range(0..self.len)
    }
}

/// Streaming enumeration of the fixed points of the product of Hilbert
/// schemes on a surface with `charts` fixed points.
pub fn fixed_points(charts: usize, n: &[u32]) -> impl Iterator<Item = FixedPoint> {
    let space = FixedPointSpace::new(charts, n);
    (0..space.len()).map(move |i| space.get(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Euler's pentagonal recurrence.
    fn partition_count(n: usize) -> Vec<u64> {
        let mut p = vec![0i64; n + 1];
        p[0] = 1;
        for m in 1..=n {
            let mut k = 1i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > m {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                p[m] += sign * p[m - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= m {
                    p[m] += sign * p[m - g2];
                }
                k += 1;
            }
        }
        p.into_iter().map(|x| x as u64).collect()
    }

    /// Coefficients of `∏ (1 - x^k)^{-e}` up to `x^n`.
    fn goettsche(e: usize, n: usize) -> Vec<u64> {
        let mut c = vec![0u64; n + 1];
        c[0] = 1;
        for _ in 0..e {
            for k in 1..=n {
                for m in k..=n {
                    c[m] += c[m - k];
                }
            }
        }
        c
    }

    #[test]
    fn small_partitions() {
        assert_eq!(partitions_of(0), vec![Partition::empty()]);
        let four: Vec<Vec<u32>> = partitions_of(4).into_iter().map(|p| p.0).collect();
        assert_eq!(four, vec![vec![1, 1, 1, 1], vec![2, 1, 1], vec![2, 2], vec![3, 1], vec![4]]);
    }

    #[test]
    fn partition_counts_match_recurrence() {
        let oracle = partition_count(12);
        for n in 0..=12 {
            let ps = partitions_of(n as u32);
            assert_eq!(ps.len() as u64, oracle[n]);
            let mut sorted = ps.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, ps);
        }
        assert_eq!(partitions_of(10).len(), 42);
    }

    #[test]
    fn conjugate_is_involution() {
        for p in partitions_of(7) {
            assert_eq!(p.conjugate().conjugate(), p);
            assert_eq!(p.conjugate().size(), 7);
        }
    }

    #[test]
    fn counts_match_goettsche() {
        for charts in [3, 4] {
            let oracle = goettsche(charts, 6);
            for n in 0..=6u32 {
                assert_eq!(FixedPointSpace::new(charts, &[n]).len() as u64, oracle[n as usize]);
            }
        }
        assert_eq!(FixedPointSpace::new(3, &[2]).len(), 9);
        assert_eq!(FixedPointSpace::new(4, &[1]).len(), 4);
        assert_eq!(FixedPointSpace::new(3, &[0, 0, 0]).len(), 1);
    }

    #[test]
    fn enumeration_is_stable_and_sized() {
        let space = FixedPointSpace::new(3, &[2, 1, 0]);
        let all: Vec<FixedPoint> = space.iter().collect();
        assert_eq!(all.len(), 9 * 3);
        let again: Vec<FixedPoint> = fixed_points(3, &[2, 1, 0]).collect();
        assert_eq!(all, again);
        let tail: Vec<FixedPoint> = space.range(10..27).collect();
        assert_eq!(&all[10..], &tail[..]);
        for f in &all {
            assert_eq!(f.sizes(), vec![2, 1, 0]);
        }
        let mut dedup = all.clone();
        dedup.sort_by_key(|f| serde_json::to_string(f).unwrap());
        dedup.dedup();
        assert_eq!(dedup.len(), all.len());
        assert_eq!(serde_json::to_string(&all[0]).unwrap(), "[[[],[],[1,1]],[[],[],[1]],[[],[],[]]]");
    }
}
