//! Fenwick tree over dense ranks, used as an order-statistics multiset.

#[derive(Debug, Clone)]
pub struct RankCounter {
    tree: Vec<i64>,
    len: i64,
}

impl RankCounter {
    /// Empty multiset over ranks `0..size`.
    pub fn new(size: usize) -> Self {
        Self { tree: vec![0; size + 1], len: 0 }
    }

    /// Multiset with `counts[r]` copies of rank `r`, built in linear time.
    pub fn from_counts(counts: &[i64]) -> Self {
        let mut tree = vec![0; counts.len() + 1];
        tree[1..].copy_from_slice(counts);
        for i in 1..tree.len() {
            let parent = i + (i & i.wrapping_neg());
            if parent < tree.len() {
                tree[parent] += tree[i];
            }
        }
        Self { tree, len: counts.iter().sum() }
    }

    pub fn add(&mut self, rank: usize, delta: i64) {
        self.len += delta;
        let mut i = rank + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of members with rank `< rank`.
    pub fn count_below(&self, rank: usize) -> i64 {
        let mut i = rank.min(self.tree.len() - 1);
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    pub fn count_equal(&self, rank: usize) -> i64 {
        self.count_below(rank + 1) - self.count_below(rank)
    }

    pub fn count_above(&self, rank: usize) -> i64 {
        self.len - self.count_below(rank + 1)
    }

    pub fn len(&self) -> i64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Dense ranks of `v` (ties share a rank) and the number of distinct values.
pub fn dense_ranks(v: &[f64]) -> (Vec<usize>, usize) {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0; v.len()];
    let mut r = 0;
    for (k, &i) in order.iter().enumerate() {
        if k > 0 && v[i] != v[order[k - 1]] {
            r += 1;
        }
        ranks[i] = r;
    }
    let distinct = if v.is_empty() { 0 } else { r + 1 };
    (ranks, distinct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn counts_around_a_rank() {
        let mut t = RankCounter::new(5);
        for r in [0, 2, 2, 4, 1] {
            t.add(r, 1);
        }
        assert_eq!(t.count_below(2), 2);
        assert_eq!(t.count_equal(2), 2);
        assert_eq!(t.count_above(2), 1);
        t.add(2, -1);
        assert_eq!(t.count_equal(2), 1);
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn dense_ranks_share_ties() {
        let (r, m) = dense_ranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, vec![2, 0, 2, 1]);
        assert_eq!(m, 3);
    }

    proptest! {
        #[test]
        fn from_counts_matches_incremental(counts in prop::collection::vec(0i64..5, 1..40), probe in 0usize..45) {
            let built = RankCounter::from_counts(&counts);
            let mut inc = RankCounter::new(counts.len());
            for (r, &c) in counts.iter().enumerate() {
                inc.add(r, c);
            }
            let brute: i64 = counts.iter().take(probe).sum();
            prop_assert_eq!(built.count_below(probe), brute);
            prop_assert_eq!(inc.count_below(probe), brute);
        }
    }
}
