//! Binary indexed tree over non-negative weights with weighted index search.

/// Fenwick tree storing `f64` weights, supporting point updates, prefix sums
/// and sampling an index with probability proportional to its weight.
#[derive(Clone, Debug, Default)]
pub struct FenwickTree {
    tree: Vec<f64>,
    weights: Vec<f64>,
}

impl FenwickTree {
    pub fn new(n: usize) -> Self {
        FenwickTree {
            tree: vec![0.0; n + 1],
            weights: vec![0.0; n],
        }
    }

    pub fn from_weights(weights: Vec<f64>) -> Self {
        let mut t = FenwickTree {
            tree: vec![0.0; weights.len() + 1],
            weights,
        };
        t.rebuild();
        t
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Recomputes the tree from the stored weights in `O(n)`, discarding any
    /// rounding drift from incremental updates.
    pub fn rebuild(&mut self) {
        let n = self.weights.len();
        self.tree[0] = 0.0;
        self.tree[1..].copy_from_slice(&self.weights);
        for i in 1..=n {
            let j = i + (i & i.wrapping_neg());
            if j <= n {
                let v = self.tree[i];
                self.tree[j] += v;
            }
        }
    }

    pub fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        if delta != 0.0 {
            self.weights[i] = w;
            self.add_tree(i, delta);
        }
    }

    pub fn add(&mut self, i: usize, delta: f64) {
        self.weights[i] += delta;
        self.add_tree(i, delta);
    }

    fn add_tree(&mut self, i: usize, delta: f64) {
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    /// Sum of weights `0..i`.
    pub fn prefix_sum(&self, i: usize) -> f64 {
        let mut j = i.min(self.weights.len());
        let mut s = 0.0;
        while j > 0 {
            s += self.tree[j];
            j -= j & j.wrapping_neg();
        }
        s
    }

    pub fn total(&self) -> f64 {
        self.prefix_sum(self.weights.len())
    }

    /// Index `i` with `prefix_sum(i) <= target < prefix_sum(i + 1)`, along with
    /// the residual `target - prefix_sum(i)`. Returns `None` when `target` is at
    /// or beyond the total.
    pub fn find(&self, mut target: f64) -> Option<(usize, f64)> {
        let n = self.weights.len();
        if n == 0 || target < 0.0 {
            return None;
        }
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        if pos >= n {
            None
        } else {
            Some((pos, target))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn find_selects_by_weight() {
        let t = FenwickTree::from_weights(vec![1.0, 0.0, 2.0, 0.5]);
        assert_eq!(t.find(0.5).unwrap().0, 0);
        assert_eq!(t.find(1.0).unwrap().0, 2);
        assert_eq!(t.find(2.99).unwrap().0, 2);
        assert_eq!(t.find(3.2).unwrap().0, 3);
        assert!(t.find(3.5).is_none());
    }

    proptest! {
        #[test]
        fn prefix_sums_match_naive(ws in prop::collection::vec(0.0f64..10.0, 1..200),
                                   ups in prop::collection::vec((0usize..200, 0.0f64..10.0), 0..50)) {
            let mut t = FenwickTree::new(ws.len());
            let mut naive = vec![0.0; ws.len()];
            for (i, &w) in ws.iter().enumerate() {
                t.set(i, w);
                naive[i] = w;
            }
            for (i, w) in ups {
                let i = i % ws.len();
                t.set(i, w);
                naive[i] = w;
            }
            let mut acc = 0.0;
            for i in 0..=naive.len() {
                prop_assert!((t.prefix_sum(i) - acc).abs() < 1e-9);
                if i < naive.len() { acc += naive[i]; }
            }
            let mut r = t.clone();
            r.rebuild();
            prop_assert!((r.total() - acc).abs() < 1e-9);
        }
    }
}
