use std::fmt;

use super::label::PaintedSet;
use super::partition::{enumerate_stable_partitions, PartitionJson, TwoPartition};
use crate::error::{Error, Result};

/// Canonical encoding of a painted stable tree: its set of edge partitions,
/// pairwise at δ-distance one. Ordering is lexicographic on the sorted lists
/// of partition bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoodFamily {
    ground: PaintedSet,
    parts: Vec<u64>,
}

impl GoodFamily {
    /// The one-vertex tree.
    pub fn empty(ground: PaintedSet) -> Self {
        GoodFamily { ground, parts: Vec::new() }
    }

    /// Validates and canonicalizes a family.
    pub fn new(ground: PaintedSet, parts: impl IntoIterator<Item = TwoPartition>) -> Result<Self> {
        let mut list: Vec<TwoPartition> = parts.into_iter().collect();
        list.sort();
        for (i, p) in list.iter().enumerate() {
            if p.ground() != ground {
                return Err(Error::GroundMismatch);
            }
            if !p.is_painted_stable() {
                return Err(Error::NotGood(format!("{p} is not painted stable")));
            }
            for q in &list[i + 1..] {
                if p.delta_unchecked(q) != 1 {
                    return Err(Error::NotGood(format!("{p} and {q} are not at distance one")));
                }
            }
        }
        Ok(GoodFamily { ground, parts: list.iter().map(|p| p.part_min()).collect() })
    }

    /// Builds a family from sorted canonical masks without validation.
    pub(crate) fn from_sorted_masks(ground: PaintedSet, parts: Vec<u64>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] < w[1]));
        GoodFamily { ground, parts }
    }

    pub fn ground(&self) -> PaintedSet {
        self.ground
    }

    /// Number of edges, which is the cohomological degree of `m(τ)`.
    pub fn edges(&self) -> usize {
        self.parts.len()
    }

    pub fn masks(&self) -> &[u64] {
        &self.parts
    }

    pub fn partitions(&self) -> impl Iterator<Item = TwoPartition> + '_ {
        self.parts.iter().map(move |&m| TwoPartition::from_part(self.ground, m).expect("stored masks are valid"))
    }

    pub fn contains(&self, sigma: &TwoPartition) -> bool {
        sigma.ground() == self.ground && self.parts.binary_search(&sigma.part_min()).is_ok()
    }

    /// Removes the edge `sigma` (the contraction of that edge).
    pub fn contract_edge(&self, sigma: &TwoPartition) -> Result<Self> {
        if sigma.ground() != self.ground {
            return Err(Error::GroundMismatch);
        }
        let pos = self.parts.binary_search(&sigma.part_min()).map_err(|_| Error::NotAnEdge)?;
        let mut parts = self.parts.clone();
        parts.remove(pos);
        Ok(GoodFamily { ground: self.ground, parts })
    }

    /// Adds `sigma`, which must break the tree at a vertex: the tree `σ∗τ`.
    pub fn star_insert(&self, sigma: &TwoPartition) -> Result<Self> {
        if sigma.ground() != self.ground {
            return Err(Error::GroundMismatch);
        }
        sigma.require_stable()?;
        if self.contains(sigma) {
            return Err(Error::Precondition(format!("{sigma} is already an edge")));
        }
        if let Some(w) = self.partitions().find(|p| p.delta_unchecked(sigma) != 1) {
            return Err(Error::Precondition(format!("{sigma} does not break the tree at a vertex (witness {w})")));
        }
        Ok(self.with_unchecked(sigma.part_min()))
    }

    /// Inserts a canonical mask known to be compatible.
    pub(crate) fn with_unchecked(&self, mask: u64) -> Self {
        let mut parts = self.parts.clone();
        let pos = parts.binary_search(&mask).unwrap_or_else(|p| p);
        parts.insert(pos, mask);
        GoodFamily { ground: self.ground, parts }
    }

    /// Relabels along a bijection of positions `map[old] = new` onto `target`.
    pub fn relabel(&self, target: PaintedSet, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.ground.len(), "relabeling map has the wrong length");
        let mut parts: Vec<u64> = self
            .parts
            .iter()
            .map(|&m| {
                let mut out = 0u64;
                for (old, &new) in map.iter().enumerate() {
                    if m >> old & 1 == 1 {
                        out |= 1u64 << new;
                    }
                }
                TwoPartition::from_part(target, out).expect("bijection keeps parts proper").part_min()
            })
            .collect();
        parts.sort_unstable();
        GoodFamily { ground: target, parts }
    }

    pub fn to_json(&self) -> Vec<PartitionJson> {
        self.partitions().map(|p| p.to_json()).collect()
    }

    pub fn from_json(ground: PaintedSet, j: &[PartitionJson]) -> Result<Self> {
        let parts: Result<Vec<TwoPartition>> = j.iter().map(|p| TwoPartition::from_json(ground, p)).collect();
        GoodFamily::new(ground, parts?)
    }
}

impl fmt::Display for GoodFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.partitions().map(|p| p.to_string()).collect();
        write!(f, "[{}]", items.join(", "))
    }
}

/// Whether a set of partitions is good: all stable, pairwise at distance one.
pub fn is_good_family(parts: &[TwoPartition]) -> bool {
    let Some(first) = parts.first() else { return true };
    GoodFamily::new(first.ground(), parts.iter().copied()).is_ok()
}

/// All good families over `s` (optionally only those with `num_edges` edges)
/// in lexicographic order of their sorted partition lists.
pub fn enumerate_trees(s: PaintedSet, num_edges: Option<usize>) -> Vec<GoodFamily> {
    let parts = enumerate_stable_partitions(s);
    let n = parts.len();
    let words = n.div_ceil(64).max(1);
    let mut adj = vec![vec![0u64; words]; n];
    for i in 0..n {
        for j in i + 1..n {
            if parts[i].delta_unchecked(&parts[j]) == 1 {
                adj[i][j / 64] |= 1 << (j % 64);
                adj[j][i / 64] |= 1 << (i % 64);
            }
        }
    }
    let masks: Vec<u64> = parts.iter().map(|p| p.part_min()).collect();
    let max_edges = s.top_degree();
    let mut out = Vec::new();
    if num_edges.map_or(true, |e| e == 0) {
        out.push(GoodFamily::empty(s));
    }
    let mut stack: Vec<usize> = Vec::new();
    let mut candidates = vec![0u64; words];
    for i in 0..n {
        candidates[i / 64] |= 1 << (i % 64);
    }
    extend_cliques(&adj, &masks, s, num_edges, max_edges, &mut stack, &candidates, 0, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn extend_cliques(
    adj: &[Vec<u64>],
    masks: &[u64],
    s: PaintedSet,
    num_edges: Option<usize>,
    max_edges: usize,
    stack: &mut Vec<usize>,
    candidates: &[u64],
    start: usize,
    out: &mut Vec<GoodFamily>,
) {
    if num_edges.is_some_and(|e| stack.len() >= e) {
        return;
    }
    for i in start..masks.len() {
        if candidates[i / 64] >> (i % 64) & 1 == 0 {
            continue;
        }
        stack.push(i);
        assert!(stack.len() <= max_edges, "a good family exceeded |S| - 3 edges");
        if num_edges.map_or(true, |e| e == stack.len()) {
            out.push(GoodFamily::from_sorted_masks(s, stack.iter().map(|&k| masks[k]).collect()));
        }
        let next: Vec<u64> = candidates.iter().zip(&adj[i]).map(|(a, b)| a & b).collect();
        extend_cliques(adj, masks, s, num_edges, max_edges, stack, &next, i + 1, out);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::label::Label;

    fn p(s: PaintedSet, idx: &[u32]) -> TwoPartition {
        let labels: Vec<Label> = idx.iter().map(|&i| Label::white(i)).collect();
        TwoPartition::from_labels(s, &labels).unwrap()
    }

    #[test]
    fn goodness_examples() {
        let s5 = PaintedSet::new(5, 0).unwrap();
        assert!(is_good_family(&[]));
        assert!(is_good_family(&[p(s5, &[1, 2]), p(s5, &[3, 4])]));
        let s4 = PaintedSet::new(4, 0).unwrap();
        assert!(!is_good_family(&[p(s4, &[1, 2]), p(s4, &[1, 3])]));
    }

    #[test]
    fn tree_counts() {
        let s5 = PaintedSet::new(5, 0).unwrap();
        assert_eq!(enumerate_trees(s5, Some(1)).len(), 10);
        assert_eq!(enumerate_trees(s5, Some(2)).len(), 15);
        assert_eq!(enumerate_trees(s5, None).len(), 26);
        let s22 = PaintedSet::new(2, 2).unwrap();
        assert_eq!(enumerate_trees(s22, Some(2)).len(), 0);
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        let s = PaintedSet::new(3, 2).unwrap();
        let all = enumerate_trees(s, None);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn contraction_and_insertion() {
        let s5 = PaintedSet::new(5, 0).unwrap();
        let a = p(s5, &[1, 2]);
        let b = p(s5, &[1, 2, 5]);
        let chain = GoodFamily::new(s5, [a, b]).unwrap();
        assert_eq!(chain.contract_edge(&b).unwrap(), GoodFamily::new(s5, [a]).unwrap());
        let both = chain.contract_edge(&a).unwrap().contract_edge(&b).unwrap();
        assert_eq!(both, GoodFamily::empty(s5));
        assert!(chain.contract_edge(&p(s5, &[1, 3])).is_err());
        let one = GoodFamily::new(s5, [a]).unwrap();
        assert_eq!(one.star_insert(&b).unwrap(), chain);
        assert!(one.star_insert(&p(s5, &[1, 3])).is_err());
    }
}
