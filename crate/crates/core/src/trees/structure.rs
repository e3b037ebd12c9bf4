use std::cmp::Ordering;

use super::family::GoodFamily;
use super::label::{Label, PaintedSet};
use super::partition::{quadruple_allowed, TwoPartition};
use crate::error::{Error, Result};

/// A flag of an expanded tree. An edge half is identified by its edge
/// partition and by whether its vertex lies on the side of the part holding
/// the minimal label; the branch seen through such a half is the other part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    Tail(Label),
    Half { edge: TwoPartition, near_min: bool },
}

impl Flag {
    /// White tails and all edge halves are white.
    pub fn is_white(&self) -> bool {
        match self {
            Flag::Tail(l) => l.is_white(),
            Flag::Half { .. } => true,
        }
    }

    /// Canonical position order at a vertex: white tails, then edge halves,
    /// then black tails.
    fn sort_key(&self) -> (u8, u32, u64, bool) {
        match *self {
            Flag::Tail(l) if l.is_white() => (0, l.index, 0, false),
            Flag::Half { edge, near_min } => (1, 0, edge.part_min(), near_min),
            Flag::Tail(l) => (2, l.index, 0, false),
        }
    }
}

impl PartialOrd for Flag {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Flag {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagRecord {
    pub flag: Flag,
    /// Labels on the branch starting with this flag.
    pub branch: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub flags: Vec<FlagRecord>,
}

impl Vertex {
    pub fn position_of(&self, flag: &Flag) -> Option<usize> {
        self.flags.iter().position(|r| r.flag == *flag)
    }

    fn tail_min(&self) -> Option<u32> {
        self.flags
            .iter()
            .filter_map(|r| match r.flag {
                Flag::Tail(_) => Some(r.branch.trailing_zeros()),
                _ => None,
            })
            .min()
    }

    fn sort_key(&self) -> (u32, Vec<u64>) {
        let mut branches: Vec<u64> = self.flags.iter().map(|r| r.branch).collect();
        branches.sort_unstable();
        (self.tail_min().unwrap_or(u32::MAX), branches)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub partition: TwoPartition,
    /// Vertex on the side of the part containing the minimal label.
    pub a: usize,
    /// Vertex on the other side.
    pub b: usize,
}

/// Expanded view of a good family: vertices with their flags, and edges.
///
/// Vertices are ordered by their minimal tail label (tail-less vertices last,
/// ordered by their sorted branch sets); flags inside a vertex follow
/// [`Flag`]'s canonical order; edges follow the family order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeStructure {
    family: GoodFamily,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// Outcome of testing a partition against a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BreakResult {
    AtEdge(TwoPartition),
    AtVertex(usize),
    NoBreak(TwoPartition),
}

/// A valid 2-partition of the flags at a vertex: `alpha` is a bitmask over
/// flag positions (always containing position 0), `sigma` the induced
/// partition of the labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VertexPartition {
    pub alpha: u64,
    pub sigma: TwoPartition,
}

/// Ordered flag quadruple at an edge: `i, j` at one end and `k, l` at the other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeQuad {
    pub i: Flag,
    pub j: Flag,
    pub k: Flag,
    pub l: Flag,
}

impl TreeStructure {
    /// Builds the tree by inserting the edges one at a time into the
    /// one-vertex tree, splitting the vertex each new partition breaks.
    pub fn expand(g: &GoodFamily) -> Result<Self> {
        let s = g.ground();
        let full = s.full_mask();
        let mut vertices: Vec<Vec<FlagRecord>> =
            vec![s.labels().enumerate().map(|(p, l)| FlagRecord { flag: Flag::Tail(l), branch: 1 << p }).collect()];
        let mut edges: Vec<Edge> = Vec::new();
        for sigma in g.partitions() {
            let p = sigma.part_min();
            let q = full ^ p;
            let v = vertices
                .iter()
                .position(|fl| {
                    let inside = fl.iter().filter(|r| r.branch & p == r.branch).count();
                    let outside = fl.iter().filter(|r| r.branch & q == r.branch).count();
                    inside + outside == fl.len() && inside >= 2 && outside >= 2
                })
                .ok_or_else(|| Error::NotGood(format!("{sigma} does not break the partial tree")))?;
            let old = std::mem::take(&mut vertices[v]);
            let (mut near, mut far): (Vec<FlagRecord>, Vec<FlagRecord>) =
                old.into_iter().partition(|r| r.branch & p == r.branch);
            near.push(FlagRecord { flag: Flag::Half { edge: sigma, near_min: true }, branch: q });
            far.push(FlagRecord { flag: Flag::Half { edge: sigma, near_min: false }, branch: p });
            let nv = vertices.len();
            for e in edges.iter_mut() {
                if e.a == v && far.iter().any(|r| r.flag == Flag::Half { edge: e.partition, near_min: true }) {
                    e.a = nv;
                }
                if e.b == v && far.iter().any(|r| r.flag == Flag::Half { edge: e.partition, near_min: false }) {
                    e.b = nv;
                }
            }
            vertices[v] = near;
            vertices.push(far);
            edges.push(Edge { partition: sigma, a: v, b: nv });
        }
        let mut verts: Vec<Vertex> = vertices
            .into_iter()
            .map(|mut fl| {
                fl.sort_by(|x, y| x.flag.cmp(&y.flag));
                Vertex { flags: fl }
            })
            .collect();
        let mut order: Vec<usize> = (0..verts.len()).collect();
        order.sort_by_key(|&i| verts[i].sort_key());
        let mut new_index = vec![0usize; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut sorted = Vec::with_capacity(verts.len());
        for &old in &order {
            sorted.push(std::mem::replace(&mut verts[old], Vertex { flags: Vec::new() }));
        }
        for e in edges.iter_mut() {
            e.a = new_index[e.a];
            e.b = new_index[e.b];
        }
        edges.sort_by_key(|e| e.partition);
        Ok(TreeStructure { family: g.clone(), vertices: sorted, edges })
    }

    pub fn family(&self) -> &GoodFamily {
        &self.family
    }

    pub fn ground(&self) -> PaintedSet {
        self.family.ground()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Edge partitions re-extracted from the structure.
    pub fn edge_partitions(&self) -> Vec<TwoPartition> {
        self.edges.iter().map(|e| e.partition).collect()
    }

    pub fn edge(&self, sigma: &TwoPartition) -> Option<&Edge> {
        self.edges.iter().find(|e| e.partition == *sigma)
    }

    /// Vertex holding a flag.
    pub fn vertex_of(&self, flag: &Flag) -> Option<usize> {
        match flag {
            Flag::Half { edge, near_min } => self.edge(edge).map(|e| if *near_min { e.a } else { e.b }),
            Flag::Tail(_) => self.vertices.iter().position(|v| v.position_of(flag).is_some()),
        }
    }

    /// The painted set of flags at `v`: white tails and edge halves are the
    /// whites, black tails the blacks, positions following the flag order.
    pub fn vertex_ground(&self, v: usize) -> PaintedSet {
        let flags = &self.vertices[v].flags;
        let w = flags.iter().filter(|r| r.flag.is_white()).count() as u32;
        PaintedSet::new(w, flags.len() as u32 - w).expect("vertex sets are small")
    }

    /// Label set of the union of the branches selected by a flag mask at `v`.
    pub fn lift_flag_mask(&self, v: usize, mask: u64) -> u64 {
        let mut out = 0u64;
        for (pos, r) in self.vertices[v].flags.iter().enumerate() {
            if mask >> pos & 1 == 1 {
                out |= r.branch;
            }
        }
        out
    }

    /// Each flag at `v` with the label set of its branch.
    pub fn branches(&self, v: usize) -> Vec<(Flag, u64)> {
        self.vertices[v].flags.iter().map(|r| (r.flag, r.branch)).collect()
    }

    /// True for white tails and edge halves.
    pub fn branch_has_white(&self, flag: &Flag) -> bool {
        flag.is_white()
    }

    /// Locates where `sigma` breaks the tree.
    pub fn classify_break(&self, sigma: &TwoPartition) -> Result<BreakResult> {
        if sigma.ground() != self.ground() {
            return Err(Error::GroundMismatch);
        }
        sigma.require_stable()?;
        let mut witness = None;
        for e in &self.edges {
            match e.partition.delta_unchecked(sigma) {
                0 => return Ok(BreakResult::AtEdge(e.partition)),
                2 if witness.is_none() => witness = Some(e.partition),
                _ => {}
            }
        }
        if let Some(w) = witness {
            return Ok(BreakResult::NoBreak(w));
        }
        Ok(BreakResult::AtVertex(self.breaking_vertex(sigma).expect("a compatible partition breaks some vertex")))
    }

    fn breaking_vertex(&self, sigma: &TwoPartition) -> Option<usize> {
        let p = sigma.part_min();
        let q = sigma.part_other();
        self.vertices.iter().position(|v| {
            let inside = v.flags.iter().filter(|r| r.branch & p == r.branch).count();
            let outside = v.flags.iter().filter(|r| r.branch & q == r.branch).count();
            inside + outside == v.flags.len() && inside >= 2 && outside >= 2
        })
    }

    /// The flag bitmask at `v` of the side of `sigma` not containing the
    /// minimal label, when `sigma` breaks the tree at `v`.
    pub fn alpha_of(&self, v: usize, sigma: &TwoPartition) -> u64 {
        let mut mask = 0u64;
        for (pos, r) in self.vertices[v].flags.iter().enumerate() {
            if r.branch & sigma.part_min() == r.branch {
                mask |= 1 << pos;
            }
        }
        if mask & 1 == 0 {
            mask ^= (1u64 << self.vertices[v].flags.len()) - 1;
        }
        mask
    }

    /// The 2-partitions of the flags at `v` whose induced label partition is
    /// painted stable and not an existing edge: both parts carry at least two
    /// flags and at least one white flag.
    pub fn vertex_partitions(&self, v: usize) -> Vec<VertexPartition> {
        let flags = &self.vertices[v].flags;
        let n = flags.len();
        let mut white = 0u64;
        for (pos, r) in flags.iter().enumerate() {
            if r.flag.is_white() {
                white |= 1 << pos;
            }
        }
        let all = (1u64 << n) - 1;
        let mut out = Vec::new();
        for rest in 0..(1u64 << (n - 1)) {
            let alpha = 1 | (rest << 1);
            if alpha == all {
                continue;
            }
            let other = all ^ alpha;
            if alpha.count_ones() < 2 || other.count_ones() < 2 || alpha & white == 0 || other & white == 0 {
                continue;
            }
            let mut labels = 0u64;
            for (pos, r) in flags.iter().enumerate() {
                if alpha >> pos & 1 == 1 {
                    labels |= r.branch;
                }
            }
            let sigma = TwoPartition::from_part(self.ground(), labels).expect("proper by construction");
            out.push(VertexPartition { alpha, sigma });
        }
        out
    }

    /// Allowed ordered quadruples of distinct flags at `v`, as positions.
    pub fn allowed_vertex_quadruples(&self, v: usize) -> Vec<[usize; 4]> {
        let flags = &self.vertices[v].flags;
        let n = flags.len();
        let w: Vec<bool> = flags.iter().map(|r| r.flag.is_white()).collect();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let distinct = i != j && i != k && i != l && j != k && j != l && k != l;
                        if distinct && quadruple_allowed(w[i], w[j], w[k], w[l]) {
                            out.push([i, j, k, l]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Allowed quadruples at an edge, in lexicographic order of flag
    /// positions: `i, j` at the near-minimum end, `k, l` at the other end,
    /// never the halves of the edge itself.
    pub fn allowed_edge_quadruples(&self, sigma: &TwoPartition) -> Result<Vec<EdgeQuad>> {
        let e = *self.edge(sigma).ok_or(Error::NotAnEdge)?;
        let half_a = Flag::Half { edge: *sigma, near_min: true };
        let half_b = Flag::Half { edge: *sigma, near_min: false };
        let at_a: Vec<Flag> =
            self.vertices[e.a].flags.iter().map(|r| r.flag).filter(|f| *f != half_a).collect();
        let at_b: Vec<Flag> =
            self.vertices[e.b].flags.iter().map(|r| r.flag).filter(|f| *f != half_b).collect();
        let mut out = Vec::new();
        for i in &at_a {
            for j in at_a.iter().filter(|j| *j != i) {
                for k in &at_b {
                    for l in at_b.iter().filter(|l| *l != k) {
                        if quadruple_allowed(i.is_white(), j.is_white(), k.is_white(), l.is_white()) {
                            out.push(EdgeQuad { i: *i, j: *j, k: *k, l: *l });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Convenience wrapper for [`TreeStructure::expand`].
pub fn expand_tree(g: &GoodFamily) -> Result<TreeStructure> {
    TreeStructure::expand(g)
}

/// Classifies how `sigma` breaks the tree encoded by `g`.
pub fn classify_break(g: &GoodFamily, sigma: &TwoPartition) -> Result<BreakResult> {
    TreeStructure::expand(g)?.classify_break(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s5() -> PaintedSet {
        PaintedSet::new(5, 0).unwrap()
    }

    fn p(idx: &[u32]) -> TwoPartition {
        let labels: Vec<Label> = idx.iter().map(|&i| Label::white(i)).collect();
        TwoPartition::from_labels(s5(), &labels).unwrap()
    }

    fn tails(v: &Vertex) -> Vec<u32> {
        v.flags
            .iter()
            .filter_map(|r| match r.flag {
                Flag::Tail(l) => Some(l.index),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn one_vertex_and_one_edge() {
        let t = TreeStructure::expand(&GoodFamily::empty(s5())).unwrap();
        assert_eq!(t.vertices().len(), 1);
        assert_eq!(tails(t.vertex(0)), vec![1, 2, 3, 4, 5]);
        for (f, b) in t.branches(0) {
            let Flag::Tail(l) = f else { panic!() };
            assert_eq!(b, 1 << (l.index - 1));
        }
        let t1 = TreeStructure::expand(&GoodFamily::new(s5(), [p(&[1, 2])]).unwrap()).unwrap();
        assert_eq!(tails(t1.vertex(0)), vec![1, 2]);
        assert_eq!(tails(t1.vertex(1)), vec![3, 4, 5]);
        let br = t1.branches(0);
        assert_eq!(br[2].1, 0b11100);
    }

    #[test]
    fn chain_structure() {
        let g = GoodFamily::new(s5(), [p(&[1, 2]), p(&[1, 2, 5])]).unwrap();
        let t = TreeStructure::expand(&g).unwrap();
        assert_eq!(t.vertices().len(), 3);
        let middle = t.vertices().iter().position(|v| tails(v) == vec![5]).unwrap();
        let mut sets: Vec<u64> = t.branches(middle).iter().map(|x| x.1).collect();
        sets.sort();
        assert_eq!(sets, vec![0b00011, 0b01100, 0b10000]);
        assert_eq!(GoodFamily::new(s5(), t.edge_partitions()).unwrap(), g);
    }

    #[test]
    fn classification_examples() {
        let g = GoodFamily::new(s5(), [p(&[1, 2])]).unwrap();
        assert_eq!(classify_break(&g, &p(&[1, 2])).unwrap(), BreakResult::AtEdge(p(&[1, 2])));
        let t = TreeStructure::expand(&g).unwrap();
        match t.classify_break(&p(&[3, 4])).unwrap() {
            BreakResult::AtVertex(v) => assert_eq!(tails(t.vertex(v)), vec![3, 4, 5]),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(t.classify_break(&p(&[1, 3])).unwrap(), BreakResult::NoBreak(p(&[1, 2])));
    }

    #[test]
    fn vertex_partition_examples() {
        let g = GoodFamily::new(s5(), [p(&[1, 2])]).unwrap();
        let t = TreeStructure::expand(&g).unwrap();
        assert_eq!(t.vertex_partitions(0).len(), 0);
        let vp = t.vertex_partitions(1);
        let mut got: Vec<TwoPartition> = vp.iter().map(|x| x.sigma).collect();
        got.sort();
        let mut want = vec![p(&[3, 4]), p(&[3, 5]), p(&[4, 5])];
        want.sort();
        assert_eq!(got, want);
        let s22 = PaintedSet::new(2, 2).unwrap();
        let t22 = TreeStructure::expand(&GoodFamily::empty(s22)).unwrap();
        assert_eq!(t22.vertex_partitions(0).len(), 2);
    }

    #[test]
    fn quadruple_allowance_with_blacks() {
        let s = PaintedSet::new(2, 3).unwrap();
        let t = TreeStructure::expand(&GoodFamily::empty(s)).unwrap();
        let quads = t.allowed_vertex_quadruples(0);
        let pos = |l: &str| t.vertex(0).position_of(&Flag::Tail(l.parse().unwrap())).unwrap();
        assert!(quads.contains(&[pos("b1"), pos("w1"), pos("b2"), pos("w2")]));
        assert!(!quads.contains(&[pos("w1"), pos("w2"), pos("b1"), pos("b2")]));
    }
}
