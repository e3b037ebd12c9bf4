use super::family::GoodFamily;
use super::label::PaintedSet;
use super::partition::TwoPartition;
use crate::error::{Error, Result};

/// Which factor of a one-edge splitting a position belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The two vertex sets `S1 ∪ {e1}` and `S2 ∪ {e2}` of the one-edge tree `σ`,
/// with `S1` the part containing the minimal label.
///
/// Each factor is a canonical painted set: the whites of the part in order,
/// then the new white `e`, then the blacks of the part. The position maps
/// are recorded in both directions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSplit {
    sigma: TwoPartition,
    left: PaintedSet,
    right: PaintedSet,
    /// `to_side[p]` for every position `p` of the ground set.
    to_side: Vec<(Side, usize)>,
    left_to_ground: Vec<Option<usize>>,
    right_to_ground: Vec<Option<usize>>,
    e_left: usize,
    e_right: usize,
}

fn side_set(s: PaintedSet, part: u64) -> Result<(PaintedSet, Vec<Option<usize>>, usize)> {
    let w = (part & s.white_mask()).count_ones();
    let b = part.count_ones() - w;
    let target = PaintedSet::new(w + 1, b)?;
    let mut back = Vec::with_capacity(target.len());
    for p in 0..s.len() {
        if part >> p & 1 == 1 && s.is_white_pos(p) {
            back.push(Some(p));
        }
    }
    let e = back.len();
    back.push(None);
    for p in 0..s.len() {
        if part >> p & 1 == 1 && !s.is_white_pos(p) {
            back.push(Some(p));
        }
    }
    Ok((target, back, e))
}

impl EdgeSplit {
    pub fn new(sigma: TwoPartition) -> Result<Self> {
        sigma.require_stable()?;
        let s = sigma.ground();
        let (left, left_to_ground, e_left) = side_set(s, sigma.part_min())?;
        let (right, right_to_ground, e_right) = side_set(s, sigma.part_other())?;
        let mut to_side = vec![(Side::Left, 0); s.len()];
        for (q, p) in left_to_ground.iter().enumerate() {
            if let Some(p) = p {
                to_side[*p] = (Side::Left, q);
            }
        }
        for (q, p) in right_to_ground.iter().enumerate() {
            if let Some(p) = p {
                to_side[*p] = (Side::Right, q);
            }
        }
        Ok(EdgeSplit { sigma, left, right, to_side, left_to_ground, right_to_ground, e_left, e_right })
    }

    pub fn sigma(&self) -> TwoPartition {
        self.sigma
    }

    pub fn ground(&self) -> PaintedSet {
        self.sigma.ground()
    }

    pub fn left(&self) -> PaintedSet {
        self.left
    }

    pub fn right(&self) -> PaintedSet {
        self.right
    }

    pub fn side_set(&self, side: Side) -> PaintedSet {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// Position of the glued white `e` in the given factor.
    pub fn e_position(&self, side: Side) -> usize {
        match side {
            Side::Left => self.e_left,
            Side::Right => self.e_right,
        }
    }

    /// Factor and position of a ground position.
    pub fn locate(&self, p: usize) -> (Side, usize) {
        self.to_side[p]
    }

    /// Ground position of a factor position, `None` for the glued white.
    pub fn to_ground(&self, side: Side, q: usize) -> Option<usize> {
        match side {
            Side::Left => self.left_to_ground[q],
            Side::Right => self.right_to_ground[q],
        }
    }

    /// Lifts a subset of one factor to the ground set, replacing `e` by the
    /// whole opposite part.
    pub fn lift_mask(&self, side: Side, mask: u64) -> u64 {
        let (map, e, other) = match side {
            Side::Left => (&self.left_to_ground, self.e_left, self.sigma.part_other()),
            Side::Right => (&self.right_to_ground, self.e_right, self.sigma.part_min()),
        };
        let mut out = 0u64;
        for (q, p) in map.iter().enumerate() {
            if mask >> q & 1 == 1 {
                match p {
                    Some(p) => out |= 1 << p,
                    None => {
                        debug_assert_eq!(q, e);
                        out |= other;
                    }
                }
            }
        }
        out
    }

    /// Lifts a partition of a factor to a partition of the ground set.
    pub fn lift(&self, side: Side, rho: &TwoPartition) -> TwoPartition {
        TwoPartition::from_part(self.ground(), self.lift_mask(side, rho.part_min())).expect("lift of a proper part is proper")
    }

    /// The tree `τ1 • τ2` obtained by gluing `e1` to `e2`.
    pub fn graft(&self, g1: &GoodFamily, g2: &GoodFamily) -> Result<GoodFamily> {
        if g1.ground() != self.left || g2.ground() != self.right {
            return Err(Error::GroundMismatch);
        }
        let mut parts: Vec<TwoPartition> = Vec::with_capacity(g1.edges() + g2.edges() + 1);
        parts.extend(g1.partitions().map(|r| self.lift(Side::Left, &r)));
        parts.extend(g2.partitions().map(|r| self.lift(Side::Right, &r)));
        parts.push(self.sigma);
        let g = GoodFamily::new(self.ground(), parts)?;
        assert_eq!(g.edges(), g1.edges() + g2.edges() + 1, "grafting lost an edge");
        Ok(g)
    }

    /// Restricts a partition of the ground set, compatible with and distinct
    /// from `σ`, to the factor containing one of its parts.
    pub fn restrict(&self, rho: &TwoPartition) -> Result<(Side, TwoPartition)> {
        if rho.ground() != self.ground() {
            return Err(Error::GroundMismatch);
        }
        if *rho == self.sigma || rho.delta_unchecked(&self.sigma) != 1 {
            return Err(Error::Precondition(format!("{rho} does not refine a side of {}", self.sigma)));
        }
        for part in [rho.part_min(), rho.part_other()] {
            for side in [Side::Left, Side::Right] {
                let own = match side {
                    Side::Left => self.sigma.part_min(),
                    Side::Right => self.sigma.part_other(),
                };
                if part & own == part {
                    let mut mask = 0u64;
                    for p in 0..self.ground().len() {
                        if part >> p & 1 == 1 {
                            mask |= 1 << self.to_side[p].1;
                        }
                    }
                    let r = TwoPartition::from_part(self.side_set(side), mask)?;
                    return Ok((side, r));
                }
            }
        }
        unreachable!("a partition at distance one has a part inside a side")
    }

    /// Inverse of [`EdgeSplit::graft`]: the two factor trees of a tree with edge `σ`.
    pub fn split(&self, g: &GoodFamily) -> Result<(GoodFamily, GoodFamily)> {
        if !g.contains(&self.sigma) {
            return Err(Error::NotAnEdge);
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        for rho in g.partitions().filter(|r| *r != self.sigma) {
            match self.restrict(&rho)? {
                (Side::Left, r) => left.push(r),
                (Side::Right, r) => right.push(r),
            }
        }
        Ok((GoodFamily::new(self.left, left)?, GoodFamily::new(self.right, right)?))
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
    fn graft_examples() {
        let s4 = PaintedSet::new(4, 0).unwrap();
        let sp = EdgeSplit::new(p(s4, &[1, 2])).unwrap();
        let g = sp.graft(&GoodFamily::empty(sp.left()), &GoodFamily::empty(sp.right())).unwrap();
        assert_eq!(g, GoodFamily::new(s4, [p(s4, &[1, 2])]).unwrap());

        let s5 = PaintedSet::new(5, 0).unwrap();
        let sp = EdgeSplit::new(p(s5, &[1, 2])).unwrap();
        // right factor: w1=3, w2=4, w3=5, w4=e2
        let r = sp.right();
        let g2 = GoodFamily::new(r, [p(r, &[1, 4])]).unwrap();
        let g = sp.graft(&GoodFamily::empty(sp.left()), &g2).unwrap();
        assert_eq!(g, GoodFamily::new(s5, [p(s5, &[1, 2]), p(s5, &[1, 2, 3])]).unwrap());
        assert_eq!(sp.split(&g).unwrap(), (GoodFamily::empty(sp.left()), g2));
    }

    #[test]
    fn black_labels_keep_their_color() {
        let s = PaintedSet::new(2, 2).unwrap();
        let sigma = TwoPartition::from_labels(s, &["w1".parse().unwrap(), "b1".parse().unwrap()]).unwrap();
        let sp = EdgeSplit::new(sigma).unwrap();
        assert_eq!(sp.left(), PaintedSet::new(2, 1).unwrap());
        assert_eq!(sp.locate(2), (Side::Left, 2));
        assert_eq!(sp.e_position(Side::Right), 1);
        assert_eq!(sp.to_ground(Side::Right, 2), Some(3));
    }
}
