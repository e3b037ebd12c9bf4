use std::fmt;

use serde::{Deserialize, Serialize};

use super::label::{Label, PaintedSet};
use crate::error::{Error, Result};

/// An unordered 2-partition of a painted set, stored as the part containing the
/// minimal label (bit 0). Ordering is by that canonical bitmask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoPartition {
    ground: PaintedSet,
    part_min: u64,
}

impl TwoPartition {
    /// Builds the partition `{part, S \ part}`; `part` may be either side.
    pub fn from_part(ground: PaintedSet, part: u64) -> Result<Self> {
        let full = ground.full_mask();
        if part & !full != 0 {
            return Err(Error::BadPartition("mask has bits outside the ground set".into()));
        }
        if part == 0 || part == full {
            return Err(Error::BadPartition("both parts must be nonempty".into()));
        }
        let part_min = if part & 1 == 1 { part } else { full ^ part };
        Ok(TwoPartition { ground, part_min })
    }

    pub fn from_labels(ground: PaintedSet, labels: &[Label]) -> Result<Self> {
        TwoPartition::from_part(ground, ground.mask_of(labels)?)
    }

    pub fn ground(&self) -> PaintedSet {
        self.ground
    }

    pub fn part_min(&self) -> u64 {
        self.part_min
    }

    pub fn part_other(&self) -> u64 {
        self.ground.full_mask() ^ self.part_min
    }

    /// True when positions `a` and `b` lie in the same part.
    pub fn same_side(&self, a: usize, b: usize) -> bool {
        (self.part_min >> a & 1) == (self.part_min >> b & 1)
    }

    pub fn is_painted_stable(&self) -> bool {
        let w = self.ground.white_mask();
        let (a, b) = (self.part_min, self.part_other());
        a.count_ones() >= 2 && b.count_ones() >= 2 && a & w != 0 && b & w != 0
    }

    pub fn require_stable(&self) -> Result<()> {
        if self.is_painted_stable() {
            Ok(())
        } else {
            Err(Error::Unstable(self.to_string()))
        }
    }

    /// The δ-metric: number of nonempty pairwise intersections minus two.
    pub fn delta(&self, other: &TwoPartition) -> Result<u8> {
        if self.ground != other.ground {
            return Err(Error::GroundMismatch);
        }
        Ok(self.delta_unchecked(other))
    }

    pub(crate) fn delta_unchecked(&self, other: &TwoPartition) -> u8 {
        let (a1, a2) = (self.part_min, self.part_other());
        let (b1, b2) = (other.part_min, other.part_other());
        let n = [a1 & b1, a1 & b2, a2 & b1, a2 & b2].iter().filter(|x| **x != 0).count();
        (n - 2) as u8
    }

    /// The canonical part as labels (the `"part"` of the JSON encoding).
    pub fn labels(&self) -> Vec<Label> {
        self.ground.labels_of(self.part_min)
    }

    pub fn to_json(&self) -> PartitionJson {
        PartitionJson { part: self.labels() }
    }

    pub fn from_json(ground: PaintedSet, j: &PartitionJson) -> Result<Self> {
        TwoPartition::from_labels(ground, &j.part)
    }
}

impl fmt::Display for TwoPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |m: u64| {
            self.ground.labels_of(m).iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        };
        write!(f, "{{{}}}|{{{}}}", show(self.part_min), show(self.part_other()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionJson {
    pub part: Vec<Label>,
}

/// Sign ε of a partition against an ordered quadruple, given a "same part"
/// predicate: `+1` for `ij|kl`, `-1` for `kj|il`, `0` otherwise.
pub fn epsilon_by(same: impl Fn(usize, usize) -> bool, i: usize, j: usize, k: usize, l: usize) -> i8 {
    if same(i, j) && same(k, l) && !same(i, k) {
        1
    } else if same(k, j) && same(i, l) && !same(k, i) {
        -1
    } else {
        0
    }
}

/// All painted stable 2-partitions of `s`, sorted by canonical bitmask.
pub fn enumerate_stable_partitions(s: PaintedSet) -> Vec<TwoPartition> {
    let n = s.len();
    if n < 4 {
        return Vec::new();
    }
    let full = s.full_mask();
    let mut out = Vec::new();
    for rest in 0..(1u64 << (n - 1)) {
        let part = 1 | (rest << 1);
        if part == full {
            continue;
        }
        let p = TwoPartition { ground: s, part_min: part };
        if p.is_painted_stable() {
            out.push(p);
        }
    }
    out
}

/// Allowed quadruple test on colors: both `ij|kl` and `kj|il` painted stable
/// on the four points, equivalently `(j and l white) or (i and k white)`.
pub fn quadruple_allowed(i_white: bool, j_white: bool, k_white: bool, l_white: bool) -> bool {
    (j_white && l_white) || (i_white && k_white)
}
