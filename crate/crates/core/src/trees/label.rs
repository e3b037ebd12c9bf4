use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    White,
    Black,
}

/// A label of a canonical painted set: `w3` is the third white, `b2` the
/// second black. Ordering puts all whites before all blacks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    pub color: Color,
    pub index: u32,
}

impl Label {
    pub fn white(index: u32) -> Self {
        Label { color: Color::White, index }
    }

    pub fn black(index: u32) -> Self {
        Label { color: Color::Black, index }
    }

    pub fn is_white(&self) -> bool {
        self.color == Color::White
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.is_white() { 'w' } else { 'b' };
        write!(f, "{c}{}", self.index)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad label '{s}'"));
        let (head, tail) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let index: u32 = tail.parse().map_err(|_| bad())?;
        if index == 0 {
            return Err(bad());
        }
        match head {
            "w" => Ok(Label::white(index)),
            "b" => Ok(Label::black(index)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// The canonical painted set with whites `w1..wm` and blacks `b1..bn`.
///
/// Position `p` in bitmasks refers to the `p`-th label in the total order,
/// so whites occupy bits `0..m` and blacks bits `m..m+n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PaintedSet {
    whites: u32,
    blacks: u32,
}

impl PaintedSet {
    pub fn new(whites: u32, blacks: u32) -> Result<Self> {
        let n = (whites + blacks) as usize;
        if n > 64 {
            return Err(Error::TooManyLabels(n));
        }
        Ok(PaintedSet { whites, blacks })
    }

    pub fn whites(&self) -> u32 {
        self.whites
    }

    pub fn blacks(&self) -> u32 {
        self.blacks
    }

    pub fn len(&self) -> usize {
        (self.whites + self.blacks) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn full_mask(&self) -> u64 {
        match self.len() {
            64 => u64::MAX,
            n => (1u64 << n) - 1,
        }
    }

    pub fn white_mask(&self) -> u64 {
        match self.whites {
            64 => u64::MAX,
            n => (1u64 << n) - 1,
        }
    }

    pub fn label_at(&self, pos: usize) -> Label {
        assert!(pos < self.len(), "label position out of range");
        let pos = pos as u32;
        if pos < self.whites {
            Label::white(pos + 1)
        } else {
            Label::black(pos - self.whites + 1)
        }
    }

    pub fn position(&self, label: Label) -> Option<usize> {
        match label.color {
            Color::White if label.index >= 1 && label.index <= self.whites => Some(label.index as usize - 1),
            Color::Black if label.index >= 1 && label.index <= self.blacks => {
                Some((self.whites + label.index - 1) as usize)
            }
            _ => None,
        }
    }

    pub fn position_checked(&self, label: Label) -> Result<usize> {
        self.position(label).ok_or_else(|| Error::Parse(format!("label {label} not in painted set")))
    }

    pub fn is_white_pos(&self, pos: usize) -> bool {
        (pos as u32) < self.whites
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        (0..self.len()).map(|p| self.label_at(p))
    }

    pub fn labels_of(&self, mask: u64) -> Vec<Label> {
        (0..self.len()).filter(|p| mask >> p & 1 == 1).map(|p| self.label_at(p)).collect()
    }

    pub fn mask_of(&self, labels: &[Label]) -> Result<u64> {
        let mut m = 0u64;
        for l in labels {
            m |= 1u64 << self.position_checked(*l)?;
        }
        Ok(m)
    }

    /// Ring and module constructions require `|S| >= 3` and two whites.
    pub fn check_ring_ready(&self) -> Result<()> {
        if self.len() < 3 || self.whites < 2 {
            return Err(Error::NotRingReady { whites: self.whites, blacks: self.blacks });
        }
        Ok(())
    }

    /// Top cohomological degree `|S| - 3`.
    pub fn top_degree(&self) -> usize {
        self.len().saturating_sub(3)
    }
}

impl fmt::Display for PaintedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S(W={}, B={})", self.whites, self.blacks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_parse_and_order() {
        let w3: Label = "w3".parse().unwrap();
        let b1: Label = "b1".parse().unwrap();
        assert_eq!(w3, Label::white(3));
        assert!(w3 < b1);
        assert!("x1".parse::<Label>().is_err());
        assert!("w0".parse::<Label>().is_err());
        assert_eq!(b1.to_string(), "b1");
    }

    #[test]
    fn positions_follow_total_order() {
        let s = PaintedSet::new(2, 3).unwrap();
        let all: Vec<Label> = s.labels().collect();
        assert_eq!(all.len(), 5);
        for (p, l) in all.iter().enumerate() {
            assert_eq!(s.position(*l), Some(p));
        }
        assert_eq!(s.position(Label::black(4)), None);
        assert_eq!(s.white_mask(), 0b11);
    }
}
