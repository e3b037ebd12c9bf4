//! Painted sets, stable 2-partitions and painted stable trees.
//!
//! A tree is stored canonically as its [`GoodFamily`] of edge partitions;
//! [`TreeStructure`] is the expanded view with vertices and flags.

pub mod family;
pub mod label;
pub mod partition;
pub mod split;
pub mod structure;

pub use family::{enumerate_trees, is_good_family, GoodFamily};
pub use label::{Color, Label, PaintedSet};
pub use partition::{enumerate_stable_partitions, epsilon_by, quadruple_allowed, PartitionJson, TwoPartition};
pub use split::{EdgeSplit, Side};
pub use structure::{classify_break, expand_tree, BreakResult, EdgeQuad, Edge, Flag, TreeStructure, Vertex, VertexPartition};
