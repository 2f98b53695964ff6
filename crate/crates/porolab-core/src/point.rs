//! Point handles shared by all spaces.

/// A point on the branching tree: branch word, position on the branch, and
/// whether it stands for a point of the boundary at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreePoint {
    /// Branch word over {1,2} packed as bits, most significant letter first;
    /// bit value 0 stands for letter 1.
    pub word: u64,
    /// Word length (branch depth); 0 for the root.
    pub depth: u8,
    /// Position along the branch in `(0, branch length]`, 0 for root and boundary.
    pub offset: f64,
    pub boundary: bool,
}

impl TreePoint {
    pub const ROOT: TreePoint = TreePoint { word: 0, depth: 0, offset: 0.0, boundary: false };

    pub fn on_branch(word: u64, depth: u8, offset: f64) -> Self {
        TreePoint { word, depth, offset, boundary: false }
    }

    pub fn boundary(word: u64, depth: u8) -> Self {
        TreePoint { word, depth, offset: 0.0, boundary: true }
    }

    /// Length of the common prefix of the two branch words.
    pub fn common_prefix(&self, other: &TreePoint) -> u8 {
        let m = self.depth.min(other.depth);
        if m == 0 {
            return 0;
        }
        let a = self.word >> (self.depth - m);
        let b = other.word >> (other.depth - m);
        let diff = a ^ b;
        if diff == 0 {
            m
        } else {
            m - (64 - diff.leading_zeros()) as u8
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Point {
    Line(f64),
    Plane(f64, f64),
    Tree(TreePoint),
    /// Point on the spiral ray at angle `2π·num/den`, at Euclidean radius `radius`.
    Ray { num: u32, den: u32, radius: f64 },
    /// Point `(x, row)` of the segment stack.
    Row { x: f64, row: u32 },
}

impl Point {
    pub fn line(&self) -> Option<f64> {
        match self {
            Point::Line(x) => Some(*x),
            _ => None,
        }
    }

    pub fn tree(&self) -> Option<&TreePoint> {
        match self {
            Point::Tree(t) => Some(t),
            _ => None,
        }
    }

    /// Deterministic total order used for tie-breaks.
    pub fn order_key(&self) -> (u8, f64, f64) {
        match *self {
            Point::Line(x) => (0, x, 0.0),
            Point::Plane(x, y) => (1, x, y),
            Point::Tree(t) => (2, t.depth as f64 * 1e20 + t.word as f64, t.offset),
            Point::Ray { num, den, radius } => (3, num as f64 / den as f64, radius),
            Point::Row { x, row } => (4, row as f64, x),
        }
    }
}
