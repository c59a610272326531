//! Named locations.
//!
//! Every memory cell the analysis talks about is named by an [`AccessPath`]:
//! a root (a declared variable or an allocation site) followed by field names
//! and unscaled element offsets, e.g. `a.7.3.f.g.5.h` or `o1.g.f`. Offsets that
//! cannot be computed at compile time are written `⊥` and stand for any element
//! of that dimension when facts are generated, and for no element when facts
//! are killed.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Label of a CFG node. Statements are numbered from 1 in source order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Root {
    Var(String),
    /// The abstract object allocated by the `malloc` at this node.
    HeapSite(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Segment {
    Field(String),
    /// Unscaled element index.
    Offset(i64),
    /// An element index that is not a compile-time constant.
    BottomOffset,
}

impl Segment {
    pub fn is_offset(&self) -> bool {
        matches!(self, Segment::Offset(_) | Segment::BottomOffset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccessPath {
    pub root: Root,
    pub segments: Vec<Segment>,
}

impl AccessPath {
    pub fn var(name: impl Into<String>) -> Self {
        AccessPath {
            root: Root::Var(name.into()),
            segments: Vec::new(),
        }
    }

    /// The name of the heap object allocated at `node`.
    pub fn heap(node: NodeId) -> Self {
        AccessPath {
            root: Root::HeapSite(node),
            segments: Vec::new(),
        }
    }

    pub fn with(&self, segment: Segment) -> Self {
        let mut next = self.clone();
        next.segments.push(segment);
        next
    }

    pub fn field(&self, name: &str) -> Self {
        self.with(Segment::Field(name.into()))
    }

    pub fn offset(&self, index: i64) -> Self {
        self.with(Segment::Offset(index))
    }

    pub fn bottom(&self) -> Self {
        self.with(Segment::BottomOffset)
    }

    pub fn is_heap(&self) -> bool {
        matches!(self.root, Root::HeapSite(_))
    }

    pub fn has_bottom(&self) -> bool {
        self.segments.contains(&Segment::BottomOffset)
    }

    pub fn last(&self) -> Option<&Segment> {
        self.segments.last()
    }

    /// Whether two names may denote the same cell.
    ///
    /// Roots must agree and the segment sequences must have equal length; a `⊥`
    /// offset matches any offset in the same position.
    pub fn overlaps(&self, other: &AccessPath) -> bool {
        self.root == other.root
            && self.segments.len() == other.segments.len()
            && self
                .segments
                .iter()
                .zip(&other.segments)
                .all(|pair| match pair {
                    (Segment::Field(a), Segment::Field(b)) => a == b,
                    (Segment::BottomOffset, s) | (s, Segment::BottomOffset) => s.is_offset(),
                    (Segment::Offset(a), Segment::Offset(b)) => a == b,
                    _ => false,
                })
    }

    /// Canonical rendering, also the sort key of every report.
    pub fn render(&self) -> String {
        alloc::format!("{self}")
    }
}

pub fn is_heap(path: &AccessPath) -> bool {
    path.is_heap()
}

pub fn overlaps(p: &AccessPath, q: &AccessPath) -> bool {
    p.overlaps(q)
}

pub fn get_heap_loc(node: NodeId) -> AccessPath {
    AccessPath::heap(node)
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Root::Var(name) => f.write_str(name),
            Root::HeapSite(node) => write!(f, "o{node}"),
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Field(name) => f.write_str(name),
            Segment::Offset(k) => write!(f, "{k}"),
            Segment::BottomOffset => f.write_str("⊥"),
        }
    }
}

impl fmt::Display for AccessPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)?;
        for seg in &self.segments {
            write!(f, ".{seg}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("malformed access path `{0}`")]
pub struct ParsePathError(pub String);

fn heap_label(text: &str) -> Option<u32> {
    let digits = text.strip_prefix('o')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Whether an identifier would be read back as a heap-site name.
pub fn looks_like_heap_name(ident: &str) -> bool {
    heap_label(ident).is_some()
}

impl FromStr for AccessPath {
    type Err = ParsePathError;

    /// Parses the canonical rendering; `bot` is accepted for `⊥`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePathError(s.into());
        let mut parts = s.split('.');
        let head = parts.next().filter(|h| !h.is_empty()).ok_or_else(err)?;
        let root = match heap_label(head) {
            Some(label) => Root::HeapSite(NodeId(label)),
            None => Root::Var(head.into()),
        };
        let mut segments = Vec::new();
        for part in parts {
            let seg = match part {
                "" => return Err(err()),
                "⊥" | "bot" => Segment::BottomOffset,
                _ if part.starts_with(|c: char| c.is_ascii_digit() || c == '-') => {
                    Segment::Offset(part.parse().map_err(|_| err())?)
                }
                _ => Segment::Field(part.into()),
            };
            segments.push(seg);
        }
        Ok(AccessPath { root, segments })
    }
}

/// A pointee: a named location or `?` (no information).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Loc(AccessPath),
    Unknown,
}

impl Target {
    pub fn loc(&self) -> Option<&AccessPath> {
        match self {
            Target::Loc(p) => Some(p),
            Target::Unknown => None,
        }
    }
}

impl From<AccessPath> for Target {
    fn from(p: AccessPath) -> Self {
        Target::Loc(p)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Loc(p) => write!(f, "{p}"),
            Target::Unknown => f.write_str("?"),
        }
    }
}

impl FromStr for Target {
    type Err = ParsePathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "?" {
            Ok(Target::Unknown)
        } else {
            s.parse().map(Target::Loc)
        }
    }
}
