//! Location sets, pointee sets, and points-to relations.
//!
//! The universal sets `T` (all pointees) and `T−{?}` (all named locations) are
//! kept symbolic and never enumerated.

use alloc::collections::btree_map::{self, BTreeMap};
use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::loc::{AccessPath, Root, Segment, Target};

/// A set of named locations; `All` is `T−{?}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PathSet {
    Paths(BTreeSet<AccessPath>),
    All,
}

impl Default for PathSet {
    fn default() -> Self {
        PathSet::empty()
    }
}

impl PathSet {
    pub fn empty() -> Self {
        PathSet::Paths(BTreeSet::new())
    }

    pub fn single(p: AccessPath) -> Self {
        PathSet::Paths(BTreeSet::from([p]))
    }

    pub fn is_all(&self) -> bool {
        matches!(self, PathSet::All)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, PathSet::Paths(s) if s.is_empty())
    }

    pub fn paths(&self) -> Option<&BTreeSet<AccessPath>> {
        match self {
            PathSet::Paths(s) => Some(s),
            PathSet::All => None,
        }
    }

    pub fn union(mut self, other: PathSet) -> PathSet {
        self.extend(other);
        self
    }

    pub fn extend(&mut self, other: PathSet) {
        match (&mut *self, other) {
            (PathSet::All, _) => {}
            (_, PathSet::All) => *self = PathSet::All,
            (PathSet::Paths(a), PathSet::Paths(b)) => a.extend(b),
        }
    }

    /// Applies `f` elementwise; `All` maps to `All`.
    pub fn map(&self, mut f: impl FnMut(&AccessPath) -> AccessPath) -> PathSet {
        match self {
            PathSet::All => PathSet::All,
            PathSet::Paths(s) => PathSet::Paths(s.iter().map(&mut f).collect()),
        }
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&AccessPath) -> bool) {
        if let PathSet::Paths(s) = self {
            s.retain(|p| keep(p));
        }
    }

    /// Structural membership; `All` contains everything.
    pub fn contains(&self, p: &AccessPath) -> bool {
        match self {
            PathSet::All => true,
            PathSet::Paths(s) => s.contains(p),
        }
    }

    pub fn is_subset(&self, other: &PathSet) -> bool {
        match (self, other) {
            (_, PathSet::All) => true,
            (PathSet::All, PathSet::Paths(_)) => false,
            (PathSet::Paths(a), PathSet::Paths(b)) => a.is_subset(b),
        }
    }
}

impl FromIterator<AccessPath> for PathSet {
    fn from_iter<I: IntoIterator<Item = AccessPath>>(iter: I) -> Self {
        PathSet::Paths(iter.into_iter().collect())
    }
}

/// A set of pointees; `All` is `T` (which includes `?`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSet {
    Targets(BTreeSet<Target>),
    All,
}

impl Default for TargetSet {
    fn default() -> Self {
        TargetSet::empty()
    }
}

impl TargetSet {
    pub fn empty() -> Self {
        TargetSet::Targets(BTreeSet::new())
    }

    pub fn single(t: Target) -> Self {
        TargetSet::Targets(BTreeSet::from([t]))
    }

    pub fn unknown() -> Self {
        TargetSet::single(Target::Unknown)
    }

    pub fn is_all(&self) -> bool {
        matches!(self, TargetSet::All)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, TargetSet::Targets(s) if s.is_empty())
    }

    pub fn targets(&self) -> Option<&BTreeSet<Target>> {
        match self {
            TargetSet::Targets(s) => Some(s),
            TargetSet::All => None,
        }
    }

    pub fn extend(&mut self, other: TargetSet) {
        match (&mut *self, other) {
            (TargetSet::All, _) => {}
            (_, TargetSet::All) => *self = TargetSet::All,
            (TargetSet::Targets(a), TargetSet::Targets(b)) => a.extend(b),
        }
    }

    pub fn insert(&mut self, t: Target) {
        if let TargetSet::Targets(s) = self {
            s.insert(t);
        }
    }

    pub fn contains(&self, t: &Target) -> bool {
        match self {
            TargetSet::All => true,
            TargetSet::Targets(s) => s.contains(t),
        }
    }

    pub fn is_subset(&self, other: &TargetSet) -> bool {
        match (self, other) {
            (_, TargetSet::All) => true,
            (TargetSet::All, TargetSet::Targets(_)) => false,
            (TargetSet::Targets(a), TargetSet::Targets(b)) => a.is_subset(b),
        }
    }

    /// The named locations among the pointees (`σ ≠ ?`).
    pub fn known(&self) -> PathSet {
        match self {
            TargetSet::All => PathSet::All,
            TargetSet::Targets(s) => s.iter().filter_map(|t| t.loc().cloned()).collect(),
        }
    }
}

impl FromIterator<Target> for TargetSet {
    fn from_iter<I: IntoIterator<Item = Target>>(iter: I) -> Self {
        TargetSet::Targets(iter.into_iter().collect())
    }
}

impl From<PathSet> for TargetSet {
    fn from(s: PathSet) -> Self {
        match s {
            PathSet::All => TargetSet::All,
            PathSet::Paths(p) => p.into_iter().map(Target::Loc).collect(),
        }
    }
}

/// Read access to a points-to environment: `A{σ}`.
pub trait PointsToView {
    fn image(&self, src: &AccessPath) -> TargetSet;
}

/// A points-to relation `A ⊆ S × T`, stored as source → pointees. A row whose
/// pointees are [`TargetSet::All`] relates its source to every pointee.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointsTo {
    rows: BTreeMap<AccessPath, TargetSet>,
}

impl PointsTo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, src: AccessPath, tgt: Target) {
        self.rows
            .entry(src)
            .or_default()
            .extend(TargetSet::single(tgt));
    }

    /// Relates `src` to every pointee in `tgts`.
    pub fn insert_all(&mut self, src: AccessPath, tgts: &TargetSet) {
        if tgts.is_empty() {
            return;
        }
        self.rows.entry(src).or_default().extend(tgts.clone());
    }

    pub fn extend(&mut self, other: &PointsTo) {
        for (src, tgts) in &other.rows {
            self.insert_all(src.clone(), tgts);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of explicit pairs; a universal row counts once.
    pub fn len(&self) -> usize {
        self.rows
            .values()
            .map(|t| t.targets().map_or(1, |s| s.len()))
            .sum()
    }

    pub fn rows(&self) -> btree_map::Iter<'_, AccessPath, TargetSet> {
        self.rows.iter()
    }

    pub fn sources(&self) -> impl Iterator<Item = &AccessPath> {
        self.rows.keys()
    }

    /// Pointees of exactly this source (no overlap matching).
    pub fn row(&self, src: &AccessPath) -> Option<&TargetSet> {
        self.rows.get(src)
    }

    pub fn contains(&self, src: &AccessPath, tgt: &Target) -> bool {
        self.rows.get(src).is_some_and(|t| t.contains(tgt))
    }

    pub fn remove_source(&mut self, src: &AccessPath) {
        self.rows.remove(src);
    }

    pub fn remove_pair(&mut self, src: &AccessPath, tgt: &Target) {
        if let Some(TargetSet::Targets(s)) = self.rows.get_mut(src) {
            s.remove(tgt);
            if s.is_empty() {
                self.rows.remove(src);
            }
        }
    }

    pub fn retain_sources(&mut self, mut keep: impl FnMut(&AccessPath) -> bool) {
        self.rows.retain(|src, _| keep(src));
    }

    /// Drops pointees already carried by a more general source (one with `⊥`
    /// where this source has an offset). Images are unchanged.
    pub fn drop_subsumed(&mut self) {
        let mut drop: Vec<(AccessPath, Option<Target>)> = Vec::new();
        for (src, tgts) in &self.rows {
            if !src.segments.iter().any(|s| matches!(s, Segment::Offset(_))) {
                continue;
            }
            let general: Vec<&TargetSet> = self
                .overlapping(src)
                .filter(|(g, _)| *g != src && generalizes(g, src))
                .map(|(_, t)| t)
                .collect();
            if general.iter().any(|t| t.is_all()) {
                drop.push((src.clone(), None));
                continue;
            }
            if let TargetSet::Targets(ts) = tgts {
                for t in ts.iter().filter(|t| general.iter().any(|g| g.contains(t))) {
                    drop.push((src.clone(), Some(t.clone())));
                }
            }
        }
        for (src, tgt) in drop {
            match tgt {
                None => self.remove_source(&src),
                Some(t) => self.remove_pair(&src, &t),
            }
        }
    }

    /// Sources stored under the same root as `path` that overlap it.
    pub fn overlapping<'a>(
        &'a self,
        path: &'a AccessPath,
    ) -> impl Iterator<Item = (&'a AccessPath, &'a TargetSet)> + 'a {
        let lo = AccessPath {
            root: path.root.clone(),
            segments: Vec::new(),
        };
        self.rows
            .range(lo..)
            .take_while(move |(src, _)| src.root == path.root)
            .filter(move |(src, _)| src.overlaps(path))
    }

    /// Whether `(src, tgt)` is covered: some overlapping source relates to a
    /// pointee overlapping `tgt` (or to all of `T`).
    pub fn covers(&self, src: &AccessPath, tgt: &Target) -> bool {
        self.overlapping(src).any(|(_, tgts)| match tgts {
            TargetSet::All => true,
            TargetSet::Targets(s) => s.iter().any(|t| match (t, tgt) {
                (Target::Unknown, Target::Unknown) => true,
                (Target::Loc(a), Target::Loc(b)) => a.overlaps(b),
                _ => false,
            }),
        })
    }

    /// `A ⊆ B` over explicit pairs, universal rows included.
    pub fn is_subset(&self, other: &PointsTo) -> bool {
        self.rows.iter().all(|(src, tgts)| {
            other
                .rows
                .get(src)
                .is_some_and(|theirs| tgts.is_subset(theirs))
        })
    }

    /// Pairs sorted by their canonical rendering.
    pub fn rendered_pairs(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = Vec::new();
        for (src, tgts) in &self.rows {
            match tgts {
                TargetSet::All => out.push((src.render(), "T".into())),
                TargetSet::Targets(s) => {
                    out.extend(s.iter().map(|t| (src.render(), alloc::format!("{t}"))))
                }
            }
        }
        out.sort_by_key(render_pair);
        out
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&AccessPath, &Target)> {
        self.rows.iter().flat_map(|(src, tgts)| {
            tgts.targets()
                .into_iter()
                .flat_map(move |s| s.iter().map(move |t| (src, t)))
        })
    }

    /// Sources with a universal row.
    pub fn universal_sources(&self) -> impl Iterator<Item = &AccessPath> {
        self.rows
            .iter()
            .filter(|(_, t)| t.is_all())
            .map(|(src, _)| src)
    }

    pub fn roots(&self) -> BTreeSet<&Root> {
        self.rows.keys().map(|p| &p.root).collect()
    }
}

fn render_pair((s, t): &(String, String)) -> String {
    alloc::format!("({s},{t})")
}

impl PointsToView for PointsTo {
    /// `A{σ}` with overlap matching on sources, so a stored `(q.⊥, t)` is seen
    /// when reading `q.3`.
    fn image(&self, src: &AccessPath) -> TargetSet {
        let mut out = TargetSet::empty();
        for (_, tgts) in self.overlapping(src) {
            out.extend(tgts.clone());
        }
        out
    }
}

impl FromIterator<(AccessPath, Target)> for PointsTo {
    fn from_iter<I: IntoIterator<Item = (AccessPath, Target)>>(iter: I) -> Self {
        let mut a = PointsTo::new();
        for (s, t) in iter {
            a.insert(s, t);
        }
        a
    }
}

/// `A|_L`: pairs whose source overlaps some element of `live`.
pub fn restrict(a: &PointsTo, live: &BTreeSet<AccessPath>) -> PointsTo {
    let mut out = a.clone();
    out.retain_sources(|src| is_live(src, live));
    out
}

/// `g` equals `p` except that some offsets of `p` are `⊥` in `g`.
fn generalizes(g: &AccessPath, p: &AccessPath) -> bool {
    g.root == p.root
        && g.segments.len() == p.segments.len()
        && g.segments.iter().zip(&p.segments).all(|pair| match pair {
            (Segment::BottomOffset, s) => s.is_offset(),
            (a, b) => a == b,
        })
}

/// Overlap membership in a liveness set.
pub fn is_live(p: &AccessPath, live: &BTreeSet<AccessPath>) -> bool {
    let lo = AccessPath {
        root: p.root.clone(),
        segments: Vec::new(),
    };
    live.range(lo..)
        .take_while(|l| l.root == p.root)
        .any(|l| l.overlaps(p))
}

fn sorted_strings<'a>(items: impl Iterator<Item = String> + 'a) -> Vec<String> {
    let mut v: Vec<String> = items.collect();
    v.sort();
    v
}

/// Element renderings in canonical (string) order.
pub fn rendered_paths(set: &BTreeSet<AccessPath>) -> Vec<String> {
    sorted_strings(set.iter().map(|p| p.render()))
}

impl fmt::Display for PathSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathSet::All => f.write_str("T−{?}"),
            PathSet::Paths(s) => write_set(f, rendered_paths(s)),
        }
    }
}

impl fmt::Display for TargetSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSet::All => f.write_str("T"),
            TargetSet::Targets(s) => write_set(f, sorted_strings(s.iter().map(|t| alloc::format!("{t}")))),
        }
    }
}

impl fmt::Display for PointsTo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, self.rendered_pairs().iter().map(render_pair).collect())
    }
}

/// `{a, b}`, or `∅` when empty.
pub fn write_set(f: &mut fmt::Formatter<'_>, items: Vec<String>) -> fmt::Result {
    if items.is_empty() {
        return f.write_str("∅");
    }
    f.write_str("{")?;
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        f.write_str(item)?;
    }
    f.write_str("}")
}

/// Renders a liveness set the way reports do.
pub struct DisplayLive<'a>(pub &'a BTreeSet<AccessPath>);

impl fmt::Display for DisplayLive<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_set(f, rendered_paths(self.0))
    }
}
