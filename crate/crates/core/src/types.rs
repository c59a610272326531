//! Type layouts and the classification predicates over named locations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::loc::{AccessPath, NodeId, Root, Segment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AggId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AggKind {
    Struct,
    Union,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    /// `int`, `char` and other non-pointer scalars.
    Scalar(String),
    Pointer(alloc::boxed::Box<Ty>),
    Agg(AggId),
    Array(alloc::boxed::Box<Ty>, u64),
}

impl Ty {
    pub fn int() -> Ty {
        Ty::Scalar("int".into())
    }

    pub fn ptr(to: Ty) -> Ty {
        Ty::Pointer(alloc::boxed::Box::new(to))
    }

    pub fn array(elem: Ty, extent: u64) -> Ty {
        Ty::Array(alloc::boxed::Box::new(elem), extent)
    }

    pub fn is_pointer(&self) -> bool {
        matches!(self, Ty::Pointer(_))
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Ty::Scalar(_))
    }

    pub fn pointee(&self) -> Option<&Ty> {
        match self {
            Ty::Pointer(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDef {
    pub name: String,
    pub ty: Ty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Aggregate {
    /// `None` for anonymous structs and unions.
    pub tag: Option<String>,
    pub kind: AggKind,
    pub fields: Vec<FieldDef>,
}

impl Aggregate {
    pub fn field(&self, name: &str) -> Option<&FieldDef> {
        self.fields.iter().find(|f| f.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LocError {
    #[error("unknown location type for `{0}`")]
    UnknownType(AccessPath),
}

/// Aggregate layouts plus the types of every root: declared variables and
/// allocation sites.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeTable {
    aggregates: Vec<Aggregate>,
    vars: BTreeMap<String, Ty>,
    heap: BTreeMap<NodeId, Ty>,
}

impl TypeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_aggregate(&mut self, agg: Aggregate) -> AggId {
        self.aggregates.push(agg);
        AggId(self.aggregates.len() - 1)
    }

    /// Fills in the fields of an aggregate that was registered before its
    /// body was known (self-referential structs).
    pub fn define_aggregate(&mut self, id: AggId, fields: Vec<FieldDef>) {
        self.aggregates[id.0].fields = fields;
    }

    pub fn aggregate(&self, id: AggId) -> &Aggregate {
        &self.aggregates[id.0]
    }

    pub fn aggregates(&self) -> impl Iterator<Item = (AggId, &Aggregate)> {
        self.aggregates.iter().enumerate().map(|(i, a)| (AggId(i), a))
    }

    pub fn declare_var(&mut self, name: impl Into<String>, ty: Ty) {
        self.vars.insert(name.into(), ty);
    }

    pub fn var(&self, name: &str) -> Option<&Ty> {
        self.vars.get(name)
    }

    pub fn vars(&self) -> impl Iterator<Item = (&String, &Ty)> {
        self.vars.iter()
    }

    pub fn declare_heap_site(&mut self, node: NodeId, ty: Ty) {
        self.heap.insert(node, ty);
    }

    pub fn heap_sites(&self) -> impl Iterator<Item = (&NodeId, &Ty)> {
        self.heap.iter()
    }

    pub fn root_ty(&self, root: &Root) -> Option<&Ty> {
        match root {
            Root::Var(name) => self.vars.get(name),
            Root::HeapSite(node) => self.heap.get(node),
        }
    }

    /// Type of the cell reached by following `segments` from `base`.
    pub fn project<'a>(&'a self, base: &'a Ty, segments: &[Segment]) -> Option<&'a Ty> {
        let mut ty = base;
        for seg in segments {
            ty = match (seg, ty) {
                (Segment::Field(f), Ty::Agg(id)) if self.aggregate(*id).kind == AggKind::Struct => {
                    &self.aggregate(*id).field(f)?.ty
                }
                (Segment::Offset(_) | Segment::BottomOffset, Ty::Array(elem, _)) => elem,
                _ => return None,
            };
        }
        Some(ty)
    }

    pub fn path_ty(&self, path: &AccessPath) -> Result<&Ty, LocError> {
        self.root_ty(&path.root)
            .and_then(|root| self.project(root, &path.segments))
            .ok_or_else(|| LocError::UnknownType(path.clone()))
    }

    pub fn is_union_ty(&self, ty: &Ty) -> bool {
        matches!(ty, Ty::Agg(id) if self.aggregate(*id).kind == AggKind::Union)
    }

    /// Whether a value of this type stores a pointer somewhere inside it.
    pub fn contains_pointer(&self, ty: &Ty) -> bool {
        match ty {
            Ty::Pointer(_) => true,
            Ty::Scalar(_) => false,
            Ty::Array(elem, _) => self.contains_pointer(elem),
            Ty::Agg(id) => self
                .aggregate(*id)
                .fields
                .iter()
                .any(|f| self.contains_pointer(&f.ty)),
        }
    }

    /// Membership in the source set: pointer-typed cells, allocation-site
    /// roots, and collapsed unions that hold a pointer.
    pub fn is_pointer(&self, path: &AccessPath) -> Result<bool, LocError> {
        if path.is_heap() && path.segments.is_empty() {
            return Ok(true);
        }
        let ty = self.path_ty(path)?;
        Ok(ty.is_pointer() || (self.is_union_ty(ty) && self.contains_pointer(ty)))
    }

    /// Like [`Self::is_pointer`] but also admits aggregates that contain
    /// pointers: reading such a location reads pointer contents.
    pub fn may_hold_pointer(&self, path: &AccessPath) -> bool {
        if path.is_heap() && path.segments.is_empty() {
            return true;
        }
        self.path_ty(path)
            .map(|ty| self.contains_pointer(ty))
            .unwrap_or(false)
    }

    pub fn is_union(&self, path: &AccessPath) -> Result<bool, LocError> {
        self.path_ty(path).map(|ty| self.is_union_ty(ty))
    }

    /// Locations that can never be strongly updated: heap cells, names with a
    /// `⊥` offset, and unions. Ill-typed names are treated as approximate.
    pub fn is_approx(&self, path: &AccessPath) -> bool {
        path.is_heap() || path.has_bottom() || self.is_union(path).unwrap_or(true)
    }

    /// `σ.seg`, except that a union absorbs the segment and an offset outside
    /// the array's extent becomes `⊥`. A typed root whose path no longer
    /// type-checks (reached through a union pun) also absorbs the segment, so
    /// names stay finite.
    pub fn extend(&self, path: &AccessPath, seg: Segment) -> AccessPath {
        let Some(root) = self.root_ty(&path.root) else {
            return path.with(seg);
        };
        match (self.project(root, &path.segments), seg) {
            (None, _) => path.clone(),
            (Some(ty), _) if self.is_union_ty(ty) => path.clone(),
            (Some(Ty::Array(_, n)), Segment::Offset(k)) if k < 0 || k as u64 >= *n => {
                path.with(Segment::BottomOffset)
            }
            (_, seg) => path.with(seg),
        }
    }

    /// Pointer fields (`pF`) and non-pointer fields (`npF`) of all aggregates.
    pub fn classify_fields(&self) -> (BTreeSet<String>, BTreeSet<String>) {
        let mut pf = BTreeSet::new();
        let mut npf = BTreeSet::new();
        for agg in &self.aggregates {
            for f in &agg.fields {
                if f.ty.is_pointer() {
                    pf.insert(f.name.clone());
                } else {
                    npf.insert(f.name.clone());
                }
            }
        }
        (pf, npf)
    }

    /// Every pointer location of the program, one name per shape with `⊥`
    /// for each array dimension. Each name overlaps all of its concrete
    /// element names, so the set stands in for "all of S" in liveness sets.
    pub fn pointer_universe(&self) -> BTreeSet<AccessPath> {
        let mut out = BTreeSet::new();
        for (name, ty) in &self.vars {
            self.collect_pointers(AccessPath::var(name.clone()), ty, &mut out);
        }
        for (node, ty) in &self.heap {
            let root = AccessPath::heap(*node);
            out.insert(root.clone());
            self.collect_pointers(root, ty, &mut out);
        }
        out
    }

    /// Pointer locations stored in the cell `path`, itself included, with
    /// `⊥` for array dimensions below it.
    pub fn pointers_within(&self, path: &AccessPath) -> BTreeSet<AccessPath> {
        let mut out = BTreeSet::new();
        if path.is_heap() && path.segments.is_empty() {
            out.insert(path.clone());
        }
        if let Ok(ty) = self.path_ty(path) {
            self.collect_pointers(path.clone(), ty, &mut out);
        }
        out
    }

    /// Count of all generalised locations (pointees included), used to bound
    /// fixpoint iteration.
    pub fn location_count(&self) -> usize {
        let roots = self.vars.values().chain(self.heap.values());
        roots.map(|ty| self.count_locations(ty)).sum::<usize>() + self.heap.len()
    }

    fn count_locations(&self, ty: &Ty) -> usize {
        1 + match ty {
            Ty::Array(elem, _) => self.count_locations(elem),
            Ty::Agg(id) if self.aggregate(*id).kind == AggKind::Struct => self
                .aggregate(*id)
                .fields
                .iter()
                .map(|f| self.count_locations(&f.ty))
                .sum(),
            _ => 0,
        }
    }

    fn collect_pointers(&self, path: AccessPath, ty: &Ty, out: &mut BTreeSet<AccessPath>) {
        match ty {
            Ty::Pointer(_) => {
                out.insert(path);
            }
            Ty::Scalar(_) => {}
            Ty::Array(elem, _) => self.collect_pointers(path.bottom(), elem, out),
            Ty::Agg(id) => {
                let agg = self.aggregate(*id);
                match agg.kind {
                    AggKind::Union => {
                        if self.contains_pointer(ty) {
                            out.insert(path);
                        }
                    }
                    AggKind::Struct => {
                        for f in &agg.fields {
                            self.collect_pointers(path.field(&f.name), &f.ty, out);
                        }
                    }
                }
            }
        }
    }

    pub fn display_ty<'a>(&'a self, ty: &'a Ty) -> DisplayTy<'a> {
        DisplayTy { table: self, ty }
    }
}

pub struct DisplayTy<'a> {
    table: &'a TypeTable,
    ty: &'a Ty,
}

impl fmt::Display for DisplayTy<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ty {
            Ty::Scalar(name) => f.write_str(name),
            Ty::Pointer(inner) => write!(f, "{}*", self.table.display_ty(inner)),
            Ty::Array(elem, n) => write!(f, "{}[{n}]", self.table.display_ty(elem)),
            Ty::Agg(id) => {
                let agg = self.table.aggregate(*id);
                let kw = match agg.kind {
                    AggKind::Struct => "struct",
                    AggKind::Union => "union",
                };
                match &agg.tag {
                    Some(tag) => write!(f, "{kw} {tag}"),
                    None => write!(f, "{kw} <anon#{}>", id.0),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// The declarations of the running example:
    /// `struct B { struct B *f; } b; struct A { struct B g; }; sA *a; sB *x, *y;`
    fn running() -> TypeTable {
        let mut t = TypeTable::new();
        let b = t.add_aggregate(Aggregate {
            tag: Some("B".into()),
            kind: AggKind::Struct,
            fields: vec![],
        });
        t.define_aggregate(
            b,
            vec![FieldDef {
                name: "f".into(),
                ty: Ty::ptr(Ty::Agg(b)),
            }],
        );
        let a = t.add_aggregate(Aggregate {
            tag: Some("A".into()),
            kind: AggKind::Struct,
            fields: vec![FieldDef {
                name: "g".into(),
                ty: Ty::Agg(b),
            }],
        });
        t.declare_var("a", Ty::ptr(Ty::Agg(a)));
        t.declare_var("x", Ty::ptr(Ty::Agg(b)));
        t.declare_var("y", Ty::ptr(Ty::Agg(b)));
        t.declare_var("b", Ty::Agg(b));
        t.declare_heap_site(NodeId(1), Ty::Agg(a));
        t
    }

    fn p(s: &str) -> AccessPath {
        s.parse().unwrap()
    }

    #[test]
    fn pointer_classification() {
        let t = running();
        assert!(t.is_pointer(&p("x")).unwrap());
        assert!(t.is_pointer(&p("b.f")).unwrap());
        assert!(!t.is_pointer(&p("o1.g")).unwrap());
        assert!(t.is_pointer(&p("o1.g.f")).unwrap());
        assert!(t.is_pointer(&p("o1")).unwrap());
        assert_eq!(
            t.is_pointer(&p("b.zz")),
            Err(LocError::UnknownType(p("b.zz")))
        );
        assert!(t.may_hold_pointer(&p("b")));
        assert!(t.may_hold_pointer(&p("o1.g")));
    }

    #[test]
    fn approx_predicate() {
        let t = running();
        assert!(t.is_approx(&p("o1.g.f")));
        assert!(!t.is_approx(&p("x")));
        assert!(!t.is_approx(&p("b.f")));
        let (pf, npf) = t.classify_fields();
        assert!(pf.contains("f") && npf.contains("g"));
    }

    #[test]
    fn universe_covers_pointer_shapes() {
        let t = running();
        let u: Vec<_> = t.pointer_universe().iter().map(|p| p.render()).collect();
        assert_eq!(u, ["a", "b.f", "x", "y", "o1", "o1.g.f"]);
    }
}
