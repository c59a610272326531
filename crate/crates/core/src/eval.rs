//! l-values, r-values, and the pointers read while evaluating a pointer
//! expression in a points-to environment.

use crate::ir::{IndexExpr, PointerExpr};
use crate::loc::{AccessPath, NodeId, Segment, Target};
use crate::relation::{PathSet, PointsTo, PointsToView, TargetSet};
use crate::types::TypeTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstValue {
    Int(i64),
    /// Not a compile-time constant.
    Bottom,
}

impl ConstValue {
    pub fn segment(self) -> Segment {
        match self {
            ConstValue::Int(k) => Segment::Offset(k),
            ConstValue::Bottom => Segment::BottomOffset,
        }
    }
}

/// Folds literals; any variable (or overflow) gives `Bottom`.
pub fn const_eval(e: &IndexExpr) -> ConstValue {
    use ConstValue::*;
    let bin = |a: &IndexExpr, b: &IndexExpr, op: fn(i64, i64) -> Option<i64>| {
        match (const_eval(a), const_eval(b)) {
            (Int(x), Int(y)) => op(x, y).map_or(Bottom, Int),
            _ => Bottom,
        }
    };
    match e {
        IndexExpr::Lit(k) => Int(*k),
        IndexExpr::Var(_) => Bottom,
        IndexExpr::Neg(a) => match const_eval(a) {
            Int(x) => x.checked_neg().map_or(Bottom, Int),
            Bottom => Bottom,
        },
        IndexExpr::Add(a, b) => bin(a, b, i64::checked_add),
        IndexExpr::Sub(a, b) => bin(a, b, i64::checked_sub),
        IndexExpr::Mul(a, b) => bin(a, b, i64::checked_mul),
    }
}

/// Evaluation context: the type table, the points-to environment, and the
/// node being evaluated (which names `malloc` results).
pub struct Eval<'a, V: ?Sized> {
    pub types: &'a TypeTable,
    pub env: &'a V,
    pub node: Option<NodeId>,
}

impl<'a, V: PointsToView + ?Sized> Eval<'a, V> {
    pub fn new(types: &'a TypeTable, env: &'a V) -> Self {
        Eval {
            types,
            env,
            node: None,
        }
    }

    pub fn at(mut self, node: NodeId) -> Self {
        self.node = Some(node);
        self
    }

    /// Locations `α` may denote. `?` never appears.
    pub fn lval(&self, expr: &PointerExpr) -> PathSet {
        let t = self.types;
        match expr {
            PointerExpr::Var(x) => PathSet::single(AccessPath::var(x.clone())),
            PointerExpr::Field(b, f) => self
                .lval(b)
                .map(|s| t.extend(s, Segment::Field(f.clone()))),
            PointerExpr::Arrow(b, f) => self
                .rval(b)
                .known()
                .map(|s| t.extend(s, Segment::Field(f.clone()))),
            PointerExpr::Deref(b) => self.rval(b).known(),
            PointerExpr::Index(b, e) => {
                let seg = const_eval(e).segment();
                self.lval(b).map(|s| t.extend(s, seg.clone()))
            }
            PointerExpr::Malloc { .. }
            | PointerExpr::AddrOf(_)
            | PointerExpr::AddrOfPlus(..)
            | PointerExpr::Plus(..) => PathSet::empty(),
        }
    }

    /// Values `α` may evaluate to.
    pub fn rval(&self, expr: &PointerExpr) -> TargetSet {
        match expr {
            PointerExpr::AddrOf(b) => self.lval(b).into(),
            PointerExpr::Malloc { .. } => match self.node {
                Some(n) => TargetSet::single(Target::Loc(AccessPath::heap(n))),
                None => {
                    debug_assert!(false, "malloc evaluated outside an allocation site");
                    TargetSet::empty()
                }
            },
            PointerExpr::Plus(b, e) => shift(self.rval(b), const_eval(e), self.types),
            PointerExpr::AddrOfPlus(..) => TargetSet::All,
            _ => self.image(&self.lval(expr)),
        }
    }

    /// Pointers read to reach the locations in `lval(α)`.
    pub fn deref(&self, expr: &PointerExpr) -> PathSet {
        match expr {
            PointerExpr::Field(b, _) | PointerExpr::Index(b, _) | PointerExpr::Plus(b, _) => {
                self.deref(b)
            }
            PointerExpr::Arrow(b, _) | PointerExpr::Deref(b) => {
                let mut out = self.lval(b).union(self.deref(b));
                // The base has no l-value; its pointee comes from the pointers
                // its own evaluation reads.
                if matches!(
                    **b,
                    PointerExpr::Plus(..) | PointerExpr::AddrOf(_) | PointerExpr::AddrOfPlus(..)
                ) {
                    out.extend(self.refs(b));
                }
                out
            }
            _ => PathSet::empty(),
        }
    }

    /// Pointers read to compute `rval(α)`.
    pub fn refs(&self, expr: &PointerExpr) -> PathSet {
        match expr {
            PointerExpr::AddrOf(b) | PointerExpr::AddrOfPlus(b, _) => self.deref(b),
            PointerExpr::Plus(b, _) => self.refs(b),
            _ => {
                let mut out = self.deref(expr);
                out.extend(self.sources(self.lval(expr)));
                out
            }
        }
    }

    /// `L ∩ S`, where aggregates holding pointers count as sources.
    fn sources(&self, mut locs: PathSet) -> PathSet {
        locs.retain(|p| self.types.may_hold_pointer(p));
        locs
    }

    /// `A(L ∩ S)`.
    fn image(&self, locs: &PathSet) -> TargetSet {
        match locs {
            PathSet::All => TargetSet::All,
            PathSet::Paths(ps) => {
                let mut out = TargetSet::empty();
                for p in ps.iter().filter(|p| self.types.may_hold_pointer(p)) {
                    out.extend(self.env.image(p));
                }
                out
            }
        }
    }
}

/// `rval(β + e)` from `rval(β)`: every value must end in an element offset,
/// otherwise the result is `T`.
fn shift(base: TargetSet, by: ConstValue, types: &TypeTable) -> TargetSet {
    let TargetSet::Targets(values) = base else {
        return TargetSet::All;
    };
    let mut out = TargetSet::empty();
    for v in values {
        let Target::Loc(path) = v else {
            return TargetSet::All;
        };
        let next = match (path.segments.last(), by) {
            (Some(Segment::Offset(c)), ConstValue::Int(k)) => {
                c.checked_add(k).map_or(Segment::BottomOffset, Segment::Offset)
            }
            (Some(Segment::Offset(_) | Segment::BottomOffset), _) => Segment::BottomOffset,
            _ => return TargetSet::All,
        };
        let mut prefix = path;
        prefix.segments.pop();
        out.insert(Target::Loc(types.extend(&prefix, next)));
    }
    out
}

pub fn lval(expr: &PointerExpr, a: &PointsTo, types: &TypeTable) -> PathSet {
    Eval::new(types, a).lval(expr)
}

pub fn rval(expr: &PointerExpr, a: &PointsTo, types: &TypeTable) -> TargetSet {
    Eval::new(types, a).rval(expr)
}

pub fn deref(expr: &PointerExpr, a: &PointsTo, types: &TypeTable) -> PathSet {
    Eval::new(types, a).deref(expr)
}

pub fn refs(expr: &PointerExpr, a: &PointsTo, types: &TypeTable) -> PathSet {
    Eval::new(types, a).refs(expr)
}

/// The must version of a points-to relation, kept symbolic: a source with no
/// information relates to all of `T`.
pub struct Must<'a, V: ?Sized> {
    base: &'a V,
    types: &'a TypeTable,
}

pub fn must<'a>(a: &'a PointsTo, types: &'a TypeTable) -> Must<'a, PointsTo> {
    Must { base: a, types }
}

impl<'a, V: PointsToView + ?Sized> Must<'a, V> {
    pub fn over(base: &'a V, types: &'a TypeTable) -> Self {
        Must { base, types }
    }
}

impl<V: PointsToView + ?Sized> PointsToView for Must<'_, V> {
    fn image(&self, p: &AccessPath) -> TargetSet {
        let types = self.types;
        if types.is_approx(p) || !types.is_pointer(p).unwrap_or(false) {
            return TargetSet::empty();
        }
        let TargetSet::Targets(known) = self.base.image(p) else {
            return TargetSet::empty();
        };
        if known.iter().all(|t| *t == Target::Unknown) {
            return TargetSet::All;
        }
        match known.first() {
            Some(Target::Loc(q)) if known.len() == 1 && !types.is_approx(q) => {
                TargetSet::single(Target::Loc(q.clone()))
            }
            _ => TargetSet::empty(),
        }
    }
}

impl Must<'_, PointsTo> {
    /// Rows for the sources mentioned in the underlying relation. Sources it
    /// does not mention relate to all of `T` unless they are approximate.
    pub fn explicit(&self) -> PointsTo {
        let mut out = PointsTo::new();
        for src in self.base.sources() {
            out.insert_all(src.clone(), &self.image(src));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::IndexExpr as E;
    use alloc::string::ToString;

    #[test]
    fn const_folding() {
        let lit = E::Lit;
        assert_eq!(const_eval(&E::plus(lit(2), lit(3))), ConstValue::Int(5));
        assert_eq!(const_eval(&E::Var("n".into())), ConstValue::Bottom);
        assert_eq!(
            const_eval(&E::Mul(alloc::boxed::Box::new(lit(7)), alloc::boxed::Box::new(lit(0)))),
            ConstValue::Int(0)
        );
        assert_eq!(const_eval(&E::plus(lit(i64::MAX), lit(1))), ConstValue::Bottom);
        assert_eq!(const_eval(&E::negate(E::minus(lit(1), lit(4)))), ConstValue::Int(3));
    }

    fn p(s: &str) -> AccessPath {
        s.parse().unwrap()
    }

    #[test]
    fn shift_rule() {
        let t = &TypeTable::new();
        let q3 = TargetSet::single(Target::Loc(p("q.3")));
        assert_eq!(shift(q3.clone(), ConstValue::Int(5), t), TargetSet::single(Target::Loc(p("q.8"))));
        assert_eq!(shift(q3, ConstValue::Bottom, t), TargetSet::single(Target::Loc(p("q.⊥"))));
        assert!(shift(TargetSet::single(Target::Loc(p("c"))), ConstValue::Int(1), t).is_all());
        assert!(shift(TargetSet::unknown(), ConstValue::Int(1), t).is_all());
        assert!(shift(TargetSet::empty(), ConstValue::Int(1), t).is_empty());

        let mut typed = TypeTable::new();
        typed.declare_var("q", crate::types::Ty::array(crate::types::Ty::int(), 10));
        let q8 = TargetSet::single(Target::Loc(p("q.8")));
        assert_eq!(shift(q8.clone(), ConstValue::Int(1), &typed).to_string(), "{q.9}");
        assert_eq!(shift(q8.clone(), ConstValue::Int(2), &typed).to_string(), "{q.⊥}");
        assert_eq!(shift(q8, ConstValue::Int(-9), &typed).to_string(), "{q.⊥}");
    }
}
