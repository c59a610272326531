//! Per-statement extractor functions: Def, Kill, Ref and Pointee.

use alloc::collections::BTreeSet;

use crate::eval::{Eval, Must};
use crate::ir::{PointerExpr, Statement};
use crate::loc::{AccessPath, NodeId};
use crate::relation::{PathSet, PointsTo, TargetSet};
use crate::types::TypeTable;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractorResult {
    pub def: PathSet,
    /// `All` kills every non-approximate location.
    pub kill: PathSet,
    pub refs: PathSet,
    pub pointee: TargetSet,
}

/// Whether `def` shares a location with `live` (overlap reading).
pub fn def_is_live(def: &PathSet, live: &BTreeSet<AccessPath>) -> bool {
    match def {
        PathSet::All => !live.is_empty(),
        PathSet::Paths(ps) => ps
            .iter()
            .any(|d| live.iter().any(|l| d.overlaps(l))),
    }
}

/// Keeps pointer locations; locations holding pointers inside them (structs,
/// arrays) are replaced by the pointers they contain.
fn pointer_cells(set: PathSet, types: &TypeTable) -> PathSet {
    match set {
        PathSet::All => PathSet::All,
        PathSet::Paths(ps) => {
            let mut out = BTreeSet::new();
            for p in ps {
                if types.is_pointer(&p).unwrap_or(false) && !p.is_heap() {
                    out.insert(p);
                } else if types.may_hold_pointer(&p) {
                    out.extend(types.pointers_within(&p));
                }
            }
            PathSet::Paths(out)
        }
    }
}

fn only_pointers(mut set: PathSet, types: &TypeTable) -> PathSet {
    set.retain(|p| types.is_pointer(p).unwrap_or(false));
    set
}

fn use_refs<'a>(
    exprs: impl IntoIterator<Item = &'a PointerExpr>,
    eval: &Eval<'_, PointsTo>,
) -> PathSet {
    let mut out = PathSet::empty();
    for e in exprs {
        out.extend(eval.refs(e));
    }
    out
}

/// Extractor values of the statement at `node`, given its Ain and Lout.
pub fn extract(
    stmt: Option<&Statement>,
    node: NodeId,
    ain: &PointsTo,
    lout: &BTreeSet<AccessPath>,
    types: &TypeTable,
) -> ExtractorResult {
    let eval = Eval::new(types, ain).at(node);
    match stmt {
        Some(Statement::PtrAssign { lhs, rhs }) => {
            let def = only_pointers(eval.lval(lhs), types);
            let must = Must::over(ain, types);
            let mut kill = only_pointers(Eval::new(types, &must).at(node).lval(lhs), types);
            kill.retain(|p| !types.is_approx(p));
            let mut refs = eval.deref(lhs);
            if def_is_live(&def, lout) {
                refs.extend(eval.refs(rhs));
            }
            ExtractorResult {
                def,
                kill,
                refs: pointer_cells(refs, types),
                pointee: eval.rval(rhs),
            }
        }
        Some(Statement::ScalarAssign { lhs, .. }) => ExtractorResult {
            refs: pointer_cells(use_refs([lhs], &eval), types),
            ..Default::default()
        },
        Some(Statement::Use(exprs)) => ExtractorResult {
            refs: pointer_cells(use_refs(exprs, &eval), types),
            ..Default::default()
        },
        Some(Statement::Other) | None => ExtractorResult::default(),
    }
}
