//! The analysed program representation.
//!
//! Pointer expressions follow the grammar
//!
//! ```text
//! α := malloc | &β | β | &β + e
//! β := x | β.f | β->f | *β | β[e] | β + e
//! ```
//!
//! with `&` only at the top of an expression. The single exception is
//! `*(&β + e)` / `(&β + e)->f`, which has no `&`-free spelling and is kept as a
//! dereference of an `AddrOfPlus`.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::types::{AggKind, Ty, TypeTable};

/// Integer expressions used as indices and offsets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IndexExpr {
    Lit(i64),
    Var(String),
    Neg(Box<IndexExpr>),
    Add(Box<IndexExpr>, Box<IndexExpr>),
    Sub(Box<IndexExpr>, Box<IndexExpr>),
    Mul(Box<IndexExpr>, Box<IndexExpr>),
}

impl IndexExpr {
    pub fn plus(a: IndexExpr, b: IndexExpr) -> IndexExpr {
        IndexExpr::Add(Box::new(a), Box::new(b))
    }

    pub fn minus(a: IndexExpr, b: IndexExpr) -> IndexExpr {
        IndexExpr::Sub(Box::new(a), Box::new(b))
    }

    pub fn negate(a: IndexExpr) -> IndexExpr {
        IndexExpr::Neg(Box::new(a))
    }

    fn prec(&self) -> u8 {
        match self {
            IndexExpr::Lit(k) if *k < 0 => 2,
            IndexExpr::Lit(_) | IndexExpr::Var(_) => 3,
            IndexExpr::Neg(_) => 2,
            IndexExpr::Mul(..) => 1,
            IndexExpr::Add(..) | IndexExpr::Sub(..) => 0,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            IndexExpr::Lit(k) => write!(f, "{k}"),
            IndexExpr::Var(v) => f.write_str(v),
            IndexExpr::Neg(a) => {
                f.write_str("-")?;
                a.fmt_at(f, 3)
            }
            IndexExpr::Add(a, b) => {
                a.fmt_at(f, 0)?;
                f.write_str(" + ")?;
                b.fmt_at(f, 1)
            }
            IndexExpr::Sub(a, b) => {
                a.fmt_at(f, 0)?;
                f.write_str(" - ")?;
                b.fmt_at(f, 1)
            }
            IndexExpr::Mul(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" * ")?;
                b.fmt_at(f, 2)
            }
        }
    }
}

impl fmt::Display for IndexExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PointerExpr {
    /// `malloc(sizeof(T))`; the allocated cell has type `ty`.
    Malloc { ty: Ty, spelled: String },
    AddrOf(Box<PointerExpr>),
    AddrOfPlus(Box<PointerExpr>, IndexExpr),
    Var(String),
    Field(Box<PointerExpr>, String),
    Arrow(Box<PointerExpr>, String),
    Deref(Box<PointerExpr>),
    Index(Box<PointerExpr>, IndexExpr),
    Plus(Box<PointerExpr>, IndexExpr),
}

impl PointerExpr {
    pub fn var(name: &str) -> Self {
        PointerExpr::Var(name.into())
    }

    pub fn field(self, f: &str) -> Self {
        PointerExpr::Field(Box::new(self), f.into())
    }

    pub fn arrow(self, f: &str) -> Self {
        PointerExpr::Arrow(Box::new(self), f.into())
    }

    pub fn deref(self) -> Self {
        PointerExpr::Deref(Box::new(self))
    }

    pub fn index(self, e: IndexExpr) -> Self {
        PointerExpr::Index(Box::new(self), e)
    }

    pub fn plus(self, e: IndexExpr) -> Self {
        PointerExpr::Plus(Box::new(self), e)
    }

    pub fn addr_of(self) -> Self {
        PointerExpr::AddrOf(Box::new(self))
    }

    pub fn addr_of_plus(self, e: IndexExpr) -> Self {
        PointerExpr::AddrOfPlus(Box::new(self), e)
    }

    /// Forms that have an l-value.
    pub fn is_lvalue(&self) -> bool {
        matches!(
            self,
            PointerExpr::Var(_)
                | PointerExpr::Field(..)
                | PointerExpr::Arrow(..)
                | PointerExpr::Deref(_)
                | PointerExpr::Index(..)
        )
    }

    /// Grammar check for a `β` position.
    pub fn is_normal_beta(&self) -> bool {
        match self {
            PointerExpr::Var(_) => true,
            PointerExpr::Field(b, _) | PointerExpr::Index(b, _) | PointerExpr::Plus(b, _) => {
                b.is_normal_beta()
            }
            PointerExpr::Arrow(b, _) | PointerExpr::Deref(b) => match &**b {
                PointerExpr::AddrOfPlus(inner, _) => inner.is_normal_beta(),
                other => other.is_normal_beta(),
            },
            PointerExpr::Malloc { .. } | PointerExpr::AddrOf(_) | PointerExpr::AddrOfPlus(..) => {
                false
            }
        }
    }

    /// Grammar check for an `α` position.
    pub fn is_normal_alpha(&self) -> bool {
        match self {
            PointerExpr::Malloc { .. } => true,
            PointerExpr::AddrOf(b) | PointerExpr::AddrOfPlus(b, _) => b.is_normal_beta(),
            other => other.is_normal_beta(),
        }
    }

    /// Static type of the expression, if well typed.
    pub fn ty(&self, types: &TypeTable) -> Option<Ty> {
        let field_of = |ty: &Ty, f: &str| match ty {
            Ty::Agg(id) => types.aggregate(*id).field(f).map(|fd| fd.ty.clone()),
            _ => None,
        };
        match self {
            PointerExpr::Malloc { ty, .. } => Some(Ty::ptr(ty.clone())),
            PointerExpr::AddrOf(b) | PointerExpr::AddrOfPlus(b, _) => b.ty(types).map(Ty::ptr),
            PointerExpr::Var(x) => types.var(x).cloned(),
            PointerExpr::Field(b, f) => field_of(&b.ty(types)?, f),
            PointerExpr::Arrow(b, f) => field_of(b.ty(types)?.pointee()?, f),
            PointerExpr::Deref(b) => b.ty(types)?.pointee().cloned(),
            PointerExpr::Index(b, _) => match b.ty(types)? {
                Ty::Array(elem, _) => Some(*elem),
                _ => None,
            },
            PointerExpr::Plus(b, _) => b.ty(types).filter(Ty::is_pointer),
        }
    }

    fn prec(&self) -> u8 {
        match self {
            PointerExpr::Plus(..) | PointerExpr::AddrOfPlus(..) => 0,
            PointerExpr::Deref(_) | PointerExpr::AddrOf(_) => 1,
            _ => 2,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.prec() < min {
            f.write_str("(")?;
            self.fmt_at(f, 0)?;
            return f.write_str(")");
        }
        let plus = |f: &mut fmt::Formatter<'_>, e: &IndexExpr| match e {
            IndexExpr::Neg(inner) => {
                f.write_str(" - ")?;
                inner.fmt_at(f, 1)
            }
            IndexExpr::Lit(k) if *k < 0 => write!(f, " - {}", k.unsigned_abs()),
            _ => {
                f.write_str(" + ")?;
                e.fmt_at(f, 1)
            }
        };
        match self {
            PointerExpr::Malloc { spelled, .. } => write!(f, "malloc(sizeof({spelled}))"),
            PointerExpr::AddrOf(b) => {
                f.write_str("&")?;
                b.fmt_at(f, 1)
            }
            PointerExpr::AddrOfPlus(b, e) => {
                f.write_str("&")?;
                b.fmt_at(f, 1)?;
                plus(f, e)
            }
            PointerExpr::Var(x) => f.write_str(x),
            PointerExpr::Field(b, name) => {
                b.fmt_at(f, 2)?;
                write!(f, ".{name}")
            }
            PointerExpr::Arrow(b, name) => {
                b.fmt_at(f, 2)?;
                write!(f, "->{name}")
            }
            PointerExpr::Deref(b) => {
                f.write_str("*")?;
                b.fmt_at(f, 1)
            }
            PointerExpr::Index(b, e) => {
                b.fmt_at(f, 2)?;
                write!(f, "[{e}]")
            }
            PointerExpr::Plus(b, e) => {
                b.fmt_at(f, 0)?;
                plus(f, e)
            }
        }
    }
}

impl fmt::Display for PointerExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// A CFG node's statement.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Statement {
    /// `lhs = rhs` with both sides pointer-typed.
    PtrAssign { lhs: PointerExpr, rhs: PointerExpr },
    /// `lhs = e` for a non-pointer scalar `lhs`. Analysed as `use(lhs)`.
    ScalarAssign { lhs: PointerExpr, rhs: IndexExpr },
    /// Pointer uses outside assignments, including branch conditions.
    Use(Vec<PointerExpr>),
    Other,
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::PtrAssign { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
            Statement::ScalarAssign { lhs, rhs } => write!(f, "{lhs} = {rhs}"),
            Statement::Use(exprs) => {
                f.write_str("use(")?;
                for (i, e) in exprs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            Statement::Other => f.write_str("other"),
        }
    }
}

/// Structured procedure body, before CFG construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Simple(Statement),
    /// Assignment of a struct, union or array value; removed by [`normalize`].
    AggregateAssign { lhs: PointerExpr, rhs: PointerExpr, ty: Ty },
    If {
        cond: Vec<PointerExpr>,
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    While {
        cond: Vec<PointerExpr>,
        body: Vec<Stmt>,
    },
    Return(Vec<PointerExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IrError {
    #[error("type mismatch in assignment `{lhs} = {rhs}`")]
    TypeMismatch { lhs: String, rhs: String },
    #[error("expression `{0}` is not in normal form (nested `&` or misplaced malloc)")]
    NotNormal(String),
    #[error("left side `{0}` of an assignment has no l-value")]
    NotAssignable(String),
}

fn expand_into(
    lhs: PointerExpr,
    rhs: PointerExpr,
    ty: &Ty,
    types: &TypeTable,
    out: &mut Vec<Statement>,
) {
    match ty {
        Ty::Pointer(_) => out.push(Statement::PtrAssign { lhs, rhs }),
        Ty::Scalar(_) => out.push(Statement::Other),
        Ty::Agg(id) => {
            let agg = types.aggregate(*id);
            match agg.kind {
                AggKind::Union if types.contains_pointer(ty) => {
                    out.push(Statement::PtrAssign { lhs, rhs })
                }
                AggKind::Union => out.push(Statement::Other),
                AggKind::Struct => {
                    for fd in &agg.fields {
                        expand_into(
                            lhs.clone().field(&fd.name),
                            rhs.clone().field(&fd.name),
                            &fd.ty,
                            types,
                            out,
                        );
                    }
                }
            }
        }
        Ty::Array(elem, n) => {
            for k in 0..*n as i64 {
                expand_into(
                    lhs.clone().index(IndexExpr::Lit(k)),
                    rhs.clone().index(IndexExpr::Lit(k)),
                    elem,
                    types,
                    out,
                );
            }
        }
    }
}

/// Replaces an aggregate assignment by the member-wise assignments of its
/// closure, in field declaration order. Other statements are returned as is.
pub fn closure_expand(stmt: &Stmt, types: &TypeTable) -> Result<Vec<Statement>, IrError> {
    match stmt {
        Stmt::AggregateAssign { lhs, rhs, ty } => {
            let lt = lhs.ty(types);
            let rt = rhs.ty(types);
            if lt.as_ref() != Some(ty) || rt.as_ref() != Some(ty) {
                return Err(IrError::TypeMismatch {
                    lhs: alloc::format!("{lhs}"),
                    rhs: alloc::format!("{rhs}"),
                });
            }
            let mut out = Vec::new();
            expand_into(lhs.clone(), rhs.clone(), ty, types, &mut out);
            Ok(out)
        }
        Stmt::Simple(s) => Ok(vec![s.clone()]),
        _ => Ok(Vec::new()),
    }
}

fn check_statement(stmt: &Statement) -> Result<(), IrError> {
    let not_normal = |e: &PointerExpr| IrError::NotNormal(alloc::format!("{e}"));
    match stmt {
        Statement::PtrAssign { lhs, rhs } => {
            if !lhs.is_lvalue() {
                return Err(IrError::NotAssignable(alloc::format!("{lhs}")));
            }
            if !lhs.is_normal_beta() {
                return Err(not_normal(lhs));
            }
            if !rhs.is_normal_alpha() {
                return Err(not_normal(rhs));
            }
        }
        Statement::ScalarAssign { lhs, .. } => {
            if !lhs.is_lvalue() {
                return Err(IrError::NotAssignable(alloc::format!("{lhs}")));
            }
            if !lhs.is_normal_beta() {
                return Err(not_normal(lhs));
            }
        }
        Statement::Use(exprs) => {
            for e in exprs {
                if matches!(e, PointerExpr::Malloc { .. }) || !e.is_normal_alpha() {
                    return Err(not_normal(e));
                }
            }
        }
        Statement::Other => {}
    }
    Ok(())
}

fn check_cond(cond: &[PointerExpr]) -> Result<(), IrError> {
    check_statement(&Statement::Use(cond.to_vec()))
}

/// Expands every aggregate assignment and verifies the `&`/malloc placement
/// invariants. Idempotent.
pub fn normalize(body: &[Stmt], types: &TypeTable) -> Result<Vec<Stmt>, IrError> {
    let mut out = Vec::with_capacity(body.len());
    for stmt in body {
        match stmt {
            Stmt::Simple(s) => {
                check_statement(s)?;
                out.push(stmt.clone());
            }
            Stmt::AggregateAssign { .. } => {
                for s in closure_expand(stmt, types)? {
                    check_statement(&s)?;
                    out.push(Stmt::Simple(s));
                }
            }
            Stmt::If {
                cond,
                then_branch,
                else_branch,
            } => {
                check_cond(cond)?;
                out.push(Stmt::If {
                    cond: cond.clone(),
                    then_branch: normalize(then_branch, types)?,
                    else_branch: normalize(else_branch, types)?,
                });
            }
            Stmt::While { cond, body } => {
                check_cond(cond)?;
                out.push(Stmt::While {
                    cond: cond.clone(),
                    body: normalize(body, types)?,
                });
            }
            Stmt::Return(exprs) => {
                check_cond(exprs)?;
                out.push(stmt.clone());
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{AggKind, Aggregate, FieldDef};
    use alloc::string::ToString;

    fn v(x: &str) -> PointerExpr {
        PointerExpr::var(x)
    }

    #[test]
    fn printing_follows_c_precedence() {
        let e = v("x").arrow("f").arrow("f");
        assert_eq!(e.to_string(), "x->f->f");
        assert_eq!(v("s").plus(IndexExpr::Lit(5)).deref().to_string(), "*(s + 5)");
        assert_eq!(v("a").arrow("g").addr_of().to_string(), "&a->g");
        assert_eq!(v("t").deref().plus(IndexExpr::Lit(5)).deref().to_string(), "*(*t + 5)");
        assert_eq!(v("c").addr_of_plus(IndexExpr::Lit(5)).deref().to_string(), "*(&c + 5)");
        assert_eq!(v("p").plus(IndexExpr::negate(IndexExpr::Var("n".into()))).to_string(), "p - n");
        assert_eq!(v("p").deref().field("f").to_string(), "(*p).f");
    }

    fn nested_types() -> TypeTable {
        let mut t = TypeTable::new();
        let inner = t.add_aggregate(Aggregate {
            tag: Some("G".into()),
            kind: AggKind::Struct,
            fields: vec![FieldDef { name: "h".into(), ty: Ty::ptr(Ty::int()) }],
        });
        let outer = t.add_aggregate(Aggregate {
            tag: Some("S".into()),
            kind: AggKind::Struct,
            fields: vec![
                FieldDef { name: "f".into(), ty: Ty::ptr(Ty::int()) },
                FieldDef { name: "n".into(), ty: Ty::int() },
                FieldDef { name: "g".into(), ty: Ty::Agg(inner) },
            ],
        });
        let un = t.add_aggregate(Aggregate {
            tag: Some("U".into()),
            kind: AggKind::Union,
            fields: vec![
                FieldDef { name: "p".into(), ty: Ty::ptr(Ty::int()) },
                FieldDef { name: "i".into(), ty: Ty::int() },
            ],
        });
        t.declare_var("a", Ty::Agg(outer));
        t.declare_var("b", Ty::Agg(outer));
        t.declare_var("u", Ty::Agg(un));
        t.declare_var("w", Ty::Agg(un));
        t.declare_var("x", Ty::ptr(Ty::int()));
        t.declare_var("y", Ty::ptr(Ty::int()));
        t
    }

    #[test]
    fn closure_of_nested_struct() {
        let t = nested_types();
        let ty = t.var("a").unwrap().clone();
        let stmt = Stmt::AggregateAssign { lhs: v("a"), rhs: v("b"), ty };
        let out: Vec<_> = closure_expand(&stmt, &t)
            .unwrap()
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(out, ["a.f = b.f", "other", "a.g.h = b.g.h"]);
    }

    #[test]
    fn closure_base_cases() {
        let t = nested_types();
        let ptr = Stmt::Simple(Statement::PtrAssign { lhs: v("x"), rhs: v("y") });
        assert_eq!(closure_expand(&ptr, &t).unwrap().len(), 1);

        let ty = t.var("u").unwrap().clone();
        let un = Stmt::AggregateAssign { lhs: v("u"), rhs: v("w"), ty };
        let out = closure_expand(&un, &t).unwrap();
        assert_eq!(out, vec![Statement::PtrAssign { lhs: v("u"), rhs: v("w") }]);

        let ty = t.var("a").unwrap().clone();
        let bad = Stmt::AggregateAssign { lhs: v("a"), rhs: v("u"), ty };
        assert!(matches!(closure_expand(&bad, &t), Err(IrError::TypeMismatch { .. })));
    }

    #[test]
    fn normalize_is_idempotent_and_rejects_nested_addr() {
        let t = nested_types();
        let ty = t.var("a").unwrap().clone();
        let body = vec![
            Stmt::AggregateAssign { lhs: v("a"), rhs: v("b"), ty },
            Stmt::While {
                cond: vec![v("x")],
                body: vec![Stmt::Simple(Statement::PtrAssign { lhs: v("x"), rhs: v("y") })],
            },
        ];
        let once = normalize(&body, &t).unwrap();
        assert_eq!(once.len(), 4);
        assert_eq!(normalize(&once, &t).unwrap(), once);

        let nested = Stmt::Simple(Statement::PtrAssign {
            lhs: v("x"),
            rhs: v("y").addr_of().deref(),
        });
        assert!(matches!(normalize(&[nested], &t), Err(IrError::NotNormal(_))));
    }
}
