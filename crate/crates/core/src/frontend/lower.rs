//! Type checking and lowering of the surface syntax into the IR.

use alloc::borrow::ToOwned;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::{self, BinOp, Expr, ExprKind, Pos, TypeSpec, UnOp};
use super::printer;
use super::{ErrorKind, FrontendError};
use crate::ir::{self, IndexExpr, PointerExpr, Statement};
use crate::loc::looks_like_heap_name;
use crate::types::{AggId, AggKind, Aggregate, FieldDef, Ty, TypeTable};

type LResult<T> = Result<T, FrontendError>;

/// A type-checked procedure body, before normalisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoweredProc {
    pub name: String,
    /// Aggregates, globals, parameters and locals of this procedure.
    pub types: TypeTable,
    pub body: Vec<ir::Stmt>,
}

pub fn lower(prog: &ast::Program) -> LResult<Vec<LoweredProc>> {
    let mut global = Scope::default();
    let mut out = Vec::new();
    let mut names = BTreeSet::new();
    for item in &prog.items {
        match item {
            ast::Item::Typedef(d) => {
                let base = global.resolve(&d.spec, d.pos)?;
                for dl in &d.declarators {
                    if global.typedefs.contains_key(&dl.name) {
                        return Err(err(dl.pos, ErrorKind::Redeclared(dl.name.clone())));
                    }
                    global
                        .typedefs
                        .insert(dl.name.clone(), apply(base.clone(), dl.stars, &dl.dims));
                }
            }
            ast::Item::Decl(d) => {
                let base = global.resolve(&d.spec, d.pos)?;
                for dl in &d.declarators {
                    if let Some(init) = &dl.init {
                        return Err(err(
                            init.pos,
                            ErrorKind::Unsupported("initialisers on global variables".into()),
                        ));
                    }
                    global.declare(dl, base.clone())?;
                }
            }
            ast::Item::Proc(p) => {
                if !names.insert(p.name.clone()) {
                    return Err(err(p.pos, ErrorKind::Redeclared(p.name.clone())));
                }
                let mut cx = ProcCx {
                    scope: global.clone(),
                };
                for param in &p.params {
                    let base = cx.scope.resolve(&param.spec, param.decl.pos)?;
                    cx.scope.declare(&param.decl, base)?;
                }
                let mut body = Vec::new();
                cx.block(&p.body, &mut body)?;
                out.push(LoweredProc {
                    name: p.name.clone(),
                    types: cx.scope.table,
                    body,
                });
            }
        }
    }
    Ok(out)
}

fn err(pos: Pos, kind: ErrorKind) -> FrontendError {
    FrontendError::at(pos, kind)
}

fn apply(base: Ty, stars: u32, dims: &[u64]) -> Ty {
    let mut ty = base;
    for _ in 0..stars {
        ty = Ty::ptr(ty);
    }
    for &n in dims.iter().rev() {
        ty = Ty::array(ty, n);
    }
    ty
}

#[derive(Clone, Default)]
struct Scope {
    table: TypeTable,
    tags: BTreeMap<String, AggId>,
    defined: BTreeSet<AggId>,
    typedefs: BTreeMap<String, Ty>,
}

impl Scope {
    fn show(&self, ty: &Ty) -> String {
        self.table.display_ty(ty).to_string()
    }

    fn resolve(&mut self, spec: &TypeSpec, pos: Pos) -> LResult<Ty> {
        let (kind, agg) = match spec {
            TypeSpec::Scalar(name) => return Ok(Ty::Scalar(name.clone())),
            TypeSpec::Named(name) => {
                return self
                    .typedefs
                    .get(name)
                    .cloned()
                    .ok_or_else(|| err(pos, ErrorKind::UnknownType(name.clone())))
            }
            TypeSpec::Struct(a) => (AggKind::Struct, a),
            TypeSpec::Union(a) => (AggKind::Union, a),
        };
        let id = match &agg.tag {
            Some(tag) => match self.tags.get(tag) {
                Some(&id) => {
                    if self.table.aggregate(id).kind != kind {
                        return Err(err(pos, ErrorKind::UnknownType(tag.clone())));
                    }
                    if agg.fields.is_some() && self.defined.contains(&id) {
                        return Err(err(pos, ErrorKind::Redeclared(tag.clone())));
                    }
                    id
                }
                None => {
                    let id = self.table.add_aggregate(Aggregate {
                        tag: Some(tag.clone()),
                        kind,
                        fields: Vec::new(),
                    });
                    self.tags.insert(tag.clone(), id);
                    id
                }
            },
            None => self.table.add_aggregate(Aggregate {
                tag: None,
                kind,
                fields: Vec::new(),
            }),
        };
        if let Some(decls) = &agg.fields {
            let mut fields: Vec<FieldDef> = Vec::new();
            for d in decls {
                let base = self.resolve(&d.spec, d.pos)?;
                for dl in &d.declarators {
                    let ty = apply(base.clone(), dl.stars, &dl.dims);
                    self.check_complete(&ty, dl.pos)?;
                    if fields.iter().any(|f| f.name == dl.name) {
                        return Err(err(dl.pos, ErrorKind::Redeclared(dl.name.clone())));
                    }
                    fields.push(FieldDef {
                        name: dl.name.clone(),
                        ty,
                    });
                }
            }
            self.table.define_aggregate(id, fields);
            self.defined.insert(id);
        }
        Ok(Ty::Agg(id))
    }

    /// Aggregates stored by value must be fully defined.
    fn check_complete(&self, ty: &Ty, pos: Pos) -> LResult<()> {
        match ty {
            Ty::Agg(id) if !self.defined.contains(id) => Err(err(
                pos,
                ErrorKind::IncompleteType(self.show(ty)),
            )),
            Ty::Array(elem, _) => self.check_complete(elem, pos),
            _ => Ok(()),
        }
    }

    fn declare(&mut self, dl: &ast::Declarator, base: Ty) -> LResult<()> {
        if looks_like_heap_name(&dl.name) {
            return Err(err(dl.pos, ErrorKind::ReservedName(dl.name.clone())));
        }
        if self.table.var(&dl.name).is_some() {
            return Err(err(dl.pos, ErrorKind::Redeclared(dl.name.clone())));
        }
        let ty = apply(base, dl.stars, &dl.dims);
        self.check_complete(&ty, dl.pos)?;
        self.table.declare_var(dl.name.clone(), ty);
        Ok(())
    }
}

/// A type-checked surface expression.
enum Value {
    /// Has an l-value.
    Place(PointerExpr, Ty),
    /// Pointer value without an l-value (`&β`, `β + e`, malloc, ...).
    Addr(PointerExpr, Ty),
    /// Integer value; `expr` is set when it is built from literals and
    /// integer variables only.
    Int {
        expr: Option<IndexExpr>,
        reads: Vec<PointerExpr>,
    },
    Null,
    /// Result of a call other than malloc.
    Call(Vec<PointerExpr>),
}

struct ProcCx {
    scope: Scope,
}

fn fold_add(a: IndexExpr, b: IndexExpr) -> IndexExpr {
    match (&a, &b) {
        (IndexExpr::Lit(x), IndexExpr::Lit(y)) => match x.checked_add(*y) {
            Some(s) => IndexExpr::Lit(s),
            None => IndexExpr::plus(a, b),
        },
        (_, IndexExpr::Neg(inner)) => IndexExpr::minus(a, (**inner).clone()),
        _ => IndexExpr::plus(a, b),
    }
}

fn negate(e: IndexExpr) -> IndexExpr {
    match e {
        IndexExpr::Lit(k) if k != i64::MIN => IndexExpr::Lit(-k),
        other => IndexExpr::negate(other),
    }
}

impl ProcCx {
    fn show(&self, ty: &Ty) -> String {
        self.scope.show(ty)
    }

    fn block(&mut self, stmts: &[ast::Stmt], out: &mut Vec<ir::Stmt>) -> LResult<()> {
        for s in stmts {
            self.stmt(s, out)?;
        }
        Ok(())
    }

    fn sub_block(&mut self, stmts: &[ast::Stmt]) -> LResult<Vec<ir::Stmt>> {
        let mut out = Vec::new();
        self.block(stmts, &mut out)?;
        Ok(out)
    }

    fn stmt(&mut self, s: &ast::Stmt, out: &mut Vec<ir::Stmt>) -> LResult<()> {
        match s {
            ast::Stmt::Decl(d) => {
                let base = self.scope.resolve(&d.spec, d.pos)?;
                for dl in &d.declarators {
                    self.scope.declare(dl, base.clone())?;
                    if let Some(init) = &dl.init {
                        let lhs = Expr::new(ExprKind::Ident(dl.name.clone()), dl.pos);
                        out.push(self.assign(&lhs, init)?);
                    }
                }
            }
            ast::Stmt::Assign { lhs, rhs, .. } => out.push(self.assign(lhs, rhs)?),
            ast::Stmt::Use { exprs, .. } => {
                let mut reads = Vec::new();
                for e in exprs {
                    self.reads(e, &mut reads)?;
                }
                out.push(ir::Stmt::Simple(Statement::Use(reads)));
            }
            ast::Stmt::Other(_) => out.push(ir::Stmt::Simple(Statement::Other)),
            ast::Stmt::Expr(e) => {
                let stmt = match &e.kind {
                    ExprKind::Call(..) => {
                        // Arguments are still type checked.
                        self.value(e)?;
                        Statement::Other
                    }
                    _ => {
                        let mut reads = Vec::new();
                        self.reads(e, &mut reads)?;
                        Statement::Use(reads)
                    }
                };
                out.push(ir::Stmt::Simple(stmt));
            }
            ast::Stmt::If {
                cond,
                then_branch,
                else_branch,
                ..
            } => {
                let mut c = Vec::new();
                self.reads(cond, &mut c)?;
                let then_branch = self.sub_block(then_branch)?;
                let else_branch = match else_branch {
                    Some(b) => self.sub_block(b)?,
                    None => Vec::new(),
                };
                out.push(ir::Stmt::If {
                    cond: c,
                    then_branch,
                    else_branch,
                });
            }
            ast::Stmt::While { cond, body, .. } => {
                let mut c = Vec::new();
                self.reads(cond, &mut c)?;
                let body = self.sub_block(body)?;
                out.push(ir::Stmt::While { cond: c, body });
            }
            ast::Stmt::Return(value, _) => {
                let mut reads = Vec::new();
                if let Some(v) = value {
                    self.reads(v, &mut reads)?;
                }
                out.push(ir::Stmt::Return(reads));
            }
            ast::Stmt::Block(stmts) => self.block(stmts, out)?,
        }
        Ok(())
    }

    fn assign(&mut self, lhs: &Expr, rhs: &Expr) -> LResult<ir::Stmt> {
        let Value::Place(target, lty) = self.value(lhs)? else {
            return Err(err(
                lhs.pos,
                ErrorKind::NotAssignable(printer::print_expr(lhs)),
            ));
        };
        let mismatch = |cx: &ProcCx, rty: &str| {
            err(
                rhs.pos,
                ErrorKind::TypeMismatch {
                    lhs: cx.show(&lty),
                    rhs: rty.into(),
                },
            )
        };
        let rv = self.value(rhs)?;
        let simple = |s| Ok(ir::Stmt::Simple(s));
        match &lty {
            Ty::Pointer(_) => {
                let (value, rty) = match rv {
                    Value::Call(_) => return simple(Statement::Other),
                    Value::Null | Value::Int { .. } => {
                        return Err(err(
                            rhs.pos,
                            ErrorKind::Unsupported("assigning an integer or NULL to a pointer".into()),
                        ))
                    }
                    other => self.as_pointer(other, rhs.pos)?,
                };
                if !compatible(&lty, &rty) {
                    return Err(mismatch(self, &self.show(&rty)));
                }
                simple(Statement::PtrAssign {
                    lhs: target,
                    rhs: value,
                })
            }
            Ty::Agg(_) | Ty::Array(..) => match rv {
                Value::Place(src, rty) if rty == lty => Ok(ir::Stmt::AggregateAssign {
                    lhs: target,
                    rhs: src,
                    ty: lty,
                }),
                Value::Place(_, rty) | Value::Addr(_, rty) => Err(mismatch(self, &self.show(&rty))),
                _ => Err(mismatch(self, "int")),
            },
            Ty::Scalar(_) => match self.as_int(rv, rhs.pos)? {
                (Some(e), _) => simple(Statement::ScalarAssign {
                    lhs: target,
                    rhs: e,
                }),
                (None, reads) => {
                    let mut exprs = vec![target];
                    exprs.extend(reads);
                    simple(Statement::Use(exprs))
                }
            },
        }
    }

    /// Collects the pointer expressions read by `e`.
    fn reads(&mut self, e: &Expr, out: &mut Vec<PointerExpr>) -> LResult<()> {
        match self.value(e)? {
            Value::Place(p, Ty::Array(..)) => {
                out.push(p.index(IndexExpr::Lit(0)).addr_of());
            }
            Value::Place(p, _) | Value::Addr(p, _) => out.push(p),
            Value::Int { reads, .. } | Value::Call(reads) => out.extend(reads),
            Value::Null => {}
        }
        Ok(())
    }

    fn reads_of(&self, v: Value) -> Vec<PointerExpr> {
        match v {
            Value::Place(p, Ty::Array(..)) => vec![p.index(IndexExpr::Lit(0)).addr_of()],
            Value::Place(p, _) | Value::Addr(p, _) => vec![p],
            Value::Int { reads, .. } | Value::Call(reads) => reads,
            Value::Null => Vec::new(),
        }
    }

    fn as_pointer(&self, v: Value, pos: Pos) -> LResult<(PointerExpr, Ty)> {
        match v {
            Value::Place(p, ty @ Ty::Pointer(_)) | Value::Addr(p, ty) => Ok((p, ty)),
            Value::Place(p, Ty::Array(elem, _)) => {
                Ok((p.index(IndexExpr::Lit(0)).addr_of(), Ty::ptr(*elem)))
            }
            Value::Place(p, ty) => Err(err(
                pos,
                ErrorKind::NotAPointer(format!("{p}: {}", self.show(&ty))),
            )),
            _ => Err(err(pos, ErrorKind::NotAPointer("integer expression".into()))),
        }
    }

    fn as_int(&self, v: Value, pos: Pos) -> LResult<(Option<IndexExpr>, Vec<PointerExpr>)> {
        match v {
            Value::Place(PointerExpr::Var(x), Ty::Scalar(_)) => Ok((
                Some(IndexExpr::Var(x.clone())),
                vec![PointerExpr::Var(x)],
            )),
            Value::Place(p, Ty::Scalar(_)) => Ok((None, vec![p])),
            Value::Int { expr, reads } => Ok((expr, reads)),
            Value::Call(reads) => Ok((None, reads)),
            Value::Null => Err(err(pos, ErrorKind::Unsupported("NULL in arithmetic".into()))),
            Value::Place(p, ty) | Value::Addr(p, ty) => Err(err(
                pos,
                ErrorKind::TypeMismatch {
                    lhs: "int".into(),
                    rhs: format!("{p}: {}", self.show(&ty)),
                },
            )),
        }
    }

    fn index(&self, v: Value, pos: Pos) -> LResult<IndexExpr> {
        match self.as_int(v, pos)? {
            (Some(e), _) => Ok(e),
            (None, _) => Err(err(
                pos,
                ErrorKind::Unsupported(
                    "index expressions may only use integer variables and literals".into(),
                ),
            )),
        }
    }

    fn deref_of(&self, (p, ty): (PointerExpr, Ty), pos: Pos) -> LResult<Value> {
        let pointee = match ty.pointee() {
            Some(Ty::Scalar(s)) if s == "void" => {
                return Err(err(pos, ErrorKind::NotAPointer(format!("{p}: void *"))))
            }
            Some(t) => t.clone(),
            None => return Err(err(pos, ErrorKind::NotAPointer(format!("{p}")))),
        };
        let place = match p {
            PointerExpr::AddrOf(inner) => *inner,
            PointerExpr::Malloc { .. } => return Err(malloc_misplaced(pos)),
            other => other.deref(),
        };
        Ok(Value::Place(place, pointee))
    }

    fn plus_of(&self, (p, ty): (PointerExpr, Ty), by: IndexExpr, pos: Pos) -> LResult<Value> {
        let value = match p {
            PointerExpr::AddrOf(inner) => match *inner {
                PointerExpr::Index(base, e) => base.index(fold_add(e, by)).addr_of(),
                other => other.addr_of_plus(by),
            },
            PointerExpr::AddrOfPlus(inner, e) => inner.addr_of_plus(fold_add(e, by)),
            PointerExpr::Malloc { .. } => return Err(malloc_misplaced(pos)),
            other => other.plus(by),
        };
        Ok(Value::Addr(value, ty))
    }

    fn field_ty(&self, ty: &Ty, f: &str, pos: Pos) -> LResult<Ty> {
        match ty {
            Ty::Agg(id) => self
                .scope
                .table
                .aggregate(*id)
                .field(f)
                .map(|fd| fd.ty.clone())
                .ok_or_else(|| {
                    err(
                        pos,
                        ErrorKind::NoField {
                            ty: self.show(ty),
                            field: f.into(),
                        },
                    )
                }),
            other => Err(err(pos, ErrorKind::NotAggregate(self.show(other)))),
        }
    }

    fn value(&mut self, e: &Expr) -> LResult<Value> {
        let pos = e.pos;
        Ok(match &e.kind {
            ExprKind::Ident(x) => match self.scope.table.var(x) {
                Some(ty) => Value::Place(PointerExpr::var(x), ty.clone()),
                None => return Err(err(pos, ErrorKind::Undeclared(x.clone()))),
            },
            ExprKind::Int(k) => Value::Int {
                expr: Some(IndexExpr::Lit(*k)),
                reads: Vec::new(),
            },
            ExprKind::Null => Value::Null,
            ExprKind::Field(b, f) => match self.value(b)? {
                Value::Place(p, ty) => {
                    let fty = self.field_ty(&ty, f, pos)?;
                    Value::Place(p.field(f), fty)
                }
                _ => {
                    return Err(err(
                        pos,
                        ErrorKind::Unsupported("field access on a value without an l-value".into()),
                    ))
                }
            },
            ExprKind::Arrow(b, f) => {
                let v = self.value(b)?;
                let (p, ty) = self.as_pointer(v, b.pos)?;
                let agg = ty.pointee().cloned().unwrap_or_else(Ty::int);
                let fty = self.field_ty(&agg, f, pos)?;
                let place = match p {
                    PointerExpr::AddrOf(inner) => inner.field(f),
                    PointerExpr::Malloc { .. } => return Err(malloc_misplaced(pos)),
                    other => other.arrow(f),
                };
                Value::Place(place, fty)
            }
            ExprKind::Index(b, i) => {
                let base = self.value(b)?;
                let iv = self.value(i)?;
                let idx = self.index(iv, i.pos)?;
                match base {
                    Value::Place(p, Ty::Array(elem, _)) => Value::Place(p.index(idx), *elem),
                    other => {
                        let ptr = self.as_pointer(other, b.pos)?;
                        let ty = ptr.1.clone();
                        match self.plus_of(ptr, idx, pos)? {
                            Value::Addr(sum, _) => self.deref_of((sum, ty), pos)?,
                            _ => unreachable!("plus_of yields an address"),
                        }
                    }
                }
            }
            ExprKind::Unary(UnOp::Deref, b) => {
                let v = self.value(b)?;
                let ptr = self.as_pointer(v, b.pos)?;
                self.deref_of(ptr, pos)?
            }
            ExprKind::Unary(UnOp::AddrOf, b) => match self.value(b)? {
                Value::Place(PointerExpr::Deref(inner), ty) => Value::Addr(*inner, Ty::ptr(ty)),
                Value::Place(p, ty) => Value::Addr(p.addr_of(), Ty::ptr(ty)),
                _ => {
                    return Err(err(
                        pos,
                        ErrorKind::NotAssignable(printer::print_expr(b)),
                    ))
                }
            },
            ExprKind::Unary(UnOp::Neg, b) => {
                let v = self.value(b)?;
                let (expr, reads) = self.as_int(v, b.pos)?;
                Value::Int {
                    expr: expr.map(negate),
                    reads,
                }
            }
            ExprKind::Unary(UnOp::Not, b) => {
                let v = self.value(b)?;
                Value::Int {
                    expr: None,
                    reads: self.reads_of(v),
                }
            }
            ExprKind::Binary(op @ (BinOp::Add | BinOp::Sub), a, b) => {
                let va = self.value(a)?;
                let vb = self.value(b)?;
                let is_ptr = |v: &Value| {
                    matches!(
                        v,
                        Value::Place(_, Ty::Pointer(_) | Ty::Array(..)) | Value::Addr(..)
                    )
                };
                match (is_ptr(&va), is_ptr(&vb)) {
                    (true, false) => {
                        let ptr = self.as_pointer(va, a.pos)?;
                        let mut by = self.index(vb, b.pos)?;
                        if *op == BinOp::Sub {
                            by = negate(by);
                        }
                        self.plus_of(ptr, by, pos)?
                    }
                    (false, true) if *op == BinOp::Add => {
                        let ptr = self.as_pointer(vb, b.pos)?;
                        let by = self.index(va, a.pos)?;
                        self.plus_of(ptr, by, pos)?
                    }
                    (true, true) if *op == BinOp::Sub => {
                        let mut reads = self.reads_of(va);
                        reads.extend(self.reads_of(vb));
                        Value::Int { expr: None, reads }
                    }
                    (false, false) => self.arith(*op, va, vb, a.pos, b.pos)?,
                    _ => {
                        return Err(err(
                            pos,
                            ErrorKind::Unsupported(format!("pointer operands to `{}`", op.as_str())),
                        ))
                    }
                }
            }
            ExprKind::Binary(BinOp::Mul, a, b) => {
                let va = self.value(a)?;
                let vb = self.value(b)?;
                self.arith(BinOp::Mul, va, vb, a.pos, b.pos)?
            }
            ExprKind::Binary(_, a, b) => {
                let va = self.value(a)?;
                let vb = self.value(b)?;
                let mut reads = self.reads_of(va);
                reads.extend(self.reads_of(vb));
                Value::Int { expr: None, reads }
            }
            ExprKind::Call(name, args) if name == "malloc" => match args.as_slice() {
                [Expr {
                    kind: ExprKind::Sizeof(tn),
                    ..
                }] => {
                    let ty = self.type_name(tn, pos)?;
                    self.scope.check_complete(&ty, pos)?;
                    let spelled = printer::print_type_name(tn);
                    Value::Addr(PointerExpr::Malloc { ty: ty.clone(), spelled }, Ty::ptr(ty))
                }
                _ => {
                    return Err(err(
                        pos,
                        ErrorKind::Unsupported("malloc takes exactly `sizeof(T)`".into()),
                    ))
                }
            },
            ExprKind::Call(_, args) => {
                let mut reads = Vec::new();
                for a in args {
                    self.reads(a, &mut reads)?;
                }
                Value::Call(reads)
            }
            ExprKind::Sizeof(tn) => {
                self.type_name(tn, pos)?;
                Value::Int {
                    expr: None,
                    reads: Vec::new(),
                }
            }
            ExprKind::Cast(tn, inner) => {
                let target = self.type_name(tn, pos)?;
                match self.value(inner)? {
                    Value::Addr(m @ PointerExpr::Malloc { .. }, ty) => {
                        if !compatible(&target, &ty) {
                            return Err(err(
                                pos,
                                ErrorKind::TypeMismatch {
                                    lhs: self.show(&target),
                                    rhs: self.show(&ty),
                                },
                            ));
                        }
                        Value::Addr(m, target)
                    }
                    _ => {
                        return Err(err(
                            pos,
                            ErrorKind::Unsupported("casts other than on malloc".into()),
                        ))
                    }
                }
            }
        })
    }

    fn arith(&self, op: BinOp, a: Value, b: Value, pa: Pos, pb: Pos) -> LResult<Value> {
        let (ea, mut reads) = self.as_int(a, pa)?;
        let (eb, rb) = self.as_int(b, pb)?;
        reads.extend(rb);
        let expr = match (ea, eb) {
            (Some(x), Some(y)) => Some(match op {
                BinOp::Add => IndexExpr::plus(x, y),
                BinOp::Sub => IndexExpr::minus(x, y),
                _ => IndexExpr::Mul(alloc::boxed::Box::new(x), alloc::boxed::Box::new(y)),
            }),
            _ => None,
        };
        Ok(Value::Int { expr, reads })
    }

    fn type_name(&mut self, tn: &ast::TypeName, pos: Pos) -> LResult<Ty> {
        let base = self.scope.resolve(&tn.spec, pos)?;
        Ok(apply(base, tn.stars, &[]))
    }
}

fn malloc_misplaced(pos: Pos) -> FrontendError {
    err(
        pos,
        ErrorKind::Unsupported("malloc must be the whole right-hand side".to_owned()),
    )
}

fn is_void_ptr(ty: &Ty) -> bool {
    matches!(ty.pointee(), Some(Ty::Scalar(s)) if s == "void")
}

fn compatible(a: &Ty, b: &Ty) -> bool {
    a == b || (a.is_pointer() && b.is_pointer() && (is_void_ptr(a) || is_void_ptr(b)))
}
