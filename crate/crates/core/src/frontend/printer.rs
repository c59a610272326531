//! Pretty-printer producing source text that parses back to the same tree.

use alloc::string::String;
use core::fmt::Write;

use super::ast::*;

pub fn print_program(prog: &Program) -> String {
    let mut out = String::new();
    for (i, item) in prog.items.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match item {
            Item::Typedef(d) => {
                out.push_str("typedef ");
                decl(&mut out, d, 0);
            }
            Item::Decl(d) => decl(&mut out, d, 0),
            Item::Proc(p) => procedure(&mut out, p),
        }
    }
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("    ");
    }
}

fn spec(out: &mut String, s: &TypeSpec, depth: usize) {
    let (kw, agg) = match s {
        TypeSpec::Scalar(name) | TypeSpec::Named(name) => {
            out.push_str(name);
            return;
        }
        TypeSpec::Struct(a) => ("struct", a),
        TypeSpec::Union(a) => ("union", a),
    };
    out.push_str(kw);
    if let Some(tag) = &agg.tag {
        out.push(' ');
        out.push_str(tag);
    }
    if let Some(fields) = &agg.fields {
        out.push_str(" {\n");
        for f in fields {
            indent(out, depth + 1);
            decl(out, f, depth + 1);
        }
        indent(out, depth);
        out.push('}');
    }
}

fn type_name(out: &mut String, t: &TypeName) {
    spec(out, &t.spec, 0);
    if t.stars > 0 {
        out.push(' ');
        for _ in 0..t.stars {
            out.push('*');
        }
    }
}

fn declarator(out: &mut String, d: &Declarator) {
    for _ in 0..d.stars {
        out.push('*');
    }
    out.push_str(&d.name);
    for n in &d.dims {
        let _ = write!(out, "[{n}]");
    }
    if let Some(init) = &d.init {
        out.push_str(" = ");
        expr(out, init, 0);
    }
}

fn decl(out: &mut String, d: &Decl, depth: usize) {
    spec(out, &d.spec, depth);
    for (i, dl) in d.declarators.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { ", " });
        declarator(out, dl);
    }
    out.push_str(";\n");
}

fn procedure(out: &mut String, p: &Procedure) {
    spec(out, &p.ret.spec, 0);
    out.push(' ');
    for _ in 0..p.ret.stars {
        out.push('*');
    }
    out.push_str(&p.name);
    out.push('(');
    for (i, param) in p.params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        spec(out, &param.spec, 0);
        out.push(' ');
        declarator(out, &param.decl);
    }
    out.push_str(") ");
    block(out, &p.body, 0);
    out.push('\n');
}

fn block(out: &mut String, stmts: &[Stmt], depth: usize) {
    out.push_str("{\n");
    for s in stmts {
        stmt(out, s, depth + 1);
    }
    indent(out, depth);
    out.push('}');
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match s {
        Stmt::Decl(d) => return decl(out, d, depth),
        Stmt::Assign { lhs, rhs, .. } => {
            expr(out, lhs, 0);
            out.push_str(" = ");
            expr(out, rhs, 0);
            out.push(';');
        }
        Stmt::Use { exprs, .. } => {
            out.push_str("use(");
            for (i, e) in exprs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, e, 0);
            }
            out.push_str(");");
        }
        Stmt::Other(_) => out.push_str("other;"),
        Stmt::Expr(e) => {
            expr(out, e, 0);
            out.push(';');
        }
        Stmt::If {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            out.push_str("if (");
            expr(out, cond, 0);
            out.push_str(") ");
            block(out, then_branch, depth);
            if let Some(e) = else_branch {
                out.push_str(" else ");
                block(out, e, depth);
            }
        }
        Stmt::While { cond, body, .. } => {
            out.push_str("while (");
            expr(out, cond, 0);
            out.push_str(") ");
            block(out, body, depth);
        }
        Stmt::Return(value, _) => {
            out.push_str("return");
            if let Some(v) = value {
                out.push(' ');
                expr(out, v, 0);
            }
            out.push(';');
        }
        Stmt::Block(stmts) => block(out, stmts, depth),
    }
    out.push('\n');
}

fn expr(out: &mut String, e: &Expr, min: u8) {
    if e.prec() < min {
        out.push('(');
        expr(out, e, 0);
        out.push(')');
        return;
    }
    match &e.kind {
        ExprKind::Ident(s) => out.push_str(s),
        ExprKind::Int(k) => {
            let _ = write!(out, "{k}");
        }
        ExprKind::Null => out.push_str("NULL"),
        ExprKind::Field(b, f) => {
            expr(out, b, PREC_POSTFIX);
            out.push('.');
            out.push_str(f);
        }
        ExprKind::Arrow(b, f) => {
            expr(out, b, PREC_POSTFIX);
            out.push_str("->");
            out.push_str(f);
        }
        ExprKind::Index(b, i) => {
            expr(out, b, PREC_POSTFIX);
            out.push('[');
            expr(out, i, 0);
            out.push(']');
        }
        ExprKind::Call(name, args) => {
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr(out, a, 0);
            }
            out.push(')');
        }
        ExprKind::Sizeof(t) => {
            out.push_str("sizeof(");
            type_name(out, t);
            out.push(')');
        }
        ExprKind::Cast(t, inner) => {
            out.push('(');
            type_name(out, t);
            out.push(')');
            expr(out, inner, PREC_UNARY);
        }
        ExprKind::Unary(op, inner) => {
            let sym = match op {
                UnOp::Deref => "*",
                UnOp::AddrOf => "&",
                UnOp::Neg => "-",
                UnOp::Not => "!",
            };
            out.push_str(sym);
            let mut operand = String::new();
            expr(&mut operand, inner, PREC_UNARY);
            // Keep `& &x` and `- -x` from lexing as `&&` / a different token.
            if matches!(*op, UnOp::AddrOf | UnOp::Neg) && operand.starts_with(sym) {
                out.push(' ');
            }
            out.push_str(&operand);
        }
        ExprKind::Binary(op, a, b) => {
            expr(out, a, op.prec());
            out.push(' ');
            out.push_str(op.as_str());
            out.push(' ');
            expr(out, b, op.prec() + 1);
        }
    }
}

pub fn print_type_name(t: &TypeName) -> String {
    let mut out = String::new();
    type_name(&mut out, t);
    out
}
