use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Kw, Tok};
use super::{ErrorKind, FrontendError};

type PResult<T> = Result<T, FrontendError>;

/// Parses a whole translation unit.
pub fn parse(src: &str) -> PResult<Program> {
    let mut p = Parser {
        toks: tokenize(src)?,
        i: 0,
        typedefs: BTreeSet::new(),
    };
    let mut items = Vec::new();
    while *p.peek() != Tok::Eof {
        items.push(p.item()?);
    }
    Ok(Program { items })
}

/// Parses a single expression (used by tests and tools).
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser {
        toks: tokenize(src)?,
        i: 0,
        typedefs: BTreeSet::new(),
    };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    typedefs: BTreeSet<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(FrontendError::at(
            self.pos(),
            ErrorKind::Expected {
                expected: expected.into(),
                found: self.peek().to_string(),
            },
        ))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Tok::Punct(q) if *q == p)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.is_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Pos> {
        if self.is_punct(p) {
            Ok(self.bump().1)
        } else {
            self.error(&alloc::format!("`{p}`"))
        }
    }

    fn eat_kw(&mut self, k: Kw) -> bool {
        if *self.peek() == Tok::Kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.bump().1)),
            _ => self.error("identifier"),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => self.error("end of input"),
        }
    }

    fn starts_type_at(&self, k: usize) -> bool {
        match self.peek_at(k) {
            Tok::Kw(kw) => kw.is_scalar_type() || matches!(kw, Kw::Struct | Kw::Union),
            Tok::Ident(name) => self.typedefs.contains(name),
            _ => false,
        }
    }

    fn item(&mut self) -> PResult<Item> {
        let pos = self.pos();
        if self.eat_kw(Kw::Typedef) {
            let spec = self.type_spec()?;
            let mut declarators = vec![self.declarator(false)?];
            while self.eat_punct(",") {
                declarators.push(self.declarator(false)?);
            }
            self.expect_punct(";")?;
            for d in &declarators {
                self.typedefs.insert(d.name.clone());
            }
            return Ok(Item::Typedef(Decl {
                spec,
                declarators,
                pos,
            }));
        }
        if !self.starts_type_at(0) {
            return self.error("a declaration or procedure");
        }
        let spec = self.type_spec()?;
        if self.eat_punct(";") {
            return Ok(Item::Decl(Decl {
                spec,
                declarators: Vec::new(),
                pos,
            }));
        }
        // A procedure is `spec *name(`.
        let mut k = 0;
        while matches!(self.peek_at(k), Tok::Punct("*")) {
            k += 1;
        }
        if matches!(self.peek_at(k), Tok::Ident(_)) && matches!(self.peek_at(k + 1), Tok::Punct("(")) {
            let stars = k as u32;
            for _ in 0..k {
                self.bump();
            }
            let (name, _) = self.expect_ident()?;
            let params = self.params()?;
            let body = self.block()?;
            return Ok(Item::Proc(Procedure {
                ret: TypeName { spec, stars },
                name,
                params,
                body,
                pos,
            }));
        }
        let declarators = self.declarator_list()?;
        Ok(Item::Decl(Decl {
            spec,
            declarators,
            pos,
        }))
    }

    fn declarator_list(&mut self) -> PResult<Vec<Declarator>> {
        let mut out = vec![self.declarator(true)?];
        while self.eat_punct(",") {
            out.push(self.declarator(true)?);
        }
        self.expect_punct(";")?;
        Ok(out)
    }

    fn type_spec(&mut self) -> PResult<TypeSpec> {
        match self.peek().clone() {
            Tok::Kw(k) if k.is_scalar_type() => {
                let mut words: Vec<&str> = Vec::new();
                while let Tok::Kw(k) = self.peek() {
                    if !k.is_scalar_type() {
                        break;
                    }
                    words.push(k.as_str());
                    self.bump();
                }
                Ok(TypeSpec::Scalar(words.join(" ")))
            }
            Tok::Kw(k @ (Kw::Struct | Kw::Union)) => {
                self.bump();
                let tag = match self.peek() {
                    Tok::Ident(_) => Some(self.expect_ident()?.0),
                    _ => None,
                };
                let fields = if self.eat_punct("{") {
                    let mut fields = Vec::new();
                    while !self.eat_punct("}") {
                        let pos = self.pos();
                        if !self.starts_type_at(0) {
                            return self.error("a field declaration or `}`");
                        }
                        let spec = self.type_spec()?;
                        let mut declarators = vec![self.declarator(false)?];
                        while self.eat_punct(",") {
                            declarators.push(self.declarator(false)?);
                        }
                        self.expect_punct(";")?;
                        fields.push(Decl {
                            spec,
                            declarators,
                            pos,
                        });
                    }
                    Some(fields)
                } else {
                    None
                };
                if tag.is_none() && fields.is_none() {
                    return self.error("a tag or `{`");
                }
                let agg = AggSpec { tag, fields };
                Ok(if k == Kw::Struct {
                    TypeSpec::Struct(agg)
                } else {
                    TypeSpec::Union(agg)
                })
            }
            Tok::Ident(name) if self.typedefs.contains(&name) => {
                self.bump();
                Ok(TypeSpec::Named(name))
            }
            _ => self.error("a type"),
        }
    }

    fn type_name(&mut self) -> PResult<TypeName> {
        let spec = self.type_spec()?;
        let mut stars = 0;
        while self.eat_punct("*") {
            stars += 1;
        }
        Ok(TypeName { spec, stars })
    }

    fn declarator(&mut self, allow_init: bool) -> PResult<Declarator> {
        let mut stars = 0;
        while self.eat_punct("*") {
            stars += 1;
        }
        let (name, pos) = self.expect_ident()?;
        let mut dims = Vec::new();
        while self.eat_punct("[") {
            match self.peek().clone() {
                Tok::Int(n) if n > 0 => {
                    self.bump();
                    dims.push(n as u64);
                }
                _ => return self.error("a positive array extent"),
            }
            self.expect_punct("]")?;
        }
        let init = if allow_init && self.eat_punct("=") {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(Declarator {
            name,
            stars,
            dims,
            init,
            pos,
        })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if self.eat_punct(")") {
            return Ok(out);
        }
        if *self.peek() == Tok::Kw(Kw::Void) && matches!(self.peek_at(1), Tok::Punct(")")) {
            self.bump();
            self.bump();
            return Ok(out);
        }
        loop {
            let spec = self.type_spec()?;
            let decl = self.declarator(false)?;
            out.push(Param { spec, decl });
            if self.eat_punct(")") {
                return Ok(out);
            }
            self.expect_punct(",")?;
        }
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let mut out = Vec::new();
        while !self.eat_punct("}") {
            if *self.peek() == Tok::Eof {
                return self.error("`}`");
            }
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn body(&mut self) -> PResult<Vec<Stmt>> {
        if self.is_punct("{") {
            self.block()
        } else {
            Ok(vec![self.stmt()?])
        }
    }

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect_punct("(")?;
        let e = self.expr()?;
        self.expect_punct(")")?;
        Ok(e)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let pos = self.pos();
        if self.is_punct("{") {
            return Ok(Stmt::Block(self.block()?));
        }
        if self.eat_punct(";") {
            return Ok(Stmt::Block(Vec::new()));
        }
        match self.peek() {
            Tok::Kw(Kw::If) => {
                self.bump();
                let cond = self.paren_expr()?;
                let then_branch = self.body()?;
                let else_branch = if self.eat_kw(Kw::Else) {
                    Some(self.body()?)
                } else {
                    None
                };
                return Ok(Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                    pos,
                });
            }
            Tok::Kw(Kw::While) => {
                self.bump();
                let cond = self.paren_expr()?;
                let body = self.body()?;
                return Ok(Stmt::While { cond, body, pos });
            }
            Tok::Kw(Kw::Return) => {
                self.bump();
                let value = if self.is_punct(";") {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect_punct(";")?;
                return Ok(Stmt::Return(value, pos));
            }
            Tok::Kw(Kw::Use) => {
                self.bump();
                self.expect_punct("(")?;
                let mut exprs = Vec::new();
                if !self.is_punct(")") {
                    exprs.push(self.expr()?);
                    while self.eat_punct(",") {
                        exprs.push(self.expr()?);
                    }
                }
                self.expect_punct(")")?;
                self.expect_punct(";")?;
                return Ok(Stmt::Use { exprs, pos });
            }
            Tok::Kw(Kw::Other) => {
                self.bump();
                self.expect_punct(";")?;
                return Ok(Stmt::Other(pos));
            }
            _ => {}
        }
        if self.starts_type_at(0) {
            let spec = self.type_spec()?;
            let declarators = if self.eat_punct(";") {
                Vec::new()
            } else {
                self.declarator_list()?
            };
            return Ok(Stmt::Decl(Decl {
                spec,
                declarators,
                pos,
            }));
        }
        let lhs = self.expr()?;
        if self.eat_punct("=") {
            let rhs = self.expr()?;
            self.expect_punct(";")?;
            return Ok(Stmt::Assign { lhs, rhs, pos });
        }
        self.expect_punct(";")?;
        Ok(Stmt::Expr(lhs))
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(0)
    }

    fn binop(&self) -> Option<BinOp> {
        let Tok::Punct(p) = self.peek() else {
            return None;
        };
        Some(match *p {
            "*" => BinOp::Mul,
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "<" => BinOp::Lt,
            ">" => BinOp::Gt,
            "<=" => BinOp::Le,
            ">=" => BinOp::Ge,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "&&" => BinOp::And,
            "||" => BinOp::Or,
            _ => return None,
        })
    }

    fn binary(&mut self, min: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            if op.prec() < min {
                break;
            }
            let pos = self.bump().1;
            let rhs = self.binary(op.prec() + 1)?;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        let op = match self.peek() {
            Tok::Punct("*") => Some(UnOp::Deref),
            Tok::Punct("&") => Some(UnOp::AddrOf),
            Tok::Punct("-") => Some(UnOp::Neg),
            Tok::Punct("!") => Some(UnOp::Not),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Unary(op, Box::new(e)), pos));
        }
        if self.eat_kw(Kw::Sizeof) {
            self.expect_punct("(")?;
            let tn = self.type_name()?;
            self.expect_punct(")")?;
            return Ok(Expr::new(ExprKind::Sizeof(tn), pos));
        }
        if self.is_punct("(") && self.starts_type_at(1) {
            self.bump();
            let tn = self.type_name()?;
            self.expect_punct(")")?;
            let e = self.unary()?;
            return Ok(Expr::new(ExprKind::Cast(tn, Box::new(e)), pos));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            let pos = self.pos();
            if self.eat_punct(".") {
                let (f, _) = self.expect_ident()?;
                e = Expr::new(ExprKind::Field(Box::new(e), f), pos);
            } else if self.eat_punct("->") {
                let (f, _) = self.expect_ident()?;
                e = Expr::new(ExprKind::Arrow(Box::new(e), f), pos);
            } else if self.eat_punct("[") {
                let i = self.expr()?;
                self.expect_punct("]")?;
                e = Expr::new(ExprKind::Index(Box::new(e), Box::new(i)), pos);
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                if self.eat_punct("(") {
                    let mut args = Vec::new();
                    if !self.eat_punct(")") {
                        loop {
                            args.push(self.expr()?);
                            if self.eat_punct(")") {
                                break;
                            }
                            self.expect_punct(",")?;
                        }
                    }
                    return Ok(Expr::new(ExprKind::Call(name, args), pos));
                }
                Ok(Expr::new(ExprKind::Ident(name), pos))
            }
            Tok::Int(k) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(k), pos))
            }
            Tok::Kw(Kw::Null) => {
                self.bump();
                Ok(Expr::new(ExprKind::Null, pos))
            }
            Tok::Punct("(") => self.paren_expr(),
            _ => self.error("an expression"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(e: &Expr) -> String {
        use ExprKind::*;
        match &e.kind {
            Ident(s) => s.clone(),
            Int(k) => alloc::format!("{k}"),
            Null => "NULL".into(),
            Field(b, f) => alloc::format!("Dot({}, {f})", show(b)),
            Arrow(b, f) => alloc::format!("Arrow({}, {f})", show(b)),
            Index(b, i) => alloc::format!("Index({}, {})", show(b), show(i)),
            Call(n, _) => alloc::format!("Call({n})"),
            Sizeof(_) => "Sizeof".into(),
            Cast(_, e) => alloc::format!("Cast({})", show(e)),
            Unary(op, e) => alloc::format!("{op:?}({})", show(e)),
            Binary(op, a, b) => alloc::format!("{op:?}({}, {})", show(a), show(b)),
        }
    }

    fn parsed(src: &str) -> String {
        show(&parse_expr(src).unwrap())
    }

    #[test]
    fn c_precedence() {
        assert_eq!(parsed("x->f->f"), "Arrow(Arrow(x, f), f)");
        assert_eq!(parsed("*(s + 5)"), "Deref(Add(s, 5))");
        assert_eq!(parsed("&a->g"), "AddrOf(Arrow(a, g))");
        assert_eq!(parsed("*t + 5"), "Add(Deref(t), 5)");
        assert_eq!(parsed("&q[3] + 5"), "Add(AddrOf(Index(q, 3)), 5)");
        assert_eq!(parsed("a - b - c"), "Sub(Sub(a, b), c)");
        assert_eq!(parsed("p != NULL && i < 2 * n"), "And(Ne(p, NULL), Lt(i, Mul(2, n)))");
    }

    #[test]
    fn declarations_and_procedures() {
        let prog = parse(
            "typedef struct B { struct B *f; } sB;\n\
             sB *x, *y, b;\n\
             int main(void) { sB *z = &b; x = z; if (x) y = x; else { other; } return 0; }",
        )
        .unwrap();
        assert_eq!(prog.items.len(), 3);
        let Item::Proc(p) = &prog.items[2] else {
            panic!("expected a procedure")
        };
        assert_eq!(p.name, "main");
        assert_eq!(p.body.len(), 4);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("int main() {\n  x = ;\n}").unwrap_err();
        assert_eq!((e.line, e.col), (2, 7));
        assert!(matches!(e.kind, ErrorKind::Expected { .. }));
        assert!(parse("int main() { x = y; ").is_err());
        assert!(parse("x = y;").is_err());
    }
}
