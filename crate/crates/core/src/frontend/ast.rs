//! Surface syntax tree.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

/// Source position (1-based). Positions never take part in equality, so
/// trees compare structurally.
#[derive(Clone, Copy, Debug, Default, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeSpec {
    /// Builtin scalar, possibly multi-word (`unsigned int`).
    Scalar(String),
    /// A typedef name.
    Named(String),
    Struct(AggSpec),
    Union(AggSpec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggSpec {
    pub tag: Option<String>,
    /// `None` for a reference to a tag without a body.
    pub fields: Option<Vec<Decl>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Declarator {
    pub name: String,
    pub stars: u32,
    pub dims: Vec<u64>,
    pub init: Option<Expr>,
    pub pos: Pos,
}

/// `spec d1, d2, ...;`. A bare aggregate definition has no declarators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub spec: TypeSpec,
    pub declarators: Vec<Declarator>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeName {
    pub spec: TypeSpec,
    pub stars: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Param {
    pub spec: TypeSpec,
    pub decl: Declarator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Procedure {
    pub ret: TypeName,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Item {
    Typedef(Decl),
    Decl(Decl),
    Proc(Procedure),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Program {
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Decl(Decl),
    Assign { lhs: Expr, rhs: Expr, pos: Pos },
    Use { exprs: Vec<Expr>, pos: Pos },
    Other(Pos),
    Expr(Expr),
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Option<Vec<Stmt>>,
        pos: Pos,
    },
    While { cond: Expr, body: Vec<Stmt>, pos: Pos },
    Return(Option<Expr>, Pos),
    Block(Vec<Stmt>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnOp {
    Deref,
    AddrOf,
    Neg,
    Not,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Mul,
    Add,
    Sub,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinOp::Mul => "*",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Lt => "<",
            BinOp::Gt => ">",
            BinOp::Le => "<=",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// C binding strength; larger binds tighter.
    pub fn prec(self) -> u8 {
        match self {
            BinOp::Mul => 13,
            BinOp::Add | BinOp::Sub => 12,
            BinOp::Lt | BinOp::Gt | BinOp::Le | BinOp::Ge => 10,
            BinOp::Eq | BinOp::Ne => 9,
            BinOp::And => 5,
            BinOp::Or => 4,
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Mul | BinOp::Add | BinOp::Sub)
    }
}

pub const PREC_UNARY: u8 = 14;
pub const PREC_POSTFIX: u8 = 15;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Ident(String),
    Int(i64),
    Null,
    Field(Box<Expr>, String),
    Arrow(Box<Expr>, String),
    Index(Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
    Sizeof(TypeName),
    Cast(TypeName, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Expr {
        Expr { kind, pos }
    }

    pub fn prec(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.prec(),
            ExprKind::Unary(..) | ExprKind::Cast(..) | ExprKind::Sizeof(_) => PREC_UNARY,
            _ => PREC_POSTFIX,
        }
    }
}
