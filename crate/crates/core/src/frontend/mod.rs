//! Parser and type checker for the C-like input language.
//!
//! ```text
//! typedef struct B { struct B *f; } sB;
//! int main() {
//!     sB *x, b;
//!     x = &b;
//!     use(x->f);
//! }
//! ```
//!
//! Besides assignments, statements are `use(e, ...);`, `other;`, `if`,
//! `while` and `return`. Calls other than `malloc(sizeof(T))` are opaque.

pub mod ast;
pub mod lexer;
pub mod lower;
pub mod parser;
pub mod printer;

use alloc::string::String;

pub use ast::Pos;
pub use lower::{lower, LoweredProc};
pub use parser::{parse, parse_expr};
pub use printer::{print_expr, print_program};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {kind}")]
pub struct FrontendError {
    pub line: u32,
    pub col: u32,
    pub kind: ErrorKind,
}

impl FrontendError {
    pub fn at(pos: Pos, kind: ErrorKind) -> Self {
        FrontendError {
            line: pos.line,
            col: pos.col,
            kind,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unterminated comment")]
    UnterminatedComment,
    #[error("integer literal out of range")]
    IntegerOverflow,
    #[error("expected {expected}, found {found}")]
    Expected { expected: String, found: String },
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("incomplete type `{0}`")]
    IncompleteType(String),
    #[error("`{ty}` has no field `{field}`")]
    NoField { ty: String, field: String },
    #[error("`{0}` is not a struct or union")]
    NotAggregate(String),
    #[error("`{0}` is not a pointer")]
    NotAPointer(String),
    #[error("`{0}` is declared twice")]
    Redeclared(String),
    #[error("identifier `{0}` is reserved for allocation sites")]
    ReservedName(String),
    #[error("cannot assign `{rhs}` to `{lhs}`")]
    TypeMismatch { lhs: String, rhs: String },
    #[error("`{0}` has no l-value")]
    NotAssignable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
