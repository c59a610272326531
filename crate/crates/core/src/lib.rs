//! Liveness-based flow-sensitive points-to analysis for a small C-like
//! language with structs, arrays, pointer arithmetic, heap allocation and
//! unions.
//!
//! [`compile`] runs the front half of the pipeline (parse, type check,
//! normalise, build CFGs); [`solver::solve`] computes liveness and points-to
//! information per CFG node.

#![no_std]

extern crate alloc;

pub mod cfg;
pub mod eval;
pub mod extract;
pub mod frontend;
pub mod interp;
pub mod ir;
pub mod loc;
pub mod relation;
pub mod solver;
pub mod types;

use alloc::string::String;
use alloc::vec::Vec;

pub use cfg::{build_cfg, Cfg, CfgError, Node, NodeKind};
pub use extract::{extract, ExtractorResult};
pub use solver::{solve, AnalysisResult, Mode, NodeState, SolveOptions};
pub use eval::{const_eval, must, ConstValue, Eval};
pub use frontend::FrontendError;
pub use ir::{IndexExpr, IrError, PointerExpr, Statement, Stmt};
pub use loc::{get_heap_loc, is_heap, overlaps, AccessPath, NodeId, Root, Segment, Target};
pub use relation::{restrict, PathSet, PointsTo, PointsToView, TargetSet};
pub use types::{Ty, TypeTable};

/// A procedure ready for analysis. `types` includes its allocation sites.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Procedure {
    pub name: String,
    pub types: TypeTable,
    pub body: Vec<Stmt>,
    pub cfg: Cfg,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error("in `{procedure}`: {error}")]
    Ir { procedure: String, error: IrError },
    #[error("in `{procedure}`: {error}")]
    Cfg { procedure: String, error: CfgError },
}

pub fn compile(src: &str) -> Result<Vec<Procedure>, CompileError> {
    let program = frontend::parse(src)?;
    let mut out = Vec::new();
    for lowered in frontend::lower(&program)? {
        let procedure = lowered.name;
        let body = ir::normalize(&lowered.body, &lowered.types).map_err(|error| {
            CompileError::Ir {
                procedure: procedure.clone(),
                error,
            }
        })?;
        let cfg = build_cfg(&body).map_err(|error| CompileError::Cfg {
            procedure: procedure.clone(),
            error,
        })?;
        let mut types = lowered.types;
        for (node, ty) in cfg.heap_sites() {
            types.declare_heap_site(node, ty);
        }
        out.push(Procedure {
            name: procedure,
            types,
            body,
            cfg,
        });
    }
    Ok(out)
}
