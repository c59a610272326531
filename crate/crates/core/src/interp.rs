//! A concrete interpreter, used as a soundness oracle for the analysis.
//!
//! Cells are named like abstract locations but with every offset constant
//! and every heap root tagged with its dynamic instance. Unions collapse to
//! one cell, as in the abstract model.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cfg::{Cfg, NodeKind};
use crate::eval::{const_eval, ConstValue};
use crate::ir::{IndexExpr, PointerExpr, Statement};
use crate::loc::{AccessPath, NodeId, Root, Segment, Target};
use crate::relation::{is_live, PointsToView};
use crate::solver::AnalysisResult;
use crate::types::{AggKind, Ty, TypeTable};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellRoot {
    Var(String),
    Heap { site: NodeId, instance: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub root: CellRoot,
    /// Fields and constant offsets only.
    pub segments: Vec<Segment>,
}

impl Cell {
    pub fn var(name: &str) -> Cell {
        Cell {
            root: CellRoot::Var(name.into()),
            segments: Vec::new(),
        }
    }

    fn with(&self, seg: Segment) -> Cell {
        let mut c = self.clone();
        c.segments.push(seg);
        c
    }

    /// The allocation-site name of this cell.
    pub fn abstraction(&self) -> AccessPath {
        let root = match &self.root {
            CellRoot::Var(v) => Root::Var(v.clone()),
            CellRoot::Heap { site, .. } => Root::HeapSite(*site),
        };
        AccessPath {
            root,
            segments: self.segments.clone(),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.root {
            CellRoot::Var(v) => f.write_str(v)?,
            CellRoot::Heap { site, instance } => write!(f, "o{}#{instance}", site.0)?,
        }
        for s in &self.segments {
            write!(f, ".{s}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Uninit,
    Int(i64),
    Ptr(Cell),
    /// Result of pointer arithmetic that left its object.
    Wild,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Uninit => f.write_str("uninit"),
            Value::Int(k) => write!(f, "{k}"),
            Value::Ptr(c) => write!(f, "&{c}"),
            Value::Wild => f.write_str("wild"),
        }
    }
}

pub type Memory = BTreeMap<Cell, Value>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trap {
    UninitDeref,
    WildDeref,
    IntDeref,
    OutOfBounds(Cell),
    IllTyped(Cell),
    Overflow,
}

impl fmt::Display for Trap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trap::UninitDeref => f.write_str("dereference of an uninitialised pointer"),
            Trap::WildDeref => f.write_str("dereference of a wild pointer"),
            Trap::IntDeref => f.write_str("dereference of an integer"),
            Trap::OutOfBounds(c) => write!(f, "out-of-bounds access to {c}"),
            Trap::IllTyped(c) => write!(f, "ill-typed access to {c}"),
            Trap::Overflow => f.write_str("integer overflow"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Halt {
    Finished,
    Trapped { node: NodeId, trap: Trap },
    OutOfFuel,
}

/// One executed node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub node: NodeId,
    /// Memory before the node executes.
    pub state: Memory,
    /// Pointer cells read regardless of what the node writes.
    pub reads_always: BTreeSet<Cell>,
    /// Pointer cells read to compute a value stored into `write`.
    pub reads_if_live: BTreeSet<Cell>,
    pub write: Option<Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub fingerprint: u64,
    pub steps: Vec<Step>,
    pub halt: Halt,
    pub final_state: Memory,
}

struct Machine<'a> {
    types: &'a TypeTable,
    mem: Memory,
    instances: BTreeMap<NodeId, u32>,
    reads: BTreeSet<Cell>,
}

impl<'a> Machine<'a> {
    /// Type of a cell, checking every offset against its array extent.
    fn cell_ty(&self, cell: &Cell) -> Result<&'a Ty, Trap> {
        let root = match &cell.root {
            CellRoot::Var(v) => self.types.var(v),
            CellRoot::Heap { site, .. } => self.types.root_ty(&Root::HeapSite(*site)),
        };
        let mut ty = root.ok_or_else(|| Trap::IllTyped(cell.clone()))?;
        for seg in &cell.segments {
            ty = match (seg, ty) {
                (Segment::Field(f), Ty::Agg(id)) => {
                    let agg = self.types.aggregate(*id);
                    match agg.field(f) {
                        Some(fd) if agg.kind == AggKind::Struct => &fd.ty,
                        _ => return Err(Trap::IllTyped(cell.clone())),
                    }
                }
                (Segment::Offset(k), Ty::Array(elem, n)) => {
                    if *k < 0 || *k as u64 >= *n {
                        return Err(Trap::OutOfBounds(cell.clone()));
                    }
                    elem
                }
                _ => return Err(Trap::IllTyped(cell.clone())),
            };
        }
        Ok(ty)
    }

    fn holds_pointer(&self, ty: &Ty) -> bool {
        ty.is_pointer() || (self.types.is_union_ty(ty) && self.types.contains_pointer(ty))
    }

    /// Address arithmetic: the base must have a type the segment applies to.
    /// Offsets are not bounds-checked until the cell is accessed.
    fn extend(&self, cell: Cell, seg: Segment) -> Result<Cell, Trap> {
        let ty = self.cell_ty(&cell)?;
        if self.types.is_union_ty(ty) {
            return Ok(cell);
        }
        let fits = match (&seg, ty) {
            (Segment::Field(f), Ty::Agg(id)) => self.types.aggregate(*id).field(f).is_some(),
            (Segment::Offset(_), Ty::Array(..)) => true,
            _ => false,
        };
        if fits {
            Ok(cell.with(seg))
        } else {
            Err(Trap::IllTyped(cell))
        }
    }

    fn int(&self, e: &IndexExpr) -> Result<i64, Trap> {
        let bin = |a, b, op: fn(i64, i64) -> Option<i64>| -> Result<i64, Trap> {
            op(self.int(a)?, self.int(b)?).ok_or(Trap::Overflow)
        };
        match e {
            IndexExpr::Lit(k) => Ok(*k),
            IndexExpr::Var(v) => Ok(match self.mem.get(&Cell::var(v)) {
                Some(Value::Int(k)) => *k,
                _ => 0,
            }),
            IndexExpr::Neg(a) => self.int(a)?.checked_neg().ok_or(Trap::Overflow),
            IndexExpr::Add(a, b) => bin(a, b, i64::checked_add),
            IndexExpr::Sub(a, b) => bin(a, b, i64::checked_sub),
            IndexExpr::Mul(a, b) => bin(a, b, i64::checked_mul),
        }
    }

    fn target(v: Value) -> Result<Cell, Trap> {
        match v {
            Value::Ptr(c) => Ok(c),
            Value::Uninit => Err(Trap::UninitDeref),
            Value::Wild => Err(Trap::WildDeref),
            Value::Int(_) => Err(Trap::IntDeref),
        }
    }

    fn lval(&mut self, e: &PointerExpr) -> Result<Cell, Trap> {
        match e {
            PointerExpr::Var(x) => Ok(Cell::var(x)),
            PointerExpr::Field(b, f) => {
                let c = self.lval(b)?;
                self.extend(c, Segment::Field(f.clone()))
            }
            PointerExpr::Arrow(b, f) => {
                let c = Self::target(self.rval(b)?)?;
                self.extend(c, Segment::Field(f.clone()))
            }
            PointerExpr::Deref(b) => Self::target(self.rval(b)?),
            PointerExpr::Index(b, i) => {
                let c = self.lval(b)?;
                let k = self.int(i)?;
                self.extend(c, Segment::Offset(k))
            }
            _ => unreachable!("no l-value for `{e}`"),
        }
    }

    fn shift(v: Value, by: i64) -> Result<Value, Trap> {
        let Value::Ptr(mut c) = v else {
            return Ok(Value::Wild);
        };
        match c.segments.last_mut() {
            Some(Segment::Offset(k)) => {
                *k = k.checked_add(by).ok_or(Trap::Overflow)?;
                Ok(Value::Ptr(c))
            }
            _ => Ok(Value::Wild),
        }
    }

    /// Loads a cell, recording it as read if it holds a pointer. Aggregates
    /// are read member by member.
    fn load(&mut self, cell: Cell) -> Result<Value, Trap> {
        let ty = self.cell_ty(&cell)?;
        match ty {
            Ty::Agg(id) if !self.types.is_union_ty(ty) => {
                let fields: Vec<String> = self
                    .types
                    .aggregate(*id)
                    .fields
                    .iter()
                    .map(|f| f.name.clone())
                    .collect();
                for f in fields {
                    self.load(cell.with(Segment::Field(f)))?;
                }
                Ok(Value::Uninit)
            }
            Ty::Array(_, n) => {
                for k in 0..*n as i64 {
                    self.load(cell.with(Segment::Offset(k)))?;
                }
                Ok(Value::Uninit)
            }
            _ => {
                if self.holds_pointer(ty) {
                    self.reads.insert(cell.clone());
                }
                Ok(self.mem.get(&cell).cloned().unwrap_or(Value::Uninit))
            }
        }
    }

    fn rval(&mut self, e: &PointerExpr) -> Result<Value, Trap> {
        match e {
            PointerExpr::AddrOf(b) => Ok(Value::Ptr(self.lval(b)?)),
            PointerExpr::AddrOfPlus(b, i) => {
                let c = self.lval(b)?;
                let k = self.int(i)?;
                Self::shift(Value::Ptr(c), k)
            }
            PointerExpr::Plus(b, i) => {
                let v = self.rval(b)?;
                let k = self.int(i)?;
                Self::shift(v, k)
            }
            PointerExpr::Malloc { .. } => unreachable!("malloc is handled by the assignment"),
            _ => {
                let c = self.lval(e)?;
                self.load(c)
            }
        }
    }

    fn store(&mut self, cell: &Cell, v: Value) -> Result<(), Trap> {
        self.cell_ty(cell)?;
        self.mem.insert(cell.clone(), v);
        Ok(())
    }

    fn take_reads(&mut self) -> BTreeSet<Cell> {
        core::mem::take(&mut self.reads)
    }

    /// Executes one statement; returns the step record and any trap.
    fn exec(&mut self, node: NodeId, stmt: &Statement, step: &mut Step) -> Result<(), Trap> {
        match stmt {
            Statement::PtrAssign { lhs, rhs } => {
                let dst = self.lval(lhs);
                step.reads_always = self.take_reads();
                let dst = dst?;
                let v = match rhs {
                    PointerExpr::Malloc { .. } => {
                        let n = self.instances.entry(node).or_insert(0);
                        *n += 1;
                        Ok(Value::Ptr(Cell {
                            root: CellRoot::Heap {
                                site: node,
                                instance: *n,
                            },
                            segments: Vec::new(),
                        }))
                    }
                    _ => self.rval(rhs),
                };
                step.reads_if_live = self.take_reads();
                self.store(&dst, v?)?;
                step.write = Some(dst);
            }
            Statement::ScalarAssign { lhs, rhs } => {
                let dst = self.lval(lhs);
                step.reads_always = self.take_reads();
                let dst = dst?;
                let v = self.int(rhs)?;
                self.store(&dst, Value::Int(v))?;
                step.write = Some(dst);
            }
            Statement::Use(exprs) => {
                let mut result = Ok(());
                for e in exprs {
                    if let Err(t) = self.rval(e) {
                        result = Err(t);
                        break;
                    }
                }
                step.reads_always = self.take_reads();
                result?;
            }
            Statement::Other => {}
        }
        Ok(())
    }
}

/// Runs a procedure from Start. Branch nodes consume `branches` in order
/// (`true` takes the branch); once exhausted every branch falls through.
pub fn run(cfg: &Cfg, types: &TypeTable, branches: &[bool], fuel: usize) -> Trace {
    let mut m = Machine {
        types,
        mem: Memory::new(),
        instances: BTreeMap::new(),
        reads: BTreeSet::new(),
    };
    let mut script = branches.iter().copied();
    let mut steps = Vec::new();
    let mut node = cfg.start();
    let halt = loop {
        if steps.len() >= fuel {
            break Halt::OutOfFuel;
        }
        let mut step = Step {
            node,
            state: m.mem.clone(),
            reads_always: BTreeSet::new(),
            reads_if_live: BTreeSet::new(),
            write: None,
        };
        let n = cfg.node(node);
        let outcome = match &n.kind {
            NodeKind::Stmt(s) => m.exec(node, s, &mut step),
            NodeKind::Start | NodeKind::End => Ok(()),
        };
        steps.push(step);
        if let Err(trap) = outcome {
            break Halt::Trapped { node, trap };
        }
        node = match (n.branch, n.succs.as_slice()) {
            (Some((taken, not_taken)), _) => {
                if script.next().unwrap_or(false) {
                    taken
                } else {
                    not_taken
                }
            }
            (None, [next, ..]) => *next,
            (None, []) => break Halt::Finished,
        };
    };
    Trace {
        fingerprint: cfg.fingerprint(),
        steps,
        halt,
        final_state: m.mem,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A cell read later is missing from Lin.
    NotLive { step: usize, node: NodeId, cell: Cell },
    /// The cell's concrete pointee is not covered by Ain.
    MissingPair {
        step: usize,
        node: NodeId,
        cell: Cell,
        value: Value,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NotLive { step, node, cell } => {
                write!(f, "step {step} (node {node}): {cell} is read later but not in Lin")
            }
            Violation::MissingPair {
                step,
                node,
                cell,
                value,
            } => write!(
                f,
                "step {step} (node {node}): {cell} = {value} is not covered by Ain"
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("trace and analysis result belong to different programs")]
pub struct Mismatch;

/// Cells whose current value is read before being overwritten, per step.
pub fn dynamic_liveness(trace: &Trace) -> Vec<BTreeSet<Cell>> {
    let mut live = BTreeSet::new();
    let mut out = Vec::with_capacity(trace.steps.len());
    for step in trace.steps.iter().rev() {
        if let Some(w) = &step.write {
            if live.remove(w) {
                live.extend(step.reads_if_live.iter().cloned());
            }
        }
        live.extend(step.reads_always.iter().cloned());
        out.push(live.clone());
    }
    out.reverse();
    out
}

/// Checks every live cell of every step against Lin and Ain of its node.
pub fn check_soundness(trace: &Trace, result: &AnalysisResult) -> Result<Vec<Violation>, Mismatch> {
    if trace.fingerprint != result.fingerprint
        || trace.steps.iter().any(|s| s.node.0 as usize >= result.nodes.len())
    {
        return Err(Mismatch);
    }
    let mut out = Vec::new();
    for (i, (step, live)) in trace.steps.iter().zip(dynamic_liveness(trace)).enumerate() {
        let at = result.node(step.node);
        for cell in live {
            let abs = cell.abstraction();
            if !is_live(&abs, &at.lin) {
                out.push(Violation::NotLive {
                    step: i,
                    node: step.node,
                    cell,
                });
                continue;
            }
            let value = step.state.get(&cell).cloned().unwrap_or(Value::Uninit);
            let covered = match &value {
                Value::Int(_) => true,
                Value::Uninit => at.ain.covers(&abs, &Target::Unknown),
                Value::Ptr(t) => at.ain.covers(&abs, &Target::Loc(t.abstraction())),
                Value::Wild => at.ain.image(&abs).is_all(),
            };
            if !covered {
                out.push(Violation::MissingPair {
                    step: i,
                    node: step.node,
                    cell,
                    value,
                });
            }
        }
    }
    Ok(out)
}

/// Constant index expressions evaluate as in the abstract semantics.
pub fn agrees_with_const_eval(e: &IndexExpr) -> bool {
    let m = Machine {
        types: &TypeTable::new(),
        mem: Memory::new(),
        instances: BTreeMap::new(),
        reads: BTreeSet::new(),
    };
    match (const_eval(e), m.int(e)) {
        (ConstValue::Int(a), Ok(b)) => a == b,
        (ConstValue::Int(_), Err(_)) => false,
        (ConstValue::Bottom, _) => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve, SolveOptions};
    use crate::{compile, Procedure};
    use alloc::string::ToString;

    const RUNNING: &str = "
        typedef struct B { struct B *f; } sB;
        typedef struct A { struct B g; } sA;
        int main() {
            sA *a;
            sB *x, *y, b;
            a = (sA *)malloc(sizeof(sA));
            y = &a->g;
            b.f = y;
            x = &b;
            return x->f->f;
        }";

    fn proc(src: &str) -> Procedure {
        compile(src).unwrap().remove(0)
    }

    fn show(m: &Memory) -> Vec<String> {
        m.iter().map(|(c, v)| alloc::format!("{c}={v}")).collect()
    }

    #[test]
    fn running_example_final_state() {
        let p = proc(RUNNING);
        let t = run(&p.cfg, &p.types, &[], 100);
        assert_eq!(t.halt, Halt::Finished);
        assert_eq!(t.steps.len(), p.cfg.len());
        assert_eq!(
            show(&t.final_state),
            ["a=&o1#1", "b.f=&o1#1.g", "x=&b", "y=&o1#1.g"]
        );
        let ret = t.steps.iter().rev().nth(1).unwrap();
        let reads: Vec<String> = ret.reads_always.iter().map(|c| c.to_string()).collect();
        assert_eq!(reads, ["b.f", "x", "o1#1.g.f"]);
        let r = solve(&p.cfg, &p.types, SolveOptions::default()).unwrap();
        assert_eq!(check_soundness(&t, &r), Ok(Vec::new()));
    }

    #[test]
    fn empty_program() {
        let p = proc("int main() { }");
        let t = run(&p.cfg, &p.types, &[], 10);
        assert_eq!(t.halt, Halt::Finished);
        assert_eq!(t.steps.len(), 2);
        assert!(t.final_state.is_empty());
    }

    #[test]
    fn traps_and_fuel() {
        let p = proc("int main() { int **p, *q; q = *p; }");
        let t = run(&p.cfg, &p.types, &[], 10);
        assert_eq!(
            t.halt,
            Halt::Trapped {
                node: NodeId(1),
                trap: Trap::UninitDeref
            }
        );
        // The read that trapped is still recorded.
        assert_eq!(t.steps[1].reads_if_live.len() + t.steps[1].reads_always.len(), 1);

        let p = proc("int main() { int *p, a[2]; p = &a[1]; p = p + 1; p = p + 1; }");
        let t = run(&p.cfg, &p.types, &[], 100);
        assert_eq!(show(&t.final_state), ["p=&a.3"]);

        let p = proc("int main() { int *p, a[2]; p = &a[3]; *p = 1; }");
        let t = run(&p.cfg, &p.types, &[], 100);
        assert!(matches!(t.halt, Halt::Trapped { trap: Trap::OutOfBounds(_), .. }));

        let p = proc("int main() { int *p, a; while (p) { p = &a; } }");
        let t = run(&p.cfg, &p.types, &[true; 64], 20);
        assert_eq!(t.halt, Halt::OutOfFuel);
        assert_eq!(t.steps.len(), 20);
    }

    #[test]
    fn malloc_instances_are_distinct() {
        let p = proc("int main() { int *p, *q; while (p) { q = p; p = (int *)malloc(sizeof(int)); } }");
        let t = run(&p.cfg, &p.types, &[true, true, false], 100);
        assert_eq!(show(&t.final_state), ["p=&o3#2", "q=&o3#1"]);
    }

    #[test]
    fn detects_unsound_results() {
        let p = proc(RUNNING);
        let t = run(&p.cfg, &p.types, &[], 100);
        let mut r = solve(&p.cfg, &p.types, SolveOptions::default()).unwrap();
        let ret = p.cfg.end().0 as usize - 1;
        r.nodes[ret].ain = crate::PointsTo::new();
        let v = check_soundness(&t, &r).unwrap();
        assert!(!v.is_empty());
        assert!(v.iter().all(|v| matches!(v, Violation::MissingPair { .. })));
        r.nodes[ret].lin.clear();
        assert!(check_soundness(&t, &r)
            .unwrap()
            .iter()
            .any(|v| matches!(v, Violation::NotLive { .. })));

        let other = proc("int main() { int *p; p = p; }");
        let t = run(&other.cfg, &other.types, &[], 10);
        assert_eq!(check_soundness(&t, &r), Err(Mismatch));
    }

    #[test]
    fn index_arithmetic_matches_folding() {
        use IndexExpr as E;
        assert!(agrees_with_const_eval(&E::plus(E::Lit(2), E::negate(E::Lit(7)))));
        assert!(agrees_with_const_eval(&E::Mul(alloc::boxed::Box::new(E::Lit(-3)), alloc::boxed::Box::new(E::Lit(5)))));
    }
}
