//! Control-flow graphs over [`Statement`]s.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::ir::{PointerExpr, Statement, Stmt};
use crate::loc::NodeId;
use crate::types::Ty;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Start,
    End,
    Stmt(Statement),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub succs: Vec<NodeId>,
    pub preds: Vec<NodeId>,
    /// `(taken, not taken)` successors of a branch condition.
    pub branch: Option<(NodeId, NodeId)>,
}

impl Node {
    pub fn statement(&self) -> Option<&Statement> {
        match &self.kind {
            NodeKind::Stmt(s) => Some(s),
            _ => None,
        }
    }
}

/// One procedure's CFG. Node `0` is Start, statements are numbered from 1 in
/// source order, and the last node is End.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cfg {
    nodes: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CfgError {
    #[error("statement {0} is unreachable")]
    Unreachable(NodeId),
}

#[derive(Clone, Copy)]
enum Edge {
    Seq,
    Taken,
    NotTaken,
}

struct Builder {
    nodes: Vec<Node>,
    returns: Vec<NodeId>,
}

impl Builder {
    fn add(&mut self, kind: NodeKind) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            id,
            kind,
            succs: Vec::new(),
            preds: Vec::new(),
            branch: None,
        });
        id
    }

    fn connect(&mut self, from: NodeId, edge: Edge, to: NodeId) {
        let src = &mut self.nodes[from.0 as usize];
        if !src.succs.contains(&to) {
            src.succs.push(to);
        }
        match edge {
            Edge::Seq => {}
            Edge::Taken => {
                let (_, f) = src.branch.unwrap_or((to, to));
                src.branch = Some((to, f));
            }
            Edge::NotTaken => {
                let (t, _) = src.branch.unwrap_or((to, to));
                src.branch = Some((t, to));
            }
        }
        let dst = &mut self.nodes[to.0 as usize];
        if !dst.preds.contains(&from) {
            dst.preds.push(from);
        }
    }

    fn enter(&mut self, preds: &[(NodeId, Edge)], kind: NodeKind) -> Result<NodeId, CfgError> {
        let id = self.add(kind);
        if preds.is_empty() {
            return Err(CfgError::Unreachable(id));
        }
        for &(p, e) in preds {
            self.connect(p, e, id);
        }
        Ok(id)
    }

    fn block(
        &mut self,
        stmts: &[Stmt],
        mut preds: Vec<(NodeId, Edge)>,
    ) -> Result<Vec<(NodeId, Edge)>, CfgError> {
        for stmt in stmts {
            preds = match stmt {
                Stmt::Simple(s) => {
                    let n = self.enter(&preds, NodeKind::Stmt(s.clone()))?;
                    vec![(n, Edge::Seq)]
                }
                // Normalisation removes these; keep the CFG total anyway.
                Stmt::AggregateAssign { .. } => {
                    let n = self.enter(&preds, NodeKind::Stmt(Statement::Other))?;
                    vec![(n, Edge::Seq)]
                }
                Stmt::Return(exprs) => {
                    let n = self.enter(&preds, NodeKind::Stmt(Statement::Use(exprs.clone())))?;
                    self.returns.push(n);
                    Vec::new()
                }
                Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                } => {
                    let c = self.enter(&preds, NodeKind::Stmt(Statement::Use(cond.clone())))?;
                    let mut exits = self.block(then_branch, vec![(c, Edge::Taken)])?;
                    exits.extend(self.block(else_branch, vec![(c, Edge::NotTaken)])?);
                    exits
                }
                Stmt::While { cond, body } => {
                    let c = self.enter(&preds, NodeKind::Stmt(Statement::Use(cond.clone())))?;
                    for (p, e) in self.block(body, vec![(c, Edge::Taken)])? {
                        self.connect(p, e, c);
                    }
                    vec![(c, Edge::NotTaken)]
                }
            };
        }
        Ok(preds)
    }
}

/// Builds the CFG of a normalised procedure body. Conditions of `if` and
/// `while` become `Use` nodes with two successors; `return` becomes a `Use`
/// node with an edge to End.
pub fn build_cfg(body: &[Stmt]) -> Result<Cfg, CfgError> {
    let mut b = Builder {
        nodes: Vec::new(),
        returns: Vec::new(),
    };
    let start = b.add(NodeKind::Start);
    let exits = b.block(body, vec![(start, Edge::Seq)])?;
    let end = b.add(NodeKind::End);
    for (p, e) in exits {
        b.connect(p, e, end);
    }
    for r in core::mem::take(&mut b.returns) {
        b.connect(r, Edge::Seq, end);
    }
    Ok(Cfg { nodes: b.nodes })
}

impl Cfg {
    pub fn start(&self) -> NodeId {
        NodeId(0)
    }

    pub fn end(&self) -> NodeId {
        NodeId(self.nodes.len() as u32 - 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() == 2
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0 as usize]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn ids(&self) -> impl DoubleEndedIterator<Item = NodeId> + '_ {
        self.nodes.iter().map(|n| n.id)
    }

    /// Allocation sites and the types of the cells they allocate.
    pub fn heap_sites(&self) -> Vec<(NodeId, Ty)> {
        self.nodes
            .iter()
            .filter_map(|n| match n.statement()? {
                Statement::PtrAssign {
                    rhs: PointerExpr::Malloc { ty, .. },
                    ..
                } => Some((n.id, ty.clone())),
                _ => None,
            })
            .collect()
    }

    /// Reverse postorder from Start.
    pub fn reverse_postorder(&self) -> Vec<NodeId> {
        let mut seen = BTreeSet::new();
        let mut post = Vec::with_capacity(self.nodes.len());
        // Iterative DFS: (node, next successor index).
        let mut stack = vec![(self.start(), 0usize)];
        seen.insert(self.start());
        while let Some((n, i)) = stack.pop() {
            let succs = &self.node(n).succs;
            if i < succs.len() {
                stack.push((n, i + 1));
                let s = succs[i];
                if seen.insert(s) {
                    stack.push((s, 0));
                }
            } else {
                post.push(n);
            }
        }
        post.reverse();
        post
    }

    /// FNV-1a hash of the statements and edges, identifying the program
    /// that traces and analysis results were computed for.
    pub fn fingerprint(&self) -> u64 {
        struct Fnv(u64);
        impl core::fmt::Write for Fnv {
            fn write_str(&mut self, s: &str) -> core::fmt::Result {
                for b in s.bytes() {
                    self.0 = (self.0 ^ u64::from(b)).wrapping_mul(0x100_0000_01b3);
                }
                Ok(())
            }
        }
        let mut h = Fnv(0xcbf2_9ce4_8422_2325);
        for n in &self.nodes {
            let _ = match &n.kind {
                NodeKind::Start => core::fmt::Write::write_str(&mut h, "start"),
                NodeKind::End => core::fmt::Write::write_str(&mut h, "end"),
                NodeKind::Stmt(s) => core::fmt::write(&mut h, format_args!("{s}")),
            };
            let _ = core::fmt::write(&mut h, format_args!("{:?};", n.succs));
        }
        h.0
    }

    pub fn is_reachable_from_start(&self) -> bool {
        self.reverse_postorder().len() == self.nodes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::PointerExpr;

    fn assign(x: &str, y: &str) -> Stmt {
        Stmt::Simple(Statement::PtrAssign {
            lhs: PointerExpr::var(x),
            rhs: PointerExpr::var(y),
        })
    }

    #[test]
    fn empty_body() {
        let cfg = build_cfg(&[]).unwrap();
        assert_eq!(cfg.len(), 2);
        assert_eq!(cfg.node(cfg.start()).succs, [cfg.end()]);
        assert!(cfg.node(cfg.start()).preds.is_empty());
    }

    #[test]
    fn straight_line() {
        let cfg = build_cfg(&[assign("x", "y"), assign("y", "x")]).unwrap();
        assert_eq!(cfg.len(), 4);
        assert_eq!(cfg.node(NodeId(1)).succs, [NodeId(2)]);
        assert_eq!(cfg.node(NodeId(2)).succs, [NodeId(3)]);
        assert!(cfg.node(cfg.end()).succs.is_empty());
    }

    #[test]
    fn while_has_back_edge() {
        let body = [Stmt::While {
            cond: alloc::vec![PointerExpr::var("p")],
            body: alloc::vec![assign("x", "y")],
        }];
        let cfg = build_cfg(&body).unwrap();
        let cond = cfg.node(NodeId(1));
        assert_eq!(cond.branch, Some((NodeId(2), NodeId(3))));
        assert_eq!(cfg.node(NodeId(2)).succs, [NodeId(1)]);
        assert!(cond.preds.contains(&NodeId(2)));
        assert!(cfg.is_reachable_from_start());
    }

    #[test]
    fn if_without_else_joins() {
        let body = [
            Stmt::If {
                cond: alloc::vec![],
                then_branch: alloc::vec![assign("x", "y")],
                else_branch: alloc::vec![],
            },
            assign("y", "x"),
        ];
        let cfg = build_cfg(&body).unwrap();
        assert_eq!(cfg.node(NodeId(1)).branch, Some((NodeId(2), NodeId(3))));
        assert_eq!(cfg.node(NodeId(3)).preds, [NodeId(2), NodeId(1)]);
    }

    #[test]
    fn code_after_return_is_rejected() {
        let body = [Stmt::Return(alloc::vec![]), assign("x", "y")];
        assert_eq!(build_cfg(&body), Err(CfgError::Unreachable(NodeId(2))));
    }
}
