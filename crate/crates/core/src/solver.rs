//! The coupled fixpoint of backward liveness and forward points-to
//! propagation.
//!
//! ```text
//! Lout_n = ∅ if n is End, else ∪ Lin_s over successors
//! Lin_n  = (Lout_n − Kill_n) ∪ Ref_n
//! Ain_n  = Lin_n × {?} if n is Start, else (∪ Aout_p over predecessors)|Lin_n
//! Aout_n = ((Ain_n − Kill_n × T) ∪ Def_n × Pointee_n)|Lout_n
//! ```

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::cfg::Cfg;
use crate::extract::{extract, ExtractorResult};
use crate::loc::{AccessPath, NodeId, Target};
use crate::relation::{restrict, PathSet, PointsTo, TargetSet};
use crate::types::TypeTable;

pub type Liveness = BTreeSet<AccessPath>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Mode {
    /// Points-to information only for live pointers.
    #[default]
    Lfcpa,
    /// Every pointer is live everywhere: classic flow-sensitive points-to.
    Baseline,
}

/// Worklist priority. `Reversed` visits nodes against the natural direction
/// of each phase; results are identical, only the work differs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Order {
    #[default]
    Natural,
    Reversed,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub mode: Mode,
    pub order: Order,
    /// Record the per-node values after every phase.
    pub record_snapshots: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodeState {
    pub lin: Liveness,
    pub lout: Liveness,
    pub ain: PointsTo,
    pub aout: PointsTo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Liveness,
    PointsTo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub round: usize,
    pub phase: Phase,
    pub nodes: Vec<NodeState>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub rounds: usize,
    pub liveness_steps: usize,
    pub points_to_steps: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisResult {
    pub mode: Mode,
    /// [`Cfg::fingerprint`] of the analysed procedure.
    pub fingerprint: u64,
    /// Indexed by node id.
    pub nodes: Vec<NodeState>,
    /// Extractor values computed from the final Ain and Lout.
    pub extractors: Vec<ExtractorResult>,
    pub stats: Stats,
    pub snapshots: Vec<Snapshot>,
}

impl AnalysisResult {
    pub fn node(&self, id: NodeId) -> &NodeState {
        &self.nodes[id.0 as usize]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("fixpoint iteration exceeded {limit} steps")]
    NonTermination { limit: usize },
}

/// The equations of one procedure, with "all pointers" sets materialised
/// against the procedure's pointer universe.
struct Equations<'a> {
    cfg: &'a Cfg,
    types: &'a TypeTable,
    mode: Mode,
    universe: Liveness,
}

impl<'a> Equations<'a> {
    fn new(cfg: &'a Cfg, types: &'a TypeTable, mode: Mode) -> Self {
        Equations {
            cfg,
            types,
            mode,
            universe: types.pointer_universe(),
        }
    }

    fn materialise(&self, set: &PathSet) -> Liveness {
        match set {
            PathSet::All => self.universe.clone(),
            PathSet::Paths(ps) => ps.clone(),
        }
    }

    fn restrict(&self, a: &PointsTo, live: &Liveness) -> PointsTo {
        match self.mode {
            Mode::Lfcpa => restrict(a, live),
            Mode::Baseline => a.clone(),
        }
    }

    fn extract(&self, n: NodeId, st: &[NodeState]) -> ExtractorResult {
        let s = &st[n.0 as usize];
        extract(self.cfg.node(n).statement(), n, &s.ain, &s.lout, self.types)
    }

    fn lout(&self, n: NodeId, st: &[NodeState]) -> Liveness {
        if self.mode == Mode::Baseline {
            return self.universe.clone();
        }
        let mut out = Liveness::new();
        for s in &self.cfg.node(n).succs {
            out.extend(st[s.0 as usize].lin.iter().cloned());
        }
        out
    }

    fn lin(&self, lout: &Liveness, ext: &ExtractorResult) -> Liveness {
        if self.mode == Mode::Baseline {
            return self.universe.clone();
        }
        let mut lin: Liveness = match &ext.kill {
            PathSet::All => lout
                .iter()
                .filter(|p| self.types.is_approx(p))
                .cloned()
                .collect(),
            PathSet::Paths(k) => lout.difference(k).cloned().collect(),
        };
        lin.extend(self.materialise(&ext.refs));
        lin
    }

    fn ain(&self, n: NodeId, st: &[NodeState]) -> PointsTo {
        let lin = &st[n.0 as usize].lin;
        if n == self.cfg.start() {
            let mut a = PointsTo::new();
            for p in lin {
                a.insert(p.clone(), Target::Unknown);
            }
            return a;
        }
        let mut joined = PointsTo::new();
        for p in &self.cfg.node(n).preds {
            joined.extend(&st[p.0 as usize].aout);
        }
        let mut a = self.restrict(&joined, lin);
        a.drop_subsumed();
        a
    }

    fn aout(&self, ain: &PointsTo, lout: &Liveness, ext: &ExtractorResult) -> PointsTo {
        let mut a = ain.clone();
        match &ext.kill {
            PathSet::All => a.retain_sources(|p| self.types.is_approx(p)),
            PathSet::Paths(k) => a.retain_sources(|p| !k.contains(p)),
        }
        let defs: Liveness = match &ext.def {
            // Only the live pointers survive the restriction below.
            PathSet::All => lout.clone(),
            PathSet::Paths(d) => d.clone(),
        };
        if !matches!(&ext.pointee, TargetSet::Targets(t) if t.is_empty()) {
            for d in defs {
                a.insert_all(d, &ext.pointee);
            }
        }
        let mut a = self.restrict(&a, lout);
        a.drop_subsumed();
        a
    }
}

fn ranks(order: &[NodeId]) -> BTreeMap<NodeId, usize> {
    order.iter().enumerate().map(|(i, n)| (*n, i)).collect()
}

struct Worklist {
    rank: BTreeMap<NodeId, usize>,
    queue: BTreeSet<(usize, NodeId)>,
}

impl Worklist {
    fn new(order: Vec<NodeId>) -> Self {
        let rank = ranks(&order);
        let queue = order.iter().map(|n| (rank[n], *n)).collect();
        Worklist { rank, queue }
    }

    fn push(&mut self, n: NodeId) {
        if let Some(&r) = self.rank.get(&n) {
            self.queue.insert((r, n));
        }
    }

    fn pop(&mut self) -> Option<NodeId> {
        self.queue.pop_first().map(|(_, n)| n)
    }
}

/// Step budget: each step that changes a value moves it up a finite lattice.
fn step_limit(cfg: &Cfg, types: &TypeTable) -> usize {
    let s = types.pointer_universe().len() + 1;
    let t = types.location_count() + 2;
    let per_node = s.saturating_mul(t).saturating_add(s).saturating_mul(4);
    cfg.len().saturating_mul(per_node).saturating_add(1000)
}

pub fn solve(cfg: &Cfg, types: &TypeTable, options: SolveOptions) -> Result<AnalysisResult, SolveError> {
    let eq = Equations::new(cfg, types, options.mode);
    let mut st = vec![NodeState::default(); cfg.len()];
    let rpo = cfg.reverse_postorder();
    let mut backward = rpo.clone();
    backward.reverse();
    let (fwd_order, bwd_order) = match options.order {
        Order::Natural => (rpo, backward),
        Order::Reversed => (backward, rpo),
    };
    let limit = step_limit(cfg, types);
    let mut stats = Stats::default();
    let mut snapshots = Vec::new();
    loop {
        stats.rounds += 1;
        let mut changed = false;

        let mut work = Worklist::new(bwd_order.clone());
        while let Some(n) = work.pop() {
            stats.liveness_steps += 1;
            if stats.liveness_steps + stats.points_to_steps > limit {
                return Err(SolveError::NonTermination { limit });
            }
            let lout = eq.lout(n, &st);
            st[n.0 as usize].lout = lout;
            let ext = eq.extract(n, &st);
            let s = &mut st[n.0 as usize];
            let lin = eq.lin(&s.lout, &ext);
            if lin != s.lin {
                s.lin = lin;
                changed = true;
                for p in &cfg.node(n).preds {
                    work.push(*p);
                }
            }
        }
        if options.record_snapshots {
            snapshots.push(Snapshot {
                round: stats.rounds,
                phase: Phase::Liveness,
                nodes: st.clone(),
            });
        }

        let mut work = Worklist::new(fwd_order.clone());
        while let Some(n) = work.pop() {
            stats.points_to_steps += 1;
            if stats.liveness_steps + stats.points_to_steps > limit {
                return Err(SolveError::NonTermination { limit });
            }
            let ain = eq.ain(n, &st);
            let ain_changed = ain != st[n.0 as usize].ain;
            st[n.0 as usize].ain = ain;
            let ext = eq.extract(n, &st);
            let s = &st[n.0 as usize];
            let aout = eq.aout(&s.ain, &s.lout, &ext);
            let out_changed = aout != s.aout;
            st[n.0 as usize].aout = aout;
            changed |= ain_changed || out_changed;
            if out_changed {
                for s in &cfg.node(n).succs {
                    work.push(*s);
                }
            }
        }
        if options.record_snapshots {
            snapshots.push(Snapshot {
                round: stats.rounds,
                phase: Phase::PointsTo,
                nodes: st.clone(),
            });
        }
        if !changed {
            break;
        }
    }
    let extractors = cfg.ids().map(|n| eq.extract(n, &st)).collect();
    Ok(AnalysisResult {
        mode: options.mode,
        fingerprint: cfg.fingerprint(),
        nodes: st,
        extractors,
        stats,
        snapshots,
    })
}

/// One simultaneous application of all four equations to `nodes`. A solution
/// is a fixpoint iff this returns it unchanged.
pub fn apply_equations(cfg: &Cfg, types: &TypeTable, mode: Mode, nodes: &[NodeState]) -> Vec<NodeState> {
    let eq = Equations::new(cfg, types, mode);
    cfg.ids()
        .map(|n| {
            let lout = eq.lout(n, nodes);
            let ext = eq.extract(n, nodes);
            let s = &nodes[n.0 as usize];
            NodeState {
                lin: eq.lin(&s.lout, &ext),
                lout,
                ain: eq.ain(n, nodes),
                aout: eq.aout(&s.ain, &s.lout, &ext),
            }
        })
        .collect()
}
