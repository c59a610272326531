//! A direct implementation of liveness-based points-to analysis for scalar
//! pointer variables, written against the generator's own statement type
//! and sharing nothing with the analysis crate.

use std::collections::BTreeSet;

use lfcpa::corpus::{ScalarProgram, ScalarStmt};

/// `None` is the unknown pointee `?`.
pub type Pair = (String, Option<String>);

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Values {
    pub lin: BTreeSet<String>,
    pub lout: BTreeSet<String>,
    pub ain: BTreeSet<Pair>,
    pub aout: BTreeSet<Pair>,
}

#[derive(Clone, Debug)]
enum Kind {
    Start,
    End,
    Simple(ScalarStmt),
    /// `use` of the condition variable.
    Cond(String),
}

struct Graph {
    kinds: Vec<Kind>,
    succs: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
}

impl Graph {
    fn node(&mut self, kind: Kind, from: &[usize]) -> usize {
        let id = self.kinds.len();
        self.kinds.push(kind);
        self.succs.push(Vec::new());
        self.preds.push(Vec::new());
        for &p in from {
            self.edge(p, id);
        }
        id
    }

    fn edge(&mut self, a: usize, b: usize) {
        if !self.succs[a].contains(&b) {
            self.succs[a].push(b);
            self.preds[b].push(a);
        }
    }

    /// Returns the exits of the block.
    fn block(&mut self, body: &[ScalarStmt], mut from: Vec<usize>) -> Vec<usize> {
        for s in body {
            from = match s {
                ScalarStmt::If(c, t, e) => {
                    let n = self.node(Kind::Cond(c.clone()), &from);
                    let mut exits = self.block(t, vec![n]);
                    exits.extend(self.block(e, vec![n]));
                    exits
                }
                ScalarStmt::While(c, b) => {
                    let n = self.node(Kind::Cond(c.clone()), &from);
                    for e in self.block(b, vec![n]) {
                        self.edge(e, n);
                    }
                    vec![n]
                }
                other => vec![self.node(Kind::Simple(other.clone()), &from)],
            };
        }
        from
    }
}

pub struct Oracle {
    kinds: Vec<Kind>,
    succs: Vec<Vec<usize>>,
    preds: Vec<Vec<usize>>,
    pointers: BTreeSet<String>,
}

fn image(a: &BTreeSet<Pair>, x: &str) -> BTreeSet<Option<String>> {
    a.iter().filter(|(s, _)| s == x).map(|(_, t)| t.clone()).collect()
}

impl Oracle {
    pub fn new(p: &ScalarProgram) -> Oracle {
        let mut g = Graph {
            kinds: Vec::new(),
            succs: Vec::new(),
            preds: Vec::new(),
        };
        let start = g.node(Kind::Start, &[]);
        let exits = g.block(&p.body, vec![start]);
        g.node(Kind::End, &exits);
        Oracle {
            kinds: g.kinds,
            succs: g.succs,
            preds: g.preds,
            pointers: p.pointers().map(String::from).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    /// Pointer-valued members of a pointee set; `?` is dropped.
    fn in_p(&self, ts: &BTreeSet<Option<String>>) -> BTreeSet<String> {
        ts.iter()
            .flatten()
            .filter(|t| self.pointers.contains(*t))
            .cloned()
            .collect()
    }

    /// `Must(A){x} ∩ P`.
    fn must_pointers(&self, a: &BTreeSet<Pair>, x: &str) -> BTreeSet<String> {
        let img = image(a, x);
        if img.is_empty() || img.iter().all(|t| t.is_none()) {
            return self.pointers.clone();
        }
        match img.iter().next() {
            Some(Some(y)) if img.len() == 1 && self.pointers.contains(y) => {
                BTreeSet::from([y.clone()])
            }
            _ => BTreeSet::new(),
        }
    }

    /// `(Def, Kill, Ref, Pointee)` of node `n`.
    #[allow(clippy::type_complexity)]
    fn extractors(
        &self,
        n: usize,
        a: &BTreeSet<Pair>,
        lout: &BTreeSet<String>,
    ) -> (
        BTreeSet<String>,
        BTreeSet<String>,
        BTreeSet<String>,
        BTreeSet<Option<String>>,
    ) {
        let one = |x: &str| BTreeSet::from([x.to_string()]);
        let none = BTreeSet::new;
        let (def, kill, ref_live, ref_dead, pointee) = match &self.kinds[n] {
            Kind::Start | Kind::End | Kind::Simple(ScalarStmt::Other) => {
                (none(), none(), none(), none(), BTreeSet::new())
            }
            Kind::Cond(x) | Kind::Simple(ScalarStmt::Use(x)) => {
                (none(), none(), one(x), one(x), BTreeSet::new())
            }
            Kind::Simple(ScalarStmt::AddrOf(x, v)) => (
                one(x),
                one(x),
                none(),
                none(),
                BTreeSet::from([Some(v.clone())]),
            ),
            Kind::Simple(ScalarStmt::Copy(x, y)) => {
                (one(x), one(x), one(y), none(), image(a, y))
            }
            Kind::Simple(ScalarStmt::Load(x, y)) => {
                let mid = self.in_p(&image(a, y));
                let mut r = one(y);
                r.extend(mid.iter().cloned());
                let mut pointee = BTreeSet::new();
                for m in &mid {
                    pointee.extend(image(a, m));
                }
                (one(x), one(x), r, none(), pointee)
            }
            Kind::Simple(ScalarStmt::Store(x, y)) => {
                let mut both = one(x);
                both.insert(y.clone());
                (
                    self.in_p(&image(a, x)),
                    self.must_pointers(a, x),
                    both,
                    one(x),
                    image(a, y),
                )
            }
            Kind::Simple(ScalarStmt::If(..) | ScalarStmt::While(..)) => unreachable!(),
        };
        let refs = if def.iter().any(|d| lout.contains(d)) {
            ref_live
        } else {
            ref_dead
        };
        (def, kill, refs, pointee)
    }

    /// Kleene iteration of all four equations from empty sets.
    pub fn solve(&self) -> Vec<Values> {
        let end = self.len() - 1;
        let mut v = vec![Values::default(); self.len()];
        loop {
            let mut next = v.clone();
            for n in 0..self.len() {
                let lout: BTreeSet<String> = if n == end {
                    BTreeSet::new()
                } else {
                    self.succs[n].iter().flat_map(|s| v[*s].lin.clone()).collect()
                };
                let (def, kill, refs, pointee) = self.extractors(n, &v[n].ain, &v[n].lout);
                let lin: BTreeSet<String> = v[n]
                    .lout
                    .difference(&kill)
                    .cloned()
                    .chain(refs)
                    .collect();
                let ain: BTreeSet<Pair> = if n == 0 {
                    v[n].lin.iter().map(|x| (x.clone(), None)).collect()
                } else {
                    self.preds[n]
                        .iter()
                        .flat_map(|p| v[*p].aout.clone())
                        .filter(|(s, _)| v[n].lin.contains(s))
                        .collect()
                };
                let mut aout: BTreeSet<Pair> = v[n]
                    .ain
                    .iter()
                    .filter(|(s, _)| !kill.contains(s))
                    .cloned()
                    .collect();
                for d in &def {
                    for t in &pointee {
                        aout.insert((d.clone(), t.clone()));
                    }
                }
                aout.retain(|(s, _)| v[n].lout.contains(s));
                next[n] = Values {
                    lin,
                    lout,
                    ain,
                    aout,
                };
            }
            if next == v {
                return v;
            }
            v = next;
        }
    }
}
