//! Worked examples for the location model, evaluation, extractors and solver.

use std::collections::BTreeSet;

use lfcpa_core::relation::DisplayLive;
use lfcpa_core::{
    compile, extract, get_heap_loc, must, overlaps, solve, AccessPath, Eval, NodeId, PointerExpr,
    PointsTo, PointsToView, Procedure, SolveOptions, Statement, Target,
};

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

const UNIONS: &str = "
union {
    struct { int *g; } f[30];
    int *h[20];
} a, b, *c[10];
void main() {
    c[4] = &a;
    use(a.f[0].g, a.h[1], c[4]->f[2].g, c[4]->h[3]);
}";

fn p(s: &str) -> AccessPath {
    s.parse().unwrap()
}

fn rel(pairs: &[(&str, &str)]) -> PointsTo {
    pairs.iter().map(|(s, t)| (p(s), t.parse::<Target>().unwrap())).collect()
}

fn fig_a() -> PointsTo {
    rel(&[("a", "o1"), ("y", "o1.g"), ("x", "b"), ("b.f", "o1.g"), ("o1.g.f", "?")])
}

fn proc(src: &str) -> Procedure {
    compile(src).unwrap().remove(0)
}

/// Lowers `expr` in the scope of the running example.
fn expr(e: &str) -> PointerExpr {
    let src = RUNNING.replace("return x->f->f;", &format!("use({e});"));
    let p = proc(&src);
    match p.cfg.node(NodeId(5)).statement() {
        Some(Statement::Use(es)) => es[0].clone(),
        other => panic!("{other:?}"),
    }
}

#[test]
fn classification() {
    let t = proc(RUNNING).types;
    assert_eq!(t.is_pointer(&p("x")), Ok(true));
    assert_eq!(t.is_pointer(&p("b.f")), Ok(true));
    assert_eq!(t.is_pointer(&p("o1.g")), Ok(false));
    assert_eq!(t.is_pointer(&p("o1")), Ok(true));
    assert!(t.is_pointer(&p("b.nope")).is_err());
    assert!(t.is_approx(&p("o1.g.f")));
    assert!(!t.is_approx(&p("b.f")));
    assert!(!t.is_approx(&p("x")));

    let u = proc(UNIONS).types;
    assert_eq!(u.is_union(&p("a")), Ok(true));
    assert_eq!(u.is_union(&p("c.4")), Ok(false));
    assert!(u.is_approx(&p("a")));
}

#[test]
fn overlap_and_heap_names() {
    assert!(overlaps(&p("q.3"), &p("q.⊥")));
    assert!(!overlaps(&p("q.3"), &p("q.8")));
    assert!(!overlaps(&p("a.f"), &p("b.f")));
    assert_eq!(get_heap_loc(NodeId(1)).to_string(), "o1");
    assert_eq!(get_heap_loc(NodeId(7)).to_string(), "o7");
    assert_eq!(get_heap_loc(NodeId(1)), get_heap_loc(NodeId(1)));
}

#[test]
fn evaluation_examples() {
    let types = proc(RUNNING).types;
    let a = fig_a();
    let ev = Eval::new(&types, &a);
    assert_eq!(ev.lval(&expr("x->f")).to_string(), "{b.f}");
    assert_eq!(ev.lval(&expr("*y")).to_string(), "{o1.g}");
    assert_eq!(ev.lval(&expr("x->f->f")).to_string(), "{o1.g.f}");
    assert_eq!(ev.rval(&expr("x->f")).to_string(), "{o1.g}");
    assert_eq!(ev.rval(&expr("y->f")).to_string(), "{?}");
    assert_eq!(ev.deref(&expr("x->f->f")).to_string(), "{b.f, x}");
    assert_eq!(ev.deref(&expr("x")).to_string(), "∅");
    assert_eq!(ev.deref(&expr("*a")).to_string(), "{a}");
    assert_eq!(ev.refs(&expr("x->f->f")).to_string(), "{b.f, o1.g.f, x}");
    assert_eq!(ev.refs(&expr("*y")).to_string(), "{o1.g, y}");

    let amp = PointerExpr::AddrOf(Box::new(PointerExpr::var("b")));
    assert_eq!(ev.lval(&amp).to_string(), "∅");
    assert_eq!(ev.rval(&amp).to_string(), "{b}");
    assert_eq!(ev.refs(&amp).to_string(), "∅");
}

#[test]
fn union_paths_collapse() {
    let p7 = proc(UNIONS);
    let a = rel(&[("c.4", "a")]);
    let ev = Eval::new(&p7.types, &a);
    let Some(Statement::Use(es)) = p7.cfg.node(NodeId(2)).statement() else {
        panic!()
    };
    for e in es {
        assert_eq!(ev.lval(e).to_string(), "{a}", "{e}");
    }
}

#[test]
fn must_examples() {
    let types = proc(RUNNING).types;
    let a = fig_a();
    let m = must(&a, &types);
    assert_eq!(m.image(&p("x")).to_string(), "{b}");
    assert_eq!(m.image(&p("a")).to_string(), "∅");
    assert_eq!(m.image(&p("o1.g.f")).to_string(), "∅");
    // No information: every location.
    assert!(!m.image(&p("y")).is_all());
    assert!(must(&PointsTo::new(), &types).image(&p("y")).is_all());
    assert!(must(&rel(&[("y", "?")]), &types).image(&p("y")).is_all());
    assert!(must(&rel(&[("y", "?"), ("y", "b")]), &types).image(&p("y")).is_empty());
}

#[test]
fn extractor_examples() {
    let fig = proc(RUNNING);
    let r = solve(&fig.cfg, &fig.types, SolveOptions::default()).unwrap();
    let row = |n: u32| {
        let e = &r.extractors[n as usize];
        [e.def.to_string(), e.kill.to_string(), e.refs.to_string(), e.pointee.to_string()]
    };
    assert_eq!(row(1), ["{a}", "{a}", "∅", "{o1}"]);
    assert_eq!(row(2), ["{y}", "{y}", "{a}", "{o1.g}"]);
    assert_eq!(row(3), ["{b.f}", "{b.f}", "{y}", "{o1.g}"]);
    assert_eq!(row(5)[2], "{b.f, o1.g.f, x}");

    // A dead definition reads only what the left side needs.
    let stmt = fig.cfg.node(NodeId(3)).statement();
    let dead = extract(stmt, NodeId(3), &r.node(NodeId(3)).ain, &BTreeSet::new(), &fig.types);
    assert_eq!(dead.refs.to_string(), "∅");
    assert_eq!(dead.def.to_string(), "{b.f}");
}

#[test]
fn heap_and_bottom_writes_are_weak() {
    let src = "
        struct S { struct S *n; };
        int main() {
            struct S *p, *q[4];
            int k;
            p = (struct S *)malloc(sizeof(struct S));
            p->n = p;
            q[k] = p;
            use(p->n, q[2]);
        }";
    let pr = proc(src);
    let r = solve(&pr.cfg, &pr.types, SolveOptions::default()).unwrap();
    assert_eq!(r.extractors[2].def.to_string(), "{o1.n}");
    assert_eq!(r.extractors[2].kill.to_string(), "∅");
    assert_eq!(r.extractors[3].def.to_string(), "{q.⊥}");
    assert_eq!(r.extractors[3].kill.to_string(), "∅");
    assert_eq!(r.node(NodeId(4)).ain.to_string(), "{(o1.n,?), (o1.n,o1), (p,o1), (q.2,?), (q.⊥,o1)}");
}

#[test]
fn running_example_values() {
    let fig = proc(RUNNING);
    let r = solve(&fig.cfg, &fig.types, SolveOptions::default()).unwrap();
    let n4 = r.node(NodeId(4));
    assert_eq!(n4.aout.to_string(), "{(b.f,o1.g), (o1.g.f,?), (x,b)}");
    assert_eq!(DisplayLive(&r.node(NodeId(1)).lin).to_string(), "{o1.g.f}");
    assert_eq!(r.node(NodeId(1)).ain.to_string(), "{(o1.g.f,?)}");
}

#[test]
fn empty_and_straight_line() {
    let e = proc("int main() { }");
    let r = solve(&e.cfg, &e.types, SolveOptions::default()).unwrap();
    assert_eq!(r.nodes.len(), 2);
    assert!(r.nodes.iter().all(|n| *n == Default::default()));

    let s = proc("int main() { int *x, a; x = &a; use(x); }");
    let r = solve(&s.cfg, &s.types, SolveOptions::default()).unwrap();
    assert_eq!(DisplayLive(&r.node(NodeId(1)).lin).to_string(), "∅");
    assert_eq!(DisplayLive(&r.node(NodeId(1)).lout).to_string(), "{x}");
    assert_eq!(r.node(NodeId(1)).aout.to_string(), "{(x,a)}");
    assert_eq!(DisplayLive(&r.node(NodeId(2)).lin).to_string(), "{x}");
}
