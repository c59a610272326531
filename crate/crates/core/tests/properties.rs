//! Property tests over locations, evaluation and the printer.

use lfcpa_core::frontend::{parse, parse_expr, print_expr, print_program};
use lfcpa_core::{
    compile, is_heap, overlaps, restrict, AccessPath, Eval, NodeId, PointerExpr, PointsTo,
    PointsToView, Root, Segment, Statement, Target, TypeTable,
};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn segment() -> impl Strategy<Value = Segment> {
    prop_oneof![
        prop::sample::select(vec!["f", "g"]).prop_map(|f| Segment::Field(f.into())),
        (0i64..4).prop_map(Segment::Offset),
        Just(Segment::BottomOffset),
    ]
}

fn path() -> impl Strategy<Value = AccessPath> {
    let root = prop_oneof![
        prop::sample::select(vec!["x", "y", "q"]).prop_map(|v| Root::Var(v.into())),
        (1u32..3).prop_map(|n| Root::HeapSite(NodeId(n))),
    ];
    (root, prop::collection::vec(segment(), 0..3)).prop_map(|(root, segments)| AccessPath { root, segments })
}

proptest! {
    #[test]
    fn overlap_is_reflexive_and_symmetric(p in path(), q in path()) {
        prop_assert!(overlaps(&p, &p));
        prop_assert_eq!(overlaps(&p, &q), overlaps(&q, &p));
        let exact = |a: &AccessPath| !a.segments.contains(&Segment::BottomOffset);
        if exact(&p) && exact(&q) {
            prop_assert_eq!(overlaps(&p, &q), p == q);
        }
    }

    #[test]
    fn heap_paths_are_approximate(p in path()) {
        let t = TypeTable::new();
        prop_assert!(!is_heap(&p) || t.is_approx(&p));
    }

    #[test]
    fn dropping_subsumed_pointees_keeps_images(
        pairs in prop::collection::vec((path(), prop::sample::select(vec!["?", "a", "b", "o1"])), 0..12),
        probes in prop::collection::vec(path(), 1..6),
    ) {
        let rel: PointsTo = pairs.iter().map(|(s, t)| (s.clone(), t.parse::<Target>().unwrap())).collect();
        let mut canon = rel.clone();
        canon.drop_subsumed();
        for q in probes.iter().chain(rel.sources()) {
            prop_assert_eq!(canon.image(q), rel.image(q));
        }
        let mut again = canon.clone();
        again.drop_subsumed();
        prop_assert_eq!(again, canon);
    }

    #[test]
    fn rendering_round_trips(p in path()) {
        prop_assert_eq!(p.to_string().parse::<AccessPath>().unwrap(), p);
    }
}

const UNIONS: &str = "
union {
    struct { int *g; } f[30];
    int *h[20];
} a, b, *c[10];
void main() { c[4] = &a; }";

proptest! {
    #[test]
    fn unions_never_grow(segs in prop::collection::vec(segment(), 0..4)) {
        let types = compile(UNIONS).unwrap().remove(0).types;
        let mut p = AccessPath::var("a");
        for s in segs {
            p = types.extend(&p, s);
            prop_assert_eq!(&p, &AccessPath::var("a"));
        }
    }
}

const RUNNING: &str = "
typedef struct B { struct B *f; } sB;
typedef struct A { struct B g; } sA;
int main() {
    sA *a;
    sB *x, *y, b;
    a = (sA *)malloc(sizeof(sA));
    use(x, a, *a, *x, *y, b.f, a->g, y->f, x->f, x->f->f, &b, &a->g, &x->f->f);
}";

fn running() -> (TypeTable, Vec<PointerExpr>) {
    let p = compile(RUNNING).unwrap().remove(0);
    let Some(Statement::Use(es)) = p.cfg.node(NodeId(2)).statement() else {
        panic!("expected a use node");
    };
    (p.types, es.clone())
}

/// Well-typed pairs over the running example's locations.
fn candidate_pairs() -> Vec<(AccessPath, Target)> {
    let typed: [(&str, &[&str]); 5] = [
        ("a", &["o1", "?"]),
        ("x", &["b", "o1.g", "?"]),
        ("y", &["b", "o1.g", "?"]),
        ("b.f", &["b", "o1.g", "?"]),
        ("o1.g.f", &["b", "o1.g", "?"]),
    ];
    let mut out = Vec::new();
    for (s, tgts) in typed {
        for t in tgts {
            out.push((s.parse().unwrap(), t.parse().unwrap()));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn evaluation_is_monotone(
        small in subsequence(candidate_pairs(), 0..10),
        extra in subsequence(candidate_pairs(), 0..10),
    ) {
        let (types, exprs) = running();
        let a: PointsTo = small.iter().cloned().collect();
        let mut b = a.clone();
        b.extend(&extra.into_iter().collect());
        let (ea, eb) = (Eval::new(&types, &a), Eval::new(&types, &b));
        for e in &exprs {
            prop_assert!(ea.lval(e).is_subset(&eb.lval(e)), "lval {}", e);
            prop_assert!(ea.deref(e).is_subset(&eb.deref(e)), "deref {}", e);
            prop_assert!(ea.refs(e).is_subset(&eb.refs(e)), "ref {}", e);
            let (ra, rb) = (ea.rval(e), eb.rval(e));
            if !ra.is_all() && !rb.is_all() {
                prop_assert!(ra.is_subset(&rb), "rval {}", e);
            }
            if !matches!(e, PointerExpr::AddrOf(_) | PointerExpr::AddrOfPlus(..)) {
                prop_assert!(ea.deref(e).is_subset(&ea.refs(e)), "deref within ref {}", e);
            }
            if let Some(paths) = ea.refs(e).paths() {
                prop_assert!(paths.iter().all(|p| types.may_hold_pointer(p)));
            }
        }
    }

    #[test]
    fn restriction_filters_and_is_idempotent(
        pairs in subsequence(candidate_pairs(), 0..12),
        live in subsequence(vec!["a", "x", "y", "b.f", "o1.g.f"], 0..5),
    ) {
        let a: PointsTo = pairs.into_iter().collect();
        let live = live.iter().map(|s| s.parse().unwrap()).collect();
        let r = restrict(&a, &live);
        prop_assert!(r.is_subset(&a));
        prop_assert_eq!(restrict(&r, &live), r.clone());
        prop_assert!(restrict(&a, &Default::default()).is_empty());
    }
}

fn expr_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        prop::sample::select(vec!["x", "y", "p", "NULL"]).prop_map(String::from),
        (0u32..100).prop_map(|n| n.to_string()),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| format!("*{e}")),
            inner.clone().prop_map(|e| format!("& {e}")),
            inner.clone().prop_map(|e| format!("- {e}")),
            inner.clone().prop_map(|e| format!("!{e}")),
            inner.clone().prop_map(|e| format!("({e})")),
            inner.clone().prop_map(|e| format!("{e}->f")),
            inner.clone().prop_map(|e| format!("{e}.g")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}[{b}]")),
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "<", "==", "&&", "||"]), inner)
                .prop_map(|(a, op, b)| format!("{a} {op} {b}")),
        ]
    })
}

proptest! {
    #[test]
    fn printed_expressions_reparse(src in expr_source()) {
        let e = parse_expr(&src).unwrap();
        let printed = print_expr(&e);
        prop_assert_eq!(parse_expr(&printed).unwrap(), e, "{}", printed);
    }

    #[test]
    fn printed_programs_reparse(body in prop::collection::vec(expr_source(), 0..6)) {
        let mut src = String::from("struct S { struct S *f; int g; };\nint main() {\n    int x, *y;\n");
        for (i, e) in body.iter().enumerate() {
            match i % 3 {
                0 => src.push_str(&format!("    use({e});\n")),
                1 => src.push_str(&format!("    if ({e}) {{ x = {e}; }} else {{ other; }}\n")),
                _ => src.push_str(&format!("    while ({e}) {{ return {e}; }}\n")),
            }
        }
        src.push_str("}\n");
        let prog = parse(&src).unwrap();
        let printed = print_program(&prog);
        prop_assert_eq!(parse(&printed).unwrap(), prog, "{}", printed);
    }
}
