use lfcpa_core::frontend::{self, ErrorKind};
use lfcpa_core::{compile, CompileError, NodeId, Statement};

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

fn stmts(src: &str) -> Vec<String> {
    let procs = compile(src).unwrap();
    let cfg = &procs[0].cfg;
    cfg.nodes()
        .iter()
        .filter_map(|n| n.statement().map(|s| s.to_string()))
        .collect()
}

#[test]
fn running_example_lowers_to_five_labelled_statements() {
    let procs = compile(RUNNING).unwrap();
    assert_eq!(procs.len(), 1);
    let p = &procs[0];
    assert_eq!(p.cfg.len(), 7);
    assert_eq!(
        stmts(RUNNING),
        [
            "a = malloc(sizeof(sA))",
            "y = &a->g",
            "b.f = y",
            "x = &b",
            "use(x->f->f)"
        ]
    );
    for i in 0..6u32 {
        assert_eq!(p.cfg.node(NodeId(i)).succs, [NodeId(i + 1)]);
    }
    // The allocation site is typed by its sizeof argument.
    let heap: Vec<_> = p.types.heap_sites().map(|(n, _)| *n).collect();
    assert_eq!(heap, [NodeId(1)]);
    let (pf, npf) = p.types.classify_fields();
    assert!(pf.contains("f") && npf.contains("g"));
}

#[test]
fn array_struct_nesting_classifies_fields() {
    let src = "
        struct s1 { int i; int *h; };
        struct s2 { int y; struct s1 g[10]; };
        struct s3 { int x; struct s2 f; };
        struct s3 a[20][10];
        void main() { }";
    let p = &compile(src).unwrap()[0];
    let (pf, npf) = p.types.classify_fields();
    assert_eq!(pf.into_iter().collect::<Vec<_>>(), ["h"]);
    assert_eq!(npf.into_iter().collect::<Vec<_>>(), ["f", "g", "i", "x", "y"]);
}

#[test]
fn ampersand_folds() {
    let src = "
        int *q[10], p, **s, *r, *t;
        struct N { struct N *n; } m, *k;
        void main() {
            s = &q[3] + 5;
            s = &q[3] - 1;
            r = *(&t);
            k = (&m)->n;
            s = &*s;
            s = q + 2;
            s = q;
            r = s[2];
            s = &r + 1;
            r = *(&r + 1);
        }";
    assert_eq!(
        stmts(src),
        [
            "s = &q[8]",
            "s = &q[2]",
            "r = t",
            "k = m.n",
            "s = s",
            "s = &q[2]",
            "s = &q[0]",
            "r = *(s + 2)",
            "s = &r + 1",
            "r = *(&r + 1)"
        ]
    );
}

#[test]
fn conditions_and_returns_become_use_nodes() {
    let src = "
        struct N { int v; struct N *n; } *h;
        int i;
        int main() {
            while (h != NULL && i < 3) { h = h->n; i = i + 1; }
            if (h->v > 0) { return h->v; }
            return 0;
        }";
    assert_eq!(
        stmts(src),
        [
            "use(h, i)",
            "h = h->n",
            "i = i + 1",
            "use(h->v)",
            "use(h->v)",
            "use()"
        ]
    );
    let p = &compile(src).unwrap()[0];
    assert_eq!(p.cfg.node(NodeId(1)).branch, Some((NodeId(2), NodeId(4))));
}

#[test]
fn struct_assignment_is_expanded() {
    let src = "
        struct G { int *h; };
        struct S { int *f; int n; struct G g; } a, b;
        void main() { a = b; }";
    assert_eq!(stmts(src), ["a.f = b.f", "other", "a.g.h = b.g.h"]);
}

#[test]
fn calls_are_opaque_and_declarations_initialise() {
    let src = "
        int x, *p;
        void f(int *q) { }
        void main() { int *r = &x; f(r); p = g(); }";
    let procs = compile(src);
    // `g` is not declared as a procedure but calls are opaque anyway.
    let procs = procs.unwrap();
    assert_eq!(procs.len(), 2);
    assert_eq!(stmts(src.replace("void f(int *q) { }", "").as_str()), ["r = &x", "other", "other"]);
    assert_eq!(procs[0].types.var("q").map(|t| t.is_pointer()), Some(true));
}

fn kind(src: &str) -> ErrorKind {
    match compile(src).unwrap_err() {
        CompileError::Frontend(e) => e.kind,
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn type_errors() {
    assert!(matches!(kind("int x; void main() { use(*x); }"), ErrorKind::NotAPointer(_)));
    assert!(matches!(kind("void main() { use(y); }"), ErrorKind::Undeclared(_)));
    assert!(matches!(
        kind("struct S { int *f; } s; void main() { use(s.g); }"),
        ErrorKind::NoField { .. }
    ));
    assert!(matches!(kind("int *o3; void main() { }"), ErrorKind::ReservedName(_)));
    assert!(matches!(kind("int *p; int *p; void main() { }"), ErrorKind::Redeclared(_)));
    assert!(matches!(
        kind("int *p; char *c; void main() { p = c; }"),
        ErrorKind::TypeMismatch { .. }
    ));
    assert!(matches!(kind("int *p, x; void main() { &x = p; }"), ErrorKind::NotAssignable(_)));
    assert!(matches!(kind("struct S s; void main() { }"), ErrorKind::IncompleteType(_)));
    assert!(matches!(
        kind("int *p; int *a[4]; void main() { p = a[p]; }"),
        ErrorKind::TypeMismatch { .. }
    ));
}

#[test]
fn error_positions() {
    let e = frontend::parse("int main() {\n    x = = y;\n}").unwrap_err();
    assert_eq!((e.line, e.col), (2, 9));
    assert_eq!(e.to_string(), "2:9: expected an expression, found `=`");
    let CompileError::Frontend(e) = compile("int *p;\nvoid main() {\n  use(*q);\n}").unwrap_err() else {
        panic!()
    };
    assert_eq!((e.line, e.col), (3, 8));
}

#[test]
fn union_and_array_statements() {
    let src = "
        union { struct { int *g; } f[30]; int *h[20]; } a, b, *c[10];
        void main() { c[4] = &a; c[5] = &b; a = b; }";
    assert_eq!(stmts(src), ["c[4] = &a", "c[5] = &b", "a = b"]);
    let p = &compile(src).unwrap()[0];
    assert!(matches!(p.cfg.node(NodeId(3)).statement(), Some(Statement::PtrAssign { .. })));
}
