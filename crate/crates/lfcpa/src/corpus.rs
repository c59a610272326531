//! Seeded generators for random test programs.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 0x5eed;

/// The seed in `ANALYZE_SEED`, or [`DEFAULT_SEED`].
pub fn seed_from_env() -> Result<u64, std::num::ParseIntError> {
    match std::env::var("ANALYZE_SEED") {
        Ok(s) => s.trim().parse(),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Statements over pointer variables only, in the shape of the classic
/// scalar formulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarStmt {
    /// `x = &a`
    AddrOf(String, String),
    /// `x = y`
    Copy(String, String),
    /// `x = *y`
    Load(String, String),
    /// `*x = y`
    Store(String, String),
    /// `use(x)`
    Use(String),
    Other,
    /// Condition reads one pointer.
    If(String, Vec<ScalarStmt>, Vec<ScalarStmt>),
    While(String, Vec<ScalarStmt>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalarProgram {
    /// `(name, indirection level)`; level 0 is `int`.
    pub vars: Vec<(String, usize)>,
    pub body: Vec<ScalarStmt>,
}

impl ScalarProgram {
    pub fn pointers(&self) -> impl Iterator<Item = &str> {
        self.vars.iter().filter(|(_, l)| *l > 0).map(|(n, _)| n.as_str())
    }

    pub fn to_source(&self) -> String {
        let mut out = String::from("int main() {\n");
        for (name, level) in &self.vars {
            let _ = writeln!(out, "    int {}{name};", "*".repeat(*level));
        }
        write_scalar_block(&mut out, &self.body, 1);
        out.push_str("}\n");
        out
    }
}

fn write_scalar_block(out: &mut String, body: &[ScalarStmt], depth: usize) {
    let pad = "    ".repeat(depth);
    for s in body {
        let _ = match s {
            ScalarStmt::AddrOf(x, a) => writeln!(out, "{pad}{x} = &{a};"),
            ScalarStmt::Copy(x, y) => writeln!(out, "{pad}{x} = {y};"),
            ScalarStmt::Load(x, y) => writeln!(out, "{pad}{x} = *{y};"),
            ScalarStmt::Store(x, y) => writeln!(out, "{pad}*{x} = {y};"),
            ScalarStmt::Use(x) => writeln!(out, "{pad}use({x});"),
            ScalarStmt::Other => writeln!(out, "{pad}other;"),
            ScalarStmt::If(c, t, e) => {
                let _ = writeln!(out, "{pad}if ({c}) {{");
                write_scalar_block(out, t, depth + 1);
                if e.is_empty() {
                    writeln!(out, "{pad}}}")
                } else {
                    let _ = writeln!(out, "{pad}}} else {{");
                    write_scalar_block(out, e, depth + 1);
                    writeln!(out, "{pad}}}")
                }
            }
            ScalarStmt::While(c, b) => {
                let _ = writeln!(out, "{pad}while ({c}) {{");
                write_scalar_block(out, b, depth + 1);
                writeln!(out, "{pad}}}")
            }
        };
    }
}

const SCALAR_VARS: &[(&str, usize)] = &[
    ("a", 0),
    ("b", 0),
    ("p", 1),
    ("q", 1),
    ("r", 1),
    ("pp", 2),
    ("qq", 2),
    ("ppp", 3),
];

struct ScalarGen<'r, R> {
    rng: &'r mut R,
    /// Statements still allowed, counting conditions.
    budget: usize,
}

impl<R: Rng> ScalarGen<'_, R> {
    fn at_level(&mut self, level: usize) -> String {
        let names: Vec<&str> = SCALAR_VARS
            .iter()
            .filter(|(_, l)| *l == level)
            .map(|(n, _)| *n)
            .collect();
        names.choose(self.rng).unwrap().to_string()
    }

    fn pointer(&mut self) -> (String, usize) {
        let level = self.rng.gen_range(1..=3);
        (self.at_level(level), level)
    }

    fn simple(&mut self) -> ScalarStmt {
        let (x, level) = self.pointer();
        match self.rng.gen_range(0..10) {
            0..=2 => ScalarStmt::AddrOf(x, self.at_level(level - 1)),
            3..=4 => ScalarStmt::Copy(x, self.at_level(level)),
            5 if level < 3 => ScalarStmt::Load(x, self.at_level(level + 1)),
            6 if level > 1 => ScalarStmt::Store(x, self.at_level(level - 1)),
            7..=8 => ScalarStmt::Use(x),
            9 => ScalarStmt::Other,
            _ => ScalarStmt::Copy(x.clone(), x),
        }
    }

    fn block(&mut self, depth: usize) -> Vec<ScalarStmt> {
        let mut out = Vec::new();
        let len = self.rng.gen_range(1..=6);
        for _ in 0..len {
            if self.budget == 0 {
                break;
            }
            self.budget -= 1;
            let roll = self.rng.gen_range(0..10);
            if depth < 2 && roll == 0 {
                let c = self.pointer().0;
                let t = self.block(depth + 1);
                let e = if self.rng.gen_bool(0.5) {
                    self.block(depth + 1)
                } else {
                    Vec::new()
                };
                out.push(ScalarStmt::If(c, t, e));
            } else if depth < 2 && roll == 1 {
                let c = self.pointer().0;
                let b = self.block(depth + 1);
                out.push(ScalarStmt::While(c, b));
            } else {
                out.push(self.simple());
            }
        }
        out
    }
}

/// A program of at most `max_stmts` statements (conditions included) over
/// `int`, `int *`, `int **` and `int ***` variables.
pub fn scalar_program<R: Rng>(rng: &mut R, max_stmts: usize) -> ScalarProgram {
    let mut g = ScalarGen {
        rng,
        budget: max_stmts,
    };
    let mut body = Vec::new();
    while g.budget > 0 && body.len() < max_stmts {
        body.extend(g.block(0));
        if g.rng.gen_bool(0.3) {
            break;
        }
    }
    ScalarProgram {
        vars: SCALAR_VARS.iter().map(|(n, l)| (n.to_string(), *l)).collect(),
        body,
    }
}

const MIXED_PRELUDE: &str = "\
struct S {
    struct S *next;
    int *ip;
    int k;
    int *arr[3];
};
union U {
    int *a;
    struct S *s;
};
int main() {
    int a, b, k, arr[4];
    int *p, *q, *pa[3];
    int **pp;
    struct S s1, s2, *sp, *sq;
    union U u;
";

/// Statements that mostly keep pointers valid, so that runs get past the
/// first few dereferences.
const MIXED_INIT: &[&str] = &[
    "p = &a;",
    "q = &arr[1];",
    "pp = &p;",
    "sp = &s1;",
    "sq = &s2;",
    "s1.next = &s2;",
    "s2.next = &s1;",
    "s1.ip = &b;",
    "k = 1;",
];

fn int_ptr_lval<R: Rng>(rng: &mut R) -> String {
    let i = rng.gen_range(0..3);
    let choices = [
        "p".to_string(),
        "q".to_string(),
        format!("pa[{i}]"),
        "pa[k]".to_string(),
        "s1.ip".to_string(),
        "sp->ip".to_string(),
        "*pp".to_string(),
        "u.a".to_string(),
        format!("s2.arr[{i}]"),
        format!("sp->arr[{i}]"),
    ];
    choices.choose(rng).unwrap().clone()
}

fn int_ptr_rval<R: Rng>(rng: &mut R) -> String {
    let i = rng.gen_range(0..4);
    let choices = [
        "&a".to_string(),
        "&b".to_string(),
        format!("&arr[{i}]"),
        "&arr[k]".to_string(),
        "arr".to_string(),
        "q + 1".to_string(),
        "p".to_string(),
        format!("pa[{}]", i % 3),
        "sp->ip".to_string(),
        "sq->arr[k]".to_string(),
        "*pp".to_string(),
        "u.a".to_string(),
        "&sp->k".to_string(),
        "(int *)malloc(sizeof(int))".to_string(),
    ];
    choices.choose(rng).unwrap().clone()
}

fn struct_ptr_lval<R: Rng>(rng: &mut R) -> &'static str {
    ["sp", "sq", "s1.next", "sp->next", "u.s"].choose(rng).unwrap()
}

fn struct_ptr_rval<R: Rng>(rng: &mut R) -> &'static str {
    [
        "&s1",
        "&s2",
        "sq",
        "sp",
        "sp->next",
        "sq->next",
        "u.s",
        "(struct S *)malloc(sizeof(struct S))",
    ]
    .choose(rng)
    .unwrap()
}

fn mixed_simple<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..20) {
        0..=6 => format!("{} = {};", int_ptr_lval(rng), int_ptr_rval(rng)),
        7..=10 => format!("{} = {};", struct_ptr_lval(rng), struct_ptr_rval(rng)),
        11 => {
            let rhs = ["&p", "&q", "&pa[1]", "&s1.ip", "&sp->ip", "(int **)malloc(sizeof(int *))"]
                .choose(rng)
                .unwrap();
            format!("pp = {rhs};")
        }
        12 => ["s1 = s2;", "s2 = *sp;", "*sq = s1;"].choose(rng).unwrap().to_string(),
        13 => format!("k = {};", rng.gen_range(0..3)),
        14 => "k = k + 1;".into(),
        15 => "p = p + k;".into(),
        16..=18 => {
            let e = ["p", "*p", "sp->next", "sp->next->ip", "*pp", "u.s", "pa[k]", "q"]
                .choose(rng)
                .unwrap();
            format!("use({e});")
        }
        _ => "other;".into(),
    }
}

fn mixed_block<R: Rng>(rng: &mut R, out: &mut String, depth: usize, budget: &mut usize) {
    let pad = "    ".repeat(depth + 1);
    let len = rng.gen_range(1..=6);
    for _ in 0..len {
        if *budget == 0 {
            return;
        }
        *budget -= 1;
        let roll = rng.gen_range(0..10);
        let cond = ["p", "sp", "sp->next", "u.a", "*pp", "k"].choose(rng).unwrap();
        if depth < 2 && roll == 0 {
            let _ = writeln!(out, "{pad}if ({cond}) {{");
            mixed_block(rng, out, depth + 1, budget);
            if rng.gen_bool(0.5) {
                let _ = writeln!(out, "{pad}}} else {{");
                mixed_block(rng, out, depth + 1, budget);
            }
            let _ = writeln!(out, "{pad}}}");
        } else if depth < 2 && roll == 1 {
            let _ = writeln!(out, "{pad}while ({cond}) {{");
            mixed_block(rng, out, depth + 1, budget);
            let _ = writeln!(out, "{pad}}}");
        } else {
            let _ = writeln!(out, "{pad}{}", mixed_simple(rng));
        }
    }
}

/// A program over structs, arrays, unions and the heap.
pub fn mixed_program<R: Rng>(rng: &mut R, max_stmts: usize) -> String {
    let mut out = String::from(MIXED_PRELUDE);
    for s in MIXED_INIT {
        if rng.gen_bool(0.85) {
            let _ = writeln!(out, "    {s}");
        }
    }
    let mut budget = max_stmts;
    while budget > 0 {
        mixed_block(rng, &mut out, 0, &mut budget);
        if rng.gen_bool(0.3) {
            break;
        }
    }
    out.push_str("}\n");
    out
}

pub fn branch_script<R: Rng>(rng: &mut R, len: usize) -> Vec<bool> {
    (0..len).map(|_| rng.gen_bool(0.6)).collect()
}
