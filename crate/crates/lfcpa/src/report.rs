//! Text and JSON renderings of analysis results.

use std::collections::BTreeSet;
use std::fmt::Write;

use lfcpa_core::interp::{Halt, Memory};
use lfcpa_core::relation::{rendered_paths, DisplayLive};
use lfcpa_core::solver::{NodeState, Phase};
use lfcpa_core::{AccessPath, Cfg, Mode, NodeKind, PathSet, PointsTo, TargetSet};
use serde_json::{json, Value};

use crate::branches::Script;
use crate::config::{Dump, RunConfig};
use crate::{Analysis, TraceReport};

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Lfcpa => "lfcpa",
        Mode::Baseline => "baseline",
    }
}

fn phase_name(phase: Phase) -> &'static str {
    match phase {
        Phase::Liveness => "liveness",
        Phase::PointsTo => "points-to",
    }
}

pub fn stmt_text(cfg: &Cfg, id: usize) -> String {
    match &cfg.nodes()[id].kind {
        NodeKind::Start => "start".into(),
        NodeKind::End => "end".into(),
        NodeKind::Stmt(s) => s.to_string(),
    }
}

fn state_text(m: &Memory) -> String {
    let cells: Vec<String> = m.iter().map(|(c, v)| format!("{c}={v}")).collect();
    format!("{{{}}}", cells.join(", "))
}

fn halt_text(h: &Halt) -> String {
    match h {
        Halt::Finished => "finished".into(),
        Halt::OutOfFuel => "out of fuel".into(),
        Halt::Trapped { node, trap } => format!("trapped at node {node}: {trap}"),
    }
}

pub fn text(analyses: &[Analysis], config: &RunConfig) -> String {
    let mut out = String::new();
    for a in analyses {
        let cfg = &a.procedure.cfg;
        for r in &a.results {
            let _ = writeln!(out, "== {} ({}) ==", a.procedure.name, mode_name(r.mode));
            for (id, (n, e)) in r.nodes.iter().zip(&r.extractors).enumerate() {
                let _ = writeln!(out, "{id}: {}", stmt_text(cfg, id));
                if config.dumps(Dump::Liveness) {
                    let _ = writeln!(out, "    lin  = {}", DisplayLive(&n.lin));
                    let _ = writeln!(out, "    lout = {}", DisplayLive(&n.lout));
                }
                if config.dumps(Dump::Pointsto) {
                    let _ = writeln!(out, "    ain  = {}", n.ain);
                    let _ = writeln!(out, "    aout = {}", n.aout);
                }
                if config.dumps(Dump::Extractors) {
                    let _ = writeln!(out, "    def     = {}", e.def);
                    let _ = writeln!(out, "    kill    = {}", e.kill);
                    let _ = writeln!(out, "    ref     = {}", e.refs);
                    let _ = writeln!(out, "    pointee = {}", e.pointee);
                }
            }
            let s = r.stats;
            let _ = writeln!(
                out,
                "rounds: {}, liveness steps: {}, points-to steps: {}",
                s.rounds, s.liveness_steps, s.points_to_steps
            );
            if config.trace_fixpoint {
                for snap in &r.snapshots {
                    let _ = writeln!(out, "-- round {} {} --", snap.round, phase_name(snap.phase));
                    for (id, n) in snap.nodes.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "{id}: lin = {}, lout = {}, ain = {}, aout = {}",
                            DisplayLive(&n.lin),
                            DisplayLive(&n.lout),
                            n.ain,
                            n.aout
                        );
                    }
                }
            }
        }
        if let Some(t) = &a.trace {
            trace_text(&mut out, t);
        }
    }
    out
}

fn trace_text(out: &mut String, t: &TraceReport) {
    let _ = writeln!(out, "-- trace (branches: {}) --", Script(&t.branches));
    for (i, s) in t.trace.steps.iter().enumerate() {
        let _ = writeln!(out, "step {i} at {}: {}", s.node, state_text(&s.state));
    }
    let _ = writeln!(out, "halt: {}", halt_text(&t.trace.halt));
    let _ = writeln!(out, "final: {}", state_text(&t.trace.final_state));
    let _ = writeln!(out, "violations: {}", t.violations.len());
    for v in &t.violations {
        let _ = writeln!(out, "    {v}");
    }
}

fn live_json(l: &BTreeSet<AccessPath>) -> Value {
    json!(rendered_paths(l))
}

fn paths_json(p: &PathSet) -> Value {
    match p {
        PathSet::All => json!("T−{?}"),
        PathSet::Paths(s) => live_json(s),
    }
}

fn targets_json(t: &TargetSet) -> Value {
    match t {
        TargetSet::All => json!("T"),
        TargetSet::Targets(s) => {
            let mut v: Vec<String> = s.iter().map(|t| t.to_string()).collect();
            v.sort();
            json!(v)
        }
    }
}

fn pairs_json(a: &PointsTo) -> Value {
    let v: Vec<[String; 2]> = a.rendered_pairs().into_iter().map(|(s, t)| [s, t]).collect();
    json!(v)
}

fn state_json(id: usize, n: &NodeState, config: &RunConfig, obj: &mut serde_json::Map<String, Value>) {
    obj.insert("id".into(), json!(id));
    if config.dumps(Dump::Liveness) {
        obj.insert("lin".into(), live_json(&n.lin));
        obj.insert("lout".into(), live_json(&n.lout));
    }
    if config.dumps(Dump::Pointsto) {
        obj.insert("ain".into(), pairs_json(&n.ain));
        obj.insert("aout".into(), pairs_json(&n.aout));
    }
}

pub fn json(analyses: &[Analysis], config: &RunConfig) -> Value {
    let mut out = Vec::new();
    for a in analyses {
        let cfg = &a.procedure.cfg;
        for r in &a.results {
            let nodes: Vec<Value> = r
                .nodes
                .iter()
                .zip(&r.extractors)
                .enumerate()
                .map(|(id, (n, e))| {
                    let mut obj = serde_json::Map::new();
                    state_json(id, n, config, &mut obj);
                    obj.insert("stmt".into(), json!(stmt_text(cfg, id)));
                    if config.dumps(Dump::Extractors) {
                        obj.insert("def".into(), paths_json(&e.def));
                        obj.insert("kill".into(), paths_json(&e.kill));
                        obj.insert("ref".into(), paths_json(&e.refs));
                        obj.insert("pointee".into(), targets_json(&e.pointee));
                    }
                    Value::Object(obj)
                })
                .collect();
            let mut entry = json!({
                "procedure": a.procedure.name,
                "mode": mode_name(r.mode),
                "nodes": nodes,
                "stats": {
                    "rounds": r.stats.rounds,
                    "liveness_steps": r.stats.liveness_steps,
                    "points_to_steps": r.stats.points_to_steps,
                },
            });
            if config.trace_fixpoint {
                let snaps: Vec<Value> = r
                    .snapshots
                    .iter()
                    .map(|s| {
                        let nodes: Vec<Value> = s
                            .nodes
                            .iter()
                            .enumerate()
                            .map(|(id, n)| {
                                let mut obj = serde_json::Map::new();
                                state_json(id, n, config, &mut obj);
                                Value::Object(obj)
                            })
                            .collect();
                        json!({"round": s.round, "phase": phase_name(s.phase), "nodes": nodes})
                    })
                    .collect();
                entry["snapshots"] = json!(snaps);
            }
            out.push(entry);
        }
        if let Some(t) = &a.trace {
            let steps: Vec<Value> = t
                .trace
                .steps
                .iter()
                .map(|s| {
                    let state: serde_json::Map<String, Value> = s
                        .state
                        .iter()
                        .map(|(c, v)| (c.to_string(), json!(v.to_string())))
                        .collect();
                    json!({"node": s.node.0, "state": state})
                })
                .collect();
            let violations: Vec<String> = t.violations.iter().map(|v| v.to_string()).collect();
            out.push(json!({
                "procedure": a.procedure.name,
                "trace": {
                    "branches": t.branches,
                    "steps": steps,
                    "halt": halt_text(&t.trace.halt),
                    "violations": violations,
                },
            }));
        }
    }
    Value::Array(out)
}
