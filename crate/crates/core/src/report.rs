//! Schema-stable JSON renderings of every stage, with content digests.
//!
//! Objects are built from `serde_json::Value` maps, which keep keys sorted,
//! so equal inputs give byte-identical output.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::cover_graph::{CoveringGraph, IPathClass, TowerStatus};
use crate::io::point_json;
use crate::line_rotation::Enclosure;
use crate::oracle::{Itin, OrbitRecord};
use crate::partition::BasicPartition;
use crate::periodic::{PeriodicWitness, Provenance, Verification};
use crate::pl_map::ValidationReport;
use crate::rational::{fmt_rational as fr, Rational};
use crate::rotation_set::{RotationReport, TailValue};

pub const SCHEMA: &str = "sunrot/1";

fn digest(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("values serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn with_schema(mut m: Map<String, Value>) -> Value {
    m.insert("schema".into(), json!(SCHEMA));
    Value::Object(m)
}

pub fn validation_json(r: &ValidationReport) -> Value {
    let violations: Vec<Value> = r
        .violations
        .iter()
        .map(|v| {
            json!({
                "kind": format!("{:?}", v.kind),
                "message": v.message,
                "witness": v.witness.as_ref().map(point_json),
            })
        })
        .collect();
    let mut m = Map::new();
    m.insert("valid".into(), json!(r.passed()));
    m.insert("violations".into(), Value::Array(violations));
    with_schema(m)
}

pub fn cells_json(part: &BasicPartition) -> Value {
    Value::Array(
        part.cells()
            .iter()
            .map(|c| json!({ "branch": c.branch, "a": fr(&c.a), "b": fr(&c.b), "ell": c.ell, "p": c.p }))
            .collect(),
    )
}

pub fn partition_digest(part: &BasicPartition) -> String {
    digest(&cells_json(part))
}

pub fn partition_json(part: &BasicPartition) -> Value {
    let cells = cells_json(part);
    let mut m = Map::new();
    m.insert("digest".into(), json!(digest(&cells)));
    m.insert("cells".into(), cells);
    with_schema(m)
}

fn graph_core(g: &CoveringGraph, part: &BasicPartition) -> (Value, Value) {
    let vertices: Vec<Value> = g
        .vertices
        .iter()
        .map(|v| {
            json!({
                "id": v.id,
                "word": v.word,
                "host": v.host,
                "lo": fr(&part.cell(v.host).a),
                "hi": fr(&v.hi),
                "height": v.height,
            })
        })
        .collect();
    let arrows: Vec<Value> =
        g.arrows.iter().map(|a| json!({ "from": a.from, "to": a.to, "weight": a.weight, "lasso": a.lasso })).collect();
    (Value::Array(vertices), Value::Array(arrows))
}

pub fn graph_digest(g: &CoveringGraph, part: &BasicPartition) -> String {
    let (v, a) = graph_core(g, part);
    digest(&json!({ "vertices": v, "arrows": a }))
}

fn status_json(s: &TowerStatus) -> Value {
    match s {
        TowerStatus::Terminated { height } => json!({ "kind": "terminated", "height": height }),
        TowerStatus::Lasso { entry_height, period } => {
            json!({ "kind": "lasso", "entry_height": entry_height, "period": period })
        }
        TowerStatus::Capped { h_max } => json!({ "kind": "capped", "h_max": h_max }),
    }
}

pub fn graph_json(g: &CoveringGraph, part: &BasicPartition) -> Value {
    let (vertices, arrows) = graph_core(g, part);
    let towers: Vec<Value> = g
        .towers
        .iter()
        .map(|t| json!({ "root": t.root, "vertices": t.vertices, "status": status_json(&t.status) }))
        .collect();
    let sccs: Vec<Value> =
        g.sccs.iter().map(|s| json!({ "id": s.id, "vertices": s.vertices, "meets_basis": s.meets_basis })).collect();
    let i_paths: Vec<Value> = g
        .compute_i_and_j(part)
        .into_iter()
        .map(|ip| match ip.class {
            IPathClass::InJ { cycle, entry, displacement } => {
                json!({ "root": ip.root, "class": "J", "cycle": cycle, "entry": entry, "p": displacement })
            }
            IPathClass::NotInJ { cycle, entry, displacement } => {
                json!({ "root": ip.root, "class": "I-not-J", "cycle": cycle, "entry": entry, "p": displacement })
            }
            IPathClass::Undetermined => json!({ "root": ip.root, "class": "undetermined" }),
        })
        .collect();
    let mut m = Map::new();
    m.insert("digest".into(), json!(graph_digest(g, part)));
    m.insert("vertices".into(), vertices);
    m.insert("arrows".into(), arrows);
    m.insert("towers".into(), Value::Array(towers));
    m.insert("sccs".into(), Value::Array(sccs));
    m.insert("i_paths".into(), Value::Array(i_paths));
    m.insert("h_max".into(), json!(g.h_max));
    m.insert("rigor".into(), json!(g.rigor().as_str()));
    with_schema(m)
}

fn enclosure_json(e: &Enclosure) -> Value {
    json!({ "lo": fr(&e.lo), "hi": fr(&e.hi), "steps": e.steps, "exact": e.is_exact() })
}

fn witness_body(w: &PeriodicWitness) -> Map<String, Value> {
    let provenance = match &w.provenance {
        Provenance::Loop { vertices } => json!({ "kind": "loop", "vertices": vertices }),
        Provenance::JTail { root, entry, cycle } => {
            json!({ "kind": "tail", "root": root, "entry": entry, "cycle": cycle })
        }
    };
    let trace: Vec<Value> = w.trace.iter().map(|s| json!({ "cell": s.cell, "shift": s.shift })).collect();
    let mut m = Map::new();
    m.insert("point".into(), point_json(&w.point));
    m.insert("q".into(), json!(w.q));
    m.insert("p".into(), json!(w.p));
    m.insert("rho".into(), json!(fr(&w.rho)));
    m.insert("degenerate".into(), json!(w.degenerate));
    m.insert("provenance".into(), provenance);
    m.insert("trace".into(), Value::Array(trace));
    m
}

pub fn witness_inline(w: &PeriodicWitness) -> Value {
    Value::Object(witness_body(w))
}

pub fn witness_json(w: &PeriodicWitness, check: &Verification) -> Value {
    let mut m = witness_body(w);
    m.insert(
        "verified".into(),
        json!({
            "passed": check.passed,
            "residual": check.residual.as_ref().map(fr),
            "rho_from_orbit": fr(&check.rho_from_orbit),
        }),
    );
    with_schema(m)
}

fn tail_json(t: &TailValue) -> Value {
    json!({
        "rho": fr(&t.rho),
        "root": t.root,
        "entry": t.entry,
        "cycle": t.cycle,
        "p": t.p,
        "q": t.cycle.len(),
        "kind": t.kind.as_str(),
        "witness": t.witness.as_ref().map(witness_inline),
    })
}

fn pair(a: &Rational, b: &Rational) -> Value {
    json!([fr(a), fr(b)])
}

pub fn rotation_json(r: &RotationReport, part: &BasicPartition, g: &CoveringGraph) -> Value {
    let (lo, hi) = r.rot_r.outer();
    let rot_r = json!({
        "lo": fr(&lo),
        "hi": fr(&hi),
        "rigor": r.rot_r.rigor.as_str(),
        "lo_enclosure": enclosure_json(&r.rot_r.lo),
        "hi_enclosure": enclosure_json(&r.rot_r.hi),
    });
    let components: Vec<Value> = r
        .components
        .iter()
        .map(|c| {
            let ci = &c.interval;
            json!({
                "component": ci.component,
                "lo": fr(&ci.lo),
                "hi": fr(&ci.hi),
                "witness_lo": ci.witness_lo.vertices,
                "witness_hi": ci.witness_hi.vertices,
                "lo_point": c.lo_point.as_ref().map(witness_inline),
                "hi_point": c.hi_point.as_ref().map(witness_inline),
                "rigor": ci.rigor.as_str(),
            })
        })
        .collect();
    let mut m = Map::new();
    m.insert("rot_R".into(), rot_r);
    m.insert("components".into(), Value::Array(components));
    m.insert("isolated".into(), Value::Array(r.isolated.iter().map(tail_json).collect()));
    m.insert("uncertified".into(), Value::Array(r.uncertified.iter().map(tail_json).collect()));
    m.insert("undetermined".into(), json!(r.undetermined));
    m.insert("merged".into(), Value::Array(r.merged.iter().map(|(a, b)| pair(a, b)).collect()));
    m.insert("exceptional_candidates".into(), json!(r.exceptional_candidates.iter().map(fr).collect::<Vec<_>>()));
    m.insert("rigor".into(), json!(r.rigor.as_str()));
    m.insert("partition_digest".into(), json!(partition_digest(part)));
    m.insert("graph_digest".into(), json!(graph_digest(g, part)));
    with_schema(m)
}

fn itin_json(e: &Itin) -> Value {
    match e {
        Itin::Cell(c) => json!(c),
        Itin::Dustbin => json!("dustbin"),
        Itin::TR => json!("T_R"),
    }
}

pub fn orbit_json(rec: &OrbitRecord) -> Value {
    let mut m = Map::new();
    m.insert("start".into(), point_json(&rec.start));
    m.insert("steps".into(), json!(rec.steps()));
    m.insert("points".into(), Value::Array(rec.points.iter().map(point_json).collect()));
    m.insert("itinerary".into(), Value::Array(rec.itinerary.iter().map(itin_json).collect()));
    m.insert("displacements".into(), json!(rec.displacements.iter().map(fr).collect::<Vec<_>>()));
    m.insert("rho".into(), json!(rec.empirical_rho().map(fr)));
    m.insert("entered_tr".into(), json!(rec.entered_tr));
    with_schema(m)
}
