//! Plain-text renderings: exact values with 6-decimal approximations.

use std::fmt::Write as _;

use sunrot::cover_graph::{CoveringGraph, TowerStatus};
use sunrot::oracle::{Itin, OrbitRecord};
use sunrot::partition::BasicPartition;
use sunrot::periodic::{PeriodicWitness, Verification};
use sunrot::pl_map::ValidationReport;
use sunrot::rational::{fmt_rational, to_f64};
use sunrot::report::{graph_digest, partition_digest};
use sunrot::rotation_set::RotationReport;
use sunrot::Rational;

fn num(r: &Rational) -> String {
    let exact = fmt_rational(r);
    if r.is_integer() {
        exact
    } else {
        format!("{exact} (≈{:.6})", to_f64(r))
    }
}

fn interval(a: &Rational, b: &Rational) -> String {
    if a == b {
        format!("{{{}}}", num(a))
    } else {
        format!("[{}, {}]", num(a), num(b))
    }
}

pub fn validation(r: &ValidationReport) -> String {
    if r.passed() {
        return "valid\n".into();
    }
    let mut s = String::new();
    for v in &r.violations {
        let _ = write!(s, "{:?}: {}", v.kind, v.message);
        if let Some(w) = &v.witness {
            let _ = write!(s, " (at {w})");
        }
        s.push('\n');
    }
    s
}

pub fn partition(p: &BasicPartition) -> String {
    let mut s = format!("{} cell(s)\n", p.len());
    for c in p.cells() {
        let _ = writeln!(s, "  {c}   ≈ [{:.6}, {:.6}]", to_f64(&c.a), to_f64(&c.b));
    }
    let _ = writeln!(s, "digest {}", partition_digest(p));
    s
}

pub fn graph(g: &CoveringGraph, p: &BasicPartition) -> String {
    let mut s = format!(
        "{} vertices ({} basis), {} arrows, rigor {}\n",
        g.vertices.len(),
        g.basis_len(),
        g.arrows.len(),
        g.rigor().as_str()
    );
    for t in &g.towers {
        let status = match t.status {
            TowerStatus::Terminated { height } => format!("terminates at height {height}"),
            TowerStatus::Lasso { entry_height, period } => format!("lasso from height {entry_height}, period {period}"),
            TowerStatus::Capped { h_max } => format!("capped at height {h_max}"),
        };
        let _ = writeln!(s, "  tower over cell {}: {status}", t.root);
    }
    for c in &g.sccs {
        let kind = if c.meets_basis { "component" } else { "tail cycle" };
        let _ = writeln!(s, "  {kind} {}: vertices {:?}", c.id, c.vertices);
    }
    let _ = writeln!(s, "digest {}", graph_digest(g, p));
    s
}

pub fn rotation(r: &RotationReport, p: &BasicPartition, g: &CoveringGraph) -> String {
    let (lo, hi) = r.rot_r.outer();
    let mut s = format!("line part: {} ({})\n", interval(&lo, &hi), r.rot_r.rigor.as_str());
    for c in &r.components {
        let ci = &c.interval;
        let _ = writeln!(s, "component {}: {} ({})", ci.component, interval(&ci.lo, &ci.hi), ci.rigor.as_str());
    }
    for t in &r.isolated {
        let _ = writeln!(s, "tail value {} over cell {} ({})", num(&t.rho), t.root, t.kind.as_str());
    }
    for t in &r.uncertified {
        let _ = writeln!(s, "tail over cell {}: value {} not certified", t.root, num(&t.rho));
    }
    for root in &r.undetermined {
        let _ = writeln!(s, "tower over cell {root}: undetermined (capped)");
    }
    let parts: Vec<String> = r.merged.iter().map(|(a, b)| interval(a, b)).collect();
    let _ = writeln!(s, "Rot(F) = {}", parts.join(" ∪ "));
    if !r.exceptional_candidates.is_empty() {
        let e: Vec<String> = r.exceptional_candidates.iter().map(num).collect();
        let _ = writeln!(s, "exceptional candidates: {}", e.join(", "));
    }
    let _ = writeln!(s, "rigor {}", r.rigor.as_str());
    let _ = writeln!(s, "partition digest {}", partition_digest(p));
    let _ = writeln!(s, "graph digest {}", graph_digest(g, p));
    s
}

pub fn witness(w: &PeriodicWitness, v: &Verification) -> String {
    let sign = if w.p < 0 { '-' } else { '+' };
    let mut s = format!("x = {}\nF^{}(x) = x {sign} {}, rho = {}\n", w.point, w.q, w.p.abs(), num(&w.rho));
    let _ = writeln!(s, "verified: {}{}", v.passed, if w.degenerate { " (degenerate solution)" } else { "" });
    s
}

pub fn orbit(rec: &OrbitRecord) -> String {
    let mut s = String::new();
    for (n, (pt, it)) in rec.points.iter().zip(&rec.itinerary).enumerate() {
        let tag = match it {
            Itin::Cell(c) => format!("cell {c}"),
            Itin::Dustbin => "dustbin".into(),
            Itin::TR => "T_R".into(),
        };
        let _ = writeln!(s, "{n:>5}  {pt}  [{tag}]");
    }
    if let Some(r) = rec.empirical_rho() {
        let _ = writeln!(s, "empirical rho {}", num(r));
    }
    s
}
