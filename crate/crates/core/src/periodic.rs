//! Periodic (mod 1) points realizing loops of the covering graph, and their
//! exact verification.

use num::{BigInt, Zero};

use crate::chain::{compose_forward, refine_backward, vertex_bounds, Affine};
use crate::cover_graph::{CoveringGraph, Tower, VertexId};
use crate::error::{Error, Result};
use crate::partition::{BasicPartition, CellId};
use crate::pl_map::PLMap;
use crate::rational::Rational;
use crate::rotation_set::LoopSpec;
use crate::space::Point;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Loop {
        vertices: Vec<VertexId>,
    },
    /// The tail cycle of a lasso tower rooted at `root`, entered at height
    /// `entry`.
    JTail {
        root: CellId,
        entry: usize,
        cycle: Vec<CellId>,
    },
}

/// One step of the orbit: the cell visited (in base position) and the
/// displacement accumulated before the step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub cell: CellId,
    pub shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicWitness {
    pub point: Point,
    pub q: usize,
    pub p: i64,
    pub rho: Rational,
    pub provenance: Provenance,
    /// The solution sits on an identity or constant piece of `F^q − p`.
    pub degenerate: bool,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub passed: bool,
    /// `F^q(x) − (x + p)` in a common chart, when there is one.
    pub residual: Option<Rational>,
    pub rho_from_orbit: Rational,
}

fn leftmost_fixed(pieces: &[Affine]) -> Option<(Rational, bool)> {
    pieces.iter().filter_map(Affine::leftmost_fixed_point).min_by(|a, b| a.0.cmp(&b.0))
}

fn trace_of(part: &BasicPartition, g: &CoveringGraph, path: &[VertexId]) -> Vec<TraceStep> {
    let mut shift = 0;
    path[..path.len() - 1]
        .iter()
        .map(|&v| {
            let cell = g.vertices[v].host;
            let step = TraceStep { cell, shift };
            shift += part.cell(cell).p;
            step
        })
        .collect()
}

fn finish(
    map: &PLMap,
    part: &BasicPartition,
    g: &CoveringGraph,
    path: &[VertexId],
    pieces: &[Affine],
    weight: i64,
    provenance: Provenance,
) -> Result<PeriodicWitness> {
    let stage = "periodic point";
    let (u, degenerate) = leftmost_fixed(pieces).ok_or_else(|| {
        Error::internal(stage, format!("no fixed point of the composed chain over {} pieces", pieces.len()))
    })?;
    let branch = part.cell(g.vertices[path[0]].host).branch;
    let q = path.len() - 1;
    let w = PeriodicWitness {
        point: map.shape().branch_point(branch, u, 0),
        q,
        p: weight,
        rho: Rational::new(BigInt::from(weight), BigInt::from(q as i64)),
        provenance,
        degenerate,
        trace: trace_of(part, g, path),
    };
    let check = verify_witness(map, &w);
    if !check.passed {
        return Err(Error::internal(stage, format!("candidate {} fails F^{}(x) = x + {}", w.point, w.q, w.p)));
    }
    Ok(w)
}

/// A point `x` in the first vertex's interval with `F^L(x) = x + W` whose
/// orbit follows the loop, found by backward refinement.
pub fn periodic_from_loop(
    map: &PLMap,
    part: &BasicPartition,
    g: &CoveringGraph,
    lp: &LoopSpec,
) -> Result<PeriodicWitness> {
    let path = &lp.vertices;
    let js = refine_backward(map, part, g, path)?;
    let pieces = compose_forward(map, part, g, path, js[0].clone(), &js)?;
    finish(map, part, g, path, &pieces, lp.weight, Provenance::Loop { vertices: path.clone() })
}

/// The least point of the tail interval fixed by the tail cycle map, found
/// by composing along the cycle over the full vertex intervals.
pub fn periodic_from_jtail(
    map: &PLMap,
    part: &BasicPartition,
    g: &CoveringGraph,
    tower: &Tower,
) -> Result<PeriodicWitness> {
    let path = g
        .lasso_loop(tower)
        .ok_or_else(|| Error::Domain(format!("tower over cell {} has no periodic tail", tower.root)))?;
    let bounds = vertex_bounds(part, g, &path);
    let pieces = compose_forward(map, part, g, &path, bounds[0].clone(), &bounds)?;
    let cycle: Vec<CellId> = path[..path.len() - 1].iter().map(|&v| g.vertices[v].host).collect();
    let weight = cycle.iter().map(|&c| part.cell(c).p).sum();
    let crate::cover_graph::TowerStatus::Lasso { entry_height, .. } = tower.status else { unreachable!() };
    let prov = Provenance::JTail { root: tower.root, entry: entry_height, cycle };
    finish(map, part, g, &path, &pieces, weight, prov)
}

/// A point whose orbit follows a finite path of the covering graph: the
/// midpoint of the backward-refined start interval.
pub fn realize_path(map: &PLMap, part: &BasicPartition, g: &CoveringGraph, path: &[VertexId]) -> Result<Point> {
    let js = refine_backward(map, part, g, path)?;
    let (a, b) = &js[0];
    let mid = (a + b) / Rational::from_integer(2.into());
    let branch = part.cell(g.vertices[path[0]].host).branch;
    Ok(map.shape().branch_point(branch, mid, 0))
}

/// Checks `F^q(x) = x + p` exactly and recomputes the rotation number from
/// the line displacements of the orbit.
pub fn verify_witness(map: &PLMap, w: &PeriodicWitness) -> Verification {
    let shape = map.shape();
    let end = map.iterate(&w.point, w.q);
    let target = w.point.translate(w.p);
    let residual = shape
        .charts_of(&target)
        .into_iter()
        .find_map(|ch| Some(shape.coord_in(&end, ch)? - shape.coord_in(&target, ch)?));
    let disp = end.retract_line(shape) - w.point.retract_line(shape);
    let rho_from_orbit = if w.q == 0 { Rational::zero() } else { disp / Rational::from_integer((w.q as i64).into()) };
    let expected = Rational::new(BigInt::from(w.p), BigInt::from(w.q.max(1) as i64));
    let passed = w.q > 0 && end == target && rho_from_orbit == w.rho && w.rho == expected;
    Verification { passed, residual, rho_from_orbit }
}
