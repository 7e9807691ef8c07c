//! Brute-force ground truth: exact orbits, itineraries, empirical rotation
//! numbers and exhaustive cycle enumeration on small graphs.

use num::BigInt;

use crate::cover_graph::{CoveringGraph, VertexId};
use crate::error::{Error, Result};
use crate::mean_cycle::Edge;
use crate::partition::{BasicPartition, CellId, Classification};
use crate::pl_map::PLMap;
use crate::rational::Rational;
use crate::space::Point;

pub const DEFAULT_MAX_VERTICES: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Itin {
    Cell(CellId),
    /// In `X + Z` but outside every cell.
    Dustbin,
    /// In `T_R` and not in `X + Z`.
    TR,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub start: Point,
    /// `F^0(x), …, F^N(x)`.
    pub points: Vec<Point>,
    pub itinerary: Vec<Itin>,
    /// `r_R(F^n(x)) − r_R(x)`.
    pub displacements: Vec<Rational>,
    /// `displacements[n] / n` for `n ≥ 1`.
    pub rho: Vec<Rational>,
    /// First index at which the orbit is in `T_R` outside `X + Z`.
    pub entered_tr: Option<usize>,
}

impl OrbitRecord {
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn empirical_rho(&self) -> Option<&Rational> {
        self.rho.last()
    }

    /// Cell ids while the orbit stays in cells, from the start.
    pub fn cell_prefix(&self) -> Vec<CellId> {
        self.itinerary
            .iter()
            .map_while(|e| match e {
                Itin::Cell(c) => Some(*c),
                _ => None,
            })
            .collect()
    }

    /// Whether every recorded point lies in a cell.
    pub fn confined(&self) -> bool {
        self.itinerary.iter().all(|e| matches!(e, Itin::Cell(_)))
    }
}

fn classify(map: &PLMap, part: &BasicPartition, pt: &Point) -> Itin {
    if map.in_x(pt).is_none() {
        return Itin::TR;
    }
    match part.classify_point(map, pt) {
        Ok(Classification::Cell(c)) => Itin::Cell(c),
        _ => Itin::Dustbin,
    }
}

/// Exact orbit of `x` for `n` steps.
pub fn simulate(map: &PLMap, part: &BasicPartition, x: &Point, n: usize) -> OrbitRecord {
    let shape = map.shape();
    let x = shape.canonical(x.clone());
    let r0 = x.retract_line(shape);
    let mut points = Vec::with_capacity(n + 1);
    let mut itinerary = Vec::with_capacity(n + 1);
    let mut displacements = Vec::with_capacity(n + 1);
    let mut rho = Vec::with_capacity(n);
    let mut entered_tr = None;
    let mut cur = x.clone();
    for k in 0..=n {
        if k > 0 {
            cur = map.eval(&cur);
        }
        let it = classify(map, part, &cur);
        if it == Itin::TR && entered_tr.is_none() {
            entered_tr = Some(k);
        }
        let d = cur.retract_line(shape) - &r0;
        if k > 0 {
            rho.push(&d / Rational::from_integer(BigInt::from(k)));
        }
        itinerary.push(it);
        displacements.push(d);
        points.push(cur.clone());
    }
    OrbitRecord { start: x, points, itinerary, displacements, rho, entered_tr }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail(String),
    /// The orbit left the cells, so there is nothing to check.
    Skipped,
}

/// Verifies `F^n(x) ∈ A_n + p(A_0) + … + p(A_{n−1})` at every step and that
/// the line displacement equals the accumulated `p` up to the difference of
/// the attaching points.
pub fn itinerary_rho_check(map: &PLMap, part: &BasicPartition, rec: &OrbitRecord) -> Check {
    if !rec.confined() {
        return Check::Skipped;
    }
    let shape = map.shape();
    let mut shift: i64 = 0;
    let first = match rec.itinerary[0] {
        Itin::Cell(c) => part.cell(c).branch,
        _ => unreachable!(),
    };
    for (n, (pt, it)) in rec.points.iter().zip(&rec.itinerary).enumerate() {
        let Itin::Cell(c) = *it else { unreachable!() };
        let cell = part.cell(c);
        let back = pt.translate(-shift);
        if !cell.segment().contains(shape, &back) {
            return Check::Fail(format!("step {n}: {pt} is not in cell {c} + {shift}"));
        }
        let expected =
            Rational::from_integer(shift.into()) + &shape.branches[cell.branch].attach - &shape.branches[first].attach;
        if rec.displacements[n] != expected {
            return Check::Fail(format!("step {n}: displacement {} differs from {}", rec.displacements[n], expected));
        }
        shift += cell.p;
    }
    Check::Pass
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleRecord {
    /// Closed: first == last.
    pub vertices: Vec<VertexId>,
    pub weight: i64,
    pub mean: Rational,
}

impl CycleRecord {
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Every simple cycle of the materialized graph, each listed once from its
/// least vertex. Refuses graphs with more than `max_vertices` vertices.
pub fn enumerate_cycles(g: &CoveringGraph, max_vertices: usize) -> Result<Vec<CycleRecord>> {
    let edges: Vec<Edge> = g.arrows.iter().map(|a| Edge { from: a.from, to: a.to, weight: a.weight }).collect();
    enumerate_edge_cycles(g.vertices.len(), &edges, max_vertices)
}

/// [`enumerate_cycles`] on a plain weighted edge list.
pub fn enumerate_edge_cycles(n: usize, edges: &[Edge], max_vertices: usize) -> Result<Vec<CycleRecord>> {
    if n > max_vertices {
        return Err(Error::Domain(format!("{n} vertices exceed the enumeration limit {max_vertices}")));
    }
    let mut adj: Vec<Vec<(VertexId, i64)>> = vec![Vec::new(); n];
    for e in edges {
        adj[e.from].push((e.to, e.weight));
    }
    let mut out = Vec::new();
    for s in 0..n {
        let mut on = vec![false; n];
        on[s] = true;
        walk(&adj, s, &mut vec![s], &mut Vec::new(), &mut on, &mut out);
    }
    Ok(out)
}

fn walk(
    adj: &[Vec<(VertexId, i64)>],
    s: VertexId,
    path: &mut Vec<VertexId>,
    weights: &mut Vec<i64>,
    on: &mut [bool],
    out: &mut Vec<CycleRecord>,
) {
    let v = *path.last().unwrap();
    for &(to, w) in &adj[v] {
        if to == s {
            let mut vertices = path.clone();
            vertices.push(s);
            let weight = weights.iter().sum::<i64>() + w;
            let len = vertices.len() as i64 - 1;
            out.push(CycleRecord { vertices, weight, mean: Rational::new(weight.into(), len.into()) });
        } else if to > s && !on[to] {
            on[to] = true;
            path.push(to);
            weights.push(w);
            walk(adj, s, path, weights, on, out);
            weights.pop();
            path.pop();
            on[to] = false;
        }
    }
}

/// Minimum and maximum cycle means among cycles contained in `vertices`.
pub fn extreme_means(cycles: &[CycleRecord], vertices: &[VertexId]) -> Option<(Rational, Rational)> {
    let mut it = cycles.iter().filter(|c| c.vertices.iter().all(|v| vertices.contains(v))).map(|c| c.mean.clone());
    let first = it.next()?;
    Some(
        it.fold((first.clone(), first), |(lo, hi), m| {
            (if m < lo { m.clone() } else { lo }, if m > hi { m } else { hi })
        }),
    )
}

/// Empirical rotation number over `steps` iterates, or `None` for zero steps.
pub fn empirical_rho(map: &PLMap, x: &Point, steps: usize) -> Option<Rational> {
    if steps == 0 {
        return None;
    }
    let shape = map.shape();
    let end = map.iterate(x, steps);
    let d = end.retract_line(shape) - x.retract_line(shape);
    Some(d / Rational::from_integer(BigInt::from(steps)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover_graph::DEFAULT_H_MAX;
    use crate::io::parse_map;
    use crate::partition::build_partition;
    use crate::rational::rat;

    fn s1() -> (PLMap, BasicPartition) {
        let f = PLMap::new(&parse_map(include_str!("../fixtures/s1.json")).unwrap()).unwrap();
        let p = build_partition(&f);
        (f, p)
    }

    #[test]
    fn fixed_branch_orbit() {
        let (f, p) = s1();
        let x = f.shape().branch_point(0, rat(1, 3), 0);
        let rec = simulate(&f, &p, &x, 10);
        assert_eq!(rec.itinerary, vec![Itin::Cell(0); 11]);
        assert_eq!(rec.empirical_rho(), Some(&rat(1, 1)));
        assert_eq!(itinerary_rho_check(&f, &p, &rec), Check::Pass);
        assert_eq!(rec, simulate(&f, &p, &x, 10));
    }

    #[test]
    fn line_orbit_rotates_by_a_third() {
        let (f, p) = s1();
        let rec = simulate(&f, &p, &Point::Line(rat(0, 1)), 30);
        // integers are copies of the attaching point, so they count as X
        assert_eq!(rec.entered_tr, Some(1));
        assert_eq!(&rec.itinerary[..4], &[Itin::Dustbin, Itin::TR, Itin::TR, Itin::Dustbin]);
        let err = rec.empirical_rho().unwrap() - rat(1, 3);
        assert!(crate::rational::abs(&err) <= rat(1, 30));
        assert_eq!(itinerary_rho_check(&f, &p, &rec), Check::Skipped);
    }

    #[test]
    fn dustbin_orbit_is_skipped() {
        let (f, p) = s1();
        let rec = simulate(&f, &p, &f.shape().branch_point(0, rat(1, 8), 0), 3);
        assert_eq!(rec.itinerary[0], Itin::Dustbin);
        assert_eq!(itinerary_rho_check(&f, &p, &rec), Check::Skipped);
    }

    #[test]
    fn s1_has_one_cycle() {
        let (f, p) = s1();
        let g = CoveringGraph::build(&f, &p, DEFAULT_H_MAX);
        let cy = enumerate_cycles(&g, DEFAULT_MAX_VERTICES).unwrap();
        assert_eq!(cy.len(), 1);
        assert_eq!(cy[0].mean, rat(1, 1));
    }

    #[test]
    fn triangle() {
        let e = |from, to, weight| Edge { from, to, weight };
        let cy = enumerate_edge_cycles(3, &[e(0, 1, 0), e(1, 2, 1), e(2, 0, 2)], 12).unwrap();
        assert_eq!(cy.len(), 1);
        assert_eq!((cy[0].len(), cy[0].mean.clone()), (3, rat(1, 1)));
        assert!(enumerate_edge_cycles(13, &[], 12).is_err());
    }
}
