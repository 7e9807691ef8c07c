//! Covering chains along paths of the covering graph.
//!
//! Every vertex interval lives in base coordinates (copy 0 of its host
//! branch). Crossing an arrow out of a vertex with host `A` applies `F` and
//! subtracts `p(A)`, landing in branch `ℓ(A)`. This module tracks that step
//! as a list of affine pieces and provides the two constructions used to
//! find orbits with a prescribed itinerary: backward refinement (one
//! subinterval per step, linear cost) and forward composition restricted to
//! the vertex intervals (exact itinerary set, may branch).

use num::{One, Zero};

use crate::cover_graph::{CoveringGraph, VertexId};
use crate::error::{Error, Result};
use crate::partition::BasicPartition;
use crate::pl_map::PLMap;
use crate::rational::{fmt_rational, Rational};
use crate::space::{Chart, TSegment};

/// Hard limit on the number of pieces kept by forward composition.
pub const MAX_PIECES: usize = 200_000;

/// `u ↦ slope·u + offset` on `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Affine {
    pub lo: Rational,
    pub hi: Rational,
    pub slope: Rational,
    pub offset: Rational,
}

impl Affine {
    pub fn identity(lo: Rational, hi: Rational) -> Affine {
        Affine { lo, hi, slope: Rational::one(), offset: Rational::zero() }
    }

    pub fn value(&self, u: &Rational) -> Rational {
        &self.slope * u + &self.offset
    }

    /// The part of the domain whose values lie in `[y0, y1]`.
    pub fn restrict_values(&self, y0: &Rational, y1: &Rational) -> Option<Affine> {
        if self.slope.is_zero() {
            let v = &self.offset;
            return (v >= y0 && v <= y1).then(|| self.clone());
        }
        let mut u0 = (y0 - &self.offset) / &self.slope;
        let mut u1 = (y1 - &self.offset) / &self.slope;
        if u0 > u1 {
            std::mem::swap(&mut u0, &mut u1);
        }
        let lo = if u0 > self.lo { u0 } else { self.lo.clone() };
        let hi = if u1 < self.hi { u1 } else { self.hi.clone() };
        (lo <= hi).then(|| Affine { lo, hi, ..self.clone() })
    }

    /// `outer ∘ self` on the part of the domain mapped into `outer`'s domain.
    pub fn then(&self, outer: &Affine) -> Option<Affine> {
        let r = self.restrict_values(&outer.lo, &outer.hi)?;
        Some(Affine {
            slope: &outer.slope * &r.slope,
            offset: &outer.slope * &r.offset + &outer.offset,
            lo: r.lo,
            hi: r.hi,
        })
    }

    /// Solutions of `value(u) = u`: the leftmost one, and whether the piece
    /// is degenerate there (identity or plateau).
    pub fn leftmost_fixed_point(&self) -> Option<(Rational, bool)> {
        let one = Rational::one();
        if self.slope == one {
            return self.offset.is_zero().then(|| (self.lo.clone(), true));
        }
        let u = &self.offset / (&one - &self.slope);
        (u >= self.lo && u <= self.hi).then(|| (u, self.slope.is_zero()))
    }
}

/// The step map of a vertex: `u ↦ F(u) − p(A)` read in branch `ℓ(A)` on the
/// vertex interval, as affine pieces in domain order. Parts of the interval
/// whose image leaves that branch copy are omitted, except for exact hits of
/// its attaching point, which get value 0.
pub fn step_pieces(map: &PLMap, part: &BasicPartition, g: &CoveringGraph, v: VertexId) -> Vec<Affine> {
    let vert = &g.vertices[v];
    let cell = part.cell(vert.host);
    let seg = vert.interval(part);
    let target = Chart::Branch { branch: cell.ell, copy: cell.p };
    let attach = &map.shape().branches[cell.ell].attach + Rational::from_integer(cell.p.into());
    let mut out = Vec::new();
    for mp in map.mapped_pieces(&seg) {
        let len = &mp.dom_hi - &mp.dom_lo;
        let slope = if len.is_zero() { Rational::zero() } else { (&mp.img_hi - &mp.img_lo) / &len };
        let aff =
            Affine { offset: &mp.img_lo - &slope * &mp.dom_lo, slope, lo: mp.dom_lo.clone(), hi: mp.dom_hi.clone() };
        if mp.chart == target {
            out.push(aff);
        } else if mp.chart == Chart::Line {
            if let Some(hit) = aff.restrict_values(&attach, &attach) {
                out.push(Affine { slope: Rational::zero(), offset: Rational::zero(), ..hit });
            }
        }
    }
    out
}

fn first_reaching(pieces: &[Affine], level: &Rational) -> Option<Rational> {
    for p in pieces {
        let (a, b) = (p.value(&p.lo), p.value(&p.hi));
        if &a >= level {
            return Some(p.lo.clone());
        }
        if &b >= level {
            return Some((level - &p.offset) / &p.slope);
        }
    }
    None
}

fn last_below(pieces: &[Affine], level: &Rational, until: &Rational) -> Option<Rational> {
    for p in pieces.iter().rev() {
        if &p.lo > until {
            continue;
        }
        let end = if &p.hi < until { p.hi.clone() } else { until.clone() };
        if &p.value(&end) <= level {
            return Some(end);
        }
        if &p.value(&p.lo) <= level {
            return Some((level - &p.offset) / &p.slope);
        }
    }
    None
}

/// Backward refinement along `path` (vertex ids, consecutive pairs joined by
/// arrows). Returns `J_0 ⊆ … ⊆` with `J_last` the interval of the last vertex
/// and each step map sending `J_i` onto `J_{i+1}`; the leftmost admissible
/// choice is taken at every step.
pub fn refine_backward(
    map: &PLMap,
    part: &BasicPartition,
    g: &CoveringGraph,
    path: &[VertexId],
) -> Result<Vec<(Rational, Rational)>> {
    let n = path.len();
    let last = &g.vertices[path[n - 1]];
    let mut js = vec![(part.cell(last.host).a.clone(), last.hi.clone()); n];
    for i in (0..n - 1).rev() {
        let (j0, j1) = js[i + 1].clone();
        let pieces = step_pieces(map, part, g, path[i]);
        let fail = |what: &str| {
            Error::internal(
                "covering-chain refinement",
                format!(
                    "{what} at step {i} (vertex {}), target [{}, {}]",
                    path[i],
                    fmt_rational(&j0),
                    fmt_rational(&j1)
                ),
            )
        };
        let v = first_reaching(&pieces, &j1).ok_or_else(|| fail("image does not reach the target's right end"))?;
        let u = last_below(&pieces, &j0, &v).ok_or_else(|| fail("no point below the target's left end"))?;
        js[i] = (u, v);
    }
    Ok(js)
}

/// Forward composition along `path` starting from `start` (an interval in
/// the first vertex's base coordinates). At step `i` only values inside
/// `bounds[i]` are kept. Returns affine pieces from the start interval to
/// the last vertex's base coordinates.
pub fn compose_forward(
    map: &PLMap,
    part: &BasicPartition,
    g: &CoveringGraph,
    path: &[VertexId],
    start: (Rational, Rational),
    bounds: &[(Rational, Rational)],
) -> Result<Vec<Affine>> {
    let mut cur = vec![Affine::identity(start.0, start.1)];
    for i in 0..path.len() - 1 {
        let steps = step_pieces(map, part, g, path[i]);
        let (b0, b1) = &bounds[i + 1];
        let mut next: Vec<Affine> = Vec::new();
        for c in &cur {
            for s in &steps {
                if let Some(comp) = c.then(s).and_then(|a| a.restrict_values(b0, b1)) {
                    if next.last() != Some(&comp) {
                        next.push(comp);
                    }
                }
            }
        }
        next.sort_by(|a, b| (&a.lo, &a.hi).cmp(&(&b.lo, &b.hi)));
        next.dedup();
        if next.len() > MAX_PIECES {
            return Err(Error::internal(
                "covering-chain composition",
                format!("more than {MAX_PIECES} pieces after {} steps", i + 1),
            ));
        }
        cur = next;
    }
    Ok(cur)
}

/// Vertex intervals along a path, in base coordinates.
pub fn vertex_bounds(part: &BasicPartition, g: &CoveringGraph, path: &[VertexId]) -> Vec<(Rational, Rational)> {
    path.iter()
        .map(|&v| {
            let vert = &g.vertices[v];
            (part.cell(vert.host).a.clone(), vert.hi.clone())
        })
        .collect()
}

/// Base-coordinate segment of a vertex's host branch.
pub fn base_segment(part: &BasicPartition, g: &CoveringGraph, v: VertexId, lo: Rational, hi: Rational) -> TSegment {
    let branch = part.cell(g.vertices[v].host).branch;
    TSegment::new(Chart::Branch { branch, copy: 0 }, lo, hi)
}
