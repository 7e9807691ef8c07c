//! Rotation numbers of loops, component intervals, isolated values from
//! lasso tails, and the assembled rotation set.

use std::collections::{HashMap, VecDeque};

use num::{BigInt, Signed};

use crate::cover_graph::{CoveringGraph, IPathClass, Rigor, Scc, TowerStatus, VertexId};
use crate::error::{Error, Result};
use crate::line_rotation::{rot_r_interval, LineRigor, LineRotation};
use crate::mean_cycle::{max_mean_cycle, min_mean_cycle, Edge, MeanCycle};
use crate::partition::{BasicPartition, CellId};
use crate::periodic::{periodic_from_jtail, periodic_from_loop, PeriodicWitness};
use crate::pl_map::PLMap;
use crate::rational::{fmt_rational, Rational};

/// A closed path of the covering graph: `vertices` starts and ends at the
/// same vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpec {
    pub vertices: Vec<VertexId>,
    pub weight: i64,
}

impl LoopSpec {
    /// Checks that consecutive vertices are joined by arrows and sums the
    /// weights.
    pub fn from_vertices(g: &CoveringGraph, vertices: Vec<VertexId>) -> Result<LoopSpec> {
        if vertices.first() != vertices.last() {
            return Err(Error::Domain("a loop must end where it starts".into()));
        }
        let mut weight = 0;
        for w in vertices.windows(2) {
            let a =
                g.arrow_between(w[0], w[1]).ok_or_else(|| Error::Domain(format!("no arrow {} -> {}", w[0], w[1])))?;
            weight += a.weight;
        }
        Ok(LoopSpec { vertices, weight })
    }

    pub fn len(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> VertexId {
        self.vertices[0]
    }

    /// `self` followed by `other`; both must start at the same vertex.
    pub fn concat(&self, other: &LoopSpec) -> LoopSpec {
        debug_assert_eq!(self.vertices.last(), other.vertices.first());
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        LoopSpec { vertices, weight: self.weight + other.weight }
    }

    pub fn power(&self, k: usize) -> LoopSpec {
        let mut out = LoopSpec { vertices: vec![self.start()], weight: 0 };
        for _ in 0..k {
            out = out.concat(self);
        }
        out
    }

    /// The same cycle read from another of its vertices.
    pub fn rotate_to(&self, v: VertexId) -> Option<LoopSpec> {
        let i = self.vertices[..self.len()].iter().position(|&x| x == v)?;
        let mut vertices: Vec<VertexId> = self.vertices[i..self.len()].to_vec();
        vertices.extend_from_slice(&self.vertices[..=i]);
        Some(LoopSpec { vertices, weight: self.weight })
    }

    /// Whether the loop uses a lasso back-arrow (it then follows a path that
    /// climbs a tower forever rather than a loop of the full graph).
    pub fn uses_lasso(&self, g: &CoveringGraph) -> bool {
        self.vertices.windows(2).any(|w| g.arrow_between(w[0], w[1]).is_some_and(|a| a.lasso))
    }
}

/// Exact mean `W / L`.
pub fn loop_rho(lp: &LoopSpec) -> Result<Rational> {
    if lp.is_empty() {
        return Err(Error::Domain("loop of length 0 has no rotation number".into()));
    }
    Ok(Rational::new(BigInt::from(lp.weight), BigInt::from(lp.len() as i64)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentInterval {
    pub component: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub witness_lo: LoopSpec,
    pub witness_hi: LoopSpec,
    pub rigor: Rigor,
}

fn component_edges(g: &CoveringGraph, scc: &Scc) -> (Vec<Edge>, Vec<VertexId>) {
    let local: HashMap<VertexId, usize> = scc.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut edges = Vec::new();
    for &v in &scc.vertices {
        for a in g.out_arrows(v) {
            if let Some(&j) = local.get(&a.to) {
                edges.push(Edge { from: local[&v], to: j, weight: a.weight });
            }
        }
    }
    (edges, scc.vertices.clone())
}

fn to_loop(c: &MeanCycle, names: &[VertexId]) -> LoopSpec {
    LoopSpec { vertices: c.vertices.iter().map(|&i| names[i]).collect(), weight: c.weight }
}

/// Minimum and maximum loop means over a strongly connected component, with
/// witness cycles.
pub fn component_interval(g: &CoveringGraph, scc: &Scc) -> ComponentInterval {
    let (edges, names) = component_edges(g, scc);
    let lo = min_mean_cycle(names.len(), &edges).expect("components are cyclic");
    let hi = max_mean_cycle(names.len(), &edges).expect("components are cyclic");
    ComponentInterval {
        component: scc.id,
        lo: lo.mean.clone(),
        hi: hi.mean.clone(),
        witness_lo: to_loop(&lo, &names),
        witness_hi: to_loop(&hi, &names),
        rigor: g.rigor(),
    }
}

/// Shortest path from `a` to `b` using only vertices of `scc`.
fn path_within(g: &CoveringGraph, scc: &Scc, a: VertexId, b: VertexId) -> Option<Vec<VertexId>> {
    let inside: std::collections::HashSet<VertexId> = scc.vertices.iter().copied().collect();
    let mut prev: HashMap<VertexId, VertexId> = HashMap::new();
    let mut queue = VecDeque::from([a]);
    let mut seen = std::collections::HashSet::from([a]);
    while let Some(v) = queue.pop_front() {
        if v == b {
            let mut path = vec![b];
            let mut cur = b;
            while cur != a {
                cur = prev[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for arr in g.out_arrows(v) {
            if inside.contains(&arr.to) && seen.insert(arr.to) {
                prev.insert(arr.to, v);
                queue.push_back(arr.to);
            }
        }
    }
    None
}

fn path_loop(g: &CoveringGraph, path: &[VertexId]) -> LoopSpec {
    let weight = path.windows(2).map(|w| g.arrow_between(w[0], w[1]).unwrap().weight).sum();
    LoopSpec { vertices: path.to_vec(), weight }
}

/// A loop of the component with mean exactly `r`.
///
/// Two loops at a common vertex with means `m1 < r < m2` are mixed as
/// `γ1^a · γ2^b` where `a / b = (W2 − r L2) / (r L1 − W1)` in lowest terms.
/// When the extremal witnesses share no vertex, the upper one is replaced by
/// a detour through it with enough turns to keep its mean above `r`.
pub fn synthesize_loop(g: &CoveringGraph, scc: &Scc, ci: &ComponentInterval, r: &Rational) -> Result<LoopSpec> {
    if r < &ci.lo || r > &ci.hi {
        return Err(Error::Domain(format!(
            "{} is outside [{}, {}]",
            fmt_rational(r),
            fmt_rational(&ci.lo),
            fmt_rational(&ci.hi)
        )));
    }
    if r == &ci.lo {
        return Ok(ci.witness_lo.clone());
    }
    if r == &ci.hi {
        return Ok(ci.witness_hi.clone());
    }
    let shared = ci.witness_lo.vertices.iter().find(|v| ci.witness_hi.vertices.contains(v));
    let g1 = match shared {
        Some(&v) => ci.witness_lo.rotate_to(v).unwrap(),
        None => ci.witness_lo.clone(),
    };
    let v = g1.start();
    let g2 = match ci.witness_hi.rotate_to(v) {
        Some(l) => l,
        None => {
            let h = &ci.witness_hi;
            let to = path_within(g, scc, v, h.start())
                .ok_or_else(|| Error::internal("loop synthesis", "component not strongly connected"))?;
            let back = path_within(g, scc, h.start(), v)
                .ok_or_else(|| Error::internal("loop synthesis", "component not strongly connected"))?;
            let detour = path_loop(g, &to).concat_path(&path_loop(g, &back));
            // k (W2 − r L2) ≥ r Ld − Wd
            let (w2, l2) = (Rational::from_integer(h.weight.into()), Rational::from_integer((h.len() as i64).into()));
            let (wd, ld) =
                (Rational::from_integer(detour.weight.into()), Rational::from_integer((detour.len() as i64).into()));
            let need = (r * ld - wd) / (w2 - r * l2);
            let k = if need.is_positive() { need.ceil().to_integer().try_into().unwrap_or(usize::MAX) } else { 0 };
            let head = path_loop(g, &to);
            let tail = path_loop(g, &back);
            head.concat_path(&h.power(k)).concat_path(&tail)
        }
    };
    let m2 = loop_rho(&g2)?;
    if &m2 == r {
        return Ok(g2);
    }
    let (a, b) = mix_exponents(g1.weight, g1.len(), g2.weight, g2.len(), r)?;
    let out = g1.power(a).concat(&g2.power(b));
    debug_assert_eq!(loop_rho(&out).ok().as_ref(), Some(r));
    Ok(out)
}

/// Exponents `(a, b)` with `(a W1 + b W2) / (a L1 + b L2) = r`, in lowest
/// terms, for loop means `W1/L1 < r < W2/L2`.
pub fn mix_exponents(w1: i64, l1: usize, w2: i64, l2: usize, r: &Rational) -> Result<(usize, usize)> {
    let q = |v: i64| Rational::from_integer(v.into());
    let x = r * q(l1 as i64) - q(w1);
    let y = q(w2) - r * q(l2 as i64);
    if !x.is_positive() || !y.is_positive() {
        return Err(Error::Domain(format!("{} is not strictly between the loop means", fmt_rational(r))));
    }
    let ab = y / x;
    let overflow = || Error::internal("loop synthesis", "exponent overflow");
    let a: usize = ab.numer().try_into().map_err(|_| overflow())?;
    let b: usize = ab.denom().try_into().map_err(|_| overflow())?;
    Ok((a, b))
}

impl LoopSpec {
    /// Concatenation of paths sharing an endpoint (not necessarily loops).
    fn concat_path(&self, other: &LoopSpec) -> LoopSpec {
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        LoopSpec { vertices, weight: self.weight + other.weight }
    }
}

/// `p / q` for a label cycle with displacement sum `p`.
pub fn j_path_rho(part: &BasicPartition, cycle: &[CellId]) -> Rational {
    let p: i64 = cycle.iter().map(|&c| part.cell(c).p).sum();
    Rational::new(BigInt::from(p), BigInt::from(cycle.len() as i64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    /// The tail eventually emits no basis arrow.
    InJ,
    /// The tail keeps emitting basis arrows.
    NotInJ,
}

impl TailKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TailKind::InJ => "J",
            TailKind::NotInJ => "I-not-J",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailValue {
    pub rho: Rational,
    pub root: CellId,
    pub entry: usize,
    pub cycle: Vec<CellId>,
    pub p: i64,
    pub kind: TailKind,
    pub witness: Option<PeriodicWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub interval: ComponentInterval,
    pub lo_point: Option<PeriodicWitness>,
    pub hi_point: Option<PeriodicWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationReport {
    pub rot_r: LineRotation,
    pub components: Vec<ComponentReport>,
    /// Tail values backed by a verified periodic point.
    pub isolated: Vec<TailValue>,
    /// Tails outside `J` whose value could not be backed by a periodic point.
    pub uncertified: Vec<TailValue>,
    /// Roots of capped towers.
    pub undetermined: Vec<CellId>,
    /// The union as disjoint closed intervals, increasing.
    pub merged: Vec<(Rational, Rational)>,
    pub exceptional_candidates: Vec<Rational>,
    pub rigor: Rigor,
}

#[derive(Clone, Debug)]
pub struct AssembleOptions {
    pub tol: Rational,
    pub seed: u64,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions { tol: Rational::new(1.into(), 1_000_000_000.into()), seed: 0 }
    }
}

fn merge(mut v: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    v.sort();
    let mut out: Vec<(Rational, Rational)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out
}

pub fn assemble(map: &PLMap, part: &BasicPartition, g: &CoveringGraph, opts: &AssembleOptions) -> RotationReport {
    let rot_r = rot_r_interval(map, &opts.tol, opts.seed);
    let mut components = Vec::new();
    for scc in g.components() {
        let interval = component_interval(g, scc);
        let lo_point = periodic_from_loop(map, part, g, &interval.witness_lo).ok();
        let hi_point = periodic_from_loop(map, part, g, &interval.witness_hi).ok();
        components.push(ComponentReport { interval, lo_point, hi_point });
    }
    let mut isolated = Vec::new();
    let mut uncertified = Vec::new();
    let mut undetermined = Vec::new();
    for ip in g.compute_i_and_j(part) {
        let (cycle, entry, p, kind) = match ip.class {
            IPathClass::Undetermined => {
                undetermined.push(ip.root);
                continue;
            }
            IPathClass::InJ { cycle, entry, displacement } => (cycle, entry, displacement, TailKind::InJ),
            IPathClass::NotInJ { cycle, entry, displacement } => (cycle, entry, displacement, TailKind::NotInJ),
        };
        let tower = &g.towers[ip.root];
        debug_assert!(matches!(tower.status, TowerStatus::Lasso { .. }));
        let witness = periodic_from_jtail(map, part, g, tower).ok();
        let tv = TailValue { rho: j_path_rho(part, &cycle), root: ip.root, entry, cycle, p, kind, witness };
        if tv.witness.is_some() || kind == TailKind::InJ {
            isolated.push(tv);
        } else {
            uncertified.push(tv);
        }
    }

    let mut pieces = vec![rot_r.outer()];
    pieces.extend(components.iter().map(|c| (c.interval.lo.clone(), c.interval.hi.clone())));
    pieces.extend(isolated.iter().map(|t| (t.rho.clone(), t.rho.clone())));
    let merged = merge(pieces);

    let inside_component = |r: &Rational| components.iter().any(|c| &c.interval.lo < r && r < &c.interval.hi);
    let mut exceptional: Vec<Rational> = Vec::new();
    for c in &components {
        if c.lo_point.is_none() && !inside_component(&c.interval.lo) {
            exceptional.push(c.interval.lo.clone());
        }
        if c.hi_point.is_none() && !inside_component(&c.interval.hi) {
            exceptional.push(c.interval.hi.clone());
        }
    }
    for t in &isolated {
        if t.witness.is_none() && !inside_component(&t.rho) {
            exceptional.push(t.rho.clone());
        }
    }
    exceptional.sort();
    exceptional.dedup();

    let mut rigor = g.rigor();
    if rot_r.rigor == LineRigor::Estimate || !undetermined.is_empty() {
        rigor = Rigor::Approximate;
    }
    RotationReport {
        rot_r,
        components,
        isolated,
        uncertified,
        undetermined,
        merged,
        exceptional_candidates: exceptional,
        rigor,
    }
}

/// Whether `r` lies in the assembled set.
pub fn contains(report: &RotationReport, r: &Rational) -> bool {
    report.merged.iter().any(|(a, b)| a <= r && r <= b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover_graph::DEFAULT_H_MAX;
    use crate::io::parse_map;
    use crate::partition::build_partition;
    use crate::periodic::verify_witness;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn load(doc: &str) -> (PLMap, BasicPartition, CoveringGraph) {
        let f = PLMap::new(&parse_map(doc).unwrap()).unwrap();
        let p = build_partition(&f);
        let g = CoveringGraph::build(&f, &p, DEFAULT_H_MAX);
        (f, p, g)
    }

    const S1: &str = include_str!("../fixtures/s1.json");
    const TWO_LAPS: &str = include_str!("../fixtures/two_laps.json");
    const THREE_CELLS: &str = include_str!("../fixtures/three_cells.json");

    #[test]
    fn s1_loop_and_interval() {
        let (_, _, g) = load(S1);
        let lp = LoopSpec::from_vertices(&g, vec![0, 0]).unwrap();
        assert_eq!(loop_rho(&lp).unwrap(), rat(1, 1));
        let ci = component_interval(&g, &g.sccs[0]);
        assert_eq!((ci.lo.clone(), ci.hi.clone()), (rat(1, 1), rat(1, 1)));
        assert_eq!(synthesize_loop(&g, &g.sccs[0], &ci, &rat(1, 1)).unwrap(), lp);
        assert!(synthesize_loop(&g, &g.sccs[0], &ci, &rat(1, 2)).is_err());
    }

    #[test]
    fn empty_loop_has_no_rho() {
        assert!(loop_rho(&LoopSpec { vertices: vec![0], weight: 0 }).is_err());
    }

    #[test]
    fn powers_and_concatenation_add_up() {
        let (_, _, g) = load(TWO_LAPS);
        let a = LoopSpec::from_vertices(&g, vec![0, 0]).unwrap();
        let b = LoopSpec::from_vertices(&g, vec![0, 1, 0]).unwrap();
        let ab = a.concat(&b);
        assert_eq!((ab.len(), ab.weight), (a.len() + b.len(), a.weight + b.weight));
        assert_eq!(loop_rho(&b.power(2)).unwrap(), loop_rho(&b).unwrap());
    }

    #[test]
    fn two_fifths_mixes_three_and_two() {
        // loops of (W, L) = (0, 1) and (1, 1) at one vertex
        let (_, _, g) = load(TWO_LAPS);
        let scc = &g.sccs[0];
        let ci = ComponentInterval {
            component: 0,
            lo: rat(0, 1),
            hi: rat(1, 1),
            witness_lo: LoopSpec::from_vertices(&g, vec![0, 0]).unwrap(),
            witness_hi: LoopSpec::from_vertices(&g, vec![1, 1]).unwrap(),
            rigor: Rigor::Rigorous,
        };
        let lp = synthesize_loop(&g, scc, &ci, &rat(2, 5)).unwrap();
        assert_eq!((lp.len(), lp.weight), (5, 2));
        assert_eq!(lp.vertices, vec![0, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn exponents_for_two_fifths() {
        assert_eq!(mix_exponents(0, 1, 1, 1, &rat(2, 5)).unwrap(), (3, 2));
        assert!(mix_exponents(0, 1, 1, 1, &rat(1, 1)).is_err());
    }

    #[test]
    fn j_path_values() {
        let (_, p, _) = load(THREE_CELLS);
        // cells 4 (p = 2) and 1 (p = -1)
        assert_eq!(j_path_rho(&p, &[4, 1]), rat(1, 2));
        assert_eq!(j_path_rho(&p, &[3]), rat(1, 1));
    }

    #[test]
    fn s1_assembly_is_disconnected() {
        let (f, p, g) = load(S1);
        let r = assemble(&f, &p, &g, &AssembleOptions::default());
        assert_eq!(r.merged, vec![(rat(1, 3), rat(1, 3)), (rat(1, 1), rat(1, 1))]);
        assert!(r.exceptional_candidates.is_empty());
        assert_eq!(r.rigor, Rigor::Rigorous);
        assert_eq!(r, assemble(&f, &p, &g, &AssembleOptions::default()));
    }

    #[test]
    fn empty_partition_leaves_the_line_part() {
        let doc = r#"{ "branches": [], "line": [["0", {"R": "2/5"}], ["1", {"R": "7/5"}]] }"#;
        let (f, p, g) = load(doc);
        let r = assemble(&f, &p, &g, &AssembleOptions::default());
        assert_eq!(r.merged, vec![(rat(2, 5), rat(2, 5))]);
        assert!(r.components.is_empty() && r.isolated.is_empty());
    }

    #[test]
    fn merge_absorbs_points_and_overlaps() {
        let m =
            merge(vec![(rat(0, 1), rat(1, 2)), (rat(1, 4), rat(1, 4)), (rat(1, 2), rat(1, 1)), (rat(2, 1), rat(2, 1))]);
        assert_eq!(m, vec![(rat(0, 1), rat(1, 1)), (rat(2, 1), rat(2, 1))]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn synthesized_loops_hit_the_target(n in 1i64..60, d in 2i64..24) {
            let (f, p, g) = load(THREE_CELLS);
            let scc = g.components().next().unwrap().clone();
            let ci = component_interval(&g, &scc);
            let span = &ci.hi - &ci.lo;
            let r = &ci.lo + span * Rational::new(n.into(), 61.into()) ;
            let r = Rational::new((r * Rational::from_integer(d.into())).floor().to_integer(), d.into());
            prop_assume!(r > ci.lo && r < ci.hi);
            let lp = synthesize_loop(&g, &scc, &ci, &r).unwrap();
            prop_assert_eq!(loop_rho(&lp).unwrap(), r.clone());
            let w = periodic_from_loop(&f, &p, &g, &lp).unwrap();
            prop_assert!(verify_witness(&f, &w).passed);
            prop_assert_eq!(w.rho, r);
        }
    }
}
