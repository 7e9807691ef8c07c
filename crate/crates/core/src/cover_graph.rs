//! The covering graph of the basic partition.
//!
//! Vertices are identified by their significant part, a word of cell ids
//! `A_0 … A_n`, and carry the exact interval `[min A_n, c] ⊆ A_n`. Every arrow
//! out of a vertex lands in the basis except at most one, which climbs one
//! level up the tower above `A_0`. Towers are followed from each basis vertex
//! until they terminate, their `(host cell, right endpoint)` state repeats
//! (a lasso), or the height cap is reached.
//!
//! A lasso is stored as a finite quotient: the last materialized vertex gets a
//! back-arrow to the earlier vertex with the same state. Both vertices have
//! equal intervals, so every positive-covering statement along the
//! back-arrow is the same as along the true (infinite) tower.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::partition::{BasicPartition, CellId};
use crate::pl_map::PLMap;
use crate::rational::{fmt_rational, Rational};
use crate::space::{Chart, TSegment};

pub type VertexId = usize;

pub const DEFAULT_H_MAX: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovVertex {
    pub id: VertexId,
    /// Significant part.
    pub word: Vec<CellId>,
    pub host: CellId,
    /// Right endpoint of the interval; the left endpoint is `min` of the host.
    pub hi: Rational,
    pub height: usize,
}

impl CovVertex {
    pub fn is_basis(&self) -> bool {
        self.height == 0
    }

    pub fn interval(&self, part: &BasicPartition) -> TSegment {
        let c = part.cell(self.host);
        TSegment::new(Chart::Branch { branch: c.branch, copy: 0 }, c.a.clone(), self.hi.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovArrow {
    pub from: VertexId,
    pub to: VertexId,
    pub weight: i64,
    /// A quotient back-arrow closing a lasso.
    pub lasso: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerStatus {
    /// The last vertex (at this height) has no non-basis successor.
    Terminated { height: usize },
    /// The successor of the top vertex has the state of the vertex at
    /// `entry_height`; the tail repeats with this period.
    Lasso { entry_height: usize, period: usize },
    /// Stopped at the height cap without termination or repetition.
    Capped { h_max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub root: CellId,
    /// `vertices[h]` is the tower vertex of height `h`; `vertices[0]` is the root.
    pub vertices: Vec<VertexId>,
    pub status: TowerStatus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rigor {
    Approximate,
    Rigorous,
}

impl Rigor {
    pub fn as_str(self) -> &'static str {
        match self {
            Rigor::Rigorous => "rigorous",
            Rigor::Approximate => "approximate",
        }
    }
}

/// A strongly connected component of the materialized graph that contains a
/// cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scc {
    pub id: usize,
    pub vertices: Vec<VertexId>,
    /// Whether the component meets the basis. Components of the covering
    /// graph always do; cyclic pieces that don't are lasso tails.
    pub meets_basis: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IPathClass {
    /// Eventually emits no basis arrow; labels repeat `cycle` from height
    /// `entry` on.
    InJ { cycle: Vec<CellId>, entry: usize, displacement: i64 },
    /// Eventually periodic (lasso) but keeps emitting basis arrows.
    NotInJ { cycle: Vec<CellId>, entry: usize, displacement: i64 },
    /// Capped tower: cannot be decided from the materialized part.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IPath {
    pub root: CellId,
    pub class: IPathClass,
}

/// Result of expanding one vertex.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Expansion {
    /// Cells fully covered: arrows into the basis.
    pub basis_targets: Vec<CellId>,
    /// The partially covered cell and the new right endpoint.
    pub partial: Option<(CellId, Rational)>,
}

#[derive(Clone, Debug)]
pub struct CoveringGraph {
    pub vertices: Vec<CovVertex>,
    pub arrows: Vec<CovArrow>,
    out: Vec<Vec<usize>>,
    pub towers: Vec<Tower>,
    pub sccs: Vec<Scc>,
    scc_of: Vec<Option<usize>>,
    pub h_max: usize,
    index: HashMap<Vec<CellId>, VertexId>,
}

/// Expands the vertex with host cell `host` and interval `[min host, hi]`.
pub fn expand_vertex(map: &PLMap, part: &BasicPartition, host: CellId, hi: &Rational) -> Expansion {
    let cell = part.cell(host);
    let seg = TSegment::new(Chart::Branch { branch: cell.branch, copy: 0 }, cell.a.clone(), hi.clone());
    let target = Chart::Branch { branch: cell.ell, copy: cell.p };
    let shape = map.shape();
    // The image meets X^ell + p in an interval [min X^ell, reach].
    let mut reach: Option<Rational> = None;
    for mp in map.mapped_pieces(&seg) {
        for y in [&mp.img_lo, &mp.img_hi] {
            let pt = shape.point_at(mp.chart, y.clone());
            if let Some(c) = shape.coord_in(&pt, target) {
                if reach.as_ref().is_none_or(|r| &c > r) {
                    reach = Some(c);
                }
            }
        }
    }
    let mut exp = Expansion::default();
    let Some(reach) = reach else { return exp };
    for &k in part.branch_cells(cell.ell) {
        let ck = part.cell(k);
        if ck.b <= reach {
            exp.basis_targets.push(k);
        } else {
            if ck.a <= reach {
                exp.partial = Some((k, reach.clone()));
            }
            break;
        }
    }
    exp
}

impl CoveringGraph {
    pub fn build(map: &PLMap, part: &BasicPartition, h_max: usize) -> CoveringGraph {
        let h_max = h_max.max(1);
        let mut g = CoveringGraph {
            vertices: Vec::new(),
            arrows: Vec::new(),
            out: Vec::new(),
            towers: Vec::new(),
            sccs: Vec::new(),
            scc_of: Vec::new(),
            h_max,
            index: HashMap::new(),
        };
        for c in part.cells() {
            g.add_vertex(vec![c.id], c.id, c.b.clone(), 0);
        }
        for root in 0..part.len() {
            let tower = g.grow_tower(map, part, root, h_max);
            g.towers.push(tower);
        }
        g.decompose();
        g
    }

    fn add_vertex(&mut self, word: Vec<CellId>, host: CellId, hi: Rational, height: usize) -> VertexId {
        let id = self.vertices.len();
        self.index.insert(word.clone(), id);
        self.vertices.push(CovVertex { id, word, host, hi, height });
        self.out.push(Vec::new());
        id
    }

    fn add_arrow(&mut self, from: VertexId, to: VertexId, weight: i64, lasso: bool) {
        self.out[from].push(self.arrows.len());
        self.arrows.push(CovArrow { from, to, weight, lasso });
    }

    fn grow_tower(&mut self, map: &PLMap, part: &BasicPartition, root: CellId, h_max: usize) -> Tower {
        let mut vertices = vec![root];
        let mut seen: HashMap<(CellId, Rational), usize> = HashMap::new();
        let mut current = root;
        loop {
            let v = self.vertices[current].clone();
            let weight = part.cell(v.host).p;
            let exp = expand_vertex(map, part, v.host, &v.hi);
            for &b in &exp.basis_targets {
                self.add_arrow(current, b, weight, false);
            }
            let Some((k, reach)) = exp.partial else {
                return Tower { root, vertices, status: TowerStatus::Terminated { height: v.height } };
            };
            if let Some(&h) = seen.get(&(k, reach.clone())) {
                self.add_arrow(current, vertices[h], weight, true);
                let period = v.height + 1 - h;
                return Tower { root, vertices, status: TowerStatus::Lasso { entry_height: h, period } };
            }
            if v.height + 1 > h_max {
                return Tower { root, vertices, status: TowerStatus::Capped { h_max } };
            }
            let mut word = v.word.clone();
            word.push(k);
            seen.insert((k, reach.clone()), v.height + 1);
            let next = self.add_vertex(word, k, reach, v.height + 1);
            self.add_arrow(current, next, weight, false);
            vertices.push(next);
            current = next;
        }
    }

    fn decompose(&mut self) {
        let mut dg: DiGraph<(), ()> = DiGraph::with_capacity(self.vertices.len(), self.arrows.len());
        let nodes: Vec<_> = (0..self.vertices.len()).map(|_| dg.add_node(())).collect();
        for a in &self.arrows {
            dg.add_edge(nodes[a.from], nodes[a.to], ());
        }
        let mut comps: Vec<Vec<VertexId>> = tarjan_scc(&dg)
            .into_iter()
            .map(|c| {
                let mut v: Vec<VertexId> = c.into_iter().map(|n| n.index()).collect();
                v.sort_unstable();
                v
            })
            .filter(|c| c.len() > 1 || self.out[c[0]].iter().any(|&a| self.arrows[a].to == c[0]))
            .collect();
        comps.sort();
        self.scc_of = vec![None; self.vertices.len()];
        self.sccs = comps
            .into_iter()
            .enumerate()
            .map(|(id, vertices)| {
                for &v in &vertices {
                    self.scc_of[v] = Some(id);
                }
                let meets_basis = vertices.iter().any(|&v| self.vertices[v].is_basis());
                Scc { id, vertices, meets_basis }
            })
            .collect();
    }

    pub fn basis_len(&self) -> usize {
        self.vertices.iter().take_while(|v| v.is_basis()).count()
    }

    pub fn out_arrows(&self, v: VertexId) -> impl Iterator<Item = &CovArrow> {
        self.out[v].iter().map(move |&a| &self.arrows[a])
    }

    pub fn arrow_between(&self, from: VertexId, to: VertexId) -> Option<&CovArrow> {
        self.out_arrows(from).find(|a| a.to == to)
    }

    pub fn vertex_by_word(&self, word: &[CellId]) -> Option<VertexId> {
        self.index.get(word).copied()
    }

    pub fn scc_of(&self, v: VertexId) -> Option<usize> {
        self.scc_of[v]
    }

    /// Components of the covering graph proper (cyclic SCCs meeting the basis).
    pub fn components(&self) -> impl Iterator<Item = &Scc> {
        self.sccs.iter().filter(|s| s.meets_basis)
    }

    pub fn rigor(&self) -> Rigor {
        if self.towers.iter().any(|t| matches!(t.status, TowerStatus::Capped { .. })) {
            Rigor::Approximate
        } else {
            Rigor::Rigorous
        }
    }

    /// Whether `v` emits an arrow into the basis.
    pub fn emits_basis_arrow(&self, v: VertexId) -> bool {
        self.out_arrows(v).any(|a| self.vertices[a.to].is_basis())
    }

    /// The infinite paths leaving the basis and never coming back, one per
    /// non-terminating tower, with their `J` classification.
    pub fn compute_i_and_j(&self, part: &BasicPartition) -> Vec<IPath> {
        let mut out = Vec::new();
        for t in &self.towers {
            match t.status {
                TowerStatus::Terminated { .. } => {}
                TowerStatus::Capped { .. } => out.push(IPath { root: t.root, class: IPathClass::Undetermined }),
                TowerStatus::Lasso { entry_height, period } => {
                    let tail = &t.vertices[entry_height..entry_height + period];
                    let cycle: Vec<CellId> = tail.iter().map(|&v| self.vertices[v].host).collect();
                    let displacement = cycle.iter().map(|&c| part.cell(c).p).sum();
                    let class = if tail.iter().all(|&v| !self.emits_basis_arrow(v)) {
                        IPathClass::InJ { cycle, entry: entry_height, displacement }
                    } else {
                        IPathClass::NotInJ { cycle, entry: entry_height, displacement }
                    };
                    out.push(IPath { root: t.root, class });
                }
            }
        }
        out
    }

    /// The tail cycle of a lasso tower as a vertex loop (first vertex repeated
    /// at the end).
    pub fn lasso_loop(&self, tower: &Tower) -> Option<Vec<VertexId>> {
        let TowerStatus::Lasso { entry_height, period } = tower.status else { return None };
        let mut l: Vec<VertexId> = tower.vertices[entry_height..entry_height + period].to_vec();
        l.push(l[0]);
        Some(l)
    }

    /// The vertex path read along a word of cells starting at the basis
    /// vertex of `word[0]`, if every step is materialized.
    pub fn follow_word(&self, word: &[CellId]) -> Option<Vec<VertexId>> {
        let mut path = vec![*word.first()?];
        for &next in &word[1..] {
            let v = *path.last().unwrap();
            let to = self.out_arrows(v).find(|a| self.vertices[a.to].host == next)?.to;
            path.push(to);
        }
        Some(path)
    }

    pub fn to_dot(&self, part: &BasicPartition) -> String {
        let mut s = String::from("digraph covering {\n  rankdir=TB;\n");
        for v in &self.vertices {
            let word: Vec<String> = v.word.iter().map(|c| format!("A{c}")).collect();
            let shape = if v.is_basis() { "box" } else { "ellipse" };
            let _ = writeln!(
                s,
                "  v{} [shape={shape}, label=\"{} [{},{}] H={}\"];",
                v.id,
                word.join(""),
                fmt_rational(&part.cell(v.host).a),
                fmt_rational(&v.hi),
                v.height
            );
        }
        for a in &self.arrows {
            let style = if a.lasso { ", style=dashed" } else { "" };
            let _ = writeln!(s, "  v{} -> v{} [label=\"w={}\"{style}];", a.from, a.to, a.weight);
        }
        s.push_str("}\n");
        s
    }

    /// Cells reachable in one arrow from `v`, as a set.
    pub fn successor_hosts(&self, v: VertexId) -> BTreeSet<CellId> {
        self.out_arrows(v).map(|a| self.vertices[a.to].host).collect()
    }
}
