//! The basic partition of the branches of `F`.
//!
//! Each branch `X^i` is scanned along the linear pieces of `F`. The set of
//! parameters whose image lies in some translated branch `X^ℓ + p` is a finite
//! union of closed runs labelled `(ℓ, p)`; between runs the image sits in the
//! interior of `T_R`. A cell is a maximal group of consecutive runs sharing a
//! label, from the start of the first run to the end of the last.

use std::fmt;

use num::Zero;

use crate::error::{Error, Result};
use crate::pl_map::{MappedPiece, PLMap};
use crate::rational::{floor_i64, fmt_rational, int, Rational};
use crate::space::{Chart, Point, TSegment};

pub type CellId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cell {
    pub id: CellId,
    pub branch: usize,
    /// 1-based position inside its branch.
    pub index_in_branch: usize,
    pub a: Rational,
    pub b: Rational,
    /// Target branch `ℓ`.
    pub ell: usize,
    /// Displacement `p`.
    pub p: i64,
}

impl Cell {
    pub fn segment(&self) -> TSegment {
        TSegment::new(Chart::Branch { branch: self.branch, copy: 0 }, self.a.clone(), self.b.clone())
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.a <= t && t <= &self.b
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "X{}_{} = [{}, {}] (ell={}, p={})",
            self.branch,
            self.index_in_branch,
            fmt_rational(&self.a),
            fmt_rational(&self.b),
            self.ell,
            self.p
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BasicPartition {
    cells: Vec<Cell>,
    by_branch: Vec<Vec<CellId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Cell(CellId),
    Dustbin,
}

impl BasicPartition {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cells of branch `i`, in increasing order along the branch.
    pub fn branch_cells(&self, i: usize) -> &[CellId] {
        self.by_branch.get(i).map_or(&[], Vec::as_slice)
    }

    /// The cell containing `pt` (taken modulo the integer translation), or
    /// the dustbin when `pt` lies in no cell.
    pub fn classify_point(&self, map: &PLMap, pt: &Point) -> Result<Classification> {
        let (branch, _, t) =
            map.in_x(pt).ok_or_else(|| Error::Domain(format!("{pt} is not in a translated branch of F")))?;
        Ok(self
            .branch_cells(branch)
            .iter()
            .copied()
            .find(|&c| self.cells[c].contains(&t))
            .map_or(Classification::Dustbin, Classification::Cell))
    }
}

/// A closed parameter interval whose image lies in `X^ℓ + p`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Run {
    lo: Rational,
    hi: Rational,
    label: (usize, i64),
}

pub fn build_partition(map: &PLMap) -> BasicPartition {
    let mut part = BasicPartition { cells: Vec::new(), by_branch: vec![Vec::new(); map.shape().branch_count()] };
    for branch in map.branches_of_f() {
        let mut runs = Vec::new();
        for mp in map.mapped_pieces(&branch.segment) {
            runs.extend(runs_of_piece(map, &mp));
        }
        let mut groups: Vec<Run> = Vec::new();
        for run in runs {
            match groups.last_mut() {
                Some(g) if g.label == run.label && g.hi == run.lo => g.hi = run.hi,
                _ => groups.push(run),
            }
        }
        for (j, g) in groups.into_iter().enumerate() {
            let id = part.cells.len();
            part.cells.push(Cell {
                id,
                branch: branch.index,
                index_in_branch: j + 1,
                a: g.lo,
                b: g.hi,
                ell: g.label.0,
                p: g.label.1,
            });
            part.by_branch[branch.index].push(id);
        }
    }
    part
}

fn runs_of_piece(map: &PLMap, mp: &MappedPiece) -> Vec<Run> {
    let mut runs = Vec::new();
    match mp.chart {
        Chart::Line => {
            if mp.img_lo == mp.img_hi {
                if let Some(label) = map.line_attach_of_x(&mp.img_lo) {
                    runs.push(Run { lo: mp.dom_lo.clone(), hi: mp.dom_hi.clone(), label });
                }
                return runs;
            }
            let (ylo, yhi) = if mp.img_lo < mp.img_hi { (&mp.img_lo, &mp.img_hi) } else { (&mp.img_hi, &mp.img_lo) };
            for (l, b) in map.shape().branches.iter().enumerate() {
                if !(map.is_branch_of_f(l) && map.tr_upto(l).is_zero()) {
                    continue;
                }
                // attach + m in [ylo, yhi]
                let first = floor_i64(&(ylo - &b.attach)) - 1;
                let last = floor_i64(&(yhi - &b.attach)) + 1;
                for m in first..=last {
                    let y = &b.attach + int(m);
                    if ylo <= &y && &y <= yhi {
                        let u = solve(mp, &y);
                        runs.push(Run { lo: u.clone(), hi: u, label: (l, m) });
                    }
                }
            }
            runs.sort_by(|a, b| a.lo.cmp(&b.lo));
        }
        Chart::Branch { branch: l, copy } => {
            if !map.is_branch_of_f(l) {
                return runs;
            }
            let s = map.tr_upto(l);
            let label = (l, copy);
            let lo_in = &mp.img_lo >= s;
            let hi_in = &mp.img_hi >= s;
            match (lo_in, hi_in) {
                (true, true) => runs.push(Run { lo: mp.dom_lo.clone(), hi: mp.dom_hi.clone(), label }),
                (true, false) => runs.push(Run { lo: mp.dom_lo.clone(), hi: solve(mp, s), label }),
                (false, true) => runs.push(Run { lo: solve(mp, s), hi: mp.dom_hi.clone(), label }),
                (false, false) => {}
            }
        }
    }
    runs
}

/// The parameter where a non-constant mapped piece takes chart value `y`.
fn solve(mp: &MappedPiece, y: &Rational) -> Rational {
    &mp.dom_lo + (y - &mp.img_lo) * (&mp.dom_hi - &mp.dom_lo) / (&mp.img_hi - &mp.img_lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_map;
    use crate::rational::rat;

    fn load(doc: &str) -> PLMap {
        PLMap::new(&parse_map(doc).unwrap()).unwrap()
    }

    const S1: &str = r#"{ "branches": [{"attach": "0", "length": "1"}],
        "line": [["0", {"R": "1/3"}], ["1", {"R": "4/3"}]],
        "branch_maps": [[["0", {"R": "1/3"}], ["1/4", {"B": [0, "0", 1]}], ["1/2", {"B": [0, "1", 1]}],
                         ["3/4", {"B": [0, "0", 1]}], ["1", {"R": "4/3"}]]] }"#;

    #[test]
    fn s1_single_cell() {
        let f = load(S1);
        let part = build_partition(&f);
        assert_eq!(part.len(), 1);
        let c = part.cell(0);
        assert_eq!((c.branch, c.a.clone(), c.b.clone(), c.ell, c.p), (0, rat(1, 4), rat(3, 4), 0, 1));
    }

    #[test]
    fn s1_classify() {
        let f = load(S1);
        let part = build_partition(&f);
        let bp = |t| f.shape().branch_point(0, t, 0);
        assert_eq!(part.classify_point(&f, &bp(rat(1, 2))).unwrap(), Classification::Cell(0));
        assert_eq!(part.cell(0).index_in_branch, 1);
        assert_eq!(part.classify_point(&f, &bp(rat(1, 8))).unwrap(), Classification::Dustbin);
        assert_eq!(part.classify_point(&f, &bp(rat(1, 4))).unwrap(), Classification::Cell(0));
        assert_eq!(part.classify_point(&f, &bp(rat(3, 4)).translate(7)).unwrap(), Classification::Cell(0));
        assert!(part.classify_point(&f, &Point::Line(rat(1, 2))).is_err());
    }

    #[test]
    fn branch_into_interior_gives_no_cells() {
        let doc = r#"{ "branches": [{"attach": "0", "length": "1"}],
            "line": [["0", {"R": "1/3"}], ["1", {"R": "4/3"}]],
            "branch_maps": [[["0", {"R": "1/3"}], ["1", {"R": "2/3"}]]] }"#;
        assert!(build_partition(&load(doc)).is_empty());
    }

    #[test]
    fn two_branch_label_and_displacement() {
        // Branch 0 ends by sweeping across branch 1 translated by 2.
        let doc = r#"{ "branches": [{"attach": "0", "length": "1"}, {"attach": "1/2", "length": "1"}],
            "line": [["0", {"R": "1/4"}], ["1", {"R": "5/4"}]],
            "branch_maps": [
                [["0", {"R": "1/4"}], ["1/2", {"R": "5/2"}], ["1", {"B": [1, "1", 2]}]],
                [["0", {"R": "3/4"}], ["1", {"R": "3/4"}]]] }"#;
        let f = load(doc);
        let part = build_partition(&f);
        let last = part.cells().iter().rfind(|c| c.branch == 0).unwrap();
        assert_eq!((last.ell, last.p), (1, 2));
        assert_eq!((last.a.clone(), last.b.clone()), (rat(1, 2), int(1)));
        // the line sweep [1/4, 5/2] also crosses attachments 1 and 2 of branch 0
        // and 1/2, 3/2 of branch 1: each one a degenerate cell
        let labels: Vec<_> = part.cells().iter().filter(|c| c.branch == 0).map(|c| (c.ell, c.p)).collect();
        assert_eq!(labels, vec![(1, 0), (0, 1), (1, 1), (0, 2), (1, 2)]);
        for w in labels.windows(2) {
            assert_ne!(w[0], w[1]);
        }
    }

    #[test]
    fn dip_below_invariant_part_splits_cells() {
        // The image leaves X^0 + 1 on (17/28, 9/14) and comes back.
        let doc = r#"{ "branches": [{"attach": "0", "length": "1"}],
            "tr": [{"branch": 0, "upto": "1/4"}],
            "line": [["0", {"R": "1/3"}], ["1", {"R": "4/3"}]],
            "branch_maps": [[["0", {"R": "1/3"}], ["1/8", {"R": "1"}], ["1/4", {"B": [0, "1/8", 1]}],
                             ["1/2", {"B": [0, "1", 1]}], ["5/8", {"B": [0, "1/8", 1]}],
                             ["3/4", {"B": [0, "1", 1]}], ["1", {"B": [0, "1", 1]}]]] }"#;
        let f = load(doc);
        let part = build_partition(&f);
        let cells: Vec<_> = part.cells().iter().map(|c| (c.a.clone(), c.b.clone(), c.ell, c.p)).collect();
        assert_eq!(cells, vec![(rat(2, 7), rat(17, 28), 0, 1), (rat(9, 14), int(1), 0, 1)]);
        let gap = f.shape().branch_point(0, rat(5, 8), 0);
        assert_eq!(part.classify_point(&f, &gap).unwrap(), Classification::Dustbin);
    }
}
