//! Geometry of the lifted sun graph: the real line `R` with finitely many
//! branch segments hanging off each unit interval, repeated by the integer
//! translation.

use std::cmp::Ordering;
use std::fmt;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, Rational};

/// One branch of the sun graph: attached to the line at `attach` in `[0, 1)`,
/// parametrised by `t` in `[0, length]` with `t = 0` the attachment point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchShape {
    pub attach: Rational,
    pub length: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SunGraphShape {
    pub branches: Vec<BranchShape>,
}

impl SunGraphShape {
    pub fn new(branches: Vec<BranchShape>) -> Result<Self> {
        let shape = SunGraphShape { branches };
        shape.check()?;
        Ok(shape)
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn check(&self) -> Result<()> {
        for (i, b) in self.branches.iter().enumerate() {
            if b.attach.is_negative() || b.attach >= int(1) {
                return Err(Error::Validation(format!("branch {i}: attach {} not in [0,1)", fmt_rational(&b.attach))));
            }
            if !b.length.is_positive() {
                return Err(Error::Validation(format!(
                    "branch {i}: length {} must be positive",
                    fmt_rational(&b.length)
                )));
            }
            for (j, c) in self.branches.iter().enumerate().skip(i + 1) {
                if c.attach == b.attach {
                    return Err(Error::Validation(format!(
                        "branches {i} and {j} share attach point {}",
                        fmt_rational(&b.attach)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Canonical constructor for a point on a branch copy.
    pub fn branch_point(&self, branch: usize, t: Rational, copy: i64) -> Point {
        if t.is_zero() {
            Point::Line(&self.branches[branch].attach + int(copy))
        } else {
            Point::Branch { branch, t, copy }
        }
    }

    /// Brings a possibly non-canonical point into canonical form.
    pub fn canonical(&self, pt: Point) -> Point {
        match pt {
            Point::Branch { branch, t, copy } => self.branch_point(branch, t, copy),
            p => p,
        }
    }

    pub fn contains(&self, pt: &Point) -> bool {
        match pt {
            Point::Line(_) => true,
            Point::Branch { branch, t, .. } => {
                *branch < self.branches.len() && !t.is_negative() && *t <= self.branches[*branch].length
            }
        }
    }

    /// All charts containing `pt`. A point of the line that is an attachment
    /// point also lies in the corresponding branch chart (at `t = 0`).
    pub fn charts_of(&self, pt: &Point) -> Vec<Chart> {
        match pt {
            Point::Line(x) => {
                let mut out = vec![Chart::Line];
                for (i, b) in self.branches.iter().enumerate() {
                    let d = x - &b.attach;
                    if d.is_integer() {
                        out.push(Chart::Branch { branch: i, copy: crate::rational::floor_i64(&d) });
                    }
                }
                out
            }
            Point::Branch { branch, copy, .. } => {
                vec![Chart::Branch { branch: *branch, copy: *copy }]
            }
        }
    }

    /// Coordinate of `pt` in `chart`, if the point lies in that chart.
    pub fn coord_in(&self, pt: &Point, chart: Chart) -> Option<Rational> {
        match (chart, pt) {
            (Chart::Line, Point::Line(x)) => Some(x.clone()),
            (Chart::Line, Point::Branch { .. }) => None,
            (Chart::Branch { branch, copy }, Point::Branch { branch: b, t, copy: c }) => {
                (branch == *b && copy == *c).then(|| t.clone())
            }
            (Chart::Branch { branch, copy }, Point::Line(x)) => {
                (*x == &self.branches[branch].attach + int(copy)).then(Rational::zero)
            }
        }
    }

    /// The point with coordinate `c` in `chart`.
    pub fn point_at(&self, chart: Chart, c: Rational) -> Point {
        match chart {
            Chart::Line => Point::Line(c),
            Chart::Branch { branch, copy } => self.branch_point(branch, c, copy),
        }
    }

    /// Orders two points of one branch copy by their `t` coordinate; the
    /// attachment point is the minimum.
    pub fn branch_compare(&self, a: &Point, b: &Point) -> Result<Ordering> {
        for chart in self.charts_of(a) {
            if !chart.is_line() {
                if let (Some(ca), Some(cb)) = (self.coord_in(a, chart), self.coord_in(b, chart)) {
                    return Ok(ca.cmp(&cb));
                }
            }
        }
        Err(Error::Domain(format!("{a} and {b} do not lie in a common branch copy")))
    }
}

/// A point of the lifted graph `T`.
///
/// Canonical form never stores `Branch` with `t = 0`; that point is the line
/// point `attach + copy`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Line(Rational),
    Branch { branch: usize, t: Rational, copy: i64 },
}

impl Point {
    pub fn line(x: Rational) -> Self {
        Point::Line(x)
    }

    /// `pt + m`, the integer translate.
    pub fn translate(&self, m: i64) -> Point {
        match self {
            Point::Line(x) => Point::Line(x + int(m)),
            Point::Branch { branch, t, copy } => Point::Branch { branch: *branch, t: t.clone(), copy: copy + m },
        }
    }

    /// Retraction of `T` onto the line: a branch point goes to the point where
    /// its branch copy is attached.
    pub fn retract_line(&self, shape: &SunGraphShape) -> Rational {
        match self {
            Point::Line(x) => x.clone(),
            Point::Branch { branch, copy, .. } => &shape.branches[*branch].attach + int(*copy),
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, Point::Line(_))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Line(x) => write!(f, "R({})", fmt_rational(x)),
            Point::Branch { branch, t, copy } => {
                write!(f, "B({branch}, {}, {copy})", fmt_rational(t))
            }
        }
    }
}

/// A coordinate chart: the line, or one translated copy of a branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Chart {
    Line,
    Branch { branch: usize, copy: i64 },
}

impl Chart {
    pub fn is_line(&self) -> bool {
        matches!(self, Chart::Line)
    }

    pub fn translate(self, m: i64) -> Chart {
        match self {
            Chart::Line => Chart::Line,
            Chart::Branch { branch, copy } => Chart::Branch { branch, copy: copy + m },
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Chart::Line => write!(f, "R"),
            Chart::Branch { branch, copy } => write!(f, "X{branch}{copy:+}"),
        }
    }
}

/// A closed interval inside one chart.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TSegment {
    pub chart: Chart,
    pub lo: Rational,
    pub hi: Rational,
}

impl TSegment {
    pub fn new(chart: Chart, a: Rational, b: Rational) -> Self {
        if a <= b {
            TSegment { chart, lo: a, hi: b }
        } else {
            TSegment { chart, lo: b, hi: a }
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_coord(&self, c: &Rational) -> bool {
        &self.lo <= c && c <= &self.hi
    }

    pub fn contains(&self, shape: &SunGraphShape, pt: &Point) -> bool {
        shape.coord_in(pt, self.chart).is_some_and(|c| self.contains_coord(&c))
    }

    pub fn translate(&self, m: i64) -> TSegment {
        match self.chart {
            Chart::Line => TSegment { chart: Chart::Line, lo: &self.lo + int(m), hi: &self.hi + int(m) },
            c => TSegment { chart: c.translate(m), lo: self.lo.clone(), hi: self.hi.clone() },
        }
    }
}

impl fmt::Display for TSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}, {}]", self.chart, fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn one_branch() -> SunGraphShape {
        SunGraphShape::new(vec![BranchShape { attach: int(0), length: int(1) }]).unwrap()
    }

    #[test]
    fn translate_examples() {
        assert_eq!(Point::Line(rat(1, 2)).translate(2), Point::Line(rat(5, 2)));
        let p = Point::Branch { branch: 0, t: rat(1, 3), copy: 0 };
        assert_eq!(p.translate(-1), Point::Branch { branch: 0, t: rat(1, 3), copy: -1 });
        let s = one_branch();
        assert_eq!(s.branch_point(0, int(0), 1), Point::Line(int(1)));
    }

    #[test]
    fn retract_examples() {
        let s = one_branch();
        assert_eq!(Point::Line(rat(7, 3)).retract_line(&s), rat(7, 3));
        let p = Point::Branch { branch: 0, t: rat(1, 2), copy: 3 };
        assert_eq!(p.retract_line(&s), int(3));
    }

    #[test]
    fn compare_examples() {
        let s = one_branch();
        let a = s.branch_point(0, rat(1, 4), 0);
        let b = s.branch_point(0, rat(3, 4), 0);
        assert_eq!(s.branch_compare(&a, &b).unwrap(), Ordering::Less);
        let attach = s.branch_point(0, int(0), 0);
        assert_eq!(s.branch_compare(&attach, &a).unwrap(), Ordering::Less);
        assert_eq!(s.branch_compare(&a, &a.clone()).unwrap(), Ordering::Equal);
        let other = s.branch_point(0, rat(1, 4), 1);
        assert!(s.branch_compare(&a, &other).is_err());
    }

    #[test]
    fn shape_rejects_shared_attach() {
        let b = BranchShape { attach: rat(1, 2), length: int(1) };
        assert!(SunGraphShape::new(vec![b.clone(), b]).is_err());
        let bad = BranchShape { attach: int(1), length: int(1) };
        assert!(SunGraphShape::new(vec![bad]).is_err());
    }

    #[test]
    fn attach_point_lies_in_both_charts() {
        let s = one_branch();
        let charts = s.charts_of(&Point::Line(int(2)));
        assert!(charts.contains(&Chart::Line));
        assert!(charts.contains(&Chart::Branch { branch: 0, copy: 2 }));
    }

    fn arb_point() -> impl Strategy<Value = Point> {
        prop_oneof![
            (-50i64..50, 1i64..20).prop_map(|(n, d)| Point::Line(rat(n, d))),
            (1i64..20, 1i64..20, -5i64..5).prop_map(|(n, d, m)| {
                let t = rat(n.min(d), d);
                one_branch().branch_point(0, t, m)
            }),
        ]
    }

    proptest! {
        #[test]
        fn translation_composes(p in arb_point(), m in -10i64..10, k in -10i64..10) {
            prop_assert_eq!(p.translate(m).translate(k), p.translate(m + k));
        }

        #[test]
        fn retraction_commutes_with_translation(p in arb_point(), m in -10i64..10) {
            let s = one_branch();
            prop_assert_eq!(p.translate(m).retract_line(&s), p.retract_line(&s) + int(m));
            let r = Point::Line(p.retract_line(&s));
            prop_assert_eq!(r.retract_line(&s), p.retract_line(&s));
        }

        #[test]
        fn canonical_points_never_store_zero_t(p in arb_point()) {
            if let Point::Branch { t, .. } = &p {
                prop_assert!(!t.is_zero());
            }
        }
    }
}
