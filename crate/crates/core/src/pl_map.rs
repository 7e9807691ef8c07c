//! Degree-1 piecewise-linear maps on the lifted sun graph.
//!
//! A map is stored on the fundamental domain only: the line part on `[0, 1]`
//! and one part per branch on `[0, length]`. Everything else follows from
//! `F(x + m) = F(x) + m`. Consecutive control-point values must share a chart,
//! and the map is linear in that chart's coordinate between them.

use std::fmt;

use num::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{floor_i64, fmt_rational, int, Rational};
use crate::space::{BranchShape, Chart, Point, SunGraphShape, TSegment};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ControlPoint {
    pub at: Rational,
    pub value: Point,
}

/// Unvalidated map data, as read from a map document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapSpec {
    pub branches: Vec<BranchShape>,
    /// `(branch, upto)`: the declared invariant part of that branch is `[0, upto]`.
    pub tr: Vec<(usize, Rational)>,
    pub line: Vec<ControlPoint>,
    pub branch_maps: Vec<Vec<ControlPoint>>,
}

/// Where a linear piece lives in the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Line,
    Branch(usize),
}

/// One linear piece of the map: `[lo, hi]` in the domain maps linearly onto
/// the chart coordinates from `v_lo` to `v_hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub lo: Rational,
    pub hi: Rational,
    pub chart: Chart,
    pub v_lo: Rational,
    pub v_hi: Rational,
}

impl Piece {
    pub fn slope(&self) -> Rational {
        (&self.v_hi - &self.v_lo) / (&self.hi - &self.lo)
    }

    pub fn value_at(&self, u: &Rational) -> Rational {
        if self.v_hi == self.v_lo {
            return self.v_lo.clone();
        }
        &self.v_lo + (u - &self.lo) * self.slope()
    }

    pub fn is_constant(&self) -> bool {
        self.v_lo == self.v_hi
    }
}

/// A linear piece of `F` restricted to a sub-interval of a chart, already
/// translated: the domain `[dom_lo, dom_hi]` (in the source chart) maps onto
/// `chart` coordinates `img_lo` (at `dom_lo`) to `img_hi` (at `dom_hi`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedPiece {
    pub dom_lo: Rational,
    pub dom_hi: Rational,
    pub chart: Chart,
    pub img_lo: Rational,
    pub img_hi: Rational,
}

impl MappedPiece {
    pub fn value_at(&self, u: &Rational) -> Rational {
        if self.img_lo == self.img_hi || self.dom_lo == self.dom_hi {
            return self.img_lo.clone();
        }
        &self.img_lo + (u - &self.dom_lo) * (&self.img_hi - &self.img_lo) / (&self.dom_hi - &self.dom_lo)
    }

    pub fn image(&self) -> TSegment {
        TSegment::new(self.chart, self.img_lo.clone(), self.img_hi.clone())
    }
}

/// One branch of `F`: the part `[s_i, len_i]` of branch `i` outside the
/// declared invariant set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchOfF {
    pub index: usize,
    pub segment: TSegment,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Shape,
    Endpoints,
    Ordering,
    PointOutOfRange,
    ChartPair,
    Degree1,
    AttachContinuity,
    Invariance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
    pub witness: Option<Point>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.message)?;
        if let Some(w) = &self.witness {
            write!(f, " (witness {w})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

#[derive(Clone, Debug)]
pub struct PLMap {
    shape: SunGraphShape,
    tr_upto: Vec<Rational>,
    line: Vec<ControlPoint>,
    branch_maps: Vec<Vec<ControlPoint>>,
    line_pieces: Vec<Piece>,
    branch_pieces: Vec<Vec<Piece>>,
}

/// Checks every structural condition on a map document. Stops at the first
/// failing stage, since later checks need the earlier ones to hold.
pub fn validate(spec: &MapSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    match build(spec) {
        Ok(map) => report.violations.extend(map.invariance_violations()),
        Err(v) => report.violations.push(v),
    }
    report
}

fn violation(kind: ViolationKind, message: String, witness: Option<Point>) -> Violation {
    Violation { kind, message, witness }
}

fn build(spec: &MapSpec) -> std::result::Result<PLMap, Violation> {
    let shape =
        SunGraphShape::new(spec.branches.clone()).map_err(|e| violation(ViolationKind::Shape, e.to_string(), None))?;
    let n = shape.branch_count();
    if spec.branch_maps.len() != n {
        return Err(violation(
            ViolationKind::Shape,
            format!("{} branch maps for {n} branches", spec.branch_maps.len()),
            None,
        ));
    }
    let mut tr_upto = vec![Rational::zero(); n];
    for (b, s) in &spec.tr {
        if *b >= n {
            return Err(violation(ViolationKind::Shape, format!("tr entry for unknown branch {b}"), None));
        }
        if s.is_negative() || *s > shape.branches[*b].length {
            return Err(violation(
                ViolationKind::Shape,
                format!("tr upto {} outside branch {b}", fmt_rational(s)),
                None,
            ));
        }
        tr_upto[*b] = s.clone();
    }

    let canon = |cps: &[ControlPoint]| -> std::result::Result<Vec<ControlPoint>, Violation> {
        cps.iter()
            .map(|cp| {
                if !shape.contains(&cp.value) {
                    return Err(violation(
                        ViolationKind::PointOutOfRange,
                        format!("control value {} is not a point of T", cp.value),
                        Some(cp.value.clone()),
                    ));
                }
                Ok(ControlPoint { at: cp.at.clone(), value: shape.canonical(cp.value.clone()) })
            })
            .collect()
    };
    let line = canon(&spec.line)?;
    let branch_maps = spec.branch_maps.iter().map(|b| canon(b)).collect::<std::result::Result<Vec<_>, _>>()?;

    let line_pieces = pieces_of(&shape, "line", &line, &int(1))?;
    let mut branch_pieces = Vec::with_capacity(n);
    for (i, cps) in branch_maps.iter().enumerate() {
        branch_pieces.push(pieces_of(&shape, &format!("branch {i}"), cps, &shape.branches[i].length)?);
    }

    let map = PLMap { shape, tr_upto, line, branch_maps, line_pieces, branch_pieces };

    let v0 = &map.line[0].value;
    let v1 = &map.line[map.line.len() - 1].value;
    if map.shape.canonical(v0.translate(1)) != *v1 {
        return Err(violation(
            ViolationKind::Degree1,
            format!("F(1) = {v1} but F(0) + 1 = {}", v0.translate(1)),
            Some(v1.clone()),
        ));
    }
    for i in 0..map.shape.branch_count() {
        let at_attach = map.eval(&Point::Line(map.shape.branches[i].attach.clone()));
        let start = &map.branch_maps[i][0].value;
        if *start != at_attach {
            return Err(violation(
                ViolationKind::AttachContinuity,
                format!("branch {i} starts at {start} but the line maps its attachment to {at_attach}"),
                Some(start.clone()),
            ));
        }
    }
    Ok(map)
}

fn pieces_of(
    shape: &SunGraphShape,
    what: &str,
    cps: &[ControlPoint],
    end: &Rational,
) -> std::result::Result<Vec<Piece>, Violation> {
    if cps.len() < 2 || !cps[0].at.is_zero() || cps[cps.len() - 1].at != *end {
        return Err(violation(
            ViolationKind::Endpoints,
            format!("{what}: control points must start at 0 and end at {}", fmt_rational(end)),
            None,
        ));
    }
    let mut pieces = Vec::with_capacity(cps.len() - 1);
    for w in cps.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.at >= b.at {
            return Err(violation(
                ViolationKind::Ordering,
                format!("{what}: abscissae {} and {} not increasing", fmt_rational(&a.at), fmt_rational(&b.at)),
                None,
            ));
        }
        let chart = common_chart(shape, &a.value, &b.value).ok_or_else(|| {
            violation(
                ViolationKind::ChartPair,
                format!(
                    "{what}: values {} at {} and {} at {} share no chart; refine with an intermediate control point",
                    a.value,
                    fmt_rational(&a.at),
                    b.value,
                    fmt_rational(&b.at)
                ),
                Some(b.value.clone()),
            )
        })?;
        pieces.push(Piece {
            lo: a.at.clone(),
            hi: b.at.clone(),
            chart,
            v_lo: shape.coord_in(&a.value, chart).expect("chart contains value"),
            v_hi: shape.coord_in(&b.value, chart).expect("chart contains value"),
        });
    }
    Ok(pieces)
}

/// The chart used to interpolate between two values; the line wins ties.
fn common_chart(shape: &SunGraphShape, a: &Point, b: &Point) -> Option<Chart> {
    let cb = shape.charts_of(b);
    shape.charts_of(a).into_iter().find(|c| cb.contains(c))
}

impl PLMap {
    pub fn new(spec: &MapSpec) -> Result<PLMap> {
        let map = build(spec).map_err(|v| Error::Validation(v.to_string()))?;
        if let Some(v) = map.invariance_violations().into_iter().next() {
            return Err(Error::Validation(v.to_string()));
        }
        Ok(map)
    }

    pub fn shape(&self) -> &SunGraphShape {
        &self.shape
    }

    pub fn tr_upto(&self, branch: usize) -> &Rational {
        &self.tr_upto[branch]
    }

    pub fn line_control_points(&self) -> &[ControlPoint] {
        &self.line
    }

    pub fn branch_control_points(&self, branch: usize) -> &[ControlPoint] {
        &self.branch_maps[branch]
    }

    pub fn pieces(&self, domain: Domain) -> &[Piece] {
        match domain {
            Domain::Line => &self.line_pieces,
            Domain::Branch(i) => &self.branch_pieces[i],
        }
    }

    /// Whether branch `i` has a nonempty part outside the invariant set.
    pub fn is_branch_of_f(&self, i: usize) -> bool {
        self.tr_upto[i] < self.shape.branches[i].length
    }

    pub fn branches_of_f(&self) -> Vec<BranchOfF> {
        (0..self.shape.branch_count())
            .filter(|&i| self.is_branch_of_f(i))
            .map(|i| BranchOfF {
                index: i,
                segment: TSegment::new(
                    Chart::Branch { branch: i, copy: 0 },
                    self.tr_upto[i].clone(),
                    self.shape.branches[i].length.clone(),
                ),
            })
            .collect()
    }

    /// `F(R) ⊆ R`: every line piece stays on the line.
    pub fn line_invariant(&self) -> bool {
        self.line_pieces.iter().all(|p| p.chart.is_line() || (p.is_constant() && p.v_lo.is_zero()))
    }

    /// Membership in the declared invariant set `T_R`.
    pub fn in_tr(&self, pt: &Point) -> bool {
        match pt {
            Point::Line(_) => true,
            Point::Branch { branch, t, .. } => *t <= self.tr_upto[*branch],
        }
    }

    /// If `pt` lies in `X^ℓ + m` for a branch `ℓ` of `F`, returns `(ℓ, m, t)`.
    /// The minimum of each branch of `F` counts as a point of that branch.
    pub fn in_x(&self, pt: &Point) -> Option<(usize, i64, Rational)> {
        match pt {
            Point::Branch { branch, t, copy } => {
                (self.is_branch_of_f(*branch) && *t >= self.tr_upto[*branch]).then(|| (*branch, *copy, t.clone()))
            }
            Point::Line(x) => self.line_attach_of_x(x).map(|(l, m)| (l, m, Rational::zero())),
        }
    }

    /// A line point that is the minimum of a translated branch of `F`
    /// (possible only when that branch starts at its attachment point).
    pub fn line_attach_of_x(&self, x: &Rational) -> Option<(usize, i64)> {
        self.shape.branches.iter().enumerate().find_map(|(i, b)| {
            let d = x - &b.attach;
            (d.is_integer() && self.tr_upto[i].is_zero() && self.is_branch_of_f(i)).then(|| (i, floor_i64(&d)))
        })
    }

    pub fn in_int_tr(&self, pt: &Point) -> bool {
        self.in_tr(pt) && self.in_x(pt).is_none()
    }

    /// `F(pt)`, exactly.
    pub fn eval(&self, pt: &Point) -> Point {
        match pt {
            Point::Line(x) => {
                let m = floor_i64(x);
                let f = x - int(m);
                let v = eval_pieces(&self.line_pieces, &f);
                self.shape.canonical(translate_chart_point(&self.shape, v, m))
            }
            Point::Branch { branch, t, copy } => {
                let v = eval_pieces(&self.branch_pieces[*branch], t);
                self.shape.canonical(translate_chart_point(&self.shape, v, *copy))
            }
        }
    }

    /// `F^n(pt)`.
    pub fn iterate(&self, pt: &Point, n: usize) -> Point {
        let mut p = pt.clone();
        for _ in 0..n {
            p = self.eval(&p);
        }
        p
    }

    /// Splits `seg` at the map's breakpoints and returns each linear piece
    /// with its exact image, in domain order.
    pub fn mapped_pieces(&self, seg: &TSegment) -> Vec<MappedPiece> {
        let mut out = Vec::new();
        match seg.chart {
            Chart::Line => {
                let first = floor_i64(&seg.lo);
                let last = floor_i64(&seg.hi);
                for k in first..=last {
                    let off = int(k);
                    let lo = &seg.lo - &off;
                    let hi = &seg.hi - &off;
                    self.clip_pieces(&self.line_pieces, &lo, &hi, k, &off, &mut out);
                }
            }
            Chart::Branch { branch, copy } => {
                self.clip_pieces(&self.branch_pieces[branch], &seg.lo, &seg.hi, copy, &Rational::zero(), &mut out);
            }
        }
        // A degenerate segment sitting on a breakpoint is reported once.
        if seg.is_degenerate() {
            out.truncate(1);
        }
        out
    }

    fn clip_pieces(
        &self,
        pieces: &[Piece],
        lo: &Rational,
        hi: &Rational,
        shift: i64,
        dom_off: &Rational,
        out: &mut Vec<MappedPiece>,
    ) {
        for p in pieces {
            let a = if &p.lo > lo { p.lo.clone() } else { lo.clone() };
            let b = if &p.hi < hi { p.hi.clone() } else { hi.clone() };
            if a > b {
                continue;
            }
            // Skip zero-length overlaps at a shared breakpoint unless the
            // whole request is that single point.
            if a == b && lo != hi {
                continue;
            }
            let (chart, va) = translate_coord(p.chart, p.value_at(&a), shift);
            let (_, vb) = translate_coord(p.chart, p.value_at(&b), shift);
            out.push(MappedPiece { dom_lo: a + dom_off, dom_hi: b + dom_off, chart, img_lo: va, img_hi: vb });
        }
    }

    /// The image `F(seg)` as the chain of chart segments traced by the
    /// linear pieces, in domain order.
    pub fn image_segment(&self, seg: &TSegment) -> Vec<TSegment> {
        self.mapped_pieces(seg).iter().map(MappedPiece::image).collect()
    }

    /// Coordinates `u` in `seg` with `F(u) = target`, ascending. A piece that
    /// is constantly equal to `target` contributes both of its endpoints and
    /// sets the degenerate flag.
    pub fn preimage_in_segment(&self, seg: &TSegment, target: &Point) -> Preimage {
        let mut coords = Vec::new();
        let mut degenerate = false;
        for mp in self.mapped_pieces(seg) {
            let Some(c) = self.shape.coord_in(target, mp.chart) else { continue };
            if mp.img_lo == mp.img_hi {
                if mp.img_lo == c {
                    degenerate = true;
                    coords.push(mp.dom_lo.clone());
                    coords.push(mp.dom_hi.clone());
                }
                continue;
            }
            let (lo, hi) = if mp.img_lo <= mp.img_hi { (&mp.img_lo, &mp.img_hi) } else { (&mp.img_hi, &mp.img_lo) };
            if lo <= &c && &c <= hi {
                let u = &mp.dom_lo + (&c - &mp.img_lo) * (&mp.dom_hi - &mp.dom_lo) / (&mp.img_hi - &mp.img_lo);
                coords.push(u);
            }
        }
        coords.sort();
        coords.dedup();
        Preimage { coords, degenerate }
    }

    fn invariance_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let whole_line = TSegment::new(Chart::Line, int(0), int(1));
        let mut segments = vec![whole_line];
        for i in 0..self.shape.branch_count() {
            if self.tr_upto[i].is_positive() {
                segments.push(TSegment::new(Chart::Branch { branch: i, copy: 0 }, int(0), self.tr_upto[i].clone()));
            }
        }
        for seg in segments {
            for mp in self.mapped_pieces(&seg) {
                if let Chart::Branch { branch, .. } = mp.chart {
                    let top = if mp.img_lo >= mp.img_hi { &mp.img_lo } else { &mp.img_hi };
                    if top > &self.tr_upto[branch] {
                        let u = if mp.img_lo >= mp.img_hi { &mp.dom_lo } else { &mp.dom_hi };
                        let witness = self.shape.point_at(seg.chart, u.clone());
                        out.push(violation(
                            ViolationKind::Invariance,
                            format!(
                                "F({witness}) = {} leaves the declared invariant set",
                                self.shape.point_at(mp.chart, top.clone())
                            ),
                            Some(witness),
                        ));
                        return out;
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Preimage {
    pub coords: Vec<Rational>,
    pub degenerate: bool,
}

fn eval_pieces(pieces: &[Piece], u: &Rational) -> (Chart, Rational) {
    let idx = pieces.partition_point(|p| &p.hi < u).min(pieces.len() - 1);
    let p = &pieces[idx];
    (p.chart, p.value_at(u))
}

pub(crate) fn translate_coord(chart: Chart, c: Rational, m: i64) -> (Chart, Rational) {
    match chart {
        Chart::Line => (Chart::Line, c + int(m)),
        ch => (ch.translate(m), c),
    }
}

fn translate_chart_point(shape: &SunGraphShape, (chart, c): (Chart, Rational), m: i64) -> Point {
    let (chart, c) = translate_coord(chart, c, m);
    shape.point_at(chart, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_map;
    use crate::rational::rat;
    use proptest::prelude::*;

    pub(crate) const S1: &str = r#"{ "branches": [{"attach": "0", "length": "1"}], "tr": [{"branch": 0, "upto": "0"}],
        "line": [["0", {"R": "1/3"}], ["1", {"R": "4/3"}]],
        "branch_maps": [[["0", {"R": "1/3"}], ["1/4", {"B": [0, "0", 1]}], ["1/2", {"B": [0, "1", 1]}],
                         ["3/4", {"B": [0, "0", 1]}], ["1", {"R": "4/3"}]]] }"#;

    fn s1() -> PLMap {
        PLMap::new(&parse_map(S1).unwrap()).unwrap()
    }

    fn bp(i: usize, t: Rational, m: i64) -> Point {
        s1().shape().branch_point(i, t, m)
    }

    #[test]
    fn s1_validates() {
        assert!(validate(&parse_map(S1).unwrap()).passed());
    }

    #[test]
    fn rigid_rotation_validates() {
        let doc = r#"{"branches": [], "line": [["0", {"R": "1/3"}], ["1", {"R": "4/3"}]], "branch_maps": []}"#;
        assert!(validate(&parse_map(doc).unwrap()).passed());
    }

    #[test]
    fn invariance_failure_has_witness() {
        // The line is pushed into the branch.
        let doc = r#"{"branches": [{"attach": "0", "length": "1"}],
            "line": [["0", {"R": "0"}], ["1/4", {"B": [0, "1/2", 0]}], ["1/2", {"R": "0"}], ["1", {"R": "1"}]],
            "branch_maps": [[["0", {"R": "0"}], ["1", {"R": "0"}]]]}"#;
        let report = validate(&parse_map(doc).unwrap());
        let v = report.first().unwrap();
        assert_eq!(v.kind, ViolationKind::Invariance);
        assert!(v.witness.is_some());
    }

    #[test]
    fn chart_pair_failure_is_reported() {
        let doc = r#"{"branches": [{"attach": "0", "length": "1"}],
            "line": [["0", {"R": "1/3"}], ["1", {"R": "4/3"}]],
            "branch_maps": [[["0", {"R": "1/3"}], ["1", {"B": [0, "1", 1]}]]]}"#;
        let v = validate(&parse_map(doc).unwrap()).first().cloned().unwrap();
        assert_eq!(v.kind, ViolationKind::ChartPair);
        assert!(v.message.contains("refine"));
    }

    #[test]
    fn degree_one_failure() {
        let doc = r#"{"branches": [], "line": [["0", {"R": "0"}], ["1", {"R": "2"}]], "branch_maps": []}"#;
        assert_eq!(validate(&parse_map(doc).unwrap()).first().unwrap().kind, ViolationKind::Degree1);
    }

    #[test]
    fn s1_eval_examples() {
        let f = s1();
        assert_eq!(f.eval(&Point::Line(int(0))), Point::Line(rat(1, 3)));
        assert_eq!(f.eval(&bp(0, rat(1, 3), 0)), bp(0, rat(1, 3), 1));
        let p = bp(0, rat(2, 5), 0);
        assert_eq!(f.eval(&p.translate(5)), f.eval(&p).translate(5));
    }

    #[test]
    fn s1_image_examples() {
        let f = s1();
        let br = |lo, hi| TSegment::new(Chart::Branch { branch: 0, copy: 0 }, lo, hi);
        let deg = f.image_segment(&br(rat(1, 3), rat(1, 3)));
        assert_eq!(deg, vec![TSegment::new(Chart::Branch { branch: 0, copy: 1 }, rat(1, 3), rat(1, 3))]);
        let img = f.image_segment(&br(rat(1, 4), rat(1, 2)));
        assert_eq!(img, vec![TSegment::new(Chart::Branch { branch: 0, copy: 1 }, int(0), int(1))]);
        let whole = f.image_segment(&br(int(0), int(1)));
        assert_eq!(
            whole,
            vec![
                TSegment::new(Chart::Line, rat(1, 3), int(1)),
                TSegment::new(Chart::Branch { branch: 0, copy: 1 }, int(0), int(1)),
                TSegment::new(Chart::Branch { branch: 0, copy: 1 }, int(0), int(1)),
                TSegment::new(Chart::Line, int(1), rat(4, 3)),
            ]
        );
    }

    #[test]
    fn s1_preimage_examples() {
        let f = s1();
        let seg = TSegment::new(Chart::Branch { branch: 0, copy: 0 }, rat(1, 4), rat(1, 2));
        let pre = f.preimage_in_segment(&seg, &bp(0, rat(1, 3), 1));
        assert_eq!(pre.coords, vec![rat(1, 3)]);
        assert!(!pre.degenerate);
        assert!(f.preimage_in_segment(&seg, &Point::Line(int(5))).coords.is_empty());
    }

    #[test]
    fn plateau_preimage_is_flagged() {
        let doc = r#"{"branches": [{"attach": "0", "length": "1"}],
            "line": [["0", {"R": "0"}], ["1", {"R": "1"}]],
            "branch_maps": [[["0", {"R": "0"}], ["1/2", {"B": [0, "1/2", 0]}], ["1", {"B": [0, "1/2", 0]}]]]}"#;
        let f = PLMap::new(&parse_map(doc).unwrap()).unwrap();
        let seg = TSegment::new(Chart::Branch { branch: 0, copy: 0 }, int(0), int(1));
        let pre = f.preimage_in_segment(&seg, &f.shape().branch_point(0, rat(1, 2), 0));
        assert!(pre.degenerate);
        assert_eq!(pre.coords, vec![rat(1, 2), int(1)]);
    }

    fn arb_rat01() -> impl Strategy<Value = Rational> {
        (0i64..=1000, 1i64..=1000).prop_map(|(n, d)| rat(n % (d + 1), d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn eval_is_degree_one(x in arb_rat01(), on_branch in any::<bool>(), m in -3i64..=3) {
            let f = s1();
            let p = if on_branch { bp(0, x, 0) } else { Point::Line(x) };
            prop_assert_eq!(f.eval(&p.translate(m)), f.eval(&p).translate(m));
        }

        #[test]
        fn image_contains_eval(a in arb_rat01(), b in arb_rat01(), c in arb_rat01()) {
            let f = s1();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let u = &lo + (&hi - &lo) * c;
            let seg = TSegment::new(Chart::Branch { branch: 0, copy: 0 }, lo, hi);
            let y = f.eval(&bp(0, u, 0));
            prop_assert!(f.image_segment(&seg).iter().any(|s| s.contains(f.shape(), &y)));
        }

        #[test]
        fn preimage_then_eval_hits_target(a in arb_rat01(), b in arb_rat01()) {
            let f = s1();
            let target = f.eval(&bp(0, a, 0));
            let seg = TSegment::new(Chart::Branch { branch: 0, copy: 0 }, int(0), int(1));
            let pre = f.preimage_in_segment(&seg, &target);
            prop_assert!(!pre.coords.is_empty());
            for u in pre.coords {
                prop_assert_eq!(f.eval(&bp(0, u, 0)), target.clone());
            }
            let _ = b;
        }
    }

    #[test]
    fn pieces_are_continuous() {
        let f = s1();
        for dom in [Domain::Line, Domain::Branch(0)] {
            for w in f.pieces(dom).windows(2) {
                let a = f.shape().point_at(w[0].chart, w[0].v_hi.clone());
                let b = f.shape().point_at(w[1].chart, w[1].v_lo.clone());
                assert_eq!(a, b);
            }
        }
    }
}
