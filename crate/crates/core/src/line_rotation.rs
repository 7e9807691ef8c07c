//! Rotation interval of the line part.
//!
//! When `F(R) ⊆ R`, the lift `f = F|R` is squeezed between its monotone
//! envelopes `F_l(x) = inf_{y≥x} f(y)` and `F_u(x) = sup_{y≤x} f(y)`. Both are
//! nondecreasing degree-1 PL maps, and the rotation interval of `f` is
//! `[ρ(F_l), ρ(F_u)]`. Each rotation number is first sought exactly through an
//! eventually periodic orbit of 0, then enclosed from outward-rounded
//! iterates using `floor(G^n(0))/n ≤ ρ(G) ≤ ceil(G^n(0))/n`.

use std::collections::HashMap;

use num::{BigInt, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::Affine;
use crate::pl_map::PLMap;
use crate::rational::{round_down_dyadic, round_up_dyadic, Rational};
use crate::space::{Chart, Point, TSegment};

/// Iterations spent looking for an exactly periodic orbit.
pub const EXACT_STEPS: usize = 20_000;
/// Denominator size (bits) beyond which exact iteration is abandoned.
pub const EXACT_BITS: u64 = 512;
/// Iteration cap for the outward-rounded enclosure.
pub const MAX_ENCLOSURE_STEPS: usize = 100_000;
const ROUND_BITS: u32 = 64;

/// A nondecreasing degree-1 PL map given by its pieces on `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneLift {
    pub pieces: Vec<Affine>,
}

impl MonotoneLift {
    pub fn eval(&self, x: &Rational) -> Rational {
        eval_periodic(&self.pieces, x)
    }
}

fn eval_periodic(pieces: &[Affine], x: &Rational) -> Rational {
    let k = x.floor();
    let u = x - &k;
    let p = pieces.iter().find(|p| p.lo <= u && u <= p.hi).expect("pieces cover [0, 1]");
    p.value(&u) + k
}

/// `F|R` as affine pieces on `[0, 1]` with values on the line, or `None`
/// when some point of the line leaves it.
pub fn line_lift(map: &PLMap) -> Option<Vec<Affine>> {
    if !map.line_invariant() {
        return None;
    }
    let shape = map.shape();
    let seg = TSegment::new(Chart::Line, Rational::zero(), Rational::one());
    let mut out = Vec::new();
    for mp in map.mapped_pieces(&seg) {
        let at = |c: &Rational| shape.point_at(mp.chart, c.clone()).retract_line(shape);
        let (va, vb) = (at(&mp.img_lo), at(&mp.img_hi));
        let len = &mp.dom_hi - &mp.dom_lo;
        let slope = if len.is_zero() { Rational::zero() } else { (&vb - &va) / &len };
        out.push(Affine { offset: &va - &slope * &mp.dom_lo, slope, lo: mp.dom_lo, hi: mp.dom_hi });
    }
    Some(out)
}

fn shifted(pieces: &[Affine], from: i64, to: i64) -> Vec<Affine> {
    let mut out = Vec::new();
    for k in from..to {
        let kk = Rational::from_integer(k.into());
        for p in pieces {
            // value(u - k) + k on [lo + k, hi + k]
            out.push(Affine {
                lo: &p.lo + &kk,
                hi: &p.hi + &kk,
                offset: &p.offset - &p.slope * &kk + &kk,
                slope: p.slope.clone(),
            });
        }
    }
    out
}

/// Number of periods a window must span for the envelopes to be attained.
fn window(pieces: &[Affine]) -> i64 {
    let mut mn: Option<Rational> = None;
    let mut mx: Option<Rational> = None;
    for p in pieces {
        for u in [&p.lo, &p.hi] {
            let d = p.value(u) - u;
            if mn.as_ref().is_none_or(|m| &d < m) {
                mn = Some(d.clone());
            }
            if mx.as_ref().is_none_or(|m| &d > m) {
                mx = Some(d);
            }
        }
    }
    let spread = mx.unwrap_or_default() - mn.unwrap_or_default();
    spread.ceil().to_integer().try_into().unwrap_or(i64::MAX / 4) + 1
}

fn clip_unit(pieces: Vec<Affine>) -> Vec<Affine> {
    let (zero, one) = (Rational::zero(), Rational::one());
    pieces
        .into_iter()
        .filter_map(|p| {
            let lo = if p.lo > zero { p.lo.clone() } else { zero.clone() };
            let hi = if p.hi < one { p.hi.clone() } else { one.clone() };
            (lo < hi).then_some(Affine { lo, hi, ..p })
        })
        .collect()
}

/// `x ↦ inf_{y ≥ x} f(y)`.
pub fn lower_envelope(f: &[Affine]) -> MonotoneLift {
    let m = window(f);
    let ext = shifted(f, 0, m + 1);
    let mut run: Option<Rational> = None;
    let mut rev: Vec<Affine> = Vec::new();
    let constant = |lo: &Rational, hi: &Rational, v: &Rational| Affine {
        lo: lo.clone(),
        hi: hi.clone(),
        slope: Rational::zero(),
        offset: v.clone(),
    };
    for p in ext.iter().rev() {
        let (fa, fb) = (p.value(&p.lo), p.value(&p.hi));
        if !p.slope.is_positive() {
            let v = match &run {
                Some(r) if r < &fb => r.clone(),
                _ => fb,
            };
            rev.push(constant(&p.lo, &p.hi, &v));
            run = Some(v);
            continue;
        }
        match run.clone() {
            Some(r) if r <= fa => rev.push(constant(&p.lo, &p.hi, &r)),
            Some(r) if r < fb => {
                let x = (&r - &p.offset) / &p.slope;
                rev.push(constant(&x, &p.hi, &r));
                rev.push(Affine { hi: x, ..p.clone() });
                run = Some(fa);
            }
            _ => {
                rev.push(p.clone());
                run = Some(fa);
            }
        }
    }
    rev.reverse();
    MonotoneLift { pieces: clip_unit(rev) }
}

/// `x ↦ sup_{y ≤ x} f(y)`.
pub fn upper_envelope(f: &[Affine]) -> MonotoneLift {
    let m = window(f);
    let ext = shifted(f, -m, 1);
    let mut run: Option<Rational> = None;
    let mut out: Vec<Affine> = Vec::new();
    let constant = |lo: &Rational, hi: &Rational, v: &Rational| Affine {
        lo: lo.clone(),
        hi: hi.clone(),
        slope: Rational::zero(),
        offset: v.clone(),
    };
    for p in &ext {
        let (fa, fb) = (p.value(&p.lo), p.value(&p.hi));
        if !p.slope.is_positive() {
            let v = match &run {
                Some(r) if r > &fa => r.clone(),
                _ => fa,
            };
            out.push(constant(&p.lo, &p.hi, &v));
            run = Some(v);
            continue;
        }
        match run.clone() {
            Some(r) if r >= fb => out.push(constant(&p.lo, &p.hi, &r)),
            Some(r) if r > fa => {
                let x = (&r - &p.offset) / &p.slope;
                out.push(constant(&p.lo, &x, &r));
                out.push(Affine { lo: x, ..p.clone() });
                run = Some(fb);
            }
            _ => {
                out.push(p.clone());
                run = Some(fb);
            }
        }
    }
    MonotoneLift { pieces: clip_unit(out) }
}

/// A closed interval known to contain a rotation number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
    /// Iterations used.
    pub steps: usize,
}

impl Enclosure {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

fn ratio(a: Rational, n: usize) -> Rational {
    a / Rational::from_integer(BigInt::from(n))
}

/// Rotation number of a nondecreasing degree-1 map.
pub fn monotone_rotation(g: &MonotoneLift, tol: &Rational) -> Enclosure {
    // Exact: an eventually periodic orbit of 0.
    let mut seen: HashMap<Rational, (usize, Rational)> = HashMap::new();
    let mut y = Rational::zero();
    seen.insert(Rational::zero(), (0, y.clone()));
    for n in 1..=EXACT_STEPS {
        y = g.eval(&y);
        if let Some((m, ym)) = seen.get(&frac(&y)) {
            let rho = ratio(&y - ym, n - m);
            return Enclosure { lo: rho.clone(), hi: rho, steps: n };
        }
        if y.denom().bits() > EXACT_BITS {
            break;
        }
        seen.insert(frac(&y), (n, y.clone()));
    }
    // Outward-rounded iterates bracket G^n(0) by monotonicity.
    let (mut lo_y, mut hi_y) = (Rational::zero(), Rational::zero());
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    let mut steps = 0;
    for n in 1..=MAX_ENCLOSURE_STEPS {
        lo_y = round_down_dyadic(&g.eval(&lo_y), ROUND_BITS);
        hi_y = round_up_dyadic(&g.eval(&hi_y), ROUND_BITS);
        let l = ratio(lo_y.floor(), n);
        let h = ratio(hi_y.ceil(), n);
        if lo.as_ref().is_none_or(|x| &l > x) {
            lo = Some(l);
        }
        if hi.as_ref().is_none_or(|x| &h < x) {
            hi = Some(h);
        }
        steps = n;
        if &(hi.as_ref().unwrap() - lo.as_ref().unwrap()) <= tol {
            break;
        }
    }
    Enclosure { lo: lo.unwrap(), hi: hi.unwrap(), steps }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LineRigor {
    /// Sampled orbit averages; no guarantee.
    Estimate,
    /// Outer bounds are proven; equal bounds are exact.
    RigorousEnclosure,
}

impl LineRigor {
    pub fn as_str(self) -> &'static str {
        match self {
            LineRigor::RigorousEnclosure => "rigorous-enclosure",
            LineRigor::Estimate => "estimate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineRotation {
    /// Enclosure of the left end.
    pub lo: Enclosure,
    /// Enclosure of the right end.
    pub hi: Enclosure,
    pub rigor: LineRigor,
}

impl LineRotation {
    /// Outer bounds of the interval.
    pub fn outer(&self) -> (Rational, Rational) {
        (self.lo.lo.clone(), self.hi.hi.clone())
    }
}

/// Samples for the estimate used when the line is not invariant.
const SAMPLE_POINTS: usize = 24;
const SAMPLE_STEPS: usize = 2_000;
const SAMPLE_BITS: u32 = 40;

pub fn rot_r_interval(map: &PLMap, tol: &Rational, seed: u64) -> LineRotation {
    let Some(f) = line_lift(map) else { return estimate(map, seed) };
    let lo = monotone_rotation(&lower_envelope(&f), tol);
    let hi = monotone_rotation(&upper_envelope(&f), tol);
    LineRotation { lo, hi, rigor: LineRigor::RigorousEnclosure }
}

fn round_point(map: &PLMap, pt: Point) -> Point {
    match pt {
        Point::Line(x) => Point::Line(round_down_dyadic(&x, SAMPLE_BITS)),
        Point::Branch { branch, t, copy } => map.shape().branch_point(branch, round_down_dyadic(&t, SAMPLE_BITS), copy),
    }
}

fn estimate(map: &PLMap, seed: u64) -> LineRotation {
    let shape = map.shape();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    for i in 0..SAMPLE_POINTS {
        let jitter: u32 = rng.gen_range(0..1024);
        let x0 =
            Rational::new(BigInt::from(i as u64 * 1024 + jitter as u64), BigInt::from(SAMPLE_POINTS as u64 * 1024));
        let start = Point::Line(x0.clone());
        let mut pt = start.clone();
        for _ in 0..SAMPLE_STEPS {
            pt = round_point(map, map.eval(&pt));
        }
        let avg = ratio(pt.retract_line(shape) - &x0, SAMPLE_STEPS);
        if lo.as_ref().is_none_or(|l| &avg < l) {
            lo = Some(avg.clone());
        }
        if hi.as_ref().is_none_or(|h| &avg > h) {
            hi = Some(avg);
        }
    }
    let e = |r: Rational| Enclosure { lo: r.clone(), hi: r, steps: SAMPLE_STEPS };
    LineRotation { lo: e(lo.unwrap()), hi: e(hi.unwrap()), rigor: LineRigor::Estimate }
}
