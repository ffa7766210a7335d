//! C^{1+Lip} extension of a stationary piecewise-affine fixed point.
//!
//! The seeds are the graph over `[0, y_1]` (`K2`) and over `[z_1, 1]` (`K1`):
//! generation-one affine branches joined by monotone gap fillers. The graph
//! transform `F(x, y) = (F1(x), F2(y))` with
//! `F1(x) = u(0) + s_2 (1 - x)` and `F2(y) = 1 - v (1 - y)` carries the seeds
//! into the shells `I_2^m \ I_2^{m+1}`. Everything is stored as offsets
//! `x - c` and deficits `1 - y` so deep levels keep full relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filler::{FillerFamily, GapFiller};
use crate::pwa::{AffineBranch, PiecewiseAffineMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphTransform {
    /// Fixed point of the horizontal part.
    pub c: f64,
    /// Horizontal contraction `s_2`.
    pub horizontal: f64,
    /// Vertical contraction, `s_3` or `s_5`.
    pub vertical: f64,
}

impl GraphTransform {
    pub fn from_pwa(f: &PiecewiseAffineMap) -> Self {
        let factor = f.sequence.factor(1);
        let (lo2, _) = factor.interval(2);
        let s2 = factor.s_i(2);
        GraphTransform { c: (lo2 + s2) / (1.0 + s2), horizontal: s2, vertical: factor.s_i(factor.k()) }
    }

    /// Same horizontal part, vertical contraction replaced.
    pub fn with_vertical(self, vertical: f64) -> Self {
        GraphTransform { vertical, ..self }
    }

    pub fn horizontal_map(&self, x: f64) -> f64 {
        self.c - self.horizontal * (x - self.c)
    }

    pub fn vertical_map(&self, y: f64) -> f64 {
        1.0 - self.vertical * (1.0 - y)
    }

    /// `v / s_2^2`, the factor by which Lipschitz constants of the
    /// derivative change per level.
    pub fn lipschitz_factor(&self) -> f64 {
        self.vertical / (self.horizontal * self.horizontal)
    }

    fn offset_scale(&self, m: usize) -> f64 {
        (-self.horizontal).powi(m as i32)
    }

    fn slope_scale(&self, m: usize) -> f64 {
        (-self.vertical / self.horizontal).powi(m as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Segment {
    Affine(AffineBranch),
    Filler(GapFiller),
}

impl Segment {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            Segment::Affine(b) => (b.lo, b.hi),
            Segment::Filler(g) => (g.x0, g.x1),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Segment::Affine(b) => b.eval(x),
            Segment::Filler(g) => g.value(x),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Segment::Affine(b) => b.slope(),
            Segment::Filler(g) => g.derivative(x),
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            Segment::Affine(_) => 0.0,
            Segment::Filler(g) => g.second_derivative(x),
        }
    }

    /// Largest `|f''|` on the segment.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Segment::Affine(_) => 0.0,
            Segment::Filler(g) => g.lipschitz_estimate(),
        }
    }
}

/// Consecutive segments sharing endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedCurve {
    pub segments: Vec<Segment>,
}

impl SeedCurve {
    pub fn lo(&self) -> f64 {
        self.segments[0].bounds().0
    }

    pub fn hi(&self) -> f64 {
        self.segments[self.segments.len() - 1].bounds().1
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    fn segment_at(&self, x: f64) -> &Segment {
        self.segments
            .iter()
            .find(|s| x <= s.bounds().1)
            .unwrap_or(&self.segments[self.segments.len() - 1])
    }

    pub fn value(&self, x: f64) -> f64 {
        self.segment_at(x).value(x)
    }

    /// Worst one-sided derivative mismatch at interior junctions.
    pub fn junction_mismatch(&self) -> f64 {
        self.segments
            .windows(2)
            .map(|w| {
                let x = w[0].bounds().1;
                (w[0].derivative(x) - w[1].derivative(x)).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn lipschitz(&self) -> f64 {
        self.segments.iter().map(|s| s.lipschitz()).fold(0.0, f64::max)
    }

    pub fn sample(&self, resolution: usize) -> SampledCurve {
        let t = GraphTransform { c: 0.0, horizontal: 1.0, vertical: 1.0 };
        let mut samples = Vec::new();
        push_level(&mut samples, self, &t, 0, 0, resolution);
        SampledCurve { c: 0.0, transform: t, depth: 1, samples, marks: Vec::new(), window: (0.0, 0.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedPieces {
    /// Graph over `[z_1, 1]`.
    pub k1: SeedCurve,
    /// Graph over `[0, y_1]`.
    pub k2: SeedCurve,
    pub transform: GraphTransform,
}

impl SeedPieces {
    pub fn y1(&self) -> f64 {
        self.k2.hi()
    }

    pub fn z1(&self) -> f64 {
        self.k1.lo()
    }

    pub fn lipschitz(&self) -> f64 {
        self.k1.lipschitz().max(self.k2.lipschitz())
    }

    pub fn junction_mismatch(&self) -> f64 {
        self.k1.junction_mismatch().max(self.k2.junction_mismatch())
    }

    fn seed_at(&self, x0: f64) -> Option<&Segment> {
        if self.k2.contains(x0) {
            Some(self.k2.segment_at(x0))
        } else if self.k1.contains(x0) {
            Some(self.k1.segment_at(x0))
        } else {
            None
        }
    }
}

fn branch_end(b: &AffineBranch, at_hi: bool) -> (f64, f64, f64) {
    if at_hi {
        (b.hi, b.v_hi, b.slope())
    } else {
        (b.lo, b.v_lo, b.slope())
    }
}

/// Interleaves `branches` (sorted, inside `[lo, hi]`) with fillers. `left`
/// and `right` give position, value and slope at the outer ends when those
/// ends are not branch endpoints.
fn assemble(
    branches: &[AffineBranch],
    left: Option<(f64, f64, f64)>,
    right: Option<(f64, f64, f64)>,
    family: FillerFamily,
) -> Result<SeedCurve> {
    let mut segments = Vec::new();
    let mut prev = left;
    for b in branches {
        if let Some((x0, y0, d0)) = prev {
            let (x1, y1, d1) = branch_end(b, false);
            segments.push(Segment::Filler(GapFiller::new(x0, y0, d0, x1, y1, d1, family)?));
        }
        segments.push(Segment::Affine(*b));
        prev = Some(branch_end(b, true));
    }
    if let (Some((x0, y0, d0)), Some((x1, y1, d1))) = (prev, right) {
        segments.push(Segment::Filler(GapFiller::new(x0, y0, d0, x1, y1, d1, family)?));
    }
    Ok(SeedCurve { segments })
}

/// Builds `K1` and `K2` from the generation-one branches of `f`.
pub fn seed_pieces(f: &PiecewiseAffineMap, family: FillerFamily) -> Result<SeedPieces> {
    let t = GraphTransform::from_pwa(f);
    let (y1, z1) = (f.tower.y(1), f.tower.z(1));
    let gen1: Vec<AffineBranch> = f.branches.iter().filter(|b| b.generation == 1).cloned().collect();
    let left: Vec<AffineBranch> = gen1.iter().filter(|b| b.hi <= y1).cloned().collect();
    let right: Vec<AffineBranch> = gen1.iter().filter(|b| b.lo >= z1).cloned().collect();
    if left.is_empty() || right.is_empty() || left.len() + right.len() != gen1.len() {
        return Err(Error::InvalidArgument("generation-one branches straddle I_2".into()));
    }
    let first = &left[0];
    let last = &right[right.len() - 1];
    if first.lo != 0.0 || last.hi != 1.0 {
        return Err(Error::InvalidArgument("outer branches must reach 0 and 1".into()));
    }
    let q = -t.vertical / t.horizontal;
    // the image under F of the graph near x = 1 meets K2 at y_1, the image
    // near x = 0 meets K1 at z_1
    let at_y1 = (y1, t.vertical_map(last.v_hi), q * last.slope());
    let at_z1 = (z1, t.vertical_map(first.v_lo), q * first.slope());
    let k2 = assemble(&left, None, Some(at_y1), family)?;
    let k1 = assemble(&right, Some(at_z1), None, family)?;
    Ok(SeedPieces { k1, k2, transform: t })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub x: f64,
    pub y: f64,
    /// `x - c`.
    pub offset: f64,
    /// `1 - y`.
    pub deficit: f64,
    pub slope: f64,
    /// `1..=depth`, or `depth + 1` inside the tip window.
    pub level: usize,
    /// Segment identifier, unique per level.
    pub piece: usize,
    pub tip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkSide {
    Y,
    Z,
}

/// Junction between level `n` and level `n + 1` at `y_n` or `z_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub n: usize,
    pub side: MarkSide,
    pub offset: f64,
    pub deficit: f64,
    /// Exact slope of the level-`n` piece at the junction.
    pub slope_outer: f64,
    /// Exact slope of the level-`n + 1` piece (or the tip parabola).
    pub slope_inner: f64,
    /// Second-order one-sided difference quotients from evaluated values.
    pub fd_outer: f64,
    pub fd_inner: f64,
    pub curvature_outer: f64,
    pub curvature_inner: f64,
}

impl MarkedPoint {
    pub fn slope_mismatch(&self) -> f64 {
        (self.slope_outer - self.slope_inner).abs()
    }

    pub fn fd_mismatch(&self) -> f64 {
        (self.fd_outer - self.fd_inner).abs()
    }

    pub fn curvature_jump(&self) -> f64 {
        (self.curvature_outer - self.curvature_inner).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledCurve {
    pub c: f64,
    pub transform: GraphTransform,
    pub depth: usize,
    /// Sorted by offset.
    pub samples: Vec<CurveSample>,
    pub marks: Vec<MarkedPoint>,
    /// Unresolved window around `c`, as offsets.
    pub window: (f64, f64),
}

fn push_level(
    out: &mut Vec<CurveSample>,
    seed: &SeedCurve,
    t: &GraphTransform,
    m: usize,
    piece_base: usize,
    resolution: usize,
) {
    let (os, ds, vs) = (t.offset_scale(m), t.slope_scale(m), t.vertical.powi(m as i32));
    for (j, seg) in seed.segments.iter().enumerate() {
        let (lo, hi) = seg.bounds();
        for k in 0..resolution {
            let x0 = if k + 1 == resolution { hi } else { lo + (hi - lo) * k as f64 / (resolution - 1) as f64 };
            let offset = os * (x0 - t.c);
            let deficit = vs * (1.0 - seg.value(x0));
            out.push(CurveSample {
                x: t.c + offset,
                y: 1.0 - deficit,
                offset,
                deficit,
                slope: ds * seg.derivative(x0),
                level: m + 1,
                piece: piece_base + j,
                tip: false,
            });
        }
    }
}

/// Value data at an offset: `(deficit, slope, level)`; level `depth + 1`
/// means the tip parabola.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extension<'a> {
    pub seeds: &'a SeedPieces,
    pub transform: GraphTransform,
    pub depth: usize,
    pub tip_constant: f64,
}

impl<'a> Extension<'a> {
    pub fn new(seeds: &'a SeedPieces, transform: GraphTransform, depth: usize) -> Self {
        let (o, d) = innermost_y(seeds, &transform, depth);
        Extension { seeds, transform, depth, tip_constant: d / (o * o) }
    }

    pub fn eval_offset(&self, offset: f64) -> (f64, f64, usize) {
        let t = &self.transform;
        for m in 0..self.depth {
            let x0 = t.c + offset / t.offset_scale(m);
            if let Some(seg) = self.seeds.seed_at(x0) {
                let d = t.vertical.powi(m as i32) * (1.0 - seg.value(x0));
                return (d, t.slope_scale(m) * seg.derivative(x0), m + 1);
            }
        }
        let l = self.tip_constant;
        (l * offset * offset, -2.0 * l * offset, self.depth + 1)
    }
}

/// Offset and deficit of `y_depth`, the innermost resolved left-side point.
fn innermost_y(seeds: &SeedPieces, t: &GraphTransform, depth: usize) -> (f64, f64) {
    let m = depth - 1;
    let y1 = seeds.y1();
    let o = t.offset_scale(m) * (y1 - t.c);
    let d = t.vertical.powi(m as i32) * (1.0 - seeds.k2.value(y1));
    (o, d)
}

/// Second-order one-sided derivative of `y = 1 - deficit` at `offset`,
/// stepping by `h` (sign gives the direction).
fn one_sided(e: &Extension, offset: f64, h: f64) -> f64 {
    let d0 = e.eval_offset(offset).0;
    let d1 = e.eval_offset(offset + h).0;
    let d2 = e.eval_offset(offset + 2.0 * h).0;
    -(-3.0 * d0 + 4.0 * d1 - d2) / (2.0 * h)
}

fn marks(e: &Extension) -> Vec<MarkedPoint> {
    let s = e.seeds;
    let t = &e.transform;
    let (y1, z1) = (s.y1(), s.z1());
    let k2_last = &s.k2.segments[s.k2.segments.len() - 1];
    let k1_last = &s.k1.segments[s.k1.segments.len() - 1];
    let k1_first = &s.k1.segments[0];
    let k2_first = &s.k2.segments[0];
    let shortest = s
        .k1
        .segments
        .iter()
        .chain(&s.k2.segments)
        .map(|g| g.bounds().1 - g.bounds().0)
        .fold(f64::INFINITY, f64::min);
    let curv = |m: usize| t.vertical.powi(m as i32) / t.horizontal.powi(2 * m as i32);
    let mut out = Vec::new();
    for n in 1..=e.depth {
        let m = n - 1;
        for side in [MarkSide::Y, MarkSide::Z] {
            let (x0, outer, inner_x, inner) = match side {
                MarkSide::Y => (y1, k2_last, 1.0, k1_last),
                MarkSide::Z => (z1, k1_first, 0.0, k2_first),
            };
            let offset = t.offset_scale(m) * (x0 - t.c);
            let deficit = t.vertical.powi(m as i32) * (1.0 - outer.value(x0));
            let slope_outer = t.slope_scale(m) * outer.derivative(x0);
            let curvature_outer = curv(m) * outer.second_derivative(x0);
            let (slope_inner, curvature_inner) = if n < e.depth {
                (t.slope_scale(m + 1) * inner.derivative(inner_x), curv(m + 1) * inner.second_derivative(inner_x))
            } else {
                (-2.0 * e.tip_constant * offset, -2.0 * e.tip_constant)
            };
            // outward is away from c
            let out_dir = offset.signum();
            let h = 1e-4 * shortest * t.horizontal.powi(m as i32 + 1);
            let fd_outer = one_sided(e, offset, out_dir * h);
            let fd_inner = one_sided(e, offset, -out_dir * h);
            out.push(MarkedPoint {
                n,
                side,
                offset,
                deficit,
                slope_outer,
                slope_inner,
                fd_outer,
                fd_inner,
                curvature_outer,
                curvature_inner,
            });
        }
    }
    out
}

/// Graph-transform extension through `depth` levels, closed by the tip
/// parabola. `resolution` points are taken on every seed segment.
pub fn extend(seeds: &SeedPieces, transform: GraphTransform, depth: usize, resolution: usize) -> Result<SampledCurve> {
    if depth == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if resolution < 64 {
        return Err(Error::InvalidArgument(format!("resolution {resolution} below 64")));
    }
    let t = transform;
    let nseg = seeds.k1.segments.len() + seeds.k2.segments.len();
    let mut samples = Vec::with_capacity(depth * nseg * resolution + resolution);
    for m in 0..depth {
        let base = m * nseg;
        push_level(&mut samples, &seeds.k2, &t, m, base, resolution);
        push_level(&mut samples, &seeds.k1, &t, m, base + seeds.k2.segments.len(), resolution);
    }
    let ext = Extension::new(seeds, t, depth);
    let m = depth - 1;
    let wy = t.offset_scale(m) * (seeds.y1() - t.c);
    let wz = t.offset_scale(m) * (seeds.z1() - t.c);
    let window = (wy.min(wz), wy.max(wz));
    let l = ext.tip_constant;
    for k in 1..resolution - 1 {
        let offset = window.0 + (window.1 - window.0) * k as f64 / (resolution - 1) as f64;
        let deficit = l * offset * offset;
        samples.push(CurveSample {
            x: t.c + offset,
            y: 1.0 - deficit,
            offset,
            deficit,
            slope: -2.0 * l * offset,
            level: depth + 1,
            piece: depth * nseg,
            tip: true,
        });
    }
    samples.sort_by(|a, b| a.offset.partial_cmp(&b.offset).unwrap());
    // shared junction points appear once, from the first piece that reached them
    samples.dedup_by(|b, a| (b.offset - a.offset).abs() <= 1e-12 * a.offset.abs().max(1e-300));
    Ok(SampledCurve { c: t.c, transform: t, depth, samples, marks: marks(&ext), window })
}

impl SampledCurve {
    /// Samples grouped per level, excluding the tip.
    fn level_pairs(&self) -> impl Iterator<Item = (&CurveSample, &CurveSample)> {
        self.samples.windows(2).filter_map(|w| {
            (w[0].piece == w[1].piece && !w[0].tip && w[1].offset != w[0].offset).then_some((&w[0], &w[1]))
        })
    }

    pub fn max_slope_per_level(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.depth];
        for s in self.samples.iter().filter(|s| !s.tip) {
            out[s.level - 1] = out[s.level - 1].max(s.slope.abs());
        }
        out
    }

    /// Values increase strictly up to `c` and decrease strictly after it.
    pub fn is_unimodal(&self) -> bool {
        self.samples.windows(2).all(|w| {
            if w[1].offset <= 0.0 {
                w[1].deficit < w[0].deficit
            } else if w[0].offset >= 0.0 {
                w[1].deficit > w[0].deficit
            } else {
                true
            }
        })
    }

    pub fn covers_unit_interval(&self) -> bool {
        let first = &self.samples[0];
        let last = &self.samples[self.samples.len() - 1];
        first.x.abs() < 1e-15 && (last.x - 1.0).abs() < 1e-15
    }

    pub fn window_width(&self) -> f64 {
        self.window.1 - self.window.0
    }

    pub fn max_slope_mismatch(&self) -> f64 {
        self.marks.iter().map(|m| m.slope_mismatch()).fold(0.0, f64::max)
    }

    pub fn max_fd_mismatch(&self) -> f64 {
        self.marks.iter().map(|m| m.fd_mismatch()).fold(0.0, f64::max)
    }

    /// Jumps of the second derivative at `y_n`, one per level.
    pub fn curvature_jumps(&self) -> Vec<f64> {
        self.marks.iter().filter(|m| m.side == MarkSide::Y).map(|m| m.curvature_jump()).collect()
    }
}

/// `lambda_n`: the largest `|delta slope| / |delta x|` over adjacent samples
/// of one piece at level `n`. With `per_level = false` a single overall
/// maximum is returned.
pub fn lipschitz_profile(curve: &SampledCurve, per_level: bool) -> Vec<f64> {
    let mut out = vec![0.0f64; curve.depth];
    for (a, b) in curve.level_pairs() {
        let q = (b.slope - a.slope).abs() / (b.offset - a.offset).abs();
        out[a.level - 1] = out[a.level - 1].max(q);
    }
    if per_level {
        out
    } else {
        vec![out.iter().cloned().fold(0.0, f64::max)]
    }
}

/// Estimates of `(1 - f(y_n)) / (y_n - c)^2` at the marked points.
pub fn tip_estimates(curve: &SampledCurve) -> Vec<f64> {
    curve
        .marks
        .iter()
        .filter(|m| m.side == MarkSide::Y)
        .map(|m| m.deficit / (m.offset * m.offset))
        .collect()
}

/// Tip constant from the last four levels, Richardson-extrapolated with the
/// horizontal ratio.
pub fn quadratic_tip(curve: &SampledCurve, c_star: f64) -> Result<f64> {
    if (c_star - curve.c).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("curve centred at {}, not {c_star}", curve.c)));
    }
    let e = tip_estimates(curve);
    if e.len() < 4 {
        return Err(Error::NonConvergent(e));
    }
    let last = &e[e.len() - 4..];
    let spread = last.windows(2).map(|w| ((w[1] - w[0]) / w[1]).abs()).fold(0.0, f64::max);
    if !(spread <= 1e-3) {
        return Err(Error::NonConvergent(last.to_vec()));
    }
    let q = curve.transform.horizontal;
    let extrapolated: Vec<f64> = last.windows(2).map(|w| (w[1] - q * w[0]) / (1.0 - q)).collect();
    let l = extrapolated[extrapolated.len() - 1];
    if l > 0.0 {
        Ok(l)
    } else {
        Err(Error::NonConvergent(extrapolated))
    }
}

/// Curve sampled from `u_c` itself, with marked points at offsets
/// `(1 - c) (-ratio)^n`. A control for [`quadratic_tip`].
pub fn sample_quadratic(c: f64, ratio: f64, depth: usize) -> SampledCurve {
    let u = crate::quadratic::QuadraticUnimodal::with_raw(c);
    let t = GraphTransform { c, horizontal: ratio, vertical: ratio * ratio };
    let marks = (1..=depth)
        .map(|n| {
            let offset = (1.0 - c) * (-ratio).powi(n as i32);
            let slope = u.derivative(c + offset);
            let curv = -2.0 / ((1.0 - c) * (1.0 - c));
            MarkedPoint {
                n,
                side: MarkSide::Y,
                offset,
                deficit: u.deficit(c + offset),
                slope_outer: slope,
                slope_inner: slope,
                fd_outer: slope,
                fd_inner: slope,
                curvature_outer: curv,
                curvature_inner: curv,
            }
        })
        .collect();
    let samples = (0..=1000)
        .map(|k| {
            let x = k as f64 / 1000.0;
            CurveSample {
                x,
                y: u.apply(x),
                offset: x - c,
                deficit: u.deficit(x),
                slope: u.derivative(x),
                level: 1,
                piece: 0,
                tip: false,
            }
        })
        .collect();
    SampledCurve { c, transform: t, depth, samples, marks, window: (0.0, 0.0) }
}

/// Fillers placed directly on every gap of a finite-depth map except the
/// central one. Works for any scaling sequence, stationary or not. Branch
/// values are stored as plain `y`, so deep generations round to 1 and the
/// fillers lose monotonicity: keep the map depth moderate (6 for period 3,
/// 5 for period 5).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectExtension {
    pub fillers: Vec<GapFiller>,
    /// Largest `|f''|` over all fillers.
    pub lipschitz: f64,
    pub rational_count: usize,
}

pub fn extend_direct(f: &PiecewiseAffineMap, family: FillerFamily) -> Result<DirectExtension> {
    let mut fillers = Vec::new();
    for w in f.branches.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.lo <= a.hi {
            continue;
        }
        // the gap holding c is left for the tip
        if a.hi <= f.c && b.lo >= f.c {
            continue;
        }
        fillers.push(GapFiller::new(a.hi, a.v_hi, a.slope(), b.lo, b.v_lo, b.slope(), family)?);
    }
    let lipschitz = fillers.iter().map(|g| g.lipschitz_estimate()).fold(0.0, f64::max);
    let rational_count = fillers.iter().filter(|g| g.kind == crate::filler::FillerKind::RationalQuadratic).count();
    Ok(DirectExtension { fillers, lipschitz, rational_count })
}
