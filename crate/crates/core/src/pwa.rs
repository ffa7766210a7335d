//! Piecewise-affine maps on the tower and the renormalization operator.

use serde::{Deserialize, Serialize};

use crate::affine::Affine;
use crate::error::{Error, Result};
use crate::quadratic::QuadraticUnimodal;
use crate::scaling::Period;
use crate::tower::{build_tower, ScalingSequence, Tower};

/// `max` that propagates NaN.
pub(crate) fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Snapping tolerance for branch-following at shared endpoints.
pub const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineBranch {
    pub index: usize,
    pub generation: usize,
    pub lo: f64,
    pub hi: f64,
    pub v_lo: f64,
    pub v_hi: f64,
}

impl AffineBranch {
    pub fn map(&self) -> Affine {
        Affine::through(self.lo, self.v_lo, self.hi, self.v_hi)
    }

    pub fn slope(&self) -> f64 {
        (self.v_hi - self.v_lo) / (self.hi - self.lo)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == self.lo {
            return self.v_lo;
        }
        if x == self.hi {
            return self.v_hi;
        }
        let t = (x - self.lo) / (self.hi - self.lo);
        self.v_lo + t * (self.v_hi - self.v_lo)
    }

    fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseAffineMap {
    pub period: Period,
    pub depth: usize,
    pub c: f64,
    pub sequence: ScalingSequence,
    pub tower: Tower,
    /// Sorted by `lo`.
    pub branches: Vec<AffineBranch>,
}

pub fn build_pwa(seq: &ScalingSequence, depth: usize) -> Result<PiecewiseAffineMap> {
    let tower = build_tower(seq, depth)?;
    let u = QuadraticUnimodal::with_raw(tower.c);
    let period = seq.period;
    let mut branches = Vec::new();
    for n in 1..=depth {
        let f = &tower.factors[n - 1];
        let prev = tower.h[n - 1];
        let y_prev = tower.y(n - 1);
        let hat = Affine::unit_to(u.apply(y_prev), 1.0);
        for i in (1..=period.p()).filter(|&i| i != 2) {
            let (a, b) = f.interval(i);
            let (xa, xb) = (prev.apply(a), prev.apply(b));
            let (mut va, vb) = (u.apply(xa), u.apply(xb));
            if period == Period::Three && i == 3 && f.eps != 1.0 {
                va = hat.apply(f.eps * hat.inverse().apply(va));
            }
            let br = if xa <= xb {
                AffineBranch { index: i, generation: n, lo: xa, hi: xb, v_lo: va, v_hi: vb }
            } else {
                AffineBranch { index: i, generation: n, lo: xb, hi: xa, v_lo: vb, v_hi: va }
            };
            branches.push(br);
        }
    }
    branches.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    Ok(PiecewiseAffineMap { period, depth, c: tower.c, sequence: seq.clone(), tower, branches })
}

impl PiecewiseAffineMap {
    /// Branch whose closed interval contains `x`, allowing `tol` of slack.
    pub fn locate(&self, x: f64, tol: f64) -> Option<&AffineBranch> {
        let k = self.branches.partition_point(|b| b.lo <= x + tol);
        // candidates are the branch starting at or before x and the next one
        let lo = k.saturating_sub(1);
        let hi = (k + 1).min(self.branches.len());
        self.branches[lo..hi]
            .iter()
            .filter(|b| b.contains(x, tol))
            .min_by(|a, b| {
                let da = (x - a.lo).max(a.lo - x).min((x - a.hi).abs());
                let db = (x - b.lo).max(b.lo - x).min((x - b.hi).abs());
                let ina = x >= a.lo && x <= a.hi;
                let inb = x >= b.lo && x <= b.hi;
                inb.cmp(&ina).then(da.partial_cmp(&db).unwrap())
            })
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.locate(x, 0.0).map(|b| b.eval(x)).ok_or(Error::OutsideDomain(x))
    }

    /// One application of the map with endpoint snapping.
    pub fn step(&self, x: f64) -> Result<f64> {
        let b = self.locate(x, SNAP_TOL).ok_or(Error::OutsideDomain(x))?;
        let scale = (b.hi - b.lo).max(1e-300);
        let tol = SNAP_TOL.min(1e-3 * scale);
        if (x - b.lo).abs() <= tol {
            Ok(b.v_lo)
        } else if (x - b.hi).abs() <= tol {
            Ok(b.v_hi)
        } else {
            Ok(b.eval(x))
        }
    }

    pub fn iterate(&self, x: f64, k: usize) -> Result<f64> {
        (0..k).try_fold(x, |y, _| self.step(y))
    }

    pub fn branch(&self, index: usize, generation: usize) -> Option<&AffineBranch> {
        self.branches.iter().find(|b| b.index == index && b.generation == generation)
    }

    /// Slopes of the branches over `I_index^n` for `n = 1..depth`.
    pub fn branch_slopes(&self, index: usize) -> Vec<f64> {
        (1..=self.depth)
            .filter_map(|n| self.branch(index, n).map(|b| b.slope()))
            .collect()
    }

    /// `(f(y_n) - 1) / (y_n - c)^2` for every `n` with `y_n` resolved.
    pub fn tip_sequence(&self) -> Vec<f64> {
        (1..self.depth)
            .filter_map(|n| {
                let y = self.tower.y(n);
                self.eval(y).ok().map(|v| (v - 1.0) / ((y - self.c) * (y - self.c)))
            })
            .collect()
    }
}

/// `h_1^{-1} ∘ f^p ∘ h_1`, composed branch by branch.
pub fn renormalize(f: &PiecewiseAffineMap) -> Result<PiecewiseAffineMap> {
    if f.depth < 2 {
        return Err(Error::DepthExhausted(f.depth));
    }
    let h1 = f.tower.h[1];
    let h1_inv = h1.inverse();
    let chain: Vec<Affine> = f.period.cycle()[1..]
        .iter()
        .map(|&i| f.branch(i, 1).expect("generation one branch").map())
        .collect();
    let follow = |v: f64| h1_inv.apply(chain.iter().fold(v, |x, a| a.apply(x)));
    let mut branches: Vec<AffineBranch> = f
        .branches
        .iter()
        .filter(|b| b.generation >= 2)
        .map(|b| {
            let (xa, xb) = (h1_inv.apply(b.lo), h1_inv.apply(b.hi));
            let (va, vb) = (follow(b.v_lo), follow(b.v_hi));
            let g = b.generation - 1;
            if xa <= xb {
                AffineBranch { index: b.index, generation: g, lo: xa, hi: xb, v_lo: va, v_hi: vb }
            } else {
                AffineBranch { index: b.index, generation: g, lo: xb, hi: xa, v_lo: vb, v_hi: va }
            }
        })
        .collect();
    branches.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    let sequence = f.sequence.shift();
    let tower = build_tower(&sequence, f.depth - 1)?;
    Ok(PiecewiseAffineMap {
        period: f.period,
        depth: f.depth - 1,
        c: h1_inv.apply(f.c),
        sequence,
        tower,
        branches,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenormResidual {
    pub sup_norm: f64,
    pub evaluation_points: usize,
    pub depth_used: usize,
}

/// Endpoint-wise comparison of two maps over matching branch labels.
pub fn compare_maps(a: &PiecewiseAffineMap, b: &PiecewiseAffineMap) -> Result<RenormResidual> {
    let mut sup: f64 = 0.0;
    let mut count = 0;
    for br in &a.branches {
        let other = b.branch(br.index, br.generation).ok_or(Error::BranchUndefined {
            level: br.generation,
            depth: b.depth,
        })?;
        for d in [br.lo - other.lo, br.hi - other.hi, br.v_lo - other.v_lo, br.v_hi - other.v_hi] {
            sup = worst(sup, d.abs());
        }
        count += 2;
    }
    Ok(RenormResidual { sup_norm: sup, evaluation_points: count, depth_used: a.depth })
}

/// `|R f - f|` over branch endpoints of depth at most `depth - 1`.
pub fn fixed_residual(seq: &ScalingSequence, depth: usize) -> Result<RenormResidual> {
    let f = build_pwa(seq, depth)?;
    let rf = renormalize(&f)?;
    compare_maps(&rf, &f)
}

/// `|R f_s - f_{σ s}|` over branch endpoints.
pub fn shift_residual(seq: &ScalingSequence, depth: usize) -> Result<RenormResidual> {
    let f = build_pwa(seq, depth)?;
    let rf = renormalize(&f)?;
    let g = build_pwa(&seq.shift(), depth - 1)?;
    compare_maps(&rf, &g)
}

pub fn verify_combinatorics(f: &PiecewiseAffineMap, n: usize) -> bool {
    verify_combinatorics_report(f, n).map(|r| r.ok).unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinatoricsReport {
    pub n: usize,
    pub steps: Vec<(usize, usize, f64)>,
    pub max_error: f64,
    pub ok: bool,
}

/// Follows endpoints of generation `n` through `f^{p^{n-1}}` along the cycle.
pub fn verify_combinatorics_report(f: &PiecewiseAffineMap, n: usize) -> Result<CombinatoricsReport> {
    if n == 0 || n + 1 > f.depth {
        return Err(Error::BranchUndefined { level: n, depth: f.depth });
    }
    let p = f.period.p();
    let power = p.pow((n - 1) as u32);
    let big = |x: f64| f.iterate(x, power);
    let t = &f.tower;
    let tol = 1e-10;
    let mut steps = Vec::new();
    let mut max_error: f64 = 0.0;
    let mut ok = true;
    for &i in f.period.cycle() {
        let j = f.period.successor(i);
        let (lo, hi) = t.interval(i, n);
        let (tlo, thi) = t.interval(j, n);
        let err = if i == 2 {
            let fy = big(t.y(n))?;
            let fz = big(t.z(n))?;
            let inner = inner_endpoint(t, j, n);
            let inside = |v: f64| {
                if v < tlo - tol {
                    tlo - v
                } else if v > thi + tol {
                    v - thi
                } else {
                    0.0
                }
            };
            inside(fy).max(inside(fz)).max((fy - inner).abs())
        } else {
            let (a, b) = (big(lo)?, big(hi)?);
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (a - tlo).abs().max((b - thi).abs())
        };
        max_error = worst(max_error, err);
        if !(err <= tol) {
            ok = false;
        }
        steps.push((i, j, err));
    }
    Ok(CombinatoricsReport { n, steps, max_error, ok })
}

/// The endpoint of `I_j^n` not shared with `I_2^{n-1}`.
fn inner_endpoint(t: &Tower, j: usize, n: usize) -> f64 {
    let f = &t.factors[n - 1];
    t.h[n - 1].apply(f.interval(j).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartialBranch {
    Plus,
    Minus,
    PlusPlus,
    MinusMinus,
}

impl PartialBranch {
    /// Interval index and number of applications of `f`.
    pub fn spec(self, period: Period) -> Result<(usize, usize)> {
        match (period, self) {
            (Period::Three, PartialBranch::Plus) => Ok((3, 1)),
            (Period::Three, PartialBranch::Minus) => Ok((1, 2)),
            (Period::Five, PartialBranch::Plus) => Ok((5, 1)),
            (Period::Five, PartialBranch::PlusPlus) => Ok((1, 2)),
            (Period::Five, PartialBranch::MinusMinus) => Ok((3, 3)),
            (Period::Five, PartialBranch::Minus) => Ok((4, 4)),
            _ => Err(Error::InvalidArgument(format!("{self:?} is not a period-three branch"))),
        }
    }

    pub fn all(period: Period) -> &'static [PartialBranch] {
        match period {
            Period::Three => &[PartialBranch::Plus, PartialBranch::Minus],
            Period::Five => &[
                PartialBranch::Plus,
                PartialBranch::PlusPlus,
                PartialBranch::MinusMinus,
                PartialBranch::Minus,
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialSamples {
    pub n: usize,
    pub branch: PartialBranch,
    /// `(t, R_n f(t), f_{σ^n s}(t))`.
    pub samples: Vec<(f64, f64, f64)>,
    pub max_error: f64,
}

/// `H_j^{-1} ∘ f^j ∘ h_n` on the first-generation piece of the given index,
/// where `H_j` sends `0 -> f^j(y_n)` and `1 -> f^{j-1}(1)`.
pub fn partial_renormalize(f: &PiecewiseAffineMap, n: usize, branch: PartialBranch) -> Result<PartialSamples> {
    if n == 0 || n + 1 > f.depth {
        return Err(Error::BranchUndefined { level: n, depth: f.depth });
    }
    let (index, j) = branch.spec(f.period)?;
    let hn = f.tower.h[n];
    let y = f.tower.y(n);
    let norm = Affine::unit_to(f.iterate(y, j)?, f.iterate(1.0, j - 1)?);
    let norm_inv = norm.inverse();
    let reference = build_pwa(&f.sequence.shift_by(n), 1)?;
    let piece = *reference
        .branch(index, 1)
        .ok_or(Error::BranchUndefined { level: n, depth: f.depth })?;
    let mut samples = Vec::new();
    let mut max_error: f64 = 0.0;
    for k in 1..=5 {
        let t = piece.lo + (piece.hi - piece.lo) * k as f64 / 6.0;
        let v = norm_inv.apply(f.iterate(hn.apply(t), j)?);
        let r = piece.eval(t);
        max_error = worst(max_error, (v - r).abs());
        samples.push((t, v, r));
    }
    Ok(PartialSamples { n, branch, samples, max_error })
}
