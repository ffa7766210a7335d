//! Scaling factors, gaps, feasibility and the critical-point return map.

use serde::{Deserialize, Serialize};

use crate::affine::Affine;
use crate::error::{Error, Result};
use crate::quadratic::{CriticalPoint, QuadraticUnimodal};
use crate::roots;

/// Smallest admissible `s_2` before the return map is declared singular.
pub const S2_GUARD: f64 = 1e-14;

const PUNCTURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Period {
    Three,
    Five,
}

impl Period {
    pub fn from_int(p: u32) -> Result<Self> {
        match p {
            3 => Ok(Period::Three),
            5 => Ok(Period::Five),
            _ => Err(Error::InvalidArgument(format!("period must be 3 or 5, got {p}"))),
        }
    }

    /// Cycle length, also the number of intervals per generation.
    pub fn p(self) -> usize {
        match self {
            Period::Three => 3,
            Period::Five => 5,
        }
    }

    pub fn as_int(self) -> u32 {
        self.p() as u32
    }

    /// Whether `s~_i` reverses orientation (1-based).
    pub fn reverses(self, i: usize) -> bool {
        match self {
            Period::Three => i <= 2,
            Period::Five => i <= 3,
        }
    }

    /// Interval indices visited by the renormalization cycle starting at `I_2`.
    pub fn cycle(self) -> &'static [usize] {
        match self {
            Period::Three => &[2, 3, 1],
            Period::Five => &[2, 5, 1, 3, 4],
        }
    }

    /// Index of the interval `f` sends `I_i` to.
    pub fn successor(self, i: usize) -> usize {
        let cyc = self.cycle();
        let pos = cyc.iter().position(|&j| j == i).expect("index in cycle");
        cyc[(pos + 1) % cyc.len()]
    }

    pub fn condition_names(self) -> &'static [&'static str] {
        match self {
            Period::Three => &["S1", "S2", "S3", "G_l", "G_r"],
            Period::Five => &["S1", "S2", "S3", "S4", "S5", "G_l", "G_r1", "G_r2", "G_r3"],
        }
    }
}

/// A point of the open simplex `T_k` together with where its intervals sit
/// inside `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFactor {
    pub period: Period,
    pub s: Vec<f64>,
    /// Left endpoint of each `I_i` in unit coordinates.
    pub anchors: Vec<f64>,
    /// Generating critical point, when the factor comes from one.
    pub c: Option<f64>,
    /// Perturbation applied at the inner node of `I_3` (1 for the plain system).
    pub eps: f64,
    pub valid: bool,
}

impl ScalingFactor {
    /// A factor with no generating map; gaps are spread evenly.
    pub fn raw(period: Period, s: Vec<f64>) -> Result<Self> {
        let k = period.p();
        if s.len() != k {
            return Err(Error::InvalidArgument(format!("expected {k} components")));
        }
        let total: f64 = s.iter().sum();
        let gap = (1.0 - total) / (k as f64 - 1.0);
        let mut anchors = Vec::with_capacity(k);
        let mut x = 0.0;
        for si in &s {
            anchors.push(x);
            x += si + gap;
        }
        Ok(Self::assemble(period, s, anchors, None, 1.0))
    }

    fn assemble(period: Period, s: Vec<f64>, anchors: Vec<f64>, c: Option<f64>, eps: f64) -> Self {
        let mut f = ScalingFactor { period, s, anchors, c, eps, valid: false };
        f.valid = f.check();
        f
    }

    fn check(&self) -> bool {
        let total: f64 = self.s.iter().sum();
        self.s.iter().all(|&v| v > 0.0 && v.is_finite())
            && total < 1.0
            && self.layout_gaps().iter().all(|&g| g > 0.0)
            && self.anchors[0] >= 0.0
            && self.anchors[self.s.len() - 1] + self.s[self.s.len() - 1] <= 1.0 + 1e-15
    }

    pub fn k(&self) -> usize {
        self.s.len()
    }

    pub fn sum(&self) -> f64 {
        self.s.iter().sum()
    }

    pub fn s_i(&self, i: usize) -> f64 {
        self.s[i - 1]
    }

    /// `I_i` in unit coordinates.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        let a = self.anchors[i - 1];
        (a, a + self.s[i - 1])
    }

    /// Distances between consecutive intervals.
    pub fn layout_gaps(&self) -> Vec<f64> {
        (1..self.k())
            .map(|i| self.anchors[i] - (self.anchors[i - 1] + self.s[i - 1]))
            .collect()
    }

    /// The affine map `s~_i` from `[0, 1]` onto `I_i`.
    pub fn tilde(&self, i: usize) -> Affine {
        let (lo, hi) = self.interval(i);
        if self.period.reverses(i) {
            Affine::unit_to(hi, lo)
        } else {
            Affine::unit_to(lo, hi)
        }
    }

    /// Distance to the boundary of the simplex.
    pub fn margin(&self) -> f64 {
        let min_s = self.s.iter().cloned().fold(f64::INFINITY, f64::min);
        let face = (1.0 - self.sum()) / (self.k() as f64).sqrt();
        min_s.min(face)
    }

    /// Fixed point of `s~_2`.
    pub fn central_fixed_point(&self) -> f64 {
        let t = self.tilde(2);
        t.offset / (1.0 - t.scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapVector {
    pub period: Period,
    pub gaps: Vec<f64>,
}

impl GapVector {
    pub fn all_positive(&self) -> bool {
        self.gaps.iter().all(|&g| g > 0.0)
    }
}

fn orbit(c: f64, k: usize) -> Vec<f64> {
    QuadraticUnimodal::with_raw(c).orbit(0.0, k)
}

pub(crate) fn factor_raw(period: Period, c: f64) -> ScalingFactor {
    let u = orbit(c, 8);
    match period {
        Period::Three => {
            let s = vec![u[3], u[4] - u[1], 1.0 - u[2]];
            let anchors = vec![0.0, u[1], u[2]];
            ScalingFactor::assemble(period, s, anchors, Some(c), 1.0)
        }
        Period::Five => {
            let s = vec![u[5], u[8] - u[3], u[6] - u[1], u[2] - u[7], 1.0 - u[4]];
            let anchors = vec![0.0, u[3], u[1], u[7], u[4]];
            ScalingFactor::assemble(period, s, anchors, Some(c), 1.0)
        }
    }
}

pub(crate) fn eps_factor_raw(c: f64, eps: f64) -> ScalingFactor {
    let q = QuadraticUnimodal::with_raw(c);
    let u = q.orbit(0.0, 3);
    let s1 = eps * u[3];
    let s = vec![s1, q.apply(s1) - u[1], 1.0 - u[2]];
    let anchors = vec![0.0, u[1], u[2]];
    ScalingFactor::assemble(Period::Three, s, anchors, Some(c), eps)
}

pub fn scaling_from_critical(period: Period, c: CriticalPoint) -> ScalingFactor {
    factor_raw(period, c.value())
}

/// Printed rational expressions for the tripling factor.
pub fn closed_form_tripling_components(c: f64) -> [f64; 3] {
    let p = c - 8.0 * c.powi(2) + 21.0 * c.powi(3) - 25.0 * c.powi(4) + 17.0 * c.powi(5)
        - 6.0 * c.powi(6)
        + c.powi(7);
    let m = 1.0 - c;
    let s1 = 1.0 - p * p / m.powi(14);
    let inner = (c - 1.0).powi(15) + p * p;
    let s2 = (c * c * m.powi(28) - inner * inner) / m.powi(30);
    let q = -1.0 + 3.0 * c - 2.0 * c * c + c.powi(3);
    let s3 = q * q / m.powi(6);
    [s1, s2, s3]
}

/// Tripling factor from the closed-form expressions; the layout comes from
/// the orbit of 0.
pub fn scaling_closed_form_tripling(c: CriticalPoint) -> ScalingFactor {
    let orbit_based = factor_raw(Period::Three, c.value());
    let s = closed_form_tripling_components(c.value()).to_vec();
    ScalingFactor::assemble(Period::Three, s, orbit_based.anchors, Some(c.value()), 1.0)
}

pub(crate) fn gaps_raw(period: Period, c: f64) -> GapVector {
    let u = orbit(c, 8);
    let gaps = match period {
        Period::Three => vec![u[1] - u[3], u[2] - u[4]],
        Period::Five => vec![u[3] - u[5], u[1] - u[8], u[7] - u[6], u[4] - u[2]],
    };
    GapVector { period, gaps }
}

pub fn gaps(period: Period, c: CriticalPoint) -> GapVector {
    gaps_raw(period, c.value())
}

/// Gaps of the perturbed tripling system: `u(0) - s_1` and `u^2(0) - u(s_1)`.
pub fn gaps_eps(c: CriticalPoint, eps: f64) -> GapVector {
    let f = eps_factor_raw(c.value(), eps);
    GapVector { period: Period::Three, gaps: f.layout_gaps() }
}

/// All feasibility conditions with their values, scaling components first.
pub fn conditions(period: Period, c: f64) -> Vec<(&'static str, f64)> {
    let f = factor_raw(period, c);
    let g = gaps_raw(period, c);
    period
        .condition_names()
        .iter()
        .cloned()
        .zip(f.s.iter().chain(g.gaps.iter()).cloned())
        .collect()
}

fn min_condition(period: Period, c: f64) -> f64 {
    let f = factor_raw(period, c);
    let g = gaps_raw(period, c);
    f.s.iter()
        .chain(g.gaps.iter())
        .cloned()
        .fold(1.0 - f.sum(), f64::min)
}

pub fn feasibility(period: Period, c: CriticalPoint) -> bool {
    min_condition(period, c.value()) > 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleInterval {
    pub lo: f64,
    pub hi: f64,
    /// Conditions vanishing at `lo`.
    pub lo_binding: Vec<String>,
    /// Conditions vanishing at `hi`.
    pub hi_binding: Vec<String>,
}

impl FeasibleInterval {
    pub fn contains(&self, c: f64) -> bool {
        c > self.lo && c < self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleDomain {
    pub period: Period,
    pub intervals: Vec<FeasibleInterval>,
    pub boundary_tol: f64,
}

impl FeasibleDomain {
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().map(|i| (i.lo, i.hi)).collect()
    }

    pub fn contains(&self, c: f64) -> bool {
        self.intervals.iter().any(|i| i.contains(c))
    }

    /// Sorted distinct interval endpoints.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for iv in &self.intervals {
            for x in [iv.lo, iv.hi] {
                if out.last().map_or(true, |&l: &f64| (x - l).abs() > 10.0 * self.boundary_tol) {
                    out.push(x);
                }
            }
        }
        out
    }

    /// Restriction to a single sub-interval.
    pub fn restrict(&self, index: usize) -> Option<FeasibleDomain> {
        self.intervals.get(index).map(|iv| FeasibleDomain {
            period: self.period,
            intervals: vec![iv.clone()],
            boundary_tol: self.boundary_tol,
        })
    }
}

fn vanishing(period: Period, c: f64, tol: f64) -> Vec<String> {
    let conds = conditions(period, c);
    let mut names: Vec<String> = conds
        .iter()
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(n, _)| n.to_string())
        .collect();
    if names.is_empty() {
        let (n, _) = conds
            .iter()
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("conditions");
        names.push(n.to_string());
    }
    names
}

pub fn feasible_domain(period: Period, scan_step: f64, refine_tol: f64) -> Result<FeasibleDomain> {
    if !(scan_step > 0.0 && scan_step <= 0.05) {
        return Err(Error::InvalidArgument(format!("scan_step {scan_step} outside (0, 0.05]")));
    }
    if !(refine_tol > 0.0 && refine_tol <= 1e-6) {
        return Err(Error::InvalidArgument(format!("refine_tol {refine_tol} outside (0, 1e-6]")));
    }
    let n = (0.5 / scan_step).ceil() as usize;
    let grid: Vec<f64> = (1..n).map(|j| j as f64 * scan_step).filter(|&c| c < 0.5).collect();
    let margin: Vec<f64> = grid.iter().map(|&c| min_condition(period, c)).collect();
    let m = |c: f64| min_condition(period, c);

    let mut raw: Vec<(f64, f64)> = Vec::new();
    let mut start: Option<f64> = None;
    for j in 0..grid.len() {
        let feasible = margin[j] > 0.0;
        match (start, feasible) {
            (None, true) => {
                let lo = if j == 0 {
                    grid[0]
                } else {
                    roots::bisect(m, grid[j - 1], grid[j], refine_tol)?
                };
                start = Some(lo);
            }
            (Some(lo), false) => {
                let hi = roots::bisect(m, grid[j - 1], grid[j], refine_tol)?;
                raw.push((lo, hi));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = start {
        raw.push((lo, *grid.last().unwrap()));
    }
    if raw.is_empty() {
        return Err(Error::EmptyDomain);
    }

    // touch-zeros of single conditions do not change sign and are invisible
    // to the margin scan
    let names = period.condition_names();
    let mut punctures: Vec<f64> = Vec::new();
    for (k, _) in names.iter().enumerate() {
        let value = |c: f64| conditions(period, c)[k].1;
        let vals: Vec<f64> = grid.iter().map(|&c| value(c)).collect();
        for j in 1..grid.len().saturating_sub(1) {
            if vals[j] <= vals[j - 1] && vals[j] <= vals[j + 1] {
                let (x, v) = roots::golden_min(value, grid[j - 1], grid[j + 1], refine_tol);
                if v.abs() <= PUNCTURE_TOL
                    && raw.iter().any(|&(lo, hi)| x > lo + refine_tol && x < hi - refine_tol)
                    && !punctures.iter().any(|&p| (p - x).abs() < 1e3 * refine_tol.max(1e-9))
                {
                    punctures.push(x);
                }
            }
        }
    }
    punctures.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut cuts: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in raw {
        let mut a = lo;
        for &p in punctures.iter().filter(|&&p| p > lo && p < hi) {
            cuts.push((a, p));
            a = p;
        }
        cuts.push((a, hi));
    }
    let bind_tol = 1e-9;
    let intervals = cuts
        .into_iter()
        .map(|(lo, hi)| FeasibleInterval {
            lo,
            hi,
            lo_binding: vanishing(period, lo, bind_tol),
            hi_binding: vanishing(period, hi, bind_tol),
        })
        .collect();
    Ok(FeasibleDomain { period, intervals, boundary_tol: refine_tol })
}

pub(crate) fn return_map_raw(period: Period, c: f64) -> Result<f64> {
    let f = factor_raw(period, c);
    let s2 = f.s[1];
    if !(s2 > S2_GUARD) {
        return Err(Error::DegenerateScaling(s2));
    }
    let u = orbit(c, 8);
    let top = match period {
        Period::Three => u[4],
        Period::Five => u[8],
    };
    Ok((top - c) / s2)
}

pub fn return_map(period: Period, c: CriticalPoint) -> Result<f64> {
    return_map_raw(period, c.value())
}

pub fn scaling_eps(c: CriticalPoint, eps: f64) -> ScalingFactor {
    eps_factor_raw(c.value(), eps)
}

pub(crate) fn return_map_eps_raw(c: f64, eps: f64) -> Result<f64> {
    let q = QuadraticUnimodal::with_raw(c);
    let u = q.orbit(0.0, 3);
    let top = q.apply(eps * u[3]);
    let s2 = top - u[1];
    if !(s2 > S2_GUARD) {
        return Err(Error::DegenerateScaling(s2));
    }
    Ok((top - c) / s2)
}

pub fn return_map_eps(c: CriticalPoint, eps: f64) -> Result<f64> {
    return_map_eps_raw(c.value(), eps)
}

pub(crate) fn min_condition_eps(c: f64, eps: f64) -> f64 {
    let f = eps_factor_raw(c, eps);
    f.s.iter()
        .chain(f.layout_gaps().iter())
        .cloned()
        .fold(1.0 - f.sum(), f64::min)
}

/// Feasibility of the perturbed tripling system.
pub fn feasibility_eps(c: f64, eps: f64) -> bool {
    min_condition_eps(c, eps) > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(c: f64) -> CriticalPoint {
        CriticalPoint::new(c).unwrap()
    }

    fn oracle_orbit(c: f64, k: usize) -> f64 {
        let mut x = 0.0f64;
        for _ in 0..k {
            x = 1.0 - ((x - c) / (1.0 - c)).powi(2);
        }
        x
    }

    #[test]
    fn tripling_factor_at_fixed_point() {
        let c = 0.440262;
        let f = scaling_from_critical(Period::Three, cp(c));
        assert!((f.s[0] - oracle_orbit(c, 3)).abs() < 1e-15);
        assert!((f.s[1] - (oracle_orbit(c, 4) - oracle_orbit(c, 1))).abs() < 1e-15);
        assert!((f.s[2] - (1.0 - oracle_orbit(c, 2))).abs() < 1e-15);
        assert!((f.s[0] - 0.0392).abs() < 1e-4);
        assert!((f.s[1] - 0.1053).abs() < 1e-4);
        assert!((f.s[2] - 0.0111).abs() < 1e-4);
        assert!(f.valid);
    }

    #[test]
    fn infeasible_examples() {
        let f = scaling_from_critical(Period::Three, cp(0.2));
        assert!(f.s.iter().any(|&v| v <= 0.0) || !f.valid);
        assert!(!f.valid);
        let g = gaps(Period::Three, cp(0.1));
        assert!(!g.all_positive() || !scaling_from_critical(Period::Three, cp(0.1)).valid);
        assert!(!feasibility(Period::Three, cp(0.3)));
    }

    #[test]
    fn quintupling_factor() {
        let f = scaling_from_critical(Period::Five, cp(0.387226));
        assert!(f.s.iter().all(|&v| v > 0.0));
        assert!(f.sum() < 1.0);
        let g = gaps(Period::Five, cp(0.387226));
        assert!(g.all_positive());
        assert!(feasibility(Period::Five, cp(0.387)));
    }

    #[test]
    fn gaps_at_tripling_fixed_point() {
        let c = 0.440262;
        let g = gaps(Period::Three, cp(c));
        assert!((g.gaps[0] - (oracle_orbit(c, 1) - oracle_orbit(c, 3))).abs() < 1e-15);
        assert!((g.gaps[0] - 0.342).abs() < 1e-3);
        assert!((g.gaps[1] - 0.502).abs() < 1e-3);
        assert!(feasibility(Period::Three, cp(0.44)));
    }

    #[test]
    fn layout_gaps_equal_orbit_gaps() {
        for (period, c) in [(Period::Three, 0.44), (Period::Five, 0.387)] {
            let f = scaling_from_critical(period, cp(c));
            let g = gaps(period, cp(c));
            for (a, b) in f.layout_gaps().iter().zip(&g.gaps) {
                assert!((a - b).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_limit_at_zero() {
        let [_, _, s3] = closed_form_tripling_components(1e-9);
        assert!((s3 - 1.0).abs() < 1e-6 && s3 < 1.0);
    }

    #[test]
    fn closed_form_matches_orbit() {
        for &c in &[0.440262, 0.42] {
            let a = scaling_closed_form_tripling(cp(c));
            let b = scaling_from_critical(Period::Three, cp(c));
            for i in 0..3 {
                assert!((a.s[i] - b.s[i]).abs() <= 1e-10, "c={c} i={i}");
            }
        }
    }

    #[test]
    fn return_map_fixed_points() {
        let r = return_map(Period::Three, cp(0.440262)).unwrap();
        assert!((r - 0.440262).abs() < 1e-4);
        let r5 = return_map(Period::Five, cp(0.387226)).unwrap();
        assert!((r5 - 0.387226).abs() < 1e-3);
        let r41 = return_map(Period::Three, cp(0.41)).unwrap();
        assert!((r41 - 0.41).abs() > 1e-3);
    }

    #[test]
    fn eps_system_reduces_at_one() {
        let c = cp(0.440262);
        let a = scaling_eps(c, 1.0);
        let b = scaling_from_critical(Period::Three, c);
        assert_eq!(a.s, b.s);
        assert_eq!(
            return_map_eps(c, 1.0).unwrap(),
            return_map(Period::Three, c).unwrap()
        );
        for eps in [0.98, 1.02] {
            let f = scaling_eps(cp(0.44), eps);
            assert!(f.s.iter().all(|&v| v > 0.0), "eps={eps}");
        }
    }

    #[test]
    fn tilde_maps_onto_intervals() {
        let f = scaling_from_critical(Period::Five, cp(0.387226));
        for i in 1..=5 {
            let t = f.tilde(i);
            let (lo, hi) = f.interval(i);
            assert_eq!(t.image(0.0, 1.0), (lo, hi));
            assert_eq!(t.preserves_orientation(), i >= 4);
        }
        let c = f.central_fixed_point();
        assert!((f.tilde(2).apply(c) - c).abs() < 1e-15);
    }

    #[test]
    fn cycle_successors() {
        assert_eq!(Period::Three.successor(2), 3);
        assert_eq!(Period::Three.successor(1), 2);
        assert_eq!(Period::Five.successor(4), 2);
        assert_eq!(Period::Five.successor(5), 1);
    }

    #[test]
    fn raw_factor_layout() {
        let f = ScalingFactor::raw(Period::Three, vec![0.2, 0.3, 0.1]).unwrap();
        assert!(f.valid);
        assert!((f.layout_gaps()[0] - 0.2).abs() < 1e-15);
        assert!((f.interval(3).1 - 1.0).abs() < 1e-15);
        assert!(!ScalingFactor::raw(Period::Three, vec![0.5, 0.5, 0.1]).unwrap().valid);
    }
}
