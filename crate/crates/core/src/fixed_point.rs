//! Fixed points of the return maps `R(c)` and `R(c, eps)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;
use crate::scaling::{
    feasible_domain, min_condition_eps, return_map_eps_raw, return_map_raw, FeasibleDomain,
    Period,
};

pub const ROOT_GRID: f64 = 1e-5;
pub const DERIVATIVE_STEP: f64 = 1e-6;
const COARSE_TOL: f64 = 1e-8;
const ACCEPT_RESIDUAL: f64 = 1e-6;

/// Which return map to solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ReturnSystem {
    Plain(Period),
    Perturbed(f64),
}

impl ReturnSystem {
    pub fn eval(&self, c: f64) -> Result<f64> {
        match *self {
            ReturnSystem::Plain(p) => return_map_raw(p, c),
            ReturnSystem::Perturbed(eps) => return_map_eps_raw(c, eps),
        }
    }

    pub fn period(&self) -> Period {
        match *self {
            ReturnSystem::Plain(p) => p,
            ReturnSystem::Perturbed(_) => Period::Three,
        }
    }

    pub fn eps(&self) -> f64 {
        match *self {
            ReturnSystem::Plain(_) => 1.0,
            ReturnSystem::Perturbed(e) => e,
        }
    }

    pub fn derivative(&self, c: f64) -> Result<f64> {
        let a = self.eval(c + DERIVATIVE_STEP)?;
        let b = self.eval(c - DERIVATIVE_STEP)?;
        Ok((a - b) / (2.0 * DERIVATIVE_STEP))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub period: Period,
    pub eps: f64,
    pub c_star: f64,
    pub residual: f64,
    pub derivative_estimate: f64,
    pub expanding: bool,
    pub bracketing_interval: (f64, f64),
}

/// All roots of `R(c) - c` on the given intervals.
pub fn find_roots(
    system: ReturnSystem,
    intervals: &[(f64, f64)],
    tol: f64,
) -> Result<Vec<FixedPointReport>> {
    let g = |c: f64| system.eval(c).map(|r| r - c).unwrap_or(f64::NAN);
    let mut out = Vec::new();
    for &(lo, hi) in intervals {
        let n = ((hi - lo) / ROOT_GRID).ceil().max(2.0) as usize;
        let pad = 1e-12_f64.max((hi - lo) * 1e-12);
        let xs: Vec<f64> = (0..=n)
            .map(|j| {
                let t = j as f64 / n as f64;
                (lo + pad) + t * (hi - lo - 2.0 * pad)
            })
            .collect();
        let vals: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
        for j in 0..n {
            let (a, b) = (vals[j], vals[j + 1]);
            if !a.is_finite() || !b.is_finite() {
                continue;
            }
            let sign_change = a == 0.0 || a.signum() != b.signum();
            if !sign_change {
                continue;
            }
            let x = roots::refine_root(g, xs[j], xs[j + 1], COARSE_TOL.max(tol), tol)?;
            let residual = g(x).abs();
            // a sign change through a pole is not a root
            if !(residual <= ACCEPT_RESIDUAL) {
                continue;
            }
            let derivative_estimate = system.derivative(x)?;
            out.push(FixedPointReport {
                period: system.period(),
                eps: system.eps(),
                c_star: x,
                residual,
                derivative_estimate,
                expanding: derivative_estimate.abs() > 1.0,
                bracketing_interval: (xs[j], xs[j + 1]),
            });
        }
    }
    Ok(out)
}

fn unique(mut found: Vec<FixedPointReport>, what: &str) -> Result<FixedPointReport> {
    // a root sitting on a grid node can be reported from both neighbouring cells
    found.dedup_by(|a, b| (a.c_star - b.c_star).abs() < 1e-9);
    match found.len() {
        0 => Err(Error::NoRoot(what.to_string())),
        1 => Ok(found.pop().unwrap()),
        count => Err(Error::MultipleRoots {
            count,
            roots: found.iter().map(|r| r.c_star).collect(),
        }),
    }
}

pub fn solve_fixed_point(period: Period, domain: &FeasibleDomain, tol: f64) -> Result<FixedPointReport> {
    if domain.intervals.is_empty() {
        return Err(Error::EmptyDomain);
    }
    check_tol(tol)?;
    let found = find_roots(ReturnSystem::Plain(period), &domain.bounds(), tol)?;
    unique(found, &format!("no sign change of R(c) - c for period {}", period.p()))
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol >= 1e-14) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} below 1e-14")));
    }
    Ok(())
}

/// Feasible intervals of the perturbed tripling system.
pub fn feasible_intervals_eps(eps: f64, scan_step: f64, refine_tol: f64) -> Result<Vec<(f64, f64)>> {
    let m = |c: f64| min_condition_eps(c, eps);
    let n = (0.5 / scan_step).ceil() as usize;
    let grid: Vec<f64> = (1..n).map(|j| j as f64 * scan_step).filter(|&c| c < 0.5).collect();
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for j in 0..grid.len() {
        let feasible = m(grid[j]) > 0.0;
        match (start, feasible) {
            (None, true) => {
                start = Some(if j == 0 {
                    grid[0]
                } else {
                    roots::bisect(m, grid[j - 1], grid[j], refine_tol)?
                })
            }
            (Some(lo), false) => {
                out.push((lo, roots::bisect(m, grid[j - 1], grid[j], refine_tol)?));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(lo) = start {
        out.push((lo, *grid.last().unwrap()));
    }
    Ok(out)
}

pub fn solve_fixed_point_eps(eps: f64, tol: f64) -> Result<FixedPointReport> {
    check_tol(tol)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps {eps} must be positive")));
    }
    if eps == 1.0 {
        let domain = feasible_domain(Period::Three, 1e-4, 1e-12)?;
        return solve_fixed_point(Period::Three, &domain, tol);
    }
    let intervals = feasible_intervals_eps(eps, 1e-4, 1e-12)?;
    let found = find_roots(ReturnSystem::Perturbed(eps), &intervals, tol)?;
    unique(found, &format!("no fixed point of R(c, {eps})"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumRow {
    pub eps: f64,
    pub c_star: f64,
    pub derivative_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumTable {
    pub rows: Vec<ContinuumRow>,
}

impl ContinuumTable {
    pub fn strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].c_star < w[0].c_star)
    }
}

pub fn continuum_sweep(eps_lo: f64, eps_hi: f64, steps: usize, tol: f64) -> Result<ContinuumTable> {
    if steps == 0 || eps_lo > eps_hi || (steps >= 2 && eps_lo == eps_hi) {
        return Err(Error::InvalidArgument(format!(
            "sweep needs eps_lo < eps_hi and steps >= 2, got ({eps_lo}, {eps_hi}, {steps})"
        )));
    }
    let mut rows = Vec::with_capacity(steps);
    for j in 0..steps {
        let eps = if steps == 1 {
            eps_lo
        } else {
            eps_lo + (eps_hi - eps_lo) * j as f64 / (steps - 1) as f64
        };
        let r = solve_fixed_point_eps(eps, tol)
            .map_err(|e| Error::NoRoot(format!("eps = {eps}: {e}")))?;
        rows.push(ContinuumRow { eps, c_star: r.c_star, derivative_estimate: r.derivative_estimate });
    }
    let table = ContinuumTable { rows };
    if !table.strictly_decreasing() {
        return Err(Error::NotMonotone("c*_eps is not strictly decreasing in eps".into()));
    }
    Ok(table)
}

/// Largest `[lo, hi]` around 1, on a grid of `step`, where every `eps`
/// has a unique expanding fixed point.
pub fn solvable_window(step: f64, max_offset: f64, tol: f64) -> (f64, f64) {
    let ok = |eps: f64| solve_fixed_point_eps(eps, tol).map(|r| r.expanding).unwrap_or(false);
    let mut hi = 1.0;
    while hi + step <= 1.0 + max_offset + 1e-12 && ok(hi + step) {
        hi += step;
    }
    let mut lo = 1.0;
    while lo - step >= 1.0 - max_offset - 1e-12 && ok(lo - step) {
        lo -= step;
    }
    (lo, hi)
}

/// Fixed point of the plain system with the default domain scan.
pub fn solve_default(period: Period, tol: f64) -> Result<(FeasibleDomain, FixedPointReport)> {
    let domain = feasible_domain(period, 1e-4, 1e-12)?;
    let report = solve_fixed_point(period, &domain, tol)?;
    Ok((domain, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tripling_fixed_point() {
        let (_, r) = solve_default(Period::Three, 1e-13).unwrap();
        assert!((r.c_star - 0.440262).abs() < 1e-5);
        assert!(r.residual <= 1e-12);
        assert!(r.expanding);
    }

    #[test]
    fn no_root_on_first_component() {
        let d = feasible_domain(Period::Three, 1e-4, 1e-12).unwrap();
        let first = d.restrict(0).unwrap();
        assert!(matches!(
            solve_fixed_point(Period::Three, &first, 1e-12),
            Err(Error::NoRoot(_))
        ));
    }

    #[test]
    fn eps_ordering() {
        let base = solve_fixed_point_eps(1.0, 1e-13).unwrap().c_star;
        let lo = solve_fixed_point_eps(0.98, 1e-13).unwrap().c_star;
        let hi = solve_fixed_point_eps(1.02, 1e-13).unwrap().c_star;
        assert!(hi < base && base < lo);
    }

    #[test]
    fn degenerate_sweep() {
        let t = continuum_sweep(1.0, 1.0, 1, 1e-12).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!((t.rows[0].c_star - 0.440262).abs() < 1e-5);
        assert!(continuum_sweep(1.0, 1.0, 3, 1e-12).is_err());
    }
}
