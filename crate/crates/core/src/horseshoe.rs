//! Expanding branch systems built from perturbed return maps and their
//! symbolic coding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fixed_point::{solve_fixed_point_eps, ReturnSystem};
use crate::roots;
use crate::scaling::{feasibility_eps, return_map_eps_raw, Period};
use crate::tower::{ScalingSequence, SequenceRule};

pub const INVERSE_TOL: f64 = 1e-13;
pub const MAX_CYLINDER_DEPTH: usize = 14;
/// Letters of the periodic extension used when coding a finite word.
const CODING_DEPTH: usize = 16;

pub const DEFAULT_EPSILONS: [f64; 3] = [1.02, 1.00, 0.98];
pub const FIVE_EPSILONS: [f64; 5] = [1.04, 1.02, 1.00, 0.98, 0.96];

pub type Word = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSystem {
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    /// Strictly increasing.
    pub fixed_points: Vec<f64>,
    pub derivatives: Vec<f64>,
    /// `A_i`, each mapped by `R(., eps_i)` onto `base`.
    pub domains: Vec<(f64, f64)>,
    pub base: (f64, f64),
}

impl BranchSystem {
    pub fn alphabet(&self) -> usize {
        self.epsilons.len()
    }

    pub fn branch(&self, i: usize, c: f64) -> Result<f64> {
        return_map_eps_raw(c, self.epsilons[i])
    }

    /// `R_i^{-1}(y)` inside `A_i`, for `y` in the base.
    pub fn inverse(&self, i: usize, y: f64) -> Result<f64> {
        self.inverse_tol(i, y, INVERSE_TOL)
    }

    pub fn inverse_tol(&self, i: usize, y: f64, tol: f64) -> Result<f64> {
        let slack = 1e-12;
        if y < self.base.0 - slack || y > self.base.1 + slack {
            return Err(Error::Bisection(format!("{y} outside the base interval")));
        }
        let (lo, hi) = self.domains[i];
        // widen slightly so images of the exact base endpoints stay bracketed
        let pad = 1e-3 * (hi - lo);
        let g = |c: f64| self.branch(i, c).unwrap_or(f64::NAN) - y;
        roots::bisect(g, lo - pad, hi + pad, tol)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.base.0 + self.base.1)
    }
}

/// Solves each fixed point, checks expansion and computes the branch domains.
pub fn build_branch_system(epsilons: &[f64]) -> Result<BranchSystem> {
    if epsilons.len() < 2 {
        return Err(Error::InvalidArgument("need at least two branches".into()));
    }
    if !epsilons.windows(2).all(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument(format!(
            "epsilons must be strictly decreasing: {epsilons:?}"
        )));
    }
    let mut fixed_points = Vec::new();
    let mut derivatives = Vec::new();
    for (i, &eps) in epsilons.iter().enumerate() {
        let r = solve_fixed_point_eps(eps, 1e-14)?;
        let d = ReturnSystem::Perturbed(eps).derivative(r.c_star)?;
        if !(d > 2.0) {
            return Err(Error::ExpansionTooWeak { branch: i, derivative: d });
        }
        fixed_points.push(r.c_star);
        derivatives.push(d);
    }
    if !fixed_points.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::NotMonotone(format!("fixed points not ordered: {fixed_points:?}")));
    }
    let base = (fixed_points[0], *fixed_points.last().unwrap());
    let mut domains = Vec::new();
    for (i, &eps) in epsilons.iter().enumerate() {
        let ci = fixed_points[i];
        let g = |c: f64| return_map_eps_raw(c, eps).unwrap_or(f64::NAN);
        let lo = preimage_near(&g, ci, base.0, -1.0)?;
        let hi = preimage_near(&g, ci, base.1, 1.0)?;
        let n = 64;
        let samples: Vec<f64> = (0..=n).map(|k| g(lo + (hi - lo) * k as f64 / n as f64)).collect();
        if !samples.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::NotMonotone(format!("branch {i} on [{lo}, {hi}]")));
        }
        if !(feasibility_eps(lo, eps) && feasibility_eps(hi, eps)) {
            return Err(Error::Bisection(format!("branch {i} domain leaves the feasible set")));
        }
        domains.push((lo, hi));
    }
    if !domains.windows(2).all(|w| w[0].1 < w[1].0) {
        return Err(Error::NotMonotone("branch domains overlap".into()));
    }
    Ok(BranchSystem { epsilons: epsilons.to_vec(), fixed_points, derivatives, domains, base })
}

/// Solves `g(c) = target` on the side `dir` of the fixed point `ci`.
fn preimage_near<G: Fn(f64) -> f64>(g: &G, ci: f64, target: f64, dir: f64) -> Result<f64> {
    if (g(ci) - target).abs() == 0.0 || target == ci {
        return Ok(ci);
    }
    let mut delta = 1e-7;
    for _ in 0..40 {
        let x = ci + dir * delta;
        let v = g(x);
        if v.is_finite() && (v - target) * dir >= 0.0 {
            let (a, b) = if dir < 0.0 { (x, ci) } else { (ci, x) };
            return roots::bisect(|c| g(c) - target, a, b, INVERSE_TOL);
        }
        delta *= 2.0;
    }
    Err(Error::Bisection(format!("no preimage of {target} near {ci}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coding {
    pub word: Word,
    pub depth: usize,
    pub point: f64,
    pub residual: f64,
}

fn backward(b: &BranchSystem, letters: &[usize]) -> Result<f64> {
    letters.iter().rev().try_fold(b.midpoint(), |x, &a| b.inverse_tol(a, x, 0.0))
}

/// `c(α) = R_{α_0}^{-1} ∘ ... ∘ R_{α_{d-1}}^{-1}(midpoint)`.
pub fn code_to_point(b: &BranchSystem, word: &[usize], depth: usize) -> Result<Coding> {
    if depth == 0 || depth > word.len() {
        return Err(Error::InvalidArgument(format!(
            "coding depth {depth} must lie in 1..={}",
            word.len()
        )));
    }
    if let Some(&bad) = word.iter().find(|&&a| a >= b.alphabet()) {
        return Err(Error::InvalidArgument(format!("symbol {bad} outside alphabet")));
    }
    let point = backward(b, &word[..depth])?;
    let shifted = backward(b, &word[1..depth])?;
    let residual = (b.branch(word[0], point)? - shifted).abs();
    Ok(Coding { word: word.to_vec(), depth, point, residual })
}

/// Coded point of the periodic extension of `word`.
pub fn code_periodic(b: &BranchSystem, word: &[usize]) -> Result<f64> {
    let depth = CODING_DEPTH.max(word.len());
    let ext: Vec<usize> = (0..depth).map(|k| word[k % word.len()]).collect();
    Ok(code_to_point(b, &ext, depth)?.point)
}

/// Number of words of length `n` with a nonempty cylinder.
///
/// Cylinders are built from the back of the word by pulling the current
/// interval through `R_a^{-1}`; a word is dropped when its suffix cylinder
/// leaves the base or the preimage collapses.
pub fn cylinder_count(b: &BranchSystem, n: usize) -> Result<u64> {
    if n == 0 || n > MAX_CYLINDER_DEPTH {
        return Err(Error::InvalidArgument(format!("cylinder depth {n} outside 1..=14")));
    }
    Ok(count_suffix(b, b.base, n))
}

fn count_suffix(b: &BranchSystem, piece: (f64, f64), remaining: usize) -> u64 {
    if remaining == 0 {
        return 1;
    }
    let mut total = 0;
    for a in 0..b.alphabet() {
        if let (Ok(lo), Ok(hi)) = (b.inverse(a, piece.0), b.inverse(a, piece.1)) {
            if lo <= hi + 2.0 * INVERSE_TOL {
                total += count_suffix(b, (lo, hi.max(lo)), remaining - 1);
            }
        }
    }
    total
}

pub fn entropy_estimate(count: u64, n: usize) -> f64 {
    (count as f64).ln() / n as f64
}

/// Scaling data whose `n`-th factor uses `c(σ^{n-1} α)` and `eps_{α_{n-1}}`,
/// with `α` extended periodically.
pub fn symbol_scaling_sequence(b: &BranchSystem, word: &[usize]) -> Result<ScalingSequence> {
    if word.is_empty() {
        return Err(Error::InvalidArgument("empty word".into()));
    }
    let mut codes = Vec::with_capacity(word.len());
    let mut w = word.to_vec();
    for _ in 0..word.len() {
        codes.push(code_periodic(b, &w)?);
        w.rotate_left(1);
    }
    Ok(ScalingSequence {
        period: Period::Three,
        rule: SequenceRule::SymbolDriven {
            word: word.to_vec(),
            epsilons: b.epsilons.clone(),
            codes,
        },
    })
}

/// All words of lengths `1..=max_len` over `alphabet` letters, in
/// lexicographic order, concatenated.
pub fn dense_orbit_word(max_len: usize, alphabet: usize) -> Word {
    let mut out = Vec::new();
    for len in 1..=max_len {
        let total = alphabet.pow(len as u32);
        for k in 0..total {
            let mut digits = vec![0; len];
            let mut r = k;
            for d in digits.iter_mut().rev() {
                *d = r % alphabet;
                r /= alphabet;
            }
            out.extend(digits);
        }
    }
    out
}

/// Index of the branch domain containing `c`.
pub fn branch_of(b: &BranchSystem, c: f64) -> Option<usize> {
    let tol = 1e-12;
    b.domains.iter().position(|&(lo, hi)| c >= lo - tol && c <= hi + tol)
}
