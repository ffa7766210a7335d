//! Invariant suites behind `renorm verify`.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;

use renorm_core::extension::lipschitz_profile;
use renorm_core::fixed_point::continuum_sweep;
use renorm_core::horseshoe::{build_branch_system, cylinder_count, entropy_estimate, symbol_scaling_sequence};
use renorm_core::pwa::{build_pwa, fixed_residual, shift_residual, verify_combinatorics_report};
use renorm_core::quadratic::{tip_constant, CriticalPoint, QuadraticUnimodal};
use renorm_core::scaling::{scaling_from_critical, Period};
use renorm_core::tower::{build_tower, hor_bound, ratio_report, verify_proper, ScalingSequence};

use crate::commands::{extension_run, identity_defect, period, solved, stationary, Output};
use crate::config::{RunConfig, Suite};
use crate::error::CliError;
use crate::report::ReportDocument;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub bound: f64,
    pub pass: bool,
}

fn check(suite: &'static str, name: impl Into<String>, value: f64, relation: &'static str, bound: f64) -> Check {
    let pass = match relation {
        "<=" => value <= bound,
        "<" => value < bound,
        ">=" => value >= bound,
        ">" => value > bound,
        _ => value == bound,
    };
    Check { suite, name: name.into(), value, relation, bound, pass }
}

fn flag(suite: &'static str, name: &str, ok: bool) -> Check {
    check(suite, name, if ok { 1.0 } else { 0.0 }, "==", 1.0)
}

/// Negative control: a feasible but non-fixed parameter.
fn control_c(p: Period) -> f64 {
    match p {
        Period::Three => 0.41,
        Period::Five => 0.382,
    }
}

fn random_words(cfg: &RunConfig, count: usize, len: usize) -> Vec<Vec<usize>> {
    let mut rng = StdRng::seed_from_u64(cfg.seed);
    (0..count).map(|_| (0..len).map(|_| rng.gen_range(0..3)).collect()).collect()
}

fn solve_checks(cfg: &RunConfig, out: &mut Vec<Check>) -> Result<(), CliError> {
    let (_, r, f) = solved(cfg)?;
    out.push(check("solve", "fixed point residual", r.residual, "<=", 1e-10));
    out.push(check("solve", "return map derivative", r.derivative_estimate, ">", 1.0));
    out.push(check("solve", "scaling identity |s2^2 - s_last|", identity_defect(&f).abs(), "<=", 1e-10));
    Ok(())
}

fn tower_checks(cfg: &RunConfig, out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "tower";
    let seq = stationary(cfg)?;
    let t = build_tower(&seq, cfg.depth)?;
    out.push(flag(S, "nesting", t.check_nesting()));
    out.push(flag(S, "disjoint generations", t.check_disjoint()));
    out.push(check(S, "ratio deviation", ratio_report(&t).max_deviation, "<=", 1e-12));
    out.push(check(S, "properness margin", verify_proper(&seq, cfg.depth)?.margin, ">", 0.0));
    let f = seq.factor(1);
    let expect = f.s_i(2).powi(cfg.depth as i32);
    out.push(check(S, "deepest |I_2| / s2^depth - 1", (t.length(2, cfg.depth) / expect - 1.0).abs(), "<=", 1e-12));
    let mut sequences = vec![("stationary".to_string(), seq)];
    if cfg.period == 3 {
        let b = build_branch_system(&cfg.eps)?;
        for w in random_words(cfg, 3, 6).into_iter().filter(|_| b.alphabet() >= 3) {
            sequences.push((format!("word {w:?}"), symbol_scaling_sequence(&b, &w)?));
        }
    }
    for (label, s) in sequences {
        let t = build_tower(&s, 10)?;
        let h = hor_bound(&t, &QuadraticUnimodal::with_raw(t.c));
        let rho = if h.satisfied { h.rho } else { f64::INFINITY };
        out.push(check(S, format!("HorL rho, {label}"), rho, "<=", 1e6));
    }
    Ok(())
}

fn pwa_checks(cfg: &RunConfig, out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "pwa";
    let p = period(cfg);
    let seq = stationary(cfg)?;
    let depth = cfg.depth.max(3);
    out.push(check(S, format!("fixed residual at depth {depth}"), fixed_residual(&seq, depth)?.sup_norm, "<=", 1e-9));
    let bad = ScalingSequence::stationary(scaling_from_critical(p, CriticalPoint::new(control_c(p))?));
    out.push(check(S, "negative control residual", fixed_residual(&bad, depth)?.sup_norm, ">", 1e-6));
    let f = build_pwa(&seq, depth)?;
    let max_n = if p == Period::Three { 4 } else { 3 }.min(depth - 1);
    for n in 1..=max_n {
        let r = verify_combinatorics_report(&f, n)?;
        let err = if r.ok { r.max_error } else { f64::INFINITY };
        out.push(check(S, format!("combinatorics n={n}"), err, "<=", 1e-9));
    }
    // deeper tip values lie within 1e-14 of 1 and lose their digits
    let shallow = build_pwa(&seq, depth.min(6))?;
    let l = tip_constant(f.c);
    let tip = shallow
        .tip_sequence().iter().map(|v| ((v + l) / l).abs()).fold(0.0, f64::max);
    out.push(check(S, "tip sequence deviation", tip, "<=", 1e-6));
    if p == Period::Three {
        let b = build_branch_system(&cfg.eps)?;
        if b.alphabet() >= 3 {
            let mut worst = 0.0f64;
            for w in random_words(cfg, 5, 6) {
                worst = worst.max(shift_residual(&symbol_scaling_sequence(&b, &w)?, 6)?.sup_norm);
            }
            out.push(check(S, "shift identity, 5 random words", worst, "<=", 1e-9));
        }
    }
    Ok(())
}

fn extension_checks(cfg: &RunConfig, out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "extension";
    let e = extension_run(cfg)?;
    let name = if cfg.period == 3 { "|s2^2 - s3|" } else { "|s2^2 - s5|" };
    out.push(check(S, name, e.identity.abs(), "<=", 1e-10));
    let lambda = lipschitz_profile(&e.curve, true);
    let growth = lambda.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    out.push(check(S, "max lambda_{n+1} / lambda_n", growth, "<=", 1.0 + 1e-6));
    let slopes = e.curve.max_slope_per_level();
    out.push(flag(S, "max slope decreasing", slopes.windows(2).all(|w| w[1] < w[0])));
    if e.curve.depth >= 8 {
        out.push(check(S, "max slope at level 8", slopes[7], "<", 1e-3));
    }
    out.push(check(S, "C1 mismatch at marked points", e.curve.max_slope_mismatch(), "<=", 1e-6));
    out.push(check(S, "C1 mismatch, finite differences", e.curve.max_fd_mismatch(), "<=", 1e-6));
    out.push(flag(S, "unimodal", e.curve.is_unimodal()));
    let rel = match e.tip {
        Ok(l) => ((l - e.oracle) / e.oracle).abs(),
        Err(_) => f64::INFINITY,
    };
    out.push(check(S, "tip constant relative error", rel, "<=", 1e-6));
    Ok(())
}

fn horseshoe_checks(cfg: &RunConfig, out: &mut Vec<Check>) -> Result<(), CliError> {
    const S: &str = "horseshoe";
    let b = build_branch_system(&cfg.eps)?;
    let k = b.alphabet() as u64;
    let weakest = b.derivatives.iter().cloned().fold(f64::INFINITY, f64::min);
    out.push(check(S, "weakest branch derivative", weakest, ">", 2.0));
    let max_n = if k <= 3 { 10 } else { 6 };
    let mut last = 0;
    for n in 1..=max_n {
        last = cylinder_count(&b, n)?;
        out.push(check(S, format!("cylinder count n={n}"), last as f64, "==", k.pow(n as u32) as f64));
    }
    let h = entropy_estimate(last, max_n);
    out.push(check(S, "|entropy - ln k|", (h - (k as f64).ln()).abs(), "<=", 0.01));
    let sweep = continuum_sweep(0.98, 1.02, 5, 1e-12)?;
    out.push(flag(S, "fixed point decreasing in eps", sweep.strictly_decreasing()));
    Ok(())
}

pub fn run(suite: Suite, cfg: &RunConfig) -> Result<Output, CliError> {
    let mut checks = Vec::new();
    match suite {
        Suite::All => {
            solve_checks(cfg, &mut checks)?;
            tower_checks(cfg, &mut checks)?;
            pwa_checks(cfg, &mut checks)?;
            extension_checks(cfg, &mut checks)?;
            horseshoe_checks(cfg, &mut checks)?;
        }
        Suite::Tower => tower_checks(cfg, &mut checks)?,
        Suite::Pwa => pwa_checks(cfg, &mut checks)?,
        Suite::Extension => extension_checks(cfg, &mut checks)?,
        Suite::Horseshoe => horseshoe_checks(cfg, &mut checks)?,
    }
    let first_failure = checks.iter().find(|c| !c.pass).map(|c| format!("{}: {}", c.suite, c.name));
    let pass = first_failure.is_none();
    let result = json!({
        "period": cfg.period,
        "checks": checks,
        "passed": pass,
        "first_failure": first_failure,
    });
    Ok(Output { doc: ReportDocument::new(cfg, result, pass), table: None })
}
