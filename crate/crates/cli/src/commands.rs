//! One function per subcommand. Each returns the report and, where the
//! command has one, a CSV table.

use serde_json::{json, Value};

use renorm_core::extension::{extend, extend_direct, lipschitz_profile, quadratic_tip, seed_pieces, MarkSide};
use renorm_core::filler::{FillerFamily, FillerKind};
use renorm_core::fixed_point::{solve_default, solve_fixed_point_eps, FixedPointReport};
use renorm_core::horseshoe::{
    build_branch_system, code_to_point, cylinder_count, entropy_estimate, symbol_scaling_sequence,
};
use renorm_core::pwa::build_pwa;
use renorm_core::quadratic::{tip_constant, CriticalPoint, QuadraticUnimodal};
use renorm_core::scaling::{
    conditions, feasible_domain, return_map, scaling_eps, scaling_from_critical, FeasibleDomain, Period,
    ScalingFactor,
};
use renorm_core::tower::{build_tower, cantor_dimension, hor_bound, ratio_report, verify_proper, ScalingSequence};

use crate::config::{Command, PlotKind, RunConfig};
use crate::error::CliError;
use crate::report::{Cell, ReportDocument, Table};
use crate::verify;

pub struct Output {
    pub doc: ReportDocument,
    pub table: Option<Table>,
}

type Run = Result<Output, CliError>;

pub fn period(cfg: &RunConfig) -> Period {
    if cfg.period == 5 {
        Period::Five
    } else {
        Period::Three
    }
}

pub fn domain(cfg: &RunConfig) -> Result<FeasibleDomain, CliError> {
    Ok(feasible_domain(period(cfg), cfg.step, cfg.tol.clamp(1e-15, 1e-6))?)
}

pub fn solved(cfg: &RunConfig) -> Result<(FeasibleDomain, FixedPointReport, ScalingFactor), CliError> {
    let p = period(cfg);
    let (d, r) = solve_default(p, cfg.tol)?;
    let f = scaling_from_critical(p, CriticalPoint::new(r.c_star)?);
    Ok((d, r, f))
}

pub fn stationary(cfg: &RunConfig) -> Result<ScalingSequence, CliError> {
    Ok(ScalingSequence::stationary(solved(cfg)?.2))
}

/// `s_2^2 - s_k`, which vanishes at the fixed point.
pub fn identity_defect(f: &ScalingFactor) -> f64 {
    f.s_i(2) * f.s_i(2) - f.s_i(f.k())
}

fn identity_name(p: Period) -> &'static str {
    match p {
        Period::Three => "s2^2 - s3",
        Period::Five => "s2^2 - s5",
    }
}

fn done(cfg: &RunConfig, result: Value, table: Option<Table>) -> Run {
    Ok(Output { doc: ReportDocument::new(cfg, result, true), table })
}

pub fn run(command: &Command, cfg: &RunConfig) -> Run {
    match command {
        Command::Solve => solve(cfg),
        Command::Feasible => feasible(cfg),
        Command::Plotdata { kind } => plotdata(*kind, cfg),
        Command::Tower => tower(cfg),
        Command::Extend => extend_cmd(cfg),
        Command::Horseshoe => horseshoe(cfg),
        Command::Verify { suite } => verify::run(*suite, cfg),
    }
}

fn domain_json(d: &FeasibleDomain) -> Value {
    json!(d
        .intervals
        .iter()
        .map(|i| json!({"lo": i.lo, "hi": i.hi, "lo_binding": i.lo_binding, "hi_binding": i.hi_binding}))
        .collect::<Vec<_>>())
}

fn factor_json(f: &ScalingFactor) -> Value {
    json!({"s": f.s, "anchors": f.anchors, "sum": f.sum(), "layout_gaps": f.layout_gaps()})
}

fn solve(cfg: &RunConfig) -> Run {
    let p = period(cfg);
    if cfg.eps.len() == 1 {
        if p != Period::Three {
            return Err(CliError::Usage("the perturbed system exists for period 3 only".into()));
        }
        let eps = cfg.eps[0];
        let r = solve_fixed_point_eps(eps, cfg.tol)?;
        let f = scaling_eps(CriticalPoint::new(r.c_star)?, eps);
        let result = json!({
            "period": 3,
            "eps": eps,
            "c_star": r.c_star,
            "residual": r.residual,
            "derivative": r.derivative_estimate,
            "expanding": r.expanding,
            "bracket": [r.bracketing_interval.0, r.bracketing_interval.1],
            "scaling": factor_json(&f),
            "identity": {"name": identity_name(p), "value": identity_defect(&f)},
        });
        return done(cfg, result, None);
    }
    let (d, r, f) = solved(cfg)?;
    let conds: Vec<Value> = conditions(p, r.c_star).iter().map(|(n, v)| json!({"name": n, "value": v})).collect();
    let result = json!({
        "period": cfg.period,
        "c_star": r.c_star,
        "residual": r.residual,
        "derivative": r.derivative_estimate,
        "expanding": r.expanding,
        "bracket": [r.bracketing_interval.0, r.bracketing_interval.1],
        "scaling": factor_json(&f),
        "conditions": conds,
        "identity": {"name": identity_name(p), "value": identity_defect(&f)},
        "tip_constant": tip_constant(r.c_star),
        "domain": domain_json(&d),
    });
    done(cfg, result, None)
}

fn feasible(cfg: &RunConfig) -> Run {
    let d = domain(cfg)?;
    let mut t = Table::new(&["lo", "hi", "binding_condition"]);
    for i in &d.intervals {
        let binding = format!("lo:{};hi:{}", i.lo_binding.join("+"), i.hi_binding.join("+"));
        t.push(vec![Cell::Float(i.lo), Cell::Float(i.hi), Cell::Text(binding)]);
    }
    let result = json!({
        "period": cfg.period,
        "step": cfg.step,
        "intervals": domain_json(&d),
        "boundaries": d.boundaries(),
    });
    done(cfg, result, Some(t))
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
}

fn table_json(kind: &str, t: &Table, extra: Value) -> Value {
    let rows: Vec<Value> = t
        .rows
        .iter()
        .map(|r| {
            json!(r
                .iter()
                .map(|c| match c {
                    Cell::Float(x) => json!(x),
                    Cell::Int(i) => json!(i),
                    Cell::Text(s) => json!(s),
                })
                .collect::<Vec<_>>())
        })
        .collect();
    json!({"kind": kind, "columns": t.header, "rows": rows, "summary": extra})
}

fn plotdata(kind: PlotKind, cfg: &RunConfig) -> Run {
    let p = period(cfg);
    let (table, summary, name) = match kind {
        PlotKind::Scaling => {
            let d = domain(cfg)?;
            let (lo, hi) = (d.intervals[0].lo, d.intervals[d.intervals.len() - 1].hi);
            let mut header = vec!["c".to_string()];
            header.extend((1..=p.p()).map(|i| format!("S{i}")));
            header.push("sum".into());
            let mut t = Table { header, rows: Vec::new() };
            for c in grid(lo, hi, cfg.grid) {
                let f = scaling_from_critical(p, CriticalPoint::new(c)?);
                let mut row = vec![c];
                row.extend(&f.s);
                row.push(f.sum());
                t.floats(&row);
            }
            (t, json!({"lo": lo, "hi": hi}), "scaling")
        }
        PlotKind::Returnmap => {
            let d = domain(cfg)?;
            let mut t = Table::new(&["c", "r"]);
            let mut crossings = Vec::new();
            for (k, i) in d.intervals.iter().enumerate() {
                let mut prev: Option<f64> = None;
                let mut count = 0;
                for c in grid(i.lo, i.hi, cfg.grid) {
                    if let Ok(r) = return_map(p, CriticalPoint::new(c)?) {
                        t.floats(&[c, r]);
                        let s = r - c;
                        if let Some(q) = prev {
                            if q.signum() != s.signum() {
                                count += 1;
                            }
                        }
                        prev = Some(s);
                    }
                }
                crossings.push(json!({"interval": k, "diagonal_crossings": count}));
            }
            (t, json!(crossings), "returnmap")
        }
        PlotKind::Cobweb => {
            let (_, r, _) = solved(cfg)?;
            let u = QuadraticUnimodal::with_raw(r.c_star);
            let orbit = u.orbit(0.0, p.p());
            let mut t = Table::new(&["x", "y"]);
            t.floats(&[orbit[0], 0.0]);
            for w in orbit.windows(2) {
                t.floats(&[w[0], w[1]]);
                t.floats(&[w[1], w[1]]);
            }
            let closing = orbit[p.p()] - orbit[0];
            (t, json!({"c_star": r.c_star, "orbit": orbit, "closing_gap": closing}), "cobweb")
        }
        PlotKind::Tower => {
            let (t, _) = tower_table(cfg)?;
            (t, json!({}), "tower")
        }
        PlotKind::Extension => {
            let (t, summary) = extension_samples(cfg)?;
            (t, summary, "extension")
        }
    };
    let result = table_json(name, &table, summary);
    done(cfg, result, Some(table))
}

fn sequence(cfg: &RunConfig) -> Result<(ScalingSequence, Value), CliError> {
    if cfg.word.is_empty() {
        return Ok((stationary(cfg)?, json!({"rule": "stationary"})));
    }
    if cfg.period != 3 {
        return Err(CliError::Usage("symbol-driven towers exist for period 3 only".into()));
    }
    let b = build_branch_system(&cfg.eps)?;
    if let Some(bad) = cfg.word.iter().find(|&&a| a >= b.alphabet()) {
        return Err(CliError::Usage(format!("symbol {bad} outside the {}-letter alphabet", b.alphabet())));
    }
    let seq = symbol_scaling_sequence(&b, &cfg.word)?;
    Ok((seq, json!({"rule": "symbol", "word": cfg.word, "eps": cfg.eps})))
}

fn tower_table(cfg: &RunConfig) -> Result<(Table, renorm_core::tower::Tower), CliError> {
    let (seq, _) = sequence(cfg)?;
    let t = build_tower(&seq, cfg.depth)?;
    let mut table = Table::new(&["n", "i", "lo", "hi", "length"]);
    for n in 1..=t.depth {
        for i in 1..=seq.period.p() {
            let (lo, hi) = t.interval(i, n);
            table.push(vec![
                Cell::Int(n as i64),
                Cell::Int(i as i64),
                Cell::Float(lo),
                Cell::Float(hi),
                Cell::Float(t.length(i, n)),
            ]);
        }
    }
    Ok((table, t))
}

fn tower(cfg: &RunConfig) -> Run {
    let (seq, rule) = sequence(cfg)?;
    let (table, t) = tower_table(cfg)?;
    let hor = hor_bound(&t, &QuadraticUnimodal::with_raw(t.c));
    let proper = verify_proper(&seq, cfg.depth)?;
    let labels: Vec<Value> = t
        .labels
        .iter()
        .map(|l| {
            let named: serde_json::Map<String, Value> = l.named.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            json!({"n": l.n, "y": l.y, "z": l.z, "named": named})
        })
        .collect();
    let ratios = ratio_report(&t);
    let dimension = match &seq.rule {
        renorm_core::tower::SequenceRule::Stationary(f) => json!(cantor_dimension(f)),
        _ => Value::Null,
    };
    let result = json!({
        "period": cfg.period,
        "sequence": rule,
        "depth": t.depth,
        "c": t.c,
        "critical_enclosure": [t.critical_enclosure.0, t.critical_enclosure.1],
        "nested": t.check_nesting(),
        "disjoint": t.check_disjoint(),
        "labels": labels,
        "ratio_max_deviation": ratios.max_deviation,
        "ratios_constant": ratios.constant,
        "proper_margin": proper.margin,
        "proper_decay": proper.decay_ok,
        "hor_rho": hor.rho,
        "hor_ratios": hor.ratios,
        "dimension": dimension,
    });
    done(cfg, result, Some(table))
}

pub struct ExtensionRun {
    pub c: f64,
    pub identity: f64,
    pub curve: renorm_core::extension::SampledCurve,
    pub seeds: renorm_core::extension::SeedPieces,
    pub tip: Result<f64, renorm_core::Error>,
    pub oracle: f64,
}

pub fn extension_run(cfg: &RunConfig) -> Result<ExtensionRun, CliError> {
    let (_, r, f) = solved(cfg)?;
    let identity = identity_defect(&f);
    let map = build_pwa(&ScalingSequence::stationary(f), cfg.depth.max(2))?;
    let seeds = seed_pieces(&map, FillerFamily::Auto)?;
    let curve = extend(&seeds, seeds.transform, cfg.depth, cfg.resolution)?;
    let tip = quadratic_tip(&curve, curve.c);
    Ok(ExtensionRun { c: r.c_star, identity, curve, seeds, tip, oracle: tip_constant(r.c_star) })
}

fn extension_samples(cfg: &RunConfig) -> Result<(Table, Value), CliError> {
    let e = extension_run(cfg)?;
    let mut t = Table::new(&["x", "y", "deficit", "slope", "level", "tip"]);
    for s in &e.curve.samples {
        t.push(vec![
            Cell::Float(s.x),
            Cell::Float(s.y),
            Cell::Float(s.deficit),
            Cell::Float(s.slope),
            Cell::Int(s.level as i64),
            Cell::Int(s.tip as i64),
        ]);
    }
    Ok((t, json!({"c": e.curve.c, "window": [e.curve.window.0, e.curve.window.1]})))
}

fn extend_cmd(cfg: &RunConfig) -> Run {
    let e = extension_run(cfg)?;
    let (table, _) = extension_samples(cfg)?;
    let fillers: Vec<Value> = e
        .seeds
        .k2
        .segments
        .iter()
        .chain(&e.seeds.k1.segments)
        .filter_map(|s| match s {
            renorm_core::extension::Segment::Filler(g) => Some(json!({
                "lo": g.x0,
                "hi": g.x1,
                "kind": match g.kind {
                    FillerKind::MonotoneCubic => "cubic",
                    FillerKind::RationalQuadratic => "rational",
                },
                "lipschitz": g.lipschitz_estimate(),
            })),
            _ => None,
        })
        .collect();
    let marks: Vec<Value> = e
        .curve
        .marks
        .iter()
        .map(|m| {
            json!({
                "n": m.n,
                "side": if m.side == MarkSide::Y { "y" } else { "z" },
                "offset": m.offset,
                "slope_mismatch": m.slope_mismatch(),
                "fd_mismatch": m.fd_mismatch(),
                "curvature_jump": m.curvature_jump(),
            })
        })
        .collect();
    // a shallower map keeps the direct fillers away from values that round to 1
    let direct_depth = if cfg.period == 3 { 6 } else { 5 };
    let direct = extend_direct(&build_pwa(&stationary(cfg)?, direct_depth)?, FillerFamily::Auto)?;
    let tip = match &e.tip {
        Ok(l) => json!({"l": l, "oracle": e.oracle, "relative_error": ((l - e.oracle) / e.oracle).abs()}),
        Err(err) => json!({"error": err.to_string(), "oracle": e.oracle}),
    };
    let result = json!({
        "period": cfg.period,
        "c_star": e.c,
        "depth": e.curve.depth,
        "horizontal": e.curve.transform.horizontal,
        "vertical": e.curve.transform.vertical,
        "identity": {"name": identity_name(period(cfg)), "value": e.identity},
        "fillers": fillers,
        "seed_junction_mismatch": e.seeds.junction_mismatch(),
        "lambda": lipschitz_profile(&e.curve, true),
        "max_slope": e.curve.max_slope_per_level(),
        "marks": marks,
        "window": [e.curve.window.0, e.curve.window.1],
        "unimodal": e.curve.is_unimodal(),
        "tip": tip,
        "direct_filler_lipschitz": direct.lipschitz,
    });
    done(cfg, result, Some(table))
}

fn horseshoe(cfg: &RunConfig) -> Run {
    let b = build_branch_system(&cfg.eps)?;
    let counts: Vec<u64> = (1..=cfg.depth).map(|n| cylinder_count(&b, n)).collect::<Result<_, _>>()?;
    let entropy: Vec<f64> = counts.iter().enumerate().map(|(k, &c)| entropy_estimate(c, k + 1)).collect();
    let word = if cfg.word.is_empty() { vec![0, 1] } else { cfg.word.clone() };
    if let Some(bad) = word.iter().find(|&&a| a >= b.alphabet()) {
        return Err(CliError::Usage(format!("symbol {bad} outside the {}-letter alphabet", b.alphabet())));
    }
    let ext: Vec<usize> = (0..12.max(word.len())).map(|k| word[k % word.len()]).collect();
    let coding = code_to_point(&b, &ext, ext.len())?;
    let domains: Vec<Value> = b.domains.iter().map(|(lo, hi)| json!([lo, hi])).collect();
    let result = json!({
        "eps": b.epsilons,
        "fixed_points": b.fixed_points,
        "derivatives": b.derivatives,
        "domains": domains,
        "base": [b.base.0, b.base.1],
        "cylinder_counts": counts,
        "entropy": entropy,
        "log_alphabet": (b.alphabet() as f64).ln(),
        "coding": {"word": word, "depth": coding.depth, "point": coding.point, "residual": coding.residual},
    });
    done(cfg, result, None)
}
