//! Nested interval generations built from scaling data.

use serde::{Deserialize, Serialize};

use crate::affine::Affine;
use crate::error::{Error, Result};
use crate::quadratic::QuadraticUnimodal;
use crate::roots;
use crate::scaling::{eps_factor_raw, Period, ScalingFactor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SequenceRule {
    Stationary(ScalingFactor),
    EpsStationary { c: f64, eps: f64 },
    /// Periodic extension of `word`; `codes[j]` is the coded critical point of
    /// the `j`-th shift and `epsilons[a]` the parameter of symbol `a`.
    SymbolDriven { word: Vec<usize>, epsilons: Vec<f64>, codes: Vec<f64> },
}

/// `n -> s(n)`, indexed from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSequence {
    pub period: Period,
    pub rule: SequenceRule,
}

impl ScalingSequence {
    pub fn stationary(f: ScalingFactor) -> Self {
        ScalingSequence { period: f.period, rule: SequenceRule::Stationary(f) }
    }

    pub fn eps_stationary(c: f64, eps: f64) -> Self {
        ScalingSequence { period: Period::Three, rule: SequenceRule::EpsStationary { c, eps } }
    }

    pub fn factor(&self, n: usize) -> ScalingFactor {
        assert!(n >= 1, "levels start at 1");
        match &self.rule {
            SequenceRule::Stationary(f) => f.clone(),
            SequenceRule::EpsStationary { c, eps } => eps_factor_raw(*c, *eps),
            SequenceRule::SymbolDriven { word, epsilons, codes } => {
                let j = (n - 1) % word.len();
                eps_factor_raw(codes[j], epsilons[word[j]])
            }
        }
    }

    /// Critical point of the map rescaled at level `n - 1`, in unit coordinates.
    pub fn tail_critical(&self, n: usize) -> f64 {
        match &self.rule {
            SequenceRule::SymbolDriven { word, codes, .. } => codes[(n - 1) % word.len()],
            _ => self.factor(n).central_fixed_point(),
        }
    }

    /// The shifted sequence `n -> s(n + 1)`.
    pub fn shift(&self) -> Self {
        match &self.rule {
            SequenceRule::SymbolDriven { word, epsilons, codes } => {
                let mut w = word.clone();
                w.rotate_left(1);
                let mut cs = codes.clone();
                cs.rotate_left(1);
                ScalingSequence {
                    period: self.period,
                    rule: SequenceRule::SymbolDriven { word: w, epsilons: epsilons.clone(), codes: cs },
                }
            }
            _ => self.clone(),
        }
    }

    pub fn shift_by(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |s, _| s.shift())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointLabels {
    pub n: usize,
    pub y: f64,
    pub z: f64,
    /// `x, w` for period three; `a, d, e, f, g, h` for period five.
    pub named: Vec<(String, f64)>,
}

impl EndpointLabels {
    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "y" => Some(self.y),
            "z" => Some(self.z),
            _ => self.named.iter().find(|(k, _)| k == name).map(|&(_, v)| v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tower {
    pub period: Period,
    pub depth: usize,
    pub factors: Vec<ScalingFactor>,
    /// `h[n] = s~_2(1) ∘ ... ∘ s~_2(n)`, with `h[0]` the identity.
    pub h: Vec<Affine>,
    /// `generations[n - 1][i - 1] = I_i^n`.
    pub generations: Vec<Vec<(f64, f64)>>,
    /// `|I_i^n|`, computed from the contraction factor rather than endpoints.
    pub lengths: Vec<Vec<f64>>,
    pub labels: Vec<EndpointLabels>,
    pub c: f64,
    pub critical_enclosure: (f64, f64),
}

impl Tower {
    pub fn interval(&self, i: usize, n: usize) -> (f64, f64) {
        self.generations[n - 1][i - 1]
    }

    pub fn length(&self, i: usize, n: usize) -> f64 {
        self.lengths[n - 1][i - 1]
    }

    /// `y_n`, with `y_0 = 1`.
    pub fn y(&self, n: usize) -> f64 {
        if n == 0 {
            1.0
        } else {
            self.labels[n - 1].y
        }
    }

    /// `z_n`, with `z_0 = 0`.
    pub fn z(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.labels[n - 1].z
        }
    }

    /// Every `I_i^n` lies inside `I_2^{n-1}`.
    pub fn check_nesting(&self) -> bool {
        (1..=self.depth).all(|n| {
            let (plo, phi) = if n == 1 { (0.0, 1.0) } else { self.interval(2, n - 1) };
            // outer children share an endpoint with the parent; allow a few ulps
            let slack = 4.0 * f64::EPSILON;
            self.generations[n - 1]
                .iter()
                .all(|&(lo, hi)| lo >= plo - slack && hi <= phi + slack)
        })
    }

    /// Sorted intervals of each generation are separated by positive gaps.
    pub fn check_disjoint(&self) -> bool {
        self.generations.iter().all(|g| {
            let mut v = g.clone();
            v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            v.windows(2).all(|w| w[1].0 > w[0].1)
        })
    }
}

pub fn build_tower(seq: &ScalingSequence, depth: usize) -> Result<Tower> {
    if depth == 0 {
        return Err(Error::InvalidArgument("tower depth must be at least 1".into()));
    }
    let period = seq.period;
    let k = period.p();
    let mut h = vec![Affine::IDENTITY];
    let mut factors = Vec::with_capacity(depth);
    let mut generations = Vec::with_capacity(depth);
    let mut labels = Vec::with_capacity(depth);
    let mut lengths = Vec::with_capacity(depth);
    for n in 1..=depth {
        let f = seq.factor(n);
        if !f.valid {
            return Err(Error::InvalidFactor(n));
        }
        let prev = h[n - 1];
        let gen: Vec<(f64, f64)> = (1..=k)
            .map(|i| {
                let (lo, hi) = f.interval(i);
                prev.image(lo, hi)
            })
            .collect();
        let next = prev.compose(&f.tilde(2));
        let named = match period {
            Period::Three => vec![
                ("x".to_string(), prev.apply(f.s[0])),
                ("w".to_string(), prev.apply(f.interval(3).0)),
            ],
            Period::Five => vec![
                ("a".to_string(), prev.apply(f.s[0])),
                ("d".to_string(), prev.apply(f.interval(3).0)),
                ("e".to_string(), prev.apply(f.interval(3).1)),
                ("f".to_string(), prev.apply(f.interval(4).0)),
                ("g".to_string(), prev.apply(f.interval(4).1)),
                ("h".to_string(), prev.apply(f.interval(5).0)),
            ],
        };
        // s~_2 reverses orientation, so y_n = h_{n-1}(lo_2) and z_n = h_{n-1}(hi_2)
        let (lo2, hi2) = f.interval(2);
        labels.push(EndpointLabels { n, y: prev.apply(lo2), z: prev.apply(hi2), named });
        lengths.push(f.s.iter().map(|si| si * prev.scale.abs()).collect());
        h.push(next);
        generations.push(gen);
        factors.push(f);
    }
    let c = h[depth].apply(seq.tail_critical(depth + 1));
    let critical_enclosure = generations[depth - 1][1];
    Ok(Tower { period, depth, factors, h, generations, lengths, labels, c, critical_enclosure })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Properness {
    pub margin: f64,
    pub decay_ok: bool,
}

pub fn verify_proper(seq: &ScalingSequence, depth: usize) -> Result<Properness> {
    let t = build_tower(seq, depth)?;
    let margin = t.factors.iter().map(|f| f.margin()).fold(f64::INFINITY, f64::min);
    let decay_ok = (1..=depth).all(|n| {
        let bound = (1.0 - margin).powi(n as i32);
        (1..=seq.period.p()).all(|i| t.length(i, n) <= bound)
    });
    Ok(Properness { margin, decay_ok })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub n: usize,
    /// `|I_i^{n+1}| / |I_2^n|` for each `i`.
    pub child_ratios: Vec<f64>,
    /// `|I_1^{n+1}| / |I_1^n|`.
    pub first_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub max_deviation: f64,
    pub constant: bool,
}

pub fn ratio_report(t: &Tower) -> RatioReport {
    let k = t.period.p();
    let rows: Vec<RatioRow> = (1..t.depth)
        .map(|n| RatioRow {
            n,
            child_ratios: (1..=k).map(|i| t.length(i, n + 1) / t.length(2, n)).collect(),
            first_ratio: t.length(1, n + 1) / t.length(1, n),
        })
        .collect();
    let mut max_deviation: f64 = 0.0;
    for row in &rows {
        let f = &t.factors[row.n];
        for (i, r) in row.child_ratios.iter().enumerate() {
            max_deviation = max_deviation.max((r - f.s[i]).abs());
        }
        if let Some(first) = rows.first() {
            max_deviation = max_deviation.max((row.first_ratio - first.first_ratio).abs());
        }
    }
    RatioReport { rows, max_deviation, constant: max_deviation <= 1e-12 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorBound {
    pub rho: f64,
    /// `|[u(y_n), 1]| / |I_2^n|^2` for `n = 1..depth`.
    pub ratios: Vec<f64>,
    pub satisfied: bool,
}

pub fn hor_bound(t: &Tower, u: &QuadraticUnimodal) -> HorBound {
    let ratios: Vec<f64> = (1..=t.depth)
        .map(|n| {
            let len = t.length(2, n);
            u.deficit(t.y(n)) / (len * len)
        })
        .collect();
    let worst = ratios
        .iter()
        .map(|&r| r.max(1.0 / r))
        .fold(1.0f64, f64::max);
    let satisfied = worst.is_finite() && ratios.iter().all(|&r| r > 0.0);
    let rho = if satisfied { 2f64.powi(worst.log2().ceil() as i32) } else { f64::INFINITY };
    HorBound { rho, ratios, satisfied }
}

/// Similarity dimension: the `d` with `sum s_i^d = 1`.
pub fn cantor_dimension(f: &ScalingFactor) -> f64 {
    let g = |d: f64| f.s.iter().map(|s| s.powf(d)).sum::<f64>() - 1.0;
    if g(1.0) >= 0.0 {
        return 1.0;
    }
    roots::bisect(g, 0.0, 1.0, 1e-13).unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadratic::CriticalPoint;
    use crate::scaling::scaling_from_critical;

    const C3: f64 = 0.4402615975022368;

    fn seq3() -> ScalingSequence {
        ScalingSequence::stationary(scaling_from_critical(Period::Three, CriticalPoint::new(C3).unwrap()))
    }

    #[test]
    fn first_generation() {
        let t = build_tower(&seq3(), 1).unwrap();
        let s = &t.factors[0].s;
        let u0 = 1.0 - (C3 / (1.0 - C3)).powi(2);
        assert_eq!(t.interval(1, 1), (0.0, s[0]));
        assert!((t.interval(2, 1).0 - u0).abs() < 1e-15);
        assert!((t.length(2, 1) - s[1]).abs() < 1e-15);
        assert!((t.interval(3, 1).0 - (1.0 - s[2])).abs() < 1e-15);
        assert!((u0 - 0.3813).abs() < 1e-4);
    }

    #[test]
    fn sixth_generation_length() {
        let t = build_tower(&seq3(), 6).unwrap();
        let s2 = t.factors[0].s[1];
        assert!((t.length(2, 6) - s2.powi(6)).abs() < 1e-20);
        assert!((t.length(2, 6) - 1.3604e-6).abs() < 1e-9);
    }

    #[test]
    fn parity_labels() {
        let t = build_tower(&seq3(), 6).unwrap();
        for l in &t.labels {
            let (lo, hi) = t.interval(2, l.n);
            if l.n % 2 == 1 {
                assert_eq!((l.y, l.z), (lo, hi));
            } else {
                assert_eq!((l.y, l.z), (hi, lo));
            }
            let (a1, b1) = t.interval(1, l.n);
            let x = l.get("x").unwrap();
            assert!(x == a1 || x == b1);
        }
    }

    #[test]
    fn proper_margin() {
        let p = verify_proper(&seq3(), 10).unwrap();
        assert!((p.margin - t_s3()).abs() < 1e-15);
        assert!((p.margin - 0.0111).abs() < 1e-4);
        assert!(p.decay_ok);
        assert!(verify_proper(&seq3(), 1).unwrap().decay_ok);
    }

    fn t_s3() -> f64 {
        seq3().factor(1).s[2]
    }

    #[test]
    fn ratios_constant() {
        let t = build_tower(&seq3(), 8).unwrap();
        let r = ratio_report(&t);
        assert!(r.constant, "{}", r.max_deviation);
        let s2 = t.factors[0].s[1];
        assert!(r.rows.iter().all(|row| (row.first_ratio - s2).abs() < 1e-12));
    }

    #[test]
    fn hor_single_level() {
        let t = build_tower(&seq3(), 1).unwrap();
        let u = QuadraticUnimodal::with_raw(t.c);
        let hb = hor_bound(&t, &u);
        let s2 = t.factors[0].s[1];
        let y1 = t.y(1);
        let expected = (y1 - t.c).powi(2) / ((1.0 - t.c).powi(2) * s2 * s2);
        assert!((hb.ratios[0] - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn dimension_cases() {
        let third = ScalingFactor::raw(Period::Three, vec![1.0 / 3.0; 3]).unwrap();
        assert!((cantor_dimension(&third) - 1.0).abs() < 1e-9);
        let ninth = ScalingFactor::raw(Period::Three, vec![1.0 / 9.0; 3]).unwrap();
        assert!((cantor_dimension(&ninth) - 0.5).abs() < 1e-12);
        let d = cantor_dimension(&seq3().factor(1));
        assert!(d > 0.0 && d < 1.0);
    }

    #[test]
    fn invalid_factor_rejected() {
        let bad = ScalingFactor::raw(Period::Three, vec![0.6, 0.3, 0.2]).unwrap();
        assert_eq!(
            build_tower(&ScalingSequence::stationary(bad), 3).unwrap_err(),
            Error::InvalidFactor(1)
        );
    }
}
