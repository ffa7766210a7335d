//! Monotone C^1 interpolants with prescribed end values and slopes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FillerKind {
    /// Cubic Hermite, accepted when it stays strictly monotone.
    MonotoneCubic,
    /// Delbourgo-Gregory rational quadratic over quadratic.
    RationalQuadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FillerFamily {
    /// Cubic when monotone, rational otherwise.
    Auto,
    Cubic,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapFiller {
    pub kind: FillerKind,
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub d0: f64,
    pub d1: f64,
}

const CHECK_POINTS: usize = 256;

impl GapFiller {
    pub fn new(x0: f64, y0: f64, d0: f64, x1: f64, y1: f64, d1: f64, family: FillerFamily) -> Result<Self> {
        let overshoot = Error::FillerOvershoot { lo: x0, hi: x1 };
        let delta = (y1 - y0) / (x1 - x0);
        let ends_ok = x1 > x0
            && (0.0..=1.0).contains(&y0)
            && (0.0..=1.0).contains(&y1)
            && delta != 0.0
            && d0 * delta > 0.0
            && d1 * delta > 0.0;
        if !ends_ok {
            return Err(overshoot);
        }
        let mk = |kind| GapFiller { kind, x0, x1, y0, y1, d0, d1 };
        let cubic = mk(FillerKind::MonotoneCubic);
        let rational = mk(FillerKind::RationalQuadratic);
        let chosen = match family {
            FillerFamily::Cubic => cubic,
            FillerFamily::Rational => rational,
            FillerFamily::Auto => {
                if cubic.is_strictly_monotone() {
                    cubic
                } else {
                    rational
                }
            }
        };
        if !chosen.is_strictly_monotone() {
            return Err(overshoot);
        }
        Ok(chosen)
    }

    fn h(&self) -> f64 {
        self.x1 - self.x0
    }

    fn delta(&self) -> f64 {
        (self.y1 - self.y0) / self.h()
    }

    pub fn is_strictly_monotone(&self) -> bool {
        let sign = self.delta().signum();
        (0..=CHECK_POINTS).all(|k| {
            let x = self.x0 + self.h() * k as f64 / CHECK_POINTS as f64;
            let v = self.value(x);
            self.derivative(x) * sign > 0.0 && (0.0..=1.0).contains(&v)
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        let h = self.h();
        let t = (x - self.x0) / h;
        match self.kind {
            FillerKind::MonotoneCubic => {
                let t2 = t * t;
                let t3 = t2 * t;
                (2.0 * t3 - 3.0 * t2 + 1.0) * self.y0
                    + (t3 - 2.0 * t2 + t) * h * self.d0
                    + (-2.0 * t3 + 3.0 * t2) * self.y1
                    + (t3 - t2) * h * self.d1
            }
            FillerKind::RationalQuadratic => {
                let d = self.delta();
                let w = t * (1.0 - t);
                let num = d * t * t + self.d0 * w;
                let den = d + (self.d1 + self.d0 - 2.0 * d) * w;
                self.y0 + (self.y1 - self.y0) * num / den
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let h = self.h();
        let t = (x - self.x0) / h;
        match self.kind {
            FillerKind::MonotoneCubic => {
                let t2 = t * t;
                ((6.0 * t2 - 6.0 * t) * self.y0
                    + (3.0 * t2 - 4.0 * t + 1.0) * h * self.d0
                    + (-6.0 * t2 + 6.0 * t) * self.y1
                    + (3.0 * t2 - 2.0 * t) * h * self.d1)
                    / h
            }
            FillerKind::RationalQuadratic => {
                let (n, _, den, _) = self.rational_parts(t);
                n / (den * den)
            }
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let h = self.h();
        let t = (x - self.x0) / h;
        match self.kind {
            FillerKind::MonotoneCubic => {
                ((12.0 * t - 6.0) * self.y0
                    + (6.0 * t - 4.0) * h * self.d0
                    + (-12.0 * t + 6.0) * self.y1
                    + (6.0 * t - 2.0) * h * self.d1)
                    / (h * h)
            }
            FillerKind::RationalQuadratic => {
                let (n, dn, den, dden) = self.rational_parts(t);
                (dn * den - 2.0 * n * dden) / (den * den * den) / h
            }
        }
    }

    /// Numerator and denominator of the rational derivative and their
    /// `t`-derivatives.
    fn rational_parts(&self, t: f64) -> (f64, f64, f64, f64) {
        let d = self.delta();
        let (d0, d1) = (self.d0, self.d1);
        let w = t * (1.0 - t);
        let n = d * d * (d1 * t * t + 2.0 * d * w + d0 * (1.0 - t) * (1.0 - t));
        let dn = d * d * (2.0 * d1 * t + 2.0 * d * (1.0 - 2.0 * t) - 2.0 * d0 * (1.0 - t));
        let den = d + (d1 + d0 - 2.0 * d) * w;
        let dden = (d1 + d0 - 2.0 * d) * (1.0 - 2.0 * t);
        (n, dn, den, dden)
    }

    /// Largest sampled `|f''|` on the gap.
    pub fn lipschitz_estimate(&self) -> f64 {
        (0..=CHECK_POINTS)
            .map(|k| {
                let x = self.x0 + self.h() * k as f64 / CHECK_POINTS as f64;
                self.second_derivative(x).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_ends(g: &GapFiller) {
        assert!((g.value(g.x0) - g.y0).abs() < 1e-12);
        assert!((g.value(g.x1) - g.y1).abs() < 1e-12);
        assert!((g.derivative(g.x0) - g.d0).abs() < 1e-12 * g.d0.abs().max(1.0));
        assert!((g.derivative(g.x1) - g.d1).abs() < 1e-12 * g.d1.abs().max(1.0));
    }

    #[test]
    fn both_families_match_end_data() {
        for family in [FillerFamily::Cubic, FillerFamily::Rational] {
            let g = GapFiller::new(0.1, 0.2, 0.5, 0.4, 0.6, 2.0, family).unwrap();
            check_ends(&g);
            let h = 1e-6;
            for k in 1..10 {
                let x = 0.1 + 0.03 * k as f64;
                let fd = (g.value(x + h) - g.value(x - h)) / (2.0 * h);
                assert!((fd - g.derivative(x)).abs() < 1e-6);
                let fd2 = (g.derivative(x + h) - g.derivative(x - h)) / (2.0 * h);
                assert!((fd2 - g.second_derivative(x)).abs() < 1e-4 * fd2.abs().max(1.0));
            }
        }
    }

    #[test]
    fn steep_slopes_fall_back() {
        // slopes far above the secant push the cubic out of the monotone region
        let g = GapFiller::new(0.0, 0.2, 20.0, 0.1, 0.3, 20.0, FillerFamily::Auto).unwrap();
        assert_eq!(g.kind, FillerKind::RationalQuadratic);
        check_ends(&g);
        assert!(GapFiller::new(0.0, 0.2, 20.0, 0.1, 0.3, 20.0, FillerFamily::Cubic).is_err());
    }

    #[test]
    fn wrong_sign_rejected() {
        assert!(matches!(
            GapFiller::new(0.0, 0.2, -1.0, 0.1, 0.3, 1.0, FillerFamily::Auto),
            Err(Error::FillerOvershoot { .. })
        ));
    }

    #[test]
    fn decreasing_gap() {
        let g = GapFiller::new(0.5, 0.9, -0.3, 0.8, 0.2, -4.0, FillerFamily::Auto).unwrap();
        check_ends(&g);
        assert!(g.is_strictly_monotone());
    }
}
