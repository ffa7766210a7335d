//! The quadratic unimodal family `u_c(x) = 1 - ((x - c) / (1 - c))^2` on `[0, 1]`.
//!
//! Every map in the crate is built from this family: it has its maximum
//! `u_c(c) = 1` at the critical point and sends `1` to `0`. For `c != 1/2`
//! it is not symmetric about `c`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DOMAIN_TOL: f64 = 1e-12;

/// A critical point in the open interval `(0, 1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct CriticalPoint(f64);

impl CriticalPoint {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c > 0.0 && c < 0.5 {
            Ok(CriticalPoint(c))
        } else {
            Err(Error::InvalidCriticalPoint(c))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which inverse branch of `u_c` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// `u_c` with critical exponent 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticUnimodal {
    c: f64,
}

impl QuadraticUnimodal {
    pub fn new(c: CriticalPoint) -> Self {
        QuadraticUnimodal { c: c.value() }
    }

    /// Unchecked constructor for internal use where `c` comes from a tower or
    /// a symmetric control (`c = 1/2`).
    pub fn with_raw(c: f64) -> Self {
        QuadraticUnimodal { c }
    }

    pub fn critical_point(&self) -> f64 {
        self.c
    }

    /// Evaluates without a domain check.
    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        let t = (x - self.c) / (1.0 - self.c);
        1.0 - t * t
    }

    /// `1 - u_c(x)`, computed without cancellation.
    #[inline]
    pub fn deficit(&self, x: f64) -> f64 {
        let t = (x - self.c) / (1.0 - self.c);
        t * t
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        -2.0 * (x - self.c) / ((1.0 - self.c) * (1.0 - self.c))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= -DOMAIN_TOL && x <= 1.0 + DOMAIN_TOL) {
            return Err(Error::Domain { x });
        }
        Ok(self.apply(x.clamp(0.0, 1.0)))
    }

    pub fn iterate(&self, x: f64, k: usize) -> Result<f64> {
        let mut y = x;
        for _ in 0..k {
            y = self.eval(y)?;
        }
        // k = 0 still validates the starting point
        if k == 0 {
            self.eval(y)?;
        }
        Ok(y)
    }

    /// `[x, u(x), u^2(x), ..., u^k(x)]`, unchecked.
    pub fn orbit(&self, x: f64, k: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(k + 1);
        let mut y = x;
        out.push(y);
        for _ in 0..k {
            y = self.apply(y);
            out.push(y);
        }
        out
    }

    pub fn preimage(&self, y: f64, side: Side) -> Result<f64> {
        if !(y >= -DOMAIN_TOL && y <= 1.0 + DOMAIN_TOL) {
            return Err(Error::Domain { x: y });
        }
        let mut r = 1.0 - y;
        if r < 0.0 {
            if r > -1e-15 || y <= 1.0 + DOMAIN_TOL {
                r = 0.0;
            }
        }
        let w = (1.0 - self.c) * r.sqrt();
        let x = match side {
            Side::Left => self.c - w,
            Side::Right => self.c + w,
        };
        if x < -DOMAIN_TOL || x > 1.0 + DOMAIN_TOL {
            return Err(Error::PreimageOutOfInterval { y, value: x });
        }
        Ok(x)
    }
}

/// Tip constant of `u_c`: the limit `(1 - u_c(y)) / (y - c)^2 = 1 / (1 - c)^2`.
pub fn tip_constant(c: f64) -> f64 {
    1.0 / ((1.0 - c) * (1.0 - c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(c: f64) -> QuadraticUnimodal {
        QuadraticUnimodal::new(CriticalPoint::new(c).unwrap())
    }

    #[test]
    fn critical_point_bounds() {
        assert!(CriticalPoint::new(0.0).is_err());
        assert!(CriticalPoint::new(0.5).is_err());
        assert!(CriticalPoint::new(f64::NAN).is_err());
        assert!(CriticalPoint::new(0.44).is_ok());
    }

    #[test]
    fn eval_examples() {
        let q = u(0.44);
        assert_eq!(q.eval(0.44).unwrap(), 1.0);
        assert_eq!(q.eval(1.0).unwrap(), 0.0);
        let oracle = 1.0 - (0.44f64 / 0.56).powi(2);
        assert!((q.eval(0.0).unwrap() - oracle).abs() < 1e-15);
        assert!((q.eval(0.0).unwrap() - 0.38265).abs() < 1e-5);
        assert!(matches!(q.eval(1.1), Err(Error::Domain { .. })));
        assert!(matches!(q.eval(-0.01), Err(Error::Domain { .. })));
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(u(0.44).iterate(0.0, 0).unwrap(), 0.0);
        let q = u(0.440262);
        let mut x = 0.0;
        for _ in 0..3 {
            x = q.eval(x).unwrap();
        }
        assert_eq!(q.iterate(0.0, 3).unwrap(), x);
        assert!((x - 0.0392).abs() < 1e-4);
        let x4 = q.eval(x).unwrap();
        assert_eq!(q.iterate(0.0, 4).unwrap(), x4);
        assert!((x4 - 0.4866).abs() < 1e-4);
    }

    #[test]
    fn preimage_examples() {
        let q = u(0.44);
        assert_eq!(q.preimage(1.0, Side::Left).unwrap(), 0.44);
        assert_eq!(q.preimage(1.0, Side::Right).unwrap(), 0.44);
        assert!((q.preimage(0.0, Side::Right).unwrap() - 1.0).abs() < 1e-15);
        let x = q.preimage(0.5, Side::Right).unwrap();
        assert!((x - (0.44 + 0.56 * 0.5f64.sqrt())).abs() < 1e-15);
        assert!((x - 0.8360).abs() < 1e-4);
        assert!((q.eval(x).unwrap() - 0.5).abs() < 1e-12);
        // left preimage of 0 would be 0.44 - 0.56 < 0
        assert!(matches!(
            q.preimage(0.0, Side::Left),
            Err(Error::PreimageOutOfInterval { .. })
        ));
    }

    #[test]
    fn round_trip_on_grid() {
        for &c in &[0.1, 0.3, 0.44, 0.49] {
            let q = u(c);
            for i in 0..=1000 {
                let y = i as f64 / 1000.0;
                for side in [Side::Left, Side::Right] {
                    if let Ok(x) = q.preimage(y, side) {
                        assert!((q.eval(x).unwrap() - y).abs() <= 1e-12, "c={c} y={y}");
                    }
                }
            }
        }
    }

    #[test]
    fn asymmetric_unless_half() {
        let d = 0.05;
        let q = u(0.44);
        assert!((q.apply(0.44 - d) - q.apply(0.44 + d)).abs() < 1e-15);
        // symmetric about c in distance, but the domain [0, 1] is not: the
        // value at the left end differs from the value at the right end
        assert!((q.apply(0.0) - q.apply(1.0)).abs() > 0.1);
        let half = QuadraticUnimodal::with_raw(0.5);
        assert!((half.apply(0.0) - half.apply(1.0)).abs() < 1e-15);
    }

    #[test]
    fn branches_monotone() {
        for &c in &[0.2, 0.44] {
            let q = u(c);
            let n = 500;
            let left: Vec<f64> = (0..=n).map(|i| q.apply(c * i as f64 / n as f64)).collect();
            assert!(left.windows(2).all(|w| w[1] > w[0]));
            let right: Vec<f64> = (0..=n)
                .map(|i| q.apply(c + (1.0 - c) * i as f64 / n as f64))
                .collect();
            assert!(right.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn deficit_matches() {
        let q = u(0.44);
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((q.deficit(x) - (1.0 - q.apply(x))).abs() < 1e-15);
        }
        assert_eq!(tip_constant(0.5), 4.0);
    }
}
