use serde::{Deserialize, Serialize};

/// `x -> offset + scale * x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub offset: f64,
    pub scale: f64,
}

impl Affine {
    pub const IDENTITY: Affine = Affine { offset: 0.0, scale: 1.0 };

    pub fn new(offset: f64, scale: f64) -> Self {
        Affine { offset, scale }
    }

    /// The affine map with `x0 -> y0` and `x1 -> y1`.
    pub fn through(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        let scale = (y1 - y0) / (x1 - x0);
        Affine { offset: y0 - scale * x0, scale }
    }

    /// Maps `[0, 1]` onto `[a, b]` with `0 -> a`, `1 -> b`.
    pub fn unit_to(a: f64, b: f64) -> Self {
        Affine { offset: a, scale: b - a }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        self.offset + self.scale * x
    }

    pub fn inverse(&self) -> Affine {
        Affine {
            offset: -self.offset / self.scale,
            scale: 1.0 / self.scale,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Affine) -> Affine {
        Affine {
            offset: self.offset + self.scale * inner.offset,
            scale: self.scale * inner.scale,
        }
    }

    pub fn preserves_orientation(&self) -> bool {
        self.scale > 0.0
    }

    /// Image of `[lo, hi]`, sorted.
    pub fn image(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (a, b) = (self.apply(lo), self.apply(hi));
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn through_and_inverse() {
        let a = Affine::through(0.2, 0.9, 0.5, 0.3);
        assert!((a.apply(0.2) - 0.9).abs() < 1e-15);
        assert!((a.apply(0.5) - 0.3).abs() < 1e-15);
        let back = a.inverse().compose(&a);
        assert!((back.scale - 1.0).abs() < 1e-15);
        assert!(back.offset.abs() < 1e-15);
        assert!(!a.preserves_orientation());
        assert_eq!(a.image(0.2, 0.5), (a.apply(0.5), a.apply(0.2)));
    }

    #[test]
    fn composition_order() {
        let f = Affine::new(1.0, 2.0);
        let g = Affine::new(0.5, -1.0);
        let x = 0.3;
        assert_eq!(f.compose(&g).apply(x), f.apply(g.apply(x)));
        assert_eq!(Affine::unit_to(0.25, 0.75).apply(1.0), 0.75);
    }
}
