//! Coefficient a(x, y) and exponent p(x, y) fields.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Built-in field shapes that can be named from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldShape {
    Constant { value: f64 },
    /// `base + amp * exp(-|y|^2 / width^2)`; depends on the second point only.
    SmoothBumpModulated { base: f64, amp: f64, width: f64 },
    /// `clamp(base + |x - y|, base, base + amp)`.
    ClippedDistance { base: f64, amp: f64 },
}

impl FieldShape {
    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match *self {
            FieldShape::Constant { value } => value,
            FieldShape::SmoothBumpModulated { base, amp, width } => {
                let r2: f64 = y.iter().map(|v| v * v).sum();
                base + amp * (-r2 / (width * width)).exp()
            }
            FieldShape::ClippedDistance { base, amp } => {
                let d = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (base + d).clamp(base, base + amp)
            }
        }
    }

    fn range(&self) -> (f64, f64) {
        match *self {
            FieldShape::Constant { value } => (value, value),
            FieldShape::SmoothBumpModulated { base, amp, .. } => {
                (base.min(base + amp), base.max(base + amp))
            }
            FieldShape::ClippedDistance { base, amp } => (base, base + amp),
        }
    }
}

type FieldFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
enum Source {
    Builtin(FieldShape),
    Custom(Arc<FieldFn>),
}

/// A bounded scalar field on ℝⁿ×ℝⁿ with declared bounds.
#[derive(Clone)]
pub struct Field {
    source: Source,
    lower: f64,
    upper: f64,
}

/// Coefficient a(x, y) of the double-phase, logarithmic and variable
/// exponent families.
pub type CoefficientField = Field;
/// Exponent p(x, y) of the variable exponent family.
pub type ExponentField = Field;

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("Field");
        match &self.source {
            Source::Builtin(shape) => d.field("shape", shape),
            Source::Custom(_) => d.field("shape", &"custom"),
        };
        d.field("lower", &self.lower).field("upper", &self.upper).finish()
    }
}

impl Field {
    pub fn constant(value: f64) -> Self {
        Self::builtin(FieldShape::Constant { value })
    }

    pub fn builtin(shape: FieldShape) -> Self {
        let (lower, upper) = shape.range();
        Self {
            source: Source::Builtin(shape),
            lower,
            upper,
        }
    }

    /// Arbitrary evaluator with caller-declared bounds. Not serializable.
    pub fn custom<F>(f: F, lower: f64, upper: f64) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            source: Source::Custom(Arc::new(f)),
            lower,
            upper,
        }
    }

    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.source {
            Source::Builtin(shape) => shape.eval(x, y),
            Source::Custom(f) => f(x, y),
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn shape(&self) -> Option<&FieldShape> {
        match &self.source {
            Source::Builtin(s) => Some(s),
            Source::Custom(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.source, Source::Builtin(FieldShape::Constant { .. }))
    }

    /// Largest violation of `lower <= f(x, y) <= upper` over random points in
    /// `[-extent, extent]^n`. Nonpositive means the bounds held.
    pub fn bound_violation<R: Rng>(&self, n: usize, extent: f64, samples: usize, rng: &mut R) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        let mut x = [0.0; 3];
        let mut y = [0.0; 3];
        for _ in 0..samples {
            for i in 0..n {
                x[i] = rng.random_range(-extent..extent);
                y[i] = rng.random_range(-extent..extent);
            }
            let v = self.eval(&x[..n], &y[..n]);
            worst = worst.max(self.lower - v).max(v - self.upper);
        }
        worst
    }

    /// Sampled modulus of continuity in the second variable: the largest
    /// `|f(x, y) - f(x, y')|` with `|y - y'| <= delta`.
    pub fn continuity_modulus<R: Rng>(
        &self,
        n: usize,
        extent: f64,
        delta: f64,
        samples: usize,
        rng: &mut R,
    ) -> f64 {
        let mut worst: f64 = 0.0;
        let mut x = [0.0; 3];
        let mut y = [0.0; 3];
        let mut y2 = [0.0; 3];
        for _ in 0..samples {
            for i in 0..n {
                x[i] = rng.random_range(-extent..extent);
                y[i] = rng.random_range(-extent..extent);
                y2[i] = y[i] + delta / (n as f64).sqrt() * rng.random_range(-1.0..1.0);
            }
            let d = (self.eval(&x[..n], &y[..n]) - self.eval(&x[..n], &y2[..n])).abs();
            worst = worst.max(d);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bump_field_respects_bounds_and_is_continuous() {
        let f = Field::builtin(FieldShape::SmoothBumpModulated {
            base: 1.0,
            amp: 0.5,
            width: 1.0,
        });
        assert_eq!((f.lower(), f.upper()), (1.0, 1.5));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(f.bound_violation(2, 3.0, 2000, &mut rng) <= 0.0);
        let m1 = f.continuity_modulus(2, 3.0, 1e-2, 2000, &mut rng);
        let m2 = f.continuity_modulus(2, 3.0, 1e-4, 2000, &mut rng);
        assert!(m2 < m1 && m2 < 1e-3);
    }

    #[test]
    fn clipped_distance_is_base_on_diagonal() {
        let f = Field::builtin(FieldShape::ClippedDistance { base: 2.0, amp: 1.0 });
        assert_eq!(f.eval(&[0.3], &[0.3]), 2.0);
        assert_eq!(f.eval(&[0.0], &[5.0]), 3.0);
        assert!((f.eval(&[0.0], &[0.25]) - 2.25).abs() < 1e-15);
    }
}
