//! Generalized Young functions G(x, y, t) = ∫₀ᵗ g(x, y, τ) dτ.
//!
//! Each variant has a closed form for G and its density g; nothing here
//! integrates g numerically. Points are passed as slices of length n.

mod field;
mod presets;
mod structure;

use std::fmt;
use std::sync::Arc;

pub use field::{CoefficientField, ExponentField, Field, FieldShape};
pub use presets::{builtin_specs, preset, PRESET_IDS};
pub use structure::{verify_structure, PropertyCheck, StructurePlan, StructureReport};

use crate::error::{ensure_nonneg, Error, Result};

/// Growth constants: `C₁ ≤ G(x,y,1) ≤ C₂` and `p⁻ ≤ t g / G ≤ p⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBounds {
    pub p_minus: f64,
    pub p_plus: f64,
    pub c1: f64,
    pub c2: f64,
}

impl GrowthBounds {
    pub fn new(p_minus: f64, p_plus: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(p_minus > 1.0 && p_minus <= p_plus && p_plus.is_finite()) {
            return Err(Error::Domain(format!(
                "growth exponents must satisfy 1 < p- <= p+ < inf, got ({p_minus}, {p_plus})"
            )));
        }
        if !(c1 > 0.0 && c1 <= c2 && c2.is_finite()) {
            return Err(Error::Domain(format!(
                "bound constants must satisfy 0 < C1 <= C2 < inf, got ({c1}, {c2})"
            )));
        }
        Ok(Self { p_minus, p_plus, c1, c2 })
    }

    /// `max{t^{p⁻}, t^{p⁺}}`
    #[inline]
    pub fn max_pow(&self, t: f64) -> f64 {
        t.powf(self.p_minus).max(t.powf(self.p_plus))
    }

    /// `min{t^{p⁻}, t^{p⁺}}`
    #[inline]
    pub fn min_pow(&self, t: f64) -> f64 {
        t.powf(self.p_minus).min(t.powf(self.p_plus))
    }
}

/// A Young function of t alone, used by the space-independent variant.
pub trait ScalarYoung: Send + Sync {
    fn name(&self) -> &str;
    fn value(&self, t: f64) -> f64;
    fn density(&self, t: f64) -> f64;
    /// Tight `(p⁻, p⁺)` for this function.
    fn exponents(&self) -> (f64, f64);
}

/// `A(t) = t^p log(1 + t)`.
#[derive(Debug, Clone, Copy)]
pub struct PowerLog1p {
    pub p: f64,
}

impl ScalarYoung for PowerLog1p {
    fn name(&self) -> &str {
        "powlog1p"
    }

    fn value(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            t.powf(self.p) * t.ln_1p()
        }
    }

    fn density(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            self.p * t.powf(self.p - 1.0) * t.ln_1p() + t.powf(self.p) / (1.0 + t)
        }
    }

    // t A'/A = p + t / ((1 + t) log(1 + t)), which lies in (p, p + 1).
    fn exponents(&self) -> (f64, f64) {
        (self.p, self.p + 1.0)
    }
}

#[derive(Clone)]
pub enum YoungKind {
    /// `t^p`
    Power { p: f64 },
    /// `a(x,y) t^p (log⁺ t + 1)`
    PowerLog { p: f64, coefficient: CoefficientField },
    /// `t^q + a(x,y) t^p`
    DoublePhase { q: f64, p: f64, coefficient: CoefficientField },
    /// `a(x,y) t^{p(x,y)}`
    VariableExponent { exponent: ExponentField, coefficient: CoefficientField },
    /// `A(t)`
    SpaceFree(Arc<dyn ScalarYoung>),
}

impl fmt::Debug for YoungKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YoungKind::Power { p } => f.debug_struct("Power").field("p", p).finish(),
            YoungKind::PowerLog { p, coefficient } => f
                .debug_struct("PowerLog")
                .field("p", p)
                .field("coefficient", coefficient)
                .finish(),
            YoungKind::DoublePhase { q, p, coefficient } => f
                .debug_struct("DoublePhase")
                .field("q", q)
                .field("p", p)
                .field("coefficient", coefficient)
                .finish(),
            YoungKind::VariableExponent { exponent, coefficient } => f
                .debug_struct("VariableExponent")
                .field("exponent", exponent)
                .field("coefficient", coefficient)
                .finish(),
            YoungKind::SpaceFree(a) => f.debug_tuple("SpaceFree").field(&a.name()).finish(),
        }
    }
}

/// A generalized Young function together with its declared growth bounds.
#[derive(Debug, Clone)]
pub struct YoungSpec {
    kind: YoungKind,
    bounds: GrowthBounds,
}

impl YoungSpec {
    pub fn power(p: f64) -> Result<Self> {
        let bounds = GrowthBounds::new(p, p, 1.0, 1.0)?;
        Ok(Self { kind: YoungKind::Power { p }, bounds })
    }

    /// Declared bounds `p⁻ = p`, `p⁺ = p + 1`: for t > 1 the ratio
    /// `t g / G = p + 1 / (log t + 1)` reaches p + 1 at t = 1⁺.
    pub fn power_log(p: f64, coefficient: CoefficientField) -> Result<Self> {
        check_coefficient(&coefficient)?;
        let bounds = GrowthBounds::new(p, p + 1.0, coefficient.lower(), coefficient.upper())?;
        Ok(Self {
            kind: YoungKind::PowerLog { p, coefficient },
            bounds,
        })
    }

    pub fn double_phase(q: f64, p: f64, coefficient: CoefficientField) -> Result<Self> {
        check_coefficient(&coefficient)?;
        if q > p {
            return Err(Error::Domain(format!("double phase needs q <= p, got q={q}, p={p}")));
        }
        let bounds = GrowthBounds::new(q, p, 1.0 + coefficient.lower(), 1.0 + coefficient.upper())?;
        Ok(Self {
            kind: YoungKind::DoublePhase { q, p, coefficient },
            bounds,
        })
    }

    pub fn variable_exponent(exponent: ExponentField, coefficient: CoefficientField) -> Result<Self> {
        check_coefficient(&coefficient)?;
        let bounds = GrowthBounds::new(
            exponent.lower(),
            exponent.upper(),
            coefficient.lower(),
            coefficient.upper(),
        )?;
        Ok(Self {
            kind: YoungKind::VariableExponent { exponent, coefficient },
            bounds,
        })
    }

    pub fn space_free(a: Arc<dyn ScalarYoung>) -> Result<Self> {
        let (pm, pp) = a.exponents();
        let g1 = a.value(1.0);
        let bounds = GrowthBounds::new(pm, pp, g1, g1)?;
        Ok(Self { kind: YoungKind::SpaceFree(a), bounds })
    }

    /// Replace the declared bounds. Nothing is re-validated against the
    /// function itself; [`verify_structure`] does that.
    pub fn with_bounds(mut self, bounds: GrowthBounds) -> Self {
        self.bounds = bounds;
        self
    }

    pub fn kind(&self) -> &YoungKind {
        &self.kind
    }

    pub fn bounds(&self) -> &GrowthBounds {
        &self.bounds
    }

    pub fn label(&self) -> &'static str {
        match self.kind {
            YoungKind::Power { .. } => "power",
            YoungKind::PowerLog { .. } => "powerlog",
            YoungKind::DoublePhase { .. } => "doublephase",
            YoungKind::VariableExponent { .. } => "varexp",
            YoungKind::SpaceFree(_) => "space-free",
        }
    }

    /// G(x, y, t). Negative t is a domain error.
    pub fn eval_g_big(&self, x: &[f64], y: &[f64], t: f64) -> Result<f64> {
        ensure_nonneg(t)?;
        Ok(self.value(x, y, t))
    }

    /// g(x, y, t), right-continuous.
    pub fn eval_g(&self, x: &[f64], y: &[f64], t: f64) -> Result<f64> {
        ensure_nonneg(t)?;
        Ok(self.density(x, y, t))
    }

    /// Ḡ(x, t) = G(x, x, t).
    pub fn eval_g_bar(&self, x: &[f64], t: f64) -> Result<f64> {
        ensure_nonneg(t)?;
        Ok(self.value(x, x, t))
    }

    /// Unchecked G for hot loops; `t` must be nonnegative.
    #[inline]
    pub fn value(&self, x: &[f64], y: &[f64], t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match &self.kind {
            YoungKind::Power { p } => t.powf(*p),
            YoungKind::PowerLog { p, coefficient } => {
                let lp = if t > 1.0 { t.ln() } else { 0.0 };
                coefficient.eval(x, y) * t.powf(*p) * (lp + 1.0)
            }
            YoungKind::DoublePhase { q, p, coefficient } => {
                t.powf(*q) + coefficient.eval(x, y) * t.powf(*p)
            }
            YoungKind::VariableExponent { exponent, coefficient } => {
                coefficient.eval(x, y) * t.powf(exponent.eval(x, y))
            }
            YoungKind::SpaceFree(a) => a.value(t),
        }
    }

    /// Unchecked g. At the kink of the logarithmic variant (t = 1) the right
    /// limit is returned.
    #[inline]
    pub fn density(&self, x: &[f64], y: &[f64], t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match &self.kind {
            YoungKind::Power { p } => p * t.powf(p - 1.0),
            YoungKind::PowerLog { p, coefficient } => {
                let a = coefficient.eval(x, y);
                if t >= 1.0 {
                    a * t.powf(p - 1.0) * (p * (t.ln() + 1.0) + 1.0)
                } else {
                    a * p * t.powf(p - 1.0)
                }
            }
            YoungKind::DoublePhase { q, p, coefficient } => {
                q * t.powf(q - 1.0) + coefficient.eval(x, y) * p * t.powf(p - 1.0)
            }
            YoungKind::VariableExponent { exponent, coefficient } => {
                let e = exponent.eval(x, y);
                coefficient.eval(x, y) * e * t.powf(e - 1.0)
            }
            YoungKind::SpaceFree(a) => a.density(t),
        }
    }

    /// Values of t where g has a jump (the integrand of a t-integral is
    /// only piecewise smooth there).
    pub fn kink(&self) -> Option<f64> {
        match self.kind {
            YoungKind::PowerLog { .. } => Some(1.0),
            _ => None,
        }
    }

    /// Complementary function G̃(x, y, t) = sup_{w ≥ 0} (t w − G(x, y, w)).
    ///
    /// The supremum is attained at w* = inf{w : g(w) ≥ t}, located by
    /// bisection on the monotone density.
    pub fn complementary(&self, x: &[f64], y: &[f64], t: f64) -> Result<f64> {
        ensure_nonneg(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        let g = |w: f64| self.density(x, y, w);
        let mut lo = 0.0;
        let mut hi = 1.0;
        let mut expansions = 0;
        while g(hi) < t {
            lo = hi;
            hi *= 2.0;
            expansions += 1;
            if expansions > 1000 || !hi.is_finite() {
                return Err(Error::BracketExpansion { target: t });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) >= t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let w = hi;
        Ok((t * w - self.value(x, y, w)).max(0.0))
    }
}

fn check_coefficient(a: &CoefficientField) -> Result<()> {
    if a.lower() > 0.0 && a.upper().is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "coefficient bounds must satisfy 0 < a- <= a+ < inf, got ({}, {})",
            a.lower(),
            a.upper()
        )))
    }
}
