//! The limit density `H₀(x,t) = ∫₀¹ ∫_{S^{n−1}} G(x,x,t|w_n|r) dS dr/r`.
//!
//! The generic path integrates numerically for any [`YoungSpec`]; the
//! closed-form variants cover the power, double-phase, logarithmic and
//! variable-exponent families.

use crate::error::{ensure_nonneg, Error, Result};
use crate::exec::{map_indexed, Exec};
use crate::quadrature::{pairwise_sum, tensor_nodes, GaussLegendre};
use crate::sphere::{moment_k, surface_measure, SphereRule};
use crate::test_functions::TestFunction;
use crate::young::{YoungKind, YoungSpec};

pub const DEFAULT_RADIAL_LEVELS: usize = 40;
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;
const RADIAL_GL_ORDER: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum H0Variant {
    Generic,
    ClosedPower,
    ClosedLog,
    ClosedVarExp,
    /// `2 ∫₀¹ G(x,x,tr) dr/r`, the limit for axis-aligned difference quotients.
    Anisotropic,
}

impl H0Variant {
    /// The closed form matching `spec`, or [`H0Variant::Generic`] when none exists.
    pub fn closed_for(spec: &YoungSpec) -> Self {
        match spec.kind() {
            YoungKind::Power { .. } | YoungKind::DoublePhase { .. } => Self::ClosedPower,
            YoungKind::PowerLog { .. } => Self::ClosedLog,
            YoungKind::VariableExponent { .. } => Self::ClosedVarExp,
            YoungKind::SpaceFree(_) => Self::Generic,
        }
    }

    fn supports(self, spec: &YoungSpec) -> bool {
        match self {
            Self::Generic | Self::Anisotropic => true,
            Self::ClosedPower => matches!(
                spec.kind(),
                YoungKind::Power { .. } | YoungKind::DoublePhase { .. }
            ),
            Self::ClosedLog => matches!(spec.kind(), YoungKind::PowerLog { .. }),
            Self::ClosedVarExp => matches!(
                spec.kind(),
                YoungKind::VariableExponent { .. } | YoungKind::Power { .. }
            ),
        }
    }
}

#[derive(Clone)]
pub struct H0Evaluator {
    spec: YoungSpec,
    rule: SphereRule,
    variant: H0Variant,
    radial_levels: usize,
    tail_tol: f64,
    gl: GaussLegendre,
    /// `K_{n,κ}` for the fixed exponents of the closed power forms.
    k_cache: Vec<(f64, f64)>,
}

impl std::fmt::Debug for H0Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("H0Evaluator")
            .field("spec", &self.spec.label())
            .field("dim", &self.rule.dim())
            .field("variant", &self.variant)
            .field("radial_levels", &self.radial_levels)
            .finish()
    }
}

impl H0Evaluator {
    pub fn new(spec: YoungSpec, rule: SphereRule, variant: H0Variant) -> Result<Self> {
        if !variant.supports(&spec) {
            return Err(Error::SpecMismatch(format!(
                "variant {variant:?} does not apply to {}",
                spec.label()
            )));
        }
        let mut k_cache = Vec::new();
        match spec.kind() {
            YoungKind::Power { p } => k_cache.push((*p, moment_k(*p, &rule)?)),
            YoungKind::DoublePhase { q, p, .. } => {
                k_cache.push((*q, moment_k(*q, &rule)?));
                k_cache.push((*p, moment_k(*p, &rule)?));
            }
            _ => {}
        }
        Ok(Self {
            spec,
            rule,
            variant,
            radial_levels: DEFAULT_RADIAL_LEVELS,
            tail_tol: DEFAULT_TAIL_TOL,
            gl: GaussLegendre::new(RADIAL_GL_ORDER),
            k_cache,
        })
    }

    /// Closed form when available, otherwise generic quadrature.
    pub fn preferred(spec: YoungSpec, rule: SphereRule) -> Result<Self> {
        let v = H0Variant::closed_for(&spec);
        Self::new(spec, rule, v)
    }

    pub fn with_radial_levels(mut self, levels: usize) -> Result<Self> {
        if levels < 8 {
            return Err(Error::Domain(format!("radial_levels must be at least 8, got {levels}")));
        }
        self.radial_levels = levels;
        Ok(self)
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn spec(&self) -> &YoungSpec {
        &self.spec
    }

    pub fn rule(&self) -> &SphereRule {
        &self.rule
    }

    pub fn variant(&self) -> H0Variant {
        self.variant
    }

    pub fn dim(&self) -> usize {
        self.rule.dim()
    }

    fn k_of(&self, kappa: f64) -> f64 {
        self.k_cache
            .iter()
            .find(|(k, _)| *k == kappa)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| moment_k(kappa, &self.rule).unwrap_or(f64::NAN))
    }

    /// `H₀(x, t)`.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<f64> {
        ensure_nonneg(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        match self.variant {
            H0Variant::Generic => self.generic(x, t),
            H0Variant::Anisotropic => {
                let (v, _) = self.radial(x, t)?;
                Ok(2.0 * v)
            }
            H0Variant::ClosedPower => Ok(match self.spec.kind() {
                YoungKind::Power { p } => self.k_of(*p) * t.powf(*p),
                YoungKind::DoublePhase { q, p, coefficient } => {
                    self.k_of(*q) * t.powf(*q) + coefficient.eval(x, x) * self.k_of(*p) * t.powf(*p)
                }
                _ => unreachable!("checked in constructor"),
            }),
            H0Variant::ClosedLog => match self.spec.kind() {
                YoungKind::PowerLog { p, coefficient } => {
                    Ok(h0_closed_log(coefficient.eval(x, x), *p, t, &self.rule))
                }
                _ => unreachable!("checked in constructor"),
            },
            H0Variant::ClosedVarExp => match self.spec.kind() {
                YoungKind::VariableExponent { exponent, coefficient } => h0_closed_varexp(
                    coefficient.eval(x, x),
                    exponent.eval(x, x),
                    t,
                    &self.rule,
                ),
                YoungKind::Power { p } => Ok(self.k_of(*p) * t.powf(*p)),
                _ => unreachable!("checked in constructor"),
            },
        }
    }

    fn generic(&self, x: &[f64], t: f64) -> Result<f64> {
        let n = self.rule.dim();
        let mut parts = Vec::with_capacity(self.rule.len());
        let mut tail = 0.0;
        for (w, wt) in self.rule.iter() {
            let c = t * w[n - 1].abs();
            if c == 0.0 {
                continue;
            }
            let (v, tb) = self.radial_raw(x, c);
            parts.push(wt * v);
            tail += wt * tb;
        }
        let value = pairwise_sum(&parts);
        self.check_tail(value, tail)?;
        Ok(value)
    }

    /// `∫₀¹ G(x,x,c r) dr/r` with its tail check.
    fn radial(&self, x: &[f64], c: f64) -> Result<(f64, f64)> {
        let (v, tb) = self.radial_raw(x, c);
        self.check_tail(v, tb)?;
        Ok((v, tb))
    }

    fn check_tail(&self, value: f64, tail: f64) -> Result<()> {
        if tail > self.tail_tol * value.max(f64::MIN_POSITIVE) {
            return Err(Error::InsufficientRadialDepth { bound: tail, tol: self.tail_tol });
        }
        Ok(())
    }

    /// Dyadic panels `[2^{-k-1}, 2^{-k}]` with a break where `c r` crosses
    /// the kink of g. Returns the value and the bound on the dropped
    /// `(0, 2^{-L})` piece.
    fn radial_raw(&self, x: &[f64], c: f64) -> (f64, f64) {
        let kink_r = self.spec.kink().map(|k| k / c).filter(|r| *r > 0.0 && *r < 1.0);
        let f = |r: f64| self.spec.value(x, x, c * r) / r;
        let mut parts = Vec::with_capacity(self.radial_levels + 1);
        let mut hi = 1.0;
        for _ in 0..self.radial_levels {
            let lo = 0.5 * hi;
            match kink_r {
                Some(k) if k > lo && k < hi => {
                    parts.push(self.gl.integrate(lo, k, f) + self.gl.integrate(k, hi, f));
                }
                _ => parts.push(self.gl.integrate(lo, hi, f)),
            }
            hi = lo;
        }
        let b = self.spec.bounds();
        let tail = b.c2 * b.max_pow(c) * hi.powf(b.p_minus) / b.p_minus;
        (pairwise_sum(&parts), tail)
    }
}

/// `H₀(x,t)` through the evaluator's variant.
pub fn h0_eval(ev: &H0Evaluator, x: &[f64], t: f64) -> Result<f64> {
    ev.eval(x, t)
}

/// Logarithmic family `G = a t^p (log⁺t + 1)`, assembled node by node from
/// the radial closed forms `∫₀¹ G(c r) dr/r` with `c = t|w_n|`.
pub fn h0_closed_log(a_diag: f64, p: f64, t: f64, rule: &SphereRule) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let n = rule.dim();
    let parts: Vec<f64> = rule
        .iter()
        .map(|(w, wt)| {
            let c = t * w[n - 1].abs();
            if c == 0.0 {
                0.0
            } else if c <= 1.0 {
                wt * c.powf(p) / p
            } else {
                let cp = c.powf(p);
                wt * cp / p * ((p - 1.0) / p + 1.0 / (p * cp) + c.ln())
            }
        })
        .collect();
    a_diag * pairwise_sum(&parts)
}

/// `a(x,x) K_{n,p(x,x)} t^{p(x,x)}`.
pub fn h0_closed_varexp(a_diag: f64, p_diag: f64, t: f64, rule: &SphereRule) -> Result<f64> {
    ensure_nonneg(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(a_diag * moment_k(p_diag, rule)? * t.powf(p_diag))
}

/// `2 ∫₀¹ G(x,x,tr) dr/r` on the graded radial mesh.
pub fn h0_aniso(spec: &YoungSpec, x: &[f64], t: f64, radial_levels: usize) -> Result<f64> {
    let rule = SphereRule::new(1, 1)?;
    H0Evaluator::new(spec.clone(), rule, H0Variant::Anisotropic)?
        .with_radial_levels(radial_levels)?
        .eval(x, t)
}

/// `(∫|w_n|^{p⁺} dS / p⁺, nω_n / p⁻)`, the constants bracketing `H₀ / Ḡ`.
pub fn sandwich_constants(spec: &YoungSpec, rule: &SphereRule) -> Result<(f64, f64)> {
    let b = spec.bounds();
    let lower = moment_k(b.p_plus, rule)?;
    let upper = surface_measure(rule.dim())? / b.p_minus;
    Ok((lower, upper))
}

/// Composite Gauss-Legendre rule on the support box of a test function.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpatialQuad {
    pub panels: usize,
    pub order: usize,
    #[serde(default)]
    pub exec: Exec,
}

impl Default for SpatialQuad {
    fn default() -> Self {
        Self { panels: 16, order: 8, exec: Exec::default() }
    }
}

impl SpatialQuad {
    /// Integrate `f(x)` over the support box of `u`.
    pub fn integrate<F>(&self, u: &TestFunction, f: F) -> Result<f64>
    where
        F: Fn(&[f64]) -> Result<f64> + Sync + Send,
    {
        if u.is_zero() {
            return Ok(0.0);
        }
        let gl = GaussLegendre::new(self.order);
        let nodes = tensor_nodes(u.bbox(), self.panels, &gl);
        let n = u.dim;
        let vals = map_indexed(self.exec, nodes.len(), |i| {
            let (x, w) = &nodes[i];
            f(&x[..n]).map(|v| w * v)
        });
        let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
        Ok(pairwise_sum(&vals))
    }
}

/// `∫ H₀(x, |∇u(x)|) dx`.
pub fn grad_energy(ev: &H0Evaluator, u: &TestFunction, quad: &SpatialQuad) -> Result<f64> {
    check_dim(ev, u)?;
    quad.integrate(u, |x| ev.eval(x, u.grad_norm(x)))
}

/// `∫ H₀(x, |∂u/∂x_k|) dx` for the axis `k ∈ 1..=n`.
pub fn grad_energy_axis(ev: &H0Evaluator, u: &TestFunction, k: usize, quad: &SpatialQuad) -> Result<f64> {
    check_dim(ev, u)?;
    if k == 0 || k > u.dim {
        return Err(Error::Domain(format!("axis {k} out of range for n = {}", u.dim)));
    }
    quad.integrate(u, |x| ev.eval(x, u.gradient(x)[k - 1].abs()))
}

fn check_dim(ev: &H0Evaluator, u: &TestFunction) -> Result<()> {
    if ev.variant != H0Variant::Anisotropic && ev.dim() != u.dim {
        return Err(Error::Domain(format!(
            "evaluator is for n = {} but the test function has n = {}",
            ev.dim(),
            u.dim
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::moment_k_exact;
    use crate::test_functions::by_id;
    use crate::young::{Field, FieldShape, PowerLog1p};
    use std::sync::Arc;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn power_closed_and_generic() {
        let spec = YoungSpec::power(2.0).unwrap();
        let rule = SphereRule::new(1, 1).unwrap();
        let g = H0Evaluator::new(spec.clone(), rule.clone(), H0Variant::Generic).unwrap();
        let c = H0Evaluator::new(spec, rule, H0Variant::ClosedPower).unwrap();
        assert!(rel(g.eval(&[0.0], 1.0).unwrap(), 1.0) < 1e-12);
        assert_eq!(c.eval(&[0.0], 1.0).unwrap(), 1.0);
        assert_eq!(g.eval(&[0.0], 0.0).unwrap(), 0.0);
    }

    #[test]
    fn power_homogeneity() {
        let spec = YoungSpec::power(2.7).unwrap();
        let rule = SphereRule::new(2, 1024).unwrap();
        let g = H0Evaluator::new(spec, rule, H0Variant::Generic).unwrap();
        let a = g.eval(&[0.0, 0.0], 0.8).unwrap();
        let b = g.eval(&[0.0, 0.0], 0.8 * 3.0).unwrap();
        assert!(rel(b, 3f64.powf(2.7) * a) < 1e-9);
        assert!(rel(a, moment_k_exact(2, 2.7).unwrap() * 0.8f64.powf(2.7)) < 1e-6);
    }

    #[test]
    fn log_branches() {
        let rule = SphereRule::new(2, 128).unwrap();
        // t ≤ 1: every node on the first branch
        let v = h0_closed_log(1.3, 2.0, 0.7, &rule);
        let k = moment_k(2.0, &rule).unwrap();
        assert!(rel(v, 1.3 * 0.49 * k) < 1e-14);
        assert_eq!(h0_closed_log(1.0, 2.0, 0.0, &rule), 0.0);

        let spec = YoungSpec::power_log(2.0, Field::constant(1.0)).unwrap();
        let r1 = SphereRule::new(1, 1).unwrap();
        let g = H0Evaluator::new(spec, r1.clone(), H0Variant::Generic).unwrap();
        let closed = h0_closed_log(1.0, 2.0, 2.0, &r1);
        // per node: 4/2 (1/2 + 1/8 + ln 2)
        let node = 2.0 * (0.5 + 0.125 + 2f64.ln());
        assert!(rel(closed, 2.0 * node) < 1e-14);
        assert!(rel(g.eval(&[0.0], 2.0).unwrap(), closed) < 1e-6);
    }

    #[test]
    fn varexp_examples() {
        let r1 = SphereRule::new(1, 1).unwrap();
        assert!(rel(h0_closed_varexp(1.0, 2.0, 3.0, &r1).unwrap(), 9.0) < 1e-14);
        assert_eq!(h0_closed_varexp(1.0, 2.0, 0.0, &r1).unwrap(), 0.0);
        let spec = YoungSpec::variable_exponent(
            Field::builtin(FieldShape::SmoothBumpModulated { base: 2.0, amp: 0.5, width: 1.0 }),
            Field::constant(1.0),
        )
        .unwrap();
        let rule = SphereRule::new(2, 256).unwrap();
        let g = H0Evaluator::new(spec.clone(), rule.clone(), H0Variant::Generic).unwrap();
        let c = H0Evaluator::new(spec, rule, H0Variant::ClosedVarExp).unwrap();
        let x = [0.3, -0.4];
        assert!(rel(g.eval(&x, 1.7).unwrap(), c.eval(&x, 1.7).unwrap()) < 1e-6);
    }

    #[test]
    fn aniso_examples() {
        let p = YoungSpec::power(3.0).unwrap();
        assert!(rel(h0_aniso(&p, &[0.0], 2.0, 40).unwrap(), 2.0 / 3.0 * 8.0) < 1e-12);
        assert_eq!(h0_aniso(&p, &[0.0], 0.0, 40).unwrap(), 0.0);
        let dp = YoungSpec::double_phase(2.0, 3.0, Field::constant(1.0)).unwrap();
        assert!(rel(h0_aniso(&dp, &[0.0], 1.0, 40).unwrap(), 5.0 / 3.0) < 1e-12);
    }

    #[test]
    fn sandwich_examples() {
        let s = YoungSpec::power(2.0).unwrap();
        let (lo, hi) = sandwich_constants(&s, &SphereRule::new(1, 1).unwrap()).unwrap();
        assert!(rel(lo, 1.0) < 1e-12 && rel(hi, 1.0) < 1e-12);
        let (lo, hi) = sandwich_constants(&s, &SphereRule::new(2, 64).unwrap()).unwrap();
        assert!(rel(lo, std::f64::consts::FRAC_PI_2) < 1e-12);
        assert!(rel(hi, std::f64::consts::PI) < 1e-12);
    }

    #[test]
    fn insufficient_depth_is_reported() {
        let spec = YoungSpec::power(1.05).unwrap();
        let ev = H0Evaluator::new(spec, SphereRule::new(1, 1).unwrap(), H0Variant::Generic)
            .unwrap()
            .with_radial_levels(8)
            .unwrap();
        assert!(matches!(ev.eval(&[0.0], 1.0), Err(Error::InsufficientRadialDepth { .. })));
    }

    #[test]
    fn space_free_is_generic_only() {
        let spec = YoungSpec::space_free(Arc::new(PowerLog1p { p: 2.0 })).unwrap();
        let rule = SphereRule::new(1, 1).unwrap();
        assert_eq!(H0Variant::closed_for(&spec), H0Variant::Generic);
        assert!(H0Evaluator::new(spec.clone(), rule.clone(), H0Variant::ClosedLog).is_err());
        let ev = H0Evaluator::preferred(spec, rule).unwrap();
        let h = ev.eval(&[0.0], 1.0).unwrap();
        // ∫₀¹ r ln(1+r) dr per node, two nodes
        let exact = 2.0 * 0.25;
        assert!(rel(h, exact) < 1e-10, "{h}");
    }

    #[test]
    fn grad_energy_matches_quadrature_oracle() {
        let u = by_id("cosbump", 1).unwrap();
        let ev = H0Evaluator::preferred(YoungSpec::power(2.0).unwrap(), SphereRule::new(1, 1).unwrap())
            .unwrap();
        let e = grad_energy(&ev, &u, &SpatialQuad::default()).unwrap();
        let r = crate::test_functions::DEFAULT_RADIUS;
        assert!(rel(e, std::f64::consts::PI.powi(2) / (4.0 * r)) < 1e-12);
        let z = by_id("zero", 1).unwrap();
        assert_eq!(grad_energy(&ev, &z, &SpatialQuad::default()).unwrap(), 0.0);
    }
}
