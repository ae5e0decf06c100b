//! Luxemburg norms `inf{λ > 0 : m(u/λ) ≤ 1}` by monotone bisection in λ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limit::{H0Evaluator, SpatialQuad};
use crate::modular::{local_modular_amp, modular_js_amp, LocalModular, SamplingPlan};
use crate::test_functions::TestFunction;
use crate::young::YoungSpec;

/// Relative slack tolerated before the evaluator is declared non-monotone.
const MONOTONE_SLACK: f64 = 1e-10;
const MAX_EXPANSIONS: usize = 1100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormTarget {
    /// `‖u‖_Ḡ`
    LebesgueOrlicz,
    /// `‖∇u‖_{H₀}`
    Gradient,
    /// `[u]_{s,G}`
    Seminorm,
    /// `[[u]]_{s,G}`, defined through `(1−s) J_s`.
    ScaledSeminorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormQuery {
    pub target: NormTarget,
    /// Relative bracket width at termination.
    pub tol: f64,
    pub max_iterations: usize,
}

impl NormQuery {
    pub fn new(target: NormTarget) -> Self {
        Self { target, tol: 1e-8, max_iterations: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    /// Final bracket `[lo, hi]` with `m(u/lo) > 1 ≥ m(u/hi)`; `value = hi`.
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Bracket width plus the first-order effect of the evaluator's own
    /// error, `Δλ ≈ ΔJ·λ/(p⁻ J)`.
    pub error_estimate: f64,
}

impl NormResult {
    fn zero() -> Self {
        Self { value: 0.0, bracket: (0.0, 0.0), iterations: 0, error_estimate: 0.0 }
    }
}

/// One evaluation of `λ ↦ m(u/λ)` together with an absolute error estimate.
#[derive(Debug, Clone, Copy)]
pub struct ModularSample {
    pub value: f64,
    pub error: f64,
}

/// Bisection on `λ ↦ m(u/λ)`, which must be nonincreasing. `p_minus` only
/// feeds the error estimate.
pub fn luxemburg<F>(query: &NormQuery, p_minus: f64, mut eval: F) -> Result<NormResult>
where
    F: FnMut(f64) -> Result<ModularSample>,
{
    if !(query.tol > 0.0) {
        return Err(Error::Domain(format!("bisection tol must be positive, got {}", query.tol)));
    }
    let at_one = eval(1.0)?;
    if at_one.value == 0.0 {
        return Ok(NormResult::zero());
    }
    let nonmono = |lambda: f64| Error::NonMonotone { lambda };
    let increases = |before: f64, after: f64| after > before * (1.0 + MONOTONE_SLACK);

    // (lo, m(lo)) with m > 1 and (hi, m(hi)) with m ≤ 1
    let (mut lo, mut m_lo, mut hi, mut m_hi);
    if at_one.value <= 1.0 {
        hi = 1.0;
        m_hi = at_one;
        lo = 0.5;
        let mut k = 0;
        loop {
            let m = eval(lo)?;
            if increases(m.value, m_hi.value) {
                return Err(nonmono(lo));
            }
            if m.value > 1.0 {
                m_lo = m;
                break;
            }
            hi = lo;
            m_hi = m;
            lo *= 0.5;
            k += 1;
            if k > MAX_EXPANSIONS || lo == 0.0 {
                return Err(Error::BracketExpansion { target: 1.0 });
            }
        }
    } else {
        lo = 1.0;
        m_lo = at_one;
        hi = 2.0;
        let mut k = 0;
        loop {
            let m = eval(hi)?;
            if increases(m_lo.value, m.value) {
                return Err(nonmono(hi));
            }
            if m.value <= 1.0 {
                m_hi = m;
                break;
            }
            lo = hi;
            m_lo = m;
            hi *= 2.0;
            k += 1;
            if k > MAX_EXPANSIONS || !hi.is_finite() {
                return Err(Error::BracketExpansion { target: 1.0 });
            }
        }
    }

    let mut iterations = 0;
    while hi - lo > query.tol * hi {
        if iterations >= query.max_iterations {
            return Err(Error::MaxIterations { lo, hi });
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let m = eval(mid)?;
        if increases(m_lo.value, m.value) || increases(m.value, m_hi.value) {
            return Err(nonmono(mid));
        }
        if m.value > 1.0 {
            lo = mid;
            m_lo = m;
        } else {
            hi = mid;
            m_hi = m;
        }
    }
    let err = (hi - lo) + m_hi.error.max(m_lo.error) * hi / p_minus;
    Ok(NormResult { value: hi, bracket: (lo, hi), iterations, error_estimate: err })
}

/// `[[u]]_{s,G}`.
pub fn scaled_seminorm(
    spec: &YoungSpec,
    u: &TestFunction,
    s: f64,
    plan: &SamplingPlan,
    query: &NormQuery,
) -> Result<NormResult> {
    luxemburg(query, spec.bounds().p_minus, |lambda| {
        let r = modular_js_amp(spec, u, 1.0 / lambda, s, plan)?;
        Ok(ModularSample {
            value: r.scaled_value,
            error: r.scaled_tail_bound + r.scaled_stderr.unwrap_or(0.0),
        })
    })
}

/// `[u]_{s,G}`.
pub fn seminorm(
    spec: &YoungSpec,
    u: &TestFunction,
    s: f64,
    plan: &SamplingPlan,
    query: &NormQuery,
) -> Result<NormResult> {
    luxemburg(query, spec.bounds().p_minus, |lambda| {
        let r = modular_js_amp(spec, u, 1.0 / lambda, s, plan)?;
        Ok(ModularSample { value: r.value, error: r.tail_bound + r.mc_stderr.unwrap_or(0.0) })
    })
}

/// `‖u‖_Ḡ`.
pub fn orlicz_norm(spec: &YoungSpec, u: &TestFunction, quad: &SpatialQuad, query: &NormQuery) -> Result<NormResult> {
    luxemburg(query, spec.bounds().p_minus, |lambda| {
        let v = local_modular_amp(LocalModular::Diagonal(spec), u, 1.0 / lambda, quad)?;
        Ok(ModularSample { value: v, error: 0.0 })
    })
}

/// `‖∇u‖_{H₀}`.
pub fn gradient_norm(ev: &H0Evaluator, u: &TestFunction, quad: &SpatialQuad, query: &NormQuery) -> Result<NormResult> {
    luxemburg(query, ev.spec().bounds().p_minus, |lambda| {
        let v = local_modular_amp(LocalModular::Limit(ev), u, 1.0 / lambda, quad)?;
        Ok(ModularSample { value: v, error: 0.0 })
    })
}

/// Outcome of the two implications between a modular and its norm:
/// `m ≤ C ⟹ ‖·‖ ≤ C^{1/p⁻}` and `‖·‖ ≤ C ⟹ m ≤ C^{p⁺}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub c: f64,
    pub modular: f64,
    pub norm: f64,
    /// `None` when the premise does not hold.
    pub norm_bound_holds: Option<bool>,
    pub modular_bound_holds: Option<bool>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.norm_bound_holds != Some(false) && self.modular_bound_holds != Some(false)
    }
}

/// Checks both implications for the field `amp·|∇u|` under `H₀`.
pub fn check_modular_norm_equivalence(
    ev: &H0Evaluator,
    u: &TestFunction,
    amp: f64,
    c: f64,
    quad: &SpatialQuad,
    tol: f64,
) -> Result<EquivalenceReport> {
    if !(c >= 1.0) {
        return Err(Error::Domain(format!("equivalence constant must be at least 1, got {c}")));
    }
    let b = ev.spec().bounds();
    let modular = local_modular_amp(LocalModular::Limit(ev), u, amp, quad)?;
    let query = NormQuery::new(NormTarget::Gradient);
    let norm = luxemburg(&query, b.p_minus, |lambda| {
        let v = local_modular_amp(LocalModular::Limit(ev), u, amp / lambda, quad)?;
        Ok(ModularSample { value: v, error: 0.0 })
    })?
    .value;
    let norm_bound_holds = (modular <= c).then(|| norm <= c.powf(1.0 / b.p_minus) * (1.0 + tol));
    let modular_bound_holds = (norm <= c).then(|| modular <= c.powf(b.p_plus) * (1.0 + tol));
    Ok(EquivalenceReport { c, modular, norm, norm_bound_holds, modular_bound_holds })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub s: f64,
    pub scaled_seminorm: f64,
    pub gradient_norm: f64,
    pub ratio: f64,
}

/// `[[u]]_{s,G}` against `‖∇u‖_{H₀}` along `s_grid`.
pub fn norm_inequality_study(
    spec: &YoungSpec,
    ev: &H0Evaluator,
    u: &TestFunction,
    s_grid: &[f64],
    plan: &SamplingPlan,
    quad: &SpatialQuad,
) -> Result<Vec<NormRow>> {
    let g = gradient_norm(ev, u, quad, &NormQuery::new(NormTarget::Gradient))?.value;
    s_grid
        .iter()
        .map(|&s| {
            let v = scaled_seminorm(spec, u, s, plan, &NormQuery::new(NormTarget::ScaledSeminorm))?.value;
            let ratio = if g == 0.0 { 0.0 } else { v / g };
            Ok(NormRow { s, scaled_seminorm: v, gradient_norm: g, ratio })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limit::H0Variant;
    use crate::sphere::SphereRule;
    use crate::test_functions::by_id;
    use crate::young::Field;

    fn q() -> NormQuery {
        NormQuery::new(NormTarget::LebesgueOrlicz)
    }

    #[test]
    fn quadratic_explicit_root() {
        // m(u/λ) = 4/λ²
        let r = luxemburg(&q(), 2.0, |l| Ok(ModularSample { value: 4.0 / (l * l), error: 0.0 })).unwrap();
        assert!((r.value - 2.0).abs() <= 2.0 * 1e-8);
        let (lo, hi) = r.bracket;
        assert!(4.0 / (lo * lo) > 1.0 && 4.0 / (hi * hi) <= 1.0);
        let small = luxemburg(&q(), 2.0, |l| Ok(ModularSample { value: 1e-6 / (l * l), error: 0.0 })).unwrap();
        assert!((small.value - 1e-3).abs() <= 1e-3 * 1e-8);
    }

    #[test]
    fn zero_modular_gives_zero() {
        let r = luxemburg(&q(), 2.0, |_| Ok(ModularSample { value: 0.0, error: 0.0 })).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn non_monotone_is_rejected() {
        let e = luxemburg(&q(), 2.0, |l| Ok(ModularSample { value: 3.0 * l, error: 0.0 })).unwrap_err();
        assert!(matches!(e, Error::NonMonotone { .. }));
    }

    #[test]
    fn max_iterations_error() {
        let query = NormQuery { max_iterations: 3, ..q() };
        let e = luxemburg(&query, 2.0, |l| Ok(ModularSample { value: 5.0 / l, error: 0.0 })).unwrap_err();
        assert!(matches!(e, Error::MaxIterations { .. }));
    }

    #[test]
    fn pure_power_seminorm_is_explicit() {
        let u = by_id("cosbump", 1).unwrap();
        let spec = YoungSpec::power(2.0).unwrap();
        let plan = SamplingPlan::tensor(8, 8);
        let s = 0.9;
        let j = crate::modular::modular_js(&spec, &u, s, &plan).unwrap();
        let a = scaled_seminorm(&spec, &u, s, &plan, &NormQuery::new(NormTarget::ScaledSeminorm)).unwrap();
        assert!((a.value - j.scaled_value.sqrt()).abs() <= 2e-8 * a.value);
        let b = seminorm(&spec, &u, s, &plan, &NormQuery::new(NormTarget::Seminorm)).unwrap();
        assert!((b.value - j.value.sqrt()).abs() <= 2e-8 * b.value);
    }

    #[test]
    fn orlicz_norm_is_homogeneous() {
        let spec = YoungSpec::double_phase(2.0, 3.0, Field::constant(1.0)).unwrap();
        let u = by_id("polybump", 2).unwrap();
        let quad = SpatialQuad { panels: 6, order: 6, ..Default::default() };
        let a = orlicz_norm(&spec, &u, &quad, &q()).unwrap().value;
        let b = luxemburg(&q(), 2.0, |l| {
            let v = local_modular_amp(LocalModular::Diagonal(&spec), &u, 3.0 / l, &quad)?;
            Ok(ModularSample { value: v, error: 0.0 })
        })
        .unwrap()
        .value;
        assert!((b - 3.0 * a).abs() <= 3e-8 * b);
        // unit-ball correspondence
        let m1 = local_modular_amp(LocalModular::Diagonal(&spec), &u, 1.0, &quad).unwrap();
        assert_eq!(a <= 1.0, m1 <= 1.0);
    }

    #[test]
    fn equivalence_equality_case() {
        // ∫ (2 cos-bump′)² over R = 1.5 equals 4 · π²/6
        let u = by_id("cosbump", 1).unwrap();
        let ev = H0Evaluator::new(
            YoungSpec::power(2.0).unwrap(),
            SphereRule::new(1, 1).unwrap(),
            H0Variant::ClosedPower,
        )
        .unwrap();
        let quad = SpatialQuad::default();
        let base = local_modular_amp(LocalModular::Limit(&ev), &u, 1.0, &quad).unwrap();
        let amp = (4.0 / base).sqrt();
        let r = check_modular_norm_equivalence(&ev, &u, amp, 4.0, &quad, 1e-8).unwrap();
        assert!((r.modular - 4.0).abs() < 1e-12);
        assert!((r.norm - 2.0).abs() < 1e-7);
        assert!(r.passed());
        let z = by_id("zero", 1).unwrap();
        let r = check_modular_norm_equivalence(&ev, &z, 1.0, 1.0, &quad, 1e-8).unwrap();
        assert_eq!((r.modular, r.norm), (0.0, 0.0));
        assert!(r.passed());
    }
}
