//! The fractional modular
//! `J_s(u) = ∬ G(x, y, |u(x) − u(y)| / |x − y|^s) dx dy / |x − y|ⁿ`,
//! its `(1−s)`-rescaled form, the axis-aligned variant, and local modulars.
//!
//! Writing `y = x − r w` with `w` on the unit sphere, the pair domain splits
//! exactly into
//! * region A, `x` in the support box `S`, all `r > 0`;
//! * region B, `y ∈ S` and `x = y + r w ∉ S`, where `u(x) = 0`.
//!
//! Both regions are then split at `r = far_cutoff` into a near and a far
//! field. Only the region-A near field is singular as `s → 1`; it is
//! integrated in the variable `ρ = r^{1−s}`, in which `(1−s) dr/r = dρ/ρ`.

mod monte_carlo;
mod tensor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::limit::{H0Evaluator, SpatialQuad};
use crate::sphere::surface_measure;
use crate::test_functions::TestFunction;
use crate::young::YoungSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    /// Composite Gauss-Legendre over the support box, `panels` per axis.
    Tensor { panels: usize, order: usize },
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingPlan {
    pub method: Method,
    /// Sphere rule order; `None` picks a default for the dimension.
    pub sphere_order: Option<usize>,
    /// Dyadic panels in the innermost near-field variable.
    pub radial_levels: usize,
    pub use_rho_substitution: bool,
    pub far_cutoff: f64,
    pub far_radial_levels: usize,
    /// Gauss-Legendre points per radial panel.
    pub gl_order: usize,
    /// Width in `log r` of the near-field band `[c e^{-span}, c]` integrated
    /// before switching to the ρ variable.
    pub near_log_span: f64,
    pub seed: u64,
    /// Largest admissible ratio of the truncation bound to the value.
    pub tail_tol: f64,
    pub exec: Exec,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            method: Method::Tensor { panels: 12, order: 8 },
            sphere_order: None,
            radial_levels: 24,
            use_rho_substitution: true,
            far_cutoff: 1.0,
            far_radial_levels: 30,
            gl_order: 10,
            near_log_span: 24.0,
            seed: 0,
            tail_tol: 1e-6,
            exec: Exec::default(),
        }
    }
}

impl SamplingPlan {
    pub fn tensor(panels: usize, order: usize) -> Self {
        Self { method: Method::Tensor { panels, order }, ..Self::default() }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self { method: Method::MonteCarlo { samples }, seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if !(self.far_cutoff > 0.0 && self.far_cutoff.is_finite()) {
            return bad(format!("far_cutoff must be positive, got {}", self.far_cutoff));
        }
        if self.radial_levels < 8 || self.far_radial_levels < 8 {
            return bad("radial level counts must be at least 8".into());
        }
        if self.gl_order == 0 || !(self.near_log_span >= 0.0) {
            return bad("gl_order must be positive and near_log_span nonnegative".into());
        }
        if !(self.tail_tol > 0.0) {
            return bad("tail_tol must be positive".into());
        }
        match self.method {
            Method::Tensor { panels, order } if panels == 0 || order == 0 => {
                bad("tensor plan needs positive panels and order".into())
            }
            Method::MonteCarlo { samples } if samples < 1000 => {
                bad(format!("Monte Carlo plans need at least 1000 samples, got {samples}"))
            }
            _ => Ok(()),
        }
    }

    pub fn sphere_order_for(&self, n: usize) -> usize {
        self.sphere_order.unwrap_or(match n {
            1 => 1,
            2 => 48,
            _ => 6,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ModularResult {
    /// Unscaled `J_s(u)`, equal to `near_field + far_field`.
    pub value: f64,
    pub near_field: f64,
    pub far_field: f64,
    /// `(1−s) J_s(u)`, assembled without forming the unscaled near field.
    pub scaled_value: f64,
    /// Bound on the truncated radial tails, for `value`.
    pub tail_bound: f64,
    pub scaled_tail_bound: f64,
    /// Analytic a priori bound on `far_field` (meaningful for `far_cutoff ≥ 1`).
    pub far_bound: f64,
    pub mc_stderr: Option<f64>,
    pub scaled_stderr: Option<f64>,
}

/// Integration directions: the whole sphere or the two signs of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Directions {
    Sphere,
    /// Zero-based axis.
    Axis(usize),
}

pub(crate) struct Problem<'a> {
    pub spec: &'a YoungSpec,
    pub u: &'a TestFunction,
    pub amp: f64,
    pub s: f64,
    pub plan: &'a SamplingPlan,
    pub dirs: Directions,
}

impl Problem<'_> {
    pub fn n(&self) -> usize {
        self.u.dim
    }

    /// Measure of the direction set.
    pub fn direction_measure(&self) -> Result<f64> {
        match self.dirs {
            Directions::Sphere => surface_measure(self.n()),
            Directions::Axis(_) => Ok(2.0),
        }
    }

    /// `G(x, x − r w, |q| r^{1−s})` where `q` is the difference quotient.
    #[inline]
    pub fn phi_near(&self, x: &[f64], w: &[f64], r: f64, r_pow: f64) -> f64 {
        let n = self.n();
        let mut y = [0.0; 3];
        let q = if r == 0.0 {
            let g = self.u.gradient(x);
            y[..n].copy_from_slice(x);
            (0..n).map(|i| g[i] * w[i]).sum::<f64>()
        } else {
            for i in 0..n {
                y[i] = x[i] - r * w[i];
            }
            self.u.diff_quotient(x, w, r)
        };
        let t = self.amp * q.abs() * r_pow;
        self.spec.value(x, &y[..n], t)
    }

    /// `G(x, x − r w, |u(x) − u(x − r w)| / r^s)`.
    #[inline]
    pub fn phi_a(&self, x: &[f64], w: &[f64], r: f64) -> f64 {
        if !r.is_finite() {
            return 0.0;
        }
        let n = self.n();
        let mut y = [0.0; 3];
        for i in 0..n {
            y[i] = x[i] - r * w[i];
        }
        let d = self.u.value(x) - self.u.value(&y[..n]);
        let t = self.amp * d.abs() * (-self.s * r.ln()).exp();
        self.spec.value(x, &y[..n], t)
    }

    /// `G(y + r w, y, U / r^s)` with `U = amp·|u(y)|` supplied.
    #[inline]
    pub fn phi_b(&self, y: &[f64], w: &[f64], r: f64, big_u: f64) -> f64 {
        if !r.is_finite() {
            return 0.0;
        }
        let n = self.n();
        let mut x = [0.0; 3];
        for i in 0..n {
            x[i] = y[i] + r * w[i];
        }
        let t = big_u * (-self.s * r.ln()).exp();
        self.spec.value(&x[..n], y, t)
    }

    /// `G(x − r w, x, U / r^s)`, the region-A integrand once `x − r w` has
    /// left the support for good.
    #[inline]
    pub fn phi_a_outside(&self, x: &[f64], w: &[f64], r: f64, big_u: f64) -> f64 {
        if !r.is_finite() {
            return 0.0;
        }
        let n = self.n();
        let mut y = [0.0; 3];
        for i in 0..n {
            y[i] = x[i] - r * w[i];
        }
        let t = big_u * (-self.s * r.ln()).exp();
        self.spec.value(x, &y[..n], t)
    }

    /// Analytic bound on the far field.
    pub fn far_bound(&self) -> Result<f64> {
        let b = self.spec.bounds();
        let uu = self.amp * self.u.sup_u;
        let c = self.plan.far_cutoff;
        let s = self.s;
        let per = b.c2 * b.max_pow(2.0 * uu) / (s * c.powf(s))
            + b.c2 * b.max_pow(uu) / (s * b.p_minus * c.powf(s * b.p_minus));
        Ok(self.u.bbox().volume() * self.direction_measure()? * per)
    }
}

fn check_inputs(s: f64, amp: f64, plan: &SamplingPlan) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
    }
    if !(amp >= 0.0 && amp.is_finite()) {
        return Err(Error::Domain(format!("amplitude must be finite and nonnegative, got {amp}")));
    }
    plan.validate()
}

fn evaluate(problem: Problem<'_>) -> Result<ModularResult> {
    check_inputs(problem.s, problem.amp, problem.plan)?;
    if problem.amp == 0.0 || problem.u.is_zero() {
        let mc = matches!(problem.plan.method, Method::MonteCarlo { .. }).then_some(0.0);
        return Ok(ModularResult { mc_stderr: mc, scaled_stderr: mc, ..Default::default() });
    }
    let mut res = match problem.plan.method {
        Method::Tensor { panels, order } => tensor::evaluate(&problem, panels, order)?,
        Method::MonteCarlo { samples } => monte_carlo::evaluate(&problem, samples)?,
    };
    res.far_bound = problem.far_bound()?;
    Ok(res)
}

/// `J_s(u)` with its near/far split.
pub fn modular_js(spec: &YoungSpec, u: &TestFunction, s: f64, plan: &SamplingPlan) -> Result<ModularResult> {
    modular_js_amp(spec, u, 1.0, s, plan)
}

/// `J_s(amp·u)`.
pub fn modular_js_amp(
    spec: &YoungSpec,
    u: &TestFunction,
    amp: f64,
    s: f64,
    plan: &SamplingPlan,
) -> Result<ModularResult> {
    evaluate(Problem { spec, u, amp, s, plan, dirs: Directions::Sphere })
}

/// `(1−s) J_s(u)`.
pub fn scaled_modular(spec: &YoungSpec, u: &TestFunction, s: f64, plan: &SamplingPlan) -> Result<f64> {
    Ok(modular_js(spec, u, s, plan)?.scaled_value)
}

/// The modular with difference quotients along the axis `k ∈ 1..=n` only:
/// `∫ ∫_ℝ G(x, x − h e_k, |u(x − h e_k) − u(x)| / |h|^s) dh/|h| dx`.
pub fn modular_aniso(
    spec: &YoungSpec,
    u: &TestFunction,
    s: f64,
    k: usize,
    plan: &SamplingPlan,
) -> Result<ModularResult> {
    modular_aniso_amp(spec, u, 1.0, s, k, plan)
}

pub fn modular_aniso_amp(
    spec: &YoungSpec,
    u: &TestFunction,
    amp: f64,
    s: f64,
    k: usize,
    plan: &SamplingPlan,
) -> Result<ModularResult> {
    if k == 0 || k > u.dim {
        return Err(Error::Domain(format!("axis {k} out of range for n = {}", u.dim)));
    }
    evaluate(Problem { spec, u, amp, s, plan, dirs: Directions::Axis(k - 1) })
}

/// Integrand of a local modular.
#[derive(Debug, Clone, Copy)]
pub enum LocalModular<'a> {
    /// `∫ Ḡ(x, |u(x)|) dx` with `Ḡ(x, t) = G(x, x, t)`.
    Diagonal(&'a YoungSpec),
    /// `∫ H₀(x, |∇u(x)|) dx`.
    Limit(&'a H0Evaluator),
}

pub fn local_modular(which: LocalModular<'_>, u: &TestFunction, quad: &SpatialQuad) -> Result<f64> {
    local_modular_amp(which, u, 1.0, quad)
}

/// Local modular of `amp·u`.
pub fn local_modular_amp(which: LocalModular<'_>, u: &TestFunction, amp: f64, quad: &SpatialQuad) -> Result<f64> {
    match which {
        LocalModular::Diagonal(spec) => quad.integrate(u, |x| Ok(spec.value(x, x, amp * u.value(x).abs()))),
        LocalModular::Limit(ev) => quad.integrate(u, |x| ev.eval(x, amp * u.grad_norm(x))),
    }
}
