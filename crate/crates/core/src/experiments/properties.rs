//! The property suite: sampled invariants of every module, with fixed seeds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::limit::{sandwich_constants, H0Evaluator, H0Variant};
use crate::modular::{modular_js_amp, SamplingPlan};
use crate::sphere::SphereRule;
use crate::test_functions::{bank, by_id, finite_difference_check, TestFunction};
use crate::young::{builtin_specs, verify_structure, GrowthBounds, StructurePlan, YoungSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyEntry {
    pub name: String,
    /// Largest observed violation; nonpositive means the property held with room.
    pub max_violation: f64,
    pub tol: f64,
    /// Negative controls pass when the underlying check fails.
    pub expect_failure: bool,
}

impl PropertyEntry {
    fn new(name: impl Into<String>, max_violation: f64, tol: f64) -> Self {
        Self { name: name.into(), max_violation, tol, expect_failure: false }
    }

    pub fn check_held(&self) -> bool {
        self.max_violation <= self.tol
    }

    pub fn passed(&self) -> bool {
        self.check_held() != self.expect_failure
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PropertyReport {
    pub entries: Vec<PropertyEntry>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(PropertyEntry::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyEntry> {
        self.entries.iter().filter(|e| !e.passed())
    }
}

pub const SANDWICH_TOL: f64 = 1e-6;
pub const DUAL_PATH_TOL: f64 = 1e-6;

/// Sphere rule order shared by the two sides of every `H₀` comparison.
fn rule_for(n: usize) -> Result<SphereRule> {
    SphereRule::new(n, if n == 2 { 256 } else { 16 })
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Structural hypotheses and inequalities for every preset.
pub fn structure_checks(seed: u64, samples: usize) -> Vec<PropertyEntry> {
    let mut out = Vec::new();
    for (id, spec) in builtin_specs() {
        for dim in [1, 2] {
            let plan = StructurePlan { dim, samples, seed, ..Default::default() };
            for c in verify_structure(&spec, &plan).checks {
                out.push(PropertyEntry::new(format!("structure/{id}/n{dim}/{}", c.name), c.max_slack, c.tol));
            }
        }
    }
    out
}

/// Specs whose declared `p⁺` is below the true growth; (H₃) must fail.
pub fn negative_controls(seed: u64) -> Result<Vec<PropertyEntry>> {
    let plan = StructurePlan { seed, ..Default::default() };
    let wrong_power = YoungSpec::power(3.0)?.with_bounds(GrowthBounds::new(2.0, 2.5, 1.0, 1.0)?);
    let wrong_double = crate::young::preset("doublephase", &Default::default())?
        .with_bounds(GrowthBounds::new(2.0, 2.5, 1.0, 1.5)?);
    let mut out = Vec::new();
    for (name, spec) in [("power-p3-declared-2.5", wrong_power), ("doublephase-declared-2.5", wrong_double)] {
        let report = verify_structure(&spec, &plan);
        let h3 = report.get("H3").expect("H3 is always checked");
        out.push(PropertyEntry {
            name: format!("negative-control/{name}/H3"),
            max_violation: h3.max_slack,
            tol: h3.tol,
            expect_failure: true,
        });
    }
    Ok(out)
}

/// `lower·Ḡ ≤ H₀ ≤ upper·Ḡ` at sampled `(x, t)`; the violation is measured
/// on the ratio `H₀/Ḡ`.
pub fn sandwich_check(id: &str, spec: &YoungSpec, n: usize, samples: usize, seed: u64) -> Result<PropertyEntry> {
    let rule = rule_for(n)?;
    let (lower, upper) = sandwich_constants(spec, &rule)?;
    let ev = H0Evaluator::preferred(spec.clone(), rule)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let x = random_point(&mut rng, n);
        let t = log_uniform(&mut rng, 1e-2, 1e2);
        let ratio = ev.eval(&x, t)? / spec.value(&x, &x, t);
        worst = worst.max((lower - ratio) / lower).max((ratio - upper) / upper);
    }
    Ok(PropertyEntry::new(format!("sandwich/{id}/n{n}"), worst, SANDWICH_TOL))
}

/// Closed-form `H₀` against generic quadrature at sampled `(x, t)`.
pub fn dual_path_check(id: &str, spec: &YoungSpec, n: usize, samples: usize, seed: u64) -> Result<Option<PropertyEntry>> {
    let variant = H0Variant::closed_for(spec);
    if variant == H0Variant::Generic {
        return Ok(None);
    }
    let rule = rule_for(n)?;
    let closed = H0Evaluator::new(spec.clone(), rule.clone(), variant)?;
    let generic = H0Evaluator::new(spec.clone(), rule, H0Variant::Generic)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = random_point(&mut rng, n);
        let t = log_uniform(&mut rng, 1e-2, 1e2);
        let a = closed.eval(&x, t)?;
        let b = generic.eval(&x, t)?;
        worst = worst.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
    }
    Ok(Some(PropertyEntry::new(format!("h0-dual-path/{id}/n{n}"), worst, DUAL_PATH_TOL)))
}

/// Finite-difference densities of `t ↦ H₀(x, t)` are nonnegative and nondecreasing.
pub fn h0_young_check(id: &str, spec: &YoungSpec, n: usize, seed: u64) -> Result<PropertyEntry> {
    let ev = H0Evaluator::preferred(spec.clone(), rule_for(n)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..5 {
        let x = random_point(&mut rng, n);
        let ts: Vec<f64> = (0..=80).map(|k| 0.05 * k as f64).collect();
        let hs: Vec<f64> = ts.iter().map(|t| ev.eval(&x, *t)).collect::<Result<_>>()?;
        let dens: Vec<f64> = hs.windows(2).map(|w| (w[1] - w[0]) / 0.05).collect();
        let scale = dens.last().copied().unwrap_or(1.0).abs().max(1e-300);
        for d in &dens {
            worst = worst.max(-d / scale);
        }
        for w in dens.windows(2) {
            worst = worst.max((w[0] - w[1]) / scale);
        }
    }
    Ok(PropertyEntry::new(format!("h0-young/{id}/n{n}"), worst, 1e-9))
}

/// Gradient finite-difference check and exact support invariant for the bank.
pub fn test_function_checks(seed: u64) -> Result<Vec<PropertyEntry>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 1..=3 {
        for u in bank(n)? {
            if u.smooth && !u.is_zero() {
                let pts = interior_points(&u, 100, &mut rng);
                let dev = finite_difference_check(&u, &pts, 1e-5);
                out.push(PropertyEntry::new(format!("fd-gradient/{}/n{n}", u.id), dev, 1e-6));
            }
            let mut worst: f64 = 0.0;
            let mut hits = 0;
            while hits < 10_000 {
                let p: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
                if p.iter().map(|v| v * v).sum::<f64>().sqrt() <= u.support_radius {
                    continue;
                }
                hits += 1;
                worst = worst.max(u.value(&p).abs()).max(u.grad_norm(&p));
            }
            out.push(PropertyEntry::new(format!("support/{}/n{n}", u.id), worst, 0.0));
        }
    }
    Ok(out)
}

fn interior_points(u: &TestFunction, count: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let b = u.bbox();
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let mut p = [0.0; 3];
        for i in 0..u.dim {
            p[i] = rng.random_range(b.lo[i]..b.hi[i]);
        }
        if u.value(&p[..u.dim]) > 1e-3 {
            pts.push(p);
        }
    }
    pts
}

/// Homogeneity for a pure power, monotonicity in λ and the convexity bound
/// `J(θu) ≤ θ J(u)`.
pub fn modular_checks() -> Result<Vec<PropertyEntry>> {
    let u = by_id("cosbump", 1)?;
    let plan = SamplingPlan::tensor(8, 8);
    let s = 0.8;
    let p2 = YoungSpec::power(2.0)?;
    let j1 = modular_js_amp(&p2, &u, 1.0, s, &plan)?.value;
    let j2 = modular_js_amp(&p2, &u, 2.0, s, &plan)?.value;
    let mut out = vec![PropertyEntry::new("modular/power-homogeneity", (j2 - 4.0 * j1).abs() / (4.0 * j1), 1e-9)];

    let dp = crate::young::preset("doublephase", &Default::default())?;
    let lambdas = [0.25, 0.5, 1.0, 2.0, 4.0];
    let vals: Vec<f64> = lambdas
        .iter()
        .map(|l| Ok(modular_js_amp(&dp, &u, 1.0 / l, s, &plan)?.value))
        .collect::<Result<_>>()?;
    let mono = vals.windows(2).map(|w| (w[1] - w[0]) / w[0]).fold(f64::NEG_INFINITY, f64::max);
    out.push(PropertyEntry::new("modular/monotone-in-lambda", mono, 0.0));

    let full = vals[2];
    let mut conv = f64::NEG_INFINITY;
    for theta in [0.1, 0.3, 0.6, 0.9] {
        let v = modular_js_amp(&dp, &u, theta, s, &plan)?.value;
        conv = conv.max((v - theta * full) / full);
    }
    out.push(PropertyEntry::new("modular/convexity", conv, 0.0));
    Ok(out)
}

pub fn run_property_suite(seed: u64) -> Result<PropertyReport> {
    let mut entries = structure_checks(seed, 1000);
    entries.extend(negative_controls(seed)?);
    for (id, spec) in builtin_specs() {
        for n in [1, 2] {
            entries.push(sandwich_check(id, &spec, n, 1000, seed)?);
            if let Some(e) = dual_path_check(id, &spec, n, 50, seed)? {
                entries.push(e);
            }
            entries.push(h0_young_check(id, &spec, n, seed)?);
        }
    }
    entries.extend(test_function_checks(seed)?);
    entries.extend(modular_checks()?);
    Ok(PropertyReport { entries })
}
