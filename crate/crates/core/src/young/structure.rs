//! Sampled verification of the structural hypotheses and the elementary
//! inequalities they imply.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::YoungSpec;

/// Closed-form identities and inequalities.
pub const CLOSED_FORM_TOL: f64 = 1e-9;
/// Checks that go through the numeric complementary function.
pub const TRANSFORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructurePlan {
    pub dim: usize,
    pub samples: usize,
    pub seed: u64,
    /// Points are drawn from `[-extent, extent]^n`.
    pub extent: f64,
    /// t, a, b are log-uniform in `[1/t_span, t_span]`.
    pub t_span: f64,
}

impl Default for StructurePlan {
    fn default() -> Self {
        Self {
            dim: 1,
            samples: 1000,
            seed: 17,
            extent: 3.0,
            t_span: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    /// Largest observed relative violation; nonpositive values mean slack.
    pub max_slack: f64,
    pub tol: f64,
}

impl PropertyCheck {
    pub fn passed(&self) -> bool {
        self.max_slack <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub spec: String,
    pub checks: Vec<PropertyCheck>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(PropertyCheck::passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

fn rel(excess: f64, scale: f64) -> f64 {
    excess / scale.abs().max(1e-300)
}

/// Sample `(x, y, t)` and record the worst slack of (H₁), (H₃), both scaling
/// chains, the complementary bound `G̃(g(t)) ≤ p⁺ G(t)`, Young's inequality
/// and midpoint convexity against the declared bounds of `spec`.
pub fn verify_structure(spec: &YoungSpec, plan: &StructurePlan) -> StructureReport {
    let b = *spec.bounds();
    let n = plan.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let ln_span = plan.t_span.ln();
    let log_uniform = |rng: &mut ChaCha8Rng| (rng.random_range(-ln_span..ln_span)).exp();

    let mut h1 = f64::NEG_INFINITY;
    let mut h3 = f64::NEG_INFINITY;
    let mut chain_scale = f64::NEG_INFINITY;
    let mut chain_power = f64::NEG_INFINITY;
    let mut comp = f64::NEG_INFINITY;
    let mut young = f64::NEG_INFINITY;
    let mut convex = f64::NEG_INFINITY;

    let mut x = [0.0; 3];
    let mut y = [0.0; 3];
    for _ in 0..plan.samples {
        for i in 0..n {
            x[i] = rng.random_range(-plan.extent..plan.extent);
            y[i] = rng.random_range(-plan.extent..plan.extent);
        }
        let (xs, ys) = (&x[..n], &y[..n]);
        let t = log_uniform(&mut rng);
        let a = log_uniform(&mut rng);
        let bb = log_uniform(&mut rng);
        let t2 = log_uniform(&mut rng);

        let g1 = spec.value(xs, ys, 1.0);
        h1 = h1.max(rel(b.c1 - g1, b.c1)).max(rel(g1 - b.c2, b.c2));

        let gt = spec.value(xs, ys, t);
        let dens = spec.density(xs, ys, t);
        let ratio = t * dens / gt;
        h3 = h3.max(b.p_minus - ratio).max(ratio - b.p_plus);

        let gb = spec.value(xs, ys, bb);
        let gab = spec.value(xs, ys, a * bb);
        chain_scale = chain_scale
            .max(rel(b.min_pow(a) * gb - gab, gab))
            .max(rel(gab - b.max_pow(a) * gb, gab));
        chain_power = chain_power
            .max(rel(b.c1 * b.min_pow(bb) - gb, gb))
            .max(rel(gb - b.c2 * b.max_pow(bb), gb));

        if let Ok(c) = spec.complementary(xs, ys, dens) {
            comp = comp.max(rel(c - b.p_plus * gt, b.p_plus * gt));
        } else {
            comp = f64::INFINITY;
        }
        let ga = spec.value(xs, ys, a);
        match spec.complementary(xs, ys, bb) {
            Ok(c) => young = young.max(rel(a * bb - ga - c, (a * bb).max(ga + c))),
            Err(_) => young = f64::INFINITY,
        }

        let gm = spec.value(xs, ys, 0.5 * (t + t2));
        let avg = 0.5 * (gt + spec.value(xs, ys, t2));
        convex = convex.max(rel(gm - avg, avg));
    }

    let check = |name: &str, max_slack: f64, tol: f64| PropertyCheck {
        name: name.to_string(),
        max_slack,
        tol,
    };
    StructureReport {
        spec: spec.label().to_string(),
        checks: vec![
            check("H1", h1, CLOSED_FORM_TOL),
            check("H3", h3, CLOSED_FORM_TOL),
            check("scaling-chain", chain_scale, CLOSED_FORM_TOL),
            check("power-chain", chain_power, CLOSED_FORM_TOL),
            check("complementary-bound", comp, TRANSFORM_TOL),
            check("young-inequality", young, TRANSFORM_TOL),
            check("convexity", convex, CLOSED_FORM_TOL),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::young::{Field, GrowthBounds};

    #[test]
    fn pure_power_passes_with_tight_slack() {
        let s = YoungSpec::power(2.0).unwrap();
        let r = verify_structure(&s, &StructurePlan::default());
        assert!(r.passed(), "{r:?}");
        // (H3) and the scaling chain hold with equality for pure powers
        assert!(r.get("H3").unwrap().max_slack.abs() <= 1e-10);
        assert!(r.get("scaling-chain").unwrap().max_slack <= 1e-10);
    }

    #[test]
    fn double_phase_h3_ratio_within_declared_exponents() {
        let s = YoungSpec::double_phase(2.0, 3.0, Field::constant(1.0)).unwrap();
        let r = verify_structure(&s, &StructurePlan::default());
        assert!(r.get("H3").unwrap().max_slack <= 1e-10);
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn wrong_declared_exponent_is_detected() {
        let s = YoungSpec::power(2.0)
            .unwrap()
            .with_bounds(GrowthBounds { p_minus: 2.0, p_plus: 1.5, c1: 1.0, c2: 1.0 });
        let r = verify_structure(&s, &StructurePlan::default());
        assert!(r.get("H3").unwrap().max_slack > 0.1);
        assert!(!r.passed());
    }
}
