//! Convergence studies over an s grid.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{StudyConfig, StudyKind};
use super::properties::{run_property_suite, PropertyReport};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::limit::{grad_energy, grad_energy_axis, H0Evaluator, H0Variant, SpatialQuad};
use crate::luxemburg::norm_inequality_study;
use crate::modular::{modular_aniso, modular_js, ModularResult};
use crate::sphere::SphereRule;
use crate::test_functions::{by_id, TestFunction};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub s: f64,
    pub scaled_modular: f64,
    pub limit: f64,
    pub abs_err: f64,
    /// Absent when the limit is zero but the modular is not.
    pub rel_err: Option<f64>,
    pub tail_bound: f64,
    pub stderr: Option<f64>,
    pub wall_ms: Option<f64>,
}

impl StudyRow {
    fn new(s: f64, value: f64, limit: f64, tail_bound: f64, stderr: Option<f64>, wall_ms: Option<f64>) -> Self {
        let abs_err = (value - limit).abs();
        let rel_err = if limit != 0.0 {
            Some(abs_err / limit.abs())
        } else if abs_err == 0.0 {
            Some(0.0)
        } else {
            None
        };
        Self { s, scaled_modular: value, limit, abs_err, rel_err, tail_bound, stderr, wall_ms }
    }
}

/// Closed-form limit against generic sphere-radial quadrature of `H₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub closed: f64,
    pub generic: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub artifact_version: String,
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
    /// Least-squares slope of `log abs_err` against `log(1 − s)`.
    pub fitted_rate: Option<f64>,
    /// False for test functions outside the smooth class; convergence is
    /// then reported but not claimed.
    pub hypothesis_satisfied: bool,
    pub cross_check: Option<CrossCheck>,
    pub properties: Option<PropertyReport>,
}

impl StudyResult {
    /// Number of grid steps where the relative error grows.
    pub fn monotonicity_violations(&self) -> usize {
        self.rows
            .windows(2)
            .filter(|w| match (w[0].rel_err, w[1].rel_err) {
                (Some(a), Some(b)) => b > a,
                _ => false,
            })
            .count()
    }

    pub fn last_rel_err(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.rel_err)
    }
}

/// Dispatch on the study kind.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    match config.kind {
        StudyKind::BbmLimit => run_bbm_study(config),
        StudyKind::AnisoLimit => run_aniso_study(config),
        StudyKind::NormInequality => run_norm_study(config),
        StudyKind::ExampleDoublephase | StudyKind::ExampleLog | StudyKind::ExampleVarexp => {
            run_example_suite(config)
        }
        StudyKind::PropertySuite => {
            let report = run_property_suite(config.seed)?;
            Ok(StudyResult {
                artifact_version: ARTIFACT_VERSION.into(),
                config: config.clone(),
                rows: Vec::new(),
                fitted_rate: None,
                hypothesis_satisfied: true,
                cross_check: None,
                properties: Some(report),
            })
        }
    }
}

fn limit_evaluator(config: &StudyConfig, variant: Option<H0Variant>) -> Result<H0Evaluator> {
    let spec = config.build_spec()?;
    let rule = SphereRule::new(config.dim, config.limit.sphere_order_for(config.dim))?;
    match variant {
        Some(v) => H0Evaluator::new(spec, rule, v),
        None => H0Evaluator::preferred(spec, rule),
    }
}

fn modular_rows<F>(config: &StudyConfig, limit: f64, eval: F) -> Result<Vec<StudyRow>>
where
    F: Fn(f64) -> Result<ModularResult> + Sync + Send,
{
    let exec = config.plan.exec;
    let rows = map_indexed(exec, config.s_grid.len(), |i| {
        let s = config.s_grid[i];
        let start = Instant::now();
        let r = eval(s).map_err(|e| Error::Study { s, source: Box::new(e) })?;
        let ms = config.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
        Ok(StudyRow::new(s, r.scaled_value, limit, r.scaled_tail_bound, r.scaled_stderr, ms))
    });
    rows.into_iter().collect()
}

fn finish(config: &StudyConfig, u: &TestFunction, rows: Vec<StudyRow>, cross_check: Option<CrossCheck>) -> StudyResult {
    StudyResult {
        artifact_version: ARTIFACT_VERSION.into(),
        config: config.clone(),
        fitted_rate: fitted_rate(&rows),
        rows,
        hypothesis_satisfied: u.smooth,
        cross_check,
        properties: None,
    }
}

pub fn run_bbm_study(config: &StudyConfig) -> Result<StudyResult> {
    let spec = config.build_spec()?;
    let u = by_id(&config.function, config.dim)?;
    let plan = config.plan.to_plan(config.seed);
    let ev = limit_evaluator(config, None)?;
    let limit = grad_energy(&ev, &u, &config.limit.quad(plan.exec))?;
    let rows = modular_rows(config, limit, |s| modular_js(&spec, &u, s, &plan))?;
    Ok(finish(config, &u, rows, None))
}

pub fn run_aniso_study(config: &StudyConfig) -> Result<StudyResult> {
    let spec = config.build_spec()?;
    let u = by_id(&config.function, config.dim)?;
    let plan = config.plan.to_plan(config.seed);
    let ev = H0Evaluator::new(spec.clone(), SphereRule::new(1, 1)?, H0Variant::Anisotropic)?;
    let limit = grad_energy_axis(&ev, &u, config.axis, &config.limit.quad(plan.exec))?;
    let rows = modular_rows(config, limit, |s| modular_aniso(&spec, &u, s, config.axis, &plan))?;
    Ok(finish(config, &u, rows, None))
}

/// BBM study with the closed-form limit, plus a closed-versus-generic check
/// of the limit integral on a shared spatial rule.
pub fn run_example_suite(config: &StudyConfig) -> Result<StudyResult> {
    let mut result = run_bbm_study(config)?;
    let u = by_id(&config.function, config.dim)?;
    let (quad, order) = match config.dim {
        1 => (config.limit.quad(config.plan.exec), 1),
        2 => (SpatialQuad { panels: 8, order: 6, exec: config.plan.exec }, 64),
        _ => (SpatialQuad { panels: 4, order: 4, exec: config.plan.exec }, 8),
    };
    let spec = config.build_spec()?;
    let rule = SphereRule::new(config.dim, order)?;
    let closed = grad_energy(&H0Evaluator::preferred(spec.clone(), rule.clone())?, &u, &quad)?;
    let generic = grad_energy(&H0Evaluator::new(spec, rule, H0Variant::Generic)?, &u, &quad)?;
    let rel_diff = if closed == 0.0 { (generic - closed).abs() } else { (generic - closed).abs() / closed.abs() };
    result.cross_check = Some(CrossCheck { closed, generic, rel_diff });
    Ok(result)
}

/// Rows hold `[[u]]_{s,G}` in the modular column and `‖∇u‖_{H₀}` in the
/// limit column.
pub fn run_norm_study(config: &StudyConfig) -> Result<StudyResult> {
    let spec = config.build_spec()?;
    let u = by_id(&config.function, config.dim)?;
    let plan = config.plan.to_plan(config.seed);
    let ev = limit_evaluator(config, None)?;
    let quad = config.limit.quad(plan.exec);
    let start = Instant::now();
    let table = norm_inequality_study(&spec, &ev, &u, &config.s_grid, &plan, &quad)?;
    let ms = config.timing.then(|| start.elapsed().as_secs_f64() * 1e3 / table.len() as f64);
    let rows = table
        .iter()
        .map(|r| StudyRow::new(r.s, r.scaled_seminorm, r.gradient_norm, 0.0, None, ms))
        .collect();
    Ok(finish(config, &u, rows, None))
}

/// Slope of `log abs_err` against `log(1 − s)` over rows with nonzero error.
pub fn fitted_rate(rows: &[StudyRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.abs_err > 0.0)
        .map(|r| ((1.0 - r.s).ln(), r.abs_err.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
