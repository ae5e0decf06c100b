//! Study configuration, read from TOML.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::limit::SpatialQuad;
use crate::modular::{Method, SamplingPlan};
use crate::test_functions::by_id;
use crate::young::{preset, YoungSpec};

pub const DEFAULT_S_GRID: [f64; 5] = [0.9, 0.95, 0.99, 0.995, 0.999];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    BbmLimit,
    AnisoLimit,
    NormInequality,
    ExampleDoublephase,
    ExampleLog,
    ExampleVarexp,
    PropertySuite,
}

impl StudyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::BbmLimit => "bbm-limit",
            Self::AnisoLimit => "aniso-limit",
            Self::NormInequality => "norm-inequality",
            Self::ExampleDoublephase => "example-doublephase",
            Self::ExampleLog => "example-log",
            Self::ExampleVarexp => "example-varexp",
            Self::PropertySuite => "property-suite",
        }
    }

    /// The spec preset an example study is tied to.
    pub fn example_spec(&self) -> Option<&'static str> {
        match self {
            Self::ExampleDoublephase => Some("doublephase"),
            Self::ExampleLog => Some("log"),
            Self::ExampleVarexp => Some("varexp"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlanMethod {
    Tensor,
    Mc,
}

/// Flat mirror of [`SamplingPlan`] for config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlanConfig {
    pub method: PlanMethod,
    pub panels: usize,
    pub order: usize,
    pub samples: usize,
    pub sphere_order: Option<usize>,
    pub radial_levels: usize,
    pub use_rho_substitution: bool,
    pub far_cutoff: f64,
    pub far_radial_levels: usize,
    pub gl_order: usize,
    pub near_log_span: f64,
    pub tail_tol: f64,
    pub exec: Exec,
}

impl Default for PlanConfig {
    fn default() -> Self {
        let p = SamplingPlan::default();
        let (panels, order) = match p.method {
            Method::Tensor { panels, order } => (panels, order),
            Method::MonteCarlo { .. } => (12, 8),
        };
        Self {
            method: PlanMethod::Tensor,
            panels,
            order,
            samples: 1_000_000,
            sphere_order: p.sphere_order,
            radial_levels: p.radial_levels,
            use_rho_substitution: p.use_rho_substitution,
            far_cutoff: p.far_cutoff,
            far_radial_levels: p.far_radial_levels,
            gl_order: p.gl_order,
            near_log_span: p.near_log_span,
            tail_tol: p.tail_tol,
            exec: p.exec,
        }
    }
}

impl PlanConfig {
    pub fn to_plan(&self, seed: u64) -> SamplingPlan {
        SamplingPlan {
            method: match self.method {
                PlanMethod::Tensor => Method::Tensor { panels: self.panels, order: self.order },
                PlanMethod::Mc => Method::MonteCarlo { samples: self.samples },
            },
            sphere_order: self.sphere_order,
            radial_levels: self.radial_levels,
            use_rho_substitution: self.use_rho_substitution,
            far_cutoff: self.far_cutoff,
            far_radial_levels: self.far_radial_levels,
            gl_order: self.gl_order,
            near_log_span: self.near_log_span,
            seed,
            tail_tol: self.tail_tol,
            exec: self.exec,
        }
    }
}

/// Quadrature used for the limit column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitConfig {
    pub panels: usize,
    pub order: usize,
    /// Sphere rule order; `None` picks a default for the dimension.
    pub sphere_order: Option<usize>,
}

impl Default for LimitConfig {
    fn default() -> Self {
        Self { panels: 32, order: 10, sphere_order: None }
    }
}

impl LimitConfig {
    pub fn sphere_order_for(&self, n: usize) -> usize {
        self.sphere_order.unwrap_or(match n {
            1 => 1,
            2 => 512,
            _ => 32,
        })
    }

    pub fn quad(&self, exec: Exec) -> SpatialQuad {
        SpatialQuad { panels: self.panels, order: self.order, exec }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub spec: String,
    pub spec_params: BTreeMap<String, f64>,
    #[serde(rename = "fn")]
    pub function: String,
    pub dim: usize,
    pub s_grid: Vec<f64>,
    /// Axis `k ∈ 1..=dim` for anisotropic studies.
    pub axis: usize,
    pub seed: u64,
    /// Record wall-clock time per row. Off by default so output files are
    /// reproducible byte for byte.
    pub timing: bool,
    pub plan: PlanConfig,
    pub limit: LimitConfig,
    /// Output directory; not part of the cache key.
    pub output: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            kind: StudyKind::BbmLimit,
            spec: "power".into(),
            spec_params: BTreeMap::new(),
            function: "cosbump".into(),
            dim: 1,
            s_grid: DEFAULT_S_GRID.to_vec(),
            axis: 1,
            seed: 0,
            timing: false,
            plan: PlanConfig::default(),
            limit: LimitConfig::default(),
            output: None,
        }
    }
}

impl StudyConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let c: StudyConfig = toml::from_str(text).map_err(|e| Error::Toml(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Toml(e.to_string()))
    }

    pub fn build_spec(&self) -> Result<YoungSpec> {
        preset(&self.spec, &self.spec_params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::UnsupportedDimension(self.dim));
        }
        if self.kind != StudyKind::PropertySuite {
            if self.s_grid.is_empty() {
                return Err(Error::Config("s grid is empty".into()));
            }
            if self.s_grid.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
                return Err(Error::Config("every s must lie in (0, 1)".into()));
            }
            if self.s_grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::Config("s grid must be strictly increasing".into()));
            }
            self.build_spec()?;
            by_id(&self.function, self.dim)?;
            if let Some(id) = self.kind.example_spec() {
                if self.spec != id {
                    return Err(Error::Config(format!(
                        "{} studies use the '{id}' spec, got '{}'",
                        self.kind.as_str(),
                        self.spec
                    )));
                }
            }
        }
        if self.kind == StudyKind::AnisoLimit && !(1..=self.dim).contains(&self.axis) {
            return Err(Error::Config(format!("axis {} out of range for dim {}", self.axis, self.dim)));
        }
        self.plan.to_plan(self.seed).validate()
    }

    /// File stem for emitted artifacts.
    pub fn stem(&self) -> String {
        let mut s = format!("{}-{}-{}-n{}", self.kind.as_str(), self.spec, self.function, self.dim);
        if self.kind == StudyKind::AnisoLimit {
            s.push_str(&format!("-k{}", self.axis));
        }
        if self.plan.method == PlanMethod::Mc {
            s.push_str("-mc");
        }
        s
    }
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// `id` or `id:key=value,key=value`.
    pub spec: Option<String>,
    pub function: Option<String>,
    pub dim: Option<usize>,
    /// Comma-separated list.
    pub s_grid: Option<String>,
    pub plan: Option<PlanMethod>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub axis: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, c: &mut StudyConfig) -> Result<()> {
        if let Some(spec) = &self.spec {
            let (id, params) = parse_spec_arg(spec)?;
            c.spec = id;
            c.spec_params = params;
        }
        if let Some(f) = &self.function {
            c.function = f.clone();
        }
        if let Some(d) = self.dim {
            c.dim = d;
        }
        if let Some(g) = &self.s_grid {
            c.s_grid = parse_list(g)?;
        }
        if let Some(m) = self.plan {
            c.plan.method = m;
        }
        if let Some(n) = self.samples {
            c.plan.samples = n;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(o) = &self.output {
            c.output = Some(o.clone());
        }
        if let Some(k) = self.axis {
            c.axis = k;
        }
        c.validate()
    }
}

/// Parse `id` or `id:key=value,...`.
pub fn parse_spec_arg(arg: &str) -> Result<(String, BTreeMap<String, f64>)> {
    let (id, rest) = match arg.split_once(':') {
        Some((id, rest)) => (id, rest),
        None => (arg, ""),
    };
    let mut params = BTreeMap::new();
    for kv in rest.split(',').filter(|s| !s.trim().is_empty()) {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got '{kv}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("'{v}' is not a number")))?;
        params.insert(k.trim().to_string(), v);
    }
    Ok((id.trim().to_string(), params))
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("'{t}' is not a number")))
        })
        .collect()
}
