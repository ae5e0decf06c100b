//! BBM-type asymptotics for fractional Musielak–Orlicz modulars.
//!
//! The crate evaluates the fractional modular `J_s(u)` of a test function,
//! its `(1−s)`-rescaled version, the pointwise limit `H₀`, and the
//! associated Luxemburg norms, and drives convergence studies over `s ↑ 1`.

pub mod error;
pub mod exec;
pub mod experiments;
pub mod limit;
pub mod luxemburg;
pub mod modular;
pub mod quadrature;
pub mod sphere;
pub mod test_functions;
pub mod young;

pub use error::{Error, Result};
pub use exec::Exec;
pub use limit::{grad_energy, h0_eval, H0Evaluator, H0Variant, SpatialQuad};
pub use modular::{modular_aniso, modular_js, scaled_modular, ModularResult, SamplingPlan};
pub use test_functions::TestFunction;
pub use young::{GrowthBounds, YoungSpec};
