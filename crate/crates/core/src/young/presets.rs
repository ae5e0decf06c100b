//! Named specs used by the experiment configs and the property suite.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Field, FieldShape, PowerLog1p, YoungSpec};
use crate::error::{Error, Result};

pub const PRESET_IDS: [&str; 5] = ["power", "doublephase", "log", "varexp", "spacefree"];

/// Build a preset, overriding its numeric parameters from `params`.
///
/// | id | G | parameters (defaults) |
/// |----|---|-----------------------|
/// | `power` | `t^p` | `p` (2) |
/// | `doublephase` | `t^q + a(y) t^p`, `a = base + amp·exp(−\|y\|²/width²)` | `q` (2), `p` (3), `base` (1), `amp` (0.5), `width` (1) |
/// | `log` | `a t^p (log⁺t + 1)` | `p` (2), `a` (1) |
/// | `varexp` | `a t^{p(y)}`, `p = base + amp·exp(−\|y\|²/width²)` | `base` (2), `amp` (0.5), `width` (1), `a` (1) |
/// | `spacefree` | `t^p log(1 + t)` | `p` (2) |
pub fn preset(id: &str, params: &BTreeMap<String, f64>) -> Result<YoungSpec> {
    let known: &[&str] = match id {
        "power" | "spacefree" => &["p"],
        "doublephase" => &["q", "p", "base", "amp", "width"],
        "log" => &["p", "a"],
        "varexp" => &["base", "amp", "width", "a"],
        _ => return Err(Error::Config(format!("unknown spec '{id}'"))),
    };
    if let Some(k) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::Config(format!("spec '{id}' has no parameter '{k}'")));
    }
    let get = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    match id {
        "power" => YoungSpec::power(get("p", 2.0)),
        "spacefree" => YoungSpec::space_free(Arc::new(PowerLog1p { p: get("p", 2.0) })),
        "doublephase" => YoungSpec::double_phase(
            get("q", 2.0),
            get("p", 3.0),
            Field::builtin(FieldShape::SmoothBumpModulated {
                base: get("base", 1.0),
                amp: get("amp", 0.5),
                width: get("width", 1.0),
            }),
        ),
        "log" => YoungSpec::power_log(get("p", 2.0), Field::constant(get("a", 1.0))),
        "varexp" => YoungSpec::variable_exponent(
            Field::builtin(FieldShape::SmoothBumpModulated {
                base: get("base", 2.0),
                amp: get("amp", 0.5),
                width: get("width", 1.0),
            }),
            Field::constant(get("a", 1.0)),
        ),
        _ => unreachable!(),
    }
}

/// Every preset with default parameters.
pub fn builtin_specs() -> Vec<(&'static str, YoungSpec)> {
    PRESET_IDS
        .iter()
        .map(|id| (*id, preset(id, &BTreeMap::new()).expect("defaults are valid")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        assert_eq!(builtin_specs().len(), 5);
        let mut p = BTreeMap::new();
        p.insert("p".to_string(), 3.0);
        let s = preset("power", &p).unwrap();
        assert_eq!(s.value(&[0.0], &[0.0], 2.0), 8.0);
        let v = preset("varexp", &BTreeMap::new()).unwrap();
        assert_eq!((v.bounds().p_minus, v.bounds().p_plus), (2.0, 2.5));
        assert!(preset("nope", &BTreeMap::new()).is_err());
        p.insert("zz".to_string(), 1.0);
        assert!(preset("power", &p).is_err());
    }
}
