//! Named fractional chaotic systems.
//!
//! Built-ins:
//!
//! ```text
//! T:        x' = a1 (y - x)          Rössler:  x' = -y - z
//!           y' = (c1 - a1) x - a1 x z           y' = x + a2 y
//!           z' = x y - b1 z                     z' = b2 + z (x - c2)
//! ```
//!
//! where `'` is the Caputo derivative of the component's own order.

use crate::error::{Error, Result};
use crate::solver::FractionalOrders;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

pub type Params = BTreeMap<String, f64>;

/// A vector field `f(t, state, out)`. Must be pure.
pub type FieldFn = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;

/// Orders used by every simulation of the reference systems.
pub const DEFAULT_ORDERS: [f64; 3] = [0.9, 0.5, 0.6];

#[derive(Clone)]
pub struct SystemDef {
    pub name: String,
    pub dimension: usize,
    pub params: Params,
    pub default_orders: FractionalOrders,
    field: FieldFn,
}

impl fmt::Debug for SystemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SystemDef")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("params", &self.params)
            .field("default_orders", &self.default_orders)
            .finish_non_exhaustive()
    }
}

impl SystemDef {
    /// User-defined system. `field` must write exactly `dimension` entries.
    pub fn custom(
        name: impl Into<String>,
        dimension: usize,
        params: Params,
        default_orders: FractionalOrders,
        field: FieldFn,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Config("system dimension must be positive".into()));
        }
        if default_orders.len() != dimension {
            return Err(Error::Config(format!(
                "{} default orders for a {dimension}-dimensional system",
                default_orders.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            dimension,
            params,
            default_orders,
            field,
        })
    }

    pub fn eval(&self, t: f64, state: &[f64], out: &mut [f64]) {
        (self.field)(t, state, out)
    }

    pub fn field(&self) -> &FieldFn {
        &self.field
    }

    pub fn param(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::Config(format!("system {} has no parameter {key}", self.name)))
    }

    /// Convenience for tests and one-off evaluations.
    pub fn derivative(&self, state: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension];
        self.eval(0.0, state, &mut out);
        out
    }
}

/// A named parameter set with where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPreset {
    pub system: &'static str,
    pub values: Params,
    pub provenance: &'static str,
}

fn params_of(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn t_preset() -> ParamPreset {
    ParamPreset {
        system: "t",
        values: params_of(&[("a1", 2.1), ("b1", 0.6), ("c1", 30.0)]),
        provenance: "chaotic parameter set for the fractional T system",
    }
}

pub fn rossler_preset() -> ParamPreset {
    ParamPreset {
        system: "rossler",
        values: params_of(&[("a2", 0.2), ("b2", 0.2), ("c2", 5.7)]),
        provenance: "classic chaotic Rössler parameter set",
    }
}

fn require(params: &Params, system: &str, keys: &[&str]) -> Result<Vec<f64>> {
    keys.iter()
        .map(|k| {
            params
                .get(*k)
                .copied()
                .ok_or_else(|| Error::Config(format!("system {system} requires parameter {k}")))
        })
        .collect()
}

fn default_orders() -> FractionalOrders {
    FractionalOrders::new(DEFAULT_ORDERS.to_vec()).expect("default orders are valid")
}

pub fn t_system(params: &Params) -> Result<SystemDef> {
    let p = require(params, "t", &["a1", "b1", "c1"])?;
    let (a1, b1, c1) = (p[0], p[1], p[2]);
    Ok(SystemDef {
        name: "t".into(),
        dimension: 3,
        params: params.clone(),
        default_orders: default_orders(),
        field: Arc::new(move |_t, s, out| {
            let (x, y, z) = (s[0], s[1], s[2]);
            out[0] = a1 * (y - x);
            out[1] = (c1 - a1) * x - a1 * x * z;
            out[2] = x * y - b1 * z;
        }),
    })
}

/// T system as written for the Rössler-driven response: the `x z` coupling
/// in the second equation carries the drive's `a2` instead of `a1`.
pub fn t_response_for_rossler(t_params: &Params, a2: f64) -> Result<SystemDef> {
    let p = require(t_params, "t", &["a1", "b1", "c1"])?;
    let (a1, b1, c1) = (p[0], p[1], p[2]);
    let mut params = t_params.clone();
    params.insert("a2".into(), a2);
    Ok(SystemDef {
        name: "t-rossler-response".into(),
        dimension: 3,
        params,
        default_orders: default_orders(),
        field: Arc::new(move |_t, s, out| {
            let (x, y, z) = (s[0], s[1], s[2]);
            out[0] = a1 * (y - x);
            out[1] = (c1 - a1) * x - a2 * x * z;
            out[2] = x * y - b1 * z;
        }),
    })
}

pub fn rossler_system(params: &Params) -> Result<SystemDef> {
    let p = require(params, "rossler", &["a2", "b2", "c2"])?;
    let (a2, b2, c2) = (p[0], p[1], p[2]);
    Ok(SystemDef {
        name: "rossler".into(),
        dimension: 3,
        params: params.clone(),
        default_orders: default_orders(),
        field: Arc::new(move |_t, s, out| {
            let (x, y, z) = (s[0], s[1], s[2]);
            out[0] = -y - z;
            out[1] = x + a2 * y;
            out[2] = b2 + z * (x - c2);
        }),
    })
}

/// Preset parameters for `name`, with `overrides` applied on top.
///
/// Override keys must name parameters of the system.
pub fn preset_params(name: &str, overrides: &Params) -> Result<Params> {
    let mut params = match name {
        "t" => t_preset().values,
        "rossler" => rossler_preset().values,
        other => {
            return Err(Error::Config(format!(
                "unknown system {other:?} (expected one of: t, rossler)"
            )))
        }
    };
    for (k, v) in overrides {
        match params.get_mut(k) {
            Some(slot) => *slot = *v,
            None => {
                return Err(Error::Config(format!(
                    "system {name} has no parameter {k}"
                )))
            }
        }
    }
    Ok(params)
}

/// Looks up a built-in system by name (`t` or `rossler`).
pub fn registry_lookup(name: &str, overrides: &Params) -> Result<SystemDef> {
    let params = preset_params(name, overrides)?;
    match name {
        "t" => t_system(&params),
        _ => rossler_system(&params),
    }
}

/// Names accepted by [`registry_lookup`].
pub const BUILTIN_SYSTEMS: [&str; 2] = ["t", "rossler"];
