//! Flat `key = value` run configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Every key has a default,
//! unknown keys are rejected, and command-line overrides win over the file.
//! List-valued keys accept `a, b, c` or the inclusive range `start:stop:count`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::collapse::CollapseParams;
use crate::dynamics::{IntegratorConfig, IntegratorOrder};
use crate::error::{Error, Result};
use crate::experiments::{DynamicsKind, SweepConfig, DEFAULT_MIN_IMPROVEMENT};
use crate::model::{make_initial_state, ModelParams};
use crate::observables::DEFAULT_CAT_THRESHOLD;

/// Every accepted key with a one-line description, in `resolved()` order.
pub const KEYS: &[(&str, &str)] = &[
    ("n_macro", "number of macro qubits"),
    ("sector", "symmetric (Dicke) or full spin space"),
    ("max_full_n_macro", "largest n_macro accepted in the full sector"),
    ("w", "nonlinear coupling for single runs"),
    ("alpha", "micro-macro coupling"),
    ("b", "macro J_x coefficient"),
    ("micro_field", "micro sigma_x coefficient"),
    ("height", "hill height for single runs"),
    ("width", "well position"),
    ("potential", "standard or piecewise"),
    ("disp_epsilon", "regularizer of the dispersion functional"),
    ("initial_band_halfwidth", "initial macro band |m| <= halfwidth"),
    ("dt", "integrator step"),
    ("t_end", "final time"),
    ("omega_binding", "binding between the two phase-space copies"),
    ("sample_every", "steps between recorded samples"),
    ("order", "integrator order, 2 or 4"),
    ("divergence_bound", "largest tolerated copy divergence"),
    ("rate_lambda", "collapse rate per macro qubit"),
    ("localization_width", "collapse localization width"),
    ("seed", "base seed for stochastic runs"),
    ("dynamics", "hamiltonian, cc or sc"),
    ("heights", "sweep heights"),
    ("w_values", "sweep couplings"),
    ("window", "peak-search window lo, hi"),
    ("n_stochastic_reps", "repetitions per stochastic sweep cell"),
    ("elbow_min_improvement", "relative SSE gain needed for an elbow"),
    ("cat_threshold", "dispersion above which a state is a cat"),
    ("histogram_times", "times at which run writes density histograms (nearest sample)"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub integrator: IntegratorConfig,
    pub collapse: CollapseParams,
    pub dynamics: DynamicsKind,
    pub heights: Vec<f64>,
    pub w_values: Vec<f64>,
    pub window: (f64, f64),
    pub n_stochastic_reps: usize,
    pub elbow_min_improvement: f64,
    pub cat_threshold: f64,
    pub histogram_times: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sweep = SweepConfig::default();
        Self {
            model: ModelParams::default(),
            integrator: IntegratorConfig::default(),
            collapse: CollapseParams::default(),
            dynamics: DynamicsKind::Hamiltonian,
            heights: sweep.heights,
            w_values: sweep.w_values,
            window: sweep.window,
            n_stochastic_reps: 10,
            elbow_min_improvement: DEFAULT_MIN_IMPROVEMENT,
            cat_threshold: DEFAULT_CAT_THRESHOLD,
            histogram_times: vec![0.0, 5.0, 10.0],
        }
    }
}

fn num<T: FromStr>(v: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("cannot parse `{v}`: {e}"))
}

fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("range `{v}` must be start:stop:count"));
        };
        let (a, b, n): (f64, f64, usize) = (num(a)?, num(b)?, num(n)?);
        return Ok(match n {
            0 => vec![],
            1 => vec![a],
            _ => (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect(),
        });
    }
    if v.trim().is_empty() {
        return Ok(vec![]);
    }
    v.split(',').map(|s| num::<f64>(s.trim())).collect()
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let v = value.trim();
        match key {
            "n_macro" => self.model.n_macro = num(v)?,
            "sector" => self.model.sector = v.parse()?,
            "max_full_n_macro" => self.model.max_full_n_macro = num(v)?,
            "w" => self.model.w = num(v)?,
            "alpha" => self.model.alpha = num(v)?,
            "b" => self.model.b = num(v)?,
            "micro_field" => self.model.micro_field = num(v)?,
            "height" => self.model.potential.height = num(v)?,
            "width" => self.model.potential.width = num(v)?,
            "potential" => self.model.potential.variant = v.parse()?,
            "disp_epsilon" => self.model.disp_epsilon = num(v)?,
            "initial_band_halfwidth" => self.model.initial_band_halfwidth = num(v)?,
            "dt" => self.integrator.dt = num(v)?,
            "t_end" => self.integrator.t_end = num(v)?,
            "omega_binding" => self.integrator.omega_binding = num(v)?,
            "sample_every" => self.integrator.sample_every = num(v)?,
            "order" => {
                self.integrator.order =
                    IntegratorOrder::from_u32(num(v)?).ok_or_else(|| format!("order must be 2 or 4, got `{v}`"))?
            }
            "divergence_bound" => self.integrator.divergence_bound = num(v)?,
            "rate_lambda" => self.collapse.rate_lambda = num(v)?,
            "localization_width" => self.collapse.localization_width = num(v)?,
            "seed" => self.collapse.rng_seed = num(v)?,
            "dynamics" => self.dynamics = v.parse()?,
            "heights" => self.heights = list(v)?,
            "w_values" => self.w_values = list(v)?,
            "window" => {
                let w = list(v)?;
                let [lo, hi] = w[..] else {
                    return Err(format!("window needs two values `lo, hi`, got `{v}`"));
                };
                self.window = (lo, hi);
            }
            "n_stochastic_reps" => self.n_stochastic_reps = num(v)?,
            "elbow_min_improvement" => self.elbow_min_improvement = num(v)?,
            "cat_threshold" => self.cat_threshold = num(v)?,
            "histogram_times" => self.histogram_times = list(v)?,
            _ => return Err("unknown key".to_string()),
        }
        Ok(())
    }

    /// Textual value of a key, in a form that parses back to the same value.
    pub fn get(&self, key: &str) -> Option<String> {
        let m = &self.model;
        let i = &self.integrator;
        Some(match key {
            "n_macro" => m.n_macro.to_string(),
            "sector" => m.sector.as_str().to_string(),
            "max_full_n_macro" => m.max_full_n_macro.to_string(),
            "w" => format!("{:?}", m.w),
            "alpha" => format!("{:?}", m.alpha),
            "b" => format!("{:?}", m.b),
            "micro_field" => format!("{:?}", m.micro_field),
            "height" => format!("{:?}", m.potential.height),
            "width" => format!("{:?}", m.potential.width),
            "potential" => m.potential.variant.as_str().to_string(),
            "disp_epsilon" => format!("{:?}", m.disp_epsilon),
            "initial_band_halfwidth" => m.initial_band_halfwidth.to_string(),
            "dt" => format!("{:?}", i.dt),
            "t_end" => format!("{:?}", i.t_end),
            "omega_binding" => format!("{:?}", i.omega_binding),
            "sample_every" => i.sample_every.to_string(),
            "order" => i.order.as_u32().to_string(),
            "divergence_bound" => format!("{:?}", i.divergence_bound),
            "rate_lambda" => format!("{:?}", self.collapse.rate_lambda),
            "localization_width" => format!("{:?}", self.collapse.localization_width),
            "seed" => self.collapse.rng_seed.to_string(),
            "dynamics" => self.dynamics.as_str().to_string(),
            "heights" => join(&self.heights),
            "w_values" => join(&self.w_values),
            "window" => join(&[self.window.0, self.window.1]),
            "n_stochastic_reps" => self.n_stochastic_reps.to_string(),
            "elbow_min_improvement" => format!("{:?}", self.elbow_min_improvement),
            "cat_threshold" => format!("{:?}", self.cat_threshold),
            "histogram_times" => join(&self.histogram_times),
            _ => return None,
        })
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            heights: self.heights.clone(),
            w_values: self.w_values.clone(),
            window: self.window,
            model: self.model.clone(),
            integrator: self.integrator.clone(),
            dynamics_kind: self.dynamics,
            n_stochastic_reps: self.n_stochastic_reps,
            base_seed: self.collapse.rng_seed,
            collapse: self.collapse.clone(),
            elbow_min_improvement: self.elbow_min_improvement,
        }
    }

    fn check(&self) -> Result<()> {
        self.model.validate()?;
        make_initial_state(&self.model)?;
        self.sweep_config().validate()?;
        if !(self.cat_threshold.is_finite() && self.cat_threshold >= 0.0) {
            return Err(Error::invalid("cat_threshold", "must be finite and >= 0"));
        }
        if self.histogram_times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::invalid("histogram_times", "times must be finite and >= 0"));
        }
        Ok(())
    }

    /// Effective configuration, one documented `key = value` line per key.
    pub fn resolved(&self) -> String {
        let mut out = String::new();
        for (key, doc) in KEYS {
            let value = self.get(key).expect("every listed key has a value");
            let _ = writeln!(out, "# {doc}\n{key} = {value}");
        }
        out
    }
}

/// Splits `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    match s.split_once('=') {
        Some((k, v)) => Ok((k.trim().to_string(), v.trim().to_string())),
        None => Err(Error::Parse(format!("override `{s}` is not key=value"))),
    }
}

/// Parses a config file, applies `overrides` on top and validates the result.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut origin: BTreeMap<String, String> = BTreeMap::new();
    let fail = |key: &str, origin: &str, reason: String| Error::Config {
        key: key.to_string(),
        origin: origin.to_string(),
        reason,
    };
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = format!("line {}", n + 1);
        let Some((key, value)) = line.split_once('=') else {
            return Err(fail(line, &at, "expected `key = value`".to_string()));
        };
        let key = key.trim();
        cfg.set(key, value).map_err(|r| fail(key, &at, r))?;
        origin.insert(key.to_string(), at);
    }
    for (key, value) in overrides {
        cfg.set(key, value).map_err(|r| fail(key, "override", r))?;
        origin.insert(key.clone(), "override".to_string());
    }
    cfg.check().map_err(|e| {
        let key = match &e {
            Error::InvalidParameter { name, .. } => *name,
            Error::DimensionTooLarge { .. } => "n_macro",
            _ => return e,
        };
        let at = origin.get(key).map_or("default", String::as_str);
        fail(key, at, e.to_string())
    })?;
    Ok(cfg)
}
