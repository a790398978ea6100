use std::collections::BTreeMap;

use rayon::prelude::*;

use super::elbow::{elbow_fit, ElbowFit, DEFAULT_MIN_IMPROVEMENT};
use crate::collapse::{cc_run, sc_run, trajectory_seed, CollapseParams};
use crate::dynamics::{integrate, IntegratorConfig, NonlinearHamiltonian, Trajectory};
use crate::error::{Error, Result};
use crate::model::{make_initial_state, ModelParams, PotentialVariant};
use crate::observables::peak_dispersion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DynamicsKind {
    Hamiltonian,
    Cc,
    Sc,
}

impl DynamicsKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DynamicsKind::Hamiltonian => "hamiltonian",
            DynamicsKind::Cc => "cc",
            DynamicsKind::Sc => "sc",
        }
    }

    pub fn is_stochastic(self) -> bool {
        self != DynamicsKind::Hamiltonian
    }
}

impl std::str::FromStr for DynamicsKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hamiltonian" => Ok(DynamicsKind::Hamiltonian),
            "cc" => Ok(DynamicsKind::Cc),
            "sc" => Ok(DynamicsKind::Sc),
            other => Err(format!("expected `hamiltonian`, `cc` or `sc`, got `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub heights: Vec<f64>,
    pub w_values: Vec<f64>,
    /// Time window `(lo, hi)` searched for the peak dispersion.
    pub window: (f64, f64),
    pub model: ModelParams,
    pub integrator: IntegratorConfig,
    pub dynamics_kind: DynamicsKind,
    pub n_stochastic_reps: usize,
    pub base_seed: u64,
    pub collapse: CollapseParams,
    /// Relative SSE improvement required for a non-degenerate elbow.
    pub elbow_min_improvement: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            heights: (0..21).map(|i| i as f64 * 0.5).collect(),
            w_values: vec![0.0, 2.2],
            window: (1.0, 10.0),
            model: ModelParams::default(),
            integrator: IntegratorConfig::default(),
            dynamics_kind: DynamicsKind::Hamiltonian,
            n_stochastic_reps: 1,
            base_seed: 0,
            collapse: CollapseParams::default(),
            elbow_min_improvement: DEFAULT_MIN_IMPROVEMENT,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.heights.is_empty() {
            return Err(Error::invalid("heights", "must not be empty"));
        }
        if self.heights.windows(2).any(|p| p[0].is_nan() || p[0] >= p[1]) {
            return Err(Error::invalid("heights", "must be strictly increasing"));
        }
        if self.w_values.is_empty() {
            return Err(Error::invalid("w_values", "must not be empty"));
        }
        let (lo, hi) = self.window;
        if !(lo > 0.0 && lo <= hi && hi <= self.integrator.t_end) {
            return Err(Error::invalid(
                "window",
                format!("need 0 < lo <= hi <= t_end = {}, got [{lo}, {hi}]", self.integrator.t_end),
            ));
        }
        if self.n_stochastic_reps == 0 {
            return Err(Error::invalid("n_stochastic_reps", "must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.elbow_min_improvement) {
            return Err(Error::invalid("elbow_min_improvement", "must lie in [0, 1)"));
        }
        for &h in &self.heights {
            for &w in &self.w_values {
                self.model.with_height(h).with_w(w).validate()?;
            }
        }
        self.integrator.validate()?;
        self.collapse.validate()
    }

    fn reps(&self) -> usize {
        if self.dynamics_kind.is_stochastic() { self.n_stochastic_reps } else { 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub dynamics: DynamicsKind,
    pub w: f64,
    pub alpha: f64,
    pub height: f64,
    pub rep: usize,
    /// NaN when the cell failed.
    pub peak_dispersion: f64,
    pub t_peak: f64,
    /// `ok`, or the error that stopped the cell.
    pub status: String,
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WElbow {
    pub w: f64,
    pub fit: ElbowFit,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    /// One row per (w, height, rep), ordered by that key.
    pub rows: Vec<SweepRow>,
    /// Elbow fit of the mean curve, for every w where one could be fitted.
    pub elbows: Vec<WElbow>,
}

impl SweepResult {
    pub fn w_values(&self) -> Vec<f64> {
        let mut ws: Vec<f64> = self.rows.iter().map(|r| r.w).collect();
        ws.sort_by(f64::total_cmp);
        ws.dedup();
        ws
    }

    /// Mean peak dispersion over successful reps, per height, for one `w`.
    pub fn curve(&self, w: f64) -> Vec<(f64, f64)> {
        let mut acc: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
        for r in self.rows.iter().filter(|r| r.w == w && r.is_ok()) {
            let e = acc.entry(ordered_bits(r.height)).or_insert((r.height, 0.0, 0));
            e.1 += r.peak_dispersion;
            e.2 += 1;
        }
        acc.into_values().map(|(h, sum, n)| (h, sum / n as f64)).collect()
    }

    pub fn elbow(&self, w: f64) -> Option<&ElbowFit> {
        self.elbows.iter().find(|e| e.w == w).map(|e| &e.fit)
    }

    pub fn n_failed(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_ok()).count()
    }

    /// Fits an elbow to the mean curve of every `w` present in `rows`.
    /// Curves too short to fit are skipped with a warning.
    pub fn from_rows(rows: Vec<SweepRow>, min_improvement: f64) -> Self {
        let mut result = SweepResult { rows, elbows: Vec::new() };
        for w in result.w_values() {
            match elbow_fit(&result.curve(w), min_improvement) {
                Ok(fit) => result.elbows.push(WElbow { w, fit }),
                Err(e) => log::warn!("no elbow fit for w = {w}: {e}"),
            }
        }
        result
    }
}

/// Maps a float to a u64 whose unsigned order matches the float order.
fn ordered_bits(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 { !b } else { b | (1 << 63) }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one sweep cell. Depends on the cell's parameter values, not its
/// position in the grid.
pub fn cell_seed(base: u64, w: f64, alpha: f64, height: f64, rep: usize) -> u64 {
    let index = [w.to_bits(), alpha.to_bits(), height.to_bits(), rep as u64]
        .into_iter()
        .fold(0u64, |h, v| splitmix64(h ^ v));
    trajectory_seed(base, index)
}

fn trajectory_for(cfg: &SweepConfig, model: &ModelParams, rep: usize) -> Result<Trajectory> {
    let psi0 = make_initial_state(model)?;
    match cfg.dynamics_kind {
        DynamicsKind::Hamiltonian => integrate(&psi0, &NonlinearHamiltonian::from_model(model)?, &cfg.integrator),
        kind => {
            let seed = cell_seed(cfg.base_seed, model.w, model.alpha, model.potential.height, rep);
            let cp = cfg.collapse.with_seed(seed);
            if kind == DynamicsKind::Cc {
                cc_run(&psi0, model, &cp, &cfg.integrator)
            } else {
                sc_run(&psi0, model, &cp, &cfg.integrator).map(|(traj, _)| traj)
            }
        }
    }
}

/// Runs one (w, height, rep) cell. Failures become a row with status set.
pub fn run_cell(cfg: &SweepConfig, w: f64, height: f64, rep: usize) -> SweepRow {
    let model = cfg.model.with_height(height).with_w(w);
    let outcome = trajectory_for(cfg, &model, rep).and_then(|t| peak_dispersion(&t, cfg.window.0, cfg.window.1));
    let (peak_dispersion, t_peak, status) = match outcome {
        Ok((p, t)) => (p, t, "ok".to_string()),
        Err(e) => {
            log::warn!("cell w={w} height={height} rep={rep} failed: {e}");
            (f64::NAN, f64::NAN, e.to_string())
        }
    };
    SweepRow { dynamics: cfg.dynamics_kind, w, alpha: model.alpha, height, rep, peak_dispersion, t_peak, status }
}

/// Peak dispersion over the window for every (w, height, rep) cell, run in
/// parallel on the current rayon pool.
pub fn run_height_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for &w in &cfg.w_values {
        for &h in &cfg.heights {
            for rep in 0..cfg.reps() {
                cells.push((w, h, rep));
            }
        }
    }
    let mut rows: Vec<SweepRow> = cells.par_iter().map(|&(w, h, rep)| run_cell(cfg, w, h, rep)).collect();
    rows.sort_by(|a, b| {
        a.w.total_cmp(&b.w).then(a.height.total_cmp(&b.height)).then(a.rep.cmp(&b.rep))
    });
    Ok(SweepResult::from_rows(rows, cfg.elbow_min_improvement))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RobustnessVariant {
    Baseline,
    /// Potential replaced by its two-part form.
    Piecewise,
    /// Micro–macro coupling scaled by 0.1.
    AlphaTenth,
}

impl RobustnessVariant {
    pub const ALL: [RobustnessVariant; 3] =
        [RobustnessVariant::Baseline, RobustnessVariant::Piecewise, RobustnessVariant::AlphaTenth];

    pub fn as_str(self) -> &'static str {
        match self {
            RobustnessVariant::Baseline => "baseline",
            RobustnessVariant::Piecewise => "piecewise",
            RobustnessVariant::AlphaTenth => "alpha_tenth",
        }
    }

    pub fn apply(self, cfg: &SweepConfig) -> SweepConfig {
        let mut c = cfg.clone();
        match self {
            RobustnessVariant::Baseline => {}
            RobustnessVariant::Piecewise => c.model.potential.variant = PotentialVariant::Piecewise,
            RobustnessVariant::AlphaTenth => c.model.alpha *= 0.1,
        }
        c
    }
}

/// The sweep under the baseline model, the piecewise potential and a tenfold
/// weaker micro–macro coupling.
pub fn run_robustness_suite(cfg: &SweepConfig) -> Result<BTreeMap<RobustnessVariant, SweepResult>> {
    RobustnessVariant::ALL.iter().map(|&v| Ok((v, run_height_sweep(&v.apply(cfg))?))).collect()
}
