//! Monte Carlo drivers for the null-density, size, and power studies.
//!
//! Every replicate gets its own seed derived from the scenario seed and the
//! replicate index. Replicates run on the rayon pool and are reduced in index
//! order, so tables do not depend on the number of worker threads.

pub mod design;
pub mod profile;

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed;
use crate::tracy_widom;
use crate::two_sample_test::{self, BootstrapSetting, TestConfig};

pub use design::{DesignRegistry, SamplePair, ScenarioDesign};
pub use profile::{Profile, ProfileKind, ProfileRegistry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Both samples from one model.
    Null,
    /// `g_x = g_y`, `B_x != B_y`.
    AltB,
    /// `B_x = B_y`, `g_x != g_y`.
    AltG,
    /// `K_x != K_y`.
    AltK,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScenarioKind::Null => "null",
            ScenarioKind::AltB => "alt_b",
            ScenarioKind::AltG => "alt_g",
            ScenarioKind::AltK => "alt_k",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelScheme {
    EqualBlocks,
    Multinomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioSize {
    /// Nodes per community of `X`; `n = size * K_x`.
    CommunitySize(usize),
    Nodes(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub k_x: usize,
    pub k_y: usize,
    /// Sparsity scale of the block matrices.
    pub r: f64,
    pub size: ScenarioSize,
    pub label_scheme: LabelScheme,
    pub reps: usize,
    pub seed: u64,
    /// Null block matrix is `r (null_base + null_bump * 1(u = v))`.
    pub null_base: f64,
    pub null_bump: f64,
    pub bootstrap: BootstrapSetting,
    /// Largest community count tried by sequential selection.
    pub k_max: usize,
    /// Cluster with the generating `(K_x, K_y)` instead of selecting them.
    pub known_k: bool,
    /// Level of the one-sample tests used for community-count selection.
    pub selection_alpha: f64,
}

impl Scenario {
    /// Defaults follow the simulation designs: `K_y = K_x + 2` for the
    /// community-count alternative, multinomial `g_y` for the label
    /// alternative, 200 replicates, 50 bootstrap replicates.
    pub fn new(kind: ScenarioKind, k_x: usize, r: f64, size: ScenarioSize) -> Self {
        Self {
            kind,
            k_x,
            k_y: if kind == ScenarioKind::AltK { k_x + 2 } else { k_x },
            r,
            size,
            label_scheme: if kind == ScenarioKind::AltG { LabelScheme::Multinomial } else { LabelScheme::EqualBlocks },
            reps: 200,
            seed: 0,
            null_base: 1.0,
            null_bump: 3.0,
            bootstrap: BootstrapSetting::Replicates(two_sample_test::DEFAULT_BOOTSTRAP_REPLICATES),
            k_max: 10,
            known_k: false,
            selection_alpha: 0.05,
        }
    }

    pub fn with_reps(mut self, reps: usize) -> Self {
        self.reps = reps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_bootstrap(mut self, bootstrap: BootstrapSetting) -> Self {
        self.bootstrap = bootstrap;
        self
    }

    pub fn with_known_k(mut self, known_k: bool) -> Self {
        self.known_k = known_k;
        self
    }

    pub fn n(&self) -> usize {
        match self.size {
            ScenarioSize::CommunitySize(s) => s * self.k_x,
            ScenarioSize::Nodes(n) => n,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_x == 0 || self.k_y == 0 {
            return Err(Error::Config("community counts must be positive".into()));
        }
        if !(self.r > 0.0 && self.r <= 0.25) {
            return Err(Error::Config(format!("r = {} must lie in (0, 0.25]", self.r)));
        }
        if self.reps == 0 {
            return Err(Error::Config("at least one replicate is needed".into()));
        }
        if self.n() < 2 * self.k_x.max(self.k_y) {
            return Err(Error::Config(format!("{} nodes are too few for {} communities", self.n(), self.k_x.max(self.k_y))));
        }
        Ok(())
    }

    fn test_config(&self, seed: u64) -> TestConfig {
        TestConfig {
            alpha: self.selection_alpha,
            k_max: self.k_max,
            fixed_k: self.known_k.then_some((self.k_x, self.k_y)),
            bootstrap: self.bootstrap,
            seed,
        }
    }
}

/// Statistics from one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicateOutcome {
    pub t_n: f64,
    pub t_n_boot: Option<f64>,
    pub khat_x: usize,
    pub khat_y: usize,
}

/// Generate and test every replicate of a scenario. Failed replicates are
/// returned as errors in their slot.
pub fn run_replicates(scenario: &Scenario, registry: &DesignRegistry) -> Result<Vec<Result<ReplicateOutcome>>> {
    scenario.validate()?;
    let design = registry.for_kind(scenario.kind)?;
    Ok((0..scenario.reps)
        .into_par_iter()
        .map(|rep| {
            let rep_seed = seed::derive(scenario.seed, rep as u64);
            let pair = design.generate(scenario, rep_seed)?;
            let report = two_sample_test::run_two_sample_test(&pair.x, &pair.y, &scenario.test_config(rep_seed))?;
            Ok(ReplicateOutcome {
                t_n: report.t_n,
                t_n_boot: report.t_n_boot,
                khat_x: report.khat_x,
                khat_y: report.khat_y,
            })
        })
        .collect())
}

/// One scenario cell of a size or power table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub kind: ScenarioKind,
    pub k_x: usize,
    pub k_y: usize,
    pub r: f64,
    pub n: usize,
    pub alpha: f64,
    pub reps: usize,
    pub failures: usize,
    pub rejection_rate_tn: Option<f64>,
    pub rejection_rate_tnboot: Option<f64>,
    pub mean_tn: Option<f64>,
    pub mean_tnboot: Option<f64>,
    pub seed: u64,
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentTable {
    pub rows: Vec<ExperimentRow>,
}

impl ExperimentTable {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn extend(&mut self, other: ExperimentTable) {
        self.rows.extend(other.rows);
    }
}

/// Upper `alpha/2` TW1 quantile; every statistic exceeds the threshold at
/// `alpha >= 1`.
fn critical_value(alpha: f64) -> Result<f64> {
    if alpha >= 1.0 {
        Ok(f64::NEG_INFINITY)
    } else if alpha > 0.0 {
        tracy_widom::tw1_quantile(1.0 - alpha / 2.0)
    } else {
        Err(Error::Config(format!("alpha = {alpha} must be positive")))
    }
}

fn rate_and_mean(values: &[f64], critical: f64) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let m = values.len() as f64;
    let rejected = values.iter().filter(|&&t| t >= critical).count() as f64;
    (Some(rejected / m), Some(values.iter().sum::<f64>() / m))
}

/// Summarise replicate outcomes at level `alpha`.
pub fn summarise(scenario: &Scenario, outcomes: &[Result<ReplicateOutcome>], alpha: f64, elapsed_secs: f64) -> Result<ExperimentRow> {
    let critical = critical_value(alpha)?;
    let ok: Vec<&ReplicateOutcome> = outcomes.iter().filter_map(|o| o.as_ref().ok()).collect();
    let t_n: Vec<f64> = ok.iter().map(|o| o.t_n).collect();
    let t_boot: Vec<f64> = ok.iter().filter_map(|o| o.t_n_boot).collect();
    let (rejection_rate_tn, mean_tn) = rate_and_mean(&t_n, critical);
    let (rejection_rate_tnboot, mean_tnboot) = rate_and_mean(&t_boot, critical);
    Ok(ExperimentRow {
        kind: scenario.kind,
        k_x: scenario.k_x,
        k_y: scenario.k_y,
        r: scenario.r,
        n: scenario.n(),
        alpha,
        reps: scenario.reps,
        failures: outcomes.len() - ok.len(),
        rejection_rate_tn,
        rejection_rate_tnboot,
        mean_tn,
        mean_tnboot,
        seed: scenario.seed,
        elapsed_secs,
    })
}

fn run_experiment(scenario: &Scenario, alpha: f64, registry: &DesignRegistry) -> Result<ExperimentTable> {
    critical_value(alpha)?;
    let start = Instant::now();
    let outcomes = run_replicates(scenario, registry)?;
    let row = summarise(scenario, &outcomes, alpha, start.elapsed().as_secs_f64())?;
    Ok(ExperimentTable { rows: vec![row] })
}

/// Empirical size: replicate pairs drawn from one model.
pub fn run_size_experiment(scenario: &Scenario, alpha: f64) -> Result<ExperimentTable> {
    if scenario.kind != ScenarioKind::Null {
        return Err(Error::Config(format!("size experiments need a null scenario, got {}", scenario.kind)));
    }
    run_experiment(scenario, alpha, &DesignRegistry::builtin())
}

/// Empirical power under one of the alternative designs.
pub fn run_power_experiment(scenario: &Scenario, alpha: f64) -> Result<ExperimentTable> {
    if scenario.kind == ScenarioKind::Null {
        return Err(Error::Config("power experiments need an alternative scenario".into()));
    }
    run_experiment(scenario, alpha, &DesignRegistry::builtin())
}

/// Run a scenario of any kind with a caller-supplied registry.
pub fn run_with_registry(scenario: &Scenario, alpha: f64, registry: &DesignRegistry) -> Result<ExperimentTable> {
    run_experiment(scenario, alpha, registry)
}

/// Null scenario of the density study: three equal blocks,
/// `B = 0.1 (1 + 4 * 1(u = v))`, known community count, 50 bootstrap
/// replicates.
pub fn null_density_scenario(n: usize, reps: usize, seed: u64) -> Scenario {
    let mut s = Scenario::new(ScenarioKind::Null, 3, 0.1, ScenarioSize::Nodes(n))
        .with_reps(reps)
        .with_seed(seed)
        .with_known_k(true);
    s.null_bump = 4.0;
    s
}

/// Paired `(T_n, T_n^boot)` under the density-study null.
pub fn null_density_experiment(n: usize, reps: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if n < 100 || reps < 100 {
        return Err(Error::Config(format!("density study needs n >= 100 and reps >= 100, got n = {n}, reps = {reps}")));
    }
    null_density_samples(&null_density_scenario(n, reps, seed))
}

/// Density samples for an arbitrary null scenario with bootstrap enabled.
pub fn null_density_samples(scenario: &Scenario) -> Result<Vec<(f64, f64)>> {
    if scenario.kind != ScenarioKind::Null {
        return Err(Error::Config("density samples need a null scenario".into()));
    }
    if scenario.bootstrap.replicates(scenario.n()).is_none() {
        return Err(Error::Config("density samples need the bootstrap".into()));
    }
    run_replicates(scenario, &DesignRegistry::builtin())?
        .into_iter()
        .map(|o| o.map(|o| (o.t_n, o.t_n_boot.expect("bootstrap enabled"))))
        .collect()
}

/// Write density samples as a two-column CSV `t_n,t_n_boot`.
pub fn write_density_csv<W: Write>(samples: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t_n", "t_n_boot"])?;
    for (t, b) in samples {
        w.write_record([t.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
