//! Serialized test reports.
//!
//! Labels are written 1-based. The JSON form rejects unknown fields when read
//! back, so a replayed report always matches the schema it claims.

use std::io::Write;
use std::path::PathBuf;

use sbm_twosample::community::{probability_bounds, KSelectionTrace};
use sbm_twosample::TestReport;
use serde::{Deserialize, Serialize};

use crate::edge_list::AlignMode;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub x: PathBuf,
    pub y: PathBuf,
    pub align: AlignMode,
    pub nodes_x: usize,
    pub nodes_y: usize,
    pub dropped_x: usize,
    pub dropped_y: usize,
    pub self_loops_x: usize,
    pub self_loops_y: usize,
    pub duplicates_x: usize,
    pub duplicates_y: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub k_max: usize,
    pub fixed_k: Option<[usize; 2]>,
    /// `auto`, `off`, or a replicate count.
    pub bootstrap: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub master: u64,
    pub cluster_x: u64,
    pub cluster_y: u64,
    pub bootstrap: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bootstrap {
    pub replicates: usize,
    pub mean_largest: f64,
    pub sd_largest: f64,
    pub mean_neg_smallest: f64,
    pub sd_neg_smallest: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Clamp {
    pub count: usize,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionStep {
    pub k0: usize,
    pub statistic: f64,
    pub critical: f64,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Selection {
    pub method: String,
    pub tried: Vec<SelectionStep>,
    pub selected: usize,
    pub exhausted: bool,
}

impl From<&KSelectionTrace> for Selection {
    fn from(t: &KSelectionTrace) -> Self {
        Self {
            method: KSelectionTrace::METHOD.to_string(),
            tried: t
                .tried
                .iter()
                .map(|s| SelectionStep { k0: s.k0, statistic: s.statistic, critical: s.critical, rejected: s.rejected })
                .collect(),
            selected: t.selected,
            exhausted: t.exhausted,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsonReport {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub inputs: Inputs,
    pub config: RunConfig,
    pub seeds: Seeds,
    pub n: usize,
    pub node_ids: Vec<String>,
    pub khat_x: usize,
    pub khat_y: usize,
    pub ghat_x: Vec<usize>,
    pub ghat_y: Vec<usize>,
    pub bhat_x: Vec<Vec<f64>>,
    pub bhat_y: Vec<Vec<f64>>,
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub t_n: f64,
    pub t_n_boot: Option<f64>,
    pub bootstrap: Option<Bootstrap>,
    pub critical: f64,
    pub alpha: f64,
    pub p_value_bound: f64,
    pub decision: String,
    pub k_mismatch: bool,
    pub clamp: Clamp,
    pub selection_x: Option<Selection>,
    pub selection_y: Option<Selection>,
}

impl JsonReport {
    pub fn new(report: &TestReport, inputs: Inputs, config: RunConfig, node_ids: Vec<String>) -> Self {
        let (lower, upper) = probability_bounds(report.n).unwrap_or((0.0, 1.0));
        Self {
            schema_version: SCHEMA_VERSION,
            tool: TOOL.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            inputs,
            config,
            seeds: Seeds {
                master: report.seeds.master,
                cluster_x: report.seeds.cluster_x,
                cluster_y: report.seeds.cluster_y,
                bootstrap: report.seeds.bootstrap,
            },
            n: report.n,
            node_ids,
            khat_x: report.khat_x,
            khat_y: report.khat_y,
            ghat_x: report.ghat_x.one_based(),
            ghat_y: report.ghat_y.one_based(),
            bhat_x: report.bhat_x.rows(),
            bhat_y: report.bhat_y.rows(),
            lambda_max: report.lambda_max,
            lambda_min: report.lambda_min,
            t_n: report.t_n,
            t_n_boot: report.t_n_boot,
            bootstrap: report.bootstrap.as_ref().map(|b| Bootstrap {
                replicates: b.replicates,
                mean_largest: b.mean_largest,
                sd_largest: b.sd_largest,
                mean_neg_smallest: b.mean_neg_smallest,
                sd_neg_smallest: b.sd_neg_smallest,
            }),
            critical: report.critical,
            alpha: report.alpha,
            p_value_bound: report.p_value_bound,
            decision: report.decision.as_str().to_string(),
            k_mismatch: report.k_mismatch,
            clamp: Clamp { count: report.clamp_count, lower, upper },
            selection_x: report.selection_x.as_ref().map(Selection::from),
            selection_y: report.selection_y.as_ref().map(Selection::from),
        }
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let report: Self = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(format!("schema version {} is not supported (expected {SCHEMA_VERSION})", report.schema_version));
        }
        Ok(report)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    /// One header row and one value row of the scalar fields.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.serialize(CsvRow {
            schema_version: self.schema_version,
            n: self.n,
            khat_x: self.khat_x,
            khat_y: self.khat_y,
            lambda_max: self.lambda_max,
            lambda_min: self.lambda_min,
            t_n: self.t_n,
            t_n_boot: self.t_n_boot,
            critical: self.critical,
            alpha: self.alpha,
            p_value_bound: self.p_value_bound,
            decision: &self.decision,
            k_mismatch: self.k_mismatch,
            clamp_count: self.clamp.count,
            seed: self.seeds.master,
            bootstrap_seed: self.seeds.bootstrap,
        })?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    schema_version: u32,
    n: usize,
    khat_x: usize,
    khat_y: usize,
    lambda_max: f64,
    lambda_min: f64,
    t_n: f64,
    t_n_boot: Option<f64>,
    critical: f64,
    alpha: f64,
    p_value_bound: f64,
    decision: &'a str,
    k_mismatch: bool,
    clamp_count: usize,
    seed: u64,
    bootstrap_seed: Option<u64>,
}
