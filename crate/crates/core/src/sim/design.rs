//! Data-generating designs for the size and power studies.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use super::{LabelScheme, Scenario, ScenarioKind};
use crate::error::{Error, Result};
use crate::graph_model::{self, AdjacencyMatrix, BlockProbabilityMatrix, CommunityLabeling};
use crate::seed::{self, label};

/// One simulated pair of networks with the models that generated them.
#[derive(Debug, Clone)]
pub struct SamplePair {
    pub x: AdjacencyMatrix,
    pub y: AdjacencyMatrix,
    pub g_x: CommunityLabeling,
    pub g_y: CommunityLabeling,
    pub b_x: BlockProbabilityMatrix,
    pub b_y: BlockProbabilityMatrix,
}

/// A recipe for the two generating models of a scenario.
pub trait ScenarioDesign: Send + Sync {
    fn name(&self) -> &'static str;

    fn kind(&self) -> ScenarioKind;

    /// `(g_x, B_x, g_y, B_y)` for one replicate.
    fn models(
        &self,
        scenario: &Scenario,
        rep_seed: u64,
    ) -> Result<(CommunityLabeling, BlockProbabilityMatrix, CommunityLabeling, BlockProbabilityMatrix)>;

    fn generate(&self, scenario: &Scenario, rep_seed: u64) -> Result<SamplePair> {
        let (g_x, b_x, g_y, b_y) = self.models(scenario, rep_seed)?;
        let x = graph_model::sample_sbm(&g_x, &b_x, seed::derive(rep_seed, label::SAMPLE_X))?;
        let y = graph_model::sample_sbm(&g_y, &b_y, seed::derive(rep_seed, label::SAMPLE_Y))?;
        Ok(SamplePair { x, y, g_x, g_y, b_x, b_y })
    }
}

impl fmt::Debug for dyn ScenarioDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScenarioDesign").field("name", &self.name()).finish()
    }
}

/// `r (base + bump * 1(u = v))`, rejecting values outside `[0, 1]`.
fn scaled_block(k: usize, r: f64, base: f64, bump: f64) -> Result<BlockProbabilityMatrix> {
    let within = r * (base + bump);
    let between = r * base;
    if !(r > 0.0) || within > 1.0 || between > 1.0 {
        return Err(Error::Config(format!(
            "r = {r} gives probabilities ({within}, {between}) outside (0, 1]"
        )));
    }
    BlockProbabilityMatrix::planted(k, within, between)
}

/// Labels drawn i.i.d. uniform over `k` communities, redrawn until no
/// community is empty.
pub fn multinomial_labels(n: usize, k: usize, seed: u64) -> Result<CommunityLabeling> {
    if k == 0 || k > n {
        return Err(Error::Config(format!("cannot draw {k} nonempty communities over {n} nodes")));
    }
    for attempt in 0..1000u64 {
        let mut rng = seed::stream_rng(seed::derive_path(seed, &[label::LABELS, attempt]), 0);
        let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        if let Ok(g) = CommunityLabeling::new(labels, k) {
            return Ok(g);
        }
    }
    Err(Error::Config(format!("multinomial labels left a community empty ({n} nodes, {k} communities)")))
}

fn labels_for(scheme: LabelScheme, n: usize, k: usize, seed: u64) -> Result<CommunityLabeling> {
    match scheme {
        LabelScheme::EqualBlocks => CommunityLabeling::balanced(n, k),
        LabelScheme::Multinomial => multinomial_labels(n, k, seed),
    }
}

/// Both samples from the same model, `B = r (1 + 3 * 1(u = v))`.
pub struct NullDesign;

impl ScenarioDesign for NullDesign {
    fn name(&self) -> &'static str {
        "null"
    }

    fn kind(&self) -> ScenarioKind {
        ScenarioKind::Null
    }

    fn models(
        &self,
        s: &Scenario,
        rep_seed: u64,
    ) -> Result<(CommunityLabeling, BlockProbabilityMatrix, CommunityLabeling, BlockProbabilityMatrix)> {
        let g = labels_for(s.label_scheme, s.n(), s.k_x, rep_seed)?;
        let b = scaled_block(s.k_x, s.r, s.null_base, s.null_bump)?;
        Ok((g.clone(), b.clone(), g, b))
    }
}

/// Same labels, different block matrices: `B_x = r (0.5 + 3 * 1(u = v))`,
/// `B_y = r (3 + 5 * 1(u = v))`.
pub struct AltBlockDesign;

impl ScenarioDesign for AltBlockDesign {
    fn name(&self) -> &'static str {
        "alt_b"
    }

    fn kind(&self) -> ScenarioKind {
        ScenarioKind::AltB
    }

    fn models(
        &self,
        s: &Scenario,
        rep_seed: u64,
    ) -> Result<(CommunityLabeling, BlockProbabilityMatrix, CommunityLabeling, BlockProbabilityMatrix)> {
        let g = labels_for(s.label_scheme, s.n(), s.k_x, rep_seed)?;
        let b_x = scaled_block(s.k_x, s.r, 0.5, 3.0)?;
        let b_y = scaled_block(s.k_x, s.r, 3.0, 5.0)?;
        Ok((g.clone(), b_x, g, b_y))
    }
}

/// Same block matrix `r (1 + 3 * 1(u = v))`; `g_x` in contiguous equal blocks,
/// `g_y` drawn per the scenario's label scheme (multinomial by default).
pub struct AltLabelDesign;

impl ScenarioDesign for AltLabelDesign {
    fn name(&self) -> &'static str {
        "alt_g"
    }

    fn kind(&self) -> ScenarioKind {
        ScenarioKind::AltG
    }

    fn models(
        &self,
        s: &Scenario,
        rep_seed: u64,
    ) -> Result<(CommunityLabeling, BlockProbabilityMatrix, CommunityLabeling, BlockProbabilityMatrix)> {
        if s.k_x != s.k_y {
            return Err(Error::Config("the label alternative needs K_x = K_y".into()));
        }
        let b = scaled_block(s.k_x, s.r, 1.0, 3.0)?;
        let g_x = CommunityLabeling::balanced(s.n(), s.k_x)?;
        let g_y = labels_for(s.label_scheme, s.n(), s.k_y, rep_seed)?;
        Ok((g_x, b.clone(), g_y, b))
    }
}

/// Different community counts, `4r` within and `r` between in both samples.
pub struct AltCountDesign;

impl ScenarioDesign for AltCountDesign {
    fn name(&self) -> &'static str {
        "alt_k"
    }

    fn kind(&self) -> ScenarioKind {
        ScenarioKind::AltK
    }

    fn models(
        &self,
        s: &Scenario,
        rep_seed: u64,
    ) -> Result<(CommunityLabeling, BlockProbabilityMatrix, CommunityLabeling, BlockProbabilityMatrix)> {
        if s.k_x == s.k_y {
            return Err(Error::Config("the community-count alternative needs K_x != K_y".into()));
        }
        let n = s.n();
        let g_x = labels_for(s.label_scheme, n, s.k_x, seed::derive(rep_seed, label::SAMPLE_X))?;
        let g_y = labels_for(s.label_scheme, n, s.k_y, seed::derive(rep_seed, label::SAMPLE_Y))?;
        Ok((g_x, scaled_block(s.k_x, s.r, 1.0, 3.0)?, g_y, scaled_block(s.k_y, s.r, 1.0, 3.0)?))
    }
}

/// Designs looked up by name.
pub struct DesignRegistry {
    designs: BTreeMap<&'static str, Box<dyn ScenarioDesign>>,
}

impl DesignRegistry {
    pub fn empty() -> Self {
        Self { designs: BTreeMap::new() }
    }

    /// The four designs of the size and power studies.
    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(NullDesign));
        r.register(Box::new(AltBlockDesign));
        r.register(Box::new(AltLabelDesign));
        r.register(Box::new(AltCountDesign));
        r
    }

    /// Replaces any design already registered under the same name.
    pub fn register(&mut self, design: Box<dyn ScenarioDesign>) {
        self.designs.insert(design.name(), design);
    }

    pub fn get(&self, name: &str) -> Option<&dyn ScenarioDesign> {
        self.designs.get(name).map(|d| d.as_ref())
    }

    /// The registered design for a scenario kind.
    pub fn for_kind(&self, kind: ScenarioKind) -> Result<&dyn ScenarioDesign> {
        self.designs
            .values()
            .find(|d| d.kind() == kind)
            .map(|d| d.as_ref())
            .ok_or_else(|| Error::Config(format!("no design registered for {kind}")))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.designs.keys().copied()
    }
}

impl Default for DesignRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
