//! Named presets for the simulation grids.

use std::collections::BTreeMap;

use super::{
    null_density_samples, null_density_scenario, run_with_registry, DesignRegistry, ExperimentTable, Scenario,
    ScenarioKind, ScenarioSize,
};
use crate::error::{Error, Result};
use crate::seed;
use crate::two_sample_test::BootstrapSetting;

const GRID_K: [usize; 6] = [2, 3, 4, 5, 6, 10];
const ALT_K_X: [usize; 6] = [1, 2, 3, 4, 6, 10];

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// One table row per scenario.
    Table(Vec<Scenario>),
    /// Paired raw and corrected null statistics at `n` nodes.
    Density { n: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub name: &'static str,
    pub description: &'static str,
    pub kind: ProfileKind,
    pub default_reps: usize,
}

/// Desk-scale adjustments applied on top of a profile.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProfileOverrides {
    pub reps: Option<usize>,
    /// Replaces the community size of grids defined by community size.
    pub community_size: Option<usize>,
    /// Replaces the node count of grids defined by node count and of density runs.
    pub n: Option<usize>,
    pub bootstrap: Option<BootstrapSetting>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileOutput {
    Table(ExperimentTable),
    Density(Vec<(f64, f64)>),
}

fn grid(kind: ScenarioKind, ks: &[usize], rs: &[f64], size: ScenarioSize) -> Vec<Scenario> {
    ks.iter()
        .flat_map(|&k| rs.iter().map(move |&r| Scenario::new(kind, k, r, size)))
        .collect()
}

impl Profile {
    /// Concrete scenarios after overrides; each cell gets a seed derived from
    /// the master seed and its position in the grid.
    pub fn scenarios(&self, o: &ProfileOverrides) -> Vec<Scenario> {
        let ProfileKind::Table(cells) = &self.kind else {
            return Vec::new();
        };
        cells
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut s = s.clone().with_reps(o.reps.unwrap_or(self.default_reps)).with_seed(seed::derive(o.seed, i as u64));
                s.size = match (s.size, o.community_size, o.n) {
                    (ScenarioSize::CommunitySize(_), Some(c), _) => ScenarioSize::CommunitySize(c),
                    (ScenarioSize::Nodes(_), _, Some(n)) => ScenarioSize::Nodes(n),
                    (size, _, _) => size,
                };
                if let Some(b) = o.bootstrap {
                    s.bootstrap = b;
                }
                s
            })
            .collect()
    }

    pub fn run(&self, o: &ProfileOverrides, alpha: f64) -> Result<ProfileOutput> {
        match &self.kind {
            ProfileKind::Table(_) => {
                let registry = DesignRegistry::builtin();
                let mut table = ExperimentTable::default();
                for s in self.scenarios(o) {
                    table.extend(run_with_registry(&s, alpha, &registry)?);
                }
                Ok(ProfileOutput::Table(table))
            }
            ProfileKind::Density { n } => {
                let mut s = null_density_scenario(o.n.unwrap_or(*n), o.reps.unwrap_or(self.default_reps), o.seed);
                if let Some(b) = o.bootstrap {
                    s.bootstrap = b;
                }
                Ok(ProfileOutput::Density(null_density_samples(&s)?))
            }
        }
    }
}

pub struct ProfileRegistry {
    profiles: BTreeMap<&'static str, Profile>,
}

impl ProfileRegistry {
    pub fn builtin() -> Self {
        let mut r = Self { profiles: BTreeMap::new() };
        r.register(Profile {
            name: "table1",
            description: "empirical size, B = r(1 + 3*1(u=v)), 200 nodes per community",
            kind: ProfileKind::Table(grid(ScenarioKind::Null, &GRID_K, &[0.05, 0.1, 0.2], ScenarioSize::CommunitySize(200))),
            default_reps: 200,
        });
        r.register(Profile {
            name: "table2",
            description: "power, g_x = g_y, B_x = r(0.5 + 3*1(u=v)), B_y = r(3 + 5*1(u=v))",
            kind: ProfileKind::Table(grid(ScenarioKind::AltB, &GRID_K, &[0.01, 0.05, 0.1], ScenarioSize::CommunitySize(200))),
            default_reps: 200,
        });
        r.register(Profile {
            name: "table3",
            description: "power, B_x = B_y, g_y multinomial, n = 1200",
            kind: ProfileKind::Table(grid(ScenarioKind::AltG, &GRID_K, &[0.01, 0.05, 0.1], ScenarioSize::Nodes(1200))),
            default_reps: 200,
        });
        r.register(Profile {
            name: "table4",
            description: "power, K_y = K_x + 2, r in {0.05, 0.1, 0.2}, n = 1200",
            kind: ProfileKind::Table(grid(ScenarioKind::AltK, &ALT_K_X, &[0.05, 0.1, 0.2], ScenarioSize::Nodes(1200))),
            default_reps: 200,
        });
        r.register(Profile {
            name: "table4-header",
            description: "power, K_y = K_x + 2, r in {0.01, 0.05, 0.1}, n = 1200",
            kind: ProfileKind::Table(grid(ScenarioKind::AltK, &ALT_K_X, &[0.01, 0.05, 0.1], ScenarioSize::Nodes(1200))),
            default_reps: 200,
        });
        r.register(Profile {
            name: "figure1",
            description: "null densities of T_n and T_n^boot, n = 600",
            kind: ProfileKind::Density { n: 600 },
            default_reps: 1000,
        });
        r.register(Profile {
            name: "figure1-n1200",
            description: "null densities of T_n and T_n^boot, n = 1200",
            kind: ProfileKind::Density { n: 1200 },
            default_reps: 1000,
        });
        r
    }

    pub fn register(&mut self, profile: Profile) {
        self.profiles.insert(profile.name, profile);
    }

    pub fn get(&self, name: &str) -> Result<&Profile> {
        self.profiles.get(name).ok_or_else(|| {
            Error::Config(format!(
                "unknown profile {name:?}; available: {}",
                self.profiles.keys().copied().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = &Profile> {
        self.profiles.values()
    }
}

impl Default for ProfileRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
