use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::instances::{Instance, InstanceSpec};
use crate::automaton::parse_nba;
use crate::model::{Team, Wts};
use crate::planner::PlannerConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentMode {
    Synthesize,
    #[default]
    Benchmark,
    SuccessCurve,
    CompareBias,
    OracleCheck,
}

/// Where an instance comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceRef {
    Generate(InstanceSpec),
    /// One robot system per file plus an automaton; relative paths are
    /// resolved against the config file.
    Files {
        wts: Vec<PathBuf>,
        nba: PathBuf,
        #[serde(default)]
        name: Option<String>,
    },
}

impl InstanceRef {
    pub fn load(&self, base: &Path) -> Result<Instance> {
        match self {
            InstanceRef::Generate(spec) => spec.build(),
            InstanceRef::Files { wts, nba, name } => {
                let read = |p: &PathBuf| {
                    let p = base.join(p);
                    std::fs::read_to_string(&p)
                        .map_err(|e| Error::Config(format!("{}: {e}", p.display())))
                };
                let robots = wts
                    .iter()
                    .map(|p| Wts::from_json(&read(p)?))
                    .collect::<Result<Vec<_>>>()?;
                let nba_doc = parse_nba(&read(nba)?)?;
                Ok(Instance {
                    name: name.clone().unwrap_or_else(|| nba.display().to_string()),
                    team: Team::new(robots)?,
                    nba: nba_doc,
                })
            }
        }
    }
}

/// One experiment batch, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    pub instances: Vec<InstanceRef>,
    pub trials: usize,
    /// Budgets for success curves; other modes use the planner budgets.
    pub n_max: Vec<usize>,
    pub planner: PlannerConfig,
    /// Trial `t` runs with seed `master_seed ^ t`.
    pub master_seed: u64,
    /// Write wall-clock columns. Off makes reports byte-for-byte
    /// reproducible.
    pub timing: bool,
    /// Worker threads; `None` leaves the choice to the pool.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: ExperimentMode::default(),
            instances: Vec::new(),
            trials: 1,
            n_max: vec![50, 100, 200, 500, 1000],
            planner: PlannerConfig::default(),
            master_seed: 0,
            timing: true,
            threads: None,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.n_max.contains(&0) {
            return Err(Error::Config("n_max values must be positive".into()));
        }
        if self.instances.is_empty() {
            return Err(Error::Config("no instances".into()));
        }
        self.planner.validate()
    }

    pub fn seed(&self, trial: usize) -> u64 {
        self.master_seed ^ trial as u64
    }

    pub fn load_instances(&self, base: &Path) -> Result<Vec<Instance>> {
        self.instances.iter().map(|i| i.load(base)).collect()
    }
}
