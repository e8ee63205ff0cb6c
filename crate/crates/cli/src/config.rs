use std::path::Path;

use ldi_core::io::{read_json, write_json};
use ldi_core::metrics::SsimParams;
use ldi_core::render::WarpConfig;
use ldi_core::scene::{GenerationConfig, PoseDelta};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const RUN_CONFIG_FILE: &str = "run_config.json";

/// Effective configuration of one run. `--config` reads this same schema.
/// Output locations are not recorded so that re-runs into different
/// directories produce identical files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub count: usize,
    pub generation: GenerationConfig,
    pub warp: WarpConfig,
    pub ssim: SsimParams,
    pub pose: Option<PoseDelta>,
    pub class: Option<String>,
    pub inputs: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: String::new(),
            seed: 0,
            count: 10,
            generation: GenerationConfig::default(),
            warp: WarpConfig::default(),
            ssim: SsimParams::default(),
            pose: None,
            class: None,
            inputs: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn load_or_default(path: Option<&Path>, command: &str) -> Result<Self> {
        let mut cfg = match path {
            Some(p) => read_json(p)?,
            None => Self::default(),
        };
        cfg.command = command.to_string();
        Ok(cfg)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        Ok(write_json(path, self)?)
    }
}

/// Parses "tx,ty,tz,rx,ry,rz".
pub fn parse_pose(s: &str) -> Result<PoseDelta> {
    let bad = || CliError::Pose(s.to_string());
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if v.len() != 6 || v.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(PoseDelta {
        tx: v[0],
        ty: v[1],
        tz: v[2],
        rx: v[3],
        ry: v[4],
        rz: v[5],
    })
}
