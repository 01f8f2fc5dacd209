// SPDX-License-Identifier: Apache-2.0

//! JSON run configuration. Every field is optional; missing ones fall back
//! to the built-in presets (256 chiplets x 64 PEs, wienna-C distribution,
//! interposer-A collection).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nop_explorer_core::costmodel::DEFAULT_TOTAL_PES;
use nop_explorer_core::nop::{default_presets, find_preset};
use nop_explorer_core::{NopKind, NopModel, ResourceConstants, StrategyChoice, SystemConfig, TrxAnchors};
use serde::{Deserialize, Serialize};

use crate::report::Format;
use crate::CliError;

pub const DEFAULT_DISTRIBUTION: &str = "wienna-C";
pub const DEFAULT_COLLECTION: &str = "interposer-A";
const DEFAULT_CHIPLETS: u64 = 256;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemSection {
    pub total_pes: Option<u64>,
    pub chiplets: Option<u64>,
    pub pes_per_chiplet: Option<u64>,
    pub sram_bytes: Option<u64>,
    pub clock_mhz: Option<f64>,
    /// Preset name of the distribution NoP.
    pub distribution: Option<String>,
    /// Preset name of the collection mesh.
    pub collection: Option<String>,
}

/// On-disk form of the configuration file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub system: SystemSection,
    /// Added to, or replacing, the built-in presets by name.
    pub nop_presets: BTreeMap<String, NopModel>,
    pub trx_anchors: Option<TrxAnchors>,
    pub resources: Option<ResourceConstants>,
    pub workload_path: Option<PathBuf>,
    pub strategy: Option<String>,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<Format>,
}

/// Configuration with defaults applied and presets resolved.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub presets: BTreeMap<String, NopModel>,
    pub collection: NopModel,
    pub trx_anchors: TrxAnchors,
    pub resources: ResourceConstants,
    pub workload_path: Option<PathBuf>,
    pub strategy: Option<StrategyChoice>,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<Format>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        let Some(path) = path else {
            return RunConfig::from_file(ConfigFile::default(), None);
        };
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_owned(),
            source,
        })?;
        let file: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        RunConfig::from_file(file, path.parent())
    }

    /// `base` anchors relative paths found in the file.
    pub fn from_file(file: ConfigFile, base: Option<&Path>) -> Result<RunConfig, CliError> {
        let mut presets = default_presets();
        for (name, model) in file.nop_presets {
            model.validate()?;
            presets.insert(name, model);
        }
        let sys = &file.system;
        let (chiplets, pes) = resolve_shape(sys.total_pes, sys.chiplets, sys.pes_per_chiplet)?;
        let collection = find_preset(&presets, sys.collection.as_deref().unwrap_or(DEFAULT_COLLECTION))?.clone();
        let distribution = find_preset(&presets, sys.distribution.as_deref().unwrap_or(DEFAULT_DISTRIBUTION))?.clone();
        let defaults = SystemConfig::default();
        let template = SystemConfig {
            sram_bytes: sys.sram_bytes.unwrap_or(defaults.sram_bytes),
            clock_mhz: sys.clock_mhz.unwrap_or(defaults.clock_mhz),
            ..defaults
        };
        let system = assemble(&template, chiplets, pes, distribution, &collection)?;

        let rebase = |p: PathBuf| match base {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p,
        };
        let strategy = file
            .strategy
            .map(|s| s.parse::<StrategyChoice>().map_err(CliError::Usage))
            .transpose()?;
        Ok(RunConfig {
            system,
            presets,
            collection,
            trx_anchors: file.trx_anchors.unwrap_or_default(),
            resources: file.resources.unwrap_or_default(),
            workload_path: file.workload_path.map(rebase),
            strategy,
            output_path: file.output_path.map(rebase),
            output_format: file.output_format,
        })
    }

    /// The configured system with its distribution NoP swapped for a preset.
    pub fn system_with(&self, preset: &str) -> Result<SystemConfig, CliError> {
        let dist = find_preset(&self.presets, preset)?.clone();
        assemble(
            &self.system,
            self.system.chiplets,
            self.system.pes_per_chiplet,
            dist,
            &self.collection,
        )
    }
}

fn resolve_shape(total: Option<u64>, chiplets: Option<u64>, pes: Option<u64>) -> Result<(u64, u64), CliError> {
    let divide = |total: u64, by: u64, what: &str| {
        if by == 0 || !total.is_multiple_of(by) {
            Err(CliError::Usage(format!(
                "{what} {by} does not divide total_pes {total}"
            )))
        } else {
            Ok(total / by)
        }
    };
    match (chiplets, pes) {
        (Some(c), Some(p)) => {
            if let Some(t) = total {
                if c.checked_mul(p) != Some(t) {
                    return Err(CliError::Usage(format!(
                        "chiplets ({c}) x pes_per_chiplet ({p}) must equal total_pes ({t})"
                    )));
                }
            }
            Ok((c, p))
        }
        (Some(c), None) => {
            let t = total.unwrap_or(DEFAULT_TOTAL_PES);
            Ok((c, divide(t, c, "chiplet count")?))
        }
        (None, Some(p)) => {
            let t = total.unwrap_or(DEFAULT_TOTAL_PES);
            Ok((divide(t, p, "pes_per_chiplet")?, p))
        }
        (None, None) => {
            let t = total.unwrap_or(DEFAULT_TOTAL_PES);
            Ok((DEFAULT_CHIPLETS, divide(t, DEFAULT_CHIPLETS, "chiplet count")?))
        }
    }
}

/// A wired distribution NoP also carries collection, as in an
/// interposer-only system.
fn assemble(
    template: &SystemConfig,
    chiplets: u64,
    pes: u64,
    distribution: NopModel,
    collection: &NopModel,
) -> Result<SystemConfig, CliError> {
    let collection = match distribution.kind {
        NopKind::WiredMesh => distribution.clone(),
        NopKind::Wireless => collection.clone(),
    };
    let sys = SystemConfig {
        total_pes: chiplets
            .checked_mul(pes)
            .ok_or(CliError::Usage("total_pes overflows".into()))?,
        chiplets,
        pes_per_chiplet: pes,
        distribution_nop: distribution,
        collection_nop: collection,
        ..template.clone()
    };
    sys.validate()?;
    Ok(sys)
}
