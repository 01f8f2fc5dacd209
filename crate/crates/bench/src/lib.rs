// SPDX-License-Identifier: Apache-2.0

//! Shared inputs for the cost-model benchmarks.

use std::path::{Path, PathBuf};

use nop_explorer_core::{load_workload, LayerSpec};

pub fn workload_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../workloads").join(name)
}

/// Loads one of the bundled workloads; panics if it is missing.
pub fn bundled(name: &str) -> Vec<LayerSpec> {
    let path = workload_path(name);
    load_workload(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
