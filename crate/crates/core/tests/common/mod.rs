//! Helpers shared by the integration test targets.
#![allow(dead_code)]

pub mod boundary;
pub mod e2e;
pub mod grids;
pub mod oracle;
pub mod published;
pub mod scenarios;
pub mod server;
pub mod snapshot;

use std::path::PathBuf;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn workspace_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}
