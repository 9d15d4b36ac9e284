//! Scenario runner behind the `dirac-cyclotron` binary.
//!
//! A config holds one or more `[scenario]` sections:
//!
//! ```text
//! [scenario]
//! name = velocity
//! lambda_over_a = 0.1
//! qa = 5
//! alpha = 1
//! beta = 1
//! t_end = 2*T_D
//! n_samples = 4000
//! ```
//!
//! Every artifact starts with `# key = value` lines that re-parse to the
//! resolved scenario, then `#!` metadata lines, then the CSV payload.

mod config;
mod run;
mod scenario;
mod validate;

pub use config::{parse_sections, provenance_config, Entry, Section};
pub use run::{run_all, run_scenario, Artifact, RunOptions, CODE_VERSION};
pub use scenario::{parse_config, Anchor, MapPacket, Scenario, ScenarioKind, TimeExpr, TimeSpec};
pub use validate::{probe_times, validation_report, write_report, CheckRow};
