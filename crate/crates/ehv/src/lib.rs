//! Command-line verification harness over `ehv-core`: parameter files, the
//! check registry, seeded sampling, sweeps and JSON reports.

pub mod checks;
pub mod cli;
pub mod eval;
pub mod exec;
pub mod format;
pub mod params;
pub mod run;

pub use checks::{find, Check, Ctx, Precision, Sampler, REGISTRY};
pub use run::{verify, Outcome};
