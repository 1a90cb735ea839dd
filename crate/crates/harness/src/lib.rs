//! Experiment harness: runs registered sketches across many seeds on a fixed
//! stream, certifies concentration properties of the resulting output
//! distribution, checks outputs against brute-force oracles, and writes
//! reports.

pub mod certify;
pub mod distribution;
pub mod oracle;
pub mod registry;
pub mod report;
pub mod space;
pub mod trial;

pub use certify::{Certificate, Verdict};
pub use distribution::OutputDistribution;
pub use registry::{AlgorithmId, Configured, Params};
pub use report::Report;
pub use trial::{run_trials, StreamSpec, TrialConfig, TrialRun};
