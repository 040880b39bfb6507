//! Round-based lifetime simulator for a wireless sensor network laid out in
//! concentric coronas, with a LEACH baseline, disk-coverage tracking, and a
//! collaborative wavelet denoiser for images received over a noisy channel.
//!
//! ```
//! use corona_sim::{run, NetworkConfig, Protocol};
//!
//! let cfg = NetworkConfig { node_count: 30, ..NetworkConfig::default() };
//! let out = run(&cfg, Protocol::Proposed, 50).unwrap();
//! assert_eq!(out.metrics.len(), 50);
//! ```

pub mod channel;
pub mod cli;
pub mod config;
pub mod coverage;
pub mod denoise;
pub mod election;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod numeric;
pub mod radio;
pub mod routing;
pub mod topology;

pub use config::NetworkConfig;
pub use coverage::{coverage_rate, CoverageGrid, CoverageReport, Field, SensorDisk};
pub use engine::{run, run_with, LifetimeSummary, Protocol, RoundMetrics, RunOptions, RunOutput, Simulation};
pub use error::{Error, Result};
pub use geometry::Point;
pub use radio::RadioParams;
pub use topology::{build_topology, NodeState, Topology};
