//! Urban microcell propagation models for 28, 38, 73 and 142 GHz.
//!
//! * [`pathloss`]: CI and CIF path loss with log-normal shadow fading.
//! * [`fitting`]: MMSE fits of both models from measurement records.
//! * [`profiles`]: RMS delay and angular spread, direction counting.
//! * [`stochastic`]: channel realizations drawn from published statistics.
//! * [`linkbudget`]: antenna scaling, SNR, range and coverage.
//! * [`catalog`]: the published parameter tables.
//! * [`io`] and [`cli`]: file formats and the `umi-prop` command.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod fitting;
pub mod io;
pub mod linkbudget;
pub mod models;
pub mod numeric;
pub mod pathloss;
pub mod profiles;
pub mod registry;
pub mod scenario;
pub mod stochastic;

pub use catalog::{catalog_lookup, Band, Catalog, CatalogKey, ModelKind, Selector};
pub use error::{Error, Result};
pub use fitting::{fit_ci, fit_cif, FitOptions, FitResult, MeasurementRecord, SigmaNormalization};
pub use linkbudget::{antenna_gain, coverage_sim, max_range, noise_power, snr, AntennaSpec, LinkConfig};
pub use pathloss::{ci_mean, cif_mean, fspl, CiParams, CifParams, Frequency, ModelParams, PathLossModel};
pub use profiles::{count_directions, rms_angular_spread, rms_delay_spread};
pub use scenario::{Directionality, Scenario};
pub use stochastic::{sample_realization, ChannelRealization, ChannelStatistics};
