//! Spectral- and energy-efficiency analysis of OFDM links driven through a
//! nonlinear, inefficient power amplifier.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Bessel I0, Marcum Q1, Lambert W, quadrature.
//! * [`pa_models`]: soft-limiter and Rapp amplitude models, clipping
//!   probability, datasheet ingestion.
//! * [`power_models`]: transmitter power consumption (linear, Doherty,
//!   PA-dependent nonlinear, ideal).
//! * [`se_engine`]: output densities, entropy, SE and its approximations,
//!   SE-optimal loading factor, multipath lower bound.
//! * [`ee_engine`]: EE, its bounds, EE-optimal loading factor and the
//!   SE-EE Pareto window.
//! * [`pas_engine`]: PA switching between two amplifiers and frontier search.
//! * [`mc_oracle`]: Monte Carlo OFDM chain used to validate the closed forms.
//! * [`output`]: CSV/JSON sweep tables shared by the CLI.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ee_engine;
pub mod error;
pub mod mc_oracle;
pub mod output;
pub mod pa_models;
pub mod pas_engine;
pub mod power_models;
pub mod se_engine;
pub mod specfun;

pub use error::{Error, Result};
pub use pa_models::{PaSpec, RappParams};
pub use power_models::{BsType, PowerModelParams};
pub use se_engine::{ChannelProfile, LinkScenario};

/// How a tradeoff point was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Exact,
    Approximated,
    MonteCarlo,
}

/// One (loading factor, SE, EE) operating point.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct TradeoffPoint {
    pub xi: f64,
    /// b/s/Hz
    pub se: f64,
    /// b/J
    pub ee: f64,
    pub provenance: Provenance,
}
