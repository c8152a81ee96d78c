//! Transmitter power consumption as a function of the loading factor.

use std::f64::consts::PI;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Base-station classes with tabulated consumption parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BsType {
    Macro,
    Rrh,
    Micro,
    Pico,
    Femto,
}

impl BsType {
    pub const ALL: [BsType; 5] = [BsType::Macro, BsType::Rrh, BsType::Micro, BsType::Pico, BsType::Femto];

    /// (P_max, P_fix, P_idle, c).
    fn table(self) -> (f64, f64, f64, f64) {
        match self {
            BsType::Macro => (20.0, 130.0, 75.0, 4.7),
            BsType::Rrh => (20.0, 84.0, 56.0, 2.8),
            BsType::Micro => (6.3, 56.0, 39.0, 2.6),
            BsType::Pico => (0.13, 6.8, 4.3, 4.0),
            BsType::Femto => (0.05, 4.8, 2.9, 8.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BsType::Macro => "macro",
            BsType::Rrh => "rrh",
            BsType::Micro => "micro",
            BsType::Pico => "pico",
            BsType::Femto => "femto",
        }
    }
}

impl FromStr for BsType {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "macro" => Ok(BsType::Macro),
            "rrh" => Ok(BsType::Rrh),
            "micro" => Ok(BsType::Micro),
            "pico" => Ok(BsType::Pico),
            "femto" => Ok(BsType::Femto),
            other => Err(Error::Config(format!(
                "unknown BS type {other:?}; expected macro, rrh, micro, pico or femto"
            ))),
        }
    }
}

/// Two coefficient pairs (c1, c2) on either side of the breakpoint 1/W².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PiecewiseCoefficients {
    pub low: (f64, f64),
    pub high: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerModelParams {
    /// Load-independent consumption, W.
    pub p_fix: f64,
    /// Slope of the empirical linear model.
    pub c: f64,
    /// Maximum RF output power, W.
    pub p_max_out: f64,
    /// Doherty way count W; 1 is class B.
    pub way_count: u32,
    pub p0: f64,
    pub c0: f64,
    pub c_ps: f64,
    pub c_cb: f64,
    /// Stored for reference; the continuous model does not use it.
    pub p_idle: Option<f64>,
    /// Overrides the Doherty coefficients, e.g. for a class-A preset.
    pub custom_coefficients: Option<PiecewiseCoefficients>,
}

impl PowerModelParams {
    pub const DEFAULT_C_PS: f64 = 0.12;
    pub const DEFAULT_C_CB: f64 = 0.0;

    /// Parameters aligned so the nonlinear model matches the linear one at
    /// full load: p0 = p_fix, c0 = (π/4) c.
    pub fn new(p_fix: f64, c: f64, p_max_out: f64, way_count: u32) -> Result<Self> {
        if !(p_fix > 0.0) || !(c > 0.0) || !(p_max_out > 0.0) || way_count < 1 {
            return Err(domain(
                "PowerModelParams::new",
                format!("p_fix={p_fix}, c={c}, p_max_out={p_max_out}, W={way_count}"),
            ));
        }
        Ok(Self {
            p_fix,
            c,
            p_max_out,
            way_count,
            p0: p_fix,
            c0: 0.25 * PI * c,
            c_ps: Self::DEFAULT_C_PS,
            c_cb: Self::DEFAULT_C_CB,
            p_idle: None,
            custom_coefficients: None,
        })
    }

    pub fn preset(bs: BsType, way_count: u32) -> Self {
        let (p_max, p_fix, p_idle, c) = bs.table();
        let mut p = Self::new(p_fix, c, p_max, way_count).expect("preset values are valid");
        p.p_idle = Some(p_idle);
        p
    }

    /// Same model with another PA output rating; the alignment is kept.
    pub fn with_p_max_out(mut self, p_max_out: f64) -> Result<Self> {
        if !(p_max_out > 0.0) {
            return Err(domain("PowerModelParams::with_p_max_out", format!("{p_max_out}")));
        }
        self.p_max_out = p_max_out;
        Ok(self)
    }

    pub fn with_way_count(mut self, way_count: u32) -> Result<Self> {
        if way_count < 1 {
            return Err(domain("PowerModelParams::with_way_count", "W must be >= 1"));
        }
        self.way_count = way_count;
        Ok(self)
    }

    /// Breakpoint 1/W² between the two pieces.
    pub fn breakpoint(&self) -> f64 {
        1.0 / (self.way_count as f64).powi(2)
    }

    pub fn coefficients(&self) -> PiecewiseCoefficients {
        self.custom_coefficients.unwrap_or_else(|| doherty_coefficients(self.way_count))
    }

    /// (c1, c2) in effect at `xi`.
    pub fn coefficients_at(&self, xi: f64) -> (f64, f64) {
        let k = self.coefficients();
        if xi <= self.breakpoint() {
            k.low
        } else {
            k.high
        }
    }
}

/// Doherty coefficients: 4/(Wπ)·(0, 1) below 1/W², 4/(Wπ)·(−1, W+1) above.
pub fn doherty_coefficients(way_count: u32) -> PiecewiseCoefficients {
    let w = way_count as f64;
    let s = 4.0 / (w * PI);
    PiecewiseCoefficients { low: (0.0, s), high: (-s, s * (w + 1.0)) }
}

fn check_xi(func: &'static str, xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(domain(func, format!("xi = {xi}, need 0 < xi <= 1")));
    }
    Ok(())
}

/// Empirical linear model P_fix + c ξ′ P_max_out.
pub fn pc_linear(xi_prime: f64, params: &PowerModelParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi_prime) {
        return Err(domain("pc_linear", format!("xi' = {xi_prime}, need 0 <= xi' <= 1")));
    }
    Ok(params.p_fix + params.c * xi_prime * params.p_max_out)
}

/// Consumption of a W-way Doherty PA delivering mean power ξ·p_max_out.
pub fn ppa_doherty(xi: f64, way_count: u32, p_max_out: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(domain("ppa_doherty", format!("xi = {xi}")));
    }
    if way_count < 1 {
        return Err(domain("ppa_doherty", "W must be >= 1"));
    }
    let w = way_count as f64;
    let s = 4.0 * p_max_out / (w * PI);
    let r = xi.sqrt();
    Ok(if xi <= 1.0 / (w * w) { s * r } else { s * ((w + 1.0) * r - 1.0) })
}

/// PA-dependent total P0 + c0 (c1 + c2 √ξ) P_max_out.
pub fn pc_nonlinear(xi: f64, params: &PowerModelParams) -> Result<f64> {
    check_xi("pc_nonlinear", xi)?;
    Ok(pc_nonlinear_unchecked(xi, params))
}

#[inline]
pub(crate) fn pc_nonlinear_unchecked(xi: f64, params: &PowerModelParams) -> f64 {
    if params.custom_coefficients.is_none() {
        // c0 * 4/(W pi) collapses to c/W under the default alignment; folding
        // it makes the full-load value bit-identical to the linear model
        let slope = if params.c0 == 0.25 * PI * params.c { params.c } else { params.c0 * 4.0 / PI };
        let w = params.way_count as f64;
        let r = xi.sqrt();
        let shape = if xi <= params.breakpoint() { r } else { (w + 1.0) * r - 1.0 };
        return params.p0 + slope * (shape / w) * params.p_max_out;
    }
    let (c1, c2) = params.coefficients_at(xi);
    params.p0 + params.c0 * (c1 + c2 * xi.sqrt()) * params.p_max_out
}

/// Consumption with a perfectly linear, lossless PA of gain g.
pub fn pc_ideal(xi: f64, params: &PowerModelParams, gain: f64) -> Result<f64> {
    check_xi("pc_ideal", xi)?;
    if !(gain >= 1.0) {
        return Err(domain("pc_ideal", format!("gain = {gain}, need g >= 1")));
    }
    Ok(params.p_fix + params.c0 * (1.0 - 1.0 / gain) * xi * params.p_max_out)
}
