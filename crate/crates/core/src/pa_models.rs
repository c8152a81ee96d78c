//! Amplitude transfer functions of the PA, clipping statistics and
//! datasheet ingestion.
//!
//! Every quantity here is linear (watts, power ratios). dB/dBm values are
//! converted once, when a datasheet row is parsed.

use std::io::Read;

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// The datasheet corpus shipped with the crate.
pub const EMBEDDED_DATASHEET: &str = include_str!("../data/pa_datasheet.csv");

/// Model name of the 25 W, 55 dB amplifier used as the low-power PA.
pub const PA_LOW_MODEL: &str = "SM2122-44L";
/// Model name of the 100 W, 50 dB amplifier used as the high-power PA.
pub const PA_HIGH_MODEL: &str = "SM1720-50";

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// One physical amplifier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PaSpec {
    pub model_name: String,
    /// Datasheet row number, when it came from a table.
    pub id: Option<u32>,
    /// Maximum (1 dB compression) output power, W.
    pub p_max_out: f64,
    /// Linear power gain g.
    pub gain: f64,
    /// Maximum input power p_max_out / g, W.
    pub p_max_in: f64,
    pub supply_voltage: Option<f64>,
    pub supply_current: Option<f64>,
    /// Seconds.
    pub turn_on_time: Option<f64>,
    /// Input compression point as printed in the datasheet, W.
    pub listed_p_max_in: Option<f64>,
}

impl PaSpec {
    pub fn new(model_name: impl Into<String>, p_max_out: f64, gain: f64) -> Result<Self> {
        if !(p_max_out > 0.0 && p_max_out.is_finite()) {
            return Err(domain("PaSpec::new", format!("p_max_out = {p_max_out}")));
        }
        if !(gain >= 1.0 && gain.is_finite()) {
            return Err(domain("PaSpec::new", format!("gain = {gain}, need g >= 1")));
        }
        Ok(Self {
            model_name: model_name.into(),
            id: None,
            p_max_out,
            gain,
            p_max_in: p_max_out / gain,
            supply_voltage: None,
            supply_current: None,
            turn_on_time: None,
            listed_p_max_in: None,
        })
    }

    pub fn from_db(model_name: impl Into<String>, p_max_out_dbm: f64, gain_db: f64) -> Result<Self> {
        Self::new(model_name, dbm_to_watts(p_max_out_dbm), db_to_linear(gain_db))
    }

    pub fn with_electricals(mut self, voltage: f64, current: f64) -> Self {
        self.supply_voltage = Some(voltage);
        self.supply_current = Some(current);
        self
    }

    /// Input amplitude at which clipping starts, sqrt(p_max_in).
    pub fn a_max(&self) -> f64 {
        self.p_max_in.sqrt()
    }

    /// Clipped output amplitude, sqrt(p_max_out).
    pub fn b_max(&self) -> f64 {
        self.p_max_out.sqrt()
    }

    /// Listed input compression point differs from p_max_out/g by > 3 dB.
    pub fn listed_input_inconsistent(&self) -> bool {
        self.listed_p_max_in
            .map(|listed| (10.0 * (listed / self.p_max_in).log10()).abs() > 3.0)
            .unwrap_or(false)
    }
}

/// Rapp smooth-saturation model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RappParams {
    /// Linear power gain g.
    pub gain: f64,
    /// Output amplitude approached as the input grows without bound.
    pub b_sat: f64,
    /// Smoothness exponent.
    pub p: f64,
}

impl RappParams {
    pub const DEFAULT_SMOOTHNESS: f64 = 2.0;

    pub fn new(gain: f64, b_sat: f64, p: f64) -> Result<Self> {
        if !(gain >= 1.0) || !(b_sat > 0.0) || !(p > 0.0) {
            return Err(domain("RappParams::new", format!("gain={gain}, b_sat={b_sat}, p={p}")));
        }
        Ok(Self { gain, b_sat, p })
    }

    /// Rapp curve sharing gain and saturation level with a soft limiter.
    pub fn matching(spec: &PaSpec, p: f64) -> Result<Self> {
        Self::new(spec.gain, spec.b_max(), p)
    }
}

fn check_amplitude(func: &'static str, a: f64) -> Result<()> {
    if !(a >= 0.0) {
        return Err(domain(func, format!("amplitude = {a}")));
    }
    Ok(())
}

/// Soft limiter: linear gain sqrt(g) below `a_max`, constant `b_max` above.
pub fn soft_limiter(amplitude: f64, spec: &PaSpec) -> Result<f64> {
    check_amplitude("soft_limiter", amplitude)?;
    Ok(soft_limiter_unchecked(amplitude, spec.gain.sqrt(), spec.a_max(), spec.b_max()))
}

#[inline]
pub(crate) fn soft_limiter_unchecked(amplitude: f64, sqrt_gain: f64, a_max: f64, b_max: f64) -> f64 {
    if amplitude < a_max {
        (sqrt_gain * amplitude).min(b_max)
    } else {
        b_max
    }
}

/// Rapp model `sqrt(g) a (1 + (sqrt(g) a / b_sat)^{2p})^{-1/(2p)}`.
pub fn rapp(amplitude: f64, params: &RappParams) -> Result<f64> {
    check_amplitude("rapp", amplitude)?;
    Ok(rapp_unchecked(amplitude, params))
}

#[inline]
pub(crate) fn rapp_unchecked(amplitude: f64, params: &RappParams) -> f64 {
    let lin = params.gain.sqrt() * amplitude;
    if lin == 0.0 {
        return 0.0;
    }
    let two_p = 2.0 * params.p;
    let ratio = lin / params.b_sat;
    // evaluate in log space so huge inputs saturate cleanly
    let log_ratio = ratio.ln();
    if two_p * log_ratio > 700.0 {
        return params.b_sat * (1.0 + ratio.powf(-two_p)).powf(-1.0 / two_p);
    }
    lin * (1.0 + ratio.powf(two_p)).powf(-1.0 / two_p)
}

/// Probability that a CN(0, xi * p_max_in) input is clipped, exp(-1/xi).
pub fn clip_probability(xi: f64) -> Result<f64> {
    if !(xi > 0.0) || !xi.is_finite() {
        return Err(domain("clip_probability", format!("xi = {xi}")));
    }
    Ok((-1.0 / xi).exp())
}

/// Complement of [`clip_probability`], 1 - exp(-1/xi).
pub fn unclipped_probability(xi: f64) -> Result<f64> {
    clip_probability(xi).map(|_| -(-1.0 / xi).exp_m1())
}

/// Drain efficiency p_max_out / (V I).
pub fn drain_efficiency(spec: &PaSpec) -> Result<f64> {
    match (spec.supply_voltage, spec.supply_current) {
        (Some(v), Some(i)) if v > 0.0 && i > 0.0 => Ok(spec.p_max_out / (v * i)),
        _ => Err(Error::NotAvailable(format!(
            "{}: supply voltage/current missing or zero",
            spec.model_name
        ))),
    }
}

/// A datasheet row that was skipped or flagged.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowIssue {
    /// 1-based data row index (header excluded).
    pub row: usize,
    pub skipped: bool,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Datasheet {
    pub specs: Vec<PaSpec>,
    pub issues: Vec<RowIssue>,
}

impl Datasheet {
    pub fn find(&self, key: &str) -> Option<&PaSpec> {
        if let Ok(id) = key.parse::<u32>() {
            if let Some(s) = self.specs.iter().find(|s| s.id == Some(id)) {
                return Some(s);
            }
        }
        self.specs.iter().find(|s| s.model_name.eq_ignore_ascii_case(key))
    }
}

#[derive(Default)]
struct Columns {
    id: Option<usize>,
    model: Option<usize>,
    p_out: Option<usize>,
    gain: Option<usize>,
    voltage: Option<usize>,
    current: Option<usize>,
    p_in: Option<usize>,
    turn_on: Option<usize>,
}

fn parse_opt(record: &csv::StringRecord, col: Option<usize>, name: &str) -> std::result::Result<Option<f64>, String> {
    let Some(cell) = col.and_then(|c| record.get(c)) else {
        return Ok(None);
    };
    let cell = cell.trim();
    if cell.is_empty() || cell == "--" || cell == "-" {
        return Ok(None);
    }
    cell.parse::<f64>()
        .map(Some)
        .map_err(|_| format!("column {name}: cannot parse {cell:?}"))
}

/// Parse a comma-separated datasheet. Mandatory columns are `model`,
/// `p_max_out_dBm` and `gain_dB`; `voltage_V`, `current_mA`,
/// `p_max_in_dBm`, `turn_on_us` and `id` are optional.
pub fn load_datasheet<R: Read>(source: R) -> Result<Datasheet> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(source);
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return Err(Error::Format(e.to_string())),
    };
    if headers.is_empty() {
        return Ok(Datasheet::default());
    }
    let mut cols = Columns::default();
    for (i, h) in headers.iter().enumerate() {
        match h.trim().to_ascii_lowercase().as_str() {
            "id" | "pa#" => cols.id = Some(i),
            "model" => cols.model = Some(i),
            "p_max_out_dbm" => cols.p_out = Some(i),
            "gain_db" => cols.gain = Some(i),
            "voltage_v" => cols.voltage = Some(i),
            "current_ma" => cols.current = Some(i),
            "p_max_in_dbm" => cols.p_in = Some(i),
            "turn_on_us" => cols.turn_on = Some(i),
            _ => {}
        }
    }
    if cols.model.is_none() || cols.p_out.is_none() || cols.gain.is_none() {
        return Err(Error::Format(
            "datasheet header must name model, p_max_out_dBm and gain_dB".into(),
        ));
    }

    let mut sheet = Datasheet::default();
    for (n, record) in reader.records().enumerate() {
        let row = n + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                sheet.issues.push(RowIssue { row, skipped: true, message: e.to_string() });
                continue;
            }
        };
        match parse_row(&record, &cols) {
            Ok(spec) => {
                if spec.listed_input_inconsistent() {
                    sheet.issues.push(RowIssue {
                        row,
                        skipped: false,
                        message: format!(
                            "{}: listed input compression point differs from p_max_out/g by more than 3 dB",
                            spec.model_name
                        ),
                    });
                }
                sheet.specs.push(spec);
            }
            Err(message) => sheet.issues.push(RowIssue { row, skipped: true, message }),
        }
    }
    Ok(sheet)
}

fn parse_row(record: &csv::StringRecord, cols: &Columns) -> std::result::Result<PaSpec, String> {
    let model = cols
        .model
        .and_then(|c| record.get(c))
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .ok_or("missing model")?;
    let p_out = parse_opt(record, cols.p_out, "p_max_out_dBm")?.ok_or("missing p_max_out_dBm")?;
    let gain = parse_opt(record, cols.gain, "gain_dB")?.ok_or("missing gain_dB")?;
    let voltage = parse_opt(record, cols.voltage, "voltage_V")?;
    let current_ma = parse_opt(record, cols.current, "current_mA")?;
    let p_in = parse_opt(record, cols.p_in, "p_max_in_dBm")?;
    let turn_on = parse_opt(record, cols.turn_on, "turn_on_us")?;
    let id = parse_opt(record, cols.id, "id")?.map(|v| v as u32);

    let mut spec = PaSpec::from_db(model, p_out, gain).map_err(|e| e.to_string())?;
    spec.id = id;
    spec.supply_voltage = voltage;
    spec.supply_current = current_ma.map(|ma| ma * 1e-3);
    spec.turn_on_time = turn_on.map(|us| us * 1e-6);
    spec.listed_p_max_in = p_in.map(dbm_to_watts);
    Ok(spec)
}

/// The embedded datasheet.
pub fn embedded_datasheet() -> Datasheet {
    load_datasheet(EMBEDDED_DATASHEET.as_bytes()).expect("embedded datasheet is well formed")
}

pub fn pa_low() -> PaSpec {
    embedded_datasheet().find(PA_LOW_MODEL).cloned().expect("embedded low PA")
}

pub fn pa_high() -> PaSpec {
    embedded_datasheet().find(PA_HIGH_MODEL).cloned().expect("embedded high PA")
}

/// Median drain efficiency over the rows that carry electricals.
pub fn median_drain_efficiency(specs: &[PaSpec]) -> Option<f64> {
    let mut eff: Vec<f64> = specs.iter().filter_map(|s| drain_efficiency(s).ok()).collect();
    if eff.is_empty() {
        return None;
    }
    eff.sort_by(f64::total_cmp);
    let n = eff.len();
    Some(if n % 2 == 1 { eff[n / 2] } else { 0.5 * (eff[n / 2 - 1] + eff[n / 2]) })
}
