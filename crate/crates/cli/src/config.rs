//! Flag and config-file resolution.
//!
//! Every option is known by its long flag name. A config file holds
//! `key = value` lines with the same names; flags given on the command line
//! override it. The resolved map is written into each output header.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use clap::Args;
use ofdmpa_core::output::Format;
use ofdmpa_core::pa_models::{embedded_datasheet, load_datasheet, PaSpec, PA_HIGH_MODEL, PA_LOW_MODEL};
use ofdmpa_core::pas_engine::Duplex;
use ofdmpa_core::power_models::BsType;
use ofdmpa_core::{Error, Result};

/// Options shared by all subcommands.
#[derive(Args, Debug, Default)]
pub struct Options {
    /// key=value file; command-line flags override it
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// PA: low, high, model name, datasheet row id, or <file>:<row|model>
    #[arg(long, global = true)]
    pub pa: Option<String>,
    /// Second PA for pas-frontier
    #[arg(long, global = true)]
    pub pa2: Option<String>,
    /// Base-station class: macro, rrh, micro, pico, femto
    #[arg(long, global = true)]
    pub bs_type: Option<String>,
    /// Doherty way count; 1 is class B
    #[arg(long, global = true)]
    pub way_count: Option<u32>,
    /// Antenna gain term of the path loss, dB
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub g_db: Option<f64>,
    /// Path-loss exponent
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Link distance, km
    #[arg(long, global = true)]
    pub d_km: Option<f64>,
    /// Bandwidth, Hz
    #[arg(long, global = true)]
    pub bandwidth: Option<f64>,
    /// Noise power spectral density, dBm/Hz
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub noise_psd: Option<f64>,
    /// Loading-factor grid min:max:n[:log]
    #[arg(long, global = true)]
    pub xi_grid: Option<String>,
    /// Monte Carlo seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (a directory for pas-frontier); stdout when absent
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// csv or json
    #[arg(long, global = true)]
    pub format: Option<String>,
    /// tdd or fdd; selects a single custom frontier configuration
    #[arg(long, global = true)]
    pub duplex: Option<String>,
    /// Switching time, s; selects a single custom frontier configuration
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Switch insertion loss, dB
    #[arg(long, global = true)]
    pub gs_db: Option<f64>,
    /// Frame length, s
    #[arg(long, global = true)]
    pub frame_length: Option<f64>,
    /// Frames per switching window
    #[arg(long, global = true)]
    pub frames: Option<u32>,
    /// shared or per-pa loading factors in the frontier search
    #[arg(long, global = true)]
    pub xi_mode: Option<String>,
    /// Number of SE targets in the frontier
    #[arg(long, global = true)]
    pub targets: Option<usize>,
    /// Monte Carlo sample count per grid point
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Subcarrier count
    #[arg(long, global = true)]
    pub subcarriers: Option<usize>,
    /// flat or exp:<taps>:<decay dB per tap>
    #[arg(long, global = true)]
    pub channel: Option<String>,
    /// Datasheet CSV for the datasheet command
    #[arg(long, global = true)]
    pub datasheet: Option<String>,
}

impl Options {
    fn given(&self) -> Vec<(&'static str, Option<String>)> {
        fn s<T: ToString>(v: &Option<T>) -> Option<String> {
            v.as_ref().map(|x| x.to_string())
        }
        vec![
            ("pa", s(&self.pa)),
            ("pa2", s(&self.pa2)),
            ("bs-type", s(&self.bs_type)),
            ("way-count", s(&self.way_count)),
            ("g-db", s(&self.g_db)),
            ("alpha", s(&self.alpha)),
            ("d-km", s(&self.d_km)),
            ("bandwidth", s(&self.bandwidth)),
            ("noise-psd", s(&self.noise_psd)),
            ("xi-grid", s(&self.xi_grid)),
            ("seed", s(&self.seed)),
            ("out", s(&self.out)),
            ("format", s(&self.format)),
            ("duplex", s(&self.duplex)),
            ("eps", s(&self.eps)),
            ("gs-db", s(&self.gs_db)),
            ("frame-length", s(&self.frame_length)),
            ("frames", s(&self.frames)),
            ("xi-mode", s(&self.xi_mode)),
            ("targets", s(&self.targets)),
            ("samples", s(&self.samples)),
            ("subcarriers", s(&self.subcarriers)),
            ("channel", s(&self.channel)),
            ("datasheet", s(&self.datasheet)),
        ]
    }
}

const KNOWN: [&str; 24] = [
    "pa", "pa2", "bs-type", "way-count", "g-db", "alpha", "d-km", "bandwidth", "noise-psd", "xi-grid", "seed", "out",
    "format", "duplex", "eps", "gs-db", "frame-length", "frames", "xi-mode", "targets", "samples", "subcarriers",
    "channel", "datasheet",
];

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Config(format!("config line {}: expected key=value, got {raw:?}", n + 1)));
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if !KNOWN.contains(&key.as_str()) {
            return Err(Error::Config(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

/// Resolved option values, with typed getters and per-command defaults.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn resolve(opts: &Options) -> Result<Self> {
        let mut values = match &opts.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("config file {path}: {e}")))?;
                parse_config_file(&text)?
            }
            None => BTreeMap::new(),
        };
        for (k, v) in opts.given() {
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Value or default, recorded so headers show what was used.
    pub fn value(&mut self, key: &str, default: &str) -> String {
        self.values.entry(key.to_string()).or_insert_with(|| default.to_string()).clone()
    }

    pub fn parsed<T: FromStr>(&mut self, key: &str, default: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.value(key, default);
        v.parse::<T>().map_err(|e| Error::Config(format!("--{key} {v:?}: {e}")))
    }

    pub fn format(&mut self) -> Result<Format> {
        self.value("format", "csv").parse()
    }

    pub fn bs_type(&mut self) -> Result<BsType> {
        self.value("bs-type", "macro").parse()
    }

    pub fn duplex(&mut self) -> Result<Duplex> {
        self.value("duplex", "tdd").parse()
    }

    pub fn grid(&mut self, default: &str) -> Result<Vec<f64>> {
        parse_grid(&self.value("xi-grid", default))
    }

    /// Everything resolved so far, for output headers. `out` and `config`
    /// stay out so the same run written elsewhere is byte-identical.
    pub fn header(&self) -> impl Iterator<Item = (&String, &String)> {
        self.values.iter().filter(|(k, _)| k.as_str() != "out")
    }
}

/// `min:max:n[:log]`, inclusive of both ends.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = |why: &str| Error::Config(format!("--xi-grid {spec:?}: {why}"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    if parts.len() < 3 || parts.len() > 4 {
        return Err(bad("expected min:max:n[:log]"));
    }
    let min: f64 = parts[0].parse().map_err(|_| bad("min is not a number"))?;
    let max: f64 = parts[1].parse().map_err(|_| bad("max is not a number"))?;
    let n: usize = parts[2].parse().map_err(|_| bad("n is not an integer"))?;
    let log = match parts.get(3) {
        None | Some(&"lin") => false,
        Some(&"log") => true,
        Some(_) => return Err(bad("scale must be log or lin")),
    };
    if !(min > 0.0 && max > min && max <= 1.0) {
        return Err(bad("need 0 < min < max <= 1"));
    }
    if n < 2 {
        return Err(bad("need at least 2 points"));
    }
    let t = |i: usize| i as f64 / (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                max
            } else if log {
                min * (max / min).powf(t(i))
            } else {
                min + (max - min) * t(i)
            }
        })
        .collect())
}

/// Resolve a PA argument against the embedded table or a datasheet file.
pub fn resolve_pa(arg: &str) -> Result<PaSpec> {
    let key = match arg.trim().to_ascii_lowercase().as_str() {
        "low" | "pa-low" => PA_LOW_MODEL.to_string(),
        "high" | "pa-high" => PA_HIGH_MODEL.to_string(),
        _ => arg.trim().to_string(),
    };
    if let Some((path, row)) = key.rsplit_once(':') {
        if Path::new(path).exists() {
            let file = fs::File::open(path)?;
            let sheet = load_datasheet(file)?;
            return sheet
                .find(row)
                .cloned()
                .ok_or_else(|| Error::Config(format!("PA {row:?} not found in {path}")));
        }
    }
    embedded_datasheet()
        .find(&key)
        .cloned()
        .ok_or_else(|| Error::Config(format!("unknown PA preset {arg:?}")))
}
