use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use ofdmpa_core::ee_engine::{ee_sweep, pareto_window_with, xi_ee_opt, EE_SWEEP_COLUMNS};
use ofdmpa_core::mc_oracle::{empirical_pdf_distance, estimate_mi, simulate_frames, FrameConfig, PaModel};
use ofdmpa_core::output::{Cell, Format, Table};
use ofdmpa_core::pa_models::{drain_efficiency, embedded_datasheet, load_datasheet, median_drain_efficiency, watts_to_dbm};
use ofdmpa_core::pas_engine::{
    pas_frontier_with_tables, sharing_configurations, single_pa_frontier, PaChain, PaTable, PasConfig, PasTables,
    XiMode, FRONTIER_COLUMNS,
};
use ofdmpa_core::power_models::{pc_nonlinear, PowerModelParams};
use ofdmpa_core::se_engine::{
    build_scenario, se, se_curve, se_lower_bound_multipath, se_sweep, xi_se_opt, ChannelProfile, XiMethod,
    SE_SWEEP_COLUMNS,
};
use ofdmpa_core::{Error, LinkScenario, PaSpec, Result};

use crate::config::{resolve_pa, Settings};

/// A PA with its link and power model from the resolved settings.
fn chain(settings: &mut Settings, key: &str, default_pa: &str) -> Result<PaChain> {
    let spec = resolve_pa(&settings.value(key, default_pa))?;
    let scenario = scenario_for(settings, &spec)?;
    let bs = settings.bs_type()?;
    let w: u32 = settings.parsed("way-count", "2")?;
    let power = PowerModelParams::preset(bs, w);
    Ok(PaChain::new(spec, scenario, &power))
}

fn scenario_for(settings: &mut Settings, spec: &PaSpec) -> Result<LinkScenario> {
    let g: f64 = settings.parsed("g-db", "5")?;
    let alpha: f64 = settings.parsed("alpha", "3.76")?;
    let d: f64 = settings.parsed("d-km", "0.2")?;
    let psd: f64 = settings.parsed("noise-psd", "-174")?;
    let bw: f64 = settings.parsed("bandwidth", "1e7")?;
    build_scenario(g, alpha, d, psd, bw, spec)
}

fn describe(table: &mut Table, settings: &Settings, chain: Option<&PaChain>) {
    for (k, v) in settings.header() {
        table.param(k, v);
    }
    if let Some(c) = chain {
        table.param("pa.model", &c.spec.model_name);
        table.param("link.noise_variance_w", format!("{:e}", c.scenario.noise_variance));
        table.param("link.attenuation_db", format!("{:e}", c.scenario.attenuation_db));
        table.param("link.gamma", format!("{:e}", c.scenario.gamma));
        table.param("pa.p_max_out_w", format!("{:e}", c.spec.p_max_out));
    }
}

/// Write to `--out`, or stdout when it is absent.
fn emit(table: &Table, settings: &mut Settings) -> Result<Vec<PathBuf>> {
    let format = settings.format()?;
    match settings.get("out").map(PathBuf::from) {
        Some(path) => {
            write_file(table, format, &path)?;
            Ok(vec![path])
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            table.write(format, &mut lock)?;
            lock.flush()?;
            Ok(Vec::new())
        }
    }
}

fn write_file(table: &Table, format: Format, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut buf = Vec::new();
    table.write(format, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn se_sweep_cmd(settings: &mut Settings) -> Result<Vec<PathBuf>> {
    let c = chain(settings, "pa", "low")?;
    let grid = settings.grid("0.005:1:200")?;
    let rows = se_sweep(&grid, &c.scenario)?;
    let mut t = Table::new("se-vs-loading-factor", &SE_SWEEP_COLUMNS);
    describe(&mut t, settings, Some(&c));
    t.param("xi_se.closed_form", format!("{:e}", xi_se_opt(&c.scenario, XiMethod::ClosedForm)?.xi));
    for r in rows {
        t.push(vec![r.xi.into(), r.se_exact.into(), r.se_ideal.into(), r.se_ibo.into(), r.pr_clip.into()])?;
    }
    emit(&t, settings)
}

pub fn ee_sweep_cmd(settings: &mut Settings) -> Result<Vec<PathBuf>> {
    let c = chain(settings, "pa", "low")?;
    let grid = settings.grid("0.005:1:200")?;
    let rows = ee_sweep(&grid, &c.scenario, &c.power)?;
    let mut t = Table::new("ee-vs-loading-factor", &EE_SWEEP_COLUMNS);
    describe(&mut t, settings, Some(&c));
    t.param("xi_ee.closed_form", format!("{:e}", xi_ee_opt(&c.scenario, &c.power, XiMethod::ClosedForm)?.xi));
    for r in rows {
        t.push(vec![r.xi.into(), r.ee_exact.into(), r.ee_linear.into(), r.ee_ideal.into(), r.pc_watts.into()])?;
    }
    emit(&t, settings)
}

pub fn tradeoff_cmd(settings: &mut Settings) -> Result<Vec<PathBuf>> {
    let c = chain(settings, "pa", "low")?;
    let grid = settings.grid("0.005:1:200")?;
    let se_values = se_curve(&grid, &c.scenario)?;
    let window = pareto_window_with(&c.scenario, &c.power, XiMethod::ExactRoot)?;
    let mut t = Table::new("se-ee-tradeoff", &["xi", "se", "ee", "pc_watts", "region"]);
    describe(&mut t, settings, Some(&c));
    t.param("pareto.lo", format!("{:e}", window.lo));
    t.param("pareto.hi", format!("{:e}", window.hi));
    for (&xi, &s) in grid.iter().zip(&se_values) {
        let pc = pc_nonlinear(xi, &c.power)?;
        let region = match window.classify(xi) {
            ofdmpa_core::ee_engine::ParetoRegion::Below => "below",
            ofdmpa_core::ee_engine::ParetoRegion::Inside => "inside",
            ofdmpa_core::ee_engine::ParetoRegion::Above => "above",
        };
        t.push(vec![xi.into(), s.into(), (c.scenario.bandwidth * s / pc).into(), pc.into(), region.into()])?;
    }
    emit(&t, settings)
}

pub fn optimal_xi_cmd(settings: &mut Settings) -> Result<Vec<PathBuf>> {
    let c = chain(settings, "pa", "low")?;
    let sc = &c.scenario;
    let mut t = Table::new("optimal-loading-factors", &["quantity", "method", "xi", "ibo_db", "se", "ee"]);
    describe(&mut t, settings, Some(&c));
    let row = |t: &mut Table, quantity: &str, method: &str, xi: f64| -> Result<()> {
        let s = se(xi, sc)?;
        let ee = sc.bandwidth * s / pc_nonlinear(xi, &c.power)?;
        t.push(vec![quantity.into(), method.into(), xi.into(), (-10.0 * xi.log10()).into(), s.into(), ee.into()])
    };
    row(&mut t, "xi_se", "closed_form_lambert_w", xi_se_opt(sc, XiMethod::ClosedForm)?.xi)?;
    row(&mut t, "xi_se", "exact_stationary_root", xi_se_opt(sc, XiMethod::ExactRoot)?.xi)?;
    row(&mut t, "xi_ee", "closed_form_lambert_w", xi_ee_opt(sc, &c.power, XiMethod::ClosedForm)?.xi)?;
    row(&mut t, "xi_ee", "exact_stationary_root", xi_ee_opt(sc, &c.power, XiMethod::ExactRoot)?.xi)?;
    emit(&t, settings)
}

pub fn datasheet_cmd(settings: &mut Settings) -> Result<Vec<PathBuf>> {
    let sheet = match settings.get("datasheet") {
        Some(path) => {
            let f = fs::File::open(path).map_err(|e| Error::Config(format!("datasheet {path}: {e}")))?;
            load_datasheet(f)?
        }
        None => embedded_datasheet(),
    };
    let mut t = Table::new(
        "pa-datasheet",
        &["id", "model", "p_max_out_dbm", "gain_db", "p_max_in_dbm", "voltage_v", "current_a", "eta", "input_flagged"],
    );
    describe(&mut t, settings, None);
    t.param("rows", sheet.specs.len());
    t.param("skipped_rows", sheet.issues.iter().filter(|i| i.skipped).count());
    if let Some(m) = median_drain_efficiency(&sheet.specs) {
        t.param("median_eta", format!("{m:e}"));
    }
    let opt = |v: Option<f64>| v.map(Cell::from).unwrap_or(Cell::Text(String::new()));
    for s in &sheet.specs {
        t.push(vec![
            s.id.map(|i| Cell::Int(i as i64)).unwrap_or(Cell::Text(String::new())),
            s.model_name.as_str().into(),
            watts_to_dbm(s.p_max_out).into(),
            (10.0 * s.gain.log10()).into(),
            watts_to_dbm(s.p_max_in).into(),
            opt(s.supply_voltage),
            opt(s.supply_current),
            opt(drain_efficiency(s).ok()),
            s.listed_input_inconsistent().into(),
        ])?;
    }
    emit(&t, settings)
}

fn parse_channel(spec: &str) -> Result<ChannelProfile> {
    let bad = || Error::Config(format!("--channel {spec:?}: expected flat or exp:<taps>:<decay dB>"));
    if spec.trim() == "flat" {
        return Ok(ChannelProfile::flat());
    }
    let parts: Vec<&str> = spec.trim().split(':').collect();
    match parts.as_slice() {
        ["exp", n, db] => {
            let n: usize = n.parse().map_err(|_| bad())?;
            let db: f64 = db.parse().map_err(|_| bad())?;
            ChannelProfile::exponential(n, db / 10.0 * std::f64::consts::LN_10, n)
        }
        _ => Err(bad()),
    }
}

pub fn mc_validate_cmd(settings: &mut Settings) -> Result<Vec<PathBuf>> {
    let c = chain(settings, "pa", "low")?;
    let grid = settings.grid("0.05:0.4:4")?;
    let samples: usize = settings.parsed("samples", "262144")?;
    let n: usize = settings.parsed("subcarriers", "256")?;
    let seed: u64 = settings.parsed("seed", "1")?;
    let channel = parse_channel(&settings.value("channel", "flat"))?;
    let multipath = channel.len() > 1;
    let cp = if multipath { channel.cp_length } else { 0 };
    let mut t = Table::new(
        "monte-carlo-validation",
        &["xi", "se_analytic", "se_mc", "gap", "ks", "clip_fraction", "samples"],
    );
    describe(&mut t, settings, Some(&c));
    for (i, &xi) in grid.iter().enumerate() {
        let cfg = FrameConfig::for_samples(samples, n, cp, seed.wrapping_add(i as u64), PaModel::SoftLimiter)?;
        let set = simulate_frames(&cfg, xi, &c.scenario, &channel)?;
        let mc = estimate_mi(&set, &c.scenario)?;
        let (analytic, ks) = if multipath {
            (se_lower_bound_multipath(&channel, xi, &c.scenario)?, f64::NAN)
        } else {
            (se(xi, &c.scenario)?, empirical_pdf_distance(&set, xi, &c.scenario)?)
        };
        t.push(vec![
            xi.into(),
            analytic.into(),
            mc.into(),
            (mc - analytic).into(),
            ks.into(),
            set.stats.clip_fraction.into(),
            Cell::Int(set.samples.len() as i64),
        ])?;
    }
    emit(&t, settings)
}

/// Frontier files for the four switching set-ups (or one custom set-up when
/// `--duplex` or `--eps` is given) plus both single-PA curves.
pub fn pas_frontier_cmd(settings: &mut Settings) -> Result<Vec<PathBuf>> {
    let pa1 = chain(settings, "pa", "low")?;
    let pa2 = chain(settings, "pa2", "high")?;
    let gs: f64 = settings.parsed("gs-db", "1")?;
    let frame_length: f64 = settings.parsed("frame-length", "0.01")?;
    let frames: u32 = settings.parsed("frames", "20")?;
    let n_targets: usize = settings.parsed("targets", "200")?;
    let mode = match settings.value("xi-mode", "shared").as_str() {
        "shared" => XiMode::Shared,
        "per-pa" | "per_pa" => XiMode::PerPa,
        other => return Err(Error::Config(format!("--xi-mode {other:?}: expected shared or per-pa"))),
    };
    if n_targets < 2 {
        return Err(Error::Config("--targets must be at least 2".into()));
    }
    let grid = match settings.get("xi-grid") {
        Some(_) => settings.grid("")?,
        None => ofdmpa_core::pas_engine::default_xi_grid(),
    };
    let custom = settings.get("duplex").is_some() || settings.get("eps").is_some();
    let configs: Vec<(String, PasConfig)> = if custom {
        let duplex = settings.duplex()?;
        let eps: f64 = settings.parsed("eps", "0")?;
        vec![("custom".to_string(), PasConfig::new(pa1.clone(), pa2.clone(), gs, eps, duplex)?)]
    } else {
        sharing_configurations(&pa1, &pa2, gs).into_iter().map(|(k, c)| (k.to_string(), c)).collect()
    };
    let configs = configs
        .into_iter()
        .map(|(k, c)| c.with_frames(frame_length, frames).map(|c| (k, c)))
        .collect::<Result<Vec<_>>>()?;

    let single1 = PaTable::build(&grid, &pa1.scenario, &pa1.power)?;
    let single2 = PaTable::build(&grid, &pa2.scenario, &pa2.power)?;
    let se_max = single1.se[single1.max_se_index()].max(single2.se[single2.max_se_index()]);
    let targets: Vec<f64> = (0..n_targets).map(|i| se_max * i as f64 / (n_targets - 1) as f64).collect();

    let format = settings.format()?;
    let dir = PathBuf::from(settings.value("out", "."));
    let mut written = Vec::new();
    let mut cache: Vec<(PasConfig, PasTables)> = Vec::new();
    for (tag, config) in &configs {
        let hit = cache.iter().position(|(r, tables)| tables.compatible_with(config, r));
        let idx = match hit {
            Some(i) => i,
            None => {
                cache.push((config.clone(), PasTables::build(config, &grid)?));
                cache.len() - 1
            }
        };
        let points = pas_frontier_with_tables(&targets, config, &cache[idx].1, mode);
        let mut t = Table::new(format!("pas-frontier/{tag}"), &FRONTIER_COLUMNS);
        describe(&mut t, settings, None);
        t.param("config.duplex", format!("{:?}", config.duplex).to_lowercase());
        t.param("config.eps_s", format!("{:e}", config.switching_time));
        t.param("config.gs_db", format!("{:e}", config.insertion_loss_db));
        for p in points {
            t.push(vec![p.se_target.into(), p.ee.into(), p.kappa.into(), p.xi1.into(), p.xi2.into(), p.feasible.into()])?;
        }
        let path = dir.join(format!("pas_frontier_{tag}.{}", format.extension()));
        write_file(&t, format, &path)?;
        written.push(path);
    }

    let mut t = Table::new("single-pa-curves", &["pa", "xi", "se", "ee", "frontier_ee"]);
    describe(&mut t, settings, None);
    for (name, table) in [(&pa1.spec.model_name, &single1), (&pa2.spec.model_name, &single2)] {
        let front = single_pa_frontier(&table.se, table);
        for (i, f) in front.iter().enumerate() {
            t.push(vec![name.as_str().into(), table.xi[i].into(), table.se[i].into(), table.ee(i).into(), f.ee.into()])?;
        }
    }
    let path = dir.join(format!("single_pa.{}", format.extension()));
    write_file(&t, format, &path)?;
    written.push(path);
    Ok(written)
}
