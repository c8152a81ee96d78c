//! PA switching: time sharing between two amplifiers over a block of
//! frames, and the SE-EE frontier it opens up.

use rayon::prelude::*;
use serde::Serialize;

use crate::ee_engine::aligned_params;
use crate::error::{domain, Result};
use crate::pa_models::PaSpec;
use crate::power_models::{pc_nonlinear, BsType, PowerModelParams};
use crate::se_engine::{se_curve, LinkScenario};
use crate::{Provenance, TradeoffPoint};

/// Amplifier with its link and consumption model.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PaChain {
    pub spec: PaSpec,
    pub scenario: LinkScenario,
    pub power: PowerModelParams,
}

impl PaChain {
    /// The power model is re-rated to the amplifier's own p_max_out.
    pub fn new(spec: PaSpec, scenario: LinkScenario, power: &PowerModelParams) -> Self {
        let scenario = scenario.with_pa(&spec);
        let power = aligned_params(&scenario, power);
        Self { spec, scenario, power }
    }

    /// Reference link with a W-way Doherty PA on the given BS preset.
    pub fn reference(spec: PaSpec, bs: BsType, way_count: u32) -> Self {
        let scenario = LinkScenario::reference(&spec);
        Self::new(spec, scenario, &PowerModelParams::preset(bs, way_count))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Duplex {
    Fdd,
    Tdd,
}

impl std::str::FromStr for Duplex {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fdd" => Ok(Duplex::Fdd),
            "tdd" => Ok(Duplex::Tdd),
            other => Err(crate::Error::Config(format!("unknown duplex mode {other:?}; expected fdd or tdd"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PasConfig {
    /// Used for the first F of K frames.
    pub pa1: PaChain,
    pub pa2: PaChain,
    /// Switch insertion loss G_S, dB.
    pub insertion_loss_db: f64,
    /// Switching time epsilon, s.
    pub switching_time: f64,
    /// Frame length T, s.
    pub frame_length: f64,
    /// Frames per switching window K.
    pub frame_count: u32,
    pub duplex: Duplex,
    /// Requested sharing fraction; quantized to F/K on use.
    pub kappa: f64,
}

impl PasConfig {
    pub const DEFAULT_FRAME_LENGTH: f64 = 10e-3;
    pub const DEFAULT_FRAME_COUNT: u32 = 20;

    pub fn new(pa1: PaChain, pa2: PaChain, insertion_loss_db: f64, switching_time: f64, duplex: Duplex) -> Result<Self> {
        if !(insertion_loss_db >= 0.0) || !(switching_time >= 0.0) {
            return Err(domain(
                "PasConfig::new",
                format!("G_S = {insertion_loss_db} dB, epsilon = {switching_time} s"),
            ));
        }
        Ok(Self {
            pa1,
            pa2,
            insertion_loss_db,
            switching_time,
            frame_length: Self::DEFAULT_FRAME_LENGTH,
            frame_count: Self::DEFAULT_FRAME_COUNT,
            duplex,
            kappa: 1.0,
        })
    }

    pub fn with_frames(mut self, frame_length: f64, frame_count: u32) -> Result<Self> {
        if !(frame_length > 0.0) || frame_count == 0 {
            return Err(domain("PasConfig::with_frames", format!("T = {frame_length}, K = {frame_count}")));
        }
        self.frame_length = frame_length;
        self.frame_count = frame_count;
        Ok(self)
    }

    pub fn with_kappa(mut self, kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(domain("PasConfig::with_kappa", format!("kappa = {kappa}")));
        }
        self.kappa = kappa;
        Ok(self)
    }

    /// Frames on PA-1, round(kappa K).
    pub fn frames_on_pa1(&self, kappa: f64) -> u32 {
        (kappa.clamp(0.0, 1.0) * self.frame_count as f64).round() as u32
    }

    /// kappa rounded to a whole number of frames.
    pub fn quantized_kappa(&self, kappa: f64) -> f64 {
        self.frames_on_pa1(kappa) as f64 / self.frame_count as f64
    }

    /// Switching time actually paid: none in TDD or without a switch.
    pub fn effective_switching_time(&self, kappa: f64) -> f64 {
        let f = self.frames_on_pa1(kappa);
        if self.duplex == Duplex::Tdd || f == 0 || f == self.frame_count {
            0.0
        } else {
            self.switching_time
        }
    }

    /// KT / (KT + epsilon).
    pub fn time_prefactor(&self, kappa: f64) -> f64 {
        let kt = self.frame_count as f64 * self.frame_length;
        kt / (kt + self.effective_switching_time(kappa))
    }

    /// Links of both PAs as seen through the switch.
    pub fn lossy_scenarios(&self) -> (LinkScenario, LinkScenario) {
        (
            pa_with_loss(&self.pa1.scenario, self.insertion_loss_db),
            pa_with_loss(&self.pa2.scenario, self.insertion_loss_db),
        )
    }
}

/// Scenario with gamma reduced by `insertion_loss_db`.
pub fn pa_with_loss(scenario: &LinkScenario, insertion_loss_db: f64) -> LinkScenario {
    if insertion_loss_db == 0.0 {
        return scenario.clone();
    }
    scenario
        .with_noise_variance(scenario.noise_variance * 10f64.powf(insertion_loss_db / 10.0))
        .expect("loss keeps the noise variance positive")
}

/// Per-PA SE (through the switch) and consumption at one loading factor.
#[derive(Clone, Copy, Debug, PartialEq)]
struct PaPoint {
    se: f64,
    pc: f64,
}

fn pa_point(xi: f64, scenario: &LinkScenario, power: &PowerModelParams) -> Result<PaPoint> {
    Ok(PaPoint { se: crate::se_engine::se(xi, scenario)?, pc: pc_nonlinear(xi, power)? })
}

/// Time-shared SE with one loading factor for both PAs.
pub fn pas_se(xi: f64, config: &PasConfig) -> Result<f64> {
    pas_se_split(xi, xi, config)
}

/// Time-shared SE with loading factors xi1 on PA-1 and xi2 on PA-2.
pub fn pas_se_split(xi1: f64, xi2: f64, config: &PasConfig) -> Result<f64> {
    let (s1, s2) = config.lossy_scenarios();
    let k = config.quantized_kappa(config.kappa);
    let a = if k > 0.0 { crate::se_engine::se(xi1, &s1)? } else { 0.0 };
    let b = if k < 1.0 { crate::se_engine::se(xi2, &s2)? } else { 0.0 };
    Ok(combine_se(k, a, b, config.time_prefactor(k)))
}

fn combine_se(kappa: f64, se1: f64, se2: f64, prefactor: f64) -> f64 {
    prefactor * (kappa * se1 + (1.0 - kappa) * se2)
}

/// Bits over energy of the K-frame window:
/// KT BW SE_s / (F T P_c1 + (K - F) T P_c2).
fn combine_ee(config: &PasConfig, kappa: f64, p1: PaPoint, p2: PaPoint, bandwidth: f64) -> f64 {
    let k = config.frame_count as f64;
    let t = config.frame_length;
    let f = config.frames_on_pa1(kappa) as f64;
    let se_s = combine_se(kappa, p1.se, p2.se, config.time_prefactor(kappa));
    k * t * bandwidth * se_s / (f * t * p1.pc + (k - f) * t * p2.pc)
}

/// Time-shared EE, b/J, with one loading factor.
pub fn pas_ee(xi: f64, config: &PasConfig) -> Result<f64> {
    pas_ee_split(xi, xi, config)
}

pub fn pas_ee_split(xi1: f64, xi2: f64, config: &PasConfig) -> Result<f64> {
    let (s1, s2) = config.lossy_scenarios();
    let p1 = pa_point(xi1, &s1, &config.pa1.power)?;
    let p2 = pa_point(xi2, &s2, &config.pa2.power)?;
    let k = config.quantized_kappa(config.kappa);
    Ok(combine_ee(config, k, p1, p2, s1.bandwidth))
}

/// The same EE written as the prefactor times a harmonic combination of
/// the single-PA efficiencies EE'_i = BW SE'_i / P_c^i.
pub fn pas_ee_harmonic(xi: f64, config: &PasConfig) -> Result<f64> {
    let (s1, s2) = config.lossy_scenarios();
    let p1 = pa_point(xi, &s1, &config.pa1.power)?;
    let p2 = pa_point(xi, &s2, &config.pa2.power)?;
    let k = config.quantized_kappa(config.kappa);
    let bw = s1.bandwidth;
    let (ee1, ee2) = (bw * p1.se / p1.pc, bw * p2.se / p2.pc);
    let mix = k * p1.se + (1.0 - k) * p2.se;
    Ok(config.time_prefactor(k) * ee1 * ee2 * mix / (k * p1.se * ee2 + (1.0 - k) * p2.se * ee1))
}

/// Loading-factor grid for frontier searches: log-spaced over [1e-3, 1]
/// plus a dense linear band around the usual optima.
pub fn default_xi_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (0..160).map(|i| 1e-3 * 1e3f64.powf(i as f64 / 159.0)).collect();
    g.extend((0..=160).map(|i| 0.15 + 0.45 * i as f64 / 160.0));
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    g
}

/// SE and consumption of one PA over a loading-factor grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PaTable {
    pub xi: Vec<f64>,
    pub se: Vec<f64>,
    pub pc: Vec<f64>,
    pub bandwidth: f64,
}

impl PaTable {
    pub fn build(grid: &[f64], scenario: &LinkScenario, power: &PowerModelParams) -> Result<Self> {
        let se = se_curve(grid, scenario)?;
        let pc = grid.iter().map(|&x| pc_nonlinear(x, power)).collect::<Result<Vec<_>>>()?;
        Ok(Self { xi: grid.to_vec(), se, pc, bandwidth: scenario.bandwidth })
    }

    pub fn ee(&self, i: usize) -> f64 {
        self.bandwidth * self.se[i] / self.pc[i]
    }

    /// (xi, SE, EE) points of the single-PA curve.
    pub fn curve(&self) -> Vec<TradeoffPoint> {
        (0..self.xi.len())
            .map(|i| TradeoffPoint { xi: self.xi[i], se: self.se[i], ee: self.ee(i), provenance: Provenance::Exact })
            .collect()
    }

    /// Index of the maximum-SE grid point.
    pub fn max_se_index(&self) -> usize {
        (0..self.se.len()).max_by(|&a, &b| self.se[a].total_cmp(&self.se[b])).expect("non-empty grid")
    }

    fn point(&self, i: usize) -> PaPoint {
        PaPoint { se: self.se[i], pc: self.pc[i] }
    }
}

/// Tables of both PAs as seen through the switch.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PasTables {
    pub pa1: PaTable,
    pub pa2: PaTable,
}

impl PasTables {
    pub fn build(config: &PasConfig, grid: &[f64]) -> Result<Self> {
        let (s1, s2) = config.lossy_scenarios();
        Ok(Self {
            pa1: PaTable::build(grid, &s1, &config.pa1.power)?,
            pa2: PaTable::build(grid, &s2, &config.pa2.power)?,
        })
    }

    /// Reuse tables already computed for the lossy scenarios of another
    /// configuration with the same PAs and insertion loss.
    pub fn compatible_with(&self, other: &PasConfig, reference: &PasConfig) -> bool {
        other.insertion_loss_db == reference.insertion_loss_db
            && other.pa1 == reference.pa1
            && other.pa2 == reference.pa2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiMode {
    /// One loading factor for both PAs.
    Shared,
    /// Independent loading factors.
    PerPa,
}

/// Best PAS operating point for one SE target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontierPoint {
    pub se_target: f64,
    /// b/J; zero when infeasible.
    pub ee: f64,
    /// Achieved SE.
    pub se: f64,
    pub kappa: f64,
    pub xi1: f64,
    pub xi2: f64,
    pub feasible: bool,
}

pub const FRONTIER_COLUMNS: [&str; 6] = ["se_target", "ee", "kappa", "xi1", "xi2", "feasible"];

#[derive(Clone, Copy, Debug)]
struct Candidate {
    se: f64,
    ee: f64,
    kappa: f64,
    xi1: f64,
    xi2: f64,
}

fn candidates(config: &PasConfig, tables: &PasTables, mode: XiMode) -> Vec<Candidate> {
    let n = tables.pa1.xi.len();
    let k = config.frame_count;
    (0..=k)
        .into_par_iter()
        .flat_map_iter(|f| {
            let kappa = f as f64 / k as f64;
            let prefactor = config.time_prefactor(kappa);
            let pairs: Box<dyn Iterator<Item = (usize, usize)> + Send> = match mode {
                XiMode::Shared => Box::new((0..n).map(|i| (i, i))),
                // with a single PA active only its own loading factor matters
                XiMode::PerPa if f == 0 => Box::new((0..n).map(|j| (j, j))),
                XiMode::PerPa if f == k => Box::new((0..n).map(|i| (i, i))),
                XiMode::PerPa => Box::new((0..n).flat_map(move |i| (0..n).map(move |j| (i, j)))),
            };
            pairs.map(move |(i, j)| {
                let p1 = tables.pa1.point(i);
                let p2 = tables.pa2.point(j);
                Candidate {
                    se: combine_se(kappa, p1.se, p2.se, prefactor),
                    ee: combine_ee(config, kappa, p1, p2, tables.pa1.bandwidth),
                    kappa,
                    xi1: tables.pa1.xi[i],
                    xi2: tables.pa2.xi[j],
                }
            })
        })
        .collect()
}

/// Maximum EE subject to SE >= target, for each target, over
/// kappa in {0, 1/K, ..., 1} and the tabulated loading factors.
pub fn pas_frontier_with_tables(targets: &[f64], config: &PasConfig, tables: &PasTables, mode: XiMode) -> Vec<FrontierPoint> {
    let mut cands = candidates(config, tables, mode);
    // descending SE; ties broken so the run is independent of thread timing
    cands.sort_by(|a, b| {
        b.se.total_cmp(&a.se)
            .then(b.ee.total_cmp(&a.ee))
            .then(a.kappa.total_cmp(&b.kappa))
            .then(a.xi1.total_cmp(&b.xi1))
            .then(a.xi2.total_cmp(&b.xi2))
    });
    // best[i]: highest-EE candidate among cands[..=i]
    let mut best: Vec<usize> = Vec::with_capacity(cands.len());
    for i in 0..cands.len() {
        let keep = match best.last() {
            Some(&b) if cands[b].ee >= cands[i].ee => b,
            _ => i,
        };
        best.push(keep);
    }
    targets
        .iter()
        .map(|&target| {
            // number of candidates with se >= target
            let count = cands.partition_point(|c| c.se >= target);
            if count == 0 {
                return FrontierPoint { se_target: target, ee: 0.0, se: 0.0, kappa: 0.0, xi1: 0.0, xi2: 0.0, feasible: false };
            }
            let c = cands[best[count - 1]];
            FrontierPoint { se_target: target, ee: c.ee, se: c.se, kappa: c.kappa, xi1: c.xi1, xi2: c.xi2, feasible: true }
        })
        .collect()
}

pub fn pas_frontier(targets: &[f64], config: &PasConfig, mode: XiMode) -> Result<Vec<FrontierPoint>> {
    let tables = PasTables::build(config, &default_xi_grid())?;
    Ok(pas_frontier_with_tables(targets, config, &tables, mode))
}

/// Maximum EE of a single PA subject to SE >= target.
pub fn single_pa_frontier(targets: &[f64], table: &PaTable) -> Vec<FrontierPoint> {
    targets
        .iter()
        .map(|&target| {
            let best = (0..table.xi.len())
                .filter(|&i| table.se[i] >= target)
                .max_by(|&a, &b| table.ee(a).total_cmp(&table.ee(b)).then(b.cmp(&a)));
            match best {
                Some(i) => FrontierPoint {
                    se_target: target,
                    ee: table.ee(i),
                    se: table.se[i],
                    kappa: f64::NAN,
                    xi1: table.xi[i],
                    xi2: table.xi[i],
                    feasible: true,
                },
                None => FrontierPoint { se_target: target, ee: 0.0, se: 0.0, kappa: f64::NAN, xi1: 0.0, xi2: 0.0, feasible: false },
            }
        })
        .collect()
}

/// The four switching set-ups compared in the sharing study: ideal switch,
/// TDD and two FDD switching times, all but the first with 1 dB loss.
pub fn sharing_configurations(pa1: &PaChain, pa2: &PaChain, gs_db: f64) -> Vec<(&'static str, PasConfig)> {
    let mk = |gs, eps, duplex| PasConfig::new(pa1.clone(), pa2.clone(), gs, eps, duplex).expect("valid preset");
    vec![
        ("ideal_switch", mk(0.0, 0.0, Duplex::Tdd)),
        ("tdd", mk(gs_db, 0.0, Duplex::Tdd)),
        ("fdd_eps_10us", mk(gs_db, 10e-6, Duplex::Fdd)),
        ("fdd_eps_1ms", mk(gs_db, 1e-3, Duplex::Fdd)),
    ]
}

/// Reference pair: the 25 W PA as PA-1 and the 100 W PA as PA-2, both
/// 2-way Doherty on the macro preset.
pub fn reference_pair() -> (PaChain, PaChain) {
    (
        PaChain::reference(crate::pa_models::pa_low(), BsType::Macro, 2),
        PaChain::reference(crate::pa_models::pa_high(), BsType::Macro, 2),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(gs: f64, eps: f64, duplex: Duplex) -> PasConfig {
        let (a, b) = reference_pair();
        PasConfig::new(a, b, gs, eps, duplex).unwrap()
    }

    #[test]
    fn loss_scaling() {
        let sc = reference_pair().0.scenario;
        assert_eq!(pa_with_loss(&sc, 0.0), sc);
        let one = pa_with_loss(&sc, 1.0);
        assert!((one.gamma / sc.gamma - 10f64.powf(-0.1)).abs() < 1e-12);
        let half = pa_with_loss(&sc, 10.0 * 2f64.log10());
        assert!((half.gamma / sc.gamma - 0.5).abs() < 1e-12);
        assert_eq!(one.p_max_out, sc.p_max_out);
    }

    #[test]
    fn kappa_quantization_and_prefactor() {
        let c = config(1.0, 1e-3, Duplex::Fdd);
        for i in 0..=1000 {
            let k = i as f64 / 1000.0;
            assert!((c.quantized_kappa(k) - k).abs() <= 0.5 / 20.0 + 1e-15);
        }
        assert_eq!(c.time_prefactor(1.0), 1.0);
        assert_eq!(c.time_prefactor(0.0), 1.0);
        assert!((c.time_prefactor(0.5) - 200.0 / 201.0).abs() < 1e-15);
        let t = config(1.0, 1e-3, Duplex::Tdd);
        assert_eq!(t.time_prefactor(0.5), 1.0);
    }

    #[test]
    fn combinations() {
        let c = config(1.0, 1e-3, Duplex::Fdd);
        let (s1, _) = c.lossy_scenarios();
        let xi = 0.3;
        let se1 = crate::se_engine::se(xi, &s1).unwrap();
        let ee1 = s1.bandwidth * se1 / pc_nonlinear(xi, &c.pa1.power).unwrap();
        let one = c.clone().with_kappa(1.0).unwrap();
        assert_eq!(pas_se(xi, &one).unwrap(), se1);
        assert!((pas_ee(xi, &one).unwrap() - ee1).abs() < 1e-12 * ee1);
        for k in [0.05, 0.3, 0.5, 0.85] {
            let ck = c.clone().with_kappa(k).unwrap();
            let d = pas_ee(xi, &ck).unwrap();
            let h = pas_ee_harmonic(xi, &ck).unwrap();
            assert!((d - h).abs() <= 1e-12 * d, "kappa={k}");
        }
        // identical PAs
        let same = PasConfig::new(c.pa1.clone(), c.pa1.clone(), 1.0, 1e-3, Duplex::Fdd).unwrap().with_kappa(0.5).unwrap();
        assert!((pas_se(xi, &same).unwrap() - 200.0 / 201.0 * se1).abs() < 1e-12);
        assert!((pas_ee(xi, &same).unwrap() - 200.0 / 201.0 * ee1).abs() < 1e-9 * ee1);
        let same_tdd = PasConfig { duplex: Duplex::Tdd, ..same };
        assert!((pas_ee(xi, &same_tdd).unwrap() - ee1).abs() < 1e-9 * ee1);
    }

    fn small_grid() -> Vec<f64> {
        (1..=40).map(|i| i as f64 / 40.0).collect()
    }

    #[test]
    fn frontier_basic_properties() {
        let grid = small_grid();
        let ideal = config(0.0, 0.0, Duplex::Tdd);
        let tables = PasTables::build(&ideal, &grid).unwrap();
        let max_se = tables.pa2.se[tables.pa2.max_se_index()];
        let targets: Vec<f64> = (0..=30).map(|i| max_se * i as f64 / 30.0).collect();
        let front = pas_frontier_with_tables(&targets, &ideal, &tables, XiMode::Shared);
        let low = single_pa_frontier(&targets, &tables.pa1);
        let high = single_pa_frontier(&targets, &tables.pa2);
        for ((f, l), h) in front.iter().zip(&low).zip(&high) {
            assert!(f.feasible);
            assert!(f.se >= f.se_target);
            let single = if l.feasible { l.ee.max(h.ee) } else { h.ee };
            assert!(f.ee >= single * (1.0 - 1e-9));
        }
        assert!(front.windows(2).all(|w| w[1].ee <= w[0].ee));
        // target zero: best single PA at its EE optimum
        let best_single = (0..grid.len()).map(|i| tables.pa1.ee(i).max(tables.pa2.ee(i))).fold(0.0, f64::max);
        assert!((front[0].ee - best_single).abs() <= 1e-12 * best_single);
        // at the high PA's peak only PA-2 reaches the target
        let top = front.last().unwrap();
        assert_eq!(top.kappa, 0.0);
        let beyond = pas_frontier_with_tables(&[max_se * 1.01], &ideal, &tables, XiMode::Shared);
        assert!(!beyond[0].feasible);
        let per_pa = pas_frontier_with_tables(&targets, &ideal, &tables, XiMode::PerPa);
        for (p, s) in per_pa.iter().zip(&front) {
            assert!(p.ee >= s.ee * (1.0 - 1e-12));
        }
    }

    #[test]
    fn switching_time_ordering() {
        let grid = small_grid();
        let tdd = config(1.0, 0.0, Duplex::Tdd);
        let tables = PasTables::build(&tdd, &grid).unwrap();
        let targets: Vec<f64> = (0..=20).map(|i| 0.8 * tables.pa2.se[tables.pa2.max_se_index()] * i as f64 / 20.0).collect();
        let mut prev = pas_frontier_with_tables(&targets, &tdd, &tables, XiMode::Shared);
        for eps in [10e-6, 1e-3, 5e-3] {
            let fdd = config(1.0, eps, Duplex::Fdd);
            assert!(tables.compatible_with(&fdd, &tdd));
            let front = pas_frontier_with_tables(&targets, &fdd, &tables, XiMode::Shared);
            for (a, b) in front.iter().zip(&prev) {
                assert!(a.ee <= b.ee * (1.0 + 1e-12));
            }
            prev = front;
        }
    }
}
