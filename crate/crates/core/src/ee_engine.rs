//! Energy efficiency: the practical EE, its linear-PA and ideal-PA bounds,
//! the EE-optimal loading factor and the SE-EE Pareto window.

use std::f64::consts::{E, LN_2};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::power_models::{pc_ideal, pc_nonlinear, PowerModelParams};
use crate::se_engine::{se, se_ibo, se_ideal, xi_se_opt, LinkScenario, XiMethod};
use crate::specfun::{lambert_w, WBranch};

/// Power-model parameters re-rated to the scenario's PA.
pub fn aligned_params(scenario: &LinkScenario, params: &PowerModelParams) -> PowerModelParams {
    params.clone().with_p_max_out(scenario.p_max_out).expect("scenario p_max_out is positive")
}

/// One side of the consumption breakpoint, where P_c = v1 + v2 sqrt(xi).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EePiece {
    /// 1 below the breakpoint, 2 above.
    pub index: u8,
    pub lo: f64,
    pub hi: f64,
    pub v1: f64,
    pub v2: f64,
    /// Lower edge of the quasi-concave region, (v + sqrt(1+v^2))^2 / gamma^2.
    pub zeta: f64,
}

impl EePiece {
    fn new(index: u8, lo: f64, hi: f64, (c1, c2): (f64, f64), scenario: &LinkScenario, params: &PowerModelParams) -> Self {
        let v1 = params.p0 + params.p_max_out * params.c0 * c1;
        let v2 = params.p_max_out * params.c0 * c2;
        let v = v2 / v1;
        let zeta = (v + (1.0 + v * v).sqrt()).powi(2) / (scenario.gamma * scenario.gamma);
        Self { index, lo, hi, v1, v2, zeta }
    }

    pub fn v(&self) -> f64 {
        self.v2 / self.v1
    }

    pub fn contains(&self, xi: f64) -> bool {
        xi > self.lo && xi <= self.hi
    }
}

/// The consumption pieces (one for W = 1, two otherwise).
pub fn ee_pieces(scenario: &LinkScenario, params: &PowerModelParams) -> Vec<EePiece> {
    let k = params.coefficients();
    let bp = params.breakpoint();
    let mut out = vec![EePiece::new(1, 0.0, bp.min(1.0), k.low, scenario, params)];
    if bp < 1.0 {
        out.push(EePiece::new(2, bp, 1.0, k.high, scenario, params));
    }
    out
}

fn piece_at(scenario: &LinkScenario, params: &PowerModelParams, xi: f64) -> EePiece {
    let pieces = ee_pieces(scenario, params);
    pieces.iter().copied().find(|p| p.contains(xi)).unwrap_or(pieces[0])
}

fn check_xi(func: &'static str, xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(domain(func, format!("xi = {xi}, need 0 < xi <= 1")));
    }
    Ok(())
}

/// Practical EE, BW se(xi) / P_c(xi), b/J.
pub fn ee(xi: f64, scenario: &LinkScenario, params: &PowerModelParams) -> Result<f64> {
    let s = se(xi, scenario)?;
    Ok(scenario.bandwidth * s / pc_nonlinear(xi, params)?)
}

/// EE with a perfectly linear PA, BW log2(1 + gamma xi) / P_c(xi).
pub fn ee_linear(xi: f64, scenario: &LinkScenario, params: &PowerModelParams) -> Result<f64> {
    Ok(scenario.bandwidth * se_ideal(xi, scenario) / pc_nonlinear(xi, params)?)
}

/// EE with a perfectly linear and lossless PA.
pub fn ee_ideal(xi: f64, scenario: &LinkScenario, params: &PowerModelParams) -> Result<f64> {
    Ok(scenario.bandwidth * se_ideal(xi, scenario) / pc_ideal(xi, params, scenario.gain)?)
}

/// d ee_linear / d xi using the coefficients of `piece`.
pub fn ee_linear_derivative_on(xi: f64, scenario: &LinkScenario, piece: &EePiece) -> f64 {
    let (v1, v2) = (piece.v1, piece.v2);
    let r = xi.sqrt();
    let g = scenario.gamma;
    let d = v1 + v2 * r;
    let bracket = 2.0 / LN_2 * g * (v1 * r + v2 * xi) / (1.0 + g * xi) - v2 * se_ideal(xi, scenario);
    scenario.bandwidth / (2.0 * r * d * d) * bracket
}

/// d ee_linear / d xi; at the breakpoint the lower piece is used.
pub fn ee_linear_derivative(xi: f64, scenario: &LinkScenario, params: &PowerModelParams) -> Result<f64> {
    check_xi("ee_linear_derivative", xi)?;
    Ok(ee_linear_derivative_on(xi, scenario, &piece_at(scenario, params, xi)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EeBreakdown {
    pub xi: f64,
    pub se_bits: f64,
    pub pc_watts: f64,
    pub ee_bits_per_joule: f64,
    pub v1: f64,
    pub v2: f64,
    pub zeta: f64,
}

pub fn ee_breakdown(xi: f64, scenario: &LinkScenario, params: &PowerModelParams) -> Result<EeBreakdown> {
    let se_bits = se(xi, scenario)?;
    let pc_watts = pc_nonlinear(xi, params)?;
    let piece = piece_at(scenario, params, xi);
    Ok(EeBreakdown {
        xi,
        se_bits,
        pc_watts,
        ee_bits_per_joule: scenario.bandwidth * se_bits / pc_watts,
        v1: piece.v1,
        v2: piece.v2,
        zeta: piece.zeta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EeCandidate {
    pub piece: u8,
    pub xi: f64,
    pub ee_linear: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EeOptimum {
    pub xi: f64,
    pub piece: u8,
    pub method: XiMethod,
    pub candidates: Vec<EeCandidate>,
    /// Whether ee_linear is still increasing just above zeta on the winning
    /// piece, i.e. the optimum is not below zeta.
    pub zeta_assumption_holds: bool,
}

/// Turning point of ee_linear on `[a, b]`, or the better edge when the
/// derivative keeps one sign.
fn exact_on(a: f64, b: f64, scenario: &LinkScenario, piece: &EePiece) -> f64 {
    let d = |x: f64| ee_linear_derivative_on(x, scenario, piece);
    const GRID: usize = 256;
    let grid: Vec<f64> = (0..GRID).map(|i| a * (b / a).powf(i as f64 / (GRID - 1) as f64)).collect();
    for w in grid.windows(2) {
        if d(w[0]) > 0.0 && d(w[1]) <= 0.0 {
            let (mut lo, mut hi) = (w[0], w[1]);
            while hi - lo > 1e-14 * hi {
                let m = 0.5 * (lo + hi);
                if d(m) > 0.0 {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            return 0.5 * (lo + hi);
        }
    }
    if d(b) > 0.0 {
        b
    } else {
        a
    }
}

/// Turning point of the high-SNR approximation, exp(2 + 2 W0(sqrt(gamma)/(e v))) / gamma.
fn closed_on(a: f64, b: f64, scenario: &LinkScenario, piece: &EePiece) -> Result<f64> {
    let arg = scenario.gamma.sqrt() / (E * piece.v());
    if arg < -1.0 / E {
        // no turning point; with v < 0 the approximate slope is negative throughout
        return Ok(a);
    }
    let w = lambert_w(WBranch::Principal, arg)?;
    Ok(((2.0 + 2.0 * w).exp() / scenario.gamma).clamp(a, b))
}

/// EE-optimal loading factor of ee_linear.
pub fn xi_ee_opt(scenario: &LinkScenario, params: &PowerModelParams, method: XiMethod) -> Result<EeOptimum> {
    let pieces = ee_pieces(scenario, params);
    if pieces[0].zeta >= 1.0 {
        return Err(Error::Infeasible(format!(
            "zeta = {} >= 1: the quasi-concave region is empty",
            pieces[0].zeta
        )));
    }
    let mut candidates = Vec::new();
    for piece in &pieces {
        let a = piece.zeta.max(piece.lo).max(1e-12);
        let b = piece.hi;
        if a >= b {
            continue;
        }
        let xi = match method {
            XiMethod::ExactRoot => exact_on(a, b, scenario, piece),
            XiMethod::ClosedForm => closed_on(a, b, scenario, piece)?,
        };
        candidates.push(EeCandidate { piece: piece.index, xi, ee_linear: ee_linear(xi, scenario, params)? });
    }
    let best = candidates
        .iter()
        .copied()
        .reduce(|best, c| {
            let tie = (c.ee_linear - best.ee_linear).abs() <= 1e-12 * best.ee_linear;
            if (tie && c.xi < best.xi) || (!tie && c.ee_linear > best.ee_linear) {
                c
            } else {
                best
            }
        })
        .ok_or_else(|| Error::Infeasible("no feasible piece".into()))?;
    let piece = pieces.iter().find(|p| p.index == best.piece).expect("candidate piece");
    let edge = piece.zeta.max(piece.lo).max(1e-12);
    let zeta_assumption_holds = ee_linear_derivative_on(edge * (1.0 + 1e-9), scenario, piece) > 0.0 || best.piece > 1;
    Ok(EeOptimum { xi: best.xi, piece: best.piece, method, candidates, zeta_assumption_holds })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParetoRegion {
    /// Approximate SE and EE both increase with xi.
    Below,
    /// They move in opposite directions.
    Inside,
    /// Both decrease.
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParetoWindow {
    pub lo: f64,
    pub hi: f64,
    pub xi_ee: f64,
    pub xi_se: f64,
}

impl ParetoWindow {
    pub fn classify(&self, xi: f64) -> ParetoRegion {
        if xi < self.lo {
            ParetoRegion::Below
        } else if xi > self.hi {
            ParetoRegion::Above
        } else {
            ParetoRegion::Inside
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

/// Interval between the closed-form EE- and SE-optimal loading factors.
pub fn pareto_window(scenario: &LinkScenario, params: &PowerModelParams) -> Result<ParetoWindow> {
    pareto_window_with(scenario, params, XiMethod::ClosedForm)
}

/// Pareto window from either optimizer. With [`XiMethod::ExactRoot`] the
/// edges are the true turning points of `se_ibo` and `ee_linear`, so the
/// region classification is exact for those two functions; the closed forms
/// can sit slightly inside or outside them.
pub fn pareto_window_with(scenario: &LinkScenario, params: &PowerModelParams, method: XiMethod) -> Result<ParetoWindow> {
    let xi_ee = xi_ee_opt(scenario, params, method)?.xi;
    let xi_se = xi_se_opt(scenario, method)?.xi;
    Ok(ParetoWindow { lo: xi_ee.min(xi_se), hi: xi_ee.max(xi_se), xi_ee, xi_se })
}

/// Signs of (d se_ibo, d ee_linear) by central differences.
pub fn tradeoff_slopes(xi: f64, scenario: &LinkScenario, params: &PowerModelParams) -> Result<(f64, f64)> {
    let h = 1e-6 * xi.max(1e-3);
    let (a, b) = (xi - h, (xi + h).min(1.0));
    let dse = (se_ibo(b, scenario)? - se_ibo(a, scenario)?) / (b - a);
    let dee = (ee_linear(b, scenario, params)? - ee_linear(a, scenario, params)?) / (b - a);
    Ok((dse, dee))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EeSweepRow {
    pub xi: f64,
    pub ee_exact: f64,
    pub ee_linear: f64,
    pub ee_ideal: f64,
    pub pc_watts: f64,
}

pub const EE_SWEEP_COLUMNS: [&str; 5] = ["xi", "ee_exact", "ee_linear", "ee_ideal", "pc_watts"];

pub fn ee_sweep(grid: &[f64], scenario: &LinkScenario, params: &PowerModelParams) -> Result<Vec<EeSweepRow>> {
    grid.par_iter()
        .map(|&xi| {
            Ok(EeSweepRow {
                xi,
                ee_exact: ee(xi, scenario, params)?,
                ee_linear: ee_linear(xi, scenario, params)?,
                ee_ideal: ee_ideal(xi, scenario, params)?,
                pc_watts: pc_nonlinear(xi, params)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pa_models::{pa_high, pa_low};
    use crate::power_models::BsType;

    fn setup(w: u32) -> (LinkScenario, PowerModelParams) {
        let sc = LinkScenario::reference(&pa_low());
        let p = aligned_params(&sc, &PowerModelParams::preset(BsType::Macro, w));
        (sc, p)
    }

    #[test]
    fn full_load_value() {
        let sc = LinkScenario::reference(&pa_low());
        let raw = PowerModelParams::preset(BsType::Macro, 2);
        let expected = sc.bandwidth * (1.0 + sc.gamma).log2() / 224.0;
        assert!((ee_linear(1.0, &sc, &raw).unwrap() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn bound_ordering() {
        let (sc, p) = setup(2);
        for i in 1..=30 {
            let xi = i as f64 / 30.0;
            let e = ee(xi, &sc, &p).unwrap();
            let l = ee_linear(xi, &sc, &p).unwrap();
            let id = ee_ideal(xi, &sc, &p).unwrap();
            assert!(e <= l * (1.0 + 1e-12) && l <= id, "xi={xi}");
        }
        assert!(ee(1e-9, &sc, &p).unwrap() < 1e-3 * ee(0.1, &sc, &p).unwrap());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for w in [1, 2] {
            let (sc, p) = setup(w);
            let bp = p.breakpoint();
            for i in 0..50 {
                let xi = 0.001 + 0.998 * i as f64 / 49.0;
                if (xi - bp).abs() < 1e-3 {
                    continue;
                }
                let h = 1e-6 * xi;
                let fd = (ee_linear(xi + h, &sc, &p).unwrap() - ee_linear(xi - h, &sc, &p).unwrap()) / (2.0 * h);
                let an = ee_linear_derivative(xi, &sc, &p).unwrap();
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-3 * ee_linear(xi, &sc, &p).unwrap()), "w={w} xi={xi} fd={fd} an={an}");
            }
            assert!(ee_linear_derivative(0.99, &sc, &p).unwrap() < 0.0);
            let z = ee_pieces(&sc, &p)[0].zeta;
            assert!(ee_linear_derivative(z * 1.01, &sc, &p).unwrap() > 0.0);
        }
    }

    #[test]
    fn optimum_vs_grid() {
        for spec in [pa_low(), pa_high()] {
            for w in [1, 2, 3] {
                let sc = LinkScenario::reference(&spec);
                let p = aligned_params(&sc, &PowerModelParams::preset(BsType::Macro, w));
                let grid_max = (1..=2000)
                    .map(|i| ee_linear(i as f64 / 2000.0, &sc, &p).unwrap())
                    .fold(0.0, f64::max);
                let exact = xi_ee_opt(&sc, &p, XiMethod::ExactRoot).unwrap();
                assert!(ee_linear(exact.xi, &sc, &p).unwrap() >= 0.999 * grid_max);
                assert!(exact.zeta_assumption_holds);
                if w == 1 {
                    assert_eq!(exact.candidates.len(), 1);
                    assert!(ee_linear_derivative(exact.xi, &sc, &p).unwrap().abs() < 1e-6 * grid_max);
                }
                let closed = xi_ee_opt(&sc, &p, XiMethod::ClosedForm).unwrap();
                assert!(ee_linear(closed.xi, &sc, &p).unwrap() >= 0.98 * grid_max, "{spec:?} w={w} {closed:?}");
            }
        }
    }

    #[test]
    fn infeasible_when_zeta_exceeds_one() {
        let (sc, p) = setup(1);
        let dark = sc.with_noise_variance(sc.p_max_out * 1e3).unwrap();
        assert!(matches!(xi_ee_opt(&dark, &p, XiMethod::ExactRoot), Err(Error::Infeasible(_))));
    }

    #[test]
    fn quasi_concave_pieces() {
        for w in [1, 2] {
            let (sc, p) = setup(w);
            for piece in ee_pieces(&sc, &p) {
                let a = piece.zeta.max(piece.lo);
                let n = 500;
                let vals: Vec<f64> = (0..n)
                    .map(|i| a + (piece.hi - a) * (i as f64 + 0.5) / n as f64)
                    .map(|x| ee_linear(x, &sc, &p).unwrap())
                    .collect();
                let diffs: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
                let changes = diffs.windows(2).filter(|d| d[0].signum() != d[1].signum()).count();
                assert!(changes <= 1, "w={w} piece={} changes={changes}", piece.index);
            }
        }
    }

    #[test]
    fn pareto_regions() {
        let (sc, p) = setup(2);
        let closed = pareto_window(&sc, &p).unwrap();
        let win = pareto_window_with(&sc, &p, XiMethod::ExactRoot).unwrap();
        assert!(closed.lo <= closed.hi);
        assert!(win.lo < win.hi);
        for i in 1..=100 {
            let below = win.lo * i as f64 / 101.0;
            let (a, b) = tradeoff_slopes(below, &sc, &p).unwrap();
            assert!(a > 0.0 && b > 0.0, "below {below}");
            let inside = win.lo + (win.hi - win.lo) * i as f64 / 101.0;
            let (a, b) = tradeoff_slopes(inside, &sc, &p).unwrap();
            assert!(a * b <= 0.0, "inside {inside}");
            let above = win.hi + (1.0 - win.hi) * i as f64 / 101.0;
            let (a, b) = tradeoff_slopes(above, &sc, &p).unwrap();
            assert!(a < 0.0 && b < 0.0, "above {above}");
        }
        assert_eq!(win.classify(0.5 * win.lo), ParetoRegion::Below);
    }
}
