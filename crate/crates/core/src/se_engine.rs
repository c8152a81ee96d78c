//! Output densities of the clipped AWGN channel, output entropy and
//! spectral efficiency, plus the approximations and optimizers built on them.
//!
//! The received sample is `y = f(x) + z` with `x ~ CN(0, P_in)`, `f` the soft
//! limiter and `z ~ CN(0, s2)`. Conditioned on the clipping event `S` the
//! density of `y` is circularly symmetric, so every density here is a
//! function of the radius `r = |y|` and integrals carry the `2 pi r` Jacobian.

use std::f64::consts::{E, LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::pa_models::{dbm_to_watts, PaSpec};
use crate::specfun::{
    gauss_legendre_composite, i0e_unchecked, integrate_segments, lambert_w, marcum_unchecked, WBranch,
};

/// Default absolute tolerance (bits) of the entropy integral.
pub const DEFAULT_ENTROPY_TOL: f64 = 1e-9;

/// Link budget and PA as seen by the analysis: channel attenuation is folded
/// into the effective noise variance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkScenario {
    /// Hz
    pub bandwidth: f64,
    /// Effective noise variance s2, W.
    pub noise_variance: f64,
    /// Linear PA gain g.
    pub gain: f64,
    /// W
    pub p_max_out: f64,
    /// p_max_out / s2
    pub gamma: f64,
    /// dB, bookkeeping only.
    pub attenuation_db: f64,
}

impl LinkScenario {
    pub fn new(spec: &PaSpec, noise_variance: f64, bandwidth: f64) -> Result<Self> {
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(domain("LinkScenario::new", format!("noise variance {noise_variance}")));
        }
        if !(bandwidth > 0.0) {
            return Err(domain("LinkScenario::new", format!("bandwidth {bandwidth}")));
        }
        Ok(Self {
            bandwidth,
            noise_variance,
            gain: spec.gain,
            p_max_out: spec.p_max_out,
            gamma: spec.p_max_out / noise_variance,
            attenuation_db: 0.0,
        })
    }

    /// Same PA and bandwidth, different noise variance.
    pub fn with_noise_variance(&self, noise_variance: f64) -> Result<Self> {
        if !(noise_variance > 0.0 && noise_variance.is_finite()) {
            return Err(domain("LinkScenario::with_noise_variance", format!("{noise_variance}")));
        }
        Ok(Self { noise_variance, gamma: self.p_max_out / noise_variance, ..self.clone() })
    }

    /// Same link with another amplifier.
    pub fn with_pa(&self, spec: &PaSpec) -> Self {
        Self {
            gain: spec.gain,
            p_max_out: spec.p_max_out,
            gamma: spec.p_max_out / self.noise_variance,
            ..self.clone()
        }
    }

    /// Default link: 5 dB antenna gain, exponent 3.76, 200 m,
    /// -174 dBm/Hz over 10 MHz.
    pub fn reference(spec: &PaSpec) -> Self {
        build_scenario(5.0, 3.76, 0.2, -174.0, 10e6, spec).expect("reference link is valid")
    }

    pub fn b_max(&self) -> f64 {
        self.p_max_out.sqrt()
    }

    pub fn p_max_in(&self) -> f64 {
        self.p_max_out / self.gain
    }

    /// Mean output power g P_in = xi p_max_out of the unclipped PA.
    pub fn output_power(&self, xi: f64) -> f64 {
        xi * self.p_max_out
    }
}

/// Link budget from path loss `G - 128 + 10 log10(d^-alpha)` dB.
pub fn build_scenario(
    g_db: f64,
    alpha: f64,
    d_km: f64,
    noise_psd_dbm_hz: f64,
    bandwidth: f64,
    spec: &PaSpec,
) -> Result<LinkScenario> {
    if !(d_km > 0.0) || !(bandwidth > 0.0) || !alpha.is_finite() {
        return Err(domain("build_scenario", format!("d_km={d_km}, bandwidth={bandwidth}, alpha={alpha}")));
    }
    let attenuation_db = g_db - 128.0 - alpha * 10.0 * d_km.log10();
    let noise = dbm_to_watts(noise_psd_dbm_hz) * bandwidth;
    let s2 = noise / 10f64.powf(attenuation_db / 10.0);
    let mut sc = LinkScenario::new(spec, s2, bandwidth)?;
    sc.attenuation_db = attenuation_db;
    Ok(sc)
}

/// Multipath channel with its cyclic-prefix length.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelProfile {
    pub taps: Vec<Complex64>,
    pub cp_length: usize,
}

impl ChannelProfile {
    pub fn new(taps: Vec<Complex64>, cp_length: usize) -> Result<Self> {
        if taps.is_empty() {
            return Err(domain("ChannelProfile::new", "need at least one tap"));
        }
        let power: f64 = taps.iter().map(|h| h.norm_sqr()).sum();
        if !(power > 0.0 && power.is_finite()) {
            return Err(domain("ChannelProfile::new", format!("total tap power {power}")));
        }
        if taps.len() > cp_length.max(1) {
            return Err(domain(
                "ChannelProfile::new",
                format!("{} taps exceed the CP length {cp_length}", taps.len()),
            ));
        }
        Ok(Self { taps, cp_length })
    }

    /// Single unit tap.
    pub fn flat() -> Self {
        Self { taps: vec![Complex64::new(1.0, 0.0)], cp_length: 1 }
    }

    /// Real taps with power profile proportional to e^{-decay i}, scaled to
    /// unit total power.
    pub fn exponential(len: usize, decay: f64, cp_length: usize) -> Result<Self> {
        if len == 0 || !(decay >= 0.0) {
            return Err(domain("ChannelProfile::exponential", format!("len={len}, decay={decay}")));
        }
        let powers: Vec<f64> = (0..len).map(|i| (-decay * i as f64).exp()).collect();
        let total: f64 = powers.iter().sum();
        Self::new(powers.iter().map(|p| Complex64::new((p / total).sqrt(), 0.0)).collect(), cp_length)
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn total_power(&self) -> f64 {
        self.taps.iter().map(|h| h.norm_sqr()).sum()
    }
}

/// Which expression evaluates the unclipped-branch density.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PdfForm {
    /// Direct quadrature of the Gaussian-times-Rician integral.
    Integral,
    /// `N0(r) [1 - Q1(sqrt(mu), sqrt(rho_max))]`.
    #[default]
    MarcumClosed,
}

/// Radial output density for one loading factor, with the per-xi constants
/// precomputed.
#[derive(Clone, Debug)]
pub struct OutputDensity {
    pub xi: f64,
    /// g P_in
    power: f64,
    s2: f64,
    b_max: f64,
    pr_clip: f64,
    /// P + s2
    total: f64,
    /// sqrt(mu) = r * mu_scale
    mu_scale: f64,
    sqrt_rho_max: f64,
    form: PdfForm,
}

impl OutputDensity {
    pub fn new(xi: f64, scenario: &LinkScenario) -> Result<Self> {
        Self::with_form(xi, scenario, PdfForm::default())
    }

    pub fn with_form(xi: f64, scenario: &LinkScenario, form: PdfForm) -> Result<Self> {
        check_xi("OutputDensity", xi)?;
        let power = scenario.output_power(xi);
        let s2 = scenario.noise_variance;
        let total = power + s2;
        let b_max = scenario.b_max();
        Ok(Self {
            xi,
            power,
            s2,
            b_max,
            pr_clip: (-1.0 / xi).exp(),
            total,
            mu_scale: (2.0 * power / (total * s2)).sqrt(),
            sqrt_rho_max: b_max * (2.0 * total / (power * s2)).sqrt(),
            form,
        })
    }

    pub fn pr_clip(&self) -> f64 {
        self.pr_clip
    }

    /// Standard deviation scale of the unclipped branch, sqrt(P + s2).
    pub fn sigma_eff(&self) -> f64 {
        self.total.sqrt()
    }

    /// f_Y(y, S=0) at |y| = r.
    pub fn unclipped(&self, r: f64) -> f64 {
        match self.form {
            PdfForm::MarcumClosed => self.unclipped_closed(r),
            PdfForm::Integral => self.unclipped_integral(r),
        }
    }

    pub fn unclipped_closed(&self, r: f64) -> f64 {
        let gauss = (-r * r / self.total).exp() / (PI * self.total);
        if gauss == 0.0 {
            return 0.0;
        }
        gauss * marcum_unchecked(r * self.mu_scale, self.sqrt_rho_max).complement
    }

    /// `(2/(pi P s2)) int_0^b rho exp(-rho^2/P - (rho^2+r^2)/s2) I0(2 rho r/s2) d rho`;
    /// the integrand is a narrow bump around `P r/(P+s2)`, so it is
    /// integrated on a window of +/-40 spreads with Gauss-Legendre panels.
    pub fn unclipped_integral(&self, r: f64) -> f64 {
        let (p, s2) = (self.power, self.s2);
        let centre = p * r / self.total;
        let spread = (0.5 * p * s2 / self.total).sqrt();
        let lo = (centre - 40.0 * spread).max(0.0);
        let hi = (centre + 40.0 * spread).min(self.b_max);
        if hi <= lo {
            return 0.0;
        }
        let integrand = |rho: f64| {
            let x = 2.0 * rho * r / s2;
            // exp(-rho^2/P - (rho - r)^2/s2) * e^{-x} I0(x) == the unscaled form
            rho * (-rho * rho / p - (rho - r) * (rho - r) / s2).exp() * i0e_unchecked(x)
        };
        2.0 / (PI * p * s2) * gauss_legendre_composite(integrand, lo, hi, 0.5 * spread)
    }

    /// f_Y(y, S=1) at |y| = r: the clipped output is a ring of radius b_max
    /// with Rician spread.
    pub fn clipped(&self, r: f64) -> f64 {
        if self.pr_clip == 0.0 {
            return 0.0;
        }
        let s2 = self.s2;
        let b = self.b_max;
        self.pr_clip / (PI * s2) * (-(r - b) * (r - b) / s2).exp() * i0e_unchecked(2.0 * b * r / s2)
    }

    pub fn total(&self, r: f64) -> f64 {
        self.unclipped(r) + self.clipped(r)
    }

    /// Upper integration radius b_max + 10 sigma_eff.
    pub fn r_cut(&self) -> f64 {
        self.b_max + 10.0 * self.sigma_eff()
    }

    /// Bound on the mass beyond [`Self::r_cut`].
    pub fn tail_mass_bound(&self) -> f64 {
        let rc = self.r_cut();
        let gauss_tail = (-rc * rc / self.total).exp();
        let scale = (2.0 / self.s2).sqrt();
        let ring_tail = self.pr_clip * marcum_unchecked(self.b_max * scale, rc * scale).q;
        gauss_tail + ring_tail
    }

    /// Integration breakpoints that bracket the Gaussian core and the ring.
    pub fn breakpoints(&self) -> Vec<f64> {
        let rc = self.r_cut();
        let sz = self.s2.sqrt();
        let se = self.sigma_eff();
        let b = self.b_max;
        let mut pts = vec![0.0, rc];
        for k in [1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0, 12.0] {
            pts.push(k * se);
        }
        for k in [-14.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 14.0] {
            pts.push(b + k * sz);
        }
        pts.retain(|p| (0.0..=rc).contains(p));
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * rc);
        pts
    }

    /// Radial integral of `2 pi r g(r)` for a functional of the density.
    fn radial<F: Fn(f64) -> f64>(&self, g: F, tol: f64) -> Result<f64> {
        let pts = self.breakpoints();
        integrate_segments(|r| 2.0 * PI * r * g(r), &pts, tol).map(|q| q.value)
    }

    /// Mass of the unclipped branch; equals 1 - e^{-1/xi}.
    pub fn unclipped_mass(&self, tol: f64) -> Result<f64> {
        self.radial(|r| self.unclipped(r), tol)
    }

    /// Mass of the clipped branch; equals e^{-1/xi}.
    pub fn clipped_mass(&self, tol: f64) -> Result<f64> {
        self.radial(|r| self.clipped(r), tol)
    }

    /// `P(|Y| <= r)`.
    pub fn radial_cdf(&self, r: f64, tol: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Ok(0.0);
        }
        let mut pts: Vec<f64> = self.breakpoints().into_iter().filter(|&p| p < r).collect();
        pts.push(r);
        integrate_segments(|t| 2.0 * PI * t * self.total(t), &pts, tol).map(|q| q.value)
    }

    /// Differential entropy of Y in bits.
    pub fn entropy(&self, tol: f64) -> Result<f64> {
        let tail = self.tail_mass_bound();
        if tail > 1e-9 {
            return Err(Error::Integration { estimate: f64::NAN, error_bound: tail });
        }
        let h = self.radial(
            |r| {
                let f = self.total(r);
                if f > 0.0 {
                    -f * f.log2()
                } else {
                    0.0
                }
            },
            tol,
        )?;
        Ok(h)
    }
}

fn check_xi(func: &'static str, xi: f64) -> Result<()> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(domain(func, format!("xi = {xi}, need 0 < xi <= 1")));
    }
    Ok(())
}

/// f_Y(y, S=0) at |y| = r, by the integral form.
pub fn pdf_unclipped(r: f64, xi: f64, scenario: &LinkScenario) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("pdf_unclipped", format!("r = {r}")));
    }
    Ok(OutputDensity::with_form(xi, scenario, PdfForm::Integral)?.unclipped(r))
}

/// f_Y(y, S=0) at |y| = r, by the Marcum-Q closed form.
pub fn pdf_unclipped_closed_form(r: f64, xi: f64, scenario: &LinkScenario) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("pdf_unclipped_closed_form", format!("r = {r}")));
    }
    Ok(OutputDensity::new(xi, scenario)?.unclipped_closed(r))
}

/// f_Y(y, S=1) at |y| = r.
pub fn pdf_clipped(r: f64, xi: f64, scenario: &LinkScenario) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("pdf_clipped", format!("r = {r}")));
    }
    Ok(OutputDensity::new(xi, scenario)?.clipped(r))
}

/// Output entropy H(Y) in bits.
pub fn entropy_y(xi: f64, scenario: &LinkScenario, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain("entropy_y", format!("tol = {tol}")));
    }
    OutputDensity::new(xi, scenario)?.entropy(tol)
}

/// Entropy of the complex Gaussian noise, log2(pi e s2).
pub fn noise_entropy(scenario: &LinkScenario) -> f64 {
    (PI * E * scenario.noise_variance).log2()
}

/// Spectral efficiency H(Y) - log2(pi e s2).
pub fn se(xi: f64, scenario: &LinkScenario) -> Result<f64> {
    se_with_tol(xi, scenario, DEFAULT_ENTROPY_TOL)
}

pub fn se_with_tol(xi: f64, scenario: &LinkScenario, tol: f64) -> Result<f64> {
    let h = entropy_y(xi, scenario, tol)?;
    // mutual information is non-negative; only rounding can undercut zero
    Ok((h - noise_entropy(scenario)).max(0.0))
}

/// log2(1 + gamma xi).
pub fn se_ideal(xi: f64, scenario: &LinkScenario) -> f64 {
    (scenario.gamma * xi).ln_1p() / LN_2
}

/// Approximate SE treating the two branches as disjoint:
/// log2(1 + gamma xi) + e^{-1/xi} [1/(xi ln 2) + log2(pi e s2)].
pub fn se_ibo(xi: f64, scenario: &LinkScenario) -> Result<f64> {
    check_xi("se_ibo", xi)?;
    let clip = (-1.0 / xi).exp();
    Ok(se_ideal(xi, scenario) + clip * (1.0 / (xi * LN_2) + noise_entropy(scenario)))
}

/// `lhs - rhs` of the stationarity condition of [`se_ibo`]:
/// gamma/(1+gamma xi) = e^{-1/xi} xi^{-2} (1 - 1/xi - ln(pi e s2)).
pub fn stationarity_residual(xi: f64, scenario: &LinkScenario) -> f64 {
    let ln_noise = (PI * E * scenario.noise_variance).ln();
    let lhs = scenario.gamma / (1.0 + scenario.gamma * xi);
    let rhs = (-1.0 / xi).exp() / (xi * xi) * (1.0 - 1.0 / xi - ln_noise);
    lhs - rhs
}

/// Both sides of the stationarity condition, for residual checks.
pub fn stationarity_sides(xi: f64, scenario: &LinkScenario) -> (f64, f64) {
    let r = stationarity_residual(xi, scenario);
    let lhs = scenario.gamma / (1.0 + scenario.gamma * xi);
    (lhs, lhs - r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum XiMethod {
    ExactRoot,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XiOptimum {
    pub xi: f64,
    pub method: XiMethod,
    /// No sign change in the search window; `xi` is the window edge.
    pub at_boundary: bool,
}

/// Window (max(0, -1/ln(pi s2)), 1/2] on which the approximate SE is concave.
pub fn concavity_window(scenario: &LinkScenario) -> (f64, f64) {
    let l = (PI * scenario.noise_variance).ln();
    let lo = if l < 0.0 { (-1.0 / l).max(0.0) } else { 0.0 };
    (lo.min(0.5), 0.5)
}

/// SE-optimal loading factor.
pub fn xi_se_opt(scenario: &LinkScenario, method: XiMethod) -> Result<XiOptimum> {
    match method {
        XiMethod::ClosedForm => {
            let q = 1.0 / (PI * E * scenario.noise_variance).ln();
            let w = lambert_w(WBranch::LowerNegative, q)?;
            Ok(XiOptimum { xi: -1.0 / w, method, at_boundary: false })
        }
        XiMethod::ExactRoot => {
            let (lo, hi) = concavity_window(scenario);
            let lo = lo.max(1e-4);
            let f = |xi: f64| stationarity_residual(xi, scenario);
            const GRID: usize = 64;
            let grid: Vec<f64> =
                (0..GRID).map(|i| lo * (hi / lo).powf(i as f64 / (GRID - 1) as f64)).collect();
            let mut bracket = None;
            for w in grid.windows(2) {
                // the residual is ln2 times the slope of the approximate SE
                if f(w[0]) > 0.0 && f(w[1]) <= 0.0 {
                    bracket = Some((w[0], w[1]));
                    break;
                }
            }
            let Some((mut a, mut b)) = bracket else {
                let edge = if f(hi) > 0.0 { hi } else { lo };
                return Ok(XiOptimum { xi: edge, method, at_boundary: true });
            };
            while b - a > 1e-12 {
                let m = 0.5 * (a + b);
                if f(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            Ok(XiOptimum { xi: 0.5 * (a + b), method, at_boundary: false })
        }
    }
}

/// Squared MRC-equivalent gain h'^2; already an SNR.
pub fn multipath_equiv_gain_sq(taps: &ChannelProfile, xi: f64, scenario: &LinkScenario) -> Result<f64> {
    check_xi("multipath_equiv_gain", xi)?;
    let p = scenario.output_power(xi);
    let s2 = scenario.noise_variance;
    let mut acc = p * taps.taps[0].norm_sqr() / s2;
    let mut prior = taps.taps[0].norm_sqr();
    for h in &taps.taps[1..] {
        acc += p * h.norm_sqr() / (s2 + p * prior);
        prior += h.norm_sqr();
    }
    Ok(acc)
}

/// MRC-equivalent gain h'.
pub fn multipath_equiv_gain(taps: &ChannelProfile, xi: f64, scenario: &LinkScenario) -> Result<f64> {
    multipath_equiv_gain_sq(taps, xi, scenario).map(f64::sqrt)
}

/// SE lower bound for a multipath channel: the flat-channel SE with noise
/// variance g P_in / h'^2.
pub fn se_lower_bound_multipath(taps: &ChannelProfile, xi: f64, scenario: &LinkScenario) -> Result<f64> {
    let h2 = multipath_equiv_gain_sq(taps, xi, scenario)?;
    let sc = scenario.with_noise_variance(scenario.output_power(xi) / h2)?;
    se(xi, &sc)
}

/// One row of an SE sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeSweepRow {
    pub xi: f64,
    pub se_exact: f64,
    pub se_ideal: f64,
    pub se_ibo: f64,
    pub pr_clip: f64,
}

pub const SE_SWEEP_COLUMNS: [&str; 5] = ["xi", "se_exact", "se_ideal", "se_ibo", "pr_clip"];

/// SE, its ideal bound and the approximation over a grid; evaluated in
/// parallel, returned in grid order.
pub fn se_sweep(grid: &[f64], scenario: &LinkScenario) -> Result<Vec<SeSweepRow>> {
    grid.par_iter()
        .map(|&xi| {
            Ok(SeSweepRow {
                xi,
                se_exact: se(xi, scenario)?,
                se_ideal: se_ideal(xi, scenario),
                se_ibo: se_ibo(xi, scenario)?,
                pr_clip: (-1.0 / xi).exp(),
            })
        })
        .collect()
}

/// SE of every grid point, in order.
pub fn se_curve(grid: &[f64], scenario: &LinkScenario) -> Result<Vec<f64>> {
    grid.par_iter().map(|&xi| se(xi, scenario)).collect()
}
