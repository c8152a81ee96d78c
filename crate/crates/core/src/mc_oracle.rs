//! Monte Carlo OFDM chain: Gaussian frequency-domain symbols, unitary IDFT,
//! memoryless PA, cyclic prefix, multipath, AWGN. It shares no code with the
//! analytical engines beyond the PA transfer functions and is used to check
//! them.

use std::f64::consts::{E, LN_2, PI};
use std::io::{Read, Write};
use std::num::NonZero;
use std::sync::Arc;

use kiddo::{ImmutableKdTree, SquaredEuclidean};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pa_models::{rapp_unchecked, soft_limiter_unchecked, RappParams};
use crate::se_engine::{se_lower_bound_multipath, ChannelProfile, LinkScenario, OutputDensity};

/// Frames generated from one RNG stream. Fixed so that results do not
/// depend on the thread count.
pub const FRAMES_PER_BATCH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PaModel {
    SoftLimiter,
    Rapp(RappParams),
    /// Gain only, no saturation.
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameConfig {
    pub n_subcarriers: usize,
    pub cp_length: usize,
    pub n_frames: usize,
    pub seed: u64,
    pub pa_model: PaModel,
}

impl FrameConfig {
    pub fn new(n_subcarriers: usize, cp_length: usize, n_frames: usize, seed: u64, pa_model: PaModel) -> Result<Self> {
        if n_subcarriers < 64 || !n_subcarriers.is_power_of_two() {
            return Err(Error::Config(format!("N = {n_subcarriers}: need a power of two >= 64")));
        }
        if n_frames == 0 {
            return Err(Error::Config("n_frames must be positive".into()));
        }
        Ok(Self { n_subcarriers, cp_length, n_frames, seed, pa_model })
    }

    /// Enough frames of length `n` for at least `samples` output samples.
    pub fn for_samples(samples: usize, n: usize, cp_length: usize, seed: u64, pa_model: PaModel) -> Result<Self> {
        Self::new(n, cp_length, samples.div_ceil(n.max(1)).max(1), seed, pa_model)
    }

    pub fn sample_count(&self) -> usize {
        self.n_frames * self.n_subcarriers
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SimOptions {
    /// Disable the receiver noise (for exactness checks).
    pub noiseless: bool,
    /// Keep PA input and output sequences.
    pub keep_trace: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ChainStats {
    /// Mean |x_t|^2 at the PA input.
    pub input_power: f64,
    /// Mean |w_t|^2 at the PA output.
    pub output_power: f64,
    /// Fraction of input samples above a_max.
    pub clip_fraction: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trace {
    pub pa_input: Vec<Complex64>,
    pub pa_output: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<Complex64>,
    pub n_subcarriers: usize,
    pub seed: u64,
    pub stats: ChainStats,
    pub trace: Option<Trace>,
}

impl SampleSet {
    pub fn radii(&self) -> Vec<f64> {
        self.samples.iter().map(|y| y.norm()).collect()
    }
}

struct BatchOut {
    samples: Vec<Complex64>,
    in_power: f64,
    out_power: f64,
    clipped: usize,
    trace: Option<Trace>,
}

struct Chain<'a> {
    n: usize,
    cp: usize,
    taps: &'a [Complex64],
    ifft: Arc<dyn Fft<f64>>,
    sym_std: f64,
    noise_std: f64,
    sqrt_gain: f64,
    a_max: f64,
    b_max: f64,
    pa: PaModel,
    opts: SimOptions,
}

impl Chain<'_> {
    fn amplify(&self, a: f64) -> f64 {
        match self.pa {
            PaModel::SoftLimiter => soft_limiter_unchecked(a, self.sqrt_gain, self.a_max, self.b_max),
            PaModel::Rapp(p) => rapp_unchecked(a, &p),
            PaModel::Linear => self.sqrt_gain * a,
        }
    }

    fn run_batch(&self, seed: u64, batch: usize, frames: usize) -> BatchOut {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(batch as u64);
        let n = self.n;
        let scale = 1.0 / (n as f64).sqrt();
        let mut out = BatchOut {
            samples: Vec::with_capacity(frames * n),
            in_power: 0.0,
            out_power: 0.0,
            clipped: 0,
            trace: self.opts.keep_trace.then(Trace::default),
        };
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.ifft.get_inplace_scratch_len()];
        let mut tx = vec![Complex64::new(0.0, 0.0); n + self.cp];
        for _ in 0..frames {
            for s in buf.iter_mut() {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *s = Complex64::new(re, im) * self.sym_std;
            }
            self.ifft.process_with_scratch(&mut buf, &mut scratch);
            for x in buf.iter_mut() {
                *x *= scale;
            }
            if let Some(t) = out.trace.as_mut() {
                t.pa_input.extend_from_slice(&buf);
            }
            for x in buf.iter_mut() {
                let a = x.norm();
                out.in_power += a * a;
                if a > self.a_max {
                    out.clipped += 1;
                }
                let w = if a > 0.0 { *x * (self.amplify(a) / a) } else { Complex64::new(0.0, 0.0) };
                out.out_power += w.norm_sqr();
                *x = w;
            }
            if let Some(t) = out.trace.as_mut() {
                t.pa_output.extend_from_slice(&buf);
            }
            // cyclic prefix, then the channel over the prefixed block; the
            // prefix absorbs the channel memory so the kept part equals the
            // circular convolution
            tx[..self.cp].copy_from_slice(&buf[n - self.cp..]);
            tx[self.cp..].copy_from_slice(&buf);
            for t in self.cp..self.cp + n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (l, h) in self.taps.iter().enumerate() {
                    if t >= l {
                        acc += h * tx[t - l];
                    }
                }
                if !self.opts.noiseless {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    acc += Complex64::new(re, im) * self.noise_std;
                }
                out.samples.push(acc);
            }
        }
        out
    }
}

/// Received time-domain samples y_t after CP removal.
pub fn simulate_frames(config: &FrameConfig, xi: f64, scenario: &LinkScenario, channel: &ChannelProfile) -> Result<SampleSet> {
    simulate_frames_with(config, xi, scenario, channel, SimOptions::default())
}

pub fn simulate_frames_with(
    config: &FrameConfig,
    xi: f64,
    scenario: &LinkScenario,
    channel: &ChannelProfile,
    opts: SimOptions,
) -> Result<SampleSet> {
    if channel.len() > 1 && config.cp_length + 1 < channel.len() {
        return Err(Error::Config(format!(
            "CP length {} shorter than channel memory {}",
            config.cp_length,
            channel.len() - 1
        )));
    }
    if !(xi > 0.0) {
        return Err(crate::error::domain("simulate_frames", format!("xi = {xi}")));
    }
    let n = config.n_subcarriers;
    let p_in = xi * scenario.p_max_in();
    let chain = Chain {
        n,
        cp: config.cp_length.min(n),
        taps: &channel.taps,
        ifft: FftPlanner::new().plan_fft_inverse(n),
        sym_std: (0.5 * p_in).sqrt(),
        noise_std: (0.5 * scenario.noise_variance).sqrt(),
        sqrt_gain: scenario.gain.sqrt(),
        a_max: scenario.p_max_in().sqrt(),
        b_max: scenario.b_max(),
        pa: config.pa_model,
        opts,
    };
    let batches = config.n_frames.div_ceil(FRAMES_PER_BATCH);
    let outs: Vec<BatchOut> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let frames = FRAMES_PER_BATCH.min(config.n_frames - b * FRAMES_PER_BATCH);
            chain.run_batch(config.seed, b, frames)
        })
        .collect();
    let total = config.sample_count();
    let mut samples = Vec::with_capacity(total);
    let (mut pin, mut pout, mut clipped) = (0.0, 0.0, 0usize);
    let mut trace = opts.keep_trace.then(Trace::default);
    for o in outs {
        samples.extend(o.samples);
        pin += o.in_power;
        pout += o.out_power;
        clipped += o.clipped;
        if let (Some(t), Some(bt)) = (trace.as_mut(), o.trace) {
            t.pa_input.extend(bt.pa_input);
            t.pa_output.extend(bt.pa_output);
        }
    }
    let count = total as f64;
    Ok(SampleSet {
        samples,
        n_subcarriers: n,
        seed: config.seed,
        stats: ChainStats { input_power: pin / count, output_power: pout / count, clip_fraction: clipped as f64 / count, samples: total },
        trace,
    })
}

/// Tabulated radial CDF of the analytical output density.
#[derive(Clone, Debug)]
pub struct RadialCdf {
    radius: Vec<f64>,
    cdf: Vec<f64>,
}

impl RadialCdf {
    /// Cumulative Simpson integration of 2 pi r f(r), `steps` sub-intervals
    /// per breakpoint segment.
    pub fn new(xi: f64, scenario: &LinkScenario, steps: usize) -> Result<Self> {
        let d = OutputDensity::new(xi, scenario)?;
        let pts = d.breakpoints();
        let g = |r: f64| 2.0 * PI * r * d.total(r);
        let mut radius = vec![0.0];
        let mut cdf = vec![0.0];
        let mut acc = 0.0;
        for w in pts.windows(2) {
            let h = (w[1] - w[0]) / steps as f64;
            let mut a = w[0];
            let mut fa = g(a);
            for i in 1..=steps {
                let b = if i == steps { w[1] } else { w[0] + h * i as f64 };
                let fb = g(b);
                acc += (b - a) / 6.0 * (fa + 4.0 * g(0.5 * (a + b)) + fb);
                radius.push(b);
                cdf.push(acc);
                a = b;
                fa = fb;
            }
        }
        Ok(Self { radius, cdf })
    }

    pub fn total_mass(&self) -> f64 {
        *self.cdf.last().expect("non-empty table")
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let i = self.radius.partition_point(|&x| x < r);
        if i >= self.radius.len() {
            return self.total_mass();
        }
        let (r0, r1) = (self.radius[i - 1], self.radius[i]);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        c0 + (c1 - c0) * (r - r0) / (r1 - r0)
    }

    /// Inverse of [`Self::eval`], for sampling.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = u * self.total_mass();
        let i = self.cdf.partition_point(|&c| c < target).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let (r0, r1) = (self.radius[i - 1], self.radius[i]);
        if c1 > c0 {
            r0 + (r1 - r0) * (target - c0) / (c1 - c0)
        } else {
            r0
        }
    }
}

/// Radii drawn from the analytical density by inverse-CDF sampling.
pub fn sample_analytic_radii(xi: f64, scenario: &LinkScenario, n: usize, seed: u64) -> Result<Vec<f64>> {
    let table = RadialCdf::new(xi, scenario, 400)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| table.quantile(rng.random::<f64>())).collect())
}

/// One-sample Kolmogorov-Smirnov distance of sorted-in-place data.
pub fn ks_distance(data: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    data.sort_by(f64::total_cmp);
    let n = data.len() as f64;
    data.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// KS distance between the empirical |y| distribution and the analytical
/// radial CDF.
pub fn empirical_pdf_distance(samples: &SampleSet, xi: f64, scenario: &LinkScenario) -> Result<f64> {
    let table = RadialCdf::new(xi, scenario, 400)?;
    let mut radii = samples.radii();
    Ok(ks_distance(&mut radii, |r| table.eval(r)))
}

fn digamma_int(n: usize) -> f64 {
    // exact harmonic sum for small n, asymptotic series beyond
    if n < 20 {
        const EULER: f64 = 0.577_215_664_901_532_9;
        return -EULER + (1..n).map(|i| 1.0 / i as f64).sum::<f64>();
    }
    let x = n as f64;
    let x2 = x * x;
    x.ln() - 0.5 / x - 1.0 / (12.0 * x2) + 1.0 / (120.0 * x2 * x2) - 1.0 / (252.0 * x2 * x2 * x2)
}

/// Neighbour order used by [`estimate_mi`].
pub const KNN_K: usize = 3;

/// Kozachenko-Leonenko differential entropy, in bits, of 2-D samples.
pub fn knn_entropy(points: &[[f64; 2]], k: usize) -> Result<f64> {
    let n = points.len();
    if n <= k + 1 || k == 0 {
        return Err(Error::Estimator(format!("need more than {} samples, got {n}", k + 1)));
    }
    let tree: ImmutableKdTree<f64, 2> = ImmutableKdTree::new_from_slice(points);
    let qty = NonZero::new(k + 1).expect("k + 1 > 0");
    let sum_log: f64 = points
        .par_iter()
        .map(|p| {
            let nn = tree.nearest_n::<SquaredEuclidean>(p, qty);
            // the query point itself comes back at distance zero
            let d2 = nn.last().map(|x| x.distance).unwrap_or(0.0);
            0.5 * d2.ln()
        })
        .sum();
    if !sum_log.is_finite() {
        return Err(Error::Estimator("coincident samples: distribution is degenerate".into()));
    }
    let nats = digamma_int(n) - digamma_int(k) + PI.ln() + 2.0 * sum_log / n as f64;
    Ok(nats / LN_2)
}

/// Mutual information per sample, H(Y) - log2(pi e s2), by kNN entropy.
pub fn estimate_mi(samples: &SampleSet, scenario: &LinkScenario) -> Result<f64> {
    let pts: Vec<[f64; 2]> = samples.samples.iter().map(|y| [y.re, y.im]).collect();
    let h = knn_entropy(&pts, KNN_K)?;
    Ok(h - (PI * E * scenario.noise_variance).log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MultipathCheck {
    pub bound: f64,
    pub mc_estimate: f64,
    /// mc_estimate - bound
    pub slack: f64,
}

/// Lower bound against the per-sample Monte Carlo estimate for one channel.
pub fn verify_multipath_bound(
    config: &FrameConfig,
    xi: f64,
    scenario: &LinkScenario,
    channel: &ChannelProfile,
) -> Result<MultipathCheck> {
    let bound = se_lower_bound_multipath(channel, xi, scenario)?;
    let samples = simulate_frames(config, xi, scenario, channel)?;
    let mc_estimate = estimate_mi(&samples, scenario)?;
    Ok(MultipathCheck { bound, mc_estimate, slack: mc_estimate - bound })
}

const DUMP_MAGIC: &[u8; 8] = b"OFDMPAY1";

/// Binary dump: 32-byte header (magic, N, count, seed as little-endian
/// u64) followed by interleaved real/imaginary f64 values.
pub fn write_samples<W: Write>(set: &SampleSet, mut out: W) -> Result<()> {
    out.write_all(DUMP_MAGIC)?;
    out.write_all(&(set.n_subcarriers as u64).to_le_bytes())?;
    out.write_all(&(set.samples.len() as u64).to_le_bytes())?;
    out.write_all(&set.seed.to_le_bytes())?;
    for y in &set.samples {
        out.write_all(&y.re.to_le_bytes())?;
        out.write_all(&y.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Read a dump written by [`write_samples`]; statistics are not stored.
pub fn read_samples<R: Read>(mut input: R) -> Result<SampleSet> {
    let mut header = [0u8; 32];
    input.read_exact(&mut header)?;
    if &header[..8] != DUMP_MAGIC {
        return Err(Error::Format("not a sample dump".into()));
    }
    let word = |i: usize| u64::from_le_bytes(header[i..i + 8].try_into().expect("8 bytes"));
    let (n, count, seed) = (word(8) as usize, word(16) as usize, word(24));
    let mut samples = Vec::with_capacity(count);
    let mut buf = [0u8; 16];
    for _ in 0..count {
        input.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
        samples.push(Complex64::new(re, im));
    }
    Ok(SampleSet { samples, n_subcarriers: n, seed, stats: ChainStats { samples: count, ..Default::default() }, trace: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pa_models::pa_low;
    use crate::se_engine::se_ideal;

    fn scenario() -> LinkScenario {
        LinkScenario::reference(&pa_low())
    }

    #[test]
    fn config_validation() {
        assert!(FrameConfig::new(32, 0, 1, 0, PaModel::SoftLimiter).is_err());
        assert!(FrameConfig::new(100, 0, 1, 0, PaModel::SoftLimiter).is_err());
        let cfg = FrameConfig::new(64, 2, 4, 0, PaModel::SoftLimiter).unwrap();
        let long = ChannelProfile::exponential(4, 0.5, 8).unwrap();
        assert!(matches!(simulate_frames(&cfg, 0.1, &scenario(), &long), Err(Error::Config(_))));
    }

    #[test]
    fn linear_chain_is_circular_convolution() {
        let sc = scenario();
        let taps = vec![Complex64::new(0.8, 0.1), Complex64::new(-0.3, 0.2), Complex64::new(0.05, -0.4)];
        let ch = ChannelProfile::new(taps.clone(), 4).unwrap();
        let cfg = FrameConfig::new(64, 4, 3, 9, PaModel::Linear).unwrap();
        let opts = SimOptions { noiseless: true, keep_trace: true };
        let set = simulate_frames_with(&cfg, 0.2, &sc, &ch, opts).unwrap();
        let trace = set.trace.as_ref().unwrap();
        let n = 64;
        let g = sc.gain.sqrt();
        for f in 0..3 {
            for t in 0..n {
                let mut expect = Complex64::new(0.0, 0.0);
                for (l, h) in taps.iter().enumerate() {
                    expect += h * trace.pa_input[f * n + (t + n - l) % n] * g;
                }
                let got = set.samples[f * n + t];
                assert!((got - expect).norm() <= 1e-12 * expect.norm().max(1.0));
            }
        }
    }

    #[test]
    fn idft_round_trip() {
        let n = 256;
        let mut planner = FftPlanner::new();
        let inv = planner.plan_fft_inverse(n);
        let fwd = planner.plan_fft_forward(n);
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let orig: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random(), rng.random())).collect();
        let mut v = orig.clone();
        inv.process(&mut v);
        fwd.process(&mut v);
        for (a, b) in v.iter().zip(&orig) {
            assert!((a / n as f64 - b).norm() < 1e-10);
        }
    }

    #[test]
    fn phase_power_and_clipping() {
        let sc = scenario();
        let xi = 0.5;
        let cfg = FrameConfig::new(256, 0, 800, 21, PaModel::SoftLimiter).unwrap();
        let opts = SimOptions { noiseless: false, keep_trace: true };
        let set = simulate_frames_with(&cfg, xi, &sc, &ChannelProfile::flat(), opts).unwrap();
        let tr = set.trace.as_ref().unwrap();
        for (x, w) in tr.pa_input.iter().zip(&tr.pa_output).take(20_000) {
            // scaling by a positive real keeps the phase up to rounding
            if x.norm() > 0.0 {
                assert!((x.arg() - w.arg()).abs() <= 4.0 * f64::EPSILON * PI);
            }
            assert!(w.norm_sqr() <= sc.p_max_out * (1.0 + 1e-12));
        }
        let n = set.stats.samples as f64;
        let p_in = xi * sc.p_max_in();
        // |x|^2 is exponential: sd of the mean is p_in / sqrt(n)
        assert!((set.stats.input_power - p_in).abs() < 3.0 * p_in / n.sqrt());
        let p = (-1.0 / xi).exp();
        assert!((set.stats.clip_fraction - p).abs() < 3.0 * (p * (1.0 - p) / n).sqrt());
    }

    #[test]
    fn deterministic_streams() {
        let sc = scenario();
        let cfg = FrameConfig::new(64, 0, 50, 5, PaModel::SoftLimiter).unwrap();
        let a = simulate_frames(&cfg, 0.3, &sc, &ChannelProfile::flat()).unwrap();
        let b = simulate_frames(&cfg, 0.3, &sc, &ChannelProfile::flat()).unwrap();
        assert_eq!(a, b);
        let other = FrameConfig { seed: 6, ..cfg };
        assert_ne!(a.samples, simulate_frames(&other, 0.3, &sc, &ChannelProfile::flat()).unwrap().samples);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| simulate_frames(&cfg, 0.3, &sc, &ChannelProfile::flat()).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn cdf_table_and_self_sampling() {
        let sc = scenario();
        let table = RadialCdf::new(0.5, &sc, 400).unwrap();
        assert!((table.total_mass() - 1.0).abs() < 1e-6);
        let n = 100_000;
        let mut radii = sample_analytic_radii(0.5, &sc, n, 17).unwrap();
        let ks = ks_distance(&mut radii, |r| table.eval(r));
        // 99% critical value of the KS statistic
        assert!(ks * (n as f64).sqrt() < 1.63, "ks = {ks}");
    }

    #[test]
    fn knn_entropy_gaussian() {
        let var: f64 = 2.5;
        let mut rng = ChaCha12Rng::seed_from_u64(8);
        let pts: Vec<[f64; 2]> = (0..200_000)
            .map(|_| {
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                [a * (0.5 * var).sqrt(), b * (0.5 * var).sqrt()]
            })
            .collect();
        let h = knn_entropy(&pts, KNN_K).unwrap();
        assert!((h - (PI * E * var).log2()).abs() < 0.02, "h = {h}");
        assert!(knn_entropy(&vec![[1.0, 1.0]; 100], 3).is_err());
    }

    #[test]
    fn mi_linear_and_noise_only() {
        let sc = scenario();
        let cfg = FrameConfig::for_samples(200_000, 256, 0, 4, PaModel::Linear).unwrap();
        let xi = 1e-4;
        let set = simulate_frames(&cfg, xi, &sc, &ChannelProfile::flat()).unwrap();
        let mi = estimate_mi(&set, &sc).unwrap();
        assert!((mi - se_ideal(xi, &sc)).abs() < 0.05, "mi {mi} vs {}", se_ideal(xi, &sc));
        let quiet = simulate_frames(&cfg, 1e-12, &sc, &ChannelProfile::flat()).unwrap();
        assert!(estimate_mi(&quiet, &sc).unwrap().abs() < 0.02);
    }

    #[test]
    fn dump_round_trip() {
        let sc = scenario();
        let cfg = FrameConfig::new(64, 0, 2, 77, PaModel::SoftLimiter).unwrap();
        let set = simulate_frames(&cfg, 0.2, &sc, &ChannelProfile::flat()).unwrap();
        let mut bytes = Vec::new();
        write_samples(&set, &mut bytes).unwrap();
        assert_eq!(bytes.len(), 32 + 16 * set.samples.len());
        let back = read_samples(bytes.as_slice()).unwrap();
        assert_eq!(back.samples, set.samples);
        assert_eq!((back.n_subcarriers, back.seed), (64, 77));
        assert!(read_samples(&b"garbage-garbage-garbage-garbage-"[..]).is_err());
    }
}
