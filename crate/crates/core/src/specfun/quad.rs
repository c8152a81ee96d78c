//! Quadrature: adaptive Simpson for the radial integrals, fixed
//! Gauss-Legendre panels for the inner Rician integral.

use std::sync::OnceLock;

use crate::error::{domain, Error, Result};

const MAX_DEPTH: u32 = 40;
const INITIAL_PANELS: usize = 64;
const MAX_EVALUATIONS: usize = 20_000_000;

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Estimated absolute error (Richardson difference summed over panels).
    pub error: f64,
    pub evaluations: usize,
}

struct Simpson<'a, F> {
    f: &'a F,
    evaluations: usize,
    failed: bool,
    error: f64,
}

impl<F: Fn(f64) -> f64> Simpson<'_, F> {
    #[allow(clippy::too_many_arguments)]
    fn recurse(&mut self, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = (self.f)(lm);
        let frm = (self.f)(rm);
        self.evaluations += 2;
        let h = b - a;
        let left = h / 12.0 * (fa + 4.0 * flm + fm);
        let right = h / 12.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || depth >= MAX_DEPTH || self.evaluations > MAX_EVALUATIONS {
            if delta.abs() > 15.0 * tol {
                self.failed = true;
            }
            self.error += delta.abs() / 15.0;
            return left + right + delta / 15.0;
        }
        self.recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
            + self.recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` with absolute tolerance
/// `tol`. The interval is pre-split into 64 panels so narrow features are not
/// missed by the first coarse estimate; each panel is then halved until the
/// Richardson estimate meets its share of `tol` or depth 40 is reached.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    if !(tol > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain("adaptive_simpson", format!("a={a}, b={b}, tol={tol}")));
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let mut state = Simpson { f: &f, evaluations: 0, failed: false, error: 0.0 };
    let width = (b - a) / INITIAL_PANELS as f64;
    let panel_tol = tol / INITIAL_PANELS as f64;
    let mut total = 0.0;
    let mut x0 = a;
    let mut f0 = f(a);
    state.evaluations += 1;
    for i in 0..INITIAL_PANELS {
        let x1 = if i + 1 == INITIAL_PANELS { b } else { a + width * (i + 1) as f64 };
        let xm = 0.5 * (x0 + x1);
        let fm = f(xm);
        let f1 = f(x1);
        state.evaluations += 2;
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += state.recurse(x0, x1, f0, fm, f1, whole, panel_tol, 0);
        x0 = x1;
        f0 = f1;
    }
    if state.failed || !total.is_finite() {
        return Err(Error::Integration { estimate: total, error_bound: state.error });
    }
    Ok(Quadrature { value: total, error: state.error, evaluations: state.evaluations })
}

/// Adaptive Simpson over consecutive segments of `breakpoints` (ascending),
/// splitting `tol` in proportion to segment count.
pub fn integrate_segments<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64], tol: f64) -> Result<Quadrature> {
    let segments = breakpoints.len().saturating_sub(1).max(1);
    let mut acc = Quadrature { value: 0.0, error: 0.0, evaluations: 0 };
    for w in breakpoints.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let q = adaptive_simpson(&f, w[0], w[1], tol / segments as f64)?;
        acc.value += q.value;
        acc.error += q.error;
        acc.evaluations += q.evaluations;
    }
    Ok(acc)
}

/// Integrate a radial function over `[0, r_max]` to absolute tolerance `tol`.
pub fn integrate_radial<F: Fn(f64) -> f64>(f: F, r_max: f64, tol: f64) -> Result<f64> {
    if !(r_max >= 0.0) {
        return Err(domain("integrate_radial", format!("r_max = {r_max}")));
    }
    adaptive_simpson(f, 0.0, r_max, tol).map(|q| q.value)
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

const GL_ORDER: usize = 16;

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Composite 16-point Gauss-Legendre over `[a, b]` with panels no wider than
/// `max_panel` (`f` should vary on a scale comparable to `max_panel`).
pub(crate) fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, max_panel: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (nodes, weights) = gl_rule();
    let panels = ((b - a) / max_panel).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            s += w * f(mid + half * x);
        }
        sum += s * half;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_i0;

    #[test]
    fn polynomial_exact() {
        let v = integrate_radial(|r| 2.0 * r, 1.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rayleigh_normalisation() {
        let v = integrate_radial(|r| 2.0 * r * (-r * r).exp(), 40.0, 1e-10).unwrap();
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bessel_weighted_matches_dense_trapezoid() {
        let f = |r: f64| r * bessel_i0(r).unwrap() * (-r).exp();
        let got = integrate_radial(f, 10.0, 1e-11).unwrap();
        // 10^6-point trapezoid oracle
        let n = 1_000_000;
        let h = 10.0 / n as f64;
        let mut trap = 0.5 * (f(0.0) + f(10.0));
        for i in 1..n {
            trap += f(i as f64 * h);
        }
        trap *= h;
        assert!((got - trap).abs() < 1e-8, "got {got} trap {trap}");
    }

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        let (x, w) = gauss_legendre(GL_ORDER);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // exact for degree 2n-1
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn composite_gauss_on_gaussian() {
        let v = gauss_legendre_composite(|x| (-0.5 * x * x).exp(), -12.0, 12.0, 2.0);
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn nonconvergence_reports_estimate() {
        // 1/sqrt(x) singularity with an unreachable tolerance
        let err = adaptive_simpson(|x: f64| if x == 0.0 { 1e300 } else { x.powf(-0.999) }, 0.0, 1.0, 1e-14);
        assert!(matches!(err, Err(Error::Integration { .. })));
    }
}
