use std::f64::consts::E;

use crate::error::{domain, Result};

const INV_E: f64 = 1.0 / E;
const MAX_ITER: usize = 64;

/// Real branch of the Lambert W function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WBranch {
    /// W0: defined on [-1/e, inf), values >= -1.
    Principal,
    /// W_{-1}: defined on [-1/e, 0), values <= -1.
    LowerNegative,
}

/// Solve `w e^w = q` on the requested real branch by Halley iteration.
pub fn lambert_w(branch: WBranch, q: f64) -> Result<f64> {
    if !q.is_finite() || q < -INV_E - 1e-15 {
        return Err(domain("lambert_w", format!("q = {q} below -1/e")));
    }
    let q = q.max(-INV_E);
    if branch == WBranch::LowerNegative && q >= 0.0 {
        return Err(domain("lambert_w", format!("lower branch needs q < 0, got {q}")));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    // distance from the branch point, p = sqrt(2 (e q + 1))
    let p2 = 2.0 * (E * q + 1.0);
    if p2 <= 0.0 {
        return Ok(-1.0);
    }
    let p = p2.sqrt();
    let mut w = match branch {
        WBranch::Principal => {
            if q < -0.3 {
                -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
            } else if q < 3.0 {
                // ln(1+q) is within a factor ~2 on this range
                0.5 * (1.0 + q).ln() + 0.5 * q / (1.0 + q)
            } else {
                let l1 = q.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        WBranch::LowerNegative => {
            if q < -0.25 {
                -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
            } else {
                let l1 = (-q).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    };
    let target = 1e-12 * q.abs().max(1.0);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - q;
        if f.abs() <= 0.25 * target {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = w - step;
        // keep iterates on the requested side of -1
        w = match branch {
            WBranch::Principal if next < -1.0 => 0.5 * (w - 1.0),
            WBranch::LowerNegative if next > -1.0 => 0.5 * (w - 1.0),
            _ => next,
        };
        if step.abs() <= 1e-16 * w.abs().max(1.0) {
            break;
        }
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(w: f64, q: f64) -> f64 {
        (w * w.exp() - q).abs()
    }

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w(WBranch::Principal, 0.0).unwrap(), 0.0);
        assert!((lambert_w(WBranch::LowerNegative, -INV_E).unwrap() + 1.0).abs() < 1e-7);
        assert!((lambert_w(WBranch::Principal, -INV_E).unwrap() + 1.0).abs() < 1e-7);
        let omega = lambert_w(WBranch::Principal, 1.0).unwrap();
        assert!((omega - 0.567_143_290_409_783_8).abs() < 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(lambert_w(WBranch::Principal, -0.5).is_err());
        assert!(lambert_w(WBranch::LowerNegative, 0.0).is_err());
        assert!(lambert_w(WBranch::LowerNegative, 0.1).is_err());
        assert!(lambert_w(WBranch::Principal, f64::NAN).is_err());
    }

    #[test]
    fn branch_ranges() {
        for i in 1..200 {
            let q = -INV_E + i as f64 * (INV_E / 200.0);
            let w0 = lambert_w(WBranch::Principal, q).unwrap();
            let wm = lambert_w(WBranch::LowerNegative, q).unwrap();
            assert!(w0 >= -1.0 && wm <= -1.0, "q={q} w0={w0} wm={wm}");
            assert!(residual(w0, q) <= 1e-12);
            assert!(residual(wm, q) <= 1e-12);
        }
    }

    #[test]
    fn large_arguments() {
        for &q in &[10.0, 1e3, 1e8, 1e100, 1e300] {
            let w = lambert_w(WBranch::Principal, q).unwrap();
            // compare in log form: ln w + w = ln q
            assert!(((w.ln() + w) - q.ln()).abs() < 1e-12 * q.ln(), "q={q}");
        }
    }
}
