//! Modified Bessel functions of the first kind.
//!
//! `I0` and `e^{-x} I0` use the Cephes Chebyshev expansions (two ranges split
//! at x = 8). Integer orders needed by the Marcum series are obtained by
//! Miller's backward recurrence normalised against the scaled `I0`.

use crate::error::{domain, Result};

const I0_COEFFS_A: [f64; 30] = [
    -4.415_341_646_479_339_5E-18,
    3.330_794_518_822_238_4E-17,
    -2.431_279_846_547_955E-16,
    1.715_391_285_555_133E-15,
    -1.168_533_287_799_345_1E-14,
    7.676_185_498_604_936E-14,
    -4.856_446_783_111_929E-13,
    2.955_052_663_129_64E-12,
    -1.726_826_291_441_556E-11,
    9.675_809_035_373_237E-11,
    -5.189_795_601_635_263E-10,
    2.659_823_724_682_386_6E-9,
    -1.300_025_009_986_248E-8,
    6.046_995_022_541_919E-8,
    -2.670_793_853_940_612E-7,
    1.117_387_539_120_103_7E-6,
    -4.416_738_358_458_750_5E-6,
    1.644_844_807_072_889_6E-5,
    -5.754_195_010_082_104E-5,
    1.885_028_850_958_416_5E-4,
    -5.763_755_745_385_824E-4,
    1.639_475_616_941_335_7E-3,
    -4.324_309_995_050_576E-3,
    1.054_646_039_459_499_8E-2,
    -2.373_741_480_589_947E-2,
    4.930_528_423_967_071E-2,
    -9.490_109_704_804_764E-2,
    1.716_209_015_222_087_7E-1,
    -3.046_826_723_431_984E-1,
    6.767_952_744_094_761E-1,
];

const I0_COEFFS_B: [f64; 25] = [
    -7.233_180_487_874_754E-18,
    -4.830_504_485_944_182E-18,
    4.465_621_420_296_76E-17,
    3.461_222_867_697_461E-17,
    -2.827_623_980_516_583_6E-16,
    -3.425_485_619_677_219E-16,
    1.772_560_133_056_526_3E-15,
    3.811_680_669_352_622_4E-15,
    -9.554_846_698_828_307E-15,
    -4.150_569_347_287_222E-14,
    1.540_086_217_521_41E-14,
    3.852_778_382_742_142_6E-13,
    7.180_124_451_383_666E-13,
    -1.794_178_531_506_806_2E-12,
    -1.321_581_184_044_771_3E-11,
    -3.149_916_527_963_241_6E-11,
    1.188_914_710_784_643_9E-11,
    4.940_602_388_224_97E-10,
    3.396_232_025_708_386_5E-9,
    2.266_668_990_498_178E-8,
    2.048_918_589_469_063_8E-7,
    2.891_370_520_834_756_7E-6,
    6.889_758_346_916_825E-5,
    3.369_116_478_255_694_3E-3,
    8.044_904_110_141_088E-1,
];

fn chbevl(x: f64, coeffs: &[f64]) -> f64 {
    let mut b0 = coeffs[0];
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for c in &coeffs[1..] {
        b2 = b1;
        b1 = b0;
        b0 = x.mul_add(b1, *c) - b2;
    }
    0.5 * (b0 - b2)
}

/// `e^{-x} I0(x)` for x >= 0 without domain checks. Never overflows.
#[inline]
pub(crate) fn i0e_unchecked(x: f64) -> f64 {
    if x <= 8.0 {
        chbevl(x.mul_add(0.5, -2.0), &I0_COEFFS_A)
    } else {
        chbevl(32.0 / x - 2.0, &I0_COEFFS_B) / x.sqrt()
    }
}

fn check(func: &'static str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain(func, format!("x = {x}, need finite x >= 0")));
    }
    Ok(())
}

/// Modified Bessel function `I0(x)`. Overflows to infinity above x ~ 713;
/// use [`bessel_i0_scaled`] there.
pub fn bessel_i0(x: f64) -> Result<f64> {
    check("bessel_i0", x)?;
    Ok(x.exp() * i0e_unchecked(x))
}

/// Exponentially scaled `e^{-x} I0(x)`.
pub fn bessel_i0_scaled(x: f64) -> Result<f64> {
    check("bessel_i0_scaled", x)?;
    Ok(i0e_unchecked(x))
}

/// Scaled integer-order values `e^{-x} I_k(x)` for `k = 0..=n`.
///
/// Miller's algorithm: recur `I_{k-1} = I_{k+1} + (2k/x) I_k` downward from
/// an order well above both `n` and `x`, then normalise by `e^{-x} I0(x)`.
pub(crate) fn scaled_bessel_i_orders(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if x < 1e-8 {
        // Leading series term; relative error O(x^2).
        let mut term = (-x).exp();
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                term *= 0.5 * x / k as f64;
            }
            *slot = term;
        }
        return out;
    }
    let start = n.max(x as usize) + 30 + (40.0 * (n.max(x as usize) as f64)).sqrt() as usize;
    let mut above = 0.0_f64;
    let mut current = 1e-300_f64;
    for k in (1..=start).rev() {
        let below = above + (2.0 * k as f64 / x) * current;
        above = current;
        current = below;
        if k - 1 <= n {
            out[k - 1] = current;
        }
        if current > 1e250 {
            current *= 1e-250;
            above *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let scale = i0e_unchecked(x) / out[0];
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Truncated power series sum (x/2)^{2k} / (k!)^2, 30 terms.
    fn series_i0(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30 {
            term *= (0.5 * x) * (0.5 * x) / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    #[test]
    fn i0_known_values() {
        assert_eq!(bessel_i0(0.0).unwrap(), 1.0);
        // frozen from the series oracle
        assert!((bessel_i0(1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-14);
        assert!((bessel_i0(2.0).unwrap() - 2.279_585_302_336_067).abs() < 1e-13);
    }

    #[test]
    fn i0_matches_series_oracle() {
        for i in 0..=120 {
            let x = i as f64 * 0.1;
            let want = series_i0(x);
            let got = bessel_i0(x).unwrap();
            assert!(((got - want) / want).abs() < 5e-15, "x={x} got {got} want {want}");
        }
    }

    #[test]
    fn i0_rejects_bad_input() {
        assert!(bessel_i0(-1.0).is_err());
        assert!(bessel_i0(f64::NAN).is_err());
        assert!(bessel_i0_scaled(f64::INFINITY).is_err());
    }

    #[test]
    fn scaled_i0_finite_for_huge_arguments() {
        let v = bessel_i0_scaled(1e6).unwrap();
        let asymptotic = 1.0 / (2.0 * std::f64::consts::PI * 1e6).sqrt();
        assert!(((v - asymptotic) / asymptotic).abs() < 1e-6);
    }

    #[test]
    fn i0_monotone_and_at_least_one() {
        let mut prev = 0.0;
        for i in 0..1000 {
            let x = i as f64 * 0.7;
            let v = bessel_i0_scaled(x).unwrap() * 1.0;
            // compare in log space to stay finite
            let log_i0 = x + v.ln();
            assert!(log_i0 >= 0.0);
            assert!(i == 0 || log_i0 > prev);
            prev = log_i0;
        }
    }

    #[test]
    fn integer_orders_satisfy_recurrence() {
        for &x in &[0.3, 2.5, 11.0, 29.0] {
            let v = scaled_bessel_i_orders(x, 40);
            for k in 1..39 {
                let lhs = v[k - 1] - v[k + 1];
                let rhs = 2.0 * k as f64 / x * v[k];
                assert!((lhs - rhs).abs() <= 1e-13 * v[k - 1].max(1e-300), "x={x} k={k}");
            }
            // I1 from its own series
            let mut term = 0.5 * x;
            let mut sum = term;
            for k in 1..60 {
                term *= (0.5 * x) * (0.5 * x) / (k as f64 * (k + 1) as f64);
                sum += term;
            }
            let want = sum * (-x).exp();
            assert!(((v[1] - want) / want).abs() < 1e-12, "x={x}");
        }
    }
}
