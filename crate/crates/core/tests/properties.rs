use ofdmpa_core::pas_engine::{pas_ee, pas_ee_harmonic, pas_se, reference_pair, Duplex, PasConfig};
use ofdmpa_core::power_models::{pc_ideal, pc_nonlinear, BsType, PowerModelParams};
use ofdmpa_core::se_engine::se;
use ofdmpa_core::specfun::{lambert_w, marcum_q1, WBranch};
use proptest::prelude::*;

fn pair_config(gs: f64, eps: f64, duplex: Duplex, kappa: f64) -> PasConfig {
    let (a, b) = reference_pair();
    PasConfig::new(a, b, gs, eps, duplex).unwrap().with_kappa(kappa).unwrap()
}

proptest! {
    // each case costs a few entropy integrations
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn pas_se_between_single_pa_values(xi in 0.02f64..1.0, k in 0u32..=20, gs in 0.0f64..2.0) {
        let c = pair_config(gs, 0.0, Duplex::Tdd, k as f64 / 20.0);
        let (s1, s2) = c.lossy_scenarios();
        let (a, b) = (se(xi, &s1).unwrap(), se(xi, &s2).unwrap());
        let v = pas_se(xi, &c).unwrap();
        prop_assert!(v >= a.min(b) * (1.0 - 1e-12) && v <= a.max(b) * (1.0 + 1e-12));
    }

    #[test]
    fn switching_time_never_helps(xi in 0.02f64..1.0, k in 1u32..20, e1 in 0.0f64..5e-3, e2 in 0.0f64..5e-3) {
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let kappa = k as f64 / 20.0;
        let a = pair_config(1.0, lo, Duplex::Fdd, kappa);
        let b = pair_config(1.0, hi, Duplex::Fdd, kappa);
        prop_assert!(pas_se(xi, &b).unwrap() <= pas_se(xi, &a).unwrap());
        prop_assert!(pas_ee(xi, &b).unwrap() <= pas_ee(xi, &a).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn direct_and_harmonic_ee_agree(xi in 0.02f64..1.0, k in 0u32..=20, eps in 0.0f64..5e-3) {
        let c = pair_config(1.0, eps, Duplex::Fdd, k as f64 / 20.0);
        let d = pas_ee(xi, &c).unwrap();
        let h = pas_ee_harmonic(xi, &c).unwrap();
        prop_assert!((d - h).abs() <= 1e-12 * d);
    }
}

proptest! {
    #[test]
    fn ideal_consumption_is_a_lower_bound(xi in 1e-4f64..=1.0, w in 1u32..6, g_db in 5.0f64..60.0, bs in 0usize..5) {
        let p = PowerModelParams::preset(BsType::ALL[bs], w);
        let g = 10f64.powf(g_db / 10.0);
        prop_assert!(pc_ideal(xi, &p, g).unwrap() <= pc_nonlinear(xi, &p).unwrap());
    }

    #[test]
    fn consumption_increases_with_load(a in 1e-4f64..=1.0, b in 1e-4f64..=1.0, w in 1u32..6) {
        let p = PowerModelParams::preset(BsType::Macro, w);
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(pc_nonlinear(lo, &p).unwrap() <= pc_nonlinear(hi, &p).unwrap());
    }

    #[test]
    fn lambert_w_inverts(q in -0.36787944117144233f64..1e8) {
        let w = lambert_w(WBranch::Principal, q).unwrap();
        prop_assert!((w * w.exp() - q).abs() <= 1e-12 * q.abs().max(1.0));
        prop_assert!(w >= -1.0);
        if q < 0.0 {
            let w1 = lambert_w(WBranch::LowerNegative, q).unwrap();
            prop_assert!(w1 <= -1.0);
            prop_assert!((w1 * w1.exp() - q).abs() <= 1e-12);
        }
    }

    #[test]
    fn marcum_is_a_tail_probability(a in 0.0f64..30.0, b1 in 0.0f64..40.0, b2 in 0.0f64..40.0) {
        let (lo, hi) = (b1.min(b2), b1.max(b2));
        let (qlo, qhi) = (marcum_q1(a, lo).unwrap(), marcum_q1(a, hi).unwrap());
        prop_assert!((0.0..=1.0).contains(&qlo) && (0.0..=1.0).contains(&qhi));
        prop_assert!(qhi <= qlo + 1e-15);
    }
}
