use statrs::distribution::{ContinuousCDF, Normal};
use tzo_core::mc::{self, McConfig};
use tzo_core::{Band, Claim, Pricer, ZoneModel};

fn unit() -> Band {
    Band::with_width(1.0).unwrap()
}

/// Two-sided 99.9% normal quantile.
fn z_crit() -> f64 {
    Normal::standard().inverse_cdf(0.9995)
}

#[test]
fn quartic_discounted_fx_is_a_martingale() {
    let model = ZoneModel::quartic_from_band(7.75, 7.85, unit(), 0.1).unwrap();
    let (s0, tenor) = (7.81, 0.5);
    let cfg = McConfig::new(20_000, tenor / 500.0, 3);
    let est = mc::mc_price(&Claim::Forward(0.0), &model, s0, tenor, &cfg).unwrap();
    let z = (est.mean - s0) / est.std_error;
    assert!(z.abs() < z_crit(), "z = {z}");
}

#[test]
fn halving_dt_with_shared_noise_moves_price_less_than_noise() {
    let model = ZoneModel::cosine_from_band(7.75, 7.85, unit(), 0.1).unwrap();
    let pricer = Pricer::new(model.clone(), 64).unwrap();
    let (s0, k, tenor) = (7.79, 7.80, 0.25);
    let coarse = McConfig {
        refinement: 2,
        ..McConfig::new(20_000, tenor / 200.0, 9)
    };
    let fine = McConfig::new(20_000, tenor / 400.0, 9);
    let a = mc::mc_price(&Claim::Call(k), &model, s0, tenor, &coarse).unwrap();
    let b = mc::mc_price(&Claim::Call(k), &model, s0, tenor, &fine).unwrap();
    // Common random numbers: the two runs differ only by discretisation.
    assert!((a.mean - b.mean).abs() < 0.25 * a.std_error, "{} vs {}", a.mean, b.mean);
    let exact = pricer.call(s0, k, tenor).unwrap().value;
    for est in [a, b] {
        let z = (est.mean - exact) / est.std_error;
        assert!(z.abs() < z_crit(), "z = {z}");
    }
}

#[test]
fn results_do_not_depend_on_path_chunking() {
    let model = ZoneModel::tangent_from_band(7.75, 7.85, 2.0, unit(), 0.1).unwrap();
    let cfg = McConfig::new(3_000, 1e-3, 21);
    let claims = [Claim::Call(7.8), Claim::Bond];
    let together = mc::mc_price_many(&claims, &model, 7.8, 0.1, &cfg).unwrap();
    for (claim, joint) in claims.iter().zip(&together) {
        let alone = mc::mc_price(claim, &model, 7.8, 0.1, &cfg).unwrap();
        assert_eq!(alone, *joint);
    }
}

#[test]
fn replication_error_shrinks_with_rebalancing() {
    let pricer = Pricer::new(ZoneModel::cosine_from_band(7.75, 7.85, unit(), 0.1).unwrap(), 256).unwrap();
    let cfg = McConfig::new(400, 0.25 / 1024.0, 5);
    let res = mc::replicate_many(&Claim::Call(7.8), &pricer, 7.8, 0.25, &[16, 64, 256], &cfg).unwrap();
    assert!(res[0].rms.mean > res[1].rms.mean && res[1].rms.mean > res[2].rms.mean);
    let fwd = mc::replicate(&Claim::Forward(0.0), &pricer, 7.8, 0.25, 16, &cfg).unwrap();
    assert!(fwd.mean < 1e-10, "{}", fwd.mean);
}
