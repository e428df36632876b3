use std::sync::LazyLock;

use approx::assert_relative_eq;
use proptest::prelude::*;
use tzo_core::robin::{self, RobinDensityParams};
use tzo_core::{Band, Claim, Pricer, ZoneModel};

fn unit() -> Band {
    Band::with_width(1.0).unwrap()
}

static COS: LazyLock<Pricer> =
    LazyLock::new(|| Pricer::new(ZoneModel::cosine_from_band(7.75, 7.85, unit(), 0.1).unwrap(), 64).unwrap());
static TAN: LazyLock<Pricer> =
    LazyLock::new(|| Pricer::new(ZoneModel::tangent_from_band(7.75, 7.85, 2.0, unit(), 0.1).unwrap(), 64).unwrap());

fn pricer(tan: bool) -> &'static Pricer {
    if tan { &TAN } else { &COS }
}

/// Point `u ∈ [0, 1]` of the way across the FX band.
fn fx_at(p: &Pricer, u: f64) -> f64 {
    let b = p.model().fx_band();
    b.s_minus + u * (b.s_plus - b.s_minus)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn put_call_parity(tan: bool, ku in 0.0..=1.0f64, su in 0.0..=1.0f64, tau in 0.01..5.0f64) {
        let p = pricer(tan);
        let (k, s) = (fx_at(p, ku), fx_at(p, su));
        let call = p.call(s, k, tau).unwrap().value;
        let put = p.put(s, k, tau).unwrap().value;
        let fwd = p.forward(s, k, tau).unwrap().value;
        prop_assert!((call - put - fwd).abs() <= 1e-12 * p.model().s_mid());
    }

    #[test]
    fn prices_respect_static_bounds(tan: bool, ku in 0.0..=1.0f64, su in 0.0..=1.0f64, tau in 0.01..5.0f64) {
        let p = pricer(tan);
        let (k, s) = (fx_at(p, ku), fx_at(p, su));
        // Values are accurate to the reported truncation tail.
        let bond = p.bond(s, tau).unwrap();
        let call = p.call(s, k, tau).unwrap();
        let binary = p.binary(s, k, tau).unwrap();
        let tol = |r: &tzo_core::PriceResult| 1e-9 + r.tail_bound;
        // P = m + (1 - m) e^{-E1 τ} with m = S/S_mid lies between m and 1.
        let m = s / p.model().s_mid();
        prop_assert!(bond.value >= m.min(1.0) - tol(&bond) && bond.value <= m.max(1.0) + tol(&bond));
        prop_assert!(call.value >= -tol(&call) && call.value <= s + tol(&call));
        prop_assert!(binary.value >= -tol(&binary) && binary.value <= bond.value + tol(&binary) + tol(&bond));
        // The call dominates the forward.
        prop_assert!(call.value + tol(&call) + tol(&bond) >= s - k * bond.value);
    }

    #[test]
    fn call_decreasing_in_strike(tan: bool, ku in 0.0..0.99f64, su in 0.0..=1.0f64, tau in 0.01..2.0f64) {
        let p = pricer(tan);
        let s = fx_at(p, su);
        let lo = p.call(s, fx_at(p, ku), tau).unwrap();
        let hi = p.call(s, fx_at(p, ku + 0.01), tau).unwrap();
        prop_assert!(hi.value <= lo.value + lo.tail_bound + hi.tail_bound);
    }

    #[test]
    fn call_delta_between_zero_and_one(tan: bool, ku in 0.05..0.95f64, su in 0.0..=1.0f64, tau in 0.05..2.0f64) {
        let p = pricer(tan);
        let d = p.delta(&Claim::Call(fx_at(p, ku)), fx_at(p, su), tau).unwrap();
        prop_assert!((-1e-6..=1.0 + 1e-6).contains(&d), "delta {d}");
    }

    #[test]
    fn invert_round_trips(kind in 0..3usize, nu in 0.1..2.5f64, u in 0.0..=1.0f64) {
        let m = match kind {
            0 => ZoneModel::cosine_from_band(7.75, 7.85, unit(), 0.1).unwrap(),
            1 => ZoneModel::tangent_from_band(7.75, 7.85, nu, unit(), 0.1).unwrap(),
            _ => ZoneModel::quartic_from_band(7.75, 7.85, unit(), 0.1).unwrap(),
        };
        let b = m.fx_band();
        let s = b.s_minus + u * (b.s_plus - b.s_minus);
        let x = m.invert(s).unwrap();
        prop_assert!(m.band().contains(x));
        prop_assert!((m.fx(x) - s).abs() <= 1e-12 * s);
    }

    #[test]
    fn potential_is_riccati_of_h(kind in 0..3usize, nu in 0.1..2.5f64, x in 0.05..0.95f64) {
        let m = match kind {
            0 => ZoneModel::cosine_from_band(7.75, 7.85, unit(), 0.1).unwrap(),
            1 => ZoneModel::tangent_from_band(7.75, 7.85, nu, unit(), 0.1).unwrap(),
            _ => ZoneModel::quartic_from_band(7.75, 7.85, unit(), 0.1).unwrap(),
        };
        let eps = 1e-5;
        let h_d1 = (m.h(x + eps) - m.h(x - eps)) / (2.0 * eps);
        let u = m.h(x).powi(2) + h_d1;
        let scale = m.potential(x).abs().max(1.0);
        prop_assert!((u - m.potential(x)).abs() <= 1e-6 * scale, "U={} vs {u}", m.potential(x));
    }

    #[test]
    fn robin_density_is_nonnegative(mu in -0.2..0.2f64, x in 0.0..=1.0f64, y in 0.0..=1.0f64, tau in 0.01..3.0f64) {
        let params = RobinDensityParams::new(mu, 0.3, 0.0, 1.0).unwrap();
        prop_assert!(robin::density(x, y, tau, &params, None).unwrap() >= -1e-12);
    }
}

#[test]
fn binary_is_bond_below_band_and_zero_above() {
    let p = &*COS;
    let (s, tau) = (7.8, 0.5);
    let b = p.model().fx_band();
    let bond = p.bond(s, tau).unwrap().value;
    assert_relative_eq!(p.binary(s, b.s_minus, tau).unwrap().value, bond, epsilon = 1e-10);
    assert_eq!(p.binary(s, b.s_plus, tau).unwrap().value, 0.0);
}

#[test]
fn call_converges_to_intrinsic_at_expiry() {
    let p = &*TAN;
    for (s, k) in [(7.79, 7.8), (7.82, 7.8), (7.8, 7.78)] {
        let v = p.call(s, k, 1e-6).unwrap().value;
        assert_relative_eq!(v, (s - k).max(0.0), epsilon = 2e-4);
    }
}
