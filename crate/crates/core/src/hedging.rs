//! Replicating strategies.
//!
//! With `A(x) = c_0 + Σ c_n e^{-E_n τ} ψ_n/ψ_0` the value is `v = f A`, so the
//! FX holding is `φ = ∂v/∂S = A + (f/f') A'`. At the edges `f' → 0` and the
//! quotient is replaced by its l'Hôpital limit `v''/f''`, exact there because
//! the eigenfunctions satisfy the same Robin conditions as the density.

use serde::Serialize;

use crate::eigen::{BasisValues, EigenSystem};
use crate::error::{invalid, Error, Result};
use crate::pricing::CoefficientSet;
use crate::zone_model::ZoneModel;

/// Distance to an edge, relative to `L`, inside which the boundary form of
/// the delta is used.
pub const EDGE_ZONE: f64 = 1e-4;

/// `A`, `A'`, `A''` at `x`.
fn series_jet(x: f64, tau: f64, coeffs: &CoefficientSet, eig: &EigenSystem) -> (f64, f64, f64) {
    let mut b = BasisValues::default();
    eig.evaluate(x, &mut b);
    let (p0, d0, dd0) = (b.psi[0], b.dpsi[0], b.d2psi[0]);
    let log_d = d0 / p0;
    let n_max = coeffs.n_max().min(eig.n_max());
    let (mut a, mut da, mut dda) = (coeffs.values[0], 0.0, 0.0);
    for n in 1..=n_max {
        let exponent = eig.energy(n) * tau;
        if exponent > 41.5 {
            // e^{-41.5} < 10⁻¹⁸ and the energies increase with n.
            break;
        }
        let w = coeffs.values[n] * (-exponent).exp();
        let r = b.psi[n] / p0;
        let dr = (b.dpsi[n] * p0 - b.psi[n] * d0) / (p0 * p0);
        let ddr = (b.d2psi[n] * p0 - b.psi[n] * dd0) / (p0 * p0) - 2.0 * log_d * dr;
        a += w * r;
        da += w * dr;
        dda += w * ddr;
    }
    (a, da, dda)
}

/// FX holding `φ(x, τ)` replicating the claim behind `coeffs`.
pub fn delta(x: f64, tau: f64, coeffs: &CoefficientSet, eig: &EigenSystem, model: &ZoneModel) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(invalid("tau", format!("time to maturity must be non-negative, got {tau}")));
    }
    let band = model.band();
    let x = band.clamp(x)?;
    let (a, da, dda) = series_jet(x, tau, coeffs, eig);
    let (f, f1, f2) = (model.fx(x), model.fx_d1(x), model.fx_d2(x));
    let edge = (x - band.x_minus).min(band.x_plus - x) < EDGE_ZONE * band.width();
    let scale = model.s_mid() / band.width();
    if !edge && f1.abs() > 1e-12 * scale {
        return Ok(a + f / f1 * da);
    }
    if f2.abs() <= 1e-12 * scale / band.width() {
        return Err(Error::DegenerateMapping { x });
    }
    let v2 = f2 * a + 2.0 * f1 * da + f * dda;
    Ok(v2 / f2)
}

/// Bond holding `ψ = E − φ Z` with `E = V/B`, `Z = S/B` the values
/// discounted by the foreign cash bond `B`.
pub fn bond_holding(e: f64, phi: f64, z: f64) -> f64 {
    e - phi * z
}

/// Self-financing portfolio at one rebalance date.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HedgeState {
    pub value: f64,
    pub phi: f64,
    pub psi: f64,
}

impl HedgeState {
    /// Portfolio worth `value` holding `phi` units of FX; the rest sits in the
    /// cash bond worth `cash_bond`.
    pub fn new(value: f64, phi: f64, spot: f64, cash_bond: f64) -> Self {
        HedgeState {
            value,
            phi,
            psi: bond_holding(value / cash_bond, phi, spot / cash_bond),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::{Claim, Pricer};
    use crate::zone_model::{Band, ZoneModel};

    fn pricer() -> Pricer {
        let m = ZoneModel::cosine_from_band(7.75, 7.85, Band::with_width(1.0).unwrap(), 0.1).unwrap();
        Pricer::new(m, 64).unwrap()
    }

    #[test]
    fn forward_delta_is_one() {
        let p = pricer();
        for s in [7.751, 7.78, 7.8, 7.84] {
            let d = p.delta(&Claim::Forward(0.0), s, 0.3).unwrap();
            assert!((d - 1.0).abs() < 1e-9, "s={s} d={d}");
        }
    }

    #[test]
    fn interior_delta_matches_price_difference() {
        let p = pricer();
        let (s, k, tau) = (7.79, 7.8, 0.25);
        let h = 1e-5;
        let fd = (p.call(s + h, k, tau).unwrap().value - p.call(s - h, k, tau).unwrap().value) / (2.0 * h);
        let d = p.delta(&Claim::Call(k), s, tau).unwrap();
        assert!((d - fd).abs() < 1e-6, "{d} vs {fd}");
    }

    #[test]
    fn delta_is_continuous_across_edge_zone() {
        let p = pricer();
        let m = p.model();
        let l = m.band().width();
        let inside = m.fx(m.band().x_minus + 1.01 * EDGE_ZONE * l);
        let outside = m.fx(m.band().x_minus + 0.99 * EDGE_ZONE * l);
        let a = p.delta(&Claim::Call(7.8), inside, 0.25).unwrap();
        let b = p.delta(&Claim::Call(7.8), outside, 0.25).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }

    #[test]
    fn bond_holding_identity() {
        let st = HedgeState::new(2.0, 0.5, 3.0, 1.0);
        assert_eq!(st.psi, 0.5);
        assert_eq!(bond_holding(1.0, 0.0, 5.0), 1.0);
    }
}
