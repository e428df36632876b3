//! Transition density of `dX = μ dt + σ dW` on `[0, L]` with the Robin
//! condition `∂w = ρ w` at both ends.
//!
//! ```text
//! P(x, x'; τ) = 2ρ̃ e^{ρx + (2ρ̃-ρ)x'} / (e^{2Lρ̃} - 1) · e^{-E_0 τ}
//!             + (2/L) e^{(ρ̃-ρ)(x'-x)} Σ_{n≥1} e^{-E_n τ}/q_n · φ_n(x) φ_n(x'),
//! φ_n(x) = πn cos(πnx/L) + Lρ̃ sin(πnx/L),
//! ρ̃ = ρ + μ/σ²,  E_0 = ρ(ρ - 2ρ̃)σ²/2,  q_n = π²n² + L²ρ̃²,  E_n = E_0 + q_n σ²/(2L²).
//! ```
//!
//! `ρ = 0` is the reflecting case, where the density integrates to one;
//! `ρ = -2μ/σ²` makes `e^{ρX}` a martingale instead.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::quadrature;

/// `E_N τ` beyond which the series is cut, `e^{-36.9} < 10⁻¹⁶`.
const TAIL_EXPONENT: f64 = 36.9;
/// Hard cap on the automatic term count.
pub const MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RobinDensityParams {
    pub mu: f64,
    pub sigma: f64,
    pub rho: f64,
    pub length: f64,
}

impl RobinDensityParams {
    pub fn new(mu: f64, sigma: f64, rho: f64, length: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be positive, got {sigma}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("length", format!("must be positive, got {length}")));
        }
        if !(mu.is_finite() && rho.is_finite()) {
            return Err(invalid("mu/rho", "must be finite"));
        }
        Ok(RobinDensityParams {
            mu,
            sigma,
            rho,
            length,
        })
    }

    /// Parameters making `e^{ρX}` a martingale: `ρ = -2μ/σ²`.
    pub fn exponential_martingale(mu: f64, sigma: f64, length: f64) -> Result<Self> {
        Self::new(mu, sigma, -2.0 * mu / (sigma * sigma), length)
    }

    pub fn rho_tilde(&self) -> f64 {
        self.rho + self.mu / (self.sigma * self.sigma)
    }

    pub fn e0(&self) -> f64 {
        self.rho * (self.rho - 2.0 * self.rho_tilde()) * 0.5 * self.sigma * self.sigma
    }

    pub fn q(&self, n: usize) -> f64 {
        let lr = self.length * self.rho_tilde();
        let pn = PI * n as f64;
        pn * pn + lr * lr
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.e0() + self.q(n) * self.sigma * self.sigma / (2.0 * self.length * self.length)
    }

    /// Smallest `N` with `(E_N - E_0) τ` past the double-precision tail.
    pub fn auto_terms(&self, tau: f64) -> usize {
        let scale = PI * PI * self.sigma * self.sigma * tau / (2.0 * self.length * self.length);
        let n = (TAIL_EXPONENT / scale).sqrt().ceil();
        if n.is_finite() {
            (n as usize).clamp(1, MAX_TERMS)
        } else {
            MAX_TERMS
        }
    }

    /// `2ρ̃ / (e^{2Lρ̃} - 1)`, tending to `1/L` as `ρ̃ → 0`.
    fn stationary_weight(&self) -> f64 {
        let rt = self.rho_tilde();
        let u = 2.0 * self.length * rt;
        if (self.length * rt).abs() < 1e-8 {
            (1.0 - 0.5 * u) / self.length
        } else {
            2.0 * rt / u.exp_m1()
        }
    }

    fn check_point(&self, name: &'static str, x: f64) -> Result<()> {
        if !(0.0..=self.length).contains(&x) {
            return Err(invalid(name, format!("{x} outside [0, {}]", self.length)));
        }
        Ok(())
    }
}

/// `P(x, x'; τ)` with `terms` series terms (`None` picks them so the cut
/// tail is below double precision).
pub fn density(x: f64, x_prime: f64, tau: f64, params: &RobinDensityParams, terms: Option<usize>) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(invalid("tau", format!("must be positive, got {tau}")));
    }
    params.check_point("x", x)?;
    params.check_point("x_prime", x_prime)?;
    let n_max = terms.unwrap_or_else(|| params.auto_terms(tau));
    Ok(density_unchecked(x, x_prime, tau, params, n_max))
}

fn density_unchecked(x: f64, xp: f64, tau: f64, p: &RobinDensityParams, n_max: usize) -> f64 {
    let l = p.length;
    let rt = p.rho_tilde();
    let e0 = p.e0();
    let stationary = p.stationary_weight() * (p.rho * x + (2.0 * rt - p.rho) * xp - e0 * tau).exp();
    let lr = l * rt;
    let (sx, cx) = (PI * x / l).sin_cos();
    let (sy, cy) = (PI * xp / l).sin_cos();
    // sin/cos of nθ by angle addition.
    let (mut sxn, mut cxn, mut syn, mut cyn) = (0.0, 1.0, 0.0, 1.0);
    let rate = p.sigma * p.sigma * tau / (2.0 * l * l);
    let mut sum = 0.0;
    for n in 1..=n_max {
        (sxn, cxn) = (sxn * cx + cxn * sx, cxn * cx - sxn * sx);
        (syn, cyn) = (syn * cy + cyn * sy, cyn * cy - syn * sy);
        let pn = PI * n as f64;
        let q = pn * pn + lr * lr;
        let decay = (-q * rate).exp();
        if decay == 0.0 {
            break;
        }
        sum += decay / q * (pn * cxn + lr * sxn) * (pn * cyn + lr * syn);
    }
    stationary + 2.0 / l * ((rt - p.rho) * (xp - x) - e0 * tau).exp() * sum
}

/// Density at every point of `grid` (one term count for all points).
pub fn density_curve(x: f64, tau: f64, params: &RobinDensityParams, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter().map(|&xp| density(x, xp, tau, params, None)).collect()
}

/// Integrates `P(x, ·; τ) w(·)` over `[0, L]`.
pub fn integrate_density(
    x: f64,
    tau: f64,
    params: &RobinDensityParams,
    weight: impl Fn(f64) -> f64,
    abs_tol: f64,
) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(invalid("tau", format!("must be positive, got {tau}")));
    }
    params.check_point("x", x)?;
    let n_max = params.auto_terms(tau);
    let panels = (n_max / 2).clamp(4, 2000);
    let breaks: Vec<f64> = (0..=panels)
        .map(|i| params.length * i as f64 / panels as f64)
        .collect();
    let f = |xp: f64| density_unchecked(x, xp, tau, params, n_max) * weight(xp);
    Ok(quadrature::integrate_with_breaks(f, &breaks, abs_tol)?.value)
}

/// Two candidate martingales under the Robin density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MartingaleReport {
    /// `∫ P dx'`, one when the identity is a martingale.
    pub identity: f64,
    pub identity_deviation: f64,
    /// `∫ P e^{ρx'} dx' / e^{ρx}`, one when `e^{ρX}` is a martingale.
    pub exponential: f64,
    pub exponential_deviation: f64,
}

pub fn martingale_checks(params: &RobinDensityParams, x: f64, tau: f64) -> Result<MartingaleReport> {
    let identity = integrate_density(x, tau, params, |_| 1.0, 1e-13)?;
    let rho = params.rho;
    let exponential = integrate_density(x, tau, params, |xp| (rho * (xp - x)).exp(), 1e-13)?;
    Ok(MartingaleReport {
        identity,
        identity_deviation: identity - 1.0,
        exponential,
        exponential_deviation: exponential - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumann_kernel_reduction() {
        let p = RobinDensityParams::new(0.0, 0.4, 0.0, 2.0).unwrap();
        let (x, xp, tau) = (0.3, 1.1, 0.8);
        let l = 2.0;
        let mut sum = 0.0;
        for n in 1..400 {
            let k = PI * n as f64 / l;
            sum += (-k * k * 0.16 * tau / 2.0).exp() * (k * x).cos() * (k * xp).cos();
        }
        let neumann = 1.0 / l + 2.0 / l * sum;
        let got = density(x, xp, tau, &p, None).unwrap();
        assert!((got - neumann).abs() < 1e-13, "{got} vs {neumann}");
    }

    #[test]
    fn stationary_limit_is_smooth_in_rho_tilde() {
        let a = RobinDensityParams::new(1e-12, 1.0, 0.0, 1.0).unwrap();
        let b = RobinDensityParams::new(0.0, 1.0, 0.0, 1.0).unwrap();
        assert!((a.stationary_weight() - b.stationary_weight()).abs() < 1e-11);
        assert_eq!(b.stationary_weight(), 1.0);
    }

    #[test]
    fn e0_vanishes_in_both_martingale_regimes() {
        assert_eq!(RobinDensityParams::new(0.3, 0.5, 0.0, 1.0).unwrap().e0(), 0.0);
        let p = RobinDensityParams::exponential_martingale(0.3, 0.5, 1.0).unwrap();
        assert!(p.e0().abs() < 1e-15);
    }

    #[test]
    fn invalid_inputs_rejected() {
        let p = RobinDensityParams::new(0.0, 0.4, 0.0, 1.0).unwrap();
        assert!(density(0.5, 0.5, 0.0, &p, None).is_err());
        assert!(density(1.5, 0.5, 1.0, &p, None).is_err());
        assert!(RobinDensityParams::new(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn long_horizon_is_stationary() {
        let p = RobinDensityParams::new(0.05, 0.3, 0.0, 1.0).unwrap();
        let rt = p.rho_tilde();
        let expect = 2.0 * rt * (2.0 * rt * 0.7).exp() / ((2.0 * rt).exp() - 1.0);
        let a = density(0.1, 0.7, 500.0, &p, None).unwrap();
        let b = density(0.9, 0.7, 500.0, &p, None).unwrap();
        assert!((a - expect).abs() < 1e-14 && (b - expect).abs() < 1e-14);
    }
}
