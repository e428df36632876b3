//! Eigenfunction-series prices.
//!
//! A claim `Y(x)` maturing in `τ` years is worth
//!
//! ```text
//! v(x) = f(x) [ c_0 + (1/ψ_0(x)) Σ_{n≥1} c_n ψ_n(x) e^{-E_n τ} ],
//! c_n  = ∫ ψ_0 ψ_n Y/f dx,
//! ```
//!
//! in units of the foreign cash bond normalised to one at valuation.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use serde::Serialize;

use crate::eigen::{self, BasisValues, EigenSystem, SystemKind};
use crate::error::{invalid, Error, Result};
use crate::quadrature;
use crate::zone_model::{ModelKind, ScalarFn, ZoneModel};

/// Per-coefficient absolute quadrature tolerance.
pub const COEFF_TOL: f64 = 1e-12;
/// Series truncation target, relative to `S_mid`.
pub const TRUNCATION_TOL: f64 = 1e-10;
/// Tail above this (relative to `S_mid`) at the cap raises the warning.
pub const WARN_TAIL: f64 = 1e-6;
/// `E_N τ` below this flags the short-tenor regime.
pub const SHORT_TENOR_EXPONENT: f64 = 35.0;

/// European claim on the FX rate at maturity.
#[derive(Clone)]
pub enum Claim {
    Call(f64),
    Put(f64),
    /// Pays one unit if `S_T > k`.
    Binary(f64),
    /// Zero-coupon bond paying one unit.
    Bond,
    /// Pays `S_T - k`.
    Forward(f64),
    /// Arbitrary payoff as a function of the state `x`.
    Custom(ScalarFn),
}

impl fmt::Debug for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Call(k) => write!(f, "Call({k})"),
            Claim::Put(k) => write!(f, "Put({k})"),
            Claim::Binary(k) => write!(f, "Binary({k})"),
            Claim::Bond => write!(f, "Bond"),
            Claim::Forward(k) => write!(f, "Forward({k})"),
            Claim::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl Claim {
    /// `Y(x)`.
    pub fn payoff(&self, model: &ZoneModel, x: f64) -> f64 {
        let s = model.fx(x);
        match self {
            Claim::Call(k) => (s - k).max(0.0),
            Claim::Put(k) => (k - s).max(0.0),
            Claim::Binary(k) => {
                if s > *k {
                    1.0
                } else {
                    0.0
                }
            }
            Claim::Bond => 1.0,
            Claim::Forward(k) => s - k,
            Claim::Custom(y) => y(x),
        }
    }

    pub fn strike(&self) -> Option<f64> {
        match self {
            Claim::Call(k) | Claim::Put(k) | Claim::Binary(k) | Claim::Forward(k) => Some(*k),
            _ => None,
        }
    }

    /// Whether the payoff meets `Y'(x±) = 0` and is continuous, so that the
    /// replicating strategy exists. Binaries are price-only.
    pub fn is_hedgeable(&self, model: &ZoneModel) -> bool {
        match self {
            Claim::Binary(_) => false,
            Claim::Custom(y) => {
                let band = model.band();
                let h = 1e-5 * band.width();
                let scale = (y(band.x_minus).abs() + y(band.x_plus).abs()).max(1.0);
                let lower = (y(band.x_minus + h) - y(band.x_minus)) / h;
                let upper = (y(band.x_plus) - y(band.x_plus - h)) / h;
                lower.abs() <= 1e-3 * scale && upper.abs() <= 1e-3 * scale
            }
            _ => true,
        }
    }
}

/// Series coefficients `c_0..=c_N` of a claim.
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    pub values: Vec<f64>,
    pub claim: Claim,
    pub model: ModelKind,
}

impl CoefficientSet {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    fn combine(&self, other: &CoefficientSet, sign: f64, claim: Claim) -> CoefficientSet {
        CoefficientSet {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + sign * b)
                .collect(),
            claim,
            model: self.model,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceResult {
    pub value: f64,
    pub n_used: usize,
    pub tail_bound: f64,
    pub x_hat: f64,
    /// Truncation cap reached with a large tail, or `E_N τ < 35`.
    #[serde(skip)]
    pub short_tenor_warning: bool,
}

impl PriceResult {
    fn exact(value: f64, x_hat: f64) -> Self {
        PriceResult {
            value,
            n_used: 0,
            tail_bound: 0.0,
            x_hat,
            short_tenor_warning: false,
        }
    }
}

type Weight<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// Integration range and the weight `w` with `c_n = ∫ ψ0 ψn w`.
fn integrand<'a>(claim: &'a Claim, model: &'a ZoneModel) -> Result<(f64, f64, Weight<'a>)> {
    let band = model.band();
    let fxb = model.fx_band();
    let kink = |k: f64| -> Result<f64> {
        if k <= fxb.s_minus {
            Ok(band.x_minus)
        } else if k >= fxb.s_plus {
            Ok(band.x_plus)
        } else {
            model.invert(k)
        }
    };
    Ok(match claim {
        Claim::Call(k) => {
            let k = *k;
            (kink(k)?, band.x_plus, Box::new(move |x| 1.0 - k / model.fx(x)))
        }
        Claim::Put(k) => {
            let k = *k;
            (band.x_minus, kink(k)?, Box::new(move |x| k / model.fx(x) - 1.0))
        }
        Claim::Binary(k) => (kink(*k)?, band.x_plus, Box::new(move |x| 1.0 / model.fx(x))),
        Claim::Bond => (band.x_minus, band.x_plus, Box::new(move |x| 1.0 / model.fx(x))),
        Claim::Forward(k) => {
            let k = *k;
            (band.x_minus, band.x_plus, Box::new(move |x| 1.0 - k / model.fx(x)))
        }
        Claim::Custom(y) => (
            band.x_minus,
            band.x_plus,
            Box::new(move |x| y(x) / model.fx(x)),
        ),
    })
}

/// Coefficients by adaptive Gauss–Kronrod quadrature, split at the payoff
/// kink and into panels no longer than one oscillation of `ψ_n`.
pub fn coeffs_generic(claim: &Claim, eig: &EigenSystem, model: &ZoneModel) -> Result<CoefficientSet> {
    let (lo, hi, weight) = integrand(claim, model)?;
    let width = eig.band().width();
    let values = (0..=eig.n_max())
        .map(|n| {
            if hi <= lo {
                return Ok(0.0);
            }
            let panels = ((n as f64 * (hi - lo) / width).ceil() as usize).max(1) + 1;
            let breaks: Vec<f64> = (0..=panels)
                .map(|i| lo + (hi - lo) * i as f64 / panels as f64)
                .collect();
            let f = |x: f64| eig.psi(0, x) * eig.psi(n, x) * weight(x);
            Ok(quadrature::integrate_with_breaks(f, &breaks, COEFF_TOL)?.value)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoefficientSet {
        values,
        claim: claim.clone(),
        model: model.kind(),
    })
}

fn require_in_band(model: &ZoneModel, k: f64) -> Result<()> {
    let b = model.fx_band();
    if !b.contains(k) {
        return Err(Error::OutOfBand {
            value: k,
            lower: b.s_minus,
            upper: b.s_plus,
        });
    }
    Ok(())
}

/// Closed-form call coefficients for the cosine model.
pub fn coeffs_call_cos(k: f64, model: &ZoneModel, n_max: usize) -> Result<CoefficientSet> {
    if model.kind() != ModelKind::Cosine {
        return Err(invalid("model", "closed-form cosine coefficients need the cos model"));
    }
    require_in_band(model, k)?;
    let gamma = model.gamma();
    let s_mid = model.s_mid();
    let phi = ((s_mid / k - 1.0) / (SQRT_2 * gamma)).clamp(-1.0, 1.0).acos();
    let (sp, cp) = phi.sin_cos();
    let scale = gamma * k / (PI * s_mid);
    let values = (0..=n_max)
        .map(|n| match n {
            0 => SQRT_2 * scale * ((PI - phi) * cp + sp),
            1 => -scale * (PI - phi + sp * cp),
            _ => {
                let nf = n as f64;
                scale
                    * (((nf + 1.0) * phi).sin() / (nf + 1.0) + ((nf - 1.0) * phi).sin() / (nf - 1.0)
                        - 2.0 * cp * (nf * phi).sin() / nf)
            }
        })
        .collect();
    Ok(CoefficientSet {
        values,
        claim: Claim::Call(k),
        model: ModelKind::Cosine,
    })
}

/// `sin(d a)/a`, finite as `a → 0`.
fn sin_over(a: f64, d: f64) -> f64 {
    let t = a * d;
    if t.abs() < 1e-8 {
        d * (1.0 - t * t / 6.0)
    } else {
        t.sin() / a
    }
}

/// `(sin(a p + φ) - sin(a q + φ)) / a` without cancellation.
fn sin_diff_quot(a: f64, p: f64, q: f64, phase: f64) -> f64 {
    2.0 * (0.5 * a * (p + q) + phase).cos() * sin_over(a, 0.5 * (p - q))
}

/// `(cos(a p + φ) - cos(a q + φ)) / a` without cancellation.
fn cos_diff_quot(a: f64, p: f64, q: f64, phase: f64) -> f64 {
    -2.0 * (0.5 * a * (p + q) + phase).sin() * sin_over(a, 0.5 * (p - q))
}

/// Closed-form call coefficients for the tangent model.
pub fn coeffs_call_tan(k: f64, model: &ZoneModel, n_max: usize) -> Result<CoefficientSet> {
    let nu = model
        .nu()
        .ok_or_else(|| invalid("model", "closed-form tangent coefficients need the tan model"))?;
    let eig = eigen::tan_system(nu, model.band(), model.sigma(), n_max)?;
    coeffs_call_tan_with(k, model, &eig)
}

fn coeffs_call_tan_with(k: f64, model: &ZoneModel, eig: &EigenSystem) -> Result<CoefficientSet> {
    let nu = model
        .nu()
        .ok_or_else(|| invalid("model", "closed-form tangent coefficients need the tan model"))?;
    require_in_band(model, k)?;
    let l = model.band().width();
    let y = model.invert(k)? - model.band().x_minus;
    let gamma = model.gamma();
    let s_mid = model.s_mid();
    let moneyness = 1.0 - k / s_mid;
    let gk = gamma * k / s_mid;
    let lam = |n: usize| eig.lambda(n).expect("tan system");
    let amp = |n: usize| eig.amplitude(n).expect("tan system");
    let (a0, a1, l1) = (amp(0), amp(1), lam(1));

    let (top, lo_c) = (0.5 * l, y - 0.5 * l);
    let cterm = |a: f64| cos_diff_quot(a, top, lo_c, 0.0);
    let pair01 = cterm(l1 - nu) + cterm(l1 + nu);

    let mut values = Vec::with_capacity(eig.n_max() + 1);
    values.push(
        0.25 * a0 * a0 * moneyness * (2.0 * (l - y) + sin_diff_quot(nu, l, 2.0 * y - l, 0.0))
            - 0.5 * a0 * a1 * gk * pair01,
    );
    values.push(
        0.5 * a0 * a1 * moneyness * pair01
            - 0.25 * a1 * a1 * gk * (2.0 * (l - y) - sin_diff_quot(l1, l, 2.0 * y - l, 0.0)),
    );
    for n in 2..=eig.n_max() {
        let (ln, an) = (lam(n), amp(n));
        let phase = 0.5 * PI * n as f64;
        let sd = |a: f64| sin_diff_quot(a, top, lo_c, phase);
        let cd = |a: f64| cos_diff_quot(a, top, lo_c, phase);
        values.push(
            0.5 * a0 * an * moneyness * (sd(ln - nu) + sd(ln + nu))
                + 0.5 * a1 * an * gk * (cd(ln - l1) - cd(ln + l1)),
        );
    }
    Ok(CoefficientSet {
        values,
        claim: Claim::Call(k),
        model: ModelKind::Tangent,
    })
}

/// Bond coefficients `c_0 = 1/S_mid`, `c_1 = γ/S_mid`, `c_{n>1} = 0` for
/// ratio-form models.
fn bond_coeffs_closed(model: &ZoneModel, n_max: usize) -> CoefficientSet {
    let mut values = vec![0.0; n_max + 1];
    values[0] = 1.0 / model.s_mid();
    values[1] = model.gamma() / model.s_mid();
    CoefficientSet {
        values,
        claim: Claim::Bond,
        model: model.kind(),
    }
}

/// Evaluates the series at spot `spot` and time to maturity `tau`, truncated
/// where the remaining tail bound drops below `1e-10·S_mid`.
pub fn price_series(
    spot: f64,
    tau: f64,
    coeffs: &CoefficientSet,
    eig: &EigenSystem,
    model: &ZoneModel,
) -> Result<PriceResult> {
    if !(tau >= 0.0) {
        return Err(invalid("tau", format!("time to maturity must be non-negative, got {tau}")));
    }
    let x = model.invert(spot)?;
    let n_max = coeffs.n_max().min(eig.n_max());
    let mut basis = BasisValues::default();
    eig.evaluate(x, &mut basis);
    let psi0 = basis.psi[0];
    let fx = model.fx(x);

    let decay = |n: usize| (-eig.energy(n) * tau).exp();
    // bounds[n] = f · |c_n| sup|ψ_n| e^{-E_n τ} / ψ_0(x̂)
    let bounds: Vec<f64> = (0..=n_max)
        .map(|n| fx * coeffs.values[n].abs() * eig.sup_abs(n) * decay(n) / psi0)
        .collect();
    let beyond = if n_max >= 2 {
        let q = (-(eig.energy(n_max) - eig.energy(n_max - 1)) * tau).exp();
        if q < 1.0 {
            bounds[n_max] * q / (1.0 - q)
        } else {
            bounds[n_max]
        }
    } else {
        0.0
    };
    let mut suffix = vec![beyond; n_max + 1];
    for n in (0..n_max).rev() {
        suffix[n] = suffix[n + 1] + bounds[n + 1];
    }
    let target = TRUNCATION_TOL * model.s_mid();
    let n_used = (1..=n_max).find(|&n| suffix[n] < target).unwrap_or(n_max);

    let mut sum = coeffs.values[0];
    for n in 1..=n_used {
        sum += coeffs.values[n] * basis.psi[n] * decay(n) / psi0;
    }
    let tail_bound = suffix[n_used];
    let short_tenor_warning = (n_used == n_max && tail_bound > WARN_TAIL * model.s_mid())
        || eig.energy(n_max) * tau < SHORT_TENOR_EXPONENT;
    Ok(PriceResult {
        value: fx * sum,
        n_used,
        tail_bound,
        x_hat: x,
        short_tenor_warning,
    })
}

/// The series with exactly `terms + 1` terms (`c_0..=c_terms`), no
/// truncation logic. Term-by-term identities such as `∂_k call = -binary`
/// hold exactly for fixed-length sums.
pub fn series_value(
    spot: f64,
    tau: f64,
    coeffs: &CoefficientSet,
    terms: usize,
    eig: &EigenSystem,
    model: &ZoneModel,
) -> Result<f64> {
    check_tau(tau)?;
    let x = model.invert(spot)?;
    let terms = terms.min(coeffs.n_max()).min(eig.n_max());
    let mut basis = BasisValues::default();
    eig.evaluate(x, &mut basis);
    let sum: f64 = coeffs.values[1..=terms]
        .iter()
        .enumerate()
        .map(|(i, c)| c * basis.psi[i + 1] * (-eig.energy(i + 1) * tau).exp())
        .sum();
    Ok(model.fx(x) * (coeffs.values[0] + sum / basis.psi[0]))
}

/// Zero-coupon bond `P(t, T)`; closed form for ratio-form models.
pub fn bond_price(spot: f64, tau: f64, model: &ZoneModel, eig: &EigenSystem) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(invalid("tau", format!("time to maturity must be non-negative, got {tau}")));
    }
    match model.first_energy() {
        Some(e1) => {
            model.invert(spot)?;
            let m = spot / model.s_mid();
            Ok(m + (1.0 - m) * (-e1 * tau).exp())
        }
        None => Ok(price_series(spot, tau, &coeffs_generic(&Claim::Bond, eig, model)?, eig, model)?.value),
    }
}

/// A model together with its eigen-system, exposing prices for every claim
/// type with the strike-clamping policy applied.
#[derive(Debug, Clone)]
pub struct Pricer {
    model: ZoneModel,
    eig: EigenSystem,
}

impl Pricer {
    pub fn new(model: ZoneModel, n_max: usize) -> Result<Self> {
        let eig = model.eigen_system(n_max)?;
        Ok(Pricer { model, eig })
    }

    pub fn with_system(model: ZoneModel, eig: EigenSystem) -> Self {
        Pricer { model, eig }
    }

    pub fn model(&self) -> &ZoneModel {
        &self.model
    }

    pub fn eigen(&self) -> &EigenSystem {
        &self.eig
    }

    fn bond_coeffs(&self) -> Result<CoefficientSet> {
        if self.model.has_ratio_form() {
            Ok(bond_coeffs_closed(&self.model, self.eig.n_max()))
        } else {
            coeffs_generic(&Claim::Bond, &self.eig, &self.model)
        }
    }

    fn forward_coeffs(&self, k: f64) -> Result<CoefficientSet> {
        let mut c = self.bond_coeffs()?;
        c.values.iter_mut().for_each(|v| *v *= -k);
        c.values[0] += 1.0;
        c.claim = Claim::Forward(k);
        Ok(c)
    }

    fn call_coeffs(&self, k: f64) -> Result<CoefficientSet> {
        let fxb = self.model.fx_band();
        let k_in = k.clamp(fxb.s_minus, fxb.s_plus);
        if k >= fxb.s_plus {
            return Ok(CoefficientSet {
                values: vec![0.0; self.eig.n_max() + 1],
                claim: Claim::Call(k),
                model: self.model.kind(),
            });
        }
        if k <= fxb.s_minus {
            let mut c = self.forward_coeffs(k)?;
            c.claim = Claim::Call(k);
            return Ok(c);
        }
        match (self.model.kind(), self.eig.kind()) {
            (ModelKind::Cosine, SystemKind::Cosine) => coeffs_call_cos(k_in, &self.model, self.eig.n_max()),
            (ModelKind::Tangent, SystemKind::Tangent) => coeffs_call_tan_with(k_in, &self.model, &self.eig),
            _ => coeffs_generic(&Claim::Call(k), &self.eig, &self.model),
        }
    }

    /// Coefficients for `claim`, using closed forms where the model has them
    /// and put = call − forward at coefficient level.
    pub fn coefficients(&self, claim: &Claim) -> Result<CoefficientSet> {
        match claim {
            Claim::Call(k) => self.call_coeffs(*k),
            Claim::Put(k) => {
                let call = self.call_coeffs(*k)?;
                let fwd = self.forward_coeffs(*k)?;
                Ok(call.combine(&fwd, -1.0, claim.clone()))
            }
            Claim::Bond => self.bond_coeffs(),
            Claim::Forward(k) => self.forward_coeffs(*k),
            Claim::Binary(_) | Claim::Custom(_) => coeffs_generic(claim, &self.eig, &self.model),
        }
    }

    pub fn series(&self, spot: f64, tau: f64, coeffs: &CoefficientSet) -> Result<PriceResult> {
        price_series(spot, tau, coeffs, &self.eig, &self.model)
    }

    /// Price of `claim`. Strikes below `S_-` or above `S_+` bypass the
    /// coefficient integrals (the payoff is then linear or zero almost
    /// surely).
    pub fn price(&self, claim: &Claim, spot: f64, tau: f64) -> Result<PriceResult> {
        let fxb = self.model.fx_band();
        match claim {
            Claim::Call(k) if *k >= fxb.s_plus => self.zero(spot, tau),
            Claim::Call(k) if *k <= fxb.s_minus => self.forward(spot, *k, tau),
            Claim::Put(k) if *k <= fxb.s_minus => self.zero(spot, tau),
            Claim::Put(k) if *k >= fxb.s_plus => {
                let f = self.forward(spot, *k, tau)?;
                Ok(PriceResult { value: -f.value, ..f })
            }
            Claim::Put(k) => self.put(spot, *k, tau),
            Claim::Binary(k) if *k >= fxb.s_plus => self.zero(spot, tau),
            Claim::Binary(k) if *k <= fxb.s_minus => self.bond(spot, tau),
            Claim::Bond => self.bond(spot, tau),
            Claim::Forward(k) => self.forward(spot, *k, tau),
            _ => self.series(spot, tau, &self.coefficients(claim)?),
        }
    }

    fn zero(&self, spot: f64, tau: f64) -> Result<PriceResult> {
        check_tau(tau)?;
        Ok(PriceResult::exact(0.0, self.model.invert(spot)?))
    }

    pub fn call(&self, spot: f64, k: f64, tau: f64) -> Result<PriceResult> {
        self.price(&Claim::Call(k), spot, tau)
    }

    pub fn binary(&self, spot: f64, k: f64, tau: f64) -> Result<PriceResult> {
        self.price(&Claim::Binary(k), spot, tau)
    }

    pub fn bond(&self, spot: f64, tau: f64) -> Result<PriceResult> {
        check_tau(tau)?;
        if self.model.has_ratio_form() {
            let value = bond_price(spot, tau, &self.model, &self.eig)?;
            Ok(PriceResult {
                n_used: 1,
                ..PriceResult::exact(value, self.model.invert(spot)?)
            })
        } else {
            self.series(spot, tau, &self.bond_coeffs()?)
        }
    }

    /// `S_t - k P(t, T)`.
    pub fn forward(&self, spot: f64, k: f64, tau: f64) -> Result<PriceResult> {
        let bond = self.bond(spot, tau)?;
        Ok(PriceResult {
            value: spot - k * bond.value,
            tail_bound: k.abs() * bond.tail_bound,
            ..bond
        })
    }

    /// Call minus forward.
    pub fn put(&self, spot: f64, k: f64, tau: f64) -> Result<PriceResult> {
        let fxb = self.model.fx_band();
        if k <= fxb.s_minus || k >= fxb.s_plus {
            return self.price(&Claim::Put(k), spot, tau);
        }
        let call = self.call(spot, k, tau)?;
        let fwd = self.forward(spot, k, tau)?;
        Ok(PriceResult {
            value: call.value - fwd.value,
            tail_bound: call.tail_bound + fwd.tail_bound,
            ..call
        })
    }

    /// Replicating FX holding `∂V/∂S` for `claim`.
    pub fn delta(&self, claim: &Claim, spot: f64, tau: f64) -> Result<f64> {
        let x = self.model.invert(spot)?;
        let coeffs = self.coefficients(claim)?;
        crate::hedging::delta(x, tau, &coeffs, &self.eig, &self.model)
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0) {
        return Err(invalid("tau", format!("time to maturity must be non-negative, got {tau}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zone_model::Band;

    fn hkd_cos() -> ZoneModel {
        ZoneModel::cosine_from_band(7.75, 7.85, Band::with_width(1.0).unwrap(), 0.1).unwrap()
    }

    #[test]
    fn forward_payoff_gives_unit_ground_coefficient() {
        let m = hkd_cos();
        let eig = m.eigen_system(16).unwrap();
        let c = coeffs_generic(&Claim::Forward(0.0), &eig, &m).unwrap();
        assert!((c.values[0] - 1.0).abs() < 1e-12);
        assert!(c.values[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn bond_coefficients_match_ratio_form() {
        let m = hkd_cos();
        let eig = m.eigen_system(16).unwrap();
        let c = coeffs_generic(&Claim::Bond, &eig, &m).unwrap();
        assert!((c.values[0] - 1.0 / m.s_mid()).abs() < 1e-12);
        assert!((c.values[1] - m.gamma() / m.s_mid()).abs() < 1e-12);
        assert!(c.values[2..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn call_at_top_of_band_is_zero() {
        let m = hkd_cos();
        let eig = m.eigen_system(8).unwrap();
        let c = coeffs_generic(&Claim::Call(7.85), &eig, &m).unwrap();
        assert!(c.values.iter().all(|v| *v == 0.0));
        let cf = coeffs_call_cos(7.85, &m, 8).unwrap();
        assert!(cf.values.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn call_at_bottom_is_forward() {
        let m = hkd_cos();
        let c = coeffs_call_cos(m.fx_band().s_minus, &m, 4).unwrap();
        let a = SQRT_2 * m.gamma();
        assert!((c.values[0] - a / (1.0 + a)).abs() < 1e-14);
        assert!((c.values[0] - (1.0 - m.fx_band().s_minus / m.s_mid())).abs() < 1e-14);
    }

    #[test]
    fn call_at_mid_has_right_angle() {
        let m = hkd_cos();
        let c = coeffs_call_cos(m.s_mid(), &m, 2).unwrap();
        // φ* = π/2: c_0 = √2 γ k/(π S_mid) · 1
        let expect = SQRT_2 * m.gamma() / PI;
        assert!((c.values[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn negative_tau_rejected() {
        let m = hkd_cos();
        let p = Pricer::new(m, 8).unwrap();
        assert!(p.call(7.8, 7.8, -0.1).is_err());
        assert!(p.bond(7.8, -1.0).is_err());
    }

    #[test]
    fn out_of_band_spot_rejected() {
        let p = Pricer::new(hkd_cos(), 8).unwrap();
        assert!(matches!(p.call(7.9, 7.8, 0.1), Err(Error::OutOfBand { .. })));
    }

    #[test]
    fn difference_quotients_have_finite_limits() {
        let direct = ((1e-3f64 * 0.7 + 0.3).sin() - (1e-3f64 * 0.2 + 0.3).sin()) / 1e-3;
        assert!((sin_diff_quot(1e-3, 0.7, 0.2, 0.3) - direct).abs() < 1e-10);
        assert!((sin_diff_quot(0.0, 0.7, 0.2, 0.3) - 0.5 * 0.3f64.cos()).abs() < 1e-15);
        assert!((cos_diff_quot(0.0, 0.7, 0.2, 0.3) + 0.5 * 0.3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn deep_strikes_are_clamped() {
        let p = Pricer::new(hkd_cos(), 16).unwrap();
        let fwd = p.forward(7.8, 7.7, 0.5).unwrap().value;
        assert_eq!(p.call(7.8, 7.7, 0.5).unwrap().value, fwd);
        assert_eq!(p.call(7.8, 7.9, 0.5).unwrap().value, 0.0);
        assert_eq!(p.put(7.8, 7.7, 0.5).unwrap().value, 0.0);
        assert_eq!(p.binary(7.8, 7.7, 0.5).unwrap().value, p.bond(7.8, 0.5).unwrap().value);
    }
}
