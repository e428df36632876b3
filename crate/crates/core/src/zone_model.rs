//! The band, the FX mapping `S = f(X)` and the scalar fields derived from it.
//!
//! The state `X` diffuses with constant volatility `σ` and drift `μ(x)` on
//! `[x_-, x_+]` with reflecting edges. Everything downstream is expressed
//! through
//!
//! * `g = ln f`,
//! * `h = g' + μ/σ²`,
//! * the potential `U = h² + h'`,
//! * the differential short rate `r = μ g' + (σ²/2)(g'' + g'²)`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eigen::{self, check_nu, EigenSystem};
use crate::error::{invalid, Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Relative slack under which out-of-band inputs are clamped onto the edge.
const CLAMP_TOL: f64 = 1e-12;
/// Finite-difference step for custom mappings, as a fraction of the band width.
const FD_STEP: f64 = 1e-5;

/// State-space interval `[x_-, x_+]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub x_minus: f64,
    pub x_plus: f64,
}

impl Band {
    pub fn new(x_minus: f64, x_plus: f64) -> Result<Self> {
        if !(x_minus.is_finite() && x_plus.is_finite() && x_minus < x_plus) {
            return Err(invalid(
                "band",
                format!("need x_minus < x_plus, got [{x_minus}, {x_plus}]"),
            ));
        }
        Ok(Band { x_minus, x_plus })
    }

    /// `[0, length]`.
    pub fn with_width(length: f64) -> Result<Self> {
        Band::new(0.0, length)
    }

    pub fn width(&self) -> f64 {
        self.x_plus - self.x_minus
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.x_minus + self.x_plus)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_minus && x <= self.x_plus
    }

    /// Returns `x` if inside, the nearest edge if outside by at most
    /// `1e-12·L`, and an error otherwise.
    pub fn clamp(&self, x: f64) -> Result<f64> {
        let slack = CLAMP_TOL * self.width();
        if x >= self.x_minus - slack && x <= self.x_plus + slack {
            Ok(x.clamp(self.x_minus, self.x_plus))
        } else {
            Err(Error::OutOfDomain {
                x,
                lower: self.x_minus,
                upper: self.x_plus,
            })
        }
    }

    /// `n` equally spaced points including both edges.
    pub fn grid(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let step = self.width() / (n - 1) as f64;
        (0..n).map(move |i| {
            if i == n - 1 {
                self.x_plus
            } else {
                self.x_minus + i as f64 * step
            }
        })
    }
}

/// FX band `S_- < S_mid < S_+` in quote units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FxBand {
    pub s_minus: f64,
    pub s_mid: f64,
    pub s_plus: f64,
}

impl FxBand {
    pub fn new(s_minus: f64, s_mid: f64, s_plus: f64) -> Result<Self> {
        if !(0.0 < s_minus && s_minus < s_mid && s_mid < s_plus && s_plus.is_finite()) {
            return Err(invalid(
                "fx band",
                format!("need 0 < S- < S_mid < S+, got ({s_minus}, {s_mid}, {s_plus})"),
            ));
        }
        Ok(FxBand {
            s_minus,
            s_mid,
            s_plus,
        })
    }

    pub fn contains(&self, s: f64) -> bool {
        s >= self.s_minus && s <= self.s_plus
    }
}

/// Solves `S± = S_mid / (1 ∓ r·γ)` for `(S_mid, γ)`: `S_mid` is the harmonic
/// mean of the edges and `γ = (S+ - S-) / (r (S+ + S-))`. The cosine model has
/// `r = √2`.
pub fn fit_ratio_band(s_minus: f64, s_plus: f64, edge_ratio: f64) -> Result<(f64, f64)> {
    if !(0.0 < s_minus && s_minus < s_plus && s_plus.is_finite()) {
        return Err(invalid(
            "band",
            format!("need 0 < S- < S+, got [{s_minus}, {s_plus}]"),
        ));
    }
    let s_mid = 2.0 * s_minus * s_plus / (s_minus + s_plus);
    let gamma = (s_plus - s_minus) / (edge_ratio * (s_plus + s_minus));
    Ok((s_mid, gamma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "cos")]
    Cosine,
    #[serde(rename = "tan")]
    Tangent,
    #[serde(rename = "quartic")]
    Quartic,
    #[serde(rename = "custom")]
    Custom,
}

#[derive(Clone, Copy, Debug)]
struct TanShape {
    nu: f64,
    lambda1: f64,
    // -a_1 / a_0, so that ψ1/ψ0 = ratio_scale · sin(λ1 z) / cos(ν z)
    ratio_scale: f64,
}

#[derive(Clone)]
enum Shape {
    Cosine,
    Tangent(TanShape),
    Quartic { s_minus: f64 },
    Custom { fx: ScalarFn, drift: ScalarFn },
}

/// Target-zone model: band, volatility, drift and FX mapping.
///
/// Values are immutable once built and cheap to clone.
#[derive(Clone)]
pub struct ZoneModel {
    kind: ModelKind,
    band: Band,
    sigma: f64,
    gamma: f64,
    nu: f64,
    s_mid: f64,
    fx_band: FxBand,
    shape: Shape,
}

impl std::fmt::Debug for ZoneModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ZoneModel")
            .field("kind", &self.kind)
            .field("band", &self.band)
            .field("sigma", &self.sigma)
            .field("gamma", &self.gamma)
            .field("nu", &self.nu)
            .field("fx_band", &self.fx_band)
            .finish()
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    Ok(())
}

fn check_ratio_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && SQRT_2 * gamma < 1.0) {
        return Err(invalid(
            "gamma",
            format!("need 0 < sqrt(2)·gamma < 1, got gamma = {gamma}"),
        ));
    }
    Ok(())
}

impl ZoneModel {
    /// Vanishing-potential model `f = S_mid [1 + √2 γ cos(π y/L)]^{-1}`,
    /// `μ = -σ² g'`.
    pub fn cosine(s_mid: f64, gamma: f64, band: Band, sigma: f64) -> Result<Self> {
        check_ratio_gamma(gamma)?;
        check_sigma(sigma)?;
        if !(s_mid > 0.0 && s_mid.is_finite()) {
            return Err(invalid("s_mid", "must be positive"));
        }
        let a = SQRT_2 * gamma;
        let fx_band = FxBand::new(s_mid / (1.0 + a), s_mid, s_mid / (1.0 - a))?;
        Ok(ZoneModel {
            kind: ModelKind::Cosine,
            band,
            sigma,
            gamma,
            nu: 0.0,
            s_mid,
            fx_band,
            shape: Shape::Cosine,
        })
    }

    /// Cosine model whose edges are the quoted band `[s_minus, s_plus]`.
    pub fn cosine_from_band(s_minus: f64, s_plus: f64, band: Band, sigma: f64) -> Result<Self> {
        let (s_mid, gamma) = fit_ratio_band(s_minus, s_plus, SQRT_2)?;
        ZoneModel::cosine(s_mid, gamma, band, sigma)
    }

    /// Constant-potential model, `h = -ν tan(ν(x - L/2))`, `U ≡ -ν²`, with
    /// `f = S_mid [1 + γ ψ1/ψ0]^{-1}` and `μ = σ² (h - g')`.
    pub fn tangent(s_mid: f64, gamma: f64, nu: f64, band: Band, sigma: f64) -> Result<Self> {
        check_ratio_gamma(gamma)?;
        check_sigma(sigma)?;
        if !(s_mid > 0.0 && s_mid.is_finite()) {
            return Err(invalid("s_mid", "must be positive"));
        }
        let shape = tan_shape(nu, band.width())?;
        let edge = tan_edge_ratio(&shape, band.width());
        let lower = 1.0 + gamma * edge;
        let upper = 1.0 - gamma * edge;
        if !(upper > 0.0) {
            return Err(invalid(
                "gamma",
                format!("1 + gamma·psi1/psi0 not positive on the band (gamma = {gamma})"),
            ));
        }
        let fx_band = FxBand::new(s_mid / lower, s_mid, s_mid / upper)?;
        let model = ZoneModel {
            kind: ModelKind::Tangent,
            band,
            sigma,
            gamma,
            nu,
            s_mid,
            fx_band,
            shape: Shape::Tangent(shape),
        };
        model.check_monotone()?;
        Ok(model)
    }

    /// Tangent model fitted to the quoted band `[s_minus, s_plus]`.
    pub fn tangent_from_band(
        s_minus: f64,
        s_plus: f64,
        nu: f64,
        band: Band,
        sigma: f64,
    ) -> Result<Self> {
        let shape = tan_shape(nu, band.width())?;
        let (s_mid, gamma) = fit_ratio_band(s_minus, s_plus, tan_edge_ratio(&shape, band.width()))?;
        ZoneModel::tangent(s_mid, gamma, nu, band, sigma)
    }

    /// Driftless model `g = γ(3t² - 2t³) + ln S_-`, `t = (x - x_-)/L`.
    pub fn quartic(gamma: f64, s_minus: f64, band: Band, sigma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid("gamma", format!("must be positive, got {gamma}")));
        }
        if !(s_minus > 0.0 && s_minus.is_finite()) {
            return Err(invalid("s_minus", "must be positive"));
        }
        check_sigma(sigma)?;
        let s_mid = s_minus * (0.5 * gamma).exp();
        let fx_band = FxBand::new(s_minus, s_mid, s_minus * gamma.exp())?;
        Ok(ZoneModel {
            kind: ModelKind::Quartic,
            band,
            sigma,
            gamma,
            nu: 0.0,
            s_mid,
            fx_band,
            shape: Shape::Quartic { s_minus },
        })
    }

    /// Quartic model with `S± ` equal to the quoted band.
    pub fn quartic_from_band(s_minus: f64, s_plus: f64, band: Band, sigma: f64) -> Result<Self> {
        if !(0.0 < s_minus && s_minus < s_plus) {
            return Err(invalid("band", "need 0 < S- < S+"));
        }
        ZoneModel::quartic((s_plus / s_minus).ln(), s_minus, band, sigma)
    }

    /// User-supplied mapping `f` and drift `μ`. Derivatives are taken by
    /// five-point finite differences with step `1e-5·L`. The mapping must be
    /// positive, strictly increasing and flat at both edges.
    pub fn custom(fx: ScalarFn, drift: ScalarFn, band: Band, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        let s_minus = fx(band.x_minus);
        let s_plus = fx(band.x_plus);
        let s_mid = fx(band.mid());
        let fx_band = FxBand::new(s_minus, s_mid, s_plus)?;
        let model = ZoneModel {
            kind: ModelKind::Custom,
            band,
            sigma,
            gamma: 0.0,
            nu: 0.0,
            s_mid,
            fx_band,
            shape: Shape::Custom { fx, drift },
        };
        model.check_monotone()?;
        let scale = s_mid / band.width();
        for x in [band.x_minus, band.x_plus] {
            let slope = model.fx_d1(x);
            if slope.abs() > 1e-6 * scale {
                return Err(invalid(
                    "fx",
                    format!("f'({x}) = {slope:e}; reflecting edges need f' = 0"),
                ));
            }
        }
        Ok(model)
    }

    fn check_monotone(&self) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for x in self.band.grid(1001) {
            let v = self.fx(x);
            if !(v > 0.0) || v <= prev {
                return Err(invalid(
                    "fx",
                    format!("f must be positive and strictly increasing; fails at x = {x}"),
                ));
            }
            prev = v;
        }
        Ok(())
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn band(&self) -> Band {
        self.band
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn nu(&self) -> Option<f64> {
        match self.shape {
            Shape::Tangent(t) => Some(t.nu),
            _ => None,
        }
    }

    pub fn s_mid(&self) -> f64 {
        self.s_mid
    }

    pub fn fx_band(&self) -> FxBand {
        self.fx_band
    }

    /// True when `f = S_mid [1 + γ ψ1/ψ0]^{-1}` for the model's own ψ0, ψ1,
    /// which unlocks the closed-form bond and short rate.
    pub fn has_ratio_form(&self) -> bool {
        matches!(self.shape, Shape::Cosine | Shape::Tangent(_))
    }

    /// First excited energy `E_1` for ratio-form models.
    pub fn first_energy(&self) -> Option<f64> {
        let l = self.band.width();
        let s2 = self.sigma * self.sigma;
        match self.shape {
            Shape::Cosine => Some(PI * PI * s2 / (2.0 * l * l)),
            Shape::Tangent(t) => Some(0.5 * s2 * (t.lambda1 * t.lambda1 - t.nu * t.nu)),
            _ => None,
        }
    }

    /// Eigen-system matching this model: analytic for cosine and tangent,
    /// finite differences otherwise.
    pub fn eigen_system(&self, n_max: usize) -> Result<EigenSystem> {
        match &self.shape {
            Shape::Cosine => eigen::cos_system(self.band, self.sigma, n_max),
            Shape::Tangent(t) => eigen::tan_system(t.nu, self.band, self.sigma, n_max),
            _ => self.numeric_eigen_system(n_max, eigen::DEFAULT_GRID_POINTS.max(16 * (n_max + 1) + 1)),
        }
    }

    /// Finite-difference eigen-system for any kind.
    pub fn numeric_eigen_system(&self, n_max: usize, grid_points: usize) -> Result<EigenSystem> {
        let model = self.clone();
        let potential: ScalarFn = Arc::new(move |x| model.potential(x));
        eigen::numeric_system(
            potential,
            self.h(self.band.x_minus),
            self.h(self.band.x_plus),
            self.band,
            self.sigma,
            n_max,
            grid_points | 1,
        )
    }

    fn offset(&self, x: f64) -> f64 {
        x - self.band.x_minus
    }

    /// `ψ1/ψ0` and its first two derivatives for ratio-form models.
    fn ratio(&self, x: f64) -> (f64, f64, f64) {
        let l = self.band.width();
        let y = self.offset(x);
        match self.shape {
            Shape::Cosine => {
                let k = PI / l;
                let (s, c) = (k * y).sin_cos();
                (SQRT_2 * c, -SQRT_2 * k * s, -SQRT_2 * k * k * c)
            }
            Shape::Tangent(t) => {
                let z = y - 0.5 * l;
                let (s, c) = (t.lambda1 * z).sin_cos();
                let (sn, cn) = (t.nu * z).sin_cos();
                let tn = sn / cn;
                let k = t.ratio_scale;
                let num = t.lambda1 * c + t.nu * s * tn;
                let dnum = -t.lambda1 * t.lambda1 * s
                    + t.nu * t.lambda1 * c * tn
                    + t.nu * t.nu * s * (1.0 + tn * tn);
                (k * s / cn, k * num / cn, k * (dnum + t.nu * tn * num) / cn)
            }
            _ => unreachable!("ratio() only for ratio-form models"),
        }
    }

    /// `(g, g', g'')`.
    fn log_fx_jet(&self, x: f64) -> (f64, f64, f64) {
        match &self.shape {
            Shape::Cosine | Shape::Tangent(_) => {
                let (r, r1, r2) = self.ratio(x);
                let q = 1.0 + self.gamma * r;
                let g1 = -self.gamma * r1 / q;
                let g2 = -self.gamma * r2 / q + g1 * g1;
                (self.s_mid.ln() - q.ln(), g1, g2)
            }
            Shape::Quartic { s_minus } => {
                let l = self.band.width();
                let t = self.offset(x) / l;
                let g = self.gamma * (3.0 * t * t - 2.0 * t * t * t) + s_minus.ln();
                let g1 = 6.0 * self.gamma * t * (1.0 - t) / l;
                let g2 = 6.0 * self.gamma * (1.0 - 2.0 * t) / (l * l);
                (g, g1, g2)
            }
            Shape::Custom { fx, .. } => {
                let (f0, f1, f2) = self.finite_jet(&**fx, x);
                let g1 = f1 / f0;
                (f0.ln(), g1, f2 / f0 - g1 * g1)
            }
        }
    }

    /// Value, first and second derivative by five-point stencils, one-sided
    /// within two steps of an edge.
    fn finite_jet(&self, func: &dyn Fn(f64) -> f64, x: f64) -> (f64, f64, f64) {
        let h = FD_STEP * self.band.width();
        let f0 = func(x);
        if x - 2.0 * h < self.band.x_minus || x + 2.0 * h > self.band.x_plus {
            let dir = if x - 2.0 * h < self.band.x_minus { 1.0 } else { -1.0 };
            let p = |k: f64| func(x + dir * k * h);
            let (p1, p2, p3, p4) = (p(1.0), p(2.0), p(3.0), p(4.0));
            let d1 = dir * (-25.0 * f0 + 48.0 * p1 - 36.0 * p2 + 16.0 * p3 - 3.0 * p4) / (12.0 * h);
            let d2 = (35.0 * f0 - 104.0 * p1 + 114.0 * p2 - 56.0 * p3 + 11.0 * p4) / (12.0 * h * h);
            (f0, d1, d2)
        } else {
            let (m2, m1, p1, p2) = (func(x - 2.0 * h), func(x - h), func(x + h), func(x + 2.0 * h));
            let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
            let d2 = (-m2 + 16.0 * m1 - 30.0 * f0 + 16.0 * p1 - p2) / (12.0 * h * h);
            (f0, d1, d2)
        }
    }

    /// FX rate `f(x)`.
    pub fn fx(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Cosine | Shape::Tangent(_) => self.s_mid / (1.0 + self.gamma * self.ratio(x).0),
            Shape::Custom { fx, .. } => fx(x),
            Shape::Quartic { .. } => self.log_fx_jet(x).0.exp(),
        }
    }

    pub fn fx_d1(&self, x: f64) -> f64 {
        self.fx(x) * self.log_fx_d1(x)
    }

    pub fn fx_d2(&self, x: f64) -> f64 {
        let (_, g1, g2) = self.log_fx_jet(x);
        self.fx(x) * (g2 + g1 * g1)
    }

    pub fn log_fx(&self, x: f64) -> f64 {
        self.fx(x).ln()
    }

    pub fn log_fx_d1(&self, x: f64) -> f64 {
        self.log_fx_jet(x).1
    }

    pub fn log_fx_d2(&self, x: f64) -> f64 {
        self.log_fx_jet(x).2
    }

    /// Drift `μ(x)` of the state.
    pub fn drift(&self, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        match &self.shape {
            Shape::Cosine => -s2 * self.log_fx_d1(x),
            Shape::Tangent(_) => s2 * (self.h(x) - self.log_fx_d1(x)),
            Shape::Quartic { .. } => 0.0,
            Shape::Custom { drift, .. } => drift(x),
        }
    }

    /// `h = g' + μ/σ²`.
    pub fn h(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Cosine => 0.0,
            Shape::Tangent(t) => {
                let z = self.offset(x) - 0.5 * self.band.width();
                -t.nu * (t.nu * z).tan()
            }
            Shape::Quartic { .. } => self.log_fx_d1(x),
            Shape::Custom { drift, .. } => self.log_fx_d1(x) + drift(x) / (self.sigma * self.sigma),
        }
    }

    pub fn h_d1(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Cosine => 0.0,
            Shape::Tangent(t) => {
                let z = self.offset(x) - 0.5 * self.band.width();
                let tn = (t.nu * z).tan();
                -t.nu * t.nu * (1.0 + tn * tn)
            }
            Shape::Quartic { .. } => self.log_fx_d2(x),
            Shape::Custom { drift, .. } => {
                let dmu = self.finite_jet(&**drift, x).1;
                self.log_fx_d2(x) + dmu / (self.sigma * self.sigma)
            }
        }
    }

    /// Potential `U = h² + h'`.
    pub fn potential(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Cosine => 0.0,
            Shape::Tangent(t) => -t.nu * t.nu,
            _ => {
                let h = self.h(x);
                h * h + self.h_d1(x)
            }
        }
    }

    /// Lognormal FX volatility shape `p = g' = f'/f`.
    pub fn local_vol(&self, x: f64) -> Result<f64> {
        let x = self.band.clamp(x)?;
        Ok(self.log_fx_d1(x))
    }

    /// Maximum of `p` over the band (dense scan refined by golden section).
    pub fn local_vol_max(&self) -> f64 {
        let n = 2001;
        let xs: Vec<f64> = self.band.grid(n).collect();
        let (imax, _) = xs
            .iter()
            .map(|&x| self.log_fx_d1(x))
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        let mut a = xs[imax.saturating_sub(1)];
        let mut b = xs[(imax + 1).min(n - 1)];
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - phi * (b - a);
            let d = a + phi * (b - a);
            if self.log_fx_d1(c) > self.log_fx_d1(d) {
                b = d;
            } else {
                a = c;
            }
        }
        self.log_fx_d1(0.5 * (a + b))
    }

    /// Differential short rate `r = μ g' + (σ²/2)(g'' + g'²)`.
    pub fn short_rate(&self, x: f64) -> Result<f64> {
        let x = self.band.clamp(x)?;
        Ok(self.short_rate_unchecked(x))
    }

    pub(crate) fn short_rate_unchecked(&self, x: f64) -> f64 {
        let (_, g1, g2) = self.log_fx_jet(x);
        self.drift(x) * g1 + 0.5 * self.sigma * self.sigma * (g2 + g1 * g1)
    }

    /// `E_1 (1 - f(x)/S_mid)`, valid for ratio-form models only.
    pub fn short_rate_closed(&self, x: f64) -> Option<f64> {
        let e1 = self.first_energy()?;
        Some(e1 * (1.0 - self.fx(x) / self.s_mid))
    }

    /// State `x` with `f(x) = s`.
    pub fn invert(&self, s: f64) -> Result<f64> {
        let FxBand {
            s_minus, s_plus, ..
        } = self.fx_band;
        let slack = CLAMP_TOL * self.s_mid;
        if !(s >= s_minus - slack && s <= s_plus + slack) {
            return Err(Error::OutOfBand {
                value: s,
                lower: s_minus,
                upper: s_plus,
            });
        }
        if s <= s_minus {
            return Ok(self.band.x_minus);
        }
        if s >= s_plus {
            return Ok(self.band.x_plus);
        }
        if let Shape::Cosine = self.shape {
            let arg = ((self.s_mid / s - 1.0) / (SQRT_2 * self.gamma)).clamp(-1.0, 1.0);
            return Ok(self.band.x_minus + self.band.width() / PI * arg.acos());
        }
        let (mut lo, mut hi) = (self.band.x_minus, self.band.x_plus);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.fx(mid) < s {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (flo, fhi) = (self.fx(lo), self.fx(hi));
        Ok(if (flo - s).abs() <= (fhi - s).abs() { lo } else { hi })
    }

    /// Parameters as the JSON configuration block.
    pub fn config(&self) -> ModelConfig {
        ModelConfig {
            kind: self.kind,
            s_mid: self.s_mid,
            gamma: self.gamma,
            nu: self.nu(),
            sigma: self.sigma,
            x_minus: Some(self.band.x_minus),
            x_plus: Some(self.band.x_plus),
        }
    }
}

fn tan_shape(nu: f64, length: f64) -> Result<TanShape> {
    check_nu(nu, length)?;
    let lambda1 = eigen::tan_lambda(1, nu, length, 1e-14)?;
    let a0 = eigen::tan_amplitude(0, nu, length);
    let a1 = eigen::tan_amplitude(1, lambda1, length);
    Ok(TanShape {
        nu,
        lambda1,
        ratio_scale: -a1 / a0,
    })
}

/// `ψ1/ψ0` at the lower edge; the ratio is odd about the band centre.
fn tan_edge_ratio(shape: &TanShape, length: f64) -> f64 {
    let z = -0.5 * length;
    shape.ratio_scale * (shape.lambda1 * z).sin() / (shape.nu * z).cos()
}

/// Uncovered-interest-parity rate `μ + σ²/2` of the unbounded lognormal
/// FX rate `S = e^X`.
pub fn uip_rate(mu: f64, sigma: f64) -> f64 {
    mu + 0.5 * sigma * sigma
}

/// JSON model block. `x_minus`/`x_plus` default to `0` and `1`. For the
/// quartic kind `s_mid` is the centre rate `f(L/2) = S_- e^{γ/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub s_mid: f64,
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    pub sigma: f64,
    #[serde(default)]
    pub x_minus: Option<f64>,
    #[serde(default)]
    pub x_plus: Option<f64>,
}

impl ModelConfig {
    pub fn band(&self) -> Result<Band> {
        Band::new(self.x_minus.unwrap_or(0.0), self.x_plus.unwrap_or(1.0))
    }

    pub fn build(&self) -> Result<ZoneModel> {
        let band = self.band()?;
        match self.kind {
            ModelKind::Cosine => ZoneModel::cosine(self.s_mid, self.gamma, band, self.sigma),
            ModelKind::Tangent => {
                let nu = self
                    .nu
                    .ok_or_else(|| invalid("nu", "required for the tan model"))?;
                ZoneModel::tangent(self.s_mid, self.gamma, nu, band, self.sigma)
            }
            ModelKind::Quartic => ZoneModel::quartic(
                self.gamma,
                self.s_mid * (-0.5 * self.gamma).exp(),
                band,
                self.sigma,
            ),
            ModelKind::Custom => Err(invalid(
                "kind",
                "custom mappings are closures and must be built through the library API",
            )),
        }
    }
}

impl std::str::FromStr for ModelConfig {
    type Err = serde_json::Error;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Band {
        Band::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn cosine_band_fit_hkd() {
        let m = ZoneModel::cosine_from_band(7.75, 7.85, unit(), 0.1).unwrap();
        assert!((m.s_mid() - 7.799_679_487_179_487).abs() < 1e-12);
        assert!((m.gamma() - 0.004_532_735_776_836_843).abs() < 1e-12);
        assert!((m.fx(0.0) - 7.75).abs() < 1e-12);
        assert!((m.fx(1.0) - 7.85).abs() < 1e-12);
        assert!((m.fx(0.5) - m.s_mid()).abs() < 1e-12);
    }

    #[test]
    fn cosine_rejects_bad_gamma_and_sigma() {
        assert!(ZoneModel::cosine(7.8, 0.0, unit(), 0.1).is_err());
        assert!(ZoneModel::cosine(7.8, 1.0 / SQRT_2, unit(), 0.1).is_err());
        assert!(ZoneModel::cosine(7.8, 0.004, unit(), 0.0).is_err());
    }

    #[test]
    fn tan_rejects_nu_at_pi_over_l() {
        assert!(ZoneModel::tangent(7.8, 0.004, PI, unit(), 0.1).is_err());
        assert!(ZoneModel::tangent(7.8, 0.004, 0.0, unit(), 0.1).is_err());
    }

    #[test]
    fn tan_h_vanishes_mid_band() {
        let m = ZoneModel::tangent(7.8, 0.004, 2.0, unit(), 0.1).unwrap();
        assert_eq!(m.h(0.5), 0.0);
    }

    #[test]
    fn quartic_basics() {
        let m = ZoneModel::quartic(0.0128, 7.75, unit(), 0.1).unwrap();
        assert!(m.log_fx_d1(0.0).abs() < 1e-15 && m.log_fx_d1(1.0).abs() < 1e-15);
        assert!((m.fx(1.0) / m.fx(0.0) - 0.0128f64.exp()).abs() < 1e-14);
        assert!((m.potential(0.0) - 6.0 * 0.0128).abs() < 1e-14);
        assert!(ZoneModel::quartic(0.0, 7.75, unit(), 0.1).is_err());
    }

    #[test]
    fn invert_edges_and_out_of_band() {
        let m = ZoneModel::cosine_from_band(7.75, 7.85, unit(), 0.1).unwrap();
        assert_eq!(m.invert(7.75).unwrap(), 0.0);
        assert!((m.invert(m.s_mid()).unwrap() - 0.5).abs() < 1e-15);
        match m.invert(7.9).unwrap_err() {
            Error::OutOfBand { upper, .. } => assert!((upper - 7.85).abs() < 1e-12),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn uip() {
        assert!((uip_rate(0.0, 0.2) - 0.02).abs() < 1e-16);
        assert!((uip_rate(0.02, 0.1) - 0.025).abs() < 1e-15);
        assert!(uip_rate(-0.005, 0.1).abs() < 1e-18);
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let err = serde_json::from_str::<ModelConfig>(
            r#"{"kind":"cos","s_mid":7.8,"gamma":0.004,"sigma":0.1,"foo":1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("unknown field"));
    }

    #[test]
    fn config_round_trip() {
        let m = ZoneModel::tangent(7.8, 0.004, 2.0, unit(), 0.1).unwrap();
        let json = serde_json::to_string(&m.config()).unwrap();
        let back: ModelConfig = json.parse().unwrap();
        let m2 = back.build().unwrap();
        assert_eq!(m2.fx(0.3), m.fx(0.3));
    }

    #[test]
    fn custom_must_be_flat_at_edges() {
        let linear: ScalarFn = Arc::new(|x| 7.8 + 0.1 * x);
        let zero: ScalarFn = Arc::new(|_| 0.0);
        assert!(ZoneModel::custom(linear, zero, unit(), 0.1).is_err());
    }
}
