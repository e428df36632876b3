//! Browser demo: strike curves, FX profiles and reflected-diffusion densities.
//!
//! The plain functions below return flat `f64` buffers so they can be tested
//! natively; the `wasm` module wraps them for JavaScript.

use tzo_core::robin::{self, RobinDensityParams};
use tzo_core::{Band, Pricer, ZoneModel};

/// Builds a model on the unit state band from an FX band fit.
pub fn fit_model(kind: &str, s_minus: f64, s_plus: f64, sigma: f64, nu: f64) -> Result<ZoneModel, String> {
    let band = Band::with_width(1.0).map_err(|e| e.to_string())?;
    match kind {
        "cos" => ZoneModel::cosine_from_band(s_minus, s_plus, band, sigma),
        "tan" => ZoneModel::tangent_from_band(s_minus, s_plus, nu, band, sigma),
        "quartic" => ZoneModel::quartic_from_band(s_minus, s_plus, band, sigma),
        other => return Err(format!("unknown model kind `{other}` (cos, tan, quartic)")),
    }
    .map_err(|e| e.to_string())
}

/// Rows `[strike, call, put, binary, bond]` for `points` strikes across the band.
#[allow(clippy::too_many_arguments)]
pub fn strike_curve(
    kind: &str,
    s_minus: f64,
    s_plus: f64,
    sigma: f64,
    nu: f64,
    spot: f64,
    tenor: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let model = fit_model(kind, s_minus, s_plus, sigma, nu)?;
    let b = model.fx_band();
    let pricer = Pricer::new(model, 64).map_err(|e| e.to_string())?;
    let bond = pricer.bond(spot, tenor).map_err(|e| e.to_string())?.value;
    let points = points.max(2);
    let mut out = Vec::with_capacity(5 * points);
    for i in 0..points {
        let k = b.s_minus + (b.s_plus - b.s_minus) * i as f64 / (points - 1) as f64;
        let call = pricer.call(spot, k, tenor).map_err(|e| e.to_string())?.value;
        let put = pricer.put(spot, k, tenor).map_err(|e| e.to_string())?.value;
        let binary = pricer.binary(spot, k, tenor).map_err(|e| e.to_string())?.value;
        out.extend([k, call, put, binary, bond]);
    }
    Ok(out)
}

/// Rows `[x, S, p/p_max, r]` across the state band.
pub fn fx_profile(kind: &str, s_minus: f64, s_plus: f64, sigma: f64, nu: f64, points: usize) -> Result<Vec<f64>, String> {
    let model = fit_model(kind, s_minus, s_plus, sigma, nu)?;
    let pmax = model.local_vol_max();
    let mut out = Vec::with_capacity(4 * points);
    for x in model.band().grid(points.max(2)) {
        let p = model.local_vol(x).map_err(|e| e.to_string())?;
        let r = model.short_rate(x).map_err(|e| e.to_string())?;
        out.extend([x, model.fx(x), p / pmax, r]);
    }
    Ok(out)
}

/// Rows `[x', P(x, x', τ)]` for the Robin-boundary transition density.
pub fn density_curve(
    mu: f64,
    sigma: f64,
    rho: f64,
    length: f64,
    x: f64,
    tau: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    let params = RobinDensityParams::new(mu, sigma, rho, length).map_err(|e| e.to_string())?;
    let n = points.max(2);
    let grid: Vec<f64> = (0..n).map(|i| length * i as f64 / (n - 1) as f64).collect();
    let values = robin::density_curve(x, tau, &params, &grid).map_err(|e| e.to_string())?;
    Ok(grid.iter().zip(&values).flat_map(|(&y, &p)| [y, p]).collect())
}

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::*;

    fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
        r.map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = strikeCurve)]
    #[allow(clippy::too_many_arguments)]
    pub fn strike_curve(
        kind: &str,
        s_minus: f64,
        s_plus: f64,
        sigma: f64,
        nu: f64,
        spot: f64,
        tenor: f64,
        points: usize,
    ) -> Result<Vec<f64>, JsError> {
        js(super::strike_curve(kind, s_minus, s_plus, sigma, nu, spot, tenor, points))
    }

    #[wasm_bindgen(js_name = fxProfile)]
    pub fn fx_profile(kind: &str, s_minus: f64, s_plus: f64, sigma: f64, nu: f64, points: usize) -> Result<Vec<f64>, JsError> {
        js(super::fx_profile(kind, s_minus, s_plus, sigma, nu, points))
    }

    #[wasm_bindgen(js_name = densityCurve)]
    pub fn density_curve(
        mu: f64,
        sigma: f64,
        rho: f64,
        length: f64,
        x: f64,
        tau: f64,
        points: usize,
    ) -> Result<Vec<f64>, JsError> {
        js(super::density_curve(mu, sigma, rho, length, x, tau, points))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strike_curve_rows_satisfy_parity() {
        let rows = strike_curve("cos", 7.75, 7.85, 0.1, 0.0, 7.8, 0.5, 11).unwrap();
        assert_eq!(rows.len(), 55);
        for r in rows.chunks(5) {
            let [k, call, put, _, bond] = r else { unreachable!() };
            assert!((call - put - (7.8 - k * bond)).abs() < 1e-12);
        }
    }

    #[test]
    fn fx_profile_spans_band() {
        let rows = fx_profile("tan", 7.75, 7.85, 0.1, 2.0, 21).unwrap();
        assert!((rows[1] - 7.75).abs() < 1e-9);
        assert!((rows[rows.len() - 3] - 7.85).abs() < 1e-9);
        assert!(rows.chunks(4).all(|r| r[2] <= 1.0 + 1e-12));
    }

    #[test]
    fn density_curve_is_nonnegative() {
        let rows = density_curve(0.05, 0.3, 0.0, 1.0, 0.4, 0.5, 41).unwrap();
        assert!(rows.chunks(2).all(|r| r[1] >= 0.0));
    }

    #[test]
    fn unknown_kind_is_reported() {
        assert!(fit_model("sin", 7.75, 7.85, 0.1, 0.0).unwrap_err().contains("sin"));
    }
}
