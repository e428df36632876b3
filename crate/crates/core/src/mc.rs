//! Monte Carlo oracle: reflected Euler paths of `dX = μ dt + σ dW` on the
//! band, discounted by `exp(-∫ r(X) dt)`.
//!
//! Every path draws from its own ChaCha stream keyed by `(seed, path index)`
//! and paths are reduced in fixed-size chunks combined in index order, so
//! estimates do not depend on how many workers ran them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::pricing::{Claim, CoefficientSet, Pricer};
use crate::zone_model::{Band, ZoneModel};

/// Paths per reduction chunk; fixed so sums are scheduling-independent.
const CHUNK: usize = 1024;
/// Nodes of the drift/rate tables used on the hot path.
const TABLE_NODES: usize = 8193;

/// State dynamics seen by the simulator.
pub trait Diffusion: Sync {
    fn band(&self) -> Band;
    fn sigma(&self) -> f64;
    fn drift(&self, x: f64) -> f64;
    /// Short rate used for discounting.
    fn rate(&self, x: f64) -> f64;

    /// Drift and rate together.
    fn drift_rate(&self, x: f64) -> (f64, f64) {
        (self.drift(x), self.rate(x))
    }
}

impl Diffusion for ZoneModel {
    fn band(&self) -> Band {
        ZoneModel::band(self)
    }
    fn sigma(&self) -> f64 {
        ZoneModel::sigma(self)
    }
    fn drift(&self, x: f64) -> f64 {
        ZoneModel::drift(self, x)
    }
    fn rate(&self, x: f64) -> f64 {
        self.short_rate_unchecked(x)
    }
}

/// Constant drift, no discounting.
#[derive(Debug, Clone, Copy)]
pub struct ConstantDrift {
    pub mu: f64,
    pub sigma: f64,
    pub band: Band,
}

impl Diffusion for ConstantDrift {
    fn band(&self) -> Band {
        self.band
    }
    fn sigma(&self) -> f64 {
        self.sigma
    }
    fn drift(&self, _: f64) -> f64 {
        self.mu
    }
    fn rate(&self, _: f64) -> f64 {
        0.0
    }
}

/// Drift and rate sampled on a uniform grid and linearly interpolated.
#[derive(Debug, Clone)]
pub struct Tabulated {
    band: Band,
    sigma: f64,
    inv_step: f64,
    /// Per cell: drift, drift increment, rate, rate increment.
    cells: Vec<[f64; 4]>,
}

impl Tabulated {
    pub fn new<D: Diffusion + ?Sized>(d: &D, nodes: usize) -> Self {
        let band = d.band();
        let xs: Vec<f64> = band.grid(nodes.max(2)).collect();
        let values: Vec<(f64, f64)> = xs.iter().map(|&x| d.drift_rate(x)).collect();
        let cells = values
            .windows(2)
            .map(|w| [w[0].0, w[1].0 - w[0].0, w[0].1, w[1].1 - w[0].1])
            .collect();
        Tabulated {
            band,
            sigma: d.sigma(),
            inv_step: (xs.len() - 1) as f64 / band.width(),
            cells,
        }
    }

    #[inline]
    fn cell(&self, x: f64) -> (&[f64; 4], f64) {
        let t = ((x - self.band.x_minus) * self.inv_step).max(0.0);
        let i = (t as usize).min(self.cells.len() - 1);
        (&self.cells[i], t - i as f64)
    }
}

impl Diffusion for Tabulated {
    fn band(&self) -> Band {
        self.band
    }
    fn sigma(&self) -> f64 {
        self.sigma
    }
    fn drift(&self, x: f64) -> f64 {
        let (c, w) = self.cell(x);
        c[0] + w * c[1]
    }
    fn rate(&self, x: f64) -> f64 {
        let (c, w) = self.cell(x);
        c[2] + w * c[3]
    }
    #[inline]
    fn drift_rate(&self, x: f64) -> (f64, f64) {
        let (c, w) = self.cell(x);
        (c[0] + w * c[1], c[2] + w * c[3])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Euler step folded back into the band at each edge crossing.
    ReflectedEuler,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub paths: usize,
    /// Target step in years; the tenor is split into `ceil(T/dt)` equal steps.
    pub dt: f64,
    pub seed: u64,
    pub scheme: Scheme,
    /// Normals summed (and rescaled) per step. A run with `dt` and
    /// `refinement = 2` uses the same noise as one with `dt/2` and `1`.
    pub refinement: u32,
}

impl McConfig {
    pub fn new(paths: usize, dt: f64, seed: u64) -> Self {
        McConfig {
            paths,
            dt,
            seed,
            scheme: Scheme::ReflectedEuler,
            refinement: 1,
        }
    }

    /// Defaults: `2·10⁵` paths and `dt = 10⁻⁴·T`.
    pub fn for_tenor(tenor: f64, seed: u64) -> Self {
        Self::new(200_000, 1e-4 * tenor, seed)
    }

    fn steps(&self, tenor: f64) -> Result<usize> {
        if self.paths == 0 {
            return Err(invalid("paths", "need at least one path"));
        }
        if !(tenor > 0.0 && tenor.is_finite()) {
            return Err(invalid("tenor", format!("must be positive, got {tenor}")));
        }
        if !(self.dt > 0.0 && self.dt <= tenor) {
            return Err(invalid("dt", format!("need 0 < dt ≤ tenor, got {}", self.dt)));
        }
        if self.refinement == 0 {
            return Err(invalid("refinement", "must be at least 1"));
        }
        Ok(((tenor / self.dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub paths: usize,
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Reflected Euler walker over one path.
struct Walker<'a, D: ?Sized> {
    d: &'a D,
    lo: f64,
    hi: f64,
    width: f64,
    dt: f64,
    vol: f64,
    refinement: u32,
    inv_sqrt_refinement: f64,
}

impl<'a, D: Diffusion + ?Sized> Walker<'a, D> {
    fn new(d: &'a D, dt: f64, refinement: u32) -> Self {
        let band = d.band();
        Walker {
            d,
            lo: band.x_minus,
            hi: band.x_plus,
            width: band.width(),
            dt,
            vol: d.sigma() * dt.sqrt(),
            refinement,
            inv_sqrt_refinement: 1.0 / (refinement as f64).sqrt(),
        }
    }

    #[inline]
    fn step(&self, x: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
        self.step_with(x, self.d.drift(x), rng)
    }

    /// Euler step from `x` with the drift already evaluated there.
    #[inline]
    fn step_with(&self, x: f64, drift: f64, rng: &mut ChaCha8Rng) -> Result<f64> {
        let xi: f64 = if self.refinement == 1 {
            StandardNormal.sample(rng)
        } else {
            let s: f64 = (0..self.refinement)
                .map(|_| -> f64 { StandardNormal.sample(rng) })
                .sum();
            s * self.inv_sqrt_refinement
        };
        let step = drift * self.dt + self.vol * xi;
        if step.abs() > self.width {
            return Err(Error::StepTooLarge { step });
        }
        let mut y = x + step;
        loop {
            if y < self.lo {
                y = 2.0 * self.lo - y;
            } else if y > self.hi {
                y = 2.0 * self.hi - y;
            } else {
                return Ok(y);
            }
        }
    }
}

/// One path `x_0, x_1, …, x_n` on the step grid, drawn from stream 0.
pub fn simulate_path<D: Diffusion + ?Sized>(d: &D, x0: f64, tenor: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    simulate_path_index(d, x0, tenor, cfg, 0)
}

/// Path number `index` of the run described by `cfg`.
pub fn simulate_path_index<D: Diffusion + ?Sized>(
    d: &D,
    x0: f64,
    tenor: f64,
    cfg: &McConfig,
    index: usize,
) -> Result<Vec<f64>> {
    let n = cfg.steps(tenor)?;
    let x0 = d.band().clamp(x0)?;
    let w = Walker::new(d, tenor / n as f64, cfg.refinement);
    let mut rng = path_rng(cfg.seed, index);
    let mut path = Vec::with_capacity(n + 1);
    path.push(x0);
    let mut x = x0;
    for _ in 0..n {
        x = w.step(x, &mut rng)?;
        path.push(x);
    }
    Ok(path)
}

/// Paths advanced in lockstep, hiding the latency of the serial
/// state → table → state chain of a single path.
const LANES: usize = 4;

/// Terminal states and discount factors of paths `start..start + LANES`.
fn terminal_lanes<D: Diffusion + ?Sized>(
    w: &Walker<D>,
    x0: f64,
    n: usize,
    seed: u64,
    start: usize,
) -> Result<[(f64, f64); LANES]> {
    let mut rngs: [ChaCha8Rng; LANES] = std::array::from_fn(|j| path_rng(seed, start + j));
    let mut x = [x0; LANES];
    let (mu0, r0) = w.d.drift_rate(x0);
    let mut mu = [mu0; LANES];
    let mut r = [r0; LANES];
    let mut integral = [0.0; LANES];
    for _ in 0..n {
        for j in 0..LANES {
            x[j] = w.step_with(x[j], mu[j], &mut rngs[j])?;
            let (mu_next, r_next) = w.d.drift_rate(x[j]);
            integral[j] += r[j] + r_next;
            (mu[j], r[j]) = (mu_next, r_next);
        }
    }
    Ok(std::array::from_fn(|j| (x[j], (-0.5 * w.dt * integral[j]).exp())))
}

/// Runs `terminal_lanes` over `start..end`, calling `visit(path, x_T, D)`.
fn for_each_terminal<D: Diffusion + ?Sized>(
    w: &Walker<D>,
    x0: f64,
    n: usize,
    seed: u64,
    start: usize,
    end: usize,
    mut visit: impl FnMut(usize, f64, f64),
) -> Result<()> {
    let mut p = start;
    while p < end {
        let lanes = terminal_lanes(w, x0, n, seed, p)?;
        for (j, &(x, d)) in lanes.iter().enumerate().take(end - p) {
            visit(p + j, x, d);
        }
        p += LANES;
    }
    Ok(())
}

/// Compensated running sums of shifted samples.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    comp: f64,
    sum_sq: f64,
    comp_sq: f64,
}

fn kahan(sum: &mut f64, comp: &mut f64, v: f64) {
    let y = v - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

impl Moments {
    fn push(&mut self, v: f64) {
        kahan(&mut self.sum, &mut self.comp, v);
        kahan(&mut self.sum_sq, &mut self.comp_sq, v * v);
    }

    fn merge(&mut self, other: &Moments) {
        kahan(&mut self.sum, &mut self.comp, other.sum);
        kahan(&mut self.sum, &mut self.comp, -other.comp);
        kahan(&mut self.sum_sq, &mut self.comp_sq, other.sum_sq);
        kahan(&mut self.sum_sq, &mut self.comp_sq, -other.comp_sq);
    }

    fn estimate(&self, shift: f64, paths: usize) -> McEstimate {
        let n = paths as f64;
        let mean = self.sum / n;
        let var = if paths > 1 {
            ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        McEstimate {
            mean: shift + mean,
            std_error: (var / n).sqrt(),
            paths,
        }
    }
}

/// Runs `paths` independent jobs in fixed chunks and reduces them in index
/// order. `job(start, end, out)` appends `outputs` samples per path.
fn reduce_paths<F>(paths: usize, outputs: usize, shifts: &[f64], job: F) -> Result<Vec<McEstimate>>
where
    F: Fn(usize, usize, &mut Vec<f64>) -> Result<()> + Sync,
{
    let chunks = paths.div_ceil(CHUNK);
    let run_chunk = |c: usize| -> Result<Vec<Moments>> {
        let mut acc = vec![Moments::default(); outputs];
        let mut samples = Vec::with_capacity(CHUNK * outputs);
        job(c * CHUNK, ((c + 1) * CHUNK).min(paths), &mut samples)?;
        for row in samples.chunks_exact(outputs) {
            for ((m, v), s) in acc.iter_mut().zip(row).zip(shifts) {
                m.push(v - s);
            }
        }
        Ok(acc)
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<Vec<Moments>>> = {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run_chunk).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<Vec<Moments>>> = (0..chunks).map(run_chunk).collect();

    let mut total = vec![Moments::default(); outputs];
    for part in parts {
        for (t, m) in total.iter_mut().zip(&part?) {
            t.merge(m);
        }
    }
    Ok(total.iter().zip(shifts).map(|(m, &s)| m.estimate(s, paths)).collect())
}

/// Estimates `E[D · Y(X_T)]` for each claim from one shared set of paths.
pub fn mc_price_many(claims: &[Claim], model: &ZoneModel, s0: f64, tenor: f64, cfg: &McConfig) -> Result<Vec<McEstimate>> {
    let n = cfg.steps(tenor)?;
    let x0 = model.invert(s0)?;
    let table = Tabulated::new(model, TABLE_NODES);
    let w = Walker::new(&table, tenor / n as f64, cfg.refinement);
    // Shift by the undiscounted payoff at the start to keep sums small.
    let shifts: Vec<f64> = claims.iter().map(|c| c.payoff(model, x0)).collect();
    reduce_paths(cfg.paths, claims.len(), &shifts, |start, end, out| {
        for_each_terminal(&w, x0, n, cfg.seed, start, end, |_, x, disc| {
            out.extend(claims.iter().map(|c| disc * c.payoff(model, x)));
        })
    })
}

pub fn mc_price(claim: &Claim, model: &ZoneModel, s0: f64, tenor: f64, cfg: &McConfig) -> Result<McEstimate> {
    Ok(mc_price_many(std::slice::from_ref(claim), model, s0, tenor, cfg)?[0])
}

/// Terminal states of the reflected process (no discounting).
pub fn terminal_states<D: Diffusion + ?Sized>(d: &D, x0: f64, tenor: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    let n = cfg.steps(tenor)?;
    let x0 = d.band().clamp(x0)?;
    let w = Walker::new(d, tenor / n as f64, cfg.refinement);
    let mut out = Vec::with_capacity(cfg.paths);
    for_each_terminal(&w, x0, n, cfg.seed, 0, cfg.paths, |_, x, _| out.push(x))?;
    Ok(out)
}

/// Root-mean-square terminal hedging error for one rebalance count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Replication {
    pub rebalance_steps: usize,
    /// `mean` is the RMS of `V_T − Y_T`; `std_error` is its delta-method SE.
    pub rms: McEstimate,
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Discrete self-financing replication of `claim`, rebalanced `n` times for
/// each `n` in `rebalance_steps`. All counts are evaluated on the same fine
/// paths (step `cfg.dt`, rounded so every count divides the fine grid).
///
/// Starting from the series price, the FX holding `φ` is reset to the
/// delta at each rebalance date and the cash-bond holding `ψ = E − φZ`
/// absorbs the rest, so the portfolio only changes through `φ dS + ψ dB`.
pub fn replicate_many(
    claim: &Claim,
    pricer: &Pricer,
    s0: f64,
    tenor: f64,
    rebalance_steps: &[usize],
    cfg: &McConfig,
) -> Result<Vec<Replication>> {
    if !claim.is_hedgeable(pricer.model()) {
        return Err(invalid("claim", "claim has no replicating strategy (discontinuous payoff)"));
    }
    if rebalance_steps.is_empty() || rebalance_steps.contains(&0) {
        return Err(invalid("rebalance_steps", "need positive rebalance counts"));
    }
    let model = pricer.model();
    let base = cfg.steps(tenor)?;
    let unit = rebalance_steps.iter().fold(1, |a, &b| lcm(a, b));
    let fine = base.div_ceil(unit) * unit;
    let dt = tenor / fine as f64;
    let x0 = model.invert(s0)?;
    let v0 = pricer.price(claim, s0, tenor)?.value;
    let coeffs: CoefficientSet = pricer.coefficients(claim)?;
    let table = Tabulated::new(model, TABLE_NODES);
    let w = Walker::new(&table, dt, cfg.refinement);
    let outputs = rebalance_steps.len();

    let replicate_path = |p: usize, out: &mut Vec<f64>| -> Result<()> {
        let mut rng = path_rng(cfg.seed, p);
        let mut xs = Vec::with_capacity(fine + 1);
        let mut log_b = Vec::with_capacity(fine + 1);
        let (mut x, mut acc) = (x0, 0.0);
        let (mut mu, mut r) = table.drift_rate(x);
        xs.push(x);
        log_b.push(0.0);
        for _ in 0..fine {
            x = w.step_with(x, mu, &mut rng)?;
            let (mu_next, r_next) = table.drift_rate(x);
            acc += 0.5 * dt * (r + r_next);
            (mu, r) = (mu_next, r_next);
            xs.push(x);
            log_b.push(acc);
        }
        for &n in rebalance_steps {
            let stride = fine / n;
            let mut e = v0; // V/B with B_0 = 1
            for i in 0..n {
                let j = i * stride;
                let tau = tenor * (1.0 - j as f64 / fine as f64);
                let phi = crate::hedging::delta(xs[j], tau, &coeffs, pricer.eigen(), model)?;
                let z0 = model.fx(xs[j]) * (-log_b[j]).exp();
                let z1 = model.fx(xs[j + stride]) * (-log_b[j + stride]).exp();
                e += phi * (z1 - z0);
            }
            let err = e * log_b[fine].exp() - claim.payoff(model, xs[fine]);
            out.push(err * err);
        }
        Ok(())
    };
    let estimates = reduce_paths(cfg.paths, outputs, &vec![0.0; outputs], |start, end, out| {
        (start..end).try_for_each(|p| replicate_path(p, out))
    })?;
    Ok(estimates
        .iter()
        .zip(rebalance_steps)
        .map(|(m, &n)| {
            let rms = m.mean.max(0.0).sqrt();
            let se = if rms > 0.0 { m.std_error / (2.0 * rms) } else { 0.0 };
            Replication {
                rebalance_steps: n,
                rms: McEstimate {
                    mean: rms,
                    std_error: se,
                    paths: m.paths,
                },
            }
        })
        .collect())
}

pub fn replicate(
    claim: &Claim,
    pricer: &Pricer,
    s0: f64,
    tenor: f64,
    rebalance_steps: usize,
    cfg: &McConfig,
) -> Result<McEstimate> {
    Ok(replicate_many(claim, pricer, s0, tenor, &[rebalance_steps], cfg)?[0].rms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(sigma: f64) -> ConstantDrift {
        ConstantDrift {
            mu: 0.0,
            sigma,
            band: Band::with_width(1.0).unwrap(),
        }
    }

    #[test]
    fn paths_stay_in_band() {
        let d = ConstantDrift { mu: 3.0, ..free(2.0) };
        let path = simulate_path(&d, 0.9, 1.0, &McConfig::new(1, 1e-3, 7)).unwrap();
        assert_eq!(path.len(), 1001);
        assert!(path.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn oversized_step_rejected() {
        let err = simulate_path(&free(50.0), 0.5, 1.0, &McConfig::new(1, 0.5, 1)).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
    }

    #[test]
    fn symmetric_mean_stays_mid_band() {
        let d = free(0.3);
        let cfg = McConfig::new(4000, 0.01, 11);
        let xs = terminal_states(&d, 0.5, 0.5, &cfg).unwrap();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((mean - 0.5).abs() < 3.0 * (var / n).sqrt());
    }

    #[test]
    fn refinement_reuses_noise() {
        let d = free(0.2);
        let coarse = McConfig {
            refinement: 2,
            ..McConfig::new(1, 0.1, 3)
        };
        let fine = McConfig::new(1, 0.05, 3);
        let a = *simulate_path(&d, 0.5, 1.0, &coarse).unwrap().last().unwrap();
        let b = *simulate_path(&d, 0.5, 1.0, &fine).unwrap().last().unwrap();
        // No drift and no reflection near the middle: both sum the same noise.
        assert!((a - b).abs() < 1e-12 || !(0.2..0.8).contains(&b));
    }

    #[test]
    fn bad_config_rejected() {
        let d = free(0.2);
        assert!(simulate_path(&d, 0.5, 1.0, &McConfig::new(0, 0.1, 1)).is_err());
        assert!(simulate_path(&d, 0.5, 1.0, &McConfig::new(1, 2.0, 1)).is_err());
        assert!(simulate_path(&d, 1.5, 1.0, &McConfig::new(1, 0.1, 1)).is_err());
    }

    #[test]
    fn table_interpolates_linear_functions_exactly() {
        let d = ConstantDrift { mu: 0.7, ..free(0.2) };
        let t = Tabulated::new(&d, 5);
        assert!((t.drift(0.33) - 0.7).abs() < 1e-15);
        assert_eq!(t.rate(1.0), 0.0);
    }

    #[test]
    fn chunked_moments_match_direct() {
        let vals: Vec<f64> = (0..3000).map(|i| ((i * 37) % 101) as f64 * 0.01).collect();
        let est = reduce_paths(vals.len(), 1, &[0.5], |start, end, out| {
            out.extend_from_slice(&vals[start..end]);
            Ok(())
        })
        .unwrap()[0];
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((est.mean - mean).abs() < 1e-13);
        assert!((est.std_error - (var / n).sqrt()).abs() < 1e-13);
    }
}
