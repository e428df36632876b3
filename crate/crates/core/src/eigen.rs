//! Orthonormal eigen-systems of the Schrödinger operator
//! `-(σ²/2)(ψ'' - U ψ) = E ψ` on the band with the Robin-type conditions
//! `ψ'(x±) = h(x±) ψ(x±)`.
//!
//! Three constructions are provided: the Neumann cosines (zero potential),
//! the constant-potential family of the tangent model, and a finite-difference
//! solver for arbitrary bounded potentials.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::quadrature;
use crate::tridiag::SymTridiagonal;
use crate::zone_model::{Band, ScalarFn};

/// Highest eigen-index retained unless the caller asks otherwise.
pub const DEFAULT_N_MAX: usize = 64;
/// Coarse grid of the numeric solver; the Richardson partner has `2n - 1` nodes.
pub const DEFAULT_GRID_POINTS: usize = 2001;

const ROOT_TOL: f64 = 1e-14;
const ROOT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    Cosine,
    Tangent,
    Numeric,
}

#[derive(Clone)]
enum Basis {
    Cosine,
    Tangent {
        nu: f64,
        lambdas: Vec<f64>,
        amplitudes: Vec<f64>,
    },
    Grid(GridBasis),
}

#[derive(Clone)]
struct GridBasis {
    step: f64,
    // values[n][i] = ψ_n at node i
    values: Vec<Vec<f64>>,
    potential_nodes: Vec<f64>,
    potential: ScalarFn,
}

/// Eigenvalues `E_0..=E_N` and evaluators for the orthonormal `ψ_n`.
#[derive(Clone)]
pub struct EigenSystem {
    band: Band,
    sigma: f64,
    energies: Vec<f64>,
    h_minus: f64,
    h_plus: f64,
    ground_shift: f64,
    basis: Basis,
}

impl std::fmt::Debug for EigenSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EigenSystem")
            .field("kind", &self.kind())
            .field("band", &self.band)
            .field("sigma", &self.sigma)
            .field("n_max", &self.n_max())
            .field("h_minus", &self.h_minus)
            .field("h_plus", &self.h_plus)
            .field("ground_shift", &self.ground_shift)
            .finish()
    }
}

/// Values of every basis function and its first two derivatives at one point.
#[derive(Debug, Clone, Default)]
pub struct BasisValues {
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub d2psi: Vec<f64>,
}

impl EigenSystem {
    pub fn kind(&self) -> SystemKind {
        match self.basis {
            Basis::Cosine => SystemKind::Cosine,
            Basis::Tangent { .. } => SystemKind::Tangent,
            Basis::Grid(_) => SystemKind::Numeric,
        }
    }

    pub fn band(&self) -> Band {
        self.band
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Highest eigen-index `N`; the system holds `N + 1` pairs.
    pub fn n_max(&self) -> usize {
        self.energies.len() - 1
    }

    pub fn energy(&self, n: usize) -> f64 {
        self.energies[n]
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Boundary slopes `h(x_-)` and `h(x_+)`.
    pub fn boundary_slopes(&self) -> (f64, f64) {
        (self.h_minus, self.h_plus)
    }

    /// Amount subtracted from the numeric spectrum to pin `E_0 = 0`.
    pub fn ground_shift(&self) -> f64 {
        self.ground_shift
    }

    /// `λ_n` for the analytic systems; `None` for numeric ones.
    pub fn lambda(&self, n: usize) -> Option<f64> {
        match &self.basis {
            Basis::Cosine => Some(PI * n as f64 / self.band.width()),
            Basis::Tangent { lambdas, .. } => Some(lambdas[n]),
            Basis::Grid(_) => None,
        }
    }

    /// Normalisation constant `a_n` for the analytic systems.
    pub fn amplitude(&self, n: usize) -> Option<f64> {
        let l = self.band.width();
        match &self.basis {
            Basis::Cosine => Some(if n == 0 { 1.0 / l.sqrt() } else { (2.0 / l).sqrt() }),
            Basis::Tangent { amplitudes, .. } => Some(amplitudes[n]),
            Basis::Grid(_) => None,
        }
    }

    /// `sup |ψ_n|` over the band.
    pub fn sup_abs(&self, n: usize) -> f64 {
        match &self.basis {
            Basis::Cosine | Basis::Tangent { .. } => self.amplitude(n).unwrap(),
            Basis::Grid(g) => g.values[n].iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// The potential `U(x)` the system was built for.
    pub fn potential(&self, x: f64) -> f64 {
        match &self.basis {
            Basis::Cosine => 0.0,
            Basis::Tangent { nu, .. } => -nu * nu,
            Basis::Grid(g) => (g.potential)(x),
        }
    }

    pub fn psi(&self, n: usize, x: f64) -> f64 {
        let y = x - self.band.x_minus;
        let l = self.band.width();
        match &self.basis {
            Basis::Cosine => self.amplitude(n).unwrap() * (PI * n as f64 * y / l).cos(),
            Basis::Tangent {
                lambdas,
                amplitudes,
                ..
            } => amplitudes[n] * (lambdas[n] * (y - 0.5 * l) + 0.5 * PI * n as f64).cos(),
            Basis::Grid(g) => g.spline(n, y, self.energies[n], self.sigma).0,
        }
    }

    pub fn dpsi(&self, n: usize, x: f64) -> f64 {
        let y = x - self.band.x_minus;
        let l = self.band.width();
        match &self.basis {
            Basis::Cosine => {
                let k = PI * n as f64 / l;
                -self.amplitude(n).unwrap() * k * (k * y).sin()
            }
            Basis::Tangent {
                lambdas,
                amplitudes,
                ..
            } => {
                -amplitudes[n]
                    * lambdas[n]
                    * (lambdas[n] * (y - 0.5 * l) + 0.5 * PI * n as f64).sin()
            }
            Basis::Grid(g) => g.spline(n, y, self.energies[n], self.sigma).1,
        }
    }

    /// `ψ_n'' = (U - 2E_n/σ²) ψ_n`, exact for every eigenfunction.
    pub fn d2psi(&self, n: usize, x: f64) -> f64 {
        let c = self.potential(x) - 2.0 * self.energies[n] / (self.sigma * self.sigma);
        c * self.psi(n, x)
    }

    /// Fills `out` with every `ψ_n`, `ψ_n'`, `ψ_n''` at `x` in one pass.
    pub fn evaluate(&self, x: f64, out: &mut BasisValues) {
        let count = self.energies.len();
        out.psi.resize(count, 0.0);
        out.dpsi.resize(count, 0.0);
        out.d2psi.resize(count, 0.0);
        let y = x - self.band.x_minus;
        let l = self.band.width();
        match &self.basis {
            Basis::Cosine => {
                // Angle-addition recurrence for cos(nθ), sin(nθ).
                let theta = PI * y / l;
                let (s1, c1) = theta.sin_cos();
                let (mut c, mut s) = (1.0, 0.0);
                let a = (2.0 / l).sqrt();
                for n in 0..count {
                    let amp = if n == 0 { 1.0 / l.sqrt() } else { a };
                    let k = PI * n as f64 / l;
                    out.psi[n] = amp * c;
                    out.dpsi[n] = -amp * k * s;
                    out.d2psi[n] = -k * k * out.psi[n];
                    let cn = c * c1 - s * s1;
                    s = s * c1 + c * s1;
                    c = cn;
                }
            }
            Basis::Tangent {
                nu,
                lambdas,
                amplitudes,
            } => {
                let z = y - 0.5 * l;
                for n in 0..count {
                    let (sn, cs) = (lambdas[n] * z + 0.5 * PI * n as f64).sin_cos();
                    out.psi[n] = amplitudes[n] * cs;
                    out.dpsi[n] = -amplitudes[n] * lambdas[n] * sn;
                    let c = -nu * nu - 2.0 * self.energies[n] / (self.sigma * self.sigma);
                    out.d2psi[n] = c * out.psi[n];
                }
            }
            Basis::Grid(g) => {
                let u = (g.potential)(x);
                for n in 0..count {
                    let (p, dp) = g.spline(n, y, self.energies[n], self.sigma);
                    out.psi[n] = p;
                    out.dpsi[n] = dp;
                    out.d2psi[n] = (u - 2.0 * self.energies[n] / (self.sigma * self.sigma)) * p;
                }
            }
        }
    }

    /// CSV dump `n,E_n,lambda_n,a_n` with 17 significant digits; `λ_n`, `a_n`
    /// are empty for numeric systems.
    pub fn csv_report(&self) -> String {
        let mut out = String::from("n,E_n,lambda_n,a_n\n");
        for n in 0..=self.n_max() {
            let opt = |v: Option<f64>| v.map(fmt17).unwrap_or_default();
            let _ = writeln!(
                out,
                "{n},{},{},{}",
                fmt17(self.energies[n]),
                opt(self.lambda(n)),
                opt(self.amplitude(n))
            );
        }
        out
    }
}

/// `{:.16e}` formatting, which carries 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

impl GridBasis {
    /// Cubic spline through the nodal values whose nodal second derivatives
    /// are the exact `(U - 2E/σ²) ψ`.
    fn spline(&self, n: usize, y: f64, energy: f64, sigma: f64) -> (f64, f64) {
        let v = &self.values[n];
        let last = v.len() - 1;
        let t = (y / self.step).clamp(0.0, last as f64);
        let i = (t.floor() as usize).min(last - 1);
        let b = t - i as f64;
        let a = 1.0 - b;
        let k = 2.0 * energy / (sigma * sigma);
        let m0 = (self.potential_nodes[i] - k) * v[i];
        let m1 = (self.potential_nodes[i + 1] - k) * v[i + 1];
        let h = self.step;
        let value = a * v[i] + b * v[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let slope = (v[i + 1] - v[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0
            + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        (value, slope)
    }
}

/// Neumann cosine system for vanishing potential.
pub fn cos_system(band: Band, sigma: f64, n_max: usize) -> Result<EigenSystem> {
    check_sigma(sigma)?;
    if n_max < 1 {
        return Err(invalid("n_max", "need at least one excited state"));
    }
    let l = band.width();
    let energies = (0..=n_max)
        .map(|n| PI * PI * (n * n) as f64 * sigma * sigma / (2.0 * l * l))
        .collect();
    Ok(EigenSystem {
        band,
        sigma,
        energies,
        h_minus: 0.0,
        h_plus: 0.0,
        ground_shift: 0.0,
        basis: Basis::Cosine,
    })
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid("sigma", format!("must be positive, got {sigma}")));
    }
    Ok(())
}

pub(crate) fn check_nu(nu: f64, length: f64) -> Result<()> {
    if !(nu > 0.0 && nu < PI / length) {
        return Err(invalid(
            "nu",
            format!("must lie in (0, pi/L) = (0, {}), got {nu}", PI / length),
        ));
    }
    Ok(())
}

/// Root `λ_n` of `λ tan((λL - πn)/2) = ν tan(νL/2)`.
///
/// For `n ≥ 1` the root lies in `(nπ/L, (n+1)π/L)`. Writing `δ = (λL - πn)/2`
/// the equation becomes `λ sin δ - R cos δ = 0` with `λ = (πn + 2δ)/L`, which
/// is strictly increasing in `δ ∈ (0, π/2)` and free of poles.
pub fn tan_lambda(n: usize, nu: f64, length: f64, tol: f64) -> Result<f64> {
    check_nu(nu, length)?;
    if !(tol > 0.0) {
        return Err(invalid("tol", "must be positive"));
    }
    if n == 0 {
        return Ok(nu);
    }
    let rhs = nu * (0.5 * nu * length).tan();
    let lambda_of = |d: f64| (PI * n as f64 + 2.0 * d) / length;
    let smooth = |d: f64| lambda_of(d) * d.sin() - rhs * d.cos();
    let residual = |d: f64| {
        let lam = lambda_of(d);
        (lam * d.tan() - rhs).abs() / rhs.max(1.0)
    };
    let (mut lo, mut hi) = (0.0, 0.5 * PI);
    for _ in 0..ROOT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if smooth(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        let d = 0.5 * (lo + hi);
        if residual(d) <= tol || hi - lo <= f64::EPSILON * hi {
            return Ok(lambda_of(d));
        }
    }
    let d = 0.5 * (lo + hi);
    Err(Error::NoConvergence {
        what: "tan-model eigenvalue bisection",
        residual: residual(d),
    })
}

/// `a_n = (L/2 [1 + (-1)^n sin(λL)/(λL)])^{-1/2}`, with `sin(λL)` rewritten
/// as `(-1)^n sin(λL - πn)` so the near-degenerate case keeps its digits.
pub(crate) fn tan_amplitude(n: usize, lambda: f64, length: f64) -> f64 {
    let delta = lambda * length - PI * n as f64;
    let ratio = if delta.abs() < 1e-6 {
        // sin δ ≈ δ - δ³/6
        (delta - delta.powi(3) / 6.0) / (lambda * length)
    } else {
        delta.sin() / (lambda * length)
    };
    (0.5 * length * (1.0 + ratio)).powf(-0.5)
}

/// Eigen-system of the tangent model, `U ≡ -ν²`, `h = -ν tan(ν(x - L/2))`.
pub fn tan_system(nu: f64, band: Band, sigma: f64, n_max: usize) -> Result<EigenSystem> {
    check_sigma(sigma)?;
    let l = band.width();
    check_nu(nu, l)?;
    let lambdas = (0..=n_max)
        .map(|n| tan_lambda(n, nu, l, ROOT_TOL))
        .collect::<Result<Vec<_>>>()?;
    let amplitudes: Vec<f64> = lambdas
        .iter()
        .enumerate()
        .map(|(n, &lam)| tan_amplitude(n, lam, l))
        .collect();
    let energies = lambdas
        .iter()
        .map(|lam| 0.5 * sigma * sigma * (lam * lam - nu * nu))
        .collect();
    let slope = nu * (0.5 * nu * l).tan();
    Ok(EigenSystem {
        band,
        sigma,
        energies,
        h_minus: slope,
        h_plus: -slope,
        ground_shift: 0.0,
        basis: Basis::Tangent {
            nu,
            lambdas,
            amplitudes,
        },
    })
}

struct GridSolution {
    energies: Vec<f64>,
    // trapezoid-normalised, ψ(x_-) > 0
    vectors: Vec<Vec<f64>>,
}

fn solve_on_grid(
    potential: &dyn Fn(f64) -> f64,
    h_minus: f64,
    h_plus: f64,
    band: Band,
    sigma: f64,
    count: usize,
    points: usize,
) -> Result<GridSolution> {
    let l = band.width();
    let h = l / (points - 1) as f64;
    let s2 = 0.5 * sigma * sigma;
    let inv_h2 = 1.0 / (h * h);
    let u: Vec<f64> = (0..points)
        .map(|i| potential(band.x_minus + i as f64 * h))
        .collect();

    // Non-symmetric ghost-node operator A; rows 0 and n-1 carry the Robin terms.
    let last = points - 1;
    let mut diag = vec![0.0; points];
    let mut upper = vec![0.0; last];
    let mut lower = vec![0.0; last];
    for i in 0..points {
        diag[i] = s2 * (2.0 * inv_h2 + u[i]);
    }
    diag[0] += s2 * 2.0 * h_minus / h;
    diag[last] -= s2 * 2.0 * h_plus / h;
    for i in 0..last {
        upper[i] = -s2 * inv_h2;
        lower[i] = -s2 * inv_h2;
    }
    upper[0] *= 2.0;
    lower[last - 1] *= 2.0;

    // Trapezoid weights w make W·A symmetric; S = W^{1/2} A W^{-1/2}.
    let weight = |i: usize| if i == 0 || i == last { 0.5 } else { 1.0 };
    let mut off = vec![0.0; last];
    for i in 0..last {
        let left = weight(i) * upper[i];
        let right = weight(i + 1) * lower[i];
        if (left - right).abs() > 1e-12 * left.abs().max(right.abs()) {
            return Err(Error::AsymmetricOperator { row: i });
        }
        off[i] = (weight(i) / weight(i + 1)).sqrt() * upper[i];
    }
    let matrix = SymTridiagonal { diag, off };

    let mut energies = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for k in 0..count {
        let e = matrix.eigenvalue(k);
        let y = matrix.eigenvector(e);
        let mut psi: Vec<f64> = y
            .iter()
            .enumerate()
            .map(|(i, v)| v / weight(i).sqrt())
            .collect();
        let norm: f64 = psi
            .iter()
            .enumerate()
            .map(|(i, v)| weight(i) * v * v)
            .sum::<f64>()
            * h;
        let sign = if psi[0] < 0.0 { -1.0 } else { 1.0 };
        let scale = sign / norm.sqrt();
        psi.iter_mut().for_each(|v| *v *= scale);
        energies.push(e);
        vectors.push(psi);
    }
    Ok(GridSolution { energies, vectors })
}

/// Finite-difference eigen-system for a bounded potential `U` with boundary
/// slopes `h(x±)`.
///
/// The operator is discretised with second-order central differences on
/// `grid_points` nodes and again on `2·grid_points - 1` nodes; eigenvalues and
/// nodal eigenfunction values are Richardson-extrapolated from the two.
/// The spectrum is shifted so that `E_0 = 0` when the computed ground energy
/// is within the discretisation error; otherwise `(U, h±)` cannot come from a
/// positive ground state and an error is returned.
pub fn numeric_system(
    potential: ScalarFn,
    h_minus: f64,
    h_plus: f64,
    band: Band,
    sigma: f64,
    n_max: usize,
    grid_points: usize,
) -> Result<EigenSystem> {
    check_sigma(sigma)?;
    if grid_points < 201 || grid_points.is_multiple_of(2) {
        return Err(invalid(
            "grid_points",
            format!("need an odd count of at least 201, got {grid_points}"),
        ));
    }
    if 8 * (n_max + 1) > grid_points {
        return Err(invalid(
            "n_max",
            format!("{n_max} eigenpairs under-resolved on {grid_points} points"),
        ));
    }
    let count = n_max + 1;
    let coarse = solve_on_grid(&*potential, h_minus, h_plus, band, sigma, count, grid_points)?;
    let fine = solve_on_grid(&*potential, h_minus, h_plus, band, sigma, count, 2 * grid_points - 1)?;

    let mut energies: Vec<f64> = coarse
        .energies
        .iter()
        .zip(&fine.energies)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect();

    let l = band.width();
    let scale = sigma * sigma * PI * PI / (2.0 * l * l);
    let e0 = energies[0];
    let bound = 1e-6 * scale + 10.0 * (fine.energies[0] - coarse.energies[0]).abs();
    if e0.abs() > bound {
        return Err(Error::InconsistentPotential { e0, bound });
    }
    energies.iter_mut().for_each(|e| *e -= e0);

    let step = l / (grid_points - 1) as f64;
    let values: Vec<Vec<f64>> = coarse
        .vectors
        .iter()
        .zip(&fine.vectors)
        .map(|(c, f)| {
            let mut v: Vec<f64> = c
                .iter()
                .enumerate()
                .map(|(i, cv)| (4.0 * f[2 * i] - cv) / 3.0)
                .collect();
            let norm = simpson(&v.iter().map(|x| x * x).collect::<Vec<_>>(), step);
            let s = norm.sqrt();
            v.iter_mut().for_each(|x| *x /= s);
            v
        })
        .collect();
    let potential_nodes = (0..grid_points)
        .map(|i| potential(band.x_minus + i as f64 * step))
        .collect();

    Ok(EigenSystem {
        band,
        sigma,
        energies,
        h_minus,
        h_plus,
        ground_shift: e0,
        basis: Basis::Grid(GridBasis {
            step,
            values,
            potential_nodes,
            potential,
        }),
    })
}

fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len() - 1;
    let mut s = values[0] + values[n];
    for (i, v) in values.iter().enumerate().take(n).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * h / 3.0
}

/// Nodeless ground state `ψ_0 = a_0 exp(∫_{x_-}^x h)`.
///
/// `∫h` is tabulated panel by panel with adaptive quadrature and interpolated
/// by cubic Hermite segments using the exact slope `h`.
#[derive(Clone)]
pub struct GroundState {
    band: Band,
    step: f64,
    integral: Vec<f64>,
    slope: Vec<f64>,
    a0: f64,
}

impl GroundState {
    pub fn new(h: impl Fn(f64) -> f64, band: Band) -> Result<Self> {
        const PANELS: usize = 1024;
        let step = band.width() / PANELS as f64;
        let node = |i: usize| band.x_minus + i as f64 * step;
        let mut integral = Vec::with_capacity(PANELS + 1);
        let mut acc = 0.0;
        integral.push(0.0);
        for i in 0..PANELS {
            acc += quadrature::integrate(&h, node(i), node(i + 1), 1e-15)?.value;
            integral.push(acc);
        }
        let slope = (0..=PANELS).map(|i| h(node(i))).collect();
        let mut gs = GroundState {
            band,
            step,
            integral,
            slope,
            a0: 1.0,
        };
        let breaks: Vec<f64> = (0..=PANELS).step_by(16).map(node).collect();
        let norm = quadrature::integrate_with_breaks(
            |x| (2.0 * gs.log_shape(x)).exp(),
            &breaks,
            1e-15 * band.width(),
        )?
        .value;
        gs.a0 = norm.powf(-0.5);
        Ok(gs)
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// `∫_{x_-}^x h`.
    pub fn log_shape(&self, x: f64) -> f64 {
        let last = self.integral.len() - 1;
        let t = ((x - self.band.x_minus) / self.step).clamp(0.0, last as f64);
        let i = (t.floor() as usize).min(last - 1);
        let s = t - i as f64;
        let (p0, p1) = (self.integral[i], self.integral[i + 1]);
        let (m0, m1) = (self.slope[i] * self.step, self.slope[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * p0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * p1
            + (s3 - s2) * m1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a0 * self.log_shape(x).exp()
    }
}

/// Convenience wrapper returning the ground state as a shareable function.
pub fn ground_state(h: impl Fn(f64) -> f64, band: Band) -> Result<ScalarFn> {
    let gs = GroundState::new(h, band)?;
    Ok(Arc::new(move |x| gs.eval(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Band {
        Band::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn cos_first_energy() {
        let eig = cos_system(unit(), 0.1, 8).unwrap();
        assert!((eig.energy(1) - 0.049_348_022_005_446_79).abs() < 1e-15);
        assert_eq!(eig.energy(0), 0.0);
        assert!((eig.psi(0, 0.37) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tan_lambda_brackets_and_limits() {
        assert_eq!(tan_lambda(0, 2.0, 1.0, 1e-14).unwrap(), 2.0);
        let l1 = tan_lambda(1, 2.0, 1.0, 1e-14).unwrap();
        assert!(l1 > PI && l1 < 2.0 * PI);
        let rhs = 2.0 * 1.0f64.tan();
        assert!((l1 * ((l1 - PI) / 2.0).tan() - rhs).abs() < 1e-12);
        for n in 1..6 {
            let lam = tan_lambda(n, 1e-6, 1.0, 1e-14).unwrap();
            assert!((lam - PI * n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn tan_lambda_rejects_bad_nu() {
        assert!(tan_lambda(1, PI, 1.0, 1e-14).is_err());
        assert!(tan_lambda(1, 0.0, 1.0, 1e-14).is_err());
        assert!(tan_system(-1.0, unit(), 0.1, 4).is_err());
    }

    #[test]
    fn amplitude_series_branch_matches_direct() {
        let lam = PI * 3.0 + 5e-7;
        let direct = (0.5 * (1.0 + (-1.0f64).powi(3) * lam.sin() / lam)).powf(-0.5);
        assert!((tan_amplitude(3, lam, 1.0) - direct).abs() < 1e-9);
    }

    #[test]
    fn numeric_grid_validation() {
        let zero: ScalarFn = Arc::new(|_| 0.0);
        assert!(numeric_system(zero.clone(), 0.0, 0.0, unit(), 0.1, 4, 200).is_err());
        assert!(numeric_system(zero.clone(), 0.0, 0.0, unit(), 0.1, 4, 101).is_err());
        assert!(numeric_system(zero, 0.0, 0.0, unit(), 0.1, 4, 401).is_ok());
    }

    #[test]
    fn inconsistent_robin_data_rejected() {
        let zero: ScalarFn = Arc::new(|_| 0.0);
        let err = numeric_system(zero, 0.5, 0.5, unit(), 0.1, 4, 401).unwrap_err();
        assert!(matches!(err, Error::InconsistentPotential { .. }));
    }

    #[test]
    fn ground_state_flat_for_zero_slope() {
        let psi0 = ground_state(|_| 0.0, unit()).unwrap();
        assert!((psi0(0.3) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn csv_report_has_header_and_rows() {
        let eig = cos_system(unit(), 0.1, 3).unwrap();
        let csv = eig.csv_report();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "n,E_n,lambda_n,a_n");
        assert_eq!(lines.len(), 5);
        assert!(lines[2].starts_with("1,4.9348022005446"));
    }
}
