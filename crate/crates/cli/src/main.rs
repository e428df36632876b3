//! `tzo`: price, hedge and validate FX claims in a target-zone model.
//!
//! Exit status is 0 on success, 2 for invalid input (bad config, spot or
//! strike outside the band, ...) and 3 when a numerical routine fails.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tzo_core::eigen::DEFAULT_N_MAX;
use tzo_core::mc::{self, McConfig};
use tzo_core::robin::{self, RobinDensityParams};
use tzo_core::zone_model::{Band, ModelConfig, ModelKind, ZoneModel};
use tzo_core::{Claim, Pricer};

use config::RunConfig;
use output::{csv_row, Json};

#[derive(Parser)]
#[command(name = "tzo", version, about = "Target-zone FX option pricing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price one claim and report its replicating holdings (JSON).
    Price(PriceArgs),
    /// Strike × tenor price grid (CSV).
    Curve(CurveArgs),
    /// Eigenvalue report `n,E_n,lambda_n,a_n` (CSV).
    Eigen(EigenArgs),
    /// Robin-boundary transition density of constant-drift Brownian motion (CSV).
    Density(DensityArgs),
    /// Compare the series price with a Monte Carlo estimate (JSON).
    McValidate(McValidateArgs),
    /// Terminal RMS error of discrete delta hedging (JSON).
    Replicate(ReplicateArgs),
    /// Fit (s_mid, gamma) to a market band and print the model block (JSON).
    FitBand(FitBandArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ClaimKind {
    Call,
    Put,
    Binary,
    Bond,
    Forward,
}

#[derive(Args)]
struct ModelArgs {
    /// Model JSON: a bare model block or `{"model": ..., "mc": ..., "domestic_df": ...}`.
    #[arg(long)]
    config: PathBuf,
    /// Highest eigen-index kept in the series.
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    n_max: usize,
}

#[derive(Args)]
struct ClaimArgs {
    #[arg(long, value_enum)]
    claim: ClaimKind,
    /// Strike in FX units (forward defaults to 0; unused for bonds).
    #[arg(long)]
    strike: Option<f64>,
    #[arg(long)]
    spot: f64,
    /// Time to maturity in years.
    #[arg(long)]
    tenor: f64,
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    claim: ClaimArgs,
    /// Deterministic domestic discount factor applied to all outputs.
    #[arg(long)]
    domestic_df: Option<f64>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    spot: f64,
    /// Comma-separated strikes.
    #[arg(long, value_delimiter = ',', required = true)]
    strikes: Vec<f64>,
    /// Comma-separated tenors in years.
    #[arg(long, value_delimiter = ',', required = true)]
    tenors: Vec<f64>,
    #[arg(long)]
    domestic_df: Option<f64>,
}

#[derive(Args)]
struct EigenArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Grid size for numerically solved models (odd).
    #[arg(long)]
    grid_points: Option<usize>,
}

#[derive(Args)]
struct DensityArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rho: f64,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    /// Starting state.
    #[arg(long)]
    x: f64,
    #[arg(long)]
    tau: f64,
    /// Number of equally spaced x' points on [0, L].
    #[arg(long, default_value_t = 101)]
    points: usize,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    paths: Option<usize>,
    /// Simulation step in years (default 1e-4 × tenor).
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct McValidateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    claim: ClaimArgs,
    #[command(flatten)]
    mc: McArgs,
    #[arg(long)]
    domestic_df: Option<f64>,
}

#[derive(Args)]
struct ReplicateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    claim: ClaimArgs,
    #[command(flatten)]
    mc: McArgs,
    /// Comma-separated rebalance counts.
    #[arg(long, value_delimiter = ',', default_values_t = [32, 64, 128, 256])]
    steps: Vec<usize>,
}

#[derive(Args)]
struct FitBandArgs {
    #[arg(long, value_enum)]
    kind: FitKind,
    #[arg(long)]
    s_minus: f64,
    #[arg(long)]
    s_plus: f64,
    #[arg(long)]
    sigma: f64,
    /// Tangent-model frequency (required for `tan`).
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    x_minus: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    x_plus: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitKind {
    Cos,
    Tan,
    Quartic,
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<tzo_core::Error> for Failure {
    fn from(e: tzo_core::Error) -> Self {
        Failure {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(f) = configure_threads() {
        eprintln!("error: {}", f.message);
        return ExitCode::from(f.code);
    }
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// `TZO_THREADS` caps the Monte Carlo worker pool; results do not depend on it.
fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("TZO_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::input(format!("TZO_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("cannot configure worker pool: {e}")))
}

fn run(command: Command) -> CliResult<String> {
    match command {
        Command::Price(a) => price(a),
        Command::Curve(a) => curve(a),
        Command::Eigen(a) => eigen(a),
        Command::Density(a) => density(a),
        Command::McValidate(a) => mc_validate(a),
        Command::Replicate(a) => replicate(a),
        Command::FitBand(a) => fit_band(a),
    }
}

fn load(args: &ModelArgs) -> CliResult<(RunConfig, ZoneModel)> {
    let cfg = config::load(&args.config)?;
    let model = cfg.model.build()?;
    Ok((cfg, model))
}

fn claim_of(args: &ClaimArgs) -> CliResult<Claim> {
    let strike = |name: &str| {
        args.strike
            .ok_or_else(|| Failure::input(format!("--strike is required for the {name} claim")))
    };
    Ok(match args.claim {
        ClaimKind::Call => Claim::Call(strike("call")?),
        ClaimKind::Put => Claim::Put(strike("put")?),
        ClaimKind::Binary => Claim::Binary(strike("binary")?),
        ClaimKind::Bond => Claim::Bond,
        ClaimKind::Forward => Claim::Forward(args.strike.unwrap_or(0.0)),
    })
}

fn check_strike(model: &ZoneModel, claim: &Claim) -> CliResult<()> {
    if let Some(k) = claim.strike() {
        let b = model.fx_band();
        let is_forward = matches!(claim, Claim::Forward(_));
        if !is_forward && !b.contains(k) {
            return Err(Failure::input(format!(
                "strike {k} outside the band [{}, {}]",
                b.s_minus, b.s_plus
            )));
        }
    }
    Ok(())
}

fn domestic(flag: Option<f64>, cfg: &RunConfig) -> CliResult<f64> {
    let d = flag.or(cfg.domestic_df).unwrap_or(1.0);
    if !(d > 0.0 && d.is_finite()) {
        return Err(Failure::input(format!("domestic discount factor must be positive, got {d}")));
    }
    Ok(d)
}

fn price(a: PriceArgs) -> CliResult<String> {
    let (cfg, model) = load(&a.model)?;
    let df = domestic(a.domestic_df, &cfg)?;
    let claim = claim_of(&a.claim)?;
    check_strike(&model, &claim)?;
    let pricer = Pricer::new(model, a.model.n_max)?;
    let (spot, tenor) = (a.claim.spot, a.claim.tenor);
    let res = pricer.price(&claim, spot, tenor)?;
    // With B_t = 1 the bond holding is V - φ S.
    let (delta, holding) = if claim.is_hedgeable(pricer.model()) {
        let phi = pricer.delta(&claim, spot, tenor)?;
        (Some(phi * df), Some(tzo_core::hedging::bond_holding(res.value, phi, spot) * df))
    } else {
        (None, None)
    };
    Ok(Json::Obj(vec![
        ("value", Json::Num(res.value * df)),
        ("delta", Json::opt(delta)),
        ("bond_holding", Json::opt(holding)),
        ("n_used", Json::Int(res.n_used as u64)),
        ("tail_bound", Json::Num(res.tail_bound * df)),
        ("x_hat", Json::Num(res.x_hat)),
    ])
    .render())
}

fn curve(a: CurveArgs) -> CliResult<String> {
    let (cfg, model) = load(&a.model)?;
    let df = domestic(a.domestic_df, &cfg)?;
    for &k in &a.strikes {
        check_strike(&model, &Claim::Call(k))?;
    }
    let pricer = Pricer::new(model, a.model.n_max)?;
    let mut out = String::from("strike,tenor,call,put,binary,bond,forward\n");
    for &tau in &a.tenors {
        let bond = pricer.bond(a.spot, tau)?.value;
        for &k in &a.strikes {
            let row = [
                k,
                tau,
                pricer.call(a.spot, k, tau)?.value * df,
                pricer.put(a.spot, k, tau)?.value * df,
                pricer.binary(a.spot, k, tau)?.value * df,
                bond * df,
                pricer.forward(a.spot, k, tau)?.value * df,
            ];
            out.push_str(&csv_row(&row));
        }
    }
    Ok(out)
}

fn eigen(a: EigenArgs) -> CliResult<String> {
    let (_, model) = load(&a.model)?;
    let eig = match a.grid_points {
        Some(g) => model.numeric_eigen_system(a.model.n_max, g)?,
        None => model.eigen_system(a.model.n_max)?,
    };
    Ok(eig.csv_report())
}

fn density(a: DensityArgs) -> CliResult<String> {
    let params = RobinDensityParams::new(a.mu, a.sigma, a.rho, a.length)?;
    if a.points < 2 {
        return Err(Failure::input("--points must be at least 2"));
    }
    let grid: Vec<f64> = (0..a.points)
        .map(|i| a.length * i as f64 / (a.points - 1) as f64)
        .collect();
    let values = robin::density_curve(a.x, a.tau, &params, &grid)?;
    let mut out = String::from("x_prime,P\n");
    for (x, p) in grid.iter().zip(&values) {
        out.push_str(&csv_row(&[*x, *p]));
    }
    Ok(out)
}

fn mc_config(args: &McArgs, cfg: &RunConfig, tenor: f64, default_paths: usize) -> McConfig {
    let block = cfg.mc.clone().unwrap_or_default();
    McConfig::new(
        args.paths.or(block.paths).unwrap_or(default_paths),
        args.dt.or(block.dt).unwrap_or(1e-4 * tenor),
        args.seed.or(block.seed).unwrap_or(0),
    )
}

fn mc_validate(a: McValidateArgs) -> CliResult<String> {
    let (cfg, model) = load(&a.model)?;
    let df = domestic(a.domestic_df, &cfg)?;
    let claim = claim_of(&a.claim)?;
    check_strike(&model, &claim)?;
    let mc_cfg = mc_config(&a.mc, &cfg, a.claim.tenor, 200_000);
    let pricer = Pricer::new(model, a.model.n_max)?;
    let series = pricer.price(&claim, a.claim.spot, a.claim.tenor)?.value;
    let est = mc::mc_price(&claim, pricer.model(), a.claim.spot, a.claim.tenor, &mc_cfg)?;
    let z = if est.std_error > 0.0 {
        (est.mean - series) / est.std_error
    } else if est.mean == series {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(Json::Obj(vec![
        ("series_price", Json::Num(series * df)),
        ("mc_mean", Json::Num(est.mean * df)),
        ("mc_se", Json::Num(est.std_error * df)),
        ("z_score", Json::Num(z)),
    ])
    .render())
}

fn replicate(a: ReplicateArgs) -> CliResult<String> {
    let (cfg, model) = load(&a.model)?;
    let claim = claim_of(&a.claim)?;
    check_strike(&model, &claim)?;
    let mc_cfg = mc_config(&a.mc, &cfg, a.claim.tenor, 4000);
    let pricer = Pricer::new(model, a.model.n_max)?;
    let results = mc::replicate_many(&claim, &pricer, a.claim.spot, a.claim.tenor, &a.steps, &mc_cfg)?;
    Ok(Json::Arr(
        results
            .iter()
            .map(|r| {
                Json::Obj(vec![
                    ("rebalance_steps", Json::Int(r.rebalance_steps as u64)),
                    ("rms", Json::Num(r.rms.mean)),
                    ("rms_se", Json::Num(r.rms.std_error)),
                    ("paths", Json::Int(r.rms.paths as u64)),
                ])
            })
            .collect(),
    )
    .render())
}

fn fit_band(a: FitBandArgs) -> CliResult<String> {
    let band = Band::new(a.x_minus, a.x_plus)?;
    let model = match a.kind {
        FitKind::Cos => ZoneModel::cosine_from_band(a.s_minus, a.s_plus, band, a.sigma)?,
        FitKind::Tan => {
            let nu = a.nu.ok_or_else(|| Failure::input("--nu is required for the tan model"))?;
            ZoneModel::tangent_from_band(a.s_minus, a.s_plus, nu, band, a.sigma)?
        }
        FitKind::Quartic => ZoneModel::quartic_from_band(a.s_minus, a.s_plus, band, a.sigma)?,
    };
    let c: ModelConfig = model.config();
    let kind = match c.kind {
        ModelKind::Cosine => "cos",
        ModelKind::Tangent => "tan",
        ModelKind::Quartic => "quartic",
        ModelKind::Custom => "custom",
    };
    let mut fields = vec![
        ("kind", Json::Str(kind.into())),
        ("s_mid", Json::Num(c.s_mid)),
        ("gamma", Json::Num(c.gamma)),
    ];
    if let Some(nu) = c.nu {
        fields.push(("nu", Json::Num(nu)));
    }
    fields.extend([
        ("sigma", Json::Num(c.sigma)),
        ("x_minus", Json::opt(c.x_minus)),
        ("x_plus", Json::opt(c.x_plus)),
    ]);
    Ok(Json::Obj(fields).render())
}
