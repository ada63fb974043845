//! `dprime`: resonance tables, transfer matrices, limit traces, transmission
//! sweeps and boundary-condition fits as CSV or JSON.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dprime_core::resonance::{adjacent_root, linear_root, nth};
use dprime_core::{
    bc_from_product, bound_state, classify_with, params_from_resonance, piecewise_transfer,
    predict, round_trip_residual, scattering, scattering_from_matrix, solve, trace_with,
    transfer_matrix, transmission_sweep, EntryVerdict, LimitConfig, Prediction, ProductParams,
    RectProfile, ResonanceFamily, ScatteringAmplitudes, SqueezePath,
};
use serde_json::{Map, Value};

use output::{json_f64, Cell, Format, Report, Table};

const DET_LIMIT: f64 = 1e-12;
const CONSERVATION_LIMIT: f64 = 1e-10;
const ROUND_TRIP_LIMIT: f64 = 1e-12;

#[derive(Parser, Debug)]
#[command(name = "dprime", version, about)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Write output to this file instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resonance couplings with their limiting connection-matrix data
    Resonances(ResonancesArgs),
    /// Transfer matrix and scattering amplitudes of one barrier-well
    Transfer(TransferArgs),
    /// Transfer-matrix entries along a squeeze path, with a limit verdict
    LimitTrace(LimitTraceArgs),
    /// Transmission probability over a coupling grid at fixed width
    Sweep(SweepArgs),
    /// Connection matrix, scattering and bound states of an (alpha, beta) product
    Bc(BcArgs),
    /// Product weights (alpha, beta) reproducing the n-th resonance
    BcFit(BcFitArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct ResonancesArgs {
    /// adjacent, linear[:C] or quadratic[:C]
    #[arg(long, default_value = "adjacent")]
    path: ResonanceFamily,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    /// Probe energy for R and T (k = sqrt(E))
    #[arg(long = "E", default_value_t = 1.0)]
    energy: f64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct TransferArgs {
    #[arg(long)]
    l: f64,
    #[arg(long, default_value_t = 0.0)]
    rho: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long = "E", default_value_t = 1.0)]
    energy: f64,
    /// Also report the distance to the region-by-region product
    #[arg(long)]
    check: bool,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct LimitTraceArgs {
    /// adjacent, barrier-first:RHO, power:C:TAU, linear[:C] or quadratic[:C]
    #[arg(long)]
    path: SqueezePath,
    #[arg(
        long,
        required_unless_present = "resonance",
        conflicts_with = "resonance"
    )]
    lambda: Option<f64>,
    /// Use the coupling of the n-th resonance of the path
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    resonance: Option<u64>,
    #[arg(long = "E", default_value_t = 1.0)]
    energy: f64,
    #[arg(long, default_value_t = 1e-1)]
    l_start: f64,
    #[arg(long, default_value_t = 1e-4)]
    l_end: f64,
    #[arg(long, default_value_t = 13, value_parser = clap::value_parser!(u64).range(8..))]
    points: u64,
    /// Smallest admissible l_end
    #[arg(long, default_value_t = dprime_core::limits::PRECISION_FLOOR)]
    floor: f64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    #[arg(long, default_value = "adjacent")]
    path: SqueezePath,
    #[arg(long)]
    l: f64,
    #[arg(long)]
    lambda_min: f64,
    #[arg(long)]
    lambda_max: f64,
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(2..))]
    samples: u64,
    #[arg(long = "E", default_value_t = 1.0)]
    energy: f64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct BcArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    lambda: f64,
    /// Wavenumber; defaults to sqrt(E)
    #[arg(long, conflicts_with = "energy")]
    k: Option<f64>,
    #[arg(long = "E", default_value_t = 1.0)]
    energy: f64,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct BcFitArgs {
    /// adjacent, linear[:C] or quadratic[:C]
    #[arg(long, default_value = "adjacent")]
    path: ResonanceFamily,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
    Io(io::Error),
}

impl From<dprime_core::Error> for Failure {
    fn from(e: dprime_core::Error) -> Self {
        match e {
            dprime_core::Error::InvalidParameter { .. } => Failure::Usage(e.to_string()),
            other => Failure::Numeric(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn violation(what: &str, residual: f64, limit: f64) -> Failure {
    Failure::Numeric(format!("{what}: residual {residual:e} exceeds {limit:e}"))
}

fn amplitude_cells(a: &ScatteringAmplitudes) -> Vec<Cell> {
    vec![a.r.re.into(), a.r.im.into(), a.t.re.into(), a.t.im.into()]
}

fn check_conservation(a: &ScatteringAmplitudes) -> Outcome<()> {
    let residual = a.conservation_residual();
    if residual <= CONSERVATION_LIMIT {
        Ok(())
    } else {
        Err(violation("|R|^2 + |T|^2 = 1", residual, CONSERVATION_LIMIT))
    }
}

fn wavenumber(energy: f64) -> Outcome<f64> {
    if energy.is_finite() && energy > 0.0 {
        Ok(energy.sqrt())
    } else {
        Err(Failure::Usage(format!("E must be > 0, got {energy}")))
    }
}

fn resonances(args: &ResonancesArgs) -> Outcome<Report> {
    let k = wavenumber(args.energy)?;
    let mut table = Table::new(&[
        "n", "sigma", "lambda", "chi", "g", "kappa", "R_re", "R_im", "T_re", "T_im", "k",
    ]);
    for r in solve(args.path, args.count as usize)? {
        let amps = r.scattering(k)?;
        check_conservation(&amps)?;
        let mut row: Vec<Cell> = vec![
            r.n.into(),
            r.sigma.into(),
            r.lambda.into(),
            r.chi.into(),
            r.g.into(),
            r.kappa.into(),
        ];
        row.extend(amplitude_cells(&amps));
        row.push(k.into());
        table.push(row);
    }
    Ok(Report::plain(table))
}

fn transfer(args: &TransferArgs) -> Outcome<Report> {
    let k = wavenumber(args.energy)?;
    let profile = RectProfile::new(args.l, args.rho, args.lambda)?;
    let tm = transfer_matrix(&profile, args.energy)?;
    let det_residual = tm.det_residual();
    if det_residual > DET_LIMIT {
        return Err(violation("det = 1", det_residual, DET_LIMIT));
    }
    let amps = scattering(&tm, k)?;
    check_conservation(&amps)?;

    let mut columns = vec![
        "l",
        "rho",
        "lambda",
        "E",
        "L11",
        "L12",
        "L21",
        "L22",
        "det",
        "det_residual",
        "R_re",
        "R_im",
        "T_re",
        "T_im",
        "T2",
        "R2",
        "conservation",
    ];
    let [l11, l12, l21, l22] = tm.flat();
    let mut row: Vec<Cell> = vec![
        args.l.into(),
        args.rho.into(),
        args.lambda.into(),
        args.energy.into(),
        l11.into(),
        l12.into(),
        l21.into(),
        l22.into(),
        tm.det().into(),
        det_residual.into(),
    ];
    row.extend(amplitude_cells(&amps));
    row.extend([
        amps.transmittance().into(),
        amps.reflectance().into(),
        amps.conservation_residual().into(),
    ]);
    if args.check {
        columns.push("oracle_residual");
        let oracle = piecewise_transfer(&profile, args.energy)?;
        row.push(tm.max_relative_difference(&oracle).into());
    }
    let mut table = Table::new(&columns);
    table.push(row);
    Ok(Report::plain(table))
}

fn resonance_coupling(path: SqueezePath, n: usize) -> Outcome<f64> {
    let sigma = match path {
        SqueezePath::PowerLaw { c, tau: 1.0 } => linear_root(n, c)?,
        _ => adjacent_root(n)?,
    };
    Ok(sigma * sigma)
}

fn verdict_json(v: &EntryVerdict, slope: f64) -> Value {
    let mut obj = Map::new();
    match *v {
        EntryVerdict::Divergent { slope } => {
            obj.insert("kind".into(), "divergent".into());
            obj.insert("slope".into(), json_f64(slope));
        }
        EntryVerdict::Converges { value, error } => {
            obj.insert("kind".into(), "converges".into());
            obj.insert("value".into(), json_f64(value));
            obj.insert("error".into(), json_f64(error));
            obj.insert("slope".into(), json_f64(slope));
        }
    }
    Value::Object(obj)
}

fn prediction_json(p: &Prediction) -> Value {
    let mut obj = Map::new();
    match *p {
        Prediction::Separated => {
            obj.insert("kind".into(), "separated".into());
        }
        Prediction::Connection { n, chi, g } => {
            obj.insert("kind".into(), "connection".into());
            obj.insert("n".into(), Value::from(n));
            obj.insert("chi".into(), json_f64(chi));
            obj.insert("g".into(), json_f64(g));
        }
    }
    Value::Object(obj)
}

fn limit_trace(args: &LimitTraceArgs) -> Outcome<Report> {
    let lambda = match (args.lambda, args.resonance) {
        (Some(lambda), _) => lambda,
        (None, Some(n)) => resonance_coupling(args.path, n as usize)?,
        (None, None) => unreachable!("clap requires one of --lambda, --resonance"),
    };
    let config = LimitConfig {
        precision_floor: args.floor,
        ..LimitConfig::default()
    };
    let trace = trace_with(
        args.path,
        lambda,
        args.energy,
        args.l_start,
        args.l_end,
        args.points as usize,
        &config,
    )?;
    let mut table = Table::new(&["l", "rho", "L11", "L12", "L21", "L22", "det"]);
    for row in &trace.rows {
        let residual = row.matrix.det_residual();
        if residual > DET_LIMIT {
            return Err(violation("det = 1", residual, DET_LIMIT));
        }
        let [a, b, c, d] = row.matrix.flat();
        table.push(vec![
            row.l.into(),
            row.rho.into(),
            a.into(),
            b.into(),
            c.into(),
            d.into(),
            row.matrix.det().into(),
        ]);
    }

    let verdict = classify_with(&trace, &config)?;
    let mut entries = Map::new();
    for (i, name) in ["L11", "L12", "L21", "L22"].iter().enumerate() {
        entries.insert(
            name.to_string(),
            verdict_json(&verdict.entries[i], verdict.slopes[i]),
        );
    }
    let mut extra = Map::new();
    extra.insert("path".into(), Value::from(args.path.to_string()));
    extra.insert("lambda".into(), json_f64(lambda));
    extra.insert("E".into(), json_f64(args.energy));
    extra.insert("verdict".into(), Value::Object(entries));
    if lambda > 0.0 {
        let prediction = predict(args.path, lambda)?;
        extra.insert("prediction".into(), prediction_json(&prediction));
        extra.insert(
            "agrees".into(),
            Value::from(verdict.agrees_with(&prediction)),
        );
    }
    Ok(Report {
        table,
        extra: Some(extra),
    })
}

fn sweep(args: &SweepArgs) -> Outcome<Report> {
    let s = transmission_sweep(
        args.path,
        args.l,
        args.lambda_min,
        args.lambda_max,
        args.samples as usize,
        args.energy,
    )?;
    let mut table = Table::new(&["lambda", "T2", "R2"]);
    for p in &s.points {
        let residual = (p.t2 + p.r2 - 1.0).abs();
        if residual > CONSERVATION_LIMIT {
            return Err(violation("|R|^2 + |T|^2 = 1", residual, CONSERVATION_LIMIT));
        }
        table.push(vec![p.lambda.into(), p.t2.into(), p.r2.into()]);
    }
    let peaks: Vec<Value> = s
        .peaks
        .iter()
        .map(|p| {
            let mut obj = Map::new();
            obj.insert("index".into(), Value::from(p.index));
            obj.insert("lambda".into(), json_f64(p.lambda));
            obj.insert("T2".into(), json_f64(p.t2));
            Value::Object(obj)
        })
        .collect();
    let mut extra = Map::new();
    extra.insert("path".into(), Value::from(args.path.to_string()));
    extra.insert("l".into(), json_f64(args.l));
    extra.insert("E".into(), json_f64(args.energy));
    extra.insert("peaks".into(), Value::Array(peaks));
    Ok(Report {
        table,
        extra: Some(extra),
    })
}

fn bc(args: &BcArgs) -> Outcome<Report> {
    let k = match args.k {
        Some(k) if k.is_finite() && k > 0.0 => k,
        Some(k) => return Err(Failure::Usage(format!("k must be > 0, got {k}"))),
        None => wavenumber(args.energy)?,
    };
    let params = ProductParams::new(args.alpha, args.beta)?;
    let cm = bc_from_product(params, args.lambda)?;
    let amps = scattering_from_matrix(&cm, k)?;
    check_conservation(&amps)?;
    let kappas: Vec<String> = bound_state(&cm)?.into_iter().map(output::float).collect();

    let mut table = Table::new(&[
        "alpha",
        "beta",
        "lambda",
        "k",
        "A",
        "B",
        "R_re",
        "R_im",
        "T_re",
        "T_im",
        "bound_states",
    ]);
    let mut row: Vec<Cell> = vec![
        args.alpha.into(),
        args.beta.into(),
        args.lambda.into(),
        k.into(),
        cm.get(1, 1).into(),
        cm.get(2, 1).into(),
    ];
    row.extend(amplitude_cells(&amps));
    row.push(kappas.join(";").into());
    table.push(row);
    Ok(Report::plain(table))
}

fn bc_fit(args: &BcFitArgs) -> Outcome<Report> {
    let r = nth(args.path, args.n as usize)?;
    let params = params_from_resonance(r.lambda, r.chi, r.g)?;
    let residual = round_trip_residual(params, r.lambda, r.chi, r.g)?;
    if residual > ROUND_TRIP_LIMIT {
        return Err(violation(
            "round trip (alpha, beta) -> (chi, g)",
            residual,
            ROUND_TRIP_LIMIT,
        ));
    }
    let mut table = Table::new(&[
        "n", "lambda_n", "chi_n", "g_n", "alpha_n", "beta_n", "residual",
    ]);
    table.push(vec![
        r.n.into(),
        r.lambda.into(),
        r.chi.into(),
        r.g.into(),
        params.alpha().into(),
        params.beta().into(),
        residual.into(),
    ]);
    Ok(Report::plain(table))
}

fn run(cli: &Cli) -> Outcome<()> {
    let report = match &cli.command {
        Command::Resonances(a) => resonances(a)?,
        Command::Transfer(a) => transfer(a)?,
        Command::LimitTrace(a) => limit_trace(a)?,
        Command::Sweep(a) => sweep(a)?,
        Command::Bc(a) => bc(a)?,
        Command::BcFit(a) => bc_fit(a)?,
    };
    let text = report.render(cli.format);
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
