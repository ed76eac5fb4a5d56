//! `ratio-tail`: command-line front-end for simulation, distribution
//! functions, Hill estimation and the gamma test.

mod error;
mod grid;
mod io;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use ratio_tail::dist::{self, GammaFn, Method, Side};
use ratio_tail::estimate::{self, hill};
use ratio_tail::gammatest::{gamma_test, power_simulation, Variant};
use ratio_tail::sampler::SampleBatch;
use ratio_tail::{Exec, ModelSpec, SpectralModel};

use crate::error::CliError;
use crate::grid::parse_grid;

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "ratio-tail", version, about = "Ratios of bivariate 1-Fréchet extremes")]
struct Cli {
    /// Run Monte Carlo loops on the calling thread (results are identical either way).
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArg {
    /// Model as JSON, e.g. '{"form":"logistic","alpha":2}', or @path to a JSON file.
    #[arg(long)]
    model: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw i.i.d. pairs; CSV with columns i, x, y.
    Sample {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate joint, ratio and conditional distribution functions; JSON.
    Cdf {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long)]
        x: Option<f64>,
        #[arg(long)]
        y: Option<f64>,
        /// Level of the ratio X/Y.
        #[arg(long)]
        t: Option<f64>,
        /// Threshold for X(u) = max(X, u).
        #[arg(long, default_value_t = 0.0)]
        u: f64,
        #[arg(long, value_enum, default_value_t = SideArg::Plus)]
        side: SideArg,
        /// Sample size for the norming constant kappa_n.
        #[arg(long = "norming-n")]
        norming_n: Option<u64>,
        /// Threshold sequence value u_n for kappa_n = (1/gamma)^<-(n/u_n).
        #[arg(long = "u-n")]
        u_n: Option<f64>,
    },
    /// Tabulate gamma_+ and gamma_- over a t-grid; CSV.
    ///
    /// Grid syntax: `a:b:step`, `a:b:log` (50 log-spaced points), `a:b:log:N`, or `v1,v2,...`.
    GammaFn {
        #[command(flatten)]
        model: ModelArg,
        #[arg(long = "t-grid")]
        t_grid: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hill estimate of 1/alpha from one-column data or `sample` output (as ratios); JSON.
    Hill {
        /// CSV file; stdin when omitted or `-`.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of order statistics; default floor(n^0.3).
        #[arg(long)]
        k: Option<usize>,
        /// Threshold applied to paired data before forming ratios.
        #[arg(long, default_value_t = 0.0)]
        u: f64,
    },
    /// Gamma test of independence on paired data; JSON.
    GammaTest {
        /// Paired CSV (x, y or i, x, y); stdin when omitted or `-`.
        #[arg(long, conflicts_with = "model")]
        input: Option<PathBuf>,
        /// Simulate the data from this model instead of reading it.
        #[arg(long, requires = "n")]
        model: Option<String>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[arg(long, default_value_t = 0.0)]
        u: f64,
        #[arg(long, value_enum, default_value_t = VariantArg::Modified)]
        variant: VariantArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Empirical and limiting power of the gamma test under rho(ρ); CSV.
    PowerCurve {
        #[arg(long = "rho-grid", default_value = "0.05:1.0:0.05")]
        rho_grid: String,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long, default_value_t = 0.05)]
        level: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a model and print its summary; JSON.
    Check {
        #[command(flatten)]
        model: ModelArg,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SideArg {
    Plus,
    Minus,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Plus => Side::Plus,
            SideArg::Minus => Side::Minus,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum MethodArg {
    Auto,
    Numeric,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum VariantArg {
    Original,
    Modified,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Original => Variant::Original,
            VariantArg::Modified => Variant::Modified,
        }
    }
}

fn load_model(arg: &str) -> Result<(SpectralModel, Value), CliError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    let spec = ModelSpec::from_json(&text)?;
    let model = spec.build()?;
    let value = serde_json::to_value(&spec).expect("model spec serializes");
    Ok((model, value))
}

fn header(command: &str, config: Value) -> String {
    let mut h = json!({ "tool": "ratio-tail", "version": VERSION, "command": command });
    if let (Value::Object(m), Value::Object(c)) = (&mut h, config) {
        m.extend(c);
    }
    format!("# {h}")
}

fn write_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut out = io::sink(None)?;
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{text}")?;
    out.flush()?;
    Ok(())
}

fn with_meta(command: &str, config: Value, body: Value) -> Value {
    let mut meta = json!({ "tool": "ratio-tail", "version": VERSION, "command": command });
    if let (Value::Object(m), Value::Object(c)) = (&mut meta, config) {
        m.extend(c);
    }
    let mut body = body;
    if let Value::Object(b) = &mut body {
        b.insert("meta".into(), meta);
    }
    body
}

fn check_finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::input(format!("{name} must be finite")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::default() };
    match cli.command {
        Command::Sample { model, n, seed, out } => {
            if n == 0 {
                return Err(CliError::input("n must be >= 1"));
            }
            let (m, spec) = load_model(&model.model)?;
            let batch = SampleBatch::generate(&m, n, seed, exec)?;
            let mut w = io::sink(out.as_deref())?;
            writeln!(w, "{}", header("sample", json!({ "model": spec, "seed": seed, "n": n })))?;
            writeln!(w, "i,x,y")?;
            for (i, (x, y)) in batch.pairs.iter().enumerate() {
                writeln!(w, "{i},{x},{y}")?;
            }
            w.flush()?;
        }
        Command::Cdf {
            model,
            x,
            y,
            t,
            u,
            side,
            norming_n,
            u_n,
        } => {
            let (m, spec) = load_model(&model.model)?;
            let mut body = serde_json::Map::new();
            if let (Some(x), Some(y)) = (x, y) {
                body.insert("x".into(), json!(x));
                body.insert("y".into(), json!(y));
                body.insert("joint_cdf".into(), json!(dist::joint_cdf(&m, x, y)?));
                body.insert("conditional_cdf".into(), json!(dist::conditional_cdf(&m, x, y)?));
            } else if x.is_some() || y.is_some() {
                return Err(CliError::input("--x and --y must be given together"));
            }
            if let Some(t) = t {
                check_finite("t", t)?;
                let s = Side::from(side);
                let n = dist::norms(&m, t)?;
                body.insert("t".into(), json!(t));
                body.insert("u".into(), json!(u));
                body.insert("ratio_joint".into(), json!(dist::ratio_joint(&m, t, u)?));
                body.insert(
                    "ratio_tail".into(),
                    if t >= 1.0 { json!(dist::ratio_tail(&m, t, u)?) } else { Value::Null },
                );
                body.insert("norms".into(), serde_json::to_value(n).expect("norms serialize"));
                if t > 0.0 {
                    body.insert("gamma".into(), json!(dist::gamma(&m, s, t)?));
                }
            }
            body.insert("tail_dependence".into(), json!(dist::tail_dependence(&m)?));
            if let Some(n) = norming_n {
                let s = Side::from(side);
                let kappa = match u_n {
                    Some(un) => dist::norming_threshold_sequence(&m, s, n, un)?,
                    None => dist::norming(&m, s, n, u)?,
                };
                body.insert(
                    "norming".into(),
                    json!({ "side": side_name(s), "n": n, "u": u, "u_n": u_n, "kappa": kappa }),
                );
            }
            let config = json!({ "model": spec, "side": side_name(side.into()) });
            write_json(&with_meta("cdf", config, Value::Object(body)))?;
        }
        Command::GammaFn {
            model,
            t_grid,
            method,
            out,
        } => {
            let (m, spec) = load_model(&model.model)?;
            let grid = parse_grid(&t_grid)?;
            if let Some(bad) = grid.iter().find(|t| !(**t > 0.0)) {
                return Err(CliError::input(format!("t-grid values must be > 0, found {bad}")));
            }
            let method = match method {
                MethodArg::Auto => Method::Auto,
                MethodArg::Numeric => Method::Numeric,
            };
            let plus = GammaFn::with_method(&m, Side::Plus, method);
            let minus = GammaFn::with_method(&m, Side::Minus, method);
            let rows = exec.try_map(grid.len(), |i| {
                let t = grid[i];
                let n = plus.norms(t)?;
                Ok::<_, ratio_tail::Error>((t, n.f_e / t, minus.eval(t)?, n.f_e, n.g_d))
            })?;
            let mut w = io::sink(out.as_deref())?;
            let cfg = json!({ "model": spec, "t_grid": t_grid, "method": format!("{method:?}").to_lowercase() });
            writeln!(w, "{}", header("gamma-fn", cfg))?;
            writeln!(w, "t,gamma_plus,gamma_minus,norm_f_Et,norm_g_Dt")?;
            for (t, gp, gm, fe, gd) in rows {
                writeln!(w, "{t},{gp},{gm},{fe},{gd}")?;
            }
            w.flush()?;
        }
        Command::Hill { input, k, u } => {
            if !(u >= 0.0) || !u.is_finite() {
                return Err(CliError::input("u must be finite and >= 0"));
            }
            let table = io::parse_table(&io::read_input(input.as_deref())?)?;
            let data: Vec<f64> = if table.columns == 1 {
                table.rows.iter().map(|r| r[0]).collect()
            } else {
                table.pairs()?.iter().map(|&(x, y)| x.max(u) / y.max(u)).collect()
            };
            let k = k.unwrap_or_else(|| estimate::default_k(data.len()));
            let est = hill(&data, k)?;
            let body = serde_json::to_value(est).expect("estimate serializes");
            let config = json!({ "u": u, "columns": table.columns });
            write_json(&with_meta("hill", config, body))?;
        }
        Command::GammaTest {
            input,
            model,
            n,
            level,
            u,
            variant,
            seed,
        } => {
            let (pairs, source) = match model {
                Some(spec_text) => {
                    let (m, spec) = load_model(&spec_text)?;
                    let n = n.expect("clap enforces --n with --model");
                    if n == 0 {
                        return Err(CliError::input("n must be >= 1"));
                    }
                    let b = SampleBatch::generate(&m, n, seed, exec)?;
                    (b.pairs, json!({ "model": spec, "n": n }))
                }
                None => {
                    let table = io::parse_table(&io::read_input(input.as_deref())?)?;
                    let src = input.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".into());
                    (table.pairs()?, json!({ "input": src }))
                }
            };
            let report = gamma_test(&pairs, level, u, variant.into())?;
            let body = serde_json::to_value(report).expect("report serializes");
            let mut config = json!({ "level": level, "u": u, "variant": Variant::from(variant).to_string(), "seed": seed });
            if let (Value::Object(c), Value::Object(s)) = (&mut config, source) {
                c.extend(s);
            }
            write_json(&with_meta("gamma-test", config, body))?;
        }
        Command::PowerCurve {
            rho_grid,
            n,
            reps,
            level,
            seed,
            out,
        } => {
            let grid = parse_grid(&rho_grid)?;
            let curve = power_simulation(&grid, n, reps, level, seed, exec)?;
            let mut w = io::sink(out.as_deref())?;
            let cfg = json!({ "rho_grid": rho_grid, "n": n, "reps": reps, "level": level, "seed": seed, "variant": "modified" });
            writeln!(w, "{}", header("power-curve", cfg))?;
            writeln!(w, "rho,empirical_power,limit_power,reps")?;
            for p in &curve.points {
                writeln!(w, "{},{},{},{}", p.rho, p.empirical_power, p.limit_power, p.reps)?;
            }
            w.flush()?;
        }
        Command::Check { model } => {
            let (m, spec) = load_model(&model.model)?;
            let (f_total, g_total) = m.total_masses()?;
            let index = |s: Side| match dist::ratio_tail_index(&m, s) {
                Ok(a) => json!(a),
                Err(e) => json!({ "undefined": e.to_string() }),
            };
            let sup = m.ratio_supremum();
            let body = json!({
                "valid": true,
                "form": m.form(),
                "symmetric": m.form().is_symmetric(),
                "atoms": m.atoms().len(),
                "has_density": m.density().is_some(),
                "f_total": f_total,
                "g_total": g_total,
                "ratio_supremum": if sup.is_finite() { json!(sup) } else { json!("inf") },
                "tail_dependence": dist::tail_dependence(&m)?,
                "ratio_tail_index_plus": index(Side::Plus),
                "ratio_tail_index_minus": index(Side::Minus),
            });
            write_json(&with_meta("check", json!({ "model": spec }), body))?;
        }
    }
    Ok(())
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Plus => "plus",
        Side::Minus => "minus",
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let err = CliError::input(e.to_string().trim().replace('\n', " "));
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}
