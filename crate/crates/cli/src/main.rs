//! `manin-d4`: point counts, the predicted constant, verification suites and
//! exports for the split D4 cubic surface.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use manin_d4::calibration::{calibrate, CALIBRATION_CORPUS_SIZE, CALIBRATION_SEED};
use manin_d4::density::{peyre_constant, PeyreFixture, QuadratureConfig};
use manin_d4::torsor::{
    asymptotic_report, brute_force_count, torsor_count, torsor_points, torsor_to_point, write_points_csv,
    write_torsor_csv, SurfacePoint, ASYMPTOTIC_NOTE,
};
use manin_d4::verify::{run_suites, VerifyOptions, VerifySuite};
use manin_d4::{Error, Result};

use output::{to_json, Table, SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "manin-d4", version, about = "Rational points of bounded height on x0 (x1 + x2 + x3)^2 = x1 x2 x3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads (default: one per core). Output does not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1024))]
    threads: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Brute,
    Torsor,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExportKind {
    Points,
    Torsor,
}

#[derive(Subcommand)]
enum Command {
    /// Count points of height at most B off the lines.
    Count {
        #[arg(short = 'B', long, value_parser = height_parser())]
        height: u64,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
    },
    /// Compute the predicted leading constant and its factors.
    Peyre {
        #[command(flatten)]
        density: DensityArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification suite.
    Verify {
        /// lemma1, lemma2, lemma4, lemma5, lemma6, lemma8, lemma9, lemma10, torsor, local or all.
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Height for the torsor suite.
        #[arg(short = 'B', long, default_value_t = 100, value_parser = height_parser())]
        height: u64,
        #[command(flatten)]
        density: DensityArgs,
    },
    /// Compare N(B) / (B log(B)^6) with the checked-in constant.
    Asymptotic {
        /// Comma-separated heights; may be empty.
        #[arg(long, default_value = "", value_parser = parse_heights)]
        heights: HeightList,
    },
    /// Export points or torsor points of height at most B as sorted rows.
    Export {
        #[arg(short = 'B', long, value_parser = height_parser())]
        height: u64,
        #[arg(long, value_enum, default_value_t = ExportKind::Points)]
        kind: ExportKind,
    },
    /// Recompute the calibration constants of the bounded-error suites.
    Calibrate {
        #[arg(long, default_value_t = CALIBRATION_SEED)]
        seed: u64,
        #[arg(long, default_value_t = CALIBRATION_CORPUS_SIZE)]
        corpus_size: usize,
    },
}

#[derive(Args)]
struct DensityArgs {
    /// Prime cutoff of the Euler product.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(100..))]
    primes: u64,
    #[arg(long, default_value_t = QuadratureConfig::default().quad_tol, value_parser = positive)]
    quad_tol: f64,
    #[arg(long, default_value_t = QuadratureConfig::default().root_tol, value_parser = positive)]
    root_tol: f64,
    #[arg(long, default_value_t = QuadratureConfig::default().mc_samples, value_parser = clap::value_parser!(u64).range(10_000..))]
    mc_samples: u64,
}

impl DensityArgs {
    fn config(&self, seed: u64) -> QuadratureConfig {
        QuadratureConfig { root_tol: self.root_tol, quad_tol: self.quad_tol, mc_samples: self.mc_samples, rng_seed: seed }
    }
}

#[derive(Clone)]
struct SuiteArg {
    id: String,
    suites: Vec<VerifySuite>,
}

#[derive(Clone)]
struct HeightList(Vec<u64>);

fn height_parser() -> clap::builder::RangedU64ValueParser {
    clap::value_parser!(u64).range(1..)
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be a positive number, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_suite(s: &str) -> std::result::Result<SuiteArg, String> {
    VerifySuite::parse(s).map(|suites| SuiteArg { id: s.to_string(), suites }).map_err(|e| e.to_string())
}

fn parse_heights(s: &str) -> std::result::Result<HeightList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u64>() {
            Ok(0) => Err("heights must be at least 1".to_string()),
            Ok(b) => Ok(b),
            Err(e) => Err(format!("{t:?}: {e}")),
        })
        .collect::<std::result::Result<Vec<_>, _>>()
        .map(HeightList)
}

/// A rendered result and whether its checks passed.
struct Outcome {
    text: String,
    passed: bool,
}

fn render(format: Format, json: Value, table: &Table) -> String {
    match format {
        Format::Json => to_json(&json),
        Format::Csv => table.to_csv(),
    }
}

fn count(format: Format, height: u64, method: Method) -> Result<Outcome> {
    let brute = matches!(method, Method::Brute | Method::Both)
        .then(|| brute_force_count(height, false, false).map(|r| r.count))
        .transpose()?;
    let torsor = matches!(method, Method::Torsor | Method::Both).then(|| torsor_count(height)).transpose()?;
    let agree = match (brute, torsor) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    let mut table = Table::new(&["height", "brute", "torsor", "match"]);
    table.push(vec![json!(height), json!(brute), json!(torsor), json!(agree)]);
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "count",
        "height": height,
        "brute": brute,
        "torsor": torsor,
        "match": agree,
    });
    Ok(Outcome { text: render(format, doc, &table), passed: agree != Some(false) })
}

fn peyre(format: Format, density: &DensityArgs, seed: u64) -> Result<Outcome> {
    let cfg = density.config(seed);
    let b = peyre_constant(&cfg, density.primes)?;
    let fixture = PeyreFixture::from_breakdown(&b);
    let fields: Vec<(&'static str, Value)> = vec![
        ("alpha", json!(fixture.alpha)),
        ("beta", json!(b.beta.to_string())),
        ("omega_inf", json!(fixture.omega_inf)),
        ("omega_inf_err", json!(fixture.omega_inf_err)),
        ("omega_inf_mc", json!(b.omega_inf.monte_carlo.value)),
        ("omega_inf_mc_err", json!(b.omega_inf.monte_carlo.error)),
        ("omega_inf_relative_difference", json!(b.omega_inf.relative_difference)),
        ("euler_p", json!(fixture.euler_p)),
        ("euler_value", json!(fixture.euler_value)),
        ("euler_tail", json!(fixture.euler_tail)),
        ("c_vh", json!(fixture.c_vh)),
        ("c_vh_err", json!(fixture.c_vh_err)),
        ("quad_tol", json!(cfg.quad_tol)),
        ("root_tol", json!(cfg.root_tol)),
        ("mc_samples", json!(cfg.mc_samples)),
        ("seed", json!(seed)),
    ];
    let mut table = Table::new(&["quantity", "value"]);
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!("peyre"));
    for (k, v) in fields {
        table.push(vec![json!(k), v.clone()]);
        doc.insert(k.into(), v);
    }
    Ok(Outcome { text: render(format, Value::Object(doc), &table), passed: true })
}

fn verify(format: Format, suite: &SuiteArg, seed: u64, height: u64, density: &DensityArgs) -> Result<Outcome> {
    let opts = VerifyOptions { seed, height, quad: density.config(seed) };
    let report = run_suites(&suite.suites, &opts)?;
    let mut table = Table::new(&["suite", "check", "passed", "value", "limit", "detail"]);
    for r in &report.rows {
        table.push(vec![json!(r.suite), json!(r.check), json!(r.passed), json!(r.value), json!(r.limit), json!(r.detail)]);
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "suite": suite.id,
        "seed": seed,
        "height": height,
        "passed": report.passed(),
        "checks": table.records(),
    });
    Ok(Outcome { text: render(format, doc, &table), passed: report.passed() })
}

fn asymptotic(format: Format, heights: &[u64]) -> Result<Outcome> {
    let c_vh = PeyreFixture::checked_in().c_vh;
    let rows = asymptotic_report(heights, c_vh)?;
    let mut table = Table::new(&["height", "count", "normalized", "ratio"]);
    for r in &rows {
        table.push(vec![json!(r.height), json!(r.count), json!(r.normalized), json!(r.ratio)]);
    }
    if format == Format::Csv {
        eprintln!("note: {ASYMPTOTIC_NOTE}");
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": "asymptotic",
        "c_vh": c_vh,
        "note": ASYMPTOTIC_NOTE,
        "rows": table.records(),
    });
    Ok(Outcome { text: render(format, doc, &table), passed: true })
}

fn export(format: Format, height: u64, kind: ExportKind) -> Result<Outcome> {
    let torsor = torsor_points(height)?;
    let mut buf = Vec::new();
    let (columns, rows): (Vec<String>, Vec<Vec<i128>>) = match kind {
        ExportKind::Points => {
            let mut points = torsor.iter().map(torsor_to_point).collect::<Result<Vec<SurfacePoint>>>()?;
            points.sort_unstable();
            write_points_csv(&points, &mut buf)?;
            (
                (0..4).map(|i| format!("x{i}")).collect(),
                points.iter().map(|p| p.x.to_vec()).collect(),
            )
        }
        ExportKind::Torsor => {
            write_torsor_csv(&torsor, &mut buf)?;
            (
                (1..=10).map(|i| format!("eta{i}")).collect(),
                torsor.iter().map(|t| t.coordinates().iter().map(|&c| c as i128).collect()).collect(),
            )
        }
    };
    let text = match format {
        Format::Csv => String::from_utf8(buf).expect("CSV output is UTF-8"),
        Format::Json => to_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "command": "export",
            "kind": match kind { ExportKind::Points => "points", ExportKind::Torsor => "torsor" },
            "height": height,
            "columns": columns,
            "rows": rows.iter().map(|r| r.iter().map(|&c| json!(c as i64)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })),
    };
    Ok(Outcome { text, passed: true })
}

fn run_calibration(format: Format, seed: u64, size: usize) -> Result<Outcome> {
    let fixture = calibrate(seed, size)?;
    let mut table = Table::new(&["suite", "constant"]);
    for (s, c) in &fixture.constants {
        table.push(vec![json!(s.id()), json!(c)]);
    }
    let text = match format {
        Format::Json => to_json(&serde_json::to_value(&fixture)?),
        Format::Csv => table.to_csv(),
    };
    Ok(Outcome { text, passed: true })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let f = cli.format;
    match &cli.command {
        Command::Count { height, method } => count(f, *height, *method),
        Command::Peyre { density, seed } => peyre(f, density, *seed),
        Command::Verify { suite, seed, height, density } => verify(f, suite, *seed, *height, density),
        Command::Asymptotic { heights } => asymptotic(f, &heights.0),
        Command::Export { height, kind } => export(f, *height, *kind),
        Command::Calibrate { seed, corpus_size } => run_calibration(f, *seed, *corpus_size),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush().map_err(Error::from)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli).and_then(|o| emit(&cli, &o.text).map(|()| o.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
