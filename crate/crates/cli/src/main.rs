//! `splitflow`: batch runner for the index identities.
//!
//! Exit status is 0 when every asserted identity holds, 1 when one fails or
//! the numerics give up (a failure record is still written), and 2 on a
//! usage error, in which case nothing is written.

mod config;
mod run;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use config::{parse_zero_rule, Command, Experiment, FamilyName, Kind, Settings, UsageError};
use splitflow::operator_lab::ZeroModeRule;
use splitflow::{EndpointConvention, Error};

#[derive(Parser)]
#[command(
    name = "splitflow",
    version,
    about = "Spectral flow splitting experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Crossing-form against unitary-winding Maslov index on random paths.
    Maslov(Args),
    /// Maslov index before and after symplectic reduction in the mode model.
    Reduce(Args),
    /// Singular values of APS projector minus continuation projector.
    ApsCompare(Args),
    /// Splitting of the circle spectral flow into the two arc flows.
    Split(Args),
    /// Splitting with spectral boundary conditions and Hörmander corrections.
    ApsSplit(Args),
    /// Asymmetry index of the two halves at one parameter value.
    Asymmetry(Args),
    /// Seeded batch of one verification.
    Sweep(Args),
    /// Runs the command named in the config file.
    Run(Args),
}

#[derive(clap::Args, Default)]
struct Args {
    /// JSON config; flags given here override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for report.json and CSV tables.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `symmetric` (default) or `left-closed`.
    #[arg(long)]
    convention: Option<EndpointConvention>,
    #[arg(long, value_enum)]
    family: Option<FamilyName>,
    /// Spectrum file of the tangential operator.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Truncation order K of a linear spectrum.
    #[arg(long)]
    order: Option<usize>,
    /// Number of zero-mode pairs of a linear spectrum.
    #[arg(long)]
    n0: Option<usize>,
    /// Comma-separated truncation orders.
    #[arg(long, value_delimiter = ',')]
    orders: Option<Vec<usize>>,
    /// Comma-separated mode pairs whose roles are exchanged.
    #[arg(long, value_delimiter = ',')]
    f_pairs: Option<Vec<usize>>,
    #[arg(long)]
    count: Option<usize>,
    /// Dimension of the symplectic space for `maslov`.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    scale: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_parser = parse_zero_rule)]
    zero_rule: Option<ZeroModeRule>,
    #[arg(long, value_enum)]
    verification: Option<config::Verification>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
}

impl Args {
    fn overrides(self) -> (Option<PathBuf>, Settings) {
        let s = Settings {
            command: None,
            seed: self.seed,
            convention: self.convention,
            out: self.out,
            family: self.family,
            spectrum: self.spectrum,
            order: self.order,
            n0: self.n0,
            orders: self.orders,
            f_pairs: self.f_pairs,
            count: self.count,
            dim: self.dim,
            scale: self.scale,
            t: self.t,
            zero_rule: self.zero_rule,
            verification: self.verification,
            kind: self.kind,
        };
        (self.config, s)
    }
}

fn experiment(sub: Sub) -> Result<Experiment, UsageError> {
    let (command, args) = match sub {
        Sub::Maslov(a) => (Some(Command::Maslov), a),
        Sub::Reduce(a) => (Some(Command::Reduce), a),
        Sub::ApsCompare(a) => (Some(Command::ApsCompare), a),
        Sub::Split(a) => (Some(Command::Split), a),
        Sub::ApsSplit(a) => (Some(Command::ApsSplit), a),
        Sub::Asymmetry(a) => (Some(Command::Asymmetry), a),
        Sub::Sweep(a) => (Some(Command::Sweep), a),
        Sub::Run(a) => (None, a),
    };
    let (config, over) = args.overrides();
    let settings = match &config {
        Some(p) => Settings::load(p)?.merged(over),
        None => over,
    };
    let command = match command.or(settings.command) {
        Some(c) => c,
        None => return Err(UsageError("`run` needs a config with `command`".into())),
    };
    let exp = Experiment::new(command, settings)?;
    if let Some(p) = &exp.settings.spectrum {
        splitflow::mode_model::TangentialSpectrum::load(p)
            .map_err(|e| UsageError(e.to_string()))?;
    }
    if let Some(out) = &exp.settings.out {
        if out.exists() && !out.is_dir() {
            return Err(UsageError(format!("{} is not a directory", out.display())));
        }
    }
    Ok(exp)
}

/// Name of the innermost error variant.
fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid-input",
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::NonRegularCrossing { .. } => "non-regular-crossing",
        Error::RefinementExhausted { .. } => "refinement-exhausted",
        Error::NonIntegralWinding { .. } => "non-integral-winding",
        Error::TransversalityViolated { .. } => "transversality-violated",
        Error::RankDeficient { .. } => "rank-deficient",
        Error::Integrator { .. } => "integrator",
        Error::RootIsolation { .. } => "root-isolation",
        Error::TrackingAmbiguous { .. } => "tracking-ambiguous",
        Error::UniqueContinuation { .. } => "unique-continuation",
        Error::SearchExhausted { .. } => "search-exhausted",
        Error::Context { source, .. } => error_kind(source),
    }
}

fn failure_record(e: &Error) -> Value {
    let mut context = Vec::new();
    let mut cur = e;
    while let Error::Context { context: c, source } = cur {
        context.push(c.clone());
        cur = source;
    }
    json!({
        "kind": error_kind(e),
        "message": e.to_string(),
        "context": context,
    })
}

fn write_artifacts(
    out: &Path,
    report: &Value,
    outcome: Option<&run::Outcome>,
) -> std::io::Result<()> {
    std::fs::create_dir_all(out)?;
    if let Some(o) = outcome {
        for (name, bytes) in &o.tables {
            std::fs::write(out.join(name), bytes)?;
        }
        if !o.timings.is_empty() {
            let mut text = String::from("instance,runtime_s\n");
            for (i, t) in &o.timings {
                text.push_str(&format!("{i},{t:.6}\n"));
            }
            std::fs::write(out.join("timings.csv"), text)?;
        }
    }
    let mut text = serde_json::to_string_pretty(report).expect("JSON values serialize");
    text.push('\n');
    std::fs::write(out.join("report.json"), text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exp = match experiment(cli.command) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut echo = exp.settings.clone();
    echo.out = None;
    let mut report = Map::new();
    report.insert("command".into(), json!(exp.command.name()));
    if exp.command != Command::ApsCompare {
        report.insert("convention".into(), json!(exp.settings.convention()));
    }
    report.insert("config".into(), json!(echo));
    let result = run::run(&exp);
    let passed = match &result {
        Ok(o) => {
            let status = if o.passed { "pass" } else { "fail" };
            report.insert("status".into(), json!(status));
            if let Value::Object(m) = &o.report {
                report.extend(m.clone());
            }
            o.passed
        }
        Err(e) => {
            report.insert("status".into(), json!("error"));
            report.insert("failure".into(), failure_record(e));
            false
        }
    };
    let report = Value::Object(report);
    if let Some(out) = &exp.settings.out {
        if let Err(e) = write_artifacts(out, &report, result.as_ref().ok()) {
            eprintln!("cannot write to {}: {e}", out.display());
            return ExitCode::from(1);
        }
    }
    // A closed pipe on stdout is not a failure of the run.
    let _ = writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string_pretty(&report).expect("JSON values serialize")
    );
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
