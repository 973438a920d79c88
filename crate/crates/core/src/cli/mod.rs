//! Command-line front end. [`run_command`] is the whole program minus the
//! process boundary, so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 the market fails validation, 2 an analytic
//! anomaly (arbitrage where a price was asked for, an infeasible or
//! unbounded program, a primal/dual mismatch), 3 unreadable input or usage
//! error.

mod document;
mod render;

pub use document::{
    parse_market_document, read_market_document, AssetEntry, DriverEntry, FullFiltrationSpec,
    LoadedDocument, MarketDocument, PathTable, SellerFiltrationSpec,
};
pub use render::{
    format_arbitrage, format_partition, format_polytope, format_pricing_report, format_rational,
    format_row, format_strategy, format_validation, integer_row,
};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::lp::{fourier_motzkin_project, HPolytope, LpStatus};
use crate::market::{arbitrage_search, validate_market};
use crate::pricing::{
    build_measure_polytope, full_report, price, Method, PriceCertificate, ReportStatus,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ANOMALY: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "superhedge",
    version,
    about = "Exact seller's superreplication prices"
)]
struct Cli {
    /// What to print on stdout.
    #[arg(long, value_enum, default_value_t = Format::Both, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// JSON document, a blank line, then the table.
    Both,
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Primal,
    Dual,
    Measures,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the market invariants.
    Validate { file: PathBuf },
    /// Price one claim.
    Price {
        file: PathBuf,
        #[arg(long)]
        claim: String,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// Print the measure polytope, optionally projected onto some variables.
    Polytope {
        file: PathBuf,
        /// Variables to keep; all others are eliminated.
        #[arg(long, num_args = 1..)]
        project: Vec<String>,
        /// Drop rows implied by the others (exact LP test per row).
        #[arg(long)]
        deep_redundancy: bool,
    },
    /// Search for an arbitrage.
    Arbitrage {
        file: PathBuf,
        /// Ignore the no-short list.
        #[arg(long)]
        unconstrained: bool,
    },
    /// Price every claim by all methods and cross-check.
    Report { file: PathBuf },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn error(e: &Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Value { .. } | Error::Input(_) => EXIT_PARSE,
            Error::Validation(_) => EXIT_INVALID,
            Error::DegenerateDual | Error::Internal(_) => EXIT_ANOMALY,
        };
        CommandOutput {
            code,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

struct Rendered {
    code: i32,
    json: serde_json::Value,
    table: String,
    note: Option<String>,
}

fn finish(format: Format, r: Rendered) -> CommandOutput {
    let json = serde_json::to_string_pretty(&r.json).expect("json value serializes");
    let stdout = match format {
        Format::Both => format!("{json}\n\n{}", r.table),
        Format::Json => format!("{json}\n"),
        Format::Table => r.table,
    };
    CommandOutput {
        code: r.code,
        stdout,
        stderr: r.note.map(|n| format!("{n}\n")).unwrap_or_default(),
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serializes")
}

fn read(file: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(file).map_err(|e| Error::Parse {
        location: file.display().to_string(),
        message: e.to_string(),
    })
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run_command<I, T>(argv: I) -> CommandOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandOutput {
                        code: EXIT_OK,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                _ => CommandOutput {
                    code: EXIT_PARSE,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match dispatch(&cli.command) {
        Ok(r) => finish(cli.format, r),
        Err(e) => CommandOutput::error(&e),
    }
}

fn dispatch(command: &Command) -> Result<Rendered, Error> {
    match command {
        Command::Validate { file } => validate(file),
        Command::Price {
            file,
            claim,
            method,
        } => price_claim(file, claim, *method),
        Command::Polytope {
            file,
            project,
            deep_redundancy,
        } => polytope(file, project, *deep_redundancy),
        Command::Arbitrage {
            file,
            unconstrained,
        } => arbitrage(file, !unconstrained),
        Command::Report { file } => report(file),
    }
}

fn validate(file: &PathBuf) -> Result<Rendered, Error> {
    let doc = read_market_document(&read(file)?)?.resolve()?;
    let m = &doc.market;
    let report = validate_market(m);
    let seller: Vec<String> = (0..=m.horizon())
        .map(|t| format_partition(m, m.seller_filtration().at(t)))
        .collect();
    let valid = report.all_passed();
    Ok(Rendered {
        code: if valid { EXIT_OK } else { EXIT_INVALID },
        json: json!({
            "command": "validate",
            "valid": valid,
            "checks": to_value(&report.checks),
            "seller_atoms": seller,
        }),
        table: format_validation(m, &report),
        note: (!valid).then(|| "market fails validation".to_string()),
    })
}

fn price_claim(file: &PathBuf, claim: &str, method: MethodArg) -> Result<Rendered, Error> {
    let doc = parse_market_document(&read(file)?)?;
    let m = &doc.market;
    let b = doc
        .claim(claim)
        .ok_or_else(|| Error::Input(format!("no claim named `{claim}`")))?;

    if let crate::market::ArbitrageResult::Found { terminal_gains, .. } = arbitrage_search(m, true)?
    {
        return Ok(Rendered {
            code: EXIT_ANOMALY,
            json: json!({
                "command": "price",
                "claim": claim,
                "status": "arbitrage_detected",
                "arbitrage_gains": to_value(&terminal_gains),
            }),
            table: format!("claim {claim}\n  arbitrage detected: no price\n"),
            note: Some("arbitrage detected".to_string()),
        });
    }

    if method == MethodArg::All {
        let r = full_report(m, &[(claim.to_string(), b.clone())])?.remove(0);
        let equal = r
            .gaps
            .primal_minus_dual_lp
            .as_ref()
            .is_some_and(|g| g.is_zero());
        let ok = equal && r.consistency.all_ok();
        return Ok(Rendered {
            code: if ok { EXIT_OK } else { EXIT_ANOMALY },
            json: json!({
                "command": "price",
                "claim": claim,
                "primal_equals_dual_lp": equal,
                "report": to_value(&r),
            }),
            table: format_pricing_report(&r),
            note: (!ok).then(|| "primal and dual disagree or a cross-check failed".to_string()),
        });
    }

    let method = match method {
        MethodArg::Primal => Method::Primal,
        MethodArg::Dual => Method::DualLp,
        _ => Method::Measures,
    };
    let r = price(m, b, method)?;
    let optimal = r.outcome.status() == LpStatus::Optimal;
    let mut table = format!(
        "claim {claim}\n  {:<10}{:<11}{}\n",
        method.as_str(),
        r.outcome.status().as_str(),
        r.value().map(format_rational).unwrap_or_else(|| "-".into())
    );
    if let Some(PriceCertificate::Strategy { strategy, .. }) = &r.certificate {
        table.push_str(&format_strategy(m, strategy));
    }
    Ok(Rendered {
        code: if optimal { EXIT_OK } else { EXIT_ANOMALY },
        json: json!({
            "command": "price",
            "claim": claim,
            "result": to_value(&r),
        }),
        table,
        note: (!optimal).then(|| {
            format!(
                "{} program is {}",
                method.as_str(),
                r.outcome.status().as_str()
            )
        }),
    })
}

fn polytope(file: &PathBuf, keep: &[String], deep: bool) -> Result<Rendered, Error> {
    let doc = parse_market_document(&read(file)?)?;
    let poly = build_measure_polytope(&doc.market)?;
    let desc = &poly.description;
    for v in keep {
        if desc.variable_index(v).is_none() {
            return Err(Error::Input(format!("unknown variable `{v}`")));
        }
    }
    let (shown, canonical): (HPolytope, bool) = if keep.is_empty() {
        (desc.clone(), false)
    } else {
        let eliminate: Vec<&str> = desc
            .variables
            .iter()
            .filter(|v| !keep.contains(v))
            .map(String::as_str)
            .collect();
        (fourier_motzkin_project(desc, &eliminate, deep)?, true)
    };
    let empty = crate::lp::solve_lp(&shown.feasibility_lp())?.status() == LpStatus::Infeasible;
    let text = format_polytope(&shown, canonical);
    let rows: Vec<&str> = text.lines().collect();
    let mut table = format!("variables: {}\n", shown.variables.join(" "));
    table.push_str(&text);
    table.push_str(if empty { "empty: yes\n" } else { "empty: no\n" });
    Ok(Rendered {
        code: EXIT_OK,
        json: json!({
            "command": "polytope",
            "variables": shown.variables,
            "rows": rows,
            "tags": if keep.is_empty() { to_value(&poly.tags) } else { serde_json::Value::Null },
            "empty": empty,
        }),
        table,
        note: None,
    })
}

fn arbitrage(file: &PathBuf, respect: bool) -> Result<Rendered, Error> {
    let doc = parse_market_document(&read(file)?)?;
    let m = &doc.market;
    let r = arbitrage_search(m, respect)?;
    Ok(Rendered {
        code: EXIT_OK,
        json: json!({
            "command": "arbitrage",
            "respect_constraints": respect,
            "result": to_value(&r),
        }),
        table: format_arbitrage(m, respect, &r),
        note: None,
    })
}

fn report(file: &PathBuf) -> Result<Rendered, Error> {
    let doc = parse_market_document(&read(file)?)?;
    let reports = full_report(&doc.market, &doc.claims)?;
    let ok = reports.iter().all(|r| {
        r.status == ReportStatus::Priced
            && r.gaps
                .primal_minus_dual_lp
                .as_ref()
                .is_some_and(|g| g.is_zero())
            && r.consistency.all_ok()
    });
    let table: String = reports.iter().map(format_pricing_report).collect();
    Ok(Rendered {
        code: if ok { EXIT_OK } else { EXIT_ANOMALY },
        json: json!({
            "command": "report",
            "reports": to_value(&reports),
        }),
        table,
        note: (!ok).then(|| "arbitrage detected or a cross-check failed".to_string()),
    })
}
