//! Plain-text rendering of exact results.

use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::lp::{canonical_row, Constraint, HPolytope, LpOutcome, Rational};
use crate::market::{ArbitrageResult, Market, TradingStrategy, ValidationReport};
use crate::pricing::{PricingReport, ReportStatus};
use crate::scenario::Partition;

/// `a/b (d.ddddd)`: the exact value followed by six significant digits.
pub fn format_rational(r: &Rational) -> String {
    format!("{r} ({})", r.to_sig6())
}

fn format_optional(r: Option<&Rational>) -> String {
    r.map(format_rational).unwrap_or_else(|| "-".to_string())
}

/// Scales a row by the least common multiple of its denominators, leaving
/// any common integer factor in place.
pub fn integer_row(row: &Constraint) -> Constraint {
    let lcm = row
        .coefficients
        .iter()
        .chain(std::iter::once(&row.rhs))
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let k = Rational::from(lcm);
    Constraint::new(
        row.coefficients.iter().map(|c| c * &k).collect(),
        row.relation,
        &row.rhs * &k,
    )
}

/// One inequality in the variable order of `names`, e.g. `4*q2 <= 0`.
pub fn format_row(names: &[String], row: &Constraint) -> String {
    let mut lhs = String::new();
    for (name, c) in names.iter().zip(&row.coefficients) {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let sign = match (lhs.is_empty(), c.is_negative()) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        lhs.push_str(sign);
        if mag == Rational::one() {
            lhs.push_str(name);
        } else {
            let _ = write!(lhs, "{mag}*{name}");
        }
    }
    if lhs.is_empty() {
        lhs.push('0');
    }
    format!("{lhs} {} {}", row.relation.symbol(), row.rhs)
}

/// Rows of a polytope, one per line. With `canonical`, rows are reduced to
/// coprime integer coefficients; otherwise only denominators are cleared.
pub fn format_polytope(p: &HPolytope, canonical: bool) -> String {
    let mut out = String::new();
    for row in &p.rows {
        let row = if canonical {
            canonical_row(row)
        } else {
            integer_row(row)
        };
        out.push_str(&format_row(&p.variables, &row));
        out.push('\n');
    }
    out
}

pub fn format_partition(m: &Market, p: &Partition) -> String {
    p.blocks()
        .iter()
        .map(|b| {
            let names: Vec<&str> = b.iter().map(|&w| m.space().name(w)).collect();
            format!("{{{}}}", names.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn format_validation(m: &Market, report: &ValidationReport) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        match &c.witness {
            Some(w) => {
                let _ = writeln!(out, "{mark} {}: {w}", c.name);
            }
            None => {
                let _ = writeln!(out, "{mark} {}", c.name);
            }
        }
    }
    for t in 0..=m.horizon() {
        let _ = writeln!(
            out,
            "seller atoms t={t}: {}",
            format_partition(m, m.seller_filtration().at(t))
        );
    }
    out
}

pub fn format_strategy(m: &Market, h: &TradingStrategy) -> String {
    let mut out = String::new();
    for (a, name) in m.asset_names().iter().enumerate() {
        for t in 0..m.horizon() {
            let g = m.seller_filtration().at(t);
            for k in 0..g.len() {
                let names: Vec<&str> = g.block(k).iter().map(|&w| m.space().name(w)).collect();
                let _ = writeln!(
                    out,
                    "  H[{name}]({t}, {{{}}}) = {}",
                    names.join(","),
                    format_rational(h.by_block(a, t, k))
                );
            }
        }
    }
    out
}

pub fn format_arbitrage(m: &Market, respect: bool, r: &ArbitrageResult) -> String {
    let mode = if respect {
        "respecting no_short"
    } else {
        "unconstrained"
    };
    match r {
        ArbitrageResult::None => format!("arbitrage ({mode}): none\n"),
        ArbitrageResult::Found {
            strategy,
            terminal_gains,
            expected_gain,
        } => {
            let mut out = format!("arbitrage ({mode}): found\n");
            out.push_str(&format_strategy(m, strategy));
            for (w, g) in terminal_gains.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  gain[{}] = {}",
                    m.space().name(w),
                    format_rational(g)
                );
            }
            let _ = writeln!(out, "  expected gain = {}", format_rational(expected_gain));
            out
        }
    }
}

fn status_cell(o: &LpOutcome) -> String {
    format!("{:<11}{}", o.status().as_str(), format_optional(o.value()))
}

fn flag(f: Option<bool>) -> &'static str {
    match f {
        Some(true) => "yes",
        Some(false) => "NO",
        None => "n/a",
    }
}

pub fn format_pricing_report(r: &PricingReport) -> String {
    let mut out = format!("claim {}\n", r.claim);
    if r.status == ReportStatus::ArbitrageDetected {
        out.push_str("  arbitrage detected: no price\n");
        return out;
    }
    for (label, m) in [
        ("primal", &r.primal),
        ("dual_lp", &r.dual_lp),
        ("measures", &r.measures),
    ] {
        if let Some(m) = m {
            let _ = writeln!(out, "  {label:<10}{}", status_cell(&m.outcome));
        }
    }
    let equal = r.gaps.primal_minus_dual_lp.as_ref().map(Rational::is_zero);
    let _ = writeln!(out, "  primal == dual_lp: {}", flag(equal));
    for (label, g) in [
        ("primal - dual_lp", &r.gaps.primal_minus_dual_lp),
        ("dual_lp - measures", &r.gaps.dual_lp_minus_measures),
        ("primal - measures", &r.gaps.primal_minus_measures),
    ] {
        let _ = writeln!(out, "  gap {label}: {}", format_optional(g.as_ref()));
    }
    let c = &r.consistency;
    for (label, f) in [
        ("primal certificate", c.primal_certificate),
        ("dual_lp certificate", c.dual_lp_certificate),
        ("measures certificate", c.measures_certificate),
        ("strategy audit", c.strategy_audit),
        ("measure membership", c.measure_membership),
        ("measure from dual is member", c.measure_from_dual_member),
        (
            "measure from dual keeps value",
            c.measure_from_dual_preserves_objective,
        ),
        (
            "dual from measure is feasible",
            c.dual_from_measure_feasible,
        ),
        (
            "dual from measure keeps value",
            c.dual_from_measure_preserves_objective,
        ),
    ] {
        let _ = writeln!(out, "  {label}: {}", flag(f));
    }
    out
}
