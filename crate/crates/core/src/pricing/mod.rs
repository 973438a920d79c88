//! Seller's superreplication price by three routes: the primal hedging LP,
//! its dual LP, and expectation maximization over the measure polytope.

mod dual;
mod measures;
mod primal;
mod report;

pub use dual::{build_dual_lp, DualProblem, DualRowTag, DualSolution};
pub use measures::{
    build_measure_polytope, check_membership, dual_from_measure, measure_from_dual,
    measure_variable, MeasurePolytope, MembershipReport, MembershipViolation, RowTag,
};
pub use primal::{build_primal_lp, PrimalProblem};
pub use report::{full_report, Consistency, Gaps, MethodResult, PricingReport, ReportStatus};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Rational, Sense, VarKind};
use crate::market::{Claim, Market, TradingStrategy};
use crate::scenario::Measure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Primal,
    DualLp,
    Measures,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Primal, Method::DualLp, Method::Measures];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Primal => "primal",
            Method::DualLp => "dual_lp",
            Method::Measures => "measures",
        }
    }
}

/// What backs a reported price.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriceCertificate {
    Strategy {
        strategy: TradingStrategy,
        price: Rational,
    },
    Dual(DualSolution),
    Measure(Measure),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PriceResult {
    pub method: Method,
    pub outcome: LpOutcome,
    pub certificate: Option<PriceCertificate>,
}

impl PriceResult {
    pub fn value(&self) -> Option<&Rational> {
        self.outcome.value()
    }
}

/// `max Σ q(w) B(w)` over the measure polytope.
pub fn measure_lp(polytope: &MeasurePolytope, b: &Claim) -> Result<LinearProgram> {
    let desc = &polytope.description;
    if b.len() != desc.dim() {
        return Err(Error::input("claim has the wrong number of scenarios"));
    }
    let mut lp = LinearProgram::new(Sense::Maximize);
    for (w, name) in desc.variables.iter().enumerate() {
        let v = lp.add_variable(name.clone(), VarKind::Free);
        lp.set_objective(v, b.at(w).clone());
    }
    lp.rows = desc.rows.clone();
    Ok(lp)
}

/// Builds and solves the problem designated by `method`.
///
/// Values are only meaningful on markets without an arbitrage that respects
/// the short-sale constraints: there the primal collapses to 0 (its initial
/// cost row keeps it bounded) and the dual programs are infeasible. Check
/// with [`arbitrage_search`](crate::market::arbitrage_search) first.
pub fn price(m: &Market, b: &Claim, method: Method) -> Result<PriceResult> {
    match method {
        Method::Primal => {
            let problem = build_primal_lp(m, b)?;
            let outcome = solve_lp(&problem.lp)?;
            let certificate = match &outcome {
                LpOutcome::Optimal(opt) => Some(PriceCertificate::Strategy {
                    strategy: problem.strategy(m, &opt.primal),
                    price: opt.primal[problem.price_var].clone(),
                }),
                LpOutcome::Infeasible(_) => return Err(Error::Internal(
                    "superreplication LP infeasible although holding max B in bonds is feasible"
                        .into(),
                )),
                LpOutcome::Unbounded(_) => None,
            };
            Ok(PriceResult {
                method,
                outcome,
                certificate,
            })
        }
        Method::DualLp => {
            let problem = build_dual_lp(m, b)?;
            let outcome = solve_lp(&problem.lp)?;
            let certificate = outcome
                .optimum()
                .map(|opt| PriceCertificate::Dual(problem.solution(&opt.primal)));
            Ok(PriceResult {
                method,
                outcome,
                certificate,
            })
        }
        Method::Measures => {
            let polytope = build_measure_polytope(m)?;
            price_with_polytope(&polytope, b)
        }
    }
}

/// Measure-route pricing against a prebuilt polytope, so the set can be
/// shared across claims.
pub fn price_with_polytope(polytope: &MeasurePolytope, b: &Claim) -> Result<PriceResult> {
    let lp = measure_lp(polytope, b)?;
    let outcome = solve_lp(&lp)?;
    let certificate = match outcome.optimum() {
        Some(opt) => Some(PriceCertificate::Measure(Measure::new(opt.primal.clone())?)),
        None => None,
    };
    Ok(PriceResult {
        method: Method::Measures,
        outcome,
        certificate,
    })
}
