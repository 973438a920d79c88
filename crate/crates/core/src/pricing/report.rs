use serde::Serialize;

use super::{
    build_dual_lp, build_measure_polytope, build_primal_lp, check_membership, dual_from_measure,
    measure_from_dual, measure_lp, DualSolution,
};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, verify_certificate, LpOutcome, Rational};
use crate::market::{arbitrage_search, strategy_audit, Claim, Market, TradingStrategy};
use crate::scenario::Measure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Priced,
    ArbitrageDetected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodResult {
    pub outcome: LpOutcome,
    pub certificate_verified: bool,
}

impl MethodResult {
    pub fn value(&self) -> Option<&Rational> {
        self.outcome.value()
    }
}

/// Exact differences of optimal values; present only when both sides are
/// optimal.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Gaps {
    pub primal_minus_dual_lp: Option<Rational>,
    pub dual_lp_minus_measures: Option<Rational>,
    pub primal_minus_measures: Option<Rational>,
}

/// Cross-validation flags. `None` means the check did not apply (missing
/// optimum, or a map only defined when the bond may be shorted).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Consistency {
    pub primal_certificate: Option<bool>,
    pub dual_lp_certificate: Option<bool>,
    pub measures_certificate: Option<bool>,
    pub strategy_audit: Option<bool>,
    pub measure_membership: Option<bool>,
    pub measure_from_dual_member: Option<bool>,
    pub measure_from_dual_preserves_objective: Option<bool>,
    pub dual_from_measure_feasible: Option<bool>,
    pub dual_from_measure_preserves_objective: Option<bool>,
}

impl Consistency {
    /// True iff no applicable check failed.
    pub fn all_ok(&self) -> bool {
        [
            self.primal_certificate,
            self.dual_lp_certificate,
            self.measures_certificate,
            self.strategy_audit,
            self.measure_membership,
            self.measure_from_dual_member,
            self.measure_from_dual_preserves_objective,
            self.dual_from_measure_feasible,
            self.dual_from_measure_preserves_objective,
        ]
        .iter()
        .all(|c| c.unwrap_or(true))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PricingReport {
    pub claim: String,
    pub status: ReportStatus,
    /// Arbitrage witness gains when `status` is `ArbitrageDetected`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arbitrage_gains: Option<Vec<Rational>>,
    pub primal: Option<MethodResult>,
    pub strategy: Option<TradingStrategy>,
    pub dual_lp: Option<MethodResult>,
    pub dual_solution: Option<DualSolution>,
    pub measures: Option<MethodResult>,
    pub measure: Option<Measure>,
    pub gaps: Gaps,
    pub consistency: Consistency,
}

fn gap(a: Option<&MethodResult>, b: Option<&MethodResult>) -> Option<Rational> {
    match (
        a.and_then(MethodResult::value),
        b.and_then(MethodResult::value),
    ) {
        (Some(x), Some(y)) => Some(x - y),
        _ => None,
    }
}

/// Prices every claim by all three routes and cross-checks the results.
///
/// If the market admits an arbitrage that respects the short-sale
/// constraints, every report carries `ArbitrageDetected` instead of prices.
pub fn full_report(m: &Market, claims: &[(String, Claim)]) -> Result<Vec<PricingReport>> {
    m.ensure_valid().map_err(|e| Error::input(e.to_string()))?;
    if claims.is_empty() {
        return Ok(Vec::new());
    }
    let arbitrage = arbitrage_search(m, true)?;
    if let crate::market::ArbitrageResult::Found { terminal_gains, .. } = &arbitrage {
        return Ok(claims
            .iter()
            .map(|(name, _)| PricingReport {
                claim: name.clone(),
                status: ReportStatus::ArbitrageDetected,
                arbitrage_gains: Some(terminal_gains.clone()),
                primal: None,
                strategy: None,
                dual_lp: None,
                dual_solution: None,
                measures: None,
                measure: None,
                gaps: Gaps::default(),
                consistency: Consistency::default(),
            })
            .collect());
    }
    let polytope = build_measure_polytope(m)?;
    let bond_free = !m.is_short_restricted(0);
    claims
        .iter()
        .map(|(name, b)| {
            let mut consistency = Consistency::default();

            let primal_problem = build_primal_lp(m, b)?;
            let primal_outcome = solve_lp(&primal_problem.lp)?;
            if let LpOutcome::Infeasible(_) = primal_outcome {
                return Err(Error::Internal(format!(
                    "superreplication LP for `{name}` is infeasible"
                )));
            }
            let primal = MethodResult {
                certificate_verified: verify_certificate(&primal_problem.lp, &primal_outcome)
                    .all_passed(),
                outcome: primal_outcome,
            };
            consistency.primal_certificate = Some(primal.certificate_verified);
            let strategy = match primal.outcome.optimum() {
                Some(opt) => {
                    let h = primal_problem.strategy(m, &opt.primal);
                    let audit = strategy_audit(m, &h, b, &opt.value)?;
                    consistency.strategy_audit = Some(audit.all_passed());
                    Some(h)
                }
                None => None,
            };

            let dual_problem = build_dual_lp(m, b)?;
            let dual_outcome = solve_lp(&dual_problem.lp)?;
            let dual_lp = MethodResult {
                certificate_verified: verify_certificate(&dual_problem.lp, &dual_outcome)
                    .all_passed(),
                outcome: dual_outcome,
            };
            consistency.dual_lp_certificate = Some(dual_lp.certificate_verified);
            let dual_solution = dual_lp
                .outcome
                .optimum()
                .map(|opt| dual_problem.solution(&opt.primal));

            let mlp = measure_lp(&polytope, b)?;
            let measure_outcome = solve_lp(&mlp)?;
            let measures = MethodResult {
                certificate_verified: verify_certificate(&mlp, &measure_outcome).all_passed(),
                outcome: measure_outcome,
            };
            consistency.measures_certificate = Some(measures.certificate_verified);
            let measure = match measures.outcome.optimum() {
                Some(opt) => Some(Measure::new(opt.primal.clone())?),
                None => None,
            };
            if let Some(q) = &measure {
                consistency.measure_membership = Some(check_membership(m, q)?.member);
            }

            if bond_free {
                if let (Some(d), Some(v)) = (&dual_solution, dual_lp.value()) {
                    match measure_from_dual(m, d) {
                        Ok(q) => {
                            consistency.measure_from_dual_member =
                                Some(check_membership(m, &q)?.member);
                            consistency.measure_from_dual_preserves_objective =
                                Some(&q.expectation(b.payoff()) == v);
                        }
                        // A zero dual point only arises for a zero claim.
                        Err(Error::DegenerateDual) => {}
                        Err(e) => return Err(e),
                    }
                }
                if let (Some(q), Some(v)) = (&measure, measures.value()) {
                    let d = dual_from_measure(m, q)?;
                    consistency.dual_from_measure_feasible = Some(dual_problem.is_feasible(&d)?);
                    consistency.dual_from_measure_preserves_objective =
                        Some(&d.objective(m, b) == v);
                }
            }

            let gaps = Gaps {
                primal_minus_dual_lp: gap(Some(&primal), Some(&dual_lp)),
                dual_lp_minus_measures: gap(Some(&dual_lp), Some(&measures)),
                primal_minus_measures: gap(Some(&primal), Some(&measures)),
            };
            Ok(PricingReport {
                claim: name.clone(),
                status: ReportStatus::Priced,
                arbitrage_gains: None,
                primal: Some(primal),
                strategy,
                dual_lp: Some(dual_lp),
                dual_solution,
                measures: Some(measures),
                measure,
                gaps,
                consistency,
            })
        })
        .collect()
}
