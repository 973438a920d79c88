//! Independent re-verification of solver outcomes.

use serde::Serialize;

use super::program::{dot, LinearProgram, LpOutcome, Relation, Sense, VarKind};
use super::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CertificateReport {
    pub checks: Vec<CertificateCheck>,
}

impl CertificateReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CertificateCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, failure: Option<String>) {
        self.checks.push(CertificateCheck {
            name,
            passed: failure.is_none(),
            detail: failure,
        });
    }
}

fn first_failure<I: IntoIterator<Item = Option<String>>>(it: I) -> Option<String> {
    it.into_iter().flatten().next()
}

/// `yᵀA_j` for every column `j`.
fn transpose_mul(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); lp.num_variables()];
    for (row, yi) in lp.rows.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(&row.coefficients) {
            if !a.is_zero() {
                *o += yi * a;
            }
        }
    }
    out
}

/// Re-derives every certificate condition of `outcome` against `lp` with
/// exact arithmetic and reports each check separately.
pub fn verify_certificate(lp: &LinearProgram, outcome: &LpOutcome) -> CertificateReport {
    let mut report = CertificateReport::default();
    if let Err(e) = lp.validate() {
        report.push("well_formed", Some(e.to_string()));
        return report;
    }
    let n = lp.num_variables();
    let m = lp.num_rows();
    // +1 if the sense is minimize, -1 if maximize; multiplies every sign rule.
    let s = match lp.sense {
        Sense::Minimize => 1,
        Sense::Maximize => -1,
    };
    match outcome {
        LpOutcome::Optimal(opt) => {
            let x = &opt.primal;
            let y = &opt.duals;
            if x.len() != n || y.len() != m {
                report.push(
                    "dimensions",
                    Some(format!(
                        "primal has {} entries for {} variables, duals {} for {} rows",
                        x.len(),
                        n,
                        y.len(),
                        m
                    )),
                );
                return report;
            }
            report.push(
                "row_feasibility",
                first_failure(lp.rows.iter().enumerate().map(|(i, r)| {
                    (!r.is_satisfied(x))
                        .then(|| format!("row {i}: {} {} {}", r.lhs(x), r.relation.symbol(), r.rhs))
                })),
            );
            report.push(
                "variable_signs",
                first_failure(lp.variables.iter().zip(x).map(|(v, xv)| {
                    (v.kind == VarKind::NonNegative && xv.is_negative())
                        .then(|| format!("{} = {}", v.name, xv))
                })),
            );
            report.push(
                "dual_signs",
                first_failure(lp.rows.iter().zip(y).enumerate().map(|(i, (r, yi))| {
                    let ok = match r.relation {
                        Relation::Eq => true,
                        Relation::Ge => s * yi.signum() >= 0,
                        Relation::Le => s * yi.signum() <= 0,
                    };
                    (!ok).then(|| format!("row {i} ({}) has multiplier {yi}", r.relation.symbol()))
                })),
            );
            let yta = transpose_mul(lp, y);
            let reduced: Vec<Rational> =
                lp.objective.iter().zip(&yta).map(|(c, a)| c - a).collect();
            report.push(
                "reduced_costs",
                first_failure(lp.variables.iter().zip(&reduced).map(|(v, d)| {
                    let ok = match v.kind {
                        VarKind::Free => d.is_zero(),
                        VarKind::NonNegative => s * d.signum() >= 0,
                    };
                    (!ok).then(|| format!("{} has reduced cost {d}", v.name))
                })),
            );
            let row_slack = first_failure(lp.rows.iter().zip(y).enumerate().map(|(i, (r, yi))| {
                let slack = r.lhs(x) - &r.rhs;
                (!(yi * &slack).is_zero()).then(|| format!("row {i}: y = {yi}, slack = {slack}"))
            }));
            let col_slack = row_slack.or_else(|| {
                first_failure(
                    lp.variables
                        .iter()
                        .zip(&reduced)
                        .zip(x)
                        .map(|((v, d), xv)| {
                            (!(d * xv).is_zero())
                                .then(|| format!("{}: reduced cost {d}, value {xv}", v.name))
                        }),
                )
            });
            report.push("complementary_slackness", col_slack);
            let primal_value = lp.objective_value(x);
            let dual_value: Rational = lp.rows.iter().zip(y).map(|(r, yi)| yi * &r.rhs).sum();
            let mut objective_failure = None;
            if primal_value != opt.value {
                objective_failure = Some(format!(
                    "reported value {} but c·x = {}",
                    opt.value, primal_value
                ));
            } else if dual_value != opt.value {
                objective_failure = Some(format!(
                    "reported value {} but yᵀb = {}",
                    opt.value, dual_value
                ));
            }
            report.push("objective_equality", objective_failure);
        }
        LpOutcome::Infeasible(cert) => {
            let y = &cert.multipliers;
            if y.len() != m {
                report.push(
                    "dimensions",
                    Some(format!("{} multipliers for {} rows", y.len(), m)),
                );
                return report;
            }
            report.push(
                "farkas_signs",
                first_failure(lp.rows.iter().zip(y).enumerate().map(|(i, (r, yi))| {
                    let ok = match r.relation {
                        Relation::Eq => true,
                        Relation::Ge => !yi.is_negative(),
                        Relation::Le => !yi.is_positive(),
                    };
                    (!ok).then(|| format!("row {i} ({}) has multiplier {yi}", r.relation.symbol()))
                })),
            );
            let yta = transpose_mul(lp, y);
            report.push(
                "farkas_combination",
                first_failure(lp.variables.iter().zip(&yta).map(|(v, a)| {
                    let ok = match v.kind {
                        VarKind::Free => a.is_zero(),
                        VarKind::NonNegative => !a.is_positive(),
                    };
                    (!ok).then(|| format!("{} has combined coefficient {a}", v.name))
                })),
            );
            let yb: Rational = lp.rows.iter().zip(y).map(|(r, yi)| yi * &r.rhs).sum();
            report.push(
                "farkas_contradiction",
                (!yb.is_positive()).then(|| format!("combined rhs {yb} is not positive")),
            );
        }
        LpOutcome::Unbounded(ray) => {
            let (x, d) = (&ray.point, &ray.direction);
            if x.len() != n || d.len() != n {
                report.push(
                    "dimensions",
                    Some(format!(
                        "ray has {}/{} entries for {} variables",
                        x.len(),
                        d.len(),
                        n
                    )),
                );
                return report;
            }
            report.push(
                "point_feasibility",
                (!lp.is_feasible(x)).then(|| "ray base point is infeasible".to_string()),
            );
            report.push(
                "ray_recession",
                first_failure(lp.rows.iter().enumerate().map(|(i, r)| {
                    let ad = dot(&r.coefficients, d);
                    (!r.relation.holds(&ad, &Rational::zero()))
                        .then(|| format!("row {i}: a·d = {ad} violates {} 0", r.relation.symbol()))
                }))
                .or_else(|| {
                    first_failure(lp.variables.iter().zip(d).map(|(v, dv)| {
                        (v.kind == VarKind::NonNegative && dv.is_negative())
                            .then(|| format!("{} decreases along the ray", v.name))
                    }))
                }),
            );
            let cd = lp.objective_value(d);
            report.push(
                "ray_improvement",
                (s * cd.signum() >= 0).then(|| format!("objective change along ray is {cd}")),
            );
        }
    }
    report
}
