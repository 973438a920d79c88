//! Exact projection of H-polytopes by Fourier-Motzkin elimination.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::program::{Constraint, HPolytope, LpOutcome, Relation, Sense, VarKind};
use super::rational::Rational;
use super::simplex::solve_lp;
use crate::error::{Error, Result};

/// Positive factor turning `values` into coprime integers.
fn integer_scale(values: &[&Rational]) -> Rational {
    let mut lcm = BigInt::one();
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    let mut gcd = BigInt::zero();
    for v in values {
        let scaled = v.numer() * (&lcm / v.denom());
        gcd = gcd.gcd(&scaled);
    }
    if gcd.is_zero() {
        return Rational::one();
    }
    Rational::from_big(lcm, gcd.abs())
}

/// Canonical form of a row: every entry (coefficients and rhs) an integer,
/// jointly coprime; equalities additionally get a positive leading
/// coefficient. Scaling is by a positive factor, except for the sign flip
/// on equalities, so the solution set is unchanged.
pub fn canonical_row(row: &Constraint) -> Constraint {
    let mut entries: Vec<&Rational> = row.coefficients.iter().collect();
    entries.push(&row.rhs);
    let mut k = integer_scale(&entries);
    if row.relation == Relation::Eq {
        if let Some(lead) = row.coefficients.iter().find(|c| !c.is_zero()) {
            if lead.is_negative() {
                k = -k;
            }
        }
    }
    let (coefficients, rhs) = (
        row.coefficients.iter().map(|c| c * &k).collect(),
        &row.rhs * &k,
    );
    let relation = if k.is_negative() {
        row.relation.flipped()
    } else {
        row.relation
    };
    Constraint::new(coefficients, relation, rhs)
}

/// Scales the coefficient part to coprime integers (positive factor only),
/// used as the key for pairwise dominance.
fn direction_normalized(row: &Constraint) -> Constraint {
    let entries: Vec<&Rational> = row.coefficients.iter().collect();
    let mut k = integer_scale(&entries);
    if row.relation == Relation::Eq {
        if let Some(lead) = row.coefficients.iter().find(|c| !c.is_zero()) {
            if lead.is_negative() {
                k = -k;
            }
        }
    }
    Constraint::new(
        row.coefficients.iter().map(|c| c * &k).collect(),
        row.relation,
        &row.rhs * &k,
    )
}

enum Simplified {
    Rows(Vec<Constraint>),
    Empty,
}

/// Drops tautologies, detects `0 <= negative`, removes syntactic duplicates
/// and keeps only the tightest of parallel `<=` rows.
fn simplify(rows: Vec<Constraint>) -> Simplified {
    let mut le: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    let mut eq: BTreeMap<Vec<Rational>, Rational> = BTreeMap::new();
    let mut order: Vec<(Relation, Vec<Rational>)> = Vec::new();
    for row in rows {
        if row.is_zero_row() {
            let ok = match row.relation {
                Relation::Le => !row.rhs.is_negative(),
                Relation::Eq => row.rhs.is_zero(),
                Relation::Ge => !row.rhs.is_positive(),
            };
            if ok {
                continue;
            }
            return Simplified::Empty;
        }
        let row = direction_normalized(&row);
        match row.relation {
            Relation::Eq => {
                if let Some(prev) = eq.get(&row.coefficients) {
                    if *prev != row.rhs {
                        return Simplified::Empty;
                    }
                    continue;
                }
                order.push((Relation::Eq, row.coefficients.clone()));
                eq.insert(row.coefficients, row.rhs);
            }
            _ => match le.get_mut(&row.coefficients) {
                Some(prev) => {
                    if row.rhs < *prev {
                        *prev = row.rhs;
                    }
                }
                None => {
                    order.push((Relation::Le, row.coefficients.clone()));
                    le.insert(row.coefficients, row.rhs);
                }
            },
        }
    }
    let out = order
        .into_iter()
        .map(|(rel, coeffs)| {
            let rhs = match rel {
                Relation::Eq => eq[&coeffs].clone(),
                _ => le[&coeffs].clone(),
            };
            Constraint::new(coeffs, rel, rhs)
        })
        .collect();
    Simplified::Rows(out)
}

fn empty_polytope(variables: Vec<String>) -> HPolytope {
    let n = variables.len();
    HPolytope {
        variables,
        rows: vec![Constraint::new(
            vec![Rational::zero(); n],
            Relation::Le,
            -Rational::one(),
        )],
    }
}

/// Projects `p` onto the variables not listed in `eliminate`.
///
/// Equalities mentioning the eliminated variable are used as substitutions;
/// otherwise `<=` rows are combined pairwise. After each step duplicates,
/// tautologies and pairwise-dominated rows are removed. With
/// `deep_redundancy` every surviving row is additionally tested with an
/// exact LP and dropped if the others imply it. An empty projection is
/// returned as the single row `0 <= -1`.
pub fn fourier_motzkin_project(
    p: &HPolytope,
    eliminate: &[&str],
    deep_redundancy: bool,
) -> Result<HPolytope> {
    let mut drop = vec![false; p.dim()];
    for name in eliminate {
        let idx = p
            .variable_index(name)
            .ok_or_else(|| Error::input(format!("unknown variable `{name}`")))?;
        drop[idx] = true;
    }
    for row in &p.rows {
        if row.coefficients.len() != p.dim() {
            return Err(Error::input("polytope row has wrong dimension"));
        }
    }
    let kept: Vec<usize> = (0..p.dim()).filter(|&j| !drop[j]).collect();
    let kept_names: Vec<String> = kept.iter().map(|&j| p.variables[j].clone()).collect();

    let mut rows = match simplify(p.rows.clone()) {
        Simplified::Rows(r) => r,
        Simplified::Empty => return Ok(empty_polytope(kept_names)),
    };

    for (var, _) in drop.iter().enumerate().filter(|(_, d)| **d) {
        let pivot_eq = rows
            .iter()
            .position(|r| r.relation == Relation::Eq && !r.coefficients[var].is_zero());
        let next: Vec<Constraint> = match pivot_eq {
            Some(e) => {
                let eqrow = rows.remove(e);
                let a_e = eqrow.coefficients[var].clone();
                rows.into_iter()
                    .map(|row| {
                        let a = &row.coefficients[var];
                        if a.is_zero() {
                            return row;
                        }
                        let f = a / &a_e;
                        let coefficients = row
                            .coefficients
                            .iter()
                            .zip(&eqrow.coefficients)
                            .map(|(c, ce)| c - &f * ce)
                            .collect();
                        let rhs = &row.rhs - &f * &eqrow.rhs;
                        Constraint::new(coefficients, row.relation, rhs)
                    })
                    .collect()
            }
            None => {
                let mut pos = Vec::new();
                let mut neg = Vec::new();
                let mut rest = Vec::new();
                for row in rows {
                    let a = &row.coefficients[var];
                    if a.is_positive() {
                        pos.push(row);
                    } else if a.is_negative() {
                        neg.push(row);
                    } else {
                        rest.push(row);
                    }
                }
                for pr in &pos {
                    for nr in &neg {
                        let lp = &pr.coefficients[var];
                        let ln = -&nr.coefficients[var];
                        let coefficients = pr
                            .coefficients
                            .iter()
                            .zip(&nr.coefficients)
                            .map(|(a, b)| a * &ln + b * lp)
                            .collect();
                        let rhs = &pr.rhs * &ln + &nr.rhs * lp;
                        rest.push(Constraint::new(coefficients, Relation::Le, rhs));
                    }
                }
                rest
            }
        };
        rows = match simplify(next) {
            Simplified::Rows(r) => r,
            Simplified::Empty => return Ok(empty_polytope(kept_names)),
        };
    }

    let mut out = HPolytope::new(kept_names);
    for row in rows {
        let coefficients = kept.iter().map(|&j| row.coefficients[j].clone()).collect();
        out.rows
            .push(Constraint::new(coefficients, row.relation, row.rhs));
    }

    if deep_redundancy {
        out = prune_redundant(out)?;
    }
    Ok(out)
}

/// Removes rows implied by the remaining ones, one at a time.
fn prune_redundant(p: HPolytope) -> Result<HPolytope> {
    if let LpOutcome::Infeasible(_) = solve_lp(&p.feasibility_lp())? {
        return Ok(empty_polytope(p.variables));
    }
    let mut rows = p.rows;
    let mut i = 0;
    while i < rows.len() {
        if rows[i].relation == Relation::Eq {
            i += 1;
            continue;
        }
        let mut lp = super::program::LinearProgram::new(Sense::Maximize);
        for v in &p.variables {
            lp.add_variable(v.clone(), VarKind::Free);
        }
        lp.objective = rows[i].coefficients.clone();
        lp.rows = rows
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, r)| r.clone())
            .collect();
        let redundant = match solve_lp(&lp)? {
            LpOutcome::Optimal(o) => o.value <= rows[i].rhs,
            _ => false,
        };
        if redundant {
            rows.remove(i);
        } else {
            i += 1;
        }
    }
    Ok(HPolytope {
        variables: p.variables,
        rows,
    })
}
