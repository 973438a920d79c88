//! The set of mixed martingale / super-martingale measures of the seller's
//! optional projection, and the maps between measures and dual points.

use serde::Serialize;

use super::dual::DualSolution;
use crate::error::{Error, Result};
use crate::lp::{Constraint, HPolytope, Rational, Relation};
use crate::market::Market;
use crate::scenario::{conditional_expectation, Measure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowTag {
    Normalization,
    Nonnegativity {
        scenario: usize,
    },
    /// `Σ_{w∈A} q(w) (S_asset(t+1, w) - S_asset(t, w))  (= or <=)  0`
    Asset {
        asset: usize,
        t: usize,
        atom: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasurePolytope {
    pub description: HPolytope,
    /// One tag per row of `description`.
    pub tags: Vec<RowTag>,
}

/// Name of the measure variable for scenario `w` (1-based, document order).
pub fn measure_variable(w: usize) -> String {
    format!("q{}", w + 1)
}

/// H-representation of the measure set: normalization, nonnegativity and
/// one one-step row per asset, time `t < T` and seller atom at `t`.
/// Rows whose coefficients all vanish (`0 <= 0`, `0 = 0`) are omitted.
///
/// The set depends on the market only, not on any claim.
pub fn build_measure_polytope(m: &Market) -> Result<MeasurePolytope> {
    m.ensure_valid().map_err(|e| Error::input(e.to_string()))?;
    let n = m.num_scenarios();
    let mut description = HPolytope::new((0..n).map(measure_variable).collect());
    let mut tags = Vec::new();

    description.push(Constraint::new(
        vec![Rational::one(); n],
        Relation::Eq,
        Rational::one(),
    ))?;
    tags.push(RowTag::Normalization);
    for w in 0..n {
        let mut c = vec![Rational::zero(); n];
        c[w] = -Rational::one();
        description.push(Constraint::new(c, Relation::Le, Rational::zero()))?;
        tags.push(RowTag::Nonnegativity { scenario: w });
    }
    for t in 0..m.horizon() {
        let g = m.seller_filtration().at(t);
        for asset in 0..m.num_assets() {
            let relation = if m.is_short_restricted(asset) {
                Relation::Le
            } else {
                Relation::Eq
            };
            for (k, block) in g.blocks().iter().enumerate() {
                let mut c = vec![Rational::zero(); n];
                for &w in block {
                    c[w] = m.price(asset, t + 1, w) - m.price(asset, t, w);
                }
                let row = Constraint::new(c, relation, Rational::zero());
                if row.is_zero_row() {
                    continue;
                }
                description.push(row)?;
                tags.push(RowTag::Asset { asset, t, atom: k });
            }
        }
    }
    Ok(MeasurePolytope { description, tags })
}

/// `Q(w) = P(w) y1(w) / Σ P y1`.
pub fn measure_from_dual(m: &Market, d: &DualSolution) -> Result<Measure> {
    let n = m.num_scenarios();
    if d.y1.len() != n {
        return Err(Error::input(
            "dual density has the wrong number of scenarios",
        ));
    }
    if let Some(w) = d.y1.iter().position(Rational::is_negative) {
        return Err(Error::input(format!(
            "dual density is negative in scenario `{}`",
            m.space().name(w)
        )));
    }
    let weighted: Vec<Rational> = (0..n)
        .map(|w| m.space().probability(w) * &d.y1[w])
        .collect();
    let mass: Rational = weighted.iter().sum();
    if mass.is_zero() {
        return Err(Error::DegenerateDual);
    }
    Measure::new(weighted.into_iter().map(|x| x / &mass).collect())
}

/// `y1 = dQ/dP` and `y2^t = E_P[y1 | F_t]` on the full filtration.
pub fn dual_from_measure(m: &Market, q: &Measure) -> Result<DualSolution> {
    let n = m.num_scenarios();
    if q.len() != n {
        return Err(Error::input("measure has the wrong number of scenarios"));
    }
    let y1: Vec<Rational> = (0..n)
        .map(|w| q.weight(w) / m.space().probability(w))
        .collect();
    let p = m.space().reference_measure();
    let y2 = (1..m.horizon())
        .map(|t| conditional_expectation(&y1, m.full_filtration().at(t), &p))
        .collect::<Result<Vec<_>>>()?;
    Ok(DualSolution { y1, y2 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipViolation {
    pub asset: usize,
    pub t: usize,
    pub k: usize,
    pub atom: usize,
    /// `E_Q[S(t+k) | G_t]` on the atom.
    pub later: Rational,
    /// `E_Q[S(t) | G_t]` on the atom.
    pub now: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    /// Number of `(asset, t, k, atom)` conditions evaluated.
    pub conditions_checked: usize,
    pub violations: Vec<MembershipViolation>,
}

/// Evaluates every condition `E_Q[S(t+k) | G_t] (= or <=) E_Q[S(t) | G_t]`
/// for `k >= 1`, `t + k <= T`, on every seller atom at `t`, using
/// conditional expectations with the zero-mass convention.
pub fn check_membership(m: &Market, q: &Measure) -> Result<MembershipReport> {
    if q.len() != m.num_scenarios() {
        return Err(Error::input("measure has the wrong number of scenarios"));
    }
    let horizon = m.horizon();
    let mut violations = Vec::new();
    let mut checked = 0;
    for asset in 0..m.num_assets() {
        let s = &m.prices()[asset];
        for t in 0..horizon {
            let g = m.seller_filtration().at(t);
            let now = conditional_expectation(s.slice(t), g, q)?;
            for k in 1..=horizon - t {
                let later = conditional_expectation(s.slice(t + k), g, q)?;
                for (atom, block) in g.blocks().iter().enumerate() {
                    checked += 1;
                    let w = block[0];
                    let ok = if m.is_short_restricted(asset) {
                        later[w] <= now[w]
                    } else {
                        later[w] == now[w]
                    };
                    if !ok {
                        violations.push(MembershipViolation {
                            asset,
                            t,
                            k,
                            atom,
                            later: later[w].clone(),
                            now: now[w].clone(),
                        });
                    }
                }
            }
        }
    }
    Ok(MembershipReport {
        member: violations.is_empty(),
        conditions_checked: checked,
        violations,
    })
}
