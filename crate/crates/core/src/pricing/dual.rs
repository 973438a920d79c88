use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Rational, Relation, Sense, VarKind};
use crate::market::{Claim, Market};

/// A point of the dual program: a density `y1 >= 0` and free intermediate
/// densities `y2[t-1]` for `t = 1..T-1`, all scenario-indexed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualSolution {
    pub y1: Vec<Rational>,
    pub y2: Vec<Vec<Rational>>,
}

impl DualSolution {
    /// `y2` at time `t` (`1 <= t <= T-1`).
    pub fn y2_at(&self, t: usize) -> &[Rational] {
        &self.y2[t - 1]
    }

    /// `Σ P(w) y1(w) B(w)`.
    pub fn objective(&self, m: &Market, b: &Claim) -> Rational {
        (0..m.num_scenarios())
            .map(|w| m.space().probability(w) * &self.y1[w] * b.at(w))
            .sum()
    }
}

/// One row of the dual program, identified by asset, time and seller atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DualRowTag {
    pub asset: usize,
    pub t: usize,
    pub atom: usize,
}

#[derive(Debug, Clone)]
pub struct DualProblem {
    pub lp: LinearProgram,
    /// `y1_vars[w]`
    pub y1_vars: Vec<usize>,
    /// `y2_vars[t-1][w]`
    pub y2_vars: Vec<Vec<usize>>,
    pub row_tags: Vec<DualRowTag>,
}

impl DualProblem {
    pub fn solution(&self, x: &[Rational]) -> DualSolution {
        DualSolution {
            y1: self.y1_vars.iter().map(|&v| x[v].clone()).collect(),
            y2: self
                .y2_vars
                .iter()
                .map(|per_w| per_w.iter().map(|&v| x[v].clone()).collect())
                .collect(),
        }
    }

    pub fn assignment(&self, d: &DualSolution) -> Result<Vec<Rational>> {
        if d.y1.len() != self.y1_vars.len()
            || d.y2.len() != self.y2_vars.len()
            || d.y2
                .iter()
                .zip(&self.y2_vars)
                .any(|(a, b)| a.len() != b.len())
        {
            return Err(Error::input("dual solution has the wrong shape"));
        }
        let mut x = vec![Rational::zero(); self.lp.num_variables()];
        for (&v, y) in self.y1_vars.iter().zip(&d.y1) {
            x[v] = y.clone();
        }
        for (vars, ys) in self.y2_vars.iter().zip(&d.y2) {
            for (&v, y) in vars.iter().zip(ys) {
                x[v] = y.clone();
            }
        }
        Ok(x)
    }

    /// Whether `d` satisfies every dual row and `y1 >= 0`.
    pub fn is_feasible(&self, d: &DualSolution) -> Result<bool> {
        Ok(self.lp.is_feasible(&self.assignment(d)?))
    }
}

/// Builds the dual program
///
/// ```text
/// max Σ_w P(w) y1(w) B(w)
/// ```
///
/// over `y1 >= 0` and free `y2^t`, `t = 1..T-1`. Writing `z_0 ≡ 1`,
/// `z_t = y2^t` and `z_T = y1`, there is one row per asset `i`, time
/// `t = 0..T-1` and seller atom `A` at `t`:
///
/// ```text
/// Σ_{w∈A} P(w) (z_t(w) S_i(t,w) - z_{t+1}(w) S_i(t+1,w))  (= or >=)  0
/// ```
///
/// with `=` for assets that may be shorted and `>=` for restricted ones.
/// At `t = 0` the constant part moves to the right-hand side.
pub fn build_dual_lp(m: &Market, b: &Claim) -> Result<DualProblem> {
    m.ensure_valid().map_err(|e| Error::input(e.to_string()))?;
    if b.len() != m.num_scenarios() {
        return Err(Error::input("claim has the wrong number of scenarios"));
    }
    let n = m.num_scenarios();
    let horizon = m.horizon();
    let p = m.space().probabilities();
    let names = m.space().names();

    let mut lp = LinearProgram::new(Sense::Maximize);
    let y1_vars: Vec<usize> = (0..n)
        .map(|w| lp.add_variable(format!("y1[{}]", names[w]), VarKind::NonNegative))
        .collect();
    let y2_vars: Vec<Vec<usize>> = (1..horizon)
        .map(|t| {
            (0..n)
                .map(|w| lp.add_variable(format!("y2[{t}][{}]", names[w]), VarKind::Free))
                .collect()
        })
        .collect();
    for w in 0..n {
        lp.set_objective(y1_vars[w], &p[w] * b.at(w));
    }

    // Variable holding z_t(w), or None for the constant z_0.
    let z = |t: usize, w: usize| -> Option<usize> {
        if t == 0 {
            None
        } else if t == horizon {
            Some(y1_vars[w])
        } else {
            Some(y2_vars[t - 1][w])
        }
    };

    let mut row_tags = Vec::new();
    for t in 0..horizon {
        let g = m.seller_filtration().at(t);
        for asset in 0..m.num_assets() {
            let relation = if m.is_short_restricted(asset) {
                Relation::Ge
            } else {
                Relation::Eq
            };
            for (k, block) in g.blocks().iter().enumerate() {
                let mut terms = Vec::new();
                let mut rhs = Rational::zero();
                for &w in block {
                    let now = &p[w] * m.price(asset, t, w);
                    match z(t, w) {
                        Some(v) => terms.push((v, now)),
                        None => rhs -= now,
                    }
                    let next = &p[w] * m.price(asset, t + 1, w);
                    terms.push((z(t + 1, w).expect("z_{t+1} is a variable"), -next));
                }
                lp.add_row(terms, relation, rhs);
                row_tags.push(DualRowTag { asset, t, atom: k });
            }
        }
    }

    Ok(DualProblem {
        lp,
        y1_vars,
        y2_vars,
        row_tags,
    })
}
