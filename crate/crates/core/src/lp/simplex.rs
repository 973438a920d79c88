//! Two-phase dense-tableau simplex over exact rationals.
//!
//! Pivoting uses Bland's smallest-index rule in both phases, so the method
//! terminates on every input, degenerate ones included.
//!
//! Free variables get a single tableau column. A nonbasic free column that
//! would improve the objective by *decreasing* is negated before it enters,
//! and its orientation is remembered. That is the implicit form of the usual
//! `x = x⁺ - x⁻` split with the two halves adjacent in Bland's order, so the
//! termination argument carries over unchanged.

use super::program::{
    FarkasCertificate, LinearProgram, LpOutcome, Optimum, Relation, Sense, UnboundedRay, VarKind,
};
use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Column {
    Structural(usize),
    Slack,
    Artificial,
}

struct Tableau {
    /// `rows[i]` holds the coefficients of every column followed by the rhs.
    rows: Vec<Vec<Rational>>,
    /// Reduced costs for the active phase, last entry is `-z`.
    reduced: Vec<Rational>,
    basis: Vec<usize>,
    kinds: Vec<Column>,
    /// +1 or -1 per column; only structural free columns ever flip.
    orient: Vec<i8>,
    free: Vec<bool>,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.ncols()]
    }

    fn is_basic(&self, j: usize) -> bool {
        self.basis.contains(&j)
    }

    fn negate_column(&mut self, j: usize) {
        for row in &mut self.rows {
            row[j] = -&row[j];
        }
        self.reduced[j] = -&self.reduced[j];
        self.orient[j] = -self.orient[j];
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        if piv != Rational::one() {
            let inv = piv.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !self.reduced[c].is_zero() {
            let f = self.reduced[c].clone();
            for (v, p) in self.reduced.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Installs the cost vector `cost` (indexed by column, already oriented)
    /// and recomputes reduced costs against the current basis.
    fn install_costs(&mut self, cost: &[Rational]) {
        let n = self.ncols();
        let mut reduced: Vec<Rational> = cost.to_vec();
        reduced.push(Rational::zero());
        for (i, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for j in 0..=n {
                if !row[j].is_zero() {
                    reduced[j] -= cb * &row[j];
                }
            }
        }
        self.reduced = reduced;
    }

    /// Runs Bland-rule pivots until optimal or an unbounded column is found.
    fn run(&mut self, may_enter: impl Fn(Column) -> bool) -> Step {
        loop {
            let mut entering = None;
            for j in 0..self.ncols() {
                if !may_enter(self.kinds[j]) || self.is_basic(j) {
                    continue;
                }
                let d = &self.reduced[j];
                if d.is_negative() {
                    entering = Some(j);
                    break;
                }
                if self.free[j] && d.is_positive() {
                    self.negate_column(j);
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Step::Unbounded(c),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    /// Multipliers `y_i = c_{id_i} - d_{id_i}` read off the identity columns.
    fn row_multipliers(&self, identity: &[usize], cost: &[Rational]) -> Vec<Rational> {
        identity
            .iter()
            .map(|&j| &cost[j] - &self.reduced[j])
            .collect()
    }

    fn structural_values(&self, n: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); n];
        for (i, &b) in self.basis.iter().enumerate() {
            if let Column::Structural(k) = self.kinds[b] {
                x[k] = if self.orient[b] < 0 {
                    -self.rhs(i)
                } else {
                    self.rhs(i).clone()
                };
            }
        }
        x
    }
}

/// Solves `lp` exactly.
///
/// Returns an input error when the program is malformed; otherwise the
/// outcome carries the certificate matching its status.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_variables();
    let m = lp.num_rows();

    // Row flips so every rhs is nonnegative.
    let mut flip = vec![false; m];
    let mut relations = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        if row.rhs.is_negative() {
            flip[i] = true;
            relations.push(row.relation.flipped());
        } else {
            relations.push(row.relation);
        }
    }

    let mut kinds: Vec<Column> = (0..n).map(Column::Structural).collect();
    let mut slack_col = vec![None; m];
    let mut art_col = vec![None; m];
    for (i, rel) in relations.iter().enumerate() {
        if *rel != Relation::Eq {
            slack_col[i] = Some(kinds.len());
            kinds.push(Column::Slack);
        }
    }
    for (i, rel) in relations.iter().enumerate() {
        if *rel != Relation::Le {
            art_col[i] = Some(kinds.len());
            kinds.push(Column::Artificial);
        }
    }
    let ncols = kinds.len();

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut identity = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let sign = if flip[i] {
            -Rational::one()
        } else {
            Rational::one()
        };
        let mut t = vec![Rational::zero(); ncols + 1];
        for (k, c) in row.coefficients.iter().enumerate() {
            if !c.is_zero() {
                t[k] = c * &sign;
            }
        }
        t[ncols] = &row.rhs * &sign;
        if let Some(s) = slack_col[i] {
            t[s] = if relations[i] == Relation::Le {
                Rational::one()
            } else {
                -Rational::one()
            };
        }
        let id = match relations[i] {
            Relation::Le => slack_col[i].unwrap(),
            _ => {
                let a = art_col[i].unwrap();
                t[a] = Rational::one();
                a
            }
        };
        basis.push(id);
        identity.push(id);
        rows.push(t);
    }

    let free: Vec<bool> = (0..ncols)
        .map(|j| matches!(kinds[j], Column::Structural(k) if lp.variables[k].kind == VarKind::Free))
        .collect();
    let mut tab = Tableau {
        rows,
        reduced: Vec::new(),
        basis,
        kinds,
        orient: vec![1; ncols],
        free,
    };

    // Phase 1: minimize the sum of artificials.
    let phase1_cost: Vec<Rational> = tab
        .kinds
        .iter()
        .map(|k| {
            if *k == Column::Artificial {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    tab.install_costs(&phase1_cost);
    if let Step::Unbounded(_) = tab.run(|_| true) {
        return Err(Error::Internal("phase one reported unbounded".into()));
    }
    let infeasibility = -&tab.reduced[ncols];
    if infeasibility.is_positive() {
        let y = tab.row_multipliers(&identity, &phase1_cost);
        let multipliers = y
            .into_iter()
            .zip(&flip)
            .map(|(v, &f)| if f { -v } else { v })
            .collect();
        return Ok(LpOutcome::Infeasible(FarkasCertificate { multipliers }));
    }

    // Drive zero-level artificials out of the basis where possible. Rows
    // where that fails are linear combinations of other rows; their
    // artificial stays basic at zero for good.
    for r in 0..m {
        if tab.kinds[tab.basis[r]] != Column::Artificial {
            continue;
        }
        if let Some(c) =
            (0..ncols).find(|&j| tab.kinds[j] != Column::Artificial && !tab.rows[r][j].is_zero())
        {
            tab.pivot(r, c);
        }
    }

    // Phase 2 on the true objective, always as a minimization internally.
    let internal_sign = match lp.sense {
        Sense::Minimize => Rational::one(),
        Sense::Maximize => -Rational::one(),
    };
    let cost: Vec<Rational> = (0..ncols)
        .map(|j| match tab.kinds[j] {
            Column::Structural(k) => {
                let c = &lp.objective[k] * &internal_sign;
                if tab.orient[j] < 0 {
                    -c
                } else {
                    c
                }
            }
            _ => Rational::zero(),
        })
        .collect();
    tab.install_costs(&cost);
    match tab.run(|k| k != Column::Artificial) {
        Step::Optimal => {
            let primal = tab.structural_values(n);
            let y = tab.row_multipliers(&identity, &cost);
            // Undo the row flips and, for maximization, the objective negation.
            let duals = y
                .into_iter()
                .zip(&flip)
                .map(|(v, &f)| {
                    let v = if f { -v } else { v };
                    &v * &internal_sign
                })
                .collect();
            let value = lp.objective_value(&primal);
            Ok(LpOutcome::Optimal(Optimum {
                value,
                primal,
                duals,
            }))
        }
        Step::Unbounded(c) => {
            let point = tab.structural_values(n);
            let mut direction = vec![Rational::zero(); n];
            if let Column::Structural(k) = tab.kinds[c] {
                direction[k] = Rational::from(tab.orient[c] as i64);
            }
            for (i, &b) in tab.basis.iter().enumerate() {
                if let Column::Structural(k) = tab.kinds[b] {
                    let step = -&tab.rows[i][c];
                    direction[k] = if tab.orient[b] < 0 { -step } else { step };
                }
            }
            Ok(LpOutcome::Unbounded(UnboundedRay { point, direction }))
        }
    }
}
