use serde::Serialize;

use super::rational::Rational;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    /// Relation obtained after multiplying both sides by -1.
    pub fn flipped(self) -> Relation {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }
}

/// One linear row `coefficients · x (relation) rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coefficients: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coefficients,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[Rational]) -> Rational {
        dot(&self.coefficients, x)
    }

    pub fn is_satisfied(&self, x: &[Rational]) -> bool {
        self.relation.holds(&self.lhs(x), &self.rhs)
    }

    pub fn is_zero_row(&self) -> bool {
        self.coefficients.iter().all(Rational::is_zero)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A linear program over exact rationals.
///
/// Rows are stored densely; `add_variable` pads existing rows with zeros so
/// every row always has one coefficient per declared variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub objective: Vec<Rational>,
    pub rows: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        LinearProgram {
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, kind: VarKind) -> usize {
        self.variables.push(Variable {
            name: name.into(),
            kind,
        });
        self.objective.push(Rational::zero());
        for row in &mut self.rows {
            row.coefficients.push(Rational::zero());
        }
        self.variables.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coefficient: Rational) {
        self.objective[var] = coefficient;
    }

    /// Adds a row given as `(variable index, coefficient)` pairs; repeated
    /// indices accumulate. Returns the row index.
    pub fn add_row(
        &mut self,
        terms: impl IntoIterator<Item = (usize, Rational)>,
        relation: Relation,
        rhs: Rational,
    ) -> usize {
        let mut coefficients = vec![Rational::zero(); self.variables.len()];
        for (var, c) in terms {
            coefficients[var] += c;
        }
        self.rows.push(Constraint::new(coefficients, relation, rhs));
        self.rows.len() - 1
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Checks the structural invariants: one objective coefficient and one
    /// row coefficient per variable.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        if self.objective.len() != n {
            return Err(Error::input(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                n
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(Error::input(format!(
                    "row {} has {} coefficients for {} variables",
                    i,
                    row.coefficients.len(),
                    n
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// True iff `x` satisfies every row and every sign restriction.
    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.variables.len()
            && self.rows.iter().all(|r| r.is_satisfied(x))
            && self
                .variables
                .iter()
                .zip(x)
                .all(|(v, xv)| v.kind == VarKind::Free || !xv.is_negative())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl LpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        }
    }
}

/// Optimal solution with its dual certificate.
///
/// Dual multipliers follow the row order of the program. For a minimization
/// they satisfy `y >= 0` on `>=` rows and `y <= 0` on `<=` rows, with
/// `c - yᵀA >= 0` on nonnegative variables and `= 0` on free ones. For a
/// maximization every sign is reversed. In both cases `yᵀb` equals the
/// optimal value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Optimum {
    pub value: Rational,
    pub primal: Vec<Rational>,
    pub duals: Vec<Rational>,
}

/// Row multipliers `y` proving infeasibility: `y <= 0` on `<=` rows,
/// `y >= 0` on `>=` rows, `yᵀA <= 0` on nonnegative variables, `yᵀA = 0`
/// on free variables, and `yᵀb > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

/// A feasible point plus a recession direction along which the objective
/// improves without bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnboundedRay {
    pub point: Vec<Rational>,
    pub direction: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpOutcome {
    Optimal(Optimum),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedRay),
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal(_) => LpStatus::Optimal,
            LpOutcome::Infeasible(_) => LpStatus::Infeasible,
            LpOutcome::Unbounded(_) => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&Optimum> {
        match self {
            LpOutcome::Optimal(o) => Some(o),
            _ => None,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        self.optimum().map(|o| &o.value)
    }
}

/// An H-representation `{x : rows}` where every row is `<=` or `=`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HPolytope {
    pub variables: Vec<String>,
    pub rows: Vec<Constraint>,
}

impl HPolytope {
    pub fn new(variables: Vec<String>) -> Self {
        HPolytope {
            variables,
            rows: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    /// Adds a row; `>=` rows are stored negated as `<=`.
    pub fn push(&mut self, row: Constraint) -> Result<()> {
        if row.coefficients.len() != self.variables.len() {
            return Err(Error::input(format!(
                "row has {} coefficients for {} variables",
                row.coefficients.len(),
                self.variables.len()
            )));
        }
        let row = match row.relation {
            Relation::Ge => Constraint::new(
                row.coefficients.iter().map(|c| -c).collect(),
                Relation::Le,
                -row.rhs,
            ),
            _ => row,
        };
        self.rows.push(row);
        Ok(())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.variables.len() && self.rows.iter().all(|r| r.is_satisfied(x))
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Feasibility program over free variables with a zero objective.
    pub fn feasibility_lp(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(Sense::Maximize);
        for v in &self.variables {
            lp.add_variable(v.clone(), VarKind::Free);
        }
        lp.rows = self.rows.clone();
        lp
    }
}
