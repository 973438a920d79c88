use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Rational, Relation, Sense, VarKind};
use crate::market::{Claim, Market, StrategyLayout, TradingStrategy};

/// The seller's superreplication LP together with the map from LP columns
/// back to `v` and the strategy holdings.
#[derive(Debug, Clone)]
pub struct PrimalProblem {
    pub lp: LinearProgram,
    pub price_var: usize,
    layout: StrategyLayout,
    /// Row ranges by constraint family, in LP row order.
    pub superreplication_rows: std::ops::Range<usize>,
    pub self_financing_rows: std::ops::Range<usize>,
    pub budget_row: usize,
    pub initial_cost_row: usize,
}

impl PrimalProblem {
    pub fn strategy(&self, m: &Market, x: &[Rational]) -> TradingStrategy {
        self.layout.extract(m, x)
    }

    /// LP column of `H_asset(t, block)`.
    pub fn holding_var(&self, asset: usize, t: usize, block: usize) -> usize {
        self.layout.var(asset, t, block)
    }
}

/// Builds `min v` subject to
///
/// * `S(T) · H(T-1) >= B` in every scenario,
/// * `S(t) · (H(t) - H(t-1)) = 0` for `t = 1..T-1` (one row per distinct
///   full-information atom row),
/// * `H_j >= 0` for short-restricted `j` (as variable signs),
/// * `S(0) · H(0) <= v` and `S(0) · H(0) >= 0`.
///
/// Holdings are indexed by the atoms of the seller filtration.
pub fn build_primal_lp(m: &Market, b: &Claim) -> Result<PrimalProblem> {
    m.ensure_valid().map_err(|e| Error::input(e.to_string()))?;
    if b.len() != m.num_scenarios() {
        return Err(Error::input("claim has the wrong number of scenarios"));
    }
    let horizon = m.horizon();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let price_var = lp.add_variable("v", VarKind::Free);
    lp.set_objective(price_var, Rational::one());
    let layout = StrategyLayout::add_to(&mut lp, m, true);

    let start = lp.num_rows();
    for w in 0..m.num_scenarios() {
        lp.add_row(
            layout.value_terms(m, horizon, horizon - 1, w),
            Relation::Ge,
            b.at(w).clone(),
        );
    }
    let superreplication_rows = start..lp.num_rows();

    let start = lp.num_rows();
    layout.add_self_financing(&mut lp, m);
    let self_financing_rows = start..lp.num_rows();

    let mut budget = layout.value_terms(m, 0, 0, 0);
    budget.push((price_var, -Rational::one()));
    let budget_row = lp.add_row(budget, Relation::Le, Rational::zero());
    let initial_cost_row = lp.add_row(
        layout.value_terms(m, 0, 0, 0),
        Relation::Ge,
        Rational::zero(),
    );

    Ok(PrimalProblem {
        lp,
        price_var,
        layout,
        superreplication_rows,
        self_financing_rows,
        budget_row,
        initial_cost_row,
    })
}
