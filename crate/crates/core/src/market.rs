//! Discrete-time market with a discounted bond, a seller filtration coarser
//! than the full one, and a set of assets that may not be held short.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Rational, Relation, Sense, VarKind};
use crate::scenario::{refines, Filtration, Process, ScenarioSpace};

/// Asset 0 is the bond.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Market {
    space: ScenarioSpace,
    assets: Vec<String>,
    prices: Vec<Process>,
    full_filtration: Filtration,
    seller_filtration: Filtration,
    short_restricted: BTreeSet<usize>,
}

impl Market {
    /// Builds a market, checking only shapes (horizons, scenario counts,
    /// index ranges). Economic invariants are checked by [`validate_market`].
    pub fn new(
        space: ScenarioSpace,
        assets: Vec<String>,
        prices: Vec<Process>,
        full_filtration: Filtration,
        seller_filtration: Filtration,
        short_restricted: BTreeSet<usize>,
    ) -> Result<Self> {
        if assets.is_empty() {
            return Err(Error::input("market has no assets (the bond is asset 0)"));
        }
        if assets.len() != prices.len() {
            return Err(Error::input(format!(
                "{} asset names but {} price processes",
                assets.len(),
                prices.len()
            )));
        }
        let n = space.len();
        let horizon = full_filtration.horizon();
        if seller_filtration.horizon() != horizon {
            return Err(Error::input(
                "full and seller filtrations differ in horizon",
            ));
        }
        if full_filtration.num_scenarios() != n || seller_filtration.num_scenarios() != n {
            return Err(Error::input(
                "filtration scenario count differs from the space",
            ));
        }
        for (name, p) in assets.iter().zip(&prices) {
            if p.horizon() != horizon || p.num_scenarios() != n {
                return Err(Error::input(format!(
                    "price process of `{name}` has the wrong shape"
                )));
            }
        }
        if let Some(&i) = short_restricted.iter().find(|&&i| i >= assets.len()) {
            return Err(Error::input(format!(
                "short-restricted asset index {i} out of range"
            )));
        }
        Ok(Market {
            space,
            assets,
            prices,
            full_filtration,
            seller_filtration,
            short_restricted,
        })
    }

    pub fn space(&self) -> &ScenarioSpace {
        &self.space
    }

    pub fn horizon(&self) -> usize {
        self.full_filtration.horizon()
    }

    pub fn num_scenarios(&self) -> usize {
        self.space.len()
    }

    /// Number of assets including the bond (`N + 1`).
    pub fn num_assets(&self) -> usize {
        self.assets.len()
    }

    pub fn asset_names(&self) -> &[String] {
        &self.assets
    }

    pub fn asset_index(&self, name: &str) -> Option<usize> {
        self.assets.iter().position(|a| a == name)
    }

    pub fn prices(&self) -> &[Process] {
        &self.prices
    }

    /// `S_i(t, w)`.
    pub fn price(&self, asset: usize, t: usize, w: usize) -> &Rational {
        self.prices[asset].at(t, w)
    }

    pub fn full_filtration(&self) -> &Filtration {
        &self.full_filtration
    }

    pub fn seller_filtration(&self) -> &Filtration {
        &self.seller_filtration
    }

    pub fn short_restricted(&self) -> &BTreeSet<usize> {
        &self.short_restricted
    }

    pub fn is_short_restricted(&self, asset: usize) -> bool {
        self.short_restricted.contains(&asset)
    }

    /// Same market with a different short-restricted set.
    pub fn with_short_restricted(&self, set: BTreeSet<usize>) -> Result<Market> {
        Market::new(
            self.space.clone(),
            self.assets.clone(),
            self.prices.clone(),
            self.full_filtration.clone(),
            self.seller_filtration.clone(),
            set,
        )
    }

    /// Same market with a different seller filtration.
    pub fn with_seller_filtration(&self, g: Filtration) -> Result<Market> {
        Market::new(
            self.space.clone(),
            self.assets.clone(),
            self.prices.clone(),
            self.full_filtration.clone(),
            g,
            self.short_restricted.clone(),
        )
    }

    /// Same market with the given price processes replaced.
    pub fn with_prices(&self, prices: Vec<Process>) -> Result<Market> {
        Market::new(
            self.space.clone(),
            self.assets.clone(),
            prices,
            self.full_filtration.clone(),
            self.seller_filtration.clone(),
            self.short_restricted.clone(),
        )
    }

    /// Fails with a validation error naming the first failed check.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_market(self);
        match report.checks.iter().find(|c| !c.passed) {
            None => Ok(()),
            Some(c) => Err(Error::validation(format!(
                "market check `{}` failed: {}",
                c.name,
                c.witness.as_deref().unwrap_or("")
            ))),
        }
    }
}

/// A nonnegative payoff at the horizon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Claim {
    payoff: Vec<Rational>,
}

impl Claim {
    pub fn new(payoff: Vec<Rational>) -> Result<Self> {
        if let Some((w, v)) = payoff.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::validation(format!(
                "claim payoff is negative in scenario {w} ({v})"
            )));
        }
        Ok(Claim { payoff })
    }

    pub fn constant(n: usize, c: Rational) -> Result<Self> {
        Claim::new(vec![c; n])
    }

    pub fn payoff(&self) -> &[Rational] {
        &self.payoff
    }

    pub fn at(&self, w: usize) -> &Rational {
        &self.payoff[w]
    }

    pub fn len(&self) -> usize {
        self.payoff.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payoff.is_empty()
    }
}

/// Holdings `H_n(t, A)` for every asset, every `t < T` and every block `A`
/// of the seller partition at `t`. Adaptedness holds by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TradingStrategy {
    /// `holdings[asset][t][block]`
    holdings: Vec<Vec<Vec<Rational>>>,
}

impl TradingStrategy {
    pub fn zeros(m: &Market) -> Self {
        let g = m.seller_filtration();
        let holdings = (0..m.num_assets())
            .map(|_| {
                (0..m.horizon())
                    .map(|t| vec![Rational::zero(); g.at(t).len()])
                    .collect()
            })
            .collect();
        TradingStrategy { holdings }
    }

    pub fn set(&mut self, asset: usize, t: usize, block: usize, value: Rational) {
        self.holdings[asset][t][block] = value;
    }

    pub fn by_block(&self, asset: usize, t: usize, block: usize) -> &Rational {
        &self.holdings[asset][t][block]
    }

    /// `H_asset(t, w)`, looked up through the seller partition.
    pub fn at(&self, m: &Market, asset: usize, t: usize, w: usize) -> &Rational {
        let k = m.seller_filtration().at(t).atom(w);
        &self.holdings[asset][t][k]
    }

    pub fn holdings(&self) -> &[Vec<Vec<Rational>>] {
        &self.holdings
    }

    fn fits(&self, m: &Market) -> bool {
        let g = m.seller_filtration();
        self.holdings.len() == m.num_assets()
            && self.holdings.iter().all(|per_t| {
                per_t.len() == m.horizon()
                    && per_t
                        .iter()
                        .enumerate()
                        .all(|(t, b)| b.len() == g.at(t).len())
            })
    }

    /// `S(t, w) · H(s, w)`.
    pub fn portfolio_value(&self, m: &Market, t: usize, s: usize, w: usize) -> Rational {
        (0..m.num_assets())
            .map(|n| m.price(n, t, w) * self.at(m, n, s, w))
            .sum()
    }

    /// Terminal values `S(T) · H(T-1)` per scenario.
    pub fn terminal_values(&self, m: &Market) -> Vec<Rational> {
        let t = m.horizon();
        (0..m.num_scenarios())
            .map(|w| self.portfolio_value(m, t, t - 1, w))
            .collect()
    }

    pub fn initial_cost(&self, m: &Market) -> Rational {
        self.portfolio_value(m, 0, 0, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    fn new(name: &str, witness: Option<String>) -> Self {
        Check {
            name: name.to_string(),
            passed: witness.is_none(),
            witness,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the market invariants, one entry per invariant with the first
/// offending `(asset, t, scenario or atom)` on failure.
pub fn validate_market(m: &Market) -> ValidationReport {
    let n = m.num_scenarios();
    let horizon = m.horizon();
    let sname = |w: usize| m.space.name(w).to_string();
    let mut checks = Vec::new();

    let bond = (0..=horizon)
        .flat_map(|t| (0..n).map(move |w| (t, w)))
        .find(|&(t, w)| *m.price(0, t, w) != Rational::one())
        .map(|(t, w)| {
            format!(
                "asset `{}` has price {} at t = {t}, scenario `{}`",
                m.assets[0],
                m.price(0, t, w),
                sname(w)
            )
        });
    checks.push(Check::new("discounted_bond", bond));

    let mut negative = None;
    'outer: for (i, p) in m.prices.iter().enumerate() {
        for t in 0..=horizon {
            for w in 0..n {
                if p.at(t, w).is_negative() {
                    negative = Some(format!(
                        "asset `{}` has price {} at t = {t}, scenario `{}`",
                        m.assets[i],
                        p.at(t, w),
                        sname(w)
                    ));
                    break 'outer;
                }
            }
        }
    }
    checks.push(Check::new("nonnegative_prices", negative));

    let zero = m
        .prices
        .iter()
        .position(|p| p.values().iter().flatten().all(Rational::is_zero))
        .map(|i| format!("asset `{}` is identically zero", m.assets[i]));
    checks.push(Check::new("nonzero_prices", zero));

    let adapted = m.prices.iter().enumerate().find_map(|(i, p)| {
        p.adaptedness_violation(&m.full_filtration).map(|(t, k)| {
            let block: Vec<String> = m
                .full_filtration
                .at(t)
                .block(k)
                .iter()
                .map(|&w| sname(w))
                .collect();
            format!(
                "asset `{}` is not constant on full-information atom {{{}}} at t = {t}",
                m.assets[i],
                block.join(",")
            )
        })
    });
    checks.push(Check::new("adapted_to_full_filtration", adapted));

    let mut coarser = None;
    for t in 0..=horizon {
        let (f, g) = (m.full_filtration.at(t), m.seller_filtration.at(t));
        if !refines(g, f).unwrap_or(false) {
            let bad = f
                .blocks()
                .iter()
                .find(|b| b.iter().any(|&w| !g.same_block(w, b[0])))
                .map(|b| b.iter().map(|&w| sname(w)).collect::<Vec<_>>().join(","))
                .unwrap_or_default();
            coarser = Some(format!(
                "at t = {t} the full-information atom {{{bad}}} straddles seller atoms"
            ));
            break;
        }
    }
    checks.push(Check::new("seller_filtration_coarser", coarser));

    ValidationReport { checks }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditItem {
    pub passed: bool,
    /// Human-readable witnesses of every violation.
    pub violations: Vec<String>,
}

impl AuditItem {
    fn from(violations: Vec<String>) -> Self {
        AuditItem {
            passed: violations.is_empty(),
            violations,
        }
    }
}

/// Constraint-by-constraint audit of a strategy against the seller's
/// problem: superreplication, self-financing, no short sales, budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub superreplication: AuditItem,
    pub self_financing: AuditItem,
    pub no_short_selling: AuditItem,
    pub budget: AuditItem,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.superreplication.passed
            && self.self_financing.passed
            && self.no_short_selling.passed
            && self.budget.passed
    }
}

pub fn strategy_audit(
    m: &Market,
    h: &TradingStrategy,
    b: &Claim,
    v: &Rational,
) -> Result<AuditReport> {
    if !h.fits(m) {
        return Err(Error::input(
            "strategy does not match the seller filtration",
        ));
    }
    if b.len() != m.num_scenarios() {
        return Err(Error::input("claim has the wrong number of scenarios"));
    }
    let horizon = m.horizon();
    let n = m.num_scenarios();
    let sname = |w: usize| m.space.name(w);

    let mut sup = Vec::new();
    for (w, value) in h.terminal_values(m).iter().enumerate() {
        if value < b.at(w) {
            sup.push(format!(
                "scenario `{}`: terminal value {value} < payoff {}",
                sname(w),
                b.at(w)
            ));
        }
    }

    let mut sf = Vec::new();
    for t in 1..horizon {
        for w in 0..n {
            let change = h.portfolio_value(m, t, t, w) - h.portfolio_value(m, t, t - 1, w);
            if !change.is_zero() {
                sf.push(format!(
                    "t = {t}, scenario `{}`: rebalancing costs {change}",
                    sname(w)
                ));
            }
        }
    }

    let mut ns = Vec::new();
    for &j in m.short_restricted() {
        for t in 0..horizon {
            for (k, v) in h.holdings[j][t].iter().enumerate() {
                if v.is_negative() {
                    let block: Vec<&str> = m
                        .seller_filtration()
                        .at(t)
                        .block(k)
                        .iter()
                        .map(|&w| sname(w))
                        .collect();
                    ns.push(format!(
                        "asset `{}` held at {v} at t = {t} on atom {{{}}}",
                        m.assets[j],
                        block.join(",")
                    ));
                }
            }
        }
    }

    let cost = h.initial_cost(m);
    let budget = if &cost > v {
        vec![format!("initial cost {cost} exceeds {v}")]
    } else {
        vec![]
    };

    Ok(AuditReport {
        superreplication: AuditItem::from(sup),
        self_financing: AuditItem::from(sf),
        no_short_selling: AuditItem::from(ns),
        budget: AuditItem::from(budget),
    })
}

/// LP variable index of every `H_n(t, A)`.
#[derive(Debug, Clone)]
pub(crate) struct StrategyLayout {
    vars: Vec<Vec<Vec<usize>>>,
}

impl StrategyLayout {
    /// Adds one variable per `(asset, t, seller atom)`. Short-restricted
    /// assets get nonnegative variables when `respect_constraints` is set.
    pub(crate) fn add_to(lp: &mut LinearProgram, m: &Market, respect_constraints: bool) -> Self {
        let g = m.seller_filtration();
        let mut vars = Vec::with_capacity(m.num_assets());
        for a in 0..m.num_assets() {
            let kind = if respect_constraints && m.is_short_restricted(a) {
                VarKind::NonNegative
            } else {
                VarKind::Free
            };
            let mut per_t = Vec::with_capacity(m.horizon());
            for t in 0..m.horizon() {
                let per_block = (0..g.at(t).len())
                    .map(|k| lp.add_variable(format!("H[{}][{t}][{k}]", m.assets[a]), kind))
                    .collect();
                per_t.push(per_block);
            }
            vars.push(per_t);
        }
        StrategyLayout { vars }
    }

    pub(crate) fn var(&self, asset: usize, t: usize, block: usize) -> usize {
        self.vars[asset][t][block]
    }

    /// `H_n(t, w)` variable for scenario `w`.
    pub(crate) fn var_at(&self, m: &Market, asset: usize, t: usize, w: usize) -> usize {
        self.vars[asset][t][m.seller_filtration().at(t).atom(w)]
    }

    pub(crate) fn all(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        self.vars.iter().enumerate().flat_map(|(a, per_t)| {
            per_t.iter().enumerate().flat_map(move |(t, per_b)| {
                per_b.iter().enumerate().map(move |(k, &v)| (a, t, k, v))
            })
        })
    }

    /// Terms of `S(t, w) · H(s, w)`.
    pub(crate) fn value_terms(
        &self,
        m: &Market,
        t: usize,
        s: usize,
        w: usize,
    ) -> Vec<(usize, Rational)> {
        (0..m.num_assets())
            .map(|a| (self.var_at(m, a, s, w), m.price(a, t, w).clone()))
            .collect()
    }

    /// Self-financing rows `S(t) · (H(t) - H(t-1)) = 0`, `t = 1..T-1`.
    /// Generated per scenario; identical rows (which is what all scenarios
    /// of one full-information atom produce) are emitted once.
    pub(crate) fn add_self_financing(&self, lp: &mut LinearProgram, m: &Market) -> usize {
        let mut seen: HashSet<Vec<Rational>> = HashSet::new();
        let mut added = 0;
        for t in 1..m.horizon() {
            for w in 0..m.num_scenarios() {
                let mut coeffs = vec![Rational::zero(); lp.num_variables()];
                for (v, c) in self.value_terms(m, t, t, w) {
                    coeffs[v] += c;
                }
                for (v, c) in self.value_terms(m, t, t - 1, w) {
                    coeffs[v] -= c;
                }
                if coeffs.iter().all(Rational::is_zero) || !seen.insert(coeffs.clone()) {
                    continue;
                }
                lp.add_row(
                    coeffs.into_iter().enumerate().filter(|(_, c)| !c.is_zero()),
                    Relation::Eq,
                    Rational::zero(),
                );
                added += 1;
            }
        }
        added
    }

    pub(crate) fn extract(&self, m: &Market, x: &[Rational]) -> TradingStrategy {
        let mut h = TradingStrategy::zeros(m);
        for (a, t, k, v) in self.all() {
            h.set(a, t, k, x[v].clone());
        }
        h
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ArbitrageResult {
    None,
    Found {
        strategy: TradingStrategy,
        terminal_gains: Vec<Rational>,
        expected_gain: Rational,
    },
}

impl ArbitrageResult {
    pub fn is_found(&self) -> bool {
        matches!(self, ArbitrageResult::Found { .. })
    }
}

/// Searches for a seller-adapted arbitrage: self-financing, initial cost
/// at most zero, terminal value nonnegative everywhere, positive expected
/// terminal value under `P`. Holdings are boxed to `[-1, 1]` so the search
/// LP is bounded; with `respect_constraints` short-restricted assets are
/// also held nonnegative.
pub fn arbitrage_search(m: &Market, respect_constraints: bool) -> Result<ArbitrageResult> {
    m.ensure_valid().map_err(|e| Error::input(e.to_string()))?;
    let horizon = m.horizon();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let layout = StrategyLayout::add_to(&mut lp, m, respect_constraints);
    for w in 0..m.num_scenarios() {
        let p = m.space.probability(w);
        for (v, c) in layout.value_terms(m, horizon, horizon - 1, w) {
            let cur = lp.objective[v].clone();
            lp.set_objective(v, cur + p * &c);
        }
    }
    layout.add_self_financing(&mut lp, m);
    let initial: Vec<(usize, Rational)> = layout.value_terms(m, 0, 0, 0);
    lp.add_row(initial, Relation::Le, Rational::zero());
    for w in 0..m.num_scenarios() {
        lp.add_row(
            layout.value_terms(m, horizon, horizon - 1, w),
            Relation::Ge,
            Rational::zero(),
        );
    }
    let vars: Vec<usize> = layout.all().map(|(_, _, _, v)| v).collect();
    for v in vars {
        lp.add_row([(v, Rational::one())], Relation::Le, Rational::one());
        lp.add_row([(v, Rational::one())], Relation::Ge, -Rational::one());
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal(opt) if opt.value.is_positive() => {
            let strategy = layout.extract(m, &opt.primal);
            let terminal_gains = strategy.terminal_values(m);
            Ok(ArbitrageResult::Found {
                strategy,
                terminal_gains,
                expected_gain: opt.value,
            })
        }
        LpOutcome::Optimal(_) => Ok(ArbitrageResult::None),
        other => Err(Error::Internal(format!(
            "bounded arbitrage search returned status {}",
            other.status().as_str()
        ))),
    }
}
