//! Small ready-made markets used by the examples, the guide and the tests.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::lp::Rational;
use crate::market::{Claim, Market};
use crate::scenario::{filtration_from_processes, Filtration, Partition, Process, ScenarioSpace};

fn ints(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
    rows.iter()
        .map(|r| r.iter().map(|&v| Rational::from_integer(v)).collect())
        .collect()
}

/// Hidden driver `X` of the two-period example.
pub fn hidden_x() -> Process {
    Process::new(ints(&[
        &[3, 3, 3, 3, 3],
        &[4, 4, 2, 2, 2],
        &[4, 4, 2, 2, 2],
    ]))
    .expect("static data")
}

/// Hidden driver `ξ` of the two-period example.
pub fn hidden_xi() -> Process {
    Process::new(ints(&[
        &[3, 3, 3, 3, 3],
        &[3, 5, 3, 5, 3],
        &[3, 5, 3, 5, 3],
    ]))
    .expect("static data")
}

/// Stock price of the two-period example, scenarios `w1..w5`.
pub fn hidden_stock() -> Process {
    Process::new(ints(&[
        &[6, 6, 6, 6, 6],
        &[7, 5, 9, 7, 9],
        &[3, 9, 7, 8, 4],
    ]))
    .expect("static data")
}

/// Two-period, five-scenario market with a bond and one stock. The full
/// filtration is generated by two hidden drivers together with the stock;
/// the seller only observes the stock price. `P` is uniform.
///
/// `short_restricted` holds asset indices: 0 is the bond, 1 the stock.
pub fn hidden_information(short_restricted: &[usize]) -> Result<Market> {
    let space = ScenarioSpace::uniform(5)?;
    let bond = Process::constant(2, 5, Rational::one());
    let stock = hidden_stock();
    let full = filtration_from_processes(&[&hidden_x(), &hidden_xi(), &stock])?;
    let seller = filtration_from_processes(&[&stock])?;
    Market::new(
        space,
        vec!["bond".into(), "stock".into()],
        vec![bond, stock],
        full,
        seller,
        short_restricted.iter().copied().collect(),
    )
}

/// `(S(2) - 6)^+` on the two-period example.
pub fn hidden_information_call() -> Claim {
    let strike = Rational::from_integer(6);
    let payoff = hidden_stock()
        .slice(2)
        .iter()
        .map(|s| (s - &strike).max(Rational::zero()))
        .collect();
    Claim::new(payoff).expect("nonnegative payoff")
}

/// One period, two scenarios, stock `2 -> {1, 3}`, full information and no
/// trading constraints. `P` is uniform.
pub fn binomial() -> Result<Market> {
    let space = ScenarioSpace::uniform(2)?;
    let bond = Process::constant(1, 2, Rational::one());
    let stock = Process::new(ints(&[&[2, 2], &[1, 3]]))?;
    let full = Filtration::new(vec![Partition::trivial(2), Partition::discrete(2)])?;
    Market::new(
        space,
        vec!["bond".into(), "stock".into()],
        vec![bond, stock],
        full.clone(),
        full,
        BTreeSet::new(),
    )
}
