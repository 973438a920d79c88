//! The JSON market document: scenarios, probabilities, price paths,
//! filtrations, short-sale constraints and claims, with every number written
//! as an exact rational string.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::Rational;
use crate::market::{Claim, Market};
use crate::scenario::{filtration_from_processes, Filtration, Partition, Process, ScenarioSpace};

/// Values of one process: time (as a decimal string) to scenario to value.
pub type PathTable = BTreeMap<String, BTreeMap<String, String>>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssetEntry {
    pub name: String,
    pub prices: PathTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverEntry {
    pub name: String,
    pub values: PathTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FullFiltrationSpec {
    /// Natural filtration of the named drivers and/or assets.
    GeneratedBy(Vec<String>),
    /// Blocks of scenario names, one partition per time `0..=T`.
    Partitions(Vec<Vec<Vec<String>>>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SellerFiltrationSpec {
    /// Natural filtration of all asset prices.
    #[default]
    #[serde(rename = "price-generated")]
    PriceGenerated,
    #[serde(rename = "partitions")]
    Partitions(Vec<Vec<Vec<String>>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketDocument {
    pub scenarios: Vec<String>,
    pub probabilities: BTreeMap<String, String>,
    pub horizon: usize,
    /// The first asset is the bond.
    pub assets: Vec<AssetEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drivers: Vec<DriverEntry>,
    pub full_filtration: FullFiltrationSpec,
    #[serde(default)]
    pub seller_filtration: SellerFiltrationSpec,
    #[serde(default)]
    pub no_short: Vec<String>,
    #[serde(default)]
    pub claims: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A market with its named claims, in document (name) order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadedDocument {
    pub market: Market,
    pub claims: Vec<(String, Claim)>,
}

impl LoadedDocument {
    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }
}

fn value_error(field: impl Into<String>, message: impl ToString) -> Error {
    Error::Value {
        field: field.into(),
        message: message.to_string(),
    }
}

fn parse_rational(field: &str, text: &str) -> Result<Rational> {
    text.parse().map_err(|e| value_error(field, e))
}

fn scenario_row(
    field: &str,
    names: &[String],
    row: &BTreeMap<String, String>,
) -> Result<Vec<Rational>> {
    if let Some(extra) = row.keys().find(|k| !names.contains(k)) {
        return Err(value_error(field, format!("unknown scenario `{extra}`")));
    }
    names
        .iter()
        .map(|w| match row.get(w) {
            Some(text) => parse_rational(&format!("{field}.{w}"), text),
            None => Err(value_error(field, format!("missing scenario `{w}`"))),
        })
        .collect()
}

fn path_table(field: &str, names: &[String], horizon: usize, table: &PathTable) -> Result<Process> {
    let mut rows: Vec<Option<Vec<Rational>>> = vec![None; horizon + 1];
    for (key, row) in table {
        let t = key
            .parse::<usize>()
            .ok()
            .filter(|&t| t <= horizon && key == &t.to_string())
            .ok_or_else(|| {
                value_error(field, format!("time key `{key}` is not in 0..={horizon}"))
            })?;
        rows[t] = Some(scenario_row(&format!("{field}.{t}"), names, row)?);
    }
    let values = rows
        .into_iter()
        .enumerate()
        .map(|(t, r)| r.ok_or_else(|| value_error(field, format!("missing time {t}"))))
        .collect::<Result<Vec<_>>>()?;
    Process::new(values)
}

fn explicit_filtration(
    field: &str,
    names: &[String],
    parts: &[Vec<Vec<String>>],
) -> Result<Filtration> {
    let index = |w: &String| {
        names
            .iter()
            .position(|n| n == w)
            .ok_or_else(|| value_error(field, format!("unknown scenario `{w}`")))
    };
    let partitions = parts
        .iter()
        .enumerate()
        .map(|(t, blocks)| {
            let blocks = blocks
                .iter()
                .map(|b| b.iter().map(index).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Partition::new(names.len(), blocks).map_err(|e| value_error(format!("{field}[{t}]"), e))
        })
        .collect::<Result<Vec<_>>>()?;
    Filtration::new(partitions)
}

impl MarketDocument {
    /// Resolves the document into a market and claims. Shapes, names and
    /// values are checked; the market invariants are not (see
    /// [`parse_market_document`]).
    pub fn resolve(&self) -> Result<LoadedDocument> {
        let names = &self.scenarios;
        if self.horizon == 0 {
            return Err(value_error("horizon", "must be at least 1"));
        }
        if let Some(extra) = self.probabilities.keys().find(|k| !names.contains(k)) {
            return Err(value_error(
                "probabilities",
                format!("unknown scenario `{extra}`"),
            ));
        }
        let probs = names
            .iter()
            .map(|w| {
                let field = format!("probabilities.{w}");
                let text = self.probabilities.get(w).ok_or_else(|| {
                    value_error("probabilities", format!("missing scenario `{w}`"))
                })?;
                let p = parse_rational(&field, text)?;
                if !p.is_positive() {
                    return Err(value_error(field, format!("{p} is not strictly positive")));
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>>>()?;
        let space = ScenarioSpace::new(names.clone(), probs)?;

        if self.assets.is_empty() {
            return Err(value_error("assets", "at least the bond is required"));
        }
        let mut asset_names = Vec::new();
        let mut prices = Vec::new();
        for (i, a) in self.assets.iter().enumerate() {
            if asset_names.contains(&a.name) {
                return Err(value_error(
                    format!("assets[{i}].name"),
                    format!("duplicate asset `{}`", a.name),
                ));
            }
            prices.push(path_table(
                &format!("assets[{i}].prices"),
                names,
                self.horizon,
                &a.prices,
            )?);
            asset_names.push(a.name.clone());
        }
        let mut drivers = Vec::new();
        for (i, d) in self.drivers.iter().enumerate() {
            if asset_names.contains(&d.name) || self.drivers[..i].iter().any(|e| e.name == d.name) {
                return Err(value_error(
                    format!("drivers[{i}].name"),
                    format!("duplicate name `{}`", d.name),
                ));
            }
            drivers.push(path_table(
                &format!("drivers[{i}].values"),
                names,
                self.horizon,
                &d.values,
            )?);
        }

        let full = match &self.full_filtration {
            FullFiltrationSpec::GeneratedBy(sources) => {
                let procs = sources
                    .iter()
                    .map(|s| {
                        if let Some(i) = asset_names.iter().position(|a| a == s) {
                            Ok(&prices[i])
                        } else if let Some(i) = self.drivers.iter().position(|d| &d.name == s) {
                            Ok(&drivers[i])
                        } else {
                            Err(value_error(
                                "full_filtration.generated_by",
                                format!("unknown process `{s}`"),
                            ))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                filtration_from_processes(&procs)?
            }
            FullFiltrationSpec::Partitions(parts) => {
                explicit_filtration("full_filtration.partitions", names, parts)?
            }
        };
        let seller = match &self.seller_filtration {
            SellerFiltrationSpec::PriceGenerated => {
                filtration_from_processes(&prices.iter().collect::<Vec<_>>())?
            }
            SellerFiltrationSpec::Partitions(parts) => {
                explicit_filtration("seller_filtration.partitions", names, parts)?
            }
        };
        if full.horizon() != self.horizon || seller.horizon() != self.horizon {
            return Err(value_error(
                "horizon",
                "filtrations must have one partition per time 0..=horizon",
            ));
        }

        let mut restricted = BTreeSet::new();
        for a in &self.no_short {
            let i = asset_names
                .iter()
                .position(|n| n == a)
                .ok_or_else(|| value_error("no_short", format!("unknown asset `{a}`")))?;
            restricted.insert(i);
        }
        let market = Market::new(space, asset_names, prices, full, seller, restricted)?;

        let claims = self
            .claims
            .iter()
            .map(|(name, row)| {
                let field = format!("claims.{name}");
                let payoff = scenario_row(&field, names, row)?;
                if let Some(w) = payoff.iter().position(Rational::is_negative) {
                    return Err(value_error(
                        format!("{field}.{}", names[w]),
                        "payoff must be nonnegative",
                    ));
                }
                Ok((name.clone(), Claim::new(payoff)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LoadedDocument { market, claims })
    }

    /// Writes a market and claims back out with explicit partitions.
    pub fn from_market(market: &Market, claims: &[(String, Claim)]) -> MarketDocument {
        let names = market.space().names();
        let row = |values: &[Rational]| -> BTreeMap<String, String> {
            names
                .iter()
                .cloned()
                .zip(values.iter().map(Rational::to_string))
                .collect()
        };
        let parts = |f: &Filtration| -> Vec<Vec<Vec<String>>> {
            f.partitions()
                .iter()
                .map(|p| {
                    p.blocks()
                        .iter()
                        .map(|b| b.iter().map(|&w| names[w].clone()).collect())
                        .collect()
                })
                .collect()
        };
        MarketDocument {
            scenarios: names.to_vec(),
            probabilities: row(market.space().probabilities()),
            horizon: market.horizon(),
            assets: market
                .asset_names()
                .iter()
                .zip(market.prices())
                .map(|(name, p)| AssetEntry {
                    name: name.clone(),
                    prices: (0..=market.horizon())
                        .map(|t| (t.to_string(), row(p.slice(t))))
                        .collect(),
                })
                .collect(),
            drivers: Vec::new(),
            full_filtration: FullFiltrationSpec::Partitions(parts(market.full_filtration())),
            seller_filtration: SellerFiltrationSpec::Partitions(parts(market.seller_filtration())),
            no_short: market
                .short_restricted()
                .iter()
                .map(|&i| market.asset_names()[i].clone())
                .collect(),
            claims: claims
                .iter()
                .map(|(n, c)| (n.clone(), row(c.payoff())))
                .collect(),
            notes: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// Syntax-level parse: JSON shape errors carry their line and column.
pub fn read_market_document(text: &str) -> Result<MarketDocument> {
    serde_json::from_str(text).map_err(|e| {
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message,
        }
    })
}

/// Parses and resolves a document, rejecting markets that fail any
/// invariant of [`validate_market`](crate::market::validate_market).
pub fn parse_market_document(text: &str) -> Result<LoadedDocument> {
    let doc = read_market_document(text)?.resolve()?;
    doc.market.ensure_valid()?;
    Ok(doc)
}
