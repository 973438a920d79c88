//! Finite probability spaces, partition-encoded filtrations and conditional
//! expectation.
//!
//! Scenarios are addressed by their position in the space; names are kept
//! only for input and output.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::Rational;

/// A finite scenario set with a strictly positive reference measure `P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScenarioSpace {
    names: Vec<String>,
    probabilities: Vec<Rational>,
}

impl ScenarioSpace {
    pub fn new(names: Vec<String>, probabilities: Vec<Rational>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::validation("scenario space is empty"));
        }
        if names.len() != probabilities.len() {
            return Err(Error::input(format!(
                "{} scenarios but {} probabilities",
                names.len(),
                probabilities.len()
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::validation(format!("duplicate scenario `{a}`")));
            }
        }
        for (name, p) in names.iter().zip(&probabilities) {
            if !p.is_positive() {
                return Err(Error::validation(format!(
                    "probability of `{name}` is {p}, must be strictly positive"
                )));
            }
        }
        let total: Rational = probabilities.iter().sum();
        if total != Rational::one() {
            return Err(Error::validation(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(ScenarioSpace {
            names,
            probabilities,
        })
    }

    /// `n` scenarios named `w1..wn` with equal weight.
    pub fn uniform(n: usize) -> Result<Self> {
        let names = (1..=n).map(|i| format!("w{i}")).collect();
        let p = Rational::new(1, n.max(1) as i64);
        Self::new(names, vec![p; n])
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn probability(&self, w: usize) -> &Rational {
        &self.probabilities[w]
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.probabilities
    }

    /// `P` as a [`Measure`].
    pub fn reference_measure(&self) -> Measure {
        Measure {
            weights: self.probabilities.clone(),
        }
    }
}

/// A partition of `{0, .., n-1}` into nonempty blocks.
///
/// Stored canonically: each block sorted, blocks ordered by their smallest
/// member. Two partitions of the same set are equal iff they have the same
/// blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    #[serde(skip)]
    block_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; n];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::validation("partition has an empty block"));
            }
            for &w in block {
                if w >= n {
                    return Err(Error::input(format!("scenario index {w} out of range")));
                }
                if seen[w] {
                    return Err(Error::validation(format!(
                        "scenario {w} appears in two blocks"
                    )));
                }
                seen[w] = true;
            }
        }
        if let Some(w) = seen.iter().position(|s| !s) {
            return Err(Error::validation(format!(
                "scenario {w} is not covered by the partition"
            )));
        }
        Ok(Self::canonical(n, blocks))
    }

    fn canonical(n: usize, mut blocks: Vec<Vec<usize>>) -> Self {
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        let mut block_of = vec![0; n];
        for (k, b) in blocks.iter().enumerate() {
            for &w in b {
                block_of[w] = k;
            }
        }
        Partition { blocks, block_of }
    }

    /// The single-block partition `{Ω}`.
    pub fn trivial(n: usize) -> Self {
        Self::canonical(n, vec![(0..n).collect()])
    }

    /// All singletons.
    pub fn discrete(n: usize) -> Self {
        Self::canonical(n, (0..n).map(|w| vec![w]).collect())
    }

    /// Groups scenarios by equality of `labels[w]`.
    pub fn from_labels<K: Ord>(labels: &[K]) -> Self {
        let mut groups: BTreeMap<&K, Vec<usize>> = BTreeMap::new();
        for (w, k) in labels.iter().enumerate() {
            groups.entry(k).or_default().push(w);
        }
        Self::canonical(labels.len(), groups.into_values().collect())
    }

    pub fn num_scenarios(&self) -> usize {
        self.block_of.len()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.block_of.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.len() == 1
    }

    /// Index of the block containing scenario `w`.
    pub fn atom_of(&self, w: usize) -> Result<usize> {
        self.block_of
            .get(w)
            .copied()
            .ok_or_else(|| Error::input(format!("unknown scenario index {w}")))
    }

    /// Block index of `w`; panics on an out-of-range scenario.
    pub(crate) fn atom(&self, w: usize) -> usize {
        self.block_of[w]
    }

    /// Coarsest common refinement.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        if self.num_scenarios() != other.num_scenarios() {
            return Err(Error::input("partitions over different scenario sets"));
        }
        let labels: Vec<(usize, usize)> = (0..self.num_scenarios())
            .map(|w| (self.block_of[w], other.block_of[w]))
            .collect();
        Ok(Partition::from_labels(&labels))
    }

    /// Whether `w` and `v` lie in the same block.
    pub fn same_block(&self, w: usize, v: usize) -> bool {
        self.block_of[w] == self.block_of[v]
    }
}

/// True iff every block of `fine` lies inside some block of `coarse`.
pub fn refines(coarse: &Partition, fine: &Partition) -> Result<bool> {
    if coarse.num_scenarios() != fine.num_scenarios() {
        return Err(Error::input(format!(
            "partitions over {} and {} scenarios",
            coarse.num_scenarios(),
            fine.num_scenarios()
        )));
    }
    Ok(fine.blocks.iter().all(|b| {
        let k = coarse.block_of[b[0]];
        b.iter().all(|&w| coarse.block_of[w] == k)
    }))
}

/// A sequence of partitions `t = 0..=T`, each refining the previous one,
/// starting from `{Ω}` and ending with all singletons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Filtration {
    partitions: Vec<Partition>,
}

impl Filtration {
    pub fn new(partitions: Vec<Partition>) -> Result<Self> {
        if partitions.len() < 2 {
            return Err(Error::validation(
                "filtration needs a horizon of at least 1",
            ));
        }
        let n = partitions[0].num_scenarios();
        if partitions.iter().any(|p| p.num_scenarios() != n) {
            return Err(Error::input(
                "filtration partitions over different scenario sets",
            ));
        }
        if !partitions[0].is_trivial() {
            return Err(Error::validation(
                "partition at t = 0 must be the trivial partition",
            ));
        }
        for t in 1..partitions.len() {
            if !refines(&partitions[t - 1], &partitions[t])? {
                return Err(Error::validation(format!(
                    "partition at t = {t} does not refine the one at t = {}",
                    t - 1
                )));
            }
        }
        if !partitions.last().unwrap().is_discrete() {
            return Err(Error::validation(
                "filtration violates G_T = F: the terminal partition is not all singletons",
            ));
        }
        Ok(Filtration { partitions })
    }

    pub fn horizon(&self) -> usize {
        self.partitions.len() - 1
    }

    pub fn at(&self, t: usize) -> &Partition {
        &self.partitions[t]
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn num_scenarios(&self) -> usize {
        self.partitions[0].num_scenarios()
    }

    /// True iff `self` is blockwise finer than or equal to `coarse` at every
    /// time.
    pub fn refines_filtration(&self, coarse: &Filtration) -> Result<bool> {
        if self.horizon() != coarse.horizon() {
            return Err(Error::input("filtrations with different horizons"));
        }
        for t in 0..=self.horizon() {
            if !refines(coarse.at(t), self.at(t))? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A real-valued process indexed by `(t, scenario)`, `t = 0..=horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Process {
    values: Vec<Vec<Rational>>,
}

impl Process {
    /// `values[t][w]`; needs at least two time points and a common width.
    pub fn new(values: Vec<Vec<Rational>>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::validation("process needs a horizon of at least 1"));
        }
        let n = values[0].len();
        if n == 0 || values.iter().any(|v| v.len() != n) {
            return Err(Error::input(
                "process is not defined on every (t, scenario) pair",
            ));
        }
        Ok(Process { values })
    }

    pub fn constant(horizon: usize, n: usize, c: Rational) -> Self {
        Process {
            values: vec![vec![c; n]; horizon + 1],
        }
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn num_scenarios(&self) -> usize {
        self.values[0].len()
    }

    pub fn at(&self, t: usize, w: usize) -> &Rational {
        &self.values[t][w]
    }

    pub fn slice(&self, t: usize) -> &[Rational] {
        &self.values[t]
    }

    pub fn values(&self) -> &[Vec<Rational>] {
        &self.values
    }

    pub fn map(&self, f: impl Fn(&Rational) -> Rational) -> Process {
        Process {
            values: self
                .values
                .iter()
                .map(|row| row.iter().map(&f).collect())
                .collect(),
        }
    }

    /// First `(t, block)` where the process is not constant on a block of
    /// `filtration.at(t)`, if any.
    pub fn adaptedness_violation(&self, filtration: &Filtration) -> Option<(usize, usize)> {
        for t in 0..=self.horizon().min(filtration.horizon()) {
            let part = filtration.at(t);
            for (k, block) in part.blocks().iter().enumerate() {
                let v0 = &self.values[t][block[0]];
                if block.iter().any(|&w| &self.values[t][w] != v0) {
                    return Some((t, k));
                }
            }
        }
        None
    }
}

/// Natural filtration of the joint paths of `processes`: at time `t`
/// scenarios are grouped by equality of every process on `0..=t`.
///
/// Fails if the terminal partition does not separate all scenarios.
pub fn filtration_from_processes(processes: &[&Process]) -> Result<Filtration> {
    let first = processes
        .first()
        .ok_or_else(|| Error::input("no processes to generate a filtration from"))?;
    let horizon = first.horizon();
    let n = first.num_scenarios();
    if processes
        .iter()
        .any(|p| p.horizon() != horizon || p.num_scenarios() != n)
    {
        return Err(Error::input(
            "processes differ in horizon or scenario count",
        ));
    }
    let mut partitions = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        let labels: Vec<Vec<&Rational>> = (0..n)
            .map(|w| {
                processes
                    .iter()
                    .flat_map(|p| (0..=t).map(move |s| p.at(s, w)))
                    .collect()
            })
            .collect();
        partitions.push(Partition::from_labels(&labels));
    }
    // Time 0 may legitimately split Ω if a process is random at t = 0; that
    // is reported by `Filtration::new` as a validation error.
    Filtration::new(partitions)
}

/// A probability vector over the scenarios (weights may be zero).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Measure {
    weights: Vec<Rational>,
}

impl Measure {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some((w, v)) = weights.iter().enumerate().find(|(_, v)| v.is_negative()) {
            return Err(Error::validation(format!(
                "weight of scenario {w} is negative ({v})"
            )));
        }
        let total: Rational = weights.iter().sum();
        if total != Rational::one() {
            return Err(Error::validation(format!("measure has total mass {total}")));
        }
        Ok(Measure { weights })
    }

    pub fn point_mass(n: usize, w: usize) -> Self {
        let mut weights = vec![Rational::zero(); n];
        weights[w] = Rational::one();
        Measure { weights }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, w: usize) -> &Rational {
        &self.weights[w]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ q(w) x(w)`.
    pub fn expectation(&self, x: &[Rational]) -> Rational {
        self.weights.iter().zip(x).map(|(q, v)| q * v).sum()
    }

    pub fn mass(&self, block: &[usize]) -> Rational {
        block.iter().map(|&w| &self.weights[w]).sum()
    }
}

/// `E_q[x | partition]` as a scenario-indexed vector.
///
/// On a block `A` with `q(A) > 0` the value is `Σ_{w∈A} q(w)x(w) / q(A)`;
/// on a `q`-null block it is `0` by convention.
pub fn conditional_expectation(
    x: &[Rational],
    partition: &Partition,
    q: &Measure,
) -> Result<Vec<Rational>> {
    let n = partition.num_scenarios();
    if x.len() != n || q.len() != n {
        return Err(Error::input(format!(
            "conditional expectation over {n} scenarios given {} values and {} weights",
            x.len(),
            q.len()
        )));
    }
    let mut out = vec![Rational::zero(); n];
    for block in partition.blocks() {
        let mass = q.mass(block);
        if mass.is_zero() {
            continue;
        }
        let avg = block.iter().map(|&w| q.weight(w) * &x[w]).sum::<Rational>() / &mass;
        for &w in block {
            out[w] = avg.clone();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::rat;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    fn rs(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| r(x)).collect()
    }

    #[test]
    fn space_validation() {
        assert!(ScenarioSpace::uniform(5).is_ok());
        let e = ScenarioSpace::new(vec!["a".into(), "b".into()], vec![rat(1, 2), rat(2, 5)])
            .unwrap_err();
        assert!(e.to_string().contains("9/10"), "{e}");
        assert!(ScenarioSpace::new(vec!["a".into(), "b".into()], vec![r(1), r(0)]).is_err());
        assert!(
            ScenarioSpace::new(vec!["a".into(), "a".into()], vec![rat(1, 2), rat(1, 2)]).is_err()
        );
    }

    #[test]
    fn refinement() {
        let any = Partition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        assert!(refines(&Partition::trivial(3), &any).unwrap());
        let coarse = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        assert!(refines(&coarse, &Partition::discrete(3)).unwrap());
        let crossing = Partition::new(3, vec![vec![0, 2], vec![1]]).unwrap();
        assert!(!refines(&coarse, &crossing).unwrap());
        assert!(refines(&coarse, &Partition::discrete(4)).is_err());
    }

    #[test]
    fn partition_rejects_overlap_and_gaps() {
        assert!(Partition::new(3, vec![vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1]]).is_err());
        assert!(Partition::new(3, vec![vec![0, 1, 2], vec![]]).is_err());
    }

    #[test]
    fn atoms() {
        let g1 = Partition::new(5, vec![vec![0, 3], vec![1], vec![2, 4]]).unwrap();
        assert_eq!(g1.block(g1.atom_of(3).unwrap()), &[0, 3]);
        assert_eq!(Partition::trivial(5).atom_of(4).unwrap(), 0);
        let d = Partition::discrete(5);
        assert_eq!(d.block(d.atom_of(1).unwrap()), &[1]);
        assert!(d.atom_of(5).is_err());
    }

    #[test]
    fn block_averages() {
        let p = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let q = Measure::new(vec![rat(1, 3); 3]).unwrap();
        let ce = conditional_expectation(&rs(&[1, 2, 3]), &p, &q).unwrap();
        assert_eq!(ce, vec![rat(3, 2), rat(3, 2), r(3)]);
    }

    #[test]
    fn zero_mass_block_is_zero() {
        let p = Partition::new(3, vec![vec![0, 1], vec![2]]).unwrap();
        let q = Measure::new(vec![rat(1, 2), rat(1, 2), r(0)]).unwrap();
        let ce = conditional_expectation(&rs(&[1, 2, 99]), &p, &q).unwrap();
        assert_eq!(ce[2], r(0));
    }

    #[test]
    fn total_expectation_on_trivial() {
        let q = Measure::new(vec![rat(1, 2), rat(1, 4), rat(1, 4)]).unwrap();
        let ce = conditional_expectation(&rs(&[4, 8, 0]), &Partition::trivial(3), &q).unwrap();
        assert_eq!(ce, vec![r(4); 3]);
    }

    #[test]
    fn constant_process_cannot_generate() {
        let c = Process::constant(2, 3, r(1));
        let e = filtration_from_processes(&[&c]).unwrap_err();
        assert!(e.to_string().contains("G_T = F"), "{e}");
    }

    #[test]
    fn generated_filtration_is_monotone() {
        let s = Process::new(vec![rs(&[1, 1, 1]), rs(&[2, 2, 0]), rs(&[3, 1, 0])]).unwrap();
        let f = filtration_from_processes(&[&s]).unwrap();
        assert_eq!(f.at(1).blocks(), &[vec![0, 1], vec![2]]);
        assert!(f.at(2).is_discrete());
    }
}
