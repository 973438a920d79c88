//! Test-only oracles and instance generators. Nothing here calls the
//! simplex solver: vertices are found by solving every square subsystem of
//! active constraints with Gaussian elimination.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use superhedge::lp::{rat, HPolytope, LinearProgram, Rational, Relation, Sense, VarKind};
use superhedge::market::{Claim, Market};
use superhedge::scenario::{Filtration, Partition, Process, ScenarioSpace};

pub type Row = (Vec<Rational>, Rational);

/// Reference prices of the two-period example with borrowing and short
/// sales banned, registered from [`enumerate_lp`] before the solver was
/// written: the unit claim and the call struck at 6.
pub const UNIT_CLAIM_PRICE: (i64, i64) = (6, 7);
pub const CALL_PRICE: (i64, i64) = (41, 24);

/// Solves `A x = b` when `A` has full column rank and the system is
/// consistent; `None` otherwise.
pub fn solve_unique(rows: &[Row], n: usize) -> Option<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(a, b)| {
            let mut r = a.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..n {
        let p = (pivot_row..m.len()).find(|&i| !m[i][col].is_zero())?;
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for v in m[pivot_row].iter_mut() {
            *v = &*v * &inv;
        }
        let pr = m[pivot_row].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, p) in row.iter_mut().zip(&pr) {
                    *v = &*v - &(&f * p);
                }
            }
        }
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| m[i][n].clone()).collect())
}

pub fn rank(rows: &[Vec<Rational>], n: usize) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pr = m[r].clone();
        for row in m.iter_mut().skip(r + 1) {
            if !row[col].is_zero() {
                let f = &row[col] / &pr[col];
                for (v, p) in row.iter_mut().zip(&pr).take(n) {
                    *v = &*v - &(&f * p);
                }
            }
        }
        r += 1;
    }
    r
}

fn dot(a: &[Rational], x: &[Rational]) -> Rational {
    a.iter().zip(x).map(|(a, x)| a * x).sum()
}

fn for_each_subset(len: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..len {
            if len - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, len, k, cur, f);
            cur.pop();
        }
    }
    go(0, len, k, &mut Vec::with_capacity(k), f);
}

/// Vertices of `{x : eqs hold, a·x <= b for every ineq}` in `R^n`, by
/// brute force over active sets. The set must be pointed.
pub fn vertices(n: usize, eqs: &[Row], ineqs: &[Row]) -> Vec<Vec<Rational>> {
    let r = rank(&eqs.iter().map(|(a, _)| a.clone()).collect::<Vec<_>>(), n);
    let need = n - r;
    let mut found = BTreeSet::new();
    for_each_subset(ineqs.len(), need, &mut |idx| {
        let mut system: Vec<Row> = eqs.to_vec();
        system.extend(idx.iter().map(|&i| ineqs[i].clone()));
        if let Some(x) = solve_unique(&system, n) {
            let feasible = eqs.iter().all(|(a, b)| &dot(a, &x) == b)
                && ineqs.iter().all(|(a, b)| &dot(a, &x) <= b);
            if feasible {
                found.insert(x);
            }
        }
    });
    found.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Optimal(Rational),
    Infeasible,
    Unbounded,
}

/// Splits every free variable into a difference of nonnegative ones and
/// returns `(n, eqs, ineqs as <=, objective for minimization)`.
fn standard_form(lp: &LinearProgram) -> (usize, Vec<Row>, Vec<Row>, Vec<Rational>) {
    let mut cols: Vec<(usize, Rational)> = Vec::new();
    for (j, v) in lp.variables.iter().enumerate() {
        cols.push((j, Rational::one()));
        if v.kind == VarKind::Free {
            cols.push((j, -Rational::one()));
        }
    }
    let n = cols.len();
    let expand =
        |coef: &[Rational]| -> Vec<Rational> { cols.iter().map(|(j, s)| &coef[*j] * s).collect() };
    let mut eqs = Vec::new();
    let mut ineqs = Vec::new();
    for row in &lp.rows {
        let a = expand(&row.coefficients);
        match row.relation {
            Relation::Eq => eqs.push((a, row.rhs.clone())),
            Relation::Le => ineqs.push((a, row.rhs.clone())),
            Relation::Ge => ineqs.push((a.iter().map(|c| -c).collect(), -&row.rhs)),
        }
    }
    for j in 0..n {
        let mut a = vec![Rational::zero(); n];
        a[j] = -Rational::one();
        ineqs.push((a, Rational::zero()));
    }
    let sign = match lp.sense {
        Sense::Minimize => Rational::one(),
        Sense::Maximize => -Rational::one(),
    };
    let c = expand(&lp.objective).iter().map(|c| c * &sign).collect();
    (n, eqs, ineqs, c)
}

/// Optimal value by enumerating every basic feasible solution; boundedness
/// by enumerating the extreme rays of the recession cone (normalized so the
/// entries sum to 1).
pub fn enumerate_lp(lp: &LinearProgram) -> OracleOutcome {
    let (n, eqs, ineqs, c) = standard_form(lp);
    let points = vertices(n, &eqs, &ineqs);
    if points.is_empty() {
        return OracleOutcome::Infeasible;
    }
    let mut ray_eqs: Vec<Row> = eqs
        .iter()
        .map(|(a, _)| (a.clone(), Rational::zero()))
        .collect();
    ray_eqs.push((vec![Rational::one(); n], Rational::one()));
    let ray_ineqs: Vec<Row> = ineqs
        .iter()
        .map(|(a, _)| (a.clone(), Rational::zero()))
        .collect();
    if vertices(n, &ray_eqs, &ray_ineqs)
        .iter()
        .any(|r| dot(&c, r).is_negative())
    {
        return OracleOutcome::Unbounded;
    }
    let best = points.iter().map(|x| dot(&c, x)).min().expect("nonempty");
    OracleOutcome::Optimal(match lp.sense {
        Sense::Minimize => best,
        Sense::Maximize => -best,
    })
}

/// Vertices of a polytope given by free variables and explicit rows.
pub fn polytope_vertices(p: &HPolytope) -> Vec<Vec<Rational>> {
    let mut eqs = Vec::new();
    let mut ineqs = Vec::new();
    for row in &p.rows {
        match row.relation {
            Relation::Eq => eqs.push((row.coefficients.clone(), row.rhs.clone())),
            Relation::Le => ineqs.push((row.coefficients.clone(), row.rhs.clone())),
            Relation::Ge => ineqs.push((row.coefficients.iter().map(|c| -c).collect(), -&row.rhs)),
        }
    }
    vertices(p.dim(), &eqs, &ineqs)
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_integer(x)).collect()
}

pub fn random_rational(rng: &mut ChaCha8Rng, lo: i64, hi: i64, max_den: i64) -> Rational {
    rat(rng.gen_range(lo..=hi), rng.gen_range(1..=max_den))
}

/// Splits every block of `p` at random.
pub fn random_refinement(rng: &mut ChaCha8Rng, p: &Partition) -> Partition {
    let n = p.num_scenarios();
    let mut blocks = Vec::new();
    for b in p.blocks() {
        let pieces = rng.gen_range(1..=b.len().min(3));
        let mut parts: Vec<Vec<usize>> = vec![Vec::new(); pieces];
        let mut members = b.clone();
        members.shuffle(rng);
        for (i, w) in members.into_iter().enumerate() {
            let k = if i < pieces {
                i
            } else {
                rng.gen_range(0..pieces)
            };
            parts[k].push(w);
        }
        blocks.extend(parts);
    }
    Partition::new(n, blocks).expect("refinement is a partition")
}

/// Merges blocks of `p` at random.
pub fn random_coarsening(rng: &mut ChaCha8Rng, p: &Partition) -> Partition {
    let n = p.num_scenarios();
    let groups = rng.gen_range(1..=p.len());
    let mut merged: Vec<Vec<usize>> = vec![Vec::new(); groups];
    for (i, b) in p.blocks().iter().enumerate() {
        let k = if i < groups {
            i
        } else {
            rng.gen_range(0..groups)
        };
        merged[k].extend(b);
    }
    merged.retain(|b| !b.is_empty());
    Partition::new(n, merged).expect("coarsening is a partition")
}

pub fn random_measure(rng: &mut ChaCha8Rng, n: usize, allow_zero: bool) -> Vec<Rational> {
    loop {
        let lo = if allow_zero { 0 } else { 1 };
        let w: Vec<i64> = (0..n).map(|_| rng.gen_range(lo..=6)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.iter().map(|&x| rat(x, total)).collect();
        }
    }
}

fn block_average(values: &[Rational], p: &Partition, prob: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); values.len()];
    for b in p.blocks() {
        let mass: Rational = b.iter().map(|&w| prob[w].clone()).sum();
        let avg = b.iter().map(|&w| &prob[w] * &values[w]).sum::<Rational>() / &mass;
        for &w in b {
            out[w] = avg.clone();
        }
    }
    out
}

/// A generated market with everything needed to perturb it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub market: Market,
    pub claims: Vec<Claim>,
}

/// Random arbitrage-free market: `P`-martingale prices on a random full
/// filtration, a nonnegative downward drift on short-restricted stocks, and
/// a seller filtration that sees at least the prices.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(2..=8);
    let horizon = rng.gen_range(1..=3);
    let stocks = rng.gen_range(1..=2);
    let prob = random_measure(rng, n, false);
    let names = (1..=n).map(|i| format!("w{i}")).collect();
    let space = ScenarioSpace::new(names, prob.clone()).unwrap();

    let mut full = vec![Partition::trivial(n)];
    for _ in 1..horizon {
        let next = random_refinement(rng, full.last().unwrap());
        full.push(next);
    }
    full.push(Partition::discrete(n));
    let full = Filtration::new(full).unwrap();

    let mut restricted = BTreeSet::new();
    for a in 0..=stocks {
        if rng.gen_bool(0.5) {
            restricted.insert(a);
        }
    }

    let mut prices = vec![Process::constant(horizon, n, Rational::one())];
    for a in 1..=stocks {
        let mut values = vec![Vec::new(); horizon + 1];
        values[horizon] = (0..n)
            .map(|_| Rational::from_integer(rng.gen_range(1..=10)))
            .collect();
        for t in (0..horizon).rev() {
            values[t] = block_average(&values[t + 1], full.at(t), &prob);
        }
        if restricted.contains(&a) {
            let c = [rat(0, 1), rat(1, 2), rat(1, 1), rat(2, 1)][rng.gen_range(0..4)].clone();
            for (t, row) in values.iter_mut().enumerate() {
                let shift = &c * &Rational::from_integer((horizon - t) as i64);
                for v in row.iter_mut() {
                    *v = &*v + &shift;
                }
            }
        }
        prices.push(Process::new(values).unwrap());
    }

    let mut seller = vec![Partition::trivial(n)];
    for t in 1..horizon {
        let labels: Vec<Vec<Rational>> = (0..n)
            .map(|w| {
                prices
                    .iter()
                    .flat_map(|p| (0..=t).map(move |s| p.at(s, w).clone()))
                    .collect()
            })
            .collect();
        let seen = Partition::from_labels(&labels);
        let extra = random_coarsening(rng, full.at(t));
        let g = seller
            .last()
            .unwrap()
            .join(&seen)
            .unwrap()
            .join(&extra)
            .unwrap();
        seller.push(g);
    }
    seller.push(Partition::discrete(n));
    let seller = Filtration::new(seller).unwrap();

    let market = Market::new(
        space,
        (0..=stocks)
            .map(|a| {
                if a == 0 {
                    "bond".to_string()
                } else {
                    format!("s{a}")
                }
            })
            .collect(),
        prices,
        full,
        seller,
        restricted,
    )
    .unwrap();
    let claims = (0..2).map(|_| random_claim(rng, n)).collect();
    Instance { market, claims }
}

pub fn random_claim(rng: &mut ChaCha8Rng, n: usize) -> Claim {
    Claim::new((0..n).map(|_| random_rational(rng, 0, 8, 3)).collect()).unwrap()
}

/// A coarser seller filtration `G'_t = G_{phi(t)}` with `phi`
/// nondecreasing, `phi(t) <= t` and `phi(T) = T`.
pub fn coarser_seller(rng: &mut ChaCha8Rng, m: &Market) -> Filtration {
    let horizon = m.horizon();
    let mut phi = vec![0usize; horizon + 1];
    for t in 1..horizon {
        phi[t] = rng.gen_range(phi[t - 1]..=t);
    }
    phi[horizon] = horizon;
    Filtration::new(
        phi.iter()
            .map(|&s| m.seller_filtration().at(s).clone())
            .collect(),
    )
    .unwrap()
}

/// Fuzzed LP with up to 6 variables (at most 2 free) and up to 8 rows.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let sense = if rng.gen_bool(0.5) {
        Sense::Maximize
    } else {
        Sense::Minimize
    };
    let mut lp = LinearProgram::new(sense);
    let n = rng.gen_range(1..=6);
    let mut free = 0;
    for j in 0..n {
        let kind = if free < 2 && rng.gen_bool(0.2) {
            free += 1;
            VarKind::Free
        } else {
            VarKind::NonNegative
        };
        let v = lp.add_variable(format!("x{j}"), kind);
        lp.set_objective(v, Rational::from_integer(rng.gen_range(-4..=4)));
    }
    // Half the programs are built around a known feasible point.
    let anchor: Option<Vec<i64>> = rng
        .gen_bool(0.5)
        .then(|| (0..n).map(|_| rng.gen_range(0..=3)).collect());
    for _ in 0..rng.gen_range(1..=8) {
        let mut terms = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                terms.push((j, rng.gen_range(-4..=4)));
            }
        }
        let rel = [Relation::Le, Relation::Le, Relation::Ge, Relation::Eq][rng.gen_range(0..4)];
        let rhs = match &anchor {
            Some(x) => {
                let lhs: i64 = terms.iter().map(|&(j, c)| c * x[j]).sum();
                match rel {
                    Relation::Le => lhs + rng.gen_range(0..=3),
                    Relation::Ge => lhs - rng.gen_range(0..=3),
                    Relation::Eq => lhs,
                }
            }
            None => rng.gen_range(-3..=8),
        };
        lp.add_row(
            terms
                .into_iter()
                .map(|(j, c)| (j, Rational::from_integer(c))),
            rel,
            Rational::from_integer(rhs),
        );
    }
    lp
}

/// The stock path under the alternative reading in which the t = 1 price
/// is the sum of the two hidden drivers scenario by scenario.
pub fn driver_sum_stock() -> Process {
    Process::new(vec![
        ints(&[6; 5]),
        ints(&[7, 9, 5, 7, 5]),
        ints(&[3, 9, 7, 8, 4]),
    ])
    .unwrap()
}
